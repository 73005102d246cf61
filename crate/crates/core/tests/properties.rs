use std::collections::BTreeMap;

use proptest::prelude::*;
use rbf_bernstein::bandlimit::bandlimit_field;
use rbf_bernstein::geometry::{gen_quasi_uniform, geometry_report, Domain};
use rbf_bernstein::kernels::{make_kernel, KernelClass};
use rbf_bernstein::network::{coeff_norm, decay_radius, sample_to_grid, GridField, RbfNetwork};
use rbf_bernstein::rbf::sobolev_spline;
use rbf_bernstein::report::{Cell, Contract, Format, Report, Table};

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1e-300)
}

fn exponent() -> impl Strategy<Value = f64> {
    prop_oneof![
        Just(1.0),
        Just(1.5),
        Just(2.0),
        Just(3.0),
        Just(f64::INFINITY)
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn separation_and_fill_scale_under_dilation(
        dim in 1usize..=2,
        seed in 0u64..1000,
        jitter in 0.0f64..0.3,
        lambda in 0.1f64..10.0,
    ) {
        let spacing = 0.25;
        let ps = gen_quasi_uniform(&Domain::cube(dim, 0.0, 1.0).unwrap(), spacing, jitter * spacing, seed).unwrap();
        let a = geometry_report(&ps, 64).unwrap();
        let b = geometry_report(&ps.dilate(lambda).unwrap(), 64).unwrap();
        prop_assert!(close(b.q, lambda * a.q, 1e-12));
        prop_assert!(close(b.h, lambda * a.h, 1e-12));
        prop_assert!(close(b.rho, a.rho, 1e-12));
    }

    #[test]
    fn separation_and_fill_are_translation_invariant(
        seed in 0u64..1000,
        shift in prop::collection::vec(-5.0f64..5.0, 2),
    ) {
        let ps = gen_quasi_uniform(&Domain::cube(2, 0.0, 1.0).unwrap(), 0.2, 0.05, seed).unwrap();
        let a = geometry_report(&ps, 50).unwrap();
        let b = geometry_report(&ps.translate(&shift).unwrap(), 50).unwrap();
        prop_assert!(close(a.q, b.q, 1e-9));
        prop_assert!(close(a.h, b.h, 1e-9));
    }

    #[test]
    fn kernel_profiles_scale(k1 in any::<bool>(), sigma in 0.1f64..50.0, r in 0.0f64..100.0) {
        let class = if k1 { KernelClass::K1 } else { KernelClass::K2 };
        let unit = make_kernel(class, None).unwrap();
        let ks = unit.at_scale(sigma).unwrap();
        prop_assert_eq!(ks.kappa(r), unit.kappa_unit(r / sigma));
        let (lo, hi) = ks.support();
        if r < lo || r > hi {
            prop_assert_eq!(ks.kappa(r), 0.0);
        }
        prop_assert!((0.0..=1.0).contains(&ks.kappa(r)));
    }

    #[test]
    fn coefficient_norms_are_homogeneous(
        a in prop::collection::vec(-10.0f64..10.0, 1..40),
        lambda in -5.0f64..5.0,
        p in exponent(),
    ) {
        let scaled: Vec<f64> = a.iter().map(|v| lambda * v).collect();
        prop_assert!(close(coeff_norm(&scaled, p), lambda.abs() * coeff_norm(&a, p), 1e-12));
        let brute: f64 = a.iter().map(|v| v.abs()).sum();
        prop_assert!(close(coeff_norm(&a, 1.0), brute, 1e-12));
    }

    #[test]
    fn stability_ratio_is_scale_free(
        a in prop::collection::vec(-1.0f64..1.0, 5),
        lambda in 0.01f64..100.0,
        p in exponent(),
    ) {
        prop_assume!(a.iter().any(|v| v.abs() > 0.1));
        let ps = gen_quasi_uniform(&Domain::cube(1, 0.0, 1.0).unwrap(), 0.25, 0.0, 0).unwrap();
        let profile = sobolev_spline(3.0, 1).unwrap();
        let pad = decay_radius(&profile, 1e-8).unwrap();
        let net = RbfNetwork::new(ps, a.clone(), profile).unwrap();
        let g = sample_to_grid(&net, 1.0 / 32.0, pad).unwrap();
        let scaled: Vec<f64> = a.iter().map(|v| lambda * v).collect();
        let gs = sample_to_grid(&net.with_coeffs(scaled.clone()).unwrap(), 1.0 / 32.0, pad).unwrap();
        let r0 = coeff_norm(&a, p) / g.lp_norm(p);
        let r1 = coeff_norm(&scaled, p) / gs.lp_norm(p);
        prop_assert!(close(r0, r1, 1e-12));
    }

    #[test]
    fn grid_fields_round_trip_through_files(
        dim in 1usize..=3,
        ext in prop::collection::vec(2usize..6, 3),
        origin in prop::collection::vec(-1e3f64..1e3, 3),
        spacing in 1e-6f64..10.0,
        seed in any::<u64>(),
    ) {
        let extents = ext[..dim].to_vec();
        let n: usize = extents.iter().product();
        let values: Vec<f64> = (0..n).map(|i| ((seed ^ i as u64) as f64).sin() * 1e3).collect();
        let f = GridField::new(origin[..dim].to_vec(), spacing, extents, values).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        f.write_binary(&path).unwrap();
        let back = GridField::read_binary(&path).unwrap();
        prop_assert_eq!(back.values(), f.values());
        prop_assert_eq!(back.extents(), f.extents());
        prop_assert_eq!(back.origin(), f.origin());
        prop_assert_eq!(back.spacing(), f.spacing());
    }

    #[test]
    fn reports_round_trip_through_json(
        nums in prop::collection::vec(prop::num::f64::ANY, 1..8),
        ints in prop::collection::vec(0usize..1_000_000, 1..8),
        label in "[a-z ,\"]{0,12}",
        holds in any::<bool>(),
    ) {
        let mut t = Table::new(&["value", "count", "label"]);
        for (v, i) in nums.iter().zip(&ints) {
            t.push(vec![Cell::num(*v), (*i).into(), label.as_str().into()]).unwrap();
        }
        let cfg = BTreeMap::from([("label".to_string(), label.clone())]);
        let r = Report::new("prop", cfg, t)
            .with_summary(serde_json::json!({ "first": nums.iter().copied().find(|v| v.is_finite()) }))
            .unwrap()
            .with_contracts(vec![Contract::new("c", holds, label.clone())]);
        let back = Report::parse_json(&r.render(Format::Json).unwrap()).unwrap();
        prop_assert_eq!(back, r);
    }

    #[test]
    fn bandlimiting_is_idempotent_on_the_passband(
        centers in prop::collection::vec(-2.0f64..2.0, 1..4),
        widths in prop::collection::vec(0.5f64..1.5, 4),
        sigma in 2.0f64..6.0,
        wider in 2.0f64..4.0,
    ) {
        let f = GridField::from_fn(vec![-24.0], 1.0 / 16.0, vec![769], |x| {
            centers.iter().zip(&widths).map(|(c, w)| (-(x[0] - c).powi(2) / (2.0 * w * w)).exp()).sum()
        }).unwrap();
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        let once = bandlimit_field(&f, &k2, sigma).unwrap();
        // the output spectrum lies in |w| <= sigma, where a filter of scale >= 2 sigma is 1
        let wide = k2.at_scale(wider * sigma).unwrap();
        let twice = once.apply_multiplier(|w| wide.kappa(w)).unwrap();
        let scale = once.lp_norm(f64::INFINITY);
        for (a, b) in once.values().iter().zip(twice.values()) {
            prop_assert!((a - b).abs() <= 1e-10 * scale);
        }
    }
}
