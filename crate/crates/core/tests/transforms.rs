use std::f64::consts::PI;

use rbf_bernstein::hankel::{
    decay_check, radial_fourier, DecayMode, HankelSpec, RadialFn, Truncation,
};
use rbf_bernstein::kernels::{make_kernel, KernelClass};
use rbf_bernstein::quad::GaussLegendre;
use rbf_bernstein::rbf::sobolev_spline;
use rbf_bernstein::specfun::{bessel_j, BesselOrder};

#[test]
fn transform_is_linear() {
    let spec = HankelSpec::default();
    let g1 = |t: f64| (-t * t).exp();
    let g2 = |t: f64| 1.0 / (1.0 + t * t).powi(2);
    let (a, b) = (2.5, -0.75);
    let mix = |t: f64| a * g1(t) + b * g2(t);
    for dim in [1, 2, 3] {
        for r in [0.3, 1.0, 5.0] {
            let f1 = radial_fourier(&RadialFn::new(&g1), dim, r, &spec).unwrap();
            let f2 = radial_fourier(&RadialFn::new(&g2), dim, r, &spec).unwrap();
            let fm = radial_fourier(&RadialFn::new(&mix), dim, r, &spec).unwrap();
            assert!((fm - (a * f1 + b * f2)).abs() < 1e-11, "d = {dim}, r = {r}");
        }
    }
}

#[test]
fn transforming_twice_returns_the_profile() {
    let spec = HankelSpec::default();
    for (beta, dim) in [(3.0, 1), (4.0, 3)] {
        let p = sobolev_spline(beta, dim).unwrap();
        let space = |r: f64| p.space_eval(r).unwrap();
        for t in [0.5, 1.0, 2.0, 4.0] {
            let back = radial_fourier(&RadialFn::new(&space), dim, t, &spec).unwrap();
            assert!(
                (back - p.phi(t)).abs() < 1e-5,
                "beta = {beta}, d = {dim}, t = {t}: {back} vs {}",
                p.phi(t)
            );
        }
    }
}

fn tail_profile() -> impl Fn(f64) -> f64 {
    let k2 = make_kernel(KernelClass::K2, None).unwrap();
    move |t: f64| (1.0 - k2.kappa(t)) * (1.0 + t * t).powf(-1.5)
}

#[test]
fn decay_slopes_do_not_depend_on_the_cutoff() {
    let f = tail_profile();
    let alphas: Vec<f64> = (1..=64).map(f64::from).collect();
    let base = HankelSpec::default().with_tolerances(1e-9, 1e-9);
    let fit = |t_max: f64| {
        let spec = base.with_truncation(Truncation::Fixed { t_max });
        decay_check(&f, 1, DecayMode::Tail, 2, &alphas, &spec)
            .unwrap()
            .slope
    };
    let (a, b) = (fit(1e4), fit(2e4));
    assert!((a - b).abs() <= 0.05, "{a} vs {b}");
}

#[test]
fn unit_frequency_moment_matches_direct_quadrature() {
    // d = 1: I(1) = sqrt(2/pi) \int_{1/2}^inf f(t) cos t dt
    let f = tail_profile();
    let spec = HankelSpec::default();
    let fit = decay_check(&f, 1, DecayMode::Tail, 2, &[1.0, 2.0, 4.0, 8.0], &spec).unwrap();
    let gl = GaussLegendre::new(24);
    let mut direct = 0.0;
    let mut a = 0.5;
    while a < 4000.0 {
        direct += gl.integrate(|t| f(t) * t.cos(), a, a + 0.25);
        a += 0.25;
    }
    let direct = ((2.0 / PI).sqrt() * direct).abs();
    assert!(
        (fit.points[0].value - direct).abs() < 1e-8,
        "{} vs {direct}",
        fit.points[0].value
    );
}

#[test]
fn large_argument_asymptotics() {
    for two_nu in [0, 2, 3, 4] {
        let order = BesselOrder::from_twice(two_nu).unwrap();
        let nu = order.nu();
        let scaled = |lo: f64, hi: f64| {
            (0..=400)
                .map(|i| lo * (hi / lo).powf(i as f64 / 400.0))
                .map(|r| {
                    let lead = (2.0 / (PI * r)).sqrt() * (r - nu * PI / 2.0 - PI / 4.0).cos();
                    (bessel_j(order, r).unwrap() - lead).abs() * r.powf(1.5)
                })
                .fold(0.0, f64::max)
        };
        let (c1, c2) = (scaled(10.0, 100.0), scaled(100.0, 1000.0));
        assert!(
            c1 > 0.0 && c2 <= 2.0 * c1 && c1 <= 2.0 * c2,
            "nu = {nu}: {c1} vs {c2}"
        );
    }
}
