//! Band-limited approximation `g * K_sigma1` with `sigma1 = 1/q`, the error kernel
//! `E_{Phi,K,k}` and the Bernstein-type ratios built on them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{radial_fourier, HankelSpec};
use crate::kernels::{KernelClass, KernelProfile};
use crate::network::{coeff_norm, sobolev_norm, GridField, NormSpec, TAIL_TOL};
use crate::quad::{fit_loglog, LinearFit};
use crate::rbf::RadialProfile;

fn require_k2(kp: &KernelProfile) -> Result<()> {
    if kp.class() != KernelClass::K2 {
        return Err(Error::Precondition(
            "band limiting needs a K2 (low-pass) kernel".into(),
        ));
    }
    Ok(())
}

fn require_smoothness(profile: &RadialProfile, k: f64) -> Result<()> {
    if profile.is_generalized() {
        return Err(Error::Precondition(
            "generalized profiles have no classical band-limited approximant".into(),
        ));
    }
    let limit = profile.beta() - profile.dim() as f64;
    if !(k >= 0.0 && k < limit) {
        return Err(Error::Precondition(format!(
            "need 0 <= k < beta - d = {limit}, got k = {k}"
        )));
    }
    Ok(())
}

/// `kappa(. / sigma1)` for a `K2` kernel, checked against the grid's Nyquist frequency.
fn low_pass(kp: &KernelProfile, sigma1: f64, field: &GridField) -> Result<KernelProfile> {
    require_k2(kp)?;
    let ks = kp.at_scale(sigma1)?;
    let top = ks.support().1;
    if top > field.nyquist() {
        return Err(Error::RefineGrid {
            freq: top,
            nyquist: field.nyquist(),
        });
    }
    Ok(ks)
}

/// `g * K_sigma1`, i.e. the multiplier `kappa(|omega| / sigma1)`.
pub fn bandlimit_field(field: &GridField, kp: &KernelProfile, sigma1: f64) -> Result<GridField> {
    let ks = low_pass(kp, sigma1, field)?;
    field.check_decay(TAIL_TOL)?;
    field.apply_multiplier(|w| ks.kappa(w))
}

/// `||g - g * K_sigma1||_{k,p}`, computed with the single multiplier
/// `(1 - kappa(|omega| / sigma1)) (1 + |omega|^2)^{k/2}`.
pub fn approximation_error(
    field: &GridField,
    kp: &KernelProfile,
    sigma1: f64,
    spec: NormSpec,
) -> Result<f64> {
    let ks = low_pass(kp, sigma1, field)?;
    field.check_decay(TAIL_TOL)?;
    let k = spec.k;
    Ok(field
        .apply_multiplier(|w| (1.0 - ks.kappa(w)) * (1.0 + w * w).powf(k / 2.0))?
        .lp_norm(spec.p))
}

/// `E_{Phi,K,k}(r)`: modulus of the inverse transform of
/// `(1 - kappa(t / sigma1)) phi(t) (1 + t^2)^{k/2}`.
pub fn error_kernel(
    profile: &RadialProfile,
    kp: &KernelProfile,
    sigma1: f64,
    k: f64,
    r: f64,
    spec: &HankelSpec,
) -> Result<f64> {
    require_k2(kp)?;
    require_smoothness(profile, k)?;
    let ks = kp.at_scale(sigma1)?;
    let g = |t: f64| (1.0 - ks.kappa(t)) * profile.phi(t) * (1.0 + t * t).powf(k / 2.0);
    Ok(radial_fourier(&ks.complement_window(&g, sigma1), profile.dim(), r, spec)?.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlCheck {
    /// `||f||_{m,p} / (sigma1 ||f||_{m-1,p})` for `m = 1..=k`, with `f = g * K_sigma1`.
    pub step_ratios: Vec<f64>,
    pub max_step: f64,
    /// `||g * K_sigma1||_{k,p} q^k / ||g||_p`.
    pub corollary_ratio: f64,
}

/// Norm chain of the band-limited approximant for the integer orders `0..=floor(k)`,
/// and the corollary ratio at the (possibly fractional) order `k`.
pub fn bl_bernstein_check(
    g: &GridField,
    kp: &KernelProfile,
    q: f64,
    k: f64,
    p: f64,
) -> Result<BlCheck> {
    if !(k >= 0.0 && k.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "order k = {k} must be non-negative"
        )));
    }
    let sigma1 = 1.0 / q;
    let f = bandlimit_field(g, kp, sigma1)?;
    let top = k.floor() as usize;
    let norms: Vec<f64> = (0..=top)
        .map(|m| sobolev_norm_unchecked(&f, m as f64, p))
        .collect();
    let step_ratios: Vec<f64> = norms.windows(2).map(|w| w[1] / (sigma1 * w[0])).collect();
    let max_step = step_ratios.iter().copied().fold(0.0, f64::max);
    let at_k = if k == top as f64 {
        norms[top]
    } else {
        sobolev_norm_unchecked(&f, k, p)
    };
    let corollary_ratio = at_k * q.powf(k) / g.lp_norm(p);
    Ok(BlCheck {
        step_ratios,
        max_step,
        corollary_ratio,
    })
}

/// The band-limited field is evaluated on the parent grid, whose decay has been checked.
fn sobolev_norm_unchecked(f: &GridField, k: f64, p: f64) -> f64 {
    if k == 0.0 {
        return f.lp_norm(p);
    }
    match f.apply_multiplier(|w| (1.0 + w * w).powf(k / 2.0)) {
        Ok(g) => g.lp_norm(p),
        Err(_) => f64::NAN,
    }
}

/// `||g||_{k,p} q^k / ||g||_p`.
pub fn bernstein_ratio(g: &GridField, q: f64, k: f64, p: f64) -> Result<f64> {
    let top = sobolev_norm(g, NormSpec::new(k, p)?)?;
    let base = sobolev_norm(g, NormSpec::new(0.0, p)?)?;
    Ok(top * q.powf(k) / base)
}

/// `||g - g * K_sigma1||_{k,p} / ||a||_p`.
pub fn approx_ratio(
    g: &GridField,
    coeffs: &[f64],
    kp: &KernelProfile,
    q: f64,
    spec: NormSpec,
) -> Result<f64> {
    Ok(approximation_error(g, kp, 1.0 / q, spec)? / coeff_norm(coeffs, spec.p))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub fit: LinearFit,
    pub target: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Fits `log value` against `log q` over at least three levels; the contract is
/// `slope >= target - tolerance`.
pub fn rate_fit(qs: &[f64], values: &[f64], target: f64, tolerance: f64) -> Result<RateFit> {
    if qs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: qs.len(),
        });
    }
    let fit = fit_loglog(qs, values)?;
    Ok(RateFit {
        holds: fit.slope >= target - tolerance,
        fit,
        target,
        tolerance,
    })
}

/// Slope of the worst-case approximation ratio over a family of levels, each given as
/// `(q, [(g, a)])`. Target exponent `beta - k - d/p'`.
pub fn approx_rate_sweep(
    levels: &[(f64, Vec<(GridField, Vec<f64>)>)],
    profile: &RadialProfile,
    kp: &KernelProfile,
    spec: NormSpec,
) -> Result<RateFit> {
    require_smoothness(profile, spec.k)?;
    if levels.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: levels.len(),
        });
    }
    let mut qs = Vec::new();
    let mut worst = Vec::new();
    for (q, instances) in levels {
        let mut m: f64 = 0.0;
        for (g, a) in instances {
            m = m.max(approx_ratio(g, a, kp, *q, spec)?);
        }
        qs.push(*q);
        worst.push(m);
    }
    let d = profile.dim() as f64;
    let target = profile.beta() - spec.k - d / spec.conjugate();
    rate_fit(&qs, &worst, target, 0.3)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::make_kernel;
    use crate::rbf::{sobolev_spline, thin_plate_spline};
    use std::f64::consts::PI;

    fn gaussian(n: usize, h: f64, width: f64) -> GridField {
        let x0 = -(n as f64) * h / 2.0;
        GridField::from_fn(vec![x0], h, vec![n], |x| {
            (-x[0] * x[0] / (2.0 * width * width)).exp()
        })
        .unwrap()
    }

    #[test]
    fn passes_low_band_and_kills_high_band() {
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        // spectrum of exp(-x^2/2) is negligible beyond |omega| = 8
        let g = gaussian(512, 0.05, 1.0);
        let out = bandlimit_field(&g, &k2, 20.0).unwrap();
        for (a, b) in g.values().iter().zip(out.values()) {
            assert!((a - b).abs() < 1e-10);
        }
        let narrow = gaussian(512, 0.05, 0.1);
        let out = bandlimit_field(&narrow, &k2, 10.0).unwrap();
        let (spec, w) = out.spectrum();
        let peak = spec.iter().map(|c| c.norm()).fold(0.0, f64::max);
        for (c, w) in spec.iter().zip(&w) {
            if *w >= 10.0 {
                assert!(c.norm() < 1e-13 * peak);
            }
        }
        assert!(matches!(
            bandlimit_field(&g, &k2, 100.0),
            Err(Error::RefineGrid { .. })
        ));
        let k1 = make_kernel(KernelClass::K1, None).unwrap();
        assert!(bandlimit_field(&g, &k1, 4.0).is_err());
    }

    #[test]
    fn single_mode_step_ratio() {
        // a windowed cosine is not decayed, so check the multiplier arithmetic directly
        let n = 256;
        let h = 2.0 * PI / n as f64 / 0.25;
        let w0 = 3.0;
        let f = GridField::from_fn(vec![0.0], h, vec![n], |x| (w0 * x[0]).cos()).unwrap();
        let a = sobolev_norm_unchecked(&f, 1.0, 2.0);
        let b = sobolev_norm_unchecked(&f, 0.0, 2.0);
        let sigma1 = 5.0;
        assert!((a / (sigma1 * b) - (1.0 + w0 * w0).sqrt() / sigma1).abs() < 1e-12);
    }

    #[test]
    fn k_zero_ratio_is_one() {
        let g = gaussian(256, 0.1, 1.0);
        assert_eq!(bernstein_ratio(&g, 0.3, 0.0, 2.0).unwrap(), 1.0);
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        let c = bl_bernstein_check(&g, &k2, 0.5, 0.0, 2.0).unwrap();
        assert!(c.step_ratios.is_empty());
        assert!(c.corollary_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn error_kernel_preconditions() {
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        let spec = HankelSpec::default();
        let p = sobolev_spline(3.0, 1).unwrap();
        assert!(error_kernel(&p, &k2, 4.0, 2.0, 0.0, &spec).is_err());
        assert!(error_kernel(&p, &k2, 4.0, 1.0, 0.0, &spec).unwrap() > 0.0);
        let tp = thin_plate_spline(2, 1).unwrap();
        assert!(error_kernel(&tp, &k2, 4.0, 0.0, 0.0, &spec).is_err());
    }

    #[test]
    fn error_kernel_origin_scaling() {
        // E(0) sigma1^{beta-d-k} bounded across doublings
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        let spec = HankelSpec::default();
        let p = sobolev_spline(3.0, 1).unwrap();
        let v: Vec<f64> = [4.0, 8.0, 16.0, 32.0]
            .iter()
            .map(|s: &f64| error_kernel(&p, &k2, *s, 1.0, 0.0, &spec).unwrap() * s.powf(1.0))
            .collect();
        let (lo, hi) = (
            v.iter().copied().fold(f64::MAX, f64::min),
            v.iter().copied().fold(0.0, f64::max),
        );
        assert!(hi / lo < 1.5, "{v:?}");
    }

    #[test]
    fn sweep_needs_three_levels() {
        let p = sobolev_spline(3.0, 1).unwrap();
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        let g = gaussian(64, 0.1, 1.0);
        let lv = vec![(0.1, vec![(g, vec![1.0])])];
        assert!(matches!(
            approx_rate_sweep(&lv, &p, &k2, NormSpec::new(1.0, 2.0).unwrap()),
            Err(Error::TooFewPoints { .. })
        ));
    }
}
