//! Convolved RBF values `K_sigma * Phi`, the matrix `A_sigma`, diagonal dominance,
//! inverse-norm bounds, the sampling inequality and the stability ratio.
//!
//! Convolution is normalized so that `(f * g)^ = f^ g^`; hence `K_sigma * Phi` is the
//! inverse transform of `kappa(t / sigma) phi(t)` and acts on grids as the multiplier
//! `kappa(|omega| / sigma)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coeffs::candidates;
use crate::error::{Error, Result};
use crate::geometry::PointSet;
use crate::hankel::{radial_fourier, HankelSpec};
use crate::kernels::{KernelClass, KernelProfile};
use crate::network::{coeff_norm, AdaptiveSampler, GridField, GridRule};
use crate::rbf::RadialProfile;

fn require_k1(kp: &KernelProfile) -> Result<()> {
    if kp.class() != KernelClass::K1 {
        return Err(Error::Precondition(
            "this operation needs a K1 (annulus) kernel".into(),
        ));
    }
    Ok(())
}

/// `K_sigma * Phi` at radius `r`, for a `K1` kernel given at unit scale.
pub fn convolved_rbf(
    profile: &RadialProfile,
    kp: &KernelProfile,
    sigma: f64,
    r: f64,
    spec: &HankelSpec,
) -> Result<f64> {
    require_k1(kp)?;
    let ks = kp.scaled(sigma)?;
    let g = |t: f64| ks.kappa(t) * profile.phi(t);
    radial_fourier(&ks.window(&g), profile.dim(), r, spec)
}

#[derive(Debug, Clone)]
pub struct InterpolationMatrix {
    pub entries: DMatrix<f64>,
    pub sigma: f64,
    pub diag: f64,
    pub offdiag_colsum_max: f64,
}

impl InterpolationMatrix {
    /// `||D^{-1} F||_1`.
    pub fn dominance_ratio(&self) -> f64 {
        self.offdiag_colsum_max / self.diag.abs()
    }

    pub fn len(&self) -> usize {
        self.entries.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.nrows() == 0
    }
}

/// `(A_sigma)_{ij} = K_sigma * Phi(xi_i - xi_j)`, with one quadrature per distance bucket
/// of width `1e-12 diam`.
pub fn assemble_matrix(
    ps: &PointSet,
    profile: &RadialProfile,
    kp: &KernelProfile,
    sigma: f64,
    spec: &HankelSpec,
) -> Result<InterpolationMatrix> {
    require_k1(kp)?;
    if ps.dim() != profile.dim() {
        return Err(Error::InvalidArgument(
            "point set and profile dimensions differ".into(),
        ));
    }
    let n = ps.len();
    let bucket = 1e-12 * ps.domain().diameter().max(1e-300);
    let mut groups: BTreeMap<u64, f64> = BTreeMap::new();
    let mut keys = vec![0u64; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let r = ps.dist(i, j);
            let key = (r / bucket).round() as u64;
            let e = groups.entry(key).or_insert(r);
            *e = e.min(r);
            keys[i * n + j] = key;
        }
    }
    let reps: Vec<(u64, f64)> = groups.into_iter().collect();
    let values: Vec<f64> = reps
        .par_iter()
        .map(|(_, r)| convolved_rbf(profile, kp, sigma, *r, spec))
        .collect::<Result<Vec<_>>>()?;
    let lookup: BTreeMap<u64, f64> = reps.iter().map(|(k, _)| *k).zip(values).collect();
    let diag = convolved_rbf(profile, kp, sigma, 0.0, spec)?;
    let mut a = DMatrix::from_element(n, n, diag);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = lookup[&keys[i * n + j]];
            a[(i, j)] = v;
            a[(j, i)] = v;
        }
    }
    let offdiag_colsum_max = (0..n)
        .map(|j| {
            (0..n)
                .filter(|i| *i != j)
                .map(|i| a[(i, j)].abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    Ok(InterpolationMatrix {
        entries: a,
        sigma,
        diag,
        offdiag_colsum_max,
    })
}

#[derive(Debug, Clone)]
pub struct Sigma0 {
    pub sigma0: f64,
    /// Dyadic exponent: `sigma0 = 2^j / q`.
    pub j: u32,
    /// `sigma0 q`.
    pub m_hat: f64,
    pub matrix: InterpolationMatrix,
}

/// First `sigma = 2^j / q` (with `sigma >= 1`) where `||D^{-1} F||_1 <= 1/2`.
pub fn find_sigma0(
    ps: &PointSet,
    profile: &RadialProfile,
    kp: &KernelProfile,
    spec: &HankelSpec,
) -> Result<Sigma0> {
    let q = ps.separation_radius()?;
    let mut last = (f64::NAN, f64::NAN);
    for j in 0..=20u32 {
        let sigma = 2f64.powi(j as i32) / q;
        if sigma < 1.0 {
            continue;
        }
        let m = assemble_matrix(ps, profile, kp, sigma, spec)?;
        let ratio = m.dominance_ratio();
        if ratio <= 0.5 {
            return Ok(Sigma0 {
                sigma0: sigma,
                j,
                m_hat: sigma * q,
                matrix: m,
            });
        }
        last = (ratio, sigma);
    }
    Err(Error::DominanceNotReached {
        steps: 20,
        last_ratio: last.0,
        sigma: last.1,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseNormReport {
    pub dominance_ratio: f64,
    /// `||D^{-1}||_1 (1 - ||D^{-1} F||_1)^{-1}`.
    pub inv_norm_bound: f64,
    /// `||A^{-1}||_1`.
    pub inv_norm_actual: f64,
    pub inv_norm_2: f64,
    pub inv_norm_inf: f64,
    /// `actual <= bound` up to one part in 1e12.
    pub holds: bool,
    pub strict: bool,
}

/// Splits `A = D + F` (diagonal plus off-diagonal) and compares the bound with `||A^{-1}||_1`.
pub fn inverse_norm_check(a: &DMatrix<f64>) -> Result<InverseNormReport> {
    let n = a.nrows();
    if n == 0 || a.ncols() != n {
        return Err(Error::InvalidArgument(
            "need a non-empty square matrix".into(),
        ));
    }
    if (0..n).any(|i| a[(i, i)] == 0.0) {
        return Err(Error::Precondition("zero on the diagonal".into()));
    }
    let ratio = (0..n)
        .map(|j| {
            (0..n)
                .filter(|i| *i != j)
                .map(|i| (a[(i, j)] / a[(i, i)]).abs())
                .sum::<f64>()
        })
        .fold(0.0, f64::max);
    if !(ratio < 1.0) {
        return Err(Error::Precondition(format!(
            "not diagonally dominant: ||D^-1 F||_1 = {ratio}"
        )));
    }
    let dinv = (0..n).map(|i| 1.0 / a[(i, i)].abs()).fold(0.0, f64::max);
    let bound = dinv / (1.0 - ratio);
    let inv = a.clone().lu().try_inverse().ok_or(Error::Singular)?;
    if inv.iter().any(|v| !v.is_finite()) {
        return Err(Error::Singular);
    }
    let actual = matrix_norm_1(&inv);
    let inf = matrix_norm_1(&inv.transpose());
    let two = inv.clone().svd(false, false).singular_values.max();
    Ok(InverseNormReport {
        dominance_ratio: ratio,
        inv_norm_bound: bound,
        inv_norm_actual: actual,
        inv_norm_2: two,
        inv_norm_inf: inf,
        holds: actual <= bound * (1.0 + 1e-12),
        strict: actual < bound,
    })
}

/// Maximum absolute column sum.
pub fn matrix_norm_1(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    /// `max ||a||_p / ||g||_p` over the candidates.
    pub ratio: f64,
    pub best: String,
    pub candidates: usize,
}

/// Lower estimate of `sup ||a||_p / ||g||_p` over alternating and random coefficient
/// vectors, with `||g||_p` from a grid of spacing `q / rule.divisor`.
pub fn stability_ratio_estimate(
    ps: &PointSet,
    profile: &RadialProfile,
    p: f64,
    trials: usize,
    seed: u64,
    level: usize,
    rule: &GridRule,
) -> Result<RatioEstimate> {
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let q = ps.separation_radius()?;
    let mut sampler = AdaptiveSampler::new(ps, profile, rule.spacing(q), rule)?;
    ratio_over(
        &mut sampler,
        &candidates(ps, profile, q, trials, seed, level)?,
        p,
    )
}

pub(crate) fn ratio_over(
    sampler: &mut AdaptiveSampler,
    cands: &[crate::coeffs::Candidate],
    p: f64,
) -> Result<RatioEstimate> {
    let mut best = (0.0, String::new());
    for c in cands {
        let g = sampler.field(&c.coeffs)?;
        let r = coeff_norm(&c.coeffs, p) / g.lp_norm(p);
        if r > best.0 {
            best = (r, c.label.clone());
        }
    }
    Ok(RatioEstimate {
        ratio: best.0,
        best: best.1,
        candidates: cands.len(),
    })
}

/// `(K_sigma * f)` on the grid of `f`, via the multiplier `kappa(|omega| / sigma)`.
pub fn convolve_on_grid(kp: &KernelProfile, sigma: f64, f: &GridField) -> Result<GridField> {
    let ks = kp.at_scale(sigma)?;
    let top = ks.support().1;
    if top > f.nyquist() {
        return Err(Error::RefineGrid {
            freq: top,
            nyquist: f.nyquist(),
        });
    }
    f.apply_multiplier(|w| ks.kappa(w))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MzReport {
    /// `||(K_sigma0 * f)|_Y||_p`.
    pub discrete_norm: f64,
    /// `||f||_p` on the grid.
    pub field_norm: f64,
    /// `C q^{-d/p} ||f||_p`.
    pub bound_rhs: f64,
    pub c_hat: f64,
    pub ok: bool,
}

/// Samples `K_sigma0 * f` at the points of `ps` and compares with `c_hat q^{-d/p} ||f||_p`.
pub fn mz_check(
    kp: &KernelProfile,
    ps: &PointSet,
    f: &GridField,
    p: f64,
    sigma0: f64,
    c_hat: f64,
) -> Result<MzReport> {
    require_k1(kp)?;
    let (discrete_norm, field_norm) = mz_sides(kp, ps, f, p, sigma0)?;
    let q = ps.separation_radius()?;
    let d = ps.dim() as f64;
    let bound_rhs = c_hat * q_power(q, d, p) * field_norm;
    Ok(MzReport {
        discrete_norm,
        field_norm,
        bound_rhs,
        c_hat,
        ok: discrete_norm <= bound_rhs,
    })
}

/// `||(K_sigma0 * f)|_Y||_p / (q^{-d/p} ||f||_p)` on one instance, used to fit `c_hat`.
pub fn mz_constant(
    kp: &KernelProfile,
    ps: &PointSet,
    f: &GridField,
    p: f64,
    sigma0: f64,
) -> Result<f64> {
    let (dn, fnorm) = mz_sides(kp, ps, f, p, sigma0)?;
    let q = ps.separation_radius()?;
    if fnorm == 0.0 {
        return Ok(0.0);
    }
    Ok(dn / (q_power(q, ps.dim() as f64, p) * fnorm))
}

fn q_power(q: f64, d: f64, p: f64) -> f64 {
    if p.is_infinite() {
        1.0
    } else {
        q.powf(-d / p)
    }
}

fn mz_sides(
    kp: &KernelProfile,
    ps: &PointSet,
    f: &GridField,
    p: f64,
    sigma0: f64,
) -> Result<(f64, f64)> {
    if ps.dim() != f.dim() {
        return Err(Error::InvalidArgument(
            "point set and field dimensions differ".into(),
        ));
    }
    f.check_decay(crate::network::TAIL_TOL)?;
    let conv = convolve_on_grid(kp, sigma0, f)?;
    let pts: Vec<Vec<f64>> = ps.points().map(|x| x.to_vec()).collect();
    let samples = conv.spectral_eval(&pts)?;
    Ok((coeff_norm(&samples, p), f.lp_norm(p)))
}

/// Solves `A_sigma0 x = (K_sigma0 * g)|_Y` with the right side computed on the grid.
pub fn recover_coefficients(
    matrix: &InterpolationMatrix,
    kp: &KernelProfile,
    ps: &PointSet,
    g: &GridField,
) -> Result<Vec<f64>> {
    let conv = convolve_on_grid(kp, matrix.sigma, g)?;
    let pts: Vec<Vec<f64>> = ps.points().map(|x| x.to_vec()).collect();
    let rhs = nalgebra::DVector::from_vec(conv.spectral_eval(&pts)?);
    let x = matrix
        .entries
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::Singular)?;
    Ok(x.iter().copied().collect())
}
