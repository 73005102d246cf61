//! Coefficient vectors used to probe suprema over network spaces.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::PointSet;
use crate::hankel::{radial_fourier, HankelSpec, RadialFn};
use crate::rbf::{sobolev_spline, Family, RadialProfile};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    pub label: String,
    pub coeffs: Vec<f64>,
}

/// Checkerboard signs on the lattice of spacing `2q` anchored at the domain corner.
pub fn alternating(ps: &PointSet, q: f64) -> Vec<f64> {
    let lo = &ps.domain().lo;
    ps.points()
        .map(|p| {
            let parity: i64 = p
                .iter()
                .zip(lo)
                .map(|(x, a)| ((x - a) / (2.0 * q)).round() as i64)
                .sum();
            if parity.rem_euclid(2) == 0 {
                1.0
            } else {
                -1.0
            }
        })
        .collect()
}

/// Alternating signs under a `sin^6` window that vanishes on the domain boundary.
pub fn tapered_alternating(ps: &PointSet, q: f64) -> Vec<f64> {
    let dom = ps.domain();
    alternating(ps, q)
        .into_iter()
        .zip(ps.points())
        .map(|(s, p)| {
            let w: f64 = p
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    (std::f64::consts::PI * (x - dom.lo[k]) / (dom.hi[k] - dom.lo[k]))
                        .sin()
                        .powi(6)
                })
                .product();
            s * w
        })
        .collect()
}

/// Seed for draw `trial` at sweep level `level`.
pub fn draw_seed(seed: u64, level: usize, trial: usize) -> u64 {
    let mut x = seed ^ 0x9e37_79b9_7f4a_7c15;
    for v in [level as u64, trial as u64] {
        x = x.wrapping_add(v).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        x ^= x >> 31;
    }
    x
}

/// Even trials draw random signs, odd trials standard normal entries.
pub fn random_draw(n: usize, seed: u64, level: usize, trial: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(draw_seed(seed, level, trial));
    if trial % 2 == 0 {
        (0..n)
            .map(|_| if rng.random::<bool>() { 1.0 } else { -1.0 })
            .collect()
    } else {
        (0..n)
            .map(|_| rng.sample::<f64, _>(StandardNormal))
            .collect()
    }
}

/// Gram matrix `<Phi(. - xi_i), Phi(. - xi_j)>` up to a positive factor: the transform of
/// `phi^2`, evaluated in closed form for Sobolev splines and by quadrature otherwise.
pub fn gram_matrix(ps: &PointSet, profile: &RadialProfile) -> Result<DMatrix<f64>> {
    let n = ps.len();
    let closed = match profile.family() {
        Family::Sobolev { beta } => Some(sobolev_spline(2.0 * beta, profile.dim())?),
        _ => None,
    };
    let spec = HankelSpec::default();
    let sq = |t: f64| profile.phi(t).powi(2);
    let kernel = |r: f64| -> Result<f64> {
        match &closed {
            Some(p) => p.space_eval(r),
            None => radial_fourier(&RadialFn::new(&sq), profile.dim(), r, &spec),
        }
    };
    let mut g = DMatrix::from_element(n, n, kernel(0.0)?);
    for i in 0..n {
        for j in (i + 1)..n {
            let v = kernel(ps.dist(i, j))?;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    Ok(g)
}

/// Eigenvector of the smallest Gram eigenvalue, which maximizes `||a||_2 / ||g||_2`.
pub fn gram_min_eigenvector(ps: &PointSet, profile: &RadialProfile) -> Result<Vec<f64>> {
    let eig = SymmetricEigen::new(gram_matrix(ps, profile)?);
    let i = eig.eigenvalues.imin();
    let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
    // fix the sign so the output is reproducible
    let s = v
        .iter()
        .copied()
        .find(|x| x.abs() > 1e-12)
        .map_or(1.0, f64::signum);
    Ok(v.into_iter().map(|x| s * x).collect())
}

/// Deterministic candidates (Gram eigenvector, alternating, tapered alternating) followed
/// by `trials` seeded random draws.
pub fn candidates(
    ps: &PointSet,
    profile: &RadialProfile,
    q: f64,
    trials: usize,
    seed: u64,
    level: usize,
) -> Result<Vec<Candidate>> {
    let mut out = vec![
        Candidate {
            label: "gram-eigenvector".into(),
            coeffs: gram_min_eigenvector(ps, profile)?,
        },
        Candidate {
            label: "alternating".into(),
            coeffs: alternating(ps, q),
        },
        Candidate {
            label: "tapered-alternating".into(),
            coeffs: tapered_alternating(ps, q),
        },
    ];
    for t in 0..trials {
        let kind = if t % 2 == 0 { "signs" } else { "normal" };
        out.push(Candidate {
            label: format!("{kind}-{t}"),
            coeffs: random_draw(ps.len(), seed, level, t),
        });
    }
    out.retain(|c| c.coeffs.iter().any(|v| *v != 0.0));
    Ok(out)
}
