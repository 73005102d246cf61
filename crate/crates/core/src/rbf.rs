//! Radial basis functions described by their radial Fourier profile `phi`.
//!
//! A profile is admissible of order `beta` when `h(t) = phi(t) (1 + t^2)^{beta/2}` is
//! bounded above and below for `t >= 1/2` and the scaled functions
//! `x -> h(sigma x)` have bounded derivatives up to order `l_d = ceil((d + 3) / 2)`
//! for `sigma >= 1`, `x >= 1/2`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{radial_fourier, HankelSpec, RadialFn};
use crate::specfun::{bessel_k, gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    /// `phi(t) = (1 + t^2)^{-beta/2}`.
    Sobolev { beta: f64 },
    /// `phi(t) = c t^{-2m}`, a generalized transform.
    ThinPlate { m: u32, c: f64 },
    /// `phi(t) = exp(-t^2)` with a declared order; never admissible.
    Gaussian { beta: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    family: Family,
    dim: usize,
    /// Multiplies the closed-form space expression so that it equals the transform of `phi`.
    space_const: f64,
}

pub fn l_d(dim: usize) -> usize {
    (dim + 4) / 2
}

/// Sobolev spline of order `beta > dim`. The space-side constant is calibrated against
/// the radial transform of `phi` at `r = 1`.
pub fn sobolev_spline(beta: f64, dim: usize) -> Result<RadialProfile> {
    sobolev_spline_with(beta, dim, &HankelSpec::default())
}

pub fn sobolev_spline_with(beta: f64, dim: usize, spec: &HankelSpec) -> Result<RadialProfile> {
    check_dim(dim)?;
    if !(beta > dim as f64 && beta.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Sobolev order beta = {beta} must exceed d = {dim}"
        )));
    }
    let mut p = RadialProfile {
        family: Family::Sobolev { beta },
        dim,
        space_const: 1.0,
    };
    let phi = |t: f64| p.phi(t);
    let at_one = radial_fourier(&RadialFn::new(&phi), dim, 1.0, spec)?;
    let nu = (beta - dim as f64) / 2.0;
    p.space_const = at_one / bessel_k(nu, 1.0)?;
    Ok(p)
}

/// `2^{1 - beta/2} / Gamma(beta/2)`: the analytic Sobolev spline constant.
pub fn sobolev_constant(beta: f64) -> f64 {
    2f64.powf(1.0 - beta / 2.0) / gamma(beta / 2.0)
}

/// Thin-plate spline of order `m > dim/2`, with unit Fourier constant.
pub fn thin_plate_spline(m: u32, dim: usize) -> Result<RadialProfile> {
    thin_plate_spline_scaled(m, dim, 1.0)
}

pub fn thin_plate_spline_scaled(m: u32, dim: usize, c: f64) -> Result<RadialProfile> {
    check_dim(dim)?;
    if 2 * m as usize <= dim {
        return Err(Error::InvalidArgument(format!(
            "thin-plate order m = {m} must exceed d/2 = {}",
            dim as f64 / 2.0
        )));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidArgument(
            "thin-plate constant must be positive".into(),
        ));
    }
    Ok(RadialProfile {
        family: Family::ThinPlate { m, c },
        dim,
        space_const: 1.0,
    })
}

pub fn gaussian_profile(beta: f64, dim: usize) -> Result<RadialProfile> {
    check_dim(dim)?;
    Ok(RadialProfile {
        family: Family::Gaussian { beta },
        dim,
        space_const: 1.0,
    })
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 0 || dim > 8 {
        return Err(Error::InvalidArgument(format!(
            "dimension {dim} outside 1..=8"
        )));
    }
    Ok(())
}

impl RadialProfile {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn beta(&self) -> f64 {
        match self.family {
            Family::Sobolev { beta } | Family::Gaussian { beta } => beta,
            Family::ThinPlate { m, .. } => 2.0 * m as f64,
        }
    }

    pub fn l_d(&self) -> usize {
        l_d(self.dim)
    }

    /// `true` when `phi` is not integrable at the origin.
    pub fn is_generalized(&self) -> bool {
        matches!(self.family, Family::ThinPlate { .. })
    }

    pub fn space_constant(&self) -> f64 {
        self.space_const
    }

    #[inline]
    pub fn phi(&self, t: f64) -> f64 {
        match self.family {
            Family::Sobolev { beta } => (1.0 + t * t).powf(-beta / 2.0),
            Family::ThinPlate { m, c } => c * t.powi(-2 * m as i32),
            Family::Gaussian { .. } => (-t * t).exp(),
        }
    }

    /// `h(t) = phi(t) (1 + t^2)^{beta/2}`.
    pub fn h(&self, t: f64) -> f64 {
        match self.family {
            Family::Sobolev { .. } => 1.0,
            Family::ThinPlate { m, c } => c * (1.0 + 1.0 / (t * t)).powi(m as i32),
            Family::Gaussian { beta } => (-t * t).exp() * (1.0 + t * t).powf(beta / 2.0),
        }
    }

    /// `phi, phi', ..., phi^{(n)}` at `t`.
    pub fn phi_derivs(&self, n: usize, t: f64) -> Vec<f64> {
        match self.family {
            Family::Sobolev { beta } => power_of_quadratic_derivs(beta / 2.0, n, t),
            Family::ThinPlate { m, c } => {
                let mut out = Vec::with_capacity(n + 1);
                let mut coef = c;
                let mut e = -(2 * m as i32);
                for _ in 0..=n {
                    out.push(coef * t.powi(e));
                    coef *= e as f64;
                    e -= 1;
                }
                out
            }
            Family::Gaussian { .. } => {
                // d^j/dt^j e^{-t^2} = (-1)^j H_j(t) e^{-t^2}
                let g = (-t * t).exp();
                let mut herm = vec![1.0, 2.0 * t];
                for j in 1..n {
                    herm.push(2.0 * t * herm[j] - 2.0 * j as f64 * herm[j - 1]);
                }
                let out: Vec<f64> = (0..=n)
                    .map(|j| if j % 2 == 0 { herm[j] } else { -herm[j] } * g)
                    .collect();
                out
            }
        }
    }

    /// Derivatives of `h` up to order `n` at `t`, via Leibniz on `phi (1 + t^2)^{beta/2}`.
    pub fn h_derivs(&self, n: usize, t: f64) -> Vec<f64> {
        if let Family::Sobolev { .. } = self.family {
            let mut v = vec![0.0; n + 1];
            v[0] = 1.0;
            return v;
        }
        let p = self.phi_derivs(n, t);
        let w = power_of_quadratic_derivs(-self.beta() / 2.0, n, t);
        (0..=n)
            .map(|k| {
                let mut binom = 1.0;
                let mut s = 0.0;
                for j in 0..=k {
                    s += binom * p[j] * w[k - j];
                    binom = binom * (k - j) as f64 / (j + 1) as f64;
                }
                s
            })
            .collect()
    }

    /// The radial function `Phi(r)` in space, when a closed form is known.
    pub fn space_eval(&self, r: f64) -> Result<f64> {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "radius must be finite and >= 0, got {r}"
            )));
        }
        match self.family {
            Family::Sobolev { beta } => {
                let nu = (beta - self.dim as f64) / 2.0;
                if r == 0.0 {
                    return Ok(self.space_const * 2f64.powf(nu - 1.0) * gamma(nu));
                }
                if r > 700.0 {
                    return Ok(0.0);
                }
                Ok(self.space_const * r.powf(nu) * bessel_k(nu, r)?)
            }
            Family::ThinPlate { m, .. } => {
                let e = 2 * m as i32 - self.dim as i32;
                if self.dim % 2 == 1 {
                    Ok(r.powi(e))
                } else if r == 0.0 {
                    Ok(0.0)
                } else {
                    Ok(r.powi(e) * r.ln())
                }
            }
            Family::Gaussian { .. } => {
                // transform of exp(-t^2) is 2^{-d/2} exp(-r^2/4)
                Ok(2f64.powf(-(self.dim as f64) / 2.0) * (-r * r / 4.0).exp())
            }
        }
    }
}

/// Derivatives of `(1 + t^2)^{-a}` up to order `n`, from
/// `(1 + t^2) u^{(k+1)} = -(2a + 2k) t u^{(k)} - (k(k-1) + 2ak) u^{(k-1)}`.
fn power_of_quadratic_derivs(a: f64, n: usize, t: f64) -> Vec<f64> {
    let q = 1.0 + t * t;
    let mut u = Vec::with_capacity(n + 1);
    u.push(q.powf(-a));
    for k in 0..n {
        let kf = k as f64;
        let prev = if k >= 1 { u[k - 1] } else { 0.0 };
        let next = (-(2.0 * a + 2.0 * kf) * t * u[k] - (kf * (kf - 1.0) + 2.0 * a * kf) * prev) / q;
        u.push(next);
    }
    u
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DerivativeMode {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdmissibilityReport {
    pub c1: f64,
    pub c2: f64,
    pub l_d: usize,
    pub max_deriv_bound: f64,
    pub derivatives: DerivativeMode,
    pub pass: bool,
}

/// Default sampling grids: `sigma = 2^0 .. 2^10` and `x` log-spaced on `[1/2, 64]`.
pub fn default_grids() -> (Vec<f64>, Vec<f64>) {
    let sigmas = (0..=10).map(|j| 2f64.powi(j)).collect();
    let xs = (0..=56).map(|i| 0.5 * 2f64.powf(i as f64 / 8.0)).collect();
    (sigmas, xs)
}

pub fn admissibility_check(
    profile: &RadialProfile,
    sigma_grid: &[f64],
    x_grid: &[f64],
) -> Result<AdmissibilityReport> {
    admissibility_check_with(profile, sigma_grid, x_grid, DerivativeMode::Analytic)
}

/// Samples `h(sigma x)` and the derivatives `sigma^l h^{(l)}(sigma x)`, `l = 1..l_d`.
pub fn admissibility_check_with(
    profile: &RadialProfile,
    sigma_grid: &[f64],
    x_grid: &[f64],
    mode: DerivativeMode,
) -> Result<AdmissibilityReport> {
    if sigma_grid.is_empty() || x_grid.is_empty() {
        return Err(Error::InvalidArgument(
            "admissibility grids must be non-empty".into(),
        ));
    }
    if sigma_grid.iter().any(|s| !(*s >= 1.0 && s.is_finite())) {
        return Err(Error::InvalidArgument(
            "sigma grid must lie in [1, inf)".into(),
        ));
    }
    if x_grid.iter().any(|x| !(*x >= 0.5 && x.is_finite())) {
        return Err(Error::InvalidArgument(
            "x grid must lie in [1/2, inf)".into(),
        ));
    }
    let ld = profile.l_d();
    let mut c1 = f64::INFINITY;
    let mut c2: f64 = 0.0;
    let mut dmax: f64 = 0.0;
    for &s in sigma_grid {
        for &x in x_grid {
            let t = s * x;
            let hv = profile.h(t);
            if hv.is_nan() {
                return Err(Error::NotANumber(t));
            }
            c1 = c1.min(hv);
            c2 = c2.max(hv);
            let derivs = match mode {
                DerivativeMode::Analytic => profile.h_derivs(ld, t),
                DerivativeMode::FiniteDifference => fd_derivs(|u| profile.h(u), ld, t)?,
            };
            for (l, dv) in derivs.iter().enumerate().skip(1) {
                let scaled = s.powi(l as i32) * dv;
                if scaled.is_nan() {
                    return Err(Error::NotANumber(t));
                }
                dmax = dmax.max(scaled.abs());
            }
        }
    }
    let pass = c1 > 0.0 && c2.is_finite() && dmax.is_finite();
    Ok(AdmissibilityReport {
        c1,
        c2,
        l_d: ld,
        max_deriv_bound: dmax,
        derivatives: mode,
        pass,
    })
}

/// Five-point central differences with step `1e-3 t`, orders up to 4.
pub fn fd_derivs(f: impl Fn(f64) -> f64, n: usize, t: f64) -> Result<Vec<f64>> {
    if n > 4 {
        return Err(Error::UnsupportedOrder(format!(
            "finite differences implemented to order 4, asked for {n}"
        )));
    }
    let h = 1e-3 * t.abs().max(1e-3);
    let d1 = |g: &dyn Fn(f64) -> f64, x: f64| {
        (g(x - 2.0 * h) - 8.0 * g(x - h) + 8.0 * g(x + h) - g(x + 2.0 * h)) / (12.0 * h)
    };
    let mut out = vec![f(t)];
    if n >= 1 {
        out.push(d1(&f, t));
    }
    if n >= 2 {
        out.push(
            (-f(t - 2.0 * h) + 16.0 * f(t - h) - 30.0 * f(t) + 16.0 * f(t + h) - f(t + 2.0 * h))
                / (12.0 * h * h),
        );
    }
    if n >= 3 {
        out.push(
            (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) - f(t - 2.0 * h)) / (2.0 * h.powi(3)),
        );
    }
    if n >= 4 {
        out.push(
            (f(t - 2.0 * h) - 4.0 * f(t - h) + 6.0 * f(t) - 4.0 * f(t + h) + f(t + 2.0 * h))
                / h.powi(4),
        );
    }
    Ok(out)
}
