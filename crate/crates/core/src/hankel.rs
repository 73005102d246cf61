//! Radial Fourier transforms in R^d as one-dimensional Bessel integrals.
//!
//! Convention: `f^(w) = (2 pi)^{-d/2} \int f(x) e^{-i w.x} dx`. For a radial profile
//! `g(|w|)` the transform at radius `r > 0` is
//!
//! ```text
//! F(r) = r^{-(d-2)/2} \int_0^\infty g(t) t^{d/2} J_{(d-2)/2}(r t) dt
//! ```
//!
//! and at the origin `F(0) = c_d \int_0^\infty g(t) t^{d-1} dt` with
//! `c_d = 2^{1-d/2} / Gamma(d/2)`.
//!
//! Integrals are split into Gauss–Legendre panels no wider than a fraction of the
//! oscillation period and of the local feature length `max(scale, t)`. Infinite tails
//! are summed in half-period blocks; the partial sums are accelerated with Wynn's
//! epsilon algorithm and the run stops when the accelerated value settles or the
//! amplitude envelope `|g(t)| t^{d/2} sqrt(2 / (pi r t))` drops below `abs_tol / 10`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{fit_loglog, wynn_epsilon, GaussLegendre};
use crate::specfun::{gamma, j_unchecked, BesselOrder};

/// How the upper end of an infinite integral is handled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Truncation {
    /// Integrate to `t_max`; fail if the envelope estimate of the remainder is too large.
    Fixed { t_max: f64 },
    /// Sum blocks until convergence; fail beyond `t_cap`.
    Auto { t_cap: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HankelSpec {
    pub gauss_order: usize,
    /// Panel width as a fraction of the period `2 pi / r`.
    pub panel_width: f64,
    /// Panels are at most `max(scale, t) / feature_div` wide.
    pub feature_div: f64,
    pub truncation: Truncation,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_blocks: usize,
}

impl Default for HankelSpec {
    fn default() -> Self {
        HankelSpec {
            gauss_order: 16,
            panel_width: 0.25,
            feature_div: 8.0,
            truncation: Truncation::Auto { t_cap: 1e9 },
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            max_blocks: 200_000,
        }
    }
}

impl HankelSpec {
    /// Looser tolerances for quick exploratory runs.
    pub fn fast() -> Self {
        HankelSpec {
            panel_width: 0.5,
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            ..Self::default()
        }
    }

    pub fn with_tolerances(mut self, abs_tol: f64, rel_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self.rel_tol = rel_tol;
        self
    }

    pub fn with_truncation(mut self, truncation: Truncation) -> Self {
        self.truncation = truncation;
        self
    }

    /// Same spec with every panel split in two.
    pub fn halved(mut self) -> Self {
        self.panel_width *= 0.5;
        self.feature_div *= 2.0;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidArgument(format!("hankel spec: {m}")));
        if self.gauss_order < 2 || self.gauss_order > 128 {
            return bad("gauss_order must lie in [2, 128]");
        }
        if !(self.panel_width > 0.0 && self.panel_width <= 0.5) {
            return bad("panel_width must lie in (0, 0.5] of a period");
        }
        if !(self.feature_div >= 1.0) {
            return bad("feature_div must be at least 1");
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        match self.truncation {
            Truncation::Fixed { t_max } if !(t_max > 0.0 && t_max.is_finite()) => {
                bad("t_max must be positive and finite")
            }
            Truncation::Auto { t_cap } if !(t_cap > 0.0) => bad("t_cap must be positive"),
            _ => Ok(()),
        }
    }
}

/// A one-dimensional profile on `[lo, hi]` (or `[lo, inf)`), with interior points where
/// it is not smooth and a length scale for panel sizing near the origin.
pub struct RadialFn<'a> {
    f: &'a dyn Fn(f64) -> f64,
    lo: f64,
    hi: Option<f64>,
    breaks: Vec<f64>,
    scale: f64,
}

impl<'a> RadialFn<'a> {
    pub fn new(f: &'a dyn Fn(f64) -> f64) -> Self {
        RadialFn {
            f,
            lo: 0.0,
            hi: None,
            breaks: Vec::new(),
            scale: 1.0,
        }
    }

    pub fn support(mut self, lo: f64, hi: Option<f64>) -> Self {
        self.lo = lo;
        self.hi = hi;
        self
    }

    pub fn breaks(mut self, breaks: &[f64]) -> Self {
        self.breaks = breaks.to_vec();
        self
    }

    pub fn scale(mut self, scale: f64) -> Self {
        self.scale = scale;
        self
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> Option<f64> {
        self.hi
    }

    fn check(&self) -> Result<()> {
        if !(self.lo >= 0.0 && self.lo.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "support must start at t >= 0, got {}",
                self.lo
            )));
        }
        if let Some(hi) = self.hi {
            if !(hi > self.lo && hi.is_finite()) {
                return Err(Error::InvalidArgument(format!(
                    "empty support [{}, {hi}]",
                    self.lo
                )));
            }
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "scale must be positive, got {}",
                self.scale
            )));
        }
        Ok(())
    }

    /// Knots from `lo` through the interior breaks; the last knot starts the tail
    /// when there is no upper limit.
    fn knots(&self) -> Vec<f64> {
        let end = self.hi.unwrap_or(f64::INFINITY);
        let mut k: Vec<f64> = self
            .breaks
            .iter()
            .copied()
            .filter(|b| *b > self.lo && *b < end && b.is_finite())
            .collect();
        k.sort_by(|a, b| a.total_cmp(b));
        k.dedup();
        k.insert(0, self.lo);
        if let Some(hi) = self.hi {
            k.push(hi);
        }
        k
    }
}

/// `t^power J_order(alpha t)` or, with no Bessel factor, `t^power`.
#[derive(Debug, Clone, Copy)]
enum Weight {
    Bessel {
        order: BesselOrder,
        power: f64,
        alpha: f64,
    },
    Power {
        power: f64,
    },
}

impl Weight {
    #[inline]
    fn eval(&self, t: f64) -> f64 {
        match *self {
            Weight::Power { power } => pow(t, power),
            Weight::Bessel {
                order,
                power,
                alpha,
            } => {
                let z = alpha * t;
                match (order.two_nu(), power) {
                    (-1, p) if p == 0.5 => (2.0 / (PI * alpha)).sqrt() * z.cos(),
                    (1, p) if p == 1.5 => (2.0 / (PI * alpha)).sqrt() * t * z.sin(),
                    _ => pow(t, power) * j_unchecked(order, z),
                }
            }
        }
    }

    fn alpha(&self) -> f64 {
        match *self {
            Weight::Bessel { alpha, .. } => alpha,
            Weight::Power { .. } => 0.0,
        }
    }

    /// Bound on `|weight(t)|` used for tail truncation.
    fn envelope(&self, t: f64) -> f64 {
        match *self {
            Weight::Power { power } => pow(t, power) * t,
            Weight::Bessel { power, alpha, .. } => pow(t, power) * (2.0 / (PI * alpha * t)).sqrt(),
        }
    }
}

#[inline]
fn pow(t: f64, p: f64) -> f64 {
    if p == 0.0 {
        1.0
    } else if p == 1.0 {
        t
    } else if p == p.round() && p.abs() < 16.0 {
        t.powi(p as i32)
    } else {
        t.powf(p)
    }
}

struct Engine<'s> {
    rule: GaussLegendre,
    spec: &'s HankelSpec,
}

impl<'s> Engine<'s> {
    fn new(spec: &'s HankelSpec) -> Result<Self> {
        spec.validate()?;
        Ok(Engine {
            rule: GaussLegendre::new(spec.gauss_order),
            spec,
        })
    }

    fn step(&self, g: &RadialFn, w: &Weight, t: f64) -> f64 {
        let feature = g.scale.max(t) / self.spec.feature_div;
        let alpha = w.alpha();
        if alpha > 0.0 {
            feature.min(self.spec.panel_width * 2.0 * PI / alpha)
        } else {
            feature
        }
    }

    fn panel(&self, g: &RadialFn, w: &Weight, a: f64, b: f64) -> Result<f64> {
        let mut bad = None;
        let v = self.rule.integrate(
            |t| {
                let y = g.eval(t) * w.eval(t);
                if !y.is_finite() && bad.is_none() {
                    bad = Some(t);
                }
                y
            },
            a,
            b,
        );
        match bad {
            Some(t) => Err(Error::NotANumber(t)),
            None => Ok(v),
        }
    }

    fn segment(&self, g: &RadialFn, w: &Weight, a: f64, b: f64) -> Result<f64> {
        let mut total = 0.0;
        let mut t = a;
        while t < b {
            let h = self.step(g, w, t);
            // avoid leaving a sliver much thinner than a regular panel
            let next = if t + 1.5 * h >= b { b } else { t + h };
            total += self.panel(g, w, t, next)?;
            t = next;
        }
        Ok(total)
    }

    fn integrate(&self, g: &RadialFn, w: &Weight) -> Result<f64> {
        g.check()?;
        let knots = self.knots_for(g)?;
        let mut total = 0.0;
        for pair in knots.windows(2) {
            total += self.segment(g, w, pair[0], pair[1])?;
        }
        if g.hi.is_some() {
            return Ok(total);
        }
        let t0 = *knots.last().expect("knots are never empty");
        self.tail(g, w, t0, total)
    }

    fn knots_for(&self, g: &RadialFn) -> Result<Vec<f64>> {
        let knots = g.knots();
        if let Truncation::Fixed { t_max } = self.spec.truncation {
            if g.hi.is_none() && t_max <= *knots.last().unwrap() {
                return Err(Error::InvalidArgument(format!(
                    "t_max = {t_max} lies before the last breakpoint"
                )));
            }
        }
        Ok(knots)
    }

    fn block_len(&self, g: &RadialFn, w: &Weight, t: f64) -> f64 {
        let alpha = w.alpha();
        if alpha > 0.0 {
            PI / alpha
        } else {
            g.scale.max(t)
        }
    }

    fn tail(&self, g: &RadialFn, w: &Weight, t0: f64, head: f64) -> Result<f64> {
        let spec = self.spec;
        let env = |t: f64| g.eval(t).abs() * w.envelope(t);
        let tol = |v: f64| spec.abs_tol + spec.rel_tol * v.abs();
        if let Truncation::Fixed { t_max } = spec.truncation {
            let s = head + self.segment(g, w, t0, t_max)?;
            let rest = env(t_max) * self.block_len(g, w, t_max);
            if rest > tol(s) {
                return Err(Error::Truncation {
                    t: t_max,
                    tail: rest,
                    tol: tol(s),
                });
            }
            return Ok(s);
        }
        let t_cap = match spec.truncation {
            Truncation::Auto { t_cap } => t_cap,
            Truncation::Fixed { .. } => unreachable!(),
        };

        const WINDOW: usize = 40;
        let mut sums: Vec<f64> = Vec::new();
        let mut accel: Vec<f64> = Vec::new();
        let mut quiet = 0usize;
        let mut s = head;
        let mut t = t0;
        for _ in 0..spec.max_blocks {
            let len = self.block_len(g, w, t);
            if t > t_cap {
                break;
            }
            s += self.segment(g, w, t, t + len)?;
            t += len;
            sums.push(s);

            quiet = if env(t) < spec.abs_tol / 10.0 {
                quiet + 1
            } else {
                0
            };
            if quiet >= 2 {
                return Ok(s);
            }
            if sums.len() >= 4 {
                let from = sums.len().saturating_sub(WINDOW);
                accel.push(wynn_epsilon(&sums[from..]));
                let n = accel.len();
                if n >= 3 {
                    let e = accel[n - 1];
                    if (e - accel[n - 2]).abs() <= tol(e)
                        && (accel[n - 2] - accel[n - 3]).abs() <= tol(e)
                    {
                        return Ok(e);
                    }
                }
            }
        }
        let tail = env(t) * self.block_len(g, w, t);
        Err(Error::Truncation {
            t,
            tail,
            tol: tol(s),
        })
    }
}

/// `\int g(t) t^power J_order(alpha t) dt` over the support of `g`.
pub fn bessel_moment(
    g: &RadialFn,
    order: BesselOrder,
    power: f64,
    alpha: f64,
    spec: &HankelSpec,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "Bessel frequency must be positive, got {alpha}"
        )));
    }
    if order.two_nu() < 0 && power + order.nu() <= -1.0 {
        return Err(Error::InvalidArgument(
            "integrand not integrable at the origin".into(),
        ));
    }
    Engine::new(spec)?.integrate(
        g,
        &Weight::Bessel {
            order,
            power,
            alpha,
        },
    )
}

/// `\int g(t) t^power dt` over the support of `g`.
pub fn power_moment(g: &RadialFn, power: f64, spec: &HankelSpec) -> Result<f64> {
    Engine::new(spec)?.integrate(g, &Weight::Power { power })
}

/// `2^{1-d/2} / Gamma(d/2)`: the surface area of the unit sphere over `(2 pi)^{d/2}`.
pub fn dimension_constant(dim: usize) -> f64 {
    let h = dim as f64 / 2.0;
    2f64.powf(1.0 - h) / gamma(h)
}

/// The d-dimensional Fourier transform of the radial profile `g`, at radius `r >= 0`.
pub fn radial_fourier(g: &RadialFn, dim: usize, r: f64, spec: &HankelSpec) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "radius must be finite and >= 0, got {r}"
        )));
    }
    if r == 0.0 {
        return radial_fourier_origin(g, dim, spec);
    }
    let order = BesselOrder::radial(dim)?;
    let v = bessel_moment(g, order, dim as f64 / 2.0, r, spec)?;
    Ok(v * r.powf(-order.nu()))
}

/// `F(0) = c_d \int g(t) t^{d-1} dt`.
pub fn radial_fourier_origin(g: &RadialFn, dim: usize, spec: &HankelSpec) -> Result<f64> {
    if dim == 0 {
        return Err(Error::InvalidArgument(
            "dimension must be at least 1".into(),
        ));
    }
    Ok(dimension_constant(dim) * power_moment(g, dim as f64 - 1.0, spec)?)
}

/// Which decay proposition a profile is tested against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DecayMode {
    /// `f = 0` on `[0, 1/2]`; integral over `[1/2, inf)`.
    Tail,
    /// `f = 1` near 0 and `f = 0` beyond 2; integrand carries an extra factor `t`.
    Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayPoint {
    pub alpha: f64,
    pub value: f64,
    pub used: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub mode: DecayMode,
    pub dim: usize,
    pub n: u32,
    pub slope: f64,
    pub intercept: f64,
    /// Slope fitted to the decreasing majorant `max_{alpha' >= alpha} I(alpha')`.
    pub envelope_slope: f64,
    pub noise_floor: f64,
    /// First alpha whose value fell under the noise floor.
    pub truncated_at: Option<f64>,
    pub points: Vec<DecayPoint>,
    pub contract_holds: bool,
}

/// Fits the decay rate of `I(alpha) = |\int f(t) t^{d/2} J_{(d-2)/2}(alpha t) dt|`
/// (with `t f(t)` in origin mode) over `alphas`.
///
/// Values at or below the quadrature noise floor `10 (abs_tol + rel_tol max I)` are
/// left out of the fit, and `truncated_at` records the first such alpha.
pub fn decay_check(
    f: &dyn Fn(f64) -> f64,
    dim: usize,
    mode: DecayMode,
    n: u32,
    alphas: &[f64],
    spec: &HankelSpec,
) -> Result<DecayFit> {
    if alphas.iter().any(|a| !(*a >= 1.0 && a.is_finite())) {
        return Err(Error::InvalidArgument(
            "decay alphas must be finite and >= 1".into(),
        ));
    }
    let mut alphas = alphas.to_vec();
    alphas.sort_by(|a, b| a.total_cmp(b));
    alphas.dedup();
    spot_check(f, mode, n)?;

    let order = BesselOrder::radial(dim)?;
    let with_t = |t: f64| t * f(t);
    let (g, power) = match mode {
        DecayMode::Tail => (
            RadialFn::new(f).support(0.5, None).scale(0.5),
            dim as f64 / 2.0,
        ),
        DecayMode::Origin => (
            RadialFn::new(&with_t).support(0.0, Some(2.0)).scale(0.5),
            dim as f64 / 2.0,
        ),
    };
    let mut values = Vec::with_capacity(alphas.len());
    for &a in &alphas {
        values.push(bessel_moment(&g, order, power, a, spec)?.abs());
    }
    let max = values.iter().copied().fold(0.0, f64::max);
    let noise_floor = 10.0 * (spec.abs_tol + spec.rel_tol * max);
    let used: Vec<bool> = values.iter().map(|v| *v > noise_floor).collect();
    let (xs, ys): (Vec<f64>, Vec<f64>) = alphas
        .iter()
        .zip(&values)
        .zip(&used)
        .filter(|(_, u)| **u)
        .map(|((a, v), _)| (*a, *v))
        .unzip();
    if xs.len() < 3 {
        return Err(Error::TooFewPoints {
            needed: 3,
            got: xs.len(),
        });
    }
    let fit = fit_loglog(&xs, &ys)?;
    let mut majorant = ys.clone();
    for i in (0..majorant.len() - 1).rev() {
        majorant[i] = majorant[i].max(majorant[i + 1]);
    }
    let envelope_slope = fit_loglog(&xs, &majorant)?.slope;
    let truncated_at = used.iter().position(|u| !u).map(|i| alphas[i]);
    let points = alphas
        .iter()
        .zip(&values)
        .zip(&used)
        .map(|((a, v), u)| DecayPoint {
            alpha: *a,
            value: *v,
            used: *u,
        })
        .collect();
    Ok(DecayFit {
        mode,
        dim,
        n,
        slope: fit.slope,
        intercept: fit.intercept,
        envelope_slope,
        noise_floor,
        truncated_at,
        points,
        contract_holds: fit.slope <= -(n as f64) + 0.25,
    })
}

/// Finite-difference sanity check of the decay hypotheses: plateau values and finite
/// derivatives up to order `n` at sample points.
fn spot_check(f: &dyn Fn(f64) -> f64, mode: DecayMode, n: u32) -> Result<()> {
    if n < 2 {
        return Err(Error::Precondition(format!(
            "decay order n must exceed 1, got {n}"
        )));
    }
    match mode {
        DecayMode::Tail => {
            for t in [0.0, 0.25, 0.5] {
                if f(t) != 0.0 {
                    return Err(Error::Precondition(format!(
                        "tail mode needs f = 0 on [0, 1/2]; f({t}) = {}",
                        f(t)
                    )));
                }
            }
        }
        DecayMode::Origin => {
            if (f(1e-9) - 1.0).abs() > 1e-12 || f(2.0).abs() > 1e-12 || f(2.5) != 0.0 {
                return Err(Error::Precondition(
                    "origin mode needs f = 1 near 0 and f = 0 beyond 2".into(),
                ));
            }
        }
    }
    let h = 1e-2;
    let (lo, hi) = match mode {
        DecayMode::Tail => (0.55, 8.0),
        DecayMode::Origin => (0.05, 1.95),
    };
    for i in 0..16 {
        let t = lo + (hi - lo) * i as f64 / 15.0;
        let mut row: Vec<f64> = (-(n as i32)..=n as i32)
            .map(|k| f(t + k as f64 * h))
            .collect();
        for order in 1..=n {
            row = row.windows(3).map(|w| (w[2] - w[0]) / (2.0 * h)).collect();
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Precondition(format!(
                    "derivative of order {order} not finite near t = {t}"
                )));
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_constant_matches_sphere_area() {
        for d in 1..=6 {
            let h = d as f64 / 2.0;
            let area = 2.0 * PI.powf(h) / gamma(h);
            let want = area / (2.0 * PI).powf(h);
            assert!((dimension_constant(d) - want).abs() < 1e-14 * want);
        }
    }

    #[test]
    fn one_dimensional_cosine_reduction() {
        // d = 1: F(r) = sqrt(2/pi) \int g(t) cos(r t) dt
        let g = |t: f64| 1.0 / (1.0 + t * t).powi(2);
        let spec = HankelSpec::default();
        let gl = GaussLegendre::new(20);
        for r in [0.3, 1.0, 2.5, 7.0] {
            let got = radial_fourier(&RadialFn::new(&g), 1, r, &spec).unwrap();
            // direct cosine quadrature on [0, 400] in short panels, plus an analytic tail bound
            let mut direct = 0.0;
            let mut a: f64 = 0.0;
            while a < 400.0 {
                let b = (a + 0.05).min(400.0);
                direct += gl.integrate(|t| g(t) * (r * t).cos(), a, b);
                a = b;
            }
            direct *= (2.0 / PI).sqrt();
            // closed form: sqrt(pi/2) (1 + r) e^{-r} / 2
            let exact = (PI / 2.0).sqrt() * (1.0 + r) * (-r).exp() / 2.0;
            assert!((got - exact).abs() < 1e-10, "r = {r}: {got} vs {exact}");
            assert!(
                (got - direct).abs() < 1e-9,
                "r = {r}: {got} vs direct {direct}"
            );
        }
    }

    #[test]
    fn gaussian_is_self_dual() {
        let g = |t: f64| (-0.5 * t * t).exp();
        let spec = HankelSpec::default();
        for d in 1..=5 {
            for r in [0.0, 0.5, 1.0, 2.0, 4.0] {
                let got = radial_fourier(&RadialFn::new(&g), d, r, &spec).unwrap();
                let want = (-0.5 * r * r).exp();
                assert!(
                    (got - want).abs() < 1e-10,
                    "d = {d}, r = {r}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn compact_support_and_breaks() {
        // indicator of [0, 1] in d = 3: F(r) = sqrt(2/pi) (sin r - r cos r) / r^3
        let g = |t: f64| if t <= 1.0 { 1.0 } else { 0.0 };
        let spec = HankelSpec::default();
        let f = RadialFn::new(&g).support(0.0, Some(1.0));
        for r in [0.5, 3.0, 20.0] {
            let got = radial_fourier(&f, 3, r, &spec).unwrap();
            let want = (2.0 / PI).sqrt() * (r.sin() - r * r.cos()) / r.powi(3);
            assert!((got - want).abs() < 1e-12, "r = {r}");
        }
    }

    #[test]
    fn fixed_truncation_reports_insufficient_range() {
        let g = |t: f64| 1.0 / (1.0 + t * t);
        let spec = HankelSpec::default().with_truncation(Truncation::Fixed { t_max: 10.0 });
        let err = radial_fourier(&RadialFn::new(&g), 1, 1.0, &spec).unwrap_err();
        assert!(matches!(err, Error::Truncation { .. }), "{err}");
        let nan = |t: f64| if t > 3.0 { f64::NAN } else { 1.0 };
        let err = radial_fourier(&RadialFn::new(&nan), 1, 1.0, &HankelSpec::default()).unwrap_err();
        assert!(matches!(err, Error::NotANumber(_)));
    }

    #[test]
    fn divergent_tail_is_not_reported_as_converged() {
        let g = |t: f64| 1.0 / (1.0 + t);
        let spec = HankelSpec::default().with_truncation(Truncation::Auto { t_cap: 1e6 });
        assert!(radial_fourier(&RadialFn::new(&g), 1, 0.0, &spec).is_err());
    }
}
