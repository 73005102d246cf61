//! Bessel functions of the first kind for integer and half-integer order.
//!
//! Evaluation regimes (all switch points are on `x`, with `nu` the order):
//!
//! * ascending power series when `x <= max(SERIES_MAX, 2 sqrt(nu + 1))`; below that
//!   bound the series terms decrease monotonically so cancellation costs at most a digit;
//! * half-integer orders above the series range: closed forms for `J_{-1/2}`, `J_{1/2}`
//!   followed by upward recurrence when `x >= nu`, otherwise Miller downward
//!   recurrence normalized against whichever closed form is larger in magnitude;
//! * integer orders with `x < ASYMPTOTIC_MIN`: Miller downward recurrence normalized by
//!   `J_0 + 2 sum J_{2k} = 1`;
//! * integer orders with `x >= ASYMPTOTIC_MIN`: Hankel asymptotic expansion for `J_0` and
//!   `J_1` (its smallest term is below `exp(-2x)`, i.e. under 1e-21 at the switch), then
//!   upward recurrence for orders below `x` and Miller recurrence normalized on `J_0`/`J_1`
//!   above it.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use super::gamma::gamma;
use crate::error::{Error, Result};

pub const SERIES_MAX: f64 = 4.0;
pub const ASYMPTOTIC_MIN: f64 = 25.0;
/// Largest supported order times two.
pub const MAX_TWO_NU: i32 = 60;

/// Order of a Bessel function stored as `2 nu`, so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BesselOrder {
    two_nu: i32,
}

impl BesselOrder {
    pub fn from_twice(two_nu: i32) -> Result<Self> {
        let ord = BesselOrder { two_nu };
        ord.validate()?;
        Ok(ord)
    }

    pub fn integer(n: i32) -> Result<Self> {
        Self::from_twice(2 * n)
    }

    /// The order `(d - 2) / 2` used by radial Fourier transforms in R^d.
    pub fn radial(dim: usize) -> Result<Self> {
        Self::from_twice(dim as i32 - 2)
    }

    /// Parses a real order; it must be an integer or half-integer.
    pub fn from_f64(nu: f64) -> Result<Self> {
        let t = 2.0 * nu;
        if (t - t.round()).abs() > 1e-12 {
            return Err(Error::UnsupportedOrder(format!(
                "J is implemented for integer and half-integer orders only, got {nu}"
            )));
        }
        Self::from_twice(t.round() as i32)
    }

    pub fn two_nu(self) -> i32 {
        self.two_nu
    }

    pub fn nu(self) -> f64 {
        self.two_nu as f64 / 2.0
    }

    pub fn is_integer(self) -> bool {
        self.two_nu % 2 == 0
    }

    pub fn shifted(self, by_twice: i32) -> Result<Self> {
        Self::from_twice(self.two_nu + by_twice)
    }

    fn validate(self) -> Result<()> {
        if self.two_nu.abs() > MAX_TWO_NU {
            return Err(Error::UnsupportedOrder(format!(
                "|nu| = {} exceeds {}",
                self.nu().abs(),
                MAX_TWO_NU / 2
            )));
        }
        if self.two_nu < -1 && !self.is_integer() {
            return Err(Error::UnsupportedOrder(format!(
                "negative half-integer order {} below -1/2",
                self.nu()
            )));
        }
        Ok(())
    }
}

/// `J_nu(x)` for `x >= 0`.
pub fn bessel_j(order: BesselOrder, x: f64) -> Result<f64> {
    order.validate()?;
    if x.is_nan() || x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bessel_j needs x >= 0, got {x}"
        )));
    }
    if x == 0.0 && order.two_nu == -1 {
        return Ok(f64::INFINITY);
    }
    Ok(j_unchecked(order, x))
}

/// Evaluation without argument validation, for quadrature inner loops.
/// `order` must come from a validated constructor and `x` must be positive.
#[inline]
pub(crate) fn j_unchecked(order: BesselOrder, x: f64) -> f64 {
    let two_nu = order.two_nu;
    if two_nu < 0 && two_nu % 2 == 0 {
        let n = -two_nu / 2;
        let v = j_unchecked(BesselOrder { two_nu: -two_nu }, x);
        return if n % 2 == 0 { v } else { -v };
    }
    match two_nu {
        -1 => return (2.0 / (PI * x)).sqrt() * x.cos(),
        1 => {
            if x > 1e-3 {
                return (2.0 / (PI * x)).sqrt() * x.sin();
            }
        }
        _ => {}
    }
    let nu = order.nu();
    if x == 0.0 {
        return if two_nu == 0 { 1.0 } else { 0.0 };
    }
    if x <= SERIES_MAX.max(2.0 * (nu + 1.0).sqrt()) {
        return series(nu, x);
    }
    if order.is_integer() {
        integer_order(two_nu / 2, x)
    } else {
        half_integer_order(two_nu, x)
    }
}

fn series(nu: f64, x: f64) -> f64 {
    let h = 0.5 * x;
    let h2 = h * h;
    let mut term = h.powf(nu) / gamma(nu + 1.0);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term *= -h2 / (kf * (kf + nu));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn closed_half(x: f64) -> (f64, f64) {
    let s = (2.0 / (PI * x)).sqrt();
    (s * x.cos(), s * x.sin())
}

fn half_integer_order(two_nu: i32, x: f64) -> f64 {
    // orders -1/2, 1/2, 3/2, ... indexed by n with nu = n - 1/2
    let target = ((two_nu + 1) / 2) as usize;
    let nu = two_nu as f64 / 2.0;
    let (jm, jp) = closed_half(x);
    if x >= nu {
        let (mut lo, mut hi) = (jm, jp);
        for n in 1..target {
            let order = n as f64 - 0.5;
            let next = 2.0 * order / x * hi - lo;
            lo = hi;
            hi = next;
        }
        return if target == 0 { jm } else { hi };
    }
    let start = miller_start(nu, x);
    let (vals_lo, vals_hi, at_target) = miller_down(start, target, x, -0.5);
    let scale = if jm.abs() > jp.abs() {
        jm / vals_lo
    } else {
        jp / vals_hi
    };
    at_target * scale
}

/// Runs the recurrence `f_{m-1} = 2 m / x f_m - f_{m+1}` from index `start` down to 0,
/// where index `m` stands for order `offset + m`. Returns the unnormalized values at
/// indices 0, 1 and `target`.
fn miller_down(start: usize, target: usize, x: f64, offset: f64) -> (f64, f64, f64) {
    let mut upper = 0.0;
    let mut cur = 1e-300;
    let mut at_target = if start == target { cur } else { 0.0 };
    let mut at_one = if start == 1 { cur } else { 0.0 };
    for m in (1..=start).rev() {
        let order = offset + m as f64;
        let lower = 2.0 * order / x * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            upper *= 1e-250;
            at_target *= 1e-250;
            at_one *= 1e-250;
        }
        if m - 1 == target {
            at_target = cur;
        }
        if m - 1 == 1 {
            at_one = cur;
        }
    }
    (cur, at_one, at_target)
}

fn miller_start(nu: f64, x: f64) -> usize {
    let top = nu.max(x);
    (top + 20.0 + (40.0 * top).sqrt()).ceil() as usize
}

fn integer_order(n: i32, x: f64) -> f64 {
    let n = n as usize;
    if x >= ASYMPTOTIC_MIN {
        let j0 = hankel_asymptotic(0.0, x);
        let j1 = hankel_asymptotic(1.0, x);
        match n {
            0 => return j0,
            1 => return j1,
            _ => {}
        }
        if (n as f64) <= x {
            let (mut lo, mut hi) = (j0, j1);
            for m in 1..n {
                let next = 2.0 * m as f64 / x * hi - lo;
                lo = hi;
                hi = next;
            }
            return hi;
        }
        let start = miller_start(n as f64, x);
        let (v0, v1, vt) = miller_down(start, n, x, 0.0);
        let scale = if j0.abs() > j1.abs() {
            j0 / v0
        } else {
            j1 / v1
        };
        return vt * scale;
    }
    // Miller with the normalization J_0 + 2 sum_k J_{2k} = 1
    let mut start = miller_start(n as f64, x);
    if start % 2 == 1 {
        start += 1;
    }
    let mut upper = 0.0;
    let mut cur = 1e-300;
    let mut even_sum = 0.0;
    let mut at_target = 0.0;
    for m in (1..=start).rev() {
        let lower = 2.0 * m as f64 / x * cur - upper;
        upper = cur;
        cur = lower;
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            upper *= 1e-250;
            even_sum *= 1e-250;
            at_target *= 1e-250;
        }
        let order = m - 1;
        if order % 2 == 0 && order > 0 {
            even_sum += cur;
        }
        if order == n {
            at_target = cur;
        }
    }
    let norm = cur + 2.0 * even_sum;
    at_target / norm
}

/// Hankel's expansion `J_nu(x) = sqrt(2/(pi x)) (P cos chi - Q sin chi)`, summed until the
/// terms stop decreasing.
fn hankel_asymptotic(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let inv8x = 1.0 / (8.0 * x);
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (mu - odd * odd) * inv8x / k as f64;
        if term.abs() >= last || term == 0.0 {
            break;
        }
        last = term.abs();
        // k odd contributes to Q, even to P, with alternating signs per pair
        match k % 4 {
            1 => q += term,
            2 => p -= term,
            3 => q -= term,
            _ => p += term,
        }
        if term.abs() < 1e-17 {
            break;
        }
    }
    let phase = nu * FRAC_PI_2 + FRAC_PI_4;
    let (sx, cx) = x.sin_cos();
    let (sp, cp) = phase.sin_cos();
    let cos_chi = cx * cp + sx * sp;
    let sin_chi = sx * cp - cx * sp;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}
