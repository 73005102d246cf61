//! Modified Bessel function of the second kind for real order.
//!
//! The order is reduced to `mu = nu - round(nu)` in `[-1/2, 1/2]`. For `x < 2`, Temme's
//! series gives `K_mu` and `K_{mu+1}`; for `x >= 2`, Steed's continued fraction (CF2)
//! does. Forward recurrence in the order, which is stable for `K`, reaches `nu`.

use std::f64::consts::PI;

use super::gamma::temme_gammas;
use crate::error::{Error, Result};

const TEMME_MAX_X: f64 = 2.0;
const EPS: f64 = 1e-16;
const MAX_ITER: usize = 10_000;

/// `K_nu(x)` for `x > 0`. Symmetric in `nu`.
pub fn bessel_k(nu: f64, x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bessel_k needs finite x > 0, got {x}"
        )));
    }
    if !nu.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bessel_k needs finite order, got {nu}"
        )));
    }
    Ok(k_pair(nu.abs(), x).0)
}

/// `(K_nu(x), K_{nu+1}(x))` for `nu >= 0`, `x > 0`.
pub(crate) fn k_pair(nu: f64, x: f64) -> (f64, f64) {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let steps = nl as usize;
    let (mut k_mu, mut k_mu1) = if x < TEMME_MAX_X {
        temme(mu, x)
    } else {
        steed(mu, x)
    };
    let xi2 = 2.0 / x;
    for i in 1..=steps {
        let next = (mu + i as f64) * xi2 * k_mu1 + k_mu;
        k_mu = k_mu1;
        k_mu1 = next;
    }
    (k_mu, k_mu1)
}

fn temme(mu: f64, x: f64) -> (f64, f64) {
    let x2 = 0.5 * x;
    let pimu = PI * mu;
    let fact = if pimu.abs() < EPS {
        1.0
    } else {
        pimu / pimu.sin()
    };
    let d = -x2.ln();
    let e = mu * d;
    let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
    let (gam1, gam2) = temme_gammas(mu);
    let (recip_plus, recip_minus) = super::gamma::recip_gamma_pair(mu);
    let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
    let mut sum = ff;
    let ee = e.exp();
    let mut p = 0.5 * ee * recip_plus.recip();
    let mut q = 0.5 / (ee * recip_minus);
    let mut c = 1.0;
    let dd = x2 * x2;
    let mut sum1 = p;
    let mu2 = mu * mu;
    for i in 1..MAX_ITER {
        let fi = i as f64;
        ff = (fi * ff + p + q) / (fi * fi - mu2);
        c *= dd / fi;
        p /= fi - mu;
        q /= fi + mu;
        let del = c * ff;
        sum += del;
        sum1 += c * (p - fi * ff);
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    (sum, sum1 * 2.0 / x)
}

fn steed(mu: f64, x: f64) -> (f64, f64) {
    let mu2 = mu * mu;
    let mut b = 2.0 * (1.0 + x);
    let mut d = 1.0 / b;
    let mut delh = d;
    let mut h = d;
    let mut q1 = 0.0;
    let mut q2 = 1.0;
    let a1 = 0.25 - mu2;
    let mut q = a1;
    let mut c = a1;
    let mut a = -a1;
    let mut s = 1.0 + q * delh;
    for i in 2..MAX_ITER {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += c * qnew;
        b += 2.0;
        d = 1.0 / (b + a * d);
        delh = (b * d - 1.0) * delh;
        h += delh;
        let dels = q * delh;
        s += dels;
        if (dels / s).abs() < EPS {
            break;
        }
    }
    h *= a1;
    let k_mu = (PI / (2.0 * x)).sqrt() * (-x).exp() / s;
    let k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
    (k_mu, k_mu1)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt by composite Simpson on a cutoff.
    fn integral_oracle(nu: f64, x: f64) -> f64 {
        // integrand below 1e-300 once x cosh t > 700
        let t_max = ((700.0 / x).max(1.0)).acosh() + 1.0;
        let n = 200_000;
        let h = t_max / n as f64;
        let f = |t: f64| (-x * t.cosh()).exp() * (nu * t).cosh();
        let mut s = f(0.0) + f(t_max);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn half_order_closed_forms() {
        for &x in &[1e-3, 0.1, 1.0, 1.99, 2.0, 5.0, 30.0] {
            let k12 = bessel_k(0.5, x).unwrap();
            let want = (PI / (2.0 * x)).sqrt() * (-x).exp();
            assert!((k12 - want).abs() < 1e-13 * want, "K_1/2({x})");
            let k32 = bessel_k(1.5, x).unwrap();
            let want32 = want * (1.0 + 1.0 / x);
            assert!((k32 - want32).abs() < 1e-13 * want32, "K_3/2({x})");
        }
        // sqrt(pi/2) / e
        let v = bessel_k(0.5, 1.0).unwrap();
        assert!((v - 0.461_068_504_447_894_5).abs() < 1e-15);
    }

    #[test]
    fn matches_integral_representation() {
        for &nu in &[0.0, 0.25, 0.5, 1.0, 1.3, 2.0, 4.75, 10.0] {
            for &x in &[1e-3, 0.05, 0.7, 1.9999, 2.0, 3.3, 10.0, 25.0, 50.0] {
                let got = bessel_k(nu, x).unwrap();
                let want = integral_oracle(nu, x);
                assert!(
                    (got - want).abs() < 1e-8 * want,
                    "K_{nu}({x}) = {got} vs {want}"
                );
            }
        }
        let k2 = bessel_k(2.0, 10.0).unwrap();
        assert!((k2 - integral_oracle(2.0, 10.0)).abs() < 1e-8 * k2);
    }

    #[test]
    fn symmetric_positive_decreasing() {
        for &nu in &[0.0, 0.3, 1.0, 2.5, 7.0] {
            assert_eq!(bessel_k(nu, 1.3).unwrap(), bessel_k(-nu, 1.3).unwrap());
            let mut prev = f64::INFINITY;
            let mut x = 1e-3;
            while x < 50.0 {
                let v = bessel_k(nu, x).unwrap();
                assert!(v > 0.0 && v < prev, "nu={nu} x={x}");
                prev = v;
                x *= 1.15;
            }
        }
    }

    #[test]
    fn rejects_nonpositive_argument() {
        assert!(bessel_k(1.0, 0.0).is_err());
        assert!(bessel_k(1.0, -2.0).is_err());
    }
}
