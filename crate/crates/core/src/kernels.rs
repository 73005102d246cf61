//! Smooth radial kernels given by their Fourier profile `kappa`.
//!
//! * `K1`: `kappa` vanishes on `[0, a]` (`a >= 1`), is a bump on `(a, b)` and zero beyond.
//! * `K2`: `kappa = 1` on `[0, a]`, decreases smoothly to `0` at `b`, with
//!   `1/2 <= a < b <= 1`.
//!
//! Both are built from `psi(x) = exp(-1/x)`, so the plateau values are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hankel::{radial_fourier, HankelSpec, RadialFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum KernelClass {
    K1,
    K2,
}

impl std::str::FromStr for KernelClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "K1" => Ok(KernelClass::K1),
            "K2" => Ok(KernelClass::K2),
            _ => Err(Error::Parse(format!(
                "unknown kernel class `{s}` (expected K1 or K2)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelProfile {
    class: KernelClass,
    a: f64,
    b: f64,
    sigma: f64,
}

#[inline]
fn psi(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Builds a kernel; `glue = None` selects `(1, 3)` for `K1` and `(1/2, 1)` for `K2`.
pub fn make_kernel(class: KernelClass, glue: Option<(f64, f64)>) -> Result<KernelProfile> {
    let (a, b) = match (class, glue) {
        (KernelClass::K1, None) => (1.0, 3.0),
        (KernelClass::K2, None) => (0.5, 1.0),
        (_, Some(g)) => g,
    };
    let ok = match class {
        KernelClass::K1 => a >= 1.0 && b > a && b.is_finite(),
        KernelClass::K2 => a >= 0.5 && b > a && b <= 1.0,
    };
    if !ok {
        return Err(Error::InvalidArgument(format!(
            "invalid glue interval ({a}, {b}) for {class:?}"
        )));
    }
    Ok(KernelProfile {
        class,
        a,
        b,
        sigma: 1.0,
    })
}

impl KernelProfile {
    pub fn class(&self) -> KernelClass {
        self.class
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn glue(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// The profile `r -> kappa(r / sigma)`.
    pub fn scaled(&self, sigma: f64) -> Result<KernelProfile> {
        if !(sigma >= 1.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kernel scale sigma = {sigma} must be >= 1"
            )));
        }
        Ok(KernelProfile {
            sigma: self.sigma * sigma,
            ..*self
        })
    }

    /// Same kernel at absolute scale `sigma` (any positive value).
    pub fn at_scale(&self, sigma: f64) -> Result<KernelProfile> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "kernel scale must be positive, got {sigma}"
            )));
        }
        Ok(KernelProfile { sigma, ..*self })
    }

    /// The unscaled profile.
    pub fn kappa_unit(&self, r: f64) -> f64 {
        let (a, b) = (self.a, self.b);
        match self.class {
            KernelClass::K1 => {
                if r <= a || r >= b {
                    0.0
                } else {
                    let u = 2.0 * (r - a) / (b - a);
                    (-1.0 / (u * (2.0 - u))).exp()
                }
            }
            KernelClass::K2 => {
                if r <= a {
                    1.0
                } else if r >= b {
                    0.0
                } else {
                    let s = (r - a) / (b - a);
                    let (p, q) = (psi(1.0 - s), psi(s));
                    p / (p + q)
                }
            }
        }
    }

    #[inline]
    pub fn kappa(&self, r: f64) -> f64 {
        self.kappa_unit(r / self.sigma)
    }

    /// `[lo, hi]` outside which `kappa` vanishes, at the current scale.
    pub fn support(&self) -> (f64, f64) {
        match self.class {
            KernelClass::K1 => (self.a * self.sigma, self.b * self.sigma),
            KernelClass::K2 => (0.0, self.b * self.sigma),
        }
    }

    /// Points where `kappa` switches formula, at the current scale.
    pub fn breaks(&self) -> Vec<f64> {
        vec![self.a * self.sigma, self.b * self.sigma]
    }

    /// Wraps `t -> g(t)` (already multiplied by `kappa`) with this kernel's support,
    /// breakpoints and length scale.
    pub fn window<'a>(&self, g: &'a dyn Fn(f64) -> f64) -> RadialFn<'a> {
        let (lo, hi) = self.support();
        let width = (self.b - self.a) * self.sigma;
        RadialFn::new(g)
            .support(lo, Some(hi))
            .breaks(&self.breaks())
            .scale(width)
    }

    /// Like [`window`](Self::window) for the complementary profile `1 - kappa` of a `K2`
    /// kernel, which lives on `[a sigma, inf)`.
    pub fn complement_window<'a>(&self, g: &'a dyn Fn(f64) -> f64, scale: f64) -> RadialFn<'a> {
        let lo = match self.class {
            KernelClass::K1 => 0.0,
            KernelClass::K2 => self.a * self.sigma,
        };
        RadialFn::new(g)
            .support(lo, None)
            .breaks(&self.breaks())
            .scale(scale.min((self.b - self.a) * self.sigma))
    }
}

/// `K_sigma(x)` for `|x| = r`, the inverse transform of `kappa(. / sigma)`.
pub fn kernel_space_eval(kp: &KernelProfile, dim: usize, r: f64, spec: &HankelSpec) -> Result<f64> {
    let g = |t: f64| kp.kappa(t);
    radial_fourier(&kp.window(&g), dim, r, spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plateaus_and_values() {
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        assert_eq!(k2.kappa(0.4), 1.0);
        assert_eq!(k2.kappa(0.5), 1.0);
        assert_eq!(k2.kappa(1.2), 0.0);
        assert!((k2.kappa(0.75) - 0.5).abs() < 1e-15);
        let k1 = make_kernel(KernelClass::K1, None).unwrap();
        assert_eq!(k1.kappa(0.9), 0.0);
        assert_eq!(k1.kappa(2.0), (-1f64).exp());
        assert_eq!(k1.kappa(3.5), 0.0);
    }

    #[test]
    fn scaling_and_composition() {
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        assert_eq!(k2.scaled(2.0).unwrap().kappa(0.9), 1.0);
        let k1 = make_kernel(KernelClass::K1, None).unwrap();
        assert_eq!(k1.scaled(4.0).unwrap().kappa(3.9), 0.0);
        assert!(k1.scaled(0.5).is_err());
        let a = k1.scaled(2.0).unwrap().scaled(2.0).unwrap();
        let b = k1.scaled(4.0).unwrap();
        for i in 0..400 {
            let r = i as f64 * 0.05;
            assert_eq!(a.kappa(r), b.kappa(r));
        }
    }

    #[test]
    fn k2_is_non_increasing() {
        let k2 = make_kernel(KernelClass::K2, None).unwrap();
        let mut last = k2.kappa(0.0);
        for i in 1..=5000 {
            let v = k2.kappa(1.2 * i as f64 / 5000.0);
            assert!(v <= last);
            last = v;
        }
    }

    #[test]
    fn rejects_bad_glue() {
        assert!(make_kernel(KernelClass::K1, Some((0.5, 2.0))).is_err());
        assert!(make_kernel(KernelClass::K2, Some((0.4, 1.0))).is_err());
        assert!(make_kernel(KernelClass::K2, Some((0.6, 1.2))).is_err());
        assert!(make_kernel(KernelClass::K2, Some((0.8, 0.7))).is_err());
        assert!(make_kernel(KernelClass::K1, Some((1.0, 2.0))).is_ok());
    }

    #[test]
    fn origin_value_scales_like_sigma_to_the_d() {
        let spec = HankelSpec::default();
        for class in [KernelClass::K1, KernelClass::K2] {
            let k = make_kernel(class, None).unwrap();
            for d in 1..=3 {
                let base = kernel_space_eval(&k, d, 0.0, &spec).unwrap();
                for s in [2.0, 4.0] {
                    let v = kernel_space_eval(&k.scaled(s).unwrap(), d, 0.0, &spec).unwrap();
                    assert!((v - s.powi(d as i32) * base).abs() < 1e-11 * v.abs());
                    // K_sigma(x) = sigma^d K_1(sigma x)
                    let r = 0.3;
                    let lhs = kernel_space_eval(&k.scaled(s).unwrap(), d, r, &spec).unwrap();
                    let rhs = s.powi(d as i32) * kernel_space_eval(&k, d, s * r, &spec).unwrap();
                    assert!(
                        (lhs - rhs).abs() < 1e-10 * (1.0 + rhs.abs()),
                        "{class:?} d={d} s={s}"
                    );
                }
            }
        }
    }
}
