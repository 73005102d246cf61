//! RBF networks, uniform-grid fields, discrete `L^p` norms and Bessel-potential norms.

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{dist, PointSet};
use crate::rbf::RadialProfile;

/// Default cap on the number of grid nodes.
pub const GRID_BUDGET: usize = 1 << 23;
/// Relative boundary magnitude above which a field counts as not decayed.
pub const TAIL_TOL: f64 = 1e-6;

/// `g = sum_j a_j Phi(. - xi_j)`.
#[derive(Debug, Clone)]
pub struct RbfNetwork {
    centers: PointSet,
    coeffs: Vec<f64>,
    profile: RadialProfile,
}

impl RbfNetwork {
    pub fn new(centers: PointSet, coeffs: Vec<f64>, profile: RadialProfile) -> Result<Self> {
        if coeffs.len() != centers.len() {
            return Err(Error::InvalidArgument(format!(
                "{} coefficients for {} centers",
                coeffs.len(),
                centers.len()
            )));
        }
        if centers.dim() != profile.dim() {
            return Err(Error::InvalidArgument(
                "center and profile dimensions differ".into(),
            ));
        }
        if profile.is_generalized() {
            return Err(Error::InvalidArgument(
                "networks need a profile with an integrable transform (not thin-plate)".into(),
            ));
        }
        if coeffs.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidArgument("coefficients must be finite".into()));
        }
        Ok(RbfNetwork {
            centers,
            coeffs,
            profile,
        })
    }

    pub fn centers(&self) -> &PointSet {
        &self.centers
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn profile(&self) -> &RadialProfile {
        &self.profile
    }

    pub fn with_coeffs(&self, coeffs: Vec<f64>) -> Result<Self> {
        Self::new(self.centers.clone(), coeffs, self.profile.clone())
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.centers.dim() {
            return Err(Error::InvalidArgument(
                "evaluation point has wrong dimension".into(),
            ));
        }
        let mut s = 0.0;
        for (a, c) in self.coeffs.iter().zip(self.centers.points()) {
            if *a != 0.0 {
                s += a * self.profile.space_eval(dist(x, c))?;
            }
        }
        Ok(s)
    }
}

/// `l^p` norm; `p = inf` gives the maximum modulus.
pub fn coeff_norm(a: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        a.iter().fold(0.0, |m, v| m.max(v.abs()))
    } else if p == 1.0 {
        a.iter().map(|v| v.abs()).sum()
    } else if p == 2.0 {
        a.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        a.iter().map(|v| v.abs().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

/// Smoothness order `k` and integrability exponent `p` of a Bessel-potential norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub k: f64,
    pub p: f64,
}

impl NormSpec {
    pub fn new(k: f64, p: f64) -> Result<Self> {
        if !(k >= 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "smoothness k = {k} must be finite and >= 0"
            )));
        }
        if !(p >= 1.0) {
            return Err(Error::InvalidArgument(format!(
                "exponent p = {p} must lie in [1, inf]"
            )));
        }
        Ok(NormSpec { k, p })
    }

    /// Rejects `k >= beta - d`.
    pub fn for_profile(k: f64, p: f64, profile: &RadialProfile) -> Result<Self> {
        let limit = profile.beta() - profile.dim() as f64;
        if k >= limit {
            return Err(Error::InvalidArgument(format!(
                "smoothness k = {k} must be below beta - d = {limit}"
            )));
        }
        Self::new(k, p)
    }

    pub fn conjugate(&self) -> f64 {
        conjugate(self.p)
    }
}

pub fn conjugate(p: f64) -> f64 {
    if p == 1.0 {
        f64::INFINITY
    } else if p.is_infinite() {
        1.0
    } else {
        p / (p - 1.0)
    }
}

/// Parses `1`, `2.5`, `inf`.
pub fn parse_exponent(s: &str) -> Result<f64> {
    let p = match s.trim().to_ascii_lowercase().as_str() {
        "inf" | "infinity" | "∞" => f64::INFINITY,
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad exponent `{s}`")))?,
    };
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "exponent {s} must lie in [1, inf]"
        )));
    }
    Ok(p)
}

/// Samples on a uniform grid, stored row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq)]
pub struct GridField {
    dim: usize,
    origin: Vec<f64>,
    spacing: f64,
    extents: Vec<usize>,
    values: Vec<f64>,
    pad_radius: f64,
}

impl GridField {
    pub fn new(
        origin: Vec<f64>,
        spacing: f64,
        extents: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<Self> {
        let dim = origin.len();
        if dim == 0 || extents.len() != dim {
            return Err(Error::InvalidArgument(
                "grid origin and extents must have the same positive length".into(),
            ));
        }
        if !(spacing > 0.0 && spacing.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "grid spacing must be positive, got {spacing}"
            )));
        }
        if extents.iter().any(|n| *n < 2) {
            return Err(Error::InvalidArgument(
                "grid extents must be at least 2 per axis".into(),
            ));
        }
        if extents.iter().product::<usize>() != values.len() {
            return Err(Error::InvalidArgument(
                "value count does not match extents".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("grid values must be finite".into()));
        }
        Ok(GridField {
            dim,
            origin,
            spacing,
            extents,
            values,
            pad_radius: 0.0,
        })
    }

    /// Grid over `[lo, lo + (n-1) spacing]` filled with `f`.
    pub fn from_fn(
        origin: Vec<f64>,
        spacing: f64,
        extents: Vec<usize>,
        f: impl Fn(&[f64]) -> f64 + Sync,
    ) -> Result<Self> {
        let shape = GridField::new(
            origin,
            spacing,
            extents.clone(),
            vec![0.0; extents.iter().product()],
        )?;
        let values: Vec<f64> = (0..shape.len())
            .into_par_iter()
            .map(|i| f(&shape.node(i)))
            .collect();
        GridField::new(shape.origin, spacing, extents, values)
    }

    pub fn with_pad_radius(mut self, pad: f64) -> Self {
        self.pad_radius = pad;
        self
    }

    pub fn with_values(&self, values: Vec<f64>) -> Result<Self> {
        let mut g = GridField::new(
            self.origin.clone(),
            self.spacing,
            self.extents.clone(),
            values,
        )?;
        g.pad_radius = self.pad_radius;
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn pad_radius(&self) -> f64 {
        self.pad_radius
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coordinates of the node with flat index `i`.
    pub fn node(&self, mut i: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.dim];
        for k in (0..self.dim).rev() {
            let n = self.extents[k];
            x[k] = self.origin[k] + (i % n) as f64 * self.spacing;
            i /= n;
        }
        x
    }

    /// Largest angular frequency resolved along an axis, `pi / spacing`.
    pub fn nyquist(&self) -> f64 {
        PI / self.spacing
    }

    pub fn lp_norm(&self, p: f64) -> f64 {
        let vol = self.spacing.powi(self.dim as i32);
        if p.is_infinite() {
            coeff_norm(&self.values, p)
        } else {
            vol.powf(1.0 / p) * coeff_norm(&self.values, p)
        }
    }

    /// Largest modulus on the outer faces of the grid.
    pub fn boundary_max(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (i, v) in self.values.iter().enumerate() {
            let mut j = i;
            let mut on_face = false;
            for k in (0..self.dim).rev() {
                let n = self.extents[k];
                let idx = j % n;
                j /= n;
                if idx == 0 || idx == n - 1 {
                    on_face = true;
                    break;
                }
            }
            if on_face {
                m = m.max(v.abs());
            }
        }
        m
    }

    /// Fails with "increase pad" unless the boundary is below `tol` times the peak.
    pub fn check_decay(&self, tol: f64) -> Result<()> {
        let peak = coeff_norm(&self.values, f64::INFINITY);
        let edge = self.boundary_max();
        if edge > tol * peak {
            return Err(Error::IncreasePad {
                boundary: edge,
                limit: tol * peak,
            });
        }
        Ok(())
    }

    /// Physical angular frequency along an axis of length `n` for DFT index `m`.
    fn frequency(&self, m: usize, n: usize) -> f64 {
        let signed = if m <= n / 2 {
            m as f64
        } else {
            m as f64 - n as f64
        };
        2.0 * PI * signed / (n as f64 * self.spacing)
    }

    /// `|omega|` for every DFT coefficient, in storage order.
    fn frequency_norms(&self) -> Vec<f64> {
        let axes: Vec<Vec<f64>> = self
            .extents
            .iter()
            .map(|&n| (0..n).map(|m| self.frequency(m, n)).collect())
            .collect();
        (0..self.len())
            .map(|mut i| {
                let mut s = 0.0;
                for k in (0..self.dim).rev() {
                    let n = self.extents[k];
                    let w = axes[k][i % n];
                    s += w * w;
                    i /= n;
                }
                s.sqrt()
            })
            .collect()
    }

    /// Applies the radial Fourier multiplier `m(|omega|)`.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> f64) -> Result<GridField> {
        let mut data: Vec<Complex64> = self
            .values
            .iter()
            .map(|v| Complex64::new(*v, 0.0))
            .collect();
        fft_nd(&mut data, &self.extents, false);
        let norms = self.frequency_norms();
        let scale = 1.0 / self.len() as f64;
        for (c, w) in data.iter_mut().zip(&norms) {
            *c *= m(*w) * scale;
        }
        fft_nd(&mut data, &self.extents, true);
        self.with_values(data.iter().map(|c| c.re).collect())
    }

    /// DFT coefficients (unnormalized) with their `|omega|`.
    pub fn spectrum(&self) -> (Vec<Complex64>, Vec<f64>) {
        let mut data: Vec<Complex64> = self
            .values
            .iter()
            .map(|v| Complex64::new(*v, 0.0))
            .collect();
        fft_nd(&mut data, &self.extents, false);
        (data, self.frequency_norms())
    }

    /// Trigonometric interpolant of the samples at arbitrary points inside the grid.
    pub fn spectral_eval(&self, points: &[Vec<f64>]) -> Result<Vec<f64>> {
        for p in points {
            if p.len() != self.dim {
                return Err(Error::InvalidArgument("point has wrong dimension".into()));
            }
            for k in 0..self.dim {
                let hi = self.origin[k] + (self.extents[k] - 1) as f64 * self.spacing;
                if p[k] < self.origin[k] || p[k] > hi {
                    return Err(Error::InvalidArgument("point outside the grid".into()));
                }
            }
        }
        let (coef, _) = self.spectrum();
        let n_total = self.len() as f64;
        let out = points
            .par_iter()
            .map(|p| {
                // per-axis phase tables exp(i omega_m (x_k - origin_k))
                let tables: Vec<Vec<Complex64>> = (0..self.dim)
                    .map(|k| {
                        let n = self.extents[k];
                        let u = p[k] - self.origin[k];
                        (0..n)
                            .map(|m| {
                                // the Nyquist mode of an even axis is split symmetrically
                                if n % 2 == 0 && m == n / 2 {
                                    Complex64::new((self.frequency(m, n) * u).cos(), 0.0)
                                } else {
                                    Complex64::from_polar(1.0, self.frequency(m, n) * u)
                                }
                            })
                            .collect()
                    })
                    .collect();
                let mut s = Complex64::new(0.0, 0.0);
                for (i, c) in coef.iter().enumerate() {
                    let mut j = i;
                    let mut ph = Complex64::new(1.0, 0.0);
                    for k in (0..self.dim).rev() {
                        let n = self.extents[k];
                        ph *= tables[k][j % n];
                        j /= n;
                    }
                    s += c * ph;
                }
                s.re / n_total
            })
            .collect();
        Ok(out)
    }

    /// Value at the node nearest to `x` (exact when `x` is a node).
    pub fn nearest_node_value(&self, x: &[f64]) -> Result<f64> {
        let mut flat = 0usize;
        for k in 0..self.dim {
            let u = (x[k] - self.origin[k]) / self.spacing;
            let i = u.round();
            if i < 0.0 || i >= self.extents[k] as f64 {
                return Err(Error::InvalidArgument("point outside the grid".into()));
            }
            flat = flat * self.extents[k] + i as usize;
        }
        Ok(self.values[flat])
    }

    pub fn write_binary(&self, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        w.write_all(&(self.dim as u64).to_le_bytes())?;
        for n in &self.extents {
            w.write_all(&(*n as u64).to_le_bytes())?;
        }
        for o in &self.origin {
            w.write_all(&o.to_le_bytes())?;
        }
        w.write_all(&self.spacing.to_le_bytes())?;
        for v in &self.values {
            w.write_all(&v.to_le_bytes())?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn read_binary(path: &Path) -> Result<Self> {
        let mut bytes = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut bytes)?;
        let mut pos = 0usize;
        let mut take8 = |what: &str| -> Result<[u8; 8]> {
            let s = bytes
                .get(pos..pos + 8)
                .ok_or_else(|| Error::Parse(format!("truncated grid file ({what})")))?;
            pos += 8;
            Ok(s.try_into().unwrap())
        };
        let dim = u64::from_le_bytes(take8("dimension")?) as usize;
        if dim == 0 || dim > 8 {
            return Err(Error::Parse(format!("implausible grid dimension {dim}")));
        }
        let mut extents = Vec::with_capacity(dim);
        for _ in 0..dim {
            extents.push(u64::from_le_bytes(take8("extents")?) as usize);
        }
        let mut origin = Vec::with_capacity(dim);
        for _ in 0..dim {
            origin.push(f64::from_le_bytes(take8("origin")?));
        }
        let spacing = f64::from_le_bytes(take8("spacing")?);
        let count = extents
            .iter()
            .try_fold(1usize, |a, n| a.checked_mul(*n))
            .ok_or_else(|| Error::Parse("grid too large".into()))?;
        let mut values = Vec::with_capacity(count.min(1 << 28));
        for _ in 0..count {
            values.push(f64::from_le_bytes(take8("values")?));
        }
        if pos != bytes.len() {
            return Err(Error::Parse("trailing bytes after grid values".into()));
        }
        GridField::new(origin, spacing, extents, values)
    }
}

/// In-place d-dimensional FFT over a row-major array (unnormalized both ways).
fn fft_nd(data: &mut [Complex64], extents: &[usize], inverse: bool) {
    let mut planner = FftPlanner::new();
    let d = extents.len();
    for axis in 0..d {
        let n = extents[axis];
        let fft = if inverse {
            planner.plan_fft_inverse(n)
        } else {
            planner.plan_fft_forward(n)
        };
        let stride: usize = extents[axis + 1..].iter().product();
        if stride == 1 {
            data.par_chunks_mut(n).for_each(|line| fft.process(line));
            continue;
        }
        let block = n * stride;
        data.par_chunks_mut(block).for_each(|chunk| {
            let mut line = vec![Complex64::new(0.0, 0.0); n];
            for off in 0..stride {
                for m in 0..n {
                    line[m] = chunk[off + m * stride];
                }
                fft.process(&mut line);
                for m in 0..n {
                    chunk[off + m * stride] = line[m];
                }
            }
        });
    }
}

/// `||f||_{k,p}`: multiply the spectrum by `(1 + |omega|^2)^{k/2}` and take the discrete
/// `L^p` norm of the result.
pub fn sobolev_norm(field: &GridField, spec: NormSpec) -> Result<f64> {
    field.check_decay(TAIL_TOL)?;
    if spec.k == 0.0 {
        return Ok(field.lp_norm(spec.p));
    }
    let k = spec.k;
    Ok(field
        .apply_multiplier(|w| (1.0 + w * w).powf(k / 2.0))?
        .lp_norm(spec.p))
}

/// Radius beyond which `|Phi| < tol Phi(0)`.
pub fn decay_radius(profile: &RadialProfile, tol: f64) -> Result<f64> {
    let peak = profile.space_eval(0.0)?.abs();
    let mut r = 1.0;
    while profile.space_eval(r)?.abs() >= tol * peak {
        r *= 2.0;
        if r > 1e6 {
            return Err(Error::Precondition("profile does not decay".into()));
        }
    }
    let (mut lo, mut hi) = (r / 2.0, r);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if profile.space_eval(mid)?.abs() >= tol * peak {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(hi)
}

/// Grid layout covering the centers' domain padded by `pad` on every side, with the
/// lower corner of the domain on a node.
#[derive(Debug, Clone, PartialEq)]
pub struct GridLayout {
    pub origin: Vec<f64>,
    pub spacing: f64,
    pub extents: Vec<usize>,
}

impl GridLayout {
    pub fn around(centers: &PointSet, spacing: f64, pad: f64, budget: usize) -> Result<Self> {
        if !(spacing > 0.0 && pad >= 0.0) {
            return Err(Error::InvalidArgument(
                "spacing must be positive and pad non-negative".into(),
            ));
        }
        let dom = centers.domain();
        let d = centers.dim();
        let steps = (pad / spacing).ceil();
        let mut origin = Vec::with_capacity(d);
        let mut extents = Vec::with_capacity(d);
        for k in 0..d {
            origin.push(dom.lo[k] - steps * spacing);
            let inner = ((dom.hi[k] - dom.lo[k]) / spacing - 1e-9).ceil().max(0.0);
            extents.push((inner + 2.0 * steps) as usize + 1);
        }
        let nodes = extents
            .iter()
            .try_fold(1usize, |a, n| a.checked_mul(*n))
            .unwrap_or(usize::MAX);
        if nodes > budget {
            let factor = (nodes as f64 / budget as f64).powf(1.0 / d as f64);
            return Err(Error::GridBudget {
                nodes,
                budget,
                suggested_spacing: spacing * factor * 1.01,
            });
        }
        Ok(GridLayout {
            origin,
            spacing,
            extents,
        })
    }

    pub fn len(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Per-center samples of `Phi(. - xi_j)` on a fixed layout, so that many coefficient
/// vectors can be synthesized without re-evaluating `Phi`.
pub struct GridBasis {
    layout: GridLayout,
    pad: f64,
    rows: Vec<Vec<f64>>,
}

impl GridBasis {
    pub fn new(
        centers: &PointSet,
        profile: &RadialProfile,
        layout: GridLayout,
        pad: f64,
    ) -> Result<Self> {
        let shape = GridField::new(
            layout.origin.clone(),
            layout.spacing,
            layout.extents.clone(),
            vec![0.0; layout.len()],
        )?;
        let rows = centers
            .points()
            .collect::<Vec<_>>()
            .par_iter()
            .map(|c| {
                (0..shape.len())
                    .map(|i| profile.space_eval(dist(&shape.node(i), c)))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(GridBasis { layout, pad, rows })
    }

    pub fn layout(&self) -> &GridLayout {
        &self.layout
    }

    /// Samples of each translate, one row per center.
    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn synthesize(&self, coeffs: &[f64]) -> Result<GridField> {
        if coeffs.len() != self.rows.len() {
            return Err(Error::InvalidArgument(
                "coefficient count does not match the basis".into(),
            ));
        }
        let n = self.layout.len();
        let values: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|i| {
                coeffs
                    .iter()
                    .zip(&self.rows)
                    .map(|(a, row)| a * row[i])
                    .sum()
            })
            .collect();
        Ok(GridField::new(
            self.layout.origin.clone(),
            self.layout.spacing,
            self.layout.extents.clone(),
            values,
        )?
        .with_pad_radius(self.pad))
    }
}

/// Samples the network on a grid padded by `pad` around its centers' domain.
pub fn sample_to_grid(net: &RbfNetwork, spacing: f64, pad: f64) -> Result<GridField> {
    sample_to_grid_with_budget(net, spacing, pad, GRID_BUDGET)
}

pub fn sample_to_grid_with_budget(
    net: &RbfNetwork,
    spacing: f64,
    pad: f64,
    budget: usize,
) -> Result<GridField> {
    let layout = GridLayout::around(net.centers(), spacing, pad, budget)?;
    let field = GridField::from_fn(
        layout.origin.clone(),
        layout.spacing,
        layout.extents.clone(),
        |x| net.evaluate(x).unwrap_or(f64::NAN),
    )?;
    Ok(field.with_pad_radius(pad))
}

/// Picks `pad` from the profile's decay radius and enlarges it until the sampled
/// field passes the boundary decay check.
pub fn sample_to_grid_auto(net: &RbfNetwork, spacing: f64) -> Result<GridField> {
    let mut pad = decay_radius(net.profile(), 1e-8)?;
    for _ in 0..6 {
        let field = sample_to_grid(net, spacing, pad)?;
        match field.check_decay(TAIL_TOL) {
            Ok(()) => return Ok(field),
            Err(Error::IncreasePad { .. }) => pad *= 1.5,
            Err(e) => return Err(e),
        }
    }
    Err(Error::IncreasePad {
        boundary: f64::NAN,
        limit: TAIL_TOL,
    })
}

/// Grid resolution and padding rule relative to the separation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridRule {
    /// Grid spacing is `q / divisor`.
    pub divisor: f64,
    /// Initial pad is the radius where `|Phi| < pad_tol Phi(0)`.
    pub pad_tol: f64,
    pub budget: usize,
}

impl Default for GridRule {
    fn default() -> Self {
        GridRule {
            divisor: 8.0,
            pad_tol: 1e-8,
            budget: GRID_BUDGET,
        }
    }
}

impl GridRule {
    pub fn spacing(&self, q: f64) -> f64 {
        q / self.divisor
    }
}

/// Largest cached basis, in stored samples.
const BASIS_CACHE_LIMIT: usize = 1 << 25;

/// Synthesizes networks over fixed centers on a grid, enlarging the pad whenever a
/// field fails the boundary decay check.
pub struct AdaptiveSampler {
    centers: PointSet,
    profile: RadialProfile,
    spacing: f64,
    pad: f64,
    budget: usize,
    basis: Option<GridBasis>,
}

impl AdaptiveSampler {
    pub fn new(
        centers: &PointSet,
        profile: &RadialProfile,
        spacing: f64,
        rule: &GridRule,
    ) -> Result<Self> {
        let pad = decay_radius(profile, rule.pad_tol)?;
        let mut s = AdaptiveSampler {
            centers: centers.clone(),
            profile: profile.clone(),
            spacing,
            pad,
            budget: rule.budget,
            basis: None,
        };
        s.rebuild()?;
        Ok(s)
    }

    fn rebuild(&mut self) -> Result<()> {
        let layout = GridLayout::around(&self.centers, self.spacing, self.pad, self.budget)?;
        self.basis = if layout.len().saturating_mul(self.centers.len()) <= BASIS_CACHE_LIMIT {
            Some(GridBasis::new(
                &self.centers,
                &self.profile,
                layout,
                self.pad,
            )?)
        } else {
            None
        };
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn pad(&self) -> f64 {
        self.pad
    }

    pub fn field(&mut self, coeffs: &[f64]) -> Result<GridField> {
        for _ in 0..6 {
            let f = match &self.basis {
                Some(b) => b.synthesize(coeffs)?,
                None => {
                    let net = RbfNetwork::new(
                        self.centers.clone(),
                        coeffs.to_vec(),
                        self.profile.clone(),
                    )?;
                    sample_to_grid_with_budget(&net, self.spacing, self.pad, self.budget)?
                }
            };
            match f.check_decay(TAIL_TOL) {
                Ok(()) => return Ok(f),
                Err(Error::IncreasePad { .. }) => {
                    self.pad *= 1.5;
                    self.rebuild()?;
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::IncreasePad {
            boundary: f64::NAN,
            limit: TAIL_TOL,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rbf::sobolev_spline;

    fn gaussian_grid(n: usize, h: f64) -> GridField {
        let lo = -(n as f64 - 1.0) / 2.0 * h;
        GridField::from_fn(vec![lo], h, vec![n], |x| (-0.5 * x[0] * x[0]).exp()).unwrap()
    }

    #[test]
    fn coefficient_norms() {
        assert_eq!(coeff_norm(&[3.0, 4.0], 2.0), 5.0);
        assert_eq!(coeff_norm(&[3.0, -4.0], f64::INFINITY), 4.0);
        let a = [0.5, -1.5, 2.0, -0.25];
        assert_eq!(
            coeff_norm(&a, 1.0),
            a.iter().map(|v: &f64| v.abs()).sum::<f64>()
        );
        assert!(
            (coeff_norm(&a, 3.0) - (0.125f64 + 3.375 + 8.0 + 0.015625).powf(1.0 / 3.0)).abs()
                < 1e-15
        );
    }

    #[test]
    fn conjugate_exponents() {
        assert_eq!(conjugate(1.0), f64::INFINITY);
        assert_eq!(conjugate(2.0), 2.0);
        assert_eq!(conjugate(f64::INFINITY), 1.0);
        assert_eq!(parse_exponent("inf").unwrap(), f64::INFINITY);
        assert!(parse_exponent("0.5").is_err());
    }

    #[test]
    fn gaussian_sobolev_norm_matches_frequency_quadrature() {
        // ||g||_{2,2}^2 = \int (1 + w^2)^2 e^{-w^2} dw for g = e^{-x^2/2}, g^ = e^{-w^2/2}
        let f = gaussian_grid(1024, 0.05);
        let got = sobolev_norm(&f, NormSpec::new(2.0, 2.0).unwrap()).unwrap();
        let rule = crate::quad::GaussLegendre::new(20);
        let mut s = 0.0;
        for i in 0..400 {
            let a = -20.0 + 0.1 * i as f64;
            s += rule.integrate(|w| (1.0 + w * w).powi(2) * (-w * w).exp(), a, a + 0.1);
        }
        assert!(
            (got - s.sqrt()).abs() < 1e-4 * s.sqrt(),
            "{got} vs {}",
            s.sqrt()
        );
        let n0 = sobolev_norm(&f, NormSpec::new(0.0, 2.0).unwrap()).unwrap();
        let n1 = sobolev_norm(&f, NormSpec::new(1.0, 2.0).unwrap()).unwrap();
        assert!(got >= n1 && n1 >= n0);
        assert_eq!(n0, f.lp_norm(2.0));
    }

    #[test]
    fn multiplier_identity_and_two_dimensional_fft() {
        let f = GridField::from_fn(vec![-6.0, -5.0], 0.125, vec![96, 80], |x| {
            (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp()
        })
        .unwrap();
        let same = f.apply_multiplier(|_| 1.0).unwrap();
        for (a, b) in f.values().iter().zip(same.values()) {
            assert!((a - b).abs() < 1e-14);
        }
        // Laplacian-type multiplier against the analytic second derivatives
        let lap = f.apply_multiplier(|w| -w * w).unwrap();
        for i in (0..f.len()).step_by(97) {
            let x = f.node(i);
            let g = (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp();
            let want = g * ((4.0 * x[0] * x[0] - 2.0) + (16.0 * x[1] * x[1] - 4.0));
            assert!((lap.values()[i] - want).abs() < 1e-9, "node {i}");
        }
    }

    #[test]
    fn spectral_interpolation_is_exact_on_band_limited_data() {
        let f = gaussian_grid(256, 0.1);
        let pts: Vec<Vec<f64>> = vec![vec![0.013], vec![-1.377], vec![2.5]];
        let got = f.spectral_eval(&pts).unwrap();
        for (p, v) in pts.iter().zip(got) {
            assert!((v - (-0.5 * p[0] * p[0]).exp()).abs() < 1e-12);
        }
        assert_eq!(f.nearest_node_value(&f.node(17)).unwrap(), f.values()[17]);
    }

    #[test]
    fn network_evaluation_and_sampling() {
        let p = sobolev_spline(3.0, 1).unwrap();
        let ps = PointSet::from_1d(&[-1.0, 1.0]).unwrap();
        let net = RbfNetwork::new(ps.clone(), vec![1.0, 1.0], p.clone()).unwrap();
        let v = net.evaluate(&[0.0]).unwrap();
        let terms = p.space_eval(1.0).unwrap() + p.space_eval(1.0).unwrap();
        assert_eq!(v, terms);
        assert_eq!(
            net.with_coeffs(vec![2.0, 2.0])
                .unwrap()
                .evaluate(&[0.3])
                .unwrap(),
            2.0 * net.evaluate(&[0.3]).unwrap()
        );
        let zero = net.with_coeffs(vec![0.0, 0.0]).unwrap();
        let g = sample_to_grid(&zero, 0.05, 3.0).unwrap();
        assert!(g.values().iter().all(|v| *v == 0.0));
        let g = sample_to_grid_auto(&net, 0.05).unwrap();
        let basis = GridBasis::new(
            &ps,
            &p,
            GridLayout::around(&ps, 0.05, g.pad_radius(), GRID_BUDGET).unwrap(),
            g.pad_radius(),
        )
        .unwrap();
        let h = basis.synthesize(&[1.0, 1.0]).unwrap();
        assert_eq!(g.values(), h.values());
        let err = sample_to_grid_with_budget(&net, 1e-3, 30.0, 1000).unwrap_err();
        assert!(matches!(err, Error::GridBudget { .. }));
    }

    #[test]
    fn undecayed_field_is_rejected() {
        let f = GridField::from_fn(vec![0.0], 0.1, vec![50], |_| 1.0).unwrap();
        assert!(matches!(
            sobolev_norm(&f, NormSpec::new(1.0, 2.0).unwrap()),
            Err(Error::IncreasePad { .. })
        ));
    }

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.bin");
        let f =
            GridField::from_fn(vec![-1.0, 2.0], 0.25, vec![5, 3], |x| x[0] * 10.0 + x[1]).unwrap();
        f.write_binary(&path).unwrap();
        assert_eq!(GridField::read_binary(&path).unwrap(), f);
        std::fs::write(&path, [1u8, 0, 0]).unwrap();
        assert!(GridField::read_binary(&path).is_err());
    }
}
