//! Point sets, separation radius, fill distance and the packing-sum bound.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned box `[lo, hi]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Domain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(Error::InvalidArgument(
                "domain corners must have equal, positive length".into(),
            ));
        }
        if lo
            .iter()
            .zip(&hi)
            .any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite())
        {
            return Err(Error::EmptyDomain);
        }
        Ok(Domain { lo, hi })
    }

    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (a, b))| *v >= *a && *v <= *b)
    }

    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| (b - a) * (b - a))
            .sum::<f64>()
            .sqrt()
    }

    fn mapped(&self, f: impl Fn(f64) -> f64) -> Domain {
        Domain {
            lo: self.lo.iter().map(|v| f(*v)).collect(),
            hi: self.hi.iter().map(|v| f(*v)).collect(),
        }
    }
}

/// Finite set of distinct points inside a box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    dim: usize,
    coords: Vec<f64>,
    domain: Domain,
}

impl PointSet {
    pub fn new(points: Vec<Vec<f64>>, domain: Domain) -> Result<Self> {
        let dim = domain.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidArgument(format!(
                    "point {i} has {} coordinates, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(format!("point {i} is not finite")));
            }
            if !domain.contains(p) {
                return Err(Error::InvalidArgument(format!(
                    "point {i} lies outside the domain"
                )));
            }
            coords.extend_from_slice(p);
        }
        let ps = PointSet {
            dim,
            coords,
            domain,
        };
        ps.check_distinct()?;
        Ok(ps)
    }

    /// Points on a line, with the domain spanning them.
    pub fn from_1d(xs: &[f64]) -> Result<Self> {
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let domain = if xs.len() >= 2 && lo < hi {
            Domain::new(vec![lo], vec![hi])?
        } else {
            Domain::new(vec![lo - 1.0], vec![hi + 1.0])?
        };
        Self::new(xs.iter().map(|x| vec![*x]).collect(), domain)
    }

    fn check_distinct(&self) -> Result<()> {
        let mut idx: Vec<usize> = (0..self.len()).collect();
        idx.sort_by(|a, b| {
            self.point(*a)
                .iter()
                .zip(self.point(*b))
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        for w in idx.windows(2) {
            if self.point(w[0]) == self.point(w[1]) {
                return Err(Error::InvalidArgument(format!(
                    "points {} and {} coincide",
                    w[0], w[1]
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn dist(&self, i: usize, j: usize) -> f64 {
        dist(self.point(i), self.point(j))
    }

    /// `lambda * X`, domain scaled alike.
    pub fn dilate(&self, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "dilation factor must be positive, got {lambda}"
            )));
        }
        Ok(PointSet {
            dim: self.dim,
            coords: self.coords.iter().map(|v| v * lambda).collect(),
            domain: self.domain.mapped(|v| v * lambda),
        })
    }

    pub fn translate(&self, shift: &[f64]) -> Result<Self> {
        if shift.len() != self.dim {
            return Err(Error::InvalidArgument("shift has wrong dimension".into()));
        }
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| p.iter().zip(shift).map(|(a, b)| a + b))
            .collect();
        let domain = Domain {
            lo: self
                .domain
                .lo
                .iter()
                .zip(shift)
                .map(|(a, b)| a + b)
                .collect(),
            hi: self
                .domain
                .hi
                .iter()
                .zip(shift)
                .map(|(a, b)| a + b)
                .collect(),
        };
        Ok(PointSet {
            dim: self.dim,
            coords,
            domain,
        })
    }

    /// `true` when every point of `self` also belongs to `other` (bitwise equal coordinates).
    pub fn is_subset_of(&self, other: &PointSet) -> bool {
        let mut theirs: Vec<Vec<u64>> = other
            .points()
            .map(|p| p.iter().map(|v| v.to_bits()).collect())
            .collect();
        theirs.sort();
        self.points().all(|p| {
            let key: Vec<u64> = p.iter().map(|v| v.to_bits()).collect();
            theirs.binary_search(&key).is_ok()
        })
    }

    pub fn separation_radius(&self) -> Result<f64> {
        if self.len() < 2 {
            return Err(Error::SeparationUndefined(self.len()));
        }
        let n = self.len();
        let min = (0..n - 1)
            .into_par_iter()
            .map(|i| {
                ((i + 1)..n)
                    .map(|j| self.dist(i, j))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min);
        Ok(0.5 * min)
    }

    /// Fill distance over a grid of `density` nodes per axis spanning the domain;
    /// it approximates the true value from below.
    pub fn fill_distance(&self, density: usize) -> Result<f64> {
        if self.is_empty() {
            return Err(Error::InvalidArgument(
                "fill distance of an empty set".into(),
            ));
        }
        if density < 2 {
            return Err(Error::InvalidArgument(
                "candidate density must be at least 2".into(),
            ));
        }
        let d = self.dim;
        let total = density
            .checked_pow(d as u32)
            .ok_or_else(|| Error::InvalidArgument("candidate grid too large".into()))?;
        let h = (0..total)
            .into_par_iter()
            .map(|mut flat| {
                let mut x = vec![0.0; d];
                for (k, xk) in x.iter_mut().enumerate() {
                    let i = flat % density;
                    flat /= density;
                    let (a, b) = (self.domain.lo[k], self.domain.hi[k]);
                    *xk = a + (b - a) * i as f64 / (density - 1) as f64;
                }
                self.points()
                    .map(|p| dist(p, &x))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| 0.0, f64::max);
        Ok(h)
    }

    pub fn read_text(path: &Path) -> Result<Self> {
        Self::parse_text(&std::fs::read_to_string(path)?)
    }

    /// Parses `d N`, an optional `# domain lo.. hi..` line, then `N` rows of coordinates.
    /// Without a domain line the bounding box of the points is used.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty point file".into()))?;
        let nums = parse_floats(header)?;
        if nums.len() != 2
            || nums[0] < 1.0
            || nums[0].fract() != 0.0
            || nums[1].fract() != 0.0
            || nums[1] < 0.0
        {
            return Err(Error::Parse(format!(
                "bad header line `{header}`, expected `d N`"
            )));
        }
        let (d, n) = (nums[0] as usize, nums[1] as usize);
        let mut domain = None;
        let mut pts = Vec::with_capacity(n);
        for line in lines {
            if let Some(rest) = line.strip_prefix('#') {
                let rest = rest.trim();
                if let Some(vals) = rest.strip_prefix("domain") {
                    let v = parse_floats(vals)?;
                    if v.len() != 2 * d {
                        return Err(Error::Parse(format!("domain line needs {} numbers", 2 * d)));
                    }
                    domain = Some(Domain::new(v[..d].to_vec(), v[d..].to_vec())?);
                }
                continue;
            }
            let p = parse_floats(line)?;
            if p.len() != d {
                return Err(Error::Parse(format!(
                    "expected {d} coordinates in `{line}`"
                )));
            }
            pts.push(p);
        }
        if pts.len() != n {
            return Err(Error::Parse(format!(
                "header announces {n} points, found {}",
                pts.len()
            )));
        }
        let domain = match domain {
            Some(b) => b,
            None => bounding_box(d, &pts)?,
        };
        Self::new(pts, domain)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n# domain", self.dim, self.len());
        for v in self.domain.lo.iter().chain(&self.domain.hi) {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|v| v.to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }

    pub fn write_text(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_text())?;
        Ok(())
    }
}

fn parse_floats(s: &str) -> Result<Vec<f64>> {
    s.split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .map_err(|_| Error::Parse(format!("not a number: `{t}`")))
        })
        .collect()
}

fn bounding_box(d: usize, pts: &[Vec<f64>]) -> Result<Domain> {
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in pts {
        for k in 0..d {
            lo[k] = lo[k].min(p[k]);
            hi[k] = hi[k].max(p[k]);
        }
    }
    for k in 0..d {
        if !(lo[k] < hi[k]) {
            return Err(Error::EmptyDomain);
        }
    }
    Domain::new(lo, hi)
}

#[inline]
pub fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub q: f64,
    pub h: f64,
    pub rho: f64,
    pub candidate_density: usize,
}

pub fn geometry_report(ps: &PointSet, candidate_density: usize) -> Result<GeometryReport> {
    let q = ps.separation_radius()?;
    let h = ps.fill_distance(candidate_density)?;
    Ok(GeometryReport {
        q,
        h,
        rho: h / q,
        candidate_density,
    })
}

/// Grid of spacing `spacing` anchored at the lower domain corner, each node moved by an
/// independent uniform offset of sup-norm at most `jitter` and clamped to the domain.
pub fn gen_quasi_uniform(
    domain: &Domain,
    spacing: f64,
    jitter: f64,
    seed: u64,
) -> Result<PointSet> {
    if !(spacing > 0.0 && spacing.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "spacing must be positive, got {spacing}"
        )));
    }
    if !(jitter >= 0.0 && jitter < spacing / 2.0) {
        return Err(Error::InvalidArgument(format!(
            "jitter {jitter} must lie in [0, spacing/2) to keep points separated"
        )));
    }
    let d = domain.dim();
    let counts: Vec<usize> = (0..d)
        .map(|k| {
            ((domain.hi[k] - domain.lo[k]) / spacing * (1.0 + 1e-12) + 1e-9).floor() as usize + 1
        })
        .collect();
    let total: usize = counts.iter().product();
    if total == 0 {
        return Err(Error::InvalidArgument("empty grid".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(total);
    for mut flat in 0..total {
        let mut p = vec![0.0; d];
        for k in 0..d {
            let i = flat % counts[k];
            flat /= counts[k];
            let node = (domain.lo[k] + i as f64 * spacing).min(domain.hi[k]);
            let off = if jitter > 0.0 {
                rng.random_range(-jitter..=jitter)
            } else {
                0.0
            };
            p[k] = (node + off).clamp(domain.lo[k], domain.hi[k]);
        }
        pts.push(p);
    }
    PointSet::new(pts, domain.clone())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PackingCheck {
    pub sum: f64,
    pub bound: f64,
    pub ok: bool,
}

/// `sum_j C |y_j|^{-d-eps}` against `3^d (1 + 1/eps) C q^{-d-eps}`.
pub fn packing_sum_check(
    ps: &PointSet,
    q: f64,
    decay_constant: f64,
    epsilon: f64,
) -> Result<PackingCheck> {
    if !(q > 0.0 && decay_constant > 0.0 && epsilon > 0.0) {
        return Err(Error::InvalidArgument(
            "q, C and epsilon must be positive".into(),
        ));
    }
    let d = ps.dim() as f64;
    let origin = vec![0.0; ps.dim()];
    let mut sum = 0.0;
    for (j, y) in ps.points().enumerate() {
        let r = dist(y, &origin);
        if r < q {
            return Err(Error::Precondition(format!(
                "point {j} lies within q = {q} of the origin (|y| = {r})"
            )));
        }
        sum += decay_constant * r.powf(-d - epsilon);
    }
    let bound = 3f64.powf(d) * (1.0 + 1.0 / epsilon) * decay_constant * q.powf(-d - epsilon);
    Ok(PackingCheck {
        sum,
        bound,
        ok: sum <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_q(ps: &PointSet) -> f64 {
        let mut m = f64::INFINITY;
        for i in 0..ps.len() {
            for j in 0..ps.len() {
                if i != j {
                    m = m.min(ps.dist(i, j));
                }
            }
        }
        m / 2.0
    }

    #[test]
    fn uniform_line() {
        let ps = PointSet::new(
            vec![vec![0.0], vec![1.0], vec![2.0]],
            Domain::cube(1, 0.0, 2.0).unwrap(),
        )
        .unwrap();
        let r = geometry_report(&ps, 100).unwrap();
        assert_eq!(r.q, 0.5);
        assert!(r.h <= 0.5 && r.h > 0.5 - 2.0 * 2.0 / 100.0);
        assert_eq!(geometry_report(&ps, 101).unwrap().h, 0.5);
        assert_eq!(r.rho, r.h / r.q);
        let two = PointSet::new(
            vec![vec![0.0], vec![3.0]],
            Domain::cube(1, 0.0, 3.0).unwrap(),
        )
        .unwrap();
        let r = geometry_report(&two, 101).unwrap();
        assert_eq!((r.q, r.h), (1.5, 1.5));
    }

    #[test]
    fn random_square_against_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts: Vec<Vec<f64>> = (0..50)
            .map(|_| vec![rng.random::<f64>(), rng.random::<f64>()])
            .collect();
        let ps = PointSet::new(pts, Domain::cube(2, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(ps.separation_radius().unwrap(), brute_q(&ps));
        let density = 60;
        let h = ps.fill_distance(density).unwrap();
        let oracle = ps.fill_distance(400).unwrap();
        let diam = ps.domain().diameter();
        assert!((h - oracle).abs() <= 2.0 * diam / density as f64);
    }

    #[test]
    fn generator_grid_and_jitter() {
        let dom = Domain::cube(1, 0.0, 1.0).unwrap();
        let ps = gen_quasi_uniform(&dom, 0.25, 0.0, 1).unwrap();
        let xs: Vec<f64> = ps.points().map(|p| p[0]).collect();
        assert_eq!(xs, vec![0.0, 0.25, 0.5, 0.75, 1.0]);
        assert_eq!(ps.separation_radius().unwrap(), 0.125);
        for seed in 0..20 {
            let ps = gen_quasi_uniform(&dom, 0.25, 0.0625, seed).unwrap();
            let r = geometry_report(&ps, 2000).unwrap();
            assert!(r.q >= 0.0625 && r.rho <= 4.0, "seed {seed}: {r:?}");
            assert_eq!(ps, gen_quasi_uniform(&dom, 0.25, 0.0625, seed).unwrap());
        }
        assert!(gen_quasi_uniform(&dom, 0.25, 0.125, 0).is_err());
    }

    #[test]
    fn packing_sum_on_symmetric_line() {
        let n = 2000;
        let pts: Vec<Vec<f64>> = (1..=n)
            .flat_map(|m| [vec![m as f64], vec![-(m as f64)]])
            .collect();
        let ps = PointSet::new(pts, Domain::cube(1, -(n as f64), n as f64).unwrap()).unwrap();
        let c = packing_sum_check(&ps, 0.5, 1.0, 1.0).unwrap();
        let direct: f64 = 2.0 * (1..=n).map(|m| 1.0 / (m as f64 * m as f64)).sum::<f64>();
        assert!((c.sum - direct).abs() < 1e-12);
        assert!((c.sum - PI2_OVER_3).abs() < 1e-3);
        assert_eq!(c.bound, 24.0);
        assert!(c.ok);
        let empty = PointSet::new(vec![], Domain::cube(1, -1.0, 1.0).unwrap()).unwrap();
        let c = packing_sum_check(&empty, 0.5, 1.0, 1.0).unwrap();
        assert_eq!((c.sum, c.ok), (0.0, true));
        let near = PointSet::from_1d(&[0.1, 2.0]).unwrap();
        assert!(matches!(
            packing_sum_check(&near, 0.5, 1.0, 1.0),
            Err(Error::Precondition(_))
        ));
    }

    const PI2_OVER_3: f64 = std::f64::consts::PI * std::f64::consts::PI / 3.0;

    #[test]
    fn text_round_trip_and_errors() {
        let ps = gen_quasi_uniform(&Domain::cube(2, -1.0, 1.0).unwrap(), 0.5, 0.1, 9).unwrap();
        let back = PointSet::parse_text(&ps.to_text()).unwrap();
        assert_eq!(ps, back);
        assert!(PointSet::parse_text("1 2\n0.0\n").is_err());
        assert!(PointSet::parse_text("1 2\n0.0\n0.0\n").is_err());
        assert!(PointSet::parse_text("2 1\n0.0 x\n").is_err());
        let r = PointSet::parse_text("1 1\n0.5\n");
        assert!(matches!(r, Err(Error::EmptyDomain)));
        assert!(matches!(
            PointSet::from_1d(&[1.0]).unwrap().separation_radius(),
            Err(Error::SeparationUndefined(1))
        ));
    }
}
