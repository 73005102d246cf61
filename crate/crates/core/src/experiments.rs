//! Config-driven sweeps: stability, the Bernstein chain and the inverse-theorem demo.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::bandlimit::{approx_ratio, bernstein_ratio, bl_bernstein_check, rate_fit, RateFit};
use crate::coeffs::{candidates, draw_seed, random_draw};
use crate::error::{Error, Result};
use crate::geometry::{gen_quasi_uniform, geometry_report, Domain, GeometryReport, PointSet};
use crate::hankel::HankelSpec;
use crate::kernels::{make_kernel, KernelClass, KernelProfile};
use crate::network::{
    coeff_norm, conjugate, decay_radius, parse_exponent, sobolev_norm, AdaptiveSampler, GridBasis,
    GridField, GridLayout, GridRule, NormSpec, GRID_BUDGET,
};
use crate::rbf::{sobolev_spline, RadialProfile};
use crate::report::{Cell, Contract, Report, Table};
use crate::stability::{find_sigma0, inverse_norm_check};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TolProfile {
    Fast,
    Strict,
}

impl TolProfile {
    pub fn hankel(self) -> HankelSpec {
        match self {
            TolProfile::Fast => HankelSpec::fast(),
            TolProfile::Strict => HankelSpec::default(),
        }
    }
}

impl std::str::FromStr for TolProfile {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fast" => Ok(TolProfile::Fast),
            "strict" => Ok(TolProfile::Strict),
            _ => Err(Error::Parse(format!(
                "unknown tolerance profile `{s}` (expected fast or strict)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InverseTarget {
    /// A Sobolev spline of order `target_beta` centered at the origin.
    Smooth,
    /// A seeded network on the coarsest center set.
    InSpace,
}

impl std::str::FromStr for InverseTarget {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(InverseTarget::Smooth),
            "in-space" => Ok(InverseTarget::InSpace),
            _ => Err(Error::Parse(format!(
                "unknown target `{s}` (expected smooth or in-space)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dim: usize,
    pub beta: f64,
    pub k: f64,
    pub p: f64,
    pub levels: usize,
    /// The coarsest level has `q = 2^-coarsest` (sweeps) or spacing `2^-(coarsest+1)`
    /// (inverse run).
    pub coarsest: u32,
    pub trials: usize,
    pub seed: u64,
    /// Node perturbation as a fraction of the lattice spacing, below 1/2.
    pub jitter: f64,
    pub divisor: f64,
    pub pad_tol: f64,
    pub k1_glue: (f64, f64),
    pub k2_glue: (f64, f64),
    pub tol_profile: TolProfile,
    pub target: InverseTarget,
    pub target_beta: f64,
    pub rate: f64,
    pub half_width: f64,
    pub rho_max: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            dim: 1,
            beta: 3.0,
            k: 1.0,
            p: 2.0,
            levels: 4,
            coarsest: 2,
            trials: 16,
            seed: 7,
            jitter: 0.0,
            divisor: 8.0,
            pad_tol: 1e-8,
            k1_glue: (1.0, 3.0),
            k2_glue: (0.5, 1.0),
            tol_profile: TolProfile::Strict,
            target: InverseTarget::Smooth,
            target_beta: 5.0,
            rate: 2.0,
            half_width: 20.0,
            rho_max: 1.0,
        }
    }
}

fn fmt_exp(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        p.to_string()
    }
}

fn parse_pair(s: &str) -> Result<(f64, f64)> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    match v.as_slice() {
        [a, b] => Ok((parse_f64(a)?, parse_f64(b)?)),
        _ => Err(Error::Parse(format!("expected `a,b`, got `{s}`"))),
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad number `{s}`")))
}

fn parse_int<T: std::str::FromStr>(s: &str) -> Result<T> {
    s.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer `{s}`")))
}

impl ExperimentConfig {
    /// Defaults with the command's coarsest level: `stability` starts at `q = 2^-5`,
    /// `bernstein` at `2^-2`, `inverse` at spacing `1/2`.
    pub fn for_command(command: &str) -> Self {
        let coarsest = match command {
            "stability" => 5,
            "inverse" => 0,
            _ => 2,
        };
        ExperimentConfig {
            coarsest,
            ..Self::default()
        }
    }

    /// Sets one `key = value` entry; keys are the long CLI flag names.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key.trim().replace('_', "-").as_str() {
            "dim" => self.dim = parse_int(value)?,
            "beta" => self.beta = parse_f64(value)?,
            "k" => self.k = parse_f64(value)?,
            "p" => self.p = parse_exponent(value.trim())?,
            "levels" => self.levels = parse_int(value)?,
            "coarsest" => self.coarsest = parse_int(value)?,
            "trials" => self.trials = parse_int(value)?,
            "seed" => self.seed = parse_int(value)?,
            "jitter" => self.jitter = parse_f64(value)?,
            "divisor" => self.divisor = parse_f64(value)?,
            "pad-tol" => self.pad_tol = parse_f64(value)?,
            "k1-glue" => self.k1_glue = parse_pair(value)?,
            "k2-glue" => self.k2_glue = parse_pair(value)?,
            "tol-profile" => self.tol_profile = value.trim().parse()?,
            "target" => self.target = value.trim().parse()?,
            "target-beta" => self.target_beta = parse_f64(value)?,
            "rate" => self.rate = parse_f64(value)?,
            "half-width" => self.half_width = parse_f64(value)?,
            "rho-max" => self.rho_max = parse_f64(value)?,
            other => return Err(Error::Parse(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    /// Applies a flat `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected key = value", i + 1))
            })?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        self.apply_text(&std::fs::read_to_string(path)?)
    }

    pub fn to_pairs(&self) -> BTreeMap<String, String> {
        let pair = |(a, b): (f64, f64)| format!("{a},{b}");
        let target = match self.target {
            InverseTarget::Smooth => "smooth",
            InverseTarget::InSpace => "in-space",
        };
        let tol = match self.tol_profile {
            TolProfile::Fast => "fast",
            TolProfile::Strict => "strict",
        };
        [
            ("dim", self.dim.to_string()),
            ("beta", self.beta.to_string()),
            ("k", self.k.to_string()),
            ("p", fmt_exp(self.p)),
            ("levels", self.levels.to_string()),
            ("coarsest", self.coarsest.to_string()),
            ("trials", self.trials.to_string()),
            ("seed", self.seed.to_string()),
            ("jitter", self.jitter.to_string()),
            ("divisor", self.divisor.to_string()),
            ("pad-tol", self.pad_tol.to_string()),
            ("k1-glue", pair(self.k1_glue)),
            ("k2-glue", pair(self.k2_glue)),
            ("tol-profile", tol.to_string()),
            ("target", target.to_string()),
            ("target-beta", self.target_beta.to_string()),
            ("rate", self.rate.to_string()),
            ("half-width", self.half_width.to_string()),
            ("rho-max", self.rho_max.to_string()),
        ]
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if !(1..=3).contains(&self.dim) {
            return bad(format!("dim must lie in 1..=3, got {}", self.dim));
        }
        let limit = self.beta - self.dim as f64;
        if !(self.beta.is_finite() && limit > 0.0) {
            return bad(format!("need beta > d, got beta = {}", self.beta));
        }
        if !(self.k >= 0.0 && self.k < limit) {
            return bad(format!(
                "need 0 <= k < beta - d = {limit}, got k = {}",
                self.k
            ));
        }
        if !(self.p >= 1.0) {
            return bad(format!("p must lie in [1, inf], got {}", self.p));
        }
        if self.levels < 3 {
            return bad(format!("need at least 3 levels, got {}", self.levels));
        }
        if self.trials == 0 {
            return bad("need at least one trial".into());
        }
        if !(0.0..0.5).contains(&self.jitter) {
            return bad(format!("jitter must lie in [0, 1/2), got {}", self.jitter));
        }
        if !(self.divisor >= 2.0) {
            return bad(format!(
                "grid divisor must be at least 2, got {}",
                self.divisor
            ));
        }
        if !(self.pad_tol > 0.0 && self.pad_tol < 1.0) {
            return bad(format!(
                "pad tolerance must lie in (0, 1), got {}",
                self.pad_tol
            ));
        }
        if !(self.target_beta >= self.beta
            && self.rate > self.k
            && self.half_width > 0.0
            && self.rho_max > 0.0)
        {
            return bad(
                "inverse run needs target_beta >= beta, rate > k, half_width > 0, rho_max > 0"
                    .into(),
            );
        }
        make_kernel(KernelClass::K1, Some(self.k1_glue))?;
        make_kernel(KernelClass::K2, Some(self.k2_glue))?;
        Ok(())
    }

    pub fn profile(&self) -> Result<RadialProfile> {
        sobolev_spline(self.beta, self.dim)
    }

    pub fn kernels(&self) -> Result<(KernelProfile, KernelProfile)> {
        Ok((
            make_kernel(KernelClass::K1, Some(self.k1_glue))?,
            make_kernel(KernelClass::K2, Some(self.k2_glue))?,
        ))
    }

    pub fn grid_rule(&self) -> GridRule {
        GridRule {
            divisor: self.divisor,
            pad_tol: self.pad_tol,
            budget: GRID_BUDGET,
        }
    }

    pub fn norm(&self) -> Result<NormSpec> {
        NormSpec::new(self.k, self.p)
    }

    /// Target separation radius of sweep level `level`.
    pub fn level_q(&self, level: usize) -> f64 {
        2f64.powi(-(self.coarsest as i32) - level as i32)
    }

    /// Lattice of spacing `2 q` on the unit cube, optionally jittered.
    pub fn level_points(&self, level: usize) -> Result<PointSet> {
        let spacing = 2.0 * self.level_q(level);
        let dom = Domain::cube(self.dim, 0.0, 1.0)?;
        gen_quasi_uniform(
            &dom,
            spacing,
            self.jitter * spacing,
            draw_seed(self.seed, level, usize::MAX),
        )
    }
}

/// Per-axis candidate density giving a fill-distance grid of spacing about `q/4`.
fn fill_density(ps: &PointSet, q: f64) -> usize {
    let dom = ps.domain();
    let side = (0..ps.dim())
        .map(|k| dom.hi[k] - dom.lo[k])
        .fold(0.0, f64::max);
    let cap = (1usize << 22) as f64;
    let want = (4.0 * side / q).ceil() + 1.0;
    want.min(cap.powf(1.0 / ps.dim() as f64)).max(2.0) as usize
}

fn level_geometry(ps: &PointSet) -> Result<GeometryReport> {
    let q = ps.separation_radius()?;
    geometry_report(ps, fill_density(ps, q))
}

fn spread(values: &[f64]) -> f64 {
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    hi / lo
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilityLevel {
    pub level: usize,
    pub n: usize,
    pub geometry: GeometryReport,
    pub sigma0: f64,
    pub m_hat: f64,
    pub dominance_ratio: f64,
    pub inv_norm_bound: f64,
    pub inv_norm_actual: f64,
    pub inv_norm_2: f64,
    pub inv_norm_inf: f64,
    pub lemma_holds: bool,
    pub lemma_strict: bool,
    pub ratio_estimate: f64,
    pub best_candidate: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StabilitySweep {
    pub levels: Vec<StabilityLevel>,
    /// `log ||A^-1||_1` against `log q`; target `d - beta`.
    pub inv_norm_fit: RateFit,
    /// `log ratio` against `log q`; target `d/p' - beta`.
    pub ratio_fit: RateFit,
}

pub fn run_stability_sweep(cfg: &ExperimentConfig) -> Result<StabilitySweep> {
    cfg.validate()?;
    let profile = cfg.profile()?;
    let (k1, _) = cfg.kernels()?;
    let spec = cfg.tol_profile.hankel();
    let mut levels = Vec::with_capacity(cfg.levels);
    for level in 0..cfg.levels {
        let row = (|| -> Result<StabilityLevel> {
            let ps = cfg.level_points(level)?;
            let geometry = level_geometry(&ps)?;
            let s0 = find_sigma0(&ps, &profile, &k1, &spec)?;
            let inv = inverse_norm_check(&s0.matrix.entries)?;
            let est = crate::stability::stability_ratio_estimate(
                &ps,
                &profile,
                cfg.p,
                cfg.trials,
                cfg.seed,
                level,
                &cfg.grid_rule(),
            )?;
            Ok(StabilityLevel {
                level,
                n: ps.len(),
                geometry,
                sigma0: s0.sigma0,
                m_hat: s0.m_hat,
                dominance_ratio: s0.matrix.dominance_ratio().max(inv.dominance_ratio),
                inv_norm_bound: inv.inv_norm_bound,
                inv_norm_actual: inv.inv_norm_actual,
                inv_norm_2: inv.inv_norm_2,
                inv_norm_inf: inv.inv_norm_inf,
                lemma_holds: inv.holds,
                lemma_strict: inv.strict,
                ratio_estimate: est.ratio,
                best_candidate: est.best,
            })
        })()
        .map_err(|e| e.at_level(level))?;
        levels.push(row);
    }
    let qs: Vec<f64> = levels.iter().map(|l| l.geometry.q).collect();
    let d = cfg.dim as f64;
    let inv: Vec<f64> = levels.iter().map(|l| l.inv_norm_actual).collect();
    let ratio: Vec<f64> = levels.iter().map(|l| l.ratio_estimate).collect();
    Ok(StabilitySweep {
        inv_norm_fit: rate_fit(&qs, &inv, d - cfg.beta, 0.3)?,
        ratio_fit: rate_fit(&qs, &ratio, d / conjugate(cfg.p) - cfg.beta, 0.3)?,
        levels,
    })
}

impl StabilitySweep {
    pub fn contracts(&self) -> Vec<Contract> {
        let dom = self
            .levels
            .iter()
            .map(|l| l.dominance_ratio)
            .fold(0.0, f64::max);
        vec![
            Contract::new(
                "dominance",
                dom <= 0.5,
                format!("max ||D^-1 F||_1 at sigma0 = {dom}"),
            ),
            Contract::new(
                "inverse-norm-lemma",
                self.levels.iter().all(|l| l.lemma_holds),
                "||A^-1||_1 <= ||D^-1||_1 / (1 - ||D^-1 F||_1) on every level",
            ),
            fit_contract("inverse-norm-exponent", &self.inv_norm_fit),
            fit_contract("stability-exponent", &self.ratio_fit),
        ]
    }

    pub fn report(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let mut t = Table::new(&[
            "level",
            "q",
            "sigma0",
            "dominance_ratio",
            "inv_norm_actual",
            "ratio_estimate",
        ]);
        for l in &self.levels {
            t.push(vec![
                l.level.into(),
                l.geometry.q.into(),
                l.sigma0.into(),
                l.dominance_ratio.into(),
                l.inv_norm_actual.into(),
                l.ratio_estimate.into(),
            ])?;
        }
        Ok(Report::new("stability sweep", cfg.to_pairs(), t)
            .with_summary(self)?
            .with_contracts(self.contracts()))
    }
}

fn fit_contract(name: &str, fit: &RateFit) -> Contract {
    Contract::new(
        name,
        fit.holds,
        format!(
            "slope {} vs required >= {} (target {})",
            fit.fit.slope,
            fit.target - fit.tolerance,
            fit.target
        ),
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinLevel {
    pub level: usize,
    pub n: usize,
    pub geometry: GeometryReport,
    pub sigma0: f64,
    pub dominance_ratio: f64,
    pub sigma1: f64,
    pub ratio_estimate: f64,
    /// Worst `||g * K_sigma1||_{k,p} q^k / ||g||_p`.
    pub bl_ratio: f64,
    /// Worst lemma step ratio `||f||_{m,p} / (sigma1 ||f||_{m-1,p})`.
    pub bl_max_step: f64,
    /// Worst `||g - g * K_sigma1||_{k,p} / ||a||_p`.
    pub approx_ratio: f64,
    /// Worst `||g||_{k,p} q^k / ||g||_p` over all candidates.
    pub bernstein_ratio: f64,
    /// The same over the random draws only.
    pub bernstein_random: f64,
    pub decomposition_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinRun {
    pub levels: Vec<BernsteinLevel>,
    pub bernstein_spread: f64,
    pub approx_fit: RateFit,
    pub stability_fit: RateFit,
}

pub fn run_bernstein_experiment(cfg: &ExperimentConfig) -> Result<BernsteinRun> {
    cfg.validate()?;
    let profile = cfg.profile()?;
    let (k1, k2) = cfg.kernels()?;
    let spec = cfg.tol_profile.hankel();
    let norm = cfg.norm()?;
    let mut levels = Vec::with_capacity(cfg.levels);
    for level in 0..cfg.levels {
        let row = (|| -> Result<BernsteinLevel> {
            let ps = cfg.level_points(level)?;
            let geometry = level_geometry(&ps)?;
            let q = geometry.q;
            let s0 = find_sigma0(&ps, &profile, &k1, &spec)?;
            let rule = cfg.grid_rule();
            let mut sampler = AdaptiveSampler::new(&ps, &profile, rule.spacing(q), &rule)?;
            let mut out = BernsteinLevel {
                level,
                n: ps.len(),
                geometry,
                sigma0: s0.sigma0,
                dominance_ratio: s0.matrix.dominance_ratio(),
                sigma1: 1.0 / q,
                ratio_estimate: 0.0,
                bl_ratio: 0.0,
                bl_max_step: 0.0,
                approx_ratio: 0.0,
                bernstein_ratio: 0.0,
                bernstein_random: 0.0,
                decomposition_holds: true,
            };
            for c in candidates(&ps, &profile, q, cfg.trials, cfg.seed, level)? {
                let g = sampler.field(&c.coeffs)?;
                let stab = coeff_norm(&c.coeffs, cfg.p) / g.lp_norm(cfg.p);
                let bern = bernstein_ratio(&g, q, cfg.k, cfg.p)?;
                let bl = bl_bernstein_check(&g, &k2, q, cfg.k, cfg.p)?;
                let appr = approx_ratio(&g, &c.coeffs, &k2, q, norm)?;
                // ||g||_{k,p} <= ||g * K||_{k,p} + ||g - g * K||_{k,p}, all scaled by q^k / ||g||_p
                let rhs = bl.corollary_ratio + q.powf(cfg.k) * appr * stab;
                out.decomposition_holds &= bern <= rhs * (1.0 + 1e-9);
                out.ratio_estimate = out.ratio_estimate.max(stab);
                out.bl_ratio = out.bl_ratio.max(bl.corollary_ratio);
                out.bl_max_step = out.bl_max_step.max(bl.max_step);
                out.approx_ratio = out.approx_ratio.max(appr);
                out.bernstein_ratio = out.bernstein_ratio.max(bern);
                if c.label.starts_with("signs") || c.label.starts_with("normal") {
                    out.bernstein_random = out.bernstein_random.max(bern);
                }
            }
            Ok(out)
        })()
        .map_err(|e| e.at_level(level))?;
        levels.push(row);
    }
    let qs: Vec<f64> = levels.iter().map(|l| l.geometry.q).collect();
    let d = cfg.dim as f64;
    let pc = conjugate(cfg.p);
    let approx: Vec<f64> = levels.iter().map(|l| l.approx_ratio).collect();
    let stab: Vec<f64> = levels.iter().map(|l| l.ratio_estimate).collect();
    let bern: Vec<f64> = levels.iter().map(|l| l.bernstein_ratio).collect();
    Ok(BernsteinRun {
        bernstein_spread: spread(&bern),
        approx_fit: rate_fit(&qs, &approx, cfg.beta - cfg.k - d / pc, 0.3)?,
        stability_fit: rate_fit(&qs, &stab, d / pc - cfg.beta, 0.3)?,
        levels,
    })
}

impl BernsteinRun {
    /// Boundedness, approximation exponent, dominance and the per-instance split.
    /// The stability fit is reported but its contract belongs to the stability sweep,
    /// whose default levels are finer.
    pub fn contracts(&self) -> Vec<Contract> {
        let dom = self
            .levels
            .iter()
            .map(|l| l.dominance_ratio)
            .fold(0.0, f64::max);
        vec![
            Contract::new(
                "bernstein-boundedness",
                self.bernstein_spread <= 2.5,
                format!(
                    "max/min of the Bernstein ratio over levels = {}",
                    self.bernstein_spread
                ),
            ),
            fit_contract("approximation-exponent", &self.approx_fit),
            Contract::new(
                "dominance",
                dom <= 0.5,
                format!("max ||D^-1 F||_1 at sigma0 = {dom}"),
            ),
            Contract::new(
                "decomposition",
                self.levels.iter().all(|l| l.decomposition_holds),
                "||g||_{k,p} <= ||g*K||_{k,p} + ||g - g*K||_{k,p} on every instance",
            ),
        ]
    }

    pub fn report(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let mut t = Table::new(&[
            "level",
            "q",
            "sigma1",
            "bl_ratio",
            "approx_ratio",
            "bernstein_ratio",
        ]);
        for l in &self.levels {
            t.push(vec![
                l.level.into(),
                l.geometry.q.into(),
                l.sigma1.into(),
                l.bl_ratio.into(),
                l.approx_ratio.into(),
                l.bernstein_ratio.into(),
            ])?;
        }
        Ok(Report::new("bernstein sweep", cfg.to_pairs(), t)
            .with_summary(self)?
            .with_contracts(self.contracts()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseLevel {
    pub n: usize,
    pub centers: usize,
    pub h: f64,
    pub q: f64,
    pub rho: f64,
    /// `||f - f_n||_p`.
    pub approx_error: f64,
    /// `||f - f_n||_p / ||f||_p`.
    pub relative_error: f64,
    /// `||f_{n+1} - f_n||_{k,p}`, absent on the last level.
    pub diff_norm: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InverseRunReport {
    pub target: InverseTarget,
    pub levels: Vec<InverseLevel>,
    pub nested: bool,
    pub monotone: bool,
    pub bounded_geometry: bool,
    /// `log ||f_{n+1} - f_n||_{k,p}` against `log 2^-n`; target `l - k`. Not fitted for
    /// in-space targets, whose differences vanish.
    pub exponent_fit: Option<RateFit>,
}

/// Refinement sweeps applied after the regularized solve.
const LS_REFINEMENTS: usize = 4;

/// Least squares on grid samples through the regularized normal equations
/// `(B^T B + eps diag(B^T B)) x = B^T y`, followed by refinement sweeps on the exact
/// residual `y - B x` (iterated Tikhonov), which remove the regularization bias.
fn grid_least_squares(basis: &GridBasis, y: &[f64], eps: f64) -> Result<Vec<f64>> {
    let rows = basis.rows();
    let n = rows.len();
    let m = y.len();
    let b = DMatrix::from_fn(m, n, |i, j| rows[j][i]);
    let mut gram = b.tr_mul(&b);
    for i in 0..n {
        gram[(i, i)] *= 1.0 + eps;
    }
    let chol = gram.cholesky().ok_or_else(|| {
        Error::LeastSquares("regularized normal equations are not positive definite".into())
    })?;
    let y = DVector::from_column_slice(y);
    let mut x = chol.solve(&b.tr_mul(&y));
    for _ in 0..LS_REFINEMENTS {
        let r = &y - &b * &x;
        x += chol.solve(&b.tr_mul(&r));
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(Error::LeastSquares("non-finite solution".into()));
    }
    Ok(x.iter().copied().collect())
}

/// Nested dyadic grids `X_n` of spacing `2^-(n+1+coarsest)` on `[-L, L]^d`; `f_n` is the
/// grid least-squares approximant from `S_n`.
pub fn run_inverse_experiment(
    cfg: &ExperimentConfig,
    target: InverseTarget,
) -> Result<InverseRunReport> {
    cfg.validate()?;
    let profile = cfg.profile()?;
    let d = cfg.dim;
    let dom = Domain::cube(d, -cfg.half_width, cfg.half_width)?;
    let spacing = |n: usize| 2f64.powi(-(n as i32) - 1 - cfg.coarsest as i32);
    let sets: Vec<PointSet> = (0..cfg.levels)
        .map(|n| gen_quasi_uniform(&dom, spacing(n), 0.0, 0))
        .collect::<Result<_>>()?;
    let nested = sets.windows(2).all(|w| w[0].is_subset_of(&w[1]));
    let smooth = sobolev_spline(cfg.target_beta, d)?;
    let pad = decay_radius(&profile, 1e-12)?.max(decay_radius(&smooth, 1e-12)?);
    let finest = &sets[cfg.levels - 1];
    let layout = GridLayout::around(finest, spacing(cfg.levels - 1) / 4.0, pad, GRID_BUDGET)?;
    let f = match target {
        InverseTarget::Smooth => GridField::from_fn(
            layout.origin.clone(),
            layout.spacing,
            layout.extents.clone(),
            |x| {
                smooth
                    .space_eval(x.iter().map(|v| v * v).sum::<f64>().sqrt())
                    .unwrap_or(f64::NAN)
            },
        )?
        .with_pad_radius(pad),
        InverseTarget::InSpace => {
            let b0 = GridBasis::new(&sets[0], &profile, layout.clone(), pad)?;
            b0.synthesize(&random_draw(sets[0].len(), cfg.seed, 0, 1))?
        }
    };
    let f_norm = f.lp_norm(cfg.p);
    let mut approximants = Vec::with_capacity(cfg.levels);
    let mut levels = Vec::with_capacity(cfg.levels);
    for (n, ps) in sets.iter().enumerate() {
        let row = (|| -> Result<(InverseLevel, GridField)> {
            let basis = GridBasis::new(ps, &profile, layout.clone(), pad)?;
            let x = grid_least_squares(&basis, f.values(), 1e-10)?;
            let fn_ = basis.synthesize(&x)?;
            let resid: Vec<f64> = f
                .values()
                .iter()
                .zip(fn_.values())
                .map(|(a, b)| a - b)
                .collect();
            let err = f.with_values(resid)?.lp_norm(cfg.p);
            let geo = geometry_report(ps, fill_density(ps, spacing(n) / 2.0))?;
            let level = InverseLevel {
                n,
                centers: ps.len(),
                h: geo.h,
                q: geo.q,
                rho: geo.rho,
                approx_error: err,
                relative_error: err / f_norm,
                diff_norm: None,
            };
            Ok((level, fn_))
        })()
        .map_err(|e| e.at_level(n))?;
        levels.push(row.0);
        approximants.push(row.1);
    }
    let norm = cfg.norm()?;
    for n in 0..cfg.levels - 1 {
        let diff: Vec<f64> = approximants[n + 1]
            .values()
            .iter()
            .zip(approximants[n].values())
            .map(|(a, b)| a - b)
            .collect();
        let field = approximants[n].with_values(diff)?;
        levels[n].diff_norm = Some(sobolev_norm(&field, norm).map_err(|e| e.at_level(n))?);
    }
    let monotone = levels
        .windows(2)
        .all(|w| w[1].approx_error <= w[0].approx_error + 1e-8 * f_norm.max(1.0));
    let bounded_geometry = levels.iter().enumerate().all(|(n, l)| {
        let cap = 2f64.powi(-(n as i32) - cfg.coarsest as i32);
        l.h < cap && l.q < cap && l.rho <= cfg.rho_max * (1.0 + 1e-12)
    });
    let exponent_fit = match target {
        InverseTarget::InSpace => None,
        InverseTarget::Smooth => {
            let xs: Vec<f64> = (0..cfg.levels - 1)
                .map(|n| 2f64.powi(-(n as i32) - cfg.coarsest as i32))
                .collect();
            let ys: Vec<f64> = levels[..cfg.levels - 1]
                .iter()
                .map(|l| l.diff_norm.unwrap_or(f64::NAN))
                .collect();
            Some(
                rate_fit(&xs, &ys, cfg.rate - cfg.k, 0.4).or_else(|e| match e {
                    Error::TooFewPoints { .. } => Err(Error::InvalidArgument(
                        "the decay fit needs at least 4 levels (3 consecutive differences)".into(),
                    )),
                    e => Err(e),
                })?,
            )
        }
    };
    Ok(InverseRunReport {
        target,
        levels,
        nested,
        monotone,
        bounded_geometry,
        exponent_fit,
    })
}

impl InverseRunReport {
    pub fn contracts(&self) -> Vec<Contract> {
        let mut out = vec![
            Contract::new("nesting", self.nested, "X_n is a subset of X_{n+1}"),
            Contract::new(
                "monotone-error",
                self.monotone,
                "approximation error non-increasing in n",
            ),
            Contract::new(
                "geometry",
                self.bounded_geometry,
                "h_n, q_n < 2^-n and rho_n <= rho_max",
            ),
        ];
        match (&self.exponent_fit, self.target) {
            (Some(fit), _) => out.push(fit_contract("difference-decay-exponent", fit)),
            (None, InverseTarget::InSpace) => {
                let worst = self
                    .levels
                    .iter()
                    .map(|l| l.relative_error)
                    .fold(0.0, f64::max);
                out.push(Contract::new(
                    "in-space-residual",
                    worst < 1e-8,
                    format!("max relative residual {worst}"),
                ));
            }
            (None, InverseTarget::Smooth) => {}
        }
        out
    }

    pub fn report(&self, cfg: &ExperimentConfig) -> Result<Report> {
        let mut t = Table::new(&["n", "centers", "h", "q", "rho", "approx_error", "diff_norm"]);
        for l in &self.levels {
            t.push(vec![
                l.n.into(),
                l.centers.into(),
                l.h.into(),
                l.q.into(),
                l.rho.into(),
                l.approx_error.into(),
                l.diff_norm.map_or(Cell::Text(String::new()), Cell::num),
            ])?;
        }
        Ok(Report::new("inverse run", cfg.to_pairs(), t)
            .with_summary(self)?
            .with_contracts(self.contracts()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_validation() {
        let mut c = ExperimentConfig::default();
        c.apply_text("# comment\np = inf\nk2_glue = 0.6, 0.9\nlevels=5\n\ntarget = in-space")
            .unwrap();
        assert_eq!(c.p, f64::INFINITY);
        assert_eq!(c.k2_glue, (0.6, 0.9));
        let mut d = ExperimentConfig::default();
        for (k, v) in c.to_pairs() {
            d.set(&k, &v).unwrap();
        }
        assert_eq!(c, d);
        assert!(c.apply_text("nope = 1").is_err());
        let bad = ExperimentConfig {
            k: 2.0,
            ..ExperimentConfig::default()
        };
        assert!(bad.validate().is_err());
        let few = ExperimentConfig {
            levels: 2,
            ..ExperimentConfig::default()
        };
        assert!(few.validate().is_err());
    }

    #[test]
    fn level_sets_are_dyadic() {
        let c = ExperimentConfig::for_command("stability");
        let ps = c.level_points(1).unwrap();
        assert_eq!(ps.len(), 33);
        assert_eq!(ps.separation_radius().unwrap(), 2f64.powi(-6));
    }
}
