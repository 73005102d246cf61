//! Command-line front end. Every command builds a [`Report`] and emits it as CSV or JSON.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::experiments::{
    run_bernstein_experiment, run_inverse_experiment, run_stability_sweep, ExperimentConfig,
    TolProfile,
};
use crate::geometry::{gen_quasi_uniform, geometry_report, Domain, PointSet};
use crate::hankel::{decay_check, DecayMode};
use crate::kernels::{kernel_space_eval, make_kernel, KernelClass};
use crate::network::{parse_exponent, sobolev_norm, GridField, NormSpec};
use crate::rbf::{
    admissibility_check_with, default_grids, gaussian_profile, sobolev_spline, thin_plate_spline,
    DerivativeMode,
};
use crate::report::{emit_report, Contract, Format, Report, Table};
use crate::specfun::{bessel_j, bessel_k, gamma, ln_gamma, BesselOrder};

#[derive(Debug, Parser)]
#[command(
    name = "rbf-bernstein",
    version,
    about = "Stability, Bernstein and inverse estimates for RBF networks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: Global,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Seed for every random draw.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output file; `csv` or `json` alone select the format and print to stdout.
    #[arg(long, global = true)]
    pub out: Option<String>,
    /// csv or json (default: from the output extension, else csv).
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Quadrature tolerances: fast or strict.
    #[arg(long = "tol-profile", global = true)]
    pub tol_profile: Option<TolProfile>,
    /// Flat `key = value` file with the same names as the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Point sets.
    Geom {
        #[command(subcommand)]
        action: GeomCmd,
    },
    /// Special functions.
    Specfun {
        #[command(subcommand)]
        action: SpecfunCmd,
    },
    /// Radial profiles.
    Rbf {
        #[command(subcommand)]
        action: RbfCmd,
    },
    /// Smooth kernels.
    Kernel {
        #[command(subcommand)]
        action: KernelCmd,
    },
    /// Oscillatory Hankel-type integrals.
    Hankel {
        #[command(subcommand)]
        action: HankelCmd,
    },
    /// Grid fields.
    Net {
        #[command(subcommand)]
        action: NetCmd,
    },
    /// Stability sweep over dyadic separation radii.
    Stability {
        #[command(subcommand)]
        action: SweepCmd,
    },
    /// Bernstein sweep over dyadic separation radii.
    Bernstein {
        #[command(subcommand)]
        action: SweepCmd,
    },
    /// Inverse-theorem demonstration on nested center sets.
    Inverse {
        #[command(subcommand)]
        action: InverseCmd,
    },
}

#[derive(Debug, Subcommand)]
pub enum GeomCmd {
    /// Separation radius, fill distance and mesh ratio of a point file.
    Report {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 400)]
        density: usize,
    },
    /// Writes a (jittered) lattice on `[lo, hi]^dim` as a point file.
    Generate {
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        spacing: f64,
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        /// Also write the points in the point-file format.
        #[arg(long)]
        write: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum SpecfunCmd {
    /// Evaluates J, K, gamma or lngamma.
    Eval {
        #[arg(long = "fn")]
        func: String,
        #[arg(long, default_value_t = 0.0)]
        nu: f64,
        #[arg(long)]
        x: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum RbfCmd {
    /// Samples the admissibility conditions on the default grids.
    Admissible {
        /// sobolev, thin-plate or gaussian.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
        /// Thin-plate order.
        #[arg(long, default_value_t = 2)]
        m: u32,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        /// Use finite differences instead of closed-form derivatives.
        #[arg(long)]
        fd: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// `K_sigma(x)` at `|x| = r`.
    Eval {
        #[arg(long)]
        class: KernelClass,
        #[arg(long, default_value_t = 1.0)]
        sigma: f64,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        r: f64,
        /// Glue interval `a,b`.
        #[arg(long)]
        glue: Option<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum HankelCmd {
    /// Decay rate of Bessel moments of the kernel profiles.
    Decay {
        #[arg(long)]
        mode: DecayMode,
        #[arg(long, default_value_t = 1)]
        dim: usize,
        #[arg(long)]
        n: u32,
        /// `lo:hi:lin[:count]`, `lo:hi:log[:count]` or a comma list.
        #[arg(long, default_value = "1:64:lin")]
        alphas: String,
        /// Order of the algebraic factor in tail mode.
        #[arg(long, default_value_t = 3.0)]
        beta: f64,
    },
}

#[derive(Debug, Subcommand)]
pub enum NetCmd {
    /// `||f||_{k,p}` of a binary grid field.
    Norm {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 0.0)]
        k: f64,
        #[arg(long, default_value = "2")]
        p: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum SweepCmd {
    Sweep(SweepArgs),
}

#[derive(Debug, Subcommand)]
pub enum InverseCmd {
    Run(SweepArgs),
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub k: Option<f64>,
    #[arg(long)]
    pub p: Option<String>,
    #[arg(long)]
    pub levels: Option<usize>,
    /// Coarsest dyadic level.
    #[arg(long)]
    pub coarsest: Option<u32>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub jitter: Option<f64>,
    /// Grid spacing is `q / divisor`.
    #[arg(long)]
    pub divisor: Option<f64>,
    /// smooth or in-space (inverse run).
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long = "target-beta")]
    pub target_beta: Option<f64>,
    /// Assumed approximation rate `l` (inverse run).
    #[arg(long)]
    pub rate: Option<f64>,
}

impl std::str::FromStr for DecayMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tail" => Ok(DecayMode::Tail),
            "origin" => Ok(DecayMode::Origin),
            _ => Err(Error::Parse(format!(
                "unknown mode `{s}` (expected tail or origin)"
            ))),
        }
    }
}

/// Parses `lo:hi:lin[:count]`, `lo:hi:log[:count]` or `a,b,c`.
pub fn parse_alphas(s: &str) -> Result<Vec<f64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::Parse(format!("bad number `{t}` in `{s}`")))
    };
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() == 1 {
        return s.split(',').map(num).collect();
    }
    if !(3..=4).contains(&parts.len()) {
        return Err(Error::Parse(format!("bad range `{s}`")));
    }
    let (lo, hi) = (num(parts[0])?, num(parts[1])?);
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::Parse(format!("need 0 < lo < hi in `{s}`")));
    }
    let count = match parts.get(3) {
        Some(c) => Some(
            c.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad count in `{s}`")))?,
        ),
        None => None,
    };
    match parts[2] {
        "lin" => match count {
            Some(n) if n >= 2 => Ok((0..n)
                .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
                .collect()),
            Some(_) => Err(Error::Parse("need a count of at least 2".into())),
            None => Ok((0..)
                .map(|i| lo + i as f64)
                .take_while(|a| *a <= hi + 1e-9)
                .collect()),
        },
        "log" => {
            let n = count.unwrap_or(25);
            if n < 2 {
                return Err(Error::Parse("need a count of at least 2".into()));
            }
            let r = (hi / lo).ln();
            Ok((0..n)
                .map(|i| lo * (r * i as f64 / (n - 1) as f64).exp())
                .collect())
        }
        other => Err(Error::Parse(format!(
            "unknown spacing `{other}` (expected lin or log)"
        ))),
    }
}

fn resolve_output(global: &Global) -> (Format, Option<PathBuf>) {
    match global.out.as_deref() {
        None | Some("-") => (global.format.unwrap_or(Format::Csv), None),
        Some(s) if s.eq_ignore_ascii_case("csv") || s.eq_ignore_ascii_case("json") => (
            global
                .format
                .unwrap_or_else(|| s.parse().unwrap_or(Format::Csv)),
            None,
        ),
        Some(s) => {
            let path = PathBuf::from(s);
            let by_ext = path
                .extension()
                .and_then(|e| e.to_str())
                .and_then(|e| e.parse().ok());
            (global.format.or(by_ext).unwrap_or(Format::Csv), Some(path))
        }
    }
}

fn pairs(items: &[(&str, String)]) -> BTreeMap<String, String> {
    items
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

fn sweep_config(command: &str, args: &SweepArgs, global: &Global) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::for_command(command);
    if let Some(path) = &global.config {
        cfg.apply_file(path)?;
    }
    let mut set = |k: &str, v: Option<String>| -> Result<()> {
        match v {
            Some(v) => cfg.set(k, &v),
            None => Ok(()),
        }
    };
    set("dim", args.dim.map(|v| v.to_string()))?;
    set("beta", args.beta.map(|v| v.to_string()))?;
    set("k", args.k.map(|v| v.to_string()))?;
    set("p", args.p.clone())?;
    set("levels", args.levels.map(|v| v.to_string()))?;
    set("coarsest", args.coarsest.map(|v| v.to_string()))?;
    set("trials", args.trials.map(|v| v.to_string()))?;
    set("jitter", args.jitter.map(|v| v.to_string()))?;
    set("divisor", args.divisor.map(|v| v.to_string()))?;
    set("target", args.target.clone())?;
    set("target-beta", args.target_beta.map(|v| v.to_string()))?;
    set("rate", args.rate.map(|v| v.to_string()))?;
    set("seed", global.seed.map(|v| v.to_string()))?;
    if let Some(t) = global.tol_profile {
        cfg.tol_profile = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn build_report(cli: &Cli) -> Result<Report> {
    let g = &cli.global;
    let seed = g.seed.unwrap_or(7);
    let spec = g.tol_profile.unwrap_or(TolProfile::Strict).hankel();
    match &cli.command {
        Command::Geom {
            action: GeomCmd::Report { input, density },
        } => {
            let ps = PointSet::read_text(input)?;
            let r = geometry_report(&ps, *density)?;
            let mut t = Table::new(&["n", "dim", "q", "h", "rho", "candidate_density"]);
            t.push(vec![
                ps.len().into(),
                ps.dim().into(),
                r.q.into(),
                r.h.into(),
                r.rho.into(),
                r.candidate_density.into(),
            ])?;
            let cfg = pairs(&[
                ("in", input.display().to_string()),
                ("density", density.to_string()),
            ]);
            Report::new("geom report", cfg, t).with_summary(r)
        }
        Command::Geom {
            action:
                GeomCmd::Generate {
                    dim,
                    spacing,
                    jitter,
                    lo,
                    hi,
                    write,
                },
        } => {
            let ps = gen_quasi_uniform(&Domain::cube(*dim, *lo, *hi)?, *spacing, *jitter, seed)?;
            if let Some(path) = write {
                ps.write_text(path)?;
            }
            let cols: Vec<String> = (0..*dim).map(|k| format!("x{k}")).collect();
            let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
            let mut t = Table::new(&col_refs);
            for p in ps.points() {
                t.push(p.iter().map(|v| (*v).into()).collect())?;
            }
            let cfg = pairs(&[
                ("dim", dim.to_string()),
                ("spacing", spacing.to_string()),
                ("jitter", jitter.to_string()),
                ("lo", lo.to_string()),
                ("hi", hi.to_string()),
                ("seed", seed.to_string()),
            ]);
            Ok(Report::new("geom generate", cfg, t))
        }
        Command::Specfun {
            action: SpecfunCmd::Eval { func, nu, x },
        } => {
            let value = match func.as_str() {
                "J" | "j" => bessel_j(BesselOrder::from_f64(*nu)?, *x)?,
                "K" | "k" => bessel_k(*nu, *x)?,
                "gamma" => gamma(*x),
                "lngamma" => ln_gamma(*x),
                other => {
                    return Err(Error::Parse(format!(
                        "unknown function `{other}` (J, K, gamma, lngamma)"
                    )))
                }
            };
            let mut t = Table::new(&["fn", "nu", "x", "value"]);
            t.push(vec![
                func.as_str().into(),
                (*nu).into(),
                (*x).into(),
                value.into(),
            ])?;
            let cfg = pairs(&[
                ("fn", func.clone()),
                ("nu", nu.to_string()),
                ("x", x.to_string()),
            ]);
            Ok(Report::new("specfun eval", cfg, t))
        }
        Command::Rbf {
            action:
                RbfCmd::Admissible {
                    family,
                    beta,
                    m,
                    dim,
                    fd,
                },
        } => {
            let profile = match family.as_str() {
                "sobolev" => sobolev_spline(*beta, *dim)?,
                "thin-plate" | "thinplate" => thin_plate_spline(*m, *dim)?,
                "gaussian" => gaussian_profile(*beta, *dim)?,
                other => {
                    return Err(Error::Parse(format!(
                        "unknown family `{other}` (sobolev, thin-plate, gaussian)"
                    )))
                }
            };
            let (sig, xs) = default_grids();
            let mode = if *fd {
                DerivativeMode::FiniteDifference
            } else {
                DerivativeMode::Analytic
            };
            let r = admissibility_check_with(&profile, &sig, &xs, mode)?;
            let mut t = Table::new(&[
                "family",
                "beta",
                "dim",
                "c1",
                "c2",
                "l_d",
                "max_deriv_bound",
                "pass",
            ]);
            t.push(vec![
                family.as_str().into(),
                profile.beta().into(),
                (*dim).into(),
                r.c1.into(),
                r.c2.into(),
                r.l_d.into(),
                r.max_deriv_bound.into(),
                r.pass.into(),
            ])?;
            let cfg = pairs(&[
                ("family", family.clone()),
                ("beta", beta.to_string()),
                ("m", m.to_string()),
                ("dim", dim.to_string()),
                ("fd", fd.to_string()),
            ]);
            Report::new("rbf admissible", cfg, t).with_summary(r)
        }
        Command::Kernel {
            action:
                KernelCmd::Eval {
                    class,
                    sigma,
                    dim,
                    r,
                    glue,
                },
        } => {
            let glue_pair = match glue {
                Some(s) => {
                    let mut c = ExperimentConfig::default();
                    c.set("k1-glue", s)?;
                    Some(c.k1_glue)
                }
                None => None,
            };
            let kp = make_kernel(*class, glue_pair)?.at_scale(*sigma)?;
            let value = kernel_space_eval(&kp, *dim, *r, &spec)?;
            let mut t = Table::new(&["class", "sigma", "dim", "r", "value"]);
            t.push(vec![
                format!("{class:?}").as_str().into(),
                (*sigma).into(),
                (*dim).into(),
                (*r).into(),
                value.into(),
            ])?;
            let (a, b) = kp.glue();
            let cfg = pairs(&[
                ("class", format!("{class:?}")),
                ("sigma", sigma.to_string()),
                ("dim", dim.to_string()),
                ("r", r.to_string()),
                ("glue", format!("{a},{b}")),
            ]);
            Ok(Report::new("kernel eval", cfg, t))
        }
        Command::Hankel {
            action:
                HankelCmd::Decay {
                    mode,
                    dim,
                    n,
                    alphas,
                    beta,
                },
        } => {
            let a = parse_alphas(alphas)?;
            let k2 = make_kernel(KernelClass::K2, None)?;
            let tail = |t: f64| (1.0 - k2.kappa(t)) * (1.0 + t * t).powf(-beta / 2.0);
            let origin = |t: f64| k2.kappa(t);
            let f: &dyn Fn(f64) -> f64 = match mode {
                DecayMode::Tail => &tail,
                DecayMode::Origin => &origin,
            };
            let fit = decay_check(f, *dim, *mode, *n, &a, &spec)?;
            let mut t = Table::new(&["alpha", "value", "used"]);
            for p in &fit.points {
                t.push(vec![p.alpha.into(), p.value.into(), p.used.into()])?;
            }
            let contract = Contract::new(
                "decay",
                fit.contract_holds,
                format!("slope {} vs required <= {}", fit.slope, -(*n as f64) + 0.25),
            );
            let cfg = pairs(&[
                ("mode", format!("{mode:?}").to_lowercase()),
                ("dim", dim.to_string()),
                ("n", n.to_string()),
                ("alphas", alphas.clone()),
                ("beta", beta.to_string()),
            ]);
            Ok(Report::new("hankel decay", cfg, t)
                .with_summary(&fit)?
                .with_contracts(vec![contract]))
        }
        Command::Net {
            action: NetCmd::Norm { input, k, p },
        } => {
            let field = GridField::read_binary(input)?;
            let pv = parse_exponent(p)?;
            let value = sobolev_norm(&field, NormSpec::new(*k, pv)?)?;
            let mut t = Table::new(&["k", "p", "norm"]);
            t.push(vec![(*k).into(), p.as_str().into(), value.into()])?;
            let cfg = pairs(&[
                ("in", input.display().to_string()),
                ("k", k.to_string()),
                ("p", p.clone()),
            ]);
            Ok(Report::new("net norm", cfg, t))
        }
        Command::Stability {
            action: SweepCmd::Sweep(args),
        } => {
            let cfg = sweep_config("stability", args, g)?;
            run_stability_sweep(&cfg)?.report(&cfg)
        }
        Command::Bernstein {
            action: SweepCmd::Sweep(args),
        } => {
            let cfg = sweep_config("bernstein", args, g)?;
            run_bernstein_experiment(&cfg)?.report(&cfg)
        }
        Command::Inverse {
            action: InverseCmd::Run(args),
        } => {
            let cfg = sweep_config("inverse", args, g)?;
            run_inverse_experiment(&cfg, cfg.target)?.report(&cfg)
        }
    }
}

/// Runs the CLI and returns the process exit code: 0 on success, 1 when a contract
/// fails, 2 on error.
pub fn run(cli: &Cli) -> i32 {
    let (format, path) = resolve_output(&cli.global);
    let report = match build_report(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return 2;
        }
    };
    if let Err(e) = emit_report(&report, format, path.as_deref().map(Path::new)) {
        eprintln!("error: {e}");
        return 2;
    }
    for c in report.contracts.iter().filter(|c| !c.holds) {
        eprintln!("contract failed: {} ({})", c.name, c.detail);
    }
    if report.all_hold() {
        0
    } else {
        1
    }
}
