//! The `mapbayes` command line.
//!
//! Exit codes: 0 success, 2 configuration error, 3 domain error, 4 internal
//! invariant violation.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::argmax::ArgmaxResult;
use crate::convergence::{
    check_conditions, default_ladder, geometric_ladder, hypo_diagnostic, sweep_with, SweepTrace,
};
use crate::counterexample::{self, CounterexampleSpec, DEFAULT_MAX_BUMP};
use crate::density::{Density, SearchBox};
use crate::error::Error;
use crate::estimators::{approx_gap_with, bayes_estimate_with, map_estimate_with, ApproxGap, LossSpec};
use crate::format::{density_to_json, fmt_num, sample_csv, DensitySpec};
use crate::search::SearchOptions;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;
pub const EXIT_INVARIANT: i32 = 4;

const DEFAULT_NU_MAX: u32 = 6;
const DEFAULT_COUNTEREXAMPLE_NU_MAX: u32 = 4;
const DEFAULT_ALPHA_GRID: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
const DEFAULT_NU_LIST: [f64; 5] = [1.0, 2.0, 4.0, 8.0, 16.0];
const SAMPLE_STEP: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "mapbayes", version, about = "MAP and 0-1 loss Bayes estimators for usc densities")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Experiment configuration (JSON).
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory; overrides the config's `output`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized diagnostics; overrides the config's `seed`.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Posterior mode(s): writes map.json.
    Map,
    /// Bayes estimator for one loss scale `c`: writes bayes.json.
    Bayes,
    /// Bayes estimators along the ladder: writes sweep.csv and verdict.json.
    Sweep,
    /// Sufficient-condition checks: writes conditions.json.
    Check,
    /// Hit-and-miss diagnostic of the mollified sequence: writes hypo.json.
    Hypo,
    /// The non-convergence example end to end.
    Counterexample {
        #[command(subcommand)]
        action: Option<CounterexampleAction>,
    },
}

#[derive(Debug, Subcommand)]
pub enum CounterexampleAction {
    /// Writes the density as JSON pieces plus a `theta,value` CSV sampling.
    Dump {
        #[arg(long, default_value_t = DEFAULT_MAX_BUMP)]
        max_bump: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LadderSpec {
    List(Vec<f64>),
    Geometric { base: f64, factor: f64, count: usize },
}

impl LadderSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            LadderSpec::List(v) => v.clone(),
            LadderSpec::Geometric { base, factor, count } => geometric_ladder(*base, *factor, *count),
        }
    }
}

/// `[lo, hi]` in 1D or `[[lo_x, lo_y], [hi_x, hi_y]]` in 2D.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoxSpec {
    Interval([f64; 2]),
    Rect([Vec<f64>; 2]),
}

impl BoxSpec {
    pub fn to_search_box(&self) -> SearchBox {
        match self {
            BoxSpec::Interval([lo, hi]) => SearchBox::interval(*lo, *hi),
            BoxSpec::Rect([lo, hi]) => SearchBox {
                lo: lo.clone(),
                hi: hi.clone(),
            },
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tol_value: Option<f64>,
    pub grid_step: Option<f64>,
    pub refine_tol: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub density: Option<Value>,
    pub ladder: Option<LadderSpec>,
    pub search_box: Option<BoxSpec>,
    #[serde(default)]
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Loss scale for `bayes`.
    pub c: Option<f64>,
    /// Default ladder `2·4^ν, ν = 1..=nu_max` when `ladder` is absent.
    pub nu_max: Option<u32>,
    pub alpha_grid: Option<Vec<f64>>,
    pub nu_list: Option<Vec<f64>>,
    pub boxes: Option<Vec<[f64; 2]>>,
    pub opens: Option<Vec<[f64; 2]>>,
    pub max_bump: Option<u32>,
}

/// Failure with its exit code.
#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn io(path: &Path, e: std::io::Error) -> Self {
        CliError {
            code: EXIT_DOMAIN,
            message: format!("{}: {e}", path.display()),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invariant(_) => EXIT_INVARIANT,
            _ => EXIT_DOMAIN,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

struct Context {
    config: ExperimentConfig,
    base_dir: PathBuf,
    out: PathBuf,
    seed: u64,
}

impl Context {
    fn new(global: &GlobalArgs) -> CliResult<Self> {
        let (config, base_dir) = match &global.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
                let config: ExperimentConfig = serde_json::from_str(&text)
                    .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
                (config, path.parent().map(Path::to_path_buf).unwrap_or_default())
            }
            None => (ExperimentConfig::default(), PathBuf::new()),
        };
        let out = global
            .out
            .clone()
            .or_else(|| config.output.as_ref().map(|o| base_dir.join(o)))
            .unwrap_or_else(|| PathBuf::from("."));
        let seed = global.seed.or(config.seed).unwrap_or(0);
        Ok(Context {
            config,
            base_dir,
            out,
            seed,
        })
    }

    fn density(&self) -> CliResult<Density> {
        let value = self
            .config
            .density
            .as_ref()
            .ok_or_else(|| CliError::config("config needs a `density` (use --config)"))?;
        let spec = DensitySpec::from_value(value).map_err(|e| CliError::config(e.to_string()))?;
        spec.load(&self.base_dir).map_err(|e| CliError::config(e.to_string()))
    }

    fn options(&self) -> CliResult<SearchOptions> {
        let t = &self.config.tolerances;
        let mut opts = SearchOptions::default();
        for (name, v) in [("tol_value", t.tol_value), ("grid_step", t.grid_step), ("refine_tol", t.refine_tol)] {
            if let Some(x) = v {
                if !(x.is_finite() && x > 0.0) {
                    return Err(CliError::config(format!("tolerance {name} must be positive")));
                }
            }
        }
        opts.tol_value = t.tol_value;
        opts.grid_step = t.grid_step;
        if let Some(r) = t.refine_tol {
            opts.refine_tol = r;
        }
        Ok(opts)
    }

    /// Configured box, or the support hull padded by one half.
    fn search_box(&self, d: &Density) -> SearchBox {
        if let Some(b) = &self.config.search_box {
            return b.to_search_box();
        }
        match d {
            Density::Piecewise(pw) => {
                let (lo, hi) = pw.support();
                SearchBox::interval(lo - 0.5, hi + 0.5)
            }
            Density::Grid(g) => {
                let lo: Vec<f64> = g.origin().iter().map(|o| o - 0.5).collect();
                let hi: Vec<f64> = (0..g.dim())
                    .map(|a| g.origin()[a] + g.shape()[a] as f64 * g.spacing()[a] + 0.5)
                    .collect();
                SearchBox { lo, hi }
            }
        }
    }

    fn ladder(&self) -> CliResult<Vec<f64>> {
        let ladder = match &self.config.ladder {
            Some(l) => l.values(),
            None => default_ladder(self.config.nu_max.unwrap_or(DEFAULT_NU_MAX) as usize),
        };
        if ladder.is_empty() {
            return Err(CliError::config("ladder is empty"));
        }
        Ok(ladder)
    }

    fn write(&self, name: &str, contents: &str) -> CliResult<()> {
        fs::create_dir_all(&self.out).map_err(|e| CliError::io(&self.out, e))?;
        let path = self.out.join(name);
        fs::write(&path, contents).map_err(|e| CliError::io(&path, e))
    }

    fn write_json<T: Serialize>(&self, name: &str, value: &T) -> CliResult<()> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::from(Error::from(e)))?;
        text.push('\n');
        self.write(name, &text)
    }
}

fn join_point(p: &[f64]) -> String {
    p.iter().map(|x| fmt_num(*x)).collect::<Vec<_>>().join(";")
}

/// Rows of `sweep.csv`.
pub fn sweep_csv(trace: &SweepTrace) -> String {
    let mut out = String::from("c,canonical,sup_value,dist_to_map,argmax_lo,argmax_hi\n");
    for row in &trace.rows {
        let dim = row.canonical.len();
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for m in &row.maximizers {
            for a in 0..dim {
                lo[a] = lo[a].min(m.lower()[a]);
                hi[a] = hi[a].max(m.upper()[a]);
            }
        }
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            fmt_num(row.c),
            join_point(&row.canonical),
            fmt_num(row.sup_value),
            fmt_num(row.dist_to_map),
            join_point(&lo),
            join_point(&hi)
        ));
    }
    out
}

#[derive(Serialize)]
struct BayesOutput<'a> {
    c: f64,
    estimate: &'a ArgmaxResult,
    /// Gap of the MAP canonical under the same loss.
    map_gap: &'a ApproxGap,
}

fn cmd_map(ctx: &Context) -> CliResult<()> {
    let d = ctx.density()?;
    let r = map_estimate_with(&d, &ctx.search_box(&d), &ctx.options()?)?;
    ctx.write_json("map.json", &r)
}

fn cmd_bayes(ctx: &Context) -> CliResult<()> {
    let d = ctx.density()?;
    let c = ctx.config.c.ok_or_else(|| CliError::config("bayes needs `c` in the config"))?;
    let loss = LossSpec::new(c).map_err(|e| CliError::config(e.to_string()))?;
    let (sbox, opts) = (ctx.search_box(&d), ctx.options()?);
    let estimate = bayes_estimate_with(&d, &loss, &sbox, &opts)?;
    let map = map_estimate_with(&d, &sbox, &opts)?;
    let map_gap = approx_gap_with(&d, &loss, &map.canonical, &sbox, &opts)?;
    ctx.write_json(
        "bayes.json",
        &BayesOutput {
            c,
            estimate: &estimate,
            map_gap: &map_gap,
        },
    )
}

fn cmd_sweep(ctx: &Context) -> CliResult<()> {
    let d = ctx.density()?;
    let ladder = ctx.ladder()?;
    let trace = sweep_with(&d, &ladder, &ctx.search_box(&d), &ctx.options()?)?;
    ctx.write("sweep.csv", &sweep_csv(&trace))?;
    ctx.write_json("verdict.json", &trace)
}

fn cmd_check(ctx: &Context) -> CliResult<()> {
    let d = ctx.density()?;
    let alphas = ctx.config.alpha_grid.clone().unwrap_or_else(|| DEFAULT_ALPHA_GRID.to_vec());
    let report = check_conditions(&d, &alphas, ctx.seed)?;
    ctx.write_json("conditions.json", &report)
}

fn cmd_hypo(ctx: &Context) -> CliResult<()> {
    let d = ctx.density()?;
    let sbox = ctx.search_box(&d);
    if sbox.dim() != 1 {
        return Err(CliError::from(Error::DimensionMismatch {
            expected: 1,
            got: sbox.dim(),
        }));
    }
    let whole = [[sbox.lo[0], sbox.hi[0]]];
    let pairs = |v: &Option<Vec<[f64; 2]>>| -> Vec<(f64, f64)> {
        v.as_deref().unwrap_or(&whole).iter().map(|[a, b]| (*a, *b)).collect()
    };
    let nu_list = ctx.config.nu_list.clone().unwrap_or_else(|| DEFAULT_NU_LIST.to_vec());
    let report = hypo_diagnostic(&d, &nu_list, &pairs(&ctx.config.boxes), &pairs(&ctx.config.opens))?;
    ctx.write_json("hypo.json", &report)
}

fn dump_counterexample(ctx: &Context, max_bump: u32) -> CliResult<()> {
    let spec = CounterexampleSpec::new(max_bump).map_err(|e| CliError::config(e.to_string()))?;
    let d: Density = counterexample::build(&spec)?.into();
    let mut json = density_to_json(&d)?;
    json.push('\n');
    ctx.write("counterexample.json", &json)?;
    let hi = counterexample::bump_knots(max_bump)[3].ceil() + 0.5;
    ctx.write("counterexample.csv", &sample_csv(&d, -1.0, hi, SAMPLE_STEP))
}

fn cmd_counterexample(ctx: &Context) -> CliResult<()> {
    let max_bump = ctx.config.max_bump.unwrap_or(DEFAULT_MAX_BUMP);
    let nu_max = ctx.config.nu_max.unwrap_or(DEFAULT_COUNTEREXAMPLE_NU_MAX);
    if nu_max == 0 {
        return Err(CliError::config("nu_max must be at least 1"));
    }
    if max_bump < 2 * nu_max {
        return Err(CliError::config(format!(
            "max_bump {max_bump} is below 2·nu_max = {}",
            2 * nu_max
        )));
    }
    dump_counterexample(ctx, max_bump)?;
    let d: Density = counterexample::build(&CounterexampleSpec::new(max_bump)?)?.into();
    let rows = counterexample::domination_table(&d, max_bump, nu_max)?;
    let mut csv = String::from("nu,origin_value,plateau_bound,bayes_sup,canonical\n");
    for r in &rows {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.nu,
            fmt_num(r.origin_value),
            fmt_num(r.plateau_bound),
            fmt_num(r.bayes_sup),
            fmt_num(r.canonical)
        ));
    }
    ctx.write("domination.csv", &csv)?;
    let sbox = ctx
        .config
        .search_box
        .as_ref()
        .map(BoxSpec::to_search_box)
        .unwrap_or_else(|| counterexample::search_box(nu_max));
    let report = counterexample::verify_nonconvergence(&d, nu_max, &sbox)?;
    ctx.write_json("verdict.json", &report)
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> CliResult<()> {
    let ctx = Context::new(&cli.global)?;
    match &cli.command {
        Command::Map => cmd_map(&ctx),
        Command::Bayes => cmd_bayes(&ctx),
        Command::Sweep => cmd_sweep(&ctx),
        Command::Check => cmd_check(&ctx),
        Command::Hypo => cmd_hypo(&ctx),
        Command::Counterexample { action: None } => cmd_counterexample(&ctx),
        Command::Counterexample {
            action: Some(CounterexampleAction::Dump { max_bump }),
        } => dump_counterexample(&ctx, *max_bump),
    }
}

/// Parses `args` (program name first) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
