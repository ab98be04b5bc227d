//! Command-line front end. [`run`] executes one command and returns its
//! output text; the binary only handles process concerns.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::classifier::{
    default_resolution, is_degraded, is_deterministic, is_less_noisy_grid, is_more_capable_grid, ClassVerdict,
};
use crate::error::{Error, Result};
use crate::io::{self, to_canonical_json};
use crate::optimizer::{self, maximize_target, rate_index, FoundScheme, SearchConfig, Target, Theorem};
use crate::polytope::{region_subset, regions_equal, RateRegion, RATE_VARS};
use crate::probability::{AuxScheme, Channel, JointPmf};
use crate::rate_regions::{
    augment_with_totals, deterministic_region, mi_constants, more_capable_region, project_raw_to_theorem1,
    raw_achievability_system, theorem1_region, DETERMINISTIC_TOL,
};
use crate::simulator::{split_rates, SchemeConfig, Simulator, Typicality};

const ABOUT: &str = "Rate regions, capacity regions and coding simulation for two-receiver broadcast channels \
with receiver message side information.";

const LONG_ABOUT: &str = "Rate regions, capacity regions and coding simulation for two-receiver broadcast channels \
with receiver message side information.

Five independent messages are sent over X -> (Y1, Y2):
  M1  common, decoded by both receivers          (rate R1)
  M2  private to receiver 1                       (rate R2)
  M3  private to receiver 2                       (rate R3)
  M4  wanted by receiver 1, already known at receiver 2  (rate R4)
  M5  wanted by receiver 2, already known at receiver 1  (rate R5)
Receiver 1 decodes (M1, M2, M4) knowing M5; receiver 2 decodes (M1, M3, M5) knowing M4.
Rates are in bits per channel use.

Theorems: t1 is the inner bound over p(u0,u1,u2) and x = gamma(u0,u1,u2); t2 is the capacity region \
of deterministic channels over p(u,x); t3 is the capacity region of more-capable channels over p(u,x).

Environment: BCSI_THREADS caps worker threads (0 or unset = one per core).
Exit codes: 1 malformed input or bad arguments, 2 size guard exceeded, 3 internal consistency failure.";

#[derive(Debug, Parser)]
#[command(name = "bcsi", version, about = ABOUT, long_about = LONG_ABOUT)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoremArg {
    T1,
    T2,
    T3,
}

impl From<TheoremArg> for Theorem {
    fn from(t: TheoremArg) -> Self {
        match t {
            TheoremArg::T1 => Theorem::T1,
            TheoremArg::T2 => Theorem::T2,
            TheoremArg::T3 => Theorem::T3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TypicalityArg {
    Robust,
    Entropy,
}

#[derive(Debug, Args)]
pub struct Common {
    /// Channel file: {"x_size", "y1_size", "y2_size", "kernel"}.
    #[arg(long)]
    pub channel: PathBuf,
    /// Write output here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Lattice resolution of the search.
    #[arg(long)]
    pub resolution: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Random starts in addition to the lattice starts, plus one.
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Auxiliary alphabet caps as "a,b,c" (|U0|,|U1|,|U2|) or "k" (|U|).
    #[arg(long)]
    pub u_sizes: Option<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a channel file, and a scheme or p(u,x) file if given.
    Validate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: Option<PathBuf>,
        /// Read --scheme as p(u,x) (t2, t3) instead of p(u0,u1,u2) with gamma (t1).
        #[arg(long, value_enum, default_value = "t1")]
        theorem: TheoremArg,
    },
    /// Deterministic, degraded, more-capable and less-noisy verdicts.
    Classify {
        #[command(flatten)]
        common: Common,
        /// Lattice resolution for the more-capable and less-noisy scans.
        #[arg(long)]
        resolution: Option<usize>,
    },
    /// Region of one theorem at one scheme.
    Region {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        /// Scheme file for t1, p(u,x) file for t2 and t3.
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Raw coding conditions, their projection, and the projection
    /// compared with the t1 region.
    RawProject {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: PathBuf,
    },
    /// Maximize a weighted rate sum over the union region.
    Optimize {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        /// Five nonnegative weights "w1,w2,w3,w4,w5".
        #[arg(long)]
        weights: String,
        /// Pinned rates, e.g. "R4=0,R5=0.1".
        #[arg(long)]
        fixed: Option<String>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Boundary of the union region in a plane of two rates, as CSV.
    Slice {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        theorem: TheoremArg,
        /// The two plotted rates, e.g. "R2,R3".
        #[arg(long)]
        free: String,
        /// Pinned values of the other rates (default 0), e.g. "R1=0.1".
        #[arg(long)]
        fixed: Option<String>,
        #[arg(long, default_value_t = optimizer::DEFAULT_DIRECTIONS)]
        directions: usize,
        /// Also write the schemes behind each scheme_id as JSON.
        #[arg(long)]
        schemes: Option<PathBuf>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Monte Carlo error probability of the random code.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        scheme: PathBuf,
        /// Target rates "R1,R2,R3,R4,R5".
        #[arg(long)]
        rates: String,
        /// Layer split "R21,R31" (default halves).
        #[arg(long)]
        split: Option<String>,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 500)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Decoding slack; the encoder uses half of it.
        #[arg(long, default_value_t = 0.3)]
        eps: f64,
        #[arg(long, value_enum, default_value = "entropy")]
        typicality: TypicalityArg,
        /// Share one codebook across all trials.
        #[arg(long)]
        fixed_codebook: bool,
        /// Cap on the product of all message and bin set sizes.
        #[arg(long)]
        max_product: Option<u128>,
        /// Suppress the progress lines on standard error.
        #[arg(long)]
        quiet: bool,
    },
    /// Containment and equality of two region files.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

impl Command {
    pub fn out(&self) -> Option<&Path> {
        match self {
            Command::Validate { common, .. }
            | Command::Classify { common, .. }
            | Command::Region { common, .. }
            | Command::RawProject { common, .. }
            | Command::Optimize { common, .. }
            | Command::Slice { common, .. }
            | Command::Simulate { common, .. } => common.out.as_deref(),
            Command::Compare { out, .. } => out.as_deref(),
        }
    }
}

fn bad(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn floats(text: &str, len: usize, what: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad(format!("cannot read {what} entry {s:?}"))))
        .collect::<Result<_>>()?;
    if v.len() != len {
        return Err(bad(format!("{what} needs {len} comma-separated values, got {}", v.len())));
    }
    Ok(v)
}

fn parse_fixed(text: Option<&str>) -> Result<[Option<f64>; 5]> {
    let mut fixed = [None; 5];
    for part in text.unwrap_or("").split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, value) =
            part.split_once('=').ok_or_else(|| bad(format!("fixed rate {part:?} is not NAME=VALUE")))?;
        let v: f64 = value.trim().parse().map_err(|_| bad(format!("cannot read fixed value {value:?}")))?;
        fixed[rate_index(name.trim())?] = Some(v);
    }
    Ok(fixed)
}

fn load_channel(path: &Path) -> Result<Channel> {
    io::channel_from_json(&io::read_file(path)?)
}

fn load_scheme(path: &Path, ch: &Channel) -> Result<AuxScheme> {
    io::scheme_from_json(&io::read_file(path)?, ch.x_size())
}

fn load_ux(path: &Path, ch: &Channel) -> Result<JointPmf> {
    io::ux_from_json(&io::read_file(path)?, ch.x_size())
}

fn search_config(ch: &Channel, theorem: Theorem, args: &SearchArgs) -> Result<SearchConfig> {
    let mut cfg = SearchConfig::for_channel(ch, theorem);
    if let Some(r) = args.resolution {
        cfg.grid_resolution = r;
    }
    if let Some(r) = args.restarts {
        cfg.restarts = r;
    }
    cfg.seed = args.seed;
    if let Some(s) = &args.u_sizes {
        let v: Vec<usize> = s
            .split(',')
            .map(|p| p.trim().parse::<usize>().map_err(|_| bad(format!("cannot read u-sizes entry {p:?}"))))
            .collect::<Result<_>>()?;
        match (theorem, v.as_slice()) {
            (Theorem::T1, [a, b, c]) => cfg.aux_sizes = [*a, *b, *c],
            (Theorem::T2 | Theorem::T3, [k]) => cfg.aux_sizes = [*k, 1, 1],
            _ => return Err(bad("u-sizes takes three values for t1 and one for t2 and t3")),
        }
    }
    Ok(cfg)
}

fn found_value(opt: &optimizer::Optimum, ch: &Channel) -> Result<Value> {
    Ok(match &opt.scheme {
        FoundScheme::Aux(s) => io::scheme_to_value(s)?,
        FoundScheme::Ux(j) => {
            let mut v = io::ux_to_value(j);
            v["aux_scheme"] = io::scheme_to_value(&opt.aux_scheme(ch)?)?;
            v
        }
    })
}

#[derive(Serialize)]
struct Validation {
    valid: bool,
    x_size: usize,
    y1_size: usize,
    y2_size: usize,
    deterministic: bool,
    scheme: Option<Value>,
}

fn classify(ch: &Channel, resolution: Option<usize>) -> Result<Vec<ClassVerdict>> {
    let nx = ch.x_size();
    Ok(vec![
        is_deterministic(ch),
        is_degraded(ch),
        is_more_capable_grid(ch, resolution.unwrap_or_else(|| default_resolution(nx)))?,
        is_less_noisy_grid(ch, 2, resolution.unwrap_or_else(|| default_resolution(2 * nx)))?,
    ])
}

/// Executes one command and returns the text it writes.
pub fn run(cmd: &Command) -> Result<String> {
    match cmd {
        Command::Validate { common, scheme, theorem } => {
            let ch = load_channel(&common.channel)?;
            let scheme = match scheme {
                None => None,
                Some(p) if *theorem == TheoremArg::T1 => Some(io::scheme_to_value(&load_scheme(p, &ch)?)?),
                Some(p) => Some(io::ux_to_value(&load_ux(p, &ch)?)),
            };
            to_canonical_json(&Validation {
                valid: true,
                x_size: ch.x_size(),
                y1_size: ch.y1_size(),
                y2_size: ch.y2_size(),
                deterministic: ch.deterministic_maps(DETERMINISTIC_TOL).is_some(),
                scheme,
            })
        }
        Command::Classify { common, resolution } => {
            let ch = load_channel(&common.channel)?;
            to_canonical_json(&classify(&ch, *resolution)?)
        }
        Command::Region { common, theorem, scheme } => {
            let ch = load_channel(&common.channel)?;
            let region = match theorem {
                TheoremArg::T1 => theorem1_region(&load_scheme(scheme, &ch)?, &ch)?,
                TheoremArg::T2 => deterministic_region(&load_ux(scheme, &ch)?, &ch)?,
                TheoremArg::T3 => more_capable_region(&load_ux(scheme, &ch)?, &ch)?,
            };
            to_canonical_json(&io::region_to_value(&region))
        }
        Command::RawProject { common, scheme } => {
            let ch = load_channel(&common.channel)?;
            let s = load_scheme(scheme, &ch)?;
            let consts = mi_constants(&s, &ch)?;
            let raw = raw_achievability_system(&consts)?;
            let projected = project_raw_to_theorem1(&augment_with_totals(raw.clone())?)?;
            let direct = theorem1_region(&s, &ch)?;
            let equal = regions_equal(&projected, &direct, &RateRegion::default_box())?;
            to_canonical_json(&json!({
                "mi_constants": consts.bits(),
                "raw": io::system_to_value(&raw, Some("raw coding conditions")),
                "projection": io::region_to_value(&projected),
                "theorem1": io::region_to_value(&direct),
                "equal": equal,
            }))
        }
        Command::Optimize { common, theorem, weights, fixed, search } => {
            let ch = load_channel(&common.channel)?;
            let theorem: Theorem = (*theorem).into();
            let w = floats(weights, 5, "weights")?;
            let target = Target { weights: [w[0], w[1], w[2], w[3], w[4]], fixed: parse_fixed(fixed.as_deref())? };
            let cfg = search_config(&ch, theorem, search)?;
            let opt = maximize_target(&ch, &target, theorem, &cfg)?;
            to_canonical_json(&json!({
                "theorem": theorem,
                "weights": target.weights,
                "fixed": target.fixed,
                "value": opt.value,
                "point": opt.point,
                "scheme_id": opt.scheme_id(),
                "scheme": found_value(&opt, &ch)?,
                "evaluations": opt.evaluations,
                "config": cfg,
            }))
        }
        Command::Slice { common, theorem, free, fixed, directions, schemes, search } => {
            let ch = load_channel(&common.channel)?;
            let theorem: Theorem = (*theorem).into();
            let names: Vec<&str> = free.split(',').map(str::trim).collect();
            let [a, b] = names.as_slice() else {
                return Err(bad("--free takes two rate names, e.g. R2,R3"));
            };
            let (ia, ib) = (rate_index(a)?, rate_index(b)?);
            let cfg = search_config(&ch, theorem, search)?;
            let (points, optima) =
                optimizer::union_slice_2d(&ch, (ia, ib), parse_fixed(fixed.as_deref())?, theorem, &cfg, *directions)?;
            if let Some(path) = schemes {
                let mut map = serde_json::Map::new();
                for o in &optima {
                    map.entry(o.scheme_id()).or_insert(found_value(o, &ch)?);
                }
                write_output(Some(path), &to_canonical_json(&Value::Object(map))?)?;
            }
            Ok(optimizer::slice_csv(&points, (RATE_VARS[ia], RATE_VARS[ib])))
        }
        Command::Simulate {
            common,
            scheme,
            rates,
            split,
            n,
            trials,
            seed,
            eps,
            typicality,
            fixed_codebook,
            max_product,
            quiet,
        } => {
            let ch = load_channel(&common.channel)?;
            let s = load_scheme(scheme, &ch)?;
            let r = floats(rates, 5, "rates")?;
            let split = match split {
                Some(t) => {
                    let v = floats(t, 2, "split")?;
                    Some((v[0], v[1]))
                }
                None => None,
            };
            let consts = mi_constants(&s, &ch)?;
            let split_rates = split_rates(&consts, [r[0], r[1], r[2], r[3], r[4]], split)?;
            let mut cfg = SchemeConfig::new(s, *n, split_rates, *eps, *seed);
            cfg.typicality = match typicality {
                TypicalityArg::Robust => Typicality::Robust,
                TypicalityArg::Entropy => Typicality::Entropy,
            };
            cfg.fresh_codebooks = !fixed_codebook;
            if let Some(m) = max_product {
                cfg.max_product = *m;
            }
            let sim = Simulator::new(&ch, cfg)?;
            let progress = |done: usize, total: usize| eprintln!("simulate: {done}/{total} trials");
            let report = sim.estimate_error(*trials, if *quiet { None } else { Some(&progress) })?;
            to_canonical_json(&report)
        }
        Command::Compare { a, b, .. } => {
            let ra = io::region_from_json(&io::read_file(a)?)?;
            let rb = io::region_from_json(&io::read_file(b)?)?;
            let bounds = RateRegion::default_box();
            let ab = region_subset(&ra, &rb, &bounds)?;
            let ba = region_subset(&rb, &ra, &bounds)?;
            to_canonical_json(&json!({ "a_subset_b": ab, "b_subset_a": ba, "equal": ab && ba }))
        }
    }
}

/// Writes `text` to `path`, or to standard output when `None`.
pub fn write_output(path: Option<&Path>, text: &str) -> Result<()> {
    use std::io::Write;
    match path {
        Some(p) => {
            std::fs::write(p, text).map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", p.display())))
        }
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| Error::Internal(format!("stdout: {e}")))
        }
    }
}

/// Applies `BCSI_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<()> {
    let n = match std::env::var("BCSI_THREADS") {
        Ok(v) => v.trim().parse::<usize>().map_err(|_| bad(format!("BCSI_THREADS must be a count, got {v:?}")))?,
        Err(_) => 0,
    };
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Error::Internal(e.to_string()))
}
