//! `rcc` — rate-equivocation analysis for relay channels with confidential
//! messages.
//!
//! Exit codes: 0 success, 1 usage, 2 parse/validation failure, 3 search
//! budget exceeded, 4 invariant-suite failure.

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rcc_core::check::run_suite;
use rcc_core::gaussian::{gaussian_boundary, gaussian_membership, GaussianRegionId, GaussianSpec};
use rcc_core::info::{cond_entropy, cond_mutual_information, VarSet};
use rcc_core::io::{
    gaussian_csv, parse_channel, parse_input, trace_csv, write_input, write_input_v, ParsedInput,
};
use rcc_core::prob::{make_joint, make_joint_v};
use rcc_core::regions::{
    boundary_trace, secrecy_capacity_bounds, BoundId, EncoderMode, SearchConfig, Slice,
    WitnessInput,
};
use rcc_core::sim::{run_simulation, SimConfig, SimRates, SingleLetterInfo, CODEBOOK_CAP};
use rcc_core::{Channel, Joint};

#[derive(Parser)]
#[command(
    name = "rcc",
    version,
    about = "Rate-equivocation regions, secrecy capacities, and block-Markov coding simulation for relay channels with confidential messages",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify a channel (degraded, reversely degraded, semi-deterministic, class NL)
    Classify {
        /// Channel JSON file
        channel: PathBuf,
        /// Classification tolerance on the residuals
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Evaluate an information expression like "I(X;Y|US)" or "H(S|Z)" on a channel + input
    Mi {
        /// Channel JSON file
        channel: PathBuf,
        /// Input JSON file
        input: PathBuf,
        /// Expression: I(<set>;<set>[|<set>]) or H(<set>[|<set>]), sets over U,V,S,X,Y,Z
        #[arg(long)]
        expr: String,
    },
    /// Trace the boundary of a rate-equivocation bound over searched input distributions
    Region {
        /// Bound id: d-in-tilde, d-out-tilde, d-in, d-out, d-out-hat, s-in-tilde, s-out-tilde, s-in, s-out
        #[arg(long)]
        bound: String,
        /// Channel JSON file
        #[arg(long)]
        channel: PathBuf,
        /// Cross-section: full, r0-zero, re-eq-r1
        #[arg(long, default_value = "full")]
        slice: String,
        /// Number of R0 grid points
        #[arg(long = "r0-grid", default_value_t = 9)]
        r0_grid: usize,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the witness achieving the top equivocation point (input JSON schema)
        #[arg(long = "witness-out")]
        witness_out: Option<PathBuf>,
    },
    /// Sweep a Gaussian region or test membership of one rate triple
    Gaussian {
        /// Region id: gd-in, gd-out, gs-in, gs-out, gd1e-in, gd1e-out, gs1e-in, gs1e-out, gcss-in, gcss-out
        #[arg(long)]
        region: String,
        #[arg(long = "P1")]
        p1: f64,
        #[arg(long = "P2")]
        p2: f64,
        #[arg(long = "N1")]
        n1: f64,
        #[arg(long = "N2")]
        n2: f64,
        #[arg(long)]
        rho: f64,
        /// Parameter grid resolution
        #[arg(long, default_value_t = 1001)]
        resolution: usize,
        /// Rate triple "R0,R1,Re": print a membership verdict instead of sweeping
        #[arg(long)]
        triple: Option<String>,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search lower/upper bounds on the secrecy capacity of a channel
    Secrecy {
        /// Channel JSON file
        #[arg(long)]
        channel: PathBuf,
        /// Encoder class: det or sto
        #[arg(long)]
        mode: String,
        #[command(flatten)]
        search: SearchArgs,
        /// Write the achieving input distribution here (input JSON schema)
        #[arg(long = "witness-out")]
        witness_out: Option<PathBuf>,
    },
    /// Monte Carlo simulation of the block-Markov coding scheme
    Simulate {
        /// Channel JSON file
        #[arg(long)]
        channel: PathBuf,
        /// Input JSON file (plain, over (u,s,x))
        #[arg(long)]
        input: PathBuf,
        /// Block length
        #[arg(long)]
        n: usize,
        /// Number of blocks per trial
        #[arg(long, default_value_t = 4)]
        blocks: usize,
        /// Number of trials
        #[arg(long, default_value_t = 400)]
        trials: usize,
        /// Decoder threshold margin
        #[arg(long, default_value_t = 0.05)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Use the scheme's canonical rate choice derived from the input
        #[arg(long = "preset-rates", default_value_t = false)]
        preset_rates: bool,
        /// Common-message rate (overrides the preset)
        #[arg(long)]
        r0: Option<f64>,
        /// Relay forwarding rate (overrides the preset)
        #[arg(long)]
        r: Option<f64>,
        /// Protected private rate (overrides the preset)
        #[arg(long)]
        r1: Option<f64>,
        /// Sacrificial private rate (overrides the preset)
        #[arg(long)]
        r2: Option<f64>,
        /// Cap on total codewords |W||T||J||L|
        #[arg(long, default_value_t = CODEBOOK_CAP)]
        cap: u64,
        /// Relay forwards the true cell index (no error propagation)
        #[arg(long = "genie-relay", default_value_t = false)]
        genie_relay: bool,
        /// Write the JSON report here as well as stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named invariant suite: prob, info, regions, gaussian, all
    Check {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct SearchArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 48)]
    restarts: usize,
    /// Simplex grid resolution for seeding
    #[arg(long, default_value_t = 4)]
    grid: usize,
    /// Hill-climbing sweeps per step size
    #[arg(long, default_value_t = 2)]
    refine: usize,
    /// Cap on |U| (defaults to min(class cap, 4))
    #[arg(long = "max-u")]
    max_u: Option<usize>,
    /// Cap on |V| (defaults to min(class cap, 4))
    #[arg(long = "max-v")]
    max_v: Option<usize>,
    /// Search with the full cardinality caps of the distribution classes
    #[arg(long = "full-caps", default_value_t = false)]
    full_caps: bool,
    /// Wall-clock budget in milliseconds
    #[arg(long = "budget-ms")]
    budget_ms: Option<u64>,
}

impl SearchArgs {
    fn to_config(&self) -> SearchConfig {
        SearchConfig {
            restarts: self.restarts,
            resolution: self.grid,
            refine_steps: self.refine,
            seed: self.seed,
            budget_ms: self.budget_ms,
            max_u: self.max_u,
            max_v: self.max_v,
            full_caps: self.full_caps,
        }
    }
}

/// Command failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn validation(message: impl fmt::Display) -> Self {
        Self { code: 2, message: message.to_string() }
    }

    fn budget(message: impl fmt::Display) -> Self {
        Self { code: 3, message: message.to_string() }
    }

    fn suite(message: impl fmt::Display) -> Self {
        Self { code: 4, message: message.to_string() }
    }
}

fn main() -> ExitCode {
    if let Ok(threads) = std::env::var("RCC_THREADS") {
        if let Ok(threads) = threads.parse::<usize>() {
            if threads >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err)
            if matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            print!("{err}");
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            eprint!("{err}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn read_file(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn load_channel(path: &PathBuf) -> Result<Channel, Failure> {
    parse_channel(&read_file(path)?)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))
}

fn load_joint(channel: &Channel, path: &PathBuf) -> Result<Joint, Failure> {
    let input = parse_input(&read_file(path)?)
        .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
    match input {
        ParsedInput::Plain(input) => make_joint(channel, &input).map_err(Failure::validation),
        ParsedInput::WithV(input) => make_joint_v(channel, &input).map_err(Failure::validation),
    }
}

fn write_or_print(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Failure::validation(format!("{}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Classify { channel, tol } => {
            if tol <= 0.0 {
                return Err(Failure::validation("tol must be > 0"));
            }
            let ch = load_channel(&channel)?;
            let report = ch.classify(tol);
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
            Ok(())
        }
        Command::Mi { channel, input, expr } => {
            let ch = load_channel(&channel)?;
            let joint = load_joint(&ch, &input)?;
            let value = eval_expression(&joint, &expr)?;
            println!("{value}");
            Ok(())
        }
        Command::Region { bound, channel, slice, r0_grid, search, out, witness_out } => {
            let bound_id = BoundId::parse(&bound)
                .ok_or_else(|| Failure::validation(format!("unknown bound id {bound:?}")))?;
            let slice_id = Slice::parse(&slice)
                .ok_or_else(|| Failure::validation(format!("unknown slice {slice:?}")))?;
            let ch = load_channel(&channel)?;
            let cfg = search.to_config();
            let trace = boundary_trace(bound_id, &ch, &cfg, r0_grid, slice_id)
                .map_err(Failure::validation)?;
            let csv = trace_csv(bound_id.name(), &trace.points);
            write_or_print(&out, &csv)?;
            if let Some(path) = witness_out {
                // the witness that supports the largest equivocation
                let best = trace
                    .witnesses
                    .iter()
                    .max_by(|a, b| a.triple.re.partial_cmp(&b.triple.re).expect("finite"))
                    .expect("trace collects witnesses");
                let text = match &best.input {
                    WitnessInput::Plain(input) => write_input(input),
                    WitnessInput::WithV(input) => write_input_v(input),
                };
                std::fs::write(&path, text)
                    .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
            }
            if trace.budget_exceeded {
                return Err(Failure::budget("search budget exceeded; trace uses best-so-far witnesses"));
            }
            Ok(())
        }
        Command::Gaussian { region, p1, p2, n1, n2, rho, resolution, triple, out } => {
            let region_id = GaussianRegionId::parse(&region)
                .ok_or_else(|| Failure::validation(format!("unknown region id {region:?}")))?;
            let spec = GaussianSpec::new(p1, p2, n1, n2, rho).map_err(Failure::validation)?;
            match triple {
                Some(text) => {
                    let t = parse_triple(&text)?;
                    let m = gaussian_membership(region_id, &spec, t, resolution)
                        .map_err(Failure::validation)?;
                    println!(
                        "{}",
                        serde_json::json!({
                            "region": region_id.name(),
                            "member": m.member,
                            "theta": m.witness.theta,
                            "eta": m.witness.eta,
                            "best_slack": m.best_slack,
                        })
                    );
                    Ok(())
                }
                None => {
                    let points = gaussian_boundary(region_id, &spec, resolution)
                        .map_err(Failure::validation)?;
                    write_or_print(&out, &gaussian_csv(region_id.name(), &points))
                }
            }
        }
        Command::Secrecy { channel, mode, search, witness_out } => {
            let mode = EncoderMode::parse(&mode)
                .ok_or_else(|| Failure::validation(format!("unknown mode {mode:?} (det|sto)")))?;
            let ch = load_channel(&channel)?;
            let bounds =
                secrecy_capacity_bounds(&ch, mode, &search.to_config()).map_err(Failure::validation)?;
            println!(
                "{}",
                serde_json::json!({
                    "mode": match mode { EncoderMode::Deterministic => "det", EncoderMode::Stochastic => "sto" },
                    "lower": bounds.lower,
                    "upper": bounds.upper,
                })
            );
            if let Some(path) = witness_out {
                let text = match &bounds.lower_witness.input {
                    WitnessInput::Plain(input) => write_input(input),
                    WitnessInput::WithV(input) => write_input_v(input),
                };
                std::fs::write(&path, text)
                    .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Simulate {
            channel,
            input,
            n,
            blocks,
            trials,
            eps,
            seed,
            preset_rates,
            r0,
            r,
            r1,
            r2,
            cap,
            genie_relay,
            out,
        } => {
            let ch = load_channel(&channel)?;
            let parsed = parse_input(&read_file(&input)?)
                .map_err(|e| Failure::validation(format!("{}: {e}", input.display())))?;
            let plain = match parsed {
                ParsedInput::Plain(p) => p,
                ParsedInput::WithV(_) => {
                    return Err(Failure::validation(
                        "simulate takes a plain input over (u,s,x); the second auxiliary is not part of the coding scheme",
                    ))
                }
            };
            let mut rates = if preset_rates {
                SingleLetterInfo::compute(&ch, &plain)
                    .map_err(Failure::validation)?
                    .preset_rates(eps)
            } else {
                SimRates { r0: 0.0, r: 0.0, r1: 0.0, r2: 0.0 }
            };
            if !preset_rates && (r0.is_none() || r.is_none() || r1.is_none() || r2.is_none()) {
                return Err(Failure::validation(
                    "either pass --preset-rates or all of --r0 --r --r1 --r2",
                ));
            }
            if let Some(v) = r0 {
                rates.r0 = v;
            }
            if let Some(v) = r {
                rates.r = v;
            }
            if let Some(v) = r1 {
                rates.r1 = v;
            }
            if let Some(v) = r2 {
                rates.r2 = v;
            }
            let mut cfg = SimConfig::new(ch, plain, n, blocks, trials, rates, eps, seed)
                .map_err(Failure::validation)?;
            cfg.codebook_cap = cap;
            cfg.genie_relay = genie_relay;
            cfg.validate().map_err(Failure::validation)?;
            let report = run_simulation(&cfg).map_err(Failure::validation)?;
            let text = serde_json::to_string_pretty(&report).expect("report serializes");
            println!("{text}");
            if let Some(path) = out {
                std::fs::write(&path, format!("{text}\n"))
                    .map_err(|e| Failure::validation(format!("{}: {e}", path.display())))?;
            }
            Ok(())
        }
        Command::Check { suite, seed } => {
            let reports = run_suite(&suite, seed)
                .ok_or_else(|| Failure::validation(format!("unknown suite {suite:?}")))?;
            let mut all_ok = true;
            for report in &reports {
                for check in &report.checks {
                    let status = if check.passed { "pass" } else { "FAIL" };
                    all_ok &= check.passed;
                    if check.detail.is_empty() {
                        println!("[{status}] {}: {}", report.suite, check.name);
                    } else {
                        println!("[{status}] {}: {} ({})", report.suite, check.name, check.detail);
                    }
                }
            }
            if all_ok {
                Ok(())
            } else {
                Err(Failure::suite("invariant suite failed"))
            }
        }
    }
}

fn parse_triple(text: &str) -> Result<rcc_core::Rates, Failure> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(Failure::validation("triple must be R0,R1,Re"));
    }
    let mut vals = [0.0f64; 3];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|e| Failure::validation(format!("bad rate {part:?}: {e}")))?;
    }
    rcc_core::Rates::new(vals[0], vals[1], vals[2]).map_err(Failure::validation)
}

/// Evaluates `I(<set>;<set>[|<set>])` or `H(<set>[|<set>])` on a joint.
fn eval_expression(joint: &Joint, expr: &str) -> Result<f64, Failure> {
    let expr = expr.trim();
    let bad = |msg: &str| Failure::validation(format!("bad expression {expr:?}: {msg}"));
    let (head, rest) = expr.split_at(expr.len().min(1));
    let inner = rest
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| bad("expected parentheses"))?;
    let (body, cond) = match inner.split_once('|') {
        Some((b, c)) => (b, Some(c)),
        None => (inner, None),
    };
    let cond_set = match cond {
        Some(c) => VarSet::parse(c.trim()).map_err(|e| bad(&e.to_string()))?,
        None => VarSet::EMPTY,
    };
    match head {
        "I" => {
            let (a, b) = body.split_once(';').ok_or_else(|| bad("I needs two sets split by ';'"))?;
            let a = VarSet::parse(a.trim()).map_err(|e| bad(&e.to_string()))?;
            let b = VarSet::parse(b.trim()).map_err(|e| bad(&e.to_string()))?;
            cond_mutual_information(joint, a, b, cond_set).map_err(|e| bad(&e.to_string()))
        }
        "H" => {
            let a = VarSet::parse(body.trim()).map_err(|e| bad(&e.to_string()))?;
            cond_entropy(joint, a, cond_set).map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("expected I(...) or H(...)")),
    }
}
