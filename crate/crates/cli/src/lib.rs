// SPDX-License-Identifier: Apache-2.0

//! The `lichk` command: parse, elaborate, wrap, check, report.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use lichk_core::elab::NbStallMode;
use lichk_core::engine::dimacs::write_dimacs;
use lichk_core::engine::trace::{parse_tsv, to_tsv, to_vcd, waveform};
use lichk_core::engine::{self, EngineError, EngineKind, EngineOptions, Verdict};
use lichk_core::lang;
use lichk_core::pipeline::{build_check_model, CheckConfig, PipelineError};
use lichk_core::wrappers::{CheckModel, EnvValid, ModelKind};

pub const REPORT_SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

pub mod exit {
    pub const PROVEN: i32 = 0;
    pub const FALSIFIED: i32 = 1;
    pub const BOUND_REACHED: i32 = 2;
    pub const TIMEOUT: i32 = 3;
    pub const ERROR: i32 = 4;
}

#[derive(Parser, Debug)]
#[command(name = "lichk", version, about = "Formal checks for latency-insensitive designs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run a check on one or more designs.
    Check(CheckArgs),
    /// Parse and validate a design, then print it back.
    Parse {
        design: PathBuf,
    },
    /// Write the bounded query at exactly `--bound` frames as DIMACS CNF.
    ExportDimacs(ExportArgs),
    /// Re-simulate a trace file and confirm it reaches a bad.
    Replay(ReplayArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    InvalidInput,
    Deadlock,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::InvalidInput => ModelKind::InvalidInput,
            ModelArg::Deadlock => ModelKind::Deadlock,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EngineArg {
    Bmc,
    Kind,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum StallModeArg {
    Ready,
    Handshake,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum EnvValidArg {
    Constrained,
    Free,
}

fn positive_secs(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err("timeout must be positive".into())
    }
}

/// Model construction flags shared by every subcommand that builds a model.
#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelArg,
    /// Idle cycles after which a module with only non-blocking ports counts as stalled.
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..=u32::MAX as u64))]
    pub nb_stall_cycles: u64,
    #[arg(long, value_enum, default_value = "ready")]
    pub nb_stall_mode: StallModeArg,
    /// Deadlock check: hold external input valids at 1 (constrained) or leave them free.
    #[arg(long, value_enum, default_value = "constrained")]
    pub env_valid: EnvValidArg,
    /// Invalid-input check: also compare the ready signals of external inputs.
    #[arg(long)]
    pub strict_input_ready: bool,
}

impl ModelArgs {
    pub fn config(&self) -> CheckConfig {
        CheckConfig {
            nb_stall_cycles: self.nb_stall_cycles,
            nb_stall_mode: match self.nb_stall_mode {
                StallModeArg::Ready => NbStallMode::Ready,
                StallModeArg::Handshake => NbStallMode::Handshake,
            },
            env_valid: match self.env_valid {
                EnvValidArg::Constrained => EnvValid::Constrained,
                EnvValidArg::Free => EnvValid::Free,
            },
            strict_input_ready: self.strict_input_ready,
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Deepest frame to search.
    #[arg(long, default_value_t = 50)]
    pub bound: usize,
    #[arg(long, value_enum, default_value = "bmc")]
    pub engine: EngineArg,
    /// Wall-clock limit per design, in seconds.
    #[arg(long, value_parser = positive_secs)]
    pub timeout: Option<f64>,
    /// Write the JSON report here (an array when several designs are given).
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Trace file stem; `.tsv` and `.vcd` are appended. Defaults to
    /// `<design>.<model>` next to the report, or in the working directory.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Dump every named bus into traces, not just port-level signals.
    #[arg(long)]
    pub trace_all: bool,
    /// Designs checked concurrently.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=256))]
    pub jobs: u64,
    #[arg(required = true)]
    pub designs: Vec<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct ExportArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub bound: usize,
    /// CNF output path (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Variable map sidecar (`node_index frame var` per line).
    #[arg(long)]
    pub varmap: Option<PathBuf>,
    pub design: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    #[arg(long)]
    pub trace: PathBuf,
    pub design: PathBuf,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConfigEcho {
    pub engine: &'static str,
    pub bound: usize,
    pub nb_stall_cycles: u64,
    pub nb_stall_mode: &'static str,
    pub env_valid: &'static str,
    pub strict_input_ready: bool,
    pub timeout_secs: Option<f64>,
    pub seed: u64,
    pub trace_all: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool_version: &'static str,
    pub design: String,
    pub check: &'static str,
    /// falsified, proven, bound_reached, timeout or error.
    pub verdict: &'static str,
    /// Counterexample depth (falsified) or deepest clean depth (timeout).
    pub depth: Option<usize>,
    /// Induction depth (proven).
    pub k: Option<usize>,
    pub bad: Option<String>,
    pub frames_explored: usize,
    pub lemmas: usize,
    pub wall_time_ms: u64,
    pub trace_path: Option<String>,
    pub vcd_path: Option<String>,
    pub message: Option<String>,
    pub config: ConfigEcho,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            "proven" => exit::PROVEN,
            "falsified" => exit::FALSIFIED,
            "bound_reached" => exit::BOUND_REACHED,
            "timeout" => exit::TIMEOUT,
            _ => exit::ERROR,
        }
    }

    pub fn summary(&self) -> String {
        let mut s = format!("{} [{}]: {}", self.design, self.check, self.verdict);
        match self.verdict {
            "falsified" => {
                let _ = write!(s, " at depth {}", self.depth.unwrap_or_default());
                if let Some(b) = &self.bad {
                    let _ = write!(s, " ({b})");
                }
                if let Some(t) = &self.trace_path {
                    let _ = write!(s, "; trace {t}");
                }
            }
            "proven" => {
                let _ = write!(s, " (k = {})", self.k.unwrap_or_default());
            }
            "bound_reached" => {
                let _ = write!(s, " ({} frames)", self.frames_explored);
            }
            _ => {
                if let Some(m) = &self.message {
                    let _ = write!(s, ": {m}");
                }
            }
        }
        s
    }
}

/// Seed for randomized solver heuristics, from `LICHK_SEED` (default 0).
pub fn seed_from_env() -> Result<u64, String> {
    match std::env::var("LICHK_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| format!("LICHK_SEED must be an unsigned integer, got `{v}`")),
        Err(_) => Ok(0),
    }
}

fn read_design(path: &Path) -> Result<String, String> {
    std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn pipeline_message(path: &Path, e: &PipelineError) -> String {
    match e {
        PipelineError::Parse(diags) => {
            diags.iter().map(|d| format!("{}:{d}", path.display())).collect::<Vec<_>>().join("\n")
        }
        other => format!("{}: {other}", path.display()),
    }
}

fn trace_stem(args: &CheckArgs, design: &Path, kind: ModelKind, several: bool) -> PathBuf {
    let name = design.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "design".into());
    let default = format!("{name}.{}", kind.as_str());
    match &args.trace {
        Some(stem) if several => {
            let mut s = stem.clone().into_os_string();
            s.push(format!(".{default}"));
            PathBuf::from(s)
        }
        Some(stem) => stem.clone(),
        None => match args.report.as_ref().and_then(|r| r.parent()) {
            Some(dir) if !dir.as_os_str().is_empty() => dir.join(default),
            _ => PathBuf::from(default),
        },
    }
}

fn with_ext(stem: &Path, ext: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(format!(".{ext}"));
    PathBuf::from(s)
}

pub fn trace_header(kind: ModelKind, cfg: &CheckConfig, depth: usize, bad: &str) -> Vec<(String, String)> {
    [
        ("model", kind.as_str().to_string()),
        ("nb_stall_cycles", cfg.nb_stall_cycles.to_string()),
        ("nb_stall_mode", cfg.nb_stall_mode.as_str().to_string()),
        ("env_valid", cfg.env_valid.as_str().to_string()),
        ("strict", cfg.strict_input_ready.to_string()),
        ("depth", depth.to_string()),
        ("bad", bad.to_string()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect()
}

/// Runs one check and writes its trace files. Never panics on bad input;
/// every failure becomes an `error` report.
pub fn run_check(args: &CheckArgs, design: &Path, seed: u64, several: bool) -> Report {
    let start = Instant::now();
    let kind: ModelKind = args.model.model.into();
    let cfg = args.model.config();
    let mut report = Report {
        schema_version: REPORT_SCHEMA_VERSION,
        tool_version: TOOL_VERSION,
        design: design.display().to_string(),
        check: kind.as_str(),
        verdict: "error",
        depth: None,
        k: None,
        bad: None,
        frames_explored: 0,
        lemmas: 0,
        wall_time_ms: 0,
        trace_path: None,
        vcd_path: None,
        message: None,
        config: ConfigEcho {
            engine: match args.engine {
                EngineArg::Bmc => EngineKind::Bmc.as_str(),
                EngineArg::Kind => EngineKind::KInduction.as_str(),
            },
            bound: args.bound,
            nb_stall_cycles: cfg.nb_stall_cycles,
            nb_stall_mode: cfg.nb_stall_mode.as_str(),
            env_valid: cfg.env_valid.as_str(),
            strict_input_ready: cfg.strict_input_ready,
            timeout_secs: args.timeout,
            seed,
            trace_all: args.trace_all,
        },
    };
    let result = (|| -> Result<(), String> {
        let text = read_design(design)?;
        let model = build_check_model(&text, kind, &cfg).map_err(|e| pipeline_message(design, &e))?;
        let opts = EngineOptions {
            kind: match args.engine {
                EngineArg::Bmc => EngineKind::Bmc,
                EngineArg::Kind => EngineKind::KInduction,
            },
            bound: args.bound,
            timeout: args.timeout.map(Duration::from_secs_f64),
            seed,
            strengthen: true,
        };
        match engine::check(&model, &opts) {
            Ok(r) => {
                report.frames_explored = r.frames_explored;
                report.lemmas = r.lemmas;
                report.verdict = r.verdict.name();
                match r.verdict {
                    Verdict::Falsified { depth, bad, trace } => {
                        report.depth = Some(depth);
                        let stem = trace_stem(args, design, kind, several);
                        let (tsv, vcd) = write_trace(&model, &cfg, &trace, depth, &bad, &stem, args.trace_all)?;
                        report.bad = Some(bad);
                        report.trace_path = Some(tsv.display().to_string());
                        report.vcd_path = Some(vcd.display().to_string());
                    }
                    Verdict::Proven { k } => report.k = Some(k),
                    Verdict::BoundReached { .. } => {}
                }
                Ok(())
            }
            Err(EngineError::ResourceLimit { last_completed }) => {
                report.verdict = "timeout";
                report.depth = last_completed;
                report.frames_explored = last_completed.map_or(0, |d| d + 1);
                report.message = Some("time limit reached".into());
                Ok(())
            }
            Err(e) => Err(format!("{}: {e}", design.display())),
        }
    })();
    if let Err(msg) = result {
        report.verdict = "error";
        report.message = Some(msg);
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    report
}

fn write_trace(
    model: &CheckModel,
    cfg: &CheckConfig,
    trace: &engine::Trace,
    depth: usize,
    bad: &str,
    stem: &Path,
    all: bool,
) -> Result<(PathBuf, PathBuf), String> {
    let replay = trace.replay(&model.netlist).map_err(|e| e.to_string())?;
    let signals = if all { model.netlist.buses() } else { &model.signal_map };
    let wave = waveform(&replay, signals);
    let tsv_path = with_ext(stem, "tsv");
    let vcd_path = with_ext(stem, "vcd");
    let header = trace_header(model.kind, cfg, depth, bad);
    std::fs::write(&tsv_path, to_tsv(&header, trace, &wave))
        .map_err(|e| format!("cannot write {}: {e}", tsv_path.display()))?;
    std::fs::write(&vcd_path, to_vcd(trace, &wave)).map_err(|e| format!("cannot write {}: {e}", vcd_path.display()))?;
    Ok((tsv_path, vcd_path))
}

/// Folds per-design exit codes: errors dominate, then timeouts, then
/// falsifications, then bounded results.
pub fn combined_exit(codes: &[i32]) -> i32 {
    [exit::ERROR, exit::TIMEOUT, exit::FALSIFIED, exit::BOUND_REACHED]
        .into_iter()
        .find(|c| codes.contains(c))
        .unwrap_or(exit::PROVEN)
}

pub fn cmd_check(args: &CheckArgs) -> i32 {
    let seed = match seed_from_env() {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::ERROR;
        }
    };
    let several = args.designs.len() > 1;
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(args.jobs as usize).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::ERROR;
        }
    };
    let reports: Vec<Report> =
        pool.install(|| args.designs.par_iter().map(|d| run_check(args, d, seed, several)).collect());
    for r in &reports {
        if r.verdict == "error" {
            eprintln!("{}", r.summary());
        } else {
            println!("{}", r.summary());
        }
    }
    if let Some(path) = &args.report {
        let json = if several {
            serde_json::to_string_pretty(&reports)
        } else {
            serde_json::to_string_pretty(&reports[0])
        }
        .expect("report serializes");
        if let Err(e) = std::fs::write(path, json + "\n") {
            eprintln!("error: cannot write {}: {e}", path.display());
            return exit::ERROR;
        }
    }
    combined_exit(&reports.iter().map(Report::exit_code).collect::<Vec<_>>())
}

pub fn cmd_parse(design: &Path) -> i32 {
    let text = match read_design(design) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: {e}");
            return exit::ERROR;
        }
    };
    match lang::parse(&text) {
        Ok(ast) => {
            print!("{}", lang::pretty_print(&ast));
            exit::PROVEN
        }
        Err(diags) => {
            for d in diags {
                eprintln!("{}:{d}", design.display());
            }
            exit::ERROR
        }
    }
}

pub fn cmd_export(args: &ExportArgs) -> i32 {
    let run = || -> Result<(), String> {
        let text = read_design(&args.design)?;
        let kind: ModelKind = args.model.model.into();
        let cfg = args.model.config();
        let model = build_check_model(&text, kind, &cfg).map_err(|e| pipeline_message(&args.design, &e))?;
        let (cnf, map) = engine::export_dimacs(&model, args.bound).map_err(|e| e.to_string())?;
        let comments = vec![
            format!("lichk {TOOL_VERSION} {} model of {}", kind.as_str(), args.design.display()),
            format!("satisfiable iff a bad is reachable at depth exactly {}", args.bound),
        ];
        let dimacs = write_dimacs(&cnf, &comments);
        match &args.out {
            Some(p) => std::fs::write(p, dimacs).map_err(|e| format!("cannot write {}: {e}", p.display()))?,
            None => print!("{dimacs}"),
        }
        if let Some(p) = &args.varmap {
            std::fs::write(p, map.to_text()).map_err(|e| format!("cannot write {}: {e}", p.display()))?;
        }
        Ok(())
    };
    match run() {
        Ok(()) => exit::PROVEN,
        Err(e) => {
            eprintln!("error: {e}");
            exit::ERROR
        }
    }
}

fn header_config(h: &std::collections::BTreeMap<String, String>) -> Result<(ModelKind, CheckConfig), String> {
    let get = |k: &str| h.get(k).ok_or_else(|| format!("trace header lacks `{k}`"));
    let kind = match get("model")?.as_str() {
        "invalid-input" => ModelKind::InvalidInput,
        "deadlock" => ModelKind::Deadlock,
        other => return Err(format!("unknown model `{other}` in trace header")),
    };
    let mut cfg = CheckConfig::default();
    if let Ok(v) = get("nb_stall_cycles") {
        cfg.nb_stall_cycles = v.parse().map_err(|_| "bad nb_stall_cycles in trace header".to_string())?;
    }
    if let Ok(v) = get("nb_stall_mode") {
        cfg.nb_stall_mode = match v.as_str() {
            "ready" => NbStallMode::Ready,
            "handshake" => NbStallMode::Handshake,
            _ => return Err("bad nb_stall_mode in trace header".into()),
        };
    }
    if let Ok(v) = get("env_valid") {
        cfg.env_valid = match v.as_str() {
            "constrained" => EnvValid::Constrained,
            "free" => EnvValid::Free,
            _ => return Err("bad env_valid in trace header".into()),
        };
    }
    if let Ok(v) = get("strict") {
        cfg.strict_input_ready = v.parse().map_err(|_| "bad strict flag in trace header".to_string())?;
    }
    Ok((kind, cfg))
}

/// Exit 0 when the trace reproduces a bad in its last cycle, 1 when it
/// replays but does not, 4 on errors.
pub fn cmd_replay(args: &ReplayArgs) -> i32 {
    let run = || -> Result<bool, String> {
        let text = read_design(&args.design)?;
        let trace_text = std::fs::read_to_string(&args.trace)
            .map_err(|e| format!("cannot read {}: {e}", args.trace.display()))?;
        let (header, trace) = parse_tsv(&trace_text).map_err(|e| format!("{}: {e}", args.trace.display()))?;
        let (kind, cfg) = header_config(&header)?;
        let model = build_check_model(&text, kind, &cfg).map_err(|e| pipeline_message(&args.design, &e))?;
        let replay = trace.replay(&model.netlist).map_err(|e| e.to_string())?;
        if let Some(t) = replay.constraint_violation {
            println!("trace violates an environment constraint in cycle {t}");
            return Ok(false);
        }
        if replay.bads_fired.is_empty() {
            println!("no bad is asserted in the final cycle {}", trace.depth());
            return Ok(false);
        }
        if let Some(expected) = header.get("bad") {
            if !replay.bads_fired.contains(expected) {
                println!("final cycle asserts {:?}, not {expected}", replay.bads_fired);
                return Ok(false);
            }
        }
        println!("confirmed: {} asserted at depth {}", replay.bads_fired.join(", "), trace.depth());
        Ok(true)
    };
    match run() {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e) => {
            eprintln!("error: {e}");
            exit::ERROR
        }
    }
}

pub fn main_with(cli: Cli) -> i32 {
    match &cli.command {
        Command::Check(a) => cmd_check(a),
        Command::Parse { design } => cmd_parse(design),
        Command::ExportDimacs(a) => cmd_export(a),
        Command::Replay(a) => cmd_replay(a),
    }
}
