//! Command-line front end: config files, command dispatch, reports and point clouds.

pub mod attractor;
pub mod config;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::Parser;

pub use attractor::{attractor_points, write_attractor_csv};
pub use config::{parse_config, RunConfig, COMMANDS};
pub use run::{emit_report, run_command, Report, Status};

use crate::hypothesis::HypothesisMode;
use crate::thermo::PotentialKind;

#[derive(Debug, Parser)]
#[command(name = "qmcocycle", version, about = "Spannability, quasi-multiplicativity and pressure for matrix cocycles")]
pub struct Args {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// One of check-hypotheses, spannability, qm, pressure, s0, r0, affinity-dim, mixing, export-attractor.
    #[arg(long)]
    pub command: Option<String>,
    /// Report path (default: standard output).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for CSV tables and point clouds.
    #[arg(long)]
    pub csv_dir: Option<PathBuf>,
    /// Seed for randomized searches [default: 42].
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads [default: logical cores].
    #[arg(long)]
    pub threads: Option<usize>,
    /// Word budget per enumeration, e.g. 2e7 [default: 2e7].
    #[arg(long, value_parser = parse_budget)]
    pub budget: Option<u64>,

    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<HypothesisMode>,
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub s: Option<f64>,
    /// Comma-separated list of s values.
    #[arg(long, value_delimiter = ',')]
    pub s_grid: Option<Vec<f64>>,
    /// norm_s, sv_s or sv_s_squared.
    #[arg(long, value_parser = parse_potential)]
    pub potential: Option<PotentialKind>,
    /// Report the square pressure.
    #[arg(long)]
    pub square: bool,
    /// Whitespace-separated target words, e.g. "1 11 111".
    #[arg(long)]
    pub targets: Option<String>,
    #[arg(long)]
    pub tail_start: Option<usize>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub psi_tail_start: Option<usize>,
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long)]
    pub gap: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
}

fn parse_budget(s: &str) -> Result<u64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v >= 1.0 && v.is_finite() && v.fract() == 0.0 && v <= u64::MAX as f64 {
        Ok(v as u64)
    } else {
        Err(format!("budget must be a positive whole number, got {s}"))
    }
}

fn parse_mode(s: &str) -> Result<HypothesisMode, String> {
    s.parse().map_err(|e: crate::Error| e.to_string())
}

fn parse_potential(s: &str) -> Result<PotentialKind, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("unknown potential {s:?} (expected norm_s, sv_s or sv_s_squared)"))
}

impl Args {
    /// Apply flags on top of a config file; flags win.
    pub fn apply(&self, cfg: &mut RunConfig) {
        macro_rules! set {
            ($($flag:ident => $dst:expr),* $(,)?) => {
                $(if let Some(v) = &self.$flag { $dst = Some(v.clone()); })*
            };
        }
        set!(command => cfg.command, seed => cfg.seed, threads => cfg.threads, budget => cfg.budget);
        let o = &mut cfg.options;
        set!(
            mode => o.mode, k_max => o.k_max, k => o.k, n => o.n, n_max => o.n_max, s => o.s,
            s_grid => o.s_grid, potential => o.potential, tail_start => o.tail_start, beta => o.beta,
            psi_tail_start => o.psi_tail_start, max_len => o.max_len, gap => o.gap, depth => o.depth,
        );
        if self.square {
            o.square = Some(true);
        }
        if let Some(t) = &self.targets {
            o.targets = Some(t.split_whitespace().map(str::to_string).collect());
        }
        if let Some(p) = &self.out {
            cfg.output.report = Some(p.display().to_string());
        }
        if let Some(p) = &self.csv_dir {
            cfg.output.csv_dir = Some(p.display().to_string());
        }
    }
}

/// The whole program: parse flags, run, write the report, return the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(args) {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { run::EXIT_INPUT } else { run::EXIT_OK };
        }
    };
    let text = match std::fs::read_to_string(&args.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", args.config.display());
            return run::EXIT_INPUT;
        }
    };
    let mut cfg = match parse_config(&text) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return run::EXIT_INPUT;
        }
    };
    args.apply(&mut cfg);
    let report = run_command(&cfg);
    if let Some(e) = &report.error {
        eprintln!("{e}");
    }
    let out = cfg.output.report.as_ref().map(PathBuf::from);
    if let Err(e) = emit_report(&report, out.as_deref()) {
        eprintln!("cannot write report: {e}");
        return run::EXIT_INPUT;
    }
    report.exit_code
}
