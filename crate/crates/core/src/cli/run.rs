//! Command dispatch and reports.

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::attractor::{attractor_points, write_attractor_csv};
use super::config::RunConfig;
use crate::context::{Context, DEFAULT_BUDGET, DEFAULT_SEED};
use crate::error::{Error, Result};
use crate::gibbs::{kappa_floor, psi_mixing_stat};
use crate::hypothesis::{check_hypotheses, HypothesisMode, Overall};
use crate::quasimult::{empirical_qm, qm_constant_phi};
use crate::spannability::{diagnose_failure, minimal_spannable_k, SpanMode, SpanStatus, DEFAULT_K_MAX};
use crate::system::{GeneratorSystem, SystemSummary};
use crate::thermo::{
    affinity_dimension, beta_hat, r0_interval, s0_interval, BetaInput, PotentialKind, PotentialSpec, PressureEngine,
    QmInput, TargetSequence,
};
use crate::wordspace::Word;

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS_FAILED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;
pub const EXIT_RESOURCE: i32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    HypothesisFailed,
    Inconclusive,
    InputError,
    ResourceCap,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => EXIT_OK,
            Status::HypothesisFailed => EXIT_HYPOTHESIS_FAILED,
            Status::Inconclusive => EXIT_INCONCLUSIVE,
            Status::InputError => EXIT_INPUT,
            Status::ResourceCap => EXIT_RESOURCE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub version: String,
    pub command: String,
    pub status: Status,
    pub exit_code: i32,
    pub seed: u64,
    pub budget: u64,
    pub threads: usize,
    pub wall_time_s: f64,
    pub config: RunConfig,
    pub system: Option<SystemSummary>,
    pub result: Option<Value>,
    /// CSV files written, relative to the csv directory.
    pub files: Vec<String>,
    pub warnings: Vec<String>,
    pub error: Option<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

struct Outcome {
    status: Status,
    result: Value,
    warnings: Vec<String>,
    csv: Vec<(String, Vec<u8>)>,
}

impl Outcome {
    fn new(status: Status, result: Value) -> Self {
        Outcome { status, result, warnings: Vec::new(), csv: Vec::new() }
    }
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("result serializes")
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Resource { .. } => Status::ResourceCap,
        _ => Status::InputError,
    }
}

/// Build the context for a config: seed, budget and an optional dedicated pool.
pub fn context_for(cfg: &RunConfig) -> Result<Context> {
    let ctx = Context::default()
        .with_seed(cfg.seed.unwrap_or(DEFAULT_SEED))
        .with_budget(cfg.budget.unwrap_or(DEFAULT_BUDGET));
    match cfg.threads {
        Some(n) => ctx.with_threads(n),
        None => Ok(ctx),
    }
}

/// Run the configured command. CSV files go to `output.csv_dir` (default: current directory).
pub fn run_command(cfg: &RunConfig) -> Report {
    let start = Instant::now();
    let command = cfg.command.clone().unwrap_or_default();
    let mut report = Report {
        version: env!("CARGO_PKG_VERSION").to_string(),
        command: command.clone(),
        status: Status::Ok,
        exit_code: 0,
        seed: cfg.seed.unwrap_or(DEFAULT_SEED),
        budget: cfg.budget.unwrap_or(DEFAULT_BUDGET),
        threads: 0,
        wall_time_s: 0.0,
        config: cfg.clone(),
        system: None,
        result: None,
        files: Vec::new(),
        warnings: Vec::new(),
        error: None,
    };
    let outcome = (|| -> Result<Outcome> {
        cfg.validate()?;
        if command.is_empty() {
            return Err(Error::input("no command given"));
        }
        let ctx = context_for(cfg)?;
        report.threads = ctx.threads();
        let sys = cfg.system.build()?;
        report.system = Some(sys.summary());
        let mut out = dispatch(&ctx, &sys, cfg, &command)?;
        if !out.csv.is_empty() {
            let dir = PathBuf::from(cfg.output.csv_dir.as_deref().unwrap_or("."));
            std::fs::create_dir_all(&dir)?;
            for (name, bytes) in std::mem::take(&mut out.csv) {
                std::fs::write(dir.join(&name), bytes)?;
                report.files.push(name);
            }
        }
        Ok(out)
    })();
    match outcome {
        Ok(o) => {
            report.status = o.status;
            report.result = Some(o.result);
            report.warnings.extend(o.warnings);
        }
        Err(e) => {
            report.status = status_of(&e);
            report.error = Some(e.to_string());
        }
    }
    report.exit_code = report.status.exit_code();
    report.wall_time_s = start.elapsed().as_secs_f64();
    report
}

fn dispatch(ctx: &Context, sys: &GeneratorSystem, cfg: &RunConfig, command: &str) -> Result<Outcome> {
    let o = &cfg.options;
    match command {
        "check-hypotheses" => {
            let mode = o.mode.unwrap_or(HypothesisMode::PowersAndWedges);
            let r = check_hypotheses(ctx, sys, mode)?;
            let status = match &r.overall {
                Overall::Pass => Status::Ok,
                Overall::Fail { .. } => Status::HypothesisFailed,
                Overall::Inconclusive => Status::Inconclusive,
            };
            let mut out = Outcome::new(status, to_value(&r));
            if let Overall::Fail { label, .. } = &r.overall {
                out.warnings.push(format!("hypothesis fails at {label}"));
            }
            Ok(out)
        }
        "spannability" => {
            let k_max = o.k_max.unwrap_or(DEFAULT_K_MAX);
            let m = minimal_spannable_k(ctx, sys, k_max, SpanMode::Auto)?;
            let inconclusive = m.certificates.iter().any(|c| matches!(c.status, SpanStatus::Inconclusive));
            let mut warnings = Vec::new();
            let diagnosis = if m.k.is_none() {
                match diagnose_failure(ctx, sys, k_max) {
                    Ok(d) => Some(d),
                    Err(e) => {
                        warnings.push(format!("no diagnosis: {e}"));
                        None
                    }
                }
            } else {
                None
            };
            let status = match (m.k, inconclusive) {
                (Some(_), _) => Status::Ok,
                (None, true) => Status::Inconclusive,
                (None, false) => Status::HypothesisFailed,
            };
            if inconclusive {
                warnings.push("some spannability certificates are inconclusive".into());
            }
            let mut out = Outcome::new(status, json!({ "minimal": m, "diagnosis": diagnosis }));
            out.warnings = warnings;
            Ok(out)
        }
        "qm" => {
            let k = o.k.unwrap_or(1);
            let r = empirical_qm(ctx, sys, k, o.n_max.unwrap_or(5))?;
            let phi = match (o.s, sys.dim()) {
                (Some(s), 2) => Some(qm_constant_phi(ctx, sys, k, s, r.gamma.gamma)?),
                _ => None,
            };
            let status = if !r.gamma.certified {
                Status::Inconclusive
            } else if r.gamma.gamma > 0.0 {
                Status::Ok
            } else {
                Status::HypothesisFailed
            };
            let mut csv = String::from("n,min_ratio,min_ratio_up_to,argmin_i,argmin_j,argmax_k\n");
            for e in &r.empirical {
                let f = |w: &Word| w.format(sys.ell());
                csv.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    e.n,
                    e.min_ratio,
                    e.min_ratio_up_to,
                    f(&e.argmin_i),
                    f(&e.argmin_j),
                    f(&e.argmax_k)
                ));
            }
            let mut out = Outcome::new(status, json!({ "qm": r, "phi_constant": phi }));
            if !r.gamma.certified {
                out.warnings.push("gamma comes from local search and is not certified".into());
            }
            out.csv.push(("qm.csv".into(), csv.into_bytes()));
            Ok(out)
        }
        "pressure" => {
            let n = o.n.unwrap_or(8);
            let kind = o.potential.unwrap_or(if sys.dim() == 2 { PotentialKind::SvS } else { PotentialKind::NormS });
            let square = o.square.unwrap_or(false);
            let grid = match (&o.s_grid, o.s) {
                (Some(g), _) => g.clone(),
                (None, Some(s)) => vec![s],
                (None, None) => vec![0.0, 0.5, 1.0, 1.5, 2.0],
            };
            let qm = qm_input(ctx, sys, o.k.unwrap_or(1))?;
            let engine = PressureEngine::new(ctx, sys, n, qm)?;
            let mut brackets = Vec::new();
            let mut csv = String::from("s,lower,upper,lower_valid\n");
            let mut warnings = Vec::new();
            for &s in &grid {
                let b = if square {
                    engine.bracket(&PotentialSpec::sv_squared(s))?.negated()
                } else {
                    engine.bracket(&PotentialSpec::new(kind, s))?
                };
                if !b.lower_valid {
                    warnings.push(format!("no valid lower bound at s = {s}"));
                }
                csv.push_str(&format!("{s},{},{},{}\n", b.lower, b.upper, b.lower_valid));
                brackets.push(b);
            }
            if square {
                warnings.push("square pressure: P2(0) = -log N with N = number of generators".into());
            }
            let mut out = Outcome::new(Status::Ok, json!({ "square": square, "brackets": brackets }));
            out.warnings = warnings;
            out.csv.push(("pressure.csv".into(), csv.into_bytes()));
            Ok(out)
        }
        "s0" => {
            let n = o.n.unwrap_or(10);
            let mut warnings = Vec::new();
            let targets = match &o.targets {
                Some(ts) => {
                    let words = ts.iter().map(|t| Word::parse(t, sys.ell())).collect::<Result<Vec<_>>>()?;
                    TargetSequence::new(words, o.tail_start.unwrap_or(1))?
                }
                None => {
                    warnings.push("no targets given; using J_k = 1^k for k = 1..10".into());
                    TargetSequence::constant(1, 10)?
                }
            };
            let r = s0_interval(ctx, sys, &targets, n, dim_qm_k(sys, o.k))?;
            warnings.extend(r.warnings.iter().cloned());
            if let Some(p) = &r.proxy {
                warnings.push(format!("proxy: {p}"));
            }
            let mut out = Outcome::new(Status::Ok, to_value(&r));
            out.warnings = warnings;
            Ok(out)
        }
        "r0" => {
            let n = o.n.unwrap_or(10);
            let input = match (&o.psi, o.beta) {
                (_, Some(b)) => BetaInput::Explicit(b),
                (Some(points), None) => {
                    BetaInput::Table { points: points.clone(), tail_start: o.psi_tail_start.unwrap_or(1) }
                }
                (None, None) => return Err(Error::input("r0 needs options.beta or options.psi")),
            };
            let beta = beta_hat(&input)?;
            if !beta.below_one {
                return Err(Error::input("beta = 1: the recurrence equation requires beta < 1"));
            }
            let r = r0_interval(ctx, sys, beta.beta, n, dim_qm_k(sys, o.k))?;
            let mut out = Outcome::new(Status::Ok, json!({ "beta": beta, "interval": r }));
            out.warnings.extend(beta.warnings.iter().cloned());
            out.warnings.extend(r.warnings.iter().cloned());
            if !beta.explicit {
                out.warnings.push("proxy: beta replaced by the tail minimum of psi(n)/n".into());
            }
            Ok(out)
        }
        "affinity-dim" => {
            let r = affinity_dimension(ctx, sys, o.n.unwrap_or(10), dim_qm_k(sys, o.k))?;
            let mut out = Outcome::new(Status::Ok, to_value(&r));
            out.warnings.extend(r.warnings.iter().cloned());
            Ok(out)
        }
        "mixing" => {
            let s = o.s.unwrap_or(1.0);
            let max_len = o.max_len.unwrap_or(3);
            let k = o.k.unwrap_or(1);
            let mut r = psi_mixing_stat(ctx, sys, s, max_len, o.gap.unwrap_or(2))?;
            let kappa = kappa_floor(ctx, sys, s, k, max_len)?;
            let status = if kappa.passed() {
                Status::Ok
            } else if kappa.no_certificate {
                Status::Inconclusive
            } else {
                Status::HypothesisFailed
            };
            let mut out = Outcome::new(status, Value::Null);
            if kappa.no_certificate {
                out.warnings.push("kappa floor: no positive connector constant, no certificate".into());
            }
            out.warnings.push(format!("psi statistic: {}", r.note));
            r.kappa = Some(kappa);
            out.result = to_value(&r);
            Ok(out)
        }
        "export-attractor" => {
            let depth = o.depth.unwrap_or(8);
            let points = attractor_points(ctx, sys, depth)?;
            let mut bytes = Vec::new();
            write_attractor_csv(&mut bytes, sys, &points)?;
            let mut out = Outcome::new(Status::Ok, json!({ "depth": depth, "points": points.len() }));
            out.csv.push(("attractor.csv".into(), bytes));
            Ok(out)
        }
        other => Err(Error::input(format!("unknown command {other:?}"))),
    }
}

fn qm_input(ctx: &Context, sys: &GeneratorSystem, k: usize) -> Result<Option<QmInput>> {
    if sys.dim() == 2 {
        QmInput::compute(ctx, sys, k).map(Some)
    } else {
        Ok(None)
    }
}

fn dim_qm_k(sys: &GeneratorSystem, k: Option<usize>) -> Option<usize> {
    (sys.dim() == 2).then_some(k.unwrap_or(1))
}

/// Write the report to `path`, or to standard output.
pub fn emit_report(report: &Report, path: Option<&Path>) -> Result<()> {
    let text = report.to_json();
    match path {
        Some(p) => std::fs::write(p, text + "\n")?,
        None => println!("{text}"),
    }
    Ok(())
}
