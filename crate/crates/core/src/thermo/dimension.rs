//! Dimension roots from pressure brackets.
//!
//! Every root search works on bracket ends, so the result is an interval that contains
//! the root of the exact equation whenever the brackets are valid.

use serde::{Deserialize, Serialize};

use super::potential::{log_potential, PotentialSpec};
use super::pressure::{PressureBracket, PressureEngine, QmInput};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::hypothesis::{check_hypotheses, HypothesisMode, HypothesisReport};
use crate::system::GeneratorSystem;
use crate::wordspace::Word;

pub const S_MAX: f64 = 4.0;
pub const ROOT_TOL: f64 = 1e-6;
const MONOTONE_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetSequence {
    pub words: Vec<Word>,
    /// 1-based index `k₀`; the proxy is the minimum over `k ≥ k₀`.
    pub tail_start: usize,
}

impl TargetSequence {
    pub fn new(words: Vec<Word>, tail_start: usize) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::input("target sequence is empty"));
        }
        if let Some(k) = words.iter().position(Word::is_empty) {
            return Err(Error::input(format!("target word {} is empty", k + 1)));
        }
        let tail_start = tail_start.max(1);
        if tail_start > words.len() {
            return Err(Error::input(format!(
                "tail_start {tail_start} leaves no targets (only {} given)",
                words.len()
            )));
        }
        Ok(TargetSequence { words, tail_start })
    }

    /// `J_k = symbol^k` for `k = 1..=count`.
    pub fn constant(symbol: usize, count: usize) -> Result<Self> {
        Self::new((1..=count).map(|k| Word::repeat(symbol, k)).collect(), 1)
    }

    /// Prefixes of `1 2 1 2 …` of lengths `1..=count`.
    pub fn alternating(count: usize) -> Result<Self> {
        Self::new((1..=count).map(|k| Word((0..k).map(|i| i % 2 + 1).collect())).collect(), 1)
    }

    pub fn tail(&self) -> &[Word] {
        &self.words[self.tail_start - 1..]
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.words.windows(2).any(|w| w[1].len() < w[0].len()) {
            out.push("target lengths are not nondecreasing".to_string());
        }
        out
    }
}

/// `min_{k ≥ k₀} −(1/|J_k|) log φˢ(𝒜_{J_k})`, the finite stand-in for the liminf.
pub fn alpha_hat(sys: &GeneratorSystem, targets: &TargetSequence, s: f64) -> Result<f64> {
    if sys.dim() != 2 {
        return Err(Error::input("alpha_hat needs d = 2"));
    }
    let spec = PotentialSpec::sv(s);
    spec.validate(2)?;
    let mut best = f64::INFINITY;
    for w in targets.tail() {
        let p = sys.product(w)?;
        best = best.min(-log_potential(&p, &spec) / w.len() as f64);
    }
    Ok(best)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BetaInput {
    Explicit(f64),
    /// `(n, ψ(n))` pairs; the proxy is the minimum of `ψ(n)/n` over `n ≥ tail_start`.
    Table { points: Vec<(usize, f64)>, tail_start: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BetaEstimate {
    pub beta: f64,
    pub explicit: bool,
    /// Spread of `ψ(n)/n` over the last quarter of the tail.
    pub spread: Option<f64>,
    /// Whether `β < 1`, as the recurrence root requires.
    pub below_one: bool,
    pub warnings: Vec<String>,
}

pub fn beta_hat(input: &BetaInput) -> Result<BetaEstimate> {
    let mut warnings = Vec::new();
    let (beta, explicit, spread) = match input {
        BetaInput::Explicit(b) => {
            if !(0.0..=1.0).contains(b) {
                return Err(Error::input(format!("beta must lie in [0, 1], got {b}")));
            }
            (*b, true, None)
        }
        BetaInput::Table { points, tail_start } => {
            if points.is_empty() {
                return Err(Error::input("psi table is empty"));
            }
            let mut tail: Vec<(usize, f64)> = points
                .iter()
                .filter(|(n, _)| *n >= *tail_start && *n > 0)
                .map(|&(n, psi)| (n, psi / n as f64))
                .collect();
            if tail.is_empty() {
                return Err(Error::input(format!("psi table has no entries with n ≥ {tail_start}")));
            }
            if tail.iter().any(|(_, r)| !r.is_finite()) {
                return Err(Error::input("psi table has non-finite entries"));
            }
            tail.sort_by_key(|&(n, _)| n);
            let q = &tail[tail.len() - tail.len().div_ceil(4)..];
            let hi = q.iter().map(|t| t.1).fold(f64::NEG_INFINITY, f64::max);
            let lo = q.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
            let spread = hi - lo;
            if spread > 0.01 {
                warnings.push(format!("psi(n)/n varies by {spread:.4} over the last quarter of the tail"));
            }
            let mut beta = tail.iter().map(|t| t.1).fold(f64::INFINITY, f64::min);
            if !(0.0..=1.0).contains(&beta) {
                warnings.push(format!("tail minimum {beta} of psi(n)/n clamped to [0, 1]"));
                beta = beta.clamp(0.0, 1.0);
            }
            (beta, false, Some(spread))
        }
    };
    let below_one = beta < 1.0;
    if !below_one {
        warnings.push("beta = 1: the recurrence root requires beta < 1".to_string());
    }
    Ok(BetaEstimate { beta, explicit, spread, below_one, warnings })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DimensionKind {
    ShrinkingTarget,
    Recurrence,
    Affinity,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub kind: DimensionKind,
    pub lo: f64,
    pub hi: f64,
    /// `min{2, lo}` and `min{2, hi}`.
    pub clamped_lo: f64,
    pub clamped_hi: f64,
    pub clamped: bool,
    pub n: usize,
    pub k_qm: Option<usize>,
    /// How the liminf quantities were replaced by finite data.
    pub proxy: Option<String>,
    pub beta: Option<f64>,
    pub hypothesis_report: Option<HypothesisReport>,
    pub warnings: Vec<String>,
}

impl DimensionReport {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Last point with `f > 0` and first with `f ≤ 0`, for `f` decreasing on `[0, S_MAX]`.
#[derive(Clone, Copy, Debug)]
enum Crossing {
    /// `f(0) ≤ 0`.
    AtZero,
    /// `f(S_MAX) > 0`.
    Beyond,
    Between(f64, f64),
}

fn bisect<F: FnMut(f64) -> Result<f64>>(mut f: F) -> Result<Crossing> {
    if f(0.0)? <= 0.0 {
        return Ok(Crossing::AtZero);
    }
    if f(S_MAX)? > 0.0 {
        return Ok(Crossing::Beyond);
    }
    let (mut a, mut b) = (0.0, S_MAX);
    while b - a > ROOT_TOL {
        let m = 0.5 * (a + b);
        if f(m)? > 0.0 {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(Crossing::Between(a, b))
}

/// Root interval of a decreasing function known only through a bracket `lo ≤ f ≤ hi`.
///
/// `f(s, upper)` evaluates the lower (`false`) or upper (`true`) end at `s`.
fn root_interval<F>(mut f: F, warnings: &mut Vec<String>) -> Result<(f64, f64)>
where
    F: FnMut(f64, bool) -> Result<f64>,
{
    let lo = match bisect(|s| f(s, false))? {
        Crossing::AtZero => 0.0,
        Crossing::Beyond => {
            warnings.push(format!("lower bound still positive at s = {S_MAX}; interval truncated"));
            S_MAX
        }
        Crossing::Between(a, _) => a,
    };
    let hi = match bisect(|s| f(s, true))? {
        Crossing::AtZero => 0.0,
        Crossing::Beyond => {
            warnings.push(format!("no sign change in [0, {S_MAX}]"));
            S_MAX
        }
        Crossing::Between(_, b) => b,
    };
    Ok((lo.min(hi), hi))
}

/// Records bracket values along the search and checks their monotonicity.
#[derive(Default)]
struct Trace {
    points: Vec<(f64, f64, f64)>,
}

impl Trace {
    fn record(&mut self, s: f64, b: &PressureBracket) {
        self.points.push((s, b.lower, b.upper));
    }

    fn check(&mut self, name: &str, increasing: bool, warnings: &mut Vec<String>) {
        self.points.sort_by(|a, b| a.0.total_cmp(&b.0));
        self.points.dedup_by(|a, b| a.0 == b.0);
        let bad = self.points.windows(2).any(|w| {
            let step = if increasing { w[0].2 - w[1].2 } else { w[1].2 - w[0].2 };
            step > MONOTONE_SLACK * (1.0 + w[0].2.abs())
        });
        if bad {
            let dir = if increasing { "nondecreasing" } else { "nonincreasing" };
            warnings.push(format!("upper bound of {name} is not {dir} along the search"));
        }
    }
}

fn engine_for<'a>(ctx: &'a Context, sys: &'a GeneratorSystem, n: usize, k_qm: Option<usize>) -> Result<PressureEngine<'a>> {
    if sys.dim() != 2 {
        return Err(Error::input("dimension roots need d = 2"));
    }
    let qm = k_qm.map(|k| QmInput::compute(ctx, sys, k)).transpose()?;
    PressureEngine::new(ctx, sys, n, qm)
}

fn attach_hypotheses(ctx: &Context, sys: &GeneratorSystem, warnings: &mut Vec<String>) -> Result<Option<HypothesisReport>> {
    if sys.translations().is_none() {
        warnings.push("no translations given; hypothesis check skipped".to_string());
        return Ok(None);
    }
    let r = check_hypotheses(ctx, sys, HypothesisMode::PlanarAttractor)?;
    if !r.passed() {
        warnings.push("hypotheses of the dimension formula are not all verified".to_string());
    }
    Ok(Some(r))
}

fn report(
    kind: DimensionKind,
    (lo, hi): (f64, f64),
    n: usize,
    k_qm: Option<usize>,
    hypothesis_report: Option<HypothesisReport>,
    warnings: Vec<String>,
) -> DimensionReport {
    DimensionReport {
        kind,
        lo,
        hi,
        clamped_lo: lo.min(2.0),
        clamped_hi: hi.min(2.0),
        clamped: hi > 2.0,
        n,
        k_qm,
        proxy: None,
        beta: None,
        hypothesis_report,
        warnings,
    }
}

/// Interval for `s₀ = inf{s > 0 : P(s) ≤ α(s)}`.
pub fn s0_interval(
    ctx: &Context,
    sys: &GeneratorSystem,
    targets: &TargetSequence,
    n: usize,
    k_qm: Option<usize>,
) -> Result<DimensionReport> {
    let engine = engine_for(ctx, sys, n, k_qm)?;
    let mut warnings = targets.warnings();
    let hyp = attach_hypotheses(ctx, sys, &mut warnings)?;
    let mut p_trace = Trace::default();
    let mut a_trace = Trace::default();
    let mut eval = |s: f64, upper: bool| -> Result<f64> {
        let b = engine.bracket(&PotentialSpec::sv(s))?;
        let a = alpha_hat(sys, targets, s)?;
        p_trace.record(s, &b);
        a_trace.points.push((s, a, a));
        Ok(if upper { b.upper - a } else if b.lower_valid { b.lower - a } else { f64::NEG_INFINITY })
    };
    let interval = root_interval(&mut eval, &mut warnings)?;
    p_trace.check("P", false, &mut warnings);
    a_trace.check("alpha", true, &mut warnings);
    let mut r = report(DimensionKind::ShrinkingTarget, interval, n, k_qm, hyp, warnings);
    r.proxy = Some(format!(
        "alpha(s) replaced by the minimum over targets k >= {} of -(1/|J_k|) log phi^s(A_J_k)",
        targets.tail_start
    ));
    Ok(r)
}

/// Interval for the solution `r₀` of `(1−β) P(r) = β P₂(r)`.
pub fn r0_interval(ctx: &Context, sys: &GeneratorSystem, beta: f64, n: usize, k_qm: Option<usize>) -> Result<DimensionReport> {
    if !(0.0..1.0).contains(&beta) {
        return Err(Error::input(format!("beta must satisfy 0 <= beta < 1, got {beta}")));
    }
    let engine = engine_for(ctx, sys, n, k_qm)?;
    let mut warnings = Vec::new();
    let hyp = attach_hypotheses(ctx, sys, &mut warnings)?;
    let mut p_trace = Trace::default();
    let mut q_trace = Trace::default();
    // h = (1−β)P − βP₂; h⁺ uses the upper end of P and the lower end of P₂.
    let mut eval = |r: f64, upper: bool| -> Result<f64> {
        let p = engine.bracket(&PotentialSpec::sv(r))?;
        p_trace.record(r, &p);
        if beta == 0.0 {
            return Ok(if upper { p.upper } else if p.lower_valid { p.lower } else { f64::NEG_INFINITY });
        }
        let q = engine.bracket(&PotentialSpec::sv_squared(r))?.negated();
        q_trace.record(r, &q);
        Ok(if upper {
            (1.0 - beta) * p.upper - beta * q.lower
        } else if p.lower_valid && q.lower_valid {
            // `q` is negated, so its upper end came from the lower bound of the square sum.
            (1.0 - beta) * p.lower - beta * q.upper
        } else {
            f64::NEG_INFINITY
        })
    };
    let interval = root_interval(&mut eval, &mut warnings)?;
    p_trace.check("P", false, &mut warnings);
    q_trace.check("P2", true, &mut warnings);
    warnings.push("P2(0) = -log N is taken with N = number of generators".to_string());
    let mut r = report(DimensionKind::Recurrence, interval, n, k_qm, hyp, warnings);
    r.beta = Some(beta);
    Ok(r)
}

/// Interval for the root of `P(s) = 0`.
pub fn affinity_dimension(ctx: &Context, sys: &GeneratorSystem, n: usize, k_qm: Option<usize>) -> Result<DimensionReport> {
    let engine = engine_for(ctx, sys, n, k_qm)?;
    let mut warnings = Vec::new();
    let mut trace = Trace::default();
    let mut eval = |s: f64, upper: bool| -> Result<f64> {
        let b = engine.bracket(&PotentialSpec::sv(s))?;
        trace.record(s, &b);
        Ok(if upper { b.upper } else if b.lower_valid { b.lower } else { f64::NEG_INFINITY })
    };
    let interval = root_interval(&mut eval, &mut warnings)?;
    trace.check("P", false, &mut warnings);
    Ok(report(DimensionKind::Affinity, interval, n, k_qm, None, warnings))
}
