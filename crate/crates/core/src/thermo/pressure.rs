//! Two-sided pressure brackets.
//!
//! The upper end is `(1/n) log Z_n`, valid by submultiplicativity. Two lower bounds are
//! combined, each valid on its own:
//!
//! * the connector bound `(log Z_n + log C)/(n+k)`, from `Z_{n+k+m} ≥ C Z_n Z_m`;
//! * a growth bound `(1/j) log m_j` with `m_j = min_u Σ_{|L|=j} c_L ‖𝒜_L u‖^p`, since every
//!   product `M` satisfies `Σ_L φ(𝒜_L M) ≥ m_j φ(M)` when `φ(A) = |det A|^a ‖A‖^p` on the
//!   relevant piece. It is evaluated for a few fixed conjugations of the system, which
//!   leave the pressure unchanged, and certified by branch and bound over the angle.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::potential::{log_sv, PotentialKind, PotentialSpec};
use crate::context::Context;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::quasimult::{gamma_minimax, phi_constant};
use crate::system::GeneratorSystem;
use crate::wordspace::{fold_words, product_table, LogSum, ScaledProduct};

/// Largest `ℓ^j` used for the growth bound tables.
const GROWTH_WORDS: usize = 4096;
/// Level-`n` data is cached when `ℓⁿ` is at most this.
const CACHE_WORDS: usize = 1 << 22;
const CIRCLE_CELLS: usize = 32;
const CIRCLE_MAX_CELLS: usize = 60_000;
const CIRCLE_REL_GAP: f64 = 1e-6;
/// Relative allowance subtracted from lower bounds for floating point error.
const ROUNDING: f64 = 1e-13;

/// Connector data for the lower bound: `k`, `γ_k` and `min_{|K|=k} |det 𝒜_K|`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QmInput {
    pub k: usize,
    pub gamma: f64,
    pub min_det: f64,
    /// `γ_k` is only usable as a constant when it is a certified lower bound.
    pub certified: bool,
}

impl QmInput {
    pub fn compute(ctx: &Context, sys: &GeneratorSystem, k: usize) -> Result<QmInput> {
        let g = gamma_minimax(ctx, sys, k)?;
        let min_det = product_table(ctx, sys.generators(), k)?
            .iter()
            .map(|p| p.log_abs_det().exp())
            .fold(f64::INFINITY, f64::min);
        Ok(QmInput { k, gamma: g.gamma, min_det, certified: g.certified })
    }

    /// `log C` for the potential, or `None` when the constant vanishes.
    pub fn log_constant(&self, spec: &PotentialSpec) -> Option<f64> {
        if !self.certified {
            return None;
        }
        let c = match spec.kind {
            PotentialKind::NormS => {
                if spec.s == 0.0 {
                    1.0
                } else {
                    self.gamma.powf(spec.s)
                }
            }
            PotentialKind::SvS => phi_constant(spec.s, self.gamma, self.min_det).value,
            PotentialKind::SvSSquared => phi_constant(spec.s, self.gamma, self.min_det).value.powi(2),
        };
        (c > 0.0).then(|| c.ln())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum LowerSource {
    /// The potential is multiplicative, so `(1/n) log Z_n` is the pressure.
    Exact,
    Connector,
    /// Growth bound under conjugation number `conjugation` (0 is the identity).
    Growth { conjugation: usize },
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PressureBracket {
    pub spec: PotentialSpec,
    pub n: usize,
    pub lower: f64,
    pub upper: f64,
    pub lower_valid: bool,
    pub lower_source: LowerSource,
    /// `(log Z_n + log C)/(n+k)` when a positive constant was available.
    pub lower_connector: Option<f64>,
    /// Best growth bound and the level `j` it used.
    pub lower_growth: Option<f64>,
    pub growth_level: usize,
}

impl PressureBracket {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    /// The bracket of `−P`, ends swapped.
    pub fn negated(&self) -> PressureBracket {
        PressureBracket {
            lower: -self.upper,
            upper: -self.lower,
            lower_connector: None,
            lower_growth: None,
            ..self.clone()
        }
    }
}

struct GrowthTable {
    units: Vec<[f64; 4]>,
    unit_norms: Vec<f64>,
    logscale: Vec<f64>,
    log_det: Vec<f64>,
}

/// Pressure brackets at a fixed level `n`, reusing the word data across potentials.
pub struct PressureEngine<'a> {
    ctx: &'a Context,
    sys: &'a GeneratorSystem,
    n: usize,
    qm: Option<QmInput>,
    /// `(log σ₁, log |det|)` per word of length `n`.
    level: Option<Vec<[f64; 2]>>,
    growth: Vec<GrowthTable>,
    growth_level: usize,
}

/// Conjugations tried for the growth bound.
fn conjugations() -> Vec<Matrix> {
    let m = |r: [[f64; 2]; 2]| Matrix::from_rows(&[r[0].to_vec(), r[1].to_vec()]).expect("finite");
    vec![
        Matrix::identity(2),
        m([[1.0, 0.0], [0.0, 0.5]]),
        m([[1.0, 0.0], [0.0, 2.0]]),
        m([[1.0, 0.5], [0.0, 1.0]]),
        m([[1.0, -0.5], [0.0, 1.0]]),
    ]
}

impl<'a> PressureEngine<'a> {
    pub fn new(ctx: &'a Context, sys: &'a GeneratorSystem, n: usize, qm: Option<QmInput>) -> Result<Self> {
        if n == 0 {
            return Err(Error::input("pressure level n must be at least 1"));
        }
        let ell = sys.ell();
        ctx.check_budget(&format!("words of length {n}"), (ell as f64).powi(n as i32))?;
        let level = if (ell as f64).powi(n as i32) <= CACHE_WORDS as f64 {
            Some(level_data(ctx, sys, n)?)
        } else {
            None
        };
        let mut growth = Vec::new();
        let mut growth_level = 0;
        if sys.dim() == 2 {
            while growth_level < n && ell.pow(growth_level as u32 + 1) <= GROWTH_WORDS {
                growth_level += 1;
            }
            growth_level = growth_level.max(1);
            let table = product_table(ctx, sys.generators(), growth_level)?;
            for t in conjugations() {
                let tp = ScaledProduct::from_matrix(t.clone());
                let ti = ScaledProduct::from_matrix(t.inverse().expect("invertible"));
                let mut g = GrowthTable { units: vec![], unit_norms: vec![], logscale: vec![], log_det: vec![] };
                for p in &table {
                    let c = tp.mul(p).mul(&ti);
                    let u = c.unit.data();
                    g.units.push([u[0], u[1], u[2], u[3]]);
                    g.unit_norms.push(c.unit.norm());
                    g.logscale.push(c.logscale());
                    g.log_det.push(p.log_abs_det());
                }
                growth.push(g);
            }
        }
        Ok(PressureEngine { ctx, sys, n, qm, level, growth, growth_level })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `log Z_n` for the potential.
    pub fn log_partition(&self, spec: &PotentialSpec) -> Result<f64> {
        spec.validate(self.sys.dim())?;
        if let Some(level) = &self.level {
            let mut acc = LogSum::default();
            for l in level {
                acc.add(log_phi(l[0], l[1], spec));
            }
            return Ok(acc.value());
        }
        let s = *spec;
        fold_words(
            self.ctx,
            self.sys.generators(),
            self.n,
            LogSum::default,
            move |acc: &mut LogSum, _, p| {
                let l = p.log_singular_values();
                acc.add(log_phi(l[0], p.log_abs_det(), &s));
            },
            LogSum::merge,
        )
        .map(|acc| acc.value())
    }

    pub fn bracket(&self, spec: &PotentialSpec) -> Result<PressureBracket> {
        let log_z = self.log_partition(spec)?;
        let n = self.n as f64;
        let upper = log_z / n;
        let mut out = PressureBracket {
            spec: *spec,
            n: self.n,
            lower: f64::NEG_INFINITY,
            upper,
            lower_valid: false,
            lower_source: LowerSource::None,
            lower_connector: None,
            lower_growth: None,
            growth_level: self.growth_level,
        };
        if let Some(exact) = self.exact_pressure(spec) {
            out.lower = exact;
            out.upper = exact;
            out.lower_valid = true;
            out.lower_source = LowerSource::Exact;
            return Ok(out);
        }
        let mut best = (f64::NEG_INFINITY, LowerSource::None);
        if let Some(log_c) = self.qm.as_ref().and_then(|q| q.log_constant(spec)) {
            let k = self.qm.as_ref().map(|q| q.k).unwrap_or(0) as f64;
            let v = guard((log_z + log_c) / (n + k));
            out.lower_connector = Some(v);
            best = (v, LowerSource::Connector);
        }
        if let Some((a, p)) = growth_exponents(spec) {
            let j = self.growth_level as f64;
            let values: Vec<f64> = self
                .ctx
                .install(|| self.growth.par_iter().map(|t| guard(growth_log_min(t, a, p) / j)).collect());
            let mut g_best = f64::NEG_INFINITY;
            for (i, &v) in values.iter().enumerate() {
                if v > g_best {
                    g_best = v;
                }
                if v > best.0 {
                    best = (v, LowerSource::Growth { conjugation: i });
                }
            }
            if g_best.is_finite() {
                out.lower_growth = Some(g_best);
            }
        }
        if best.0.is_finite() {
            out.lower = best.0;
            out.lower_valid = true;
            out.lower_source = best.1;
        }
        Ok(out)
    }

    /// Pressure of multiplicative potentials, in closed form.
    fn exact_pressure(&self, spec: &PotentialSpec) -> Option<f64> {
        let gens = self.sys.generators();
        if spec.s == 0.0 {
            return Some((gens.len() as f64).ln());
        }
        if spec.kind != PotentialKind::NormS && spec.s >= 2.0 {
            let mut acc = LogSum::default();
            for g in gens {
                acc.add(spec.power() * 0.5 * spec.s * g.det().abs().ln());
            }
            return Some(acc.value());
        }
        None
    }
}

fn guard(v: f64) -> f64 {
    v - ROUNDING * (1.0 + v.abs())
}

fn level_data(ctx: &Context, sys: &GeneratorSystem, n: usize) -> Result<Vec<[f64; 2]>> {
    fold_words(
        ctx,
        sys.generators(),
        n,
        Vec::new,
        |acc: &mut Vec<[f64; 2]>, _, p| acc.push([p.log_singular_values()[0], p.log_abs_det()]),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )
}

/// `log φ` from `log σ₁` and `log |det|`.
fn log_phi(log_s1: f64, log_det: f64, spec: &PotentialSpec) -> f64 {
    match spec.kind {
        PotentialKind::NormS => spec.s * log_s1,
        _ => {
            if spec.s == 0.0 {
                0.0
            } else {
                spec.power() * log_sv(log_s1, log_det, spec.s)
            }
        }
    }
}

/// `(a, p)` with `φ(A) = |det A|^a ‖A‖^p` on the piece containing `s`.
fn growth_exponents(spec: &PotentialSpec) -> Option<(f64, f64)> {
    let s = spec.s;
    let (a, p) = match spec.kind {
        PotentialKind::NormS => (0.0, s),
        _ if s < 1.0 => (0.0, s),
        _ if s < 2.0 => (s - 1.0, 2.0 - s),
        _ => return None,
    };
    let q = spec.power();
    Some((q * a, q * p))
}

#[derive(Clone, Copy)]
struct Arc {
    lb: f64,
    center: f64,
    half: f64,
}

impl PartialEq for Arc {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Arc {}
impl PartialOrd for Arc {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Arc {
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb).then_with(|| other.center.total_cmp(&self.center))
    }
}

/// Certified lower bound on `log min_θ Σ_L |det 𝒜_L|^a ‖𝒜_L u_θ‖^p`.
fn growth_log_min(t: &GrowthTable, a: f64, p: f64) -> f64 {
    let logw: Vec<f64> = (0..t.units.len())
        .map(|i| a * t.log_det[i] + p * (t.logscale[i] + t.unit_norms[i].ln()))
        .collect();
    let shift = logw.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // Weight of the unit matrix `U / ‖U‖`, so every normalized term is at most 1.
    let w: Vec<f64> = logw.iter().map(|l| (l - shift).exp()).collect();
    // ‖U u_θ‖²/‖U‖² = m + ρ cos(2θ − φ), stored as (m, ρ cos φ, ρ sin φ, ρ).
    let waves: Vec<[f64; 4]> = t
        .units
        .iter()
        .zip(&t.unit_norms)
        .map(|(u, n)| {
            let n2 = n * n;
            let a = (u[0] * u[0] + u[2] * u[2]) / n2;
            let b = (u[1] * u[1] + u[3] * u[3]) / n2;
            let c = (u[0] * u[1] + u[2] * u[3]) / n2;
            let (x, y) = (0.5 * (a - b), c);
            [0.5 * (a + b), x, y, x.hypot(y)]
        })
        .collect();
    let half_p = 0.5 * p;
    // Value at `theta` and the exact minimum of each term over `theta ± half`.
    let eval = |theta: f64, half: f64| -> (f64, f64) {
        let (s2, c2) = (2.0 * theta).sin_cos();
        let (sd, cd) = (2.0 * half).sin_cos();
        let (mut at, mut lb) = (0.0, 0.0);
        for (v, wi) in waves.iter().zip(&w) {
            let x = v[1] * c2 + v[2] * s2;
            let y = v[1] * s2 - v[2] * c2;
            let low = if 2.0 * half >= PI || x <= -v[3] * cd { v[0] - v[3] } else { v[0] + x * cd - y.abs() * sd };
            at += wi * (v[0] + x).max(0.0).powf(half_p);
            lb += wi * low.max(0.0).powf(half_p);
        }
        (at, lb.min(at))
    };
    let h0 = 0.5 * PI / CIRCLE_CELLS as f64;
    let mut heap = BinaryHeap::new();
    let mut best = f64::INFINITY;
    let push = |center: f64, half: f64, heap: &mut BinaryHeap<Arc>, best: &mut f64| {
        let (at, lb) = eval(center, half);
        *best = best.min(at);
        heap.push(Arc { lb, center, half });
    };
    for i in 0..CIRCLE_CELLS {
        push((2 * i + 1) as f64 * h0, h0, &mut heap, &mut best);
    }
    let mut cells = CIRCLE_CELLS;
    while cells < CIRCLE_MAX_CELLS {
        let top = *heap.peek().expect("nonempty");
        if best - top.lb <= CIRCLE_REL_GAP * best {
            break;
        }
        heap.pop();
        let h = 0.5 * top.half;
        push(top.center - h, h, &mut heap, &mut best);
        push(top.center + h, h, &mut heap, &mut best);
        cells += 2;
    }
    let lb = heap.peek().map(|a| a.lb).unwrap_or(0.0);
    if lb > 0.0 {
        lb.ln() + shift
    } else {
        f64::NEG_INFINITY
    }
}

/// Bracket for `P` at level `n`.
pub fn pressure_bracket(
    ctx: &Context,
    sys: &GeneratorSystem,
    spec: &PotentialSpec,
    n: usize,
    qm: Option<&QmInput>,
) -> Result<PressureBracket> {
    spec.validate(sys.dim())?;
    PressureEngine::new(ctx, sys, n, qm.cloned())?.bracket(spec)
}

/// Bracket for the square pressure `P₂(s) = −lim (1/n) log Σ (φˢ)²`.
pub fn square_pressure(
    ctx: &Context,
    sys: &GeneratorSystem,
    s: f64,
    n: usize,
    qm: Option<&QmInput>,
) -> Result<PressureBracket> {
    Ok(pressure_bracket(ctx, sys, &PotentialSpec::sv_squared(s), n, qm)?.negated())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn zero_temperature_counts_words() {
        let ctx = Context::default();
        let b = pressure_bracket(&ctx, &fixtures::e3(), &PotentialSpec::sv(0.0), 6, None).unwrap();
        assert!((b.upper - 2f64.ln()).abs() < 1e-12 && b.lower == b.upper);
        let b = square_pressure(&ctx, &fixtures::e3(), 0.0, 6, None).unwrap();
        assert!((b.upper + 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn conformal_bracket_is_tight() {
        let ctx = Context::default();
        for s in [0.25, 0.5, 0.75] {
            let b = pressure_bracket(&ctx, &fixtures::e4(), &PotentialSpec::sv(s), 8, None).unwrap();
            let truth = 2f64.ln() + s * 0.4f64.ln();
            assert!(b.lower <= truth && truth <= b.upper + 1e-12, "{b:?}");
            assert!(b.width() < 1e-10, "{b:?}");
        }
    }

    #[test]
    fn e3_bracket_ordered() {
        let ctx = Context::default();
        let qm = QmInput::compute(&ctx, &fixtures::e3(), 1).unwrap();
        for s in [0.3, 1.0, 1.5] {
            let b = pressure_bracket(&ctx, &fixtures::e3(), &PotentialSpec::sv(s), 8, Some(&qm)).unwrap();
            assert!(b.lower_valid && b.lower <= b.upper, "{b:?}");
        }
    }
}
