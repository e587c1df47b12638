//! Irreducibility verdicts, power and exterior cocycles, and the hypothesis checkers.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::linalg::exact::QMatrix;
use crate::linalg::forms::{eigen_form, exact_common_root, float_common_root, Form};
use crate::linalg::{self, Matrix, SpanBuilder, SubspaceBasis};
use crate::system::GeneratorSystem;
use crate::wordspace::{enumerate_words, Word};

/// Relative tolerance of the floating-point plane test.
pub const FLOAT_FORM_TOL: f64 = 1e-9;
/// Invariance residual a reducibility witness must meet.
pub const WITNESS_TOL: f64 = 1e-8;
/// Multistarts of the randomized falsification search.
pub const DEFAULT_MULTISTARTS: usize = 64;

/// The tuple generated by all length-`t` products, in lexicographic word order.
pub fn power_system(ctx: &Context, sys: &GeneratorSystem, t: usize) -> Result<GeneratorSystem> {
    if t == 0 {
        return Err(Error::input("power t must be at least 1"));
    }
    ctx.check_budget(&format!("power system t={t}"), (sys.ell() as f64).powi(t as i32))?;
    let words: Vec<Word> = enumerate_words(sys.ell(), t).collect();
    let gens = words.iter().map(|w| sys.product(w).map(|p| p.matrix())).collect::<Result<_>>()?;
    let exact = sys.exact().map(|_| words.iter().map(|w| sys.exact_product(w).unwrap()).collect());
    GeneratorSystem::from_parts(gens, exact)
}

/// Generators replaced by their `m`-th exterior powers.
pub fn wedge_system(sys: &GeneratorSystem, m: usize) -> Result<GeneratorSystem> {
    let d = sys.dim();
    if m == 0 || m >= d {
        return Err(Error::input(format!("wedge m={m} out of range 1..={} for d={d}", d.saturating_sub(1))));
    }
    if m == 1 {
        return Ok(sys.clone());
    }
    let gens =
        sys.generators().iter().map(|g| linalg::wedge_power(g, m)).collect::<Result<_>>()?;
    GeneratorSystem::from_parts(gens, None)
}

/// Smallest subspace containing `v` and invariant under every generator.
pub fn orbit_span(sys: &GeneratorSystem, v: &[f64]) -> SubspaceBasis {
    orbit_span_tol(sys.generators(), v, linalg::SPAN_TOL)
}

pub(crate) fn orbit_span_tol(gens: &[Matrix], v: &[f64], tol: f64) -> SubspaceBasis {
    let d = v.len();
    let mut b = SpanBuilder::new(d, tol);
    b.try_add(v);
    let mut done = 0;
    while done < b.dim() && !b.is_full() {
        let q = b.basis()[done].clone();
        done += 1;
        for g in gens {
            b.try_add(&g.apply(&q));
        }
    }
    b.into_subspace()
}

/// Dimension of the unital algebra generated by the tuple, and whether it is `d²`.
pub fn algebra_dimension(sys: &GeneratorSystem) -> (usize, bool) {
    let d = sys.dim();
    let mut b = SpanBuilder::new(d * d, linalg::SPAN_TOL);
    b.try_add(Matrix::identity(d).data());
    let mut done = 0;
    while done < b.dim() && !b.is_full() {
        let q = Matrix::from_vec_unchecked(d, b.basis()[done].clone());
        done += 1;
        for g in sys.generators() {
            b.try_add(g.matmul(&q).data());
        }
    }
    (b.dim(), b.dim() == d * d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictStatus {
    IrreducibleCertified,
    ReducibleWitness,
    Inconclusive,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerdictMethod {
    /// d = 1 has no proper nonzero subspace.
    Trivial,
    /// Plane test in exact rational arithmetic.
    ExactForms,
    /// Plane test in floating point with relative tolerance.
    FloatForms,
    AlgebraDimension,
    RandomizedSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IrreducibilityVerdict {
    pub status: VerdictStatus,
    pub witness: Option<SubspaceBasis>,
    pub method: VerdictMethod,
    /// Form margin for the plane tests, invariance residual of a witness, or the
    /// algebra rank deficiency; see `method`.
    pub residual: f64,
}

/// `max_i max_{q} ‖A_i q − P_W A_i q‖ / ‖A_i q‖` over the orthonormal basis of `W`.
pub fn invariance_residual(gens: &[Matrix], w: &SubspaceBasis) -> f64 {
    gens.iter()
        .flat_map(|g| w.basis.iter().map(move |q| w.relative_residual(&g.apply(q))))
        .fold(0.0, f64::max)
}

/// Decide whether the tuple leaves a proper nonzero subspace invariant.
pub fn irreducibility_verdict(ctx: &Context, sys: &GeneratorSystem) -> IrreducibilityVerdict {
    irreducibility_verdict_with(ctx, sys, DEFAULT_MULTISTARTS)
}

pub fn irreducibility_verdict_with(
    ctx: &Context,
    sys: &GeneratorSystem,
    multistarts: usize,
) -> IrreducibilityVerdict {
    let d = sys.dim();
    if d == 1 {
        return IrreducibilityVerdict {
            status: VerdictStatus::IrreducibleCertified,
            witness: None,
            method: VerdictMethod::Trivial,
            residual: 0.0,
        };
    }
    if d == 2 {
        return plane_verdict(sys);
    }
    let (dim, full) = algebra_dimension(sys);
    if full {
        return IrreducibilityVerdict {
            status: VerdictStatus::IrreducibleCertified,
            witness: None,
            method: VerdictMethod::AlgebraDimension,
            residual: 0.0,
        };
    }
    match randomized_witness_search(ctx, sys.generators(), multistarts) {
        Some((w, r)) => IrreducibilityVerdict {
            status: VerdictStatus::ReducibleWitness,
            witness: Some(w),
            method: VerdictMethod::RandomizedSearch,
            residual: r,
        },
        None => IrreducibilityVerdict {
            status: VerdictStatus::Inconclusive,
            witness: None,
            method: VerdictMethod::RandomizedSearch,
            residual: (d * d - dim) as f64,
        },
    }
}

fn plane_verdict(sys: &GeneratorSystem) -> IrreducibilityVerdict {
    let (root, method, margin) = match sys.exact() {
        Some(ex) => {
            let forms: Vec<Form<_>> = ex.iter().map(|q| eigen_form(&qentries(q))).collect();
            (exact_common_root(&forms), VerdictMethod::ExactForms, 0.0)
        }
        None => {
            let forms: Vec<Form<f64>> = sys.generators().iter().map(|g| eigen_form(g.data())).collect();
            let (root, m) = float_common_root(&forms, FLOAT_FORM_TOL);
            (root, VerdictMethod::FloatForms, m)
        }
    };
    match root {
        Some(u) => {
            let w = SubspaceBasis::line(&u);
            let r = invariance_residual(sys.generators(), &w);
            IrreducibilityVerdict {
                status: VerdictStatus::ReducibleWitness,
                witness: Some(w),
                method,
                residual: r,
            }
        }
        None => IrreducibilityVerdict {
            status: VerdictStatus::IrreducibleCertified,
            witness: None,
            method,
            residual: margin,
        },
    }
}

pub(crate) fn qentries(q: &QMatrix) -> Vec<num_rational::BigRational> {
    let d = q.dim();
    (0..d * d).map(|i| q.get(i / d, i % d).clone()).collect()
}

/// Real eigenvectors, and one vector from each real 2-plane of a complex pair, of `p`.
fn eigen_seeds(p: &Matrix) -> Vec<Vec<f64>> {
    let d = p.dim();
    let scale = p.norm().max(f64::MIN_POSITIVE);
    let mut out = Vec::new();
    let ev = p.to_na().complex_eigenvalues();
    for z in ev.iter() {
        if z.im.abs() <= 1e-9 * scale {
            let shifted = p.sub(&Matrix::scalar(d, z.re));
            out.push(null_vectors(&shifted, 1).remove(0));
        } else if z.im > 0.0 {
            // (P − aI)² + b²I annihilates the real plane of the pair a ± ib.
            let s = p.sub(&Matrix::scalar(d, z.re));
            let q = s.matmul(&s).add(&Matrix::scalar(d, z.im * z.im));
            out.extend(null_vectors(&q, 2));
        }
    }
    out
}

/// Right singular vectors for the `k` smallest singular values.
fn null_vectors(m: &Matrix, k: usize) -> Vec<Vec<f64>> {
    let svd = m.svd();
    svd.right.into_iter().rev().take(k).collect()
}

/// Look for an invariant proper subspace among orbit spans of eigen-directions of
/// random short products. Returns the witness and its invariance residual.
pub fn randomized_witness_search(
    ctx: &Context,
    gens: &[Matrix],
    multistarts: usize,
) -> Option<(SubspaceBasis, f64)> {
    let d = gens[0].dim();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let mut products: Vec<Matrix> = gens.to_vec();
    while products.len() < multistarts.max(gens.len()) {
        let len = rng.random_range(1..=3usize);
        let mut p = Matrix::identity(d);
        for _ in 0..len {
            p = gens[rng.random_range(0..gens.len())].matmul(&p);
        }
        // A random combination breaks ties between products with shared spectra.
        if rng.random_bool(0.5) {
            let c: f64 = rng.random_range(-1.0..1.0);
            p = p.add(&gens[rng.random_range(0..gens.len())].scale(c));
        }
        products.push(p);
    }
    let mut best: Option<(SubspaceBasis, f64)> = None;
    for p in products.iter().take(multistarts.max(1)) {
        for seed in eigen_seeds(p) {
            let w = orbit_span_tol(gens, &seed, 1e-7);
            if !w.is_proper() {
                continue;
            }
            let r = invariance_residual(gens, &w);
            if r <= WITNESS_TOL && best.as_ref().is_none_or(|(b, br)| (w.dim(), r) < (b.dim(), *br)) {
                best = Some((w, r));
            }
        }
    }
    best
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum HypothesisMode {
    /// Powers `𝒜ᵗ` for `t | d` and exterior powers `𝒜^∧m`, `m < d`.
    #[serde(rename = "theorem_1_1")]
    PowersAndWedges,
    /// `𝒜`, `𝒜²` irreducible and small generator norms, for planar attractors.
    #[serde(rename = "corollary_4_3")]
    PlanarAttractor,
}

impl std::str::FromStr for HypothesisMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theorem_1_1" => Ok(HypothesisMode::PowersAndWedges),
            "corollary_4_3" => Ok(HypothesisMode::PlanarAttractor),
            other => Err(Error::input(format!(
                "unknown mode {other:?} (expected theorem_1_1 or corollary_4_3)"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum HypothesisCheck {
    Power { t: usize, verdict: IrreducibilityVerdict },
    Wedge { m: usize, verdict: IrreducibilityVerdict },
    NormBound { symbol: usize, norm: f64, bound: f64, passed: bool },
}

impl HypothesisCheck {
    pub fn label(&self) -> String {
        match self {
            HypothesisCheck::Power { t, .. } => format!("t={t}"),
            HypothesisCheck::Wedge { m, .. } => format!("m={m}"),
            HypothesisCheck::NormBound { symbol, .. } => format!("norm of generator {symbol}"),
        }
    }

    fn outcome(&self) -> Outcome {
        let from = |v: &IrreducibilityVerdict| match v.status {
            VerdictStatus::IrreducibleCertified => Outcome::Pass,
            VerdictStatus::ReducibleWitness => Outcome::Fail(v.witness.clone()),
            VerdictStatus::Inconclusive => Outcome::Unknown,
        };
        match self {
            HypothesisCheck::Power { verdict, .. } | HypothesisCheck::Wedge { verdict, .. } => from(verdict),
            HypothesisCheck::NormBound { passed: true, .. } => Outcome::Pass,
            HypothesisCheck::NormBound { passed: false, .. } => Outcome::Fail(None),
        }
    }
}

enum Outcome {
    Pass,
    Fail(Option<SubspaceBasis>),
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Overall {
    Pass,
    Fail { label: String, witness: Option<SubspaceBasis> },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub mode: HypothesisMode,
    pub checks: Vec<HypothesisCheck>,
    pub overall: Overall,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.overall == Overall::Pass
    }
}

/// Run the irreducibility hypotheses of the chosen mode.
///
/// `theorem_1_1`: `𝒜ᵗ` for every divisor `t` of `d` and `𝒜^∧m` for `1 ≤ m ≤ d−1`.
/// `corollary_4_3`: `𝒜` and `𝒜²` irreducible and every `‖A_i‖ < 1/2`; needs `d = 2`
/// and translations.
pub fn check_hypotheses(
    ctx: &Context,
    sys: &GeneratorSystem,
    mode: HypothesisMode,
) -> Result<HypothesisReport> {
    let d = sys.dim();
    let mut checks = Vec::new();
    match mode {
        HypothesisMode::PowersAndWedges => {
            for t in (1..=d).filter(|t| d.is_multiple_of(*t)) {
                let p = power_system(ctx, sys, t)?;
                checks.push(HypothesisCheck::Power { t, verdict: irreducibility_verdict(ctx, &p) });
            }
            for m in 1..d {
                let w = wedge_system(sys, m)?;
                checks.push(HypothesisCheck::Wedge { m, verdict: irreducibility_verdict(ctx, &w) });
            }
        }
        HypothesisMode::PlanarAttractor => {
            if d != 2 {
                return Err(Error::input("corollary_4_3 mode requires d = 2"));
            }
            if sys.translations().is_none() {
                return Err(Error::input("corollary_4_3 mode requires translations"));
            }
            for t in [1, 2] {
                let p = power_system(ctx, sys, t)?;
                checks.push(HypothesisCheck::Power { t, verdict: irreducibility_verdict(ctx, &p) });
            }
            for (i, g) in sys.generators().iter().enumerate() {
                let norm = g.norm();
                checks.push(HypothesisCheck::NormBound {
                    symbol: i + 1,
                    norm,
                    bound: 0.5,
                    passed: norm < 0.5,
                });
            }
        }
    }
    let mut overall = Overall::Pass;
    for c in &checks {
        match c.outcome() {
            Outcome::Pass => {}
            Outcome::Fail(witness) => {
                overall = Overall::Fail { label: c.label(), witness };
                break;
            }
            Outcome::Unknown => overall = Overall::Inconclusive,
        }
    }
    Ok(HypothesisReport { mode, checks, overall })
}
