//! `M_k = span{𝒜_I : |I| = k}`, uniform spannability, and failure diagnosis.
//!
//! `V_{u,k} = M_k·u`, so "the images of every `u` span `ℝ^d`" becomes one minimax
//! over the sphere: `min_u σ_d(u ↦ (B₁u, …, B_r u))` for a basis `B_j` of `M_k`.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::hypothesis::{self, qentries, IrreducibilityVerdict, VerdictStatus};
use crate::linalg::forms::{circle_margin, exact_common_root, float_common_root, pair_form, Form};
use crate::linalg::{self, dot, wedge_vectors, Matrix, SpanBuilder, SubspaceBasis};
use crate::optim::{self, BnbStop};
use crate::system::GeneratorSystem;
use crate::wordspace::Word;

/// Threshold on the squared smallest singular value of the stacked map.
pub const TAU_SPAN: f64 = 1e-8;
/// A witness must have `σ_d/σ_1` of the stacked map at most this.
pub const RANK_TOL: f64 = 1e-8;
/// Principal-angle tolerance for period detection.
pub const PERIOD_TOL: f64 = 1e-6;
pub const DEFAULT_K_MAX: usize = 8;

const MULTISTARTS: usize = 64;
const BNB_MAX_CELLS: usize = 400_000;

/// An orthonormal basis of `M_k` together with words whose products span it.
#[derive(Clone, Debug)]
pub struct MkBasis {
    pub k: usize,
    /// Frobenius-orthonormal basis, each matrix as a row-major `d²` vector.
    pub basis: Vec<Vec<f64>>,
    /// Words `I` with `|I| = k` whose products form a basis of `M_k`.
    pub words: Vec<Word>,
    /// `𝒜_I` for the selected words, unnormalized.
    pub products: Vec<Matrix>,
    dim_d: usize,
}

impl MkBasis {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.dim_d * self.dim_d
    }

    pub fn basis_matrices(&self) -> Vec<Matrix> {
        self.basis.iter().map(|b| Matrix::from_vec_unchecked(self.dim_d, b.clone())).collect()
    }

    /// `V_{u,k} = M_k·u`.
    pub fn image_of(&self, u: &[f64]) -> SubspaceBasis {
        let vs: Vec<Vec<f64>> = self.basis_matrices().iter().map(|b| b.apply(u)).collect();
        linalg::span_basis_in(self.dim_d, &vs, RANK_TOL)
    }
}

/// `M_1, …, M_{k_max}` built by `M_{k+1} = span{A_i·B : B ∈ M_k}`.
pub fn mk_chain(sys: &GeneratorSystem, k_max: usize) -> Vec<MkBasis> {
    let d = sys.dim();
    let mut out: Vec<MkBasis> = Vec::with_capacity(k_max);
    let mut words: Vec<Word> = vec![Word::empty()];
    let mut prods: Vec<Matrix> = vec![Matrix::identity(d)];
    for k in 1..=k_max {
        let mut b = SpanBuilder::new(d * d, linalg::SPAN_TOL);
        let mut next_words = Vec::new();
        let mut next_prods = Vec::new();
        for (w, p) in words.iter().zip(&prods) {
            for (i, g) in sys.generators().iter().enumerate() {
                let q = g.matmul(p);
                let mut v = q.data().to_vec();
                linalg::normalize(&mut v);
                if b.try_add(&v) {
                    next_words.push(w.concat(&Word(vec![i + 1])));
                    next_prods.push(q);
                }
            }
        }
        out.push(MkBasis {
            k,
            basis: b.basis().to_vec(),
            words: next_words.clone(),
            products: next_prods.clone(),
            dim_d: d,
        });
        words = next_words;
        prods = next_prods;
    }
    out
}

pub fn mk_basis(sys: &GeneratorSystem, k: usize) -> Result<MkBasis> {
    if k == 0 {
        return Err(Error::input("k must be at least 1"));
    }
    Ok(mk_chain(sys, k).pop().unwrap())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SpanMode {
    /// Full-algebra shortcut, then the plane forms for d = 2, then the numeric search.
    #[default]
    Auto,
    /// Skip the shortcuts and run the sphere search directly.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpanMethod {
    /// `dim M_k = d²`; the orthonormal basis gives `σ_d ≡ 1`.
    FullAlgebra,
    ExactForms,
    FloatForms,
    /// Multistart descent plus Lipschitz branch and bound.
    SphereSearch,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SpanStatus {
    Spannable,
    NotSpannable { witness: Vec<f64> },
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpannabilityCertificate {
    pub k: usize,
    pub status: SpanStatus,
    /// Certified lower bound. Plane forms: `min_{|u|=1} max_{i<j} |det(B_i u | B_j u)|` over the
    /// selected word products. Otherwise: `min_{|u|=1} σ_d` of the stacked map built from an
    /// orthonormal basis of `M_k`.
    pub margin: f64,
    /// Whether exact rational arithmetic decided.
    pub exact: bool,
    pub method: SpanMethod,
    pub mk_dim: usize,
    /// Best minimizer found (the witness when not spannable).
    pub minimizer: Vec<f64>,
}

impl SpannabilityCertificate {
    pub fn is_spannable(&self) -> bool {
        self.status == SpanStatus::Spannable
    }
}

pub fn spannable_at(ctx: &Context, sys: &GeneratorSystem, k: usize, mode: SpanMode) -> Result<SpannabilityCertificate> {
    let mk = mk_basis(sys, k)?;
    Ok(certify(ctx, sys, &mk, mode))
}

fn certify(ctx: &Context, sys: &GeneratorSystem, mk: &MkBasis, mode: SpanMode) -> SpannabilityCertificate {
    let d = sys.dim();
    let mut cert = SpannabilityCertificate {
        k: mk.k,
        status: SpanStatus::Inconclusive,
        margin: 0.0,
        exact: false,
        method: SpanMethod::SphereSearch,
        mk_dim: mk.dim(),
        minimizer: linalg::unit_vector(d, 0),
    };
    if mode == SpanMode::Auto && mk.is_full() {
        cert.status = SpanStatus::Spannable;
        cert.margin = 1.0;
        cert.method = SpanMethod::FullAlgebra;
        return cert;
    }
    if mode == SpanMode::Auto && d == 2 {
        plane_certificate(sys, mk, &mut cert);
        return cert;
    }
    sphere_certificate(ctx, mk, &mut cert);
    cert
}

fn plane_certificate(sys: &GeneratorSystem, mk: &MkBasis, cert: &mut SpannabilityCertificate) {
    let float_forms: Vec<Form<f64>> = pairs(mk.products.len())
        .map(|(i, j)| pair_form(mk.products[i].data(), mk.products[j].data()))
        .collect();
    let (margin, theta) = circle_margin(&float_forms);
    let root = if sys.exact().is_some() {
        cert.exact = true;
        cert.method = SpanMethod::ExactForms;
        let ex: Vec<Vec<_>> =
            mk.words.iter().map(|w| qentries(&sys.exact_product(w).unwrap())).collect();
        let forms: Vec<Form<_>> = pairs(ex.len()).map(|(i, j)| pair_form(&ex[i], &ex[j])).collect();
        exact_common_root(&forms)
    } else {
        cert.method = SpanMethod::FloatForms;
        // Scale-free decision: each form scaled to unit sup norm on the circle.
        float_common_root(&float_forms, hypothesis::FLOAT_FORM_TOL).0
    };
    match root {
        Some(u) => {
            cert.status = SpanStatus::NotSpannable { witness: u.to_vec() };
            cert.margin = 0.0;
            cert.minimizer = u.to_vec();
        }
        None => {
            cert.status = SpanStatus::Spannable;
            cert.margin = margin;
            cert.minimizer = vec![theta.cos(), theta.sin()];
        }
    }
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |i| (i + 1..n).map(move |j| (i, j)))
}

/// `G(u) = Σ_j (B_j u)(B_j u)ᵀ`; its smallest eigenvalue is `σ_d(stack)²`.
fn gram(bs: &[Matrix], u: &[f64]) -> DMatrix<f64> {
    let d = u.len();
    let mut g = DMatrix::<f64>::zeros(d, d);
    for b in bs {
        let v = b.apply(u);
        for i in 0..d {
            for j in 0..d {
                g[(i, j)] += v[i] * v[j];
            }
        }
    }
    g
}

/// Smallest eigenpair of a symmetric matrix.
fn min_eig(g: DMatrix<f64>) -> (f64, Vec<f64>) {
    let e = g.symmetric_eigen();
    let (idx, val) = e
        .eigenvalues
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |acc, (i, &v)| if v < acc.1 { (i, v) } else { acc });
    (val.max(0.0), e.eigenvectors.column(idx).iter().copied().collect())
}

fn stack_objective(bs: &[Matrix], u: &[f64]) -> (f64, Vec<f64>) {
    let (f, z) = min_eig(gram(bs, u));
    let mut grad = vec![0.0; u.len()];
    for b in bs {
        let c = dot(&z, &b.apply(u));
        linalg::axpy(2.0 * c, &b.apply_transpose(&z), &mut grad);
    }
    (f, grad)
}

/// Alternating exact minimization of `Σ_j (zᵀ B_j u)²` over unit `u` and `z`.
fn polish(bs: &[Matrix], mut u: Vec<f64>, iters: usize) -> Vec<f64> {
    let d = u.len();
    for _ in 0..iters {
        let (_, z) = min_eig(gram(bs, &u));
        let mut h = DMatrix::<f64>::zeros(d, d);
        for b in bs {
            let y = b.apply_transpose(&z);
            for i in 0..d {
                for j in 0..d {
                    h[(i, j)] += y[i] * y[j];
                }
            }
        }
        let (_, next) = min_eig(h);
        u = next;
    }
    u
}

/// `σ_d/σ_1` of the stacked map at `u`.
fn stack_rank_ratio(bs: &[Matrix], u: &[f64]) -> f64 {
    let e = gram(bs, u).symmetric_eigen();
    let max = e.eigenvalues.iter().copied().fold(0.0, f64::max);
    let min = e.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min).max(0.0);
    if max == 0.0 {
        0.0
    } else {
        (min / max).sqrt()
    }
}

fn sphere_certificate(ctx: &Context, mk: &MkBasis, cert: &mut SpannabilityCertificate) {
    let bs = mk.basis_matrices();
    let d = cert.minimizer.len();
    let starts: Vec<Vec<f64>> = {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
        (0..MULTISTARTS).map(|_| optim::random_unit(&mut rng, d)).collect()
    };
    let runs: Vec<(f64, Vec<f64>)> = ctx.install(|| {
        starts
            .into_par_iter()
            .map(|s| optim::descend(&|u: &[f64]| stack_objective(&bs, u), s, 400))
            .collect()
    });
    let (_, best_u) = runs
        .into_iter()
        .fold((f64::INFINITY, Vec::new()), |acc, r| if r.0 < acc.0 { r } else { acc });
    let mut u = best_u;
    if stack_rank_ratio(&bs, &u) > RANK_TOL {
        let p = polish(&bs, u.clone(), 200);
        if stack_objective(&bs, &p).0 <= stack_objective(&bs, &u).0 {
            u = p;
        }
    }
    linalg::canonical_sign(&mut u);
    cert.minimizer = u.clone();
    if stack_rank_ratio(&bs, &u) <= RANK_TOL {
        cert.status = SpanStatus::NotSpannable { witness: u };
        cert.margin = 0.0;
        return;
    }
    // σ_d(stack) is Lipschitz with constant sqrt(λ_max(Σ B_jᵀ B_j)).
    let mut sum = DMatrix::<f64>::zeros(d, d);
    for b in &bs {
        let bn = b.to_na();
        sum += bn.transpose() * &bn;
    }
    let lip = sum.symmetric_eigen().eigenvalues.iter().copied().fold(0.0, f64::max).sqrt();
    let sigma = |u: &[f64]| min_eig(gram(&bs, u)).0.sqrt();
    let stop = BnbStop {
        rel_gap: 1e-3,
        certify_above: f64::INFINITY,
        refute_below: 0.0,
        max_cells: BNB_MAX_CELLS,
    };
    let r = optim::sphere_bnb(d, &sigma, lip, 8, stop);
    let lower = r.lower.max(0.0);
    if lower * lower > TAU_SPAN {
        cert.status = SpanStatus::Spannable;
        cert.margin = lower;
    } else {
        cert.margin = lower;
        if stack_rank_ratio(&bs, &r.argmin) <= RANK_TOL {
            cert.status = SpanStatus::NotSpannable { witness: r.argmin.clone() };
            cert.minimizer = r.argmin;
            cert.margin = 0.0;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalK {
    /// Least spannable `k`, or `None` when none up to `k_max` was certified.
    pub k: Option<usize>,
    pub k_max: usize,
    pub certificates: Vec<SpannabilityCertificate>,
}

/// Least `k ≤ k_max` with a Spannable certificate; stops at the first success.
pub fn minimal_spannable_k(ctx: &Context, sys: &GeneratorSystem, k_max: usize, mode: SpanMode) -> Result<MinimalK> {
    if k_max == 0 {
        return Err(Error::input("k_max must be at least 1"));
    }
    let chain = mk_chain(sys, k_max);
    let mut certificates = Vec::new();
    for mk in &chain {
        let c = certify(ctx, sys, mk, mode);
        let done = c.is_spannable();
        certificates.push(c);
        if done {
            return Ok(MinimalK { k: Some(mk.k), k_max, certificates });
        }
    }
    Ok(MinimalK { k: None, k_max, certificates })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub k: usize,
    pub dim: usize,
    pub basis: SubspaceBasis,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenValue {
    pub re: f64,
    pub im: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum DiagnosisCase {
    /// `V_{k+t} = V_k` along the tail; `W` spans one period.
    PeriodicSubspaces {
        period: usize,
        span: SubspaceBasis,
        cross_check: IrreducibilityVerdict,
        consistent: bool,
    },
    /// The `γ`-vectors of the chain against `B_{i,j} = (A_i^∧γ)⁻¹ A_j^∧γ`.
    WedgeEigenStructure {
        gamma: usize,
        /// `C(d, γ)`.
        wedge_dim: usize,
        i: usize,
        j: usize,
        eigenvalues: Vec<EigenValue>,
        /// Largest `‖B w_k − (w_kᵀ B w_k) w_k‖` over the chain's unit wedge vectors.
        eigenvector_residual: f64,
    },
    Undetermined { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FailureDiagnosis {
    pub witness: Vec<f64>,
    pub chain: Vec<ChainLink>,
    pub case: DiagnosisCase,
}

/// Explain why no `k ≤ k_max` is spannable, along the two cases of the argument that
/// irreducibility of the power and exterior cocycles forces spannability.
pub fn diagnose_failure(ctx: &Context, sys: &GeneratorSystem, k_max: usize) -> Result<FailureDiagnosis> {
    let found = minimal_spannable_k(ctx, sys, k_max, SpanMode::Auto)?;
    if let Some(k) = found.k {
        return Err(Error::Contract(format!("system is {k}-uniformly spannable; nothing to diagnose")));
    }
    let last = found.certificates.last().unwrap();
    let u = match &last.status {
        SpanStatus::NotSpannable { witness } => witness.clone(),
        _ => last.minimizer.clone(),
    };
    Ok(diagnose_with_witness(ctx, sys, k_max, &u))
}

/// Diagnosis along the chain `V_k = M_k·u` for a given witness `u`.
pub fn diagnose_with_witness(ctx: &Context, sys: &GeneratorSystem, k_max: usize, u: &[f64]) -> FailureDiagnosis {
    let d = sys.dim();
    let chain_mk = mk_chain(sys, k_max);
    let chain: Vec<ChainLink> = chain_mk
        .iter()
        .map(|mk| {
            let b = mk.image_of(u);
            ChainLink { k: mk.k, dim: b.dim(), basis: b }
        })
        .collect();
    let witness = u.to_vec();
    let undetermined = |reason: &str| FailureDiagnosis {
        witness: witness.clone(),
        chain: chain.clone(),
        case: DiagnosisCase::Undetermined { reason: reason.to_string() },
    };
    let vk = |k: usize| &chain[k - 1].basis;
    let lo = (k_max / 2).max(1);
    let period = (1..=k_max / 2).find(|&t| {
        (lo..=k_max - t).all(|k| vk(k).distance(vk(k + t)) <= PERIOD_TOL)
    });
    if let Some(t) = period {
        let start = k_max - t + 1;
        let mut span = vk(start).clone();
        for k in start + 1..=k_max {
            span = span.join(vk(k), linalg::SPAN_TOL);
        }
        let cross_check = match hypothesis::power_system(ctx, sys, t) {
            Ok(p) => hypothesis::irreducibility_verdict(ctx, &p),
            Err(_) => return undetermined("power system for the period exceeds the budget"),
        };
        let consistent = cross_check.status == VerdictStatus::ReducibleWitness;
        return FailureDiagnosis {
            witness,
            chain,
            case: DiagnosisCase::PeriodicSubspaces { period: t, span, cross_check, consistent },
        };
    }
    let gamma = chain.last().map(|c| c.dim).unwrap_or(0);
    if gamma == 0 || gamma >= d || chain[lo - 1..].iter().any(|c| c.dim != gamma) {
        return undetermined("subspace dimensions along the chain did not stabilize below d");
    }
    let wedges: Vec<Matrix> = sys
        .generators()
        .iter()
        .map(|g| if gamma == 1 { g.clone() } else { linalg::compound(g, gamma) })
        .collect();
    let n = wedges[0].dim();
    let mut pick = None;
    'outer: for i in 0..wedges.len() {
        let Some(inv) = wedges[i].inverse() else { continue };
        for j in 0..wedges.len() {
            if i == j {
                continue;
            }
            let b = inv.matmul(&wedges[j]);
            let c = b.trace() / n as f64;
            if b.sub(&Matrix::scalar(n, c)).frobenius_norm() > 1e-9 * b.frobenius_norm() {
                pick = Some((i, j, b));
                break 'outer;
            }
        }
    }
    let Some((i, j, b)) = pick else {
        return undetermined("every B_ij is scalar");
    };
    let eigenvalues = b
        .to_na()
        .complex_eigenvalues()
        .iter()
        .map(|z| EigenValue { re: z.re, im: z.im })
        .collect();
    let residual = chain[lo - 1..]
        .iter()
        .map(|c| {
            let mut w = wedge_vectors(d, &c.basis.basis);
            linalg::normalize(&mut w);
            let bw = b.apply(&w);
            let lam = dot(&w, &bw);
            let r: Vec<f64> = bw.iter().zip(&w).map(|(x, y)| x - lam * y).collect();
            linalg::norm(&r) / linalg::norm(&bw).max(f64::MIN_POSITIVE)
        })
        .fold(0.0, f64::max);
    FailureDiagnosis {
        witness,
        chain,
        case: DiagnosisCase::WedgeEigenStructure {
            gamma,
            wedge_dim: n,
            i: i + 1,
            j: j + 1,
            eigenvalues,
            eigenvector_residual: residual,
        },
    }
}
