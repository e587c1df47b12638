//! Words over `{1, …, ℓ}`, products along them, and deterministic folds over `Λ(n)`.
//!
//! For a word `I = i₀ i₁ … i_{n−1}` the product is `𝒜_I = A_{i_{n−1}} ⋯ A_{i₀}`:
//! later symbols multiply on the left, so extending a word by one symbol costs a
//! single matrix product.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// A finite word; symbols are 1-based.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<usize>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(symbols: Vec<usize>, ell: usize) -> Result<Self> {
        let w = Word(symbols);
        w.check(ell)?;
        Ok(w)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    pub fn check(&self, ell: usize) -> Result<()> {
        match self.0.iter().find(|&&s| s == 0 || s > ell) {
            Some(s) => Err(Error::input(format!(
                "symbol {s} in word \"{}\" is outside 1..={ell}",
                self.format(ell.max(*s))
            ))),
            None => Ok(()),
        }
    }

    /// Parse `"121"` (ℓ ≤ 9) or `"1,10,3"`; the empty string is the empty word.
    pub fn parse(text: &str, ell: usize) -> Result<Self> {
        let t = text.trim();
        let symbols: Vec<usize> = if t.is_empty() {
            Vec::new()
        } else if t.contains(',') || ell > 9 {
            t.split(',')
                .map(|p| p.trim().parse::<usize>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::input(format!("malformed word {text:?}")))?
        } else {
            t.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize))
                .collect::<Option<_>>()
                .ok_or_else(|| Error::input(format!("malformed word {text:?}")))?
        };
        Word::new(symbols, ell)
    }

    /// Digit string for `ℓ ≤ 9`, comma-separated otherwise.
    pub fn format(&self, ell: usize) -> String {
        if ell <= 9 {
            self.0.iter().map(|s| char::from(b'0' + *s as u8)).collect()
        } else {
            self.0.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(&other.0).copied().collect())
    }

    pub fn repeat(symbol: usize, n: usize) -> Word {
        Word(vec![symbol; n])
    }

    /// Lexicographic rank of the word among `Λ(|I|)`.
    pub fn index(&self, ell: usize) -> usize {
        self.0.iter().fold(0, |acc, &s| acc * ell + (s - 1))
    }

    pub fn from_index(mut index: usize, ell: usize, n: usize) -> Word {
        let mut s = vec![0; n];
        for slot in s.iter_mut().rev() {
            *slot = index % ell + 1;
            index /= ell;
        }
        Word(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ell = self.0.iter().copied().max().unwrap_or(1);
        f.write_str(&self.format(ell))
    }
}

/// All words of length `n` over `{1, …, ℓ}` in lexicographic order.
pub fn enumerate_words(ell: usize, n: usize) -> impl Iterator<Item = Word> {
    let mut next = (ell > 0 || n == 0).then(|| vec![1usize; n]);
    std::iter::from_fn(move || {
        let current = next.take()?;
        let mut succ = current.clone();
        let mut i = n;
        while i > 0 {
            i -= 1;
            if succ[i] < ell {
                succ[i] += 1;
                next = Some(succ);
                break;
            }
            succ[i] = 1;
        }
        Some(Word(current))
    })
}

/// A matrix stored as `2^exp2 · unit` with `‖unit‖_F ∈ [1, 2)`.
///
/// Rescaling is by exact powers of two, so no rounding is introduced and long
/// words neither overflow nor underflow. `log |det|` is accumulated additively from
/// the factors, which keeps the small singular values of long products accurate.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledProduct {
    pub unit: Matrix,
    pub exp2: i64,
    pub log_abs_det: f64,
}

impl ScaledProduct {
    pub fn identity(dim: usize) -> Self {
        ScaledProduct::from_matrix(Matrix::identity(dim))
    }

    pub fn from_matrix(m: Matrix) -> Self {
        let log_abs_det = m.det().abs().ln();
        let mut p = ScaledProduct { unit: m, exp2: 0, log_abs_det };
        p.renormalize();
        p
    }

    fn renormalize(&mut self) {
        let f = self.unit.frobenius_norm();
        if f == 0.0 || !f.is_finite() {
            return;
        }
        let e = exponent_of(f);
        if e != 0 {
            let s = pow2(-e);
            self.unit = self.unit.scale(s);
            self.exp2 += e;
        }
    }

    /// `A · self`.
    pub fn left_mul(&self, a: &Matrix) -> ScaledProduct {
        self.left_mul_with(a, a.det().abs().ln())
    }

    /// `A · self` with `log |det A|` supplied by the caller.
    pub fn left_mul_with(&self, a: &Matrix, log_abs_det_a: f64) -> ScaledProduct {
        let mut p = ScaledProduct {
            unit: a.matmul(&self.unit),
            exp2: self.exp2,
            log_abs_det: self.log_abs_det + log_abs_det_a,
        };
        p.renormalize();
        p
    }

    /// `self · other` (scales add).
    pub fn mul(&self, other: &ScaledProduct) -> ScaledProduct {
        let mut p = ScaledProduct {
            unit: self.unit.matmul(&other.unit),
            exp2: self.exp2 + other.exp2,
            log_abs_det: self.log_abs_det + other.log_abs_det,
        };
        p.renormalize();
        p
    }

    /// Natural log of the scale factor.
    pub fn logscale(&self) -> f64 {
        self.exp2 as f64 * std::f64::consts::LN_2
    }

    /// `log ‖𝒜‖` (operator norm).
    pub fn log_norm(&self) -> f64 {
        self.unit.norm().ln() + self.logscale()
    }

    /// Logs of the singular values, descending. In the plane the smaller one is
    /// `log |det| − log σ₁`.
    pub fn log_singular_values(&self) -> Vec<f64> {
        let ls = self.logscale();
        if self.unit.dim() == 2 {
            let top = self.unit.norm().ln() + ls;
            return vec![top, self.log_abs_det - top];
        }
        self.unit.singular_values().iter().map(|s| s.ln() + ls).collect()
    }

    /// `log |det 𝒜|`.
    pub fn log_abs_det(&self) -> f64 {
        self.log_abs_det
    }

    /// The represented matrix (may overflow to ±∞ for extreme words).
    pub fn matrix(&self) -> Matrix {
        let s = 2f64.powi(self.exp2.clamp(i32::MIN as i64, i32::MAX as i64) as i32);
        self.unit.scale(s)
    }
}

/// Binary exponent `e` with `2^e ≤ x < 2^{e+1}` for finite positive `x`.
fn exponent_of(x: f64) -> i64 {
    let bits = x.to_bits();
    let raw = ((bits >> 52) & 0x7ff) as i64;
    if raw == 0 {
        // Subnormal: fall back to the float log.
        x.log2().floor() as i64
    } else {
        raw - 1023
    }
}

fn pow2(e: i64) -> f64 {
    if (-1022..=1023).contains(&e) {
        f64::from_bits(((e + 1023) as u64) << 52)
    } else {
        2f64.powi(e as i32)
    }
}

/// `𝒜_I` for the given generators.
pub fn product(generators: &[Matrix], word: &Word) -> Result<ScaledProduct> {
    word.check(generators.len())?;
    let dim = generators.first().map(Matrix::dim).unwrap_or(0);
    Ok(word
        .0
        .iter()
        .fold(ScaledProduct::identity(dim), |p, &s| p.left_mul(&generators[s - 1])))
}

/// Prefix length used to split `Λ(n)` into blocks; depends only on `ℓ` and `n`.
fn block_prefix_len(ell: usize, n: usize) -> usize {
    let mut p = 0;
    let mut count = 1usize;
    while p < n && count < 64 {
        count = count.saturating_mul(ell);
        p += 1;
    }
    p
}

/// Fold `visit` over every word of length `n` with its product.
///
/// `Λ(n)` is cut into contiguous lexicographic blocks by a fixed-length prefix.
/// Blocks may run on different threads, each starting from `init()`, and are merged
/// left to right in block order, so results do not depend on the thread schedule.
pub fn fold_words<A, I, V, M>(
    ctx: &Context,
    generators: &[Matrix],
    n: usize,
    init: I,
    visit: V,
    merge: M,
) -> Result<A>
where
    A: Send,
    I: Fn() -> A + Sync,
    V: Fn(&mut A, &[usize], &ScaledProduct) + Sync,
    M: Fn(A, A) -> A,
{
    let ell = generators.len();
    if ell == 0 {
        return Err(Error::input("system has no generators"));
    }
    ctx.check_budget(&format!("words of length {n}"), (ell as f64).powi(n as i32))?;
    let dim = generators[0].dim();
    let log_dets: Vec<f64> = generators.iter().map(|g| g.det().abs().ln()).collect();
    let p = block_prefix_len(ell, n);
    let blocks = ell.pow(p as u32);
    let results: Vec<A> = ctx.install(|| {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let mut acc = init();
                let mut word = Word::from_index(b, ell, p).0;
                let mut prefix = ScaledProduct::identity(dim);
                for &s in &word {
                    prefix = prefix.left_mul_with(&generators[s - 1], log_dets[s - 1]);
                }
                word.resize(n, 0);
                walk(generators, &log_dets, &mut word, p, prefix, &mut acc, &visit);
                acc
            })
            .collect()
    });
    let mut it = results.into_iter();
    let first = it.next().expect("at least one block");
    Ok(it.fold(first, merge))
}

fn walk<A, V>(
    generators: &[Matrix],
    log_dets: &[f64],
    word: &mut Vec<usize>,
    depth: usize,
    prod: ScaledProduct,
    acc: &mut A,
    visit: &V,
) where
    V: Fn(&mut A, &[usize], &ScaledProduct),
{
    if depth == word.len() {
        visit(acc, word, &prod);
        return;
    }
    for (i, g) in generators.iter().enumerate() {
        word[depth] = i + 1;
        walk(generators, log_dets, word, depth + 1, prod.left_mul_with(g, log_dets[i]), acc, visit);
    }
}

/// Products of every word of length `n`, in lexicographic order.
pub fn product_table(ctx: &Context, generators: &[Matrix], n: usize) -> Result<Vec<ScaledProduct>> {
    fold_words(
        ctx,
        generators,
        n,
        Vec::new,
        |acc: &mut Vec<ScaledProduct>, _, p| acc.push(p.clone()),
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    )
}

/// Streaming log-sum-exp: represents `log Σ e^{xᵢ}` as `m + log s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogSum {
    m: f64,
    s: f64,
}

impl Default for LogSum {
    fn default() -> Self {
        LogSum { m: f64::NEG_INFINITY, s: 0.0 }
    }
}

impl LogSum {
    pub fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.m {
            self.s = self.s * (self.m - x).exp() + 1.0;
            self.m = x;
        } else {
            self.s += (x - self.m).exp();
        }
    }

    pub fn merge(self, other: LogSum) -> LogSum {
        if other.s == 0.0 {
            return self;
        }
        if self.s == 0.0 {
            return other;
        }
        if other.m > self.m {
            LogSum { m: other.m, s: other.s + self.s * (self.m - other.m).exp() }
        } else {
            LogSum { m: self.m, s: self.s + other.s * (other.m - self.m).exp() }
        }
    }

    pub fn value(&self) -> f64 {
        if self.s == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.m + self.s.ln()
        }
    }
}
