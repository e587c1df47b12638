//! Finite-level stand-ins for the Gibbs measure of the norm potential.
//!
//! Only `kappa_floor` is a certificate: it is a pure norm inequality. The weights and the
//! ψ statistic are level-normalized proxies and are reported as evidence.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::quasimult::gamma_minimax;
use crate::system::GeneratorSystem;
use crate::thermo::{PotentialSpec, PressureEngine};
use crate::wordspace::{fold_words, product_table, LogSum, ScaledProduct, Word};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderWeights {
    pub s: f64,
    pub n: usize,
    pub ell: usize,
    /// `ŵ(I) = ‖𝒜_I‖ˢ / Σ_{|J|=n} ‖𝒜_J‖ˢ`, words in lexicographic order.
    pub weights: Vec<f64>,
}

impl CylinderWeights {
    pub fn weight(&self, w: &Word) -> f64 {
        self.weights[w.index(self.ell)]
    }

    pub fn entries(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        self.weights.iter().enumerate().map(|(i, &v)| (Word::from_index(i, self.ell, self.n), v))
    }
}

fn check_s(s: f64) -> Result<()> {
    if s >= 0.0 && s.is_finite() {
        Ok(())
    } else {
        Err(Error::input(format!("s must be finite and nonnegative, got {s}")))
    }
}

pub fn cylinder_weights(ctx: &Context, sys: &GeneratorSystem, s: f64, n: usize) -> Result<CylinderWeights> {
    check_s(s)?;
    let logs: Vec<f64> = product_table(ctx, sys.generators(), n)?.iter().map(|p| s * p.log_norm()).collect();
    let mut z = LogSum::default();
    for &l in &logs {
        z.add(l);
    }
    let z = z.value();
    let weights = logs.iter().map(|l| (l - z).exp()).collect();
    Ok(CylinderWeights { s, n, ell: sys.ell(), weights })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaFloor {
    pub s: f64,
    pub k: usize,
    pub max_len: usize,
    /// `γ_kˢ`.
    pub constant: f64,
    pub gamma_certified: bool,
    /// `min_{I,J} Σ_{|K|=k} ‖𝒜_{IKJ}‖ˢ / (‖𝒜_I‖ˢ ‖𝒜_J‖ˢ)`.
    pub raw_min: f64,
    /// `raw_min / constant`, absent when the constant vanishes.
    pub value: Option<f64>,
    /// True when there is no positive certified constant to compare with.
    pub no_certificate: bool,
    pub argmin_i: Word,
    pub argmin_j: Word,
}

impl KappaFloor {
    /// The inequality holds on the tested range.
    pub fn passed(&self) -> bool {
        !self.no_certificate && self.value.is_some_and(|v| v >= 1.0 - 1e-9)
    }
}

/// Products of every word with length in `1..=max_len`, grouped by length.
fn words_up_to(ctx: &Context, sys: &GeneratorSystem, max_len: usize) -> Result<Vec<(Word, ScaledProduct)>> {
    let ell = sys.ell();
    let mut out = Vec::new();
    for len in 1..=max_len {
        for (i, p) in product_table(ctx, sys.generators(), len)?.into_iter().enumerate() {
            out.push((Word::from_index(i, ell, len), p));
        }
    }
    Ok(out)
}

/// The connector inequality for the norm potential on all `I, J` with `1 ≤ |I|, |J| ≤ max_len`.
pub fn kappa_floor(ctx: &Context, sys: &GeneratorSystem, s: f64, k: usize, max_len: usize) -> Result<KappaFloor> {
    check_s(s)?;
    if max_len == 0 {
        return Err(Error::input("max cylinder length must be at least 1"));
    }
    let words = words_up_to(ctx, sys, max_len)?;
    let connectors = product_table(ctx, sys.generators(), k)?;
    let count = (words.len() as f64).powi(2) * connectors.len() as f64;
    ctx.check_budget("connector triples", count)?;
    let g = gamma_minimax(ctx, sys, k)?;
    let constant = if s == 0.0 { 1.0 } else { g.gamma.powf(s) };

    // Σ_K ‖𝒜_J 𝒜_K 𝒜_I‖ˢ in logs, for one I against every J.
    let per_i: Vec<(f64, usize)> = ctx.install(|| {
        words
            .par_iter()
            .map(|(_, pi)| {
                let kis: Vec<ScaledProduct> = connectors.iter().map(|pk| pk.mul(pi)).collect();
                let mut best = (f64::INFINITY, 0);
                for (j, (_, pj)) in words.iter().enumerate() {
                    let mut acc = LogSum::default();
                    for ki in &kis {
                        acc.add(s * pj.mul(ki).log_norm());
                    }
                    let r = acc.value() - s * (pi.log_norm() + pj.log_norm());
                    if r < best.0 {
                        best = (r, j);
                    }
                }
                best
            })
            .collect()
    });
    let (mut best, mut arg) = (f64::INFINITY, (0, 0));
    for (i, &(r, j)) in per_i.iter().enumerate() {
        if r < best {
            best = r;
            arg = (i, j);
        }
    }
    let raw_min = best.exp();
    let certified = g.certified && constant > 0.0;
    Ok(KappaFloor {
        s,
        k,
        max_len,
        constant,
        gamma_certified: g.certified,
        raw_min,
        value: certified.then(|| raw_min / constant),
        no_certificate: !certified,
        argmin_i: words[arg.0].0.clone(),
        argmin_j: words[arg.1].0.clone(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub s: f64,
    pub max_len: usize,
    pub gap: usize,
    /// `sup_{I,J} |ν(I at p, J at p+|I|+n) / (ν(I at p) ν(J at p+|I|+n)) − 1|` under the
    /// level-`level` measure, with `p = pad`.
    pub psi_hat: f64,
    pub argmax_i: Word,
    pub argmax_j: Word,
    pub level: usize,
    pub pad: usize,
    /// The same supremum with each cylinder measured at its own level and no padding.
    pub psi_unpadded: f64,
    pub kappa: Option<KappaFloor>,
    /// `max_m max(Z_m e^{−mP̂}, e^{mP̂}/Z_m)` over `m ≤ max_len`; never used in verdicts.
    pub c0_estimate: Option<f64>,
    pub note: String,
}

/// ψ-mixing statistic at gap `gap` for cylinders of length `1..=max_len`.
///
/// Both cylinders sit `pad = max_len` symbols away from the ends of a word of length
/// `2·pad + 2·max_len + gap`, so boundary effects of the level normalization are
/// shared by the joint and the marginal masses.
pub fn psi_mixing_stat(ctx: &Context, sys: &GeneratorSystem, s: f64, max_len: usize, gap: usize) -> Result<MixingReport> {
    check_s(s)?;
    if max_len == 0 {
        return Err(Error::input("max cylinder length must be at least 1"));
    }
    let ell = sys.ell();
    let pad = max_len;
    let level = 2 * pad + 2 * max_len + gap;
    let gens = sys.generators();
    let log_z = fold_words(
        ctx,
        gens,
        level,
        LogSum::default,
        |acc: &mut LogSum, _, p| acc.add(s * p.log_norm()),
        LogSum::merge,
    )?
    .value();

    // One joint table per (|I|, |J|), indexed by (I, J) lexicographically.
    let sizes: Vec<(usize, usize)> = (1..=max_len).flat_map(|a| (1..=max_len).map(move |b| (a, b))).collect();
    let init = || sizes.iter().map(|&(a, b)| vec![0.0; ell.pow((a + b) as u32)]).collect::<Vec<Vec<f64>>>();
    let tables = fold_words(
        ctx,
        gens,
        level,
        init,
        |acc: &mut Vec<Vec<f64>>, w, p| {
            let v = (s * p.log_norm() - log_z).exp();
            for (t, &(a, b)) in acc.iter_mut().zip(&sizes) {
                let q = pad + a + gap;
                let idx = w[pad..pad + a].iter().chain(&w[q..q + b]).fold(0, |x, &c| x * ell + c - 1);
                t[idx] += v;
            }
        },
        |mut x, y| {
            for (tx, ty) in x.iter_mut().zip(&y) {
                for (a, b) in tx.iter_mut().zip(ty) {
                    *a += b;
                }
            }
            x
        },
    )?;
    let mut psi = (0.0f64, Word::empty(), Word::empty());
    for (t, &(a, b)) in tables.iter().zip(&sizes) {
        let (ni, nj) = (ell.pow(a as u32), ell.pow(b as u32));
        let mi: Vec<f64> = (0..ni).map(|i| t[i * nj..(i + 1) * nj].iter().sum()).collect();
        let mj: Vec<f64> = (0..nj).map(|j| (0..ni).map(|i| t[i * nj + j]).sum()).collect();
        for i in 0..ni {
            for j in 0..nj {
                let dev = (t[i * nj + j] / (mi[i] * mj[j]) - 1.0).abs();
                if dev > psi.0 {
                    psi = (dev, Word::from_index(i, ell, a), Word::from_index(j, ell, b));
                }
            }
        }
    }

    let psi_unpadded = psi_unpadded(ctx, sys, s, max_len, gap)?;
    let c0_estimate = c0_estimate(ctx, sys, s, max_len).ok();
    Ok(MixingReport {
        s,
        max_len,
        gap,
        psi_hat: psi.0,
        argmax_i: psi.1,
        argmax_j: psi.2,
        level,
        pad,
        psi_unpadded,
        kappa: None,
        c0_estimate,
        note: "finite-level statistic under a level-normalized proxy measure; evidence for the limit, not the limit"
            .to_string(),
    })
}

/// `sup |Σ_K ŵ(IKJ) / (ŵ(I) ŵ(J)) − 1|` with each word weighted at its own level.
fn psi_unpadded(ctx: &Context, sys: &GeneratorSystem, s: f64, max_len: usize, gap: usize) -> Result<f64> {
    let ell = sys.ell();
    let weights: Vec<CylinderWeights> =
        (1..=2 * max_len + gap).map(|n| cylinder_weights(ctx, sys, s, n)).collect::<Result<_>>()?;
    let mut sup = 0.0f64;
    for a in 1..=max_len {
        for b in 1..=max_len {
            let joint = &weights[a + gap + b - 1].weights;
            let (wa, wb) = (&weights[a - 1].weights, &weights[b - 1].weights);
            let (nk, nj) = (ell.pow(gap as u32), ell.pow(b as u32));
            for i in 0..wa.len() {
                for j in 0..nj {
                    let m: f64 = (0..nk).map(|k| joint[(i * nk + k) * nj + j]).sum();
                    sup = sup.max((m / (wa[i] * wb[j]) - 1.0).abs());
                }
            }
        }
    }
    Ok(sup)
}

fn c0_estimate(ctx: &Context, sys: &GeneratorSystem, s: f64, max_len: usize) -> Result<f64> {
    let spec = PotentialSpec::norm(s);
    let b = PressureEngine::new(ctx, sys, max_len, None)?.bracket(&spec)?;
    let p_hat = if b.lower_valid { 0.5 * (b.lower + b.upper) } else { b.upper };
    let mut worst = 0.0f64;
    for m in 1..=max_len {
        let log_z = PressureEngine::new(ctx, sys, m, None)?.log_partition(&spec)?;
        worst = worst.max((log_z - m as f64 * p_hat).abs());
    }
    Ok(worst.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn scalar_weights() {
        let ctx = Context::default();
        let w = cylinder_weights(&ctx, &fixtures::e5(), 1.0, 2).unwrap();
        let expect = [4.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0];
        for (a, b) in w.weights.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn scalar_system_mixes_exactly() {
        let ctx = Context::default();
        let r = psi_mixing_stat(&ctx, &fixtures::e5(), 1.0, 2, 3).unwrap();
        assert!(r.psi_hat < 1e-12 && r.psi_unpadded < 1e-12, "{r:?}");
        let r = psi_mixing_stat(&ctx, &fixtures::e3(), 0.0, 2, 1).unwrap();
        assert!(r.psi_hat < 1e-12);
    }

    #[test]
    fn kappa_without_gamma() {
        let ctx = Context::default();
        let r = kappa_floor(&ctx, &fixtures::e1(), 1.0, 1, 4).unwrap();
        assert!(r.no_certificate && r.value.is_none());
        let r = kappa_floor(&ctx, &fixtures::e5(), 1.0, 1, 3).unwrap();
        assert!(r.no_certificate && (r.raw_min - 0.6).abs() < 1e-12, "{r:?}");
    }

    #[test]
    fn kappa_e3() {
        let r = kappa_floor(&Context::default(), &fixtures::e3(), 1.0, 1, 5).unwrap();
        assert!(r.passed(), "{r:?}");
    }
}
