//! Quasi-multiplicativity constants.
//!
//! For unit `u = v_{𝒜_I,2}` and `w = v_{𝒜_J,1}` the singular decomposition gives
//! `‖𝒜_{IKJ}‖ ≥ |wᵀ 𝒜_K u| · ‖𝒜_I‖ ‖𝒜_J‖`, so
//! `γ_k = min_{u,w} max_{|K|=k} |wᵀ 𝒜_K u|` is a lower bound for the best connector
//! ratio over all pairs `(I, J)`.

use std::collections::BinaryHeap;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::context::Context;
use crate::error::{Error, Result};
use crate::linalg::{dot, Matrix};
use crate::optim;
use crate::system::GeneratorSystem;
use crate::wordspace::{product_table, ScaledProduct, Word};

/// Angles per circle in the certified plane grid.
pub const GRID: usize = 2000;
const REFINE_MAX_CELLS: usize = 2_000_000;
const MULTISTARTS: usize = 128;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gamma {
    pub k: usize,
    /// Lower bound when `certified`, otherwise the best value found by local search.
    pub gamma: f64,
    /// Smallest objective value actually evaluated (an upper bound on the minimum).
    pub upper: f64,
    pub certified: bool,
    /// Lipschitz constant used per angle, `max_K ‖𝒜_K‖`.
    pub lipschitz: f64,
    pub u: Vec<f64>,
    pub w: Vec<f64>,
}

fn connector_matrices(ctx: &Context, sys: &GeneratorSystem, k: usize) -> Result<Vec<Matrix>> {
    Ok(product_table(ctx, sys.generators(), k)?.iter().map(ScaledProduct::matrix).collect())
}

/// `min_{|u|=|w|=1} max_{|K|=k} |wᵀ 𝒜_K u|`.
///
/// In the plane this is certified: a 2000×2000 angle grid with a Lipschitz bound, then
/// branch and bound on the cells that could still hold a smaller value. In higher
/// dimension it is a multistart local search and is not certified.
pub fn gamma_minimax(ctx: &Context, sys: &GeneratorSystem, k: usize) -> Result<Gamma> {
    let ks = connector_matrices(ctx, sys, k)?;
    if sys.dim() == 2 {
        Ok(gamma_plane(ctx, &ks, k))
    } else {
        Ok(gamma_search(ctx, &ks, k))
    }
}

fn objective(ks: &[Matrix], u: &[f64], w: &[f64]) -> f64 {
    ks.iter().map(|a| dot(w, &a.apply(u)).abs()).fold(0.0, f64::max)
}

fn gamma_plane(ctx: &Context, ks: &[Matrix], k: usize) -> Gamma {
    let lip = ks.iter().map(Matrix::norm).fold(0.0, f64::max);
    let h = PI / GRID as f64;
    let angle = |i: usize| (i as f64 + 0.5) * h;
    // Row θ: values max_K |w(φ)ᵀ 𝒜_K u(θ)| for all φ.
    let rows: Vec<(f64, usize, Vec<f64>)> = ctx.install(|| {
        (0..GRID)
            .into_par_iter()
            .map(|i| {
                let t = angle(i);
                let u = [t.cos(), t.sin()];
                let images: Vec<[f64; 2]> = ks
                    .iter()
                    .map(|a| {
                        let d = a.data();
                        [d[0] * u[0] + d[1] * u[1], d[2] * u[0] + d[3] * u[1]]
                    })
                    .collect();
                let vals: Vec<f64> = (0..GRID)
                    .map(|j| {
                        let p = angle(j);
                        let (c, s) = (p.cos(), p.sin());
                        images.iter().map(|v| (c * v[0] + s * v[1]).abs()).fold(0.0, f64::max)
                    })
                    .collect();
                let (jmin, vmin) = vals
                    .iter()
                    .enumerate()
                    .fold((0, f64::INFINITY), |acc, (j, &v)| if v < acc.1 { (j, v) } else { acc });
                (vmin, jmin, vals)
            })
            .collect()
    });
    let mut best = (f64::INFINITY, 0.0, 0.0);
    for (i, (v, j, _)) in rows.iter().enumerate() {
        if *v < best.0 {
            best = (*v, angle(i), angle(*j));
        }
    }
    let grid_min = best.0;
    let f = |t: f64, p: f64| {
        let u = [t.cos(), t.sin()];
        let w = [p.cos(), p.sin()];
        objective(ks, &u, &w)
    };
    // Cells whose bound falls below the grid minimum go into the refinement queue.
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    for (i, (_, _, vals)) in rows.iter().enumerate() {
        for (j, &v) in vals.iter().enumerate() {
            let lb = v - lip * h;
            if lb < grid_min {
                heap.push(Cell { lb, seq, t: angle(i), p: angle(j), half: 0.5 * h });
                seq += 1;
            }
        }
    }
    drop(rows);
    let mut cells = 0usize;
    while let Some(top) = heap.peek() {
        if best.0 - top.lb <= 1e-12 + 1e-10 * best.0 || cells >= REFINE_MAX_CELLS {
            break;
        }
        let c = heap.pop().unwrap();
        let q = 0.5 * c.half;
        for (dt, dp) in [(-q, -q), (-q, q), (q, -q), (q, q)] {
            let (t, p) = (c.t + dt, c.p + dp);
            let v = f(t, p);
            if v < best.0 {
                best = (v, t, p);
            }
            let lb = v - lip * 2.0 * q;
            if lb < best.0 {
                heap.push(Cell { lb, seq, t, p, half: q });
                seq += 1;
            }
            cells += 1;
        }
    }
    let lower = heap.peek().map(|c| c.lb).unwrap_or(best.0).min(best.0);
    Gamma {
        k,
        gamma: lower.max(0.0),
        upper: best.0,
        certified: true,
        lipschitz: lip,
        u: vec![best.1.cos(), best.1.sin()],
        w: vec![best.2.cos(), best.2.sin()],
    }
}

struct Cell {
    lb: f64,
    seq: usize,
    t: f64,
    p: f64,
    half: f64,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == std::cmp::Ordering::Equal
    }
}
impl Eq for Cell {}
impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Cell {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        other.lb.total_cmp(&self.lb).then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Smooth surrogate `(Σ_K |wᵀ𝒜_K u|^p)^{1/p}` minimized by alternating descent in `u` and `w`.
fn gamma_search(ctx: &Context, ks: &[Matrix], k: usize) -> Gamma {
    let d = ks[0].dim();
    let lip = ks.iter().map(Matrix::norm).fold(0.0, f64::max);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
    let starts: Vec<(Vec<f64>, Vec<f64>)> =
        (0..MULTISTARTS).map(|_| (optim::random_unit(&mut rng, d), optim::random_unit(&mut rng, d))).collect();
    const P: f64 = 16.0;
    let surrogate = |u: &[f64], w: &[f64], wrt_u: bool| {
        let vals: Vec<f64> = ks.iter().map(|a| dot(w, &a.apply(u))).collect();
        let m = vals.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
        let s: f64 = vals.iter().map(|v| (v.abs() / m).powf(P)).sum();
        let f = m * s.powf(1.0 / P);
        let mut g = vec![0.0; d];
        for (a, v) in ks.iter().zip(&vals) {
            let c = (v.abs() / m).powf(P - 1.0) * v.signum() * s.powf(1.0 / P - 1.0);
            let dir = if wrt_u { a.apply_transpose(w) } else { a.apply(u) };
            crate::linalg::axpy(c, &dir, &mut g);
        }
        (f, g)
    };
    let runs: Vec<(f64, Vec<f64>, Vec<f64>)> = ctx.install(|| {
        starts
            .into_par_iter()
            .map(|(mut u, mut w)| {
                for _ in 0..20 {
                    u = optim::descend(&|x: &[f64]| surrogate(x, &w, true), u.clone(), 50).1;
                    w = optim::descend(&|x: &[f64]| surrogate(&u, x, false), w.clone(), 50).1;
                }
                (objective(ks, &u, &w), u, w)
            })
            .collect()
    });
    let (v, u, w) = runs
        .into_iter()
        .fold((f64::INFINITY, Vec::new(), Vec::new()), |acc, r| if r.0 < acc.0 { r } else { acc });
    Gamma { k, gamma: v, upper: v, certified: false, lipschitz: lip, u, w }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalEntry {
    pub n: usize,
    /// `min_{|I|=|J|=n} max_K ‖𝒜_{IKJ}‖/(‖𝒜_I‖‖𝒜_J‖)`.
    pub min_ratio: f64,
    pub argmin_i: Word,
    pub argmin_j: Word,
    pub argmax_k: Word,
    /// Same minimum over all `I, J` with `1 ≤ |I|, |J| ≤ n`.
    pub min_ratio_up_to: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QmReport {
    pub k: usize,
    pub gamma: Gamma,
    pub empirical: Vec<EmpiricalEntry>,
}

#[derive(Clone, Debug)]
struct PairBest {
    ratio: f64,
    i: usize,
    j: usize,
    k: usize,
}

/// Best-connector ratio for every pair of word lengths `(a, b)` with `1 ≤ a, b ≤ n_max`.
fn pair_minimum(
    ctx: &Context,
    left: &[ScaledProduct],
    right: &[ScaledProduct],
    ks: &[Matrix],
) -> PairBest {
    let norms_l: Vec<f64> = left.iter().map(|p| p.unit.norm()).collect();
    let norms_r: Vec<f64> = right.iter().map(|p| p.unit.norm()).collect();
    let per_i: Vec<PairBest> = ctx.install(|| {
        (0..left.len())
            .into_par_iter()
            .map(|i| {
                let kl: Vec<Matrix> = ks.iter().map(|k| k.matmul(&left[i].unit)).collect();
                let mut best = PairBest { ratio: f64::INFINITY, i, j: 0, k: 0 };
                for (j, r) in right.iter().enumerate() {
                    let mut top = (f64::NEG_INFINITY, 0);
                    for (kk, m) in kl.iter().enumerate() {
                        let v = r.unit.matmul(m).norm();
                        if v > top.0 {
                            top = (v, kk);
                        }
                    }
                    let ratio = top.0 / (norms_l[i] * norms_r[j]);
                    if ratio < best.ratio {
                        best = PairBest { ratio, i, j, k: top.1 };
                    }
                }
                best
            })
            .collect()
    });
    per_i.into_iter().fold(PairBest { ratio: f64::INFINITY, i: 0, j: 0, k: 0 }, |a, b| {
        if b.ratio < a.ratio {
            b
        } else {
            a
        }
    })
}

/// Exhaustive connector ratios for `|I| = |J| = n ≤ n_max`, plus the mixed-length minimum.
pub fn empirical_qm(ctx: &Context, sys: &GeneratorSystem, k: usize, n_max: usize) -> Result<QmReport> {
    if n_max == 0 {
        return Err(Error::input("n_max must be at least 1"));
    }
    let ell = sys.ell() as f64;
    let work: f64 = (1..=n_max).flat_map(|a| (1..=n_max).map(move |b| ell.powi((a + b + k) as i32))).sum();
    ctx.check_budget("connector ratio triples", work)?;
    let gamma = gamma_minimax(ctx, sys, k)?;
    let ks = connector_matrices(ctx, sys, k)?;
    let tables: Vec<Vec<ScaledProduct>> =
        (1..=n_max).map(|n| product_table(ctx, sys.generators(), n)).collect::<Result<_>>()?;
    let mut grid = vec![vec![None; n_max]; n_max];
    for a in 0..n_max {
        for b in 0..n_max {
            grid[a][b] = Some(pair_minimum(ctx, &tables[a], &tables[b], &ks));
        }
    }
    let ell = sys.ell();
    let mut empirical = Vec::new();
    let mut up_to = f64::INFINITY;
    for n in 1..=n_max {
        for a in 0..n {
            for b in 0..n {
                if a == n - 1 || b == n - 1 {
                    up_to = up_to.min(grid[a][b].as_ref().unwrap().ratio);
                }
            }
        }
        let p = grid[n - 1][n - 1].as_ref().unwrap();
        empirical.push(EmpiricalEntry {
            n,
            min_ratio: p.ratio,
            argmin_i: Word::from_index(p.i, ell, n),
            argmin_j: Word::from_index(p.j, ell, n),
            argmax_k: Word::from_index(p.k, ell, k),
            min_ratio_up_to: up_to,
        });
    }
    Ok(QmReport { k, gamma, empirical })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhiConstant {
    pub s: f64,
    pub value: f64,
    /// True when `γ = 0` left nothing to work with (`s > 0`).
    pub no_lower_bound: bool,
    pub gamma: f64,
    /// `min_{|K|=k} |det 𝒜_K|`.
    pub min_det: f64,
}

/// The constant `C(s)` in `φˢ(𝒜_{IKJ}) ≥ C(s) φˢ(𝒜_I) φˢ(𝒜_J)` for the best connector `K`.
///
/// `γˢ` on `[0, 1]`, `(min_K |det 𝒜_K|)^{s−1} γ^{2−s}` on `(1, 2]`, and `(min_K |det 𝒜_K|)^{s/2}`
/// beyond 2, where the potential is a determinant power.
pub fn qm_constant_phi(ctx: &Context, sys: &GeneratorSystem, k: usize, s: f64, gamma: f64) -> Result<PhiConstant> {
    if sys.dim() != 2 {
        return Err(Error::input("the singular value constant needs d = 2"));
    }
    if !(s >= 0.0 && s.is_finite()) {
        return Err(Error::input(format!("s must be finite and nonnegative, got {s}")));
    }
    let min_det = product_table(ctx, sys.generators(), k)?
        .iter()
        .map(|p| p.log_abs_det().exp())
        .fold(f64::INFINITY, f64::min);
    Ok(phi_constant(s, gamma, min_det))
}

pub fn phi_constant(s: f64, gamma: f64, min_det: f64) -> PhiConstant {
    let value = if s <= 1.0 {
        gamma.powf(s)
    } else if s <= 2.0 {
        min_det.powf(s - 1.0) * gamma.powf(2.0 - s)
    } else {
        min_det.powf(s / 2.0)
    };
    PhiConstant { s, value, no_lower_bound: value == 0.0 && s > 0.0, gamma, min_det }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn e1_gamma_is_zero() {
        let g = gamma_minimax(&Context::default(), &fixtures::e1(), 1).unwrap();
        assert!(g.certified);
        assert!(g.gamma == 0.0 && g.upper < 1e-6, "{g:?}");
    }

    #[test]
    fn e5_ratios() {
        let r = empirical_qm(&Context::default(), &fixtures::e5(), 1, 3).unwrap();
        for e in &r.empirical {
            assert!((e.min_ratio - 0.4).abs() < 1e-14, "{e:?}");
        }
    }

    #[test]
    fn phi_constant_pieces() {
        assert_eq!(phi_constant(0.0, 0.0, 0.5).value, 1.0);
        assert!(phi_constant(0.3, 0.0, 0.5).no_lower_bound);
        let c = phi_constant(1.5, 0.25, 0.04);
        assert!((c.value - 0.2 * 0.5).abs() < 1e-15);
        let left = phi_constant(1.0, 0.3, 0.04).value;
        let right = phi_constant(1.0 + 1e-13, 0.3, 0.04).value;
        assert!((left - right).abs() < 1e-12);
    }
}
