//! Minimization over the unit sphere: multistart projected gradient descent and a
//! Lipschitz branch-and-bound over the faces of the cube.
//!
//! Objectives here are even (`f(u) = f(−u)`), so only the `d` faces with a
//! coordinate equal to `+1` are covered.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::linalg::{dot, normalize};

pub fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        if normalize(&mut v) > 1e-8 {
            return v;
        }
    }
}

/// Projected gradient descent with Armijo backtracking from `start`.
///
/// `fg` returns the objective and its Euclidean gradient at a unit vector.
pub fn descend<F>(fg: &F, start: Vec<f64>, iters: usize) -> (f64, Vec<f64>)
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    let mut u = start;
    let (mut f, mut g) = fg(&u);
    let mut step = 1.0;
    for _ in 0..iters {
        let gu = dot(&g, &u);
        let tang: Vec<f64> = g.iter().zip(&u).map(|(gi, ui)| gi - gu * ui).collect();
        let gn2 = dot(&tang, &tang);
        if gn2 <= 1e-30 * (1.0 + f.abs()) {
            break;
        }
        let mut accepted = false;
        while step > 1e-14 {
            let mut cand: Vec<f64> = u.iter().zip(&tang).map(|(ui, ti)| ui - step * ti).collect();
            normalize(&mut cand);
            let (fc, gc) = fg(&cand);
            if fc <= f - 1e-4 * step * gn2 {
                u = cand;
                f = fc;
                g = gc;
                step *= 2.0;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    (f, u)
}

/// One cell of a cube face: coordinates `axis` fixed to 1, the rest in `center ± half`.
#[derive(Clone, Debug)]
struct Cell {
    axis: usize,
    center: Vec<f64>,
    half: f64,
}

impl Cell {
    fn point(&self) -> Vec<f64> {
        let mut x = Vec::with_capacity(self.center.len() + 1);
        x.extend_from_slice(&self.center[..self.axis]);
        x.push(1.0);
        x.extend_from_slice(&self.center[self.axis..]);
        normalize(&mut x);
        x
    }

    /// Bound on the distance from the projected center to any projected point.
    fn radius(&self) -> f64 {
        self.half * (self.center.len() as f64).sqrt()
    }

    fn split(&self) -> Vec<Cell> {
        let m = self.center.len();
        let h = 0.5 * self.half;
        (0..1usize << m)
            .map(|mask| {
                let center =
                    (0..m).map(|i| self.center[i] + if mask >> i & 1 == 1 { h } else { -h }).collect();
                Cell { axis: self.axis, center, half: h }
            })
            .collect()
    }
}

struct Queued {
    lb: f64,
    seq: usize,
    cell: Cell,
}

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Queued {}
impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Queued {
    // Max-heap on −lb, then lowest sequence number first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.lb.total_cmp(&self.lb).then_with(|| other.seq.cmp(&self.seq))
    }
}

#[derive(Clone, Debug)]
pub struct BnbResult {
    /// Certified lower bound on `min f` over the sphere.
    pub lower: f64,
    /// Best value seen.
    pub upper: f64,
    pub argmin: Vec<f64>,
    pub cells: usize,
    /// Whether the stopping rule was met before the cell budget ran out.
    pub complete: bool,
}

/// Stopping rule for [`sphere_bnb`].
#[derive(Clone, Copy, Debug)]
pub struct BnbStop {
    /// Stop once `upper − lower ≤ rel_gap·upper`.
    pub rel_gap: f64,
    /// Stop once the lower bound exceeds this value.
    pub certify_above: f64,
    /// Stop once a value at or below this is seen.
    pub refute_below: f64,
    pub max_cells: usize,
}

/// Branch and bound for `min_{|u|=1} f(u)` with `f` even and `lipschitz`-Lipschitz on the sphere.
pub fn sphere_bnb<F>(d: usize, f: &F, lipschitz: f64, initial_splits: usize, stop: BnbStop) -> BnbResult
where
    F: Fn(&[f64]) -> f64,
{
    let m = d - 1;
    let mut heap = BinaryHeap::new();
    let mut seq = 0usize;
    let mut best = (f64::INFINITY, vec![0.0; d]);
    let n0 = initial_splits.max(1);
    let half = 1.0 / n0 as f64;
    let push = |cell: Cell, heap: &mut BinaryHeap<Queued>, best: &mut (f64, Vec<f64>), seq: &mut usize| {
        let p = cell.point();
        let value = f(&p);
        if value < best.0 {
            *best = (value, p);
        }
        let lb = value - lipschitz * cell.radius();
        heap.push(Queued { lb, seq: *seq, cell });
        *seq += 1;
    };
    for axis in 0..d {
        let count = n0.pow(m as u32);
        for idx in 0..count {
            let mut rem = idx;
            let center = (0..m)
                .map(|_| {
                    let k = rem % n0;
                    rem /= n0;
                    -1.0 + half * (2 * k + 1) as f64
                })
                .collect();
            push(Cell { axis, center, half }, &mut heap, &mut best, &mut seq);
        }
    }
    let mut complete = false;
    let mut cells = seq;
    while let Some(top) = heap.peek() {
        let lower = top.lb.min(best.0);
        if best.0 - lower <= stop.rel_gap * best.0.abs()
            || lower > stop.certify_above
            || best.0 <= stop.refute_below
        {
            complete = true;
            break;
        }
        if cells >= stop.max_cells || m == 0 {
            break;
        }
        let q = heap.pop().unwrap();
        for child in q.cell.split() {
            push(child, &mut heap, &mut best, &mut seq);
            cells += 1;
        }
    }
    if heap.is_empty() {
        complete = true;
    }
    let lower = heap.peek().map(|q| q.lb).unwrap_or(best.0).min(best.0);
    BnbResult { lower, upper: best.0, argmin: best.1, cells, complete }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn bnb_brackets_known_minimum() {
        // f(u) = uᵀ diag(3, 2, 0.5) u has minimum 0.5 at ±e₃; Lipschitz ≤ 2·3.
        let f = |u: &[f64]| 3.0 * u[0] * u[0] + 2.0 * u[1] * u[1] + 0.5 * u[2] * u[2];
        let stop = BnbStop { rel_gap: 1e-3, certify_above: f64::INFINITY, refute_below: -1.0, max_cells: 2_000_000 };
        let r = sphere_bnb(3, &f, 6.0, 4, stop);
        assert!(r.complete);
        assert!(r.lower <= 0.5 + 1e-12 && r.lower >= 0.5 * (1.0 - 2e-3));
        assert!((r.upper - 0.5).abs() < 1e-3);
    }

    #[test]
    fn descent_finds_minimum() {
        let fg = |u: &[f64]| {
            let f = 3.0 * u[0] * u[0] + 2.0 * u[1] * u[1] + 0.5 * u[2] * u[2];
            (f, vec![6.0 * u[0], 4.0 * u[1], 1.0 * u[2]])
        };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let (f, u) = descend(&fg, random_unit(&mut rng, 3), 500);
        assert!((f - 0.5).abs() < 1e-10, "{f}");
        assert!((u[2].abs() - 1.0).abs() < 1e-5);
    }
}
