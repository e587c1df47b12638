//! Plain-array reference arithmetic for 2×2 systems, kept independent of the library's
//! scaled products so tests compare two separate code paths.

#![allow(dead_code)]

use qmcocycle::linalg::Matrix;
use qmcocycle::GeneratorSystem;
use rand::Rng;

pub type M2 = [f64; 4];

pub fn mul(a: &M2, b: &M2) -> M2 {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

/// `A_{i_n} ⋯ A_{i_1}` for 1-based symbols.
pub fn word_product(gens: &[M2], word: &[usize]) -> M2 {
    let mut p = [1.0, 0.0, 0.0, 1.0];
    for &i in word {
        p = mul(&gens[i - 1], &p);
    }
    p
}

/// Singular values from the eigenvalues of `AᵀA`.
pub fn sv(a: &M2) -> (f64, f64) {
    let t = a.iter().map(|x| x * x).sum::<f64>();
    let det = (a[0] * a[3] - a[1] * a[2]).abs();
    let disc = (t * t - 4.0 * det * det).max(0.0).sqrt();
    let s1 = ((t + disc) / 2.0).sqrt();
    (s1, if s1 > 0.0 { det / s1 } else { 0.0 })
}

pub fn norm(a: &M2) -> f64 {
    sv(a).0
}

pub fn phi(a: &M2, s: f64) -> f64 {
    let (s1, s2) = sv(a);
    if s <= 1.0 {
        s1.powf(s)
    } else if s <= 2.0 {
        s1 * s2.powf(s - 1.0)
    } else {
        (s1 * s2).powf(s / 2.0)
    }
}

pub fn raw(sys: &GeneratorSystem) -> Vec<M2> {
    sys.generators().iter().map(|g| [g.get(0, 0), g.get(0, 1), g.get(1, 0), g.get(1, 1)]).collect()
}

/// All words of length `n` over `1..=ell` in lexicographic order.
pub fn words(ell: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w| {
                (1..=ell).map(move |i| {
                    let mut v = w.clone();
                    v.push(i);
                    v
                })
            })
            .collect();
    }
    out
}

/// `(1/n) log Σ_{|I|=n} φˢ(𝒜_I)` by direct summation.
pub fn upper_pressure(gens: &[M2], s: f64, n: usize) -> f64 {
    let z: f64 = words(gens.len(), n).iter().map(|w| phi(&word_product(gens, w), s)).sum();
    z.ln() / n as f64
}

/// Random 2×2 system with entries in `[-1, 1]` and `|det| ≥ 0.05` per generator.
pub fn random_system<R: Rng>(rng: &mut R, ell: usize) -> GeneratorSystem {
    let gens = (0..ell)
        .map(|_| loop {
            let m: Vec<f64> = (0..4).map(|_| (rng.random_range(-1.0..1.0f64) * 100.0).round() / 100.0).collect();
            if (m[0] * m[3] - m[1] * m[2]).abs() >= 0.05 {
                break Matrix::new(2, m).unwrap();
            }
        })
        .collect();
    GeneratorSystem::new(gens).unwrap()
}

/// Random `d×d` matrix with entries in `[-2, 2]`.
pub fn random_matrix<R: Rng>(rng: &mut R, d: usize) -> Matrix {
    Matrix::new(d, (0..d * d).map(|_| rng.random_range(-2.0..2.0)).collect()).unwrap()
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
