//! Small dense linear algebra for cocycle generators.
//!
//! Matrices are square and row-major. Dimensions of the user-facing systems
//! are 2..=8, but exterior powers of those reach C(8,4) = 70, so nothing here
//! hard-codes a size. Singular values of 2×2 matrices use a closed form; the
//! general case goes through `nalgebra`.

pub mod exact;
pub mod forms;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Relative determinant threshold used to tag a matrix invertible.
pub const TAU_DET: f64 = 1e-12;

/// Default relative rank tolerance for spans.
pub const SPAN_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Matrix {
    dim: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("matrix dimension must be at least 1"));
        }
        if data.len() != dim * dim {
            return Err(Error::input(format!(
                "expected {} entries for a {dim}x{dim} matrix, got {}",
                dim * dim,
                data.len()
            )));
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::input("matrix entries must be finite"));
        }
        Ok(Matrix { dim, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(Error::input("matrix rows must form a square array"));
        }
        Matrix::new(dim, rows.concat())
    }

    pub(crate) fn from_vec_unchecked(dim: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), dim * dim);
        Matrix { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn zeros(dim: usize) -> Self {
        Matrix { dim, data: vec![0.0; dim * dim] }
    }

    pub fn scalar(dim: usize, c: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = c;
        }
        m
    }

    pub fn diag(entries: &[f64]) -> Self {
        let dim = entries.len();
        let mut m = Self::zeros(dim);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * dim + i] = e;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    /// Row-major entries; also the coordinates of the matrix as a vector in ℝ^{d²}.
    #[inline]
    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// `self · rhs`.
    pub fn matmul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch in matmul");
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                let row = &rhs.data[k * d..(k + 1) * d];
                let o = &mut out[i * d..(i + 1) * d];
                for (oj, bj) in o.iter_mut().zip(row) {
                    *oj += a * bj;
                }
            }
        }
        Matrix { dim: d, data: out }
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim);
        self.data.chunks(self.dim).map(|row| dot(row, v)).collect()
    }

    /// `vᵀ · self`, i.e. `selfᵀ v`.
    pub fn apply_transpose(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d];
        for (i, &vi) in v.iter().enumerate() {
            for j in 0..d {
                out[j] += vi * self.data[i * d + j];
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..d {
                out[j * d + i] = self.data[i * d + j];
            }
        }
        Matrix { dim: d, data: out }
    }

    pub fn scale(&self, c: f64) -> Matrix {
        Matrix { dim: self.dim, data: self.data.iter().map(|x| x * c).collect() }
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        Matrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm(&self.data)
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Determinant by LU with partial pivoting.
    pub fn det(&self) -> f64 {
        let d = self.dim;
        match d {
            1 => return self.data[0],
            2 => return self.data[0] * self.data[3] - self.data[1] * self.data[2],
            _ => {}
        }
        let mut a = self.data.clone();
        let mut det = 1.0;
        for col in 0..d {
            let (piv, pval) = (col..d)
                .map(|r| (r, a[r * d + col].abs()))
                .fold((col, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pval == 0.0 {
                return 0.0;
            }
            if piv != col {
                for j in 0..d {
                    a.swap(piv * d + j, col * d + j);
                }
                det = -det;
            }
            let p = a[col * d + col];
            det *= p;
            for r in col + 1..d {
                let f = a[r * d + col] / p;
                if f != 0.0 {
                    for j in col..d {
                        a[r * d + j] -= f * a[col * d + j];
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Matrix> {
        if self.dim == 2 {
            let det = self.det();
            if det == 0.0 {
                return None;
            }
            let [a, b, c, d] = [self.data[0], self.data[1], self.data[2], self.data[3]];
            return Some(Matrix { dim: 2, data: vec![d / det, -b / det, -c / det, a / det] });
        }
        self.to_na().try_inverse().map(|m| Matrix::from_na(&m))
    }

    /// Singular values in descending order.
    pub fn singular_values(&self) -> Vec<f64> {
        match self.dim {
            1 => vec![self.data[0].abs()],
            2 => {
                let (s1, s2) = singular_values_2x2(&self.data);
                vec![s1, s2]
            }
            _ => {
                let mut sv: Vec<f64> = self.to_na().singular_values().iter().copied().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                sv
            }
        }
    }

    /// Operator (spectral) norm.
    pub fn norm(&self) -> f64 {
        self.singular_values()[0]
    }

    /// Smallest singular value, i.e. `‖A⁻¹‖⁻¹` for invertible `A`.
    pub fn min_singular_value(&self) -> f64 {
        *self.singular_values().last().unwrap()
    }

    pub fn is_invertible(&self) -> bool {
        let s1 = self.norm();
        s1 > 0.0 && self.det().abs() > TAU_DET * s1.powi(self.dim as i32)
    }

    /// Full SVD `A = U Σ Vᵀ` with singular values sorted descending.
    pub fn svd(&self) -> Svd {
        let d = self.dim;
        let svd = self.to_na().svd(true, true);
        let u = svd.u.expect("u requested");
        let vt = svd.v_t.expect("v requested");
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
        let sigma = order.iter().map(|&i| svd.singular_values[i]).collect();
        let left = order.iter().map(|&i| u.column(i).iter().copied().collect()).collect();
        let right = order.iter().map(|&i| vt.row(i).iter().copied().collect()).collect();
        Svd { sigma, left, right }
    }

    pub fn to_na(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.dim, self.dim, &self.data)
    }

    pub fn from_na(m: &DMatrix<f64>) -> Matrix {
        assert_eq!(m.nrows(), m.ncols());
        let d = m.nrows();
        let mut data = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                data.push(m[(i, j)]);
            }
        }
        Matrix { dim: d, data }
    }

    /// Max relative entrywise difference, scaled by the larger Frobenius norm.
    pub fn relative_distance(&self, other: &Matrix) -> f64 {
        let scale = self.frobenius_norm().max(other.frobenius_norm()).max(f64::MIN_POSITIVE);
        self.sub(other).frobenius_norm() / scale
    }
}

impl std::ops::Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        self.matmul(rhs)
    }
}

/// Singular decomposition with columns of U (`left`) and V (`right`) as vectors.
#[derive(Clone, Debug)]
pub struct Svd {
    pub sigma: Vec<f64>,
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
}

/// Closed-form singular values of a row-major 2×2 matrix, descending.
#[inline]
pub fn singular_values_2x2(m: &[f64]) -> (f64, f64) {
    let (a, b, c, d) = (m[0], m[1], m[2], m[3]);
    let e = 0.5 * (a + d);
    let f = 0.5 * (a - d);
    let g = 0.5 * (c + b);
    let h = 0.5 * (c - b);
    let q = e.hypot(h);
    let r = f.hypot(g);
    (q + r, (q - r).abs())
}

/// The top singular direction of `A` and its image direction.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalPair {
    pub v1: Vec<f64>,
    pub v2: Vec<f64>,
    pub sigma: Vec<f64>,
}

/// Top right-singular unit vector `v1`, the unit vector `v2` along `A v1`, and the singular values.
///
/// When the top singular value is repeated, `v1` is the normalised projection of the first
/// standard basis vector that has a nonzero projection onto the top singular space. The sign is
/// fixed so the first nonzero coordinate of `v1` is positive.
pub fn principal_pair(a: &Matrix) -> Result<PrincipalPair> {
    if !a.is_invertible() {
        return Err(Error::input("principal_pair requires an invertible matrix"));
    }
    let d = a.dim();
    let svd = a.svd();
    let s1 = svd.sigma[0];
    let top: Vec<&Vec<f64>> = svd
        .sigma
        .iter()
        .zip(&svd.right)
        .filter(|(s, _)| **s >= s1 * (1.0 - 1e-12))
        .map(|(_, v)| v)
        .collect();
    let mut v1 = if top.len() == 1 {
        top[0].clone()
    } else {
        let mut chosen = None;
        for j in 0..d {
            let mut p = vec![0.0; d];
            for q in &top {
                axpy(q[j], q, &mut p);
            }
            if norm(&p) > 1e-8 {
                chosen = Some(p);
                break;
            }
        }
        chosen.expect("top singular space is nonzero")
    };
    normalize(&mut v1);
    canonical_sign(&mut v1);
    let mut v2 = a.apply(&v1);
    normalize(&mut v2);
    Ok(PrincipalPair { v1, v2, sigma: svd.sigma })
}

/// Flip `v` so its first coordinate above 1e-14·‖v‖ in magnitude is positive.
pub fn canonical_sign(v: &mut [f64]) {
    let thr = 1e-14 * norm(v);
    if let Some(x) = v.iter().find(|x| x.abs() > thr) {
        if *x < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn normalize(v: &mut [f64]) -> f64 {
    let n = norm(v);
    if n > 0.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
    n
}

pub fn unit_vector(dim: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; dim];
    e[i] = 1.0;
    e
}

/// All `m`-element subsets of `0..n` in lexicographic order.
pub fn combinations(n: usize, m: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if m > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        out.push(idx.clone());
        let mut i = m;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - m {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in i + 1..m {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

pub fn binomial(n: usize, m: usize) -> usize {
    if m > n {
        return 0;
    }
    let m = m.min(n - m);
    (0..m).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Compound matrix of `m×m` minors for any `0 ≤ m ≤ d`, lexicographic index sets.
pub(crate) fn compound(a: &Matrix, m: usize) -> Matrix {
    let d = a.dim();
    let sets = combinations(d, m);
    let n = sets.len();
    let mut out = vec![0.0; n * n];
    let mut sub = vec![0.0; m * m];
    for (r, rows) in sets.iter().enumerate() {
        for (c, cols) in sets.iter().enumerate() {
            for (i, &ri) in rows.iter().enumerate() {
                for (j, &cj) in cols.iter().enumerate() {
                    sub[i * m + j] = a.get(ri, cj);
                }
            }
            out[r * n + c] =
                if m == 0 { 1.0 } else { Matrix::from_vec_unchecked(m, sub.clone()).det() };
        }
    }
    Matrix::from_vec_unchecked(n, out)
}

/// The `m`-th exterior power of `A` in the basis `e_I = e_{i1}∧…∧e_{im}`, `I` lexicographic.
pub fn wedge_power(a: &Matrix, m: usize) -> Result<Matrix> {
    let d = a.dim();
    if m == 0 || m >= d {
        return Err(Error::input(format!("wedge power m={m} out of range 1..={} for d={d}", d - 1)));
    }
    Ok(compound(a, m))
}

/// Coordinates of `v₁∧…∧v_m` (the columns of `vectors`) in the lexicographic basis.
pub fn wedge_vectors(ambient: usize, vectors: &[Vec<f64>]) -> Vec<f64> {
    let m = vectors.len();
    combinations(ambient, m)
        .iter()
        .map(|rows| {
            if m == 0 {
                return 1.0;
            }
            let mut sub = vec![0.0; m * m];
            for (i, &ri) in rows.iter().enumerate() {
                for (j, v) in vectors.iter().enumerate() {
                    sub[i * m + j] = v[ri];
                }
            }
            Matrix::from_vec_unchecked(m, sub).det()
        })
        .collect()
}

/// An orthonormal basis of a subspace of ℝ^ambient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceBasis {
    pub ambient: usize,
    pub basis: Vec<Vec<f64>>,
}

impl SubspaceBasis {
    pub fn zero(ambient: usize) -> Self {
        SubspaceBasis { ambient, basis: Vec::new() }
    }

    pub fn full(ambient: usize) -> Self {
        SubspaceBasis { ambient, basis: (0..ambient).map(|i| unit_vector(ambient, i)).collect() }
    }

    pub fn line(v: &[f64]) -> Self {
        let mut u = v.to_vec();
        normalize(&mut u);
        canonical_sign(&mut u);
        SubspaceBasis { ambient: v.len(), basis: vec![u] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_proper(&self) -> bool {
        self.dim() > 0 && self.dim() < self.ambient
    }

    pub fn project(&self, v: &[f64]) -> Vec<f64> {
        let mut p = vec![0.0; self.ambient];
        for q in &self.basis {
            axpy(dot(q, v), q, &mut p);
        }
        p
    }

    /// `‖v − P v‖ / ‖v‖` (0 for the zero vector).
    pub fn relative_residual(&self, v: &[f64]) -> f64 {
        let n = norm(v);
        if n == 0.0 {
            return 0.0;
        }
        let p = self.project(v);
        let r: Vec<f64> = v.iter().zip(&p).map(|(a, b)| a - b).collect();
        norm(&r) / n
    }

    /// Sine of the largest principal angle from `self` into `other`
    /// (how far `self` sticks out of `other`); 1.0 when `self` is larger than `other`.
    pub fn containment_gap(&self, other: &SubspaceBasis) -> f64 {
        if self.dim() == 0 {
            return 0.0;
        }
        if self.dim() > other.dim() {
            return 1.0;
        }
        let k = self.dim();
        let d = self.ambient;
        let mut m = DMatrix::<f64>::zeros(d, k);
        for (j, q) in self.basis.iter().enumerate() {
            let p = other.project(q);
            for i in 0..d {
                m[(i, j)] = q[i] - p[i];
            }
        }
        m.singular_values().iter().copied().fold(0.0, f64::max)
    }

    /// Symmetric principal-angle distance; 1.0 for subspaces of different dimension.
    pub fn distance(&self, other: &SubspaceBasis) -> f64 {
        if self.dim() != other.dim() {
            return 1.0;
        }
        self.containment_gap(other).max(other.containment_gap(self))
    }

    /// Span of `A·W`.
    pub fn image(&self, a: &Matrix, tol: f64) -> SubspaceBasis {
        let vs: Vec<Vec<f64>> = self.basis.iter().map(|q| a.apply(q)).collect();
        span_basis_in(self.ambient, &vs, tol)
    }

    /// Span of `self ∪ other`.
    pub fn join(&self, other: &SubspaceBasis, tol: f64) -> SubspaceBasis {
        let vs: Vec<Vec<f64>> = self.basis.iter().chain(&other.basis).cloned().collect();
        span_basis_in(self.ambient, &vs, tol)
    }
}

/// Orthonormal basis of the span of `vectors`; rank counts singular values
/// `≥ tol·σ_max`. Deterministic given the input order.
pub fn span_basis(vectors: &[Vec<f64>], tol: f64) -> SubspaceBasis {
    match vectors.first() {
        None => SubspaceBasis::zero(0),
        Some(v) => span_basis_in(v.len(), vectors, tol),
    }
}

pub(crate) fn span_basis_in(ambient: usize, vectors: &[Vec<f64>], tol: f64) -> SubspaceBasis {
    if vectors.is_empty() || ambient == 0 {
        return SubspaceBasis::zero(ambient);
    }
    let n = vectors.len();
    let mut m = DMatrix::<f64>::zeros(ambient, n);
    for (j, v) in vectors.iter().enumerate() {
        assert_eq!(v.len(), ambient, "span_basis: ambient dimension mismatch");
        for i in 0..ambient {
            m[(i, j)] = v[i];
        }
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("u requested");
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let smax = order.first().map(|&i| svd.singular_values[i]).unwrap_or(0.0);
    if smax == 0.0 {
        return SubspaceBasis::zero(ambient);
    }
    let basis = order
        .iter()
        .filter(|&&i| svd.singular_values[i] >= tol * smax)
        .map(|&i| {
            let mut c: Vec<f64> = u.column(i).iter().copied().collect();
            canonical_sign(&mut c);
            c
        })
        .collect();
    SubspaceBasis { ambient, basis }
}

/// Incremental orthonormal basis with a per-vector relative acceptance test.
#[derive(Clone, Debug)]
pub struct SpanBuilder {
    ambient: usize,
    tol: f64,
    basis: Vec<Vec<f64>>,
}

impl SpanBuilder {
    pub fn new(ambient: usize, tol: f64) -> Self {
        SpanBuilder { ambient, tol, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Residual of `v` after projecting out the current basis (two Gram–Schmidt passes).
    pub fn residual(&self, v: &[f64]) -> Vec<f64> {
        let mut r = v.to_vec();
        for _ in 0..2 {
            for q in &self.basis {
                let c = dot(q, &r);
                axpy(-c, q, &mut r);
            }
        }
        r
    }

    /// Adds `v` if its residual exceeds `tol·‖v‖`; returns whether it was added.
    pub fn try_add(&mut self, v: &[f64]) -> bool {
        if self.is_full() {
            return false;
        }
        let nv = norm(v);
        if nv == 0.0 {
            return false;
        }
        let mut r = self.residual(v);
        let nr = norm(&r);
        if nr > self.tol * nv {
            r.iter_mut().for_each(|x| *x /= nr);
            self.basis.push(r);
            true
        } else {
            false
        }
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    pub fn into_subspace(self) -> SubspaceBasis {
        SubspaceBasis { ambient: self.ambient, basis: self.basis }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rot() -> Matrix {
        Matrix::from_rows(&[vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap()
    }

    #[test]
    fn wedge_of_identity_is_identity() {
        let w = wedge_power(&Matrix::identity(3), 2).unwrap();
        assert_eq!(w, Matrix::identity(3));
    }

    #[test]
    fn wedge_of_diagonal_uses_lexicographic_pairs() {
        let w = wedge_power(&Matrix::diag(&[2.0, 3.0, 5.0]), 2).unwrap();
        assert_eq!(w, Matrix::diag(&[6.0, 10.0, 15.0]));
    }

    #[test]
    fn wedge_rejects_out_of_range() {
        assert!(wedge_power(&Matrix::identity(3), 0).is_err());
        assert!(wedge_power(&Matrix::identity(3), 3).is_err());
    }

    #[test]
    fn principal_pair_diagonal() {
        let p = principal_pair(&Matrix::diag(&[2.0, 0.5])).unwrap();
        assert_eq!(p.sigma, vec![2.0, 0.5]);
        assert!((p.v1[0] - 1.0).abs() < 1e-12 && p.v1[1].abs() < 1e-12);
        assert!((p.v2[0] - 1.0).abs() < 1e-12 && p.v2[1].abs() < 1e-12);
    }

    #[test]
    fn principal_pair_rotation_tie_break() {
        let p = principal_pair(&rot()).unwrap();
        assert!((p.sigma[0] - 1.0).abs() < 1e-12 && (p.sigma[1] - 1.0).abs() < 1e-12);
        assert!((p.v1[0] - 1.0).abs() < 1e-12 && p.v1[1].abs() < 1e-12);
        assert!(p.v2[0].abs() < 1e-12 && (p.v2[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn principal_pair_antidiagonal() {
        let a = Matrix::from_rows(&[vec![0.0, -0.5], vec![2.0, 0.0]]).unwrap();
        let p = principal_pair(&a).unwrap();
        assert!((p.sigma[0] - 2.0).abs() < 1e-12 && (p.sigma[1] - 0.5).abs() < 1e-12);
        assert!((p.v1[0] - 1.0).abs() < 1e-12);
        assert!((p.v2[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn span_basis_examples() {
        let e1 = vec![1.0, 0.0];
        let e2 = vec![0.0, 1.0];
        assert_eq!(span_basis(&[e1.clone(), e1.clone()], SPAN_TOL).dim(), 1);
        assert_eq!(span_basis(&[e1.clone(), e2], SPAN_TOL).dim(), 2);
        assert_eq!(span_basis(&[e1, vec![1.0, 1e-12]], 1e-9).dim(), 1);
        assert_eq!(span_basis(&[], SPAN_TOL).dim(), 0);
    }

    #[test]
    fn closed_form_singular_values_match_nalgebra() {
        let a = Matrix::from_rows(&[vec![0.3, -1.7], vec![2.2, 0.9]]).unwrap();
        let (s1, s2) = singular_values_2x2(a.data());
        let mut na: Vec<f64> = a.to_na().singular_values().iter().copied().collect();
        na.sort_by(|x, y| y.total_cmp(x));
        assert!((s1 - na[0]).abs() < 1e-13 && (s2 - na[1]).abs() < 1e-13);
    }

    #[test]
    fn determinant_general() {
        let a = Matrix::from_rows(&[
            vec![2.0, 1.0, 0.0],
            vec![1.0, 3.0, 1.0],
            vec![0.0, 1.0, 4.0],
        ])
        .unwrap();
        assert!((a.det() - 18.0).abs() < 1e-12);
        assert!(!Matrix::diag(&[1.0, 0.0]).is_invertible());
    }

    #[test]
    fn combinations_lexicographic() {
        assert_eq!(
            combinations(4, 2),
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
        assert_eq!(combinations(3, 0), vec![Vec::<usize>::new()]);
        assert_eq!(binomial(8, 4), 70);
    }
}
