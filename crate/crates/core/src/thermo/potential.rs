use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::wordspace::ScaledProduct;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `‖A‖ˢ`, any dimension.
    NormS,
    /// The singular value function `φˢ` (plane only).
    SvS,
    /// `(φˢ)²` (plane only).
    SvSSquared,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    pub kind: PotentialKind,
    pub s: f64,
}

impl PotentialSpec {
    pub fn new(kind: PotentialKind, s: f64) -> Self {
        PotentialSpec { kind, s }
    }

    pub fn norm(s: f64) -> Self {
        Self::new(PotentialKind::NormS, s)
    }

    pub fn sv(s: f64) -> Self {
        Self::new(PotentialKind::SvS, s)
    }

    pub fn sv_squared(s: f64) -> Self {
        Self::new(PotentialKind::SvSSquared, s)
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.s >= 0.0 && self.s.is_finite()) {
            return Err(Error::input(format!("s must be finite and nonnegative, got {}", self.s)));
        }
        if self.kind != PotentialKind::NormS && dim != 2 {
            return Err(Error::input("singular value potentials are defined for d = 2 only"));
        }
        Ok(())
    }

    /// Exponent of the squared variant relative to `φˢ` (1 or 2).
    pub(crate) fn power(&self) -> f64 {
        if self.kind == PotentialKind::SvSSquared {
            2.0
        } else {
            1.0
        }
    }
}

/// `log φ` of the potential at a product, from `log σ₁` and `log |det|`.
pub fn log_potential(p: &ScaledProduct, spec: &PotentialSpec) -> f64 {
    let s = spec.s;
    if s == 0.0 {
        return 0.0;
    }
    match spec.kind {
        PotentialKind::NormS => s * p.log_norm(),
        PotentialKind::SvS | PotentialKind::SvSSquared => {
            let lsv = p.log_singular_values();
            let v = log_sv(lsv[0], p.log_abs_det(), s);
            spec.power() * v
        }
    }
}

/// `log φˢ` from `log σ₁` and `log |det|` (so `log σ₂ = log |det| − log σ₁`).
pub(crate) fn log_sv(log_s1: f64, log_det: f64, s: f64) -> f64 {
    if s < 1.0 {
        s * log_s1
    } else if s < 2.0 {
        log_s1 + (s - 1.0) * (log_det - log_s1)
    } else {
        0.5 * s * log_det
    }
}

/// The potential of a single matrix.
pub fn potential_value(a: &Matrix, spec: &PotentialSpec) -> Result<f64> {
    spec.validate(a.dim())?;
    Ok(log_potential(&ScaledProduct::from_matrix(a.clone()), spec).exp())
}

/// The three closed forms of `φˢ` evaluated independently:
/// `‖A‖ˢ`, `‖A‖·‖A⁻¹‖^{−(s−1)}` and `|det A|^{s/2}`.
pub fn sv_pieces(a: &Matrix, s: f64) -> Result<[f64; 3]> {
    if a.dim() != 2 {
        return Err(Error::input("singular value potentials are defined for d = 2 only"));
    }
    let inv = a.inverse().ok_or_else(|| Error::input("matrix is not invertible"))?;
    let n = a.norm();
    Ok([n.powf(s), n * inv.norm().powf(-(s - 1.0)), a.det().abs().powf(0.5 * s)])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn piecewise_values() {
        let a = Matrix::diag(&[0.4, 0.1]);
        let v = potential_value(&a, &PotentialSpec::sv(0.5)).unwrap();
        assert!((v - 0.4f64.sqrt()).abs() < 1e-12);
        let v = potential_value(&a, &PotentialSpec::sv(1.5)).unwrap();
        assert!((v - 0.4 * 10f64.powf(-0.5)).abs() < 1e-12);
        let p = sv_pieces(&a, 2.0).unwrap();
        assert!((p[1] - p[2]).abs() < 1e-12);
        let v = potential_value(&a, &PotentialSpec::sv_squared(0.5)).unwrap();
        assert!((v - 0.4).abs() < 1e-12);
    }

    #[test]
    fn sv_needs_plane() {
        let a = Matrix::identity(3);
        assert!(potential_value(&a, &PotentialSpec::sv(0.5)).is_err());
        assert!(potential_value(&a, &PotentialSpec::norm(0.5)).is_ok());
    }
}
