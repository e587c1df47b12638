use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::exact::{parse_decimal_checked, QMatrix};
use crate::linalg::Matrix;
use crate::wordspace::{self, ScaledProduct, Word};

/// Largest matrix size handled internally (exterior powers of 8×8 reach 70).
pub const MAX_INTERNAL_DIM: usize = 70;

/// A tuple of invertible generators `(A₁, …, A_ℓ)`, optionally with translations.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    generators: Vec<Matrix>,
    exact: Option<Vec<QMatrix>>,
    translations: Option<Vec<Vec<f64>>>,
}

/// Serializable summary used in reports.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SystemSummary {
    pub ell: usize,
    pub dim: usize,
    pub exact_entries: bool,
    pub has_translations: bool,
}

impl GeneratorSystem {
    /// Generators given as doubles; their values are taken as exact rationals.
    pub fn new(generators: Vec<Matrix>) -> Result<Self> {
        let exact = Some(generators.iter().map(QMatrix::from_matrix).collect());
        Self::build(generators, exact)
    }

    /// Generators for which only floating-point decisions are trusted.
    pub fn new_inexact(generators: Vec<Matrix>) -> Result<Self> {
        Self::build(generators, None)
    }

    /// Build from row-major decimal strings, one `Vec` of rows per generator.
    ///
    /// Exact arithmetic is enabled only when every entry is an exact binary double.
    pub fn from_decimal(generators: &[Vec<Vec<String>>]) -> Result<Self> {
        let mut all_exact = true;
        let mut mats = Vec::with_capacity(generators.len());
        for (g, rows) in generators.iter().enumerate() {
            let mut parsed = Vec::with_capacity(rows.len());
            for row in rows {
                let mut r = Vec::with_capacity(row.len());
                for entry in row {
                    let p = parse_decimal_checked(entry)
                        .map_err(|e| Error::input(format!("generator {}: {e}", g + 1)))?;
                    all_exact &= p.exact;
                    r.push(p.value);
                }
                parsed.push(r);
            }
            mats.push(
                Matrix::from_rows(&parsed)
                    .map_err(|e| Error::input(format!("generator {}: {e}", g + 1)))?,
            );
        }
        if all_exact {
            Self::new(mats)
        } else {
            Self::new_inexact(mats)
        }
    }

    fn build(generators: Vec<Matrix>, exact: Option<Vec<QMatrix>>) -> Result<Self> {
        let Some(first) = generators.first() else {
            return Err(Error::input("a system needs at least one generator"));
        };
        let d = first.dim();
        if d > MAX_INTERNAL_DIM {
            return Err(Error::input(format!("dimension {d} exceeds {MAX_INTERNAL_DIM}")));
        }
        for (i, g) in generators.iter().enumerate() {
            if g.dim() != d {
                return Err(Error::input(format!(
                    "generator {} is {}x{}, expected {d}x{d}",
                    i + 1,
                    g.dim(),
                    g.dim()
                )));
            }
            if !g.is_invertible() {
                return Err(Error::input(format!("generator {} not invertible", i + 1)));
            }
        }
        Ok(GeneratorSystem { generators, exact, translations: None })
    }

    pub fn with_translations(mut self, translations: Vec<Vec<f64>>) -> Result<Self> {
        if translations.len() != self.ell() {
            return Err(Error::input(format!(
                "expected {} translations, got {}",
                self.ell(),
                translations.len()
            )));
        }
        if let Some(t) = translations.iter().find(|t| t.len() != self.dim()) {
            return Err(Error::input(format!(
                "translation of length {} does not match dimension {}",
                t.len(),
                self.dim()
            )));
        }
        if translations.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::input("translations must be finite"));
        }
        self.translations = Some(translations);
        Ok(self)
    }

    /// Number of symbols `ℓ`.
    pub fn ell(&self) -> usize {
        self.generators.len()
    }

    pub fn dim(&self) -> usize {
        self.generators[0].dim()
    }

    pub fn generators(&self) -> &[Matrix] {
        &self.generators
    }

    pub fn generator(&self, symbol: usize) -> &Matrix {
        &self.generators[symbol - 1]
    }

    /// Exact rational copies of the generators when available.
    pub fn exact(&self) -> Option<&[QMatrix]> {
        self.exact.as_deref()
    }

    pub fn translations(&self) -> Option<&[Vec<f64>]> {
        self.translations.as_deref()
    }

    pub fn product(&self, word: &Word) -> Result<ScaledProduct> {
        wordspace::product(&self.generators, word)
    }

    /// Exact `𝒜_I`, when the system carries exact entries.
    pub fn exact_product(&self, word: &Word) -> Option<QMatrix> {
        let ex = self.exact.as_ref()?;
        Some(word.0.iter().fold(QMatrix::identity(self.dim()), |p, &s| ex[s - 1].mul(&p)))
    }

    pub fn summary(&self) -> SystemSummary {
        SystemSummary {
            ell: self.ell(),
            dim: self.dim(),
            exact_entries: self.exact.is_some(),
            has_translations: self.translations.is_some(),
        }
    }

    pub(crate) fn from_parts(
        generators: Vec<Matrix>,
        exact: Option<Vec<QMatrix>>,
    ) -> Result<Self> {
        Self::build(generators, exact)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(rows: &[&[&str]]) -> Vec<Vec<String>> {
        rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }

    #[test]
    fn exactness_follows_decimals() {
        let e2 = GeneratorSystem::from_decimal(&[
            s(&[&["2", "0"], &["0", "0.5"]]),
            s(&[&["0", "-1"], &["1", "0"]]),
        ])
        .unwrap();
        assert!(e2.exact().is_some());
        let e3 = GeneratorSystem::from_decimal(&[s(&[&["0.4", "0"], &["0", "0.1"]])]).unwrap();
        assert!(e3.exact().is_none());
    }

    #[test]
    fn singular_generator_rejected() {
        let err = GeneratorSystem::from_decimal(&[s(&[&["1", "0"], &["0", "0"]])]).unwrap_err();
        assert!(err.to_string().contains("generator 1 not invertible"), "{err}");
    }

    #[test]
    fn translation_shape_checked() {
        let g = GeneratorSystem::new(vec![Matrix::scalar(2, 0.4)]).unwrap();
        assert!(g.clone().with_translations(vec![vec![0.0]]).is_err());
        assert!(g.with_translations(vec![vec![0.0, 0.0]]).is_ok());
    }
}
