//! Exact rational matrices for the decision procedures that can afford them.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::Matrix;
use crate::error::{Error, Result};

/// Parse a decimal literal (`-1.25`, `3`, `2.5e-3`) into an exact rational.
pub fn parse_decimal(text: &str) -> Result<BigRational> {
    let s = text.trim();
    let bad = || Error::input(format!("not a decimal number: {text:?}"));
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = s[pos + 1..].parse().map_err(|_| bad())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.as_bytes().first() {
        Some(b'-') => (true, &mantissa[1..]),
        Some(b'+') => (false, &mantissa[1..]),
        _ => (false, mantissa),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(bad());
    }
    if exponent.abs() > 400 {
        return Err(Error::input(format!("exponent out of range in {text:?}")));
    }
    let all: String = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if all.is_empty() { BigInt::zero() } else { all.parse().map_err(|_| bad())? };
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac_part.len() as i64;
    let ten = BigInt::from(10u8);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-shift) as usize))
    };
    Ok(value)
}

/// Exact rational value of a finite double.
pub fn rational_from_f64(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite double")
}

/// A decimal literal parsed both ways; `exact` says the double equals the decimal.
#[derive(Clone, Debug)]
pub struct ParsedDecimal {
    pub value: f64,
    pub exact: bool,
}

pub fn parse_decimal_checked(text: &str) -> Result<ParsedDecimal> {
    let q = parse_decimal(text)?;
    let value: f64 = text
        .trim()
        .parse()
        .map_err(|_| Error::input(format!("not a decimal number: {text:?}")))?;
    if !value.is_finite() {
        return Err(Error::input(format!("matrix entry {text:?} is not finite")));
    }
    let exact = rational_from_f64(value) == q;
    Ok(ParsedDecimal { value, exact })
}

/// Square matrix over ℚ, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QMatrix {
    dim: usize,
    data: Vec<BigRational>,
}

impl QMatrix {
    pub fn from_matrix(m: &Matrix) -> Self {
        QMatrix { dim: m.dim(), data: m.data().iter().map(|&x| rational_from_f64(x)).collect() }
    }

    pub fn identity(dim: usize) -> Self {
        let mut data = vec![BigRational::zero(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = BigRational::one();
        }
        QMatrix { dim, data }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.data[i * self.dim + j]
    }

    pub fn mul(&self, rhs: &QMatrix) -> QMatrix {
        let d = self.dim;
        let mut data = vec![BigRational::zero(); d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    data[i * d + j] += a * rhs.get(k, j);
                }
            }
        }
        QMatrix { dim: d, data }
    }

    /// Determinant by Gaussian elimination over ℚ.
    pub fn det(&self) -> BigRational {
        let d = self.dim;
        let mut a = self.data.clone();
        let mut det = BigRational::one();
        for col in 0..d {
            let Some(piv) = (col..d).find(|&r| !a[r * d + col].is_zero()) else {
                return BigRational::zero();
            };
            if piv != col {
                for j in 0..d {
                    a.swap(piv * d + j, col * d + j);
                }
                det = -det;
            }
            let p = a[col * d + col].clone();
            det *= &p;
            for r in col + 1..d {
                if a[r * d + col].is_zero() {
                    continue;
                }
                let f = &a[r * d + col] / &p;
                for j in col..d {
                    let t = &f * &a[col * d + j];
                    a[r * d + j] -= t;
                }
            }
        }
        det
    }

    pub fn is_scalar(&self) -> bool {
        let d = self.dim;
        (0..d).all(|i| {
            (0..d).all(|j| {
                if i == j {
                    self.get(i, i) == self.get(0, 0)
                } else {
                    self.get(i, j).is_zero()
                }
            })
        })
    }

    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec_unchecked(self.dim, self.data.iter().map(to_f64).collect())
    }
}

pub fn to_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or_else(|| if q.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_binary_decimals_detected() {
        for s in ["2", "0", "0.5", "-0.25", "1.5e1", "0.125"] {
            assert!(parse_decimal_checked(s).unwrap().exact, "{s}");
        }
        for s in ["0.4", "0.1", "-0.3", "0.6"] {
            assert!(!parse_decimal_checked(s).unwrap().exact, "{s}");
        }
    }

    #[test]
    fn decimal_parse_values() {
        assert_eq!(parse_decimal("0.4").unwrap(), BigRational::new(2.into(), 5.into()));
        assert_eq!(parse_decimal("-12e-1").unwrap(), BigRational::new((-6).into(), 5.into()));
        assert!(parse_decimal("1.2.3").is_err());
        assert!(parse_decimal("abc").is_err());
        assert!(parse_decimal("").is_err());
    }

    #[test]
    fn rational_det_matches_float() {
        let m = Matrix::from_rows(&[vec![2.0, 1.0, 0.5], vec![0.0, 3.0, 1.0], vec![1.0, 0.0, 4.0]])
            .unwrap();
        let q = QMatrix::from_matrix(&m);
        assert!((to_f64(&q.det()) - m.det()).abs() < 1e-12);
        assert_eq!(q.mul(&QMatrix::identity(3)), q);
    }
}
