//! Point clouds of the attractor, truncated at a fixed depth.

use std::io::Write;

use crate::context::Context;
use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::system::GeneratorSystem;
use crate::wordspace::{enumerate_words, Word};

/// `π(I) = Σ_{k=1}^{n} A_{i₁}⋯A_{i_{k−1}} t_{i_k}` for every word of length `depth`,
/// in lexicographic order.
pub fn attractor_points(ctx: &Context, sys: &GeneratorSystem, depth: usize) -> Result<Vec<(Word, Vec<f64>)>> {
    let ts = sys.translations().ok_or_else(|| Error::input("export-attractor needs translations"))?;
    let ell = sys.ell();
    ctx.check_budget(&format!("attractor words of depth {depth}"), (ell as f64).powi(depth as i32))?;
    let d = sys.dim();
    let mut out = Vec::with_capacity(ell.pow(depth as u32));
    for w in enumerate_words(ell, depth) {
        let mut x = vec![0.0; d];
        let mut m = Matrix::identity(d);
        for &s in w.symbols() {
            for (xi, yi) in x.iter_mut().zip(m.apply(&ts[s - 1])) {
                *xi += yi;
            }
            m = m.matmul(sys.generator(s));
        }
        out.push((w, x));
    }
    Ok(out)
}

/// CSV with columns `x,y` (or `x1..xd` when `d ≠ 2`) and `word`.
pub fn write_attractor_csv<W: Write>(out: W, sys: &GeneratorSystem, points: &[(Word, Vec<f64>)]) -> Result<()> {
    let d = sys.dim();
    let mut header: Vec<String> = if d == 2 { vec!["x".into(), "y".into()] } else { (1..=d).map(|i| format!("x{i}")).collect() };
    header.push("word".into());
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&header).map_err(csv_err)?;
    for (word, x) in points {
        let mut rec: Vec<String> = x.iter().map(|v| v.to_string()).collect();
        rec.push(word.format(sys.ell()));
        w.write_record(&rec).map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn e4_points() {
        let ctx = Context::default();
        let p = attractor_points(&ctx, &fixtures::e4(), 2).unwrap();
        let xs: Vec<f64> = p.iter().map(|(_, x)| x[0]).collect();
        for (a, b) in xs.iter().zip([0.0, 0.24, 0.6, 0.84]) {
            assert!((a - b).abs() < 1e-15);
        }
        let p = attractor_points(&ctx, &fixtures::e4(), 0).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p[0].1, vec![0.0, 0.0]);
        assert!(attractor_points(&ctx, &fixtures::e2(), 1).is_err());
    }
}
