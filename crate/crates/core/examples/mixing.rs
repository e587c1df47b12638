//! Cylinder weights, the connector inequality and the ψ-mixing statistic.
//!
//! Usage: `cargo run --example mixing -- [fixture] [s] [max_len]` (defaults: e3, 1, 3).

use qmcocycle::fixtures;
use qmcocycle::gibbs::{cylinder_weights, kappa_floor, psi_mixing_stat};
use qmcocycle::Context;

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("e3");
    let s: f64 = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(1.0);
    let max_len: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(3);
    let sys = fixtures::by_name(name).ok_or_else(|| qmcocycle::Error::input(format!("unknown fixture {name}")))?;
    let ctx = Context::default();

    let w = cylinder_weights(&ctx, &sys, s, 2)?;
    for (word, v) in w.entries() {
        println!("w({}) = {v:.6}", word.format(sys.ell()));
    }
    let kappa = kappa_floor(&ctx, &sys, s, 1, max_len)?;
    match kappa.value {
        Some(v) => println!("kappa floor {v:.6} (raw {:.6}, constant {:.6})", kappa.raw_min, kappa.constant),
        None => println!("kappa floor: no certificate (raw {:.6})", kappa.raw_min),
    }
    for gap in [2, 4, 6] {
        let r = psi_mixing_stat(&ctx, &sys, s, max_len, gap)?;
        println!("gap {gap}: psi {:.6e}  unpadded {:.6e}", r.psi_hat, r.psi_unpadded);
    }
    Ok(())
}
