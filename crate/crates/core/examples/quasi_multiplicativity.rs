//! Certified connector constant and the brute-force ratios it bounds.
//!
//! Usage: `cargo run --example quasi_multiplicativity -- [fixture] [k] [n_max]` (defaults: e2, 1, 5).

use qmcocycle::fixtures;
use qmcocycle::quasimult::{empirical_qm, qm_constant_phi};
use qmcocycle::Context;

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("e2");
    let k: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let n_max: usize = args.get(2).and_then(|a| a.parse().ok()).unwrap_or(5);
    let sys = fixtures::by_name(name).ok_or_else(|| qmcocycle::Error::input(format!("unknown fixture {name}")))?;
    let ctx = Context::default();

    let r = empirical_qm(&ctx, &sys, k, n_max)?;
    let g = &r.gamma;
    println!("gamma_{k} in [{:.10}, {:.10}] certified={}", g.gamma, g.upper, g.certified);
    for e in &r.empirical {
        println!(
            "n={} min ratio {:.6} at I={} J={} K={}",
            e.n,
            e.min_ratio,
            e.argmin_i.format(sys.ell()),
            e.argmin_j.format(sys.ell()),
            e.argmax_k.format(sys.ell())
        );
    }
    if sys.dim() == 2 {
        for s in [0.5, 1.0, 1.5, 2.5] {
            let c = qm_constant_phi(&ctx, &sys, k, s, g.gamma)?;
            println!("C({s}) = {:.6e}", c.value);
        }
    }
    Ok(())
}
