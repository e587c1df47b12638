//! Pressure brackets over a grid of s, with and without a connector constant.
//!
//! Usage: `cargo run --example pressure -- [fixture] [n]` (defaults: e3, 8).

use qmcocycle::fixtures;
use qmcocycle::thermo::{PotentialSpec, PressureEngine, QmInput};
use qmcocycle::Context;

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("e3");
    let n: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let sys = fixtures::by_name(name).ok_or_else(|| qmcocycle::Error::input(format!("unknown fixture {name}")))?;
    let ctx = Context::default();

    let qm = QmInput::compute(&ctx, &sys, 1)?;
    let engine = PressureEngine::new(&ctx, &sys, n, Some(qm))?;
    println!("{:>5} {:>12} {:>12} {:>10}  source", "s", "lower", "upper", "width");
    for i in 0..=8 {
        let s = i as f64 * 0.25;
        let b = engine.bracket(&PotentialSpec::sv(s))?;
        println!("{s:>5.2} {:>12.6} {:>12.6} {:>10.2e}  {:?}", b.lower, b.upper, b.width(), b.lower_source);
    }
    let sq = engine.bracket(&PotentialSpec::sv_squared(1.0))?.negated();
    println!("P2(1) in [{:.6}, {:.6}]", sq.lower, sq.upper);
    Ok(())
}
