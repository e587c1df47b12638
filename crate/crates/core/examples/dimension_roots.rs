//! Shrinking-target, recurrence and affinity dimension intervals for a system.
//!
//! Usage: `cargo run --example dimension_roots -- [fixture] [n]` (defaults: e3, 10).

use qmcocycle::fixtures;
use qmcocycle::thermo::{affinity_dimension, r0_interval, s0_interval, TargetSequence};
use qmcocycle::Context;

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("e3");
    let n: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let sys = fixtures::by_name(name).ok_or_else(|| qmcocycle::Error::input(format!("unknown fixture {name}")))?;
    let ctx = Context::default();
    let k = Some(1);

    let targets = TargetSequence::constant(1, 10)?;
    let s0 = s0_interval(&ctx, &sys, &targets, n, k)?;
    println!("s0        [{:.6}, {:.6}]  width {:.2e}", s0.lo, s0.hi, s0.width());
    let r0 = r0_interval(&ctx, &sys, 0.5, n, k)?;
    println!("r0(1/2)   [{:.6}, {:.6}]  width {:.2e}", r0.lo, r0.hi, r0.width());
    let aff = affinity_dimension(&ctx, &sys, n, k)?;
    println!("affinity  [{:.6}, {:.6}]  width {:.2e}", aff.lo, aff.hi, aff.width());
    for w in s0.warnings.iter().chain(&r0.warnings).chain(&aff.warnings) {
        println!("warning: {w}");
    }
    Ok(())
}
