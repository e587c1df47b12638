//! Least k for which every direction is spanned by the length-k images, or a diagnosis
//! of why none was found.
//!
//! Usage: `cargo run --example spannability -- [fixture] [k_max]` (defaults: e2, 8).

use qmcocycle::fixtures;
use qmcocycle::spannability::{diagnose_failure, minimal_spannable_k, SpanMode};
use qmcocycle::Context;

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("e2");
    let k_max: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(8);
    let sys = fixtures::by_name(name).ok_or_else(|| qmcocycle::Error::input(format!("unknown fixture {name}")))?;
    let ctx = Context::default();

    let found = minimal_spannable_k(&ctx, &sys, k_max, SpanMode::Auto)?;
    for c in &found.certificates {
        println!("k={} dim M_k={} {:?} margin {:.6} ({:?})", c.k, c.mk_dim, c.status, c.margin, c.method);
    }
    match found.k {
        Some(k) => println!("spannable at k = {k}"),
        None => {
            let d = diagnose_failure(&ctx, &sys, k_max)?;
            println!("none up to {k_max}; witness {:?}", d.witness);
            println!("{:#?}", d.case);
        }
    }
    Ok(())
}
