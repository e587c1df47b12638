//! Irreducibility of the power and exterior cocycles, check by check.
//!
//! Usage: `cargo run --example hypotheses -- [fixture] [mode]` (defaults: e1, theorem_1_1).

use qmcocycle::fixtures;
use qmcocycle::hypothesis::{check_hypotheses, HypothesisCheck, HypothesisMode};
use qmcocycle::Context;

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("e1");
    let mode: HypothesisMode = args.get(1).map(String::as_str).unwrap_or("theorem_1_1").parse()?;
    let sys = fixtures::by_name(name).ok_or_else(|| qmcocycle::Error::input(format!("unknown fixture {name}")))?;
    let report = check_hypotheses(&Context::default(), &sys, mode)?;
    for c in &report.checks {
        let detail = match c {
            HypothesisCheck::Power { verdict, .. } | HypothesisCheck::Wedge { verdict, .. } => {
                format!("{:?} via {:?}", verdict.status, verdict.method)
            }
            HypothesisCheck::NormBound { norm, bound, passed, .. } => format!("{norm:.4} < {bound} is {passed}"),
        };
        println!("{:<22} {detail}", c.label());
    }
    println!("overall: {:?}", report.overall);
    Ok(())
}
