//! Points of the attractor at a given depth, written as CSV to stdout.
//!
//! Usage: `cargo run --example attractor -- [fixture] [depth] > points.csv` (defaults: e3, 10).

use qmcocycle::cli::{attractor_points, write_attractor_csv};
use qmcocycle::fixtures;
use qmcocycle::Context;

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let name = args.first().map(String::as_str).unwrap_or("e3");
    let depth: usize = args.get(1).and_then(|a| a.parse().ok()).unwrap_or(10);
    let sys = fixtures::by_name(name).ok_or_else(|| qmcocycle::Error::input(format!("unknown fixture {name}")))?;
    let points = attractor_points(&Context::default(), &sys, depth)?;
    write_attractor_csv(std::io::stdout().lock(), &sys, &points)
}
