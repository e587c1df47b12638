//! Run a JSON config the way the binary does and print the report.
//!
//! Usage: `cargo run --example run_config -- [config] [command]`
//! (default: examples/configs/e2.json with its own command).

use std::path::PathBuf;

use qmcocycle::cli::{parse_config, run_command};

fn main() -> qmcocycle::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/e2.json"));
    let text = std::fs::read_to_string(&path)
        .map_err(|e| qmcocycle::Error::input(format!("{}: {e}", path.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(c) = args.get(1) {
        cfg.command = Some(c.clone());
    }
    cfg.output.csv_dir.get_or_insert_with(|| std::env::temp_dir().display().to_string());
    let report = run_command(&cfg);
    println!("{}", report.to_json());
    std::process::exit(report.exit_code);
}
