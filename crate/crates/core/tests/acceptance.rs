//! Exit gate: one PASS/FAIL line per criterion. Runs without the libtest harness so the
//! lines always print.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::time::Instant;

use common::{close, phi, random_system, raw, word_product, words};
use qmcocycle::cli::{parse_config, run_command};
use qmcocycle::fixtures;
use qmcocycle::gibbs::{kappa_floor, psi_mixing_stat};
use qmcocycle::hypothesis::{
    check_hypotheses, HypothesisCheck, HypothesisMode, Overall, VerdictMethod, VerdictStatus,
};
use qmcocycle::linalg::{wedge_power, Matrix};
use qmcocycle::quasimult::{empirical_qm, gamma_minimax, phi_constant};
use qmcocycle::spannability::{
    diagnose_failure, minimal_spannable_k, spannable_at, DiagnosisCase, SpanMethod, SpanMode, SpanStatus,
};
use qmcocycle::thermo::{
    affinity_dimension, pressure_bracket, r0_interval, s0_interval, square_pressure, sv_pieces, PotentialSpec,
    TargetSequence,
};
use qmcocycle::{Context, GeneratorSystem, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn ctx() -> Context {
    Context::default()
}

fn line_witness(r: &qmcocycle::hypothesis::HypothesisReport) -> Option<Vec<f64>> {
    match &r.overall {
        Overall::Fail { witness: Some(w), .. } if w.dim() == 1 => Some(w.basis[0].clone()),
        _ => None,
    }
}

fn fail_label(r: &qmcocycle::hypothesis::HypothesisReport) -> Option<&str> {
    match &r.overall {
        Overall::Fail { label, .. } => Some(label),
        _ => None,
    }
}

fn criterion_1() -> Outcome {
    let mut slowest = 0f64;
    let mut timed = |sys: &GeneratorSystem, mode| {
        let t = Instant::now();
        let r = check_hypotheses(&ctx(), sys, mode).unwrap();
        slowest = slowest.max(t.elapsed().as_secs_f64());
        r
    };
    let e1 = timed(&fixtures::e1(), HypothesisMode::PowersAndWedges);
    ensure!(fail_label(&e1) == Some("t=2"), "E1 overall {:?}", e1.overall);
    let w = line_witness(&e1).ok_or("E1 witness is not a line")?;
    // −I fixes every line, so any line is a valid witness.
    ensure!(close(w[0].abs().hypot(w[1].abs()), 1.0, 1e-12), "E1 witness {w:?}");
    for (name, sys, mode) in [
        ("E2", fixtures::e2(), HypothesisMode::PowersAndWedges),
        ("E3", fixtures::e3(), HypothesisMode::PowersAndWedges),
        ("E3", fixtures::e3(), HypothesisMode::PlanarAttractor),
    ] {
        let r = timed(&sys, mode);
        ensure!(r.passed(), "{name} {mode:?}: {:?}", r.overall);
    }
    let d = timed(&fixtures::diagonal_pair(), HypothesisMode::PowersAndWedges);
    ensure!(fail_label(&d) == Some("t=1"), "diag overall {:?}", d.overall);
    let w = line_witness(&d).ok_or("diag witness is not a line")?;
    ensure!(close(w[0].abs(), 1.0, 1e-12) && w[1].abs() <= 1e-12, "diag witness {w:?}");
    ensure!(slowest < 1.0, "slowest check took {slowest:.3}s");
    Ok(format!("E1 fails at t=2, diag at t=1 with e1, E2/E3 pass; slowest {:.1} ms", slowest * 1e3))
}

fn exact_pass(r: &qmcocycle::hypothesis::HypothesisReport) -> bool {
    r.passed()
        && r.checks.iter().all(|c| match c {
            HypothesisCheck::Power { verdict, .. } | HypothesisCheck::Wedge { verdict, .. } => {
                verdict.method == VerdictMethod::ExactForms
            }
            HypothesisCheck::NormBound { .. } => true,
        })
}

fn criterion_2() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(2);
    let mut ks = Vec::new();
    let mut drawn = 0;
    while ks.len() < 25 {
        drawn += 1;
        ensure!(drawn < 10_000, "could not draw 25 certified systems");
        let ell = r.random_range(2..=3);
        let sys = random_system(&mut r, ell);
        if !exact_pass(&check_hypotheses(&ctx(), &sys, HypothesisMode::PowersAndWedges).unwrap()) {
            continue;
        }
        let m = minimal_spannable_k(&ctx(), &sys, 8, SpanMode::Auto).unwrap();
        match m.k {
            Some(k) => ks.push(k),
            None => return Err(format!("certified system {:?} has no k <= 8", raw(&sys))),
        }
    }
    let e1 = minimal_spannable_k(&ctx(), &fixtures::e1(), 8, SpanMode::Auto).unwrap();
    ensure!(e1.k.is_none(), "E1 found k = {:?}", e1.k);
    let d = diagnose_failure(&ctx(), &fixtures::e1(), 8).unwrap();
    match d.case {
        DiagnosisCase::PeriodicSubspaces { period: 2, consistent: true, cross_check, .. } => {
            ensure!(cross_check.status == VerdictStatus::ReducibleWitness, "cross-check {cross_check:?}");
        }
        other => return Err(format!("E1 diagnosis {other:?}")),
    }
    Ok(format!(
        "25 certified systems spannable with max k = {}; E1 not found, periodic of period 2",
        ks.iter().max().unwrap()
    ))
}

fn classification(s: &SpanStatus) -> &'static str {
    match s {
        SpanStatus::Spannable => "spannable",
        SpanStatus::NotSpannable { .. } => "not spannable",
        SpanStatus::Inconclusive => "inconclusive",
    }
}

fn criterion_3() -> Outcome {
    let c = spannable_at(&ctx(), &fixtures::e2(), 1, SpanMode::Auto).unwrap();
    ensure!(c.is_spannable() && c.exact && c.method == SpanMethod::ExactForms, "E2 certificate {c:?}");
    ensure!(close(c.margin, 0.5, 1e-12), "E2 margin {}", c.margin);
    let mut r = ChaCha8Rng::seed_from_u64(3);
    let mut not_spannable = 0;
    for i in 0..100 {
        let sys = random_system(&mut r, 2);
        let exact = spannable_at(&ctx(), &sys, 1, SpanMode::Auto).unwrap();
        let numeric = spannable_at(&ctx(), &sys, 1, SpanMode::Numeric).unwrap();
        ensure!(exact.exact, "system {i} did not take the exact path");
        ensure!(
            classification(&exact.status) == classification(&numeric.status),
            "system {i}: exact {:?} numeric {:?}",
            exact.status,
            numeric.status
        );
        not_spannable += usize::from(!exact.is_spannable());
    }
    Ok(format!("E2 margin {}; 100/100 agree ({not_spannable} not spannable at k=1)", c.margin))
}

/// `min_{|I|=|J|=n} max_{|K|=1} ‖𝒜_{IKJ}‖/(‖𝒜_I‖‖𝒜_J‖)` by direct products.
fn brute_min_ratio(gens: &[common::M2], n: usize) -> f64 {
    let ws = words(gens.len(), n);
    let mut best = f64::INFINITY;
    for i in &ws {
        let ni = common::norm(&word_product(gens, i));
        for j in &ws {
            let nj = common::norm(&word_product(gens, j));
            let top = (1..=gens.len())
                .map(|k| {
                    let w: Vec<usize> = i.iter().copied().chain([k]).chain(j.iter().copied()).collect();
                    common::norm(&word_product(gens, &w))
                })
                .fold(0.0, f64::max);
            best = best.min(top / (ni * nj));
        }
    }
    best
}

fn criterion_4() -> Outcome {
    let mut notes = Vec::new();
    for (name, sys) in [("E2", fixtures::e2()), ("E3", fixtures::e3())] {
        let g = gamma_minimax(&ctx(), &sys, 1).unwrap();
        ensure!(g.certified, "{name} gamma not certified");
        let gens = raw(&sys);
        let worst = (1..=5).map(|n| brute_min_ratio(&gens, n)).fold(f64::INFINITY, f64::min);
        ensure!(worst >= g.gamma - 1e-9, "{name}: ratio {worst} below gamma {}", g.gamma);
        let lib = empirical_qm(&ctx(), &sys, 1, 5).unwrap();
        for e in &lib.empirical {
            ensure!(e.min_ratio >= g.gamma - 1e-9, "{name} n={}: {}", e.n, e.min_ratio);
        }
        notes.push(format!("{name} gamma {:.6} min ratio {:.6}", g.gamma, worst));
    }
    let g = gamma_minimax(&ctx(), &fixtures::e1(), 1).unwrap();
    ensure!(g.gamma.abs() <= 1e-12, "E1 gamma {}", g.gamma);
    let lib = empirical_qm(&ctx(), &fixtures::e1(), 1, 5).unwrap();
    for e in &lib.empirical {
        ensure!(close(e.min_ratio, 1.0, 1e-12), "E1 n={} ratio {}", e.n, e.min_ratio);
    }
    let gens = raw(&fixtures::e1());
    for n in 1..=5 {
        ensure!(close(brute_min_ratio(&gens, n), 1.0, 1e-12), "E1 brute ratio at n={n}");
    }
    notes.push("E1 ratios 1 with gamma 0".into());
    Ok(notes.join("; "))
}

fn criterion_5() -> Outcome {
    let all = [fixtures::e1(), fixtures::e2(), fixtures::e3(), fixtures::e4(), fixtures::e5()];
    for sys in &all {
        let log_ell = (sys.ell() as f64).ln();
        for spec in [PotentialSpec::norm(0.0), PotentialSpec::sv(0.0)] {
            let b = pressure_bracket(&ctx(), sys, &spec, 6, None).unwrap();
            ensure!(close(b.lower, log_ell, 1e-12) && close(b.upper, log_ell, 1e-12), "P(0) {b:?}");
        }
        let q = square_pressure(&ctx(), sys, 0.0, 6, None).unwrap();
        ensure!(close(q.lower, -log_ell, 1e-12) && close(q.upper, -log_ell, 1e-12), "P2(0) {q:?}");
    }
    let mut widest = 0f64;
    for s in [0.25, 0.5, 0.75] {
        let b = pressure_bracket(&ctx(), &fixtures::e4(), &PotentialSpec::sv(s), 8, None).unwrap();
        let p = 2f64.ln() + s * 0.4f64.ln();
        ensure!(b.lower <= p + 1e-12 && p <= b.upper + 1e-12 && b.width() <= 1e-2, "E4 s={s}: {b:?}");
        widest = widest.max(b.width());
    }
    let mut checked = 0;
    for sys in &all {
        let qm = if sys.dim() == 2 { Some(qmcocycle::thermo::QmInput::compute(&ctx(), sys, 1).unwrap()) } else { None };
        for i in 0..=12 {
            let s = i as f64 * 0.25;
            for spec in [PotentialSpec::norm(s), PotentialSpec::sv(s), PotentialSpec::sv_squared(s)] {
                let short = pressure_bracket(&ctx(), sys, &spec, 4, qm.as_ref()).unwrap();
                let long = pressure_bracket(&ctx(), sys, &spec, 8, qm.as_ref()).unwrap();
                for b in [&short, &long] {
                    ensure!(!b.lower_valid || b.lower <= b.upper, "lower above upper: {b:?}");
                }
                ensure!(long.upper <= short.upper + 1e-12, "Fekete {short:?} {long:?}");
                checked += 1;
            }
        }
    }
    Ok(format!("P(0), P2(0) exact; E4 widest {widest:.2e}; {checked} bracket pairs ordered and monotone"))
}

fn criterion_6() -> Outcome {
    let e4 = fixtures::e4();
    let t = TargetSequence::constant(1, 10).unwrap();
    let cases = [
        ("s0", s0_interval(&ctx(), &e4, &t, 10, None).unwrap(), 2f64.ln() / 6.25f64.ln()),
        ("r0", r0_interval(&ctx(), &e4, 0.5, 10, None).unwrap(), 2.0 * 2f64.ln() / (3.0 * 2.5f64.ln())),
        ("affinity", affinity_dimension(&ctx(), &e4, 10, None).unwrap(), 2f64.ln() / 2.5f64.ln()),
    ];
    let mut notes = Vec::new();
    for (name, r, exact) in &cases {
        let mid = 0.5 * (r.lo + r.hi);
        ensure!(
            r.lo <= exact + 1e-9 && *exact <= r.hi + 1e-9 && (mid - exact).abs() <= 1e-3,
            "{name}: [{}, {}] vs {exact}",
            r.lo,
            r.hi
        );
        ensure!(r.clamped_lo <= 2.0 && r.clamped_hi <= 2.0, "{name} clamp");
        notes.push(format!("{name} [{:.6}, {:.6}]", r.lo, r.hi));
    }
    let e3 = fixtures::e3();
    for r in [
        s0_interval(&ctx(), &e3, &t, 8, Some(1)).unwrap(),
        r0_interval(&ctx(), &e3, 0.5, 8, Some(1)).unwrap(),
        affinity_dimension(&ctx(), &e3, 8, Some(1)).unwrap(),
    ] {
        ensure!(r.clamped_hi <= 2.0 && r.clamped_lo <= r.clamped_hi, "E3 clamp {r:?}");
    }
    Ok(notes.join(", "))
}

fn random_nonempty(r: &mut ChaCha8Rng, max_len: usize) -> Vec<usize> {
    let n = r.random_range(1..=max_len);
    (0..n).map(|_| r.random_range(1..=2)).collect()
}

fn criterion_7() -> Outcome {
    let sys = fixtures::e3();
    let gens = raw(&sys);
    let g = gamma_minimax(&ctx(), &sys, 1).unwrap();
    ensure!(g.certified, "gamma not certified");
    let min_det = gens.iter().map(|a| (a[0] * a[3] - a[1] * a[2]).abs()).fold(f64::INFINITY, f64::min);
    let mut r = ChaCha8Rng::seed_from_u64(7);
    let mut tightest = f64::INFINITY;
    for s in [0.3, 1.0, 1.7] {
        let c = phi_constant(s, g.gamma, min_det).value;
        for _ in 0..500 {
            let (i, j) = (random_nonempty(&mut r, 8), random_nonempty(&mut r, 8));
            let rhs = c * phi(&word_product(&gens, &i), s) * phi(&word_product(&gens, &j), s);
            let lhs = (1..=2)
                .map(|k| {
                    let w: Vec<usize> = i.iter().copied().chain([k]).chain(j.iter().copied()).collect();
                    phi(&word_product(&gens, &w), s)
                })
                .fold(0.0, f64::max);
            ensure!(lhs >= rhs - 1e-12, "s={s} I={i:?} J={j:?}: {lhs} < {rhs}");
            tightest = tightest.min(lhs / rhs);
        }
    }
    let at = |s: f64| phi_constant(s, g.gamma, min_det).value;
    let jump = (at(1.0) - at(1.0 + 1e-13)).abs().max((at(1.0) - at(1.0 - 1e-13)).abs());
    ensure!(jump <= 1e-12, "C(s) jumps by {jump} at s=1");
    Ok(format!("1500 triples hold, tightest ratio {tightest:.4}; C(s) jump at 1 is {jump:.1e}"))
}

fn criterion_8() -> Outcome {
    let k = kappa_floor(&ctx(), &fixtures::e3(), 1.0, 1, 5).unwrap();
    let v = k.value.ok_or("E3 kappa has no certificate")?;
    ensure!(v >= 1.0 - 1e-9, "E3 kappa {v}");
    let e5 = psi_mixing_stat(&ctx(), &fixtures::e5(), 1.0, 3, 2).unwrap();
    ensure!(e5.psi_hat.abs() <= 1e-12, "E5 psi {}", e5.psi_hat);
    let psi: Vec<(f64, f64)> = [2, 4, 6]
        .iter()
        .map(|&n| {
            let m = psi_mixing_stat(&ctx(), &fixtures::e3(), 1.0, 3, n).unwrap();
            (m.psi_hat, m.psi_unpadded)
        })
        .collect();
    ensure!(
        psi.windows(2).all(|w| w[1].0 <= w[0].0 + 1e-9),
        "E3 psi over gaps 2, 4, 6: {:?}",
        psi.iter().map(|p| p.0).collect::<Vec<_>>()
    );
    Ok(format!(
        "E3 kappa {v:.4}; E5 psi {:.1e}; E3 psi {:.3e} {:.3e} {:.3e} (unpadded {:.3} {:.3} {:.3})",
        e5.psi_hat, psi[0].0, psi[1].0, psi[2].0, psi[0].1, psi[1].1, psi[2].1
    ))
}

fn criterion_9() -> Outcome {
    let mut r = ChaCha8Rng::seed_from_u64(9);
    let mut worst = 0f64;
    for i in 0..200 {
        let d = 2 + i % 3;
        let a = Matrix::new(d, (0..d * d).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
        let b = Matrix::new(d, (0..d * d).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
        for m in 1..d {
            let lhs = wedge_power(&a.matmul(&b), m).unwrap();
            let rhs = wedge_power(&a, m).unwrap().matmul(&wedge_power(&b, m).unwrap());
            worst = worst.max(lhs.relative_distance(&rhs));
        }
    }
    ensure!(worst <= 1e-10, "wedge multiplicativity error {worst}");
    let mut concat = 0f64;
    for i in 0..500 {
        let sys = if i % 2 == 0 { fixtures::e2() } else { fixtures::e3() };
        let wi = Word(random_nonempty(&mut r, 12));
        let wj = Word(random_nonempty(&mut r, 12));
        let whole = sys.product(&wi.concat(&wj)).unwrap();
        let split = sys.product(&wj).unwrap().mul(&sys.product(&wi).unwrap());
        concat = concat.max(whole.matrix().relative_distance(&split.matrix()));
    }
    ensure!(concat <= 1e-10, "concatenation error {concat}");
    let mut boundary = 0f64;
    for _ in 0..100 {
        let a = Matrix::new(2, (0..4).map(|_| r.random_range(-2.0..2.0)).collect()).unwrap();
        if !a.is_invertible() {
            continue;
        }
        let p1 = sv_pieces(&a, 1.0).unwrap();
        let p2 = sv_pieces(&a, 2.0).unwrap();
        boundary = boundary.max((p1[0] - p1[1]).abs() / p1[0]).max((p2[1] - p2[2]).abs() / p2[1]);
    }
    ensure!(boundary <= 1e-12, "piece boundary mismatch {boundary}");
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs");
    let dir = std::env::temp_dir().join(format!("qmcocycle-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut compared = 0;
    for (file, command) in [
        ("e1.json", "check-hypotheses"),
        ("e2.json", "spannability"),
        ("e2.json", "qm"),
        ("e3.json", "pressure"),
        ("e3.json", "s0"),
        ("e4.json", "r0"),
        ("e5.json", "mixing"),
    ] {
        let mut cfg = parse_config(&std::fs::read_to_string(configs.join(file)).unwrap()).unwrap();
        cfg.command = Some(command.into());
        if command == "r0" {
            cfg.options.beta = Some(0.5);
        }
        cfg.output.csv_dir = Some(dir.display().to_string());
        let json = |threads| {
            let mut c = cfg.clone();
            c.threads = Some(threads);
            let mut v: serde_json::Value = serde_json::from_str(&run_command(&c).to_json()).unwrap();
            let o = v.as_object_mut().unwrap();
            o.remove("wall_time_s");
            o.remove("threads");
            o["config"].as_object_mut().unwrap().remove("threads");
            v.to_string()
        };
        ensure!(json(1) == json(4), "{command} on {file} differs between 1 and 4 threads");
        compared += 1;
    }
    let _ = std::fs::remove_dir_all(&dir);
    Ok(format!(
        "wedge {worst:.1e}, concatenation {concat:.1e}, boundaries {boundary:.1e}; {compared} reports identical at 1 and 4 threads"
    ))
}

fn main() {
    let criteria: [(usize, fn() -> Outcome); 9] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
    ];
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, f) in criteria {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {n}: PASS ({secs:.1}s) {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n}: FAIL ({secs:.1}s) {detail}");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
