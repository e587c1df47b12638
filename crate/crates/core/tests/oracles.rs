//! Reference values worked out by hand or by separate programs, frozen here.

mod common;

use common::{close, raw, word_product};
use qmcocycle::fixtures;
use qmcocycle::gibbs::{cylinder_weights, kappa_floor};
use qmcocycle::hypothesis::{
    algebra_dimension, irreducibility_verdict, orbit_span, power_system, wedge_system, VerdictMethod, VerdictStatus,
};
use qmcocycle::linalg::{principal_pair, span_basis, wedge_power, Matrix};
use qmcocycle::quasimult::{empirical_qm, gamma_minimax, qm_constant_phi};
use qmcocycle::spannability::{
    diagnose_failure, minimal_spannable_k, mk_basis, spannable_at, DiagnosisCase, SpanMethod, SpanMode,
};
use qmcocycle::thermo::{alpha_hat, potential_value, pressure_bracket, s0_interval, square_pressure, PotentialSpec, TargetSequence};
use qmcocycle::wordspace::fold_words;
use qmcocycle::cli::attractor_points;
use qmcocycle::{Context, GeneratorSystem, Word};

fn ctx() -> Context {
    Context::default()
}

fn assert_matrix(m: &Matrix, rows: &[&[f64]], tol: f64) {
    for (i, r) in rows.iter().enumerate() {
        for (j, &v) in r.iter().enumerate() {
            assert!(close(m.get(i, j), v, tol), "entry ({i},{j}) = {} expected {v}", m.get(i, j));
        }
    }
}

// Refined minima from a separate dense-grid program: a 2000×2000 midpoint grid over the
// two angles, then 41×41 zoom grids around the best 40 cells, halved 30 times.
const GAMMA_E2_K1: f64 = 0.3971773474991185;
const GAMMA_E2_K2: f64 = 0.7808688094430765;
const GAMMA_E3_K1: f64 = 0.08879760371135216;
const GAMMA_E3_K2: f64 = 0.05761659596980933;

#[test]
fn wedge_of_diagonal() {
    let w = wedge_power(&Matrix::diag(&[2.0, 3.0, 5.0]), 2).unwrap();
    assert_matrix(&w, &[&[6.0, 0.0, 0.0], &[0.0, 10.0, 0.0], &[0.0, 0.0, 15.0]], 1e-14);
}

#[test]
fn principal_pairs() {
    let r = principal_pair(&fixtures::e1().generator(1).clone()).unwrap();
    assert!(close(r.sigma[0], 1.0, 1e-14) && close(r.sigma[1], 1.0, 1e-14));
    assert!(close(r.v1[0], 1.0, 1e-14) && close(r.v1[1], 0.0, 1e-14));
    assert!(close(r.v2[0], 0.0, 1e-14) && close(r.v2[1], 1.0, 1e-14));

    let a = Matrix::from_rows(&[vec![0.0, -0.5], vec![2.0, 0.0]]).unwrap();
    let p = principal_pair(&a).unwrap();
    assert!(close(p.sigma[0], 2.0, 1e-14) && close(p.sigma[1], 0.5, 1e-14));
    assert!(close(p.v1[0], 1.0, 1e-14) && close(p.v1[1], 0.0, 1e-14));
    assert!(close(p.v2[0], 0.0, 1e-14) && close(p.v2[1], 1.0, 1e-14));
}

#[test]
fn span_rank_tolerance() {
    assert_eq!(span_basis(&[vec![1.0, 0.0], vec![1.0, 1e-12]], 1e-9).dim(), 1);
}

#[test]
fn word_products() {
    let e2 = fixtures::e2();
    let p = e2.product(&Word::parse("12", 2).unwrap()).unwrap().matrix();
    assert_matrix(&p, &[&[0.0, -0.5], &[2.0, 0.0]], 1e-14);
    let e1 = fixtures::e1();
    let p = e1.product(&Word::parse("1111", 1).unwrap()).unwrap().matrix();
    assert_matrix(&p, &[&[1.0, 0.0], &[0.0, 1.0]], 1e-12);
}

#[test]
fn rotation_norms_fold_to_zero() {
    let e1 = fixtures::e1();
    let m = fold_words(&ctx(), e1.generators(), 3, || f64::NEG_INFINITY, |a, _, p| *a = a.max(p.log_norm()), f64::max)
        .unwrap();
    assert!(m.abs() < 1e-12, "{m}");
}

#[test]
fn power_and_wedge_systems() {
    let p = power_system(&ctx(), &fixtures::e1(), 2).unwrap();
    assert_eq!(p.ell(), 1);
    assert_matrix(p.generator(1), &[&[-1.0, 0.0], &[0.0, -1.0]], 1e-14);

    let p = power_system(&ctx(), &fixtures::e2(), 2).unwrap();
    let expected: [&[&[f64]]; 4] = [
        &[&[4.0, 0.0], &[0.0, 0.25]],
        &[&[0.0, -0.5], &[2.0, 0.0]],
        &[&[0.0, -2.0], &[0.5, 0.0]],
        &[&[-1.0, 0.0], &[0.0, -1.0]],
    ];
    assert_eq!(p.ell(), 4);
    for (i, e) in expected.iter().enumerate() {
        assert_matrix(p.generator(i + 1), e, 1e-14);
    }

    let d = GeneratorSystem::new(vec![Matrix::diag(&[2.0, 3.0, 5.0])]).unwrap();
    let w = wedge_system(&d, 2).unwrap();
    assert_matrix(w.generator(1), &[&[6.0, 0.0, 0.0], &[0.0, 10.0, 0.0], &[0.0, 0.0, 15.0]], 1e-14);
}

#[test]
fn orbit_spans_and_algebra() {
    assert_eq!(orbit_span(&fixtures::e2(), &[1.0, 0.0]).dim(), 2);
    assert_eq!(orbit_span(&fixtures::e1(), &[1.0, 1.0]).dim(), 2);
    assert_eq!(algebra_dimension(&fixtures::e2()), (4, true));
    assert_eq!(algebra_dimension(&fixtures::e1()), (2, false));
}

#[test]
fn rotation_is_irreducible_exactly() {
    let v = irreducibility_verdict(&ctx(), &fixtures::e1());
    assert_eq!(v.status, VerdictStatus::IrreducibleCertified);
    assert_eq!(v.method, VerdictMethod::ExactForms);
}

#[test]
fn mk_dimensions() {
    let e2 = fixtures::e2();
    assert_eq!(mk_basis(&e2, 1).unwrap().dim(), 2);
    assert_eq!(mk_basis(&e2, 2).unwrap().dim(), 4);
}

#[test]
fn plane_spannability_margins() {
    let c = spannable_at(&ctx(), &fixtures::e2(), 1, SpanMode::Auto).unwrap();
    assert!(c.is_spannable() && c.exact && c.method == SpanMethod::ExactForms);
    assert!(close(c.margin, 0.5, 1e-12), "{}", c.margin);

    // det(A₁u | A₂u) = 0.12x² + 0.03y². The entry 0.4 is not a binary double, so the
    // floating-point forms decide.
    let c = spannable_at(&ctx(), &fixtures::e3(), 1, SpanMode::Auto).unwrap();
    assert!(c.is_spannable() && !c.exact && c.method == SpanMethod::FloatForms, "{c:?}");
    assert!(close(c.margin, 0.03, 1e-12), "{}", c.margin);
    assert_eq!(minimal_spannable_k(&ctx(), &fixtures::e3(), 4, SpanMode::Auto).unwrap().k, Some(1));
}

#[test]
fn rotation_diagnosis_is_periodic() {
    let scaled = GeneratorSystem::new(vec![fixtures::e1().generator(1).scale(0.3)]).unwrap();
    for sys in [fixtures::e1(), scaled] {
        let d = diagnose_failure(&ctx(), &sys, 8).unwrap();
        match d.case {
            DiagnosisCase::PeriodicSubspaces { period, span, consistent, .. } => {
                assert_eq!(period, 2);
                assert_eq!(span.dim(), 2);
                assert!(consistent);
            }
            other => panic!("{other:?}"),
        }
    }
}

#[test]
fn gamma_matches_grid_oracle() {
    for (sys, k, oracle) in [
        (fixtures::e2(), 1, GAMMA_E2_K1),
        (fixtures::e2(), 2, GAMMA_E2_K2),
        (fixtures::e3(), 1, GAMMA_E3_K1),
        (fixtures::e3(), 2, GAMMA_E3_K2),
    ] {
        let g = gamma_minimax(&ctx(), &sys, k).unwrap();
        assert!(g.certified);
        assert!(g.gamma <= oracle + 1e-12, "k={k}: {} above oracle {oracle}", g.gamma);
        assert!(oracle - g.gamma <= 1e-6, "k={k}: {} far below oracle {oracle}", g.gamma);
        assert!(g.upper >= g.gamma);
    }
}

#[test]
fn scalar_ratios_are_exact() {
    let r = empirical_qm(&ctx(), &fixtures::e5(), 1, 3).unwrap();
    for e in &r.empirical {
        assert!(close(e.min_ratio, 0.4, 1e-14), "{e:?}");
    }
}

#[test]
fn phi_constant_from_determinants() {
    let sys = fixtures::e3();
    let c = qm_constant_phi(&ctx(), &sys, 1, 1.5, 0.25).unwrap();
    assert!(close(c.min_det, 0.04, 1e-15));
    assert!(close(c.value, 0.2 * 0.5, 1e-14), "{}", c.value);
}

#[test]
fn singular_value_function() {
    let a = Matrix::diag(&[0.4, 0.1]);
    assert!(close(potential_value(&a, &PotentialSpec::sv(0.5)).unwrap(), 0.4f64.sqrt(), 1e-14));
    assert!(close(potential_value(&a, &PotentialSpec::sv(1.5)).unwrap(), 0.4 * 10f64.powf(-0.5), 1e-14));
}

#[test]
fn conformal_pressures() {
    let e4 = fixtures::e4();
    let b = pressure_bracket(&ctx(), &e4, &PotentialSpec::sv(0.5), 8, None).unwrap();
    let p = 2f64.ln() + 0.5 * 0.4f64.ln();
    assert!(b.lower <= p + 1e-12 && p <= b.upper + 1e-12, "{b:?}");
    assert!(close(p, 0.235002, 1e-6));

    let q = square_pressure(&ctx(), &e4, 0.5, 8, None).unwrap();
    let p2 = -(2f64.ln() + 0.4f64.ln());
    assert!(q.lower <= p2 + 1e-12 && p2 <= q.upper + 1e-12, "{q:?}");
    assert!(close(p2, 0.223144, 1e-6));

    let q = square_pressure(&ctx(), &fixtures::e3(), 0.0, 6, None).unwrap();
    assert!(close(q.lower, -2f64.ln(), 1e-12) && close(q.upper, -2f64.ln(), 1e-12));
}

#[test]
fn target_exponents() {
    let t = TargetSequence::constant(1, 10).unwrap();
    let a = alpha_hat(&fixtures::e4(), &t, 0.5).unwrap();
    assert!(close(a, 0.5 * 2.5f64.ln(), 1e-12) && close(a, 0.458145, 1e-6));

    let e3 = fixtures::e3();
    let gens = raw(&e3);
    let t = TargetSequence::alternating(8).unwrap();
    let direct = (1..=8)
        .map(|k| {
            let w: Vec<usize> = (0..k).map(|i| i % 2 + 1).collect();
            -common::norm(&word_product(&gens, &w)).ln() / k as f64
        })
        .fold(f64::INFINITY, f64::min);
    assert!(close(alpha_hat(&e3, &t, 1.0).unwrap(), direct, 1e-12));
}

#[test]
fn shrinking_target_root_against_direct_sums() {
    let e3 = fixtures::e3();
    let gens = raw(&e3);
    let t = TargetSequence::constant(1, 10).unwrap();
    let r = s0_interval(&ctx(), &e3, &t, 10, Some(1)).unwrap();
    assert!(r.width() <= 0.05, "{r:?}");
    // The all-ones exponent is −s·log 0.4 for s ≤ 1.
    let g = |s: f64| common::upper_pressure(&gens, s, 10) + s * 0.4f64.ln();
    assert!(g(r.lo) > 0.0 && g(r.hi) <= 1e-9, "{r:?}");
    // Dense scan of the direct upper function: its root lies in the interval.
    let root = (0..=4000).map(|i| i as f64 * 1e-4).find(|&s| g(s) <= 0.0).unwrap();
    assert!(r.lo <= root && root <= r.hi + 1e-4, "{root} {r:?}");
}

#[test]
fn scalar_cylinder_weights() {
    let w = cylinder_weights(&ctx(), &fixtures::e5(), 1.0, 2).unwrap();
    let expected = [4.0 / 9.0, 2.0 / 9.0, 2.0 / 9.0, 1.0 / 9.0];
    for (got, want) in w.weights.iter().zip(expected) {
        assert!(close(*got, want, 1e-14));
    }
}

#[test]
fn scalar_kappa_has_no_certificate() {
    // γ vanishes for a scalar system: w ⟂ u kills every connector.
    let k = kappa_floor(&ctx(), &fixtures::e5(), 1.0, 1, 3).unwrap();
    assert!(k.no_certificate && k.value.is_none());
    assert!(close(k.raw_min, 0.6, 1e-14));
}

#[test]
fn conformal_attractor_points() {
    let e4 = fixtures::e4();
    let pts = attractor_points(&ctx(), &e4, 1).unwrap();
    let xy: Vec<(f64, f64)> = pts.iter().map(|(_, p)| (p[0], p[1])).collect();
    assert_eq!(xy.len(), 2);
    assert!(close(xy[0].0, 0.0, 1e-15) && close(xy[1].0, 0.6, 1e-15) && xy.iter().all(|p| p.1 == 0.0));

    let mut xs: Vec<f64> = attractor_points(&ctx(), &e4, 2).unwrap().iter().map(|(_, p)| p[0]).collect();
    xs.sort_by(f64::total_cmp);
    for (x, want) in xs.iter().zip([0.0, 0.24, 0.6, 0.84]) {
        assert!(close(*x, want, 1e-14), "{xs:?}");
    }
}
