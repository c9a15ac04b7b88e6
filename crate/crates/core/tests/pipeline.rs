use bracketeer::exact::rat;
use bracketeer::numeric::{gamma_real, quadrature_oracle, Verdict};
use bracketeer::pochhammer::{regularize, Regularized};
use bracketeer::types::Point;
use bracketeer::{evaluate_str, parse_integrands, verify, Bindings, Classification, EvalOptions, PochMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn opts() -> EvalOptions {
    EvalOptions::default()
}

#[test]
fn exponential_is_exactly_one() {
    let e = evaluate_str::<f64>("exp(-x)", &Bindings::new(), &opts()).unwrap();
    assert_eq!(e.value, 1.0);
    let sol = &e.integrands[0].solutions[0].solution;
    assert!(sol.free_indices.is_empty());
    match regularize::<f64>(&sol.term, &Point::new(), &Bindings::new(), PochMode::Regularized).unwrap() {
        Regularized::Finite(v) => assert_eq!(v.exact(), Some(&rat(1, 1))),
        other => panic!("{other:?}"),
    }
}

#[test]
fn gaussian() {
    let v = evaluate_str::<f64>("exp(-x^2)", &Bindings::new(), &opts()).unwrap().value;
    assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-12, "{v}");
}

#[test]
fn scaled_gaussian_moment() {
    // ∫ x² e^{-c x²} = √π / (4 c^{3/2})
    let b = Bindings::new().with_param("c", 2.5);
    let v = evaluate_str::<f64>("x^2*exp(-c*x^2)", &b, &opts()).unwrap().value;
    let want = std::f64::consts::PI.sqrt() / (4.0 * 2.5f64.powf(1.5));
    assert!((v - want).abs() < 1e-13, "{v} vs {want}");
}

#[test]
fn beta_family_against_closed_form_and_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..5 {
        let (s, al) = loop {
            let den = rng.gen_range(1..=6i64);
            let sn = rng.gen_range(1..6 * den);
            let an = rng.gen_range(1..6 * den);
            if sn < an {
                break (rat(sn, den), rat(an, den));
            }
        };
        let b = Bindings::new().with_const("s", s.clone()).with_const("al", al.clone());
        let e = evaluate_str::<f64>("x^(s-1)*(1+x)^(-al)", &b, &opts()).unwrap();
        let (sf, af) =
            (bracketeer::scalar::rational_to_scalar::<f64>(&s), bracketeer::scalar::rational_to_scalar::<f64>(&al));
        let closed = gamma_real(sf).unwrap() * gamma_real(af - sf).unwrap() / gamma_real(af).unwrap();
        assert!((e.value - closed).abs() <= 1e-10 * closed.abs(), "s={s} al={al}: {} vs {closed}", e.value);
        for alt in &e.diagnostics.alternatives {
            let v = alt.value.expect("alternative representation evaluates");
            assert!((v - closed).abs() <= 1e-10 * closed.abs());
        }
        let integrands = parse_integrands("x^(s-1)*(1+x)^(-al)").unwrap();
        let o = quadrature_oracle(&integrands, &b, 1e-11).unwrap().value;
        assert!((o - closed).abs() <= 1e-8 * closed.abs(), "oracle s={s} al={al}: {o} vs {closed}");
    }
}

#[test]
fn flagship_verifies_and_legacy_fails() {
    let integrands = parse_integrands("besselj(0,a*x)*sin(b*x)").unwrap();
    let b = Bindings::new().with_param("a", 1.0).with_param("b", 2.0);
    let r = verify::<f64>(&integrands, &b, 1e-5, &opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Pass, "{r:?}");
    assert_eq!(r.classification_log.len(), 2);
    assert_eq!(r.classification_log[0].classification, Some(Classification::Null));
    let legacy = EvalOptions { mode: PochMode::Legacy, ..opts() };
    let r = verify::<f64>(&integrands, &b, 1e-5, &legacy).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!((r.rel_error.unwrap() - 0.5).abs() < 1e-6);
}

#[test]
fn divergent_region_reports_failure() {
    let integrands = parse_integrands("besselj(0,a*x)*sin(b*x)").unwrap();
    let b = Bindings::new().with_param("a", 2.0).with_param("b", 1.0);
    let r = verify::<f64>(&integrands, &b, 1e-5, &opts()).unwrap();
    assert_eq!(r.verdict, Verdict::Fail);
    assert!(r.engine_value.is_none());
    assert!(r.reasons.iter().any(|m| m.contains("no convergent")));
}

#[test]
fn unbound_parameter_is_an_error() {
    let b = Bindings::new().with_param("a", 1.0);
    let err = evaluate_str::<f64>("besselj(0,a*x)*sin(b*x)", &b, &opts()).unwrap_err();
    assert!(err.is_input_error());
}

#[test]
fn sanity_corpus_matches_oracle() {
    let cases = [
        ("exp(-x)", Bindings::new()),
        ("exp(-x^2)", Bindings::new()),
        ("x^(s-1)*(1+x)^(-al)", Bindings::new().with_const("s", rat(3, 4)).with_const("al", rat(5, 2))),
        ("x*exp(-c*x) + exp(-x^2)", Bindings::new().with_param("c", 2.0)),
    ];
    for (text, b) in cases {
        let integrands = parse_integrands(text).unwrap();
        let r = verify::<f64>(&integrands, &b, 1e-8, &opts()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass, "{text}: {r:?}");
    }
}

#[test]
fn single_precision_pipeline() {
    let b = Bindings::new().with_param("a", 1.0).with_param("b", 2.0);
    let o = EvalOptions { tol: 1e-6, ..opts() };
    let v = evaluate_str::<f32>("besselj(0,a*x)*sin(b*x)", &b, &o).unwrap().value;
    assert!((v - 1.0 / 3f32.sqrt()).abs() < 1e-5, "{v}");
}

#[test]
fn cosine_and_bessel_against_exponential() {
    // ∫ cos(b x) e^{-x} = 1/(1+b²)
    let b = Bindings::new().with_param("b", 0.5);
    let v = evaluate_str::<f64>("cos(b*x)*exp(-x)", &b, &opts()).unwrap().value;
    assert!((v - 1.0 / 1.25).abs() < 1e-12, "{v}");
    // ∫ J_0(a x) e^{-x} = 1/√(1+a²)
    let b = Bindings::new().with_param("a", 0.5);
    let v = evaluate_str::<f64>("besselj(0,a*x)*exp(-x)", &b, &opts()).unwrap().value;
    assert!((v - 1.0 / 1.25f64.sqrt()).abs() < 1e-12, "{v}");
}

#[test]
fn slow_convergence_near_the_boundary() {
    let b = Bindings::new().with_param("a", 0.99).with_param("b", 1.0);
    let v = evaluate_str::<f64>("besselj(0,a*x)*sin(b*x)", &b, &opts()).unwrap().value;
    let want = 1.0 / (1.0 - 0.99f64 * 0.99).sqrt();
    assert!((v - want).abs() <= 1e-11 * want, "{v} vs {want}");
}

#[test]
fn boundary_exhausts_the_term_budget_quickly() {
    let b = Bindings::new().with_param("a", 1.0).with_param("b", 1.0);
    let start = std::time::Instant::now();
    let err = evaluate_str::<f64>("besselj(0,a*x)*sin(b*x)", &b, &opts()).unwrap_err();
    assert!(
        matches!(err, bracketeer::Error::Numeric(bracketeer::numeric::NumericError::DidNotConverge { .. })),
        "{err:?}"
    );
    assert!(start.elapsed() < std::time::Duration::from_secs(20));
}
