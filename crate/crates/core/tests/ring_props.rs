mod common;

use common::{power_parts, trig_field};
use degindex::expr::Expr;
use degindex::ring_index::Tangency;
use degindex::*;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

fn circle() -> (ScalarField, Ring) {
    let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
    let ls = extract_level_set(&f, &Domain::square(2.0, 128), &Tolerances::default()).unwrap();
    (f, ls.rings.into_iter().next().unwrap())
}

/// `(m, rind, winding, uniform sign)` or the failure kind.
fn analyze(f: &ScalarField, e: &VectorField, ring: &Ring) -> Result<(usize, i32, i64, Option<i32>), &'static str> {
    let tol = Tolerances::default();
    let t: Tangency = tangency_count(f, e, ring, &tol).map_err(|e| e.kind())?;
    let rind = ring_index(f, e, ring, &t).map_err(|e| e.kind())?;
    let w = winding_number(e, ring, &tol).map_err(|e| e.kind())?;
    Ok((t.m, rind, w, t.uniform_sign))
}

/// Dense-sampling oracle for the number of sign changes of ⟨JE, ∇f⟩ on the
/// exact unit circle.
fn dense_sign_changes(e: &VectorField) -> usize {
    let n = 200_000;
    let g = |k: usize| {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        let p = [t.cos(), t.sin()];
        let je = e.je(p).unwrap();
        2.0 * (je[0] * p[0] + je[1] * p[1])
    };
    let first = g(0);
    let mut prev = first;
    let mut count = 0;
    for k in 1..=n {
        let cur = if k == n { first } else { g(k) };
        if cur * prev < 0.0 {
            count += 1;
        }
        if cur != 0.0 {
            prev = cur;
        }
    }
    count
}

#[test]
fn random_trig_fields_have_even_tangency_counts() {
    let (f, ring) = circle();
    let mut rng = StdRng::seed_from_u64(7);
    let (mut analyzed, mut skipped, mut rotating) = (0, 0, 0);
    for _ in 0..50 {
        let (e1, e2) = trig_field(&mut rng, 5);
        let e = VectorField::parse(&e1, &e2).unwrap();
        match analyze(&f, &e, &ring) {
            Ok((m, rind, w, sign)) => {
                analyzed += 1;
                assert_eq!(m % 2, 0);
                assert_eq!(m, dense_sign_changes(&e), "{e1} | {e2}");
                if m == 0 {
                    rotating += 1;
                    assert_eq!(w, 1);
                    assert_eq!(rind, sign.unwrap() * w as i32);
                } else {
                    assert_eq!(rind, 0);
                }
                if w != 1 {
                    assert_eq!(rind, 0);
                }
            }
            Err("NonSimpleTangency") | Err("ZeroOnRing") | Err("ReducibleDegeneracy") => skipped += 1,
            Err(other) => panic!("unexpected {other} for {e1} | {e2}"),
        }
    }
    assert!(skipped < 10, "skipped {skipped}");
    assert!(rotating > 0 && rotating < analyzed);
}

#[test]
fn rotating_fields_share_the_sign_of_the_canonical_field() {
    let (f, ring) = circle();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..40 {
        let (e1, e2) = trig_field(&mut rng, 3);
        let e = VectorField::parse(&e1, &e2).unwrap();
        if let Ok((0, rind, _, _)) = analyze(&f, &e, &ring) {
            for p in &ring.vertices {
                assert_eq!(pairing(&f, &e, *p).unwrap().signum() as i32, rind);
            }
        }
    }
}

#[test]
fn power_fields_tangency_and_winding() {
    let (f, ring) = circle();
    for k in 0..=6u32 {
        let (re, im) = power_parts(k);
        // E_k = (-sin kt, cos kt), E_-k = (sin kt, cos kt)
        let ek = VectorField::new(im.scale(-1.0).to_expr(), re.to_expr());
        let emk = VectorField::new(im.to_expr(), re.to_expr());
        let (m, rind, w, _) = analyze(&f, &ek, &ring).unwrap();
        assert_eq!(w, k as i64);
        let expected = if k == 1 { 0 } else { 2 * (k as usize).abs_diff(1) };
        assert_eq!(m, expected, "E_{k}");
        assert_eq!(rind, if k == 1 { -1 } else { 0 });
        let (m, _, w, _) = analyze(&f, &emk, &ring).unwrap();
        assert_eq!(w, -(k as i64));
        assert_eq!(m, 2 * (k as usize + 1), "E_-{k}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn positive_rescaling_changes_nothing(seed in 0u64..10_000, c in 0.01f64..100.0, cf in 0.01f64..100.0) {
        let (f, ring) = circle();
        let (e1, e2) = trig_field(&mut StdRng::seed_from_u64(seed), 4);
        let e = VectorField::parse(&e1, &e2).unwrap();
        let base = analyze(&f, &e, &ring);
        let fs = ScalarField::new(Expr::num(cf) * (*f.expr).clone());
        let ring_s = extract_level_set(&fs, &Domain::square(2.0, 128), &Tolerances::default()).unwrap().rings.remove(0);
        let scaled = analyze(&fs, &e.scaled(c), &ring_s);
        match (base, scaled) {
            (Ok(a), Ok(b)) => {
                prop_assert_eq!((a.0, a.1, a.2), (b.0, b.1, b.2));
                prop_assert_eq!(classify_ring(a.1, a.0), classify_ring(b.1, b.0));
            }
            (Err(a), Err(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
    }
}

fn family(f: &str, e1: &str, e2: &str, n: usize) -> ring_index::AdmissibilityReport {
    let f = ScalarField::parse(f).unwrap();
    let e = VectorField::parse(e1, e2).unwrap();
    check_homotopy(&f, &e, &Domain::square(2.0, 128), n, (0.0, 1.0), &Tolerances::default()).unwrap()
}

#[test]
fn growing_ring_family_is_admissible() {
    let r = family("x1^2 + x2^2 - (2*s - 1)", "-x2", "x1", 21);
    assert!(r.admissible && r.rind_constant);
    for sample in &r.samples {
        let expected = usize::from(sample.s > 0.5);
        assert_eq!(sample.rings.len(), expected, "s = {}", sample.s);
        for ring in &sample.rings {
            assert_eq!(ring.outcome, Ok((0, -1)));
        }
    }
}

#[test]
fn faster_rotation_family_is_admissible() {
    let r = family("x1^2 + x2^2 - 1", "(1 - s)*(-x2) + s*(-1.2*x2)", "(1 - s)*x1 + s*1.2*x1", 21);
    assert!(r.admissible && r.rind_constant);
    assert!(r.samples.iter().all(|s| s.rings.len() == 1 && s.rings[0].outcome == Ok((0, -1))));
}

#[test]
fn tilting_to_a_constant_field_is_not_admissible() {
    let r = family("x1^2 + x2^2 - 1", "(1 - s)*(-x2) + s", "(1 - s)*x1", 21);
    assert!(!r.admissible);
    assert_eq!(r.samples[0].rings[0].outcome, Ok((0, -1)));
    assert_eq!(r.samples[20].rings[0].outcome, Ok((2, 0)));
    // g = 2(s·x2 - (1 - s)) first vanishes at s = 1/2, where it touches zero
    let first_change = r.samples.iter().find(|s| s.rings[0].outcome != Ok((0, -1))).unwrap();
    assert!((first_change.s - 0.5).abs() < 1e-12);
}

#[test]
fn splitting_ring_is_a_bifurcation() {
    // one ring for s < 0 splitting into two for s > 0
    let f = ScalarField::parse("(x1^2 - 1)^2 + x2^2 - 0.5 - s").unwrap();
    let e = VectorField::parse("-x2", "x1").unwrap();
    let err = check_homotopy(&f, &e, &Domain::square(2.0, 128), 5, (0.4, 0.7), &Tolerances::default()).unwrap_err();
    assert_eq!(err.kind(), "RingBifurcation");
}
