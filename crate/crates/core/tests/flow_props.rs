use degindex::field::{dist, norm};
use degindex::*;
use proptest::prelude::*;

fn unit_ring() -> (ScalarField, VectorField) {
    (ScalarField::parse("x1^2 + x2^2 - 1").unwrap(), VectorField::parse("-x2", "x1").unwrap())
}

/// Composite Simpson rule with `n` (even) panels.
fn simpson(g: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let inner: f64 = (1..n).map(|k| g(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 }).sum();
    h / 3.0 * (g(a) + g(b) + inner)
}

/// Radial travel time to the unit circle: `|dr/dt| = r/|r² - 1|`.
fn hit_time(r0: f64) -> f64 {
    simpson(|r| (r * r - 1.0).abs() / r, r0.min(1.0), r0.max(1.0), 2000)
}

#[test]
fn hit_time_matches_quadrature() {
    let (f, e) = unit_ring();
    let tr = integrate(&f, &e, [2.0, 0.0], 10.0, 1e-9).unwrap();
    assert!(matches!(tr.termination, Termination::RingHit { .. }));
    let want = hit_time(2.0);
    assert!((want - (1.5 - 2f64.ln())).abs() < 1e-9);
    assert!((tr.end().0 - want).abs() < 1e-6);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn every_start_reaches_the_ring(
        r in prop_oneof![1.05f64..3.0, 0.1f64..0.95],
        theta in 0.0f64..std::f64::consts::TAU,
    ) {
        let (f, e) = unit_ring();
        let x0 = [r * theta.cos(), r * theta.sin()];
        let tr = integrate(&f, &e, x0, 20.0, 1e-9).unwrap();
        let Termination::RingHit { at, .. } = tr.termination else {
            return Err(TestCaseError::fail(format!("{:?}", tr.termination)));
        };
        prop_assert!(f.eval(at).unwrap().abs() < 1e-6);
        prop_assert!((tr.end().0 - hit_time(r)).abs() < 1e-5);
        // the flow is radial
        prop_assert!((at[1].atan2(at[0]) - x0[1].atan2(x0[0])).abs() < 1e-6);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reversing_the_field_retraces_the_path(
        a in prop::array::uniform4(-1.0f64..1.0),
        x0 in prop::array::uniform2(-1.0f64..1.0),
    ) {
        let f = ScalarField::parse("1 + 0.5 * x1^2").unwrap();
        let e = VectorField::parse(
            &format!("{} * x1 + {} * x2 + 0.3", a[0], a[1]),
            &format!("{} * x1 + {} * x2 - 0.2", a[2], a[3]),
        ).unwrap();
        let fwd = integrate(&f, &e, x0, 1.0, 1e-10).unwrap();
        prop_assume!(fwd.termination == Termination::TimeLimit);
        let (t, x1) = fwd.end();
        let back = integrate(&f, &e.negated(), x1, t, 1e-10).unwrap();
        prop_assert_eq!(&back.termination, &Termination::TimeLimit);
        let scale = 1.0 + norm(x1);
        prop_assert!(dist(back.end().1, x0) < 1e-6 * scale, "{:?} vs {:?}", back.end().1, x0);
    }
}

#[test]
fn portraits_are_deterministic() {
    let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
    let e = VectorField::parse("x1 - x2", "x1 + x2").unwrap();
    let dom = Domain::square(2.0, 96);
    let opts = PortraitOptions::default();
    let tol = Tolerances::default();
    let a = phase_portrait_svg(&f, &e, &dom, &tol, &opts).unwrap();
    let b = phase_portrait_svg(&f, &e, &dom, &tol, &opts).unwrap();
    assert_eq!(a, b);
    assert!(a.starts_with("<?xml") && a.contains("<svg ") && a.trim_end().ends_with("</svg>"));
    assert!(a.contains("rind="));
}
