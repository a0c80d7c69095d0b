//! Flows on the sphere as two planar charts related by `w = 1/z`.
//!
//! The north chart is the plane itself with `z = x1 + i·x2`. The south
//! chart uses `w = 1/z`, so `x1 = w1/ρ`, `x2 = -w2/ρ` with `ρ = |w|²`.
//! Both charts are written in the variables `x1`, `x2` of their own plane.

use std::f64::consts::TAU;

use crate::analysis::{analyze_plane, PlaneAnalysis};
use crate::equilibria::Equilibrium;
use crate::error::{Chart, Error, Result};
use crate::field::{dist, norm, Point, ScalarField, VectorField};
use crate::levelset::{Domain, OpenCurve, Ring};
use crate::poly::Poly;
use crate::ring_index::RingReport;
use crate::tolerance::Tolerances;

/// Relative size of the remainder accepted when cancelling `ρ` factors.
const DIVISION_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ChartFlow {
    pub f: ScalarField,
    pub e: VectorField,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SphereFlow {
    pub north: ChartFlow,
    pub south: ChartFlow,
    /// Features with chart norm up to this belong to the chart that sees
    /// them there.
    pub dedup_radius: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogRing {
    pub chart: Chart,
    pub ring: Ring,
    pub report: RingReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalogZero {
    pub chart: Chart,
    pub zero: Equilibrium,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SphereCatalog {
    pub rings: Vec<CatalogRing>,
    pub zeros: Vec<CatalogZero>,
    /// Failures of individual features, tagged with their chart.
    pub failures: Vec<Error>,
    pub warnings: Vec<String>,
}

/// `(a + ib)·(c + id)`.
fn cmul(a: [f64; 2], b: [f64; 2]) -> [f64; 2] {
    [a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0]]
}

/// `1/z`, which is also the south coordinate of the north point `z`.
pub fn invert(z: Point) -> Point {
    let r = z[0] * z[0] + z[1] * z[1];
    [z[0] / r, -z[1] / r]
}

fn to_poly(e: &crate::expr::Expr, what: &str) -> Result<Poly> {
    Poly::from_expr(e).map_err(|reason| Error::NotCompactifiable(format!("{what}: {reason}")))
}

fn cancel_rho(mut p: Poly) -> Poly {
    while let Some(q) = p.div_rho(DIVISION_TOL) {
        p = q;
    }
    p
}

fn cancel_rho_pair(mut a: Poly, mut b: Poly) -> (Poly, Poly) {
    loop {
        match (a.div_rho(DIVISION_TOL), b.div_rho(DIVISION_TOL)) {
            (Some(qa), Some(qb)) => (a, b) = (qa, qb),
            (Some(qa), None) if b.is_zero() => a = qa,
            (None, Some(qb)) if a.is_zero() => b = qb,
            _ => return (a, b),
        }
    }
}

/// Builds the south chart of a polynomial planar flow.
///
/// With `G = JE` read as a complex function, the south flow is
/// `-w²·G(1/w)` times a power of `ρ` that clears the poles, and the south
/// multiplier is `f(1/w)` times a power of `ρ`. Both factors are positive,
/// so zero sets, signs and flow directions carry over.
pub fn compactify(f: &ScalarField, e: &VectorField, tol: &Tolerances) -> Result<SphereFlow> {
    let sign = if f.sign_flip { -1.0 } else { 1.0 };
    let fp = to_poly(&f.expr, "f")?.scale(sign);
    let e1 = to_poly(&e.e1, "E1")?;
    let e2 = to_poly(&e.e2, "E2")?;

    let fs = cancel_rho(fp.inverted(fp.degree()));

    // G = (-E2, E1)
    let (g1, g2) = (e2.scale(-1.0), e1);
    let k = g1.degree().max(g2.degree());
    let (p, q) = (g1.inverted(k), g2.inverted(k));
    // -w² = -(w1² - w2²) - i·2 w1 w2
    let a = Poly::monomial(-1.0, 2, 0).add(&Poly::monomial(1.0, 0, 2));
    let b = Poly::monomial(-2.0, 1, 1);
    let re = a.mul(&p).sub(&b.mul(&q));
    let im = a.mul(&q).add(&b.mul(&p));
    let (gs1, gs2) = cancel_rho_pair(re.cleaned(DIVISION_TOL), im.cleaned(DIVISION_TOL));

    let f0 = fs.coeff(0, 0);
    let grad0 = norm([fs.coeff(1, 0), fs.coeff(0, 1)]);
    if f0.abs() <= DIVISION_TOL * fs.max_coeff() && grad0 <= tol.eps_regular * fs.max_coeff() {
        return Err(Error::SouthPoleDegenerate);
    }

    Ok(SphereFlow {
        north: ChartFlow { f: f.clone(), e: e.clone() },
        south: ChartFlow {
            f: ScalarField::new(fs.to_expr()),
            // E_s = (G_s2, -G_s1) so that J E_s = G_s
            e: VectorField::new(gs2.to_expr(), gs1.scale(-1.0).to_expr()),
        },
        dedup_radius: 1.0,
    })
}

/// Radii of the overlap circles in the north chart.
pub const OVERLAP_RADII: [f64; 4] = [0.6, 0.9, 1.3, 1.8];
const OVERLAP_ANGLES: usize = 16;

/// Checks that both charts describe the same flow on the overlap annulus:
/// equal signs of the multiplier and positively parallel flow directions.
pub fn check_overlap(sf: &SphereFlow) -> Result<()> {
    struct Sample {
        radius: f64,
        fn_: f64,
        fs: f64,
        pushed: [f64; 2],
        gs: [f64; 2],
    }
    let mut samples = Vec::new();
    for &radius in &OVERLAP_RADII {
        for k in 0..OVERLAP_ANGLES {
            let t = TAU * (k as f64 + 0.37) / OVERLAP_ANGLES as f64;
            let z = [radius * t.cos(), radius * t.sin()];
            let w = invert(z);
            let fn_ = sf.north.f.eval(z).map_err(|s| Error::eval(z)(s).in_chart(Chart::North))?;
            let gn = sf.north.e.je(z).map_err(|s| Error::eval(z)(s).in_chart(Chart::North))?;
            let fs = sf.south.f.eval(w).map_err(|s| Error::eval(w)(s).in_chart(Chart::South))?;
            let gs = sf.south.e.je(w).map_err(|s| Error::eval(w)(s).in_chart(Chart::South))?;
            // dw/dt = -w²·dz/dt
            let w2 = cmul(w, w);
            let pushed = cmul([-w2[0], -w2[1]], gn);
            samples.push(Sample { radius, fn_, fs, pushed, gs });
        }
    }
    let max_of = |g: &dyn Fn(&Sample) -> f64| samples.iter().map(g).fold(0.0, f64::max);
    let (sn, ss) = (max_of(&|s| s.fn_.abs()), max_of(&|s| s.fs.abs()));
    let (pn, ps) = (max_of(&|s| norm(s.pushed)), max_of(&|s| norm(s.gs)));
    for s in &samples {
        let mismatch = |reason: String| Err(Error::OverlapMismatch { radius: s.radius, reason });
        let f_small = s.fn_.abs() <= 1e-9 * sn || s.fs.abs() <= 1e-9 * ss;
        if !f_small && s.fn_.signum() != s.fs.signum() {
            return mismatch(format!("multiplier signs differ ({:.3e} vs {:.3e})", s.fn_, s.fs));
        }
        let (a, b) = (norm(s.pushed), norm(s.gs));
        let (a_small, b_small) = (a <= 1e-12 * pn, b <= 1e-12 * ps);
        if a_small || b_small {
            if a_small != b_small {
                return mismatch("flow vanishes in one chart only".into());
            }
            continue;
        }
        let cross = s.pushed[0] * s.gs[1] - s.pushed[1] * s.gs[0];
        let dot = s.pushed[0] * s.gs[0] + s.pushed[1] * s.gs[1];
        if cross.abs() > 1e-6 * a * b || dot <= 0.0 {
            return mismatch("flow directions are not positively parallel".into());
        }
    }
    Ok(())
}

fn error_position(err: &Error) -> Option<Point> {
    match err {
        Error::Eval { at, .. }
        | Error::ZeroOnRing { at }
        | Error::ZeroOnCircle { at }
        | Error::AmbiguousRadius { at }
        | Error::MarginalLinearization { at } => Some(*at),
        Error::InChart { source, .. } | Error::AtSample { source, .. } => error_position(source),
        _ => None,
    }
}

/// Whether a point of the given chart is attributed to that chart.
fn owns(chart: Chart, p: Point, radius: f64) -> bool {
    match chart {
        Chart::North => norm(p) <= radius + 1e-9,
        Chart::South => norm(p) < radius,
    }
}

fn ring_owned(chart: Chart, ring: &Ring, radius: f64) -> bool {
    match chart {
        Chart::North => ring.vertices.iter().any(|p| norm(*p) <= radius),
        Chart::South => ring.vertices.iter().all(|p| norm(*p) < radius),
    }
}

fn curve_min_norm(c: &OpenCurve) -> f64 {
    c.vertices.iter().map(|p| norm(*p)).fold(f64::INFINITY, f64::min)
}

/// Analyzes both charts and merges their features, each counted once.
pub fn analyze_sphere(sf: &SphereFlow, dom: &Domain, tol: &Tolerances) -> Result<SphereCatalog> {
    check_overlap(sf)?;
    let (north, south) = rayon::join(
        || analyze_plane(&sf.north.f, &sf.north.e, dom, tol),
        || analyze_plane(&sf.south.f, &sf.south.e, dom, tol),
    );
    let north = north.map_err(|e| e.in_chart(Chart::North))?;
    let south = south.map_err(|e| e.in_chart(Chart::South))?;
    let radius = sf.dedup_radius;

    let mut catalog = SphereCatalog::default();
    for (chart, analysis) in [(Chart::North, &north), (Chart::South, &south)] {
        merge_chart(&mut catalog, chart, analysis, radius);
    }

    // Open curves: the north chart must close everything it owns; a south
    // curve is fine where its points are seen on a ring kept by the north.
    for c in &north.level_set.open_curves {
        if curve_min_norm(c) <= radius {
            let at = *c.vertices.iter().min_by(|a, b| norm(**a).total_cmp(&norm(**b))).unwrap();
            return Err(Error::UncoveredComponent { at }.in_chart(Chart::North));
        }
    }
    let north_rings: Vec<&Ring> =
        catalog.rings.iter().filter(|r| r.chart == Chart::North).map(|r| &r.ring).collect();
    let reach = 2.0 * dom.dx().hypot(dom.dy());
    for c in &south.level_set.open_curves {
        for w in c.vertices.iter().filter(|w| norm(**w) < radius) {
            let covered = norm(*w) > 0.0 && {
                let z = invert(*w);
                dom.contains(z) && north_rings.iter().any(|r| r.distance_to(z) <= reach)
            };
            if !covered {
                return Err(Error::UncoveredComponent { at: *w }.in_chart(Chart::South));
            }
        }
    }
    Ok(catalog)
}

fn merge_chart(catalog: &mut SphereCatalog, chart: Chart, analysis: &PlaneAnalysis, radius: f64) {
    for entry in &analysis.rings {
        if !ring_owned(chart, &entry.ring, radius) {
            continue;
        }
        match &entry.report {
            Ok(report) => catalog.rings.push(CatalogRing { chart, ring: entry.ring.clone(), report: report.clone() }),
            Err(err) => catalog.failures.push(err.clone().in_chart(chart)),
        }
    }
    for z in &analysis.zeros {
        if owns(chart, z.position, radius) {
            catalog.zeros.push(CatalogZero { chart, zero: z.clone() });
        }
    }
    for err in &analysis.zero_failures {
        if error_position(err).is_none_or(|p| owns(chart, p, radius)) {
            catalog.failures.push(err.clone().in_chart(chart));
        }
    }
    for w in &analysis.warnings {
        catalog.warnings.push(format!("{} chart: {w}", chart.name()));
    }
}

/// Position of a catalog point in the north chart, `None` for the south pole.
pub fn north_position(chart: Chart, p: Point) -> Option<Point> {
    match chart {
        Chart::North => Some(p),
        Chart::South if norm(p) == 0.0 => None,
        Chart::South => Some(invert(p)),
    }
}

/// Distance between two catalog points, measured in the north chart.
pub fn same_point(a: (Chart, Point), b: (Chart, Point), eps: f64) -> bool {
    match (north_position(a.0, a.1), north_position(b.0, b.1)) {
        (Some(p), Some(q)) => dist(p, q) <= eps,
        (None, None) => true,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equilibria::ZeroKind;
    use crate::poly::Poly;
    use crate::ring_index::RingClass;

    fn flow(f: &str, e1: &str, e2: &str) -> SphereFlow {
        let f = ScalarField::parse(f).unwrap();
        let e = VectorField::parse(e1, e2).unwrap();
        compactify(&f, &e, &Tolerances::default()).unwrap()
    }

    fn catalog(f: &str, e1: &str, e2: &str) -> SphereCatalog {
        analyze_sphere(&flow(f, e1, e2), &Domain::square(2.0, 128), &Tolerances::default()).unwrap()
    }

    fn kinds(c: &SphereCatalog) -> Vec<(Chart, ZeroKind)> {
        c.zeros.iter().map(|z| (z.chart, z.zero.kind)).collect()
    }

    #[test]
    fn unit_circle_south_chart() {
        let sf = flow("x1^2 + x2^2 - 1", "-x2", "x1");
        assert_eq!(Poly::from_expr(&sf.south.f.expr).unwrap(), Poly::from_expr(&crate::expr::parse("1 - x1^2 - x2^2").unwrap()).unwrap());
        // south flow J E_s = (w1, w2)
        let p = [0.3, -0.2];
        let g = sf.south.e.je(p).unwrap();
        assert!(dist(g, p) < 1e-14);
    }

    #[test]
    fn rejects_transcendental_fields() {
        let f = ScalarField::parse("1").unwrap();
        let e = VectorField::parse("sin(x1)", "x2").unwrap();
        let err = compactify(&f, &e, &Tolerances::default()).unwrap_err();
        assert_eq!(err.kind(), "NotCompactifiable");
    }

    #[test]
    fn degenerate_south_pole() {
        let f = ScalarField::parse("x1*x2").unwrap();
        let e = VectorField::parse("-x2", "x1").unwrap();
        assert_eq!(compactify(&f, &e, &Tolerances::default()).unwrap_err(), Error::SouthPoleDegenerate);
    }

    #[test]
    fn overlap_holds_for_compactified_flows() {
        for (f, e1, e2) in [("x1^2 + x2^2 - 1", "-x2", "x1"), ("1", "x1^2 - x2", "x1*x2 + 1"), ("x1^2 + x2^2 - x2 - 2", "x2", "x1^3")] {
            check_overlap(&flow(f, e1, e2)).unwrap();
        }
    }

    #[test]
    fn overlap_detects_reversed_south_flow() {
        let mut sf = flow("x1^2 + x2^2 - 1", "-x2", "x1");
        sf.south.e = sf.south.e.negated();
        assert_eq!(check_overlap(&sf).unwrap_err().kind(), "OverlapMismatch");
        let mut sf = flow("x1^2 + x2^2 - 1", "-x2", "x1");
        sf.south.f = sf.south.f.flipped();
        assert_eq!(check_overlap(&sf).unwrap_err().kind(), "OverlapMismatch");
    }

    #[test]
    fn annihilation_ring_catalog() {
        let c = catalog("x1^2 + x2^2 - 1", "-x2", "x1");
        assert!(c.failures.is_empty());
        assert_eq!(c.rings.len(), 1);
        assert_eq!((c.rings[0].chart, c.rings[0].report.classification), (Chart::North, RingClass::Annihilation));
        assert_eq!(kinds(&c), vec![(Chart::North, ZeroKind::Source), (Chart::South, ZeroKind::Source)]);
    }

    #[test]
    fn creation_ring_catalog() {
        let c = catalog("x1^2 + x2^2 - 1", "x2", "-x1");
        assert_eq!(c.rings[0].report.classification, RingClass::Creation);
        assert_eq!(kinds(&c), vec![(Chart::North, ZeroKind::Sink), (Chart::South, ZeroKind::Sink)]);
    }

    #[test]
    fn plain_sink_catalog() {
        let c = catalog("1", "-x2", "x1");
        assert!(c.rings.is_empty());
        assert_eq!(kinds(&c), vec![(Chart::North, ZeroKind::Sink), (Chart::South, ZeroKind::Source)]);
    }

    #[test]
    fn large_ring_is_attributed_to_the_south_chart() {
        let c = catalog("x1^2 + x2^2 - 2.25", "-x2", "x1");
        assert_eq!(c.rings.len(), 1);
        assert_eq!(c.rings[0].chart, Chart::South);
        // the south chart sees the ring at radius 2/3 with the same dynamics
        assert_eq!(c.rings[0].report.classification, RingClass::Annihilation);
    }

    #[test]
    fn zeros_outside_the_unit_disc_come_from_the_south_chart() {
        // zeros at ±1.5 on the real axis and at infinity
        let c = catalog("1", "x2", "x1^2 - 2.25");
        let charts: Vec<Chart> = c.zeros.iter().map(|z| z.chart).collect();
        assert_eq!(charts.iter().filter(|c| **c == Chart::North).count(), 0);
        assert_eq!(c.zeros.len(), 3);
    }

    #[test]
    fn line_through_infinity_is_uncovered() {
        let sf = flow("x1", "-x2", "x1");
        let err = analyze_sphere(&sf, &Domain::square(2.0, 64), &Tolerances::default()).unwrap_err();
        assert_eq!(err.kind(), "UncoveredComponent");
    }
}
