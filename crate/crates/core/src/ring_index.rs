//! Tangency count, ring index and winding number of a field along a ring.
//!
//! Everything here is driven by the sign of `g = ⟨JE, ∇f⟩` along the ring.
//!
//! Orienting a ring may call for `-f` in place of `f`. The flip is applied
//! to the whole system, `(f, E) → (-f, -E)`, which leaves the flow `JE/f`
//! and `g` itself unchanged, so `g` is evaluated on the fields as given.
//! Negating `f` alone would reverse the flow and turn annihilation rings
//! into creation rings.

use std::f64::consts::{FRAC_PI_2, TAU};

use crate::error::{Error, Result};
use crate::field::{dist, dot, norm, rot, Point, ScalarField, VectorField};
use crate::levelset::{extract_level_set, Domain, Ring};
use crate::tolerance::Tolerances;

/// Classification of a ring by its index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RingClass {
    /// Index −1: flow converges onto the ring from both sides.
    Annihilation,
    /// Index +1: flow leaves the ring on both sides.
    Creation,
    /// Index 0 with the given tangency count; not robust under deformation.
    Collapsible(usize),
}

impl RingClass {
    pub fn name(self) -> &'static str {
        match self {
            RingClass::Annihilation => "Annihilation",
            RingClass::Creation => "Creation",
            RingClass::Collapsible(_) => "Collapsible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Tangency {
    /// Number of sign changes of `g` around the ring.
    pub m: usize,
    /// Arc-length positions of the sign changes, increasing, measured from
    /// the ring's first vertex.
    pub points: Vec<f64>,
    /// Sign of `g` when `m = 0`.
    pub uniform_sign: Option<i32>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RingReport {
    pub m: usize,
    pub rind: i32,
    pub winding: i64,
    pub classification: RingClass,
    pub tangency_points: Vec<f64>,
    pub arc_length: f64,
    pub vertex_count: usize,
    pub centroid: Point,
}

/// Arc-length parametrization of a closed polyline.
struct ArcPath<'a> {
    vertices: &'a [Point],
    /// `cum[i]` is the arc length at vertex `i`; `cum[n]` the total.
    cum: Vec<f64>,
}

impl<'a> ArcPath<'a> {
    fn new(vertices: &'a [Point]) -> Self {
        let n = vertices.len();
        let mut cum = Vec::with_capacity(n + 1);
        cum.push(0.0);
        for i in 0..n {
            let last = *cum.last().unwrap();
            cum.push(last + dist(vertices[i], vertices[(i + 1) % n]));
        }
        ArcPath { vertices, cum }
    }

    fn total(&self) -> f64 {
        self.cum[self.vertices.len()]
    }

    /// Point at arc length `s` (taken modulo the total length) on the polyline.
    fn point_at(&self, s: f64) -> Point {
        let n = self.vertices.len();
        let total = self.total();
        let s = s.rem_euclid(total);
        let i = match self.cum.binary_search_by(|c| c.total_cmp(&s)) {
            Ok(i) => i.min(n - 1),
            Err(i) => i.saturating_sub(1).min(n - 1),
        };
        let len = self.cum[i + 1] - self.cum[i];
        let u = if len > 0.0 { (s - self.cum[i]) / len } else { 0.0 };
        let a = self.vertices[i];
        let b = self.vertices[(i + 1) % n];
        [a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1])]
    }
}

/// `g` at the point of the zero set nearest to the polyline at arc length `s`.
fn g_at(f: &ScalarField, e: &VectorField, path: &ArcPath, s: f64) -> Result<f64> {
    let p = crate::levelset::project_to_zero(f, path.point_at(s), 3)?;
    let je = e.je(p).map_err(Error::eval(p))?;
    let gf = f.grad(p).map_err(Error::eval(p))?;
    Ok(dot(je, gf))
}

/// Bisection for the sign change of `g` on `[a, b]`, `g(a)` having sign `sa`.
fn bisect(f: &ScalarField, e: &VectorField, path: &ArcPath, mut a: f64, mut b: f64, sa: f64, tol: f64) -> Result<f64> {
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let gm = g_at(f, e, path, mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if gm.signum() == sa {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// Golden-section minimization of `sign·g` over `[a, b]`.
fn min_signed(f: &ScalarField, e: &VectorField, path: &ArcPath, a: f64, b: f64, sign: f64) -> Result<(f64, f64)> {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut lo, mut hi) = (a, b);
    let mut x1 = hi - phi * (hi - lo);
    let mut x2 = lo + phi * (hi - lo);
    let mut f1 = sign * g_at(f, e, path, x1)?;
    let mut f2 = sign * g_at(f, e, path, x2)?;
    for _ in 0..60 {
        if f1 < 0.0 {
            return Ok((x1, f1));
        }
        if f2 < 0.0 {
            return Ok((x2, f2));
        }
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - phi * (hi - lo);
            f1 = sign * g_at(f, e, path, x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + phi * (hi - lo);
            f2 = sign * g_at(f, e, path, x2)?;
        }
    }
    Ok(if f1 < f2 { (x1, f1) } else { (x2, f2) })
}

fn sign_of(v: f64, zero: f64) -> i32 {
    if v > zero {
        1
    } else if v < -zero {
        -1
    } else {
        0
    }
}

/// Checks `|E|` on the ring against `eps_e · max|E|`.
fn check_nonvanishing(e: &VectorField, ring: &Ring, tol: &Tolerances) -> Result<Vec<[f64; 2]>> {
    let mut values = Vec::with_capacity(ring.len());
    for p in &ring.vertices {
        values.push(e.eval(*p).map_err(Error::eval(*p))?);
    }
    let max_e = values.iter().map(|v| norm(*v)).fold(0.0, f64::max);
    let eps = tol.eps_e * max_e;
    for (p, v) in ring.vertices.iter().zip(&values) {
        if max_e == 0.0 || norm(*v) <= eps {
            return Err(Error::ZeroOnRing { at: *p });
        }
    }
    Ok(values)
}

/// Counts the points where `JE` is tangent to the ring, i.e. sign changes
/// of `⟨JE, ∇f⟩` along the closed arc-length parametrization.
pub fn tangency_count(f: &ScalarField, e: &VectorField, ring: &Ring, tol: &Tolerances) -> Result<Tangency> {
    let n = ring.len();
    let e_values = check_nonvanishing(e, ring, tol)?;
    let path = ArcPath::new(&ring.vertices);
    let total = path.total();
    let loc_tol = 1e-8 * total;

    let mut g = Vec::with_capacity(n);
    let (mut max_je, mut max_grad) = (0.0f64, 0.0f64);
    for (p, ev) in ring.vertices.iter().zip(&e_values) {
        let gf = f.grad(*p).map_err(Error::eval(*p))?;
        max_je = max_je.max(norm(*ev));
        max_grad = max_grad.max(norm(gf));
        g.push(dot(rot(*ev), gf));
    }
    let scale = max_je * max_grad;
    let reducible = g.iter().filter(|v| v.abs() < tol.eps_reducible * scale).count();
    if reducible as f64 >= 0.99 * n as f64 {
        return Err(Error::ReducibleDegeneracy);
    }
    let zero = tol.eps_tangency * scale;
    let signs: Vec<i32> = g.iter().map(|v| sign_of(*v, zero)).collect();

    let nonzero: Vec<usize> = (0..n).filter(|&i| signs[i] != 0).collect();
    let mut points = Vec::new();
    for (k, &i) in nonzero.iter().enumerate() {
        let j = nonzero[(k + 1) % nonzero.len()];
        let (a, mut b) = (path.cum[i], path.cum[j]);
        if b <= a {
            b += total;
        }
        let gap = (j + n - i) % n != 1 && !(nonzero.len() == 1);
        if signs[i] != signs[j] {
            points.push(bisect(f, e, &path, a, b, signs[i] as f64, loc_tol)?);
        } else if gap {
            // zero samples between two equal signs: a touching zero
            let mid = (i + 1) % n;
            return Err(Error::NonSimpleTangency { position: path.cum[mid] });
        }
    }

    // Pairs of sign changes hiding between two samples of equal sign.
    let gmax = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
    for i in 0..n {
        let (prev, next) = ((i + n - 1) % n, (i + 1) % n);
        let s = signs[i];
        if s == 0 || signs[prev] != s || signs[next] != s {
            continue;
        }
        let gi = g[i].abs();
        if !(gi < g[prev].abs() && gi <= g[next].abs() && gi < 0.25 * gmax) {
            continue;
        }
        let a = path.cum[prev];
        let mut b = path.cum[next];
        if b <= a {
            b += total;
        }
        let a = if a > path.cum[i] { a - total } else { a };
        let (xm, vm) = min_signed(f, e, &path, a, b, s as f64)?;
        if vm < 0.0 {
            points.push(bisect(f, e, &path, a, xm, s as f64, loc_tol)?);
            points.push(bisect(f, e, &path, xm, b, -(s as f64), loc_tol)?);
        } else if vm < zero {
            return Err(Error::NonSimpleTangency { position: xm.rem_euclid(total) });
        }
    }

    for p in points.iter_mut() {
        *p = p.rem_euclid(total);
    }
    points.sort_by(f64::total_cmp);
    let uniform_sign = if points.is_empty() { Some(signs[nonzero[0]]) } else { None };
    Ok(Tangency { m: points.len(), points, uniform_sign })
}

/// Ring index: the sign of `g` for rotating fields, 0 otherwise. Both
/// branches are cross-checked against the arc-length quadratures.
pub fn ring_index(f: &ScalarField, e: &VectorField, ring: &Ring, tangency: &Tangency) -> Result<i32> {
    let path = ArcPath::new(&ring.vertices);
    let total = path.total();
    let n = ring.len();

    if tangency.m == 0 {
        let sign = tangency.uniform_sign.expect("uniform sign for m = 0");
        // mean of sign(g) over arc length, and the work integral of E
        let mut mean_sign = 0.0;
        let mut work = 0.0;
        let mut samples = Vec::with_capacity(n);
        for p in &ring.vertices {
            let ev = e.eval(*p).map_err(Error::eval(*p))?;
            let gf = f.grad(*p).map_err(Error::eval(*p))?;
            samples.push((dot(rot(ev), gf), dot(ev, rot(gf))));
        }
        for i in 0..n {
            let len = path.cum[i + 1] - path.cum[i];
            let (ga, wa) = samples[i];
            let (gb, wb) = samples[(i + 1) % n];
            mean_sign += 0.5 * len * (ga.signum() + gb.signum());
            work += 0.5 * len * (wa + wb);
        }
        mean_sign /= total;
        work /= total;
        if (mean_sign - sign as f64).abs() > 1e-9 {
            return Err(Error::CrossCheckMismatch(format!("mean sign {mean_sign} vs pointwise sign {sign}")));
        }
        let by_work = -(work.signum() as i32);
        if by_work != sign {
            return Err(Error::CrossCheckMismatch(format!("work integral {work:e} gives {by_work}, pointwise sign {sign}")));
        }
        return Ok(sign);
    }

    // Sum of the unit indices of the arcs between consecutive tangencies.
    let pts = &tangency.points;
    let m = pts.len();
    let mut sum = 0i32;
    for k in 0..m {
        let a = pts[k];
        let mut b = pts[(k + 1) % m];
        if b <= a {
            b += total;
        }
        sum += g_at(f, e, &path, 0.5 * (a + b))?.signum() as i32;
    }
    if sum != 0 {
        return Err(Error::CrossCheckMismatch(format!("arc indices sum to {sum} with m = {m}")));
    }
    Ok(0)
}

/// Continuous angle of `E` along one counter-clockwise traversal, in turns.
pub fn winding_number(e: &VectorField, ring: &Ring, tol: &Tolerances) -> Result<i64> {
    check_nonvanishing(e, ring, tol)?;
    let path = ArcPath::new(&ring.vertices);
    let total = path.total();
    let mut samples: Vec<Point> = ring.vertices.clone();
    loop {
        let mut angles = Vec::with_capacity(samples.len());
        for p in &samples {
            let v = e.eval(*p).map_err(Error::eval(*p))?;
            if v == [0.0, 0.0] {
                return Err(Error::ZeroOnRing { at: *p });
            }
            angles.push(v[1].atan2(v[0]));
        }
        let n = angles.len();
        let mut acc = 0.0;
        let mut coarse = false;
        for i in 0..n {
            let mut d = angles[(i + 1) % n] - angles[i];
            d -= TAU * (d / TAU).round();
            if d.abs() >= FRAC_PI_2 {
                coarse = true;
                break;
            }
            acc += d;
        }
        if !coarse {
            return Ok((acc / TAU).round() as i64);
        }
        let next = (2 * n).next_power_of_two();
        if n >= 1 << 14 {
            return Err(Error::StepTooCoarse { samples: n });
        }
        let next = next.min(1 << 14);
        samples = (0..next).map(|k| path.point_at(total * k as f64 / next as f64)).collect();
    }
}

pub fn classify_ring(rind: i32, m: usize) -> RingClass {
    match rind {
        -1 => RingClass::Annihilation,
        1 => RingClass::Creation,
        _ => RingClass::Collapsible(m),
    }
}

/// Full per-ring analysis.
pub fn analyze_ring(f: &ScalarField, e: &VectorField, ring: &Ring, tol: &Tolerances) -> Result<RingReport> {
    let tangency = tangency_count(f, e, ring, tol)?;
    let rind = ring_index(f, e, ring, &tangency)?;
    let winding = winding_number(e, ring, tol)?;
    Ok(RingReport {
        m: tangency.m,
        rind,
        winding,
        classification: classify_ring(rind, tangency.m),
        tangency_points: tangency.points,
        arc_length: ring.arc_length,
        vertex_count: ring.len(),
        centroid: ring.centroid(),
    })
}

/// One ring observed at one homotopy sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledRing {
    pub centroid: Point,
    /// `(m, rind)`, or the kind of the failure that prevented them.
    pub outcome: std::result::Result<(usize, i32), String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HomotopySample {
    pub s: f64,
    /// `s` rescaled to `[0, 1]`.
    pub t: f64,
    pub rings: Vec<SampledRing>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityReport {
    pub samples: Vec<HomotopySample>,
    /// Tangency count constant along every tracked ring.
    pub admissible: bool,
    /// Ring index constant along every tracked ring.
    pub rind_constant: bool,
}

/// Samples a one-parameter family `(f_s, E_s)` for `s` in `s_range` and
/// checks that the tangency count of every ring stays constant.
pub fn check_homotopy(
    f_family: &ScalarField,
    e_family: &VectorField,
    dom: &Domain,
    n_samples: usize,
    s_range: (f64, f64),
    tol: &Tolerances,
) -> Result<AdmissibilityReport> {
    let n_samples = n_samples.max(2);
    let (s0, s1) = s_range;
    let mut samples = Vec::with_capacity(n_samples);
    for k in 0..n_samples {
        let t = k as f64 / (n_samples - 1) as f64;
        let s = s0 + t * (s1 - s0);
        let f = f_family.at_param(s);
        let e = e_family.at_param(s);
        let ls = extract_level_set(&f, dom, tol).map_err(|err| err.at_sample(s))?;
        let rings = ls
            .rings
            .iter()
            .map(|r| SampledRing {
                centroid: r.centroid(),
                outcome: tangency_count(&f, &e, r, tol)
                    .and_then(|tg| ring_index(&f, &e, r, &tg).map(|ri| (tg.m, ri)))
                    .map_err(|err| err.kind().to_string()),
            })
            .collect();
        samples.push(HomotopySample { s, t, rings });
    }

    let mut admissible = true;
    let mut rind_constant = true;
    for w in samples.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        let (a, b) = (prev.rings.len(), cur.rings.len());
        if a != b {
            if a != 0 && b != 0 {
                return Err(Error::RingBifurcation { from: a, to: b, s_from: prev.s, s_to: cur.s });
            }
            continue;
        }
        let threshold = match min_pairwise(prev.rings.iter().map(|r| r.centroid)) {
            Some(d) => 0.5 * d,
            None => f64::INFINITY,
        };
        for r in &cur.rings {
            let nearest = prev
                .rings
                .iter()
                .min_by(|x, y| dist(x.centroid, r.centroid).total_cmp(&dist(y.centroid, r.centroid)))
                .filter(|x| dist(x.centroid, r.centroid) <= threshold);
            let Some(matched) = nearest else {
                return Err(Error::RingBifurcation { from: a, to: b, s_from: prev.s, s_to: cur.s });
            };
            match (&matched.outcome, &r.outcome) {
                (Ok((m0, r0)), Ok((m1, r1))) => {
                    admissible &= m0 == m1;
                    rind_constant &= r0 == r1;
                }
                _ => {
                    admissible = false;
                    rind_constant = false;
                }
            }
        }
    }
    // A failed ring in a sample with no neighbour to compare against still
    // leaves m undefined there.
    if samples.iter().any(|s| s.rings.iter().any(|r| r.outcome.is_err())) {
        admissible = false;
        rind_constant = false;
    }
    Ok(AdmissibilityReport { samples, admissible, rind_constant })
}

fn min_pairwise(points: impl Iterator<Item = Point>) -> Option<f64> {
    let pts: Vec<Point> = points.collect();
    let mut best: Option<f64> = None;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = dist(pts[i], pts[j]);
            best = Some(best.map_or(d, |b| b.min(d)));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_ring(n: usize) -> (ScalarField, Ring) {
        let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
        let ls = extract_level_set(&f, &Domain::square(2.0, n), &Tolerances::default()).unwrap();
        (f, ls.rings.into_iter().next().unwrap())
    }

    fn report(e1: &str, e2: &str) -> Result<RingReport> {
        let (f, ring) = unit_ring(256);
        let e = VectorField::parse(e1, e2).unwrap();
        analyze_ring(&f, &e, &ring, &Tolerances::default())
    }

    #[test]
    fn rotation_fields() {
        let r = report("-x2", "x1").unwrap();
        assert_eq!((r.m, r.rind, r.winding), (0, -1, 1));
        assert_eq!(r.classification, RingClass::Annihilation);
        let r = report("x2", "-x1").unwrap();
        assert_eq!((r.m, r.rind, r.winding), (0, 1, 1));
        assert_eq!(r.classification, RingClass::Creation);
    }

    #[test]
    fn constant_field() {
        let r = report("1", "0").unwrap();
        assert_eq!((r.m, r.rind, r.winding), (2, 0, 0));
        assert_eq!(r.classification, RingClass::Collapsible(2));
        // g = 2 x2 vanishes at (±1, 0): arc lengths 0 and π from (1, 0)-ish start
        let (_, ring) = unit_ring(256);
        let start = ring.vertices[0];
        let base = start[1].atan2(start[0]).rem_euclid(TAU);
        let mut want: Vec<f64> = [0.0, std::f64::consts::PI].iter().map(|a| (a - base).rem_euclid(TAU)).collect();
        want.sort_by(f64::total_cmp);
        for (got, w) in r.tangency_points.iter().zip(&want) {
            assert!((got - w).abs() < 1e-3, "{got} vs {w}");
        }
    }

    #[test]
    fn flipped_system_keeps_its_dynamics() {
        // -f with E⁻ reverses the flow of f with E⁻: flow now leaves the ring
        let f = ScalarField::parse("1 - x1^2 - x2^2").unwrap();
        let ls = extract_level_set(&f, &Domain::square(2.0, 128), &Tolerances::default()).unwrap();
        assert!(ls.rings[0].f_sign_flipped);
        let e = VectorField::parse("-x2", "x1").unwrap();
        let r = analyze_ring(&f, &e, &ls.rings[0], &Tolerances::default()).unwrap();
        assert_eq!((r.m, r.rind, r.winding), (0, 1, 1));
        // flipping E as well restores the original system
        let r = analyze_ring(&f, &e.negated(), &ls.rings[0], &Tolerances::default()).unwrap();
        assert_eq!((r.m, r.rind, r.winding), (0, -1, 1));
    }

    #[test]
    fn zero_on_ring() {
        let err = report("x1 - 1", "x2").unwrap_err();
        assert_eq!(err.kind(), "ZeroOnRing");
    }

    #[test]
    fn reducible_degeneracy() {
        // JE = (-x1, x2)·0 + tangent: E = ∇f direction makes JE tangent
        let err = report("x1", "x2").unwrap_err();
        assert_eq!(err.kind(), "ReducibleDegeneracy");
    }

    #[test]
    fn touching_zero_is_non_simple() {
        // E = (1 - x2, x1): g = 2 x2 - 2 on the circle, a double zero at (0, 1)
        let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
        let dom = Domain::new(-2.0, 2.1, -2.0, 2.1, 203).unwrap();
        let ls = extract_level_set(&f, &dom, &Tolerances::default()).unwrap();
        let e = VectorField::parse("1 - x2", "x1").unwrap();
        let r = tangency_count(&f, &e, &ls.rings[0], &Tolerances::default());
        assert!(matches!(r, Err(Error::NonSimpleTangency { .. })), "{r:?}");
    }

    #[test]
    fn hidden_sign_change_pair_is_found() {
        // g = 2 (1 + 1e-6) x2 - 2 is positive only on a tiny arc around (0, 1)
        let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
        let dom = Domain::new(-2.0, 2.1, -2.0, 2.1, 64).unwrap();
        let ls = extract_level_set(&f, &dom, &Tolerances::default()).unwrap();
        let e = VectorField::parse("1.000001 - x2", "x1").unwrap();
        let t = tangency_count(&f, &e, &ls.rings[0], &Tolerances::default()).unwrap();
        assert_eq!(t.m, 2);
        let gap = t.points[1] - t.points[0];
        let arc = gap.min(ls.rings[0].arc_length - gap);
        assert!((arc - 2.0 * (1.0f64 / 1.000001).acos()).abs() < 1e-5, "{arc}");
    }

    #[test]
    fn winding_of_power_fields() {
        let (_, ring) = unit_ring(128);
        let tol = Tolerances::default();
        // E_3 = (-sin 3t, cos 3t) on the circle; polynomial extension
        let e3 = VectorField::parse("-(3*x1^2*x2 - x2^3)", "x1^3 - 3*x1*x2^2").unwrap();
        assert_eq!(winding_number(&e3, &ring, &tol).unwrap(), 3);
        let em3 = VectorField::parse("3*x1^2*x2 - x2^3", "x1^3 - 3*x1*x2^2").unwrap();
        assert_eq!(winding_number(&em3, &ring, &tol).unwrap(), -3);
        let c = VectorField::parse("1", "0").unwrap();
        assert_eq!(winding_number(&c, &ring, &tol).unwrap(), 0);
    }

    #[test]
    fn winding_densifies_coarse_rings() {
        let (_, ring) = unit_ring(16);
        let e = VectorField::parse("cos(8*x1)", "sin(8*x1)").unwrap();
        // E turns +8·x1 radians: out and back, total 0 turns, but large steps
        assert_eq!(winding_number(&e, &ring, &Tolerances::default()).unwrap(), 0);
    }

    #[test]
    fn classification_table() {
        assert_eq!(classify_ring(-1, 0), RingClass::Annihilation);
        assert_eq!(classify_ring(1, 0), RingClass::Creation);
        assert_eq!(classify_ring(0, 4), RingClass::Collapsible(4));
    }
}
