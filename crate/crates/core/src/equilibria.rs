//! Isolated zeros of `E` and their type under the flow `ẋ = JE/f`.

use std::f64::consts::{FRAC_PI_2, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{dist, norm, Point, ScalarField, VectorField};
use crate::levelset::{Domain, Ring};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ZeroKind {
    Source,
    Sink,
    Other,
}

impl ZeroKind {
    pub fn name(self) -> &'static str {
        match self {
            ZeroKind::Source => "Source",
            ZeroKind::Sink => "Sink",
            ZeroKind::Other => "Other",
        }
    }

    /// The kind under `f → -f`.
    pub fn reversed(self) -> Self {
        match self {
            ZeroKind::Source => ZeroKind::Sink,
            ZeroKind::Sink => ZeroKind::Source,
            ZeroKind::Other => ZeroKind::Other,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    pub position: Point,
    pub poincare_index: i64,
    pub kind: ZeroKind,
    pub f_value: f64,
}

/// Zeros of `E` found in the domain, plus the seeds that did not converge.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ZeroSearch {
    pub zeros: Vec<Point>,
    /// Seeds (cell centres) whose Newton iteration failed.
    pub diverged: Vec<Point>,
}

const MAX_NEWTON: usize = 200;

fn newton(e: &VectorField, mut p: Point, dom: &Domain, eps_zero: f64) -> Option<Point> {
    let margin = 2.0 * dom.dx().max(dom.dy());
    let mut r = e.eval(p).ok()?;
    for _ in 0..MAX_NEWTON {
        if r == [0.0, 0.0] {
            return Some(p);
        }
        let [[a, b], [c, d]] = e.jacobian(p).ok()?;
        let det = a * d - b * c;
        if det == 0.0 || !det.is_finite() {
            break;
        }
        let step = [(d * r[0] - b * r[1]) / det, (a * r[1] - c * r[0]) / det];
        let mut lambda = 1.0;
        let mut accepted = None;
        for _ in 0..30 {
            let q = [p[0] - lambda * step[0], p[1] - lambda * step[1]];
            if let Ok(rq) = e.eval(q) {
                if norm(rq) < norm(r) {
                    accepted = Some((q, rq));
                    break;
                }
            }
            lambda *= 0.5;
        }
        // keep polishing past the threshold until the step stalls, so that
        // seeds around a degenerate zero land on the same point
        let Some((q, rq)) = accepted else { break };
        if q[0] < dom.xmin - margin || q[0] > dom.xmax + margin || q[1] < dom.ymin - margin || q[1] > dom.ymax + margin {
            return None;
        }
        let moved = dist(p, q);
        p = q;
        r = rq;
        if norm(r) < eps_zero && moved <= 1e-14 * (1.0 + norm(p)) {
            break;
        }
    }
    (norm(r) < eps_zero).then_some(p)
}

/// Newton-polished zeros of `E`, seeded from every grid cell on which both
/// components change sign.
pub fn find_zeros(e: &VectorField, dom: &Domain, tol: &Tolerances) -> Result<ZeroSearch> {
    dom.validate()?;
    let n = dom.grid_n;
    let rows: Vec<Vec<Option<[f64; 2]>>> = (0..=n)
        .into_par_iter()
        .map(|j| (0..=n).map(|i| e.eval(dom.node(i, j)).ok()).collect())
        .collect();

    let mut seeds = Vec::new();
    for j in 0..n {
        for i in 0..n {
            let corners = [rows[j][i], rows[j][i + 1], rows[j + 1][i], rows[j + 1][i + 1]];
            let Some(vals) = corners.iter().copied().collect::<Option<Vec<_>>>() else {
                continue;
            };
            let straddles = |k: usize| {
                let lo = vals.iter().map(|v| v[k]).fold(f64::INFINITY, f64::min);
                let hi = vals.iter().map(|v| v[k]).fold(f64::NEG_INFINITY, f64::max);
                lo <= 0.0 && hi >= 0.0
            };
            if straddles(0) && straddles(1) {
                let a = dom.node(i, j);
                seeds.push([a[0] + 0.5 * dom.dx(), a[1] + 0.5 * dom.dy()]);
            }
        }
    }

    let results: Vec<(Point, Option<Point>)> =
        seeds.par_iter().map(|s| (*s, newton(e, *s, dom, tol.eps_zero))).collect();
    let mut out = ZeroSearch::default();
    for (seed, res) in results {
        match res {
            Some(z) if dom.contains(z) => {
                if !out.zeros.iter().any(|q| dist(*q, z) <= tol.merge_radius) {
                    out.zeros.push(z);
                }
            }
            Some(_) => {}
            None => out.diverged.push(seed),
        }
    }
    Ok(out)
}

fn circle_winding(e: &VectorField, z: Point, radius: f64, samples: usize) -> Result<i64> {
    let mut values = Vec::with_capacity(samples);
    for k in 0..samples {
        let t = TAU * k as f64 / samples as f64;
        let p = [z[0] + radius * t.cos(), z[1] + radius * t.sin()];
        values.push((p, e.eval(p).map_err(Error::eval(p))?));
    }
    let max_e = values.iter().map(|(_, v)| norm(*v)).fold(0.0, f64::max);
    let mut acc = 0.0;
    for k in 0..samples {
        let (p, a) = values[k];
        let (_, b) = values[(k + 1) % samples];
        if max_e == 0.0 || norm(a) <= 1e-12 * max_e {
            return Err(Error::ZeroOnCircle { at: p });
        }
        let mut d = b[1].atan2(b[0]) - a[1].atan2(a[0]);
        d -= TAU * (d / TAU).round();
        if d.abs() >= FRAC_PI_2 {
            return Err(Error::ZeroOnCircle { at: p });
        }
        acc += d;
    }
    Ok((acc / TAU).round() as i64)
}

/// Winding number of `E` around the circle of the given radius about `z`.
/// The index of `JE/f` is the same, since rotation by `J` and the sign of
/// `f` do not change a planar index.
pub fn poincare_index(e: &VectorField, z: Point, radius: f64) -> Result<i64> {
    const SAMPLES: usize = 4096;
    let full = circle_winding(e, z, radius, SAMPLES)?;
    let half = circle_winding(e, z, 0.5 * radius, SAMPLES)?;
    if full != half {
        return Err(Error::AmbiguousRadius { at: z });
    }
    Ok(full)
}

/// Source or sink from the linearization `D(JE)(z)/f(z)` of the flow.
pub fn classify_zero(f: &ScalarField, e: &VectorField, z: Point, tol: &Tolerances) -> Result<ZeroKind> {
    let fz = f.eval(z).map_err(Error::eval(z))?;
    if fz == 0.0 {
        return Err(Error::ZeroOnRing { at: z });
    }
    let [[a, b], [c, d]] = e.je_jacobian(z).map_err(Error::eval(z))?;
    let (a, b, c, d) = (a / fz, b / fz, c / fz, d / fz);
    let scale = (a * a + b * b + c * c + d * d).sqrt();
    let eps = tol.eps_eig * scale;
    let tr = a + d;
    let det = a * d - b * c;
    let disc = tr * tr - 4.0 * det;
    let (re1, re2) = if disc >= 0.0 {
        let r = disc.sqrt();
        (0.5 * (tr - r), 0.5 * (tr + r))
    } else {
        (0.5 * tr, 0.5 * tr)
    };
    if re1.abs() <= eps || re2.abs() <= eps {
        return Err(Error::MarginalLinearization { at: z });
    }
    Ok(if re1 > 0.0 && re2 > 0.0 {
        ZeroKind::Source
    } else if re1 < 0.0 && re2 < 0.0 {
        ZeroKind::Sink
    } else {
        ZeroKind::Other
    })
}

/// Radius for the index circle around `z`: well inside the gap to the other
/// zeros and to the rings.
pub fn index_radius(z: Point, others: &[Point], rings: &[Ring], dom: &Domain) -> f64 {
    let mut r = 0.05 * dom.diagonal();
    for q in others {
        let d = dist(*q, z);
        if d > 0.0 {
            r = r.min(0.25 * d);
        }
    }
    for ring in rings {
        r = r.min(0.5 * ring.distance_to(z));
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn zeros(e1: &str, e2: &str) -> Vec<Point> {
        let e = VectorField::parse(e1, e2).unwrap();
        find_zeros(&e, &Domain::square(2.0, 64), &tol()).unwrap().zeros
    }

    #[test]
    fn rotation_field_has_one_zero() {
        let z = zeros("-x2", "x1");
        assert_eq!(z.len(), 1);
        assert!(norm(z[0]) < 1e-12);
    }

    #[test]
    fn shifted_rotation_zero() {
        let z = zeros("x2 + 0.1", "-x1");
        assert_eq!(z.len(), 1);
        assert!(dist(z[0], [0.0, -0.1]) < 1e-10);
    }

    #[test]
    fn constant_field_has_no_zero() {
        assert!(zeros("1", "0").is_empty());
    }

    #[test]
    fn several_zeros_are_separated() {
        // zeros at (±1, 0) and (0, ±1)... of (x1² - 1, x2) only (±1, 0)
        let mut z = zeros("x1^2 - 1", "x2");
        z.sort_by(|a, b| a[0].total_cmp(&b[0]));
        assert_eq!(z.len(), 2);
        assert!(dist(z[0], [-1.0, 0.0]) < 1e-10 && dist(z[1], [1.0, 0.0]) < 1e-10);
    }

    #[test]
    fn indices() {
        let e = VectorField::parse("-x2", "x1").unwrap();
        assert_eq!(poincare_index(&e, [0.0, 0.0], 0.5).unwrap(), 1);
        let saddle = VectorField::parse("x1", "-x2").unwrap();
        assert_eq!(poincare_index(&saddle, [0.0, 0.0], 0.5).unwrap(), -1);
        let square = VectorField::parse("x1^2 - x2^2", "2*x1*x2").unwrap();
        assert_eq!(poincare_index(&square, [0.0, 0.0], 0.5).unwrap(), 2);
    }

    #[test]
    fn circle_through_zero() {
        let e = VectorField::parse("x1 - 0.5", "x2").unwrap();
        assert_eq!(poincare_index(&e, [0.0, 0.0], 0.5).unwrap_err().kind(), "ZeroOnCircle");
    }

    #[test]
    fn radius_enclosing_a_second_zero_is_ambiguous() {
        let e = VectorField::parse("x1^2 - 0.25", "x2").unwrap();
        let r = poincare_index(&e, [0.5, 0.0], 1.5);
        assert_eq!(r.unwrap_err().kind(), "AmbiguousRadius");
    }

    #[test]
    fn classification() {
        let em = VectorField::parse("-x2", "x1").unwrap();
        let ep = VectorField::parse("x2", "-x1").unwrap();
        let pos = ScalarField::parse("x1^2 + x2^2 + 1").unwrap();
        let ring = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
        let o = [0.0, 0.0];
        assert_eq!(classify_zero(&pos, &em, o, &tol()).unwrap(), ZeroKind::Sink);
        assert_eq!(classify_zero(&ring, &ep, o, &tol()).unwrap(), ZeroKind::Sink);
        assert_eq!(classify_zero(&ring, &em, o, &tol()).unwrap(), ZeroKind::Source);
        // JE = (x1, -x2)
        let saddle = VectorField::parse("x2", "x1").unwrap();
        let one = ScalarField::parse("1").unwrap();
        assert_eq!(classify_zero(&one, &saddle, o, &tol()).unwrap(), ZeroKind::Other);
    }

    #[test]
    fn centre_is_marginal() {
        // JE = (-x2, x1): rotation, purely imaginary eigenvalues
        let e = VectorField::parse("x1", "x2").unwrap();
        let one = ScalarField::parse("1").unwrap();
        let r = classify_zero(&one, &e, [0.0, 0.0], &tol());
        assert_eq!(r.unwrap_err().kind(), "MarginalLinearization");
    }

    #[test]
    fn degenerate_zero_converges() {
        let z = zeros("x1^2 - x2^2", "2*x1*x2");
        assert_eq!(z.len(), 1);
        assert!(norm(z[0]) < 1e-4);
    }
}
