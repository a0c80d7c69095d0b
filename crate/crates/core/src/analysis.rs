//! Rings and zeros of one planar chart, analyzed together.

use rayon::prelude::*;

use crate::equilibria::{classify_zero, find_zeros, index_radius, poincare_index, Equilibrium, ZeroKind};
use crate::error::{Error, Result};
use crate::field::{Point, ScalarField, VectorField};
use crate::levelset::{extract_level_set, segment_distance, Domain, LevelSet, Ring};
use crate::ring_index::{analyze_ring, RingReport};
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct RingEntry {
    pub ring: Ring,
    pub report: Result<RingReport>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlaneAnalysis {
    pub level_set: LevelSet,
    pub rings: Vec<RingEntry>,
    pub zeros: Vec<Equilibrium>,
    /// Zeros that were found but could not be indexed or classified.
    pub zero_failures: Vec<Error>,
    pub warnings: Vec<String>,
}

impl PlaneAnalysis {
    /// First failure among rings, then zeros.
    pub fn first_error(&self) -> Option<&Error> {
        self.rings
            .iter()
            .find_map(|r| r.report.as_ref().err())
            .or_else(|| self.zero_failures.first())
    }

    pub fn is_complete(&self) -> bool {
        self.first_error().is_none()
    }

    pub fn ring_reports(&self) -> impl Iterator<Item = (&Ring, &RingReport)> {
        self.rings.iter().filter_map(|r| r.report.as_ref().ok().map(|rep| (&r.ring, rep)))
    }
}

fn distance_to_level_set(ls: &LevelSet, p: Point) -> f64 {
    let rings = ls.rings.iter().map(|r| r.distance_to(p));
    let curves = ls.open_curves.iter().map(|c| {
        c.vertices.windows(2).map(|w| segment_distance(p, w[0], w[1])).fold(f64::INFINITY, f64::min)
    });
    rings.chain(curves).fold(f64::INFINITY, f64::min)
}

/// Analyzes one chart. Level-set failures abort; failures of individual
/// rings or zeros are recorded next to the features that did succeed.
pub fn analyze_plane(f: &ScalarField, e: &VectorField, dom: &Domain, tol: &Tolerances) -> Result<PlaneAnalysis> {
    let level_set = extract_level_set(f, dom, tol)?;
    let rings: Vec<RingEntry> = level_set
        .rings
        .par_iter()
        .map(|ring| RingEntry { ring: ring.clone(), report: analyze_ring(f, e, ring, tol) })
        .collect();

    let search = find_zeros(e, dom, tol)?;
    let mut warnings = Vec::new();
    if !search.diverged.is_empty() {
        warnings.push(format!("Newton iteration failed from {} seed cell(s)", search.diverged.len()));
    }
    let mut zeros = Vec::new();
    let mut zero_failures = Vec::new();
    for z in &search.zeros {
        let z = *z;
        if distance_to_level_set(&level_set, z) < tol.ring_clearance {
            zero_failures.push(Error::ZeroOnRing { at: z });
            continue;
        }
        let f_value = match f.eval(z) {
            Ok(v) => v,
            Err(source) => {
                zero_failures.push(Error::Eval { at: z, source });
                continue;
            }
        };
        let radius = index_radius(z, &search.zeros, &level_set.rings, dom);
        let poincare = match poincare_index(e, z, radius) {
            Ok(i) => i,
            Err(err) => {
                zero_failures.push(err);
                continue;
            }
        };
        let kind = match classify_zero(f, e, z, tol) {
            Ok(k) => k,
            Err(Error::MarginalLinearization { .. }) => {
                warnings.push(format!(
                    "zero at ({:.6}, {:.6}) has a marginal linearization; reported as Other",
                    z[0], z[1]
                ));
                ZeroKind::Other
            }
            Err(err) => {
                zero_failures.push(err);
                continue;
            }
        };
        zeros.push(Equilibrium { position: z, poincare_index: poincare, kind, f_value });
    }
    Ok(PlaneAnalysis { level_set, rings, zeros, zero_failures, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring_index::RingClass;

    fn run(f: &str, e1: &str, e2: &str) -> PlaneAnalysis {
        let f = ScalarField::parse(f).unwrap();
        let e = VectorField::parse(e1, e2).unwrap();
        analyze_plane(&f, &e, &Domain::square(2.0, 128), &Tolerances::default()).unwrap()
    }

    #[test]
    fn annihilation_ring_around_source() {
        let a = run("x1^2 + x2^2 - 1", "-x2", "x1");
        assert!(a.is_complete());
        let reports: Vec<_> = a.ring_reports().collect();
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].1.classification, RingClass::Annihilation);
        assert_eq!(a.zeros.len(), 1);
        assert_eq!(a.zeros[0].kind, ZeroKind::Source);
        assert_eq!(a.zeros[0].poincare_index, 1);
        assert!(a.zeros[0].f_value < 0.0);
    }

    #[test]
    fn plain_sink() {
        let a = run("1", "-x2", "x1");
        assert!(a.rings.is_empty());
        assert_eq!(a.zeros.len(), 1);
        assert_eq!(a.zeros[0].kind, ZeroKind::Sink);
    }

    #[test]
    fn centre_becomes_other_with_warning() {
        let a = run("1", "x1", "x2");
        assert_eq!(a.zeros[0].kind, ZeroKind::Other);
        assert_eq!(a.warnings.len(), 1);
    }

    #[test]
    fn zero_on_ring_is_recorded() {
        let a = run("x1^2 + x2^2 - 1", "x1 - 1", "x2");
        assert!(a.zero_failures.iter().any(|e| e.kind() == "ZeroOnRing"));
        assert_eq!(a.first_error().unwrap().kind(), "ZeroOnRing");
    }
}
