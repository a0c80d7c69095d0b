//! Degeneracy indices as integer combinations of `(S1)` and `(Z1)`.

use std::fmt;
use std::iter::Sum;
use std::ops::{Add, AddAssign, Neg, Sub};

use crate::equilibria::ZeroKind;
use crate::error::{Chart, Error, Result};
use crate::field::Point;
use crate::ring_index::RingClass;
use crate::sphere::{invert, SphereCatalog};

/// `s1·(S1) + z1·(Z1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct IndexSum {
    pub s1: i64,
    pub z1: i64,
}

impl IndexSum {
    pub const ZERO: IndexSum = IndexSum { s1: 0, z1: 0 };
    /// Total index of every degenerate flow on the sphere.
    pub const SPHERE: IndexSum = IndexSum { s1: 2, z1: -1 };

    pub const fn new(s1: i64, z1: i64) -> Self {
        IndexSum { s1, z1 }
    }
}

impl Add for IndexSum {
    type Output = IndexSum;
    fn add(self, o: IndexSum) -> IndexSum {
        IndexSum::new(self.s1 + o.s1, self.z1 + o.z1)
    }
}

impl AddAssign for IndexSum {
    fn add_assign(&mut self, o: IndexSum) {
        *self = *self + o;
    }
}

impl Neg for IndexSum {
    type Output = IndexSum;
    fn neg(self) -> IndexSum {
        IndexSum::new(-self.s1, -self.z1)
    }
}

impl Sub for IndexSum {
    type Output = IndexSum;
    fn sub(self, o: IndexSum) -> IndexSum {
        self + (-o)
    }
}

impl Sum for IndexSum {
    fn sum<I: Iterator<Item = IndexSum>>(iter: I) -> IndexSum {
        iter.fold(IndexSum::ZERO, Add::add)
    }
}

/// `2(S1)-1(Z1)`: both coefficients always written, with their sign.
impl fmt::Display for IndexSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.z1 < 0 { '-' } else { '+' };
        write!(f, "{}(S1){}{}(Z1)", self.s1, sign, self.z1.abs())
    }
}

/// Index of a ring, and a warning when the ring is not robust.
pub fn index_of_ring(class: RingClass) -> (IndexSum, Option<String>) {
    match class {
        RingClass::Annihilation => (IndexSum::new(0, -1), None),
        RingClass::Creation => (IndexSum::new(0, 1), None),
        RingClass::Collapsible(m) => (
            IndexSum::ZERO,
            Some(format!("ring with ring index 0 (m = {m}) is not robust and contributes nothing")),
        ),
    }
}

pub fn index_of_zero(kind: ZeroKind, at: Point) -> Result<IndexSum> {
    match kind {
        ZeroKind::Source => Ok(IndexSum::new(1, 0)),
        ZeroKind::Sink => Ok(IndexSum::new(1, -1)),
        ZeroKind::Other => Err(Error::UnsupportedZeroKind { at }),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PhVerdict {
    pub sum: IndexSum,
    pub holds: bool,
    /// Rings whose innermost enclosed zero has the wrong type: creation
    /// rings should enclose sinks and annihilation rings sources.
    pub enclosure_violations: Vec<String>,
    pub warnings: Vec<String>,
}

/// Sums the indices of all rings and zeros of a complete catalog.
pub fn check_poincare_hopf(catalog: &SphereCatalog) -> Result<PhVerdict> {
    if !catalog.failures.is_empty() {
        let list: Vec<String> = catalog.failures.iter().map(|e| e.to_string()).collect();
        return Err(Error::IncompleteCatalog(list.join("; ")));
    }
    let mut sum = IndexSum::ZERO;
    let mut warnings = catalog.warnings.clone();
    for r in &catalog.rings {
        let (idx, warning) = index_of_ring(r.report.classification);
        sum += idx;
        warnings.extend(warning);
    }
    for z in &catalog.zeros {
        sum += index_of_zero(z.zero.kind, z.zero.position).map_err(|e| e.in_chart(z.chart))?;
    }
    Ok(PhVerdict { sum, holds: sum == IndexSum::SPHERE, enclosure_violations: enclosure_violations(catalog), warnings })
}

/// Position of a catalog point in the given chart; `None` at the pole of
/// the other chart.
fn in_chart(p: Point, from: Chart, to: Chart) -> Option<Point> {
    if from == to {
        Some(p)
    } else if p == [0.0, 0.0] {
        None
    } else {
        Some(invert(p))
    }
}

pub fn enclosure_violations(catalog: &SphereCatalog) -> Vec<String> {
    let mut out = Vec::new();
    for (i, r) in catalog.rings.iter().enumerate() {
        let want = match r.report.classification {
            RingClass::Creation => ZeroKind::Sink,
            RingClass::Annihilation => ZeroKind::Source,
            RingClass::Collapsible(_) => continue,
        };
        // rings of the same chart nested inside this one
        let inner: Vec<_> = catalog
            .rings
            .iter()
            .enumerate()
            .filter(|(j, o)| *j != i && o.chart == r.chart && r.ring.contains(o.ring.vertices[0]))
            .map(|(_, o)| &o.ring)
            .collect();
        for z in &catalog.zeros {
            let Some(p) = in_chart(z.zero.position, z.chart, r.chart) else { continue };
            if r.ring.contains(p) && !inner.iter().any(|o| o.contains(p)) && z.zero.kind != want {
                out.push(format!(
                    "{} ring in the {} chart encloses a {} at ({:.6}, {:.6})",
                    r.report.classification.name(),
                    r.chart.name(),
                    z.zero.kind.name(),
                    p[0],
                    p[1]
                ));
            }
        }
    }
    out
}
