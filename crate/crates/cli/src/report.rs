//! JSON shapes of the command outputs. Field order is the output key order
//! and every float is rounded to 12 significant digits.

use degindex::ring_index::AdmissibilityReport;
use degindex::{
    index_of_ring, index_of_zero, CatalogRing, CatalogZero, Equilibrium, Error, OpenCurve, PhVerdict, PlaneAnalysis,
    Point, RingEntry, Termination, Trajectory,
};
use serde::Serialize;

/// Rounds to 12 significant digits; `-0` becomes `0`.
pub fn sig12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

fn pt(p: Point) -> [f64; 2] {
    [sig12(p[0]), sig12(p[1])]
}

#[derive(Debug, Serialize)]
pub struct ErrorJson {
    pub kind: &'static str,
    pub message: String,
}

impl From<&Error> for ErrorJson {
    fn from(e: &Error) -> Self {
        ErrorJson { kind: e.kind(), message: e.to_string() }
    }
}

fn errors<'a>(list: impl IntoIterator<Item = &'a Error>) -> Vec<ErrorJson> {
    list.into_iter().map(ErrorJson::from).collect()
}

#[derive(Debug, Serialize)]
pub struct RingJson {
    pub vertex_count: usize,
    pub arc_length: f64,
    pub centroid: [f64; 2],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rind: Option<i32>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub winding: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<&'static str>,
    /// Arc-length positions of the tangency points, measured from the
    /// first vertex.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tangency_points: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorJson>,
}

impl From<&RingEntry> for RingJson {
    fn from(entry: &RingEntry) -> Self {
        let ring = &entry.ring;
        let mut out = RingJson {
            vertex_count: ring.vertices.len(),
            arc_length: sig12(ring.arc_length),
            centroid: pt(ring.centroid()),
            m: None,
            rind: None,
            winding: None,
            classification: None,
            tangency_points: None,
            error: None,
        };
        match &entry.report {
            Ok(r) => {
                out.m = Some(r.m);
                out.rind = Some(r.rind);
                out.winding = Some(r.winding);
                out.classification = Some(r.classification.name());
                out.tangency_points = Some(r.tangency_points.iter().map(|t| sig12(*t)).collect());
            }
            Err(e) => out.error = Some(e.into()),
        }
        out
    }
}

#[derive(Debug, Serialize)]
pub struct OpenCurveJson {
    pub vertex_count: usize,
    pub start: [f64; 2],
    pub end: [f64; 2],
}

impl From<&OpenCurve> for OpenCurveJson {
    fn from(c: &OpenCurve) -> Self {
        OpenCurveJson {
            vertex_count: c.vertices.len(),
            start: pt(c.vertices[0]),
            end: pt(*c.vertices.last().unwrap()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct ZeroJson {
    pub position: [f64; 2],
    pub poincare_index: i64,
    pub kind: &'static str,
    pub f_value: f64,
}

impl From<&Equilibrium> for ZeroJson {
    fn from(z: &Equilibrium) -> Self {
        ZeroJson { position: pt(z.position), poincare_index: z.poincare_index, kind: z.kind.name(), f_value: sig12(z.f_value) }
    }
}

#[derive(Debug, Serialize)]
pub struct AnalyzeReport {
    pub rings: Vec<RingJson>,
    pub open_curves: Vec<OpenCurveJson>,
    pub zeros: Vec<ZeroJson>,
    pub warnings: Vec<String>,
    pub errors: Vec<ErrorJson>,
}

impl AnalyzeReport {
    pub fn from_analysis(a: &PlaneAnalysis) -> Self {
        let ring_errors = a.rings.iter().filter_map(|r| r.report.as_ref().err());
        AnalyzeReport {
            rings: a.rings.iter().map(RingJson::from).collect(),
            open_curves: a.level_set.open_curves.iter().map(OpenCurveJson::from).collect(),
            zeros: a.zeros.iter().map(ZeroJson::from).collect(),
            warnings: a.warnings.clone(),
            errors: errors(ring_errors.chain(&a.zero_failures)),
        }
    }

    pub fn failed(e: &Error) -> Self {
        AnalyzeReport { rings: vec![], open_curves: vec![], zeros: vec![], warnings: vec![], errors: errors([e]) }
    }
}

#[derive(Debug, Serialize)]
pub struct CatalogRingJson {
    pub chart: &'static str,
    pub centroid: [f64; 2],
    pub m: usize,
    pub rind: i32,
    pub classification: &'static str,
    pub index: String,
}

impl From<&CatalogRing> for CatalogRingJson {
    fn from(r: &CatalogRing) -> Self {
        CatalogRingJson {
            chart: r.chart.name(),
            centroid: pt(r.ring.centroid()),
            m: r.report.m,
            rind: r.report.rind,
            classification: r.report.classification.name(),
            index: index_of_ring(r.report.classification).0.to_string(),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct CatalogZeroJson {
    pub chart: &'static str,
    pub position: [f64; 2],
    pub poincare_index: i64,
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub index: Option<String>,
}

impl From<&CatalogZero> for CatalogZeroJson {
    fn from(z: &CatalogZero) -> Self {
        CatalogZeroJson {
            chart: z.chart.name(),
            position: pt(z.zero.position),
            poincare_index: z.zero.poincare_index,
            kind: z.zero.kind.name(),
            index: index_of_zero(z.zero.kind, z.zero.position).ok().map(|i| i.to_string()),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct PhReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holds: Option<bool>,
    pub rings: Vec<CatalogRingJson>,
    pub zeros: Vec<CatalogZeroJson>,
    pub enclosure_violations: Vec<String>,
    pub warnings: Vec<String>,
    pub errors: Vec<ErrorJson>,
}

impl PhReport {
    pub fn new(rings: &[CatalogRing], zeros: &[CatalogZero], warnings: &[String]) -> Self {
        PhReport {
            sum: None,
            holds: None,
            rings: rings.iter().map(CatalogRingJson::from).collect(),
            zeros: zeros.iter().map(CatalogZeroJson::from).collect(),
            enclosure_violations: vec![],
            warnings: warnings.to_vec(),
            errors: vec![],
        }
    }

    pub fn failed(e: &Error) -> Self {
        let mut r = PhReport::new(&[], &[], &[]);
        r.errors = errors([e]);
        r
    }

    pub fn with_verdict(mut self, v: &PhVerdict) -> Self {
        self.sum = Some(v.sum.to_string());
        self.holds = Some(v.holds);
        self.enclosure_violations = v.enclosure_violations.clone();
        self.warnings = v.warnings.clone();
        self
    }

    pub fn with_errors<'a>(mut self, list: impl IntoIterator<Item = &'a Error>) -> Self {
        self.errors.extend(errors(list));
        self
    }
}

#[derive(Debug, Serialize)]
pub struct SampleJson {
    pub s: f64,
    pub ring_count: usize,
    pub m: Vec<usize>,
    pub rind: Vec<i32>,
    /// Kinds of ring failures at this sample.
    pub failures: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct HomotopyReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub admissible: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rind_constant: Option<bool>,
    pub samples: Vec<SampleJson>,
    pub errors: Vec<ErrorJson>,
}

impl From<&AdmissibilityReport> for HomotopyReport {
    fn from(r: &AdmissibilityReport) -> Self {
        let samples = r
            .samples
            .iter()
            .map(|s| {
                let ok: Vec<(usize, i32)> = s.rings.iter().filter_map(|r| r.outcome.clone().ok()).collect();
                SampleJson {
                    s: sig12(s.s),
                    ring_count: s.rings.len(),
                    m: ok.iter().map(|o| o.0).collect(),
                    rind: ok.iter().map(|o| o.1).collect(),
                    failures: s.rings.iter().filter_map(|r| r.outcome.clone().err()).collect(),
                }
            })
            .collect();
        HomotopyReport { admissible: Some(r.admissible), rind_constant: Some(r.rind_constant), samples, errors: vec![] }
    }
}

impl HomotopyReport {
    pub fn failed(e: &Error) -> Self {
        HomotopyReport { admissible: None, rind_constant: None, samples: vec![], errors: errors([e]) }
    }
}

#[derive(Debug, Serialize)]
pub struct TerminationJson {
    pub kind: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ring: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub at: Option<[f64; 2]>,
}

#[derive(Debug, Serialize)]
pub struct TrajectoryReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub termination: Option<TerminationJson>,
    pub t: Vec<f64>,
    pub x: Vec<[f64; 2]>,
    pub errors: Vec<ErrorJson>,
}

impl From<&Trajectory> for TrajectoryReport {
    fn from(tr: &Trajectory) -> Self {
        let (ring, at) = match &tr.termination {
            Termination::RingHit { ring, at } => (*ring, Some(pt(*at))),
            _ => (None, None),
        };
        TrajectoryReport {
            termination: Some(TerminationJson { kind: tr.termination.name(), ring, at }),
            t: tr.samples.iter().map(|s| sig12(s.0)).collect(),
            x: tr.samples.iter().map(|s| pt(s.1)).collect(),
            errors: vec![],
        }
    }
}

impl TrajectoryReport {
    pub fn failed(e: &Error) -> Self {
        TrajectoryReport { termination: None, t: vec![], x: vec![], errors: errors([e]) }
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serializes");
    s.push('\n');
    s
}
