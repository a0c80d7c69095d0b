//! Static SVG phase portraits.

use std::fmt::Write as _;

use rayon::prelude::*;

use crate::analysis::{analyze_plane, PlaneAnalysis};
use crate::deg_index::index_of_zero;
use crate::equilibria::ZeroKind;
use crate::error::Result;
use crate::field::{norm, Point, ScalarField, VectorField};
use crate::levelset::Domain;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct PortraitOptions {
    /// Width of the plot area in pixels; the height follows the domain's
    /// aspect ratio.
    pub width: f64,
    pub margin: f64,
    /// Streamline seeds per axis.
    pub seeds: usize,
    pub stream_steps: usize,
    /// Streamline step as a fraction of the domain diagonal.
    pub step: f64,
    pub positive_color: String,
    pub negative_color: String,
    pub ring_color: String,
    pub ring_width: f64,
    pub stream_width: f64,
}

impl Default for PortraitOptions {
    fn default() -> Self {
        PortraitOptions {
            width: 600.0,
            margin: 24.0,
            seeds: 18,
            stream_steps: 40,
            step: 0.004,
            positive_color: "#2166ac".into(),
            negative_color: "#b2182b".into(),
            ring_color: "#111111".into(),
            ring_width: 3.0,
            stream_width: 1.0,
        }
    }
}

/// Six significant digits, no exponent, no trailing zeros.
pub fn fmt6(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return "0".into();
    }
    let mag = x.abs().log10().floor() as i32;
    let decimals = (5 - mag).max(0) as usize;
    let scale = 10f64.powi(5 - mag);
    let rounded = (x * scale).round() / scale;
    let mut s = format!("{rounded:.decimals$}");
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

struct Frame {
    dom: Domain,
    margin: f64,
    width: f64,
    height: f64,
}

impl Frame {
    fn px(&self, p: Point) -> (String, String) {
        let x = self.margin + (p[0] - self.dom.xmin) / (self.dom.xmax - self.dom.xmin) * self.width;
        let y = self.margin + (self.dom.ymax - p[1]) / (self.dom.ymax - self.dom.ymin) * self.height;
        (fmt6(x), fmt6(y))
    }

    fn points(&self, pts: &[Point]) -> String {
        pts.iter()
            .map(|p| {
                let (x, y) = self.px(*p);
                format!("{x},{y}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// Direction of the flow with the speed removed: `sign(f)·JE/|JE|`.
fn direction(f: &ScalarField, e: &VectorField, p: Point) -> Option<(f64, [f64; 2])> {
    let fv = f.eval(p).ok()?;
    let g = e.je(p).ok()?;
    let n = norm(g);
    if fv == 0.0 || n < 1e-12 || !n.is_finite() {
        return None;
    }
    let s = fv.signum();
    Some((s, [s * g[0] / n, s * g[1] / n]))
}

fn streamline(f: &ScalarField, e: &VectorField, dom: &Domain, seed: Point, steps: usize, ds: f64) -> Option<(f64, Vec<Point>)> {
    let (side, _) = direction(f, e, seed)?;
    let mut pts = vec![seed];
    let mut p = seed;
    for _ in 0..steps {
        let Some((s1, d1)) = direction(f, e, p) else { break };
        let mid = [p[0] + 0.5 * ds * d1[0], p[1] + 0.5 * ds * d1[1]];
        let Some((s2, d2)) = direction(f, e, mid) else { break };
        let q = [p[0] + ds * d2[0], p[1] + ds * d2[1]];
        if s1 != side || s2 != side || !dom.contains(q) {
            break;
        }
        match direction(f, e, q) {
            Some((s3, _)) if s3 == side => {}
            _ => break,
        }
        pts.push(q);
        p = q;
    }
    (pts.len() >= 2).then_some((side, pts))
}

/// Analyzes the plane and renders it.
pub fn phase_portrait_svg(
    f: &ScalarField,
    e: &VectorField,
    dom: &Domain,
    tol: &Tolerances,
    opts: &PortraitOptions,
) -> Result<String> {
    let analysis = analyze_plane(f, e, dom, tol)?;
    Ok(render_svg(f, e, dom, &analysis, opts))
}

/// Renders a finished analysis. Failed features leave an error banner.
pub fn render_svg(f: &ScalarField, e: &VectorField, dom: &Domain, analysis: &PlaneAnalysis, opts: &PortraitOptions) -> String {
    let width = opts.width;
    let height = width * (dom.ymax - dom.ymin) / (dom.xmax - dom.xmin);
    let frame = Frame { dom: *dom, margin: opts.margin, width, height };
    let legend_h = 96.0;
    let total_w = width + 2.0 * opts.margin;
    let total_h = height + 2.0 * opts.margin + legend_h;

    let n = opts.seeds.max(1);
    let seeds: Vec<Point> = (0..n * n)
        .map(|k| {
            let (i, j) = (k % n, k / n);
            [
                dom.xmin + (i as f64 + 0.5) / n as f64 * (dom.xmax - dom.xmin),
                dom.ymin + (j as f64 + 0.5) / n as f64 * (dom.ymax - dom.ymin),
            ]
        })
        .collect();
    let ds = opts.step * dom.diagonal();
    let lines: Vec<Option<(f64, Vec<Point>)>> =
        seeds.par_iter().map(|s| streamline(f, e, dom, *s, opts.stream_steps, ds)).collect();

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        fmt6(total_w),
        fmt6(total_h),
        fmt6(total_w),
        fmt6(total_h)
    );
    let _ = writeln!(svg, "<defs>");
    for (id, color) in [("arrow-pos", &opts.positive_color), ("arrow-neg", &opts.negative_color)] {
        let _ = writeln!(
            svg,
            r#"<marker id="{id}" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="5" markerHeight="5" orient="auto"><path d="M0,0 L10,5 L0,10 z" fill="{color}"/></marker>"#
        );
    }
    let _ = writeln!(svg, "</defs>");
    let _ = writeln!(svg, r##"<rect x="0" y="0" width="{}" height="{}" fill="#ffffff"/>"##, fmt6(total_w), fmt6(total_h));
    let _ = writeln!(
        svg,
        r##"<rect x="{m}" y="{m}" width="{}" height="{}" fill="none" stroke="#999999" stroke-width="0.5"/>"##,
        fmt6(width),
        fmt6(height),
        m = fmt6(opts.margin)
    );

    let _ = writeln!(svg, r#"<g id="streamlines" fill="none" stroke-width="{}">"#, fmt6(opts.stream_width));
    for (side, pts) in lines.iter().flatten() {
        let (color, marker) =
            if *side > 0.0 { (&opts.positive_color, "arrow-pos") } else { (&opts.negative_color, "arrow-neg") };
        let _ = writeln!(svg, r#"<polyline points="{}" stroke="{color}" marker-end="url(#{marker})"/>"#, frame.points(pts));
    }
    let _ = writeln!(svg, "</g>");

    if !analysis.rings.is_empty() {
        let _ = writeln!(svg, r#"<g id="rings" fill="none">"#);
        for entry in &analysis.rings {
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" stroke="{}" stroke-width="{}"/>"#,
                frame.points(&entry.ring.vertices),
                opts.ring_color,
                fmt6(opts.ring_width)
            );
            let top = entry.ring.vertices.iter().copied().fold([0.0, f64::NEG_INFINITY], |a, b| if b[1] > a[1] { b } else { a });
            let (x, y) = frame.px(top);
            let label = match &entry.report {
                Ok(r) => format!("rind={} ({})", r.rind, r.classification.name()),
                Err(err) => format!("error: {}", err.kind()),
            };
            let _ = writeln!(
                svg,
                r#"<text x="{x}" y="{y}" dy="-6" font-family="sans-serif" font-size="12" text-anchor="middle" fill="{}">{}</text>"#,
                opts.ring_color,
                escape(&label)
            );
        }
        let _ = writeln!(svg, "</g>");
    }

    let _ = writeln!(svg, r#"<g id="zeros" font-family="sans-serif" font-size="11">"#);
    for z in &analysis.zeros {
        let (x, y) = frame.px(z.position);
        match z.kind {
            ZeroKind::Source => {
                let _ = writeln!(svg, r##"<circle cx="{x}" cy="{y}" r="5" fill="#ffffff" stroke="#000000" stroke-width="1.5"/>"##);
            }
            ZeroKind::Sink => {
                let _ = writeln!(svg, r##"<circle cx="{x}" cy="{y}" r="5" fill="#000000"/>"##);
            }
            ZeroKind::Other => {
                let _ = writeln!(
                    svg,
                    r##"<path d="M{x},{y} m-5,-5 l10,10 m0,-10 l-10,10" stroke="#000000" stroke-width="1.5"/>"##
                );
            }
        }
        let label = match index_of_zero(z.kind, z.position) {
            Ok(idx) => format!("{} {}", z.kind.name(), idx),
            Err(_) => format!("{} (no index)", z.kind.name()),
        };
        let _ = writeln!(svg, r#"<text x="{x}" y="{y}" dx="8" dy="-8">{}</text>"#, escape(&label));
    }
    let _ = writeln!(svg, "</g>");

    let failures = analysis.rings.iter().filter(|r| r.report.is_err()).count() + analysis.zero_failures.len();
    if let Some(err) = analysis.first_error() {
        let _ = writeln!(
            svg,
            r##"<g id="error-banner"><rect x="{m}" y="{m}" width="{}" height="22" fill="#fde0dc" stroke="#b2182b"/><text x="{}" y="{}" font-family="sans-serif" font-size="12" fill="#b2182b">{}</text></g>"##,
            fmt6(width),
            fmt6(opts.margin + 6.0),
            fmt6(opts.margin + 15.0),
            escape(&format!("partial portrait: {failures} feature(s) failed; first: {err}")),
            m = fmt6(opts.margin)
        );
    }

    let ly = height + 2.0 * opts.margin;
    let lx = opts.margin;
    let _ = writeln!(svg, r#"<g id="legend" font-family="sans-serif" font-size="12">"#);
    let rows: [(&str, String); 5] = [
        ("f > 0 streamline", format!(r#"<line x1="0" y1="0" x2="24" y2="0" stroke="{}" stroke-width="2"/>"#, opts.positive_color)),
        ("f < 0 streamline", format!(r#"<line x1="0" y1="0" x2="24" y2="0" stroke="{}" stroke-width="2"/>"#, opts.negative_color)),
        (
            "degeneracy ring",
            format!(r#"<line x1="0" y1="0" x2="24" y2="0" stroke="{}" stroke-width="{}"/>"#, opts.ring_color, fmt6(opts.ring_width)),
        ),
        ("source", r##"<circle cx="12" cy="0" r="5" fill="#ffffff" stroke="#000000" stroke-width="1.5"/>"##.to_string()),
        ("sink", r##"<circle cx="12" cy="0" r="5" fill="#000000"/>"##.to_string()),
    ];
    for (k, (label, glyph)) in rows.iter().enumerate() {
        let y = ly + 8.0 + 17.0 * k as f64;
        let _ = writeln!(svg, r#"<g transform="translate({},{})">{glyph}<text x="32" y="4">{label}</text></g>"#, fmt6(lx), fmt6(y));
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(svg, "</svg>");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render(f: &str, e1: &str, e2: &str) -> String {
        let f = ScalarField::parse(f).unwrap();
        let e = VectorField::parse(e1, e2).unwrap();
        phase_portrait_svg(&f, &e, &Domain::square(2.0, 64), &Tolerances::default(), &PortraitOptions::default()).unwrap()
    }

    #[test]
    fn six_significant_digits() {
        assert_eq!(fmt6(0.0), "0");
        assert_eq!(fmt6(1.0), "1");
        assert_eq!(fmt6(123.456789), "123.457");
        assert_eq!(fmt6(-0.000123456789), "-0.000123457");
        assert_eq!(fmt6(1234567.0), "1234570");
        assert_eq!(fmt6(-1e-20), "-0.00000000000000000001");
        assert!(fmt6(-0.0000001).starts_with('-'));
    }

    #[test]
    fn rings_zeros_and_legend() {
        let svg = render("x1^2 + x2^2 - 1", "-x2", "x1");
        assert!(svg.contains(r#"<g id="rings""#));
        assert!(svg.contains("rind=-1 (Annihilation)"));
        assert!(svg.contains("Source 1(S1)+0(Z1)"));
        assert!(svg.contains(r#"<g id="legend""#));
        assert!(!svg.contains("error-banner"));
        assert!(svg.contains("arrow-pos") && svg.contains("arrow-neg"));
    }

    #[test]
    fn plain_sink_has_no_ring_layer() {
        let svg = render("1", "-x2", "x1");
        assert!(!svg.contains(r#"<g id="rings""#));
        assert!(svg.contains("Sink 1(S1)-1(Z1)"));
    }

    #[test]
    fn deterministic() {
        assert_eq!(render("x1^2 + x2^2 - 1", "x2", "-x1"), render("x1^2 + x2^2 - 1", "x2", "-x1"));
    }

    #[test]
    fn partial_failures_get_a_banner() {
        let svg = render("x1^2 + x2^2 - 1", "x1 - 1", "x2");
        assert!(svg.contains("error-banner"));
        assert!(svg.contains("ZeroOnRing") || svg.contains("vanishes"));
    }

    #[test]
    fn arrows_point_onto_annihilation_ring() {
        // streamlines seeded outside move inward, inside move outward
        let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
        let e = VectorField::parse("-x2", "x1").unwrap();
        let dom = Domain::square(2.0, 64);
        let (_, out) = streamline(&f, &e, &dom, [1.6, 0.1], 20, 0.01).unwrap();
        assert!(norm(*out.last().unwrap()) < norm(out[0]));
        let (_, inn) = streamline(&f, &e, &dom, [0.4, 0.1], 20, 0.01).unwrap();
        assert!(norm(*inn.last().unwrap()) > norm(inn[0]));
    }
}
