//! Extraction of the degeneracy set `{f = 0}` as oriented polylines.
//!
//! The zero set is traced by marching squares on a uniform grid. Every edge
//! crossing is polished to `|f| < eps_f` by bracketed root finding along the
//! grid edge. Saddle cells (alternating corner signs) are resolved by
//! subdividing the cell and testing which diagonal pair of corners is
//! connected through same-sign samples.
//!
//! Nodes where `f` evaluates to exactly zero are classified by the sign of
//! `f` at a tiny fixed offset, so the classification of `-f` is always the
//! exact complement of that of `f` and both produce the same vertices.

use std::collections::{HashMap, VecDeque};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::{cross, dist, dot, norm, rot, sub, Point, ScalarField};
use crate::tolerance::Tolerances;

/// Rectangular analysis window with `grid_n` cells per axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub xmin: f64,
    pub xmax: f64,
    pub ymin: f64,
    pub ymax: f64,
    pub grid_n: usize,
}

pub const MIN_GRID: usize = 16;
const MAX_SUBDIVISION_DEPTH: u32 = 6;

impl Domain {
    pub fn new(xmin: f64, xmax: f64, ymin: f64, ymax: f64, grid_n: usize) -> Result<Self> {
        let d = Domain { xmin, xmax, ymin, ymax, grid_n };
        d.validate()?;
        Ok(d)
    }

    /// `[-half, half]²`.
    pub fn square(half: f64, grid_n: usize) -> Self {
        Domain { xmin: -half, xmax: half, ymin: -half, ymax: half, grid_n }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.xmin, self.xmax, self.ymin, self.ymax].iter().all(|v| v.is_finite());
        if !finite || self.xmin >= self.xmax || self.ymin >= self.ymax {
            return Err(Error::InvalidDomain(format!(
                "bounds [{}, {}] x [{}, {}]",
                self.xmin, self.xmax, self.ymin, self.ymax
            )));
        }
        if self.grid_n < MIN_GRID {
            return Err(Error::InvalidDomain(format!("grid_n = {} < {MIN_GRID}", self.grid_n)));
        }
        Ok(())
    }

    pub fn dx(&self) -> f64 {
        (self.xmax - self.xmin) / self.grid_n as f64
    }

    pub fn dy(&self) -> f64 {
        (self.ymax - self.ymin) / self.grid_n as f64
    }

    pub fn node(&self, i: usize, j: usize) -> Point {
        [self.xmin + i as f64 * self.dx(), self.ymin + j as f64 * self.dy()]
    }

    pub fn diagonal(&self) -> f64 {
        (self.xmax - self.xmin).hypot(self.ymax - self.ymin)
    }

    pub fn contains(&self, p: Point) -> bool {
        p[0] >= self.xmin && p[0] <= self.xmax && p[1] >= self.ymin && p[1] <= self.ymax
    }

    pub fn with_grid(&self, grid_n: usize) -> Self {
        Domain { grid_n, ..*self }
    }
}

/// A closed component of the zero set, traversed counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Ring {
    /// Closed loop; the last vertex connects back to the first.
    pub vertices: Vec<Point>,
    pub arc_length: f64,
    /// Whether `f` must be negated so that `J∇f` points along the traversal.
    pub f_sign_flipped: bool,
    pub min_grad_norm: f64,
}

impl Ring {
    fn from_loop(vertices: Vec<Point>) -> Ring {
        let mut r = Ring { vertices, arc_length: 0.0, f_sign_flipped: false, min_grad_norm: 0.0 };
        if r.signed_area() < 0.0 {
            r.vertices.reverse();
        }
        r.arc_length = r.segments().map(|(a, b)| dist(a, b)).sum();
        r
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Segments of the closed loop, including the closing one.
    pub fn segments(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Shoelace area; positive for counter-clockwise loops.
    pub fn signed_area(&self) -> f64 {
        0.5 * self.segments().map(|(a, b)| cross(a, b)).sum::<f64>()
    }

    pub fn centroid(&self) -> Point {
        let n = self.vertices.len() as f64;
        let s = self.vertices.iter().fold([0.0, 0.0], |acc, v| [acc[0] + v[0], acc[1] + v[1]]);
        [s[0] / n, s[1] / n]
    }

    /// Winding-number point-in-polygon test.
    pub fn contains(&self, p: Point) -> bool {
        let mut wn = 0i32;
        for (a, b) in self.segments() {
            if a[1] <= p[1] {
                if b[1] > p[1] && cross(sub(b, a), sub(p, a)) > 0.0 {
                    wn += 1;
                }
            } else if b[1] <= p[1] && cross(sub(b, a), sub(p, a)) < 0.0 {
                wn -= 1;
            }
        }
        wn != 0
    }

    pub fn distance_to(&self, p: Point) -> f64 {
        self.segments().map(|(a, b)| segment_distance(p, a, b)).fold(f64::INFINITY, f64::min)
    }

    /// Field with the ring's orientation sign applied.
    pub fn oriented(&self, f: &ScalarField) -> ScalarField {
        f.with_flip(self.f_sign_flipped)
    }
}

pub(crate) fn segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = sub(b, a);
    let l2 = dot(ab, ab);
    if l2 == 0.0 {
        return dist(p, a);
    }
    let t = (dot(sub(p, a), ab) / l2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// A component of the zero set that leaves the domain at both ends.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenCurve {
    pub vertices: Vec<Point>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelSet {
    pub rings: Vec<Ring>,
    pub open_curves: Vec<OpenCurve>,
    /// Absolute regularity threshold used for this extraction.
    pub eps_regular_abs: f64,
}

/// Sign class of a node: `true` for the positive side.
fn classify(f: &ScalarField, p: Point, v: f64, h: f64) -> Result<bool> {
    if v != 0.0 {
        return Ok(v > 0.0);
    }
    let delta = 1e-7 * h;
    let q = [p[0] + delta, p[1] + 0.618_033_988_749_895 * delta];
    let w = f.eval(q).map_err(Error::eval(q))?;
    Ok(w > 0.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum EdgeKey {
    /// Between nodes (i, j) and (i + 1, j).
    H(usize, usize),
    /// Between nodes (i, j) and (i, j + 1).
    V(usize, usize),
}

struct Grid<'a> {
    f: &'a ScalarField,
    dom: Domain,
    values: Vec<f64>,
    signs: Vec<bool>,
}

impl<'a> Grid<'a> {
    fn sample(f: &'a ScalarField, dom: Domain) -> Result<Self> {
        let n = dom.grid_n + 1;
        let h = dom.dx().min(dom.dy());
        let rows: Vec<Result<Vec<(f64, bool)>>> = (0..n)
            .into_par_iter()
            .map(|j| {
                (0..n)
                    .map(|i| {
                        let p = dom.node(i, j);
                        let v = f.eval(p).map_err(Error::eval(p))?;
                        Ok((v, classify(f, p, v, h)?))
                    })
                    .collect()
            })
            .collect();
        let mut values = Vec::with_capacity(n * n);
        let mut signs = Vec::with_capacity(n * n);
        for row in rows {
            for (v, s) in row? {
                values.push(v);
                signs.push(s);
            }
        }
        Ok(Grid { f, dom, values, signs })
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        j * (self.dom.grid_n + 1) + i
    }

    fn sign(&self, i: usize, j: usize) -> bool {
        self.signs[self.idx(i, j)]
    }

    fn value(&self, i: usize, j: usize) -> f64 {
        self.values[self.idx(i, j)]
    }

    fn edge_ends(&self, e: EdgeKey) -> ((usize, usize), (usize, usize)) {
        match e {
            EdgeKey::H(i, j) => ((i, j), (i + 1, j)),
            EdgeKey::V(i, j) => ((i, j), (i, j + 1)),
        }
    }

    fn crossing(&self, e: EdgeKey, eps_f: f64) -> Result<Point> {
        let ((ia, ja), (ib, jb)) = self.edge_ends(e);
        let a = self.dom.node(ia, ja);
        let b = self.dom.node(ib, jb);
        polish_on_segment(self.f, a, self.value(ia, ja), b, self.value(ib, jb), eps_f)
    }
}

/// Bracketed root of `f` on the segment `a..b` (Illinois false position).
pub(crate) fn polish_on_segment(
    f: &ScalarField,
    a: Point,
    fa: f64,
    b: Point,
    fb: f64,
    eps_f: f64,
) -> Result<Point> {
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    let at = |t: f64| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];
    let (mut lo, mut hi, mut flo, mut fhi) = (0.0f64, 1.0f64, fa, fb);
    let mut side = 0i8;
    let mut best = if fa.abs() < fb.abs() { (0.0, fa) } else { (1.0, fb) };
    for _ in 0..200 {
        let mut t = (lo * fhi - hi * flo) / (fhi - flo);
        if !(t > lo && t < hi) {
            t = 0.5 * (lo + hi);
        }
        let p = at(t);
        let ft = f.eval(p).map_err(Error::eval(p))?;
        if ft.abs() < best.1.abs() {
            best = (t, ft);
        }
        if ft == 0.0 || ft.abs() < 1e-3 * eps_f || hi - lo < 1e-15 {
            break;
        }
        if (ft > 0.0) == (flo > 0.0) {
            lo = t;
            flo = ft;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = t;
            fhi = ft;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(at(best.0))
}

/// Moves `p` onto `{f = 0}` by Newton steps along `∇f`.
pub(crate) fn project_to_zero(f: &ScalarField, mut p: Point, steps: usize) -> Result<Point> {
    for _ in 0..steps {
        let (v, g) = f.value_grad(p).map_err(Error::eval(p))?;
        let g2 = dot(g, g);
        if v == 0.0 || g2 == 0.0 {
            break;
        }
        p = [p[0] - v * g[0] / g2, p[1] - v * g[1] / g2];
    }
    Ok(p)
}

/// Decides whether corners c0 and c2 of a saddle cell are joined through
/// the cell interior. `Ok(true)` means c0–c2 connected, `Ok(false)` means
/// c1–c3 connected.
fn resolve_saddle(f: &ScalarField, dom: &Domain, i: usize, j: usize) -> Result<bool> {
    let origin = dom.node(i, j);
    let (dx, dy) = (dom.dx(), dom.dy());
    for depth in 1..=MAX_SUBDIVISION_DEPTH {
        let m = 1usize << depth;
        let (hx, hy) = (dx / m as f64, dy / m as f64);
        let mut cls = vec![false; (m + 1) * (m + 1)];
        for b in 0..=m {
            for a in 0..=m {
                let p = [origin[0] + a as f64 * hx, origin[1] + b as f64 * hy];
                let v = f.eval(p).map_err(Error::eval(p))?;
                cls[b * (m + 1) + a] = classify(f, p, v, hx.min(hy))?;
            }
        }
        let diag = connected(&cls, m, (0, 0), (m, m));
        let anti = connected(&cls, m, (m, 0), (0, m));
        match (diag, anti) {
            (true, false) => return Ok(true),
            (false, true) => return Ok(false),
            _ => {}
        }
    }
    Err(Error::AmbiguousCell { at: [origin[0] + 0.5 * dx, origin[1] + 0.5 * dy] })
}

/// 4-connected flood fill over nodes sharing the class of `from`.
fn connected(cls: &[bool], m: usize, from: (usize, usize), to: (usize, usize)) -> bool {
    let w = m + 1;
    let target = cls[from.1 * w + from.0];
    if cls[to.1 * w + to.0] != target {
        return false;
    }
    let mut seen = vec![false; w * w];
    let mut queue = VecDeque::from([from]);
    seen[from.1 * w + from.0] = true;
    while let Some((a, b)) = queue.pop_front() {
        if (a, b) == to {
            return true;
        }
        let nbrs = [
            (a.wrapping_sub(1), b),
            (a + 1, b),
            (a, b.wrapping_sub(1)),
            (a, b + 1),
        ];
        for (x, y) in nbrs {
            if x < w && y < w {
                let k = y * w + x;
                if !seen[k] && cls[k] == target {
                    seen[k] = true;
                    queue.push_back((x, y));
                }
            }
        }
    }
    false
}

/// Newton search for a critical point of `f` near `start`, using central
/// differences of the exact gradient for the Hessian. Returns the point if
/// the iteration converges within `radius` of `start`.
fn critical_point_near(f: &ScalarField, start: Point, radius: f64) -> Option<Point> {
    let h = 1e-6 * radius.max(1e-12);
    let mut p = start;
    for _ in 0..30 {
        let g = f.grad(p).ok()?;
        let gxp = f.grad([p[0] + h, p[1]]).ok()?;
        let gxm = f.grad([p[0] - h, p[1]]).ok()?;
        let gyp = f.grad([p[0], p[1] + h]).ok()?;
        let gym = f.grad([p[0], p[1] - h]).ok()?;
        let hxx = (gxp[0] - gxm[0]) / (2.0 * h);
        let hxy = 0.5 * ((gxp[1] - gxm[1]) + (gyp[0] - gym[0])) / (2.0 * h);
        let hyy = (gyp[1] - gym[1]) / (2.0 * h);
        let det = hxx * hyy - hxy * hxy;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        let step = [(hyy * g[0] - hxy * g[1]) / det, (hxx * g[1] - hxy * g[0]) / det];
        p = [p[0] - step[0], p[1] - step[1]];
        if dist(p, start) > radius {
            return None;
        }
        if norm(step) < 1e-14 * radius.max(1.0) {
            break;
        }
    }
    Some(p)
}

/// Largest `|∇f|` on a lattice of at most 65×65 domain nodes.
fn gradient_scale(f: &ScalarField, dom: &Domain) -> Result<f64> {
    let k = 64usize.min(dom.grid_n);
    let coarse = dom.with_grid(k);
    let mut scale = 0.0f64;
    for j in 0..=k {
        for i in 0..=k {
            let p = coarse.node(i, j);
            let g = f.grad(p).map_err(Error::eval(p))?;
            scale = scale.max(norm(g));
        }
    }
    Ok(scale)
}

/// Traces every component of `{f = 0}` meeting the domain.
///
/// Closed components come back as counter-clockwise [`Ring`]s with their
/// orientation sign fixed by [`orient_and_sign`]; components reaching the
/// boundary come back as [`OpenCurve`]s.
pub fn extract_level_set(f: &ScalarField, dom: &Domain, tol: &Tolerances) -> Result<LevelSet> {
    dom.validate()?;
    let grid = Grid::sample(f, *dom)?;
    let n = dom.grid_n;
    let gscale = gradient_scale(f, dom)?;
    let eps_regular_abs = tol.eps_regular * gscale;

    let mut point_of: HashMap<EdgeKey, usize> = HashMap::new();
    let mut points: Vec<Point> = Vec::new();
    let mut adjacency: Vec<Vec<usize>> = Vec::new();
    let mut saddle_centers: Vec<Point> = Vec::new();

    let mut vertex = |e: EdgeKey,
                      points: &mut Vec<Point>,
                      adjacency: &mut Vec<Vec<usize>>|
     -> Result<usize> {
        if let Some(&k) = point_of.get(&e) {
            return Ok(k);
        }
        let p = grid.crossing(e, tol.eps_f)?;
        points.push(p);
        adjacency.push(Vec::new());
        point_of.insert(e, points.len() - 1);
        Ok(points.len() - 1)
    };

    for j in 0..n {
        for i in 0..n {
            let c = [grid.sign(i, j), grid.sign(i + 1, j), grid.sign(i + 1, j + 1), grid.sign(i, j + 1)];
            let edges = [EdgeKey::H(i, j), EdgeKey::V(i + 1, j), EdgeKey::H(i, j + 1), EdgeKey::V(i, j)];
            let cut = [c[0] != c[1], c[1] != c[2], c[3] != c[2], c[0] != c[3]];
            let count = cut.iter().filter(|b| **b).count();
            let pairs: Vec<(usize, usize)> = match count {
                0 => continue,
                2 => {
                    let mut it = (0..4).filter(|&k| cut[k]);
                    vec![(it.next().unwrap(), it.next().unwrap())]
                }
                _ => {
                    let p0 = dom.node(i, j);
                    saddle_centers.push([p0[0] + 0.5 * dom.dx(), p0[1] + 0.5 * dom.dy()]);
                    if resolve_saddle(f, dom, i, j)? {
                        // c0 and c2 joined: cut off corners c1 and c3
                        vec![(0, 1), (2, 3)]
                    } else {
                        vec![(3, 0), (1, 2)]
                    }
                }
            };
            for (a, b) in pairs {
                let va = vertex(edges[a], &mut points, &mut adjacency)?;
                let vb = vertex(edges[b], &mut points, &mut adjacency)?;
                adjacency[va].push(vb);
                adjacency[vb].push(va);
            }
        }
    }

    let cell = dom.dx().hypot(dom.dy());
    let singular_near = |seed: Point| -> Result<Option<Error>> {
        if let Some(q) = critical_point_near(f, seed, 2.0 * cell) {
            let (v, g) = f.value_grad(q).map_err(Error::eval(q))?;
            if norm(g) <= eps_regular_abs && v.abs() <= eps_regular_abs * cell {
                return Ok(Some(Error::NonRegularLevelSet { at: q, grad_norm: norm(g) }));
            }
        }
        Ok(None)
    };
    for c in &saddle_centers {
        if let Some(e) = singular_near(*c)? {
            return Err(e);
        }
    }

    let chains = assemble_chains(&adjacency);
    let component_count = chains.len();
    if component_count > tol.max_components {
        return Err(Error::TooManyComponents { limit: tol.max_components });
    }

    let dedup_eps = 1e-12 * dom.diagonal();
    let mut polylines = Vec::with_capacity(chains.len());
    for (chain, closed) in chains {
        let mut verts: Vec<Point> = Vec::with_capacity(chain.len());
        for k in chain {
            let p = points[k];
            if verts.last().is_none_or(|q| dist(*q, p) > dedup_eps) {
                verts.push(p);
            }
        }
        if closed && verts.len() > 1 && dist(verts[0], *verts.last().unwrap()) <= dedup_eps {
            verts.pop();
        }
        polylines.push((verts, closed));
    }
    if let Some(at) = first_crossing(&polylines) {
        let g = norm(f.grad(at).map_err(Error::eval(at))?);
        return Err(Error::NonRegularLevelSet { at, grad_norm: g });
    }

    let mut rings = Vec::new();
    let mut open_curves = Vec::new();
    for (verts, closed) in polylines {
        let mut gnorm = Vec::with_capacity(verts.len());
        for p in &verts {
            let g = norm(f.grad(*p).map_err(Error::eval(*p))?);
            if g <= eps_regular_abs {
                return Err(Error::NonRegularLevelSet { at: *p, grad_norm: g });
            }
            gnorm.push(g);
        }
        // A critical point of f on the zero set can hide between vertices
        // (the tracer then pinches a figure-eight into one loop); look for
        // one near every local minimum of |∇f| along the chain.
        let n = verts.len();
        for i in 0..n {
            let (prev, next) = if closed {
                (gnorm[(i + n - 1) % n], gnorm[(i + 1) % n])
            } else {
                (gnorm[i.saturating_sub(1)], gnorm[(i + 1).min(n - 1)])
            };
            if gnorm[i] <= prev && gnorm[i] <= next {
                if let Some(e) = singular_near(verts[i])? {
                    return Err(e);
                }
            }
        }
        if closed && verts.len() >= 3 {
            let ring = Ring::from_loop(verts);
            rings.push(orient_and_sign(f, ring)?);
        } else if !closed {
            open_curves.push(OpenCurve { vertices: verts });
        }
    }
    Ok(LevelSet { rings, open_curves, eps_regular_abs })
}

/// First proper crossing between two non-adjacent segments of the traced
/// polylines, if any. Segments sharing an endpoint are never reported.
fn first_crossing(polylines: &[(Vec<Point>, bool)]) -> Option<Point> {
    let mut segs: Vec<(Point, Point)> = Vec::new();
    for (verts, closed) in polylines {
        let n = verts.len();
        let count = if *closed { n } else { n.saturating_sub(1) };
        segs.extend((0..count).map(|i| (verts[i], verts[(i + 1) % n])));
    }
    let mut order: Vec<usize> = (0..segs.len()).collect();
    let xmin = |k: usize| segs[k].0[0].min(segs[k].1[0]);
    let xmax = |k: usize| segs[k].0[0].max(segs[k].1[0]);
    order.sort_by(|&a, &b| xmin(a).total_cmp(&xmin(b)).then(a.cmp(&b)));
    let mut best: Option<(usize, usize, Point)> = None;
    for (oi, &a) in order.iter().enumerate() {
        for &b in &order[oi + 1..] {
            if xmin(b) > xmax(a) {
                break;
            }
            let (p, q) = segs[a];
            let (r, t) = segs[b];
            if p == r || p == t || q == r || q == t {
                continue;
            }
            if let Some(x) = proper_intersection(p, q, r, t) {
                let key = (a.min(b), a.max(b));
                if best.is_none_or(|(i, j, _)| key < (i, j)) {
                    best = Some((key.0, key.1, x));
                }
            }
        }
    }
    best.map(|(_, _, x)| x)
}

fn proper_intersection(p: Point, q: Point, r: Point, t: Point) -> Option<Point> {
    let d1 = cross(sub(q, p), sub(r, p));
    let d2 = cross(sub(q, p), sub(t, p));
    let d3 = cross(sub(t, r), sub(p, r));
    let d4 = cross(sub(t, r), sub(q, r));
    if d1 * d2 < 0.0 && d3 * d4 < 0.0 {
        let u = d3 / (d3 - d4);
        Some([p[0] + u * (q[0] - p[0]), p[1] + u * (q[1] - p[1])])
    } else {
        None
    }
}

/// Splits the degree-≤2 vertex graph into chains. Open chains (ending on
/// the domain boundary) come first, then cycles; each in order of their
/// lowest vertex index so the output is deterministic.
fn assemble_chains(adjacency: &[Vec<usize>]) -> Vec<(Vec<usize>, bool)> {
    let n = adjacency.len();
    let mut used = vec![false; n];
    let mut out = Vec::new();
    let walk = |start: usize, used: &mut Vec<bool>| {
        let mut chain = vec![start];
        used[start] = true;
        let mut prev = usize::MAX;
        let mut cur = start;
        loop {
            let next = adjacency[cur].iter().copied().find(|&k| k != prev && !used[k]);
            match next {
                Some(k) => {
                    used[k] = true;
                    chain.push(k);
                    prev = cur;
                    cur = k;
                }
                None => break,
            }
        }
        chain
    };
    for s in 0..n {
        if !used[s] && adjacency[s].len() == 1 {
            out.push((walk(s, &mut used), false));
        }
    }
    for s in 0..n {
        if !used[s] {
            out.push((walk(s, &mut used), true));
        }
    }
    out
}

/// Sets `f_sign_flipped` so that `J∇f` points along the counter-clockwise
/// traversal at every vertex, and records the smallest `|∇f|` seen.
pub fn orient_and_sign(f: &ScalarField, mut ring: Ring) -> Result<Ring> {
    let n = ring.vertices.len();
    let (mut positive, mut negative) = (0usize, 0usize);
    let mut min_grad = f64::INFINITY;
    let base = f.with_flip(false);
    for i in 0..n {
        let p = ring.vertices[i];
        let tangent = sub(ring.vertices[(i + 1) % n], ring.vertices[(i + n - 1) % n]);
        let g = base.grad(p).map_err(Error::eval(p))?;
        min_grad = min_grad.min(norm(g));
        let s = dot(rot(g), tangent);
        if s > 0.0 {
            positive += 1;
        } else {
            negative += 1;
        }
    }
    if positive > 0 && negative > 0 {
        return Err(Error::InconsistentOrientation { positive, negative });
    }
    ring.f_sign_flipped = negative > 0;
    ring.min_grad_norm = min_grad;
    Ok(ring)
}
