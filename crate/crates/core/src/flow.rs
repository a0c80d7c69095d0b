//! Trajectories of `ẋ = JE(x)/f(x)`.
//!
//! Trajectories end when they reach the degeneracy set. The velocity blows
//! up there and arrival takes finite time.

use crate::error::{Error, Result};
use crate::field::{norm, Point, ScalarField, VectorField};
use crate::levelset::Ring;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    TimeLimit,
    /// `|f| < eps_ring` reached at `at`; `ring` is the index of the ring hit,
    /// when known.
    RingHit { ring: Option<usize>, at: Point },
    Blowup,
    ZeroReached,
}

impl Termination {
    pub fn name(&self) -> &'static str {
        match self {
            Termination::TimeLimit => "TimeLimit",
            Termination::RingHit { .. } => "RingHit",
            Termination::Blowup => "Blowup",
            Termination::ZeroReached => "ZeroReached",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<(f64, Point)>,
    pub termination: Termination,
}

impl Trajectory {
    pub fn end(&self) -> (f64, Point) {
        *self.samples.last().expect("trajectory has a first sample")
    }

    /// Fills in which ring a ring hit landed on.
    pub fn label_ring(&mut self, rings: &[Ring]) {
        if let Termination::RingHit { ring, at } = &mut self.termination {
            *ring = rings
                .iter()
                .enumerate()
                .map(|(i, r)| (i, r.distance_to(*at)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(i, _)| i);
        }
    }
}

/// Stopping thresholds of the integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowLimits {
    pub eps_ring: f64,
    pub blowup: f64,
    pub min_speed: f64,
    pub min_step: f64,
}

impl Default for FlowLimits {
    fn default() -> Self {
        FlowLimits { eps_ring: 1e-6, blowup: 1e6, min_speed: 1e-12, min_step: 1e-14 }
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] =
    [5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0, -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0];

struct System<'a> {
    f: &'a ScalarField,
    e: &'a VectorField,
    side: f64,
}

impl System<'_> {
    /// `V(p)`, or `None` if `p` is on the wrong side of the degeneracy set
    /// or cannot be evaluated.
    fn velocity(&self, p: Point) -> Option<[f64; 2]> {
        let fv = self.f.eval(p).ok()?;
        if fv * self.side <= 0.0 {
            return None;
        }
        let g = self.e.je(p).ok()?;
        let v = [g[0] / fv, g[1] / fv];
        (v[0].is_finite() && v[1].is_finite()).then_some(v)
    }

    /// One Dormand–Prince step: the fifth-order point and the error vector.
    fn step(&self, y: Point, k1: [f64; 2], h: f64) -> Option<(Point, [f64; 2])> {
        let mut k = [[0.0; 2]; 7];
        k[0] = k1;
        for s in 1..7 {
            let mut p = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                p[0] += h * A[s][j] * kj[0];
                p[1] += h * A[s][j] * kj[1];
            }
            k[s] = self.velocity(p)?;
        }
        let mut y5 = y;
        let mut err = [0.0; 2];
        for s in 0..7 {
            for d in 0..2 {
                y5[d] += h * B5[s] * k[s][d];
                err[d] += h * (B5[s] - B4[s]) * k[s][d];
            }
        }
        Some((y5, err))
    }
}

/// Error relative to the size of the state. A purely absolute part would
/// let the step size grow to the stability limit once `|x|` falls below
/// `tol`, and trajectories would stall short of a zero.
fn error_ratio(y: Point, y_new: Point, err: [f64; 2], tol: f64) -> f64 {
    let sc = tol * (norm(y).max(norm(y_new)) + 1e-12);
    norm(err) / sc
}

/// Integrates from `x0` up to time `t_max` with an adaptive Dormand–Prince
/// 5(4) pair under relative and absolute tolerance `tol`.
pub fn integrate(f: &ScalarField, e: &VectorField, x0: Point, t_max: f64, tol: f64) -> Result<Trajectory> {
    integrate_with(f, e, x0, t_max, tol, &FlowLimits::default())
}

pub fn integrate_with(
    f: &ScalarField,
    e: &VectorField,
    x0: Point,
    t_max: f64,
    tol: f64,
    limits: &FlowLimits,
) -> Result<Trajectory> {
    let f0 = f.eval(x0).map_err(Error::eval(x0))?;
    if f0.abs() <= limits.eps_ring {
        return Err(Error::StartsOnRing { f_abs: f0.abs() });
    }
    let sys = System { f, e, side: f0.signum() };
    let mut samples = vec![(0.0, x0)];
    let (mut t, mut y) = (0.0, x0);
    let mut v = sys.velocity(y).ok_or_else(|| Error::eval(y)(crate::expr::EvalError::Domain("flow field")))?;
    let mut h = (0.01 * (1.0 + norm(y)) / norm(v).max(1e-300)).min(t_max.max(0.0));

    let done = |samples: Vec<(f64, Point)>, termination| Ok(Trajectory { samples, termination });
    loop {
        if norm(y) > limits.blowup {
            return done(samples, Termination::Blowup);
        }
        if norm(v) < limits.min_speed {
            return done(samples, Termination::ZeroReached);
        }
        if t >= t_max {
            return done(samples, Termination::TimeLimit);
        }
        h = h.min(t_max - t);
        if h < limits.min_step {
            return Err(Error::StepUnderflow { t });
        }

        let Some((y_new, err)) = sys.step(y, v, h) else {
            // a stage left the current side of the degeneracy set
            h *= 0.5;
            continue;
        };
        let ratio = error_ratio(y, y_new, err, tol);
        if ratio > 1.0 {
            h *= (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.5);
            continue;
        }
        let f_new = f.eval(y_new).map_err(Error::eval(y_new))?;
        if f_new * sys.side <= 0.0 {
            // crossed within an accepted step: land just before the set
            if let Some((dt, at)) = localize_hit(&sys, f, y, v, h, limits.eps_ring) {
                samples.push((t + dt, at));
                return done(samples, Termination::RingHit { ring: None, at });
            }
            h *= 0.5;
            continue;
        }
        t += h;
        y = y_new;
        samples.push((t, y));
        if f_new.abs() < limits.eps_ring {
            return done(samples, Termination::RingHit { ring: None, at: y });
        }
        v = match sys.velocity(y) {
            Some(v) => v,
            None => return Err(Error::eval(y)(crate::expr::EvalError::Domain("flow field"))),
        };
        h *= (0.9 * ratio.max(1e-10).powf(-0.2)).min(5.0);
    }
}

/// Bisection on the step length for a point with `0 < side·f < eps_ring`.
fn localize_hit(sys: &System, f: &ScalarField, y: Point, v: [f64; 2], h: f64, eps_ring: f64) -> Option<(f64, Point)> {
    let (mut lo, mut hi) = (0.0, h);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match sys.step(y, v, mid) {
            Some((p, _)) => {
                let fp = f.eval(p).ok()? * sys.side;
                if fp <= 0.0 {
                    hi = mid;
                } else if fp < eps_ring {
                    return Some((mid, p));
                } else {
                    lo = mid;
                }
            }
            None => hi = mid,
        }
    }
    None
}
