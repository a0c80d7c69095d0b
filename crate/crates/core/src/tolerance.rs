/// Numerical thresholds shared by the analyses.
///
/// Relative thresholds are multiplied by a scale measured on the problem
/// itself, so positively rescaled inputs produce identical verdicts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative to the largest `|∇f|` sampled on the grid.
    pub eps_regular: f64,
    /// Absolute bound on `|f|` at polished level-set vertices.
    pub eps_f: f64,
    /// Relative to the largest `|E|` on a ring.
    pub eps_e: f64,
    /// Relative to `max|JE|·max|∇f|` on a ring.
    pub eps_reducible: f64,
    /// A sign-preserving dip of `⟨JE,∇f⟩` below this (relative, same scale as
    /// `eps_reducible`) counts as a non-simple tangency.
    pub eps_tangency: f64,
    /// Residual bound for Newton-polished zeros of `E`.
    pub eps_zero: f64,
    /// Relative to the Frobenius norm of the flow Jacobian at a zero.
    pub eps_eig: f64,
    /// Absolute `|f|` at which trajectories stop on a ring.
    pub eps_ring: f64,
    /// Zeros closer than this to a ring are rejected.
    pub ring_clearance: f64,
    /// Zeros closer than this are merged.
    pub merge_radius: f64,
    /// Cap on level-set components per domain.
    pub max_components: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_regular: 1e-6,
            eps_f: 1e-10,
            eps_e: 1e-9,
            eps_reducible: 1e-7,
            eps_tangency: 1e-8,
            eps_zero: 1e-10,
            eps_eig: 1e-8,
            eps_ring: 1e-6,
            ring_clearance: 1e-4,
            merge_radius: 1e-6,
            max_components: 64,
        }
    }
}
