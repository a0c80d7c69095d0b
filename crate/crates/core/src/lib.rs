//! Topological analysis of planar degenerate flows `f(x)·ẋ = JE(x)`.
//!
//! The crate extracts the degeneracy set `{f = 0}`, computes the tangency
//! count, ring index and winding number of every closed component,
//! classifies isolated zeros of the flow, and sums degeneracy indices over
//! a two-chart atlas of the sphere to test the generalized Poincaré–Hopf
//! identity `Σ Ind = 2(S1) − (Z1)`.

pub mod analysis;
pub mod deg_index;
pub mod equilibria;
pub mod error;
pub mod expr;
pub mod field;
pub mod flow;
pub mod levelset;
pub mod poly;
pub mod portrait;
pub mod ring_index;
pub mod sphere;
pub mod tolerance;

pub use analysis::{analyze_plane, PlaneAnalysis, RingEntry};
pub use deg_index::{check_poincare_hopf, enclosure_violations, index_of_ring, index_of_zero, IndexSum, PhVerdict};
pub use equilibria::{classify_zero, find_zeros, index_radius, poincare_index, Equilibrium, ZeroKind, ZeroSearch};
pub use error::{Chart, Error, Result};
pub use field::{pairing, Point, ScalarField, VectorField};
pub use flow::{integrate, integrate_with, FlowLimits, Termination, Trajectory};
pub use levelset::{extract_level_set, orient_and_sign, Domain, LevelSet, OpenCurve, Ring};
pub use portrait::{phase_portrait_svg, render_svg, PortraitOptions};
pub use ring_index::{analyze_ring, check_homotopy, classify_ring, ring_index, tangency_count, winding_number, RingClass, RingReport};
pub use sphere::{analyze_sphere, check_overlap, compactify, CatalogRing, CatalogZero, ChartFlow, SphereCatalog, SphereFlow};
pub use tolerance::Tolerances;
