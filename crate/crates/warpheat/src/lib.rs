//! Numerical laboratory for the parabolic Schrödinger equation
//!
//! ```text
//!     u_t - Δu + V u = 0    on M × (0, T]
//! ```
//!
//! on rotationally symmetric manifolds `M` with metric `dr² + ψ(r)² dθ²`.
//! All data are radial, so everything reduces to the half-line operator
//! `∂²/∂r² + m(r) ∂/∂r` with drift `m = (n-1) ψ'/ψ` and measure
//! `ψ^{n-1} dr`.
//!
//! The crate builds and cross-checks, at desk scale:
//!
//! * exact stationary profiles `Δφ = Vφ` for several explicit potential
//!   families, plus decaying supersolutions `z = exp(-a₀ r^{α/2+1})` for
//!   potentials with power growth certificates ([`stationary`]);
//! * Dirichlet eigenvalues of `-Δ + V` on expanding balls and the
//!   extrapolated spectral bottom ([`spectrum`]);
//! * implicit time stepping for the original and the weighted
//!   (`w_t = Δ_μ w`, `dμ = φ² dν`) heat flows, the gauge transform
//!   `w = u/φ` between them, growing supersolution barriers and the
//!   exhaustion scheme on nested balls ([`evolve`]);
//! * weighted space-time uniqueness integrals and the admissibility
//!   classification of the radial weight `h` ([`uniqueness`]);
//! * scenario orchestration with deterministic JSON/CSV reports
//!   ([`scenario`]).

pub mod error;
pub mod evolve;
pub mod manifold;
pub mod numerics;
pub mod potential;
pub mod scenario;
pub mod spectrum;
pub mod stationary;
pub mod uniqueness;

pub use error::{Error, Result};
pub use manifold::{GridFunction, ModelManifold, RadialGrid, WarpFamily, WarpingFunction};
pub use potential::{CriticalExponent, GrowthCert, Potential};
pub use stationary::{ProfileKind, ResidualReport, StationaryProfile};

#[cfg(test)]
mod thread_safety {
    // every domain type is immutable after construction and usable from
    // concurrent solves
    fn assert_send_sync<T: Send + Sync>() {}

    #[test]
    fn domain_types_are_send_sync() {
        assert_send_sync::<crate::manifold::ModelManifold>();
        assert_send_sync::<crate::manifold::WarpingFunction>();
        assert_send_sync::<crate::manifold::GridFunction>();
        assert_send_sync::<crate::potential::Potential>();
        assert_send_sync::<crate::stationary::StationaryProfile>();
        assert_send_sync::<crate::spectrum::DiscreteOperator>();
        assert_send_sync::<crate::evolve::HeatSolution>();
        assert_send_sync::<crate::evolve::Barrier71>();
        assert_send_sync::<crate::uniqueness::HFunction>();
    }
}
