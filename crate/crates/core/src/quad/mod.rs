//! Deterministic high-order quadrature of matrix-valued integrands over
//! plane regions, tuned for integrands that vanish to high order at the real
//! axis while the resolvent blows up there: panels refine geometrically
//! toward y = 0 and the thin leftover strip is dropped (exactly zero for
//! flat-cutoff Fourier extensions, O(y_min^N) for Taylor ones, with the
//! neglected bound reported by the calculus layer).

pub mod gauss;
pub mod multi;
pub mod plane;
pub mod spec;

pub use multi::{brute_force_pair, integrate_multi, TensorTermFields};
pub use plane::{integrate_plane, nodes, pairwise, refine_until, PlaneIntegral, TraceRow};
pub use spec::QuadratureSpec;
