//! Closed algebra of test functions on the line: compactly supported smooth
//! trees, the pole-augmented algebra with prescribed behaviour at infinity,
//! tensor products for several variables, and composition.

pub mod efun;
pub mod smooth;
pub mod step;
pub mod tensor;

pub use efun::{compose_smooth, EFunction, PoleTerm};
pub use smooth::{SmoothFunction, Support, TabulatedSmooth};
pub use tensor::{TensorFunction, TensorTerm};
