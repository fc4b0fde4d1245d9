//! Numerical exterior calculus for Maxwell eigenproblems with mixed boundary
//! conditions: form algebra, radial splitting on cones, half-circle and
//! half-disk eigenforms, Dirichlet–Neumann fields, and regularity checks.

pub mod bessel;
pub mod dnfields;
pub mod error;
pub mod exterior;
pub mod linalg;
pub mod multiindex;
pub mod polar;
pub mod quadrature;
pub mod regularity;
pub mod spectrum1d;
pub mod spectrum2d;
pub mod spherical;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

/// Caps the worker threads of the global pool. Only the first call before
/// any parallel work takes effect; later calls return `false`.
pub fn set_thread_limit(threads: usize) -> bool {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().is_ok()
}
