//! Exterior algebra and calculus of differential forms on boxes in `R^N`.

pub mod algebra;
pub mod checks;
pub mod expr;
pub mod form;
pub mod map;

pub use checks::{identity_report, IdentityReport};
pub use algebra::{codiff_local_coeffs, ext_d_coeffs, hodge_coeffs, wedge_coeffs, Coeff, FormValue};
pub use expr::{Expr, Leaf};
pub use form::{FieldForm, FormDocument, GridData, Nested, Repr, UniformGrid};
pub use map::SmoothMap;
