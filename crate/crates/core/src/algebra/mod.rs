//! Exact arithmetic over prime fields and the forms built on it.

pub mod field;
pub mod forms;
pub mod linalg;
pub mod projective;

pub use field::{is_prime, Field, FiniteField, Fp};
pub use forms::{AlternatingMultiForm, BilinearForm, QuadraticForm};
pub use projective::{all_vectors, projective_points, ProjectivePoint};
