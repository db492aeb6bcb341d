//! Finite incidence geometry around Veronese spaces.
//!
//! The crate builds Veronese spaces `V(k, M)` over finite partial linear
//! spaces, constructs their hyperplanes from symplectic and alternating
//! forms, forms affine reducts with their parallelisms, and checks the
//! configurational and structural properties of all of these by exhaustive
//! (or seeded, budgeted) search.
//!
//! Field arithmetic is generic over [`algebra::FiniteField`]; the aliases
//! below name the prime fields the command-line tool is compiled for.

pub mod algebra;
pub mod configs;
pub mod error;
pub mod hyperplanes;
pub mod incidence;
pub mod io;
pub mod multiset;
pub mod parallelism;
pub mod pointset;
pub mod reduct;
pub mod report;
pub mod spaces;
pub mod suite;
pub mod veronese;

pub use error::{GeomError, Result};
pub use incidence::{IncidenceStructure, Label};
pub use multiset::Multiset;
pub use pointset::PointSet;

pub type Gf2 = algebra::Fp<2>;
pub type Gf3 = algebra::Fp<3>;
pub type Gf5 = algebra::Fp<5>;
pub type Gf7 = algebra::Fp<7>;
