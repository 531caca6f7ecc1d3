//! Auslander-Reiten theory of string algebras.

pub mod artheory;
pub mod configurations;
pub mod error;
pub mod families;
pub mod field;
pub mod linalg;
pub mod modules;
pub mod presentation;
pub mod radical;
pub mod strings;

pub use error::{Error, Result};
pub use field::{Field, Fp, Rational};
pub use linalg::{Matrix, Subspace};
pub use presentation::{parse_presentation, AlgebraPresentation};
pub use strings::{StringWord, Walk};

pub type QMatrix = Matrix<Rational>;
