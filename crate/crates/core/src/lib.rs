//! Arithmetic tables, Dirichlet characters and analytic tools for the
//! prime number theorem in arithmetic progressions.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arith;
pub mod characters;
pub mod error;
pub mod expsums;
pub mod multfunc;
pub mod periodic;
pub mod pnt_ap;
pub mod series;
pub mod siegel;
pub mod sieve_weights;
pub mod sum;

pub use arith::{ArithmeticTables, TableConfig};
pub use characters::{CharacterGroup, DirichletCharacter};
pub use error::{Error, Result};
pub use multfunc::MultiplicativeFunction;
