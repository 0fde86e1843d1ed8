pub mod bconv;
pub mod error;
pub mod exec;
pub mod expansions;
pub mod lyapunov;
pub mod netautomaton;
pub mod numberfield;
pub mod poly;
pub mod roots;

pub use error::{Error, ErrorKind, Result};
pub use exec::Exec;
pub use numberfield::{parse_beta, BetaSystem, FieldElement, MinimalPolynomial, NumberField};
