pub mod error;
pub mod modulus;
pub mod quad;
pub mod special;

pub use error::{Error, Result};
pub mod spaces;
pub mod functionals;
pub mod equivalence;
pub mod cli;
