pub mod arith;
pub mod cocycle;
pub mod divisors;
pub mod elliptic;
pub mod cli;
pub mod error;
pub mod hecke;
pub mod modsym;
pub mod trigfun;

pub use error::{Error, Result};
