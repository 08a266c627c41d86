pub mod analysis;
pub mod cli;
pub mod error;
pub mod fan;
pub mod field;
pub mod gelfand;
pub mod hecke;
pub mod specfun;
pub mod strichartz;
pub mod twisted;
pub mod weyl;

pub use error::{Error, Result};
pub use field::C64;
