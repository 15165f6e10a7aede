pub mod arith;
pub mod catalog;
pub mod cli;
pub mod error;
pub mod global;
pub mod local;
pub mod oracle;
pub mod semilin;

pub use error::{Error, Result};
