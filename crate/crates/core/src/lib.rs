pub mod arith;
pub mod delegation;
pub mod dvverify;
pub mod error;
pub mod idkgc;
pub mod pairing;
pub mod rng;
#[cfg(test)]
mod testkit;
pub mod thsign;
pub mod vss;
pub mod warrant;

pub use error::{Error, Result};
