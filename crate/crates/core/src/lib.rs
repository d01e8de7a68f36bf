pub mod cli;
pub mod error;
pub mod matcore;
pub mod spectral;
pub mod parametrize;
pub mod synthesis;
pub mod verify;

pub use error::{Error, Result};
