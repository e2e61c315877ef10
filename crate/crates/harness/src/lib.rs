pub mod checks;
pub mod data;
pub mod error;
pub mod experiment;
pub mod settings;

pub use error::{HarnessError, Result};
