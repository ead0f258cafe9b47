pub mod cli;
pub mod concentration;
pub mod error;
pub mod gates;
pub mod infomeasures;
pub mod montecarlo;
pub mod protocols;
pub mod resources;
pub mod simcore;

pub use error::{Error, Result};
