pub mod analysis;
pub mod chc;
pub mod counting;
pub mod displacement;
pub mod error;
pub mod groups;
pub mod hyperbolic;
pub mod job;

pub use error::{Error, Result};
