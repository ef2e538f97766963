pub mod channel;
pub mod entanglement;
pub mod error;
pub mod extremal;
pub mod linalg;
pub mod mcstats;
pub mod output;
pub mod qstate;
pub mod robustness;
pub mod verify;

pub use entanglement::Measure;
pub use error::{Error, Result};
