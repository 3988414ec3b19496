pub mod asymptotics;
pub mod error;
pub mod gt;
pub mod hp;
pub mod linalg;
pub mod pipeline;
pub mod plancherel;
pub mod rsk;
pub mod sequence;
pub mod uea;
pub mod wigner;

pub use error::{Error, Result};
pub use gt::{GtPath, Signature};
