pub mod baric;
pub mod derivedcat;
pub mod error;
pub mod exactlinalg;
pub mod exec;
pub mod posetrep;
pub mod serial;
pub mod staggering;
pub mod verify;

pub use error::{Error, Result};
