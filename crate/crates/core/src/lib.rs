//! Deterministic multi-agent emotion contagion simulation with group-mood
//! sensing and orchestrated agent interventions.

pub mod affect;
pub mod error;
pub mod grouping;
pub mod io;
pub mod observation;
pub mod orchestration;
pub mod response;
pub mod sim;

pub use error::{Error, Result};
