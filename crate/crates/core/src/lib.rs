//! Firm-level supply network simulation under geopolitical rewiring policies.
//!
//! The crate models a supply chain as a directed firm graph (supplier → customer),
//! applies Country+1, Friendshoring and Reshoring rewiring, and measures the
//! structure before and after.

pub mod cli;
pub mod countries;
pub mod error;
pub mod generator;
pub mod io;
pub mod metrics;
pub mod network;
pub mod policy;
pub mod scopes;
pub mod sim;

pub use error::{Error, Result};
