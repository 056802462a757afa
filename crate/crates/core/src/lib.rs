//! Exact construction and verification of the cosimplicial chain operads built
//! from box products of the standard cosimplicial chain complex, together with
//! cochain operations on finite simplicial sets, Hochschild cochains and a
//! rational model of the little cubes operads.

pub mod boxprod;
pub mod check;
pub mod cochain;
pub mod conormal;
pub mod cubes;
pub mod delta;
pub mod error;
pub mod exact;
pub mod hochschild;
pub mod operad;

pub use error::{Error, Result};
