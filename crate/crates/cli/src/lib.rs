//! Command-line front end for the scattering engine: configuration parsing,
//! CSV emission, preset figure data, and randomized verification.

pub mod config;
pub mod figures;
pub mod output;
pub mod run;
pub mod verify;
