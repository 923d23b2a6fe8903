//! Shared helpers for the integration tests.
#![allow(dead_code)]

pub mod criteria;
pub mod oracles;
pub mod properties;
