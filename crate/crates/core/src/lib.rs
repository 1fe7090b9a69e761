//! Pattern-driven static bug finding for a subset of C.

pub mod checker;
pub mod config;
pub mod frontend;
pub mod ir;
pub mod pattern;
pub mod points_to;
pub mod report;
pub mod traverse;
