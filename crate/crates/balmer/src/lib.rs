//! A computational engine for finitely presented tensor categories with
//! extriangles: enumerate the radical thick tensor ideals of a presentation,
//! classify them against the supports of the prime spectrum, and check the
//! lattice/frame/space dualities that the classification factors through.
//! Alongside the spectral machinery sit exact-arithmetic matrix
//! factorizations with their tensor product, and a small splice calculus for
//! extension chains.
//!
//! Everything is exact and deterministic: object classes are label multisets,
//! polynomial coefficients are arbitrary-precision rationals, and every
//! enumeration walks a canonical order.

pub mod dot;
pub mod error;
pub mod ideal;
pub mod lattice;
pub mod mf;
pub mod poly;
pub mod presentation;
pub mod presets;
pub mod randgen;
pub mod report;
pub mod schema;
pub mod space;
pub mod splice;

pub use error::{EngineError, Result};
pub use report::{CheckResult, ValidationReport};
