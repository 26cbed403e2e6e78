//! Exact q-series toolkit for encoding, verifying and searching for
//! Rogers-Ramanujan type "series = product" identities.
//!
//! Everything is computed with arbitrary-precision integers on truncated
//! Laurent series in `q`; equality checks are exact coefficient comparisons.

pub mod catalog;
pub mod dsl;
pub mod monomial;
pub mod partitions;
pub mod prodsearch;
pub mod qdifference;
pub mod qspecial;
pub mod series;
pub mod verify;

pub use monomial::Monomial;
pub use series::{BivSeries, Poly, QSeries, SeriesError, DEFAULT_ORDER};
