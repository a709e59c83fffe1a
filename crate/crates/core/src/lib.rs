//! Holomorphic retracts of balanced domains in C^N.
//!
//! Exact polynomial maps with idempotency certificates, norm-one projections
//! on ℓ^p spaces and polydiscs, Minkowski gauges and boundary probes, and
//! rectification of polynomial retracts of the plane.

pub mod case_studies;
pub mod domains;
pub mod error;
pub mod exact;
pub mod geometry;
pub mod linalg;
pub mod lp;
pub mod modular;
pub mod parse;
pub mod poly;
pub mod polymap;
pub mod region;
pub mod report;
pub mod retraction;
pub mod straighten;
pub mod sampling;
pub mod verdict;

pub use error::{Result, RetractError};
pub use exact::ExactComplex;
pub use domains::{BalancedDomain, DomainSpec};
pub use poly::{FloatPoly, MultiPoly};
pub use polymap::PolyMap;
