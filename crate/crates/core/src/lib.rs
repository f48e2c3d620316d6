//! Exact symbolic engine for skew-symmetric cluster algebras: seed
//! mutation, Laurent expansion, exchange-graph enumeration, and a
//! verification harness for structural properties (compatibility vs.
//! denominators, unistructurality, automorphism behaviour) at desk scale.

#![forbid(unsafe_code)]
// Index loops in the mutation and classification code mirror the matrix
// formulas they implement.
#![allow(clippy::needless_range_loop)]

pub mod atlas;
pub mod checks;
pub mod laurent;
pub mod presets;
pub mod quiver;
pub mod rank2;
pub mod seed;

pub use atlas::{enumerate, AtlasError, AtlasStatus, EnumerationLimits, ExchangeAtlas};
pub use laurent::{DenVector, ExponentVec, LaurentFraction, LaurentPoly};
pub use quiver::{load_quiver_json, BMatrix, Dynkin, Euclidean, QuiverError, TypeLabel};
pub use rank2::{enumerate_chain, Rank2Chain};
pub use seed::{Seed, SeedError, SeedKey};
