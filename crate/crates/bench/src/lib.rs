//! Shared fixtures for the engine benchmarks.

use cluster_atlas::laurent::LaurentPoly;
use cluster_atlas::presets::preset;
use cluster_atlas::quiver::BMatrix;
use cluster_atlas::rank2::enumerate_chain;

pub fn matrix(name: &str) -> BMatrix {
    preset(name).expect("known preset")
}

/// A pair of mid-sized dense rank-2 polynomials whose product and exact
/// quotient exercise the arithmetic kernels.
pub fn dense_pair() -> (LaurentPoly, LaurentPoly) {
    let chain = enumerate_chain(3, 5).expect("chain enumerates");
    let a = chain.variable_at(6).expect("window covers m = 6").clone();
    let b = chain.variable_at(5).expect("window covers m = 5").clone();
    (a, b)
}
