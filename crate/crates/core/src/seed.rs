//! Seeds and seed mutation.
//!
//! A seed is an ordered cluster of Laurent polynomials (coordinates in a
//! fixed base cluster) together with an exchange matrix. The order matters
//! for applying the matrix; seed *identity* is decided by the canonical
//! key, which quotients out simultaneous permutations of positions.

use crate::laurent::LaurentPoly;
use crate::quiver::BMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SeedError {
    /// The exchange relation did not divide exactly. Reachable seeds never
    /// produce this: the Laurent phenomenon guarantees exactness, so this
    /// outcome signals corrupted input or an engine bug.
    #[error("exchange relation at direction {direction} is not an exact division")]
    DivisionNotExact { direction: usize },
    #[error("seed contains duplicate cluster variables")]
    DuplicateVariables,
}

/// A seed: `rank` cluster variables written in base-cluster coordinates,
/// plus the exchange matrix that drives mutation.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Seed {
    pub vars: Vec<LaurentPoly>,
    pub matrix: BMatrix,
}

/// Canonical representative of a seed modulo simultaneous permutation of
/// positions: the variables sorted by the canonical polynomial order, and
/// the matrix conjugated by the sorting permutation. Distinctness of the
/// variables makes the permutation, hence the key, unique.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SeedKey {
    pub vars: Vec<LaurentPoly>,
    pub matrix: BMatrix,
}

impl Seed {
    /// The initial seed of `B`: variable `i` is the coordinate monomial
    /// `x_i`.
    pub fn initial(matrix: &BMatrix) -> Seed {
        let n = matrix.rank();
        Seed {
            vars: (0..n).map(|i| LaurentPoly::variable(n, i)).collect(),
            matrix: matrix.clone(),
        }
    }

    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    /// Mutation in direction `k` (0-based): replaces `vars[k]` through the
    /// exchange relation and mutates the matrix. Applying the same
    /// direction twice returns to the original seed.
    pub fn mutate(&self, k: usize) -> Result<Seed, SeedError> {
        let new_var = self.exchange(k)?;
        let mut vars = self.vars.clone();
        vars[k] = new_var;
        Ok(Seed {
            vars,
            matrix: self.matrix.mutate(k),
        })
    }

    /// The exchange relation at direction `k`:
    /// `(prod of in-arrow variables + prod of out-arrow variables) / vars[k]`,
    /// with empty products equal to 1.
    pub fn exchange(&self, k: usize) -> Result<LaurentPoly, SeedError> {
        let numerator = self.exchange_numerator(k);
        numerator
            .div_exact(&self.vars[k])
            .ok_or(SeedError::DivisionNotExact { direction: k })
    }

    /// The sum of the two arrow products at `k`, before division by
    /// `vars[k]`.
    pub fn exchange_numerator(&self, k: usize) -> LaurentPoly {
        let n = self.rank();
        assert!(k < n, "mutation index {k} out of range");
        let rank = self.vars[k].rank();
        let mut incoming = LaurentPoly::one(rank);
        let mut outgoing = LaurentPoly::one(rank);
        for i in 0..n {
            let into_k = self.matrix.entry(i, k);
            if into_k > 0 {
                incoming = incoming.mul(&self.vars[i].pow(into_k as u32));
            }
            let out_of_k = self.matrix.entry(k, i);
            if out_of_k > 0 {
                outgoing = outgoing.mul(&self.vars[i].pow(out_of_k as u32));
            }
        }
        incoming.add(&outgoing)
    }

    /// Canonical key for deduplication up to simultaneous permutation.
    pub fn canonical_key(&self) -> Result<SeedKey, SeedError> {
        let n = self.rank();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| self.vars[a].cmp(&self.vars[b]));
        for w in order.windows(2) {
            if self.vars[w[0]] == self.vars[w[1]] {
                return Err(SeedError::DuplicateVariables);
            }
        }
        Ok(SeedKey {
            vars: order.iter().map(|&i| self.vars[i].clone()).collect(),
            matrix: self.matrix.permuted(&order),
        })
    }
}

impl SeedKey {
    /// A stable 64-bit fingerprint of the key (FNV-1a over a canonical
    /// byte encoding), identical across runs and platforms.
    pub fn stable_hash(&self) -> u64 {
        let mut hash = 0xcbf29ce484222325_u64;
        let mut eat = |bytes: &[u8]| {
            for &b in bytes {
                hash ^= u64::from(b);
                hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        for v in &self.vars {
            eat(v.to_json().as_bytes());
            eat(b"|");
        }
        for row in self.matrix.rows() {
            for &x in row {
                eat(&x.to_le_bytes());
            }
        }
        hash
    }
}
