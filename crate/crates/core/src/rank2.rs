//! Deep enumeration of rank-2 cluster algebras through the two-term
//! recurrence `x_{m+1} x_{m-1} = x_m^r + 1`.
//!
//! In rank 2 every seed is a consecutive pair `(x_m, x_{m+1})`, so the
//! exchange graph is a line (or a cycle when the recurrence closes), and
//! the chain replaces the full seed search with a single bidirectional
//! sweep. Agreement with the general engine is covered by tests.

use crate::laurent::LaurentPoly;
use crate::seed::SeedError;
use num_bigint::BigInt;

/// A window of consecutive rank-2 cluster variables `x_m`, written in the
/// base cluster `(x_1, x_2)`.
#[derive(Clone, Debug)]
pub struct Rank2Chain {
    r: u32,
    depth: u32,
    /// `(m, x_m)` ascending by `m`. For a periodic chain this is one full
    /// period starting at `m = 1`; otherwise `m` runs over
    /// `2 - depth ..= 1 + depth`.
    window: Vec<(i64, LaurentPoly)>,
    period: Option<usize>,
}

/// Runs the recurrence from the seed pair `(x_1, x_2)`, extending in both
/// directions. For `r <= 1` the chain closes into a finite cycle, which is
/// detected and reported; for `r >= 2` the window holds `2 * depth`
/// pairwise distinct variables.
pub fn enumerate_chain(r: u32, depth: u32) -> Result<Rank2Chain, SeedError> {
    assert!(depth >= 1, "depth must be at least 1");
    let x1 = LaurentPoly::variable(2, 0);
    let x2 = LaurentPoly::variable(2, 1);
    let one = LaurentPoly::one(2);

    let step = |toward: &LaurentPoly, away: &LaurentPoly| -> Result<LaurentPoly, SeedError> {
        toward
            .pow(r)
            .add(&one)
            .div_exact(away)
            .ok_or(SeedError::DivisionNotExact { direction: 0 })
    };

    // Walk upward first, watching for the seed pair to reappear. The
    // window covers m in 2 - depth ..= 1 + depth, so the upward half holds
    // depth + 1 entries.
    let mut upward: Vec<LaurentPoly> = vec![x1.clone(), x2.clone()];
    let mut period = None;
    while upward.len() < 1 + depth as usize {
        let m = upward.len();
        let next = step(&upward[m - 1], &upward[m - 2])?;
        if upward[m - 1] == x1 && next == x2 {
            period = Some(m - 1);
            break;
        }
        upward.push(next);
    }

    if let Some(p) = period {
        // One full period, indices 1..=p.
        let window = upward
            .into_iter()
            .take(p)
            .enumerate()
            .map(|(i, v)| (i as i64 + 1, v))
            .collect();
        return Ok(Rank2Chain {
            r,
            depth,
            window,
            period: Some(p),
        });
    }

    // Aperiodic: extend downward to m = 2 - depth.
    let mut downward: Vec<LaurentPoly> = Vec::new();
    {
        let mut toward = x1.clone(); // x_m while computing x_{m-1}
        let mut away = x2.clone(); // x_{m+1}
        for _ in 0..depth - 1 {
            let prev = step(&toward, &away)?;
            away = toward;
            toward = prev.clone();
            downward.push(prev);
        }
    }

    let mut window: Vec<(i64, LaurentPoly)> = Vec::with_capacity(2 * depth as usize);
    for (i, v) in downward.into_iter().enumerate().rev() {
        window.push((-(i as i64), v));
    }
    for (i, v) in upward.into_iter().enumerate() {
        window.push((i as i64 + 1, v));
    }
    Ok(Rank2Chain {
        r,
        depth,
        window,
        period: None,
    })
}

impl Rank2Chain {
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    /// `Some(p)` when the recurrence closed into a cycle of length `p`.
    pub fn period(&self) -> Option<usize> {
        self.period
    }

    /// `(m, x_m)` pairs in ascending chain order.
    pub fn window(&self) -> &[(i64, LaurentPoly)] {
        &self.window
    }

    pub fn variable_at(&self, m: i64) -> Option<&LaurentPoly> {
        self.window
            .iter()
            .find(|(idx, _)| *idx == m)
            .map(|(_, v)| v)
    }

    pub fn distinct_variables(&self) -> Vec<&LaurentPoly> {
        let mut vars: Vec<&LaurentPoly> = self.window.iter().map(|(_, v)| v).collect();
        vars.sort();
        vars.dedup();
        vars
    }

    /// The variables whose denominator vector does *not* have both entries
    /// positive. For `r >= 2` these are exactly `x_1`, `x_2`,
    /// `(x_1^r + 1)/x_2` and `(x_2^r + 1)/x_1`.
    pub fn special_variables(&self) -> Vec<(i64, LaurentPoly)> {
        self.window
            .iter()
            .filter(|(_, v)| {
                let d = v.den_vector();
                !(d.entries()[0] > 0 && d.entries()[1] > 0)
            })
            .cloned()
            .collect()
    }

    /// The clusters of the chain: consecutive pairs `(x_m, x_{m+1})`,
    /// wrapping around when the chain is periodic.
    pub fn clusters(&self) -> Vec<(&LaurentPoly, &LaurentPoly)> {
        let len = self.window.len();
        match self.period {
            Some(_) => (0..len)
                .map(|i| (&self.window[i].1, &self.window[(i + 1) % len].1))
                .collect(),
            None => (0..len - 1)
                .map(|i| (&self.window[i].1, &self.window[i + 1].1))
                .collect(),
        }
    }

    /// How many chain clusters contain `x_1`.
    pub fn clusters_containing_x1(&self) -> usize {
        let x1 = LaurentPoly::variable(2, 0);
        self.clusters()
            .into_iter()
            .filter(|(a, b)| **a == x1 || **b == x1)
            .count()
    }

    /// The recurrence identity `x_{m+1} x_{m-1} - x_m^r - 1 = 0` over every
    /// computed consecutive triple.
    pub fn recurrence_holds(&self) -> bool {
        let one = LaurentPoly::one(2);
        let len = self.window.len();
        let triple_ok = |a: &LaurentPoly, b: &LaurentPoly, c: &LaurentPoly| {
            c.mul(a).sub(&b.pow(self.r)).sub(&one).is_zero()
        };
        match self.period {
            Some(_) => (0..len).all(|i| {
                triple_ok(
                    &self.window[i].1,
                    &self.window[(i + 1) % len].1,
                    &self.window[(i + 2) % len].1,
                )
            }),
            None => (0..len.saturating_sub(2)).all(|i| {
                triple_ok(&self.window[i].1, &self.window[i + 1].1, &self.window[i + 2].1)
            }),
        }
    }
}

/// The four distinguished rank-2 variables for `r >= 2`: the seed pair and
/// its two immediate exchanges.
pub fn expected_special_variables(r: u32) -> Vec<LaurentPoly> {
    let x1 = LaurentPoly::variable(2, 0);
    let x2 = LaurentPoly::variable(2, 1);
    let one = LaurentPoly::one(2);
    let down = x1
        .pow(r)
        .add(&one)
        .div_exact(&x2)
        .expect("monomial division");
    let up = x2
        .pow(r)
        .add(&one)
        .div_exact(&x1)
        .expect("monomial division");
    vec![x1, x2, down, up]
}

/// Convenience: `x_m^r + 1` as polynomial data for tests and reports.
pub fn recurrence_numerator(v: &LaurentPoly, r: u32) -> LaurentPoly {
    v.pow(r).add(&LaurentPoly::constant(2, BigInt::from(1)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn r1_chain_closes_with_five_variables() {
        let chain = enumerate_chain(1, 12).unwrap();
        assert_eq!(chain.period(), Some(5));
        assert_eq!(chain.distinct_variables().len(), 5);
        assert!(chain.recurrence_holds());
    }

    #[test]
    fn r0_chain_closes_with_four_variables() {
        let chain = enumerate_chain(0, 12).unwrap();
        assert_eq!(chain.period(), Some(4));
        let vars = chain.distinct_variables();
        assert_eq!(vars.len(), 4);
        let x1 = LaurentPoly::variable(2, 0);
        let x2 = LaurentPoly::variable(2, 1);
        let two_over_x1 = LaurentPoly::monomial(2, &[-1, 0], 2);
        let two_over_x2 = LaurentPoly::monomial(2, &[0, -1], 2);
        for expected in [&x1, &x2, &two_over_x1, &two_over_x2] {
            assert!(vars.contains(&expected), "missing {expected}");
        }
    }

    #[test]
    fn r2_chain_has_distinct_growing_variables() {
        let chain = enumerate_chain(2, 8).unwrap();
        assert_eq!(chain.period(), None);
        assert_eq!(chain.window().len(), 16);
        assert_eq!(chain.distinct_variables().len(), 16);
        assert!(chain.recurrence_holds());
        // Denominator-vector sums grow strictly away from the seed pair.
        let sums: Vec<(i64, i64)> = chain
            .window()
            .iter()
            .map(|(m, v)| {
                (
                    *m,
                    v.den_vector().entries().iter().map(|&d| i64::from(d)).sum(),
                )
            })
            .collect();
        for w in sums.windows(2) {
            let ((m0, s0), (m1, s1)) = (w[0], w[1]);
            if m1 <= 1 {
                assert!(s0 > s1, "({m0},{s0}) vs ({m1},{s1})");
            } else if m0 >= 2 {
                assert!(s1 > s0, "({m0},{s0}) vs ({m1},{s1})");
            }
        }
    }

    #[test]
    fn special_variables_for_r2_and_r3() {
        for (r, depth) in [(2u32, 8u32), (3, 6)] {
            let chain = enumerate_chain(r, depth).unwrap();
            let special = chain.special_variables();
            let expected = expected_special_variables(r);
            assert_eq!(special.len(), 4, "r = {r}");
            let special_indices: Vec<i64> = special.iter().map(|(m, _)| *m).collect();
            assert_eq!(special_indices, vec![0, 1, 2, 3], "r = {r}");
            for (_, v) in &special {
                assert!(expected.contains(v), "unexpected special variable {v}");
            }
        }
    }

    #[test]
    fn special_variables_for_r1_are_four_of_five() {
        // Denominator vectors of the pentagon are (-1,0), (0,-1), (1,0),
        // (0,1) and (1,1); only the last has both entries positive.
        let chain = enumerate_chain(1, 8).unwrap();
        assert_eq!(chain.special_variables().len(), 4);
    }

    #[test]
    fn exactly_two_clusters_contain_x1() {
        for r in [1, 2, 3] {
            let chain = enumerate_chain(r, 4).unwrap();
            assert_eq!(chain.clusters_containing_x1(), 2, "r = {r}");
        }
    }

    #[test]
    fn positivity_of_all_numerators() {
        for r in [0, 1, 2, 3] {
            let chain = enumerate_chain(r, 6).unwrap();
            for (_, v) in chain.window() {
                assert!(v.coefficients_all_positive(), "r = {r}: {v}");
            }
        }
    }

    #[test]
    fn chain_agrees_with_the_general_engine() {
        // Chain window [2 - depth, 1 + depth] matches the atlas enumeration
        // of the double-arrow quiver at BFS depth (depth - 1).
        use crate::atlas::{enumerate, EnumerationLimits};
        use crate::presets::preset;

        let chain = enumerate_chain(2, 4).unwrap();
        let atlas = enumerate(
            &preset("kronecker").unwrap(),
            &EnumerationLimits {
                max_seeds: 100_000,
                max_depth: 3,
            },
        )
        .unwrap();
        let mut chain_vars: Vec<LaurentPoly> =
            chain.window().iter().map(|(_, v)| v.clone()).collect();
        chain_vars.sort();
        assert_eq!(chain_vars, atlas.variables().to_vec());
    }
}
