//! Exchange-graph enumeration.
//!
//! Breadth-first closure of an initial seed under all mutations,
//! deduplicated by canonical seed key. The finished atlas owns the set of
//! cluster variables, the cluster list, and can re-expand any variable in
//! the coordinates of any discovered seed by replaying the closure with
//! paired coordinates.
//!
//! Enumeration may fan the frontier out over a rayon pool; results are
//! merged in a fixed order and the final atlas is re-indexed canonically,
//! so the outcome is independent of scheduling and worker count.

use crate::laurent::LaurentPoly;
use crate::quiver::BMatrix;
use crate::seed::{Seed, SeedError, SeedKey};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap, VecDeque};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AtlasError {
    #[error(transparent)]
    Seed(#[from] SeedError),
    #[error("variable index {0} out of range ({1} variables)")]
    UnknownVariable(usize, usize),
    #[error("seed index {0} out of range ({1} seeds)")]
    UnknownSeed(usize, usize),
    #[error("variable {0} not reachable from seed {1} in the truncated region")]
    Unreachable(usize, usize),
    #[error("invalid atlas JSON: {0}")]
    Json(String),
}

/// Caps on the breadth-first closure. Exceeding either produces a
/// `Truncated` atlas, never a failure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationLimits {
    pub max_seeds: usize,
    /// Maximal BFS distance from the initial seed. Seeds at exactly this
    /// depth are recorded but not expanded.
    pub max_depth: u32,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        // Covers E6-E8 comfortably and halts Euclidean runs quickly.
        EnumerationLimits {
            max_seeds: 100_000,
            max_depth: 64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtlasStatus {
    /// Every discovered seed had all of its mutations explored and they
    /// all landed on discovered seeds.
    Complete,
    /// A limit cut the closure short.
    Truncated,
}

/// The deduplicated exchange graph of a quiver, with the variable set and
/// cluster list extracted from all discovered seeds.
///
/// Seeds, variables and clusters are kept in canonical sorted order, so
/// two enumerations of the same matrix are structurally identical no
/// matter how the traversal was scheduled.
#[derive(Clone, Debug, Serialize)]
pub struct ExchangeAtlas {
    status: AtlasStatus,
    base: Seed,
    base_seed: usize,
    seeds: Vec<Seed>,
    depths: Vec<u32>,
    /// Directed mutation records `(seed, direction, seed)`, one per
    /// explored (seed, direction) pair; involutive partners both appear
    /// once their seeds are expanded.
    edges: Vec<(usize, usize, usize)>,
    variables: Vec<LaurentPoly>,
    clusters: Vec<Vec<usize>>,
    /// Cluster realized by each seed.
    seed_cluster: Vec<usize>,
    #[serde(skip)]
    key_index: HashMap<SeedKey, usize>,
}

impl PartialEq for ExchangeAtlas {
    fn eq(&self, other: &Self) -> bool {
        self.status == other.status
            && self.base == other.base
            && self.base_seed == other.base_seed
            && self.seeds == other.seeds
            && self.depths == other.depths
            && self.edges == other.edges
            && self.variables == other.variables
            && self.clusters == other.clusters
            && self.seed_cluster == other.seed_cluster
    }
}

impl Eq for ExchangeAtlas {}

/// Breadth-first closure of the initial seed of `b` under all mutations.
pub fn enumerate(b: &BMatrix, limits: &EnumerationLimits) -> Result<ExchangeAtlas, AtlasError> {
    let n = b.rank();
    let base = Seed::initial(b);
    let base_key = base.canonical_key()?;

    let mut index: HashMap<SeedKey, usize> = HashMap::new();
    let mut discovered: Vec<(Seed, u32)> = Vec::new();
    let mut raw_edges: Vec<(usize, usize, usize)> = Vec::new();
    let mut truncated = false;

    index.insert(base_key, 0);
    discovered.push((base.clone(), 0));

    let mut frontier: Vec<usize> = vec![0];
    let mut depth = 0u32;
    while !frontier.is_empty() {
        if depth >= limits.max_depth {
            // Seeds at the depth limit stay unexpanded.
            truncated = true;
            break;
        }
        // Expand the whole layer; the merge below runs in frontier order,
        // so scheduling cannot influence the result.
        let expansions: Vec<Vec<(usize, Seed, SeedKey)>> = frontier
            .par_iter()
            .map(|&si| -> Result<Vec<(usize, Seed, SeedKey)>, AtlasError> {
                let seed = &discovered[si].0;
                (0..n)
                    .map(|k| {
                        let child = seed.mutate(k)?;
                        let key = child.canonical_key()?;
                        Ok((k, child, key))
                    })
                    .collect()
            })
            .collect::<Result<_, _>>()?;

        let mut next_frontier = Vec::new();
        for (&parent, children) in frontier.iter().zip(expansions) {
            for (dir, child, key) in children {
                let child_idx = match index.get(&key) {
                    Some(&idx) => idx,
                    None => {
                        if discovered.len() >= limits.max_seeds {
                            truncated = true;
                            continue;
                        }
                        let idx = discovered.len();
                        index.insert(key, idx);
                        discovered.push((child, depth + 1));
                        next_frontier.push(idx);
                        idx
                    }
                };
                raw_edges.push((parent, dir, child_idx));
            }
        }
        frontier = next_frontier;
        depth += 1;
    }

    let status = if truncated {
        AtlasStatus::Truncated
    } else {
        AtlasStatus::Complete
    };
    Ok(assemble(base, discovered, raw_edges, index, status))
}

/// Re-indexes the raw BFS output into canonical order and extracts the
/// variable set and cluster list.
fn assemble(
    base: Seed,
    discovered: Vec<(Seed, u32)>,
    raw_edges: Vec<(usize, usize, usize)>,
    index: HashMap<SeedKey, usize>,
    status: AtlasStatus,
) -> ExchangeAtlas {
    let count = discovered.len();
    let mut keys: Vec<(SeedKey, usize)> = index.into_iter().collect();
    keys.sort();
    let mut remap = vec![0usize; count];
    for (new_idx, (_, old_idx)) in keys.iter().enumerate() {
        remap[*old_idx] = new_idx;
    }

    let mut seeds: Vec<Option<Seed>> = vec![None; count];
    let mut depths = vec![0u32; count];
    for (old_idx, (seed, depth)) in discovered.into_iter().enumerate() {
        seeds[remap[old_idx]] = Some(seed);
        depths[remap[old_idx]] = depth;
    }
    let seeds: Vec<Seed> = seeds.into_iter().map(|s| s.expect("remap is a bijection")).collect();

    let mut edges: Vec<(usize, usize, usize)> = raw_edges
        .into_iter()
        .map(|(a, dir, b)| (remap[a], dir, remap[b]))
        .collect();
    edges.sort_unstable();

    let variable_set: BTreeSet<LaurentPoly> =
        seeds.iter().flat_map(|s| s.vars.iter().cloned()).collect();
    let variables: Vec<LaurentPoly> = variable_set.into_iter().collect();

    let mut seed_cluster_raw: Vec<Vec<usize>> = Vec::with_capacity(count);
    for seed in &seeds {
        let mut idxs: Vec<usize> = seed
            .vars
            .iter()
            .map(|v| {
                variables
                    .binary_search(v)
                    .expect("every seed variable is in the variable set")
            })
            .collect();
        idxs.sort_unstable();
        seed_cluster_raw.push(idxs);
    }
    // Clusters numbered in sorted order of their index sets.
    let cluster_set: BTreeSet<Vec<usize>> = seed_cluster_raw.iter().cloned().collect();
    let clusters: Vec<Vec<usize>> = cluster_set.into_iter().collect();
    let seed_cluster: Vec<usize> = seed_cluster_raw
        .iter()
        .map(|c| clusters.binary_search(c).expect("cluster was collected"))
        .collect();

    let key_index: HashMap<SeedKey, usize> = keys
        .into_iter()
        .map(|(key, old_idx)| (key, remap[old_idx]))
        .collect();
    let base_seed = key_index[&base.canonical_key().expect("base key")];

    ExchangeAtlas {
        status,
        base,
        base_seed,
        seeds,
        depths,
        edges,
        variables,
        clusters,
        seed_cluster,
        key_index,
    }
}

impl ExchangeAtlas {
    pub fn status(&self) -> AtlasStatus {
        self.status
    }

    pub fn is_complete(&self) -> bool {
        self.status == AtlasStatus::Complete
    }

    pub fn rank(&self) -> usize {
        self.base.rank()
    }

    pub fn base(&self) -> &Seed {
        &self.base
    }

    /// Index of the initial seed in the canonical seed order.
    pub fn base_seed(&self) -> usize {
        self.base_seed
    }

    pub fn seeds(&self) -> &[Seed] {
        &self.seeds
    }

    pub fn seed_depth(&self, seed: usize) -> u32 {
        self.depths[seed]
    }

    pub fn edges(&self) -> &[(usize, usize, usize)] {
        &self.edges
    }

    /// Undirected mutation edges, each involutive pair counted once.
    pub fn undirected_edges(&self) -> BTreeSet<(usize, usize)> {
        self.edges
            .iter()
            .map(|&(a, _, b)| (a.min(b), a.max(b)))
            .collect()
    }

    /// The variable set X, sorted canonically.
    pub fn variables(&self) -> &[LaurentPoly] {
        &self.variables
    }

    pub fn variable_index(&self, v: &LaurentPoly) -> Option<usize> {
        self.variables.binary_search(v).ok()
    }

    /// Clusters as sorted variable-index sets, deduplicated and sorted.
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// The cluster realized by a seed.
    pub fn cluster_of_seed(&self, seed: usize) -> usize {
        self.seed_cluster[seed]
    }

    /// All clusters whose member set contains the given variable.
    pub fn clusters_containing(&self, var: usize) -> Result<Vec<usize>, AtlasError> {
        self.check_var(var)?;
        Ok((0..self.clusters.len())
            .filter(|&c| self.clusters[c].binary_search(&var).is_ok())
            .collect())
    }

    /// All seeds realizing the given cluster.
    pub fn seeds_realizing(&self, cluster: usize) -> Vec<usize> {
        (0..self.seeds.len())
            .filter(|&s| self.seed_cluster[s] == cluster)
            .collect()
    }

    pub fn contains_key(&self, key: &SeedKey) -> bool {
        self.key_index.contains_key(key)
    }

    pub fn seed_key(&self, seed: usize) -> SeedKey {
        self.seeds[seed]
            .canonical_key()
            .expect("atlas seeds have distinct variables")
    }

    fn check_var(&self, var: usize) -> Result<(), AtlasError> {
        if var >= self.variables.len() {
            return Err(AtlasError::UnknownVariable(var, self.variables.len()));
        }
        Ok(())
    }

    fn check_seed(&self, seed: usize) -> Result<(), AtlasError> {
        if seed >= self.seeds.len() {
            return Err(AtlasError::UnknownSeed(seed, self.seeds.len()));
        }
        Ok(())
    }

    /// The Laurent expansion of variable `var` in the coordinates of seed
    /// `seed`: the unique Laurent polynomial L with
    /// `L(u_1, ..., u_n) = variables[var]` where `u_i` are the seed's
    /// variables in base coordinates and position `i` of the result refers
    /// to position `i` of the seed.
    ///
    /// Replays the closure from the seed carrying (base, fresh) coordinate
    /// pairs, restricted to seeds already in the atlas, and stops as soon
    /// as the requested variable appears. Uniqueness of the Laurent
    /// expansion in a transcendence basis makes the result path
    /// independent.
    pub fn expand_in_base(&self, var: usize, seed: usize) -> Result<LaurentPoly, AtlasError> {
        self.check_var(var)?;
        self.check_seed(seed)?;
        let target = &self.variables[var];
        match self.rebase_walk(seed, Some(target))? {
            RebaseOutcome::Found(poly) => Ok(poly),
            RebaseOutcome::Table(_) => Err(AtlasError::Unreachable(var, seed)),
        }
    }

    /// Expansions of every atlas variable in the coordinates of one seed,
    /// computed in a single replay.
    pub fn expand_all_in_seed(&self, seed: usize) -> Result<Vec<LaurentPoly>, AtlasError> {
        self.check_seed(seed)?;
        match self.rebase_walk(seed, None)? {
            RebaseOutcome::Table(map) => self
                .variables
                .iter()
                .enumerate()
                .map(|(vi, v)| {
                    map.get(v)
                        .cloned()
                        .ok_or(AtlasError::Unreachable(vi, seed))
                })
                .collect(),
            RebaseOutcome::Found(_) => unreachable!("no target requested"),
        }
    }

    fn rebase_walk(
        &self,
        seed: usize,
        target: Option<&LaurentPoly>,
    ) -> Result<RebaseOutcome, AtlasError> {
        let n = self.rank();
        let start = &self.seeds[seed];
        let fresh_start = Seed {
            vars: (0..n).map(|i| LaurentPoly::variable(n, i)).collect(),
            matrix: start.matrix.clone(),
        };

        let mut expansions: HashMap<LaurentPoly, LaurentPoly> = HashMap::new();
        for (b, f) in start.vars.iter().zip(&fresh_start.vars) {
            expansions.insert(b.clone(), f.clone());
            if target == Some(b) {
                return Ok(RebaseOutcome::Found(f.clone()));
            }
        }

        let mut visited: BTreeSet<usize> = BTreeSet::new();
        visited.insert(seed);
        let mut queue: VecDeque<(Seed, Seed)> = VecDeque::new();
        queue.push_back((start.clone(), fresh_start));

        while let Some((base_seed, fresh_seed)) = queue.pop_front() {
            for k in 0..n {
                let next_base = base_seed.mutate(k)?;
                let key = next_base.canonical_key()?;
                let Some(&atlas_idx) = self.key_index.get(&key) else {
                    // Outside the recorded region of a truncated atlas.
                    continue;
                };
                if !visited.insert(atlas_idx) {
                    continue;
                }
                let next_fresh = fresh_seed.mutate(k)?;
                let new_base = &next_base.vars[k];
                let new_fresh = &next_fresh.vars[k];
                if let Some(existing) = expansions.get(new_base) {
                    assert_eq!(
                        existing, new_fresh,
                        "two mutation paths produced different expansions"
                    );
                } else {
                    expansions.insert(new_base.clone(), new_fresh.clone());
                }
                if target == Some(new_base) {
                    return Ok(RebaseOutcome::Found(new_fresh.clone()));
                }
                queue.push_back((next_base, next_fresh));
            }
        }
        Ok(RebaseOutcome::Table(expansions))
    }

    /// Canonical JSON of the full atlas.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("atlas serialization cannot fail")
    }

    pub fn from_json(s: &str) -> Result<ExchangeAtlas, AtlasError> {
        let repr: AtlasRepr =
            serde_json::from_str(s).map_err(|e| AtlasError::Json(e.to_string()))?;
        repr.into_atlas()
    }

    /// Graphviz DOT rendering: one node per seed, labeled by a stable
    /// 64-bit key fingerprint, one undirected edge per mutation pair.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph exchange_atlas {\n");
        for (i, _) in self.seeds.iter().enumerate() {
            let hash = self.seed_key(i).stable_hash();
            out.push_str(&format!("  s{i} [label=\"{hash:016x}\"];\n"));
        }
        for (a, b) in self.undirected_edges() {
            out.push_str(&format!("  s{a} -- s{b};\n"));
        }
        out.push_str("}\n");
        out
    }
}

enum RebaseOutcome {
    Found(LaurentPoly),
    Table(HashMap<LaurentPoly, LaurentPoly>),
}

#[derive(Deserialize)]
struct AtlasRepr {
    status: AtlasStatus,
    base: Seed,
    base_seed: usize,
    seeds: Vec<Seed>,
    depths: Vec<u32>,
    edges: Vec<(usize, usize, usize)>,
    variables: Vec<LaurentPoly>,
    clusters: Vec<Vec<usize>>,
    seed_cluster: Vec<usize>,
}

impl AtlasRepr {
    fn into_atlas(self) -> Result<ExchangeAtlas, AtlasError> {
        let count = self.seeds.len();
        if self.depths.len() != count || self.seed_cluster.len() != count {
            return Err(AtlasError::Json(
                "seed-indexed arrays have inconsistent lengths".into(),
            ));
        }
        if self.base_seed >= count {
            return Err(AtlasError::Json("base seed index out of range".into()));
        }
        for &(a, _, b) in &self.edges {
            if a >= count || b >= count {
                return Err(AtlasError::Json("edge index out of range".into()));
            }
        }
        for cluster in &self.clusters {
            if cluster.iter().any(|&v| v >= self.variables.len()) {
                return Err(AtlasError::Json("cluster variable index out of range".into()));
            }
        }
        let mut key_index = HashMap::new();
        for (i, seed) in self.seeds.iter().enumerate() {
            let key = seed.canonical_key().map_err(|e| AtlasError::Json(e.to_string()))?;
            if key_index.insert(key, i).is_some() {
                return Err(AtlasError::Json("duplicate seed in atlas".into()));
            }
        }
        Ok(ExchangeAtlas {
            status: self.status,
            base: self.base,
            base_seed: self.base_seed,
            seeds: self.seeds,
            depths: self.depths,
            edges: self.edges,
            variables: self.variables,
            clusters: self.clusters,
            seed_cluster: self.seed_cluster,
            key_index,
        })
    }
}
