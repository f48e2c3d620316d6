//! Verification harness: compatibility vs. denominator criteria, the
//! search for alternative cluster structures on a fixed variable set, and
//! the automorphism characterization, all checked exhaustively at the
//! scale of a finished atlas.
//!
//! Every verifier emits a [`CheckReport`] listing violations; an empty
//! violation list is the expected outcome on the types the suite covers.

use crate::atlas::{AtlasError, ExchangeAtlas};
use crate::laurent::{LaurentFraction, LaurentPoly};
use crate::quiver::BMatrix;
use crate::seed::Seed;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeSet;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ChecksError {
    #[error("check requires a complete atlas")]
    AtlasNotComplete,
    #[error("search budget of {0} exchange steps exhausted")]
    BudgetExhausted(u64),
    #[error(transparent)]
    Atlas(#[from] AtlasError),
}

/// Caps the number of exchange steps a search may spend.
#[derive(Clone, Copy, Debug)]
pub struct SearchBudget {
    pub max_steps: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_steps: 1_000_000,
        }
    }
}

/// Machine-readable outcome of one verifier run.
#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub check: String,
    #[serde(rename = "type")]
    pub type_label: String,
    pub parameters: serde_json::Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pairs_checked: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidates_checked: Option<usize>,
    pub violations: Vec<serde_json::Value>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

/// Verdict for one ordered variable pair.
#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub var_a: usize,
    pub var_b: usize,
    /// `None` means unknown (only possible on truncated atlases).
    pub compatible: Option<bool>,
    /// A cluster containing both, when compatibility is witnessed.
    pub witness_cluster: Option<usize>,
    /// For every cluster containing `var_a` and every seed realizing it,
    /// the expansion of `var_b` has no `var_a` in its denominator.
    pub denominator_clean: bool,
    /// Compatibility iff clean denominators; filled on complete atlases.
    pub equivalence_holds: Option<bool>,
}

/// True iff some cluster contains both variables. Requires a complete
/// atlas; on truncated atlases use [`compatible_bounded`].
pub fn compatible(atlas: &ExchangeAtlas, v: usize, w: usize) -> Result<bool, ChecksError> {
    if !atlas.is_complete() {
        return Err(ChecksError::AtlasNotComplete);
    }
    Ok(witness_cluster(atlas, v, w).is_some())
}

/// Semi-decision on any atlas: `Some(cluster)` when a discovered cluster
/// contains both variables, `None` (unknown, never "no") otherwise.
pub fn compatible_bounded(atlas: &ExchangeAtlas, v: usize, w: usize) -> Option<usize> {
    witness_cluster(atlas, v, w)
}

fn witness_cluster(atlas: &ExchangeAtlas, v: usize, w: usize) -> Option<usize> {
    (0..atlas.clusters().len()).find(|&c| {
        let cluster = &atlas.clusters()[c];
        cluster.binary_search(&v).is_ok() && cluster.binary_search(&w).is_ok()
    })
}

/// Expansion tables of every variable in every seed's coordinates; the
/// denominator checks below are lookups into this.
pub struct ExpansionTables {
    /// `tables[seed][var]` = expansion of `var` in `seed`'s coordinates.
    tables: Vec<Vec<LaurentPoly>>,
}

impl ExpansionTables {
    pub fn build(atlas: &ExchangeAtlas) -> Result<ExpansionTables, ChecksError> {
        let tables = (0..atlas.seeds().len())
            .into_par_iter()
            .map(|s| atlas.expand_all_in_seed(s))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(ExpansionTables { tables })
    }

    pub fn expansion(&self, seed: usize, var: usize) -> &LaurentPoly {
        &self.tables[seed][var]
    }
}

/// True iff for every enumerated cluster containing `v` and every seed
/// realizing it, the expansion of `w` in that seed has no `v` in its
/// denominator.
pub fn denominator_clean(
    atlas: &ExchangeAtlas,
    tables: &ExpansionTables,
    v: usize,
    w: usize,
) -> bool {
    for seed in 0..atlas.seeds().len() {
        let Some(pos) = atlas.seeds()[seed]
            .vars
            .iter()
            .position(|u| *u == atlas.variables()[v])
        else {
            continue;
        };
        if tables.expansion(seed, w).has_var_in_denominator(pos) {
            return false;
        }
    }
    true
}

/// All ordered-pair verdicts on a complete atlas.
pub fn pair_reports(atlas: &ExchangeAtlas) -> Result<Vec<PairReport>, ChecksError> {
    if !atlas.is_complete() {
        return Err(ChecksError::AtlasNotComplete);
    }
    let tables = ExpansionTables::build(atlas)?;
    let n = atlas.variables().len();
    let mut reports = Vec::with_capacity(n * n);
    for v in 0..n {
        for w in 0..n {
            let witness = witness_cluster(atlas, v, w);
            let clean = denominator_clean(atlas, &tables, v, w);
            reports.push(PairReport {
                var_a: v,
                var_b: w,
                compatible: Some(witness.is_some()),
                witness_cluster: witness,
                denominator_clean: clean,
                equivalence_holds: Some(witness.is_some() == clean),
            });
        }
    }
    Ok(reports)
}

/// Checks the equivalence "compatible iff no denominator occurrence" over
/// every ordered pair of a complete atlas.
pub fn verify_conjecture3(atlas: &ExchangeAtlas) -> Result<CheckReport, ChecksError> {
    let started = Instant::now();
    let reports = pair_reports(atlas)?;
    let violations: Vec<serde_json::Value> = reports
        .iter()
        .filter(|r| r.equivalence_holds == Some(false))
        .map(|r| {
            json!({
                "var_a": r.var_a,
                "var_b": r.var_b,
                "compatible": r.compatible,
                "denominator_clean": r.denominator_clean,
            })
        })
        .collect();
    Ok(CheckReport {
        check: "conjecture3".into(),
        type_label: atlas.base().matrix.classify().to_string(),
        parameters: json!({ "variables": atlas.variables().len() }),
        pairs_checked: Some(reports.len()),
        candidates_checked: None,
        violations,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Checks the one-directional statement on any atlas, truncated included:
/// witnessed-compatible pairs must have clean denominators over every
/// enumerated cluster.
pub fn verify_lemma21(atlas: &ExchangeAtlas) -> Result<CheckReport, ChecksError> {
    let started = Instant::now();
    let tables = ExpansionTables::build(atlas)?;
    let n = atlas.variables().len();
    let mut pairs = 0usize;
    let mut violations = Vec::new();
    for v in 0..n {
        for w in 0..n {
            let Some(witness) = witness_cluster(atlas, v, w) else {
                continue;
            };
            pairs += 1;
            if !denominator_clean(atlas, &tables, v, w) {
                violations.push(json!({
                    "var_a": v,
                    "var_b": w,
                    "witness_cluster": witness,
                }));
            }
        }
    }
    Ok(CheckReport {
        check: "lemma21".into(),
        type_label: atlas.base().matrix.classify().to_string(),
        parameters: json!({
            "variables": n,
            "status": atlas.status(),
        }),
        pairs_checked: Some(pairs),
        candidates_checked: None,
        violations,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Checks the symmetry implication on a complete atlas: if the expansions
/// of `w` avoid `v`, then the expansions of `v` avoid `w`.
pub fn verify_conjecture4(atlas: &ExchangeAtlas) -> Result<CheckReport, ChecksError> {
    let started = Instant::now();
    if !atlas.is_complete() {
        return Err(ChecksError::AtlasNotComplete);
    }
    let tables = ExpansionTables::build(atlas)?;
    let n = atlas.variables().len();
    let clean: Vec<Vec<bool>> = (0..n)
        .map(|v| (0..n).map(|w| denominator_clean(atlas, &tables, v, w)).collect())
        .collect();
    let mut violations = Vec::new();
    for v in 0..n {
        for w in 0..n {
            if clean[v][w] && !clean[w][v] {
                violations.push(json!({ "var_a": v, "var_b": w }));
            }
        }
    }
    Ok(CheckReport {
        check: "conjecture4".into(),
        type_label: atlas.base().matrix.classify().to_string(),
        parameters: json!({ "variables": n }),
        pairs_checked: Some(n * n),
        candidates_checked: None,
        violations,
        elapsed_ms: started.elapsed().as_millis() as u64,
    })
}

/// Outcome of one candidate `(subset, matrix)` in the structure search.
#[derive(Clone, Debug, Serialize)]
pub struct StructureCandidate {
    /// Indices into the atlas variable set, sorted.
    pub subset: Vec<usize>,
    pub matrix: BMatrix,
    pub outcome: StructureOutcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum StructureOutcome {
    Rejected(String),
    Accepted {
        /// Clusters generated by the candidate, as sorted index sets.
        clusters: Vec<Vec<usize>>,
        /// Whether the generated cluster set equals the original one.
        clusters_match: bool,
        /// Whether the generated exchange graph, with vertices labeled by
        /// clusters, has exactly the original cluster-adjacency relation.
        exchange_graph_match: bool,
    },
}

/// Exhaustive search for alternative cluster structures: every n-subset of
/// the variable set paired with every bounded exchange matrix is closed
/// under mutation inside the ambient field. A candidate escaping the
/// variable set is rejected at the first offending exchange; a candidate
/// that stabilizes is accepted iff its clusters cover the variable set
/// exactly.
///
/// Exchange steps are performed in fraction arithmetic: a candidate
/// exchange may produce an element that is not a Laurent polynomial in the
/// base cluster, and cross-multiplication handles membership uniformly.
pub fn unistructural_search(
    atlas: &ExchangeAtlas,
    bound: i32,
    budget: &SearchBudget,
) -> Result<(Vec<StructureCandidate>, CheckReport), ChecksError> {
    let started = Instant::now();
    if !atlas.is_complete() {
        return Err(ChecksError::AtlasNotComplete);
    }
    let n = atlas.rank();
    let vars = atlas.variables();

    let subsets = n_subsets(vars.len(), n);
    let matrices: Vec<BMatrix> = BMatrix::enumerate_all(n, bound).collect();

    let candidates: Vec<StructureCandidate> = subsets
        .par_iter()
        .flat_map_iter(|subset| {
            matrices.iter().map(move |matrix| (subset, matrix.clone()))
        })
        .map(|(subset, matrix)| {
            let outcome = close_candidate(atlas, subset, &matrix, budget);
            StructureCandidate {
                subset: subset.clone(),
                matrix,
                outcome,
            }
        })
        .collect();

    let accepted = candidates
        .iter()
        .filter(|c| matches!(c.outcome, StructureOutcome::Accepted { .. }))
        .count();
    let violations: Vec<serde_json::Value> = candidates
        .iter()
        .filter_map(|c| match &c.outcome {
            StructureOutcome::Accepted {
                clusters_match,
                exchange_graph_match,
                ..
            } if !clusters_match || !exchange_graph_match => Some(json!({
                "subset": c.subset,
                "matrix": c.matrix.rows(),
                "clusters_match": clusters_match,
                "exchange_graph_match": exchange_graph_match,
            })),
            _ => None,
        })
        .collect();

    let report = CheckReport {
        check: "unistructural".into(),
        type_label: atlas.base().matrix.classify().to_string(),
        parameters: json!({
            "bound": bound,
            "subsets": subsets.len(),
            "matrices": matrices.len(),
            "accepted": accepted,
            "budget": budget.max_steps,
        }),
        pairs_checked: None,
        candidates_checked: Some(candidates.len()),
        violations,
        elapsed_ms: started.elapsed().as_millis() as u64,
    };
    Ok((candidates, report))
}

/// Mutation closure of one candidate structure. Clusters are tracked as
/// seeds whose variables are identified members of the atlas variable set;
/// every exchange output is matched back into the set by
/// cross-multiplication before the closure continues.
fn close_candidate(
    atlas: &ExchangeAtlas,
    subset: &[usize],
    matrix: &BMatrix,
    budget: &SearchBudget,
) -> StructureOutcome {
    let vars = atlas.variables();
    let n = subset.len();
    let start = Seed {
        vars: subset.iter().map(|&i| vars[i].clone()).collect(),
        matrix: matrix.clone(),
    };
    let start_key = match start.canonical_key() {
        Ok(k) => k,
        Err(_) => return StructureOutcome::Rejected("duplicate variables".into()),
    };

    let mut steps = 0u64;
    let mut seen = BTreeSet::new();
    seen.insert(start_key);
    let mut queue = vec![start];
    let mut discovered: Vec<Seed> = vec![queue[0].clone()];
    let mut edges: BTreeSet<(Vec<usize>, Vec<usize>)> = BTreeSet::new();

    while let Some(seed) = queue.pop() {
        for k in 0..n {
            steps += 1;
            if steps > budget.max_steps {
                return StructureOutcome::Rejected("budget".into());
            }
            let numerator = seed.exchange_numerator(k);
            let exchanged = LaurentFraction::new(numerator, seed.vars[k].clone());
            // Match the exchange output back into the variable set.
            let Some(member) = vars.iter().position(|u| exchanged.equals_poly(u)) else {
                return StructureOutcome::Rejected("escapes the variable set".into());
            };
            let mut next = seed.clone();
            next.vars[k] = vars[member].clone();
            next.matrix = seed.matrix.mutate(k);
            let key = match next.canonical_key() {
                Ok(key) => key,
                Err(_) => return StructureOutcome::Rejected("duplicate variables".into()),
            };
            edges.insert(ordered_cluster_pair(atlas, &seed, &next));
            if seen.insert(key) {
                discovered.push(next.clone());
                queue.push(next);
            }
        }
    }

    let clusters: BTreeSet<Vec<usize>> = discovered
        .iter()
        .map(|s| cluster_indices(atlas, s))
        .collect();
    let clusters: Vec<Vec<usize>> = clusters.into_iter().collect();
    let union: BTreeSet<usize> = clusters.iter().flatten().copied().collect();
    if union.len() != vars.len() {
        return StructureOutcome::Rejected("does not cover the variable set".into());
    }

    let original: Vec<Vec<usize>> = atlas.clusters().to_vec();
    let clusters_match = clusters == original;
    let exchange_graph_match = clusters_match && edges == atlas_cluster_edges(atlas);
    StructureOutcome::Accepted {
        clusters,
        clusters_match,
        exchange_graph_match,
    }
}

fn cluster_indices(atlas: &ExchangeAtlas, seed: &Seed) -> Vec<usize> {
    let mut idxs: Vec<usize> = seed
        .vars
        .iter()
        .map(|v| {
            atlas
                .variable_index(v)
                .expect("candidate variables are atlas members")
        })
        .collect();
    idxs.sort_unstable();
    idxs
}

fn ordered_cluster_pair(
    atlas: &ExchangeAtlas,
    a: &Seed,
    b: &Seed,
) -> (Vec<usize>, Vec<usize>) {
    let ca = cluster_indices(atlas, a);
    let cb = cluster_indices(atlas, b);
    if ca <= cb { (ca, cb) } else { (cb, ca) }
}

/// The original exchange graph with vertices labeled by clusters.
fn atlas_cluster_edges(atlas: &ExchangeAtlas) -> BTreeSet<(Vec<usize>, Vec<usize>)> {
    atlas
        .undirected_edges()
        .into_iter()
        .map(|(s, t)| {
            let cs = atlas.clusters()[atlas.cluster_of_seed(s)].clone();
            let ct = atlas.clusters()[atlas.cluster_of_seed(t)].clone();
            if cs <= ct { (cs, ct) } else { (ct, cs) }
        })
        .collect()
}

/// One injective assignment of the base cluster into the variable set,
/// extended to a field map and tested on the variable set.
#[derive(Clone, Debug, Serialize)]
pub struct AutomorphismCandidate {
    /// `assignment[i]` is the variable index the i-th base variable maps to.
    pub assignment: Vec<usize>,
    /// The field map sends the variable set bijectively onto itself.
    pub permutes_variables: bool,
    /// The image of every cluster is again a cluster. Only meaningful when
    /// `permutes_variables` holds; it is never true without it.
    pub maps_clusters_to_clusters: bool,
    /// The permutation induced on the variable set, when it exists.
    pub permutation: Option<Vec<usize>>,
}

/// Enumerates every injective assignment of the base cluster into the
/// variable set, builds the induced field map by substitution, and tests
/// whether it permutes the variable set and whether it maps clusters to
/// clusters. The content of the automorphism characterization at this
/// scale: the first property forces the second, with zero counterexamples.
pub fn verify_theorem1(
    atlas: &ExchangeAtlas,
    budget: &SearchBudget,
) -> Result<(Vec<AutomorphismCandidate>, CheckReport), ChecksError> {
    let started = Instant::now();
    if !atlas.is_complete() {
        return Err(ChecksError::AtlasNotComplete);
    }
    let n = atlas.rank();
    let vars = atlas.variables();
    let base = atlas.base();

    let assignments = injective_assignments(vars.len(), n);
    if (assignments.len() as u64).saturating_mul(vars.len() as u64) > budget.max_steps {
        return Err(ChecksError::BudgetExhausted(budget.max_steps));
    }

    let candidates: Vec<AutomorphismCandidate> = assignments
        .par_iter()
        .map(|assignment| evaluate_assignment(atlas, base, assignment))
        .collect();

    let violations: Vec<serde_json::Value> = candidates
        .iter()
        .filter(|c| c.permutes_variables && !c.maps_clusters_to_clusters)
        .map(|c| json!({ "assignment": c.assignment }))
        .collect();

    let accepted = candidates.iter().filter(|c| c.permutes_variables).count();
    let report = CheckReport {
        check: "theorem1".into(),
        type_label: atlas.base().matrix.classify().to_string(),
        parameters: json!({
            "assignments": candidates.len(),
            "automorphisms": accepted,
        }),
        pairs_checked: None,
        candidates_checked: Some(candidates.len()),
        violations,
        elapsed_ms: started.elapsed().as_millis() as u64,
    };
    Ok((candidates, report))
}

fn evaluate_assignment(
    atlas: &ExchangeAtlas,
    base: &Seed,
    assignment: &[usize],
) -> AutomorphismCandidate {
    let vars = atlas.variables();
    let images: Vec<LaurentFraction> = assignment
        .iter()
        .map(|&i| LaurentFraction::from_poly(vars[i].clone()))
        .collect();

    // Base variables are the coordinates, so the field map evaluates any
    // base-coordinate expression by substitution. The base seed's variable
    // at position i must be x_i for the images to line up.
    debug_assert!(base
        .vars
        .iter()
        .enumerate()
        .all(|(i, v)| *v == LaurentPoly::variable(base.rank(), i)));

    let mut permutation = Vec::with_capacity(vars.len());
    for v in vars {
        let image = v.substitute(&images);
        match vars.iter().position(|u| image.equals_poly(u)) {
            Some(target) => permutation.push(target),
            None => {
                return AutomorphismCandidate {
                    assignment: assignment.to_vec(),
                    permutes_variables: false,
                    maps_clusters_to_clusters: false,
                    permutation: None,
                };
            }
        }
    }
    let bijective = {
        let distinct: BTreeSet<usize> = permutation.iter().copied().collect();
        distinct.len() == vars.len()
    };
    if !bijective {
        return AutomorphismCandidate {
            assignment: assignment.to_vec(),
            permutes_variables: false,
            maps_clusters_to_clusters: false,
            permutation: None,
        };
    }

    let cluster_set: BTreeSet<&Vec<usize>> = atlas.clusters().iter().collect();
    let maps_clusters = atlas.clusters().iter().all(|cluster| {
        let mut image: Vec<usize> = cluster.iter().map(|&v| permutation[v]).collect();
        image.sort_unstable();
        cluster_set.contains(&image)
    });

    AutomorphismCandidate {
        assignment: assignment.to_vec(),
        permutes_variables: true,
        maps_clusters_to_clusters: maps_clusters,
        permutation: Some(permutation),
    }
}

fn n_subsets(total: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    fn rec(start: usize, total: usize, n: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        let needed = n - current.len();
        for i in start..=total.saturating_sub(needed) {
            current.push(i);
            rec(i + 1, total, n, current, out);
            current.pop();
        }
    }
    rec(0, total, n, &mut current, &mut out);
    out
}

fn injective_assignments(total: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    let mut used = vec![false; total];
    fn rec(
        total: usize,
        n: usize,
        current: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        for i in 0..total {
            if !used[i] {
                used[i] = true;
                current.push(i);
                rec(total, n, current, used, out);
                current.pop();
                used[i] = false;
            }
        }
    }
    rec(total, n, &mut current, &mut used, &mut out);
    out
}

/// Composition table sanity for accepted automorphisms: the set of induced
/// permutations must be closed under composition and inverse.
pub fn permutations_form_group(perms: &[Vec<usize>]) -> bool {
    let set: BTreeSet<&Vec<usize>> = perms.iter().collect();
    for p in perms {
        // Inverse.
        let mut inv = vec![0usize; p.len()];
        for (i, &pi) in p.iter().enumerate() {
            inv[pi] = i;
        }
        if !set.contains(&inv) {
            return false;
        }
        // Compositions.
        for q in perms {
            let composed: Vec<usize> = (0..p.len()).map(|i| p[q[i]]).collect();
            if !set.contains(&composed) {
                return false;
            }
        }
    }
    true
}
