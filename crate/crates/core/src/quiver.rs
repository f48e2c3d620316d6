//! Skew-symmetric exchange matrices and matrix mutation.
//!
//! A quiver without loops or 2-cycles on `n` vertices is encoded as the
//! skew-symmetric matrix with `b[i][j] > 0` meaning `b[i][j]` arrows from
//! `i` to `j`. Matrix mutation implements the usual three quiver
//! operations (insert composite arrows through the mutated vertex, reverse
//! incident arrows, cancel 2-cycles) in a single arithmetic rule.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuiverError {
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    NotSkewSymmetric(usize, usize),
    #[error("matrix is not square")]
    NotSquare,
    #[error("quiver has a loop at vertex {0}")]
    Loop(usize),
    #[error("quiver has a 2-cycle between vertices {0} and {1}")]
    TwoCycle(usize, usize),
    #[error("arrow multiplicity must be positive, got {0}")]
    BadMultiplicity(i32),
    #[error("vertex {0} out of range 1..={1}")]
    VertexOutOfRange(usize, usize),
    #[error("rank must be positive")]
    EmptyQuiver,
    #[error("unrecognized quiver JSON: expected an \"arrows\" or \"matrix\" object")]
    UnrecognizedFormat,
    #[error("invalid JSON: {0}")]
    Json(String),
}

/// Skew-symmetric integer exchange matrix of a quiver.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<i32>>", into = "Vec<Vec<i32>>")]
pub struct BMatrix {
    n: usize,
    rows: Vec<Vec<i32>>,
}

impl TryFrom<Vec<Vec<i32>>> for BMatrix {
    type Error = QuiverError;

    fn try_from(rows: Vec<Vec<i32>>) -> Result<Self, QuiverError> {
        BMatrix::new(rows)
    }
}

impl From<BMatrix> for Vec<Vec<i32>> {
    fn from(b: BMatrix) -> Self {
        b.rows
    }
}

impl BMatrix {
    /// Validates skew-symmetry (which rules out loops and 2-cycles by
    /// construction) and wraps the rows.
    pub fn new(rows: Vec<Vec<i32>>) -> Result<Self, QuiverError> {
        let n = rows.len();
        if n == 0 {
            return Err(QuiverError::EmptyQuiver);
        }
        if rows.iter().any(|r| r.len() != n) {
            return Err(QuiverError::NotSquare);
        }
        for i in 0..n {
            for j in i..n {
                if rows[i][j] != -rows[j][i] {
                    return Err(QuiverError::NotSkewSymmetric(i + 1, j + 1));
                }
            }
        }
        Ok(BMatrix { n, rows })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> i32 {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<i32>] {
        &self.rows
    }

    /// Matrix mutation at vertex `k` (0-based): entries in row or column
    /// `k` flip sign, every other entry picks up the composite-path
    /// contribution through `k`.
    pub fn mutate(&self, k: usize) -> BMatrix {
        assert!(k < self.n, "mutation index {k} out of range");
        let mut rows = self.rows.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                if i == k || j == k {
                    rows[i][j] = -self.rows[i][j];
                } else {
                    let ik = self.rows[i][k];
                    let kj = self.rows[k][j];
                    rows[i][j] = self.rows[i][j] + ik.signum() * (ik * kj).max(0);
                }
            }
        }
        BMatrix { n: self.n, rows }
    }

    /// Simultaneous row/column permutation: entry `(i, j)` of the result
    /// is `b[perm[i]][perm[j]]`.
    pub fn permuted(&self, perm: &[usize]) -> BMatrix {
        assert_eq!(perm.len(), self.n);
        let rows = (0..self.n)
            .map(|i| (0..self.n).map(|j| self.rows[perm[i]][perm[j]]).collect())
            .collect();
        BMatrix { n: self.n, rows }
    }

    /// True iff the arrow digraph has no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        // Kahn's algorithm on the digraph {i -> j : b[i][j] > 0}.
        let mut indegree = vec![0usize; self.n];
        for i in 0..self.n {
            for j in 0..self.n {
                if self.rows[i][j] > 0 {
                    indegree[j] += 1;
                }
            }
        }
        let mut stack: Vec<usize> = (0..self.n).filter(|&v| indegree[v] == 0).collect();
        let mut removed = 0;
        while let Some(v) = stack.pop() {
            removed += 1;
            for j in 0..self.n {
                if self.rows[v][j] > 0 {
                    indegree[j] -= 1;
                    if indegree[j] == 0 {
                        stack.push(j);
                    }
                }
            }
        }
        removed == self.n
    }

    /// True iff the underlying undirected graph is connected.
    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for j in 0..self.n {
                if self.rows[v][j] != 0 && !seen[j] {
                    seen[j] = true;
                    stack.push(j);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Classifies the matrix itself (never its mutation class): rank-2
    /// matrices by arrow multiplicity, acyclic simply-laced matrices by
    /// their underlying diagram, everything else `Unknown`.
    pub fn classify(&self) -> TypeLabel {
        if self.n == 2 {
            return TypeLabel::Rank2(self.rows[0][1].unsigned_abs());
        }
        if !self.is_acyclic() || !self.is_connected() {
            return TypeLabel::Unknown;
        }
        if self
            .rows
            .iter()
            .any(|r| r.iter().any(|&x| x.abs() > 1))
        {
            return TypeLabel::Unknown;
        }
        classify_diagram(self)
    }

    /// All skew-symmetric `n x n` matrices with entries bounded by
    /// `bound` in absolute value, exactly once each, in a fixed order.
    pub fn enumerate_all(n: usize, bound: i32) -> impl Iterator<Item = BMatrix> {
        assert!(n >= 2, "enumeration needs rank at least 2");
        assert!(bound >= 0, "bound must be nonnegative");
        let free = n * (n - 1) / 2;
        let span = 2 * i64::from(bound) + 1;
        let total = (span as u64)
            .checked_pow(free as u32)
            .expect("enumeration space too large");
        (0..total).map(move |mut code| {
            let mut rows = vec![vec![0i32; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let digit = (code % span as u64) as i64 - i64::from(bound);
                    code /= span as u64;
                    rows[i][j] = digit as i32;
                    rows[j][i] = -(digit as i32);
                }
            }
            BMatrix { n, rows }
        })
    }
}

impl fmt::Display for BMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            writeln!(f, "{row:?}")?;
        }
        Ok(())
    }
}

/// Diagram type of a single exchange matrix.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum TypeLabel {
    Dynkin(Dynkin),
    Euclidean(Euclidean),
    /// A rank-2 quiver with `r` parallel arrows; `r = 1` is the Dynkin
    /// diagram A2, `r >= 2` is of infinite type.
    Rank2(u32),
    Unknown,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Dynkin {
    A(usize),
    D(usize),
    E6,
    E7,
    E8,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub enum Euclidean {
    /// Acyclic orientation of a cycle with `p` arrows one way and `q` the
    /// other, `p >= q >= 1`.
    ATilde(usize, usize),
    DTilde(usize),
    ETilde6,
    ETilde7,
    ETilde8,
}

impl TypeLabel {
    pub fn is_finite_type(&self) -> bool {
        matches!(self, TypeLabel::Dynkin(_) | TypeLabel::Rank2(0) | TypeLabel::Rank2(1))
    }
}

impl fmt::Display for TypeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeLabel::Dynkin(d) => write!(f, "{d}"),
            TypeLabel::Euclidean(e) => write!(f, "{e}"),
            TypeLabel::Rank2(r) => write!(f, "rank2({r})"),
            TypeLabel::Unknown => write!(f, "unknown"),
        }
    }
}

impl fmt::Display for Dynkin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dynkin::A(n) => write!(f, "A{n}"),
            Dynkin::D(n) => write!(f, "D{n}"),
            Dynkin::E6 => write!(f, "E6"),
            Dynkin::E7 => write!(f, "E7"),
            Dynkin::E8 => write!(f, "E8"),
        }
    }
}

impl fmt::Display for Euclidean {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Euclidean::ATilde(p, q) => write!(f, "A~({p},{q})"),
            Euclidean::DTilde(n) => write!(f, "D~{n}"),
            Euclidean::ETilde6 => write!(f, "E~6"),
            Euclidean::ETilde7 => write!(f, "E~7"),
            Euclidean::ETilde8 => write!(f, "E~8"),
        }
    }
}

/// Matches a connected simply-laced acyclic matrix against the ADE and
/// extended ADE diagrams. Only the undirected shape matters here.
fn classify_diagram(b: &BMatrix) -> TypeLabel {
    let n = b.rank();
    let mut adj = vec![Vec::new(); n];
    let mut edges = 0usize;
    for i in 0..n {
        for j in (i + 1)..n {
            if b.entry(i, j) != 0 {
                adj[i].push(j);
                adj[j].push(i);
                edges += 1;
            }
        }
    }
    let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
    let max_degree = degrees.iter().copied().max().unwrap_or(0);

    if edges == n {
        // Connected with |E| = |V|: exactly one cycle. It is the whole
        // graph iff every degree is 2, and then an acyclic orientation
        // splits the cycle into p arrows one way and q the other.
        if degrees.iter().all(|&d| d == 2) {
            let (p, q) = cycle_orientation_counts(b, &adj);
            // p, q >= 1 because the orientation is acyclic.
            return TypeLabel::Euclidean(Euclidean::ATilde(p.max(q), p.min(q)));
        }
        return TypeLabel::Unknown;
    }
    if edges != n - 1 {
        return TypeLabel::Unknown;
    }

    // Tree diagrams.
    match max_degree {
        0..=2 => {
            // A path (n = 1 is also A1).
            TypeLabel::Dynkin(Dynkin::A(n))
        }
        3 => {
            let branches: Vec<usize> = (0..n).filter(|&v| degrees[v] == 3).collect();
            match branches.len() {
                1 => {
                    let mut arms = arm_lengths(&adj, branches[0]);
                    arms.sort_unstable();
                    match arms.as_slice() {
                        // Two length-1 arms and a tail; the tail length is
                        // forced to n - 3 by the vertex count.
                        [1, 1, _] => TypeLabel::Dynkin(Dynkin::D(n)),
                        [1, 2, 2] => TypeLabel::Dynkin(Dynkin::E6),
                        [1, 2, 3] => TypeLabel::Dynkin(Dynkin::E7),
                        [1, 2, 4] => TypeLabel::Dynkin(Dynkin::E8),
                        [2, 2, 2] => TypeLabel::Euclidean(Euclidean::ETilde6),
                        [1, 3, 3] => TypeLabel::Euclidean(Euclidean::ETilde7),
                        [1, 2, 5] => TypeLabel::Euclidean(Euclidean::ETilde8),
                        _ => TypeLabel::Unknown,
                    }
                }
                2 => {
                    // Two degree-3 vertices, all arms of length 1 off a
                    // central path: the extended D diagram on n = m + 1
                    // vertices.
                    let all_arms_ok = branches.iter().all(|&v| {
                        let mut arms = arm_lengths(&adj, v);
                        arms.sort_unstable();
                        arms[0] == 1 && arms[1] == 1
                    });
                    if all_arms_ok {
                        TypeLabel::Euclidean(Euclidean::DTilde(n - 1))
                    } else {
                        TypeLabel::Unknown
                    }
                }
                _ => TypeLabel::Unknown,
            }
        }
        4 => {
            // A single degree-4 vertex with four length-1 arms is D~4.
            let branches: Vec<usize> = (0..n).filter(|&v| degrees[v] == 4).collect();
            if branches.len() == 1 && n == 5 && degrees.iter().filter(|&&d| d == 1).count() == 4 {
                TypeLabel::Euclidean(Euclidean::DTilde(4))
            } else {
                TypeLabel::Unknown
            }
        }
        _ => TypeLabel::Unknown,
    }
}

/// Lengths of the simple paths hanging off a branch vertex of a tree.
fn arm_lengths(adj: &[Vec<usize>], branch: usize) -> Vec<usize> {
    adj[branch]
        .iter()
        .map(|&start| {
            let mut len = 1;
            let mut prev = branch;
            let mut cur = start;
            loop {
                let next: Vec<usize> = adj[cur].iter().copied().filter(|&v| v != prev).collect();
                match next.as_slice() {
                    [only] if adj[cur].len() == 2 => {
                        prev = cur;
                        cur = *only;
                        len += 1;
                    }
                    _ => break,
                }
            }
            len
        })
        .collect()
}

/// Walks the unique cycle of a connected 2-regular graph and counts arrows
/// agreeing and disagreeing with the walk direction.
fn cycle_orientation_counts(b: &BMatrix, adj: &[Vec<usize>]) -> (usize, usize) {
    let n = b.rank();
    let mut forward = 0;
    let mut backward = 0;
    let mut prev = 0usize;
    let mut cur = adj[0][0];
    for _ in 0..n {
        if b.entry(prev, cur) > 0 {
            forward += 1;
        } else {
            backward += 1;
        }
        let next = adj[cur]
            .iter()
            .copied()
            .find(|&v| v != prev)
            .expect("2-regular vertex has two neighbours");
        prev = cur;
        cur = next;
    }
    (forward, backward)
}

/// Arrow-list form used by the quiver input JSON.
#[derive(Serialize, Deserialize)]
struct ArrowListRepr {
    rank: usize,
    /// `[from, to, multiplicity]` with 1-based vertices.
    arrows: Vec<(usize, usize, i32)>,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    matrix: Vec<Vec<i32>>,
}

/// Loads a quiver from its JSON description, either
/// `{"rank": n, "arrows": [[from, to, multiplicity], ...]}` with 1-based
/// vertices or `{"matrix": [[...], ...]}`. Loops, 2-cycles and
/// non-positive multiplicities are rejected; disconnected quivers are
/// accepted.
pub fn load_quiver_json(s: &str) -> Result<BMatrix, QuiverError> {
    let value: serde_json::Value =
        serde_json::from_str(s).map_err(|e| QuiverError::Json(e.to_string()))?;
    if value.get("arrows").is_some() {
        let repr: ArrowListRepr =
            serde_json::from_value(value).map_err(|e| QuiverError::Json(e.to_string()))?;
        if repr.rank == 0 {
            return Err(QuiverError::EmptyQuiver);
        }
        let mut rows = vec![vec![0i32; repr.rank]; repr.rank];
        for &(from, to, mult) in &repr.arrows {
            if from == 0 || from > repr.rank {
                return Err(QuiverError::VertexOutOfRange(from, repr.rank));
            }
            if to == 0 || to > repr.rank {
                return Err(QuiverError::VertexOutOfRange(to, repr.rank));
            }
            if from == to {
                return Err(QuiverError::Loop(from));
            }
            if mult <= 0 {
                return Err(QuiverError::BadMultiplicity(mult));
            }
            rows[from - 1][to - 1] += mult;
        }
        for i in 0..repr.rank {
            for j in (i + 1)..repr.rank {
                if rows[i][j] > 0 && rows[j][i] > 0 {
                    return Err(QuiverError::TwoCycle(i + 1, j + 1));
                }
                rows[i][j] -= rows[j][i];
                rows[j][i] = -rows[i][j];
            }
        }
        BMatrix::new(rows)
    } else if value.get("matrix").is_some() {
        let repr: MatrixRepr =
            serde_json::from_value(value).map_err(|e| QuiverError::Json(e.to_string()))?;
        BMatrix::new(repr.matrix)
    } else {
        Err(QuiverError::UnrecognizedFormat)
    }
}
