//! Named quivers used throughout the test suite and the CLI.

use crate::quiver::BMatrix;

/// Every preset name accepted by [`preset`].
pub const PRESET_NAMES: &[&str] = &[
    "a2",
    "a3",
    "a4",
    "a5",
    "d4",
    "d5",
    "e6",
    "kronecker",
    "atilde12",
];

/// Looks up a preset quiver by name.
///
/// - `a2`..`a5`: linearly oriented type-A path quivers;
/// - `d4`, `d5`: type-D quivers (two short arms at vertex 3);
/// - `e6`: the type-E6 quiver (branch at vertex 3, arm vertex 6);
/// - `kronecker`: two vertices joined by a double arrow;
/// - `atilde12`: the cyclic rank-3 quiver with arrows 2 -> 1, a double
///   arrow 1 -> 3 and 3 -> 2.
pub fn preset(name: &str) -> Option<BMatrix> {
    let rows: Vec<Vec<i32>> = match name {
        "a2" => path(2),
        "a3" => path(3),
        "a4" => path(4),
        "a5" => path(5),
        "d4" => d_type(4),
        "d5" => d_type(5),
        "e6" => {
            // Path 1 - 2 - 3 - 4 - 5 with vertex 6 attached to vertex 3.
            let mut rows = path(6);
            rows[4][5] = 0;
            rows[5][4] = 0;
            rows[2][5] = 1;
            rows[5][2] = -1;
            rows
        }
        "kronecker" => vec![vec![0, 2], vec![-2, 0]],
        "atilde12" => vec![vec![0, -1, 2], vec![1, 0, -1], vec![-2, 1, 0]],
        _ => return None,
    };
    Some(BMatrix::new(rows).expect("preset matrices are skew-symmetric"))
}

fn path(n: usize) -> Vec<Vec<i32>> {
    let mut rows = vec![vec![0; n]; n];
    for i in 0..n - 1 {
        rows[i][i + 1] = 1;
        rows[i + 1][i] = -1;
    }
    rows
}

fn d_type(n: usize) -> Vec<Vec<i32>> {
    // Vertices 1 and 2 both attach to vertex 3, then a path 3 - 4 - ... - n.
    let mut rows = vec![vec![0; n]; n];
    rows[0][2] = 1;
    rows[2][0] = -1;
    rows[1][2] = 1;
    rows[2][1] = -1;
    for i in 2..n - 1 {
        rows[i][i + 1] = 1;
        rows[i + 1][i] = -1;
    }
    rows
}
