//! Fixtures shared by the benchmarks.

use teamdiff_core::graph::{build_team_graph, random_cross_links, GraphKind};
use teamdiff_core::linalg::Matrix;
use teamdiff_core::{NetworkTopology, QuadraticZeroSumGame, Team};

/// Two rings of `k` agents with two random cross links per direction.
pub fn ring_pair(k: usize) -> NetworkTopology {
    let g1 = build_team_graph(Team::One, GraphKind::Ring, k).expect("ring");
    let g2 = build_team_graph(Team::Two, GraphKind::Ring, k).expect("ring");
    let links = random_cross_links([k, k], 2.min(k), 5).expect("links");
    NetworkTopology::new(g1, g2, links).expect("topology")
}

/// Two-dimensional quadratic game with heterogeneous shifts.
pub fn quadratic(k: usize) -> QuadraticZeroSumGame {
    let c = Matrix::from_row_slice(2, 2, &[0.5, 0.2, -0.1, 0.4]);
    QuadraticZeroSumGame::with_random_shifts(
        Matrix::identity(2, 2),
        Matrix::identity(2, 2),
        c,
        vec![1.0, -0.5],
        vec![0.3, 0.8],
        [k, k],
        1.0,
        1,
        0.1,
    )
    .expect("game")
}
