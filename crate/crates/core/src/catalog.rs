//! Small reference games used throughout the tests, benches and CLI examples.

use nalgebra::DMatrix;

use crate::game::{Edge, GameSpec};

/// Row player's payoff in Matching Pennies.
pub fn matching_pennies_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, -1.0, -1.0, 1.0])
}

pub fn matching_pennies() -> GameSpec {
    GameSpec::zero_sum(matching_pennies_matrix()).expect("valid game")
}

/// Ring of `n` players where each neighbouring pair `(k, k+1 mod n)` plays
/// zero-sum Matching Pennies, `k` as the row player.
pub fn matching_pennies_cycle(n: usize) -> GameSpec {
    assert!(n >= 3, "a cycle needs at least three players");
    let edges = (0..n)
        .map(|k| Edge::zero_sum(k, (k + 1) % n, matching_pennies_matrix()))
        .collect();
    GameSpec::polymatrix(vec![2; n], edges, true).expect("valid game")
}

/// `[[1, 2], [0, 1]]`: row 0 strictly dominates, column 0 is the best reply,
/// unique pure equilibrium at (0, 0) with value 1.
pub fn dominant_strategy_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0])
}

pub fn dominant_strategy() -> GameSpec {
    GameSpec::zero_sum(dominant_strategy_matrix()).expect("valid game")
}

/// Matching Pennies with a strictly dominated third action for both players:
/// the row player's third row pays −10, the column player's third column
/// concedes +10. The corner cell is 0 so both extra actions are strictly
/// dominated.
pub fn embedded_matching_pennies_matrix() -> DMatrix<f64> {
    DMatrix::from_row_slice(
        3,
        3,
        &[
            1.0, -1.0, 10.0, //
            -1.0, 1.0, 10.0, //
            -10.0, -10.0, 0.0,
        ],
    )
}

pub fn embedded_matching_pennies() -> GameSpec {
    GameSpec::zero_sum(embedded_matching_pennies_matrix()).expect("valid game")
}

/// Pure coordination game (common payoff identity matrix); not constant-sum.
pub fn coordination() -> GameSpec {
    let a = DMatrix::identity(2, 2);
    GameSpec::bimatrix(a.clone(), a).expect("valid game")
}
