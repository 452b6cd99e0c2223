//! Fixtures shared by the benchmarks.

use forel_core::{Edge, ForelSystem, GameSpec, Regularizer, ScoreState};
use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Matching pennies on a ring of `players` players with `actions` actions each.
pub fn ring(players: usize, actions: usize) -> GameSpec {
    let cyclic = DMatrix::from_fn(actions, actions, |a, b| if a == b { 1.0 } else { -1.0 / (actions - 1) as f64 });
    let n_edges = if players == 2 { 1 } else { players };
    let edges = (0..n_edges)
        .map(|i| Edge::zero_sum(i, (i + 1) % players, cyclic.clone()))
        .collect();
    GameSpec::polymatrix(vec![actions; players], edges, true).expect("ring is a valid game")
}

pub fn entropic_system(game: GameSpec) -> ForelSystem {
    let regs = game
        .actions()
        .iter()
        .map(|&n| Regularizer::entropic(n).expect("n >= 2"))
        .collect();
    ForelSystem::new(game, regs).expect("consistent dimensions")
}

pub fn random_scores(actions: &[usize], seed: u64) -> ScoreState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let y = actions
        .iter()
        .map(|&n| (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect())
        .collect();
    ScoreState::new(y).expect("finite scores")
}

pub fn random_matrix(m: usize, n: usize, seed: u64) -> DMatrix<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn random_vector(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect()
}
