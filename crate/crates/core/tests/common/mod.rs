//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const VERTEX_TOL: f64 = 1e-9;

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Vertices of `{(x, w) : x ≥ 0, Σx = 1, Aᵀx ≥ w}` for the row player of `a`,
/// found by solving every square system of tight constraints.
pub fn maximin_vertices(a: &DMatrix<f64>) -> Vec<(Vec<f64>, f64)> {
    let (m, n) = a.shape();
    let mut out = Vec::new();
    // Unknowns (x_0..x_{m-1}, w); constraints 0..m are x_k = 0, m..m+n are (Aᵀx)_j = w.
    for tight in subsets(m + n, m) {
        let mut mat = DMatrix::<f64>::zeros(m + 1, m + 1);
        let mut rhs = DVector::<f64>::zeros(m + 1);
        for k in 0..m {
            mat[(0, k)] = 1.0;
        }
        rhs[0] = 1.0;
        for (r, &c) in tight.iter().enumerate() {
            if c < m {
                mat[(r + 1, c)] = 1.0;
            } else {
                for k in 0..m {
                    mat[(r + 1, k)] = a[(k, c - m)];
                }
                mat[(r + 1, m)] = -1.0;
            }
        }
        let Some(sol) = mat.clone().lu().solve(&rhs) else { continue };
        if (&mat * &sol - &rhs).amax() > 1e-9 {
            continue;
        }
        let x: Vec<f64> = sol.iter().take(m).copied().collect();
        let w = sol[m];
        if x.iter().any(|&v| v < -VERTEX_TOL) {
            continue;
        }
        if (0..n).any(|j| (0..m).map(|k| a[(k, j)] * x[k]).sum::<f64>() < w - VERTEX_TOL) {
            continue;
        }
        out.push((x, w));
    }
    out
}

/// Value and essential actions of the row player by vertex enumeration.
pub fn brute_force_row(a: &DMatrix<f64>) -> (f64, Vec<usize>) {
    let verts = maximin_vertices(a);
    let value = verts.iter().map(|(_, w)| *w).fold(f64::NEG_INFINITY, f64::max);
    let mut ess: Vec<usize> = verts
        .iter()
        .filter(|(_, w)| (w - value).abs() <= VERTEX_TOL)
        .flat_map(|(x, _)| (0..x.len()).filter(|&k| x[k] > VERTEX_TOL).collect::<Vec<_>>())
        .collect();
    ess.sort_unstable();
    ess.dedup();
    (value, ess)
}

/// Value for the row player and essential sets of both players.
pub fn brute_force(a: &DMatrix<f64>) -> (f64, [Vec<usize>; 2]) {
    let (v, rows) = brute_force_row(a);
    let (_, cols) = brute_force_row(&(-a.transpose()));
    (v, [rows, cols])
}

/// Zero-sum games of every shape up to 4×4: small-integer matrices (which
/// are often degenerate) and continuous ones, plus the reference games.
pub fn matrix_corpus() -> Vec<DMatrix<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_611);
    let mut out = vec![
        forel_core::catalog::matching_pennies_matrix(),
        forel_core::catalog::dominant_strategy_matrix(),
        forel_core::catalog::embedded_matching_pennies_matrix(),
        DMatrix::from_row_slice(3, 3, &[0.0, -1.0, 1.0, 1.0, 0.0, -1.0, -1.0, 1.0, 0.0]),
        DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 1.0, 3.0]),
        DMatrix::from_element(3, 4, 0.5),
    ];
    for m in 1..=4 {
        for n in 1..=4 {
            for _ in 0..12 {
                out.push(DMatrix::from_fn(m, n, |_, _| rng.gen_range(-2..=2) as f64));
            }
            for _ in 0..4 {
                out.push(DMatrix::from_fn(m, n, |_, _| rng.gen_range(-1.0..1.0)));
            }
        }
    }
    out
}
