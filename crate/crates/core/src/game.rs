//! Finite games: two-player bimatrix games, N-player pairwise polymatrix
//! games and dense N-player normal-form games, each with an optional
//! positive-affine payoff transform per player.
//!
//! A two-player normal-form game is stored as a single-edge polymatrix game,
//! so everything downstream only has to deal with two representations:
//! edge lists and dense tensors (N > 2 normal form).

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};

/// Tolerance used when checking declared constant-sum edges.
pub const CONSTANT_SUM_TOL: f64 = 1e-12;

/// Tolerance on `Σ x_iα = 1` for mixed strategies.
pub const SIMPLEX_TOL: f64 = 1e-9;

/// Positive-affine payoff transform `u ← scale·u + offset`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub scale: f64,
    pub offset: f64,
}

impl Default for Affine {
    fn default() -> Self {
        Affine { scale: 1.0, offset: 0.0 }
    }
}

impl Affine {
    pub fn new(scale: f64, offset: f64) -> Self {
        Affine { scale, offset }
    }
}

/// One bilateral game of a polymatrix game.
///
/// Both matrices are indexed `[α][β]` with `α ∈ A_i`, `β ∈ A_j`:
/// `u_ij[(α, β)]` is what `i` receives and `u_ji[(α, β)]` what `j` receives.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub i: usize,
    pub j: usize,
    pub u_ij: DMatrix<f64>,
    pub u_ji: DMatrix<f64>,
}

impl Edge {
    pub fn new(i: usize, j: usize, u_ij: DMatrix<f64>, u_ji: DMatrix<f64>) -> Self {
        Edge { i, j, u_ij, u_ji }
    }

    /// Zero-sum edge: `u_ji = −u_ij`.
    pub fn zero_sum(i: usize, j: usize, u_ij: DMatrix<f64>) -> Self {
        let u_ji = -&u_ij;
        Edge { i, j, u_ij, u_ji }
    }

    pub fn involves(&self, player: usize) -> bool {
        self.i == player || self.j == player
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum GameForm {
    Polymatrix {
        edges: Vec<Edge>,
    },
    /// Dense payoff tensor per player, row-major in player order
    /// (player 0's action is the slowest index).
    NormalForm {
        tensors: Vec<Vec<f64>>,
    },
}

/// Outcome of checking one edge for the constant-sum property.
#[derive(Debug, Clone, PartialEq)]
pub enum EdgeSum {
    Constant {
        gamma: f64,
    },
    Violation {
        gamma: f64,
        max_deviation: f64,
        cell: (usize, usize),
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSumReport {
    pub i: usize,
    pub j: usize,
    pub result: EdgeSum,
}

impl EdgeSumReport {
    pub fn is_constant(&self) -> bool {
        matches!(self.result, EdgeSum::Constant { .. })
    }
}

/// An immutable finite game.
#[derive(Debug, Clone, PartialEq)]
pub struct GameSpec {
    actions: Vec<usize>,
    labels: Vec<Vec<String>>,
    form: GameForm,
    affine: Vec<Affine>,
    constant_sum: bool,
}

impl GameSpec {
    /// Builds a polymatrix game. When `constant_sum` is set every edge must
    /// pass [`GameSpec::validate_constant_sum`].
    pub fn polymatrix(actions: Vec<usize>, edges: Vec<Edge>, constant_sum: bool) -> Result<Self> {
        let game = GameSpec {
            labels: default_labels(&actions),
            affine: vec![Affine::default(); actions.len()],
            actions,
            form: GameForm::Polymatrix { edges },
            constant_sum,
        };
        game.validate()?;
        Ok(game)
    }

    /// Builds a normal-form game. Two-player games are canonicalized to a
    /// single-edge polymatrix game.
    pub fn normal_form(actions: Vec<usize>, tensors: Vec<Vec<f64>>, constant_sum: bool) -> Result<Self> {
        check_actions(&actions)?;
        if tensors.len() != actions.len() {
            return Err(Error::Shape(format!(
                "{} payoff tensors for {} players",
                tensors.len(),
                actions.len()
            )));
        }
        let cells: usize = actions.iter().product();
        for (p, t) in tensors.iter().enumerate() {
            if t.len() != cells {
                return Err(Error::Shape(format!(
                    "tensor of player {p} has {} entries, expected {cells}",
                    t.len()
                )));
            }
        }
        if actions.len() == 2 {
            let (m, n) = (actions[0], actions[1]);
            let u_01 = DMatrix::from_row_slice(m, n, &tensors[0]);
            let u_10 = DMatrix::from_row_slice(m, n, &tensors[1]);
            return Self::polymatrix(actions, vec![Edge::new(0, 1, u_01, u_10)], constant_sum);
        }
        if constant_sum {
            return Err(Error::InvalidGame(
                "constant-sum validation needs a pairwise (polymatrix) game".into(),
            ));
        }
        let game = GameSpec {
            labels: default_labels(&actions),
            affine: vec![Affine::default(); actions.len()],
            actions,
            form: GameForm::NormalForm { tensors },
            constant_sum,
        };
        game.validate()?;
        Ok(game)
    }

    /// Two-player game with payoff matrices `a` (row player) and `b` (column player).
    pub fn bimatrix(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        let actions = vec![a.nrows(), a.ncols()];
        Self::polymatrix(actions, vec![Edge::new(0, 1, a, b)], false)
    }

    /// Two-player zero-sum game where `a` is the row (maximizing) player's payoff.
    pub fn zero_sum(a: DMatrix<f64>) -> Result<Self> {
        let actions = vec![a.nrows(), a.ncols()];
        Self::polymatrix(actions, vec![Edge::zero_sum(0, 1, a)], true)
    }

    pub fn with_affine(mut self, affine: Vec<Affine>) -> Result<Self> {
        if affine.len() != self.actions.len() {
            return Err(Error::Shape(format!(
                "{} affine transforms for {} players",
                affine.len(),
                self.actions.len()
            )));
        }
        self.affine = affine;
        self.validate()?;
        Ok(self)
    }

    pub fn with_labels(mut self, labels: Vec<Vec<String>>) -> Result<Self> {
        if labels.len() != self.actions.len()
            || labels.iter().zip(&self.actions).any(|(l, &n)| l.len() != n)
        {
            return Err(Error::Shape("action labels do not match action counts".into()));
        }
        self.labels = labels;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        check_actions(&self.actions)?;
        if self.affine.len() != self.actions.len() {
            return Err(Error::Shape("one affine transform per player required".into()));
        }
        for (p, af) in self.affine.iter().enumerate() {
            if !(af.scale > 0.0 && af.scale.is_finite()) || !af.offset.is_finite() {
                return Err(Error::InvalidGame(format!(
                    "affine transform of player {p} needs a finite scale > 0 and finite offset"
                )));
            }
        }
        match &self.form {
            GameForm::Polymatrix { edges } => {
                let n = self.actions.len();
                let mut seen = std::collections::BTreeSet::new();
                for e in edges {
                    if e.i >= n || e.j >= n {
                        return Err(Error::InvalidGame(format!(
                            "edge {{{}, {}}} references a missing player",
                            e.i, e.j
                        )));
                    }
                    if e.i == e.j {
                        return Err(Error::InvalidGame(format!("self-loop at player {}", e.i)));
                    }
                    if !seen.insert((e.i.min(e.j), e.i.max(e.j))) {
                        return Err(Error::InvalidGame(format!(
                            "edge {{{}, {}}} appears twice",
                            e.i, e.j
                        )));
                    }
                    let shape = (self.actions[e.i], self.actions[e.j]);
                    if e.u_ij.shape() != shape || e.u_ji.shape() != shape {
                        return Err(Error::Shape(format!(
                            "edge {{{}, {}}} matrices must be {}x{}",
                            e.i, e.j, shape.0, shape.1
                        )));
                    }
                    if e.u_ij.iter().chain(e.u_ji.iter()).any(|v| !v.is_finite()) {
                        return Err(Error::InvalidGame(format!(
                            "edge {{{}, {}}} has non-finite payoffs",
                            e.i, e.j
                        )));
                    }
                }
                if self.constant_sum {
                    for r in self.validate_constant_sum()? {
                        if let EdgeSum::Violation { max_deviation, cell, .. } = r.result {
                            return Err(Error::InvalidGame(format!(
                                "edge {{{}, {}}} is not constant-sum: deviation {max_deviation:e} at cell {cell:?}",
                                r.i, r.j
                            )));
                        }
                    }
                }
            }
            GameForm::NormalForm { tensors } => {
                if tensors.iter().flatten().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidGame("non-finite payoffs".into()));
                }
            }
        }
        Ok(())
    }

    pub fn num_players(&self) -> usize {
        self.actions.len()
    }

    pub fn actions(&self) -> &[usize] {
        &self.actions
    }

    pub fn labels(&self) -> &[Vec<String>] {
        &self.labels
    }

    pub fn form(&self) -> &GameForm {
        &self.form
    }

    pub fn affine(&self) -> &[Affine] {
        &self.affine
    }

    pub fn is_constant_sum(&self) -> bool {
        self.constant_sum
    }

    pub fn edges(&self) -> Option<&[Edge]> {
        match &self.form {
            GameForm::Polymatrix { edges } => Some(edges),
            GameForm::NormalForm { .. } => None,
        }
    }

    /// For a two-player game, the untransformed payoff matrix of player 0,
    /// indexed `[action of 0][action of 1]`.
    pub fn row_player_matrix(&self) -> Option<DMatrix<f64>> {
        match self.edges() {
            Some([e]) if self.num_players() == 2 && e.i == 0 => Some(e.u_ij.clone()),
            Some([e]) if self.num_players() == 2 => Some(e.u_ji.transpose()),
            _ => None,
        }
    }

    /// Checks that `x` has one distribution per player of the right length.
    pub fn check_profile(&self, x: &MixedProfile) -> Result<()> {
        check_shape(&self.actions, x.as_slices())
    }

    /// Payoff of player `i` at the mixed profile `x`, including the affine transform.
    pub fn expected_payoff(&self, x: &MixedProfile, i: usize) -> Result<f64> {
        let v = self.payoff_vector(x, i)?;
        Ok(dot(&v, x.player(i)))
    }

    /// `v_i(x)`: payoff of each pure action of player `i` against `x_{-i}`.
    pub fn payoff_vector(&self, x: &MixedProfile, i: usize) -> Result<Vec<f64>> {
        self.check_profile(x)?;
        if i >= self.num_players() {
            return Err(Error::InvalidArgument(format!("no player {i}")));
        }
        let mut out = vec![0.0; self.actions[i]];
        self.payoff_vector_into(x.as_slices(), i, &mut out);
        Ok(out)
    }

    /// All payoff vectors at once. `x` is not validated beyond its shape.
    pub fn payoff_vectors(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
        check_shape(&self.actions, x)?;
        Ok((0..self.num_players())
            .map(|i| {
                let mut out = vec![0.0; self.actions[i]];
                self.payoff_vector_into(x, i, &mut out);
                out
            })
            .collect())
    }

    /// Unchecked kernel; `x` must match the action counts.
    pub(crate) fn payoff_vector_into(&self, x: &[Vec<f64>], i: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        match &self.form {
            GameForm::Polymatrix { edges } => {
                for e in edges {
                    if e.i == i {
                        let xj = &x[e.j];
                        for (a, o) in out.iter_mut().enumerate() {
                            *o += (0..xj.len()).map(|b| e.u_ij[(a, b)] * xj[b]).sum::<f64>();
                        }
                    } else if e.j == i {
                        let xi = &x[e.i];
                        for (b, o) in out.iter_mut().enumerate() {
                            *o += (0..xi.len()).map(|a| e.u_ji[(a, b)] * xi[a]).sum::<f64>();
                        }
                    }
                }
            }
            GameForm::NormalForm { tensors } => {
                normal_form_payoff_vector(&self.actions, &tensors[i], x, i, out);
            }
        }
        let af = self.affine[i];
        for o in out.iter_mut() {
            *o = af.scale * *o + af.offset;
        }
    }

    /// Per-edge constant-sum check. The reference constant of an edge is the
    /// median of its cell sums, so a single perturbed cell is reported as the
    /// offender.
    pub fn validate_constant_sum(&self) -> Result<Vec<EdgeSumReport>> {
        let edges = self.edges().ok_or_else(|| {
            Error::InvalidGame("constant-sum validation needs a pairwise (polymatrix) game".into())
        })?;
        Ok(edges
            .iter()
            .map(|e| EdgeSumReport {
                i: e.i,
                j: e.j,
                result: edge_sum(e),
            })
            .collect())
    }
}

fn edge_sum(e: &Edge) -> EdgeSum {
    let sums = &e.u_ij + &e.u_ji;
    let mut sorted: Vec<f64> = sums.iter().copied().collect();
    sorted.sort_by(f64::total_cmp);
    let gamma = sorted[(sorted.len() - 1) / 2];
    let mut worst = (0.0, (0, 0));
    for a in 0..sums.nrows() {
        for b in 0..sums.ncols() {
            let d = (sums[(a, b)] - gamma).abs();
            if d > worst.0 {
                worst = (d, (a, b));
            }
        }
    }
    if worst.0 <= CONSTANT_SUM_TOL {
        EdgeSum::Constant { gamma }
    } else {
        EdgeSum::Violation {
            gamma,
            max_deviation: worst.0,
            cell: worst.1,
        }
    }
}

fn normal_form_payoff_vector(actions: &[usize], tensor: &[f64], x: &[Vec<f64>], i: usize, out: &mut [f64]) {
    let n = actions.len();
    let mut strides = vec![1usize; n];
    for p in (0..n.saturating_sub(1)).rev() {
        strides[p] = strides[p + 1] * actions[p + 1];
    }
    // Walk every profile of the opponents once, then fan out over i's actions.
    let mut idx = vec![0usize; n];
    loop {
        let mut weight = 1.0;
        let mut base = 0;
        for p in 0..n {
            if p != i {
                weight *= x[p][idx[p]];
                base += idx[p] * strides[p];
            }
        }
        if weight != 0.0 {
            for (a, o) in out.iter_mut().enumerate() {
                *o += weight * tensor[base + a * strides[i]];
            }
        }
        // odometer over p != i
        let mut p = n;
        loop {
            if p == 0 {
                return;
            }
            p -= 1;
            if p == i {
                continue;
            }
            idx[p] += 1;
            if idx[p] < actions[p] {
                break;
            }
            idx[p] = 0;
        }
    }
}

fn check_actions(actions: &[usize]) -> Result<()> {
    if actions.is_empty() {
        return Err(Error::InvalidGame("a game needs at least one player".into()));
    }
    if let Some(p) = actions.iter().position(|&n| n < 2) {
        return Err(Error::InvalidGame(format!("player {p} has fewer than 2 actions")));
    }
    Ok(())
}

fn check_shape(actions: &[usize], x: &[Vec<f64>]) -> Result<()> {
    if x.len() != actions.len() {
        return Err(Error::Shape(format!(
            "profile has {} players, game has {}",
            x.len(),
            actions.len()
        )));
    }
    for (p, (xi, &n)) in x.iter().zip(actions).enumerate() {
        if xi.len() != n {
            return Err(Error::Shape(format!(
                "player {p}: strategy has {} entries, expected {n}",
                xi.len()
            )));
        }
    }
    Ok(())
}

fn default_labels(actions: &[usize]) -> Vec<Vec<String>> {
    actions
        .iter()
        .map(|&n| (0..n).map(|a| format!("a{a}")).collect())
        .collect()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// One mixed strategy per player.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedProfile(Vec<Vec<f64>>);

impl MixedProfile {
    pub fn new(strategies: Vec<Vec<f64>>) -> Result<Self> {
        for (p, xi) in strategies.iter().enumerate() {
            if xi.iter().any(|v| !v.is_finite() || *v < 0.0) {
                return Err(Error::Domain(format!(
                    "player {p}: strategy has negative or non-finite entries"
                )));
            }
            let s: f64 = xi.iter().sum();
            if (s - 1.0).abs() > SIMPLEX_TOL {
                return Err(Error::Domain(format!("player {p}: strategy sums to {s}")));
            }
        }
        Ok(MixedProfile(strategies))
    }

    /// Wraps strategies that are already known to lie on the simplex.
    pub(crate) fn from_raw(strategies: Vec<Vec<f64>>) -> Self {
        MixedProfile(strategies)
    }

    pub fn uniform(actions: &[usize]) -> Self {
        MixedProfile(actions.iter().map(|&n| vec![1.0 / n as f64; n]).collect())
    }

    /// Pure profile playing `choice[i]` for each player.
    pub fn pure(actions: &[usize], choice: &[usize]) -> Result<Self> {
        if actions.len() != choice.len() || choice.iter().zip(actions).any(|(&c, &n)| c >= n) {
            return Err(Error::Shape("pure profile does not match the action sets".into()));
        }
        Ok(MixedProfile(
            actions
                .iter()
                .zip(choice)
                .map(|(&n, &c)| {
                    let mut v = vec![0.0; n];
                    v[c] = 1.0;
                    v
                })
                .collect(),
        ))
    }

    /// Uniformly distributed (flat Dirichlet) point in the interior of each simplex.
    pub fn random_interior<R: Rng + ?Sized>(actions: &[usize], rng: &mut R) -> Self {
        MixedProfile(
            actions
                .iter()
                .map(|&n| loop {
                    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
                    let s: f64 = w.iter().sum();
                    if s > 0.0 && w.iter().all(|&v| v > 0.0) {
                        break w.into_iter().map(|v| v / s).collect();
                    }
                })
                .collect(),
        )
    }

    pub fn num_players(&self) -> usize {
        self.0.len()
    }

    pub fn player(&self, i: usize) -> &[f64] {
        &self.0[i]
    }

    pub fn as_slices(&self) -> &[Vec<f64>] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<Vec<f64>> {
        self.0
    }

    /// True if every entry exceeds `tol`.
    pub fn is_interior(&self, tol: f64) -> bool {
        self.0.iter().flatten().all(|&v| v > tol)
    }

    /// Sup-norm distance over all coordinates.
    pub fn sup_distance(&self, other: &MixedProfile) -> f64 {
        sup_distance(&self.0, &other.0)
    }
}

pub(crate) fn sup_distance(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate().skip(1) {
        if x > v[best] {
            best = k;
        }
    }
    best
}
