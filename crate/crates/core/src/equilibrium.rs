//! Equilibria of zero-sum games via linear programming.
//!
//! The value and one equilibrium come from the classical reciprocal-value LP
//! pair on a payoff matrix shifted to be positive. Essential actions (those
//! played in some equilibrium) are found by maximizing each coordinate over
//! the optimal-strategy polytope, and a maximal-support equilibrium is built
//! as the barycenter of those maximizers plus, for every non-essential
//! opponent action, an optimal strategy that punishes it strictly.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::game::{dot, GameForm, GameSpec, MixedProfile};
use crate::lp::{LinearProgram, LpSolution, Relation, Sense};

/// LP optima above this count as strictly positive.
pub const ESSENTIAL_TOL: f64 = 1e-9;

/// Slack granted to the "optimal strategy" constraints, relative to the
/// payoff scale, when roundoff in the computed value makes the exact
/// optimal-strategy polytope empty.
const VALUE_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSumSolution {
    /// Value for the row (maximizing) player.
    pub value: f64,
    pub row: Vec<f64>,
    pub col: Vec<f64>,
    /// Value obtained from the column player's LP; equal to `value` up to roundoff.
    pub dual_value: f64,
}

fn check_matrix(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Err(Error::Shape("payoff matrix is empty".into()));
    }
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("payoff matrix has non-finite entries".into()));
    }
    Ok(())
}

fn payoff_scale(a: &DMatrix<f64>) -> f64 {
    1.0 + a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

/// Value and one equilibrium of the zero-sum game with row-player payoff `a`.
pub fn zero_sum_solve(a: &DMatrix<f64>) -> Result<ZeroSumSolution> {
    check_matrix(a)?;
    let (m, n) = a.shape();
    let shift = 1.0 - a.min();
    let ap = a.map(|v| v + shift);

    // Row player: min Σp s.t. Aᵀp ≥ 1, p ≥ 0; value' = 1/Σp.
    let mut row_lp = LinearProgram::new(Sense::Minimize, vec![1.0; m]);
    for j in 0..n {
        row_lp = row_lp.constraint(ap.column(j).iter().copied().collect(), Relation::Ge, 1.0);
    }
    let p = row_lp.solve()?;
    let row_val = 1.0 / p.objective;
    let row: Vec<f64> = normalize(p.x.iter().map(|v| v * row_val).collect());

    // Column player: max Σq s.t. A q ≤ 1, q ≥ 0.
    let mut col_lp = LinearProgram::new(Sense::Maximize, vec![1.0; n]);
    for i in 0..m {
        col_lp = col_lp.constraint(ap.row(i).iter().copied().collect(), Relation::Le, 1.0);
    }
    let q = col_lp.solve()?;
    let col_val = 1.0 / q.objective;
    let col: Vec<f64> = normalize(q.x.iter().map(|v| v * col_val).collect());

    Ok(ZeroSumSolution {
        value: row_val - shift,
        row,
        col,
        dual_value: col_val - shift,
    })
}

fn normalize(mut x: Vec<f64>) -> Vec<f64> {
    x.iter_mut().for_each(|v| *v = v.max(0.0));
    let s: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= s);
    x
}

/// Which side of the matrix a player is on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Row,
    Col,
}

/// LP over the optimal strategies of `side`: `x ≥ 0`, `Σx = 1` and
/// `x` guarantees the value against every opponent action.
fn optimal_polytope(a: &DMatrix<f64>, value: f64, side: Side, objective: Vec<f64>, slack: f64) -> LinearProgram {
    let k = objective.len();
    let mut lp = LinearProgram::new(Sense::Maximize, objective).constraint(vec![1.0; k], Relation::Eq, 1.0);
    match side {
        Side::Row => {
            for j in 0..a.ncols() {
                lp = lp.constraint(a.column(j).iter().copied().collect(), Relation::Ge, value - slack);
            }
        }
        Side::Col => {
            for i in 0..a.nrows() {
                lp = lp.constraint(a.row(i).iter().copied().collect(), Relation::Le, value + slack);
            }
        }
    }
    lp
}

fn unit(k: usize, at: usize) -> Vec<f64> {
    let mut v = vec![0.0; k];
    v[at] = 1.0;
    v
}

/// Optimizes `objective` over the optimal strategies of `side`.
fn over_optimal(a: &DMatrix<f64>, value: f64, side: Side, objective: Vec<f64>) -> Result<LpSolution> {
    match optimal_polytope(a, value, side, objective.clone(), 0.0).solve() {
        Err(Error::Infeasible) => {
            optimal_polytope(a, value, side, objective, VALUE_SLACK * payoff_scale(a)).solve()
        }
        other => other,
    }
}

/// Maximizer of coordinate `action` over the optimal strategies of `side`.
fn max_weight(a: &DMatrix<f64>, value: f64, side: Side, action: usize) -> Result<(f64, Vec<f64>)> {
    let k = match side {
        Side::Row => a.nrows(),
        Side::Col => a.ncols(),
    };
    let sol = over_optimal(a, value, side, unit(k, action))?;
    Ok((sol.objective, normalize(sol.x)))
}

fn essential_from_value(a: &DMatrix<f64>, value: f64) -> Result<[Vec<usize>; 2]> {
    let mut out = [Vec::new(), Vec::new()];
    for (slot, side, k) in [(0, Side::Row, a.nrows()), (1, Side::Col, a.ncols())] {
        for action in 0..k {
            if max_weight(a, value, side, action)?.0 > ESSENTIAL_TOL {
                out[slot].push(action);
            }
        }
    }
    Ok(out)
}

/// Essential actions of the row and the column player.
pub fn essential_strategies(a: &DMatrix<f64>) -> Result<[Vec<usize>; 2]> {
    let sol = zero_sum_solve(a)?;
    essential_from_value(a, sol.value)
}

/// A non-essential action together with the optimal opponent strategy under
/// which it earns strictly less than the value.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub player: usize,
    pub action: usize,
    pub opponent_strategy: Vec<f64>,
    pub shortfall: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquilibriumReport {
    /// Equilibrium payoff of player 0.
    pub value: f64,
    pub x_star: MixedProfile,
    pub essential: Vec<Vec<usize>>,
    pub witnesses: Vec<Witness>,
    /// `margins[i][α] = u_i(x*) − v_iα(x*)`: how much worse action `α` does
    /// than the equilibrium payoff. Zero on essential actions, strictly
    /// positive elsewhere.
    pub margins: Vec<Vec<f64>>,
}

impl EquilibriumReport {
    pub fn is_interior(&self) -> bool {
        self.x_star.is_interior(ESSENTIAL_TOL)
    }

    /// Support of `x*` (entries above [`ESSENTIAL_TOL`]).
    pub fn support(&self) -> Vec<Vec<usize>> {
        support(&self.x_star, ESSENTIAL_TOL)
    }

    /// Smallest margin over non-essential actions, `None` if every action is essential.
    pub fn min_margin(&self) -> Option<f64> {
        self.margins
            .iter()
            .zip(&self.essential)
            .flat_map(|(m, ess)| m.iter().enumerate().filter(move |(a, _)| !ess.contains(a)).map(|(_, v)| *v))
            .reduce(f64::min)
    }
}

pub(crate) fn support(x: &MixedProfile, tol: f64) -> Vec<Vec<usize>> {
    x.as_slices()
        .iter()
        .map(|xi| (0..xi.len()).filter(|&a| xi[a] > tol).collect())
        .collect()
}

/// Maximal-support equilibrium of the zero-sum game with row payoff `a`.
///
/// The returned report satisfies: the support of `x*` equals the essential
/// sets, and every non-essential action earns strictly less than the value
/// against `x*`. A violation of either is reported as an error.
pub fn max_support_equilibrium(a: &DMatrix<f64>) -> Result<EquilibriumReport> {
    let sol = zero_sum_solve(a)?;
    let v = sol.value;
    let essential = essential_from_value(a, v)?;
    let (m, n) = a.shape();

    let mut witnesses = Vec::new();
    let mut strategies: [Vec<Vec<f64>>; 2] = [Vec::new(), Vec::new()];

    for &act in &essential[0] {
        strategies[0].push(max_weight(a, v, Side::Row, act)?.1);
    }
    for &act in &essential[1] {
        strategies[1].push(max_weight(a, v, Side::Col, act)?.1);
    }
    // Column player's non-essential actions are punished by row strategies
    // maximizing that column's payoff to the row player, and vice versa.
    for b in (0..n).filter(|b| !essential[1].contains(b)) {
        let sol = over_optimal(a, v, Side::Row, a.column(b).iter().copied().collect())?;
        let x = normalize(sol.x);
        witnesses.push(Witness {
            player: 1,
            action: b,
            shortfall: sol.objective - v,
            opponent_strategy: x.clone(),
        });
        strategies[0].push(x);
    }
    for r in (0..m).filter(|r| !essential[0].contains(r)) {
        let obj: Vec<f64> = a.row(r).iter().map(|v| -v).collect();
        let sol = over_optimal(a, v, Side::Col, obj)?;
        let y = normalize(sol.x);
        witnesses.push(Witness {
            player: 0,
            action: r,
            shortfall: v + sol.objective,
            opponent_strategy: y.clone(),
        });
        strategies[1].push(y);
    }

    let barycenter = |list: &[Vec<f64>], k: usize| -> Vec<f64> {
        let mut c = vec![0.0; k];
        for s in list {
            c.iter_mut().zip(s).for_each(|(ci, si)| *ci += si);
        }
        normalize(c)
    };
    let x_row = barycenter(&strategies[0], m);
    let x_col = barycenter(&strategies[1], n);

    let ax = a.transpose() * DVector::from_column_slice(&x_row);
    let ay = a * DVector::from_column_slice(&x_col);
    let margins = vec![
        ay.iter().map(|p| v - p).collect::<Vec<_>>(),
        ax.iter().map(|p| p - v).collect::<Vec<_>>(),
    ];

    let report = EquilibriumReport {
        value: v,
        x_star: MixedProfile::new(vec![x_row, x_col])?,
        essential: essential.to_vec(),
        witnesses,
        margins,
    };
    if report.support() != report.essential {
        return Err(Error::Domain(format!(
            "support {:?} of the barycenter differs from the essential sets {:?}",
            report.support(),
            report.essential
        )));
    }
    if let Some(mm) = report.min_margin() {
        if mm <= 0.0 {
            return Err(Error::Domain(format!("non-essential action with margin {mm:e}")));
        }
    }
    Ok(report)
}

/// Maximal-support equilibrium of a two-player constant-sum game, with value
/// and margins expressed in the game's own (affinely transformed) payoffs.
pub fn equilibrium_for_game(game: &GameSpec) -> Result<EquilibriumReport> {
    let a = game
        .row_player_matrix()
        .ok_or_else(|| Error::InvalidGame("equilibrium analysis needs a two-player game".into()))?;
    if !game.validate_constant_sum()?.iter().all(|r| r.is_constant()) {
        return Err(Error::InvalidGame("equilibrium analysis needs a constant-sum game".into()));
    }
    let mut report = max_support_equilibrium(&a)?;
    let v = game.payoff_vectors(report.x_star.as_slices())?;
    let u: Vec<f64> = (0..2).map(|i| dot(&v[i], report.x_star.player(i))).collect();
    report.value = u[0];
    report.margins = (0..2).map(|i| v[i].iter().map(|p| u[i] - p).collect()).collect();
    Ok(report)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NashCheck {
    /// `max_α v_iα(x) − u_i(x)` per player.
    pub gaps: Vec<f64>,
    pub is_nash: bool,
}

/// Best-response gaps of every player at `x`.
pub fn verify_nash(game: &GameSpec, x: &MixedProfile, tol: f64) -> Result<NashCheck> {
    let v = game.payoff_vectors(x.as_slices())?;
    let gaps: Vec<f64> = v
        .iter()
        .zip(x.as_slices())
        .map(|(vi, xi)| vi.iter().copied().fold(f64::NEG_INFINITY, f64::max) - dot(vi, xi))
        .collect();
    let is_nash = gaps.iter().all(|&g| g <= tol);
    Ok(NashCheck { gaps, is_nash })
}

/// Interior equilibrium of a polymatrix game from the equalization system
/// `v_iα(x) = v_i0(x)`, `Σ_α x_iα = 1`. The system may be singular (a
/// continuum of equilibria); the minimum-norm solution is returned. Fails
/// when that solution is not strictly interior or not an equilibrium.
pub fn interior_equilibrium(game: &GameSpec) -> Result<MixedProfile> {
    let edges = match game.form() {
        GameForm::Polymatrix { edges } => edges,
        GameForm::NormalForm { .. } => {
            return Err(Error::InvalidGame(
                "interior equilibrium search needs a polymatrix game".into(),
            ))
        }
    };
    let actions = game.actions();
    let mut offsets = vec![0usize];
    for &k in actions {
        offsets.push(offsets.last().unwrap() + k);
    }
    let dim = *offsets.last().unwrap();
    let n_rows: usize = actions.iter().map(|k| k - 1).sum::<usize>() + actions.len();
    let mut mat = DMatrix::<f64>::zeros(n_rows, dim);
    let mut rhs = DVector::<f64>::zeros(n_rows);

    let mut row = 0;
    for (p, &k) in actions.iter().enumerate() {
        for alpha in 1..k {
            for e in edges {
                // Coefficients of v_pα − v_p0 on the neighbour's strategy.
                if e.i == p {
                    for b in 0..actions[e.j] {
                        mat[(row, offsets[e.j] + b)] += e.u_ij[(alpha, b)] - e.u_ij[(0, b)];
                    }
                } else if e.j == p {
                    for a in 0..actions[e.i] {
                        mat[(row, offsets[e.i] + a)] += e.u_ji[(a, alpha)] - e.u_ji[(a, 0)];
                    }
                }
            }
            row += 1;
        }
        for c in offsets[p]..offsets[p + 1] {
            mat[(row, c)] = 1.0;
        }
        rhs[row] = 1.0;
        row += 1;
    }

    let svd = mat.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-10)
        .map_err(|e| Error::NoInteriorEquilibrium(e.to_string()))?;
    let residual = (&mat * &sol - &rhs).amax();
    if residual > 1e-9 {
        return Err(Error::NoInteriorEquilibrium(format!(
            "equalization system is inconsistent (residual {residual:e})"
        )));
    }
    let x: Vec<Vec<f64>> = offsets.windows(2).map(|w| sol.as_slice()[w[0]..w[1]].to_vec()).collect();
    if x.iter().flatten().any(|&v| v <= ESSENTIAL_TOL) {
        return Err(Error::NoInteriorEquilibrium(
            "equalizing profile leaves the interior of the strategy space".into(),
        ));
    }
    let x = MixedProfile::new(x)?;
    let check = verify_nash(game, &x, 1e-9)?;
    if !check.is_nash {
        return Err(Error::NoInteriorEquilibrium(format!("equalizing profile has gaps {:?}", check.gaps)));
    }
    Ok(x)
}
