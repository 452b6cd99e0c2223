//! Diagnostics along trajectories: the Fenchel coupling and its drift,
//! regret, numeric divergence of the reduced field, recurrence statistics and
//! the tail classification of boundary convergence.

use crate::dynamics::{ForelSystem, ReducedState, ScoreState, Trajectory};
use crate::equilibrium::EquilibriumReport;
use crate::error::{Error, Result};
use crate::game::{dot, GameSpec, MixedProfile};
use crate::regularizer::{Regularizer, RegularizerKind};

/// Equilibrium reference and per-player weights for the coupling.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReference {
    x_star: MixedProfile,
    weights: Vec<f64>,
    interior: bool,
}

impl CouplingReference {
    pub fn new(x_star: MixedProfile, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != x_star.num_players() {
            return Err(Error::Shape("one weight per player is required".into()));
        }
        if weights.iter().any(|w| !(*w > 0.0 && w.is_finite())) {
            return Err(Error::Domain("coupling weights must be positive".into()));
        }
        let interior = x_star.is_interior(0.0);
        Ok(CouplingReference {
            x_star,
            weights,
            interior,
        })
    }

    pub fn unweighted(x_star: MixedProfile) -> Self {
        let n = x_star.num_players();
        Self::new(x_star, vec![1.0; n]).expect("unit weights are valid")
    }

    /// Weights `1/a_i` that make the coupling a constant of motion in a game
    /// obtained from a constant-sum one by payoff transforms `a_i u_i + b_i`.
    pub fn for_game(game: &GameSpec, x_star: MixedProfile) -> Result<Self> {
        let w = game.affine().iter().map(|a| 1.0 / a.scale).collect();
        Self::new(x_star, w)
    }

    pub fn x_star(&self) -> &MixedProfile {
        &self.x_star
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn is_interior(&self) -> bool {
        self.interior
    }
}

fn check_dims(regs: &[Regularizer], reference: &CouplingReference, y: &[Vec<f64>]) -> Result<()> {
    let xs = reference.x_star.as_slices();
    if regs.len() != xs.len()
        || y.len() != xs.len()
        || regs.iter().zip(xs).zip(y).any(|((r, x), yi)| r.dim() != x.len() || yi.len() != x.len())
    {
        return Err(Error::Shape("regularizers, reference and scores disagree".into()));
    }
    Ok(())
}

/// `G(y) = Σ_i w_i [h_i*(y_i) − ⟨y_i, x*_i⟩]`.
pub fn fenchel_coupling(regs: &[Regularizer], reference: &CouplingReference, y: &ScoreState) -> Result<f64> {
    check_dims(regs, reference, y.as_slices())?;
    Ok(coupling_unchecked(regs, reference, y.as_slices()))
}

fn coupling_unchecked(regs: &[Regularizer], reference: &CouplingReference, y: &[Vec<f64>]) -> f64 {
    regs.iter()
        .zip(y)
        .zip(reference.x_star.as_slices())
        .zip(&reference.weights)
        .map(|(((r, yi), xi), w)| w * (r.conjugate_unchecked(yi) - dot(yi, xi)))
        .sum()
}

/// Lower bound `−Σ_i w_i max h_i` of the coupling.
pub fn coupling_lower_bound(regs: &[Regularizer], reference: &CouplingReference) -> f64 {
    -regs
        .iter()
        .zip(&reference.weights)
        .map(|(r, w)| w * r.max_value())
        .sum::<f64>()
}

/// Time derivative of the coupling, `Σ_i w_i ⟨v_i(x), x_i − x*_i⟩` with `x = Q(y)`.
pub fn coupling_drift(sys: &ForelSystem, reference: &CouplingReference, y: &ScoreState) -> Result<f64> {
    check_dims(sys.regularizers(), reference, y.as_slices())?;
    let x = sys.choice(y)?;
    drift_at(sys.game(), reference, &x)
}

/// Coupling drift at a strategy profile.
pub fn drift_at(game: &GameSpec, reference: &CouplingReference, x: &MixedProfile) -> Result<f64> {
    let v = game.payoff_vectors(x.as_slices())?;
    Ok(v.iter()
        .zip(x.as_slices())
        .zip(reference.x_star.as_slices())
        .zip(&reference.weights)
        .map(|(((vi, xi), si), w)| w * vi.iter().zip(xi).zip(si).map(|((v, a), b)| v * (a - b)).sum::<f64>())
        .sum())
}

/// Coupling at every sample of a trajectory.
pub fn coupling_series(traj: &Trajectory, regs: &[Regularizer], reference: &CouplingReference) -> Result<Vec<f64>> {
    traj.states().iter().map(|y| fenchel_coupling(regs, reference, y)).collect()
}

/// Largest `|G(t_k) − G(0)|` over a coupling series.
pub fn max_deviation(series: &[f64]) -> f64 {
    series.first().map_or(0.0, |g0| series.iter().fold(0.0, |m, g| m.max((g - g0).abs())))
}

/// Regret `R_i(t_k) = (max_α ∫v_iα − ∫u_i) / t_k` at every sample with `t_k > 0`.
pub fn regret(traj: &Trajectory, i: usize) -> Result<Vec<(f64, f64)>> {
    if i >= traj.num_players() {
        return Err(Error::InvalidArgument(format!("player {i} does not exist")));
    }
    Ok(traj
        .times()
        .iter()
        .zip(traj.cum_payoff_vec())
        .zip(traj.cum_utility())
        .filter(|((t, _), _)| **t > 0.0)
        .map(|((t, v), u)| {
            let best = v[i].iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (*t, (best - u[i]) / t)
        })
        .collect())
}

/// Bound on `t·R_i(t)` for a player started from scores `y0`:
/// `max_p [h(p) − ⟨y0, p⟩] + h*(y0) = max h + h*(y0) − min_α y0_α`, since
/// every pure strategy maximizes the regularizer. Equals `Ω` when `y0 = 0`.
pub fn regret_bound(reg: &Regularizer, y0: &[f64]) -> Result<f64> {
    let min = y0.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(reg.max_value() + reg.conjugate(y0)? - min)
}

/// Central-difference estimate of `∂g_k/∂z_k` summed over coordinates.
pub fn numeric_divergence<F>(mut g: F, z: &[f64], delta: f64) -> f64
where
    F: FnMut(&[f64]) -> Vec<f64>,
{
    let mut p = z.to_vec();
    let mut sum = 0.0;
    for k in 0..z.len() {
        p[k] = z[k] + delta;
        let plus = g(&p)[k];
        p[k] = z[k] - delta;
        let minus = g(&p)[k];
        p[k] = z[k];
        sum += (plus - minus) / (2.0 * delta);
    }
    sum
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Divergence {
    Value(f64),
    /// A Euclidean choice map changes its active set within `±delta` of `z`,
    /// where the reduced field is not differentiable.
    SkippedAtKink,
}

impl Divergence {
    pub fn value(self) -> Option<f64> {
        match self {
            Divergence::Value(v) => Some(v),
            Divergence::SkippedAtKink => None,
        }
    }
}

fn flatten(z: &[Vec<f64>]) -> Vec<f64> {
    z.iter().flatten().copied().collect()
}

fn unflatten(flat: &[f64], like: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut at = 0;
    like.iter()
        .map(|zi| {
            let v = flat[at..at + zi.len()].to_vec();
            at += zi.len();
            v
        })
        .collect()
}

/// Numeric divergence of the reduced field at `z`.
pub fn divergence_check(sys: &ForelSystem, z: &ReducedState, delta: f64) -> Result<Divergence> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let flat = flatten(&z.z);
    let at = |p: &[f64]| ReducedState {
        z: unflatten(p, &z.z),
        benchmark: z.benchmark.clone(),
    };
    if sys.regularizers().iter().any(|r| r.kind() == RegularizerKind::Euclidean) {
        let active = |x: &MixedProfile| -> Vec<Vec<bool>> {
            x.as_slices().iter().map(|xi| xi.iter().map(|&v| v > 0.0).collect()).collect()
        };
        let base = active(&sys.reduced_choice(z)?);
        let mut p = flat.clone();
        for k in 0..flat.len() {
            for s in [delta, -delta] {
                p[k] = flat[k] + s;
                if active(&sys.reduced_choice(&at(&p))?) != base {
                    return Ok(Divergence::SkippedAtKink);
                }
            }
            p[k] = flat[k];
        }
    }
    sys.reduced_choice(z)?;
    let div = numeric_divergence(
        |p| flatten(&sys.reduced_field(&at(p)).expect("finite reduced state")),
        &flat,
        delta,
    );
    Ok(Divergence::Value(div))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceReport {
    pub epsilon: f64,
    pub t_min: f64,
    pub first_return_time: Option<f64>,
    pub min_distance_after_burn_in: f64,
    /// Number of disjoint visits to the ε-ball around the initial profile:
    /// consecutive visits count once unless separated by an excursion
    /// beyond 2ε.
    pub n_returns: usize,
}

/// Returns of a sampled trajectory to its initial profile.
pub fn recurrence_stats(profiles: &[(f64, MixedProfile)], epsilon: f64, t_min: f64) -> Result<RecurrenceReport> {
    let (_, x0) = profiles
        .first()
        .ok_or_else(|| Error::InvalidArgument("trajectory has no samples".into()))?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {epsilon}")));
    }
    let mut report = RecurrenceReport {
        epsilon,
        t_min,
        first_return_time: None,
        min_distance_after_burn_in: f64::INFINITY,
        n_returns: 0,
    };
    let mut armed = true;
    for (t, x) in profiles.iter().filter(|(t, _)| *t > t_min) {
        let d = x.sup_distance(x0);
        report.min_distance_after_burn_in = report.min_distance_after_burn_in.min(d);
        if d < epsilon {
            if armed {
                report.n_returns += 1;
                report.first_return_time.get_or_insert(*t);
                armed = false;
            }
        } else if d > 2.0 * epsilon {
            armed = true;
        }
    }
    Ok(report)
}

/// [`recurrence_stats`] over the samples of a score trajectory.
pub fn trajectory_recurrence(traj: &Trajectory, epsilon: f64, t_min: f64) -> Result<RecurrenceReport> {
    let samples: Vec<(f64, MixedProfile)> =
        traj.times().iter().copied().zip(traj.profiles().iter().cloned()).collect();
    recurrence_stats(&samples, epsilon, t_min)
}

/// Probability mass outside the support of `x*`, summed over players.
pub fn face_mass(x: &MixedProfile, support: &[Vec<usize>]) -> f64 {
    x.as_slices()
        .iter()
        .zip(support)
        .map(|(xi, s)| {
            xi.iter()
                .enumerate()
                .filter(|(a, _)| !s.contains(a))
                .fold(0.0, |acc, (_, v)| acc + v)
        })
        .fold(0.0, |acc, m| acc + m)
}

#[derive(Debug, Clone, PartialEq)]
pub enum SupportClass {
    /// The equilibrium is interior; orbits stay in the interior.
    InteriorRecurrent,
    /// Mass outside the face spanned by `support` decreases on the tail.
    ConvergingToFace { support: Vec<Vec<usize>>, face_mass: f64 },
    /// The equilibrium is pure and the tail sits within `tol` of it.
    ConvergedToPure { profile: Vec<usize>, distance: f64 },
    /// None of the above could be established from the tail.
    Inconclusive { face_mass: f64 },
}

impl SupportClass {
    pub fn name(&self) -> &'static str {
        match self {
            SupportClass::InteriorRecurrent => "interior-recurrent",
            SupportClass::ConvergingToFace { .. } => "converging-to-face",
            SupportClass::ConvergedToPure { .. } => "converged-to-pure",
            SupportClass::Inconclusive { .. } => "inconclusive",
        }
    }
}

/// Classifies the last 10% of the samples against the maximal-support equilibrium.
pub fn support_classification(
    profiles: &[MixedProfile],
    eq: &EquilibriumReport,
    tol: f64,
) -> Result<SupportClass> {
    if profiles.is_empty() {
        return Err(Error::InvalidArgument("trajectory has no samples".into()));
    }
    if eq.is_interior() {
        return Ok(SupportClass::InteriorRecurrent);
    }
    let support = eq.support();
    let start = profiles.len() - (profiles.len() / 10).max(1);
    let tail = &profiles[start..];
    let last = tail.last().expect("nonempty tail");
    let mass = face_mass(last, &support);

    if support.iter().all(|s| s.len() == 1) {
        let distance = last.sup_distance(&eq.x_star);
        if distance <= tol {
            return Ok(SupportClass::ConvergedToPure {
                profile: support.iter().map(|s| s[0]).collect(),
                distance,
            });
        }
    }
    let masses: Vec<f64> = tail.iter().map(|x| face_mass(x, &support)).collect();
    let decreasing = masses.windows(2).all(|w| w[1] <= w[0] + tol);
    if decreasing && masses.first() >= masses.last() {
        Ok(SupportClass::ConvergingToFace {
            support,
            face_mass: mass,
        })
    } else {
        Ok(SupportClass::Inconclusive { face_mass: mass })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::equilibrium::max_support_equilibrium;
    use crate::game::Affine;
    use crate::ode::Method;
    use approx::assert_abs_diff_eq;

    fn mp_ref() -> CouplingReference {
        CouplingReference::unweighted(MixedProfile::uniform(&[2, 2]))
    }

    #[test]
    fn coupling_examples() {
        let e = vec![Regularizer::entropic(2).unwrap(); 2];
        let g = fenchel_coupling(&e, &mp_ref(), &ScoreState::zeros(&[2, 2])).unwrap();
        assert_abs_diff_eq!(g, 2.0 * 2f64.ln(), epsilon = 1e-15);

        let q = vec![Regularizer::euclidean(2).unwrap(); 2];
        let g = fenchel_coupling(&q, &mp_ref(), &ScoreState::zeros(&[2, 2])).unwrap();
        assert_abs_diff_eq!(g, -0.5, epsilon = 1e-15);

        let e3 = vec![Regularizer::entropic(2).unwrap(); 3];
        let r = CouplingReference::new(MixedProfile::uniform(&[2, 2, 2]), vec![2.0, 1.0, 1.0]).unwrap();
        let g = fenchel_coupling(&e3, &r, &ScoreState::zeros(&[2, 2, 2])).unwrap();
        let direct: f64 = [2.0, 1.0, 1.0].iter().map(|w| w * (0f64.exp() + 0f64.exp()).ln()).sum();
        assert_abs_diff_eq!(g, direct, epsilon = 1e-15);
        assert_abs_diff_eq!(g, 4.0 * 2f64.ln(), epsilon = 1e-15);
    }

    #[test]
    fn coupling_bounded_below() {
        let e = vec![Regularizer::entropic(2).unwrap(); 2];
        let r = mp_ref();
        let lb = coupling_lower_bound(&e, &r);
        for y in [vec![vec![30.0, -30.0], vec![-5.0, 12.0]], vec![vec![0.1, 0.2], vec![0.0, 0.0]]] {
            assert!(fenchel_coupling(&e, &r, &ScoreState::new(y).unwrap()).unwrap() >= lb);
        }
    }

    #[test]
    fn reference_validation() {
        let x = MixedProfile::uniform(&[2, 2]);
        assert!(CouplingReference::new(x.clone(), vec![1.0]).is_err());
        assert!(CouplingReference::new(x.clone(), vec![1.0, 0.0]).is_err());
        assert!(CouplingReference::new(x, vec![1.0, 2.0]).unwrap().is_interior());
        let pure = MixedProfile::pure(&[2, 2], &[0, 0]).unwrap();
        assert!(!CouplingReference::unweighted(pure).is_interior());
    }

    #[test]
    fn drift_examples() {
        let sys = ForelSystem::uniform(catalog::matching_pennies(), RegularizerKind::Entropic).unwrap();
        let y = ScoreState::new(vec![vec![0.7, -1.3], vec![2.0, 0.4]]).unwrap();
        assert!(coupling_drift(&sys, &mp_ref(), &y).unwrap().abs() <= 1e-12);

        let dom = catalog::dominant_strategy();
        let rep = max_support_equilibrium(&catalog::dominant_strategy_matrix()).unwrap();
        let r = CouplingReference::unweighted(rep.x_star.clone());
        let x = MixedProfile::new(vec![vec![0.4, 0.6], vec![0.7, 0.3]]).unwrap();
        assert!(drift_at(&dom, &r, &x).unwrap() < 0.0);

        let same = CouplingReference::unweighted(x.clone());
        assert_eq!(drift_at(&dom, &same, &x).unwrap(), 0.0);
    }

    #[test]
    fn weighted_drift_vanishes_after_affine_transform() {
        let g = catalog::matching_pennies_cycle(3)
            .with_affine(vec![
                Affine::new(1.0, 0.0),
                Affine::new(2.0, 1.0),
                Affine::new(3.0, -1.0),
            ])
            .unwrap();
        let r = CouplingReference::for_game(&g, MixedProfile::uniform(&[2, 2, 2])).unwrap();
        let x = MixedProfile::new(vec![vec![0.2, 0.8], vec![0.6, 0.4], vec![0.35, 0.65]]).unwrap();
        assert!(drift_at(&g, &r, &x).unwrap().abs() <= 1e-12);
        let flat = CouplingReference::unweighted(MixedProfile::uniform(&[2, 2, 2]));
        assert!(drift_at(&g, &flat, &x).unwrap().abs() > 1e-3);
    }

    #[test]
    fn regret_zero_at_equilibrium() {
        let sys = ForelSystem::uniform(catalog::matching_pennies(), RegularizerKind::Entropic).unwrap();
        let traj = sys.integrate(&ScoreState::zeros(&[2, 2]), 5.0, 1e-2, Method::Rk4, 10).unwrap();
        for i in 0..2 {
            let r = regret(&traj, i).unwrap();
            assert_eq!(r.len(), traj.len() - 1);
            assert!(r.iter().all(|(_, v)| v.abs() <= 1e-14));
        }
        assert!(regret(&traj, 2).is_err());
    }

    #[test]
    fn regret_bound_reduces_to_omega_at_prox_center() {
        for r in [Regularizer::entropic(3).unwrap(), Regularizer::euclidean(3).unwrap()] {
            assert_abs_diff_eq!(regret_bound(&r, &[0.0; 3]).unwrap(), r.omega(), epsilon = 1e-15);
            assert!(regret_bound(&r, &[2.0, -1.0, 0.0]).unwrap() > r.omega());
        }
        let e = Regularizer::entropic(2).unwrap();
        let y0 = e.preimage(&[0.8, 0.2]).unwrap();
        assert_abs_diff_eq!(regret_bound(&e, &y0).unwrap(), -(0.2f64.ln()), epsilon = 1e-14);
    }

    #[test]
    fn regret_single_player_quadrature() {
        // Player 0's payoffs do not depend on the opponent.
        let edge = crate::game::Edge::new(
            0,
            1,
            nalgebra::DMatrix::from_row_slice(3, 2, &[1.0, 1.0, 0.2, 0.2, -0.5, -0.5]),
            nalgebra::DMatrix::zeros(3, 2),
        );
        let g = GameSpec::polymatrix(vec![3, 2], vec![edge], false).unwrap();
        let sys = ForelSystem::uniform(g.clone(), RegularizerKind::Entropic).unwrap();
        let y0 = ScoreState::new(vec![vec![-2.0, 0.0, 1.5], vec![0.0, 0.0]]).unwrap();
        let traj = sys.integrate(&y0, 4.0, 1e-3, Method::Rk4, 1).unwrap();
        let v = [1.0, 0.2, -0.5];
        let mut integral = 0.0;
        let mut k_checked = 0;
        let reg = regret(&traj, 0).unwrap();
        for k in 1..traj.len() {
            let (t0, t1) = (traj.times()[k - 1], traj.times()[k]);
            let u0 = dot(&v, traj.profiles()[k - 1].player(0));
            let u1 = dot(&v, traj.profiles()[k].player(0));
            integral += 0.5 * (t1 - t0) * (u0 + u1);
            if k % 500 == 0 {
                let (t, r) = reg[k - 1];
                assert_eq!(t, t1);
                assert_abs_diff_eq!(r, 1.0 - integral / t1, epsilon = 1e-6);
                k_checked += 1;
            }
        }
        assert_eq!(k_checked, 8);
    }

    #[test]
    fn divergence_examples() {
        let sys = ForelSystem::uniform(catalog::matching_pennies(), RegularizerKind::Entropic).unwrap();
        let b = ReducedState::default_benchmark(&[2, 2]);
        let z0 = ReducedState {
            z: vec![vec![0.0], vec![0.0]],
            benchmark: b.clone(),
        };
        assert!(divergence_check(&sys, &z0, 1e-4).unwrap().value().unwrap().abs() <= 1e-8);

        let z = ReducedState {
            z: vec![vec![1.3], vec![-0.4]],
            benchmark: b.clone(),
        };
        let coord = ForelSystem::uniform(catalog::coordination(), RegularizerKind::Entropic).unwrap();
        let d = divergence_check(&coord, &z, 1e-4).unwrap().value().unwrap();
        assert!(d.abs() < 1e-8, "field of player i does not depend on z_i");

        let euc = ForelSystem::uniform(catalog::matching_pennies(), RegularizerKind::Euclidean).unwrap();
        let kink = ReducedState {
            z: vec![vec![1.0], vec![0.2]],
            benchmark: b.clone(),
        };
        assert_eq!(divergence_check(&euc, &kink, 1e-4).unwrap(), Divergence::SkippedAtKink);
        let smooth = ReducedState {
            z: vec![vec![0.3], vec![-0.2]],
            benchmark: b,
        };
        assert!(divergence_check(&euc, &smooth, 1e-4).unwrap().value().unwrap().abs() < 1e-8);
    }

    #[test]
    fn numeric_divergence_of_linear_map() {
        let d = numeric_divergence(|p| vec![2.0 * p[0] + p[1], -0.5 * p[1], p[0] * p[1]], &[1.0, 2.0, 0.0], 1e-3);
        assert_abs_diff_eq!(d, 1.5, epsilon = 1e-10);
    }

    #[test]
    fn recurrence_of_stationary_trajectory() {
        let x = MixedProfile::uniform(&[2, 2]);
        let s: Vec<_> = (0..20).map(|k| (k as f64 * 0.5, x.clone())).collect();
        let r = recurrence_stats(&s, 1e-3, 1.0).unwrap();
        assert_eq!(r.first_return_time, Some(1.5));
        assert_eq!(r.min_distance_after_burn_in, 0.0);
        assert_eq!(r.n_returns, 1);
    }

    #[test]
    fn recurrence_counts_disjoint_visits() {
        let p = |a: f64| MixedProfile::new(vec![vec![a, 1.0 - a]]).unwrap();
        let path = [0.5, 0.505, 0.7, 0.503, 0.515, 0.501, 0.9, 0.5];
        let s: Vec<_> = path.iter().enumerate().map(|(k, &a)| (k as f64, p(a))).collect();
        let r = recurrence_stats(&s, 1e-2, 0.0).unwrap();
        assert_eq!(r.first_return_time, Some(1.0));
        assert_eq!(r.n_returns, 3);
        assert_eq!(r.min_distance_after_burn_in, 0.0);
    }

    #[test]
    fn classification_labels() {
        let mp = max_support_equilibrium(&catalog::matching_pennies_matrix()).unwrap();
        let x = vec![MixedProfile::uniform(&[2, 2])];
        assert_eq!(support_classification(&x, &mp, 1e-6).unwrap(), SupportClass::InteriorRecurrent);

        let dom = max_support_equilibrium(&catalog::dominant_strategy_matrix()).unwrap();
        let near = vec![MixedProfile::new(vec![vec![0.999, 0.001], vec![0.998, 0.002]]).unwrap()];
        assert_eq!(support_classification(&near, &dom, 1e-2).unwrap().name(), "converged-to-pure");
        let far = vec![MixedProfile::uniform(&[2, 2]); 5];
        assert_eq!(support_classification(&far, &dom, 1e-2).unwrap().name(), "converging-to-face");

        let emb = max_support_equilibrium(&catalog::embedded_matching_pennies_matrix()).unwrap();
        let rising: Vec<_> = (0..20)
            .map(|k| {
                let e = 0.01 * k as f64;
                MixedProfile::new(vec![vec![0.5 - e / 2.0, 0.5 - e / 2.0, e]; 2]).unwrap()
            })
            .collect();
        assert_eq!(support_classification(&rising, &emb, 1e-9).unwrap().name(), "inconclusive");
        let falling: Vec<_> = rising.into_iter().rev().collect();
        match support_classification(&falling, &emb, 1e-9).unwrap() {
            SupportClass::ConvergingToFace { support, face_mass } => {
                assert_eq!(support, vec![vec![0, 1], vec![0, 1]]);
                assert_abs_diff_eq!(face_mass, 0.0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
