//! FoReL learning dynamics.
//!
//! Scores follow `ẏ_i = v_i(x)` with `x_i = Q_i(y_i)`. The same flow is
//! available in score-difference coordinates `z_iα = y_iα − y_i,â`, and in
//! strategy space as the replicator / projection dynamics. A discrete
//! multiplicative-weights step is included for comparison.
//!
//! Integration is fixed-step. The running integrals `∫ v_i(x)` and `∫ u_i(x)`
//! are carried as extra state components so they are accumulated by the same
//! scheme (and at the same order) as the scores themselves.

use crate::error::{Error, Result};
use crate::game::{dot, GameSpec, MixedProfile};
use crate::ode::{step_count, Method, Stepper};
use crate::regularizer::Regularizer;

/// Any score component beyond this magnitude aborts an integration.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

/// Cumulative payoff scores, one vector per player.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreState(Vec<Vec<f64>>);

impl ScoreState {
    pub fn new(y: Vec<Vec<f64>>) -> Result<Self> {
        if y.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("score state has non-finite entries".into()));
        }
        Ok(ScoreState(y))
    }

    pub fn zeros(actions: &[usize]) -> Self {
        ScoreState(actions.iter().map(|&n| vec![0.0; n]).collect())
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

    /// Adds `c` to every score of player `i`.
    pub fn shifted(&self, i: usize, c: f64) -> Self {
        let mut y = self.0.clone();
        y[i].iter_mut().for_each(|v| *v += c);
        ScoreState(y)
    }
}

/// Score differences against a benchmark action per player.
///
/// `z[i]` lists `y_iα − y_i,benchmark[i]` for every `α ≠ benchmark[i]`, in
/// increasing action order.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    pub z: Vec<Vec<f64>>,
    pub benchmark: Vec<usize>,
}

impl ReducedState {
    /// The benchmark used throughout: the last action of every player.
    pub fn default_benchmark(actions: &[usize]) -> Vec<usize> {
        actions.iter().map(|&n| n - 1).collect()
    }

    /// Scores with the benchmark coordinate pinned to zero.
    pub fn embed(&self) -> ScoreState {
        ScoreState(
            self.z
                .iter()
                .zip(&self.benchmark)
                .map(|(zi, &b)| {
                    let mut y = Vec::with_capacity(zi.len() + 1);
                    y.extend_from_slice(&zi[..b]);
                    y.push(0.0);
                    y.extend_from_slice(&zi[b..]);
                    y
                })
                .collect(),
        )
    }

    pub fn sup_norm(&self) -> f64 {
        self.z.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// Projects scores onto score differences.
pub fn reduce(y: &ScoreState, benchmark: &[usize]) -> Result<ReducedState> {
    if benchmark.len() != y.0.len() || benchmark.iter().zip(&y.0).any(|(&b, yi)| b >= yi.len()) {
        return Err(Error::Shape("benchmark does not match the score state".into()));
    }
    let z = y
        .0
        .iter()
        .zip(benchmark)
        .map(|(yi, &b)| {
            yi.iter()
                .enumerate()
                .filter(|&(a, _)| a != b)
                .map(|(_, v)| v - yi[b])
                .collect()
        })
        .collect();
    Ok(ReducedState {
        z,
        benchmark: benchmark.to_vec(),
    })
}

/// A game together with the regularizer of every player.
#[derive(Debug, Clone)]
pub struct ForelSystem {
    game: GameSpec,
    regs: Vec<Regularizer>,
}

impl ForelSystem {
    pub fn new(game: GameSpec, regs: Vec<Regularizer>) -> Result<Self> {
        if regs.len() != game.num_players() {
            return Err(Error::Shape(format!(
                "{} regularizers for {} players",
                regs.len(),
                game.num_players()
            )));
        }
        for (p, (r, &n)) in regs.iter().zip(game.actions()).enumerate() {
            if r.dim() != n {
                return Err(Error::Shape(format!(
                    "regularizer of player {p} lives on {} actions, player has {n}",
                    r.dim()
                )));
            }
        }
        Ok(ForelSystem { game, regs })
    }

    /// Same regularizer kind for every player.
    pub fn uniform(game: GameSpec, kind: crate::regularizer::RegularizerKind) -> Result<Self> {
        let regs = game
            .actions()
            .iter()
            .map(|&n| Regularizer::new(kind, n))
            .collect::<Result<Vec<_>>>()?;
        Self::new(game, regs)
    }

    pub fn game(&self) -> &GameSpec {
        &self.game
    }

    pub fn regularizers(&self) -> &[Regularizer] {
        &self.regs
    }

    fn check_scores(&self, y: &[Vec<f64>]) -> Result<()> {
        if y.len() != self.regs.len() || y.iter().zip(&self.regs).any(|(yi, r)| yi.len() != r.dim()) {
            return Err(Error::Shape("score state does not match the action sets".into()));
        }
        if y.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::Domain("score state has non-finite entries".into()));
        }
        Ok(())
    }

    /// `x = Q(y)`.
    pub fn choice(&self, y: &ScoreState) -> Result<MixedProfile> {
        self.check_scores(&y.0)?;
        Ok(MixedProfile::from_raw(
            y.0.iter()
                .zip(&self.regs)
                .map(|(yi, r)| {
                    let mut x = vec![0.0; r.dim()];
                    r.choice_into(yi, &mut x);
                    x
                })
                .collect(),
        ))
    }

    /// Score-space field `ẏ = v(Q(y))`.
    pub fn field(&self, y: &ScoreState) -> Result<Vec<Vec<f64>>> {
        let x = self.choice(y)?;
        self.game.payoff_vectors(x.as_slices())
    }

    /// The reduced choice map `Q̂(z)`.
    pub fn reduced_choice(&self, z: &ReducedState) -> Result<MixedProfile> {
        self.choice(&z.embed())
    }

    /// Reduced field `V_iα(z) = v_iα(Q̂(z)) − v_i,â(Q̂(z))`.
    pub fn reduced_field(&self, z: &ReducedState) -> Result<Vec<Vec<f64>>> {
        let v = self.field(&z.embed())?;
        Ok(v.iter()
            .zip(&z.benchmark)
            .map(|(vi, &b)| {
                vi.iter()
                    .enumerate()
                    .filter(|&(a, _)| a != b)
                    .map(|(_, x)| x - vi[b])
                    .collect()
            })
            .collect())
    }

    /// Fixed-step integration of the score dynamics over `[0, duration]`,
    /// keeping every `sample_every`-th step (and always the last one).
    pub fn integrate(
        &self,
        y0: &ScoreState,
        duration: f64,
        h: f64,
        method: Method,
        sample_every: usize,
    ) -> Result<Trajectory> {
        self.check_scores(&y0.0)?;
        if !(duration > 0.0 && duration.is_finite()) {
            return Err(Error::InvalidArgument(format!("duration must be positive, got {duration}")));
        }
        if !(h > 0.0 && h <= duration) {
            return Err(Error::InvalidArgument(format!("step must satisfy 0 < h <= T, got {h}")));
        }
        if sample_every == 0 {
            return Err(Error::InvalidArgument("sample_every must be at least 1".into()));
        }

        let layout = Layout::new(self.game.actions());
        let mut state = vec![0.0; layout.len];
        layout.scatter(&y0.0, &mut state[..layout.m]);

        let mut xbuf = layout.zeros();
        let mut vbuf = layout.zeros();
        let mut field = |s: &[f64], d: &mut [f64]| {
            for (p, r) in self.regs.iter().enumerate() {
                r.choice_into(&s[layout.range(p)], &mut xbuf[p]);
            }
            for p in 0..self.regs.len() {
                self.game.payoff_vector_into(&xbuf, p, &mut vbuf[p]);
            }
            for p in 0..self.regs.len() {
                let r = layout.range(p);
                d[r.clone()].copy_from_slice(&vbuf[p]);
                d[layout.m + r.start..layout.m + r.end].copy_from_slice(&vbuf[p]);
                d[2 * layout.m + p] = dot(&vbuf[p], &xbuf[p]);
            }
        };

        let steps = step_count(duration, h);
        let mut traj = Trajectory::with_capacity(steps / sample_every + 2);
        traj.meta = TrajectoryMeta {
            step: h,
            method,
            game_hash: crate::schema::game_fingerprint(&self.game),
        };
        traj.push_sample(0.0, &state, &layout, self);

        let mut stepper = Stepper::new(method, layout.len);
        for k in 1..=steps {
            stepper.step(&mut field, &mut state, h);
            if state[..layout.m].iter().any(|v| !v.is_finite() || v.abs() > DIVERGENCE_LIMIT) {
                return Err(Error::Diverged {
                    last_time: (k - 1) as f64 * h,
                });
            }
            if k % sample_every == 0 || k == steps {
                traj.push_sample(k as f64 * h, &state, &layout, self);
            }
        }
        Ok(traj)
    }
}

/// Offsets of the per-player blocks inside the flat integration state
/// `[y | ∫v | ∫u]`.
struct Layout {
    offsets: Vec<usize>,
    m: usize,
    len: usize,
}

impl Layout {
    fn new(actions: &[usize]) -> Self {
        let mut offsets = Vec::with_capacity(actions.len() + 1);
        let mut acc = 0;
        for &n in actions {
            offsets.push(acc);
            acc += n;
        }
        offsets.push(acc);
        Layout {
            m: acc,
            len: 2 * acc + actions.len(),
            offsets,
        }
    }

    fn range(&self, p: usize) -> std::ops::Range<usize> {
        self.offsets[p]..self.offsets[p + 1]
    }

    fn zeros(&self) -> Vec<Vec<f64>> {
        self.offsets.windows(2).map(|w| vec![0.0; w[1] - w[0]]).collect()
    }

    fn scatter(&self, blocks: &[Vec<f64>], out: &mut [f64]) {
        for (p, b) in blocks.iter().enumerate() {
            out[self.range(p)].copy_from_slice(b);
        }
    }

    fn gather(&self, flat: &[f64]) -> Vec<Vec<f64>> {
        self.offsets.windows(2).map(|w| flat[w[0]..w[1]].to_vec()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrajectoryMeta {
    pub step: f64,
    pub method: Method,
    pub game_hash: String,
}

/// Sampled solution of the score dynamics.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory {
    times: Vec<f64>,
    states: Vec<ScoreState>,
    profiles: Vec<MixedProfile>,
    cum_payoff_vec: Vec<Vec<Vec<f64>>>,
    cum_utility: Vec<Vec<f64>>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    fn with_capacity(n: usize) -> Self {
        Trajectory {
            times: Vec::with_capacity(n),
            states: Vec::with_capacity(n),
            profiles: Vec::with_capacity(n),
            cum_payoff_vec: Vec::with_capacity(n),
            cum_utility: Vec::with_capacity(n),
            meta: TrajectoryMeta::default(),
        }
    }

    fn push_sample(&mut self, t: f64, state: &[f64], layout: &Layout, sys: &ForelSystem) {
        let y = ScoreState(layout.gather(&state[..layout.m]));
        let x = sys.choice(&y).expect("finite scores");
        self.times.push(t);
        self.states.push(y);
        self.profiles.push(x);
        self.cum_payoff_vec.push(layout.gather(&state[layout.m..2 * layout.m]));
        self.cum_utility.push(state[2 * layout.m..].to_vec());
    }

    /// Rebuilds a trajectory from stored samples. Profiles are recomputed
    /// from the scores; the cumulative utility, which is not stored, is
    /// recovered from `∫ u_i = h_i*(y_i(t)) − h_i*(y_i(0))` (the conjugate's
    /// gradient is the choice map, so this is exact along the flow).
    pub fn from_samples(
        sys: &ForelSystem,
        times: Vec<f64>,
        states: Vec<ScoreState>,
        cum_payoff_vec: Vec<Vec<Vec<f64>>>,
        meta: TrajectoryMeta,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() || times.len() != cum_payoff_vec.len() {
            return Err(Error::Shape("sample columns have different lengths".into()));
        }
        if times[0] != 0.0 || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("sample times must start at 0 and increase".into()));
        }
        let regs = sys.regularizers();
        let conj = |y: &ScoreState| -> Vec<f64> {
            y.0.iter().zip(regs).map(|(yi, r)| r.conjugate_unchecked(yi)).collect()
        };
        let mut profiles = Vec::with_capacity(states.len());
        for s in &states {
            profiles.push(sys.choice(s)?);
        }
        let h0 = conj(&states[0]);
        let cum_utility = states
            .iter()
            .map(|s| conj(s).iter().zip(&h0).map(|(a, b)| a - b).collect())
            .collect();
        Ok(Trajectory {
            times,
            states,
            profiles,
            cum_payoff_vec,
            cum_utility,
            meta,
        })
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[ScoreState] {
        &self.states
    }

    pub fn profiles(&self) -> &[MixedProfile] {
        &self.profiles
    }

    pub fn cum_payoff_vec(&self) -> &[Vec<Vec<f64>>] {
        &self.cum_payoff_vec
    }

    pub fn cum_utility(&self) -> &[Vec<f64>] {
        &self.cum_utility
    }

    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }

    pub fn num_players(&self) -> usize {
        self.states.first().map_or(0, |s| s.0.len())
    }

    /// Largest `|z|` (sup norm, last-action benchmark) over all samples.
    pub fn max_score_difference(&self) -> f64 {
        self.states
            .iter()
            .map(|s| {
                s.0.iter()
                    .map(|yi| {
                        let b = yi[yi.len() - 1];
                        yi.iter().fold(0.0f64, |m, v| m.max((v - b).abs()))
                    })
                    .fold(0.0, f64::max)
            })
            .fold(0.0, f64::max)
    }
}

/// Replicator field `ẋ_iα = x_iα [v_iα(x) − ⟨v_i(x), x_i⟩]`.
pub fn replicator_field(game: &GameSpec, x: &MixedProfile) -> Result<Vec<Vec<f64>>> {
    let v = game.payoff_vectors(x.as_slices())?;
    Ok(replicator_from(&v, x.as_slices()))
}

fn replicator_from(v: &[Vec<f64>], x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    v.iter()
        .zip(x)
        .map(|(vi, xi)| {
            let mean = dot(vi, xi);
            vi.iter().zip(xi).map(|(va, xa)| xa * (va - mean)).collect()
        })
        .collect()
}

/// Projection field: payoffs minus their mean over the support
/// `{α : x_iα > support_tol}`, zero off the support.
pub fn projection_field(game: &GameSpec, x: &MixedProfile, support_tol: f64) -> Result<Vec<Vec<f64>>> {
    let v = game.payoff_vectors(x.as_slices())?;
    Ok(projection_from(&v, x.as_slices(), support_tol))
}

fn projection_from(v: &[Vec<f64>], x: &[Vec<f64>], support_tol: f64) -> Vec<Vec<f64>> {
    v.iter()
        .zip(x)
        .map(|(vi, xi)| {
            let (sum, count) = vi
                .iter()
                .zip(xi)
                .filter(|(_, &xa)| xa > support_tol)
                .fold((0.0, 0usize), |(s, c), (va, _)| (s + va, c + 1));
            let mean = if count > 0 { sum / count as f64 } else { 0.0 };
            vi.iter()
                .zip(xi)
                .map(|(va, &xa)| if xa > support_tol { va - mean } else { 0.0 })
                .collect()
        })
        .collect()
}

/// Which strategy-space field to integrate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PrimalField {
    Replicator,
    Projection { support_tol: f64 },
}

/// Fixed-step integration of a strategy-space field. Returns `(t, x)` samples.
/// The projection field is integrated through support changes without event
/// handling; the result is clamped to the simplex only by the field itself.
pub fn integrate_primal(
    game: &GameSpec,
    field: PrimalField,
    x0: &MixedProfile,
    duration: f64,
    h: f64,
    method: Method,
    sample_every: usize,
) -> Result<Vec<(f64, MixedProfile)>> {
    game.check_profile(x0)?;
    if !(duration > 0.0 && h > 0.0 && h <= duration) || sample_every == 0 {
        return Err(Error::InvalidArgument("need 0 < h <= T and sample_every >= 1".into()));
    }
    let layout = Layout::new(game.actions());
    let mut state = vec![0.0; layout.m];
    layout.scatter(x0.as_slices(), &mut state);
    let mut xbuf = layout.zeros();
    let mut vbuf = layout.zeros();
    let mut f = |s: &[f64], d: &mut [f64]| {
        for p in 0..xbuf.len() {
            xbuf[p].copy_from_slice(&s[layout.range(p)]);
        }
        for p in 0..xbuf.len() {
            game.payoff_vector_into(&xbuf, p, &mut vbuf[p]);
        }
        let dx = match field {
            PrimalField::Replicator => replicator_from(&vbuf, &xbuf),
            PrimalField::Projection { support_tol } => projection_from(&vbuf, &xbuf, support_tol),
        };
        layout.scatter(&dx, d);
    };
    let steps = step_count(duration, h);
    let mut out = vec![(0.0, x0.clone())];
    let mut stepper = Stepper::new(method, layout.m);
    for k in 1..=steps {
        stepper.step(&mut f, &mut state, h);
        if state.iter().any(|v| !v.is_finite()) {
            return Err(Error::Diverged {
                last_time: (k - 1) as f64 * h,
            });
        }
        if k % sample_every == 0 || k == steps {
            out.push((k as f64 * h, MixedProfile::from_raw(layout.gather(&state))));
        }
    }
    Ok(out)
}

/// One discrete multiplicative-weights update with per-player rates `eta`.
pub fn mwu_step(game: &GameSpec, x: &MixedProfile, eta: &[f64]) -> Result<MixedProfile> {
    if eta.len() != game.num_players() {
        return Err(Error::Shape(format!(
            "{} learning rates for {} players",
            eta.len(),
            game.num_players()
        )));
    }
    if let Some(e) = eta.iter().find(|&&e| !(e > 0.0 && e.is_finite())) {
        return Err(Error::InvalidArgument(format!("learning rate must be positive, got {e}")));
    }
    let v = game.payoff_vectors(x.as_slices())?;
    Ok(MixedProfile::from_raw(
        v.iter()
            .zip(x.as_slices())
            .zip(eta)
            .map(|((vi, xi), &e)| {
                let m = vi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let w: Vec<f64> = vi.iter().zip(xi).map(|(va, xa)| xa * (e * (va - m)).exp()).collect();
                let s: f64 = w.iter().sum();
                w.into_iter().map(|wa| wa / s).collect()
            })
            .collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::regularizer::RegularizerKind;
    use approx::assert_abs_diff_eq;

    fn mp(kind: RegularizerKind) -> ForelSystem {
        ForelSystem::uniform(catalog::matching_pennies(), kind).unwrap()
    }

    fn profile(rows: &[&[f64]]) -> MixedProfile {
        MixedProfile::new(rows.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn field_vanishes_at_interior_equilibria() {
        let sys = mp(RegularizerKind::Entropic);
        let v = sys.field(&ScoreState::zeros(&[2, 2])).unwrap();
        assert_eq!(v, vec![vec![0.0, 0.0], vec![0.0, 0.0]]);

        let cyc = ForelSystem::uniform(catalog::matching_pennies_cycle(3), RegularizerKind::Entropic).unwrap();
        let v = cyc.field(&ScoreState::zeros(&[2, 2, 2])).unwrap();
        assert!(v.iter().flatten().all(|&a| a == 0.0));
    }

    #[test]
    fn field_against_pure_opponent() {
        // Euclidean scores (1, 0) put the column player on its first action.
        let sys = mp(RegularizerKind::Euclidean);
        let y = ScoreState::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]]).unwrap();
        assert_eq!(sys.choice(&y).unwrap().player(1), &[1.0, 0.0]);
        assert_eq!(sys.field(&y).unwrap()[0], vec![1.0, -1.0]);
    }

    #[test]
    fn reduce_and_embed() {
        let y = ScoreState::new(vec![vec![3.0, 1.0, 2.0], vec![-1.0, 4.0]]).unwrap();
        let z = reduce(&y, &[2, 1]).unwrap();
        assert_eq!(z.z, vec![vec![1.0, -1.0], vec![-5.0]]);
        assert_eq!(z.embed().into_inner(), vec![vec![1.0, -1.0, 0.0], vec![-5.0, 0.0]]);
        assert_eq!(reduce(&y.shifted(0, 7.5), &[2, 1]).unwrap(), z);
        let mid = reduce(&y, &[0, 0]).unwrap();
        assert_eq!(mid.embed().into_inner(), vec![vec![0.0, -2.0, -1.0], vec![0.0, 5.0]]);
        assert!(reduce(&y, &[3, 0]).is_err());
    }

    #[test]
    fn reduced_choice_at_origin_is_uniform() {
        let sys = mp(RegularizerKind::Entropic);
        let z = ReducedState {
            z: vec![vec![0.0], vec![0.0]],
            benchmark: vec![1, 1],
        };
        assert_eq!(sys.reduced_choice(&z).unwrap(), MixedProfile::uniform(&[2, 2]));
    }

    #[test]
    fn reduced_field_is_difference_of_full_field() {
        use rand::{Rng, SeedableRng};
        let sys = ForelSystem::uniform(catalog::embedded_matching_pennies(), RegularizerKind::Entropic).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let y = ScoreState::new(
                (0..2).map(|_| (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect()).collect(),
            )
            .unwrap();
            let z = reduce(&y, &[2, 2]).unwrap();
            let full = sys.field(&y).unwrap();
            let red = sys.reduced_field(&z).unwrap();
            for p in 0..2 {
                for a in 0..2 {
                    assert_abs_diff_eq!(red[p][a], full[p][a] - full[p][2], epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn integrate_argument_checks() {
        let sys = mp(RegularizerKind::Entropic);
        let y0 = ScoreState::zeros(&[2, 2]);
        assert!(sys.integrate(&y0, 0.0, 1e-3, Method::Rk4, 1).is_err());
        assert!(sys.integrate(&y0, 1.0, 0.0, Method::Rk4, 1).is_err());
        assert!(sys.integrate(&y0, 1.0, 2.0, Method::Rk4, 1).is_err());
        assert!(sys.integrate(&y0, 1.0, 0.1, Method::Rk4, 0).is_err());
        let t = sys.integrate(&y0, 0.5, 0.5, Method::Rk4, 1).unwrap();
        assert_eq!(t.times(), &[0.0, 0.5]);
    }

    #[test]
    fn stationary_at_equilibrium() {
        let sys = mp(RegularizerKind::Entropic);
        let t = sys.integrate(&ScoreState::zeros(&[2, 2]), 2.0, 1e-2, Method::Rk4, 10).unwrap();
        assert_eq!(t.len(), 21);
        for (s, x) in t.states().iter().zip(t.profiles()) {
            assert!(s.as_slices().iter().flatten().all(|&v| v == 0.0));
            assert_eq!(x, &MixedProfile::uniform(&[2, 2]));
        }
        assert!(t.cum_utility().iter().flatten().all(|&v| v == 0.0));
    }

    #[test]
    fn sampling_keeps_final_step() {
        let sys = mp(RegularizerKind::Entropic);
        let t = sys.integrate(&ScoreState::zeros(&[2, 2]), 1.0, 0.1, Method::Euler, 3).unwrap();
        let times: Vec<f64> = t.times().iter().map(|v| (v * 10.0).round()).collect();
        assert_eq!(times, vec![0.0, 3.0, 6.0, 9.0, 10.0]);
    }

    #[test]
    fn trajectory_invariants_hold() {
        let sys = mp(RegularizerKind::Euclidean);
        let y0 = ScoreState::new(vec![vec![0.4, 0.0], vec![-0.3, 0.0]]).unwrap();
        let t = sys.integrate(&y0, 5.0, 1e-2, Method::Rk4, 5).unwrap();
        assert_eq!(t.times()[0], 0.0);
        assert!(t.cum_payoff_vec()[0].iter().flatten().all(|&v| v == 0.0));
        assert!(t.cum_utility()[0].iter().all(|&v| v == 0.0));
        for (s, x) in t.states().iter().zip(t.profiles()) {
            assert_eq!(&sys.choice(s).unwrap(), x);
            for xi in x.as_slices() {
                assert!((xi.iter().sum::<f64>() - 1.0).abs() < 1e-9);
                assert!(xi.iter().all(|&v| v >= -1e-12));
            }
        }
    }

    #[test]
    fn divergence_guard_triggers() {
        // A huge constant payoff pushes raw scores past the guard quickly.
        let a = nalgebra::DMatrix::from_element(2, 2, 1e8);
        let g = crate::game::GameSpec::bimatrix(a.clone(), a).unwrap();
        let sys = ForelSystem::uniform(g, RegularizerKind::Entropic).unwrap();
        match sys.integrate(&ScoreState::zeros(&[2, 2]), 100.0, 1.0, Method::Euler, 1) {
            Err(Error::Diverged { last_time }) => assert!(last_time >= 9.0 && last_time < 11.0),
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn replicator_examples() {
        let g = catalog::matching_pennies();
        let dx = replicator_field(&g, &MixedProfile::uniform(&[2, 2])).unwrap();
        assert!(dx.iter().flatten().all(|&v| v == 0.0));

        // Independent evaluation: v_2 = −Aᵀx_1 = (−0.8, 0.8); mean = 0 at x_2 uniform;
        // ẋ_2 = x_2 ⊙ (v_2 − 0) = (−0.4, 0.4). v_1 = A x_2 = 0, so ẋ_1 = 0.
        let x = profile(&[&[0.9, 0.1], &[0.5, 0.5]]);
        let dx = replicator_field(&g, &x).unwrap();
        assert_abs_diff_eq!(dx[0][0], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dx[0][1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(dx[1][0], -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(dx[1][1], 0.4, epsilon = 1e-15);

        let face = profile(&[&[1.0, 0.0], &[0.3, 0.7]]);
        let dx = replicator_field(&g, &face).unwrap();
        assert_eq!(dx[0][1], 0.0);
        for d in &dx {
            assert!(d.iter().sum::<f64>().abs() < 1e-12);
        }
    }

    #[test]
    fn projection_examples() {
        let g = catalog::matching_pennies();
        let dx = projection_field(&g, &MixedProfile::uniform(&[2, 2]), 0.0).unwrap();
        assert!(dx.iter().flatten().all(|&v| v == 0.0));

        let pure = profile(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let dx = projection_field(&g, &pure, 0.0).unwrap();
        assert!(dx.iter().flatten().all(|&v| v == 0.0));

        let x = profile(&[&[0.7, 0.3], &[0.5, 0.5]]);
        let v2 = g.payoff_vector(&x, 1).unwrap();
        assert_abs_diff_eq!(v2[0], -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(v2[1], 0.4, epsilon = 1e-15);
        let dx = projection_field(&g, &x, 0.0).unwrap();
        assert_abs_diff_eq!(dx[1][0], -0.4, epsilon = 1e-15);
        assert_abs_diff_eq!(dx[1][1], 0.4, epsilon = 1e-15);
    }

    #[test]
    fn mwu_examples() {
        let g = catalog::matching_pennies();
        let u = MixedProfile::uniform(&[2, 2]);
        assert_eq!(mwu_step(&g, &u, &[0.7, 3.0]).unwrap(), u);

        let a = nalgebra::DMatrix::from_element(2, 2, 4.0);
        let constant = crate::game::GameSpec::bimatrix(a.clone(), a).unwrap();
        let x = profile(&[&[0.2, 0.8], &[0.6, 0.4]]);
        let next = mwu_step(&constant, &x, &[1.0, 1.0]).unwrap();
        for (a, b) in next.as_slices().iter().flatten().zip(x.as_slices().iter().flatten()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        let face = profile(&[&[1.0, 0.0], &[0.6, 0.4]]);
        let next = mwu_step(&g, &face, &[0.5, 0.5]).unwrap();
        assert_eq!(next.player(0)[1], 0.0);
        assert!(mwu_step(&g, &u, &[0.0, 1.0]).is_err());
        assert!(mwu_step(&g, &u, &[1.0]).is_err());
    }

    #[test]
    fn mwu_small_step_matches_replicator() {
        let g = catalog::embedded_matching_pennies();
        let x = profile(&[&[0.5, 0.3, 0.2], &[0.1, 0.6, 0.3]]);
        let eta = 1e-6;
        let next = mwu_step(&g, &x, &[eta, eta]).unwrap();
        let rd = replicator_field(&g, &x).unwrap();
        for p in 0..2 {
            for a in 0..3 {
                let fd = (next.player(p)[a] - x.player(p)[a]) / eta;
                assert!((fd - rd[p][a]).abs() < 1e-4);
            }
        }
    }
}
