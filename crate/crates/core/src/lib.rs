//! Follow-the-regularized-leader (FoReL) learning dynamics in zero-sum and
//! constant-sum polymatrix games.
//!
//! The crate integrates the continuous-time score dynamics `ẏ = v(Q(y))`
//! and measures the quantities that govern their long-run behaviour: the
//! Fenchel coupling to an equilibrium, regret, divergence of the reduced
//! field, returns to the initial state and convergence to the face spanned
//! by the maximal-support equilibrium.
//!
//! ```
//! use forel_core::{catalog, ForelSystem, Method, RegularizerKind, ScoreState};
//!
//! let sys = ForelSystem::uniform(catalog::matching_pennies(), RegularizerKind::Entropic).unwrap();
//! let y0 = ScoreState::new(vec![vec![1.0, 0.0], vec![0.0, 0.0]]).unwrap();
//! let traj = sys.integrate(&y0, 1.0, 1e-2, Method::Rk4, 10).unwrap();
//! assert_eq!(traj.len(), 11);
//! ```

pub mod analysis;
pub mod catalog;
pub mod dynamics;
pub mod equilibrium;
pub mod error;
pub mod game;
pub mod lp;
pub mod ode;
pub mod regularizer;
pub mod schema;

pub use analysis::{CouplingReference, RecurrenceReport, SupportClass};
pub use dynamics::{ForelSystem, ReducedState, ScoreState, Trajectory, TrajectoryMeta};
pub use equilibrium::EquilibriumReport;
pub use error::{Error, Result};
pub use game::{Affine, Edge, GameForm, GameSpec, MixedProfile};
pub use ode::Method;
pub use regularizer::{Regularizer, RegularizerKind};
pub use schema::{parse_game, GameFile};
