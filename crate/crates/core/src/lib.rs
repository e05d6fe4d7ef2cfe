//! Continuous n-player games, their zero-sum extension through a
//! virtual-subsidy player, and numerical checks of the equivalence between
//! per-pair minimax equalities and Nash equilibrium.
//!
//! The crate is organized bottom-up:
//!
//! - [`model`]: strategy spaces, games, profiles, tolerances
//! - [`optimize`]: scan-plus-golden-section 1-D optimizers, nested max-min / min-max
//! - [`embedding`]: subsidies and the (n+1)-player zero-sum extension
//! - [`solver`]: maximin fixed-point solver and verification reports
//! - [`oracle`]: brute-force computations on grids
//! - [`games`]: Cournot and quadratic game families
//! - [`cli`]: the `zsgame` command-line tool

pub mod cli;
pub mod embedding;
pub mod error;
pub mod games;
pub mod model;
pub mod optimize;
pub mod oracle;
pub mod solver;

pub use embedding::{extend, Subsidy, ZeroSumExtension};
pub use error::{Error, Result};
pub use model::{validate_game, GameDescription, Interval, MainGame, StrategyProfile, Tolerances};
pub use solver::{SolveReport, SolverSettings, VerificationReport};
