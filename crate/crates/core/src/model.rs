//! Games, strategy spaces and profiles.
//!
//! A [`MainGame`] is an n-player game where player `i` picks a real `x_i`
//! from a compact interval and receives `phi_i(x_1, ..., x_n)`. Payoff
//! evaluators are opaque callables; parametric families live in
//! [`crate::games`].

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Payoff evaluator: maps a full profile `(x_1, ..., x_n)` to one player's payoff.
pub type Payoff = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// Default number of validation probes per axis.
pub const PROBES_PER_AXIS: usize = 9;
/// Cap on the total number of validation probes.
pub const PROBE_LIMIT: usize = 100_000;

/// A compact interval `[lo, hi]` with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::BadInterval { lo, hi });
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn midpoint(&self) -> f64 {
        self.lo + 0.5 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn clamp(&self, x: f64) -> f64 {
        x.clamp(self.lo, self.hi)
    }

    /// Point `i` of a uniform grid of `count` points that includes both
    /// endpoints. The last point is exactly `hi`.
    pub fn grid_point(&self, i: usize, count: usize) -> f64 {
        debug_assert!(count >= 2 && i < count);
        if i + 1 == count {
            return self.hi;
        }
        self.lo + self.width() * i as f64 / (count - 1) as f64
    }

    pub fn grid(&self, count: usize) -> Vec<f64> {
        (0..count).map(|i| self.grid_point(i, count)).collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Unvalidated description of a game, turned into a [`MainGame`] by
/// [`validate_game`].
#[derive(Clone, Default)]
pub struct GameDescription {
    pub spaces: Vec<(f64, f64)>,
    pub payoffs: Vec<Payoff>,
}

impl GameDescription {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a player with strategy space `[lo, hi]`.
    pub fn player(mut self, lo: f64, hi: f64, payoff: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.spaces.push((lo, hi));
        self.payoffs.push(Arc::new(payoff));
        self
    }
}

/// A validated n-player game with per-player interval strategy spaces.
#[derive(Clone)]
pub struct MainGame {
    spaces: Vec<Interval>,
    payoffs: Vec<Payoff>,
}

impl fmt::Debug for MainGame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MainGame")
            .field("spaces", &self.spaces)
            .finish_non_exhaustive()
    }
}

/// Validates a game description.
///
/// Every payoff is probed on a uniform grid (9 points per axis, fewer when
/// the product would exceed 10^5 points) and must be finite everywhere.
pub fn validate_game(candidate: GameDescription) -> Result<MainGame> {
    let GameDescription { spaces, payoffs } = candidate;
    if spaces.is_empty() && payoffs.is_empty() {
        return Err(Error::EmptyGame);
    }
    if spaces.len() != payoffs.len() {
        return Err(Error::DimensionMismatch {
            expected: spaces.len(),
            got: payoffs.len(),
        });
    }
    let spaces = spaces
        .into_iter()
        .map(|(lo, hi)| Interval::new(lo, hi))
        .collect::<Result<Vec<_>>>()?;
    let game = MainGame { spaces, payoffs };
    game.probe()?;
    Ok(game)
}

impl MainGame {
    pub fn new(description: GameDescription) -> Result<Self> {
        validate_game(description)
    }

    pub fn n_players(&self) -> usize {
        self.spaces.len()
    }

    pub fn spaces(&self) -> &[Interval] {
        &self.spaces
    }

    pub fn space(&self, player: usize) -> Interval {
        self.spaces[player]
    }

    /// Evaluates `phi_player` without domain checks.
    pub fn payoff(&self, player: usize, x: &[f64]) -> f64 {
        (self.payoffs[player])(x)
    }

    pub fn payoff_fn(&self, player: usize) -> &Payoff {
        &self.payoffs[player]
    }

    pub fn midpoint(&self) -> Vec<f64> {
        self.spaces.iter().map(Interval::midpoint).collect()
    }

    pub fn check_player(&self, player: usize) -> Result<()> {
        if player >= self.n_players() {
            return Err(Error::BadPlayer {
                player,
                n: self.n_players(),
            });
        }
        Ok(())
    }

    /// Checks that `x` is a full in-domain profile.
    pub fn check_profile(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.n_players() {
            return Err(Error::DimensionMismatch {
                expected: self.n_players(),
                got: x.len(),
            });
        }
        for (coordinate, (&value, space)) in x.iter().zip(&self.spaces).enumerate() {
            if !space.contains(value) {
                return Err(Error::OutOfDomain {
                    coordinate,
                    value,
                    lo: space.lo(),
                    hi: space.hi(),
                });
            }
        }
        Ok(())
    }

    /// Builds a full profile from the `n - 1` fixed strategies of everyone
    /// but `player`, with `x_player` set to `own`. Checks dimensions and
    /// domains of the fixed strategies.
    pub fn assemble(&self, player: usize, others: &[f64], own: f64) -> Result<Vec<f64>> {
        self.check_player(player)?;
        let n = self.n_players();
        if others.len() + 1 != n {
            return Err(Error::DimensionMismatch {
                expected: n - 1,
                got: others.len(),
            });
        }
        let mut x = Vec::with_capacity(n);
        x.extend_from_slice(&others[..player]);
        x.push(own);
        x.extend_from_slice(&others[player..]);
        for (coordinate, (&value, space)) in x.iter().zip(&self.spaces).enumerate() {
            if coordinate != player && !space.contains(value) {
                return Err(Error::OutOfDomain {
                    coordinate,
                    value,
                    lo: space.lo(),
                    hi: space.hi(),
                });
            }
        }
        Ok(x)
    }

    /// One-player game of `player` with the others' strategies frozen.
    pub fn slice(&self, player: usize, others: &[f64]) -> Result<MainGame> {
        let base = self.assemble(player, others, self.spaces[player].lo())?;
        let payoff = Arc::clone(&self.payoffs[player]);
        let space = self.spaces[player];
        let sliced: Payoff = Arc::new(move |x: &[f64]| {
            let mut profile = base.clone();
            profile[player] = x[0];
            payoff(&profile)
        });
        Ok(MainGame {
            spaces: vec![space],
            payoffs: vec![sliced],
        })
    }

    fn probe(&self) -> Result<()> {
        let n = self.n_players();
        let mut per_axis = PROBES_PER_AXIS;
        while per_axis > 2 && (per_axis as f64).powi(n as i32) > PROBE_LIMIT as f64 {
            per_axis -= 1;
        }
        let grids: Vec<Vec<f64>> = self.spaces.iter().map(|s| s.grid(per_axis)).collect();
        let mut idx = vec![0usize; n];
        let mut x: Vec<f64> = grids.iter().map(|g| g[0]).collect();
        for _ in 0..PROBE_LIMIT {
            for player in 0..n {
                if !self.payoff(player, &x).is_finite() {
                    return Err(Error::NonFinitePayoff {
                        player,
                        profile: x.clone(),
                    });
                }
            }
            // mixed-radix increment, last axis fastest
            let mut axis = n;
            loop {
                if axis == 0 {
                    return Ok(());
                }
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < per_axis {
                    x[axis] = grids[axis][idx[axis]];
                    break;
                }
                idx[axis] = 0;
                x[axis] = grids[axis][0];
            }
        }
        Ok(())
    }
}

/// Strategies of the n main players plus an optional subsidy strategy `f`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrategyProfile {
    pub x: Vec<f64>,
    pub f: Option<f64>,
}

impl StrategyProfile {
    pub fn new(x: Vec<f64>) -> Self {
        Self { x, f: None }
    }

    pub fn with_subsidy(x: Vec<f64>, f: f64) -> Self {
        Self { x, f: Some(f) }
    }
}

/// Returns `(phi_1, ..., phi_n)` at the profile.
pub fn eval_phi(game: &MainGame, profile: &StrategyProfile) -> Result<Vec<f64>> {
    game.check_profile(&profile.x)?;
    Ok((0..game.n_players()).map(|i| game.payoff(i, &profile.x)).collect())
}

/// Numerical tolerances shared by the optimizers, solver, and checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Width to which 1-D optimizers refine their bracket.
    pub opt_tol: f64,
    /// Sup-norm step at which the fixed-point iteration stops.
    pub fp_tol: f64,
    /// Slack for equality checks (Sion gaps, deviation gaps, argmin location).
    pub eq_tol: f64,
    /// Values within this of the best scan value count as ties.
    pub tie_tol: f64,
    /// Points in the coarse scan preceding golden-section refinement.
    pub scan_points: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            opt_tol: 1e-9,
            fp_tol: 1e-8,
            eq_tol: 1e-6,
            tie_tol: 1e-7,
            scan_points: 257,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("opt_tol", self.opt_tol),
            ("fp_tol", self.fp_tol),
            ("eq_tol", self.eq_tol),
            ("tie_tol", self.tie_tol),
        ];
        for (name, value) in named {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::BadTolerances(format!(
                    "{name} must be finite and strictly positive, got {value}"
                )));
            }
        }
        if self.opt_tol > self.eq_tol {
            return Err(Error::BadTolerances(format!(
                "opt_tol ({}) must not exceed eq_tol ({})",
                self.opt_tol, self.eq_tol
            )));
        }
        if self.scan_points < 3 {
            return Err(Error::BadTolerances(format!(
                "scan_points must be at least 3, got {}",
                self.scan_points
            )));
        }
        Ok(())
    }
}
