//! The (n+1)-player zero-sum extension of a main game.
//!
//! A virtual subsidy `psi(f)`, controlled by an extra player, is paid equally
//! to every main player: `pi_i = phi_i + psi(f)`. The extra player receives
//! `pi_{n+1} = -sum(phi_i) - n * psi(f)`, so the n+1 payoffs sum to zero.
//! `psi` must attain its minimum 0 at a unique point `a` of its domain.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Interval, MainGame, StrategyProfile, Tolerances};
use crate::optimize::{self, maximize_1d, minimize_1d, ScanOptions};

pub type SubsidyFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Subsidy `psi` on the compact interval `F`.
#[derive(Clone)]
pub struct Subsidy {
    domain: Interval,
    psi: SubsidyFn,
    vertex_hint: Option<f64>,
}

impl fmt::Debug for Subsidy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Subsidy")
            .field("domain", &self.domain)
            .field("vertex_hint", &self.vertex_hint)
            .finish_non_exhaustive()
    }
}

impl Subsidy {
    pub fn new(domain: Interval, psi: impl Fn(f64) -> f64 + Send + Sync + 'static, vertex_hint: Option<f64>) -> Self {
        Self {
            domain,
            psi: Arc::new(psi),
            vertex_hint,
        }
    }

    /// `psi(f) = (f - vertex)^2`.
    pub fn quadratic(vertex: f64, domain: Interval) -> Self {
        Self::new(domain, move |f| (f - vertex) * (f - vertex), Some(vertex))
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn vertex_hint(&self) -> Option<f64> {
        self.vertex_hint
    }

    pub fn eval(&self, f: f64) -> f64 {
        (self.psi)(f)
    }

    /// Shifts `psi` so that its minimum over the domain is exactly 0.
    pub fn normalized(&self, tol: &Tolerances) -> Result<Subsidy> {
        let r = minimize_1d(|f| self.eval(f), self.domain, &ScanOptions::from(tol))?;
        let psi = Arc::clone(&self.psi);
        let shift = r.value;
        Ok(Subsidy {
            domain: self.domain,
            psi: Arc::new(move |f| psi(f) - shift),
            vertex_hint: self.vertex_hint,
        })
    }
}

/// Computes the unique minimizer `a` of `psi`.
///
/// Fails with `NonZeroMinimum` when `min psi` is not 0 within `eq_tol`,
/// and with `NonUniqueMinimizer` when a well-separated scan point ties with
/// the minimum within `tie_tol`.
pub fn subsidy_minimizer(subsidy: &Subsidy, tol: &Tolerances) -> Result<f64> {
    tol.validate()?;
    let opts = ScanOptions::from(tol);
    let r = minimize_1d(|f| subsidy.eval(f), subsidy.domain, &opts)?;
    if r.value.abs() > tol.eq_tol {
        return Err(Error::NonZeroMinimum {
            min: r.value,
            at: r.arg,
        });
    }
    if r.multiplicity_flag {
        let count = opts.scan_points.max(3);
        let second = (0..count)
            .map(|j| subsidy.domain.grid_point(j, count))
            .find(|&f| (f - r.arg).abs() > 10.0 * opts.tol && subsidy.eval(f) <= r.value + opts.tie_tol)
            .unwrap_or(r.arg);
        return Err(Error::NonUniqueMinimizer { first: r.arg, second });
    }
    if let Some(hint) = subsidy.vertex_hint {
        if (r.arg - hint).abs() > tol.eq_tol {
            return Err(Error::VertexHintMismatch { hint, found: r.arg });
        }
    }
    Ok(r.arg)
}

/// Options for [`extend_with`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ExtendOptions {
    /// Replace `psi` by `psi - min psi` instead of rejecting a nonzero minimum.
    pub normalize_subsidy: bool,
}

/// Main game plus subsidy player.
#[derive(Debug, Clone)]
pub struct ZeroSumExtension {
    game: MainGame,
    subsidy: Subsidy,
    a: f64,
}

pub fn extend(game: MainGame, subsidy: Subsidy, tol: &Tolerances) -> Result<ZeroSumExtension> {
    extend_with(game, subsidy, tol, ExtendOptions::default())
}

pub fn extend_with(
    game: MainGame,
    subsidy: Subsidy,
    tol: &Tolerances,
    options: ExtendOptions,
) -> Result<ZeroSumExtension> {
    let subsidy = if options.normalize_subsidy {
        subsidy.normalized(tol)?
    } else {
        subsidy
    };
    let a = subsidy_minimizer(&subsidy, tol)?;
    Ok(ZeroSumExtension { game, subsidy, a })
}

impl ZeroSumExtension {
    pub fn game(&self) -> &MainGame {
        &self.game
    }

    pub fn subsidy(&self) -> &Subsidy {
        &self.subsidy
    }

    /// The unique minimizer of `psi`.
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n_players(&self) -> usize {
        self.game.n_players()
    }

    /// `pi_player(x, f)` for a main player, without domain checks.
    pub fn pi(&self, player: usize, x: &[f64], f: f64) -> f64 {
        self.game.payoff(player, x) + self.subsidy.eval(f)
    }

    /// `pi_{n+1}(x, f) = -sum(phi_i) - n psi(f)`, without domain checks.
    pub fn pi_subsidy_player(&self, x: &[f64], f: f64) -> f64 {
        let phi_sum: f64 = (0..self.n_players()).map(|i| self.game.payoff(i, x)).sum();
        -phi_sum - self.n_players() as f64 * self.subsidy.eval(f)
    }

    /// `(pi_1, ..., pi_n, pi_{n+1})` at the profile.
    pub fn eval_pi(&self, profile: &StrategyProfile) -> Result<Vec<f64>> {
        let f = profile.f.ok_or(Error::MissingSubsidyStrategy)?;
        self.game.check_profile(&profile.x)?;
        self.check_f(f)?;
        let n = self.n_players();
        let phi: Vec<f64> = (0..n).map(|i| self.game.payoff(i, &profile.x)).collect();
        let psi = self.subsidy.eval(f);
        let mut out: Vec<f64> = phi.iter().map(|p| p + psi).collect();
        out.push(-phi.iter().sum::<f64>() - n as f64 * psi);
        Ok(out)
    }

    /// `|sum pi| / max |pi|` at the profile (0 when every payoff is 0).
    pub fn zero_sum_residual(&self, profile: &StrategyProfile) -> Result<f64> {
        let pi = self.eval_pi(profile)?;
        let scale = pi.iter().fold(0.0_f64, |m, p| m.max(p.abs()));
        let sum: f64 = pi.iter().sum();
        Ok(if scale == 0.0 { sum.abs() } else { sum.abs() / scale })
    }

    pub(crate) fn check_f(&self, f: f64) -> Result<()> {
        let d = self.subsidy.domain;
        if !d.contains(f) {
            return Err(Error::OutOfDomain {
                coordinate: self.n_players(),
                value: f,
                lo: d.lo(),
                hi: d.hi(),
            });
        }
        Ok(())
    }
}

/// Max-min versus min-max of `pi_player` over `(x_player, f)` with the
/// other main players fixed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SionReport {
    pub player: usize,
    pub maximin_value: f64,
    pub minimax_value: f64,
    pub gap: f64,
    /// Outer argument of the max-min problem.
    pub arg_x: f64,
    /// Outer argument of the min-max problem.
    pub arg_f: f64,
    /// Grid diagnostic: `pi_player` looked quasi-concave in `x_player`.
    pub quasi_concave: bool,
    /// Either nested problem reported a near-tie.
    pub multiplicity_flag: bool,
    pub passed: bool,
}

/// Compares `max_x min_f pi_i` with `min_f max_x pi_i` for player `i`,
/// others fixed at `others` (the `n - 1` strategies of everyone but `i`).
pub fn sion_check(ext: &ZeroSumExtension, player: usize, others: &[f64], tol: &Tolerances) -> Result<SionReport> {
    let game = ext.game();
    let mut profile = game.assemble(player, others, game.space(player).lo())?;
    let opts = ScanOptions::from(tol);
    let x_domain = game.space(player);
    let f_domain = ext.subsidy().domain();
    let mut objective = |x: f64, f: f64| {
        profile[player] = x;
        ext.pi(player, &profile, f)
    };
    let lower = optimize::maximin(f_domain, x_domain, &mut objective, &opts)?;
    let upper = optimize::minimax(x_domain, f_domain, &mut objective, &opts)?;
    let gap = (lower.value - upper.value).abs();
    let quasi_concave = quasi_concavity_diagnostic(ext, player, others, tol)?;
    Ok(SionReport {
        player,
        maximin_value: lower.value,
        minimax_value: upper.value,
        gap,
        arg_x: lower.arg,
        arg_f: upper.arg,
        quasi_concave,
        multiplicity_flag: lower.multiplicity_flag || upper.multiplicity_flag,
        passed: gap <= tol.eq_tol && (upper.arg - ext.a()).abs() <= tol.eq_tol,
    })
}

/// Grid-line check that `phi_player` is quasi-concave in `x_player`: once
/// the scan values strictly decrease they never strictly increase again.
/// Cannot prove quasi-concavity; a `false` pins a failed Sion equality on
/// the game rather than on the optimizer.
pub fn quasi_concavity_diagnostic(
    ext: &ZeroSumExtension,
    player: usize,
    others: &[f64],
    tol: &Tolerances,
) -> Result<bool> {
    let game = ext.game();
    let mut profile = game.assemble(player, others, game.space(player).lo())?;
    let count = tol.scan_points.max(3);
    let mut descending = false;
    let mut prev = None;
    for x in game.space(player).grid(count) {
        profile[player] = x;
        let y = game.payoff(player, &profile);
        if let Some(p) = prev {
            if y < p - tol.tie_tol {
                descending = true;
            } else if y > p + tol.tie_tol && descending {
                return Ok(false);
            }
        }
        prev = Some(y);
    }
    Ok(true)
}

/// True iff `argmax_x pi_player(x, f)` agrees within `eq_tol` across all `f_samples`.
pub fn argmax_invariance_check(
    ext: &ZeroSumExtension,
    player: usize,
    others: &[f64],
    f_samples: &[f64],
    tol: &Tolerances,
) -> Result<bool> {
    let game = ext.game();
    let mut profile = game.assemble(player, others, game.space(player).lo())?;
    for &f in f_samples {
        ext.check_f(f)?;
    }
    argmax_invariance_raw(
        |x, f| {
            profile[player] = x;
            ext.pi(player, &profile, f)
        },
        game.space(player),
        f_samples,
        tol,
    )
}

/// Same check on an arbitrary objective `(x, f)`.
pub fn argmax_invariance_raw<F>(
    mut objective: F,
    x_domain: Interval,
    f_samples: &[f64],
    tol: &Tolerances,
) -> Result<bool>
where
    F: FnMut(f64, f64) -> f64,
{
    if f_samples.is_empty() {
        return Err(Error::InvalidArgument("f_samples must not be empty".into()));
    }
    let opts = ScanOptions::from(tol);
    let mut args = Vec::with_capacity(f_samples.len());
    for &f in f_samples {
        args.push(maximize_1d(|x| objective(x, f), x_domain, &opts)?.arg);
    }
    let lo = args.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = args.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(hi - lo <= tol.eq_tol)
}
