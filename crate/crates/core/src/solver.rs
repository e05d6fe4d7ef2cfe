//! Equilibrium computation and verification.
//!
//! Equilibria are computed as fixed points of the maximin map
//! `M(x)_i = argmax_{x_i} min_f pi_i(x_{-i}, x_i, f)`, iterated with damping.
//! The subsidy player's strategy is pinned to the minimizer `a` of `psi` and
//! then checked independently.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::embedding::{sion_check, SionReport, ZeroSumExtension};
use crate::error::{Error, Result};
use crate::model::{MainGame, StrategyProfile, Tolerances};
use crate::optimize::{self, maximize_1d, OptResult, ScanOptions};

/// Damping and iteration budget for [`solve_maximin_fixed_point`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverSettings {
    pub damping: f64,
    pub max_iter: usize,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            damping: 0.5,
            max_iter: 10_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolveReport {
    pub equilibrium_x: Vec<f64>,
    pub equilibrium_f: f64,
    /// `phi_i` at the equilibrium.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Sup-norm of the last step.
    pub residual: f64,
}

/// `argmax_{x_player} phi_player` with the others fixed.
pub fn best_response(game: &MainGame, player: usize, others: &[f64], tol: &Tolerances) -> Result<OptResult> {
    let mut profile = game.assemble(player, others, game.space(player).lo())?;
    maximize_1d(
        |x| {
            profile[player] = x;
            game.payoff(player, &profile)
        },
        game.space(player),
        &ScanOptions::from(tol),
    )
}

/// `argmax_{x_player} min_f pi_player`, others fixed.
pub fn maximin_response(ext: &ZeroSumExtension, player: usize, others: &[f64], tol: &Tolerances) -> Result<OptResult> {
    let game = ext.game();
    let mut profile = game.assemble(player, others, game.space(player).lo())?;
    optimize::maximin(
        ext.subsidy().domain(),
        game.space(player),
        |x, f| {
            profile[player] = x;
            ext.pi(player, &profile, f)
        },
        &ScanOptions::from(tol),
    )
}

fn others_of(x: &[f64], player: usize) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|&(j, _)| j != player)
        .map(|(_, v)| *v)
        .collect()
}

/// Damped simultaneous iteration `x <- (1 - d) x + d M(x)` until the
/// sup-norm step drops to `fp_tol`.
pub fn solve_maximin_fixed_point(
    ext: &ZeroSumExtension,
    init: &StrategyProfile,
    tol: &Tolerances,
    damping: f64,
    max_iter: usize,
) -> Result<SolveReport> {
    tol.validate()?;
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "damping must lie in (0, 1], got {damping}"
        )));
    }
    let game = ext.game();
    game.check_profile(&init.x)?;
    if let Some(f) = init.f {
        ext.check_f(f)?;
    }

    let n = ext.n_players();
    let mut x = init.x.clone();
    let mut residual = f64::INFINITY;
    for iteration in 1..=max_iter {
        let mut next = Vec::with_capacity(n);
        for player in 0..n {
            let target = maximin_response(ext, player, &others_of(&x, player), tol)?.arg;
            let blended = (1.0 - damping) * x[player] + damping * target;
            // convex combination, but keep roundoff inside the interval
            next.push(game.space(player).clamp(blended));
        }
        residual = x.iter().zip(&next).fold(0.0_f64, |m, (p, q)| m.max((p - q).abs()));
        x = next;
        if residual <= tol.fp_tol {
            let values = (0..n).map(|i| game.payoff(i, &x)).collect();
            return Ok(SolveReport {
                equilibrium_x: x,
                equilibrium_f: ext.a(),
                values,
                iterations: iteration,
                converged: true,
                residual,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iter,
        residual,
        last: x,
    })
}

/// Solutions from several random starting profiles.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiStartReport {
    pub seed: u64,
    pub starts: Vec<Vec<f64>>,
    pub solutions: Vec<SolveReport>,
    /// Largest sup-norm distance between any solution and the first one.
    pub spread: f64,
}

impl MultiStartReport {
    /// All starts reached the same equilibrium within `eq_tol`.
    pub fn agrees(&self, tol: &Tolerances) -> bool {
        self.spread <= tol.eq_tol
    }
}

/// Runs the solver from `starts` uniformly random profiles drawn with `seed`.
pub fn multi_start(
    ext: &ZeroSumExtension,
    starts: usize,
    seed: u64,
    tol: &Tolerances,
    settings: &SolverSettings,
) -> Result<MultiStartReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut inits = Vec::with_capacity(starts);
    let mut solutions = Vec::with_capacity(starts);
    for _ in 0..starts {
        let x: Vec<f64> = ext
            .game()
            .spaces()
            .iter()
            .map(|s| rng.gen_range(s.lo()..=s.hi()))
            .collect();
        let report = solve_maximin_fixed_point(
            ext,
            &StrategyProfile::new(x.clone()),
            tol,
            settings.damping,
            settings.max_iter,
        )?;
        inits.push(x);
        solutions.push(report);
    }
    let spread = solutions
        .iter()
        .skip(1)
        .flat_map(|s| {
            s.equilibrium_x
                .iter()
                .zip(&solutions[0].equilibrium_x)
                .map(|(p, q)| (p - q).abs())
        })
        .fold(0.0, f64::max);
    Ok(MultiStartReport {
        seed,
        starts: inits,
        solutions,
        spread,
    })
}

/// Deviation gaps `max_{x_i} phi_i(candidate_{-i}, x_i) - phi_i(candidate)`.
pub fn verify_nash(game: &MainGame, candidate: &[f64], tol: &Tolerances) -> Result<Vec<f64>> {
    game.check_profile(candidate)?;
    (0..game.n_players())
        .map(|i| {
            let best = best_response(game, i, &others_of(candidate, i), tol)?;
            Ok(best.value - game.payoff(i, candidate))
        })
        .collect()
}

/// Deviation check for the subsidy player at `x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SubsidyDeviation {
    /// `argmax_f pi_{n+1}(x, f)`.
    pub best_f: f64,
    /// `max_f pi_{n+1}(x, f) - pi_{n+1}(x, a)`.
    pub gap: f64,
    pub passed: bool,
}

pub fn subsidy_deviation(ext: &ZeroSumExtension, x: &[f64], tol: &Tolerances) -> Result<SubsidyDeviation> {
    ext.game().check_profile(x)?;
    let best = maximize_1d(
        |f| ext.pi_subsidy_player(x, f),
        ext.subsidy().domain(),
        &ScanOptions::from(tol),
    )?;
    let gap = best.value - ext.pi_subsidy_player(x, ext.a());
    Ok(SubsidyDeviation {
        best_f: best.arg,
        gap,
        passed: gap <= tol.eq_tol && (best.arg - ext.a()).abs() <= tol.eq_tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub equilibrium_x: Vec<f64>,
    pub equilibrium_f: f64,
    /// One per pair (player i, subsidy player); empty unless the pair
    /// equalities were checked.
    pub sion_reports: Vec<SionReport>,
    pub deviation_gaps: Vec<f64>,
    /// `|arg_x of the max-min problem - equilibrium_x_i|`, per player.
    pub maximin_arg_gaps: Vec<f64>,
    pub subsidy_deviation: Option<SubsidyDeviation>,
    pub zero_sum_residual: f64,
    pub solve: Option<SolveReport>,
    /// `None` when not checked.
    pub theorem1_passed: Option<bool>,
    pub theorem2_passed: Option<bool>,
}

impl VerificationReport {
    /// Every check that was run passed.
    pub fn passed(&self) -> bool {
        self.theorem1_passed.unwrap_or(true) && self.theorem2_passed.unwrap_or(true)
    }
}

/// Solves for the maximin fixed point from the domain midpoint, then checks
/// that it is a Nash equilibrium of the main game and that `f = a` is a best
/// response of the subsidy player.
pub fn verify_theorem1(
    ext: &ZeroSumExtension,
    tol: &Tolerances,
    settings: &SolverSettings,
) -> Result<VerificationReport> {
    let init = StrategyProfile::new(ext.game().midpoint());
    let solve = solve_maximin_fixed_point(ext, &init, tol, settings.damping, settings.max_iter)?;
    let x = solve.equilibrium_x.clone();
    let deviation_gaps = verify_nash(ext.game(), &x, tol)?;
    let sub = subsidy_deviation(ext, &x, tol)?;
    let zero_sum_residual = ext.zero_sum_residual(&StrategyProfile::with_subsidy(x.clone(), ext.a()))?;
    let passed = deviation_gaps.iter().all(|&g| g <= tol.eq_tol)
        && (solve.equilibrium_f - ext.a()).abs() <= tol.eq_tol
        && sub.passed;
    Ok(VerificationReport {
        equilibrium_x: x,
        equilibrium_f: solve.equilibrium_f,
        sion_reports: Vec::new(),
        deviation_gaps,
        maximin_arg_gaps: Vec::new(),
        subsidy_deviation: Some(sub),
        zero_sum_residual,
        solve: Some(solve),
        theorem1_passed: Some(passed),
        theorem2_passed: None,
    })
}

/// Starting from a Nash equilibrium of the main game, checks for every pair
/// (i, subsidy player) that max-min equals min-max, that the max-min
/// argument is `nash_x_i`, and that the min-max argument is `a`.
///
/// Fails with `NotANash` when some deviation gap exceeds `eq_tol`.
pub fn verify_theorem2(ext: &ZeroSumExtension, nash_x: &[f64], tol: &Tolerances) -> Result<VerificationReport> {
    let deviation_gaps = verify_nash(ext.game(), nash_x, tol)?;
    if deviation_gaps.iter().any(|&g| g > tol.eq_tol) {
        return Err(Error::NotANash { gaps: deviation_gaps });
    }
    let mut sion_reports = Vec::with_capacity(nash_x.len());
    let mut maximin_arg_gaps = Vec::with_capacity(nash_x.len());
    for player in 0..ext.n_players() {
        let report = sion_check(ext, player, &others_of(nash_x, player), tol)?;
        maximin_arg_gaps.push((report.arg_x - nash_x[player]).abs());
        sion_reports.push(report);
    }
    let zero_sum_residual = ext.zero_sum_residual(&StrategyProfile::with_subsidy(nash_x.to_vec(), ext.a()))?;
    let passed = sion_reports.iter().all(|r| r.passed) && maximin_arg_gaps.iter().all(|&g| g <= tol.eq_tol);
    Ok(VerificationReport {
        equilibrium_x: nash_x.to_vec(),
        equilibrium_f: ext.a(),
        sion_reports,
        deviation_gaps,
        maximin_arg_gaps,
        subsidy_deviation: None,
        zero_sum_residual,
        solve: None,
        theorem1_passed: None,
        theorem2_passed: Some(passed),
    })
}

/// [`verify_theorem1`] followed by [`verify_theorem2`] at the solved point,
/// merged into one report.
pub fn verify_both(ext: &ZeroSumExtension, tol: &Tolerances, settings: &SolverSettings) -> Result<VerificationReport> {
    let first = verify_theorem1(ext, tol, settings)?;
    let second = verify_theorem2(ext, &first.equilibrium_x, tol)?;
    Ok(VerificationReport {
        sion_reports: second.sion_reports,
        maximin_arg_gaps: second.maximin_arg_gaps,
        theorem2_passed: second.theorem2_passed,
        ..first
    })
}
