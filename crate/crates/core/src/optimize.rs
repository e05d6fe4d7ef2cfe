//! Scalar optimization on compact intervals, and nested max-min / min-max.
//!
//! Every 1-D problem is solved the same way: a uniform coarse scan that
//! includes both endpoints, followed by golden-section refinement of the
//! most promising scan brackets down to width `tol`, then one
//! central-difference Newton step. The scan makes the method robust to
//! boundary optima and mild multimodality; the refinement makes it precise.
//! Everything is deterministic.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{Interval, Tolerances};

/// Number of distinct scan local minima that get refined.
const REFINE_CANDIDATES: usize = 4;
/// Golden-section iteration cap; the bracket usually reaches `tol` far earlier.
const GOLDEN_MAX_ITER: usize = 200;
const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Outcome of a 1-D (or nested) optimization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OptResult {
    /// Optimizer location, inside the search interval.
    pub arg: f64,
    /// Objective value at `arg`.
    pub value: f64,
    /// Set when another scan point, well separated from the optimum,
    /// ties with it within `tie_tol`.
    pub multiplicity_flag: bool,
    /// Objective evaluations spent, including nested ones.
    pub evals: usize,
}

/// Settings for the scan-then-refine optimizers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub tol: f64,
    pub tie_tol: f64,
    pub scan_points: usize,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self::from(&Tolerances::default())
    }
}

impl From<&Tolerances> for ScanOptions {
    fn from(t: &Tolerances) -> Self {
        Self {
            tol: t.opt_tol,
            tie_tol: t.tie_tol,
            scan_points: t.scan_points,
        }
    }
}

impl ScanOptions {
    pub fn with_tol(self, tol: f64) -> Self {
        Self { tol, ..self }
    }

    /// Options for the inner problem of a nested optimization: ten times
    /// tighter so envelope noise stays below the outer tolerance.
    pub fn nested(self) -> Self {
        self.with_tol(self.tol / 10.0)
    }
}

fn checked(y: f64, at: f64) -> Result<f64> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(Error::NonFiniteObjective { at })
    }
}

/// Minimizes `objective` over `domain`.
pub fn minimize_1d<F>(mut objective: F, domain: Interval, opts: &ScanOptions) -> Result<OptResult>
where
    F: FnMut(f64) -> f64,
{
    minimize_with(&mut |x| checked(objective(x), x), domain, opts)
}

/// Maximizes `objective` over `domain` by minimizing its negation.
pub fn maximize_1d<F>(mut objective: F, domain: Interval, opts: &ScanOptions) -> Result<OptResult>
where
    F: FnMut(f64) -> f64,
{
    let r = minimize_1d(|x| -objective(x), domain, opts)?;
    Ok(OptResult { value: -r.value, ..r })
}

/// `max_{outer} min_{inner} objective(outer, inner)`; the result describes
/// the outer variable.
pub fn maximin<F>(
    inner_domain: Interval,
    outer_domain: Interval,
    mut objective: F,
    opts: &ScanOptions,
) -> Result<OptResult>
where
    F: FnMut(f64, f64) -> f64,
{
    let inner_opts = opts.nested();
    let mut inner_evals = 0;
    let mut envelope = |x: f64| -> Result<f64> {
        let r = minimize_with(&mut |f| checked(objective(x, f), f), inner_domain, &inner_opts)?;
        inner_evals += r.evals;
        Ok(-r.value)
    };
    let r = minimize_with(&mut envelope, outer_domain, opts)?;
    Ok(OptResult {
        arg: r.arg,
        value: -r.value,
        multiplicity_flag: r.multiplicity_flag,
        evals: inner_evals,
    })
}

/// `min_{outer} max_{inner} objective(inner, outer)`; the result describes
/// the outer variable.
///
/// The argument order of `objective` matches [`maximin`]: the first
/// argument ranges over `inner_domain` here, so the same payoff closure
/// `(x, f)` works for both with the domains swapped.
pub fn minimax<F>(
    inner_domain: Interval,
    outer_domain: Interval,
    mut objective: F,
    opts: &ScanOptions,
) -> Result<OptResult>
where
    F: FnMut(f64, f64) -> f64,
{
    let inner_opts = opts.nested();
    let mut inner_evals = 0;
    let mut envelope = |f: f64| -> Result<f64> {
        let r = minimize_with(&mut |x| checked(-objective(x, f), x), inner_domain, &inner_opts)?;
        inner_evals += r.evals;
        Ok(-r.value)
    };
    let r = minimize_with(&mut envelope, outer_domain, opts)?;
    Ok(OptResult {
        evals: inner_evals,
        ..r
    })
}

/// Scan-then-refine minimization of a fallible objective.
pub(crate) fn minimize_with(
    objective: &mut dyn FnMut(f64) -> Result<f64>,
    domain: Interval,
    opts: &ScanOptions,
) -> Result<OptResult> {
    let count = opts.scan_points.max(3);
    let xs = domain.grid(count);
    let mut ys = Vec::with_capacity(count);
    for &x in &xs {
        ys.push(objective(x)?);
    }
    let mut evals = count;

    let best = argmin_leftmost(&ys);
    let multiplicity_flag = ys
        .iter()
        .zip(&xs)
        .any(|(&y, &x)| y <= ys[best] + opts.tie_tol && (x - xs[best]).abs() > 10.0 * opts.tol);

    // Discrete local minima of the scan, best first, ties leftmost.
    let mut basins: Vec<usize> = (0..count)
        .filter(|&j| (j == 0 || ys[j] <= ys[j - 1]) && (j + 1 == count || ys[j] <= ys[j + 1]))
        .collect();
    basins.sort_by(|&p, &q| ys[p].total_cmp(&ys[q]).then(p.cmp(&q)));
    basins.truncate(REFINE_CANDIDATES);
    if !basins.contains(&best) {
        basins.insert(0, best);
    }

    let mut candidates: Vec<(f64, f64)> = Vec::with_capacity(4 * basins.len());
    for &j in &basins {
        let lo = j.saturating_sub(1);
        let hi = (j + 1).min(count - 1);
        let (gx, gy) = golden(objective, xs[lo], xs[hi], opts.tol, &mut evals)?;
        let (gx, gy) = polish(objective, gx, gy, xs[lo], xs[hi], &mut evals)?;
        candidates.extend([(xs[lo], ys[lo]), (xs[j], ys[j]), (gx, gy), (xs[hi], ys[hi])]);
    }

    let min_value = candidates.iter().map(|c| c.1).fold(f64::INFINITY, f64::min);
    let slack = 4.0 * f64::EPSILON * min_value.abs().max(1.0);
    let (arg, value) = candidates
        .iter()
        .filter(|c| c.1 <= min_value + slack)
        .copied()
        .min_by(|p, q| p.0.total_cmp(&q.0))
        .expect("at least one candidate");

    Ok(OptResult {
        arg,
        value,
        multiplicity_flag,
        evals,
    })
}

fn argmin_leftmost(ys: &[f64]) -> usize {
    let mut best = 0;
    for (j, &y) in ys.iter().enumerate().skip(1) {
        if y < ys[best] {
            best = j;
        }
    }
    best
}

/// Golden-section search on `[a, b]`; returns the best interior point seen.
fn golden(
    objective: &mut dyn FnMut(f64) -> Result<f64>,
    mut a: f64,
    mut b: f64,
    tol: f64,
    evals: &mut usize,
) -> Result<(f64, f64)> {
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = objective(c)?;
    let mut fd = objective(d)?;
    *evals += 2;
    for _ in 0..GOLDEN_MAX_ITER {
        if b - a <= tol {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = objective(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = objective(d)?;
        }
        *evals += 1;
    }
    Ok(if fc <= fd { (c, fc) } else { (d, fd) })
}

/// One Newton step from `(x, y)` with central differences, kept only if it
/// stays inside `[lo, hi]` and does not increase the objective.
///
/// Golden section alone stalls at about `sqrt(eps)` relative accuracy in the
/// argument, since nearby values become indistinguishable. Differences over
/// a wider stencil `h ~ cbrt(eps)` still resolve the curvature.
fn polish(
    objective: &mut dyn FnMut(f64) -> Result<f64>,
    x: f64,
    y: f64,
    lo: f64,
    hi: f64,
    evals: &mut usize,
) -> Result<(f64, f64)> {
    let h = f64::EPSILON.cbrt() * x.abs().max(1.0);
    if x - h < lo || x + h > hi {
        return Ok((x, y));
    }
    let (left, right) = (objective(x - h)?, objective(x + h)?);
    *evals += 2;
    let curvature = left - 2.0 * y + right;
    if curvature.is_nan() || curvature <= 0.0 {
        return Ok((x, y));
    }
    let step = h * (left - right) / (2.0 * curvature);
    if step.is_nan() || step.abs() > h {
        return Ok((x, y));
    }
    let candidate = x + step;
    let value = objective(candidate)?;
    *evals += 1;
    let slack = 4.0 * f64::EPSILON * y.abs().max(1.0);
    Ok(if value <= y + slack { (candidate, value) } else { (x, y) })
}
