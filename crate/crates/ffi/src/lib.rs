//! C ABI for `zsgame`.
//!
//! Games live behind an opaque `ZsGame` handle created by one of the
//! `zs_*_new` constructors and released with `zs_game_free`. Every other
//! function returns a `ZsStatus`; on failure a message is kept per thread
//! and can be read with `zs_last_error`. Array arguments are passed as a
//! pointer plus a length, and output arrays must be caller-allocated.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::slice;

use zsgame::embedding::{extend, sion_check, Subsidy, ZeroSumExtension};
use zsgame::games::{cournot_game, quadratic_game, CournotSpec, QuadraticGameSpec};
use zsgame::solver::{solve_maximin_fixed_point, verify_both, verify_theorem2, SolverSettings};
use zsgame::{Error, Interval, StrategyProfile, Tolerances};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZsStatus {
    Ok = 0,
    /// A required pointer was null.
    NullPointer = 1,
    /// Bad parameters, lengths or tolerances, or a point outside its domain.
    InvalidArgument = 2,
    /// The fixed-point iteration hit its iteration cap.
    NonConvergence = 3,
    /// The candidate is not an equilibrium or a check failed.
    VerificationFailed = 4,
    /// Unexpected failure, including a caught panic.
    Internal = 5,
}

/// Opaque game handle.
pub struct ZsGame {
    ext: ZeroSumExtension,
    tol: Tolerances,
    settings: SolverSettings,
}

/// Outcome of a max-min / min-max comparison for one player.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZsSionResult {
    pub maximin_value: f64,
    pub minimax_value: f64,
    pub gap: f64,
    pub arg_x: f64,
    pub arg_f: f64,
    pub quasi_concave: bool,
    pub passed: bool,
}

/// Summary of a verification run.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ZsVerifyResult {
    pub max_deviation_gap: f64,
    pub max_sion_gap: f64,
    pub max_maximin_arg_gap: f64,
    pub zero_sum_residual: f64,
    pub passed: bool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: String) {
    let text = CString::new(message.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn status_of(err: &Error) -> ZsStatus {
    match err {
        Error::NonConvergence { .. } => ZsStatus::NonConvergence,
        Error::NotANash { .. } => ZsStatus::VerificationFailed,
        Error::NonFiniteObjective { .. } => ZsStatus::Internal,
        _ => ZsStatus::InvalidArgument,
    }
}

struct Failure(ZsStatus, String);

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure(status_of(&err), err.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(ZsStatus::NullPointer, format!("{what} is null"))
}

fn invalid(message: impl Into<String>) -> Failure {
    Failure(ZsStatus::InvalidArgument, message.into())
}

/// Runs `body`, converting errors and panics into a status plus last-error text.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> ZsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => ZsStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(format!("internal panic: {message}"));
            ZsStatus::Internal
        }
    }
}

unsafe fn input<'a>(ptr: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts(ptr, len))
}

unsafe fn output<'a>(ptr: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if ptr.is_null() {
        return Err(null(what));
    }
    Ok(slice::from_raw_parts_mut(ptr, len))
}

unsafe fn handle<'a>(game: *const ZsGame) -> Result<&'a ZsGame, Failure> {
    game.as_ref().ok_or_else(|| null("game"))
}

fn subsidy(vertex: f64, f_lo: f64, f_hi: f64) -> Result<Subsidy, Failure> {
    Ok(Subsidy::quadratic(vertex, Interval::new(f_lo, f_hi)?))
}

unsafe fn publish(ext: ZeroSumExtension, out: *mut *mut ZsGame) {
    let boxed = Box::new(ZsGame {
        ext,
        tol: Tolerances::default(),
        settings: SolverSettings::default(),
    });
    *out = Box::into_raw(boxed);
}

/// Three-firm Cournot game with subsidy `(f - vertex)^2` on `[f_lo, f_hi]`.
/// `c` points to 3 marginal costs. A non-positive `output_bound` selects the
/// default bound (the demand intercept).
///
/// # Safety
/// `c` must point to 3 readable doubles and `out` to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn zs_cournot_new(
    demand_intercept: f64,
    b: f64,
    c: *const f64,
    output_bound: f64,
    vertex: f64,
    f_lo: f64,
    f_hi: f64,
    out: *mut *mut ZsGame,
) -> ZsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let c = input(c, 3, "c")?;
        let mut spec = CournotSpec::new(demand_intercept, b, [c[0], c[1], c[2]]);
        if output_bound > 0.0 {
            spec.output_bound = Some(output_bound);
        }
        let ext = extend(
            cournot_game(&spec)?,
            subsidy(vertex, f_lo, f_hi)?,
            &Tolerances::default(),
        )?;
        publish(ext, out);
        Ok(())
    })
}

/// Quadratic game with `phi_i = own_i x_i^2 + linear_i x_i + x_i sum_j cross_ij x_j + constant_i`
/// on `[lo_i, hi_i]`. `cross` is `n * n` row-major; `constant` may be null
/// for all zeros.
///
/// # Safety
/// Every non-null array must hold the stated number of doubles and `out`
/// must point to a writable handle slot.
#[no_mangle]
pub unsafe extern "C" fn zs_quadratic_new(
    n: usize,
    own: *const f64,
    linear: *const f64,
    cross: *const f64,
    constant: *const f64,
    lo: *const f64,
    hi: *const f64,
    vertex: f64,
    f_lo: f64,
    f_hi: f64,
    out: *mut *mut ZsGame,
) -> ZsStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        if n == 0 {
            return Err(invalid("n must be positive"));
        }
        let cross = input(cross, n * n, "cross")?;
        let spec = QuadraticGameSpec {
            own: input(own, n, "own")?.to_vec(),
            linear: input(linear, n, "linear")?.to_vec(),
            cross: cross.chunks(n).map(<[f64]>::to_vec).collect(),
            constant: if constant.is_null() {
                vec![0.0; n]
            } else {
                input(constant, n, "constant")?.to_vec()
            },
            bounds: input(lo, n, "lo")?
                .iter()
                .zip(input(hi, n, "hi")?)
                .map(|(&l, &h)| [l, h])
                .collect(),
        };
        let ext = extend(
            quadratic_game(&spec)?,
            subsidy(vertex, f_lo, f_hi)?,
            &Tolerances::default(),
        )?;
        publish(ext, out);
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `game` must be null or a handle from a `zs_*_new` call not yet freed.
#[no_mangle]
pub unsafe extern "C" fn zs_game_free(game: *mut ZsGame) {
    if !game.is_null() {
        drop(Box::from_raw(game));
    }
}

/// Number of main players `n`.
///
/// # Safety
/// `game` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_game_num_players(game: *const ZsGame, out: *mut usize) -> ZsStatus {
    guard(|| {
        let g = handle(game)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = g.ext.n_players();
        Ok(())
    })
}

/// The subsidy minimizer `a`.
///
/// # Safety
/// `game` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn zs_subsidy_argmin(game: *const ZsGame, out: *mut f64) -> ZsStatus {
    guard(|| {
        let g = handle(game)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = g.ext.a();
        Ok(())
    })
}

/// Replaces the tolerances used by later calls on this handle.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn zs_set_tolerances(
    game: *mut ZsGame,
    opt_tol: f64,
    fp_tol: f64,
    eq_tol: f64,
    tie_tol: f64,
) -> ZsStatus {
    guard(|| {
        let g = game.as_mut().ok_or_else(|| null("game"))?;
        let tol = Tolerances {
            opt_tol,
            fp_tol,
            eq_tol,
            tie_tol,
            ..g.tol
        };
        tol.validate()?;
        g.tol = tol;
        Ok(())
    })
}

/// Replaces the damping factor and iteration cap used by `zs_solve`.
///
/// # Safety
/// `game` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn zs_set_solver(game: *mut ZsGame, damping: f64, max_iter: usize) -> ZsStatus {
    guard(|| {
        let g = game.as_mut().ok_or_else(|| null("game"))?;
        if !(damping > 0.0 && damping <= 1.0) {
            return Err(invalid(format!("damping must lie in (0, 1], got {damping}")));
        }
        if max_iter == 0 {
            return Err(invalid("max_iter must be positive"));
        }
        g.settings = SolverSettings { damping, max_iter };
        Ok(())
    })
}

/// Extended payoffs at `(x, f)`: `out[0..n]` for the main players and
/// `out[n]` for the subsidy player. `x_len` must be `n` and `out_len` `n + 1`.
///
/// # Safety
/// `x` must hold `x_len` doubles and `out` must have room for `out_len`.
#[no_mangle]
pub unsafe extern "C" fn zs_eval_pi(
    game: *const ZsGame,
    x: *const f64,
    x_len: usize,
    f: f64,
    out: *mut f64,
    out_len: usize,
) -> ZsStatus {
    guard(|| {
        let g = handle(game)?;
        let n = g.ext.n_players();
        if out_len != n + 1 {
            return Err(invalid(format!("out_len must be {}, got {out_len}", n + 1)));
        }
        let x = input(x, x_len, "x")?;
        let pi = g.ext.eval_pi(&StrategyProfile::with_subsidy(x.to_vec(), f))?;
        output(out, out_len, "out")?.copy_from_slice(&pi);
        Ok(())
    })
}

/// Solves for the equilibrium. `init` may be null to start from the domain
/// midpoint; otherwise it holds `n` doubles. Writes `n` strategies to `x_out`,
/// and `f` and the iteration count when those pointers are non-null.
///
/// # Safety
/// Non-null pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn zs_solve(
    game: *const ZsGame,
    init: *const f64,
    x_out: *mut f64,
    n: usize,
    f_out: *mut f64,
    iterations_out: *mut usize,
) -> ZsStatus {
    guard(|| {
        let g = handle(game)?;
        if n != g.ext.n_players() {
            return Err(invalid(format!("n must be {}, got {n}", g.ext.n_players())));
        }
        let start = if init.is_null() {
            g.ext.game().midpoint()
        } else {
            input(init, n, "init")?.to_vec()
        };
        let x_out = output(x_out, n, "x_out")?;
        let report = solve_maximin_fixed_point(
            &g.ext,
            &StrategyProfile::new(start),
            &g.tol,
            g.settings.damping,
            g.settings.max_iter,
        )?;
        x_out.copy_from_slice(&report.equilibrium_x);
        if let Some(f) = f_out.as_mut() {
            *f = report.equilibrium_f;
        }
        if let Some(k) = iterations_out.as_mut() {
            *k = report.iterations;
        }
        Ok(())
    })
}

/// Max-min versus min-max of `pi_player` against the subsidy player, the
/// other main players fixed at `others` (`n - 1` doubles, in player order).
///
/// # Safety
/// `others` must hold `others_len` doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn zs_sion_check(
    game: *const ZsGame,
    player: usize,
    others: *const f64,
    others_len: usize,
    out: *mut ZsSionResult,
) -> ZsStatus {
    guard(|| {
        let g = handle(game)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let r = sion_check(&g.ext, player, input(others, others_len, "others")?, &g.tol)?;
        *out = ZsSionResult {
            maximin_value: r.maximin_value,
            minimax_value: r.minimax_value,
            gap: r.gap,
            arg_x: r.arg_x,
            arg_f: r.arg_f,
            quasi_concave: r.quasi_concave,
            passed: r.passed,
        };
        Ok(())
    })
}

/// Checks the Nash / minimax equivalence. With a null `candidate` the
/// equilibrium is solved first; otherwise `candidate` holds `n` doubles and
/// must be a Nash equilibrium. Returns `VerificationFailed` when any check
/// fails; `out` is still filled whenever the checks ran.
///
/// # Safety
/// Non-null pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn zs_verify(
    game: *const ZsGame,
    candidate: *const f64,
    n: usize,
    out: *mut ZsVerifyResult,
) -> ZsStatus {
    guard(|| {
        let g = handle(game)?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let report = if candidate.is_null() {
            verify_both(&g.ext, &g.tol, &g.settings)?
        } else {
            if n != g.ext.n_players() {
                return Err(invalid(format!("n must be {}, got {n}", g.ext.n_players())));
            }
            verify_theorem2(&g.ext, input(candidate, n, "candidate")?, &g.tol)?
        };
        let max = |v: &mut dyn Iterator<Item = f64>| v.fold(0.0, f64::max);
        *out = ZsVerifyResult {
            max_deviation_gap: max(&mut report.deviation_gaps.iter().copied()),
            max_sion_gap: max(&mut report.sion_reports.iter().map(|r| r.gap)),
            max_maximin_arg_gap: max(&mut report.maximin_arg_gaps.iter().copied()),
            zero_sum_residual: report.zero_sum_residual,
            passed: report.passed(),
        };
        if report.passed() {
            Ok(())
        } else {
            Err(Failure(ZsStatus::VerificationFailed, "verification failed".into()))
        }
    })
}

/// Message of the last failed call on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn zs_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
