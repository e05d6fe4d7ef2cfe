//! Acceptance suite. Each test prints one `criterion N ...: PASS|FAIL` line
//! and fails if the criterion is not met. Run with `--nocapture` to see the
//! lines.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use zsgame::cli::{cmd_solve, RunConfig};
use zsgame::embedding::{argmax_invariance_check, extend, sion_check, Subsidy, ZeroSumExtension};
use zsgame::games::{
    cournot_closed_form, cournot_foc_residuals, cournot_game, cournot_n_closed_form, quadratic_game, CournotNSpec,
    CournotSpec, QuadraticGameSpec,
};
use zsgame::model::{validate_game, GameDescription, Interval, MainGame, StrategyProfile, Tolerances};
use zsgame::oracle::{brute_maximin, brute_minimax, discretize, GridGame};
use zsgame::solver::{verify_nash, verify_theorem1, verify_theorem2, SolverSettings, VerificationReport};

const SOLVE_TOL: f64 = 1e-6;
const GAP_TOL: f64 = 1e-6;
const SION_TOL: f64 = 2e-6;
const ARG_F_TOL: f64 = 1e-6;
const INVARIANCE_TOL: f64 = 1e-6;
const ZERO_SUM_TOL: f64 = 1e-12;
const FOC_TOL: f64 = 1e-12;
const DRAWS: usize = 100;

/// Criteria share one core; serialize them so the timing in criterion 1 is
/// not inflated by the others.
fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(n: usize, name: &str, pass: bool, detail: String) {
    println!(
        "criterion {n} ({name}): {} [{detail}]",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {n} failed: {detail}");
}

fn iv(lo: f64, hi: f64) -> Interval {
    Interval::new(lo, hi).unwrap()
}

fn others_of(x: &[f64], player: usize) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter(|&(j, _)| j != player)
        .map(|(_, v)| *v)
        .collect()
}

fn random_cournot(rng: &mut ChaCha8Rng) -> CournotSpec {
    let intercept = rng.gen_range(5.0..=15.0);
    let b = rng.gen_range(0.0..=0.9);
    let c = [0; 3].map(|_| rng.gen_range(0.0..=intercept / 2.0));
    CournotSpec::new(intercept, b, c)
}

fn random_quadratic(rng: &mut ChaCha8Rng, n: usize) -> QuadraticGameSpec {
    QuadraticGameSpec {
        own: (0..n).map(|_| -rng.gen_range(0.2..2.0)).collect(),
        linear: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        cross: (0..n)
            .map(|_| (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect())
            .collect(),
        constant: (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        bounds: vec![[-1.0, 1.0]; n],
    }
}

fn with_subsidy(game: MainGame, vertex: f64, lo: f64, hi: f64) -> ZeroSumExtension {
    extend(game, Subsidy::quadratic(vertex, iv(lo, hi)), &Tolerances::default()).unwrap()
}

struct Solved {
    ext: ZeroSumExtension,
    report: VerificationReport,
}

/// The 100 seeded Cournot draws, solved once and shared by criteria 2 and 3.
fn solved_draws() -> &'static [Solved] {
    static DRAWN: OnceLock<Vec<Solved>> = OnceLock::new();
    DRAWN.get_or_init(|| {
        let tol = Tolerances::default();
        let settings = SolverSettings::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        (0..DRAWS)
            .map(|_| {
                let spec = random_cournot(&mut rng);
                let vertex = rng.gen_range(1.0..=7.0);
                let ext = with_subsidy(cournot_game(&spec).unwrap(), vertex, 0.0, 8.0);
                let report = verify_theorem1(&ext, &tol, &settings).unwrap();
                Solved { ext, report }
            })
            .collect()
    })
}

#[test]
fn criterion_1_reproduces_closed_form() {
    let _guard = serial();
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/configs/cournot_asymmetric.json");
    let cfg = RunConfig::load(std::path::Path::new(path)).unwrap();
    let started = Instant::now();
    let emitted = cmd_solve(&cfg).unwrap();
    let wall = started.elapsed().as_secs_f64();

    let x: Vec<f64> = serde_json::from_value(emitted.json["equilibrium"]["x"].clone()).unwrap();
    let f = emitted.json["equilibrium"]["f"].as_f64().unwrap();
    let closed = cournot_closed_form(&CournotSpec::new(10.0, 0.5, [1.0, 2.0, 3.0])).unwrap();
    let err = x.iter().zip(closed).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let pass = err <= SOLVE_TOL && (f - 4.0).abs() <= SOLVE_TOL && wall < 1.0;
    verdict(
        1,
        "closed-form reproduction",
        pass,
        format!("x = {x:?}, max error {err:.2e}, f = {f}, wall {wall:.3} s"),
    );
}

#[test]
fn criterion_2_solved_points_are_nash() {
    let _guard = serial();
    let draws = solved_draws();
    let mut failures = 0;
    let mut worst = 0.0_f64;
    for d in draws {
        let gap = d.report.deviation_gaps.iter().copied().fold(0.0, f64::max);
        worst = worst.max(gap);
        let sub = d.report.subsidy_deviation.as_ref().unwrap();
        if gap > GAP_TOL || !sub.passed || (d.report.equilibrium_f - d.ext.a()).abs() > GAP_TOL {
            failures += 1;
        }
    }
    verdict(
        2,
        "maximin fixed point is Nash",
        failures == 0,
        format!(
            "{}/{} draws pass, worst deviation gap {worst:.2e}",
            draws.len() - failures,
            draws.len()
        ),
    );
}

#[test]
fn criterion_3_minimax_equality_at_equilibria() {
    let _guard = serial();
    let tol = Tolerances::default();
    let draws = solved_draws();
    let (mut failures, mut worst_gap, mut worst_arg_f) = (0, 0.0_f64, 0.0_f64);
    for d in draws {
        let report = verify_theorem2(&d.ext, &d.report.equilibrium_x, &tol).unwrap();
        let mut ok = true;
        for s in &report.sion_reports {
            let arg_f = (s.arg_f - d.ext.a()).abs();
            worst_gap = worst_gap.max(s.gap);
            worst_arg_f = worst_arg_f.max(arg_f);
            ok &= s.gap <= SION_TOL && arg_f <= ARG_F_TOL;
        }
        if !ok {
            failures += 1;
        }
    }
    verdict(
        3,
        "per-pair minimax equality",
        failures == 0,
        format!(
            "{}/{} draws pass, worst Sion gap {worst_gap:.2e}, worst |arg_f - a| {worst_arg_f:.2e}",
            draws.len() - failures,
            draws.len()
        ),
    );
}

#[test]
fn criterion_4_off_equilibrium_minimax_equality() {
    let _guard = serial();
    let tol = Tolerances {
        eq_tol: INVARIANCE_TOL,
        ..Tolerances::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut instances = Vec::new();
    for k in 0..10 {
        let ext = if k % 2 == 0 {
            with_subsidy(
                cournot_game(&random_cournot(&mut rng)).unwrap(),
                rng.gen_range(1.0..7.0),
                0.0,
                8.0,
            )
        } else {
            let game = quadratic_game(&random_quadratic(&mut rng, 2 + k % 3)).unwrap();
            with_subsidy(game, rng.gen_range(-0.5..0.5), -1.0, 1.0)
        };
        instances.push(ext);
    }
    let (mut checked, mut failures, mut worst_gap) = (0, 0, 0.0_f64);
    for ext in &instances {
        let spaces = ext.game().spaces().to_vec();
        let d = ext.subsidy().domain();
        let samples = [d.lo(), ext.a(), d.hi()];
        let mut taken = 0;
        while taken < DRAWS / instances.len() {
            let x: Vec<f64> = spaces.iter().map(|s| rng.gen_range(s.lo()..=s.hi())).collect();
            let gaps = verify_nash(ext.game(), &x, &tol).unwrap();
            if gaps.iter().all(|&g| g <= 1e-3) {
                continue;
            }
            let player = rng.gen_range(0..spaces.len());
            let others = others_of(&x, player);
            let report = sion_check(ext, player, &others, &tol).unwrap();
            let invariant = argmax_invariance_check(ext, player, &others, &samples, &tol).unwrap();
            worst_gap = worst_gap.max(report.gap);
            if report.gap > SION_TOL || !invariant {
                failures += 1;
            }
            taken += 1;
            checked += 1;
        }
    }
    verdict(
        4,
        "off-equilibrium minimax equality",
        failures == 0,
        format!(
            "{}/{checked} profiles pass, worst Sion gap {worst_gap:.2e}",
            checked - failures
        ),
    );
}

#[test]
fn criterion_5_zero_sum_identity() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let toy = validate_game(GameDescription::new().player(0.0, 10.0, |x| -(x[0] - 3.0).powi(2))).unwrap();
    let instances = vec![
        with_subsidy(
            cournot_game(&CournotSpec::new(10.0, 0.5, [1.0, 2.0, 3.0])).unwrap(),
            4.0,
            0.0,
            8.0,
        ),
        with_subsidy(cournot_game(&random_cournot(&mut rng)).unwrap(), 2.5, 0.0, 8.0),
        with_subsidy(quadratic_game(&random_quadratic(&mut rng, 3)).unwrap(), 0.2, -1.0, 1.0),
        with_subsidy(quadratic_game(&random_quadratic(&mut rng, 5)).unwrap(), -0.7, -1.0, 1.0),
        with_subsidy(toy, 2.0, 0.0, 5.0),
    ];
    let mut worst = 0.0_f64;
    for ext in &instances {
        let d = ext.subsidy().domain();
        for _ in 0..1000 {
            let x: Vec<f64> = ext
                .game()
                .spaces()
                .iter()
                .map(|s| rng.gen_range(s.lo()..=s.hi()))
                .collect();
            let f = rng.gen_range(d.lo()..=d.hi());
            worst = worst.max(ext.zero_sum_residual(&StrategyProfile::with_subsidy(x, f)).unwrap());
        }
    }
    verdict(
        5,
        "zero-sum identity",
        worst <= ZERO_SUM_TOL,
        format!(
            "{} instances x 1000 profiles, worst relative residual {worst:.2e}",
            instances.len()
        ),
    );
}

/// Largest difference quotient of the grid envelopes `min_f pi` and
/// `max_x pi` within two cells of the brute-force arguments.
fn local_lipschitz(gg: &GridGame, kx: usize, kf: usize) -> f64 {
    let r = gg.resolution();
    let (xs, fs) = (gg.axis(0), gg.axis(1));
    let lower: Vec<f64> = (0..r)
        .map(|k| (0..r).map(|j| gg.pi_at(0, &[k], j)).fold(f64::INFINITY, f64::min))
        .collect();
    let upper: Vec<f64> = (0..r)
        .map(|j| (0..r).map(|k| gg.pi_at(0, &[k], j)).fold(f64::NEG_INFINITY, f64::max))
        .collect();
    let slope = |env: &[f64], axis: &[f64], center: usize| {
        let (lo, hi) = (center.saturating_sub(2), (center + 2).min(r - 1));
        (lo..hi)
            .map(|k| ((env[k + 1] - env[k]) / (axis[k + 1] - axis[k])).abs())
            .fold(0.0, f64::max)
    };
    slope(&lower, xs, kx).max(slope(&upper, fs, kf))
}

#[test]
fn criterion_6_oracle_convergence() {
    let _guard = serial();
    let tol = Tolerances::default();
    let asym = cournot_game(&CournotSpec::new(10.0, 0.5, [1.0, 2.0, 3.0])).unwrap();
    let eq = cournot_closed_form(&CournotSpec::new(10.0, 0.5, [1.0, 2.0, 3.0])).unwrap();
    let quad = quadratic_game(&QuadraticGameSpec {
        own: vec![-1.3, -0.8],
        linear: vec![0.7, -0.2],
        cross: vec![vec![0.0, 0.3], vec![-0.4, 0.0]],
        constant: vec![0.0, 0.5],
        bounds: vec![[-1.0, 1.0]; 2],
    })
    .unwrap();
    let toy = validate_game(GameDescription::new().player(0.0, 10.0, |x| -(x[0] - 3.0).powi(2))).unwrap();

    // One-player slices; every subsidy vertex lies on all three nested grids.
    let mut slices = vec![("toy", with_subsidy(toy, 2.0, 0.0, 5.0))];
    for player in 0..3 {
        let slice = asym.slice(player, &others_of(&eq, player)).unwrap();
        slices.push(("cournot at equilibrium", with_subsidy(slice, 4.0, 0.0, 8.0)));
    }
    slices.push((
        "cournot off equilibrium",
        with_subsidy(asym.slice(0, &[1.0, 4.0]).unwrap(), 4.0, 0.0, 8.0),
    ));
    slices.push((
        "quadratic",
        with_subsidy(quad.slice(1, &[0.37]).unwrap(), 6.0, 0.0, 8.0),
    ));

    let mut ok = true;
    let mut lines = Vec::new();
    let mut weak_duality_checked = 0;
    for (name, ext) in &slices {
        let sion = sion_check(ext, 0, &[], &tol).unwrap();
        let mut previous = (f64::INFINITY, f64::INFINITY);
        for resolution in [11, 51, 251] {
            let gg = discretize(ext, resolution).unwrap();
            let (kx, lower) = brute_maximin(&gg, 0, &[]).unwrap();
            let (kf, upper) = brute_minimax(&gg, 0, &[]).unwrap();
            weak_duality_checked += 1;
            ok &= lower <= upper;
            let d = ((lower - sion.maximin_value).abs(), (upper - sion.minimax_value).abs());
            ok &= d.0 <= previous.0 && d.1 <= previous.1;
            previous = d;
            if resolution == 251 {
                let step = (gg.axis(0)[1] - gg.axis(0)[0]).max(gg.axis(1)[1] - gg.axis(1)[0]);
                let bound = 2.0 * step * local_lipschitz(&gg, kx, kf);
                ok &= d.0 <= bound && d.1 <= bound;
                lines.push(format!("{name}: {:.2e}/{:.2e} <= {bound:.2e}", d.0, d.1));
            }
        }
    }

    // Weak duality on full multi-player grids, every player and every
    // profile of the others.
    let full = [
        (with_subsidy(asym.clone(), 4.0, 0.0, 8.0), 11),
        (with_subsidy(quad, 0.0, -1.0, 1.0), 51),
    ];
    for (ext, resolution) in &full {
        let gg = discretize(ext, *resolution).unwrap();
        let n = gg.n_players();
        for player in 0..n {
            for flat in 0..resolution.pow((n - 1) as u32) {
                let others_idx: Vec<usize> = (0..n - 1)
                    .map(|k| flat / resolution.pow(k as u32) % resolution)
                    .collect();
                let (_, lower) = brute_maximin(&gg, player, &others_idx).unwrap();
                let (_, upper) = brute_minimax(&gg, player, &others_idx).unwrap();
                ok &= lower <= upper;
                weak_duality_checked += 1;
            }
        }
    }
    verdict(
        6,
        "oracle convergence",
        ok,
        format!(
            "{}; weak duality on {weak_duality_checked} grid instances",
            lines.join("; ")
        ),
    );
}

#[test]
fn criterion_7_closed_form_foc_identity() {
    let _guard = serial();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut count, mut worst, mut worst_cross) = (0, 0.0_f64, 0.0_f64);
    while count < 1000 {
        let intercept = rng.gen_range(1.0..=100.0);
        let spec = CournotSpec::new(
            intercept,
            rng.gen_range(0.0..1.0),
            [0; 3].map(|_| rng.gen_range(0.0..=intercept / 2.0)),
        );
        let Ok(x) = cournot_closed_form(&spec) else { continue };
        worst = cournot_foc_residuals(&spec, &x)
            .iter()
            .fold(worst, |m, r| m.max(r.abs()));
        let general = cournot_n_closed_form(&CournotNSpec::from(&spec)).unwrap();
        worst_cross = x
            .iter()
            .zip(&general)
            .fold(worst_cross, |m, (a, b)| m.max((a - b).abs() / intercept));
        count += 1;
    }
    verdict(
        7,
        "closed-form first-order conditions",
        worst <= FOC_TOL && worst_cross <= FOC_TOL,
        format!("1000 specs, worst residual {worst:.2e}, n-firm formula agreement {worst_cross:.2e}"),
    );
}
