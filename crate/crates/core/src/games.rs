//! Builtin parametric game families.
//!
//! The family names and parameter keys here are the stable contract for
//! run configuration files.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{validate_game, GameDescription, MainGame};

/// Three-firm Cournot oligopoly with differentiated goods.
///
/// Firm `i` faces inverse demand `p_i = demand_intercept - x_i - b * sum_{j != i} x_j`
/// and unit cost `c_i`, so `phi_i = p_i x_i - c_i x_i`. Outputs live in
/// `[0, output_bound]`, where `output_bound` defaults to `demand_intercept`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CournotSpec {
    pub demand_intercept: f64,
    pub b: f64,
    pub c: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_bound: Option<f64>,
}

impl CournotSpec {
    pub fn new(demand_intercept: f64, b: f64, c: [f64; 3]) -> Self {
        Self {
            demand_intercept,
            b,
            c,
            output_bound: None,
        }
    }

    pub fn output_bound(&self) -> f64 {
        self.output_bound.unwrap_or(self.demand_intercept)
    }

    pub fn validate(&self) -> Result<()> {
        validate_cournot(self.demand_intercept, self.b, &self.c, self.output_bound())
    }
}

/// n-firm generalization of [`CournotSpec`]; not part of the three-firm
/// reference model, used for scaling tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CournotNSpec {
    pub demand_intercept: f64,
    pub b: f64,
    pub c: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_bound: Option<f64>,
}

impl CournotNSpec {
    pub fn output_bound(&self) -> f64 {
        self.output_bound.unwrap_or(self.demand_intercept)
    }

    pub fn validate(&self) -> Result<()> {
        if self.c.is_empty() {
            return Err(Error::bad_spec("c", "at least one firm is required"));
        }
        validate_cournot(self.demand_intercept, self.b, &self.c, self.output_bound())
    }
}

impl From<&CournotSpec> for CournotNSpec {
    fn from(s: &CournotSpec) -> Self {
        Self {
            demand_intercept: s.demand_intercept,
            b: s.b,
            c: s.c.to_vec(),
            output_bound: s.output_bound,
        }
    }
}

fn validate_cournot(intercept: f64, b: f64, c: &[f64], bound: f64) -> Result<()> {
    if !(intercept.is_finite() && intercept > 0.0) {
        return Err(Error::bad_spec(
            "demand_intercept",
            format!("must be finite and positive, got {intercept}"),
        ));
    }
    // b = 0 (independent monopolies) is admitted alongside 0 < b < 1.
    if !(b.is_finite() && (0.0..1.0).contains(&b)) {
        return Err(Error::bad_spec("b", format!("must lie in [0, 1), got {b}")));
    }
    for (i, &ci) in c.iter().enumerate() {
        if !ci.is_finite() {
            return Err(Error::bad_spec("c", format!("c[{i}] is not finite")));
        }
        if ci >= intercept {
            return Err(Error::bad_spec(
                "c",
                format!("c[{i}] = {ci} must be below demand_intercept = {intercept}"),
            ));
        }
    }
    if !(bound.is_finite() && bound > 0.0) {
        return Err(Error::bad_spec(
            "output_bound",
            format!("must be finite and positive, got {bound}"),
        ));
    }
    Ok(())
}

fn cournot_profit(intercept: f64, b: f64, cost: f64, firm: usize, x: &[f64]) -> f64 {
    let rivals: f64 = x.iter().enumerate().filter(|&(j, _)| j != firm).map(|(_, v)| v).sum();
    (intercept - x[firm] - b * rivals) * x[firm] - cost * x[firm]
}

/// The three-firm Cournot game.
pub fn cournot_game(spec: &CournotSpec) -> Result<MainGame> {
    spec.validate()?;
    cournot_n_game(&CournotNSpec::from(spec))
}

/// The n-firm Cournot game.
pub fn cournot_n_game(spec: &CournotNSpec) -> Result<MainGame> {
    spec.validate()?;
    let (intercept, b, bound) = (spec.demand_intercept, spec.b, spec.output_bound());
    let mut desc = GameDescription::new();
    for (firm, &cost) in spec.c.iter().enumerate() {
        desc = desc.player(0.0, bound, move |x: &[f64]| cournot_profit(intercept, b, cost, firm, x));
    }
    validate_game(desc)
}

/// Closed-form interior equilibrium of the three-firm game:
/// `x_1 = ((2-b) A + b c_3 + b c_2 - (2+b) c_1) / (2 (2-b)(1+b))` and its
/// cyclic counterparts, `A` being the demand intercept.
pub fn cournot_closed_form(spec: &CournotSpec) -> Result<[f64; 3]> {
    spec.validate()?;
    let (a, b, c) = (spec.demand_intercept, spec.b, spec.c);
    let denom = 2.0 * (2.0 - b) * (b + 1.0);
    let out = [
        ((2.0 - b) * a + b * c[2] + b * c[1] - (2.0 + b) * c[0]) / denom,
        ((2.0 - b) * a + b * c[2] + b * c[0] - (2.0 + b) * c[1]) / denom,
        ((2.0 - b) * a + b * c[0] + b * c[1] - (2.0 + b) * c[2]) / denom,
    ];
    check_outputs(&out, spec.output_bound())?;
    Ok(out)
}

/// Interior equilibrium of the n-firm game, from the aggregate first-order
/// condition: `S = (n A - sum c) / (2 - b + n b)`, `x_i = (A - c_i - b S) / (2 - b)`.
pub fn cournot_n_closed_form(spec: &CournotNSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let (a, b) = (spec.demand_intercept, spec.b);
    let n = spec.c.len() as f64;
    let total = (n * a - spec.c.iter().sum::<f64>()) / (2.0 - b + n * b);
    let out: Vec<f64> = spec.c.iter().map(|ci| (a - ci - b * total) / (2.0 - b)).collect();
    check_outputs(&out, spec.output_bound())?;
    Ok(out)
}

fn check_outputs(out: &[f64], bound: f64) -> Result<()> {
    for (firm, &value) in out.iter().enumerate() {
        if value < 0.0 {
            return Err(Error::NegativeOutput { firm, value });
        }
        if value > bound {
            return Err(Error::bad_spec(
                "output_bound",
                format!("equilibrium output {value} of firm {firm} exceeds the bound {bound}"),
            ));
        }
    }
    Ok(())
}

/// Residuals of the Cournot first-order conditions
/// `A - 2 x_i - b sum_{j != i} x_j - c_i` at `x`.
pub fn cournot_foc_residuals(spec: &CournotSpec, x: &[f64; 3]) -> [f64; 3] {
    let (a, b, c) = (spec.demand_intercept, spec.b, spec.c);
    std::array::from_fn(|i| {
        let rivals: f64 = (0..3).filter(|&j| j != i).map(|j| x[j]).sum();
        a - 2.0 * x[i] - b * rivals - c[i]
    })
}

/// Quadratic game:
/// `phi_i = own_i x_i^2 + linear_i x_i + sum_{j != i} cross[i][j] x_i x_j + constant_i`
/// with `own_i < 0`, hence strictly concave in the player's own strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadraticGameSpec {
    pub own: Vec<f64>,
    pub linear: Vec<f64>,
    /// `n x n`; diagonal entries are ignored. Empty means no interaction.
    #[serde(default)]
    pub cross: Vec<Vec<f64>>,
    #[serde(default)]
    pub constant: Vec<f64>,
    pub bounds: Vec<[f64; 2]>,
}

impl QuadraticGameSpec {
    pub fn n(&self) -> usize {
        self.own.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::bad_spec("own", "at least one player is required"));
        }
        let lens = [("linear", self.linear.len()), ("bounds", self.bounds.len())];
        for (field, len) in lens {
            if len != n {
                return Err(Error::bad_spec(field, format!("expected {n} entries, got {len}")));
            }
        }
        if !self.constant.is_empty() && self.constant.len() != n {
            return Err(Error::bad_spec(
                "constant",
                format!("expected {n} entries, got {}", self.constant.len()),
            ));
        }
        if !self.cross.is_empty() && (self.cross.len() != n || self.cross.iter().any(|row| row.len() != n)) {
            return Err(Error::bad_spec("cross", format!("expected an {n}x{n} matrix")));
        }
        for (i, &q) in self.own.iter().enumerate() {
            if !(q.is_finite() && q < 0.0) {
                return Err(Error::bad_spec(
                    "own",
                    format!("own[{i}] = {q} must be strictly negative"),
                ));
            }
        }
        let all_finite = self
            .linear
            .iter()
            .chain(&self.constant)
            .chain(self.cross.iter().flatten())
            .all(|v| v.is_finite());
        if !all_finite {
            return Err(Error::bad_spec("linear", "coefficients must be finite"));
        }
        Ok(())
    }

    fn cross(&self, i: usize, j: usize) -> f64 {
        if self.cross.is_empty() || i == j {
            0.0
        } else {
            self.cross[i][j]
        }
    }

    /// Unconstrained-then-clipped best response of player `i` to `x`.
    pub fn best_response(&self, i: usize, x: &[f64]) -> f64 {
        let pull: f64 = self.linear[i] + (0..self.n()).map(|j| self.cross(i, j) * x[j]).sum::<f64>();
        let [lo, hi] = self.bounds[i];
        (pull / (-2.0 * self.own[i])).clamp(lo, hi)
    }
}

pub fn quadratic_game(spec: &QuadraticGameSpec) -> Result<MainGame> {
    spec.validate()?;
    let mut desc = GameDescription::new();
    for i in 0..spec.n() {
        let own = spec.own[i];
        let linear = spec.linear[i];
        let constant = spec.constant.get(i).copied().unwrap_or(0.0);
        let cross: Vec<f64> = (0..spec.n()).map(|j| spec.cross(i, j)).collect();
        let [lo, hi] = spec.bounds[i];
        desc = desc.player(lo, hi, move |x: &[f64]| {
            let xi = x[i];
            let interaction: f64 = cross.iter().zip(x).map(|(c, xj)| c * xj).sum();
            own * xi * xi + linear * xi + xi * interaction + constant
        });
    }
    validate_game(desc).map_err(|e| match e {
        Error::BadInterval { lo, hi } => Error::bad_spec("bounds", format!("[{lo}, {hi}] is not a valid interval")),
        other => other,
    })
}
