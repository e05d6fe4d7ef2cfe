//! Run configuration files (JSON, strict keys).

use serde::{Deserialize, Serialize};

use crate::cli::{CliError, Format};
use crate::embedding::{extend_with, ExtendOptions, Subsidy, ZeroSumExtension};
use crate::games::{cournot_game, cournot_n_game, quadratic_game, CournotNSpec, CournotSpec, QuadraticGameSpec};
use crate::model::{Interval, Tolerances};
use crate::solver::SolverSettings;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub game: GameConfig,
    pub subsidy: SubsidyConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", content = "params", rename_all = "snake_case", deny_unknown_fields)]
pub enum GameConfig {
    Cournot(CournotSpec),
    CournotN(CournotNSpec),
    Quadratic(QuadraticGameSpec),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsidyFamily {
    /// `psi(f) = (f - vertex)^2`
    #[default]
    Quadratic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SubsidyConfig {
    #[serde(default)]
    pub family: SubsidyFamily,
    pub vertex: f64,
    pub f_bounds: [f64; 2],
    /// Shift `psi` so that its minimum is 0 instead of rejecting it.
    #[serde(default)]
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub damping: f64,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub init: Option<Vec<f64>>,
    /// Extra random starts used to check that the equilibrium is unique.
    pub multi_start: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = SolverSettings::default();
        Self {
            damping: d.damping,
            max_iter: d.max_iter,
            init: None,
            multi_start: 0,
        }
    }
}

impl SolverConfig {
    pub fn settings(&self) -> SolverSettings {
        SolverSettings {
            damping: self.damping,
            max_iter: self.max_iter,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::config(None, format!("line {} column {}: {e}", e.line(), e.column())))
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(None, format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Validates every section and builds the zero-sum extension.
    pub fn build(&self) -> Result<ZeroSumExtension, CliError> {
        self.tolerances
            .validate()
            .map_err(|e| CliError::config(Some("tolerances".into()), e.to_string()))?;
        let d = self.solver.damping;
        if !(d > 0.0 && d <= 1.0) {
            return Err(CliError::config(
                Some("solver.damping".into()),
                format!("must lie in (0, 1], got {d}"),
            ));
        }
        let game = match &self.game {
            GameConfig::Cournot(spec) => cournot_game(spec),
            GameConfig::CournotN(spec) => cournot_n_game(spec),
            GameConfig::Quadratic(spec) => quadratic_game(spec),
        }
        .map_err(|e| CliError::from_core(e, "game.params"))?;

        let [lo, hi] = self.subsidy.f_bounds;
        let domain =
            Interval::new(lo, hi).map_err(|e| CliError::config(Some("subsidy.f_bounds".into()), e.to_string()))?;
        let subsidy = match self.subsidy.family {
            SubsidyFamily::Quadratic => Subsidy::quadratic(self.subsidy.vertex, domain),
        };
        let options = ExtendOptions {
            normalize_subsidy: self.subsidy.normalize,
        };
        let ext =
            extend_with(game, subsidy, &self.tolerances, options).map_err(|e| CliError::from_core(e, "subsidy"))?;

        if let Some(init) = &self.solver.init {
            ext.game()
                .check_profile(init)
                .map_err(|e| CliError::config(Some("solver.init".into()), e.to_string()))?;
        }
        Ok(ext)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const COURNOT: &str = r#"{
        "game": {"family": "cournot", "params": {"demand_intercept": 10, "b": 0.5, "c": [1, 2, 3]}},
        "subsidy": {"vertex": 4, "f_bounds": [0, 8]}
    }"#;

    #[test]
    fn parses_minimal_cournot() {
        let cfg = RunConfig::from_json(COURNOT).unwrap();
        assert_eq!(cfg.seed, 0);
        assert_eq!(cfg.solver.damping, 0.5);
        assert_eq!(cfg.tolerances, Tolerances::default());
        let ext = cfg.build().unwrap();
        assert_eq!(ext.n_players(), 3);
        assert!((ext.a() - 4.0).abs() < 1e-8);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let text = COURNOT.replace("\"b\": 0.5", "\"b\": 0.5, \"bb\": 1");
        let err = RunConfig::from_json(&text).unwrap_err();
        assert_eq!(err.exit_code, 2);
        assert!(err.message.contains("bb"), "{}", err.message);
        assert!(err.message.contains("line"), "{}", err.message);

        let text = COURNOT.replace("\"vertex\": 4", "\"vertex\": 4, \"typo\": 0");
        assert!(RunConfig::from_json(&text).is_err());
        let text = COURNOT.replace("\"game\"", "\"solver\": {\"dampin\": 0.3}, \"game\"");
        assert!(RunConfig::from_json(&text).is_err());
    }

    #[test]
    fn bad_b_names_field() {
        let cfg = RunConfig::from_json(&COURNOT.replace("0.5", "1.5")).unwrap();
        let err = cfg.build().unwrap_err();
        assert_eq!(err.exit_code, 2);
        assert_eq!(err.field.as_deref(), Some("game.params.b"));
    }

    #[test]
    fn subsidy_vertex_outside_bounds_rejected() {
        let cfg = RunConfig::from_json(&COURNOT.replace("[0, 8]", "[0, 3]")).unwrap();
        let err = cfg.build().unwrap_err();
        assert_eq!(err.exit_code, 2);
        assert_eq!(err.field.as_deref(), Some("subsidy"));
    }

    #[test]
    fn bad_tolerances_rejected() {
        let text = COURNOT.replace("\"game\"", "\"tolerances\": {\"eq_tol\": -1}, \"game\"");
        let err = RunConfig::from_json(&text).unwrap().build().unwrap_err();
        assert_eq!(err.field.as_deref(), Some("tolerances"));
    }
}
