//! Run configuration: one TOML file with a section per module. Every section is optional and
//! unknown keys are rejected.

use crate::error::{Error, Result};
use crate::evolve::{EvolutionConfig, YangFeldmanConfig};
use crate::final_data::FinalState;
use crate::profiles::ProfileConfig;
use crate::residual::lemmas::LemmaGrid;
use crate::residual::Derivatives;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Amplitude and width of one Gaussian component a·e^{−|x|²/(2σ²)}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaussianConfig {
    pub amplitude: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResidualConfig {
    pub t_min: f64,
    pub t_max: f64,
    pub points: usize,
    /// Factor applied to the final state for the residual decay scans.
    pub data_scale: f64,
    pub derivatives: Derivatives,
    pub modes: Vec<u32>,
}

impl Default for ResidualConfig {
    fn default() -> Self {
        Self {
            t_min: 100.0,
            t_max: 1e4,
            points: 12,
            data_scale: 8.0,
            derivatives: Derivatives::Exact,
            modes: vec![3, 5, 7, 9],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LemmaConfig {
    /// Values of sup ⟨μ⟩^{3/2}ρ the data is rescaled to before the sweep.
    pub targets: Vec<f64>,
    pub grid: LemmaGrid,
}

impl Default for LemmaConfig {
    fn default() -> Self {
        Self { targets: vec![0.01, 0.1], grid: LemmaGrid::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EmitConfig {
    pub csv: bool,
    pub json: bool,
    pub gnuplot: bool,
}

impl Default for EmitConfig {
    fn default() -> Self {
        Self { csv: true, json: true, gnuplot: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub output_dir: PathBuf,
    pub phi0: GaussianConfig,
    pub phi1: GaussianConfig,
    pub profile: ProfileConfig,
    pub residual: ResidualConfig,
    pub lemmas: LemmaConfig,
    pub evolve: EvolutionConfig,
    pub yang_feldman: YangFeldmanConfig,
    pub emit: EmitConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            output_dir: PathBuf::from("nlkg-out"),
            phi0: GaussianConfig { amplitude: 0.00625, sigma: 2.0 },
            phi1: GaussianConfig { amplitude: 0.0, sigma: 1.0 },
            profile: ProfileConfig::default(),
            residual: ResidualConfig::default(),
            lemmas: LemmaConfig::default(),
            evolve: EvolutionConfig::default(),
            yang_feldman: YangFeldmanConfig::default(),
            emit: EmitConfig::default(),
        }
    }
}

impl RunConfig {
    pub fn final_state(&self) -> Result<FinalState> {
        FinalState::new(self.phi0.amplitude, self.phi0.sigma, self.phi1.amplitude, self.phi1.sigma)
            .map_err(|e| Error::Config(format!("phi0/phi1: {e}")))
    }

    pub fn validate(&self) -> Result<()> {
        self.final_state()?;
        self.profile.validate()?;
        self.evolve.validate()?;
        self.yang_feldman.validate()?;
        let bad = |key: &str, msg: String| Err(Error::Config(format!("{key}: {msg}")));
        let r = &self.residual;
        if !(r.t_min >= 3.0 && r.t_max > r.t_min) {
            return bad("residual.t_min", format!("need 3 <= t_min < t_max, got [{}, {}]", r.t_min, r.t_max));
        }
        if r.points < 12 {
            return bad("residual.points", format!("must be >= 12, got {}", r.points));
        }
        if !(r.data_scale.is_finite() && r.data_scale >= 0.0) {
            return bad("residual.data_scale", format!("must be finite and >= 0, got {}", r.data_scale));
        }
        if let Some(n) = r.modes.iter().find(|&&n| n < 3 || n % 2 == 0 || n > self.profile.n_max) {
            return bad("residual.modes", format!("mode {n} must be odd, >= 3 and <= profile.n_max"));
        }
        if let Derivatives::FiniteDifference { theta_t, theta_r, .. } = r.derivatives {
            if !(theta_t > 0.0 && theta_r > 0.0) {
                return bad("residual.derivatives", "finite-difference steps must be positive".into());
            }
        }
        let l = &self.lemmas;
        if l.targets.iter().any(|&x| !(x > 0.0 && x.is_finite())) {
            return bad("lemmas.targets", format!("must be positive, got {:?}", l.targets));
        }
        let g = &l.grid;
        if !(g.s_min >= 3.0 && g.s_max > g.s_min) {
            return bad("lemmas.grid.s_min", format!("need 3 <= s_min < s_max, got [{}, {}]", g.s_min, g.s_max));
        }
        if !(g.mu_max > 0.0) || g.s_points < 2 || g.mu_points < 2 {
            return bad("lemmas.grid", "mu_max must be positive and both point counts >= 2".into());
        }
        Ok(())
    }

    /// The effective configuration as TOML.
    pub fn echo(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(format!("cannot serialise config: {e}")))
    }

    /// Writes the effective configuration to `output_dir/effective_config.toml`.
    pub fn write_echo(&self) -> Result<PathBuf> {
        std::fs::create_dir_all(&self.output_dir)?;
        let path = self.output_dir.join("effective_config.toml");
        std::fs::write(&path, self.echo()?)?;
        Ok(path)
    }
}

/// Parses and validates a configuration; missing keys take their defaults.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = std::fs::read_to_string(path)?;
    parse_config(&text).map_err(|e| match e {
        Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_file_gives_defaults() {
        assert_eq!(parse_config("").unwrap(), RunConfig::default());
    }

    #[test]
    fn validation_names_the_key() {
        let e = parse_config("[profile]\nn_max = 4\n").unwrap_err().to_string();
        assert!(e.contains("profile.n_max"), "{e}");
        let e = parse_config("[evolve]\nt_start = 1.0\n").unwrap_err().to_string();
        assert!(e.contains("evolve.t_start"), "{e}");
        let e = parse_config("[residual]\nmodes = [4]\n").unwrap_err().to_string();
        assert!(e.contains("residual.modes"), "{e}");
    }

    #[test]
    fn parse_errors_carry_line_numbers_and_unknown_keys_fail() {
        let e = parse_config("[profile]\nlambda1 = 1.0\nbogus = 3\n").unwrap_err().to_string();
        assert!(e.contains("line 3") && e.contains("bogus"), "{e}");
        let e = parse_config("output_dir = \"x\"\n[evolve\n").unwrap_err().to_string();
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn echo_round_trip() {
        let mut cfg = RunConfig::default();
        cfg.profile.lambda1 = -1.0;
        cfg.residual.derivatives = Derivatives::FiniteDifference { theta_t: 1e-3, theta_r: 2e-3, relative: true };
        cfg.yang_feldman.tail_tol = Some(0.25);
        cfg.evolve.uncorrected_baseline = true;
        let back = parse_config(&cfg.echo().unwrap()).unwrap();
        assert_eq!(back, cfg);
        let dir = tempfile::tempdir().unwrap();
        cfg.output_dir = dir.path().join("out");
        let path = cfg.write_echo().unwrap();
        assert_eq!(load_config(&path).unwrap(), cfg);
    }
}
