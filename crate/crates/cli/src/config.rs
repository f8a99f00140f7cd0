//! TOML run configuration.

use std::path::{Path, PathBuf};

use dkit_core::system::AffineSystem;
use dkit_core::{DichotomyConstants, TimeWindow};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub system: AffineSystem,
    pub window: TimeWindow,
    #[serde(default)]
    pub dichotomy: DichotomyConfig,
    #[serde(default)]
    pub truncation: TruncationConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

/// How the projector `P` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProjectorMode {
    /// Singular-value split of the forward transition over the window.
    #[default]
    Estimate,
    Identity,
    Zero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DichotomyConfig {
    #[serde(default)]
    pub projector: ProjectorMode,
    /// Fitted from the kernel when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<DichotomyConstants>,
    /// Verification window; defaults to the run window.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<TimeWindow>,
    #[serde(default)]
    pub t0: i64,
    /// Growth-rate threshold separating stable and unstable modes.
    #[serde(default)]
    pub rate_threshold: f64,
}

impl Default for DichotomyConfig {
    fn default() -> Self {
        DichotomyConfig { projector: ProjectorMode::Estimate, constants: None, window: None, t0: 0, rate_threshold: 0.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AutoKeyword {
    Auto,
}

/// `"auto"`, `{ auto = tol }` or `{ n_past, n_future }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TruncationConfig {
    /// Tail tolerance equal to the solver tolerance.
    Keyword(AutoKeyword),
    Auto { auto: f64 },
    Fixed { n_past: usize, n_future: usize },
}

impl Default for TruncationConfig {
    fn default() -> Self {
        TruncationConfig::Keyword(AutoKeyword::Auto)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
}

fn default_tol() -> f64 {
    1e-10
}

fn default_max_iter() -> usize {
    500
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { tol: default_tol(), max_iter: default_max_iter() }
    }
}

/// Report paths; relative paths resolve against the output directory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dichotomy: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solution: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<PathBuf>,
}

impl OutputConfig {
    pub fn resolve(&self, out_dir: &Path) -> ResolvedOutputs {
        let pick = |p: &Option<PathBuf>, default: &str| out_dir.join(p.as_deref().unwrap_or(Path::new(default)));
        ResolvedOutputs {
            dichotomy: pick(&self.dichotomy, "dichotomy.json"),
            solution: pick(&self.solution, "solution.csv"),
            diagnostics: pick(&self.diagnostics, "diagnostics.json"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResolvedOutputs {
    pub dichotomy: PathBuf,
    pub solution: PathBuf,
    pub diagnostics: PathBuf,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self, String> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| e.to_string())?;
        cfg.check()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        Self::from_toml(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run configuration serializes")
    }

    fn check(&self) -> Result<(), String> {
        if self.window.lo > self.window.hi {
            return Err(format!("empty window [{}, {}]", self.window.lo, self.window.hi));
        }
        if !(self.solver.tol > 0.0) {
            return Err(format!("solver.tol must be positive, got {}", self.solver.tol));
        }
        if let TruncationConfig::Auto { auto } = self.truncation {
            if !(auto > 0.0) {
                return Err(format!("truncation.auto must be positive, got {auto}"));
            }
        }
        Ok(())
    }

    /// Tail tolerance for automatic truncation, if requested.
    pub fn auto_tolerance(&self) -> Option<f64> {
        match self.truncation {
            TruncationConfig::Keyword(AutoKeyword::Auto) => Some(self.solver.tol),
            TruncationConfig::Auto { auto } => Some(auto),
            TruncationConfig::Fixed { .. } => None,
        }
    }

    pub fn dichotomy_window(&self) -> TimeWindow {
        self.dichotomy.window.unwrap_or(self.window)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
window = { lo = -5, hi = 5 }

[system]
dim = 1
coefficient = { diagonal = { kind = "constant", value = 0.5 } }
"#;

    #[test]
    fn defaults_fill_in() {
        let cfg = RunConfig::from_toml(MINIMAL).unwrap();
        assert_eq!(cfg.truncation, TruncationConfig::Keyword(AutoKeyword::Auto));
        assert_eq!(cfg.auto_tolerance(), Some(1e-10));
        assert_eq!(cfg.dichotomy.projector, ProjectorMode::Estimate);
        assert_eq!(cfg.dichotomy_window(), TimeWindow::new(-5, 5).unwrap());
    }

    #[test]
    fn truncation_forms() {
        for (text, expected) in [
            ("truncation = \"auto\"", TruncationConfig::Keyword(AutoKeyword::Auto)),
            ("truncation = { auto = 1e-6 }", TruncationConfig::Auto { auto: 1e-6 }),
            ("truncation = { n_past = 30, n_future = 4 }", TruncationConfig::Fixed { n_past: 30, n_future: 4 }),
        ] {
            let cfg = RunConfig::from_toml(&format!("{text}\n{MINIMAL}")).unwrap();
            assert_eq!(cfg.truncation, expected);
        }
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(RunConfig::from_toml(&format!("bogus = 1\n{MINIMAL}")).is_err());
        assert!(RunConfig::from_toml(&format!("truncation = \"manual\"\n{MINIMAL}")).is_err());
        assert!(RunConfig::from_toml(&format!("{MINIMAL}\n[solver]\ntol = -1.0\n")).is_err());
    }

    #[test]
    fn output_paths_resolve_against_out_dir() {
        let o = OutputConfig { solution: Some("x.csv".into()), ..Default::default() };
        let r = o.resolve(Path::new("out"));
        assert_eq!(r.solution, Path::new("out/x.csv"));
        assert_eq!(r.diagnostics, Path::new("out/diagnostics.json"));
    }
}
