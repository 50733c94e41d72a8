//! Scenario configuration files: TOML with sections `[domain]`, `[potential]`, `[grid]`,
//! `[solver]` and `[output]`.

use crate::error::{Error, Result};
use crate::solver::SolverOptions;
use serde::{Deserialize, Serialize};
use std::path::PathBuf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub domain: DomainConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Boundary curve of an annulus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveSpec {
    Circle { center: [f64; 2], radius: f64 },
    Ellipse { center: [f64; 2], semi_x: f64, semi_y: f64 },
    RoundedRect { x0: f64, x1: f64, y0: f64, y1: f64, radius: f64 },
    Polygon { vertices: Vec<[f64; 2]>, radius: f64 },
    /// Periodic spline through the points of a file with one `x y` pair per line.
    Points { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "scenario", rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainConfig {
    /// Metric circle `θ(t)² dt²` of coordinate length `length`.
    Circle {
        length: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        theta: String,
    },
    /// `[0, a] × S¹_length` with metric `α² dr² + θ² dt²`.
    Cylinder {
        a: f64,
        length: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        theta: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        alpha: Option<String>,
    },
    Annulus {
        inner: CurveSpec,
        outer: CurveSpec,
        #[serde(default = "default_rays")]
        n_rays: usize,
        /// Also bound λ₁ above by the annulus minus a radial slit.
        #[serde(default = "yes")]
        slit: bool,
    },
    /// Concentric circles of radii 1 and 1 + ε.
    ThinAnnulus { eps: Vec<f64> },
    /// Concentric circles of radii 1 and R + 1, with the ball `B(x, R/2)` as subdomain.
    GrowingAnnulus { radii: Vec<f64> },
    /// `[−4,4]×[0,4]` minus `[−3,3]×[ε,2]`.
    RectAnnulus { eps: Vec<f64> },
    /// A δ×δ cap on a neck of width `δ^neck_power` and length δ.
    Mushroom {
        delta: Vec<f64>,
        #[serde(default = "default_neck_power")]
        neck_power: f64,
    },
    /// Log cutoff around a flat boundary point, removing the half-ball of radius `b`.
    LogCutoff { b: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    /// Flux of the harmonic potential; zero when neither this nor `h` is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flux: Option<f64>,
    /// `f dr + h dt` by expressions in `r` and `t` (circle and cylinder only).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    /// `[across, around]` cell counts, ascending; `across` is ignored on circles.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub resolutions: Vec<[usize; 2]>,
    /// Cells per unit length away from refined zones, for the masked scenarios.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cells_per_unit: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_modes")]
    pub modes: usize,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    #[serde(default = "default_shift_scale")]
    pub shift_scale: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gnuplot: Option<PathBuf>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        SolverConfig {
            tol: o.tol,
            modes: 2,
            max_iter: o.max_iter,
            shift_scale: o.shift_scale,
            seed: o.seed,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> SolverOptions {
        SolverOptions {
            tol: self.tol,
            max_iter: self.max_iter,
            shift_scale: self.shift_scale,
            seed: self.seed,
            ..SolverOptions::default()
        }
    }
}

fn one() -> String {
    "1".into()
}
fn is_one(s: &str) -> bool {
    s.trim() == "1"
}
fn yes() -> bool {
    true
}
fn default_rays() -> usize {
    1024
}
fn default_neck_power() -> f64 {
    4.0
}
fn default_tol() -> f64 {
    SolverOptions::default().tol
}
fn default_modes() -> usize {
    2
}
fn default_max_iter() -> usize {
    SolverOptions::default().max_iter
}
fn default_shift_scale() -> f64 {
    SolverOptions::default().shift_scale
}
fn default_seed() -> u64 {
    SolverOptions::default().seed
}

impl DomainConfig {
    pub fn name(&self) -> &'static str {
        match self {
            DomainConfig::Circle { .. } => "circle",
            DomainConfig::Cylinder { .. } => "cylinder",
            DomainConfig::Annulus { .. } => "annulus",
            DomainConfig::ThinAnnulus { .. } => "thin_annulus",
            DomainConfig::GrowingAnnulus { .. } => "growing_annulus",
            DomainConfig::RectAnnulus { .. } => "rect_annulus",
            DomainConfig::Mushroom { .. } => "mushroom",
            DomainConfig::LogCutoff { .. } => "log_cutoff",
        }
    }
}

/// 1-based line of byte `offset`.
fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// Line on which `key` is set inside `[section]`, if it appears literally.
fn find_key(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim().to_string();
            continue;
        }
        let Some((k, _)) = line.split_once('=') else { continue };
        let k = k.trim();
        if current == section && (k == key || k.starts_with(&format!("{key}."))) {
            return Some(i + 1);
        }
    }
    None
}

fn range_error(text: &str, section: &str, key: &str, message: String) -> Error {
    let location = match find_key(text, section, key) {
        Some(line) => format!("{section}.{key} (line {line})"),
        None => format!("{section}.{key}"),
    };
    Error::config(location, message)
}

impl ScenarioConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let location = match e.span() {
                Some(span) => format!("line {}", line_of(text, span.start)),
                None => "input".into(),
            };
            Error::config(location, e.message().trim())
        })?;
        cfg.validate(text)?;
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("configuration is always representable as TOML")
    }

    /// Range checks; `text` is the source, used to locate offending keys.
    pub fn validate(&self, text: &str) -> Result<()> {
        let err = |section: &str, key: &str, message: String| Err(range_error(text, section, key, message));
        let positive_list = |key: &str, values: &[f64], upper: Option<f64>| -> Result<()> {
            if values.is_empty() {
                return err("domain", key, "list is empty".into());
            }
            for &v in values {
                if !(v > 0.0 && v.is_finite()) || upper.is_some_and(|u| v >= u) {
                    let range = match upper {
                        Some(u) => format!("(0, {u})"),
                        None => "(0, inf)".into(),
                    };
                    return err("domain", key, format!("{v} is outside {range}"));
                }
            }
            Ok(())
        };
        match &self.domain {
            DomainConfig::Circle { length, .. } => {
                if !(*length > 0.0) {
                    return err("domain", "length", format!("length must be positive, got {length}"));
                }
            }
            DomainConfig::Cylinder { a, length, .. } => {
                if !(*a > 0.0) {
                    return err("domain", "a", format!("a must be positive, got {a}"));
                }
                if !(*length > 0.0) {
                    return err("domain", "length", format!("length must be positive, got {length}"));
                }
            }
            DomainConfig::Annulus { n_rays, .. } => {
                if *n_rays < 16 {
                    return err("domain", "n_rays", format!("need at least 16 rays, got {n_rays}"));
                }
            }
            DomainConfig::ThinAnnulus { eps } => positive_list("eps", eps, Some(1.0))?,
            DomainConfig::GrowingAnnulus { radii } => positive_list("radii", radii, None)?,
            DomainConfig::RectAnnulus { eps } => positive_list("eps", eps, Some(2.0))?,
            DomainConfig::Mushroom { delta, neck_power } => {
                positive_list("delta", delta, Some(1.0))?;
                if !(*neck_power >= 1.0) {
                    return err("domain", "neck_power", format!("need neck_power >= 1, got {neck_power}"));
                }
            }
            DomainConfig::LogCutoff { b } => positive_list("b", b, Some(0.25))?,
        }
        let p = &self.potential;
        if p.flux.is_some() && (p.f.is_some() || p.h.is_some()) {
            return err("potential", "flux", "give either flux or f/h expressions, not both".into());
        }
        if p.f.is_some() && p.h.is_none() && matches!(self.domain, DomainConfig::Circle { .. }) {
            return err("potential", "f", "a circle potential is h(t) dt".into());
        }
        if (p.f.is_some() || p.h.is_some()) && !matches!(self.domain, DomainConfig::Circle { .. } | DomainConfig::Cylinder { .. }) {
            return err("potential", "h", "expressions are only supported on circles and cylinders".into());
        }
        let res = &self.grid.resolutions;
        if res.windows(2).any(|w| w[1][0] < w[0][0] || w[1][1] <= w[0][1]) {
            return err("grid", "resolutions", "resolutions must be ascending".into());
        }
        if let Some(c) = self.grid.cells_per_unit {
            if c < 4 {
                return err("grid", "cells_per_unit", format!("need at least 4 cells per unit, got {c}"));
            }
        }
        let s = &self.solver;
        if !(s.tol > 0.0 && s.tol < 1.0) {
            return err("solver", "tol", format!("tol must lie in (0, 1), got {}", s.tol));
        }
        if s.modes == 0 {
            return err("solver", "modes", "need at least one mode".into());
        }
        if s.max_iter == 0 {
            return err("solver", "max_iter", "need at least one iteration".into());
        }
        if !(s.shift_scale > 0.0 && s.shift_scale < 1.0) {
            return err("solver", "shift_scale", format!("shift_scale must lie in (0, 1), got {}", s.shift_scale));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_circle_gets_defaults() {
        let cfg = ScenarioConfig::parse("[domain]\nscenario = \"circle\"\nlength = 6.283185307179586\n").unwrap();
        assert_eq!(cfg.solver, SolverConfig::default());
        assert_eq!(cfg.solver.tol, 1e-8);
        assert_eq!(cfg.potential.flux, None);
        match cfg.domain {
            DomainConfig::Circle { ref theta, .. } => assert_eq!(theta, "1"),
            _ => panic!("wrong scenario"),
        }
    }

    #[test]
    fn negative_eps_is_a_range_error() {
        let text = "[domain]\nscenario = \"thin_annulus\"\neps = [0.1, -0.2]\n";
        match ScenarioConfig::parse(text) {
            Err(Error::Config { location, message }) => {
                assert_eq!(location, "domain.eps (line 3)");
                assert!(message.contains("-0.2"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_key_reports_its_line() {
        let text = "[domain]\nscenario = \"circle\"\nlength = 1.0\n\n[solver]\ntolerance = 1e-6\n";
        match ScenarioConfig::parse(text) {
            Err(Error::Config { location, message }) => {
                assert_eq!(location, "line 6");
                assert!(message.contains("tolerance"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        let text = "[domain]\nscenario = \"circle\"\nlength = 1.0\nwidth = 2\n";
        assert!(matches!(ScenarioConfig::parse(text), Err(Error::Config { .. })));
    }

    #[test]
    fn missing_field_is_reported() {
        let text = "[domain]\nscenario = \"cylinder\"\na = 1.0\n";
        match ScenarioConfig::parse(text) {
            Err(Error::Config { message, .. }) => assert!(message.contains("length"), "{message}"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn descending_resolutions_rejected() {
        let text = "[domain]\nscenario = \"cylinder\"\na = 1.0\nlength = 6.0\n[grid]\nresolutions = [[32, 128], [16, 64]]\n";
        match ScenarioConfig::parse(text) {
            Err(Error::Config { location, .. }) => assert_eq!(location, "grid.resolutions (line 6)"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn full_annulus_config_round_trips() {
        let text = r#"
[domain]
scenario = "annulus"
inner = { shape = "ellipse", center = [0.0, 0.0], semi_x = 1.0, semi_y = 0.7 }
outer = { shape = "rounded_rect", x0 = -3.0, x1 = 3.0, y0 = -2.5, y1 = 2.5, radius = 0.5 }
n_rays = 512
slit = false

[potential]
flux = 0.5

[grid]
resolutions = [[16, 128], [32, 256]]

[solver]
tol = 1e-9
modes = 3
seed = 7

[output]
csv = "annulus.csv"
gnuplot = "annulus.gp"
"#;
        let cfg = ScenarioConfig::parse(text).unwrap();
        let again = ScenarioConfig::parse(&cfg.to_toml()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(cfg.solver.max_iter, 500);
    }
}
