//! Scenario files: TOML with `[space]`, `[potential]`, `[cells]`,
//! `[lambda]`, `[t]`, `[weyl]`, `[tolerances]` and `[output]` sections.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {source}")]
    Parse { path: PathBuf, source: toml::de::Error },
    #[error("invalid scenario: {0}")]
    Invalid(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Builder {
    /// Sierpinski-gasket blow-up along `word`, `size` generations.
    Blowup,
    /// SG ladder of `size` cells.
    Ladder,
    /// Hexagonal SG field of radius `size`.
    Hexagonal,
    /// Triangular-lattice SG field of radius `size`.
    Trifield,
    /// Half-line `[0, size]` cut into unit intervals.
    Interval,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Space {
    pub builder: Builder,
    pub size: usize,
    /// Refinement level `m` of the graph approximation.
    #[serde(default)]
    pub level: u32,
    /// Blow-up letters, repeated as needed.
    #[serde(default)]
    pub word: Vec<u8>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Euclidean,
    CellGraph,
    Resistance,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PotentialKind {
    /// `c·d(0,x)^β`.
    Power,
    /// `c·(D·hops)^β`, constant on each cell.
    CellConstant,
    /// Discrete solution of `ΔV = 1`.
    Harmonic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Potential {
    pub kind: PotentialKind,
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "two")]
    pub beta: f64,
    #[serde(default = "default_metric")]
    pub metric: Metric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellKind {
    /// Level-`m` graph spectra, the exact companions of the assembled
    /// operators.
    Graph,
    /// Continuum spectra (decimation or analytic), capped.
    Continuum,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cells {
    pub model: CellKind,
    /// Spectrum cap for continuum models; derived from the grids if absent.
    #[serde(default)]
    pub cap: Option<f64>,
}

/// Geometric grid of `points` values on `[min, max]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        bohr_core::fit::geometric_grid(self.min, self.max, self.points)
    }

    fn check(&self, what: &str) -> Result<(), ConfigError> {
        if !(self.min > 0.0 && self.max > self.min && self.max.is_finite()) || self.points < 2 {
            return Err(ConfigError::Invalid(format!("{what} grid needs 0 < min < max and at least two points")));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LambdaGrid {
    pub min: f64,
    pub max: f64,
    pub points: usize,
    /// Also count eigenvalues of the glued operator.
    #[serde(default)]
    pub direct: bool,
}

impl LambdaGrid {
    pub fn grid(&self) -> Grid {
        Grid { min: self.min, max: self.max, points: self.points }
    }
}

/// Empirical SG Weyl function: folds of the cell spectra below `cap`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Weyl {
    #[serde(default = "weyl_cap")]
    pub cap: f64,
    #[serde(default = "three")]
    pub periods: usize,
    #[serde(default = "two_usize")]
    pub averaged: usize,
    #[serde(default = "weyl_points")]
    pub points: usize,
}

impl Default for Weyl {
    fn default() -> Self {
        Weyl { cap: weyl_cap(), periods: 3, averaged: 2, points: weyl_points() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Relative tolerance of the layer-cake quadrature.
    #[serde(default = "layercake_tol")]
    pub layercake: f64,
    /// Largest operator dimension for dense spectra.
    #[serde(default = "dense_cap")]
    pub dense_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { layercake: layercake_tol(), dense_cap: dense_cap() }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    #[serde(default)]
    pub description: String,
    pub space: Space,
    pub potential: Potential,
    pub cells: Cells,
    pub lambda: LambdaGrid,
    #[serde(default)]
    pub t: Option<Grid>,
    #[serde(default)]
    pub weyl: Weyl,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub output: Output,
}

fn one() -> f64 {
    1.0
}
fn two() -> f64 {
    2.0
}
fn three() -> usize {
    3
}
fn two_usize() -> usize {
    2
}
fn default_metric() -> Metric {
    Metric::CellGraph
}
fn weyl_cap() -> f64 {
    3.0 * 5f64.powi(10)
}
fn weyl_points() -> usize {
    2048
}
fn layercake_tol() -> f64 {
    1e-7
}
fn dense_cap() -> usize {
    bohr_core::operator::DEFAULT_DENSE_CAP
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io { path: path.into(), source })?;
        let s: Scenario = toml::from_str(&text).map_err(|source| ConfigError::Parse { path: path.into(), source })?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let s: Scenario =
            toml::from_str(text).map_err(|source| ConfigError::Parse { path: PathBuf::from("<string>"), source })?;
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: &str| Err(ConfigError::Invalid(m.into()));
        if self.name.is_empty() || !self.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return bad("name must be a non-empty identifier");
        }
        if self.space.builder == Builder::Blowup && self.space.word.is_empty() {
            return bad("blow-up needs a word");
        }
        if self.space.builder == Builder::Interval && self.space.size == 0 {
            return bad("interval lattice needs at least one cell");
        }
        if self.space.level > 12 {
            return bad("refinement level above 12 is not supported");
        }
        if !(self.potential.c > 0.0 && self.potential.beta > 0.0) {
            return bad("potential needs c > 0 and beta > 0");
        }
        if self.space.builder == Builder::Interval && self.potential.metric == Metric::Resistance {
            return bad("use the euclidean metric on the interval lattice");
        }
        self.lambda.grid().check("lambda")?;
        if let Some(t) = &self.t {
            t.check("t")?;
        }
        if self.lambda.direct && self.cells.model != CellKind::Graph {
            return bad("direct counts need graph cell models, which bracket the assembled operator exactly");
        }
        if let Some(cap) = self.cells.cap {
            if !(cap > 0.0) {
                return bad("cell cap must be positive");
            }
        }
        if !(self.weyl.cap > 0.0) || self.weyl.periods < 3 || self.weyl.averaged == 0 || self.weyl.points < 16 {
            return bad("weyl needs cap > 0, periods >= 3, averaged >= 1, points >= 16");
        }
        if !(self.tolerances.layercake > 0.0) || self.tolerances.dense_cap == 0 {
            return bad("tolerances must be positive");
        }
        Ok(())
    }

    /// SHA-256 of the canonical serialization, output directory excluded.
    pub fn hash(&self) -> String {
        let mut canon = self.clone();
        canon.output = Output::default();
        let json = serde_json::to_string(&canon).expect("scenario serializes");
        Sha256::digest(json.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn is_sg(&self) -> bool {
        self.space.builder != Builder::Interval
    }

    /// Continuum cap: the given one, or enough for the λ grid and for
    /// `tΛ ≥ 40` at the smallest t.
    pub fn continuum_cap(&self) -> f64 {
        if let Some(cap) = self.cells.cap {
            return cap;
        }
        let mut cap = 1.01 * self.lambda.max;
        if let Some(t) = &self.t {
            cap = cap.max(1.01 * bohr_core::trace::MIN_T_CAP / t.min);
        }
        cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
name = "sample"
[space]
builder = "interval"
size = 10
level = 3
[potential]
kind = "power"
metric = "euclidean"
[cells]
model = "graph"
[lambda]
min = 1.0
max = 10.0
points = 5
direct = true
"#;

    #[test]
    fn parses_with_defaults() {
        let s = Scenario::from_toml(SAMPLE).unwrap();
        assert_eq!(s.potential.beta, 2.0);
        assert_eq!(s.weyl, Weyl::default());
        assert_eq!(s.lambda.grid().values().len(), 5);
        assert_eq!(s.hash().len(), 64);
    }

    #[test]
    fn hash_ignores_output_dir_only() {
        let a = Scenario::from_toml(SAMPLE).unwrap();
        let mut b = a.clone();
        b.output.dir = Some("elsewhere".into());
        assert_eq!(a.hash(), b.hash());
        b.lambda.max = 11.0;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn rejects_direct_with_continuum_cells() {
        let text = SAMPLE.replace("model = \"graph\"", "model = \"continuum\"");
        assert!(matches!(Scenario::from_toml(&text), Err(ConfigError::Invalid(_))));
    }

    #[test]
    fn rejects_bad_grid_and_unknown_keys() {
        assert!(Scenario::from_toml(&SAMPLE.replace("min = 1.0", "min = 20.0")).is_err());
        assert!(matches!(Scenario::from_toml(&SAMPLE.replace("level = 3", "level = 3\nfoo = 1")), Err(ConfigError::Parse { .. })));
    }

    #[test]
    fn continuum_cap_covers_grids() {
        let mut s = Scenario::from_toml(SAMPLE).unwrap();
        s.t = Some(Grid { min: 0.01, max: 1.0, points: 4 });
        assert!(s.continuum_cap() >= 4000.0);
    }
}
