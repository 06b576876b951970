//! Experiment files (TOML), one experiment per file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bohr::{BohrFile, BohrSetSpec, SetSource, Window};
use crate::error::{Error, Result};
use crate::exact::{parse_rational, DEFAULT_PRECISION};
use crate::matgroup::{GeneratorSystem, GroupFile, RepresentationSpec};
use crate::pattern::InvariantMap;
use crate::walks::{ConvolutionOptions, WalkMeasure};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Equidistribution,
    Irreducibility,
    BohrDensity,
    Pattern,
    Surjectivity,
    Recurrence,
    Galois,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Equidistribution => "equidistribution",
            Kind::Irreducibility => "irreducibility",
            Kind::BohrDensity => "bohr-density",
            Kind::Pattern => "pattern",
            Kind::Surjectivity => "surjectivity",
            Kind::Recurrence => "recurrence",
            Kind::Galois => "galois",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WalkMode {
    Exact,
    MonteCarlo,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub precision_bits: Option<u32>,
    /// Output directory, relative to the config file.
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub equidistribution: Option<EquidistSection>,
    #[serde(default)]
    pub irreducibility: Option<IrreducibilitySection>,
    #[serde(default, rename = "bohr-density")]
    pub bohr_density: Option<DensitySection>,
    #[serde(default)]
    pub pattern: Option<PatternSection>,
    #[serde(default)]
    pub surjectivity: Option<SurjectivitySection>,
    #[serde(default)]
    pub recurrence: Option<RecurrenceSection>,
    #[serde(default)]
    pub galois: Option<GaloisSection>,
}

/// Walk spec file: group, weights per label as `"p/q"`, prune threshold, mode.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkFile {
    pub group: String,
    /// Omitted: uniform on the generators.
    #[serde(default)]
    pub weights: Option<BTreeMap<String, String>>,
    #[serde(default)]
    pub prune: Option<String>,
    #[serde(default)]
    pub atom_cap: Option<usize>,
    #[serde(default)]
    pub mode: Option<WalkMode>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EquidistSection {
    /// Path to a walk file.
    pub walk: String,
    pub chi: Vec<String>,
    pub a: Vec<i64>,
    pub n: usize,
    #[serde(default)]
    pub mode: Option<WalkMode>,
    #[serde(default)]
    pub samples: Option<usize>,
    /// Monte Carlo: the `n` values to report; exact mode reports every `n`.
    #[serde(default)]
    pub checkpoints: Option<Vec<usize>>,
    #[serde(default)]
    pub orbit_cap: Option<usize>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IrreducibilitySection {
    pub group: String,
    pub representation: RepresentationSpec,
    pub trials: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensitySection {
    pub bohr: String,
    pub n: Vec<i64>,
    #[serde(default)]
    pub offsets: Vec<Vec<i64>>,
}

/// Where the set `E` comes from.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SourceSpec {
    Bohr { bohr: String },
    Explicit { points: Vec<Vec<i64>> },
    Bernoulli { p: f64, seed: u64, lo: Vec<i64>, hi: Vec<i64> },
    Periodic { moduli: Vec<i64>, residues: Vec<Vec<i64>> },
    Full { rank: usize },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSection {
    pub psi: InvariantMap,
    pub source: SourceSpec,
    /// Explicit pattern points.
    #[serde(default)]
    pub f: Option<Vec<Vec<i64>>>,
    /// Alternatively, integers lifted through a representation of each value.
    #[serde(default)]
    pub lift: Option<Vec<i64>>,
    pub k_max: u64,
    pub b_radius: i64,
    pub e_radius: i64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurjectivitySection {
    pub psi: InvariantMap,
    pub bohr: String,
    /// Inclusive range of integer targets.
    pub targets: [i64; 2],
    pub r0: i64,
    pub doublings: u32,
    #[serde(default)]
    pub spectrum_bound: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RecurrenceSection {
    /// Bohr file supplying the system and the arcs of `U`.
    pub bohr: String,
    pub group: String,
    pub a_list: Vec<Vec<i64>>,
    pub max_length: usize,
    #[serde(default = "default_epsilon")]
    pub epsilon: String,
    /// Window radius for the density comparison; omitted skips it.
    #[serde(default)]
    pub n: Option<i64>,
    #[serde(default)]
    pub ball_cap: Option<usize>,
}

fn default_epsilon() -> String {
    "1/100".into()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GaloisSection {
    pub d: usize,
    /// Monic integer polynomials (leading coefficient first) to label.
    #[serde(default)]
    pub polys: Vec<Vec<i64>>,
    /// Random conjugations per polynomial for the invariance check.
    #[serde(default)]
    pub conjugations: usize,
    #[serde(default = "default_word_length")]
    pub word_length: usize,
    #[serde(default)]
    pub source: Option<SourceSpec>,
    #[serde(default)]
    pub b_radius: i64,
    #[serde(default)]
    pub e_radius: i64,
}

fn default_word_length() -> usize {
    8
}

/// A parsed experiment file together with the directory its references are
/// resolved against and every file it pulled in.
#[derive(Clone, Debug)]
pub struct LoadedConfig {
    pub config: ExperimentConfig,
    pub base: PathBuf,
    pub source_text: String,
    pub path: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.check_section()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<LoadedConfig> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config { file: path.display().to_string(), message: e.to_string() })?;
        let config = ExperimentConfig::parse(&text)
            .map_err(|e| Error::Config { file: path.display().to_string(), message: e.to_string() })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(LoadedConfig { config, base, source_text: text, path: Some(path.to_path_buf()) })
    }

    fn check_section(&self) -> Result<()> {
        let present = [
            (Kind::Equidistribution, self.equidistribution.is_some()),
            (Kind::Irreducibility, self.irreducibility.is_some()),
            (Kind::BohrDensity, self.bohr_density.is_some()),
            (Kind::Pattern, self.pattern.is_some()),
            (Kind::Surjectivity, self.surjectivity.is_some()),
            (Kind::Recurrence, self.recurrence.is_some()),
            (Kind::Galois, self.galois.is_some()),
        ];
        for (k, here) in present {
            if k == self.kind && !here {
                return Err(Error::Parse(format!("missing [{}] table", k.name())));
            }
            if k != self.kind && here {
                return Err(Error::Parse(format!("table [{}] does not match kind {:?}", k.name(), self.kind.name())));
            }
        }
        Ok(())
    }

    /// Whether the experiment draws random numbers from `seed`.
    pub fn is_stochastic(&self) -> bool {
        match self.kind {
            Kind::Irreducibility => true,
            Kind::Equidistribution => self.equidistribution.as_ref().is_some_and(|e| e.mode == Some(WalkMode::MonteCarlo)),
            Kind::Galois => self.galois.as_ref().is_some_and(|g| g.conjugations > 0),
            _ => false,
        }
    }
}

impl LoadedConfig {
    pub fn from_text(text: &str, base: impl Into<PathBuf>) -> Result<Self> {
        Ok(LoadedConfig { config: ExperimentConfig::parse(text)?, base: base.into(), source_text: text.into(), path: None })
    }

    pub fn precision(&self) -> u32 {
        self.config.precision_bits.unwrap_or(DEFAULT_PRECISION)
    }

    fn path_of(&self, reference: &str) -> PathBuf {
        self.base.join(reference)
    }

    fn read(&self, reference: &str) -> Result<(PathBuf, String)> {
        let p = self.path_of(reference);
        let text = std::fs::read_to_string(&p)
            .map_err(|e| Error::Config { file: p.display().to_string(), message: e.to_string() })?;
        Ok((p, text))
    }

    /// Shipped group name (`sl2z`, `sl3z`, `berggren`) or a group file path.
    pub fn group(&self, reference: &str, deps: &mut Vec<String>) -> Result<GeneratorSystem> {
        if let Some(g) = GeneratorSystem::shipped(reference) {
            return Ok(g);
        }
        let (p, text) = self.read(reference)?;
        deps.push(text.clone());
        GroupFile::parse(&text)
            .and_then(|f| f.build())
            .map_err(|e| Error::Config { file: p.display().to_string(), message: e.to_string() })
    }

    /// Shipped Bohr set (`golden-arc`, `golden-cube`, `two-frequency-arc`) or a Bohr file path.
    pub fn bohr(&self, reference: &str, deps: &mut Vec<String>) -> Result<BohrSetSpec> {
        match reference {
            "golden-arc" => return Ok(BohrSetSpec::golden_arc()),
            "golden-cube" => return Ok(BohrSetSpec::golden_cube()),
            "two-frequency-arc" => return Ok(two_frequency_arc()),
            _ => {}
        }
        let (p, text) = self.read(reference)?;
        deps.push(text.clone());
        BohrFile::parse(&text)
            .and_then(|f| f.build(self.config.precision_bits))
            .map_err(|e| Error::Config { file: p.display().to_string(), message: e.to_string() })
    }

    pub fn walk(&self, reference: &str, deps: &mut Vec<String>) -> Result<(GeneratorSystem, WalkMeasure, ConvolutionOptions, Option<WalkMode>)> {
        let (p, text) = self.read(reference)?;
        deps.push(text.clone());
        let wrap = |e: Error| Error::Config { file: p.display().to_string(), message: e.to_string() };
        let file: WalkFile = toml::from_str(&text).map_err(|e| wrap(Error::Parse(e.to_string())))?;
        // group references inside a walk file resolve against the walk file
        let nested = LoadedConfig {
            config: self.config.clone(),
            base: p.parent().map(Path::to_path_buf).unwrap_or_default(),
            source_text: String::new(),
            path: None,
        };
        let gens = nested.group(&file.group, deps)?;
        let mu = match &file.weights {
            Some(w) => WalkMeasure::from_labels(&gens, w).map_err(wrap)?,
            None => WalkMeasure::uniform(&gens),
        };
        let mut opts = ConvolutionOptions::default();
        if let Some(pr) = &file.prune {
            opts.prune = parse_rational(pr).map_err(wrap)?;
        }
        if let Some(cap) = file.atom_cap {
            opts.atom_cap = cap;
        }
        Ok((gens, mu, opts, file.mode))
    }

    pub fn source(&self, spec: &SourceSpec, deps: &mut Vec<String>) -> Result<SetSource> {
        match spec {
            SourceSpec::Bohr { bohr } => Ok(SetSource::Bohr(self.bohr(bohr, deps)?)),
            SourceSpec::Explicit { points } => SetSource::explicit(points.clone()),
            SourceSpec::Bernoulli { p, seed, lo, hi } => SetSource::bernoulli(*p, *seed, Window::new(lo.clone(), hi.clone())?),
            SourceSpec::Periodic { moduli, residues } => SetSource::periodic(moduli.clone(), residues.clone()),
            SourceSpec::Full { rank } => Ok(SetSource::Full { rank: *rank }),
        }
    }
}

/// Two-frequency system `a_1 alpha + a_2 beta` with the centered arc of radius 3/20.
pub fn two_frequency_arc() -> BohrSetSpec {
    use crate::bohr::{Arc, KroneckerSystem};
    BohrSetSpec::new(KroneckerSystem::two_frequency(), vec![Arc::centered(crate::exact::rat(3, 20)).unwrap()]).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_field_is_reported_with_location() {
        let text = "kind = \"bohr-density\"\n[bohr-density]\nbohr = \"golden-arc\"\nn = [10]\nradius = 3\n";
        let err = ExperimentConfig::parse(text).unwrap_err().to_string();
        assert!(err.contains("radius") && err.contains("line 5"), "{err}");
    }

    #[test]
    fn kind_must_match_table() {
        let text = "kind = \"galois\"\n[bohr-density]\nbohr = \"golden-arc\"\nn = [10]\n";
        assert!(ExperimentConfig::parse(text).is_err());
    }

    #[test]
    fn source_specs_parse() {
        let text = r#"
kind = "pattern"
[pattern]
psi = { kind = "quadratic_form", mu = [1, 1], lambda = [1] }
source = { type = "bernoulli", p = 0.5, seed = 3, lo = [-5, -5, -5], hi = [5, 5, 5] }
lift = [-3, 3]
k_max = 2
b_radius = 2
e_radius = 6
"#;
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert!(matches!(cfg.pattern.unwrap().source, SourceSpec::Bernoulli { seed: 3, .. }));
    }
}
