use std::path::Path;

use serde::{Deserialize, Serialize};

use super::kronecker::KroneckerSystem;
use super::set::{product_bohr, Arc, BohrSetSpec};
use crate::error::{Error, Result};
use crate::exact::{format_rational, parse_rational, Coord, DEFAULT_PRECISION};

/// On-disk Bohr set description.
///
/// ```toml
/// name = "golden-arc"
/// tau = [["golden"]]          # one row per torus coordinate
/// arcs = [{ center = "0", radius = "3/20" }]
/// power = 3                   # optional: E x E x E
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BohrFile {
    #[serde(default)]
    pub name: String,
    pub tau: Vec<Vec<String>>,
    pub arcs: Vec<ArcEntry>,
    #[serde(default)]
    pub precision: Option<u32>,
    #[serde(default)]
    pub power: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArcEntry {
    #[serde(default = "zero_string")]
    pub center: String,
    pub radius: String,
}

fn zero_string() -> String {
    "0".into()
}

impl BohrFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        BohrFile::parse(&text).map_err(|e| Error::Config { file: path.display().to_string(), message: e.to_string() })
    }

    pub fn build(&self, default_precision: Option<u32>) -> Result<BohrSetSpec> {
        let prec = self.precision.or(default_precision).unwrap_or(DEFAULT_PRECISION);
        let tau = self
            .tau
            .iter()
            .map(|row| row.iter().map(|s| Coord::parse(s, prec)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc::new(parse_rational(&a.center)?, parse_rational(&a.radius)?))
            .collect::<Result<Vec<_>>>()?;
        let base = BohrSetSpec::new(KroneckerSystem::new(tau, prec)?, arcs)?;
        match self.power {
            None | Some(1) => Ok(base),
            Some(0) => Err(Error::invalid("power must be at least 1")),
            Some(k) => product_bohr(&vec![&base; k]),
        }
    }

    pub fn golden_arc() -> Self {
        BohrFile {
            name: "golden-arc".into(),
            tau: vec![vec!["golden".into()]],
            arcs: vec![ArcEntry { center: "0".into(), radius: format_rational(&crate::exact::rat(3, 20)) }],
            precision: None,
            power: None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bohr::Membership;

    #[test]
    fn golden_cube_from_text() {
        let f = BohrFile::parse(
            r#"
name = "cube"
tau = [["golden"]]
arcs = [{ center = "0", radius = "3/20" }]
power = 3
"#,
        )
        .unwrap();
        let e = f.build(None).unwrap();
        assert_eq!(e.rank(), 3);
        assert_eq!(e.member(&[5, 8, 13]).unwrap(), Membership::In);
    }

    #[test]
    fn unknown_field_is_rejected() {
        assert!(BohrFile::parse("tau = [[\"golden\"]]\narcs = []\nradius = 3").is_err());
    }

    #[test]
    fn builtin_matches_shipped_spec() {
        let e = BohrFile::golden_arc().build(None).unwrap();
        assert_eq!(e.arcs(), BohrSetSpec::golden_arc().arcs());
    }
}
