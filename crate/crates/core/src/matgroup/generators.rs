use std::collections::HashMap;
use std::path::Path;

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::lattice::LatticeMatrix;
use crate::error::{Error, Result};

/// A word in the generators, read as the left-to-right product
/// `g[w0] * g[w1] * ...`.
pub type Word = Vec<usize>;

/// Finite symmetric generating set of a subgroup of `GL_N(Z)`.
#[derive(Clone, Debug)]
pub struct GeneratorSystem {
    name: String,
    dim: usize,
    labels: Vec<String>,
    matrices: Vec<LatticeMatrix>,
    inverse: Vec<usize>,
    form: Option<DiagonalForm>,
}

/// `diag(mu_1, .., mu_p, -lambda_1, .., -lambda_q)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalForm {
    pub mu: Vec<i64>,
    pub lambda: Vec<i64>,
}

impl DiagonalForm {
    pub fn new(mu: Vec<i64>, lambda: Vec<i64>) -> Result<Self> {
        if mu.iter().chain(&lambda).any(|&c| c <= 0) {
            return Err(Error::invalid("form coefficients must be positive integers"));
        }
        Ok(DiagonalForm { mu, lambda })
    }

    pub fn dim(&self) -> usize {
        self.mu.len() + self.lambda.len()
    }

    pub fn diagonal(&self) -> Vec<i64> {
        self.mu.iter().copied().chain(self.lambda.iter().map(|&l| -l)).collect()
    }

    pub fn gram(&self) -> LatticeMatrix {
        let d = self.diagonal();
        let mut g = LatticeMatrix::zero(d.len());
        for (i, c) in d.into_iter().enumerate() {
            g.set(i, i, BigInt::from(c));
        }
        g
    }
}

impl GeneratorSystem {
    /// Builds a system from `(label, matrix, inverse_label)` triples. Every
    /// matrix must be unimodular and every inverse pair must multiply to the
    /// identity.
    pub fn new(
        name: impl Into<String>,
        gens: Vec<(String, LatticeMatrix, String)>,
    ) -> Result<Self> {
        if gens.is_empty() {
            return Err(Error::invalid("generator system needs at least one generator"));
        }
        let dim = gens[0].1.dim();
        let index: HashMap<&str, usize> =
            gens.iter().enumerate().map(|(i, g)| (g.0.as_str(), i)).collect();
        if index.len() != gens.len() {
            return Err(Error::invalid("duplicate generator labels"));
        }
        let mut inverse = Vec::with_capacity(gens.len());
        for (label, m, inv) in &gens {
            if m.dim() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: m.dim() });
            }
            if !m.is_unimodular() {
                return Err(Error::invalid(format!("generator {label} is not invertible over Z")));
            }
            let j = *index
                .get(inv.as_str())
                .ok_or_else(|| Error::invalid(format!("inverse label {inv} of {label} missing")))?;
            if !m.mul(&gens[j].1).is_identity() {
                return Err(Error::invalid(format!("{label} * {inv} is not the identity")));
            }
            inverse.push(j);
        }
        let (labels, matrices) = gens.into_iter().map(|(l, m, _)| (l, m)).unzip();
        Ok(GeneratorSystem { name: name.into(), dim, labels, matrices, inverse, form: None })
    }

    /// Adds `label^-1` for every matrix (self-paired when `g = g^-1`).
    pub fn with_inverses(name: impl Into<String>, gens: Vec<(&str, LatticeMatrix)>) -> Result<Self> {
        let mut all = Vec::new();
        for (label, m) in gens {
            let inv = m.inverse()?;
            if inv == m {
                all.push((label.to_string(), m, label.to_string()));
            } else {
                let inv_label = format!("{label}^-1");
                all.push((label.to_string(), m, inv_label.clone()));
                all.push((inv_label, inv, label.to_string()));
            }
        }
        GeneratorSystem::new(name, all)
    }

    pub fn with_form(mut self, form: DiagonalForm) -> Result<Self> {
        if form.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: form.dim() });
        }
        for (l, m) in self.labels.iter().zip(&self.matrices) {
            if !super::rep::check_form_preserved(m, &form)? {
                return Err(Error::invalid(format!("generator {l} does not preserve the form")));
            }
        }
        self.form = Some(form);
        Ok(self)
    }

    /// `SL_2(Z)` generated by `S = [[0,-1],[1,0]]` and `T = [[1,1],[0,1]]`.
    pub fn sl2z() -> Self {
        let s = LatticeMatrix::from_rows(&[[0, -1], [1, 0]]).unwrap();
        let t = LatticeMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap();
        GeneratorSystem::with_inverses("SL2(Z)", vec![("S", s), ("T", t)]).unwrap()
    }

    /// `SL_d(Z)` generated by the elementary matrices `I + e_ij`, `i != j`.
    pub fn sl_elementary(d: usize) -> Self {
        let mut gens = Vec::new();
        let mut labels = Vec::new();
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    labels.push(format!("E{}{}", i + 1, j + 1));
                    gens.push(LatticeMatrix::identity(d).add(&LatticeMatrix::unit(d, i, j)));
                }
            }
        }
        let pairs = labels.iter().map(String::as_str).zip(gens).collect();
        GeneratorSystem::with_inverses(format!("SL{d}(Z)"), pairs).unwrap()
    }

    /// The Berggren matrices, which preserve `x^2 + y^2 - z^2`.
    pub fn berggren() -> Self {
        let b1 = LatticeMatrix::from_rows(&[[1, -2, 2], [2, -1, 2], [2, -2, 3]]).unwrap();
        let b2 = LatticeMatrix::from_rows(&[[1, 2, 2], [2, 1, 2], [2, 2, 3]]).unwrap();
        let b3 = LatticeMatrix::from_rows(&[[-1, 2, 2], [-2, 1, 2], [-2, 2, 3]]).unwrap();
        GeneratorSystem::with_inverses("Berggren", vec![("B1", b1), ("B2", b2), ("B3", b3)])
            .unwrap()
            .with_form(DiagonalForm::new(vec![1, 1], vec![1]).unwrap())
            .unwrap()
    }

    pub fn trivial(dim: usize) -> Self {
        GeneratorSystem::new("trivial", vec![("I".into(), LatticeMatrix::identity(dim), "I".into())])
            .unwrap()
    }

    /// Looks up a shipped group by name.
    pub fn shipped(name: &str) -> Option<Self> {
        match name.to_ascii_lowercase().as_str() {
            "sl2z" | "sl2" => Some(GeneratorSystem::sl2z()),
            "sl3z" | "sl3" => Some(GeneratorSystem::sl_elementary(3)),
            "berggren" => Some(GeneratorSystem::berggren()),
            _ => None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn matrices(&self) -> &[LatticeMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, i: usize) -> &LatticeMatrix {
        &self.matrices[i]
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn form(&self) -> Option<&DiagonalForm> {
        self.form.as_ref()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn evaluate(&self, word: &[usize]) -> LatticeMatrix {
        word.iter()
            .fold(LatticeMatrix::identity(self.dim), |acc, &g| acc.mul(&self.matrices[g]))
    }

    pub fn format_word(&self, word: &[usize]) -> String {
        if word.is_empty() {
            return "e".into();
        }
        word.iter().map(|&g| self.labels[g].as_str()).collect::<Vec<_>>().join(" ")
    }

    pub fn random_word<R: Rng>(&self, len: usize, rng: &mut R) -> Word {
        (0..len).map(|_| rng.gen_range(0..self.len())).collect()
    }
}

/// On-disk group definition (TOML).
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub dimension: usize,
    pub generators: Vec<GeneratorEntry>,
    #[serde(default)]
    pub form: Option<DiagonalForm>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GeneratorEntry {
    pub label: String,
    pub matrix: Vec<Vec<i64>>,
    /// Label of the inverse generator. When absent, the inverse is computed
    /// and added as `label^-1`.
    #[serde(default)]
    pub inverse: Option<String>,
}

impl GroupFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config {
            file: path.display().to_string(),
            message: e.to_string(),
        })
    }

    pub fn build(&self) -> Result<GeneratorSystem> {
        let mut gens = Vec::new();
        for g in &self.generators {
            let m = LatticeMatrix::from_rows(&g.matrix)?;
            if m.dim() != self.dimension {
                return Err(Error::DimensionMismatch { expected: self.dimension, got: m.dim() });
            }
            match &g.inverse {
                Some(inv) => gens.push((g.label.clone(), m, inv.clone())),
                None => {
                    let inv = m.inverse()?;
                    if inv == m {
                        gens.push((g.label.clone(), m, g.label.clone()));
                    } else {
                        let l = format!("{}^-1", g.label);
                        gens.push((g.label.clone(), m, l.clone()));
                        gens.push((l, inv, g.label.clone()));
                    }
                }
            }
        }
        let system = GeneratorSystem::new(self.name.clone(), gens)?;
        match &self.form {
            Some(f) => system.with_form(f.clone()),
            None => Ok(system),
        }
    }

    pub fn from_system(system: &GeneratorSystem) -> Self {
        GroupFile {
            name: system.name.clone(),
            dimension: system.dim,
            generators: system
                .labels
                .iter()
                .zip(&system.matrices)
                .enumerate()
                .map(|(i, (l, m))| GeneratorEntry {
                    label: l.clone(),
                    matrix: m.to_i64_rows().expect("shipped generators fit in i64"),
                    inverse: Some(system.labels[system.inverse[i]].clone()),
                })
                .collect(),
            form: system.form.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_systems_are_inverse_closed() {
        for g in [
            GeneratorSystem::sl2z(),
            GeneratorSystem::sl_elementary(3),
            GeneratorSystem::berggren(),
        ] {
            for i in 0..g.len() {
                assert!(g.matrix(i).mul(g.matrix(g.inverse_of(i))).is_identity());
            }
        }
        assert_eq!(GeneratorSystem::sl2z().len(), 4);
        assert_eq!(GeneratorSystem::sl_elementary(3).len(), 12);
        assert_eq!(GeneratorSystem::berggren().len(), 6);
    }

    #[test]
    fn group_file_round_trip() {
        let text = r#"
name = "modular"
dimension = 2

[[generators]]
label = "S"
matrix = [[0, -1], [1, 0]]

[[generators]]
label = "T"
matrix = [[1, 1], [0, 1]]
inverse = "Tinv"

[[generators]]
label = "Tinv"
matrix = [[1, -1], [0, 1]]
inverse = "T"
"#;
        let g = GroupFile::parse(text).unwrap().build().unwrap();
        assert_eq!(g.len(), 4);
        let again = GroupFile::parse(&toml::to_string(&GroupFile::from_system(&g)).unwrap())
            .unwrap()
            .build()
            .unwrap();
        assert_eq!(again.matrices(), g.matrices());
    }

    #[test]
    fn bad_inverse_pair_is_rejected() {
        let t = LatticeMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap();
        let r = GeneratorSystem::new("bad", vec![("T".into(), t, "T".into())]);
        assert!(r.is_err());
    }

    #[test]
    fn non_preserving_form_is_rejected() {
        let t = LatticeMatrix::from_rows(&[[1, 1], [0, 1]]).unwrap();
        let g = GeneratorSystem::with_inverses("t", vec![("T", t)]).unwrap();
        assert!(g.with_form(DiagonalForm::new(vec![1], vec![1]).unwrap()).is_err());
    }
}
