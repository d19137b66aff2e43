//! The `homfinsler-space/1` TOML format.
//!
//! ```toml
//! format = "homfinsler-space/1"
//! name = "su2-negative"
//! labels = ["e1", "e2", "e3"]
//! structure = [[0, 1, 2, 1.0], [0, 2, 1, -1.0], [1, 2, 0, 1.0]]
//! gram = [[1.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 1.0]]
//!
//! [dims]
//! h = 0
//! m1 = 2
//! m2 = 1
//!
//! [norm]
//! family = "quartic-mean"
//! params = [1.0]
//! ```
//!
//! `structure` lists `[i, j, k, c]` meaning `c` is the coefficient of `e_k`
//! in `[e_i, e_j]`; antisymmetric partners are implied. Indices run over the
//! basis `(h | m₁ | m₂)`. Unknown keys are rejected.

use std::path::Path;

use homfinsler_core::catalog::Fixture;
use homfinsler_core::{DMatrix, Dims, InnerProduct, LieData, NormFamily, ReductiveData, Tolerances};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const FORMAT: &str = "homfinsler-space/1";

#[derive(Debug, Error)]
pub enum SpaceFileError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("unsupported format {found:?}; expected {FORMAT:?}")]
    Format { found: String },
    #[error("structure entry {index}: {reason}")]
    Structure { index: usize, reason: String },
    #[error("gram: {0}")]
    Gram(String),
    #[error("{0} labels given for {1} basis vectors")]
    Labels(usize, usize),
    #[error(transparent)]
    Lie(#[from] homfinsler_core::lie_core::LieError),
    #[error(transparent)]
    Norm(#[from] homfinsler_core::norms::NormError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimsSpec {
    pub h: usize,
    pub m1: usize,
    pub m2: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormSpec {
    pub family: String,
    #[serde(default)]
    pub params: Vec<f64>,
}

/// Optional per-file overrides of [`Tolerances`].
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TolerancesSpec {
    pub structure: Option<f64>,
    pub nr: Option<f64>,
    pub xcheck: Option<f64>,
    pub s_vanish: Option<f64>,
    pub e_vanish: Option<f64>,
    pub eps_sing: Option<f64>,
    pub convexity: Option<f64>,
}

impl TolerancesSpec {
    pub fn apply(&self, base: Tolerances) -> Tolerances {
        Tolerances {
            structure: self.structure.unwrap_or(base.structure),
            nr: self.nr.unwrap_or(base.nr),
            xcheck: self.xcheck.unwrap_or(base.xcheck),
            s_vanish: self.s_vanish.unwrap_or(base.s_vanish),
            e_vanish: self.e_vanish.unwrap_or(base.e_vanish),
            eps_sing: self.eps_sing.unwrap_or(base.eps_sing),
            convexity: self.convexity.unwrap_or(base.convexity),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceFile {
    pub format: String,
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub labels: Vec<String>,
    #[serde(default)]
    pub structure: Vec<(usize, usize, usize, f64)>,
    pub gram: Vec<Vec<f64>>,
    pub dims: DimsSpec,
    pub norm: NormSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerances: Option<TolerancesSpec>,
}

/// A parsed file turned into core types.
#[derive(Debug, Clone)]
pub struct LoadedSpace {
    pub name: String,
    pub data: ReductiveData,
    pub family: NormFamily,
    pub tolerances: TolerancesSpec,
}

fn index(value: usize, entry: usize, total: usize) -> Result<usize, SpaceFileError> {
    if value >= total {
        return Err(SpaceFileError::Structure { index: entry, reason: format!("index {value} is not in 0..{total}") });
    }
    Ok(value)
}

impl SpaceFile {
    pub fn parse(text: &str) -> Result<Self, SpaceFileError> {
        let file: SpaceFile = toml::from_str(text).map_err(|e| SpaceFileError::Parse(e.to_string()))?;
        if file.format != FORMAT {
            return Err(SpaceFileError::Format { found: file.format });
        }
        Ok(file)
    }

    pub fn read(path: &Path) -> Result<Self, SpaceFileError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| SpaceFileError::Io { path: path.display().to_string(), source })?;
        Self::parse(&text).map_err(|e| match e {
            SpaceFileError::Parse(msg) => SpaceFileError::Parse(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("space files always serialize")
    }

    /// Canonical description of in-memory data.
    pub fn from_data(name: &str, data: &ReductiveData, family: &NormFamily) -> Self {
        let d = data.dims();
        let gram = data.ip.gram();
        Self {
            format: FORMAT.to_string(),
            name: name.to_string(),
            labels: Vec::new(),
            structure: data.lie.canonical_triples(),
            gram: (0..gram.nrows()).map(|r| gram.row(r).iter().cloned().collect()).collect(),
            dims: DimsSpec { h: d.h, m1: d.m1, m2: d.m2 },
            norm: NormSpec { family: family.name().to_string(), params: family.params() },
            tolerances: None,
        }
    }

    pub fn from_fixture(fixture: Fixture, family: &NormFamily) -> Self {
        Self::from_data(fixture.name(), &fixture.data(), family)
    }

    /// Builds core types. Only shapes and indices are validated here; the
    /// algebraic audit is left to the caller so that it can be reported.
    pub fn load(&self) -> Result<LoadedSpace, SpaceFileError> {
        let dims = Dims::new(self.dims.h, self.dims.m1, self.dims.m2);
        let total = dims.total();
        if !self.labels.is_empty() && self.labels.len() != total {
            return Err(SpaceFileError::Labels(self.labels.len(), total));
        }
        let mut triples = Vec::with_capacity(self.structure.len());
        for (entry, &(i, j, k, c)) in self.structure.iter().enumerate() {
            triples.push((index(i, entry, total)?, index(j, entry, total)?, index(k, entry, total)?, c));
        }
        let lie = LieData::new(dims, &triples)?;
        let n = dims.n();
        if self.gram.len() != n || self.gram.iter().any(|row| row.len() != n) {
            return Err(SpaceFileError::Gram(format!("expected {n}x{n} rows for m")));
        }
        let gram = DMatrix::from_fn(n, n, |r, c| self.gram[r][c]);
        let ip = InnerProduct::new(gram, dims.m1, dims.m2)?;
        let data = ReductiveData::new(lie, ip)?;
        let family = NormFamily::from_name(&self.norm.family, &self.norm.params)?;
        Ok(LoadedSpace {
            name: self.name.clone(),
            data,
            family,
            tolerances: self.tolerances.clone().unwrap_or_default(),
        })
    }
}
