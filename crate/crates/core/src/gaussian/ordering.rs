use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Quadrature {
    X,
    P,
}

/// One quadrature of one named mode, displayed as `x_A1` / `p_B2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuadLabel {
    pub mode: String,
    pub quadrature: Quadrature,
}

impl QuadLabel {
    pub fn x(mode: &str) -> Self {
        Self {
            mode: mode.to_owned(),
            quadrature: Quadrature::X,
        }
    }

    pub fn p(mode: &str) -> Self {
        Self {
            mode: mode.to_owned(),
            quadrature: Quadrature::P,
        }
    }
}

impl fmt::Display for QuadLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let q = match self.quadrature {
            Quadrature::X => 'x',
            Quadrature::P => 'p',
        };
        write!(f, "{q}_{}", self.mode)
    }
}

impl FromStr for QuadLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (q, mode) = s
            .split_once('_')
            .ok_or_else(|| Error::UnknownLabel(s.to_owned()))?;
        if mode.is_empty() {
            return Err(Error::UnknownLabel(s.to_owned()));
        }
        match q {
            "x" => Ok(QuadLabel::x(mode)),
            "p" => Ok(QuadLabel::p(mode)),
            _ => Err(Error::UnknownLabel(s.to_owned())),
        }
    }
}

impl Serialize for QuadLabel {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QuadLabel {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Ordered list of quadrature labels indexing a covariance matrix.
///
/// A full ordering lists every mode as an adjacent `(x, p)` pair. A reduced
/// ordering is an arbitrary selection of distinct labels, as produced by
/// keeping only the homodyned quadratures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadratureOrdering {
    labels: Vec<QuadLabel>,
    reduced: bool,
}

impl QuadratureOrdering {
    /// Full xp-interleaved ordering over the given modes.
    pub fn modes(modes: &[&str]) -> Result<Self> {
        let labels = modes
            .iter()
            .flat_map(|m| [QuadLabel::x(m), QuadLabel::p(m)])
            .collect();
        Self::full(labels)
    }

    /// Full ordering from explicit labels; must be `(x, p)` pairs per mode.
    pub fn full(labels: Vec<QuadLabel>) -> Result<Self> {
        ensure_unique(&labels)?;
        if !labels.len().is_multiple_of(2) {
            return Err(Error::InvalidOrdering(
                "full ordering must have an even number of labels".into(),
            ));
        }
        for pair in labels.chunks(2) {
            let ok = pair[0].quadrature == Quadrature::X
                && pair[1].quadrature == Quadrature::P
                && pair[0].mode == pair[1].mode;
            if !ok {
                return Err(Error::InvalidOrdering(format!(
                    "expected (x, p) pair for one mode, found ({}, {})",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self {
            labels,
            reduced: false,
        })
    }

    pub fn reduced(labels: Vec<QuadLabel>) -> Result<Self> {
        ensure_unique(&labels)?;
        Ok(Self {
            labels,
            reduced: true,
        })
    }

    pub fn labels(&self) -> &[QuadLabel] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// Number of modes; only meaningful for full orderings.
    pub fn mode_count(&self) -> usize {
        self.labels.len() / 2
    }

    /// Mode names in order of first appearance.
    pub fn mode_names(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.labels
            .iter()
            .filter(|l| seen.insert(l.mode.as_str()))
            .map(|l| l.mode.as_str())
            .collect()
    }

    pub fn position(&self, label: &QuadLabel) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Concatenation; fails if the two orderings share a mode name.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mine: HashSet<&str> = self.labels.iter().map(|l| l.mode.as_str()).collect();
        if let Some(clash) = other.labels.iter().find(|l| mine.contains(l.mode.as_str())) {
            return Err(Error::ModeCollision(clash.mode.clone()));
        }
        let labels = self.labels.iter().chain(&other.labels).cloned().collect();
        Ok(Self {
            labels,
            reduced: self.reduced || other.reduced,
        })
    }
}

impl fmt::Display for QuadratureOrdering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

fn ensure_unique(labels: &[QuadLabel]) -> Result<()> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(Error::InvalidOrdering(format!("duplicate label {l}")));
        }
    }
    Ok(())
}

/// Reordering map between two orderings over the same labels.
///
/// `source_index[i]` is the position in the source ordering of the label at
/// position `i` of the target ordering, so a matrix transforms as
/// `out[i][j] = v[source_index[i]][source_index[j]]`, i.e. `P V P^T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    source_index: Vec<usize>,
}

impl Permutation {
    pub fn between(source: &QuadratureOrdering, target: &QuadratureOrdering) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::NotAPermutation);
        }
        let source_index = target
            .labels()
            .iter()
            .map(|l| source.position(l).ok_or(Error::NotAPermutation))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { source_index })
    }

    pub fn source_index(&self) -> &[usize] {
        &self.source_index
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.source_index.len()];
        for (i, &s) in self.source_index.iter().enumerate() {
            inv[s] = i;
        }
        Self { source_index: inv }
    }

    /// The permutation matrix `P` with `P V P^T` equal to [`Self::conjugate`].
    pub fn matrix(&self) -> nalgebra::DMatrix<f64> {
        let n = self.source_index.len();
        nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if self.source_index[i] == j {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn conjugate(&self, v: &nalgebra::DMatrix<f64>) -> nalgebra::DMatrix<f64> {
        let idx = &self.source_index;
        nalgebra::DMatrix::from_fn(idx.len(), idx.len(), |i, j| v[(idx[i], idx[j])])
    }
}
