//! JSON schemas for operads, cooperads and algebra morphisms. Matrices are
//! row-major with exact field-element entries rendered as strings.

use gpl_core::conv::{Component, CooperadData, DeltaTerm, OperadData, SymmetricSequence};
use gpl_core::error::{Error, Result};
use gpl_core::linalg::Matrix;
use gpl_core::perm::Permutation;
use gpl_core::ring::{Ring, Scalar};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SequenceFile {
    pub ring: Ring,
    pub arity_cap: usize,
    pub components: Vec<ComponentFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComponentFile {
    pub arity: usize,
    pub basis: Vec<BasisEntry>,
    #[serde(default)]
    pub action: ActionFile,
    #[serde(default)]
    pub differential: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BasisEntry {
    pub name: String,
    pub degree: i64,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct ActionFile {
    /// One row-major dim x dim matrix per adjacent transposition.
    #[serde(default)]
    pub generators: Vec<Vec<String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OperadFile {
    #[serde(flatten)]
    pub seq: SequenceFile,
    pub composition: Vec<CompositionEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositionEntry {
    /// [k, [i_1, ..., i_k]]
    pub profile: (usize, Vec<usize>),
    pub matrix: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CooperadFile {
    #[serde(flatten)]
    pub seq: SequenceFile,
    #[serde(default)]
    pub decomposition: Vec<DecompositionEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecompositionEntry {
    pub arity: usize,
    pub basis: usize,
    pub terms: Vec<TermFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermFile {
    pub profile: (usize, Vec<usize>),
    pub shuffle: Vec<usize>,
    pub outer: usize,
    pub inner: Vec<Option<usize>>,
    pub coeff: String,
}

fn parse_matrix(ring: &Ring, rows: usize, cols: usize, entries: &[String]) -> Result<Matrix> {
    if entries.len() != rows * cols {
        return Err(Error::InvalidOperadData(format!(
            "matrix needs {} entries, got {}",
            rows * cols,
            entries.len()
        )));
    }
    let mut m = Matrix::zero(ring, rows, cols);
    for (i, text) in entries.iter().enumerate() {
        m.a[i] = Scalar::parse(ring, text)?;
    }
    Ok(m)
}

fn sequence_from_file(file: &SequenceFile) -> Result<SymmetricSequence> {
    let ring = file.ring.clone();
    ring.validate()?;
    let mut components = vec![Component::unit(&ring)];
    for n in 2..=file.arity_cap {
        let decl = file.components.iter().find(|c| c.arity == n);
        let comp = match decl {
            None => Component {
                arity: n,
                names: Vec::new(),
                degrees: Vec::new(),
                action: vec![Matrix::zero(&ring, 0, 0); n - 1],
                differential: Matrix::zero(&ring, 0, 0),
            },
            Some(decl) => {
                let dim = decl.basis.len();
                let action = if decl.action.generators.is_empty() {
                    vec![Matrix::identity(&ring, dim); n - 1]
                } else {
                    decl.action
                        .generators
                        .iter()
                        .map(|g| parse_matrix(&ring, dim, dim, g))
                        .collect::<Result<Vec<_>>>()?
                };
                let differential = if decl.differential.is_empty() {
                    Matrix::zero(&ring, dim, dim)
                } else {
                    parse_matrix(&ring, dim, dim, &decl.differential)?
                };
                Component {
                    arity: n,
                    names: decl.basis.iter().map(|b| b.name.clone()).collect(),
                    degrees: decl.basis.iter().map(|b| b.degree).collect(),
                    action,
                    differential,
                }
            }
        };
        components.push(comp);
    }
    Ok(SymmetricSequence { ring, arity_cap: file.arity_cap, components })
}

pub fn operad_from_file(file: &OperadFile) -> Result<OperadData> {
    let seq = sequence_from_file(&file.seq)?;
    let mut gamma = std::collections::BTreeMap::new();
    for entry in &file.composition {
        let (k, ref arities) = entry.profile;
        let n: usize = arities.iter().sum();
        let rows = seq.dim(n);
        let cols = seq.dim(k) * arities.iter().map(|&a| seq.dim(a)).product::<usize>();
        gamma.insert(entry.profile.clone(), parse_matrix(&seq.ring, rows, cols, &entry.matrix)?);
    }
    let op = OperadData { seq, gamma };
    op.validate()?;
    Ok(op)
}

pub fn cooperad_from_file(file: &CooperadFile) -> Result<CooperadData> {
    let seq = sequence_from_file(&file.seq)?;
    let mut delta: Vec<Vec<Vec<DeltaTerm>>> =
        (1..=seq.arity_cap).map(|n| vec![Vec::new(); seq.dim(n)]).collect();
    for entry in &file.decomposition {
        let terms = entry
            .terms
            .iter()
            .map(|t| {
                Ok(DeltaTerm {
                    profile: t.profile.clone(),
                    shuffle: Permutation::from_images(t.shuffle.clone())?,
                    outer: t.outer,
                    inner: t.inner.clone(),
                    coeff: Scalar::parse(&seq.ring, &t.coeff)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        delta[entry.arity - 1][entry.basis] = terms;
    }
    let c = CooperadData { seq, delta };
    c.validate()?;
    Ok(c)
}

/// Parses a truncated-local descriptor like `F2[t]/t^3` or `Q[t]/t^2`.
pub fn parse_artinian(text: &str) -> Result<(Ring, u32)> {
    let text = text.trim();
    let open = text
        .find("[t]/t^")
        .ok_or_else(|| Error::InvalidRing(format!("expected K[t]/t^N, got `{text}`")))?;
    let base_txt = &text[..open];
    let n: u32 = text[open + 6..]
        .parse()
        .map_err(|_| Error::InvalidRing(format!("bad nilpotency in `{text}`")))?;
    let base = if base_txt == "Q" {
        Ring::Rationals
    } else if let Some(p) = base_txt.strip_prefix('F') {
        Ring::prime_field(
            p.parse().map_err(|_| Error::InvalidRing(format!("bad prime in `{text}`")))?,
        )
    } else {
        return Err(Error::InvalidRing(format!("unknown base field `{base_txt}`")));
    };
    base.validate()?;
    Ok((base, n))
}

/// A morphism of free algebras as a generator-image table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MorphismFile {
    /// generator name -> element text in the target algebra.
    pub images: std::collections::BTreeMap<String, String>,
}
