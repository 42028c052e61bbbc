//! Filtered flag complexes over distances (Vietoris-Rips) or symmetrized
//! neighbor orders (kNN).

use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::DistanceMatrix;
use crate::knn::{SymMethod, SymOrderMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vec<usize>,
}

impl Simplex {
    /// Vertices must be strictly increasing.
    pub fn new(vertices: Vec<usize>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::invalid("a simplex needs at least one vertex"));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid(format!(
                "simplex vertices {vertices:?} are not strictly increasing"
            )));
        }
        Ok(Self { vertices })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }

    /// Codimension-one faces, in the order obtained by dropping vertex 0, 1, ...
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let n = if self.vertices.len() > 1 {
            self.vertices.len()
        } else {
            0
        };
        (0..n).map(move |skip| Simplex {
            vertices: self
                .vertices
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != skip)
                .map(|(_, &v)| v)
                .collect(),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ComplexKind {
    Vr,
    Knn(SymMethod),
}

impl fmt::Display for ComplexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexKind::Vr => f.write_str("vr"),
            ComplexKind::Knn(m) => write!(f, "knn-{m}"),
        }
    }
}

impl FromStr for ComplexKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "vr" {
            return Ok(ComplexKind::Vr);
        }
        match s.strip_prefix("knn-") {
            Some(m) => Ok(ComplexKind::Knn(m.parse()?)),
            None => Err(Error::invalid(format!("unknown complex kind {s:?}"))),
        }
    }
}

impl From<ComplexKind> for String {
    fn from(k: ComplexKind) -> String {
        k.to_string()
    }
}

impl TryFrom<String> for ComplexKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilteredSimplex {
    pub simplex: Simplex,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    simplices: Vec<FilteredSimplex>,
    dim_cap: usize,
    kind: ComplexKind,
}

fn filtration_order(a: &FilteredSimplex, b: &FilteredSimplex) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.simplex.dim().cmp(&b.simplex.dim()))
        .then_with(|| a.simplex.vertices.cmp(&b.simplex.vertices))
}

impl FilteredComplex {
    /// Sorts the simplices by (value, dimension, vertices) and checks that the
    /// result is a valid filtration.
    pub fn new(mut simplices: Vec<FilteredSimplex>, dim_cap: usize, kind: ComplexKind) -> Result<Self> {
        simplices.sort_by(filtration_order);
        let complex = Self {
            simplices,
            dim_cap,
            kind,
        };
        complex.validate()?;
        Ok(complex)
    }

    /// Face closure, monotone values, vertices at 0, no duplicates, dimension cap.
    pub fn validate(&self) -> Result<()> {
        let index = self.index_map()?;
        for (pos, fs) in self.simplices.iter().enumerate() {
            let s = &fs.simplex;
            if fs.value.is_nan() {
                return Err(Error::invalid(format!("simplex {:?} has NaN value", s.vertices)));
            }
            if s.dim() > self.dim_cap {
                return Err(Error::invalid(format!(
                    "simplex {:?} exceeds dimension cap {}",
                    s.vertices, self.dim_cap
                )));
            }
            if s.dim() == 0 && fs.value != 0.0 {
                return Err(Error::invalid(format!("vertex {} has nonzero value", s.vertices[0])));
            }
            if pos > 0 && filtration_order(&self.simplices[pos - 1], fs) != Ordering::Less {
                return Err(Error::invalid("simplices are not in filtration order"));
            }
            for face in s.facets() {
                match index.get(&face) {
                    None => {
                        return Err(Error::invalid(format!(
                            "face {:?} of {:?} is missing",
                            face.vertices, s.vertices
                        )))
                    }
                    Some(&f) if self.simplices[f].value > fs.value => {
                        return Err(Error::invalid(format!(
                            "face {:?} enters after its coface {:?}",
                            face.vertices, s.vertices
                        )))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    pub(crate) fn index_map(&self) -> Result<HashMap<&Simplex, usize>> {
        let mut index = HashMap::with_capacity(self.simplices.len());
        for (pos, fs) in self.simplices.iter().enumerate() {
            if index.insert(&fs.simplex, pos).is_some() {
                return Err(Error::invalid(format!("duplicate simplex {:?}", fs.simplex.vertices)));
            }
        }
        Ok(index)
    }

    pub fn simplices(&self) -> &[FilteredSimplex] {
        &self.simplices
    }

    pub fn len(&self) -> usize {
        self.simplices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.simplices.is_empty()
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    /// Number of simplices with value `<= level`; they form a prefix.
    pub fn prefix_len(&self, level: f64) -> usize {
        self.simplices.partition_point(|fs| fs.value <= level)
    }

    /// The subcomplex present at `level`.
    pub fn at_level(&self, level: f64) -> &[FilteredSimplex] {
        &self.simplices[..self.prefix_len(level)]
    }

    /// Distinct finite filtration values, ascending.
    pub fn critical_values(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.simplices.iter().map(|fs| fs.value).collect();
        values.dedup();
        values
    }

    /// One line per simplex: `value<TAB>v0,v1,...`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for fs in &self.simplices {
            let verts: Vec<String> = fs.simplex.vertices.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!("{}\t{}\n", fs.value, verts.join(",")));
        }
        out
    }
}

/// Clique complex of the graph with edges `{i,j}` where `edge_values[i][j] <= value_cap`.
/// Infinite values mean "no edge", whatever the cap. Each clique enters at the
/// largest value among its edges. The diagonal is ignored.
pub fn flag_expand(edge_values: &[Vec<f64>], dim_cap: usize, value_cap: f64) -> Result<FilteredComplex> {
    flag_expand_kind(edge_values, dim_cap, value_cap, ComplexKind::Vr)
}

fn flag_expand_kind(
    edge_values: &[Vec<f64>],
    dim_cap: usize,
    value_cap: f64,
    kind: ComplexKind,
) -> Result<FilteredComplex> {
    let n = edge_values.len();
    if value_cap.is_nan() {
        return Err(Error::invalid("value cap is NaN"));
    }
    for (i, row) in edge_values.iter().enumerate() {
        if row.len() != n {
            return Err(Error::invalid(format!("edge matrix row {i} has length {}", row.len())));
        }
        for j in (i + 1)..n {
            let (a, b) = (row[j], edge_values[j][i]);
            if a.is_nan() || b.is_nan() {
                return Err(Error::invalid(format!("edge value ({i},{j}) is NaN")));
            }
            if a != b {
                return Err(Error::invalid(format!("edge values ({i},{j}) and ({j},{i}) differ")));
            }
        }
    }

    let neighbors: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            ((i + 1)..n)
                .filter(|&j| edge_values[i][j].is_finite() && edge_values[i][j] <= value_cap)
                .collect()
        })
        .collect();

    let mut simplices = Vec::new();
    let mut clique = Vec::with_capacity(dim_cap + 1);
    for v in 0..n {
        clique.push(v);
        expand(
            edge_values,
            &neighbors,
            dim_cap,
            &mut clique,
            &neighbors[v],
            0.0,
            &mut simplices,
        );
        clique.pop();
    }
    simplices.sort_by(filtration_order);
    Ok(FilteredComplex {
        simplices,
        dim_cap,
        kind,
    })
}

/// Emits `clique` and recursively every extension by a vertex in `candidates`
/// (all of which are adjacent to every clique member and larger than its last vertex).
fn expand(
    values: &[Vec<f64>],
    neighbors: &[Vec<usize>],
    dim_cap: usize,
    clique: &mut Vec<usize>,
    candidates: &[usize],
    value: f64,
    out: &mut Vec<FilteredSimplex>,
) {
    out.push(FilteredSimplex {
        simplex: Simplex {
            vertices: clique.clone(),
        },
        value,
    });
    if clique.len() > dim_cap {
        return;
    }
    for (pos, &w) in candidates.iter().enumerate() {
        let next_value = clique.iter().map(|&u| values[u][w]).fold(value, f64::max);
        let next: Vec<usize> = candidates[pos + 1..]
            .iter()
            .copied()
            .filter(|x| neighbors[w].binary_search(x).is_ok())
            .collect();
        clique.push(w);
        expand(values, neighbors, dim_cap, clique, &next, next_value, out);
        clique.pop();
    }
}

pub fn vr_filtered_complex(d: &DistanceMatrix, dim_cap: usize, eps_max: f64) -> Result<FilteredComplex> {
    let values: Vec<Vec<f64>> = d.rows().map(<[f64]>::to_vec).collect();
    flag_expand_kind(&values, dim_cap, eps_max, ComplexKind::Vr)
}

pub fn knn_filtered_complex(sym: &SymOrderMatrix, dim_cap: usize, k_max: f64) -> Result<FilteredComplex> {
    let limit = sym.len().saturating_sub(1) as f64;
    if !(0.0..=limit).contains(&k_max) {
        return Err(Error::invalid(format!("k_max {k_max} outside [0, {limit}]")));
    }
    flag_expand_kind(&sym.to_values(), dim_cap, k_max, ComplexKind::Knn(sym.method()))
}

/// Keeps simplices of dimension `<= kappa`.
pub fn skeleton(c: &FilteredComplex, kappa: usize) -> FilteredComplex {
    FilteredComplex {
        simplices: c
            .simplices
            .iter()
            .filter(|fs| fs.simplex.dim() <= kappa)
            .cloned()
            .collect(),
        dim_cap: kappa.min(c.dim_cap),
        kind: c.kind,
    }
}
