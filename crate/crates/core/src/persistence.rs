//! Persistent homology over GF(2) by boundary-matrix column reduction.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::filtration::{ComplexKind, FilteredComplex};
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistencePoint {
    pub dim: usize,
    pub birth: f64,
    #[serde(serialize_with = "ser_death", deserialize_with = "de_death")]
    pub death: f64,
    #[serde(default = "one", skip_serializing_if = "is_one")]
    pub multiplicity: usize,
}

fn one() -> usize {
    1
}

fn is_one(m: &usize) -> bool {
    *m == 1
}

fn ser_death<S: Serializer>(death: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if death.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*death)
    }
}

fn de_death<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Death {
        Finite(f64),
        Text(String),
    }
    match Death::deserialize(d)? {
        Death::Finite(x) => Ok(x),
        Death::Text(s) if s == "inf" => Ok(f64::INFINITY),
        Death::Text(s) => Err(serde::de::Error::custom(format!("bad death value {s:?}"))),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub kind: ComplexKind,
    pub dim_cap: usize,
    pub max_dim: usize,
    points: Vec<PersistencePoint>,
}

impl PersistenceDiagram {
    /// Merges repeated points into multiplicities and sorts by (dim, birth, death).
    pub fn new(kind: ComplexKind, dim_cap: usize, max_dim: usize, points: Vec<PersistencePoint>) -> Result<Self> {
        for p in &points {
            if !p.birth.is_finite() || p.death.is_nan() || p.birth > p.death || p.death == f64::NEG_INFINITY {
                return Err(Error::invalid(format!("bad diagram point ({}, {})", p.birth, p.death)));
            }
            if p.multiplicity == 0 {
                return Err(Error::invalid("diagram point with multiplicity 0"));
            }
            if p.dim > max_dim {
                return Err(Error::invalid(format!(
                    "point of dimension {} above max_dim {max_dim}",
                    p.dim
                )));
            }
        }
        let mut points = points;
        points.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        let mut merged: Vec<PersistencePoint> = Vec::with_capacity(points.len());
        for p in points {
            match merged.last_mut() {
                Some(q) if q.dim == p.dim && q.birth == p.birth && q.death == p.death => {
                    q.multiplicity += p.multiplicity
                }
                _ => merged.push(p),
            }
        }
        Ok(Self {
            kind,
            dim_cap,
            max_dim,
            points: merged,
        })
    }

    pub fn points(&self) -> &[PersistencePoint] {
        &self.points
    }

    /// `(birth, death)` pairs of one dimension, repeated by multiplicity.
    pub fn pairs(&self, dim: usize) -> Vec<(f64, f64)> {
        self.points
            .iter()
            .filter(|p| p.dim == dim)
            .flat_map(|p| std::iter::repeat_n((p.birth, p.death), p.multiplicity))
            .collect()
    }

    /// Number of classes of dimension `dim` alive at `level` (`birth <= level < death`).
    pub fn betti_at(&self, dim: usize, level: f64) -> usize {
        self.points
            .iter()
            .filter(|p| p.dim == dim && p.birth <= level && level < p.death)
            .map(|p| p.multiplicity)
            .sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: PersistenceDiagram = serde_json::from_str(text)?;
        Self::new(raw.kind, raw.dim_cap, raw.max_dim, raw.points)
    }

    /// `dim,birth,death` rows, one per unit of multiplicity; infinite deaths as `inf`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dim,birth,death\n");
        for p in &self.points {
            for _ in 0..p.multiplicity {
                out.push_str(&format!("{},{},{}\n", p.dim, p.birth, p.death));
            }
        }
        out
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Reduction {
    /// Plain left-to-right column reduction.
    Standard,
    /// Reduces high dimensions first and zeroes columns already known to be
    /// creators (clearing). Produces the same pairs as `Standard`.
    #[default]
    Twist,
}

/// Sparse GF(2) boundary matrix of the simplices of dimension `<= top_dim`,
/// columns and rows in filtration order. Each column is sorted ascending.
struct Boundary {
    columns: Vec<Vec<usize>>,
    dims: Vec<usize>,
    values: Vec<f64>,
}

fn boundary(c: &FilteredComplex, top_dim: usize, len: usize) -> Result<Boundary> {
    let kept: Vec<usize> = (0..len)
        .filter(|&i| c.simplices()[i].simplex.dim() <= top_dim)
        .collect();
    let index = c.index_map()?;
    let mut renumber = vec![usize::MAX; len];
    for (new, &old) in kept.iter().enumerate() {
        renumber[old] = new;
    }
    let mut b = Boundary {
        columns: Vec::with_capacity(kept.len()),
        dims: Vec::with_capacity(kept.len()),
        values: Vec::with_capacity(kept.len()),
    };
    for (new, &old) in kept.iter().enumerate() {
        let fs = &c.simplices()[old];
        let mut col = Vec::with_capacity(fs.simplex.dim() + 1);
        for face in fs.simplex.facets() {
            let pos = index
                .get(&face)
                .map(|&f| renumber[f])
                .ok_or_else(|| Error::invalid(format!("face {:?} missing", face.vertices())))?;
            if pos >= new || c.simplices()[kept[pos]].value > fs.value {
                return Err(Error::invalid(format!(
                    "face {:?} does not precede {:?}",
                    face.vertices(),
                    fs.simplex.vertices()
                )));
            }
            col.push(pos);
        }
        col.sort_unstable();
        b.columns.push(col);
        b.dims.push(fs.simplex.dim());
        b.values.push(fs.value);
    }
    Ok(b)
}

/// Symmetric difference of two sorted columns.
fn add_into(target: &mut Vec<usize>, other: &[usize], scratch: &mut Vec<usize>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

/// Returns `pivot_of[row] = Some(col)` for every persistence pair `(row, col)`.
fn reduce(b: &mut Boundary, method: Reduction) -> Vec<Option<usize>> {
    let m = b.columns.len();
    let mut pivot_of: Vec<Option<usize>> = vec![None; m];
    let mut scratch = Vec::new();
    let mut reduce_column = |j: usize, columns: &mut Vec<Vec<usize>>, pivot_of: &mut Vec<Option<usize>>| {
        let mut col = std::mem::take(&mut columns[j]);
        while let Some(&low) = col.last() {
            match pivot_of[low] {
                Some(k) => add_into(&mut col, &columns[k], &mut scratch),
                None => {
                    pivot_of[low] = Some(j);
                    break;
                }
            }
        }
        columns[j] = col;
    };
    match method {
        Reduction::Standard => {
            for j in 0..m {
                reduce_column(j, &mut b.columns, &mut pivot_of);
            }
        }
        Reduction::Twist => {
            let top = b.dims.iter().copied().max().unwrap_or(0);
            let mut cleared = vec![false; m];
            for d in (1..=top).rev() {
                for j in 0..m {
                    if b.dims[j] != d {
                        continue;
                    }
                    if cleared[j] {
                        b.columns[j].clear();
                        continue;
                    }
                    reduce_column(j, &mut b.columns, &mut pivot_of);
                    if let Some(&low) = b.columns[j].last() {
                        cleared[low] = true;
                    }
                }
            }
        }
    }
    pivot_of
}

pub fn compute_persistence(c: &FilteredComplex, max_dim: usize) -> Result<PersistenceDiagram> {
    compute_persistence_with(c, max_dim, Reduction::default())
}

/// Diagram of dimensions `0..=max_dim`. Zero-length pairs are dropped and
/// unpaired creators get death `inf`.
pub fn compute_persistence_with(c: &FilteredComplex, max_dim: usize, method: Reduction) -> Result<PersistenceDiagram> {
    if max_dim > c.dim_cap() {
        return Err(Error::invalid(format!(
            "max_dim {max_dim} exceeds the complex's dimension cap {}",
            c.dim_cap()
        )));
    }
    let mut b = boundary(c, max_dim + 1, c.len())?;
    let pivot_of = reduce(&mut b, method);
    let mut points = Vec::new();
    let mut destroyer = vec![false; pivot_of.len()];
    for j in pivot_of.iter().flatten() {
        destroyer[*j] = true;
    }
    for (i, pair) in pivot_of.iter().enumerate() {
        if b.dims[i] > max_dim {
            continue;
        }
        let death = match pair {
            Some(j) => b.values[*j],
            None if destroyer[i] => continue,
            None => f64::INFINITY,
        };
        if b.values[i] < death {
            points.push(PersistencePoint {
                dim: b.dims[i],
                birth: b.values[i],
                death,
                multiplicity: 1,
            });
        }
    }
    PersistenceDiagram::new(c.kind(), c.dim_cap(), max_dim, points)
}

/// Betti numbers `β_0..=β_max_dim` of the subcomplex with values `<= level`.
pub fn betti_numbers(c: &FilteredComplex, level: f64, max_dim: usize) -> Result<Vec<usize>> {
    let len = c.prefix_len(level);
    let mut b = boundary(c, max_dim + 1, len)?;
    let pivot_of = reduce(&mut b, Reduction::Twist);
    let mut counts = vec![0usize; max_dim + 2];
    let mut ranks = vec![0usize; max_dim + 2];
    for (i, pair) in pivot_of.iter().enumerate() {
        counts[b.dims[i]] += 1;
        if let Some(j) = pair {
            ranks[b.dims[*j]] += 1;
        }
    }
    let betti: Vec<usize> = (0..=max_dim).map(|k| counts[k] - ranks[k] - ranks[k + 1]).collect();

    let mut uf = UnionFind::new(len);
    let mut vertex_pos = std::collections::HashMap::new();
    for (pos, fs) in c.simplices()[..len].iter().enumerate() {
        match fs.simplex.vertices() {
            [v] => {
                vertex_pos.insert(*v, pos);
            }
            [u, v] => {
                uf.union(vertex_pos[u], vertex_pos[v]);
            }
            _ => {}
        }
    }
    assert_eq!(
        betti[0],
        uf.components() - (len - vertex_pos.len()),
        "β0 from reduction disagrees with union-find"
    );
    Ok(betti)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filtration::{flag_expand, vr_filtered_complex, FilteredSimplex, Simplex};
    use crate::geometry::{pairwise_distances, PointCloud};
    use proptest::prelude::*;

    fn square() -> FilteredComplex {
        let pts = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        vr_filtered_complex(&pairwise_distances(&PointCloud::new(pts).unwrap()), 2, f64::INFINITY).unwrap()
    }

    #[test]
    fn single_vertex() {
        let c = flag_expand(&[vec![0.0]], 2, 1.0).unwrap();
        let d = compute_persistence(&c, 1).unwrap();
        assert_eq!(d.pairs(0), vec![(0.0, f64::INFINITY)]);
        assert!(d.pairs(1).is_empty());
    }

    #[test]
    fn two_points() {
        let m = vec![vec![0.0, 5.0], vec![5.0, 0.0]];
        let d = compute_persistence(&flag_expand(&m, 1, 10.0).unwrap(), 0).unwrap();
        assert_eq!(d.pairs(0), vec![(0.0, 5.0), (0.0, f64::INFINITY)]);
        assert_eq!(d.points()[0].multiplicity, 1);
    }

    #[test]
    fn square_loop() {
        let d = compute_persistence(&square(), 1).unwrap();
        assert_eq!(d.pairs(1), vec![(1.0, 2f64.sqrt())]);
        assert_eq!(
            d.pairs(0),
            vec![(0.0, 1.0), (0.0, 1.0), (0.0, 1.0), (0.0, f64::INFINITY)]
        );
        assert_eq!(d.points()[0].multiplicity, 3);
    }

    #[test]
    fn max_dim_above_cap_rejected() {
        assert!(compute_persistence(&square(), 3).is_err());
    }

    #[test]
    fn betti_examples() {
        let c = square();
        assert_eq!(betti_numbers(&c, 0.5, 1).unwrap(), vec![4, 0]);
        assert_eq!(betti_numbers(&c, 1.0, 1).unwrap(), vec![1, 1]);
        assert_eq!(betti_numbers(&c, 2.0, 1).unwrap(), vec![1, 0]);

        let m: Vec<Vec<f64>> = (0..4)
            .map(|i| (0..4).map(|j| if i == j { 0.0 } else { 1.0 }).collect())
            .collect();
        let full = flag_expand(&m, 3, f64::INFINITY).unwrap();
        assert_eq!(betti_numbers(&full, 1.0, 2).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn hollow_tetrahedron_has_void() {
        let mut simplices = Vec::new();
        for mask in 1u32..16 {
            let v: Vec<usize> = (0..4).filter(|i| mask & (1 << i) != 0).collect();
            if v.len() <= 3 {
                let value = if v.len() == 1 { 0.0 } else { 1.0 };
                simplices.push(FilteredSimplex {
                    simplex: Simplex::new(v).unwrap(),
                    value,
                });
            }
        }
        let c = FilteredComplex::new(simplices, 2, ComplexKind::Vr).unwrap();
        let d = compute_persistence(&c, 2).unwrap();
        assert_eq!(d.pairs(2), vec![(1.0, f64::INFINITY)]);
        assert_eq!(betti_numbers(&c, 1.0, 2).unwrap(), vec![1, 0, 1]);
    }

    #[test]
    fn json_and_csv() {
        let d = compute_persistence(&square(), 1).unwrap();
        let text = d.to_json().unwrap();
        assert!(text.contains("\"inf\""));
        assert!(text.contains("\"kind\": \"vr\""));
        assert_eq!(PersistenceDiagram::from_json(&text).unwrap(), d);
        assert!(d
            .to_csv()
            .starts_with("dim,birth,death\n0,0,1\n0,0,1\n0,0,1\n0,0,inf\n"));
        assert!(PersistenceDiagram::from_json(
            r#"{"kind":"vr","dim_cap":1,"max_dim":0,"points":[{"dim":0,"birth":1,"death":"never"}]}"#
        )
        .is_err());
        let parsed = PersistenceDiagram::from_json(
            r#"{"kind":"knn-max","dim_cap":2,"max_dim":1,"points":[{"dim":1,"birth":1,"death":3},{"dim":1,"birth":1,"death":3}]}"#,
        )
        .unwrap();
        assert_eq!(parsed.points().len(), 1);
        assert_eq!(parsed.pairs(1).len(), 2);
    }

    fn random_cloud() -> impl Strategy<Value = PointCloud> {
        prop::collection::vec(prop::collection::vec(0.0..1.0f64, 2), 1..14).prop_map(|p| PointCloud::new(p).unwrap())
    }

    proptest! {
        #[test]
        fn twist_matches_standard(cloud in random_cloud()) {
            let c = vr_filtered_complex(&pairwise_distances(&cloud), 3, f64::INFINITY).unwrap();
            for max_dim in 0..=2 {
                let a = compute_persistence_with(&c, max_dim, Reduction::Standard).unwrap();
                let b = compute_persistence_with(&c, max_dim, Reduction::Twist).unwrap();
                prop_assert_eq!(a, b);
            }
        }

        #[test]
        fn one_infinite_h0_per_component(cloud in random_cloud(), cap in 0.0..0.8f64) {
            let c = vr_filtered_complex(&pairwise_distances(&cloud), 2, cap).unwrap();
            let d = compute_persistence(&c, 1).unwrap();
            let infinite = d.pairs(0).iter().filter(|p| p.1.is_infinite()).count();
            let mut uf = UnionFind::new(cloud.len());
            for fs in c.simplices() {
                if let [u, v] = fs.simplex.vertices() {
                    uf.union(*u, *v);
                }
            }
            prop_assert_eq!(infinite, uf.components());
        }

        #[test]
        fn deterministic(cloud in random_cloud()) {
            let c = vr_filtered_complex(&pairwise_distances(&cloud), 2, f64::INFINITY).unwrap();
            prop_assert_eq!(compute_persistence(&c, 1).unwrap(), compute_persistence(&c, 1).unwrap());
        }
    }
}
