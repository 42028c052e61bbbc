//! Point clouds, Euclidean distance matrices and tie-aware argsort.

use std::cmp::Ordering;
use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// `N` labeled points in `R^p`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        Self::build(points, None)
    }

    pub fn with_labels(points: Vec<Vec<f64>>, labels: Vec<String>) -> Result<Self> {
        Self::build(points, Some(labels))
    }

    fn build(points: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::invalid("point cloud must contain at least one point"));
        };
        let dim = first.len();
        if dim == 0 {
            return Err(Error::invalid("points must have dimension >= 1"));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::invalid(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|c| !c.is_finite()) {
                return Err(Error::invalid(format!("point {i} has a non-finite coordinate")));
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != points.len() {
                return Err(Error::invalid(format!(
                    "{} labels for {} points",
                    labels.len(),
                    points.len()
                )));
            }
            let mut seen = HashSet::with_capacity(labels.len());
            for l in labels {
                if !seen.insert(l.as_str()) {
                    return Err(Error::invalid(format!("duplicate label {l:?}")));
                }
            }
        }
        Ok(Self { points, labels })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points[0].len()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Parses one point per line, comma separated.
    ///
    /// A first line of the form `# label,x1,...,xp` switches on a leading
    /// label column. Blank lines and other `#` lines are skipped.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut labeled = false;
        let mut points = Vec::new();
        let mut labels = Vec::new();
        let mut seen_data = false;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('#') {
                let first = rest.split(',').next().unwrap_or("").trim();
                if !seen_data && points.is_empty() && first.eq_ignore_ascii_case("label") {
                    labeled = true;
                }
                continue;
            }
            seen_data = true;
            let mut fields = line.split(',').map(str::trim);
            if labeled {
                let label = fields
                    .next()
                    .filter(|s| !s.is_empty())
                    .ok_or_else(|| Error::parse(lineno + 1, "missing label"))?;
                labels.push(label.to_string());
            }
            let coords = fields
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::parse(lineno + 1, format!("bad coordinate {f:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            points.push(coords);
        }
        if labeled {
            Self::with_labels(points, labels)
        } else {
            Self::new(points)
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if self.labels.is_some() {
            out.push_str("# label");
            for k in 1..=self.dim() {
                let _ = write!(out, ",x{k}");
            }
            out.push('\n');
        }
        for (i, p) in self.points.iter().enumerate() {
            let mut first = true;
            if let Some(labels) = &self.labels {
                out.push_str(&labels[i]);
                first = false;
            }
            for c in p {
                if !first {
                    out.push(',');
                }
                let _ = write!(out, "{c}");
                first = false;
            }
            out.push('\n');
        }
        out
    }
}

/// Symmetric `N x N` matrix of Euclidean distances, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl DistanceMatrix {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.entries.chunks(self.n)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for row in self.rows() {
            let line: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}

/// How equal values are ordered by [`argsort_row`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieRule {
    /// Equal values keep their index order.
    #[default]
    ByIndex,
    /// Equal values are ordered by a permutation drawn from a seeded stream.
    SeededRandom(u64),
}

pub fn pairwise_distances(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = euclidean(cloud.point(i), cloud.point(j));
            entries[i * n + j] = d;
            entries[j * n + i] = d;
        }
    }
    DistanceMatrix { n, entries }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Returns `o` with `o[j]` the ascending rank of `values[j]`, ranks `0..N`.
pub fn argsort_row(values: &[f64], tie_rule: TieRule) -> Result<Vec<usize>> {
    if values.is_empty() {
        return Err(Error::invalid("argsort of an empty row"));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::invalid("NaN in argsort input"));
    }
    let keys = tie_keys(values.len(), tie_rule, 0);
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| cmp_with_keys(values, &keys, a, b));
    let mut ranks = vec![0; values.len()];
    for (rank, &j) in idx.iter().enumerate() {
        ranks[j] = rank;
    }
    Ok(ranks)
}

pub(crate) fn cmp_with_keys(values: &[f64], keys: &[usize], a: usize, b: usize) -> Ordering {
    values[a]
        .partial_cmp(&values[b])
        .unwrap_or(Ordering::Equal)
        .then(keys[a].cmp(&keys[b]))
}

/// Secondary sort keys used to break ties. `salt` decorrelates rows that
/// share a seed.
pub(crate) fn tie_keys(n: usize, tie_rule: TieRule, salt: u64) -> Vec<usize> {
    match tie_rule {
        TieRule::ByIndex => (0..n).collect(),
        TieRule::SeededRandom(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let mut keys: Vec<usize> = (0..n).collect();
            keys.shuffle(&mut rng);
            keys
        }
    }
}

/// `max_i ||a_i - b_i||_2` for two enumerated clouds of equal shape.
pub fn linf_cloud_distance(a: &PointCloud, b: &PointCloud) -> Result<f64> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::invalid(format!(
            "cloud shapes differ: {}x{} vs {}x{}",
            a.len(),
            a.dim(),
            b.len(),
            b.dim()
        )));
    }
    Ok(a.points()
        .iter()
        .zip(b.points())
        .map(|(p, q)| euclidean(p, q))
        .fold(0.0, f64::max))
}
