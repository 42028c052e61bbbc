//! Nearest-neighbor orderings, their symmetrizations and neighborhoods.
//!
//! `k_ij` is the position of point `j` in point `i`'s list of neighbors sorted
//! by distance, with `k_ii = 0`. The three symmetrizations take the min, the
//! mean, or the max of `k_ij` and `k_ji`. The mean can be a half-integer, so
//! symmetrized entries are stored doubled to keep them exact.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{cmp_with_keys, pairwise_distances, tie_keys, PointCloud, TieRule};

/// Row `i` holds the neighbor orders `k_ij`; every row is a permutation of `0..N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderMatrix {
    n: usize,
    entries: Vec<usize>,
}

impl OrderMatrix {
    /// Builds from explicit rows, checking the diagonal and permutation invariants.
    pub fn from_rows(rows: Vec<Vec<usize>>) -> Result<Self> {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::invalid(format!(
                    "row {i} has length {}, expected {n}",
                    row.len()
                )));
            }
            if row[i] != 0 {
                return Err(Error::invalid(format!("diagonal entry ({i},{i}) is not 0")));
            }
            let mut seen = vec![false; n];
            for &k in &row {
                if k >= n || std::mem::replace(&mut seen[k], true) {
                    return Err(Error::invalid(format!("row {i} is not a permutation of 0..{n}")));
                }
            }
            entries.extend(row);
        }
        Ok(Self { n, entries })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> usize {
        self.entries[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[usize] {
        &self.entries[i * self.n..(i + 1) * self.n]
    }

    /// `max_ij |k_ij - k'_ij|`.
    pub fn max_abs_diff(&self, other: &OrderMatrix) -> Result<usize> {
        if self.n != other.n {
            return Err(Error::invalid("order matrices of different size"));
        }
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0))
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|k| k.to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymMethod {
    Min,
    Trans,
    Max,
}

impl SymMethod {
    pub const ALL: [SymMethod; 3] = [SymMethod::Min, SymMethod::Trans, SymMethod::Max];

    pub fn as_str(self) -> &'static str {
        match self {
            SymMethod::Min => "min",
            SymMethod::Trans => "trans",
            SymMethod::Max => "max",
        }
    }
}

impl fmt::Display for SymMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SymMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(SymMethod::Min),
            "trans" => Ok(SymMethod::Trans),
            "max" => Ok(SymMethod::Max),
            other => Err(Error::invalid(format!("unknown symmetrization {other:?}"))),
        }
    }
}

/// Symmetrized orders, stored as `2 * value` so `trans` half-integers are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymOrderMatrix {
    method: SymMethod,
    n: usize,
    doubled: Vec<u32>,
}

impl SymOrderMatrix {
    pub fn method(&self) -> SymMethod {
        self.method
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        f64::from(self.doubled[i * self.n + j]) / 2.0
    }

    /// Twice the symmetrized order; always an integer.
    pub fn doubled(&self, i: usize, j: usize) -> u32 {
        self.doubled[i * self.n + j]
    }

    /// Dense `N x N` matrix of entries, for filtration construction.
    pub fn to_values(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// The members of `N_ik`, excluding `i` itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Neighborhood {
    pub center: usize,
    pub level: f64,
    pub members: BTreeSet<usize>,
}

/// Neighbor orders of every point. The point itself is always order 0,
/// even when other points coincide with it.
pub fn ordering_function(cloud: &PointCloud, tie_rule: TieRule) -> Result<OrderMatrix> {
    let n = cloud.len();
    if n < 2 {
        return Err(Error::invalid("kNN orderings need at least two points"));
    }
    let dist = pairwise_distances(cloud);
    let mut entries = vec![0usize; n * n];
    let mut others: Vec<usize> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let row = dist.row(i);
        let keys = tie_keys(n, tie_rule, i as u64);
        others.clear();
        others.extend((0..n).filter(|&j| j != i));
        others.sort_by(|&a, &b| cmp_with_keys(row, &keys, a, b));
        for (pos, &j) in others.iter().enumerate() {
            entries[i * n + j] = pos + 1;
        }
    }
    Ok(OrderMatrix { n, entries })
}

pub fn symmetrize(orders: &OrderMatrix, method: SymMethod) -> SymOrderMatrix {
    let n = orders.n;
    let mut doubled = vec![0u32; n * n];
    for i in 0..n {
        for j in 0..n {
            let (a, b) = (orders.get(i, j) as u32, orders.get(j, i) as u32);
            doubled[i * n + j] = match method {
                SymMethod::Min => 2 * a.min(b),
                SymMethod::Trans => a + b,
                SymMethod::Max => 2 * a.max(b),
            };
        }
    }
    SymOrderMatrix { method, n, doubled }
}

pub fn neighborhood(sym: &SymOrderMatrix, i: usize, k: f64) -> Result<Neighborhood> {
    if i >= sym.n {
        return Err(Error::invalid(format!("node {i} out of range for {} points", sym.n)));
    }
    if k.is_nan() || k < 0.0 {
        return Err(Error::invalid(format!("neighborhood level {k} must be >= 0")));
    }
    let bound = 2.0 * k;
    let members = (0..sym.n)
        .filter(|&j| j != i && f64::from(sym.doubled(i, j)) <= bound)
        .collect();
    Ok(Neighborhood {
        center: i,
        level: k,
        members,
    })
}

/// Which entries of the ordering matrix a transformation must preserve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PreserveScope {
    Global,
    Local(usize),
    /// Entries whose order in the source cloud is at most `K`.
    Bounded(usize),
    BoundedLocal {
        node: usize,
        bound: usize,
    },
}

pub fn is_knn_preserving(a: &PointCloud, b: &PointCloud, scope: PreserveScope, tie_rule: TieRule) -> Result<bool> {
    if a.len() != b.len() || a.dim() != b.dim() {
        return Err(Error::invalid(
            "clouds must have the same number of points and dimension",
        ));
    }
    let fa = ordering_function(a, tie_rule)?;
    let fb = ordering_function(b, tie_rule)?;
    let n = fa.n;
    let row_ok = |i: usize, bound: Option<usize>| {
        (0..n).all(|j| {
            let k = fa.get(i, j);
            bound.is_some_and(|b| k > b) || k == fb.get(i, j)
        })
    };
    let check_node = |i: usize| {
        if i >= n {
            Err(Error::invalid(format!("node {i} out of range for {n} points")))
        } else {
            Ok(())
        }
    };
    Ok(match scope {
        PreserveScope::Global => fa == fb,
        PreserveScope::Local(i) => {
            check_node(i)?;
            row_ok(i, None)
        }
        PreserveScope::Bounded(bound) => (0..n).all(|i| row_ok(i, Some(bound))),
        PreserveScope::BoundedLocal { node, bound } => {
            check_node(node)?;
            row_ok(node, Some(bound))
        }
    })
}

/// Whether the two clouds have identical ordering matrices.
pub fn knn_equivalent(a: &PointCloud, b: &PointCloud, tie_rule: TieRule) -> Result<bool> {
    is_knn_preserving(a, b, PreserveScope::Global, tie_rule)
}
