//! Ways of measuring how an iteration trace approaches its limit: norm
//! error, total rank displacement, agreement of kNN orderings, and
//! bottleneck distance between persistence diagrams.

use std::collections::BTreeSet;

use serde::Serialize;

use crate::bottleneck::bottleneck;
use crate::error::{Error, Result};
use crate::filtration::{knn_filtered_complex, vr_filtered_complex, FilteredComplex};
use crate::geometry::{pairwise_distances, PointCloud, TieRule};
use crate::knn::{neighborhood, ordering_function, symmetrize, OrderMatrix, SymMethod};
use crate::pagerank::{rank_convergence_time, rank_order, IterationTrace};
use crate::persistence::{compute_persistence, PersistenceDiagram};

/// Entries of `π` closer than this are treated as tied.
pub const TIE_TOLERANCE: f64 = 1e-15;

/// Point `i` is `(x_i)` in one dimension, labeled when labels are given.
pub fn embed_1d(x: &[f64], labels: Option<&[String]>) -> Result<PointCloud> {
    if x.is_empty() {
        return Err(Error::invalid("cannot embed an empty vector"));
    }
    let points = x.iter().map(|&v| vec![v]).collect();
    match labels {
        Some(l) => PointCloud::with_labels(points, l.to_vec()),
        None => PointCloud::new(points),
    }
}

/// Which ordering entries must agree with the limit's.
#[derive(Clone, Debug, PartialEq)]
pub enum KnnScope {
    /// Every `(i, j)`.
    Global,
    /// `j ∈ N_iκ` of the limit cloud, for every `i`.
    Kappa(f64),
    /// `i, j ∈ U`.
    Local(Vec<usize>),
    /// `i, j ∈ U` and `j ∈ N_iκ`.
    KappaLocal(f64, Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KnnConvergence {
    /// `None` if the required entries still differ at the horizon.
    pub time: Option<usize>,
    /// Whether some entries of `π` tie, which makes the limit ordering
    /// depend on the tie rule.
    pub pi_has_ties: bool,
}

fn check_subset(u: &[usize], n: usize) -> Result<BTreeSet<usize>> {
    if u.is_empty() {
        return Err(Error::invalid("node subset is empty"));
    }
    if let Some(&bad) = u.iter().find(|&&i| i >= n) {
        return Err(Error::invalid(format!("node {bad} out of range for {n} nodes")));
    }
    Ok(u.iter().copied().collect())
}

pub fn has_ties(x: &[f64]) -> bool {
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.windows(2).any(|w| w[1] - w[0] <= TIE_TOLERANCE)
}

fn orders(x: &[f64], tie_rule: TieRule) -> Result<OrderMatrix> {
    ordering_function(&embed_1d(x, None)?, tie_rule)
}

pub fn knn_convergence_time(
    trace: &IterationTrace,
    scope: &KnnScope,
    method: SymMethod,
    tie_rule: TieRule,
) -> Result<KnnConvergence> {
    let n = trace.len();
    let limit = orders(trace.pi(), tie_rule)?;
    let kappa_mask = |kappa: f64| -> Result<Vec<Vec<bool>>> {
        let sym = symmetrize(&limit, method);
        let mut mask = vec![vec![false; n]; n];
        for (i, row) in mask.iter_mut().enumerate() {
            for j in neighborhood(&sym, i, kappa)?.members {
                row[j] = true;
            }
        }
        Ok(mask)
    };
    let subset_mask = |u: &[usize]| -> Result<Vec<Vec<bool>>> {
        let set = check_subset(u, n)?;
        Ok((0..n)
            .map(|i| (0..n).map(|j| set.contains(&i) && set.contains(&j)).collect())
            .collect())
    };
    let mask: Vec<Vec<bool>> = match scope {
        KnnScope::Global => vec![vec![true; n]; n],
        KnnScope::Kappa(kappa) => kappa_mask(*kappa)?,
        KnnScope::Local(u) => subset_mask(u)?,
        KnnScope::KappaLocal(kappa, u) => {
            let a = kappa_mask(*kappa)?;
            let b = subset_mask(u)?;
            a.iter()
                .zip(&b)
                .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| *x && *y).collect())
                .collect()
        }
    };
    let agrees = |f: &OrderMatrix| (0..n).all(|i| (0..n).all(|j| !mask[i][j] || f.get(i, j) == limit.get(i, j)));
    let mut time = Some(0);
    for t in (0..=trace.horizon()).rev() {
        if !agrees(&orders(trace.iterate(t), tie_rule)?) {
            time = if t == trace.horizon() { None } else { Some(t + 1) };
            break;
        }
    }
    Ok(KnnConvergence {
        time,
        pi_has_ties: has_ties(trace.pi()),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Family {
    Vr,
    Knn(SymMethod),
}

impl Family {
    pub fn name(self) -> String {
        match self {
            Family::Vr => "vr".to_string(),
            Family::Knn(m) => format!("knn_{m}"),
        }
    }
}

/// VR complexes use every edge (`eps_max = inf`); kNN complexes use `k_max = N - 1`.
pub fn vector_complex(x: &[f64], family: Family, dim_cap: usize, tie_rule: TieRule) -> Result<FilteredComplex> {
    let cloud = embed_1d(x, None)?;
    match family {
        Family::Vr => vr_filtered_complex(&pairwise_distances(&cloud), dim_cap, f64::INFINITY),
        Family::Knn(method) => {
            let sym = symmetrize(&ordering_function(&cloud, tie_rule)?, method);
            knn_filtered_complex(&sym, dim_cap, (x.len() - 1) as f64)
        }
    }
}

fn vector_diagram(
    x: &[f64],
    family: Family,
    max_dim: usize,
    dim_cap: usize,
    tie_rule: TieRule,
) -> Result<PersistenceDiagram> {
    compute_persistence(&vector_complex(x, family, dim_cap, tie_rule)?, max_dim)
}

/// `series[k][t]` is the bottleneck distance in dimension `dims[k]` between
/// the diagrams of `x(t)` and `π`.
pub fn homological_curve(
    trace: &IterationTrace,
    family: Family,
    dims: &[usize],
    dim_cap: usize,
    tie_rule: TieRule,
) -> Result<Vec<Vec<f64>>> {
    let max_dim = dims.iter().copied().max().unwrap_or(0);
    if max_dim > dim_cap {
        return Err(Error::invalid(format!("dimension {max_dim} exceeds dim cap {dim_cap}")));
    }
    let limit = vector_diagram(trace.pi(), family, max_dim, dim_cap, tie_rule)?;
    let mut series = vec![Vec::with_capacity(trace.horizon() + 1); dims.len()];
    for x in trace.iterates() {
        let d = vector_diagram(x, family, max_dim, dim_cap, tie_rule)?;
        for (k, &dim) in dims.iter().enumerate() {
            series[k].push(bottleneck(&d, &limit, dim));
        }
    }
    Ok(series)
}

/// `Σ_i |R_i(π) - R_i(x(t))|` for every `t`.
pub fn rank_diff_curve(trace: &IterationTrace) -> Result<Vec<usize>> {
    let target = rank_order(trace.pi())?;
    trace
        .iterates()
        .iter()
        .map(|x| Ok(rank_order(x)?.iter().zip(&target).map(|(a, b)| a.abs_diff(*b)).sum()))
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Norm {
    L1,
    L2,
    Linf,
}

pub fn norm_error_curve(trace: &IterationTrace, norm: Norm) -> Vec<f64> {
    trace
        .iterates()
        .iter()
        .map(|x| {
            let diffs = x.iter().zip(trace.pi()).map(|(a, b)| (a - b).abs());
            match norm {
                Norm::L1 => diffs.sum(),
                Norm::L2 => diffs.map(|d| d * d).sum::<f64>().sqrt(),
                Norm::Linf => diffs.fold(0.0, f64::max),
            }
        })
        .collect()
}

/// Keeps coordinates in `u` (in the given order), without renormalizing.
pub fn restrict(trace: &IterationTrace, u: &[usize]) -> Result<IterationTrace> {
    check_subset(u, trace.len())?;
    let pick = |x: &[f64]| u.iter().map(|&i| x[i]).collect::<Vec<f64>>();
    let labels = trace.labels().map(|l| u.iter().map(|&i| l[i].clone()).collect());
    IterationTrace::new(
        trace.iterates().iter().map(|x| pick(x)).collect(),
        pick(trace.pi()),
        labels,
    )
}

#[derive(Clone, Debug, PartialEq)]
pub struct ReportConfig {
    pub families: Vec<Family>,
    pub dims: Vec<usize>,
    pub dim_cap: usize,
    pub tie_rule: TieRule,
    /// Symmetrization for the kNN convergence times. Defaults to the first
    /// kNN family, or min when there is none.
    pub knn_method: Option<SymMethod>,
    pub kappa: Option<f64>,
    pub subset: Option<Vec<usize>>,
}

impl Default for ReportConfig {
    fn default() -> Self {
        Self {
            families: vec![Family::Vr, Family::Knn(SymMethod::Min), Family::Knn(SymMethod::Max)],
            dims: vec![0, 1],
            dim_cap: 2,
            tie_rule: TieRule::ByIndex,
            knn_method: None,
            kappa: None,
            subset: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceSummary {
    pub horizon: usize,
    pub t_star_rank: Option<usize>,
    pub t_star_knn_global: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star_knn_kappa: Option<Option<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star_knn_local: Option<Option<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_star_knn_kappa_local: Option<Option<usize>>,
    pub pi_has_ties: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport {
    pub norm_l2: Vec<f64>,
    pub norm_linf: Vec<f64>,
    pub rank_diff: Vec<usize>,
    /// Column name (e.g. `db_knn_min_h0`) and its series.
    pub bottleneck: Vec<(String, Vec<f64>)>,
    pub summary: ConvergenceSummary,
}

impl ConvergenceReport {
    pub fn build(trace: &IterationTrace, cfg: &ReportConfig) -> Result<Self> {
        let mut per_family = Vec::with_capacity(cfg.families.len());
        for &family in &cfg.families {
            per_family.push(homological_curve(trace, family, &cfg.dims, cfg.dim_cap, cfg.tie_rule)?);
        }
        // Columns grouped by dimension: db_vr_h0, db_knn_min_h0, ..., db_vr_h1, ...
        let mut bottleneck = Vec::with_capacity(cfg.dims.len() * cfg.families.len());
        for (k, dim) in cfg.dims.iter().enumerate() {
            for (family, series) in cfg.families.iter().zip(&per_family) {
                bottleneck.push((format!("db_{}_h{dim}", family.name()), series[k].clone()));
            }
        }
        let method = cfg
            .knn_method
            .or_else(|| {
                cfg.families.iter().find_map(|f| match f {
                    Family::Knn(m) => Some(*m),
                    Family::Vr => None,
                })
            })
            .unwrap_or(SymMethod::Min);
        let time = |scope: KnnScope| knn_convergence_time(trace, &scope, method, cfg.tie_rule);
        let global = time(KnnScope::Global)?;
        let kappa = cfg.kappa.map(|k| time(KnnScope::Kappa(k))).transpose()?;
        let local = cfg.subset.clone().map(|u| time(KnnScope::Local(u))).transpose()?;
        let both = match (cfg.kappa, &cfg.subset) {
            (Some(k), Some(u)) => Some(time(KnnScope::KappaLocal(k, u.clone()))?),
            _ => None,
        };
        Ok(Self {
            norm_l2: norm_error_curve(trace, Norm::L2),
            norm_linf: norm_error_curve(trace, Norm::Linf),
            rank_diff: rank_diff_curve(trace)?,
            bottleneck,
            summary: ConvergenceSummary {
                horizon: trace.horizon(),
                t_star_rank: rank_convergence_time(trace)?,
                t_star_knn_global: global.time,
                t_star_knn_kappa: kappa.map(|c| c.time),
                t_star_knn_local: local.map(|c| c.time),
                t_star_knn_kappa_local: both.map(|c| c.time),
                pi_has_ties: global.pi_has_ties,
            },
        })
    }

    /// `t,norm_l2,norm_linf,rank_diff,db_...` with one row per iterate.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,norm_l2,norm_linf,rank_diff");
        for (name, _) in &self.bottleneck {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for t in 0..self.rank_diff.len() {
            out.push_str(&format!(
                "{t},{},{},{}",
                self.norm_l2[t], self.norm_linf[t], self.rank_diff[t]
            ));
            for (_, s) in &self.bottleneck {
                out.push_str(&format!(",{}", s[t]));
            }
            out.push('\n');
        }
        out
    }

    pub fn summary_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.summary)?)
    }
}
