//! PageRank by power iteration, with the full iterate history kept so rank
//! convergence can be analyzed afterwards.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{argsort_row, TieRule};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    undirected: bool,
    /// Undirected edges are stored once, as `(min, max)`.
    edges: BTreeSet<(usize, usize)>,
    labels: Option<Vec<String>>,
    out: Vec<Vec<usize>>,
}

impl Graph {
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>, undirected: bool) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("graph has no nodes"));
        }
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::invalid(format!("edge ({a},{b}) out of range for {n} nodes")));
            }
            set.insert(if undirected { (a.min(b), a.max(b)) } else { (a, b) });
        }
        let mut out = vec![Vec::new(); n];
        for &(a, b) in &set {
            out[a].push(b);
            if undirected && a != b {
                out[b].push(a);
            }
        }
        for row in &mut out {
            row.sort_unstable();
        }
        Ok(Self {
            n,
            undirected,
            edges: set,
            labels: None,
            out,
        })
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::invalid(format!("{} labels for {} nodes", labels.len(), self.n)));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn is_undirected(&self) -> bool {
        self.undirected
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn out_neighbors(&self, i: usize) -> &[usize] {
        &self.out[i]
    }

    /// Index of a node by label, or by its decimal index when unlabeled.
    pub fn node(&self, name: &str) -> Option<usize> {
        match &self.labels {
            Some(labels) => labels.iter().position(|l| l == name),
            None => name.parse().ok().filter(|&i| i < self.n),
        }
    }
}

/// Parses whitespace-separated node pairs, several pairs per line allowed.
///
/// If every token is a non-negative integer the tokens are used as indices
/// directly (`n = max + 1`). Otherwise all tokens are treated as names and
/// numbered in order of first appearance.
pub fn load_edge_list(text: &str, undirected: bool) -> Result<Graph> {
    let mut pairs: Vec<(&str, &str)> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if !tokens.len().is_multiple_of(2) {
            return Err(Error::parse(
                lineno + 1,
                format!("odd number of tokens ({})", tokens.len()),
            ));
        }
        pairs.extend(tokens.chunks(2).map(|c| (c[0], c[1])));
    }
    if pairs.is_empty() {
        return Err(Error::invalid("edge list has no edges"));
    }

    let numeric: Option<Vec<(usize, usize)>> = pairs
        .iter()
        .map(|(a, b)| Some((a.parse().ok()?, b.parse().ok()?)))
        .collect();
    if let Some(edges) = numeric {
        let n = edges.iter().map(|&(a, b)| a.max(b)).max().unwrap_or(0) + 1;
        return Graph::new(n, edges, undirected);
    }

    let mut index: HashMap<&str, usize> = HashMap::new();
    let mut labels: Vec<String> = Vec::new();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        let mut id = |name| {
            *index.entry(name).or_insert_with(|| {
                labels.push(name.to_string());
                labels.len() - 1
            })
        };
        let ia = id(a);
        edges.push((ia, id(b)));
    }
    let n = labels.len();
    Graph::new(n, edges, undirected)?.with_labels(labels)
}

/// One row of the Google matrix before teleportation: uniform over the
/// out-neighbors of `i`, or `v` when `i` is dangling.
pub fn transition_row(g: &Graph, i: usize, v: &[f64]) -> Vec<f64> {
    let out = g.out_neighbors(i);
    if out.is_empty() {
        return v.to_vec();
    }
    let mut row = vec![0.0; g.len()];
    let share = 1.0 / out.len() as f64;
    for &j in out {
        row[j] += share;
    }
    row
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitialVector {
    /// `x_i(0) = (i + 1) / (1 + 2 + ... + n)`.
    Increasing,
    Uniform,
    /// Any nonnegative vector with positive sum; it is normalized.
    Given(Vec<f64>),
}

impl InitialVector {
    pub fn build(&self, n: usize) -> Result<Vec<f64>> {
        let raw: Vec<f64> = match self {
            InitialVector::Increasing => (1..=n).map(|i| i as f64).collect(),
            InitialVector::Uniform => vec![1.0; n],
            InitialVector::Given(x) => {
                if x.len() != n {
                    return Err(Error::invalid(format!(
                        "initial vector has length {}, expected {n}",
                        x.len()
                    )));
                }
                x.clone()
            }
        };
        if raw.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::invalid("initial vector entries must be finite and nonnegative"));
        }
        let total: f64 = raw.iter().sum();
        if total <= 0.0 {
            return Err(Error::invalid("initial vector sums to zero"));
        }
        Ok(raw.into_iter().map(|x| x / total).collect())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PageRankConfig {
    pub alpha: f64,
    pub v: Vec<f64>,
    pub x0: Vec<f64>,
    /// Number of stored iterates after `x(0)`.
    pub max_iter: usize,
    /// Stopping threshold on `||x(t+1) - x(t)||_inf` for the stationary solve.
    pub tol: f64,
    /// Iteration cap for the stationary solve.
    pub max_solve_iter: usize,
}

impl PageRankConfig {
    /// `alpha = 0.85`, uniform teleportation, increasing initial vector, 30 iterations.
    pub fn new(n: usize) -> Self {
        Self {
            alpha: 0.85,
            v: vec![1.0 / n as f64; n],
            x0: InitialVector::Increasing.build(n).unwrap_or_default(),
            max_iter: 30,
            tol: 1e-14,
            max_solve_iter: 1_000_000,
        }
    }

    fn validate(&self, n: usize) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::invalid(format!("alpha {} outside [0, 1]", self.alpha)));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::invalid("tolerance must be positive"));
        }
        for (name, x) in [("v", &self.v), ("x0", &self.x0)] {
            if x.len() != n {
                return Err(Error::invalid(format!("{name} has length {}, expected {n}", x.len())));
            }
            if x.iter().any(|e| !e.is_finite() || *e < 0.0) {
                return Err(Error::invalid(format!("{name} has a negative or non-finite entry")));
            }
            let total: f64 = x.iter().sum();
            if (total - 1.0).abs() > 1e-12 {
                return Err(Error::invalid(format!("{name} sums to {total}, not 1")));
            }
        }
        Ok(())
    }
}

/// `x(0), ..., x(T)` and the limit `π`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
    pi: Vec<f64>,
    iterates: Vec<Vec<f64>>,
}

impl IterationTrace {
    /// Vectors need not be stochastic, so synthetic traces are allowed.
    pub fn new(iterates: Vec<Vec<f64>>, pi: Vec<f64>, labels: Option<Vec<String>>) -> Result<Self> {
        if pi.is_empty() {
            return Err(Error::invalid("limit vector is empty"));
        }
        if iterates.is_empty() {
            return Err(Error::invalid("trace has no iterates"));
        }
        if iterates.iter().any(|x| x.len() != pi.len()) {
            return Err(Error::invalid("iterates and limit have different lengths"));
        }
        if iterates
            .iter()
            .chain(std::iter::once(&pi))
            .flatten()
            .any(|x| !x.is_finite())
        {
            return Err(Error::invalid("trace contains a non-finite value"));
        }
        if let Some(l) = &labels {
            if l.len() != pi.len() {
                return Err(Error::invalid(format!("{} labels for {} nodes", l.len(), pi.len())));
            }
        }
        Ok(Self { labels, pi, iterates })
    }

    pub fn iterates(&self) -> &[Vec<f64>] {
        &self.iterates
    }

    pub fn iterate(&self, t: usize) -> &[f64] {
        &self.iterates[t]
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Index of the last stored iterate.
    pub fn horizon(&self) -> usize {
        self.iterates.len() - 1
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: IterationTrace = serde_json::from_str(text)?;
        Self::new(raw.iterates, raw.pi, raw.labels)
    }
}

/// `x(t+1) = α x(t) P + (1-α) (Σ x(t)) v`, with dangling mass sent along `v`.
fn step(g: &Graph, alpha: f64, v: &[f64], x: &[f64], next: &mut [f64]) {
    next.iter_mut().for_each(|e| *e = 0.0);
    let mut dangling = 0.0;
    let mut total = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        total += xi;
        let out = g.out_neighbors(i);
        if out.is_empty() {
            dangling += xi;
            continue;
        }
        let share = alpha * xi / out.len() as f64;
        for &j in out {
            next[j] += share;
        }
    }
    let teleport = (1.0 - alpha) * total + alpha * dangling;
    for (e, vj) in next.iter_mut().zip(v) {
        *e += teleport * vj;
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Stationary vector from `x(0) = v`, iterated until the step is `<= tol`.
pub fn stationary(g: &Graph, cfg: &PageRankConfig) -> Result<Vec<f64>> {
    cfg.validate(g.len())?;
    let mut x = cfg.v.clone();
    let mut next = vec![0.0; g.len()];
    let mut residual = f64::INFINITY;
    for _ in 0..cfg.max_solve_iter {
        step(g, cfg.alpha, &cfg.v, &x, &mut next);
        residual = max_abs_diff(&x, &next);
        std::mem::swap(&mut x, &mut next);
        if residual <= cfg.tol {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: cfg.max_solve_iter,
        residual,
    })
}

pub fn power_iterate(g: &Graph, cfg: &PageRankConfig) -> Result<IterationTrace> {
    cfg.validate(g.len())?;
    let mut iterates = Vec::with_capacity(cfg.max_iter + 1);
    iterates.push(cfg.x0.clone());
    for t in 0..cfg.max_iter {
        let mut next = vec![0.0; g.len()];
        step(g, cfg.alpha, &cfg.v, &iterates[t], &mut next);
        iterates.push(next);
    }
    let pi = stationary(g, cfg)?;
    IterationTrace::new(iterates, pi, g.labels().map(<[String]>::to_vec))
}

/// `R_i ∈ 1..=N`, 1 for the largest entry; ties go to the smaller index.
pub fn rank_order(x: &[f64]) -> Result<Vec<usize>> {
    let negated: Vec<f64> = x.iter().map(|v| -v).collect();
    Ok(argsort_row(&negated, TieRule::ByIndex)?
        .into_iter()
        .map(|r| r + 1)
        .collect())
}

/// `t*_i`: the first `t` from which node `i`'s rank equals its rank under `π`
/// for every stored iterate. `None` when the ranks still differ at the horizon.
pub fn rank_convergence_times(trace: &IterationTrace) -> Result<Vec<Option<usize>>> {
    let target = rank_order(trace.pi())?;
    let mut times: Vec<Option<usize>> = vec![Some(0); trace.len()];
    let mut settled = vec![true; trace.len()];
    for t in (0..=trace.horizon()).rev() {
        let ranks = rank_order(trace.iterate(t))?;
        for i in 0..trace.len() {
            if settled[i] && ranks[i] != target[i] {
                settled[i] = false;
                times[i] = if t == trace.horizon() { None } else { Some(t + 1) };
            }
        }
    }
    Ok(times)
}

/// `max_i t*_i`, or `None` if any node is unresolved.
pub fn rank_convergence_time(trace: &IterationTrace) -> Result<Option<usize>> {
    let times = rank_convergence_times(trace)?;
    Ok(times
        .iter()
        .copied()
        .collect::<Option<Vec<_>>>()
        .map(|t| t.into_iter().max().unwrap_or(0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn edge_lists() {
        let g = load_edge_list("0 1\n1 2\n", true).unwrap();
        assert_eq!(g.len(), 3);
        assert_eq!(g.edges().iter().copied().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
        assert!(g.labels().is_none());

        let g = load_edge_list("# names\na b\nb a\n", true).unwrap();
        assert_eq!(g.edges().len(), 1);
        assert_eq!(g.labels().unwrap(), ["a", "b"]);
        assert_eq!(g.node("b"), Some(1));

        let g = load_edge_list("a b\nb a\n", false).unwrap();
        assert_eq!(g.edges().len(), 2);

        match load_edge_list("0 1\n1 2 3\n", true) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(load_edge_list("# nothing\n", true).is_err());
    }

    #[test]
    fn transition_rows() {
        let g = Graph::new(4, [(0, 1), (0, 3), (2, 1)], false).unwrap();
        let v = vec![0.25; 4];
        assert_eq!(transition_row(&g, 0, &v), vec![0.0, 0.5, 0.0, 0.5]);
        assert_eq!(transition_row(&g, 1, &v), v);
        let path = load_edge_list("0 1\n1 2\n", true).unwrap();
        assert_eq!(transition_row(&path, 1, &[1.0 / 3.0; 3]), vec![0.5, 0.0, 0.5]);
    }

    fn cfg(n: usize, alpha: f64, iters: usize) -> PageRankConfig {
        PageRankConfig {
            alpha,
            max_iter: iters,
            ..PageRankConfig::new(n)
        }
    }

    #[test]
    fn pure_teleport() {
        let g = Graph::new(3, [(0, 1), (1, 2)], false).unwrap();
        let trace = power_iterate(&g, &cfg(3, 0.0, 2)).unwrap();
        assert_eq!(trace.iterate(1), &[1.0 / 3.0; 3]);
        assert!(trace.iterate(0) != trace.iterate(1));
    }

    #[test]
    fn single_edge_is_uniform() {
        let g = load_edge_list("0 1\n", true).unwrap();
        for alpha in [0.1, 0.5, 0.85] {
            let pi = stationary(&g, &cfg(2, alpha, 1)).unwrap();
            assert!((pi[0] - 0.5).abs() < 1e-15 && (pi[1] - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn star_center_ranks_first() {
        let g = load_edge_list("0 1\n0 2\n", true).unwrap();
        let pi = stationary(&g, &cfg(3, 0.85, 1)).unwrap();
        // Solving π = 0.85 π P + 0.05 by hand: π_0 = 0.05 + 0.85 (π_1 + π_2),
        // π_1 = π_2 = 0.05 + 0.425 π_0, giving π_0 = 0.135 / 0.2775.
        let center = 0.135 / 0.2775;
        let leaf = (1.0 - center) / 2.0;
        assert!((pi[0] - center).abs() < 1e-13);
        assert!((pi[1] - leaf).abs() < 1e-13 && (pi[2] - leaf).abs() < 1e-13);
        assert!(pi[0] > pi[1]);
    }

    #[test]
    fn invalid_configs() {
        let g = load_edge_list("0 1\n", true).unwrap();
        assert!(power_iterate(
            &g,
            &PageRankConfig {
                alpha: 1.5,
                ..PageRankConfig::new(2)
            }
        )
        .is_err());
        assert!(power_iterate(
            &g,
            &PageRankConfig {
                v: vec![0.7, 0.7],
                ..PageRankConfig::new(2)
            }
        )
        .is_err());
        assert!(power_iterate(
            &g,
            &PageRankConfig {
                x0: vec![1.0],
                ..PageRankConfig::new(2)
            }
        )
        .is_err());
        assert!(InitialVector::Given(vec![0.0, 0.0]).build(2).is_err());
        assert_eq!(InitialVector::Given(vec![1.0, 3.0]).build(2).unwrap(), vec![0.25, 0.75]);
        assert_eq!(
            InitialVector::Increasing.build(3).unwrap(),
            vec![1.0 / 6.0, 2.0 / 6.0, 3.0 / 6.0]
        );
    }

    #[test]
    fn periodic_walk_without_damping_fails_to_converge() {
        let g = load_edge_list("0 1\n", false).unwrap();
        let cfg = PageRankConfig {
            alpha: 1.0,
            v: vec![1.0, 0.0],
            max_solve_iter: 50,
            ..PageRankConfig::new(2)
        };
        assert!(matches!(stationary(&g, &cfg), Err(Error::NoConvergence { .. })));
    }

    #[test]
    fn rank_orders() {
        assert_eq!(rank_order(&[0.1, 0.4, 0.3, 0.2]).unwrap(), vec![4, 1, 2, 3]);
        assert_eq!(rank_order(&[2.0; 4]).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(rank_order(&[5.0]).unwrap(), vec![1]);
        assert!(rank_order(&[f64::NAN]).is_err());
    }

    #[test]
    fn convergence_times() {
        let pi = vec![0.1, 0.5, 0.4];
        let constant = IterationTrace::new(vec![pi.clone(); 4], pi.clone(), None).unwrap();
        assert_eq!(rank_convergence_times(&constant).unwrap(), vec![Some(0); 3]);

        // Nodes 1 and 2 swap until t = 9.
        let swapped = vec![0.1, 0.4, 0.5];
        let mut iterates = vec![swapped; 9];
        iterates.extend(vec![pi.clone(); 6]);
        let trace = IterationTrace::new(iterates, pi.clone(), None).unwrap();
        assert_eq!(rank_convergence_times(&trace).unwrap(), vec![Some(0), Some(9), Some(9)]);
        assert_eq!(rank_convergence_time(&trace).unwrap(), Some(9));

        let unresolved = IterationTrace::new(vec![vec![0.1, 0.4, 0.5]], pi, None).unwrap();
        assert_eq!(rank_convergence_times(&unresolved).unwrap(), vec![Some(0), None, None]);
        assert_eq!(rank_convergence_time(&unresolved).unwrap(), None);

        let g = load_edge_list("0 1\n", true).unwrap();
        let trace = power_iterate(
            &g,
            &PageRankConfig {
                x0: vec![0.5, 0.5],
                ..cfg(2, 0.85, 5)
            },
        )
        .unwrap();
        assert_eq!(rank_convergence_times(&trace).unwrap(), vec![Some(0); 2]);
    }

    #[test]
    fn trace_json_round_trip() {
        let g = load_edge_list("a b\nb c\n", true).unwrap();
        let trace = power_iterate(&g, &cfg(3, 0.85, 3)).unwrap();
        assert_eq!(IterationTrace::from_json(&trace.to_json().unwrap()).unwrap(), trace);
    }

    fn random_graph() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, bool)> {
        (2usize..20).prop_flat_map(|n| (Just(n), prop::collection::vec((0..n, 0..n), 0..60), any::<bool>()))
    }

    proptest! {
        #[test]
        fn iterates_are_stochastic((n, edges, undirected) in random_graph(), alpha in 0.0..0.99f64) {
            let g = Graph::new(n, edges, undirected).unwrap();
            let c = cfg(n, alpha, 20);
            let trace = power_iterate(&g, &c).unwrap();
            for x in trace.iterates().iter().chain(std::iter::once(&trace.pi().to_vec())) {
                prop_assert!((x.iter().sum::<f64>() - 1.0).abs() <= 1e-10);
                prop_assert!(x.iter().all(|&e| e >= 0.0));
            }
            let mut next = vec![0.0; n];
            step(&g, alpha, &c.v, trace.pi(), &mut next);
            prop_assert!(max_abs_diff(&next, trace.pi()) <= 10.0 * c.tol);
        }

        #[test]
        fn rank_order_scale_invariant(x in prop::collection::vec(0.0..1.0f64, 1..30), exp in -10i32..10) {
            let c = 2f64.powi(exp);
            let scaled: Vec<f64> = x.iter().map(|v| v * c).collect();
            prop_assert_eq!(rank_order(&x).unwrap(), rank_order(&scaled).unwrap());
        }
    }
}
