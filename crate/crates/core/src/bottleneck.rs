//! Bottleneck distance between persistence diagrams.
//!
//! Finite points are matched exactly: the answer is one of the pairwise L∞
//! distances or half-persistences, so a binary search over those candidates
//! with a bipartite perfect-matching test is exact. Points that never die are
//! matched separately by sorted birth.

use std::collections::VecDeque;

use crate::persistence::PersistenceDiagram;

/// Finite off-diagonal points on both sides and a distance threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchingProblem {
    pub left: Vec<(f64, f64)>,
    pub right: Vec<(f64, f64)>,
    pub threshold: f64,
}

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// L∞ distance to the diagonal.
fn to_diagonal(a: (f64, f64)) -> f64 {
    (a.1 - a.0) / 2.0
}

/// Whether every point can be matched to a partner or to the diagonal within
/// `threshold`.
///
/// Left vertices are `left[0..n]` then the diagonal copies of `right`; right
/// vertices are `right[0..m]` then the diagonal copies of `left`. Diagonal
/// copies match each other for free.
pub fn feasible_at(p: &MatchingProblem) -> bool {
    let (n, m) = (p.left.len(), p.right.len());
    let t = p.threshold;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
    for (i, &a) in p.left.iter().enumerate() {
        for (j, &b) in p.right.iter().enumerate() {
            if linf(a, b) <= t {
                adj[i].push(j);
            }
        }
        if to_diagonal(a) <= t {
            adj[i].push(m + i);
        }
    }
    for (j, &b) in p.right.iter().enumerate() {
        if to_diagonal(b) <= t {
            adj[n + j].push(j);
        }
        adj[n + j].extend(m..m + n);
    }
    hopcroft_karp(&adj, n + m) == n + m
}

const FREE: usize = usize::MAX;

/// Size of a maximum matching. `adj[u]` lists right-side neighbors of left vertex `u`.
fn hopcroft_karp(adj: &[Vec<usize>], right_len: usize) -> usize {
    let left_len = adj.len();
    let mut match_left = vec![FREE; left_len];
    let mut match_right = vec![FREE; right_len];
    let mut dist = vec![0usize; left_len];
    let mut size = 0;
    loop {
        let mut queue = VecDeque::new();
        for u in 0..left_len {
            if match_left[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                match match_right[v] {
                    FREE => found = true,
                    w if dist[w] == usize::MAX => {
                        dist[w] = dist[u] + 1;
                        queue.push_back(w);
                    }
                    _ => {}
                }
            }
        }
        if !found {
            return size;
        }
        for u in 0..left_len {
            if match_left[u] == FREE && augment(u, adj, &mut match_left, &mut match_right, &mut dist) {
                size += 1;
            }
        }
    }
}

fn augment(
    u: usize,
    adj: &[Vec<usize>],
    match_left: &mut [usize],
    match_right: &mut [usize],
    dist: &mut [usize],
) -> bool {
    for &v in &adj[u] {
        let w = match_right[v];
        if w == FREE || (dist[w] == dist[u] + 1 && augment(w, adj, match_left, match_right, dist)) {
            match_left[u] = v;
            match_right[v] = u;
            return true;
        }
    }
    dist[u] = usize::MAX;
    false
}

/// Exact bottleneck distance between two multisets of finite points.
pub fn bottleneck_finite(left: &[(f64, f64)], right: &[(f64, f64)]) -> f64 {
    let mut candidates: Vec<f64> = Vec::with_capacity(left.len() * right.len() + left.len() + right.len() + 1);
    candidates.push(0.0);
    for &a in left {
        candidates.push(to_diagonal(a));
        candidates.extend(right.iter().map(|&b| linf(a, b)));
    }
    candidates.extend(right.iter().map(|&b| to_diagonal(b)));
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let mut problem = MatchingProblem {
        left: left.to_vec(),
        right: right.to_vec(),
        threshold: 0.0,
    };
    // The largest candidate is always feasible (match everything to the diagonal).
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        problem.threshold = candidates[mid];
        if feasible_at(&problem) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

/// Bottleneck distance restricted to dimension `dim`. Essential classes
/// (infinite death) are matched by sorted birth; differing counts give `inf`.
pub fn bottleneck(a: &PersistenceDiagram, b: &PersistenceDiagram, dim: usize) -> f64 {
    let split = |d: &PersistenceDiagram| {
        let (inf, fin): (Vec<_>, Vec<_>) = d.pairs(dim).into_iter().partition(|p| p.1.is_infinite());
        let mut births: Vec<f64> = inf.into_iter().map(|p| p.0).collect();
        births.sort_by(f64::total_cmp);
        (births, fin)
    };
    let (inf_a, fin_a) = split(a);
    let (inf_b, fin_b) = split(b);
    if inf_a.len() != inf_b.len() {
        return f64::INFINITY;
    }
    let essential = inf_a.iter().zip(&inf_b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    essential.max(bottleneck_finite(&fin_a, &fin_b))
}
