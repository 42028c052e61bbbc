//! Independent reference implementations used to check the library: dense
//! GF(2) homology and brute-force bottleneck matching. Nothing here calls
//! into the reduction or matching code under test.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

/// Rank over GF(2) of the given row vectors, by dense elimination.
pub fn gf2_rank(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, p);
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                let pivot = rows[rank].clone();
                for (x, y) in rows[r].iter_mut().zip(pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the null space of `m` (rows indexed by faces, columns by simplices),
/// returned as vectors over the columns.
pub fn gf2_kernel(m: &[Vec<bool>], ncols: usize) -> Vec<Vec<bool>> {
    // Column-reduce, tracking the combination that produced each column.
    let mut cols: Vec<Vec<bool>> = (0..ncols).map(|j| m.iter().map(|row| row[j]).collect()).collect();
    let mut combo: Vec<Vec<bool>> = (0..ncols).map(|j| (0..ncols).map(|k| k == j).collect()).collect();
    let mut pivot_owner: HashMap<usize, usize> = HashMap::new();
    let mut kernel = Vec::new();
    for j in 0..ncols {
        loop {
            let low = cols[j].iter().rposition(|&b| b);
            match low {
                None => {
                    kernel.push(combo[j].clone());
                    break;
                }
                Some(l) => match pivot_owner.get(&l) {
                    Some(&k) => {
                        let (ck, mk) = (cols[k].clone(), combo[k].clone());
                        for (x, y) in cols[j].iter_mut().zip(ck) {
                            *x ^= y;
                        }
                        for (x, y) in combo[j].iter_mut().zip(mk) {
                            *x ^= y;
                        }
                    }
                    None => {
                        pivot_owner.insert(l, j);
                        break;
                    }
                },
            }
        }
    }
    kernel
}

/// A finite simplicial complex given by its simplices (sorted vertex lists).
pub struct DenseComplex {
    pub simplices: Vec<Vec<usize>>,
}

impl DenseComplex {
    fn of_dim(&self, k: usize) -> Vec<&Vec<usize>> {
        self.simplices.iter().filter(|s| s.len() == k + 1).collect()
    }

    /// Matrix of `∂_k`: rows are (k-1)-simplices, columns k-simplices.
    pub fn boundary(&self, k: usize) -> (Vec<Vec<bool>>, usize) {
        let cols = self.of_dim(k);
        if k == 0 {
            return (Vec::new(), cols.len());
        }
        let rows = self.of_dim(k - 1);
        let row_of: HashMap<&Vec<usize>, usize> = rows.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        let mut m = vec![vec![false; cols.len()]; rows.len()];
        for (j, s) in cols.iter().enumerate() {
            for skip in 0..s.len() {
                let face: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != skip)
                    .map(|(_, &v)| v)
                    .collect();
                m[row_of[&face]][j] = true;
            }
        }
        (m, cols.len())
    }

    pub fn count(&self, k: usize) -> usize {
        self.of_dim(k).len()
    }

    /// `β_k = dim ker ∂_k - rank ∂_{k+1}`.
    pub fn betti(&self, k: usize) -> usize {
        let (dk, nk) = self.boundary(k);
        let rank_k = if k == 0 { 0 } else { gf2_rank(dk) };
        let (dk1, _) = self.boundary(k + 1);
        nk - rank_k - gf2_rank(dk1)
    }
}

/// Persistent Betti number `β_k^{i,j}`: rank of `H_k(K_i) -> H_k(K_j)` for
/// `K_i ⊆ K_j`, computed as `dim(Z_k(K_i) + B_k(K_j)) - dim B_k(K_j)`.
pub fn persistent_betti(small: &DenseComplex, big: &DenseComplex, k: usize) -> usize {
    let big_k: Vec<&Vec<usize>> = big.simplices.iter().filter(|s| s.len() == k + 1).collect();
    let pos: HashMap<&Vec<usize>, usize> = big_k.iter().enumerate().map(|(i, s)| (*s, i)).collect();
    let small_k: Vec<&Vec<usize>> = small.simplices.iter().filter(|s| s.len() == k + 1).collect();

    // Cycles of the small complex, embedded as chains of the big one.
    let (dk, nk) = small.boundary(k);
    let z = if k == 0 {
        (0..nk).map(|j| (0..nk).map(|i| i == j).collect()).collect()
    } else {
        gf2_kernel(&dk, nk)
    };
    let embed = |v: &Vec<bool>| {
        let mut out = vec![false; big_k.len()];
        for (i, &b) in v.iter().enumerate() {
            if b {
                out[pos[small_k[i]]] = true;
            }
        }
        out
    };
    let z: Vec<Vec<bool>> = z.iter().map(embed).collect();

    // Boundaries of the big complex, as column vectors of ∂_{k+1}.
    let (dk1, nk1) = big.boundary(k + 1);
    let b: Vec<Vec<bool>> = (0..nk1).map(|j| dk1.iter().map(|row| row[j]).collect()).collect();
    let rank_b = gf2_rank(b.clone());
    let mut both = b;
    both.extend(z);
    gf2_rank(both) - rank_b
}

/// A random face-closed complex on `n <= 8` vertices with monotone integer
/// values in `0..=max_value`, as `(vertices, value)` pairs. Vertices get 0.
pub fn random_filtered_complex(rng: &mut impl Rng, n: usize, top_dim: usize, max_value: u32) -> Vec<(Vec<usize>, f64)> {
    let mut set: BTreeSet<Vec<usize>> = BTreeSet::new();
    for v in 0..n {
        set.insert(vec![v]);
    }
    let generators = rng.gen_range(1..=3 * n);
    for _ in 0..generators {
        let size = rng.gen_range(2..=(top_dim + 1).min(n).max(2));
        let mut verts: Vec<usize> = (0..n).collect();
        for i in 0..size.min(n) {
            let j = rng.gen_range(i..n);
            verts.swap(i, j);
        }
        let mut chosen: Vec<usize> = verts[..size.min(n)].to_vec();
        chosen.sort_unstable();
        // Add every face of the chosen simplex.
        let m = chosen.len();
        for mask in 1u32..(1 << m) {
            set.insert((0..m).filter(|b| mask & (1 << b) != 0).map(|b| chosen[b]).collect());
        }
    }
    let mut by_size: Vec<Vec<usize>> = set.into_iter().collect();
    by_size.sort_by_key(Vec::len);
    let mut value: HashMap<Vec<usize>, u32> = HashMap::new();
    let mut out = Vec::new();
    for s in by_size {
        let own = if s.len() == 1 { 0 } else { rng.gen_range(0..=max_value) };
        let faces_max = (0..s.len())
            .filter(|_| s.len() > 1)
            .map(|skip| {
                let f: Vec<usize> = s
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != skip)
                    .map(|(_, &v)| v)
                    .collect();
                value[&f]
            })
            .max()
            .unwrap_or(0);
        let v = own.max(faces_max);
        value.insert(s.clone(), v);
        out.push((s, f64::from(v)));
    }
    out
}

fn linf(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

/// Minimum over all partial matchings (unmatched points go to the diagonal)
/// of the largest cost, by exhaustive enumeration.
pub fn brute_bottleneck(left: &[(f64, f64)], right: &[(f64, f64)]) -> f64 {
    fn go(i: usize, left: &[(f64, f64)], right: &[(f64, f64)], used: &mut Vec<bool>, cost: f64, best: &mut f64) {
        if cost >= *best {
            return;
        }
        if i == left.len() {
            let rest = right
                .iter()
                .zip(used.iter())
                .filter(|(_, &u)| !u)
                .map(|(p, _)| (p.1 - p.0) / 2.0)
                .fold(cost, f64::max);
            if rest < *best {
                *best = rest;
            }
            return;
        }
        let a = left[i];
        go(i + 1, left, right, used, cost.max((a.1 - a.0) / 2.0), best);
        for j in 0..right.len() {
            if !used[j] {
                used[j] = true;
                go(i + 1, left, right, used, cost.max(linf(a, right[j])), best);
                used[j] = false;
            }
        }
    }
    let mut best = f64::INFINITY;
    go(0, left, right, &mut vec![false; right.len()], 0.0, &mut best);
    best
}

/// Random orthogonal `p x p` matrix by Gram-Schmidt on a random matrix.
pub fn random_orthogonal(rng: &mut impl Rng, p: usize) -> Vec<Vec<f64>> {
    loop {
        let mut q: Vec<Vec<f64>> = Vec::with_capacity(p);
        let mut ok = true;
        for _ in 0..p {
            let mut v: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
            for u in &q {
                let dot: f64 = v.iter().zip(u).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= dot * y;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm < 1e-3 {
                ok = false;
                break;
            }
            q.push(v.into_iter().map(|x| x / norm).collect());
        }
        if ok {
            return q;
        }
    }
}

/// `x -> Q x + shift` applied to every point.
pub fn apply_isometry(points: &[Vec<f64>], q: &[Vec<f64>], shift: &[f64]) -> Vec<Vec<f64>> {
    points
        .iter()
        .map(|x| {
            q.iter()
                .zip(shift)
                .map(|(row, s)| row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() + s)
                .collect()
        })
        .collect()
}
