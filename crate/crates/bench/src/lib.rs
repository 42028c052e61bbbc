//! Input generators shared by the benchmarks.

use knnph::{Graph, PointCloud};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn uniform_cloud(n: usize, p: usize, seed: u64) -> PointCloud {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PointCloud::new((0..n).map(|_| (0..p).map(|_| rng.gen()).collect()).collect()).unwrap()
}

/// Connected undirected graph: a random spanning tree plus extra random edges.
pub fn random_graph(n: usize, edges: usize, seed: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut list: Vec<(usize, usize)> = (1..n).map(|i| (rng.gen_range(0..i), i)).collect();
    while list.len() < edges {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            list.push((a, b));
        }
    }
    Graph::new(n, list, true).unwrap()
}
