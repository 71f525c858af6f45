//! Shared helpers for the integration suites: independent brute-force
//! oracles and small random dataset generators. Everything here is written
//! against first principles, not against the library's training path.

use popf::dataset::{Dataset, DistanceMetric, RngSeed, Sample};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// All pairwise distances of a dataset under the metric.
pub fn distance_matrix(dataset: &Dataset, metric: DistanceMetric) -> Vec<Vec<f64>> {
    let n = dataset.len();
    let mut m = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            m[i][j] =
                popf::distance(&dataset.samples[i], &dataset.samples[j], metric).unwrap();
        }
    }
    m
}

/// Minimax path cost from the prototype set to every node, by exhaustive
/// enumeration of simple paths. Exponential; fine for tiny graphs.
pub fn brute_force_minimax_costs(dataset: &Dataset, prototypes: &[bool], metric: DistanceMetric) -> Vec<f64> {
    let n = dataset.len();
    let distances = distance_matrix(dataset, metric);
    let mut best = vec![f64::INFINITY; n];

    fn explore(
        node: usize,
        running_max: f64,
        visited: &mut Vec<bool>,
        best: &mut Vec<f64>,
        distances: &[Vec<f64>],
    ) {
        if running_max < best[node] {
            best[node] = running_max;
        }
        for next in 0..distances.len() {
            if !visited[next] {
                visited[next] = true;
                explore(
                    next,
                    running_max.max(distances[node][next]),
                    visited,
                    best,
                    distances,
                );
                visited[next] = false;
            }
        }
    }

    for start in 0..n {
        if prototypes[start] {
            let mut visited = vec![false; n];
            visited[start] = true;
            explore(start, 0.0, &mut visited, &mut best, &distances);
        }
    }
    best
}

/// Every spanning tree of the complete graph on `n` nodes, as edge lists.
pub fn all_spanning_trees(n: usize) -> Vec<Vec<(usize, usize)>> {
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .collect();
    let mut trees = Vec::new();
    let m = edges.len();
    for mask in 0u32..(1 << m) {
        if mask.count_ones() as usize != n - 1 {
            continue;
        }
        let chosen: Vec<(usize, usize)> = (0..m)
            .filter(|&k| mask & (1 << k) != 0)
            .map(|k| edges[k])
            .collect();
        // acyclic + right edge count + connected = spanning tree
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut Vec<usize>, x: usize) -> usize {
            if parent[x] != x {
                let root = find(parent, parent[x]);
                parent[x] = root;
            }
            parent[x]
        }
        let mut acyclic = true;
        for &(a, b) in &chosen {
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                acyclic = false;
                break;
            }
            parent[ra] = rb;
        }
        if acyclic {
            trees.push(chosen);
        }
    }
    trees
}

/// Random dataset with 2..=3 classes and distinct pairwise distances in
/// general position (random reals collide with probability zero).
pub fn random_small_dataset(rng: &mut ChaCha8Rng, max_samples: usize) -> Dataset {
    let n = rng.random_range(3..=max_samples);
    let classes = rng.random_range(2..=3.min(n));
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        // guarantee every class appears at least once
        let label = if i < classes { i } else { rng.random_range(0..classes) };
        let features = vec![rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)];
        samples.push(Sample::new(features, label as i64 + 1));
    }
    Dataset::new(format!("random-{n}"), 2, samples).unwrap()
}

/// Convenience seeded generator.
pub fn rng(seed: u64) -> ChaCha8Rng {
    RngSeed(seed).rng()
}
