//! Lloyd's k-means with k-means++ seeding.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Codebook, CodebookMethod, ConceptPool};
use crate::error::{Error, Result};
use crate::exec::Exec;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmeansParams {
    pub seed: u64,
    pub max_iters: usize,
    /// Stop once no centroid moves farther than this (L2).
    pub tol: f64,
    pub exec: Exec,
}

impl Default for KmeansParams {
    fn default() -> Self {
        Self {
            seed: 0,
            max_iters: 100,
            tol: 1e-4,
            exec: Exec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KmeansRun {
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// Sum of squared distances to the assigned centroid, one entry per assignment step.
    pub objective: Vec<f64>,
    pub iterations: usize,
}

fn sq_dist(x: &[f32], c: &[f64]) -> f64 {
    x.iter().zip(c).map(|(&a, &b)| (a as f64 - b).powi(2)).sum()
}

/// Nearest centroid (ties to the lowest index) and its squared distance.
fn nearest(x: &[f32], centroids: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (k, c) in centroids.iter().enumerate() {
        let d = sq_dist(x, c);
        if d < best.1 {
            best = (k, d);
        }
    }
    best
}

fn plus_plus_init(points: &[&[f32]], p: usize, rng: &mut ChaCha8Rng, exec: Exec) -> Vec<Vec<f64>> {
    let n = points.len();
    let to_f64 = |x: &[f32]| x.iter().map(|&v| v as f64).collect::<Vec<f64>>();
    let first = rng.random_range(0..n);
    let mut chosen = vec![false; n];
    chosen[first] = true;
    let mut centroids = vec![to_f64(points[first])];
    let mut d2: Vec<f64> = exec.map(points, |x| sq_dist(x, &centroids[0]));
    while centroids.len() < p {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut pick = None;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 {
                    pick = Some(i);
                    if r < w {
                        break;
                    }
                    r -= w;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // Only duplicates of existing centers remain.
            let free: Vec<usize> = (0..n).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[next] = true;
        let c = to_f64(points[next]);
        let updated = exec.map_range(n, |i| d2[i].min(sq_dist(points[i], &c)));
        d2 = updated;
        centroids.push(c);
    }
    centroids
}

/// Clusters `points` into `p` groups; deterministic given `params.seed`, and identical
/// under sequential and parallel execution.
pub fn kmeans_points(points: &[&[f32]], p: usize, params: &KmeansParams) -> Result<KmeansRun> {
    if p == 0 {
        return Err(Error::Config("p must be positive".into()));
    }
    if points.len() < p {
        return Err(Error::InsufficientData(format!(
            "{} points for {p} clusters",
            points.len()
        )));
    }
    let dim = points[0].len();
    if points.iter().any(|x| x.len() != dim) {
        return Err(Error::Dimension("points have differing dimensions".into()));
    }
    let exec = params.exec;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut centroids = plus_plus_init(points, p, &mut rng, exec);
    let mut objective = Vec::new();
    let mut previous: Option<Vec<usize>> = None;
    let mut iterations = 0;

    let assignments = loop {
        let assigned: Vec<(usize, f64)> = exec.map(points, |x| nearest(x, &centroids));
        objective.push(assigned.iter().map(|a| a.1).sum());
        let labels: Vec<usize> = assigned.iter().map(|a| a.0).collect();
        if iterations >= params.max_iters || previous.as_ref() == Some(&labels) {
            break labels;
        }
        iterations += 1;

        let mut sums = vec![vec![0.0f64; dim]; p];
        let mut counts = vec![0usize; p];
        for (x, &k) in points.iter().zip(&labels) {
            counts[k] += 1;
            sums[k].iter_mut().zip(x.iter()).for_each(|(s, &v)| *s += v as f64);
        }
        let mut far: Vec<f64> = assigned.iter().map(|a| a.1).collect();
        let mut moved = 0.0f64;
        for k in 0..p {
            let next = if counts[k] > 0 {
                sums[k].iter().map(|s| s / counts[k] as f64).collect()
            } else {
                // Empty cluster: take over the point farthest from its centroid.
                let (i, d) = far
                    .iter()
                    .enumerate()
                    .fold((0, -1.0), |best, (i, &d)| if d > best.1 { (i, d) } else { best });
                if d > 0.0 {
                    far[i] = 0.0;
                    points[i].iter().map(|&v| v as f64).collect()
                } else {
                    centroids[k].clone()
                }
            };
            moved = moved.max(sq_dist_f64(&next, &centroids[k]).sqrt());
            centroids[k] = next;
        }
        previous = Some(labels);
        if moved < params.tol {
            let assigned: Vec<(usize, f64)> = exec.map(points, |x| nearest(x, &centroids));
            objective.push(assigned.iter().map(|a| a.1).sum());
            break assigned.into_iter().map(|a| a.0).collect();
        }
    };

    Ok(KmeansRun {
        centroids,
        assignments,
        objective,
        iterations,
    })
}

fn sq_dist_f64(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// k-means codebook over a concept pool.
pub fn kmeans(pool: &ConceptPool, p: usize, params: &KmeansParams) -> Result<Codebook> {
    let run = kmeans_points(&pool.vectors(), p, params)?;
    Ok(Codebook {
        dim: pool.dim,
        centroids: run
            .centroids
            .iter()
            .map(|c| c.iter().map(|&x| x as f32).collect())
            .collect(),
        method: CodebookMethod::Kmeans,
        labels: None,
        built_with_stop_words: pool.includes_stop_words,
        built_contextualized: pool.contextualized,
    })
}
