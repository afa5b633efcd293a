//! K-means centroid selection and the shared radial-basis width: the
//! clustering half of the dynamic-filling strategy. Clustering runs once on
//! the pre-filled matrix; the basis stays fixed during training.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{sq_dist, Matrix};

/// Fixed Gaussian basis: `h` centroids sharing one width.
#[derive(Clone, Debug)]
pub struct RbfBasis {
    pub centroids: Matrix,
    pub width: f64,
}

impl RbfBasis {
    pub fn h(&self) -> usize {
        self.centroids.rows()
    }

    /// Cluster the (complete) data and derive the shared width.
    pub fn fit(data: &Matrix, k: usize, cfg: &KmeansConfig) -> Result<Self> {
        let centroids = kmeans(data, k, cfg)?;
        let width = compute_width(&centroids)?;
        Ok(Self { centroids, width })
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct KmeansConfig {
    pub max_iters: usize,
    pub tol: f64,
    pub seed: u64,
}

impl Default for KmeansConfig {
    fn default() -> Self {
        Self {
            max_iters: 100,
            tol: 1e-6,
            seed: 0,
        }
    }
}

/// Lloyd's algorithm from k-means++-style seeding. Stops when the largest
/// centroid displacement drops below `tol` or `max_iters` is reached. Empty
/// clusters are re-seeded to the point farthest from its assigned centroid.
pub fn kmeans(data: &Matrix, k: usize, cfg: &KmeansConfig) -> Result<Matrix> {
    let (n, s) = (data.rows(), data.cols());
    if k == 0 || k > n {
        return Err(Error::KmeansTooManyClusters { k, n });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut centroids = plus_plus_seed(data, k, &mut rng);

    let mut assign = vec![0usize; n];
    for _ in 0..cfg.max_iters {
        for (i, a) in assign.iter_mut().enumerate() {
            *a = nearest(&centroids, data.row(i)).0;
        }
        let mut counts = vec![0usize; k];
        let mut sums = Matrix::zeros(k, s);
        for (i, &a) in assign.iter().enumerate() {
            counts[a] += 1;
            for (j, &v) in data.row(i).iter().enumerate() {
                *sums.at_mut(a, j) += v;
            }
        }
        let mut new_centroids = centroids.clone();
        for c in 0..k {
            if counts[c] == 0 {
                let far = farthest_point(data, &centroids, &assign);
                new_centroids.row_mut(c).copy_from_slice(data.row(far));
            } else {
                for j in 0..s {
                    *new_centroids.at_mut(c, j) = sums.at(c, j) / counts[c] as f64;
                }
            }
        }
        let shift = (0..k)
            .map(|c| sq_dist(centroids.row(c), new_centroids.row(c)).sqrt())
            .fold(0.0, f64::max);
        centroids = new_centroids;
        if shift < cfg.tol {
            break;
        }
    }
    Ok(centroids)
}

fn plus_plus_seed(data: &Matrix, k: usize, rng: &mut impl Rng) -> Matrix {
    let n = data.rows();
    let mut centroids = Matrix::zeros(k, data.cols());
    let first = rng.gen_range(0..n);
    centroids.row_mut(0).copy_from_slice(data.row(first));
    let mut d2: Vec<f64> = (0..n)
        .map(|i| sq_dist(data.row(i), centroids.row(0)))
        .collect();
    for c in 1..k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen_range(0.0..total);
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        centroids.row_mut(c).copy_from_slice(data.row(pick));
        for i in 0..n {
            let d = sq_dist(data.row(i), centroids.row(c));
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

fn nearest(centroids: &Matrix, row: &[f64]) -> (usize, f64) {
    let mut best = (0usize, f64::INFINITY);
    for c in 0..centroids.rows() {
        let d = sq_dist(centroids.row(c), row);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn farthest_point(data: &Matrix, centroids: &Matrix, assign: &[usize]) -> usize {
    let mut best = (0usize, -1.0);
    for (i, &a) in assign.iter().enumerate() {
        let d = sq_dist(data.row(i), centroids.row(a));
        if d > best.1 {
            best = (i, d);
        }
    }
    best.0
}

/// Sum of squared distances from each point to its nearest centroid.
pub fn kmeans_objective(data: &Matrix, centroids: &Matrix) -> f64 {
    (0..data.rows())
        .map(|i| nearest(centroids, data.row(i)).1)
        .sum()
}

/// Shared width: `c_max / sqrt(2h)` where `c_max` is the maximum pairwise
/// distance among the `h` centroids.
pub fn compute_width(centroids: &Matrix) -> Result<f64> {
    let h = centroids.rows();
    if h < 2 {
        return Err(Error::InvalidSpec("need at least 2 centroids".into()));
    }
    let c_max = max_pairwise_distance(centroids);
    if c_max <= 0.0 {
        return Err(Error::DegenerateCentroids { k: h });
    }
    Ok(c_max / (2.0 * h as f64).sqrt())
}

/// Brute-force O(h^2) scan; kept separate so the width formula can be
/// cross-checked against it.
pub fn max_pairwise_distance(centroids: &Matrix) -> f64 {
    let h = centroids.rows();
    let mut c_max = 0.0f64;
    for a in 0..h {
        for b in (a + 1)..h {
            c_max = c_max.max(sq_dist(centroids.row(a), centroids.row(b)).sqrt());
        }
    }
    c_max
}
