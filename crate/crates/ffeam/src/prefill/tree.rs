use rand::seq::SliceRandom;
use rand::Rng;

use crate::matrix::Matrix;

use super::ForestConfig;

/// CART regression tree: greedy variance-minimizing splits.
#[derive(Clone, Debug)]
pub struct RegressionTree {
    nodes: Vec<Node>,
}

#[derive(Clone, Debug)]
enum Node {
    Leaf {
        prediction: f64,
    },
    Split {
        column: usize,
        threshold: f64,
        left: usize,
        right: usize,
    },
}

impl RegressionTree {
    /// Fit on rows `idx` of `x` (targets indexed the same way).
    pub fn fit(
        x: &Matrix,
        y: &[f64],
        idx: &[usize],
        cfg: &ForestConfig,
        rng: &mut impl Rng,
    ) -> Self {
        let mut tree = RegressionTree { nodes: Vec::new() };
        let mut idx = idx.to_vec();
        tree.grow(x, y, &mut idx, 0, cfg, rng);
        tree
    }

    fn grow(
        &mut self,
        x: &Matrix,
        y: &[f64],
        idx: &mut [usize],
        depth: usize,
        cfg: &ForestConfig,
        rng: &mut impl Rng,
    ) -> usize {
        let node_id = self.nodes.len();
        let mean = idx.iter().map(|&i| y[i]).sum::<f64>() / idx.len() as f64;
        self.nodes.push(Node::Leaf { prediction: mean });

        if depth >= cfg.max_depth || idx.len() < 2 * cfg.min_samples_leaf {
            return node_id;
        }
        let sse: f64 = idx.iter().map(|&i| (y[i] - mean) * (y[i] - mean)).sum();
        if sse <= 0.0 {
            return node_id;
        }

        let Some((column, threshold)) = best_split(x, y, idx, cfg, rng) else {
            return node_id;
        };
        // Partition in place, preserving relative order for determinism.
        let (mut left, mut right): (Vec<usize>, Vec<usize>) =
            idx.iter().partition(|&&i| x.at(i, column) <= threshold);
        let left_id = self.grow(x, y, &mut left, depth + 1, cfg, rng);
        let right_id = self.grow(x, y, &mut right, depth + 1, cfg, rng);
        self.nodes[node_id] = Node::Split {
            column,
            threshold,
            left: left_id,
            right: right_id,
        };
        node_id
    }

    pub fn predict(&self, row: &[f64]) -> f64 {
        let mut node = 0usize;
        loop {
            match &self.nodes[node] {
                Node::Leaf { prediction } => return *prediction,
                Node::Split {
                    column,
                    threshold,
                    left,
                    right,
                } => {
                    node = if row[*column] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_single_leaf(&self) -> bool {
        self.nodes.len() == 1
    }
}

/// Best (column, threshold) over a random feature subset, minimizing the
/// summed child SSE. Returns None when no admissible split exists.
fn best_split(
    x: &Matrix,
    y: &[f64],
    idx: &[usize],
    cfg: &ForestConfig,
    rng: &mut impl Rng,
) -> Option<(usize, f64)> {
    let p = x.cols();
    let n_features = ((cfg.feature_subsample * p as f64).ceil() as usize).clamp(1, p);
    let mut cols: Vec<usize> = (0..p).collect();
    cols.shuffle(rng);
    cols.truncate(n_features);
    cols.sort_unstable(); // fixed evaluation order given the chosen subset

    let mut best: Option<(f64, usize, f64)> = None;
    let mut order = idx.to_vec();
    for &col in &cols {
        order.sort_by(|&a, &b| x.at(a, col).partial_cmp(&x.at(b, col)).unwrap());
        // prefix sums over the sorted order
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let total: f64 = order.iter().map(|&i| y[i]).sum();
        let total_sq: f64 = order.iter().map(|&i| y[i] * y[i]).sum();
        let n = order.len();
        for split in 1..n {
            let i_prev = order[split - 1];
            sum += y[i_prev];
            sum_sq += y[i_prev] * y[i_prev];
            if split < cfg.min_samples_leaf || n - split < cfg.min_samples_leaf {
                continue;
            }
            let lo = x.at(i_prev, col);
            let hi = x.at(order[split], col);
            if hi <= lo {
                continue; // ties: no admissible threshold between equal values
            }
            let nl = split as f64;
            let nr = (n - split) as f64;
            let sse_l = sum_sq - sum * sum / nl;
            let r_sum = total - sum;
            let sse_r = (total_sq - sum_sq) - r_sum * r_sum / nr;
            let cost = sse_l + sse_r;
            if best.map_or(true, |(c, _, _)| cost < c) {
                best = Some((cost, col, 0.5 * (lo + hi)));
            }
        }
    }
    best.map(|(_, col, thr)| (col, thr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cfg() -> ForestConfig {
        ForestConfig::default()
    }

    #[test]
    fn constant_targets_give_single_leaf() {
        let x = Matrix::from_fn(10, 2, |i, j| (i + j) as f64);
        let y = vec![3.5; 10];
        let idx: Vec<usize> = (0..10).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let t = RegressionTree::fit(&x, &y, &idx, &cfg(), &mut rng);
        assert!(t.is_single_leaf());
        assert_eq!(t.predict(&[0.0, 0.0]), 3.5);
    }

    #[test]
    fn linear_target_fits_well() {
        let x = Matrix::from_fn(100, 1, |i, _| i as f64 / 100.0);
        let y: Vec<f64> = (0..100).map(|i| i as f64 / 100.0).collect();
        let idx: Vec<usize> = (0..100).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = RegressionTree::fit(&x, &y, &idx, &cfg(), &mut rng);
        let mean = 0.495;
        let var = y.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / 100.0;
        let mse = (0..100)
            .map(|i| {
                let p = t.predict(x.row(i));
                (p - y[i]) * (p - y[i])
            })
            .sum::<f64>()
            / 100.0;
        assert!(mse < var / 10.0, "mse {mse} vs var {var}");
    }

    #[test]
    fn huge_min_leaf_forces_single_leaf_mean() {
        let x = Matrix::from_fn(20, 1, |i, _| i as f64);
        let y: Vec<f64> = (0..20).map(|i| i as f64).collect();
        let idx: Vec<usize> = (0..20).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut c = cfg();
        c.min_samples_leaf = 20;
        let t = RegressionTree::fit(&x, &y, &idx, &c, &mut rng);
        assert!(t.is_single_leaf());
        assert!((t.predict(&[5.0]) - 9.5).abs() < 1e-12);
    }

    #[test]
    fn leaf_predictions_lie_within_target_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = Matrix::from_fn(60, 3, |_, _| rng.gen_range(-1.0..1.0));
        let y: Vec<f64> = (0..60).map(|_| rng.gen_range(5.0..9.0)).collect();
        let idx: Vec<usize> = (0..60).collect();
        let t = RegressionTree::fit(&x, &y, &idx, &cfg(), &mut rng);
        for i in 0..60 {
            let p = t.predict(x.row(i));
            assert!((5.0..=9.0).contains(&p));
        }
    }
}
