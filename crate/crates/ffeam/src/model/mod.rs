//! The core model: a de-tracking + radial-basis hybrid hidden layer with
//! dual outputs, trained by joint Adam optimization of the weights and the
//! missing-value variables.

mod adam;
mod mvdc;
mod net;
mod vars;

pub use adam::Adam;
pub use mvdc::{train_loop, EpochStat, GradTensors, TrainLog, TrainableNet};
pub use net::{NetGrads, Network, RbfNorm, Reference, Trace};
pub use vars::MissingVariables;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::NumericTable;
use crate::error::{Error, Result};
use crate::prefill::{prefill, PrefillConfig};
use crate::rbf::{KmeansConfig, RbfBasis};

/// Training hyperparameters shared by the neural imputers.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// De-tracking neuron count.
    pub m1: usize,
    /// Reference (radial-basis or traditional) neuron count.
    pub m2: usize,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub init_scale: f64,
    pub seed: u64,
    pub rbf_norm: RbfNorm,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.1,
            epochs: 1000,
            batch_size: 20,
            m1: 10,
            m2: 10,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            init_scale: 0.1,
            seed: 0,
            rbf_norm: RbfNorm::Squared,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 || self.batch_size == 0 {
            return Err(Error::InvalidSpec(
                "epochs and batch_size must be >= 1".into(),
            ));
        }
        if self.m1 == 0 || self.m2 == 0 {
            return Err(Error::InvalidSpec("m1 and m2 must be positive".into()));
        }
        Ok(())
    }
}

/// Clustering options for the radial-basis setup. `k` defaults to m2 (one
/// centroid per radial-basis neuron); any other value is a shape error.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct RbfConfig {
    pub k: Option<usize>,
    pub kmeans_max_iters: Option<usize>,
    pub kmeans_tol: Option<f64>,
    pub seed: Option<u64>,
}

impl RbfConfig {
    pub fn kmeans_config(&self, fallback_seed: u64) -> KmeansConfig {
        let defaults = KmeansConfig::default();
        KmeansConfig {
            max_iters: self.kmeans_max_iters.unwrap_or(defaults.max_iters),
            tol: self.kmeans_tol.unwrap_or(defaults.tol),
            seed: self.seed.unwrap_or(fallback_seed),
        }
    }
}

/// Build the model's parameters for a given basis (uniform weights in
/// +/- init_scale, zero biases).
pub fn init_params(
    cfg: &TrainConfig,
    basis: RbfBasis,
    rng: &mut ChaCha8Rng,
) -> Result<Network> {
    Network::init_ffeam(cfg, basis, rng)
}

/// Impute a table with the feature-fusion model: forest (or mean) pre-fill,
/// k-means centroids and shared width, then joint optimization of weights
/// and missing-value variables. Fills come from a final forward pass over
/// all rows; observed cells pass through untouched.
pub fn train(
    table: &NumericTable,
    cfg: &TrainConfig,
    prefill_cfg: &PrefillConfig,
    rbf_cfg: &RbfConfig,
) -> Result<(NumericTable, TrainLog)> {
    table.validate()?;
    cfg.validate()?;
    let prefilled = prefill(table, prefill_cfg)?;
    let k = rbf_cfg.k.unwrap_or(cfg.m2);
    let basis = RbfBasis::fit(&prefilled.values, k, &rbf_cfg.kmeans_config(cfg.seed))?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut net = Network::init_ffeam(cfg, basis, &mut rng)?;
    train_loop(&mut net, table, &prefilled, cfg, &mut rng, true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::Matrix;
    use crate::rbf::RbfBasis;
    use rand::Rng;

    fn basis(m2: usize, s: usize) -> RbfBasis {
        let centroids = Matrix::from_fn(m2, s, |g, j| (g * s + j) as f64 * 0.37);
        let width = crate::rbf::compute_width(&centroids).unwrap();
        RbfBasis { centroids, width }
    }

    fn small_cfg(m1: usize, m2: usize) -> TrainConfig {
        TrainConfig {
            m1,
            m2,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn init_shapes_match_contract() {
        let cfg = small_cfg(10, 10);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = Network::init_ffeam(&cfg, basis(10, 4), &mut rng).unwrap();
        assert_eq!((net.w1.rows(), net.w1.cols()), (10, 4));
        assert_eq!((net.w2d.rows(), net.w2d.cols()), (10, 4));
        assert_eq!((net.w2r.rows(), net.w2r.cols()), (10, 4));
        assert_eq!(net.b2.len(), 4);
    }

    #[test]
    fn same_seed_gives_identical_params() {
        let cfg = small_cfg(3, 2);
        let mut a = ChaCha8Rng::seed_from_u64(5);
        let mut b = ChaCha8Rng::seed_from_u64(5);
        let na = Network::init_ffeam(&cfg, basis(2, 3), &mut a).unwrap();
        let nb = Network::init_ffeam(&cfg, basis(2, 3), &mut b).unwrap();
        assert_eq!(na.w1, nb.w1);
        assert_eq!(na.w2r, nb.w2r);
    }

    #[test]
    fn zero_init_scale_outputs_bias_only() {
        let cfg = TrainConfig {
            init_scale: 0.0,
            ..small_cfg(2, 2)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = Network::init_ffeam(&cfg, basis(2, 3), &mut rng).unwrap();
        net.b2 = vec![1.0, 2.0, 3.0];
        let x = Matrix::from_fn(4, 3, |i, j| (i + j) as f64);
        let tr = net.forward_pass(&x);
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(tr.y.at(i, j), net.b2[j]);
            }
        }
    }

    #[test]
    fn basis_count_mismatch_is_shape_error() {
        let cfg = small_cfg(2, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            Network::init_ffeam(&cfg, basis(2, 3), &mut rng),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn forward_exclusion_hand_case() {
        // s=2, m1=1, w1=[1,1], b1=0, x=[2,3]:
        // output 0 excludes x0 -> relu(3); output 1 excludes x1 -> relu(2)
        let cfg = small_cfg(1, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut net = Network::init_ffeam(&cfg, basis(2, 2), &mut rng).unwrap();
        net.w1 = Matrix::from_vec(1, 2, vec![1.0, 1.0]);
        net.b1 = vec![0.0];
        let x = Matrix::from_vec(1, 2, vec![2.0, 3.0]);
        let tr = net.forward_pass(&x);
        assert_eq!(tr.net_d(0, 0, 0), 3.0);
        assert_eq!(tr.net_d(0, 0, 1), 2.0);
    }

    #[test]
    fn rbf_activation_is_one_at_centroid() {
        let cfg = small_cfg(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = basis(2, 3);
        let centroid0: Vec<f64> = b.centroids.row(0).to_vec();
        let net = Network::init_ffeam(&cfg, b, &mut rng).unwrap();
        let x = Matrix::from_vec(1, 3, centroid0);
        let tr = net.forward_pass(&x);
        assert_eq!(tr.net_ref(0, 0), 1.0);
    }

    #[test]
    fn rbf_activation_in_unit_interval() {
        let cfg = small_cfg(2, 4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let net = Network::init_ffeam(&cfg, basis(4, 3), &mut rng).unwrap();
        let mut vr = ChaCha8Rng::seed_from_u64(3);
        let x = Matrix::from_fn(20, 3, |_, _| vr.gen_range(-50.0..50.0));
        let tr = net.forward_pass(&x);
        for i in 0..20 {
            for g in 0..4 {
                let a = tr.net_ref(i, g);
                assert!(a > 0.0 && a <= 1.0);
            }
        }
    }

    #[test]
    fn perturbing_own_input_leaves_y_unchanged() {
        let cfg = small_cfg(3, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let net = Network::init_ffeam(&cfg, basis(2, 3), &mut rng).unwrap();
        let x = Matrix::from_vec(1, 3, vec![0.4, -0.2, 0.9]);
        let base = net.forward_pass(&x);
        for j in 0..3 {
            let mut xp = x.clone();
            *xp.at_mut(0, j) += 10.0;
            let tr = net.forward_pass(&xp);
            assert_eq!(tr.y.at(0, j), base.y.at(0, j), "y_ij must ignore x_ij");
            assert_ne!(tr.r.at(0, j), base.r.at(0, j), "r_ij must see x_ij");
        }
    }

    #[test]
    fn loss_hand_case_single_cell() {
        // y=2, x=1, r=0 -> L = 1/2 (1 + 4) = 2.5
        let y = Matrix::from_vec(1, 1, vec![2.0]);
        let r = Matrix::from_vec(1, 1, vec![0.0]);
        let x = Matrix::from_vec(1, 1, vec![1.0]);
        let e1 = y.at(0, 0) - x.at(0, 0);
        let e2 = y.at(0, 0) - r.at(0, 0);
        assert_eq!(0.5 * (e1 * e1 + e2 * e2), 2.5);
    }

    #[test]
    fn loss_zero_when_outputs_match() {
        let cfg = TrainConfig {
            init_scale: 0.0,
            ..small_cfg(2, 2)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = Network::init_ffeam(&cfg, basis(2, 2), &mut rng).unwrap();
        // all-zero weights, zero biases, x = 0 -> y = r = x = 0
        let x = Matrix::zeros(3, 2);
        let tr = net.forward_pass(&x);
        assert_eq!(net.loss_value(&tr, &x), 0.0);
    }

    #[test]
    fn loss_is_quadratically_homogeneous() {
        let y = [1.0, -0.5];
        let x = [0.2, 0.1];
        let r = [0.4, -1.0];
        let l = |scale: f64| -> f64 {
            y.iter()
                .zip(&x)
                .zip(&r)
                .map(|((&y, &x), &r)| {
                    let e1 = scale * (y - x);
                    let e2 = scale * (y - r);
                    0.5 * (e1 * e1 + e2 * e2)
                })
                .sum()
        };
        assert!((l(2.0) - 4.0 * l(1.0)).abs() < 1e-12);
    }
}
