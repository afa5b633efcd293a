use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::NumericTable;
use crate::error::Result;
use crate::matrix::Matrix;
use crate::model::{train_loop, GradTensors, TrainConfig, TrainLog, TrainableNet};
use crate::prefill::{prefill, PrefillConfig};

/// Classical autoencoder baseline. It trains under the same co-optimization
/// loop as the other neural imputers so comparisons isolate architecture
/// effects; `static_fill` freezes the missing cells at their pre-fill
/// values instead.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct AeConfig {
    pub train: TrainConfig,
    pub static_fill: bool,
}

impl Default for AeConfig {
    fn default() -> Self {
        Self {
            train: TrainConfig::default(),
            static_fill: false,
        }
    }
}

/// Single hidden layer of traditional neurons (no input exclusion), relu
/// activation, linear output; loss 1/(2n) sum (y - x)^2.
pub struct AeNet {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2: Matrix,
    pub b2: Vec<f64>,
}

pub struct AeTrace {
    pre: Vec<f64>,
    hidden: Vec<f64>,
    pub y: Matrix,
}

pub struct AeGrads {
    w1: Matrix,
    b1: Vec<f64>,
    w2: Matrix,
    b2: Vec<f64>,
}

impl AeNet {
    pub fn init(hidden: usize, s: usize, init_scale: f64, rng: &mut impl Rng) -> Self {
        let draw = |rng: &mut dyn rand::RngCore| {
            if init_scale == 0.0 {
                0.0
            } else {
                rng.gen_range(-init_scale..init_scale)
            }
        };
        Self {
            w1: Matrix::from_fn(hidden, s, |_, _| draw(rng)),
            b1: vec![0.0; hidden],
            w2: Matrix::from_fn(hidden, s, |_, _| draw(rng)),
            b2: vec![0.0; s],
        }
    }

    fn hidden_count(&self) -> usize {
        self.w1.rows()
    }
}

impl TrainableNet for AeNet {
    type Trace = AeTrace;
    type Grads = AeGrads;

    fn forward(&self, x: &Matrix) -> AeTrace {
        let (batch, s) = (x.rows(), x.cols());
        let m = self.hidden_count();
        let mut tr = AeTrace {
            pre: vec![0.0; batch * m],
            hidden: vec![0.0; batch * m],
            y: Matrix::zeros(batch, s),
        };
        for i in 0..batch {
            let xi = x.row(i);
            for k in 0..m {
                let pre: f64 = self.b1[k]
                    + self
                        .w1
                        .row(k)
                        .iter()
                        .zip(xi)
                        .map(|(w, v)| w * v)
                        .sum::<f64>();
                tr.pre[i * m + k] = pre;
                tr.hidden[i * m + k] = pre.max(0.0);
            }
            for j in 0..s {
                let mut y = self.b2[j];
                for k in 0..m {
                    y += self.w2.at(k, j) * tr.hidden[i * m + k];
                }
                *tr.y.at_mut(i, j) = y;
            }
        }
        tr
    }

    fn y<'t>(&self, tr: &'t AeTrace) -> &'t Matrix {
        &tr.y
    }

    fn loss(&self, tr: &AeTrace, x: &Matrix) -> f64 {
        let mut l = 0.0;
        for i in 0..x.rows() {
            for j in 0..x.cols() {
                let e = tr.y.at(i, j) - x.at(i, j);
                l += e * e;
            }
        }
        l / (2.0 * x.rows() as f64)
    }

    fn backward(&self, tr: &AeTrace, x: &Matrix) -> (AeGrads, Matrix) {
        let (batch, s) = (x.rows(), x.cols());
        let m = self.hidden_count();
        let inv_n = 1.0 / batch as f64;
        let mut g = AeGrads {
            w1: Matrix::zeros(m, s),
            b1: vec![0.0; m],
            w2: Matrix::zeros(m, s),
            b2: vec![0.0; s],
        };
        let mut dldx = Matrix::zeros(batch, s);
        for i in 0..batch {
            let xi = x.row(i);
            let dy: Vec<f64> = (0..s)
                .map(|j| (tr.y.at(i, j) - xi[j]) * inv_n)
                .collect();
            for j in 0..s {
                g.b2[j] += dy[j];
                *dldx.at_mut(i, j) -= dy[j]; // direct reconstruction term
            }
            for k in 0..m {
                let h = tr.hidden[i * m + k];
                let mut dh = 0.0;
                for j in 0..s {
                    *g.w2.at_mut(k, j) += dy[j] * h;
                    dh += dy[j] * self.w2.at(k, j);
                }
                let delta = if tr.pre[i * m + k] > 0.0 { dh } else { 0.0 };
                g.b1[k] += delta;
                for l in 0..s {
                    *g.w1.at_mut(k, l) += delta * xi[l];
                    *dldx.at_mut(i, l) += delta * self.w1.at(k, l);
                }
            }
        }
        (g, dldx)
    }

    fn tensor_names(&self) -> Vec<&'static str> {
        vec!["w1", "b1", "w2", "b2"]
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        vec![
            self.w1.data_mut(),
            self.b1.as_mut_slice(),
            self.w2.data_mut(),
            self.b2.as_mut_slice(),
        ]
    }
}

impl GradTensors for AeGrads {
    fn tensors(&self) -> Vec<&[f64]> {
        vec![
            self.w1.data(),
            self.b1.as_slice(),
            self.w2.data(),
            self.b2.as_slice(),
        ]
    }
}

/// Classical-autoencoder imputation: hidden layer of m1 + m2 traditional
/// neurons, fills from the final forward pass.
pub fn impute_classic_ae(
    table: &NumericTable,
    cfg: &AeConfig,
    prefill_cfg: &PrefillConfig,
) -> Result<(NumericTable, TrainLog)> {
    table.validate()?;
    cfg.train.validate()?;
    let prefilled = prefill(table, prefill_cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.train.seed);
    let hidden = cfg.train.m1 + cfg.train.m2;
    let mut net = AeNet::init(hidden, table.n_cols(), cfg.train.init_scale, &mut rng);
    train_loop(
        &mut net,
        table,
        &prefilled,
        &cfg.train,
        &mut rng,
        !cfg.static_fill,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_missing_table_is_returned_unchanged() {
        let t = NumericTable::complete(
            Matrix::from_fn(15, 3, |i, j| ((i + j) as f64).cos()),
            (0..3).map(|j| format!("c{j}")).collect(),
        );
        let cfg = AeConfig {
            train: TrainConfig {
                epochs: 5,
                m1: 3,
                m2: 3,
                ..TrainConfig::default()
            },
            static_fill: false,
        };
        let (filled, log) = impute_classic_ae(&t, &cfg, &PrefillConfig::default()).unwrap();
        assert_eq!(filled.values, t.values);
        assert!(log.final_loss().unwrap().is_finite());
    }
}
