//! The shared training loop: missing cells become optimizer variables and
//! are co-optimized with the network weights over shuffled mini-batches of
//! all rows. Final fills come from a post-training forward pass.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dataset::NumericTable;
use crate::error::{Error, Result};
use crate::matrix::Matrix;

use super::adam::Adam;
use super::vars::MissingVariables;
use super::TrainConfig;

/// Gradient container whose tensors parallel the network's trainable ones.
pub trait GradTensors {
    fn tensors(&self) -> Vec<&[f64]>;
}

/// A network the co-optimization loop can train.
pub trait TrainableNet {
    type Trace;
    type Grads: GradTensors;

    fn forward(&self, x: &Matrix) -> Self::Trace;
    /// The fill-producing output of a trace.
    fn y<'t>(&self, tr: &'t Self::Trace) -> &'t Matrix;
    fn loss(&self, tr: &Self::Trace, x: &Matrix) -> f64;
    /// Gradients for the trainable tensors plus dL/dx for every batch cell.
    fn backward(&self, tr: &Self::Trace, x: &Matrix) -> (Self::Grads, Matrix);
    fn tensor_names(&self) -> Vec<&'static str>;
    fn tensors_mut(&mut self) -> Vec<&mut [f64]>;
}

#[derive(Clone, Debug, Serialize)]
pub struct EpochStat {
    pub epoch: usize,
    pub mean_loss: f64,
}

/// Per-epoch mean loss plus the trained variable values (diagnostics; the
/// fills themselves come from the final forward pass).
#[derive(Clone, Debug, Default, Serialize)]
pub struct TrainLog {
    pub epochs: Vec<EpochStat>,
    pub trained_variables: Vec<(usize, usize, f64)>,
}

impl TrainLog {
    pub fn final_loss(&self) -> Option<f64> {
        self.epochs.last().map(|e| e.mean_loss)
    }

    /// One JSON object per line: {"epoch":..,"mean_loss":..}.
    pub fn write_jsonl(&self, w: &mut impl std::io::Write) -> std::io::Result<()> {
        for e in &self.epochs {
            writeln!(w, "{}", serde_json::to_string(e).unwrap())?;
        }
        Ok(())
    }
}

/// Run the co-optimization loop. `table` carries the mask; `prefilled`
/// supplies initial values for the missing-cell variables. When
/// `optimize_vars` is false the fills stay frozen at the pre-fill values
/// while the weights still train.
pub fn train_loop<N: TrainableNet>(
    net: &mut N,
    table: &NumericTable,
    prefilled: &NumericTable,
    cfg: &TrainConfig,
    rng: &mut ChaCha8Rng,
    optimize_vars: bool,
) -> Result<(NumericTable, TrainLog)> {
    cfg.validate()?;
    let n = table.n_rows();
    let mut x = prefilled.values.clone();
    let mut vars = MissingVariables::from_prefill(table, prefilled);
    vars.write_into(&mut x);

    let shapes: Vec<usize> = net.tensors_mut().iter().map(|t| t.len()).collect();
    let names = net.tensor_names();
    let mut adam_params = Adam::new(
        &shapes,
        cfg.learning_rate,
        cfg.adam_beta1,
        cfg.adam_beta2,
        cfg.adam_eps,
    );
    let mut adam_vars = Adam::new(
        &[vars.len()],
        cfg.learning_rate,
        cfg.adam_beta1,
        cfg.adam_beta2,
        cfg.adam_eps,
    );

    let mut log = TrainLog::default();
    let mut order: Vec<usize> = (0..n).collect();
    for epoch in 0..cfg.epochs {
        order.shuffle(rng);
        let mut epoch_loss = 0.0;
        let mut n_batches = 0usize;
        for batch_rows in order.chunks(cfg.batch_size) {
            let xb = x.select_rows(batch_rows);
            let tr = net.forward(&xb);
            let loss = net.loss(&tr, &xb);
            if !loss.is_finite() {
                return Err(Error::NonFinite {
                    what: "loss",
                    tensor: "loss".into(),
                    context: format!("epoch {epoch}, batch {n_batches}"),
                });
            }
            epoch_loss += loss;
            n_batches += 1;

            let (grads, dldx) = net.backward(&tr, &xb);
            adam_params.step(net.tensors_mut(), &grads.tensors(), &names)?;

            if optimize_vars && !vars.is_empty() {
                // variables are updated only when their row is in the batch
                let mut idx = Vec::new();
                let mut vg = Vec::new();
                for (bi, &row) in batch_rows.iter().enumerate() {
                    for (vi, &(r, c)) in vars.coords().iter().enumerate() {
                        if r == row {
                            idx.push(vi);
                            vg.push(dldx.at(bi, c));
                        }
                    }
                }
                if !idx.is_empty() {
                    adam_vars.step_sparse(vars.values_mut(), &idx, &vg, "missing_variables")?;
                    vars.write_into(&mut x);
                }
            }
        }
        log.epochs.push(EpochStat {
            epoch,
            mean_loss: epoch_loss / n_batches.max(1) as f64,
        });
    }

    // final fills are the model outputs at the originally-missing cells
    let tr = net.forward(&x);
    let y = net.y(&tr);
    let mut filled = table.clone();
    for (i, j) in table.missing_cells() {
        *filled.values.at_mut(i, j) = y.at(i, j);
    }
    log.trained_variables = vars.entries().collect();
    Ok((filled, log))
}
