use crate::error::{Error, Result};

/// Adam with bias correction over a fixed set of tensors. One instance owns
/// one shared step counter; moment buffers are per tensor entry.
pub struct Adam {
    lr: f64,
    beta1: f64,
    beta2: f64,
    eps: f64,
    t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl Adam {
    pub fn new(shapes: &[usize], lr: f64, beta1: f64, beta2: f64, eps: f64) -> Self {
        Self {
            lr,
            beta1,
            beta2,
            eps,
            t: 0,
            m: shapes.iter().map(|&n| vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }

    /// One update across all tensors. `params`, `grads`, and `names` must be
    /// parallel and match the shapes given at construction.
    pub fn step(
        &mut self,
        mut params: Vec<&mut [f64]>,
        grads: &[&[f64]],
        names: &[&'static str],
    ) -> Result<()> {
        assert_eq!(params.len(), self.m.len());
        assert_eq!(grads.len(), self.m.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (ti, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            assert_eq!(p.len(), g.len(), "tensor {} shape mismatch", names[ti]);
            for (ei, (&gi, pi)) in g.iter().zip(p.iter_mut()).enumerate() {
                if !gi.is_finite() {
                    return Err(Error::NonFinite {
                        what: "gradient",
                        tensor: names[ti].to_string(),
                        context: format!("entry {ei} at step {}", self.t),
                    });
                }
                let m = &mut self.m[ti][ei];
                let v = &mut self.v[ti][ei];
                *m = self.beta1 * *m + (1.0 - self.beta1) * gi;
                *v = self.beta2 * *v + (1.0 - self.beta2) * gi * gi;
                let m_hat = *m / bc1;
                let v_hat = *v / bc2;
                *pi -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
            }
        }
        Ok(())
    }

    /// Update only the entries `idx` of a single flat tensor (tensor 0).
    /// Moments for untouched entries persist; the step counter still
    /// advances once per call.
    pub fn step_sparse(
        &mut self,
        values: &mut [f64],
        idx: &[usize],
        grads: &[f64],
        name: &'static str,
    ) -> Result<()> {
        assert_eq!(self.m.len(), 1, "step_sparse needs a single-tensor Adam");
        assert_eq!(idx.len(), grads.len());
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t as i32);
        let bc2 = 1.0 - self.beta2.powi(self.t as i32);
        for (&ei, &gi) in idx.iter().zip(grads) {
            if !gi.is_finite() {
                return Err(Error::NonFinite {
                    what: "gradient",
                    tensor: name.to_string(),
                    context: format!("entry {ei} at step {}", self.t),
                });
            }
            let m = &mut self.m[0][ei];
            let v = &mut self.v[0][ei];
            *m = self.beta1 * *m + (1.0 - self.beta1) * gi;
            *v = self.beta2 * *v + (1.0 - self.beta2) * gi * gi;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            values[ei] -= self.lr * m_hat / (v_hat.sqrt() + self.eps);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_gradients_leave_parameters_unchanged() {
        let mut adam = Adam::new(&[3], 0.1, 0.9, 0.999, 1e-8);
        let mut p = vec![1.0, -2.0, 0.5];
        let orig = p.clone();
        adam.step(vec![&mut p], &[&[0.0, 0.0, 0.0]], &["p"]).unwrap();
        assert_eq!(p, orig);
    }

    #[test]
    fn constant_gradient_update_approaches_lr() {
        // with bias correction, |Δp| -> lr * g / sqrt(g^2) = lr as t grows
        let lr = 0.05;
        let mut adam = Adam::new(&[1], lr, 0.9, 0.999, 1e-8);
        let mut p = vec![0.0];
        let mut last = 0.0;
        for _ in 0..200 {
            let before = p[0];
            adam.step(vec![&mut p], &[&[1.0]], &["p"]).unwrap();
            last = (p[0] - before).abs();
        }
        assert!((last - lr).abs() < lr * 0.02, "step {last} vs lr {lr}");
    }

    #[test]
    fn first_step_closed_form() {
        // t=1: m_hat = g, v_hat = g^2, step = lr * g / (|g| + eps)
        let mut adam = Adam::new(&[1], 0.1, 0.9, 0.999, 1e-8);
        let mut p = vec![0.0];
        adam.step(vec![&mut p], &[&[2.0]], &["p"]).unwrap();
        let expected = -0.1 * 2.0 / (2.0 + 1e-8);
        assert!((p[0] - expected).abs() < 1e-15);
    }

    #[test]
    fn identical_runs_are_bitwise_identical() {
        let run = || {
            let mut adam = Adam::new(&[2], 0.01, 0.9, 0.999, 1e-8);
            let mut p = vec![0.3, -0.7];
            for t in 0..10 {
                let g = [0.1 * t as f64, -0.2];
                adam.step(vec![&mut p], &[&g], &["p"]).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn non_finite_gradient_names_the_tensor() {
        let mut adam = Adam::new(&[1], 0.1, 0.9, 0.999, 1e-8);
        let mut p = vec![0.0];
        let err = adam
            .step(vec![&mut p], &[&[f64::NAN]], &["w2d"])
            .unwrap_err();
        assert!(err.to_string().contains("w2d"));
    }

    #[test]
    fn sparse_updates_only_touch_selected_entries() {
        let mut adam = Adam::new(&[3], 0.1, 0.9, 0.999, 1e-8);
        let mut vals = vec![1.0, 2.0, 3.0];
        adam.step_sparse(&mut vals, &[1], &[5.0], "vars").unwrap();
        assert_eq!(vals[0], 1.0);
        assert_eq!(vals[2], 3.0);
        assert!(vals[1] < 2.0);
    }
}
