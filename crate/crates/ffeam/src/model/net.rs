//! The hybrid network kernel: a de-tracking hidden pathway producing the
//! output `y`, and a reference pathway producing `r`. The reference pathway
//! is either a fixed Gaussian basis (the feature-fusion model) or a bank of
//! trainable traditional neurons (the correlation-enhanced baseline).

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{sq_dist, Matrix};
use crate::rbf::RbfBasis;

use super::mvdc::{GradTensors, TrainableNet};
use super::TrainConfig;

/// How the Gaussian activation measures distance. `Squared` is the standard
/// Gaussian kernel exp(-||x-mu||^2 / (2 sigma^2)); `AsWritten` uses the
/// unsquared norm with subgradient 0 at x = mu.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RbfNorm {
    Squared,
    AsWritten,
}

/// Reference pathway producing the constraint output `r`.
#[derive(Clone, Debug)]
pub enum Reference {
    /// Fixed basis; not trained.
    Rbf { basis: RbfBasis, norm: RbfNorm },
    /// Traditional hidden neurons (no input exclusion); trained.
    Traditional { w: Matrix, b: Vec<f64> },
}

/// All trainable and fixed quantities of the hybrid model.
///
/// Shapes: `w1` and `w2d` are m1 x s, `w2r` is m2 x s, `b1` has length m1,
/// `b2` length s. `w2d[k][j]` connects de-tracking neuron k to output j;
/// `w2r[g][j]` connects reference unit g to output j. `b2` is shared by the
/// `y` and `r` outputs.
#[derive(Clone, Debug)]
pub struct Network {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2d: Matrix,
    pub w2r: Matrix,
    pub b2: Vec<f64>,
    pub reference: Reference,
}

/// Cached activations from one forward pass over a batch.
pub struct Trace {
    batch: usize,
    m1: usize,
    m2: usize,
    s: usize,
    /// Pre-activation of de-tracking neuron k for output j: [i, k, j].
    pre_d: Vec<f64>,
    /// relu of `pre_d`.
    net_d: Vec<f64>,
    /// Reference activation per unit, shared across outputs: [i, g].
    net_ref: Vec<f64>,
    /// Rbf: the distance measure fed to exp; Traditional: the pre-activation.
    ref_aux: Vec<f64>,
    pub y: Matrix,
    pub r: Matrix,
}

impl Trace {
    #[inline]
    fn d_idx(&self, i: usize, k: usize, j: usize) -> usize {
        (i * self.m1 + k) * self.s + j
    }

    #[inline]
    pub fn net_d(&self, i: usize, k: usize, j: usize) -> f64 {
        self.net_d[self.d_idx(i, k, j)]
    }

    #[inline]
    pub fn net_ref(&self, i: usize, g: usize) -> f64 {
        self.net_ref[i * self.m2 + g]
    }
}

/// Gradients matching [`Network`]'s trainable tensors, plus the partials
/// with respect to every input cell of the batch.
pub struct NetGrads {
    pub w1: Matrix,
    pub b1: Vec<f64>,
    pub w2d: Matrix,
    pub w2r: Matrix,
    pub b2: Vec<f64>,
    pub ref_w: Option<Matrix>,
    pub ref_b: Option<Vec<f64>>,
}

#[inline]
fn relu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        0.0
    }
}

#[inline]
fn relu_grad(pre: f64) -> f64 {
    // subgradient at 0 is 0
    if pre > 0.0 {
        1.0
    } else {
        0.0
    }
}

fn uniform_matrix(rows: usize, cols: usize, scale: f64, rng: &mut impl Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| {
        if scale == 0.0 {
            0.0
        } else {
            rng.gen_range(-scale..scale)
        }
    })
}

impl Network {
    /// Feature-fusion model: fixed Gaussian reference basis.
    pub fn init_ffeam(cfg: &TrainConfig, basis: RbfBasis, rng: &mut impl Rng) -> Result<Self> {
        if basis.h() != cfg.m2 {
            return Err(Error::Shape(format!(
                "basis has {} centroids but m2 = {}",
                basis.h(),
                cfg.m2
            )));
        }
        let s = basis.centroids.cols();
        let mut net = Self::init_common(cfg, s, rng);
        net.reference = Reference::Rbf {
            basis,
            norm: cfg.rbf_norm,
        };
        Ok(net)
    }

    /// Correlation-enhanced baseline: trainable traditional reference units.
    pub fn init_ce_aann(cfg: &TrainConfig, s: usize, rng: &mut impl Rng) -> Self {
        let mut net = Self::init_common(cfg, s, rng);
        net.reference = Reference::Traditional {
            w: uniform_matrix(cfg.m2, s, cfg.init_scale, rng),
            b: vec![0.0; cfg.m2],
        };
        net
    }

    // Draw order matters: the de-tracking pathway tensors come first so two
    // networks with the same seed share identical y-pathway parameters
    // regardless of reference kind.
    fn init_common(cfg: &TrainConfig, s: usize, rng: &mut impl Rng) -> Self {
        Self {
            w1: uniform_matrix(cfg.m1, s, cfg.init_scale, rng),
            b1: vec![0.0; cfg.m1],
            w2d: uniform_matrix(cfg.m1, s, cfg.init_scale, rng),
            w2r: uniform_matrix(cfg.m2, s, cfg.init_scale, rng),
            b2: vec![0.0; s],
            reference: Reference::Traditional {
                w: Matrix::zeros(0, 0),
                b: Vec::new(),
            },
        }
    }

    pub fn m1(&self) -> usize {
        self.w1.rows()
    }

    pub fn m2(&self) -> usize {
        self.w2r.rows()
    }

    pub fn n_attrs(&self) -> usize {
        self.w1.cols()
    }

    pub fn forward_pass(&self, x: &Matrix) -> Trace {
        let (batch, s) = (x.rows(), x.cols());
        let (m1, m2) = (self.m1(), self.m2());
        let mut tr = Trace {
            batch,
            m1,
            m2,
            s,
            pre_d: vec![0.0; batch * m1 * s],
            net_d: vec![0.0; batch * m1 * s],
            net_ref: vec![0.0; batch * m2],
            ref_aux: vec![0.0; batch * m2],
            y: Matrix::zeros(batch, s),
            r: Matrix::zeros(batch, s),
        };

        for i in 0..batch {
            let xi = x.row(i);
            // de-tracking: each output's pre-activation sums every input
            // except its own. Summed directly (not total-minus-own) so the
            // exclusion holds exactly, not just up to rounding.
            for k in 0..m1 {
                let wk = self.w1.row(k);
                for j in 0..s {
                    let mut pre = self.b1[k];
                    for l in 0..s {
                        if l != j {
                            pre += wk[l] * xi[l];
                        }
                    }
                    let idx = tr.d_idx(i, k, j);
                    tr.pre_d[idx] = pre;
                    tr.net_d[idx] = relu(pre);
                }
            }
            match &self.reference {
                Reference::Rbf { basis, norm } => {
                    let two_sigma_sq = 2.0 * basis.width * basis.width;
                    for g in 0..m2 {
                        let d2 = sq_dist(xi, basis.centroids.row(g));
                        let dist = match norm {
                            RbfNorm::Squared => d2,
                            RbfNorm::AsWritten => d2.sqrt(),
                        };
                        tr.ref_aux[i * m2 + g] = dist;
                        tr.net_ref[i * m2 + g] = (-dist / two_sigma_sq).exp();
                    }
                }
                Reference::Traditional { w, b } => {
                    for g in 0..m2 {
                        let pre: f64 =
                            b[g] + w.row(g).iter().zip(xi).map(|(w, v)| w * v).sum::<f64>();
                        tr.ref_aux[i * m2 + g] = pre;
                        tr.net_ref[i * m2 + g] = relu(pre);
                    }
                }
            }
            for j in 0..s {
                let mut y = self.b2[j];
                for k in 0..m1 {
                    y += self.w2d.at(k, j) * tr.net_d[tr.d_idx(i, k, j)];
                }
                let mut r = self.b2[j];
                for g in 0..m2 {
                    r += self.w2r.at(g, j) * tr.net_ref[i * m2 + g];
                }
                *tr.y.at_mut(i, j) = y;
                *tr.r.at_mut(i, j) = r;
            }
        }
        tr
    }

    /// L = 1/2 sum_ij [(y - x)^2 + (y - r)^2]
    pub fn loss_value(&self, tr: &Trace, x: &Matrix) -> f64 {
        let mut l = 0.0;
        for i in 0..tr.batch {
            for j in 0..tr.s {
                let e1 = tr.y.at(i, j) - x.at(i, j);
                let e2 = tr.y.at(i, j) - tr.r.at(i, j);
                l += e1 * e1 + e2 * e2;
            }
        }
        0.5 * l
    }

    /// Exact analytic gradients of the loss with respect to every trainable
    /// tensor and every input cell of the batch.
    pub fn backward_pass(&self, tr: &Trace, x: &Matrix) -> (NetGrads, Matrix) {
        let (batch, s) = (tr.batch, tr.s);
        let (m1, m2) = (tr.m1, tr.m2);
        let mut g = NetGrads {
            w1: Matrix::zeros(m1, s),
            b1: vec![0.0; m1],
            w2d: Matrix::zeros(m1, s),
            w2r: Matrix::zeros(m2, s),
            b2: vec![0.0; s],
            ref_w: None,
            ref_b: None,
        };
        let mut ref_w_g;
        let mut ref_b_g;
        let trad = matches!(self.reference, Reference::Traditional { .. });
        if trad {
            ref_w_g = Some(Matrix::zeros(m2, s));
            ref_b_g = Some(vec![0.0; m2]);
        } else {
            ref_w_g = None;
            ref_b_g = None;
        }
        let mut dldx = Matrix::zeros(batch, s);

        for i in 0..batch {
            let xi = x.row(i);
            // residuals
            let mut dy = vec![0.0; s]; // dL/dy_ij = e1 + e2
            let mut dr = vec![0.0; s]; // dL/dr_ij = -e2
            for j in 0..s {
                let e1 = tr.y.at(i, j) - xi[j];
                let e2 = tr.y.at(i, j) - tr.r.at(i, j);
                dy[j] = e1 + e2;
                dr[j] = -e2;
                g.b2[j] += e1; // b2 feeds both y and r; the e2 terms cancel
                *dldx.at_mut(i, j) += -e1; // direct term of the loss
            }

            // de-tracking pathway
            for k in 0..m1 {
                let mut gd = vec![0.0; s]; // dL/dpre_ikj
                let mut gd_sum = 0.0;
                for j in 0..s {
                    let idx = tr.d_idx(i, k, j);
                    *g.w2d.at_mut(k, j) += dy[j] * tr.net_d[idx];
                    let v = dy[j] * self.w2d.at(k, j) * relu_grad(tr.pre_d[idx]);
                    gd[j] = v;
                    gd_sum += v;
                }
                g.b1[k] += gd_sum;
                for l in 0..s {
                    // x_il feeds every output's exclusion sum except its own
                    let through = gd_sum - gd[l];
                    *g.w1.at_mut(k, l) += through * xi[l];
                    *dldx.at_mut(i, l) += through * self.w1.at(k, l);
                }
            }

            // reference pathway
            match &self.reference {
                Reference::Rbf { basis, norm } => {
                    let sigma_sq = basis.width * basis.width;
                    for g2 in 0..m2 {
                        let act = tr.net_ref[i * m2 + g2];
                        let mut dnet = 0.0;
                        for j in 0..s {
                            *g.w2r.at_mut(g2, j) += dr[j] * act;
                            dnet += dr[j] * self.w2r.at(g2, j);
                        }
                        match norm {
                            RbfNorm::Squared => {
                                let scale = -act / sigma_sq;
                                for l in 0..s {
                                    let diff = xi[l] - basis.centroids.at(g2, l);
                                    *dldx.at_mut(i, l) += dnet * scale * diff;
                                }
                            }
                            RbfNorm::AsWritten => {
                                let dist = tr.ref_aux[i * m2 + g2];
                                if dist > 0.0 {
                                    let scale = -act / (2.0 * sigma_sq * dist);
                                    for l in 0..s {
                                        let diff = xi[l] - basis.centroids.at(g2, l);
                                        *dldx.at_mut(i, l) += dnet * scale * diff;
                                    }
                                }
                            }
                        }
                    }
                }
                Reference::Traditional { w, .. } => {
                    let (wg, bg) = (ref_w_g.as_mut().unwrap(), ref_b_g.as_mut().unwrap());
                    for g2 in 0..m2 {
                        let act = tr.net_ref[i * m2 + g2];
                        let mut dnet = 0.0;
                        for j in 0..s {
                            *g.w2r.at_mut(g2, j) += dr[j] * act;
                            dnet += dr[j] * self.w2r.at(g2, j);
                        }
                        let gd = dnet * relu_grad(tr.ref_aux[i * m2 + g2]);
                        bg[g2] += gd;
                        for l in 0..s {
                            *wg.at_mut(g2, l) += gd * xi[l];
                            *dldx.at_mut(i, l) += gd * w.at(g2, l);
                        }
                    }
                }
            }
        }
        g.ref_w = ref_w_g;
        g.ref_b = ref_b_g;
        (g, dldx)
    }
}

impl GradTensors for NetGrads {
    fn tensors(&self) -> Vec<&[f64]> {
        let mut out = vec![
            self.w1.data(),
            self.b1.as_slice(),
            self.w2d.data(),
            self.w2r.data(),
            self.b2.as_slice(),
        ];
        if let Some(w) = &self.ref_w {
            out.push(w.data());
        }
        if let Some(b) = &self.ref_b {
            out.push(b.as_slice());
        }
        out
    }
}

impl TrainableNet for Network {
    type Trace = Trace;
    type Grads = NetGrads;

    fn forward(&self, x: &Matrix) -> Trace {
        self.forward_pass(x)
    }

    fn y<'t>(&self, tr: &'t Trace) -> &'t Matrix {
        &tr.y
    }

    fn loss(&self, tr: &Trace, x: &Matrix) -> f64 {
        self.loss_value(tr, x)
    }

    fn backward(&self, tr: &Trace, x: &Matrix) -> (NetGrads, Matrix) {
        self.backward_pass(tr, x)
    }

    fn tensor_names(&self) -> Vec<&'static str> {
        match self.reference {
            Reference::Rbf { .. } => vec!["w1", "b1", "w2d", "w2r", "b2"],
            Reference::Traditional { .. } => {
                vec!["w1", "b1", "w2d", "w2r", "b2", "ref_w", "ref_b"]
            }
        }
    }

    fn tensors_mut(&mut self) -> Vec<&mut [f64]> {
        let mut out = vec![
            self.w1.data_mut(),
            self.b1.as_mut_slice(),
            self.w2d.data_mut(),
            self.w2r.data_mut(),
            self.b2.as_mut_slice(),
        ];
        if let Reference::Traditional { w, b } = &mut self.reference {
            out.push(w.data_mut());
            out.push(b.as_mut_slice());
        }
        out
    }
}
