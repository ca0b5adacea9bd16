//! Dense layers and activations.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::params::Params;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Activation {
    Elu,
    Sigmoid,
    Linear,
}

pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

pub fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Elu => elu(x),
            Activation::Sigmoid => sigmoid(x),
            Activation::Linear => x,
        }
    }

    /// Derivative expressed through the pre-activation `z` and output `y`.
    pub fn derivative(self, z: f64, y: f64) -> f64 {
        match self {
            Activation::Elu => {
                if z > 0.0 {
                    1.0
                } else {
                    y + 1.0
                }
            }
            Activation::Sigmoid => y * (1.0 - y),
            Activation::Linear => 1.0,
        }
    }
}

/// Glorot-uniform initialised matrix of `rows x cols`.
pub fn glorot<R: Rng>(rows: usize, cols: usize, rng: &mut R) -> Vec<f64> {
    let a = (6.0 / (rows + cols) as f64).sqrt();
    (0..rows * cols).map(|_| rng.random_range(-a..a)).collect()
}

/// `out = W x` for a row-major `rows x cols` matrix.
pub fn matvec(w: &[f64], cols: usize, x: &[f64], out: &mut [f64]) {
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w[r * cols..(r + 1) * cols];
        *o = row.iter().zip(x).map(|(a, b)| a * b).sum();
    }
}

/// `out += Wᵀ g`.
pub fn matvec_t_acc(w: &[f64], cols: usize, g: &[f64], out: &mut [f64]) {
    for (r, gr) in g.iter().enumerate() {
        if *gr == 0.0 {
            continue;
        }
        let row = &w[r * cols..(r + 1) * cols];
        for (o, a) in out.iter_mut().zip(row) {
            *o += a * gr;
        }
    }
}

/// `dw += g xᵀ`.
pub fn outer_acc(dw: &mut [f64], g: &[f64], x: &[f64]) {
    let cols = x.len();
    for (r, gr) in g.iter().enumerate() {
        if *gr == 0.0 {
            continue;
        }
        let row = &mut dw[r * cols..(r + 1) * cols];
        for (d, xv) in row.iter_mut().zip(x) {
            *d += gr * xv;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub inputs: usize,
    pub outputs: usize,
    pub activation: Activation,
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

impl Dense {
    pub fn new<R: Rng>(inputs: usize, outputs: usize, activation: Activation, rng: &mut R) -> Self {
        Dense {
            inputs,
            outputs,
            activation,
            w: glorot(outputs, inputs, rng),
            b: vec![0.0; outputs],
        }
    }

    pub fn preactivation(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.inputs);
        let mut z = vec![0.0; self.outputs];
        matvec(&self.w, self.inputs, x, &mut z);
        for (zi, bi) in z.iter_mut().zip(&self.b) {
            *zi += bi;
        }
        z
    }

    /// Returns `(z, y)`.
    pub fn forward(&self, x: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let z = self.preactivation(x);
        let y = z.iter().map(|&v| self.activation.apply(v)).collect();
        (z, y)
    }

    pub fn output(&self, x: &[f64]) -> Vec<f64> {
        self.forward(x).1
    }

    /// Backward from `gz = dL/dz`; accumulates into `grad`, returns `dL/dx`.
    pub fn backward_pre(&self, x: &[f64], gz: &[f64], grad: &mut Dense) -> Vec<f64> {
        outer_acc(&mut grad.w, gz, x);
        for (gb, g) in grad.b.iter_mut().zip(gz) {
            *gb += g;
        }
        let mut gx = vec![0.0; self.inputs];
        matvec_t_acc(&self.w, self.inputs, gz, &mut gx);
        gx
    }

    /// Backward from `gy = dL/dy`.
    pub fn backward(&self, x: &[f64], z: &[f64], y: &[f64], gy: &[f64], grad: &mut Dense) -> Vec<f64> {
        let gz: Vec<f64> = gy
            .iter()
            .zip(z.iter().zip(y))
            .map(|(g, (zv, yv))| g * self.activation.derivative(*zv, *yv))
            .collect();
        self.backward_pre(x, &gz, grad)
    }
}

impl Params for Dense {
    fn params(&self) -> Vec<&[f64]> {
        vec![&self.w, &self.b]
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.w, &mut self.b]
    }
}
