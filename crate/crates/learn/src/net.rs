//! Fully connected binary classifier.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::layers::{Activation, Dense};
use crate::loss::{bce_logit, ClassWeights};
use crate::params::Params;
use crate::train::BinaryModel;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BinaryNet {
    pub layers: Vec<Dense>,
}

impl BinaryNet {
    /// Hidden layers of the given widths, then a single sigmoid unit.
    pub fn new(inputs: usize, hidden: &[usize], activation: Activation, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut layers = Vec::new();
        let mut width = inputs;
        for &h in hidden {
            layers.push(Dense::new(width, h, activation, &mut rng));
            width = h;
        }
        layers.push(Dense::new(width, 1, Activation::Sigmoid, &mut rng));
        BinaryNet { layers }
    }

    pub fn inputs(&self) -> usize {
        self.layers[0].inputs
    }
}

impl Params for BinaryNet {
    fn params(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }
}

impl BinaryModel for BinaryNet {
    type Input = Vec<f64>;

    fn logit(&self, x: &Vec<f64>) -> f64 {
        let n = self.layers.len();
        let mut cur = x.clone();
        for l in &self.layers[..n - 1] {
            cur = l.output(&cur);
        }
        self.layers[n - 1].preactivation(&cur)[0]
    }

    fn accumulate(&self, x: &Vec<f64>, y: bool, w: ClassWeights, grad: &mut Self, _rng: Option<&mut ChaCha8Rng>) -> f64 {
        let n = self.layers.len();
        let mut xs = vec![x.clone()];
        let mut zs = Vec::with_capacity(n);
        for l in &self.layers[..n - 1] {
            let (z, a) = l.forward(xs.last().unwrap());
            zs.push(z);
            xs.push(a);
        }
        let logit = self.layers[n - 1].preactivation(xs.last().unwrap())[0];
        let (loss, dz) = bce_logit(y, logit, w);
        let mut g = self.layers[n - 1].backward_pre(&xs[n - 1], &[dz], &mut grad.layers[n - 1]);
        for k in (0..n - 1).rev() {
            g = self.layers[k].backward(&xs[k], &zs[k], &xs[k + 1], &g, &mut grad.layers[k]);
        }
        loss
    }
}
