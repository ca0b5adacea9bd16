//! LSTM layers with back-propagation through time.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::layers::{glorot, matvec, matvec_t_acc, outer_acc, sigmoid};
use crate::params::Params;

/// One LSTM layer. Gate rows are stacked as input, forget, cell, output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LstmLayer {
    pub input: usize,
    pub hidden: usize,
    /// `4H x (I + H)`, acting on `[x ‖ h_prev]`.
    pub w: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct LstmStep {
    xh: Vec<f64>,
    i: Vec<f64>,
    f: Vec<f64>,
    g: Vec<f64>,
    o: Vec<f64>,
    c_prev: Vec<f64>,
    tanh_c: Vec<f64>,
}

#[derive(Clone, Debug, Default)]
pub struct LstmCache {
    steps: Vec<LstmStep>,
}

impl LstmLayer {
    pub fn new<R: Rng>(input: usize, hidden: usize, rng: &mut R) -> Self {
        let mut b = vec![0.0; 4 * hidden];
        // forget gate starts open
        b[hidden..2 * hidden].iter_mut().for_each(|x| *x = 1.0);
        LstmLayer {
            input,
            hidden,
            w: glorot(4 * hidden, input + hidden, rng),
            b,
        }
    }

    /// Hidden states for every step, plus what the backward pass needs.
    pub fn forward(&self, xs: &[Vec<f64>]) -> (Vec<Vec<f64>>, LstmCache) {
        let h = self.hidden;
        let cols = self.input + h;
        let mut h_prev = vec![0.0; h];
        let mut c_prev = vec![0.0; h];
        let mut hs = Vec::with_capacity(xs.len());
        let mut cache = LstmCache {
            steps: Vec::with_capacity(xs.len()),
        };
        let mut z = vec![0.0; 4 * h];
        for x in xs {
            debug_assert_eq!(x.len(), self.input);
            let mut xh = Vec::with_capacity(cols);
            xh.extend_from_slice(x);
            xh.extend_from_slice(&h_prev);
            matvec(&self.w, cols, &xh, &mut z);
            let mut i = vec![0.0; h];
            let mut f = vec![0.0; h];
            let mut g = vec![0.0; h];
            let mut o = vec![0.0; h];
            let mut c = vec![0.0; h];
            let mut tanh_c = vec![0.0; h];
            let mut hn = vec![0.0; h];
            for k in 0..h {
                i[k] = sigmoid(z[k] + self.b[k]);
                f[k] = sigmoid(z[h + k] + self.b[h + k]);
                g[k] = (z[2 * h + k] + self.b[2 * h + k]).tanh();
                o[k] = sigmoid(z[3 * h + k] + self.b[3 * h + k]);
                c[k] = f[k] * c_prev[k] + i[k] * g[k];
                tanh_c[k] = c[k].tanh();
                hn[k] = o[k] * tanh_c[k];
            }
            cache.steps.push(LstmStep {
                xh,
                i,
                f,
                g,
                o,
                c_prev: std::mem::replace(&mut c_prev, c),
                tanh_c,
            });
            hs.push(hn.clone());
            h_prev = hn;
        }
        (hs, cache)
    }

    /// Given `dL/dh_t` for every step, accumulate parameter gradients and
    /// return `dL/dx_t`.
    pub fn backward(&self, cache: &LstmCache, dhs: &[Vec<f64>], grad: &mut LstmLayer) -> Vec<Vec<f64>> {
        let h = self.hidden;
        let cols = self.input + h;
        let n = cache.steps.len();
        let mut dxs = vec![vec![0.0; self.input]; n];
        let mut dh_next = vec![0.0; h];
        let mut dc_next = vec![0.0; h];
        let mut dz = vec![0.0; 4 * h];
        for t in (0..n).rev() {
            let s = &cache.steps[t];
            for k in 0..h {
                let dh = dhs[t][k] + dh_next[k];
                let dc = dc_next[k] + dh * s.o[k] * (1.0 - s.tanh_c[k] * s.tanh_c[k]);
                dz[k] = dc * s.g[k] * s.i[k] * (1.0 - s.i[k]);
                dz[h + k] = dc * s.c_prev[k] * s.f[k] * (1.0 - s.f[k]);
                dz[2 * h + k] = dc * s.i[k] * (1.0 - s.g[k] * s.g[k]);
                dz[3 * h + k] = dh * s.tanh_c[k] * s.o[k] * (1.0 - s.o[k]);
                dc_next[k] = dc * s.f[k];
            }
            outer_acc(&mut grad.w, &dz, &s.xh);
            for (gb, d) in grad.b.iter_mut().zip(&dz) {
                *gb += d;
            }
            let mut dxh = vec![0.0; cols];
            matvec_t_acc(&self.w, cols, &dz, &mut dxh);
            dxs[t].copy_from_slice(&dxh[..self.input]);
            dh_next.copy_from_slice(&dxh[self.input..]);
        }
        dxs
    }
}

impl Params for LstmLayer {
    fn params(&self) -> Vec<&[f64]> {
        vec![&self.w, &self.b]
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.w, &mut self.b]
    }
}

/// Stacked LSTM; dropout acts on the inputs of the second and later layers.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Lstm {
    pub layers: Vec<LstmLayer>,
    pub dropout: f64,
}

#[derive(Clone, Debug, Default)]
pub struct StackCache {
    layers: Vec<LstmCache>,
    /// Inverted-dropout masks per layer boundary, empty when inactive.
    masks: Vec<Vec<Vec<f64>>>,
}

impl Lstm {
    pub fn new<R: Rng>(input: usize, hidden: usize, layers: usize, dropout: f64, rng: &mut R) -> Self {
        let layers = (0..layers.max(1))
            .map(|l| LstmLayer::new(if l == 0 { input } else { hidden }, hidden, rng))
            .collect();
        Lstm { layers, dropout }
    }

    pub fn hidden(&self) -> usize {
        self.layers.last().map(|l| l.hidden).unwrap_or(0)
    }

    /// Top-layer hidden states. Dropout is applied only when `rng` is given.
    pub fn forward<R: Rng>(&self, xs: &[Vec<f64>], mut rng: Option<&mut R>) -> (Vec<Vec<f64>>, StackCache) {
        let mut cache = StackCache::default();
        let mut cur: Vec<Vec<f64>> = xs.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            if l > 0 {
                let mut masks = Vec::new();
                if let Some(r) = rng.as_deref_mut() {
                    if self.dropout > 0.0 {
                        let keep = 1.0 - self.dropout;
                        for row in cur.iter_mut() {
                            let m: Vec<f64> = row
                                .iter()
                                .map(|_| if r.random::<f64>() < keep { 1.0 / keep } else { 0.0 })
                                .collect();
                            for (v, mv) in row.iter_mut().zip(&m) {
                                *v *= mv;
                            }
                            masks.push(m);
                        }
                    }
                }
                cache.masks.push(masks);
            }
            let (hs, c) = layer.forward(&cur);
            cache.layers.push(c);
            cur = hs;
        }
        (cur, cache)
    }

    /// Returns `dL/dx` for the stack input.
    pub fn backward(&self, cache: &StackCache, dhs: &[Vec<f64>], grad: &mut Lstm) -> Vec<Vec<f64>> {
        let mut d = dhs.to_vec();
        for l in (0..self.layers.len()).rev() {
            d = self.layers[l].backward(&cache.layers[l], &d, &mut grad.layers[l]);
            if l > 0 {
                let masks = &cache.masks[l - 1];
                if !masks.is_empty() {
                    for (row, m) in d.iter_mut().zip(masks) {
                        for (v, mv) in row.iter_mut().zip(m) {
                            *v *= mv;
                        }
                    }
                }
            }
        }
        d
    }
}

impl Params for Lstm {
    fn params(&self) -> Vec<&[f64]> {
        self.layers.iter().flat_map(|l| l.params()).collect()
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(|l| l.params_mut()).collect()
    }
}
