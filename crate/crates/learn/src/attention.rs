//! Luong-style dot attention with learned query and key projections.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::layers::{glorot, matvec, matvec_t_acc, outer_acc};
use crate::params::Params;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Attention {
    pub hidden: usize,
    pub dim: usize,
    pub wq: Vec<f64>,
    pub wk: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct AttentionCache {
    q: Vec<Vec<f64>>,
    k: Vec<Vec<f64>>,
    /// Row `t` holds the weights step `t` places on every step.
    pub weights: Vec<Vec<f64>>,
}

pub fn softmax(s: &[f64]) -> Vec<f64> {
    let m = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let e: Vec<f64> = s.iter().map(|v| (v - m).exp()).collect();
    let z: f64 = e.iter().sum();
    e.into_iter().map(|v| v / z).collect()
}

impl Attention {
    pub fn new<R: Rng>(hidden: usize, dim: usize, rng: &mut R) -> Self {
        Attention {
            hidden,
            dim,
            wq: glorot(dim, hidden, rng),
            wk: glorot(dim, hidden, rng),
        }
    }

    /// Context vector for every step: `a_i = Σ_j softmax_j((W_q h_i)·(W_k h_j)) h_j`.
    pub fn forward(&self, hs: &[Vec<f64>]) -> (Vec<Vec<f64>>, AttentionCache) {
        let n = hs.len();
        let proj = |w: &[f64], h: &[f64]| {
            let mut out = vec![0.0; self.dim];
            matvec(w, self.hidden, h, &mut out);
            out
        };
        let q: Vec<Vec<f64>> = hs.iter().map(|h| proj(&self.wq, h)).collect();
        let k: Vec<Vec<f64>> = hs.iter().map(|h| proj(&self.wk, h)).collect();
        let mut weights = Vec::with_capacity(n);
        let mut ctx = Vec::with_capacity(n);
        for qi in &q {
            let scores: Vec<f64> = k.iter().map(|kj| qi.iter().zip(kj).map(|(a, b)| a * b).sum()).collect();
            let a = softmax(&scores);
            let mut c = vec![0.0; self.hidden];
            for (aj, hj) in a.iter().zip(hs) {
                for (cv, hv) in c.iter_mut().zip(hj) {
                    *cv += aj * hv;
                }
            }
            weights.push(a);
            ctx.push(c);
        }
        (ctx, AttentionCache { q, k, weights })
    }

    /// Given `dL/da_i`, accumulate projection gradients and return `dL/dh_j`.
    pub fn backward(&self, hs: &[Vec<f64>], cache: &AttentionCache, dctx: &[Vec<f64>], grad: &mut Attention) -> Vec<Vec<f64>> {
        let n = hs.len();
        let mut dh = vec![vec![0.0; self.hidden]; n];
        let mut dq = vec![vec![0.0; self.dim]; n];
        let mut dk = vec![vec![0.0; self.dim]; n];
        for i in 0..n {
            let a = &cache.weights[i];
            let g = &dctx[i];
            let da: Vec<f64> = hs.iter().map(|hj| g.iter().zip(hj).map(|(x, y)| x * y).sum()).collect();
            for (j, hj) in dh.iter_mut().enumerate() {
                for (d, gv) in hj.iter_mut().zip(g) {
                    *d += a[j] * gv;
                }
            }
            let dot: f64 = a.iter().zip(&da).map(|(x, y)| x * y).sum();
            for j in 0..n {
                let ds = a[j] * (da[j] - dot);
                if ds == 0.0 {
                    continue;
                }
                for d in 0..self.dim {
                    dq[i][d] += ds * cache.k[j][d];
                    dk[j][d] += ds * cache.q[i][d];
                }
            }
        }
        for t in 0..n {
            outer_acc(&mut grad.wq, &dq[t], &hs[t]);
            outer_acc(&mut grad.wk, &dk[t], &hs[t]);
            matvec_t_acc(&self.wq, self.hidden, &dq[t], &mut dh[t]);
            matvec_t_acc(&self.wk, self.hidden, &dk[t], &mut dh[t]);
        }
        dh
    }
}

impl Params for Attention {
    fn params(&self) -> Vec<&[f64]> {
        vec![&self.wq, &self.wk]
    }

    fn params_mut(&mut self) -> Vec<&mut [f64]> {
        vec![&mut self.wq, &mut self.wk]
    }
}
