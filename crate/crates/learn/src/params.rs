//! Flat views over model parameters. A gradient is stored in a value of the
//! model's own type, so the same slices line up for parameters and gradients.

pub trait Params {
    fn params(&self) -> Vec<&[f64]>;
    fn params_mut(&mut self) -> Vec<&mut [f64]>;

    fn num_params(&self) -> usize {
        self.params().iter().map(|p| p.len()).sum()
    }

    fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for p in self.params() {
            out.extend_from_slice(p);
        }
        out
    }

    fn set_flat(&mut self, v: &[f64]) {
        let mut k = 0;
        for p in self.params_mut() {
            let n = p.len();
            p.copy_from_slice(&v[k..k + n]);
            k += n;
        }
        assert_eq!(k, v.len(), "flat parameter length");
    }

    fn zero(&mut self) {
        for p in self.params_mut() {
            p.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    /// `self += other`, element-wise over matching parameter layouts.
    fn add_from(&mut self, other: &Self)
    where
        Self: Sized,
    {
        for (a, b) in self.params_mut().into_iter().zip(other.params()) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }
}

/// A zeroed copy with the same layout, used as a gradient accumulator.
pub fn zeros_like<T: Params + Clone>(m: &T) -> T {
    let mut g = m.clone();
    g.zero();
    g
}
