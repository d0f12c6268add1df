//! Shared inner loops: every operator on a uniform grid reduces to a
//! correlation `out_i = Σ_j a_j b_{i+j}`.

use crate::{Exec, C64};

/// Real dot product with eight independent accumulators so the loop
/// vectorises without reassociation flags.
#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 8];
    let ca = a.chunks_exact(8);
    let cb = b.chunks_exact(8);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    acc.iter().sum::<f64>() + tail
}

/// Complex samples split into real and (when non-zero) imaginary parts.
#[derive(Clone, Debug)]
pub(crate) struct Split {
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
}

impl Split {
    pub fn new(z: &[C64]) -> Self {
        let re = z.iter().map(|c| c.re).collect();
        let im = if z.iter().any(|c| c.im != 0.0) {
            Some(z.iter().map(|c| c.im).collect())
        } else {
            None
        };
        Split { re, im }
    }

    pub fn map(&self, f: impl Fn(usize, f64) -> f64) -> Split {
        Split {
            re: self.re.iter().enumerate().map(|(i, &x)| f(i, x)).collect(),
            im: self
                .im
                .as_ref()
                .map(|v| v.iter().enumerate().map(|(i, &x)| f(i, x)).collect()),
        }
    }

    pub fn reversed(&self) -> Split {
        let rev = |v: &Vec<f64>| v.iter().rev().copied().collect::<Vec<_>>();
        Split {
            re: rev(&self.re),
            im: self.im.as_ref().map(rev),
        }
    }
}

/// `out_i = Σ_{j=lo}^{hi} a_j b_{i+j + offset}` for `i < n_out`.
pub(crate) fn correlate(
    exec: Exec,
    a: &Split,
    lo: usize,
    hi: usize,
    b: &Split,
    offset: usize,
    n_out: usize,
) -> Vec<C64> {
    let ar = &a.re[lo..=hi];
    let ai = a.im.as_ref().map(|v| &v[lo..=hi]);
    let bi = b.im.as_ref();
    exec.map(n_out, |i| {
        let start = i + lo + offset;
        let end = i + hi + offset + 1;
        let br = &b.re[start..end];
        let mut re = dot(ar, br);
        let mut im = 0.0;
        if let Some(bi) = bi {
            let bi = &bi[start..end];
            im += dot(ar, bi);
            if let Some(ai) = ai {
                re -= dot(ai, bi);
            }
        }
        if let Some(ai) = ai {
            im += dot(ai, br);
        }
        C64::new(re, im)
    })
}
