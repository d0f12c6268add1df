//! Quadrature grids on a truncated half-line `[0, T_max]`.

use crate::{Error, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Trapezoid,
    /// Composite Simpson weights for full-grid integrals. Partial-interval
    /// integrals (convolution at a node, `U_{t,ε}` windows) stay trapezoidal.
    Simpson,
}

/// Strictly increasing nodes `0 = t₀ < … < t_N = T_max` with quadrature weights.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    spacing: Option<f64>,
    rule: Rule,
}

const SNAP: f64 = 1e-9;

impl Grid {
    pub fn uniform(h: f64, t_max: f64) -> Result<Self> {
        Self::uniform_with_rule(h, t_max, Rule::Trapezoid)
    }

    pub fn uniform_with_rule(h: f64, t_max: f64, rule: Rule) -> Result<Self> {
        if !(h > 0.0 && h.is_finite()) || !(t_max > 0.0 && t_max.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "need h > 0 and T_max > 0, got h = {h}, T_max = {t_max}"
            )));
        }
        let n = (t_max / h).round();
        if n < 1.0 || (n * h - t_max).abs() > SNAP * t_max {
            return Err(Error::InvalidGrid(format!(
                "T_max = {t_max} is not a whole number of steps h = {h}"
            )));
        }
        let n = n as usize;
        let mut nodes: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
        nodes[n] = t_max;
        let weights = match rule {
            Rule::Trapezoid => trapezoid_weights(&nodes),
            Rule::Simpson => {
                if n % 2 != 0 {
                    return Err(Error::InvalidGrid(format!(
                        "Simpson weights need an even number of intervals, got {n}"
                    )));
                }
                (0..=n)
                    .map(|i| {
                        let c = if i == 0 || i == n {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        c * h / 3.0
                    })
                    .collect()
            }
        };
        Ok(Grid {
            nodes,
            weights,
            spacing: Some(h),
            rule,
        })
    }

    /// Uniform spacing `h` except on `[0, h]`, which gets `levels` extra
    /// geometric nodes `h/2, h/4, …, h/2^levels`.
    pub fn refined_near_zero(h: f64, t_max: f64, levels: u32) -> Result<Self> {
        let base = Self::uniform(h, t_max)?;
        if levels == 0 {
            return Ok(base);
        }
        let mut nodes = Vec::with_capacity(base.len() + levels as usize);
        nodes.push(0.0);
        for k in (1..=levels).rev() {
            nodes.push(h / f64::powi(2.0, k as i32));
        }
        nodes.extend_from_slice(&base.nodes[1..]);
        Self::from_nodes(nodes)
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(Error::InvalidGrid("need at least two nodes".into()));
        }
        if nodes[0] != 0.0 {
            return Err(Error::InvalidGrid("first node must be 0".into()));
        }
        if nodes.windows(2).any(|p| !(p[1] > p[0])) || !nodes.iter().all(|t| t.is_finite()) {
            return Err(Error::InvalidGrid("nodes must be finite and strictly increasing".into()));
        }
        let weights = trapezoid_weights(&nodes);
        Ok(Grid {
            nodes,
            weights,
            spacing: None,
            rule: Rule::Trapezoid,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn node(&self, i: usize) -> f64 {
        self.nodes[i]
    }

    pub fn t_max(&self) -> f64 {
        *self.nodes.last().expect("grid has nodes")
    }

    /// Step size for uniform grids; `None` once nodes are refined.
    pub fn spacing(&self) -> Option<f64> {
        self.spacing
    }

    pub fn rule(&self) -> Rule {
        self.rule
    }

    /// Largest gap between consecutive nodes.
    pub fn max_step(&self) -> f64 {
        self.spacing.unwrap_or_else(|| {
            self.nodes
                .windows(2)
                .map(|p| p[1] - p[0])
                .fold(0.0, f64::max)
        })
    }

    /// Cell `[t_i, t_{i+1}]` containing `x` and the fractional position inside it.
    /// Returns `None` for `x` outside `[0, T_max]`.
    pub fn locate(&self, x: f64) -> Option<(usize, f64)> {
        let n = self.len() - 1;
        let t_max = self.t_max();
        if x < -SNAP * self.max_step() || x > t_max + SNAP * self.max_step() {
            return None;
        }
        let (k, frac) = match self.spacing {
            Some(h) => {
                let r = (x / h).max(0.0);
                let k = r.floor();
                (k as usize, r - k)
            }
            None => {
                let k = self.nodes.partition_point(|&t| t <= x).saturating_sub(1);
                if k >= n {
                    (n, 0.0)
                } else {
                    (k, (x - self.nodes[k]) / (self.nodes[k + 1] - self.nodes[k]))
                }
            }
        };
        if k >= n {
            return Some((n, 0.0));
        }
        if frac < SNAP {
            Some((k, 0.0))
        } else if frac > 1.0 - SNAP {
            Some((k + 1, 0.0))
        } else {
            Some((k, frac))
        }
    }

    /// Index of the node equal to `x`, if there is one.
    pub fn index_of(&self, x: f64) -> Option<usize> {
        match self.locate(x) {
            Some((k, f)) if f == 0.0 => Some(k),
            _ => None,
        }
    }

    /// Piecewise-linear interpolation of nodal values. `values` may be a
    /// known prefix of the grid; points past it give `None`.
    pub fn interpolate(&self, values: &[C64], x: f64) -> Option<C64> {
        let (k, frac) = self.locate(x)?;
        if frac == 0.0 {
            return values.get(k).copied();
        }
        let a = *values.get(k)?;
        let b = *values.get(k + 1)?;
        Some(a + (b - a) * frac)
    }

    /// Trapezoid weight of node `j` in the integral over `[0, t_k]`.
    #[inline]
    pub fn partial_weight(&self, j: usize, k: usize) -> f64 {
        if k == 0 || j > k {
            return 0.0;
        }
        if let Some(h) = self.spacing {
            return if j == 0 || j == k { 0.5 * h } else { h };
        }
        let t = &self.nodes;
        if j == 0 {
            0.5 * (t[1] - t[0])
        } else if j == k {
            0.5 * (t[k] - t[k - 1])
        } else {
            0.5 * (t[j + 1] - t[j - 1])
        }
    }

    /// Dual cell of node `i`: midpoints to its neighbours, clipped to `[0, T_max]`.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let t = &self.nodes;
        let lo = if i == 0 { t[0] } else { 0.5 * (t[i - 1] + t[i]) };
        let hi = if i + 1 == t.len() {
            t[i]
        } else {
            0.5 * (t[i] + t[i + 1])
        };
        (lo, hi)
    }

    /// Integral over `[a, b]` of the piecewise-linear interpolant of `values`.
    pub fn integrate_linear(&self, values: &[f64], a: f64, b: f64) -> Option<f64> {
        if b < a {
            return None;
        }
        let (ka, _) = self.locate(a)?;
        let (kb, _) = self.locate(b)?;
        let val = |x: f64| -> Option<f64> {
            self.interpolate_real(values, x)
        };
        let mut pts = vec![a];
        for &t in &self.nodes[(ka + 1).min(self.len())..=kb.min(self.len() - 1)] {
            if t > a && t < b {
                pts.push(t);
            }
        }
        pts.push(b);
        let mut acc = 0.0;
        for p in pts.windows(2) {
            acc += 0.5 * (p[1] - p[0]) * (val(p[0])? + val(p[1])?);
        }
        Some(acc)
    }

    /// Cumulative trapezoid integral `∫₀^{t_k}` of nodal `values`.
    pub fn antiderivative(&self, values: &[f64]) -> Vec<f64> {
        let mut cum = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for k in 1..values.len() {
            acc += 0.5 * (self.nodes[k] - self.nodes[k - 1]) * (values[k] + values[k - 1]);
            cum.push(acc);
        }
        cum
    }

    /// Value at an arbitrary `x` of the antiderivative built by
    /// [`Grid::antiderivative`], exact for the piecewise-linear interpolant.
    pub fn eval_antiderivative(&self, cum: &[f64], values: &[f64], x: f64) -> Option<f64> {
        let (k, frac) = self.locate(x)?;
        let base = *cum.get(k)?;
        if frac == 0.0 {
            return Some(base);
        }
        let vx = self.interpolate_real(values, x)?;
        Some(base + 0.5 * (x - self.nodes[k]) * (values[k] + vx))
    }

    fn interpolate_real(&self, values: &[f64], x: f64) -> Option<f64> {
        let (k, frac) = self.locate(x)?;
        if frac == 0.0 {
            return values.get(k).copied();
        }
        let a = *values.get(k)?;
        let b = *values.get(k + 1)?;
        Some(a + (b - a) * frac)
    }
}

fn trapezoid_weights(nodes: &[f64]) -> Vec<f64> {
    let n = nodes.len() - 1;
    (0..=n)
        .map(|i| {
            let lo = if i == 0 { nodes[0] } else { nodes[i - 1] };
            let hi = if i == n { nodes[n] } else { nodes[i + 1] };
            0.5 * (hi - lo)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn uniform_weights_sum_to_t_max() {
        let g = Grid::uniform(1.0 / 256.0, 40.0).unwrap();
        assert_eq!(g.len(), 10241);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 40.0).abs() <= 1e-12 * 40.0);
        let gs = Grid::uniform_with_rule(0.5, 4.0, Rule::Simpson).unwrap();
        let s: f64 = gs.weights().iter().sum();
        assert!((s - 4.0).abs() < 1e-12);
    }

    #[test]
    fn refined_grid_is_increasing_and_sums() {
        let g = Grid::refined_near_zero(0.25, 10.0, 4).unwrap();
        assert!(g.nodes().windows(2).all(|p| p[1] > p[0]));
        assert_eq!(g.node(1), 0.25 / 16.0);
        let s: f64 = g.weights().iter().sum();
        assert!((s - 10.0).abs() < 1e-12);
        assert!(g.spacing().is_none());
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(Grid::uniform(0.3, 1.0).is_err());
        assert!(Grid::uniform(-1.0, 1.0).is_err());
        assert!(Grid::uniform_with_rule(0.25, 0.75, Rule::Simpson).is_err());
        assert!(Grid::from_nodes(vec![0.0, 1.0, 1.0]).is_err());
        assert!(Grid::from_nodes(vec![0.5, 1.0]).is_err());
    }

    #[test]
    fn locate_snaps_to_nodes() {
        let g = Grid::uniform(0.125, 2.0).unwrap();
        assert_eq!(g.locate(0.375), Some((3, 0.0)));
        assert_eq!(g.index_of(2.0), Some(16));
        let (k, f) = g.locate(0.4).unwrap();
        assert_eq!(k, 3);
        assert!((f - 0.2).abs() < 1e-12);
        assert!(g.locate(2.5).is_none());
        let r = Grid::refined_near_zero(0.125, 2.0, 2).unwrap();
        assert_eq!(r.index_of(0.0625), Some(2));
        assert_eq!(r.index_of(2.0), Some(r.len() - 1));
    }

    #[test]
    fn interpolation_is_linear() {
        let g = Grid::uniform(0.5, 2.0).unwrap();
        let v: Vec<C64> = g.nodes().iter().map(|&t| C64::new(3.0 * t, -t)).collect();
        let z = g.interpolate(&v, 1.3).unwrap();
        assert!((z - C64::new(3.9, -1.3)).norm() < 1e-12);
        assert!(g.interpolate(&v[..2], 1.3).is_none());
    }

    #[test]
    fn partial_weights_integrate_unit_interval() {
        let g = Grid::uniform(0.25, 2.0).unwrap();
        let s: f64 = (0..=4).map(|j| g.partial_weight(j, 4)).sum();
        assert!((s - 1.0).abs() < 1e-15);
        assert_eq!(g.partial_weight(0, 0), 0.0);
    }

    #[test]
    fn linear_integral_off_node_window() {
        let g = Grid::uniform(0.25, 4.0).unwrap();
        let v: Vec<f64> = g.nodes().iter().map(|&t| 2.0 * t + 1.0).collect();
        let i = g.integrate_linear(&v, 0.1, 1.1).unwrap();
        assert!((i - (1.1f64.powi(2) + 1.1 - 0.01 - 0.1)).abs() < 1e-12);
    }
}
