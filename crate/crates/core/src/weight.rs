//! Continuous submultiplicative weights `ω` on the half-line.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::report::{AnalysisReport, Evidence, Verdict};
use crate::{Error, Grid, Result};

/// Relative slack allowed in `ω(t+s) ≤ ω(t)ω(s)`.
pub const SUBMULT_TOL: f64 = 1e-10;

const SUBMULT_SEED: u64 = 0x5eed_0001;

#[derive(Clone, Debug, PartialEq)]
pub enum WeightKind {
    ConstantOne,
    /// `(1+t)^alpha`, `alpha > 0`.
    Power { alpha: f64 },
    /// `e^{rate·t}`; negative rates decay.
    Exponential { rate: f64 },
    /// `e^{-c t²}`, `c > 0`.
    GaussianDecay { c: f64 },
    /// Piecewise-linear through `(ts[i], values[i])`, `ts[0] = 0`, `values[0] = 1`.
    Tabulated { ts: Vec<f64>, values: Vec<f64> },
}

impl WeightKind {
    pub fn name(&self) -> &'static str {
        match self {
            WeightKind::ConstantOne => "constant-one",
            WeightKind::Power { .. } => "power",
            WeightKind::Exponential { .. } => "exponential",
            WeightKind::GaussianDecay { .. } => "gaussian-decay",
            WeightKind::Tabulated { .. } => "tabulated",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    kind: WeightKind,
}

impl Weight {
    pub fn new(kind: WeightKind) -> Result<Self> {
        match &kind {
            WeightKind::ConstantOne => {}
            WeightKind::Power { alpha } => {
                if !(*alpha > 0.0 && alpha.is_finite()) {
                    return Err(Error::InvalidWeight(format!("power exponent must be > 0, got {alpha}")));
                }
            }
            WeightKind::Exponential { rate } => {
                if !rate.is_finite() {
                    return Err(Error::InvalidWeight("exponential rate must be finite".into()));
                }
            }
            WeightKind::GaussianDecay { c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidWeight(format!("gaussian-decay c must be > 0, got {c}")));
                }
            }
            WeightKind::Tabulated { ts, values } => {
                if ts.len() < 2 || ts.len() != values.len() {
                    return Err(Error::InvalidWeight(
                        "table needs at least two (t, value) pairs of equal length".into(),
                    ));
                }
                if ts[0] != 0.0 || values[0] != 1.0 {
                    return Err(Error::InvalidWeight("table must start at (0, 1)".into()));
                }
                if ts.windows(2).any(|p| !(p[1] > p[0])) {
                    return Err(Error::InvalidWeight("table abscissae must increase".into()));
                }
                if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                    return Err(Error::InvalidWeight("table values must be positive".into()));
                }
            }
        }
        Ok(Weight { kind })
    }

    pub fn constant_one() -> Self {
        Weight {
            kind: WeightKind::ConstantOne,
        }
    }

    pub fn power(alpha: f64) -> Result<Self> {
        Self::new(WeightKind::Power { alpha })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        Self::new(WeightKind::Exponential { rate })
    }

    pub fn gaussian_decay(c: f64) -> Result<Self> {
        Self::new(WeightKind::GaussianDecay { c })
    }

    pub fn tabulated(ts: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(WeightKind::Tabulated { ts, values })
    }

    pub fn kind(&self) -> &WeightKind {
        &self.kind
    }

    pub fn is_constant_one(&self) -> bool {
        matches!(self.kind, WeightKind::ConstantOne)
    }

    /// Largest `t` at which the weight can be evaluated.
    pub fn domain_end(&self) -> f64 {
        match &self.kind {
            WeightKind::Tabulated { ts, .. } => *ts.last().expect("validated table"),
            _ => f64::INFINITY,
        }
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("weight evaluated at negative t = {t}")));
        }
        Ok(match &self.kind {
            WeightKind::ConstantOne => 1.0,
            WeightKind::Power { alpha } => (1.0 + t).powf(*alpha),
            WeightKind::Exponential { rate } => (rate * t).exp(),
            WeightKind::GaussianDecay { c } => (-c * t * t).exp(),
            WeightKind::Tabulated { ts, values } => {
                let end = *ts.last().expect("validated table");
                if t > end {
                    return Err(Error::Extrapolation { t, end });
                }
                let k = ts.partition_point(|&x| x <= t).saturating_sub(1).min(ts.len() - 2);
                let frac = (t - ts[k]) / (ts[k + 1] - ts[k]);
                values[k] + (values[k + 1] - values[k]) * frac
            }
        })
    }

    /// `ω(t_i)` at every grid node.
    pub fn sample(&self, grid: &Grid) -> Result<Vec<f64>> {
        grid.nodes().iter().map(|&t| self.eval(t)).collect()
    }

    /// `ω(k·h)` for `k = 0..n`, used when kernels reach past the grid end.
    pub fn sample_uniform(&self, h: f64, n: usize) -> Result<Vec<f64>> {
        (0..n).map(|k| self.eval(k as f64 * h)).collect()
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            WeightKind::ConstantOne => write!(f, "constant-one"),
            WeightKind::Power { alpha } => write!(f, "power(alpha={alpha})"),
            WeightKind::Exponential { rate } => write!(f, "exponential(rate={rate})"),
            WeightKind::GaussianDecay { c } => write!(f, "gaussian-decay(c={c})"),
            WeightKind::Tabulated { ts, .. } => write!(f, "tabulated({} points)", ts.len()),
        }
    }
}

/// Convenience wrapper around [`Weight::eval`].
pub fn weight_eval(w: &Weight, t: f64) -> Result<f64> {
    w.eval(t)
}

/// Samples `pair_samples` pairs `(t, s)` from a fixed-seed stream and
/// reports the largest ratio `ω(t+s) / (ω(t)ω(s))`.
pub fn check_submultiplicative(w: &Weight, pair_samples: usize) -> AnalysisReport {
    let report = AnalysisReport::new("check_submultiplicative")
        .param("weight", w)
        .param("pair_samples", pair_samples)
        .param("seed", SUBMULT_SEED);
    if pair_samples == 0 {
        return report
            .caveat("no pairs sampled")
            .conclude(Verdict::Inconclusive);
    }
    let span = if w.domain_end().is_finite() {
        0.5 * w.domain_end()
    } else {
        50.0
    };
    let mut rng = ChaCha8Rng::seed_from_u64(SUBMULT_SEED);
    let mut points = Vec::with_capacity(pair_samples);
    let mut worst = f64::NEG_INFINITY;
    for k in 0..pair_samples {
        // cubing concentrates samples near 0, where power weights bend most
        let t = span * rng.gen::<f64>().powi(3);
        let s = span * rng.gen::<f64>().powi(3);
        let ratio = match (w.eval(t + s), w.eval(t), w.eval(s)) {
            (Ok(a), Ok(b), Ok(c)) => a / (b * c),
            _ => f64::NAN,
        };
        worst = worst.max(ratio);
        points.push((k as f64, ratio));
    }
    let verdict = if worst <= 1.0 + SUBMULT_TOL {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    report
        .summarize("max_ratio", worst)
        .with_evidence(Evidence::new("ratio", points))
        .conclude(verdict)
}

/// `C = min_x (∫_x^{x+1} ω) / ω(x)` over grid nodes `x ≤ T_max − 1`.
pub fn lower_integral_constant(w: &Weight, grid: &Grid) -> Result<f64> {
    if grid.t_max() < 2.0 {
        return Err(Error::Domain(format!(
            "lower integral constant needs T_max >= 2, got {}",
            grid.t_max()
        )));
    }
    let omega = w.sample(grid)?;
    let cum = grid.antiderivative(&omega);
    let mut c = f64::INFINITY;
    for (i, &x) in grid.nodes().iter().enumerate() {
        if x > grid.t_max() - 1.0 {
            break;
        }
        let upper = grid
            .eval_antiderivative(&cum, &omega, x + 1.0)
            .ok_or_else(|| Error::Domain(format!("x + 1 = {} outside the grid", x + 1.0)))?;
        c = c.min((upper - cum[i]) / omega[i]);
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert_eq!(weight_eval(&Weight::constant_one(), 7.3).unwrap(), 1.0);
        assert_eq!(Weight::power(2.0).unwrap().eval(1.0).unwrap(), 4.0);
        let e = Weight::exponential(-1.0).unwrap();
        assert!((e.eval(2f64.ln()).unwrap() - 0.5).abs() < 1e-15);
        for w in [Weight::power(0.5).unwrap(), e, Weight::gaussian_decay(0.3).unwrap()] {
            assert_eq!(w.eval(0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn tabulated_refuses_extrapolation() {
        let w = Weight::tabulated(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(w.eval(1.5).unwrap(), 2.5);
        assert!(matches!(w.eval(2.5), Err(Error::Extrapolation { .. })));
        assert!(Weight::tabulated(vec![0.0, 1.0], vec![2.0, 1.0]).is_err());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(Weight::power(0.0).is_err());
        assert!(Weight::gaussian_decay(-1.0).is_err());
        assert!(Weight::constant_one().eval(-1.0).is_err());
    }

    #[test]
    fn submultiplicative_ratios() {
        let r = check_submultiplicative(&Weight::constant_one(), 200);
        assert_eq!(r.summary_value("max_ratio"), Some(1.0));
        let r = check_submultiplicative(&Weight::power(1.0).unwrap(), 200);
        assert!(r.summary_value("max_ratio").unwrap() <= 1.0);
        let r = check_submultiplicative(&Weight::exponential(0.5).unwrap(), 200);
        assert!((r.summary_value("max_ratio").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn lower_integral_constants() {
        let g = Grid::uniform(1.0 / 64.0, 10.0).unwrap();
        let c = lower_integral_constant(&Weight::constant_one(), &g).unwrap();
        assert!((c - 1.0).abs() < 1e-12);
        let c = lower_integral_constant(&Weight::exponential(-1.0).unwrap(), &g).unwrap();
        assert!((c - (1.0 - (-1f64).exp())).abs() < 1e-4);
        let c = lower_integral_constant(&Weight::power(1.0).unwrap(), &g).unwrap();
        assert!(c >= 1.0);
        let short = Grid::uniform(0.5, 1.5).unwrap();
        assert!(matches!(
            lower_integral_constant(&Weight::constant_one(), &short),
            Err(Error::Domain(_))
        ));
    }
}
