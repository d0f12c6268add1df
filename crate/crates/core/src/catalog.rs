//! Named test functions `φ` with the verdicts each one is known to produce.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::analyzers::{
    compact_verdict, default_t_grid, noncompact_witness_limit, noncompact_witness_step,
    weakstar_condition_check, weakstar_counterexample_check,
};
use crate::config::Tolerances;
use crate::spaces::{add_indicator, is_c0_membership_with, is_l0inf_with};
use crate::{AnalysisReport, Error, Grid, L1Element, L1Tail, LInfElement, LInfTail, Result, Verdict, Weight, C64};

pub type Params = BTreeMap<String, f64>;

const TRUNCATED: &str = "spike series truncated at T_max";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum EntryId {
    /// `Σ_{n ≥ n_start} 1_{[n, n+α_n]}·ω` with `α_n = n^{−p}`.
    Wkscts2,
    /// `Σ_k 1_{[a_k, a_k+1]}·ω` with `a_k = a_start + k·a_step`.
    Notwkscts,
    /// `φ = ω`.
    Omega,
    /// `φ = ω − 1`.
    OmegaMinusOne,
    /// `φ = 1_{[a,b]}`.
    Step,
    /// `φ(t) = α + c·e^{−t}`, unweighted.
    LimitAlpha,
}

impl EntryId {
    pub const ALL: [EntryId; 6] = [
        EntryId::Wkscts2,
        EntryId::Notwkscts,
        EntryId::Omega,
        EntryId::OmegaMinusOne,
        EntryId::Step,
        EntryId::LimitAlpha,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EntryId::Wkscts2 => "wkscts2",
            EntryId::Notwkscts => "notwkscts",
            EntryId::Omega => "omega",
            EntryId::OmegaMinusOne => "omega-minus-one",
            EntryId::Step => "step",
            EntryId::LimitAlpha => "limit-alpha",
        }
    }

    pub fn parse(id: &str) -> Result<Self> {
        EntryId::ALL
            .into_iter()
            .find(|e| e.as_str() == id)
            .ok_or_else(|| Error::UnknownId(id.to_string()))
    }
}

impl fmt::Display for EntryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: EntryId,
    /// Plain-words description of the claim the entry exercises.
    pub statement: &'static str,
    pub params: Params,
    pub weight: Weight,
    /// `(h, T_max)` of the default uniform grid.
    pub grid: (f64, f64),
    pub expected: Vec<(&'static str, Verdict)>,
}

impl CatalogEntry {
    pub fn default_grid(&self) -> Result<Arc<Grid>> {
        Ok(Arc::new(Grid::uniform(self.grid.0, self.grid.1)?))
    }

    pub fn expected_verdict(&self, analyzer: &str) -> Option<Verdict> {
        self.expected.iter().find(|(a, _)| *a == analyzer).map(|&(_, v)| v)
    }
}

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().map(|&(k, v)| (k.to_string(), v)).collect()
}

pub fn entry(id: EntryId) -> CatalogEntry {
    use Verdict::*;
    let one = Weight::constant_one;
    match id {
        EntryId::Wkscts2 => CatalogEntry {
            id,
            statement: "thin spikes of unit weighted height and widths tending to zero: not in L0inf, yet weak-star continuous",
            params: params(&[("n_start", 2.0), ("alpha_power", 1.0)]),
            weight: one(),
            grid: (1.0 / 128.0, 1040.0),
            expected: vec![("is_l0inf", Fails), ("weakstar_condition_check", Holds)],
        },
        EntryId::Notwkscts => CatalogEntry {
            id,
            statement: "unit-width spikes at separated points: the pairing with 1_[0,1] stays above C/2, so not weak-star continuous",
            params: params(&[("a_start", 1.0), ("a_step", 1.0), ("count", 50.0)]),
            weight: one(),
            grid: (1.0 / 512.0, 64.0),
            expected: vec![("weakstar_counterexample_check", Fails)],
        },
        EntryId::Omega => CatalogEntry {
            id,
            statement: "the weight itself: the derivation it induces is not weak-star continuous and not compact",
            params: Params::new(),
            weight: one(),
            grid: (1.0 / 32.0, 64.0),
            expected: vec![
                ("weakstar_condition_check", Fails),
                ("is_c0_membership", Fails),
                ("compact_verdict", Fails),
            ],
        },
        EntryId::OmegaMinusOne => CatalogEntry {
            id,
            statement: "omega minus one for a power weight: D is compact although phi is not in C0(1/omega)",
            params: Params::new(),
            weight: Weight::power(2.0).expect("valid power weight"),
            grid: (1.0 / 8.0, 1200.0),
            expected: vec![("compact_verdict", HoldsForD), ("is_c0_membership", Fails)],
        },
        EntryId::Step => CatalogEntry {
            id,
            statement: "an indicator with a jump: the derivation is not compact",
            params: params(&[("a", 0.0), ("b", 1.0)]),
            weight: one(),
            grid: (1.0 / 8192.0, 2.0),
            expected: vec![("compact_verdict", Fails), ("noncompact_witness_step", Fails)],
        },
        EntryId::LimitAlpha => CatalogEntry {
            id,
            statement: "phi tending to a non-zero constant at infinity: not compact, witnessed by translated boxes",
            params: params(&[("alpha", 1.0), ("alpha_im", 0.0), ("c", 0.0)]),
            weight: one(),
            grid: (1.0 / 128.0, 400.0),
            expected: vec![("compact_verdict", Fails), ("noncompact_witness_limit", Fails)],
        },
    }
}

pub fn list_entries() -> Vec<CatalogEntry> {
    EntryId::ALL.into_iter().map(entry).collect()
}

/// Explicit values override the entry defaults; unknown keys are rejected.
fn resolve(id: EntryId, overrides: &Params) -> Result<Params> {
    let mut p = entry(id).params;
    for (k, v) in overrides {
        if !p.contains_key(k) {
            return Err(Error::InvalidParams(format!("entry {id} has no parameter {k}")));
        }
        if !v.is_finite() {
            return Err(Error::InvalidParams(format!("parameter {k} must be finite")));
        }
        p.insert(k.clone(), *v);
    }
    Ok(p)
}

fn count_param(p: &Params, key: &str, min: f64) -> Result<usize> {
    let v = p[key];
    if v.fract() != 0.0 || v < min {
        return Err(Error::InvalidParams(format!("{key} must be an integer >= {min}, got {v}")));
    }
    Ok(v as usize)
}

/// Spike positions `a_k` for the separated-spike entry.
pub fn spike_positions(p: &Params) -> Result<Vec<f64>> {
    let (start, step) = (p["a_start"], p["a_step"]);
    if start < 1.0 || step < 1.0 {
        return Err(Error::InvalidParams("a_start and a_step must be >= 1".into()));
    }
    let count = count_param(p, "count", 0.0)?;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

fn spikes(grid: &Arc<Grid>, w: &Weight, spans: impl Iterator<Item = (f64, f64)>) -> Result<LInfElement> {
    let mut vals = vec![C64::new(0.0, 0.0); grid.len()];
    for (a, b) in spans {
        add_indicator(grid, a, b, 1.0, &mut vals);
    }
    let omega = w.sample(grid)?;
    for (z, o) in vals.iter_mut().zip(&omega) {
        *z *= o;
    }
    Ok(LInfElement::new(grid, vals, LInfTail::Zero)?.with_caveat(TRUNCATED))
}

/// Builds entry `id` on `grid` under weight `w`.
pub fn build(id: EntryId, w: &Weight, grid: &Arc<Grid>, overrides: &Params) -> Result<LInfElement> {
    let p = resolve(id, overrides)?;
    let t_max = grid.t_max();
    match id {
        EntryId::Wkscts2 => {
            let n0 = count_param(&p, "n_start", 2.0)?;
            let power = p["alpha_power"];
            if !(power > 0.0) {
                return Err(Error::InvalidParams("alpha_power must be positive".into()));
            }
            let spans = (n0..)
                .map(|n| (n as f64, n as f64 + (n as f64).powf(-power)))
                .take_while(|&(_, b)| b <= t_max);
            spikes(grid, w, spans)
        }
        EntryId::Notwkscts => {
            let a = spike_positions(&p)?;
            if let Some(&last) = a.last() {
                if last + 1.0 > t_max + 1e-9 {
                    return Err(Error::SupportOverflow { needed: last + 1.0, t_max });
                }
            }
            spikes(grid, w, a.into_iter().map(|a| (a, a + 1.0)))
        }
        EntryId::Omega => LInfElement::weight_multiple(grid, w, C64::new(1.0, 0.0)),
        EntryId::OmegaMinusOne => {
            LInfElement::from_fn_inferred(grid, w, &Tolerances::default(), |t| {
                C64::new(w.eval(t).map_or(f64::NAN, |o| o - 1.0), 0.0)
            })
        }
        EntryId::Step => {
            let (a, b) = (p["a"], p["b"]);
            if !(0.0 <= a && a < b && b <= t_max) {
                return Err(Error::InvalidParams(format!("need 0 <= a < b <= T_max, got [{a}, {b}]")));
            }
            LInfElement::indicator(grid, a, b, 1.0)
        }
        EntryId::LimitAlpha => {
            if !w.is_constant_one() {
                return Err(Error::Domain("limit-alpha is defined for the constant weight".into()));
            }
            let alpha = C64::new(p["alpha"], p["alpha_im"]);
            if alpha == C64::new(0.0, 0.0) {
                return Err(Error::InvalidParams("alpha must be non-zero".into()));
            }
            let c = p["c"];
            let mut el = LInfElement::from_fn(grid, LInfTail::ProportionalToWeight(alpha), |t| {
                alpha + C64::new(c * (-t).exp(), 0.0)
            })?;
            if c != 0.0 && c.abs() * (-t_max).exp() > 1e-12 * alpha.norm() {
                el = el.with_caveat("tail coefficient is the limit α, not the value at T_max");
            }
            Ok(el)
        }
    }
}

/// A designated analyzer run paired with the verdict the entry expects.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub expected: Verdict,
    pub report: AnalysisReport,
}

impl Outcome {
    pub fn matches(&self) -> bool {
        self.report.verdict == self.expected
    }
}

/// Runs every analyzer listed in the entry's expectations.
pub fn run_designated(
    id: EntryId,
    w: &Weight,
    grid: &Arc<Grid>,
    overrides: &Params,
    tol: &Tolerances,
) -> Result<Vec<Outcome>> {
    let e = entry(id);
    let p = resolve(id, overrides)?;
    let phi = build(id, w, grid, &p)?;
    let mut out = Vec::new();
    for &(analyzer, expected) in &e.expected {
        let report = match analyzer {
            "is_l0inf" => is_l0inf_with(&phi, w, tol),
            "is_c0_membership" => is_c0_membership_with(&phi, w, tol),
            "weakstar_condition_check" => {
                let t_grid = default_t_grid(grid, 0.5);
                weakstar_condition_check(&phi, w, &[0.5, 0.25], &t_grid, tol)
            }
            "weakstar_counterexample_check" => {
                weakstar_counterexample_check(w, grid, &spike_positions(&p)?, tol)?
            }
            "compact_verdict" => compact_verdict(&phi, w, tol),
            "noncompact_witness_step" => noncompact_witness_step(&phi, w, p["b"], 0.5, &[4, 8, 16], tol)?,
            "noncompact_witness_limit" => {
                let g = L1Element::from_real_fn(grid, L1Tail::None, |t| (-t).exp())?;
                let alpha = C64::new(p["alpha"], p["alpha_im"]);
                noncompact_witness_limit(&phi, w, alpha, &[4, 8, 16, 32], &g, tol)?
            }
            other => unreachable!("catalog names unknown analyzer {other}"),
        };
        out.push(Outcome { expected, report });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_entries_round_trip_ids() {
        let all = list_entries();
        assert_eq!(all.len(), 6);
        for e in &all {
            assert_eq!(EntryId::parse(e.id.as_str()).unwrap(), e.id);
            assert!(!e.expected.is_empty());
        }
        assert!(matches!(EntryId::parse("nonsense"), Err(Error::UnknownId(_))));
        assert_eq!(entry(EntryId::Step).expected_verdict("compact_verdict"), Some(Verdict::Fails));
    }

    #[test]
    fn omega_has_unit_profile() {
        let g = Arc::new(Grid::uniform(0.25, 10.0).unwrap());
        let w = Weight::power(1.0).unwrap();
        let phi = build(EntryId::Omega, &w, &g, &Params::new()).unwrap();
        assert!(phi.profile(&w).unwrap().iter().all(|&v| (v - 1.0).abs() < 1e-14));
        assert_eq!(phi.tail(), LInfTail::ProportionalToWeight(C64::new(1.0, 0.0)));
    }

    #[test]
    fn invalid_params_rejected() {
        let g = Arc::new(Grid::uniform(0.25, 10.0).unwrap());
        let one = Weight::constant_one();
        let bad = params(&[("n_start", 1.0)]);
        assert!(build(EntryId::Wkscts2, &one, &g, &bad).is_err());
        assert!(build(EntryId::Step, &one, &g, &params(&[("zzz", 1.0)])).is_err());
        assert!(build(EntryId::LimitAlpha, &one, &g, &params(&[("alpha", 0.0)])).is_err());
        let w = Weight::power(1.0).unwrap();
        assert!(build(EntryId::LimitAlpha, &w, &g, &Params::new()).is_err());
    }

    #[test]
    fn spikes_carry_truncation_caveat() {
        let g = Arc::new(Grid::uniform(1.0 / 16.0, 20.0).unwrap());
        let one = Weight::constant_one();
        let phi = build(EntryId::Wkscts2, &one, &g, &Params::new()).unwrap();
        assert_eq!(phi.tail(), LInfTail::Zero);
        assert!(phi.caveats().iter().any(|c| c == TRUNCATED));
        assert_eq!(phi.samples()[32].re, 0.5);
        assert_eq!(phi.samples()[33].re, 1.0);
    }
}
