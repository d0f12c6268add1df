use std::sync::Arc;

use crate::config::Tolerances;
use crate::decay::{dyadic_maxima, last_window_below, windows_evidence};
use crate::derivation::DerivationKernel;
use crate::report::{AnalysisReport, Evidence, Verdict};
use crate::spaces::{add_indicator, decay_profile, is_c0_membership_with, pairing_l1_linf, ON_GRID};
use crate::weight::lower_integral_constant;
use crate::{Error, Grid, L1Element, LInfElement, LInfTail, Result, Weight, C64};

const NOT_NECESSARY: &str =
    "the measure condition is sufficient for weak-star continuity; its failure alone is no counterexample";

/// Measure of `{s ∈ [a,b] : q(s) ≥ ε}` for the piecewise-linear `q`.
fn level_set_measure(grid: &Grid, q: &[f64], a: f64, b: f64, eps: f64) -> f64 {
    let nodes = grid.nodes();
    let Some((mut k, _)) = grid.locate(a) else {
        return 0.0;
    };
    let mut total = 0.0;
    while k + 1 < q.len() && nodes[k] < b {
        let (x0, x1) = (nodes[k], nodes[k + 1]);
        let (q0, q1) = (q[k], q[k + 1]);
        let (lo, hi) = match (q0 >= eps, q1 >= eps) {
            (true, true) => (x0, x1),
            (false, false) => (x1, x1),
            (true, false) => (x0, x0 + (x1 - x0) * (q0 - eps) / (q0 - q1)),
            (false, true) => (x0 + (x1 - x0) * (eps - q0) / (q1 - q0), x1),
        };
        total += (hi.min(b) - lo.max(a)).max(0.0);
        k += 1;
    }
    total
}

fn check_window(phi: &LInfElement, t: f64) -> Result<()> {
    let end = phi.grid().node(phi.known_len() - 1);
    if !(t >= 0.0) || t + 1.0 > end + 1e-9 * phi.grid().max_step() {
        return Err(Error::WindowOverflow {
            t,
            end: t + 1.0,
            t_max: end,
        });
    }
    Ok(())
}

/// `m(U_{t,ε})`, `U_{t,ε} = {s ∈ [t, t+1] : |φ(s)|/ω(s) ≥ ε}`, with `|φ|/ω`
/// interpolated linearly between nodes.
pub fn measure_u(phi: &LInfElement, w: &Weight, t: f64, eps: f64) -> Result<f64> {
    Ok(measure_u_profile(phi, w, eps, &[t])?[0].1)
}

pub fn measure_u_profile(phi: &LInfElement, w: &Weight, eps: f64, ts: &[f64]) -> Result<Vec<(f64, f64)>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParams(format!("ε must be positive, got {eps}")));
    }
    let q = phi.profile(w)?;
    ts.iter()
        .map(|&t| {
            check_window(phi, t)?;
            Ok((t, level_set_measure(phi.grid(), &q, t, t + 1.0, eps)))
        })
        .collect()
}

/// `0, step, 2·step, …` up to `T_max − 1`.
pub fn default_t_grid(grid: &Grid, step: f64) -> Vec<f64> {
    let last = grid.t_max() - 1.0;
    let n = (last / step + 1e-9).floor() as usize;
    (0..=n).map(|k| k as f64 * step).collect()
}

/// For each `ε`, the profile `t ↦ m(U_{t,ε})`; holds when every profile's
/// last dyadic window sits below `tol.decay`.
pub fn weakstar_condition_check(
    phi: &LInfElement,
    w: &Weight,
    eps_list: &[f64],
    t_grid: &[f64],
    tol: &Tolerances,
) -> AnalysisReport {
    let mut report = AnalysisReport::new("weakstar_condition_check")
        .param("weight", w)
        .param("eps_list", format!("{eps_list:?}"))
        .param("tol_decay", tol.decay)
        .param("t_points", t_grid.len())
        .caveat(ON_GRID)
        .caveats_from(phi.caveats());
    if eps_list.is_empty() || t_grid.is_empty() {
        return report
            .caveat("no ε values or window positions")
            .conclude(Verdict::Inconclusive);
    }
    let mut all_decay = true;
    for &eps in eps_list {
        let prof = match measure_u_profile(phi, w, eps, t_grid) {
            Ok(p) => p,
            Err(e) => return report.caveat(e.to_string()).conclude(Verdict::Inconclusive),
        };
        let windows = dyadic_maxima(&prof);
        let last = windows.last().map_or(0.0, |w| w.max);
        all_decay &= last_window_below(&windows, tol.decay);
        report = report
            .summarize(format!("last_window_max_eps_{eps}"), last)
            .with_evidence(Evidence::new(format!("mU_eps_{eps}"), prof))
            .with_evidence(windows_evidence(&format!("mU_window_max_eps_{eps}"), &windows));
    }
    if all_decay {
        report.conclude(Verdict::Holds)
    } else {
        report.caveat(NOT_NECESSARY).conclude(Verdict::Fails)
    }
}

/// `ran T_φ ⊆ C₀(1/ω)` on the given compactly supported inputs.
pub fn range_c0_check(phi: &LInfElement, w: &Weight, f_list: &[L1Element], tol: &Tolerances) -> AnalysisReport {
    let mut report = AnalysisReport::new("range_c0_check")
        .param("weight", w)
        .param("inputs", f_list.len())
        .param("tol_decay", tol.decay)
        .caveat(ON_GRID)
        .caveats_from(phi.caveats());
    if f_list.is_empty() {
        return report.caveat("no inputs").conclude(Verdict::Inconclusive);
    }
    let kernel = DerivationKernel::new(phi, w);
    let h = phi.grid().max_step();
    let phi_norm = phi.linf_norm(w).unwrap_or(f64::INFINITY);
    let mut all = true;
    let mut resolved_fail = false;
    for (k, f) in f_list.iter().enumerate() {
        let tf = match kernel.apply_t(f) {
            Ok(v) => v,
            Err(e) => return report.caveat(e.to_string()).conclude(Verdict::Inconclusive),
        };
        let m = is_c0_membership_with(&tf, w, tol);
        let last = m.summary_value("last_window_max").unwrap_or(f64::NAN);
        // A tail below one grid cell of mass is not distinguishable from zero.
        let floor = h * phi_norm * f.l1_norm(w).unwrap_or(f64::INFINITY);
        all &= m.verdict == Verdict::Holds;
        resolved_fail |= m.verdict == Verdict::Fails && !(last <= floor);
        report = report
            .summarize(format!("last_window_max_{k}"), last)
            .summarize(format!("resolution_floor_{k}"), floor)
            .caveats_from(m.caveats.iter().filter(|c| c.as_str() != ON_GRID));
        if let Ok(p) = decay_profile(&tf, w, &format!("T_profile_{k}")) {
            report = report.with_evidence(p);
        }
        for e in m.evidence {
            report = report.with_evidence(Evidence::new(format!("T_{}_{k}", e.name), e.points));
        }
    }
    if all {
        report.conclude(Verdict::Holds)
    } else if resolved_fail {
        report.conclude(Verdict::Fails)
    } else {
        report
            .caveat("tail of T_phi f is at grid resolution; refine h to decide")
            .conclude(Verdict::Inconclusive)
    }
}

/// `p_n = ⟨1_{[0,1]}, D̄_φδ_{a_n}⟩ / ω(a_n)`; fails (weak-star continuity
/// refuted) when every `p_n ≥ C/2·(1 − tol.witness)`.
pub fn pairing_witness(
    phi: &LInfElement,
    w: &Weight,
    a_list: &[f64],
    c_lower: f64,
    tol: &Tolerances,
) -> Result<AnalysisReport> {
    let grid = phi.grid();
    let test = L1Element::indicator(grid, 0.0, 1.0, 1.0)?;
    let kernel = DerivationKernel::new(phi, w);
    let mut points = Vec::with_capacity(a_list.len());
    for &a in a_list {
        let d = kernel.deriv_delta(a)?;
        let p = pairing_l1_linf(&test, &d)? / w.eval(a)?;
        points.push((a, p.re));
    }
    let min_p = points.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let threshold = 0.5 * c_lower * (1.0 - tol.witness);
    let report = AnalysisReport::new("weakstar_counterexample_check")
        .param("weight", w)
        .param("lower_integral_constant", c_lower)
        .param("points", a_list.len())
        .summarize("min_pairing", if points.is_empty() { 0.0 } else { min_p })
        .summarize("threshold", threshold)
        .caveat(ON_GRID)
        .caveats_from(phi.caveats())
        .with_evidence(Evidence::new("pairing", points.clone()));
    Ok(if points.is_empty() {
        report.conclude(Verdict::Holds)
    } else if min_p >= threshold {
        report.conclude(Verdict::Fails)
    } else {
        report
            .caveat("pairings dropped below C/2; no counterexample on this list")
            .conclude(Verdict::Inconclusive)
    })
}

/// `φ = Σ 1_{[a_n, a_n+1]}·ω` with zero tail.
pub(crate) fn unit_spike_train(grid: &Arc<Grid>, w: &Weight, a_list: &[f64]) -> Result<LInfElement> {
    let mut vals = vec![C64::new(0.0, 0.0); grid.len()];
    for &a in a_list {
        add_indicator(grid, a, a + 1.0, 1.0, &mut vals);
    }
    let omega = w.sample(grid)?;
    for (z, o) in vals.iter_mut().zip(&omega) {
        *z *= o;
    }
    Ok(LInfElement::new(grid, vals, LInfTail::Zero)?.with_caveat("spike series truncated at T_max"))
}

/// Builds `φ = Σ 1_{[a_n, a_n+1]}·ω` and runs [`pairing_witness`] on it.
pub fn weakstar_counterexample_check(
    w: &Weight,
    grid: &Arc<Grid>,
    a_list: &[f64],
    tol: &Tolerances,
) -> Result<AnalysisReport> {
    if let Some(&a0) = a_list.first() {
        if a0 < 1.0 {
            return Err(Error::InvalidParams(format!("a_0 must be >= 1, got {a0}")));
        }
    }
    if a_list.windows(2).any(|p| p[1] - p[0] < 1.0) {
        return Err(Error::InvalidParams("consecutive a_n must be at least 1 apart".into()));
    }
    if let Some(&last) = a_list.last() {
        if last + 1.0 > grid.t_max() + 1e-9 {
            return Err(Error::WindowOverflow {
                t: last,
                end: last + 1.0,
                t_max: grid.t_max(),
            });
        }
    }
    let c = lower_integral_constant(w, grid)?;
    if c <= 1e-12 {
        return Err(Error::HypothesisViolated(format!(
            "lower integral constant is {c}; the witness needs C > 0"
        )));
    }
    let phi = unit_spike_train(grid, w, a_list)?;
    pairing_witness(&phi, w, a_list, c, tol)
}
