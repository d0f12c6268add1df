use std::sync::Arc;

use nalgebra::{Complex, DMatrix};

use crate::config::Tolerances;
use crate::derivation::DerivationKernel;
use crate::report::{AnalysisReport, Evidence, Verdict};
use crate::spaces::{is_c0_membership_with, pairing_l1_linf, ON_GRID};
use crate::{Error, Grid, L1Element, LInfElement, LInfTail, Result, Weight, C64};

const PROXY: &str = "compactness verdicts check theorem hypotheses on the grid; they are proxies";

/// Singular values of the weighted kernel matrix
/// `M_ij = w_j·K(t_i, s_j)/(ω(t_i)·ω(s_j))`. Always inconclusive.
pub fn svd_decay(phi: &LInfElement, w: &Weight, grid: &Grid) -> AnalysisReport {
    let report = AnalysisReport::new("svd_decay")
        .param("weight", w)
        .param("nodes", grid.len())
        .caveat("diagnostic only: singular value decay does not decide compactness")
        .caveats_from(phi.caveats());
    let run = || -> Result<Vec<f64>> {
        let kernel = DerivationKernel::new(phi, w);
        let omega = w.sample(grid)?;
        let n = grid.len();
        let (nodes, qw) = (grid.nodes(), grid.weights());
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                let k = kernel.kernel(nodes[i], nodes[j])?;
                entries.push(k * (qw[j] / (omega[i] * omega[j])));
            }
        }
        let mut sv: Vec<f64> = if entries.iter().all(|z| z.im == 0.0) {
            let re: Vec<f64> = entries.iter().map(|z| z.re).collect();
            DMatrix::from_vec(n, n, re).singular_values().iter().copied().collect()
        } else {
            let cx: Vec<Complex<f64>> = entries.iter().map(|z| Complex::new(z.re, z.im)).collect();
            DMatrix::from_vec(n, n, cx).singular_values().iter().copied().collect()
        };
        sv.sort_by(|a, b| b.total_cmp(a));
        Ok(sv)
    };
    let sv = match run() {
        Ok(sv) => sv,
        Err(e) => return report.caveat(e.to_string()).conclude(Verdict::Inconclusive),
    };
    let s1 = sv.first().copied().unwrap_or(0.0);
    let ratio = |k: usize| if s1 > 0.0 { sv.get(k).copied().unwrap_or(0.0) / s1 } else { 0.0 };
    let rank = if s1 > 0.0 { sv.iter().filter(|&&s| s > 1e-3 * s1).count() } else { 0 };
    report
        .summarize("sigma_1", s1)
        .summarize("sigma2_over_sigma1", ratio(1))
        .summarize("rank_1e-3", rank as f64)
        .with_evidence(Evidence::new(
            "singular_values",
            sv.iter().enumerate().map(|(k, &s)| ((k + 1) as f64, s)).collect(),
        ))
        .conclude(Verdict::Inconclusive)
}

fn real_samples(phi: &LInfElement) -> Result<Vec<f64>> {
    if !phi.is_real() {
        return Err(Error::HypothesisViolated("the jump witness needs a real φ".into()));
    }
    Ok(phi.samples().iter().map(|z| z.re).collect())
}

/// Jump witness at `t0`: splits the grid ess inf on `(t0−δ, t0)` and ess sup
/// on `(t0, t0+δ)` into `α ± ε`, then checks `D_φ f_n` with
/// `f_n = n·1_{[t0−1/n, t0]}` stays near `α` close to 0 and below `α − ε`
/// on `[1/n, δ]`. A confirmed witness reports `fails`.
pub fn noncompact_witness_step(
    phi: &LInfElement,
    w: &Weight,
    t0: f64,
    delta: f64,
    n_list: &[u32],
    tol: &Tolerances,
) -> Result<AnalysisReport> {
    let grid = phi.grid();
    if !(t0 > 0.0 && delta > 0.0) || n_list.is_empty() || n_list.contains(&0) {
        return Err(Error::InvalidParams("need t0 > 0, δ > 0 and positive n".into()));
    }
    let n_min = f64::from(*n_list.iter().min().expect("non-empty"));
    let n_max = f64::from(*n_list.iter().max().expect("non-empty"));
    if t0 - 1.0 / n_min <= 0.0 {
        return Err(Error::InvalidParams(format!("t0 − 1/n must be positive, n = {n_min}")));
    }
    if grid.max_step() > 1.0 / (n_max * n_max) * (1.0 + 1e-9) {
        return Err(Error::InvalidParams(format!(
            "grid step {} does not resolve 1/n² = {}",
            grid.max_step(),
            1.0 / (n_max * n_max)
        )));
    }
    let vals = real_samples(phi)?;
    let nodes = grid.nodes();
    let snap = 1e-9 * grid.max_step();
    let inside = |a: f64, b: f64| {
        nodes[..vals.len()]
            .iter()
            .enumerate()
            .filter(move |(_, &t)| t > a + snap && t < b - snap)
            .map(|(i, _)| i)
    };
    let left_inf = inside(t0 - delta, t0).map(|i| vals[i]).fold(f64::INFINITY, f64::min);
    let right_sup = inside(t0, t0 + delta).map(|i| vals[i]).fold(f64::NEG_INFINITY, f64::max);
    if !(left_inf.is_finite() && right_sup.is_finite()) {
        return Err(Error::InvalidParams("no grid nodes on one side of t0".into()));
    }
    let scale = inside(t0 - delta, t0 + delta).map(|i| vals[i].abs()).fold(0.0, f64::max);
    let resolution = 2.0 * grid.max_step() * tol.lipschitz * scale;
    if left_inf - right_sup <= resolution {
        return Err(Error::HypothesisViolated(format!(
            "ess inf {left_inf} on the left does not exceed ess sup {right_sup} on the right by more than the grid resolution"
        )));
    }
    let alpha = 0.5 * (left_inf + right_sup);
    let eps = 0.5 * (left_inf - right_sup);
    let kernel = DerivationKernel::new(phi, w);
    let mut report = AnalysisReport::new("noncompact_witness_step")
        .param("weight", w)
        .param("t0", t0)
        .param("delta", delta)
        .param("n_list", format!("{n_list:?}"))
        .param("tol_witness", tol.witness)
        .summarize("alpha", alpha)
        .summarize("epsilon", eps)
        .caveat(ON_GRID)
        .caveat(PROXY)
        .caveats_from(phi.caveats());
    let mut right_max = Vec::new();
    let mut near_min = Vec::new();
    let mut all = true;
    for &n in n_list {
        let nf = f64::from(n);
        let f = L1Element::indicator(grid, t0 - 1.0 / nf, t0, nf)?;
        let df = kernel.apply_d(&f)?;
        let d: Vec<f64> = df.samples().iter().map(|z| z.re).collect();
        let known = &nodes[..d.len()];
        if known.last().is_some_and(|&t| t < delta - snap) {
            return Err(Error::WindowOverflow {
                t: 0.0,
                end: delta,
                t_max: *known.last().expect("non-empty"),
            });
        }
        let over = |a: f64, b: f64| {
            known
                .iter()
                .zip(&d)
                .filter(move |(&t, _)| t >= a - snap && t <= b + snap)
                .map(|(_, &v)| v)
        };
        let hi = over(1.0 / nf, delta).fold(f64::NEG_INFINITY, f64::max);
        let lo = over(0.0, 1.0 / (nf * nf)).fold(f64::INFINITY, f64::min);
        all &= hi <= alpha - eps + tol.witness && lo >= alpha - tol.witness;
        right_max.push((nf, hi));
        near_min.push((nf, lo));
        report = report.with_evidence(Evidence::new(
            format!("D_f_{n}"),
            known.iter().zip(&d).filter(|(&t, _)| t <= delta + snap).map(|(&t, &v)| (t, v)).collect(),
        ));
    }
    report = report
        .with_evidence(Evidence::new("max_on_right", right_max))
        .with_evidence(Evidence::new("min_near_zero", near_min));
    Ok(if all {
        report.conclude(Verdict::Fails)
    } else {
        report
            .caveat("the jump bounds were not met for every n")
            .conclude(Verdict::Inconclusive)
    })
}

/// Limit witness for `φ(t) → α`, `ω ≡ 1`: with `f_n = 1_{[n,n+1]}`,
/// `∥D_φ f_n − α∥` stays near `|α|` while `⟨g, D_φ f_n⟩ → α∫g`.
pub fn noncompact_witness_limit(
    phi: &LInfElement,
    w: &Weight,
    alpha: C64,
    n_list: &[u32],
    g: &L1Element,
    tol: &Tolerances,
) -> Result<AnalysisReport> {
    if !w.is_constant_one() {
        return Err(Error::Domain("the limit witness is stated for ω ≡ 1".into()));
    }
    if alpha == C64::new(0.0, 0.0) {
        return Err(Error::InvalidParams("the limit α must be non-zero".into()));
    }
    let grid = phi.grid();
    if let Some(&n) = n_list.iter().max() {
        if f64::from(n) + 1.0 > grid.t_max() + 1e-9 {
            return Err(Error::SupportOverflow {
                needed: f64::from(n) + 1.0,
                t_max: grid.t_max(),
            });
        }
    }
    let kernel = DerivationKernel::new(phi, w);
    let ones = LInfElement::weight_multiple(grid, w, C64::new(1.0, 0.0))?;
    let g_mass = pairing_l1_linf(g, &ones)?;
    let lim = LInfElement::weight_multiple(grid, w, alpha)?;
    let mut norms = Vec::new();
    let mut pairs = Vec::new();
    for &n in n_list {
        let nf = f64::from(n);
        let f = L1Element::indicator(grid, nf, nf + 1.0, 1.0)?;
        let df = kernel.apply_d(&f)?;
        let n_prefix = df.known_len();
        let diff: f64 = df
            .samples()
            .iter()
            .zip(&lim.samples()[..n_prefix])
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        norms.push((nf, diff));
        pairs.push((nf, (pairing_l1_linf(g, &df)? - alpha * g_mass).norm()));
    }
    let min_norm = norms.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let pv: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let decreasing = pv.windows(2).all(|p| p[1] < p[0]);
    let last_pair = pv.last().copied().unwrap_or(f64::INFINITY);
    let norm_ok = min_norm >= alpha.norm() * (1.0 - tol.limit);
    let pair_ok = decreasing && last_pair <= tol.pairing;
    let report = AnalysisReport::new("noncompact_witness_limit")
        .param("weight", w)
        .param("alpha", alpha)
        .param("n_list", format!("{n_list:?}"))
        .param("tol_limit", tol.limit)
        .param("tol_pairing", tol.pairing)
        .summarize("min_norm", if norms.is_empty() { 0.0 } else { min_norm })
        .summarize("pairing_residual_last", if pv.is_empty() { 0.0 } else { last_pair })
        .caveat(ON_GRID)
        .caveat(PROXY)
        .caveats_from(phi.caveats())
        .with_evidence(Evidence::new("norm_distance", norms))
        .with_evidence(Evidence::new("pairing_residual", pairs));
    Ok(if n_list.is_empty() {
        report.caveat("empty index list").conclude(Verdict::Inconclusive)
    } else if norm_ok && pair_ok {
        report.conclude(Verdict::Fails)
    } else {
        let mut r = report;
        if !norm_ok {
            r = r.caveat("the norm distance dropped below |α|(1 − tol)");
        }
        if !pair_ok {
            r = r.caveat("pairings did not settle within the pairing tolerance");
        }
        r.conclude(Verdict::Inconclusive)
    })
}

/// `sup_x |D̄δ_a/ω(a) − D̄δ_b/ω(b)|/ω(x)` over nodes with `x + b ≤ T_max`.
fn scaled_delta_distance(phi: &LInfElement, w: &Weight, omega: &[f64], a: f64, b: f64) -> Result<f64> {
    let grid = phi.grid();
    let (wa, wb) = (w.eval(a)?, w.eval(b)?);
    let limit = grid.t_max() - a.max(b);
    let mut sup: f64 = 0.0;
    for (i, &x) in grid.nodes().iter().enumerate() {
        if x > limit + 1e-9 * grid.max_step() {
            break;
        }
        let ka = if a == 0.0 { C64::new(0.0, 0.0) } else { phi.eval(x + a, w)? * (a / (x + a) / wa) };
        let kb = if b == 0.0 { C64::new(0.0, 0.0) } else { phi.eval(x + b, w)? * (b / (x + b) / wb) };
        sup = sup.max((ka - kb).norm() / omega[i]);
    }
    Ok(sup)
}

/// Decision tree over the compactness hypotheses:
/// `φ(s) ↛ 0` as `s → 0` fails; `φ ∈ C₀(1/ω)` with `φ(0) = 0` holds;
/// continuity plus a Cauchy tail of `s ↦ D̄_φδ_s/ω(s)` holds for `D_φ`;
/// anything else is inconclusive.
pub fn compact_verdict(phi: &LInfElement, w: &Weight, tol: &Tolerances) -> AnalysisReport {
    let report = AnalysisReport::new("compact_verdict")
        .param("weight", w)
        .param("tol_vanish", tol.vanish)
        .param("tol_cauchy", tol.cauchy)
        .caveat(ON_GRID)
        .caveat(PROXY)
        .caveats_from(phi.caveats());
    match decide(phi, w, tol, report.clone()) {
        Ok(r) => r,
        Err(e) => report.caveat(e.to_string()).conclude(Verdict::Inconclusive),
    }
}

fn decide(phi: &LInfElement, w: &Weight, tol: &Tolerances, report: AnalysisReport) -> Result<AnalysisReport> {
    let grid = phi.grid();
    let profile = phi.profile(w)?;
    let nodes = grid.nodes();
    let reference = phi.linf_norm(w)?;
    let mut report = report.summarize("reference_sup", reference);
    if reference == 0.0 && phi.tail() == LInfTail::Zero {
        return Ok(report
            .with_evidence(Evidence::new("profile", vec![(0.0, 0.0)]))
            .caveat("φ = 0 gives the zero operator")
            .conclude(Verdict::Holds));
    }
    let at_zero = profile[0];
    let slope = if profile.len() > 1 {
        (phi.samples()[1] - phi.samples()[0]).norm() / ((nodes[1] - nodes[0]) * reference)
    } else {
        0.0
    };
    let near_zero: Vec<(f64, f64)> = nodes
        .iter()
        .zip(&profile)
        .take_while(|(&t, _)| t <= 1.0)
        .map(|(&t, &v)| (t, v))
        .collect();
    report = report
        .summarize("phi_at_zero", at_zero)
        .summarize("first_step_slope", slope)
        .with_evidence(Evidence::new("profile_near_zero", near_zero));
    if at_zero > tol.vanish * reference || slope > tol.lipschitz {
        return Ok(report
            .caveat("φ(s) does not tend to 0 as s → 0 on the grid")
            .conclude(Verdict::Fails));
    }
    let c0 = is_c0_membership_with(phi, w, tol);
    if c0.verdict == Verdict::Holds {
        return Ok(report
            .caveat("hypothesis verified: φ ∈ C₀(1/ω) with φ(0) = 0")
            .with_evidence(c0.evidence_named("window_max").expect("c0 evidence").clone())
            .conclude(Verdict::Holds));
    }
    report = report.caveat("φ ∉ C₀(1/ω) on the grid");
    let continuous = c0.summary_value("lipschitz").is_some_and(|l| l <= tol.lipschitz);
    let mut s_list = Vec::new();
    let mut s = 1.0;
    while s <= 0.5 * grid.t_max() {
        s_list.push(s);
        s *= 2.0;
    }
    if !continuous || s_list.len() < 4 {
        return Ok(report
            .caveat(if continuous {
                "grid too short for a Cauchy tail"
            } else {
                "φ is not continuous on the grid"
            })
            .conclude(Verdict::Inconclusive));
    }
    let omega = w.sample(grid)?;
    let diffs = s_list
        .windows(2)
        .map(|p| Ok((p[1], scaled_delta_distance(phi, w, &omega, p[0], p[1])?)))
        .collect::<Result<Vec<_>>>()?;
    let last = diffs.last().expect("at least three pairs").1;
    let tail = &diffs[diffs.len() - 3..];
    let settling = tail.windows(2).all(|p| p[1].1 <= p[0].1 * (1.0 + 1e-12));
    report = report
        .summarize("cauchy_last", last)
        .with_evidence(Evidence::new("cauchy_diff", diffs.clone()))
        .caveat("Cauchy differences use only t + s ≤ T_max");
    Ok(if settling && last <= tol.cauchy * reference {
        report
            .caveat("hypothesis verified: D̄_φδ_s/ω(s) is Cauchy as s → ∞; no verdict on D̄_φ")
            .conclude(Verdict::HoldsForD)
    } else {
        report
            .caveat("no compactness hypothesis verified")
            .conclude(Verdict::Inconclusive)
    })
}

/// For `φ = ω − 1`: the measured `∥D̄_φδ_s/ω(s) − 1∥` against
/// `sup_t |ω(t+s) − ω(s)|/(ω(t)ω(s)) + 1/ω(s) + sup_t t/((t+s)ω(t))`,
/// all sups over `t + s ≤ T_max`.
pub fn omega_minus_one_bound(w: &Weight, grid: &Arc<Grid>, s_list: &[f64]) -> Result<AnalysisReport> {
    let omega = w.sample(grid)?;
    let phi = LInfElement::new(
        grid,
        omega.iter().map(|&o| C64::new(o - 1.0, 0.0)).collect(),
        LInfTail::SubmultBound,
    )?;
    let kernel = DerivationKernel::new(&phi, w);
    let nodes = grid.nodes();
    let mut measured = Vec::with_capacity(s_list.len());
    let mut bound = Vec::with_capacity(s_list.len());
    for &s in s_list {
        if !(s > 0.0) || s >= grid.t_max() {
            return Err(Error::InvalidParams(format!("s = {s} must lie in (0, T_max)")));
        }
        let ws = w.eval(s)?;
        let d = kernel.deriv_delta(s)?;
        let mut m: f64 = 0.0;
        let (mut a, mut c): (f64, f64) = (0.0, 0.0);
        for (i, &t) in nodes.iter().enumerate().take(d.known_len()) {
            if t + s > grid.t_max() + 1e-9 * grid.max_step() {
                break;
            }
            m = m.max((d.samples()[i] / ws - 1.0).norm() / omega[i]);
            a = a.max((w.eval(t + s)? - ws).abs() / (omega[i] * ws));
            c = c.max(t / ((t + s) * omega[i]));
        }
        measured.push((s, m));
        bound.push((s, a + 1.0 / ws + c));
    }
    let excess = measured
        .iter()
        .zip(&bound)
        .map(|(m, b)| m.1 - b.1)
        .fold(f64::NEG_INFINITY, f64::max);
    let report = AnalysisReport::new("omega_minus_one_bound")
        .param("weight", w)
        .param("points", s_list.len())
        .summarize("max_excess", if s_list.is_empty() { 0.0 } else { excess })
        .summarize("measured_max", measured.iter().map(|p| p.1).fold(0.0, f64::max))
        .caveat(ON_GRID)
        .caveat("sups restricted to t + s ≤ T_max")
        .with_evidence(Evidence::new("measured", measured))
        .with_evidence(Evidence::new("bound", bound));
    Ok(if excess <= 1e-12 || s_list.is_empty() {
        report.conclude(Verdict::Holds)
    } else {
        report.conclude(Verdict::Fails)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: f64, t: f64) -> Arc<Grid> {
        Arc::new(Grid::uniform(h, t).unwrap())
    }

    #[test]
    fn step_witness() {
        let g = grid(1.0 / 8192.0, 2.0);
        let one = Weight::constant_one();
        let phi = LInfElement::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        let r = noncompact_witness_step(&phi, &one, 1.0, 0.5, &[4, 8, 16], &Tolerances::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Fails);
        assert!((r.summary_value("alpha").unwrap() - 0.5).abs() < 1e-12);
        assert!((r.summary_value("epsilon").unwrap() - 0.5).abs() < 1e-12);
        let smooth = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| (-t).exp()).unwrap();
        assert!(matches!(
            noncompact_witness_step(&smooth, &one, 1.0, 0.5, &[4], &Tolerances::default()),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn limit_witness_rejects_bad_input() {
        let g = grid(1.0 / 16.0, 20.0);
        let one = Weight::constant_one();
        let phi = LInfElement::weight_multiple(&g, &one, C64::new(1.0, 0.0)).unwrap();
        let test = L1Element::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        let tol = Tolerances::default();
        assert!(matches!(
            noncompact_witness_limit(&phi, &one, C64::new(0.0, 0.0), &[2], &test, &tol),
            Err(Error::InvalidParams(_))
        ));
        let pw = Weight::power(1.0).unwrap();
        assert!(matches!(
            noncompact_witness_limit(&phi, &pw, C64::new(1.0, 0.0), &[2], &test, &tol),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn verdict_tree() {
        let one = Weight::constant_one();
        let tol = Tolerances::default();
        let g = grid(1.0 / 16.0, 64.0);
        assert_eq!(compact_verdict(&LInfElement::zero(&g), &one, &tol).verdict, Verdict::Holds);
        let step = LInfElement::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(compact_verdict(&step, &one, &tol).verdict, Verdict::Fails);
        let te = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| t * (-t).exp()).unwrap();
        assert_eq!(compact_verdict(&te, &one, &tol).verdict, Verdict::Holds);
        let w2 = Weight::power(2.0).unwrap();
        let g = grid(1.0 / 8.0, 1200.0);
        let phi = LInfElement::from_fn_inferred(&g, &w2, &tol, |t| C64::new((1.0 + t).powi(2) - 1.0, 0.0)).unwrap();
        let r = compact_verdict(&phi, &w2, &tol);
        assert_eq!(r.verdict, Verdict::HoldsForD, "{}", r.to_text());
    }

    #[test]
    fn three_term_bound_dominates() {
        let g = grid(1.0 / 8.0, 400.0);
        for alpha in [0.5, 2.0] {
            let w = Weight::power(alpha).unwrap();
            let s: Vec<f64> = (1..40).map(|k| f64::from(k) * 5.0).collect();
            let r = omega_minus_one_bound(&w, &g, &s).unwrap();
            assert_eq!(r.verdict, Verdict::Holds, "{}", r.to_text());
        }
    }

    #[test]
    fn svd_of_zero_and_rank_one() {
        let g = grid(0.25, 8.0);
        let one = Weight::constant_one();
        let r = svd_decay(&LInfElement::zero(&g), &one, &grid(0.25, 4.0));
        assert_eq!(r.verdict, Verdict::Inconclusive);
        assert_eq!(r.summary_value("sigma_1"), Some(0.0));
        let te = LInfElement::from_real_fn(&grid(1.0 / 16.0, 64.0), LInfTail::Zero, |t| t * (-t).exp()).unwrap();
        let r = svd_decay(&te, &one, &Grid::uniform(1.0 / 16.0, 32.0).unwrap());
        assert!(r.summary_value("rank_1e-3").unwrap() <= 40.0);
    }
}
