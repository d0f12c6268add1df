//! Convolution, the dual-module action and the approximate identity `e_n`.

use std::sync::Arc;

use crate::kernel::{correlate, Split};
use crate::report::{AnalysisReport, Evidence, Verdict};
use crate::spaces::{ensure_same_grid, is_c0_membership, pairing_c0_measure, ON_GRID, SUBMULT_TAIL};
use crate::{Error, Exec, Grid, L1Element, L1Tail, LInfElement, LInfTail, MeasureElement, Result, Weight, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// `φ` sampled at `k·h` for `k < len`, continued past `T_max` by its tail.
/// Stops early where values are only bounded.
pub(crate) struct ExtendedPhi {
    pub vals: Split,
    pub raw: Vec<C64>,
    pub known: usize,
}

impl ExtendedPhi {
    pub fn new(phi: &LInfElement, w: &Weight, h: f64, len: usize) -> Self {
        let mut raw: Vec<C64> = phi.samples().to_vec();
        if phi.is_complete() {
            match phi.tail() {
                LInfTail::Zero => raw.resize(len.max(raw.len()), ZERO),
                LInfTail::ProportionalToWeight(a) => {
                    for k in raw.len()..len {
                        match w.eval(k as f64 * h) {
                            Ok(o) => raw.push(a * o),
                            Err(_) => break,
                        }
                    }
                }
                LInfTail::SubmultBound => {}
            }
        }
        let known = raw.len();
        ExtendedPhi {
            vals: Split::new(&raw),
            raw,
            known,
        }
    }
}

fn weighted_coeffs(f: &L1Element) -> Vec<C64> {
    f.samples()
        .iter()
        .zip(f.grid().weights())
        .map(|(z, w)| z * w)
        .collect()
}

/// `(f∗g)(t) = ∫₀^t f(s) g(t−s) ds`, trapezoid on `[0, t_k]` at each node.
pub fn convolve_l1(f: &L1Element, g: &L1Element) -> Result<L1Element> {
    convolve_l1_with(Exec::default(), f, g)
}

pub fn convolve_l1_with(exec: Exec, f: &L1Element, g: &L1Element) -> Result<L1Element> {
    ensure_same_grid(f.grid(), g.grid())?;
    let grid = f.grid();
    let n = grid.len();
    let (Some((flo, fhi)), Some((glo, ghi))) = (f.support(), g.support()) else {
        return Ok(L1Element::zero(grid));
    };
    let both_compact = f.tail() == L1Tail::CompactSupport && g.tail() == L1Tail::CompactSupport;
    let out_hi = (fhi + ghi).min(n - 1);
    let tail = if both_compact && fhi + ghi < n {
        L1Tail::CompactSupport
    } else {
        L1Tail::None
    };
    let mut out = vec![ZERO; n];
    match grid.spacing() {
        Some(h) => {
            let fs = f.samples();
            let gs = g.samples();
            let a = Split::new(fs);
            // g reversed so that g_{k-j} becomes a forward index
            let grev = Split::new(gs).reversed();
            let m = n - 1;
            let lo_k = flo + glo;
            let vals = exec.map(out_hi + 1 - lo_k, |r| {
                let k = lo_k + r;
                if k == 0 {
                    return ZERO;
                }
                let j0 = flo.max(k.saturating_sub(ghi));
                let j1 = fhi.min(k - glo);
                if j0 > j1 {
                    return ZERO;
                }
                // Σ f_j g_{k-j} = Σ f_j grev_{m-k+j}
                let s = correlate(Exec::Sequential, &a, j0, j1, &grev, m - k, 1)[0];
                let mut acc = s * h;
                if j0 == 0 {
                    acc -= 0.5 * h * fs[0] * gs[k];
                }
                if j1 == k {
                    acc -= 0.5 * h * fs[k] * gs[0];
                }
                acc
            });
            out[lo_k..=out_hi].copy_from_slice(&vals);
        }
        None => {
            let nodes = grid.nodes();
            let vals = exec.map(out_hi + 1, |k| {
                let mut acc = ZERO;
                for j in flo..=fhi.min(k) {
                    let gv = grid.interpolate(g.samples(), nodes[k] - nodes[j]).unwrap_or(ZERO);
                    acc += grid.partial_weight(j, k) * f.samples()[j] * gv;
                }
                acc
            });
            out[..=out_hi].copy_from_slice(&vals);
        }
    }
    L1Element::from_samples(grid, out, tail)
}

/// `(g·φ)(t) = ∫₀^∞ g(s) φ(t+s) ds`. Nodes whose stencil leaves the known
/// part of `φ` are dropped, giving a known prefix.
pub fn module_action(g: &L1Element, phi: &LInfElement, w: &Weight) -> Result<LInfElement> {
    module_action_with(Exec::default(), g, phi, w)
}

pub fn module_action_with(exec: Exec, g: &L1Element, phi: &LInfElement, w: &Weight) -> Result<LInfElement> {
    ensure_same_grid(g.grid(), phi.grid())?;
    let grid = g.grid();
    if g.tail() != L1Tail::CompactSupport && phi.tail() == LInfTail::SubmultBound {
        return Err(Error::Tail(
            "module action of a non-compact g against a bounded-only tail".into(),
        ));
    }
    let Some((lo, hi)) = g.support() else {
        return Ok(LInfElement::zero(grid).with_caveats(phi.caveats()));
    };
    let out_tail = if phi.tail() == LInfTail::Zero {
        LInfTail::Zero
    } else {
        LInfTail::SubmultBound
    };
    let n = grid.len();
    let coeffs = Split::new(&weighted_coeffs(g));
    let vals = match grid.spacing() {
        Some(h) => {
            let ext = ExtendedPhi::new(phi, w, h, n + hi);
            let n_out = n.min(ext.known.saturating_sub(hi));
            correlate(exec, &coeffs, lo, hi, &ext.vals, 0, n_out)
        }
        None => generic_rows(exec, grid, |t, s| phi.eval(t + s, w), g, lo, hi),
    };
    finish(grid, vals, out_tail, phi, g)
}

/// Row sums `Σ_j w_j g_j K(t_i, s_j)` on arbitrary grids, stopping at the
/// first row whose kernel is unknown.
pub(crate) fn generic_rows(
    exec: Exec,
    grid: &Grid,
    kernel: impl Fn(f64, f64) -> Result<C64> + Sync + Send,
    g: &L1Element,
    lo: usize,
    hi: usize,
) -> Vec<C64> {
    let nodes = grid.nodes();
    let wts = grid.weights();
    let rows: Vec<Option<C64>> = exec.map(grid.len(), |i| {
        let mut acc = ZERO;
        for j in lo..=hi {
            acc += wts[j] * g.samples()[j] * kernel(nodes[i], nodes[j]).ok()?;
        }
        Some(acc)
    });
    rows.into_iter().map_while(|r| r).collect()
}

pub(crate) fn finish(
    grid: &Arc<Grid>,
    vals: Vec<C64>,
    tail: LInfTail,
    phi: &LInfElement,
    g: &L1Element,
) -> Result<LInfElement> {
    if vals.is_empty() {
        return Err(Error::Tail(
            "no grid node has a fully known quadrature stencil".into(),
        ));
    }
    let tail = if vals.len() < grid.len() {
        LInfTail::SubmultBound
    } else {
        tail
    };
    let mut out = LInfElement::new(grid, vals, tail)?.with_caveats(phi.caveats());
    if tail == LInfTail::SubmultBound {
        out = out.with_caveat(SUBMULT_TAIL);
    }
    if g.tail() != L1Tail::CompactSupport {
        out = out.with_caveat("input truncated at T_max");
    }
    Ok(out)
}

/// `g∗μ = Σ c_k τ_{s_k} g + g∗density`.
pub fn convolve_measure(g: &L1Element, mu: &MeasureElement) -> Result<L1Element> {
    let grid = g.grid();
    let mut acc = L1Element::zero(grid);
    for &(s, c) in mu.atoms() {
        if s > grid.t_max() + 1e-9 * grid.max_step() {
            return Err(Error::Tail(format!(
                "atom at {s} lies past T_max = {}",
                grid.t_max()
            )));
        }
        acc = acc.add(&g.translate(s)?.scale(c))?;
    }
    if let Some(d) = mu.density() {
        acc = acc.add(&convolve_l1(g, d)?)?;
    }
    Ok(acc)
}

/// `e_n = n·1_{[0,1/n]}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ApproxIdentity {
    pub n: u32,
}

impl ApproxIdentity {
    pub fn new(n: u32) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParams("approximate identity index must be >= 1".into()));
        }
        Ok(ApproxIdentity { n })
    }

    pub fn element(&self, grid: &Arc<Grid>) -> Result<L1Element> {
        let n = self.n as f64;
        L1Element::indicator(grid, 0.0, 1.0 / n, n)
    }
}

fn monotone_decay(v: &[f64]) -> bool {
    v.windows(2).all(|p| p[1] < p[0] || (p[0] == 0.0 && p[1] == 0.0))
}

/// Residuals `∥e_n·h − h∥` and `|⟨e_n·h, μ⟩ − ⟨h, μ⟩|` along `n_list`.
pub fn check_bai_convergence(
    h: &LInfElement,
    mu: &MeasureElement,
    w: &Weight,
    n_list: &[u32],
) -> AnalysisReport {
    let mut report = AnalysisReport::new("check_bai_convergence")
        .param("weight", w)
        .param("n_list", format!("{n_list:?}"))
        .caveat(ON_GRID)
        .caveats_from(h.caveats());
    if is_c0_membership(h, w).verdict != Verdict::Holds {
        report = report.caveat("h did not pass the C0 membership check");
    }
    let run = || -> Result<(Vec<(f64, f64)>, Vec<(f64, f64)>)> {
        let base = pairing_c0_measure(h, mu)?;
        let mut norms = Vec::new();
        let mut pairs = Vec::new();
        for &n in n_list {
            let e = ApproxIdentity::new(n)?.element(h.grid())?;
            let eh = module_action(&e, h, w)?;
            let diff = eh.sub(h)?;
            norms.push((n as f64, diff.linf_norm(w)?));
            pairs.push((n as f64, (pairing_c0_measure(&eh, mu)? - base).norm()));
        }
        Ok((norms, pairs))
    };
    match run() {
        Ok((norms, pairs)) => {
            let nv: Vec<f64> = norms.iter().map(|p| p.1).collect();
            let pv: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let (nm, pm) = (monotone_decay(&nv), monotone_decay(&pv));
            let verdict = if n_list.is_empty() {
                report = report.caveat("empty index list");
                Verdict::Inconclusive
            } else if nm && pm {
                Verdict::Holds
            } else {
                Verdict::Fails
            };
            report
                .summarize("norm_residual_last", nv.last().copied().unwrap_or(0.0))
                .summarize("pairing_residual_last", pv.last().copied().unwrap_or(0.0))
                .summarize("norm_monotone", nm as u8 as f64)
                .summarize("pairing_monotone", pm as u8 as f64)
                .with_evidence(Evidence::new("norm_residual", norms))
                .with_evidence(Evidence::new("pairing_residual", pairs))
                .conclude(verdict)
        }
        Err(e) => report.caveat(e.to_string()).conclude(Verdict::Inconclusive),
    }
}
