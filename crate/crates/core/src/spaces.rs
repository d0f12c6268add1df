//! Discretised members of `L¹(ω)`, `L^∞(1/ω)` and `M(ω)`.
//!
//! Elements live on a shared [`Grid`]; what happens past `T_max` is stated by
//! a tail descriptor and never extrapolated from samples.

use std::sync::Arc;

use crate::config::Tolerances;
use crate::decay::{dyadic_maxima, last_window_below, lipschitz_statistic, windows_evidence};
use crate::report::{AnalysisReport, Evidence, Verdict};
use crate::{Error, Grid, Result, Weight, C64};

pub(crate) const ON_GRID: &str = "verified on grid";
pub(crate) const SUBMULT_TAIL: &str =
    "values past the known grid region are bounded only by submultiplicativity";

fn same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

pub(crate) fn ensure_same_grid(a: &Arc<Grid>, b: &Arc<Grid>) -> Result<()> {
    if same_grid(a, b) {
        Ok(())
    } else {
        Err(Error::GridMismatch)
    }
}

/// Adds `height · 1_{[a,b]}` to `out`, touching only nodes in `[a, b]`.
/// A node sitting on a jump gets `height/2`, except `t = 0 = a`.
pub(crate) fn add_indicator(grid: &Grid, a: f64, b: f64, height: f64, out: &mut [C64]) {
    if !(b > a) || out.is_empty() {
        return;
    }
    let n = out.len() - 1;
    let first = match grid.locate(a.max(0.0)) {
        Some((k, f)) if f == 0.0 => {
            if k <= n {
                out[k] += if k == 0 { height } else { 0.5 * height };
            }
            k + 1
        }
        Some((k, _)) => k + 1,
        None => return,
    };
    let (last, b_on_node) = match grid.locate(b) {
        Some((k, f)) => (k, f == 0.0),
        None => (grid.len() - 1, false),
    };
    let stop = if b_on_node { last } else { last + 1 };
    for z in out.iter_mut().take(stop.min(n + 1)).skip(first) {
        *z += height;
    }
    if b_on_node && last <= n && last >= first {
        out[last] += 0.5 * height;
    }
}

fn indicator_samples(grid: &Grid, a: f64, b: f64) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); grid.len()];
    add_indicator(grid, a, b, 1.0, &mut out);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum L1Tail {
    /// `f ≡ 0` past `T_max`.
    CompactSupport,
    /// Nothing is known past `T_max`.
    None,
}

#[derive(Clone, Debug, PartialEq)]
pub struct L1Element {
    grid: Arc<Grid>,
    samples: Vec<C64>,
    tail: L1Tail,
    support: Option<(usize, usize)>,
}

impl L1Element {
    pub fn from_samples(grid: &Arc<Grid>, samples: Vec<C64>, tail: L1Tail) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::InvalidParams(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        if samples.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParams("non-finite L1 sample".into()));
        }
        let first = samples.iter().position(|z| *z != C64::new(0.0, 0.0));
        let last = samples.iter().rposition(|z| *z != C64::new(0.0, 0.0));
        Ok(L1Element {
            grid: Arc::clone(grid),
            samples,
            tail,
            support: first.zip(last),
        })
    }

    pub fn from_fn(grid: &Arc<Grid>, tail: L1Tail, f: impl Fn(f64) -> C64) -> Result<Self> {
        let s = grid.nodes().iter().map(|&t| f(t)).collect();
        Self::from_samples(grid, s, tail)
    }

    pub fn from_real_fn(grid: &Arc<Grid>, tail: L1Tail, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, tail, |t| C64::new(f(t), 0.0))
    }

    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self::from_samples(grid, vec![C64::new(0.0, 0.0); grid.len()], L1Tail::CompactSupport)
            .expect("length matches")
    }

    /// `height · 1_{[a,b]}`, sampled with the midpoint convention at jump nodes.
    pub fn indicator(grid: &Arc<Grid>, a: f64, b: f64, height: f64) -> Result<Self> {
        if !(0.0 <= a && a <= b) {
            return Err(Error::InvalidParams(format!("indicator needs 0 <= a <= b, got [{a}, {b}]")));
        }
        if b > grid.t_max() + 1e-9 * grid.max_step() {
            return Err(Error::SupportOverflow {
                needed: b,
                t_max: grid.t_max(),
            });
        }
        let s = indicator_samples(grid, a, b)
            .into_iter()
            .map(|z| z * height)
            .collect();
        Self::from_samples(grid, s, L1Tail::CompactSupport)
    }

    /// Smooth bump `height · sin²(π(t−a)/(b−a))` on `[a, b]`.
    pub fn bump(grid: &Arc<Grid>, a: f64, b: f64, height: f64) -> Result<Self> {
        if !(0.0 <= a && a < b) {
            return Err(Error::InvalidParams(format!("bump needs 0 <= a < b, got [{a}, {b}]")));
        }
        if b > grid.t_max() + 1e-9 * grid.max_step() {
            return Err(Error::SupportOverflow {
                needed: b,
                t_max: grid.t_max(),
            });
        }
        let width = b - a;
        Self::from_real_fn(grid, L1Tail::CompactSupport, |t| {
            if t > a && t < b {
                height * (std::f64::consts::PI * (t - a) / width).sin().powi(2)
            } else {
                0.0
            }
        })
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn tail(&self) -> L1Tail {
        self.tail
    }

    /// Inclusive index range of non-zero samples.
    pub fn support(&self) -> Option<(usize, usize)> {
        self.support
    }

    /// Right end of the sampled support (0 for the zero element).
    pub fn support_end(&self) -> f64 {
        self.support.map_or(0.0, |(_, j)| self.grid.node(j))
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_none() && self.tail == L1Tail::CompactSupport
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|z| z.im == 0.0)
    }

    pub fn scale(&self, c: C64) -> Self {
        Self::from_samples(
            &self.grid,
            self.samples.iter().map(|z| z * c).collect(),
            self.tail,
        )
        .expect("same length")
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let tail = if self.tail == L1Tail::CompactSupport && other.tail == L1Tail::CompactSupport {
            L1Tail::CompactSupport
        } else {
            L1Tail::None
        };
        let s = self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a + b)
            .collect();
        Self::from_samples(&self.grid, s, tail)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn eval(&self, t: f64) -> Result<C64> {
        if t > self.grid.t_max() {
            return match self.tail {
                L1Tail::CompactSupport => Ok(C64::new(0.0, 0.0)),
                L1Tail::None => Err(Error::Tail(format!(
                    "L1 element has no tail information at t = {t}"
                ))),
            };
        }
        self.grid
            .interpolate(&self.samples, t)
            .ok_or_else(|| Error::Domain(format!("t = {t} outside the grid")))
    }

    /// `(τ_s f)(t) = f(t − s)`, linear interpolation off nodes.
    pub fn translate(&self, s: f64) -> Result<Self> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("negative translation {s}")));
        }
        if self.tail == L1Tail::CompactSupport && self.support_end() + s > self.grid.t_max() + 1e-9 {
            return Err(Error::SupportOverflow {
                needed: self.support_end() + s,
                t_max: self.grid.t_max(),
            });
        }
        let zero = C64::new(0.0, 0.0);
        let snap = 1e-9 * self.grid.max_step();
        let vals = self
            .grid
            .nodes()
            .iter()
            .map(|&t| {
                if t + snap < s {
                    zero
                } else if s > 0.0 && (t - s).abs() <= snap {
                    // the jump created at t = s takes the midpoint value
                    0.5 * self.samples[0]
                } else {
                    self.grid
                        .interpolate(&self.samples, (t - s).max(0.0))
                        .unwrap_or(zero)
                }
            })
            .collect();
        Self::from_samples(&self.grid, vals, self.tail)
    }

    pub fn l1_norm(&self, w: &Weight) -> Result<f64> {
        let omega = w.sample(&self.grid)?;
        let wts = self.grid.weights();
        Ok(self
            .samples
            .iter()
            .enumerate()
            .map(|(i, z)| wts[i] * z.norm() * omega[i])
            .sum())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LInfTail {
    /// `φ ≡ 0` past `T_max`.
    Zero,
    /// `φ(t) = α·ω(t)` past `T_max`.
    ProportionalToWeight(C64),
    /// Only `|φ(t)| ≤ ∥φ∥·ω(t)` is known past the sampled region.
    SubmultBound,
}

impl LInfTail {
    fn combine(self, other: LInfTail) -> LInfTail {
        match (self, other) {
            (LInfTail::SubmultBound, _) | (_, LInfTail::SubmultBound) => LInfTail::SubmultBound,
            (LInfTail::Zero, t) | (t, LInfTail::Zero) => t,
            (LInfTail::ProportionalToWeight(a), LInfTail::ProportionalToWeight(b)) => {
                LInfTail::ProportionalToWeight(a + b)
            }
        }
    }

    fn scale(self, c: C64) -> LInfTail {
        match self {
            LInfTail::ProportionalToWeight(a) => LInfTail::ProportionalToWeight(a * c),
            t => t,
        }
    }
}

/// A member of `L^∞(1/ω)`. Samples may cover only a prefix of the grid,
/// in which case the tail is [`LInfTail::SubmultBound`].
#[derive(Clone, Debug, PartialEq)]
pub struct LInfElement {
    grid: Arc<Grid>,
    samples: Vec<C64>,
    tail: LInfTail,
    caveats: Vec<String>,
}

impl LInfElement {
    pub fn new(grid: &Arc<Grid>, samples: Vec<C64>, tail: LInfTail) -> Result<Self> {
        if samples.len() > grid.len() || samples.is_empty() {
            return Err(Error::InvalidParams(format!(
                "{} samples for a grid of {} nodes",
                samples.len(),
                grid.len()
            )));
        }
        if samples.len() < grid.len() && tail != LInfTail::SubmultBound {
            return Err(Error::Tail(
                "a partially sampled element must carry the submultiplicative-bound tail".into(),
            ));
        }
        if samples.iter().any(|z| !z.is_finite()) {
            return Err(Error::InvalidParams("non-finite L-infinity sample".into()));
        }
        let mut caveats = Vec::new();
        if samples.len() < grid.len() {
            caveats.push(format!(
                "known on [0, {}] only",
                grid.node(samples.len() - 1)
            ));
        }
        Ok(LInfElement {
            grid: Arc::clone(grid),
            samples,
            tail,
            caveats,
        })
    }

    pub fn from_fn(grid: &Arc<Grid>, tail: LInfTail, f: impl Fn(f64) -> C64) -> Result<Self> {
        Self::new(grid, grid.nodes().iter().map(|&t| f(t)).collect(), tail)
    }

    pub fn from_real_fn(grid: &Arc<Grid>, tail: LInfTail, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(grid, tail, |t| C64::new(f(t), 0.0))
    }

    /// Samples `f` and picks the tail from the last 10% of `|f|/ω`: zero if
    /// the profile ends at rounding level, proportional to `ω` if it settles
    /// on its final value, otherwise the submultiplicative bound.
    pub fn from_fn_inferred(
        grid: &Arc<Grid>,
        w: &Weight,
        tol: &Tolerances,
        f: impl Fn(f64) -> C64,
    ) -> Result<Self> {
        let samples: Vec<C64> = grid.nodes().iter().map(|&t| f(t)).collect();
        let omega = w.sample(grid)?;
        let n = samples.len() - 1;
        let sup = samples
            .iter()
            .zip(&omega)
            .map(|(z, o)| z.norm() / o)
            .fold(0.0, f64::max);
        let last = samples[n] / omega[n];
        let mut el = Self::new(grid, samples, LInfTail::SubmultBound)?;
        if last.norm() <= 1e-12 * sup.max(f64::MIN_POSITIVE) {
            el.tail = LInfTail::Zero;
        } else {
            el.tail = LInfTail::ProportionalToWeight(last);
            if !el.tail_consistent(w, tol.tail)? {
                el.tail = LInfTail::SubmultBound;
            }
        }
        Ok(el)
    }

    /// `α·ω` with the matching proportional tail.
    pub fn weight_multiple(grid: &Arc<Grid>, w: &Weight, alpha: C64) -> Result<Self> {
        let omega = w.sample(grid)?;
        Self::new(
            grid,
            omega.iter().map(|&o| alpha * o).collect(),
            LInfTail::ProportionalToWeight(alpha),
        )
    }

    pub fn zero(grid: &Arc<Grid>) -> Self {
        Self::new(grid, vec![C64::new(0.0, 0.0); grid.len()], LInfTail::Zero)
            .expect("full length")
    }

    /// `height · 1_{[a,b]}` with zero tail; `b` may exceed `T_max` only if
    /// the tail is meant to be truncated.
    pub fn indicator(grid: &Arc<Grid>, a: f64, b: f64, height: f64) -> Result<Self> {
        let s = indicator_samples(grid, a, b)
            .into_iter()
            .map(|z| z * height)
            .collect();
        Self::new(grid, s, LInfTail::Zero)
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    pub fn tail(&self) -> LInfTail {
        self.tail
    }

    pub fn caveats(&self) -> &[String] {
        &self.caveats
    }

    pub fn with_caveat(mut self, c: impl Into<String>) -> Self {
        let c = c.into();
        if !self.caveats.contains(&c) {
            self.caveats.push(c);
        }
        self
    }

    pub(crate) fn with_caveats(mut self, cs: &[String]) -> Self {
        for c in cs {
            self = self.with_caveat(c.clone());
        }
        self
    }

    /// Number of leading grid nodes with known values.
    pub fn known_len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_complete(&self) -> bool {
        self.samples.len() == self.grid.len()
    }

    pub fn is_real(&self) -> bool {
        self.samples.iter().all(|z| z.im == 0.0)
            && match self.tail {
                LInfTail::ProportionalToWeight(a) => a.im == 0.0,
                _ => true,
            }
    }

    pub fn scale(&self, c: C64) -> Self {
        let tail = if c == C64::new(0.0, 0.0) && self.is_complete() {
            LInfTail::Zero
        } else {
            self.tail.scale(c)
        };
        LInfElement {
            grid: Arc::clone(&self.grid),
            samples: self.samples.iter().map(|z| z * c).collect(),
            tail,
            caveats: self.caveats.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        ensure_same_grid(&self.grid, &other.grid)?;
        let n = self.known_len().min(other.known_len());
        let s = (0..n).map(|i| self.samples[i] + other.samples[i]).collect();
        let tail = if n < self.grid.len() {
            LInfTail::SubmultBound
        } else {
            self.tail.combine(other.tail)
        };
        Ok(Self::new(&self.grid, s, tail)?
            .with_caveats(&self.caveats)
            .with_caveats(&other.caveats))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    /// `φ(t)`: interpolated on the known region, from the tail past `T_max`.
    pub fn eval(&self, t: f64, w: &Weight) -> Result<C64> {
        if t > self.grid.t_max() + 1e-9 * self.grid.max_step() {
            return match self.tail {
                LInfTail::Zero => Ok(C64::new(0.0, 0.0)),
                LInfTail::ProportionalToWeight(a) => Ok(a * w.eval(t)?),
                LInfTail::SubmultBound => Err(Error::Tail(format!(
                    "value at t = {t} is only bounded, not known"
                ))),
            };
        }
        self.grid.interpolate(&self.samples, t).ok_or_else(|| {
            if t < 0.0 {
                Error::Domain(format!("negative argument t = {t}"))
            } else {
                Error::Tail(format!("value at t = {t} lies past the known grid prefix"))
            }
        })
    }

    /// `|φ(t_i)|/ω(t_i)` over the known prefix.
    pub fn profile(&self, w: &Weight) -> Result<Vec<f64>> {
        let omega = w.sample(&self.grid)?;
        Ok(self
            .samples
            .iter()
            .zip(&omega)
            .map(|(z, o)| z.norm() / o)
            .collect())
    }

    /// Grid sup of `|φ|/ω` combined with the tail: zero tail adds nothing,
    /// a proportional tail adds `|α|`.
    pub fn linf_norm(&self, w: &Weight) -> Result<f64> {
        let grid_sup = self.profile(w)?.into_iter().fold(0.0, f64::max);
        Ok(match self.tail {
            LInfTail::ProportionalToWeight(a) => grid_sup.max(a.norm()),
            _ => grid_sup,
        })
    }

    /// Whether a proportional tail coefficient matches `|φ|/ω`'s phase-aware
    /// ratio over the last 10% of the grid within `rel_tol`.
    pub fn tail_consistent(&self, w: &Weight, rel_tol: f64) -> Result<bool> {
        let LInfTail::ProportionalToWeight(a) = self.tail else {
            return Ok(true);
        };
        let omega = w.sample(&self.grid)?;
        let t0 = 0.9 * self.grid.t_max();
        let ok = self
            .grid
            .nodes()
            .iter()
            .enumerate()
            .filter(|(_, &t)| t >= t0)
            .all(|(i, _)| (self.samples[i] / omega[i] - a).norm() <= rel_tol * a.norm());
        Ok(ok)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasureElement {
    atoms: Vec<(f64, C64)>,
    density: Option<L1Element>,
}

impl MeasureElement {
    pub fn new(atoms: Vec<(f64, C64)>, density: Option<L1Element>) -> Result<Self> {
        if atoms.iter().any(|(s, c)| !(*s >= 0.0 && s.is_finite()) || !c.is_finite()) {
            return Err(Error::InvalidParams(
                "atoms need finite non-negative locations and finite masses".into(),
            ));
        }
        Ok(MeasureElement { atoms, density })
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Unit point mass `δ_s`.
    pub fn delta(s: f64) -> Result<Self> {
        Self::new(vec![(s, C64::new(1.0, 0.0))], None)
    }

    pub fn from_density(f: L1Element) -> Self {
        MeasureElement {
            atoms: Vec::new(),
            density: Some(f),
        }
    }

    pub fn atoms(&self) -> &[(f64, C64)] {
        &self.atoms
    }

    pub fn density(&self) -> Option<&L1Element> {
        self.density.as_ref()
    }

    pub fn scale(&self, c: C64) -> Self {
        MeasureElement {
            atoms: self.atoms.iter().map(|&(s, m)| (s, m * c)).collect(),
            density: self.density.as_ref().map(|d| d.scale(c)),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut atoms = self.atoms.clone();
        atoms.extend_from_slice(&other.atoms);
        let density = match (&self.density, &other.density) {
            (Some(a), Some(b)) => Some(a.add(b)?),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Ok(MeasureElement { atoms, density })
    }

    pub fn measure_norm(&self, w: &Weight) -> Result<f64> {
        let mut atoms: Vec<(f64, C64)> = self.atoms.clone();
        atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut total = 0.0;
        let mut k = 0;
        // atoms at one location combine before taking |·|
        while k < atoms.len() {
            let s = atoms[k].0;
            let mut mass = C64::new(0.0, 0.0);
            while k < atoms.len() && atoms[k].0 == s {
                mass += atoms[k].1;
                k += 1;
            }
            total += mass.norm() * w.eval(s)?;
        }
        if let Some(d) = &self.density {
            total += d.l1_norm(w)?;
        }
        Ok(total)
    }
}

pub fn l1_norm(f: &L1Element, w: &Weight) -> Result<f64> {
    f.l1_norm(w)
}

pub fn linf_norm(phi: &LInfElement, w: &Weight) -> Result<f64> {
    phi.linf_norm(w)
}

pub fn measure_norm(mu: &MeasureElement, w: &Weight) -> Result<f64> {
    mu.measure_norm(w)
}

/// `⟨f, φ⟩ = ∫ f φ` by the grid rule over the support of `f`.
pub fn pairing_l1_linf(f: &L1Element, phi: &LInfElement) -> Result<C64> {
    ensure_same_grid(f.grid(), phi.grid())?;
    let Some((lo, hi)) = f.support() else {
        return Ok(C64::new(0.0, 0.0));
    };
    if hi >= phi.known_len() {
        return Err(Error::Tail(format!(
            "f reaches t = {} but φ is known only up to t = {}",
            f.grid().node(hi),
            f.grid().node(phi.known_len() - 1)
        )));
    }
    let wts = f.grid().weights();
    let fs = f.samples();
    let ps = phi.samples();
    Ok((lo..=hi).map(|i| fs[i] * ps[i] * wts[i]).sum())
}

/// `⟨h, μ⟩ = Σ c_k h(s_k) + ∫ h·density`.
pub fn pairing_c0_measure(h: &LInfElement, mu: &MeasureElement) -> Result<C64> {
    let t_max = h.grid().t_max();
    let mut acc = C64::new(0.0, 0.0);
    for &(s, c) in mu.atoms() {
        if s > t_max + 1e-9 * h.grid().max_step() {
            match h.tail() {
                LInfTail::Zero => continue,
                _ => {
                    return Err(Error::Tail(format!(
                        "atom at {s} lies past T_max = {t_max} and h has a non-zero tail"
                    )))
                }
            }
        }
        let v = h
            .grid()
            .interpolate(h.samples(), s)
            .ok_or_else(|| Error::Tail(format!("h is not known at the atom s = {s}")))?;
        acc += c * v;
    }
    if let Some(d) = mu.density() {
        acc += pairing_l1_linf(d, h)?;
    }
    Ok(acc)
}

struct Membership {
    profile: Vec<(f64, f64)>,
    reference: f64,
    decays: bool,
    tail_decays: bool,
    lipschitz: f64,
}

fn membership(phi: &LInfElement, w: &Weight, tol: &Tolerances) -> Result<Membership> {
    let omega = w.sample(phi.grid())?;
    let nodes = phi.grid().nodes();
    let profile: Vec<(f64, f64)> = phi
        .samples()
        .iter()
        .enumerate()
        .map(|(i, z)| (nodes[i], z.norm() / omega[i]))
        .collect();
    let grid_sup = profile.iter().map(|p| p.1).fold(0.0, f64::max);
    let tail_abs = match phi.tail() {
        LInfTail::ProportionalToWeight(a) => a.norm(),
        _ => 0.0,
    };
    let reference = grid_sup.max(tail_abs);
    let windows = dyadic_maxima(&profile);
    let decays = reference == 0.0 || last_window_below(&windows, tol.decay * reference);
    let tail_decays = tail_abs <= tol.decay * reference;
    let s = phi.samples();
    let lipschitz = lipschitz_statistic(
        nodes,
        s.windows(2).map(|p| (p[1] - p[0]).norm()),
        &omega,
        reference,
    );
    Ok(Membership {
        profile,
        reference,
        decays,
        tail_decays,
        lipschitz,
    })
}

fn membership_report(
    name: &str,
    phi: &LInfElement,
    w: &Weight,
    tol: &Tolerances,
    check_continuity: bool,
) -> AnalysisReport {
    let report = AnalysisReport::new(name)
        .param("weight", w)
        .param("tol_decay", tol.decay)
        .caveat(ON_GRID)
        .caveats_from(phi.caveats());
    let m = match membership(phi, w, tol) {
        Ok(m) => m,
        Err(e) => return report.caveat(e.to_string()).conclude(Verdict::Inconclusive),
    };
    let windows = dyadic_maxima(&m.profile);
    let mut report = report
        .summarize("reference_sup", m.reference)
        .summarize(
            "last_window_max",
            windows.last().map_or(0.0, |w| w.max),
        )
        .with_evidence(windows_evidence("window_max", &windows));
    if check_continuity {
        report = report
            .param("lipschitz_cap", tol.lipschitz)
            .summarize("lipschitz", m.lipschitz);
    }
    if phi.tail() == LInfTail::SubmultBound {
        report = report.caveat(SUBMULT_TAIL);
    }
    let continuous = !check_continuity || m.lipschitz <= tol.lipschitz;
    let verdict = if m.decays && m.tail_decays && continuous {
        Verdict::Holds
    } else {
        if !continuous {
            report = report.caveat("divided differences exceed the grid continuity cap");
        }
        Verdict::Fails
    };
    report.conclude(verdict)
}

/// `φ ∈ C₀(1/ω)`: dyadic decay of `|φ|/ω` plus grid-level continuity.
pub fn is_c0_membership(phi: &LInfElement, w: &Weight) -> AnalysisReport {
    is_c0_membership_with(phi, w, &Tolerances::default())
}

pub fn is_c0_membership_with(phi: &LInfElement, w: &Weight, tol: &Tolerances) -> AnalysisReport {
    membership_report("is_c0_membership", phi, w, tol, true)
}

/// `φ ∈ L₀^∞(1/ω)`: dyadic decay of `|φ|/ω` only.
pub fn is_l0inf(phi: &LInfElement, w: &Weight) -> AnalysisReport {
    is_l0inf_with(phi, w, &Tolerances::default())
}

pub fn is_l0inf_with(phi: &LInfElement, w: &Weight, tol: &Tolerances) -> AnalysisReport {
    membership_report("is_l0inf", phi, w, tol, false)
}

/// Decay evidence of `|φ|/ω` as `(t, value)` pairs on the known prefix.
pub fn decay_profile(phi: &LInfElement, w: &Weight, name: &str) -> Result<Evidence> {
    let nodes = phi.grid().nodes();
    let p = phi.profile(w)?;
    Ok(Evidence::new(
        name,
        p.iter().enumerate().map(|(i, &v)| (nodes[i], v)).collect(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(h: f64, t: f64) -> Arc<Grid> {
        Arc::new(Grid::uniform(h, t).unwrap())
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn indicator_norm_and_pairings() {
        let g = grid(1.0 / 64.0, 4.0);
        let one = Weight::constant_one();
        let f = L1Element::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        assert!((f.l1_norm(&one).unwrap() - 1.0).abs() < 1e-14);
        let ones = LInfElement::from_real_fn(&g, LInfTail::ProportionalToWeight(c(1.0)), |_| 1.0).unwrap();
        assert!((pairing_l1_linf(&f, &ones).unwrap() - 1.0).norm() < 1e-14);
        let id = LInfElement::from_real_fn(&g, LInfTail::SubmultBound, |t| t).unwrap();
        assert!((pairing_l1_linf(&f, &id).unwrap() - 0.5).norm() < 1e-12);
        assert_eq!(pairing_l1_linf(&L1Element::zero(&g), &id).unwrap(), c(0.0));
        assert_eq!(f.samples()[0], c(1.0));
        assert_eq!(f.samples()[64], c(0.5));
    }

    #[test]
    fn norms_follow_definitions() {
        let g = grid(0.25, 8.0);
        let w = Weight::power(1.0).unwrap();
        let phi = LInfElement::weight_multiple(&g, &w, c(1.0)).unwrap();
        assert!((phi.linf_norm(&w).unwrap() - 1.0).abs() < 1e-15);
        let mu = MeasureElement::new(vec![(1.0, c(2.0)), (2.0, c(1.0))], None).unwrap();
        assert!((mu.measure_norm(&w).unwrap() - 7.0).abs() < 1e-15);
        let z = LInfElement::zero(&g);
        assert_eq!(z.linf_norm(&w).unwrap(), 0.0);
    }

    #[test]
    fn measure_pairing_closed_form() {
        let g = grid(1.0 / 256.0, 10.0);
        let h = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| (-t).exp()).unwrap();
        let dens = L1Element::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        let mu = MeasureElement::new(vec![(1.0, c(1.0))], Some(dens)).unwrap();
        let expect = (-1f64).exp() + (1.0 - (-1f64).exp());
        assert!((pairing_c0_measure(&h, &mu).unwrap() - expect).norm() < 1e-5);
        let d = MeasureElement::delta(0.3).unwrap();
        assert!((pairing_c0_measure(&h, &d).unwrap() - (-0.3f64).exp()).norm() < 1e-5);
        assert_eq!(pairing_c0_measure(&h, &MeasureElement::zero()).unwrap(), c(0.0));
        let far = MeasureElement::delta(12.0).unwrap();
        assert_eq!(pairing_c0_measure(&h, &far).unwrap(), c(0.0));
        let hp = LInfElement::weight_multiple(&g, &Weight::constant_one(), c(1.0)).unwrap();
        assert!(matches!(pairing_c0_measure(&hp, &far), Err(Error::Tail(_))));
    }

    #[test]
    fn mismatched_grids() {
        let a = grid(0.5, 4.0);
        let b = grid(0.25, 4.0);
        let f = L1Element::zero(&a);
        assert_eq!(pairing_l1_linf(&f, &LInfElement::zero(&b)), Err(Error::GridMismatch));
        assert_eq!(f.add(&L1Element::zero(&b)), Err(Error::GridMismatch));
    }

    #[test]
    fn tail_evaluation() {
        let g = grid(0.5, 4.0);
        let w = Weight::power(1.0).unwrap();
        let phi = LInfElement::weight_multiple(&g, &w, c(2.0)).unwrap();
        assert!((phi.eval(9.0, &w).unwrap() - 20.0).norm() < 1e-12);
        let p = LInfElement::new(&g, vec![c(1.0); 4], LInfTail::SubmultBound).unwrap();
        assert!(matches!(p.eval(3.0, &w), Err(Error::Tail(_))));
        assert!(LInfElement::new(&g, vec![c(1.0); 4], LInfTail::Zero).is_err());
        assert!(p.eval(1.25, &w).is_ok());
    }

    #[test]
    fn inferred_tails() {
        let g = grid(1.0 / 16.0, 40.0);
        let tol = Tolerances::default();
        let one = Weight::constant_one();
        let te = LInfElement::from_fn_inferred(&g, &one, &tol, |t| c(t * (-t).exp())).unwrap();
        assert_eq!(te.tail(), LInfTail::Zero);
        let w = Weight::power(0.5).unwrap();
        let om1 = LInfElement::from_fn_inferred(&g, &w, &tol, |t| c((1.0 + t).sqrt() - 1.0)).unwrap();
        assert!(matches!(om1.tail(), LInfTail::ProportionalToWeight(_)));
        let e = Weight::exponential(-1.0).unwrap();
        let bad = LInfElement::from_fn_inferred(&g, &e, &tol, |t| c((-t).exp() - 1.0)).unwrap();
        assert_eq!(bad.tail(), LInfTail::SubmultBound);
    }

    #[test]
    fn membership_verdicts() {
        let g = grid(1.0 / 32.0, 64.0);
        let one = Weight::constant_one();
        let phi = LInfElement::weight_multiple(&g, &one, c(1.0)).unwrap();
        assert_eq!(is_c0_membership(&phi, &one).verdict, Verdict::Fails);
        assert_eq!(is_l0inf(&phi, &one).verdict, Verdict::Fails);
        let e = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| (-t).exp()).unwrap();
        let r = is_c0_membership(&e, &one);
        assert_eq!(r.verdict, Verdict::Holds);
        assert!(r.caveats.iter().any(|c| c == ON_GRID));
        let fine = grid(1.0 / 512.0, 8.0);
        let step = LInfElement::indicator(&fine, 0.0, 1.0, 1.0).unwrap();
        assert_eq!(is_l0inf(&step, &one).verdict, Verdict::Holds);
        assert_eq!(is_c0_membership(&step, &one).verdict, Verdict::Fails);
    }

    #[test]
    fn translation_shifts_support() {
        let g = grid(0.25, 4.0);
        let f = L1Element::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        let t = f.translate(1.0).unwrap();
        assert_eq!(t.samples()[4], c(0.5));
        assert_eq!(t.samples()[5], c(1.0));
        assert_eq!(t.samples()[8], c(0.5));
        assert_eq!(t.samples()[3], c(0.0));
        assert!(matches!(f.translate(3.5), Err(Error::SupportOverflow { .. })));
    }
}
