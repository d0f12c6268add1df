//! The derivations `D_φ`, their pre-adjoints `T_φ` and the point-mass
//! images `D̄_φδ_s`.
//!
//! On a uniform grid `s/(t+s)·φ(t+s) = s·β(t+s)` with `β(u) = φ(u)/u`, so
//! `D_φ`, `T_φ` and the module action are all correlations against a
//! sequence indexed by `t+s`.

use std::sync::Arc;

use crate::algebra::{convolve_l1_with, finish, generic_rows, module_action_with, ExtendedPhi};
use crate::kernel::{correlate, Split};
use crate::spaces::{ensure_same_grid, SUBMULT_TAIL};
use crate::{Error, Exec, Grid, L1Element, L1Tail, LInfElement, LInfTail, MeasureElement, Result, Weight, C64};

const ZERO: C64 = C64::new(0.0, 0.0);

/// `K(t,s) = s/(t+s)·φ(t+s)` with `K(t,0) = 0` and `K(0,s) = φ(s)`.
#[derive(Clone, Debug)]
pub struct DerivationKernel {
    phi: LInfElement,
    weight: Weight,
    exec: Exec,
}

impl DerivationKernel {
    pub fn new(phi: &LInfElement, w: &Weight) -> Self {
        DerivationKernel {
            phi: phi.clone(),
            weight: w.clone(),
            exec: Exec::default(),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn phi(&self) -> &LInfElement {
        &self.phi
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    fn grid(&self) -> &Arc<Grid> {
        self.phi.grid()
    }

    /// Kernel value at arbitrary `(t, s)`.
    pub fn kernel(&self, t: f64, s: f64) -> Result<C64> {
        if s == 0.0 {
            return Ok(ZERO);
        }
        Ok(self.phi.eval(t + s, &self.weight)? * (s / (t + s)))
    }

    /// Pre-adjoint kernel `t/(t+s)·φ(t+s)`, equal to `φ(0)` at the origin so
    /// that the two kernels always sum to `φ(t+s)`.
    pub fn adjoint_kernel(&self, t: f64, s: f64) -> Result<C64> {
        let v = self.phi.eval(t + s, &self.weight)?;
        if t == 0.0 && s == 0.0 {
            return Ok(v);
        }
        Ok(v * (t / (t + s)))
    }

    fn output_tail(&self) -> LInfTail {
        if self.phi.tail() == LInfTail::Zero {
            LInfTail::Zero
        } else {
            LInfTail::SubmultBound
        }
    }

    fn refuse_non_compact(f: &L1Element) -> Result<()> {
        if f.tail() != L1Tail::CompactSupport {
            return Err(Error::Tail(
                "derivation applied to an element that is not compactly supported".into(),
            ));
        }
        Ok(())
    }

    /// Extended `φ` and `β = φ/t` sampled on `k·h`, long enough for `f`.
    fn extended(&self, h: f64, hi: usize) -> (ExtendedPhi, Split) {
        let ext = ExtendedPhi::new(&self.phi, &self.weight, h, self.grid().len() + hi);
        let beta = ext
            .vals
            .map(|k, v| if k == 0 { 0.0 } else { v / (k as f64 * h) });
        (ext, beta)
    }

    fn coeffs(f: &L1Element) -> Vec<C64> {
        f.samples()
            .iter()
            .zip(f.grid().weights())
            .map(|(z, w)| z * w)
            .collect()
    }

    /// `(D_φ f)(t) = ∫ f(s)·s/(t+s)·φ(t+s) ds`.
    pub fn apply_d(&self, f: &L1Element) -> Result<LInfElement> {
        ensure_same_grid(f.grid(), self.grid())?;
        Self::refuse_non_compact(f)?;
        let grid = self.grid();
        let Some((lo, hi)) = f.support() else {
            return Ok(LInfElement::zero(grid).with_caveats(self.phi.caveats()));
        };
        let vals = match grid.spacing() {
            Some(h) => {
                let (ext, beta) = self.extended(h, hi);
                let c: Vec<C64> = Self::coeffs(f)
                    .iter()
                    .enumerate()
                    .map(|(j, z)| z * (j as f64 * h))
                    .collect();
                let n_out = grid.len().min(ext.known.saturating_sub(hi));
                correlate(self.exec, &Split::new(&c), lo, hi, &beta, 0, n_out)
            }
            None => generic_rows(self.exec, grid, |t, s| self.kernel(t, s), f, lo, hi),
        };
        finish(grid, vals, self.output_tail(), &self.phi, f)
    }

    /// `(T_φ f)(t) = ∫ f(s)·t/(t+s)·φ(t+s) ds`.
    pub fn apply_t(&self, f: &L1Element) -> Result<LInfElement> {
        ensure_same_grid(f.grid(), self.grid())?;
        Self::refuse_non_compact(f)?;
        let grid = self.grid();
        let Some((lo, hi)) = f.support() else {
            return Ok(LInfElement::zero(grid).with_caveats(self.phi.caveats()));
        };
        let vals = match grid.spacing() {
            Some(h) => {
                let (ext, beta) = self.extended(h, hi);
                let c = Self::coeffs(f);
                let n_out = grid.len().min(ext.known.saturating_sub(hi));
                let mut v = correlate(self.exec, &Split::new(&c), lo, hi, &beta, 0, n_out);
                for (i, z) in v.iter_mut().enumerate() {
                    *z *= i as f64 * h;
                }
                if lo == 0 && !v.is_empty() {
                    v[0] += c[0] * ext.raw[0];
                }
                v
            }
            None => generic_rows(self.exec, grid, |t, s| self.adjoint_kernel(t, s), f, lo, hi),
        };
        finish(grid, vals, self.output_tail(), &self.phi, f)
    }

    /// `(D̄_φδ_s)(t) = s/(t+s)·φ(t+s)` at every node where it is known.
    pub fn deriv_delta(&self, s: f64) -> Result<LInfElement> {
        if !(s >= 0.0) {
            return Err(Error::Domain(format!("point mass at negative s = {s}")));
        }
        let grid = self.grid();
        if s == 0.0 {
            return Ok(LInfElement::zero(grid).with_caveats(self.phi.caveats()));
        }
        let vals: Vec<C64> = match (grid.spacing(), grid.index_of(s)) {
            (Some(h), Some(k)) => {
                let ext = ExtendedPhi::new(&self.phi, &self.weight, h, grid.len() + k);
                let n_out = grid.len().min(ext.known.saturating_sub(k));
                (0..n_out)
                    .map(|i| ext.raw[i + k] * (k as f64 / (i + k) as f64))
                    .collect()
            }
            _ => grid
                .nodes()
                .iter()
                .map_while(|&t| self.kernel(t, s).ok())
                .collect(),
        };
        if vals.is_empty() {
            return Err(Error::Tail(format!("D̄δ_s unknown at every node for s = {s}")));
        }
        let tail = if vals.len() < grid.len() {
            LInfTail::SubmultBound
        } else {
            self.output_tail()
        };
        let mut out = LInfElement::new(grid, vals, tail)?.with_caveats(self.phi.caveats());
        if tail == LInfTail::SubmultBound {
            out = out.with_caveat(SUBMULT_TAIL);
        }
        Ok(out)
    }

    /// `D̄_φμ = Σ c_k D̄_φδ_{s_k} + D_φ(density)`.
    pub fn apply_dbar_measure(&self, mu: &MeasureElement) -> Result<LInfElement> {
        let grid = self.grid();
        let mut acc = LInfElement::zero(grid);
        for &(s, c) in mu.atoms() {
            if s > grid.t_max() + 1e-9 * grid.max_step() {
                return Err(Error::Tail(format!(
                    "atom at {s} lies past T_max = {}",
                    grid.t_max()
                )));
            }
            acc = acc.add(&self.deriv_delta(s)?.scale(c))?;
        }
        if let Some(d) = mu.density() {
            acc = acc.add(&self.apply_d(d)?)?;
        }
        Ok(acc)
    }

    /// `∥D_φ(f∗g) − f·D_φg − g·D_φf∥` in `L^∞(1/ω)` over the nodes where all
    /// three terms are known.
    pub fn identity_residual(&self, f: &L1Element, g: &L1Element) -> Result<f64> {
        ensure_same_grid(f.grid(), g.grid())?;
        Self::refuse_non_compact(f)?;
        Self::refuse_non_compact(g)?;
        let t_max = self.grid().t_max();
        let needed = f.support_end() + g.support_end();
        if needed > t_max * (1.0 + 1e-12) {
            return Err(Error::SupportOverflow { needed, t_max });
        }
        let fg = convolve_l1_with(self.exec, f, g)?;
        let lhs = self.apply_d(&fg)?;
        let a = module_action_with(self.exec, f, &self.apply_d(g)?, &self.weight)?;
        let b = module_action_with(self.exec, g, &self.apply_d(f)?, &self.weight)?;
        lhs.sub(&a)?.sub(&b)?.profile(&self.weight).map(|p| p.into_iter().fold(0.0, f64::max))
    }

    /// `∥D̄_φδ_s∥` for each `s`, split into the grid sup and an analytic
    /// bound for `t` past the known region.
    pub fn norm_profile(&self, s_list: &[f64]) -> Result<Vec<NormPoint>> {
        let phi_norm = self.phi.linf_norm(&self.weight)?;
        s_list
            .iter()
            .map(|&s| {
                let d = self.deriv_delta(s)?;
                let grid_sup = d.linf_norm(&self.weight)?;
                let ws = self.weight.eval(s)?;
                let t_end = self.grid().node(d.known_len() - 1);
                let ratio = if s == 0.0 { 0.0 } else { s / (t_end + s) };
                let tail_bound = match d.tail() {
                    LInfTail::Zero => 0.0,
                    _ => match self.phi.tail() {
                        LInfTail::ProportionalToWeight(a) if d.is_complete() => a.norm() * ws * ratio,
                        _ => phi_norm * ws * ratio,
                    },
                };
                let norm = grid_sup.max(tail_bound);
                Ok(NormPoint {
                    s,
                    norm,
                    scaled: norm / ws,
                    grid_sup,
                    tail_bound,
                    tail_attains: tail_bound > grid_sup,
                })
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormPoint {
    pub s: f64,
    pub norm: f64,
    /// `norm / ω(s)`.
    pub scaled: f64,
    pub grid_sup: f64,
    pub tail_bound: f64,
    /// The bound past the known region exceeds the grid sup.
    pub tail_attains: bool,
}

pub fn deriv_delta(phi: &LInfElement, w: &Weight, s: f64) -> Result<LInfElement> {
    DerivationKernel::new(phi, w).deriv_delta(s)
}

pub fn apply_d(phi: &LInfElement, w: &Weight, f: &L1Element) -> Result<LInfElement> {
    DerivationKernel::new(phi, w).apply_d(f)
}

pub fn apply_t(phi: &LInfElement, w: &Weight, f: &L1Element) -> Result<LInfElement> {
    DerivationKernel::new(phi, w).apply_t(f)
}

pub fn apply_dbar_measure(phi: &LInfElement, w: &Weight, mu: &MeasureElement) -> Result<LInfElement> {
    DerivationKernel::new(phi, w).apply_dbar_measure(mu)
}

pub fn derivation_identity_residual(
    phi: &LInfElement,
    w: &Weight,
    f: &L1Element,
    g: &L1Element,
) -> Result<f64> {
    DerivationKernel::new(phi, w).identity_residual(f, g)
}

pub fn deriv_delta_norm_profile(phi: &LInfElement, w: &Weight, s_list: &[f64]) -> Result<Vec<NormPoint>> {
    DerivationKernel::new(phi, w).norm_profile(s_list)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyKind {
    /// `{ψ_p/ω(p)}` with `ψ_p(x) = x/(p+x)·φ(p+x)`.
    Psi,
    /// `{D̄_φδ_p/ω(p)}`, members `x ↦ p/(x+p)·φ(x+p)/ω(p)`.
    DeltaImage,
}

/// Sampling plan for a kernel family: members on `[0, member_t_max]` with
/// step `member_h`, parameters on `[0, param_max]` with step `param_step`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FamilySpec {
    pub member_h: f64,
    pub member_t_max: f64,
    pub param_step: f64,
    pub param_max: f64,
}

impl FamilySpec {
    pub fn refined(self) -> Self {
        FamilySpec {
            param_step: 0.5 * self.param_step,
            ..self
        }
    }

    pub fn extended(self) -> Self {
        FamilySpec {
            member_t_max: 2.0 * self.member_t_max,
            param_max: 2.0 * self.param_max,
            ..self
        }
    }
}

/// Family members stored pre-divided by `ω` at the member nodes, so the
/// weighted sup metric is a plain sup.
#[derive(Clone, Debug)]
pub struct KernelFamily {
    kind: FamilyKind,
    spec: FamilySpec,
    phi: LInfElement,
    weight: Weight,
    member_grid: Arc<Grid>,
    params: Vec<f64>,
    scaled: Vec<Vec<C64>>,
    explicit: bool,
}

impl KernelFamily {
    pub fn build(kind: FamilyKind, phi: &LInfElement, w: &Weight, spec: FamilySpec) -> Result<Self> {
        Self::build_with(Exec::default(), kind, phi, w, spec)
    }

    pub fn build_with(
        exec: Exec,
        kind: FamilyKind,
        phi: &LInfElement,
        w: &Weight,
        spec: FamilySpec,
    ) -> Result<Self> {
        if !(spec.member_h > 0.0 && spec.param_step > 0.0 && spec.param_max >= 0.0) {
            return Err(Error::InvalidParams(format!("bad family spec {spec:?}")));
        }
        let member_grid = Arc::new(Grid::uniform(spec.member_h, spec.member_t_max)?);
        let n_params = (spec.param_max / spec.param_step).round() as usize + 1;
        let params: Vec<f64> = (0..n_params).map(|k| k as f64 * spec.param_step).collect();
        let xs = member_grid.nodes();
        let omega_x = w.sample(&member_grid)?;
        let rows: Vec<Result<Vec<C64>>> = exec.map(params.len(), |k| {
            let p = params[k];
            let wp = w.eval(p)?;
            xs.iter()
                .zip(&omega_x)
                .map(|(&x, &ox)| {
                    let factor = match kind {
                        FamilyKind::Psi if x == 0.0 => return Ok(ZERO),
                        FamilyKind::Psi => x / (p + x),
                        FamilyKind::DeltaImage if p == 0.0 => return Ok(ZERO),
                        FamilyKind::DeltaImage => p / (x + p),
                    };
                    Ok(phi.eval(x + p, w)? * (factor / (wp * ox)))
                })
                .collect()
        });
        let scaled = rows.into_iter().collect::<Result<Vec<_>>>()?;
        Ok(KernelFamily {
            kind,
            spec,
            phi: phi.clone(),
            weight: w.clone(),
            member_grid,
            params,
            scaled,
            explicit: false,
        })
    }

    /// A family from explicit parameters; used for single members and tests.
    pub fn from_scaled(member_grid: Arc<Grid>, params: Vec<f64>, scaled: Vec<Vec<C64>>, w: &Weight) -> Result<Self> {
        if params.len() != scaled.len() || scaled.iter().any(|m| m.len() != member_grid.len()) {
            return Err(Error::InvalidParams("family members must match the member grid".into()));
        }
        let spec = FamilySpec {
            member_h: member_grid.max_step(),
            member_t_max: member_grid.t_max(),
            param_step: 1.0,
            param_max: params.last().copied().unwrap_or(0.0),
        };
        Ok(KernelFamily {
            kind: FamilyKind::DeltaImage,
            spec,
            phi: LInfElement::zero(&member_grid),
            weight: w.clone(),
            member_grid,
            params,
            scaled,
            explicit: true,
        })
    }

    /// Resamples with a new plan; explicit families have no generator.
    pub fn rebuild(&self, spec: FamilySpec) -> Result<Self> {
        if self.explicit {
            return Err(Error::InvalidParams("explicit family cannot be resampled".into()));
        }
        Self::build(self.kind, &self.phi, &self.weight, spec)
    }

    pub fn kind(&self) -> FamilyKind {
        self.kind
    }

    pub fn spec(&self) -> FamilySpec {
        self.spec
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    /// Member `k` divided by `ω` at the member nodes.
    pub fn scaled_member(&self, k: usize) -> &[C64] {
        &self.scaled[k]
    }

    /// Member `k` as an element of `L^∞(1/ω)` on the member grid.
    pub fn member(&self, k: usize) -> Result<LInfElement> {
        let omega = self.weight.sample(&self.member_grid)?;
        let vals = self.scaled[k].iter().zip(&omega).map(|(z, o)| z * o).collect();
        LInfElement::new(&self.member_grid, vals, LInfTail::SubmultBound)
    }

    /// `sup_i |u(x_i) − v(x_i)|/ω(x_i)`.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        self.scaled[a]
            .iter()
            .zip(&self.scaled[b])
            .map(|(x, y)| (x - y).norm_sqr())
            .fold(0.0, f64::max)
            .sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::module_action;

    fn grid(h: f64, t: f64) -> Arc<Grid> {
        Arc::new(Grid::uniform(h, t).unwrap())
    }

    fn c(x: f64) -> C64 {
        C64::new(x, 0.0)
    }

    #[test]
    fn point_mass_images() {
        let g = grid(1.0 / 16.0, 20.0);
        let one = Weight::constant_one();
        let ones = LInfElement::weight_multiple(&g, &one, c(1.0)).unwrap();
        let d = deriv_delta(&ones, &one, 1.0).unwrap();
        for (i, &t) in g.nodes().iter().enumerate() {
            assert!((d.samples()[i].re - 1.0 / (1.0 + t)).abs() < 1e-14);
        }
        assert_eq!(deriv_delta(&ones, &one, 0.0).unwrap().linf_norm(&one).unwrap(), 0.0);
        let w = Weight::power(2.0).unwrap();
        let phi = LInfElement::from_real_fn(&g, LInfTail::ProportionalToWeight(c(1.0)), |t| (1.0 + t).powi(2) - 1.0).unwrap();
        let d = deriv_delta(&phi, &w, 1.0).unwrap();
        for (i, &t) in g.nodes().iter().enumerate().take(g.len() - 16) {
            assert!((d.samples()[i].re - (t + 3.0)).abs() < 1e-12);
        }
        let off = deriv_delta(&ones, &one, 0.3).unwrap();
        assert!((off.samples()[16].re - 0.3 / 1.3).abs() < 1e-14);
    }

    #[test]
    fn closed_forms_for_constant_phi() {
        let g = grid(1.0 / 256.0, 8.0);
        let one = Weight::constant_one();
        let ones = LInfElement::weight_multiple(&g, &one, c(1.0)).unwrap();
        let f = L1Element::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        let d = apply_d(&ones, &one, &f).unwrap();
        let t_op = apply_t(&ones, &one, &f).unwrap();
        assert!((d.samples()[0].re - (1.0 - 0.5 / 256.0)).abs() < 1e-12);
        assert!(t_op.samples()[0].re.abs() < 1e-2);
        for k in [64usize, 256, 1024, 2048] {
            let t = g.node(k);
            let x = t * (1.0 + 1.0 / t).ln();
            assert!((d.samples()[k].re - (1.0 - x)).abs() < 1e-5, "t = {t}");
            assert!((t_op.samples()[k].re - x).abs() < 1e-5, "t = {t}");
        }
        assert_eq!(apply_d(&ones, &one, &L1Element::zero(&g)).unwrap().linf_norm(&one).unwrap(), 0.0);
    }

    #[test]
    fn leibniz_split_is_exact() {
        let g = grid(1.0 / 64.0, 10.0);
        let w = Weight::power(1.0).unwrap();
        let phi = LInfElement::from_fn(&g, LInfTail::ProportionalToWeight(c(0.5)), |t| C64::new(0.5 * (1.0 + t), t.sin())).unwrap();
        let f = L1Element::from_real_fn(&g, L1Tail::CompactSupport, |t| if t <= 3.0 { t * (3.0 - t) } else { 0.0 }).unwrap();
        let k = DerivationKernel::new(&phi, &w);
        let d = k.apply_d(&f).unwrap();
        let t = k.apply_t(&f).unwrap();
        let m = module_action(&f, &phi, &w).unwrap();
        for i in 0..m.known_len() {
            let err = (d.samples()[i] + t.samples()[i] - m.samples()[i]).norm();
            assert!(err <= 1e-12 * (1.0 + m.samples()[i].norm()), "node {i}: {err}");
        }
    }

    #[test]
    fn uniform_and_generic_paths_agree() {
        let g = grid(1.0 / 16.0, 6.0);
        let ng = Arc::new(Grid::from_nodes(g.nodes().to_vec()).unwrap());
        let one = Weight::constant_one();
        let phi_fn = |t: f64| t * (-t).exp();
        let pu = LInfElement::from_real_fn(&g, LInfTail::Zero, phi_fn).unwrap();
        let pg = LInfElement::from_real_fn(&ng, LInfTail::Zero, phi_fn).unwrap();
        let f_fn = |t: f64| if t <= 2.0 { (t * 3.0).cos() } else { 0.0 };
        let fu = L1Element::from_real_fn(&g, L1Tail::CompactSupport, f_fn).unwrap();
        let fg = L1Element::from_real_fn(&ng, L1Tail::CompactSupport, f_fn).unwrap();
        let (du, dg) = (apply_d(&pu, &one, &fu).unwrap(), apply_d(&pg, &one, &fg).unwrap());
        let (tu, tg) = (apply_t(&pu, &one, &fu).unwrap(), apply_t(&pg, &one, &fg).unwrap());
        for i in 0..g.len() {
            assert!((du.samples()[i] - dg.samples()[i]).norm() < 1e-12);
            assert!((tu.samples()[i] - tg.samples()[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn refuses_non_compact_input() {
        let g = grid(0.5, 4.0);
        let one = Weight::constant_one();
        let f = L1Element::from_real_fn(&g, L1Tail::None, |_| 1.0).unwrap();
        assert!(matches!(apply_d(&LInfElement::zero(&g), &one, &f), Err(Error::Tail(_))));
    }

    #[test]
    fn residual_errors_on_support_overflow() {
        let g = grid(0.25, 4.0);
        let one = Weight::constant_one();
        let f = L1Element::indicator(&g, 0.0, 3.0, 1.0).unwrap();
        let r = derivation_identity_residual(&LInfElement::zero(&g), &one, &f, &f);
        assert!(matches!(r, Err(Error::SupportOverflow { .. })));
        let z = L1Element::zero(&g);
        assert_eq!(derivation_identity_residual(&LInfElement::zero(&g), &one, &z, &f).unwrap(), 0.0);
    }

    #[test]
    fn measure_extension_is_linear() {
        let g = grid(1.0 / 32.0, 10.0);
        let one = Weight::constant_one();
        let phi = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| t * (-t).exp()).unwrap();
        let k = DerivationKernel::new(&phi, &one);
        let mu = MeasureElement::new(vec![(1.0, c(2.0)), (2.0, c(1.0))], None).unwrap();
        let lhs = k.apply_dbar_measure(&mu).unwrap();
        let rhs = k.deriv_delta(1.0).unwrap().scale(c(2.0)).add(&k.deriv_delta(2.0).unwrap()).unwrap();
        assert_eq!(lhs.samples(), rhs.samples());
        let f = L1Element::from_real_fn(&g, L1Tail::CompactSupport, |t| if t < 1.0 { 1.0 - t } else { 0.0 }).unwrap();
        let a = k.apply_dbar_measure(&MeasureElement::from_density(f.clone())).unwrap();
        assert_eq!(a.samples(), k.apply_d(&f).unwrap().samples());
    }

    #[test]
    fn norm_profile_respects_bound() {
        let g = grid(1.0 / 16.0, 20.0);
        let one = Weight::constant_one();
        let step = LInfElement::indicator(&g, 0.0, 1.0, 1.0).unwrap();
        let p = deriv_delta_norm_profile(&step, &one, &[0.5]).unwrap();
        assert!((p[0].norm - 1.0).abs() < 1e-12);
        let te = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| t * (-t).exp()).unwrap();
        let prof = deriv_delta_norm_profile(&te, &one, &[1.0, 0.25, 0.0625]).unwrap();
        assert!(prof[2].norm < prof[1].norm && prof[1].norm < prof[0].norm);
    }

    #[test]
    fn te_family_is_rank_one() {
        let g = grid(1.0 / 16.0, 40.0);
        let one = Weight::constant_one();
        let te = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| t * (-t).exp()).unwrap();
        let spec = FamilySpec { member_h: 0.25, member_t_max: 10.0, param_step: 0.5, param_max: 10.0 };
        let fam = KernelFamily::build(FamilyKind::Psi, &te, &one, spec).unwrap();
        let d = fam.distance(0, 2);
        let expect = (1.0 - (-1f64).exp()) * (-1f64).exp();
        assert!((d - expect).abs() < 1e-12);
        assert_eq!(fam.len(), 21);
    }
}
