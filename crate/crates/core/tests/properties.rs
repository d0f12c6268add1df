use std::sync::Arc;

use proptest::prelude::*;

use wderiv_core::algebra::{convolve_l1, module_action};
use wderiv_core::analyzers::{greedy_epsilon_net, measure_u};
use wderiv_core::config::{RunConfig, Tolerances};
use wderiv_core::derivation::{DerivationKernel, FamilyKind, FamilySpec, KernelFamily};
use wderiv_core::report::fmt_num;
use wderiv_core::spaces::pairing_l1_linf;
use wderiv_core::weight::check_submultiplicative;
use wderiv_core::{Grid, L1Element, LInfElement, LInfTail, Verdict, Weight, C64};

fn grid(h: f64, t: f64) -> Arc<Grid> {
    Arc::new(Grid::uniform(h, t).unwrap())
}

fn bump_params() -> impl Strategy<Value = (f64, f64, f64)> {
    (0.0..3.0f64, 0.25..2.0f64, 0.1..2.0f64).prop_map(|(a, w, hgt)| (a, a + w, hgt))
}

fn weights() -> impl Strategy<Value = Weight> {
    prop_oneof![
        Just(Weight::constant_one()),
        (0.1..3.0f64).prop_map(|a| Weight::power(a).unwrap()),
        (-1.0..1.0f64).prop_map(|r| Weight::exponential(r).unwrap()),
    ]
}

/// A smooth `φ` with a zero tail: `Σ c_k t^k e^{−t}`.
fn smooth_phi(g: &Arc<Grid>, c: [f64; 3]) -> LInfElement {
    LInfElement::from_real_fn(g, LInfTail::Zero, |t| (c[0] + c[1] * t + c[2] * t * t) * (-t).exp()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn convolution_commutes(p in bump_params(), q in bump_params()) {
        let g = grid(1.0 / 32.0, 12.0);
        let f = L1Element::bump(&g, p.0, p.1, p.2).unwrap();
        let k = L1Element::bump(&g, q.0, q.1, q.2).unwrap();
        let (a, b) = (convolve_l1(&f, &k).unwrap(), convolve_l1(&k, &f).unwrap());
        for (x, y) in a.samples().iter().zip(b.samples()) {
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn leibniz_split_is_nodewise_exact(p in bump_params(), c in prop::array::uniform3(-2.0..2.0f64), w in weights()) {
        let g = grid(1.0 / 32.0, 16.0);
        let phi = smooth_phi(&g, c);
        let d = DerivationKernel::new(&phi, &w);
        let f = L1Element::bump(&g, p.0, p.1, p.2).unwrap();
        let (df, tf) = (d.apply_d(&f).unwrap(), d.apply_t(&f).unwrap());
        let m = module_action(&f, &phi, &w).unwrap();
        let scale = p.2 * (p.1 - p.0) * c.iter().map(|x| x.abs()).sum::<f64>() + 1e-300;
        for i in 0..m.known_len().min(df.known_len()) {
            prop_assert!((df.samples()[i] + tf.samples()[i] - m.samples()[i]).norm() <= 1e-12 * scale);
        }
    }

    #[test]
    fn duality_holds_to_rounding(p in bump_params(), q in bump_params(), c in prop::array::uniform3(-2.0..2.0f64)) {
        let g = grid(1.0 / 32.0, 16.0);
        let one = Weight::constant_one();
        let phi = smooth_phi(&g, c);
        let d = DerivationKernel::new(&phi, &one);
        let f = L1Element::bump(&g, p.0, p.1, p.2).unwrap();
        let k = L1Element::bump(&g, q.0, q.1, q.2).unwrap();
        let lhs = pairing_l1_linf(&k, &d.apply_d(&f).unwrap()).unwrap();
        let rhs = pairing_l1_linf(&f, &d.apply_t(&k).unwrap()).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn derivation_identity_holds(p in bump_params(), q in bump_params(), c in prop::array::uniform3(-2.0..2.0f64), w in weights()) {
        let g = grid(1.0 / 32.0, 16.0);
        let phi = smooth_phi(&g, c);
        let f = L1Element::bump(&g, p.0, p.1, p.2).unwrap();
        let k = L1Element::bump(&g, q.0, q.1, q.2).unwrap();
        let r = DerivationKernel::new(&phi, &w).identity_residual(&f, &k).unwrap();
        let scale = phi.linf_norm(&w).unwrap() * f.l1_norm(&w).unwrap() * k.l1_norm(&w).unwrap();
        prop_assert!(r <= Tolerances::default().slack_budget(1.0 / 32.0, scale));
    }

    #[test]
    fn measure_u_is_monotone_in_eps(t in 0.0..8.0f64, e1 in 0.01..1.0f64, e2 in 0.01..1.0f64, freq in 0.5..6.0f64) {
        let g = grid(1.0 / 32.0, 10.0);
        let one = Weight::constant_one();
        let phi = LInfElement::from_real_fn(&g, LInfTail::Zero, |s| (freq * s).sin().abs()).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let (m_lo, m_hi) = (measure_u(&phi, &one, t, lo).unwrap(), measure_u(&phi, &one, t, hi).unwrap());
        prop_assert!(m_hi <= m_lo + 1e-12);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&m_lo));
    }

    #[test]
    fn epsilon_net_covers(eps in 0.01..0.5f64, c in prop::array::uniform3(-2.0..2.0f64)) {
        let g = grid(1.0 / 8.0, 24.0);
        let one = Weight::constant_one();
        let phi = smooth_phi(&g, c);
        let spec = FamilySpec { member_h: 0.25, member_t_max: 8.0, param_step: 0.25, param_max: 8.0 };
        let fam = KernelFamily::build(FamilyKind::Psi, &phi, &one, spec).unwrap();
        let net = greedy_epsilon_net(&fam, eps);
        prop_assert!(net.radius <= eps);
        for k in 0..fam.len() {
            let d = net.centers.iter().map(|&j| fam.distance(j, k)).fold(f64::INFINITY, f64::min);
            prop_assert!(d <= eps);
        }
    }

    #[test]
    fn power_weights_are_submultiplicative(alpha in 0.05..4.0f64) {
        let w = Weight::power(alpha).unwrap();
        prop_assert_eq!(check_submultiplicative(&w, 200).verdict, Verdict::Holds);
    }

    #[test]
    fn scaled_difference_bound_for_power_weights(alpha in 0.1..3.0f64, s in 0.0..500.0f64) {
        let w = Weight::power(alpha).unwrap();
        let ws = w.eval(s).unwrap();
        let bound = if alpha >= 1.0 { alpha * (1.0 + s).powf(alpha - 1.0) / ws } else { 1.0 / ws };
        for k in 0..400 {
            let t = 0.05 * f64::from(k) * f64::from(k);
            let lhs = (w.eval(t + s).unwrap() - ws).abs() / (w.eval(t).unwrap() * ws);
            prop_assert!(lhs <= bound * (1.0 + 1e-12), "t = {}", t);
        }
    }

    #[test]
    fn fmt_num_round_trips(x in prop::num::f64::NORMAL | prop::num::f64::ZERO) {
        prop_assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn config_canonical_form_round_trips(h in 1e-4..1.0f64, t in 1.0..2000.0f64, seed in any::<u64>(), decay in 1e-6..1.0f64, alpha in 0.1..4.0f64) {
        let text = format!("[weight]\nkind = power\nalpha = {alpha}\n[grid]\nh = {h}\nt_max = {t}\n[tolerance]\ndecay = {decay}\n[run]\nseed = {seed}\n");
        let cfg = RunConfig::parse(&text).unwrap();
        let canon = cfg.to_canonical();
        let again = RunConfig::parse(&canon).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_canonical(), canon);
    }

    #[test]
    fn scaling_phi_scales_d(p in bump_params(), re in -3.0..3.0f64, im in -3.0..3.0f64) {
        let g = grid(1.0 / 32.0, 12.0);
        let one = Weight::constant_one();
        let phi = smooth_phi(&g, [0.0, 1.0, 0.0]);
        let z = C64::new(re, im);
        let f = L1Element::bump(&g, p.0, p.1, p.2).unwrap();
        let a = DerivationKernel::new(&phi.scale(z), &one).apply_d(&f).unwrap();
        let b = DerivationKernel::new(&phi, &one).apply_d(&f).unwrap().scale(z);
        for (x, y) in a.samples().iter().zip(b.samples()) {
            prop_assert!((x - y).norm() <= 1e-12 * (1.0 + y.norm()));
        }
    }
}
