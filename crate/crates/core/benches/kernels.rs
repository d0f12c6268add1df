use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use wderiv_core::algebra::module_action_with;
use wderiv_core::derivation::{DerivationKernel, FamilyKind, FamilySpec, KernelFamily};
use wderiv_core::{Exec, Grid, L1Element, LInfElement, LInfTail, Weight};

fn strategies() -> Vec<Exec> {
    let mut v = vec![Exec::Sequential];
    #[cfg(feature = "parallel")]
    v.push(Exec::Parallel);
    v
}

fn setup(h: f64) -> (Arc<Grid>, LInfElement, L1Element, L1Element, Weight) {
    let g = Arc::new(Grid::uniform(h, 40.0).unwrap());
    let w = Weight::power(1.0).unwrap();
    let phi = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| t * (-t).exp()).unwrap();
    let f = L1Element::bump(&g, 0.5, 4.0, 1.0).unwrap();
    let k = L1Element::bump(&g, 1.0, 3.0, 0.7).unwrap();
    (g, phi, f, k, w)
}

fn bench_apply_d(c: &mut Criterion) {
    let mut group = c.benchmark_group("apply_d");
    for h in [1.0 / 128.0, 1.0 / 256.0] {
        let (_, phi, f, _, w) = setup(h);
        for exec in strategies() {
            let d = DerivationKernel::new(&phi, &w).with_exec(exec);
            group.bench_with_input(BenchmarkId::new(exec.name(), 1.0 / h), &f, |b, f| {
                b.iter(|| d.apply_d(black_box(f)).unwrap())
            });
        }
    }
    group.finish();
}

fn bench_module_action(c: &mut Criterion) {
    let mut group = c.benchmark_group("module_action");
    let (_, phi, f, _, w) = setup(1.0 / 256.0);
    for exec in strategies() {
        group.bench_function(exec.name(), |b| {
            b.iter(|| module_action_with(exec, black_box(&f), &phi, &w).unwrap())
        });
    }
    group.finish();
}

fn bench_identity(c: &mut Criterion) {
    let mut group = c.benchmark_group("identity_residual");
    group.sample_size(10);
    let (_, phi, f, k, w) = setup(1.0 / 256.0);
    for exec in strategies() {
        let d = DerivationKernel::new(&phi, &w).with_exec(exec);
        group.bench_function(exec.name(), |b| b.iter(|| d.identity_residual(black_box(&f), &k).unwrap()));
    }
    group.finish();
}

fn bench_family(c: &mut Criterion) {
    let mut group = c.benchmark_group("family_build");
    group.sample_size(10);
    let g = Arc::new(Grid::uniform(1.0 / 16.0, 160.0).unwrap());
    let w = Weight::constant_one();
    let phi = LInfElement::from_real_fn(&g, LInfTail::Zero, |t| t * (-t).exp()).unwrap();
    let spec = FamilySpec {
        member_h: 1.0 / 16.0,
        member_t_max: 40.0,
        param_step: 1.0 / 8.0,
        param_max: 40.0,
    };
    for exec in strategies() {
        group.bench_function(exec.name(), |b| {
            b.iter(|| KernelFamily::build_with(exec, FamilyKind::DeltaImage, &phi, &w, spec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_apply_d, bench_module_action, bench_identity, bench_family);
criterion_main!(benches);
