use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sesim_core::evolution::{evolve_ode, EigenPropagator, DEFAULT_THETA_MAX};
use sesim_core::random::{random_hamiltonian, random_state};
use sesim_core::types::units;

fn propagators(c: &mut Criterion) {
    let g = units::mhz(100.0);
    let mut group = c.benchmark_group("propagators");
    group.sample_size(10);
    for n in [32usize, 128, 256] {
        let h = random_hamiltonian(n, g, n as u64);
        let psi = random_state(n, 1);
        group.bench_with_input(BenchmarkId::new("diag", n), &n, |b, _| {
            b.iter(|| {
                EigenPropagator::new(&h)
                    .unwrap()
                    .evolve(&psi, 1e-3)
                    .unwrap()
            })
        });
        for t_qc in [1e-4, 1e-3] {
            group.bench_with_input(BenchmarkId::new(format!("ode_t{t_qc}"), n), &n, |b, _| {
                b.iter(|| evolve_ode(&h, &psi, t_qc, DEFAULT_THETA_MAX).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, propagators);
criterion_main!(benches);
