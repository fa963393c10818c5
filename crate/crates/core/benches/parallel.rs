//! Data-parallel kernels benched against their single-thread behavior.
//!
//! With the default `parallel` feature, every group runs once on the
//! global rayon pool and once inside a 1-thread pool, so one `cargo bench`
//! shows the speedup directly. Building with `--no-default-features`
//! benches the true sequential fallback (compare via criterion baselines:
//! `cargo bench -- --save-baseline rayon` then
//! `cargo bench --no-default-features -- --baseline rayon`).

use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use matrig_core::amplify::{
    build_kron_approximant, build_prefix_approximant, kron_error_exact, maj_error_exact,
    CountOptions,
};
use matrig_core::matrix::{distance_base, hadamard_base, sign_to_fp, walsh_hadamard, LowRankFp};
use matrig_core::rigidity::{exact_boolean_rigidity, rank1_search};
use matrig_core::spectral::{distance_eigenvalues, largest_singular_value};

fn run_modes(c: &mut Criterion, name: &str, f: impl Fn() + Sync + Send) {
    let mut group = c.benchmark_group(name);
    group.sample_size(10);
    #[cfg(feature = "parallel")]
    {
        group.bench_function("rayon", |b| b.iter(&f));
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        group.bench_function("one-thread", |b| b.iter(|| pool.install(&f)));
    }
    #[cfg(not(feature = "parallel"))]
    group.bench_function("sequential", |b| b.iter(&f));
    group.finish();
}

fn bench_rigidity(c: &mut Criterion) {
    let a = walsh_hadamard(3).unwrap();
    run_modes(c, "exact_boolean_rigidity_h3_r2_p3", move || {
        black_box(exact_boolean_rigidity(black_box(&a), 2, 3).unwrap().value);
    });
}

fn bench_rank1(c: &mut Criterion) {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let a = matrig_core::matrix::SignMatrix::random(14, 14, &mut rng);
    run_modes(c, "rank1_search_14x14_p3", move || {
        black_box(rank1_search(black_box(&a), 3, u128::MAX).unwrap().value);
    });
}

fn bench_kron_error(c: &mut Criterion) {
    let h1 = hadamard_base();
    let l = LowRankFp::factor(&sign_to_fp(&h1, 3).unwrap());
    let approx = build_kron_approximant(&l, &[1, 2, 1, 2, 1, 2, 1, 2, 1, 2], 10).unwrap();
    let opts = CountOptions::default();
    run_modes(c, "kron_error_exact_q2_n10", move || {
        black_box(
            kron_error_exact(black_box(&h1), &approx, &opts)
                .unwrap()
                .disagreements,
        );
    });
}

fn bench_maj_error(c: &mut Criterion) {
    let m1 = distance_base();
    let base = sign_to_fp(&m1, 3).unwrap();
    let approx = build_prefix_approximant(&base, 1, 11).unwrap();
    let opts = CountOptions::default();
    run_modes(c, "maj_error_exact_q2_k1_n11", move || {
        black_box(
            maj_error_exact(black_box(&m1), &approx, &opts)
                .unwrap()
                .disagreements,
        );
    });
}

fn bench_spectrum(c: &mut Criterion) {
    run_modes(c, "distance_eigenvalues_n22", || {
        black_box(distance_eigenvalues(22).unwrap());
    });
    let m8 = matrig_core::matrix::distance_matrix(8).unwrap();
    run_modes(c, "power_iteration_m8", move || {
        black_box(largest_singular_value(black_box(&m8)).sigma1);
    });
}

criterion_group!(
    benches,
    bench_rigidity,
    bench_rank1,
    bench_kron_error,
    bench_maj_error,
    bench_spectrum
);
criterion_main!(benches);
