use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use onebit_bench::{random_codes, KERNEL_SIZES};
use onebit_core::embedding::{check_one_to_one, embed_orthogonal, hamming_count};
use onebit_core::montecarlo::run_trials;
use onebit_core::seed::stream;
use onebit_core::TrialConfig;

fn hamming(c: &mut Criterion) {
    let mut group = c.benchmark_group("hamming_all_pairs");
    for (n, m) in KERNEL_SIZES {
        let codes = random_codes(n, m, 1);
        group.throughput(Throughput::Elements((n * (n - 1) / 2) as u64));
        group.bench_with_input(BenchmarkId::from_parameter(format!("n{n}_m{m}")), &codes, |b, codes| {
            b.iter(|| {
                let mut total = 0usize;
                for (i, a) in codes.iter().enumerate() {
                    for other in &codes.codes()[i + 1..] {
                        total += hamming_count(a, other).unwrap();
                    }
                }
                black_box(total)
            })
        });
    }
    group.finish();
}

fn embedding(c: &mut Criterion) {
    let mut group = c.benchmark_group("embed_orthogonal");
    for (n, m) in [(100, 200), (800, 200)] {
        group.bench_function(format!("n{n}_m{m}"), |b| {
            let mut rng = stream(2);
            b.iter(|| black_box(embed_orthogonal(n, m, &mut rng).unwrap()))
        });
    }
    let codes = random_codes(800, 32, 3);
    group.bench_function("one_to_one_n800_m32", |b| b.iter(|| black_box(check_one_to_one(&codes).unwrap())));
    group.finish();
}

fn trials(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_trials");
    group.sample_size(10);
    let cases = [
        ("injectivity_n10_m7", TrialConfig::injectivity(10, 7, 10_000, 4)),
        ("rip_n100_m150", TrialConfig::rip(100, 150, 0.2, 200, 4)),
        ("rip_n800_m160", TrialConfig::rip(800, 160, 0.2, 20, 4)),
    ];
    for (name, config) in cases {
        group.throughput(Throughput::Elements(config.trials));
        group.bench_function(name, |b| b.iter(|| black_box(run_trials(&config).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, hamming, embedding, trials);
criterion_main!(benches);
