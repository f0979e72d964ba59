use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vcglab::equilibrium::is_expost_equilibrium;
use vcglab::grids::gen_near_truth;
use vcglab::parallelogram::{build_compatible_pair, check_mve, decompose, random_decomposition, refining_grid};

fn equilibrium(c: &mut Criterion) {
    let mut group = c.benchmark_group("equilibrium");
    for players in [2, 3] {
        let g = gen_near_truth(players, players + 2, players + 1, 3, 0).expect("valid parameters");
        group.bench_function(format!("near-truth n={players}"), |b| {
            b.iter(|| is_expost_equilibrium(black_box(&g.instance), black_box(&g.profile)).unwrap())
        });
    }
    group.finish();
}

fn segments(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pairs: Vec<_> = (0..20)
        .map(|_| build_compatible_pair(&random_decomposition(&mut rng, 6)))
        .collect();
    c.bench_function("decompose 20 pairs", |b| {
        b.iter(|| {
            for (h1, h2) in &pairs {
                black_box(decompose(h1, h2).unwrap());
            }
        })
    });
    c.bench_function("mean value exclusion 20 pairs", |b| {
        b.iter(|| {
            for (h1, h2) in &pairs {
                let grid = refining_grid(&[h1, h2], &[]);
                black_box(check_mve(h1, h2, &grid));
            }
        })
    });
}

criterion_group!(benches, equilibrium, segments);
criterion_main!(benches);
