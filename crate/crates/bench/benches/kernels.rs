use criterion::{black_box, criterion_group, criterion_main, Criterion};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use logconc::legendre::{brute_force_conjugate, default_slope_spec};
use logconc::*;

fn convex_grid(len: usize, seed: u64) -> Grid {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let half = 6.0;
    let h = 2.0 * half / (len - 1) as f64;
    let mut slopes: Vec<f64> = (0..len - 1).map(|_| rng.gen_range(-5.0..5.0)).collect();
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut vals = vec![ExtReal::finite(0.0)];
    let mut v = 0.0;
    for s in slopes {
        v += s * h;
        vals.push(ExtReal::finite(v));
    }
    Grid::new(vec![-half], vec![h], vec![len], vals).unwrap()
}

fn bench_legendre(c: &mut Criterion) {
    let grid = convex_grid(4097, 1);
    let phi = Potential::from_grid(grid.clone()).unwrap();
    let out = default_slope_spec(&grid);
    let mut group = c.benchmark_group("legendre_1d");
    group.bench_function("sweep_4097", |b| {
        b.iter(|| legendre_1d(black_box(&phi), black_box(&out)).unwrap())
    });
    let small = convex_grid(513, 2);
    let small_phi = Potential::from_grid(small.clone()).unwrap();
    let small_out = default_slope_spec(&small);
    group.bench_function("sweep_513", |b| {
        b.iter(|| legendre_1d(black_box(&small_phi), black_box(&small_out)).unwrap())
    });
    group.bench_function("brute_force_513", |b| {
        b.iter(|| brute_force_conjugate(black_box(&small), black_box(&small_out)))
    });
    group.finish();

    let spec2 = GridSpec::symmetric(2, 4.0, 65);
    let g2 = Grid::sample(spec2.origin.clone(), spec2.spacing.clone(), spec2.shape.clone(), |x| {
        ExtReal::finite(0.5 * (x[0] * x[0] + x[1] * x[1]))
    })
    .unwrap();
    let phi2 = Potential::from_grid(g2.clone()).unwrap();
    let out2 = default_slope_spec(&g2);
    c.bench_function("legendre_nd/sweep_65x65", |b| {
        b.iter(|| legendre_nd(black_box(&phi2), black_box(&out2)).unwrap())
    });
}

fn bench_radial(c: &mut Criterion) {
    let f = counterexample_potential(10_000).unwrap();
    c.bench_function("radial/mean_width_n10000", |b| {
        b.iter(|| mean_width(black_box(&f)).unwrap())
    });
    let psi = f.phi().as_radial().unwrap().clone();
    c.bench_function("radial/conjugate", |b| b.iter(|| black_box(&psi).conjugate()));
    c.bench_function("radial/volume_ratio_n200", |b| {
        let f = counterexample_potential(200).unwrap();
        b.iter(|| volume_ratio(black_box(&f)).unwrap())
    });
}

fn bench_calculus(c: &mut Criterion) {
    let f = LogConcaveFn::new(Potential::from_grid(convex_grid(513, 3)).unwrap()).unwrap();
    let g = LogConcaveFn::new(Potential::from_grid(convex_grid(513, 4)).unwrap()).unwrap();
    c.bench_function("asplund/grid_1d_513", |b| {
        b.iter(|| asplund(black_box(&f), black_box(&g), None).unwrap())
    });
}

fn bench_bodies(c: &mut Criterion) {
    let square = ConvexBody::cube(2, 1.0);
    c.bench_function("bodies/volume_100k", |b| {
        b.iter(|| logconc::bodies::volume_dilated(black_box(&square), 0.5, 100_000, 9))
    });
}

criterion_group!(benches, bench_legendre, bench_radial, bench_calculus, bench_bodies);
criterion_main!(benches);
