//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line. Tolerances are pinned here, not tuned elsewhere.

use std::time::Instant;

use logconc::legendre::{brute_force_conjugate, default_slope_spec};
use logconc::lowmstar::LevelSetRepr;
use logconc::meanwidth::Method;
use logconc::potential::Screen;
use logconc::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn pass_line(id: u32, name: &str) {
    println!("criterion {id:2} ({name}): PASS");
}

fn grid_gaussian_1d(half: f64, len: usize) -> LogConcaveFn {
    let g = Grid::sample_1d(half, len, |x| ExtReal::finite(0.5 * x[0] * x[0])).unwrap();
    LogConcaveFn::new(Potential::from_grid(g).unwrap()).unwrap()
}

fn grid_gaussian_2d(half: f64, len: usize) -> LogConcaveFn {
    let spec = GridSpec::symmetric(2, half, len);
    let g = Grid::sample(spec.origin, spec.spacing, spec.shape, |x| {
        ExtReal::finite(0.5 * (x[0] * x[0] + x[1] * x[1]))
    })
    .unwrap();
    LogConcaveFn::new(Potential::from_grid(g).unwrap()).unwrap()
}

fn box_indicator_grid(dim: usize, half: f64, len: usize) -> LogConcaveFn {
    let spec = GridSpec::symmetric(dim, half, len);
    let g = Grid::sample(spec.origin, spec.spacing, spec.shape, |_| ExtReal::ZERO).unwrap();
    LogConcaveFn::new(Potential::from_grid(g).unwrap()).unwrap()
}

/// Random convex 1-D grid via sorted slopes.
fn random_convex_grid(rng: &mut ChaCha8Rng, max_len: usize) -> Grid {
    let len = rng.gen_range(8..=max_len);
    let half = rng.gen_range(1.0..8.0);
    let h = 2.0 * half / (len - 1) as f64;
    let mut slopes: Vec<f64> = (0..len - 1).map(|_| rng.gen_range(-6.0..6.0)).collect();
    slopes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut vals = Vec::with_capacity(len);
    let mut v = rng.gen_range(-1.0..1.0);
    vals.push(ExtReal::finite(v));
    for s in slopes {
        v += s * h;
        vals.push(ExtReal::finite(v));
    }
    Grid::new(vec![-half], vec![h], vec![len], vals).unwrap()
}

/// Random convex nondecreasing radial profile with a quadratic tail.
fn random_radial_profile(rng: &mut ChaCha8Rng) -> RadialProfile {
    let r1: f64 = rng.gen_range(0.3..1.5);
    let r2: f64 = r1 + rng.gen_range(0.5..2.0);
    let s1: f64 = rng.gen_range(0.0..1.0);
    let s2: f64 = s1 + rng.gen_range(0.1..2.0);
    let a: f64 = rng.gen_range(0.5..2.0);
    // Constant 0, then slope s1, then slope s2, then quadratic a r^2/2 glued
    // continuously with matching or growing slope.
    let v1 = s1 * (r2 - r1);
    let b3 = s2.max(a * r2);
    RadialProfile::new(vec![
        RadialPiece { lo: 0.0, hi: r1, a: 0.0, b: 0.0, c: 0.0 },
        RadialPiece { lo: r1, hi: r2, a: 0.0, b: s1, c: -s1 * r1 },
        RadialPiece { lo: r2, hi: f64::INFINITY, a, b: b3 - a * r2, c: v1 - (0.5 * a * r2 + (b3 - a * r2)) * r2 },
    ])
    .unwrap()
}

#[test]
fn criterion_01_normalization() {
    // Quadrature path, n in {1, 2, 3}: |M*(G) - 1| <= 1e-6, each under 1 s.
    for n in 1..=3usize {
        let f = LogConcaveFn::new(Potential::from_analytic(Analytic::gaussian(vec![0.0; n], 0.0)))
            .unwrap();
        let t0 = Instant::now();
        let rep = mean_width(&f).unwrap();
        let dt = t0.elapsed();
        assert_eq!(rep.method, Method::Quadrature);
        assert!(
            (rep.value.raw() - 1.0).abs() <= 1e-6,
            "n={n}: {}",
            rep.value
        );
        assert!(dt.as_secs_f64() < 1.0, "n={n} took {dt:?}");
    }
    // Radial path, n in {10, 100, 1000}: within 1e-3, each under 1 s.
    for n in [10usize, 100, 1000] {
        let f = LogConcaveFn::standard_gaussian(n);
        let t0 = Instant::now();
        let rep = mean_width(&f).unwrap();
        let dt = t0.elapsed();
        assert_eq!(rep.method, Method::Radial1d);
        assert!(
            (rep.value.raw() - 1.0).abs() <= 1e-3,
            "n={n}: {}",
            rep.value
        );
        assert!(dt.as_secs_f64() < 1.0, "n={n} took {dt:?}");
    }
    pass_line(1, "normalization M*(G)=1");
}

#[test]
fn criterion_02_definition_equivalence() {
    let t0 = Instant::now();
    let cfg = TildeConfig::default();
    let mut suite: Vec<(String, LogConcaveFn)> = Vec::new();
    suite.push(("grid gaussian 1d".into(), grid_gaussian_1d(8.0, 129)));
    suite.push((
        "grid e*gaussian 1d".into(),
        scalar_mult(std::f64::consts::E, &grid_gaussian_1d(8.0, 129)).unwrap(),
    ));
    suite.push(("box indicator 1d".into(), box_indicator_grid(1, 1.0, 17)));
    suite.push(("grid gaussian 2d".into(), grid_gaussian_2d(6.0, 49)));
    suite.push(("box indicator 2d".into(), box_indicator_grid(2, 1.0, 9)));
    suite.push((
        "ball indicator radial".into(),
        LogConcaveFn::new(Potential::from_radial(2, RadialProfile::ball_indicator(1.5))).unwrap(),
    ));
    suite.push((
        "product box*gaussian".into(),
        asplund(&box_indicator_grid(1, 1.0, 17), &grid_gaussian_1d(8.0, 129), None).unwrap(),
    ));
    let exp_norm =
        LogConcaveFn::new(Potential::from_radial(2, RadialProfile::linear(1.0, 0.0))).unwrap();
    suite.push(("truncation e^-|x| k=2".into(), truncate(&exp_norm, 2.0).unwrap()));
    suite.push(("truncation e^-|x| k=4".into(), truncate(&exp_norm, 4.0).unwrap()));
    suite.push(("counterexample n=2".into(), counterexample_potential(2).unwrap()));
    suite.push((
        "translated grid gaussian".into(),
        translate(&grid_gaussian_1d(8.0, 129), &[0.375]).unwrap(),
    ));
    assert!(suite.len() >= 10, "need at least 10 suite members");
    for (name, f) in &suite {
        let eq = check_definition_equality(f, &cfg).unwrap();
        assert!(
            eq.rel_gap <= 0.02,
            "{name}: rel gap {} (M*={}, M~*={})",
            eq.rel_gap,
            eq.m_star.value,
            eq.m_tilde.value
        );
    }
    // f = e^{-|x|}: both +inf, each carrying a divergence witness.
    let eq = check_definition_equality(&exp_norm, &cfg).unwrap();
    assert!(eq.m_star.is_infinite() && eq.m_tilde.is_infinite());
    assert!(eq.m_star.diagnostics.contains_key("divergence_witness"));
    assert!(eq.m_tilde.diagnostics.contains_key("divergence_flag"));
    assert_eq!(eq.rel_gap, 0.0);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 60.0, "suite took {dt:?}");
    pass_line(2, "definition equivalence");
}

#[test]
fn criterion_03_urysohn() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut checked = 0usize;
    // Randomized admissible functions, none Gaussian-equal.
    for k in 0..54 {
        let f = match k % 4 {
            0 => {
                let n = rng.gen_range(1..=6);
                LogConcaveFn::new(Potential::from_radial(n, random_radial_profile(&mut rng)))
                    .unwrap()
            }
            1 => {
                // Scaled quadratic with scale away from 1.
                let n = rng.gen_range(1..=3);
                let s = if rng.gen_bool(0.5) {
                    rng.gen_range(0.3..0.8)
                } else {
                    rng.gen_range(1.25..3.0)
                };
                let c: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                LogConcaveFn::new(Potential::from_analytic(Analytic::Quadratic {
                    scale: s,
                    center: c,
                    offset: rng.gen_range(-0.5..0.5),
                }))
                .unwrap()
            }
            2 => {
                let n = rng.gen_range(1..=4);
                let r = rng.gen_range(0.4..3.0);
                LogConcaveFn::new(Potential::from_radial(n, RadialProfile::ball_indicator(r)))
                    .unwrap()
            }
            _ => {
                let grid = random_convex_grid(&mut rng, 65);
                LogConcaveFn::new(Potential::from_grid(grid).unwrap()).unwrap()
            }
        };
        let rep = urysohn_gap(&f).unwrap();
        if rep.gap.is_finite() {
            assert!(rep.gap.raw() >= -1e-6, "member {k}: gap {}", rep.gap);
            assert!(!rep.equality, "member {k} flagged as Gaussian equality");
        }
        checked += 1;
    }
    assert!(checked >= 50);
    // The equality family C e^{-|x-a|^2/2} and only it.
    for _ in 0..8 {
        let n = rng.gen_range(1..=3);
        let c: f64 = rng.gen_range(0.2..5.0);
        let a: Vec<f64> = (0..n).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let f = LogConcaveFn::new(Potential::from_analytic(Analytic::gaussian(a, c.ln())))
            .unwrap();
        let rep = urysohn_gap(&f).unwrap();
        assert!(rep.gap.raw().abs() <= 1e-4, "equality family gap {}", rep.gap);
        assert!(rep.equality);
    }
    pass_line(3, "urysohn gap and equality family");
}

#[test]
fn criterion_04_prop_basic_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let measure_mc = |f: &LogConcaveFn, seed: u64| -> (f64, f64) {
        let n = f.dim();
        let h = support_fn(f).unwrap();
        let m = GaussianMeasure::new(n);
        let rep = gaussian_expectation(
            &m,
            |x| h.eval(x).unwrap(),
            Method::MonteCarlo,
            seed,
            20_000,
        )
        .unwrap()
        .scaled(2.0 / n as f64);
        (rep.value.raw(), rep.std_error)
    };
    // (iii) linearity within 3 sigma on 20 random triples.
    for t in 0..20u64 {
        let n = rng.gen_range(2..=8);
        let f = LogConcaveFn::new(Potential::from_radial(n, random_radial_profile(&mut rng)))
            .unwrap();
        let g = LogConcaveFn::new(Potential::from_radial(n, random_radial_profile(&mut rng)))
            .unwrap();
        let lambda = rng.gen_range(0.25..3.0);
        let prod = asplund(&homothety(lambda, &f).unwrap(), &g, None).unwrap();
        let (mp, sp) = measure_mc(&prod, 1000 + t);
        let (mf, sf) = measure_mc(&f, 2000 + t);
        let (mg, sg) = measure_mc(&g, 3000 + t);
        let lhs = mp;
        let rhs = lambda * mf + mg;
        let sigma = (sp * sp + lambda * lambda * sf * sf + sg * sg).sqrt();
        assert!(
            (lhs - rhs).abs() <= 3.0 * sigma + 1e-9,
            "triple {t}: |{lhs} - {rhs}| > 3 x {sigma}"
        );
    }
    // (iv) translation and rotation invariance within 3 sigma.
    for t in 0..6u64 {
        let f = grid_gaussian_1d(8.0, 129);
        let shift = rng.gen_range(-1.0..1.0);
        let ft = translate(&f, &[shift]).unwrap();
        let (a, sa) = measure_mc(&f, 4000 + t);
        let (b, sb) = measure_mc(&ft, 5000 + t);
        assert!((a - b).abs() <= 3.0 * (sa * sa + sb * sb).sqrt() + 1e-9);
    }
    for t in 0..6u64 {
        // Rotating an analytic Gaussian rotates its center.
        let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
        let a = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
        let ra = [
            theta.cos() * a[0] - theta.sin() * a[1],
            theta.sin() * a[0] + theta.cos() * a[1],
        ];
        let f = LogConcaveFn::new(Potential::from_analytic(Analytic::gaussian(a.to_vec(), 0.3)))
            .unwrap();
        let fr = LogConcaveFn::new(Potential::from_analytic(Analytic::gaussian(ra.to_vec(), 0.3)))
            .unwrap();
        let (x, sx) = measure_mc(&f, 6000 + t);
        let (y, sy) = measure_mc(&fr, 7000 + t);
        assert!((x - y).abs() <= 3.0 * (sx * sx + sy * sy).sqrt() + 1e-9);
    }
    // (v) scalar law, exact at the support-function level.
    let f = grid_gaussian_1d(6.0, 97);
    let a = 2.718281828;
    let fa = scalar_mult(a, &f).unwrap();
    let hf = support_fn(&f).unwrap();
    let hfa = support_fn(&fa).unwrap();
    for k in 0..200 {
        let x = [-6.0 + 12.0 * k as f64 / 199.0];
        let lhs = hfa.eval(&x).unwrap().raw();
        let rhs = hf.eval(&x).unwrap().raw() + a.ln();
        assert!((lhs - rhs).abs() <= 1e-9, "at {x:?}: {lhs} vs {rhs}");
    }
    // (i)/(ii) lower bounds: M* >= -(2/n) phi(x0); f(x0) >= 1 gives M* >= 0.
    let f = LogConcaveFn::new(Potential::from_radial(3, random_radial_profile(&mut rng)))
        .unwrap();
    let m = mean_width(&f).unwrap().value.raw();
    let phi0 = f.phi().at_origin().raw();
    assert!(m.is_finite());
    assert!(m >= -(2.0 / 3.0) * phi0 - 1e-9);
    let ind = box_indicator_grid(1, 1.0, 17); // f = 1 on the box
    assert!(mean_width(&ind).unwrap().value.raw() >= 0.0);
    pass_line(4, "basic mean-width properties (i)-(v)");
}

#[test]
fn criterion_05_monotone_convergence() {
    let f = grid_gaussian_1d(10.0, 161);
    let limit = mean_width(&f).unwrap().value.raw();
    let mut prev = f64::NEG_INFINITY;
    let mut m8 = 0.0;
    for k in 1..=8 {
        let fk = truncate(&f, k as f64).unwrap();
        let mk = mean_width(&fk).unwrap().value.raw();
        assert!(mk >= prev - 1e-12, "M*(f_k) decreased at k = {k}");
        prev = mk;
        m8 = mk;
    }
    assert!(
        (m8 - limit).abs() <= 0.01 * limit.abs(),
        "|M*(f_8) - M*(f)| = {} > 1%",
        (m8 - limit).abs()
    );
    pass_line(5, "monotone convergence of truncations");
}

#[test]
fn criterion_06_legendre_engine() {
    let mut rng = ChaCha8Rng::seed_from_u64(4242);
    // 1-D sweep == O(NM) brute force, bit for bit, on 100 random convex
    // grids with N, M <= 513.
    for case in 0..100 {
        let grid = random_convex_grid(&mut rng, 513);
        let phi = Potential::from_grid(grid.clone()).unwrap();
        let out = default_slope_spec(&grid);
        let sf = legendre_1d(&phi, &out).unwrap();
        let brute = brute_force_conjugate(&grid, &out);
        let got = sf.as_grid().unwrap().values();
        for (k, b) in brute.iter().enumerate() {
            assert!(
                got[k].raw() == *b,
                "case {case}, node {k}: sweep {} != brute {b}",
                got[k].raw()
            );
        }
    }
    // Biconjugate idempotence, node-exact, convex and non-convex inputs.
    for case in 0..20 {
        let grid = if case % 2 == 0 {
            random_convex_grid(&mut rng, 257)
        } else {
            // Random non-convex values on a grid.
            let len = rng.gen_range(16..129);
            let vals: Vec<ExtReal> = (0..len)
                .map(|_| ExtReal::finite(rng.gen_range(-3.0..3.0)))
                .collect();
            Grid::new(vec![-2.0], vec![4.0 / (len - 1) as f64], vec![len], vals).unwrap()
        };
        let phi = Potential::from_grid(grid).unwrap();
        let b1 = biconjugate(&phi).unwrap();
        let b2 = biconjugate(&b1).unwrap();
        assert_eq!(
            b1.as_grid().unwrap().values(),
            b2.as_grid().unwrap().values(),
            "case {case}: biconjugate not idempotent"
        );
        // And the envelope minorizes the input.
        for (v, w) in phi
            .as_grid()
            .unwrap()
            .values()
            .iter()
            .zip(b1.as_grid().unwrap().values())
        {
            assert!(w <= v);
        }
    }
    // Fenchel-Young at 10^4 sampled node pairs.
    let mut pairs = 0usize;
    while pairs < 10_000 {
        let grid = random_convex_grid(&mut rng, 129);
        let phi = Potential::from_grid(grid.clone()).unwrap();
        let out = default_slope_spec(&grid);
        let sf = legendre_1d(&phi, &out).unwrap();
        let conj = sf.as_grid().unwrap().clone();
        for _ in 0..200 {
            let i = rng.gen_range(0..conj.shape()[0]);
            let j = rng.gen_range(0..grid.shape()[0]);
            let s = conj.axis_node(0, i);
            let y = grid.axis_node(0, j);
            let psi = grid.values()[j].raw();
            // psi(y) + (L psi)(s) >= s y, comparing the transform's own
            // float expression.
            assert!(conj.values()[i].raw() >= s * y - psi);
            pairs += 1;
        }
    }
    pass_line(6, "legendre engine bit-exactness and duality");
}

#[test]
fn criterion_07_santalo() {
    // Equality for phi = |x|^2/2 within 1e-6.
    for n in 1..=3usize {
        let phi = Potential::from_analytic(Analytic::gaussian(vec![0.0; n], 0.0));
        let rep = santalo_check(&phi).unwrap();
        assert!(rep.passed);
        assert!(
            (rep.log_product - rep.log_bound).abs() <= 1e-6,
            "n={n}: log product {} vs bound {}",
            rep.log_product,
            rep.log_bound
        );
    }
    // Translation recovery within the grid spacing for shifted Gaussians.
    let a = 0.8125;
    let spacing = 0.125;
    let g = Grid::sample(vec![-8.0 + a], vec![spacing], vec![129], |x| {
        ExtReal::finite(0.5 * (x[0] - a) * (x[0] - a))
    })
    .unwrap();
    let rep = santalo_check(&Potential::from_grid(g).unwrap()).unwrap();
    assert!(rep.passed);
    assert!(
        (rep.center[0] - a).abs() <= spacing,
        "recovered {} vs {a}",
        rep.center[0]
    );
    let rep = santalo_check(&Potential::from_analytic(Analytic::gaussian(
        vec![1.25, -0.5],
        0.0,
    )))
    .unwrap();
    assert!((rep.center[0] - 1.25).abs() <= 0.01 && (rep.center[1] + 0.5).abs() <= 0.01);
    // Product <= (2 pi)^n (1 + 1e-3) across the suite.
    let mut rng = ChaCha8Rng::seed_from_u64(55);
    let mut suite: Vec<(String, Potential)> = vec![
        (
            "box 2d".into(),
            Potential::from_analytic(Analytic::indicator(ConvexBody::cube(2, 1.0))),
        ),
        (
            "scaled gaussian".into(),
            Potential::from_analytic(Analytic::Quadratic {
                scale: 2.5,
                center: vec![0.4],
                offset: 0.1,
            }),
        ),
        (
            "ball indicator radial".into(),
            Potential::from_radial(3, RadialProfile::ball_indicator(1.2)),
        ),
        ("grid gaussian 1d".into(), grid_gaussian_1d(8.0, 129).into_phi()),
        // Spacing 1/16: the discrete conjugate undershoots the parabola by
        // O(h^2/24) per axis, inflating the product by ~h^2/12 in the log.
        ("grid gaussian 2d".into(), grid_gaussian_2d(5.0, 161).into_phi()),
    ];
    for k in 0..4 {
        suite.push((
            format!("random radial {k}"),
            Potential::from_radial(2 + k % 3, random_radial_profile(&mut rng)),
        ));
        suite.push((
            format!("random convex grid {k}"),
            Potential::from_grid(random_convex_grid(&mut rng, 65)).unwrap(),
        ));
    }
    for (name, phi) in &suite {
        let rep = santalo_check(phi).unwrap();
        assert!(
            rep.second_factor_diverged
                || rep.log_product <= rep.log_bound + (1.0 + 1e-3f64).ln(),
            "{name}: log product {} bound {}",
            rep.log_product,
            rep.log_bound
        );
    }
    pass_line(7, "santalo product, equality, recovery");
}

#[test]
fn criterion_08_bodies() {
    let t0 = Instant::now();
    let square = ConvexBody::cube(2, 1.0);
    // Steiner fit: V1 = V2 = 4 within 5% at 1e6 samples per radius.
    let diam = square.diameter();
    let radii: Vec<f64> = (0..8)
        .map(|k| 0.1 * diam * (10.0_f64).powf(k as f64 / 7.0))
        .collect();
    let rep = steiner_fit(&square, &radii, 1_000_000, 99).unwrap();
    assert!(
        (rep.coefficients[1] - 4.0).abs() <= 0.2,
        "V1 = {}",
        rep.coefficients[1]
    );
    assert!(
        (rep.coefficients[2] - 4.0).abs() <= 0.2,
        "V2 = {}",
        rep.coefficients[2]
    );
    // V1 = |D| M*(K) within 5%.
    assert!(
        (rep.coefficients[1] - rep.v1_from_mean_width).abs() <= 0.05 * rep.v1_from_mean_width
    );
    // Spherical mean width of the square: 4/pi within 1%.
    let mw = mean_width_body(&square, 1).unwrap().value.raw();
    let expect = 4.0 / std::f64::consts::PI;
    assert!((mw - expect).abs() <= 0.01 * expect);
    // Dilation-limit path within 5% of the spherical path.
    let lim = mean_width_body_limit(&square, 2_000_000, 5).unwrap().value.raw();
    assert!(
        (lim - mw).abs() <= 0.05 * mw,
        "limit {lim} vs spherical {mw}"
    );
    // K = D reproduces 1; K = {0} reproduces 0.
    let ball_lim = mean_width_body_limit(&ConvexBody::unit_ball(2), 2_000_000, 7)
        .unwrap()
        .value
        .raw();
    assert!((ball_lim - 1.0).abs() <= 0.03);
    let point = ConvexBody::Ball { center: vec![0.0, 0.0], radius: 0.0 };
    let point_lim = mean_width_body_limit(&point, 500_000, 9).unwrap().value.raw();
    assert!(point_lim.abs() <= 0.02);
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 30.0, "bodies took {dt:?}");
    pass_line(8, "steiner fit and mean width paths");
}

#[test]
fn criterion_09_level_sets() {
    // Gaussian level-set radius sqrt(2 beta n) to 1e-10.
    for beta in [0.1, 0.5, 1.0, 2.0] {
        for n in [2usize, 10, 100] {
            let f = LogConcaveFn::standard_gaussian(n);
            let r = level_set(&f, beta).unwrap().circumradius();
            assert!(
                (r - (2.0 * beta * n as f64).sqrt()).abs() <= 1e-10,
                "beta={beta}, n={n}: {r}"
            );
        }
    }
    // Inclusion chain over the suite, every beta pair.
    let suite: Vec<LogConcaveFn> = vec![
        counterexample_potential(16).unwrap(),
        LogConcaveFn::standard_gaussian(8),
        scalar_mult(4.0, &LogConcaveFn::standard_gaussian(4)).unwrap(),
        asplund(
            &LogConcaveFn::new(Potential::from_radial(5, RadialProfile::ball_indicator(2.0)))
                .unwrap(),
            &LogConcaveFn::standard_gaussian(5),
            None,
        )
        .unwrap(),
    ];
    let betas = [0.2, 0.4, 0.9, 1.7, 3.0];
    for f in &suite {
        for i in 0..betas.len() {
            for j in i + 1..betas.len() {
                let (b1, b2) = (betas[i], betas[j]);
                let r1 = level_set(f, b1).unwrap().circumradius();
                let r2 = level_set(f, b2).unwrap().circumradius();
                assert!(r1 <= r2 + 1e-12);
                assert!(r2 <= (b2 / b1) * r1 + 1e-9);
            }
        }
    }
    // Grid case: mask nesting.
    let f = grid_gaussian_2d(6.0, 49);
    let ls1 = level_set(&f, 0.5).unwrap();
    let ls2 = level_set(&f, 1.5).unwrap();
    match (&ls1.repr, &ls2.repr) {
        (LevelSetRepr::Mask(a), LevelSetRepr::Mask(b)) => {
            assert!(!a.is_empty() && a.len() <= b.len());
            for p in a {
                assert!(b.contains(p));
            }
        }
        _ => panic!("expected masks"),
    }
    pass_line(9, "level-set radii and inclusion chain");
}

#[test]
fn criterion_10_sharpness_family() {
    let t0 = Instant::now();
    // Empirical minimal homothety constants at n = 10^4.
    let f = counterexample_potential(10_000).unwrap();
    for eps in [0.5, 0.25, 0.125] {
        let cfg = LowMstarConfig {
            eps,
            m: 4.0,
            trials: 64,
            shell_samples: 8192,
            ..Default::default()
        };
        let rep = finite_volume_ratio_experiment(&f, &cfg).unwrap();
        let expected = (eps + 2.0) * (eps + 2.0) / (8.0 * eps);
        assert!(
            (rep.summary.max_c - expected).abs() <= 0.10 * expected,
            "eps={eps}: max_c {} vs {expected}",
            rep.summary.max_c
        );
    }
    // V(f) stable across n in {50, 100, 200} within 5%.
    let vs: Vec<f64> = [50usize, 100, 200]
        .iter()
        .map(|&n| {
            volume_ratio(&counterexample_potential(n).unwrap())
                .unwrap()
                .value
                .raw()
        })
        .collect();
    let vmax = vs.iter().cloned().fold(f64::MIN, f64::max);
    let vmin = vs.iter().cloned().fold(f64::MAX, f64::min);
    assert!(vmax / vmin - 1.0 <= 0.05, "V(f) across n: {vs:?}");
    let dt = t0.elapsed();
    assert!(dt.as_secs_f64() < 10.0, "sharpness took {dt:?}");
    pass_line(10, "sharpness constant and V(f) stability");
}

#[test]
fn criterion_11_low_mstar() {
    let sqrt_e = (0.5_f64).exp();
    let mut admissible: Vec<(String, LogConcaveFn)> = Vec::new();
    admissible.push(("gaussian n=40".into(), LogConcaveFn::standard_gaussian(40)));
    {
        let n = 60;
        let chi_mean = logconc::quadrature::chi_expectation(n, &|r| r, &[]);
        let r = 0.45 * n as f64 / chi_mean;
        admissible.push((
            "ball indicator n=60".into(),
            LogConcaveFn::new(Potential::from_radial(n, RadialProfile::ball_indicator(r)))
                .unwrap(),
        ));
    }
    admissible.push((
        "sharp gaussian n=30".into(),
        LogConcaveFn::new(Potential::from_radial(
            30,
            RadialProfile::gaussian().scale_values(2.0),
        ))
        .unwrap(),
    ));
    admissible.push((
        "truncated gaussian n=25".into(),
        truncate(&LogConcaveFn::standard_gaussian(25), 2.0).unwrap(),
    ));
    for (name, f) in &admissible {
        let cfg = LowMstarConfig { trials: 16, shell_samples: 2048, ..Default::default() };
        let rep = low_mstar_experiment(f, &cfg).unwrap();
        assert!(
            rep.v_h <= sqrt_e + 1e-3,
            "{name}: V(h) = {} > sqrt(e)",
            rep.v_h
        );
        assert!(rep.h_dominates_g, "{name}: h >= G failed");
        assert!(rep.f_below_h, "{name}: f <= h failed");
        assert!(rep.bound_holds, "{name}: shell bound failed");
        // Radial runs: subspace-invariant to 1e-10.
        let c0 = rep.experiment.per_trial[0].max_c;
        for t in &rep.experiment.per_trial {
            assert!((t.max_c - c0).abs() <= 1e-10, "{name}: subspace variation");
        }
        // Internal chain M*(h) = M*(f) + 1, radial quadratures.
        if rep.f_mean_width.value.is_finite() {
            assert!(
                (rep.h_mean_width.value.raw() - rep.f_mean_width.value.raw() - 1.0).abs()
                    <= 1e-6
            );
        }
    }
    pass_line(11, "low-M* experiment bounds");
}

#[test]
fn convexity_screen_spec_examples() {
    // The screen's own acceptance examples ride along with the suite.
    let g = Grid::sample_1d(4.0, 41, |x| ExtReal::finite(0.5 * x[0] * x[0])).unwrap();
    assert!(matches!(
        convexity_screen(&Potential::from_grid(g).unwrap(), 1e-9).unwrap(),
        Screen::Pass
    ));
    let g = Grid::sample_1d(4.0, 41, |x| ExtReal::finite(-x[0] * x[0])).unwrap();
    assert!(matches!(
        convexity_screen(&Potential::from_grid(g).unwrap(), 1e-9).unwrap(),
        Screen::Fail { .. }
    ));
}
