//! The `verify` suites: compact, self-contained checks of the theorems the
//! library implements, one table row per check.

use logconc::*;
use serde::Serialize;

#[derive(Debug, Serialize)]
pub struct VerifyRow {
    pub check: String,
    pub passed: bool,
    pub detail: String,
}

fn row(check: &str, passed: bool, detail: String) -> VerifyRow {
    VerifyRow { check: check.to_string(), passed, detail }
}

fn grid_gaussian_1d() -> LogConcaveFn {
    let g = Grid::sample_1d(8.0, 129, |x| ExtReal::finite(0.5 * x[0] * x[0])).unwrap();
    LogConcaveFn::new(Potential::from_grid(g).unwrap()).unwrap()
}

fn box_indicator_1d() -> LogConcaveFn {
    let g = Grid::sample_1d(1.0, 17, |_| ExtReal::ZERO).unwrap();
    LogConcaveFn::new(Potential::from_grid(g).unwrap()).unwrap()
}

/// Definition equality: |M~* - M*| / |M*| within 2% across a small suite,
/// plus the divergent example on which both definitions report +inf.
pub fn suite_equality() -> Vec<VerifyRow> {
    let cfg = TildeConfig::default();
    let mut rows = Vec::new();
    let exp_norm =
        LogConcaveFn::new(Potential::from_radial(2, RadialProfile::linear(1.0, 0.0))).unwrap();
    let members: Vec<(&str, LogConcaveFn)> = vec![
        ("grid gaussian 1d", grid_gaussian_1d()),
        ("box indicator 1d", box_indicator_1d()),
        (
            "ball indicator radial n=2",
            LogConcaveFn::new(Potential::from_radial(2, RadialProfile::ball_indicator(1.5)))
                .unwrap(),
        ),
        ("truncated e^-|x| k=2", truncate(&exp_norm, 2.0).unwrap()),
        ("counterexample n=2", counterexample_potential(2).unwrap()),
    ];
    for (name, f) in &members {
        match check_definition_equality(f, &cfg) {
            Ok(eq) => rows.push(row(
                name,
                eq.rel_gap <= 0.02,
                format!(
                    "M*={} M~*={} rel_gap={:.5}",
                    eq.m_star.value, eq.m_tilde.value, eq.rel_gap
                ),
            )),
            Err(e) => rows.push(row(name, false, e.to_string())),
        }
    }
    match check_definition_equality(&exp_norm, &cfg) {
        Ok(eq) => rows.push(row(
            "e^-|x| divergence",
            eq.m_star.is_infinite() && eq.m_tilde.is_infinite(),
            format!("M*={} M~*={}", eq.m_star.value, eq.m_tilde.value),
        )),
        Err(e) => rows.push(row("e^-|x| divergence", false, e.to_string())),
    }
    rows
}

/// Urysohn: gap >= -1e-6 everywhere, equality flagged exactly on the
/// Gaussian rows.
pub fn suite_urysohn() -> Vec<VerifyRow> {
    let mut rows = Vec::new();
    let mut push = |name: String, f: &LogConcaveFn, expect_equality: bool| match urysohn_gap(f) {
        Ok(rep) => {
            let ok = rep.gap.raw() >= -1e-6 && rep.equality == expect_equality;
            rows.push(row(
                &name,
                ok,
                format!("gap={} equality={}", rep.gap, rep.equality),
            ));
        }
        Err(e) => rows.push(row(&name, false, e.to_string())),
    };
    push(
        "gaussian (equality)".into(),
        &LogConcaveFn::standard_gaussian(2),
        true,
    );
    push(
        "3 e^{-|x-a|^2/2} (equality)".into(),
        &LogConcaveFn::new(Potential::from_analytic(Analytic::gaussian(
            vec![1.0, 0.0],
            3.0_f64.ln(),
        )))
        .unwrap(),
        true,
    );
    push("box indicator 1d".into(), &box_indicator_1d(), false);
    push(
        "ball indicator n=2".into(),
        &LogConcaveFn::new(Potential::from_radial(2, RadialProfile::ball_indicator(1.0)))
            .unwrap(),
        false,
    );
    for (s, c) in [(0.5, -0.7), (1.6, 0.3), (2.5, 1.1)] {
        let f = LogConcaveFn::new(Potential::from_analytic(Analytic::Quadratic {
            scale: s,
            center: vec![c],
            offset: 0.0,
        }))
        .unwrap();
        push(format!("scaled gaussian s={s}"), &f, false);
    }
    rows
}

/// Santalo: minimized product below (2 pi)^n, equality for the Gaussian,
/// center recovery for a shifted one.
pub fn suite_santalo() -> Vec<VerifyRow> {
    let mut rows = Vec::new();
    let gaussian = Potential::from_analytic(Analytic::gaussian(vec![0.0, 0.0], 0.0));
    match santalo_check(&gaussian) {
        Ok(rep) => rows.push(row(
            "gaussian equality",
            rep.passed && (rep.log_product - rep.log_bound).abs() <= 1e-6,
            format!("log product {:.9} vs bound {:.9}", rep.log_product, rep.log_bound),
        )),
        Err(e) => rows.push(row("gaussian equality", false, e.to_string())),
    }
    let shifted = Potential::from_analytic(Analytic::gaussian(vec![1.25, -0.5], 0.0));
    match santalo_check(&shifted) {
        Ok(rep) => rows.push(row(
            "shifted gaussian recovery",
            rep.passed && (rep.center[0] - 1.25).abs() <= 0.05 && (rep.center[1] + 0.5).abs() <= 0.05,
            format!("center ({:.4}, {:.4})", rep.center[0], rep.center[1]),
        )),
        Err(e) => rows.push(row("shifted gaussian recovery", false, e.to_string())),
    }
    let members = vec![
        (
            "box indicator 2d",
            Potential::from_analytic(Analytic::indicator(ConvexBody::cube(2, 1.0))),
        ),
        (
            "ball indicator radial n=3",
            Potential::from_radial(3, RadialProfile::ball_indicator(1.2)),
        ),
        ("grid gaussian 1d", grid_gaussian_1d().into_phi()),
    ];
    for (name, phi) in members {
        match santalo_check(&phi) {
            Ok(rep) => rows.push(row(
                name,
                rep.passed,
                format!("log product {:.6} vs bound {:.6}", rep.log_product, rep.log_bound),
            )),
            Err(e) => rows.push(row(name, false, e.to_string())),
        }
    }
    rows
}

/// Shannon: equality at q = alpha p, strict gap for q = e^{-h_f}.
pub fn suite_shannon() -> Vec<VerifyRow> {
    let mut rows = Vec::new();
    let m = GaussianMeasure::new(1);
    let p = move |x: &[f64]| m.log_density(x).exp();
    match shannon_check(1, p, p) {
        Ok(rep) => rows.push(row("q = p", rep.equality, format!("gap {:.2e}", rep.gap))),
        Err(e) => rows.push(row("q = p", false, e.to_string())),
    }
    let q5 = move |x: &[f64]| 5.0 * m.log_density(x).exp();
    match shannon_check(1, p, q5) {
        Ok(rep) => rows.push(row("q = 5p", rep.equality, format!("gap {:.2e}", rep.gap))),
        Err(e) => rows.push(row("q = 5p", false, e.to_string())),
    }
    let f = box_indicator_1d();
    let h = support_fn(&f).unwrap();
    let q = move |x: &[f64]| (-h.eval(x).unwrap().raw()).exp();
    match shannon_check(1, p, q) {
        Ok(rep) => rows.push(row(
            "q = e^{-h_box}",
            rep.gap > 0.0 && !rep.equality,
            format!("gap {:.6}", rep.gap),
        )),
        Err(e) => rows.push(row("q = e^{-h_box}", false, e.to_string())),
    }
    rows
}

/// The five basic mean-width properties (i)-(v).
pub fn suite_properties() -> Vec<VerifyRow> {
    let mut rows = Vec::new();
    // (i) M* > -inf, bounded below by -(2/n) phi(x0).
    let small = scalar_mult(1e-6, &LogConcaveFn::standard_gaussian(2)).unwrap();
    let m = mean_width(&small).unwrap();
    let phi0 = small.phi().at_origin().raw();
    rows.push(row(
        "(i) M* > -inf",
        m.value.is_finite() && m.value.raw() >= -phi0 - 1e-9,
        format!("M* = {} >= {}", m.value, -phi0),
    ));
    // (ii) f(x0) >= 1 somewhere gives M* >= 0.
    let m = mean_width(&box_indicator_1d()).unwrap();
    rows.push(row(
        "(ii) f(x0)>=1 => M*>=0",
        m.value.raw() >= 0.0,
        format!("M* = {}", m.value),
    ));
    // (iii) linearity on an exactly computable radial triple.
    let f = LogConcaveFn::new(Potential::from_radial(3, RadialProfile::ball_indicator(1.0)))
        .unwrap();
    let g = LogConcaveFn::standard_gaussian(3);
    let lambda = 1.7;
    let prod = asplund(&homothety(lambda, &f).unwrap(), &g, None).unwrap();
    let lhs = mean_width(&prod).unwrap().value.raw();
    let rhs = lambda * mean_width(&f).unwrap().value.raw() + mean_width(&g).unwrap().value.raw();
    rows.push(row(
        "(iii) linearity",
        (lhs - rhs).abs() <= 1e-8,
        format!("{lhs:.10} vs {rhs:.10}"),
    ));
    // (iv) translation and rotation invariance.
    let f = grid_gaussian_1d();
    let a = mean_width(&f).unwrap().value.raw();
    let b = mean_width(&translate(&f, &[0.625]).unwrap()).unwrap().value.raw();
    let fr = LogConcaveFn::new(Potential::from_analytic(Analytic::gaussian(vec![1.0, 0.5], 0.0)))
        .unwrap();
    let fr2 = LogConcaveFn::new(Potential::from_analytic(Analytic::gaussian(vec![-0.5, 1.0], 0.0)))
        .unwrap();
    let c = mean_width(&fr).unwrap().value.raw();
    let d = mean_width(&fr2).unwrap().value.raw();
    rows.push(row(
        "(iv) translation/rotation invariance",
        (a - b).abs() <= 1e-9 && (c - d).abs() <= 1e-9,
        format!("|{a:.10} - {b:.10}|, |{c:.10} - {d:.10}|"),
    ));
    // (v) scalar law: M*(f_a) - M*(f) = (2/n) log a.
    let f = LogConcaveFn::standard_gaussian(2);
    let a_val = std::f64::consts::E;
    let m1 = mean_width(&scalar_mult(a_val, &f).unwrap()).unwrap().value.raw();
    let m0 = mean_width(&f).unwrap().value.raw();
    rows.push(row(
        "(v) scalar law",
        (m1 - m0 - 1.0).abs() <= 1e-9,
        format!("shift {:.12}", m1 - m0),
    ));
    rows
}

/// Monotone convergence: truncations increase to the limit.
pub fn suite_monotone() -> Vec<VerifyRow> {
    let f = grid_gaussian_1d();
    let limit = mean_width(&f).unwrap().value.raw();
    let mut prev = f64::NEG_INFINITY;
    let mut monotone = true;
    let mut m8 = 0.0;
    for k in 1..=8 {
        let mk = mean_width(&truncate(&f, k as f64).unwrap()).unwrap().value.raw();
        monotone &= mk >= prev - 1e-12;
        prev = mk;
        m8 = mk;
    }
    vec![
        row("M*(f_k) nondecreasing", monotone, format!("M*(f_8) = {m8:.8}")),
        row(
            "limit within 1%",
            (m8 - limit).abs() <= 0.01 * limit.abs(),
            format!("|{m8:.8} - {limit:.8}|"),
        ),
    ]
}

pub fn run_suite(name: &str) -> Option<Vec<VerifyRow>> {
    match name {
        "equality" => Some(suite_equality()),
        "urysohn" => Some(suite_urysohn()),
        "santalo" => Some(suite_santalo()),
        "shannon" => Some(suite_shannon()),
        "properties" => Some(suite_properties()),
        "monotone" => Some(suite_monotone()),
        "all" => {
            let mut rows = suite_equality();
            rows.extend(suite_urysohn());
            rows.extend(suite_santalo());
            rows.extend(suite_shannon());
            rows.extend(suite_properties());
            rows.extend(suite_monotone());
            Some(rows)
        }
        _ => None,
    }
}
