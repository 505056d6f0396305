//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero
//! if any fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{q, random_polynomial, random_smooth, random_vanishing, rng};
use num_traits::Zero;
use polycert::bernstein::{bernstein_approx, bernstein_with, BernsteinScheme};
use polycert::field::Field;
use polycert::grid::{Grid, DEFAULT_GRID_CAP};
use polycert::kmap::{apply_g, apply_k, derivative_tuple_of, DerivativeTuple};
use polycert::lyapunov::{
    check_hypotheses, check_sos_certificate, transfer_certificate, LyapunovHypotheses,
    SosCertificate, Targets, TransferOptions, VectorField,
};
use polycert::region::BoxRegion;
use polycert::sobolev::{approximate_sobolev, sobolev_errors_on, SobolevOptions};
use polycert::weighted::{
    approximate_weighted_sobolev, taylor2, weighted_errors_on, WeightedOptions, ETA,
};
use polycert::{ExactPolynomial, Expression, MultiIndex, Polynomial};

type Criterion = (&'static str, fn() -> Verdict);

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |m, v| m.max(v.abs()))
}

fn sobolev_error(p: &ExactPolynomial, v: &Expression, grid: &Grid) -> f64 {
    let errors = sobolev_errors_on(
        &Field::Polynomial(p.clone()),
        &Field::Expression(v.clone()),
        grid,
    )
    .unwrap();
    errors.iter().map(|e| e.error.value).fold(0.0, f64::max)
}

fn parse(text: &str, n: usize) -> Expression {
    Expression::parse(text, n).unwrap()
}

fn exact_reconstruction() -> Verdict {
    let start = Instant::now();
    let mut rng = rng(1);
    let mut mismatches = 0;
    for k in 0..200 {
        let n = 1 + k % 3;
        let v = random_polynomial(&mut rng, n, 4, 8);
        if apply_k(&derivative_tuple_of(&v).unwrap()).unwrap() != v {
            mismatches += 1;
        }
    }
    let t = start.elapsed();
    verdict(
        mismatches == 0 && within(t, 10),
        format!("200 polynomials, {mismatches} mismatches, {t:.2?}"),
    )
}

fn lipschitz_bound() -> Verdict {
    let start = Instant::now();
    let mut rng = rng(2);
    let grid = Grid::endpoint(&BoxRegion::unit(2), 64).unwrap();
    let mut worst_slack = f64::INFINITY;
    for _ in 0..100 {
        let p = DerivativeTuple::from_fn(2, |_| random_polynomial(&mut rng, 2, 4, 6));
        let q = DerivativeTuple::from_fn(2, |_| random_polynomial(&mut rng, 2, 4, 6));
        let diff = apply_k(&p).unwrap() - apply_k(&q).unwrap();
        let lhs = MultiIndex::binary(2)
            .iter()
            .map(|b| {
                max_abs(
                    &diff
                        .diff_multi(b)
                        .unwrap()
                        .eval_on_grid(grid.axes())
                        .unwrap(),
                )
            })
            .fold(0.0, f64::max);
        let rhs = p
            .iter()
            .zip(q.iter())
            .map(|((_, a), (_, b))| {
                max_abs(&(a.clone() - b.clone()).eval_on_grid(grid.axes()).unwrap())
            })
            .fold(0.0, f64::max);
        worst_slack = worst_slack.min(4.0 * rhs + 1e-12 - lhs);
    }
    let t = start.elapsed();
    verdict(
        worst_slack >= 0.0 && within(t, 60),
        format!("100 pairs, min slack {worst_slack:.3e}, {t:.2?}"),
    )
}

fn unweighted_density() -> Verdict {
    let start = Instant::now();
    let v = parse("exp(x1)*sin(x2)", 2);
    let region = BoxRegion::unit(2);
    match approximate_sobolev(&v, 1e-3, &region, &SobolevOptions::default()) {
        Ok(a) => {
            let t = start.elapsed();
            let error = sobolev_error(&a.polynomial, &v, &Grid::offset(&region, 64).unwrap());
            let degree = a.polynomial.max_degree_per_var();
            verdict(
                error <= 1e-3 && degree <= 64 && within(t, 120),
                format!("offset-grid error {error:.3e}, max per-variable degree {degree}, {t:.2?}"),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn weighted_density() -> Verdict {
    let start = Instant::now();
    let v = parse("exp(x1)*sin(x2)", 2);
    let region = BoxRegion::unit(2);
    match approximate_weighted_sobolev(&v, 1e-2, &region, &WeightedOptions::default()) {
        Ok(a) => {
            let t = start.elapsed();
            let grid = Grid::offset(&region, 64).unwrap();
            let errors = weighted_errors_on(
                &Field::Polynomial(a.polynomial.clone()),
                &Field::Expression(v),
                &grid,
                ETA,
            )
            .unwrap();
            let error = errors.iter().map(|e| e.error.value).fold(0.0, f64::max);
            verdict(
                error <= 1e-2 && within(t, 180),
                format!("weighted error {error:.3e}, {t:.2?}"),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn taylor_kill() -> Verdict {
    let mut rng = rng(5);
    let mut failures = Vec::new();
    for k in 0..20 {
        let n = 1 + k % 2;
        let v = random_smooth(&mut rng, n);
        let residual = &v - &Expression::from_polynomial(&taylor2(&v).unwrap());
        let origin = vec![q(0, 1); n];
        for beta in MultiIndex::up_to_degree(n, 2) {
            let value = residual
                .differentiate(&beta)
                .unwrap()
                .eval_rational(&origin);
            if !value.is_some_and(|x| x.is_zero()) {
                failures.push(format!("{v} at {beta}"));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("20 expressions, failures: {failures:?}"),
    )
}

fn lyapunov_transfer() -> Verdict {
    let start = Instant::now();
    let (beta0, gamma0, delta0) = (0.54, 1.0, 0.66);
    // Radial sweep: with s = xᵀx on (0, 2], v/s = ln(1+s)/s and ∇vᵀf/s = −2/(1+s).
    let oracle = (1..=200_000).all(|k| {
        let s = 2.0 * k as f64 / 200_000.0;
        let ratio = (1.0 + s).ln() / s;
        beta0 <= ratio && ratio <= gamma0 && -2.0 / (1.0 + s) <= -delta0
    });
    let v = parse("ln(1 + x1^2 + x2^2)", 2);
    let f = VectorField::parse(&["-x1", "-x2"]).unwrap();
    let hyp = LyapunovHypotheses::new(beta0, gamma0, delta0, BoxRegion::unit(2)).unwrap();
    let sampled = check_hypotheses(&v, &f, &hyp, 64).unwrap().passed;
    let targets = Targets {
        beta: 0.45,
        gamma: 1.1,
        delta: 0.5,
    };
    match transfer_certificate(&v, &f, &hyp, &targets, &TransferOptions::default()) {
        Ok(t) => {
            let elapsed = start.elapsed();
            let margins: Vec<String> = t
                .report
                .inequalities
                .iter()
                .map(|i| format!("{} {:.3e}", i.name, i.worst_margin))
                .collect();
            verdict(
                oracle
                    && sampled
                    && t.report.passed
                    && t.report.grid_density == 64
                    && within(elapsed, 300),
                format!(
                    "oracle {oracle}, budget {:.3}, margins [{}], {elapsed:.2?}",
                    t.budget,
                    margins.join(", ")
                ),
            )
        }
        Err(e) => verdict(false, e.to_string()),
    }
}

fn k_versus_bernstein() -> Verdict {
    let region = BoxRegion::unit(2);
    let grid = Grid::offset(&region, 64).unwrap();
    let mut ratios = Vec::new();
    for text in ["exp(x1)*sin(x2)", "1/(1 + x1^2 + x2^2)", "cos(x1*x2)"] {
        let v = parse(text, 2);
        let tuple = derivative_tuple_of(&v).unwrap();
        let fitted = DerivativeTuple::try_from_fn(2, |a| {
            bernstein_approx(tuple.get(a).unwrap(), 16, &region)
        })
        .unwrap();
        let constructed = apply_k(&fitted).unwrap();
        let direct =
            bernstein_with(&v, 16, &region, BernsteinScheme::Plain, DEFAULT_GRID_CAP).unwrap();
        let ratio = sobolev_error(&constructed, &v, &grid) / sobolev_error(&direct, &v, &grid);
        ratios.push((text, ratio));
    }
    let passed = ratios.iter().all(|(_, r)| (0.1..=10.0).contains(r));
    let detail: Vec<String> = ratios.iter().map(|(t, r)| format!("{t}: {r:.3}")).collect();
    verdict(
        passed,
        format!("d = 16 Sobolev error ratios [{}]", detail.join(", ")),
    )
}

fn sos_fixture() -> SosCertificate {
    let p = |text: &str| parse(text, 1).to_polynomial().unwrap();
    SosCertificate {
        v: p("x1^2"),
        epsilon: q(3, 4),
        r: q(1, 1),
        s1: vec![],
        s2: vec![p("x1/2")],
        t1: vec![],
        t2: vec![p("x1"), p("x1/2")],
    }
}

/// Every single-coefficient perturbation of the certificate's polynomials and `ε`.
fn perturbations(
    cert: &SosCertificate,
    delta: &num_rational::BigRational,
) -> Vec<(String, SosCertificate)> {
    fn bump(
        p: &ExactPolynomial,
        e: &MultiIndex,
        delta: &num_rational::BigRational,
    ) -> ExactPolynomial {
        p.clone() + Polynomial::monomial(e.clone(), delta.clone())
    }
    let mut out = vec![(
        format!("epsilon {delta}"),
        SosCertificate {
            epsilon: &cert.epsilon + delta,
            ..cert.clone()
        },
    )];
    for (e, _) in cert.v.terms() {
        out.push((
            format!("v {e} {delta}"),
            SosCertificate {
                v: bump(&cert.v, e, delta),
                ..cert.clone()
            },
        ));
    }
    for (name, list) in [("s2", &cert.s2), ("t2", &cert.t2)] {
        for (k, p) in list.iter().enumerate() {
            for (e, _) in p.terms() {
                let mut c = cert.clone();
                let target = if name == "s2" { &mut c.s2 } else { &mut c.t2 };
                target[k] = bump(p, e, delta);
                out.push((format!("{name}[{k}] {e} {delta}"), c));
            }
        }
    }
    out
}

fn sos_checker() -> Verdict {
    let cert = sos_fixture();
    let f = VectorField::parse(&["-x1"]).unwrap();
    let valid = check_sos_certificate(&cert, &f).unwrap().holds;
    let mut accepted = Vec::new();
    let mut count = 0;
    for delta in [q(1, 1000), q(-1, 1000)] {
        for (name, c) in perturbations(&cert, &delta) {
            count += 1;
            if check_sos_certificate(&c, &f).unwrap().holds {
                accepted.push(name);
            }
        }
    }
    verdict(
        valid && accepted.is_empty(),
        format!("fixture holds: {valid}; {count} perturbations, wrongly accepted: {accepted:?}"),
    )
}

fn weighted_gain() -> Verdict {
    let mut rng = rng(9);
    let grid = Grid::endpoint(&BoxRegion::unit(2), 65).unwrap();
    let points: Vec<Vec<f64>> = (0..grid.len()).map(|k| grid.point(k)).collect();
    let weighted_sup = |p: &ExactPolynomial| {
        let values = p.eval_on_grid(grid.axes()).unwrap();
        values
            .iter()
            .zip(&points)
            .filter_map(|(v, x)| {
                let s: f64 = x.iter().map(|c| c * c).sum();
                (s.sqrt() >= ETA).then(|| (v / s).abs())
            })
            .fold(0.0, f64::max)
    };
    let mut worst_slack = f64::INFINITY;
    for _ in 0..50 {
        let f = random_vanishing(&mut rng, 2, 4, 8);
        let bound = weighted_sup(&f);
        for i in 0..2 {
            for j in 0..2u8 {
                let g = apply_g(&f, i, j).unwrap();
                worst_slack = worst_slack.min(bound + 1e-12 - weighted_sup(&g));
            }
        }
    }
    verdict(
        worst_slack >= 0.0,
        format!("50 polynomials x 4 operators, min slack {worst_slack:.3e}"),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (
            "exact reconstruction from mixed partials",
            exact_reconstruction,
        ),
        ("assembly map Lipschitz bound", lipschitz_bound),
        ("Sobolev approximation fixture", unweighted_density),
        ("weighted Sobolev approximation fixture", weighted_density),
        ("second-order Taylor cancellation", taylor_kill),
        ("Lyapunov certificate transfer", lyapunov_transfer),
        (
            "assembled versus direct Bernstein error",
            k_versus_bernstein,
        ),
        ("SOS certificate checker", sos_checker),
        ("weighted gain of zero-slice and integral", weighted_gain),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let v = run();
        failed += usize::from(!v.passed);
        println!(
            "criterion {}: {} | {name} | {}",
            k + 1,
            if v.passed { "PASS" } else { "FAIL" },
            v.detail
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
