//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Every tolerance and time budget is pinned here.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use hhga_core::bounds::{
    self, corollary_crosschecks, lemma_rhs, signed_lhs, single_data, single_rhs,
    HypothesisStatus, Outcome, ParamPoint, TheoremId, Verifier, VerifyOptions,
};
use hhga_core::convexity::{self, ConvexityError, ConvexitySpec, Status};
use hhga_core::expr::Expression;
use hhga_core::means::{g_alpha_one, g_quad, g_series, log_mean, MeanContext};
use hhga_core::quad::QuadOptions;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CATALOG: [&str; 8] = ["1", "x", "x^2", "x^3", "ln(x)", "exp(x)", "x*ln(x)", "1/x"];
const INTERVALS: [(f64, f64); 4] = [(1.0, 2.0), (0.5, 3.0), (1.0, 1.01), (0.01, 10.0)];

const LEMMA_TOL: f64 = 1e-8;
const G_CROSS_TOL: f64 = 1e-9;
const G_CLOSED_TOL: f64 = 1e-10;
const EQUALITY_TOL: f64 = 1e-10;
const WITNESS_REPLAY_TOL: f64 = 1e-12;
const MEAN_SLACK: f64 = 1e-13;
const SPECIALIZATION_TOL: f64 = 1e-10;
const DERIV_TOL: f64 = 1e-6;

fn expr(s: &str) -> Expression {
    Expression::parse(s).unwrap_or_else(|e| panic!("{s}: {e}"))
}

fn rel(x: f64, y: f64) -> f64 {
    bounds::relative_difference(x, y)
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        pass,
        detail: detail.into(),
    }
}

fn criterion(id: u32, name: &str, budget: Duration, body: impl FnOnce() -> Verdict) -> bool {
    let start = Instant::now();
    let v = body();
    let elapsed = start.elapsed();
    let in_time = elapsed <= budget;
    let pass = v.pass && in_time;
    println!(
        "{} C{id} {name}: {}; {:.2} s (budget {} s{})",
        if pass { "PASS" } else { "FAIL" },
        v.detail,
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", exceeded" }
    );
    pass
}

/// Integral identity on the catalog.
fn c1() -> Verdict {
    let opts = QuadOptions::default();
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let mut cases = 0;
    for src in CATALOG {
        let f = expr(src);
        for (a, b) in INTERVALS {
            cases += 1;
            let l = signed_lhs(&f, a, b, &opts).expect("lhs");
            let r = lemma_rhs(&f, a, b, &opts).expect("rhs");
            let tol = LEMMA_TOL.max(10.0 * (l.error + r.error));
            let resid = (l.value - r.value).abs();
            worst = worst.max(resid / tol);
            if resid > tol {
                failures.push(format!("{src} on [{a},{b}]: residual {resid:e} > {tol:e}"));
            }
        }
    }
    verdict(
        failures.is_empty(),
        format!("{cases} cases, max residual/tol {worst:.2e} {failures:?}"),
    )
}

/// Series vs quadrature for G, closed forms at alpha = 1, and the
/// elementary estimates.
fn c2() -> Verdict {
    let opts = QuadOptions::default();
    let mut alphas: Vec<f64> = (0..=20).map(|i| i as f64 * 0.05).collect();
    alphas.extend([1.25, 1.5, 1.75, 2.0]);
    let ells = [1.0, 1.5, 3.0, 4.5, 6.0, 12.0];
    let ctxs = [(0.5, 3.0), (1.0, 2.0), (1.0, 1.001), (0.01, 100.0)];
    let mut points = 0;
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for (a, b) in ctxs {
        let ctx = MeanContext::new(a, b).unwrap();
        for ell in ells {
            let l = ctx.log_mean_pow(ell).unwrap();
            let mut prev = f64::INFINITY;
            for &alpha in &alphas {
                points += 1;
                let s = g_series(alpha, ell, &ctx).unwrap();
                let q = g_quad(alpha, ell, &ctx, &opts).unwrap().value;
                let d = rel(s, q);
                worst = worst.max(d);
                if d > G_CROSS_TOL {
                    problems.push(format!("G({alpha},{ell}) on [{a},{b}]: {d:e}"));
                }
                if s.is_nan() || s >= prev {
                    problems.push(format!("not decreasing at alpha={alpha}, ell={ell}, [{a},{b}]"));
                }
                prev = s;
                // Equality at alpha = 0, so allow rounding.
                if alpha <= 1.0 && !(s > 0.0 && s <= l * (1.0 + 1e-12)) {
                    problems.push(format!("0 < G <= L fails at alpha={alpha}, ell={ell}"));
                }
                if ell == 3.0 && s > b.powi(3) / (alpha + 1.0) * (1.0 + 1e-12) {
                    problems.push(format!("G(alpha,3) <= b^3/(alpha+1) fails at alpha={alpha}"));
                }
            }
        }
        // Closed forms at ell = 3, 3q, 3p.
        for ell in [3.0, 4.5, 6.0, 12.0, 1.5] {
            let closed = g_alpha_one(ell, &ctx).unwrap();
            let s = g_series(1.0, ell, &ctx).unwrap();
            let q = g_quad(1.0, ell, &ctx, &opts).unwrap().value;
            if rel(closed, s) > G_CLOSED_TOL || rel(closed, q) > G_CLOSED_TOL {
                problems.push(format!("closed form G(1,{ell}) on [{a},{b}]"));
            }
        }
    }
    verdict(
        problems.is_empty() && points >= 500,
        format!("{points} grid points, max |series-quad|/quad {worst:.2e}, problems {problems:?}"),
    )
}

/// f = x, a = 1, b = 2, alpha = m = q = 1.
fn c3() -> Verdict {
    let mut v = Verifier::default();
    let pt = ParamPoint::new(1.0, 1.0, 1.0, 1.0, 2.0);
    let ids = [TheoremId::Thm31, TheoremId::Cor31_3b];
    let r = v.verify(&expr("x"), None, &pt, &ids).unwrap();
    let oracle = 7.0 / 6.0;
    let ok = r.iter().all(|rep| {
        rep.outcome == Outcome::Holds && rel(rep.lhs, oracle) <= EQUALITY_TOL && rel(rep.rhs, oracle) <= EQUALITY_TOL
    });
    verdict(
        ok,
        format!(
            "lhs {:.17} thm31 {:.17} cor31_3b {:.17} (7/6 = {oracle:.17})",
            r[0].lhs, r[0].rhs, r[1].rhs
        ),
    )
}

/// Soundness over a parameter grid and the function catalogs.
fn c4() -> Verdict {
    // Printed forms known to be wrong; reported separately.
    let verbatim_defects = [TheoremId::Cor35_3, TheoremId::Cor37];
    let unit = [0.1, 0.25, 0.4, 0.55, 0.7, 0.85, 1.0];
    let mut points = Vec::new();
    for &alpha in &unit {
        for &m in &unit {
            for q in [1.0, 1.5, 2.0, 4.0] {
                let ps: &[Option<f64>] = if q > 1.0 { &[Some(0.5), Some(1.0)] } else { &[None] };
                for &p in ps {
                    for (a, b) in [(1.0, 2.0), (0.5, 3.0)] {
                        points.push(ParamPoint { p, ..ParamPoint::new(alpha, m, q, a, b) });
                    }
                }
            }
        }
    }
    let pairs = [
        ("1", "1"),
        ("x", "x"),
        ("x", "1/x"),
        ("x^2", "exp(x)"),
        ("sqrt(x)", "1"),
        ("2 - ln(x)", "2 - ln(x)"),
    ];
    let mut v = Verifier::new(VerifyOptions::default());
    let (mut holds, mut na, mut certified) = (0usize, 0usize, 0usize);
    let mut defect_fails = 0usize;
    let mut false_failures = Vec::new();
    let mut tally = |reports: &[bounds::BoundReport]| {
        for r in reports {
            if r.hypothesis.status == HypothesisStatus::Certified {
                certified += 1;
            }
            match r.outcome {
                Outcome::NotApplicable => na += 1,
                Outcome::Holds => holds += 1,
                Outcome::Fails if verbatim_defects.contains(&r.theorem_id) => defect_fails += 1,
                Outcome::Fails => false_failures.push(format!(
                    "{} at {:?}: margin {:e}",
                    r.theorem_id, r.point, r.margin
                )),
            }
        }
    };
    for src in CATALOG {
        let f = expr(src);
        for pt in &points {
            let ids: Vec<TheoremId> = TheoremId::admitted(pt, false)
                .into_iter()
                .filter(|t| *t != TheoremId::Lemma21)
                .collect();
            tally(&v.verify(&f, None, pt, &ids).expect("single-function evaluation"));
        }
    }
    for (fs, gs) in pairs {
        let (f, g) = (expr(fs), expr(gs));
        for pt in points.iter().filter(|p| p.p != Some(1.0)) {
            let ids: Vec<TheoremId> = TheoremId::admitted(pt, true)
                .into_iter()
                .filter(|t| t.is_product())
                .collect();
            tally(&v.verify(&f, Some(&g), pt, &ids).expect("product evaluation"));
        }
    }
    verdict(
        false_failures.is_empty() && points.len() >= 500,
        format!(
            "{} points; {certified} certified reports, {holds} hold, {na} not applicable, \
             0 allowed failures -> {} failures {:?}; printed cor35_3/cor37 forms failed {defect_fails} times (not asserted)",
            points.len(),
            false_failures.len(),
            false_failures.iter().take(5).collect::<Vec<_>>()
        ),
    )
}

/// Convexity checker fixtures under seed 42.
fn c5() -> Verdict {
    let hi = 4.0;
    let spec = ConvexitySpec::ga(1.0, 1.0, hi);
    let run = |s: &str, spec: &ConvexitySpec| convexity::check(&expr(s), spec, 256, 42).unwrap();
    let mut problems = Vec::new();

    if run("x", &spec).status != Status::Certified {
        problems.push("x not certified".to_string());
    }

    let neg = run("-x", &spec);
    match neg.witness {
        Some(w) if neg.status == Status::Violated => {
            let f = expr("-x");
            let replay = convexity::evaluate_triple(
                |x| f.eval(x).map_err(|source| ConvexityError::Eval { x, source }),
                &spec,
                w.x,
                w.y,
                w.lambda,
            )
            .unwrap();
            if (replay.gap - w.gap).abs() > WITNESS_REPLAY_TOL || !replay.violates() {
                problems.push("-x witness does not replay".into());
            }
        }
        _ => problems.push("-x not violated".into()),
    }
    if neg != run("-x", &spec) {
        problems.push("-x verdict not deterministic".into());
    }

    let constant = run("1", &ConvexitySpec::ga(1.0, 0.5, hi));
    match constant.witness {
        Some(w) if w.lambda == 0.0 && (w.gap - 0.5).abs() < 1e-15 => {}
        other => problems.push(format!("constant witness {other:?}")),
    }

    if run("-ln(x)", &spec).status != Status::Certified {
        problems.push("-ln(x) not certified".into());
    }
    verdict(
        problems.is_empty(),
        format!(
            "x certified, -x violated (gap {:.3}), constant at lambda=0, -ln x certified; problems {problems:?}",
            neg.witness.map_or(f64::NAN, |w| w.gap)
        ),
    )
}

/// Geometric <= logarithmic <= arithmetic mean.
fn c6() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut series_branch = 0;
    let mut bad = Vec::new();
    for i in 0..10_000 {
        let x = 10f64.powf(rng.gen_range(-5.0..5.0));
        let y = if i % 5 == 0 {
            series_branch += 1;
            x * (1.0 + 10f64.powf(rng.gen_range(-12.0..-6.5)))
        } else {
            10f64.powf(rng.gen_range(-5.0..5.0))
        };
        let l = log_mean(x, y).unwrap();
        let g = x.sqrt() * y.sqrt();
        let a = 0.5 * x + 0.5 * y;
        if l < g * (1.0 - MEAN_SLACK) || l > a * (1.0 + MEAN_SLACK) || l != log_mean(y, x).unwrap() {
            bad.push((x, y));
        }
    }
    verdict(
        bad.is_empty(),
        format!("10000 pairs over 10 decades ({series_branch} near-diagonal), violations {bad:?}"),
    )
}

/// Corollary closed forms against the general statements at alpha = 1.
fn c7() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let fs = ["x^3", "exp(x)", "x*ln(x)", "x^2 + 1", "sqrt(x)"];
    let mut worst: f64 = 0.0;
    let mut problems = Vec::new();
    for i in 0..50 {
        let f = expr(fs[i % fs.len()]);
        let q = rng.gen_range(1.05..5.0);
        let a = rng.gen_range(0.1..2.0);
        let pt = ParamPoint::new(1.0, rng.gen_range(0.2..=1.0), q, a, a * rng.gen_range(1.05f64..4.0))
            .with_p(rng.gen_range(0.05..q - 0.01));
        let ctx = MeanContext::new(pt.a, pt.b).unwrap();
        let d = single_data(&f, &pt, ctx).unwrap();
        let d1 = hhga_core::bounds::SingleData { q: 1.0, ..d };
        for (dat, cor, parent) in [
            (&d, TheoremId::Cor31_2, TheoremId::Thm31),
            (&d1, TheoremId::Cor31_2, TheoremId::Thm31),
            (&d, TheoremId::Cor32, TheoremId::Thm32),
            (&d, TheoremId::Cor33, TheoremId::Thm33),
            (&d, TheoremId::Cor34, TheoremId::Thm34),
        ] {
            let (c, p) = (single_rhs(cor, dat).unwrap(), single_rhs(parent, dat).unwrap());
            let e = rel(c, p);
            worst = worst.max(e);
            if e > SPECIALIZATION_TOL {
                problems.push(format!("{cor} vs {parent} at {pt:?}: {e:e}"));
            }
        }
    }
    // Product corollaries at all-ones points.
    let (mut max35_2, mut max36) = (0f64, 0f64);
    let (mut min35_3, mut max35_3, mut min37, mut max37) = (f64::INFINITY, 0f64, f64::INFINITY, 0f64);
    let gs = [("x", "x + 1"), ("exp(x)", "x^2"), ("sqrt(x)", "2 - ln(x)"), ("1", "1/x")];
    for i in 0..50 {
        let (fs, gs) = gs[i % gs.len()];
        let a = rng.gen_range(0.1..2.0);
        let q = if i % 2 == 0 { 1.0 } else { rng.gen_range(1.1..4.0) };
        let pt = ParamPoint::new(1.0, 1.0, q, a, a * rng.gen_range(1.05f64..8.0));
        for c in corollary_crosschecks(&expr(fs), Some(&expr(gs)), &pt).unwrap() {
            match c.corollary {
                TheoremId::Cor35_2 => max35_2 = max35_2.max(c.rel_diff),
                TheoremId::Cor36 => max36 = max36.max(c.rel_diff),
                TheoremId::Cor35_3 => {
                    min35_3 = min35_3.min(c.rel_diff);
                    max35_3 = max35_3.max(c.rel_diff);
                }
                TheoremId::Cor37 => {
                    min37 = min37.min(c.rel_diff);
                    max37 = max37.max(c.rel_diff);
                }
                _ => {}
            }
        }
    }
    if max35_2 > bounds::CROSSCHECK_TOL || max36 > bounds::CROSSCHECK_TOL {
        problems.push(format!("cor35_2 {max35_2:e} / cor36 {max36:e} disagree"));
    }
    verdict(
        problems.is_empty(),
        format!(
            "50 points, max rel diff {worst:.2e}; cor35_2 {max35_2:.1e}, cor36 {max36:.1e} agree; \
             reported only: printed cor35_3 differs by {min35_3:.2e}..{max35_3:.2e}, printed cor37 by {min37:.2e}..{max37:.2e}; {problems:?}"
        ),
    )
}

/// Dual-number derivatives against central finite differences.
fn c8() -> Verdict {
    let corpus = [
        "1", "x", "x^2", "x^3", "ln(x)", "exp(x)", "x*ln(x)", "1/x", "sqrt(x)", "x^2.5",
        "sin(x)*exp(-x/100)", "cos(x^0.5)", "abs(x - 2)", "2^x", "x^x", "(x+1)/(x^2+1)",
        "exp(-x)*x^3", "ln(1 + x^2)", "-x^2 + 3*x", "x^-2",
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut checked, mut skipped) = (0, 0);
    let mut bad = Vec::new();
    for src in corpus {
        let f = expr(src);
        for _ in 0..100 {
            let x = 10f64.powf(rng.gen_range(-3.0..3.0));
            let h = 1e-6 * x.abs().max(1.0);
            let (Ok(d), Ok(p2), Ok(p1), Ok(m1), Ok(m2)) = (
                f.eval_dual(x),
                f.eval(x + 2.0 * h),
                f.eval(x + h),
                f.eval(x - h),
                f.eval(x - 2.0 * h),
            ) else {
                skipped += 1;
                continue;
            };
            if src == "abs(x - 2)" && (x - 2.0).abs() <= 2.0 * h {
                skipped += 1;
                continue;
            }
            if d.value.to_bits() != f.eval(x).unwrap().to_bits() {
                bad.push(format!("{src} at {x}: value mismatch"));
            }
            // Five-point stencil: truncation O(h^4), so steep terms like x^-2
            // near 1e-3 stay inside the tolerance.
            let fd = (8.0 * (p1 - m1) - (p2 - m2)) / (12.0 * h);
            checked += 1;
            if (d.deriv - fd).abs() > DERIV_TOL * (1.0 + d.deriv.abs()) {
                bad.push(format!("{src} at {x}: dual {} fd {fd}", d.deriv));
            }
        }
    }
    verdict(
        bad.is_empty(),
        format!("{checked} points ({skipped} out of domain), mismatches {bad:?}"),
    )
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        criterion(1, "integral identity residual", s(5), c1),
        criterion(2, "G series/quadrature cross-validation", s(10), c2),
        criterion(3, "equality case 7/6", s(1), c3),
        criterion(4, "soundness sweep", s(60), c4),
        criterion(5, "convexity fixtures", s(5), c5),
        criterion(6, "mean inequalities", s(2), c6),
        criterion(7, "specialization identities", s(5), c7),
        criterion(8, "dual derivatives vs finite differences", s(2), c8),
    ];
    let passed = results.iter().filter(|p| **p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
