//! Sweep results and their CSV, JSON and text renderings.

use std::io::Write;

use hhga_core::bounds::{BoundReport, Outcome, ParamPoint, TheoremId};
use serde_json::{json, Value};

pub const CSV_HEADER: [&str; 13] = [
    "theorem_id",
    "alpha",
    "m",
    "q",
    "p",
    "a",
    "b",
    "lhs",
    "rhs",
    "margin",
    "hypothesis",
    "holds",
    "quad_error",
];

/// Relative tolerance under which two right-hand sides tie.
pub const TIE_TOL: f64 = 1e-12;

/// 17 significant digits.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

#[derive(Debug, Clone)]
pub struct PointResult {
    pub point: ParamPoint,
    pub reports: Vec<BoundReport>,
}

#[derive(Debug, Clone)]
pub struct Skipped {
    pub point: ParamPoint,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub points: Vec<PointResult>,
    pub skipped: Vec<Skipped>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Summary {
    pub rows: usize,
    pub holds: usize,
    pub fails: usize,
    pub not_applicable: usize,
    pub skipped_points: usize,
}

impl SweepResult {
    pub fn reports(&self) -> impl Iterator<Item = &BoundReport> {
        self.points.iter().flat_map(|p| p.reports.iter())
    }

    pub fn summary(&self) -> Summary {
        let mut s = Summary {
            skipped_points: self.skipped.len(),
            ..Summary::default()
        };
        for r in self.reports() {
            s.rows += 1;
            match r.outcome {
                Outcome::Holds => s.holds += 1,
                Outcome::Fails => s.fails += 1,
                Outcome::NotApplicable => s.not_applicable += 1,
            }
        }
        s
    }
}

/// Which left-hand side a bound refers to; rankings never mix groups.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Group {
    Main,
    ProductUpper,
    ProductLower,
}

impl Group {
    fn of(id: TheoremId) -> Option<Group> {
        if id == TheoremId::Lemma21 {
            None
        } else if id.is_lower_bound() {
            Some(Group::ProductLower)
        } else if id.is_product() {
            Some(Group::ProductUpper)
        } else {
            Some(Group::Main)
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Group::Main => "main",
            Group::ProductUpper => "product-upper",
            Group::ProductLower => "product-lower",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ranking {
    pub group: Group,
    pub lhs: f64,
    /// Applicable bounds, tightest first.
    pub entries: Vec<(TheoremId, f64)>,
    /// Every bound within [`TIE_TOL`] of the tightest, in lexicographic order.
    pub tightest: Vec<TheoremId>,
}

/// Rank the applicable right-hand sides of one point: ascending for upper
/// bounds, descending for lower bounds.
pub fn rank(reports: &[BoundReport]) -> Vec<Ranking> {
    let mut out = Vec::new();
    for group in [Group::Main, Group::ProductUpper, Group::ProductLower] {
        let members: Vec<&BoundReport> = reports
            .iter()
            .filter(|r| Group::of(r.theorem_id) == Some(group))
            .filter(|r| r.outcome != Outcome::NotApplicable && r.rhs.is_finite())
            .collect();
        let Some(first) = members.first() else { continue };
        let sign = if group == Group::ProductLower { -1.0 } else { 1.0 };
        let mut entries: Vec<(TheoremId, f64)> =
            members.iter().map(|r| (r.theorem_id, r.rhs)).collect();
        entries.sort_by(|x, y| {
            (sign * x.1)
                .total_cmp(&(sign * y.1))
                .then_with(|| x.0.name().cmp(y.0.name()))
        });
        let best = entries[0].1;
        let mut tightest: Vec<TheoremId> = entries
            .iter()
            .filter(|(_, v)| (v - best).abs() <= TIE_TOL * v.abs().max(best.abs()))
            .map(|(id, _)| *id)
            .collect();
        tightest.sort_by_key(|id| id.name());
        out.push(Ranking {
            group,
            lhs: first.lhs,
            entries,
            tightest,
        });
    }
    out
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn write_csv<W: Write>(w: W, result: &SweepResult) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(CSV_HEADER)?;
    for r in result.reports() {
        let pt = &r.point;
        wr.write_record([
            r.theorem_id.name().to_string(),
            num(pt.alpha),
            num(pt.m),
            num(pt.q),
            opt(pt.p),
            num(pt.a),
            num(pt.b),
            num(r.lhs),
            num(r.rhs),
            num(r.margin),
            r.hypothesis.status.name().to_string(),
            r.outcome.name().to_string(),
            num(r.quad_error),
        ])?;
    }
    wr.flush()?;
    Ok(())
}

fn point_json(pt: &ParamPoint) -> Value {
    json!({
        "alpha": pt.alpha,
        "m": pt.m,
        "q": pt.q,
        "p": pt.p,
        "a": pt.a,
        "b": pt.b,
        "alpha2": pt.alpha2,
        "m2": pt.m2,
    })
}

fn report_json(r: &BoundReport) -> Value {
    let mut v = json!({
        "theorem_id": r.theorem_id.name(),
        "point": point_json(&r.point),
        "lhs": r.lhs,
        "rhs": r.rhs,
        "margin": r.margin,
        "hypothesis": r.hypothesis.status.name(),
        "holds": r.outcome.name(),
        "quad_error": r.quad_error,
        "tol_compare": r.tol_compare,
    });
    if let Some((check, w)) = r.hypothesis.witness() {
        v["witness"] = json!({
            "function": check.role,
            "x": w.x, "y": w.y, "lambda": w.lambda,
            "lhs": w.lhs, "rhs": w.rhs, "gap": w.gap,
        });
    }
    v
}

pub fn to_json(result: &SweepResult) -> Value {
    let s = result.summary();
    let tightest: Vec<Value> = result
        .points
        .iter()
        .enumerate()
        .flat_map(|(i, p)| {
            rank(&p.reports).into_iter().map(move |rk| {
                json!({
                    "point_index": i,
                    "point": point_json(&p.point),
                    "group": rk.group.name(),
                    "lhs": rk.lhs,
                    "theorems": rk.tightest.iter().map(|t| t.name()).collect::<Vec<_>>(),
                    "rhs": rk.entries[0].1,
                })
            })
        })
        .collect();
    json!({
        "rows": result.reports().map(report_json).collect::<Vec<_>>(),
        "summary": {
            "rows": s.rows,
            "holds": s.holds,
            "fails": s.fails,
            "not_applicable": s.not_applicable,
            "skipped_points": s.skipped_points,
        },
        "tightest": tightest,
        "skipped": result.skipped.iter().map(|sk| json!({
            "point": point_json(&sk.point),
            "reason": sk.reason,
        })).collect::<Vec<_>>(),
    })
}

pub fn write_json<W: Write>(mut w: W, result: &SweepResult) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut w, &to_json(result))?;
    writeln!(w)
}

/// One human-readable line per report.
pub fn table_line(r: &BoundReport) -> String {
    let verdict = match r.outcome {
        Outcome::Holds => "hold",
        Outcome::Fails => "FAIL",
        Outcome::NotApplicable => "not-applicable",
    };
    format!(
        "{:<9} lhs={:.6} rhs={:.6} margin={:.3e} hypothesis={} {}",
        r.theorem_id.name(),
        r.lhs,
        r.rhs,
        r.margin,
        r.hypothesis.status.name(),
        verdict
    )
}

pub fn describe_point(pt: &ParamPoint) -> String {
    let mut s = format!(
        "alpha={} m={} q={} a={} b={}",
        pt.alpha, pt.m, pt.q, pt.a, pt.b
    );
    if let Some(p) = pt.p {
        s += &format!(" p={p}");
    }
    if let Some(v) = pt.alpha2 {
        s += &format!(" alpha2={v}");
    }
    if let Some(v) = pt.m2 {
        s += &format!(" m2={v}");
    }
    s
}
