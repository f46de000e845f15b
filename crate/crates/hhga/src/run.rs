//! Subcommand implementations. Every command returns its exit code.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use clap::Parser;
use hhga_core::bounds::{
    BoundReport, Outcome, ParamPoint, TheoremId, Verifier, VerifyOptions,
};
use hhga_core::convexity::{
    self, ConvexityError, ConvexitySpec, Direction, Kind, Status, DEFAULT_DOMAIN_LO,
};
use hhga_core::expr::Expression;
use rayon::prelude::*;

use crate::args::{Cli, Command, CommonArgs, ConvexityArgs, DirectionArg, Format, KindArg, TransformArg};
use crate::grid::Grid;
use crate::plot;
use crate::report::{self, num, PointResult, Skipped, SweepResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Parse `args` (including the program name) and run the subcommand.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let result = match cli.command {
        Command::Convexity(a) => cmd_convexity(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Identity(a) => cmd_identity(a),
    };
    match result {
        Ok(code) => code,
        Err(e) if is_broken_pipe(&e) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}

/// A reader closing stdout early (`| head`) is not an error.
fn is_broken_pipe(e: &anyhow::Error) -> bool {
    e.chain().any(|cause| {
        let io = cause.downcast_ref::<io::Error>().or_else(|| {
            cause.downcast_ref::<csv::Error>().and_then(|c| match c.kind() {
                csv::ErrorKind::Io(io) => Some(io),
                _ => None,
            })
        });
        io.is_some_and(|io| io.kind() == io::ErrorKind::BrokenPipe)
    })
}

fn parse_expr(text: Option<&str>, flag: &str) -> Result<Expression> {
    let text = text.ok_or_else(|| anyhow!("{flag} is required"))?;
    Expression::parse(text).with_context(|| format!("parsing {flag} \"{text}\""))
}

fn shell_quote(s: &str) -> String {
    format!("'{}'", s.replace('\'', r"'\''"))
}

// ---------------------------------------------------------------------------
// convexity

fn cmd_convexity(args: ConvexityArgs) -> Result<i32> {
    let a = args.resolve()?;
    let f = parse_expr(a.f.as_deref(), "--f")?;
    let spec = ConvexitySpec {
        kind: match a.kind.unwrap_or(KindArg::Ga) {
            KindArg::Ga => Kind::Ga,
            KindArg::Ordinary => Kind::Ordinary,
        },
        alpha: a.alpha.unwrap_or(1.0),
        m: a.m.unwrap_or(1.0),
        domain_lo: a.lo.unwrap_or(DEFAULT_DOMAIN_LO),
        domain_hi: a.hi.ok_or_else(|| anyhow!("--hi is required"))?,
        direction: match a.direction.unwrap_or(DirectionArg::Convex) {
            DirectionArg::Convex => Direction::Convex,
            DirectionArg::Concave => Direction::Concave,
        },
    };
    spec.validate()?;
    let transform = a.transform.unwrap_or(TransformArg::Identity);
    let q = a.q.unwrap_or(1.0);
    match transform {
        TransformArg::AbsDeriv if !(q >= 1.0 && q.is_finite()) => bail!("--q must be >= 1 for abs-deriv"),
        TransformArg::Power if !(q > 0.0 && q.is_finite()) => bail!("--q must be > 0 for power"),
        _ => {}
    }
    let func = |x: f64| match transform {
        TransformArg::Identity => f.eval(x).map_err(|source| ConvexityError::Eval { x, source }),
        TransformArg::AbsDeriv => convexity::abs_deriv_pow(&f, q, x),
        TransformArg::Power => convexity::nonneg_pow(&f, q, x),
    };
    let mut out = io::stdout().lock();

    if let Some(at) = &a.at {
        let coords: Vec<f64> = at
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("parsing --at \"{at}\""))?;
        let [x, y, lambda] = coords[..] else {
            bail!("--at needs three values x,y,lambda");
        };
        if !(0.0..=1.0).contains(&lambda) {
            bail!("lambda must lie in [0, 1]");
        }
        let w = convexity::evaluate_triple(func, &spec, x, y, lambda)?;
        let status = if w.violates() { "violated" } else { "satisfied" };
        writeln!(
            out,
            "{status} at x={} y={} lambda={}: lhs={} rhs={} gap={}",
            num(x),
            num(y),
            num(lambda),
            num(w.lhs),
            num(w.rhs),
            num(w.gap)
        )?;
        return Ok(if w.violates() { EXIT_VIOLATION } else { EXIT_OK });
    }

    let samples = a.samples.unwrap_or(convexity::DEFAULT_SAMPLES);
    let seed = a.seed.unwrap_or(convexity::DEFAULT_SEED);
    let v = convexity::check_fn(func, &spec, samples, seed)?;
    match (v.status, v.witness) {
        (Status::Certified, _) | (_, None) => {
            writeln!(
                out,
                "certified ({} triples sampled, seed {seed}; max gap {:.3e}; sampling certificate, not a proof)",
                v.samples_checked, v.max_gap
            )?;
            Ok(EXIT_OK)
        }
        (Status::Violated, Some(w)) => {
            writeln!(
                out,
                "violated after {} triples: x={} y={} lambda={} lhs={} rhs={} gap={}",
                v.samples_checked,
                num(w.x),
                num(w.y),
                num(w.lambda),
                num(w.lhs),
                num(w.rhs),
                num(w.gap)
            )?;
            let transform_name = match transform {
                TransformArg::Identity => "identity",
                TransformArg::AbsDeriv => "abs-deriv",
                TransformArg::Power => "power",
            };
            let kind = if spec.kind == Kind::Ga { "ga" } else { "ordinary" };
            let direction = if spec.direction == Direction::Convex { "convex" } else { "concave" };
            writeln!(
                out,
                "replay: hhga convexity --f {} --alpha {} --m {} --lo {} --hi {} --kind {kind} --direction {direction} --transform {transform_name} --q {} --at {},{},{}",
                shell_quote(f.source()),
                num(spec.alpha),
                num(spec.m),
                num(spec.domain_lo),
                num(spec.domain_hi),
                num(q),
                num(w.x),
                num(w.y),
                num(w.lambda)
            )?;
            Ok(EXIT_VIOLATION)
        }
    }
}

// ---------------------------------------------------------------------------
// bound evaluation shared by verify / sweep / compare / identity

/// Requested theorems: ids named explicitly are enforced in strict mode,
/// aliases only select what a point admits.
#[derive(Debug, Clone, Default)]
struct Selection {
    explicit: Vec<TheoremId>,
    filtered: Vec<TheoremId>,
}

impl Selection {
    fn parse(text: &str) -> Result<Self> {
        let mut sel = Selection::default();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            match item {
                "all" => sel.filtered.extend(TheoremId::ALL),
                "single" => sel.filtered.extend(TheoremId::single()),
                "product" => sel.filtered.extend(TheoremId::product()),
                id => sel.explicit.push(id.parse()?),
            }
        }
        if sel.explicit.is_empty() && sel.filtered.is_empty() {
            bail!("--theorems is empty");
        }
        Ok(sel)
    }

    fn for_point(&self, pt: &ParamPoint, has_g: bool, strict: bool) -> Result<Vec<TheoremId>> {
        let mut ids = Vec::new();
        for &id in &self.explicit {
            let ok = (has_g || !id.is_product()) && id.admits(pt).is_ok();
            if ok {
                ids.push(id);
            } else if strict {
                if id.is_product() && !has_g {
                    bail!("{id} needs --g");
                }
                id.admits(pt)?;
            }
        }
        ids.extend(
            self.filtered
                .iter()
                .copied()
                .filter(|id| (has_g || !id.is_product()) && id.admits(pt).is_ok()),
        );
        ids.sort();
        ids.dedup();
        Ok(ids)
    }
}

struct Setup {
    f: Expression,
    g: Option<Expression>,
    points: Vec<ParamPoint>,
    selection: Selection,
    opts: VerifyOptions,
    jobs: usize,
    args: CommonArgs,
}

fn grid_or(g: &Option<Grid>, default: f64) -> Vec<f64> {
    g.as_ref().map_or_else(|| vec![default], |g| g.values.clone())
}

fn optional_grid(g: &Option<Grid>) -> Vec<Option<f64>> {
    g.as_ref()
        .map_or_else(|| vec![None], |g| g.values.iter().copied().map(Some).collect())
}

fn setup(args: CommonArgs, default_theorems: &str) -> Result<Setup> {
    let args = args.resolve()?;
    let f = parse_expr(args.f.as_deref(), "--f")?;
    let g = args.g.as_deref().map(|s| parse_expr(Some(s), "--g")).transpose()?;
    let a = args.a.as_ref().ok_or_else(|| anyhow!("--a is required"))?;
    let b = args.b.as_ref().ok_or_else(|| anyhow!("--b is required"))?;
    let selection = Selection::parse(args.theorems.as_deref().unwrap_or(default_theorems))?;
    let mut opts = VerifyOptions::default();
    if let Some(t) = args.tol {
        if !(t > 0.0 && t.is_finite()) {
            bail!("--tol must be positive");
        }
        opts.tol = t;
    }
    if let Some(s) = args.samples {
        if s == 0 {
            bail!("--samples must be positive");
        }
        opts.samples = s;
    }
    opts.seed = args.seed.unwrap_or(opts.seed);

    let mut points = Vec::new();
    for &alpha in &grid_or(&args.alpha, 1.0) {
        for &m in &grid_or(&args.m, 1.0) {
            for &q in &grid_or(&args.q, 1.0) {
                for &p in &optional_grid(&args.p) {
                    for &alpha2 in &optional_grid(&args.alpha2) {
                        for &m2 in &optional_grid(&args.m2) {
                            for &av in &a.values {
                                for &bv in &b.values {
                                    points.push(ParamPoint {
                                        alpha,
                                        m,
                                        q,
                                        p,
                                        a: av,
                                        b: bv,
                                        alpha2,
                                        m2,
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(Setup {
        f,
        g,
        points,
        selection,
        opts,
        jobs: args.jobs.unwrap_or(0),
        args,
    })
}

/// Evaluate every point. In strict mode any invalid point or evaluation
/// error aborts; otherwise the point is skipped with its reason.
fn evaluate(s: &Setup, strict: bool) -> Result<SweepResult> {
    let has_g = s.g.is_some();
    let mut jobs: Vec<(ParamPoint, Vec<TheoremId>)> = Vec::new();
    let mut skipped = Vec::new();
    for pt in &s.points {
        let ids = pt
            .validate()
            .map_err(anyhow::Error::from)
            .and_then(|_| s.selection.for_point(pt, has_g, strict))
            .and_then(|ids| {
                if ids.is_empty() {
                    Err(anyhow!("no requested theorem admits this point"))
                } else {
                    Ok(ids)
                }
            });
        match ids {
            Ok(ids) => jobs.push((*pt, ids)),
            Err(e) if strict => return Err(e),
            Err(e) => skipped.push(Skipped {
                point: *pt,
                reason: format!("{e:#}"),
            }),
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(s.jobs)
        .build()
        .context("building thread pool")?;
    let evaluated: Vec<Result<PointResult, Skipped>> = pool.install(|| {
        jobs.par_iter()
            .map_init(
                || Verifier::new(s.opts),
                |v, (pt, ids)| {
                    v.verify(&s.f, s.g.as_ref(), pt, ids)
                        .map(|reports| PointResult {
                            point: *pt,
                            reports,
                        })
                        .map_err(|e| Skipped {
                            point: *pt,
                            reason: e.to_string(),
                        })
                },
            )
            .collect()
    });
    let mut result = SweepResult {
        points: Vec::with_capacity(evaluated.len()),
        skipped,
    };
    for r in evaluated {
        match r {
            Ok(p) => result.points.push(p),
            Err(sk) if strict => bail!("{}: {}", report::describe_point(&sk.point), sk.reason),
            Err(sk) => result.skipped.push(sk),
        }
    }
    Ok(result)
}

fn write_outputs(s: &Setup, result: &SweepResult, stdout_default: bool) -> Result<()> {
    let format = s.args.format.unwrap_or(Format::Csv);
    let write = |w: &mut dyn Write| -> Result<()> {
        match format {
            Format::Csv => report::write_csv(w, result)?,
            Format::Json => report::write_json(w, result)?,
        }
        Ok(())
    };
    match &s.args.out {
        Some(path) => {
            let mut w = BufWriter::new(create(path)?);
            write(&mut w)?;
            w.flush()?;
        }
        None if stdout_default => write(&mut io::stdout().lock())?,
        None => {}
    }
    if let Some(path) = &s.args.plot {
        std::fs::write(path, plot::render(result))
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn create(path: &Path) -> Result<File> {
    File::create(path).with_context(|| format!("creating {}", path.display()))
}

fn exit_for(result: &SweepResult) -> i32 {
    if result.reports().any(|r| r.outcome == Outcome::Fails) {
        EXIT_VIOLATION
    } else {
        EXIT_OK
    }
}

fn print_witnesses(out: &mut impl Write, r: &BoundReport) -> io::Result<()> {
    if let Some((check, w)) = r.hypothesis.witness() {
        writeln!(
            out,
            "          witness for {}: x={} y={} lambda={} gap={}",
            check.role,
            num(w.x),
            num(w.y),
            num(w.lambda),
            num(w.gap)
        )?;
    }
    Ok(())
}

fn cmd_verify(args: CommonArgs) -> Result<i32> {
    let s = setup(args, "all")?;
    if s.points.len() != 1 {
        bail!("verify takes a single parameter point ({} given); use sweep for grids", s.points.len());
    }
    let result = evaluate(&s, true)?;
    let mut out = io::stdout().lock();
    for p in &result.points {
        writeln!(out, "point: {}", report::describe_point(&p.point))?;
        for r in &p.reports {
            writeln!(out, "{}", report::table_line(r))?;
            print_witnesses(&mut out, r)?;
        }
    }
    drop(out);
    write_outputs(&s, &result, false)?;
    Ok(exit_for(&result))
}

fn print_summary(result: &SweepResult) {
    for sk in &result.skipped {
        eprintln!("skipped {}: {}", report::describe_point(&sk.point), sk.reason);
    }
    let sm = result.summary();
    eprintln!(
        "{} rows: {} hold, {} fail, {} not applicable; {} points skipped",
        sm.rows, sm.holds, sm.fails, sm.not_applicable, sm.skipped_points
    );
}

fn cmd_sweep(args: CommonArgs) -> Result<i32> {
    let s = setup(args, "all")?;
    let result = evaluate(&s, false)?;
    print_summary(&result);
    if result.points.is_empty() {
        bail!("no valid grid point");
    }
    write_outputs(&s, &result, true)?;
    Ok(exit_for(&result))
}

fn cmd_compare(args: CommonArgs) -> Result<i32> {
    let default = if args.g.is_some() { "all" } else { "single" };
    let s = setup(args, default)?;
    let result = evaluate(&s, false)?;
    if result.points.is_empty() {
        print_summary(&result);
        bail!("no valid grid point");
    }
    let mut out = io::stdout().lock();
    for p in &result.points {
        writeln!(out, "point: {}", report::describe_point(&p.point))?;
        for rk in report::rank(&p.reports) {
            writeln!(out, "  [{}] lhs={}", rk.group.name(), num(rk.lhs))?;
            for (id, v) in &rk.entries {
                let mark = if rk.tightest.contains(id) { '*' } else { ' ' };
                writeln!(out, "  {mark} {:<9} {}", id.name(), num(*v))?;
            }
            let names: Vec<&str> = rk.tightest.iter().map(|t| t.name()).collect();
            let tie = if names.len() > 1 { " (tie)" } else { "" };
            writeln!(out, "  tightest: {}{tie}", names.join(", "))?;
        }
        for r in p.reports.iter().filter(|r| r.outcome == Outcome::NotApplicable) {
            writeln!(
                out,
                "    {:<9} not applicable (hypothesis {})",
                r.theorem_id.name(),
                r.hypothesis.status.name()
            )?;
        }
        for r in p.reports.iter().filter(|r| r.outcome == Outcome::Fails) {
            writeln!(out, "  ! {:<9} rhs below lhs: {}", r.theorem_id.name(), report::table_line(r))?;
        }
    }
    drop(out);
    print_summary(&result);
    write_outputs(&s, &result, false)?;
    Ok(exit_for(&result))
}

fn cmd_identity(mut args: CommonArgs) -> Result<i32> {
    args.theorems = Some("lemma21".into());
    let s = setup(args, "lemma21")?;
    let result = evaluate(&s, true)?;
    let mut out = io::stdout().lock();
    for r in result.reports() {
        writeln!(
            out,
            "a={} b={} lhs={} rhs={} residual={:.3e} tol={:.3e} {}",
            r.point.a,
            r.point.b,
            num(r.lhs),
            num(r.rhs),
            -r.margin,
            r.tol_compare,
            if r.holds() { "ok" } else { "FAIL" }
        )?;
    }
    drop(out);
    write_outputs(&s, &result, false)?;
    Ok(exit_for(&result))
}
