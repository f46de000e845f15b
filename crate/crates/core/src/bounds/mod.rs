//! Both sides of the integral identity and of every bound, packaged as
//! [`BoundReport`]s.
//!
//! The single-function statements bound
//!
//! ```text
//! | (b²f(b) − a²f(a))/2 − ∫ₐᵇ x f(x) dx |
//! ```
//!
//! under (α,m)-GA-convexity of `|f'|^q`; the product statements bound
//! `∫ₐᵇ f g` from above (convex powers) or below (concave `f`, `g`).
//! A bound is only judged when its hypothesis is certified by sampling;
//! otherwise the report is [`Outcome::NotApplicable`].

mod rhs;
mod theorem;

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

pub use rhs::{product_rhs, single_rhs, ProductData, SingleData};
pub use theorem::{parse_theorem_list, ParamError, ParamPoint, TheoremId, UnknownTheorem};

use crate::convexity::{
    self, ConvexityError, ConvexitySpec, ConvexityVerdict, Direction, Kind, DEFAULT_DOMAIN_LO,
};
use crate::expr::{EvalError, Expression};
use crate::means::{MeanContext, MeanError};
use crate::quad::{self, QuadOptions, TryQuadError};

pub const DEFAULT_TOL: f64 = 1e-8;
/// Relative agreement required between a corollary's closed form and the
/// general statement it specializes.
pub const CROSSCHECK_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum BoundError {
    #[error(transparent)]
    Param(#[from] ParamError),
    #[error("{0} needs a second function g")]
    MissingG(TheoremId),
    #[error("{what}: {source}")]
    Eval { what: &'static str, source: EvalError },
    #[error("{what}: {source}")]
    Quad {
        what: &'static str,
        source: quad::QuadError,
    },
    #[error("{what}: quadrature did not converge (estimate {value}, error {error})")]
    NotConverged {
        what: &'static str,
        value: f64,
        error: f64,
    },
    #[error(transparent)]
    Mean(#[from] MeanError),
    #[error(transparent)]
    Convexity(#[from] ConvexityError),
}

/// A quadrature-backed value with its absolute error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn integrate(
    what: &'static str,
    f: impl FnMut(f64) -> Result<f64, EvalError>,
    lo: f64,
    hi: f64,
    opts: &QuadOptions,
) -> Result<Estimate, BoundError> {
    let r = quad::try_integrate(f, lo, hi, opts).map_err(|e| match e {
        TryQuadError::Quad(source) => BoundError::Quad { what, source },
        TryQuadError::Integrand { source, .. } => BoundError::Eval { what, source },
    })?;
    if !r.converged {
        return Err(BoundError::NotConverged {
            what,
            value: r.value,
            error: r.error_estimate,
        });
    }
    Ok(Estimate {
        value: r.value,
        error: r.error_estimate,
    })
}

fn check_interval(a: f64, b: f64) -> Result<(), BoundError> {
    if a > 0.0 && a < b && b.is_finite() {
        Ok(())
    } else {
        Err(MeanError::InvalidInterval { a, b }.into())
    }
}

/// `(b²f(b) − a²f(a))/2 − ∫ₐᵇ x f(x) dx`, without the absolute value.
pub fn signed_lhs(f: &Expression, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate, BoundError> {
    check_interval(a, b)?;
    let what = "left-hand side";
    let eval = |x: f64| f.eval(x).map_err(|source| BoundError::Eval { what, source });
    let ends = 0.5 * (b * b * eval(b)? - a * a * eval(a)?);
    let int = integrate(what, |x| Ok(x * f.eval(x)?), a, b, opts)?;
    Ok(Estimate {
        value: ends - int.value,
        error: int.error,
    })
}

/// `|(b²f(b) − a²f(a))/2 − ∫ₐᵇ x f(x) dx|`.
pub fn lhs_main(f: &Expression, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate, BoundError> {
    let s = signed_lhs(f, a, b, opts)?;
    Ok(Estimate {
        value: s.value.abs(),
        ..s
    })
}

/// `(ln b − ln a)/2 · ∫₀¹ a^{3(1−t)} b^{3t} f'(a^{1−t} b^t) dt`.
pub fn lemma_rhs(f: &Expression, a: f64, b: f64, opts: &QuadOptions) -> Result<Estimate, BoundError> {
    check_interval(a, b)?;
    let half_c = 0.5 * (libm::log(b) - libm::log(a));
    let r = integrate(
        "identity right-hand side",
        |t| {
            let x = libm::pow(a, 1.0 - t) * libm::pow(b, t);
            Ok(x * x * x * f.derivative(x)?)
        },
        0.0,
        1.0,
        opts,
    )?;
    Ok(Estimate {
        value: half_c * r.value,
        error: half_c * r.error,
    })
}

/// `∫ₐᵇ f(x) g(x) dx`.
pub fn lhs_product(
    f: &Expression,
    g: &Expression,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<Estimate, BoundError> {
    check_interval(a, b)?;
    integrate("product integral", |x| Ok(f.eval(x)? * g.eval(x)?), a, b, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum HypothesisStatus {
    /// Sampling found no violation for every required function.
    Certified,
    /// A convexity (or concavity) witness was found.
    Violated,
    /// A function that must be nonnegative took a negative value.
    Negative,
    /// A required function could not be evaluated on the hypothesis domain.
    Undefined,
    /// Convexity is certified but the extra ordering condition of a relaxed
    /// form does not hold at the endpoints.
    SideCondition,
    /// The statement is an identity with no hypothesis.
    NotRequired,
}

impl HypothesisStatus {
    pub fn name(self) -> &'static str {
        match self {
            HypothesisStatus::Certified => "certified",
            HypothesisStatus::Violated => "violated",
            HypothesisStatus::Negative => "negative",
            HypothesisStatus::Undefined => "undefined",
            HypothesisStatus::SideCondition => "side-condition",
            HypothesisStatus::NotRequired => "not-required",
        }
    }

    pub fn admits(self) -> bool {
        matches!(self, HypothesisStatus::Certified | HypothesisStatus::NotRequired)
    }
}

/// What was checked for one function of the hypothesis.
#[derive(Debug, Clone, PartialEq)]
pub struct RoleCheck {
    /// e.g. `|f'|^q`, `f^q`, `g^(q/(q-1))`.
    pub role: String,
    pub spec: ConvexitySpec,
    pub result: Result<ConvexityVerdict, ConvexityError>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub status: HypothesisStatus,
    pub checks: Vec<RoleCheck>,
}

impl Hypothesis {
    fn not_required() -> Self {
        Self {
            status: HypothesisStatus::NotRequired,
            checks: Vec::new(),
        }
    }

    fn from_checks(checks: Vec<RoleCheck>) -> Self {
        let status = checks
            .iter()
            .map(|c| match &c.result {
                Ok(v) if v.is_certified() => HypothesisStatus::Certified,
                Ok(_) => HypothesisStatus::Violated,
                Err(ConvexityError::Negative { .. }) => HypothesisStatus::Negative,
                Err(_) => HypothesisStatus::Undefined,
            })
            .find(|s| *s != HypothesisStatus::Certified)
            .unwrap_or(HypothesisStatus::Certified);
        Self { status, checks }
    }

    /// The first violation witness, if any.
    pub fn witness(&self) -> Option<(&RoleCheck, convexity::Witness)> {
        self.checks
            .iter()
            .find_map(|c| c.result.as_ref().ok().and_then(|v| v.witness).map(|w| (c, w)))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Holds,
    Fails,
    NotApplicable,
}

impl Outcome {
    pub fn name(self) -> &'static str {
        match self {
            Outcome::Holds => "true",
            Outcome::Fails => "false",
            Outcome::NotApplicable => "n/a",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    pub point: ParamPoint,
    pub lhs: f64,
    pub rhs: f64,
    /// Slack in the bound's favour: `rhs − lhs` for upper bounds, `lhs − rhs`
    /// for lower bounds and `−|rhs − lhs|` for the identity.
    pub margin: f64,
    pub hypothesis: Hypothesis,
    pub outcome: Outcome,
    /// Combined absolute quadrature error of both sides.
    pub quad_error: f64,
    /// `max(tol, 10·quad_error)`.
    pub tol_compare: f64,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.outcome == Outcome::Holds
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    pub samples: usize,
    pub seed: u64,
    pub quad: QuadOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            tol: DEFAULT_TOL,
            samples: convexity::DEFAULT_SAMPLES,
            seed: convexity::DEFAULT_SEED,
            quad: QuadOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Transform {
    AbsDerivPow,
    Pow,
    Identity,
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct CacheKey {
    source: String,
    transform: Transform,
    concave: bool,
    bits: [u64; 4],
}

/// Evaluates reports, memoizing hypothesis checks across points.
#[derive(Debug, Clone, Default)]
pub struct Verifier {
    pub opts: VerifyOptions,
    cache: BTreeMap<CacheKey, Result<ConvexityVerdict, ConvexityError>>,
}

impl Verifier {
    pub fn new(opts: VerifyOptions) -> Self {
        Self {
            opts,
            cache: BTreeMap::new(),
        }
    }

    fn check(
        &mut self,
        f: &Expression,
        transform: Transform,
        power: f64,
        spec: ConvexitySpec,
        role: String,
    ) -> RoleCheck {
        let key = CacheKey {
            source: f.to_string(),
            transform,
            concave: spec.direction == Direction::Concave,
            bits: [
                power.to_bits(),
                spec.alpha.to_bits(),
                spec.m.to_bits(),
                spec.domain_hi.to_bits(),
            ],
        };
        let (samples, seed) = (self.opts.samples, self.opts.seed);
        let result = self
            .cache
            .entry(key)
            .or_insert_with(|| match transform {
                Transform::AbsDerivPow => {
                    convexity::check_power_of_abs_deriv(f, power, &spec, samples, seed)
                }
                Transform::Pow => convexity::check_power(f, power, &spec, samples, seed),
                Transform::Identity => convexity::check_fn(
                    |x| convexity::nonneg_pow(f, 1.0, x),
                    &spec,
                    samples,
                    seed,
                ),
            })
            .clone();
        RoleCheck { role, spec, result }
    }

    fn hypothesis(&mut self, id: TheoremId, f: &Expression, g: Option<&Expression>, pt: &ParamPoint) -> Hypothesis {
        use TheoremId::*;
        let q = pt.q;
        let (alpha2, m2) = pt.second();
        let spec1 = ConvexitySpec {
            kind: Kind::Ga,
            alpha: pt.alpha,
            m: pt.m,
            domain_lo: DEFAULT_DOMAIN_LO,
            domain_hi: pt.a_root().max(pt.b),
            direction: Direction::Convex,
        };
        let spec2 = ConvexitySpec {
            alpha: alpha2,
            m: m2,
            domain_hi: pt.a_root2().max(pt.b),
            ..spec1
        };
        let checks = match id {
            Lemma21 => return Hypothesis::not_required(),
            Thm35 | Cor35_1 | Cor35_2 | Cor35_3 | Thm36 | Cor36 | Thm37 | Cor37 => {
                let g = g.expect("product statements are gated on g");
                match id {
                    Thm37 | Cor37 => alloc::vec![
                        self.check(f, Transform::Identity, 1.0, spec1.concave(), "f".into()),
                        self.check(g, Transform::Identity, 1.0, spec2.concave(), "g".into()),
                    ],
                    Thm36 | Cor36 => {
                        let r = q / (q - 1.0);
                        alloc::vec![
                            self.check(f, Transform::Pow, q, spec1, alloc::format!("f^{q}")),
                            self.check(g, Transform::Pow, r, spec2, alloc::format!("g^{r}")),
                        ]
                    }
                    _ => alloc::vec![
                        self.check(f, Transform::Pow, q, spec1, alloc::format!("f^{q}")),
                        self.check(g, Transform::Pow, q, spec2, alloc::format!("g^{q}")),
                    ],
                }
            }
            _ => alloc::vec![self.check(
                f,
                Transform::AbsDerivPow,
                q,
                spec1,
                alloc::format!("|f'|^{q}")
            )],
        };
        Hypothesis::from_checks(checks)
    }

    /// Evaluate `theorems` at `pt`. Every id must admit `pt`, and product
    /// statements need `g`.
    pub fn verify(
        &mut self,
        f: &Expression,
        g: Option<&Expression>,
        pt: &ParamPoint,
        theorems: &[TheoremId],
    ) -> Result<Vec<BoundReport>, BoundError> {
        for &id in theorems {
            id.admits(pt)?;
            if id.is_product() && g.is_none() {
                return Err(BoundError::MissingG(id));
            }
        }
        let ctx = MeanContext::new(pt.a, pt.b)?;
        let qo = self.opts.quad;
        let mut main: Option<Estimate> = None;
        let mut product: Option<Estimate> = None;
        let mut out = Vec::with_capacity(theorems.len());
        for &id in theorems {
            let mut hypothesis = self.hypothesis(id, f, g, pt);
            let (lhs, rhs) = if id == TheoremId::Lemma21 {
                (signed_lhs(f, pt.a, pt.b, &qo)?, lemma_rhs(f, pt.a, pt.b, &qo)?)
            } else if id.is_product() {
                let g = g.expect("checked above");
                let lhs = match product {
                    Some(v) => v,
                    None => *product.insert(lhs_product(f, g, pt.a, pt.b, &qo)?),
                };
                let rhs = gate(&hypothesis, product_data(f, g, pt, ctx).and_then(|d| Ok(product_rhs(id, &d)?)))?;
                (lhs, Estimate { value: rhs, error: 0.0 })
            } else {
                let lhs = match main {
                    Some(v) => v,
                    None => *main.insert(lhs_main(f, pt.a, pt.b, &qo)?),
                };
                let data = single_data(f, pt, ctx);
                if let (Ok(d), TheoremId::Cor31_3a | TheoremId::Cor31_3b) = (&data, id) {
                    if hypothesis.status == HypothesisStatus::Certified && !d.relaxation_admissible() {
                        hypothesis.status = HypothesisStatus::SideCondition;
                    }
                }
                let rhs = gate(&hypothesis, data.and_then(|d| Ok(single_rhs(id, &d)?)))?;
                (lhs, Estimate { value: rhs, error: 0.0 })
            };
            out.push(assemble(id, *pt, lhs, rhs, hypothesis, self.opts.tol));
        }
        Ok(out)
    }

    /// Every admitted statement at `pt`.
    pub fn verify_all(
        &mut self,
        f: &Expression,
        g: Option<&Expression>,
        pt: &ParamPoint,
    ) -> Result<Vec<BoundReport>, BoundError> {
        let ids = TheoremId::admitted(pt, g.is_some());
        self.verify(f, g, pt, &ids)
    }
}

/// Right-hand sides are still reported when the hypothesis fails, but an
/// evaluation error there becomes NaN instead of aborting.
fn gate(h: &Hypothesis, rhs: Result<f64, BoundError>) -> Result<f64, BoundError> {
    match rhs {
        Ok(v) => Ok(v),
        Err(_) if !h.status.admits() => Ok(f64::NAN),
        Err(e) => Err(e),
    }
}

fn assemble(
    id: TheoremId,
    point: ParamPoint,
    lhs: Estimate,
    rhs: Estimate,
    hypothesis: Hypothesis,
    tol: f64,
) -> BoundReport {
    let quad_error = lhs.error + rhs.error;
    let tol_compare = tol.max(10.0 * quad_error);
    let margin = if id == TheoremId::Lemma21 {
        -(rhs.value - lhs.value).abs()
    } else if id.is_lower_bound() {
        lhs.value - rhs.value
    } else {
        rhs.value - lhs.value
    };
    let outcome = if !hypothesis.status.admits() {
        Outcome::NotApplicable
    } else if margin >= -tol_compare {
        Outcome::Holds
    } else {
        Outcome::Fails
    };
    BoundReport {
        theorem_id: id,
        point,
        lhs: lhs.value,
        rhs: rhs.value,
        margin,
        hypothesis,
        outcome,
        quad_error,
        tol_compare,
    }
}

fn eval_err(what: &'static str) -> impl Fn(EvalError) -> BoundError {
    move |source| BoundError::Eval { what, source }
}

/// Endpoint derivative data for the single-function statements.
pub fn single_data(f: &Expression, pt: &ParamPoint, ctx: MeanContext) -> Result<SingleData, BoundError> {
    let e = eval_err("endpoint derivative");
    Ok(SingleData {
        alpha: pt.alpha,
        m: pt.m,
        q: pt.q,
        p: pt.p,
        ctx,
        deriv_root: libm::fabs(f.derivative(pt.a_root()).map_err(&e)?),
        deriv_b: libm::fabs(f.derivative(pt.b).map_err(&e)?),
    })
}

/// Endpoint values for the product statements.
pub fn product_data(
    f: &Expression,
    g: &Expression,
    pt: &ParamPoint,
    ctx: MeanContext,
) -> Result<ProductData, BoundError> {
    let e = eval_err("endpoint value");
    let (alpha2, m2) = pt.second();
    Ok(ProductData {
        alpha1: pt.alpha,
        m1: pt.m,
        alpha2,
        m2,
        q: pt.q,
        ctx,
        f_root: f.eval(pt.a_root()).map_err(&e)?,
        f_b: f.eval(pt.b).map_err(&e)?,
        g_root: g.eval(pt.a_root2()).map_err(&e)?,
        g_b: g.eval(pt.b).map_err(&e)?,
    })
}

/// A corollary's closed form compared with the general statement evaluated
/// at the same point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrossCheck {
    pub corollary: TheoremId,
    pub parent: TheoremId,
    pub corollary_rhs: f64,
    pub parent_rhs: f64,
    pub rel_diff: f64,
    pub agrees: bool,
}

/// Compare each admitted corollary with its parent at `pt`. The two
/// relaxed forms of the first bound are inequalities, not specializations,
/// and are skipped.
pub fn corollary_crosschecks(
    f: &Expression,
    g: Option<&Expression>,
    pt: &ParamPoint,
) -> Result<Vec<CrossCheck>, BoundError> {
    let ctx = MeanContext::new(pt.a, pt.b)?;
    let mut out = Vec::new();
    for id in TheoremId::admitted(pt, g.is_some()) {
        let Some(parent) = id.parent() else { continue };
        if matches!(id, TheoremId::Cor31_3a | TheoremId::Cor31_3b) {
            continue;
        }
        let (cor, par) = if id.is_product() {
            let d = product_data(f, g.expect("admitted"), pt, ctx)?;
            (product_rhs(id, &d)?, product_rhs(parent, &d)?)
        } else {
            let d = single_data(f, pt, ctx)?;
            (single_rhs(id, &d)?, single_rhs(parent, &d)?)
        };
        let rel_diff = relative_difference(cor, par);
        out.push(CrossCheck {
            corollary: id,
            parent,
            corollary_rhs: cor,
            parent_rhs: par,
            rel_diff,
            agrees: rel_diff <= CROSSCHECK_TOL,
        });
    }
    Ok(out)
}

/// `|x − y| / max(|x|, |y|)`, zero when both vanish.
pub fn relative_difference(x: f64, y: f64) -> f64 {
    let scale = x.abs().max(y.abs());
    if scale == 0.0 {
        0.0
    } else {
        (x - y).abs() / scale
    }
}
