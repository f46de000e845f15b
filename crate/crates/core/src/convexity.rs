//! Sampling checks for (α,m)-GA-convexity and ordinary (α,m)-convexity.
//!
//! For the GA kind the defining inequality is
//!
//! ```text
//! f(x^λ · y^{m(1−λ)}) ≤ λ^α f(x) + m(1 − λ^α) f(y)
//! ```
//!
//! and for the ordinary kind the left argument is `λx + m(1−λ)y`. The
//! concave direction reverses the inequality. `gap` is always oriented so
//! that a positive value is a violation.
//!
//! A certified verdict is a sampling certificate, not a proof: no violation
//! was found on the λ-grid `{i/64}` crossed with `samples` log-uniform
//! `(x, y)` pairs drawn from a seeded ChaCha generator.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::expr::{EvalError, Expression};

/// Numerical stand-in for the closed left end 0 of the domain.
pub const DEFAULT_DOMAIN_LO: f64 = 1e-12;
/// A gap above `VIOLATION_TOL · max(1, |lhs|, |rhs|)` is a violation.
pub const VIOLATION_TOL: f64 = 1e-9;
pub const LAMBDA_STEPS: usize = 64;
pub const DEFAULT_SAMPLES: usize = 256;
pub const DEFAULT_SEED: u64 = 42;

const REFINE_SWEEPS: usize = 20;
const GOLDEN_STEPS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Geometric mean in the domain, arithmetic in the range.
    Ga,
    /// Arithmetic mean in both.
    Ordinary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexitySpec {
    pub kind: Kind,
    pub alpha: f64,
    pub m: f64,
    pub domain_lo: f64,
    pub domain_hi: f64,
    pub direction: Direction,
}

impl ConvexitySpec {
    /// GA-convexity on `(DEFAULT_DOMAIN_LO, hi]`.
    pub fn ga(alpha: f64, m: f64, hi: f64) -> Self {
        Self {
            kind: Kind::Ga,
            alpha,
            m,
            domain_lo: DEFAULT_DOMAIN_LO,
            domain_hi: hi,
            direction: Direction::Convex,
        }
    }

    pub fn concave(mut self) -> Self {
        self.direction = Direction::Concave;
        self
    }

    pub fn validate(&self) -> Result<(), ConvexityError> {
        let unit = |v: f64| (0.0..=1.0).contains(&v);
        if !(unit(self.alpha) && unit(self.m)) {
            return Err(ConvexityError::InvalidSpec {
                reason: "(alpha, m) must lie in [0, 1]^2",
            });
        }
        if !(self.domain_lo > 0.0 && self.domain_lo < self.domain_hi && self.domain_hi.is_finite())
        {
            return Err(ConvexityError::InvalidSpec {
                reason: "need 0 < domain_lo < domain_hi < inf",
            });
        }
        Ok(())
    }

    fn point(&self, x: f64, y: f64, lambda: f64) -> f64 {
        match self.kind {
            Kind::Ga => libm::pow(x, lambda) * libm::pow(y, self.m * (1.0 - lambda)),
            Kind::Ordinary => lambda * x + self.m * (1.0 - lambda) * y,
        }
    }
}

/// A triple at which the defining inequality was evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Witness {
    pub x: f64,
    pub y: f64,
    pub lambda: f64,
    /// `f` at the mean point.
    pub lhs: f64,
    /// `λ^α f(x) + m(1 − λ^α) f(y)`.
    pub rhs: f64,
    /// `lhs − rhs` for convex, `rhs − lhs` for concave.
    pub gap: f64,
}

impl Witness {
    pub fn violates(&self) -> bool {
        self.gap > violation_threshold(self.lhs, self.rhs)
    }
}

fn violation_threshold(lhs: f64, rhs: f64) -> f64 {
    VIOLATION_TOL * 1f64.max(lhs.abs()).max(rhs.abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Certified,
    Violated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexityVerdict {
    pub status: Status,
    pub samples_checked: usize,
    /// Largest gap seen while scanning (before refinement).
    pub max_gap: f64,
    pub witness: Option<Witness>,
}

impl ConvexityVerdict {
    pub fn is_certified(&self) -> bool {
        self.status == Status::Certified
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConvexityError {
    #[error("invalid convexity spec: {reason}")]
    InvalidSpec { reason: &'static str },
    #[error("power q = {q} is not allowed here")]
    InvalidPower { q: f64 },
    #[error("function evaluation failed at x = {x:e}: {source}")]
    Eval { x: f64, source: EvalError },
    #[error("function is negative at x = {x:e} (value {value})")]
    Negative { x: f64, value: f64 },
}

/// Check `f` itself.
pub fn check(
    f: &Expression,
    spec: &ConvexitySpec,
    samples: usize,
    seed: u64,
) -> Result<ConvexityVerdict, ConvexityError> {
    check_fn(
        |x| f.eval(x).map_err(|source| ConvexityError::Eval { x, source }),
        spec,
        samples,
        seed,
    )
}

/// Check `x ↦ |f'(x)|^q`, `q ≥ 1`.
pub fn check_power_of_abs_deriv(
    f: &Expression,
    q: f64,
    spec: &ConvexitySpec,
    samples: usize,
    seed: u64,
) -> Result<ConvexityVerdict, ConvexityError> {
    if !(q >= 1.0 && q.is_finite()) {
        return Err(ConvexityError::InvalidPower { q });
    }
    check_fn(|x| abs_deriv_pow(f, q, x), spec, samples, seed)
}

/// Check `x ↦ f(x)^q` for a nonnegative `f`, `q > 0`.
pub fn check_power(
    f: &Expression,
    q: f64,
    spec: &ConvexitySpec,
    samples: usize,
    seed: u64,
) -> Result<ConvexityVerdict, ConvexityError> {
    if !(q > 0.0 && q.is_finite()) {
        return Err(ConvexityError::InvalidPower { q });
    }
    check_fn(|x| nonneg_pow(f, q, x), spec, samples, seed)
}

pub fn abs_deriv_pow(f: &Expression, q: f64, x: f64) -> Result<f64, ConvexityError> {
    let d = f
        .derivative(x)
        .map_err(|source| ConvexityError::Eval { x, source })?;
    Ok(libm::pow(libm::fabs(d), q))
}

pub fn nonneg_pow(f: &Expression, q: f64, x: f64) -> Result<f64, ConvexityError> {
    let v = f.eval(x).map_err(|source| ConvexityError::Eval { x, source })?;
    if v < 0.0 {
        return Err(ConvexityError::Negative { x, value: v });
    }
    Ok(if q == 1.0 { v } else { libm::pow(v, q) })
}

/// Evaluate the defining inequality at one triple.
pub fn evaluate_triple<F>(
    f: F,
    spec: &ConvexitySpec,
    x: f64,
    y: f64,
    lambda: f64,
) -> Result<Witness, ConvexityError>
where
    F: Fn(f64) -> Result<f64, ConvexityError>,
{
    let fx = f(x)?;
    let fy = f(y)?;
    triple(&f, spec, x, y, lambda, fx, fy)
}

fn triple<F>(
    f: &F,
    spec: &ConvexitySpec,
    x: f64,
    y: f64,
    lambda: f64,
    fx: f64,
    fy: f64,
) -> Result<Witness, ConvexityError>
where
    F: Fn(f64) -> Result<f64, ConvexityError>,
{
    let lhs = f(spec.point(x, y, lambda))?;
    let w = libm::pow(lambda, spec.alpha);
    let rhs = w * fx + spec.m * (1.0 - w) * fy;
    let gap = match spec.direction {
        Direction::Convex => lhs - rhs,
        Direction::Concave => rhs - lhs,
    };
    Ok(Witness {
        x,
        y,
        lambda,
        lhs,
        rhs,
        gap,
    })
}

/// Check an arbitrary fallible function.
pub fn check_fn<F>(
    f: F,
    spec: &ConvexitySpec,
    samples: usize,
    seed: u64,
) -> Result<ConvexityVerdict, ConvexityError>
where
    F: Fn(f64) -> Result<f64, ConvexityError>,
{
    spec.validate()?;
    let ln_lo = libm::log(spec.domain_lo);
    let ln_hi = libm::log(spec.domain_hi);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0usize;
    let mut max_gap = f64::NEG_INFINITY;
    for _ in 0..samples {
        let u: f64 = rng.gen();
        let v: f64 = rng.gen();
        let x = log_uniform(ln_lo, ln_hi, u, spec);
        let y = log_uniform(ln_lo, ln_hi, v, spec);
        let fx = f(x)?;
        let fy = f(y)?;
        for i in 0..=LAMBDA_STEPS {
            let lambda = i as f64 / LAMBDA_STEPS as f64;
            let w = triple(&f, spec, x, y, lambda, fx, fy)?;
            checked += 1;
            max_gap = max_gap.max(w.gap);
            if w.violates() {
                let refined = refine(&f, spec, w);
                return Ok(ConvexityVerdict {
                    status: Status::Violated,
                    samples_checked: checked,
                    max_gap,
                    witness: Some(refined),
                });
            }
        }
    }
    Ok(ConvexityVerdict {
        status: Status::Certified,
        samples_checked: checked,
        max_gap,
        witness: None,
    })
}

fn log_uniform(ln_lo: f64, ln_hi: f64, u: f64, spec: &ConvexitySpec) -> f64 {
    libm::exp(ln_lo + u * (ln_hi - ln_lo)).clamp(spec.domain_lo, spec.domain_hi)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Coordinate-wise golden-section ascent on the gap over `(ln x, ln y, λ)`.
/// Only strict improvements are accepted, so the result still violates.
fn refine<F>(f: &F, spec: &ConvexitySpec, start: Witness) -> Witness
where
    F: Fn(f64) -> Result<f64, ConvexityError>,
{
    let ln_lo = libm::log(spec.domain_lo);
    let ln_hi = libm::log(spec.domain_hi);
    let eval = |c: [f64; 3]| -> Option<Witness> {
        let x = libm::exp(c[0]).clamp(spec.domain_lo, spec.domain_hi);
        let y = libm::exp(c[1]).clamp(spec.domain_lo, spec.domain_hi);
        let w = evaluate_triple(f, spec, x, y, c[2]).ok()?;
        w.gap.is_finite().then_some(w)
    };
    let mut best = start;
    let mut coords = [libm::log(start.x), libm::log(start.y), start.lambda];
    let bounds = [(ln_lo, ln_hi), (ln_lo, ln_hi), (0.0, 1.0)];
    for _ in 0..REFINE_SWEEPS {
        let before = best.gap;
        for (axis, &(lo, hi)) in bounds.iter().enumerate() {
            let score = |t: f64| {
                let mut c = coords;
                c[axis] = t;
                eval(c).map_or(f64::NEG_INFINITY, |w| w.gap)
            };
            let (mut a, mut b) = (lo, hi);
            let mut c1 = b - INV_PHI * (b - a);
            let mut c2 = a + INV_PHI * (b - a);
            let mut s1 = score(c1);
            let mut s2 = score(c2);
            for _ in 0..GOLDEN_STEPS {
                if s1 >= s2 {
                    b = c2;
                    c2 = c1;
                    s2 = s1;
                    c1 = b - INV_PHI * (b - a);
                    s1 = score(c1);
                } else {
                    a = c1;
                    c1 = c2;
                    s1 = s2;
                    c2 = a + INV_PHI * (b - a);
                    s2 = score(c2);
                }
            }
            let mut c = coords;
            c[axis] = 0.5 * (a + b);
            if let Some(w) = eval(c) {
                if w.gap > best.gap {
                    best = w;
                    coords = c;
                }
            }
        }
        if best.gap <= before {
            break;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn expr(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    #[test]
    fn identity_is_ga_convex() {
        let v = check(&expr("x"), &ConvexitySpec::ga(1.0, 1.0, 4.0), 256, 42).unwrap();
        assert_eq!(v.status, Status::Certified);
        assert_eq!(v.samples_checked, 256 * 65);
    }

    #[test]
    fn negated_identity_violates_am_gm() {
        let spec = ConvexitySpec::ga(1.0, 1.0, 4.0);
        let f = expr("-x");
        let at = evaluate_triple(|x| f.eval(x).map_err(|source| ConvexityError::Eval { x, source }), &spec, 1.0, 4.0, 0.5)
            .unwrap();
        assert_eq!((at.lhs, at.rhs, at.gap), (-2.0, -2.5, 0.5));

        let v = check(&f, &spec, 256, 42).unwrap();
        assert_eq!(v.status, Status::Violated);
        let w = v.witness.unwrap();
        assert!(w.gap >= 0.5, "refined gap {}", w.gap);
    }

    #[test]
    fn constant_violates_at_lambda_zero_when_m_below_one() {
        let v = check(&expr("1"), &ConvexitySpec::ga(1.0, 0.5, 4.0), 256, 42).unwrap();
        let w = v.witness.unwrap();
        assert_eq!(w.lambda, 0.0);
        assert_eq!((w.lhs, w.rhs, w.gap), (1.0, 0.5, 0.5));
    }

    #[test]
    fn negative_log_is_ga_affine() {
        let spec = ConvexitySpec::ga(1.0, 1.0, 4.0);
        assert!(check(&expr("-ln(x)"), &spec, 256, 42).unwrap().is_certified());
        assert!(check(&expr("-ln(x)"), &spec.concave(), 256, 42)
            .unwrap()
            .is_certified());
    }

    #[test]
    fn derivative_power_examples() {
        let spec = ConvexitySpec::ga(1.0, 1.0, 4.0);
        assert!(check_power_of_abs_deriv(&expr("x"), 2.0, &spec, 64, 42)
            .unwrap()
            .is_certified());
        assert!(check_power_of_abs_deriv(&expr("x^2/2"), 1.0, &spec, 64, 42)
            .unwrap()
            .is_certified());
        assert!(matches!(
            check_power_of_abs_deriv(&expr("x"), 0.5, &spec, 64, 42),
            Err(ConvexityError::InvalidPower { .. })
        ));
    }

    #[test]
    fn power_rejects_negative_values() {
        let spec = ConvexitySpec::ga(1.0, 1.0, 4.0);
        assert!(matches!(
            check_power(&expr("x - 1"), 2.0, &spec, 16, 42),
            Err(ConvexityError::Negative { .. })
        ));
    }

    #[test]
    fn domain_errors_carry_the_point() {
        let spec = ConvexitySpec {
            kind: Kind::Ordinary,
            ..ConvexitySpec::ga(1.0, 0.0, 4.0)
        };
        // λ = 0 with m = 0 evaluates at the origin.
        match check(&expr("ln(x)"), &spec, 4, 1) {
            Err(ConvexityError::Eval { x, .. }) => assert_eq!(x, 0.0),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn spec_validation() {
        assert!(ConvexitySpec::ga(1.5, 1.0, 4.0).validate().is_err());
        assert!(ConvexitySpec::ga(0.0, 0.0, 4.0).validate().is_ok());
        let mut s = ConvexitySpec::ga(1.0, 1.0, 4.0);
        s.domain_lo = 5.0;
        assert!(s.validate().is_err());
    }

    #[test]
    fn ordinary_kind_on_square() {
        let spec = ConvexitySpec {
            kind: Kind::Ordinary,
            ..ConvexitySpec::ga(1.0, 1.0, 4.0)
        };
        assert!(check(&expr("x^2"), &spec, 64, 42).unwrap().is_certified());
        assert!(!check(&expr("sqrt(x)"), &spec, 64, 42).unwrap().is_certified());
    }
}
