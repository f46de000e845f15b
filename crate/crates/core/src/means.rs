//! The logarithmic mean and the weighted geometric-interpolation integral
//!
//! ```text
//! L(x, y)  = (y − x) / (ln y − ln x)
//! G(α, ℓ)  = ∫₀¹ t^α a^{ℓ(1−t)} b^{ℓt} dt
//! ```
//!
//! `G` has two independent evaluators: a positive-term series and direct
//! quadrature. They are meant to cross-check each other.

use crate::quad::{self, QuadOptions, TryQuadError};
use core::convert::Infallible;

/// Below this `|ln(y/x)|` the logarithmic mean switches to its Taylor series.
const SERIES_THRESHOLD: f64 = 1e-6;
/// Above this `c = ℓ·ln(b/a)` the series is replaced by quadrature.
const SERIES_MAX_C: f64 = 500.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeanError {
    #[error("logarithmic mean needs positive finite arguments, got ({x}, {y})")]
    NonPositive { x: f64, y: f64 },
    #[error("need 0 < a < b (finite), got a = {a}, b = {b}")]
    InvalidInterval { a: f64, b: f64 },
    #[error("need alpha >= 0 and ell >= 0 (finite), got alpha = {alpha}, ell = {ell}")]
    InvalidParameter { alpha: f64, ell: f64 },
    #[error("quadrature failed: {0}")]
    Quadrature(quad::QuadError),
    #[error("quadrature did not converge (estimate {value}, error {error})")]
    NotConverged { value: f64, error: f64 },
}

/// Logarithmic mean of two positive numbers.
///
/// Symmetric bit-for-bit, equal to `x` on the diagonal, and accurate to a
/// few ulps when `y` is close to `x`.
pub fn log_mean(x: f64, y: f64) -> Result<f64, MeanError> {
    if !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite()) {
        return Err(MeanError::NonPositive { x, y });
    }
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    if lo == hi {
        return Ok(lo);
    }
    let ratio = hi / lo;
    let u = if ratio.is_finite() {
        libm::log(ratio)
    } else {
        libm::log(hi) - libm::log(lo)
    };
    Ok(if u < SERIES_THRESHOLD {
        let u2 = u * u;
        libm::sqrt(lo) * libm::sqrt(hi) * (1.0 + u2 / 24.0 + 7.0 * u2 * u2 / 5760.0)
    } else if u < 1.0 {
        lo * (libm::expm1(u) / u)
    } else {
        (hi - lo) / u
    })
}

/// The interval `0 < a < b` shared by every `G(α, ℓ)` evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanContext {
    a: f64,
    b: f64,
    ln_ratio: f64,
}

impl MeanContext {
    pub fn new(a: f64, b: f64) -> Result<Self, MeanError> {
        if !(a > 0.0 && a < b && b.is_finite()) {
            return Err(MeanError::InvalidInterval { a, b });
        }
        Ok(Self {
            a,
            b,
            ln_ratio: libm::log(b) - libm::log(a),
        })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `ln b − ln a`.
    pub fn ln_ratio(&self) -> f64 {
        self.ln_ratio
    }

    /// `c(ℓ) = ℓ·(ln b − ln a)`.
    pub fn c(&self, ell: f64) -> f64 {
        ell * self.ln_ratio
    }

    /// `L(a^ℓ, b^ℓ)`.
    pub fn log_mean_pow(&self, ell: f64) -> Result<f64, MeanError> {
        log_mean(libm::pow(self.a, ell), libm::pow(self.b, ell))
    }
}

fn check_params(alpha: f64, ell: f64) -> Result<(), MeanError> {
    if alpha >= 0.0 && ell >= 0.0 && alpha.is_finite() && ell.is_finite() {
        Ok(())
    } else {
        Err(MeanError::InvalidParameter { alpha, ell })
    }
}

/// `G(α, ℓ)` from `a^ℓ·Σ_k c^k / (k!·(α+k+1))` with `c = ℓ·ln(b/a)`.
///
/// All terms are positive. For `c > 500` the `c^k/k!` intermediates would
/// overflow, so the value comes from quadrature of the rescaled integrand
/// `b^ℓ·t^α·e^{−c(1−t)}` over panels that resolve the boundary layer at 1.
pub fn g_series(alpha: f64, ell: f64, ctx: &MeanContext) -> Result<f64, MeanError> {
    check_params(alpha, ell)?;
    let c = ctx.c(ell);
    if c > SERIES_MAX_C {
        return g_boundary_layer(alpha, ell, c, ctx);
    }
    let mut sum = 1.0 / (alpha + 1.0);
    let mut power = 1.0; // c^k / k!
    let mut k = 0.0;
    loop {
        k += 1.0;
        power *= c / k;
        let term = power / (alpha + k + 1.0);
        if term < 1e-17 * sum || k > 10_000.0 {
            break;
        }
        sum += term;
    }
    Ok(libm::pow(ctx.a, ell) * sum)
}

fn g_boundary_layer(alpha: f64, ell: f64, c: f64, ctx: &MeanContext) -> Result<f64, MeanError> {
    let mut points = [0.0; 9];
    let widths = [256.0, 64.0, 32.0, 16.0, 8.0, 4.0, 2.0, 1.0];
    for (slot, w) in points[1..].iter_mut().zip(widths) {
        *slot = (1.0 - w / c).max(0.0);
    }
    points[8] = 1.0;
    let opts = QuadOptions::default();
    let r = quad::try_integrate_points(
        |t| Ok::<f64, Infallible>(libm::pow(t, alpha) * libm::exp(-c * (1.0 - t))),
        &points,
        &opts,
    )
    .map_err(flatten)?;
    if !r.converged {
        return Err(MeanError::NotConverged {
            value: r.value,
            error: r.error_estimate,
        });
    }
    Ok(libm::pow(ctx.b, ell) * r.value)
}

fn flatten(e: TryQuadError<Infallible>) -> MeanError {
    match e {
        TryQuadError::Quad(q) => MeanError::Quadrature(q),
        TryQuadError::Integrand { source, .. } => match source {},
    }
}

/// `G(α, ℓ)` by direct quadrature of `t^α a^{ℓ(1−t)} b^{ℓt}` on `[0, 1]`.
///
/// Returns the quadrature result so callers see the error estimate.
pub fn g_quad(
    alpha: f64,
    ell: f64,
    ctx: &MeanContext,
    opts: &QuadOptions,
) -> Result<quad::QuadResult, MeanError> {
    check_params(alpha, ell)?;
    let (a, b) = (ctx.a, ctx.b);
    let r = quad::integrate(
        |t| libm::pow(t, alpha) * libm::pow(a, ell * (1.0 - t)) * libm::pow(b, ell * t),
        0.0,
        1.0,
        opts,
    )
    .map_err(MeanError::Quadrature)?;
    if !r.converged {
        return Err(MeanError::NotConverged {
            value: r.value,
            error: r.error_estimate,
        });
    }
    Ok(r)
}

/// Closed form `G(1, ℓ) = (b^ℓ − L(a^ℓ, b^ℓ)) / (ℓ·(ln b − ln a))`, `ℓ > 0`.
pub fn g_alpha_one(ell: f64, ctx: &MeanContext) -> Result<f64, MeanError> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(MeanError::InvalidParameter { alpha: 1.0, ell });
    }
    let bl = libm::pow(ctx.b, ell);
    Ok((bl - ctx.log_mean_pow(ell)?) / ctx.c(ell))
}
