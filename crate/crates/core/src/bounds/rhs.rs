//! Right-hand sides as plain functions of the endpoint data.
//!
//! `c` is `ln b − ln a` throughout, `L_ℓ = L(a^ℓ, b^ℓ)` and `G(α, ℓ)` is
//! the weighted interpolation integral. Corollaries are evaluated in their
//! own closed forms, never through the general statement.

use super::theorem::TheoremId;
use crate::means::{g_series, log_mean, MeanContext, MeanError};

/// `base^e`, with `e = 0` giving exactly 1 regardless of `base`.
pub(crate) fn pow_or_one(base: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else {
        libm::pow(base, e)
    }
}

/// `1 − 1/q`, exactly 0 at `q = 1`.
pub(crate) fn conj_exp(q: f64) -> f64 {
    if q == 1.0 {
        0.0
    } else {
        1.0 - 1.0 / q
    }
}

fn powq(v: f64, q: f64) -> f64 {
    if q == 1.0 {
        v
    } else {
        libm::pow(v, q)
    }
}

/// Data for the bounds on `|f|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleData {
    pub alpha: f64,
    pub m: f64,
    pub q: f64,
    pub p: Option<f64>,
    pub ctx: MeanContext,
    /// `|f'(a^{1/m})|`.
    pub deriv_root: f64,
    /// `|f'(b)|`.
    pub deriv_b: f64,
}

impl SingleData {
    /// `|f'(a^{1/m})|^q`.
    pub fn root_q(&self) -> f64 {
        powq(self.deriv_root, self.q)
    }

    /// `|f'(b)|^q`.
    pub fn b_q(&self) -> f64 {
        powq(self.deriv_b, self.q)
    }

    /// The extra requirement of the two relaxed forms of the first bound:
    /// `|f'(b)|^q ≥ m·|f'(a^{1/m})|^q`, up to rounding.
    pub fn relaxation_admissible(&self) -> bool {
        let (lhs, rhs) = (self.b_q(), self.m * self.root_q());
        lhs - rhs >= -1e-12 * lhs.max(rhs)
    }

    fn pow_ell(&self, ell: f64) -> (f64, f64) {
        (
            libm::pow(self.ctx.a(), ell),
            libm::pow(self.ctx.b(), ell),
        )
    }

    /// `m[L_ℓ − G(α,ℓ)]·A + G(α,ℓ)·B`.
    fn g_brace(&self, ell: f64) -> Result<f64, MeanError> {
        let l = self.ctx.log_mean_pow(ell)?;
        let g = g_series(self.alpha, ell, &self.ctx)?;
        Ok(self.m * (l - g) * self.root_q() + g * self.b_q())
    }

    /// `m[L_ℓ − a^ℓ]·A + [b^ℓ − L_ℓ]·B`, the brace with `G(1,ℓ)` eliminated.
    fn closed_brace(&self, ell: f64) -> Result<f64, MeanError> {
        let l = self.ctx.log_mean_pow(ell)?;
        let (al, bl) = self.pow_ell(ell);
        Ok(self.m * (l - al) * self.root_q() + (bl - l) * self.b_q())
    }

    fn half_c(&self) -> f64 {
        0.5 * self.ctx.ln_ratio()
    }

    fn p(&self) -> f64 {
        self.p.unwrap_or(f64::NAN)
    }
}

/// Right-hand side of a single-function statement.
pub fn single_rhs(id: TheoremId, d: &SingleData) -> Result<f64, MeanError> {
    use TheoremId::*;
    let q = d.q;
    let inv_q = 1.0 / q;
    let conj = conj_exp(q);
    let c = d.ctx.ln_ratio();
    Ok(match id {
        Thm31 => {
            let l3 = d.ctx.log_mean_pow(3.0)?;
            d.half_c() * pow_or_one(l3, conj) * pow_or_one_inv(d.g_brace(3.0)?, q)
        }
        Cor31_1 => d.half_c() * d.g_brace(3.0)?,
        Cor31_2 => {
            let (a3, b3) = d.pow_ell(3.0);
            pow_or_one(b3 - a3, conj) / 6.0 * pow_or_one_inv(d.closed_brace(3.0)?, q)
        }
        Cor31_3a => {
            let l3 = d.ctx.log_mean_pow(3.0)?;
            let (_, b3) = d.pow_ell(3.0);
            let brace =
                d.m * ((d.alpha + 1.0) * l3 - b3) * d.root_q() + b3 * d.b_q();
            d.half_c()
                * pow_or_one(l3, conj)
                * libm::pow(1.0 / (d.alpha + 1.0), inv_q)
                * pow_or_one_inv(brace, q)
        }
        Cor31_3b => d.half_c() * d.ctx.log_mean_pow(3.0)? * d.deriv_b,
        Thm32 | Cor32 => {
            let r = 3.0 * q / (q - 1.0);
            let lr = d.ctx.log_mean_pow(r)?;
            let (prefactor, weight) = if id == Thm32 {
                (d.half_c() * libm::pow(1.0 / (d.alpha + 1.0), inv_q), d.alpha * d.m)
            } else {
                (c / libm::pow(2.0, 1.0 + inv_q), d.m)
            };
            prefactor * libm::pow(lr, conj) * libm::pow(d.b_q() + weight * d.root_q(), inv_q)
        }
        Thm33 => d.half_c() * libm::pow(d.g_brace(3.0 * q)?, inv_q),
        Cor33 => {
            libm::pow(c, conj) / 2.0
                * libm::pow(1.0 / (3.0 * q), inv_q)
                * libm::pow(d.closed_brace(3.0 * q)?, inv_q)
        }
        Thm34 => {
            let ls = d.ctx.log_mean_pow(3.0 * (q - d.p()) / (q - 1.0))?;
            d.half_c() * libm::pow(ls, conj) * libm::pow(d.g_brace(3.0 * d.p())?, inv_q)
        }
        Cor34 => {
            let ls = d.ctx.log_mean_pow(3.0 * (q - d.p()) / (q - 1.0))?;
            libm::pow(c, conj) / 2.0
                * libm::pow(1.0 / (3.0 * d.p()), inv_q)
                * libm::pow(ls, conj)
                * libm::pow(d.closed_brace(3.0 * d.p())?, inv_q)
        }
        _ => f64::NAN,
    })
}

/// `v^{1/q}`, the identity at `q = 1`.
fn pow_or_one_inv(v: f64, q: f64) -> f64 {
    if q == 1.0 {
        v
    } else {
        libm::pow(v, 1.0 / q)
    }
}

/// Data for the statements on `∫ f·g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductData {
    pub alpha1: f64,
    pub m1: f64,
    pub alpha2: f64,
    pub m2: f64,
    pub q: f64,
    pub ctx: MeanContext,
    /// `f(a^{1/m1})`.
    pub f_root: f64,
    pub f_b: f64,
    /// `g(a^{1/m2})`.
    pub g_root: f64,
    pub g_b: f64,
}

impl ProductData {
    /// The four-term brace shared by the product and concave statements,
    /// with `f` and `g` raised to `power`.
    fn four_term(&self, power: f64) -> Result<f64, MeanError> {
        let ctx = &self.ctx;
        let l = log_mean(ctx.a(), ctx.b())?;
        let g1 = g_series(self.alpha1, 1.0, ctx)?;
        let g2 = g_series(self.alpha2, 1.0, ctx)?;
        let g12 = g_series(self.alpha1 + self.alpha2, 1.0, ctx)?;
        let (p, qq) = (powq(self.f_root, power), powq(self.f_b, power));
        let (r, s) = (powq(self.g_root, power), powq(self.g_b, power));
        Ok(self.m1 * self.m2 * (l - g1 - g2 + g12) * p * r
            + self.m1 * (g2 - g12) * p * s
            + self.m2 * (g1 - g12) * qq * r
            + g12 * qq * s)
    }

    /// The all-ones bracket with `G(1,1)` and `G(2,1)` eliminated:
    /// `[2L − ac − 2a]·FaGa + [a + b − 2L]·(FaGb + FbGa) + [2L + bc − 2b]·FbGb`.
    fn ones_bracket(&self, power: f64) -> Result<f64, MeanError> {
        let ctx = &self.ctx;
        let (a, b, c) = (ctx.a(), ctx.b(), ctx.ln_ratio());
        let l = log_mean(a, b)?;
        let (fa, fb) = (powq(self.f_root, power), powq(self.f_b, power));
        let (ga, gb) = (powq(self.g_root, power), powq(self.g_b, power));
        Ok((2.0 * l - a * c - 2.0 * a) * fa * ga
            + (a + b - 2.0 * l) * (fa * gb + fb * ga)
            + (2.0 * l + b * c - 2.0 * b) * fb * gb)
    }

    /// `m·h(a^{1/m})·L + G(α,1)·[h(b) − m·h(a^{1/m})]` for one factor.
    fn split_brace(alpha: f64, m: f64, h_root: f64, h_b: f64, ctx: &MeanContext) -> Result<f64, MeanError> {
        let l = log_mean(ctx.a(), ctx.b())?;
        let g = g_series(alpha, 1.0, ctx)?;
        Ok(m * h_root * l + g * (h_b - m * h_root))
    }

    /// `h(a)·[L − a] + [b − L]·h(b)`.
    fn split_closed(h_a: f64, h_b: f64, ctx: &MeanContext) -> Result<f64, MeanError> {
        let l = log_mean(ctx.a(), ctx.b())?;
        Ok(h_a * (l - ctx.a()) + (ctx.b() - l) * h_b)
    }
}

/// Right-hand side of a product statement.
pub fn product_rhs(id: TheoremId, d: &ProductData) -> Result<f64, MeanError> {
    use TheoremId::*;
    let q = d.q;
    let inv_q = 1.0 / q;
    let conj = conj_exp(q);
    let ctx = &d.ctx;
    let c = ctx.ln_ratio();
    let l = log_mean(ctx.a(), ctx.b())?;
    Ok(match id {
        Thm35 => c * pow_or_one(l, conj) * pow_or_one_inv(d.four_term(q)?, q),
        Cor35_1 => c * d.four_term(1.0)?,
        Cor35_2 => d.ones_bracket(1.0)? / c,
        // Printed prefactor, evaluated as written.
        Cor35_3 => {
            libm::pow(l, conj) / libm::pow(c, 2.0 / (q - 1.0))
                * libm::pow(d.ones_bracket(q)?, inv_q)
        }
        Thm36 | Cor36 => {
            let r = q / (q - 1.0);
            let (f_brace, g_brace) = if id == Thm36 {
                (
                    ProductData::split_brace(d.alpha1, d.m1, powq(d.f_root, q), powq(d.f_b, q), ctx)?,
                    ProductData::split_brace(d.alpha2, d.m2, powq(d.g_root, r), powq(d.g_b, r), ctx)?,
                )
            } else {
                (
                    ProductData::split_closed(powq(d.f_root, q), powq(d.f_b, q), ctx)?,
                    ProductData::split_closed(powq(d.g_root, r), powq(d.g_b, r), ctx)?,
                )
            };
            let prefactor = if id == Thm36 { c } else { 1.0 };
            prefactor * libm::pow(f_brace, inv_q) * libm::pow(g_brace, conj)
        }
        Thm37 => c * d.four_term(1.0)?,
        // Printed prefactor, evaluated as written.
        Cor37 => c * d.ones_bracket(1.0)?,
        _ => f64::NAN,
    })
}
