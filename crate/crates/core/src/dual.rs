//! Forward-mode dual numbers `value + deriv·ε` with `ε² = 0`.
//!
//! Only the operations the expression language needs are provided. Every
//! transcendental uses the same `libm` routine as plain evaluation, so the
//! value part of a dual computation is bit-identical to the real one.

use core::ops::{Add, Div, Mul, Neg, Sub};

/// A value paired with its derivative with respect to the expression variable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub deriv: f64,
}

impl Dual {
    pub const fn new(value: f64, deriv: f64) -> Self {
        Self { value, deriv }
    }

    /// The independent variable at `x` (derivative 1).
    pub const fn variable(x: f64) -> Self {
        Self::new(x, 1.0)
    }

    pub const fn constant(c: f64) -> Self {
        Self::new(c, 0.0)
    }

    pub fn ln(self) -> Self {
        Self::new(libm::log(self.value), self.deriv / self.value)
    }

    pub fn exp(self) -> Self {
        let v = libm::exp(self.value);
        Self::new(v, v * self.deriv)
    }

    pub fn sqrt(self) -> Self {
        let v = libm::sqrt(self.value);
        Self::new(v, self.deriv / (2.0 * v))
    }

    /// `|u|` with `d|u| = sign(u)·du`, where `sign(0) = 0`.
    pub fn abs(self) -> Self {
        let sign = if self.value > 0.0 {
            1.0
        } else if self.value < 0.0 {
            -1.0
        } else {
            0.0
        };
        Self::new(libm::fabs(self.value), sign * self.deriv)
    }

    pub fn sin(self) -> Self {
        Self::new(libm::sin(self.value), libm::cos(self.value) * self.deriv)
    }

    pub fn cos(self) -> Self {
        Self::new(libm::cos(self.value), -libm::sin(self.value) * self.deriv)
    }

    /// `u^n` for an exponent known to be a constant integer.
    pub fn powi_const(self, n: f64) -> Self {
        let v = libm::pow(self.value, n);
        let d = if n == 0.0 {
            0.0
        } else {
            n * libm::pow(self.value, n - 1.0) * self.deriv
        };
        Self::new(v, d)
    }

    /// `u^w = exp(w·ln u)` for `u > 0`.
    pub fn powf(self, exponent: Dual) -> Self {
        let v = libm::pow(self.value, exponent.value);
        let d = v
            * (exponent.deriv * libm::log(self.value) + exponent.value * self.deriv / self.value);
        Self::new(v, d)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        Dual::new(self.value + rhs.value, self.deriv + rhs.deriv)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        Dual::new(self.value - rhs.value, self.deriv - rhs.deriv)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        Dual::new(
            self.value * rhs.value,
            self.deriv * rhs.value + self.value * rhs.deriv,
        )
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        Dual::new(
            self.value / rhs.value,
            (self.deriv * rhs.value - self.value * rhs.deriv) / (rhs.value * rhs.value),
        )
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.value, -self.deriv)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_quotient_rules() {
        let x = Dual::variable(3.0);
        let f = x * x + Dual::constant(2.0) * x;
        assert_eq!(f, Dual::new(15.0, 8.0));

        let g = Dual::constant(1.0) / x;
        assert_eq!(g.value, 1.0 / 3.0);
        assert!((g.deriv + 1.0 / 9.0).abs() < 1e-16);
    }

    #[test]
    fn chain_rule_through_exp() {
        let x = Dual::variable(0.0);
        let f = (Dual::constant(2.0) * x).exp();
        assert_eq!(f, Dual::new(1.0, 2.0));
    }

    #[test]
    fn abs_has_zero_slope_at_origin() {
        assert_eq!(Dual::variable(0.0).abs(), Dual::new(0.0, 0.0));
        assert_eq!(Dual::variable(-2.0).abs(), Dual::new(2.0, -1.0));
    }

    #[test]
    fn integer_power_at_zero() {
        assert_eq!(Dual::variable(0.0).powi_const(0.0), Dual::new(1.0, 0.0));
        assert_eq!(Dual::variable(0.0).powi_const(1.0), Dual::new(0.0, 1.0));
        assert_eq!(Dual::variable(2.0).powi_const(3.0), Dual::new(8.0, 12.0));
        assert_eq!(Dual::variable(-2.0).powi_const(2.0), Dual::new(4.0, -4.0));
    }
}
