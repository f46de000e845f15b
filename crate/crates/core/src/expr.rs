//! A small one-variable expression language.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := factor (("*" | "/") factor)*
//! factor := "-" factor | power
//! power  := atom ("^" factor)?
//! atom   := NUMBER | "x" | FUNC "(" expr ")" | "(" expr ")"
//! FUNC   := "ln" | "exp" | "sqrt" | "abs" | "sin" | "cos"
//! ```
//!
//! `^` is right-associative and binds tighter than a leading minus, so
//! `-x^2` is `-(x^2)`. There is no implicit multiplication.
//!
//! Expressions evaluate over `f64` and over [`Dual`] numbers; the dual path
//! yields exact first derivatives by forward-mode propagation.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dual::Dual;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Ln,
    Exp,
    Sqrt,
    Abs,
    Sin,
    Cos,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "ln" => Func::Ln,
            "exp" => Func::Exp,
            "sqrt" => Func::Sqrt,
            "abs" => Func::Abs,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Ln => "ln",
            Func::Exp => "exp",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
            BinOp::Pow => "^",
        }
    }
}

/// Expression tree node.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Num(f64),
    Var,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    /// An exponent that is a literal (optionally negated) with zero
    /// fractional part.
    fn integer_literal(&self) -> Option<f64> {
        match self {
            Node::Num(v) if *v == libm::trunc(*v) => Some(*v),
            Node::Neg(inner) => inner.integer_literal().map(|v| -v),
            _ => None,
        }
    }
}

/// Canonical, fully parenthesised serialization. Re-parsing it yields the
/// same tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Node::Num(v) => write!(f, "{v:?}"),
            Node::Var => f.write_str("x"),
            Node::Neg(inner) => write!(f, "(-{inner})"),
            Node::Binary(op, l, r) => write!(f, "({l} {} {r})", op.symbol()),
            Node::Call(func, arg) => write!(f, "{}({arg})", func.name()),
        }
    }
}

/// A parsed expression in the variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Node,
    source: String,
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let tokens = lex(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        if parser.peek().kind == Tok::End {
            return Err(ParseError::Empty);
        }
        let root = parser.expr()?;
        let next = parser.peek();
        if next.kind != Tok::End {
            return Err(parser.unexpected(&AFTER_OPERAND));
        }
        Ok(Self {
            root,
            source: text.to_string(),
        })
    }

    pub fn from_node(root: Node) -> Self {
        let source = root.to_string();
        Self { root, source }
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// The text this expression was parsed from.
    pub fn source(&self) -> &str {
        &self.source
    }

    /// Structural equality of the trees, ignoring source text.
    pub fn same_tree(&self, other: &Expression) -> bool {
        self.root == other.root
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        eval_node(&self.root, x)
    }

    /// Value and first derivative at `x`.
    pub fn eval_dual(&self, x: f64) -> Result<Dual, EvalError> {
        eval_node(&self.root, Dual::variable(x))
    }

    pub fn derivative(&self, x: f64) -> Result<f64, EvalError> {
        self.eval_dual(x).map(|d| d.deriv)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.root.fmt(f)
    }
}

impl FromStr for Expression {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Expression::parse(s)
    }
}

// ---------------------------------------------------------------------------
// Errors

/// The set of tokens a parser state would have accepted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Expected(pub Vec<&'static str>);

impl fmt::Display for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, item) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            f.write_str(item)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: found {found}, expected one of: {expected}")]
    Syntax {
        offset: usize,
        found: String,
        expected: Expected,
    },
    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("invalid number `{text}` at byte {offset}")]
    InvalidNumber { text: String, offset: usize },
}

impl ParseError {
    pub fn offset(&self) -> Option<usize> {
        match self {
            ParseError::Empty => None,
            ParseError::Syntax { offset, .. }
            | ParseError::UnknownIdentifier { offset, .. }
            | ParseError::InvalidNumber { offset, .. } => Some(*offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    LogOfNonPositive,
    SqrtOfNegative,
    /// `sqrt` at 0 has no finite derivative.
    SqrtSlopeAtZero,
    DivisionByZero,
    /// Non-integer power of a base that is not strictly positive.
    FractionalPowerOfNonPositive,
    NonFinite,
}

impl fmt::Display for DomainKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DomainKind::LogOfNonPositive => "ln of a non-positive value",
            DomainKind::SqrtOfNegative => "sqrt of a negative value",
            DomainKind::SqrtSlopeAtZero => "sqrt is not differentiable at 0",
            DomainKind::DivisionByZero => "division by zero",
            DomainKind::FractionalPowerOfNonPositive => {
                "non-integer power of a non-positive base"
            }
            DomainKind::NonFinite => "non-finite result",
        })
    }
}

/// Evaluation left the mathematical domain of some subterm.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{kind} in `{node}` (argument {arg:e})")]
pub struct EvalError {
    pub kind: DomainKind,
    /// Serialized offending subexpression.
    pub node: String,
    /// The argument value that triggered the error.
    pub arg: f64,
}

fn domain(kind: DomainKind, node: &Node, arg: f64) -> EvalError {
    EvalError {
        kind,
        node: node.to_string(),
        arg,
    }
}

// ---------------------------------------------------------------------------
// Evaluation

trait Scalar:
    Copy
    + core::ops::Add<Output = Self>
    + core::ops::Sub<Output = Self>
    + core::ops::Mul<Output = Self>
    + core::ops::Div<Output = Self>
    + core::ops::Neg<Output = Self>
{
    const DUAL: bool;
    fn constant(c: f64) -> Self;
    fn value(self) -> f64;
    fn finite(self) -> bool;
    fn ln(self) -> Self;
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn abs(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn powi_const(self, n: f64) -> Self;
    fn powf(self, e: Self) -> Self;
}

impl Scalar for f64 {
    const DUAL: bool = false;
    fn constant(c: f64) -> Self {
        c
    }
    fn value(self) -> f64 {
        self
    }
    fn finite(self) -> bool {
        self.is_finite()
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn abs(self) -> Self {
        libm::fabs(self)
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn powi_const(self, n: f64) -> Self {
        libm::pow(self, n)
    }
    fn powf(self, e: Self) -> Self {
        libm::pow(self, e)
    }
}

impl Scalar for Dual {
    const DUAL: bool = true;
    fn constant(c: f64) -> Self {
        Dual::constant(c)
    }
    fn value(self) -> f64 {
        self.value
    }
    fn finite(self) -> bool {
        self.value.is_finite() && self.deriv.is_finite()
    }
    fn ln(self) -> Self {
        Dual::ln(self)
    }
    fn exp(self) -> Self {
        Dual::exp(self)
    }
    fn sqrt(self) -> Self {
        Dual::sqrt(self)
    }
    fn abs(self) -> Self {
        Dual::abs(self)
    }
    fn sin(self) -> Self {
        Dual::sin(self)
    }
    fn cos(self) -> Self {
        Dual::cos(self)
    }
    fn powi_const(self, n: f64) -> Self {
        Dual::powi_const(self, n)
    }
    fn powf(self, e: Self) -> Self {
        Dual::powf(self, e)
    }
}

fn eval_node<S: Scalar>(node: &Node, x: S) -> Result<S, EvalError> {
    let out = match node {
        Node::Num(v) => return Ok(S::constant(*v)),
        Node::Var => return Ok(x),
        Node::Neg(inner) => -eval_node(inner, x)?,
        Node::Binary(op, l, r) => {
            let lv = eval_node(l, x)?;
            if *op == BinOp::Pow {
                if let Some(n) = r.integer_literal() {
                    if lv.value() == 0.0 && n < 0.0 {
                        return Err(domain(DomainKind::DivisionByZero, node, lv.value()));
                    }
                    lv.powi_const(n)
                } else {
                    let rv = eval_node(r, x)?;
                    if lv.value() <= 0.0 {
                        return Err(domain(
                            DomainKind::FractionalPowerOfNonPositive,
                            node,
                            lv.value(),
                        ));
                    }
                    lv.powf(rv)
                }
            } else {
                let rv = eval_node(r, x)?;
                match op {
                    BinOp::Add => lv + rv,
                    BinOp::Sub => lv - rv,
                    BinOp::Mul => lv * rv,
                    BinOp::Div => {
                        if rv.value() == 0.0 {
                            return Err(domain(DomainKind::DivisionByZero, node, rv.value()));
                        }
                        lv / rv
                    }
                    BinOp::Pow => unreachable!(),
                }
            }
        }
        Node::Call(func, arg) => {
            let v = eval_node(arg, x)?;
            let a = v.value();
            match func {
                Func::Ln if a <= 0.0 => {
                    return Err(domain(DomainKind::LogOfNonPositive, node, a));
                }
                Func::Sqrt if a < 0.0 => {
                    return Err(domain(DomainKind::SqrtOfNegative, node, a));
                }
                Func::Sqrt if S::DUAL && a == 0.0 => {
                    return Err(domain(DomainKind::SqrtSlopeAtZero, node, a));
                }
                _ => {}
            }
            match func {
                Func::Ln => v.ln(),
                Func::Exp => v.exp(),
                Func::Sqrt => v.sqrt(),
                Func::Abs => v.abs(),
                Func::Sin => v.sin(),
                Func::Cos => v.cos(),
            }
        }
    };
    if !out.finite() {
        return Err(domain(DomainKind::NonFinite, node, x.value()));
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Lexing and parsing

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tok {
    Num(f64),
    X,
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

#[derive(Debug, Clone, Copy)]
struct Token {
    kind: Tok,
    offset: usize,
}

const OPERAND: [&str; 5] = ["number", "x", "function", "(", "-"];
const AFTER_OPERAND: [&str; 6] = ["+", "-", "*", "/", "^", "end of input"];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let single = match c {
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(kind) = single {
            out.push(Token {
                kind,
                offset: start,
            });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            if i < bytes.len() && bytes[i] == b'.' {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit.parse().map_err(|_| ParseError::InvalidNumber {
                text: lit.to_string(),
                offset: start,
            })?;
            if !value.is_finite() {
                return Err(ParseError::InvalidNumber {
                    text: lit.to_string(),
                    offset: start,
                });
            }
            out.push(Token {
                kind: Tok::Num(value),
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let name = &text[start..i];
            let kind = if name == "x" {
                Tok::X
            } else if let Some(func) = Func::from_name(name) {
                Tok::Func(func)
            } else {
                return Err(ParseError::UnknownIdentifier {
                    name: name.to_string(),
                    offset: start,
                });
            };
            out.push(Token {
                kind,
                offset: start,
            });
            continue;
        }
        // Any other character, including non-ASCII.
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(ParseError::Syntax {
            offset: start,
            found: alloc::format!("`{ch}`"),
            expected: Expected(OPERAND.to_vec()),
        });
    }
    out.push(Token {
        kind: Tok::End,
        offset: text.len(),
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Token {
        self.tokens[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos];
        if t.kind != Tok::End {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, expected: &[&'static str]) -> ParseError {
        let t = self.peek();
        let found = match t.kind {
            Tok::End => String::from("end of input"),
            Tok::Num(v) => alloc::format!("number {v}"),
            Tok::X => String::from("`x`"),
            Tok::Func(f) => alloc::format!("`{}`", f.name()),
            _ => {
                let sym = match t.kind {
                    Tok::Plus => "+",
                    Tok::Minus => "-",
                    Tok::Star => "*",
                    Tok::Slash => "/",
                    Tok::Caret => "^",
                    Tok::LParen => "(",
                    _ => ")",
                };
                alloc::format!("`{sym}`")
            }
        };
        ParseError::Syntax {
            offset: t.offset,
            found,
            expected: Expected(expected.to_vec()),
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek().kind {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.factor()?;
        loop {
            let op = match self.peek().kind {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.factor()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn factor(&mut self) -> Result<Node, ParseError> {
        if self.peek().kind == Tok::Minus {
            self.bump();
            let inner = self.factor()?;
            return Ok(Node::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.peek().kind == Tok::Caret {
            self.bump();
            let exponent = self.factor()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        match self.peek().kind {
            Tok::Num(v) => {
                self.bump();
                Ok(Node::Num(v))
            }
            Tok::X => {
                self.bump();
                Ok(Node::Var)
            }
            Tok::Func(func) => {
                self.bump();
                self.expect_lparen()?;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            _ => Err(self.unexpected(&OPERAND)),
        }
    }

    fn expect_lparen(&mut self) -> Result<(), ParseError> {
        if self.peek().kind == Tok::LParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&["("]))
        }
    }

    fn expect_rparen(&mut self) -> Result<(), ParseError> {
        if self.peek().kind == Tok::RParen {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(&["+", "-", "*", "/", "^", ")"]))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Expression {
        Expression::parse(s).unwrap()
    }

    #[test]
    fn sum_at_root() {
        assert!(matches!(
            p("x^2 + ln(x)").root(),
            Node::Binary(BinOp::Add, _, _)
        ));
    }

    #[test]
    fn incomplete_input_reports_offset() {
        let err = Expression::parse("x +").unwrap_err();
        assert_eq!(err.offset(), Some(3));
        match err {
            ParseError::Syntax { expected, .. } => assert!(expected.0.contains(&"x")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unary_minus_binds_looser_than_power() {
        let e = p("-x^2");
        assert_eq!(
            e.root(),
            &Node::Neg(Box::new(Node::Binary(
                BinOp::Pow,
                Box::new(Node::Var),
                Box::new(Node::Num(2.0))
            )))
        );
        assert_eq!(e.eval(2.0).unwrap(), -4.0);
    }

    #[test]
    fn power_is_right_associative() {
        assert_eq!(p("2^3^2").eval(0.0).unwrap(), 512.0);
        assert_eq!(p("2^-1").eval(0.0).unwrap(), 0.5);
    }

    #[test]
    fn no_implicit_multiplication() {
        let err = Expression::parse("2x").unwrap_err();
        assert_eq!(err.offset(), Some(1));
    }

    #[test]
    fn unknown_identifier() {
        assert_eq!(
            Expression::parse("x + y").unwrap_err(),
            ParseError::UnknownIdentifier {
                name: "y".into(),
                offset: 4
            }
        );
        assert!(matches!(
            Expression::parse("log(x)"),
            Err(ParseError::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn misc_syntax_errors() {
        assert_eq!(Expression::parse("   "), Err(ParseError::Empty));
        assert!(Expression::parse("ln(").is_err());
        assert!(Expression::parse("ln x").is_err());
        assert!(Expression::parse("(x").is_err());
        assert!(Expression::parse("x)").is_err());
        assert!(Expression::parse("x # 2").is_err());
        assert!(matches!(
            Expression::parse("1e999"),
            Err(ParseError::InvalidNumber { .. })
        ));
    }

    #[test]
    fn number_forms() {
        assert_eq!(p("1.5e2").eval(0.0).unwrap(), 150.0);
        assert_eq!(p(".25").eval(0.0).unwrap(), 0.25);
        assert_eq!(p("2E-1").eval(0.0).unwrap(), 0.2);
    }

    #[test]
    fn plain_evaluation() {
        assert_eq!(p("x^2 + ln(x)").eval(1.0).unwrap(), 1.0);
        assert_eq!(p("exp(x)").eval(0.0).unwrap(), 1.0);
        assert_eq!(p("abs(x) + sqrt(x*x)").eval(-3.0).unwrap(), 6.0);
        assert_eq!(p("sin(x) + cos(x)").eval(0.0).unwrap(), 1.0);
    }

    #[test]
    fn domain_errors_name_the_node() {
        let err = p("ln(x)").eval(0.0).unwrap_err();
        assert_eq!(err.kind, DomainKind::LogOfNonPositive);
        assert_eq!(err.node, "ln(x)");
        assert_eq!(err.arg, 0.0);

        assert_eq!(
            p("1/x").eval(0.0).unwrap_err().kind,
            DomainKind::DivisionByZero
        );
        assert_eq!(
            p("sqrt(x)").eval(-1.0).unwrap_err().kind,
            DomainKind::SqrtOfNegative
        );
        assert_eq!(
            p("exp(x)").eval(1000.0).unwrap_err().kind,
            DomainKind::NonFinite
        );
    }

    #[test]
    fn integer_exponents_allow_non_positive_bases() {
        assert_eq!(p("x^3").eval(-2.0).unwrap(), -8.0);
        assert_eq!(p("x^0").eval(0.0).unwrap(), 1.0);
        assert_eq!(
            p("x^-1").eval(0.0).unwrap_err().kind,
            DomainKind::DivisionByZero
        );
        assert_eq!(
            p("x^0.5").eval(-1.0).unwrap_err().kind,
            DomainKind::FractionalPowerOfNonPositive
        );
        assert_eq!(
            p("x^0.5").eval(0.0).unwrap_err().kind,
            DomainKind::FractionalPowerOfNonPositive
        );
        // Non-literal exponents are treated as real powers.
        assert!(p("x^(1+1)").eval(-1.0).is_err());
    }

    #[test]
    fn dual_examples() {
        assert_eq!(p("exp(2*x)").eval_dual(0.0).unwrap(), Dual::new(1.0, 2.0));
        assert_eq!(p("x^3").eval_dual(2.0).unwrap(), Dual::new(8.0, 12.0));
        assert_eq!(p("x*ln(x)").eval_dual(1.0).unwrap(), Dual::new(0.0, 1.0));
        assert_eq!(p("abs(x)").eval_dual(0.0).unwrap(), Dual::new(0.0, 0.0));
        assert_eq!(p("x^x").eval_dual(1.0).unwrap(), Dual::new(1.0, 1.0));
    }

    #[test]
    fn sqrt_slope_at_zero_is_rejected_only_for_duals() {
        let e = p("sqrt(x)");
        assert_eq!(e.eval(0.0).unwrap(), 0.0);
        assert_eq!(
            e.eval_dual(0.0).unwrap_err().kind,
            DomainKind::SqrtSlopeAtZero
        );
    }

    #[test]
    fn canonical_form_reparses() {
        for src in ["-x^2", "(-x)^2", "x^2^3", "1 - (2 - x)", "x/2/3", "-(-x)", "1e-300*x"] {
            let a = p(src);
            let b = p(&a.to_string());
            assert!(a.same_tree(&b), "{src} -> {a}");
        }
        assert_eq!(p("-x^2").to_string(), "(-(x ^ 2.0))");
    }
}
