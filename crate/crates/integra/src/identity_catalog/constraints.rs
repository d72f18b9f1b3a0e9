//! Parameter constraints: bounds on real part, imaginary part or modulus,
//! sampling boxes, and integrality.
//!
//! ```text
//! re(p) > 0; re(p) in [0.5, 4]; abs(c) <= 1; im(a) = 0; int(n)
//! ```
//!
//! A `re(·) in` or `im(·) in` range is also the box that sampled
//! verification draws from.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64 as C64;

use super::lexer::{Cursor, Tok};
use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Re,
    Im,
    Abs,
}

impl Part {
    fn name(self) -> &'static str {
        match self {
            Part::Re => "re",
            Part::Im => "im",
            Part::Abs => "abs",
        }
    }

    pub fn of(self, z: C64) -> f64 {
        match self {
            Part::Re => z.re,
            Part::Im => z.im,
            Part::Abs => z.norm(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl Comparison {
    fn symbol(self) -> &'static str {
        match self {
            Comparison::Lt => "<",
            Comparison::Le => "<=",
            Comparison::Gt => ">",
            Comparison::Ge => ">=",
            Comparison::Eq => "=",
            Comparison::Ne => "!=",
        }
    }

    fn holds(self, lhs: f64, rhs: f64) -> bool {
        match self {
            Comparison::Lt => lhs < rhs,
            Comparison::Le => lhs <= rhs,
            Comparison::Gt => lhs > rhs,
            Comparison::Ge => lhs >= rhs,
            Comparison::Eq => lhs == rhs,
            Comparison::Ne => lhs != rhs,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParameterConstraint {
    /// part(param) op value
    Bound {
        param: String,
        part: Part,
        op: Comparison,
        value: f64,
    },
    /// part(param) in (lower, upper), each end open or closed.
    Range {
        param: String,
        part: Part,
        lower: f64,
        upper: f64,
        lower_closed: bool,
        upper_closed: bool,
    },
    /// The parameter is a real integer.
    Integer { param: String },
}

impl ParameterConstraint {
    pub fn param(&self) -> &str {
        match self {
            ParameterConstraint::Bound { param, .. }
            | ParameterConstraint::Range { param, .. }
            | ParameterConstraint::Integer { param } => param,
        }
    }

    /// Whether `value` of the constrained parameter satisfies the constraint.
    pub fn holds_for(&self, value: C64) -> bool {
        match self {
            ParameterConstraint::Bound { part, op, value: bound, .. } => op.holds(part.of(value), *bound),
            ParameterConstraint::Range {
                part,
                lower,
                upper,
                lower_closed,
                upper_closed,
                ..
            } => {
                let v = part.of(value);
                let above = if *lower_closed { v >= *lower } else { v > *lower };
                let below = if *upper_closed { v <= *upper } else { v < *upper };
                above && below
            }
            ParameterConstraint::Integer { .. } => value.im == 0.0 && value.re.fract() == 0.0,
        }
    }

    /// Check against a full parameter set; unbound parameters fail.
    pub fn check(&self, params: &BTreeMap<String, C64>) -> std::result::Result<(), String> {
        match params.get(self.param()) {
            Some(v) if self.holds_for(*v) => Ok(()),
            Some(v) => Err(format!("{self} fails at {} = {}", self.param(), v)),
            None => Err(format!("{self} names unbound parameter {}", self.param())),
        }
    }
}

impl fmt::Display for ParameterConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParameterConstraint::Bound { param, part, op, value } => {
                write!(f, "{}({param}) {} {}", part.name(), op.symbol(), format!("{value:?}"))
            }
            ParameterConstraint::Range {
                param,
                part,
                lower,
                upper,
                lower_closed,
                upper_closed,
            } => write!(
                f,
                "{}({param}) in {}{}, {}{}",
                part.name(),
                if *lower_closed { '[' } else { '(' },
                format!("{lower:?}"),
                format!("{upper:?}"),
                if *upper_closed { ']' } else { ')' },
            ),
            ParameterConstraint::Integer { param } => write!(f, "int({param})"),
        }
    }
}

/// `none` or constraints separated by `;`.
pub(crate) fn parse_constraints(cur: &mut Cursor) -> Result<Vec<ParameterConstraint>> {
    if cur.peek() == Some(&Tok::Ident("none".into())) && cur.peek_at(1).is_none() {
        cur.next();
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    loop {
        out.push(parse_constraint(cur)?);
        if !cur.eat(&Tok::Semicolon) {
            break;
        }
    }
    Ok(out)
}

fn parse_constraint(cur: &mut Cursor) -> Result<ParameterConstraint> {
    let column = cur.column();
    let head = cur.ident("re, im, abs or int")?;
    cur.expect(Tok::LParen, "'('")?;
    let param = cur.ident("a parameter name")?;
    cur.expect(Tok::RParen, "')'")?;
    let part = match head.as_str() {
        "int" => return Ok(ParameterConstraint::Integer { param }),
        "re" => Part::Re,
        "im" => Part::Im,
        "abs" => Part::Abs,
        _ => return Err(cur.error_at(column, format!("unknown constraint '{head}'"))),
    };
    if cur.peek() == Some(&Tok::Ident("in".into())) {
        cur.next();
        let lower_closed = match cur.next() {
            Some(Tok::LBracket) => true,
            Some(Tok::LParen) => false,
            _ => return Err(cur.error("expected '[' or '('")),
        };
        let lower = cur.number()?;
        cur.expect(Tok::Comma, "','")?;
        let upper = cur.number()?;
        let upper_closed = match cur.next() {
            Some(Tok::RBracket) => true,
            Some(Tok::RParen) => false,
            _ => return Err(cur.error("expected ']' or ')'")),
        };
        if !(lower < upper) {
            return Err(cur.error_at(column, "empty range"));
        }
        return Ok(ParameterConstraint::Range {
            param,
            part,
            lower,
            upper,
            lower_closed,
            upper_closed,
        });
    }
    let op = match cur.next() {
        Some(Tok::Lt) => Comparison::Lt,
        Some(Tok::Le) => Comparison::Le,
        Some(Tok::Gt) => Comparison::Gt,
        Some(Tok::Ge) => Comparison::Ge,
        Some(Tok::Eq) => Comparison::Eq,
        Some(Tok::Ne) => Comparison::Ne,
        _ => return Err(cur.error("expected a comparison or 'in'")),
    };
    let value = cur.number()?;
    Ok(ParameterConstraint::Bound { param, part, op, value })
}
