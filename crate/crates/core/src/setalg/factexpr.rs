//! Integer expressions over factorials, used as interval bounds (`5! - 5!/4!`).

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::Zero;

use crate::num::factorial;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FactExpr {
    Int(BigUint),
    Factorial(BigUint),
    Add(Box<FactExpr>, Box<FactExpr>),
    Sub(Box<FactExpr>, Box<FactExpr>),
    Mul(Box<FactExpr>, Box<FactExpr>),
    Div(Box<FactExpr>, Box<FactExpr>),
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("subtraction `{0}` goes below zero")]
    Negative(String),
    #[error("division `{0}` is not exact")]
    InexactDivision(String),
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
}

impl FactExpr {
    pub fn int(n: impl Into<BigUint>) -> Self {
        FactExpr::Int(n.into())
    }

    pub fn fact(n: impl Into<BigUint>) -> Self {
        FactExpr::Factorial(n.into())
    }

    pub fn eval(&self) -> Result<BigUint, EvalError> {
        Ok(match self {
            FactExpr::Int(n) => n.clone(),
            FactExpr::Factorial(n) => factorial(n),
            FactExpr::Add(a, b) => a.eval()? + b.eval()?,
            FactExpr::Sub(a, b) => {
                let (a, b) = (a.eval()?, b.eval()?);
                if b > a {
                    return Err(EvalError::Negative(self.to_string()));
                }
                a - b
            }
            FactExpr::Mul(a, b) => a.eval()? * b.eval()?,
            FactExpr::Div(a, b) => {
                let (a, b) = (a.eval()?, b.eval()?);
                if b.is_zero() {
                    return Err(EvalError::DivisionByZero(self.to_string()));
                }
                let (quot, rem) = a.div_rem(&b);
                if !rem.is_zero() {
                    return Err(EvalError::InexactDivision(self.to_string()));
                }
                quot
            }
        })
    }

    fn precedence(&self) -> u8 {
        match self {
            FactExpr::Add(..) | FactExpr::Sub(..) => 1,
            FactExpr::Mul(..) | FactExpr::Div(..) => 2,
            FactExpr::Int(_) | FactExpr::Factorial(_) => 3,
        }
    }

    fn fmt_operand(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl fmt::Display for FactExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FactExpr::Int(n) => write!(f, "{n}"),
            FactExpr::Factorial(n) => write!(f, "{n}!"),
            FactExpr::Add(a, b) | FactExpr::Sub(a, b) => {
                let op = if matches!(self, FactExpr::Add(..)) {
                    '+'
                } else {
                    '-'
                };
                a.fmt_operand(f, 1)?;
                write!(f, " {op} ")?;
                // right operand of a left-associative operator needs tighter binding
                b.fmt_operand(f, 2)
            }
            FactExpr::Mul(a, b) | FactExpr::Div(a, b) => {
                let op = if matches!(self, FactExpr::Mul(..)) {
                    '*'
                } else {
                    '/'
                };
                a.fmt_operand(f, 2)?;
                write!(f, "{op}")?;
                b.fmt_operand(f, 3)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_block_bound() {
        // 5! - 5!/4! = 120 - 5
        let e = FactExpr::Sub(
            Box::new(FactExpr::fact(5u32)),
            Box::new(FactExpr::Div(
                Box::new(FactExpr::fact(5u32)),
                Box::new(FactExpr::fact(4u32)),
            )),
        );
        assert_eq!(e.eval().unwrap(), BigUint::from(115u32));
        assert_eq!(e.to_string(), "5! - 5!/4!");
    }

    #[test]
    fn rejects_inexact_and_negative() {
        let inexact = FactExpr::Div(Box::new(FactExpr::int(7u32)), Box::new(FactExpr::int(2u32)));
        assert!(matches!(inexact.eval(), Err(EvalError::InexactDivision(_))));
        let neg = FactExpr::Sub(
            Box::new(FactExpr::int(1u32)),
            Box::new(FactExpr::fact(3u32)),
        );
        assert!(matches!(neg.eval(), Err(EvalError::Negative(_))));
    }

    #[test]
    fn display_parenthesizes_right_operands() {
        let e = FactExpr::Sub(
            Box::new(FactExpr::int(10u32)),
            Box::new(FactExpr::Sub(
                Box::new(FactExpr::int(3u32)),
                Box::new(FactExpr::int(2u32)),
            )),
        );
        assert_eq!(e.to_string(), "10 - (3 - 2)");
        assert_eq!(e.eval().unwrap(), BigUint::from(9u32));
    }
}
