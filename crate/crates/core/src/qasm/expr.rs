//! Parameter expressions. Values stay exact (rational times a power of pi)
//! as long as the arithmetic allows it, so `pi/2` round-trips bit-exactly.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_rational::Ratio;

use crate::circuit::Angle;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(i64),
    Real(f64),
    Pi,
    Var(String),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
}

impl Func {
    pub fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" => Func::Ln,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
            Func::Sqrt => x.sqrt(),
        }
    }
}

/// Evaluated value: `coeff * pi^pi_pow` when exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Value {
    Exact { coeff: Ratio<i64>, pi_pow: i32 },
    Float(f64),
}

impl Value {
    fn exact(coeff: Ratio<i64>, pi_pow: i32) -> Value {
        if coeff == Ratio::from_integer(0) {
            Value::Exact {
                coeff,
                pi_pow: 0,
            }
        } else {
            Value::Exact { coeff, pi_pow }
        }
    }

    pub fn to_f64(self) -> f64 {
        match self {
            Value::Exact { coeff, pi_pow } => {
                (*coeff.numer() as f64) / (*coeff.denom() as f64) * PI.powi(pi_pow)
            }
            Value::Float(f) => f,
        }
    }

    pub fn to_angle(self) -> Angle {
        match self {
            Value::Exact { coeff, pi_pow: 1 } => Angle::Pi(coeff),
            Value::Exact { coeff, .. } if coeff == Ratio::from_integer(0) => Angle::zero(),
            other => Angle::Value(other.to_f64()),
        }
    }

    pub fn from_angle(a: Angle) -> Value {
        match a {
            Angle::Pi(r) => Value::exact(r, 1),
            Angle::Value(v) => Value::Float(v),
        }
    }

    fn is_zero(self) -> bool {
        matches!(self, Value::Exact { coeff, .. } if coeff == Ratio::from_integer(0))
    }
}

fn checked<F>(a: Ratio<i64>, b: Ratio<i64>, f: F) -> Option<Ratio<i64>>
where
    F: Fn(i128, i128, i128, i128) -> (i128, i128),
{
    let (n, d) = f(
        *a.numer() as i128,
        *a.denom() as i128,
        *b.numer() as i128,
        *b.denom() as i128,
    );
    if d == 0 {
        return None;
    }
    let g = gcd(n.unsigned_abs(), d.unsigned_abs()).max(1) as i128;
    let (mut n, mut d) = (n / g, d / g);
    if d < 0 {
        n = -n;
        d = -d;
    }
    Some(Ratio::new(i64::try_from(n).ok()?, i64::try_from(d).ok()?))
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn binary(op: BinOp, a: Value, b: Value) -> Value {
    use Value::*;
    let exact = match (op, a, b) {
        (BinOp::Add, x, y) if x.is_zero() => Some(y),
        (BinOp::Add | BinOp::Sub, x, y) if y.is_zero() => Some(x),
        (
            BinOp::Add | BinOp::Sub,
            Exact {
                coeff: ca,
                pi_pow: pa,
            },
            Exact {
                coeff: cb,
                pi_pow: pb,
            },
        ) if pa == pb => {
            let sign = if op == BinOp::Add { 1 } else { -1 };
            checked(ca, cb, |an, ad, bn, bd| (an * bd + sign * bn * ad, ad * bd))
                .map(|c| Value::exact(c, pa))
        }
        (
            BinOp::Mul,
            Exact {
                coeff: ca,
                pi_pow: pa,
            },
            Exact {
                coeff: cb,
                pi_pow: pb,
            },
        ) => checked(ca, cb, |an, ad, bn, bd| (an * bn, ad * bd)).map(|c| Value::exact(c, pa + pb)),
        (
            BinOp::Div,
            Exact {
                coeff: ca,
                pi_pow: pa,
            },
            Exact {
                coeff: cb,
                pi_pow: pb,
            },
        ) if *cb.numer() != 0 => {
            checked(ca, cb, |an, ad, bn, bd| (an * bd, ad * bn)).map(|c| Value::exact(c, pa - pb))
        }
        _ => None,
    };
    match exact {
        Some(v @ Exact { pi_pow, .. }) if (0..=1).contains(&pi_pow) || v.is_zero() => v,
        _ => {
            let (x, y) = (a.to_f64(), b.to_f64());
            Float(match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Pow => x.powf(y),
            })
        }
    }
}

impl Expr {
    /// Evaluates against bound gate parameters. Unknown names yield `Err`.
    pub fn eval(&self, env: &HashMap<String, Value>) -> Result<Value, String> {
        Ok(match self {
            Expr::Int(i) => Value::exact(Ratio::from_integer(*i), 0),
            Expr::Real(r) => Value::Float(*r),
            Expr::Pi => Value::exact(Ratio::from_integer(1), 1),
            Expr::Var(name) => *env
                .get(name)
                .ok_or_else(|| format!("unknown parameter '{name}'"))?,
            Expr::Neg(e) => match e.eval(env)? {
                Value::Exact { coeff, pi_pow } => Value::exact(-coeff, pi_pow),
                Value::Float(f) => Value::Float(-f),
            },
            Expr::Bin(op, a, b) => binary(*op, a.eval(env)?, b.eval(env)?),
            Expr::Call(f, e) => Value::Float(f.apply(e.eval(env)?.to_f64())),
        })
    }
}
