use thiserror::Error;

use super::dual::{Dual, Scalar};
use super::{BinOp, Expr, Func, Var};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("expression references `s` but no parameter value was supplied")]
    UnboundParameter,
}

fn check<T: Scalar>(v: T, what: &'static str) -> Result<T, EvalError> {
    if v.finite() {
        Ok(v)
    } else {
        Err(EvalError::Domain(what))
    }
}

/// Integer exponents up to this magnitude are expanded into multiplications.
const MAX_INT_EXPONENT: f64 = 1024.0;

fn int_pow<T: Scalar>(base: T, n: i64) -> T {
    let mut acc = T::lift(1.0);
    let mut b = base;
    let mut k = n.unsigned_abs();
    while k > 0 {
        if k & 1 == 1 {
            acc = acc * b;
        }
        b = b * b;
        k >>= 1;
    }
    acc
}

fn is_constant(e: &Expr) -> bool {
    !(e.references(Var::X1) || e.references(Var::X2) || e.references(Var::S))
}

impl Expr {
    pub(crate) fn eval_generic<T: Scalar>(&self, x1: T, x2: T, s: Option<f64>) -> Result<T, EvalError> {
        match self {
            Expr::Num(v) => Ok(T::lift(*v)),
            Expr::Const(c) => Ok(T::lift(c.value())),
            Expr::Var(Var::X1) => Ok(x1),
            Expr::Var(Var::X2) => Ok(x2),
            Expr::Var(Var::S) => s.map(T::lift).ok_or(EvalError::UnboundParameter),
            Expr::Neg(a) => Ok(-a.eval_generic(x1, x2, s)?),
            Expr::Call(func, a) => {
                let a = a.eval_generic(x1, x2, s)?;
                let r = match func {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Tan => a.tan(),
                    Func::Exp => a.exp(),
                    Func::Tanh => a.tanh(),
                    Func::Abs => a.abs(),
                    Func::Log => {
                        if a.value() <= 0.0 {
                            return Err(EvalError::Domain("log of non-positive value"));
                        }
                        a.ln()
                    }
                    Func::Sqrt => {
                        if a.value() < 0.0 {
                            return Err(EvalError::Domain("sqrt of negative value"));
                        }
                        a.sqrt()
                    }
                };
                check(r, func.name())
            }
            Expr::Bin(op, a, b) => {
                let av = a.eval_generic(x1, x2, s)?;
                if *op == BinOp::Pow && is_constant(b) {
                    let n = b.eval_generic::<f64>(0.0, 0.0, s)?;
                    if n.fract() == 0.0 && n.abs() <= MAX_INT_EXPONENT {
                        let p = int_pow(av, n as i64);
                        if n < 0.0 {
                            if p.value() == 0.0 {
                                return Err(EvalError::Domain("division by zero"));
                            }
                            return check(T::lift(1.0) / p, "power");
                        }
                        return check(p, "power");
                    }
                }
                let bv = b.eval_generic(x1, x2, s)?;
                let r = match op {
                    BinOp::Add => av + bv,
                    BinOp::Sub => av - bv,
                    BinOp::Mul => av * bv,
                    BinOp::Div => {
                        if bv.value() == 0.0 {
                            return Err(EvalError::Domain("division by zero"));
                        }
                        av / bv
                    }
                    BinOp::Pow => {
                        if av.value() <= 0.0 {
                            return Err(EvalError::Domain("non-integer power of non-positive base"));
                        }
                        (bv * av.ln()).exp()
                    }
                };
                check(r, "arithmetic overflow")
            }
        }
    }

    /// Evaluates at `p`. `s` must be supplied iff the tree references it.
    pub fn eval(&self, p: [f64; 2], s: Option<f64>) -> Result<f64, EvalError> {
        self.eval_generic(p[0], p[1], s)
    }

    /// Exact gradient with respect to `(x1, x2)`, one dual pass per variable.
    pub fn grad(&self, p: [f64; 2], s: Option<f64>) -> Result<[f64; 2], EvalError> {
        self.value_grad(p, s).map(|(_, g)| g)
    }

    /// Value together with gradient.
    pub fn value_grad(&self, p: [f64; 2], s: Option<f64>) -> Result<(f64, [f64; 2]), EvalError> {
        let dx = self.eval_generic(Dual::variable(p[0]), Dual::constant(p[1]), s)?;
        let dy = self.eval_generic(Dual::constant(p[0]), Dual::variable(p[1]), s)?;
        Ok((dx.v, [dx.d, dy.d]))
    }
}
