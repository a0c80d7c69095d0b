//! The degeneracy multiplier `f` and the field `E` of `f·ẋ = JE`.

use std::sync::Arc;

use crate::expr::{parse, EvalError, Expr, ParseError, Var};

pub type Point = [f64; 2];

/// `J = ((0, -1), (1, 0))`, rotation by +90°.
#[inline]
pub fn rot(v: [f64; 2]) -> [f64; 2] {
    [-v[1], v[0]]
}

#[inline]
pub fn dot(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: [f64; 2], b: [f64; 2]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: [f64; 2]) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn sub(a: Point, b: Point) -> [f64; 2] {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
pub fn dist(a: Point, b: Point) -> f64 {
    norm(sub(a, b))
}

/// Scalar field with an orientation flag. With `sign_flip` set every
/// evaluation (value and gradient) is negated.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    pub expr: Arc<Expr>,
    pub sign_flip: bool,
}

impl ScalarField {
    pub fn new(expr: Expr) -> Self {
        ScalarField { expr: Arc::new(expr), sign_flip: false }
    }

    pub fn parse(src: &str) -> Result<Self, ParseError> {
        parse(src).map(Self::new)
    }

    pub fn flipped(&self) -> Self {
        ScalarField { expr: self.expr.clone(), sign_flip: !self.sign_flip }
    }

    pub fn with_flip(&self, sign_flip: bool) -> Self {
        ScalarField { expr: self.expr.clone(), sign_flip }
    }

    pub fn has_param(&self) -> bool {
        self.expr.references(Var::S)
    }

    /// Fixes the homotopy parameter.
    pub fn at_param(&self, s: f64) -> Self {
        ScalarField { expr: Arc::new(self.expr.bind_param(s)), sign_flip: self.sign_flip }
    }

    fn sign(&self) -> f64 {
        if self.sign_flip {
            -1.0
        } else {
            1.0
        }
    }

    pub fn eval(&self, p: Point) -> Result<f64, EvalError> {
        Ok(self.sign() * self.expr.eval(p, None)?)
    }

    pub fn grad(&self, p: Point) -> Result<[f64; 2], EvalError> {
        let g = self.expr.grad(p, None)?;
        Ok([self.sign() * g[0], self.sign() * g[1]])
    }

    pub fn value_grad(&self, p: Point) -> Result<(f64, [f64; 2]), EvalError> {
        let (v, g) = self.expr.value_grad(p, None)?;
        let k = self.sign();
        Ok((k * v, [k * g[0], k * g[1]]))
    }
}

/// Planar field `E = (e1, e2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub e1: Arc<Expr>,
    pub e2: Arc<Expr>,
}

impl VectorField {
    pub fn new(e1: Expr, e2: Expr) -> Self {
        VectorField { e1: Arc::new(e1), e2: Arc::new(e2) }
    }

    pub fn parse(e1: &str, e2: &str) -> Result<Self, ParseError> {
        Ok(Self::new(parse(e1)?, parse(e2)?))
    }

    pub fn has_param(&self) -> bool {
        self.e1.references(Var::S) || self.e2.references(Var::S)
    }

    pub fn at_param(&self, s: f64) -> Self {
        VectorField { e1: Arc::new(self.e1.bind_param(s)), e2: Arc::new(self.e2.bind_param(s)) }
    }

    /// `-E`, the time-reversed field.
    pub fn negated(&self) -> Self {
        VectorField {
            e1: Arc::new(Expr::neg((*self.e1).clone())),
            e2: Arc::new(Expr::neg((*self.e2).clone())),
        }
    }

    /// `c·E`.
    pub fn scaled(&self, c: f64) -> Self {
        VectorField {
            e1: Arc::new(Expr::num(c) * (*self.e1).clone()),
            e2: Arc::new(Expr::num(c) * (*self.e2).clone()),
        }
    }

    pub fn eval(&self, p: Point) -> Result<[f64; 2], EvalError> {
        Ok([self.e1.eval(p, None)?, self.e2.eval(p, None)?])
    }

    /// `JE(p) = (-E2, E1)`.
    pub fn je(&self, p: Point) -> Result<[f64; 2], EvalError> {
        Ok(rot(self.eval(p)?))
    }

    /// Jacobian of `E`, rows `∇E1`, `∇E2`.
    pub fn jacobian(&self, p: Point) -> Result<[[f64; 2]; 2], EvalError> {
        Ok([self.e1.grad(p, None)?, self.e2.grad(p, None)?])
    }

    /// Jacobian of `JE`, rows `-∇E2`, `∇E1`.
    pub fn je_jacobian(&self, p: Point) -> Result<[[f64; 2]; 2], EvalError> {
        let [g1, g2] = self.jacobian(p)?;
        Ok([[-g2[0], -g2[1]], g1])
    }
}

/// `⟨JE, ∇f⟩` at `p`, the quantity whose sign classifies rings.
pub fn pairing(f: &ScalarField, e: &VectorField, p: Point) -> Result<f64, EvalError> {
    Ok(dot(e.je(p)?, f.grad(p)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn je_is_rotation() {
        let e = VectorField::parse("-x2", "x1").unwrap();
        assert_eq!(e.je([0.6, 0.8]).unwrap(), [-0.6, -0.8]);
    }

    #[test]
    fn flip_negates_value_and_gradient() {
        let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
        let g = f.flipped();
        let p = [0.3, -1.7];
        assert_eq!(g.eval(p).unwrap(), -f.eval(p).unwrap());
        let (a, b) = (f.grad(p).unwrap(), g.grad(p).unwrap());
        assert_eq!([-a[0], -a[1]], b);
    }

    #[test]
    fn canonical_pairings_are_plus_minus_two() {
        let f = ScalarField::parse("x1^2 + x2^2 - 1").unwrap();
        let em = VectorField::parse("-x2", "x1").unwrap();
        let ep = VectorField::parse("x2", "-x1").unwrap();
        for k in 0..16 {
            let t = k as f64 * std::f64::consts::TAU / 16.0;
            let p = [t.cos(), t.sin()];
            assert!((pairing(&f, &em, p).unwrap() + 2.0).abs() < 1e-12);
            assert!((pairing(&f, &ep, p).unwrap() - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn je_jacobian_of_saddle() {
        let e = VectorField::parse("x1", "-x2").unwrap();
        // JE = (x2, x1)
        assert_eq!(e.je_jacobian([0.0, 0.0]).unwrap(), [[0.0, 1.0], [1.0, 0.0]]);
    }
}
