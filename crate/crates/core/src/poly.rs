//! Real polynomials in two variables, used to move fields between charts.

use std::collections::BTreeMap;

use crate::expr::{BinOp, Expr, Var};

/// `Σ c·x1^a·x2^b`, keyed by `(a, b)`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Poly {
    terms: BTreeMap<(u32, u32), f64>,
}

/// Exponents above this are rejected when converting expressions.
const MAX_EXPONENT: u32 = 64;

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: f64) -> Self {
        Poly::monomial(c, 0, 0)
    }

    pub fn monomial(c: f64, a: u32, b: u32) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0.0 {
            terms.insert((a, b), c);
        }
        Poly { terms }
    }

    pub fn x1() -> Self {
        Poly::monomial(1.0, 1, 0)
    }

    pub fn x2() -> Self {
        Poly::monomial(1.0, 0, 1)
    }

    /// `x1² + x2²`.
    pub fn rho() -> Self {
        Poly::monomial(1.0, 2, 0).add(&Poly::monomial(1.0, 0, 2))
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), f64)> + '_ {
        self.terms.iter().map(|(k, v)| (*k, *v))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, a: u32, b: u32) -> f64 {
        self.terms.get(&(a, b)).copied().unwrap_or(0.0)
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn as_constant(&self) -> Option<f64> {
        match self.terms.len() {
            0 => Some(0.0),
            1 => self.terms.get(&(0, 0)).copied(),
            _ => None,
        }
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.abs()).fold(0.0, f64::max)
    }

    fn push(&mut self, key: (u32, u32), c: f64) {
        let v = self.terms.entry(key).or_insert(0.0);
        *v += c;
        if *v == 0.0 {
            self.terms.remove(&key);
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (k, c) in other.terms() {
            out.push(k, c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(-1.0))
    }

    pub fn scale(&self, k: f64) -> Poly {
        let mut out = Poly::zero();
        for (key, c) in self.terms() {
            out.push(key, k * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for ((a1, b1), c1) in self.terms() {
            for ((a2, b2), c2) in other.terms() {
                out.push((a1 + a2, b1 + b2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::constant(1.0);
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn eval(&self, p: [f64; 2]) -> f64 {
        self.terms().map(|((a, b), c)| c * p[0].powi(a as i32) * p[1].powi(b as i32)).sum()
    }

    /// Drops coefficients below `rel` times the largest one.
    pub fn cleaned(&self, rel: f64) -> Poly {
        let cut = rel * self.max_coeff();
        Poly { terms: self.terms.iter().filter(|(_, c)| c.abs() > cut).map(|(k, c)| (*k, *c)).collect() }
    }

    /// `ρ^d · P(w1/ρ, -w2/ρ)` with `ρ = w1² + w2²`, i.e. `P(1/w)` in complex
    /// notation with its poles cleared. Requires `d >= degree`.
    pub fn inverted(&self, d: u32) -> Poly {
        assert!(d >= self.degree());
        let rho = Poly::rho();
        let mut out = Poly::zero();
        for ((a, b), c) in self.terms() {
            let sign = if b % 2 == 0 { 1.0 } else { -1.0 };
            let term = Poly::monomial(sign * c, a, b).mul(&rho.pow(d - a - b));
            out = out.add(&term);
        }
        out
    }

    /// Exact quotient by `x1² + x2²`, if the remainder is negligible
    /// relative to the coefficients.
    pub fn div_rho(&self, rel: f64) -> Option<Poly> {
        if self.is_zero() {
            return None;
        }
        let scale = self.max_coeff();
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        loop {
            let lead = rem.terms.iter().rev().find(|((a, _), _)| *a >= 2).map(|(k, c)| (*k, *c));
            let Some(((a, b), c)) = lead else { break };
            quot.push((a - 2, b), c);
            rem.push((a, b), -c);
            rem.push((a - 2, b + 2), -c);
        }
        if rem.max_coeff() <= rel * scale {
            Some(quot.cleaned(rel))
        } else {
            None
        }
    }

    /// Converts an expression over `x1`, `x2`; fails on anything that is
    /// not a polynomial.
    pub fn from_expr(e: &Expr) -> Result<Poly, String> {
        Ok(match e {
            Expr::Num(v) => Poly::constant(*v),
            Expr::Const(c) => Poly::constant(c.value()),
            Expr::Var(Var::X1) => Poly::x1(),
            Expr::Var(Var::X2) => Poly::x2(),
            Expr::Var(Var::S) => return Err("unbound parameter s".into()),
            Expr::Neg(a) => Poly::from_expr(a)?.scale(-1.0),
            Expr::Bin(op, a, b) => {
                let (pa, pb) = (Poly::from_expr(a)?, Poly::from_expr(b)?);
                match op {
                    BinOp::Add => pa.add(&pb),
                    BinOp::Sub => pa.sub(&pb),
                    BinOp::Mul => pa.mul(&pb),
                    BinOp::Div => match pb.as_constant() {
                        Some(c) if c != 0.0 => pa.scale(1.0 / c),
                        _ => return Err(format!("division by non-constant `{b}`")),
                    },
                    BinOp::Pow => match (pa.as_constant(), pb.as_constant()) {
                        (Some(x), Some(y)) => Poly::constant(x.powf(y)),
                        (_, Some(y)) if y >= 0.0 && y.fract() == 0.0 && y <= MAX_EXPONENT as f64 => pa.pow(y as u32),
                        _ => return Err(format!("non-integer or variable exponent `{b}`")),
                    },
                }
            }
            Expr::Call(func, a) => {
                let pa = Poly::from_expr(a)?;
                match pa.as_constant() {
                    Some(c) => {
                        let v = Expr::call(*func, Expr::num(c)).eval([0.0, 0.0], None).map_err(|err| err.to_string())?;
                        Poly::constant(v)
                    }
                    None => return Err(format!("`{}` of a non-constant argument", func.name())),
                }
            }
        })
    }

    /// Expression over `x1`, `x2` in a fixed term order.
    pub fn to_expr(&self) -> Expr {
        let mut out: Option<Expr> = None;
        for ((a, b), c) in self.terms() {
            let mut factors = Vec::new();
            for (v, n) in [(Var::X1, a), (Var::X2, b)] {
                match n {
                    0 => {}
                    1 => factors.push(Expr::var(v)),
                    _ => factors.push(Expr::bin(BinOp::Pow, Expr::var(v), Expr::num(n as f64))),
                }
            }
            let mono = factors.into_iter().reduce(|x, y| x * y);
            let (term, negative) = match mono {
                None => (Expr::num(c.abs()), c < 0.0),
                Some(m) if c.abs() == 1.0 => (m, c < 0.0),
                Some(m) => (Expr::num(c.abs()) * m, c < 0.0),
            };
            out = Some(match (out, negative) {
                (None, false) => term,
                (None, true) => Expr::neg(term),
                (Some(acc), false) => acc + term,
                (Some(acc), true) => acc - term,
            });
        }
        out.unwrap_or(Expr::num(0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;

    fn poly(src: &str) -> Poly {
        Poly::from_expr(&parse(src).unwrap()).unwrap()
    }

    #[test]
    fn expansion() {
        let p = poly("(x1 + x2)^2 - 2*x1*x2");
        assert_eq!(p, poly("x1^2 + x2^2"));
        assert_eq!(p.degree(), 2);
        assert_eq!(poly("x1/2 + pi").coeff(0, 0), std::f64::consts::PI);
    }

    #[test]
    fn constant_calls_fold() {
        assert_eq!(poly("x1 * cos(0)"), Poly::x1());
    }

    #[test]
    fn rejects_transcendental() {
        for src in ["sin(x1)", "x1^0.5", "1/x1", "x1^x2", "exp(x2)", "x1 * s"] {
            assert!(Poly::from_expr(&parse(src).unwrap()).is_err(), "{src}");
        }
    }

    #[test]
    fn inversion_of_the_unit_circle() {
        // (x1² + x2² - 1) at 1/w, times ρ: 1 - ρ
        let p = poly("x1^2 + x2^2 - 1").inverted(2).div_rho(1e-12).unwrap();
        assert_eq!(p, poly("1 - x1^2 - x2^2"));
    }

    #[test]
    fn inversion_matches_complex_reciprocal() {
        let p = poly("x1^3 - 2*x1*x2 + 0.5*x2 + 3");
        let d = p.degree();
        let q = p.inverted(d);
        for w in [[0.3, -0.7], [1.4, 0.2], [-0.9, -1.1]] {
            let rho = w[0] * w[0] + w[1] * w[1];
            let z = [w[0] / rho, -w[1] / rho];
            let want = p.eval(z) * rho.powi(d as i32);
            assert!((q.eval(w) - want).abs() < 1e-12 * want.abs().max(1.0));
        }
    }

    #[test]
    fn division_by_rho() {
        let q = poly("x1^3 - x2 + 4");
        let p = q.mul(&Poly::rho());
        assert_eq!(p.div_rho(1e-12).unwrap(), q);
        assert!(poly("x1^2 + 1").div_rho(1e-12).is_none());
    }

    #[test]
    fn expression_round_trip() {
        let p = poly("-3*x1^2*x2 + x2^3 - x1 + 0.25");
        let e = p.to_expr();
        assert_eq!(Poly::from_expr(&e).unwrap(), p);
        assert_eq!(Poly::zero().to_expr().to_string(), Expr::num(0.0).to_string());
    }
}
