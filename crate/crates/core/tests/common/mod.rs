#![allow(dead_code)]

use degindex::expr::{BinOp, Expr, Func, Var};
use degindex::poly::Poly;
use proptest::prelude::*;
use rand::Rng;

/// Random expressions over `x1`, `x2`, with every operator and function.
pub fn any_expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-4.0f64..4.0).prop_map(|v| Expr::num((v * 100.0).round() / 100.0)),
        Just(Expr::var(Var::X1)),
        Just(Expr::var(Var::X2)),
        Just(Expr::Const(degindex::expr::Constant::Pi)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::bin(BinOp::Div, a, b)),
            (inner.clone(), 0u32..4).prop_map(|(a, n)| Expr::bin(BinOp::Pow, a, Expr::num(n as f64))),
            inner.clone().prop_map(Expr::neg),
            (inner, 0usize..Func::ALL.len()).prop_map(|(a, k)| Expr::call(Func::ALL[k], a)),
        ]
    })
}

/// Random polynomials of low degree, which are smooth everywhere.
pub fn any_polynomial() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (-3.0f64..3.0).prop_map(Expr::num),
        Just(Expr::var(Var::X1)),
        Just(Expr::var(Var::X2)),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner, 1u32..4).prop_map(|(a, n)| Expr::bin(BinOp::Pow, a, Expr::num(n as f64))),
        ]
    })
}

/// `Re z^k` and `Im z^k` for `z = x1 + i·x2`, equal to `cos kθ` and
/// `sin kθ` on the unit circle.
pub fn power_parts(k: u32) -> (Poly, Poly) {
    let (mut re, mut im) = (Poly::constant(1.0), Poly::zero());
    for _ in 0..k {
        let nre = re.mul(&Poly::x1()).sub(&im.mul(&Poly::x2()));
        let nim = re.mul(&Poly::x2()).add(&im.mul(&Poly::x1()));
        re = nre;
        im = nim;
    }
    (re, im)
}

/// A random field whose components are trigonometric polynomials of degree
/// at most `max_degree` along the unit circle, plus a random multiple of
/// the rotation field so that rotating cases occur.
pub fn trig_field(rng: &mut impl Rng, max_degree: u32) -> (String, String) {
    let d = rng.gen_range(0..=max_degree);
    let alpha = rng.gen_range(-2.0..2.0);
    let mut comps = [Poly::monomial(-alpha, 0, 1), Poly::monomial(alpha, 1, 0)];
    for c in comps.iter_mut() {
        for k in 0..=d {
            let (re, im) = power_parts(k);
            let a: f64 = rng.gen_range(-1.0..1.0);
            let b: f64 = rng.gen_range(-1.0..1.0);
            *c = c.add(&re.scale(a)).add(&im.scale(b));
        }
    }
    (comps[0].to_expr().to_string(), comps[1].to_expr().to_string())
}

/// Richardson-extrapolated central difference of `g` along one axis.
pub fn richardson(g: impl Fn(f64) -> Option<f64>, x: f64) -> Option<f64> {
    let h = 1e-3 * x.abs().max(1.0);
    let d = |h: f64| Some((g(x + h)? - g(x - h)?) / (2.0 * h));
    let (d1, d2) = (d(h)?, d(0.5 * h)?);
    Some((4.0 * d2 - d1) / 3.0)
}
