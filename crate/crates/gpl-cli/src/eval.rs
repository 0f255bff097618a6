//! Evaluation of parsed expressions over a free algebra: values live in the
//! unital extension so circular products and inverses are first class.

use gpl_core::error::{Error, Result};
use gpl_core::gamma::{AlgebraElement, GammaAlgebra};
use gpl_core::gauge::{self, GaugeElement, UnitPlus};
use gpl_core::ring::Scalar;
use gpl_core::trees::ClassTree;

use crate::parser::Expr;

pub type Value = UnitPlus<AlgebraElement>;

pub fn zero_value(alg: &GammaAlgebra) -> Value {
    UnitPlus { unit: alg.ring().zero(), body: AlgebraElement::zero() }
}

pub fn evaluate(alg: &GammaAlgebra, e: &Expr) -> Result<Value> {
    match e {
        Expr::One => Ok(UnitPlus { unit: alg.ring().one(), body: AlgebraElement::zero() }),
        Expr::Number(n) => Ok(UnitPlus {
            unit: Scalar::parse(alg.ring(), n)?,
            body: AlgebraElement::zero(),
        }),
        Expr::Tree(text) => {
            let tree = ClassTree::parse(alg.gens(), text)?;
            Ok(UnitPlus { unit: alg.ring().zero(), body: alg.class_element(&tree) })
        }
        Expr::Sum(terms) => {
            let mut acc = zero_value(alg);
            for (neg, t) in terms {
                let v = evaluate(alg, t)?;
                let v = if *neg { neg_value(alg, &v) } else { v };
                acc = add_values(alg, &acc, &v)?;
            }
            Ok(acc)
        }
        Expr::ScalarMul(c, inner) => {
            let coeff = Scalar::parse(alg.ring(), c)?;
            let v = evaluate(alg, inner)?;
            Ok(UnitPlus { unit: coeff.mul(&v.unit)?, body: alg.scale(&coeff, &v.body)? })
        }
        Expr::Star(a, b) => {
            let x = body_only(alg, &evaluate(alg, a)?)?;
            let y = body_only(alg, &evaluate(alg, b)?)?;
            Ok(UnitPlus { unit: alg.ring().zero(), body: alg.star(&x, &y)? })
        }
        Expr::Circ(a, b) => {
            let lhs = evaluate(alg, a)?;
            let g = as_gauge(alg, &evaluate(alg, b)?)?;
            gauge::circ(alg, &lhs, &g)
        }
        Expr::CircInverse(inner) => {
            let g = as_gauge(alg, &evaluate(alg, inner)?)?;
            let inv = gauge::gauge_inverse(alg, &g)?;
            Ok(UnitPlus { unit: alg.ring().one(), body: inv.mu })
        }
        Expr::Differential(inner) => {
            let v = evaluate(alg, inner)?;
            Ok(UnitPlus { unit: alg.ring().zero(), body: alg.differentiate(&v.body)? })
        }
        Expr::GaugeAct(g, a) => {
            let gauge_el = as_gauge(alg, &evaluate(alg, g)?)?;
            let alpha = body_only(alg, &evaluate(alg, a)?)?;
            let moved = gauge::gauge_act(alg, &gauge_el, &alpha)?;
            Ok(UnitPlus { unit: alg.ring().zero(), body: moved })
        }
        Expr::Brace(head, args, weights) => {
            let h = evaluate(alg, head)?;
            let mut brace_args = Vec::new();
            for (a, w) in args.iter().zip(weights.iter()) {
                let v = evaluate(alg, a)?;
                if !v.unit.is_zero() {
                    return Err(Error::UnitArgument);
                }
                brace_args.push((v.body, *w));
            }
            // the unital extension: 1{y}_1 = y, higher total weight kills 1
            let mut body = alg.brace(&h.body, &brace_args)?;
            let mut unit = alg.ring().zero();
            if !h.unit.is_zero() {
                let total: u32 = brace_args.iter().map(|(_, r)| *r).sum();
                match total {
                    0 => unit = h.unit.clone(),
                    1 => {
                        let (y, _) = brace_args.iter().find(|(_, r)| *r == 1).unwrap();
                        body = alg.add(&body, &alg.scale(&h.unit, y)?)?;
                    }
                    _ => {}
                }
            }
            Ok(UnitPlus { unit, body })
        }
    }
}

fn neg_value(alg: &GammaAlgebra, v: &Value) -> Value {
    UnitPlus { unit: v.unit.neg(), body: alg.neg(&v.body) }
}

fn add_values(alg: &GammaAlgebra, a: &Value, b: &Value) -> Result<Value> {
    Ok(UnitPlus { unit: a.unit.add(&b.unit)?, body: alg.add(&a.body, &b.body)? })
}

fn body_only(alg: &GammaAlgebra, v: &Value) -> Result<AlgebraElement> {
    let _ = alg;
    if v.unit.is_zero() {
        Ok(v.body.clone())
    } else {
        Err(Error::UnitArgument)
    }
}

fn as_gauge(alg: &GammaAlgebra, v: &Value) -> Result<GaugeElement<AlgebraElement>> {
    if !v.unit.is_one() {
        return Err(Error::NotUnital(format!(
            "gauge elements have unit coefficient 1, got {}",
            v.unit
        )));
    }
    gauge::gauge(alg, v.body.clone())
}

/// Canonical text of a value: the element text, prefixed with the unit part
/// when present.
pub fn render_value(alg: &GammaAlgebra, v: &Value) -> String {
    if v.unit.is_zero() {
        alg.render(&v.body)
    } else if v.body.is_zero() {
        if v.unit.is_one() {
            "1".to_string()
        } else {
            format!("{}*1", v.unit)
        }
    } else if v.unit.is_one() {
        format!("1 + {}", alg.render(&v.body))
    } else {
        format!("{}*1 + {}", v.unit, alg.render(&v.body))
    }
}
