//! Exact commutative coefficient rings.
//!
//! Supported rings: the integers, the rationals, prime fields F_p, residue
//! rings Z/m, and truncated local algebras K[t]/(t^N) over a prime field or
//! the rationals. All arithmetic is exact; there is no floating point
//! anywhere in the engine.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Descriptor of a commutative coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Ring {
    Integers,
    Rationals,
    PrimeField { p: u64 },
    IntegersMod { m: u64 },
    TruncatedLocal { base: Box<Ring>, n: u32 },
}

impl Ring {
    pub fn integers() -> Self {
        Ring::Integers
    }

    pub fn rationals() -> Self {
        Ring::Rationals
    }

    pub fn prime_field(p: u64) -> Self {
        Ring::PrimeField { p }
    }

    pub fn integers_mod(m: u64) -> Self {
        Ring::IntegersMod { m }
    }

    pub fn truncated_local(base: Ring, n: u32) -> Self {
        Ring::TruncatedLocal { base: Box::new(base), n }
    }

    /// Checks the structural invariants of the descriptor: p prime, m >= 2,
    /// truncated local algebras over a field with nilpotency N >= 1.
    pub fn validate(&self) -> Result<()> {
        match self {
            Ring::Integers | Ring::Rationals => Ok(()),
            Ring::PrimeField { p } => {
                if is_prime(*p) {
                    Ok(())
                } else {
                    Err(Error::InvalidRing(format!("{p} is not prime")))
                }
            }
            Ring::IntegersMod { m } => {
                if *m >= 2 {
                    Ok(())
                } else {
                    Err(Error::InvalidRing(format!("modulus {m} < 2")))
                }
            }
            Ring::TruncatedLocal { base, n } => {
                base.validate()?;
                match **base {
                    Ring::PrimeField { .. } | Ring::Rationals => {}
                    _ => {
                        return Err(Error::InvalidRing(
                            "truncated local base must be a prime field or the rationals".into(),
                        ))
                    }
                }
                if *n >= 1 {
                    Ok(())
                } else {
                    Err(Error::InvalidRing("nilpotency must be >= 1".into()))
                }
            }
        }
    }

    /// Ring characteristic; 0 for the integers and the rationals.
    pub fn characteristic(&self) -> u64 {
        match self {
            Ring::Integers | Ring::Rationals => 0,
            Ring::PrimeField { p } => *p,
            Ring::IntegersMod { m } => *m,
            Ring::TruncatedLocal { base, .. } => base.characteristic(),
        }
    }

    /// True when 1 + 1 = 0.
    pub fn has_char_two(&self) -> bool {
        self.characteristic() == 2
    }

    pub fn is_field(&self) -> bool {
        matches!(self, Ring::Rationals | Ring::PrimeField { .. })
    }

    /// Number of elements for finite rings.
    pub fn cardinality(&self) -> Option<u128> {
        match self {
            Ring::Integers | Ring::Rationals => None,
            Ring::PrimeField { p } => Some(*p as u128),
            Ring::IntegersMod { m } => Some(*m as u128),
            Ring::TruncatedLocal { base, n } => {
                base.cardinality().map(|c| c.pow(*n))
            }
        }
    }

    pub fn zero(&self) -> Scalar {
        Scalar::from_int(self, 0)
    }

    pub fn one(&self) -> Scalar {
        Scalar::from_int(self, 1)
    }

    /// All elements of a finite ring, in a fixed deterministic order.
    pub fn elements(&self) -> Option<Vec<Scalar>> {
        match self {
            Ring::PrimeField { p } => Some(
                (0..*p).map(|v| Scalar { ring: self.clone(), value: Value::Res(v) }).collect(),
            ),
            Ring::IntegersMod { m } => Some(
                (0..*m).map(|v| Scalar { ring: self.clone(), value: Value::Res(v) }).collect(),
            ),
            Ring::TruncatedLocal { base, n } => {
                let base_elems = base.elements()?;
                let mut out = vec![vec![]];
                for _ in 0..*n {
                    let mut next = Vec::new();
                    for prefix in &out {
                        for b in &base_elems {
                            let mut v: Vec<Value> = prefix.clone();
                            v.push(b.value.clone());
                            next.push(v);
                        }
                    }
                    out = next;
                }
                Some(
                    out.into_iter()
                        .map(|coeffs| Scalar { ring: self.clone(), value: Value::Poly(coeffs) })
                        .collect(),
                )
            }
            _ => None,
        }
    }
}

impl fmt::Display for Ring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ring::Integers => write!(f, "Z"),
            Ring::Rationals => write!(f, "Q"),
            Ring::PrimeField { p } => write!(f, "F{p}"),
            Ring::IntegersMod { m } => write!(f, "Z/{m}"),
            Ring::TruncatedLocal { base, n } => write!(f, "{base}[t]/t^{n}"),
        }
    }
}

fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Value {
    Int(BigInt),
    Rat(BigRational),
    Res(u64),
    /// Coefficients of 1, t, ..., t^{N-1} in the base ring.
    Poly(Vec<Value>),
}

/// An exact element of a coefficient ring.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Scalar {
    ring: Ring,
    value: Value,
}

impl Scalar {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Image of an integer under the unique unital ring map Z -> R.
    pub fn from_int(ring: &Ring, n: i64) -> Scalar {
        Scalar::from_bigint(ring, &BigInt::from(n))
    }

    pub fn from_bigint(ring: &Ring, n: &BigInt) -> Scalar {
        let value = match ring {
            Ring::Integers => Value::Int(n.clone()),
            Ring::Rationals => Value::Rat(BigRational::from_integer(n.clone())),
            Ring::PrimeField { p } => Value::Res(mod_reduce(n, *p)),
            Ring::IntegersMod { m } => Value::Res(mod_reduce(n, *m)),
            Ring::TruncatedLocal { base, n: nil } => {
                let mut coeffs = vec![base.zero().value; *nil as usize];
                coeffs[0] = Scalar::from_bigint(base, n).value;
                Value::Poly(coeffs)
            }
        };
        Scalar { ring: ring.clone(), value }
    }

    /// The maximal-ideal generator t of a truncated local ring.
    pub fn t(ring: &Ring) -> Result<Scalar> {
        match ring {
            Ring::TruncatedLocal { base, n } => {
                let mut coeffs = vec![base.zero().value; *n as usize];
                if *n >= 2 {
                    coeffs[1] = base.one().value;
                }
                Ok(Scalar { ring: ring.clone(), value: Value::Poly(coeffs) })
            }
            other => Err(Error::WrongRingKind {
                expected: "truncated_local".into(),
                got: other.to_string(),
            }),
        }
    }

    /// Builds an element of K[t]/(t^N) from base-ring coefficients of
    /// 1, t, t^2, ... (truncating or zero-padding to length N).
    pub fn poly(ring: &Ring, coeffs: &[Scalar]) -> Result<Scalar> {
        match ring {
            Ring::TruncatedLocal { base, n } => {
                let mut vals = vec![base.zero().value; *n as usize];
                for (k, c) in coeffs.iter().enumerate() {
                    if k >= *n as usize {
                        break;
                    }
                    if c.ring != **base {
                        return Err(Error::RingMismatch(c.ring.to_string(), base.to_string()));
                    }
                    vals[k] = c.value.clone();
                }
                Ok(Scalar { ring: ring.clone(), value: Value::Poly(vals) })
            }
            other => Err(Error::WrongRingKind {
                expected: "truncated_local".into(),
                got: other.to_string(),
            }),
        }
    }

    pub fn rational(num: i64, den: i64) -> Scalar {
        Scalar {
            ring: Ring::Rationals,
            value: Value::Rat(BigRational::new(BigInt::from(num), BigInt::from(den))),
        }
    }

    pub fn is_zero(&self) -> bool {
        match &self.value {
            Value::Int(v) => v.is_zero(),
            Value::Rat(v) => v.is_zero(),
            Value::Res(v) => *v == 0,
            Value::Poly(cs) => cs.iter().all(value_is_zero),
        }
    }

    pub fn is_one(&self) -> bool {
        self == &self.ring.one()
    }

    fn check_same_ring(&self, other: &Scalar) -> Result<()> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch(self.ring.to_string(), other.ring.to_string()));
        }
        Ok(())
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same_ring(other)?;
        Ok(Scalar {
            ring: self.ring.clone(),
            value: value_add(&self.ring, &self.value, &other.value),
        })
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Scalar {
        Scalar { ring: self.ring.clone(), value: value_neg(&self.ring, &self.value) }
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar> {
        self.check_same_ring(other)?;
        Ok(Scalar {
            ring: self.ring.clone(),
            value: value_mul(&self.ring, &self.value, &other.value),
        })
    }

    pub fn mul_int(&self, n: i64) -> Scalar {
        let other = Scalar::from_int(&self.ring, n);
        self.mul(&other).expect("same ring by construction")
    }

    pub fn pow(&self, e: u32) -> Scalar {
        let mut acc = self.ring.one();
        for _ in 0..e {
            acc = acc.mul(self).expect("same ring");
        }
        acc
    }

    /// Multiplicative inverse in a field.
    pub fn inverse(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DegreeError("division by zero".into()));
        }
        match (&self.ring, &self.value) {
            (Ring::Rationals, Value::Rat(v)) => Ok(Scalar {
                ring: Ring::Rationals,
                value: Value::Rat(v.recip()),
            }),
            (Ring::PrimeField { p }, Value::Res(v)) => Ok(Scalar {
                ring: self.ring.clone(),
                value: Value::Res(mod_inverse(*v, *p)),
            }),
            _ => Err(Error::WrongRingKind {
                expected: "field".into(),
                got: self.ring.to_string(),
            }),
        }
    }

    /// Least t-power with nonzero coefficient; `None` encodes infinity (the
    /// zero element). Only defined over a truncated local ring.
    pub fn maximal_ideal_valuation(&self) -> Result<Option<u32>> {
        match (&self.ring, &self.value) {
            (Ring::TruncatedLocal { .. }, Value::Poly(cs)) => Ok(cs
                .iter()
                .position(|c| !value_is_zero(c))
                .map(|k| k as u32)),
            _ => Err(Error::WrongRingKind {
                expected: "truncated_local".into(),
                got: self.ring.to_string(),
            }),
        }
    }

    /// Coefficient of t^k as a base-ring scalar.
    pub fn t_coefficient(&self, k: u32) -> Result<Scalar> {
        match (&self.ring, &self.value) {
            (Ring::TruncatedLocal { base, .. }, Value::Poly(cs)) => {
                let v = cs.get(k as usize).cloned().unwrap_or_else(|| base.zero().value);
                Ok(Scalar { ring: (**base).clone(), value: v })
            }
            _ => Err(Error::WrongRingKind {
                expected: "truncated_local".into(),
                got: self.ring.to_string(),
            }),
        }
    }

    /// Applies the unique unital map induced on images of Z: only scalars in
    /// the image of Z -> R can be transported exactly to another ring. Used
    /// by the base-change tests; returns `None` for non-integral rationals.
    pub fn try_to_integer(&self) -> Option<BigInt> {
        match &self.value {
            Value::Int(v) => Some(v.clone()),
            Value::Rat(v) if v.is_integer() => Some(v.to_integer()),
            _ => None,
        }
    }

    /// Parses the ring-specific exact text form produced by `Display`.
    pub fn parse(ring: &Ring, text: &str) -> Result<Scalar> {
        let s = text.trim();
        match ring {
            Ring::Integers => {
                let v: BigInt = s.parse().map_err(|_| Error::BadScalar(s.into()))?;
                Ok(Scalar { ring: ring.clone(), value: Value::Int(v) })
            }
            Ring::Rationals => {
                if let Some((a, b)) = s.split_once('/') {
                    let num: BigInt = a.trim().parse().map_err(|_| Error::BadScalar(s.into()))?;
                    let den: BigInt = b.trim().parse().map_err(|_| Error::BadScalar(s.into()))?;
                    if den.is_zero() {
                        return Err(Error::BadScalar(s.into()));
                    }
                    Ok(Scalar { ring: ring.clone(), value: Value::Rat(BigRational::new(num, den)) })
                } else {
                    let v: BigInt = s.parse().map_err(|_| Error::BadScalar(s.into()))?;
                    Ok(Scalar { ring: ring.clone(), value: Value::Rat(BigRational::from_integer(v)) })
                }
            }
            Ring::PrimeField { .. } | Ring::IntegersMod { .. } => {
                let v: BigInt = s.parse().map_err(|_| Error::BadScalar(s.into()))?;
                Ok(Scalar::from_bigint(ring, &v))
            }
            Ring::TruncatedLocal { base, n } => {
                // Sum of monomials c, c*t, c*t^k separated by `+`.
                let mut coeffs = vec![base.zero(); *n as usize];
                for part in s.split('+') {
                    let part = part.trim();
                    if part.is_empty() {
                        return Err(Error::BadScalar(s.into()));
                    }
                    let (coeff_txt, power) = parse_monomial(part)?;
                    let c = Scalar::parse(base, &coeff_txt)?;
                    if (power as usize) < coeffs.len() {
                        coeffs[power as usize] = coeffs[power as usize].add(&c)?;
                    }
                }
                Scalar::poly(ring, &coeffs)
            }
        }
    }
}

/// Splits a monomial `c`, `t`, `c*t`, `t^k` or `c*t^k` into (coefficient
/// text, power of t).
fn parse_monomial(part: &str) -> Result<(String, u32)> {
    let bad = || Error::BadScalar(part.into());
    if let Some(idx) = part.find('t') {
        let coeff = part[..idx].trim().trim_end_matches('*').trim();
        let coeff = if coeff.is_empty() { "1".to_string() } else { coeff.to_string() };
        let rest = part[idx + 1..].trim();
        let power = if rest.is_empty() {
            1
        } else {
            let rest = rest.strip_prefix('^').ok_or_else(bad)?;
            rest.trim().parse::<u32>().map_err(|_| bad())?
        };
        Ok((coeff, power))
    } else {
        Ok((part.to_string(), 0))
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.ring, &self.value) {
            (_, Value::Int(v)) => write!(f, "{v}"),
            (_, Value::Rat(v)) => {
                if v.is_integer() {
                    write!(f, "{}", v.numer())
                } else {
                    write!(f, "{}/{}", v.numer(), v.denom())
                }
            }
            (_, Value::Res(v)) => write!(f, "{v}"),
            (Ring::TruncatedLocal { base, .. }, Value::Poly(cs)) => {
                let mut wrote = false;
                for (k, c) in cs.iter().enumerate() {
                    if value_is_zero(c) {
                        continue;
                    }
                    if wrote {
                        write!(f, " + ")?;
                    }
                    let coeff = Scalar { ring: (**base).clone(), value: c.clone() };
                    match k {
                        0 => write!(f, "{coeff}")?,
                        1 => write!(f, "{coeff}*t")?,
                        _ => write!(f, "{coeff}*t^{k}")?,
                    }
                    wrote = true;
                }
                if !wrote {
                    write!(f, "0")?;
                }
                Ok(())
            }
            _ => unreachable!("value/ring invariant"),
        }
    }
}

fn value_is_zero(v: &Value) -> bool {
    match v {
        Value::Int(x) => x.is_zero(),
        Value::Rat(x) => x.is_zero(),
        Value::Res(x) => *x == 0,
        Value::Poly(cs) => cs.iter().all(value_is_zero),
    }
}

fn value_add(ring: &Ring, a: &Value, b: &Value) -> Value {
    match (ring, a, b) {
        (Ring::Integers, Value::Int(x), Value::Int(y)) => Value::Int(x + y),
        (Ring::Rationals, Value::Rat(x), Value::Rat(y)) => Value::Rat(x + y),
        (Ring::PrimeField { p }, Value::Res(x), Value::Res(y)) => {
            Value::Res(((*x as u128 + *y as u128) % *p as u128) as u64)
        }
        (Ring::IntegersMod { m }, Value::Res(x), Value::Res(y)) => {
            Value::Res(((*x as u128 + *y as u128) % *m as u128) as u64)
        }
        (Ring::TruncatedLocal { base, .. }, Value::Poly(xs), Value::Poly(ys)) => Value::Poly(
            xs.iter().zip(ys.iter()).map(|(x, y)| value_add(base, x, y)).collect(),
        ),
        _ => unreachable!("value/ring invariant"),
    }
}

fn value_neg(ring: &Ring, a: &Value) -> Value {
    match (ring, a) {
        (Ring::Integers, Value::Int(x)) => Value::Int(-x),
        (Ring::Rationals, Value::Rat(x)) => Value::Rat(-x),
        (Ring::PrimeField { p }, Value::Res(x)) => Value::Res(if *x == 0 { 0 } else { p - x }),
        (Ring::IntegersMod { m }, Value::Res(x)) => Value::Res(if *x == 0 { 0 } else { m - x }),
        (Ring::TruncatedLocal { base, .. }, Value::Poly(xs)) => {
            Value::Poly(xs.iter().map(|x| value_neg(base, x)).collect())
        }
        _ => unreachable!("value/ring invariant"),
    }
}

fn value_mul(ring: &Ring, a: &Value, b: &Value) -> Value {
    match (ring, a, b) {
        (Ring::Integers, Value::Int(x), Value::Int(y)) => Value::Int(x * y),
        (Ring::Rationals, Value::Rat(x), Value::Rat(y)) => Value::Rat(x * y),
        (Ring::PrimeField { p }, Value::Res(x), Value::Res(y)) => {
            Value::Res(((*x as u128 * *y as u128) % *p as u128) as u64)
        }
        (Ring::IntegersMod { m }, Value::Res(x), Value::Res(y)) => {
            Value::Res(((*x as u128 * *y as u128) % *m as u128) as u64)
        }
        (Ring::TruncatedLocal { base, n }, Value::Poly(xs), Value::Poly(ys)) => {
            let n = *n as usize;
            let mut out = vec![base.zero().value; n];
            for (i, x) in xs.iter().enumerate() {
                if value_is_zero(x) {
                    continue;
                }
                for (j, y) in ys.iter().enumerate() {
                    if i + j >= n {
                        break;
                    }
                    let prod = value_mul(base, x, y);
                    out[i + j] = value_add(base, &out[i + j], &prod);
                }
            }
            Value::Poly(out)
        }
        _ => unreachable!("value/ring invariant"),
    }
}

fn mod_reduce(n: &BigInt, m: u64) -> u64 {
    let m_big = BigInt::from(m);
    let mut r = n % &m_big;
    if r.is_negative() {
        r += &m_big;
    }
    let digits = r.to_u64_digits().1;
    digits.first().copied().unwrap_or(0)
}

fn mod_inverse(v: u64, p: u64) -> u64 {
    // Fermat: v^(p-2) mod p.
    let mut result: u128 = 1;
    let mut base = v as u128 % p as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    result as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn all_rings() -> Vec<Ring> {
        vec![
            Ring::Integers,
            Ring::Rationals,
            Ring::prime_field(2),
            Ring::prime_field(3),
            Ring::prime_field(5),
            Ring::integers_mod(4),
            Ring::truncated_local(Ring::prime_field(2), 3),
            Ring::truncated_local(Ring::Rationals, 2),
        ]
    }

    #[test]
    fn from_integer_examples() {
        assert_eq!(Scalar::from_int(&Ring::prime_field(2), 5), Ring::prime_field(2).one());
        for ring in all_rings() {
            assert!(Scalar::from_int(&ring, 0).is_zero());
        }
        let r = Ring::integers_mod(4);
        assert_eq!(Scalar::from_int(&r, -6), Scalar::from_int(&r, 2));
    }

    #[test]
    fn arithmetic_examples() {
        let half = Scalar::rational(1, 2);
        let third = Scalar::rational(1, 3);
        assert_eq!(half.add(&third).unwrap(), Scalar::rational(5, 6));

        let r = Ring::truncated_local(Ring::prime_field(2), 3);
        let t = Scalar::t(&r).unwrap();
        let t2 = t.mul(&t).unwrap();
        assert!(!t2.is_zero());
        assert!(t2.mul(&t).unwrap().is_zero());

        let f5 = Ring::prime_field(5);
        assert_eq!(
            Scalar::from_int(&f5, 2).mul(&Scalar::from_int(&f5, 3)).unwrap(),
            f5.one()
        );
    }

    #[test]
    fn ring_mismatch_is_an_error() {
        let a = Ring::prime_field(2).one();
        let b = Ring::prime_field(3).one();
        assert!(matches!(a.add(&b), Err(Error::RingMismatch(_, _))));
    }

    #[test]
    fn valuation_examples() {
        let r = Ring::truncated_local(Ring::prime_field(5), 3);
        let t = Scalar::t(&r).unwrap();
        let x = t.add(&t.mul(&t).unwrap()).unwrap(); // t + t^2
        assert_eq!(x.maximal_ideal_valuation().unwrap(), Some(1));
        assert_eq!(r.zero().maximal_ideal_valuation().unwrap(), None);
        let y = r.one().add(&t).unwrap();
        assert_eq!(y.maximal_ideal_valuation().unwrap(), Some(0));
        assert!(matches!(
            Ring::Integers.one().maximal_ideal_valuation(),
            Err(Error::WrongRingKind { .. })
        ));
    }

    #[test]
    fn nilpotency_of_maximal_ideal() {
        let r = Ring::truncated_local(Ring::prime_field(3), 4);
        for s in r.elements().unwrap() {
            if s.maximal_ideal_valuation().unwrap().map_or(true, |v| v >= 1) {
                assert!(s.pow(4).is_zero());
            }
        }
    }

    #[test]
    fn descriptor_validation() {
        assert!(Ring::prime_field(6).validate().is_err());
        assert!(Ring::prime_field(7).validate().is_ok());
        assert!(Ring::integers_mod(1).validate().is_err());
        assert!(Ring::truncated_local(Ring::integers_mod(4), 2).validate().is_err());
        assert!(Ring::truncated_local(Ring::Rationals, 1).validate().is_ok());
    }

    #[test]
    fn descriptor_json_round_trip() {
        for ring in all_rings() {
            let json = serde_json::to_string(&ring).unwrap();
            let back: Ring = serde_json::from_str(&json).unwrap();
            assert_eq!(ring, back);
        }
        let parsed: Ring =
            serde_json::from_str(r#"{"kind":"prime_field","p":3}"#).unwrap();
        assert_eq!(parsed, Ring::prime_field(3));
        let parsed: Ring = serde_json::from_str(
            r#"{"kind":"truncated_local","base":{"kind":"prime_field","p":2},"n":3}"#,
        )
        .unwrap();
        assert_eq!(parsed, Ring::truncated_local(Ring::prime_field(2), 3));
    }

    #[test]
    fn scalar_text_round_trip() {
        let r = Ring::truncated_local(Ring::prime_field(5), 3);
        for s in r.elements().unwrap() {
            let text = s.to_string();
            assert_eq!(Scalar::parse(&r, &text).unwrap(), s);
        }
        assert_eq!(
            Scalar::parse(&Ring::Rationals, "-7/3").unwrap(),
            Scalar::rational(-7, 3)
        );
    }

    fn sample(ring: &Ring, seed: i64) -> Scalar {
        // Deterministic spread of test values, including negatives.
        let base = Scalar::from_int(ring, seed);
        if let Ring::TruncatedLocal { .. } = ring {
            let t = Scalar::t(ring).unwrap();
            base.add(&t.mul_int(seed.wrapping_mul(3) % 7)).unwrap()
        } else if *ring == Ring::Rationals && seed % 3 == 0 && seed != 0 {
            Scalar::rational(seed, (seed % 5).abs().max(2))
        } else {
            base
        }
    }

    proptest! {
        #[test]
        fn ring_axioms(a in -30i64..30, b in -30i64..30, c in -30i64..30) {
            for ring in all_rings() {
                let x = sample(&ring, a);
                let y = sample(&ring, b);
                let z = sample(&ring, c);
                // Associativity and commutativity.
                prop_assert_eq!(
                    x.add(&y).unwrap().add(&z).unwrap(),
                    x.add(&y.add(&z).unwrap()).unwrap()
                );
                prop_assert_eq!(x.add(&y).unwrap(), y.add(&x).unwrap());
                prop_assert_eq!(
                    x.mul(&y).unwrap().mul(&z).unwrap(),
                    x.mul(&y.mul(&z).unwrap()).unwrap()
                );
                prop_assert_eq!(x.mul(&y).unwrap(), y.mul(&x).unwrap());
                // Distributivity.
                prop_assert_eq!(
                    x.mul(&y.add(&z).unwrap()).unwrap(),
                    x.mul(&y).unwrap().add(&x.mul(&z).unwrap()).unwrap()
                );
                // Units and inverses.
                prop_assert_eq!(x.add(&ring.zero()).unwrap(), x.clone());
                prop_assert_eq!(x.mul(&ring.one()).unwrap(), x.clone());
                prop_assert!(x.sub(&x).unwrap().is_zero());
            }
        }

        #[test]
        fn from_integer_is_a_ring_map(a in -100i64..100, b in -100i64..100) {
            for ring in all_rings() {
                let fa = Scalar::from_int(&ring, a);
                let fb = Scalar::from_int(&ring, b);
                prop_assert_eq!(Scalar::from_int(&ring, a + b), fa.add(&fb).unwrap());
                prop_assert_eq!(Scalar::from_int(&ring, a * b), fa.mul(&fb).unwrap());
            }
        }

        #[test]
        fn valuation_superadditive(a in 0i64..20, b in 0i64..20, i in 0u32..3, j in 0u32..3) {
            let r = Ring::truncated_local(Ring::prime_field(7), 4);
            let t = Scalar::t(&r).unwrap();
            let x = t.pow(i).mul_int(a);
            let y = t.pow(j).mul_int(b);
            let (vx, vy) = (x.maximal_ideal_valuation().unwrap(), y.maximal_ideal_valuation().unwrap());
            let vxy = x.mul(&y).unwrap().maximal_ideal_valuation().unwrap();
            if let (Some(vx), Some(vy)) = (vx, vy) {
                if let Some(vxy) = vxy {
                    prop_assert!(vxy >= vx + vy);
                }
            }
        }
    }
}
