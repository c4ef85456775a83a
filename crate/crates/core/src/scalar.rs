//! Exact scalars: arbitrary-precision rationals and elements of the
//! cyclotomic fields `Q(zeta_m)`.
//!
//! A [`Scalar`] is either a plain rational or a [`CycScalar`]. Mixed
//! arithmetic promotes to the cyclotomic field; two cyclotomic operands of
//! different orders are lifted to the field of order `lcm(m1, m2)`. Every
//! result is reduced to canonical form, and a cyclotomic value lying in `Q`
//! is demoted back to a rational.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{OnceLock, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    BigRational::from_integer(BigInt::from(n))
}

// --- dense polynomials over Q, lowest degree first -------------------------

type Poly = Vec<Rational>;

fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

/// Division with remainder; `d` must be nonzero.
fn poly_divrem(n: &[Rational], d: &[Rational]) -> (Poly, Poly) {
    let mut rem: Poly = n.to_vec();
    trim(&mut rem);
    let dd = d.len() - 1;
    let lead = d[dd].clone();
    if rem.len() < d.len() {
        return (Vec::new(), rem);
    }
    let mut quot = vec![Rational::zero(); rem.len() - dd];
    while rem.len() >= d.len() {
        let shift = rem.len() - d.len();
        let c = rem.last().unwrap() / &lead;
        for (i, di) in d.iter().enumerate() {
            rem[shift + i] -= &c * di;
        }
        quot[shift] = c;
        trim(&mut rem);
    }
    trim(&mut quot);
    (quot, rem)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
            let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
            x - y
        })
        .collect();
    trim(&mut out);
    out
}

fn cyclotomic_cache() -> &'static RwLock<HashMap<u64, Poly>> {
    static CACHE: OnceLock<RwLock<HashMap<u64, Poly>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

/// The m-th cyclotomic polynomial, monic, lowest degree first.
pub fn cyclotomic_polynomial(m: u64) -> Vec<Rational> {
    assert!(m >= 1, "cyclotomic order must be positive");
    if let Some(p) = cyclotomic_cache().read().unwrap().get(&m) {
        return p.clone();
    }
    // x^m - 1 divided by every Phi_d with d | m, d < m.
    let mut p: Poly = vec![Rational::zero(); m as usize + 1];
    p[0] = int(-1);
    p[m as usize] = int(1);
    for d in 1..m {
        if m % d == 0 {
            let (q, r) = poly_divrem(&p, &cyclotomic_polynomial(d));
            debug_assert!(r.is_empty());
            p = q;
        }
    }
    cyclotomic_cache().write().unwrap().insert(m, p.clone());
    p
}

pub fn euler_phi(m: u64) -> usize {
    (1..=m).filter(|k| k.gcd(&m) == 1).count()
}

// --- cyclotomic elements ----------------------------------------------------

/// An element of `Q(zeta_m)`, stored as the coefficient vector of its
/// reduced representative modulo the m-th cyclotomic polynomial.
#[derive(Clone, Debug)]
pub struct CycScalar {
    order: u64,
    coeffs: Vec<Rational>,
}

impl CycScalar {
    /// Reduces `poly(zeta_m)` to canonical form.
    pub fn from_poly(order: u64, poly: &[Rational]) -> Self {
        let phi = cyclotomic_polynomial(order);
        let (_, mut r) = poly_divrem(poly, &phi);
        r.resize(phi.len() - 1, Rational::zero());
        CycScalar { order, coeffs: r }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    fn as_poly(&self) -> Poly {
        let mut p = self.coeffs.clone();
        trim(&mut p);
        p
    }

    /// Re-expresses this element in `Q(zeta_target)`; `target` must be a
    /// multiple of the current order.
    pub fn lift(&self, target: u64) -> CycScalar {
        assert!(target % self.order == 0);
        if target == self.order {
            return self.clone();
        }
        let step = (target / self.order) as usize;
        let mut p = vec![Rational::zero(); (self.coeffs.len().max(1) - 1) * step + 1];
        for (i, c) in self.coeffs.iter().enumerate() {
            p[i * step] = c.clone();
        }
        CycScalar::from_poly(target, &p)
    }

    fn rational_value(&self) -> Option<Rational> {
        if self.coeffs.iter().skip(1).all(|c| c.is_zero()) {
            Some(self.coeffs.first().cloned().unwrap_or_else(Rational::zero))
        } else {
            None
        }
    }

    fn inverse(&self) -> Result<CycScalar> {
        // Extended Euclid: find s with s * a = 1 mod Phi_m.
        let a = self.as_poly();
        if a.is_empty() {
            return Err(Error::domain("division by zero"));
        }
        let phi = cyclotomic_polynomial(self.order);
        let (mut r0, mut r1) = (phi, a);
        let (mut s0, mut s1): (Poly, Poly) = (Vec::new(), vec![int(1)]);
        while !r1.is_empty() {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
        }
        // r0 is a nonzero constant because Phi_m is irreducible.
        let c = r0[0].clone();
        let s: Poly = s0.iter().map(|x| x / &c).collect();
        Ok(CycScalar::from_poly(self.order, &s))
    }
}

/// `zeta_m^k` in canonical form.
pub fn root_of_unity(m: u64, k: i64) -> Scalar {
    assert!(m >= 1, "root of unity order must be positive");
    let e = k.rem_euclid(m as i64) as usize;
    let mut p = vec![Rational::zero(); e + 1];
    p[e] = int(1);
    Scalar::from_cyc(CycScalar::from_poly(m, &p))
}

// --- the scalar union -------------------------------------------------------

/// Exact field element: a rational or a cyclotomic number.
#[derive(Clone, Debug)]
pub enum Scalar {
    Rat(Rational),
    Cyc(CycScalar),
}

impl Scalar {
    pub fn zero() -> Self {
        Scalar::Rat(Rational::zero())
    }

    pub fn one() -> Self {
        Scalar::Rat(Rational::one())
    }

    pub fn from_int(n: i64) -> Self {
        Scalar::Rat(int(n))
    }

    pub fn from_ratio(n: i64, d: i64) -> Self {
        Scalar::Rat(rat(n, d))
    }

    fn from_cyc(c: CycScalar) -> Self {
        match c.rational_value() {
            Some(r) => Scalar::Rat(r),
            None => Scalar::Cyc(c),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Rat(r) => r.is_zero(),
            Scalar::Cyc(_) => false,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self, Scalar::Rat(r) if r.is_one())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Cyc(_) => None,
        }
    }

    fn to_order(&self, m: u64) -> CycScalar {
        match self {
            Scalar::Rat(r) => CycScalar::from_poly(m, std::slice::from_ref(r)),
            Scalar::Cyc(c) => c.lift(m),
        }
    }

    fn common_order(a: &Scalar, b: &Scalar) -> u64 {
        match (a, b) {
            (Scalar::Cyc(x), Scalar::Cyc(y)) => x.order.lcm(&y.order),
            (Scalar::Cyc(x), _) | (_, Scalar::Cyc(x)) => x.order,
            _ => 1,
        }
    }

    fn zip_poly(&self, other: &Scalar, f: impl Fn(&[Rational], &[Rational], u64) -> Poly) -> Scalar {
        let m = Scalar::common_order(self, other);
        let a = self.to_order(m);
        let b = other.to_order(m);
        let p = f(&a.coeffs, &b.coeffs, m);
        Scalar::from_cyc(CycScalar::from_poly(m, &p))
    }

    pub fn inv(&self) -> Result<Scalar> {
        match self {
            Scalar::Rat(r) if r.is_zero() => Err(Error::domain("division by zero")),
            Scalar::Rat(r) => Ok(Scalar::Rat(r.recip())),
            Scalar::Cyc(c) => Ok(Scalar::from_cyc(c.inverse()?)),
        }
    }

    pub fn div(&self, other: &Scalar) -> Result<Scalar> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, k: u32) -> Scalar {
        let mut out = Scalar::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::from_int(n)
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Rat(r)
    }
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Scalar::Rat(a), Scalar::Rat(b)) => a == b,
            (Scalar::Rat(_), Scalar::Cyc(_)) | (Scalar::Cyc(_), Scalar::Rat(_)) => false,
            (Scalar::Cyc(a), Scalar::Cyc(b)) => {
                let m = a.order.lcm(&b.order);
                a.lift(m).coeffs == b.lift(m).coeffs
            }
        }
    }
}

impl Eq for Scalar {}

impl<'a> Add<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn add(self, rhs: &Scalar) -> Scalar {
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (self, rhs) {
            return Scalar::Rat(a + b);
        }
        self.zip_poly(rhs, |a, b, _| {
            (0..a.len().max(b.len()))
                .map(|i| {
                    a.get(i).cloned().unwrap_or_else(Rational::zero)
                        + b.get(i).cloned().unwrap_or_else(Rational::zero)
                })
                .collect()
        })
    }
}

impl<'a> Sub<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn sub(self, rhs: &Scalar) -> Scalar {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Scalar> for &'a Scalar {
    type Output = Scalar;
    fn mul(self, rhs: &Scalar) -> Scalar {
        if self.is_one() {
            return rhs.clone();
        }
        if rhs.is_one() {
            return self.clone();
        }
        if let (Scalar::Rat(a), Scalar::Rat(b)) = (self, rhs) {
            return Scalar::Rat(a * b);
        }
        self.zip_poly(rhs, |a, b, _| poly_mul(a, b))
    }
}

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        match self {
            Scalar::Rat(r) => Scalar::Rat(-r),
            Scalar::Cyc(c) => Scalar::Cyc(CycScalar {
                order: c.order,
                coeffs: c.coeffs.iter().map(|x| -x).collect(),
            }),
        }
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl Add for Scalar {
    type Output = Scalar;
    fn add(self, rhs: Scalar) -> Scalar {
        &self + &rhs
    }
}

impl Sub for Scalar {
    type Output = Scalar;
    fn sub(self, rhs: Scalar) -> Scalar {
        &self - &rhs
    }
}

impl Mul for Scalar {
    type Output = Scalar;
    fn mul(self, rhs: Scalar) -> Scalar {
        &self * &rhs
    }
}

fn fmt_rational(r: &Rational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if r.denom().is_one() {
        write!(f, "{}", r.numer())
    } else {
        write!(f, "{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Rat(r) => fmt_rational(r, f),
            Scalar::Cyc(c) => {
                let mut first = true;
                for (i, x) in c.coeffs.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    if !first {
                        write!(f, " {} ", if x.is_negative() { "-" } else { "+" })?;
                    } else if x.is_negative() {
                        write!(f, "-")?;
                    }
                    first = false;
                    let a = x.abs();
                    match i {
                        0 => fmt_rational(&a, f)?,
                        _ => {
                            if !a.is_one() {
                                fmt_rational(&a, f)?;
                                write!(f, "*")?;
                            }
                            if i == 1 {
                                write!(f, "z")?;
                            } else {
                                write!(f, "z^{i}")?;
                            }
                        }
                    }
                }
                write!(f, " (z = zeta_{})", c.order)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_sum() {
        let s = &Scalar::from_ratio(1, 2) + &Scalar::from_ratio(1, 3);
        assert_eq!(s, Scalar::from_ratio(5, 6));
        assert_eq!(s.to_string(), "5/6");
    }

    #[test]
    fn zeta4_squared_is_minus_one() {
        let i = root_of_unity(4, 1);
        assert!(matches!(i, Scalar::Cyc(_)));
        assert_eq!(&i * &i, Scalar::from_int(-1));
    }

    #[test]
    fn roots_of_unity_examples() {
        assert_eq!(root_of_unity(2, 1), Scalar::from_int(-1));
        assert_eq!(root_of_unity(4, 2), Scalar::from_int(-1));
        assert_eq!(root_of_unity(6, 6), Scalar::one());
        assert_eq!(root_of_unity(5, 7), root_of_unity(5, 2));
        assert_eq!(root_of_unity(5, -3), root_of_unity(5, 2));
    }

    #[test]
    fn mth_power_is_one() {
        for m in 1..=12u64 {
            for k in 0..m as i64 {
                assert!(root_of_unity(m, k).pow(m as u32).is_one(), "m={m} k={k}");
            }
        }
    }

    #[test]
    fn cyclotomic_degrees() {
        for m in 1..=30u64 {
            assert_eq!(cyclotomic_polynomial(m).len() - 1, euler_phi(m), "m={m}");
        }
        // Phi_6 = x^2 - x + 1
        assert_eq!(cyclotomic_polynomial(6), vec![int(1), int(-1), int(1)]);
    }

    #[test]
    fn mixed_orders_promote_to_lcm() {
        let a = root_of_unity(4, 1);
        let b = root_of_unity(6, 1);
        let p = &a * &b;
        assert_eq!(p, root_of_unity(12, 5));
        // zeta_6^3 = -1 lives in Q
        assert_eq!(root_of_unity(6, 3), Scalar::from_int(-1));
        assert_eq!(root_of_unity(12, 3), root_of_unity(4, 1));
    }

    #[test]
    fn cyclotomic_inverse() {
        let z = root_of_unity(6, 1);
        let x = &z + &Scalar::from_int(2);
        let y = x.inv().unwrap();
        assert!((&x * &y).is_one());
        assert_eq!(z.inv().unwrap(), root_of_unity(6, 5));
    }

    #[test]
    fn division_by_zero() {
        assert!(matches!(Scalar::zero().inv(), Err(Error::Domain(_))));
        assert!(Scalar::one().div(&Scalar::zero()).is_err());
    }

    #[test]
    fn display_cyclotomic() {
        let z = root_of_unity(6, 1);
        assert_eq!(z.to_string(), "z (z = zeta_6)");
        let w = &z * &Scalar::from_ratio(-1, 2);
        assert_eq!(w.to_string(), "-1/2*z (z = zeta_6)");
    }
}
