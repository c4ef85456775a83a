//! Even nondegenerate lattices, their dual lattices and bimultiplicative
//! 2-cocycles given by integer exponent matrices.

use std::fmt;

use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{int, rat, root_of_unity, Rational, Scalar};

/// A point of `h = Q (x) L` in lattice coordinates, stored as an integer
/// vector over a common positive denominator in lowest terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LatticePoint {
    num: Vec<i64>,
    den: i64,
}

impl LatticePoint {
    pub fn new(num: Vec<i64>, den: i64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num.iter().fold(den.abs(), |g, x| g.gcd(x));
        let s = if den < 0 { -1 } else { 1 };
        LatticePoint {
            num: num.iter().map(|x| s * x / g).collect(),
            den: den.abs() / g,
        }
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        LatticePoint {
            num: coords.to_vec(),
            den: 1,
        }
    }

    pub fn from_rationals(coords: &[Rational]) -> Self {
        let den = coords
            .iter()
            .fold(num_bigint::BigInt::one(), |d, c| d.lcm(c.denom()));
        let den_i = den.to_i64().expect("denominator fits in i64");
        let num = coords
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer().to_i64().expect("coordinate fits in i64"))
            .collect();
        LatticePoint::new(num, den_i)
    }

    pub fn zero(rank: usize) -> Self {
        LatticePoint::from_ints(&vec![0; rank])
    }

    pub fn basis(rank: usize, i: usize) -> Self {
        let mut v = vec![0; rank];
        v[i] = 1;
        LatticePoint::from_ints(&v)
    }

    pub fn rank(&self) -> usize {
        self.num.len()
    }

    pub fn numerators(&self) -> &[i64] {
        &self.num
    }

    pub fn denominator(&self) -> i64 {
        self.den
    }

    pub fn coord(&self, i: usize) -> Rational {
        rat(self.num[i], self.den)
    }

    pub fn coords(&self) -> Vec<Rational> {
        (0..self.rank()).map(|i| self.coord(i)).collect()
    }

    /// Integer coordinates, if this point lies in `L`.
    pub fn as_integral(&self) -> Option<&[i64]> {
        (self.den == 1).then_some(&self.num[..])
    }

    pub fn is_integral(&self) -> bool {
        self.den == 1
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|x| *x == 0)
    }

    pub fn max_abs_coord(&self) -> Rational {
        self.coords().into_iter().map(|c| c.abs()).max().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &LatticePoint) -> LatticePoint {
        let den = self.den.lcm(&other.den);
        let (a, b) = (den / self.den, den / other.den);
        LatticePoint::new(
            self.num.iter().zip(&other.num).map(|(x, y)| a * x + b * y).collect(),
            den,
        )
    }

    pub fn neg(&self) -> LatticePoint {
        LatticePoint {
            num: self.num.iter().map(|x| -x).collect(),
            den: self.den,
        }
    }

    pub fn sub(&self, other: &LatticePoint) -> LatticePoint {
        self.add(&other.neg())
    }

    pub fn scale(&self, n: i64, d: i64) -> LatticePoint {
        LatticePoint::new(self.num.iter().map(|x| x * n).collect(), self.den * d)
    }
}

impl fmt::Display for LatticePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.num.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            if self.den == 1 {
                write!(f, "{x}")?;
            } else {
                write!(f, "{}", rat(*x, self.den))?;
            }
        }
        write!(f, ")")
    }
}

/// An even nondegenerate lattice with Gram matrix in a fixed basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    gram: Vec<Vec<i64>>,
    gram_inv: Vec<Vec<Rational>>,
}

impl Lattice {
    pub fn new(gram: Vec<Vec<i64>>) -> Result<Self> {
        let r = gram.len();
        if r == 0 || gram.iter().any(|row| row.len() != r) {
            return Err(Error::domain("gram matrix must be square and nonempty"));
        }
        for i in 0..r {
            for j in 0..r {
                if gram[i][j] != gram[j][i] {
                    return Err(Error::domain("gram matrix is not symmetric"));
                }
            }
            if gram[i][i].rem_euclid(2) != 0 {
                return Err(Error::domain("odd diagonal: lattice is not even"));
            }
        }
        let m: linalg::Matrix = gram
            .iter()
            .map(|row| row.iter().map(|&x| Scalar::from_int(x)).collect())
            .collect();
        if linalg::determinant(&m).is_zero() {
            return Err(Error::domain("zero determinant: form is degenerate"));
        }
        let gram_inv = linalg::inverse(&m)?
            .into_iter()
            .map(|row| {
                row.into_iter()
                    .map(|s| s.as_rational().cloned().expect("rational inverse"))
                    .collect()
            })
            .collect();
        Ok(Lattice { gram, gram_inv })
    }

    pub fn a1() -> Self {
        Lattice::new(vec![vec![2]]).expect("A1 is valid")
    }

    pub fn a2() -> Self {
        Lattice::new(vec![vec![2, -1], vec![-1, 2]]).expect("A2 is valid")
    }

    pub fn hyperbolic() -> Self {
        Lattice::new(vec![vec![0, 1], vec![1, 0]]).expect("hyperbolic plane is valid")
    }

    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "a1" | "A1" => Some(Lattice::a1()),
            "a2" | "A2" => Some(Lattice::a2()),
            "hyperbolic" | "U" => Some(Lattice::hyperbolic()),
            _ => None,
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn gram(&self) -> &[Vec<i64>] {
        &self.gram
    }

    pub fn gram_inverse(&self) -> &[Vec<Rational>] {
        &self.gram_inv
    }

    pub fn basis(&self, i: usize) -> LatticePoint {
        LatticePoint::basis(self.rank(), i)
    }

    pub fn pairing(&self, a: &LatticePoint, b: &LatticePoint) -> Rational {
        let mut acc: i128 = 0;
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                acc += a.num[i] as i128 * self.gram[i][j] as i128 * b.num[j] as i128;
            }
        }
        let den = a.den as i128 * b.den as i128;
        BigRational::new(acc.into(), den.into())
    }

    /// `<a, a_i>` for a basis vector `a_i`.
    pub fn pairing_with_basis(&self, a: &LatticePoint, i: usize) -> Rational {
        let s: i64 = (0..self.rank()).map(|j| a.num[j] * self.gram[j][i]).sum();
        rat(s, a.den)
    }

    /// Whether `p` pairs integrally with all of `L`.
    pub fn is_dual_point(&self, p: &LatticePoint) -> bool {
        (0..self.rank()).all(|i| self.pairing_with_basis(p, i).is_integer())
    }

    /// Rows of the inverse Gram matrix, pairing to the identity with the basis.
    pub fn dual_basis(&self) -> Vec<LatticePoint> {
        self.gram_inv.iter().map(|row| LatticePoint::from_rationals(row)).collect()
    }

    /// All integer points with coordinates in `[-radius, radius]`.
    pub fn points_in_box(&self, radius: i64) -> Vec<LatticePoint> {
        let r = self.rank();
        let mut out = Vec::new();
        let mut cur = vec![-radius; r];
        if radius < 0 {
            return out;
        }
        loop {
            out.push(LatticePoint::from_ints(&cur));
            let mut i = 0;
            loop {
                if i == r {
                    return out;
                }
                if cur[i] < radius {
                    cur[i] += 1;
                    break;
                }
                cur[i] = -radius;
                i += 1;
            }
        }
    }
}

/// A bimultiplicative cocycle `eps(a, b) = exp(pi i a^T b b)` where `b` is an
/// integer matrix. Its values lie in the `order`-th roots of unity on the
/// points where it is evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct CocycleTable {
    b: Vec<Vec<i64>>,
    order: u64,
}

impl CocycleTable {
    pub fn new(b: Vec<Vec<i64>>, order: u64) -> Self {
        assert!(order % 2 == 0 && order > 0, "order must be a positive even integer");
        CocycleTable { b, order }
    }

    pub fn trivial(rank: usize) -> Self {
        CocycleTable::new(vec![vec![0; rank]; rank], 2)
    }

    pub fn b(&self) -> &[Vec<i64>] {
        &self.b
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn is_trivial(&self) -> bool {
        self.b.iter().flatten().all(|x| *x == 0)
    }

    /// `a^T b c` as a rational.
    pub fn form(&self, a: &LatticePoint, c: &LatticePoint) -> Rational {
        let r = self.b.len();
        let mut acc: i128 = 0;
        for i in 0..r {
            for j in 0..r {
                acc += a.num[i] as i128 * self.b[i][j] as i128 * c.num[j] as i128;
            }
        }
        BigRational::new(acc.into(), (a.den as i128 * c.den as i128).into())
    }

    /// The exponent `k` in `eps(a, c) = zeta_order^k`, reduced mod `order`.
    pub fn exponent(&self, a: &LatticePoint, c: &LatticePoint) -> Result<i64> {
        let half = (self.order / 2) as i64;
        let k = self.form(a, c) * int(half);
        if !k.is_integer() {
            return Err(Error::domain(format!(
                "cocycle exponent at ({a}, {c}) is not integral for order {}",
                self.order
            )));
        }
        let m = BigRational::from_integer((self.order as i64).into());
        let red = ((k % &m) + &m) % &m;
        Ok(red.to_integer().to_i64().expect("small exponent"))
    }

    pub fn eval(&self, a: &LatticePoint, c: &LatticePoint) -> Result<Scalar> {
        Ok(root_of_unity(self.order, self.exponent(a, c)?))
    }
}

/// `b_ij = <a_i, a_j>` for `i > j`, zero otherwise.
pub fn standard_cocycle(l: &Lattice) -> CocycleTable {
    let r = l.rank();
    let mut b = vec![vec![0; r]; r];
    for i in 0..r {
        for j in 0..i {
            b[i][j] = l.gram[i][j];
        }
    }
    CocycleTable::new(b, 2)
}

/// The same exponent matrix, with the root-of-unity order enlarged so that
/// `eps(a, g)` is defined for `a` in `L` and `g` in the dual lattice.
pub fn extend_cocycle(l: &Lattice, t: &CocycleTable) -> CocycleTable {
    let r = l.rank();
    let mut den = num_bigint::BigInt::one();
    for i in 0..r {
        for j in 0..r {
            let e: Rational = (0..r).fold(Rational::zero(), |acc, k| acc + int(t.b[i][k]) * &l.gram_inv[k][j]);
            den = den.lcm(e.denom());
        }
    }
    let den = den.to_u64().expect("small denominator");
    CocycleTable::new(t.b.clone(), t.order.lcm(&(2 * den)))
}

/// Result of an exhaustive cocycle check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleCheck {
    pub checked: usize,
    pub violation: Option<String>,
}

impl CocycleCheck {
    pub fn passed(&self) -> bool {
        self.violation.is_none()
    }
}

/// Normalization, the 2-cocycle identity on all triples and the commutator
/// condition `eps(a,b)/eps(b,a) = (-1)^<a,b>` on all pairs in the box.
pub fn cocycle_check(l: &Lattice, t: &CocycleTable, radius: i64) -> CocycleCheck {
    let pts = l.points_in_box(radius);
    let zero = LatticePoint::zero(l.rank());
    let m = t.order as i64;
    let e = |a: &LatticePoint, b: &LatticePoint| t.exponent(a, b).expect("integral exponent on L");
    let mut checked = 0;
    let fail = |msg: String, checked| CocycleCheck {
        checked,
        violation: Some(msg),
    };
    if radius <= 0 {
        return CocycleCheck {
            checked,
            violation: None,
        };
    }
    for a in &pts {
        checked += 1;
        if e(a, &zero) != 0 || e(&zero, a) != 0 {
            return fail(format!("normalization fails at {a}"), checked);
        }
    }
    let half = m / 2;
    for a in &pts {
        for b in &pts {
            checked += 1;
            let lhs = (e(a, b) - e(b, a)).rem_euclid(m);
            let p = l.pairing(a, b).to_integer().to_i64().expect("integral pairing");
            let rhs = (half * p).rem_euclid(m);
            if lhs != rhs {
                return fail(format!("commutator condition fails at ({a}, {b})"), checked);
            }
        }
    }
    for a in &pts {
        for b in &pts {
            let ab = a.add(b);
            let eab = e(a, b);
            for c in &pts {
                checked += 1;
                let lhs = e(a, &b.add(c)) + e(b, c);
                let rhs = e(&ab, c) + eab;
                if (lhs - rhs).rem_euclid(m) != 0 {
                    return fail(format!("cocycle identity fails at ({a}, {b}, {c})"), checked);
                }
            }
        }
    }
    CocycleCheck {
        checked,
        violation: None,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LatticeSpec {
    rank: usize,
    gram: Vec<Vec<i64>>,
    #[serde(default)]
    cocycle_b: Option<Vec<Vec<i64>>>,
}

fn line_of(text: &str, key: &str) -> Option<usize> {
    let pat = format!("\"{key}\"");
    text.lines().position(|l| l.contains(&pat)).map(|i| i + 1)
}

/// Parses a JSON lattice description `{"rank", "gram", "cocycle_b"?}`.
pub fn parse_lattice_spec(text: &str) -> Result<(Lattice, CocycleTable)> {
    let spec: LatticeSpec = serde_json::from_str(text)
        .map_err(|e| Error::config(format!("invalid lattice spec: {e}"), Some(e.line())))?;
    let gram_line = line_of(text, "gram");
    if spec.gram.len() != spec.rank || spec.gram.iter().any(|r| r.len() != spec.rank) {
        return Err(Error::config(
            format!("gram must be a {0}x{0} matrix", spec.rank),
            gram_line,
        ));
    }
    let lattice = Lattice::new(spec.gram).map_err(|e| match e {
        Error::Domain(m) => Error::config(m, gram_line),
        other => other,
    })?;
    let cocycle = match spec.cocycle_b {
        None => standard_cocycle(&lattice),
        Some(b) => {
            if b.len() != spec.rank || b.iter().any(|r| r.len() != spec.rank) {
                return Err(Error::config(
                    format!("cocycle_b must be a {0}x{0} matrix", spec.rank),
                    line_of(text, "cocycle_b"),
                ));
            }
            CocycleTable::new(b, 2)
        }
    };
    Ok((lattice, cocycle))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::from_ints(c)
    }

    #[test]
    fn make_lattice_validates() {
        assert!(Lattice::new(vec![vec![2]]).is_ok());
        assert!(Lattice::new(vec![vec![2, -1], vec![-1, 2]]).is_ok());
        let e = Lattice::new(vec![vec![1]]).unwrap_err();
        assert!(e.to_string().contains("odd diagonal"));
        let e = Lattice::new(vec![vec![2, 1], vec![0, 2]]).unwrap_err();
        assert!(e.to_string().contains("symmetric"));
        let e = Lattice::new(vec![vec![2, 2], vec![2, 2]]).unwrap_err();
        assert!(e.to_string().contains("determinant"));
    }

    #[test]
    fn pairing_examples() {
        let a1 = Lattice::a1();
        assert_eq!(a1.pairing(&p(&[1]), &p(&[1])), int(2));
        let a2 = Lattice::a2();
        assert_eq!(a2.pairing(&p(&[1, 0]), &p(&[0, 1])), int(-1));
        assert_eq!(a1.pairing(&p(&[1]), &LatticePoint::new(vec![1], 2)), int(1));
    }

    #[test]
    fn standard_cocycle_values() {
        let a1 = Lattice::a1();
        let t = standard_cocycle(&a1);
        assert_eq!(t.eval(&p(&[1]), &p(&[1])).unwrap(), Scalar::one());
        let a2 = Lattice::a2();
        let t = standard_cocycle(&a2);
        assert_eq!(t.eval(&p(&[0, 1]), &p(&[1, 0])).unwrap(), Scalar::from_int(-1));
        assert_eq!(t.eval(&p(&[1, 0]), &p(&[0, 1])).unwrap(), Scalar::one());
        assert_eq!(t.eval(&p(&[3, -2]), &p(&[0, 0])).unwrap(), Scalar::one());
    }

    #[test]
    fn cocycle_check_passes_and_detects() {
        let a2 = Lattice::a2();
        let t = standard_cocycle(&a2);
        assert!(cocycle_check(&a2, &t, 2).passed());
        let bad = CocycleTable::new(vec![vec![0, 0], vec![0, 0]], 2);
        assert!(!cocycle_check(&a2, &bad, 2).passed());
        assert!(cocycle_check(&a2, &bad, 0).passed());
    }

    #[test]
    fn dual_basis_pairs_to_identity() {
        let a1 = Lattice::a1();
        assert_eq!(a1.dual_basis(), vec![LatticePoint::new(vec![1], 2)]);
        let a2 = Lattice::a2();
        let d = a2.dual_basis();
        for i in 0..2 {
            for j in 0..2 {
                let expect = if i == j { int(1) } else { int(0) };
                assert_eq!(a2.pairing(&a2.basis(i), &d[j]), expect);
            }
        }
        let u = Lattice::hyperbolic();
        let d = u.dual_basis();
        assert!(d.iter().all(|x| x.is_integral()));
    }

    #[test]
    fn extension_on_a1_is_trivial() {
        let a1 = Lattice::a1();
        let t = extend_cocycle(&a1, &standard_cocycle(&a1));
        let half = LatticePoint::new(vec![1], 2);
        for k in -4..=4 {
            assert_eq!(t.eval(&p(&[k]), &half.scale(k, 1)).unwrap(), Scalar::one());
        }
    }

    #[test]
    fn extension_on_a2_restricts_and_needs_zeta6() {
        let a2 = Lattice::a2();
        let t = standard_cocycle(&a2);
        let ext = extend_cocycle(&a2, &t);
        assert_eq!(ext.order(), 6);
        for a in a2.points_in_box(2) {
            for b in a2.points_in_box(2) {
                assert_eq!(ext.eval(&a, &b).unwrap(), t.eval(&a, &b).unwrap());
            }
        }
        let w = a2.dual_basis();
        assert!(ext.eval(&p(&[0, 1]), &w[0]).is_ok());
    }

    #[test]
    fn spec_parsing() {
        let (l, t) = parse_lattice_spec(r#"{"rank":1,"gram":[[2]]}"#).unwrap();
        assert_eq!(l, Lattice::a1());
        assert_eq!(t, standard_cocycle(&l));
        let (l, _) = parse_lattice_spec("{\"rank\":2,\n\"gram\":[[2,-1],[-1,2]]}").unwrap();
        assert_eq!(l, Lattice::a2());
        let e = parse_lattice_spec("{\"rank\":1,\n\"gram\":[[1]]}").unwrap_err();
        assert_eq!(e, Error::config("odd diagonal: lattice is not even", Some(2)));
        let e = parse_lattice_spec("{\"rank\":1,\n\"gram\":[[2]],}").unwrap_err();
        assert!(matches!(e, Error::Config { line: Some(2), .. }));
    }

    #[test]
    fn point_arithmetic_is_canonical() {
        let h = LatticePoint::new(vec![2, 4], 4);
        assert_eq!(h, LatticePoint::new(vec![1, 2], 2));
        assert_eq!(h.add(&h), p(&[1, 2]));
        assert!(h.add(&h).is_integral());
        assert_eq!(Lattice::a1().points_in_box(2).len(), 5);
    }
}
