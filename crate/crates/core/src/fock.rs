//! The Fock space `S(h^-)` of a Heisenberg algebra at level one, its mode
//! operators, the translation `L(-1)`, the exponentials `E^{+-}` and the
//! normal-ordered vertex operator map.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::lattice::{Lattice, LatticePoint};
use crate::scalar::{Rational, Scalar};
use crate::tensor::Coordinates;
use crate::vertex::VertexAlgebra;
use crate::report::Verdict;
use crate::series::{
    binomial_scalar, compose, exp_action, Series, Vector, Window,
};

/// A monomial `prod a_i(-n)` in the symmetric algebra, factors sorted by
/// `(i, n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockMonomial(Vec<(usize, u32)>);

impl FockMonomial {
    pub fn vacuum() -> Self {
        FockMonomial(Vec::new())
    }

    pub fn new(mut factors: Vec<(usize, u32)>) -> Self {
        assert!(factors.iter().all(|(_, n)| *n >= 1), "modes must be positive");
        factors.sort_unstable();
        FockMonomial(factors)
    }

    pub fn factors(&self) -> &[(usize, u32)] {
        &self.0
    }

    pub fn weight(&self) -> i64 {
        self.0.iter().map(|(_, n)| *n as i64).sum()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_vacuum(&self) -> bool {
        self.0.is_empty()
    }

    fn with(&self, f: (usize, u32)) -> FockMonomial {
        let mut v = self.0.clone();
        let pos = v.partition_point(|x| *x <= f);
        v.insert(pos, f);
        FockMonomial(v)
    }

    fn without(&self, pos: usize) -> FockMonomial {
        let mut v = self.0.clone();
        v.remove(pos);
        FockMonomial(v)
    }

    pub fn mul(&self, other: &FockMonomial) -> FockMonomial {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort_unstable();
        FockMonomial(v)
    }

    /// Splits off the first factor.
    pub fn split_first(&self) -> Option<((usize, u32), FockMonomial)> {
        let (f, rest) = self.0.split_first()?;
        Some((*f, FockMonomial(rest.to_vec())))
    }
}

impl fmt::Display for FockMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut i = 0;
        while i < self.0.len() {
            let mut j = i;
            while j < self.0.len() && self.0[j] == self.0[i] {
                j += 1;
            }
            let (idx, n) = self.0[i];
            write!(f, "a{}(-{})", idx + 1, n)?;
            if j - i > 1 {
                write!(f, "^{}", j - i)?;
            }
            write!(f, " ")?;
            i = j;
        }
        write!(f, "|0>")
    }
}

/// A finite linear combination of Fock monomials.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct FockVector {
    terms: BTreeMap<FockMonomial, Scalar>,
}

impl FockVector {
    pub fn zero() -> Self {
        FockVector::default()
    }

    pub fn vacuum() -> Self {
        FockVector::from_monomial(FockMonomial::vacuum())
    }

    pub fn from_monomial(m: FockMonomial) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(m, Scalar::one());
        FockVector { terms }
    }

    /// `prod a_i(-n)` applied to the vacuum.
    pub fn from_modes(factors: &[(usize, u32)]) -> Self {
        FockVector::from_monomial(FockMonomial::new(factors.to_vec()))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FockMonomial, &Scalar)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, m: &FockMonomial) -> Scalar {
        self.terms.get(m).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn add_term(&mut self, m: FockMonomial, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c);
            }
        }
    }

    /// Largest weight among the terms, or `-1` for zero.
    pub fn max_weight(&self) -> i64 {
        self.terms.keys().map(FockMonomial::weight).max().unwrap_or(-1)
    }

    pub fn min_weight(&self) -> i64 {
        self.terms.keys().map(FockMonomial::weight).min().unwrap_or(0)
    }

    /// Commutative product in the symmetric algebra.
    pub fn mul(&self, other: &FockVector) -> FockVector {
        let mut out = FockVector::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.mul(b), x * y);
            }
        }
        out
    }

    /// The constant term (coefficient of the vacuum).
    pub fn vacuum_coeff(&self) -> Scalar {
        self.coeff(&FockMonomial::vacuum())
    }
}

impl fmt::Debug for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "({c}) {m}")?;
            }
        }
        Ok(())
    }
}

impl Vector for FockVector {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        for (m, c) in &other.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return FockVector::zero();
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c * s;
        }
        out
    }
}

impl Coordinates for FockVector {
    type Key = FockMonomial;
    fn coordinates(&self) -> Vec<(FockMonomial, Scalar)> {
        self.terms.iter().map(|(m, c)| (m.clone(), c.clone())).collect()
    }
    fn from_key(key: &FockMonomial) -> Self {
        FockVector::from_monomial(key.clone())
    }
}

/// Multiplication by `a_i(-n)`.
pub fn create(i: usize, n: i64, v: &FockVector) -> Result<FockVector> {
    if n <= 0 {
        return Err(Error::domain(format!("creation needs a positive mode, got {n}")));
    }
    let mut out = FockVector::zero();
    for (m, c) in &v.terms {
        out.add_term(m.with((i, n as u32)), c.clone());
    }
    Ok(out)
}

/// Multiplication by `h(-n)` for `h` in rational lattice coordinates.
pub fn create_h(h: &LatticePoint, n: i64, v: &FockVector) -> Result<FockVector> {
    let mut out = FockVector::zero();
    for i in 0..h.rank() {
        let c = h.coord(i);
        if c.is_zero() {
            continue;
        }
        out.add_assign(&create(i, n, v)?.scale(&Scalar::Rat(c)));
    }
    Ok(out)
}

/// `h(n)` for `n >= 0`: zero at `n = 0`, otherwise the derivation with
/// `h(n) a_i(-m) = n <h, a_i> delta_{n,m}`.
pub fn annihilate(l: &Lattice, h: &LatticePoint, n: i64, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    if n <= 0 {
        return out;
    }
    let pairings: Vec<Rational> = (0..l.rank()).map(|i| l.pairing_with_basis(h, i)).collect();
    for (m, c) in &v.terms {
        for (pos, (i, k)) in m.0.iter().enumerate() {
            if *k as i64 != n || pairings[*i].is_zero() {
                continue;
            }
            let s = Scalar::Rat(&pairings[*i] * Rational::from_integer(n.into()));
            out.add_term(m.without(pos), c * &s);
        }
    }
    out
}

/// `h(n)` for any integer mode on the Fock space (`h(0)` acts as zero).
pub fn mode(l: &Lattice, h: &LatticePoint, n: i64, v: &FockVector) -> FockVector {
    if n < 0 {
        create_h(h, -n, v).expect("positive creation mode")
    } else {
        annihilate(l, h, n, v)
    }
}

/// The derivation `L(-1)`: `a_i(-n) -> n a_i(-n-1)`.
pub fn translate(v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (m, c) in &v.terms {
        for (pos, (i, n)) in m.0.iter().enumerate() {
            let nm = m.without(pos).with((*i, n + 1));
            out.add_term(nm, c * &Scalar::from_int(*n as i64));
        }
    }
    out
}

/// `[a_i(m), a_j(n)] v = m <a_i,a_j> delta_{m+n,0} v` for all basis
/// directions, all `m, n` in `modes` and all `v` in `vs`.
pub fn check_heisenberg_commutators(l: &Lattice, vs: &[FockVector], modes: std::ops::RangeInclusive<i64>) -> Verdict {
    let mut certified = 0;
    for v in vs {
        for i in 0..l.rank() {
            let a = l.basis(i);
            for j in 0..l.rank() {
                let b = l.basis(j);
                for m in modes.clone() {
                    for n in modes.clone() {
                        let mut lhs = mode(l, &a, m, &mode(l, &b, n, v));
                        lhs.sub_assign(&mode(l, &b, n, &mode(l, &a, m, v)));
                        let rhs = if m + n == 0 {
                            v.scale(&Scalar::Rat(l.pairing(&a, &b) * Rational::from_integer(m.into())))
                        } else {
                            FockVector::zero()
                        };
                        if lhs != rhs {
                            return Verdict::fail(format!("[a{i}({m}), a{j}({n})] wrong on {v}"));
                        }
                        certified += 1;
                    }
                }
            }
        }
    }
    Verdict::pass(certified, "")
}

/// All monomials of weight exactly `w` in `rank` colours.
pub fn monomials_of_weight(rank: usize, w: i64) -> Vec<FockMonomial> {
    fn rec(rank: usize, rem: i64, max: (usize, u32), cur: &mut Vec<(usize, u32)>, out: &mut Vec<FockMonomial>) {
        if rem == 0 {
            out.push(FockMonomial::new(cur.clone()));
            return;
        }
        // nonincreasing sequence of factors in (mode, index) order
        for n in (1..=rem.min(max.1 as i64) as u32).rev() {
            for i in 0..rank {
                if (n, i) > (max.1, max.0) {
                    continue;
                }
                cur.push((i, n));
                rec(rank, rem - n as i64, (i, n), cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    if w < 0 {
        return out;
    }
    rec(rank, w, (rank, u32::MAX), &mut Vec::new(), &mut out);
    out.sort();
    out
}

/// All monomials of weight at most `w`.
pub fn monomials_up_to(rank: usize, w: i64) -> Vec<FockMonomial> {
    (0..=w).flat_map(|k| monomials_of_weight(rank, k)).collect()
}

/// A space carrying an action of the Heisenberg modes `h(n)`.
pub trait HeisenbergModule: Vector {
    /// `h(n)` applied to `self`, for every integer `n`.
    fn heis_mode(&self, l: &Lattice, h: &LatticePoint, n: i64) -> Self;
    /// Largest `n` for which some `h(n)`, `n > 0`, can act nontrivially.
    fn fock_depth(&self) -> i64;
}

impl HeisenbergModule for FockVector {
    fn heis_mode(&self, l: &Lattice, h: &LatticePoint, n: i64) -> Self {
        mode(l, h, n, self)
    }
    fn fock_depth(&self) -> i64 {
        self.max_weight().max(0)
    }
}

/// `sum_{n>=1} C(n-1, k) h(-n) v x^{n-1-k}` up to `x^hi`: the creation half
/// of the divided derivative `h(x)^{(k)}`.
pub fn creation_series<M: HeisenbergModule>(l: &Lattice, h: &LatticePoint, k: u64, v: &M, hi: i64) -> Series<M> {
    if hi < 0 {
        return Series::with_window(Some(Window { lo: hi, hi }), Some(0), None);
    }
    let mut s = Series::with_window(Some(Window { lo: 0, hi }), Some(0), None);
    for e in 0..=hi {
        let n = e + k as i64 + 1;
        let c = binomial_scalar(n - 1, k);
        s.insert(e, v.heis_mode(l, h, -n).scale(&c));
    }
    s
}

/// `sum_{n>=0} C(-n-1, k) h(n) v x^{-n-1-k}`: the annihilation half.
pub fn annihilation_series<M: HeisenbergModule>(l: &Lattice, h: &LatticePoint, k: u64, v: &M) -> Series<M> {
    let depth = v.fock_depth();
    Series::polynomial((0..=depth).map(|n| {
        let c = binomial_scalar(-n - 1, k);
        (-n - 1 - k as i64, v.heis_mode(l, h, n).scale(&c))
    }))
}

/// `h(x) v = sum_n h(n) v x^{-n-1}`, exact from its support floor up to `w.hi`.
pub fn heis_field<M: HeisenbergModule>(l: &Lattice, h: &LatticePoint, v: &M, w: Window) -> Series<M> {
    creation_series(l, h, 0, v, w.hi).add(&annihilation_series(l, h, 0, v))
}

/// `E^+(h,x) v` (`plus = true`, a Laurent polynomial in `x^{-1}`) or
/// `E^-(h,x) v` (a power series exact up to `w.hi`).
pub fn e_field<M: HeisenbergModule>(l: &Lattice, h: &LatticePoint, plus: bool, v: &M, w: Window) -> Result<Series<M>> {
    let mut s = Series::constant(v.clone());
    if plus {
        let depth = v.fock_depth();
        for n in (1..=depth).rev() {
            let f = Scalar::from_ratio(1, n);
            s = compose(&s, None, |c, _| {
                exp_action(|u: &M| u.heis_mode(l, h, n).scale(&f), -n, c, w)
            })?;
        }
    } else {
        let hi = w.hi;
        for n in 1..=hi.max(0) {
            let f = Scalar::from_ratio(-1, n);
            s = compose(&s, Some(0), |c, m| {
                let win = Window { lo: (hi - m).min(0), hi: hi - m };
                exp_action(|u: &M| u.heis_mode(l, h, -n).scale(&f), n, c, win)
            })?;
        }
        if hi < 0 {
            s = s.restrict(Window { lo: w.lo.min(hi), hi }).unwrap_or_else(Series::zero);
        } else {
            s = s.restrict(Window { lo: s.support_floor().unwrap_or(0), hi }).expect("nonempty");
        }
    }
    Ok(s)
}

/// The normal-ordered field of `prod a_i(-n_i) . base` applied to `v`:
///
/// `Y(a(-n) u', x) v = a^{(n-1)}(x)^+ Y(u',x) v + Y(u',x) a^{(n-1)}(x)^- v`,
///
/// where `base(v, hi)` is the field of the seed state applied to `v`, exact
/// up to `x^hi` from its support floor.
pub fn normal_ordered<M, F>(l: &Lattice, m: &FockMonomial, v: &M, hi: i64, base: &F) -> Result<Series<M>>
where
    M: HeisenbergModule,
    F: Fn(&M, i64) -> Result<Series<M>>,
{
    let Some(((i, n), rest)) = m.split_first() else {
        return base(v, hi);
    };
    let a = l.basis(i);
    let k = (n - 1) as u64;
    let inner = normal_ordered(l, &rest, v, hi, base)?;
    let part1 = compose(&inner, Some(0), |c, e| Ok(creation_series(l, &a, k, c, hi - e)))?;
    let ann = annihilation_series(l, &a, k, v);
    let part2 = compose(&ann, None, |c, e| normal_ordered(l, &rest, c, hi - e, base))?;
    Ok(part1.add(&part2))
}

/// The vertex operator map of the Heisenberg vertex algebra `M(1)` on the
/// Fock space, exact up to `w.hi` from its support floor.
pub fn y_m1_oracle(l: &Lattice, u: &FockVector, v: &FockVector, w: Window) -> Result<Series<FockVector>> {
    let base = |x: &FockVector, _hi: i64| Ok(Series::constant(x.clone()));
    let mut out: Option<Series<FockVector>> = None;
    for (m, c) in u.terms() {
        let s = normal_ordered(l, m, v, w.hi, &base)?.scale_by(c);
        out = Some(match out {
            None => s,
            Some(mut o) => {
                o.add_assign(&s);
                o
            }
        });
    }
    Ok(out.unwrap_or_else(Series::zero))
}

/// The Heisenberg vertex algebra `M(1)` on the Fock space.
#[derive(Clone, Debug)]
pub struct HeisenbergVoa {
    pub lattice: Lattice,
}

impl HeisenbergVoa {
    pub fn new(lattice: Lattice) -> Self {
        HeisenbergVoa { lattice }
    }
}

impl VertexAlgebra for HeisenbergVoa {
    type Elem = FockVector;

    fn vacuum(&self) -> FockVector {
        FockVector::vacuum()
    }

    fn y(&self, a: &FockVector, b: &FockVector, w: Window) -> Result<Series<FockVector>> {
        y_m1_oracle(&self.lattice, a, b, w)
    }

    fn translation(&self, a: &FockVector) -> FockVector {
        translate(a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(factors: &[(usize, u32)]) -> FockVector {
        FockVector::from_modes(factors)
    }

    fn alpha() -> LatticePoint {
        LatticePoint::from_ints(&[1])
    }

    #[test]
    fn create_examples() {
        let v = create(0, 1, &FockVector::vacuum()).unwrap();
        assert_eq!(v, a(&[(0, 1)]));
        assert_eq!(create(0, 2, &v).unwrap(), a(&[(0, 1), (0, 2)]));
        assert!(create(0, 0, &v).is_err());
        let mut two = a(&[(0, 1)]);
        two.add_assign(&a(&[(0, 2)]).scale(&Scalar::from_int(3)));
        let mut expect = a(&[(0, 1), (0, 1)]);
        expect.add_assign(&a(&[(0, 1), (0, 2)]).scale(&Scalar::from_int(3)));
        assert_eq!(create(0, 1, &two).unwrap(), expect);
    }

    #[test]
    fn annihilate_examples() {
        let l = Lattice::a1();
        assert_eq!(annihilate(&l, &alpha(), 1, &a(&[(0, 1)])), FockVector::vacuum().scale(&Scalar::from_int(2)));
        assert_eq!(
            annihilate(&l, &alpha(), 1, &a(&[(0, 1), (0, 1)])),
            a(&[(0, 1)]).scale(&Scalar::from_int(4))
        );
        assert!(annihilate(&l, &alpha(), 0, &a(&[(0, 3)])).is_zero());
    }

    #[test]
    fn translate_examples() {
        assert_eq!(translate(&a(&[(0, 1)])), a(&[(0, 2)]));
        assert_eq!(translate(&a(&[(0, 1), (0, 1)])), a(&[(0, 1), (0, 2)]).scale(&Scalar::from_int(2)));
        assert!(translate(&FockVector::vacuum()).is_zero());
    }

    #[test]
    fn e_plus_examples() {
        let l = Lattice::a1();
        let w = Window { lo: -4, hi: 4 };
        let s = e_field(&l, &alpha().neg(), true, &a(&[(0, 1)]), w).unwrap();
        assert_eq!(s, Series::polynomial([(0, a(&[(0, 1)])), (-1, FockVector::vacuum().scale(&Scalar::from_int(-2)))]));
        let s = e_field(&l, &alpha().neg(), true, &a(&[(0, 1), (0, 1)]), w).unwrap();
        let expect = Series::polynomial([
            (0, a(&[(0, 1), (0, 1)])),
            (-1, a(&[(0, 1)]).scale(&Scalar::from_int(-4))),
            (-2, FockVector::vacuum().scale(&Scalar::from_int(4))),
        ]);
        assert_eq!(s, expect);
        let one = e_field(&l, &alpha(), true, &FockVector::vacuum(), w).unwrap();
        assert_eq!(one, Series::constant(FockVector::vacuum()));
    }

    #[test]
    fn e_minus_on_vacuum() {
        let l = Lattice::a1();
        let w = Window { lo: -2, hi: 3 };
        let s = e_field(&l, &alpha().neg(), false, &FockVector::vacuum(), w).unwrap();
        // exp(sum a(-k)/k x^k)|0>
        assert_eq!(s.coeff(0).unwrap(), Some(&FockVector::vacuum()));
        assert_eq!(s.coeff(1).unwrap(), Some(&a(&[(0, 1)])));
        let mut x2 = a(&[(0, 2)]).scale(&Scalar::from_ratio(1, 2));
        x2.add_assign(&a(&[(0, 1), (0, 1)]).scale(&Scalar::from_ratio(1, 2)));
        assert_eq!(s.coeff(2).unwrap(), Some(&x2));
        assert!(s.coeff(4).is_err());
    }

    #[test]
    fn heis_field_examples() {
        let l = Lattice::a1();
        let w = Window { lo: -2, hi: 2 };
        let s = heis_field(&l, &alpha(), &FockVector::vacuum(), w);
        assert_eq!(s.coeff(0).unwrap(), Some(&a(&[(0, 1)])));
        assert_eq!(s.coeff(1).unwrap(), Some(&a(&[(0, 2)])));
        assert_eq!(s.coeff(2).unwrap(), Some(&a(&[(0, 3)])));
        assert_eq!(s.coeff(-1).unwrap(), None);
        let t = heis_field(&l, &alpha(), &a(&[(0, 1)]), w);
        assert_eq!(t.coeff(-2).unwrap(), Some(&FockVector::vacuum().scale(&Scalar::from_int(2))));
        assert_eq!(t.support_floor(), Some(-2));
    }

    #[test]
    fn y_m1_examples() {
        let l = Lattice::a1();
        let w = Window { lo: -4, hi: 4 };
        let v = a(&[(0, 1), (0, 2)]);
        assert_eq!(y_m1_oracle(&l, &FockVector::vacuum(), &v, w).unwrap(), Series::constant(v.clone()));
        let s = y_m1_oracle(&l, &a(&[(0, 1)]), &a(&[(0, 1)]), w).unwrap();
        assert_eq!(s.coeff(-2).unwrap(), Some(&FockVector::vacuum().scale(&Scalar::from_int(2))));
        for u in monomials_up_to(1, 4) {
            let u = FockVector::from_monomial(u);
            let s = y_m1_oracle(&l, &u, &FockVector::vacuum(), w).unwrap();
            assert_eq!(s.coeff(0).unwrap().cloned().unwrap_or_default(), u);
            for n in -4..0 {
                assert_eq!(s.coeff(n).unwrap(), None);
            }
        }
    }

    #[test]
    fn monomial_counts() {
        // partitions with 2 colours: 1, 2, 5, 10, 20
        let counts: Vec<usize> = (0..5).map(|w| monomials_of_weight(2, w).len()).collect();
        assert_eq!(counts, vec![1, 2, 5, 10, 20]);
        let p: Vec<usize> = (0..7).map(|w| monomials_of_weight(1, w).len()).collect();
        assert_eq!(p, vec![1, 1, 2, 3, 5, 7, 11]);
    }

    #[test]
    fn display_monomial() {
        let m = FockMonomial::new(vec![(0, 2), (0, 2), (1, 1)]);
        assert_eq!(m.to_string(), "a1(-2)^2 a2(-1) |0>");
    }
}
