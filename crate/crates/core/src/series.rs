//! Windowed formal Laurent series with certified-exact regions.
//!
//! A [`Series`] stores the coefficients it has computed together with
//! three facts about the untruncated object:
//!
//! * `exact`: a window on which every stored coefficient (and every absent
//!   one, read as zero) agrees with the true series;
//! * `floor`: an optional proven lower bound on the support;
//! * `ceil`: an optional proven upper bound on the support.
//!
//! A coefficient is *known* when it lies in the exact window or outside the
//! support bounds. Every operation below propagates exactness so that a
//! coefficient is reported only if all of its contributions are known.
//!
//! Substitutions `x -> x1 +- x2` always expand in nonnegative powers of the
//! second variable.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// An inclusive exponent range `lo..=hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
pub struct Window {
    pub lo: i64,
    pub hi: i64,
}

impl Window {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::domain(format!("empty window [{lo},{hi}]")));
        }
        Ok(Window { lo, hi })
    }

    pub fn contains(&self, n: i64) -> bool {
        self.lo <= n && n <= self.hi
    }

    pub fn widen(&self, by: i64) -> Window {
        Window {
            lo: self.lo - by,
            hi: self.hi + by,
        }
    }

    pub fn len(&self) -> usize {
        (self.hi - self.lo + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi
    }

    pub fn iter(&self) -> impl Iterator<Item = i64> {
        self.lo..=self.hi
    }
}

impl fmt::Display for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

/// A coefficient space: a vector space over [`Scalar`].
pub trait Vector: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn is_zero(&self) -> bool;
    fn add_assign(&mut self, other: &Self);
    fn scale(&self, s: &Scalar) -> Self;

    fn neg(&self) -> Self {
        self.scale(&Scalar::from_int(-1))
    }

    fn sub_assign(&mut self, other: &Self) {
        self.add_assign(&other.neg());
    }
}

impl Vector for Scalar {
    fn is_zero(&self) -> bool {
        Scalar::is_zero(self)
    }
    fn add_assign(&mut self, other: &Self) {
        *self = &*self + other;
    }
    fn scale(&self, s: &Scalar) -> Self {
        self * s
    }
}

/// Accumulates `v` into an optional running sum.
pub fn accumulate<V: Vector>(acc: &mut Option<V>, v: V) {
    match acc {
        Some(a) => a.add_assign(&v),
        None => *acc = Some(v),
    }
}

/// `C(n, k)` for any integer `n` and `k >= 0`.
pub fn binomial(n: i64, k: u64) -> BigRational {
    let mut num = BigInt::one();
    let mut den = BigInt::one();
    for i in 0..k as i64 {
        num *= BigInt::from(n - i);
        den *= BigInt::from(i + 1);
    }
    BigRational::new(num, den)
}

pub fn binomial_scalar(n: i64, k: u64) -> Scalar {
    Scalar::Rat(binomial(n, k))
}

// Exponent bounds with infinities, used only for exactness bookkeeping.
const NEG_INF: i128 = i128::MIN / 4;
const POS_INF: i128 = i128::MAX / 4;

/// A truncated Laurent series with certified-exact region.
#[derive(Clone)]
pub struct Series<V> {
    coeffs: BTreeMap<i64, V>,
    exact: Option<Window>,
    floor: Option<i64>,
    ceil: Option<i64>,
}

/// Equal coefficients and the same certified region; how that region is
/// recorded does not matter.
impl<V: Vector> PartialEq for Series<V> {
    fn eq(&self, other: &Self) -> bool {
        if self.coeffs != other.coeffs {
            return false;
        }
        let k = self.known_interval();
        if k != other.known_interval() {
            return false;
        }
        k == (NEG_INF, POS_INF) || (self.floor == other.floor && self.ceil == other.ceil)
    }
}

impl<V: Vector> Series<V> {
    /// An empty series exact on `exact`. Coefficients are added with
    /// [`Series::insert`].
    pub fn with_window(exact: Option<Window>, floor: Option<i64>, ceil: Option<i64>) -> Self {
        Series {
            coeffs: BTreeMap::new(),
            exact,
            floor,
            ceil,
        }
    }

    /// The zero series, known everywhere.
    pub fn zero() -> Self {
        Series::with_window(Some(Window { lo: 0, hi: 0 }), Some(0), Some(-1))
    }

    /// A finite Laurent polynomial, known everywhere.
    pub fn polynomial(terms: impl IntoIterator<Item = (i64, V)>) -> Self {
        let mut s: Series<V> = Series::zero();
        for (n, v) in terms {
            if let Some(acc) = s.coeffs.get_mut(&n) {
                acc.add_assign(&v);
            } else {
                s.coeffs.insert(n, v);
            }
        }
        s.coeffs.retain(|_, v| !v.is_zero());
        if let (Some(lo), Some(hi)) = (s.coeffs.keys().next(), s.coeffs.keys().last()) {
            s.exact = Some(Window { lo: *lo, hi: *hi });
            s.floor = Some(*lo);
            s.ceil = Some(*hi);
        }
        s
    }

    pub fn constant(v: V) -> Self {
        Series::polynomial([(0, v)])
    }

    pub fn monomial(n: i64, v: V) -> Self {
        Series::polynomial([(n, v)])
    }

    /// Adds `v` to the coefficient of `x^n`. `n` must lie in the exact window.
    pub fn insert(&mut self, n: i64, v: V) {
        debug_assert!(
            self.exact.is_some_and(|w| w.contains(n)),
            "coefficient {n} outside exact window {:?}",
            self.exact
        );
        if v.is_zero() {
            return;
        }
        match self.coeffs.get_mut(&n) {
            Some(acc) => {
                acc.add_assign(&v);
                if acc.is_zero() {
                    self.coeffs.remove(&n);
                }
            }
            None => {
                self.coeffs.insert(n, v);
            }
        }
    }

    pub fn exact(&self) -> Option<Window> {
        self.exact
    }

    pub fn support_floor(&self) -> Option<i64> {
        self.floor
    }

    pub fn support_ceil(&self) -> Option<i64> {
        self.ceil
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &V)> {
        self.coeffs.iter().map(|(n, v)| (*n, v))
    }

    pub fn num_terms(&self) -> usize {
        self.coeffs.len()
    }

    /// Whether the coefficient of `x^n` is certified.
    pub fn is_known(&self, n: i64) -> bool {
        self.floor.is_some_and(|f| n < f)
            || self.ceil.is_some_and(|c| n > c)
            || self.exact.is_some_and(|w| w.contains(n))
    }

    /// Empty support with every coefficient certified.
    fn is_known_zero(&self) -> bool {
        self.coeffs.is_empty() && self.floor.zip(self.ceil).is_some_and(|(f, c)| c < f)
    }

    /// Whether every coefficient is certified.
    pub fn is_fully_known(&self) -> bool {
        let (lo, hi) = self.known_interval();
        lo == NEG_INF && hi == POS_INF
    }

    /// `None` if unknown, `Some(None)` if certified zero.
    pub fn try_coeff(&self, n: i64) -> Option<Option<&V>> {
        if self.is_known(n) {
            Some(self.coeffs.get(&n))
        } else {
            None
        }
    }

    /// The coefficient of `x^n`, or a truncation error if it is not certified.
    pub fn coeff(&self, n: i64) -> Result<Option<&V>> {
        self.try_coeff(n).ok_or_else(|| {
            Error::truncation(format!("coefficient x^{n} outside certified region {:?}", self.exact))
        })
    }

    /// The largest interval of certified exponents that contains the exact
    /// window, with infinities where the support bounds make it unbounded.
    fn known_interval(&self) -> (i128, i128) {
        let Some(w) = self.exact else {
            return match (self.floor, self.ceil) {
                (Some(f), Some(c)) if c < f => (NEG_INF, POS_INF),
                (Some(f), Some(c)) if c + 1 >= f => (NEG_INF, POS_INF),
                _ => (1, 0),
            };
        };
        let (mut lo, mut hi) = (w.lo as i128, w.hi as i128);
        for _ in 0..2 {
            if let Some(f) = self.floor {
                if f as i128 >= lo && lo != NEG_INF {
                    hi = hi.max(f as i128 - 1);
                    lo = NEG_INF;
                }
            }
            if let Some(c) = self.ceil {
                if c as i128 <= hi && hi != POS_INF {
                    lo = lo.min(c as i128 + 1);
                    hi = POS_INF;
                }
            }
        }
        (lo, hi)
    }

    fn support_bounds(&self) -> (i128, i128) {
        (
            self.floor.map_or(NEG_INF, |f| f as i128),
            self.ceil.map_or(POS_INF, |c| c as i128),
        )
    }

    /// Exact window that is fully inside the support; stored coefficients
    /// all lie here.
    fn settle(
        coeffs: BTreeMap<i64, V>,
        known: (i128, i128),
        floor: Option<i64>,
        ceil: Option<i64>,
    ) -> Option<Self> {
        let (mut lo, mut hi) = known;
        if lo == NEG_INF {
            lo = floor? as i128;
        }
        if hi == POS_INF {
            hi = ceil? as i128;
        }
        // A known head lying wholly below the floor (or a known tail above
        // the ceiling) is still a nonempty certified region.
        if lo > hi {
            if known.0 == NEG_INF && known.1 != POS_INF {
                lo = hi;
            } else if known.1 == POS_INF && known.0 != NEG_INF {
                hi = lo;
            }
        }
        let mut s = Series {
            coeffs,
            exact: None,
            floor,
            ceil,
        };
        if lo <= hi {
            s.exact = Some(Window {
                lo: lo as i64,
                hi: hi as i64,
            });
        } else if s.floor.zip(s.ceil).is_some_and(|(f, c)| c < f) {
            s.exact = Some(Window { lo: 0, hi: 0 });
        } else {
            return None;
        }
        s.coeffs.retain(|n, v| !v.is_zero() && lo <= *n as i128 && (*n as i128) <= hi);
        Some(s)
    }

    /// Keeps only the coefficients inside `w`; the result is exact on the
    /// intersection with the current exact window.
    pub fn restrict(&self, w: Window) -> Option<Series<V>> {
        let (klo, khi) = self.known_interval();
        let lo = klo.max(w.lo as i128);
        let hi = khi.min(w.hi as i128);
        if lo > hi {
            return None;
        }
        let coeffs = self
            .coeffs
            .range(lo as i64..=hi as i64)
            .map(|(n, v)| (*n, v.clone()))
            .collect();
        Some(Series {
            coeffs,
            exact: Some(Window {
                lo: lo as i64,
                hi: hi as i64,
            }),
            floor: self.floor,
            ceil: self.ceil,
        })
    }

    pub fn map<W: Vector>(&self, f: impl Fn(&V) -> W) -> Series<W> {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, v)| (*n, f(v)))
                .filter(|(_, w)| !w.is_zero())
                .collect(),
            exact: self.exact,
            floor: self.floor,
            ceil: self.ceil,
        }
    }

    pub fn try_map<W: Vector>(&self, f: impl Fn(&V) -> Result<W>) -> Result<Series<W>> {
        let mut coeffs = BTreeMap::new();
        for (n, v) in &self.coeffs {
            let w = f(v)?;
            if !w.is_zero() {
                coeffs.insert(*n, w);
            }
        }
        Ok(Series {
            coeffs,
            exact: self.exact,
            floor: self.floor,
            ceil: self.ceil,
        })
    }

    /// Multiplication by `x^k`.
    pub fn shift(&self, k: i64) -> Series<V> {
        Series {
            coeffs: self.coeffs.iter().map(|(n, v)| (n + k, v.clone())).collect(),
            exact: self.exact.map(|w| Window {
                lo: w.lo + k,
                hi: w.hi + k,
            }),
            floor: self.floor.map(|f| f + k),
            ceil: self.ceil.map(|c| c + k),
        }
    }

    /// The substitution `x -> -x`.
    pub fn reflect(&self) -> Series<V> {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, v)| (-n, if n % 2 == 0 { v.clone() } else { v.neg() }))
                .collect(),
            exact: self.exact.map(|w| Window { lo: -w.hi, hi: -w.lo }),
            floor: self.ceil.map(|c| -c),
            ceil: self.floor.map(|f| -f),
        }
    }

    /// The substitution `x -> -x` applied to the coefficient exponents only
    /// through a sign `(-1)^n`, keeping exponents: used for `a(x) -> a(-x)`.
    pub fn alternate(&self) -> Series<V> {
        self.map_indexed(|n, v| if n.rem_euclid(2) == 0 { v.clone() } else { v.neg() })
    }

    fn map_indexed(&self, f: impl Fn(i64, &V) -> V) -> Series<V> {
        Series {
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, v)| (*n, f(*n, v)))
                .filter(|(_, w)| !w.is_zero())
                .collect(),
            exact: self.exact,
            floor: self.floor,
            ceil: self.ceil,
        }
    }

    pub fn scale_by(&self, s: &Scalar) -> Series<V> {
        if s.is_zero() {
            let mut z = Series::zero();
            z.exact = Some(Window { lo: 0, hi: 0 });
            return z;
        }
        if s.is_one() {
            return self.clone();
        }
        self.map(|v| v.scale(s))
    }

    /// Sum of two series. The result is exact where both operands are.
    pub fn add(&self, other: &Series<V>) -> Series<V> {
        let mut out = self.clone();
        out.add_in_place(other);
        out
    }

    /// `self += other` without copying `self`.
    fn add_in_place(&mut self, other: &Series<V>) {
        if other.is_known_zero() {
            return;
        }
        if self.is_known_zero() {
            *self = other.clone();
            return;
        }
        let (alo, ahi) = self.known_interval();
        let (blo, bhi) = other.known_interval();
        let known = (alo.max(blo), ahi.min(bhi));
        let floor = self.floor.zip(other.floor).map(|(a, b)| a.min(b));
        let ceil = self.ceil.zip(other.ceil).map(|(a, b)| a.max(b));
        let mut coeffs = std::mem::take(&mut self.coeffs);
        for (n, v) in &other.coeffs {
            match coeffs.get_mut(n) {
                Some(acc) => acc.add_assign(v),
                None => {
                    coeffs.insert(*n, v.clone());
                }
            }
        }
        *self = Series::settle(coeffs, known, floor, ceil).unwrap_or_else(|| Series {
            coeffs: BTreeMap::new(),
            exact: None,
            floor,
            ceil,
        });
    }

    pub fn sub(&self, other: &Series<V>) -> Series<V> {
        self.add(&other.map(|v| v.neg()))
    }

    /// Whether two series agree on every coefficient certified in both.
    /// Returns the number of compared coefficients, or the first exponent at
    /// which they differ.
    pub fn compare(&self, other: &Series<V>, window: Window) -> std::result::Result<usize, i64> {
        let mut n_cmp = 0;
        for n in window.iter() {
            if let (Some(a), Some(b)) = (self.try_coeff(n), other.try_coeff(n)) {
                if a != b {
                    return Err(n);
                }
                n_cmp += 1;
            }
        }
        Ok(n_cmp)
    }
}

impl<V: Vector> fmt::Debug for Series<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Σ ")?;
        if self.coeffs.is_empty() {
            write!(f, "0")?;
        }
        for (i, (n, v)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({v:?}) x^{n}")?;
        }
        match self.exact {
            Some(w) => write!(f, " [exact {}..{}]", w.lo, w.hi),
            None => write!(f, " [exact none]"),
        }
    }
}

/// A series is itself a coefficient space; used for nested two-variable
/// series.
impl<V: Vector> Vector for Series<V> {
    fn is_zero(&self) -> bool {
        self.coeffs.is_empty() && self.is_fully_known()
    }
    fn add_assign(&mut self, other: &Self) {
        self.add_in_place(other);
    }
    fn scale(&self, s: &Scalar) -> Self {
        self.scale_by(s)
    }
}

/// Exponents `n` for which a bilinear product coefficient is certified.
///
/// The coefficient of `x^n` is exact iff every index `i` that can carry a
/// nonzero pair `(a_i, b_{n-i})` has both entries in the operands' exact
/// windows.
fn product_known<A: Vector, B: Vector>(a: &Series<A>, b: &Series<B>) -> (i128, i128) {
    let (fa, ca) = a.support_bounds();
    let (fb, cb) = b.support_bounds();
    let (Some(wa), Some(wb)) = (a.exact, b.exact) else {
        return (1, 0);
    };
    let (la, ha) = (wa.lo as i128, wa.hi as i128);
    let (lb, hb) = (wb.lo as i128, wb.hi as i128);
    let mut lo = NEG_INF;
    let mut hi = POS_INF;
    // max(fa, n - cb) >= la
    if fa < la {
        if cb == POS_INF {
            return (1, 0);
        }
        lo = lo.max(la + cb);
    }
    // max(fa, n - cb) >= n - hb
    if cb > hb {
        if fa == NEG_INF {
            return (1, 0);
        }
        hi = hi.min(fa + hb);
    }
    // min(ca, n - fb) <= ha
    if ca > ha {
        if fb == NEG_INF {
            return (1, 0);
        }
        hi = hi.min(ha + fb);
    }
    // min(ca, n - fb) <= n - lb
    if fb < lb {
        if ca == POS_INF {
            return (1, 0);
        }
        lo = lo.max(ca + lb);
    }
    (lo, hi)
}

fn add_bounds(x: Option<i64>, y: Option<i64>) -> Option<i64> {
    x.zip(y).map(|(a, b)| a + b)
}

/// Cauchy product under an arbitrary bilinear map.
pub fn series_bilinear<A: Vector, B: Vector, C: Vector>(
    a: &Series<A>,
    b: &Series<B>,
    f: impl Fn(&A, &B) -> C,
) -> Result<Series<C>> {
    if a.is_known_zero() || b.is_known_zero() {
        return Ok(Series::zero());
    }
    let known = product_known(a, b);
    let floor = add_bounds(a.floor, b.floor);
    let ceil = add_bounds(a.ceil, b.ceil);
    let mut coeffs: BTreeMap<i64, C> = BTreeMap::new();
    for (i, x) in &a.coeffs {
        for (j, y) in &b.coeffs {
            let n = i + j;
            if (n as i128) < known.0 || (n as i128) > known.1 {
                continue;
            }
            let v = f(x, y);
            match coeffs.get_mut(&n) {
                Some(acc) => acc.add_assign(&v),
                None => {
                    coeffs.insert(n, v);
                }
            }
        }
    }
    Series::settle(coeffs, known, floor, ceil)
        .ok_or_else(|| Error::truncation("product has no certified coefficient"))
}

/// Product of a scalar series with a vector series.
pub fn series_mul<V: Vector>(a: &Series<Scalar>, b: &Series<V>) -> Result<Series<V>> {
    series_bilinear(a, b, |s, v| v.scale(s))
}

/// k-fold formal derivative.
pub fn series_derivative<V: Vector>(a: &Series<V>, k: u64) -> Series<V> {
    let k_i = k as i64;
    let mut out = Series {
        coeffs: BTreeMap::new(),
        exact: a.exact.map(|w| Window {
            lo: w.lo - k_i,
            hi: w.hi - k_i,
        }),
        floor: a.floor.map(|f| f - k_i),
        ceil: a.ceil.map(|c| c - k_i),
    };
    for (n, v) in &a.coeffs {
        // falling factorial n (n-1) ... (n-k+1)
        let c = binomial(*n, k) * (1..=k).fold(BigRational::one(), |acc, i| acc * BigRational::from_integer(i.into()));
        if c.is_zero() {
            continue;
        }
        out.coeffs.insert(n - k_i, v.scale(&Scalar::Rat(c)));
    }
    out
}

/// Divided derivative `(1/k!) (d/dx)^k`.
pub fn series_divided_derivative<V: Vector>(a: &Series<V>, k: u64) -> Series<V> {
    let k_i = k as i64;
    let mut out = series_derivative(&Series::<V>::zero(), 0);
    out.exact = a.exact.map(|w| Window {
        lo: w.lo - k_i,
        hi: w.hi - k_i,
    });
    out.floor = a.floor.map(|f| f - k_i);
    out.ceil = a.ceil.map(|c| c - k_i);
    for (n, v) in &a.coeffs {
        let c = binomial(*n, k);
        if c.is_zero() {
            continue;
        }
        out.coeffs.insert(n - k_i, v.scale(&Scalar::Rat(c)));
    }
    out
}

/// Coefficient of `x^{-1}`.
pub fn residue<V: Vector>(a: &Series<V>) -> Result<Option<V>> {
    Ok(a.coeff(-1)?.cloned())
}

/// Sign of the second variable in a substitution `x -> x1 +- x2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn factor(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// A two-variable series stored as a series in the `outer` variable whose
/// coefficients are series in the other variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Bivariate<V: Vector> {
    rows: Series<Series<V>>,
    outer_is_first: bool,
}

impl<V: Vector> Bivariate<V> {
    /// `rows` indexed by the exponent of the first variable.
    pub fn by_first(rows: Series<Series<V>>) -> Self {
        Bivariate {
            rows,
            outer_is_first: true,
        }
    }

    /// `rows` indexed by the exponent of the second variable.
    pub fn by_second(rows: Series<Series<V>>) -> Self {
        Bivariate {
            rows,
            outer_is_first: false,
        }
    }

    pub fn rows(&self) -> &Series<Series<V>> {
        &self.rows
    }

    /// Support floor in the outer variable.
    pub fn outer_floor(&self) -> Option<i64> {
        self.rows.floor
    }

    /// Coefficient of `x1^e1 x2^e2`: `None` if not certified.
    pub fn try_coeff(&self, e1: i64, e2: i64) -> Option<Option<&V>> {
        let (o, i) = if self.outer_is_first { (e1, e2) } else { (e2, e1) };
        match self.rows.try_coeff(o)? {
            None => Some(None),
            Some(row) => row.try_coeff(i),
        }
    }

    /// Conservative certified rectangle `(first, second)`, if one exists.
    pub fn exact_rect(&self) -> Option<(Window, Window)> {
        let outer = self.rows.exact?;
        let mut inner: Option<(i64, i64)> = None;
        for (_, row) in self.rows.terms() {
            let w = row.exact?;
            inner = Some(match inner {
                None => (w.lo, w.hi),
                Some((l, h)) => (l.max(w.lo), h.min(w.hi)),
            });
        }
        let (l, h) = inner.unwrap_or((outer.lo, outer.hi));
        let inner = Window::new(l, h).ok()?;
        Some(if self.outer_is_first { (outer, inner) } else { (inner, outer) })
    }
}

/// `a(x1 +- x2)`, expanded in nonnegative powers of `x2` up to `x2^q_max`.
///
/// Row `q` (the `x2^q` coefficient) is `C(p+q, q) (+-1)^q a_{p+q}` in `x1^p`.
pub fn iota_substitute<V: Vector>(a: &Series<V>, sign: Sign, q_max: i64) -> Result<Bivariate<V>> {
    if a.floor.is_none() {
        return Err(Error::truncation(
            "substitution needs a support floor to define the double expansion",
        ));
    }
    let mut rows: Series<Series<V>> = Series::with_window(Some(Window { lo: 0, hi: q_max.max(0) }), Some(0), None);
    for q in 0..=q_max.max(0) {
        let sgn = if sign == Sign::Minus && q % 2 == 1 { -1 } else { 1 };
        let mut row = a.shift(-q);
        row.coeffs = a
            .coeffs
            .iter()
            .filter_map(|(n, v)| {
                let c = binomial(*n, q as u64);
                if c.is_zero() {
                    None
                } else {
                    Some((n - q, v.scale(&Scalar::Rat(c * BigRational::from_integer(sgn.into())))))
                }
            })
            .collect();
        if !row.is_zero() {
            rows.coeffs.insert(q, row);
        }
    }
    if q_max < 0 {
        rows.coeffs.clear();
    }
    Ok(Bivariate::by_second(rows))
}

/// Upper bound on the number of operator powers `exp_action` will try
/// before declaring the operator not locally nilpotent.
pub const NILPOTENCE_CAP: usize = 512;

/// `exp(x^t L) v` coefficientwise, exact on `window`.
///
/// For `t > 0` the coefficient of `x^{tk}` is `L^k v / k!`, so only finitely
/// many powers reach the window. For `t <= 0` the operator must be locally
/// nilpotent on `v`; the result is then a finite Laurent polynomial.
pub fn exp_action<V: Vector>(
    op: impl Fn(&V) -> V,
    t: i64,
    v: &V,
    window: Window,
) -> Result<Series<V>> {
    if t > 0 {
        let hi = window.hi;
        let mut out = Series::with_window(Some(Window { lo: window.lo.min(0), hi: hi.max(0) }), Some(0), None);
        if hi < 0 {
            out.exact = Some(Window { lo: window.lo.min(hi), hi });
            return Ok(out);
        }
        let mut term = v.clone();
        let mut k: i64 = 0;
        while k * t <= hi && !term.is_zero() {
            out.insert(k * t, term.clone());
            k += 1;
            term = op(&term).scale(&Scalar::from_ratio(1, k));
        }
        return Ok(out);
    }
    let mut powers = Vec::new();
    let mut term = v.clone();
    while !term.is_zero() {
        if powers.len() > NILPOTENCE_CAP {
            return Err(Error::domain(
                "operator is not locally nilpotent on the argument within the power cap",
            ));
        }
        let next = op(&term);
        powers.push(term);
        term = next;
    }
    let mut fact = BigRational::one();
    let mut terms = Vec::with_capacity(powers.len());
    for (k, p) in powers.into_iter().enumerate() {
        if k > 0 {
            fact *= BigRational::from_integer(BigInt::from(k));
        }
        terms.push((k as i64 * t, p.scale(&Scalar::Rat(fact.recip()))));
    }
    Ok(Series::polynomial(terms))
}

/// Applies an operator series to a series in the same variable:
/// `sum_m x^m op(c_m)` where `inner = sum_m c_m x^m`.
///
/// `op(c, m)` must return the operator series applied to `c`; `m` is the
/// exponent of `c` so the caller can widen the evaluation window to what the
/// result at a given total exponent needs. `op_floor` is a lower bound on the
/// support of `op(c, m)` valid for every `c`; with it, the tail of an
/// infinite `inner` is handled soundly.
pub fn compose<V: Vector, W: Vector>(
    inner: &Series<V>,
    op_floor: Option<i64>,
    mut op: impl FnMut(&V, i64) -> Result<Series<W>>,
) -> Result<Series<W>> {
    let (slo, shi) = inner.support_bounds();
    let (klo, khi) = inner.known_interval();
    let mut lo = NEG_INF;
    let mut hi = POS_INF;
    let mut floor: Option<i128> = Some(POS_INF);
    let mut ceil: Option<i128> = Some(NEG_INF);

    // Unknown exponents of the inner series below its known interval.
    if slo < klo {
        match (op_floor, slo) {
            (Some(u), s) if s != NEG_INF => {
                hi = hi.min(s + u as i128 - 1);
                floor = floor.map(|f| f.min(s + u as i128));
            }
            _ => return Err(Error::truncation("inner series has an unbounded unknown head")),
        }
        ceil = None;
    }
    // Unknown exponents above the known interval.
    if shi > khi {
        match op_floor {
            Some(u) => {
                hi = hi.min(khi + u as i128);
                floor = floor.map(|f| f.min(khi + 1 + u as i128));
            }
            None => return Err(Error::truncation("inner series has an unknown tail")),
        }
        ceil = None;
    }

    let mut coeffs: BTreeMap<i64, W> = BTreeMap::new();
    let mut parts = Vec::with_capacity(inner.coeffs.len());
    for (m, c) in &inner.coeffs {
        let s = op(c, *m)?;
        if s.is_known_zero() {
            continue;
        }
        let (plo, phi) = s.known_interval();
        let m128 = *m as i128;
        lo = lo.max(if plo == NEG_INF { NEG_INF } else { plo + m128 });
        hi = hi.min(if phi == POS_INF { POS_INF } else { phi + m128 });
        floor = match (floor, s.floor) {
            (Some(f), Some(g)) => Some(f.min(g as i128 + m128)),
            _ => None,
        };
        ceil = match (ceil, s.ceil) {
            (Some(c), Some(g)) => Some(c.max(g as i128 + m128)),
            _ => None,
        };
        parts.push((*m, s));
    }
    for (m, s) in parts {
        for (n, w) in s.coeffs {
            let t = n + m;
            match coeffs.get_mut(&t) {
                Some(acc) => acc.add_assign(&w),
                None => {
                    coeffs.insert(t, w);
                }
            }
        }
    }
    let fl = floor.filter(|f| *f != POS_INF).map(|f| f as i64);
    let cl = ceil.filter(|c| *c != NEG_INF).map(|c| c as i64);
    let (fl, cl) = if floor == Some(POS_INF) && ceil == Some(NEG_INF) {
        (Some(0), Some(-1))
    } else {
        (fl, cl)
    };
    Series::settle(coeffs, (lo, hi), fl, cl)
        .ok_or_else(|| Error::truncation("composition has no certified coefficient"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    fn windowed(terms: &[(i64, i64)], w: (i64, i64), floor: Option<i64>) -> Series<Scalar> {
        let mut out = Series::with_window(Some(Window { lo: w.0, hi: w.1 }), floor, None);
        for (n, c) in terms {
            out.insert(*n, s(*c));
        }
        out
    }

    #[test]
    fn product_example_propagates_window() {
        let a = windowed(&[(-1, 1), (0, 1)], (-2, 2), Some(-1));
        let b = windowed(&[(1, 1), (0, -1)], (-2, 2), Some(0));
        let p = series_mul(&a, &b).unwrap();
        assert_eq!(p.exact(), Some(Window { lo: -1, hi: 1 }));
        assert_eq!(p.coeff(1).unwrap(), Some(&s(1)));
        assert_eq!(p.coeff(0).unwrap(), None);
        assert_eq!(p.coeff(-1).unwrap(), Some(&s(-1)));
        assert!(p.coeff(2).is_err());
    }

    #[test]
    fn product_with_unit() {
        let a = windowed(&[(-1, 3), (2, 5)], (-3, 4), Some(-1));
        let p = series_mul(&Series::constant(s(1)), &a).unwrap();
        assert_eq!(p.compare(&a, Window { lo: -3, hi: 4 }), Ok(8));
    }

    #[test]
    fn disjoint_windows_truncate() {
        let a = windowed(&[(0, 1)], (0, 2), None);
        let b = windowed(&[(5, 1)], (5, 7), None);
        assert!(matches!(series_mul(&a, &b), Err(Error::Truncation(_))));
    }

    #[test]
    fn derivative_examples() {
        let a = Series::monomial(-1, s(1));
        assert_eq!(series_derivative(&a, 1), Series::monomial(-2, s(-1)));
        let b = Series::monomial(3, s(1));
        assert_eq!(series_derivative(&b, 2), Series::monomial(1, s(6)));
        let geo = windowed(&[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1), (5, 1)], (0, 5), Some(0));
        let d = series_derivative(&geo, 1);
        assert_eq!(d.exact(), Some(Window { lo: -1, hi: 4 }));
        for n in 0..=4 {
            assert_eq!(d.coeff(n).unwrap(), Some(&s(n + 1)));
        }
        assert!(d.coeff(5).is_err());
    }

    #[test]
    fn residue_examples() {
        assert_eq!(residue(&Series::monomial(-1, s(1))).unwrap(), Some(s(1)));
        assert_eq!(residue(&Series::polynomial([(2, s(1)), (0, s(3))])).unwrap(), None);
        let a = windowed(&[(-1, 5), (-2, 1)], (-2, 0), None);
        assert_eq!(residue(&a).unwrap(), Some(s(5)));
        let b = windowed(&[(0, 1)], (0, 3), None);
        assert!(residue(&b).is_err());
    }

    #[test]
    fn iota_examples() {
        let x = Series::monomial(1, s(1));
        let b = iota_substitute(&x, Sign::Minus, 4).unwrap();
        assert_eq!(b.try_coeff(1, 0), Some(Some(&s(1))));
        assert_eq!(b.try_coeff(0, 1), Some(Some(&s(-1))));
        assert_eq!(b.try_coeff(-1, 2), Some(None));

        let inv = Series::monomial(-1, s(1));
        let m = iota_substitute(&inv, Sign::Minus, 5).unwrap();
        for k in 0..=5 {
            assert_eq!(m.try_coeff(-1 - k, k), Some(Some(&s(1))));
        }
        let p = iota_substitute(&inv, Sign::Plus, 5).unwrap();
        assert_eq!(p.try_coeff(-3, 2), Some(Some(&s(1))));
        assert_eq!(p.try_coeff(-2, 1), Some(Some(&s(-1))));
        // beyond requested x2 ceiling
        assert_eq!(p.try_coeff(-7, 6), None);
    }

    #[test]
    fn iota_requires_floor() {
        let a = windowed(&[(0, 1)], (0, 3), None);
        assert!(iota_substitute(&a, Sign::Plus, 2).is_err());
    }

    #[test]
    fn exp_action_zero_operator() {
        let e = exp_action(|v: &Scalar| v.scale(&Scalar::zero()), 1, &s(7), Window { lo: -2, hi: 5 }).unwrap();
        assert_eq!(e.coeff(0).unwrap(), Some(&s(7)));
        for n in 1..=5 {
            assert_eq!(e.coeff(n).unwrap(), None);
        }
    }

    #[test]
    fn exp_action_geometric() {
        // exp(x * 2) = sum 2^k x^k / k!
        let e = exp_action(|v: &Scalar| v.scale(&s(2)), 1, &s(1), Window { lo: 0, hi: 4 }).unwrap();
        assert_eq!(e.coeff(3).unwrap(), Some(&Scalar::from_ratio(8, 6)));
        assert!(e.coeff(5).is_err());
    }

    #[test]
    fn exp_action_detects_non_nilpotent() {
        let r = exp_action(|v: &Scalar| v.clone(), -1, &s(1), Window { lo: -3, hi: 0 });
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn compose_with_finite_inner() {
        // inner = 1 + x, op(c) = c * (1 + x + x^2 + ...) known to x^3
        let inner = Series::polynomial([(0, s(1)), (1, s(1))]);
        let out = compose(&inner, Some(0), |c: &Scalar, m| {
            let hi = 3 - m;
            let mut g = Series::with_window(Some(Window { lo: 0, hi }), Some(0), None);
            for k in 0..=hi {
                g.insert(k, c.clone());
            }
            Ok(g)
        })
        .unwrap();
        assert_eq!(out.coeff(0).unwrap(), Some(&s(1)));
        assert_eq!(out.coeff(3).unwrap(), Some(&s(2)));
        assert!(out.coeff(4).is_err());
    }

    #[test]
    fn compose_with_infinite_inner_needs_floor() {
        let inner = windowed(&[(0, 1), (1, 1), (2, 1)], (0, 2), Some(0));
        let err = compose(&inner, None, |c: &Scalar, _| Ok(Series::constant(c.clone())));
        assert!(err.is_err());
        let ok = compose(&inner, Some(0), |c: &Scalar, _| Ok(Series::constant(c.clone()))).unwrap();
        assert_eq!(ok.exact(), Some(Window { lo: 0, hi: 2 }));
    }

    #[test]
    fn reflect_and_shift() {
        let a = Series::polynomial([(1, s(2)), (2, s(3))]);
        let r = a.reflect();
        assert_eq!(r.coeff(-1).unwrap(), Some(&s(-2)));
        assert_eq!(r.coeff(-2).unwrap(), Some(&s(3)));
        assert_eq!(a.shift(-2).coeff(0).unwrap(), Some(&s(3)));
    }
}
