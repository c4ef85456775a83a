//! Vertex algebra interfaces and the generic two-variable checkers:
//! weak associativity, weak commutativity, skew symmetry and the
//! coproduct-type commutation relation
//! `a(x1) Y(v,x2) w = sum_i Y(b_i(x1 +- x2) v, x2) c_i(x1) w`.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::report::Verdict;
use crate::scalar::Scalar;
use crate::series::{accumulate, binomial_scalar, compose, exp_action, Series, Sign, Vector, Window};
use crate::tensor::{Coordinates, TensorVector};

/// A (nonlocal) vertex algebra with exact truncated field evaluation.
pub trait VertexAlgebra: Sync {
    type Elem: Coordinates;

    fn vacuum(&self) -> Self::Elem;

    /// `Y(a,x)b`, exact from its support floor up to `x^{w.hi}`.
    fn y(&self, a: &Self::Elem, b: &Self::Elem, w: Window) -> Result<Series<Self::Elem>>;

    /// The canonical derivation `D`, `Dv = v_{-2} 1`.
    fn translation(&self, a: &Self::Elem) -> Self::Elem;

    /// A lower bound on the support of every `Y(a,x)b`, if one exists.
    fn uniform_floor(&self) -> Option<i64> {
        None
    }
}

/// A module `W` for a vertex algebra with elements `Alg`.
pub trait VertexModule: Sync {
    type Alg: Vector;
    type Elem: Coordinates;

    fn y_w(&self, a: &Self::Alg, w: &Self::Elem, win: Window) -> Result<Series<Self::Elem>>;

    fn uniform_floor(&self) -> Option<i64> {
        None
    }
}

/// A vertex algebra viewed as a module over itself.
pub struct Adjoint<'a, V>(pub &'a V);

impl<V: VertexAlgebra> VertexModule for Adjoint<'_, V> {
    type Alg = V::Elem;
    type Elem = V::Elem;

    fn y_w(&self, a: &V::Elem, w: &V::Elem, win: Window) -> Result<Series<V::Elem>> {
        self.0.y(a, w, win)
    }

    fn uniform_floor(&self) -> Option<i64> {
        self.0.uniform_floor()
    }
}

/// A vertex algebra that is also a differential bialgebra.
pub trait Bialgebra: VertexAlgebra {
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem>;
    fn coproduct(&self, a: &Self::Elem) -> Result<TensorVector<Self::Elem, Self::Elem>>;
    fn counit(&self, a: &Self::Elem) -> Result<Scalar>;
}

/// An action `Y_M(h,x)v` of the elements of a bialgebra on a carrier.
pub trait ModuleAction: Sync {
    type H: Coordinates;
    type V: Coordinates;

    fn act(&self, h: &Self::H, v: &Self::V, w: Window) -> Result<Series<Self::V>>;
}

/// A rectangle of exponents `(x1 or x0, x2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Rect {
    pub first: Window,
    pub second: Window,
}

impl Rect {
    pub fn square(w: Window) -> Self {
        Rect { first: w, second: w }
    }

    pub fn widen(&self, by: i64) -> Self {
        Rect {
            first: self.first.widen(by),
            second: self.second.widen(by),
        }
    }
}

/// Tally of a coefficientwise comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Comparison {
    pub certified: usize,
    pub undecided: usize,
    pub mismatch: Option<(i64, i64)>,
}

impl Comparison {
    pub fn is_pass(&self) -> bool {
        self.mismatch.is_none() && self.certified > 0
    }

    pub fn verdict(&self, what: &str) -> Verdict {
        match self.mismatch {
            Some((p, q)) => Verdict::fail(format!("{what}: coefficient ({p},{q}) differs")),
            None if self.certified == 0 => Verdict::undecidable(format!("{what}: no certified coefficient")),
            None => Verdict::pass(self.certified, ""),
        }
    }

    pub fn merge(&mut self, other: &Comparison) {
        self.certified += other.certified;
        self.undecided += other.undecided;
        if self.mismatch.is_none() {
            self.mismatch = other.mismatch;
        }
    }
}

/// Compares two coefficient oracles on a rectangle. An oracle returns `None`
/// for an uncertified coefficient and `Some(None)` for a certified zero.
pub fn compare_bivariate<W: Vector>(
    rect: Rect,
    mut lhs: impl FnMut(i64, i64) -> Option<Option<W>>,
    mut rhs: impl FnMut(i64, i64) -> Option<Option<W>>,
) -> Comparison {
    let mut c = Comparison::default();
    for q in rect.second.iter() {
        for p in rect.first.iter() {
            match (lhs(p, q), rhs(p, q)) {
                (Some(a), Some(b)) => {
                    let a = a.filter(|v| !v.is_zero());
                    let b = b.filter(|v| !v.is_zero());
                    if a != b {
                        c.mismatch.get_or_insert((p, q));
                    } else {
                        c.certified += 1;
                    }
                }
                _ => c.undecided += 1,
            }
        }
    }
    c
}

/// Compares two single-variable series on a window.
pub fn compare_series<W: Vector>(a: &Series<W>, b: &Series<W>, w: Window) -> Comparison {
    compare_bivariate(
        Rect { first: w, second: Window { lo: 0, hi: 0 } },
        |p, _| a.try_coeff(p).map(|v| v.cloned()),
        |p, _| b.try_coeff(p).map(|v| v.cloned()),
    )
}

pub type OpFn<'a, W> = dyn Fn(&W, Window) -> Result<Series<W>> + Sync + 'a;
pub type FieldFn<'a, X, W> = dyn Fn(&X, &W, Window) -> Result<Series<W>> + Sync + 'a;

/// One summand `coeff * Y(b(x1 +- x2) v, x2) c(x1) w`, given by the two
/// one-variable series `b(x) v` and `c(x) w`.
pub struct DeltaTerm<X, W> {
    pub inner: Series<X>,
    pub outer: Series<W>,
    pub coeff: Scalar,
}

/// Coefficients on a rectangle: `None` uncertified, `Some(None)` certified zero.
pub type Grid<W> = HashMap<(i64, i64), Option<Option<W>>>;

/// `a(x1) Y(v,x2) w` on `rect`, given `lhs_rows = Y(v,x2) w` and the
/// operator `lhs_op`.
pub fn delta_lhs_grid<W: Vector>(lhs_rows: &Series<W>, lhs_op: &OpFn<'_, W>, rect: Rect) -> Result<Grid<W>> {
    let mut out = HashMap::new();
    for q in rect.second.iter() {
        let row = match lhs_rows.try_coeff(q) {
            None => None,
            Some(None) => Some(None),
            Some(Some(c)) => Some(Some(lhs_op(c, rect.first)?)),
        };
        for p in rect.first.iter() {
            let v = match &row {
                None => None,
                Some(None) => Some(None),
                Some(Some(s)) => s.try_coeff(p).map(|v| v.cloned()),
            };
            out.insert((p, q), v);
        }
    }
    Ok(out)
}

/// `sum_i coeff_i Y(b_i(x1 +- x2) v, x2) c_i(x1) w` on `rect`.
///
/// `y(d, e, win)` evaluates the outer field `Y(d,x2) e`. `(x1 +- x2)^a` is
/// expanded in nonnegative powers of `x2`. If `y_floor` bounds the support
/// of `y` from below, the series `c_i(x1) w` may be infinite; otherwise it
/// must be a Laurent polynomial.
pub fn delta_rhs_grid<X: Vector, W: Vector>(
    terms: &[DeltaTerm<X, W>],
    sign: Sign,
    y: &FieldFn<'_, X, W>,
    y_floor: Option<i64>,
    rect: Rect,
) -> Result<Grid<W>> {
    let mut memo: HashMap<(usize, i64, i64), Series<W>> = HashMap::new();
    let mut out = HashMap::new();
    let sgn = sign.factor();
    for q in rect.second.iter() {
        for p in rect.first.iter() {
            let mut acc: Option<W> = None;
            let mut known = true;
            'terms: for (ti, t) in terms.iter().enumerate() {
                if !t.inner.is_fully_known() {
                    known = false;
                    break;
                }
                let cf = t.outer.support_floor();
                for (a, d) in t.inner.terms() {
                    // b = p - a + k ranges over the support of c(x1) w
                    let k_lo = match cf {
                        Some(f) => (f + a - p).max(0),
                        None => {
                            known = false;
                            break 'terms;
                        }
                    };
                    let k_hi = match (y_floor, t.outer.support_ceil()) {
                        (Some(u), Some(c)) => (q - u).min(c - p + a),
                        (Some(u), None) => q - u,
                        (None, Some(c)) if t.outer.is_fully_known() => c - p + a,
                        _ => {
                            known = false;
                            break 'terms;
                        }
                    };
                    for k in k_lo..=k_hi {
                        let b = p - a + k;
                        let e = match t.outer.try_coeff(b) {
                            None => {
                                known = false;
                                break 'terms;
                            }
                            Some(None) => continue,
                            Some(Some(e)) => e,
                        };
                        let key = (ti, a, b);
                        if !memo.contains_key(&key) {
                            memo.insert(key, y(d, e, rect.second)?);
                        }
                        match memo[&key].try_coeff(q - k) {
                            None => {
                                known = false;
                                break 'terms;
                            }
                            Some(None) => {}
                            Some(Some(v)) => {
                                let mut c = binomial_scalar(a, k as u64);
                                if sgn < 0 && k % 2 == 1 {
                                    c = -c;
                                }
                                accumulate(&mut acc, v.scale(&(&c * &t.coeff)));
                            }
                        }
                    }
                }
            }
            out.insert((p, q), if known { Some(acc) } else { None });
        }
    }
    Ok(out)
}

/// Evaluates both sides of
/// `a(x1) Y(v,x2) w = sum_i coeff_i Y(b_i(x1 +- x2) v, x2) c_i(x1) w`
/// on `rect` (first = x1, second = x2) and compares them. See
/// [`delta_lhs_grid`] and [`delta_rhs_grid`].
pub fn delta_closed_comparison<X: Vector, W: Vector>(
    lhs_rows: &Series<W>,
    lhs_op: &OpFn<'_, W>,
    terms: &[DeltaTerm<X, W>],
    sign: Sign,
    y: &FieldFn<'_, X, W>,
    y_floor: Option<i64>,
    rect: Rect,
) -> Result<Comparison> {
    let lhs = delta_lhs_grid(lhs_rows, lhs_op, rect)?;
    let rhs = delta_rhs_grid(terms, sign, y, y_floor, rect)?;
    Ok(compare_bivariate(
        rect,
        |p, q| lhs.get(&(p, q)).cloned().flatten(),
        |p, q| rhs.get(&(p, q)).cloned().flatten(),
    ))
}

/// Result of a weak associativity search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeakAssoc {
    /// Smallest `l` for which every certified coefficient agrees.
    pub l: Option<usize>,
    pub comparison: Comparison,
}

impl WeakAssoc {
    pub fn verdict(&self, lmax: usize) -> Verdict {
        match self.l {
            Some(l) => Verdict::pass(self.comparison.certified, format!("l={l}")),
            None => Verdict::fail(format!(
                "no l <= {lmax} makes the two sides agree (first mismatch {:?})",
                self.comparison.mismatch
            )),
        }
    }
}

/// Searches the smallest `l <= lmax` with
/// `(x0+x2)^l Y(u,x0+x2) Y(v,x2) w = (x0+x2)^l Y(Y(u,x0)v, x2) w`
/// on `rect` (first = x0, second = x2).
pub fn check_weak_assoc<A, M>(
    alg: &A,
    module: &M,
    u: &A::Elem,
    v: &A::Elem,
    w: &M::Elem,
    rect: Rect,
    lmax: usize,
) -> Result<WeakAssoc>
where
    A: VertexAlgebra,
    M: VertexModule<Alg = A::Elem>,
{
    let (x0, x2) = (rect.first, rect.second);
    // A(x1, x2) = Y(u,x1) Y(v,x2) w, stored by rows in x2.
    let s = module.y_w(v, w, x2)?;
    let f2 = s
        .support_floor()
        .ok_or_else(|| Error::truncation("Y(v,x2)w has no support floor"))?;
    let mut a_rows: HashMap<i64, Series<M::Elem>> = HashMap::new();
    for (q, c) in s.terms() {
        if q > x2.hi {
            continue;
        }
        let hi = x0.hi + (x2.hi - q);
        a_rows.insert(q, module.y_w(u, c, Window { lo: x0.lo.min(hi), hi })?);
    }
    let a_coef = |p: i64, q: i64| -> Option<Option<M::Elem>> {
        if q < f2 {
            return Some(None);
        }
        match s.try_coeff(q)? {
            None => Some(None),
            Some(_) => a_rows.get(&q)?.try_coeff(p).map(|v| v.cloned()),
        }
    };
    let mut iota_memo: HashMap<(i64, i64), Option<Option<M::Elem>>> = HashMap::new();
    let mut iota = |a: i64, b: i64| -> Option<Option<M::Elem>> {
        if let Some(v) = iota_memo.get(&(a, b)) {
            return v.clone();
        }
        let mut acc: Option<M::Elem> = None;
        let mut known = true;
        for k in 0..=(b - f2).max(-1) {
            match a_coef(a + k, b - k) {
                None => {
                    known = false;
                    break;
                }
                Some(None) => {}
                Some(Some(x)) => accumulate(&mut acc, x.scale(&binomial_scalar(a + k, k as u64))),
            }
        }
        let r = known.then_some(acc);
        iota_memo.insert((a, b), r.clone());
        r
    };

    // B(x0, x2) = Y(Y(u,x0)v, x2) w, stored by rows in x0.
    let t = alg.y(u, v, x0)?;
    let mut b_rows: HashMap<i64, Series<M::Elem>> = HashMap::new();
    for (a, d) in t.terms() {
        if a > x0.hi {
            continue;
        }
        b_rows.insert(a, module.y_w(d, w, x2)?);
    }
    let b_coef = |a: i64, b: i64| -> Option<Option<M::Elem>> {
        match t.try_coeff(a)? {
            None => Some(None),
            Some(_) => b_rows.get(&a)?.try_coeff(b).map(|v| v.cloned()),
        }
    };

    let mut total = Comparison::default();
    for l in 0..=lmax {
        let binoms: Vec<Scalar> = (0..=l).map(|i| binomial_scalar(l as i64, i as u64)).collect();
        let mut lhs_vals: HashMap<(i64, i64), Option<Option<M::Elem>>> = HashMap::new();
        for b in x2.iter() {
            for a in x0.iter() {
                let mut acc = None;
                let mut known = true;
                for (i, c) in binoms.iter().enumerate() {
                    match iota(a - i as i64, b - l as i64 + i as i64) {
                        None => {
                            known = false;
                            break;
                        }
                        Some(None) => {}
                        Some(Some(x)) => accumulate(&mut acc, x.scale(c)),
                    }
                }
                lhs_vals.insert((a, b), known.then_some(acc));
            }
        }
        let cmp = compare_bivariate(
            rect,
            |a, b| lhs_vals.get(&(a, b)).cloned().flatten(),
            |a, b| {
                let mut acc = None;
                for (i, c) in binoms.iter().enumerate() {
                    match b_coef(a - i as i64, b - l as i64 + i as i64) {
                        None => return None,
                        Some(None) => {}
                        Some(Some(x)) => accumulate(&mut acc, x.scale(c)),
                    }
                }
                Some(acc)
            },
        );
        if cmp.is_pass() {
            return Ok(WeakAssoc {
                l: Some(l),
                comparison: cmp,
            });
        }
        total.merge(&cmp);
    }
    if total.certified == 0 && total.mismatch.is_none() {
        return Err(Error::truncation("weak associativity: certified region is empty"));
    }
    Ok(WeakAssoc {
        l: None,
        comparison: total,
    })
}

/// Compares `Y(u,x)v` with `e^{xD} Y(v,-x) u` on `w`.
pub fn check_skew_symmetry<A: VertexAlgebra>(alg: &A, u: &A::Elem, v: &A::Elem, w: Window) -> Result<Comparison> {
    let lhs = alg.y(u, v, w)?;
    let yvu = alg.y(v, u, w)?;
    if yvu.support_floor().is_none() {
        return Err(Error::truncation("Y(v,x)u has no support floor"));
    }
    let refl = yvu.alternate();
    let rhs = compose(&refl, Some(0), |c, m| {
        let hi = w.hi - m;
        exp_action(|x| alg.translation(x), 1, c, Window { lo: hi.min(0), hi })
    })?;
    Ok(compare_series(&lhs, &rhs, w))
}

/// Smallest `k <= kmax` with `(x1-x2)^k [Y(a,x1),Y(b,x2)] w = 0` on `rect`.
pub fn check_weak_commutativity<A: VertexAlgebra>(
    alg: &A,
    a: &A::Elem,
    b: &A::Elem,
    w: &A::Elem,
    kmax: usize,
    rect: Rect,
) -> Result<Option<usize>> {
    let (x1, x2) = (rect.first, rect.second);
    let slack = kmax as i64;
    let yb = alg.y(b, w, x2)?;
    let ya = alg.y(a, w, x1)?;
    let mut rows1: HashMap<i64, Series<A::Elem>> = HashMap::new();
    for (q, c) in yb.terms() {
        rows1.insert(q, alg.y(a, c, Window { lo: x1.lo, hi: x1.hi + slack })?);
    }
    let mut rows2: HashMap<i64, Series<A::Elem>> = HashMap::new();
    for (p, c) in ya.terms() {
        rows2.insert(p, alg.y(b, c, Window { lo: x2.lo, hi: x2.hi + slack })?);
    }
    let term = |s: &Series<A::Elem>, rows: &HashMap<i64, Series<A::Elem>>, o: i64, i: i64| -> Option<Option<A::Elem>> {
        match s.try_coeff(o)? {
            None => Some(None),
            Some(_) => rows.get(&o)?.try_coeff(i).map(|v| v.cloned()),
        }
    };
    let diff = |p: i64, q: i64| -> Option<Option<A::Elem>> {
        let l = term(&yb, &rows1, q, p)?;
        let r = term(&ya, &rows2, p, q)?;
        Some(match (l, r) {
            (None, None) => None,
            (Some(x), None) => Some(x),
            (None, Some(y)) => Some(y.neg()),
            (Some(mut x), Some(y)) => {
                x.sub_assign(&y);
                Some(x)
            }
        })
    };
    let mut any = false;
    for k in 0..=kmax {
        let cmp = compare_bivariate(
            rect,
            |p, q| {
                let mut acc = None;
                for i in 0..=k as i64 {
                    let mut c = binomial_scalar(k as i64, i as u64);
                    if i % 2 == 1 {
                        c = -c;
                    }
                    match diff(p - k as i64 + i, q - i)? {
                        None => {}
                        Some(x) => accumulate(&mut acc, x.scale(&c)),
                    }
                }
                Some(acc)
            },
            |_, _| Some(None),
        );
        any |= cmp.certified > 0 || cmp.mismatch.is_some();
        if cmp.is_pass() {
            return Ok(Some(k));
        }
    }
    if !any {
        return Err(Error::truncation("weak commutativity: certified region is empty"));
    }
    Ok(None)
}

/// Vacuum, creation and translation axioms for `v`:
/// `Y(1,x)v = v`, `Y(v,x)1` has no negative powers with constant term `v`,
/// and its `x^1` coefficient is `Dv`.
pub fn check_vacuum_axioms<A: VertexAlgebra>(alg: &A, v: &A::Elem, w: Window) -> Result<Verdict> {
    let one = alg.vacuum();
    let y1 = alg.y(&one, v, w)?;
    let c1 = compare_series(&y1, &Series::constant(v.clone()), w);
    if !c1.is_pass() {
        return Ok(c1.verdict("Y(1,x)v = v"));
    }
    let win = Window { lo: w.lo.min(-1), hi: w.hi.max(1) };
    let yv = alg.y(v, &one, win)?;
    for n in win.lo..0 {
        if !matches!(yv.try_coeff(n), Some(None)) {
            return Ok(Verdict::fail(format!("Y(v,x)1 has a nonzero or uncertified x^{n} term")));
        }
    }
    let c0 = yv.coeff(0)?.cloned();
    if c0.as_ref().map_or(!v.is_zero(), |x| x != v) {
        return Ok(Verdict::fail("creation axiom: Y(v,x)1 at x=0 differs from v"));
    }
    let d = alg.translation(v);
    let c1x = yv.coeff(1)?.cloned();
    let ok = match c1x {
        None => d.is_zero(),
        Some(x) => x == d,
    };
    if !ok {
        return Ok(Verdict::fail("translation: x^1 coefficient of Y(v,x)1 differs from Dv"));
    }
    Ok(Verdict::pass(c1.certified + (-win.lo) as usize + 2, ""))
}
