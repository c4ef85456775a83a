//! Differential algebras with the vertex structure `Y(a,x)b = (e^{x d}a) b`:
//! the Fock algebra `B_h`, the twisted group algebra `B_{L,eps}` and the
//! bialgebra `B_L`, together with coproducts, counits and axiom checks.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fock::{self, FockMonomial, FockVector, HeisenbergModule};
use crate::lattice::{CocycleTable, Lattice, LatticePoint};
use crate::report::Verdict;
use crate::scalar::Scalar;
use crate::series::{exp_action, Series, Vector, Window};
use crate::tensor::{Coordinates, TensorVector};
use crate::vertex::{Bialgebra, VertexAlgebra};

/// Which space a [`LatticeVector`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Ambient {
    /// `C_eps[L] (x) B_h` with the twisted product.
    BLeps,
    /// `C[L] (x) B_h`, the untwisted bialgebra.
    BL,
    /// The lattice vertex algebra `V_L`.
    VL,
    /// `C[P] (x) B_h` over the dual lattice.
    VP,
}

/// A finite sum of `e_g (x) u` with `u` in the Fock space.
#[derive(Clone)]
pub struct LatticeVector {
    ambient: Ambient,
    terms: BTreeMap<LatticePoint, FockVector>,
}

impl PartialEq for LatticeVector {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms && (self.ambient == other.ambient || self.terms.is_empty())
    }
}

impl LatticeVector {
    pub fn zero(ambient: Ambient) -> Self {
        LatticeVector {
            ambient,
            terms: BTreeMap::new(),
        }
    }

    /// `e_g (x) u`.
    pub fn new(ambient: Ambient, g: LatticePoint, u: FockVector) -> Self {
        let mut v = LatticeVector::zero(ambient);
        v.add_component(g, &u);
        v
    }

    /// `e_g (x) 1`.
    pub fn e(ambient: Ambient, g: LatticePoint) -> Self {
        LatticeVector::new(ambient, g, FockVector::vacuum())
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn retag(&self, ambient: Ambient) -> Self {
        LatticeVector {
            ambient,
            terms: self.terms.clone(),
        }
    }

    pub fn components(&self) -> impl Iterator<Item = (&LatticePoint, &FockVector)> {
        self.terms.iter()
    }

    pub fn component(&self, g: &LatticePoint) -> Option<&FockVector> {
        self.terms.get(g)
    }

    pub fn add_component(&mut self, g: LatticePoint, u: &FockVector) {
        if u.is_zero() {
            return;
        }
        match self.terms.get_mut(&g) {
            Some(x) => {
                x.add_assign(u);
                if x.is_zero() {
                    self.terms.remove(&g);
                }
            }
            None => {
                self.terms.insert(g, u.clone());
            }
        }
    }

    pub fn max_weight(&self) -> i64 {
        self.terms.values().map(FockVector::max_weight).max().unwrap_or(-1)
    }

    /// Applies a map to every Fock component.
    pub fn map_fock(&self, f: impl Fn(&LatticePoint, &FockVector) -> FockVector) -> LatticeVector {
        let mut out = LatticeVector::zero(self.ambient);
        for (g, u) in &self.terms {
            out.add_component(g.clone(), &f(g, u));
        }
        out
    }
}

impl fmt::Debug for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (g, u)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "e{g} (x) [{u}]")?;
        }
        Ok(())
    }
}

impl Vector for LatticeVector {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        if self.terms.is_empty() {
            self.ambient = other.ambient;
        }
        debug_assert!(
            other.terms.is_empty() || self.ambient == other.ambient,
            "adding vectors of different ambient spaces"
        );
        for (g, u) in &other.terms {
            self.add_component(g.clone(), u);
        }
    }
    fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return LatticeVector::zero(self.ambient);
        }
        let mut out = self.clone();
        for u in out.terms.values_mut() {
            *u = u.scale(s);
        }
        out
    }
}

impl Coordinates for LatticeVector {
    type Key = (Ambient, LatticePoint, FockMonomial);
    fn coordinates(&self) -> Vec<(Self::Key, Scalar)> {
        let mut out = Vec::new();
        for (g, u) in &self.terms {
            for (m, c) in u.terms() {
                out.push(((self.ambient, g.clone(), m.clone()), c.clone()));
            }
        }
        out
    }
    fn from_key(key: &Self::Key) -> Self {
        LatticeVector::new(key.0, key.1.clone(), FockVector::from_monomial(key.2.clone()))
    }
}

impl HeisenbergModule for LatticeVector {
    fn heis_mode(&self, l: &Lattice, h: &LatticePoint, n: i64) -> Self {
        if n == 0 {
            let mut out = LatticeVector::zero(self.ambient);
            for (g, u) in &self.terms {
                let c = l.pairing(h, g);
                if !c.is_zero() {
                    out.add_component(g.clone(), &u.scale(&Scalar::Rat(c)));
                }
            }
            return out;
        }
        self.map_fock(|_, u| fock::mode(l, h, n, u))
    }
    fn fock_depth(&self) -> i64 {
        self.max_weight().max(0)
    }
}

/// `Y(a,x)b = (e^{x d} a) b`, exact on `w` with support floor 0.
pub fn borcherds_y<V: Vector>(
    mul: impl Fn(&V, &V) -> Result<V>,
    d: impl Fn(&V) -> V,
    a: &V,
    b: &V,
    w: Window,
) -> Result<Series<V>> {
    let ex = exp_action(d, 1, a, w)?;
    ex.try_map(|c| mul(c, b))
}

/// The twisted product `e_a e_b = eps(a,b) e_{a+b}` with commuting Fock
/// parts. `B_{L,eps}` also acts on `V_P` this way when `t` is the extended
/// cocycle.
pub fn bl_eps_mul(t: &CocycleTable, u: &LatticeVector, v: &LatticeVector) -> Result<LatticeVector> {
    let ambient = match (u.ambient, v.ambient) {
        (a, b) if a == b => a,
        (Ambient::BLeps, Ambient::VP) => Ambient::VP,
        (a, b) if u.is_zero() || v.is_zero() => if u.is_zero() { b } else { a },
        (a, b) => return Err(Error::domain(format!("cannot multiply {a:?} by {b:?}"))),
    };
    let mut out = LatticeVector::zero(ambient);
    for (g, x) in &u.terms {
        for (h, y) in &v.terms {
            let e = t.eval(g, h)?;
            out.add_component(g.add(h), &x.mul(y).scale(&e));
        }
    }
    Ok(out)
}

/// `L(-1)(e_g (x) u) = e_g (x) g(-1)u + e_g (x) L(-1)u`.
pub fn bl_translate(v: &LatticeVector) -> LatticeVector {
    v.map_fock(|g, u| {
        let mut out = fock::translate(u);
        out.add_assign(&fock::create_h(g, 1, u).expect("positive mode"));
        out
    })
}

/// The product `(a (x) b)(c (x) d) = ac (x) bd` on a tensor square.
pub fn tensor_mul<V: Coordinates>(
    mul: &impl Fn(&V, &V) -> Result<V>,
    x: &TensorVector<V, V>,
    y: &TensorVector<V, V>,
) -> Result<TensorVector<V, V>> {
    let mut out = TensorVector::zero();
    for (a, b, c) in x.pairs() {
        for (p, q, d) in y.pairs() {
            out.add_assign(&TensorVector::pure(&mul(&a, &p)?, &mul(&b, &q)?).scale(&(&c * &d)));
        }
    }
    Ok(out)
}

/// `Delta(prod a_i(-n))` with every `a_i(-n)` primitive.
pub fn fock_coproduct(m: &FockMonomial) -> TensorVector<FockVector, FockVector> {
    let one = FockVector::vacuum();
    let mut acc = TensorVector::pure(&one, &one);
    for f in m.factors() {
        let x = FockVector::from_modes(&[*f]);
        let mut prim = TensorVector::pure(&x, &one);
        prim.add_assign(&TensorVector::pure(&one, &x));
        acc = tensor_mul(&|a: &FockVector, b: &FockVector| Ok(a.mul(b)), &acc, &prim).expect("commutative product");
    }
    acc
}

/// `B_h = S(h^-)` with `d = L(-1)`.
#[derive(Clone, Debug)]
pub struct FockAlgebra {
    pub lattice: Lattice,
}

impl FockAlgebra {
    pub fn new(lattice: Lattice) -> Self {
        FockAlgebra { lattice }
    }
}

impl VertexAlgebra for FockAlgebra {
    type Elem = FockVector;

    fn vacuum(&self) -> FockVector {
        FockVector::vacuum()
    }

    fn y(&self, a: &FockVector, b: &FockVector, w: Window) -> Result<Series<FockVector>> {
        borcherds_y(|x: &FockVector, y: &FockVector| Ok(x.mul(y)), fock::translate, a, b, w)
    }

    fn translation(&self, a: &FockVector) -> FockVector {
        fock::translate(a)
    }

    fn uniform_floor(&self) -> Option<i64> {
        Some(0)
    }
}

impl Bialgebra for FockAlgebra {
    fn mul(&self, a: &FockVector, b: &FockVector) -> Result<FockVector> {
        Ok(a.mul(b))
    }

    fn coproduct(&self, a: &FockVector) -> Result<TensorVector<FockVector, FockVector>> {
        let mut out = TensorVector::zero();
        for (m, c) in a.terms() {
            out.add_assign(&fock_coproduct(m).scale(c));
        }
        Ok(out)
    }

    fn counit(&self, a: &FockVector) -> Result<Scalar> {
        Ok(a.vacuum_coeff())
    }
}

/// `B_{L,eps}` (ambient `BLeps`) or `B_L` (ambient `BL`, trivial cocycle)
/// with `d = L(-1)`.
#[derive(Clone, Debug)]
pub struct LatticeAlgebra {
    pub lattice: Lattice,
    pub cocycle: CocycleTable,
    pub ambient: Ambient,
    exp_cache: ExpCache,
}

/// `e^{xd}(e_g (x) m)` per basis vector, with the largest order computed.
#[derive(Default)]
struct ExpCache(Mutex<BTreeMap<(LatticePoint, FockMonomial), (i64, Series<LatticeVector>)>>);

impl Clone for ExpCache {
    fn clone(&self) -> Self {
        ExpCache::default()
    }
}

impl fmt::Debug for ExpCache {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ExpCache")
    }
}

impl LatticeAlgebra {
    /// The twisted algebra `B_{L,eps}`.
    pub fn twisted(lattice: Lattice, cocycle: CocycleTable) -> Self {
        LatticeAlgebra {
            lattice,
            cocycle,
            ambient: Ambient::BLeps,
            exp_cache: ExpCache::default(),
        }
    }

    /// The group bialgebra `B_L`.
    pub fn untwisted(lattice: Lattice) -> Self {
        let r = lattice.rank();
        LatticeAlgebra {
            lattice,
            cocycle: CocycleTable::trivial(r),
            ambient: Ambient::BL,
            exp_cache: ExpCache::default(),
        }
    }

    pub fn e(&self, g: LatticePoint) -> LatticeVector {
        LatticeVector::e(self.ambient, g)
    }

    pub fn elem(&self, g: LatticePoint, u: FockVector) -> LatticeVector {
        LatticeVector::new(self.ambient, g, u)
    }

    /// `e^{xd} a`, exact up to `hi`.
    fn exp_d(&self, a: &LatticeVector, hi: i64) -> Result<Series<LatticeVector>> {
        let mut out: Series<LatticeVector> = Series::zero();
        for (g, u) in a.components() {
            for (m, c) in u.terms() {
                let key = (g.clone(), m.clone());
                let hit = self.exp_cache.0.lock().expect("cache lock").get(&key).filter(|(h, _)| *h >= hi).cloned();
                let s = match hit {
                    Some((_, s)) => s,
                    None => {
                        let basis = LatticeVector::new(a.ambient(), g.clone(), FockVector::from_monomial(m.clone()));
                        let s = exp_action(bl_translate, 1, &basis, Window { lo: 0, hi })?;
                        self.exp_cache.0.lock().expect("cache lock").insert(key, (hi, s.clone()));
                        s
                    }
                };
                let s = s.restrict(Window { lo: 0, hi }).expect("nonempty exact window");
                out.add_assign(&s.scale_by(c));
            }
        }
        Ok(out)
    }

    fn require_bialgebra(&self) -> Result<()> {
        if self.ambient != Ambient::BL || !self.cocycle.is_trivial() {
            return Err(Error::domain("a twisted group algebra is not a bialgebra"));
        }
        Ok(())
    }
}

impl VertexAlgebra for LatticeAlgebra {
    type Elem = LatticeVector;

    fn vacuum(&self) -> LatticeVector {
        self.e(LatticePoint::zero(self.lattice.rank()))
    }

    fn y(&self, a: &LatticeVector, b: &LatticeVector, w: Window) -> Result<Series<LatticeVector>> {
        if w.hi < 0 || a.is_zero() {
            return borcherds_y(|x: &LatticeVector, y: &LatticeVector| bl_eps_mul(&self.cocycle, x, y), bl_translate, a, b, w);
        }
        self.exp_d(a, w.hi)?.try_map(|c| bl_eps_mul(&self.cocycle, c, b))
    }

    fn translation(&self, a: &LatticeVector) -> LatticeVector {
        bl_translate(a)
    }

    fn uniform_floor(&self) -> Option<i64> {
        Some(0)
    }
}

impl Bialgebra for LatticeAlgebra {
    fn mul(&self, a: &LatticeVector, b: &LatticeVector) -> Result<LatticeVector> {
        bl_eps_mul(&self.cocycle, a, b)
    }

    /// `e^g` group-like, `a_i(-n)` primitive.
    fn coproduct(&self, a: &LatticeVector) -> Result<TensorVector<LatticeVector, LatticeVector>> {
        self.require_bialgebra()?;
        let mut out = TensorVector::zero();
        for (g, u) in a.components() {
            for (m, c) in u.terms() {
                let d = fock_coproduct(m).map(
                    |x| LatticeVector::new(self.ambient, g.clone(), x.clone()),
                    |y| LatticeVector::new(self.ambient, g.clone(), y.clone()),
                );
                out.add_assign(&d.scale(c));
            }
        }
        Ok(out)
    }

    /// `e^g (x) u -> eps(u)`.
    fn counit(&self, a: &LatticeVector) -> Result<Scalar> {
        self.require_bialgebra()?;
        Ok(a.components().fold(Scalar::zero(), |acc, (_, u)| &acc + &u.vacuum_coeff()))
    }
}

fn reassociate<V: Coordinates>(
    x: &TensorVector<TensorVector<V, V>, V>,
) -> TensorVector<V, TensorVector<V, V>> {
    let mut out = TensorVector::zero();
    for (((a, b), c), s) in x.keyed_terms() {
        out.add_key((a.clone(), (b.clone(), c.clone())), s.clone());
    }
    out
}

/// Coassociativity, counit laws, multiplicativity of the coproduct and
/// counit, and compatibility of both with the derivation, on samples.
pub fn check_diff_bialgebra<B: Bialgebra>(b: &B, samples: &[B::Elem]) -> Result<Verdict> {
    let mut certified = 0;
    let one = b.vacuum();
    let mul = |x: &B::Elem, y: &B::Elem| b.mul(x, y);
    let delta_one = b.coproduct(&one)?;
    if delta_one != TensorVector::pure(&one, &one) || !b.counit(&one)?.is_one() {
        return Ok(Verdict::fail("unit is not group-like"));
    }
    for a in samples {
        let da = b.coproduct(a)?;
        // (Delta (x) 1) Delta = (1 (x) Delta) Delta
        let mut left: TensorVector<TensorVector<B::Elem, B::Elem>, B::Elem> = TensorVector::zero();
        let mut right: TensorVector<B::Elem, TensorVector<B::Elem, B::Elem>> = TensorVector::zero();
        for (x, y, c) in da.pairs() {
            left.add_assign(&TensorVector::pure(&b.coproduct(&x)?, &y).scale(&c));
            right.add_assign(&TensorVector::pure(&x, &b.coproduct(&y)?).scale(&c));
        }
        if reassociate(&left) != right {
            return Ok(Verdict::fail(format!("coassociativity fails on {a:?}")));
        }
        // (eps (x) 1) Delta = id = (1 (x) eps) Delta
        let mut l: Option<B::Elem> = None;
        let mut r: Option<B::Elem> = None;
        for (x, y, c) in da.pairs() {
            crate::series::accumulate(&mut l, y.scale(&(&c * &b.counit(&x)?)));
            crate::series::accumulate(&mut r, x.scale(&(&c * &b.counit(&y)?)));
        }
        let same = |v: Option<B::Elem>| match v {
            Some(v) => &v == a,
            None => a.is_zero(),
        };
        if !same(l) || !same(r) {
            return Ok(Verdict::fail(format!("counit identity fails on {a:?}")));
        }
        // Delta d = (d (x) 1 + 1 (x) d) Delta,  eps d = 0
        let dd = b.coproduct(&b.translation(a))?;
        let mut rhs = da.map(|x| b.translation(x), |y| y.clone());
        rhs.add_assign(&da.map(|x| x.clone(), |y| b.translation(y)));
        if dd != rhs {
            return Ok(Verdict::fail(format!("coproduct does not commute with d on {a:?}")));
        }
        if !b.counit(&b.translation(a))?.is_zero() {
            return Ok(Verdict::fail(format!("counit of d({a:?}) is nonzero")));
        }
        for c in samples {
            let prod = b.mul(a, c)?;
            let lhs = b.coproduct(&prod)?;
            let rhs = tensor_mul(&mul, &da, &b.coproduct(c)?)?;
            if lhs != rhs {
                return Ok(Verdict::fail(format!("coproduct is not multiplicative on ({a:?}, {c:?})")));
            }
            if b.counit(&prod)? != &b.counit(a)? * &b.counit(c)? {
                return Ok(Verdict::fail(format!("counit is not multiplicative on ({a:?}, {c:?})")));
            }
            certified += 2;
        }
        certified += 5;
    }
    Ok(Verdict::pass(certified, ""))
}

/// Basis vectors `e_g (x) m` of `B_L`-type spaces with `g` in the box of
/// the given radius and `m` of weight at most `max_weight`.
pub fn lattice_basis(l: &Lattice, ambient: Ambient, radius: i64, max_weight: i64) -> Vec<LatticeVector> {
    let mons = fock::monomials_up_to(l.rank(), max_weight);
    let mut out = Vec::new();
    for g in l.points_in_box(radius) {
        for m in &mons {
            out.push(LatticeVector::new(ambient, g.clone(), FockVector::from_monomial(m.clone())));
        }
    }
    out
}
