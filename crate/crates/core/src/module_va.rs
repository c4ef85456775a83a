//! Module actions of `B_h` and `B_L` by annihilation-type fields:
//! `Y_M(a(-1),x) = a(x)^-` and `Y_M(e^b,x) = E^+(-b,x) x^{b(0)}`, extended to
//! monomials as commuting products of divided derivatives.

use std::collections::BTreeMap;
use std::sync::Mutex;

use crate::diff_bialgebra::{Ambient, LatticeVector};
use crate::error::{Error, Result};
use crate::fock::{annihilation_series, e_field, FockMonomial, FockVector, HeisenbergModule};
use crate::lattice::{Lattice, LatticePoint};
use crate::report::Verdict;
use crate::scalar::Scalar;
use crate::series::{compose, series_derivative, Series, Sign, Vector, Window};
use crate::tensor::Coordinates;
use crate::vertex::{compare_series, delta_closed_comparison, Bialgebra, Comparison, DeltaTerm, ModuleAction, Rect, VertexAlgebra};

/// `h(x)^- v = sum_{n>=0} h(n) v x^{-n-1}`, a Laurent polynomial.
pub fn alpha_minus_field<M: HeisenbergModule>(l: &Lattice, h: &LatticePoint, v: &M) -> Series<M> {
    annihilation_series(l, h, 0, v)
}

/// `prod_i (1/(n_i-1)!) (d/dx)^{n_i-1} a_i(x)^-` applied to `v`.
pub fn annihilation_product<M: HeisenbergModule>(l: &Lattice, m: &FockMonomial, v: &M) -> Result<Series<M>> {
    let mut s = Series::constant(v.clone());
    for &(i, n) in m.factors() {
        let h = l.basis(i);
        s = compose(&s, None, |c, _| Ok(annihilation_series(l, &h, (n - 1) as u64, c)))?;
    }
    Ok(s)
}

/// `Phi_b(x) v = E^+(-b,x) x^{b(0)} v`.
pub fn phi_field(l: &Lattice, b: &LatticePoint, v: &LatticeVector) -> Result<Series<LatticeVector>> {
    phi_field_with(l, b, v, true)
}

fn phi_field_with(l: &Lattice, b: &LatticePoint, v: &LatticeVector, zero_mode: bool) -> Result<Series<LatticeVector>> {
    let mut out: Series<LatticeVector> = Series::zero();
    let nb = b.neg();
    for (g, u) in v.components() {
        let shift = if zero_mode {
            let p = l.pairing(b, g);
            if !p.is_integer() {
                return Err(Error::domain(format!("<{b}, {g}> = {p} is not an integer")));
            }
            i64::try_from(p.to_integer()).map_err(|_| Error::domain("pairing out of range"))?
        } else {
            0
        };
        let comp = LatticeVector::new(v.ambient(), g.clone(), u.clone());
        let s = e_field(l, &nb, true, &comp, Window { lo: 0, hi: 0 })?;
        out.add_assign(&s.shift(shift));
    }
    Ok(out)
}

type Cache<K, V> = Mutex<BTreeMap<K, Series<V>>>;

fn cached<K: Ord + Clone, V: Vector>(cache: &Cache<K, V>, key: K, f: impl FnOnce() -> Result<Series<V>>) -> Result<Series<V>> {
    if let Some(s) = cache.lock().expect("cache lock").get(&key) {
        return Ok(s.clone());
    }
    let s = f()?;
    cache.lock().expect("cache lock").insert(key, s.clone());
    Ok(s)
}

fn linear_extension<H: Coordinates, V: Coordinates>(
    h: &H,
    v: &V,
    mut basic: impl FnMut(&H::Key, &V::Key) -> Result<Series<V>>,
) -> Result<Series<V>> {
    let mut out: Series<V> = Series::zero();
    let vc = v.coordinates();
    for (hk, hc) in h.coordinates() {
        for (vk, vc) in &vc {
            out.add_assign(&basic(&hk, vk)?.scale_by(&(&hc * vc)));
        }
    }
    Ok(out)
}

/// `B_h` acting on the Fock space through `Y_M(a(-1),x) = a(x)^-`.
pub struct AlphaMinusAction {
    pub lattice: Lattice,
    cache: Cache<(FockMonomial, FockMonomial), FockVector>,
}

impl AlphaMinusAction {
    pub fn new(lattice: Lattice) -> Self {
        AlphaMinusAction {
            lattice,
            cache: Mutex::new(BTreeMap::new()),
        }
    }
}

impl ModuleAction for AlphaMinusAction {
    type H = FockVector;
    type V = FockVector;

    fn act(&self, h: &FockVector, v: &FockVector, _w: Window) -> Result<Series<FockVector>> {
        linear_extension(h, v, |hm, vm| {
            cached(&self.cache, (hm.clone(), vm.clone()), || {
                annihilation_product(&self.lattice, hm, &FockVector::from_monomial(vm.clone()))
            })
        })
    }
}

type LatticeKey = (Ambient, LatticePoint, FockMonomial);

/// `B_L` acting on `B_{L,eps}`, `V_L` or `V_P` through
/// `Y_M(e^b (x) u, x) = Phi_b(x) Y_M(u, x)`.
pub struct PhiAction {
    pub lattice: Lattice,
    zero_mode: bool,
    cache: Cache<(LatticeKey, LatticeKey), LatticeVector>,
}

impl PhiAction {
    pub fn new(lattice: Lattice) -> Self {
        PhiAction {
            lattice,
            zero_mode: true,
            cache: Mutex::new(BTreeMap::new()),
        }
    }

    /// The same fields with the factor `x^{b(0)}` dropped. Not a module
    /// action; used to exercise the checkers.
    pub fn without_zero_mode(lattice: Lattice) -> Self {
        PhiAction {
            zero_mode: false,
            ..PhiAction::new(lattice)
        }
    }
}

impl ModuleAction for PhiAction {
    type H = LatticeVector;
    type V = LatticeVector;

    fn act(&self, h: &LatticeVector, v: &LatticeVector, _w: Window) -> Result<Series<LatticeVector>> {
        if !h.is_zero() && h.ambient() != Ambient::BL {
            return Err(Error::domain(format!("acting element must lie in B_L, not {:?}", h.ambient())));
        }
        linear_extension(h, v, |hk, vk| {
            cached(&self.cache, (hk.clone(), vk.clone()), || {
                let l = &self.lattice;
                let arg = LatticeVector::from_key(vk);
                let inner = annihilation_product(l, &hk.2, &arg)?;
                compose(&inner, None, |c, _| phi_field_with(l, &hk.1, c, self.zero_mode))
            })
        })
    }
}

/// The three module vertex algebra conditions on samples:
/// `Y_M(h,x)v` bounded below, `Y_M(h,x)1 = eps(h) 1`, and
/// `Y_M(h,x1) Y(u,x2) v = sum Y(Y_M(h_(1),x1-x2)u, x2) Y_M(h_(2),x1) v`
/// on `rect` (first = x1, second = x2).
pub fn check_module_va<A, B, M>(carrier: &A, bialg: &B, action: &M, gens: &[B::Elem], args: &[A::Elem], rect: Rect) -> Result<Verdict>
where
    A: VertexAlgebra,
    B: Bialgebra,
    M: ModuleAction<H = B::Elem, V = A::Elem>,
{
    let one = carrier.vacuum();
    let mut total = Comparison::default();
    let mut certified = 0;
    for h in gens {
        for v in args {
            let s = action.act(h, v, rect.first)?;
            if !s.is_zero() && s.support_floor().is_none() {
                return Ok(Verdict::fail(format!("Y_M({h:?},x){v:?} is not bounded below")));
            }
            certified += 1;
        }
        let e = bialg.counit(h)?;
        let c = compare_series(&action.act(h, &one, rect.first)?, &Series::constant(one.scale(&e)), rect.first);
        if !c.is_pass() {
            return Ok(Verdict::fail(format!("Y_M({h:?},x)1 differs from eps(h)1")));
        }
        certified += c.certified;
        let delta = bialg.coproduct(h)?.pairs();
        let lhs_op = |c: &A::Elem, w: Window| action.act(h, c, w);
        let y = |d: &A::Elem, e: &A::Elem, w: Window| carrier.y(d, e, w);
        for u in args {
            for v in args {
                let rows = carrier.y(u, v, rect.second)?;
                let mut terms = Vec::with_capacity(delta.len());
                for (h1, h2, c) in &delta {
                    terms.push(DeltaTerm {
                        inner: action.act(h1, u, rect.first)?,
                        outer: action.act(h2, v, rect.first)?,
                        coeff: c.clone(),
                    });
                }
                let cmp = delta_closed_comparison(&rows, &lhs_op, &terms, Sign::Minus, &y, carrier.uniform_floor(), rect)?;
                if let Some((p, q)) = cmp.mismatch {
                    return Ok(Verdict::fail(format!(
                        "covariance fails for h={h:?}, u={u:?}, v={v:?} at x1^{p} x2^{q}"
                    )));
                }
                total.merge(&cmp);
            }
        }
    }
    if total.certified == 0 && !args.is_empty() && !gens.is_empty() {
        return Err(Error::truncation("module covariance: certified region is empty"));
    }
    Ok(Verdict::pass(certified + total.certified, ""))
}

/// `Y_M(D h, x) = d/dx Y_M(h, x)` on samples.
pub fn check_derivative_compat<B, M>(bialg: &B, action: &M, hs: &[B::Elem], vs: &[M::V], w: Window) -> Result<Verdict>
where
    B: Bialgebra,
    M: ModuleAction<H = B::Elem>,
{
    let mut certified = 0;
    for h in hs {
        let dh = bialg.translation(h);
        for v in vs {
            let lhs = action.act(&dh, v, w)?;
            let rhs = series_derivative(&action.act(h, v, w)?, 1);
            let c = compare_series(&lhs, &rhs, w);
            if c.mismatch.is_some() {
                return Ok(Verdict::fail(format!("Y_M(Dh,x) differs from d/dx Y_M(h,x) for h={h:?}, v={v:?}")));
            }
            certified += c.certified;
        }
    }
    Ok(Verdict::pass(certified, ""))
}

/// `Phi_a(x) Phi_b(x) v = Phi_{a+b}(x) v`.
pub fn check_phi_multiplicative(l: &Lattice, a: &LatticePoint, b: &LatticePoint, v: &LatticeVector) -> Result<Verdict> {
    let inner = phi_field(l, b, v)?;
    let lhs = compose(&inner, None, |c, _| phi_field(l, a, c))?;
    let rhs = phi_field(l, &a.add(b), v)?;
    Ok(Verdict::expect(lhs == rhs, format!("Phi_{a} Phi_{b} differs from Phi_(a+b) on {v:?}")))
}

/// `Y_M(u (x) e^0 ... )`: the scalar-weighted identity check
/// `Y_M(1,x) v = v`.
pub fn check_unit_action<M: ModuleAction>(action: &M, one: &M::H, vs: &[M::V], w: Window) -> Result<Verdict> {
    let mut certified = 0;
    for v in vs {
        let c = compare_series(&action.act(one, v, w)?, &Series::constant(v.clone()), w);
        if !c.is_pass() {
            return Ok(Verdict::fail(format!("Y_M(1,x) moves {v:?}")));
        }
        certified += c.certified;
    }
    Ok(Verdict::pass(certified, ""))
}

/// `Scalar` multiples of the vacuum: `eps(h) 1` helper for carriers.
pub fn counit_vacuum<V: Vector>(one: &V, e: &Scalar) -> V {
    one.scale(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff_bialgebra::{lattice_basis, FockAlgebra, LatticeAlgebra};
    use crate::fock::monomials_up_to;
    use crate::lattice::standard_cocycle;

    fn a(f: &[(usize, u32)]) -> FockVector {
        FockVector::from_modes(f)
    }

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::from_ints(c)
    }

    fn int(n: i64) -> Scalar {
        Scalar::from_int(n)
    }

    #[test]
    fn alpha_minus_examples() {
        let l = Lattice::a1();
        let al = p(&[1]);
        assert!(alpha_minus_field(&l, &al, &FockVector::vacuum()).is_zero());
        let s = alpha_minus_field(&l, &al, &a(&[(0, 1)]));
        assert_eq!(s, Series::monomial(-2, FockVector::vacuum().scale(&int(2))));
        let s = alpha_minus_field(&l, &al, &a(&[(0, 2)]));
        assert_eq!(s, Series::monomial(-3, FockVector::vacuum().scale(&int(4))));
    }

    #[test]
    fn phi_examples() {
        let l = Lattice::a1();
        let al = p(&[1]);
        let ea = LatticeVector::e(Ambient::BLeps, al.clone());
        assert_eq!(phi_field(&l, &al, &ea).unwrap(), Series::monomial(2, ea.clone()));
        let e0 = LatticeVector::e(Ambient::BLeps, p(&[0]));
        assert_eq!(phi_field(&l, &al, &e0).unwrap(), Series::constant(e0.clone()));
        let v = LatticeVector::new(Ambient::BLeps, p(&[0]), a(&[(0, 1)]));
        let expect = Series::polynomial([(0, v.clone()), (-1, e0.scale(&int(-2)))]);
        assert_eq!(phi_field(&l, &al, &v).unwrap(), expect);
        let half = LatticeVector::e(Ambient::VP, LatticePoint::new(vec![1], 2));
        assert_eq!(phi_field(&l, &al, &half).unwrap(), Series::monomial(1, half.clone()));
    }

    #[test]
    fn general_action_examples() {
        let l = Lattice::a1();
        let act = AlphaMinusAction::new(l.clone());
        let w = Window { lo: -6, hi: 6 };
        let v = a(&[(0, 1)]);
        assert_eq!(act.act(&FockVector::vacuum(), &v, w).unwrap(), Series::constant(v.clone()));
        let s = act.act(&a(&[(0, 2)]), &v, w).unwrap();
        assert_eq!(s, Series::monomial(-3, FockVector::vacuum().scale(&int(-4))));

        let phi = PhiAction::new(l.clone());
        let h = LatticeVector::new(Ambient::BL, p(&[1]), a(&[(0, 1)]));
        let e0 = LatticeVector::e(Ambient::BLeps, p(&[0]));
        assert!(phi.act(&h, &e0, w).unwrap().is_zero());
        assert!(phi.act(&e0, &e0, w).is_err());
    }

    #[test]
    fn b_h_is_a_module_vertex_algebra() {
        let l = Lattice::a1();
        let bh = FockAlgebra::new(l.clone());
        let act = AlphaMinusAction::new(l.clone());
        let args: Vec<FockVector> = monomials_up_to(1, 2).into_iter().map(FockVector::from_monomial).collect();
        let gens = vec![a(&[(0, 1)]), a(&[(0, 2)])];
        let rect = Rect::square(Window { lo: -4, hi: 4 });
        let v = check_module_va(&bh, &bh, &act, &gens, &args, rect).unwrap();
        assert!(v.is_pass(), "{v:?}");
        let d = check_derivative_compat(&bh, &act, &gens, &args, Window { lo: -6, hi: 2 }).unwrap();
        assert!(d.is_pass(), "{d:?}");
    }

    #[test]
    fn lattice_module_and_corruption() {
        let l = Lattice::a1();
        let bl = LatticeAlgebra::untwisted(l.clone());
        let carrier = LatticeAlgebra::twisted(l.clone(), standard_cocycle(&l));
        let gens = vec![bl.e(p(&[1])), bl.e(p(&[-1]))];
        let args = lattice_basis(&l, Ambient::BLeps, 1, 1);
        let rect = Rect::square(Window { lo: -3, hi: 3 });
        let good = PhiAction::new(l.clone());
        assert!(check_module_va(&carrier, &bl, &good, &gens, &args, rect).unwrap().is_pass());
        let bad = PhiAction::without_zero_mode(l.clone());
        let v = check_module_va(&carrier, &bl, &bad, &gens, &args, rect).unwrap();
        assert!(!v.is_pass());
        assert!(v.witness.contains("covariance"), "{}", v.witness);
    }

    #[test]
    fn phi_is_multiplicative() {
        let l = Lattice::a2();
        for v in lattice_basis(&l, Ambient::BLeps, 1, 2).iter().step_by(4) {
            for x in l.points_in_box(1).iter().step_by(2) {
                assert!(check_phi_multiplicative(&l, x, &p(&[1, -1]), v).unwrap().is_pass());
            }
        }
    }
}
