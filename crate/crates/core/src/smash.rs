//! Smash products `V # H` with `Y#(u (x) g, x)(v (x) k) =
//! sum Y(u,x) Y_M(g_(1),x) v (x) Y(g_(2),x) k`, the realizations of `M(1)`
//! inside `B_h # B_h` and of `V_L` inside `B_{L,eps} # B_L`, and the
//! `B_{L,eps} # B_L`-module `V_P`.

use crate::diff_bialgebra::{bl_eps_mul, bl_translate, borcherds_y, fock_coproduct, Ambient, LatticeVector};
use crate::error::{Error, Result};
use crate::fock::{e_field, normal_ordered, y_m1_oracle, FockVector};
use crate::lattice::{CocycleTable, Lattice, LatticePoint};
use crate::module_va::PhiAction;
use crate::report::Verdict;
use crate::scalar::Scalar;
use crate::series::{compose, series_bilinear, Series, Sign, Vector, Window};
use crate::tensor::TensorVector;
use crate::vertex::{
    compare_series, delta_closed_comparison, Bialgebra, Comparison, DeltaTerm, ModuleAction, Rect, VertexAlgebra,
    VertexModule,
};

/// Applies `Y(u,x)` to a series in the same variable, exact up to `hi`.
pub fn apply_field<A: VertexAlgebra>(alg: &A, u: &A::Elem, s: &Series<A::Elem>, hi: i64) -> Result<Series<A::Elem>> {
    compose(s, alg.uniform_floor(), |c, m| alg.y(u, c, Window { lo: (hi - m).min(0), hi: hi - m }))
}

/// The smash product of an `H`-module vertex algebra `V` with `H`.
pub struct Smash<V, H, M> {
    pub v: V,
    pub h: H,
    pub action: M,
}

pub type SmashElem<V, H> = TensorVector<<V as VertexAlgebra>::Elem, <H as VertexAlgebra>::Elem>;

impl<V, H, M> Smash<V, H, M>
where
    V: VertexAlgebra,
    H: Bialgebra,
    M: ModuleAction<H = H::Elem, V = V::Elem>,
{
    pub fn new(v: V, h: H, action: M) -> Self {
        Smash { v, h, action }
    }

    /// `u (x) 1`.
    pub fn left(&self, u: &V::Elem) -> SmashElem<V, H> {
        TensorVector::pure(u, &self.h.vacuum())
    }

    /// `1 (x) g`.
    pub fn right(&self, g: &H::Elem) -> SmashElem<V, H> {
        TensorVector::pure(&self.v.vacuum(), g)
    }

    /// `Y(u,x) Y_M(g,x) v (x) Y(h,x) k`, exact on `w`.
    fn y_pure(&self, u: &V::Elem, g1: &H::Elem, v: &V::Elem, g2: &H::Elem, k: &H::Elem, w: Window) -> Result<Series<SmashElem<V, H>>> {
        let r0 = self.h.y(g2, k, w)?;
        let Some(fr) = r0.support_floor() else {
            return Err(Error::truncation("Y_H(g,x)k has no support floor"));
        };
        let ym = self.action.act(g1, v, w)?;
        let left = apply_field(&self.v, u, &ym, w.hi - fr)?;
        let Some(fl) = left.support_floor() else {
            return Err(Error::truncation("Y(u,x)Y_M(g,x)v has no support floor"));
        };
        let right = if w.hi - fl > w.hi { self.h.y(g2, k, Window { lo: w.lo, hi: w.hi - fl })? } else { r0 };
        series_bilinear(&left, &right, |a, b| TensorVector::pure(a, b))
    }

    /// `a#_n b`, the coefficient of `x^{-n-1}` in `Y#(a,x)b`.
    pub fn sharp_mode(&self, a: &SmashElem<V, H>, n: i64, b: &SmashElem<V, H>) -> Result<SmashElem<V, H>> {
        let e = -n - 1;
        let s = self.y(a, b, Window { lo: e, hi: e })?;
        Ok(s.coeff(e)?.cloned().unwrap_or_default())
    }
}

impl<V, H, M> VertexAlgebra for Smash<V, H, M>
where
    V: VertexAlgebra,
    H: Bialgebra,
    M: ModuleAction<H = H::Elem, V = V::Elem>,
{
    type Elem = SmashElem<V, H>;

    fn vacuum(&self) -> Self::Elem {
        TensorVector::pure(&self.v.vacuum(), &self.h.vacuum())
    }

    fn y(&self, a: &Self::Elem, b: &Self::Elem, w: Window) -> Result<Series<Self::Elem>> {
        let mut out: Series<Self::Elem> = Series::zero();
        let bp = b.by_left();
        for (u, g, c) in a.pairs() {
            let dg = self.h.coproduct(&g)?.pairs();
            for (v, k) in &bp {
                for (g1, g2, e) in &dg {
                    let s = self.y_pure(&u, g1, v, g2, k, w)?;
                    out.add_assign(&s.scale_by(&(&c * e)));
                }
            }
        }
        Ok(out)
    }

    /// `D (x) 1 + 1 (x) d`.
    fn translation(&self, a: &Self::Elem) -> Self::Elem {
        let mut out = a.map(|x| self.v.translation(x), |y| y.clone());
        out.add_assign(&a.map(|x| x.clone(), |y| self.h.translation(y)));
        out
    }
}

/// `u -> Delta(u)` into `B_h # B_h`.
pub fn diag_embed(u: &FockVector) -> TensorVector<FockVector, FockVector> {
    let mut out = TensorVector::zero();
    for (m, c) in u.terms() {
        out.add_assign(&fock_coproduct(m).scale(c));
    }
    out
}

/// `e_a (x) u -> sum (e_a (x) u_(1)) (x) (e^a (x) u_(2))` from `V_L` into
/// `B_{L,eps} # B_L`.
pub fn lattice_embed(v: &LatticeVector) -> Result<TensorVector<LatticeVector, LatticeVector>> {
    if !v.is_zero() && v.ambient() != Ambient::VL {
        return Err(Error::domain(format!("lattice_embed expects a V_L vector, got {:?}", v.ambient())));
    }
    let mut out = TensorVector::zero();
    for (g, u) in v.components() {
        for (m, c) in u.terms() {
            let t = fock_coproduct(m).map(
                |x| LatticeVector::new(Ambient::BLeps, g.clone(), x.clone()),
                |y| LatticeVector::new(Ambient::BL, g.clone(), y.clone()),
            );
            out.add_assign(&t.scale(c));
        }
    }
    Ok(out)
}

/// `Y(e_a,x) v = E^-(-a,x) E^+(-a,x) e_a x^{a(0)} v`, exact up to `w.hi`.
pub fn y_vl_oracle(l: &Lattice, t: &CocycleTable, a: &LatticePoint, v: &LatticeVector, w: Window) -> Result<Series<LatticeVector>> {
    let na = a.neg();
    let mut out: Series<LatticeVector> = Series::zero();
    for (g, u) in v.components() {
        let p = l.pairing(a, g);
        if !p.is_integer() {
            return Err(Error::domain(format!("<{a}, {g}> = {p} is not an integer")));
        }
        let shift = i64::try_from(p.to_integer()).map_err(|_| Error::domain("pairing out of range"))?;
        let hi = w.hi - shift;
        let moved = LatticeVector::new(v.ambient(), a.add(g), u.scale(&t.eval(a, g)?));
        let plus = e_field(l, &na, true, &moved, Window { lo: 0, hi: 0 })?;
        let s = compose(&plus, None, |c, m| {
            e_field(l, &na, false, c, Window { lo: (hi - m).min(0), hi: hi - m })
        })?;
        out.add_assign(&s.shift(shift));
    }
    Ok(out)
}

/// The lattice vertex algebra `V_L` on `C[L] (x) M(1)`.
#[derive(Clone, Debug)]
pub struct LatticeVoa {
    pub lattice: Lattice,
    pub cocycle: CocycleTable,
}

impl LatticeVoa {
    pub fn new(lattice: Lattice, cocycle: CocycleTable) -> Self {
        LatticeVoa { lattice, cocycle }
    }

    pub fn e(&self, g: LatticePoint) -> LatticeVector {
        LatticeVector::e(Ambient::VL, g)
    }
}

impl VertexAlgebra for LatticeVoa {
    type Elem = LatticeVector;

    fn vacuum(&self) -> LatticeVector {
        self.e(LatticePoint::zero(self.lattice.rank()))
    }

    fn y(&self, a: &LatticeVector, b: &LatticeVector, w: Window) -> Result<Series<LatticeVector>> {
        let mut out: Series<LatticeVector> = Series::zero();
        for (g, u) in a.components() {
            let base = |v: &LatticeVector, hi: i64| {
                y_vl_oracle(&self.lattice, &self.cocycle, g, v, Window { lo: w.lo.min(hi), hi })
            };
            for (m, c) in u.terms() {
                let s = normal_ordered(&self.lattice, m, b, w.hi, &base)?;
                out.add_assign(&s.scale_by(c));
            }
        }
        Ok(out)
    }

    fn translation(&self, a: &LatticeVector) -> LatticeVector {
        bl_translate(a)
    }
}

/// `V_P` as a module for `B_{L,eps} # B_L`:
/// `Y_W(v (x) h, x) w = Y(v,x) Y_M(h,x) w`, with `B_{L,eps}` acting on `V_P`
/// through the extended cocycle.
pub struct DualModule {
    pub extended: CocycleTable,
    pub action: PhiAction,
}

impl DualModule {
    pub fn new(lattice: Lattice, extended: CocycleTable) -> Self {
        DualModule {
            extended,
            action: PhiAction::new(lattice),
        }
    }
}

impl VertexModule for DualModule {
    type Alg = TensorVector<LatticeVector, LatticeVector>;
    type Elem = LatticeVector;

    fn y_w(&self, a: &Self::Alg, w: &LatticeVector, win: Window) -> Result<Series<LatticeVector>> {
        let mut out: Series<LatticeVector> = Series::zero();
        for (v, h, c) in a.pairs() {
            let ym = self.action.act(&h, w, win)?;
            let s = compose(&ym, None, |d, m| {
                let hi = win.hi - m;
                borcherds_y(
                    |x: &LatticeVector, y: &LatticeVector| bl_eps_mul(&self.extended, x, y),
                    bl_translate,
                    &v,
                    d,
                    Window { lo: hi.min(0), hi },
                )
            })?;
            out.add_assign(&s.scale_by(&c));
        }
        Ok(out)
    }
}

fn fail_at<T: std::fmt::Debug>(what: &str, c: &Comparison, args: T) -> Verdict {
    Verdict::fail(format!("{what} at {:?} for {args:?}", c.mismatch))
}

/// `Delta(Y_{M(1)}(u,x)v) = Y#(Delta u, x) Delta v` on `w`.
pub fn check_m1_embedding<V, H, M>(
    l: &Lattice,
    smash: &Smash<V, H, M>,
    u: &FockVector,
    v: &FockVector,
    w: Window,
) -> Result<Verdict>
where
    V: VertexAlgebra<Elem = FockVector>,
    H: Bialgebra<Elem = FockVector>,
    M: ModuleAction<H = FockVector, V = FockVector>,
{
    let lhs = y_m1_oracle(l, u, v, w)?.map(diag_embed);
    let rhs = smash.y(&diag_embed(u), &diag_embed(v), w)?;
    let c = compare_series(&lhs, &rhs, w);
    if c.mismatch.is_some() {
        return Ok(fail_at("Delta does not intertwine", &c, (u, v)));
    }
    Ok(c.verdict("M(1) embedding"))
}

/// `Delta(a(-1))#_{-n} x = (a(-n) (x) 1 + 1 (x) a(-n)) x` for `n >= 1` and
/// `Delta(a(-1))#_m x = (a(m) (x) 1) x` for `m >= 0`.
pub fn check_mode_identities<V, H, M>(
    l: &Lattice,
    smash: &Smash<V, H, M>,
    i: usize,
    args: &[TensorVector<FockVector, FockVector>],
    modes: std::ops::RangeInclusive<i64>,
) -> Result<Verdict>
where
    V: VertexAlgebra<Elem = FockVector>,
    H: Bialgebra<Elem = FockVector>,
    M: ModuleAction<H = FockVector, V = FockVector>,
{
    let a = l.basis(i);
    let gen = diag_embed(&FockVector::from_modes(&[(i, 1)]));
    let mut certified = 0;
    for x in args {
        for n in modes.clone() {
            let lhs = smash.sharp_mode(&gen, n, x)?;
            let rhs = if n < 0 {
                let mut r = x.map(|p| crate::fock::mode(l, &a, n, p), |q| q.clone());
                r.add_assign(&x.map(|p| p.clone(), |q| crate::fock::mode(l, &a, n, q)));
                r
            } else {
                x.map(|p| crate::fock::mode(l, &a, n, p), |q| q.clone())
            };
            if lhs != rhs {
                return Ok(Verdict::fail(format!("mode {n} of Delta(a(-1)) differs on {x:?}")));
            }
            certified += 1;
        }
    }
    Ok(Verdict::pass(certified, ""))
}

/// `pi(Y_{V_L}(a,x) b) = Y#(pi a, x) pi b` on `w`.
pub fn check_lattice_embedding<V, H, M>(
    vl: &LatticeVoa,
    smash: &Smash<V, H, M>,
    a: &LatticeVector,
    b: &LatticeVector,
    w: Window,
) -> Result<Verdict>
where
    V: VertexAlgebra<Elem = LatticeVector>,
    H: Bialgebra<Elem = LatticeVector>,
    M: ModuleAction<H = LatticeVector, V = LatticeVector>,
{
    let lhs = vl.y(a, b, w)?.try_map(lattice_embed)?;
    let rhs = smash.y(&lattice_embed(a)?, &lattice_embed(b)?, w)?;
    let c = compare_series(&lhs, &rhs, w);
    if c.mismatch.is_some() {
        return Ok(fail_at("pi does not intertwine", &c, (a, b)));
    }
    Ok(c.verdict("V_L embedding"))
}

/// `Y#(u (x) 1, x)(v (x) 1) = Y(u,x)v (x) 1` and
/// `Y#(1 (x) g, x)(1 (x) k) = 1 (x) Y(g,x)k`.
pub fn check_subalgebras<V, H, M>(smash: &Smash<V, H, M>, vs: &[V::Elem], hs: &[H::Elem], w: Window) -> Result<Verdict>
where
    V: VertexAlgebra,
    H: Bialgebra,
    M: ModuleAction<H = H::Elem, V = V::Elem>,
{
    let mut certified = 0;
    let one_h = smash.h.vacuum();
    let one_v = smash.v.vacuum();
    for u in vs {
        for v in vs {
            let lhs = smash.y(&smash.left(u), &smash.left(v), w)?;
            let rhs = smash.v.y(u, v, w)?.map(|c| TensorVector::pure(c, &one_h));
            let c = compare_series(&lhs, &rhs, w);
            if c.mismatch.is_some() {
                return Ok(fail_at("V is not a subalgebra", &c, (u, v)));
            }
            certified += c.certified;
        }
    }
    for g in hs {
        for k in hs {
            let lhs = smash.y(&smash.right(g), &smash.right(k), w)?;
            let rhs = smash.h.y(g, k, w)?.map(|c| TensorVector::pure(&one_v, c));
            let c = compare_series(&lhs, &rhs, w);
            if c.mismatch.is_some() {
                return Ok(fail_at("H is not a subalgebra", &c, (g, k)));
            }
            certified += c.certified;
        }
    }
    if certified == 0 {
        return Err(Error::truncation("subalgebra check: nothing certified"));
    }
    Ok(Verdict::pass(certified, ""))
}

/// `Y#(g,x1) Y#(u,x2) = sum Y#(Y_M(g_(1),x1-x2)u, x2) Y#(g_(2),x1)` applied to
/// `z`, on `rect` (first = x1, second = x2).
pub fn check_smash_covariance<V, H, M>(
    smash: &Smash<V, H, M>,
    g: &H::Elem,
    u: &V::Elem,
    z: &SmashElem<V, H>,
    rect: Rect,
) -> Result<Comparison>
where
    V: VertexAlgebra,
    H: Bialgebra,
    M: ModuleAction<H = H::Elem, V = V::Elem>,
{
    let rows = smash.y(&smash.left(u), z, rect.second)?;
    let gg = smash.right(g);
    let lhs_op = |c: &SmashElem<V, H>, w: Window| smash.y(&gg, c, w);
    let mut terms = Vec::new();
    for (g1, g2, c) in smash.h.coproduct(g)?.pairs() {
        let inner = smash.action.act(&g1, u, rect.first)?.map(|x| smash.left(x));
        let outer = smash.y(&smash.right(&g2), z, rect.first)?;
        terms.push(DeltaTerm { inner, outer, coeff: c });
    }
    let y = |d: &SmashElem<V, H>, e: &SmashElem<V, H>, w: Window| smash.y(d, e, w);
    delta_closed_comparison(&rows, &lhs_op, &terms, Sign::Minus, &y, smash.v.uniform_floor(), rect)
}

/// `Y(e_a,x) v = E^-(-a,x)(e_a v)` in `B_{L,eps}` on `w`.
pub fn check_e_minus_form<A>(alg: &A, l: &Lattice, t: &CocycleTable, a: &LatticePoint, v: &LatticeVector, w: Window) -> Result<Verdict>
where
    A: VertexAlgebra<Elem = LatticeVector>,
{
    let ea = LatticeVector::e(v.ambient(), a.clone());
    let lhs = alg.y(&ea, v, w)?;
    let prod = bl_eps_mul(t, &ea, v)?;
    let rhs = e_field(l, &a.neg(), false, &prod, w)?;
    let c = compare_series(&lhs, &rhs, w);
    if c.mismatch.is_some() {
        return Ok(fail_at("Y(e_a,x) differs from E^-(-a,x)e_a", &c, (a, v)));
    }
    Ok(c.verdict("E^- form"))
}

/// Rank of the coproduct map on a list of vectors: equal to the list length
/// exactly when it is injective on their span.
pub fn embedding_rank(vs: &[FockVector]) -> usize {
    use std::collections::BTreeMap;
    let images: Vec<_> = vs.iter().map(diag_embed).collect();
    let mut index = BTreeMap::new();
    for im in &images {
        for (k, _) in im.keyed_terms() {
            let n = index.len();
            index.entry(k.clone()).or_insert(n);
        }
    }
    let rows: Vec<Vec<Scalar>> = images
        .iter()
        .map(|im| {
            let mut row = vec![Scalar::zero(); index.len()];
            for (k, c) in im.keyed_terms() {
                row[index[k]] = c.clone();
            }
            row
        })
        .collect();
    crate::linalg::rank(&rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff_bialgebra::{lattice_basis, FockAlgebra, LatticeAlgebra};
    use crate::fock::monomials_up_to;
    use crate::lattice::{extend_cocycle, standard_cocycle};
    use crate::module_va::AlphaMinusAction;
    use crate::vertex::{check_skew_symmetry, check_vacuum_axioms, check_weak_assoc, Adjoint};

    fn a(f: &[(usize, u32)]) -> FockVector {
        FockVector::from_modes(f)
    }

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::from_ints(c)
    }

    fn heis(l: &Lattice) -> Smash<FockAlgebra, FockAlgebra, AlphaMinusAction> {
        Smash::new(FockAlgebra::new(l.clone()), FockAlgebra::new(l.clone()), AlphaMinusAction::new(l.clone()))
    }

    fn lat(l: &Lattice) -> Smash<LatticeAlgebra, LatticeAlgebra, PhiAction> {
        Smash::new(
            LatticeAlgebra::twisted(l.clone(), standard_cocycle(l)),
            LatticeAlgebra::untwisted(l.clone()),
            PhiAction::new(l.clone()),
        )
    }

    #[test]
    fn smash_vacuum() {
        let l = Lattice::a1();
        let s = heis(&l);
        let w = Window { lo: -3, hi: 3 };
        let b = diag_embed(&a(&[(0, 1), (0, 2)]));
        assert!(compare_series(&s.y(&s.vacuum(), &b, w).unwrap(), &Series::constant(b.clone()), w).is_pass());
        assert!(check_vacuum_axioms(&s, &b, w).unwrap().is_pass());
    }

    #[test]
    fn sharp_mode_examples() {
        let l = Lattice::a1();
        let s = heis(&l);
        let gen = diag_embed(&a(&[(0, 1)]));
        let x = TensorVector::pure(&FockVector::vacuum(), &a(&[(0, 1)]));
        assert!(s.sharp_mode(&gen, 0, &x).unwrap().is_zero());
        assert_eq!(s.sharp_mode(&gen, -1, &s.vacuum()).unwrap(), gen);
        let m1 = s.sharp_mode(&gen, -1, &s.vacuum()).unwrap();
        let lhs = s.sharp_mode(&gen, 1, &m1).unwrap();
        let rhs = s.sharp_mode(&gen, -1, &s.sharp_mode(&gen, 1, &s.vacuum()).unwrap()).unwrap();
        let mut comm = lhs;
        comm.sub_assign(&rhs);
        assert_eq!(comm, s.vacuum().scale(&Scalar::from_int(2)));
    }

    #[test]
    fn embeddings() {
        assert_eq!(diag_embed(&FockVector::vacuum()), TensorVector::pure(&FockVector::vacuum(), &FockVector::vacuum()));
        let vs: Vec<FockVector> = monomials_up_to(1, 4).into_iter().map(FockVector::from_monomial).collect();
        assert_eq!(embedding_rank(&vs), vs.len());
        let ea = LatticeVector::e(Ambient::VL, p(&[1]));
        let t = lattice_embed(&ea).unwrap();
        assert_eq!(t, TensorVector::pure(&LatticeVector::e(Ambient::BLeps, p(&[1])), &LatticeVector::e(Ambient::BL, p(&[1]))));
        assert!(lattice_embed(&LatticeVector::e(Ambient::BLeps, p(&[1]))).is_err());
    }

    #[test]
    fn vl_oracle_examples() {
        let l = Lattice::a1();
        let t = standard_cocycle(&l);
        let w = Window { lo: -4, hi: 4 };
        let s = y_vl_oracle(&l, &t, &p(&[1]), &LatticeVector::e(Ambient::VL, p(&[-1])), w).unwrap();
        assert_eq!(s.coeff(-2).unwrap(), Some(&LatticeVector::e(Ambient::VL, p(&[0]))));
        assert_eq!(s.coeff(-1).unwrap(), Some(&LatticeVector::new(Ambient::VL, p(&[0]), a(&[(0, 1)]))));
        assert!(s.coeff(-3).unwrap().is_none());
        let v = LatticeVector::new(Ambient::VL, p(&[1]), a(&[(0, 2)]));
        assert!(compare_series(&y_vl_oracle(&l, &t, &p(&[0]), &v, w).unwrap(), &Series::constant(v), w).is_pass());
        let vl = LatticeVoa::new(l.clone(), t);
        let c = check_skew_symmetry(&vl, &vl.e(p(&[1])), &vl.e(p(&[-1])), w).unwrap();
        assert!(c.is_pass(), "{c:?}");
    }

    #[test]
    fn m1_embedding_low_weight() {
        let l = Lattice::a1();
        let s = heis(&l);
        let w = Window { lo: -5, hi: 5 };
        let vs: Vec<FockVector> = monomials_up_to(1, 2).into_iter().map(FockVector::from_monomial).collect();
        for u in &vs {
            for v in &vs {
                let r = check_m1_embedding(&l, &s, u, v, w).unwrap();
                assert!(r.is_pass(), "{u} {v} {r:?}");
            }
        }
        let args: Vec<_> = vs.iter().map(diag_embed).collect();
        assert!(check_mode_identities(&l, &s, 0, &args, -3..=3).unwrap().is_pass());
    }

    #[test]
    fn lattice_embedding_generators() {
        let l = Lattice::a1();
        let s = lat(&l);
        let vl = LatticeVoa::new(l.clone(), standard_cocycle(&l));
        let w = Window { lo: -5, hi: 5 };
        for g in l.points_in_box(1) {
            for b in lattice_basis(&l, Ambient::VL, 1, 1) {
                let r = check_lattice_embedding(&vl, &s, &vl.e(g.clone()), &b, w).unwrap();
                assert!(r.is_pass(), "{g} {b:?} {r:?}");
            }
        }
        let desc = LatticeVector::new(Ambient::VL, p(&[1]), a(&[(0, 1)]));
        let r = check_lattice_embedding(&vl, &s, &desc, &vl.e(p(&[-1])), w).unwrap();
        assert!(r.is_pass(), "{r:?}");
    }

    #[test]
    fn smash_subalgebras_and_covariance() {
        let l = Lattice::a1();
        let s = heis(&l);
        let w = Window { lo: -3, hi: 3 };
        let vs = vec![a(&[(0, 1)]), a(&[(0, 2)])];
        assert!(check_subalgebras(&s, &vs, &vs, w).unwrap().is_pass());
        let z = TensorVector::pure(&a(&[(0, 1)]), &a(&[(0, 1)]));
        let c = check_smash_covariance(&s, &a(&[(0, 1)]), &a(&[(0, 1)]), &z, Rect::square(w)).unwrap();
        assert!(c.is_pass(), "{c:?}");

        let s = lat(&l);
        let g = s.h.e(p(&[1]));
        let u = s.v.e(p(&[-1]));
        let z = TensorVector::pure(&s.v.e(p(&[1])), &s.h.e(p(&[0])));
        let c = check_smash_covariance(&s, &g, &u, &z, Rect::square(w)).unwrap();
        assert!(c.is_pass(), "{c:?}");
    }

    #[test]
    fn e_minus_form() {
        let l = Lattice::a2();
        let b = LatticeAlgebra::twisted(l.clone(), standard_cocycle(&l));
        let w = Window { lo: 0, hi: 4 };
        for v in lattice_basis(&l, Ambient::BLeps, 1, 1).iter().step_by(3) {
            let r = check_e_minus_form(&b, &l, &b.cocycle, &p(&[1, -1]), v, w).unwrap();
            assert!(r.is_pass(), "{r:?}");
        }
    }

    #[test]
    fn dual_module_example_and_assoc() {
        let l = Lattice::a1();
        let ext = extend_cocycle(&l, &standard_cocycle(&l));
        let m = DualModule::new(l.clone(), ext);
        let half = LatticeVector::e(Ambient::VP, LatticePoint::new(vec![1], 2));
        let a = TensorVector::pure(&LatticeVector::e(Ambient::BLeps, p(&[1])), &LatticeVector::e(Ambient::BL, p(&[1])));
        let s = m.y_w(&a, &half, Window { lo: -2, hi: 3 }).unwrap();
        assert_eq!(s.support_floor(), Some(1));
        assert_eq!(s.coeff(1).unwrap(), Some(&LatticeVector::e(Ambient::VP, LatticePoint::new(vec![3], 2))));

        let sm = lat(&l);
        let r = check_weak_assoc(&sm, &m, &a, &a, &half, Rect::square(Window { lo: -3, hi: 3 }), 20).unwrap();
        assert!(r.l.is_some(), "{r:?}");
        let vl = LatticeVoa::new(l.clone(), standard_cocycle(&l));
        let pa = lattice_embed(&vl.e(p(&[1]))).unwrap();
        let pb = lattice_embed(&vl.e(p(&[-1]))).unwrap();
        let r = check_weak_assoc(&sm, &Adjoint(&sm), &pa, &pb, &pa, Rect::square(Window { lo: -3, hi: 3 }), 20).unwrap();
        assert!(r.l.is_some(), "{r:?}");
    }
}
