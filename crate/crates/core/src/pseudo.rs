//! Operator series `a(x): V -> V((x))` on a vertex algebra: pseudo-derivations,
//! pseudo-endomorphisms, inner pseudo-derivations, Delta-closed families and
//! a linear solver for their coproducts.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::diff_bialgebra::LatticeVector;
use crate::error::{Error, Result};
use crate::fock::HeisenbergModule;
use crate::lattice::{Lattice, LatticePoint};
use crate::linalg::{solve, Solution};
use crate::module_va::{alpha_minus_field, phi_field};
use crate::report::Verdict;
use crate::scalar::Scalar;
use crate::series::{compose, series_derivative, series_divided_derivative, series_mul, Series, Sign, Vector, Window};
use crate::tensor::Coordinates;
use crate::vertex::{compare_series, delta_closed_comparison, delta_lhs_grid, delta_rhs_grid, DeltaTerm, Grid, Rect, VertexAlgebra};

type Eval<W> = dyn Fn(&W, Window) -> Result<Series<W>> + Send + Sync;

/// An element of `Hom(V, V((x)))` given by an evaluator. `floor`, when
/// known, bounds the support of every output from below.
pub struct OperatorSeries<W> {
    name: String,
    floor: Option<i64>,
    eval: Arc<Eval<W>>,
}

impl<W> Clone for OperatorSeries<W> {
    fn clone(&self) -> Self {
        OperatorSeries {
            name: self.name.clone(),
            floor: self.floor,
            eval: Arc::clone(&self.eval),
        }
    }
}

impl<W> fmt::Debug for OperatorSeries<W> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

impl<W: Vector + 'static> OperatorSeries<W> {
    pub fn new(
        name: impl Into<String>,
        floor: Option<i64>,
        f: impl Fn(&W, Window) -> Result<Series<W>> + Send + Sync + 'static,
    ) -> Self {
        OperatorSeries {
            name: name.into(),
            floor,
            eval: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn floor(&self) -> Option<i64> {
        self.floor
    }

    /// `a(x) v`, exact on `w` wherever the evaluator allows.
    pub fn apply(&self, v: &W, w: Window) -> Result<Series<W>> {
        (self.eval)(v, w)
    }

    pub fn identity() -> Self {
        OperatorSeries::new("1", Some(0), |v: &W, _| Ok(Series::constant(v.clone())))
    }

    pub fn scale(&self, c: &Scalar) -> Self {
        let a = self.clone();
        let c = c.clone();
        OperatorSeries::new(format!("({c}){}", self.name), self.floor, move |v: &W, w| {
            Ok(a.apply(v, w)?.scale_by(&c))
        })
    }

    pub fn add(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let floor = self.floor.zip(other.floor).map(|(x, y)| x.min(y));
        OperatorSeries::new(format!("{} + {}", self.name, other.name), floor, move |v: &W, w| {
            Ok(a.apply(v, w)?.add(&b.apply(v, w)?))
        })
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&Scalar::from_int(-1)))
    }

    /// `self(x) other(x)`: `other` first.
    pub fn compose(&self, other: &Self) -> Self {
        let (a, b) = (self.clone(), other.clone());
        let floor = self.floor.zip(other.floor).map(|(x, y)| x + y);
        OperatorSeries::new(format!("{} {}", self.name, other.name), floor, move |v: &W, w| {
            let hi = w.hi - a.floor.unwrap_or(0);
            let s = b.apply(v, Window { lo: w.lo.min(hi), hi })?;
            compose(&s, a.floor, |c, m| a.apply(c, Window { lo: (w.lo - m).min(w.hi - m), hi: w.hi - m }))
        })
    }

    /// `d/dx a(x)`.
    pub fn derivative(&self) -> Self {
        let a = self.clone();
        OperatorSeries::new(format!("d/dx {}", self.name), self.floor.map(|f| f - 1), move |v: &W, w| {
            Ok(series_derivative(&a.apply(v, w.widen(1))?, 1))
        })
    }

    /// `a(-x)`.
    pub fn mirror(&self) -> Self {
        let a = self.clone();
        OperatorSeries::new(format!("{}(-x)", self.name), self.floor, move |v: &W, w| Ok(a.apply(v, w)?.alternate()))
    }

    /// `[a(x), b(x)]`.
    pub fn commutator(&self, other: &Self) -> Self {
        self.compose(other).sub(&other.compose(self))
    }
}

impl<W: HeisenbergModule + 'static> OperatorSeries<W> {
    /// `h(x)^-`.
    pub fn alpha_minus(l: &Lattice, h: &LatticePoint) -> Self {
        let (l, h) = (l.clone(), h.clone());
        OperatorSeries::new(format!("{h}(x)^-"), None, move |v: &W, _| Ok(alpha_minus_field(&l, &h, v)))
    }
}

impl OperatorSeries<LatticeVector> {
    /// `Phi_b(x) = E^+(-b,x) x^{b(0)}`.
    pub fn phi(l: &Lattice, b: &LatticePoint) -> Self {
        let (l, b) = (l.clone(), b.clone());
        OperatorSeries::new(format!("Phi_{b}"), None, move |v: &LatticeVector, _| phi_field(&l, &b, v))
    }

    /// `E^+(-b,x)` alone, without `x^{b(0)}`.
    pub fn phi_without_zero_mode(l: &Lattice, b: &LatticePoint) -> Self {
        let (l, b) = (l.clone(), b.clone());
        OperatorSeries::new(format!("E+(-{b})"), None, move |v: &LatticeVector, _| {
            crate::fock::e_field(&l, &b.neg(), true, v, Window { lo: 0, hi: 0 })
        })
    }
}

/// `Phi^{+-}(u, f)(x) = sum_{n>=0} (+-1)^n / n! f^{(n)}(x) u_n`.
pub fn inner_pder<A>(alg: Arc<A>, u: A::Elem, f: Series<Scalar>, sign: Sign) -> OperatorSeries<A::Elem>
where
    A: VertexAlgebra + Send + 'static,
    A::Elem: 'static,
{
    let name = format!("Phi{}({u:?}, f)", if sign == Sign::Minus { "-" } else { "+" });
    OperatorSeries::new(name, None, move |v: &A::Elem, w| {
        let sing = alg.y(&u, v, Window { lo: w.lo.min(-1), hi: -1 })?;
        let Some(fl) = sing.support_floor() else {
            return Err(Error::truncation("Y(u,x)v has no support floor"));
        };
        let mut out: Series<A::Elem> = Series::zero();
        for n in 0..(-fl).max(0) {
            let Some(un) = sing.coeff(-n - 1)? else { continue };
            let mut g = series_divided_derivative(&f, n as u64);
            if sign == Sign::Minus && n % 2 == 1 {
                g = g.scale_by(&Scalar::from_int(-1));
            }
            out.add_assign(&series_mul(&g, &Series::constant(un.clone()))?);
        }
        Ok(out)
    })
}

fn y_of<A: VertexAlgebra>(alg: &A) -> impl Fn(&A::Elem, &A::Elem, Window) -> Result<Series<A::Elem>> + Sync + '_ {
    move |d, e, w| alg.y(d, e, w)
}

/// `[D, a(x)] v = c d/dx a(x) v` on `w`.
fn check_d_bracket<A: VertexAlgebra>(alg: &A, a: &OperatorSeries<A::Elem>, c: i64, vs: &[A::Elem], w: Window) -> Result<Verdict>
where
    A::Elem: 'static,
{
    let mut certified = 0;
    let da = a.derivative().scale(&Scalar::from_int(c));
    for v in vs {
        let lhs = a.apply(v, w)?.map(|x| alg.translation(x)).sub(&a.apply(&alg.translation(v), w)?);
        let rhs = da.apply(v, w)?;
        let cmp = compare_series(&lhs, &rhs, w);
        if cmp.mismatch.is_some() {
            return Ok(Verdict::fail(format!("[D, {a:?}] differs from {c} d/dx {a:?} on {v:?}")));
        }
        certified += cmp.certified;
    }
    Ok(Verdict::pass(certified, ""))
}

/// Checks the expansion `a(x1) Y(v,x2) w = sum c Y(b(x1 +- x2) v, x2) b'(x1) w`
/// on all pairs of samples.
fn check_expansion<A: VertexAlgebra>(
    alg: &A,
    a: &OperatorSeries<A::Elem>,
    expansion: &[(OperatorSeries<A::Elem>, OperatorSeries<A::Elem>, Scalar)],
    sign: Sign,
    vs: &[A::Elem],
    ws: &[A::Elem],
    rect: Rect,
    what: &str,
) -> Result<Verdict>
where
    A::Elem: 'static,
{
    let y = y_of(alg);
    let lhs_op = |c: &A::Elem, win: Window| a.apply(c, win);
    let mut certified = 0;
    for v in vs {
        let inner: Vec<Series<A::Elem>> = expansion.iter().map(|(b, _, _)| b.apply(v, rect.first)).collect::<Result<_>>()?;
        for w in ws {
            let rows = alg.y(v, w, rect.second)?;
            let mut terms = Vec::with_capacity(expansion.len());
            for ((_, b2, c), i) in expansion.iter().zip(&inner) {
                terms.push(DeltaTerm {
                    inner: i.clone(),
                    outer: b2.apply(w, rect.first)?,
                    coeff: c.clone(),
                });
            }
            let cmp = delta_closed_comparison(&rows, &lhs_op, &terms, sign, &y, alg.uniform_floor(), rect)?;
            if let Some((p, q)) = cmp.mismatch {
                return Ok(Verdict::fail(format!("{what} fails for v={v:?}, w={w:?} at x1^{p} x2^{q}")));
            }
            certified += cmp.certified;
        }
    }
    if certified == 0 {
        return Err(Error::truncation(format!("{what}: certified region is empty")));
    }
    Ok(Verdict::pass(certified, ""))
}

/// `psi in PDer^{+-}`: `psi(x)1 = 0`,
/// `[psi(x1), Y(v,x2)] = Y(psi(x1 +- x2)v, x2)`, and `[D, psi(x)] = -+ psi'(x)`.
pub fn check_pder<A: VertexAlgebra>(alg: &A, psi: &OperatorSeries<A::Elem>, sign: Sign, vs: &[A::Elem], ws: &[A::Elem], rect: Rect) -> Result<Verdict>
where
    A::Elem: 'static,
{
    let one = alg.vacuum();
    let c = compare_series(&psi.apply(&one, rect.first)?, &Series::zero(), rect.first);
    if !c.is_pass() {
        return Ok(Verdict::fail(format!("{psi:?} does not kill the vacuum")));
    }
    let id = OperatorSeries::identity();
    let expansion = [(psi.clone(), id.clone(), Scalar::one()), (id, psi.clone(), Scalar::one())];
    let bracket = check_expansion(alg, psi, &expansion, sign, vs, ws, rect, "pseudo-derivation bracket")?;
    let mut all: Vec<A::Elem> = vs.to_vec();
    all.extend(ws.iter().cloned());
    let d = check_d_bracket(alg, psi, -sign.factor(), &all, rect.first)?;
    Ok(Verdict::all([Verdict::pass(c.certified, ""), bracket, d]))
}

/// `phi in PEnd^{+-}`: `phi(x)1 = 1`,
/// `phi(x1) Y(v,x2) = Y(phi(x1 +- x2)v, x2) phi(x1)`, and
/// `[D, phi(x)] = -+ phi'(x)`.
pub fn check_pend<A: VertexAlgebra>(alg: &A, phi: &OperatorSeries<A::Elem>, sign: Sign, vs: &[A::Elem], ws: &[A::Elem], rect: Rect) -> Result<Verdict>
where
    A::Elem: 'static,
{
    let one = alg.vacuum();
    let c = compare_series(&phi.apply(&one, rect.first)?, &Series::constant(one.clone()), rect.first);
    if !c.is_pass() {
        return Ok(Verdict::fail(format!("{phi:?} does not fix the vacuum")));
    }
    let expansion = [(phi.clone(), phi.clone(), Scalar::one())];
    let hom = check_expansion(alg, phi, &expansion, sign, vs, ws, rect, "pseudo-endomorphism identity")?;
    let mut all: Vec<A::Elem> = vs.to_vec();
    all.extend(ws.iter().cloned());
    let d = check_d_bracket(alg, phi, -sign.factor(), &all, rect.first)?;
    Ok(Verdict::all([Verdict::pass(c.certified, ""), hom, d]))
}

/// `Delta(a_i) = sum c a_j (x) a_k` given as `(j, k, c)` triples.
pub type Expansion = Vec<(usize, usize, Scalar)>;

/// Checks that `family` is Delta-closed with the given expansions.
pub fn check_delta_closed<A: VertexAlgebra>(
    alg: &A,
    family: &[OperatorSeries<A::Elem>],
    expansion: &[Expansion],
    vs: &[A::Elem],
    ws: &[A::Elem],
    rect: Rect,
) -> Result<Verdict>
where
    A::Elem: 'static,
{
    if family.len() != expansion.len() {
        return Err(Error::domain("one expansion per family member is required"));
    }
    let mut parts = Vec::new();
    for (a, e) in family.iter().zip(expansion) {
        let ex: Vec<_> = e.iter().map(|(j, k, c)| (family[*j].clone(), family[*k].clone(), c.clone())).collect();
        parts.push(check_expansion(alg, a, &ex, Sign::Minus, vs, ws, rect, &format!("Delta-closedness of {a:?}"))?);
    }
    Ok(Verdict::all(parts))
}

/// A solved coproduct `Delta(a) = sum_{j,k} coeffs[j][k] b_j (x) b_k` and
/// counit `a(x)1 = counit 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct CoproductSolution {
    pub coeffs: Vec<Vec<Scalar>>,
    pub counit: Option<Scalar>,
    pub equations: usize,
}

impl CoproductSolution {
    pub fn expansion(&self) -> Expansion {
        let mut out = Vec::new();
        for (j, row) in self.coeffs.iter().enumerate() {
            for (k, c) in row.iter().enumerate() {
                if !c.is_zero() {
                    out.push((j, k, c.clone()));
                }
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SolveOutcome {
    Solved(CoproductSolution),
    Inconsistent,
    Underdetermined { rank: usize, unknowns: usize },
}

/// Limits for [`solve_coproduct`]: start with `samples` arguments of each
/// kind and double them (widening the rectangle by 2) up to `rounds` times
/// while the system stays underdetermined.
#[derive(Clone, Copy, Debug)]
pub struct Escalation {
    pub samples: usize,
    pub rounds: usize,
}

impl Default for Escalation {
    fn default() -> Self {
        Escalation { samples: 2, rounds: 3 }
    }
}

fn counit_of<A: VertexAlgebra>(alg: &A, a: &OperatorSeries<A::Elem>, w: Window) -> Result<Option<Scalar>>
where
    A::Elem: 'static,
{
    let one = alg.vacuum();
    let s = a.apply(&one, w)?;
    let key = one.coordinates().into_iter().next().map(|(k, _)| k);
    let e = match (s.coeff(0)?, key) {
        (None, _) => Scalar::zero(),
        (Some(v), Some(k)) => v.coordinates().into_iter().find(|(kk, _)| *kk == k).map_or(Scalar::zero(), |(_, c)| c),
        (Some(_), None) => return Ok(None),
    };
    let ok = compare_series(&s, &Series::constant(one.scale(&e)), w);
    Ok((ok.mismatch.is_none()).then_some(e))
}

/// Solves for `Delta(a)` inside `span(basis) (x) span(basis)` from
/// `a(x1) Y(v,x2) w = sum c_jk Y(b_j(x1-x2)v, x2) b_k(x1) w` on samples.
pub fn solve_coproduct<A: VertexAlgebra>(
    alg: &A,
    a: &OperatorSeries<A::Elem>,
    basis: &[OperatorSeries<A::Elem>],
    vs: &[A::Elem],
    ws: &[A::Elem],
    rect: Rect,
    esc: Escalation,
) -> Result<SolveOutcome>
where
    A::Elem: 'static,
{
    let nb = basis.len();
    let unknowns = nb * nb;
    let y = y_of(alg);
    let mut last = SolveOutcome::Underdetermined { rank: 0, unknowns };
    for round in 0..=esc.rounds {
        let n = esc.samples << round;
        let r = rect.widen(2 * round as i64);
        let mut rows: Vec<Vec<Scalar>> = Vec::new();
        let mut rhs: Vec<Scalar> = Vec::new();
        let lhs_op = |c: &A::Elem, win: Window| a.apply(c, win);
        for v in vs.iter().take(n) {
            let inner: Vec<Series<A::Elem>> = basis.iter().map(|b| b.apply(v, r.first)).collect::<Result<_>>()?;
            for w in ws.iter().take(n) {
                let lhs = delta_lhs_grid(&alg.y(v, w, r.second)?, &lhs_op, r)?;
                let outer: Vec<Series<A::Elem>> = basis.iter().map(|b| b.apply(w, r.first)).collect::<Result<_>>()?;
                let mut grids: Vec<Grid<A::Elem>> = Vec::with_capacity(unknowns);
                for j in 0..nb {
                    for k in 0..nb {
                        let t = [DeltaTerm {
                            inner: inner[j].clone(),
                            outer: outer[k].clone(),
                            coeff: Scalar::one(),
                        }];
                        grids.push(delta_rhs_grid(&t, Sign::Minus, &y, alg.uniform_floor(), r)?);
                    }
                }
                for q in r.second.iter() {
                    for p in r.first.iter() {
                        let Some(l) = lhs.get(&(p, q)).cloned().flatten() else { continue };
                        let ts: Option<Vec<Option<A::Elem>>> = grids.iter().map(|g| g.get(&(p, q)).cloned().flatten()).collect();
                        let Some(ts) = ts else { continue };
                        let mut eqs: BTreeMap<<A::Elem as Coordinates>::Key, (Vec<Scalar>, Scalar)> = BTreeMap::new();
                        for (i, t) in ts.iter().enumerate() {
                            let Some(t) = t else { continue };
                            for (key, c) in t.coordinates() {
                                eqs.entry(key).or_insert_with(|| (vec![Scalar::zero(); unknowns], Scalar::zero())).0[i] = c;
                            }
                        }
                        if let Some(l) = l {
                            for (key, c) in l.coordinates() {
                                eqs.entry(key).or_insert_with(|| (vec![Scalar::zero(); unknowns], Scalar::zero())).1 = c;
                            }
                        }
                        for (_, (row, b)) in eqs {
                            rows.push(row);
                            rhs.push(b);
                        }
                    }
                }
            }
        }
        let equations = rows.len();
        last = match solve(&rows, &rhs, unknowns) {
            Solution::Unique(x) => {
                let coeffs = x.chunks(nb).map(<[Scalar]>::to_vec).collect();
                let counit = counit_of(alg, a, r.first)?;
                return Ok(SolveOutcome::Solved(CoproductSolution { coeffs, counit, equations }));
            }
            Solution::Inconsistent => return Ok(SolveOutcome::Inconsistent),
            u @ Solution::Underdetermined { .. } => match u {
                Solution::Underdetermined { rank, unknowns } => SolveOutcome::Underdetermined { rank, unknowns },
                _ => unreachable!(),
            },
        };
        if n >= vs.len().max(ws.len()) && round > 0 {
            break;
        }
    }
    Ok(last)
}

/// `[D, a(x)] = d/dx a(x)` on samples and flip invariance of the solved
/// coproduct.
pub fn check_cocommutative<A: VertexAlgebra>(alg: &A, sol: &CoproductSolution, a: &OperatorSeries<A::Elem>, ws: &[A::Elem], w: Window) -> Result<Verdict>
where
    A::Elem: 'static,
{
    let member = check_d_bracket(alg, a, 1, ws, w)?;
    if !member.is_pass() {
        return Ok(member);
    }
    let n = sol.coeffs.len();
    for j in 0..n {
        for k in 0..n {
            if sol.coeffs[j][k] != sol.coeffs[k][j] {
                return Ok(Verdict::fail(format!("coproduct is not flip invariant at ({j},{k})")));
            }
        }
    }
    Ok(Verdict::pass(member.certified + n * n, ""))
}

/// `(Delta (x) 1) Delta = (1 (x) Delta) Delta` where `sols[i]` is the
/// coproduct of the `i`-th basis element over the same basis.
pub fn check_coassociative(sols: &[CoproductSolution]) -> Verdict {
    let n = sols.len();
    let mut certified = 0;
    for (i, s) in sols.iter().enumerate() {
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let mut left = Scalar::zero();
                    let mut right = Scalar::zero();
                    for j in 0..n {
                        left = &left + &(&s.coeffs[j][c] * &sols[j].coeffs[a][b]);
                        right = &right + &(&s.coeffs[a][j] * &sols[j].coeffs[b][c]);
                    }
                    if left != right {
                        return Verdict::fail(format!("coassociativity fails for element {i} at ({a},{b},{c})"));
                    }
                    certified += 1;
                }
            }
        }
    }
    Verdict::pass(certified, "")
}

/// `Phi^-(u, x^{-1}) v` equals the singular part of `Y(u,x) v`.
pub fn check_inner_singular<A>(alg: Arc<A>, u: &A::Elem, vs: &[A::Elem], w: Window) -> Result<Verdict>
where
    A: VertexAlgebra + Send + 'static,
    A::Elem: 'static,
{
    let op = inner_pder(Arc::clone(&alg), u.clone(), Series::monomial(-1, Scalar::one()), Sign::Minus);
    let mut certified = 0;
    let neg = Window { lo: w.lo.min(-1), hi: -1 };
    for v in vs {
        let lhs = op.apply(v, neg)?;
        let full = alg.y(u, v, neg)?;
        let sing = Series::polynomial(full.terms().filter(|(n, _)| *n < 0).map(|(n, c)| (n, c.clone())));
        if full.support_floor().is_none() {
            return Err(Error::truncation("Y(u,x)v has no support floor"));
        }
        let c = compare_series(&lhs, &sing, neg);
        if c.mismatch.is_some() || lhs != sing {
            return Ok(Verdict::fail(format!("Phi^-(u, 1/x) differs from Y(u,x)^- on {v:?}")));
        }
        certified += c.certified;
    }
    Ok(Verdict::pass(certified, ""))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diff_bialgebra::{lattice_basis, Ambient, FockAlgebra, LatticeAlgebra};
    use crate::fock::{monomials_up_to, FockVector, HeisenbergVoa};
    use crate::lattice::standard_cocycle;
    use crate::smash::LatticeVoa;

    fn a(f: &[(usize, u32)]) -> FockVector {
        FockVector::from_modes(f)
    }

    fn p(c: &[i64]) -> LatticePoint {
        LatticePoint::from_ints(c)
    }

    fn fock_samples(rank: usize, w: i64) -> Vec<FockVector> {
        monomials_up_to(rank, w).into_iter().map(FockVector::from_monomial).collect()
    }

    #[test]
    fn operator_algebra_examples() {
        let l = Lattice::a1();
        let am: OperatorSeries<FockVector> = OperatorSeries::alpha_minus(&l, &p(&[1]));
        let w = Window { lo: -6, hi: 2 };
        let v = a(&[(0, 1)]);
        assert_eq!(am.compose(&OperatorSeries::identity()).apply(&v, w).unwrap(), am.apply(&v, w).unwrap());
        let d = am.derivative().apply(&v, w).unwrap();
        assert_eq!(d, Series::monomial(-3, FockVector::vacuum().scale(&Scalar::from_int(-4))));
        let z = am.sub(&am).apply(&v, w).unwrap();
        assert!(compare_series(&z, &Series::zero(), w).is_pass());
    }

    #[test]
    fn pder_checks() {
        let l = Lattice::a1();
        let bh = FockAlgebra::new(l.clone());
        let am: OperatorSeries<FockVector> = OperatorSeries::alpha_minus(&l, &p(&[1]));
        let vs = fock_samples(1, 2);
        let rect = Rect::square(Window { lo: -4, hi: 4 });
        let r = check_pder(&bh, &am, Sign::Minus, &vs, &vs, rect).unwrap();
        assert!(r.is_pass(), "{r:?}");
        let r = check_pder(&bh, &am.mirror(), Sign::Plus, &vs, &vs, rect).unwrap();
        assert!(r.is_pass(), "{r:?}");
        let r = check_pder(&bh, &OperatorSeries::identity(), Sign::Minus, &vs, &vs, rect).unwrap();
        assert!(!r.is_pass());
        assert!(r.witness.contains("vacuum"));
    }

    #[test]
    fn pend_checks() {
        let l = Lattice::a1();
        let vl = LatticeVoa::new(l.clone(), standard_cocycle(&l));
        let phi = OperatorSeries::phi(&l, &p(&[1]));
        let vs = lattice_basis(&l, Ambient::VL, 1, 1);
        let rect = Rect::square(Window { lo: -3, hi: 3 });
        let r = check_pend(&vl, &phi, Sign::Minus, &vs, &vs, rect).unwrap();
        assert!(r.is_pass(), "{r:?}");
        assert!(check_pend(&vl, &OperatorSeries::identity(), Sign::Minus, &vs, &vs, rect).unwrap().is_pass());
        let bad = OperatorSeries::phi_without_zero_mode(&l, &p(&[1]));
        let r = check_pend(&vl, &bad, Sign::Minus, &vs, &vs, rect).unwrap();
        assert!(!r.is_pass());
    }

    #[test]
    fn inner_pder_examples() {
        let l = Lattice::a1();
        let m1 = Arc::new(HeisenbergVoa::new(l.clone()));
        let vs = fock_samples(1, 3);
        let u = a(&[(0, 1)]);
        assert!(check_inner_singular(Arc::clone(&m1), &u, &vs, Window { lo: -6, hi: 2 }).unwrap().is_pass());
        let op = inner_pder(Arc::clone(&m1), u.clone(), Series::monomial(-1, Scalar::one()), Sign::Minus);
        let am: OperatorSeries<FockVector> = OperatorSeries::alpha_minus(&l, &p(&[1]));
        for v in &vs {
            assert_eq!(op.apply(v, Window { lo: -6, hi: 2 }).unwrap(), am.apply(v, Window { lo: -6, hi: 2 }).unwrap());
        }
        let c = inner_pder(m1, u, Series::constant(Scalar::one()), Sign::Plus);
        let v = a(&[(0, 2)]);
        assert_eq!(c.apply(&v, Window { lo: -3, hi: 3 }).unwrap(), Series::zero());
    }

    #[test]
    fn solver_examples() {
        let l = Lattice::a1();
        let bh = FockAlgebra::new(l.clone());
        let am: OperatorSeries<FockVector> = OperatorSeries::alpha_minus(&l, &p(&[1]));
        let id = OperatorSeries::identity();
        let vs = fock_samples(1, 3);
        let rect = Rect::square(Window { lo: -4, hi: 3 });
        let esc = Escalation::default();
        let SolveOutcome::Solved(s) = solve_coproduct(&bh, &am, &[am.clone(), id.clone()], &vs, &vs, rect, esc).unwrap() else {
            panic!("no solution")
        };
        let (o, z) = (Scalar::one(), Scalar::zero());
        assert_eq!(s.coeffs, vec![vec![z.clone(), o.clone()], vec![o.clone(), z.clone()]]);
        assert_eq!(s.counit, Some(z.clone()));
        assert!(check_cocommutative(&bh, &s, &am, &vs, rect.first).unwrap().is_pass());

        let sq = am.compose(&am);
        let basis = [sq.clone(), am.clone(), id.clone()];
        let SolveOutcome::Solved(s2) = solve_coproduct(&bh, &sq, &basis, &vs, &vs, rect, esc).unwrap() else {
            panic!("no solution")
        };
        let two = Scalar::from_int(2);
        let expect = vec![
            vec![z.clone(), z.clone(), o.clone()],
            vec![z.clone(), two, z.clone()],
            vec![o.clone(), z.clone(), z.clone()],
        ];
        assert_eq!(s2.coeffs, expect);
        let r = check_delta_closed(&bh, &basis, &[s2.expansion(), vec![(1, 2, o.clone()), (2, 1, o.clone())], vec![(2, 2, o.clone())]], &vs, &vs, rect).unwrap();
        assert!(r.is_pass(), "{r:?}");

        let lat = LatticeAlgebra::twisted(l.clone(), standard_cocycle(&l));
        let phi = OperatorSeries::phi(&l, &p(&[1]));
        let lv = lattice_basis(&l, Ambient::BLeps, 1, 1);
        let SolveOutcome::Solved(s3) = solve_coproduct(&lat, &phi, &[phi.clone()], &lv, &lv, rect, esc).unwrap() else {
            panic!("no solution")
        };
        assert_eq!(s3.coeffs, vec![vec![o.clone()]]);
        assert_eq!(s3.counit, Some(o.clone()));

        let fake = CoproductSolution {
            coeffs: vec![vec![z.clone(), o.clone()], vec![z.clone(), z.clone()]],
            counit: None,
            equations: 0,
        };
        assert!(!check_cocommutative(&bh, &fake, &am, &vs, rect.first).unwrap().is_pass());
    }
}
