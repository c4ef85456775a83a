//! Verification suites: configuration, lattice loading and the checks that
//! make up each suite.

use std::sync::Arc;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::diff_bialgebra::{check_diff_bialgebra, lattice_basis, Ambient, FockAlgebra, LatticeAlgebra, LatticeVector};
use crate::error::{Error, Result};
use crate::fock::{check_heisenberg_commutators, monomials_up_to, y_m1_oracle, FockVector, HeisenbergVoa};
use crate::lattice::{cocycle_check, extend_cocycle, parse_lattice_spec, standard_cocycle, CocycleTable, Lattice, LatticePoint};
use crate::module_va::{check_derivative_compat, check_module_va, check_phi_multiplicative, check_unit_action, AlphaMinusAction, PhiAction};
use crate::pseudo::{
    check_coassociative, check_cocommutative, check_delta_closed, check_inner_singular, check_pder, check_pend, inner_pder,
    solve_coproduct, CoproductSolution, Escalation, OperatorSeries, SolveOutcome,
};
use crate::report::{CheckRecord, Report, Verdict};
use crate::scalar::Scalar;
use crate::series::{Series, Sign, Vector, Window};
use crate::smash::{
    check_e_minus_form, check_lattice_embedding, check_m1_embedding, check_mode_identities, check_smash_covariance,
    check_subalgebras, diag_embed, embedding_rank, lattice_embed, DualModule, LatticeVoa, Smash,
};
use crate::tensor::TensorVector;
use crate::vertex::{
    check_skew_symmetry, check_vacuum_axioms, check_weak_assoc, check_weak_commutativity, compare_series, Adjoint, Rect,
    VertexAlgebra, VertexModule,
};

pub const SUITES: &[&str] = &["heisenberg", "lattice", "lattice-smash", "modules", "pseudo", "coproduct"];

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "VERIFY_THREADS";

#[derive(Clone, Debug)]
pub struct SuiteConfig {
    /// Builtin lattice name (`a1`, `a2`, `hyperbolic`) or a JSON file path.
    pub lattice: String,
    pub max_weight: i64,
    pub radius: i64,
    pub window: Window,
    /// Rectangle side for the weak associativity searches.
    pub assoc_window: Window,
    pub lmax: usize,
    pub kmax: usize,
    pub threads: Option<usize>,
    pub seed: u64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            lattice: "a1".into(),
            max_weight: 4,
            radius: 2,
            window: Window { lo: -6, hi: 6 },
            assoc_window: Window { lo: -4, hi: 4 },
            lmax: 20,
            kmax: 8,
            threads: None,
            seed: 0,
        }
    }
}

impl SuiteConfig {
    pub fn validate(&self) -> Result<()> {
        for w in [self.window, self.assoc_window] {
            if w.lo > w.hi {
                return Err(Error::config(format!("window {}:{} is empty", w.lo, w.hi), None));
            }
        }
        for (name, v) in [
            ("max-weight", self.max_weight),
            ("radius", self.radius),
            ("lmax", self.lmax as i64),
            ("kmax", self.kmax as i64),
        ] {
            if v < 1 {
                return Err(Error::config(format!("{name} must be positive"), None));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::config("threads must be positive", None));
        }
        Ok(())
    }
}

/// A builtin name or the path of a JSON lattice description. A missing
/// `cocycle_b` means the standard cocycle.
pub fn load_lattice(spec: &str) -> Result<(Lattice, CocycleTable)> {
    if let Some(l) = Lattice::builtin(spec) {
        let t = standard_cocycle(&l);
        return Ok((l, t));
    }
    let text = std::fs::read_to_string(spec).map_err(|e| Error::config(format!("cannot read {spec}: {e}"), None))?;
    parse_lattice_spec(&text)
}

type Run<'a> = Box<dyn Fn() -> Result<Verdict> + Send + Sync + 'a>;

struct Check<'a> {
    id: String,
    anchor: &'static str,
    run: Run<'a>,
}

struct Ctx {
    cfg: SuiteConfig,
    l: Lattice,
    t: CocycleTable,
}

impl Ctx {
    fn rng(&self, id: &str) -> ChaCha8Rng {
        let h = id.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
        ChaCha8Rng::seed_from_u64(self.cfg.seed ^ h)
    }

    fn rect(&self) -> Rect {
        Rect::square(self.cfg.window)
    }

    fn assoc_rect(&self) -> Rect {
        Rect::square(self.cfg.assoc_window)
    }

    fn fock(&self, w: i64) -> Vec<FockVector> {
        monomials_up_to(self.l.rank(), w).into_iter().map(FockVector::from_monomial).collect()
    }

    fn gens(&self) -> Vec<FockVector> {
        (0..self.l.rank()).map(|i| FockVector::from_modes(&[(i, 1)])).collect()
    }

    fn roots(&self) -> Vec<LatticePoint> {
        (0..self.l.rank()).flat_map(|i| [self.l.basis(i), self.l.basis(i).neg()]).collect()
    }
}

fn pick<T: Clone>(rng: &mut ChaCha8Rng, items: &[T], n: usize) -> Vec<T> {
    items.choose_multiple(rng, n).cloned().collect()
}

fn all_par<T: Sync>(items: &[T], f: impl Fn(&T) -> Result<Verdict> + Sync + Send) -> Result<Verdict> {
    let parts: Vec<Verdict> = items.par_iter().map(f).collect::<Result<_>>()?;
    Ok(Verdict::all(parts))
}

/// Recomputes a series on a window widened by 4 and checks that every
/// coefficient certified on `w` is unchanged.
pub fn check_widening<W: Vector>(f: impl Fn(Window) -> Result<Series<W>>, w: Window) -> Result<Verdict> {
    let narrow = f(w)?;
    let wide = f(w.widen(4))?;
    let c = compare_series(&narrow, &wide, w);
    if let Some((n, _)) = c.mismatch {
        return Ok(Verdict::fail(format!("coefficient of x^{n} changed after widening")));
    }
    Ok(Verdict::pass(c.certified, ""))
}

type HeisSmash = Smash<FockAlgebra, FockAlgebra, AlphaMinusAction>;
type LatSmash = Smash<LatticeAlgebra, LatticeAlgebra, PhiAction>;

fn heis_smash(l: &Lattice) -> HeisSmash {
    Smash::new(FockAlgebra::new(l.clone()), FockAlgebra::new(l.clone()), AlphaMinusAction::new(l.clone()))
}

fn lat_smash(l: &Lattice, t: &CocycleTable) -> LatSmash {
    Smash::new(LatticeAlgebra::twisted(l.clone(), t.clone()), LatticeAlgebra::untwisted(l.clone()), PhiAction::new(l.clone()))
}

fn heisenberg(c: &Ctx) -> Vec<Check<'_>> {
    let mw = c.cfg.max_weight;
    let w = c.cfg.window;
    vec![
        Check {
            id: "heisenberg.commutators".into(),
            anchor: "[a(m), b(n)] = m <a,b> delta_{m+n,0}",
            run: Box::new(move || Ok(check_heisenberg_commutators(&c.l, &c.fock(mw + 1), -4..=4))),
        },
        Check {
            id: "heisenberg.diff_bialgebra".into(),
            anchor: "B_h is a differential bialgebra with h(-1) primitive",
            run: Box::new(move || check_diff_bialgebra(&FockAlgebra::new(c.l.clone()), &c.fock(mw.min(3)))),
        },
        Check {
            id: "heisenberg.module".into(),
            anchor: "B_h is a B_h-module vertex algebra with Y_M(h(-1),x) = h(x)^-",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let act = AlphaMinusAction::new(c.l.clone());
                check_module_va(&bh, &bh, &act, &c.gens(), &c.fock(mw.min(3)), c.rect())
            }),
        },
        Check {
            id: "heisenberg.module_derivative".into(),
            anchor: "Y_M(Dh,x) = d/dx Y_M(h,x)",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let act = AlphaMinusAction::new(c.l.clone());
                check_derivative_compat(&bh, &act, &c.fock(mw.min(3)), &c.fock(mw.min(3)), w)
            }),
        },
        Check {
            id: "heisenberg.m1_embedding".into(),
            anchor: "Delta: M(1) -> B_h # B_h is a vertex algebra homomorphism",
            run: Box::new(move || {
                let s = heis_smash(&c.l);
                let vs = c.fock(mw);
                let pairs: Vec<(FockVector, FockVector)> =
                    vs.iter().flat_map(|u| vs.iter().map(move |v| (u.clone(), v.clone()))).collect();
                all_par(&pairs, |(u, v)| check_m1_embedding(&c.l, &s, u, v, w))
            }),
        },
        Check {
            id: "heisenberg.m1_injective".into(),
            anchor: "Delta is injective on M(1)",
            run: Box::new(move || {
                let vs = c.fock(mw);
                let r = embedding_rank(&vs);
                Ok(Verdict::expect(r == vs.len(), format!("rank {r} < {}", vs.len())))
            }),
        },
        Check {
            id: "heisenberg.mode_identities".into(),
            anchor: "Delta(a(-1))#_n = a(n) (x) 1 + 1 (x) a(n) for n < 0, a(n) (x) 1 for n >= 0",
            run: Box::new(move || {
                let s = heis_smash(&c.l);
                let args: Vec<_> = c.fock(mw.min(3)).iter().map(diag_embed).collect();
                let parts = (0..c.l.rank())
                    .map(|i| check_mode_identities(&c.l, &s, i, &args, -3..=3))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "heisenberg.smash_axioms".into(),
            anchor: "V # H is a nonlocal vertex algebra with V and H as subalgebras",
            run: Box::new(move || {
                let s = heis_smash(&c.l);
                let mut rng = c.rng("heisenberg.smash_axioms");
                let small = c.fock(2);
                let mut parts = Vec::new();
                for _ in 0..4 {
                    let z = TensorVector::pure(small.choose(&mut rng).unwrap(), small.choose(&mut rng).unwrap());
                    parts.push(check_vacuum_axioms(&s, &z, w)?);
                    let g = c.gens().choose(&mut rng).unwrap().clone();
                    let u = small.choose(&mut rng).unwrap().clone();
                    parts.push(check_smash_covariance(&s, &g, &u, &z, Rect::square(w))?.verdict("smash covariance"));
                }
                parts.push(check_subalgebras(&s, &pick(&mut rng, &small, 3), &pick(&mut rng, &small, 3), w)?);
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "heisenberg.widening".into(),
            anchor: "certified coefficients are stable under widening",
            run: Box::new(move || {
                let s = heis_smash(&c.l);
                let mut rng = c.rng("heisenberg.widening");
                let vs = c.fock(mw.min(3));
                let mut parts = Vec::new();
                for _ in 0..4 {
                    let u = vs.choose(&mut rng).unwrap().clone();
                    let v = vs.choose(&mut rng).unwrap().clone();
                    parts.push(check_widening(|win| y_m1_oracle(&c.l, &u, &v, win), w)?);
                    let (du, dv) = (diag_embed(&u), diag_embed(&v));
                    parts.push(check_widening(|win| s.y(&du, &dv, win), w)?);
                }
                Ok(Verdict::all(parts))
            }),
        },
    ]
}

fn lattice(c: &Ctx) -> Vec<Check<'_>> {
    let r = c.cfg.radius;
    let w = c.cfg.window;
    vec![
        Check {
            id: "lattice.cocycle".into(),
            anchor: "eps is a normalized 2-cocycle with eps(a,b)/eps(b,a) = (-1)^<a,b>",
            run: Box::new(move || {
                let ck = cocycle_check(&c.l, &c.t, r + 1);
                Ok(match ck.violation {
                    None => Verdict::pass(ck.checked, ""),
                    Some(v) => Verdict::fail(v),
                })
            }),
        },
        Check {
            id: "lattice.diff_bialgebra".into(),
            anchor: "B_L and B_{L,eps} are differential algebras, B_L a bialgebra with e^a group-like",
            run: Box::new(move || {
                let mut rng = c.rng("lattice.diff_bialgebra");
                let bl = LatticeAlgebra::untwisted(c.l.clone());
                let s1 = pick(&mut rng, &lattice_basis(&c.l, Ambient::BL, 1, 2), 8);
                Ok(check_diff_bialgebra(&bl, &s1)?)
            }),
        },
        Check {
            id: "lattice.e_minus_form".into(),
            anchor: "Y(e_a,x) = E^-(-a,x) e_a on B_{L,eps}",
            run: Box::new(move || {
                let b = LatticeAlgebra::twisted(c.l.clone(), c.t.clone());
                let vs = lattice_basis(&c.l, Ambient::BLeps, 1, 2);
                let pairs: Vec<(LatticePoint, LatticeVector)> = c
                    .l
                    .points_in_box(r)
                    .into_iter()
                    .flat_map(|a| vs.iter().map(move |v| (a.clone(), v.clone())))
                    .collect();
                all_par(&pairs, |(a, v)| check_e_minus_form(&b, &c.l, &c.t, a, v, w))
            }),
        },
        Check {
            id: "lattice.phi_multiplicative".into(),
            anchor: "Phi_a(x) Phi_b(x) = Phi_{a+b}(x)",
            run: Box::new(move || {
                let mut rng = c.rng("lattice.phi_multiplicative");
                let vs = pick(&mut rng, &lattice_basis(&c.l, Ambient::BLeps, 1, 2), 8);
                let pts = c.l.points_in_box(1);
                let mut parts = Vec::new();
                for v in &vs {
                    for a in &pts {
                        let b = pts.choose(&mut rng).unwrap();
                        parts.push(check_phi_multiplicative(&c.l, a, b, v)?);
                    }
                }
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "lattice.widening".into(),
            anchor: "certified coefficients are stable under widening",
            run: Box::new(move || {
                let b = LatticeAlgebra::twisted(c.l.clone(), c.t.clone());
                let mut rng = c.rng("lattice.widening");
                let vs = lattice_basis(&c.l, Ambient::BLeps, 1, 2);
                let mut parts = Vec::new();
                for _ in 0..4 {
                    let u = vs.choose(&mut rng).unwrap().clone();
                    let v = vs.choose(&mut rng).unwrap().clone();
                    parts.push(check_widening(|win| b.y(&u, &v, win), w)?);
                }
                Ok(Verdict::all(parts))
            }),
        },
    ]
}

fn vl_image(c: &Ctx) -> Result<Vec<TensorVector<LatticeVector, LatticeVector>>> {
    lattice_basis(&c.l, Ambient::VL, 1, 1).iter().map(lattice_embed).collect()
}

fn lattice_smash(c: &Ctx) -> Vec<Check<'_>> {
    let r = c.cfg.radius;
    let mw = c.cfg.max_weight;
    let w = c.cfg.window;
    vec![
        Check {
            id: "lattice-smash.phi_module".into(),
            anchor: "B_{L,eps} is a B_L-module vertex algebra with Y_M(e^a,x) = E^+(-a,x) x^{a(0)}",
            run: Box::new(move || {
                let bl = LatticeAlgebra::untwisted(c.l.clone());
                let carrier = LatticeAlgebra::twisted(c.l.clone(), c.t.clone());
                let gens: Vec<_> = c.roots().into_iter().map(|a| bl.e(a)).collect();
                let args = lattice_basis(&c.l, Ambient::BLeps, 1, 1);
                check_module_va(&carrier, &bl, &PhiAction::new(c.l.clone()), &gens, &args, c.rect())
            }),
        },
        Check {
            id: "lattice-smash.phi_pend".into(),
            anchor: "E^+(-h,x) x^{h(0)} is a pseudo-endomorphism of sign -",
            run: Box::new(move || {
                let bleps = LatticeAlgebra::twisted(c.l.clone(), c.t.clone());
                let vl = LatticeVoa::new(c.l.clone(), c.t.clone());
                let mut parts = Vec::new();
                for h in c.roots() {
                    let phi = OperatorSeries::phi(&c.l, &h);
                    let vs = lattice_basis(&c.l, Ambient::BLeps, 1, 1);
                    parts.push(check_pend(&bleps, &phi, Sign::Minus, &vs, &vs, c.rect())?);
                    let vs = lattice_basis(&c.l, Ambient::VL, 1, 1);
                    parts.push(check_pend(&vl, &phi, Sign::Minus, &vs, &vs, c.rect())?);
                }
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "lattice-smash.vl_embedding".into(),
            anchor: "pi: V_L -> B_{L,eps} # B_L is an isomorphism of vertex algebras",
            run: Box::new(move || {
                let s = lat_smash(&c.l, &c.t);
                let vl = LatticeVoa::new(c.l.clone(), c.t.clone());
                let args = lattice_basis(&c.l, Ambient::VL, 1, mw.min(3));
                let pairs: Vec<(LatticeVector, LatticeVector)> = c
                    .l
                    .points_in_box(r)
                    .into_iter()
                    .flat_map(|a| args.iter().map(move |b| (LatticeVector::e(Ambient::VL, a.clone()), b.clone())))
                    .collect();
                all_par(&pairs, |(a, b)| check_lattice_embedding(&vl, &s, a, b, w))
            }),
        },
        Check {
            id: "lattice-smash.weak_assoc".into(),
            anchor: "(x0+x2)^l Y(u,x0+x2)Y(v,x2)w = (x0+x2)^l Y(Y(u,x0)v,x2)w on pi(V_L)",
            run: Box::new(move || {
                let s = lat_smash(&c.l, &c.t);
                let img = vl_image(c)?;
                let mut rng = c.rng("lattice-smash.weak_assoc");
                let triples: Vec<_> = (0..10)
                    .map(|_| {
                        let mut t = img.choose_multiple(&mut rng, 3).cloned();
                        (t.next().unwrap(), t.next().unwrap(), t.next().unwrap())
                    })
                    .collect();
                all_par(&triples, |(a, b, z)| {
                    Ok(check_weak_assoc(&s, &Adjoint(&s), a, b, z, c.assoc_rect(), c.cfg.lmax)?.verdict(c.cfg.lmax))
                })
            }),
        },
        Check {
            id: "lattice-smash.vl_locality".into(),
            anchor: "(x1-x2)^k [Y(e_a,x1), Y(e_b,x2)] = 0 and skew symmetry on V_L",
            run: Box::new(move || {
                let vl = LatticeVoa::new(c.l.clone(), c.t.clone());
                let pts = c.l.points_in_box(1);
                let mut rng = c.rng("lattice-smash.vl_locality");
                let mut parts = Vec::new();
                for _ in 0..4 {
                    let a = vl.e(pts.choose(&mut rng).unwrap().clone());
                    let b = vl.e(pts.choose(&mut rng).unwrap().clone());
                    let z = vl.e(pts.choose(&mut rng).unwrap().clone());
                    parts.push(match check_weak_commutativity(&vl, &a, &b, &z, c.cfg.kmax, c.rect())? {
                        Some(k) => Verdict::pass(1, format!("k={k}")),
                        None => Verdict::fail(format!("no k <= {} for {a:?}, {b:?}", c.cfg.kmax)),
                    });
                    parts.push(check_skew_symmetry(&vl, &a, &b, w)?.verdict("skew symmetry"));
                }
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "lattice-smash.smash_axioms".into(),
            anchor: "V # H is a nonlocal vertex algebra with V and H as subalgebras",
            run: Box::new(move || {
                let s = lat_smash(&c.l, &c.t);
                let mut rng = c.rng("lattice-smash.smash_axioms");
                let vs = lattice_basis(&c.l, Ambient::BLeps, 1, 1);
                let hs = lattice_basis(&c.l, Ambient::BL, 1, 0);
                let mut parts = Vec::new();
                for _ in 0..4 {
                    let z = TensorVector::pure(vs.choose(&mut rng).unwrap(), hs.choose(&mut rng).unwrap());
                    parts.push(check_vacuum_axioms(&s, &z, w)?);
                    let g = hs.choose(&mut rng).unwrap().clone();
                    let u = vs.choose(&mut rng).unwrap().clone();
                    parts.push(check_smash_covariance(&s, &g, &u, &z, c.rect())?.verdict("smash covariance"));
                }
                parts.push(check_subalgebras(&s, &pick(&mut rng, &vs, 3), &pick(&mut rng, &hs, 3), w)?);
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "lattice-smash.widening".into(),
            anchor: "certified coefficients are stable under widening",
            run: Box::new(move || {
                let s = lat_smash(&c.l, &c.t);
                let img = vl_image(c)?;
                let mut rng = c.rng("lattice-smash.widening");
                let mut parts = Vec::new();
                for _ in 0..4 {
                    let a = img.choose(&mut rng).unwrap().clone();
                    let b = img.choose(&mut rng).unwrap().clone();
                    parts.push(check_widening(|win| s.y(&a, &b, win), w)?);
                }
                Ok(Verdict::all(parts))
            }),
        },
    ]
}

/// Points of the dual lattice outside `L`: a dual basis vector plus a
/// small lattice vector.
fn dual_points(c: &Ctx) -> Vec<LatticePoint> {
    let mut out = Vec::new();
    for d in c.l.dual_basis() {
        for g in c.l.points_in_box(1) {
            let p = d.add(&g);
            if !p.is_integral() && !out.contains(&p) {
                out.push(p);
            }
        }
    }
    out
}

fn modules(c: &Ctx) -> Vec<Check<'_>> {
    let w = c.cfg.window;
    vec![
        Check {
            id: "modules.vp_weak_assoc".into(),
            anchor: "V_P is a B_{L,eps} # B_L-module",
            run: Box::new(move || {
                let s = lat_smash(&c.l, &c.t);
                let m = DualModule::new(c.l.clone(), extend_cocycle(&c.l, &c.t));
                let img = vl_image(c)?;
                let mut ws: Vec<LatticeVector> = dual_points(c).into_iter().map(|p| LatticeVector::e(Ambient::VP, p)).collect();
                if ws.is_empty() {
                    ws = lattice_basis(&c.l, Ambient::VP, 1, 0);
                }
                let mut rng = c.rng("modules.vp_weak_assoc");
                let triples: Vec<_> = (0..10)
                    .map(|_| {
                        (
                            img.choose(&mut rng).unwrap().clone(),
                            img.choose(&mut rng).unwrap().clone(),
                            ws.choose(&mut rng).unwrap().clone(),
                        )
                    })
                    .collect();
                all_par(&triples, |(a, b, z)| {
                    Ok(check_weak_assoc(&s, &m, a, b, z, c.assoc_rect(), c.cfg.lmax)?.verdict(c.cfg.lmax))
                })
            }),
        },
        Check {
            id: "modules.vp_vacuum".into(),
            anchor: "Y_W(1,x) = 1 on V_P",
            run: Box::new(move || {
                let s = lat_smash(&c.l, &c.t);
                let m = DualModule::new(c.l.clone(), extend_cocycle(&c.l, &c.t));
                let one = s.vacuum();
                let mut certified = 0;
                for p in dual_points(c) {
                    let z = LatticeVector::e(Ambient::VP, p);
                    let cmp = compare_series(&m.y_w(&one, &z, w)?, &Series::constant(z.clone()), w);
                    if !cmp.is_pass() {
                        return Ok(Verdict::fail(format!("Y_W(1,x) moves {z:?}")));
                    }
                    certified += cmp.certified;
                }
                Ok(Verdict::pass(certified, ""))
            }),
        },
        Check {
            id: "modules.phi_action".into(),
            anchor: "Y_M(1,x) = 1 and Y_M(Dh,x) = d/dx Y_M(h,x) for the B_L action",
            run: Box::new(move || {
                let bl = LatticeAlgebra::untwisted(c.l.clone());
                let act = PhiAction::new(c.l.clone());
                let mut rng = c.rng("modules.phi_action");
                let vs = pick(&mut rng, &lattice_basis(&c.l, Ambient::BLeps, 1, 2), 6);
                let hs = pick(&mut rng, &lattice_basis(&c.l, Ambient::BL, 1, 1), 4);
                let one = bl.vacuum();
                Ok(Verdict::all([
                    check_unit_action(&act, &one, &vs, w)?,
                    check_derivative_compat(&bl, &act, &hs, &vs, w)?,
                ]))
            }),
        },
        Check {
            id: "modules.zero_mode_required".into(),
            anchor: "covariance fails for E^+(-a,x) without x^{a(0)}",
            run: Box::new(move || {
                let bl = LatticeAlgebra::untwisted(c.l.clone());
                let carrier = LatticeAlgebra::twisted(c.l.clone(), c.t.clone());
                let gens: Vec<_> = c.roots().into_iter().map(|a| bl.e(a)).collect();
                let args = lattice_basis(&c.l, Ambient::BLeps, 1, 0);
                let v = check_module_va(&carrier, &bl, &PhiAction::without_zero_mode(c.l.clone()), &gens, &args, c.rect())?;
                Ok(Verdict::refutes(v, "the action without the zero mode"))
            }),
        },
        Check {
            id: "modules.widening".into(),
            anchor: "certified coefficients are stable under widening",
            run: Box::new(move || {
                let m = DualModule::new(c.l.clone(), extend_cocycle(&c.l, &c.t));
                let img = vl_image(c)?;
                let mut rng = c.rng("modules.widening");
                let ws: Vec<LatticeVector> = dual_points(c).into_iter().map(|p| LatticeVector::e(Ambient::VP, p)).collect();
                let mut parts = Vec::new();
                for _ in 0..4 {
                    let a = img.choose(&mut rng).unwrap().clone();
                    let Some(z) = ws.choose(&mut rng).cloned() else { break };
                    parts.push(check_widening(|win| m.y_w(&a, &z, win), w)?);
                }
                Ok(Verdict::all(parts))
            }),
        },
    ]
}

fn pseudo(c: &Ctx) -> Vec<Check<'_>> {
    let mw = c.cfg.max_weight;
    let w = c.cfg.window;
    let alpha_minus = |i: usize| OperatorSeries::<FockVector>::alpha_minus(&c.l, &c.l.basis(i));
    vec![
        Check {
            id: "pseudo.alpha_minus_pder".into(),
            anchor: "h(x)^- is a pseudo-derivation of sign - with [D, psi(x)] = psi'(x)",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let vs = c.fock(mw.min(2));
                let parts = (0..c.l.rank())
                    .map(|i| check_pder(&bh, &alpha_minus(i), Sign::Minus, &vs, &vs, c.rect()))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "pseudo.mirror".into(),
            anchor: "a(x) -> a(-x) maps pseudo-derivations of sign - to sign +",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let m1 = Arc::new(HeisenbergVoa::new(c.l.clone()));
                let vs = c.fock(mw.min(2));
                let mut parts = Vec::new();
                for i in 0..c.l.rank() {
                    let a = alpha_minus(i);
                    parts.push(check_pder(&bh, &a.mirror(), Sign::Plus, &vs, &vs, c.rect())?);
                    let inner = inner_pder(Arc::clone(&m1), FockVector::from_modes(&[(i, 1)]), Series::monomial(-1, Scalar::one()), Sign::Minus);
                    parts.push(check_pder(&*m1, &inner.mirror(), Sign::Plus, &vs, &vs, c.rect())?);
                }
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "pseudo.identity_rejected".into(),
            anchor: "psi(x)1 = 0 for a pseudo-derivation",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let vs = c.fock(1);
                let v = check_pder(&bh, &OperatorSeries::identity(), Sign::Minus, &vs, &vs, c.rect())?;
                Ok(Verdict::refutes(v, "the identity as a pseudo-derivation"))
            }),
        },
        Check {
            id: "pseudo.inner_pder".into(),
            anchor: "Phi^-(u,x^{-1}) = Y(u,x)^- is a pseudo-derivation of sign -",
            run: Box::new(move || {
                let m1 = Arc::new(HeisenbergVoa::new(c.l.clone()));
                let vs = c.fock(mw.min(2));
                let us = [FockVector::from_modes(&[(0, 1)]), FockVector::from_modes(&[(0, 1), (0, 1)])];
                let mut parts = Vec::new();
                for u in us {
                    let op = inner_pder(Arc::clone(&m1), u, Series::monomial(-1, Scalar::one()), Sign::Minus);
                    parts.push(check_pder(&*m1, &op, Sign::Minus, &vs, &vs, c.rect())?);
                }
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "pseudo.lie_closure".into(),
            anchor: "pseudo-derivations of sign - form a Lie algebra",
            run: Box::new(move || {
                let m1 = Arc::new(HeisenbergVoa::new(c.l.clone()));
                let vs = c.fock(mw.min(2));
                let one = Series::monomial(-1, Scalar::one());
                let a = inner_pder(Arc::clone(&m1), FockVector::from_modes(&[(0, 1), (0, 1)]), one.clone(), Sign::Minus);
                let b = inner_pder(Arc::clone(&m1), FockVector::from_modes(&[(0, 2)]), one, Sign::Minus);
                check_pder(&*m1, &a.commutator(&b), Sign::Minus, &vs, &vs, c.rect())
            }),
        },
        Check {
            id: "pseudo.inner_singular".into(),
            anchor: "Phi^-(u,x^{-1}) = sum u_n x^{-n-1}",
            run: Box::new(move || {
                let m1 = Arc::new(HeisenbergVoa::new(c.l.clone()));
                let vs = c.fock(mw.min(3));
                let parts = vs
                    .iter()
                    .map(|u| check_inner_singular(Arc::clone(&m1), u, &vs, w))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "pseudo.inner_constant".into(),
            anchor: "Phi^{+-}(u,1) = u_0",
            run: Box::new(move || {
                let m1 = Arc::new(HeisenbergVoa::new(c.l.clone()));
                let vs = c.fock(mw.min(3));
                let mut certified = 0;
                for u in &vs {
                    for sign in [Sign::Minus, Sign::Plus] {
                        let op = inner_pder(Arc::clone(&m1), u.clone(), Series::constant(Scalar::one()), sign);
                        for v in &vs {
                            let u0 = m1.y(u, v, Window { lo: -1, hi: -1 })?.coeff(-1)?.cloned().unwrap_or_else(FockVector::zero);
                            let cmp = compare_series(&op.apply(v, w)?, &Series::constant(u0), w);
                            if !cmp.is_pass() {
                                return Ok(Verdict::fail(format!("Phi(u,1) differs from u_0 for u={u}, v={v}")));
                            }
                            certified += cmp.certified;
                        }
                    }
                }
                Ok(Verdict::pass(certified, ""))
            }),
        },
        Check {
            id: "pseudo.phi_pend".into(),
            anchor: "E^+(-h,x) x^{h(0)} is a pseudo-endomorphism of sign -; x^{h(0)} is needed",
            run: Box::new(move || {
                let vl = LatticeVoa::new(c.l.clone(), c.t.clone());
                let vs = lattice_basis(&c.l, Ambient::VL, 1, 1);
                let h = c.l.basis(0);
                let good = check_pend(&vl, &OperatorSeries::phi(&c.l, &h), Sign::Minus, &vs, &vs, c.rect())?;
                let unit = check_pend(&vl, &OperatorSeries::identity(), Sign::Minus, &vs, &vs, c.rect())?;
                let bad = check_pend(&vl, &OperatorSeries::phi_without_zero_mode(&c.l, &h), Sign::Minus, &vs, &vs, c.rect())?;
                Ok(Verdict::all([
                    good,
                    unit,
                    Verdict::refutes(bad, "E^+(-h,x) alone"),
                ]))
            }),
        },
    ]
}

fn solved(o: SolveOutcome, what: &str) -> Result<std::result::Result<CoproductSolution, Verdict>> {
    Ok(match o {
        SolveOutcome::Solved(s) => Ok(s),
        SolveOutcome::Inconsistent => Err(Verdict::fail(format!("{what}: inconsistent system"))),
        SolveOutcome::Underdetermined { rank, unknowns } => {
            Err(Verdict::undecidable(format!("{what}: underdetermined, rank {rank} of {unknowns}")))
        }
    })
}

fn ints(rows: &[&[i64]]) -> Vec<Vec<Scalar>> {
    rows.iter().map(|r| r.iter().map(|x| Scalar::from_int(*x)).collect()).collect()
}

fn coproduct(c: &Ctx) -> Vec<Check<'_>> {
    let mw = c.cfg.max_weight;
    let esc = Escalation::default();
    let am = move || OperatorSeries::<FockVector>::alpha_minus(&c.l, &c.l.basis(0));
    let rect = move || c.rect();
    vec![
        Check {
            id: "coproduct.primitive".into(),
            anchor: "Delta(a) = a (x) 1 + 1 (x) a, eps(a) = 0",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let vs = c.fock(mw.min(3));
                let a = am();
                let basis = [a.clone(), OperatorSeries::identity()];
                let s = match solved(solve_coproduct(&bh, &a, &basis, &vs, &vs, rect(), esc)?, "primitive")? {
                    Ok(s) => s,
                    Err(v) => return Ok(v),
                };
                let ok = s.coeffs == ints(&[&[0, 1], &[1, 0]]) && s.counit == Some(Scalar::zero());
                Ok(Verdict::all([
                    Verdict::expect(ok, format!("solved {:?}, eps {:?}", s.coeffs, s.counit)),
                    check_delta_closed(&bh, &basis, &[s.expansion(), vec![(1, 1, Scalar::one())]], &vs, &vs, rect())?,
                    check_cocommutative(&bh, &s, &a, &vs, c.cfg.window)?,
                ]))
            }),
        },
        Check {
            id: "coproduct.group_like".into(),
            anchor: "Delta(a) = a (x) a, eps(a) = 1",
            run: Box::new(move || {
                let b = LatticeAlgebra::twisted(c.l.clone(), c.t.clone());
                let vs = lattice_basis(&c.l, Ambient::BLeps, 1, 1);
                let mut parts = Vec::new();
                for h in c.roots() {
                    let phi = OperatorSeries::phi(&c.l, &h);
                    let basis = [phi.clone()];
                    let s = match solved(solve_coproduct(&b, &phi, &basis, &vs, &vs, rect(), esc)?, "group-like")? {
                        Ok(s) => s,
                        Err(v) => return Ok(v),
                    };
                    let ok = s.coeffs == ints(&[&[1]]) && s.counit == Some(Scalar::one());
                    parts.push(Verdict::expect(ok, format!("solved {:?}, eps {:?}", s.coeffs, s.counit)));
                    parts.push(check_delta_closed(&b, &basis, &[s.expansion()], &vs, &vs, rect())?);
                    parts.push(check_cocommutative(&b, &s, &phi, &vs, c.cfg.window)?);
                }
                Ok(Verdict::all(parts))
            }),
        },
        Check {
            id: "coproduct.square".into(),
            anchor: "Delta(a^2) = a^2 (x) 1 + 2 a (x) a + 1 (x) a^2 for primitive a",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let vs = c.fock(mw.min(3));
                let a = am();
                let sq = a.compose(&a);
                let basis = [sq.clone(), a.clone(), OperatorSeries::identity()];
                let mut sols = Vec::new();
                for (i, x) in basis.iter().enumerate() {
                    match solved(solve_coproduct(&bh, x, &basis, &vs, &vs, rect(), esc)?, &format!("basis element {i}"))? {
                        Ok(s) => sols.push(s),
                        Err(v) => return Ok(v),
                    }
                }
                let ok = sols[0].coeffs == ints(&[&[0, 0, 1], &[0, 2, 0], &[1, 0, 0]]) && sols[0].counit == Some(Scalar::zero());
                let exps: Vec<_> = sols.iter().map(CoproductSolution::expansion).collect();
                Ok(Verdict::all([
                    Verdict::expect(ok, format!("solved {:?}, eps {:?}", sols[0].coeffs, sols[0].counit)),
                    check_delta_closed(&bh, &basis, &exps, &vs, &vs, rect())?,
                    check_coassociative(&sols),
                    check_cocommutative(&bh, &sols[0], &sq, &vs, c.cfg.window)?,
                ]))
            }),
        },
        Check {
            id: "coproduct.wrong_expansion_rejected".into(),
            anchor: "Delta-closedness detects a wrong coproduct",
            run: Box::new(move || {
                let bh = FockAlgebra::new(c.l.clone());
                let vs = c.fock(2);
                let a = am();
                let basis = [a.clone(), OperatorSeries::identity()];
                let wrong = [vec![(0, 0, Scalar::one())], vec![(1, 1, Scalar::one())]];
                let v = check_delta_closed(&bh, &basis, &wrong, &vs, &vs, rect())?;
                let fake = CoproductSolution {
                    coeffs: ints(&[&[0, 1], &[0, 0]]),
                    counit: None,
                    equations: 0,
                };
                let f = check_cocommutative(&bh, &fake, &a, &vs, c.cfg.window)?;
                Ok(Verdict::all([
                    Verdict::refutes(v, "a (x) a for a primitive a"),
                    Verdict::refutes(f, "a non-symmetric tensor"),
                ]))
            }),
        },
    ]
}

fn checks<'a>(c: &'a Ctx, suite: &str) -> Result<Vec<Check<'a>>> {
    Ok(match suite {
        "heisenberg" => heisenberg(c),
        "lattice" => lattice(c),
        "lattice-smash" => lattice_smash(c),
        "modules" => modules(c),
        "pseudo" => pseudo(c),
        "coproduct" => coproduct(c),
        other => return Err(Error::config(format!("unknown suite {other:?}; expected one of {}", SUITES.join(", ")), None)),
    })
}

/// An explicit count wins over the environment.
fn thread_count(cfg: &SuiteConfig) -> Result<Option<usize>> {
    if cfg.threads.is_some() {
        return Ok(cfg.threads);
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v.trim().parse().map_err(|_| Error::config(format!("{THREADS_ENV}={v:?} is not a positive integer"), None))?;
        if n == 0 {
            return Err(Error::config(format!("{THREADS_ENV} must be positive"), None));
        }
        return Ok(Some(n));
    }
    Ok(cfg.threads)
}

/// Runs the checks of `suite` whose id satisfies `keep`.
pub fn run_suite_filtered(cfg: &SuiteConfig, suite: &str, keep: impl Fn(&str) -> bool) -> Result<Report> {
    cfg.validate()?;
    let (l, t) = load_lattice(&cfg.lattice)?;
    let ctx = Ctx { cfg: cfg.clone(), l, t };
    let mut list: Vec<Check<'_>> = checks(&ctx, suite)?.into_iter().filter(|c| keep(&c.id)).collect();
    list.sort_by(|a, b| a.id.cmp(&b.id));
    let run = || -> Vec<CheckRecord> {
        list.par_iter()
            .map(|ck| {
                let start = Instant::now();
                let v = Verdict::from_result((ck.run)());
                CheckRecord {
                    id: ck.id.clone(),
                    anchor: ck.anchor.to_string(),
                    status: v.status,
                    certified: v.certified,
                    witness: v.witness,
                    wall_ms: start.elapsed().as_millis(),
                }
            })
            .collect()
    };
    let records = match thread_count(cfg)? {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::config(format!("thread pool: {e}"), None))?
            .install(run),
        None => run(),
    };
    Ok(Report {
        suite: suite.to_string(),
        checks: records,
    })
}

pub fn run_suite(cfg: &SuiteConfig, suite: &str) -> Result<Report> {
    run_suite_filtered(cfg, suite, |_| true)
}
