//! Tensor products of coordinate spaces, reduced over monomial bases.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use crate::scalar::Scalar;
use crate::series::Vector;

/// A vector space with a distinguished monomial basis.
pub trait Coordinates: Vector {
    type Key: Ord + Clone + fmt::Debug + Send + Sync;
    fn coordinates(&self) -> Vec<(Self::Key, Scalar)>;
    fn from_key(key: &Self::Key) -> Self;
}

/// An element of `A (x) B`, stored as coefficients on pairs of basis keys.
pub struct TensorVector<A: Coordinates, B: Coordinates> {
    terms: BTreeMap<(A::Key, B::Key), Scalar>,
    _marker: PhantomData<fn() -> (A, B)>,
}

impl<A: Coordinates, B: Coordinates> Clone for TensorVector<A, B> {
    fn clone(&self) -> Self {
        TensorVector {
            terms: self.terms.clone(),
            _marker: PhantomData,
        }
    }
}

impl<A: Coordinates, B: Coordinates> PartialEq for TensorVector<A, B> {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl<A: Coordinates, B: Coordinates> Default for TensorVector<A, B> {
    fn default() -> Self {
        TensorVector {
            terms: BTreeMap::new(),
            _marker: PhantomData,
        }
    }
}

impl<A: Coordinates, B: Coordinates> TensorVector<A, B> {
    pub fn zero() -> Self {
        TensorVector::default()
    }

    /// `a (x) b`, expanded over both bases.
    pub fn pure(a: &A, b: &B) -> Self {
        let mut out = TensorVector::zero();
        let bc = b.coordinates();
        for (ka, ca) in a.coordinates() {
            for (kb, cb) in &bc {
                out.add_key((ka.clone(), kb.clone()), &ca * cb);
            }
        }
        out
    }

    pub fn add_key(&mut self, k: (A::Key, B::Key), c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&k) {
            Some(x) => {
                *x = &*x + &c;
                if x.is_zero() {
                    self.terms.remove(&k);
                }
            }
            None => {
                self.terms.insert(k, c);
            }
        }
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn keyed_terms(&self) -> impl Iterator<Item = (&(A::Key, B::Key), &Scalar)> {
        self.terms.iter()
    }

    /// Basis pairs with coefficients: `sum c (a (x) b)`.
    pub fn pairs(&self) -> Vec<(A, B, Scalar)> {
        self.terms
            .iter()
            .map(|((ka, kb), c)| (A::from_key(ka), B::from_key(kb), c.clone()))
            .collect()
    }

    /// `sum c f(a, b)` for a bilinear `f`.
    pub fn contract<C: Vector>(&self, mut f: impl FnMut(&A, &B) -> C) -> Option<C> {
        let mut acc: Option<C> = None;
        for (a, b, c) in self.pairs() {
            let v = f(&a, &b).scale(&c);
            match &mut acc {
                Some(x) => x.add_assign(&v),
                None => acc = Some(v),
            }
        }
        acc
    }

    /// `(f (x) g)` applied termwise.
    pub fn map<C: Coordinates, D: Coordinates>(&self, f: impl Fn(&A) -> C, g: impl Fn(&B) -> D) -> TensorVector<C, D> {
        let mut out = TensorVector::zero();
        for (a, b, c) in self.pairs() {
            out.add_assign(&TensorVector::pure(&f(&a), &g(&b)).scale(&c));
        }
        out
    }

    /// `sum_i a_i (x) b_i` with distinct left basis vectors `a_i`.
    pub fn by_left(&self) -> Vec<(A, B)> {
        let mut out: Vec<(A::Key, B)> = Vec::new();
        for ((ka, kb), c) in &self.terms {
            let v = B::from_key(kb).scale(c);
            match out.last_mut() {
                Some((k, b)) if k == ka => b.add_assign(&v),
                _ => out.push((ka.clone(), v)),
            }
        }
        out.into_iter().map(|(k, b)| (A::from_key(&k), b)).collect()
    }

    /// The component along a given left basis key, as an element of `B`.
    pub fn right_part(&self, ka: &A::Key) -> Option<B> {
        let mut out: Option<B> = None;
        for ((k, kb), c) in &self.terms {
            if k == ka {
                let v = B::from_key(kb).scale(c);
                match &mut out {
                    Some(x) => x.add_assign(&v),
                    None => out = Some(v),
                }
            }
        }
        out.filter(|v| !v.is_zero())
    }
}

impl<A: Coordinates> TensorVector<A, A> {
    /// The flip `a (x) b -> b (x) a`.
    pub fn flip(&self) -> Self {
        let mut out = TensorVector::zero();
        for ((a, b), c) in &self.terms {
            out.add_key((b.clone(), a.clone()), c.clone());
        }
        out
    }
}

impl<A: Coordinates, B: Coordinates> fmt::Debug for TensorVector<A, B> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, ((a, b), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c}) {a:?} (x) {b:?}")?;
        }
        Ok(())
    }
}

impl<A: Coordinates, B: Coordinates> Vector for TensorVector<A, B> {
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add_assign(&mut self, other: &Self) {
        for (k, c) in &other.terms {
            self.add_key(k.clone(), c.clone());
        }
    }
    fn scale(&self, s: &Scalar) -> Self {
        if s.is_zero() {
            return TensorVector::zero();
        }
        if s.is_one() {
            return self.clone();
        }
        let mut out = self.clone();
        for c in out.terms.values_mut() {
            *c = &*c * s;
        }
        out
    }
}

impl<A: Coordinates, B: Coordinates> Coordinates for TensorVector<A, B> {
    type Key = (A::Key, B::Key);
    fn coordinates(&self) -> Vec<(Self::Key, Scalar)> {
        self.terms.iter().map(|(k, c)| (k.clone(), c.clone())).collect()
    }
    fn from_key(key: &Self::Key) -> Self {
        let mut out = TensorVector::zero();
        out.add_key(key.clone(), Scalar::one());
        out
    }
}

impl Coordinates for Scalar {
    type Key = ();
    fn coordinates(&self) -> Vec<((), Scalar)> {
        if self.is_zero() {
            Vec::new()
        } else {
            vec![((), self.clone())]
        }
    }
    fn from_key(_: &()) -> Self {
        Scalar::one()
    }
}
