//! Rational linear combinations of oriented matroid classes.
//!
//! Every matroid on `[n]` carries the orientation `1 ∧ 2 ∧ … ∧ n`, so a class is
//! named by its canonical key alone and relabeling costs only a permutation sign.

use std::collections::BTreeMap;
use std::fmt;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use once_cell::sync::Lazy;

use crate::canonical::{canonical_form, canonical_form_even, CanonicalKey};
use crate::matroid::Matroid;

/// Nullity and rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bidegree {
    pub k: usize,
    pub r: usize,
}

impl Bidegree {
    pub fn new(k: usize, r: usize) -> Self {
        Bidegree { k, r }
    }

    /// Total degree, the ground-set size.
    pub fn total(&self) -> usize {
        self.k + self.r
    }
}

pub fn bidegree_of(key: &CanonicalKey) -> Bidegree {
    Bidegree::new(key.nullity(), key.rank())
}

/// A class `[rep, ω]` up to sign, or zero.
pub type Normalized = Option<(CanonicalKey, i32)>;

static NORMALIZE_CACHE: Lazy<DashMap<Matroid, Normalized>> = Lazy::new(DashMap::new);

/// Writes `[m, ω_n] = sign · [rep, ω_n]`; `None` when the class vanishes because
/// of an odd automorphism.
pub fn normalize(m: &Matroid) -> Normalized {
    if let Some(hit) = NORMALIZE_CACHE.get(m) {
        return hit.clone();
    }
    let out = canonical_form_even(m).map(|(k, sigma)| (k, sigma.sign()));
    NORMALIZE_CACHE.insert(m.clone(), out.clone());
    out
}

/// The canonical key even when it carries an odd automorphism.
pub fn key_of(m: &Matroid) -> CanonicalKey {
    match normalize(m) {
        Some((k, _)) => k,
        None => canonical_form(m).0,
    }
}

/// Sparse vector over canonical keys with rational coefficients.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ClassVector {
    terms: BTreeMap<CanonicalKey, BigRational>,
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl ClassVector {
    pub fn zero() -> Self {
        ClassVector::default()
    }

    /// `[∅, 1]`.
    pub fn unit() -> Self {
        ClassVector::from_matroid(&Matroid::empty())
    }

    /// The basis vector of a key. Keys with an odd automorphism give zero.
    pub fn basis(key: &CanonicalKey) -> Self {
        let mut v = ClassVector::zero();
        v.add_term(key.clone(), BigRational::one());
        v
    }

    /// `[m, ω_n]` expressed in canonical keys.
    pub fn from_matroid(m: &Matroid) -> Self {
        let mut v = ClassVector::zero();
        if let Some((k, s)) = normalize(m) {
            v.add_term(k, rational(s as i64));
        }
        v
    }

    /// Adds `c · key`, dropping the term if it cancels. Odd-automorphism keys are ignored.
    pub fn add_term(&mut self, key: CanonicalKey, c: BigRational) {
        if key.odd_auto() || c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// Adds `c · [m, ω_n]`.
    pub fn add_matroid(&mut self, m: &Matroid, c: &BigRational) {
        if let Some((k, s)) = normalize(m) {
            let c = if s < 0 { -c.clone() } else { c.clone() };
            self.add_term(k, c);
        }
    }

    pub fn add(&self, other: &ClassVector) -> ClassVector {
        let mut out = self.clone();
        out.add_assign(other);
        out
    }

    pub fn add_assign(&mut self, other: &ClassVector) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c.clone());
        }
    }

    pub fn sub(&self, other: &ClassVector) -> ClassVector {
        self.add(&other.scale(&rational(-1)))
    }

    pub fn scale(&self, c: &BigRational) -> ClassVector {
        if c.is_zero() {
            return ClassVector::zero();
        }
        ClassVector { terms: self.terms.iter().map(|(k, x)| (k.clone(), x * c)).collect() }
    }

    pub fn neg(&self) -> ClassVector {
        self.scale(&rational(-1))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, key: &CanonicalKey) -> BigRational {
        self.terms.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CanonicalKey, &BigRational)> {
        self.terms.iter()
    }

    /// The common total degree, `None` for zero, `Err` if mixed.
    pub fn degree(&self) -> Result<Option<usize>, ()> {
        let mut it = self.terms.keys().map(|k| k.size());
        let Some(first) = it.next() else { return Ok(None) };
        if it.all(|d| d == first) {
            Ok(Some(first))
        } else {
            Err(())
        }
    }
}

impl fmt::Debug for ClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            if c.is_negative() {
                write!(f, "({c})[{k}]")?;
            } else {
                write!(f, "{c}[{k}]")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::Permutation;
    use crate::matroid::Graph;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    #[test]
    fn normalize_examples() {
        assert!(normalize(&Matroid::uniform(2, 4).unwrap()).is_none());
        let (k, _) = normalize(&Graph::complete(4).matroid()).unwrap();
        assert_eq!(bidegree_of(&k), Bidegree::new(3, 3));
        let (e, s) = normalize(&Matroid::empty()).unwrap();
        assert_eq!((e.size(), s), (0, 1));
        assert_eq!(bidegree_of(&key_of(&Matroid::uniform(0, 1).unwrap())), Bidegree::new(1, 0));
        assert_eq!(bidegree_of(&key_of(&Matroid::uniform(1, 1).unwrap())), Bidegree::new(0, 1));
        // the key still exists for vanishing classes
        assert!(key_of(&Matroid::uniform(2, 4).unwrap()).odd_auto());
    }

    #[test]
    fn relabeling_changes_sign_by_permutation_parity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let cases = [
            Graph::complete(4).matroid(),
            Matroid::from_bases(2, 1, &[1]).unwrap(),
            Matroid::uniform(1, 1).unwrap(),
        ];
        for m in &cases {
            let (k, s) = normalize(m).unwrap();
            for _ in 0..20 {
                let mut imgs: Vec<usize> = (1..=m.size()).collect();
                imgs.shuffle(&mut rng);
                let p = Permutation::from_images(&imgs).unwrap();
                let (k2, s2) = normalize(&m.relabel(&p)).unwrap();
                assert_eq!(k2, k);
                assert_eq!(s2, s * p.sign());
            }
        }
    }

    #[test]
    fn vector_arithmetic() {
        let v = ClassVector::from_matroid(&Graph::complete(4).matroid())
            .add(&ClassVector::unit().scale(&rational(3)));
        assert!(v.add(&v.scale(&rational(-1))).is_zero());
        assert!(v.scale(&rational(0)).is_zero());
        assert_eq!(v.len(), 2);
        assert_eq!(v.coefficient(&key_of(&Matroid::empty())), rational(3));
        assert!(v.degree().is_err());
        assert_eq!(ClassVector::unit().degree(), Ok(Some(0)));
        assert!(ClassVector::from_matroid(&Matroid::uniform(2, 4).unwrap()).is_zero());
    }
}
