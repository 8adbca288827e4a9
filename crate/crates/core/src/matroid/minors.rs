//! Minor containment and the excluded-minor classes.

use once_cell::sync::Lazy;

use crate::bits::{bits, compress, full_mask, k_subsets, Mask};
use crate::canonical::{canonical_form, CanonicalKey};
use crate::matroid::{Graph, Matroid};

/// The Fano plane: columns are the nonzero vectors of GF(2)^3, column `j` is `j` in binary.
pub fn fano() -> Matroid {
    Matroid::from_f2_columns(&(1..=7u64).collect::<Vec<_>>())
}

pub fn fano_dual() -> Matroid {
    fano().dual()
}

struct Pattern {
    matroid: Matroid,
    key: CanonicalKey,
}

impl Pattern {
    fn new(matroid: Matroid) -> Pattern {
        let key = canonical_form(&matroid).0;
        Pattern { matroid, key }
    }
}

static U24: Lazy<Pattern> = Lazy::new(|| Pattern::new(Matroid::uniform(2, 4).unwrap()));
static U25: Lazy<Pattern> = Lazy::new(|| Pattern::new(Matroid::uniform(2, 5).unwrap()));
static U35: Lazy<Pattern> = Lazy::new(|| Pattern::new(Matroid::uniform(3, 5).unwrap()));
static F7: Lazy<Pattern> = Lazy::new(|| Pattern::new(fano()));
static F7_DUAL: Lazy<Pattern> = Lazy::new(|| Pattern::new(fano_dual()));
static K5_DUAL: Lazy<Pattern> = Lazy::new(|| Pattern::new(Graph::complete(5).matroid().dual()));
static K33_DUAL: Lazy<Pattern> =
    Lazy::new(|| Pattern::new(Graph::complete_bipartite(3, 3).matroid().dual()));

/// True when contracting some independent set and deleting some coindependent
/// set of `m` leaves a matroid isomorphic to `pattern`.
pub fn has_minor(m: &Matroid, pattern: &Matroid) -> bool {
    has_pattern(m, &Pattern::new(pattern.clone()))
}

fn has_pattern(m: &Matroid, p: &Pattern) -> bool {
    let q = &p.matroid;
    if q.size() > m.size() || q.rank() > m.rank() || q.nullity() > m.nullity() {
        return false;
    }
    let contract = m.rank() - q.rank();
    let delete = m.nullity() - q.nullity();
    let indep = m.independent_sets();
    let target = q.bases().len();
    for i in k_subsets(m.size(), contract) {
        if !indep.contains(i) {
            continue;
        }
        let c = m.contract_set_unchecked(i);
        let n = c.size();
        for j in k_subsets(n, delete) {
            let keep = full_mask(n) & !j;
            let mut count = 0;
            for &b in c.bases() {
                if b & j == 0 {
                    count += 1;
                }
            }
            if count != target {
                continue;
            }
            let bases: Vec<Mask> =
                c.bases().iter().filter(|&&b| b & j == 0).map(|&b| compress(b, keep)).collect();
            let minor = Matroid::from_sorted_bases_unchecked(n - delete, q.rank(), bases);
            if canonical_form(&minor).0 == p.key {
                return true;
            }
        }
    }
    false
}

/// Builds the reduced GF(2) matrix `[I | A]` from the fundamental circuits of
/// one basis; `m` is binary exactly when this matrix represents it.
pub(crate) fn is_binary(m: &Matroid) -> bool {
    let b0 = m.bases()[0];
    let row_of: Vec<usize> = {
        let mut v = vec![usize::MAX; m.size()];
        for (row, b) in bits(b0).enumerate() {
            v[b] = row;
        }
        v
    };
    let mut columns = vec![0u64; m.size()];
    for e in 0..m.size() {
        if b0 >> e & 1 == 1 {
            columns[e] = 1 << row_of[e];
        } else {
            for b in bits(b0) {
                if m.is_basis((b0 & !(1 << b)) | (1 << e)) {
                    columns[e] |= 1 << row_of[b];
                }
            }
        }
    }
    Matroid::from_f2_columns(&columns) == *m
}

pub(crate) fn is_ternary(m: &Matroid) -> bool {
    [&*U25, &*U35, &*F7, &*F7_DUAL].iter().all(|p| !has_pattern(m, p))
}

pub(crate) fn is_regular(m: &Matroid) -> bool {
    is_binary(m) && !has_pattern(m, &F7) && !has_pattern(m, &F7_DUAL)
}

pub(crate) fn is_graphic(m: &Matroid) -> bool {
    is_regular(m) && !has_pattern(m, &K5_DUAL) && !has_pattern(m, &K33_DUAL)
}

/// Binary test straight from the excluded minor, kept as a cross-check.
pub fn is_binary_by_minor(m: &Matroid) -> bool {
    !has_pattern(m, &U24)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minor_examples() {
        let u24 = Matroid::uniform(2, 4).unwrap();
        let k4 = Graph::complete(4).matroid();
        assert!(has_minor(&u24, &u24));
        assert!(!has_minor(&k4, &u24));
        assert!(!has_minor(&fano(), &u24));
        assert!(has_minor(&Matroid::uniform(3, 6).unwrap(), &u24));
        assert!(has_minor(&fano(), &Matroid::uniform(2, 3).unwrap()));
    }

    #[test]
    fn class_examples() {
        let k4 = Graph::complete(4).matroid();
        assert!(k4.is_regular());
        assert!(k4.is_graphic());
        assert!(k4.is_cographic());
        assert!(!Matroid::uniform(2, 4).unwrap().is_binary());
        assert!(Matroid::uniform(2, 4).unwrap().is_ternary());
        assert!(!fano().is_regular());
        assert!(fano().is_binary());
        assert!(!fano().is_ternary());
        assert!(!fano_dual().is_regular());
        assert!(!Matroid::uniform(2, 5).unwrap().is_ternary());
        let k5 = Graph::complete(5).matroid();
        assert!(k5.is_graphic());
        assert!(!k5.is_cographic());
        let k33 = Graph::complete_bipartite(3, 3).matroid();
        assert!(!k33.dual().is_graphic());
        assert!(k33.dual().is_regular());
    }

    #[test]
    fn binary_routes_agree_on_small_uniform() {
        for n in 0..=6 {
            for r in 0..=n {
                let m = Matroid::uniform(r, n).unwrap();
                assert_eq!(is_binary(&m), is_binary_by_minor(&m), "U({r},{n})");
            }
        }
    }
}
