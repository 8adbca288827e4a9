//! Isomorph-free generation of all matroids on small ground sets.
//!
//! Up to six elements every family of r-subsets is tried directly. Seven
//! elements come from single-element extensions of the six-element matroids of
//! rank at most 3, with ranks 4 and up obtained by duality.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::bits::{k_subsets, Mask, SubsetTable};
use crate::canonical::{canonical_form, CanonicalKey};
use crate::error::{Error, Result};
use crate::matroid::{check_exchange, Matroid};

/// Largest ground set the built-in enumerator covers.
pub const MAX_ENUMERATED: usize = 7;

/// Largest ground set handled by direct search.
pub const MAX_DIRECT: usize = 6;

static CACHE: [OnceLock<Vec<Matroid>>; MAX_ENUMERATED + 1] = [const { OnceLock::new() }; MAX_ENUMERATED + 1];

/// One canonical representative per isomorphism class on `n` elements,
/// sorted by canonical key.
pub fn enumerate_all(n: usize) -> Result<Vec<Matroid>> {
    if n > MAX_ENUMERATED {
        return Err(Error::DegreeTooLarge(n));
    }
    Ok(CACHE[n]
        .get_or_init(|| if n <= MAX_DIRECT { direct_search(n) } else { by_extension(n) })
        .clone())
}

/// Every valid basis family on `[n]`, by exhaustive search over families of
/// r-subsets, reduced to canonical representatives.
pub fn direct_search(n: usize) -> Vec<Matroid> {
    assert!(n <= MAX_DIRECT, "direct search is limited to {MAX_DIRECT} elements");
    let mut all: Vec<Matroid> = Vec::new();
    for r in 0..=n {
        all.extend(labeled_matroids(n, r));
    }
    dedup_classes(all)
}

/// All labeled matroids on `[n]` of rank `r`.
pub fn labeled_matroids(n: usize, r: usize) -> Vec<Matroid> {
    assert!(n <= MAX_DIRECT, "labeled search is limited to {MAX_DIRECT} elements");
    let cands = k_subsets(n, r);
    let c = cands.len();
    (1u32..(1u32 << c))
        .into_par_iter()
        .filter_map(|family| {
            let bases: Vec<Mask> = bits_u32(family).map(|i| cands[i]).collect();
            check_exchange(n, &bases).ok()?;
            Some(Matroid::from_sorted_bases_unchecked(n, r, bases))
        })
        .collect()
}

fn bits_u32(m: u32) -> impl Iterator<Item = usize> {
    let mut rest = m;
    std::iter::from_fn(move || {
        if rest == 0 {
            None
        } else {
            let b = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(b)
        }
    })
}

/// Keeps one canonical representative per class, sorted by key.
pub fn dedup_classes(ms: Vec<Matroid>) -> Vec<Matroid> {
    let keyed: Vec<CanonicalKey> = ms.par_iter().map(|m| canonical_form(m).0).collect();
    let unique: BTreeMap<CanonicalKey, ()> = keyed.into_iter().map(|k| (k, ())).collect();
    unique.into_keys().map(|k| k.representative()).collect()
}

/// Hyperplanes (flats of rank `r - 1`) of `m`.
pub fn hyperplanes(m: &Matroid) -> Vec<Mask> {
    let r = m.rank();
    if r == 0 {
        return Vec::new();
    }
    let indep = m.independent_sets();
    let mut out: Vec<Mask> = k_subsets(m.size(), r - 1)
        .into_iter()
        .filter(|&i| indep.contains(i))
        .map(|i| closure(m, &indep, i))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

fn closure(m: &Matroid, indep: &SubsetTable, i: Mask) -> Mask {
    // i is independent; e is in cl(i) iff i + e is dependent
    let mut cl = i;
    for e in 0..m.size() {
        if i >> e & 1 == 0 && !indep.contains(i | (1 << e)) {
            cl |= 1 << e;
        }
    }
    cl
}

/// All matroids `M` on `[n+1]` with `M \ (n+1) = m`.
///
/// Besides the coloop extension, the new element `e` is placed by choosing the
/// set `H` of hyperplanes whose span it joins: `I + e` is a basis exactly when
/// `I` is independent of size `r - 1` with closure outside `H`. Every
/// extension arises from some `H`; the invalid choices fail the exchange check.
pub fn extend_by_element(m: &Matroid) -> Vec<Matroid> {
    let n = m.size();
    let r = m.rank();
    let e: Mask = 1 << n;
    let mut out = Vec::new();

    let coloop: Vec<Mask> = m.bases().iter().map(|&b| b | e).collect();
    out.push(Matroid::from_sorted_bases_unchecked(n + 1, r + 1, coloop));

    if r == 0 {
        out.push(Matroid::from_sorted_bases_unchecked(n + 1, 0, vec![0]));
        return out;
    }
    let indep = m.independent_sets();
    let hyps = hyperplanes(m);
    let h_index = |cl: Mask| hyps.binary_search(&cl).unwrap();
    // each independent (r-1)-set with the index of its closure
    let small: Vec<(Mask, usize)> = k_subsets(n, r - 1)
        .into_iter()
        .filter(|&i| indep.contains(i))
        .map(|i| (i, h_index(closure(m, &indep, i))))
        .collect();
    assert!(hyps.len() < 32, "too many hyperplanes for the extension search");
    let h = hyps.len();
    let found: Vec<Matroid> = (0u32..(1u32 << h))
        .into_par_iter()
        .filter_map(|chosen| {
            let mut bases: Vec<Mask> = m.bases().to_vec();
            bases.extend(small.iter().filter(|(_, hi)| chosen >> hi & 1 == 0).map(|(i, _)| i | e));
            bases.sort_unstable();
            check_exchange(n + 1, &bases).ok()?;
            Some(Matroid::from_sorted_bases_unchecked(n + 1, r, bases))
        })
        .collect();
    out.extend(found);
    out.sort();
    out.dedup();
    out
}

fn by_extension(n: usize) -> Vec<Matroid> {
    let parents = enumerate_all(n - 1).expect("parent degree is covered");
    let half = n / 2;
    // matroids of rank <= half; the rest are their duals
    let children: Vec<Matroid> = parents
        .par_iter()
        .filter(|p| p.rank() <= half)
        .flat_map_iter(|p| extend_by_element(p).into_iter().filter(|c| c.rank() <= half))
        .collect();
    let low = dedup_classes(children);
    let mut all = low.clone();
    // rank exactly n/2 is closed under duality and already complete
    all.extend(low.iter().filter(|m| 2 * m.rank() != n).map(|m| m.dual()));
    dedup_classes(all)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_counts() {
        let counts: Vec<usize> = (0..=5).map(|n| enumerate_all(n).unwrap().len()).collect();
        assert_eq!(counts, vec![1, 2, 4, 8, 17, 38]);
        assert!(matches!(enumerate_all(8), Err(Error::DegreeTooLarge(8))));
    }

    #[test]
    fn labeled_counts() {
        // labeled matroids on 0..=5 elements: 1, 2, 5, 16, 68, 406
        let counts: Vec<usize> =
            (0..=5).map(|n| (0..=n).map(|r| labeled_matroids(n, r).len()).sum()).collect();
        assert_eq!(counts, vec![1, 2, 5, 16, 68, 406]);
    }

    #[test]
    fn two_elements() {
        let two = enumerate_all(2).unwrap();
        let expect = dedup_classes(vec![
            Matroid::uniform(0, 2).unwrap(),
            Matroid::uniform(1, 1).unwrap().direct_sum(&Matroid::uniform(0, 1).unwrap()),
            Matroid::uniform(1, 2).unwrap(),
            Matroid::uniform(2, 2).unwrap(),
        ]);
        assert_eq!(two, expect);
    }

    #[test]
    fn extensions_of_small_matroids() {
        let ext = extend_by_element(&Matroid::empty());
        assert_eq!(dedup_classes(ext), enumerate_all(1).unwrap());
        let ext = extend_by_element(&Matroid::uniform(1, 1).unwrap());
        let loop_coloop = Matroid::from_bases(2, 1, &[1]).unwrap();
        assert!(ext.contains(&Matroid::uniform(1, 2).unwrap()));
        assert!(ext.contains(&Matroid::uniform(2, 2).unwrap()));
        assert!(ext.contains(&loop_coloop));
        for m in &ext {
            assert_eq!(m.delete(2).unwrap(), Matroid::uniform(1, 1).unwrap());
        }
    }

    #[test]
    fn extension_agrees_with_direct_to_five() {
        for n in 1..=5 {
            let parents = enumerate_all(n - 1).unwrap();
            let ext: Vec<Matroid> = parents.iter().flat_map(extend_by_element).collect();
            assert_eq!(dedup_classes(ext), enumerate_all(n).unwrap(), "n={n}");
        }
    }

    #[test]
    fn hyperplanes_of_uniform() {
        assert_eq!(hyperplanes(&Matroid::uniform(3, 5).unwrap()).len(), 10);
        assert!(hyperplanes(&Matroid::uniform(0, 3).unwrap()).is_empty());
        // rank 1: the single hyperplane is the set of loops
        let m = Matroid::from_bases(3, 1, &[0b001, 0b010]).unwrap();
        assert_eq!(hyperplanes(&m), vec![0b100]);
    }
}
