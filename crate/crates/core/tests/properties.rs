use std::sync::OnceLock;

use matroidc_core::bits::{full_mask, popcount};
use matroidc_core::canonical::{canonical_form, has_odd_automorphism, iso_witness, perm_sign};
use matroidc_core::classes::{bidegree_of, key_of};
use matroidc_core::complexes::{apply_differential, chain_basis, children, differential_matrix};
use matroidc_core::enumerate::enumerate_all;
use matroidc_core::hopf::coproduct;
use matroidc_core::linalg::{default_primes, rank_bareiss, rank_exact, rank_modular};
use matroidc_core::{normalize, ClassVector, ComplexSpec, DifferentialKind, Matroid, MatroidSource, Permutation, SparseIntMatrix};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

fn classes(n: usize) -> &'static [Matroid] {
    static CACHE: OnceLock<Vec<Vec<Matroid>>> = OnceLock::new();
    &CACHE.get_or_init(|| (0..=7).map(|n| enumerate_all(n).unwrap()).collect())[n]
}

fn source() -> &'static MatroidSource {
    static SRC: OnceLock<MatroidSource> = OnceLock::new();
    SRC.get_or_init(|| MatroidSource::enumerator(7).unwrap())
}

fn upto(max_n: usize) -> impl Iterator<Item = &'static Matroid> {
    (0..=max_n).flat_map(classes)
}

/// A class on at most `max_n` elements under a uniformly random relabeling.
fn relabeled(max_n: usize) -> impl Strategy<Value = (Matroid, Permutation)> {
    (0..=max_n)
        .prop_flat_map(|n| (0..classes(n).len(), Just((1..=n).collect::<Vec<usize>>()).prop_shuffle()))
        .prop_map(|(i, images)| {
            let m = &classes(images.len())[i];
            let p = Permutation::from_images(&images).unwrap();
            (m.clone(), p)
        })
}

fn permutations(n: usize) -> Vec<Permutation> {
    fn go(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<Permutation>) {
        if prefix.len() == used.len() {
            out.push(Permutation::from_images(prefix).unwrap());
            return;
        }
        for x in 0..used.len() {
            if !used[x] {
                used[x] = true;
                prefix.push(x + 1);
                go(prefix, used, out);
                prefix.pop();
                used[x] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Rank over the rationals by plain Gaussian elimination.
fn rank_rational(rows: &[Vec<i64>]) -> usize {
    let mut a: Vec<Vec<BigRational>> =
        rows.iter().map(|r| r.iter().map(|&x| BigRational::from_integer(BigInt::from(x))).collect()).collect();
    let cols = a.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..a.len()).find(|&i| !a[i][c].is_zero()) else { continue };
        a.swap(rank, p);
        for i in rank + 1..a.len() {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[rank][c];
                for j in c..cols {
                    let t = &f * &a[rank][j];
                    a[i][j] -= t;
                }
            }
        }
        rank += 1;
    }
    rank
}

fn matrix(max_dim: usize, entries: std::ops::RangeInclusive<i64>) -> impl Strategy<Value = Vec<Vec<i64>>> {
    (0..=max_dim, 0..=max_dim)
        .prop_flat_map(move |(r, c)| prop::collection::vec(prop::collection::vec(entries.clone(), c), r))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn relabeled_matroids_pass_exchange_validation((m, p) in relabeled(7)) {
        let q = m.relabel(&p);
        prop_assert!(Matroid::from_bases(q.size(), q.rank(), q.bases()).is_ok());
    }

    #[test]
    fn canonical_key_is_isomorphism_invariant((m, p) in relabeled(7)) {
        let q = m.relabel(&p);
        let (k, sigma) = canonical_form(&q);
        prop_assert_eq!(&k, &canonical_form(&m).0);
        prop_assert_eq!(q.relabel(&sigma), k.representative());
    }

    #[test]
    fn normalize_signs_follow_the_relabeling((m, p) in relabeled(6)) {
        match (normalize(&m), normalize(&m.relabel(&p))) {
            (Some((k, s)), Some((k2, s2))) => {
                prop_assert_eq!(k, k2);
                prop_assert_eq!(s * s2, perm_sign(&p));
            }
            (None, None) => {}
            _ => prop_assert!(false, "vanishing is not isomorphism invariant"),
        }
    }

    #[test]
    fn iso_witness_maps_onto_the_target((m, p) in relabeled(6)) {
        let q = m.relabel(&p);
        let w = iso_witness(&m, &q).expect("isomorphic");
        prop_assert_eq!(m.relabel(&w), q);
    }

    #[test]
    fn ranks_agree_across_methods(a in matrix(9, -3..=3)) {
        let m = SparseIntMatrix::from_dense(&a);
        let want = rank_rational(&a);
        prop_assert_eq!(rank_exact(&m), want);
        prop_assert_eq!(rank_exact(&m.transpose()), want);
        prop_assert_eq!(rank_bareiss(&m), want);
        let (r, agree) = rank_modular(&m, &default_primes(3));
        prop_assert!(agree);
        prop_assert_eq!(r, want);
    }

    #[test]
    fn ranks_with_large_entries(a in matrix(7, -(1i64 << 40)..=(1i64 << 40))) {
        let m = SparseIntMatrix::from_dense(&a);
        let want = rank_rational(&a);
        prop_assert_eq!(rank_exact(&m), want);
        prop_assert_eq!(rank_exact(&m.transpose()), want);
        prop_assert!(rank_modular(&m, &default_primes(3)).0 <= want);
    }

    #[test]
    fn differentials_square_to_zero_on_relabeled_inputs((m, p) in relabeled(7), k in 0..6usize) {
        let kind = DifferentialKind::ALL[k];
        let v = ClassVector::from_matroid(&m.relabel(&p));
        prop_assert!(apply_differential(kind, &apply_differential(kind, &v)).is_zero());
    }
}

#[test]
fn dual_is_an_involution() {
    for m in upto(6) {
        assert_eq!(&m.dual().dual(), m);
        assert_eq!(m.dual().rank(), m.size() - m.rank());
    }
}

#[test]
fn loops_are_coloops_of_the_dual() {
    for m in upto(6) {
        for x in 1..=m.size() {
            assert_eq!(m.is_loop(x), m.dual().is_coloop(x));
        }
    }
}

#[test]
fn single_element_minor_ranks() {
    for m in upto(5) {
        for x in 1..=m.size() {
            assert_eq!(m.delete(x).unwrap().rank(), m.rank() - usize::from(m.is_coloop(x)));
            assert_eq!(m.contract(x).unwrap().rank(), m.rank() - usize::from(!m.is_loop(x)));
        }
    }
}

#[test]
fn restriction_and_contraction_ranks_add_up() {
    for m in upto(5) {
        for s in 0..=full_mask(m.size()) {
            let (r, c) = (m.restrict(s).unwrap(), m.contract_set(s).unwrap());
            assert_eq!(r.rank() + c.rank(), m.rank());
            assert_eq!(r.rank(), m.rank_of(s));
        }
    }
}

#[test]
fn minors_commute() {
    type Op = fn(&Matroid, usize) -> matroidc_core::Result<Matroid>;
    let ops: [Op; 2] = [Matroid::delete, Matroid::contract];
    for m in upto(5) {
        for x in 1..=m.size() {
            for y in 1..=m.size() {
                if x == y {
                    continue;
                }
                let shift = |a: usize, gone: usize| if a > gone { a - 1 } else { a };
                for f in ops {
                    for g in ops {
                        let xy = g(&f(m, x).unwrap(), shift(y, x)).unwrap();
                        let yx = f(&g(m, y).unwrap(), shift(x, y)).unwrap();
                        assert_eq!(xy, yx);
                    }
                }
            }
        }
    }
}

#[test]
fn components_reassemble() {
    for m in upto(6) {
        let comps = m.components();
        assert_eq!(comps.iter().fold(0, |acc, c| acc | c), m.ground());
        let sum = comps.iter().fold(Matroid::empty(), |acc, &c| acc.direct_sum(&m.restrict(c).unwrap()));
        assert_eq!(key_of(&sum), key_of(m));
        assert_eq!(m.is_connected(), comps.len() == 1);
    }
}

#[test]
fn odd_automorphisms_match_brute_force() {
    for n in 0..=6 {
        let perms = permutations(n);
        for m in classes(n) {
            let brute = perms.iter().any(|p| perm_sign(p) == -1 && m.relabel(p) == *m);
            assert_eq!(has_odd_automorphism(m), brute, "{m:?}");
            assert_eq!(canonical_form(m).0.odd_auto(), brute);
        }
    }
}

#[test]
fn witness_signs_are_constant_without_odd_automorphisms() {
    for n in 0..=5 {
        let perms = permutations(n);
        let reverse = Permutation::from_images(&(1..=n).rev().collect::<Vec<_>>()).unwrap();
        for rep in classes(n) {
            if has_odd_automorphism(rep) {
                continue;
            }
            let m = rep.relabel(&reverse);
            let signs: Vec<i32> = perms.iter().filter(|p| m.relabel(p) == *rep).map(perm_sign).collect();
            assert!(!signs.is_empty());
            assert!(signs.iter().all(|&s| s == signs[0]), "{rep:?}");
            assert_eq!(perm_sign(&iso_witness(&m, rep).unwrap()), signs[0]);
        }
    }
}

fn has_two_element_circuit(m: &Matroid) -> bool {
    m.circuits().iter().any(|&c| popcount(c) == 2)
}

#[test]
fn parallel_and_series_pairs_and_repeated_loops_vanish() {
    for m in upto(6) {
        let forced = has_two_element_circuit(m)
            || has_two_element_circuit(&m.dual())
            || popcount(m.loops()) >= 2
            || popcount(m.coloops()) >= 2;
        if forced {
            assert!(has_odd_automorphism(m), "{m:?}");
            assert!(normalize(m).is_none());
        }
    }
}

#[test]
fn differentials_respect_bidegrees() {
    let all = ComplexSpec::all();
    for kind in DifferentialKind::ALL {
        for n in 1..=7 {
            let cols = chain_basis(n, &all, source()).unwrap();
            let rows = chain_basis(n - 1, &all, source()).unwrap();
            let d = differential_matrix(kind, n, &all, source()).unwrap();
            for &(i, j, _) in d.entries() {
                let (src, dst) = (bidegree_of(&cols.keys()[j]), bidegree_of(&rows.keys()[i]));
                assert_eq!(src.total(), dst.total() + 1);
                if let Some(drop) = kind.rank_drop() {
                    assert_eq!(dst.r + drop, src.r, "{kind}");
                }
            }
        }
    }
}

#[test]
fn boundary_ranks_fit_in_chain_groups() {
    let all = ComplexSpec::all();
    for kind in DifferentialKind::ALL {
        for n in 0..=6 {
            let dim = chain_basis(n, &all, source()).unwrap().len();
            let out = rank_exact(&differential_matrix(kind, n, &all, source()).unwrap());
            let inc = rank_exact(&differential_matrix(kind, n + 1, &all, source()).unwrap());
            assert!(out + inc <= dim, "{kind} n={n}");
        }
    }
}

#[test]
fn deletion_cycles_are_simple() {
    for n in 1..=7 {
        for k in chain_basis(n, &ComplexSpec::all(), source()).unwrap().keys() {
            if apply_differential(DifferentialKind::Del, &ClassVector::basis(k)).is_zero() {
                assert!(k.representative().is_simple(), "{k}");
            }
        }
    }
}

#[test]
fn deletion_keeps_loopless_sums_disconnected() {
    for spec in ["loopless", "simple"] {
        let spec = ComplexSpec::parse(spec).unwrap();
        for n in 1..=7 {
            for k in chain_basis(n, &spec, source()).unwrap().keys() {
                let rep = k.representative();
                if rep.is_connected() {
                    continue;
                }
                for (child, _) in children(DifferentialKind::Del, &rep) {
                    assert!(!child.is_connected(), "{k}");
                }
            }
        }
    }
}

#[test]
fn coproduct_preserves_bidegree() {
    for n in 0..=7 {
        for k in chain_basis(n, &ComplexSpec::all(), source()).unwrap().keys() {
            let want = bidegree_of(k);
            for (keys, _) in coproduct(&ClassVector::basis(k)).terms() {
                let (a, b) = (bidegree_of(&keys[0]), bidegree_of(&keys[1]));
                assert_eq!((a.k + b.k, a.r + b.r), (want.k, want.r));
            }
        }
    }
}
