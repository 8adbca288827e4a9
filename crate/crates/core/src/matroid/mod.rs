//! Matroids stored by their basis families.

mod graph;
mod minors;

pub use graph::Graph;
pub use minors::{fano, fano_dual, has_minor, is_binary_by_minor};

use std::fmt;

use crate::bits::{
    bits, compress, drop_bit, full_mask, k_subsets, popcount, Mask, SubsetTable, MAX_ELEMENTS,
};
use crate::canonical::Permutation;
use crate::error::{Error, Result};

/// A matroid on the ground set `1..=n`, given by its sorted basis masks.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Matroid {
    n: u8,
    rank: u8,
    bases: Vec<Mask>,
}

impl fmt::Debug for Matroid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Matroid(n={}, r={}, bases={:?})", self.n, self.rank, self.bases)
    }
}

impl Matroid {
    /// Validates a basis family. Duplicates are removed and the masks sorted.
    pub fn from_bases(n: usize, r: usize, bases: &[Mask]) -> Result<Matroid> {
        if n > MAX_ELEMENTS {
            return Err(Error::TooManyElements(n));
        }
        if r > n {
            return Err(Error::InvalidRank { r, n });
        }
        if bases.is_empty() {
            return Err(Error::EmptyBases);
        }
        let full = full_mask(n);
        for &b in bases {
            if b & !full != 0 {
                return Err(Error::BitOutOfRange { mask: b, n });
            }
            if popcount(b) != r {
                return Err(Error::BadPopcount { mask: b, popcount: popcount(b), rank: r });
            }
        }
        let mut sorted = bases.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        check_exchange(n, &sorted)?;
        Ok(Matroid { n: n as u8, rank: r as u8, bases: sorted })
    }

    /// Builds a matroid from masks already known to be a sorted, valid basis family.
    pub fn from_sorted_bases_unchecked(n: usize, r: usize, bases: Vec<Mask>) -> Matroid {
        debug_assert!(bases.windows(2).all(|w| w[0] < w[1]));
        debug_assert!(bases.iter().all(|&b| popcount(b) == r));
        Matroid { n: n as u8, rank: r as u8, bases }
    }

    fn from_unsorted(n: usize, r: usize, mut bases: Vec<Mask>) -> Matroid {
        bases.sort_unstable();
        bases.dedup();
        Matroid::from_sorted_bases_unchecked(n, r, bases)
    }

    /// The matroid on the empty ground set; unit of the direct sum.
    pub fn empty() -> Matroid {
        Matroid { n: 0, rank: 0, bases: vec![0] }
    }

    pub fn uniform(r: usize, n: usize) -> Result<Matroid> {
        if n > MAX_ELEMENTS {
            return Err(Error::TooManyElements(n));
        }
        if r > n {
            return Err(Error::InvalidRank { r, n });
        }
        Ok(Matroid::from_sorted_bases_unchecked(n, r, k_subsets(n, r)))
    }

    /// Column matroid over GF(2). Each row is a slice of 0/1 entries.
    pub fn from_f2_matrix<R: AsRef<[u8]>>(rows: &[R]) -> Result<Matroid> {
        let n = rows.first().map(|r| r.as_ref().len()).unwrap_or(0);
        if n == 0 || rows.iter().any(|r| r.as_ref().len() != n) {
            return Err(Error::RaggedMatrix);
        }
        if n > MAX_ELEMENTS {
            return Err(Error::TooManyElements(n));
        }
        if rows.len() > 64 {
            return Err(Error::RaggedMatrix);
        }
        let mut columns = vec![0u64; n];
        for (i, row) in rows.iter().enumerate() {
            for (j, &x) in row.as_ref().iter().enumerate() {
                match x {
                    0 => {}
                    1 => columns[j] |= 1 << i,
                    other => return Err(Error::BadMatrixEntry(other)),
                }
            }
        }
        Ok(Matroid::from_f2_columns(&columns))
    }

    /// Column matroid over GF(2) of column vectors packed as bit words.
    pub fn from_f2_columns(columns: &[u64]) -> Matroid {
        let n = columns.len();
        let r = f2_rank(columns.iter().copied());
        let bases = k_subsets(n, r)
            .into_iter()
            .filter(|&s| f2_rank(bits(s).map(|j| columns[j])) == r)
            .collect();
        Matroid::from_sorted_bases_unchecked(n, r, bases)
    }

    /// Size of the ground set.
    #[inline]
    pub fn size(&self) -> usize {
        self.n as usize
    }

    #[inline]
    pub fn rank(&self) -> usize {
        self.rank as usize
    }

    #[inline]
    pub fn nullity(&self) -> usize {
        self.size() - self.rank()
    }

    #[inline]
    pub fn bases(&self) -> &[Mask] {
        &self.bases
    }

    pub fn into_bases(self) -> Vec<Mask> {
        self.bases
    }

    #[inline]
    pub fn ground(&self) -> Mask {
        full_mask(self.size())
    }

    pub fn is_basis(&self, s: Mask) -> bool {
        self.bases.binary_search(&s).is_ok()
    }

    /// Elements in no basis.
    pub fn loops(&self) -> Mask {
        let union = self.bases.iter().fold(0, |acc, &b| acc | b);
        self.ground() & !union
    }

    /// Elements in every basis.
    pub fn coloops(&self) -> Mask {
        self.bases.iter().fold(self.ground(), |acc, &b| acc & b)
    }

    pub fn is_loop(&self, x: usize) -> bool {
        self.loops() >> (x - 1) & 1 == 1
    }

    pub fn is_coloop(&self, x: usize) -> bool {
        self.coloops() >> (x - 1) & 1 == 1
    }

    pub fn is_loopless(&self) -> bool {
        self.loops() == 0
    }

    pub fn is_coloopless(&self) -> bool {
        self.coloops() == 0
    }

    /// Loopless and every pair of elements independent.
    pub fn is_simple(&self) -> bool {
        if !self.is_loopless() {
            return false;
        }
        let n = self.size();
        if n < 2 {
            return true;
        }
        if self.rank() < 2 {
            return false;
        }
        let mut covered = SubsetTable::new(n);
        for &b in &self.bases {
            for i in bits(b) {
                for j in bits(b) {
                    if i < j {
                        covered.insert((1 << i) | (1 << j));
                    }
                }
            }
        }
        k_subsets(n, 2).into_iter().all(|p| covered.contains(p))
    }

    pub fn is_cosimple(&self) -> bool {
        self.dual().is_simple()
    }

    /// Rank of a subset: the largest intersection with a basis.
    pub fn rank_of(&self, s: Mask) -> usize {
        self.bases.iter().map(|&b| popcount(b & s)).max().unwrap_or(0)
    }

    pub fn is_independent(&self, s: Mask) -> bool {
        self.bases.iter().any(|&b| b & s == s)
    }

    /// Membership table of all independent sets.
    pub fn independent_sets(&self) -> SubsetTable {
        let mut table = SubsetTable::new(self.size());
        for &b in &self.bases {
            // every submask of b
            let mut s = b;
            loop {
                table.insert(s);
                if s == 0 {
                    break;
                }
                s = (s - 1) & b;
            }
        }
        table
    }

    fn check_element(&self, x: usize) -> Result<()> {
        if x == 0 || x > self.size() {
            Err(Error::ElementOutOfRange { element: x, n: self.size() })
        } else {
            Ok(())
        }
    }

    fn check_subset(&self, s: Mask) -> Result<()> {
        if s & !self.ground() != 0 {
            let bad = bits(s & !self.ground()).next().unwrap() + 1;
            Err(Error::ElementOutOfRange { element: bad, n: self.size() })
        } else {
            Ok(())
        }
    }

    /// `M \ x`, survivors relabeled order-preservingly onto `1..n-1`.
    pub fn delete(&self, x: usize) -> Result<Matroid> {
        self.check_element(x)?;
        Ok(self.delete_unchecked(x - 1))
    }

    pub(crate) fn delete_unchecked(&self, b: usize) -> Matroid {
        let bit = 1 << b;
        let n = self.size() - 1;
        let keep: Vec<Mask> = self.bases.iter().copied().filter(|&m| m & bit == 0).collect();
        if keep.is_empty() {
            // coloop: rank drops
            let bases = self.bases.iter().map(|&m| drop_bit(m, b)).collect();
            Matroid::from_unsorted(n, self.rank() - 1, bases)
        } else {
            // drop_bit is monotone on masks avoiding bit b
            let bases = keep.into_iter().map(|m| drop_bit(m, b)).collect();
            Matroid::from_sorted_bases_unchecked(n, self.rank(), bases)
        }
    }

    /// `M / x`, survivors relabeled order-preservingly onto `1..n-1`.
    pub fn contract(&self, x: usize) -> Result<Matroid> {
        self.check_element(x)?;
        Ok(self.contract_unchecked(x - 1))
    }

    pub(crate) fn contract_unchecked(&self, b: usize) -> Matroid {
        let bit = 1 << b;
        let n = self.size() - 1;
        let through: Vec<Mask> = self.bases.iter().copied().filter(|&m| m & bit != 0).collect();
        if through.is_empty() {
            // loop: contraction equals deletion
            let bases = self.bases.iter().map(|&m| drop_bit(m, b)).collect();
            Matroid::from_sorted_bases_unchecked(n, self.rank(), bases)
        } else {
            let bases = through.into_iter().map(|m| drop_bit(m & !bit, b)).collect();
            Matroid::from_unsorted(n, self.rank() - 1, bases)
        }
    }

    /// `M | S`, relabeled order-preservingly onto `1..|S|`.
    pub fn restrict(&self, s: Mask) -> Result<Matroid> {
        self.check_subset(s)?;
        Ok(self.restrict_unchecked(s))
    }

    pub(crate) fn restrict_unchecked(&self, s: Mask) -> Matroid {
        let r = self.rank_of(s);
        let bases = self
            .bases
            .iter()
            .filter(|&&b| popcount(b & s) == r)
            .map(|&b| compress(b & s, s))
            .collect();
        Matroid::from_unsorted(popcount(s), r, bases)
    }

    /// `M / S`, relabeled order-preservingly onto `1..n-|S|`.
    pub fn contract_set(&self, s: Mask) -> Result<Matroid> {
        self.check_subset(s)?;
        Ok(self.contract_set_unchecked(s))
    }

    pub(crate) fn contract_set_unchecked(&self, s: Mask) -> Matroid {
        let rs = self.rank_of(s);
        let rest = self.ground() & !s;
        let bases = self
            .bases
            .iter()
            .filter(|&&b| popcount(b & s) == rs)
            .map(|&b| compress(b & rest, rest))
            .collect();
        Matroid::from_unsorted(popcount(rest), self.rank() - rs, bases)
    }

    /// `M \ S`, the restriction to the complement of `S`.
    pub fn delete_set(&self, s: Mask) -> Result<Matroid> {
        self.check_subset(s)?;
        Ok(self.restrict_unchecked(self.ground() & !s))
    }

    pub fn dual(&self) -> Matroid {
        let g = self.ground();
        let bases = self.bases.iter().map(|&b| g & !b).collect();
        Matroid::from_unsorted(self.size(), self.nullity(), bases)
    }

    /// `M + Q` with the elements of `Q` shifted past those of `M`.
    pub fn direct_sum(&self, q: &Matroid) -> Matroid {
        let n = self.size() + q.size();
        assert!(n <= MAX_ELEMENTS, "direct sum exceeds {MAX_ELEMENTS} elements");
        let shift = self.size();
        let mut bases = Vec::with_capacity(self.bases.len() * q.bases.len());
        // the shifted part dominates the order, so the result is already sorted
        for &bq in &q.bases {
            for &bm in &self.bases {
                bases.push(bm | (bq << shift));
            }
        }
        Matroid::from_sorted_bases_unchecked(n, self.rank() + q.rank(), bases)
    }

    /// Applies `sigma`: element `i` goes to `sigma(i)`.
    pub fn relabel(&self, sigma: &Permutation) -> Matroid {
        assert_eq!(sigma.len(), self.size());
        let bases = self.bases.iter().map(|&b| sigma.apply_mask(b)).collect();
        Matroid::from_unsorted(self.size(), self.rank(), bases)
    }

    /// All inclusion-minimal dependent sets.
    pub fn circuits(&self) -> Vec<Mask> {
        let n = self.size();
        let indep = self.independent_sets();
        let mut out = Vec::new();
        for s in 1..=(full_mask(n) as u32) {
            let s = s as Mask;
            if popcount(s) > self.rank() + 1 || indep.contains(s) {
                continue;
            }
            if bits(s).all(|b| indep.contains(s & !(1 << b))) {
                out.push(s);
            }
        }
        out
    }

    /// Connected components as element masks, ordered by smallest element.
    pub fn components(&self) -> Vec<Mask> {
        let n = self.size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut x = x;
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for c in self.circuits() {
            let mut it = bits(c);
            let first = it.next().unwrap();
            for b in it {
                let (ra, rb) = (find(&mut parent, first), find(&mut parent, b));
                if ra != rb {
                    parent[ra.max(rb)] = ra.min(rb);
                }
            }
        }
        let mut comps: Vec<Mask> = Vec::new();
        let mut root_of = vec![usize::MAX; n];
        for x in 0..n {
            let r = find(&mut parent, x);
            if root_of[r] == usize::MAX {
                root_of[r] = comps.len();
                comps.push(0);
            }
            comps[root_of[r]] |= 1 << x;
        }
        comps
    }

    /// At least one element and a single component.
    pub fn is_connected(&self) -> bool {
        let n = self.size();
        if n == 0 {
            return false;
        }
        if n == 1 {
            return true;
        }
        self.components().len() == 1
    }

    /// Representable over GF(2).
    pub fn is_binary(&self) -> bool {
        minors::is_binary(self)
    }

    /// Representable over GF(3): no `U(2,5)`, `U(3,5)`, `F7` or `F7*` minor.
    pub fn is_ternary(&self) -> bool {
        minors::is_ternary(self)
    }

    /// Binary with no `F7` or `F7*` minor.
    pub fn is_regular(&self) -> bool {
        minors::is_regular(self)
    }

    /// Regular with no `M*(K5)` or `M*(K3,3)` minor.
    pub fn is_graphic(&self) -> bool {
        minors::is_graphic(self)
    }

    pub fn is_cographic(&self) -> bool {
        self.dual().is_graphic()
    }
}

/// Checks the exchange axiom on a sorted, deduplicated family of equal-size masks.
pub(crate) fn check_exchange(n: usize, bases: &[Mask]) -> Result<()> {
    let table = SubsetTable::from_masks(n, bases);
    for &s in bases {
        for &t in bases {
            if s == t {
                continue;
            }
            for x in bits(s & !t) {
                let without = s & !(1 << x);
                if !bits(t & !s).any(|y| table.contains(without | (1 << y))) {
                    return Err(Error::ExchangeViolation { s, t, x: x + 1 });
                }
            }
        }
    }
    Ok(())
}

/// Rank over GF(2) of a set of packed column vectors.
pub(crate) fn f2_rank(columns: impl Iterator<Item = u64>) -> usize {
    let mut basis = [0u64; 64];
    let mut rank = 0;
    for mut v in columns {
        while v != 0 {
            let p = 63 - v.leading_zeros() as usize;
            if basis[p] == 0 {
                basis[p] = v;
                rank += 1;
                break;
            }
            v ^= basis[p];
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bits::mask_of;

    #[test]
    fn from_bases_examples() {
        let loop1 = Matroid::from_bases(1, 0, &[0]).unwrap();
        assert_eq!(loop1, Matroid::uniform(0, 1).unwrap());
        assert_eq!(loop1.loops(), 1);

        let u24 = Matroid::from_bases(4, 2, &[3, 5, 6, 9, 10, 12]).unwrap();
        assert_eq!(u24, Matroid::uniform(2, 4).unwrap());

        let m = Matroid::from_bases(2, 1, &[1]).unwrap();
        assert_eq!(m.loops(), 0b10);
        assert_eq!(m.coloops(), 0b01);
    }

    #[test]
    fn from_bases_errors() {
        assert_eq!(Matroid::from_bases(3, 1, &[]), Err(Error::EmptyBases));
        assert!(matches!(Matroid::from_bases(3, 1, &[3]), Err(Error::BadPopcount { .. })));
        assert!(matches!(Matroid::from_bases(2, 1, &[4]), Err(Error::BitOutOfRange { .. })));
        // {12, 34}: exchange 1 out of 12 needs 13 or 14
        let err = Matroid::from_bases(4, 2, &[0b0011, 0b1100]).unwrap_err();
        assert!(matches!(err, Error::ExchangeViolation { s: 0b0011, t: 0b1100, x: 1 }));
        assert!(matches!(Matroid::uniform(3, 2), Err(Error::InvalidRank { .. })));
    }

    #[test]
    fn uniform_and_small() {
        assert_eq!(Matroid::uniform(2, 4).unwrap().bases().len(), 6);
        assert_eq!(Matroid::uniform(2, 4).unwrap().nullity(), 2);
        assert!(Matroid::uniform(1, 1).unwrap().is_coloop(1));
        assert!(!Matroid::uniform(1, 2).unwrap().is_simple());
        assert!(!Matroid::uniform(0, 1).unwrap().is_loopless());
        assert!(Matroid::uniform(2, 3).unwrap().is_simple());
    }

    #[test]
    fn f2_matrix_examples() {
        let i2 = Matroid::from_f2_matrix(&[[1u8, 0], [0, 1]]).unwrap();
        assert_eq!(i2, Matroid::uniform(2, 2).unwrap());
        let with_zero = Matroid::from_f2_matrix(&[[1u8, 0, 0], [0, 1, 0]]).unwrap();
        assert_eq!(with_zero.loops(), 0b100);
        assert_eq!(with_zero.rank(), 2);
        assert_eq!(
            Matroid::from_f2_matrix(&[vec![1u8, 0], vec![1u8]]),
            Err(Error::RaggedMatrix)
        );
        assert_eq!(Matroid::from_f2_matrix(&[[2u8]]), Err(Error::BadMatrixEntry(2)));
    }

    #[test]
    fn fano_by_brute_force() {
        // oracle: a 3-subset of nonzero vectors of GF(2)^3 is a basis unless it xors to 0
        let f7 = fano();
        let expected: Vec<Mask> = k_subsets(7, 3)
            .into_iter()
            .filter(|&s| {
                let v: Vec<usize> = bits(s).map(|b| b + 1).collect();
                v[0] ^ v[1] ^ v[2] != 0
            })
            .collect();
        assert_eq!(f7.bases(), &expected[..]);
        assert_eq!(f7.bases().len(), 28);
    }

    #[test]
    fn minors_relabel_order_preserving() {
        let u24 = Matroid::uniform(2, 4).unwrap();
        assert_eq!(u24.delete(4).unwrap(), Matroid::uniform(2, 3).unwrap());
        assert_eq!(u24.contract(4).unwrap(), Matroid::uniform(1, 3).unwrap());
        assert_eq!(Matroid::uniform(0, 1).unwrap().contract(1).unwrap(), Matroid::empty());
        assert!(matches!(u24.delete(5), Err(Error::ElementOutOfRange { element: 5, n: 4 })));
        assert!(matches!(u24.delete(0), Err(Error::ElementOutOfRange { .. })));
        // deleting element 1 of a loop-plus-coloop relabels 2 to 1
        let m = Matroid::from_bases(2, 1, &[0b10]).unwrap();
        assert_eq!(m.delete(1).unwrap(), Matroid::uniform(1, 1).unwrap());
    }

    #[test]
    fn contract_set_matches_iterated() {
        let k4 = Graph::complete(4).matroid();
        for s in 0..64u16 {
            let mut it = k4.clone();
            for e in bits(s).collect::<Vec<_>>().into_iter().rev() {
                it = it.contract(e + 1).unwrap();
            }
            assert_eq!(k4.contract_set(s).unwrap(), it, "S={s:#b}");
        }
    }

    #[test]
    fn dual_and_sum() {
        assert_eq!(Matroid::uniform(2, 5).unwrap().dual(), Matroid::uniform(3, 5).unwrap());
        assert_eq!(Matroid::uniform(0, 1).unwrap().dual(), Matroid::uniform(1, 1).unwrap());
        let s = Matroid::uniform(1, 1).unwrap().direct_sum(&Matroid::uniform(0, 1).unwrap());
        assert_eq!(s.bases(), &[1]);
        let m = Matroid::uniform(2, 3).unwrap();
        assert_eq!(Matroid::empty().direct_sum(&m), m);
        assert_eq!(m.direct_sum(&Matroid::empty()), m);
        assert_eq!(m.direct_sum(&Matroid::uniform(1, 2).unwrap()).rank(), 3);
        let sum = Matroid::uniform(1, 2).unwrap().direct_sum(&Matroid::uniform(1, 2).unwrap());
        assert!(Matroid::from_bases(4, 2, sum.bases()).is_ok());
    }

    #[test]
    fn circuits_and_components() {
        assert_eq!(Matroid::uniform(1, 2).unwrap().circuits(), vec![0b11]);
        assert_eq!(Matroid::uniform(0, 1).unwrap().circuits(), vec![0b1]);
        let k4 = Graph::complete(4).matroid();
        assert_eq!(k4.circuits().len(), 7);
        assert!(k4.is_connected());
        let c = Matroid::uniform(1, 1).unwrap();
        assert_eq!(c.direct_sum(&c).components(), vec![0b01, 0b10]);
        assert!(!Matroid::empty().is_connected());
        assert!(Matroid::uniform(0, 1).unwrap().is_connected());
    }

    #[test]
    fn k4_matroid_facts() {
        let k4 = Graph::complete(4).matroid();
        assert_eq!((k4.size(), k4.rank(), k4.bases().len()), (6, 3, 16));
        assert_eq!(k4.loops(), 0);
        assert_eq!(k4.coloops(), 0);
        assert!(k4.is_simple());
        let d = k4.dual();
        assert_eq!((d.size(), d.rank(), d.bases().len()), (6, 3, 16));
        assert!(Matroid::from_bases(6, 3, d.bases()).is_ok());
        assert_eq!(mask_of(&[1, 2, 3]), 0b111);
    }
}
