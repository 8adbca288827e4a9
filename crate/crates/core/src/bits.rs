//! Small bit-twiddling helpers for ground sets of at most 16 elements.
//!
//! Element `j` (1-based) of a ground set is stored as bit `j - 1`.

/// A subset of the ground set `[n]`, `n <= 16`.
pub type Mask = u16;

/// Largest supported ground set.
pub const MAX_ELEMENTS: usize = 16;

#[inline]
pub fn full_mask(n: usize) -> Mask {
    debug_assert!(n <= MAX_ELEMENTS);
    if n == MAX_ELEMENTS {
        Mask::MAX
    } else {
        ((1u32 << n) - 1) as Mask
    }
}

#[inline]
pub fn popcount(m: Mask) -> usize {
    m.count_ones() as usize
}

/// Iterates the zero-based bit positions set in `m`, ascending.
pub fn bits(m: Mask) -> impl Iterator<Item = usize> {
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

/// 1-based element labels of a mask, ascending.
pub fn elements(m: Mask) -> Vec<usize> {
    bits(m).map(|b| b + 1).collect()
}

/// Mask of a list of 1-based elements.
pub fn mask_of(elements: &[usize]) -> Mask {
    elements.iter().fold(0, |acc, &e| acc | (1 << (e - 1)))
}

/// Packs the bits of `m` that lie in `keep` into the low bits, preserving order.
///
/// This is the order-preserving relabeling `keep -> [|keep|]`.
#[inline]
pub fn compress(m: Mask, keep: Mask) -> Mask {
    let mut out: Mask = 0;
    let mut pos = 0;
    for b in bits(keep) {
        if m & (1 << b) != 0 {
            out |= 1 << pos;
        }
        pos += 1;
    }
    out
}

/// Removes bit `b` and shifts the higher bits down by one.
#[inline]
pub fn drop_bit(m: Mask, b: usize) -> Mask {
    let low = ((1u32 << b) - 1) as Mask;
    let m32 = m as u32;
    ((m32 & low as u32) | ((m32 >> 1) & !(low as u32))) as Mask
}

/// All `k`-subsets of `[n]` as masks, in increasing numeric order (Gosper's hack).
pub fn k_subsets(n: usize, k: usize) -> Vec<Mask> {
    if k > n {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit: u32 = 1 << n;
    let mut out = Vec::new();
    let mut s: u32 = (1 << k) - 1;
    while s < limit {
        out.push(s as Mask);
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

/// Membership table over all `2^n` subsets.
#[derive(Clone, Debug)]
pub struct SubsetTable {
    words: Vec<u64>,
}

impl SubsetTable {
    pub fn new(n: usize) -> Self {
        let len = ((1usize << n) + 63) / 64;
        SubsetTable { words: vec![0; len] }
    }

    pub fn from_masks(n: usize, masks: &[Mask]) -> Self {
        let mut t = Self::new(n);
        for &m in masks {
            t.insert(m);
        }
        t
    }

    #[inline]
    pub fn insert(&mut self, m: Mask) {
        self.words[m as usize >> 6] |= 1 << (m as usize & 63);
    }

    #[inline]
    pub fn contains(&self, m: Mask) -> bool {
        self.words[m as usize >> 6] >> (m as usize & 63) & 1 == 1
    }
}

/// Sign of the permutation that lists the elements of `s` first and the rest
/// of `[n]` after, each block in increasing order.
pub fn shuffle_sign(s: Mask, n: usize) -> i32 {
    // inversions: pairs (i in S, j not in S) with j < i
    let comp = full_mask(n) & !s;
    let mut inversions = 0usize;
    for i in bits(s) {
        let below = ((1u32 << i) - 1) as Mask;
        inversions += popcount(comp & below);
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compress_is_order_preserving() {
        // keep {2,4,5} (bits 1,3,4); m = {2,5}
        assert_eq!(compress(0b10010, 0b11010), 0b101);
        assert_eq!(drop_bit(0b1011, 1), 0b101);
        assert_eq!(drop_bit(0b1011, 0), 0b101);
        assert_eq!(drop_bit(0b1011, 3), 0b011);
    }

    #[test]
    fn k_subsets_counts() {
        assert_eq!(k_subsets(6, 3).len(), 20);
        assert_eq!(k_subsets(4, 0), vec![0]);
        assert_eq!(k_subsets(16, 16), vec![Mask::MAX]);
        assert!(k_subsets(3, 4).is_empty());
        let s = k_subsets(5, 2);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn shuffle_signs() {
        assert_eq!(shuffle_sign(0, 4), 1);
        assert_eq!(shuffle_sign(0b1111, 4), 1);
        // S = {2}: (2,1,3) is one transposition
        assert_eq!(shuffle_sign(0b10, 3), -1);
        // S = {3}: (3,1,2) is a 3-cycle
        assert_eq!(shuffle_sign(0b100, 3), 1);
    }
}
