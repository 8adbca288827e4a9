//! Canonical labeling, automorphisms and permutation signs.
//!
//! The search is a plain individualization-refinement tree. Elements are split
//! by how the bases through them meet the current cells; the first leaf `zeta`
//! and a stabilizer-chain sweep over the first path yield generators of the
//! full automorphism group, which then prune the search for the least
//! certificate `(trace, sorted relabeled bases)`.

use std::fmt;
use std::sync::Arc;

use crate::bits::{bits, popcount, Mask};
use crate::matroid::Matroid;

/// A bijection of `1..=n`, stored zero-based.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Permutation {
    images: Vec<u8>,
}

impl Permutation {
    pub fn identity(n: usize) -> Permutation {
        Permutation { images: (0..n as u8).collect() }
    }

    /// From one-based images: `images[i - 1]` is the image of `i`.
    pub fn from_images(images: &[usize]) -> Option<Permutation> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in images {
            if x == 0 || x > n || seen[x - 1] {
                return None;
            }
            seen[x - 1] = true;
        }
        Some(Permutation { images: images.iter().map(|&x| (x - 1) as u8).collect() })
    }

    pub(crate) fn from_zero_based(images: Vec<u8>) -> Permutation {
        Permutation { images }
    }

    pub fn len(&self) -> usize {
        self.images.len()
    }

    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// One-based image of the one-based element `i`.
    pub fn image(&self, i: usize) -> usize {
        self.images[i - 1] as usize + 1
    }

    /// One-based images.
    pub fn images(&self) -> Vec<usize> {
        self.images.iter().map(|&x| x as usize + 1).collect()
    }

    #[inline]
    pub(crate) fn image0(&self, b: usize) -> usize {
        self.images[b] as usize
    }

    pub fn apply_mask(&self, m: Mask) -> Mask {
        bits(m).fold(0, |acc, b| acc | (1 << self.images[b]))
    }

    /// `self ∘ other`: first `other`, then `self`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation { images: other.images.iter().map(|&x| self.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0u8; self.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u8;
        }
        Permutation { images: inv }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i == x as usize)
    }

    pub fn sign(&self) -> i32 {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut transpositions = 0;
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            transpositions += len - 1;
        }
        if transpositions % 2 == 0 {
            1
        } else {
            -1
        }
    }
}

pub fn perm_sign(p: &Permutation) -> i32 {
    p.sign()
}

/// Isomorphism-class label: size, rank, the bases of the canonical
/// representative, and whether the class has an odd automorphism.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey {
    n: u8,
    r: u8,
    encoding: Arc<[Mask]>,
    odd_auto: bool,
}

impl CanonicalKey {
    pub fn size(&self) -> usize {
        self.n as usize
    }

    pub fn rank(&self) -> usize {
        self.r as usize
    }

    pub fn nullity(&self) -> usize {
        self.size() - self.rank()
    }

    /// Sorted basis masks of the canonical representative.
    pub fn encoding(&self) -> &[Mask] {
        &self.encoding
    }

    pub fn odd_auto(&self) -> bool {
        self.odd_auto
    }

    /// The canonical representative itself.
    pub fn representative(&self) -> Matroid {
        Matroid::from_sorted_bases_unchecked(self.size(), self.rank(), self.encoding.to_vec())
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `n:r:` followed by the representative's basis masks in hex, dot separated.
impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:", self.n, self.r)?;
        for (i, b) in self.encoding.iter().enumerate() {
            if i > 0 {
                write!(f, ".")?;
            }
            write!(f, "{b:x}")?;
        }
        Ok(())
    }
}

/// Canonical key of `m` and a relabeling `sigma` with `sigma(m)` the representative.
pub fn canonical_form(m: &Matroid) -> (CanonicalKey, Permutation) {
    let mut s = Search::new(m);
    s.find_automorphisms(false);
    let odd = s.gens.iter().any(|g| g.sign() < 0);
    let (enc, lab) = s.canonical_leaf();
    let key = CanonicalKey { n: m.size() as u8, r: m.rank() as u8, encoding: enc.into(), odd_auto: odd };
    (key, lab)
}

/// Like [`canonical_form`], but returns `None` as soon as an odd automorphism shows up.
pub(crate) fn canonical_form_even(m: &Matroid) -> Option<(CanonicalKey, Permutation)> {
    let mut s = Search::new(m);
    if s.find_automorphisms(true) {
        return None;
    }
    let (enc, lab) = s.canonical_leaf();
    let key = CanonicalKey { n: m.size() as u8, r: m.rank() as u8, encoding: enc.into(), odd_auto: false };
    Some((key, lab))
}

/// A generating set of the automorphism group.
pub fn automorphism_generators(m: &Matroid) -> Vec<Permutation> {
    let mut s = Search::new(m);
    s.find_automorphisms(false);
    s.gens
}

pub fn has_odd_automorphism(m: &Matroid) -> bool {
    Search::new(m).find_automorphisms(true)
}

/// A permutation carrying the bases of `a` onto those of `b`, if one exists.
pub fn iso_witness(a: &Matroid, b: &Matroid) -> Option<Permutation> {
    if a.size() != b.size() || a.rank() != b.rank() || a.bases().len() != b.bases().len() {
        return None;
    }
    let (ka, sa) = canonical_form(a);
    let (kb, sb) = canonical_form(b);
    if ka.encoding != kb.encoding {
        return None;
    }
    Some(sb.inverse().compose(&sa))
}

/// Order of the group generated by `gens`, by orbit enumeration of its elements.
/// Only meant for small groups.
pub fn group_order(n: usize, gens: &[Permutation]) -> usize {
    use std::collections::HashSet;
    let id = Permutation::identity(n);
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    seen.insert(id.images.clone());
    let mut frontier = vec![id];
    while let Some(p) = frontier.pop() {
        for g in gens {
            let q = g.compose(&p);
            if seen.insert(q.images.clone()) {
                frontier.push(q);
            }
        }
    }
    seen.len()
}

type Cells = Vec<Vec<u8>>;

struct Search<'a> {
    m: &'a Matroid,
    n: usize,
    width: usize,
    /// traces along the first path, one per node including the leaf
    zeta_trace: Vec<u64>,
    zeta_enc: Vec<Mask>,
    zeta_lab: Permutation,
    gens: Vec<Permutation>,
}

#[inline]
fn mix(h: u64, x: u64) -> u64 {
    let mut z = (h ^ x).wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn is_discrete(cells: &Cells) -> bool {
    cells.iter().all(|c| c.len() == 1)
}

fn target_cell(cells: &Cells) -> Option<usize> {
    cells.iter().position(|c| c.len() > 1)
}

fn individualize(cells: &Cells, t: usize, y: u8) -> Cells {
    let mut out = Vec::with_capacity(cells.len() + 1);
    out.extend_from_slice(&cells[..t]);
    out.push(vec![y]);
    out.push(cells[t].iter().copied().filter(|&e| e != y).collect());
    out.extend_from_slice(&cells[t + 1..]);
    out
}

/// Orbit representative of every element under the group generated by `gens`.
fn orbits(n: usize, gens: &[&Permutation]) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for g in gens {
        for i in 0..n {
            let (a, b) = (find(&mut parent, i), find(&mut parent, g.image0(i)));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

impl<'a> Search<'a> {
    fn new(m: &'a Matroid) -> Search<'a> {
        Search {
            m,
            n: m.size(),
            width: m.rank() + 1,
            zeta_trace: Vec::new(),
            zeta_enc: Vec::new(),
            zeta_lab: Permutation::identity(0),
            gens: Vec::new(),
        }
    }

    /// Splits cells until stable. Returns a hash of the splitting history, which
    /// depends only on the isomorphism type of `(m, cells)`.
    fn refine(&self, cells: &mut Cells) -> u64 {
        let w = self.width;
        let mut h = 0x51_7c_c1_b7_27_22_0a_95u64;
        let mut sig: Vec<u32> = Vec::new();
        let mut inter: Vec<usize> = Vec::new();
        loop {
            if is_discrete(cells) {
                break;
            }
            let k = cells.len();
            let stride = k * w;
            let masks: Vec<Mask> =
                cells.iter().map(|c| c.iter().fold(0, |a, &e| a | (1 << e))).collect();
            let active: Mask = cells
                .iter()
                .zip(&masks)
                .filter(|(c, _)| c.len() > 1)
                .fold(0, |a, (_, &m)| a | m);
            sig.clear();
            sig.resize(self.n * stride, 0);
            inter.clear();
            inter.resize(k, 0);
            for &b in self.m.bases() {
                if b & active == 0 {
                    continue;
                }
                for t in 0..k {
                    inter[t] = popcount(b & masks[t]);
                }
                for e in bits(b & active) {
                    let row = &mut sig[e * stride..(e + 1) * stride];
                    for t in 0..k {
                        row[t * w + inter[t]] += 1;
                    }
                }
            }
            let row = |e: u8| &sig[e as usize * stride..(e as usize + 1) * stride];
            let mut next: Cells = Vec::with_capacity(self.n);
            let mut split = false;
            for (t, cell) in cells.iter().enumerate() {
                if cell.len() == 1 {
                    next.push(cell.clone());
                    continue;
                }
                let mut sorted = cell.clone();
                sorted.sort_by(|&a, &b| row(a).cmp(row(b)));
                let before = next.len();
                let mut start = 0;
                for i in 1..=sorted.len() {
                    if i == sorted.len() || row(sorted[i]) != row(sorted[start]) {
                        h = mix(h, ((t as u64) << 32) | (i - start) as u64);
                        for &x in row(sorted[start]) {
                            h = mix(h, x as u64);
                        }
                        next.push(sorted[start..i].to_vec());
                        start = i;
                    }
                }
                split |= next.len() - before > 1;
            }
            *cells = next;
            if !split {
                break;
            }
        }
        mix(h, cells.len() as u64)
    }

    fn leaf(&self, cells: &Cells) -> (Vec<Mask>, Permutation) {
        let mut images = vec![0u8; self.n];
        for (pos, c) in cells.iter().enumerate() {
            images[c[0] as usize] = pos as u8;
        }
        let lab = Permutation::from_zero_based(images);
        let mut enc: Vec<Mask> = self.m.bases().iter().map(|&b| lab.apply_mask(b)).collect();
        enc.sort_unstable();
        (enc, lab)
    }

    fn root(&self) -> (Cells, u64) {
        let mut cells: Cells = if self.n == 0 { Vec::new() } else { vec![(0..self.n as u8).collect()] };
        let t = self.refine(&mut cells);
        (cells, t)
    }

    /// Builds the first path and a generating set of the automorphism group.
    /// With `stop_on_odd` returns true as soon as an odd generator appears;
    /// otherwise the return value says whether any generator is odd.
    fn find_automorphisms(&mut self, stop_on_odd: bool) -> bool {
        let (mut cells, t) = self.root();
        self.zeta_trace.push(t);
        // (cells, target cell index, individualized prefix) per first-path node
        let mut path: Vec<(Cells, usize, Vec<u8>)> = Vec::new();
        let mut prefix: Vec<u8> = Vec::new();
        while let Some(tc) = target_cell(&cells) {
            let x = cells[tc][0];
            let mut child = individualize(&cells, tc, x);
            let t = self.refine(&mut child);
            path.push((cells, tc, prefix.clone()));
            prefix.push(x);
            self.zeta_trace.push(t);
            cells = child;
        }
        let (enc, lab) = self.leaf(&cells);
        self.zeta_enc = enc;
        self.zeta_lab = lab;

        for level in (0..path.len()).rev() {
            let (cells, tc, prefix) = &path[level];
            let tc = *tc;
            let cell = &cells[tc];
            let x = cell[0];
            let mut tried = vec![x];
            for &y in &cell[1..] {
                let refs: Vec<&Permutation> = self.gens.iter().collect();
                let orb = orbits(self.n, &refs);
                if tried.iter().any(|&z| orb[z as usize] == orb[y as usize]) {
                    continue;
                }
                tried.push(y);
                let mut child = individualize(cells, tc, y);
                if self.refine(&mut child) != self.zeta_trace[level + 1] {
                    continue;
                }
                let mut p = prefix.clone();
                p.push(y);
                if let Some(g) = self.search_equivalent(&child, &mut p, level + 1) {
                    let odd = g.sign() < 0;
                    self.gens.push(g);
                    if odd && stop_on_odd {
                        return true;
                    }
                }
            }
        }
        self.gens.iter().any(|g| g.sign() < 0)
    }

    /// Depth-first search below `cells` for a leaf with the same relabeled
    /// bases as `zeta`; returns the automorphism it induces.
    fn search_equivalent(&self, cells: &Cells, prefix: &mut Vec<u8>, level: usize) -> Option<Permutation> {
        let Some(tc) = target_cell(cells) else {
            let (enc, lab) = self.leaf(cells);
            return (enc == self.zeta_enc).then(|| self.zeta_lab.inverse().compose(&lab));
        };
        let fixing = self.gens_fixing(prefix);
        let orb = orbits(self.n, &fixing);
        let mut tried: Vec<u8> = Vec::new();
        for &z in &cells[tc] {
            if tried.iter().any(|&w| orb[w as usize] == orb[z as usize]) {
                continue;
            }
            tried.push(z);
            let mut child = individualize(cells, tc, z);
            if self.refine(&mut child) != self.zeta_trace[level + 1] {
                continue;
            }
            prefix.push(z);
            let found = self.search_equivalent(&child, prefix, level + 1);
            prefix.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }

    fn gens_fixing(&self, prefix: &[u8]) -> Vec<&Permutation> {
        self.gens
            .iter()
            .filter(|g| prefix.iter().all(|&p| g.image0(p as usize) == p as usize))
            .collect()
    }

    /// Least certificate over the search tree, pruned by known automorphisms.
    fn canonical_leaf(&self) -> (Vec<Mask>, Permutation) {
        let mut best = Best {
            trace: self.zeta_trace.clone(),
            enc: self.zeta_enc.clone(),
            lab: self.zeta_lab.clone(),
        };
        let (cells, t) = self.root();
        let mut trace = vec![t];
        let mut prefix = Vec::new();
        self.canonical_dfs(&cells, &mut trace, &mut prefix, &mut best);
        (best.enc, best.lab)
    }

    fn canonical_dfs(&self, cells: &Cells, trace: &mut Vec<u64>, prefix: &mut Vec<u8>, best: &mut Best) {
        let l = trace.len();
        let cmp = trace[..].cmp(&best.trace[..l.min(best.trace.len())]);
        if cmp == std::cmp::Ordering::Greater {
            return;
        }
        let Some(tc) = target_cell(cells) else {
            let (enc, lab) = self.leaf(cells);
            let better = match trace[..].cmp(&best.trace[..]) {
                std::cmp::Ordering::Less => true,
                std::cmp::Ordering::Equal => enc < best.enc,
                std::cmp::Ordering::Greater => false,
            };
            if better {
                *best = Best { trace: trace.clone(), enc, lab };
            }
            return;
        };
        let fixing = self.gens_fixing(prefix);
        let orb = orbits(self.n, &fixing);
        let mut tried: Vec<u8> = Vec::new();
        for &z in &cells[tc] {
            if tried.iter().any(|&w| orb[w as usize] == orb[z as usize]) {
                continue;
            }
            tried.push(z);
            let mut child = individualize(cells, tc, z);
            let t = self.refine(&mut child);
            trace.push(t);
            prefix.push(z);
            self.canonical_dfs(&child, trace, prefix, best);
            prefix.pop();
            trace.pop();
        }
    }
}

struct Best {
    trace: Vec<u64>,
    enc: Vec<Mask>,
    lab: Permutation,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::{fano, Graph};
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    fn brute_force_auts(m: &Matroid) -> (usize, bool) {
        let n = m.size();
        let mut perm: Vec<usize> = (1..=n).collect();
        let mut count = 0;
        let mut odd = false;
        loop {
            let p = Permutation::from_images(&perm).unwrap();
            if m.relabel(&p) == *m {
                count += 1;
                odd |= p.sign() < 0;
            }
            if !next_permutation(&mut perm) {
                break;
            }
        }
        (count, odd)
    }

    fn next_permutation(v: &mut [usize]) -> bool {
        if v.len() < 2 {
            return false;
        }
        let mut i = v.len() - 1;
        while i > 0 && v[i - 1] >= v[i] {
            i -= 1;
        }
        if i == 0 {
            return false;
        }
        let mut j = v.len() - 1;
        while v[j] <= v[i - 1] {
            j -= 1;
        }
        v.swap(i - 1, j);
        v[i..].reverse();
        true
    }

    #[test]
    fn signs() {
        assert_eq!(perm_sign(&Permutation::identity(4)), 1);
        assert_eq!(perm_sign(&Permutation::from_images(&[2, 1, 3, 4]).unwrap()), -1);
        assert_eq!(perm_sign(&Permutation::from_images(&[2, 3, 1]).unwrap()), 1);
        assert!(Permutation::from_images(&[1, 1]).is_none());
    }

    #[test]
    fn compose_and_inverse() {
        let p = Permutation::from_images(&[2, 3, 1]).unwrap();
        let q = Permutation::from_images(&[1, 3, 2]).unwrap();
        // p after q: 1 -> 1 -> 2, 2 -> 3 -> 1, 3 -> 2 -> 3
        assert_eq!(p.compose(&q).images(), vec![2, 1, 3]);
        assert!(p.compose(&p.inverse()).is_identity());
    }

    #[test]
    fn group_orders_match_brute_force() {
        let cases = [
            Matroid::uniform(2, 4).unwrap(),
            Matroid::uniform(1, 1).unwrap(),
            Graph::complete(4).matroid(),
            fano(),
            Matroid::uniform(0, 1).unwrap().direct_sum(&Matroid::uniform(0, 1).unwrap()),
            Matroid::uniform(1, 2).unwrap().direct_sum(&Matroid::uniform(2, 3).unwrap()),
        ];
        for m in &cases {
            let gens = automorphism_generators(m);
            for g in &gens {
                assert_eq!(m.relabel(g), *m);
            }
            let (count, odd) = brute_force_auts(m);
            assert_eq!(group_order(m.size(), &gens), count, "{m:?}");
            assert_eq!(has_odd_automorphism(m), odd, "{m:?}");
        }
        assert_eq!(brute_force_auts(&Graph::complete(4).matroid()), (24, false));
        assert_eq!(brute_force_auts(&Matroid::uniform(2, 4).unwrap()), (24, true));
    }

    #[test]
    fn canonical_form_is_invariant() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let cases = [Graph::complete(4).matroid(), fano(), Matroid::uniform(3, 6).unwrap()];
        for m in &cases {
            let (k, sigma) = canonical_form(m);
            assert_eq!(m.relabel(&sigma).bases(), k.encoding());
            for _ in 0..20 {
                let mut imgs: Vec<usize> = (1..=m.size()).collect();
                imgs.shuffle(&mut rng);
                let p = Permutation::from_images(&imgs).unwrap();
                let mp = m.relabel(&p);
                assert_eq!(canonical_form(&mp).0, k);
                let w = iso_witness(m, &mp).unwrap();
                assert_eq!(m.relabel(&w), mp);
            }
        }
    }

    #[test]
    fn distinguishes_and_handles_empty() {
        let k4 = canonical_form(&Graph::complete(4).matroid()).0;
        let u36 = canonical_form(&Matroid::uniform(3, 6).unwrap()).0;
        assert_ne!(k4, u36);
        assert!(!k4.odd_auto());
        let (e, p) = canonical_form(&Matroid::empty());
        assert_eq!(e.encoding(), &[0]);
        assert!(!e.odd_auto());
        assert!(p.is_empty());
        assert!(iso_witness(&Matroid::uniform(2, 4).unwrap(), &Graph::complete(4).matroid()).is_none());
        let u23 = Matroid::uniform(2, 3).unwrap();
        assert_eq!(u23.relabel(&iso_witness(&u23, &u23).unwrap()), u23);
    }
}
