//! Ranks of integer matrices and rational homology of the matroid complexes.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::complexes::{chain_basis, differential_between, ChainBasis, ComplexSpec, DifferentialKind, SparseIntMatrix};
use crate::error::Result;
use crate::source::MatroidSource;

/// Coefficient ring for fraction-free elimination. `None` signals overflow.
trait Coeff: Clone + Sized {
    fn from_i64(v: i64) -> Self;
    fn is_zero(&self) -> bool;
    /// `a*x - b*y`
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn is_unit(&self) -> bool;
}

impl Coeff for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs() == 1
    }
}

impl Coeff for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn cross(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn is_unit(&self) -> bool {
        self.abs().is_one()
    }
}

type Row<C> = Vec<(usize, C)>;

fn rows_of<C: Coeff>(m: &SparseIntMatrix) -> Vec<Row<C>> {
    let mut rows: Vec<Row<C>> = vec![Vec::new(); m.rows()];
    for &(r, c, v) in m.entries() {
        rows[r].push((c, C::from_i64(v)));
    }
    rows
}

/// `a*q - b*p` on sorted sparse rows, then divided by its content.
fn combine<C: Coeff>(a: &C, q: &Row<C>, b: &C, p: &Row<C>) -> Option<Row<C>> {
    let zero = C::from_i64(0);
    let mut out = Vec::with_capacity(q.len() + p.len());
    let (mut i, mut j) = (0, 0);
    while i < q.len() || j < p.len() {
        let (col, v) = match (q.get(i), p.get(j)) {
            (Some((cq, x)), Some((cp, _))) if cq < cp => {
                i += 1;
                (*cq, C::cross(a, x, b, &zero)?)
            }
            (Some((cq, _)), Some((cp, y))) if cp < cq => {
                j += 1;
                (*cp, C::cross(a, &zero, b, y)?)
            }
            (Some((cq, x)), Some((_, y))) => {
                i += 1;
                j += 1;
                (*cq, C::cross(a, x, b, y)?)
            }
            (Some((cq, x)), None) => {
                i += 1;
                (*cq, C::cross(a, x, b, &zero)?)
            }
            (None, Some((cp, y))) => {
                j += 1;
                (*cp, C::cross(a, &zero, b, y)?)
            }
            (None, None) => unreachable!(),
        };
        if !v.is_zero() {
            out.push((col, v));
        }
    }
    let mut g = C::from_i64(0);
    for (_, v) in &out {
        g = g.gcd(v);
        if g.is_unit() {
            return Some(out);
        }
    }
    if !g.is_zero() {
        for (_, v) in &mut out {
            *v = v.div_exact(&g);
        }
    }
    Some(out)
}

/// Sparse fraction-free elimination. Pivots on the sparsest remaining row,
/// preferring unit entries in the sparsest column.
fn sparse_rank<C: Coeff>(m: &SparseIntMatrix) -> Option<usize> {
    let mut rows: Vec<Option<Row<C>>> = rows_of::<C>(m).into_iter().map(|r| (!r.is_empty()).then_some(r)).collect();
    let mut col_rows: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); m.cols()];
    for (i, r) in rows.iter().enumerate() {
        for (c, _) in r.iter().flatten() {
            col_rows[*c].insert(i);
        }
    }
    let mut rank = 0;
    loop {
        let Some(pr) = (0..rows.len()).filter(|&i| rows[i].is_some()).min_by_key(|&i| rows[i].as_ref().unwrap().len())
        else {
            return Some(rank);
        };
        let prow = rows[pr].take().unwrap();
        for (c, _) in &prow {
            col_rows[*c].remove(&pr);
        }
        let &(pc, ref pv) = prow
            .iter()
            .min_by_key(|(c, v)| (!v.is_unit(), col_rows[*c].len()))
            .expect("nonempty row");
        rank += 1;
        let targets: Vec<usize> = col_rows[pc].iter().copied().collect();
        for t in targets {
            let q = rows[t].take().unwrap();
            let b = q.iter().find(|(c, _)| *c == pc).unwrap().1.clone();
            let new = combine(pv, &q, &b, &prow)?;
            for (c, _) in &q {
                col_rows[*c].remove(&t);
            }
            for (c, _) in &new {
                col_rows[*c].insert(t);
            }
            if !new.is_empty() {
                rows[t] = Some(new);
            }
        }
    }
}

/// Dense Bareiss elimination over the integers.
pub fn rank_bareiss(m: &SparseIntMatrix) -> usize {
    let mut a: Vec<Vec<BigInt>> = m.to_dense().into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect();
    let (rows, cols) = (m.rows(), m.cols());
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&i| !Zero::is_zero(&a[i][c])) else { continue };
        a.swap(rank, p);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let v = (&a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j]) / &prev;
                a[i][j] = v;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Rank over ℚ. Sparse elimination in `i128` with content reduction, redone
/// with big integers on overflow; dense Bareiss for dense matrices.
pub fn rank_exact(m: &SparseIntMatrix) -> usize {
    if m.is_zero() {
        return 0;
    }
    let cells = m.rows() * m.cols();
    if cells <= 4096 && m.nnz() * 3 > cells {
        return rank_bareiss(m);
    }
    if let Some(r) = sparse_rank::<i128>(m) {
        return r;
    }
    sparse_rank::<BigInt>(m).expect("big integers do not overflow")
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'w: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'w;
            }
        }
        return false;
    }
    true
}

/// `count` distinct 62-bit primes, the same on every run.
pub fn default_primes(count: usize) -> Vec<u64> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(0x6d_6174_726f_6964);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = rng.gen_range(1u64 << 61..1u64 << 62) | 1;
        if is_prime(c) && !out.contains(&c) {
            out.push(c);
        }
    }
    out
}

/// Rank modulo one prime by sparse elimination.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    let to_mod = |v: i64| -> u64 { v.rem_euclid(p as i64) as u64 };
    let mut rows: Vec<Vec<(usize, u64)>> = vec![Vec::new(); m.rows()];
    for &(r, c, v) in m.entries() {
        let x = to_mod(v);
        if x != 0 {
            rows[r].push((c, x));
        }
    }
    let mut pivots: std::collections::HashMap<usize, Vec<(usize, u64)>> = Default::default();
    let mut rank = 0;
    for mut row in rows {
        // reduce against existing pivots until the leading column is new
        loop {
            let Some(&(c, v)) = row.first() else { break };
            let Some(prow) = pivots.get(&c) else { break };
            // prow is monic at column c
            let mut out = Vec::with_capacity(row.len() + prow.len());
            let (mut i, mut j) = (0, 0);
            while i < row.len() || j < prow.len() {
                match (row.get(i), prow.get(j)) {
                    (Some(&(ca, a)), Some(&(cb, _))) if ca < cb => {
                        out.push((ca, a));
                        i += 1;
                    }
                    (Some(&(ca, _)), Some(&(cb, b))) if cb < ca => {
                        out.push((cb, (p - mul_mod(v, b, p)) % p));
                        j += 1;
                    }
                    (Some(&(ca, a)), Some(&(_, b))) => {
                        let x = (a + p - mul_mod(v, b, p)) % p;
                        if x != 0 {
                            out.push((ca, x));
                        }
                        i += 1;
                        j += 1;
                    }
                    (Some(&e), None) => {
                        out.push(e);
                        i += 1;
                    }
                    (None, Some(&(cb, b))) => {
                        out.push((cb, (p - mul_mod(v, b, p)) % p));
                        j += 1;
                    }
                    (None, None) => unreachable!(),
                }
            }
            row = out;
        }
        if let Some(&(c, v)) = row.first() {
            let inv = pow_mod(v, p - 2, p);
            for e in &mut row {
                e.1 = mul_mod(e.1, inv, p);
            }
            pivots.insert(c, row);
            rank += 1;
        }
    }
    rank
}

/// Largest rank over the given primes, and whether all primes agreed.
/// Each value is a lower bound for the rank over ℚ.
pub fn rank_modular(m: &SparseIntMatrix, primes: &[u64]) -> (usize, bool) {
    let ranks: Vec<usize> = primes.iter().map(|&p| rank_mod_p(m, p)).collect();
    let max = ranks.iter().copied().max().unwrap_or(0);
    (max, ranks.iter().all(|&r| r == max))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Certified {
    /// All ranks exact, or the betti number is zero from modular lower bounds.
    Yes,
    /// The incoming boundary was not computed.
    UpperBound,
}

impl fmt::Display for Certified {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Certified::Yes => "yes",
            Certified::UpperBound => "upper_bound",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BettiRow {
    pub spec: String,
    pub kind: String,
    pub n: usize,
    /// `None` for total-degree rows.
    pub r: Option<usize>,
    pub dim: usize,
    pub rank_out: usize,
    pub rank_in: usize,
    pub betti: usize,
    pub certified: Certified,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BettiTable {
    pub rows: Vec<BettiRow>,
}

impl BettiTable {
    pub fn total(&self, n: usize) -> Option<&BettiRow> {
        self.rows.iter().find(|row| row.n == n && row.r.is_none())
    }

    pub fn at(&self, n: usize, r: usize) -> Option<&BettiRow> {
        self.rows.iter().find(|row| row.n == n && row.r == Some(r))
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("spec,kind,n,r,dim,rank_out,rank_in,betti,certified\n");
        for row in &self.rows {
            let r = row.r.map(|r| r.to_string()).unwrap_or_default();
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                csv_field(&row.spec),
                row.kind,
                row.n,
                r,
                row.dim,
                row.rank_out,
                row.rank_in,
                row.betti,
                row.certified
            ));
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') {
        format!("\"{s}\"")
    } else {
        s.to_string()
    }
}

#[derive(Clone, Debug)]
pub struct RankOptions {
    /// Skip the modular fast path.
    pub exact: bool,
    pub primes: Vec<u64>,
}

impl Default for RankOptions {
    fn default() -> Self {
        RankOptions { exact: false, primes: default_primes(3) }
    }
}

/// A rank together with how it was obtained.
#[derive(Clone, Copy, Debug)]
struct RankInfo {
    rank: usize,
    exact: bool,
}

fn rank_with(m: &SparseIntMatrix, opts: &RankOptions) -> RankInfo {
    if opts.exact || opts.primes.is_empty() {
        RankInfo { rank: rank_exact(m), exact: true }
    } else {
        RankInfo { rank: rank_modular(m, &opts.primes).0, exact: false }
    }
}

/// One homogeneous piece of the complex: its dimension and the two boundary
/// blocks touching it.
struct Piece {
    n: usize,
    r: Option<usize>,
    dim: usize,
    out_block: Option<SparseIntMatrix>,
    in_block: Option<SparseIntMatrix>,
    top: bool,
}

/// Betti numbers `dim C − rank ∂_out − rank ∂_in` for degrees `0..=max_n`,
/// per bidegree (for kinds homogeneous in rank) and per total degree.
///
/// When the source cannot supply degree `max_n + 1`, the rows of degree
/// `max_n` are upper bounds. With `bidegree = Some((n, r))` only that row and
/// its degree total are produced.
pub fn homology_table(
    spec: &ComplexSpec,
    kind: DifferentialKind,
    max_n: usize,
    source: &MatroidSource,
    opts: &RankOptions,
) -> Result<BettiTable> {
    homology_rows(spec, kind, 0..=max_n, None, source, opts)
}

/// The single bidegree `(n, r)`.
pub fn homology_at(
    spec: &ComplexSpec,
    kind: DifferentialKind,
    n: usize,
    r: usize,
    source: &MatroidSource,
    opts: &RankOptions,
) -> Result<BettiTable> {
    homology_rows(spec, kind, n..=n, Some(r), source, opts)
}

fn homology_rows(
    spec: &ComplexSpec,
    kind: DifferentialKind,
    degrees: std::ops::RangeInclusive<usize>,
    only_r: Option<usize>,
    source: &MatroidSource,
    opts: &RankOptions,
) -> Result<BettiTable> {
    spec.validate_for(kind)?;
    let (lo, hi) = (*degrees.start(), *degrees.end());
    let mut bases: Vec<Option<ChainBasis>> = Vec::new();
    for n in 0..=hi + 1 {
        if n + 1 < lo {
            bases.push(None);
            continue;
        }
        if n == hi + 1 && !source.covers_spec(n, spec) {
            bases.push(None);
            continue;
        }
        bases.push(Some(chain_basis(n, spec, source)?));
    }
    let dmat = |n: usize| -> Result<Option<SparseIntMatrix>> {
        // ∂ from degree n to n - 1
        if n == 0 {
            return Ok(Some(SparseIntMatrix::zeros(0, bases[0].as_ref().map_or(0, |b| b.len()))));
        }
        match (&bases[n - 1], bases.get(n).and_then(|b| b.as_ref())) {
            (Some(rows), Some(cols)) => Ok(Some(differential_between(kind, spec, rows, cols)?)),
            _ => Ok(None),
        }
    };
    let mut pieces = Vec::new();
    for n in lo..=hi {
        let basis = bases[n].as_ref().expect("degree in range");
        let d_out = dmat(n)?.expect("outgoing boundary in range");
        let d_in = dmat(n + 1)?;
        let top = d_in.is_none();
        if let Some(drop) = kind.rank_drop() {
            let rs: Vec<usize> = match only_r {
                Some(r) => vec![r],
                None => (0..=n).collect(),
            };
            for r in rs {
                let cols = basis.positions_of_rank(r);
                let out_rows = if n == 0 || r < drop {
                    Vec::new()
                } else {
                    bases[n - 1].as_ref().unwrap().positions_of_rank(r - drop)
                };
                let out_block = d_out.block(&out_rows, &cols);
                let in_block = d_in.as_ref().map(|d| {
                    let in_cols = bases[n + 1].as_ref().unwrap().positions_of_rank(r + drop);
                    d.block(&cols, &in_cols)
                });
                pieces.push(Piece { n, r: Some(r), dim: cols.len(), out_block: Some(out_block), in_block, top });
            }
        }
        pieces.push(Piece { n, r: None, dim: basis.len(), out_block: Some(d_out), in_block: d_in, top });
    }
    let rows: Vec<BettiRow> = pieces
        .par_iter()
        .map(|p| {
            let mut out = p.out_block.as_ref().map(|m| (m, rank_with(m, opts)));
            let mut inn = p.in_block.as_ref().map(|m| (m, rank_with(m, opts)));
            let betti_of = |o: &Option<(&SparseIntMatrix, RankInfo)>, i: &Option<(&SparseIntMatrix, RankInfo)>| {
                p.dim - o.map_or(0, |x| x.1.rank) - i.map_or(0, |x| x.1.rank)
            };
            // modular ranks never exceed the rational rank, so a zero betti is final
            if betti_of(&out, &inn) > 0 {
                for slot in [&mut out, &mut inn].into_iter().flatten() {
                    if !slot.1.exact {
                        slot.1 = RankInfo { rank: rank_exact(slot.0), exact: true };
                    }
                }
            }
            let rank_out = out.map_or(0, |x| x.1.rank);
            let rank_in = inn.map_or(0, |x| x.1.rank);
            assert!(rank_out + rank_in <= p.dim, "boundary ranks exceed the chain dimension");
            BettiRow {
                spec: spec.to_string(),
                kind: kind.tag().to_string(),
                n: p.n,
                r: p.r,
                dim: p.dim,
                rank_out,
                rank_in,
                betti: p.dim - rank_out - rank_in,
                certified: if p.top { Certified::UpperBound } else { Certified::Yes },
            }
        })
        .collect();
    Ok(BettiTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_examples() {
        assert_eq!(rank_exact(&SparseIntMatrix::zeros(3, 4)), 0);
        assert_eq!(rank_exact(&SparseIntMatrix::identity(3)), 3);
        let two = SparseIntMatrix::from_dense(&[vec![2]]);
        assert_eq!(rank_exact(&two), 1);
        assert_eq!(rank_mod_p(&two, 2), 0);
        assert_eq!(rank_modular(&SparseIntMatrix::identity(3), &[7]), (3, true));
        assert_eq!(rank_modular(&two, &[2, 3]), (1, false));
        let sing = SparseIntMatrix::from_dense(&[vec![1, 2, 3], vec![4, 5, 6], vec![7, 8, 9]]);
        assert_eq!(rank_exact(&sing), 2);
        assert_eq!(rank_bareiss(&sing), 2);
        assert_eq!(sparse_rank::<i128>(&sing), Some(2));
        assert_eq!(rank_mod_p(&sing, 1_000_000_007), 2);
    }

    #[test]
    fn primes_are_prime() {
        let ps = default_primes(4);
        assert_eq!(ps, default_primes(4));
        for p in ps {
            assert!(is_prime(p));
            assert!(p >= 1 << 61 && p < 1 << 62);
        }
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn overflow_falls_back_to_big_integers() {
        // a Hilbert-like matrix with large entries forces growth past i128 in the cross products
        let n = 12;
        let rows: Vec<Vec<i64>> = (0..n)
            .map(|i| (0..n).map(|j| ((i + 1) as i64).pow(j as u32 % 8) * 1_000_003 + (i * j) as i64).collect())
            .collect();
        let m = SparseIntMatrix::from_dense(&rows);
        assert_eq!(sparse_rank::<BigInt>(&m), Some(rank_bareiss(&m)));
        assert_eq!(rank_exact(&m), rank_bareiss(&m));
    }
}
