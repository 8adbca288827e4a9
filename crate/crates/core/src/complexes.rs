//! Chain bases, the deletion/contraction differentials and their matrices.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use dashmap::DashMap;
use num_rational::BigRational;
use once_cell::sync::Lazy;
use rayon::prelude::*;

use crate::canonical::CanonicalKey;
use crate::classes::{normalize, rational, ClassVector};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::source::MatroidSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DifferentialKind {
    /// Delete non-coloops, bidegree (-1, 0).
    Del,
    /// Delete coloops, bidegree (0, -1).
    Clp,
    /// Contract non-loops, bidegree (0, -1).
    Con,
    /// Contract loops, bidegree (-1, 0).
    Lp,
    DelTot,
    ConTot,
}

impl DifferentialKind {
    pub const ALL: [DifferentialKind; 6] = [
        DifferentialKind::Del,
        DifferentialKind::Clp,
        DifferentialKind::Con,
        DifferentialKind::Lp,
        DifferentialKind::DelTot,
        DifferentialKind::ConTot,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            DifferentialKind::Del => "del",
            DifferentialKind::Clp => "clp",
            DifferentialKind::Con => "con",
            DifferentialKind::Lp => "lp",
            DifferentialKind::DelTot => "del-tot",
            DifferentialKind::ConTot => "con-tot",
        }
    }

    /// Del, Clp and their sum only delete elements.
    pub fn deletion_side(self) -> bool {
        matches!(self, DifferentialKind::Del | DifferentialKind::Clp | DifferentialKind::DelTot)
    }

    /// How much the rank drops, for kinds that are homogeneous in the bigrading.
    pub fn rank_drop(self) -> Option<usize> {
        match self {
            DifferentialKind::Del | DifferentialKind::Lp => Some(0),
            DifferentialKind::Clp | DifferentialKind::Con => Some(1),
            DifferentialKind::DelTot | DifferentialKind::ConTot => None,
        }
    }

    /// The kind matched with this one by matroid duality.
    pub fn dual(self) -> DifferentialKind {
        match self {
            DifferentialKind::Del => DifferentialKind::Con,
            DifferentialKind::Con => DifferentialKind::Del,
            DifferentialKind::Clp => DifferentialKind::Lp,
            DifferentialKind::Lp => DifferentialKind::Clp,
            DifferentialKind::DelTot => DifferentialKind::ConTot,
            DifferentialKind::ConTot => DifferentialKind::DelTot,
        }
    }

    fn takes(self, is_loop: bool, is_coloop: bool) -> Option<Op> {
        use DifferentialKind::*;
        match self {
            Del if !is_coloop => Some(Op::Delete),
            Clp if is_coloop => Some(Op::Delete),
            DelTot => Some(Op::Delete),
            Con if !is_loop => Some(Op::Contract),
            Lp if is_loop => Some(Op::Contract),
            ConTot => Some(Op::Contract),
            _ => None,
        }
    }
}

#[derive(Clone, Copy)]
enum Op {
    Delete,
    Contract,
}

impl fmt::Display for DifferentialKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for DifferentialKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        DifferentialKind::ALL
            .into_iter()
            .find(|k| k.tag() == s)
            .ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// The signed children `(−1)^{i−1} · M ∘ i` of a matroid under one differential.
pub fn children(kind: DifferentialKind, m: &Matroid) -> Vec<(Matroid, i32)> {
    let loops = m.loops();
    let coloops = m.coloops();
    let mut out = Vec::new();
    for b in 0..m.size() {
        let op = kind.takes(loops >> b & 1 == 1, coloops >> b & 1 == 1);
        let sign = if b % 2 == 0 { 1 } else { -1 };
        match op {
            Some(Op::Delete) => out.push((m.delete_unchecked(b), sign)),
            Some(Op::Contract) => out.push((m.contract_unchecked(b), sign)),
            None => {}
        }
    }
    out
}

/// Applies a differential term by term.
pub fn apply_differential(kind: DifferentialKind, v: &ClassVector) -> ClassVector {
    let mut out = ClassVector::zero();
    for (key, c) in v.terms() {
        let rep = key.representative();
        for (child, s) in children(kind, &rep) {
            out.add_matroid(&child, &(c * rational(s as i64)));
        }
    }
    out
}

/// The sign relating `M \ i` to `target` after the order-preserving relabeling,
/// or 0 when they are not isomorphic.
pub fn mu_sign(m: &Matroid, i: usize, target: &CanonicalKey) -> i32 {
    let Ok(child) = m.delete(i) else { return 0 };
    match normalize(&child) {
        Some((k, s)) if k == *target => s,
        _ => 0,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Simple,
    Loopless,
    Coloopless,
    Cosimple,
    Binary,
    Ternary,
    Regular,
    Graphic,
    Cographic,
}

static PROPERTY_CACHE: Lazy<DashMap<(CanonicalKey, Property), bool>> = Lazy::new(DashMap::new);

impl Property {
    pub const ALL: [Property; 9] = [
        Property::Simple,
        Property::Loopless,
        Property::Coloopless,
        Property::Cosimple,
        Property::Binary,
        Property::Ternary,
        Property::Regular,
        Property::Graphic,
        Property::Cographic,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Property::Simple => "simple",
            Property::Loopless => "loopless",
            Property::Coloopless => "coloopless",
            Property::Cosimple => "cosimple",
            Property::Binary => "binary",
            Property::Ternary => "ternary",
            Property::Regular => "regular",
            Property::Graphic => "graphic",
            Property::Cographic => "cographic",
        }
    }

    pub fn holds(self, m: &Matroid) -> bool {
        match self {
            Property::Simple => m.is_simple(),
            Property::Loopless => m.is_loopless(),
            Property::Coloopless => m.is_coloopless(),
            Property::Cosimple => m.is_cosimple(),
            Property::Binary => m.is_binary(),
            Property::Ternary => m.is_ternary(),
            Property::Regular => m.is_regular(),
            Property::Graphic => m.is_graphic(),
            Property::Cographic => m.is_cographic(),
        }
    }

    /// Memoized [`Property::holds`] on a canonical representative.
    pub fn holds_for_key(self, key: &CanonicalKey) -> bool {
        let k = (key.clone(), self);
        if let Some(v) = PROPERTY_CACHE.get(&k) {
            return *v;
        }
        let v = self.holds(&key.representative());
        PROPERTY_CACHE.insert(k, v);
        v
    }

    pub fn dual(self) -> Property {
        match self {
            Property::Simple => Property::Cosimple,
            Property::Cosimple => Property::Simple,
            Property::Loopless => Property::Coloopless,
            Property::Coloopless => Property::Loopless,
            Property::Graphic => Property::Cographic,
            Property::Cographic => Property::Graphic,
            p => p,
        }
    }

    pub fn deletion_closed(self) -> bool {
        !matches!(self, Property::Coloopless | Property::Cosimple)
    }

    pub fn contraction_closed(self) -> bool {
        self.dual().deletion_closed()
    }

    fn implies_loopless(self) -> bool {
        matches!(self, Property::Simple | Property::Loopless)
    }

    fn implies_coloopless(self) -> bool {
        self.dual().implies_loopless()
    }
}

impl FromStr for Property {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Property::ALL.into_iter().find(|p| p.tag() == s).ok_or_else(|| Error::UnknownTag(s.to_string()))
    }
}

/// Restriction of a complex to one rank or one nullity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slice {
    Rank(usize),
    Nullity(usize),
}

/// Which classes span the chain groups.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct ComplexSpec {
    properties: Vec<Property>,
    connected: bool,
    slice: Option<Slice>,
}

impl ComplexSpec {
    /// Every class.
    pub fn all() -> Self {
        ComplexSpec::default()
    }

    pub fn new(mut properties: Vec<Property>, connected: bool) -> Self {
        properties.sort();
        properties.dedup();
        ComplexSpec { properties, connected, slice: None }
    }

    /// Comma-separated tags: `all`, `connected`, or property names.
    pub fn parse(s: &str) -> Result<Self> {
        let mut props = Vec::new();
        let mut connected = false;
        for tag in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tag {
                "all" => {}
                "connected" => connected = true,
                other => props.push(other.parse()?),
            }
        }
        Ok(ComplexSpec::new(props, connected))
    }

    pub fn with_slice(mut self, slice: Option<Slice>) -> Self {
        self.slice = slice;
        self
    }

    pub fn properties(&self) -> &[Property] {
        &self.properties
    }

    pub fn connected(&self) -> bool {
        self.connected
    }

    pub fn slice(&self) -> Option<Slice> {
        self.slice
    }

    pub fn without_slice(&self) -> ComplexSpec {
        ComplexSpec { slice: None, ..self.clone() }
    }

    pub fn holds_for_key(&self, key: &CanonicalKey) -> bool {
        if let Some(slice) = self.slice {
            let ok = match slice {
                Slice::Rank(r) => key.rank() == r,
                Slice::Nullity(k) => key.nullity() == k,
            };
            if !ok {
                return false;
            }
        }
        if self.connected && !key.representative().is_connected() {
            return false;
        }
        self.properties.iter().all(|p| p.holds_for_key(key))
    }

    pub fn holds(&self, m: &Matroid) -> bool {
        (!self.connected || m.is_connected()) && self.properties.iter().all(|p| p.holds(m))
    }

    pub fn dual(&self) -> ComplexSpec {
        let slice = self.slice.map(|s| match s {
            Slice::Rank(r) => Slice::Nullity(r),
            Slice::Nullity(k) => Slice::Rank(k),
        });
        ComplexSpec::new(self.properties.iter().map(|p| p.dual()).collect(), self.connected)
            .with_slice(slice)
    }

    pub fn is_self_dual(&self) -> bool {
        self.properties.iter().all(|&p| p.dual() == p)
    }

    /// Checks that the spanned subspace is carried to itself (or, for the
    /// connected quotient, that disconnected classes span a subcomplex).
    pub fn validate_for(&self, kind: DifferentialKind) -> Result<()> {
        if let Some(slice) = self.slice {
            let (tag, drop) = match slice {
                Slice::Rank(r) => (format!("rank={r}"), Some(0)),
                Slice::Nullity(k) => (format!("nullity={k}"), Some(1)),
            };
            if kind.rank_drop() != drop {
                return Err(Error::NotASubcomplex { property: tag, kind: kind.tag().into() });
            }
        }
        for &p in &self.properties {
            let closed = if kind.deletion_side() { p.deletion_closed() } else { p.contraction_closed() };
            if !closed {
                return Err(Error::NotASubcomplex { property: p.tag().into(), kind: kind.tag().into() });
            }
        }
        if self.connected {
            let ok = match kind {
                DifferentialKind::Del => self.properties.iter().any(|p| p.implies_loopless()),
                DifferentialKind::Con => self.properties.iter().any(|p| p.implies_coloopless()),
                _ => false,
            };
            if !ok {
                return Err(Error::ConnectedQuotientUnsupported {
                    spec: self.to_string(),
                    kind: kind.tag().into(),
                });
            }
        }
        Ok(())
    }
}

impl fmt::Display for ComplexSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut tags: Vec<&str> = self.properties.iter().map(|p| p.tag()).collect();
        if self.connected {
            tags.push("connected");
        }
        if tags.is_empty() {
            tags.push("all");
        }
        f.write_str(&tags.join(","))
    }
}

impl FromStr for ComplexSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ComplexSpec::parse(s)
    }
}

/// Ordered basis of one chain group.
#[derive(Clone, Debug)]
pub struct ChainBasis {
    n: usize,
    keys: Vec<CanonicalKey>,
    index: HashMap<CanonicalKey, usize>,
}

impl ChainBasis {
    pub fn new(n: usize, mut keys: Vec<CanonicalKey>) -> Self {
        keys.sort();
        keys.dedup();
        let index = keys.iter().cloned().enumerate().map(|(i, k)| (k, i)).collect();
        ChainBasis { n, keys, index }
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn keys(&self) -> &[CanonicalKey] {
        &self.keys
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn position(&self, key: &CanonicalKey) -> Option<usize> {
        self.index.get(key).copied()
    }

    /// Basis positions with the given rank, ascending.
    pub fn positions_of_rank(&self, r: usize) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.keys[i].rank() == r).collect()
    }

    /// Coordinates of a vector in this basis; `None` if it leaves the span.
    pub fn coordinates(&self, v: &ClassVector) -> Option<Vec<BigRational>> {
        let mut out = vec![rational(0); self.len()];
        for (k, c) in v.terms() {
            out[self.position(k)?] = c.clone();
        }
        Some(out)
    }
}

/// Odd-automorphism-free classes of degree `n` satisfying `spec`, sorted.
pub fn chain_basis(n: usize, spec: &ComplexSpec, source: &MatroidSource) -> Result<ChainBasis> {
    let classes = source.classes_for(n, spec)?;
    let keys: Vec<CanonicalKey> = classes
        .par_iter()
        .filter(|k| !k.odd_auto() && spec.holds_for_key(k))
        .cloned()
        .collect();
    Ok(ChainBasis::new(n, keys))
}

/// Integer matrix in coordinate form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    /// sorted by (row, col), no zeros, no duplicates
    entries: Vec<(usize, usize, i64)>,
}

impl SparseIntMatrix {
    /// Sums duplicate coordinates and drops zeros.
    pub fn new(rows: usize, cols: usize, entries: Vec<(usize, usize, i64)>) -> Self {
        let mut acc: BTreeMap<(usize, usize), i64> = BTreeMap::new();
        for (r, c, v) in entries {
            assert!(r < rows && c < cols, "entry ({r},{c}) outside {rows}x{cols}");
            *acc.entry((r, c)).or_insert(0) += v;
        }
        let entries = acc.into_iter().filter(|&(_, v)| v != 0).map(|((r, c), v)| (r, c, v)).collect();
        SparseIntMatrix { rows, cols, entries }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseIntMatrix { rows, cols, entries: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        SparseIntMatrix { rows: n, cols: n, entries: (0..n).map(|i| (i, i, 1)).collect() }
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut e = Vec::new();
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, &v) in row.iter().enumerate() {
                e.push((i, j, v));
            }
        }
        SparseIntMatrix::new(rows.len(), cols, e)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[(usize, usize, i64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> i64 {
        self.entries
            .binary_search_by(|&(a, b, _)| (a, b).cmp(&(r, c)))
            .map(|i| self.entries[i].2)
            .unwrap_or(0)
    }

    pub fn to_dense(&self) -> Vec<Vec<i64>> {
        let mut d = vec![vec![0; self.cols]; self.rows];
        for &(r, c, v) in &self.entries {
            d[r][c] = v;
        }
        d
    }

    pub fn transpose(&self) -> Self {
        SparseIntMatrix::new(self.cols, self.rows, self.entries.iter().map(|&(r, c, v)| (c, r, v)).collect())
    }

    /// `self · other`.
    pub fn mul(&self, other: &SparseIntMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut by_row: Vec<Vec<(usize, i64)>> = vec![Vec::new(); other.rows];
        for &(r, c, v) in &other.entries {
            by_row[r].push((c, v));
        }
        let mut e = Vec::new();
        for &(r, k, v) in &self.entries {
            for &(c, w) in &by_row[k] {
                e.push((r, c, v * w));
            }
        }
        SparseIntMatrix::new(self.rows, other.cols, e)
    }

    pub fn add(&self, other: &SparseIntMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "dimension mismatch");
        let mut e = self.entries.clone();
        e.extend_from_slice(&other.entries);
        SparseIntMatrix::new(self.rows, self.cols, e)
    }

    pub fn sub(&self, other: &SparseIntMatrix) -> Self {
        self.add(&other.scale(-1))
    }

    pub fn scale(&self, s: i64) -> Self {
        SparseIntMatrix::new(self.rows, self.cols, self.entries.iter().map(|&(r, c, v)| (r, c, v * s)).collect())
    }

    /// The submatrix on the given rows and columns, in the given order.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Self {
        let rmap: HashMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let cmap: HashMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let e = self
            .entries
            .iter()
            .filter_map(|&(r, c, v)| Some((*rmap.get(&r)?, *cmap.get(&c)?, v)))
            .collect();
        SparseIntMatrix::new(rows.len(), cols.len(), e)
    }

    /// Matrix Market coordinate format with 1-based indices.
    pub fn to_matrix_market(&self) -> String {
        let mut s = String::from("%%MatrixMarket matrix coordinate integer general\n");
        s.push_str(&format!("{} {} {}\n", self.rows, self.cols, self.entries.len()));
        for &(r, c, v) in &self.entries {
            s.push_str(&format!("{} {} {}\n", r + 1, c + 1, v));
        }
        s
    }
}

/// Matrix of a differential from degree `n` (columns) to degree `n - 1` (rows).
pub fn differential_matrix(
    kind: DifferentialKind,
    n: usize,
    spec: &ComplexSpec,
    source: &MatroidSource,
) -> Result<SparseIntMatrix> {
    let cols = chain_basis(n, spec, source)?;
    if n == 0 {
        return Ok(SparseIntMatrix::zeros(0, cols.len()));
    }
    let rows = chain_basis(n - 1, spec, source)?;
    differential_between(kind, spec, &rows, &cols)
}

/// Differential matrix with explicit bases.
pub fn differential_between(
    kind: DifferentialKind,
    spec: &ComplexSpec,
    rows: &ChainBasis,
    cols: &ChainBasis,
) -> Result<SparseIntMatrix> {
    spec.without_slice().validate_for(kind)?;
    let per_col: Vec<Vec<(usize, usize, i64)>> = cols
        .keys()
        .par_iter()
        .enumerate()
        .map(|(j, key)| {
            let mut e = Vec::new();
            for (child, s) in children(kind, &key.representative()) {
                let Some((k, t)) = normalize(&child) else { continue };
                match rows.position(&k) {
                    Some(i) => e.push((i, j, (s * t) as i64)),
                    None => {
                        // only the connected quotient or a slice may drop a child
                        debug_assert!(
                            spec.slice().is_some() || (spec.connected() && !child.is_connected()),
                            "child {k} of {key} left the complex"
                        );
                    }
                }
            }
            e
        })
        .collect();
    Ok(SparseIntMatrix::new(rows.len(), cols.len(), per_col.into_iter().flatten().collect()))
}

/// One line of a verification log.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportLine {
    pub pass: bool,
    pub identity: String,
    pub degree: usize,
    pub keys: Vec<String>,
}

impl fmt::Display for ReportLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", if self.pass { "PASS" } else { "FAIL" }, self.identity, self.degree)?;
        for k in &self.keys {
            write!(f, " {k}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub lines: Vec<ReportLine>,
}

impl Report {
    pub fn new() -> Self {
        Report::default()
    }

    pub fn record(&mut self, pass: bool, identity: impl Into<String>, degree: usize, keys: Vec<String>) {
        self.lines.push(ReportLine { pass, identity: identity.into(), degree, keys });
    }

    pub fn extend(&mut self, other: Report) {
        self.lines.extend(other.lines);
    }

    pub fn all_pass(&self) -> bool {
        self.lines.iter().all(|l| l.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportLine> {
        self.lines.iter().filter(|l| !l.pass)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.lines {
            writeln!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Column keys where a matrix that should vanish does not.
fn nonzero_columns(m: &SparseIntMatrix, cols: &ChainBasis) -> Vec<String> {
    let mut c: Vec<usize> = m.entries().iter().map(|e| e.1).collect();
    c.sort_unstable();
    c.dedup();
    c.into_iter().map(|j| cols.keys()[j].to_string()).collect()
}

/// Checks `∂ ∘ ∂ = 0` from each degree `2..=max_n`.
pub fn verify_square_zero(
    kind: DifferentialKind,
    max_n: usize,
    spec: &ComplexSpec,
    source: &MatroidSource,
) -> Result<Report> {
    let spec = spec.without_slice();
    spec.validate_for(kind)?;
    let mut report = Report::new();
    for n in 2..=max_n {
        let top = chain_basis(n, &spec, source)?;
        let mid = chain_basis(n - 1, &spec, source)?;
        let low = chain_basis(n - 2, &spec, source)?;
        let d1 = differential_between(kind, &spec, &mid, &top)?;
        let d2 = differential_between(kind, &spec, &low, &mid)?;
        let sq = d2.mul(&d1);
        report.record(sq.is_zero(), format!("square-zero:{kind}:{spec}"), n, nonzero_columns(&sq, &top));
    }
    Ok(report)
}

/// Checks `∂_a ∂_b + ∂_b ∂_a = 0` from each degree `2..=max_n`.
pub fn verify_anticommute(
    a: DifferentialKind,
    b: DifferentialKind,
    max_n: usize,
    spec: &ComplexSpec,
    source: &MatroidSource,
) -> Result<Report> {
    let spec = spec.without_slice();
    spec.validate_for(a)?;
    spec.validate_for(b)?;
    let mut report = Report::new();
    for n in 2..=max_n {
        let top = chain_basis(n, &spec, source)?;
        let mid = chain_basis(n - 1, &spec, source)?;
        let low = chain_basis(n - 2, &spec, source)?;
        let ab = differential_between(a, &spec, &low, &mid)?.mul(&differential_between(b, &spec, &mid, &top)?);
        let ba = differential_between(b, &spec, &low, &mid)?.mul(&differential_between(a, &spec, &mid, &top)?);
        let sum = ab.add(&ba);
        report.record(sum.is_zero(), format!("anticommute:{a}:{b}:{spec}"), n, nonzero_columns(&sum, &top));
    }
    Ok(report)
}

/// Matrix of `[M, η] ↦ [M*, η]` from the degree-`n` basis of `spec` to that of
/// its dual spec.
pub fn dualize_basis_map(
    n: usize,
    spec: &ComplexSpec,
    dual_spec: Option<&ComplexSpec>,
    source: &MatroidSource,
) -> Result<SparseIntMatrix> {
    let target = match dual_spec {
        Some(d) => d.clone(),
        None if spec.is_self_dual() => spec.clone(),
        None => return Err(Error::PropertyNotDualityStable(spec.to_string())),
    };
    let cols = chain_basis(n, spec, source)?;
    let rows = chain_basis(n, &target, source)?;
    dual_between(&rows, &cols)
}

fn dual_between(rows: &ChainBasis, cols: &ChainBasis) -> Result<SparseIntMatrix> {
    let mut e = Vec::new();
    for (j, key) in cols.keys().iter().enumerate() {
        let dual = key.representative().dual();
        if let Some((k, s)) = normalize(&dual) {
            if let Some(i) = rows.position(&k) {
                e.push((i, j, s as i64));
            }
        }
    }
    Ok(SparseIntMatrix::new(rows.len(), cols.len(), e))
}

/// Checks `D² = id`, `D ∂_del = ∂_con D` and `D ∂_clp = ∂_lp D` for degrees `0..=max_n`.
pub fn verify_duality(max_n: usize, spec: &ComplexSpec, source: &MatroidSource) -> Result<Report> {
    let spec = spec.without_slice();
    let dual = spec.dual();
    let mut report = Report::new();
    let mut prev: Option<(ChainBasis, ChainBasis, SparseIntMatrix)> = None;
    for n in 0..=max_n {
        let b = chain_basis(n, &spec, source)?;
        let bd = chain_basis(n, &dual, source)?;
        let d = dual_between(&bd, &b)?;
        let back = dual_between(&b, &bd)?;
        let sq = back.mul(&d);
        report.record(
            sq == SparseIntMatrix::identity(b.len()) && d.mul(&back) == SparseIntMatrix::identity(bd.len()),
            format!("dual-involution:{spec}"),
            n,
            Vec::new(),
        );
        if let Some((pb, pbd, pd)) = &prev {
            for kind in [DifferentialKind::Del, DifferentialKind::Clp] {
                let lhs = pd.mul(&differential_between(kind, &spec, pb, &b)?);
                let rhs = differential_between(kind.dual(), &dual, pbd, &bd)?.mul(&d);
                let diff = lhs.sub(&rhs);
                report.record(
                    diff.is_zero(),
                    format!("dual-intertwine:{kind}:{}:{spec}", kind.dual()),
                    n,
                    nonzero_columns(&diff, &b),
                );
            }
        }
        prev = Some((b, bd, d));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matroid::Graph;

    #[test]
    fn parse_tags() {
        let s = ComplexSpec::parse("regular,simple,connected").unwrap();
        assert_eq!(s.properties(), &[Property::Simple, Property::Regular]);
        assert!(s.connected());
        assert_eq!(s.to_string(), "simple,regular,connected");
        assert_eq!(ComplexSpec::parse("all").unwrap(), ComplexSpec::all());
        assert_eq!(ComplexSpec::parse("smple"), Err(Error::UnknownTag("smple".into())));
        assert_eq!("del-tot".parse::<DifferentialKind>().unwrap(), DifferentialKind::DelTot);
        assert!("tot".parse::<DifferentialKind>().is_err());
    }

    #[test]
    fn validation() {
        let simple = ComplexSpec::parse("simple").unwrap();
        assert!(simple.validate_for(DifferentialKind::Del).is_ok());
        assert!(simple.validate_for(DifferentialKind::Con).is_err());
        let conn = ComplexSpec::parse("regular,simple,connected").unwrap();
        assert!(conn.validate_for(DifferentialKind::Del).is_ok());
        assert!(conn.validate_for(DifferentialKind::Clp).is_err());
        assert!(ComplexSpec::parse("regular,connected").unwrap().validate_for(DifferentialKind::Del).is_err());
        assert!(ComplexSpec::parse("cosimple,connected").unwrap().validate_for(DifferentialKind::Con).is_ok());
        assert!(simple.dual().validate_for(DifferentialKind::Con).is_ok());
    }

    #[test]
    fn differential_examples() {
        let k4 = ClassVector::from_matroid(&Graph::complete(4).matroid());
        assert!(!k4.is_zero());
        assert!(apply_differential(DifferentialKind::Del, &k4).is_zero());
        assert!(apply_differential(DifferentialKind::Con, &k4).is_zero());
        let lp = ClassVector::from_matroid(&Matroid::uniform(0, 1).unwrap());
        let clp = ClassVector::from_matroid(&Matroid::uniform(1, 1).unwrap());
        assert_eq!(apply_differential(DifferentialKind::Del, &lp), ClassVector::unit());
        assert_eq!(apply_differential(DifferentialKind::Clp, &clp), ClassVector::unit());
        assert!(apply_differential(DifferentialKind::Del, &clp).is_zero());
        assert_eq!(apply_differential(DifferentialKind::Lp, &lp), ClassVector::unit());
        assert_eq!(apply_differential(DifferentialKind::Con, &clp), ClassVector::unit());
    }

    #[test]
    fn mu_sign_examples() {
        let m = Matroid::from_bases(2, 1, &[1]).unwrap();
        let u11 = normalize(&Matroid::uniform(1, 1).unwrap()).unwrap().0;
        assert_eq!(mu_sign(&m, 2, &u11), 1);
        assert_eq!(mu_sign(&m, 1, &u11), 0);
        let k4 = Graph::complete(4).matroid();
        let child = normalize(&k4.delete(1).unwrap());
        if let Some((k, _)) = child {
            assert!(mu_sign(&k4, 1, &k).abs() == 1);
        }
    }

    #[test]
    fn matrix_market_and_algebra() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 0, 2], vec![0, -1, 0]]);
        assert_eq!(
            m.to_matrix_market(),
            "%%MatrixMarket matrix coordinate integer general\n2 3 3\n1 1 1\n1 3 2\n2 2 -1\n"
        );
        assert_eq!(SparseIntMatrix::zeros(0, 0).to_matrix_market(), "%%MatrixMarket matrix coordinate integer general\n0 0 0\n");
        assert_eq!(m.transpose().transpose(), m);
        assert_eq!(m.mul(&m.transpose()).to_dense(), vec![vec![5, 0], vec![0, 1]]);
        assert!(m.sub(&m).is_zero());
        assert_eq!(m.block(&[1], &[1, 2]).to_dense(), vec![vec![-1, 0]]);
    }
}
