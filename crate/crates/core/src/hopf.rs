//! Direct sum product, restriction/contraction coproduct, and checks of the
//! Hopf and dg identities on basis classes.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::bits::{full_mask, shuffle_sign};
use crate::canonical::CanonicalKey;
use crate::classes::{key_of, normalize, rational, ClassVector};
use crate::complexes::{apply_differential, chain_basis, ComplexSpec, DifferentialKind, Report};
use crate::error::{Error, Result};
use crate::matroid::Matroid;
use crate::source::MatroidSource;

/// Sparse element of `M ⊗ M`, or of a higher tensor power.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct TensorClassVector {
    terms: BTreeMap<Vec<CanonicalKey>, BigRational>,
}

impl TensorClassVector {
    pub fn zero() -> Self {
        TensorClassVector::default()
    }

    pub fn add_term(&mut self, keys: Vec<CanonicalKey>, c: BigRational) {
        if c.is_zero() || keys.iter().any(|k| k.odd_auto()) {
            return;
        }
        match self.terms.entry(keys) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `a ⊗ b` for class vectors.
    pub fn tensor(a: &ClassVector, b: &ClassVector) -> Self {
        let mut out = TensorClassVector::zero();
        for (ka, ca) in a.terms() {
            for (kb, cb) in b.terms() {
                out.add_term(vec![ka.clone(), kb.clone()], ca * cb);
            }
        }
        out
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<CanonicalKey>, &BigRational)> {
        self.terms.iter()
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

    pub fn coefficient(&self, keys: &[CanonicalKey]) -> BigRational {
        self.terms.get(keys).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn add(&self, other: &TensorClassVector) -> TensorClassVector {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &TensorClassVector) -> TensorClassVector {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }

    /// Applies a linear map to one tensor slot, with the Koszul sign
    /// `(−1)^{degree · (sizes of earlier slots)}`.
    fn map_slot<F>(&self, slot: usize, degree: usize, f: F) -> TensorClassVector
    where
        F: Fn(&CanonicalKey) -> Vec<(Vec<CanonicalKey>, BigRational)>,
    {
        let mut out = TensorClassVector::zero();
        for (keys, c) in &self.terms {
            let before: usize = keys[..slot].iter().map(|k| k.size()).sum();
            let sign = if degree * before % 2 == 1 { -BigRational::one() } else { BigRational::one() };
            for (img, d) in f(&keys[slot]) {
                let mut ks = keys[..slot].to_vec();
                ks.extend(img);
                ks.extend_from_slice(&keys[slot + 1..]);
                out.add_term(ks, c * &d * &sign);
            }
        }
        out
    }

    /// `(a⊗b) ⋆ (c⊗d) = (−1)^{|b||c|} (a⋆c) ⊗ (b⋆d)`.
    pub fn star(&self, other: &TensorClassVector) -> TensorClassVector {
        let mut out = TensorClassVector::zero();
        for (x, cx) in &self.terms {
            for (y, cy) in &other.terms {
                assert_eq!(x.len(), y.len(), "tensor powers differ");
                let mut sign = 0usize;
                let mut keys = Vec::with_capacity(x.len());
                let mut coef = cx * cy;
                let mut zero = false;
                for i in 0..x.len() {
                    // move y[i] past x[i+1..]
                    let later: usize = x[i + 1..].iter().map(|k| k.size()).sum();
                    sign += later * y[i].size();
                    match star_keys(&x[i], &y[i]) {
                        Some((k, s)) => {
                            keys.push(k);
                            if s < 0 {
                                coef = -coef;
                            }
                        }
                        None => {
                            zero = true;
                            break;
                        }
                    }
                }
                if zero {
                    continue;
                }
                if sign % 2 == 1 {
                    coef = -coef;
                }
                out.add_term(keys, coef);
            }
        }
        out
    }
}

impl fmt::Debug for TensorClassVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(ks, c)| {
                let slots: Vec<String> = ks.iter().map(|k| format!("[{k}]")).collect();
                format!("{c}·{}", slots.join("⊗"))
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

fn star_keys(a: &CanonicalKey, b: &CanonicalKey) -> Option<(CanonicalKey, i32)> {
    normalize(&a.representative().direct_sum(&b.representative()))
}

/// The product on classes, `[M, ω_m] ⋆ [Q, ω_q] = [M ⊕ Q, ω_{m+q}]`.
pub fn star(a: &ClassVector, b: &ClassVector) -> ClassVector {
    let mut out = ClassVector::zero();
    for (ka, ca) in a.terms() {
        for (kb, cb) in b.terms() {
            if let Some((k, s)) = star_keys(ka, kb) {
                out.add_term(k, ca * cb * rational(s as i64));
            }
        }
    }
    out
}

/// `Σ_S sgn(shuffle S) [M|S] ⊗ [M/S]` on a single matroid.
pub fn coproduct_matroid(m: &Matroid) -> TensorClassVector {
    let n = m.size();
    let mut out = TensorClassVector::zero();
    for s in 0..=full_mask(n) as u32 {
        let s = s as crate::bits::Mask;
        let Some((k1, s1)) = normalize(&m.restrict_unchecked(s)) else { continue };
        let Some((k2, s2)) = normalize(&m.contract_set_unchecked(s)) else { continue };
        let sign = shuffle_sign(s, n) * s1 * s2;
        out.add_term(vec![k1, k2], rational(sign as i64));
    }
    out
}

pub fn coproduct(v: &ClassVector) -> TensorClassVector {
    let mut out = TensorClassVector::zero();
    for (k, c) in v.terms() {
        for (keys, d) in coproduct_matroid(&k.representative()).terms {
            out.add_term(keys, c * d);
        }
    }
    out
}

/// Coefficient of the empty class.
pub fn counit(v: &ClassVector) -> BigRational {
    v.coefficient(&key_of(&Matroid::empty()))
}

fn coproduct_key(k: &CanonicalKey) -> Vec<(Vec<CanonicalKey>, BigRational)> {
    coproduct_matroid(&k.representative()).terms.into_iter().collect()
}

fn differential_key(kind: DifferentialKind, k: &CanonicalKey) -> Vec<(Vec<CanonicalKey>, BigRational)> {
    apply_differential(kind, &ClassVector::basis(k))
        .terms()
        .map(|(k, c)| (vec![k.clone()], c.clone()))
        .collect()
}

fn counit_key(k: &CanonicalKey) -> Vec<(Vec<CanonicalKey>, BigRational)> {
    if k.size() == 0 {
        vec![(Vec::new(), BigRational::one())]
    } else {
        Vec::new()
    }
}

fn as_tensor1(v: &ClassVector) -> TensorClassVector {
    let mut out = TensorClassVector::zero();
    for (k, c) in v.terms() {
        out.add_term(vec![k.clone()], c.clone());
    }
    out
}

/// Which side of `Δ` a differential passes through.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl DifferentialKind {
    /// `Con` and `Lp` are left coderivations, `Del` and `Clp` right ones.
    pub fn coderivation_side(self) -> Option<Side> {
        match self {
            DifferentialKind::Del | DifferentialKind::Clp => Some(Side::Right),
            DifferentialKind::Con | DifferentialKind::Lp => Some(Side::Left),
            _ => None,
        }
    }
}

/// Checks `Δ∂ = (∂⊗id)Δ` (left) or `Δ∂ = (id⊗∂)Δ` (right) on `v`.
pub fn coderivation_holds(kind: DifferentialKind, side: Side, v: &ClassVector) -> bool {
    let lhs = coproduct(&apply_differential(kind, v));
    let dv = coproduct(v);
    let rhs = match side {
        Side::Left => dv.map_slot(0, 1, |k| differential_key(kind, k)),
        Side::Right => dv.map_slot(1, 1, |k| differential_key(kind, k)),
    };
    lhs == rhs
}

/// Checks `∂(a⋆b) = ∂a⋆b + (−1)^{|a|} a⋆∂b`.
pub fn leibniz_holds(kind: DifferentialKind, a: &CanonicalKey, b: &CanonicalKey) -> bool {
    let va = ClassVector::basis(a);
    let vb = ClassVector::basis(b);
    let lhs = apply_differential(kind, &star(&va, &vb));
    let t1 = star(&apply_differential(kind, &va), &vb);
    let t2 = star(&va, &apply_differential(kind, &vb));
    let rhs = if a.size() % 2 == 0 { t1.add(&t2) } else { t1.sub(&t2) };
    lhs == rhs
}

/// The loop and coloop classes of degree one.
pub fn loop_class() -> ClassVector {
    ClassVector::from_matroid(&Matroid::uniform(0, 1).expect("valid"))
}

pub fn coloop_class() -> ClassVector {
    ClassVector::from_matroid(&Matroid::uniform(1, 1).expect("valid"))
}

/// The degree-one generator `ℓ` whose multiplication contracts a differential.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Loop,
    Coloop,
}

impl Generator {
    pub fn class(self) -> ClassVector {
        match self {
            Generator::Loop => loop_class(),
            Generator::Coloop => coloop_class(),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Generator::Loop => "loop",
            Generator::Coloop => "coloop",
        }
    }
}

/// The (differential, generator) pairs for which `h(v) = (−1)^n v⋆ℓ` is a
/// contracting homotopy.
pub const HOMOTOPY_PAIRS: [(DifferentialKind, Generator); 8] = [
    (DifferentialKind::Del, Generator::Loop),
    (DifferentialKind::DelTot, Generator::Loop),
    (DifferentialKind::Lp, Generator::Loop),
    (DifferentialKind::ConTot, Generator::Loop),
    (DifferentialKind::Clp, Generator::Coloop),
    (DifferentialKind::DelTot, Generator::Coloop),
    (DifferentialKind::Con, Generator::Coloop),
    (DifferentialKind::ConTot, Generator::Coloop),
];

/// `h(v) = (−1)^n v ⋆ ℓ` for `v` homogeneous of degree `n`.
pub fn contracting_homotopy(generator: Generator, v: &ClassVector) -> Result<ClassVector> {
    let n = v.degree().map_err(|_| Error::MixedDegree)?.unwrap_or(0);
    let p = star(v, &generator.class());
    Ok(if n % 2 == 0 { p } else { p.neg() })
}

/// `∂h + h∂ − id` applied to `v`.
pub fn homotopy_defect(kind: DifferentialKind, generator: Generator, v: &ClassVector) -> Result<ClassVector> {
    let dh = apply_differential(kind, &contracting_homotopy(generator, v)?);
    let hd = contracting_homotopy(generator, &apply_differential(kind, v))?;
    Ok(dh.add(&hd).sub(v))
}

/// Usable basis keys of each degree `0..=max_n`.
fn basis_by_degree(max_n: usize, source: &MatroidSource) -> Result<Vec<Vec<CanonicalKey>>> {
    (0..=max_n).map(|n| Ok(chain_basis(n, &ComplexSpec::all(), source)?.keys().to_vec())).collect()
}

/// Ordered tuples of basis keys with total degree at most `max_n`.
fn tuples(basis: &[Vec<CanonicalKey>], arity: usize, max_n: usize) -> Vec<Vec<CanonicalKey>> {
    let mut out: Vec<Vec<CanonicalKey>> = vec![Vec::new()];
    for _ in 0..arity {
        let mut next = Vec::new();
        for t in &out {
            let used: usize = t.iter().map(|k| k.size()).sum();
            for keys in basis.iter().take(max_n - used + 1) {
                for k in keys {
                    let mut u = t.clone();
                    u.push(k.clone());
                    next.push(u);
                }
            }
        }
        out = next;
    }
    out
}

fn degree_of(keys: &[CanonicalKey]) -> usize {
    keys.iter().map(|k| k.size()).sum()
}

/// Records one line per total degree, listing the tuples that fail.
fn summarize(report: &mut Report, identity: &str, max_n: usize, results: Vec<(Vec<CanonicalKey>, bool)>) {
    for n in 0..=max_n {
        let failing: Vec<String> = results
            .iter()
            .filter(|(ks, ok)| !ok && degree_of(ks) == n)
            .map(|(ks, _)| ks.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("|"))
            .collect();
        let checked = results.iter().any(|(ks, _)| degree_of(ks) == n);
        if checked {
            report.record(failing.is_empty(), identity, n, failing);
        }
    }
}

fn sweep<F>(tuples: Vec<Vec<CanonicalKey>>, f: F) -> Vec<(Vec<CanonicalKey>, bool)>
where
    F: Fn(&[CanonicalKey]) -> bool + Sync,
{
    tuples.into_par_iter().map(|t| {
        let ok = f(&t);
        (t, ok)
    }).collect()
}

/// `(a⋆b)⋆c = a⋆(b⋆c)` on basis triples.
pub fn verify_associativity(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let results = sweep(tuples(&basis, 3, max_n), |t| {
        let [a, b, c] = [0, 1, 2].map(|i| ClassVector::basis(&t[i]));
        star(&star(&a, &b), &c) == star(&a, &star(&b, &c))
    });
    let mut r = Report::new();
    summarize(&mut r, "associativity", max_n, results);
    Ok(r)
}

/// `a⋆b = (−1)^{|a||b|} b⋆a` on basis pairs.
pub fn verify_graded_commutativity(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let results = sweep(tuples(&basis, 2, max_n), |t| {
        let (a, b) = (ClassVector::basis(&t[0]), ClassVector::basis(&t[1]));
        let ba = star(&b, &a);
        let ba = if t[0].size() * t[1].size() % 2 == 1 { ba.neg() } else { ba };
        star(&a, &b) == ba
    });
    let mut r = Report::new();
    summarize(&mut r, "graded-commutativity", max_n, results);
    Ok(r)
}

/// Unit and counit axioms on every basis class.
pub fn verify_unit_counit(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let unit = ClassVector::unit();
    let results = sweep(tuples(&basis, 1, max_n), |t| {
        let v = ClassVector::basis(&t[0]);
        let d = coproduct(&v);
        let left = d.map_slot(0, 0, counit_key);
        let right = d.map_slot(1, 0, counit_key);
        star(&unit, &v) == v && star(&v, &unit) == v && left == as_tensor1(&v) && right == as_tensor1(&v)
    });
    let mut r = Report::new();
    summarize(&mut r, "unit-counit", max_n, results);
    Ok(r)
}

/// `(Δ⊗id)Δ = (id⊗Δ)Δ` on every basis class.
pub fn verify_coassociativity(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let results = sweep(tuples(&basis, 1, max_n), |t| coassociative_on(&t[0]));
    let mut r = Report::new();
    summarize(&mut r, "coassociativity", max_n, results);
    Ok(r)
}

pub fn coassociative_on(k: &CanonicalKey) -> bool {
    let d = coproduct(&ClassVector::basis(k));
    d.map_slot(0, 0, coproduct_key) == d.map_slot(1, 0, coproduct_key)
}

/// `Δ(a⋆b) = Δa ⋆ Δb` on basis pairs.
pub fn verify_bialgebra(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let results = sweep(tuples(&basis, 2, max_n), |t| {
        let (a, b) = (ClassVector::basis(&t[0]), ClassVector::basis(&t[1]));
        coproduct(&star(&a, &b)) == coproduct(&a).star(&coproduct(&b))
    });
    let mut r = Report::new();
    summarize(&mut r, "bialgebra", max_n, results);
    Ok(r)
}

/// Leibniz rule for one differential on basis pairs.
pub fn verify_leibniz(kind: DifferentialKind, max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let results = sweep(tuples(&basis, 2, max_n), |t| leibniz_holds(kind, &t[0], &t[1]));
    let mut r = Report::new();
    summarize(&mut r, &format!("leibniz:{kind}"), max_n, results);
    Ok(r)
}

/// One-sided coderivation identity on every basis class.
pub fn verify_coderivation(kind: DifferentialKind, side: Side, max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let results = sweep(tuples(&basis, 1, max_n), |t| coderivation_holds(kind, side, &ClassVector::basis(&t[0])));
    let tag = match side {
        Side::Left => "left",
        Side::Right => "right",
    };
    let mut r = Report::new();
    summarize(&mut r, &format!("coderivation:{tag}:{kind}"), max_n, results);
    Ok(r)
}

/// `∂h + h∂ = id` on every basis class, for each pair in [`HOMOTOPY_PAIRS`].
pub fn verify_homotopy(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let mut r = Report::new();
    for (kind, g) in HOMOTOPY_PAIRS {
        let results = sweep(tuples(&basis, 1, max_n), |t| {
            homotopy_defect(kind, g, &ClassVector::basis(&t[0])).map(|d| d.is_zero()).unwrap_or(false)
        });
        summarize(&mut r, &format!("homotopy:{kind}:{}", g.tag()), max_n, results);
    }
    Ok(r)
}

/// The full product/coproduct suite.
pub fn verify_hopf(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let mut r = Report::new();
    r.extend(verify_unit_counit(max_n, source)?);
    r.extend(verify_associativity(max_n, source)?);
    r.extend(verify_graded_commutativity(max_n, source)?);
    r.extend(verify_coassociativity(max_n, source)?);
    r.extend(verify_bialgebra(max_n, source)?);
    for kind in DifferentialKind::ALL {
        r.extend(verify_leibniz(kind, max_n, source)?);
        if let Some(side) = kind.coderivation_side() {
            r.extend(verify_coderivation(kind, side, max_n, source)?);
        }
    }
    Ok(r)
}

/// `[tⁿ] ∏_{m odd}(1+t^m)^{c_m} ∏_{m even}(1−t^m)^{−c_m}` for `n ≤ max_n`.
pub fn free_algebra_dims(connected_counts: &[usize], max_n: usize) -> Vec<u128> {
    let mut poly = vec![0u128; max_n + 1];
    poly[0] = 1;
    for (m, &c) in connected_counts.iter().enumerate().skip(1) {
        for _ in 0..c {
            if m % 2 == 1 {
                // multiply by 1 + t^m
                for i in (m..=max_n).rev() {
                    poly[i] += poly[i - m];
                }
            } else {
                // multiply by 1/(1 - t^m)
                for i in m..=max_n {
                    poly[i] += poly[i - m];
                }
            }
        }
    }
    poly
}

/// Compares `dim M_n` with the free graded-commutative algebra on the
/// connected classes, for `n ≤ max_n`.
pub fn connected_dim_check(max_n: usize, source: &MatroidSource) -> Result<Report> {
    let basis = basis_by_degree(max_n, source)?;
    let counts: Vec<usize> =
        basis.iter().map(|ks| ks.iter().filter(|k| k.representative().is_connected()).count()).collect();
    let predicted = free_algebra_dims(&counts, max_n);
    let mut r = Report::new();
    for n in 0..=max_n {
        let ok = predicted[n] == basis[n].len() as u128;
        r.record(ok, "free-algebra-dimension", n, vec![format!("dim={}", basis[n].len()), format!("predicted={}", predicted[n])]);
    }
    Ok(r)
}
