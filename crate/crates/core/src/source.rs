//! Where chain bases come from: the built-in enumerator or census files.
//!
//! MTRD v1 is one basis list per line, `<n> <r> <k> <mask_1> ... <mask_k>`,
//! after a first line `MTRD 1`. F2DB v1 is blank-line-separated blocks of 0/1
//! rows, one matroid per block. Both accept `# property: <tags>` and
//! `# degrees: <list>` directives; a file without a degree directive covers
//! exactly the degrees of its records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use dashmap::DashMap;
use rayon::prelude::*;

use crate::bits::{popcount, Mask};
use crate::canonical::CanonicalKey;
use crate::classes::key_of;
use crate::complexes::{ComplexSpec, Property};
use crate::enumerate::{enumerate_all, MAX_ENUMERATED};
use crate::error::{Error, Result};
use crate::matroid::Matroid;

/// Classes a database promises to contain in full.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Coverage {
    pub degrees: BTreeSet<usize>,
    pub properties: BTreeSet<Property>,
    pub connected: bool,
}

impl Coverage {
    fn merge(&mut self, other: &Coverage) {
        self.degrees.extend(other.degrees.iter().copied());
        self.properties.extend(other.properties.iter().copied());
        self.connected |= other.connected;
    }

    /// Whether every class satisfying `spec` satisfies the declared tags.
    fn admits(&self, spec: &ComplexSpec) -> bool {
        let implied = implied_properties(spec.properties());
        (!self.connected || spec.connected()) && self.properties.iter().all(|p| implied.contains(p))
    }

    fn describe(&self) -> String {
        let mut tags: Vec<&str> = self.properties.iter().map(|p| p.tag()).collect();
        if self.connected {
            tags.push("connected");
        }
        if tags.is_empty() {
            "all".into()
        } else {
            tags.join(",")
        }
    }
}

fn implied_properties(props: &[Property]) -> BTreeSet<Property> {
    let mut out: BTreeSet<Property> = props.iter().copied().collect();
    loop {
        let mut next = out.clone();
        for p in &out {
            match p {
                Property::Simple => {
                    next.insert(Property::Loopless);
                }
                Property::Cosimple => {
                    next.insert(Property::Coloopless);
                }
                Property::Graphic | Property::Cographic => {
                    next.insert(Property::Regular);
                }
                Property::Regular => {
                    next.insert(Property::Binary);
                    next.insert(Property::Ternary);
                }
                _ => {}
            }
        }
        if next == out {
            return out;
        }
        out = next;
    }
}

#[derive(Debug)]
enum Backend {
    Enumerator { max_n: usize },
    Database { origin: String, by_degree: BTreeMap<usize, Arc<Vec<CanonicalKey>>>, coverage: Coverage },
    Layered(Vec<MatroidSource>),
}

/// A provider of isomorphism-class representatives by degree.
#[derive(Debug)]
pub struct MatroidSource {
    backend: Backend,
    cache: DashMap<usize, Arc<Vec<CanonicalKey>>>,
}

impl MatroidSource {
    /// All classes on at most `max_n <= 7` elements, generated on demand.
    pub fn enumerator(max_n: usize) -> Result<Self> {
        if max_n > MAX_ENUMERATED {
            return Err(Error::DegreeTooLarge(max_n));
        }
        Ok(MatroidSource::with_backend(Backend::Enumerator { max_n }))
    }

    fn with_backend(backend: Backend) -> Self {
        MatroidSource { backend, cache: DashMap::new() }
    }

    /// A database of the given matroids, covering the listed degrees.
    pub fn from_matroids(origin: &str, matroids: &[Matroid], coverage: Coverage) -> Result<Self> {
        for (i, m) in matroids.iter().enumerate() {
            check_declared(m, &coverage).map_err(|e| Error::InvalidRecord { line: i + 1, source: Box::new(e) })?;
        }
        let mut keyed: BTreeMap<usize, BTreeSet<CanonicalKey>> = BTreeMap::new();
        let keys: Vec<CanonicalKey> = matroids.par_iter().map(key_of).collect();
        for k in keys {
            keyed.entry(k.size()).or_default().insert(k);
        }
        let by_degree = keyed.into_iter().map(|(n, s)| (n, Arc::new(s.into_iter().collect()))).collect();
        Ok(MatroidSource::with_backend(Backend::Database { origin: origin.into(), by_degree, coverage }))
    }

    /// Reads MTRD (`.mtrd`) or F2DB (`.f2db`, `.f2`) files into one database.
    /// Degree coverage is the union; declared properties must agree.
    pub fn from_files(paths: &[PathBuf]) -> Result<Self> {
        let mut matroids = Vec::new();
        let mut coverage: Option<Coverage> = None;
        let mut origins = Vec::new();
        for p in paths {
            let (ms, cov) = read_file(p)?;
            matroids.extend(ms);
            origins.push(p.display().to_string());
            match &mut coverage {
                None => coverage = Some(cov),
                Some(c) => {
                    if c.properties != cov.properties || c.connected != cov.connected {
                        return Err(Error::Io(format!(
                            "{} declares `{}` but earlier files declare `{}`",
                            p.display(),
                            cov.describe(),
                            c.describe()
                        )));
                    }
                    c.merge(&cov);
                }
            }
        }
        MatroidSource::from_matroids(&origins.join(","), &matroids, coverage.unwrap_or_default())
    }

    /// A file, or every `.mtrd`/`.f2db` file in a directory.
    pub fn from_path(path: &Path) -> Result<Self> {
        if path.is_dir() {
            let mut files: Vec<PathBuf> = std::fs::read_dir(path)?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| format_of(p).is_some())
                .collect();
            files.sort();
            if files.is_empty() {
                return Err(Error::Io(format!("no .mtrd or .f2db files in {}", path.display())));
            }
            MatroidSource::from_files(&files)
        } else {
            MatroidSource::from_files(&[path.to_path_buf()])
        }
    }

    /// Answers from the first layer that covers a query.
    pub fn layered(layers: Vec<MatroidSource>) -> Self {
        MatroidSource::with_backend(Backend::Layered(layers))
    }

    /// Whether degree `n` is covered for the full class of matroids.
    pub fn covers(&self, n: usize) -> bool {
        self.covers_spec(n, &ComplexSpec::all())
    }

    /// Whether every class of degree `n` satisfying `spec` is available.
    pub fn covers_spec(&self, n: usize, spec: &ComplexSpec) -> bool {
        match &self.backend {
            Backend::Enumerator { max_n } => n <= *max_n,
            Backend::Database { coverage, .. } => coverage.degrees.contains(&n) && coverage.admits(spec),
            Backend::Layered(ls) => ls.iter().any(|l| l.covers_spec(n, spec)),
        }
    }

    /// Largest `m` such that every degree `0..=m` is covered for `spec`.
    pub fn max_covered(&self, spec: &ComplexSpec) -> Option<usize> {
        (0..=crate::bits::MAX_ELEMENTS).take_while(|&n| self.covers_spec(n, spec)).last()
    }

    /// All classes of degree `n`, for sources with unrestricted coverage.
    pub fn classes(&self, n: usize) -> Result<Arc<Vec<CanonicalKey>>> {
        self.classes_for(n, &ComplexSpec::all())
    }

    /// A list of classes of degree `n` containing every class that satisfies
    /// `spec`. Callers apply `spec` themselves.
    pub fn classes_for(&self, n: usize, spec: &ComplexSpec) -> Result<Arc<Vec<CanonicalKey>>> {
        match &self.backend {
            Backend::Enumerator { max_n } => {
                if n > *max_n {
                    return Err(Error::SourceIncomplete {
                        n,
                        detail: format!("enumerator limited to n <= {max_n}"),
                    });
                }
                if let Some(hit) = self.cache.get(&n) {
                    return Ok(hit.clone());
                }
                let keys: Vec<CanonicalKey> = enumerate_all(n)?.par_iter().map(key_of).collect();
                let keys = Arc::new(keys);
                self.cache.insert(n, keys.clone());
                Ok(keys)
            }
            Backend::Database { origin, by_degree, coverage } => {
                if !coverage.degrees.contains(&n) {
                    return Err(Error::SourceIncomplete { n, detail: format!("{origin} has no degree {n}") });
                }
                if !coverage.admits(spec) {
                    return Err(Error::SourceIncomplete {
                        n,
                        detail: format!("{origin} only holds `{}` classes, query is `{spec}`", coverage.describe()),
                    });
                }
                Ok(by_degree.get(&n).cloned().unwrap_or_default())
            }
            Backend::Layered(ls) => match ls.iter().find(|l| l.covers_spec(n, spec)) {
                Some(l) => l.classes_for(n, spec),
                None => Err(Error::SourceIncomplete { n, detail: "no layer covers this degree".into() }),
            },
        }
    }

    /// Short human description.
    pub fn describe(&self) -> String {
        match &self.backend {
            Backend::Enumerator { max_n } => format!("enumerator(n<={max_n})"),
            Backend::Database { origin, coverage, .. } => {
                let ds: Vec<String> = coverage.degrees.iter().map(|d| d.to_string()).collect();
                format!("{origin} [{}; degrees {}]", coverage.describe(), ds.join(","))
            }
            Backend::Layered(ls) => ls.iter().map(|l| l.describe()).collect::<Vec<_>>().join(" + "),
        }
    }

    /// Every matroid held by a database backend, grouped by degree.
    pub fn stored(&self) -> BTreeMap<usize, usize> {
        match &self.backend {
            Backend::Database { by_degree, .. } => by_degree.iter().map(|(n, v)| (*n, v.len())).collect(),
            _ => BTreeMap::new(),
        }
    }
}

fn check_declared(m: &Matroid, coverage: &Coverage) -> Result<()> {
    for p in &coverage.properties {
        if !p.holds(m) {
            return Err(Error::Io(format!("matroid violates declared property `{}`", p.tag())));
        }
    }
    if coverage.connected && !m.is_connected() {
        return Err(Error::Io("matroid violates declared property `connected`".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Mtrd,
    F2db,
}

fn format_of(p: &Path) -> Option<Format> {
    match p.extension()?.to_str()? {
        "mtrd" => Some(Format::Mtrd),
        "f2db" | "f2" => Some(Format::F2db),
        _ => None,
    }
}

fn read_file(p: &Path) -> Result<(Vec<Matroid>, Coverage)> {
    let text = std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    match format_of(p) {
        Some(Format::F2db) => parse_f2db_str(&text),
        Some(Format::Mtrd) => parse_mtrd_str(&text),
        None if text.starts_with("MTRD") => parse_mtrd_str(&text),
        None => parse_f2db_str(&text),
    }
}

/// Applies a `# key: value` directive; returns false for plain comments.
fn directive(line: &str, lineno: usize, cov: &mut Coverage, degrees: &mut Option<BTreeSet<usize>>) -> Result<bool> {
    let body = line.trim_start_matches('#').trim();
    let Some((key, value)) = body.split_once(':') else { return Ok(false) };
    match key.trim() {
        "property" | "properties" => {
            for tag in value.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
                match tag {
                    "connected" => cov.connected = true,
                    "all" => {}
                    t => {
                        cov.properties.insert(t.parse()?);
                    }
                }
            }
            Ok(true)
        }
        "degrees" => {
            let set = degrees.get_or_insert_with(BTreeSet::new);
            for part in value.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let bad = || Error::ParseError { line: lineno, msg: format!("bad degree range `{part}`") };
                match part.split_once('-') {
                    Some((a, b)) => {
                        let a: usize = a.trim().parse().map_err(|_| bad())?;
                        let b: usize = b.trim().parse().map_err(|_| bad())?;
                        set.extend(a..=b);
                    }
                    None => {
                        set.insert(part.parse().map_err(|_| bad())?);
                    }
                }
            }
            Ok(true)
        }
        _ => Ok(false),
    }
}

fn finish_coverage(mut cov: Coverage, degrees: Option<BTreeSet<usize>>, ms: &[Matroid]) -> Coverage {
    cov.degrees = degrees.unwrap_or_else(|| ms.iter().map(|m| m.size()).collect());
    cov
}

/// Parses MTRD v1 text.
pub fn parse_mtrd_str(text: &str) -> Result<(Vec<Matroid>, Coverage)> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, l)) if l.trim() == "MTRD 1" => {}
        _ => return Err(Error::ParseError { line: 1, msg: "expected header `MTRD 1`".into() }),
    }
    let mut cov = Coverage::default();
    let mut degrees = None;
    let mut out = Vec::new();
    for (i, raw) in lines {
        let lineno = i + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            directive(line, lineno, &mut cov, &mut degrees)?;
            continue;
        }
        let nums: Vec<u64> = line
            .split_whitespace()
            .map(|t| t.parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::ParseError { line: lineno, msg: format!("not an integer list: {e}") })?;
        if nums.len() < 3 {
            return Err(Error::ParseError { line: lineno, msg: "record needs `<n> <r> <k>`".into() });
        }
        let (n, r, k) = (nums[0] as usize, nums[1] as usize, nums[2] as usize);
        let masks = &nums[3..];
        if masks.len() != k {
            return Err(Error::ParseError {
                line: lineno,
                msg: format!("declared {k} bases but found {}", masks.len()),
            });
        }
        if masks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ParseError { line: lineno, msg: "masks must be strictly increasing".into() });
        }
        if masks.iter().any(|&b| b > Mask::MAX as u64) {
            return Err(Error::ParseError { line: lineno, msg: "mask exceeds 16 bits".into() });
        }
        let bases: Vec<Mask> = masks.iter().map(|&b| b as Mask).collect();
        let m = Matroid::from_bases(n, r, &bases).map_err(|e| Error::InvalidRecord { line: lineno, source: Box::new(e) })?;
        check_declared(&m, &cov).map_err(|e| Error::InvalidRecord { line: lineno, source: Box::new(e) })?;
        out.push(m);
    }
    let cov = finish_coverage(cov, degrees, &out);
    Ok((out, cov))
}

/// Reads an MTRD file into a database source.
pub fn parse_mtrd(path: &Path) -> Result<MatroidSource> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let (ms, cov) = parse_mtrd_str(&text)?;
    MatroidSource::from_matroids(&path.display().to_string(), &ms, cov)
}

/// MTRD v1 text for `matroids`.
pub fn format_mtrd(matroids: &[Matroid]) -> String {
    let mut s = String::from("MTRD 1\n");
    for m in matroids {
        let _ = write!(s, "{} {} {}", m.size(), m.rank(), m.bases().len());
        for b in m.bases() {
            let _ = write!(s, " {b}");
        }
        s.push('\n');
    }
    s
}

pub fn write_mtrd(path: &Path, matroids: &[Matroid]) -> Result<()> {
    std::fs::write(path, format_mtrd(matroids)).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Parses F2DB v1 text.
pub fn parse_f2db_str(text: &str) -> Result<(Vec<Matroid>, Coverage)> {
    let mut cov = Coverage::default();
    let mut degrees = None;
    let mut blocks: Vec<(usize, Vec<Vec<u8>>)> = Vec::new();
    let mut current: Option<(usize, Vec<Vec<u8>>)> = None;
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = raw.trim();
        if line.starts_with('#') {
            directive(line, lineno, &mut cov, &mut degrees)?;
            continue;
        }
        if line.is_empty() {
            blocks.extend(current.take());
            continue;
        }
        let row: Vec<u8> = line
            .chars()
            .filter(|c| !c.is_whitespace())
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::ParseError { line: lineno, msg: format!("unexpected `{other}` in 0/1 row") }),
            })
            .collect::<Result<_>>()?;
        current.get_or_insert_with(|| (lineno, Vec::new())).1.push(row);
    }
    blocks.extend(current.take());
    let mut out = Vec::with_capacity(blocks.len());
    for (lineno, rows) in blocks {
        let m = Matroid::from_f2_matrix(&rows).map_err(|e| Error::InvalidRecord { line: lineno, source: Box::new(e) })?;
        check_declared(&m, &cov).map_err(|e| Error::InvalidRecord { line: lineno, source: Box::new(e) })?;
        out.push(m);
    }
    let cov = finish_coverage(cov, degrees, &out);
    Ok((out, cov))
}

/// Reads an F2DB file into a database source.
pub fn parse_f2db(path: &Path) -> Result<MatroidSource> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let (ms, cov) = parse_f2db_str(&text)?;
    MatroidSource::from_matroids(&path.display().to_string(), &ms, cov)
}

/// F2DB v1 text: a reduced GF(2) representation per binary matroid.
/// Returns `None` if some matroid is not binary.
pub fn format_f2db(matroids: &[Matroid], header: &str) -> Option<String> {
    let mut s = String::new();
    for line in header.lines() {
        let _ = writeln!(s, "# {line}");
    }
    for (i, m) in matroids.iter().enumerate() {
        if i > 0 {
            s.push('\n');
        }
        let rows = f2_rows(m)?;
        for row in rows {
            s.extend(row.iter().map(|&b| if b == 1 { '1' } else { '0' }));
            s.push('\n');
        }
    }
    Some(s)
}

/// Rows of `[I | A]` from the fundamental circuits of the first basis; a
/// rank-0 matroid gets one zero row.
fn f2_rows(m: &Matroid) -> Option<Vec<Vec<u8>>> {
    if !m.is_binary() {
        return None;
    }
    let n = m.size();
    let b0 = m.bases()[0];
    let r = popcount(b0);
    if r == 0 {
        return (n > 0).then(|| vec![vec![0; n]]);
    }
    let basis: Vec<usize> = crate::bits::bits(b0).collect();
    let mut rows = vec![vec![0u8; n]; r];
    for e in 0..n {
        for (row, &b) in basis.iter().enumerate() {
            let hit = if b0 >> e & 1 == 1 { e == b } else { m.is_basis((b0 & !(1 << b)) | (1 << e)) };
            if hit {
                rows[row][e] = 1;
            }
        }
    }
    Some(rows)
}
