//! Writes F2DB files of all connected simple regular matroids through a given
//! ground-set size, one file per degree.
//!
//! Usage: `regular_census <max_n> <out_dir>`
//!
//! Every simple regular matroid on n+1 elements is a single-column extension
//! (or a coloop extension) of one on n elements, so the census grows by
//! appending GF(2) columns and keeping the regular extensions.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

use matroidc_core::source::format_f2db;
use matroidc_core::{canonical_form, CanonicalKey, Matroid};
use rayon::prelude::*;

struct Class {
    columns: Vec<u64>,
    rank: usize,
    matroid: Matroid,
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    if args.len() != 3 {
        eprintln!("usage: regular_census <max_n> <out_dir>");
        std::process::exit(2);
    }
    let max_n: usize = args[1].parse().expect("max_n is an integer");
    let out = PathBuf::from(&args[2]);
    std::fs::create_dir_all(&out).expect("output directory");

    let mut level = vec![Class { columns: Vec::new(), rank: 0, matroid: Matroid::empty() }];
    for n in 0..=max_n {
        let start = Instant::now();
        let connected: Vec<&Matroid> = level.iter().map(|c| &c.matroid).filter(|m| m.is_connected()).collect();
        let header = format!("property: regular, simple, connected\ndegrees: {n}");
        let owned: Vec<Matroid> = connected.into_iter().cloned().collect();
        let text = format_f2db(&owned, &header).expect("regular matroids are binary");
        let path = out.join(format!("regular_simple_connected_{n:02}.f2db"));
        std::fs::write(&path, text).expect("write census file");
        eprintln!("n={n}: {} simple regular, {} connected", level.len(), owned.len());
        if n == max_n {
            break;
        }
        level = extend(&level);
        eprintln!("  extended in {:.1?}", start.elapsed());
    }
}

fn extend(level: &[Class]) -> Vec<Class> {
    let candidates: Vec<(CanonicalKey, Vec<u64>, usize, Matroid)> = level
        .par_iter()
        .flat_map_iter(|c| {
            let r = c.rank;
            let mut out = Vec::new();
            let mut push = |v: u64, rank: usize| {
                let mut cols = c.columns.clone();
                cols.push(v);
                let m = Matroid::from_f2_columns(&cols);
                let key = canonical_form(&m).0;
                out.push((key, cols, rank, m));
            };
            push(1 << r, r + 1);
            for v in 1..(1u64 << r) {
                if !c.columns.contains(&v) {
                    push(v, r);
                }
            }
            out
        })
        .collect();
    let mut unique: BTreeMap<CanonicalKey, (Vec<u64>, usize, Matroid)> = BTreeMap::new();
    for (k, cols, r, m) in candidates {
        unique.entry(k).or_insert((cols, r, m));
    }
    unique
        .into_par_iter()
        .filter(|(_, (_, _, m))| m.is_regular())
        .map(|(_, (columns, rank, matroid))| Class { columns, rank, matroid })
        .collect()
}
