//! Shared corpus and independent oracles for the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use nestkit::cyclic::CyclicBibd;
use nestkit::designs::Design;
use nestkit::diff_families::{develop, search_df, DifferenceFamily, SearchResult};
use nestkit::groups::AbelianGroup;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).expect("fixture exists")
}

pub struct CorpusEntry {
    pub name: String,
    pub design: Design,
    pub family: Option<DifferenceFamily>,
}

pub fn family(group: &str, blocks: &[&str], lambda: usize) -> DifferenceFamily {
    let g: AbelianGroup = group.parse().unwrap();
    let blocks = blocks.iter().map(|b| g.parse_subset(b).unwrap()).collect();
    DifferenceFamily::new(g, blocks, lambda).unwrap()
}

fn searched(group: &str, k: usize, lambda: usize) -> DifferenceFamily {
    let g: AbelianGroup = group.parse().unwrap();
    match search_df(&g, k, lambda, 50_000_000).unwrap().result {
        SearchResult::Found(f) => f,
        other => panic!("({group},{k},{lambda}) search gave {other:?}"),
    }
}

/// Lines of the affine plane AG(2,3) on Z3 x Z3, points indexed `3x + y`.
fn affine_plane_3() -> Design {
    let mut lines: Vec<Vec<usize>> = Vec::new();
    for dir in [(0usize, 1usize), (1, 0), (1, 1), (1, 2)] {
        let mut seen = HashSet::new();
        for x in 0..3 {
            for y in 0..3 {
                let mut line: Vec<usize> = (0..3)
                    .map(|t| 3 * ((x + t * dir.0) % 3) + (y + t * dir.1) % 3)
                    .collect();
                line.sort_unstable();
                if seen.insert(line.clone()) {
                    lines.push(line);
                }
            }
        }
    }
    Design::new(9, 3, 1, lines).unwrap()
}

fn cyclic_fixture(name: &str) -> CyclicBibd {
    nestkit::cli::parse_cyclic(&read_fixture(name)).unwrap()
}

/// At least 20 BIBDs with `v ≤ 31`.
pub fn corpus() -> Vec<CorpusEntry> {
    let families: Vec<(&str, DifferenceFamily)> = vec![
        ("(7,3,1) {0,1,3}", family("Z7", &["0,1,3"], 1)),
        ("(7,4,2) {0,1,2,4}", family("Z7", &["0,1,2,4"], 2)),
        ("(7,3,2) two orbits", family("Z7", &["0,1,3", "0,2,3"], 2)),
        ("(5,2,1)", family("Z5", &["0,1", "0,2"], 1)),
        ("(5,4,3)", family("Z5", &["0,1,2,3"], 3)),
        ("(11,5,2) residues", family("Z11", &["1,3,4,5,9"], 2)),
        ("(11,6,3)", family("Z11", &["0,2,6,7,8,10"], 3)),
        ("(13,3,1)", family("Z13", &["0,1,4", "0,2,7"], 1)),
        ("(13,3,1) banff", family("Z13", &["7,8,11", "4,10,12"], 1)),
        ("(13,4,1)", family("Z13", &["0,1,3,9"], 1)),
        ("(15,7,3)", family("Z15", &["0,1,2,4,5,8,10"], 3)),
        (
            "(19,9,4) residues",
            family("Z19", &["1,4,5,6,7,9,11,16,17"], 4),
        ),
        ("(21,5,1)", family("Z21", &["3,6,7,12,14"], 1)),
        (
            "(23,11,5) residues",
            family("Z23", &["1,2,3,4,6,8,9,12,13,16,18"], 5),
        ),
        ("(31,6,1)", family("Z31", &["1,5,11,24,25,27"], 1)),
        (
            "(31,15,7) residues",
            family("Z31", &["1,2,4,5,7,8,9,10,14,16,18,19,20,25,28"], 7),
        ),
        ("(19,3,1) searched", searched("Z19", 3, 1)),
        ("(25,3,1) searched", searched("Z25", 3, 1)),
        ("(31,3,1) searched", searched("Z31", 3, 1)),
        ("(16,6,2) in Z4xZ4", searched("Z4xZ4", 6, 2)),
        ("(9,4,3) in Z3xZ3", searched("Z3xZ3", 4, 3)),
    ];
    let mut out: Vec<CorpusEntry> = families
        .into_iter()
        .map(|(name, f)| CorpusEntry {
            name: name.to_string(),
            design: develop(&f).unwrap_or_else(|e| panic!("{name}: {e}")),
            family: Some(f),
        })
        .collect();
    out.push(CorpusEntry {
        name: "(9,3,1) AG(2,3)".into(),
        design: affine_plane_3(),
        family: None,
    });
    for name in ["sts15.cyclic", "sts21.cyclic"] {
        out.push(CorpusEntry {
            name: format!("cyclic {name}"),
            design: cyclic_fixture(name).develop(),
            family: None,
        });
    }
    out
}

/// Pair multiplicities computed by direct enumeration.
pub fn pair_counts(blocks: &[Vec<usize>]) -> BTreeMap<(usize, usize), usize> {
    let mut counts = BTreeMap::new();
    for b in blocks {
        for (i, &x) in b.iter().enumerate() {
            for &y in &b[i + 1..] {
                *counts.entry((x.min(y), x.max(y))).or_insert(0) += 1;
            }
        }
    }
    counts
}

pub fn oracle_is_bibd(v: usize, lambda: usize, blocks: &[Vec<usize>]) -> bool {
    let counts = pair_counts(blocks);
    (0..v).all(|x| (x + 1..v).all(|y| counts.get(&(x, y)).copied().unwrap_or(0) == lambda))
}

pub fn oracle_is_packing(lambda: usize, blocks: &[Vec<usize>]) -> bool {
    pair_counts(blocks).values().all(|&c| c <= lambda)
}

/// Points get colors `colors[..v]`, blocks `colors[v..]`. Checks the
/// coloring is proper and that no two incidences share a color pair.
/// Returns the number of distinct color pairs when harmonious.
pub fn oracle_harmonious(v: usize, blocks: &[Vec<usize>], colors: &[usize]) -> Option<usize> {
    if colors.len() != v + blocks.len() {
        return None;
    }
    let mut seen = HashSet::new();
    for (i, b) in blocks.iter().enumerate() {
        let cb = colors[v + i];
        for &p in b {
            let cp = colors[p];
            if cp == cb || !seen.insert((cp.min(cb), cp.max(cb))) {
                return None;
            }
        }
    }
    Some(seen.len())
}

/// Components of `x` in a group with the given factor orders, mixed radix,
/// last factor fastest.
pub fn residues(orders: &[usize], mut x: usize) -> Vec<usize> {
    let mut r = vec![0; orders.len()];
    for i in (0..orders.len()).rev() {
        r[i] = x % orders[i];
        x /= orders[i];
    }
    r
}

pub fn index(orders: &[usize], r: &[usize]) -> usize {
    r.iter().zip(orders).fold(0, |acc, (&x, &n)| acc * n + x)
}

pub fn add(orders: &[usize], x: usize, y: usize) -> usize {
    let (a, b) = (residues(orders, x), residues(orders, y));
    let s: Vec<usize> = a
        .iter()
        .zip(&b)
        .zip(orders)
        .map(|((p, q), n)| (p + q) % n)
        .collect();
    index(orders, &s)
}

pub fn neg(orders: &[usize], x: usize) -> usize {
    let a = residues(orders, x);
    let s: Vec<usize> = a.iter().zip(orders).map(|(p, n)| (n - p) % n).collect();
    index(orders, &s)
}

pub fn order(orders: &[usize]) -> usize {
    orders.iter().product()
}
