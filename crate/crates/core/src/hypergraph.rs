//! Bipartite uniform multi-hypergraphs and the auxiliary constructions whose
//! `A`-perfect matchings encode nestings, Banff difference families and
//! disjoint orbit representatives.
//!
//! Every edge holds exactly one left (`A`) vertex and `rank` distinct right
//! vertices. Edges carry an [`EdgePayload`] recording the block and the
//! translation/anchor that produced them, so a matching decodes directly.

use std::collections::HashMap;
use std::fmt::Write as _;

use thiserror::Error;

use crate::cyclic::orbit_length;
use crate::designs::{
    apply_nesting, pair_count, pair_index, verify_bibd, Design, NestingCertificate, PairWitness,
};
use crate::diff_families::{verify_df, DifferenceFamily};
use crate::groups::AbelianGroup;
use crate::matching::{solve, MatchingError, Outcome, SolveReport, SolverConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HypergraphError {
    #[error("input design is not a BIBD: {0}")]
    NotABibd(PairWitness),
    #[error("input is not a difference family: {0}")]
    NotADifferenceFamily(String),
    #[error("base block {0} has a short orbit")]
    ShortOrbit(usize),
    #[error("point {point} is outside Z_{v}")]
    PointOutOfRange { point: usize, v: usize },
    #[error("edge {edge}: {reason}")]
    InvalidEdge { edge: usize, reason: String },
    #[error("unknown vertex {0:?}")]
    UnknownVertex(Vertex),
    #[error("codegree needs two distinct vertices")]
    SameVertex,
    #[error("diagnostic parameters D, alpha, beta must be positive")]
    InvalidParameter,
    #[error("dump line {line}: {reason}")]
    Dump { line: usize, reason: String },
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Block index and translation (or anchor point) that generated an edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgePayload {
    pub block: usize,
    pub shift: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HyperEdge {
    pub left: usize,
    /// Sorted, distinct.
    pub right: Vec<usize>,
    pub payload: EdgePayload,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Vertex {
    Left(usize),
    Right(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BipartiteHypergraph {
    left_count: usize,
    right_count: usize,
    rank: usize,
    edges: Vec<HyperEdge>,
}

impl BipartiteHypergraph {
    /// `rank` is the number of right vertices per edge; every edge must
    /// match it.
    pub fn new(
        left_count: usize,
        right_count: usize,
        rank: usize,
        edges: Vec<HyperEdge>,
    ) -> Result<Self, HypergraphError> {
        let mut checked = Vec::with_capacity(edges.len());
        for (i, mut e) in edges.into_iter().enumerate() {
            let invalid = |reason: String| HypergraphError::InvalidEdge { edge: i, reason };
            if e.left >= left_count {
                return Err(invalid(format!("left vertex {} out of range", e.left)));
            }
            if e.right.len() != rank {
                return Err(invalid(format!(
                    "{} right vertices, expected {rank}",
                    e.right.len()
                )));
            }
            e.right.sort_unstable();
            if e.right.windows(2).any(|w| w[0] == w[1]) {
                return Err(invalid("repeated right vertex".into()));
            }
            if let Some(&r) = e.right.last().filter(|&&r| r >= right_count) {
                return Err(invalid(format!("right vertex {r} out of range")));
            }
            checked.push(e);
        }
        Ok(Self {
            left_count,
            right_count,
            rank,
            edges: checked,
        })
    }

    pub fn left_count(&self) -> usize {
        self.left_count
    }

    pub fn right_count(&self) -> usize {
        self.right_count
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn edges(&self) -> &[HyperEdge] {
        &self.edges
    }

    /// Edge indices grouped by left vertex, in edge order.
    pub fn edges_by_left(&self) -> Vec<Vec<usize>> {
        let mut by_left = vec![Vec::new(); self.left_count];
        for (i, e) in self.edges.iter().enumerate() {
            by_left[e.left].push(i);
        }
        by_left
    }

    fn check_vertex(&self, v: Vertex) -> Result<(), HypergraphError> {
        let ok = match v {
            Vertex::Left(i) => i < self.left_count,
            Vertex::Right(i) => i < self.right_count,
        };
        if ok {
            Ok(())
        } else {
            Err(HypergraphError::UnknownVertex(v))
        }
    }

    fn edge_contains(e: &HyperEdge, v: Vertex) -> bool {
        match v {
            Vertex::Left(i) => e.left == i,
            Vertex::Right(r) => e.right.binary_search(&r).is_ok(),
        }
    }

    pub fn degree(&self, v: Vertex) -> Result<usize, HypergraphError> {
        self.check_vertex(v)?;
        Ok(self
            .edges
            .iter()
            .filter(|e| Self::edge_contains(e, v))
            .count())
    }

    /// Number of edges (with multiplicity) containing both vertices.
    pub fn codegree(&self, u: Vertex, w: Vertex) -> Result<usize, HypergraphError> {
        self.check_vertex(u)?;
        self.check_vertex(w)?;
        if u == w {
            return Err(HypergraphError::SameVertex);
        }
        Ok(self
            .edges
            .iter()
            .filter(|e| Self::edge_contains(e, u) && Self::edge_contains(e, w))
            .count())
    }

    pub fn left_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.left_count];
        for e in &self.edges {
            deg[e.left] += 1;
        }
        deg
    }

    pub fn right_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.right_count];
        for e in &self.edges {
            for &r in &e.right {
                deg[r] += 1;
            }
        }
        deg
    }

    /// Writes one edge per line: `left : r1,r2,... # block=B shift=A`.
    pub fn dump(&self) -> String {
        let mut out = format!(
            "# left={} right={} rank={}\n",
            self.left_count, self.right_count, self.rank
        );
        for e in &self.edges {
            let right: Vec<String> = e.right.iter().map(|r| r.to_string()).collect();
            let _ = writeln!(
                out,
                "{} : {} # block={} shift={}",
                e.left,
                right.join(","),
                e.payload.block,
                e.payload.shift
            );
        }
        out
    }

    /// Reads the format written by [`BipartiteHypergraph::dump`].
    pub fn parse_dump(text: &str) -> Result<Self, HypergraphError> {
        let err = |line: usize, reason: &str| HypergraphError::Dump {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "empty dump"))?;
        let mut dims = [None; 3];
        for field in header.trim_start_matches('#').split_whitespace() {
            let (key, value) = field.split_once('=').ok_or_else(|| err(1, "bad header"))?;
            let value: usize = value.parse().map_err(|_| err(1, "bad header value"))?;
            match key {
                "left" => dims[0] = Some(value),
                "right" => dims[1] = Some(value),
                "rank" => dims[2] = Some(value),
                _ => return Err(err(1, "unknown header field")),
            }
        }
        let [Some(left_count), Some(right_count), Some(rank)] = dims else {
            return Err(err(1, "header needs left, right and rank"));
        };
        let mut edges = Vec::new();
        for (i, line) in lines {
            let n = i + 1;
            if line.trim().is_empty() {
                continue;
            }
            let (body, payload) = line
                .split_once('#')
                .ok_or_else(|| err(n, "missing payload"))?;
            let (left, right) = body.split_once(':').ok_or_else(|| err(n, "missing ':'"))?;
            let left = left.trim().parse().map_err(|_| err(n, "bad left vertex"))?;
            let right = right
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|s| s.parse().map_err(|_| err(n, "bad right vertex")))
                .collect::<Result<Vec<usize>, _>>()?;
            let mut block = None;
            let mut shift = None;
            for field in payload.split_whitespace() {
                match field.split_once('=') {
                    Some(("block", x)) => block = x.parse().ok(),
                    Some(("shift", x)) => shift = x.parse().ok(),
                    _ => return Err(err(n, "bad payload field")),
                }
            }
            let (Some(block), Some(shift)) = (block, shift) else {
                return Err(err(n, "payload needs block and shift"));
            };
            edges.push(HyperEdge {
                left,
                right,
                payload: EdgePayload { block, shift },
            });
        }
        Self::new(left_count, right_count, rank, edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeReport {
    pub left_min: usize,
    pub left_max: usize,
    pub right_min: usize,
    pub right_max: usize,
    pub max_left_right_codegree: usize,
    pub max_right_right_codegree: usize,
}

impl DegreeReport {
    pub fn max_codegree(&self) -> usize {
        self.max_left_right_codegree
            .max(self.max_right_right_codegree)
    }
}

/// Degree extremes on both sides and codegree maxima. Empty sides report 0.
pub fn degree_report(h: &BipartiteHypergraph) -> DegreeReport {
    let left = h.left_degrees();
    let right = h.right_degrees();
    let mut left_right: HashMap<(usize, usize), usize> = HashMap::new();
    let mut right_right: HashMap<(usize, usize), usize> = HashMap::new();
    for e in &h.edges {
        for (i, &r) in e.right.iter().enumerate() {
            *left_right.entry((e.left, r)).or_default() += 1;
            for &s in &e.right[i + 1..] {
                *right_right.entry((r, s)).or_default() += 1;
            }
        }
    }
    let min_max = |d: &[usize]| {
        (
            d.iter().copied().min().unwrap_or(0),
            d.iter().copied().max().unwrap_or(0),
        )
    };
    let (left_min, left_max) = min_max(&left);
    let (right_min, right_max) = min_max(&right);
    DegreeReport {
        left_min,
        left_max,
        right_min,
        right_max,
        max_left_right_codegree: left_right.values().copied().max().unwrap_or(0),
        max_right_right_codegree: right_right.values().copied().max().unwrap_or(0),
    }
}

/// Whether the degree and codegree hypotheses of the Delcourt–Postle
/// matching theorem hold for given `(D, α, β)`. Diagnostic only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DpReport {
    pub left_threshold: f64,
    pub left_min_degree: Option<usize>,
    pub left_ok: bool,
    pub right_max_degree: Option<usize>,
    pub right_ok: bool,
    pub codegree_threshold: f64,
    pub max_codegree: usize,
    pub codegree_ok: bool,
}

impl DpReport {
    pub fn ok(&self) -> bool {
        self.left_ok && self.right_ok && self.codegree_ok
    }
}

pub fn dp_hypothesis_check(
    h: &BipartiteHypergraph,
    d: f64,
    alpha: f64,
    beta: f64,
) -> Result<DpReport, HypergraphError> {
    if !(d > 0.0 && alpha > 0.0 && beta > 0.0) {
        return Err(HypergraphError::InvalidParameter);
    }
    let report = degree_report(h);
    let left_threshold = (1.0 + d.powf(-alpha)) * d;
    let codegree_threshold = d.powf(1.0 - beta);
    let left_min_degree = (h.left_count > 0).then_some(report.left_min);
    let right_max_degree = (h.right_count > 0).then_some(report.right_max);
    Ok(DpReport {
        left_threshold,
        left_min_degree,
        left_ok: left_min_degree.is_none_or(|m| m as f64 >= left_threshold),
        right_max_degree,
        right_ok: right_max_degree.is_none_or(|m| m as f64 <= d),
        codegree_threshold,
        max_codegree: report.max_codegree(),
        codegree_ok: report.max_codegree() as f64 <= codegree_threshold,
    })
}

/// Left part: block instances. Right part: all pairs of points, indexed by
/// [`pair_index`]. One edge per (block `B`, point `a ∉ B`) joining `B` to the
/// pairs `{a, b}`, `b ∈ B`.
pub fn build_nesting_hypergraph(d: &Design) -> Result<BipartiteHypergraph, HypergraphError> {
    let report = verify_bibd(d);
    if let Some(w) = report.witness {
        return Err(HypergraphError::NotABibd(w));
    }
    let v = d.v();
    let mut edges = Vec::with_capacity(d.block_count() * (v - d.k()));
    for (i, block) in d.blocks().iter().enumerate() {
        for a in (0..v).filter(|a| block.binary_search(a).is_err()) {
            edges.push(HyperEdge {
                left: i,
                right: block.iter().map(|&b| pair_index(v, a, b)).collect(),
                payload: EdgePayload { block: i, shift: a },
            });
        }
    }
    BipartiteHypergraph::new(d.block_count(), pair_count(v), d.k(), edges)
}

#[derive(Debug, Clone)]
pub struct NestingSearch {
    pub solver: SolveReport,
    pub certificate: Option<NestingCertificate>,
}

/// Searches for a nesting of a BIBD through an `A`-perfect matching of its
/// nesting hypergraph. Matchings and nestings correspond one to one, so an
/// exhausted exact search proves that no nesting exists.
pub fn find_nesting(d: &Design, cfg: &SolverConfig) -> Result<NestingSearch, HypergraphError> {
    let h = build_nesting_hypergraph(d)?;
    let solver = solve(&h, cfg)?;
    let certificate = solver.outcome.matching().map(|m| {
        let mut anchors = vec![0; d.block_count()];
        for &e in m.edges() {
            let p = h.edges()[e].payload;
            anchors[p.block] = p.shift;
        }
        apply_nesting(d, &anchors).expect("matching decodes to a nesting")
    });
    debug_assert!(certificate.is_some() == matches!(solver.outcome, Outcome::Found(_)));
    Ok(NestingSearch {
        solver,
        certificate,
    })
}

/// The unordered pairs `{x, -x}` with `x ≠ 0` and `x ≠ -x`, as element
/// indices `(x, -x)` with `x < -x`, in ascending order of `x`.
pub fn negation_pairs(group: &AbelianGroup) -> Vec<(usize, usize)> {
    (1..group.order())
        .map(|x| (x, group.neg_idx(x)))
        .filter(|&(x, nx)| x < nx)
        .collect()
}

/// Left part: base blocks. Right part: [`negation_pairs`]. One edge per
/// (block `B`, translation `a`) with `-(B+a) ∩ (B+a) = ∅`.
pub fn build_bdf_hypergraph(f: &DifferenceFamily) -> Result<BipartiteHypergraph, HypergraphError> {
    let report = verify_df(f);
    if !report.ok {
        return Err(HypergraphError::NotADifferenceFamily(report.to_string()));
    }
    let group = f.group();
    let n = group.order();
    let pairs = negation_pairs(group);
    let mut pair_of = vec![usize::MAX; n];
    for (id, &(x, nx)) in pairs.iter().enumerate() {
        pair_of[x] = id;
        pair_of[nx] = id;
    }
    let mut edges = Vec::new();
    let mut member = vec![false; n];
    for (i, block) in f.base_blocks().iter().enumerate() {
        let idx = block.indices();
        for a in 0..n {
            let shifted: Vec<usize> = idx.iter().map(|&b| group.add_idx(b, a)).collect();
            shifted.iter().for_each(|&x| member[x] = true);
            let clean = shifted.iter().all(|&x| !member[group.neg_idx(x)]);
            shifted.iter().for_each(|&x| member[x] = false);
            if clean {
                edges.push(HyperEdge {
                    left: i,
                    right: shifted.iter().map(|&x| pair_of[x]).collect(),
                    payload: EdgePayload { block: i, shift: a },
                });
            }
        }
    }
    BipartiteHypergraph::new(f.base_blocks().len(), pairs.len(), f.k(), edges)
}

/// Left part: full-orbit base blocks over `Z_v`. Right part: `Z_v ∖ T`,
/// indexed densely in ascending order. One edge per (block `B`,
/// translation `a`) with `T ∩ (B+a) = ∅`.
pub fn build_novak_hypergraph(
    v: usize,
    full_orbit_bases: &[Vec<usize>],
    forbidden: &[usize],
) -> Result<BipartiteHypergraph, HypergraphError> {
    let mut blocked = vec![false; v];
    for &t in forbidden {
        if t >= v {
            return Err(HypergraphError::PointOutOfRange { point: t, v });
        }
        blocked[t] = true;
    }
    let mut right_of = vec![usize::MAX; v];
    let mut right_count = 0;
    for x in (0..v).filter(|&x| !blocked[x]) {
        right_of[x] = right_count;
        right_count += 1;
    }
    let rank = full_orbit_bases.first().map_or(0, Vec::len);
    let mut edges = Vec::new();
    for (i, base) in full_orbit_bases.iter().enumerate() {
        if let Some(&p) = base.iter().find(|&&p| p >= v) {
            return Err(HypergraphError::PointOutOfRange { point: p, v });
        }
        if orbit_length(v, base) != v {
            return Err(HypergraphError::ShortOrbit(i));
        }
        for a in 0..v {
            let shifted: Vec<usize> = base.iter().map(|&b| (b + a) % v).collect();
            if shifted.iter().all(|&x| !blocked[x]) {
                edges.push(HyperEdge {
                    left: i,
                    right: shifted.iter().map(|&x| right_of[x]).collect(),
                    payload: EdgePayload { block: i, shift: a },
                });
            }
        }
    }
    BipartiteHypergraph::new(full_orbit_bases.len(), right_count, rank, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groups::{bad_translations, GroupSubset};

    fn cyclic_design(v: usize, bases: &[&[usize]], lambda: usize) -> Design {
        let blocks = bases
            .iter()
            .flat_map(|b| (0..v).map(move |g| b.iter().map(|&x| (x + g) % v).collect()))
            .collect();
        Design::new(v, bases[0].len(), lambda, blocks).unwrap()
    }

    fn family(group: &str, blocks: &[&[usize]], lambda: usize) -> DifferenceFamily {
        let g: AbelianGroup = group.parse().unwrap();
        let blocks = blocks
            .iter()
            .map(|b| GroupSubset::from_indices(&g, b.iter().copied()))
            .collect();
        DifferenceFamily::new(g, blocks, lambda).unwrap()
    }

    #[test]
    fn fano_nesting_hypergraph() {
        let h = build_nesting_hypergraph(&cyclic_design(7, &[&[0, 1, 3]], 1)).unwrap();
        assert_eq!(h.left_count(), 7);
        assert_eq!(h.right_count(), 21);
        assert_eq!(h.edges().len(), 28);
        let r = degree_report(&h);
        assert_eq!((r.left_min, r.left_max), (4, 4));
        assert_eq!((r.right_min, r.right_max), (4, 4));
        assert_eq!(r.max_left_right_codegree, 1);
        assert!(r.max_right_right_codegree <= 1);
    }

    #[test]
    fn nesting_hypergraph_13_4_1() {
        let h = build_nesting_hypergraph(&cyclic_design(13, &[&[0, 1, 3, 9]], 1)).unwrap();
        let r = degree_report(&h);
        assert_eq!((r.left_min, r.left_max), (9, 9));
        assert_eq!((r.right_min, r.right_max), (6, 6));
    }

    #[test]
    fn nesting_search_on_fano_is_perfect() {
        let d = cyclic_design(7, &[&[0, 1, 3]], 1);
        let out = find_nesting(&d, &SolverConfig::default()).unwrap();
        let cert = out.certificate.expect("the Fano plane has a nesting");
        assert!(crate::designs::is_perfect_nesting(&cert));
    }

    #[test]
    fn nesting_search_proves_nonexistence() {
        // No point lies outside the only block.
        let d = Design::new(3, 3, 2, vec![vec![0, 1, 2], vec![0, 1, 2]]).unwrap();
        let out = find_nesting(&d, &SolverConfig::default()).unwrap();
        assert_eq!(out.solver.outcome, Outcome::Nonexistent);
        assert!(out.certificate.is_none());
        // K_4 as a (4,2,1) design: 12 new pairs would be needed, 6 exist.
        let blocks = vec![
            vec![0, 1],
            vec![0, 2],
            vec![0, 3],
            vec![1, 2],
            vec![1, 3],
            vec![2, 3],
        ];
        let d = Design::new(4, 2, 1, blocks).unwrap();
        let out = find_nesting(&d, &SolverConfig::default()).unwrap();
        assert_eq!(out.solver.outcome, Outcome::Nonexistent);
    }

    #[test]
    fn nesting_hypergraph_requires_bibd() {
        let d = Design::new(5, 3, 1, vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            build_nesting_hypergraph(&d),
            Err(HypergraphError::NotABibd(_))
        ));
    }

    #[test]
    fn bdf_hypergraph_z13() {
        let f = family("Z13", &[&[7, 8, 11], &[4, 10, 12]], 1);
        let h = build_bdf_hypergraph(&f).unwrap();
        assert_eq!(h.right_count(), 6);
        assert_eq!(h.left_degrees(), vec![7, 7]);
        for (i, b) in f.base_blocks().iter().enumerate() {
            assert_eq!(h.left_degrees()[i], 13 - bad_translations(b).len());
        }
    }

    #[test]
    fn bdf_hypergraph_z7() {
        let f = family("Z7", &[&[0, 1, 3]], 1);
        let h = build_bdf_hypergraph(&f).unwrap();
        let bad = bad_translations(&f.base_blocks()[0]).len();
        assert_eq!(h.edges().len(), 7 - bad);
        let r = degree_report(&h);
        assert!(r.max_left_right_codegree <= 2 * 3);
        assert!(r.max_right_right_codegree <= 4);
    }

    #[test]
    fn bdf_hypergraph_elementary_abelian_is_empty() {
        // The whole group is a (Z2^3, 8, 8)-DF.
        let f = family("Z2xZ2xZ2", &[&[0, 1, 2, 3, 4, 5, 6, 7]], 8);
        let h = build_bdf_hypergraph(&f).unwrap();
        assert_eq!(h.right_count(), 0);
        assert!(h.edges().is_empty());
    }

    #[test]
    fn novak_hypergraph_examples() {
        let h = build_novak_hypergraph(7, &[vec![0, 1, 3]], &[]).unwrap();
        assert_eq!(h.left_count(), 1);
        assert_eq!(h.edges().len(), 7);
        assert!(h.right_degrees().iter().all(|&d| d == 3));

        let h = build_novak_hypergraph(13, &[vec![0, 1, 4], vec![0, 2, 7]], &[]).unwrap();
        assert_eq!(h.left_degrees(), vec![13, 13]);

        let h = build_novak_hypergraph(15, &[vec![0, 1, 4], vec![0, 2, 8]], &[0, 5, 10]).unwrap();
        assert_eq!(h.right_count(), 12);
        assert!(h.left_degrees().iter().all(|&d| d >= 15 - 9));

        assert_eq!(
            build_novak_hypergraph(15, &[vec![0, 5, 10]], &[]),
            Err(HypergraphError::ShortOrbit(0))
        );
    }

    #[test]
    fn degree_and_codegree_queries() {
        let edges = vec![
            HyperEdge {
                left: 0,
                right: vec![0, 1],
                payload: EdgePayload { block: 0, shift: 0 },
            },
            HyperEdge {
                left: 0,
                right: vec![1, 0],
                payload: EdgePayload { block: 0, shift: 1 },
            },
        ];
        let h = BipartiteHypergraph::new(2, 3, 2, edges).unwrap();
        assert_eq!(h.degree(Vertex::Left(1)).unwrap(), 0);
        assert_eq!(h.degree(Vertex::Right(2)).unwrap(), 0);
        assert_eq!(h.codegree(Vertex::Right(0), Vertex::Right(1)).unwrap(), 2);
        assert_eq!(h.codegree(Vertex::Left(0), Vertex::Right(1)).unwrap(), 2);
        assert_eq!(degree_report(&h).max_codegree(), 2);
        assert!(h.degree(Vertex::Left(2)).is_err());
        assert!(h.codegree(Vertex::Left(0), Vertex::Left(0)).is_err());
    }

    #[test]
    fn invalid_edges_rejected() {
        let e = |left, right: Vec<usize>| HyperEdge {
            left,
            right,
            payload: EdgePayload { block: 0, shift: 0 },
        };
        assert!(BipartiteHypergraph::new(1, 3, 2, vec![e(1, vec![0, 1])]).is_err());
        assert!(BipartiteHypergraph::new(1, 3, 2, vec![e(0, vec![0, 0])]).is_err());
        assert!(BipartiteHypergraph::new(1, 3, 2, vec![e(0, vec![0, 3])]).is_err());
        assert!(BipartiteHypergraph::new(1, 3, 2, vec![e(0, vec![0])]).is_err());
    }

    #[test]
    fn dp_check_on_fano() {
        let h = build_nesting_hypergraph(&cyclic_design(7, &[&[0, 1, 3]], 1)).unwrap();
        let d = 16.0 / 5.0;
        let r = dp_hypothesis_check(&h, d, 0.5, 0.5).unwrap();
        assert!((r.left_threshold - (1.0 + d.powf(-0.5)) * d).abs() < 1e-12);
        assert_eq!(r.left_min_degree, Some(4));
        assert_eq!(r.left_ok, 4.0 >= r.left_threshold);
        // Right degree 4 exceeds D = 3.2.
        assert!(!r.right_ok);
        assert!(dp_hypothesis_check(&h, 0.0, 1.0, 1.0).is_err());
    }

    #[test]
    fn dp_check_on_empty_hypergraph() {
        let h = BipartiteHypergraph::new(2, 4, 3, vec![]).unwrap();
        let r = dp_hypothesis_check(&h, 5.0, 1.0, 0.5).unwrap();
        assert!(r.codegree_ok);
        assert!(!r.left_ok);
        let h = BipartiteHypergraph::new(0, 0, 3, vec![]).unwrap();
        assert!(dp_hypothesis_check(&h, 5.0, 1.0, 0.5).unwrap().ok());
    }

    #[test]
    fn dump_roundtrip() {
        let h = build_novak_hypergraph(15, &[vec![0, 1, 4], vec![0, 2, 8]], &[0, 5, 10]).unwrap();
        let text = h.dump();
        assert!(text.lines().nth(1).unwrap().contains(" : "));
        assert_eq!(BipartiteHypergraph::parse_dump(&text).unwrap(), h);
        assert!(BipartiteHypergraph::parse_dump("# left=1 right=1 rank=1\n0 : 0").is_err());
    }
}
