//! Block designs, packings, nestings and the Levi-graph view of a nesting.
//!
//! Points are always `0..v`. Blocks are stored sorted; the block list is a
//! multiset, so repeated blocks are distinct block instances everywhere
//! (pair counts, Levi vertices, anchors).

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DesignError {
    #[error("a design needs at least one point")]
    NoPoints,
    #[error("block size must be positive")]
    ZeroBlockSize,
    #[error("block {index} has {found} points, expected {expected}")]
    BlockSize {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("block {index} contains point {point}, outside 0..{v}")]
    PointOutOfRange {
        index: usize,
        point: usize,
        v: usize,
    },
    #[error("block {index} repeats point {point}")]
    RepeatedPoint { index: usize, point: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Design {
    v: usize,
    k: usize,
    lambda: usize,
    blocks: Vec<Vec<usize>>,
}

impl Design {
    /// Validates and canonicalizes (sorts) every block. Block order is kept.
    pub fn new(
        v: usize,
        k: usize,
        lambda: usize,
        blocks: Vec<Vec<usize>>,
    ) -> Result<Self, DesignError> {
        if v == 0 {
            return Err(DesignError::NoPoints);
        }
        if k == 0 {
            return Err(DesignError::ZeroBlockSize);
        }
        let mut canonical = Vec::with_capacity(blocks.len());
        for (index, mut block) in blocks.into_iter().enumerate() {
            if block.len() != k {
                return Err(DesignError::BlockSize {
                    index,
                    expected: k,
                    found: block.len(),
                });
            }
            block.sort_unstable();
            if let Some(&point) = block.iter().find(|&&p| p >= v) {
                return Err(DesignError::PointOutOfRange { index, point, v });
            }
            if let Some(w) = block.windows(2).find(|w| w[0] == w[1]) {
                return Err(DesignError::RepeatedPoint { index, point: w[0] });
            }
            canonical.push(block);
        }
        Ok(Self {
            v,
            k,
            lambda,
            blocks: canonical,
        })
    }

    pub fn v(&self) -> usize {
        self.v
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn block_count(&self) -> usize {
        self.blocks.len()
    }

    /// `λ v (v-1) / (k (k-1))` when integral.
    pub fn bibd_block_count(&self) -> Option<usize> {
        let num = self.lambda * self.v * (self.v - 1);
        let den = self.k * (self.k.saturating_sub(1));
        (den != 0 && num.is_multiple_of(den)).then(|| num / den)
    }

    /// Replication number `λ (v-1) / (k-1)` when integral.
    pub fn replication(&self) -> Option<usize> {
        let den = self.k.saturating_sub(1);
        let num = self.lambda * (self.v - 1);
        (den != 0 && num.is_multiple_of(den)).then(|| num / den)
    }
}

/// Dense index of the unordered pair `{p, q}` among all pairs of `0..v`,
/// in lexicographic order.
pub fn pair_index(v: usize, p: usize, q: usize) -> usize {
    let (a, b) = if p < q { (p, q) } else { (q, p) };
    debug_assert!(a != b && b < v);
    a * (2 * v - a - 1) / 2 + (b - a - 1)
}

pub fn pair_count(v: usize) -> usize {
    v * v.saturating_sub(1) / 2
}

/// Inverse of [`pair_index`].
pub fn pair_at(v: usize, mut index: usize) -> (usize, usize) {
    for a in 0..v {
        let row = v - a - 1;
        if index < row {
            return (a, a + 1 + index);
        }
        index -= row;
    }
    panic!("pair index out of range for v = {v}");
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairCoverage {
    v: usize,
    counts: Vec<usize>,
}

impl PairCoverage {
    pub fn get(&self, p: usize, q: usize) -> usize {
        self.counts[pair_index(self.v, p, q)]
    }

    /// `((p, q), count)` for every pair, lexicographic.
    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize), usize)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(i, &c)| (pair_at(self.v, i), c))
    }

    pub fn max(&self) -> usize {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

pub fn pair_coverage(d: &Design) -> PairCoverage {
    let mut counts = vec![0; pair_count(d.v)];
    for block in &d.blocks {
        for (i, &p) in block.iter().enumerate() {
            for &q in &block[i + 1..] {
                counts[pair_index(d.v, p, q)] += 1;
            }
        }
    }
    PairCoverage { v: d.v, counts }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairWitness {
    pub pair: (usize, usize),
    pub count: usize,
}

impl fmt::Display for PairWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "pair {{{},{}}} covered {} times",
            self.pair.0, self.pair.1, self.count
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PackingReport {
    pub ok: bool,
    /// First pair (lexicographically) attaining the maximum coverage.
    pub worst: Option<PairWitness>,
}

pub fn verify_packing(d: &Design) -> PackingReport {
    let cov = pair_coverage(d);
    let mut worst: Option<PairWitness> = None;
    for (pair, count) in cov.iter() {
        if worst.is_none_or(|w| count > w.count) {
            worst = Some(PairWitness { pair, count });
        }
    }
    PackingReport {
        ok: worst.is_none_or(|w| w.count <= d.lambda),
        worst,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BibdReport {
    pub ok: bool,
    /// First pair whose coverage differs from λ.
    pub witness: Option<PairWitness>,
}

pub fn verify_bibd(d: &Design) -> BibdReport {
    let witness = pair_coverage(d)
        .iter()
        .find(|&(_, c)| c != d.lambda)
        .map(|(pair, count)| PairWitness { pair, count });
    BibdReport {
        ok: witness.is_none(),
        witness,
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NestingError {
    #[error("{found} anchors given for {expected} blocks")]
    AnchorCount { expected: usize, found: usize },
    #[error("anchor {point} of block {block} is not a point")]
    AnchorOutOfRange { block: usize, point: usize },
    #[error("anchor {point} lies inside block {block}")]
    AnchorInBlock { block: usize, point: usize },
    #[error("nested blocks are not a packing of index {limit}: {witness}")]
    NotAPacking { witness: PairWitness, limit: usize },
}

/// A nesting `φ` of a design together with the nested packing it induces.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestingCertificate {
    base: Design,
    anchors: Vec<usize>,
    nested: Design,
}

impl NestingCertificate {
    pub fn base(&self) -> &Design {
        &self.base
    }

    pub fn anchors(&self) -> &[usize] {
        &self.anchors
    }

    pub fn nested(&self) -> &Design {
        &self.nested
    }
}

/// Adds `anchors[i]` to block `i` and checks the result is a
/// `(v, k+1, λ+1)`-packing.
pub fn apply_nesting(d: &Design, anchors: &[usize]) -> Result<NestingCertificate, NestingError> {
    if anchors.len() != d.block_count() {
        return Err(NestingError::AnchorCount {
            expected: d.block_count(),
            found: anchors.len(),
        });
    }
    let mut nested_blocks = Vec::with_capacity(d.block_count());
    for (block, (b, &point)) in d.blocks.iter().zip(anchors).enumerate() {
        if point >= d.v {
            return Err(NestingError::AnchorOutOfRange { block, point });
        }
        if b.binary_search(&point).is_ok() {
            return Err(NestingError::AnchorInBlock { block, point });
        }
        let mut grown = b.clone();
        grown.push(point);
        nested_blocks.push(grown);
    }
    let nested = Design::new(d.v, d.k + 1, d.lambda + 1, nested_blocks)
        .expect("anchor outside its block keeps the block valid");
    let report = verify_packing(&nested);
    if !report.ok {
        return Err(NestingError::NotAPacking {
            witness: report.worst.expect("failed packing has a witness"),
            limit: nested.lambda,
        });
    }
    Ok(NestingCertificate {
        base: d.clone(),
        anchors: anchors.to_vec(),
        nested,
    })
}

/// Recomputes the BIBD property of the nested design from scratch.
pub fn is_perfect_nesting(c: &NestingCertificate) -> bool {
    verify_bibd(&c.nested).ok
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NestingCondition {
    /// `k >= 2λ + 1`
    BlockSizeAtLeast,
    /// `k = 2λ + 1`
    BlockSizeExact,
    /// `v ≡ 1 (mod 2k)`
    PointCountCongruence,
}

impl fmt::Display for NestingCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            NestingCondition::BlockSizeAtLeast => "k >= 2*lambda + 1",
            NestingCondition::BlockSizeExact => "k = 2*lambda + 1",
            NestingCondition::PointCountCongruence => "v = 1 (mod 2k)",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConditionsReport {
    pub checks: Vec<(NestingCondition, bool)>,
}

impl ConditionsReport {
    pub fn ok(&self) -> bool {
        self.checks.iter().all(|&(_, pass)| pass)
    }

    pub fn failures(&self) -> Vec<NestingCondition> {
        self.checks
            .iter()
            .filter(|&&(_, pass)| !pass)
            .map(|&(c, _)| c)
            .collect()
    }
}

pub fn nesting_necessary_conditions(
    v: usize,
    k: usize,
    lambda: usize,
    perfect: bool,
) -> ConditionsReport {
    let mut checks = vec![(NestingCondition::BlockSizeAtLeast, k > 2 * lambda)];
    if perfect {
        checks.push((NestingCondition::BlockSizeExact, k == 2 * lambda + 1));
        checks.push((NestingCondition::PointCountCongruence, v % (2 * k) == 1));
    }
    ConditionsReport { checks }
}

/// Point–block incidence graph. Vertex `x < v` is a point, vertex `v + i`
/// is block instance `i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeviGraph {
    v: usize,
    block_count: usize,
    edges: Vec<(usize, usize)>,
}

impl LeviGraph {
    pub fn point_count(&self) -> usize {
        self.v
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn vertex_count(&self) -> usize {
        self.v + self.block_count
    }

    pub fn block_vertex(&self, block: usize) -> usize {
        self.v + block
    }

    /// `(point, block index)` incidences.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn degree(&self, vertex: usize) -> usize {
        if vertex < self.v {
            self.edges.iter().filter(|&&(p, _)| p == vertex).count()
        } else {
            let b = vertex - self.v;
            self.edges.iter().filter(|&&(_, q)| q == b).count()
        }
    }
}

pub fn levi_graph(d: &Design) -> LeviGraph {
    let edges = d
        .blocks
        .iter()
        .enumerate()
        .flat_map(|(i, b)| b.iter().map(move |&p| (p, i)))
        .collect();
    LeviGraph {
        v: d.v,
        block_count: d.block_count(),
        edges,
    }
}

/// Color of every Levi vertex, indexed as in [`LeviGraph`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    colors: Vec<usize>,
}

impl Coloring {
    pub fn new(colors: Vec<usize>) -> Self {
        Self { colors }
    }

    pub fn colors(&self) -> &[usize] {
        &self.colors
    }

    /// Number of distinct colors in use.
    pub fn color_count(&self) -> usize {
        let mut used = self.colors.clone();
        used.sort_unstable();
        used.dedup();
        used.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColoringViolation {
    /// Coloring is not total on the graph's vertices.
    WrongLength { expected: usize, found: usize },
    /// Point and block joined by an edge share a color.
    Improper { point: usize, block: usize },
    /// Two edges carry the same color pair.
    RepeatedPair {
        first: (usize, usize),
        second: (usize, usize),
        colors: (usize, usize),
    },
}

impl fmt::Display for ColoringViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColoringViolation::WrongLength { expected, found } => {
                write!(
                    f,
                    "coloring has {found} entries, graph has {expected} vertices"
                )
            }
            ColoringViolation::Improper { point, block } => {
                write!(f, "point {point} and block {block} share a color")
            }
            ColoringViolation::RepeatedPair {
                first,
                second,
                colors,
            } => write!(
                f,
                "edges (point {}, block {}) and (point {}, block {}) both carry colors {{{},{}}}",
                first.0, first.1, second.0, second.1, colors.0, colors.1
            ),
        }
    }
}

/// First obstruction to `col` being a harmonious coloring of `g`.
pub fn harmonious_violation(g: &LeviGraph, col: &Coloring) -> Option<ColoringViolation> {
    if col.colors.len() != g.vertex_count() {
        return Some(ColoringViolation::WrongLength {
            expected: g.vertex_count(),
            found: col.colors.len(),
        });
    }
    let mut seen: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for &(p, b) in &g.edges {
        let cp = col.colors[p];
        let cb = col.colors[g.block_vertex(b)];
        if cp == cb {
            return Some(ColoringViolation::Improper { point: p, block: b });
        }
        let key = (cp.min(cb), cp.max(cb));
        if let Some(&first) = seen.get(&key) {
            return Some(ColoringViolation::RepeatedPair {
                first,
                second: (p, b),
                colors: key,
            });
        }
        seen.insert(key, (p, b));
    }
    None
}

pub fn verify_harmonious(g: &LeviGraph, col: &Coloring) -> bool {
    harmonious_violation(g, col).is_none()
}

/// Harmonious, and every pair of used colors appears on exactly one edge.
pub fn verify_exact(g: &LeviGraph, col: &Coloring) -> bool {
    if !verify_harmonious(g, col) {
        return false;
    }
    // Harmonious edges realize |E| distinct pairs among the used colors.
    let c = col.color_count();
    g.edges.len() == c * (c - 1) / 2
}

/// Point `x` gets color `x`, each block gets the color of its anchor.
pub fn nesting_to_coloring(c: &NestingCertificate) -> Coloring {
    let mut colors: Vec<usize> = (0..c.base.v).collect();
    colors.extend_from_slice(&c.anchors);
    Coloring { colors }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoringError {
    #[error("coloring has {found} entries, graph has {expected} vertices")]
    WrongLength { expected: usize, found: usize },
    #[error("points {0} and {1} share a color")]
    PointsNotDistinct(usize, usize),
    #[error("coloring uses {found} colors, expected {expected}")]
    ColorCount { expected: usize, found: usize },
    #[error("block {block} has color {color}, which no point carries")]
    UnmatchedBlockColor { block: usize, color: usize },
    #[error("coloring is not harmonious: {0}")]
    NotHarmonious(ColoringViolation),
    #[error(transparent)]
    Nesting(#[from] NestingError),
}

/// Reads a nesting off a harmonious `v`-coloring: each block is anchored at
/// the unique point sharing its color.
pub fn coloring_to_nesting(
    d: &Design,
    col: &Coloring,
) -> Result<NestingCertificate, ColoringError> {
    let g = levi_graph(d);
    if col.colors.len() != g.vertex_count() {
        return Err(ColoringError::WrongLength {
            expected: g.vertex_count(),
            found: col.colors.len(),
        });
    }
    let mut point_of_color: HashMap<usize, usize> = HashMap::new();
    for (p, &c) in col.colors[..d.v].iter().enumerate() {
        if let Some(&q) = point_of_color.get(&c) {
            return Err(ColoringError::PointsNotDistinct(q, p));
        }
        point_of_color.insert(c, p);
    }
    let used = col.color_count();
    if used != d.v {
        return Err(ColoringError::ColorCount {
            expected: d.v,
            found: used,
        });
    }
    if let Some(violation) = harmonious_violation(&g, col) {
        return Err(ColoringError::NotHarmonious(violation));
    }
    let anchors = col.colors[d.v..]
        .iter()
        .enumerate()
        .map(|(block, &color)| {
            point_of_color
                .get(&color)
                .copied()
                .ok_or(ColoringError::UnmatchedBlockColor { block, color })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(apply_nesting(d, &anchors)?)
}

/// A `(k2, λ2; k1, λ1)`-nesting candidate: outer blocks, each with a
/// distinguished inner subblock.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubblockNesting {
    v: usize,
    k1: usize,
    lambda1: usize,
    k2: usize,
    lambda2: usize,
    outer: Design,
    inner: Design,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SubblockError {
    #[error("outer blocks: {0}")]
    Outer(DesignError),
    #[error("inner blocks: {0}")]
    Inner(DesignError),
    #[error("inner block {0} is not contained in its outer block")]
    NotContained(usize),
}

impl SubblockNesting {
    pub fn new(
        v: usize,
        (k1, lambda1): (usize, usize),
        (k2, lambda2): (usize, usize),
        blocks: Vec<(Vec<usize>, Vec<usize>)>,
    ) -> Result<Self, SubblockError> {
        let (outer, inner): (Vec<_>, Vec<_>) = blocks.into_iter().unzip();
        let outer = Design::new(v, k2, lambda2, outer).map_err(SubblockError::Outer)?;
        let inner = Design::new(v, k1, lambda1, inner).map_err(SubblockError::Inner)?;
        for (i, (o, s)) in outer.blocks.iter().zip(&inner.blocks).enumerate() {
            if !s.iter().all(|p| o.binary_search(p).is_ok()) {
                return Err(SubblockError::NotContained(i));
            }
        }
        Ok(Self {
            v,
            k1,
            lambda1,
            k2,
            lambda2,
            outer,
            inner,
        })
    }

    /// The `(k+1, λ+1; k, λ)`-nesting carried by a perfect nesting.
    pub fn from_certificate(c: &NestingCertificate) -> Self {
        let blocks = c
            .nested
            .blocks
            .iter()
            .cloned()
            .zip(c.base.blocks.iter().cloned())
            .collect();
        Self::new(
            c.base.v,
            (c.base.k, c.base.lambda),
            (c.nested.k, c.nested.lambda),
            blocks,
        )
        .expect("certificate blocks are nested by construction")
    }

    pub fn outer(&self) -> &Design {
        &self.outer
    }

    pub fn inner(&self) -> &Design {
        &self.inner
    }

    pub fn parameters(&self) -> (usize, usize, usize, usize) {
        (self.k1, self.lambda1, self.k2, self.lambda2)
    }

    pub fn v(&self) -> usize {
        self.v
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubblockReport {
    /// `λ1 k2 (k2-1) = λ2 k1 (k1-1)`
    pub identity_ok: bool,
    pub outer: BibdReport,
    pub inner: BibdReport,
}

impl SubblockReport {
    pub fn ok(&self) -> bool {
        self.identity_ok && self.outer.ok && self.inner.ok
    }
}

pub fn verify_subblock_nesting(s: &SubblockNesting) -> SubblockReport {
    SubblockReport {
        identity_ok: admissible(s.k1 as u64, s.lambda1 as u64, s.k2 as u64, s.lambda2 as u64),
        outer: verify_bibd(&s.outer),
        inner: verify_bibd(&s.inner),
    }
}

fn admissible(k1: u64, lambda1: u64, k2: u64, lambda2: u64) -> bool {
    lambda1 * k2 * k2.saturating_sub(1) == lambda2 * k1 * k1.saturating_sub(1)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ArithmeticError {
    #[error("block sizes must be at least 2 and indices positive")]
    Degenerate,
    #[error("lambda1*k2*(k2-1) = {lhs} differs from lambda2*k1*(k1-1) = {rhs}")]
    NotAdmissible { lhs: u64, rhs: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AlphaBeta {
    pub alpha: u64,
    pub beta: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn lcm(a: u64, b: u64) -> u64 {
    a / gcd(a, b) * b
}

/// Divisibility moduli of the edge-2-colored decomposition behind a
/// `(k2, λ2; k1, λ1)`-nesting.
///
/// `alpha` is the least `t > 0` with `(k1-1) | tλ1` and `(k2-1) | tλ2`;
/// `beta` is the least `m > 0` with `k1(k1-1) | mλ1`.
pub fn alpha_beta(
    k1: u64,
    lambda1: u64,
    k2: u64,
    lambda2: u64,
) -> Result<AlphaBeta, ArithmeticError> {
    if k1 < 2 || k2 < 2 || lambda1 == 0 || lambda2 == 0 {
        return Err(ArithmeticError::Degenerate);
    }
    if !admissible(k1, lambda1, k2, lambda2) {
        return Err(ArithmeticError::NotAdmissible {
            lhs: lambda1 * k2 * (k2 - 1),
            rhs: lambda2 * k1 * (k1 - 1),
        });
    }
    // n | tλ  <=>  n / gcd(n, λ) | t
    let least = |n: u64, lambda: u64| n / gcd(n, lambda);
    Ok(AlphaBeta {
        alpha: lcm(least(k1 - 1, lambda1), least(k2 - 1, lambda2)),
        beta: least(k1 * (k1 - 1), lambda1),
    })
}
