//! Difference families over finite abelian groups and their Banff refinement.

use std::fmt;

use thiserror::Error;

use crate::designs::{apply_nesting, Design, NestingCertificate};
use crate::groups::{AbelianGroup, GroupElement, GroupError, GroupSubset};
use crate::hypergraph::{build_bdf_hypergraph, HypergraphError};
use crate::matching::{solve, MatchingError, Outcome, SolveReport, SolverConfig};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DfError {
    #[error("cannot infer the block size of an empty family")]
    Empty,
    #[error("block {index} has {found} elements, expected {expected}")]
    BlockSize {
        index: usize,
        expected: usize,
        found: usize,
    },
    #[error("block {0} lives in a different group")]
    ForeignBlock(usize),
    #[error("not a difference family: {0}")]
    NotADifferenceFamily(DfReport),
    #[error("not a Banff difference family: {0}")]
    NotBanff(BdfReport),
    #[error("lambda*(|G|-1) = {numerator} is not divisible by k*(k-1) = {denominator}")]
    Divisibility {
        numerator: usize,
        denominator: usize,
    },
    #[error("block size must be at least 2 and at most |G|")]
    BadBlockSize,
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceFamily {
    group: AbelianGroup,
    k: usize,
    lambda: usize,
    base_blocks: Vec<GroupSubset>,
}

impl DifferenceFamily {
    /// Block size is taken from the first block.
    pub fn new(
        group: AbelianGroup,
        base_blocks: Vec<GroupSubset>,
        lambda: usize,
    ) -> Result<Self, DfError> {
        let k = base_blocks.first().ok_or(DfError::Empty)?.len();
        Self::with_block_size(group, k, base_blocks, lambda)
    }

    pub fn with_block_size(
        group: AbelianGroup,
        k: usize,
        base_blocks: Vec<GroupSubset>,
        lambda: usize,
    ) -> Result<Self, DfError> {
        for (index, b) in base_blocks.iter().enumerate() {
            if b.group() != &group {
                return Err(DfError::ForeignBlock(index));
            }
            if b.len() != k {
                return Err(DfError::BlockSize {
                    index,
                    expected: k,
                    found: b.len(),
                });
            }
        }
        Ok(Self {
            group,
            k,
            lambda,
            base_blocks,
        })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }

    pub fn base_blocks(&self) -> &[GroupSubset] {
        &self.base_blocks
    }

    /// Replaces every base block `F_i` by `F_i + shifts[i]`.
    pub fn translated(&self, shifts: &[GroupElement]) -> Result<Self, DfError> {
        assert_eq!(shifts.len(), self.base_blocks.len());
        let blocks = self
            .base_blocks
            .iter()
            .zip(shifts)
            .map(|(b, a)| b.translate(a))
            .collect::<Result<Vec<_>, _>>()?;
        Self::with_block_size(self.group.clone(), self.k, blocks, self.lambda)
    }
}

impl fmt::Display for DifferenceFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})-family", self.group, self.k, self.lambda)?;
        for b in &self.base_blocks {
            write!(f, " {b}")?;
        }
        Ok(())
    }
}

/// Multiplicity of every element (by index) in the list of ordered
/// differences `f - f'`, `f ≠ f'`, taken within each base block.
pub fn delta_counts(f: &DifferenceFamily) -> Vec<usize> {
    let mut counts = vec![0; f.group.order()];
    for block in &f.base_blocks {
        let idx = block.indices();
        for &x in &idx {
            for &y in &idx {
                if x != y {
                    counts[f.group.sub_idx(x, y)] += 1;
                }
            }
        }
    }
    counts
}

/// The ordered differences themselves, block by block.
pub fn delta_list(f: &DifferenceFamily) -> Vec<GroupElement> {
    let mut out = Vec::new();
    for block in &f.base_blocks {
        let idx = block.indices();
        for &x in &idx {
            for &y in &idx {
                if x != y {
                    out.push(f.group.element_at(f.group.sub_idx(x, y)));
                }
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfReport {
    pub ok: bool,
    pub lambda: usize,
    /// First nonzero element whose multiplicity differs from λ.
    pub witness: Option<(GroupElement, usize)>,
}

impl fmt::Display for DfReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "every nonzero element occurs {} times", self.lambda),
            Some((g, c)) => write!(
                f,
                "element {g} occurs {c} times in the difference list, expected {}",
                self.lambda
            ),
        }
    }
}

pub fn verify_df(f: &DifferenceFamily) -> DfReport {
    let counts = delta_counts(f);
    let witness = counts
        .iter()
        .enumerate()
        .skip(1)
        .find(|&(_, &c)| c != f.lambda)
        .map(|(i, &c)| (f.group.element_at(i), c));
    DfReport {
        ok: witness.is_none(),
        lambda: f.lambda,
        witness,
    }
}

/// `F_i` (`negated = false`) or `-F_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignedBlock {
    pub block: usize,
    pub negated: bool,
}

impl fmt::Display for SignedBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.negated { "-" } else { "" };
        write!(f, "{sign}F{}", self.block)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BdfReport {
    pub df: DfReport,
    /// Two of the sets `F_i, -F_i` sharing an element.
    pub collision: Option<(SignedBlock, SignedBlock, GroupElement)>,
}

impl BdfReport {
    pub fn ok(&self) -> bool {
        self.df.ok && self.collision.is_none()
    }
}

impl fmt::Display for BdfReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.df.ok {
            return write!(f, "{}", self.df);
        }
        match &self.collision {
            None => write!(f, "{}; blocks and negatives pairwise disjoint", self.df),
            Some((a, b, g)) => write!(f, "{a} and {b} share element {g}"),
        }
    }
}

/// DF check plus pairwise disjointness of all `F_i` and `-F_i`.
pub fn verify_bdf(f: &DifferenceFamily) -> BdfReport {
    let df = verify_df(f);
    let group = &f.group;
    let mut owner: Vec<Option<SignedBlock>> = vec![None; group.order()];
    let mut collision = None;
    'scan: for (i, block) in f.base_blocks.iter().enumerate() {
        let idx = block.indices();
        for negated in [false, true] {
            let tag = SignedBlock { block: i, negated };
            for &x in &idx {
                let y = if negated { group.neg_idx(x) } else { x };
                if let Some(prev) = owner[y] {
                    collision = Some((prev, tag, group.element_at(y)));
                    break 'scan;
                }
                owner[y] = Some(tag);
            }
        }
    }
    BdfReport { df, collision }
}

/// Develops the family: blocks `F + g` for every base block `F` (outer) and
/// every `g ∈ G` in canonical order (inner). Points are element indices.
pub fn develop(f: &DifferenceFamily) -> Result<Design, DfError> {
    let report = verify_df(f);
    if !report.ok {
        return Err(DfError::NotADifferenceFamily(report));
    }
    Ok(
        Design::new(f.group.order(), f.k, f.lambda, developed_blocks(f))
            .expect("translates of k-subsets are k-subsets"),
    )
}

fn developed_blocks(f: &DifferenceFamily) -> Vec<Vec<usize>> {
    let n = f.group.order();
    let mut blocks = Vec::with_capacity(f.base_blocks.len() * n);
    for base in &f.base_blocks {
        let idx = base.indices();
        for g in 0..n {
            blocks.push(idx.iter().map(|&b| f.group.add_idx(b, g)).collect());
        }
    }
    blocks
}

/// Develops a Banff family with block `F + g` anchored at `g`.
pub fn develop_with_anchor(f: &DifferenceFamily) -> Result<NestingCertificate, DfError> {
    let report = verify_bdf(f);
    if !report.ok() {
        return Err(DfError::NotBanff(report));
    }
    let design = develop(f)?;
    let n = f.group.order();
    let anchors: Vec<usize> = (0..f.base_blocks.len()).flat_map(|_| 0..n).collect();
    let cert = apply_nesting(&design, &anchors)
        .expect("anchored development of a Banff family is a packing");
    Ok(cert)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchResult<T> {
    Found(T),
    /// The whole (symmetry-reduced) search space was explored.
    Exhausted,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DfSearchReport {
    pub result: SearchResult<DifferenceFamily>,
    pub nodes: u64,
}

/// Backtracking search for a `(G, k, λ)`-DF.
///
/// Every base block is normalized to contain `0` (translation keeps the
/// difference list), and base blocks are generated in nondecreasing
/// lexicographic order of their index vectors. A partial family is pruned
/// as soon as some difference occurs more than λ times. `budget` caps the
/// number of element placements.
pub fn search_df(
    group: &AbelianGroup,
    k: usize,
    lambda: usize,
    budget: u64,
) -> Result<DfSearchReport, DfError> {
    let n = group.order();
    if k < 2 || k > n {
        return Err(DfError::BadBlockSize);
    }
    let numerator = lambda * (n - 1);
    let denominator = k * (k - 1);
    if !numerator.is_multiple_of(denominator) {
        return Err(DfError::Divisibility {
            numerator,
            denominator,
        });
    }
    let mut search = DfSearch {
        group,
        k,
        lambda,
        target_blocks: numerator / denominator,
        counts: vec![0; n],
        blocks: Vec::new(),
        nodes: 0,
        budget,
    };
    let result = match search.next_block() {
        Step::Found => {
            let blocks = search
                .blocks
                .iter()
                .map(|b| GroupSubset::from_indices(group, b.iter().copied()))
                .collect();
            let family = DifferenceFamily::with_block_size(group.clone(), k, blocks, lambda)?;
            debug_assert!(verify_df(&family).ok);
            SearchResult::Found(family)
        }
        Step::Dead => SearchResult::Exhausted,
        Step::Budget => SearchResult::BudgetExhausted,
    };
    Ok(DfSearchReport {
        result,
        nodes: search.nodes,
    })
}

enum Step {
    Found,
    Dead,
    Budget,
}

struct DfSearch<'a> {
    group: &'a AbelianGroup,
    k: usize,
    lambda: usize,
    target_blocks: usize,
    counts: Vec<usize>,
    blocks: Vec<Vec<usize>>,
    nodes: u64,
    budget: u64,
}

impl DfSearch<'_> {
    fn next_block(&mut self) -> Step {
        if self.blocks.len() == self.target_blocks {
            return Step::Found;
        }
        let lower = self.blocks.last().cloned();
        let mut partial = vec![0];
        self.extend(&mut partial, lower.as_deref(), true)
    }

    /// `tight` means the partial block equals the previous block's prefix,
    /// so the next element may not go below the previous block's element.
    fn extend(&mut self, partial: &mut Vec<usize>, lower: Option<&[usize]>, tight: bool) -> Step {
        if partial.len() == self.k {
            self.blocks.push(partial.clone());
            let step = self.next_block();
            if matches!(step, Step::Found) {
                return step;
            }
            self.blocks.pop();
            return step;
        }
        let pos = partial.len();
        let last = *partial.last().expect("block starts at 0");
        let floor = match (tight, lower) {
            (true, Some(prev)) => prev[pos].max(last + 1),
            _ => last + 1,
        };
        let n = self.group.order();
        // Leave room for the remaining k - pos - 1 elements.
        let ceiling = n - (self.k - pos - 1);
        for x in floor..ceiling {
            if self.nodes >= self.budget {
                return Step::Budget;
            }
            self.nodes += 1;
            if !self.place(partial, x) {
                continue;
            }
            partial.push(x);
            let still_tight = tight && lower.is_some_and(|prev| prev[pos] == x);
            let step = self.extend(partial, lower, still_tight);
            partial.pop();
            self.unplace(partial, x);
            match step {
                Step::Dead => {}
                other => return other,
            }
        }
        Step::Dead
    }

    /// Adds the differences between `x` and the partial block; rolls back
    /// and returns false if some multiplicity would exceed λ.
    fn place(&mut self, partial: &[usize], x: usize) -> bool {
        for (i, &y) in partial.iter().enumerate() {
            let d1 = self.group.sub_idx(x, y);
            let d2 = self.group.sub_idx(y, x);
            self.counts[d1] += 1;
            self.counts[d2] += 1;
            if self.counts[d1] > self.lambda || self.counts[d2] > self.lambda {
                self.unplace(&partial[..=i], x);
                return false;
            }
        }
        true
    }

    fn unplace(&mut self, partial: &[usize], x: usize) {
        for &y in partial {
            self.counts[self.group.sub_idx(x, y)] -= 1;
            self.counts[self.group.sub_idx(y, x)] -= 1;
        }
    }
}

/// Outcome of trying to translate the base blocks of a DF into a BDF.
#[derive(Debug, Clone)]
pub struct BdfConversion {
    pub solver: SolveReport,
    /// Translation chosen for each base block, when found.
    pub translations: Option<Vec<GroupElement>>,
    pub family: Option<DifferenceFamily>,
}

impl BdfConversion {
    pub fn found(&self) -> bool {
        self.family.is_some()
    }
}

/// Searches for translations `a_F` making `{F + a_F}` Banff, through an
/// `A`-perfect matching of the BDF hypergraph. Failure means "not found",
/// never nonexistence.
pub fn df_to_bdf(f: &DifferenceFamily, cfg: &SolverConfig) -> Result<BdfConversion, DfError> {
    let report = verify_df(f);
    if !report.ok {
        return Err(DfError::NotADifferenceFamily(report));
    }
    let h = build_bdf_hypergraph(f)?;
    let solver = solve(&h, cfg)?;
    let (translations, family) = match &solver.outcome {
        Outcome::Found(m) => {
            let mut shifts = vec![f.group.zero(); f.base_blocks.len()];
            for &e in m.edges() {
                let p = h.edges()[e].payload;
                shifts[p.block] = f.group.element_at(p.shift);
            }
            let family = f.translated(&shifts)?;
            assert!(
                verify_bdf(&family).ok(),
                "matching decodes to a Banff family"
            );
            (Some(shifts), Some(family))
        }
        Outcome::Nonexistent | Outcome::BudgetExhausted => (None, None),
    };
    Ok(BdfConversion {
        solver,
        translations,
        family,
    })
}
