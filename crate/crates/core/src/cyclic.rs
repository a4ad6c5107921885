//! Cyclic BIBDs over `Z_v`: orbit decomposition, orbit-count bounds, and
//! selection of pairwise disjoint blocks, one from each orbit.

use std::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::designs::{verify_bibd, Design, DesignError, PairWitness};
use crate::groups::{blocking_translations, AbelianGroup, GroupError, GroupSubset};
use crate::hypergraph::{build_novak_hypergraph, HypergraphError};
use crate::matching::{solve, MatchingError, Outcome, SolveReport, SolverConfig};

#[derive(Debug, Error)]
pub enum CyclicError {
    #[error("a cyclic design needs at least one base block")]
    NoBases,
    #[error("block size must be at least 2, got {0}")]
    BlockSize(usize),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error("base blocks {first} and {second} generate the same orbit")]
    SameOrbit { first: usize, second: usize },
    #[error("developed design is not a BIBD: pair {:?} covered {} times", .0.pair, .0.count)]
    NotABibd(PairWitness),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
}

/// Size of the orbit of `block` under translation in `Z_v`.
pub fn orbit_length(v: usize, block: &[usize]) -> usize {
    if v == 0 {
        return 0;
    }
    let mut member = vec![false; v];
    for &b in block {
        member[b % v] = true;
    }
    let stabilizer = (0..v)
        .filter(|&a| block.iter().all(|&b| member[(b + a) % v]))
        .count();
    v / stabilizer
}

pub fn translate(v: usize, block: &[usize], a: usize) -> Vec<usize> {
    let mut out: Vec<usize> = block.iter().map(|&b| (b + a) % v).collect();
    out.sort_unstable();
    out
}

/// Lexicographically least translate of `block`, with the shift that
/// produces it from `block`.
pub fn canonical_translate(v: usize, block: &[usize]) -> (Vec<usize>, usize) {
    (0..v)
        .map(|a| (translate(v, block, a), a))
        .min()
        .unwrap_or_default()
}

/// Cyclic `(v,k,λ)`-BIBD given by one canonical base block per orbit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicBibd {
    v: usize,
    k: usize,
    lambda: usize,
    bases: Vec<Vec<usize>>,
}

impl CyclicBibd {
    pub fn new(
        v: usize,
        k: usize,
        lambda: usize,
        bases: Vec<Vec<usize>>,
    ) -> Result<Self, CyclicError> {
        if bases.is_empty() {
            return Err(CyclicError::NoBases);
        }
        if k < 2 {
            return Err(CyclicError::BlockSize(k));
        }
        // Validates sizes, ranges and repeats.
        Design::new(v, k, lambda, bases.clone())?;
        let bases: Vec<Vec<usize>> = bases.iter().map(|b| canonical_translate(v, b).0).collect();
        for (j, b) in bases.iter().enumerate() {
            if let Some(i) = bases[..j].iter().position(|a| a == b) {
                return Err(CyclicError::SameOrbit {
                    first: i,
                    second: j,
                });
            }
        }
        let c = Self {
            v,
            k,
            lambda,
            bases,
        };
        let report = verify_bibd(&c.develop());
        match report.witness {
            None => Ok(c),
            Some(w) => Err(CyclicError::NotABibd(w)),
        }
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

    pub fn bases(&self) -> &[Vec<usize>] {
        &self.bases
    }

    /// All distinct translates of every base block.
    pub fn develop(&self) -> Design {
        let blocks = self
            .bases
            .iter()
            .flat_map(|b| (0..orbit_length(self.v, b)).map(move |a| translate(self.v, b, a)))
            .collect();
        Design::new(self.v, self.k, self.lambda, blocks).expect("translates keep block shape")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrbitKind {
    Short,
    Full,
}

impl fmt::Display for OrbitKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            OrbitKind::Short => "short",
            OrbitKind::Full => "full",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub base: Vec<usize>,
    pub length: usize,
    pub kind: OrbitKind,
}

pub fn decompose_orbits(c: &CyclicBibd) -> Vec<Orbit> {
    c.bases
        .iter()
        .map(|b| {
            let length = orbit_length(c.v, b);
            Orbit {
                base: b.clone(),
                length,
                kind: if length == c.v {
                    OrbitKind::Full
                } else {
                    OrbitKind::Short
                },
            }
        })
        .collect()
}

/// Orbit counts against `h ≤ 2λ√k` and
/// `λ(v−1)/(k(k−1)) − 2λ√k ≤ m ≤ λ(v−1)/(k(k−1))`.
///
/// The `ok` flags are decided in exact integer arithmetic; the floating
/// point fields are for display.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitBoundsReport {
    pub h: usize,
    pub m: usize,
    pub h_bound: f64,
    pub m_lower: f64,
    pub m_upper: f64,
    pub h_ok: bool,
    pub m_lower_ok: bool,
    pub m_upper_ok: bool,
}

impl OrbitBoundsReport {
    pub fn ok(&self) -> bool {
        self.h_ok && self.m_lower_ok && self.m_upper_ok
    }

    pub fn h_slack(&self) -> f64 {
        self.h_bound - self.h as f64
    }

    pub fn m_upper_slack(&self) -> f64 {
        self.m_upper - self.m as f64
    }

    pub fn m_lower_slack(&self) -> f64 {
        self.m as f64 - self.m_lower
    }
}

impl fmt::Display for OrbitBoundsReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "h={} <= {:.4} ({}); {:.4} <= m={} ({}) <= {:.4} ({})",
            self.h,
            self.h_bound,
            if self.h_ok { "ok" } else { "VIOLATED" },
            self.m_lower,
            self.m,
            if self.m_lower_ok { "ok" } else { "VIOLATED" },
            self.m_upper,
            if self.m_upper_ok { "ok" } else { "VIOLATED" },
        )
    }
}

pub fn orbit_bounds(v: usize, k: usize, lambda: usize, h: usize, m: usize) -> OrbitBoundsReport {
    let (v128, k128, l128) = (v as u128, k as u128, lambda as u128);
    let (h128, m128) = (h as u128, m as u128);
    let kk1 = k128 * k128.saturating_sub(1);
    let total = l128 * v128.saturating_sub(1);
    // h ≤ 2λ√k  ⇔  h² ≤ 4λ²k
    let h_ok = h128 * h128 <= 4 * l128 * l128 * k128;
    // m ≤ λ(v−1)/(k(k−1))  ⇔  m·k(k−1) ≤ λ(v−1)
    let m_upper_ok = m128 * kk1 <= total;
    // λ(v−1) − m·k(k−1) ≤ 2λ√k·k(k−1)
    let m_lower_ok = match total.checked_sub(m128 * kk1) {
        None | Some(0) => true,
        Some(gap) => gap * gap <= 4 * l128 * l128 * k128 * kk1 * kk1,
    };
    let h_bound = 2.0 * lambda as f64 * (k as f64).sqrt();
    let m_upper = if kk1 == 0 {
        f64::INFINITY
    } else {
        total as f64 / kk1 as f64
    };
    OrbitBoundsReport {
        h,
        m,
        h_bound,
        m_lower: m_upper - h_bound,
        m_upper,
        h_ok,
        m_lower_ok,
        m_upper_ok,
    }
}

pub fn check_orbit_bounds(c: &CyclicBibd) -> OrbitBoundsReport {
    let orbits = decompose_orbits(c);
    let h = orbits.iter().filter(|o| o.kind == OrbitKind::Short).count();
    orbit_bounds(c.v, c.k, c.lambda, h, orbits.len() - h)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlacementStep {
    /// Translations that would collide with the points already placed.
    pub blocked: usize,
    /// Points already placed before this step.
    pub placed: usize,
    pub block_size: usize,
}

impl PlacementStep {
    /// `|blocked| ≤ k·|T|`.
    pub fn within_bound(&self) -> bool {
        self.blocked <= self.block_size * self.placed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShortPlacement {
    pub translations: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
    /// Union of the placed blocks, ascending.
    pub union: Vec<usize>,
    pub steps: Vec<PlacementStep>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("no translation of short base {step} avoids the {placed} points already placed")]
pub struct PlacementFailure {
    pub step: usize,
    pub placed: usize,
    pub steps: Vec<PlacementStep>,
}

/// Places the bases in order, each at the least translation disjoint from
/// everything placed so far.
pub fn place_short_orbits(
    short_bases: &[Vec<usize>],
    v: usize,
) -> Result<Result<ShortPlacement, PlacementFailure>, CyclicError> {
    let group = AbelianGroup::cyclic(v)?;
    let mut placement = ShortPlacement {
        translations: Vec::new(),
        blocks: Vec::new(),
        union: Vec::new(),
        steps: Vec::new(),
    };
    for (step, base) in short_bases.iter().enumerate() {
        let block = GroupSubset::from_indices(&group, base.iter().map(|&b| b % v));
        let placed = GroupSubset::from_indices(&group, placement.union.iter().copied());
        let blocked = blocking_translations(&block, &placed)?;
        placement.steps.push(PlacementStep {
            blocked: blocked.len(),
            placed: placement.union.len(),
            block_size: base.len(),
        });
        let mut is_blocked = vec![false; v];
        for i in blocked.indices() {
            is_blocked[i] = true;
        }
        let Some(a) = (0..v).find(|&a| !is_blocked[a]) else {
            return Ok(Err(PlacementFailure {
                step,
                placed: placement.union.len(),
                steps: placement.steps,
            }));
        };
        let shifted = translate(v, base, a);
        placement.union.extend(&shifted);
        placement.union.sort_unstable();
        placement.translations.push(a);
        placement.blocks.push(shifted);
    }
    Ok(Ok(placement))
}

/// One block per orbit, in the order of [`CyclicBibd::bases`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NovakSelection {
    /// Block `i` is `bases[i] + translations[i]`.
    pub translations: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl NovakSelection {
    pub fn from_translations(c: &CyclicBibd, translations: Vec<usize>) -> Self {
        let blocks = c
            .bases
            .iter()
            .zip(&translations)
            .map(|(b, &a)| translate(c.v, b, a))
            .collect();
        Self {
            translations,
            blocks,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum NovakOutcome {
    Selected(NovakSelection),
    ShortPlacementFailed(PlacementFailure),
    /// No matching extends the short-orbit placement that was tried.
    MatchingNonexistent,
    MatchingBudgetExhausted,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NovakReport {
    pub outcome: NovakOutcome,
    pub short_orbits: usize,
    pub solver: Option<SolveReport>,
    /// Short-orbit orders tried.
    pub attempts: usize,
}

impl NovakReport {
    pub fn selection(&self) -> Option<&NovakSelection> {
        match &self.outcome {
            NovakOutcome::Selected(s) => Some(s),
            _ => None,
        }
    }

    /// True only when the matching search was exhaustive and there was no
    /// short-orbit placement to second-guess.
    pub fn proves_nonexistence(&self) -> bool {
        self.short_orbits == 0 && self.outcome == NovakOutcome::MatchingNonexistent
    }
}

pub fn novak_select(c: &CyclicBibd, cfg: &SolverConfig) -> Result<NovakReport, CyclicError> {
    let orbits = decompose_orbits(c);
    let short: Vec<usize> = (0..orbits.len())
        .filter(|&i| orbits[i].kind == OrbitKind::Short)
        .collect();
    select_with_short_order(c, &orbits, &short, cfg)
}

/// Like [`novak_select`], retrying with up to `orders − 1` further
/// short-orbit orders (shuffled from `cfg.seed`) whenever an attempt fails.
pub fn novak_select_with_retries(
    c: &CyclicBibd,
    cfg: &SolverConfig,
    orders: usize,
) -> Result<NovakReport, CyclicError> {
    let orbits = decompose_orbits(c);
    let mut short: Vec<usize> = (0..orbits.len())
        .filter(|&i| orbits[i].kind == OrbitKind::Short)
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut report = select_with_short_order(c, &orbits, &short, cfg)?;
    let mut attempts = 1;
    while attempts < orders && report.selection().is_none() && short.len() > 1 {
        short.shuffle(&mut rng);
        report = select_with_short_order(c, &orbits, &short, cfg)?;
        attempts += 1;
    }
    report.attempts = attempts;
    Ok(report)
}

fn select_with_short_order(
    c: &CyclicBibd,
    orbits: &[Orbit],
    short: &[usize],
    cfg: &SolverConfig,
) -> Result<NovakReport, CyclicError> {
    let short_bases: Vec<Vec<usize>> = short.iter().map(|&i| orbits[i].base.clone()).collect();
    let placement = match place_short_orbits(&short_bases, c.v)? {
        Ok(p) => p,
        Err(failure) => {
            return Ok(NovakReport {
                outcome: NovakOutcome::ShortPlacementFailed(failure),
                short_orbits: short.len(),
                solver: None,
                attempts: 1,
            })
        }
    };
    let full: Vec<usize> = (0..orbits.len())
        .filter(|&i| orbits[i].kind == OrbitKind::Full)
        .collect();
    let full_bases: Vec<Vec<usize>> = full.iter().map(|&i| orbits[i].base.clone()).collect();
    let h = build_novak_hypergraph(c.v, &full_bases, &placement.union)?;
    let solver = solve(&h, cfg)?;
    let outcome = match &solver.outcome {
        Outcome::Found(m) => {
            let mut translations = vec![0; orbits.len()];
            for (&orbit, &a) in short.iter().zip(&placement.translations) {
                translations[orbit] = a;
            }
            for &e in m.edges() {
                let payload = h.edges()[e].payload;
                translations[full[payload.block]] = payload.shift;
            }
            let selection = NovakSelection::from_translations(c, translations);
            let check = verify_disjoint_selection(c, &selection.blocks);
            assert!(check.ok, "decoded selection failed verification: {check:?}");
            NovakOutcome::Selected(selection)
        }
        Outcome::Nonexistent => NovakOutcome::MatchingNonexistent,
        Outcome::BudgetExhausted => NovakOutcome::MatchingBudgetExhausted,
    };
    Ok(NovakReport {
        outcome,
        short_orbits: short.len(),
        solver: Some(solver),
        attempts: 1,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SelectionViolation {
    CountMismatch {
        expected: usize,
        got: usize,
    },
    NotInOrbit {
        orbit: usize,
    },
    Overlap {
        first: usize,
        second: usize,
        point: usize,
    },
}

impl fmt::Display for SelectionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionViolation::CountMismatch { expected, got } => {
                write!(f, "expected {expected} blocks, got {got}")
            }
            SelectionViolation::NotInOrbit { orbit } => {
                write!(f, "block {orbit} is not a translate of base block {orbit}")
            }
            SelectionViolation::Overlap {
                first,
                second,
                point,
            } => write!(f, "blocks {first} and {second} share point {point}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SelectionReport {
    pub ok: bool,
    pub violation: Option<SelectionViolation>,
}

/// Block `i` of `selection` must lie in orbit `i`, and all blocks must be
/// pairwise disjoint.
pub fn verify_disjoint_selection(c: &CyclicBibd, selection: &[Vec<usize>]) -> SelectionReport {
    let violation = selection_violation(c, selection);
    SelectionReport {
        ok: violation.is_none(),
        violation,
    }
}

fn selection_violation(c: &CyclicBibd, selection: &[Vec<usize>]) -> Option<SelectionViolation> {
    if selection.len() != c.bases.len() {
        return Some(SelectionViolation::CountMismatch {
            expected: c.bases.len(),
            got: selection.len(),
        });
    }
    for (orbit, block) in selection.iter().enumerate() {
        let well_formed = block.len() == c.k && block.iter().all(|&p| p < c.v);
        if !well_formed || canonical_translate(c.v, block).0 != c.bases[orbit] {
            return Some(SelectionViolation::NotInOrbit { orbit });
        }
    }
    let mut owner: Vec<Option<usize>> = vec![None; c.v];
    for (i, block) in selection.iter().enumerate() {
        for &p in block {
            if let Some(first) = owner[p] {
                return Some(SelectionViolation::Overlap {
                    first,
                    second: i,
                    point: p,
                });
            }
            owner[p] = Some(i);
        }
    }
    None
}
