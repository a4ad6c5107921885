//! `A`-perfect matchings of bipartite hypergraphs.
//!
//! Two solvers share one entry point, [`solve`]:
//!
//! * **exact**: depth-first search that always branches on the unmatched
//!   left vertex with the fewest compatible edges (ties to the lowest index)
//!   and tries its edges in index order. With `parallelism = 1` the result
//!   is the first solution in that order. Exhausting the tree proves that
//!   no `A`-perfect matching exists.
//! * **heuristic**: random order of the left vertices and a random
//!   compatible edge per step, restarting on a dead end. It can only report
//!   success or an exhausted restart budget.
//!
//! "Nonexistent" and "budget exhausted" are separate outcomes throughout.

use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::hypergraph::BipartiteHypergraph;

/// Largest left part accepted by [`brute_force_matching`].
pub const BRUTE_FORCE_MAX_LEFT: usize = 6;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MatchingError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),
    #[error("brute force supports at most {max} left vertices, got {left}")]
    TooLarge { left: usize, max: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SolverMode {
    Exact,
    Heuristic,
}

impl fmt::Display for SolverMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverMode::Exact => "exact",
            SolverMode::Heuristic => "heuristic",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub mode: SolverMode,
    pub seed: u64,
    pub restart_budget: u64,
    /// Search nodes (edge choices) allowed in exact mode.
    pub node_budget: u64,
    pub parallelism: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            mode: SolverMode::Exact,
            seed: 0,
            restart_budget: 1000,
            node_budget: 5_000_000,
            parallelism: 1,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), MatchingError> {
        if self.restart_budget == 0 {
            return Err(MatchingError::InvalidConfig(
                "restart budget must be positive",
            ));
        }
        if self.node_budget == 0 {
            return Err(MatchingError::InvalidConfig("node budget must be positive"));
        }
        if self.parallelism == 0 {
            return Err(MatchingError::InvalidConfig("parallelism must be positive"));
        }
        Ok(())
    }
}

/// Edge indices of a matching, ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Matching {
    edges: Vec<usize>,
}

impl Matching {
    pub fn new(mut edges: Vec<usize>) -> Self {
        edges.sort_unstable();
        Self { edges }
    }

    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Found(Matching),
    /// Proven: no `A`-perfect matching exists.
    Nonexistent,
    BudgetExhausted,
}

impl Outcome {
    pub fn label(&self) -> &'static str {
        match self {
            Outcome::Found(_) => "found",
            Outcome::Nonexistent => "nonexistent",
            Outcome::BudgetExhausted => "budget",
        }
    }

    pub fn matching(&self) -> Option<&Matching> {
        match self {
            Outcome::Found(m) => Some(m),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub outcome: Outcome,
    pub nodes: u64,
    pub restarts: u64,
    pub elapsed: Duration,
    /// False when several threads raced and any of their solutions may win.
    pub deterministic: bool,
}

pub fn solve(h: &BipartiteHypergraph, cfg: &SolverConfig) -> Result<SolveReport, MatchingError> {
    cfg.validate()?;
    let start = Instant::now();
    let by_left = h.edges_by_left();
    if by_left.iter().any(Vec::is_empty) {
        return Ok(SolveReport {
            outcome: Outcome::Nonexistent,
            nodes: 0,
            restarts: 0,
            elapsed: start.elapsed(),
            deterministic: true,
        });
    }
    let mut report = match (cfg.mode, cfg.parallelism) {
        (SolverMode::Exact, 1) => exact_sequential(h, &by_left, cfg),
        (SolverMode::Exact, _) => exact_parallel(h, &by_left, cfg),
        (SolverMode::Heuristic, _) => heuristic(h, &by_left, cfg),
    };
    report.elapsed = start.elapsed();
    Ok(report)
}

enum Step {
    Found,
    Dead,
    Budget,
    Stopped,
}

enum Branch {
    Done,
    Dead,
    Edges(Vec<usize>),
}

/// Depth-first search with incremental bookkeeping. An edge is live while
/// its left vertex is unmatched and none of its right vertices is used;
/// `blocked[e]` counts the reasons it is not.
struct ExactSearch<'a> {
    h: &'a BipartiteHypergraph,
    by_left: &'a [Vec<usize>],
    by_right: Vec<Vec<usize>>,
    blocked: Vec<u32>,
    live_left: Vec<usize>,
    covers: Vec<usize>,
    used: Vec<bool>,
    chosen: Vec<Option<usize>>,
    unmatched: usize,
    free: usize,
    nodes: &'a AtomicU64,
    budget: u64,
    stop: Option<&'a AtomicBool>,
}

impl<'a> ExactSearch<'a> {
    fn new(
        h: &'a BipartiteHypergraph,
        by_left: &'a [Vec<usize>],
        nodes: &'a AtomicU64,
        budget: u64,
        stop: Option<&'a AtomicBool>,
    ) -> Self {
        let mut by_right = vec![Vec::new(); h.right_count()];
        let mut covers = vec![0; h.right_count()];
        for (e, edge) in h.edges().iter().enumerate() {
            for &r in &edge.right {
                by_right[r].push(e);
                covers[r] += 1;
            }
        }
        Self {
            h,
            by_left,
            by_right,
            blocked: vec![0; h.edges().len()],
            live_left: by_left.iter().map(Vec::len).collect(),
            covers,
            used: vec![false; h.right_count()],
            chosen: vec![None; h.left_count()],
            unmatched: h.left_count(),
            free: h.right_count(),
            nodes,
            budget,
            stop,
        }
    }

    fn block(&mut self, e: usize) {
        self.blocked[e] += 1;
        if self.blocked[e] == 1 {
            let edge = &self.h.edges()[e];
            self.live_left[edge.left] -= 1;
            for &r in &edge.right {
                self.covers[r] -= 1;
            }
        }
    }

    fn unblock(&mut self, e: usize) {
        self.blocked[e] -= 1;
        if self.blocked[e] == 0 {
            let edge = &self.h.edges()[e];
            self.live_left[edge.left] += 1;
            for &r in &edge.right {
                self.covers[r] += 1;
            }
        }
    }

    fn take(&mut self, e: usize) {
        let h = self.h;
        let edge = &h.edges()[e];
        for &r in &edge.right {
            self.used[r] = true;
            for i in 0..self.by_right[r].len() {
                self.block(self.by_right[r][i]);
            }
        }
        for &other in &self.by_left[edge.left] {
            self.block(other);
        }
        self.chosen[edge.left] = Some(e);
        self.unmatched -= 1;
        self.free -= edge.right.len();
    }

    fn release(&mut self, e: usize) {
        let h = self.h;
        let edge = &h.edges()[e];
        for &other in &self.by_left[edge.left] {
            self.unblock(other);
        }
        for &r in &edge.right {
            self.used[r] = false;
            for i in 0..self.by_right[r].len() {
                self.unblock(self.by_right[r][i]);
            }
        }
        self.chosen[edge.left] = None;
        self.unmatched += 1;
        self.free += edge.right.len();
    }

    /// Unmatched left vertex with the fewest live edges, with that count.
    /// `None` when every left vertex is matched.
    fn most_constrained(&self) -> Option<(usize, usize)> {
        let mut best: Option<(usize, usize)> = None;
        for (left, &count) in self.live_left.iter().enumerate() {
            if self.chosen[left].is_some() {
                continue;
            }
            if best.is_none_or(|(_, c)| count < c) {
                best = Some((left, count));
                if count == 0 {
                    break;
                }
            }
        }
        best
    }

    /// Picks the next branching set. Free right vertices beyond what the
    /// unmatched left vertices need form the slack; a free right vertex no
    /// live edge can reach uses up one unit of it. With zero slack every
    /// free right vertex must be covered, so a right vertex with few live
    /// edges may branch tighter than any left vertex.
    fn branch(&self) -> Branch {
        let Some(slack) = self.free.checked_sub(self.unmatched * self.h.rank()) else {
            return Branch::Dead;
        };
        let Some((left, left_count)) = self.most_constrained() else {
            return Branch::Done;
        };
        if left_count == 0 {
            return Branch::Dead;
        }
        let mut unreachable = 0;
        let mut tightest: Option<(usize, usize)> = None;
        for (r, &c) in self.covers.iter().enumerate() {
            if self.used[r] {
                continue;
            }
            if c == 0 {
                unreachable += 1;
            } else if tightest.is_none_or(|(_, t)| c < t) {
                tightest = Some((r, c));
            }
        }
        if unreachable > slack {
            return Branch::Dead;
        }
        let live = |e: &&usize| self.blocked[**e] == 0;
        match tightest {
            Some((right, count)) if slack == 0 && count < left_count => {
                Branch::Edges(self.by_right[right].iter().filter(live).copied().collect())
            }
            _ => Branch::Edges(self.by_left[left].iter().filter(live).copied().collect()),
        }
    }

    fn run(&mut self) -> Step {
        let edges = match self.branch() {
            Branch::Done => return Step::Found,
            Branch::Dead => return Step::Dead,
            Branch::Edges(edges) => edges,
        };
        for e in edges {
            if self.stop.is_some_and(|s| s.load(Ordering::Relaxed)) {
                return Step::Stopped;
            }
            if self.nodes.fetch_add(1, Ordering::Relaxed) >= self.budget {
                return Step::Budget;
            }
            self.take(e);
            match self.run() {
                Step::Dead => self.release(e),
                other => return other,
            }
        }
        Step::Dead
    }

    fn matching(&self) -> Matching {
        Matching::new(
            self.chosen
                .iter()
                .map(|c| c.expect("all matched"))
                .collect(),
        )
    }
}

fn exact_sequential(
    h: &BipartiteHypergraph,
    by_left: &[Vec<usize>],
    cfg: &SolverConfig,
) -> SolveReport {
    let nodes = AtomicU64::new(0);
    let mut search = ExactSearch::new(h, by_left, &nodes, cfg.node_budget, None);
    let outcome = match search.run() {
        Step::Found => Outcome::Found(search.matching()),
        Step::Dead => Outcome::Nonexistent,
        Step::Budget | Step::Stopped => Outcome::BudgetExhausted,
    };
    SolveReport {
        outcome,
        nodes: nodes.load(Ordering::Relaxed).min(cfg.node_budget),
        restarts: 0,
        elapsed: Duration::ZERO,
        deterministic: true,
    }
}

/// Splits the root branching among threads; the first thread to succeed
/// stops the others.
fn exact_parallel(
    h: &BipartiteHypergraph,
    by_left: &[Vec<usize>],
    cfg: &SolverConfig,
) -> SolveReport {
    let nodes = AtomicU64::new(0);
    let stop = AtomicBool::new(false);
    let winner: Mutex<Option<Matching>> = Mutex::new(None);
    let budget_hit = AtomicBool::new(false);

    let probe = ExactSearch::new(h, by_left, &nodes, cfg.node_budget, None);
    let (root, _) = probe
        .most_constrained()
        .expect("left part is nonempty when edges exist");
    let candidates: Vec<usize> = by_left[root].clone();

    std::thread::scope(|scope| {
        for t in 0..cfg.parallelism {
            let candidates = &candidates;
            let (nodes, stop, winner, budget_hit) = (&nodes, &stop, &winner, &budget_hit);
            scope.spawn(move || {
                for &e in candidates.iter().skip(t).step_by(cfg.parallelism) {
                    if stop.load(Ordering::Relaxed) {
                        return;
                    }
                    if nodes.fetch_add(1, Ordering::Relaxed) >= cfg.node_budget {
                        budget_hit.store(true, Ordering::Relaxed);
                        return;
                    }
                    let mut search =
                        ExactSearch::new(h, by_left, nodes, cfg.node_budget, Some(stop));
                    search.take(e);
                    match search.run() {
                        Step::Found => {
                            let mut w = winner.lock().expect("winner lock");
                            if w.is_none() {
                                *w = Some(search.matching());
                            }
                            stop.store(true, Ordering::Relaxed);
                            return;
                        }
                        Step::Budget => {
                            budget_hit.store(true, Ordering::Relaxed);
                            return;
                        }
                        Step::Stopped => return,
                        Step::Dead => {}
                    }
                }
            });
        }
    });

    let outcome = match winner.into_inner().expect("winner lock") {
        Some(m) => Outcome::Found(m),
        None if budget_hit.load(Ordering::Relaxed) => Outcome::BudgetExhausted,
        None => Outcome::Nonexistent,
    };
    SolveReport {
        outcome,
        nodes: nodes.load(Ordering::Relaxed).min(cfg.node_budget),
        restarts: 0,
        elapsed: Duration::ZERO,
        deterministic: false,
    }
}

fn restart_rng(seed: u64, restart: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ restart.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// One randomized greedy attempt. Returns the matching or `None` on a dead
/// end; `nodes` counts edge picks.
fn greedy_attempt(
    h: &BipartiteHypergraph,
    by_left: &[Vec<usize>],
    rng: &mut ChaCha8Rng,
    nodes: &mut u64,
) -> Option<Matching> {
    let mut order: Vec<usize> = (0..h.left_count()).collect();
    order.shuffle(rng);
    let mut used = vec![false; h.right_count()];
    let mut chosen = Vec::with_capacity(order.len());
    let mut options = Vec::new();
    for left in order {
        options.clear();
        options.extend(
            by_left[left]
                .iter()
                .copied()
                .filter(|&e| h.edges()[e].right.iter().all(|&r| !used[r])),
        );
        if options.is_empty() {
            return None;
        }
        let e = options[rng.gen_range(0..options.len())];
        *nodes += 1;
        for &r in &h.edges()[e].right {
            used[r] = true;
        }
        chosen.push(e);
    }
    Some(Matching::new(chosen))
}

fn heuristic(h: &BipartiteHypergraph, by_left: &[Vec<usize>], cfg: &SolverConfig) -> SolveReport {
    if cfg.parallelism == 1 {
        let mut nodes = 0;
        for r in 0..cfg.restart_budget {
            let mut rng = restart_rng(cfg.seed, r);
            if let Some(m) = greedy_attempt(h, by_left, &mut rng, &mut nodes) {
                return SolveReport {
                    outcome: Outcome::Found(m),
                    nodes,
                    restarts: r,
                    elapsed: Duration::ZERO,
                    deterministic: true,
                };
            }
        }
        return SolveReport {
            outcome: Outcome::BudgetExhausted,
            nodes,
            restarts: cfg.restart_budget,
            elapsed: Duration::ZERO,
            deterministic: true,
        };
    }

    let stop = AtomicBool::new(false);
    let total_nodes = AtomicU64::new(0);
    let restarts = AtomicU64::new(0);
    let winner: Mutex<Option<Matching>> = Mutex::new(None);
    std::thread::scope(|scope| {
        for t in 0..cfg.parallelism as u64 {
            let (stop, total_nodes, restarts, winner) = (&stop, &total_nodes, &restarts, &winner);
            scope.spawn(move || {
                let mut nodes = 0;
                let mut r = t;
                while r < cfg.restart_budget && !stop.load(Ordering::Relaxed) {
                    let mut rng = restart_rng(cfg.seed, r);
                    restarts.fetch_add(1, Ordering::Relaxed);
                    if let Some(m) = greedy_attempt(h, by_left, &mut rng, &mut nodes) {
                        let mut w = winner.lock().expect("winner lock");
                        if w.is_none() {
                            *w = Some(m);
                        }
                        stop.store(true, Ordering::Relaxed);
                        break;
                    }
                    r += cfg.parallelism as u64;
                }
                total_nodes.fetch_add(nodes, Ordering::Relaxed);
            });
        }
    });
    let outcome = match winner.into_inner().expect("winner lock") {
        Some(m) => Outcome::Found(m),
        None => Outcome::BudgetExhausted,
    };
    SolveReport {
        outcome,
        nodes: total_nodes.into_inner(),
        restarts: restarts.into_inner(),
        elapsed: Duration::ZERO,
        deterministic: false,
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MatchingViolation {
    EdgeOutOfRange(usize),
    /// Two chosen edges share a left vertex.
    LeftCollision {
        left: usize,
        first: usize,
        second: usize,
    },
    /// Two chosen edges share a right vertex.
    RightCollision {
        right: usize,
        first: usize,
        second: usize,
    },
    Uncovered(usize),
}

impl fmt::Display for MatchingViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatchingViolation::EdgeOutOfRange(e) => write!(f, "edge {e} does not exist"),
            MatchingViolation::LeftCollision {
                left,
                first,
                second,
            } => {
                write!(
                    f,
                    "edges {first} and {second} both cover left vertex {left}"
                )
            }
            MatchingViolation::RightCollision {
                right,
                first,
                second,
            } => write!(f, "edges {first} and {second} share right vertex {right}"),
            MatchingViolation::Uncovered(left) => write!(f, "left vertex {left} is uncovered"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchingReport {
    pub ok: bool,
    pub violation: Option<MatchingViolation>,
}

pub fn verify_matching(h: &BipartiteHypergraph, m: &Matching) -> MatchingReport {
    let violation = matching_violation(h, m);
    MatchingReport {
        ok: violation.is_none(),
        violation,
    }
}

fn matching_violation(h: &BipartiteHypergraph, m: &Matching) -> Option<MatchingViolation> {
    let mut left_owner = vec![None; h.left_count()];
    let mut right_owner = vec![None; h.right_count()];
    for &e in &m.edges {
        let Some(edge) = h.edges().get(e) else {
            return Some(MatchingViolation::EdgeOutOfRange(e));
        };
        if let Some(first) = left_owner[edge.left] {
            return Some(MatchingViolation::LeftCollision {
                left: edge.left,
                first,
                second: e,
            });
        }
        left_owner[edge.left] = Some(e);
        for &r in &edge.right {
            if let Some(first) = right_owner[r] {
                return Some(MatchingViolation::RightCollision {
                    right: r,
                    first,
                    second: e,
                });
            }
            right_owner[r] = Some(e);
        }
    }
    left_owner
        .iter()
        .position(Option::is_none)
        .map(MatchingViolation::Uncovered)
}

/// Exhaustive enumeration of one edge per left vertex, with no pruning.
/// Returns the first disjoint combination in odometer order.
pub fn brute_force_matching(h: &BipartiteHypergraph) -> Result<Option<Matching>, MatchingError> {
    if h.left_count() > BRUTE_FORCE_MAX_LEFT {
        return Err(MatchingError::TooLarge {
            left: h.left_count(),
            max: BRUTE_FORCE_MAX_LEFT,
        });
    }
    let by_left = h.edges_by_left();
    if by_left.iter().any(Vec::is_empty) {
        return Ok(None);
    }
    let mut digits = vec![0usize; by_left.len()];
    loop {
        let choice: Vec<usize> = digits.iter().zip(&by_left).map(|(&d, es)| es[d]).collect();
        let mut used = vec![false; h.right_count()];
        let disjoint = choice.iter().all(|&e| {
            h.edges()[e]
                .right
                .iter()
                .all(|&r| !std::mem::replace(&mut used[r], true))
        });
        if disjoint {
            return Ok(Some(Matching::new(choice)));
        }
        // Advance the odometer, last position fastest.
        let mut pos = digits.len();
        loop {
            if pos == 0 {
                return Ok(None);
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < by_left[pos].len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{EdgePayload, HyperEdge};

    fn edge(left: usize, right: &[usize]) -> HyperEdge {
        HyperEdge {
            left,
            right: right.to_vec(),
            payload: EdgePayload {
                block: left,
                shift: 0,
            },
        }
    }

    fn graph(
        left: usize,
        right: usize,
        rank: usize,
        edges: &[(usize, &[usize])],
    ) -> BipartiteHypergraph {
        BipartiteHypergraph::new(
            left,
            right,
            rank,
            edges.iter().map(|&(l, r)| edge(l, r)).collect(),
        )
        .unwrap()
    }

    fn exact() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn single_edge() {
        let h = graph(1, 2, 2, &[(0, &[0, 1])]);
        let r = solve(&h, &exact()).unwrap();
        assert_eq!(r.outcome, Outcome::Found(Matching::new(vec![0])));
        assert_eq!(
            brute_force_matching(&h).unwrap(),
            Some(Matching::new(vec![0]))
        );
    }

    #[test]
    fn pigeonhole_is_proven() {
        let h = graph(2, 2, 1, &[(0, &[0]), (1, &[0])]);
        let r = solve(&h, &exact()).unwrap();
        assert_eq!(r.outcome, Outcome::Nonexistent);
        assert_eq!(brute_force_matching(&h).unwrap(), None);
    }

    #[test]
    fn missing_edges_mean_nonexistence() {
        let h = graph(2, 2, 1, &[(0, &[0])]);
        assert_eq!(solve(&h, &exact()).unwrap().outcome, Outcome::Nonexistent);
        assert_eq!(brute_force_matching(&h).unwrap(), None);
        let heuristic = SolverConfig {
            mode: SolverMode::Heuristic,
            ..exact()
        };
        assert_eq!(solve(&h, &heuristic).unwrap().outcome, Outcome::Nonexistent);
    }

    #[test]
    fn empty_left_part() {
        let h = graph(0, 3, 1, &[]);
        let r = solve(&h, &exact()).unwrap();
        let m = r.outcome.matching().unwrap().clone();
        assert!(m.is_empty());
        assert!(verify_matching(&h, &m).ok);
    }

    #[test]
    fn verification_reports() {
        let h = graph(2, 3, 2, &[(0, &[0, 1]), (1, &[1, 2]), (1, &[2, 0])]);
        let r = verify_matching(&h, &Matching::new(vec![0, 1]));
        assert_eq!(
            r.violation,
            Some(MatchingViolation::RightCollision {
                right: 1,
                first: 0,
                second: 1
            })
        );
        let r = verify_matching(&h, &Matching::new(vec![0]));
        assert_eq!(r.violation, Some(MatchingViolation::Uncovered(1)));
        let r = verify_matching(&h, &Matching::new(vec![1, 2]));
        assert!(matches!(
            r.violation,
            Some(MatchingViolation::LeftCollision { left: 1, .. })
        ));
        let r = verify_matching(&h, &Matching::new(vec![9]));
        assert_eq!(r.violation, Some(MatchingViolation::EdgeOutOfRange(9)));
    }

    #[test]
    fn fail_first_backtracks() {
        // Left 0's first edge blocks both edges of left 1.
        let h = graph(
            2,
            6,
            2,
            &[(0, &[0, 1]), (0, &[2, 3]), (1, &[1, 4]), (1, &[0, 5])],
        );
        let r = solve(&h, &exact()).unwrap();
        let m = r.outcome.matching().unwrap();
        assert!(verify_matching(&h, m).ok);
    }

    #[test]
    fn budget_is_distinguished() {
        // Eight left vertices compete for seven right vertices, while a
        // ninth owns enough spare right vertices to defeat counting.
        let mut edges: Vec<(usize, Vec<usize>)> = Vec::new();
        for l in 0..8 {
            for r in 0..7 {
                edges.push((l, vec![r]));
            }
        }
        for r in 7..15 {
            edges.push((8, vec![r]));
        }
        let refs: Vec<(usize, &[usize])> = edges.iter().map(|(l, r)| (*l, r.as_slice())).collect();
        let h = graph(9, 15, 1, &refs);
        let tight = SolverConfig {
            node_budget: 10,
            ..exact()
        };
        assert_eq!(solve(&h, &tight).unwrap().outcome, Outcome::BudgetExhausted);
        assert_eq!(solve(&h, &exact()).unwrap().outcome, Outcome::Nonexistent);
    }

    #[test]
    fn counting_prunes_tight_instances() {
        let mut edges: Vec<(usize, Vec<usize>)> = Vec::new();
        for l in 0..8 {
            for r in 0..7 {
                edges.push((l, vec![r]));
            }
        }
        let refs: Vec<(usize, &[usize])> = edges.iter().map(|(l, r)| (*l, r.as_slice())).collect();
        let r = solve(&graph(8, 7, 1, &refs), &exact()).unwrap();
        assert_eq!((r.outcome, r.nodes), (Outcome::Nonexistent, 0));
    }

    #[test]
    fn config_validation() {
        let h = graph(1, 1, 1, &[(0, &[0])]);
        for cfg in [
            SolverConfig {
                node_budget: 0,
                ..exact()
            },
            SolverConfig {
                restart_budget: 0,
                ..exact()
            },
            SolverConfig {
                parallelism: 0,
                ..exact()
            },
        ] {
            assert!(solve(&h, &cfg).is_err());
        }
    }

    #[test]
    fn brute_force_refuses_large_instances() {
        let edges: Vec<(usize, &[usize])> = (0..7).map(|l| (l, &[0usize][..])).collect();
        let h = graph(7, 1, 1, &edges);
        assert!(matches!(
            brute_force_matching(&h),
            Err(MatchingError::TooLarge { left: 7, .. })
        ));
    }

    #[test]
    fn heuristic_and_parallel_modes_agree_on_feasible_instance() {
        let h = graph(
            3,
            6,
            2,
            &[
                (0, &[0, 1]),
                (0, &[2, 3]),
                (1, &[1, 2]),
                (1, &[4, 5]),
                (2, &[0, 3]),
                (2, &[0, 1]),
            ],
        );
        for cfg in [
            SolverConfig {
                mode: SolverMode::Heuristic,
                ..exact()
            },
            SolverConfig {
                mode: SolverMode::Heuristic,
                parallelism: 3,
                ..exact()
            },
            SolverConfig {
                parallelism: 2,
                ..exact()
            },
        ] {
            let r = solve(&h, &cfg).unwrap();
            let m = r.outcome.matching().expect("feasible");
            assert!(verify_matching(&h, m).ok);
        }
        let r = solve(
            &graph(2, 2, 1, &[(0, &[0]), (0, &[1]), (1, &[0]), (1, &[1])]),
            &SolverConfig {
                parallelism: 4,
                ..exact()
            },
        )
        .unwrap();
        assert!(!r.deterministic);
    }

    #[test]
    fn parallel_exact_proves_nonexistence() {
        let h = graph(
            3,
            2,
            1,
            &[
                (0, &[0]),
                (0, &[1]),
                (1, &[0]),
                (1, &[1]),
                (2, &[0]),
                (2, &[1]),
            ],
        );
        let cfg = SolverConfig {
            parallelism: 2,
            ..exact()
        };
        assert_eq!(solve(&h, &cfg).unwrap().outcome, Outcome::Nonexistent);
    }
}
