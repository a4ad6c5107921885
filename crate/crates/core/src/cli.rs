//! Command-line front end.
//!
//! [`run`] parses arguments, dispatches to the library and returns a
//! [`CommandResult`]; the binary only prints it and exits with its code.
//!
//! Exit codes: `0` property verified or object found, `1` verification
//! failed or object proven nonexistent, `2` budget exhausted or not found,
//! `3` input error.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclic::{
    decompose_orbits, novak_select_with_retries, place_short_orbits, verify_disjoint_selection,
    CyclicBibd, CyclicError, NovakOutcome, NovakSelection, OrbitKind,
};
use crate::designs::{
    alpha_beta, apply_nesting, coloring_to_nesting, is_perfect_nesting, levi_graph,
    nesting_necessary_conditions, nesting_to_coloring, verify_bibd, verify_exact,
    verify_harmonious, verify_packing, ArithmeticError, Coloring, ColoringError, Design,
    DesignError, NestingCertificate,
};
use crate::diff_families::{
    develop_with_anchor, df_to_bdf, search_df, verify_bdf, verify_df, DfError, DifferenceFamily,
    SearchResult,
};
use crate::groups::{AbelianGroup, GroupError, GroupSubset};
use crate::hypergraph::{
    build_bdf_hypergraph, build_nesting_hypergraph, build_novak_hypergraph, degree_report,
    dp_hypothesis_check, find_nesting, BipartiteHypergraph, HypergraphError,
};
use crate::matching::{MatchingError, Outcome, SolveReport, SolverConfig, SolverMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

pub const CERT_SCHEMA: &str = "nestkit-cert/1";

#[derive(Debug, Clone, PartialEq)]
pub struct CommandResult {
    pub code: i32,
    /// Deterministic report for standard output.
    pub report: String,
    pub certificate: Option<Certificate>,
    /// Timing and other run-dependent notes for standard error.
    pub diagnostics: String,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("line {line}: {reason}")]
    Syntax { line: usize, reason: String },
    #[error("{0}")]
    Usage(String),
    #[error("invalid certificate: {0}")]
    Certificate(String),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Df(#[from] DfError),
    #[error(transparent)]
    Cyclic(#[from] CyclicError),
    #[error(transparent)]
    Hypergraph(#[from] HypergraphError),
    #[error(transparent)]
    Matching(#[from] MatchingError),
    #[error(transparent)]
    Arithmetic(#[from] ArithmeticError),
    #[error(transparent)]
    Coloring(#[from] ColoringError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Self-contained certificate document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema: String,
    #[serde(flatten)]
    pub body: CertificateBody,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverStamp>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CertificateBody {
    Nesting {
        v: usize,
        k: usize,
        lambda: usize,
        blocks: Vec<Vec<usize>>,
        anchors: Vec<usize>,
    },
    Coloring {
        v: usize,
        k: usize,
        lambda: usize,
        blocks: Vec<Vec<usize>>,
        /// Points first, then blocks in order.
        colors: Vec<usize>,
    },
    Df {
        group: String,
        k: usize,
        lambda: usize,
        blocks: Vec<String>,
    },
    Bdf {
        group: String,
        k: usize,
        lambda: usize,
        blocks: Vec<String>,
        source_blocks: Vec<String>,
        translations: Vec<String>,
    },
    Novak {
        v: usize,
        k: usize,
        lambda: usize,
        bases: Vec<Vec<usize>>,
        translations: Vec<usize>,
        blocks: Vec<Vec<usize>>,
    },
}

impl CertificateBody {
    pub fn kind(&self) -> &'static str {
        match self {
            CertificateBody::Nesting { .. } => "nesting",
            CertificateBody::Coloring { .. } => "coloring",
            CertificateBody::Df { .. } => "df",
            CertificateBody::Bdf { .. } => "bdf",
            CertificateBody::Novak { .. } => "novak",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverStamp {
    pub mode: SolverMode,
    pub seed: u64,
    pub parallelism: usize,
    pub node_budget: u64,
    pub restart_budget: u64,
}

impl From<&SolverConfig> for SolverStamp {
    fn from(c: &SolverConfig) -> Self {
        Self {
            mode: c.mode,
            seed: c.seed,
            parallelism: c.parallelism,
            node_budget: c.node_budget,
            restart_budget: c.restart_budget,
        }
    }
}

impl Certificate {
    fn new(body: CertificateBody, solver: Option<&SolverConfig>) -> Self {
        Self {
            schema: CERT_SCHEMA.to_string(),
            body,
            solver: solver.map(SolverStamp::from),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("certificates serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cert: Certificate = serde_json::from_str(text)?;
        if cert.schema != CERT_SCHEMA {
            return Err(CliError::Certificate(format!(
                "unsupported schema {:?}",
                cert.schema
            )));
        }
        Ok(cert)
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "nestkit",
    version,
    about = "Verify and construct nestings, Banff difference families and disjoint orbit selections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Heuristic,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Nesting,
    Bdf,
    Novak,
}

#[derive(Args, Debug, Clone)]
struct SolverArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Search nodes in exact mode, restarts in heuristic mode.
    #[arg(long)]
    budget: Option<u64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Exact)]
    mode: ModeArg,
    #[arg(long, default_value_t = 1)]
    parallelism: usize,
}

impl SolverArgs {
    fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig {
            mode: match self.mode {
                ModeArg::Exact => SolverMode::Exact,
                ModeArg::Heuristic => SolverMode::Heuristic,
            },
            seed: self.seed,
            parallelism: self.parallelism,
            ..SolverConfig::default()
        };
        if let Some(b) = self.budget {
            match cfg.mode {
                SolverMode::Exact => cfg.node_budget = b,
                SolverMode::Heuristic => cfg.restart_budget = b,
            }
        }
        cfg
    }
}

#[derive(Args, Debug, Clone)]
struct FamilyInput {
    /// Family file (group on line 1, one base block per line) or certificate.
    file: Option<PathBuf>,
    #[arg(long, conflicts_with = "file", requires = "blocks")]
    group: Option<String>,
    /// Base blocks, one argument each, e.g. `7,8,11 4,10,12`.
    #[arg(long, num_args = 1.., requires = "group")]
    blocks: Vec<String>,
    /// Defaults to the only value compatible with the block sizes.
    #[arg(long)]
    lambda: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that a design file is a BIBD (or a packing).
    VerifyDesign {
        file: PathBuf,
        #[arg(long)]
        packing: bool,
    },
    /// Check a difference family.
    VerifyDf(FamilyInput),
    /// Check a Banff difference family and its anchored development.
    VerifyBdf(FamilyInput),
    /// Search for a nesting of a BIBD.
    NestFind {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a nesting or coloring certificate, or a design with anchors.
    NestVerify {
        file: PathBuf,
        #[arg(long, value_delimiter = ',')]
        anchors: Option<Vec<usize>>,
        /// Also require the nesting to be perfect.
        #[arg(long)]
        perfect: bool,
    },
    /// Translate the base blocks of a DF into a Banff family.
    BdfFromDf {
        #[command(flatten)]
        input: FamilyInput,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pick pairwise disjoint blocks, one from each orbit of a cyclic BIBD.
    NovakSelect {
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Short-orbit orders to try before giving up.
        #[arg(long, default_value_t = 1)]
        short_orders: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a disjoint orbit selection certificate.
    NovakVerify { file: PathBuf },
    /// Derive a harmonious Levi-graph coloring from a nesting.
    LeviColor {
        /// Design file or nesting certificate.
        file: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Degree and codegree statistics of an auxiliary hypergraph.
    HypergraphStats {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[command(flatten)]
        input: FamilyInput,
        /// Write the hypergraph in text form.
        #[arg(long)]
        dump: Option<PathBuf>,
        #[arg(long = "dp-d")]
        dp_d: Option<f64>,
        #[arg(long = "dp-alpha", default_value_t = 0.5)]
        dp_alpha: f64,
        #[arg(long = "dp-beta", default_value_t = 0.5)]
        dp_beta: f64,
    },
    /// Exhaustive search for a difference family.
    SearchDf {
        #[arg(long)]
        group: String,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long, default_value_t = 10_000_000)]
        budget: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Try to turn cyclic (Z_v,k,1)-DFs into Banff families over a range of v.
    ///
    /// For each v = 1 (mod k(k-1)) in range, searches a DF and tries to
    /// translate it into a Banff family. Outcomes are reported as data.
    BdfExperiment {
        #[arg(long)]
        k: usize,
        #[arg(long = "v-min")]
        v_min: Option<usize>,
        #[arg(long = "v-max", default_value_t = 61)]
        v_max: usize,
        /// Node budget of each DF search.
        #[arg(long = "df-budget", default_value_t = 10_000_000)]
        df_budget: u64,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Divisibility moduli of a (k2,λ2;k1,λ1)-nesting.
    AlphaBeta {
        k1: u64,
        lambda1: u64,
        k2: u64,
        lambda2: u64,
    },
    /// Necessary conditions for a (perfect) nesting.
    Conditions {
        #[arg(long)]
        v: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        lambda: usize,
        #[arg(long)]
        perfect: bool,
    },
}

/// Runs one command. `argv[0]` is the program name.
pub fn run<I, T>(argv: I) -> CommandResult
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp
                | ErrorKind::DisplayVersion
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_OK,
                _ => EXIT_INPUT,
            };
            let text = e.render().to_string();
            return if code == EXIT_OK {
                CommandResult::report(code, text)
            } else {
                CommandResult::input_error(text)
            };
        }
    };
    match dispatch(cli.command) {
        Ok(r) => r,
        Err(e) => CommandResult::input_error(format!("error: {e}\n")),
    }
}

impl CommandResult {
    fn report(code: i32, report: String) -> Self {
        Self {
            code,
            report,
            certificate: None,
            diagnostics: String::new(),
        }
    }

    fn input_error(message: String) -> Self {
        Self {
            code: EXIT_INPUT,
            report: String::new(),
            certificate: None,
            diagnostics: message,
        }
    }
}

fn dispatch(command: Command) -> Result<CommandResult, CliError> {
    match command {
        Command::VerifyDesign { file, packing } => verify_design_cmd(&file, packing),
        Command::VerifyDf(input) => verify_df_cmd(&input),
        Command::VerifyBdf(input) => verify_bdf_cmd(&input),
        Command::NestFind { file, solver, out } => {
            let r = nest_find_cmd(&file, &solver.config())?;
            finish(r, out.as_deref())
        }
        Command::NestVerify {
            file,
            anchors,
            perfect,
        } => nest_verify_cmd(&file, anchors.as_deref(), perfect),
        Command::BdfFromDf { input, solver, out } => {
            let r = bdf_from_df_cmd(&input, &solver.config())?;
            finish(r, out.as_deref())
        }
        Command::NovakSelect {
            file,
            solver,
            short_orders,
            out,
        } => {
            let r = novak_select_cmd(&file, &solver.config(), short_orders)?;
            finish(r, out.as_deref())
        }
        Command::NovakVerify { file } => novak_verify_cmd(&file),
        Command::LeviColor { file, solver, out } => {
            let r = levi_color_cmd(&file, &solver.config())?;
            finish(r, out.as_deref())
        }
        Command::HypergraphStats {
            kind,
            input,
            dump,
            dp_d,
            dp_alpha,
            dp_beta,
        } => hypergraph_stats_cmd(
            kind,
            &input,
            dump.as_deref(),
            dp_d.map(|d| (d, dp_alpha, dp_beta)),
        ),
        Command::SearchDf {
            group,
            k,
            lambda,
            budget,
            out,
        } => {
            let r = search_df_cmd(&group, k, lambda, budget)?;
            finish(r, out.as_deref())
        }
        Command::BdfExperiment {
            k,
            v_min,
            v_max,
            df_budget,
            solver,
        } => bdf_experiment_cmd(k, v_min, v_max, df_budget, &solver.config()),
        Command::AlphaBeta {
            k1,
            lambda1,
            k2,
            lambda2,
        } => {
            let ab = alpha_beta(k1, lambda1, k2, lambda2)?;
            Ok(CommandResult::report(
                EXIT_OK,
                format!(
                    "nesting: ({k2},{lambda2};{k1},{lambda1})\nalpha: {}\nbeta: {}\n",
                    ab.alpha, ab.beta
                ),
            ))
        }
        Command::Conditions {
            v,
            k,
            lambda,
            perfect,
        } => {
            let r = nesting_necessary_conditions(v, k, lambda, perfect);
            let mut out = format!(
                "parameters: v={v} k={k} lambda={lambda} perfect={}\n",
                yes_no(perfect)
            );
            for (c, pass) in &r.checks {
                let _ = writeln!(out, "{c}: {}", pass_fail(*pass));
            }
            let _ = writeln!(out, "result: {}", pass_fail(r.ok()));
            Ok(CommandResult::report(
                if r.ok() { EXIT_OK } else { EXIT_FAILED },
                out,
            ))
        }
    }
}

fn finish(mut r: CommandResult, out: Option<&Path>) -> Result<CommandResult, CliError> {
    if let (Some(path), Some(cert)) = (out, &r.certificate) {
        std::fs::write(path, cert.to_json()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let _ = writeln!(r.report, "certificate: {}", path.display());
    }
    Ok(r)
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

fn pass_fail(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAIL"
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn is_certificate(text: &str) -> bool {
    text.trim_start().starts_with('{')
}

/// Non-empty lines with `#` comments removed, numbered from 1.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

fn parse_numbers(line: usize, s: &str) -> Result<Vec<usize>, CliError> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse().map_err(|_| CliError::Syntax {
                line,
                reason: format!("{t:?} is not a nonnegative integer"),
            })
        })
        .collect()
}

/// Header `v k lambda`, then one block per line.
pub fn parse_design(text: &str) -> Result<Design, CliError> {
    let (v, k, lambda, blocks) = parse_block_file(text)?;
    Ok(Design::new(v, k, lambda, blocks)?)
}

/// Same grammar as [`parse_design`], listing one base block per orbit.
pub fn parse_cyclic(text: &str) -> Result<CyclicBibd, CliError> {
    let (v, k, lambda, blocks) = parse_block_file(text)?;
    Ok(CyclicBibd::new(v, k, lambda, blocks)?)
}

type BlockFile = (usize, usize, usize, Vec<Vec<usize>>);

fn parse_block_file(text: &str) -> Result<BlockFile, CliError> {
    let mut lines = content_lines(text);
    let (hline, header) = lines.next().ok_or(CliError::Syntax {
        line: 1,
        reason: "missing header \"v k lambda\"".into(),
    })?;
    let header = parse_numbers(hline, header)?;
    let [v, k, lambda] = header[..] else {
        return Err(CliError::Syntax {
            line: hline,
            reason: "header must be \"v k lambda\"".into(),
        });
    };
    let blocks = lines
        .map(|(n, l)| parse_numbers(n, l))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((v, k, lambda, blocks))
}

/// Group on the first line, then one base block per line.
pub fn parse_family(text: &str, lambda: Option<usize>) -> Result<DifferenceFamily, CliError> {
    let mut lines = content_lines(text);
    let (_, group_text) = lines.next().ok_or(CliError::Syntax {
        line: 1,
        reason: "missing group".into(),
    })?;
    let group: AbelianGroup = group_text.parse()?;
    let blocks = lines
        .map(|(_, l)| group.parse_subset(l))
        .collect::<Result<Vec<_>, _>>()?;
    build_family(group, blocks, lambda)
}

fn build_family(
    group: AbelianGroup,
    blocks: Vec<GroupSubset>,
    lambda: Option<usize>,
) -> Result<DifferenceFamily, CliError> {
    let lambda = match lambda {
        Some(l) => l,
        None => infer_lambda(&group, &blocks)?,
    };
    Ok(DifferenceFamily::new(group, blocks, lambda)?)
}

/// `Σ k_i(k_i−1) / (|G|−1)` rounded down; verification rejects a
/// non-integral quotient.
fn infer_lambda(group: &AbelianGroup, blocks: &[GroupSubset]) -> Result<usize, CliError> {
    let n = group.order();
    if n < 2 {
        return Err(CliError::Usage(
            "the group must have at least 2 elements".into(),
        ));
    }
    let total: usize = blocks
        .iter()
        .map(|b| b.len() * b.len().saturating_sub(1))
        .sum();
    Ok(total / (n - 1))
}

fn family_to_strings(f: &DifferenceFamily) -> Vec<String> {
    f.base_blocks().iter().map(GroupSubset::to_string).collect()
}

fn family_from_strings(
    group: &str,
    k: usize,
    lambda: usize,
    blocks: &[String],
) -> Result<(AbelianGroup, DifferenceFamily), CliError> {
    let group: AbelianGroup = group.parse()?;
    let blocks = blocks
        .iter()
        .map(|b| group.parse_subset(b))
        .collect::<Result<Vec<_>, _>>()?;
    let f = DifferenceFamily::with_block_size(group.clone(), k, blocks, lambda)?;
    Ok((group, f))
}

/// A family from `--group/--blocks`, a family file, or a df/bdf certificate.
fn load_family(input: &FamilyInput) -> Result<DifferenceFamily, CliError> {
    if let Some(text) = &input.group {
        let group: AbelianGroup = text.parse()?;
        let blocks = input
            .blocks
            .iter()
            .map(|b| group.parse_subset(b))
            .collect::<Result<Vec<_>, _>>()?;
        return build_family(group, blocks, input.lambda);
    }
    let Some(path) = &input.file else {
        return Err(CliError::Usage(
            "give a family file or --group with --blocks".into(),
        ));
    };
    let text = read(path)?;
    if !is_certificate(&text) {
        return parse_family(&text, input.lambda);
    }
    match Certificate::from_json(&text)?.body {
        CertificateBody::Df {
            group,
            k,
            lambda,
            blocks,
        }
        | CertificateBody::Bdf {
            group,
            k,
            lambda,
            blocks,
            ..
        } => Ok(family_from_strings(&group, k, lambda, &blocks)?.1),
        other => Err(CliError::Certificate(format!(
            "expected a df or bdf certificate, got {}",
            other.kind()
        ))),
    }
}

fn design_line(d: &Design) -> String {
    format!(
        "design: v={} k={} lambda={} blocks={}\n",
        d.v(),
        d.k(),
        d.lambda(),
        d.block_count()
    )
}

fn solver_line(s: &SolveReport) -> String {
    format!(
        "solver: outcome={} nodes={} restarts={}\n",
        s.outcome.label(),
        s.nodes,
        s.restarts
    )
}

fn timing(s: &SolveReport) -> String {
    format!("elapsed: {:.3} ms\n", s.elapsed.as_secs_f64() * 1e3)
}

fn join<T: ToString>(items: &[T]) -> String {
    items
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn verify_design_cmd(file: &Path, packing: bool) -> Result<CommandResult, CliError> {
    let d = parse_design(&read(file)?)?;
    let mut out = design_line(&d);
    let bibd = verify_bibd(&d);
    let pack = verify_packing(&d);
    match bibd.witness {
        None => out.push_str("bibd: ok\n"),
        Some(w) => {
            let _ = writeln!(out, "bibd: FAIL ({w})");
        }
    }
    match (pack.ok, pack.worst) {
        (true, _) => out.push_str("packing: ok\n"),
        (false, Some(w)) => {
            let _ = writeln!(out, "packing: FAIL ({w})");
        }
        (false, None) => out.push_str("packing: FAIL\n"),
    }
    let ok = if packing { pack.ok } else { bibd.ok };
    Ok(CommandResult::report(
        if ok { EXIT_OK } else { EXIT_FAILED },
        out,
    ))
}

fn family_header(f: &DifferenceFamily) -> String {
    format!(
        "family: group={} k={} lambda={} blocks={}\n",
        f.group(),
        f.k(),
        f.lambda(),
        f.base_blocks().len()
    )
}

fn verify_df_cmd(input: &FamilyInput) -> Result<CommandResult, CliError> {
    let f = load_family(input)?;
    let report = verify_df(&f);
    let out = format!("{}df: {}\n", family_header(&f), df_line(&report));
    Ok(CommandResult::report(
        if report.ok { EXIT_OK } else { EXIT_FAILED },
        out,
    ))
}

fn df_line(r: &crate::diff_families::DfReport) -> String {
    if r.ok {
        "ok".into()
    } else {
        format!("FAIL ({r})")
    }
}

fn verify_bdf_cmd(input: &FamilyInput) -> Result<CommandResult, CliError> {
    let f = load_family(input)?;
    let mut ok = true;
    let mut out = family_header(&f);
    // A bdf certificate also records where its blocks came from.
    if let Some(path) = &input.file {
        let text = read(path)?;
        if is_certificate(&text) {
            if let CertificateBody::Bdf {
                group,
                k,
                lambda,
                source_blocks,
                translations,
                ..
            } = Certificate::from_json(&text)?.body
            {
                let consistent =
                    translations_consistent(&f, &group, k, lambda, &source_blocks, &translations)?;
                let _ = writeln!(out, "translations: {}", pass_fail(consistent));
                ok &= consistent;
            }
        }
    }
    let report = verify_bdf(&f);
    let _ = writeln!(out, "df: {}", df_line(&report.df));
    match &report.collision {
        None => out.push_str("banff: ok\n"),
        Some((a, b, x)) => {
            let _ = writeln!(out, "banff: FAIL ({a} and {b} share {x})");
        }
    }
    ok &= report.ok();
    if report.ok() {
        let cert = develop_with_anchor(&f)?;
        let nested = cert.nested();
        let pack = verify_packing(nested);
        let _ = writeln!(
            out,
            "anchored development: ({},{},{}) packing with {} blocks: {}",
            nested.v(),
            nested.k(),
            nested.lambda(),
            nested.block_count(),
            pass_fail(pack.ok)
        );
        ok &= pack.ok;
    }
    Ok(CommandResult::report(
        if ok { EXIT_OK } else { EXIT_FAILED },
        out,
    ))
}

fn translations_consistent(
    f: &DifferenceFamily,
    group: &str,
    k: usize,
    lambda: usize,
    source: &[String],
    translations: &[String],
) -> Result<bool, CliError> {
    let (g, src) = family_from_strings(group, k, lambda, source)?;
    if translations.len() != src.base_blocks().len() {
        return Ok(false);
    }
    let shifts = translations
        .iter()
        .map(|t| g.parse_element(t))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(verify_df(&src).ok && src.translated(&shifts)?.base_blocks() == f.base_blocks())
}

fn nesting_summary(out: &mut String, cert: &NestingCertificate) -> bool {
    let nested = cert.nested();
    let pack = verify_packing(nested);
    let perfect = is_perfect_nesting(cert);
    let _ = writeln!(out, "anchors: {}", join(cert.anchors()));
    let _ = writeln!(
        out,
        "nested: ({},{},{}) packing {}; perfect: {}",
        nested.v(),
        nested.k(),
        nested.lambda(),
        pass_fail(pack.ok),
        yes_no(perfect)
    );
    let coloring = nesting_to_coloring(cert);
    let g = levi_graph(cert.base());
    let _ = writeln!(
        out,
        "levi coloring: colors={} harmonious={} exact={}",
        coloring.color_count(),
        yes_no(verify_harmonious(&g, &coloring)),
        yes_no(verify_exact(&g, &coloring))
    );
    pack.ok
}

/// A report and exit code when `k < 2λ + 1` rules out every nesting: the
/// anchored pairs of all blocks would outnumber the pairs of points.
fn nesting_ruled_out(d: &Design) -> Option<CommandResult> {
    let conditions = nesting_necessary_conditions(d.v(), d.k(), d.lambda(), false);
    let failed = conditions.failures();
    let first = failed.first()?;
    Some(CommandResult::report(
        EXIT_FAILED,
        format!(
            "{}result: no nesting exists ({first} fails)\n",
            design_line(d)
        ),
    ))
}

fn nest_find_cmd(file: &Path, cfg: &SolverConfig) -> Result<CommandResult, CliError> {
    let d = parse_design(&read(file)?)?;
    if let Some(r) = nesting_ruled_out(&d) {
        return Ok(r);
    }
    let search = find_nesting(&d, cfg)?;
    let mut out = design_line(&d);
    out.push_str(&solver_line(&search.solver));
    let code = match (&search.certificate, &search.solver.outcome) {
        (Some(cert), _) => {
            nesting_summary(&mut out, cert);
            EXIT_OK
        }
        (None, Outcome::Nonexistent) => {
            out.push_str("result: no nesting exists\n");
            EXIT_FAILED
        }
        (None, _) => {
            out.push_str("result: not found within budget\n");
            EXIT_NOT_FOUND
        }
    };
    let certificate = search.certificate.as_ref().map(|c| {
        Certificate::new(
            CertificateBody::Nesting {
                v: d.v(),
                k: d.k(),
                lambda: d.lambda(),
                blocks: d.blocks().to_vec(),
                anchors: c.anchors().to_vec(),
            },
            Some(cfg),
        )
    });
    Ok(CommandResult {
        code,
        report: out,
        certificate,
        diagnostics: timing(&search.solver),
    })
}

fn nest_verify_cmd(
    file: &Path,
    anchors: Option<&[usize]>,
    require_perfect: bool,
) -> Result<CommandResult, CliError> {
    let text = read(file)?;
    let mut out = String::new();
    let (design, cert) = if is_certificate(&text) {
        if anchors.is_some() {
            return Err(CliError::Usage(
                "--anchors is only used with a design file".into(),
            ));
        }
        match Certificate::from_json(&text)?.body {
            CertificateBody::Nesting {
                v,
                k,
                lambda,
                blocks,
                anchors,
            } => {
                let d = Design::new(v, k, lambda, blocks)?;
                let cert = apply_nesting(&d, &anchors);
                (d, cert.map_err(|e| e.to_string()))
            }
            CertificateBody::Coloring {
                v,
                k,
                lambda,
                blocks,
                colors,
            } => {
                let d = Design::new(v, k, lambda, blocks)?;
                let coloring = Coloring::new(colors);
                let g = levi_graph(&d);
                let _ = writeln!(
                    out,
                    "coloring: harmonious={} exact={}",
                    yes_no(verify_harmonious(&g, &coloring)),
                    yes_no(verify_exact(&g, &coloring))
                );
                let cert = coloring_to_nesting(&d, &coloring);
                (d, cert.map_err(|e| e.to_string()))
            }
            other => {
                return Err(CliError::Certificate(format!(
                    "expected a nesting or coloring certificate, got {}",
                    other.kind()
                )))
            }
        }
    } else {
        let d = parse_design(&text)?;
        let anchors =
            anchors.ok_or_else(|| CliError::Usage("a design file needs --anchors".into()))?;
        let cert = apply_nesting(&d, anchors);
        (d, cert.map_err(|e| e.to_string()))
    };
    let mut report = design_line(&design);
    report.push_str(&out);
    let bibd = verify_bibd(&design);
    let _ = writeln!(report, "base bibd: {}", pass_fail(bibd.ok));
    let ok = match cert {
        Ok(cert) => {
            let packing_ok = nesting_summary(&mut report, &cert);
            let perfect_ok = !require_perfect || is_perfect_nesting(&cert);
            if !perfect_ok {
                report.push_str("perfect: FAIL\n");
            }
            packing_ok && perfect_ok && bibd.ok
        }
        Err(reason) => {
            let _ = writeln!(report, "nesting: FAIL ({reason})");
            false
        }
    };
    Ok(CommandResult::report(
        if ok { EXIT_OK } else { EXIT_FAILED },
        report,
    ))
}

fn bdf_from_df_cmd(input: &FamilyInput, cfg: &SolverConfig) -> Result<CommandResult, CliError> {
    let f = load_family(input)?;
    let mut out = family_header(&f);
    let report = verify_df(&f);
    if !report.ok {
        let _ = writeln!(out, "df: {}", df_line(&report));
        return Ok(CommandResult::report(EXIT_FAILED, out));
    }
    let conv = df_to_bdf(&f, cfg)?;
    out.push_str(&solver_line(&conv.solver));
    let diagnostics = timing(&conv.solver);
    let (Some(bdf), Some(shifts)) = (&conv.family, &conv.translations) else {
        out.push_str("result: not found\n");
        return Ok(CommandResult {
            code: EXIT_NOT_FOUND,
            report: out,
            certificate: None,
            diagnostics,
        });
    };
    let _ = writeln!(out, "translations: {}", join(shifts));
    let _ = writeln!(out, "banff blocks: {}", family_to_strings(bdf).join(" "));
    let certificate = Certificate::new(
        CertificateBody::Bdf {
            group: f.group().to_string(),
            k: f.k(),
            lambda: f.lambda(),
            blocks: family_to_strings(bdf),
            source_blocks: family_to_strings(&f),
            translations: shifts.iter().map(ToString::to_string).collect(),
        },
        Some(cfg),
    );
    Ok(CommandResult {
        code: EXIT_OK,
        report: out,
        certificate: Some(certificate),
        diagnostics,
    })
}

fn cyclic_line(c: &CyclicBibd) -> String {
    let orbits = decompose_orbits(c);
    let h = orbits.iter().filter(|o| o.kind == OrbitKind::Short).count();
    format!(
        "cyclic design: v={} k={} lambda={} orbits={} short={} full={}\n",
        c.v(),
        c.k(),
        c.lambda(),
        orbits.len(),
        h,
        orbits.len() - h
    )
}

fn novak_select_cmd(
    file: &Path,
    cfg: &SolverConfig,
    short_orders: usize,
) -> Result<CommandResult, CliError> {
    if short_orders == 0 {
        return Err(CliError::Usage("--short-orders must be positive".into()));
    }
    let c = parse_cyclic(&read(file)?)?;
    let report = novak_select_with_retries(&c, cfg, short_orders)?;
    let mut out = cyclic_line(&c);
    let _ = writeln!(out, "short-orbit orders tried: {}", report.attempts);
    if let Some(s) = &report.solver {
        out.push_str(&solver_line(s));
    }
    let diagnostics = report.solver.as_ref().map(timing).unwrap_or_default();
    let code = match &report.outcome {
        NovakOutcome::Selected(sel) => {
            let _ = writeln!(out, "translations: {}", join(&sel.translations));
            for b in &sel.blocks {
                let _ = writeln!(out, "block: {}", join(b));
            }
            EXIT_OK
        }
        NovakOutcome::ShortPlacementFailed(f) => {
            let _ = writeln!(out, "result: not found ({f})");
            EXIT_NOT_FOUND
        }
        NovakOutcome::MatchingNonexistent if report.proves_nonexistence() => {
            out.push_str("result: no disjoint selection exists\n");
            EXIT_FAILED
        }
        NovakOutcome::MatchingNonexistent => {
            out.push_str("result: not found (no selection extends the short-orbit placement)\n");
            EXIT_NOT_FOUND
        }
        NovakOutcome::MatchingBudgetExhausted => {
            out.push_str("result: not found within budget\n");
            EXIT_NOT_FOUND
        }
    };
    let certificate = report.selection().map(|sel| {
        Certificate::new(
            CertificateBody::Novak {
                v: c.v(),
                k: c.k(),
                lambda: c.lambda(),
                bases: c.bases().to_vec(),
                translations: sel.translations.clone(),
                blocks: sel.blocks.clone(),
            },
            Some(cfg),
        )
    });
    Ok(CommandResult {
        code,
        report: out,
        certificate,
        diagnostics,
    })
}

fn novak_verify_cmd(file: &Path) -> Result<CommandResult, CliError> {
    let text = read(file)?;
    let cert = Certificate::from_json(&text)?;
    let CertificateBody::Novak {
        v,
        k,
        lambda,
        bases,
        translations,
        blocks,
    } = cert.body
    else {
        return Err(CliError::Certificate(format!(
            "expected a novak certificate, got {}",
            cert.body.kind()
        )));
    };
    let c = CyclicBibd::new(v, k, lambda, bases)?;
    let mut out = cyclic_line(&c);
    let mut ok = true;
    if translations.len() == c.bases().len() {
        let rebuilt = NovakSelection::from_translations(&c, translations);
        let sorted: Vec<Vec<usize>> = blocks
            .iter()
            .map(|b| {
                let mut b = b.clone();
                b.sort_unstable();
                b
            })
            .collect();
        let consistent = rebuilt.blocks == sorted;
        let _ = writeln!(out, "translations: {}", pass_fail(consistent));
        ok &= consistent;
    } else {
        out.push_str("translations: FAIL (wrong count)\n");
        ok = false;
    }
    let report = verify_disjoint_selection(&c, &blocks);
    match &report.violation {
        None => out.push_str("selection: ok\n"),
        Some(v) => {
            let _ = writeln!(out, "selection: FAIL ({v})");
        }
    }
    ok &= report.ok;
    Ok(CommandResult::report(
        if ok { EXIT_OK } else { EXIT_FAILED },
        out,
    ))
}

fn levi_color_cmd(file: &Path, cfg: &SolverConfig) -> Result<CommandResult, CliError> {
    let text = read(file)?;
    let mut diagnostics = String::new();
    let mut out = String::new();
    let (d, cert, solver_used) = if is_certificate(&text) {
        let CertificateBody::Nesting {
            v,
            k,
            lambda,
            blocks,
            anchors,
        } = Certificate::from_json(&text)?.body
        else {
            return Err(CliError::Certificate(
                "expected a nesting certificate".into(),
            ));
        };
        let d = Design::new(v, k, lambda, blocks)?;
        let cert = apply_nesting(&d, &anchors)
            .map_err(|e| CliError::Certificate(format!("anchors are not a nesting: {e}")))?;
        (d, cert, false)
    } else {
        let d = parse_design(&text)?;
        if let Some(r) = nesting_ruled_out(&d) {
            return Ok(r);
        }
        let search = find_nesting(&d, cfg)?;
        out.push_str(&solver_line(&search.solver));
        diagnostics = timing(&search.solver);
        match search.certificate {
            Some(cert) => (d, cert, true),
            None => {
                let (code, msg) = match search.solver.outcome {
                    Outcome::Nonexistent => {
                        (EXIT_FAILED, "no nesting, so no harmonious v-coloring")
                    }
                    _ => (EXIT_NOT_FOUND, "no nesting found within budget"),
                };
                let _ = writeln!(out, "result: {msg}");
                return Ok(CommandResult {
                    code,
                    report: format!("{}{out}", design_line(&d)),
                    certificate: None,
                    diagnostics,
                });
            }
        }
    };
    let coloring = nesting_to_coloring(&cert);
    let g = levi_graph(&d);
    let harmonious = verify_harmonious(&g, &coloring);
    let mut report = design_line(&d);
    report.push_str(&out);
    let _ = writeln!(report, "colors: {}", join(coloring.colors()));
    let _ = writeln!(
        report,
        "levi coloring: colors={} harmonious={} exact={}",
        coloring.color_count(),
        yes_no(harmonious),
        yes_no(verify_exact(&g, &coloring))
    );
    let certificate = Certificate::new(
        CertificateBody::Coloring {
            v: d.v(),
            k: d.k(),
            lambda: d.lambda(),
            blocks: d.blocks().to_vec(),
            colors: coloring.colors().to_vec(),
        },
        solver_used.then_some(cfg),
    );
    Ok(CommandResult {
        code: if harmonious { EXIT_OK } else { EXIT_FAILED },
        report,
        certificate: Some(certificate),
        diagnostics,
    })
}

fn hypergraph_stats_cmd(
    kind: KindArg,
    input: &FamilyInput,
    dump: Option<&Path>,
    dp: Option<(f64, f64, f64)>,
) -> Result<CommandResult, CliError> {
    let file_text = || -> Result<String, CliError> {
        let path = input
            .file
            .as_ref()
            .ok_or_else(|| CliError::Usage("this hypergraph kind needs an input file".into()))?;
        read(path)
    };
    let mut out = String::new();
    let mut ok = true;
    let h: BipartiteHypergraph = match kind {
        KindArg::Nesting => {
            let d = parse_design(&file_text()?)?;
            let h = build_nesting_hypergraph(&d)?;
            out.push_str(&design_line(&d));
            let r = degree_report(&h);
            let (v, k, l) = (d.v(), d.k(), d.lambda());
            let left_expected = v - k;
            let right_expected =
                (k > 1 && (2 * l * (v - k)) % (k - 1) == 0).then(|| 2 * l * (v - k) / (k - 1));
            let left_ok = r.left_min == left_expected && r.left_max == left_expected;
            let right_ok = right_expected.is_some_and(|e| r.right_min == e && r.right_max == e);
            let caps_ok = r.max_left_right_codegree <= 1 && r.max_right_right_codegree <= l;
            let _ = writeln!(
                out,
                "expected block degree v-k={left_expected}: {}",
                pass_fail(left_ok)
            );
            let _ = writeln!(
                out,
                "expected pair degree 2*lambda*(v-k)/(k-1)={}: {}",
                right_expected.map_or("n/a".to_string(), |e| e.to_string()),
                pass_fail(right_ok)
            );
            let _ = writeln!(out, "codegree caps (1, lambda): {}", pass_fail(caps_ok));
            ok = left_ok && right_ok && caps_ok;
            h
        }
        KindArg::Bdf => {
            let f = load_family(input)?;
            out.push_str(&family_header(&f));
            build_bdf_hypergraph(&f)?
        }
        KindArg::Novak => {
            let c = parse_cyclic(&file_text()?)?;
            out.push_str(&cyclic_line(&c));
            let orbits = decompose_orbits(&c);
            let (short, full): (Vec<_>, Vec<_>) =
                orbits.into_iter().partition(|o| o.kind == OrbitKind::Short);
            let short: Vec<Vec<usize>> = short.into_iter().map(|o| o.base).collect();
            let full: Vec<Vec<usize>> = full.into_iter().map(|o| o.base).collect();
            let forbidden = match place_short_orbits(&short, c.v())? {
                Ok(p) => p.union,
                Err(f) => {
                    let _ = writeln!(out, "short-orbit placement failed: {f}");
                    return Ok(CommandResult::report(EXIT_NOT_FOUND, out));
                }
            };
            let _ = writeln!(out, "forbidden points: {}", join(&forbidden));
            build_novak_hypergraph(c.v(), &full, &forbidden)?
        }
    };
    let r = degree_report(&h);
    let _ = writeln!(
        out,
        "hypergraph: left={} right={} rank={} edges={}",
        h.left_count(),
        h.right_count(),
        h.rank(),
        h.edges().len()
    );
    let _ = writeln!(
        out,
        "left degree: min={} max={}\nright degree: min={} max={}",
        r.left_min, r.left_max, r.right_min, r.right_max
    );
    let _ = writeln!(
        out,
        "codegree: left-right max={} right-right max={}",
        r.max_left_right_codegree, r.max_right_right_codegree
    );
    if let Some((d, alpha, beta)) = dp {
        let dp = dp_hypothesis_check(&h, d, alpha, beta)?;
        let _ = writeln!(
            out,
            "matching hypotheses (D={d}, alpha={alpha}, beta={beta}): left {} (threshold {:.4}), right {}, codegree {} (threshold {:.4})",
            pass_fail(dp.left_ok),
            dp.left_threshold,
            pass_fail(dp.right_ok),
            pass_fail(dp.codegree_ok),
            dp.codegree_threshold
        );
    }
    if let Some(path) = dump {
        std::fs::write(path, h.dump()).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let _ = writeln!(out, "dump: {}", path.display());
    }
    Ok(CommandResult::report(
        if ok { EXIT_OK } else { EXIT_FAILED },
        out,
    ))
}

fn search_df_cmd(
    group: &str,
    k: usize,
    lambda: usize,
    budget: u64,
) -> Result<CommandResult, CliError> {
    let g: AbelianGroup = group.parse()?;
    let r = search_df(&g, k, lambda, budget)?;
    let mut out = format!(
        "search: group={g} k={k} lambda={lambda} nodes={}\n",
        r.nodes
    );
    let (code, certificate) = match &r.result {
        SearchResult::Found(f) => {
            let _ = writeln!(out, "blocks: {}", family_to_strings(f).join(" "));
            let cert = Certificate::new(
                CertificateBody::Df {
                    group: g.to_string(),
                    k,
                    lambda,
                    blocks: family_to_strings(f),
                },
                None,
            );
            (EXIT_OK, Some(cert))
        }
        SearchResult::Exhausted => {
            out.push_str("result: no difference family exists\n");
            (EXIT_FAILED, None)
        }
        SearchResult::BudgetExhausted => {
            out.push_str("result: not found within budget\n");
            (EXIT_NOT_FOUND, None)
        }
    };
    Ok(CommandResult {
        code,
        report: out,
        certificate,
        diagnostics: String::new(),
    })
}

fn bdf_experiment_cmd(
    k: usize,
    v_min: Option<usize>,
    v_max: usize,
    df_budget: u64,
    cfg: &SolverConfig,
) -> Result<CommandResult, CliError> {
    if k < 2 {
        return Err(CliError::Usage("--k must be at least 2".into()));
    }
    let modulus = k * (k - 1);
    let v_min = v_min.unwrap_or(modulus + 1);
    let mut out = format!("experiment: k={k} lambda=1 v={v_min}..={v_max}\n");
    let mut diagnostics = String::new();
    let (mut tested, mut found, mut open) = (0, 0, 0);
    for v in (v_min.max(2)..=v_max).filter(|v| (v - 1) % modulus == 0) {
        tested += 1;
        let g = AbelianGroup::cyclic(v)?;
        let f = match search_df(&g, k, 1, df_budget)?.result {
            SearchResult::Found(f) => f,
            SearchResult::Exhausted => {
                let _ = writeln!(out, "v={v} df=none");
                continue;
            }
            SearchResult::BudgetExhausted => {
                let _ = writeln!(out, "v={v} df=budget");
                open += 1;
                continue;
            }
        };
        let conv = df_to_bdf(&f, cfg)?;
        diagnostics.push_str(&timing(&conv.solver));
        match (&conv.family, &conv.translations) {
            (Some(bdf), Some(shifts)) => {
                found += 1;
                let _ = writeln!(
                    out,
                    "v={v} df={} bdf={} translations={}",
                    family_to_strings(&f).join(" "),
                    family_to_strings(bdf).join(" "),
                    join(shifts)
                );
            }
            _ => {
                open += 1;
                let _ = writeln!(
                    out,
                    "v={v} df={} bdf=not-found ({})",
                    family_to_strings(&f).join(" "),
                    conv.solver.outcome.label()
                );
            }
        }
    }
    let _ = writeln!(out, "summary: tested={tested} bdf={found} open={open}");
    Ok(CommandResult {
        code: EXIT_OK,
        report: out,
        certificate: None,
        diagnostics,
    })
}
