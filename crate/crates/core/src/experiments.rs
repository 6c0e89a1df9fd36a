//! Declarative experiments: JSON configs, seed-parallel runs, and reports.
//!
//! A config names an experiment kind, an explicit seed range and a
//! kind-specific parameter block. Acceptance thresholds live in the config.
//! Per-seed work fans out over rayon and is collected in seed order, so
//! results do not depend on the thread count.

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::exact::{crossing_count, longest_from_profile, min_weight_profile, verify_witness, LONGEST_MAX_N};
use crate::exploration::{block_decomposition_error, block_exploration, coupled_color_audit, run_exploration};
use crate::graph::EdgeOracle;
use crate::nbrw::{front_horizon, killed_vs_selected_dominance, many_to_one_check, nbrw_run, velocity, BarrierSpec, KillRule};
use crate::plot::{LinePlot, Series};
use crate::rng::{coupled_order_stats, SeededStream};
use crate::stats::{quantile, Moments};
use crate::walk::{confinement_spectral, drop_count, top_k_exp_sum, y_walk, BoxEvent, MOGULSKII_CONSTANT};

// Stream ids keep the experiment kinds on disjoint randomness.
const THEOREM1_STREAM: u64 = 11;
const THEOREM2_STREAM: u64 = 12;
const NBRW_STREAM: u64 = 13;
const ORACLE_STREAM: u64 = 14;
const AUDIT_STREAM: u64 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Theorem1,
    Theorem2,
    NbrwSpeed,
    Mogulskii,
    OracleCompare,
    Audits,
}

impl Kind {
    pub const ALL: [Kind; 6] = [Kind::Theorem1, Kind::Theorem2, Kind::NbrwSpeed, Kind::Mogulskii, Kind::OracleCompare, Kind::Audits];

    pub fn as_str(self) -> &'static str {
        match self {
            Kind::Theorem1 => "theorem1",
            Kind::Theorem2 => "theorem2",
            Kind::NbrwSpeed => "nbrw-speed",
            Kind::Mogulskii => "mogulskii",
            Kind::OracleCompare => "oracle-compare",
            Kind::Audits => "audits",
        }
    }

    /// The shipped default config for this kind.
    pub fn default_config(self) -> &'static str {
        match self {
            Kind::Theorem1 => include_str!("../configs/theorem1.json"),
            Kind::Theorem2 => include_str!("../configs/theorem2.json"),
            Kind::NbrwSpeed => include_str!("../configs/nbrw-speed.json"),
            Kind::Mogulskii => include_str!("../configs/mogulskii.json"),
            Kind::OracleCompare => include_str!("../configs/oracle-compare.json"),
            Kind::Audits => include_str!("../configs/audits.json"),
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Half-open seed range `start..end`, written `"a..b"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct SeedRange {
    pub start: u64,
    pub end: u64,
}

impl SeedRange {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        if start >= end {
            return Err(Error::Config(format!("empty seed range {start}..{end}")));
        }
        Ok(Self { start, end })
    }

    pub fn len(&self) -> usize {
        (self.end - self.start) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }
}

impl FromStr for SeedRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s.split_once("..").ok_or_else(|| Error::Config(format!("seed range must look like a..b, got {s:?}")))?;
        let parse = |x: &str| x.trim().parse::<u64>().map_err(|e| Error::Config(format!("bad seed {x:?}: {e}")));
        Self::new(parse(a)?, parse(b)?)
    }
}

impl TryFrom<String> for SeedRange {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<SeedRange> for String {
    fn from(r: SeedRange) -> String {
        format!("{}..{}", r.start, r.end)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub seeds: SeedRange,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    pub params: serde_json::Value,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem1Params {
    pub n: Vec<usize>,
    /// `N = ⌊n^a⌋`.
    pub a: f64,
    /// Average-weight threshold is `alpha / ln²n`.
    pub alpha: f64,
    /// Defaults to the largest feasible count `⌊(n−1)/N⌋`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    pub ratio_band: [f64; 2],
    pub require_increasing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Theorem2Params {
    pub n: Vec<usize>,
    /// `β_n = γ²π²/(2 ln²n)`, so that `√(2β)/π · ln n = γ`.
    pub gamma: f64,
    /// `N = ⌊e^{aπ/√(2β)}⌋`.
    pub a: f64,
    /// Spine target as a fraction of `(n−1)/N`.
    pub target_fraction: f64,
    pub column_band: [f64; 2],
    pub min_witness_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NbrwSpeedParams {
    pub keep: Vec<usize>,
    /// Horizon `⌊t ln³N⌋`.
    pub t: f64,
    /// `⌊N^a⌋` initial particles at 0.
    pub a: f64,
    /// Band for the mean of `min / ln N`, as multiples of `t·π²/2 − a`.
    pub band: [f64; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MogulskiiParams {
    pub delta: Vec<f64>,
    /// Grid cells per unit corridor width (at least 64 cells in total).
    pub cells_per_unit: usize,
    /// Relative tolerance of `Δ²·rate` against `π²/2` at the widest corridor.
    pub tolerance: f64,
    pub require_decreasing: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleCompareParams {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub keep: usize,
    pub steps: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingAudit {
    pub n: Vec<usize>,
    /// Coupled `(X_(i), T_i)` pairs per `n`.
    pub samples: u64,
    pub identity_tolerance: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrossingAudit {
    pub n: usize,
    pub x: Vec<f64>,
    pub instances: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ManyToOneAudit {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub truncation: f64,
    pub trials: u64,
    pub census_cap: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DominanceAudit {
    pub keep: usize,
    pub horizon: usize,
    /// Corridor constant of the growing barrier.
    pub c: f64,
    pub trials: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopKAudit {
    /// `(ℓ, k)` pairs.
    pub grid: Vec<(usize, usize)>,
    pub trials: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DropCountAudit {
    pub traces: u64,
    pub len: usize,
    pub delta: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColorAuditParams {
    pub n: usize,
    pub keep: usize,
    pub steps: usize,
    pub initial: usize,
    pub instances: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleAudit {
    pub n: usize,
    pub lambda: Vec<f64>,
    pub keep: usize,
    pub steps: usize,
    pub instances: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AuditsParams {
    pub coupling: CouplingAudit,
    pub crossing: CrossingAudit,
    pub many_to_one: ManyToOneAudit,
    pub dominance: DominanceAudit,
    pub top_k: TopKAudit,
    pub drop_count: DropCountAudit,
    pub color: ColorAuditParams,
    pub oracle: OracleAudit,
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn ascending(n: &[usize]) -> Result<()> {
    if n.is_empty() || n.windows(2).any(|w| w[0] >= w[1]) {
        return Err(config_err("n grid must be non-empty and strictly ascending"));
    }
    Ok(())
}

fn band(b: [f64; 2], what: &str) -> Result<()> {
    if !(b[0] <= b[1]) {
        return Err(config_err(format!("{what} must satisfy lo <= hi")));
    }
    Ok(())
}

impl Theorem1Params {
    fn validate(&self) -> Result<()> {
        ascending(&self.n)?;
        band(self.ratio_band, "ratio_band")?;
        if !(self.alpha < MOGULSKII_CONSTANT) {
            return Err(config_err("theorem1 needs alpha < pi^2/2"));
        }
        if !(self.a > 0.0 && self.a < 1.0) {
            return Err(config_err("theorem1 needs 0 < a < 1"));
        }
        for &n in &self.n {
            let (keep, steps) = self.schedule(n);
            if keep == 0 || steps == 0 || keep * steps >= n {
                return Err(config_err(format!("theorem1 infeasible at n = {n}: N * steps = {keep} * {steps} must be < n")));
            }
        }
        Ok(())
    }

    /// `(N, steps)` at graph size `n`.
    pub fn schedule(&self, n: usize) -> (usize, usize) {
        let keep = (n as f64).powf(self.a).floor() as usize;
        let steps = self.steps.unwrap_or((n - 1) / keep.max(1));
        (keep, steps)
    }
}

impl Theorem2Params {
    fn validate(&self) -> Result<()> {
        ascending(&self.n)?;
        band(self.column_band, "column_band")?;
        if !(self.gamma > 1.0) {
            return Err(config_err("theorem2 needs gamma = sqrt(2 beta)/pi * ln n > 1"));
        }
        if !(self.a > 0.0) || !(self.target_fraction > 0.0 && self.target_fraction <= 1.0) {
            return Err(config_err("theorem2 needs a > 0 and 0 < target_fraction <= 1"));
        }
        for &n in &self.n {
            let s = self.schedule(n);
            if s.keep < 2 || s.delta == 0 || s.keep * s.delta >= n {
                return Err(config_err(format!("theorem2 infeasible at n = {n}: N * delta = {} * {} must be < n", s.keep, s.delta)));
            }
        }
        Ok(())
    }

    pub fn beta(&self, n: usize) -> f64 {
        let ln = (n as f64).ln();
        self.gamma * self.gamma * PI * PI / (2.0 * ln * ln)
    }

    pub fn schedule(&self, n: usize) -> BlockSchedule {
        let beta = self.beta(n);
        let keep = (self.a * PI / (2.0 * beta).sqrt()).exp().floor() as usize;
        let delta = (keep as f64).ln().powi(3).floor() as usize;
        let target = ((self.target_fraction * (n - 1) as f64 / keep.max(1) as f64).floor() as usize).max(1);
        BlockSchedule { beta, keep, delta, target }
    }
}

/// Parameters of one block-exploration run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockSchedule {
    pub beta: f64,
    pub keep: usize,
    pub delta: usize,
    pub target: usize,
}

impl NbrwSpeedParams {
    fn validate(&self) -> Result<()> {
        ascending(&self.keep)?;
        band(self.band, "band")?;
        if self.keep[0] < 2 || !(self.t > 0.0) || !(0.0..=1.0).contains(&self.a) {
            return Err(config_err("nbrw-speed needs N >= 2, t > 0 and 0 <= a <= 1"));
        }
        if self.keep.iter().any(|&k| front_horizon(k, self.t) == 0) {
            return Err(config_err("nbrw-speed horizon t ln^3 N must be at least one generation"));
        }
        Ok(())
    }

    pub fn target(&self) -> f64 {
        self.t * MOGULSKII_CONSTANT - self.a
    }
}

impl MogulskiiParams {
    fn validate(&self) -> Result<()> {
        if self.delta.is_empty() || self.delta.iter().any(|d| !(*d > 0.0)) || self.delta.windows(2).any(|w| w[0] >= w[1]) {
            return Err(config_err("mogulskii needs a strictly ascending grid of positive widths"));
        }
        if self.cells_per_unit == 0 || !(self.tolerance > 0.0) {
            return Err(config_err("mogulskii needs cells_per_unit >= 1 and tolerance > 0"));
        }
        Ok(())
    }

    pub fn grid(&self, delta: f64) -> usize {
        ((self.cells_per_unit as f64 * delta).ceil() as usize).max(64)
    }
}

fn validate_oracle(n: usize, keep: usize, steps: usize, lambda: &[f64]) -> Result<()> {
    if !(2..=LONGEST_MAX_N).contains(&n) {
        return Err(config_err(format!("oracle comparison needs 2 <= n <= {LONGEST_MAX_N}")));
    }
    if keep == 0 || steps == 0 || keep * steps >= n || lambda.is_empty() {
        return Err(config_err("oracle comparison needs N * steps < n and a non-empty lambda grid"));
    }
    Ok(())
}

impl AuditsParams {
    fn validate(&self) -> Result<()> {
        if self.coupling.n.iter().any(|&n| n < 2) || self.coupling.samples == 0 {
            return Err(config_err("coupling audit needs n >= 2 and samples >= 1"));
        }
        if self.crossing.n > crate::exact::CROSSING_MAX_N || self.crossing.n < 2 || self.crossing.instances < 2 {
            return Err(config_err("crossing audit needs 2 <= n <= 8 and at least two instances"));
        }
        BoxEvent::new(self.many_to_one.lower.clone(), self.many_to_one.upper.clone()).map_err(|e| config_err(e.to_string()))?;
        if self.dominance.keep == 0 || self.dominance.horizon == 0 || !(self.dominance.c > 0.0) {
            return Err(config_err("dominance audit needs N >= 1, horizon >= 1 and c > 0"));
        }
        if self.top_k.grid.iter().any(|&(l, k)| k == 0 || k > l) {
            return Err(config_err("top-k audit needs 1 <= k <= len"));
        }
        if self.drop_count.len == 0 || self.drop_count.delta.iter().any(|d| !(*d > 0.0)) {
            return Err(config_err("drop-count audit needs len >= 1 and positive widths"));
        }
        let c = &self.color;
        if c.initial == 0 || c.initial > c.keep || c.keep * (c.steps + 1) >= c.n {
            return Err(config_err("colour audit needs 1 <= initial <= N and N * (steps + 1) < n"));
        }
        validate_oracle(self.oracle.n, self.oracle.keep, self.oracle.steps, &self.oracle.lambda)
    }
}

impl ExperimentSpec {
    /// Parses and validates a config document.
    pub fn from_json(text: &str) -> Result<Self> {
        let spec: Self = serde_json::from_str(text).map_err(|e| config_err(e.to_string()))?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn default_for(kind: Kind) -> Self {
        Self::from_json(kind.default_config()).expect("shipped configs are valid")
    }

    pub fn params<T: DeserializeOwned>(&self) -> Result<T> {
        serde_json::from_value(self.params.clone()).map_err(|e| config_err(format!("{} params: {e}", self.kind)))
    }

    pub fn validate(&self) -> Result<()> {
        match self.kind {
            Kind::Theorem1 => self.params::<Theorem1Params>()?.validate(),
            Kind::Theorem2 => self.params::<Theorem2Params>()?.validate(),
            Kind::NbrwSpeed => self.params::<NbrwSpeedParams>()?.validate(),
            Kind::Mogulskii => self.params::<MogulskiiParams>()?.validate(),
            Kind::OracleCompare => {
                let p = self.params::<OracleCompareParams>()?;
                validate_oracle(p.n, p.keep, p.steps, &p.lambda)
            }
            Kind::Audits => self.params::<AuditsParams>()?.validate(),
        }
    }

    /// SHA-256 of the canonical JSON form (object keys sorted).
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_value(self).expect("spec serializes");
        let digest = Sha256::digest(serde_json::to_vec(&canonical).expect("value serializes"));
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(x) => write!(f, "{x}"),
            Cell::Float(x) => write!(f, "{x}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
        }
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.columns.join(",");
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|c| c.to_string()).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }
}

/// Summary statistics of one column within one group of rows.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Aggregate {
    pub group: String,
    pub column: String,
    pub count: usize,
    pub mean: f64,
    pub sd: f64,
    pub sem: f64,
    pub q05: f64,
    pub q50: f64,
    pub q95: f64,
}

impl Aggregate {
    pub fn of(group: impl Into<String>, column: &str, values: &[f64]) -> Self {
        let m: Moments = values.iter().copied().collect();
        Self {
            group: group.into(),
            column: column.to_string(),
            count: values.len(),
            mean: m.mean(),
            sd: m.sd(),
            sem: m.sem(),
            q05: quantile(values, 0.05),
            q50: quantile(values, 0.5),
            q95: quantile(values, 0.95),
        }
    }
}

/// One acceptance predicate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Seed that replays the first failure.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            passed,
            detail: detail.into(),
            seed: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub config_hash: String,
    pub version: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentResult {
    pub kind: Kind,
    pub seeds: SeedRange,
    pub provenance: Provenance,
    pub table: Table,
    pub aggregates: Vec<Aggregate>,
    pub checks: Vec<Check>,
    #[serde(skip)]
    pub plots: Vec<LinePlot>,
}

impl ExperimentResult {
    fn new(spec: &ExperimentSpec, columns: &[&str]) -> Self {
        Self {
            kind: spec.kind,
            seeds: spec.seeds,
            provenance: Provenance {
                config_hash: spec.hash(),
                version: env!("CARGO_PKG_VERSION").to_string(),
            },
            table: Table::new(columns),
            aggregates: Vec::new(),
            checks: Vec::new(),
            plots: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn aggregate(&self, group: &str, column: &str) -> Option<&Aggregate> {
        self.aggregates.iter().find(|a| a.group == group && a.column == column)
    }
}

/// Maps `f` over the seed range in parallel; output is in seed order.
fn fan_out<T, F>(seeds: SeedRange, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (seeds.start..seeds.end).into_par_iter().map(f).collect()
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] < w[1])
}

fn strictly_decreasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[0] > w[1])
}

fn in_band(x: f64, b: [f64; 2]) -> bool {
    b[0] <= x && x <= b[1]
}

/// Runs the experiment on the current rayon pool.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    spec.validate()?;
    match spec.kind {
        Kind::Theorem1 => run_theorem1(spec),
        Kind::Theorem2 => run_theorem2(spec),
        Kind::NbrwSpeed => run_nbrw_speed(spec),
        Kind::Mogulskii => run_mogulskii(spec),
        Kind::OracleCompare => run_oracle_compare(spec),
        Kind::Audits => run_audits(spec),
    }
}

/// Runs the experiment on a dedicated pool of `threads` workers.
pub fn run_with_threads(spec: &ExperimentSpec, threads: Option<usize>) -> Result<ExperimentResult> {
    match threads {
        None => run(spec),
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .map_err(|e| config_err(e.to_string()))?;
            pool.install(|| run(spec))
        }
    }
}

/// Longest exploration witness with average weight at most `α/ln²n`,
/// scaled by `(π²/2 − α)/ln³n`.
pub fn run_theorem1(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let p: Theorem1Params = spec.params()?;
    p.validate()?;
    let mut result = ExperimentResult::new(spec, &["n", "N", "steps", "seed", "length", "average", "ratio"]);
    let scale = MOGULSKII_CONSTANT - p.alpha;
    let mut means = Vec::new();
    for &n in &p.n {
        let (keep, steps) = p.schedule(n);
        let ln = (n as f64).ln();
        let lambda = p.alpha / (ln * ln);
        let start: Vec<usize> = (1..=keep).collect();
        let rows = fan_out(spec.seeds, |seed| {
            let mut oracle = EdgeOracle::lazy(n)?;
            let stream = SeededStream::new(seed, THEOREM1_STREAM).substream(n as u64);
            let run = run_exploration(keep, steps, &start, &mut oracle, &stream)?;
            let w = run.best_below(&oracle, lambda)?;
            Ok(w.map_or((0, f64::NAN), |w| (w.len(), w.average())))
        })?;
        let ratios: Vec<f64> = rows.iter().map(|&(len, _)| len as f64 * scale / ln.powi(3)).collect();
        for (seed, (&(len, avg), &ratio)) in (spec.seeds.start..).zip(rows.iter().zip(&ratios)) {
            result.table.push(vec![n.into(), keep.into(), steps.into(), seed.into(), len.into(), avg.into(), ratio.into()]);
        }
        let lens: Vec<f64> = rows.iter().map(|r| r.0 as f64).collect();
        result.aggregates.push(Aggregate::of(format!("n={n}"), "length", &lens));
        let agg = Aggregate::of(format!("n={n}"), "ratio", &ratios);
        means.push((n as f64, agg.mean));
        result.aggregates.push(agg);
    }
    let ys: Vec<f64> = means.iter().map(|m| m.1).collect();
    if p.require_increasing {
        result.checks.push(Check::new("ratio increasing in n", strictly_increasing(&ys), format!("{ys:?}")));
    }
    let last = *ys.last().expect("non-empty grid");
    result.checks.push(Check::new(
        "ratio in band at largest n",
        in_band(last, p.ratio_band),
        format!("{last} vs [{}, {}]", p.ratio_band[0], p.ratio_band[1]),
    ));
    result.plots.push(LinePlot {
        name: "ratio-vs-n".into(),
        title: format!("scaled longest witness, alpha = {}", p.alpha),
        x_label: "n".into(),
        y_label: "L_w (pi^2/2 - alpha) / ln^3 n".into(),
        series: vec![Series {
            name: format!("a = {}", p.a),
            points: means,
        }],
        reference: Some((1.0, "limit".into())),
    });
    Ok(result)
}

/// Block exploration with `β_n = γ²π²/(2 ln²n)`; reports
/// `√β (ln L_w − ln n)` against `−π/√2`.
pub fn run_theorem2(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let p: Theorem2Params = spec.params()?;
    p.validate()?;
    let target_column = -PI / SQRT_2;
    let mut result = ExperimentResult::new(
        spec,
        &["n", "beta", "N", "delta", "seed", "spine", "blocks", "length", "average", "verified", "column", "decomposition_error"],
    );
    let mut means = Vec::new();
    let mut all_negative = true;
    let mut all_verified = true;
    let mut worst_decomposition = 0.0f64;
    for &n in &p.n {
        let s = p.schedule(n);
        let rows = fan_out(spec.seeds, |seed| {
            let mut oracle = EdgeOracle::lazy(n)?;
            let stream = SeededStream::new(seed, THEOREM2_STREAM).substream(n as u64);
            let (spine, blocks) = block_exploration(s.delta, s.keep, s.target, 1, &mut oracle, &stream)?;
            let (first, len) = spine.longest_segment_below(s.beta);
            let (avg, verified) = if len == 0 {
                (f64::NAN, true)
            } else {
                let w = spine.segment(first, len);
                (w.average(), verify_witness(&oracle, &w, s.beta)?)
            };
            Ok((spine.len(), blocks.block_weights.len(), len, avg, verified, block_decomposition_error(&spine, &blocks)))
        })?;
        let mut columns = Vec::new();
        for (seed, &(spine, nblocks, len, avg, verified, err)) in (spec.seeds.start..).zip(&rows) {
            all_verified &= verified;
            let column = s.beta.sqrt() * ((len as f64).ln() - (n as f64).ln());
            if len > 0 {
                columns.push(column);
                all_negative &= column < 0.0;
            }
            worst_decomposition = worst_decomposition.max(err);
            result.table.push(vec![
                n.into(),
                s.beta.into(),
                s.keep.into(),
                s.delta.into(),
                seed.into(),
                spine.into(),
                nblocks.into(),
                len.into(),
                avg.into(),
                verified.into(),
                column.into(),
                err.into(),
            ]);
        }
        let found = columns.len() as f64 / rows.len() as f64;
        result.checks.push(Check::new(
            format!("witness found at n={n}"),
            found >= p.min_witness_fraction,
            format!("{found} of seeds, need {}", p.min_witness_fraction),
        ));
        let agg = Aggregate::of(format!("n={n}"), "column", &columns);
        means.push((n as f64, agg.mean));
        result.aggregates.push(agg);
    }
    result.checks.push(Check::new("column negative", all_negative, "every witness is shorter than n"));
    result.checks.push(Check::new("witnesses verified", all_verified, "simple, weights re-read from the oracle, average within beta"));
    result.checks.push(Check::new(
        "spine weight decomposition",
        worst_decomposition <= 1e-9,
        format!("largest discrepancy {worst_decomposition:e}"),
    ));
    let ys: Vec<f64> = means.iter().map(|m| m.1).collect();
    let last = *ys.last().expect("non-empty grid");
    result.checks.push(Check::new(
        "column in band at largest n",
        in_band(last, p.column_band),
        format!("{last} vs [{}, {}]", p.column_band[0], p.column_band[1]),
    ));
    let gaps: Vec<f64> = ys.iter().map(|y| (y - target_column).abs()).collect();
    result.checks.push(Check::new("column moving toward -pi/sqrt 2", strictly_decreasing(&gaps), format!("{ys:?}")));
    result.plots.push(LinePlot {
        name: "column-vs-n".into(),
        title: format!("block exploration, gamma = {}, a = {}", p.gamma, p.a),
        x_label: "n".into(),
        y_label: "sqrt(beta) (ln L_w - ln n)".into(),
        series: vec![Series {
            name: "mean".into(),
            points: means,
        }],
        reference: Some((target_column, "-pi/sqrt 2".into())),
    });
    Ok(result)
}

/// Front of the N-selection walk after `⌊t ln³N⌋` generations, in units of `ln N`.
pub fn run_nbrw_speed(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let p: NbrwSpeedParams = spec.params()?;
    p.validate()?;
    let target = p.target();
    let mut result = ExperimentResult::new(spec, &["N", "seed", "steps", "min", "scaled_min", "velocity"]);
    let mut series = Vec::new();
    let mut means = Vec::new();
    for &keep in &p.keep {
        let steps = front_horizon(keep, p.t);
        let initial = ((keep as f64).powf(p.a).floor() as usize).clamp(1, keep);
        let ln = (keep as f64).ln();
        let runs = fan_out(spec.seeds, |seed| {
            let run = nbrw_run(keep, initial, steps, &SeededStream::new(seed, NBRW_STREAM).substream(keep as u64))?;
            Ok(run.mins())
        })?;
        let mut scaled = Vec::new();
        for (seed, mins) in (spec.seeds.start..).zip(&runs) {
            let last = *mins.last().expect("at least one generation");
            scaled.push(last / ln);
            let v = if mins.len() >= 4 { velocity(mins) } else { f64::NAN };
            result.table.push(vec![keep.into(), seed.into(), steps.into(), last.into(), (last / ln).into(), v.into()]);
        }
        let mean_path: Vec<(f64, f64)> = (0..steps)
            .map(|k| ((k + 1) as f64, runs.iter().map(|m| m[k]).sum::<f64>() / runs.len() as f64))
            .collect();
        series.push(Series {
            name: format!("N = {keep}"),
            points: mean_path,
        });
        let agg = Aggregate::of(format!("N={keep}"), "scaled_min", &scaled);
        means.push(agg.mean);
        result.aggregates.push(agg);
    }
    let last = *means.last().expect("non-empty grid");
    let lo = p.band[0] * target;
    let hi = p.band[1] * target;
    result.checks.push(Check::new(
        "scaled front in band at largest N",
        in_band(last, [lo.min(hi), lo.max(hi)]),
        format!("{last} vs [{lo}, {hi}], target {target}"),
    ));
    if means.len() > 1 {
        let first = means[0];
        result.checks.push(Check::new(
            "closer to target at largest N",
            (last - target).abs() < (first - target).abs(),
            format!("{first} -> {last}, target {target}"),
        ));
    }
    result.plots.push(LinePlot {
        name: "min-vs-generation".into(),
        title: "leftmost particle of the N-selection walk".into(),
        x_label: "generation".into(),
        y_label: "mean min".into(),
        series,
        reference: None,
    });
    Ok(result)
}

/// Corridor decay rate from the transfer operator, scaled by `Δ²`.
pub fn run_mogulskii(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let p: MogulskiiParams = spec.params()?;
    p.validate()?;
    let mut result = ExperimentResult::new(spec, &["delta", "grid", "eigenvalue", "rate", "scaled_rate", "error_bar"]);
    let estimates = p
        .delta
        .par_iter()
        .map(|&d| confinement_spectral(d, p.grid(d)))
        .collect::<Result<Vec<_>>>()?;
    for e in &estimates {
        result.table.push(vec![e.delta.into(), e.grid.into(), e.eigenvalue.into(), e.rate.into(), e.scaled_rate().into(), e.error_bar.into()]);
    }
    let scaled: Vec<f64> = estimates.iter().map(|e| e.scaled_rate()).collect();
    if p.require_decreasing {
        result.checks.push(Check::new("scaled rate decreasing in delta", strictly_decreasing(&scaled), format!("{scaled:?}")));
    }
    let last = *scaled.last().expect("non-empty grid");
    let rel = (last - MOGULSKII_CONSTANT).abs() / MOGULSKII_CONSTANT;
    result.checks.push(Check::new(
        "scaled rate near pi^2/2 at widest corridor",
        rel <= p.tolerance,
        format!("{last}, relative error {rel} vs {}", p.tolerance),
    ));
    result.aggregates.push(Aggregate::of("all", "scaled_rate", &scaled));
    result.plots.push(LinePlot {
        name: "rate-vs-delta".into(),
        title: "corridor decay rate".into(),
        x_label: "delta".into(),
        y_label: "delta^2 * rate".into(),
        series: vec![Series {
            name: "spectral".into(),
            points: estimates.iter().map(|e| (e.delta, e.scaled_rate())).collect(),
        }],
        reference: Some((MOGULSKII_CONSTANT, "pi^2/2".into())),
    });
    Ok(result)
}

/// One materialized instance: `(λ, exact ℒ, exploration length, witness verified)`.
fn oracle_instance(n: usize, keep: usize, steps: usize, lambdas: &[f64], stream: &SeededStream) -> Result<Vec<(f64, usize, usize, bool)>> {
    let mut oracle = EdgeOracle::materialized(n, &mut stream.substream(0))?;
    let profile = min_weight_profile(&oracle)?;
    let start: Vec<usize> = (1..=keep).collect();
    let run = run_exploration(keep, steps, &start, &mut oracle, &stream.substream(1))?;
    lambdas
        .iter()
        .map(|&lambda| {
            let exact = longest_from_profile(&profile, lambda).0;
            Ok(match run.best_below(&oracle, lambda)? {
                Some(w) => (lambda, exact, w.len(), verify_witness(&oracle, &w, lambda)?),
                None => (lambda, exact, 0, true),
            })
        })
        .collect()
}

fn oracle_rows(
    result: &mut ExperimentResult,
    seeds: impl Iterator<Item = u64>,
    outcomes: &[Vec<(f64, usize, usize, bool)>],
    label: &str,
) -> Check {
    let mut first_bad = None;
    let mut count = 0;
    for (seed, rows) in seeds.zip(outcomes) {
        for &(lambda, exact, found, verified) in rows {
            let ok = found <= exact && verified;
            if !ok && first_bad.is_none() {
                first_bad = Some(seed);
            }
            count += 1;
            if result.kind == Kind::OracleCompare {
                result.table.push(vec![seed.into(), lambda.into(), exact.into(), found.into(), verified.into()]);
            }
        }
    }
    let mut check = Check::new(label, first_bad.is_none(), format!("{count} comparisons"));
    check.seed = first_bad;
    check
}

/// Exploration witnesses against the exhaustive longest-path oracle.
pub fn run_oracle_compare(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let p: OracleCompareParams = spec.params()?;
    validate_oracle(p.n, p.keep, p.steps, &p.lambda)?;
    let mut result = ExperimentResult::new(spec, &["seed", "lambda", "exact", "exploration", "verified"]);
    let outcomes = fan_out(spec.seeds, |seed| oracle_instance(p.n, p.keep, p.steps, &p.lambda, &SeededStream::new(seed, ORACLE_STREAM)))?;
    let check = oracle_rows(&mut result, spec.seeds.start..spec.seeds.end, &outcomes, "exploration witness within exact optimum");
    result.checks.push(check);
    for &lambda in &p.lambda {
        let found: Vec<f64> = outcomes.iter().flatten().filter(|r| r.0 == lambda).map(|r| r.2 as f64).collect();
        let exact: Vec<f64> = outcomes.iter().flatten().filter(|r| r.0 == lambda).map(|r| r.1 as f64).collect();
        result.aggregates.push(Aggregate::of(format!("lambda={lambda}"), "exploration", &found));
        result.aggregates.push(Aggregate::of(format!("lambda={lambda}"), "exact", &exact));
    }
    Ok(result)
}

/// Suffix-minimum drop count by direct double loop.
fn drop_count_quadratic(values: &[f64], delta: f64) -> usize {
    (0..values.len())
        .filter(|&j| values[j..].iter().any(|&y| y <= values[j] - delta))
        .count()
}

/// One audit outcome row: `(case, statistic, bound, passed)`.
type AuditRow = (String, f64, f64, bool);

fn audit_one(name: &str, p: &AuditsParams, seed: u64) -> Result<Vec<AuditRow>> {
    let base = SeededStream::new(seed, AUDIT_STREAM);
    let mut rows = Vec::new();
    match name {
        "coupling" => {
            let a = &p.coupling;
            for (i, &n) in a.n.iter().enumerate() {
                let mut stream = base.substream2(0, i as u64);
                let (mut drawn, mut worst, mut violations) = (0u64, 0.0f64, 0usize);
                while drawn < a.samples {
                    let m = ((a.samples - drawn) as usize).min(n - 1);
                    let c = coupled_order_stats(&mut stream, n, m)?;
                    worst = worst.max(c.identity_error());
                    violations += c.sandwich_violations();
                    drawn += m as u64;
                }
                rows.push((format!("identity n={n}"), worst, a.identity_tolerance, worst < a.identity_tolerance));
                rows.push((format!("sandwich n={n}"), violations as f64, 0.0, violations == 0));
            }
        }
        "crossing" => {
            let a = &p.crossing;
            let stream = base.substream(1);
            let counts = (0..a.instances)
                .into_par_iter()
                .map(|i| {
                    let oracle = EdgeOracle::materialized(a.n, &mut stream.substream(i))?;
                    a.x.iter().map(|&x| crossing_count(&oracle, x)).collect::<Result<Vec<u64>>>()
                })
                .collect::<Result<Vec<_>>>()?;
            let q = 1.0 - 1.0 / (std::f64::consts::E * a.n as f64);
            for (j, &x) in a.x.iter().enumerate() {
                let m: Moments = counts.iter().map(|c| c[j] as f64).collect();
                let bound = a.n as f64 * (-q * x).exp();
                rows.push((format!("crossing n={} x={x}", a.n), m.mean(), bound + 3.0 * m.sem(), m.mean() <= bound + 3.0 * m.sem()));
            }
        }
        "many_to_one" => {
            let a = &p.many_to_one;
            let event = BoxEvent::new(a.lower.clone(), a.upper.clone())?;
            let c = many_to_one_check(&event, a.truncation, a.trials, &base.substream(2), a.census_cap)?;
            let slack = 3.0 * (c.lhs_sigma.powi(2) + c.rhs_sigma.powi(2)).sqrt() + c.tail_bound;
            rows.push((format!("many-to-one len={}", event.len()), (c.lhs - c.rhs).abs(), slack, c.agree));
        }
        "dominance" => {
            let a = &p.dominance;
            let barrier = KillRule::Barrier(BarrierSpec::growing_corridor(a.c, a.horizon)?);
            let stream = base.substream(3);
            let violations = (0..a.trials)
                .into_par_iter()
                .map(|t| Ok(killed_vs_selected_dominance(a.keep, &barrier, &[0.0], &[0.0], a.horizon, &stream.substream(t))?.violations()))
                .collect::<Result<Vec<usize>>>()?;
            let total: usize = violations.iter().sum();
            rows.push((format!("dominance N={} horizon={}", a.keep, a.horizon), total as f64, 0.0, total == 0));
        }
        "top_k" => {
            let a = &p.top_k;
            for (i, &(len, k)) in a.grid.iter().enumerate() {
                let c = top_k_exp_sum(len, k, a.trials, &base.substream2(4, i as u64))?;
                rows.push((format!("top-k len={len} k={k}"), c.mean, c.bound + 3.0 * c.sigma, c.holds));
            }
        }
        "drop_count" => {
            let a = &p.drop_count;
            let stream = base.substream(5);
            let mismatches: usize = (0..a.traces)
                .into_par_iter()
                .map(|t| {
                    let trace = y_walk(a.len, &mut stream.substream(t));
                    a.delta.iter().filter(|&&d| drop_count(&trace, d) != drop_count_quadratic(&trace.values, d)).count()
                })
                .sum();
            rows.push((format!("drop count len={}", a.len), mismatches as f64, 0.0, mismatches == 0));
        }
        "color" => {
            let a = &p.color;
            let stream = base.substream(6);
            let audits = (0..a.instances)
                .into_par_iter()
                .map(|i| coupled_color_audit(a.n, a.keep, a.steps, a.initial, &stream.substream(i)))
                .collect::<Result<Vec<_>>>()?;
            let violations: usize = audits.iter().map(|x| x.upper_violations + x.lower_violations).sum();
            rows.push((format!("sandwich n={} N={}", a.n, a.keep), violations as f64, 0.0, violations == 0));
            for g in 0..audits[0].counts.len() {
                let m: Moments = audits.iter().map(|x| x.counts[g].non_blue_fraction()).collect();
                let bound = audits[0].counts[g].bound;
                rows.push((format!("non-blue fraction generation {}", audits[0].counts[g].generation), m.mean(), bound + 3.0 * m.sem(), m.mean() <= bound + 3.0 * m.sem()));
            }
        }
        "oracle" => {
            let a = &p.oracle;
            let stream = base.substream(7);
            let outcomes = (0..a.instances)
                .into_par_iter()
                .map(|i| oracle_instance(a.n, a.keep, a.steps, &a.lambda, &stream.substream(i)))
                .collect::<Result<Vec<_>>>()?;
            let bad = outcomes.iter().flatten().filter(|&&(_, exact, found, ok)| found > exact || !ok).count();
            rows.push((format!("oracle compare n={}", a.n), bad as f64, 0.0, bad == 0));
        }
        other => return Err(config_err(format!("unknown audit {other}"))),
    }
    Ok(rows)
}

const AUDITS: [&str; 8] = ["coupling", "crossing", "many_to_one", "dominance", "top_k", "drop_count", "color", "oracle"];

/// The full audit battery, once per seed.
pub fn run_audits(spec: &ExperimentSpec) -> Result<ExperimentResult> {
    let p: AuditsParams = spec.params()?;
    p.validate()?;
    let mut result = ExperimentResult::new(spec, &["audit", "case", "seed", "statistic", "bound", "passed"]);
    let outcomes = fan_out(spec.seeds, |seed| AUDITS.par_iter().map(|name| audit_one(name, &p, seed)).collect::<Result<Vec<_>>>())?;
    for name in AUDITS {
        let mut check = Check::new(name, true, String::new());
        let mut cases = 0;
        for (seed, per_seed) in (spec.seeds.start..).zip(&outcomes) {
            let rows = &per_seed[AUDITS.iter().position(|a| *a == name).expect("listed")];
            for (case, stat, bound, ok) in rows {
                cases += 1;
                if !ok && check.passed {
                    check.passed = false;
                    check.seed = Some(seed);
                    check.detail = format!("{case}: {stat} vs {bound}");
                }
                result.table.push(vec![name.into(), case.as_str().into(), seed.into(), (*stat).into(), (*bound).into(), (*ok).into()]);
            }
        }
        if check.passed {
            check.detail = format!("{cases} cases");
        }
        result.checks.push(check);
    }
    Ok(result)
}

#[derive(Serialize)]
struct Summary<'a> {
    kind: Kind,
    seeds: SeedRange,
    provenance: &'a Provenance,
    passed: bool,
    checks: &'a [Check],
    aggregates: &'a [Aggregate],
}

/// Writes `result.csv`, `summary.json` and one `.svg` per plot into `dir`.
pub fn emit_report(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let csv = dir.join("result.csv");
    fs::write(&csv, result.table.to_csv())?;
    written.push(csv);
    let summary = Summary {
        kind: result.kind,
        seeds: result.seeds,
        provenance: &result.provenance,
        passed: result.passed(),
        checks: &result.checks,
        aggregates: &result.aggregates,
    };
    let json = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&summary)?;
    text.push('\n');
    fs::write(&json, text)?;
    written.push(json);
    for plot in &result.plots {
        let path = dir.join(format!("{}.svg", plot.name));
        fs::write(&path, plot.to_svg())?;
        written.push(path);
    }
    Ok(written)
}
