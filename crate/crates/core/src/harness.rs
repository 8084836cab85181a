//! Desk-scale sweeps that compare every closed form and identity against
//! brute-force counts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::error::{FormulaError, ParamError};
use crate::formula::{self, identity_check, ratio_lemma_sides, Ratio};
use crate::lattice::{
    base_positions, build_hexagon, build_quartered, build_quartered_undented,
    build_staircase_trimmed, dent_count, remove_forced, Parity, QHParams, Region,
};
use crate::matching::{count_tilings, dual_graph, kuo_condensation_check, Count, DualGraph};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Params(#[from] ParamError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error("writing {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Inclusive integer range; empty when `lo > hi`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Span {
    pub lo: u32,
    pub hi: u32,
}

impl Span {
    pub const fn new(lo: u32, hi: u32) -> Self {
        Span { lo, hi }
    }

    pub const fn empty() -> Self {
        Span { lo: 1, hi: 0 }
    }

    pub fn iter(self) -> impl Iterator<Item = u32> + Clone {
        self.lo..=self.hi
    }

    pub fn contains(self, v: u32) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn is_empty(self) -> bool {
        self.lo > self.hi
    }
}

impl FromStr for Span {
    type Err = String;

    /// `lo..hi` (inclusive) or a single value.
    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |v: &str| v.trim().parse::<u32>().map_err(|e| format!("{v:?}: {e}"));
        match s.split_once("..") {
            Some((lo, hi)) => Ok(Span::new(parse(lo)?, parse(hi.trim_start_matches('='))?)),
            None => {
                let v = parse(s)?;
                Ok(Span::new(v, v))
            }
        }
    }
}

/// Ranges for one region family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Box3 {
    pub a: Span,
    pub b: Span,
    pub c: Span,
}

/// Quartered hexagons are swept over `a`, `c` and the dent count `k`;
/// `b` follows from `k` and the parity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuarteredRange {
    pub a: Span,
    pub c: Span,
    pub k: Span,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DentPolicy {
    /// Every subset when there are at most 200, otherwise 50 seeded samples.
    Auto,
    All,
    Sample(usize),
    InitialSegments,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Macmahon,
    Proctor,
    QuarteredOdd,
    QuarteredEven,
    Recurrence,
    Kuo,
    Identity,
    RatioLemmas,
    ForcedReduction,
    SpecialCases,
    BaseCases,
    RatioForm,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::Macmahon,
        Check::Proctor,
        Check::QuarteredOdd,
        Check::QuarteredEven,
        Check::Recurrence,
        Check::Kuo,
        Check::Identity,
        Check::RatioLemmas,
        Check::ForcedReduction,
        Check::SpecialCases,
        Check::BaseCases,
        Check::RatioForm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Macmahon => "macmahon",
            Check::Proctor => "proctor",
            Check::QuarteredOdd => "quartered-odd",
            Check::QuarteredEven => "quartered-even",
            Check::Recurrence => "recurrence",
            Check::Kuo => "kuo",
            Check::Identity => "identity",
            Check::RatioLemmas => "ratio-lemmas",
            Check::ForcedReduction => "forced-reduction",
            Check::SpecialCases => "special-cases",
            Check::BaseCases => "base-cases",
            Check::RatioForm => "ratio-form",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check {s:?}"))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub hexagon: Box3,
    pub staircase: Box3,
    /// Staircase instances checked in addition to the box.
    pub staircase_extra: Vec<(u32, u32, u32)>,
    pub quartered: QuarteredRange,
    pub dents: DentPolicy,
    pub checks: Vec<Check>,
    /// Identity grid covers `1 <= s1 < d <= grid`, `0 <= c <= grid`.
    pub identity_grid: u32,
    pub lemma_samples: usize,
    pub seed: u64,
    /// Record per-instance wall time. Off by default so reports are
    /// byte-identical across runs.
    pub timings: bool,
    pub output: Option<PathBuf>,
}

impl SweepSpec {
    /// The acceptance-scale sweep.
    pub fn desk() -> Self {
        SweepSpec {
            hexagon: Box3 {
                a: Span::new(0, 3),
                b: Span::new(0, 3),
                c: Span::new(0, 3),
            },
            staircase: Box3 {
                a: Span::new(0, 3),
                b: Span::new(0, 4),
                c: Span::new(0, 4),
            },
            staircase_extra: vec![(3, 6, 4)],
            quartered: QuarteredRange {
                a: Span::new(0, 2),
                c: Span::new(0, 3),
                k: Span::new(0, 2),
            },
            dents: DentPolicy::Auto,
            checks: Check::ALL.to_vec(),
            identity_grid: 10,
            lemma_samples: 500,
            seed: 20_141_107,
            timings: false,
            output: None,
        }
    }

    /// Nothing to check.
    pub fn empty() -> Self {
        let none = Box3 {
            a: Span::empty(),
            b: Span::empty(),
            c: Span::empty(),
        };
        SweepSpec {
            hexagon: none,
            staircase: none,
            staircase_extra: Vec::new(),
            quartered: QuarteredRange {
                a: Span::empty(),
                c: Span::empty(),
                k: Span::empty(),
            },
            identity_grid: 0,
            lemma_samples: 0,
            ..SweepSpec::desk()
        }
    }

    /// Restrict one parameter in every family.
    pub fn restrict(&mut self, param: char, span: Span) -> Result<(), String> {
        match param {
            'a' => {
                self.hexagon.a = span;
                self.staircase.a = span;
                self.quartered.a = span;
                self.staircase_extra.retain(|e| span.contains(e.0));
            }
            'b' => {
                self.hexagon.b = span;
                self.staircase.b = span;
                self.staircase_extra.retain(|e| span.contains(e.1));
            }
            'c' => {
                self.hexagon.c = span;
                self.staircase.c = span;
                self.quartered.c = span;
                self.staircase_extra.retain(|e| span.contains(e.2));
            }
            'k' => self.quartered.k = span,
            other => return Err(format!("unknown parameter {other:?}")),
        }
        Ok(())
    }

    fn runs(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }
}

/// Closed forms under test. The sweep compares these against brute force,
/// so a deliberately broken implementation must show up as failures.
pub trait ClosedForms: Sync {
    fn macmahon(&self, a: u32, b: u32, c: u32) -> Result<Count, FormulaError> {
        formula::macmahon_count(a, b, c)
    }
    fn proctor(&self, a: u32, b: u32, c: u32) -> Result<Count, FormulaError> {
        formula::proctor_count(a, b, c)
    }
    fn quartered(&self, params: &QHParams) -> Result<Count, FormulaError> {
        formula::formula_quartered(params)
    }
}

pub struct StandardForms;

impl ClosedForms for StandardForms {}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceRecord {
    pub check: String,
    pub params: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_us: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckTally {
    pub check: String,
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    pub seed: u64,
    pub dent_policy: DentPolicy,
    pub records: Vec<InstanceRecord>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.records.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &InstanceRecord> {
        self.records.iter().filter(|r| !r.pass)
    }

    pub fn records_for(&self, check: Check) -> impl Iterator<Item = &InstanceRecord> {
        self.records.iter().filter(move |r| r.check == check.name())
    }

    pub fn summary(&self) -> Vec<CheckTally> {
        let mut out: Vec<CheckTally> = Vec::new();
        for r in &self.records {
            let tally = match out.iter_mut().find(|t| t.check == r.check) {
                Some(t) => t,
                None => {
                    out.push(CheckTally {
                        check: r.check.clone(),
                        total: 0,
                        passed: 0,
                        failed: 0,
                    });
                    out.last_mut().unwrap()
                }
            };
            tally.total += 1;
            if r.pass {
                tally.passed += 1;
            } else {
                tally.failed += 1;
            }
        }
        out
    }

    pub fn summary_text(&self) -> String {
        let mut s = format!("seed {} dents {:?}\n", self.seed, self.dent_policy);
        for t in self.summary() {
            s.push_str(&format!(
                "{:<18} {:>6} instances  {:>6} pass  {:>4} fail\n",
                t.check, t.total, t.passed, t.failed
            ));
        }
        let failed = self.failures().count();
        s.push_str(&format!(
            "{} {} instances, {} failed\n",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.records.len(),
            failed
        ));
        s
    }

    /// One JSON object per record, in a fixed field order, followed by a
    /// summary object.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serialises"));
            out.push('\n');
        }
        let summary = serde_json::json!({
            "summary": {
                "seed": self.seed,
                "dent_policy": self.dent_policy,
                "total": self.records.len(),
                "failed": self.failures().count(),
                "checks": self.summary(),
            }
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }

    pub fn to_csv(&self) -> String {
        let timed = self.records.iter().any(|r| r.elapsed_us.is_some());
        let mut out = String::from("check,params,expected,actual,pass");
        if timed {
            out.push_str(",elapsed_us");
        }
        out.push('\n');
        let quote = |s: &str| format!("\"{}\"", s.replace('"', "\"\""));
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{}",
                r.check,
                quote(&r.params),
                quote(&r.expected),
                quote(&r.actual),
                r.pass
            ));
            if timed {
                out.push_str(&format!(",{}", r.elapsed_us.unwrap_or(0)));
            }
            out.push('\n');
        }
        out
    }

    /// Writes `.csv` output when the path ends in `.csv`, JSON lines otherwise.
    pub fn write(&self, path: &Path) -> Result<(), HarnessError> {
        let body = if path.extension().is_some_and(|e| e == "csv") {
            self.to_csv()
        } else {
            self.to_jsonl()
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
                path: dir.to_path_buf(),
                source,
            })?;
        }
        std::fs::write(path, body).map_err(|source| HarnessError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}

/// All `k`-subsets of `1..=n` in lexicographic order.
pub fn dent_subsets(n: u32, k: u32) -> Vec<Vec<u32>> {
    fn go(start: u32, n: u32, k: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k as usize {
            out.push(cur.clone());
            return;
        }
        let need = k - cur.len() as u32;
        for v in start..=n {
            if n - v + 1 < need {
                break;
            }
            cur.push(v);
            go(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if k <= n {
        go(1, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
}

fn choose_dents(policy: DentPolicy, n: u32, k: u32, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    match policy {
        DentPolicy::InitialSegments => {
            if k <= n {
                vec![(1..=k).collect()]
            } else {
                Vec::new()
            }
        }
        DentPolicy::All => dent_subsets(n, k),
        DentPolicy::Auto if binomial(n as u64, k as u64) <= 200 => dent_subsets(n, k),
        DentPolicy::Auto => sample_subsets(n, k, 50, rng),
        DentPolicy::Sample(count) => sample_subsets(n, k, count, rng),
    }
}

fn sample_subsets(n: u32, k: u32, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<u32>> {
    let pool: Vec<u32> = (1..=n).collect();
    let mut out: Vec<Vec<u32>> = (0..count)
        .map(|_| {
            let mut s: Vec<u32> = pool.choose_multiple(rng, k as usize).copied().collect();
            s.sort_unstable();
            s
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// Quartered-hexagon parameter sets of one parity within the ranges.
pub fn quartered_instances(
    range: &QuarteredRange,
    parity: Parity,
    policy: DentPolicy,
    rng: &mut ChaCha8Rng,
) -> Vec<QHParams> {
    let mut out = Vec::new();
    for a in range.a.iter() {
        for c in range.c.iter() {
            for k in range.k.iter() {
                let b = match parity {
                    Parity::Odd if c + 2 * k == 0 => continue,
                    Parity::Odd => c + 2 * k - 1,
                    Parity::Even => c + 2 * k,
                };
                for dents in choose_dents(policy, a + k, k, rng) {
                    out.push(
                        QHParams::new(a, b, c, dents).expect("generated parameters are valid"),
                    );
                }
            }
        }
    }
    out
}

fn quartered_count(a: u32, b: u32, c: u32, dents: &[u32]) -> Result<Count, ParamError> {
    let p = QHParams::new(a, b, c, dents.to_vec())?;
    Ok(count_tilings(&build_quartered(&p)?))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecurrenceOutcome {
    pub holds: bool,
    /// `L(R(a,b,c; s))`, `L(R(a,b-2,c; s_2..))`, `L(R(a,b-1,c+1; s_2..))`,
    /// `L(R(a,b-1,c-1; s))`, `L(R(a+1,b-2,c; s_2..))`, `L(R(a-1,b,c; s))`.
    pub counts: [Count; 6],
}

fn recurrence_preconditions(p: &QHParams) -> Result<(), HarnessError> {
    p.validate()?;
    let k = p.k();
    let ok = k >= 1 && p.c >= 1 && p.a >= 1 && p.b >= 2 && p.dents[k as usize - 1] < p.d();
    if !ok {
        return Err(HarnessError::Precondition(format!(
            "{p}: need a >= 1, b >= 2, c >= 1, k >= 1 and s_k < d"
        )));
    }
    Ok(())
}

/// The six region counts linked by the condensation recurrence
/// `L1 L2 = L3 L4 + L5 L6`, each computed by brute force.
pub fn recurrence_check(
    a: u32,
    b: u32,
    c: u32,
    dents: &[u32],
) -> Result<RecurrenceOutcome, HarnessError> {
    let p = QHParams::new(a, b, c, dents.to_vec())?;
    recurrence_preconditions(&p)?;
    let tail = &dents[1..];
    let counts = [
        quartered_count(a, b, c, dents)?,
        quartered_count(a, b - 2, c, tail)?,
        quartered_count(a, b - 1, c + 1, tail)?,
        quartered_count(a, b - 1, c - 1, dents)?,
        quartered_count(a + 1, b - 2, c, tail)?,
        quartered_count(a - 1, b, c, dents)?,
    ];
    let holds = &counts[0] * &counts[1] == (&counts[2] * &counts[3]) + (&counts[4] * &counts[5]);
    Ok(RecurrenceOutcome { holds, counts })
}

/// The graph and marked vertices for condensation on `R(a,b,c; s)`.
#[derive(Clone, Debug)]
pub struct KuoInstance {
    /// Dual graph of the region with the dent at `s_1` filled back in.
    pub graph: DualGraph,
    /// Base position `d`.
    pub x: usize,
    /// Base position `s_1`.
    pub y: usize,
    /// Down-pointing triangle just below the top-right corner.
    pub z: usize,
    /// Up-pointing triangle in the top-right corner.
    pub t: usize,
}

pub fn kuo_instance(params: &QHParams) -> Result<KuoInstance, HarnessError> {
    recurrence_preconditions(params)?;
    let (a, b, c) = (params.a, params.b, params.c);
    let base = base_positions(a, b, c);
    let undented = build_quartered_undented(a, b, c).expect("validated");
    let kept_dents: Vec<_> = params.dents[1..]
        .iter()
        .map(|&s| base[s as usize - 1])
        .collect();
    let region = undented.without(&kept_dents);
    let graph = dual_graph(&region);
    let corner_col = region
        .cells()
        .iter()
        .filter(|t| t.row == 0)
        .map(|t| t.col)
        .max()
        .expect("a >= 1 gives a nonempty top row");
    let vertex = |cell| graph.vertex_of(cell).expect("cell in region");
    Ok(KuoInstance {
        x: vertex(base[params.d() as usize - 1]),
        y: vertex(base[params.dents[0] as usize - 1]),
        z: vertex(crate::lattice::TriRef::new(1, corner_col)),
        t: vertex(crate::lattice::TriRef::new(0, corner_col)),
        graph,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeEntry {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub count: Count,
    /// Quartered hexagon with dents `1..k` matching this staircase region.
    pub matched: Option<QHParams>,
    /// `true` when the reduced regions are congruent, `false` when only the
    /// counts agree.
    pub cell_identical: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub entries: Vec<ProbeEntry>,
}

impl ProbeReport {
    /// Whether every matched entry pairs `P(a,b,c)` with `R(a,b,c; 1..k)`.
    pub fn identity_map(&self) -> bool {
        self.entries.iter().all(|e| {
            e.matched
                .as_ref()
                .is_some_and(|q| (q.a, q.b, q.c) == (e.a, e.b, e.c) && e.cell_identical)
        })
    }

    pub fn unmatched(&self) -> impl Iterator<Item = &ProbeEntry> {
        self.entries.iter().filter(|e| e.matched.is_none())
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for e in &self.entries {
            let m = match &e.matched {
                Some(q) => format!("{q} ({})", if e.cell_identical { "cells" } else { "count" }),
                None => "no match".to_string(),
            };
            s.push_str(&format!(
                "P({},{},{}) L={} -> {m}\n",
                e.a, e.b, e.c, e.count
            ));
        }
        s
    }
}

/// For each `P(a,b,c)` with `a <= max_a`, `c <= b <= max_b`, `c <= max_c`,
/// looks for a quartered hexagon with initial-segment dents whose forced
/// reduction is congruent to the reduced staircase region, falling back to
/// equal tiling counts. Candidates with the same `(a, b, c)` are tried first.
pub fn correspondence_probe(max_a: u32, max_b: u32, max_c: u32) -> ProbeReport {
    let mut candidates: Vec<(QHParams, Region, Count)> = Vec::new();
    for a in 0..=max_a + 1 {
        for c in 0..=max_c + 1 {
            for b in c.saturating_sub(1)..=max_b + 1 {
                let k = dent_count(b, c).expect("b >= c - 1");
                let q = QHParams::new(a, b, c, (1..=k).collect()).expect("valid");
                let r = build_quartered(&q).expect("valid");
                let n = count_tilings(&r);
                candidates.push((q, remove_forced(&r).0, n));
            }
        }
    }
    let mut entries = Vec::new();
    for a in 0..=max_a {
        for b in 0..=max_b {
            for c in 0..=b.min(max_c) {
                let p = build_staircase_trimmed(a, b, c).expect("b >= c");
                let count = count_tilings(&p);
                let reduced = remove_forced(&p).0;
                let same = |q: &QHParams| (q.a, q.b, q.c) == (a, b, c);
                let ordered = candidates
                    .iter()
                    .filter(|(q, ..)| same(q))
                    .chain(candidates.iter().filter(|(q, ..)| !same(q)));
                let mut matched = None;
                let mut cell_identical = false;
                for (q, r, _) in ordered.clone() {
                    if r.congruent(&reduced) {
                        matched = Some(q.clone());
                        cell_identical = true;
                        break;
                    }
                }
                if matched.is_none() {
                    matched = ordered
                        .clone()
                        .find(|(.., n)| *n == count)
                        .map(|(q, ..)| q.clone());
                }
                entries.push(ProbeEntry {
                    a,
                    b,
                    c,
                    count,
                    matched,
                    cell_identical,
                });
            }
        }
    }
    ProbeReport { entries }
}

/// Number of instances where numbering the dents from the far end of the
/// base (instead of from the axis) disagrees with the closed form.
pub fn reversed_dent_mismatches(range: &QuarteredRange) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut mismatches = 0;
    for parity in [Parity::Odd, Parity::Even] {
        for p in quartered_instances(range, parity, DentPolicy::All, &mut rng) {
            let n = p.base_len();
            let mut flipped: Vec<u32> = p.dents.iter().map(|&s| n + 1 - s).collect();
            flipped.sort_unstable();
            let region = build_quartered(&QHParams {
                dents: flipped,
                ..p.clone()
            })
            .expect("valid");
            if Ok(count_tilings(&region)) != formula::formula_quartered(&p) {
                mismatches += 1;
            }
        }
    }
    mismatches
}

type Job<'a> = Box<dyn Fn() -> (String, String, String, bool) + Send + Sync + 'a>;

struct Jobs<'a> {
    check: Check,
    items: Vec<Job<'a>>,
}

impl<'a> Jobs<'a> {
    fn new(check: Check) -> Self {
        Jobs {
            check,
            items: Vec::new(),
        }
    }

    /// Queue one instance producing `(params, expected, actual, pass)`.
    fn push(&mut self, f: impl Fn() -> (String, String, String, bool) + Send + Sync + 'a) {
        self.items.push(Box::new(f));
    }

    fn run(self, timings: bool) -> Vec<InstanceRecord> {
        let check = self.check;
        self.items
            .par_iter()
            .map(|job| {
                let start = Instant::now();
                let (params, expected, actual, pass) = job();
                InstanceRecord {
                    check: check.name().to_string(),
                    params,
                    expected,
                    actual,
                    pass,
                    elapsed_us: timings.then(|| start.elapsed().as_micros() as u64),
                }
            })
            .collect()
    }
}

fn show<T: fmt::Display, E: fmt::Display>(r: &Result<T, E>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn compare(
    params: String,
    expected: Result<Count, FormulaError>,
    actual: Count,
) -> (String, String, String, bool) {
    let pass = expected.as_ref() == Ok(&actual);
    (params, show(&expected), actual.to_string(), pass)
}

pub fn run_sweep(spec: &SweepSpec) -> Result<CheckReport, HarnessError> {
    run_sweep_with(spec, &StandardForms)
}

/// Runs the selected checks and writes the report when `spec.output` is set.
pub fn run_sweep_with(
    spec: &SweepSpec,
    forms: &dyn ClosedForms,
) -> Result<CheckReport, HarnessError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let odd = quartered_instances(&spec.quartered, Parity::Odd, spec.dents, &mut rng);
    let even = quartered_instances(&spec.quartered, Parity::Even, spec.dents, &mut rng);
    let hexagons: Vec<(u32, u32, u32)> = spec
        .hexagon
        .a
        .iter()
        .flat_map(|a| spec.hexagon.b.iter().map(move |b| (a, b)))
        .flat_map(|(a, b)| spec.hexagon.c.iter().map(move |c| (a, b, c)))
        .collect();
    let mut staircases: Vec<(u32, u32, u32)> = spec
        .staircase
        .a
        .iter()
        .flat_map(|a| spec.staircase.b.iter().map(move |b| (a, b)))
        .flat_map(|(a, b)| {
            spec.staircase
                .c
                .iter()
                .filter(move |&c| c <= b)
                .map(move |c| (a, b, c))
        })
        .collect();
    for &e in &spec.staircase_extra {
        if !staircases.contains(&e) {
            staircases.push(e);
        }
    }
    let standing: Vec<&QHParams> = odd
        .iter()
        .filter(|p| recurrence_preconditions(p).is_ok())
        .collect();

    let mut groups: Vec<Jobs> = Vec::new();

    if spec.runs(Check::Macmahon) {
        let mut jobs = Jobs::new(Check::Macmahon);
        for &(a, b, c) in &hexagons {
            jobs.push(move || {
                compare(
                    format!("H({a},{b},{c})"),
                    forms.macmahon(a, b, c),
                    count_tilings(&build_hexagon(a, b, c)),
                )
            });
        }
        groups.push(jobs);
    }

    if spec.runs(Check::Proctor) {
        let mut jobs = Jobs::new(Check::Proctor);
        for &(a, b, c) in &staircases {
            jobs.push(move || {
                let region = build_staircase_trimmed(a, b, c).expect("b >= c");
                compare(
                    format!("P({a},{b},{c})"),
                    forms.proctor(a, b, c),
                    count_tilings(&region),
                )
            });
        }
        groups.push(jobs);
    }

    for (check, set) in [(Check::QuarteredOdd, &odd), (Check::QuarteredEven, &even)] {
        if !spec.runs(check) {
            continue;
        }
        let mut jobs = Jobs::new(check);
        for p in set {
            jobs.push(move || {
                let region = build_quartered(p).expect("valid");
                compare(p.label(), forms.quartered(p), count_tilings(&region))
            });
        }
        groups.push(jobs);
    }

    if spec.runs(Check::Recurrence) {
        let mut jobs = Jobs::new(Check::Recurrence);
        for &p in &standing {
            jobs.push(move || match recurrence_check(p.a, p.b, p.c, &p.dents) {
                Ok(out) => {
                    let c = &out.counts;
                    (
                        p.label(),
                        format!("{}*{}", c[0], c[1]),
                        format!("{}*{}+{}*{}", c[2], c[3], c[4], c[5]),
                        out.holds,
                    )
                }
                Err(e) => (p.label(), "recurrence".into(), format!("error: {e}"), false),
            });
        }
        groups.push(jobs);
    }

    if spec.runs(Check::Kuo) {
        let mut jobs = Jobs::new(Check::Kuo);
        for &p in &standing {
            jobs.push(move || kuo_record(p));
        }
        groups.push(jobs);
    }

    if spec.runs(Check::Identity) {
        let mut jobs = Jobs::new(Check::Identity);
        let g = spec.identity_grid as i64;
        for d in 2..=g {
            for s1 in 1..d {
                for c in 0..=g {
                    jobs.push(move || {
                        let r = identity_check(s1, d, c);
                        (
                            format!("s1={s1} d={d} c={c}"),
                            "true".into(),
                            show(&r),
                            r == Ok(true),
                        )
                    });
                }
            }
        }
        groups.push(jobs);
    }

    if spec.runs(Check::RatioLemmas) {
        let mut jobs = Jobs::new(Check::RatioLemmas);
        let mut lemma_rng = ChaCha8Rng::seed_from_u64(spec.seed ^ 0x5eed);
        for (set, d) in lemma_instances(spec.lemma_samples, &mut lemma_rng) {
            jobs.push(move || {
                let (s1, last) = (set[0], *set.last().unwrap());
                let params = format!("S={set:?} d={d}");
                match ratio_lemma_sides(&set, d, s1, last) {
                    Ok(sides) => {
                        let lhs: Vec<String> = sides.iter().map(|(l, _)| l.to_string()).collect();
                        let rhs: Vec<String> = sides.iter().map(|(_, r)| r.to_string()).collect();
                        let pass = sides.iter().all(|(l, r)| l == r);
                        (params, rhs.join(" "), lhs.join(" "), pass)
                    }
                    Err(e) => (params, "lemmas".into(), format!("error: {e}"), false),
                }
            });
        }
        groups.push(jobs);
    }

    if spec.runs(Check::ForcedReduction) {
        let mut jobs = Jobs::new(Check::ForcedReduction);
        let mut regions: Vec<Region> = Vec::new();
        regions.extend(hexagons.iter().map(|&(a, b, c)| build_hexagon(a, b, c)));
        regions.extend(
            staircases
                .iter()
                .map(|&(a, b, c)| build_staircase_trimmed(a, b, c).expect("b >= c")),
        );
        regions.extend(
            odd.iter()
                .chain(&even)
                .map(|p| build_quartered(p).expect("valid")),
        );
        for region in regions {
            jobs.push(move || {
                let (reduced, placed) = remove_forced(&region);
                let before = count_tilings(&region);
                let after = count_tilings(&reduced);
                (
                    format!("{} placed={placed}", region.label()),
                    before.to_string(),
                    after.to_string(),
                    before == after,
                )
            });
        }
        groups.push(jobs);
    }

    if spec.runs(Check::SpecialCases) {
        let mut jobs = Jobs::new(Check::SpecialCases);
        for p in odd.iter().chain(&even) {
            if let Some(target) = special_case_target(p) {
                jobs.push(move || {
                    let (same, n, m) = reduces_to(p, &target);
                    (
                        format!("{p} -> {}", target.describe()),
                        format!("{m} (congruent)"),
                        format!("{n} ({})", if same { "congruent" } else { "different" }),
                        same && n == m,
                    )
                });
            }
        }
        for c in spec.quartered.c.iter().filter(|&c| c >= 1) {
            for a in spec.quartered.a.iter() {
                if !spec.quartered.k.contains(0) {
                    continue;
                }
                let b = c - 1;
                jobs.push(move || {
                    let q = QHParams::new(a, b, c, vec![]).expect("k = 0");
                    let r = remove_forced(&build_quartered(&q).expect("valid")).0;
                    let pr = build_staircase_trimmed(a, b, b).expect("b = b");
                    let same = r.congruent(&remove_forced(&pr).0);
                    let n = count_tilings(&r);
                    let m = forms.proctor(a, b, b);
                    (
                        format!("{q} -> P({a},{b},{b}) [case ii]"),
                        show(&m),
                        format!("{n} ({})", if same { "congruent" } else { "different" }),
                        same && m == Ok(n),
                    )
                });
            }
        }
        groups.push(jobs);
    }

    if spec.runs(Check::BaseCases) {
        let mut jobs = Jobs::new(Check::BaseCases);
        for p in odd.iter().chain(&even).filter(|p| p.a == 0) {
            jobs.push(move || {
                let n = count_tilings(&build_quartered(p).expect("valid"));
                (p.label(), "1".into(), n.to_string(), n == Count::one())
            });
        }
        for a in spec.quartered.a.iter() {
            if !spec.quartered.c.contains(1) || !spec.quartered.k.contains(0) {
                continue;
            }
            jobs.push(move || {
                let p = QHParams::new(a, 0, 1, vec![]).expect("k = 0");
                let n = count_tilings(&build_quartered(&p).expect("valid"));
                (p.label(), "1".into(), n.to_string(), n == Count::one())
            });
        }
        groups.push(jobs);
    }

    if spec.runs(Check::RatioForm) {
        let mut jobs = Jobs::new(Check::RatioForm);
        for p in &odd {
            jobs.push(move || {
                let direct = formula::formula_odd(p);
                let ratio = formula::formula_ratio_form(p);
                let pass = match (&direct, &ratio) {
                    (Ok(d), Ok(r)) => Ratio::from(d) == *r,
                    _ => false,
                };
                (p.label(), show(&direct), show(&ratio), pass)
            });
        }
        groups.push(jobs);
    }

    let mut records: Vec<InstanceRecord> = groups
        .into_iter()
        .flat_map(|g| g.run(spec.timings))
        .collect();
    // order: check, then generation order (stable)
    records.sort_by_key(|r| Check::from_str(&r.check).expect("known check"));
    let report = CheckReport {
        seed: spec.seed,
        dent_policy: spec.dents,
        records,
    };
    if let Some(path) = &spec.output {
        report.write(path)?;
    }
    Ok(report)
}

fn kuo_record(p: &QHParams) -> (String, String, String, bool) {
    let inst = match kuo_instance(p) {
        Ok(i) => i,
        Err(e) => return (p.label(), "instance".into(), format!("error: {e}"), false),
    };
    let out = match kuo_condensation_check(&inst.graph, inst.x, inst.y, inst.z, inst.t) {
        Ok(o) => o,
        Err(e) => return (p.label(), "identity".into(), format!("error: {e}"), false),
    };
    let (a, b, c) = (p.a, p.b, p.c);
    let tail = &p.dents[1..];
    // region counts in the order the six deletions are reported
    let regions = [
        quartered_count(a, b, c, &p.dents),
        quartered_count(a, b - 2, c, tail),
        quartered_count(a, b - 1, c + 1, tail),
        quartered_count(a, b - 1, c - 1, &p.dents),
        quartered_count(a + 1, b - 2, c, tail),
        quartered_count(a - 1, b, c, &p.dents),
    ];
    let expected: Vec<String> = regions.iter().map(show).collect();
    let actual: Vec<String> = out.counts.iter().map(|c| c.to_string()).collect();
    let pass = out.holds && expected == actual;
    (p.label(), expected.join(" "), actual.join(" "), pass)
}

/// Seeded `(S, d)` pairs shaped like the extended sequences of the
/// recurrence: `S = (s_1..s_k, d+1..d+c)` with `s_k < d`.
pub fn lemma_instances(count: usize, rng: &mut ChaCha8Rng) -> Vec<(Vec<i64>, i64)> {
    (0..count)
        .map(|_| {
            let k = rng.gen_range(1..=4u32);
            let a = rng.gen_range(1..=6u32);
            let c = rng.gen_range(1..=5i64);
            let d = (a + k) as i64;
            let pool: Vec<i64> = (1..d).collect();
            let mut dents: Vec<i64> = pool.choose_multiple(rng, k as usize).copied().collect();
            dents.sort_unstable();
            dents.extend((1..=c).map(|i| d + i));
            (dents, d)
        })
        .collect()
}

/// Target of a forced-lozenge reduction for the special cases.
#[derive(Clone, Debug)]
pub struct SpecialTarget {
    pub params: QHParams,
    pub case: &'static str,
}

impl SpecialTarget {
    fn describe(&self) -> String {
        format!("{} [case {}]", self.params, self.case)
    }
}

/// Case (i): `c = 0` reduces to `R(a-q, b-1, 1; s_1..s_{k-1})` with
/// `q = d - s_k`. Case (iii): `s_k = d` reduces to
/// `R(a, b-1, c+1; s_1..s_{k-1})`. Odd parity only.
pub fn special_case_target(p: &QHParams) -> Option<SpecialTarget> {
    if p.parity() != Parity::Odd || p.k() == 0 {
        return None;
    }
    let k = p.k() as usize;
    let last = p.dents[k - 1];
    let head = p.dents[..k - 1].to_vec();
    if p.c == 0 {
        let q = p.d() - last;
        return QHParams::new(p.a - q, p.b - 1, 1, head)
            .ok()
            .map(|params| SpecialTarget { params, case: "i" });
    }
    if last == p.d() {
        return QHParams::new(p.a, p.b - 1, p.c + 1, head)
            .ok()
            .map(|params| SpecialTarget {
                params,
                case: "iii",
            });
    }
    None
}

/// Whether the forced reductions of both regions agree up to translation,
/// together with both brute-force counts.
fn reduces_to(p: &QHParams, target: &SpecialTarget) -> (bool, Count, Count) {
    let from = build_quartered(p).expect("valid");
    let to = build_quartered(&target.params).expect("valid");
    let same = remove_forced(&from)
        .0
        .congruent_by_translation(&remove_forced(&to).0);
    (same, count_tilings(&from), count_tilings(&to))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn span_parsing() {
        assert_eq!("0..3".parse::<Span>().unwrap(), Span::new(0, 3));
        assert_eq!("0..=3".parse::<Span>().unwrap(), Span::new(0, 3));
        assert_eq!("2".parse::<Span>().unwrap(), Span::new(2, 2));
        assert!("x..3".parse::<Span>().is_err());
        assert!(Span::empty().is_empty());
        assert_eq!(Span::empty().iter().count(), 0);
    }

    #[test]
    fn subsets_enumerate_in_order() {
        assert_eq!(dent_subsets(3, 2), vec![vec![1, 2], vec![1, 3], vec![2, 3]]);
        assert_eq!(dent_subsets(2, 0), vec![Vec::<u32>::new()]);
        assert!(dent_subsets(1, 2).is_empty());
        assert_eq!(dent_subsets(10, 4).len() as u64, binomial(10, 4));
    }

    #[test]
    fn auto_policy_samples_large_families() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(choose_dents(DentPolicy::Auto, 10, 3, &mut rng).len(), 120);
        let sampled = choose_dents(DentPolicy::Auto, 12, 6, &mut rng);
        assert!(sampled.len() <= 50 && !sampled.is_empty());
        assert!(sampled
            .iter()
            .all(|s| s.len() == 6 && s.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn smallest_recurrence_instance() {
        let out = recurrence_check(1, 2, 1, &[1]).unwrap();
        assert!(out.holds);
        let c: Vec<String> = out.counts.iter().map(|c| c.to_string()).collect();
        assert_eq!(c, ["3", "1", "2", "1", "1", "1"]);
    }

    #[test]
    fn recurrence_rejects_non_standing_instances() {
        assert!(matches!(
            recurrence_check(0, 2, 1, &[1]),
            Err(HarnessError::Precondition(_))
        ));
        assert!(matches!(
            recurrence_check(1, 2, 1, &[2]),
            Err(HarnessError::Precondition(_))
        ));
        assert!(matches!(
            recurrence_check(1, 1, 0, &[1]),
            Err(HarnessError::Precondition(_))
        ));
        assert!(matches!(
            recurrence_check(1, 2, 1, &[1, 2]),
            Err(HarnessError::Params(_))
        ));
    }

    #[test]
    fn kuo_instance_marks() {
        let p = QHParams::new(2, 6, 3, vec![1, 3]).unwrap();
        let inst = kuo_instance(&p).unwrap();
        let (one, two) = inst.graph.class_sizes();
        assert_eq!(one, two + 1);
        let out = kuo_condensation_check(&inst.graph, inst.x, inst.y, inst.z, inst.t).unwrap();
        assert!(out.holds);
        let got: Vec<String> = out.counts.iter().map(|c| c.to_string()).collect();
        assert_eq!(got, ["3465", "84", "594", "350", "924", "90"]);
    }

    #[test]
    fn special_case_targets() {
        let p = QHParams::new(2, 3, 0, vec![1, 3]).unwrap();
        let t = special_case_target(&p).unwrap();
        assert_eq!(t.case, "i");
        assert_eq!(t.params, QHParams::new(1, 2, 1, vec![1]).unwrap());
        let p = QHParams::new(1, 3, 2, vec![2]).unwrap();
        let t = special_case_target(&p).unwrap();
        assert_eq!(t.case, "iii");
        assert_eq!(t.params, QHParams::new(1, 2, 3, vec![]).unwrap());
        assert!(special_case_target(&QHParams::new(1, 3, 2, vec![1]).unwrap()).is_none());
    }

    #[test]
    fn empty_spec_gives_empty_passing_report() {
        let report = run_sweep(&SweepSpec::empty()).unwrap();
        assert!(report.records.is_empty());
        assert!(report.all_passed());
    }

    #[test]
    fn restrict_applies_to_all_families() {
        let mut spec = SweepSpec::desk();
        spec.restrict('a', Span::new(0, 0)).unwrap();
        assert_eq!(spec.hexagon.a, Span::new(0, 0));
        assert_eq!(spec.quartered.a, Span::new(0, 0));
        assert!(spec.staircase_extra.is_empty());
        assert!(spec.restrict('q', Span::new(0, 0)).is_err());
    }

    #[test]
    fn csv_quotes_fields() {
        let report = CheckReport {
            seed: 1,
            dent_policy: DentPolicy::Auto,
            records: vec![InstanceRecord {
                check: "macmahon".into(),
                params: "H(1,1,1)".into(),
                expected: "2".into(),
                actual: "2".into(),
                pass: true,
                elapsed_us: None,
            }],
        };
        assert_eq!(
            report.to_csv(),
            "check,params,expected,actual,pass\nmacmahon,\"H(1,1,1)\",\"2\",\"2\",true\n"
        );
    }
}
