//! Exhaustive checks of statements about small line-divided sets.
//!
//! A [`LemmaSpec`] fixes the part sizes, what is assumed about `A`, whether
//! configurations with a divided 5-hole are excluded, and two predicates
//! evaluated on complete configurations. [`run_lemma`] quantifies over every
//! consistent signature, so a clean run covers every point set of that size
//! (and some non-realizable configurations besides).
//!
//! A divided 5-hole among the placed points survives every extension to the
//! right, so when such a hole either violates the hypothesis or implies the
//! conclusion the whole subtree is skipped.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::chirotope::{hull, is_convex_subset, Chirotope};
use crate::divided::{is_ell_critical_subset, star_apex, wedges, DividedSet, WedgeDecomposition};
use crate::enumerate::{collect_prefixes, explore_all, EnumerationOptions, SearchStats, SignatureSearch};
use crate::error::{Error, Result};
use crate::geometry::{shear_to_distinct_x, Point, PointSet, Rational};
use crate::holes::{has_hole_at, FanScratch, HoleIndex};
use crate::signature::{signature_of, PartialSignature, Signature};

/// A complete configuration as seen by lemma predicates.
pub struct Config<'a> {
    pub chi: &'a dyn Chirotope,
    pub split: usize,
    /// Some 5-hole has vertices on both sides of the line.
    pub divided_hole: bool,
}

impl Config<'_> {
    pub fn len(&self) -> usize {
        self.chi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chi.len() == 0
    }

    pub fn size_a(&self) -> usize {
        self.split
    }

    pub fn size_b(&self) -> usize {
        self.chi.len() - self.split
    }

    pub fn a_is_convex(&self) -> bool {
        is_convex_subset(self.chi, &(0..self.split).collect::<Vec<_>>())
    }

    pub fn wedges_at(&self, apex: usize) -> WedgeDecomposition {
        wedges(self.chi, self.split, apex)
    }

    /// Wedges around the rightmost inner point of `A`, if `A` has one.
    pub fn star_wedges(&self) -> Option<WedgeDecomposition> {
        star_apex(self.chi, self.split).map(|a| self.wedges_at(a))
    }
}

pub type Predicate = Arc<dyn Fn(&Config) -> bool + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PartPosition {
    Any,
    Convex,
    NotConvex,
}

#[derive(Clone)]
pub struct LemmaSpec {
    pub name: String,
    pub size_a: usize,
    pub size_b: usize,
    pub a_position: PartPosition,
    /// Only configurations without a divided 5-hole are considered.
    pub no_divided_hole: bool,
    pub hypothesis: Predicate,
    pub conclusion: Predicate,
    /// A divided 5-hole makes the conclusion true.
    pub hole_implies_conclusion: bool,
}

impl std::fmt::Debug for LemmaSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LemmaSpec")
            .field("name", &self.name)
            .field("size_a", &self.size_a)
            .field("size_b", &self.size_b)
            .field("a_position", &self.a_position)
            .field("no_divided_hole", &self.no_divided_hole)
            .finish_non_exhaustive()
    }
}

fn always() -> Predicate {
    Arc::new(|_| true)
}

fn has_divided_hole() -> Predicate {
    Arc::new(|c| c.divided_hole)
}

/// For every apex in `A`, every convex wedge holds at most two points of `B`.
fn convex_wedges_at_most_two(c: &Config) -> bool {
    (0..c.split).all(|a| {
        let wd = c.wedges_at(a);
        (1..=wd.wedge_count()).all(|k| !wd.is_convex(k) || wd.w(k) <= 2)
    })
}

/// For every apex whose non-convex wedge misses `B`, every wedge holds at
/// most two points of `B`.
fn wedges_at_most_two_if_nonconvex_empty(c: &Config) -> bool {
    (0..c.split).all(|a| {
        let wd = c.wedges_at(a);
        match wd.nonconvex_wedge() {
            Some(k) if wd.w(k) == 0 => wd.w.iter().all(|&w| w <= 2),
            _ => true,
        }
    })
}

fn two_two_adjacent(wd: &WedgeDecomposition) -> bool {
    (1..wd.t).any(|i| wd.w(i) == 2 && wd.w(i + 1) == 2)
}

/// `w_i = 2 = w_j` for some `i < j <= t` with every wedge strictly between
/// holding exactly one point.
fn two_ones_two(wd: &WedgeDecomposition) -> bool {
    (1..=wd.t).any(|i| {
        wd.w(i) == 2 && {
            let mut j = i + 1;
            while j <= wd.t && wd.w(j) == 1 {
                j += 1;
            }
            j <= wd.t && wd.w(j) == 2
        }
    })
}

/// Every run `W_i..W_j` (`j <= t`) of wedges with at most two points holds at
/// most `j - i + 2` points.
fn runs_bounded(wd: &WedgeDecomposition) -> bool {
    (1..=wd.t).all(|i| {
        let mut sum = 0;
        for j in i..=wd.t {
            if wd.w(j) > 2 {
                break;
            }
            sum += wd.w(j);
            if sum > j - i + 2 {
                return false;
            }
        }
        true
    })
}

/// Every `len` cyclically consecutive wedges whose union is convex and holds
/// at least four points of `B` have at most two points each.
fn convex_unions_at_most_two(c: &Config, wd: &WedgeDecomposition, len: usize) -> bool {
    let m = wd.wedge_count();
    if len >= m {
        return true;
    }
    (1..=m).all(|i| {
        let ks: Vec<usize> = (0..len).map(|d| (i - 1 + d) % m + 1).collect();
        let total: usize = ks.iter().map(|&k| wd.w(k)).sum();
        let convex = c.chi.orient(wd.apex, wd.a(i - 1), wd.a(i - 1 + len)) == crate::geometry::Orientation::Clockwise;
        !(convex && total >= 4) || ks.iter().all(|&k| wd.w(k) <= 2)
    })
}

fn is_critical(c: &Config) -> bool {
    let all: Vec<usize> = (0..c.len()).collect();
    is_ell_critical_subset(c.chi, &all, c.split)
}

impl LemmaSpec {
    fn base(name: &str, size_a: usize, size_b: usize) -> Self {
        LemmaSpec {
            name: name.to_string(),
            size_a,
            size_b,
            a_position: PartPosition::Any,
            no_divided_hole: false,
            hypothesis: always(),
            conclusion: always(),
            hole_implies_conclusion: false,
        }
    }

    /// `|A| = 5`, `|B| = 6`, `A` not in convex position: a divided 5-hole
    /// exists.
    pub fn lemma9() -> Self {
        LemmaSpec {
            name: "lemma9".into(),
            ..Self::lemma9_with_size_b(6)
        }
    }

    pub fn lemma9_with_size_b(size_b: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::NotConvex,
            conclusion: has_divided_hole(),
            hole_implies_conclusion: true,
            ..Self::base(&format!("lemma9(|B|={size_b})"), 5, size_b)
        }
    }

    /// `|A| = 5` convex, no divided 5-hole: every convex a-wedge of every
    /// `a` in `A` holds at most two points of `B`.
    pub fn lemma10(size_b: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::Convex,
            no_divided_hole: true,
            conclusion: Arc::new(convex_wedges_at_most_two),
            ..Self::base(&format!("lemma10(|B|={size_b})"), 5, size_b)
        }
    }

    /// `|A| = 6`, `|B| = 5`, no divided 5-hole: every convex a-wedge holds at
    /// most two points of `B`.
    pub fn lemma11() -> Self {
        Self::lemma11_with_size_b(5)
    }

    pub fn lemma11_with_size_b(size_b: usize) -> Self {
        LemmaSpec {
            no_divided_hole: true,
            conclusion: Arc::new(convex_wedges_at_most_two),
            ..Self::base(&format!("lemma11(|B|={size_b})"), 6, size_b)
        }
    }

    /// `|A|` in 5..=6 convex, `|B| = 4`, no divided 5-hole: if the
    /// non-convex a-wedge misses `B`, every a-wedge holds at most two points.
    pub fn lemma12(size_a: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::Convex,
            no_divided_hole: true,
            conclusion: Arc::new(wedges_at_most_two_if_nonconvex_empty),
            ..Self::base(&format!("lemma12(|A|={size_a})"), size_a, 4)
        }
    }

    /// As [`LemmaSpec::lemma12`] but without the empty non-convex wedge
    /// condition.
    pub fn lemma12_without_empty_wedge(size_a: usize) -> Self {
        LemmaSpec {
            name: format!("lemma12(|A|={size_a}, any non-convex wedge)"),
            conclusion: Arc::new(|c: &Config| {
                (0..c.split).all(|a| c.wedges_at(a).w.iter().all(|&w| w <= 2))
            }),
            ..Self::lemma12(size_a)
        }
    }

    /// `A` not convex, `|A|, |B| >= 5`, two adjacent star wedges with two
    /// points of `B` each: a divided 5-hole exists.
    pub fn lemma6(size_a: usize, size_b: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::NotConvex,
            hypothesis: Arc::new(|c: &Config| c.size_a() >= 5 && c.size_b() >= 5 && c.star_wedges().is_some_and(|wd| two_two_adjacent(&wd))),
            conclusion: has_divided_hole(),
            hole_implies_conclusion: true,
            ..Self::base(&format!("lemma6({size_a}/{size_b})"), size_a, size_b)
        }
    }

    /// `A` not convex, `|A| >= 5`, `|B| >= 6`, star wedges `2, 1, .., 1, 2`:
    /// a divided 5-hole exists.
    pub fn lemma7(size_a: usize, size_b: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::NotConvex,
            hypothesis: Arc::new(|c: &Config| c.size_a() >= 5 && c.size_b() >= 6 && c.star_wedges().is_some_and(|wd| two_ones_two(&wd))),
            conclusion: has_divided_hole(),
            hole_implies_conclusion: true,
            ..Self::base(&format!("lemma7({size_a}/{size_b})"), size_a, size_b)
        }
    }

    /// `A` not convex, no divided 5-hole, `|A| >= 5`, `|B| >= min_b`: every
    /// run of star wedges with at most two points each sums to at most its
    /// length plus one. The statement is made for `min_b = 6`.
    pub fn corollary8(size_a: usize, size_b: usize, min_b: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::NotConvex,
            no_divided_hole: true,
            hypothesis: Arc::new(move |c: &Config| c.size_a() >= 5 && c.size_b() >= min_b),
            conclusion: Arc::new(|c: &Config| c.star_wedges().is_some_and(|wd| runs_bounded(&wd))),
            ..Self::base(&format!("corollary8({size_a}/{size_b}, |B|>={min_b})"), size_a, size_b)
        }
    }

    /// `A` not convex, `|A| >= 6`, no divided 5-hole: `len` consecutive star
    /// wedges (3 or 4) with convex union holding at least four points of `B`
    /// have at most two points each.
    pub fn lemma13(size_a: usize, size_b: usize, len: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::NotConvex,
            no_divided_hole: true,
            hypothesis: Arc::new(|c: &Config| c.size_a() >= 6),
            conclusion: Arc::new(move |c: &Config| c.star_wedges().is_some_and(|wd| convex_unions_at_most_two(c, &wd, len))),
            ..Self::base(&format!("lemma13({size_a}/{size_b}, {len} wedges)"), size_a, size_b)
        }
    }

    /// ℓ-critical, no divided 5-hole, `|A| >= 6`: inner star wedges hold at
    /// most three points of `B`, and so do the outer ones when exactly two
    /// points of `A` are extremal.
    pub fn lemma14(size_a: usize, size_b: usize) -> Self {
        LemmaSpec {
            a_position: PartPosition::NotConvex,
            no_divided_hole: true,
            hypothesis: Arc::new(|c: &Config| c.size_a() >= 6 && is_critical(c)),
            conclusion: Arc::new(|c: &Config| {
                let Some(wd) = c.star_wedges() else { return false };
                let inner = (2..wd.t).all(|i| wd.w(i) <= 3);
                let all: Vec<usize> = (0..c.len()).collect();
                let extremal_a = hull(c.chi, &all).into_iter().filter(|&i| i < c.split).count();
                inner && (extremal_a != 2 || (wd.w(1) <= 3 && wd.w(wd.t) <= 3))
            }),
            ..Self::base(&format!("lemma14({size_a}/{size_b})"), size_a, size_b)
        }
    }

    /// The hole exclusion dropped from the hypothesis.
    pub fn without_hole_hypothesis(mut self) -> Self {
        self.no_divided_hole = false;
        self.name = format!("{} without the no-divided-5-hole hypothesis", self.name);
        self
    }

    /// The conclusion replaced by its negation.
    pub fn inverted(mut self) -> Self {
        let c = self.conclusion.clone();
        self.conclusion = Arc::new(move |cfg| !c(cfg));
        self.hole_implies_conclusion = false;
        self.name = format!("{} with inverted conclusion", self.name);
        self
    }

    pub fn n(&self) -> usize {
        self.size_a + self.size_b
    }

    fn prunes_on_hole(&self) -> bool {
        self.no_divided_hole || self.hole_implies_conclusion
    }

    /// Structural hypotheses plus the hypothesis predicate.
    pub fn hypothesis_holds(&self, c: &Config) -> bool {
        let pos_ok = match self.a_position {
            PartPosition::Any => true,
            PartPosition::Convex => c.a_is_convex(),
            PartPosition::NotConvex => !c.a_is_convex(),
        };
        pos_ok && !(self.no_divided_hole && c.divided_hole) && (self.hypothesis)(c)
    }

    pub fn is_counterexample(&self, c: &Config) -> bool {
        self.hypothesis_holds(c) && !(self.conclusion)(c)
    }

    /// Evaluates the statement on concrete coordinates; `None` when the
    /// hypothesis fails.
    pub fn check_divided_set(&self, d: &DividedSet) -> Option<bool> {
        if d.size_a() != self.size_a || d.size_b() != self.size_b {
            return None;
        }
        let index = HoleIndex::new(d.base());
        let cfg = Config {
            chi: d.base(),
            split: d.split(),
            divided_hole: index.first_hole(5, Some(d.split())).is_some(),
        };
        self.hypothesis_holds(&cfg).then(|| !(self.conclusion)(&cfg))
    }
}

/// A lemma search over signatures.
struct LemmaSearch<'a> {
    spec: &'a LemmaSpec,
    cap: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaTally {
    pub hypothesis_held: u64,
    pub counterexample_count: u64,
    /// Signature dumps of the first counterexamples in search order.
    pub counterexamples: Vec<String>,
}

impl LemmaTally {
    fn merge(&mut self, other: LemmaTally, cap: usize) {
        self.hypothesis_held += other.hypothesis_held;
        self.counterexample_count += other.counterexample_count;
        for c in other.counterexamples {
            if self.counterexamples.len() < cap {
                self.counterexamples.push(c);
            }
        }
    }
}

impl SignatureSearch for LemmaSearch<'_> {
    /// Whether a divided 5-hole is present among the placed points.
    type Level = bool;
    type Acc = LemmaTally;

    fn target(&self) -> usize {
        self.spec.n()
    }

    fn root(&self) -> bool {
        false
    }

    fn new_acc(&self) -> LemmaTally {
        LemmaTally::default()
    }

    fn descend(&self, ps: &PartialSignature, hole: bool, _: &mut LemmaTally, scratch: &mut FanScratch) -> Option<bool> {
        let m = ps.placed();
        let split = self.spec.size_a;
        let last = m - 1;
        if last < split {
            let convex = || hull(ps, &(0..m).collect::<Vec<_>>()).len() == m;
            match self.spec.a_position {
                PartPosition::Convex if m >= 4 && !convex() => return None,
                PartPosition::NotConvex if m == split && convex() => return None,
                _ => {}
            }
            return Some(hole);
        }
        let hole = hole || has_hole_at(ps, last, 5, Some(split), scratch);
        if hole && self.spec.prunes_on_hole() {
            return None;
        }
        Some(hole)
    }

    fn leaf(&self, ps: &PartialSignature, hole: bool, acc: &mut LemmaTally, _: &mut FanScratch) {
        let cfg = Config {
            chi: ps,
            split: self.spec.size_a,
            divided_hole: hole,
        };
        // the structural parts of the hypothesis were enforced on the way down
        if !(self.spec.no_divided_hole && hole) && (self.spec.hypothesis)(&cfg) {
            acc.hypothesis_held += 1;
            if !(self.spec.conclusion)(&cfg) {
                acc.counterexample_count += 1;
                if acc.counterexamples.len() < self.cap {
                    acc.counterexamples.push(ps.to_signature().to_dump());
                }
            }
        }
    }

    fn merge(&self, into: &mut LemmaTally, other: LemmaTally) {
        into.merge(other, self.cap);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Refuted,
    /// Stopped before covering the whole family without a counterexample.
    Incomplete,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub lemma: String,
    pub n: usize,
    pub split: usize,
    pub shards: usize,
    pub shard: usize,
    /// Complete configurations reached.
    pub visited: u64,
    pub hypothesis_held: u64,
    /// Subtrees skipped.
    pub pruned: u64,
    pub counterexample_count: u64,
    pub counterexamples: Vec<String>,
    /// Coordinates for the counterexamples at the same positions, where a
    /// realization was attempted and found.
    #[serde(default)]
    pub realizations: Vec<Option<String>>,
    pub complete: bool,
    pub verdict: Verdict,
    /// Wall time; excluded from equality checks between runs.
    #[serde(default)]
    pub elapsed_seconds: f64,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.verdict == Verdict::Verified
    }

    /// Equality ignoring wall time.
    pub fn same_outcome(&self, other: &VerificationReport) -> bool {
        let mut a = self.clone();
        let mut b = other.clone();
        a.elapsed_seconds = 0.0;
        b.elapsed_seconds = 0.0;
        a.counterexamples.sort();
        b.counterexamples.sort();
        a == b
    }

    fn from_parts(spec: &LemmaSpec, opts: &RunOptions, tally: LemmaTally, stats: SearchStats, complete: bool, elapsed: Duration) -> Self {
        let verdict = if tally.counterexample_count > 0 {
            Verdict::Refuted
        } else if complete {
            Verdict::Verified
        } else {
            Verdict::Incomplete
        };
        VerificationReport {
            lemma: spec.name.clone(),
            n: spec.n(),
            split: spec.size_a,
            shards: opts.shards,
            shard: opts.shard,
            visited: stats.leaves,
            hypothesis_held: tally.hypothesis_held,
            pruned: stats.pruned,
            counterexample_count: tally.counterexample_count,
            counterexamples: tally.counterexamples,
            realizations: Vec::new(),
            complete,
            verdict,
            elapsed_seconds: elapsed.as_secs_f64(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunOptions {
    pub shards: usize,
    pub shard: usize,
    /// Points placed before the tree is cut into jobs; chosen from `n` when
    /// absent.
    pub prefix_depth: Option<usize>,
    pub checkpoint: Option<PathBuf>,
    /// Jobs between checkpoint writes.
    pub batch: usize,
    /// Stop after the first job that produced a counterexample.
    pub stop_after_first: bool,
    pub mirror_symmetry: bool,
    /// Counterexamples kept in the report.
    pub keep: usize,
    /// Jobs explored by this call before it returns an incomplete report;
    /// with a checkpoint, the next call picks up from there.
    pub max_jobs: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            shards: 1,
            shard: 0,
            prefix_depth: None,
            checkpoint: None,
            batch: 256,
            stop_after_first: false,
            mirror_symmetry: false,
            keep: 16,
            max_jobs: None,
        }
    }
}

impl RunOptions {
    fn enumeration(&self, n: usize) -> EnumerationOptions {
        EnumerationOptions {
            mirror_symmetry: self.mirror_symmetry,
            prefix_depth: self.prefix_depth.unwrap_or(n.saturating_sub(3).max(2)),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    lemma: String,
    n: usize,
    split: usize,
    shards: usize,
    shard: usize,
    prefix_depth: usize,
    mirror_symmetry: bool,
    jobs: usize,
    done: usize,
    tally: LemmaTally,
    stats: SearchStats,
}

fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(text.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Runs one shard of the exhaustive search for `spec`, resuming from and
/// updating the checkpoint file when one is given.
pub fn run_lemma(spec: &LemmaSpec, opts: &RunOptions) -> Result<VerificationReport> {
    if opts.shards == 0 || opts.shard >= opts.shards {
        return Err(Error::Precondition(format!("shard {} of {} does not exist", opts.shard, opts.shards)));
    }
    if spec.size_a == 0 || spec.size_b == 0 || spec.n() > 12 {
        return Err(Error::Precondition(format!("unsupported sizes {}/{}", spec.size_a, spec.size_b)));
    }
    let start = Instant::now();
    let search = LemmaSearch { spec, cap: opts.keep };
    let eopts = opts.enumeration(spec.n());
    let (prefixes, top_tally, top_stats) = collect_prefixes(&search, eopts);
    let jobs: Vec<_> = prefixes
        .into_iter()
        .enumerate()
        .filter(|(i, _)| i % opts.shards == opts.shard)
        .map(|(_, p)| p)
        .collect();

    // work above the cut is the same for every shard; shard 0 reports it
    let (mut tally, mut stats) = if opts.shard == 0 {
        (top_tally, top_stats)
    } else {
        (LemmaTally::default(), SearchStats::default())
    };
    let mut done = 0;
    if let Some(path) = &opts.checkpoint {
        if path.exists() {
            let cp: Checkpoint = serde_json::from_str(&fs::read_to_string(path)?)?;
            let matches = cp.lemma == spec.name
                && cp.n == spec.n()
                && cp.split == spec.size_a
                && cp.shards == opts.shards
                && cp.shard == opts.shard
                && cp.prefix_depth == eopts.prefix_depth
                && cp.mirror_symmetry == eopts.mirror_symmetry
                && cp.jobs == jobs.len()
                && cp.done <= jobs.len();
            if !matches {
                return Err(Error::Checkpoint(format!("{} belongs to a different run", path.display())));
            }
            done = cp.done;
            tally = cp.tally;
            stats = cp.stats;
        }
    }

    // stopping is only checked between batches
    let batch = if opts.stop_after_first { 1 } else { opts.batch.max(1) };
    let limit = opts.max_jobs.map_or(jobs.len(), |m| (done + m).min(jobs.len()));
    while done < limit && !(opts.stop_after_first && tally.counterexample_count > 0) {
        let end = (done + batch).min(limit);
        let (t, s) = explore_all(&search, &jobs[done..end], eopts);
        tally.merge(t, opts.keep);
        stats.merge(s);
        done = end;
        if let Some(path) = &opts.checkpoint {
            let cp = Checkpoint {
                lemma: spec.name.clone(),
                n: spec.n(),
                split: spec.size_a,
                shards: opts.shards,
                shard: opts.shard,
                prefix_depth: eopts.prefix_depth,
                mirror_symmetry: eopts.mirror_symmetry,
                jobs: jobs.len(),
                done,
                tally: tally.clone(),
                stats,
            };
            write_atomically(path, &serde_json::to_string_pretty(&cp)?)?;
        }
    }
    let complete = done == jobs.len();
    Ok(VerificationReport::from_parts(spec, opts, tally, stats, complete, start.elapsed()))
}

/// Looks for coordinates of every reported counterexample, spending at most
/// `budget` on each.
pub fn attach_realizations(report: &mut VerificationReport, budget: Duration, seed: u64) -> Result<()> {
    report.realizations = report
        .counterexamples
        .iter()
        .map(|dump| Ok(realize(&dump.parse::<Signature>()?, budget, seed).map(|p| p.to_text())))
        .collect::<Result<_>>()?;
    Ok(())
}

/// Merges reports of the shards of one run.
pub fn merge_reports(parts: &[VerificationReport], keep: usize) -> Option<VerificationReport> {
    let first = parts.first()?.clone();
    let mut out = VerificationReport {
        shards: 1,
        shard: 0,
        visited: 0,
        hypothesis_held: 0,
        pruned: 0,
        counterexample_count: 0,
        counterexamples: Vec::new(),
        realizations: Vec::new(),
        elapsed_seconds: 0.0,
        ..first
    };
    let mut seen = vec![false; out_shards(parts)];
    for p in parts {
        out.visited += p.visited;
        out.hypothesis_held += p.hypothesis_held;
        out.pruned += p.pruned;
        out.counterexample_count += p.counterexample_count;
        out.counterexamples.extend(p.counterexamples.iter().cloned());
        out.elapsed_seconds += p.elapsed_seconds;
        if p.shard < seen.len() {
            seen[p.shard] = p.complete;
        }
    }
    out.counterexamples.truncate(keep);
    out.complete = seen.iter().all(|&s| s);
    out.verdict = if out.counterexample_count > 0 {
        Verdict::Refuted
    } else if out.complete {
        Verdict::Verified
    } else {
        Verdict::Incomplete
    };
    Some(out)
}

fn out_shards(parts: &[VerificationReport]) -> usize {
    parts.iter().map(|p| p.shards).max().unwrap_or(1)
}

/// Checks the statement on concrete point sets, each split after its first
/// `spec.size_a` points in x-order.
pub fn verify_point_sets<'a>(spec: &LemmaSpec, sets: impl IntoIterator<Item = &'a PointSet>) -> Result<VerificationReport> {
    let start = Instant::now();
    let mut tally = LemmaTally::default();
    let mut visited = 0;
    for set in sets {
        if set.len() != spec.n() {
            return Err(Error::Precondition(format!("expected {} points, found {}", spec.n(), set.len())));
        }
        visited += 1;
        let d = DividedSet::new(set.clone(), spec.size_a)?;
        match spec.check_divided_set(&d) {
            Some(true) => {
                tally.hypothesis_held += 1;
                tally.counterexample_count += 1;
                if tally.counterexamples.len() < 16 {
                    tally.counterexamples.push(signature_of(set).to_dump());
                }
            }
            Some(false) => tally.hypothesis_held += 1,
            None => {}
        }
    }
    let stats = SearchStats {
        leaves: visited,
        ..Default::default()
    };
    Ok(VerificationReport::from_parts(spec, &RunOptions::default(), tally, stats, true, start.elapsed()))
}

/// The distinct x-orders of `set` over all sweep directions, each returned
/// as an orientation-preserving image of `set` (a shear, optionally after a
/// half-turn) whose x-order is that order.
pub fn sweep_images(set: &PointSet) -> Vec<PointSet> {
    let pts = set.points();
    let n = pts.len();
    // the x-order under (x, y) -> (x + λ y, y) changes only where two points
    // get equal x, at λ = -(xi - xj) / (yi - yj)
    let mut critical: Vec<Rational> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if pts[i].y != pts[j].y {
                critical.push(-(pts[i].x.clone() - pts[j].x.clone()) / (pts[i].y.clone() - pts[j].y.clone()));
            }
        }
    }
    critical.sort();
    critical.dedup();
    let mut lambdas = Vec::new();
    let one = Rational::from_integer(1.into());
    let two = Rational::from_integer(2.into());
    match (critical.first(), critical.last()) {
        (Some(lo), Some(hi)) => {
            lambdas.push(lo.clone() - one.clone());
            for w in critical.windows(2) {
                lambdas.push((w[0].clone() + w[1].clone()) / two.clone());
            }
            lambdas.push(hi.clone() + one);
        }
        _ => lambdas.push(Rational::from_integer(0.into())),
    }
    let mut out = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for lambda in lambdas {
        for flip in [false, true] {
            let img: Vec<Point> = pts
                .iter()
                .map(|p| {
                    let x = p.x.clone() + lambda.clone() * p.y.clone();
                    if flip {
                        Point::new(-x, -p.y.clone())
                    } else {
                        Point::new(x, p.y.clone())
                    }
                })
                .collect();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&a, &b| img[a].x.cmp(&img[b].x));
            if !seen.insert(order) {
                continue;
            }
            if let Ok(s) = PointSet::new(img) {
                out.push(s);
            }
        }
    }
    out
}

/// Reads an order type database file: records of `n` points, each point
/// two little-endian unsigned integers of `bits` bits. Records whose
/// points share an x-coordinate are sheared to distinct x first.
pub fn import_order_type_corpus(path: &Path, n: usize, bits: u32) -> Result<Vec<PointSet>> {
    let bytes = fs::read(path)?;
    parse_order_type_corpus(&bytes, n, bits)
}

pub fn parse_order_type_corpus(bytes: &[u8], n: usize, bits: u32) -> Result<Vec<PointSet>> {
    let width = match bits {
        8 => 1,
        16 => 2,
        _ => return Err(Error::Corpus(format!("unsupported coordinate width {bits}"))),
    };
    let record = 2 * n * width;
    if n < 3 || !bytes.len().is_multiple_of(record) {
        return Err(Error::Corpus(format!(
            "file length {} is not a multiple of the record size {record}",
            bytes.len()
        )));
    }
    bytes
        .chunks(record)
        .enumerate()
        .map(|(r, chunk)| {
            let coord = |i: usize| -> i64 {
                if width == 1 {
                    chunk[i] as i64
                } else {
                    u16::from_le_bytes([chunk[2 * i], chunk[2 * i + 1]]) as i64
                }
            };
            let points: Vec<Point> = (0..n).map(|p| Point::from_ints(coord(2 * p), coord(2 * p + 1))).collect();
            let points = shear_to_distinct_x(&points).map_err(|e| Error::Corpus(format!("record {r}: {e}")))?;
            PointSet::new(points).map_err(|e| Error::Corpus(format!("record {r}: {e}")))
        })
        .collect()
}

/// Looks for integer coordinates realizing `sig` by random restarts and
/// single-point moves that never increase the number of wrong triples.
pub fn realize(sig: &Signature, budget: Duration, seed: u64) -> Option<PointSet> {
    let n = sig.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = Instant::now();
    let wrong = |xs: &[(i64, i64)]| -> usize {
        let mut bad = 0;
        for k in 2..n {
            for j in 1..k {
                for i in 0..j {
                    let (a, b, c) = (xs[i], xs[j], xs[k]);
                    let det = (b.0 - a.0) as i128 * (c.1 - a.1) as i128 - (b.1 - a.1) as i128 * (c.0 - a.0) as i128;
                    if det == 0 || (det > 0) != sig.sign(i, j, k) {
                        bad += 1;
                    }
                }
            }
        }
        bad
    };
    let range = 1_000i64;
    while start.elapsed() < budget {
        let mut xs: Vec<(i64, i64)> = (0..n).map(|i| (i as i64 * range, rng.gen_range(-range * n as i64..range * n as i64))).collect();
        let mut cost = wrong(&xs);
        let mut stale = 0;
        while cost > 0 && stale < 4000 && start.elapsed() < budget {
            let i = rng.gen_range(0..n);
            let old = xs[i];
            let lo = if i == 0 { old.0 - range } else { xs[i - 1].0 + 1 };
            let hi = if i + 1 == n { old.0 + range } else { xs[i + 1].0 - 1 };
            if lo > hi {
                continue;
            }
            let step = range * n as i64 / (1 + rng.gen_range(0..8));
            xs[i] = (rng.gen_range(lo..=hi), old.1 + rng.gen_range(-step..=step));
            let c = wrong(&xs);
            if c <= cost {
                stale = if c < cost { 0 } else { stale + 1 };
                cost = c;
            } else {
                xs[i] = old;
                stale += 1;
            }
        }
        if cost == 0 {
            let set = PointSet::from_ints(&xs).ok()?;
            debug_assert_eq!(&signature_of(&set), sig);
            return Some(set);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parabola(n: i64) -> PointSet {
        PointSet::from_ints(&(1..=n).map(|i| (i, i * i)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn small_lemma_runs_are_shard_independent() {
        let spec = LemmaSpec::lemma10(2);
        let whole = run_lemma(&spec, &RunOptions::default()).unwrap();
        assert!(whole.verified());
        let parts: Vec<_> = (0..3)
            .map(|shard| {
                run_lemma(
                    &spec,
                    &RunOptions {
                        shards: 3,
                        shard,
                        prefix_depth: Some(5),
                        ..Default::default()
                    },
                )
                .unwrap()
            })
            .collect();
        let merged = merge_reports(&parts, 16).unwrap();
        assert_eq!(merged.visited, whole.visited);
        assert_eq!(merged.hypothesis_held, whole.hypothesis_held);
        assert!(merged.verified());
    }

    #[test]
    fn inverted_conclusion_is_refuted() {
        let spec = LemmaSpec::lemma10(2).inverted();
        let r = run_lemma(&spec, &RunOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Refuted);
        assert_eq!(r.counterexample_count, r.hypothesis_held);
        let sig: Signature = r.counterexamples[0].parse().unwrap();
        assert!(sig.is_consistent());
    }

    #[test]
    fn geometric_check_on_convex_chain() {
        let d = DividedSet::new(parabola(11), 5).unwrap();
        // A is convex, so the hypothesis of the non-convex statement fails
        assert_eq!(LemmaSpec::lemma9().check_divided_set(&d), None);
        // every convex wedge at a point of a convex chain is a triangle-free
        // fan; the set has divided 5-holes, so the no-hole hypothesis fails
        assert_eq!(LemmaSpec::lemma10(6).check_divided_set(&d), None);
    }

    #[test]
    fn checkpoint_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cp.json");
        let spec = LemmaSpec::lemma12(5);
        let opts = RunOptions {
            checkpoint: Some(path.clone()),
            batch: 7,
            prefix_depth: Some(6),
            ..Default::default()
        };
        let first = run_lemma(&spec, &opts).unwrap();
        assert!(path.exists());
        // a rerun starts from the finished checkpoint and reports the same totals
        let again = run_lemma(&spec, &opts).unwrap();
        assert!(first.same_outcome(&again));
        let other = RunOptions {
            shards: 2,
            ..opts
        };
        assert!(matches!(run_lemma(&spec, &other), Err(Error::Checkpoint(_))));
    }

    #[test]
    fn interrupted_run_resumes() {
        let dir = tempfile::tempdir().unwrap();
        let spec = LemmaSpec::lemma12_without_empty_wedge(5);
        let base = RunOptions {
            prefix_depth: Some(6),
            batch: 5,
            keep: 1000,
            ..Default::default()
        };
        let whole = run_lemma(&spec, &base).unwrap();
        let opts = RunOptions {
            checkpoint: Some(dir.path().join("cp.json")),
            max_jobs: Some(12),
            ..base
        };
        let mut calls = 0;
        let last = loop {
            let r = run_lemma(&spec, &opts).unwrap();
            calls += 1;
            if r.complete {
                break r;
            }
        };
        assert!(calls > 2);
        assert!(whole.same_outcome(&last));
        assert_eq!(whole.counterexamples, last.counterexamples);
    }

    #[test]
    fn corpus_records() {
        let bytes: Vec<u8> = vec![0, 0, 4, 1, 2, 5, 0, 3, 4, 4, 9, 0];
        let sets = parse_order_type_corpus(&bytes, 3, 8).unwrap();
        assert_eq!(sets.len(), 2);
        // the second record has two points at x = 0 and 4 twice; the shear separates them
        assert!(sets.iter().all(|s| s.len() == 3));
        assert!(parse_order_type_corpus(&bytes[..11], 3, 8).is_err());
        let wide: Vec<u8> = [0u16, 0, 300, 7, 600, 1].iter().flat_map(|v| v.to_le_bytes()).collect();
        let sets = parse_order_type_corpus(&wide, 3, 16).unwrap();
        assert_eq!(sets[0].point(1), &Point::from_ints(300, 7));
        assert!(parse_order_type_corpus(&[0, 0, 0, 0, 1, 1], 3, 8).is_err());
    }

    #[test]
    fn sweep_images_cover_orders() {
        let s = PointSet::from_ints(&[(0, 0), (3, 1), (1, 4), (5, 3)]).unwrap();
        // a rotating sweep meets every pair twice, passing through 2 * C(4, 2) orders
        let imgs = sweep_images(&s);
        assert_eq!(imgs.len(), 12);
        let target = s.convex_hull().len();
        assert!(imgs.iter().all(|img| img.convex_hull().len() == target));
    }

    #[test]
    fn realizes_a_realizable_signature() {
        let s = PointSet::from_ints(&[(0, 0), (2, 5), (3, -1), (5, 2), (7, 6), (8, -3)]).unwrap();
        let sig = signature_of(&s);
        let found = realize(&sig, Duration::from_secs(5), 1).expect("realization");
        assert_eq!(signature_of(&found), sig);
    }
}
