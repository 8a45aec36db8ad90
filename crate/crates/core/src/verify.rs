//! Exhaustive and randomized theorem checking over graph space.
//!
//! Exhaustive runs walk the raw edge-mask space (no isomorphism reduction):
//! mask bit `k` is the `k`-th pair `(u, v)`, `u < v`, in lexicographic
//! order. The mask range is cut into contiguous chunks, one per worker, and
//! the per-worker results are concatenated in chunk order, so reports do not
//! depend on the worker count.

use std::cell::OnceCell;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gf2::{bordered_matrix, nullity, rank};
use crate::graph::{splitmix64, Graph, VertexSet};
use crate::mutation::{isolated_witness, mutate, reduce_to_normal_form, relative_mutate, NormalForm};
use crate::point_scheme::{choose2, count_p1_components, ell_closed_form, j_pairs, j_reduction_step};

/// Largest `n` accepted by [`verify_exhaustive`]; `2^C(8,2) = 2^28` graphs.
pub const EXHAUSTIVE_CAP: usize = 8;
/// Largest `n` accepted by [`verify_random`].
pub const RANDOM_CAP: usize = 64;
/// Failures kept in a report; the total is always counted.
pub const MAX_RECORDED_FAILURES: usize = 100;
/// Steps in each seeded walk of the `i_bound` check.
pub const WALK_LENGTH: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// `nullity(X(G)) = β - 1`.
    RouteAgreement,
    /// `rank(X(G)) = 2α + 2`.
    RankFormula,
    MutationRankInvariance,
    /// Only relative mutations with an isolated witness are tried.
    RelativeMutationRankInvariance,
    /// `ℓ(G) ≤ C(r+1, 2)`.
    EllBound,
    EllMutationInvariance,
    EllClosedFormAgreement,
    /// One `J(G)` reduction step: `j` drops, `ℓ` does not, and the exact
    /// count `ℓ' = j - C(m,2) + C(i+m-1, 2)` holds.
    JReductionMonotonicity,
    /// `i(G') ≤ β` along a seeded walk of sound mutations.
    IBound,
    InvolutionAndLocality,
}

impl Check {
    pub const ALL: [Check; 10] = [
        Check::RouteAgreement,
        Check::RankFormula,
        Check::MutationRankInvariance,
        Check::RelativeMutationRankInvariance,
        Check::EllBound,
        Check::EllMutationInvariance,
        Check::EllClosedFormAgreement,
        Check::JReductionMonotonicity,
        Check::IBound,
        Check::InvolutionAndLocality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::RouteAgreement => "route_agreement",
            Check::RankFormula => "rank_formula",
            Check::MutationRankInvariance => "mutation_rank_invariance",
            Check::RelativeMutationRankInvariance => "relative_mutation_rank_invariance",
            Check::EllBound => "ell_bound",
            Check::EllMutationInvariance => "ell_mutation_invariance",
            Check::EllClosedFormAgreement => "ell_closed_form_agreement",
            Check::JReductionMonotonicity => "j_reduction_monotonicity",
            Check::IBound => "i_bound",
            Check::InvolutionAndLocality => "involution_and_locality",
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Check {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::parse(1, format!("unknown check `{s}`")))
    }
}

/// Non-empty, sorted set of checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckSuite {
    checks: Vec<Check>,
}

impl CheckSuite {
    pub fn new(checks: impl IntoIterator<Item = Check>) -> Result<Self> {
        let mut checks: Vec<Check> = checks.into_iter().collect();
        checks.sort();
        checks.dedup();
        if checks.is_empty() {
            return Err(Error::EmptySuite);
        }
        Ok(CheckSuite { checks })
    }

    pub fn all() -> Self {
        CheckSuite {
            checks: Check::ALL.to_vec(),
        }
    }

    pub fn single(check: Check) -> Self {
        CheckSuite { checks: vec![check] }
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn contains(&self, check: Check) -> bool {
        self.checks.contains(&check)
    }
}

impl fmt::Display for CheckSuite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.checks.len() == Check::ALL.len() {
            return f.write_str("all");
        }
        let names: Vec<&str> = self.checks.iter().map(|c| c.name()).collect();
        f.write_str(&names.join(","))
    }
}

/// `all`, or a comma-separated list of check names.
impl FromStr for CheckSuite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "all" {
            return Ok(Self::all());
        }
        let checks = s
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(str::parse)
            .collect::<Result<Vec<Check>>>()?;
        CheckSuite::new(checks)
    }
}

/// Deliberate defects for exercising the harness itself.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fault {
    /// Mutation leaves the edge between `v` and the last other vertex alone.
    BrokenMutate,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub graph: Graph,
    pub check: Check,
    pub details: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Random { samples: u64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    pub mode: Mode,
    pub n: usize,
    pub suite: CheckSuite,
    pub graphs_checked: u64,
    /// Failing (graph, check) pairs, including those not recorded.
    pub failure_count: u64,
    /// Failing graphs per check, in suite order.
    pub per_check: Vec<(Check, u64)>,
    /// The first [`MAX_RECORDED_FAILURES`] failures in enumeration order.
    pub failures: Vec<Failure>,
    pub wall_time: Duration,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Line-oriented rendering. Deterministic: wall time is left out.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        match self.mode {
            Mode::Exhaustive => out.push_str(&format!(
                "verify mode=exhaustive n={} graphs={} suite={}\n",
                self.n, self.graphs_checked, self.suite
            )),
            Mode::Random { samples, seed } => out.push_str(&format!(
                "verify mode=random n={} samples={} seed={} graphs={} suite={}\n",
                self.n, samples, seed, self.graphs_checked, self.suite
            )),
        }
        for &(check, count) in &self.per_check {
            if count == 0 {
                out.push_str(&format!("check {check} ok\n"));
            } else {
                out.push_str(&format!("check {check} FAILED graphs={count}\n"));
            }
        }
        for (i, f) in self.failures.iter().enumerate() {
            out.push_str(&format!("failure {} check={}: {}\n", i + 1, f.check, f.details));
            for line in f.graph.to_string().lines() {
                out.push_str(&format!("  {line}\n"));
            }
        }
        out.push_str(&format!("failures={}\n", self.failure_count));
        out
    }

    pub fn to_json(&self) -> VerifyReportJson {
        VerifyReportJson {
            mode: self.mode,
            n: self.n,
            suite: self.suite.checks.clone(),
            graphs_checked: self.graphs_checked,
            failure_count: self.failure_count,
            per_check: self.per_check.iter().map(|&(check, failures)| CheckCount { check, failures }).collect(),
            failures: self
                .failures
                .iter()
                .map(|f| FailureJson {
                    check: f.check,
                    details: f.details.clone(),
                    graph: f.graph.to_string(),
                })
                .collect(),
            passed: self.passed(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckCount {
    pub check: Check,
    pub failures: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureJson {
    pub check: Check,
    pub details: String,
    /// The failing graph in the graph text format.
    pub graph: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReportJson {
    pub mode: Mode,
    pub n: usize,
    pub suite: Vec<Check>,
    pub graphs_checked: u64,
    pub failure_count: u64,
    pub per_check: Vec<CheckCount>,
    pub failures: Vec<FailureJson>,
    pub passed: bool,
}

/// Splits `0..total` into at most `jobs` contiguous, non-empty ranges.
pub fn partition(total: u64, jobs: usize) -> Vec<Range<u64>> {
    let jobs = jobs.max(1) as u64;
    let chunk = total.div_ceil(jobs).max(1);
    (0..jobs)
        .map(|i| (i * chunk).min(total)..((i + 1) * chunk).min(total))
        .filter(|r| !r.is_empty())
        .collect()
}

/// Per-graph quantities shared between checks.
struct Context<'a> {
    g: &'a Graph,
    normal_form: OnceCell<std::result::Result<NormalForm, String>>,
    rank: OnceCell<usize>,
    ell: OnceCell<usize>,
}

impl<'a> Context<'a> {
    fn new(g: &'a Graph) -> Self {
        Context {
            g,
            normal_form: OnceCell::new(),
            rank: OnceCell::new(),
            ell: OnceCell::new(),
        }
    }

    fn normal_form(&self) -> std::result::Result<&NormalForm, String> {
        self.normal_form
            .get_or_init(|| reduce_to_normal_form(self.g).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn rank(&self) -> usize {
        *self.rank.get_or_init(|| rank(&bordered_matrix(self.g)))
    }

    fn ell(&self) -> usize {
        *self.ell.get_or_init(|| count_p1_components(self.g))
    }
}

type CheckResult = std::result::Result<(), String>;

fn ensure(cond: bool, details: impl FnOnce() -> String) -> CheckResult {
    if cond {
        Ok(())
    } else {
        Err(details())
    }
}

/// Runs a [`CheckSuite`], optionally with an injected [`Fault`].
#[derive(Clone, Debug)]
pub struct Verifier {
    suite: CheckSuite,
    fault: Option<Fault>,
}

impl Verifier {
    pub fn new(suite: CheckSuite) -> Self {
        Verifier { suite, fault: None }
    }

    pub fn with_fault(mut self, fault: Fault) -> Self {
        self.fault = Some(fault);
        self
    }

    pub fn suite(&self) -> &CheckSuite {
        &self.suite
    }

    /// Mutation as seen by the checks; honours the injected fault.
    fn mu(&self, g: &Graph, v: usize) -> Graph {
        let mut h = mutate(g, v).expect("vertex in range");
        if self.fault == Some(Fault::BrokenMutate) && g.n() >= 3 {
            let w = if v == g.n() - 1 { g.n() - 2 } else { g.n() - 1 };
            h.set_edge(v, w, g.has_edge(v, w));
        }
        h
    }

    /// Every selected check that fails on `g`, with details.
    pub fn check_graph(&self, g: &Graph) -> Vec<(Check, String)> {
        let ctx = Context::new(g);
        self.suite
            .checks
            .iter()
            .filter_map(|&check| self.run(&ctx, check).err().map(|d| (check, d)))
            .collect()
    }

    pub fn run_check(&self, g: &Graph, check: Check) -> CheckResult {
        self.run(&Context::new(g), check)
    }

    fn run(&self, ctx: &Context<'_>, check: Check) -> CheckResult {
        let g = ctx.g;
        let n = g.n();
        match check {
            Check::RouteAgreement => {
                let nf = ctx.normal_form()?;
                let null = nullity(&bordered_matrix(g));
                ensure(null + 1 == nf.beta, || {
                    format!("nullity(X)={null} but beta={}", nf.beta)
                })
            }
            Check::RankFormula => {
                let nf = ctx.normal_form()?;
                let rk = ctx.rank();
                ensure(rk == 2 * nf.alpha + 2, || format!("rank(X)={rk} but alpha={}", nf.alpha))
            }
            Check::MutationRankInvariance => {
                let rk = ctx.rank();
                for v in 0..n {
                    let after = rank(&bordered_matrix(&self.mu(g, v)));
                    ensure(after == rk, || format!("rank(X) {rk} -> {after} under mu {}", v + 1))?;
                }
                Ok(())
            }
            Check::RelativeMutationRankInvariance => {
                let rk = ctx.rank();
                for v in 0..n {
                    for u in (0..n).filter(|&u| u != v) {
                        if isolated_witness(g, v, u).is_none() {
                            continue;
                        }
                        let h = relative_mutate(g, v, u).map_err(|e| e.to_string())?;
                        let after = rank(&bordered_matrix(&h));
                        ensure(after == rk, || {
                            format!("rank(X) {rk} -> {after} under rmu {} <- {}", v + 1, u + 1)
                        })?;
                    }
                }
                Ok(())
            }
            Check::EllBound => {
                if n < 3 {
                    return Ok(());
                }
                let r = n + 1 - ctx.rank();
                let ell = ctx.ell();
                ensure(ell <= choose2(r + 1), || format!("ell={ell} exceeds C({},2) with r={r}", r + 1))
            }
            Check::EllMutationInvariance => {
                if n < 3 {
                    return Ok(());
                }
                let ell = ctx.ell();
                for v in 0..n {
                    let after = count_p1_components(&self.mu(g, v));
                    ensure(after == ell, || format!("ell {ell} -> {after} under mu {}", v + 1))?;
                }
                Ok(())
            }
            Check::EllClosedFormAgreement => {
                if n < 3 || g.isolated_count() == 0 {
                    return Ok(());
                }
                let closed = ell_closed_form(g).map_err(|e| e.to_string())?;
                let ell = ctx.ell();
                ensure(closed == ell, || format!("closed form {closed} but facet count {ell}"))
            }
            Check::JReductionMonotonicity => {
                let iso = g.isolated_count();
                let j = j_pairs(g).len();
                if n < 3 || iso == 0 || j == 0 {
                    return Ok(());
                }
                let step = j_reduction_step(g).map_err(|e| e.to_string())?;
                let m = step.m();
                let ell = ctx.ell();
                let j_after = j_pairs(&step.graph).len();
                let ell_after = count_p1_components(&step.graph);
                let iso_after = step.graph.isolated_count();
                ensure(j_after < j, || format!("j {j} -> {j_after} did not drop"))?;
                ensure(ell_after >= ell, || format!("ell {ell} -> {ell_after} decreased"))?;
                ensure(iso_after == iso + m - 1, || {
                    format!("i {iso} -> {iso_after}, expected {}", iso + m - 1)
                })?;
                let predicted = j + choose2(iso + m - 1) - choose2(m);
                ensure(ell_after == predicted, || {
                    format!("ell after step {ell_after}, predicted j - C(m,2) + C(i+m-1,2) = {predicted} (m={m})")
                })
            }
            Check::IBound => {
                let beta = ctx.normal_form()?.beta;
                let mut cur = g.clone();
                let mut rng = ChaCha8Rng::seed_from_u64(g.fingerprint());
                for step in 0..=WALK_LENGTH {
                    let iso = cur.isolated_count();
                    ensure(iso <= beta, || format!("i={iso} exceeds beta={beta} after {step} walk steps"))?;
                    if step == WALK_LENGTH || n < 2 {
                        break;
                    }
                    let v = rng.gen_range(0..n);
                    let u = (v + rng.gen_range(1..n)) % n;
                    cur = if rng.gen_bool(0.5) && isolated_witness(&cur, v, u).is_some() {
                        relative_mutate(&cur, v, u).map_err(|e| e.to_string())?
                    } else {
                        self.mu(&cur, v)
                    };
                }
                Ok(())
            }
            Check::InvolutionAndLocality => {
                for v in 0..n {
                    let h = self.mu(g, v);
                    ensure(self.mu(&h, v) == *g, || format!("mu {} is not an involution", v + 1))?;
                    for a in 0..n {
                        for b in a + 1..n {
                            let incident = a == v || b == v;
                            let flipped = h.has_edge(a, b) != g.has_edge(a, b);
                            ensure(flipped == incident, || {
                                format!("mu {} mishandles pair {}{}", v + 1, a + 1, b + 1)
                            })?;
                        }
                    }
                    for u in (0..n).filter(|&u| u != v) {
                        let h = relative_mutate(g, v, u).map_err(|e| e.to_string())?;
                        for w in (0..n).filter(|&w| w != v) {
                            let mut before = VertexSet::from_words(n, g.row(w).to_vec());
                            let mut after = VertexSet::from_words(n, h.row(w).to_vec());
                            before.remove(v);
                            after.remove(v);
                            ensure(before == after, || {
                                format!("rmu {} <- {} changed N({}) away from {}", v + 1, u + 1, w + 1, v + 1)
                            })?;
                        }
                    }
                }
                Ok(())
            }
        }
    }

    /// Checks every graph on `n` vertices, split over `jobs` workers.
    pub fn exhaustive(&self, n: usize, jobs: usize) -> Result<VerifyReport> {
        if n > EXHAUSTIVE_CAP {
            return Err(Error::CapExceeded { n, cap: EXHAUSTIVE_CAP });
        }
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let total = 1u64 << (n * (n - 1) / 2);
        self.run_partitioned(Mode::Exhaustive, n, total, jobs, |mask| Graph::from_edge_mask(n, mask))
    }

    /// Checks `samples` uniformly random graphs. Sample `i` is drawn from
    /// its own ChaCha stream, so the result depends only on `seed`.
    pub fn random(&self, n: usize, samples: u64, seed: u64, jobs: usize) -> Result<VerifyReport> {
        if n > RANDOM_CAP {
            return Err(Error::CapExceeded { n, cap: RANDOM_CAP });
        }
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        self.run_partitioned(Mode::Random { samples, seed }, n, samples, jobs, |i| {
            random_graph(n, seed, i)
        })
    }

    fn run_partitioned(
        &self,
        mode: Mode,
        n: usize,
        total: u64,
        jobs: usize,
        make: impl Fn(u64) -> Graph + Sync,
    ) -> Result<VerifyReport> {
        let start = Instant::now();
        let ranges = partition(total, jobs);
        let partials: Vec<Partial> = std::thread::scope(|scope| {
            let handles: Vec<_> = ranges
                .iter()
                .map(|range| {
                    let range = range.clone();
                    let make = &make;
                    scope.spawn(move || self.run_range(range, make))
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("verifier worker panicked")).collect()
        });

        let mut per_check: Vec<(Check, u64)> = self.suite.checks.iter().map(|&c| (c, 0)).collect();
        let mut failures = Vec::new();
        let mut failure_count = 0;
        for part in partials {
            failure_count += part.failure_count;
            for (slot, count) in per_check.iter_mut().zip(part.per_check) {
                slot.1 += count;
            }
            let room = MAX_RECORDED_FAILURES - failures.len();
            failures.extend(part.failures.into_iter().take(room));
        }
        Ok(VerifyReport {
            mode,
            n,
            suite: self.suite.clone(),
            graphs_checked: total,
            failure_count,
            per_check,
            failures,
            wall_time: start.elapsed(),
        })
    }

    fn run_range(&self, range: Range<u64>, make: &impl Fn(u64) -> Graph) -> Partial {
        let mut part = Partial {
            failure_count: 0,
            per_check: vec![0; self.suite.checks.len()],
            failures: Vec::new(),
        };
        for idx in range {
            let g = make(idx);
            for (check, details) in self.check_graph(&g) {
                part.failure_count += 1;
                let slot = self.suite.checks.iter().position(|&c| c == check).expect("selected");
                part.per_check[slot] += 1;
                if part.failures.len() < MAX_RECORDED_FAILURES {
                    part.failures.push(Failure {
                        graph: g.clone(),
                        check,
                        details,
                    });
                }
            }
        }
        part
    }

    /// Greedily deletes vertices while `check` keeps failing.
    pub fn minimize_failure(&self, g: &Graph, check: Check) -> Result<Graph> {
        if self.run_check(g, check).is_ok() {
            return Err(Error::NotFailing(check.name().to_string()));
        }
        Ok(shrink_while(g, |h| self.run_check(h, check).is_err()))
    }
}

/// Deletes vertices, highest label first, as long as `failing` still holds
/// for the smaller graph. Never goes below one vertex.
pub fn shrink_while(g: &Graph, failing: impl Fn(&Graph) -> bool) -> Graph {
    let mut cur = g.clone();
    'shrink: while cur.n() > 1 {
        for v in (0..cur.n()).rev() {
            let gone = VertexSet::from_vertices(cur.n(), [v]).expect("in range");
            let (smaller, _) = cur.remove_vertices(&gone);
            if failing(&smaller) {
                cur = smaller;
                continue 'shrink;
            }
        }
        break;
    }
    cur
}

struct Partial {
    failure_count: u64,
    per_check: Vec<u64>,
    failures: Vec<Failure>,
}

/// Graph number `index` of the random stream for `seed`: each of the
/// `C(n,2)` edges is present with probability 1/2.
pub fn random_graph(n: usize, seed: u64, index: u64) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(splitmix64(index));
    let mut g = Graph::empty(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<bool>() {
                g.add_edge(u, v);
            }
        }
    }
    g
}

pub fn verify_exhaustive(n: usize, suite: CheckSuite, jobs: usize) -> Result<VerifyReport> {
    Verifier::new(suite).exhaustive(n, jobs)
}

pub fn verify_random(n: usize, samples: u64, seed: u64, suite: CheckSuite) -> Result<VerifyReport> {
    Verifier::new(suite).random(n, samples, seed, 1)
}

pub fn minimize_failure(g: &Graph, check: Check) -> Result<Graph> {
    Verifier::new(CheckSuite::single(check)).minimize_failure(g, check)
}
