//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use skewcm::mutation::{reduce_to_normal_form, Operation};
use skewcm::point_scheme::{
    choose2, components, count_p1_components, ell_closed_form, j_pairs, j_reduction_step, theorem4_report,
};
use skewcm::verify::{random_graph, Verifier};
use skewcm::{classify, Check, CheckSuite, Graph};

const BIN: &str = env!("CARGO_BIN_EXE_skewcm");

struct Verdict {
    ok: bool,
    detail: String,
}

fn verdict(ok: bool, detail: impl Into<String>) -> Verdict {
    Verdict { ok, detail: detail.into() }
}

fn ms(d: Duration) -> String {
    format!("{:.3} ms", d.as_secs_f64() * 1e3)
}

fn workers() -> usize {
    std::thread::available_parallelism().map_or(1, |p| p.get()).min(8)
}

fn square_with_tail() -> Graph {
    Graph::from_one_based_edges(5, &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 5)]).unwrap()
}

fn square_plus_two() -> Graph {
    Graph::from_one_based_edges(6, &[(1, 2), (2, 3), (3, 4), (4, 1)]).unwrap()
}

fn worked_classification() -> Verdict {
    let g = square_with_tail();
    let start = Instant::now();
    let c = classify(&g);
    let nf = reduce_to_normal_form(&g);
    let elapsed = start.elapsed();
    let (Ok(c), Ok(nf)) = (c, nf) else {
        return verdict(false, "classify or reduce returned an error");
    };
    let expected = vec![
        Operation::Mutate(0),
        Operation::RelativeMutate { target: 1, reference: 0 },
        Operation::RelativeMutate { target: 3, reference: 0 },
    ];
    let ok = c.r == 2
        && c.indecomposables_exponent == 2
        && c.category_descriptor == "D^b(mod k^4)"
        && (nf.alpha, nf.beta) == (1, 3)
        && nf.trace.steps() == expected.as_slice()
        && elapsed < Duration::from_millis(1);
    let trace = nf.trace.to_text().trim_end().replace('\n', ", ");
    verdict(
        ok,
        format!(
            "r={} modules=2^{} {} G({},{}) trace [{trace}] in {}",
            c.r,
            c.indecomposables_exponent,
            c.category_descriptor,
            nf.alpha,
            nf.beta,
            ms(elapsed)
        ),
    )
}

fn worked_point_scheme() -> Verdict {
    let g = square_plus_two();
    let start = Instant::now();
    let report = theorem4_report(&g);
    let comps = components(&g);
    let closed = ell_closed_form(&g);
    let elapsed = start.elapsed();
    let (Ok(report), Ok(comps), Ok(closed)) = (report, comps, closed) else {
        return verdict(false, "point scheme analysis returned an error");
    };
    let mut lines: Vec<Vec<usize>> = comps
        .iter()
        .filter(|c| c.facet.len() == 2)
        .map(|c| c.facet.iter().collect())
        .collect();
    lines.sort();
    let ok = report.ell == 3
        && report.j_pairs == [(0, 2), (1, 3)]
        && report.iso_count == 2
        && closed == 2 + choose2(2)
        && comps.len() == 11
        && lines == [vec![0, 2], vec![1, 3], vec![4, 5]]
        && elapsed < Duration::from_millis(10);
    verdict(
        ok,
        format!(
            "ell={} closed={} i={} components={} lines={} in {}",
            report.ell,
            closed,
            report.iso_count,
            comps.len(),
            lines.len(),
            ms(elapsed)
        ),
    )
}

fn two_step_j_reduction() -> Verdict {
    let g = square_plus_two();
    let ell0 = count_p1_components(&g);
    let Ok(first) = j_reduction_step(&g) else {
        return verdict(false, "first step failed");
    };
    let Ok(second) = j_reduction_step(&first.graph) else {
        return verdict(false, "second step failed");
    };
    let ell1 = count_p1_components(&first.graph);
    let ell2 = count_p1_components(&second.graph);
    let want1 = Graph::from_one_based_edges(6, &[(1, 2), (1, 4)]).unwrap();
    let shape = (second.graph.edge_count(), second.graph.isolated_count(), second.graph.isolated_edges().len());
    let ok = first.graph == want1
        && j_pairs(&first.graph) == [(1, 3)]
        && shape == (1, 4, 1)
        && ell0 <= ell1
        && ell1 <= ell2
        && ell2 == choose2(4)
        && ell0 == 3;
    verdict(ok, format!("ell chain {ell0} <= {ell1} <= {ell2} = C(4,2), second graph is G(1,4)-shaped: {}", shape == (1, 4, 1)))
}

fn complete_graph_parity() -> Verdict {
    let mut bad = Vec::new();
    for n in 1..=12 {
        match classify(&Graph::complete(n)) {
            Ok(c) if c.r == (n + 1) % 2 => {}
            _ => bad.push(n),
        }
    }
    verdict(bad.is_empty(), format!("K_1..K_12, mismatches {bad:?}"))
}

struct Sweep {
    counts: Vec<(Check, u64)>,
    graphs: u64,
    elapsed: Duration,
}

fn exhaustive_sweep(n: usize, checks: &[Check]) -> Sweep {
    let suite = CheckSuite::new(checks.iter().copied()).unwrap();
    let start = Instant::now();
    let report = Verifier::new(suite).exhaustive(n, workers()).unwrap();
    Sweep {
        counts: report.per_check.clone(),
        graphs: report.graphs_checked,
        elapsed: start.elapsed(),
    }
}

fn failures_of(sweep: &Sweep, check: Check) -> u64 {
    sweep.counts.iter().find(|(c, _)| *c == check).map_or(u64::MAX, |(_, k)| *k)
}

fn exhaustive_criterion(sweep: &Sweep, check: Check, limit: Option<Duration>) -> Verdict {
    let failures = failures_of(sweep, check);
    let in_time = limit.is_none_or(|l| sweep.elapsed < l);
    verdict(
        failures == 0 && in_time,
        format!(
            "{check} over {} graphs on 7 vertices, {failures} failures, sweep {:.2} s with {} worker(s)",
            sweep.graphs,
            sweep.elapsed.as_secs_f64(),
            workers()
        ),
    )
}

fn invariance_suite() -> Verdict {
    let checks = [
        Check::MutationRankInvariance,
        Check::RelativeMutationRankInvariance,
        Check::EllMutationInvariance,
        Check::InvolutionAndLocality,
        Check::JReductionMonotonicity,
    ];
    let start = Instant::now();
    let mut graphs = 0;
    let mut failures = 0;
    for n in 1..=6 {
        let sweep = exhaustive_sweep(n, &checks);
        graphs += sweep.graphs;
        failures += checks.iter().map(|&c| failures_of(&sweep, c)).sum::<u64>();
    }
    let elapsed = start.elapsed();
    verdict(
        failures == 0 && elapsed < Duration::from_secs(120),
        format!(
            "{} graphs for n=1..6, {failures} failures, {:.2} s",
            graphs,
            elapsed.as_secs_f64()
        ),
    )
}

/// A random graph on `n` vertices with vertex `index mod n` stripped of its
/// edges, so that the closed form applies.
fn planted(n: usize, seed: u64, index: u64) -> Graph {
    let g = random_graph(n, seed, index);
    let hole = (index % n as u64) as usize;
    let edges: Vec<_> = g.edges().filter(|&(a, b)| a != hole && b != hole).collect();
    Graph::from_edges(n, &edges).unwrap()
}

fn closed_form_agreement() -> Verdict {
    let mut applicable = 0u64;
    let mut failures = 0u64;
    for n in 3..=7 {
        let sweep = exhaustive_sweep(n, &[Check::EllClosedFormAgreement]);
        failures += failures_of(&sweep, Check::EllClosedFormAgreement);
        applicable += (0..1u64 << choose2(n))
            .filter(|&m| Graph::from_edge_mask(n, m).isolated_count() > 0)
            .count() as u64;
    }
    let verifier = Verifier::new(CheckSuite::single(Check::EllClosedFormAgreement));
    let mut random_failures = 0u64;
    let mut with_twins = 0u64;
    for index in 0..10_000 {
        let g = planted(16, 0x5eed, index);
        if !j_pairs(&g).is_empty() {
            with_twins += 1;
        }
        if verifier.run_check(&g, Check::EllClosedFormAgreement).is_err() {
            random_failures += 1;
        }
    }
    verdict(
        failures == 0 && random_failures == 0,
        format!(
            "{applicable} graphs with an isolated vertex for n=3..7 ({failures} failures), \
             10000 random n=16 graphs ({with_twins} with j>0, {random_failures} failures)"
        ),
    )
}

fn run_binary(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(BIN).args(args).output().expect("binary runs");
    (out.stdout, out.status.code().unwrap_or(-1))
}

fn determinism() -> Verdict {
    let dir = std::env::temp_dir().join(format!("skewcm-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let file = dir.join("graph.txt");
    std::fs::write(&file, planted(12, 3, 1).to_string()).unwrap();
    let path = file.to_str().unwrap();

    let mut mismatches = Vec::new();
    let reduce = run_binary(&["reduce", "--trace", "--full", path]);
    for _ in 0..3 {
        if run_binary(&["reduce", "--trace", "--full", path]) != reduce {
            mismatches.push("reduce".to_string());
        }
    }
    let runs: [&[&str]; 3] = [
        &["verify", "--n", "5"],
        &["verify", "--n", "16", "--samples", "300", "--seed", "9"],
        &["verify", "--n", "6", "--inject-fault", "broken-mutate", "--json"],
    ];
    for args in runs {
        let base = run_binary(&[args, &["--jobs", "1"]].concat());
        for jobs in ["1", "2", "3", "8"] {
            if run_binary(&[args, &["--jobs", jobs]].concat()) != base {
                mismatches.push(format!("{} --jobs {jobs}", args.join(" ")));
            }
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    verdict(
        mismatches.is_empty() && reduce.1 == 0,
        format!("reduce x4 and verify at --jobs 1,2,3,8, mismatches {mismatches:?}"),
    )
}

fn main() -> ExitCode {
    let sweep7 = exhaustive_sweep(7, &[Check::RouteAgreement, Check::RankFormula, Check::EllBound]);
    let limit = if workers() >= 8 { 300 } else { 1800 };
    let criteria: Vec<(&str, Verdict)> = vec![
        ("1 square-with-tail classification and trace", worked_classification()),
        ("2 point scheme of the square plus two points", worked_point_scheme()),
        ("3 two-step J-reduction", two_step_j_reduction()),
        ("4 complete graph baseline", complete_graph_parity()),
        (
            "5 nullity equals beta-1 for n=7",
            exhaustive_criterion(&sweep7, Check::RouteAgreement, Some(Duration::from_secs(limit))),
        ),
        ("6 rank equals 2alpha+2 for n=7", exhaustive_criterion(&sweep7, Check::RankFormula, None)),
        ("7 ell bound for n=7", exhaustive_criterion(&sweep7, Check::EllBound, None)),
        ("8 invariance suite for n<=6", invariance_suite()),
        ("9 closed form against facet count", closed_form_agreement()),
        ("10 byte-identical output across runs and jobs", determinism()),
    ];
    let mut failed = 0;
    for (name, v) in &criteria {
        println!("{} criterion {name}: {}", if v.ok { "PASS" } else { "FAIL" }, v.detail);
        failed += usize::from(!v.ok);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
