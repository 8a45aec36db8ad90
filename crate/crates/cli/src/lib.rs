//! Front end for the `skewcm` binary. Every subcommand renders into an
//! [`Outcome`] so the output can be tested without spawning a process.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use skewcm::classify::{power_of_two_decimal, ClassificationReport};
use skewcm::graph::parse_input;
use skewcm::mutation::{reduce_to_normal_form, reduce_to_point};
use skewcm::point_scheme::{components, format_pairs, theorem4_report, ComponentJson, PointSchemeJson};
use skewcm::verify::{Fault, Verifier};
use skewcm::{classify, CheckSuite, Error, Graph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INCONSISTENT: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "skewcm", version, about = "Stable categories of skew quadric hypersurfaces, computed from graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify the stable category: r, alpha, beta and D^b(mod k^(2^r)).
    Analyze(InputArgs),
    /// Reduce the graph to its normal form G(alpha, beta).
    Reduce {
        #[command(flatten)]
        input: InputArgs,
        /// Print the reduction steps.
        #[arg(long)]
        trace: bool,
        /// Continue with Knörrer and two points reductions down to one vertex.
        #[arg(long)]
        full: bool,
    },
    /// Point-scheme analysis: ell, J(G), i(G) and the bound C(r+1,2).
    Pointscheme {
        #[command(flatten)]
        input: InputArgs,
        /// List every irreducible component.
        #[arg(long)]
        components: bool,
    },
    /// Check the theorems over all graphs on n vertices, or random samples.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Graph or sign-matrix file; `-` reads stdin.
    pub input: PathBuf,
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum FaultArg {
    BrokenMutate,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub n: usize,
    /// `all` or a comma-separated list of check names.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Random mode: number of sampled graphs. Exhaustive when absent.
    #[arg(long)]
    pub samples: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    #[arg(long)]
    pub json: bool,
    /// Shrink the first failing graph to a locally minimal witness.
    #[arg(long)]
    pub minimize: bool,
    #[arg(long, value_enum, hide = true)]
    pub inject_fault: Option<FaultArg>,
}

/// Captured result of one invocation.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            stdout,
            stderr: String::new(),
            code: EXIT_OK,
        }
    }

    fn error(err: &Error) -> Self {
        let code = match err {
            Error::Parse { .. } | Error::InvalidEpsilon(_) | Error::EmptySuite => EXIT_PARSE,
            Error::CapExceeded { .. } => EXIT_CAP,
            _ => EXIT_INCONSISTENT,
        };
        Outcome {
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
            code,
        }
    }
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable");
    s.push('\n');
    s
}

fn read_graph(path: &PathBuf) -> Result<Graph, Outcome> {
    let text = if path.as_os_str() == "-" {
        std::io::read_to_string(std::io::stdin())
    } else {
        fs::read_to_string(path)
    }
    .map_err(|e| Outcome {
        stdout: String::new(),
        stderr: format!("error: {}: {e}\n", path.display()),
        code: EXIT_PARSE,
    })?;
    parse_input(&text).map_err(|e| {
        let mut out = Outcome::error(&e);
        out.stderr = format!("error: {}: {e}\n", path.display());
        out
    })
}

pub fn run(cli: Cli) -> Outcome {
    let result = match cli.command {
        Command::Analyze(input) => read_graph(&input.input).map(|g| analyze(&g, input.json)),
        Command::Reduce { input, trace, full } => {
            read_graph(&input.input).map(|g| reduce(&g, trace, full, input.json))
        }
        Command::Pointscheme { input, components } => {
            read_graph(&input.input).map(|g| pointscheme(&g, components, input.json))
        }
        Command::Verify(args) => Ok(verify(&args)),
    };
    result.unwrap_or_else(|failed| failed)
}

pub fn analyze(g: &Graph, as_json: bool) -> Outcome {
    let c = match classify(g) {
        Ok(c) => c,
        Err(e) => return Outcome::error(&e),
    };
    if as_json {
        return Outcome::ok(json(&ClassificationReport::from(&c)));
    }
    let modules = power_of_two_decimal(c.r).unwrap_or_else(|| format!("2^{}", c.r));
    Outcome::ok(format!(
        "r={}  alpha={}  beta={}  modules={}  category={}\n",
        c.r, c.alpha, c.beta, modules, c.category_descriptor
    ))
}

#[derive(Serialize)]
struct ReduceJson {
    n: usize,
    alpha: usize,
    beta: usize,
    normal_form: String,
    steps: Vec<String>,
    /// Final vertex (1-based) -> vertex of G(alpha,beta) (1-based).
    bijection: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    full_steps: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    multiplier_exponent: Option<usize>,
}

pub fn reduce(g: &Graph, with_trace: bool, full: bool, as_json: bool) -> Outcome {
    let nf = match reduce_to_normal_form(g) {
        Ok(nf) => nf,
        Err(e) => return Outcome::error(&e),
    };
    let point = if full {
        match reduce_to_point(g) {
            Ok(t) => Some(t),
            Err(e) => return Outcome::error(&e),
        }
    } else {
        None
    };
    let label = format!("G({},{})", nf.alpha, nf.beta);
    if as_json {
        return Outcome::ok(json(&ReduceJson {
            n: g.n(),
            alpha: nf.alpha,
            beta: nf.beta,
            normal_form: label,
            steps: nf.trace.steps().iter().map(ToString::to_string).collect(),
            bijection: nf.bijection.iter().map(|v| v + 1).collect(),
            full_steps: point.as_ref().map(|t| t.steps().iter().map(ToString::to_string).collect()),
            multiplier_exponent: point.as_ref().map(|t| t.multiplier_exponent()),
        }));
    }
    let mut out = format!(
        "normal_form={label}  alpha={}  beta={}  steps={}\n",
        nf.alpha,
        nf.beta,
        nf.trace.steps().len()
    );
    match (&point, with_trace) {
        (Some(t), true) => out.push_str(&t.to_text()),
        (None, true) => out.push_str(&nf.trace.to_text()),
        _ => {}
    }
    if let Some(t) = &point {
        out.push_str(&format!(
            "reduced to one vertex  multiplier=2^{}\n",
            t.multiplier_exponent()
        ));
    }
    Outcome::ok(out)
}

pub fn pointscheme(g: &Graph, with_components: bool, as_json: bool) -> Outcome {
    if g.n() < 3 {
        let mut out = Outcome::ok(if as_json {
            json(&serde_json::json!({ "n": g.n(), "ell": 0, "degenerate": true }))
        } else {
            "ell=0  degenerate=true\n".to_string()
        });
        out.stderr = "warning: fewer than 3 vertices, the point scheme has no cubic relations\n".into();
        return out;
    }
    let report = match theorem4_report(g) {
        Ok(r) => r,
        Err(e) => return Outcome::error(&e),
    };
    let comps = if with_components {
        match components(g) {
            Ok(c) => Some(c),
            Err(e) => return Outcome::error(&e),
        }
    } else {
        None
    };
    if as_json {
        let mut doc = PointSchemeJson::from(&report);
        doc.components = comps.as_ref().map(|cs| cs.iter().map(ComponentJson::from).collect());
        return Outcome::ok(json(&doc));
    }
    let mut out = format!(
        "ell={}  J={}  iso={}  r={}  bound={}  holds={}\n",
        report.ell,
        format_pairs(&report.j_pairs),
        report.iso_count,
        report.r,
        report.bound,
        report.bound_holds
    );
    if let Some(cs) = comps {
        out.push_str(&format!("components={}\n", cs.len()));
        for c in &cs {
            out.push_str(&format!("{c}  dim={}\n", c.dimension));
        }
    }
    Outcome::ok(out)
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let suite: CheckSuite = match args.suite.parse() {
        Ok(s) => s,
        Err(e) => return Outcome::error(&e),
    };
    let mut verifier = Verifier::new(suite);
    if let Some(FaultArg::BrokenMutate) = args.inject_fault {
        verifier = verifier.with_fault(Fault::BrokenMutate);
    }
    let report = match args.samples {
        Some(samples) => verifier.random(args.n, samples, args.seed, args.jobs),
        None => verifier.exhaustive(args.n, args.jobs),
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return Outcome::error(&e),
    };
    let mut stdout = if args.json {
        json(&report.to_json())
    } else {
        report.to_text()
    };
    if args.minimize && !args.json {
        if let Some(first) = report.failures.first() {
            if let Ok(witness) = verifier.minimize_failure(&first.graph, first.check) {
                stdout.push_str(&format!("minimized check={}\n", first.check));
                for line in witness.to_string().lines() {
                    stdout.push_str(&format!("  {line}\n"));
                }
            }
        }
    }
    Outcome {
        stdout,
        stderr: format!(
            "checked {} graphs in {:.3}s with {} job(s)\n",
            report.graphs_checked,
            report.wall_time.as_secs_f64(),
            args.jobs.max(1)
        ),
        code: if report.passed() { EXIT_OK } else { EXIT_INCONSISTENT },
    }
}
