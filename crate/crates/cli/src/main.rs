use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};
use treeshift::minimality::{self, MinimalityReport, MinimalityVerdict};
use treeshift::oracle::{brute_force_count_with_budget, DEFAULT_ENUMERATION_BUDGET};
use treeshift::reduction::ReductionSpace;
use treeshift::{
    matrix, perron_analysis, poly, realize_tsft, tsft_entropy, verify_realization, EntropyOptions,
    IntMatrix, Pattern2, PatternList, Snre, TreeShiftSpec, VerifyOptions,
};

mod report;

use report::{envelope, Failure, Outcome};

#[derive(Parser)]
#[command(name = "treeshift", version, about = "Entropy of Markov tree-shifts of finite type")]
struct Cli {
    #[arg(long, value_enum, default_value_t = Format::Compact, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Compact,
    Pretty,
}

#[derive(Args)]
struct Input {
    /// Input document, or `-` for stdin.
    input: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Entropy as the best reduction, checked against the direct estimator.
    Entropy {
        #[command(flatten)]
        input: Input,
        /// Estimator depth.
        #[arg(long, default_value_t = 40)]
        nmax: usize,
        /// Allowed gap between spectral entropy and estimator tail.
        #[arg(long, default_value_t = 0.05)]
        tol: f64,
        /// Largest number of reductions evaluated exhaustively.
        #[arg(long, default_value_t = 1_000_000)]
        cap: u64,
        /// Emit the witness reduction as a specification document.
        #[arg(long)]
        witness: bool,
        /// Fail instead of sampling when the cap is exceeded.
        #[arg(long)]
        no_sample: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// The counting recursion and its first levels.
    Snre {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 5)]
        levels: usize,
        #[arg(long, default_value_t = treeshift::snre::DEFAULT_DIGIT_BUDGET)]
        digits: u64,
    },
    /// List reductions with their matrices and entropies.
    Reduce {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 100)]
        limit: u64,
        #[arg(long, default_value_t = 0)]
        offset: u128,
    },
    /// Compare the recursion with direct enumeration of blocks.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Block height, at least 2.
        #[arg(long, default_value_t = 3)]
        height: usize,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_BUDGET)]
        budget: u64,
    },
    /// Spectral radius, period and Perron check of a matrix.
    Perron {
        #[command(flatten)]
        input: Input,
    },
    /// Build a tree-shift whose entropy is ln of the matrix's spectral radius.
    Realize {
        #[command(flatten)]
        input: Input,
        /// Compute the entropy of the result and compare.
        #[arg(long)]
        verify: bool,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Effect of removing one allowed pattern.
    Minimality {
        #[command(flatten)]
        input: Input,
        /// Pattern fragment such as `["b", ["a", "a"]]`.
        #[arg(long, conflicts_with = "scan", required_unless_present = "scan")]
        pattern: Option<String>,
        /// Analyze every allowed pattern.
        #[arg(long)]
        scan: bool,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Entropy { .. } => "entropy",
            Command::Snre { .. } => "snre",
            Command::Reduce { .. } => "reduce",
            Command::Oracle { .. } => "oracle",
            Command::Perron { .. } => "perron",
            Command::Realize { .. } => "realize",
            Command::Minimality { .. } => "minimality",
        }
    }

    fn input(&self) -> &Input {
        match self {
            Command::Entropy { input, .. }
            | Command::Snre { input, .. }
            | Command::Reduce { input, .. }
            | Command::Oracle { input, .. }
            | Command::Perron { input }
            | Command::Realize { input, .. }
            | Command::Minimality { input, .. } => input,
        }
    }
}

fn read_input(input: &Input) -> Result<Vec<u8>, Failure> {
    let mut buf = Vec::new();
    let res = if input.input.as_os_str() == "-" {
        std::io::stdin().read_to_end(&mut buf).map(|_| ())
    } else {
        std::fs::read(&input.input).map(|b| buf = b)
    };
    res.map_err(|e| Failure::usage(format!("{}: {e}", input.input.display())))?;
    Ok(buf)
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("TREESHIFT_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .parse()
        .map_err(|_| Failure::usage(format!("TREESHIFT_THREADS={value:?} is not a count")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::usage(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let (input, outcome) = match configure_threads().and_then(|_| read_input(cli.command.input())) {
        Ok(bytes) => {
            let outcome = run(&cli.command, &bytes);
            (bytes, outcome)
        }
        Err(f) => (Vec::new(), Err(f)),
    };
    let (report, code) = match outcome {
        Ok(o) => (envelope(name, &input, o.result, o.diagnostics), o.code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            (envelope(name, &input, Value::Null, vec![format!("error: {}", f.message)]), f.code)
        }
    };
    let text = match cli.format {
        Format::Compact => serde_json::to_string(&report),
        Format::Pretty => serde_json::to_string_pretty(&report),
    }
    .expect("report serializes");
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{text}");
    ExitCode::from(code as u8)
}

fn run(command: &Command, input: &[u8]) -> Result<Outcome, Failure> {
    let text = std::str::from_utf8(input).map_err(|e| Failure::usage(e.to_string()))?;
    match command {
        Command::Entropy {
            nmax,
            tol,
            cap,
            witness,
            no_sample,
            seed,
            ..
        } => {
            let options = EntropyOptions {
                estimator_levels: *nmax,
                tolerance: *tol,
                reduction_cap: *cap,
                sample_beyond_cap: !no_sample,
                sample_seed: *seed,
            };
            entropy(text, &options, *witness)
        }
        Command::Snre { levels, digits, .. } => snre(text, *levels, *digits),
        Command::Reduce { limit, offset, .. } => reduce(text, *limit, *offset),
        Command::Oracle { height, budget, .. } => oracle(text, *height, *budget),
        Command::Perron { .. } => perron(text),
        Command::Realize { verify, tol, .. } => realize(text, *verify, *tol),
        Command::Minimality { pattern, scan, .. } => minimality(text, pattern.as_deref(), *scan),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("report serializes")
}

/// Parse a specification and drop symbols with no allowed tuple.
fn load_spec(text: &str, outcome_notes: &mut Vec<String>) -> Result<TreeShiftSpec, Failure> {
    let spec = TreeShiftSpec::parse(text).map_err(Failure::input)?;
    let (pruned, removed) = spec.prune_dead_symbols()?;
    if !removed.is_empty() {
        outcome_notes.push(format!("pruned symbols with no admissible subtree: {}", removed.join(", ")));
    }
    Ok(pruned)
}

fn load_matrix(text: &str) -> Result<IntMatrix, Failure> {
    let rows: Vec<Vec<i64>> = serde_json::from_str(text).map_err(|e| Failure::usage(e.to_string()))?;
    IntMatrix::from_rows(rows).map_err(Failure::input)
}

fn named_tuple(spec: &TreeShiftSpec, root: usize, tuple: &[usize]) -> Value {
    let names = spec.alphabet();
    json!([names.name(root), tuple.iter().map(|&c| names.name(c)).collect::<Vec<_>>()])
}

fn entropy(text: &str, options: &EntropyOptions, witness: bool) -> Result<Outcome, Failure> {
    let mut notes = Vec::new();
    let spec = load_spec(text, &mut notes)?;
    let snre = Snre::from_spec(&spec)?;
    let report = tsft_entropy(&snre, options)?;
    let mut result = to_json(&report);
    let patterns: Vec<Value> = report
        .witness
        .tuples
        .iter()
        .enumerate()
        .map(|(i, t)| named_tuple(&spec, i, t))
        .collect();
    result["witness"]["patterns"] = Value::Array(patterns.clone());
    if witness {
        result["witness_spec"] = json!({
            "d": spec.arity(),
            "alphabet": spec.alphabet().symbols(),
            "allowed": patterns,
        });
    }
    result["alphabet"] = json!(spec.alphabet().symbols());
    let mut outcome = Outcome::ok(result);
    outcome.diagnostics = notes;
    if report.raw_radius_diverges {
        outcome.note("effective radius differs from the unrestricted radius of some reduction");
    }
    if !report.agreement {
        outcome.note("estimator tail disagrees with the spectral entropy beyond tolerance");
    }
    if !report.exhaustive {
        outcome.note("reduction count exceeds the cap: sampled, entropy is a lower bound");
        outcome.code = 3;
    }
    Ok(outcome)
}

fn snre(text: &str, levels: usize, digits: u64) -> Result<Outcome, Failure> {
    let mut notes = Vec::new();
    let spec = load_spec(text, &mut notes)?;
    let snre = Snre::from_spec(&spec)?;
    let names = spec.alphabet();
    let exact = snre.evaluate_exact_with_budget(levels, digits)?;
    let equations: Vec<Value> = (0..snre.num_symbols())
        .map(|i| {
            json!({
                "symbol": names.name(i),
                "initial": snre.initial()[i],
                "terms": snre.terms(i).iter().map(|t| t.iter().map(|&c| names.name(c)).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let counts: Vec<Vec<String>> = (1..=levels)
        .map(|n| exact.level(n).iter().map(ToString::to_string).collect())
        .collect();
    let essential: Vec<&str> = snre.essential_symbols().iter().map(|&i| names.name(i)).collect();
    let mut outcome = Outcome::ok(json!({
        "arity": snre.arity(),
        "alphabet": names.symbols(),
        "equations": equations,
        "indicator_matrix": snre.indicator_matrix().rows(),
        "essential": essential,
        "counts": counts,
    }));
    outcome.diagnostics = notes;
    outcome.note("counts[n-1][i] is a_n for symbol i, the number of blocks of height n+1 rooted at i");
    Ok(outcome)
}

fn reduce(text: &str, limit: u64, offset: u128) -> Result<Outcome, Failure> {
    let mut notes = Vec::new();
    let spec = load_spec(text, &mut notes)?;
    let snre = Snre::from_spec(&spec)?;
    let space = ReductionSpace::new(&snre);
    let mut listed = Vec::new();
    for (n, r) in space.iter_from(offset).take(limit as usize).enumerate() {
        let e = r.entropy()?;
        listed.push(json!({
            "index": (offset + n as u128).to_string(),
            "patterns": r.tuples().iter().enumerate().map(|(i, t)| named_tuple(&spec, i, t)).collect::<Vec<_>>(),
            "matrix": r.weighted_adjacency(),
            "entropy": e.value,
            "effective_radius": e.effective_radius,
            "raw_radius": e.raw_radius,
        }));
    }
    let total = space.count().map_or_else(|| ">2^128".to_string(), |c| c.to_string());
    let mut outcome = Outcome::ok(json!({
        "alphabet": spec.alphabet().symbols(),
        "total": total,
        "offset": offset.to_string(),
        "reductions": listed,
    }));
    outcome.diagnostics = notes;
    Ok(outcome)
}

fn oracle(text: &str, height: usize, budget: u64) -> Result<Outcome, Failure> {
    if height < 2 {
        return Err(Failure::usage("--height must be at least 2"));
    }
    let mut notes = Vec::new();
    let spec = load_spec(text, &mut notes)?;
    let snre = Snre::from_spec(&spec)?;
    let brute = brute_force_count_with_budget(&spec, height, budget)?;
    let exact = snre.evaluate_exact(height - 1)?;
    let recursion: Vec<String> = exact.level(height - 1).iter().map(ToString::to_string).collect();
    let direct: Vec<String> = brute.counts.iter().map(ToString::to_string).collect();
    let mut outcome = Outcome::ok(json!({
        "alphabet": spec.alphabet().symbols(),
        "height": height,
        "level": height - 1,
        "brute_force": direct,
        "recursion": recursion,
        "match": direct == recursion,
    }));
    outcome.diagnostics = notes;
    outcome.note("blocks of height n are compared with recursion level n-1");
    Ok(outcome)
}

fn perron(text: &str) -> Result<Outcome, Failure> {
    let m = load_matrix(text)?;
    let analysis = perron_analysis(&m)?;
    let mut result = to_json(&analysis);
    result["char_poly_text"] = poly::format_poly(&analysis.char_poly).into();
    result["spectral_radius"] = json!(matrix::spectral_radius(&m)?);
    let mut outcome = Outcome::ok(result);
    if analysis.unit_radius {
        outcome.note("rho^p = 1: boundary case, not a Perron number");
    }
    Ok(outcome)
}

fn realize(text: &str, verify: bool, tol: f64) -> Result<Outcome, Failure> {
    let m = load_matrix(text)?;
    let (spec, plan) = realize_tsft(&m)?;
    let mut result = json!({
        "spec": spec.to_value(PatternList::Allowed),
        "plan": to_json(&plan),
    });
    if verify {
        let options = VerifyOptions {
            tolerance: tol,
            ..VerifyOptions::default()
        };
        let mut report = to_json(&verify_realization(&m, &options)?);
        report.as_object_mut().unwrap().remove("plan");
        result["verification"] = report;
    }
    let mut outcome = Outcome::ok(result);
    outcome.note("a(k+1) occurs V(i,k+1) times in the tuple of row i so that every tuple has d children");
    if !plan.zero_rows.is_empty() {
        outcome.note(format!(
            "zero rows {:?}: their two allowed patterns coincide, the allowed set has {} patterns",
            plan.zero_rows,
            plan.allowed.len()
        ));
    }
    Ok(outcome)
}

fn minimality(text: &str, pattern: Option<&str>, scan: bool) -> Result<Outcome, Failure> {
    let mut notes = Vec::new();
    let spec = load_spec(text, &mut notes)?;
    let options = EntropyOptions::default();
    let reports: Vec<MinimalityReport> = if scan {
        minimality::scan(&spec, &options)?
    } else {
        let p: Pattern2 = spec
            .parse_pattern(pattern.expect("clap requires --pattern without --scan"))
            .map_err(Failure::input)?;
        vec![minimality::entropy_drop_analysis(&spec, &p, &options)?]
    };
    for r in &reports {
        if r.verdict == MinimalityVerdict::OutOfHypothesis {
            notes.push(format!("{}: out-of-hypothesis", r.removed));
        }
        if r.h2_readings_differ {
            notes.push(format!("{}: H2 depends on whether dead symbols are pruned", r.removed));
        }
    }
    let result = if scan {
        json!({ "reports": to_json(&reports) })
    } else {
        to_json(&reports[0])
    };
    let mut outcome = Outcome::ok(result);
    outcome.diagnostics = notes;
    Ok(outcome)
}
