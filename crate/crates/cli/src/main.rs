use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use wmatch::alphabet::all_patterns;
use wmatch::ingest::{read_text, TextFormat};
use wmatch::models::{HmmDoc, MarkovDoc};
use wmatch::serialize::{to_dot, MachineDoc};
use wmatch::table::table_row;
use wmatch::validate::Counterexample;
use wmatch::{
    asymptotic_speed, build_classic, canonicalize, check_validity_standard, compact,
    compute_mnshft, empirical_speed, expand, fit_iid, optimize, positify, standardize,
    validate_bruteforce, Algorithm, Alphabet, BruteVerdict, Error, IidModel, Machine, Pattern,
    Provenance, SearchConfig, Strategy, TableSpec, TextModel, Validity,
};

#[derive(Parser)]
#[command(
    name = "wmatch",
    version,
    about = "Build, transform, validate and measure w-matching machines"
)]
struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for table and ingest (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Only print primary output.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a classic machine for a pattern.
    Build {
        algorithm: String,
        pattern: String,
        #[arg(long, default_value = "ab")]
        alphabet: String,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Convert a machine document to JSON or DOT.
    Export {
        machine: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: ExportFormat,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Decide validity with the standard-machine criterion or by enumeration.
    Validate {
        machine: PathBuf,
        #[arg(long, value_enum, default_value = "theorem")]
        mode: ValidateMode,
        /// Longest text enumerated exhaustively.
        #[arg(long, default_value_t = 8)]
        exhaustive_len: usize,
        /// Random texts tried after the enumeration.
        #[arg(long, default_value_t = 0)]
        trials: usize,
        #[arg(long, default_value_t = 64)]
        trial_len: usize,
    },
    /// Asymptotic speed under a text model, optionally with an empirical estimate.
    Speed {
        machine: PathBuf,
        /// iid:SPEC, markov:FILE or hmm:FILE
        #[arg(long, default_value = "iid:")]
        model: String,
        /// Text length, repetitions and optional seed of the empirical estimate.
        #[arg(long, num_args = 2..=3, value_names = ["LEN", "REPS", "SEED"])]
        empirical: Option<Vec<u64>>,
    },
    /// Apply one transformation and write the result.
    Pipeline {
        machine: PathBuf,
        #[arg(long, value_enum)]
        stage: Stage,
        /// iid:SPEC; required by canonicalize, used for the speed summary otherwise.
        #[arg(long)]
        model: Option<String>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Search for the fastest valid machine of a given order.
    Optimize {
        pattern: String,
        #[arg(long, default_value = "ab")]
        alphabet: String,
        #[arg(long)]
        order: usize,
        #[arg(long, default_value = "iid:")]
        model: String,
        #[arg(long, value_enum, default_value = "exhaustive")]
        strategy: StrategyArg,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        /// Assemblies the exhaustive search may examine.
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Speeds of canonicalized classic machines, one row per pattern.
    Table {
        /// Comma-separated patterns.
        #[arg(long, conflicts_with = "length", required_unless_present = "length")]
        patterns: Option<String>,
        /// Use every pattern of this length.
        #[arg(long)]
        length: Option<usize>,
        #[arg(long, default_value = "ab")]
        alphabet: String,
        #[arg(long, default_value = "naive,mp,kmp,horspool,quicksearch")]
        algorithms: String,
        #[arg(long, default_value = "iid:")]
        model: String,
        /// Order of an extra optimal column.
        #[arg(long)]
        optimal: Option<usize>,
        #[arg(long, default_value_t = 50)]
        restarts: usize,
        #[arg(long, default_value_t = 10_000_000)]
        cap: u64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Measure machines on a real text against a fitted iid model.
    Ingest {
        text: PathBuf,
        #[arg(long, value_enum, default_value = "plain")]
        format: FormatArg,
        #[arg(long, default_value = "acgt")]
        alphabet: String,
        /// File with one pattern per line.
        #[arg(long)]
        patterns: PathBuf,
        /// Comma-separated classic algorithms, or "optimal".
        #[arg(long, default_value = "naive,mp,kmp,horspool,quicksearch")]
        machines: String,
        /// Order of the optimal machines (default |w| - 1).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExportFormat {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ValidateMode {
    Theorem,
    Bruteforce,
}

#[derive(Clone, Copy, ValueEnum)]
enum Stage {
    Expand,
    Compact,
    Standardize,
    Positify,
    Canonicalize,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    HillClimb,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Plain,
    Fasta,
}

/// A negative verdict, reported with exit code 1.
#[derive(Debug)]
struct Negative;

impl std::fmt::Display for Negative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("negative verdict")
    }
}

impl std::error::Error for Negative {}

/// Optimizer output: the machine with its state memories, and how it was found.
#[derive(Serialize, Deserialize)]
struct OptimumDoc {
    machine: MachineDoc,
    provenance: Provenance,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is::<Negative>() => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<Error>() {
                Some(Error::Cap(_)) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Build {
            algorithm,
            pattern,
            alphabet,
            out,
        } => {
            let alg: Algorithm = algorithm.parse()?;
            let w = Pattern::new(Alphabet::parse(alphabet)?, pattern)?;
            let m = build_classic(alg, &w);
            emit(out.as_deref(), &machine_json(&m))?;
            info(cli, format!("{alg} for \"{w}\": {} states", m.len()));
            Ok(())
        }
        Command::Export {
            machine,
            format,
            out,
        } => {
            let m = load_machine(machine)?;
            let s = match format {
                ExportFormat::Json => machine_json(&m),
                ExportFormat::Dot => to_dot(&m),
            };
            emit(out.as_deref(), &s)
        }
        Command::Validate {
            machine,
            mode,
            exhaustive_len,
            trials,
            trial_len,
        } => {
            let m = load_machine(machine)?;
            match mode {
                ValidateMode::Theorem => {
                    let v = check_validity_standard(&m).map_err(|e| match e {
                        Error::Domain(s) => anyhow!("precondition failed: {s}"),
                        e => e.into(),
                    })?;
                    println!("{v}");
                    if v == Validity::Valid {
                        return Ok(());
                    }
                    if let Ok(BruteVerdict::Counterexample(c)) =
                        validate_bruteforce(&m, *exhaustive_len, 0, 0, 0)
                    {
                        print_witness(&m, &c);
                    }
                    Err(Negative.into())
                }
                ValidateMode::Bruteforce => {
                    match validate_bruteforce(&m, *exhaustive_len, *trials, *trial_len, cli.seed)? {
                        BruteVerdict::NoCounterexample => {
                            println!("no counterexample (texts up to length {exhaustive_len}, {trials} random texts)");
                            Ok(())
                        }
                        BruteVerdict::Counterexample(c) => {
                            println!("invalid");
                            print_witness(&m, &c);
                            Err(Negative.into())
                        }
                    }
                }
            }
        }
        Command::Speed {
            machine,
            model,
            empirical,
        } => {
            let m = load_machine(machine)?;
            let model = parse_model(model, m.alphabet())?;
            println!("speed\t{:.12}", asymptotic_speed(&m, &model)?);
            if let Some(e) = empirical {
                let (len, reps) = (e[0] as usize, e[1] as usize);
                let seed = e.get(2).copied().unwrap_or(cli.seed);
                let s = empirical_speed(&m, &model, len, reps, seed)?;
                println!(
                    "empirical\t{:.12}\t± {:.3e}\t({reps} texts of length {len}, seed {seed})",
                    s.mean, s.std_error
                );
            }
            Ok(())
        }
        Command::Pipeline {
            machine,
            stage,
            model,
            out,
        } => {
            let m = load_machine(machine)?;
            let model = model
                .as_deref()
                .map(|s| parse_iid(s, m.alphabet()))
                .transpose()?;
            let r = match stage {
                Stage::Expand => expand(&m).machine,
                Stage::Compact => compact(&m),
                Stage::Standardize => standardize(&m),
                Stage::Positify => positify(&m, &compute_mnshft(&m))?,
                Stage::Canonicalize => {
                    let model = model.as_ref().context("canonicalize needs --model")?;
                    canonicalize(&m, model)?
                }
            };
            emit(out.as_deref(), &machine_json(&r))?;
            let mut summary = format!("states {} -> {}", m.len(), r.len());
            if let Some(model) = &model {
                let a = wmatch::asymptotic_speed_iid(&m, model)?;
                let b = wmatch::asymptotic_speed_iid(&r, model)?;
                let _ = write!(summary, "; speed {a:.6} -> {b:.6}");
            }
            info(cli, summary);
            Ok(())
        }
        Command::Optimize {
            pattern,
            alphabet,
            order,
            model,
            strategy,
            restarts,
            cap,
            out,
        } => {
            let w = Pattern::new(Alphabet::parse(alphabet)?, pattern)?;
            let model = parse_iid(model, w.alphabet())?;
            let config = SearchConfig {
                strategy: match strategy {
                    StrategyArg::Exhaustive => Strategy::Exhaustive,
                    StrategyArg::HillClimb => Strategy::HillClimb,
                },
                restarts: *restarts,
                seed: cli.seed,
                assembly_cap: *cap,
                ..SearchConfig::default()
            };
            let o = optimize(&w, *order, &model, &config).map_err(|e| match e {
                Error::Cap(s) => anyhow::Error::from(Error::Cap(format!("{s}, or raise --cap"))),
                e => e.into(),
            })?;
            let doc = OptimumDoc {
                machine: MachineDoc::from_machine(&o.machine).with_memory(&o.memory, w.alphabet()),
                provenance: o.provenance,
            };
            emit(
                out.as_deref(),
                &(serde_json::to_string_pretty(&doc)? + "\n"),
            )?;
            info(
                cli,
                format!("speed {:.6} with {} states", o.speed, o.machine.len()),
            );
            Ok(())
        }
        Command::Table {
            patterns,
            length,
            alphabet,
            algorithms,
            model,
            optimal,
            restarts,
            cap,
            out,
        } => {
            let alphabet = Alphabet::parse(alphabet)?;
            let patterns = match (patterns, length) {
                (Some(list), _) => parse_patterns(&alphabet, list.split(','))?,
                (None, Some(l)) => all_patterns(&alphabet, *l),
                (None, None) => bail!("give --patterns or --length"),
            };
            let spec = TableSpec {
                patterns,
                algorithms: parse_algorithms(algorithms)?,
                model: parse_iid(model, &alphabet)?,
                optimal: *optimal,
                search: SearchConfig {
                    strategy: Strategy::HillClimb,
                    restarts: *restarts,
                    seed: cli.seed,
                    assembly_cap: *cap,
                    ..SearchConfig::default()
                },
            };
            spec.check()?;
            let rows = spec
                .patterns
                .par_iter()
                .map(|w| table_row(&spec, w))
                .collect::<wmatch::Result<Vec<_>>>()?;
            emit(out.as_deref(), &wmatch::to_tsv(&spec, &rows, &invocation()))?;
            info(cli, format!("{} rows", rows.len()));
            Ok(())
        }
        Command::Ingest {
            text,
            format,
            alphabet,
            patterns,
            machines,
            order,
            out,
        } => {
            let alphabet = Alphabet::parse(alphabet)?;
            let format = match format {
                FormatArg::Plain => TextFormat::Plain,
                FormatArg::Fasta => TextFormat::Fasta,
            };
            let content =
                fs::read_to_string(text).with_context(|| format!("reading {}", text.display()))?;
            let t = read_text(&alphabet, &content, format)
                .with_context(|| format!("reading {}", text.display()))?;
            let listed = fs::read_to_string(patterns)
                .with_context(|| format!("reading {}", patterns.display()))?;
            let ws = parse_patterns(
                &alphabet,
                listed
                    .lines()
                    .map(str::trim)
                    .filter(|l| !l.is_empty() && !l.starts_with('#')),
            )?;
            if ws.is_empty() {
                bail!("{} lists no pattern", patterns.display());
            }
            let model = fit_iid(&alphabet, &t)?;
            let kinds: Vec<Option<Algorithm>> = if machines.trim() == "optimal" {
                vec![None]
            } else {
                parse_algorithms(machines)?.into_iter().map(Some).collect()
            };
            let cells: Vec<(usize, Option<Algorithm>)> = (0..ws.len())
                .flat_map(|i| kinds.iter().map(move |&k| (i, k)))
                .collect();
            let search = SearchConfig {
                strategy: Strategy::HillClimb,
                seed: cli.seed,
                ..SearchConfig::default()
            };
            let rows = cells
                .par_iter()
                .map(|&(i, kind)| -> Result<String> {
                    let w = &ws[i];
                    let (name, m) = match kind {
                        Some(alg) => (alg.name().to_string(), build_classic(alg, w)),
                        None => {
                            let k = order.unwrap_or(w.len() - 1);
                            let search = SearchConfig {
                                strategy: Strategy::Exhaustive,
                                ..search.clone()
                            };
                            let o = match optimize(w, k, &model, &search) {
                                Err(Error::Cap(_)) => optimize(
                                    w,
                                    k,
                                    &model,
                                    &SearchConfig {
                                        strategy: Strategy::HillClimb,
                                        ..search
                                    },
                                )?,
                                r => r?,
                            };
                            (format!("optimal_k{k}"), o.machine)
                        }
                    };
                    let empirical = wmatch::speed::empirical_speed_text(&m, &t)?;
                    let analytic = wmatch::asymptotic_speed_iid(&m, &model)?;
                    Ok(format!("{w}\t{name}\t{empirical:.4}\t{analytic:.4}\n"))
                })
                .collect::<Result<Vec<_>>>()?;
            let mut s = String::new();
            for line in invocation().lines() {
                let _ = writeln!(s, "# {line}");
            }
            let _ = writeln!(
                s,
                "# text length {}; fitted model {}",
                t.len(),
                model.spec()
            );
            s.push_str("pattern\tmachine\tempirical\tanalytic\n");
            s.extend(rows);
            emit(out.as_deref(), &s)?;
            info(
                cli,
                format!("{} rows over {} symbols", cells.len(), t.len()),
            );
            Ok(())
        }
    }
}

fn info(cli: &Cli, msg: String) {
    if !cli.quiet {
        eprintln!("{msg}");
    }
}

fn invocation() -> String {
    std::iter::once("wmatch".to_string())
        .chain(std::env::args().skip(1))
        .collect::<Vec<_>>()
        .join(" ")
}

fn emit(out: Option<&Path>, s: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, s).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{s}");
            Ok(())
        }
    }
}

fn machine_json(m: &Machine) -> String {
    wmatch::serialize::to_json(m) + "\n"
}

/// Reads a machine document, or the machine inside an optimizer output.
fn load_machine(path: &Path) -> Result<Machine> {
    let s = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let v: serde_json::Value =
        serde_json::from_str(&s).with_context(|| format!("parsing {}", path.display()))?;
    let v = match v.get("machine") {
        Some(inner) => inner.clone(),
        None => v,
    };
    let doc: MachineDoc =
        serde_json::from_value(v).with_context(|| format!("parsing {}", path.display()))?;
    Ok(doc.to_machine()?)
}

fn parse_iid(spec: &str, alphabet: &Alphabet) -> Result<IidModel> {
    match parse_model(spec, alphabet)? {
        TextModel::Iid(m) => Ok(m),
        _ => bail!("this command needs an iid model, got '{spec}'"),
    }
}

fn parse_model(spec: &str, alphabet: &Alphabet) -> Result<TextModel> {
    let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let model = match kind {
        "iid" => TextModel::Iid(IidModel::parse(alphabet.clone(), arg)?),
        "markov" => {
            let doc: MarkovDoc = serde_json::from_str(
                &fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?,
            )?;
            TextModel::Markov(doc.to_model()?)
        }
        "hmm" => {
            let doc: HmmDoc = serde_json::from_str(
                &fs::read_to_string(arg).with_context(|| format!("reading {arg}"))?,
            )?;
            TextModel::Hmm(doc.to_model()?)
        }
        _ => bail!("unknown model '{spec}'; expected iid:SPEC, markov:FILE or hmm:FILE"),
    };
    if model.alphabet() != alphabet {
        bail!(
            "model alphabet \"{}\" differs from \"{alphabet}\"",
            model.alphabet()
        );
    }
    Ok(model)
}

fn parse_patterns<'a>(
    alphabet: &Alphabet,
    items: impl Iterator<Item = &'a str>,
) -> Result<Vec<Pattern>> {
    items
        .map(|s| {
            Pattern::new(alphabet.clone(), s.trim())
                .with_context(|| format!("pattern \"{}\"", s.trim()))
        })
        .collect()
}

fn parse_algorithms(list: &str) -> Result<Vec<Algorithm>> {
    let algs = list
        .split(',')
        .map(|s| s.trim().parse::<Algorithm>())
        .collect::<wmatch::Result<Vec<_>>>()?;
    if algs.is_empty() {
        bail!("no algorithm given");
    }
    Ok(algs)
}

fn print_witness(m: &Machine, c: &Counterexample) {
    let a = m.alphabet();
    println!("text\t{}", a.decode(&c.text));
    println!("expected\t{:?}", c.expected);
    println!("reported\t{:?}", c.got);
    let missed: Vec<usize> = c
        .expected
        .iter()
        .filter(|p| !c.got.contains(p))
        .copied()
        .collect();
    if !missed.is_empty() {
        println!("missed\t{missed:?}");
    }
    if c.truncated {
        println!("run truncated by the iteration cap");
    }
}
