use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use posg_core::emptiness::EmptinessConfig;
use posg_core::gen::{random_posg_seeded, PosgParams};
use posg_core::model::text::{parse_posg, parse_strategy, parse_tpg, serialize_posg, serialize_strategy, serialize_tpg};
use posg_core::model::to_dot;
use posg_core::omega::text::{parse_automaton, serialize_automaton};
use posg_core::omega::{complement_dpw, determinize_with_cap, lasso_accepts, AnyAutomaton};
use posg_core::paritygame::{format_solution, parse_pg};
use posg_core::reduce::{reduce_almost_sure, reduce_positive, reduce_positive_dual};
use posg_core::verify::{monte_carlo, report};
use posg_core::{solve, Error, Mode, SolveConfig};

#[derive(Parser)]
#[command(name = "posg", version, about = "Finite-memory strategies for partial-observation stochastic parity games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolveMode {
    AlmostSure,
    Positive,
}

impl From<SolveMode> for Mode {
    fn from(m: SolveMode) -> Mode {
        match m {
            SolveMode::AlmostSure => Mode::AlmostSure,
            SolveMode::Positive => Mode::Positive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ReduceMode {
    AlmostSure,
    /// Gadgets with entry states `s@w` for positive winning.
    Positive,
    /// The gadget the solver uses for positive winning.
    PositiveDual,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether player 1 has a finite-memory winning strategy.
    Solve {
        #[arg(long, required_unless_present = "batch", conflicts_with = "batch")]
        input: Option<PathBuf>,
        /// Solve every `.posg` file of a directory.
        #[arg(long)]
        batch: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "almost-sure")]
        mode: SolveMode,
        /// Write the witness strategy here (`-` for standard output).
        #[arg(long, conflicts_with = "batch")]
        emit_strategy: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
        /// Bound on deterministic automaton states.
        #[arg(long)]
        det_cap: Option<usize>,
        /// Bound on labelings enumerated at one automaton state.
        #[arg(long)]
        labeling_cap: Option<usize>,
    },
    /// Check a strategy against a game.
    Verify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        strategy: PathBuf,
        #[arg(long, value_enum, default_value = "almost-sure")]
        mode: SolveMode,
        /// Also simulate this many episodes against a random player 2.
        #[arg(long, default_value_t = 0)]
        episodes: usize,
        #[arg(long, default_value_t = 200)]
        steps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the turn-based game obtained by replacing random states.
    Reduce {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum, default_value = "almost-sure")]
        mode: ReduceMode,
        /// Output file; statistics then go to standard output.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Generate a random game.
    Gen {
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        actions: usize,
        #[arg(long, default_value_t = 3)]
        obs: usize,
        #[arg(long, default_value_t = 3)]
        max_prio: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Render a game, turn-based game or parity game as DOT.
    ExportDot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Two-player parity games.
    Pg {
        #[command(subcommand)]
        command: PgCommand,
    },
    /// Parity word automata.
    Omega {
        #[command(subcommand)]
        command: OmegaCommand,
    },
}

#[derive(Subcommand)]
enum PgCommand {
    /// Print winning regions and positional strategies.
    Solve {
        #[arg(long)]
        input: PathBuf,
    },
}

#[derive(Subcommand)]
enum OmegaCommand {
    /// Membership of the lasso `stem cycle^ω`; letters separated by spaces
    /// or commas.
    Check {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "")]
        stem: String,
        #[arg(long)]
        cycle: String,
    },
    /// Determinize a nondeterministic automaton.
    Determinize {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        complement: bool,
        #[arg(long, default_value_t = posg_core::omega::DEFAULT_DET_CAP)]
        cap: usize,
    },
}

/// Exit codes of the command-line contract.
const NOT_WINNING: u8 = 1;
const INPUT_ERROR: u8 = 2;
const CAPACITY: u8 = 3;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        _ => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn with_file<T>(path: &Path, r: posg_core::Result<T>) -> Result<T> {
    r.with_context(|| path.display().to_string())
}

fn solve_config(det_cap: Option<usize>, labeling_cap: Option<usize>) -> SolveConfig {
    let mut e = EmptinessConfig::default();
    if let Some(c) = det_cap {
        e.det_cap = c;
    }
    if let Some(c) = labeling_cap {
        e.labeling_cap = c;
    }
    SolveConfig { emptiness: e }
}

fn verdict(winning: bool) -> &'static str {
    if winning {
        "WINNING"
    } else {
        "NOT-WINNING"
    }
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve { input, batch, mode, emit_strategy, stats, det_cap, labeling_cap } => {
            let config = solve_config(det_cap, labeling_cap);
            if let Some(dir) = batch {
                return solve_batch(&dir, mode.into(), &config, stats);
            }
            let input = input.expect("clap requires --input without --batch");
            let g = with_file(&input, parse_posg(&read(&input)?))?;
            let s = solve(&g, mode.into(), &config)?;
            let mut out = format!("{}\n", verdict(s.winning));
            if stats {
                out.push_str(&s.stats.lines());
            }
            if let (Some(path), Some(t)) = (&emit_strategy, &s.strategy) {
                let text = serialize_strategy(t);
                if path == Path::new("-") {
                    out.push_str(&text);
                } else {
                    fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
                }
            }
            write_out(None, &out)?;
            Ok(if s.winning { 0 } else { NOT_WINNING })
        }
        Command::Verify { input, strategy, mode, episodes, steps, seed } => {
            let g = with_file(&input, parse_posg(&read(&input)?))?;
            let t = with_file(&strategy, parse_strategy(&read(&strategy)?))?;
            let r = report(&g, &t, matches!(mode, SolveMode::Positive))?;
            let mut out = format!("mecs={}\nodd_ec_reachable={}\n", r.mecs, r.odd_ec_reachable);
            if episodes > 0 {
                let mc = monte_carlo(&g, &t, seed, steps, episodes)?;
                out.push_str(&format!("mc_episodes={}\nmc_even_fraction={:.4}\n", mc.episodes, mc.fraction()));
            }
            out.push_str(if r.holds { "VERIFIED\n" } else { "REFUTED\n" });
            write_out(None, &out)?;
            Ok(if r.holds { 0 } else { NOT_WINNING })
        }
        Command::Reduce { input, mode, output } => {
            let g = with_file(&input, parse_posg(&read(&input)?))?;
            let r = match mode {
                ReduceMode::AlmostSure => reduce_almost_sure(&g)?,
                ReduceMode::Positive => reduce_positive(&g)?,
                ReduceMode::PositiveDual => reduce_positive_dual(&g)?,
            };
            let text = serialize_tpg(&r.game);
            match &output {
                Some(p) => {
                    write_out(Some(p), &text)?;
                    write_out(None, &r.stats())?;
                }
                None => {
                    write_out(None, &text)?;
                    eprint!("{}", r.stats());
                }
            }
            Ok(0)
        }
        Command::Gen { states, actions, obs, max_prio, seed, output } => {
            let p = PosgParams { states, actions, observations: obs, max_priority: max_prio };
            let g = random_posg_seeded(p, seed)?;
            write_out(output.as_deref(), &serialize_posg(&g))?;
            Ok(0)
        }
        Command::ExportDot { input, output } => {
            let text = read(&input)?;
            let header = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
            let dot = match header {
                "posg" => to_dot(&with_file(&input, parse_posg(&text))?, "posg"),
                "tpg" => to_dot(&with_file(&input, parse_tpg(&text))?, "tpg"),
                "pg" => to_dot(&with_file(&input, parse_pg(&text))?, "pg"),
                other => bail!("{}: unknown file kind `{other}`", input.display()),
            };
            write_out(output.as_deref(), &dot)?;
            Ok(0)
        }
        Command::Pg { command: PgCommand::Solve { input } } => {
            let g = with_file(&input, parse_pg(&read(&input)?))?;
            let sol = posg_core::paritygame::solve(&g);
            write_out(None, &format_solution(&g, &sol))?;
            Ok(0)
        }
        Command::Omega { command } => match command {
            OmegaCommand::Check { input, stem, cycle } => {
                let a = with_file(&input, parse_automaton(&read(&input)?))?;
                let split = |s: &str| -> Vec<String> {
                    s.split(|c: char| c == ',' || c.is_whitespace()).filter(|x| !x.is_empty()).map(String::from).collect()
                };
                let ids = |w: &[String]| a.letter_ids(&w.iter().map(String::as_str).collect::<Vec<_>>());
                let (stem, cycle) = (ids(&split(&stem))?, ids(&split(&cycle))?);
                let accepted = lasso_accepts(&a, &stem, &cycle)?;
                write_out(None, if accepted { "ACCEPT\n" } else { "REJECT\n" })?;
                Ok(if accepted { 0 } else { NOT_WINNING })
            }
            OmegaCommand::Determinize { input, complement, cap } => {
                let a = with_file(&input, parse_automaton(&read(&input)?))?;
                let AnyAutomaton::Npw(n) = a else {
                    bail!("{}: determinization expects an npw automaton", input.display());
                };
                let mut d = determinize_with_cap(&n, cap)?;
                if complement {
                    d = complement_dpw(&d);
                }
                write_out(None, &serialize_automaton(&AnyAutomaton::Dpw(d)))?;
                Ok(0)
            }
        },
    }
}

fn solve_batch(dir: &Path, mode: Mode, config: &SolveConfig, stats: bool) -> Result<u8> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .with_context(|| format!("reading {}", dir.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "posg"))
        .collect();
    files.sort();
    let results: Vec<(String, u8)> = files
        .par_iter()
        .map(|path| {
            let name = path.file_name().unwrap().to_string_lossy().into_owned();
            let outcome = read(path).and_then(|text| Ok(solve(&parse_posg(&text)?, mode, config)?));
            match outcome {
                Ok(s) => {
                    let mut line = format!("{name} {}", verdict(s.winning));
                    if stats {
                        for kv in s.stats.lines().lines() {
                            line.push(' ');
                            line.push_str(kv);
                        }
                    }
                    (line, 0)
                }
                Err(e) => {
                    let code = exit_code(&e);
                    (format!("{name} {} {e:#}", if code == CAPACITY { "CAPACITY" } else { "ERROR" }), code)
                }
            }
        })
        .collect();
    let mut out = String::new();
    let mut code = 0;
    for (line, c) in results {
        out.push_str(&line);
        out.push('\n');
        code = code.max(c);
    }
    write_out(None, &out)?;
    Ok(if code == CAPACITY { CAPACITY } else if code != 0 { INPUT_ERROR } else { 0 })
}

fn exit_code(e: &anyhow::Error) -> u8 {
    match e.downcast_ref::<Error>() {
        Some(err) if err.is_capacity() => CAPACITY,
        _ => INPUT_ERROR,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { INPUT_ERROR } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
