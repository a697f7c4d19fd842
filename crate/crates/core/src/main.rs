use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use explorable::dot::export_dot;
use explorable::experiment::{run_experiment, ExperimentConfig};
use explorable::families::family;
use explorable::game::{solve_with, GameConfig, GameVerdict, TokenBudget};
use explorable::grammar::try_exact_accepts;
use explorable::interactive::{play_interactive, Role};
use explorable::pda::Pda;
use explorable::run::{enumerate_runs, AcceptConvention};
use explorable::turing::TuringMachine;

#[derive(Parser)]
#[command(name = "explorable", version, about = "Pushdown automata and the k-explorability game")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide membership of a word exactly.
    Member {
        pda: PathBuf,
        /// Letters as a raw string; empty for the empty word.
        word: String,
    },
    /// List the runs of a word, one per line.
    Runs {
        pda: PathBuf,
        word: String,
        #[arg(long, default_value_t = 64)]
        eps_budget: usize,
    },
    /// Check well-formedness and report determinism.
    Validate { pda: PathBuf },
    /// Solve the explorability game up to a horizon.
    Game {
        pda: PathBuf,
        #[arg(long, conflicts_with = "tokens_fn", required_unless_present = "tokens_fn")]
        tokens: Option<usize>,
        /// `linear`, `exp`, `exp:M` or `const:C`, applied to the horizon.
        #[arg(long)]
        tokens_fn: Option<String>,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 64)]
        eps_budget: usize,
        /// Only the configuration right after a letter may accept.
        #[arg(long)]
        strict_checkpoint: bool,
        /// Play against the solver instead of printing the verdict.
        #[arg(long, value_enum)]
        interactive: Option<HumanRole>,
        /// Where to write the strategy table when Determiner wins.
        #[arg(long)]
        strategy_out: Option<PathBuf>,
    },
    /// Write a PDA from a construction family.
    Construct {
        family: String,
        #[arg(long)]
        i: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        n: Option<usize>,
        /// Turing machine file for `invalc` (default: the demo machine).
        #[arg(long)]
        tm: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a parameter sweep described by a JSON file and print CSV.
    Experiment {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the PDA as a Graphviz digraph.
    ExportDot { pda: PathBuf },
}

#[derive(Clone, Copy, ValueEnum)]
enum HumanRole {
    Spoiler,
    Determiner,
}

type CliResult = Result<ExitCode, String>;

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_pda(path: &Path) -> Result<Pda, String> {
    Pda::from_json(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn write_out(path: Option<&Path>, text: &str) -> Result<(), String> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => io::stdout().write_all(text.as_bytes()).map_err(|e| e.to_string()),
    }
}

fn letters(pda: &Pda, word: &str) -> Result<Vec<char>, String> {
    let w: Vec<char> = word.chars().collect();
    match w.iter().find(|c| !pda.input_alphabet().contains(c)) {
        Some(c) => Err(format!("`{c}` is not in the input alphabet")),
        None => Ok(w),
    }
}

fn member(pda: &Path, word: &str) -> CliResult {
    let pda = load_pda(pda)?;
    let w = letters(&pda, word)?;
    if try_exact_accepts(&pda, &w).map_err(|e| e.to_string())? {
        println!("accept");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("reject");
        Ok(ExitCode::from(1))
    }
}

fn runs(pda: &Path, word: &str, eps_budget: usize) -> CliResult {
    let pda = load_pda(pda)?;
    let w = letters(&pda, word)?;
    let set = enumerate_runs(&pda, &w, eps_budget);
    for run in &set.runs {
        let mut line = pda.format_configuration(&run.configs[0]);
        for (t, c) in run.transitions.iter().zip(&run.configs[1..]) {
            let label = pda.transition(*t).input.map_or("ε".to_string(), |a| a.to_string());
            line.push_str(&format!(" -{label}-> {}", pda.format_configuration(c)));
        }
        if run.is_accepting(&pda) {
            line.push_str("  accepting");
        }
        println!("{line}");
    }
    println!("{} runs{}", set.runs.len(), if set.truncated { " (truncated by ε-budget)" } else { "" });
    Ok(ExitCode::SUCCESS)
}

fn validate(pda: &Path) -> CliResult {
    let pda = load_pda(pda)?;
    let r = pda.validate();
    for v in &r.violations {
        println!("violation: {v}");
    }
    println!(
        "states={} stack_symbols={} size={} deterministic={} epsilon_free={}",
        pda.states().len(),
        pda.stack_alphabet().len(),
        pda.size(),
        r.deterministic,
        r.epsilon_free
    );
    Ok(if r.is_well_formed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

#[allow(clippy::too_many_arguments)]
fn game(
    pda_path: &Path,
    tokens: Option<usize>,
    tokens_fn: Option<&str>,
    horizon: usize,
    eps_budget: usize,
    strict: bool,
    interactive: Option<HumanRole>,
    strategy_out: Option<&Path>,
) -> CliResult {
    let pda = load_pda(pda_path)?;
    let k = match (tokens, tokens_fn) {
        (Some(k), _) => k,
        (None, Some(f)) => TokenBudget::parse(f, &pda).map_err(|e| e.to_string())?.tokens(horizon),
        (None, None) => return Err("one of --tokens or --tokens-fn is required".into()),
    };
    if k == 0 {
        return Err("--tokens must be at least 1".into());
    }
    let convention = if strict { AcceptConvention::StrictCheckpoint } else { AcceptConvention::EpsilonSegment };
    let cfg = GameConfig { eps_budget, convention, ..Default::default() };
    if let Some(role) = interactive {
        let role = match role {
            HumanRole::Spoiler => Role::Spoiler,
            HumanRole::Determiner => Role::Determiner,
        };
        let stdin = io::stdin();
        let mut input = BufReader::new(stdin.lock());
        play_interactive(&pda, k, role, horizon, &cfg, &mut input, &mut io::stdout()).map_err(|e| e.to_string())?;
        return Ok(ExitCode::SUCCESS);
    }
    let out = solve_with(&pda, k, horizon, &cfg).map_err(|e| e.to_string())?;
    println!("tokens={k} horizon={horizon} nodes={}", out.stats.nodes);
    match &out.verdict {
        GameVerdict::DeterminerWins { horizon } => {
            println!("DeterminerWins horizon={horizon}");
            if let (Some(path), Some(table)) = (strategy_out, &out.strategy) {
                fs::write(path, table.to_json(&pda)).map_err(|e| format!("{}: {e}", path.display()))?;
                println!("strategy: {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        GameVerdict::SpoilerWins { witness, losing_prefix, adaptive } => {
            println!("SpoilerWins witness={witness:?} losing_prefix={losing_prefix:?} adaptive={adaptive}");
            Ok(ExitCode::from(1))
        }
        GameVerdict::Unknown { diagnostics } => {
            println!("Unknown: {diagnostics}");
            Ok(ExitCode::from(3))
        }
    }
}

fn construct(name: &str, i: Option<usize>, k: Option<usize>, n: Option<usize>, tm: Option<&Path>, out: Option<&Path>) -> CliResult {
    let fam = family(name).map_err(|e| e.to_string())?;
    let tm = tm.map(|p| TuringMachine::from_json(&read(p)?).map_err(|e| format!("{}: {e}", p.display()))).transpose()?;
    let value = match fam.parameter() {
        None => 0,
        Some(flag) => {
            let v = match flag {
                "i" => i,
                "k" => k,
                _ => n,
            };
            v.ok_or_else(|| format!("family `{name}` needs --{flag}"))?
        }
    };
    let pda = fam.build(value, tm.as_ref()).map_err(|e| e.to_string())?;
    let mut text = pda.to_json();
    text.push('\n');
    write_out(out, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn experiment(config: &Path, out: Option<&Path>) -> CliResult {
    let cfg = ExperimentConfig::from_json(&read(config)?).map_err(|e| format!("{}: {e}", config.display()))?;
    let csv = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let target = out.map(Path::to_path_buf).or_else(|| cfg.output.as_ref().map(PathBuf::from));
    write_out(target.as_deref(), &csv)?;
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Member { pda, word } => member(pda, word),
        Command::Runs { pda, word, eps_budget } => runs(pda, word, *eps_budget),
        Command::Validate { pda } => validate(pda),
        Command::Game { pda, tokens, tokens_fn, horizon, eps_budget, strict_checkpoint, interactive, strategy_out } => game(
            pda,
            *tokens,
            tokens_fn.as_deref(),
            *horizon,
            *eps_budget,
            *strict_checkpoint,
            *interactive,
            strategy_out.as_deref(),
        ),
        Command::Construct { family, i, k, n, tm, out } => construct(family, *i, *k, *n, tm.as_deref(), out.as_deref()),
        Command::Experiment { config, out } => experiment(config, out.as_deref()),
        Command::ExportDot { pda } => load_pda(pda).map(|p| {
            print!("{}", export_dot(&p));
            ExitCode::SUCCESS
        }),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
