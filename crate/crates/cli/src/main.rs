use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use netdes_core::harness::{run_suite, GenParams, GroupMode, Property};
use netdes_core::{
    build_extended, build_language_automaton, build_lin, closed_loop, compare_models, export_dot, successors, Error,
    ExtendedState, Inclusion, Model, ModelError, Setting, Word, DEFAULT_STATE_CAP,
};

#[derive(Parser)]
#[command(
    name = "netdes",
    version,
    about = "Closed-loop analysis over delayed and lossy control channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    /// Empty string prints as an empty line.
    Machine,
    /// Empty string prints as `ε`.
    Human,
}

#[derive(Clone, Copy, ValueEnum)]
enum Which {
    Extended,
    Language,
    Lin,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Singleton,
    SinglePackage,
    RandomPartition,
}

#[derive(Subcommand)]
enum Command {
    /// Check a model file and list every problem found.
    Validate { model: PathBuf },
    /// Build the extended state space and the closed-loop language automaton.
    Build {
        model: PathBuf,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: usize,
        /// Write the extended automaton as DOT.
        #[arg(long)]
        extended_out: Option<PathBuf>,
        /// Write the language automaton as DOT.
        #[arg(long)]
        language_out: Option<PathBuf>,
    },
    /// Print closed-loop strings up to a length, one per line.
    Enumerate {
        model: PathBuf,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Machine)]
        format: Format,
    },
    /// Compare the networked closed loop with the window-based language.
    CompareLin {
        model: PathBuf,
        /// Window size; defaults to the largest max_delay + max_loss.
        #[arg(long)]
        nc: Option<usize>,
        #[arg(long)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: usize,
        #[arg(long, value_enum, default_value_t = Format::Machine)]
        format: Format,
    },
    /// Interactive walk through the extended state space (reads stdin).
    Step { model: PathBuf },
    /// Write an automaton as DOT.
    ExportDot {
        model: PathBuf,
        #[arg(long, value_enum)]
        which: Which,
        #[arg(long)]
        nc: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
        cap: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the randomized property suite and print its report as JSON.
    Suite {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = Mode::Singleton)]
        group_mode: Mode,
        #[arg(long, default_value_t = 5)]
        max_states: usize,
        #[arg(long, default_value_t = 4)]
        max_events: usize,
        #[arg(long, default_value_t = 2)]
        max_controllable: usize,
        #[arg(long, default_value_t = 2)]
        max_nd: u32,
        #[arg(long, default_value_t = 1)]
        max_nl: u32,
        #[arg(long, default_value_t = 0.5)]
        density: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct Failure {
    code: u8,
    lines: Vec<String>,
}

impl Failure {
    fn internal(msg: impl Into<String>) -> Self {
        Self {
            code: 1,
            lines: vec![msg.into()],
        }
    }

    fn validation(msg: impl Into<String>) -> Self {
        Self {
            code: 2,
            lines: vec![msg.into()],
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ResourceLimit { .. } => 3,
            Error::InvalidArgument(_) | Error::ModelCoverage(_) => 2,
            Error::InvalidState(_) => 1,
        };
        Self {
            code,
            lines: vec![e.to_string()],
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::internal(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn load(path: &Path) -> Result<Model, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure::internal(format!("{}: {e}", path.display())))?;
    netdes_core::parse_model(&text).map_err(|e| match e {
        ModelError::Syntax { .. } => Failure::validation(format!("{}: {e}", path.display())),
        ModelError::Invalid(issues) => Failure {
            code: 2,
            lines: issues.iter().map(|i| format!("{}: {i}", path.display())).collect(),
        },
    })
}

fn word_text(model: &Model, w: &[netdes_core::EventId], format: Format) -> String {
    if w.is_empty() && format == Format::Human {
        "ε".to_string()
    } else {
        model.alphabet().format_word(w)
    }
}

fn emit(out: Option<&Path>, text: &str) -> CmdResult {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::internal(format!("{}: {e}", p.display()))),
        None => {
            io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn validate(path: &Path) -> CmdResult {
    let m = load(path)?;
    let ab = m.alphabet();
    println!(
        "ok: {} events ({} controllable), {} plant states, {} supervisor states, {} channel groups",
        ab.len(),
        ab.controllable().len(),
        m.plant().num_states(),
        m.supervisor().automaton().num_states(),
        m.partition().len()
    );
    Ok(())
}

fn build(path: &Path, cap: usize, extended_out: Option<&Path>, language_out: Option<&Path>) -> CmdResult {
    let m = load(path)?;
    let ext = build_extended(&m, cap)?;
    let lang = build_language_automaton(&ext);
    println!("extended states: {}", ext.num_states());
    println!("extended transitions: {}", ext.num_transitions());
    println!(
        "language automaton: {} states, {} transitions",
        lang.num_states(),
        lang.num_transitions()
    );
    if let Some(p) = extended_out {
        emit(Some(p), &ext.to_dot(&m))?;
    }
    if let Some(p) = language_out {
        emit(Some(p), &export_dot(&lang, None))?;
    }
    Ok(())
}

fn enumerate(path: &Path, depth: usize, cap: usize, format: Format) -> CmdResult {
    let m = load(path)?;
    let lang = build_language_automaton(&build_extended(&m, cap)?);
    let mut out = String::new();
    for w in lang.enumerate_language(depth) {
        out.push_str(&word_text(&m, &w, format));
        out.push('\n');
    }
    emit(None, &out)
}

fn verdict_line(m: &Model, label: &str, inc: &Inclusion, format: Format) -> String {
    match inc {
        Inclusion::Holds => format!("{label}: holds\n"),
        Inclusion::Counterexample(w) => format!("{label}: fails, witness: {}\n", word_text(m, w, format)),
    }
}

fn compare_lin(path: &Path, nc: Option<usize>, depth: usize, cap: usize, format: Format) -> CmdResult {
    let m = load(path)?;
    let cmp = compare_models(&m, nc, depth, cap)?;
    let mut out = String::new();
    let setting = match cmp.setting {
        Setting::SingleChannel => "single-channel",
        Setting::Incomparable => "incomparable (several channel groups, verdicts informational)",
    };
    out.push_str(&format!("setting: {setting}\n"));
    out.push_str(&format!("window: {}\n", cmp.n_c));
    out.push_str(&verdict_line(&m, "networked in lin", &cmp.networked_in_lin, format));
    out.push_str(&verdict_line(&m, "lin in networked", &cmp.lin_in_networked, format));
    let lists: [(&str, &std::collections::BTreeSet<Word>); 2] = [
        ("networked minus lin", &cmp.networked_minus_lin),
        ("lin minus networked", &cmp.lin_minus_networked),
    ];
    for (label, words) in lists {
        out.push_str(&format!("{label} (up to length {depth}): {}\n", words.len()));
        for w in words {
            out.push_str(&format!("  {}\n", word_text(&m, w, format)));
        }
    }
    emit(None, &out)
}

fn describe(m: &Model, es: &ExtendedState) -> String {
    let q = m.plant().state_name(es.plant);
    if m.supervisor().automaton() == m.plant() {
        format!("{q} {}", es.config)
    } else {
        format!("{q} · {} {}", m.supervisor().automaton().state_name(es.sup), es.config)
    }
}

fn step(path: &Path) -> CmdResult {
    let m = load(path)?;
    let ab = m.alphabet();
    let mut trail: Vec<(Word, ExtendedState)> = vec![(Vec::new(), closed_loop::initial_state(&m)?)];
    let stdin = io::stdin();
    let mut lines = stdin.lock().lines();
    let mut show = true;
    loop {
        let (word, cur) = trail.last().expect("trail never empty").clone();
        if show {
            println!("string: {}", word_text(&m, &word, Format::Human));
            println!("state: {}", describe(&m, &cur));
            let mut feasible = Vec::new();
            for e in ab.events() {
                let outs = successors(&m, &cur, e)?;
                if !outs.is_empty() {
                    feasible.push(format!("{} ({})", ab.name(e), outs.len()));
                }
            }
            println!(
                "events: {}",
                if feasible.is_empty() {
                    "none".into()
                } else {
                    feasible.join(", ")
                }
            );
        }
        show = false;
        print!("> ");
        io::stdout().flush()?;
        let Some(line) = lines.next() else {
            println!();
            return Ok(());
        };
        let line = line?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        match parts.as_slice() {
            [] => {}
            ["quit"] | ["exit"] => return Ok(()),
            ["undo"] => {
                if trail.len() > 1 {
                    trail.pop();
                    show = true;
                } else {
                    println!("nothing to undo");
                }
            }
            ["help"] => println!("commands: <event> [outcome], undo, quit"),
            [name, rest @ ..] if rest.len() <= 1 => {
                let Some(e) = ab.id(name) else {
                    println!("unknown event `{name}`");
                    continue;
                };
                let outs = successors(&m, &cur, e)?;
                if outs.is_empty() {
                    println!("`{name}` cannot occur here");
                    continue;
                }
                let choice = match rest.first() {
                    Some(idx) => match idx.parse::<usize>() {
                        Ok(i) if i < outs.len() => Some(i),
                        _ => {
                            println!("outcome index must be below {}", outs.len());
                            continue;
                        }
                    },
                    None if outs.len() == 1 => Some(0),
                    None => None,
                };
                match choice {
                    Some(i) => {
                        let mut w = word;
                        w.push(e);
                        trail.push((w, outs[i].clone()));
                        show = true;
                    }
                    None => {
                        for (i, o) in outs.iter().enumerate() {
                            println!("  [{i}] {}", describe(&m, o));
                        }
                        println!("choose with `{name} <index>`");
                    }
                }
            }
            _ => println!("commands: <event> [outcome], undo, quit"),
        }
    }
}

fn export(path: &Path, which: Which, nc: Option<usize>, cap: usize, out: Option<&Path>) -> CmdResult {
    let m = load(path)?;
    let text = match which {
        Which::Extended => build_extended(&m, cap)?.to_dot(&m),
        Which::Language => export_dot(&build_language_automaton(&build_extended(&m, cap)?), None),
        Which::Lin => {
            let n = nc.unwrap_or_else(|| netdes_core::lin::default_window(&m));
            export_dot(&build_lin(&m, n)?, None)
        }
    };
    emit(out, &text)
}

fn suite(p: GenParams, trials: usize, depth: usize, out: Option<&Path>) -> CmdResult {
    if trials == 0 {
        return Err(Failure::validation("--trials must be at least 1"));
    }
    p.validate()?;
    let report = run_suite(&p, trials, depth);
    for prop in Property::ALL {
        let t = report.tally(prop);
        eprintln!(
            "{prop}: {} passed, {} failed, {} skipped",
            t.passed, t.failed, t.skipped
        );
    }
    let mut json = report.to_json();
    json.push('\n');
    emit(out, &json)
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate { model } => validate(&model),
        Command::Build {
            model,
            cap,
            extended_out,
            language_out,
        } => build(&model, cap, extended_out.as_deref(), language_out.as_deref()),
        Command::Enumerate {
            model,
            depth,
            cap,
            format,
        } => enumerate(&model, depth, cap, format),
        Command::CompareLin {
            model,
            nc,
            depth,
            cap,
            format,
        } => compare_lin(&model, nc, depth, cap, format),
        Command::Step { model } => step(&model),
        Command::ExportDot {
            model,
            which,
            nc,
            cap,
            out,
        } => export(&model, which, nc, cap, out.as_deref()),
        Command::Suite {
            seed,
            trials,
            depth,
            group_mode,
            max_states,
            max_events,
            max_controllable,
            max_nd,
            max_nl,
            density,
            out,
        } => {
            let group_mode = match group_mode {
                Mode::Singleton => GroupMode::Singleton,
                Mode::SinglePackage => GroupMode::SinglePackage,
                Mode::RandomPartition => GroupMode::RandomPartition,
            };
            let p = GenParams {
                seed,
                max_states,
                max_events,
                max_controllable,
                max_nd,
                max_nl,
                group_mode,
                transition_density: density,
            };
            suite(p, trials, depth, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            for line in &f.lines {
                eprintln!("error: {line}");
            }
            ExitCode::from(f.code)
        }
    }
}
