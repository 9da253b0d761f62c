//! Command-line front end.
//!
//! Exit codes: 0 on success (predicates print `true` or `false`), 2 on
//! invalid input, 1 when an internal cap is exceeded or a self-check fails.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::automaton::{format_word, parse_word, Automaton, Letter};
use crate::classify::{self, ClassifyError, GroupType};
use crate::constructions::{self, ConstructionError, CyclicOrder};
use crate::engine::{AutomatonGroup, Element, EngineError, Factor};
use crate::io::{self, FormatError};

#[derive(Debug, Parser)]
#[command(
    name = "autgroup",
    version,
    about = "Groups generated by Mealy and time-varying automata"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ElementArgs {
    /// Automaton file (JSON).
    pub file: PathBuf,
    /// Element such as `a1^2 * a2^-1`.
    #[arg(long, allow_hyphen_values = true)]
    pub element: String,
    /// Phase (1-based step index).
    #[arg(long, default_value_t = 1)]
    pub step: usize,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check an automaton file.
    Validate { file: PathBuf },
    /// Apply the transformation of one state to a word.
    Apply {
        file: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1)]
        step: usize,
        #[arg(long)]
        word: String,
    },
    /// Apply a group element to a word.
    Image {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long)]
        word: String,
    },
    /// Decide whether an element is the identity; prints a witness word otherwise.
    Identity {
        #[command(flatten)]
        element: ElementArgs,
    },
    /// Order of an element (a power of two, or `exceeds 2^E`).
    Order {
        #[command(flatten)]
        element: ElementArgs,
        #[arg(long, default_value_t = 12)]
        max_exp: u32,
    },
    /// Decide whether two elements commute.
    Commute {
        #[command(flatten)]
        element: ElementArgs,
        /// Second element.
        #[arg(long, allow_hyphen_values = true)]
        with: String,
    },
    /// Identify the group generated by a binary Mealy automaton.
    Classify {
        file: PathBuf,
        #[arg(long, default_value_t = 12)]
        max_exp: u32,
        #[arg(long, default_value_t = 3)]
        rel_bound: u32,
    },
    /// Classify every invertible Mealy automaton with the given number of states.
    Enumerate {
        #[arg(long)]
        states: usize,
        #[arg(long, default_value_t = 2)]
        alphabet: usize,
        #[arg(long, default_value_t = 12)]
        max_exp: u32,
        #[arg(long, default_value_t = 3)]
        rel_bound: u32,
        /// CSV report path; printed to stdout when absent.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Write one of the explicit constructions.
    Build {
        #[command(subcommand)]
        kind: BuildKind,
        /// Output path; printed to stdout when absent.
        #[arg(short = 'o', long = "output", global = true)]
        output: Option<PathBuf>,
    },
    /// Cross-check identity verdicts against the action on short words for
    /// random elements.
    Crosscheck {
        file: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        length: usize,
        #[arg(long, default_value_t = 8)]
        depth: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum BuildKind {
    /// Two states generating C_{2^r} (`--order 2^r`) or C_∞ (`--infinite`).
    Cyclic {
        #[arg(long, conflicts_with = "infinite", required_unless_present = "infinite")]
        order: Option<String>,
        #[arg(long)]
        infinite: bool,
    },
    /// C_{2^r1} ⊕ … ⊕ C_{2^rd} ⊕ Z^{d'}.
    Mixed {
        #[arg(long, value_delimiter = ',', required = true)]
        torsion: Vec<u32>,
        #[arg(long, default_value_t = 0)]
        free: usize,
    },
    /// Free abelian group of rank n with n states.
    FreeAbelian {
        #[arg(long)]
        rank: usize,
    },
    /// Sausage automaton with n states.
    Sausage {
        #[arg(long)]
        states: usize,
    },
    /// Cyclic-shift automaton with n states.
    Shift {
        #[arg(long)]
        states: usize,
    },
    /// Add inert states to an existing automaton.
    Pad {
        file: PathBuf,
        #[arg(long)]
        states: usize,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Internal(String),
    /// Stdout went away (e.g. piped into `head`); not an error.
    Closed,
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Internal(_) => 1,
            Failure::Closed => 0,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Internal(m) => m,
            Failure::Closed => "",
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ConstructionError> for Failure {
    fn from(e: ConstructionError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<ClassifyError> for Failure {
    fn from(e: ClassifyError) -> Self {
        match e {
            ClassifyError::CapExceeded { .. } => Failure::Internal(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        match e.kind() {
            std::io::ErrorKind::BrokenPipe => Failure::Closed,
            _ => Failure::Input(e.to_string()),
        }
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{rendered}")
            } else {
                write!(out, "{rendered}")
            };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => 0,
        Err(Failure::Closed) => 0,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.code()
        }
    }
}

fn word_arg(text: &str, k: usize) -> Result<Vec<Letter>, Failure> {
    let word = parse_word(text).ok_or_else(|| Failure::Input(format!("--word: `{text}` is not a digit string")))?;
    if let Some(x) = word.iter().find(|&&x| x >= k) {
        return Err(Failure::Input(format!(
            "--word: letter {x} is outside the alphabet 0..{k}"
        )));
    }
    Ok(word)
}

fn step_arg(step: usize) -> Result<usize, Failure> {
    if step == 0 {
        Err(Failure::Input("--step: step indices start at 1".into()))
    } else {
        Ok(step)
    }
}

fn load_group(file: &PathBuf) -> Result<AutomatonGroup, Failure> {
    Ok(AutomatonGroup::new(io::load(file)?)?)
}

fn load_element(args: &ElementArgs) -> Result<Element, Failure> {
    let group = load_group(&args.file)?;
    let step = step_arg(args.step)?;
    group
        .parse_element(&args.element, step)
        .map_err(|e| Failure::Input(format!("--element: {e}")))
}

fn parse_order(text: &str) -> Result<u32, Failure> {
    let bad = || Failure::Input(format!("--order: expected 2^r or a power of two, got `{text}`"));
    if let Some(r) = text.strip_prefix("2^") {
        return r.trim().parse().map_err(|_| bad());
    }
    let value: u64 = text.trim().parse().map_err(|_| bad())?;
    if value.is_power_of_two() {
        Ok(value.trailing_zeros())
    } else {
        Err(bad())
    }
}

fn emit_automaton(aut: &Automaton, output: Option<&PathBuf>, out: &mut dyn Write) -> Result<(), Failure> {
    match output {
        Some(path) => Ok(io::save(aut, path)?),
        None => Ok(write!(out, "{}", io::to_json(aut))?),
    }
}

fn execute(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Validate { file } => {
            let aut = io::load(&file)?;
            if !aut.is_invertible() {
                return Err(Failure::Input("automaton is not invertible".into()));
            }
            writeln!(out, "ok")?;
        }
        Command::Apply {
            file,
            state,
            step,
            word,
        } => {
            let aut = io::load(&file)?;
            let q = aut
                .state_index(&state)
                .ok_or_else(|| Failure::Input(format!("--state: unknown state `{state}`")))?;
            let word = word_arg(&word, aut.alphabet)?;
            let image = aut
                .apply(q, step_arg(step)?, &word)
                .map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(out, "{}", format_word(&image))?;
        }
        Command::Image { element, word } => {
            let g = load_element(&element)?;
            let word = word_arg(&word, g.group().alphabet())?;
            writeln!(out, "{}", format_word(&g.image(&word)?))?;
        }
        Command::Identity { element } => {
            let g = load_element(&element)?;
            let verdict = g.is_identity();
            match verdict.witness {
                None => writeln!(out, "true")?,
                Some(w) => {
                    writeln!(out, "false")?;
                    writeln!(out, "witness {}", format_word(&w))?;
                }
            }
        }
        Command::Order { element, max_exp } => {
            let g = load_element(&element)?;
            writeln!(out, "{}", g.order_pow2(max_exp)?)?;
        }
        Command::Commute { element, with } => {
            let g = load_element(&element)?;
            let h = g
                .group()
                .parse_element(&with, step_arg(element.step)?)
                .map_err(|e| Failure::Input(format!("--with: {e}")))?;
            writeln!(out, "{}", g.commute(&h)?)?;
        }
        Command::Classify {
            file,
            max_exp,
            rel_bound,
        } => {
            let aut = io::load(&file)?;
            writeln!(out, "{}", classify::classify(&aut, max_exp, rel_bound)?)?;
        }
        Command::Enumerate {
            states,
            alphabet,
            max_exp,
            rel_bound,
            report,
        } => {
            if alphabet == 2 && states > 3 {
                return Err(Failure::Internal(format!(
                    "--states {states}: enumeration over the binary alphabet is capped at 3 states"
                )));
            }
            let rows = classify::classify_all(states, alphabet, max_exp, rel_bound)?;
            let csv = classify::report_csv(&rows);
            match report {
                Some(path) => {
                    std::fs::write(&path, csv)?;
                    let mut counts: std::collections::BTreeMap<GroupType, usize> = Default::default();
                    for r in &rows {
                        *counts.entry(r.verdict.clone()).or_default() += 1;
                    }
                    writeln!(out, "{} automata", rows.len())?;
                    for (verdict, n) in counts {
                        writeln!(out, "{n:>6}  {verdict}")?;
                    }
                }
                None => write!(out, "{csv}")?,
            }
        }
        Command::Build { kind, output } => {
            let aut = match kind {
                BuildKind::Cyclic { order, infinite } => {
                    let spec = if infinite {
                        CyclicOrder::Infinite
                    } else {
                        let text = order.expect("clap requires --order without --infinite");
                        CyclicOrder::Finite(parse_order(&text)?)
                    };
                    constructions::cyclic_tva(spec)?
                }
                BuildKind::Mixed { torsion, free } => constructions::mixed_abelian_tva(&torsion, free)?,
                BuildKind::FreeAbelian { rank } => constructions::free_abelian_tva(rank)?,
                BuildKind::Sausage { states } => constructions::sausage_mealy(states)?,
                BuildKind::Shift { states } => constructions::cyclic_shift_mealy(states)?,
                BuildKind::Pad { file, states } => constructions::pad_states(&io::load(&file)?, states)?,
            };
            emit_automaton(&aut, output.as_ref(), out)?;
        }
        Command::Crosscheck {
            file,
            seed,
            count,
            length,
            depth,
        } => {
            let group = load_group(&file)?;
            let mut rng = StdRng::seed_from_u64(seed);
            let mut disagreements = 0;
            for _ in 0..count {
                let g = random_element(&group, &mut rng, length);
                if let Some(problem) = crosscheck_element(&g, depth)? {
                    disagreements += 1;
                    writeln!(out, "mismatch for {g}: {problem}")?;
                }
            }
            if disagreements > 0 {
                return Err(Failure::Internal(format!(
                    "{disagreements} of {count} elements disagree"
                )));
            }
            writeln!(out, "{count} elements agree up to depth {depth}")?;
        }
    }
    Ok(())
}

/// Random factor word of length `0..=max_len` at step 1.
pub fn random_element(group: &AutomatonGroup, rng: &mut impl Rng, max_len: usize) -> Element {
    let len = rng.gen_range(0..=max_len);
    let factors = (0..len)
        .map(|_| {
            let q = rng.gen_range(0..group.num_states());
            if rng.gen_bool(0.5) {
                Factor::pos(q)
            } else {
                Factor::neg(q)
            }
        })
        .collect();
    group.element(1, factors).expect("states are in range")
}

/// Compares the identity verdict with the action on all words of length
/// `depth`; returns a description of any disagreement.
pub fn crosscheck_element(g: &Element, depth: usize) -> Result<Option<String>, EngineError> {
    let verdict = g.is_identity();
    let k = g.group().alphabet();
    if let Some(w) = &verdict.witness {
        if &g.image(w)? == w {
            return Ok(Some(format!("witness {} is fixed", format_word(w))));
        }
        return Ok(None);
    }
    let total = k.checked_pow(depth as u32).unwrap_or(usize::MAX);
    for index in 0..total {
        let mut rest = index;
        let word: Vec<Letter> = (0..depth)
            .map(|_| {
                let x = rest % k;
                rest /= k;
                x
            })
            .collect();
        if g.image(&word)? != word {
            return Ok(Some(format!("identity verdict but {} moves", format_word(&word))));
        }
    }
    Ok(None)
}
