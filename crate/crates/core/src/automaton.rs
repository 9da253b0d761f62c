//! Invertible Mealy and time-varying automata over a finite alphabet.
//!
//! A time-varying automaton is stored with an eventually periodic schedule:
//! a finite prefix of step tables followed by a nonempty cycle that repeats
//! forever. Step indices are 1-based. A Mealy automaton is the special case
//! of an empty prefix and a cycle of length one.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A letter of the alphabet `0..k`.
pub type Letter = usize;
/// Index of a state in [`Automaton::states`].
pub type StateId = usize;

/// Errors reported by [`Automaton::validate`] and word application.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("alphabet size {0} is below 2")]
    AlphabetTooSmall(usize),
    #[error("automaton has no states")]
    NoStates,
    #[error("duplicate state name `{0}`")]
    DuplicateState(String),
    #[error("schedule cycle is empty")]
    EmptyCycle,
    #[error("{table}: expected {expected} rows in `{field}`, found {found}")]
    RowCount {
        table: TableLocation,
        field: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("{table}: `{field}` row {state} has {found} entries, expected {expected}")]
    RowLength {
        table: TableLocation,
        field: &'static str,
        state: StateId,
        expected: usize,
        found: usize,
    },
    #[error("{table}: delta[{state}][{letter}] = {target} is not a state index (n = {states})")]
    StateOutOfRange {
        table: TableLocation,
        state: StateId,
        letter: Letter,
        target: usize,
        states: usize,
    },
    #[error("{table}: rho[{state}][{letter}] = {image} is not a letter (k = {alphabet})")]
    LetterOutOfRange {
        table: TableLocation,
        state: StateId,
        letter: Letter,
        image: usize,
        alphabet: usize,
    },
    #[error("{table}: rho[{state}] = {images:?} is not a bijection")]
    NotBijective {
        table: TableLocation,
        state: StateId,
        images: Vec<Letter>,
    },
    #[error("state index {state} out of range (n = {states})")]
    UnknownState { state: StateId, states: usize },
    #[error("letter {letter} at position {position} out of range (k = {alphabet})")]
    WordLetter {
        letter: Letter,
        position: usize,
        alphabet: usize,
    },
    #[error("step index must be at least 1")]
    ZeroStep,
}

/// Where a step table sits inside a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableLocation {
    Prefix(usize),
    Cycle(usize),
}

impl fmt::Display for TableLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableLocation::Prefix(i) => write!(f, "prefix[{i}]"),
            TableLocation::Cycle(i) => write!(f, "cycle[{i}]"),
        }
    }
}

/// A permutation of the alphabet, stored as its image list.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<Letter>);

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation((0..k).collect())
    }

    /// The transposition of letters `a` and `b`.
    pub fn swap(k: usize, a: Letter, b: Letter) -> Self {
        let mut images: Vec<Letter> = (0..k).collect();
        images.swap(a, b);
        Permutation(images)
    }

    /// Builds a permutation from its image list, or returns `None` if the
    /// list is not a bijection of `0..len`.
    pub fn from_images(images: Vec<Letter>) -> Option<Self> {
        if is_bijection(&images) {
            Some(Permutation(images))
        } else {
            None
        }
    }

    pub fn images(&self) -> &[Letter] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn apply(&self, x: Letter) -> Letter {
        self.0[x]
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (x, &y) in self.0.iter().enumerate() {
            inv[y] = x;
        }
        Permutation(inv)
    }

    /// `self` followed by `other`: `x ↦ other(self(x))`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        Permutation(self.0.iter().map(|&y| other.0[y]).collect())
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(x, &y)| x == y)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, y) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{y}")?;
        }
        write!(f, "]")
    }
}

pub(crate) fn is_bijection(images: &[Letter]) -> bool {
    let mut seen = vec![false; images.len()];
    for &y in images {
        if y >= images.len() || seen[y] {
            return false;
        }
        seen[y] = true;
    }
    true
}

/// One step of an automaton: the transition map and per-state output labels.
///
/// `delta[q][x]` is the next state and `rho[q][x]` the output letter when
/// state `q` reads `x`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StepTable {
    pub delta: Vec<Vec<StateId>>,
    pub rho: Vec<Vec<Letter>>,
}

impl StepTable {
    /// All states loop to themselves with identity labels.
    pub fn inert(states: usize, k: usize) -> Self {
        StepTable {
            delta: (0..states).map(|q| vec![q; k]).collect(),
            rho: (0..states).map(|_| (0..k).collect()).collect(),
        }
    }

    pub fn states(&self) -> usize {
        self.delta.len()
    }

    #[inline]
    pub fn next(&self, q: StateId, x: Letter) -> StateId {
        self.delta[q][x]
    }

    #[inline]
    pub fn output(&self, q: StateId, x: Letter) -> Letter {
        self.rho[q][x]
    }

    /// Labeling of state `q`, if it is a bijection.
    pub fn label(&self, q: StateId) -> Option<Permutation> {
        Permutation::from_images(self.rho[q].clone())
    }

    fn is_invertible(&self) -> bool {
        self.rho.iter().all(|row| is_bijection(row))
    }

    fn check(&self, at: TableLocation, n: usize, k: usize) -> Result<(), ModelError> {
        for (field, rows) in [("delta", self.delta.len()), ("rho", self.rho.len())] {
            if rows != n {
                return Err(ModelError::RowCount {
                    table: at,
                    field,
                    expected: n,
                    found: rows,
                });
            }
        }
        for q in 0..n {
            for (field, len) in [("delta", self.delta[q].len()), ("rho", self.rho[q].len())] {
                if len != k {
                    return Err(ModelError::RowLength {
                        table: at,
                        field,
                        state: q,
                        expected: k,
                        found: len,
                    });
                }
            }
            for x in 0..k {
                let target = self.delta[q][x];
                if target >= n {
                    return Err(ModelError::StateOutOfRange {
                        table: at,
                        state: q,
                        letter: x,
                        target,
                        states: n,
                    });
                }
                let image = self.rho[q][x];
                if image >= k {
                    return Err(ModelError::LetterOutOfRange {
                        table: at,
                        state: q,
                        letter: x,
                        image,
                        alphabet: k,
                    });
                }
            }
            if !is_bijection(&self.rho[q]) {
                return Err(ModelError::NotBijective {
                    table: at,
                    state: q,
                    images: self.rho[q].clone(),
                });
            }
        }
        Ok(())
    }
}

/// Eventually periodic sequence of step tables.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub prefix: Vec<StepTable>,
    pub cycle: Vec<StepTable>,
}

impl Schedule {
    pub fn constant(table: StepTable) -> Self {
        Schedule {
            prefix: Vec::new(),
            cycle: vec![table],
        }
    }

    /// Number of distinct step positions: `|prefix| + |cycle|`.
    pub fn period_span(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// Reduces a 1-based step index to its representative in
    /// `1..=|prefix| + |cycle|`.
    pub fn effective_step(&self, i: usize) -> usize {
        debug_assert!(i >= 1);
        let p = self.prefix.len();
        if i <= p {
            i
        } else {
            p + (i - p - 1) % self.cycle.len() + 1
        }
    }

    /// Effective step that follows effective step `i`.
    pub fn next_step(&self, i: usize) -> usize {
        self.effective_step(i + 1)
    }

    pub fn table(&self, i: usize) -> &StepTable {
        let e = self.effective_step(i);
        let p = self.prefix.len();
        if e <= p {
            &self.prefix[e - 1]
        } else {
            &self.cycle[e - p - 1]
        }
    }

    fn tables(&self) -> impl Iterator<Item = (TableLocation, &StepTable)> {
        self.prefix
            .iter()
            .enumerate()
            .map(|(i, t)| (TableLocation::Prefix(i), t))
            .chain(self.cycle.iter().enumerate().map(|(i, t)| (TableLocation::Cycle(i), t)))
    }
}

/// An automaton with named states and an eventually periodic schedule.
///
/// The serialized form is the automaton file format: keys `alphabet`,
/// `states`, `prefix` and `cycle`, with 0-based indices in every table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Automaton {
    pub alphabet: usize,
    pub states: Vec<String>,
    #[serde(flatten)]
    pub schedule: Schedule,
}

impl Automaton {
    pub fn new(alphabet: usize, states: Vec<String>, schedule: Schedule) -> Self {
        Automaton {
            alphabet,
            states,
            schedule,
        }
    }

    pub fn mealy(alphabet: usize, states: Vec<String>, table: StepTable) -> Self {
        Automaton::new(alphabet, states, Schedule::constant(table))
    }

    /// States named `a1..an`.
    pub fn default_names(n: usize) -> Vec<String> {
        (1..=n).map(|j| format!("a{j}")).collect()
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn is_mealy(&self) -> bool {
        self.schedule.prefix.is_empty() && self.schedule.cycle.len() == 1
    }

    pub fn state_index(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    /// Checks every structural invariant and reports the first violation.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.alphabet < 2 {
            return Err(ModelError::AlphabetTooSmall(self.alphabet));
        }
        if self.states.is_empty() {
            return Err(ModelError::NoStates);
        }
        let mut names = HashSet::new();
        for s in &self.states {
            if !names.insert(s.as_str()) {
                return Err(ModelError::DuplicateState(s.clone()));
            }
        }
        if self.schedule.cycle.is_empty() {
            return Err(ModelError::EmptyCycle);
        }
        let n = self.states.len();
        for (at, table) in self.schedule.tables() {
            table.check(at, n, self.alphabet)?;
        }
        Ok(())
    }

    /// True iff every labeling in every stored step table is a bijection.
    pub fn is_invertible(&self) -> bool {
        self.schedule.tables().all(|(_, t)| t.is_invertible())
    }

    pub fn step_table(&self, i: usize) -> &StepTable {
        assert!(i >= 1, "step indices start at 1");
        self.schedule.table(i)
    }

    /// Image of `word` under the transformation of `state` in its `i`-th
    /// transition.
    pub fn apply(&self, state: StateId, i: usize, word: &[Letter]) -> Result<Vec<Letter>, ModelError> {
        if i == 0 {
            return Err(ModelError::ZeroStep);
        }
        if state >= self.num_states() {
            return Err(ModelError::UnknownState {
                state,
                states: self.num_states(),
            });
        }
        check_word(word, self.alphabet)?;
        let mut q = state;
        let mut step = self.schedule.effective_step(i);
        let mut out = Vec::with_capacity(word.len());
        for &x in word {
            let table = self.schedule.table(step);
            out.push(table.output(q, x));
            q = table.next(q, x);
            step = self.schedule.next_step(step);
        }
        Ok(out)
    }
}

pub(crate) fn check_word(word: &[Letter], k: usize) -> Result<(), ModelError> {
    match word.iter().position(|&x| x >= k) {
        Some(position) => Err(ModelError::WordLetter {
            letter: word[position],
            position,
            alphabet: k,
        }),
        None => Ok(()),
    }
}

/// Parses a word written as a string of decimal digits, e.g. `0101`.
pub fn parse_word(text: &str) -> Option<Vec<Letter>> {
    text.trim()
        .chars()
        .map(|c| c.to_digit(10).map(|d| d as Letter))
        .collect()
}

pub fn format_word(word: &[Letter]) -> String {
    word.iter().map(|x| x.to_string()).collect()
}
