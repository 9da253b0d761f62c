//! Elements of the groups `G(A_i)` and their wreath recursions.
//!
//! An [`Element`] is a word of signed factors `q^{±1}` at a phase `i`. The
//! leftmost factor acts first on words, so `compose(a, b)` acts as `a` then
//! `b`. Sections and root permutations are computed by threading a letter
//! through the factors, which is the product and inverse rules of the wreath
//! recursion applied one factor at a time.
//!
//! [`Element::is_identity`] decides the word problem exactly: it walks the
//! section closure breadth-first, memoized on (reduced factor word, effective
//! phase). Reduction never lengthens a word, and there are finitely many
//! states and effective phases, so the walk always terminates.

use std::collections::{HashSet, VecDeque};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::automaton::{check_word, Automaton, Letter, ModelError, Permutation, StateId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("automaton is not invertible")]
    NotInvertible,
    #[error("elements live at different phases ({left} and {right})")]
    PhaseMismatch { left: usize, right: usize },
    #[error("elements belong to different automata")]
    DifferentAutomata,
    #[error("power-of-two orders need a binary alphabet, found k = {0}")]
    NonBinaryAlphabet(usize),
    #[error("unknown state `{0}`")]
    UnknownStateName(String),
    #[error("malformed element token `{0}`")]
    BadToken(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }
}

/// `q` or `q^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Factor {
    pub state: StateId,
    pub sign: Sign,
}

impl Factor {
    pub fn pos(state: StateId) -> Self {
        Factor { state, sign: Sign::Pos }
    }

    pub fn neg(state: StateId) -> Self {
        Factor { state, sign: Sign::Neg }
    }

    pub fn inverse(self) -> Self {
        Factor {
            state: self.state,
            sign: self.sign.flip(),
        }
    }

    fn cancels(self, other: Factor) -> bool {
        self.state == other.state && self.sign != other.sign
    }
}

/// Per-step data with labelings already turned into permutations.
#[derive(Debug)]
struct StepData {
    delta: Vec<Vec<StateId>>,
    labels: Vec<Permutation>,
    inverse_labels: Vec<Permutation>,
}

#[derive(Debug)]
struct Inner {
    automaton: Automaton,
    steps: Vec<StepData>,
    /// `trivial[e][q]`: state `q` acts as the identity from effective step `e + 1` on.
    trivial: Vec<Vec<bool>>,
}

/// A validated invertible automaton together with precomputed step data.
/// Cheap to clone.
#[derive(Debug, Clone)]
pub struct AutomatonGroup {
    inner: Arc<Inner>,
}

impl AutomatonGroup {
    pub fn new(automaton: Automaton) -> Result<Self, EngineError> {
        automaton.validate()?;
        if !automaton.is_invertible() {
            return Err(EngineError::NotInvertible);
        }
        let span = automaton.schedule.period_span();
        let steps: Vec<StepData> = (1..=span)
            .map(|e| {
                let table = automaton.schedule.table(e);
                let labels: Vec<Permutation> = (0..automaton.num_states())
                    .map(|q| table.label(q).expect("validated labels are bijections"))
                    .collect();
                StepData {
                    delta: table.delta.clone(),
                    inverse_labels: labels.iter().map(Permutation::inverse).collect(),
                    labels,
                }
            })
            .collect();
        let trivial = trivial_states(&automaton, &steps);
        Ok(AutomatonGroup {
            inner: Arc::new(Inner {
                automaton,
                steps,
                trivial,
            }),
        })
    }

    pub fn automaton(&self) -> &Automaton {
        &self.inner.automaton
    }

    pub fn alphabet(&self) -> usize {
        self.inner.automaton.alphabet
    }

    pub fn num_states(&self) -> usize {
        self.inner.automaton.num_states()
    }

    pub fn same_as(&self, other: &AutomatonGroup) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner)
    }

    fn effective(&self, phase: usize) -> usize {
        self.inner.automaton.schedule.effective_step(phase.max(1))
    }

    fn next_phase(&self, phase: usize) -> usize {
        self.inner.automaton.schedule.next_step(phase)
    }

    fn step(&self, phase: usize) -> &StepData {
        &self.inner.steps[phase - 1]
    }

    pub fn element(&self, phase: usize, factors: Vec<Factor>) -> Result<Element, EngineError> {
        if phase == 0 {
            return Err(ModelError::ZeroStep.into());
        }
        if let Some(f) = factors.iter().find(|f| f.state >= self.num_states()) {
            return Err(ModelError::UnknownState {
                state: f.state,
                states: self.num_states(),
            }
            .into());
        }
        Ok(Element {
            group: self.clone(),
            phase: self.effective(phase),
            factors,
        })
    }

    pub fn identity(&self, phase: usize) -> Element {
        Element {
            group: self.clone(),
            phase: self.effective(phase),
            factors: Vec::new(),
        }
    }

    /// The generator `q_i`.
    pub fn generator(&self, state: StateId, phase: usize) -> Element {
        assert!(state < self.num_states(), "state index out of range");
        Element {
            group: self.clone(),
            phase: self.effective(phase),
            factors: vec![Factor::pos(state)],
        }
    }

    pub fn generators(&self, phase: usize) -> Vec<Element> {
        (0..self.num_states()).map(|q| self.generator(q, phase)).collect()
    }

    /// `Π gens[j]^{exponents[j]}` in generator order.
    pub fn monomial(&self, phase: usize, exponents: &[i64]) -> Element {
        let mut factors = Vec::new();
        for (q, &e) in exponents.iter().enumerate() {
            let f = if e >= 0 { Factor::pos(q) } else { Factor::neg(q) };
            factors.extend(std::iter::repeat_n(f, e.unsigned_abs() as usize));
        }
        Element {
            group: self.clone(),
            phase: self.effective(phase),
            factors,
        }
        .free_reduced()
    }

    /// Parses `a1^2 * a2^-1 a3`: tokens separated by whitespace or `*`.
    /// The empty string and `id` denote the identity.
    pub fn parse_element(&self, text: &str, phase: usize) -> Result<Element, EngineError> {
        let mut factors = Vec::new();
        for token in text
            .split(|c: char| c == '*' || c.is_whitespace())
            .filter(|t| !t.is_empty())
        {
            let (name, exp) = match token.split_once('^') {
                Some((name, exp)) => {
                    let e: i64 = exp.parse().map_err(|_| EngineError::BadToken(token.into()))?;
                    if e == 0 {
                        return Err(EngineError::BadToken(token.into()));
                    }
                    (name, e)
                }
                None => (token, 1),
            };
            let state = match self.inner.automaton.state_index(name) {
                Some(q) => q,
                None if name == "id" => continue,
                None if name.is_empty() => return Err(EngineError::BadToken(token.into())),
                None => return Err(EngineError::UnknownStateName(name.into())),
            };
            let f = if exp > 0 {
                Factor::pos(state)
            } else {
                Factor::neg(state)
            };
            factors.extend(std::iter::repeat_n(f, exp.unsigned_abs() as usize));
        }
        Ok(self.element(phase, factors)?.free_reduced())
    }

    /// Sends letter `x` through `factors` at `phase`, returning the output
    /// letter and the section at `x` (one factor per input factor).
    fn thread(&self, factors: &[Factor], phase: usize, x: Letter) -> (Letter, Vec<Factor>) {
        let step = self.step(phase);
        let mut y = x;
        let mut section = Vec::with_capacity(factors.len());
        for f in factors {
            match f.sign {
                Sign::Pos => {
                    section.push(Factor::pos(step.delta[f.state][y]));
                    y = step.labels[f.state].apply(y);
                }
                Sign::Neg => {
                    y = step.inverse_labels[f.state].apply(y);
                    section.push(Factor::neg(step.delta[f.state][y]));
                }
            }
        }
        (y, section)
    }

    fn root_of(&self, factors: &[Factor], phase: usize) -> Permutation {
        let step = self.step(phase);
        let images = (0..self.alphabet())
            .map(|x| {
                factors.iter().fold(x, |y, f| match f.sign {
                    Sign::Pos => step.labels[f.state].apply(y),
                    Sign::Neg => step.inverse_labels[f.state].apply(y),
                })
            })
            .collect();
        Permutation::from_images(images).expect("product of bijections")
    }

    /// Drops factors that act trivially and cancels adjacent inverse pairs.
    fn canonical(&self, factors: impl IntoIterator<Item = Factor>, phase: usize) -> Vec<Factor> {
        let trivial = &self.inner.trivial[phase - 1];
        free_reduce(factors.into_iter().filter(|f| !trivial[f.state]))
    }

    /// States whose transformation at `phase` is the identity.
    pub fn trivial_states(&self, phase: usize) -> Vec<StateId> {
        let e = self.effective(phase);
        (0..self.num_states())
            .filter(|&q| self.inner.trivial[e - 1][q])
            .collect()
    }

    /// Applies the factors one after another to `word` in place.
    fn transduce(&self, factors: &[Factor], phase: usize, word: &mut [Letter]) {
        for f in factors {
            let mut q = f.state;
            let mut ph = phase;
            for slot in word.iter_mut() {
                let step = &self.inner.steps[ph - 1];
                let x = match f.sign {
                    Sign::Pos => {
                        let x = *slot;
                        *slot = step.labels[q].apply(x);
                        x
                    }
                    Sign::Neg => {
                        *slot = step.inverse_labels[q].apply(*slot);
                        *slot
                    }
                };
                q = step.delta[q][x];
                ph = self.next_phase(ph);
            }
        }
    }

    /// Per-state permutations of the words of length `depth` at `phase`,
    /// with their inverses.
    fn level_tables(&self, phase: usize, depth: usize) -> (Vec<Vec<usize>>, Vec<Vec<usize>>) {
        let k = self.alphabet();
        let n = self.num_states();
        let mut phases = vec![self.effective(phase)];
        for _ in 1..depth {
            phases.push(self.next_phase(*phases.last().unwrap()));
        }
        // built from the deepest letter upwards
        let mut tables: Vec<Vec<usize>> = vec![vec![0]; n];
        let mut width = 1;
        for &ph in phases.iter().rev() {
            let step = &self.inner.steps[ph - 1];
            tables = (0..n)
                .map(|q| {
                    let mut t = vec![0; width * k];
                    for x in 0..k {
                        let y = step.labels[q].apply(x);
                        let below = &tables[step.delta[q][x]];
                        for (rest, &image) in below.iter().enumerate() {
                            t[x * width + rest] = y * width + image;
                        }
                    }
                    t
                })
                .collect();
            width *= k;
        }
        let inverses = tables
            .iter()
            .map(|t| {
                let mut inv = vec![0; t.len()];
                for (i, &j) in t.iter().enumerate() {
                    inv[j] = i;
                }
                inv
            })
            .collect();
        (tables, inverses)
    }
}

/// Greatest fixed point: `(q, e)` is trivial iff its label is the identity
/// and every successor `(delta(q, x), e + 1)` is trivial.
fn trivial_states(automaton: &Automaton, steps: &[StepData]) -> Vec<Vec<bool>> {
    let schedule = &automaton.schedule;
    let mut trivial: Vec<Vec<bool>> = steps
        .iter()
        .map(|s| s.labels.iter().map(Permutation::is_identity).collect())
        .collect();
    let mut changed = true;
    while changed {
        changed = false;
        for e in 0..steps.len() {
            let next = schedule.next_step(e + 1) - 1;
            for q in 0..automaton.num_states() {
                if trivial[e][q] && steps[e].delta[q].iter().any(|&r| !trivial[next][r]) {
                    trivial[e][q] = false;
                    changed = true;
                }
            }
        }
    }
    trivial
}

fn free_reduce(factors: impl IntoIterator<Item = Factor>) -> Vec<Factor> {
    let mut out: Vec<Factor> = Vec::new();
    for f in factors {
        match out.last() {
            Some(&last) if last.cancels(f) => {
                out.pop();
            }
            _ => out.push(f),
        }
    }
    out
}

const PROBE_DEPTH: usize = 64;
/// Closure members visited before the level scan is tried.
const QUICK_CLOSURE: usize = 4096;
/// Largest level scanned, in words.
const LEVEL_WORDS: usize = 1 << 14;
/// Rough cap on factor applications per level scan.
const LEVEL_WORK: usize = 1 << 22;
/// Probe words for orbit bounds and deep witnesses, see [`test_words`].
const RANDOM_WORDS: usize = 4;
const PROBE_PREFIXES: usize = 8;
const PROBE_PERIODS: usize = 16;
const ORBIT_DEPTH: usize = 256;
/// Length range of the deep test words tried before an unbounded closure
/// search, and the rough work cap (letters times factors) per word.
const DEEP_WORD: (usize, usize) = (256, 1 << 14);
const DEEP_WORK: usize = 1 << 23;

/// Closure search node: (factors, phase, parent index and letter).
type ClosureNode = (Vec<Factor>, usize, Option<(usize, Letter)>);

/// A group element: signed factor word at an effective phase.
#[derive(Clone)]
pub struct Element {
    group: AutomatonGroup,
    phase: usize,
    factors: Vec<Factor>,
}

/// `g = (g|_0, …, g|_{k-1}) σ_g`.
#[derive(Debug, Clone)]
pub struct WreathRecursion {
    pub root: Permutation,
    pub sections: Vec<Element>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityVerdict {
    pub is_identity: bool,
    /// A word moved by the element; present iff it is not the identity.
    pub witness: Option<Vec<Letter>>,
}

/// Result of [`Element::order_pow2`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Order {
    Finite(u64),
    ExceedsBound { max_exp: u32 },
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(o) => write!(f, "{o}"),
            Order::ExceedsBound { max_exp } => write!(f, "exceeds 2^{max_exp}"),
        }
    }
}

impl Element {
    pub fn group(&self) -> &AutomatonGroup {
        &self.group
    }

    /// Effective phase (reduced modulo the schedule cycle).
    pub fn phase(&self) -> usize {
        self.phase
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    fn with_factors(&self, phase: usize, factors: Vec<Factor>) -> Element {
        Element {
            group: self.group.clone(),
            phase,
            factors,
        }
    }

    fn check_compatible(&self, other: &Element) -> Result<(), EngineError> {
        if !self.group.same_as(&other.group) {
            return Err(EngineError::DifferentAutomata);
        }
        if self.phase != other.phase {
            return Err(EngineError::PhaseMismatch {
                left: self.phase,
                right: other.phase,
            });
        }
        Ok(())
    }

    pub fn free_reduced(&self) -> Element {
        self.with_factors(self.phase, free_reduce(self.factors.iter().copied()))
    }

    /// Same transformation with provably trivial factors removed and
    /// adjacent inverse pairs cancelled.
    pub fn reduced(&self) -> Element {
        self.with_factors(
            self.phase,
            self.group.canonical(self.factors.iter().copied(), self.phase),
        )
    }

    /// `self` then `other`, with free cancellation at the seam.
    pub fn compose(&self, other: &Element) -> Result<Element, EngineError> {
        self.check_compatible(other)?;
        let factors = free_reduce(self.factors.iter().chain(&other.factors).copied());
        Ok(self.with_factors(self.phase, factors))
    }

    pub fn invert(&self) -> Element {
        let factors = self.factors.iter().rev().map(|f| f.inverse()).collect();
        self.with_factors(self.phase, factors)
    }

    /// `self^e` by repeated squaring; negative exponents invert first.
    pub fn pow(&self, e: i64) -> Element {
        let mut base = if e < 0 { self.invert() } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = self.with_factors(self.phase, Vec::new());
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base).expect("same group and phase");
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base).expect("same group and phase");
            }
        }
        acc
    }

    pub fn root_permutation(&self) -> Permutation {
        self.group.root_of(&self.factors, self.phase)
    }

    /// Section at letter `x`, at the next phase. The result has exactly as
    /// many factors as `self`; no cancellation is applied.
    pub fn section(&self, x: Letter) -> Element {
        let (_, factors) = self.group.thread(&self.factors, self.phase, x);
        self.with_factors(self.group.next_phase(self.phase), factors)
    }

    /// Section at a word, `g|_w`.
    pub fn section_at(&self, word: &[Letter]) -> Element {
        word.iter().fold(self.clone(), |g, &x| g.section(x))
    }

    pub fn wreath(&self) -> WreathRecursion {
        WreathRecursion {
            root: self.root_permutation(),
            sections: (0..self.group.alphabet()).map(|x| self.section(x)).collect(),
        }
    }

    pub fn in_first_level_stabilizer(&self) -> bool {
        self.root_permutation().is_identity()
    }

    /// `g(w) = σ_{g_0}(x_1) σ_{g_1}(x_2) …` with `g_j = g|_{x_1…x_j}`.
    pub fn image(&self, word: &[Letter]) -> Result<Vec<Letter>, EngineError> {
        check_word(word, self.group.alphabet())?;
        let mut factors = self.group.canonical(self.factors.iter().copied(), self.phase);
        let mut phase = self.phase;
        let mut out = Vec::with_capacity(word.len());
        for &x in word {
            if factors.is_empty() {
                out.push(x);
                continue;
            }
            let (y, section) = self.group.thread(&factors, phase, x);
            out.push(y);
            phase = self.group.next_phase(phase);
            factors = self.group.canonical(section, phase);
        }
        Ok(out)
    }

    /// Exact identity decision by breadth-first search of the section
    /// closure. A bounded closure search runs first, then a level-by-level
    /// scan of the tree and a few deep test words, and only then the
    /// unbounded search.
    pub fn is_identity(&self) -> IdentityVerdict {
        if let Some(verdict) = self.closure_search(Some(QUICK_CLOSURE)) {
            return verdict;
        }
        let found = self
            .level_witness(self.level_budget())
            .or_else(|| self.deep_witness((DEEP_WORK / self.factors.len().max(1)).clamp(DEEP_WORD.0, DEEP_WORD.1)));
        if let Some(w) = found {
            return IdentityVerdict {
                is_identity: false,
                witness: Some(w),
            };
        }
        self.closure_search(None).expect("unbounded search always finishes")
    }

    /// `None` when more than `limit` closure members were visited.
    fn closure_search(&self, limit: Option<usize>) -> Option<IdentityVerdict> {
        let group = &self.group;
        let k = group.alphabet();
        let start = group.canonical(self.factors.iter().copied(), self.phase);
        let mut nodes: Vec<ClosureNode> = Vec::new();
        let mut seen: HashSet<(Vec<Factor>, usize)> = HashSet::new();
        let mut queue = VecDeque::new();
        if !start.is_empty() {
            seen.insert((start.clone(), self.phase));
            nodes.push((start, self.phase, None));
            queue.push_back(0);
        }
        while let Some(idx) = queue.pop_front() {
            if limit.is_some_and(|l| nodes.len() > l) {
                return None;
            }
            let phase = nodes[idx].1;
            let next = group.next_phase(phase);
            let mut sections = Vec::with_capacity(k);
            let mut moved = None;
            for x in 0..k {
                let (y, section) = group.thread(&nodes[idx].0, phase, x);
                if y != x {
                    moved = Some(x);
                    break;
                }
                sections.push(section);
            }
            if let Some(x) = moved {
                let mut witness = vec![x];
                let mut cursor = idx;
                while let Some((parent, letter)) = nodes[cursor].2 {
                    witness.push(letter);
                    cursor = parent;
                }
                witness.reverse();
                return Some(IdentityVerdict {
                    is_identity: false,
                    witness: Some(witness),
                });
            }
            for (x, section) in sections.into_iter().enumerate() {
                let reduced = group.canonical(section, next);
                if reduced.is_empty() {
                    continue;
                }
                if seen.insert((reduced.clone(), next)) {
                    nodes.push((reduced, next, Some((idx, x))));
                    queue.push_back(nodes.len() - 1);
                }
            }
        }
        Some(IdentityVerdict {
            is_identity: true,
            witness: None,
        })
    }

    /// Permutation induced on the `k^depth` words of length `depth`; word
    /// `i` spells `i` in base `k`, first letter most significant.
    pub fn level_action(&self, depth: usize) -> Vec<usize> {
        let (forward, backward) = self.group.level_tables(self.phase, depth);
        let mut acc: Vec<usize> = (0..forward[0].len()).collect();
        for f in &self.factors {
            let p = match f.sign {
                Sign::Pos => &forward[f.state],
                Sign::Neg => &backward[f.state],
            };
            for v in acc.iter_mut() {
                *v = p[*v];
            }
        }
        acc
    }

    /// Word budget for level scans, scaled so one scan stays cheap.
    fn level_budget(&self) -> usize {
        (LEVEL_WORK / self.factors.len().max(1)).clamp(self.group.alphabet(), LEVEL_WORDS)
    }

    /// Shortest moved word among levels with at most `budget` words.
    fn level_witness(&self, budget: usize) -> Option<Vec<Letter>> {
        let k = self.group.alphabet();
        let mut depth = 1;
        while k.pow(depth as u32) <= budget {
            let action = self.level_action(depth);
            if let Some(i) = action.iter().enumerate().position(|(i, &j)| i != j) {
                return Some(spell(i, k, depth));
            }
            depth += 1;
        }
        None
    }

    /// Longest orbit among the test words of length
    /// `ORBIT_DEPTH + 8 limit`, counting at most `limit + 1` steps per orbit.
    /// Every orbit length divides the order.
    fn orbit_bound(&self, limit: u64) -> u64 {
        let factors = self.group.canonical(self.factors.iter().copied(), self.phase);
        let depth = ORBIT_DEPTH + 8 * limit as usize;
        let mut best = 1;
        for start in test_words(self.group.alphabet(), depth) {
            let mut w = start.clone();
            let mut len = 0;
            loop {
                self.group.transduce(&factors, self.phase, &mut w);
                len += 1;
                if w == start || len > limit {
                    break;
                }
            }
            if len > limit {
                return len;
            }
            best = best.max(len);
        }
        best
    }

    /// Shortest moved prefix of a test word of length `depth`, if any.
    fn deep_witness(&self, depth: usize) -> Option<Vec<Letter>> {
        let factors = self.group.canonical(self.factors.iter().copied(), self.phase);
        for start in test_words(self.group.alphabet(), depth) {
            let mut w = start.clone();
            self.group.transduce(&factors, self.phase, &mut w);
            if let Some(i) = w.iter().zip(&start).position(|(a, b)| a != b) {
                return Some(start[..=i].to_vec());
            }
        }
        None
    }

    /// Follows each constant path `x x x …` for up to `depth` letters and
    /// returns a word the element moves, if one turns up.
    pub fn probe(&self, depth: usize) -> Option<Vec<Letter>> {
        let group = &self.group;
        for x in 0..group.alphabet() {
            let mut factors = group.canonical(self.factors.iter().copied(), self.phase);
            let mut phase = self.phase;
            for d in 0..depth {
                if factors.is_empty() {
                    break;
                }
                let (y, section) = group.thread(&factors, phase, x);
                if y != x {
                    return Some(vec![x; d + 1]);
                }
                phase = group.next_phase(phase);
                factors = group.canonical(section, phase);
            }
        }
        None
    }

    /// Boolean identity decision: a short probe first, then the full
    /// decision procedure.
    fn is_trivial(&self) -> bool {
        self.probe(PROBE_DEPTH).is_none() && self.is_identity().is_identity
    }

    pub fn equal(&self, other: &Element) -> Result<bool, EngineError> {
        Ok(self.compose(&other.invert())?.is_trivial())
    }

    /// `[a, b] = a b a⁻¹ b⁻¹` is trivial.
    pub fn commute(&self, other: &Element) -> Result<bool, EngineError> {
        let commutator = self.compose(other)?.compose(&self.invert())?.compose(&other.invert())?;
        Ok(commutator.is_trivial())
    }

    /// Smallest `2^e`, `e ≤ max_exp`, with `g^{2^e} = id`. Over the binary
    /// alphabet every finite order is a power of two, so no other exponent
    /// needs testing.
    pub fn order_pow2(&self, max_exp: u32) -> Result<Order, EngineError> {
        let k = self.group.alphabet();
        if k != 2 {
            return Err(EngineError::NonBinaryAlphabet(k));
        }
        let base = self.reduced();
        let mut power = base.clone();
        for e in 0..=max_exp {
            let trivial = power.probe(PROBE_DEPTH).is_none()
                && match power.closure_search(Some(QUICK_CLOSURE)) {
                    Some(verdict) => verdict.is_identity,
                    // an orbit longer than 2^e refutes g^{2^e} = id without
                    // exploring the (possibly huge) closure of the power
                    None => base.orbit_bound(1 << e) <= 1 << e && power.is_identity().is_identity,
                };
            if trivial {
                return Ok(Order::Finite(1u64 << e));
            }
            if e < max_exp {
                power = power.compose(&power)?.reduced();
            }
        }
        Ok(Order::ExceedsBound { max_exp })
    }
}

/// Fixed probe words of length `depth`: a few pseudo-random words, then
/// every eventually periodic word `p u u u …` with `k^|p| ≤ PROBE_PREFIXES`
/// and `k^|u| ≤ PROBE_PERIODS`, shortest period first. A fixed seed keeps
/// every verdict deterministic.
fn test_words(k: usize, depth: usize) -> Vec<Vec<Letter>> {
    let mut state: u64 = 0x9e37_79b9_7f4a_7c15;
    let mut words: Vec<Vec<Letter>> = (0..RANDOM_WORDS)
        .map(|_| {
            (0..depth)
                .map(|i| {
                    // xorshift
                    state ^= state << 13;
                    state ^= state >> 7;
                    state ^= state << 17;
                    ((state >> 32) as usize + i) % k
                })
                .collect()
        })
        .collect();
    let mut seen = HashSet::new();
    let fits = |len: usize, cap: usize| k.pow(len as u32) <= cap;
    for ulen in (1..).take_while(|&l| fits(l, PROBE_PERIODS)) {
        for plen in (0..).take_while(|&l| fits(l, PROBE_PREFIXES)) {
            for pi in 0..k.pow(plen as u32) {
                let prefix = spell(pi, k, plen);
                for ui in 0..k.pow(ulen as u32) {
                    let u = spell(ui, k, ulen);
                    let w: Vec<Letter> = prefix
                        .iter()
                        .copied()
                        .chain((0..).map(|j| u[j % ulen]))
                        .take(depth)
                        .collect();
                    if seen.insert(w.clone()) {
                        words.push(w);
                    }
                }
            }
        }
    }
    words
}

fn spell(mut i: usize, k: usize, depth: usize) -> Vec<Letter> {
    let mut w = vec![0; depth];
    for slot in w.iter_mut().rev() {
        *slot = i % k;
        i /= k;
    }
    w
}

impl PartialEq for Element {
    /// Syntactic equality of factor words; use [`Element::equal`] for
    /// equality in the group.
    fn eq(&self, other: &Self) -> bool {
        self.group.same_as(&other.group) && self.phase == other.phase && self.factors == other.factors
    }
}

impl Eq for Element {}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({} @ {})", self, self.phase)
    }
}

impl fmt::Display for Element {
    /// Runs of equal factors are printed as powers: `a1^2*a2^-1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "id");
        }
        let names = &self.group.automaton().states;
        let mut first = true;
        for run in self.factors.chunk_by(|a, b| a == b) {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            let name = &names[run[0].state];
            match (run[0].sign, run.len()) {
                (Sign::Pos, 1) => write!(f, "{name}")?,
                (Sign::Pos, n) => write!(f, "{name}^{n}")?,
                (Sign::Neg, n) => write!(f, "{name}^-{n}")?,
            }
        }
        Ok(())
    }
}
