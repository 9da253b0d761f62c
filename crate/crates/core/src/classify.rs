//! Enumeration of invertible Mealy automata and identification of the
//! abelian groups they generate.
//!
//! An abelian group generated by a binary Mealy automaton is either free
//! abelian or an elementary abelian 2-group. The classifier uses that
//! dichotomy: one generator of finite order > 1 sends it down the elementary
//! abelian branch, which is decided exactly by counting distinct subset
//! products. Otherwise the rank comes from the lattice of integer relations
//! among the generators, searched up to a fixed exponent bound.

use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::automaton::{Automaton, Letter, StepTable};
use crate::engine::{AutomatonGroup, Element, EngineError, Factor, Order};
use crate::lattice::{echelon_coordinates, hermite_normal_form, smith_invariants, Scalar};

/// Largest number of automata [`enumerate_invertible_mealy`] will produce.
pub const ENUMERATION_CAP: u64 = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("group is not abelian")]
    NotAbelian,
    #[error("classification needs a Mealy automaton (empty prefix, one-step cycle)")]
    NotMealy,
    #[error("{count} automata exceed the enumeration cap of {cap}")]
    CapExceeded { count: u128, cap: u64 },
    #[error("enumeration needs n ≥ 1 and k ≥ 2 (got n = {n}, k = {k})")]
    BadShape { n: usize, k: usize },
    #[error("generators must share one automaton and phase")]
    MixedGenerators,
}

/// Isomorphism type verdict.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GroupType {
    Trivial,
    ElementaryAbelian {
        rank: usize,
    },
    /// Torsion-freeness is checked up to order `2^max_exp`, relation-freeness
    /// up to exponent `relation_bound`.
    FreeAbelian {
        rank: usize,
        relation_bound: u32,
    },
    NonAbelian,
    Unknown {
        max_exp: u32,
        relation_bound: u32,
        reason: String,
    },
}

impl GroupType {
    pub fn name(&self) -> &'static str {
        match self {
            GroupType::Trivial => "Trivial",
            GroupType::ElementaryAbelian { .. } => "ElementaryAbelian",
            GroupType::FreeAbelian { .. } => "FreeAbelian",
            GroupType::NonAbelian => "NonAbelian",
            GroupType::Unknown { .. } => "Unknown",
        }
    }

    pub fn rank(&self) -> Option<usize> {
        match self {
            GroupType::Trivial => Some(0),
            GroupType::ElementaryAbelian { rank } | GroupType::FreeAbelian { rank, .. } => Some(*rank),
            _ => None,
        }
    }

    pub fn is_abelian(&self) -> bool {
        !matches!(self, GroupType::NonAbelian)
    }
}

impl fmt::Display for GroupType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupType::Trivial => write!(f, "Trivial"),
            GroupType::ElementaryAbelian { rank } => write!(f, "ElementaryAbelian({rank})"),
            GroupType::FreeAbelian { rank, relation_bound } => {
                write!(f, "FreeAbelian({rank}, K={relation_bound})")
            }
            GroupType::NonAbelian => write!(f, "NonAbelian"),
            GroupType::Unknown {
                max_exp,
                relation_bound,
                reason,
            } => write!(f, "Unknown(max_exp={max_exp}, K={relation_bound}: {reason})"),
        }
    }
}

/// Integer relations `Π g_j^{v_j} = id` among commuting generators, found by
/// exhaustive search over `max |v_j| ≤ bound`.
#[derive(Debug, Clone)]
pub struct RelationLattice<T> {
    pub generators: Vec<Element>,
    pub bound: u32,
    /// Relations found, normalized so the first nonzero entry is positive.
    pub relations: Vec<Vec<T>>,
    /// Hermite basis of the lattice spanned by `relations`.
    pub basis: Vec<Vec<T>>,
    pivots: Vec<usize>,
    transform: Vec<Vec<T>>,
    /// Smith invariants of the lattice; entries above 1 are torsion of the quotient.
    pub invariants: Vec<T>,
}

impl<T: Scalar> RelationLattice<T> {
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Rank of `Z^n / L`, i.e. the free rank of the group if no relation
    /// escapes the search box.
    pub fn free_rank(&self) -> usize {
        self.generators.len() - self.rank()
    }

    /// Invariant factors `d > 1` of the quotient `Z^n / L`.
    pub fn torsion(&self) -> Vec<T> {
        self.invariants.iter().filter(|d| !d.is_one()).cloned().collect()
    }

    pub fn contains(&self, v: &[T]) -> bool {
        echelon_coordinates(&self.basis, &self.pivots, v).is_some()
    }

    /// Re-checks every relation in the group and that `basis` and
    /// `relations` span the same lattice.
    pub fn verify(&self) -> bool {
        let Some(group) = self.generators.first().map(|g| g.group().clone()) else {
            return self.relations.is_empty() && self.basis.is_empty();
        };
        let phase = self.generators[0].phase();
        let relations_hold = self.relations.iter().all(|v| {
            let exps: Option<Vec<i64>> = v.iter().map(|x| x.to_i64()).collect();
            exps.map(|e| product(&group, phase, &self.generators, &e).is_identity().is_identity)
                .unwrap_or(false)
        });
        let relations_in_basis = self.relations.iter().all(|v| self.contains(v));
        let dim = self.generators.len();
        let basis_from_relations = self.transform.iter().zip(&self.basis).all(|(coeffs, b)| {
            (0..dim).all(|c| {
                let combo = coeffs
                    .iter()
                    .zip(&self.relations)
                    .fold(T::zero(), |acc, (x, r)| acc + x.clone() * r[c].clone());
                combo == b[c]
            })
        });
        relations_hold && relations_in_basis && basis_from_relations
    }
}

fn product(group: &AutomatonGroup, phase: usize, gens: &[Element], exps: &[i64]) -> Element {
    gens.iter().zip(exps).fold(group.identity(phase), |acc, (g, &e)| {
        acc.compose(&g.pow(e)).expect("generators share group and phase")
    })
}

/// Vectors in `[-bound, bound]^n` whose first nonzero entry is positive.
fn half_box(n: usize, bound: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut v = vec![-bound; n];
    if n == 0 {
        return out;
    }
    loop {
        if v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
            out.push(v.clone());
        }
        let mut i = n;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if v[i] < bound {
                v[i] += 1;
                break;
            }
            v[i] = -bound;
        }
    }
}

/// Searches every exponent vector with entries in `[-bound, bound]` and
/// reduces the relations found to a Hermite basis.
pub fn relation_lattice<T: Scalar>(gens: &[Element], bound: u32) -> Result<RelationLattice<T>, ClassifyError> {
    let n = gens.len();
    if let Some(first) = gens.first() {
        if gens
            .iter()
            .any(|g| !g.group().same_as(first.group()) || g.phase() != first.phase())
        {
            return Err(ClassifyError::MixedGenerators);
        }
    }
    let relations_i64: Vec<Vec<i64>> = match gens.first() {
        None => Vec::new(),
        Some(first) => {
            let group = first.group().clone();
            let phase = first.phase();
            half_box(n, bound as i64)
                .into_par_iter()
                .filter(|v| product(&group, phase, gens, v).is_identity().is_identity)
                .collect()
        }
    };
    let relations: Vec<Vec<T>> = relations_i64
        .iter()
        .map(|v| {
            v.iter()
                .map(|&x| T::from_i64(x).expect("small exponents fit"))
                .collect()
        })
        .collect();
    let form = hermite_normal_form(&relations, n);
    let invariants = smith_invariants(&form.basis, n);
    Ok(RelationLattice {
        generators: gens.to_vec(),
        bound,
        relations,
        basis: form.basis,
        pivots: form.pivots,
        transform: form.transform,
        invariants,
    })
}

fn mealy_group(aut: &Automaton) -> Result<AutomatonGroup, ClassifyError> {
    if !aut.is_mealy() {
        return Err(ClassifyError::NotMealy);
    }
    Ok(AutomatonGroup::new(aut.clone())?)
}

fn generators_commute(group: &AutomatonGroup) -> Result<bool, ClassifyError> {
    let gens = group.generators(1);
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commute(&gens[j])? {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// True iff all pairs of generators commute.
pub fn is_abelian(aut: &Automaton) -> Result<bool, ClassifyError> {
    generators_commute(&mealy_group(aut)?)
}

/// Identifies the abelian group generated by a binary Mealy automaton.
pub fn classify_abelian_mealy(aut: &Automaton, max_exp: u32, relation_bound: u32) -> Result<GroupType, ClassifyError> {
    let group = mealy_group(aut)?;
    if !generators_commute(&group)? {
        return Err(ClassifyError::NotAbelian);
    }
    classify_abelian_group(&group, max_exp, relation_bound)
}

/// Full verdict, including [`GroupType::NonAbelian`].
pub fn classify(aut: &Automaton, max_exp: u32, relation_bound: u32) -> Result<GroupType, ClassifyError> {
    let group = mealy_group(aut)?;
    if !generators_commute(&group)? {
        return Ok(GroupType::NonAbelian);
    }
    classify_abelian_group(&group, max_exp, relation_bound)
}

fn classify_abelian_group(
    group: &AutomatonGroup,
    max_exp: u32,
    relation_bound: u32,
) -> Result<GroupType, ClassifyError> {
    let gens = group.generators(1);
    let orders = gens
        .iter()
        .map(|g| g.order_pow2(max_exp))
        .collect::<Result<Vec<_>, _>>()?;
    let unknown = |reason: String| GroupType::Unknown {
        max_exp,
        relation_bound,
        reason,
    };
    if orders.iter().all(|o| *o == Order::Finite(1)) {
        return Ok(GroupType::Trivial);
    }
    let has_torsion = orders.iter().any(|o| matches!(o, Order::Finite(x) if *x > 1));
    if has_torsion {
        if let Some((j, o)) = orders
            .iter()
            .enumerate()
            .find(|(_, o)| !matches!(o, Order::Finite(1) | Order::Finite(2)))
        {
            return Ok(unknown(format!(
                "generator {} has order {o} next to a generator of finite order",
                group.automaton().states[j]
            )));
        }
        let involutions: Vec<&Element> = gens
            .iter()
            .zip(&orders)
            .filter(|(_, o)| **o == Order::Finite(2))
            .map(|(g, _)| g)
            .collect();
        let count = distinct_subset_products(group, &involutions)?;
        if !count.is_power_of_two() {
            return Ok(unknown(format!("{count} distinct subset products")));
        }
        return Ok(GroupType::ElementaryAbelian {
            rank: count.trailing_zeros() as usize,
        });
    }
    let lattice: RelationLattice<i64> = relation_lattice(&gens, relation_bound)?;
    let torsion = lattice.torsion();
    if !torsion.is_empty() {
        return Ok(unknown(format!("relation lattice has torsion quotient {torsion:?}")));
    }
    match lattice.free_rank() {
        0 => Ok(unknown("every generator satisfies a relation of full rank".into())),
        rank => Ok(GroupType::FreeAbelian { rank, relation_bound }),
    }
}

/// Number of pairwise distinct products over all subsets of `gens`.
pub fn distinct_subset_products(group: &AutomatonGroup, gens: &[&Element]) -> Result<usize, ClassifyError> {
    let mut reps: Vec<Element> = Vec::new();
    for mask in 0u64..(1u64 << gens.len()) {
        let mut p = group.identity(1);
        for (j, g) in gens.iter().enumerate() {
            if mask >> j & 1 == 1 {
                p = p.compose(g)?;
            }
        }
        let mut fresh = true;
        for r in &reps {
            if r.equal(&p)? {
                fresh = false;
                break;
            }
        }
        if fresh {
            reps.push(p);
        }
    }
    Ok(reps.len())
}

/// Freely reduced factor words of length `1..=max_len`, shortest first.
pub fn reduced_words(group: &AutomatonGroup, max_len: usize) -> Vec<Element> {
    let letters: Vec<Factor> = (0..group.num_states())
        .flat_map(|q| [Factor::pos(q), Factor::neg(q)])
        .collect();
    let mut out = Vec::new();
    let mut layer: Vec<Vec<Factor>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &layer {
            for &f in &letters {
                if w.last().is_some_and(|&l| l == f.inverse()) {
                    continue;
                }
                let mut v = w.clone();
                v.push(f);
                next.push(v);
            }
        }
        out.extend(next.iter().map(|w| group.element(1, w.clone()).expect("valid states")));
        layer = next;
    }
    out
}

/// Searches for an involution whose root permutation is nontrivial among
/// words of length at most `max_len`.
pub fn find_involution_outside_stabilizer(aut: &Automaton, max_len: usize) -> Result<Option<Element>, ClassifyError> {
    let group = mealy_group(aut)?;
    for g in reduced_words(&group, max_len) {
        if g.in_first_level_stabilizer() {
            continue;
        }
        if g.pow(2).is_identity().is_identity {
            return Ok(Some(g));
        }
    }
    Ok(None)
}

fn permutations(k: usize) -> Vec<Vec<Letter>> {
    let mut out = Vec::new();
    let mut p: Vec<Letter> = (0..k).collect();
    loop {
        out.push(p.clone());
        // next lexicographic permutation
        let Some(i) = (0..k.saturating_sub(1)).rev().find(|&i| p[i] < p[i + 1]) else {
            return out;
        };
        let j = (i + 1..k).rev().find(|&j| p[j] > p[i]).expect("successor exists");
        p.swap(i, j);
        p[i + 1..].reverse();
    }
}

/// All invertible Mealy automata with `n` states over `k` letters, in a
/// fixed order: state 0 is the most significant digit, and per state the
/// delta row (base-n, letter 0 first) varies slower than the labeling
/// (lexicographic).
#[derive(Debug, Clone)]
pub struct MealyEnumeration {
    n: usize,
    k: usize,
    perms: Vec<Vec<Letter>>,
    per_state: u64,
    total: u64,
    next: u64,
}

impl MealyEnumeration {
    pub fn len(&self) -> u64 {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    /// The automaton at position `index`.
    pub fn nth_automaton(&self, index: u64) -> Automaton {
        let (n, k) = (self.n, self.k);
        let mut table = StepTable::inert(n, k);
        let mut rest = index;
        for q in (0..n).rev() {
            let digit = rest % self.per_state;
            rest /= self.per_state;
            let fact = self.perms.len() as u64;
            let (mut delta_code, perm_code) = (digit / fact, digit % fact);
            for x in (0..k).rev() {
                table.delta[q][x] = (delta_code % n as u64) as usize;
                delta_code /= n as u64;
            }
            table.rho[q] = self.perms[perm_code as usize].clone();
        }
        Automaton::mealy(k, Automaton::default_names(n), table)
    }
}

impl Iterator for MealyEnumeration {
    type Item = Automaton;

    fn next(&mut self) -> Option<Automaton> {
        if self.next >= self.total {
            return None;
        }
        let aut = self.nth_automaton(self.next);
        self.next += 1;
        Some(aut)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.total - self.next) as usize;
        (left, Some(left))
    }
}

impl ExactSizeIterator for MealyEnumeration {}

/// Number of invertible Mealy automata, `(n^k · k!)^n`.
pub fn mealy_count(n: usize, k: usize) -> u128 {
    let fact: u128 = (1..=k as u128).product();
    let per_state = (n as u128).pow(k as u32) * fact;
    per_state.checked_pow(n as u32).unwrap_or(u128::MAX)
}

pub fn enumerate_invertible_mealy(n: usize, k: usize) -> Result<MealyEnumeration, ClassifyError> {
    if n < 1 || k < 2 {
        return Err(ClassifyError::BadShape { n, k });
    }
    let count = mealy_count(n, k);
    if count > ENUMERATION_CAP as u128 {
        return Err(ClassifyError::CapExceeded {
            count,
            cap: ENUMERATION_CAP,
        });
    }
    let perms = permutations(k);
    Ok(MealyEnumeration {
        n,
        k,
        per_state: (n as u64).pow(k as u32) * perms.len() as u64,
        perms,
        total: count as u64,
        next: 0,
    })
}

/// One row of the classification report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportRow {
    pub index: u64,
    pub automaton: Automaton,
    pub verdict: GroupType,
}

pub const REPORT_HEADER: &str = "index,delta,rho,abelian,verdict,rank,bound";

fn digits(rows: &[Vec<usize>]) -> String {
    rows.iter().flatten().map(|d| d.to_string()).collect()
}

impl ReportRow {
    /// `delta` and `rho` are the table entries row-major (state, then
    /// letter), 0-based. `bound` is the relation bound K where one applies.
    pub fn to_csv(&self) -> String {
        let table = self.automaton.step_table(1);
        let rank = self.verdict.rank().map(|r| r.to_string()).unwrap_or_default();
        let bound = match &self.verdict {
            GroupType::FreeAbelian { relation_bound, .. } | GroupType::Unknown { relation_bound, .. } => {
                relation_bound.to_string()
            }
            _ => String::new(),
        };
        format!(
            "{},{},{},{},{},{},{}",
            self.index,
            digits(&table.delta),
            digits(&table.rho),
            self.verdict.is_abelian(),
            self.verdict.name(),
            rank,
            bound
        )
    }
}

/// Classifies every invertible `n`-state Mealy automaton over `k` letters.
/// Rows come back sorted by enumeration index.
pub fn classify_all(n: usize, k: usize, max_exp: u32, relation_bound: u32) -> Result<Vec<ReportRow>, ClassifyError> {
    let enumeration = enumerate_invertible_mealy(n, k)?;
    let mut rows = (0..enumeration.len())
        .into_par_iter()
        .map(|index| {
            let automaton = enumeration.nth_automaton(index);
            let verdict = classify(&automaton, max_exp, relation_bound)?;
            Ok(ReportRow {
                index,
                automaton,
                verdict,
            })
        })
        .collect::<Result<Vec<_>, ClassifyError>>()?;
    rows.sort_by_key(|r| r.index);
    Ok(rows)
}

pub fn report_csv(rows: &[ReportRow]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv());
        out.push('\n');
    }
    out
}
