//! Builders for the explicit automata: cyclic, mixed torsion/free abelian and
//! free abelian time-varying automata, the sausage and cyclic-shift Mealy
//! automata, and state padding.
//!
//! All builders work over the binary alphabet and name their states
//! `a1..an`. Every "arbitrary partition" of step indices is fixed to a
//! residue-class partition, which keeps schedules eventually periodic.

use thiserror::Error;

use crate::automaton::{Automaton, Schedule, StateId, StepTable};
use crate::engine::{AutomatonGroup, Element, Factor};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructionError {
    #[error("cyclic order exponent must be at least 1")]
    ZeroExponent,
    #[error("torsion exponents r_j must be at least 1 (found r_{index} = 0)")]
    ZeroTorsionExponent { index: usize },
    #[error("at least one torsion exponent is required")]
    EmptyTorsion,
    #[error("construction needs at least {min} states, got {n}")]
    TooFewStates { n: usize, min: usize },
    #[error("cannot pad {from} states down to {to}")]
    PadShrinks { from: usize, to: usize },
}

/// Order of the cyclic group generated by [`cyclic_tva`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CyclicOrder {
    /// `C_{2^r}`; holds the exponent `r`.
    Finite(u32),
    Infinite,
}

/// Assignment of step indices to generators: finite blocks listed
/// explicitly, infinite blocks as residue classes beyond `offset`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartitionSpec {
    /// `(generator index j, steps N_j)`, generator indices 1-based.
    pub finite_blocks: Vec<(usize, Vec<usize>)>,
    /// `(generator index j, residue r)`: `N_j = { i > offset : (i - offset - 1) mod modulus = r }`.
    pub infinite_blocks: Vec<(usize, usize)>,
    pub offset: usize,
    pub modulus: usize,
}

impl PartitionSpec {
    /// Generator owning step `i`, if any.
    pub fn owner(&self, i: usize) -> Option<usize> {
        if let Some((j, _)) = self.finite_blocks.iter().find(|(_, steps)| steps.contains(&i)) {
            return Some(*j);
        }
        if i > self.offset && self.modulus > 0 {
            let residue = (i - self.offset - 1) % self.modulus;
            return self
                .infinite_blocks
                .iter()
                .find(|&&(_, r)| r == residue)
                .map(|&(j, _)| j);
        }
        None
    }

    /// Steps whose owner can differ from the periodic pattern.
    pub fn prefix_len(&self) -> usize {
        self.offset
    }
}

fn binary(n: usize, prefix: Vec<StepTable>, cycle: Vec<StepTable>) -> Automaton {
    Automaton::new(2, Automaton::default_names(n), Schedule { prefix, cycle })
}

/// Table where state `a_j` (1-based `owner`) reads `0 → a_j`, `1 → a_1`
/// with label τ, and every other state is inert.
fn flip_to_first(n: usize, owner: usize) -> StepTable {
    let mut t = StepTable::inert(n, 2);
    let q = owner - 1;
    t.delta[q] = vec![q, 0];
    t.rho[q] = vec![1, 0];
    t
}

/// Two-state automaton generating `C_{2^r}` or `C_∞` via generator `a2`.
pub fn cyclic_tva(order: CyclicOrder) -> Result<Automaton, ConstructionError> {
    let flip = flip_to_first(2, 2);
    match order {
        CyclicOrder::Finite(0) => Err(ConstructionError::ZeroExponent),
        CyclicOrder::Finite(r) => Ok(binary(2, vec![flip; r as usize], vec![StepTable::inert(2, 2)])),
        CyclicOrder::Infinite => Ok(binary(2, Vec::new(), vec![flip])),
    }
}

/// Canonical partition for [`mixed_abelian_tva`]: consecutive finite blocks
/// `N_1 = {1..r_1}`, `N_2`, …, `N_d`, then steps beyond `R = Σ r_j` dealt
/// cyclically to `N_{d+1}..N_n`.
pub fn mixed_partition(torsion: &[u32], free_rank: usize) -> PartitionSpec {
    let mut next = 1;
    let finite_blocks = torsion
        .iter()
        .enumerate()
        .map(|(j, &r)| {
            let steps: Vec<usize> = (next..next + r as usize).collect();
            next += r as usize;
            (j + 1, steps)
        })
        .collect();
    let d = torsion.len();
    PartitionSpec {
        finite_blocks,
        infinite_blocks: (0..free_rank).map(|t| (d + 1 + t, t)).collect(),
        offset: next - 1,
        modulus: free_rank,
    }
}

/// Time-varying automaton generating `C_{2^{r_1}} ⊕ … ⊕ C_{2^{r_d}} ⊕ C_∞^{d'}`
/// with `n = d + d'` states.
pub fn mixed_abelian_tva(torsion: &[u32], free_rank: usize) -> Result<Automaton, ConstructionError> {
    if torsion.is_empty() {
        return Err(ConstructionError::EmptyTorsion);
    }
    if let Some(j) = torsion.iter().position(|&r| r == 0) {
        return Err(ConstructionError::ZeroTorsionExponent { index: j + 1 });
    }
    let n = torsion.len() + free_rank;
    if n < 2 {
        return Err(ConstructionError::TooFewStates { n, min: 2 });
    }
    let partition = mixed_partition(torsion, free_rank);
    let r1 = torsion[0] as usize;
    let table = |i: usize| -> StepTable {
        match partition.owner(i) {
            Some(1) => {
                let mut t = StepTable::inert(n, 2);
                // a_1 moves to a_2 on letter 1, and on both letters at step r_1
                t.delta[0] = if i == r1 { vec![1, 1] } else { vec![0, 1] };
                t.rho[0] = vec![1, 0];
                t
            }
            Some(j) => flip_to_first(n, j),
            None => StepTable::inert(n, 2),
        }
    };
    let big_r = partition.prefix_len();
    let prefix = (1..=big_r).map(table).collect();
    let cycle = if free_rank > 0 {
        (big_r + 1..=big_r + free_rank).map(table).collect()
    } else {
        vec![StepTable::inert(n, 2)]
    };
    Ok(binary(n, prefix, cycle))
}

/// `b_1 = a_1 · a_2⁻¹` at `phase`, the generator of the first cyclic summand
/// of a [`mixed_abelian_tva`] group.
pub fn mixed_b1(group: &AutomatonGroup, phase: usize) -> Element {
    group
        .element(phase, vec![Factor::pos(0), Factor::neg(1)])
        .expect("mixed automata have at least two states")
}

/// Canonical partition of `{2, 3, …}` for [`free_abelian_tva`]:
/// `N_j = { i ≥ 2 : i ≡ j mod (n - 1) }`.
pub fn free_abelian_partition(n: usize) -> PartitionSpec {
    PartitionSpec {
        finite_blocks: Vec::new(),
        infinite_blocks: (2..=n).map(|j| (j, j - 2)).collect(),
        offset: 1,
        modulus: n - 1,
    }
}

/// Time-varying automaton with `n ≥ 2` states generating `Z^n`.
pub fn free_abelian_tva(n: usize) -> Result<Automaton, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::TooFewStates { n, min: 2 });
    }
    let partition = free_abelian_partition(n);
    let mut first = StepTable::inert(n, 2);
    first.delta[0] = vec![0, 1];
    let cycle = (2..=n)
        .map(|i| flip_to_first(n, partition.owner(i).expect("every step ≥ 2 has an owner")))
        .collect();
    Ok(binary(n, vec![first], cycle))
}

/// The `n`-state sausage automaton: `a_1` trivial, `a_2 = (a_n, a_1)τ`,
/// `a_j = (a_{j-1}, a_{j-1})` for `j > 2`. Generates `Z^{n-1}`.
pub fn sausage_mealy(n: usize) -> Result<Automaton, ConstructionError> {
    if n < 2 {
        return Err(ConstructionError::TooFewStates { n, min: 2 });
    }
    let mut t = StepTable::inert(n, 2);
    t.delta[1] = vec![n - 1, 0];
    t.rho[1] = vec![1, 0];
    for q in 2..n {
        t.delta[q] = vec![q - 1; 2];
    }
    Ok(Automaton::mealy(2, Automaton::default_names(n), t))
}

/// The `n`-state cyclic-shift automaton: `a_1 = (a_n, a_n)τ`,
/// `a_j = (a_{j-1}, a_{j-1})` for `j ≥ 2`. Generates `C_2^n`.
pub fn cyclic_shift_mealy(n: usize) -> Result<Automaton, ConstructionError> {
    if n < 1 {
        return Err(ConstructionError::TooFewStates { n, min: 1 });
    }
    let mut t = StepTable::inert(n, 2);
    t.delta[0] = vec![n - 1; 2];
    t.rho[0] = vec![1, 0];
    for q in 1..n {
        t.delta[q] = vec![q - 1; 2];
    }
    Ok(Automaton::mealy(2, Automaton::default_names(n), t))
}

/// Adds inert states until the automaton has `target` states. Existing
/// tables are kept as they are.
pub fn pad_states(aut: &Automaton, target: usize) -> Result<Automaton, ConstructionError> {
    let n = aut.num_states();
    if target < n {
        return Err(ConstructionError::PadShrinks { from: n, to: target });
    }
    let k = aut.alphabet;
    let mut padded = aut.clone();
    for extra in n..target {
        let mut name = format!("a{}", extra + 1);
        while padded.states.contains(&name) {
            name.push('\'');
        }
        padded.states.push(name);
        let q: StateId = extra;
        for table in padded
            .schedule
            .prefix
            .iter_mut()
            .chain(padded.schedule.cycle.iter_mut())
        {
            table.delta.push(vec![q; k]);
            table.rho.push((0..k).collect());
        }
    }
    Ok(padded)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Order;

    fn group(aut: Automaton) -> AutomatonGroup {
        AutomatonGroup::new(aut).unwrap()
    }

    #[test]
    fn cyclic_finite_tables() {
        let aut = cyclic_tva(CyclicOrder::Finite(3)).unwrap();
        assert_eq!(aut.schedule.prefix.len(), 3);
        // a2 is inert once the prefix is over
        assert_eq!(aut.step_table(4), &StepTable::inert(2, 2));
        assert_eq!(aut.step_table(2).delta[1], vec![1, 0]);
        assert_eq!(cyclic_tva(CyclicOrder::Finite(0)), Err(ConstructionError::ZeroExponent));
    }

    #[test]
    fn cyclic_two_traces_the_diagram() {
        let aut = cyclic_tva(CyclicOrder::Finite(1)).unwrap();
        assert_eq!(aut.apply(1, 1, &[0, 0]).unwrap(), vec![1, 0]);
        let g = group(aut);
        let a2 = g.generator(1, 1);
        assert!(a2.pow(2).is_identity().is_identity);
        assert!(a2.invert().equal(&a2).unwrap());
    }

    #[test]
    fn cyclic_sections_follow_letter_order() {
        let g = group(cyclic_tva(CyclicOrder::Finite(2)).unwrap());
        let a2 = g.generator(1, 1);
        let w = a2.wreath();
        assert_eq!(w.root.images(), &[1, 0]);
        assert_eq!(w.sections[0], g.generator(1, 2));
        assert_eq!(w.sections[1], g.generator(0, 2));
        assert!(w.sections[1].is_identity().is_identity);
    }

    #[test]
    fn cyclic_infinite_flips_at_every_step() {
        let g = group(cyclic_tva(CyclicOrder::Infinite).unwrap());
        assert!(g.automaton().is_mealy());
        let mut a2 = g.generator(1, 1);
        for _ in 0..5 {
            assert_eq!(a2.root_permutation().images(), &[1, 0]);
            a2 = a2.section(0);
        }
    }

    #[test]
    fn mixed_figure_instance_layout() {
        let p = mixed_partition(&[3, 1, 2], 1);
        assert_eq!(p.finite_blocks, vec![(1, vec![1, 2, 3]), (2, vec![4]), (3, vec![5, 6])]);
        assert_eq!(p.owner(7), Some(4));
        assert_eq!(p.owner(100), Some(4));
        let aut = mixed_abelian_tva(&[3, 1, 2], 1).unwrap();
        assert_eq!(aut.num_states(), 4);
        assert_eq!(aut.schedule.prefix.len(), 6);
        assert_eq!(aut.schedule.cycle.len(), 1);
        // step r_1 sends a_1 to a_2 on both letters
        assert_eq!(aut.step_table(3).delta[0], vec![1, 1]);
        assert_eq!(aut.step_table(2).delta[0], vec![0, 1]);
        assert_eq!(aut.step_table(5).delta[2], vec![2, 0]);
    }

    #[test]
    fn mixed_root_of_monomial_is_tau_power_of_b1_exponent() {
        let g = group(mixed_abelian_tva(&[3, 1, 2], 1).unwrap());
        let b1 = mixed_b1(&g, 1);
        for k1 in 0..4i64 {
            for k2 in 0..3i64 {
                let e = b1.pow(k1).compose(&g.generator(1, 1).pow(k2)).unwrap();
                let expected_flip = k1 % 2 == 1;
                assert_eq!(e.root_permutation().images() == [1, 0], expected_flip);
            }
        }
    }

    #[test]
    fn mixed_preconditions() {
        assert_eq!(
            mixed_abelian_tva(&[1], 0),
            Err(ConstructionError::TooFewStates { n: 1, min: 2 })
        );
        assert_eq!(mixed_abelian_tva(&[], 2), Err(ConstructionError::EmptyTorsion));
        assert_eq!(
            mixed_abelian_tva(&[2, 0], 0),
            Err(ConstructionError::ZeroTorsionExponent { index: 2 })
        );
        let aut = mixed_abelian_tva(&[1, 1], 0).unwrap();
        assert_eq!(aut.schedule.cycle, vec![StepTable::inert(2, 2)]);
    }

    #[test]
    fn free_abelian_layout() {
        let p = free_abelian_partition(3);
        assert_eq!(p.owner(1), None);
        assert_eq!(p.owner(2), Some(2));
        assert_eq!(p.owner(3), Some(3));
        assert_eq!(p.owner(10), Some(2));
        let aut = free_abelian_tva(3).unwrap();
        assert_eq!(aut.schedule.prefix.len(), 1);
        assert_eq!(aut.schedule.cycle.len(), 2);
        assert_eq!(
            free_abelian_tva(1),
            Err(ConstructionError::TooFewStates { n: 1, min: 2 })
        );
    }

    #[test]
    fn free_abelian_first_generator_section() {
        let g = group(free_abelian_tva(3).unwrap());
        let w = g.generator(0, 1).wreath();
        assert!(w.root.is_identity());
        assert_eq!(w.sections[1], g.generator(1, 2));
        assert!(w.sections[0].is_identity().is_identity);
    }

    #[test]
    fn sausage_two() {
        let aut = sausage_mealy(2).unwrap();
        assert_eq!(aut.step_table(1).delta, vec![vec![0, 0], vec![1, 0]]);
        let g = group(aut);
        let a2 = g.generator(1, 1);
        assert_eq!(a2.image(&[0, 0, 0]).unwrap(), vec![1, 1, 1]);
        assert!(g.generator(0, 1).is_identity().is_identity);
        assert_eq!(a2.order_pow2(12).unwrap(), Order::ExceedsBound { max_exp: 12 });
        let sq = a2.pow(2).wreath();
        assert!(sq.root.is_identity());
        assert_eq!(sq.sections[0].factors(), &[Factor::pos(1), Factor::pos(0)]);
        assert!(sq.sections[0].equal(&a2).unwrap());
        assert_eq!(sausage_mealy(1), Err(ConstructionError::TooFewStates { n: 1, min: 2 }));
    }

    #[test]
    fn shift_images() {
        let aut = cyclic_shift_mealy(3).unwrap();
        assert_eq!(aut.apply(1, 1, &[0, 0, 0]).unwrap(), vec![0, 1, 0]);
        for j in 0..3 {
            let mut expected = vec![0; 3];
            expected[j] = 1;
            assert_eq!(aut.apply(j, 1, &[0, 0, 0]).unwrap(), expected);
        }
        let single = group(cyclic_shift_mealy(1).unwrap());
        assert_eq!(single.generator(0, 1).order_pow2(4).unwrap(), Order::Finite(2));
        assert_eq!(
            cyclic_shift_mealy(0),
            Err(ConstructionError::TooFewStates { n: 0, min: 1 })
        );
    }

    #[test]
    fn padding() {
        let aut = sausage_mealy(2).unwrap();
        assert_eq!(pad_states(&aut, 2).unwrap(), aut);
        let padded = pad_states(&aut, 4).unwrap();
        assert_eq!(padded.states, vec!["a1", "a2", "a3", "a4"]);
        assert_eq!(padded.validate(), Ok(()));
        assert_eq!(padded.step_table(1).delta[..2], aut.step_table(1).delta[..]);
        assert_eq!(padded.apply(3, 1, &[1, 0, 1]).unwrap(), vec![1, 0, 1]);
        assert_eq!(
            pad_states(&padded, 3),
            Err(ConstructionError::PadShrinks { from: 4, to: 3 })
        );

        let mut named = aut.clone();
        named.states = vec!["a3".into(), "b".into()];
        let padded = pad_states(&named, 3).unwrap();
        assert_eq!(padded.states[2], "a3'");
    }
}
