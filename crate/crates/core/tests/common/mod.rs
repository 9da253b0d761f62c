//! Test-only oracles. These compute tree actions straight from the automaton
//! tables through `Automaton::apply`, never through the group engine.

#![allow(dead_code)]

use automaton_groups::automaton::{Automaton, Letter, StepTable};
use automaton_groups::engine::{Element, Sign};
use rand::Rng;

/// All words of length `depth` over `k` letters; word `i` spells `i` in
/// base `k`, first letter most significant.
pub fn all_words(k: usize, depth: usize) -> Vec<Vec<Letter>> {
    let total = k.pow(depth as u32);
    (0..total)
        .map(|mut i| {
            let mut w = vec![0; depth];
            for slot in w.iter_mut().rev() {
                *slot = i % k;
                i /= k;
            }
            w
        })
        .collect()
}

fn word_index(w: &[Letter], k: usize) -> usize {
    w.iter().fold(0, |acc, &x| acc * k + x)
}

/// Permutation of the words of length `depth` induced by state `q` at step
/// `phase`, as an index table.
pub fn state_level_perm(aut: &Automaton, q: usize, phase: usize, depth: usize) -> Vec<usize> {
    all_words(aut.alphabet, depth)
        .iter()
        .map(|w| word_index(&aut.apply(q, phase, w).unwrap(), aut.alphabet))
        .collect()
}

fn invert_perm(p: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; p.len()];
    for (i, &j) in p.iter().enumerate() {
        inv[j] = i;
    }
    inv
}

/// Action of `element` on words of length `depth`, leftmost factor first.
pub fn element_level_perm(aut: &Automaton, element: &Element, depth: usize) -> Vec<usize> {
    let phase = element.phase();
    let size = aut.alphabet.pow(depth as u32);
    let forward: Vec<Vec<usize>> = (0..aut.num_states())
        .map(|q| state_level_perm(aut, q, phase, depth))
        .collect();
    let backward: Vec<Vec<usize>> = forward.iter().map(|p| invert_perm(p)).collect();
    let mut acc: Vec<usize> = (0..size).collect();
    for f in element.factors() {
        let p = match f.sign {
            Sign::Pos => &forward[f.state],
            Sign::Neg => &backward[f.state],
        };
        acc = acc.iter().map(|&i| p[i]).collect();
    }
    acc
}

pub fn oracle_image(aut: &Automaton, element: &Element, w: &[Letter]) -> Vec<Letter> {
    let perm = element_level_perm(aut, element, w.len());
    let mut j = perm[word_index(w, aut.alphabet)];
    let mut out = vec![0; w.len()];
    for slot in out.iter_mut().rev() {
        *slot = j % aut.alphabet;
        j /= aut.alphabet;
    }
    out
}

pub fn is_identity_perm(p: &[usize]) -> bool {
    p.iter().enumerate().all(|(i, &j)| i == j)
}

/// Smallest `s` in `1..=limit` with `p^s = id`.
pub fn perm_order_up_to(p: &[usize], limit: u64) -> Option<u64> {
    let mut acc = p.to_vec();
    for s in 1..=limit {
        if is_identity_perm(&acc) {
            return Some(s);
        }
        acc = acc.iter().map(|&i| p[i]).collect();
    }
    None
}

/// Uniformly random invertible Mealy automaton over `k` letters.
pub fn random_mealy(rng: &mut impl Rng, n: usize, k: usize) -> Automaton {
    let mut table = StepTable::inert(n, k);
    for q in 0..n {
        for x in 0..k {
            table.delta[q][x] = rng.gen_range(0..n);
        }
        let mut images: Vec<Letter> = (0..k).collect();
        for i in (1..k).rev() {
            images.swap(i, rng.gen_range(0..=i));
        }
        table.rho[q] = images;
    }
    Automaton::mealy(k, Automaton::default_names(n), table)
}

/// Random invertible time-varying automaton with a short prefix and cycle.
pub fn random_tva(rng: &mut impl Rng, n: usize, k: usize) -> Automaton {
    let prefix_len = rng.gen_range(0..3);
    let cycle_len = rng.gen_range(1..3);
    let mut tables = (0..prefix_len + cycle_len).map(|_| random_mealy(rng, n, k).schedule.cycle.remove(0));
    let prefix = (&mut tables).take(prefix_len).collect();
    let cycle = tables.collect();
    Automaton::new(
        k,
        Automaton::default_names(n),
        automaton_groups::automaton::Schedule { prefix, cycle },
    )
}

/// A lamplighter-type automaton: a = (a, b), b = (b, a)τ.
pub fn lamplighter() -> Automaton {
    Automaton::mealy(
        2,
        Automaton::default_names(2),
        StepTable {
            delta: vec![vec![0, 1], vec![1, 0]],
            rho: vec![vec![0, 1], vec![1, 0]],
        },
    )
}
