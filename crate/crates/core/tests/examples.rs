//! Documented behaviours of the public API, cross-checked against the
//! brute-force oracle in `common` wherever a tree action is involved.

mod common;

use automaton_groups::automaton::{parse_word, Permutation, StepTable};
use automaton_groups::classify::{
    classify, enumerate_invertible_mealy, find_involution_outside_stabilizer, is_abelian, mealy_count,
    relation_lattice, ClassifyError, ENUMERATION_CAP,
};
use automaton_groups::constructions::{
    cyclic_shift_mealy, cyclic_tva, free_abelian_tva, mixed_abelian_tva, mixed_b1, pad_states, sausage_mealy,
    ConstructionError, CyclicOrder,
};
use automaton_groups::engine::Factor;
use automaton_groups::io;
use automaton_groups::{Automaton, AutomatonGroup, Element, GroupType, Order, Schedule};
use rand::rngs::StdRng;
use rand::SeedableRng;

fn group(aut: Automaton) -> AutomatonGroup {
    AutomatonGroup::new(aut).unwrap()
}

fn identity_automaton(n: usize) -> Automaton {
    Automaton::mealy(2, Automaton::default_names(n), StepTable::inert(n, 2))
}

fn word(s: &str) -> Vec<usize> {
    parse_word(s).unwrap()
}

fn assert_oracle_image(g: &Element, w: &str) {
    let w = word(w);
    assert_eq!(
        g.image(&w).unwrap(),
        common::oracle_image(g.group().automaton(), g, &w),
        "{g} on {w:?}"
    );
}

// ---- model -------------------------------------------------------------

#[test]
fn validation_examples() {
    assert!(identity_automaton(2).validate().is_ok());
    assert!(sausage_mealy(3).unwrap().validate().is_ok());
    let mut bad = identity_automaton(1);
    bad.schedule.cycle[0].rho[0] = vec![0, 0];
    let err = bad.validate().unwrap_err();
    assert!(err.to_string().contains("not a bijection"), "{err}");
    assert!(!bad.is_invertible());
    bad.schedule.cycle[0].rho[0] = vec![1, 1];
    assert!(!bad.is_invertible());
}

#[test]
fn constructions_are_invertible() {
    let all = [
        cyclic_tva(CyclicOrder::Finite(3)).unwrap(),
        cyclic_tva(CyclicOrder::Infinite).unwrap(),
        mixed_abelian_tva(&[3, 1, 2], 1).unwrap(),
        mixed_abelian_tva(&[2, 1], 0).unwrap(),
        free_abelian_tva(4).unwrap(),
        sausage_mealy(4).unwrap(),
        cyclic_shift_mealy(4).unwrap(),
        pad_states(&sausage_mealy(2).unwrap(), 5).unwrap(),
    ];
    for aut in &all {
        assert!(aut.is_invertible());
        assert_eq!(&io::from_json(&io::to_json(aut)).unwrap(), aut);
        for i in 1..=aut.schedule.period_span() + 2 {
            for q in 0..aut.num_states() {
                let label = aut.step_table(i).label(q).unwrap();
                assert!(label.is_identity() || label == Permutation::swap(2, 0, 1));
            }
        }
    }
}

#[test]
fn step_tables_follow_the_schedule() {
    let mealy = sausage_mealy(3).unwrap();
    assert_eq!(mealy.step_table(7), mealy.step_table(1));
    let mut tagged: Vec<StepTable> = (0..5).map(|_| StepTable::inert(1, 2)).collect();
    for (i, t) in tagged.iter_mut().enumerate() {
        t.rho[0] = if i % 2 == 0 { vec![0, 1] } else { vec![1, 0] };
    }
    let schedule = Schedule {
        prefix: tagged[..3].to_vec(),
        cycle: tagged[3..].to_vec(),
    };
    // (6 - 3 - 1) mod 2 = 0: the first cycle table
    assert_eq!(schedule.effective_step(6), 4);
    assert_eq!(schedule.table(6), &schedule.cycle[0]);
    assert_eq!(schedule.table(7), &schedule.cycle[1]);
    assert_eq!(schedule.table(8), &schedule.cycle[0]);
    let cyclic = cyclic_tva(CyclicOrder::Finite(3)).unwrap();
    assert_eq!(cyclic.step_table(4).label(1).unwrap(), Permutation::identity(2));
}

#[test]
fn transformation_examples() {
    let shift = cyclic_shift_mealy(3).unwrap();
    let a2 = shift.state_index("a2").unwrap();
    assert_eq!(shift.apply(a2, 1, &word("000")).unwrap(), word("010"));
    for (j, expected) in [(0, "100"), (1, "010"), (2, "001")] {
        assert_eq!(shift.apply(j, 1, &word("000")).unwrap(), word(expected));
    }
    let c2 = cyclic_tva(CyclicOrder::Finite(1)).unwrap();
    assert_eq!(c2.apply(1, 1, &word("00")).unwrap(), word("10"));
    let padded = pad_states(&sausage_mealy(2).unwrap(), 4).unwrap();
    for w in common::all_words(2, 6) {
        for q in 2..4 {
            assert_eq!(padded.apply(q, 1, &w).unwrap(), w);
        }
    }
}

// ---- engine ------------------------------------------------------------

#[test]
fn root_permutation_examples() {
    let c = group(cyclic_tva(CyclicOrder::Finite(4)).unwrap());
    assert!(c.identity(1).root_permutation().is_identity());
    assert_eq!(c.generator(1, 1).root_permutation(), Permutation::swap(2, 0, 1));
    // products in the mixed automaton have root τ^{k1}
    let m = group(mixed_abelian_tva(&[3, 1, 2], 1).unwrap());
    let b1 = mixed_b1(&m, 1);
    for k1 in -2..=3i64 {
        for k2 in 0..=2 {
            let g = b1.pow(k1).compose(&m.generator(1, 1).pow(k2)).unwrap();
            assert_eq!(g.root_permutation().is_identity(), k1 % 2 == 0, "{g}");
        }
    }
}

#[test]
fn wreath_examples() {
    let c = group(cyclic_tva(CyclicOrder::Finite(3)).unwrap());
    let a2 = c.generator(1, 1);
    let rec = a2.wreath();
    assert_eq!(rec.root, Permutation::swap(2, 0, 1));
    assert_eq!(rec.sections.len(), 2);
    let trivial: Vec<bool> = rec.sections.iter().map(|s| s.is_identity().is_identity).collect();
    assert_eq!(trivial.iter().filter(|&&t| t).count(), 1);
    let id = c.identity(2).wreath();
    assert!(id.root.is_identity() && id.sections.iter().all(Element::is_empty));
    // section of a2·a2 in sausage(2) at 0 reduces to a2
    let s = group(sausage_mealy(2).unwrap());
    let sq = s.generator(1, 1).pow(2);
    assert_eq!(sq.section(0).len(), 2);
    assert!(sq.section(0).equal(&s.generator(1, 1)).unwrap());
    assert_eq!(sq.section(0).reduced(), s.generator(1, 1));
}

#[test]
fn image_examples() {
    let s = group(sausage_mealy(2).unwrap());
    assert_eq!(s.generator(1, 1).image(&word("000")).unwrap(), word("111"));
    assert_oracle_image(&s.generator(1, 1), "000");
    let shift = group(cyclic_shift_mealy(3).unwrap());
    assert_eq!(shift.generator(1, 1).image(&word("000")).unwrap(), word("010"));
    let m = group(mixed_abelian_tva(&[3, 1, 2], 1).unwrap());
    let g = m.parse_element("a1^2 * a3 * a4^-1 * a2", 2).unwrap();
    for w in ["0000000", "1011001", "1111111"] {
        assert_oracle_image(&g, w);
    }
}

#[test]
fn identity_examples() {
    let c = group(cyclic_tva(CyclicOrder::Finite(1)).unwrap());
    assert!(c.identity(1).is_identity().is_identity);
    assert!(c.generator(1, 1).pow(2).is_identity().is_identity);
    let s = group(sausage_mealy(2).unwrap());
    for k in [-4, -3, -2, -1, 1, 2, 3, 4] {
        let g = s.generator(1, 1).pow(k);
        let verdict = g.is_identity();
        let w = verdict.witness.expect("nontrivial power");
        assert_ne!(g.image(&w).unwrap(), w);
        assert_ne!(common::oracle_image(s.automaton(), &g, &w), w);
    }
    let id = s.identity(1);
    assert!(s
        .generator(1, 1)
        .compose(&s.generator(1, 1).invert())
        .unwrap()
        .is_empty());
    assert!(id.is_identity().witness.is_none());
}

#[test]
fn equality_and_commutation_examples() {
    for n in 2..=4 {
        let s = group(sausage_mealy(n).unwrap());
        assert!(s.generator(0, 1).equal(&s.identity(1)).unwrap());
    }
    let shift = group(cyclic_shift_mealy(2).unwrap());
    assert!(!shift.generator(0, 1).equal(&shift.generator(1, 1)).unwrap());
    let g = shift.parse_element("a1*a2^-1", 1).unwrap();
    assert!(g.equal(&g).unwrap() && g.commute(&g).unwrap());

    let m = group(mixed_abelian_tva(&[3, 1, 2], 1).unwrap());
    let gens = m.generators(1);
    for a in &gens {
        for b in &gens {
            assert!(a.commute(b).unwrap());
        }
    }
    let lamp = group(common::lamplighter());
    assert!(!lamp.generator(0, 1).commute(&lamp.generator(1, 1)).unwrap());
}

#[test]
fn order_examples() {
    let c = group(cyclic_tva(CyclicOrder::Finite(3)).unwrap());
    assert_eq!(c.identity(1).order_pow2(12).unwrap(), Order::Finite(1));
    assert_eq!(c.generator(1, 1).order_pow2(12).unwrap(), Order::Finite(8));
    let inf = group(cyclic_tva(CyclicOrder::Infinite).unwrap());
    assert_eq!(
        inf.generator(1, 1).order_pow2(12).unwrap(),
        Order::ExceedsBound { max_exp: 12 }
    );
    let s = group(sausage_mealy(2).unwrap());
    assert_eq!(
        s.generator(1, 1).order_pow2(12).unwrap(),
        Order::ExceedsBound { max_exp: 12 }
    );
    assert!(!s.generator(1, 1).is_identity().is_identity);
    // C_2 ⊕ Z
    let m = group(mixed_abelian_tva(&[1], 1).unwrap());
    assert_eq!(mixed_b1(&m, 1).order_pow2(12).unwrap(), Order::Finite(2));
    assert_eq!(
        m.generator(1, 1).order_pow2(12).unwrap(),
        Order::ExceedsBound { max_exp: 12 }
    );
    let ternary = group(common::random_mealy(&mut StdRng::seed_from_u64(1), 2, 3));
    assert!(ternary.generator(0, 1).order_pow2(4).is_err());
}

#[test]
fn stabilizer_examples() {
    let shift = group(cyclic_shift_mealy(2).unwrap());
    assert!(shift.identity(1).in_first_level_stabilizer());
    assert!(!shift.generator(0, 1).in_first_level_stabilizer());
    let s = group(sausage_mealy(2).unwrap());
    assert!(s.generator(1, 1).pow(2).in_first_level_stabilizer());
}

// ---- constructions -----------------------------------------------------

#[test]
fn construction_preconditions() {
    assert!(matches!(
        mixed_abelian_tva(&[1], 0),
        Err(ConstructionError::TooFewStates { .. })
    ));
    assert!(free_abelian_tva(1).is_err());
    assert!(sausage_mealy(1).is_err());
    assert!(cyclic_shift_mealy(0).is_err());
    assert!(pad_states(&sausage_mealy(3).unwrap(), 2).is_err());
    let one = cyclic_shift_mealy(1).unwrap();
    let g = group(one.clone());
    assert_eq!(g.generator(0, 1).order_pow2(12).unwrap(), Order::Finite(2));
    assert_eq!(classify(&one, 12, 3).unwrap(), GroupType::ElementaryAbelian { rank: 1 });
}

#[test]
fn free_abelian_relations() {
    let f = group(free_abelian_tva(2).unwrap());
    let gens = f.generators(1);
    assert!(gens[0].commute(&gens[1]).unwrap());
    let f3 = group(free_abelian_tva(3).unwrap());
    let lattice = relation_lattice::<i64>(&f3.generators(1), 2).unwrap();
    assert!(lattice.relations.is_empty());
    assert_eq!(lattice.free_rank(), 3);
}

#[test]
fn sausage_relations() {
    let s3 = group(sausage_mealy(3).unwrap());
    let lattice = relation_lattice::<i64>(&s3.generators(1), 2).unwrap();
    for r in &lattice.relations {
        assert_eq!(&r[1..], &[0, 0], "unexpected relation {r:?}");
    }
    assert_eq!(lattice.basis, vec![vec![1, 0, 0]]);
}

// ---- classify ----------------------------------------------------------

#[test]
fn enumeration_counts() {
    assert_eq!(mealy_count(1, 2), 2);
    assert_eq!(mealy_count(2, 2), 64);
    assert_eq!(enumerate_invertible_mealy(1, 2).unwrap().count(), 2);
    assert_eq!(enumerate_invertible_mealy(2, 2).unwrap().len(), 64);
    assert!(mealy_count(4, 2) > ENUMERATION_CAP as u128);
    assert!(matches!(
        enumerate_invertible_mealy(4, 2),
        Err(ClassifyError::CapExceeded { .. })
    ));
}

#[test]
fn abelian_examples() {
    for aut in enumerate_invertible_mealy(1, 2).unwrap() {
        assert!(is_abelian(&aut).unwrap());
    }
    assert!(is_abelian(&cyclic_shift_mealy(4).unwrap()).unwrap());
    assert!(!is_abelian(&common::lamplighter()).unwrap());
}

#[test]
fn classification_examples() {
    assert_eq!(classify(&identity_automaton(3), 12, 3).unwrap(), GroupType::Trivial);
    assert_eq!(
        classify(&cyclic_shift_mealy(3).unwrap(), 12, 3).unwrap(),
        GroupType::ElementaryAbelian { rank: 3 }
    );
    assert_eq!(
        classify(&sausage_mealy(3).unwrap(), 12, 3).unwrap(),
        GroupType::FreeAbelian {
            rank: 2,
            relation_bound: 3
        }
    );
    assert_eq!(classify(&common::lamplighter(), 12, 3).unwrap(), GroupType::NonAbelian);
    assert!(matches!(
        classify(&cyclic_tva(CyclicOrder::Finite(2)).unwrap(), 12, 3),
        Err(ClassifyError::NotMealy)
    ));
}

#[test]
fn relation_lattice_examples() {
    let s = group(sausage_mealy(2).unwrap());
    let lattice = relation_lattice::<i64>(&s.generators(1), 2).unwrap();
    assert_eq!(lattice.basis, vec![vec![1, 0]]);
    assert_eq!(lattice.free_rank(), 1);
    assert!(lattice.verify());

    let shift = group(cyclic_shift_mealy(2).unwrap());
    let lattice = relation_lattice::<i64>(&shift.generators(1), 2).unwrap();
    assert_eq!(lattice.basis, vec![vec![2, 0], vec![0, 2]]);
    assert_eq!(lattice.torsion(), vec![2, 2]);
    assert!(lattice.contains(&[2, -2]) && !lattice.contains(&[1, 1]));
    let big = relation_lattice::<num_bigint::BigInt>(&shift.generators(1), 2).unwrap();
    assert_eq!(big.relations.len(), lattice.relations.len());

    let empty = relation_lattice::<i64>(&[], 2).unwrap();
    assert_eq!(empty.rank(), 0);
    assert!(empty.relations.is_empty());
}

#[test]
fn involution_examples() {
    let found = find_involution_outside_stabilizer(&cyclic_shift_mealy(2).unwrap(), 1).unwrap();
    let t = found.expect("a1 is such an involution");
    assert!(!t.root_permutation().is_identity());
    assert!(t.pow(2).is_identity().is_identity);
    assert!(find_involution_outside_stabilizer(&sausage_mealy(2).unwrap(), 3)
        .unwrap()
        .is_none());
    assert!(find_involution_outside_stabilizer(&identity_automaton(2), 3)
        .unwrap()
        .is_none());
}

#[test]
fn element_construction_rejects_bad_input() {
    let s = group(sausage_mealy(2).unwrap());
    assert!(s.element(1, vec![Factor::pos(5)]).is_err());
    assert!(s.parse_element("a9", 1).is_err());
    assert!(s.parse_element("a1^", 1).is_err());
    let other = group(sausage_mealy(2).unwrap());
    assert!(s.generator(0, 1).compose(&other.generator(0, 1)).is_err());
    assert!(s.generator(0, 1).image(&[2]).is_err());
}
