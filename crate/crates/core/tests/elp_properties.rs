//! Randomized invariants for the logic-program solver: belief sets are
//! minimal models of their own reduct, world views reproduce themselves
//! through the modal reduct, and the stratified search never invents or
//! loses solvability.

use std::collections::BTreeSet;

use ak_core::elp::solve::{
    belief_sets, modal_reduct, world_views, world_views_stratified, DEFAULT_SEARCH_BUDGET,
};
use ak_core::elp::{Atom, BeliefSet, BodyLiteral, Program, Rule};
use ak_core::parser::parse_elp;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ATOMS: [&str; 4] = ["p", "q", "r", "s"];

fn random_atom(rng: &mut ChaCha8Rng) -> Atom {
    Atom::prop(ATOMS[rng.gen_range(0..ATOMS.len())])
}

fn random_program(rng: &mut ChaCha8Rng, allow_subjective: bool) -> Program {
    let mut rules = Vec::new();
    for _ in 0..rng.gen_range(1..=5) {
        let mut head: Vec<Atom> = (0..rng.gen_range(1..=2)).map(|_| random_atom(rng)).collect();
        head.dedup();
        let body = (0..rng.gen_range(0..=3))
            .map(|_| {
                let atom = random_atom(rng);
                match rng.gen_range(0..if allow_subjective { 4 } else { 2 }) {
                    0 => BodyLiteral::pos(atom),
                    1 => BodyLiteral::naf(atom),
                    2 => BodyLiteral::know(atom),
                    _ => BodyLiteral::not_know(atom),
                }
            })
            .collect();
        rules.push(Rule::new(head, body));
    }
    Program::new(rules)
}

/// Test-side model check: every reduct rule with a satisfied positive
/// body has some head atom in the candidate.
fn is_model_of_reduct(program: &Program, candidate: &BeliefSet, w: &BeliefSet) -> bool {
    program.rules.iter().all(|rule| {
        if rule.body.iter().any(|b| b.default_negated && w.contains(&b.atom)) {
            return true;
        }
        let body_holds = rule
            .body
            .iter()
            .filter(|b| !b.default_negated)
            .all(|b| candidate.contains(&b.atom));
        !body_holds || rule.head.iter().any(|h| candidate.contains(h))
    })
}

fn subsets(atoms: &[Atom]) -> Vec<BeliefSet> {
    let mut out = Vec::new();
    for bits in 0..(1u32 << atoms.len()) {
        out.push(
            atoms
                .iter()
                .enumerate()
                .filter(|(i, _)| bits & (1 << i) != 0)
                .map(|(_, a)| a.clone())
                .collect(),
        );
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Each belief set is a model of its own default-negation reduct and
    /// no proper subset of it is.
    #[test]
    fn belief_sets_are_minimal_models_of_their_reduct(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = random_program(&mut rng, false);
        for b in belief_sets(&program).unwrap() {
            prop_assert!(is_model_of_reduct(&program, &b, &b));
            let atoms: Vec<Atom> = b.iter().cloned().collect();
            for smaller in subsets(&atoms) {
                if smaller != b {
                    prop_assert!(
                        !is_model_of_reduct(&program, &smaller, &b),
                        "proper subset {smaller:?} also models the reduct of {b:?}"
                    );
                }
            }
        }
    }

    /// No belief set contains another.
    #[test]
    fn belief_sets_form_an_antichain(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = random_program(&mut rng, false);
        let sets: Vec<BeliefSet> = belief_sets(&program).unwrap().into_iter().collect();
        for a in &sets {
            for b in &sets {
                prop_assert!(a == b || !a.is_subset(b));
            }
        }
    }

    /// A world view is exactly the set of belief sets of its own modal
    /// reduct — the defining fixpoint, rechecked from outside.
    #[test]
    fn world_views_reproduce_their_modal_reduct(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = random_program(&mut rng, true);
        for view in world_views(&program).unwrap() {
            let reduct = modal_reduct(&program, &view.belief_sets);
            prop_assert_eq!(belief_sets(&reduct).unwrap(), view.belief_sets);
        }
    }

    /// The stratified search returns only true world views and finds one
    /// whenever one exists.
    #[test]
    fn stratified_search_is_sound_and_agrees_on_existence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = random_program(&mut rng, true);
        let flat: BTreeSet<_> =
            world_views(&program).unwrap().into_iter().map(|v| v.belief_sets).collect();
        let layered: BTreeSet<_> = world_views_stratified(&program, DEFAULT_SEARCH_BUDGET)
            .unwrap()
            .into_iter()
            .map(|v| v.belief_sets)
            .collect();
        prop_assert!(layered.is_subset(&flat));
        prop_assert_eq!(layered.is_empty(), flat.is_empty());
    }

    /// Rendering a program and parsing it back is the identity.
    #[test]
    fn rendered_programs_reparse_equal(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let program = random_program(&mut rng, true);
        let text = program.to_string();
        prop_assert_eq!(parse_elp(&text, "rendered").unwrap(), program);
    }
}
