//! World semantics: states, situations, three-valued truth, and the
//! transition relations for world-changing and sensing actions.
//!
//! A state fixes each fluent to true or false and is stored as a bit mask. A
//! situation is the set of states the agent considers possible; knowledge is
//! truth in every state of the situation. Transition functions return every
//! successor situation an interpretation of the domain may choose; callers
//! that need a single run pick one per (action, situation) pair.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::domain::{
    ActionId, ActionKind, Domain, FluentId, FluentLiteral, Proposition, TestCondition,
};

/// Complete valuation of the domain's fluents, packed into a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct State(u32);

/// Set of states considered possible; consistent iff non-empty.
pub type Situation = BTreeSet<State>;

/// Set of situations, one per way the interpretations may have branched.
pub type EpistemicState = BTreeSet<Situation>;

impl State {
    pub fn empty() -> State {
        State(0)
    }

    pub fn from_fluents<I: IntoIterator<Item = FluentId>>(fluents: I) -> State {
        let mut s = State(0);
        for f in fluents {
            s = s.with(f, true);
        }
        s
    }

    pub fn contains(self, f: FluentId) -> bool {
        self.0 & (1 << f.index()) != 0
    }

    pub fn with(self, f: FluentId, value: bool) -> State {
        if value {
            State(self.0 | (1 << f.index()))
        } else {
            State(self.0 & !(1 << f.index()))
        }
    }

    pub fn satisfies_literal(self, lit: FluentLiteral) -> bool {
        self.contains(lit.fluent) == lit.positive
    }

    pub fn satisfies_all(self, lits: &[FluentLiteral]) -> bool {
        lits.iter().all(|l| self.satisfies_literal(*l))
    }

    pub fn satisfies(self, cond: &TestCondition) -> bool {
        self.satisfies_all(cond.conjuncts())
    }

    pub fn render(self, d: &Domain) -> String {
        let names: Vec<&str> =
            d.fluents().filter(|f| self.contains(*f)).map(|f| d.fluent_name(f)).collect();
        format!("{{{}}}", names.join(", "))
    }
}

/// Every state over the first `fluent_count` fluents.
pub fn all_states(fluent_count: usize) -> impl Iterator<Item = State> {
    assert!(fluent_count <= crate::domain::MAX_FLUENT_UNIVERSE);
    (0u64..(1u64 << fluent_count)).map(|m| State(m as u32))
}

/// The set of states consistent with every `initially` proposition. Empty
/// when the value propositions contradict each other.
pub fn initial_situation(d: &Domain) -> Situation {
    let mut literals = Vec::new();
    for p in d.propositions() {
        if let Proposition::Value { literal, .. } = p {
            literals.push(*literal);
        }
    }
    all_states(d.fluent_count()).filter(|s| s.satisfies_all(&literals)).collect()
}

/// Truth value of a formula in a situation: true in every possible state,
/// false in every possible state, or neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThreeValued {
    True,
    False,
    Unknown,
}

/// Evaluate a conjunction per state, then quantify over the situation. The
/// empty situation is rejected; callers treat it before testing anything.
pub fn truth_in_situation(
    sit: &Situation,
    cond: &TestCondition,
) -> Result<ThreeValued, SemanticsError> {
    if sit.is_empty() {
        return Err(SemanticsError::EmptySituation);
    }
    Ok(if sit.iter().all(|s| s.satisfies(cond)) {
        ThreeValued::True
    } else if sit.iter().all(|s| !s.satisfies(cond)) {
        ThreeValued::False
    } else {
        ThreeValued::Unknown
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SemanticsError {
    #[error("truth is undefined in the empty situation")]
    EmptySituation,
    #[error("action `{action}` makes `{fluent}` both true and false in the same state")]
    ContradictoryEffects { action: String, fluent: String },
    /// Defensive: cannot occur for a non-empty situation, because every state
    /// belongs to exactly one compatibility cell per sensed fluent.
    #[error("sensing with `{action}` left no consistent situation")]
    NoConsistentSensing { action: String },
}

/// All result states of executing world-changing action `a` in state `s`.
///
/// Per fluent the precedence is: applicable positive effect, then applicable
/// negative effect, then applicable non-deterministic effect (the fluent may
/// take either value), then inertia. Applicability is always judged in the
/// original state. A fluent with both a positive and a negative applicable
/// effect makes the domain contradictory.
pub fn zero_model_outcomes(
    d: &Domain,
    a: ActionId,
    s: State,
) -> Result<Vec<State>, SemanticsError> {
    let mut forced: Vec<Option<bool>> = vec![None; d.fluent_count()];
    let mut free: BTreeSet<FluentId> = BTreeSet::new();

    for p in d.propositions() {
        match p {
            Proposition::Effect { action, effect, preconditions, .. }
                if *action == a && s.satisfies_all(preconditions) =>
            {
                let slot = &mut forced[effect.fluent.index()];
                match slot {
                    Some(v) if *v != effect.positive => {
                        return Err(SemanticsError::ContradictoryEffects {
                            action: d.action_name(a).to_string(),
                            fluent: d.fluent_name(effect.fluent).to_string(),
                        });
                    }
                    _ => *slot = Some(effect.positive),
                }
            }
            Proposition::NonDet { action, fluent, preconditions, .. }
                if *action == a && s.satisfies_all(preconditions) =>
            {
                free.insert(*fluent);
            }
            _ => {}
        }
    }
    free.retain(|f| forced[f.index()].is_none());

    let mut base = s;
    for f in d.fluents() {
        if let Some(v) = forced[f.index()] {
            base = base.with(f, v);
        }
    }

    let free: Vec<FluentId> = free.into_iter().collect();
    let mut out = BTreeSet::new();
    for choice in 0u64..(1u64 << free.len()) {
        let mut next = base;
        for (i, f) in free.iter().enumerate() {
            next = next.with(*f, choice & (1 << i) != 0);
        }
        out.insert(next);
    }
    Ok(out.into_iter().collect())
}

/// Successor situations of a world-changing action: one situation per way of
/// picking a result state for each possible state.
pub fn nonsensing_successors(
    d: &Domain,
    a: ActionId,
    sit: &Situation,
) -> Result<Vec<Situation>, SemanticsError> {
    let states: Vec<State> = sit.iter().copied().collect();
    let mut choices: Vec<Vec<State>> = Vec::with_capacity(states.len());
    for s in &states {
        choices.push(zero_model_outcomes(d, a, *s)?);
    }

    let mut out: BTreeSet<Situation> = BTreeSet::new();
    let mut picked: Vec<usize> = vec![0; states.len()];
    loop {
        let successor: Situation =
            picked.iter().enumerate().map(|(i, &j)| choices[i][j]).collect();
        out.insert(successor);

        // Advance the mixed-radix counter over per-state choices.
        let mut i = 0;
        loop {
            if i == picked.len() {
                return Ok(out.into_iter().collect());
            }
            picked[i] += 1;
            if picked[i] < choices[i].len() {
                break;
            }
            picked[i] = 0;
            i += 1;
        }
    }
}

/// The situations a sensing outcome may leave the agent in, for one sensed
/// fluent `f` with knowledge precondition `phi` (a disjunction of
/// conjunctions).
///
/// When the situation already settles `f`, sensing it reveals nothing and
/// the only compatible situation is the situation itself. Otherwise the
/// compatible situations are the non-empty cells among: states where `phi`
/// fails, states where `phi` holds and `f` is false, and states where `phi`
/// holds and `f` is true.
pub fn compatible_situations(
    sit: &Situation,
    f: FluentId,
    phi: &[TestCondition],
) -> Vec<Situation> {
    let known = sit.iter().all(|s| s.contains(f)) || sit.iter().all(|s| !s.contains(f));
    if known {
        return vec![sit.clone()];
    }

    let holds = |s: &State| phi.iter().any(|c| s.satisfies(c));
    let inapplicable: Situation = sit.iter().filter(|s| !holds(s)).copied().collect();
    let sensed_false: Situation =
        sit.iter().filter(|s| holds(s) && !s.contains(f)).copied().collect();
    let sensed_true: Situation =
        sit.iter().filter(|s| holds(s) && s.contains(f)).copied().collect();

    [inapplicable, sensed_false, sensed_true].into_iter().filter(|c| !c.is_empty()).collect()
}

/// Successor situations of a sensing action.
///
/// With sensed fluents `f1..fn`, a successor is any consistent intersection
/// of one compatible situation per `fi`; an action with no knowledge laws
/// leaves the situation unchanged.
pub fn sensing_successors(
    d: &Domain,
    a: ActionId,
    sit: &Situation,
) -> Result<Vec<Situation>, SemanticsError> {
    if sit.is_empty() {
        return Ok(vec![Situation::new()]);
    }

    let sensed = d
        .potential_sensing_effects(a)
        .expect("sensing_successors is only called for sensing actions");
    let mut groups: Vec<Vec<Situation>> = Vec::with_capacity(sensed.len());
    for f in sensed {
        let phi = d
            .knowledge_precondition(a, f)
            .expect("potential sensing effects exist only for sensing actions");
        groups.push(compatible_situations(sit, f, &phi));
    }

    let mut out: BTreeSet<Situation> = BTreeSet::new();
    let mut picked: Vec<usize> = vec![0; groups.len()];
    loop {
        let mut successor = sit.clone();
        for (i, &j) in picked.iter().enumerate() {
            successor = successor.intersection(&groups[i][j]).copied().collect();
        }
        if !successor.is_empty() {
            out.insert(successor);
        }

        let mut i = 0;
        loop {
            if i == picked.len() {
                if out.is_empty() {
                    return Err(SemanticsError::NoConsistentSensing {
                        action: d.action_name(a).to_string(),
                    });
                }
                return Ok(out.into_iter().collect());
            }
            picked[i] += 1;
            if picked[i] < groups[i].len() {
                break;
            }
            picked[i] = 0;
            i += 1;
        }
    }
}

/// Successor situations of any action, dispatching on its kind.
pub fn successors(
    d: &Domain,
    a: ActionId,
    sit: &Situation,
) -> Result<Vec<Situation>, SemanticsError> {
    match d.action_kind(a) {
        ActionKind::Sensing => sensing_successors(d, a, sit),
        ActionKind::NonSensing => nonsensing_successors(d, a, sit),
    }
}

pub fn render_situation(d: &Domain, sit: &Situation) -> String {
    let states: Vec<String> = sit.iter().map(|s| s.render(d)).collect();
    format!("{{{}}}", states.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_domain;

    fn state(d: &Domain, fluents: &[&str]) -> State {
        State::from_fluents(fluents.iter().map(|n| d.fluent(n).unwrap()))
    }

    fn situation(d: &Domain, states: &[&[&str]]) -> Situation {
        states.iter().map(|fs| state(d, fs)).collect()
    }

    const BULB: &str = "\
initially -burnOut.
initially -bulbFixed.
changeBulb causes burnOut if switchOn.
changeBulb causes bulbFixed if -switchOn.
turnSwitch causes switchOn if -switchOn.
turnSwitch causes -switchOn if switchOn.
";

    const ICE: &str = "\
initially inHandIceBag.
initially solidIce.
initially noDrops.
pickUp causes inHandIceBag if -inHandIceBag.
drop causes -inHandIceBag if inHandIceBag.
drop may affect solidIce if noDrops.
drop may affect solidIce if fewDrops.
drop causes fewDrops if noDrops.
drop causes enoughDrops if fewDrops.
drop causes -solidIce if enoughDrops.
checkIce causes to know solidIce.
putIceInCups causes iceInCups if -solidIce.
";

    #[test]
    fn truth_quantifies_over_states() {
        let d = parse_domain("initially f.\na causes g.\n", "t.akd").unwrap();
        let f = d.fluent("f").unwrap();
        let g = d.fluent("g").unwrap();
        let sit = situation(&d, &[&["f"], &["f", "g"]]);

        let know_f = TestCondition::new(vec![FluentLiteral::pos(f)]).unwrap();
        let know_g = TestCondition::new(vec![FluentLiteral::pos(g)]).unwrap();
        assert_eq!(truth_in_situation(&sit, &know_f), Ok(ThreeValued::True));
        assert_eq!(truth_in_situation(&sit, &know_g), Ok(ThreeValued::Unknown));
        let no_f = TestCondition::new(vec![FluentLiteral::neg(f)]).unwrap();
        assert_eq!(truth_in_situation(&sit, &no_f), Ok(ThreeValued::False));
        assert_eq!(truth_in_situation(&sit, &TestCondition::trivial()), Ok(ThreeValued::True));
        assert_eq!(
            truth_in_situation(&Situation::new(), &know_f),
            Err(SemanticsError::EmptySituation)
        );
    }

    #[test]
    fn conjunction_truth_is_per_state_not_per_literal() {
        // f and g are each unknown, yet f,g is false in both states.
        let d = parse_domain("a causes f.\na causes g.\n", "t.akd").unwrap();
        let f = d.fluent("f").unwrap();
        let g = d.fluent("g").unwrap();
        let sit = situation(&d, &[&["f"], &["g"]]);
        let both =
            TestCondition::new(vec![FluentLiteral::pos(f), FluentLiteral::pos(g)]).unwrap();
        assert_eq!(truth_in_situation(&sit, &both), Ok(ThreeValued::False));
    }

    #[test]
    fn initial_situation_filters_all_states() {
        let d = parse_domain(BULB, "bulb.akd").unwrap();
        let sit = initial_situation(&d);
        assert_eq!(sit, situation(&d, &[&[], &["switchOn"]]));
    }

    #[test]
    fn initial_situation_without_value_propositions_is_full_ignorance() {
        let d =
            parse_domain("look causes to know doorOpened if facingDoor.\n", "door.akd").unwrap();
        assert_eq!(initial_situation(&d).len(), 4);
    }

    #[test]
    fn contradictory_value_propositions_leave_no_states() {
        let d = parse_domain("initially f.\ninitially -f.\n", "t.akd").unwrap();
        assert!(initial_situation(&d).is_empty());
    }

    #[test]
    fn switch_toggles_and_bulb_burns_out() {
        let d = parse_domain(BULB, "bulb.akd").unwrap();
        let turn = d.action("turnSwitch").unwrap();
        let change = d.action("changeBulb").unwrap();

        let off = state(&d, &[]);
        let on = state(&d, &["switchOn"]);
        assert_eq!(zero_model_outcomes(&d, turn, off).unwrap(), vec![on]);
        assert_eq!(zero_model_outcomes(&d, turn, on).unwrap(), vec![off]);
        assert_eq!(
            zero_model_outcomes(&d, change, on).unwrap(),
            vec![state(&d, &["switchOn", "burnOut"])]
        );
        assert_eq!(
            zero_model_outcomes(&d, change, off).unwrap(),
            vec![state(&d, &["bulbFixed"])]
        );
    }

    #[test]
    fn action_without_propositions_is_pure_inertia() {
        let d = parse_domain("initially f.\nwait causes g if h.\n", "t.akd").unwrap();
        let wait = d.action("wait").unwrap();
        let s = state(&d, &["f"]);
        // The only effect of wait is inapplicable here.
        assert_eq!(zero_model_outcomes(&d, wait, s).unwrap(), vec![s]);
    }

    #[test]
    fn contradictory_effects_are_reported() {
        let d = parse_domain("a causes f if g.\na causes -f if h.\n", "t.akd").unwrap();
        let a = d.action("a").unwrap();
        // Only one effect applicable: fine.
        assert!(zero_model_outcomes(&d, a, state(&d, &["g"])).is_ok());
        // Both applicable: contradiction.
        let err = zero_model_outcomes(&d, a, state(&d, &["g", "h"])).unwrap_err();
        assert!(matches!(err, SemanticsError::ContradictoryEffects { .. }));
    }

    #[test]
    fn dropping_the_bag_may_break_the_ice() {
        let d = parse_domain(ICE, "ice.akd").unwrap();
        let drop = d.action("drop").unwrap();
        let s = state(&d, &["inHandIceBag", "solidIce", "noDrops"]);
        let models = zero_model_outcomes(&d, drop, s).unwrap();
        let expected: BTreeSet<State> = [
            state(&d, &["solidIce", "noDrops", "fewDrops"]),
            state(&d, &["noDrops", "fewDrops"]),
        ]
        .into_iter()
        .collect();
        assert_eq!(models.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn deterministic_effect_overrides_nondeterministic_one() {
        let d = parse_domain(ICE, "ice.akd").unwrap();
        let drop = d.action("drop").unwrap();
        // enoughDrops forces -solidIce even though fewDrops makes solidIce
        // a potential non-deterministic effect.
        let s = state(&d, &["inHandIceBag", "solidIce", "fewDrops", "enoughDrops"]);
        let models = zero_model_outcomes(&d, drop, s).unwrap();
        assert_eq!(models, vec![state(&d, &["fewDrops", "enoughDrops"])]);
    }

    #[test]
    fn nonsensing_successors_enumerate_state_choices() {
        let d = parse_domain(ICE, "ice.akd").unwrap();
        let drop = d.action("drop").unwrap();
        let sit = situation(&d, &[&["inHandIceBag", "solidIce", "noDrops"]]);
        let succ = nonsensing_successors(&d, drop, &sit).unwrap();
        // One possible state, two result states: two singleton situations.
        assert_eq!(succ.len(), 2);
        assert!(succ.iter().all(|s| s.len() == 1));
    }

    #[test]
    fn deterministic_action_yields_one_successor() {
        let d = parse_domain(BULB, "bulb.akd").unwrap();
        let turn = d.action("turnSwitch").unwrap();
        let sit = initial_situation(&d);
        let succ = nonsensing_successors(&d, turn, &sit).unwrap();
        assert_eq!(succ.len(), 1);
        assert_eq!(succ[0], sit); // toggling both states maps the pair to itself
    }

    #[test]
    fn looking_at_the_door_splits_ignorance_three_ways() {
        let d =
            parse_domain("look causes to know doorOpened if facingDoor.\n", "door.akd").unwrap();
        let look = d.action("look").unwrap();
        let ignorance: Situation = all_states(d.fluent_count()).collect();
        assert_eq!(ignorance.len(), 4);

        let succ = sensing_successors(&d, look, &ignorance).unwrap();
        let expected: BTreeSet<Situation> = [
            situation(&d, &[&[], &["doorOpened"]]),
            situation(&d, &[&["facingDoor"]]),
            situation(&d, &[&["doorOpened", "facingDoor"]]),
        ]
        .into_iter()
        .collect();
        assert_eq!(succ.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn sensing_two_fluents_intersects_their_cells() {
        let d = parse_domain(
            "\
initially curtainOpen.
initially lightOn.
lookInRoom causes to know rainOutside if curtainOpen.
lookInRoom causes to know boardClean if lightOn.
",
            "room.akd",
        )
        .unwrap();
        let look = d.action("lookInRoom").unwrap();
        let sit = initial_situation(&d);
        assert_eq!(sit.len(), 4);

        let succ = sensing_successors(&d, look, &sit).unwrap();
        let expected: BTreeSet<Situation> = [
            situation(&d, &[&["curtainOpen", "lightOn"]]),
            situation(&d, &[&["rainOutside", "curtainOpen", "lightOn"]]),
            situation(&d, &[&["boardClean", "curtainOpen", "lightOn"]]),
            situation(&d, &[&["rainOutside", "boardClean", "curtainOpen", "lightOn"]]),
        ]
        .into_iter()
        .collect();
        assert_eq!(succ.into_iter().collect::<BTreeSet<_>>(), expected);
    }

    #[test]
    fn compatibility_cells_partition_when_fluent_is_unknown() {
        let d =
            parse_domain("look causes to know doorOpened if facingDoor.\n", "door.akd").unwrap();
        let f = d.fluent("doorOpened").unwrap();
        let fd = d.fluent("facingDoor").unwrap();
        let phi = vec![TestCondition::new(vec![FluentLiteral::pos(fd)]).unwrap()];
        let sit: Situation = all_states(d.fluent_count()).collect();
        let cells = compatible_situations(&sit, f, &phi);
        assert_eq!(cells.len(), 3);
        let union: Situation = cells.iter().flatten().copied().collect();
        assert_eq!(union, sit);
        let total: usize = cells.iter().map(|c| c.len()).sum();
        assert_eq!(total, sit.len()); // pairwise disjoint
    }

    #[test]
    fn known_fluent_is_compatible_only_with_the_situation_itself() {
        // f is known true although its knowledge precondition g is unknown;
        // the precondition must not split the situation.
        let d = parse_domain("initially f.\nlook causes to know f if g.\n", "t.akd").unwrap();
        let look = d.action("look").unwrap();
        let sit = initial_situation(&d);
        assert_eq!(sit.len(), 2);
        assert_eq!(sensing_successors(&d, look, &sit).unwrap(), vec![sit]);
    }

    #[test]
    fn sensing_action_without_laws_changes_nothing() {
        let mut b = crate::domain::DomainBuilder::new();
        b.fluent("f");
        b.sensing_action("ping");
        let d = b.build().unwrap();
        let ping = d.action("ping").unwrap();
        let sit: Situation = all_states(1).collect();
        assert_eq!(sensing_successors(&d, ping, &sit).unwrap(), vec![sit]);
    }

    #[test]
    fn sensing_is_idempotent_on_its_own_results() {
        let d =
            parse_domain("look causes to know doorOpened if facingDoor.\n", "door.akd").unwrap();
        let look = d.action("look").unwrap();
        let ignorance: Situation = all_states(d.fluent_count()).collect();
        for succ in sensing_successors(&d, look, &ignorance).unwrap() {
            assert_eq!(sensing_successors(&d, look, &succ).unwrap(), vec![succ.clone()]);
        }
    }

    #[test]
    fn empty_situation_is_absorbing() {
        let d = parse_domain(BULB, "bulb.akd").unwrap();
        let turn = d.action("turnSwitch").unwrap();
        let empty = Situation::new();
        assert_eq!(nonsensing_successors(&d, turn, &empty).unwrap(), vec![empty.clone()]);
        let ds = parse_domain("look causes to know f.\n", "t.akd").unwrap();
        let look = ds.action("look").unwrap();
        assert_eq!(sensing_successors(&ds, look, &empty).unwrap(), vec![empty]);
    }
}
