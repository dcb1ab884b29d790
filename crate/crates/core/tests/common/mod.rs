//! Shared test support: a brute-force plan evaluator written separately
//! from the engine, plus small random generators for domains and plans.
//!
//! The evaluator shares only the parsed syntax tree with the library.
//! States are name-keyed sets, transition choices are memoized per
//! (action, situation) pair exactly as functional consistency demands,
//! and while loops are unrolled with an explicit visited set. Lazily
//! enumerating the memo tables along the plan visits the same outcomes
//! as enumerating complete transition tables over every reachable
//! (action, situation) pair: entries off the followed trajectory never
//! influence a result, so each lazy branch stands for the class of
//! complete tables extending its memo.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::collections::BTreeSet;

use ak_core::domain::{Domain, FluentLiteral, Plan, Proposition, Query, TestCondition};
use ak_core::semantics::Situation;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A state named by the fluents true in it.
pub type OState = BTreeSet<String>;
/// A situation: the set of states the world might be in.
pub type OSit = BTreeSet<OState>;

/// Transition choices fixed so far: one successor per (action, situation).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct OMemo(BTreeMap<(String, OSit), OSit>);

/// One fully evaluated branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OBranch {
    /// Final situation; `None` is the absorbing failure situation.
    pub result: Option<OSit>,
    /// True when the failure came from a repeating loop-head situation.
    pub diverged: bool,
    /// Most iterations any single loop ran on this branch.
    pub loop_iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OVerdict {
    Yes,
    No,
    Unknown,
    Failed,
}

struct Cont {
    end: Option<OSit>,
    memo: OMemo,
    diverged: bool,
    loops: usize,
}

fn literal_holds(d: &Domain, state: &OState, lit: FluentLiteral) -> bool {
    state.contains(d.fluent_name(lit.fluent)) == lit.positive
}

fn conjunction_holds(d: &Domain, state: &OState, lits: &[FluentLiteral]) -> bool {
    lits.iter().all(|&l| literal_holds(d, state, l))
}

/// Disjunction-of-conjunctions, the shape of knowledge preconditions.
fn disjunction_holds(d: &Domain, state: &OState, disjuncts: &[Vec<FluentLiteral>]) -> bool {
    disjuncts.iter().any(|conj| conjunction_holds(d, state, conj))
}

/// Three-valued truth of a conjunction over a whole situation.
fn condition_truth(d: &Domain, sit: &OSit, cond: &TestCondition) -> Option<bool> {
    if sit.iter().all(|s| conjunction_holds(d, s, cond.conjuncts())) {
        Some(true)
    } else if sit.iter().all(|s| !conjunction_holds(d, s, cond.conjuncts())) {
        Some(false)
    } else {
        None
    }
}

fn is_sensing(d: &Domain, action: &str) -> bool {
    d.propositions().iter().any(|p| {
        matches!(p, Proposition::Knowledge { action: a, .. } if d.action_name(*a) == action)
    })
}

/// All states over the full fluent vocabulary satisfying the value
/// propositions.
pub fn oracle_initial(d: &Domain) -> OSit {
    let names: Vec<&str> = d.fluents().map(|f| d.fluent_name(f)).collect();
    let pinned: Vec<FluentLiteral> = d
        .propositions()
        .iter()
        .filter_map(|p| match p {
            Proposition::Value { literal, .. } => Some(*literal),
            _ => None,
        })
        .collect();
    let mut out = OSit::new();
    for bits in 0..(1u64 << names.len()) {
        let state: OState = names
            .iter()
            .enumerate()
            .filter(|(i, _)| bits & (1 << i) != 0)
            .map(|(_, n)| n.to_string())
            .collect();
        if pinned.iter().all(|&l| literal_holds(d, &state, l)) {
            out.insert(state);
        }
    }
    out
}

/// Every situation a non-sensing action may lead to: deterministic
/// effects first, then one branch per assignment to the unforced
/// non-deterministic fluents of each state, inertia for the rest.
fn nonsensing_results(d: &Domain, action: &str, sit: &OSit) -> Result<Vec<OSit>, String> {
    let mut per_state: Vec<Vec<OState>> = Vec::new();
    for state in sit {
        let mut forced_true: BTreeSet<String> = BTreeSet::new();
        let mut forced_false: BTreeSet<String> = BTreeSet::new();
        let mut loose: BTreeSet<String> = BTreeSet::new();
        for p in d.propositions() {
            match p {
                Proposition::Effect { action: a, effect, preconditions, .. }
                    if d.action_name(*a) == action
                        && conjunction_holds(d, state, preconditions) =>
                {
                    let name = d.fluent_name(effect.fluent).to_string();
                    if effect.positive {
                        forced_true.insert(name);
                    } else {
                        forced_false.insert(name);
                    }
                }
                Proposition::NonDet { action: a, fluent, preconditions, .. }
                    if d.action_name(*a) == action
                        && conjunction_holds(d, state, preconditions) =>
                {
                    loose.insert(d.fluent_name(*fluent).to_string());
                }
                _ => {}
            }
        }
        if let Some(f) = forced_true.intersection(&forced_false).next() {
            return Err(format!("contradictory effects on {f}"));
        }
        let loose: Vec<String> =
            loose.into_iter().filter(|f| !forced_true.contains(f) && !forced_false.contains(f)).collect();
        let base: OState = state
            .union(&forced_true)
            .filter(|f| !forced_false.contains(*f))
            .cloned()
            .collect();
        let mut options = Vec::new();
        for bits in 0..(1u32 << loose.len()) {
            let mut next = base.clone();
            for (i, f) in loose.iter().enumerate() {
                if bits & (1 << i) != 0 {
                    next.insert(f.clone());
                } else {
                    next.remove(f);
                }
            }
            options.push(next);
        }
        per_state.push(options);
    }
    // Cartesian product over the per-state options.
    let mut results: Vec<OSit> = vec![OSit::new()];
    for options in per_state {
        let mut next = Vec::new();
        for partial in &results {
            for option in &options {
                let mut grown = partial.clone();
                grown.insert(option.clone());
                next.push(grown);
            }
        }
        results = next;
    }
    results.sort();
    results.dedup();
    Ok(results)
}

/// Every situation a sensing action may lead to: for each sensed fluent
/// whose value is open, one of the non-empty compatibility cells; the
/// result is any consistent intersection of the per-fluent picks.
fn sensing_results(d: &Domain, action: &str, sit: &OSit) -> Result<Vec<OSit>, String> {
    let mut by_fluent: BTreeMap<String, Vec<Vec<FluentLiteral>>> = BTreeMap::new();
    for p in d.propositions() {
        if let Proposition::Knowledge { action: a, sensed, preconditions, .. } = p {
            if d.action_name(*a) == action {
                by_fluent
                    .entry(d.fluent_name(*sensed).to_string())
                    .or_default()
                    .push(preconditions.clone());
            }
        }
    }
    let mut per_fluent: Vec<Vec<OSit>> = Vec::new();
    for (fluent, disjuncts) in &by_fluent {
        let value_known = sit.iter().all(|s| s.contains(fluent))
            || sit.iter().all(|s| !s.contains(fluent));
        if value_known {
            per_fluent.push(vec![sit.clone()]);
            continue;
        }
        let mut cells: Vec<OSit> = vec![OSit::new(), OSit::new(), OSit::new()];
        for state in sit {
            let idx = if !disjunction_holds(d, state, disjuncts) {
                0
            } else if !state.contains(fluent) {
                1
            } else {
                2
            };
            cells[idx].insert(state.clone());
        }
        per_fluent.push(cells.into_iter().filter(|c| !c.is_empty()).collect());
    }
    let mut results: Vec<OSit> = vec![sit.clone()];
    for options in per_fluent {
        let mut next = Vec::new();
        for partial in &results {
            for option in &options {
                let meet: OSit = partial.intersection(option).cloned().collect();
                if !meet.is_empty() {
                    next.push(meet);
                }
            }
        }
        results = next;
    }
    results.sort();
    results.dedup();
    if results.is_empty() {
        return Err("no consistent sensing result".into());
    }
    Ok(results)
}

fn run(
    d: &Domain,
    plan: &Plan,
    sit: OSit,
    memo: OMemo,
    loops: usize,
    budget: usize,
) -> Result<Vec<Cont>, String> {
    Ok(match plan {
        Plan::Empty => vec![Cont { end: Some(sit), memo, diverged: false, loops }],
        Plan::Action(a, rest) => {
            let name = d.action_name(*a).to_string();
            let key = (name.clone(), sit.clone());
            let options = if let Some(fixed) = memo.0.get(&key) {
                vec![fixed.clone()]
            } else if is_sensing(d, &name) {
                sensing_results(d, &name, &sit)?
            } else {
                nonsensing_results(d, &name, &sit)?
            };
            let mut conts = Vec::new();
            for option in options {
                let mut extended = memo.clone();
                extended.0.insert(key.clone(), option.clone());
                conts.extend(run(d, rest, option, extended, loops, budget)?);
            }
            conts
        }
        Plan::IfThen(cond, then_branch, rest) => match condition_truth(d, &sit, cond) {
            Some(true) => run(d, &then_branch.concat(rest), sit, memo, loops, budget)?,
            Some(false) => run(d, rest, sit, memo, loops, budget)?,
            None => vec![Cont { end: None, memo, diverged: false, loops }],
        },
        Plan::IfThenElse(cond, then_branch, else_branch, rest) => {
            match condition_truth(d, &sit, cond) {
                Some(true) => run(d, &then_branch.concat(rest), sit, memo, loops, budget)?,
                Some(false) => run(d, &else_branch.concat(rest), sit, memo, loops, budget)?,
                None => vec![Cont { end: None, memo, diverged: false, loops }],
            }
        }
        Plan::While(cond, body, rest) => {
            let mut conts = Vec::new();
            run_while(d, cond, body, rest, sit, memo, BTreeSet::new(), 0, loops, budget, &mut conts)?;
            conts
        }
    })
}

#[allow(clippy::too_many_arguments)]
fn run_while(
    d: &Domain,
    cond: &TestCondition,
    body: &Plan,
    rest: &Plan,
    sit: OSit,
    memo: OMemo,
    mut visited: BTreeSet<OSit>,
    iterations: usize,
    loops: usize,
    budget: usize,
    out: &mut Vec<Cont>,
) -> Result<(), String> {
    match condition_truth(d, &sit, cond) {
        Some(false) => out.extend(run(d, rest, sit, memo, loops.max(iterations), budget)?),
        None => out.push(Cont { end: None, memo, diverged: false, loops: loops.max(iterations) }),
        Some(true) => {
            if visited.contains(&sit) {
                out.push(Cont { end: None, memo, diverged: true, loops: loops.max(iterations) });
                return Ok(());
            }
            if iterations + 1 > budget {
                return Err(format!("loop budget of {budget} exhausted"));
            }
            visited.insert(sit.clone());
            for cont in run(d, body, sit, memo, loops, budget)? {
                match cont.end {
                    Some(next) => run_while(
                        d,
                        cond,
                        body,
                        rest,
                        next,
                        cont.memo,
                        visited.clone(),
                        iterations + 1,
                        loops.max(cont.loops),
                        budget,
                        out,
                    )?,
                    None => out.push(cont),
                }
            }
        }
    }
    Ok(())
}

/// Evaluate a query over every model; error text mirrors the engine's
/// error classes without sharing any code with it.
pub fn oracle_eval(d: &Domain, q: &Query, budget: usize) -> Result<Vec<OBranch>, String> {
    let init = oracle_initial(d);
    if init.is_empty() {
        return Err("domain inconsistent".into());
    }
    let conts = run(d, &q.plan, init, OMemo::default(), 0, budget)?;
    Ok(conts
        .into_iter()
        .map(|c| OBranch { result: c.end, diverged: c.diverged, loop_iterations: c.loops })
        .collect())
}

/// Default-mode verdict over the branch endpoints.
pub fn oracle_verdict(d: &Domain, q: &Query, budget: usize) -> Result<(OVerdict, Vec<OBranch>), String> {
    let branches = oracle_eval(d, q, budget)?;
    let mut values = Vec::new();
    for b in &branches {
        match &b.result {
            None => values.push(None),
            Some(sit) => values.push(Some(condition_truth(d, sit, &q.goal))),
        }
    }
    let verdict = if values.iter().any(Option::is_none) {
        OVerdict::Failed
    } else if values.iter().all(|v| *v == Some(Some(true))) {
        OVerdict::Yes
    } else if values.iter().all(|v| *v == Some(Some(false))) {
        OVerdict::No
    } else {
        OVerdict::Unknown
    };
    Ok((verdict, branches))
}

/// Engine situation rendered into the oracle's representation.
pub fn osit_of(d: &Domain, sit: &Situation) -> OSit {
    sit.iter()
        .map(|state| {
            d.fluents()
                .filter(|&f| state.contains(f))
                .map(|f| d.fluent_name(f).to_string())
                .collect()
        })
        .collect()
}

const FLUENT_POOL: [&str; 3] = ["wet", "cold", "dark"];
const ACTION_POOL: [&str; 2] = ["poke", "scan"];

/// A small random domain over at most 3 fluents and 2 actions, with at
/// most one knowledge law and one value proposition per fluent.
pub fn random_domain_text(rng: &mut ChaCha8Rng) -> String {
    let fluent_count = rng.gen_range(1..=FLUENT_POOL.len());
    let action_count = rng.gen_range(1..=ACTION_POOL.len());
    let fluents = &FLUENT_POOL[..fluent_count];
    let actions = &ACTION_POOL[..action_count];

    let mut lines = Vec::new();
    lines.push(format!("fluents {}.", fluents.join(", ")));
    lines.push(format!("actions {}.", actions.join(", ")));

    for f in fluents {
        match rng.gen_range(0..3) {
            0 => lines.push(format!("initially {f}.")),
            1 => lines.push(format!("initially -{f}.")),
            _ => {}
        }
    }

    let sensing_action = if rng.gen_bool(0.6) {
        let a = actions[rng.gen_range(0..actions.len())];
        let f = fluents[rng.gen_range(0..fluents.len())];
        let mut law = format!("{a} causes to know {f}");
        if rng.gen_bool(0.7) {
            law.push_str(&format!(" if {}", random_condition(rng, fluents)));
        }
        law.push('.');
        lines.push(law);
        Some(a)
    } else {
        None
    };

    for _ in 0..rng.gen_range(0..5) {
        let candidates: Vec<&str> =
            actions.iter().copied().filter(|a| Some(*a) != sensing_action).collect();
        if candidates.is_empty() {
            break;
        }
        let a = candidates[rng.gen_range(0..candidates.len())];
        let f = fluents[rng.gen_range(0..fluents.len())];
        let mut prop = if rng.gen_bool(0.25) {
            format!("{a} may affect {f}")
        } else if rng.gen_bool(0.5) {
            format!("{a} causes {f}")
        } else {
            format!("{a} causes -{f}")
        };
        if rng.gen_bool(0.7) {
            prop.push_str(&format!(" if {}", random_condition(rng, fluents)));
        }
        prop.push('.');
        lines.push(prop);
    }
    lines.join("\n")
}

fn random_condition(rng: &mut ChaCha8Rng, fluents: &[&str]) -> String {
    let count = rng.gen_range(1..=2.min(fluents.len()));
    let mut picked = BTreeSet::new();
    while picked.len() < count {
        picked.insert(fluents[rng.gen_range(0..fluents.len())]);
    }
    picked
        .into_iter()
        .map(|f| if rng.gen_bool(0.5) { f.to_string() } else { format!("-{f}") })
        .collect::<Vec<_>>()
        .join(", ")
}

/// Random query text over the domain's own vocabulary: a literal goal
/// after a straight-line, conditional, or (when allowed) while plan.
pub fn random_query_text(rng: &mut ChaCha8Rng, d: &Domain, allow_loops: bool) -> String {
    let fluents: Vec<String> = d.fluents().map(|f| d.fluent_name(f).to_string()).collect();
    let actions: Vec<String> = d.actions().map(|a| d.action_name(a).to_string()).collect();

    fn pick(rng: &mut ChaCha8Rng, pool: &[String]) -> String {
        pool[rng.gen_range(0..pool.len())].clone()
    }
    fn literal(rng: &mut ChaCha8Rng, fluents: &[String]) -> String {
        let f = pick(rng, fluents);
        if rng.gen_bool(0.5) {
            f
        } else {
            format!("-{f}")
        }
    }

    let plan = match rng.gen_range(0..if allow_loops { 5 } else { 4 }) {
        0 => String::from("[]"),
        1 => {
            let steps: Vec<String> =
                (0..rng.gen_range(1..=3)).map(|_| pick(rng, &actions)).collect();
            format!("[{}]", steps.join(", "))
        }
        2 => format!(
            "[{}, if {} then [{}]]",
            pick(rng, &actions),
            literal(rng, &fluents),
            pick(rng, &actions)
        ),
        3 => format!(
            "[if {} then [{}] else [{}]]",
            literal(rng, &fluents),
            pick(rng, &actions),
            pick(rng, &actions)
        ),
        _ => format!(
            "[while {} do [{}], {}]",
            literal(rng, &fluents),
            pick(rng, &actions),
            pick(rng, &actions)
        ),
    };
    format!("{} after {}.", literal(rng, &fluents), plan)
}

/// Every action sequence of length at most `max_len`, rendered as plan
/// text for the query parser.
pub fn all_sequences(actions: &[String], max_len: usize) -> Vec<String> {
    let mut out = vec![String::from("[]")];
    let mut layer: Vec<Vec<&String>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &layer {
            for a in actions {
                let mut grown = seq.clone();
                grown.push(a);
                out.push(format!(
                    "[{}]",
                    grown.iter().map(|s| s.as_str()).collect::<Vec<_>>().join(", ")
                ));
                next.push(grown);
            }
        }
        layer = next;
    }
    out
}
