//! Plan evaluation over all models of a domain.
//!
//! A model fixes, for every action and situation, one of the transition
//! choices the semantics allows (which outcome a non-deterministic effect
//! takes, which sensing result obtains). Evaluating a plan therefore
//! branches at every choice point; a per-branch [`ChoiceLog`] pins each
//! `(action, situation)` pair to a single successor so that one branch
//! stays inside one model — re-applying an action to a situation it has
//! already seen reuses the recorded result.
//!
//! The empty situation is absorbing: once a branch reaches ∅ (an `if` or
//! `while` test came out Unknown, or a loop was proven non-terminating),
//! the rest of its plan is skipped and the branch reports ∅.
//!
//! While loops are unrolled iteratively. Within a single loop execution,
//! revisiting a loop-head situation whose test is still true proves the
//! branch cycles forever, so its value is the least-fixpoint result ∅ and
//! the branch is flagged `diverged`. A configurable iteration budget
//! guards against growth beyond that exact check and aborts with a
//! distinct, inconclusive error.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::domain::{ActionId, Domain, Plan, Query, TestCondition};
use crate::semantics::{
    initial_situation, successors, truth_in_situation, SemanticsError, Situation, ThreeValued,
};

/// Per-branch record of transition choices: one model's transition function,
/// restricted to the pairs the branch actually visited.
pub type ChoiceLog = BTreeMap<(ActionId, Situation), Situation>;

/// How ∅ outcomes weigh into the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VerdictMode {
    /// ∅ outcomes yield the verdict `Failed`; Yes/No require every branch
    /// to end in a real situation.
    #[default]
    Default,
    /// The literal truth definition: everything is vacuously true (and
    /// false) in ∅, so ∅ branches never block Yes/No. When every branch is
    /// ∅, Yes takes precedence.
    StrictVacuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No,
    Unknown,
    Failed,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::Yes => "yes",
            Verdict::No => "no",
            Verdict::Unknown => "unknown",
            Verdict::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: VerdictMode,
    /// Maximum iterations a single while loop may run in one branch.
    pub loop_budget: usize,
    /// Refuse domains whose fluent count would make situation sets blow up.
    pub max_fluents: usize,
}

impl Default for EngineConfig {
    fn default() -> EngineConfig {
        EngineConfig { mode: VerdictMode::Default, loop_budget: 10_000, max_fluents: 24 }
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum EngineError {
    /// The value propositions admit no initial state at all.
    #[error("domain is inconsistent: no state satisfies the initial value propositions")]
    DomainInconsistent,
    /// A while loop exceeded the iteration budget without the exact cycle
    /// check firing; the query is inconclusive at this budget.
    #[error("while loop exceeded the budget of {budget} iterations; result inconclusive")]
    LoopBudgetExceeded { budget: usize },
    /// The domain has more fluents than the configured engine limit.
    #[error("domain has {count} fluents, above the configured limit of {limit}")]
    FluentLimitExceeded { count: usize, limit: usize },
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

/// One step of a branch's trace.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TraceStep {
    /// An action was applied, leading to the recorded situation.
    Action { action: ActionId, to: Situation },
    /// A conditional or loop test was evaluated in the current situation.
    Test { condition: TestCondition, value: ThreeValued },
    /// A loop-head situation repeated with its test still true: the branch
    /// provably never terminates.
    CycleDetected,
}

/// The endpoint of one branch: a model's-eye view of the whole plan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    /// Final situation; empty means ∅.
    pub result: Situation,
    pub trace: Vec<TraceStep>,
    /// True when ∅ was reached by the non-termination proof specifically.
    pub diverged: bool,
}

impl Outcome {
    /// Number of actions this branch actually executed.
    pub fn actions_executed(&self) -> usize {
        self.trace.iter().filter(|s| matches!(s, TraceStep::Action { .. })).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Answer {
    pub verdict: Verdict,
    pub outcomes: Vec<Outcome>,
}

#[derive(Debug, Clone)]
struct Branch {
    situation: Situation,
    log: ChoiceLog,
    trace: Vec<TraceStep>,
    diverged: bool,
}

impl Branch {
    fn root(situation: Situation) -> Branch {
        Branch { situation, log: ChoiceLog::new(), trace: Vec::new(), diverged: false }
    }

    fn is_absorbed(&self) -> bool {
        self.situation.is_empty()
    }
}

/// Evaluate a query in every model of the domain and combine the branch
/// outcomes into a verdict.
pub fn entails(domain: &Domain, query: &Query, config: &EngineConfig) -> Result<Answer, EngineError> {
    if domain.fluent_count() > config.max_fluents {
        return Err(EngineError::FluentLimitExceeded {
            count: domain.fluent_count(),
            limit: config.max_fluents,
        });
    }
    let start = initial_situation(domain);
    if start.is_empty() {
        return Err(EngineError::DomainInconsistent);
    }
    let mut branches = Vec::new();
    eval_plan(domain, &query.plan, Branch::root(start), config, &mut branches)?;

    let mut outcomes = Vec::new();
    let mut values = Vec::new();
    for branch in branches {
        let value = if branch.is_absorbed() {
            None
        } else {
            Some(truth_in_situation(&branch.situation, &query.goal)?)
        };
        values.push(value);
        outcomes.push(Outcome {
            result: branch.situation,
            trace: branch.trace,
            diverged: branch.diverged,
        });
    }
    let verdict = combine(config.mode, &values);
    Ok(Answer { verdict, outcomes })
}

fn combine(mode: VerdictMode, values: &[Option<ThreeValued>]) -> Verdict {
    match mode {
        VerdictMode::Default => {
            if values.iter().any(Option::is_none) {
                Verdict::Failed
            } else if values.iter().all(|v| *v == Some(ThreeValued::True)) {
                Verdict::Yes
            } else if values.iter().all(|v| *v == Some(ThreeValued::False)) {
                Verdict::No
            } else {
                Verdict::Unknown
            }
        }
        VerdictMode::StrictVacuous => {
            if values.iter().all(|v| v.is_none() || *v == Some(ThreeValued::True)) {
                Verdict::Yes
            } else if values.iter().all(|v| v.is_none() || *v == Some(ThreeValued::False)) {
                Verdict::No
            } else {
                Verdict::Unknown
            }
        }
    }
}

/// Evaluate one plan step from one situation, branching over the model
/// choices the choice log does not pin down yet.
pub fn eval_step(
    domain: &Domain,
    action: ActionId,
    situation: &Situation,
    log: &ChoiceLog,
) -> Result<Vec<(Situation, ChoiceLog)>, EngineError> {
    let key = (action, situation.clone());
    if let Some(chosen) = log.get(&key) {
        return Ok(vec![(chosen.clone(), log.clone())]);
    }
    let mut results = Vec::new();
    for successor in successors(domain, action, situation)? {
        let mut extended = log.clone();
        extended.insert(key.clone(), successor.clone());
        results.push((successor, extended));
    }
    Ok(results)
}

fn eval_plan(
    domain: &Domain,
    plan: &Plan,
    branch: Branch,
    config: &EngineConfig,
    out: &mut Vec<Branch>,
) -> Result<(), EngineError> {
    if branch.is_absorbed() {
        out.push(branch);
        return Ok(());
    }
    match plan {
        Plan::Empty => {
            out.push(branch);
            Ok(())
        }
        Plan::Action(action, rest) => {
            for (next, log) in eval_step(domain, *action, &branch.situation, &branch.log)? {
                let mut b = branch.clone();
                b.trace.push(TraceStep::Action { action: *action, to: next.clone() });
                b.situation = next;
                b.log = log;
                eval_plan(domain, rest, b, config, out)?;
            }
            Ok(())
        }
        Plan::IfThen(test, then, rest) => {
            let value = truth_in_situation(&branch.situation, test)?;
            let mut b = branch;
            b.trace.push(TraceStep::Test { condition: test.clone(), value });
            match value {
                ThreeValued::True => eval_plan(domain, &then.concat(rest), b, config, out),
                ThreeValued::False => eval_plan(domain, rest, b, config, out),
                ThreeValued::Unknown => {
                    b.situation = Situation::new();
                    out.push(b);
                    Ok(())
                }
            }
        }
        Plan::IfThenElse(test, then, otherwise, rest) => {
            let value = truth_in_situation(&branch.situation, test)?;
            let mut b = branch;
            b.trace.push(TraceStep::Test { condition: test.clone(), value });
            match value {
                ThreeValued::True => eval_plan(domain, &then.concat(rest), b, config, out),
                ThreeValued::False => eval_plan(domain, &otherwise.concat(rest), b, config, out),
                ThreeValued::Unknown => {
                    b.situation = Situation::new();
                    out.push(b);
                    Ok(())
                }
            }
        }
        Plan::While(test, body, rest) => {
            let exits = eval_while(domain, test, body, branch, config, out)?;
            for exit in exits {
                eval_plan(domain, rest, exit, config, out)?;
            }
            Ok(())
        }
    }
}

/// Unroll a while loop from one entry branch. Returns the branches that
/// exited normally (test became false); ∅ branches — Unknown tests and
/// proven cycles — are pushed straight to `out`.
fn eval_while(
    domain: &Domain,
    test: &TestCondition,
    body: &Plan,
    entry: Branch,
    config: &EngineConfig,
    out: &mut Vec<Branch>,
) -> Result<Vec<Branch>, EngineError> {
    type LoopPoint = (Situation, ChoiceLog, BTreeSet<Situation>);
    let mut exits = Vec::new();
    let mut seen_states: BTreeSet<LoopPoint> = BTreeSet::new();
    let mut queue: VecDeque<(Branch, BTreeSet<Situation>, usize)> = VecDeque::new();
    queue.push_back((entry, BTreeSet::new(), 0));

    while let Some((branch, visited, iterations)) = queue.pop_front() {
        if branch.is_absorbed() {
            out.push(branch);
            continue;
        }
        let value = truth_in_situation(&branch.situation, test)?;
        let mut b = branch;
        b.trace.push(TraceStep::Test { condition: test.clone(), value });
        match value {
            ThreeValued::False => exits.push(b),
            ThreeValued::Unknown => {
                b.situation = Situation::new();
                out.push(b);
            }
            ThreeValued::True => {
                if visited.contains(&b.situation) {
                    b.trace.push(TraceStep::CycleDetected);
                    b.situation = Situation::new();
                    b.diverged = true;
                    out.push(b);
                    continue;
                }
                if iterations + 1 > config.loop_budget {
                    return Err(EngineError::LoopBudgetExceeded { budget: config.loop_budget });
                }
                let mut visited = visited;
                visited.insert(b.situation.clone());
                let mut after_body = Vec::new();
                eval_plan(domain, body, b, config, &mut after_body)?;
                for next in after_body {
                    // Merge branches that reached the same situation with the
                    // same model commitments and loop history; their futures
                    // are identical. The history must be part of the key: a
                    // body that replays only logged choices re-reaches the
                    // same (situation, log) pair, and dropping it then would
                    // lose the revisit that proves divergence.
                    let point =
                        (next.situation.clone(), next.log.clone(), visited.clone());
                    if seen_states.insert(point) {
                        queue.push_back((next, visited.clone(), iterations + 1));
                    }
                }
            }
        }
    }
    Ok(exits)
}

/// Search all action sequences of length ≤ `max_len` for one whose query
/// verdict is Yes. Returns that sequence, or `None` when none exists —
/// the "no plan of this length" direction of entailment questions.
pub fn exhaustive_no_sequence(
    domain: &Domain,
    goal: &TestCondition,
    max_len: usize,
    config: &EngineConfig,
) -> Result<Option<Vec<ActionId>>, EngineError> {
    let actions: Vec<ActionId> = domain.actions().collect();
    let mut frontier: Vec<Vec<ActionId>> = vec![Vec::new()];
    for _ in 0..=max_len {
        for sequence in &frontier {
            let plan = sequence
                .iter()
                .rev()
                .fold(Plan::Empty, |rest, &a| Plan::Action(a, Box::new(rest)));
            let query = Query { goal: goal.clone(), plan };
            if entails(domain, &query, config)?.verdict == Verdict::Yes {
                return Ok(Some(sequence.clone()));
            }
        }
        let mut next = Vec::new();
        for sequence in &frontier {
            for &a in &actions {
                let mut extended = sequence.clone();
                extended.push(a);
                next.push(extended);
            }
        }
        frontier = next;
    }
    Ok(None)
}
