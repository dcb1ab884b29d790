//! Domain vocabulary: fluents, actions, the four proposition forms, plans and
//! queries. A domain is the single source of truth for symbol interning; all
//! other modules refer to fluents and actions through the ids handed out here.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::parser::SourceSpan;

/// Hard representation limit: states are stored as fixed-width bit masks.
pub const MAX_FLUENT_UNIVERSE: usize = 32;

/// Interned fluent symbol, unique per domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FluentId(pub(crate) u32);

impl FluentId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Interned action symbol, unique per domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ActionId(pub(crate) u32);

impl ActionId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Whether an action senses fluent values or changes the world.
///
/// The two kinds are disjoint: an action that occurs in a knowledge law is
/// sensing and must not occur in effect or non-deterministic propositions
/// (checked by [`Domain::validate`]).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActionKind {
    Sensing,
    NonSensing,
}

/// A fluent or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FluentLiteral {
    pub fluent: FluentId,
    pub positive: bool,
}

impl FluentLiteral {
    pub fn pos(fluent: FluentId) -> Self {
        FluentLiteral { fluent, positive: true }
    }

    pub fn neg(fluent: FluentId) -> Self {
        FluentLiteral { fluent, positive: false }
    }

    /// Complement literal; an involution.
    pub fn negated(self) -> Self {
        FluentLiteral { fluent: self.fluent, positive: !self.positive }
    }
}

/// Conjunction of fluent literals, used as plan test and proposition
/// precondition. The empty conjunction is trivially true; the parser never
/// produces it for plan tests (`if`/`while` require at least one literal),
/// but knowledge laws without preconditions denote it.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct TestCondition {
    conjuncts: Vec<FluentLiteral>,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TestConditionError {
    #[error("test condition must contain at least one literal")]
    Empty,
    #[error("test condition mentions a fluent both positively and negatively")]
    Contradictory(FluentId),
}

impl TestCondition {
    /// Non-empty, non-contradictory conjunction (the plan-test constructor).
    pub fn new(conjuncts: Vec<FluentLiteral>) -> Result<Self, TestConditionError> {
        if conjuncts.is_empty() {
            return Err(TestConditionError::Empty);
        }
        let cond = TestCondition { conjuncts };
        match cond.contradiction() {
            Some(f) => Err(TestConditionError::Contradictory(f)),
            None => Ok(cond),
        }
    }

    /// The empty conjunction, satisfied by every state.
    pub fn trivial() -> Self {
        TestCondition { conjuncts: Vec::new() }
    }

    /// Conjunction used as a proposition precondition; may be empty but must
    /// not be contradictory.
    pub fn from_preconditions(conjuncts: Vec<FluentLiteral>) -> Result<Self, TestConditionError> {
        let cond = TestCondition { conjuncts };
        match cond.contradiction() {
            Some(f) => Err(TestConditionError::Contradictory(f)),
            None => Ok(cond),
        }
    }

    fn contradiction(&self) -> Option<FluentId> {
        for (i, a) in self.conjuncts.iter().enumerate() {
            for b in &self.conjuncts[i + 1..] {
                if a.fluent == b.fluent && a.positive != b.positive {
                    return Some(a.fluent);
                }
            }
        }
        None
    }

    pub fn conjuncts(&self) -> &[FluentLiteral] {
        &self.conjuncts
    }

    pub fn is_trivial(&self) -> bool {
        self.conjuncts.is_empty()
    }
}

/// The four proposition forms a domain description is made of.
///
/// Equality ignores the source span: two propositions are equal when they
/// state the same thing, wherever they were written.
#[derive(Debug, Clone)]
pub enum Proposition {
    /// `a causes l if p1, ..., pn` — deterministic effect.
    Effect {
        action: ActionId,
        effect: FluentLiteral,
        preconditions: Vec<FluentLiteral>,
        span: SourceSpan,
    },
    /// `initially l` — constrains the initial situation.
    Value { literal: FluentLiteral, span: SourceSpan },
    /// `a causes to know f if p1, ..., pn` — sensing law; `f` is always a
    /// plain fluent, never a negated literal.
    Knowledge {
        action: ActionId,
        sensed: FluentId,
        preconditions: Vec<FluentLiteral>,
        span: SourceSpan,
    },
    /// `a may affect f if p1, ..., pn` — non-deterministic effect.
    NonDet {
        action: ActionId,
        fluent: FluentId,
        preconditions: Vec<FluentLiteral>,
        span: SourceSpan,
    },
}

impl Proposition {
    pub fn span(&self) -> &SourceSpan {
        match self {
            Proposition::Effect { span, .. }
            | Proposition::Value { span, .. }
            | Proposition::Knowledge { span, .. }
            | Proposition::NonDet { span, .. } => span,
        }
    }

    fn key(&self) -> (u8, Option<ActionId>, Option<FluentLiteral>, Option<FluentId>, &[FluentLiteral]) {
        match self {
            Proposition::Effect { action, effect, preconditions, .. } => {
                (0, Some(*action), Some(*effect), None, preconditions)
            }
            Proposition::Value { literal, .. } => (1, None, Some(*literal), None, &[]),
            Proposition::Knowledge { action, sensed, preconditions, .. } => {
                (2, Some(*action), None, Some(*sensed), preconditions)
            }
            Proposition::NonDet { action, fluent, preconditions, .. } => {
                (3, Some(*action), None, Some(*fluent), preconditions)
            }
        }
    }
}

impl PartialEq for Proposition {
    fn eq(&self, other: &Self) -> bool {
        self.key() == other.key()
    }
}

impl Eq for Proposition {}

/// A plan: a sequence of actions, conditionals and loops. Each constructor
/// carries the rest of the sequence so a plan is a cons-list of items.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Plan {
    Empty,
    Action(ActionId, Box<Plan>),
    IfThen(TestCondition, Box<Plan>, Box<Plan>),
    IfThenElse(TestCondition, Box<Plan>, Box<Plan>, Box<Plan>),
    While(TestCondition, Box<Plan>, Box<Plan>),
}

impl Plan {
    pub fn from_items(items: Vec<PlanItem>) -> Plan {
        let mut plan = Plan::Empty;
        for item in items.into_iter().rev() {
            plan = match item {
                PlanItem::Action(a) => Plan::Action(a, Box::new(plan)),
                PlanItem::IfThen(t, body) => Plan::IfThen(t, Box::new(body), Box::new(plan)),
                PlanItem::IfThenElse(t, th, el) => {
                    Plan::IfThenElse(t, Box::new(th), Box::new(el), Box::new(plan))
                }
                PlanItem::While(t, body) => Plan::While(t, Box::new(body), Box::new(plan)),
            };
        }
        plan
    }

    /// `self` followed by `tail`.
    pub fn concat(&self, tail: &Plan) -> Plan {
        match self {
            Plan::Empty => tail.clone(),
            Plan::Action(a, rest) => Plan::Action(*a, Box::new(rest.concat(tail))),
            Plan::IfThen(t, th, rest) => {
                Plan::IfThen(t.clone(), th.clone(), Box::new(rest.concat(tail)))
            }
            Plan::IfThenElse(t, th, el, rest) => {
                Plan::IfThenElse(t.clone(), th.clone(), el.clone(), Box::new(rest.concat(tail)))
            }
            Plan::While(t, body, rest) => {
                Plan::While(t.clone(), body.clone(), Box::new(rest.concat(tail)))
            }
        }
    }

    /// Maximum number of actions any execution path can take, or `None` for
    /// plans containing a loop.
    pub fn max_action_count(&self) -> Option<usize> {
        match self {
            Plan::Empty => Some(0),
            Plan::Action(_, rest) => rest.max_action_count().map(|n| n + 1),
            Plan::IfThen(_, th, rest) => {
                let rest = rest.max_action_count()?;
                Some(th.max_action_count()? + rest)
            }
            Plan::IfThenElse(_, th, el, rest) => {
                let rest = rest.max_action_count()?;
                let branch = th.max_action_count()?.max(el.max_action_count()?);
                Some(branch + rest)
            }
            Plan::While(..) => None,
        }
    }

    pub fn contains_loop(&self) -> bool {
        match self {
            Plan::Empty => false,
            Plan::Action(_, rest) => rest.contains_loop(),
            Plan::IfThen(_, th, rest) => th.contains_loop() || rest.contains_loop(),
            Plan::IfThenElse(_, th, el, rest) => {
                th.contains_loop() || el.contains_loop() || rest.contains_loop()
            }
            Plan::While(..) => true,
        }
    }
}

/// One step of a plan as written in the source syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PlanItem {
    Action(ActionId),
    IfThen(TestCondition, Plan),
    IfThenElse(TestCondition, Plan, Plan),
    While(TestCondition, Plan),
}

/// A query `goal after plan`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    pub goal: TestCondition,
    pub plan: Plan,
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum DomainError {
    #[error("unknown fluent `{0}`")]
    UnknownFluent(String),
    #[error("unknown action `{0}`")]
    UnknownAction(String),
    #[error("`{0}` is not a sensing action")]
    NotSensing(String),
    #[error("domain has {0} fluents; at most {MAX_FLUENT_UNIVERSE} are representable")]
    TooManyFluents(usize),
    #[error("{0}")]
    BadCondition(#[from] TestConditionError),
}

/// One problem found by [`Domain::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub message: String,
    pub span: Option<SourceSpan>,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.span {
            Some(span) => write!(f, "{span}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

/// Outcome of domain validation. `simple` is false when some sensing action
/// has more than one knowledge law for the same fluent; that is legal but
/// selects the general (multi-condition) treatment of sensing.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub errors: Vec<ValidationIssue>,
    pub warnings: Vec<ValidationIssue>,
    pub simple: bool,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

/// A domain description: interned symbols plus the proposition list.
///
/// Symbols are declared implicitly by use; explicit `fluents`/`actions`
/// declaration statements are also accepted and, when present, make the use
/// of undeclared symbols a validation error. Duplicate propositions are
/// folded at construction (validation reports how many).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    fluent_names: Vec<String>,
    action_names: Vec<String>,
    action_kinds: Vec<ActionKind>,
    propositions: Vec<Proposition>,
    fluent_index: BTreeMap<String, FluentId>,
    action_index: BTreeMap<String, ActionId>,
    /// Fluents/actions named in explicit declaration statements; `None` when
    /// the domain used implicit declaration only.
    declared_fluents: Option<BTreeSet<FluentId>>,
    declared_actions: Option<BTreeSet<ActionId>>,
    deduplicated: usize,
}

impl Domain {
    pub fn fluent_count(&self) -> usize {
        self.fluent_names.len()
    }

    pub fn action_count(&self) -> usize {
        self.action_names.len()
    }

    pub fn fluents(&self) -> impl Iterator<Item = FluentId> + '_ {
        (0..self.fluent_names.len() as u32).map(FluentId)
    }

    pub fn actions(&self) -> impl Iterator<Item = ActionId> + '_ {
        (0..self.action_names.len() as u32).map(ActionId)
    }

    pub fn fluent_name(&self, f: FluentId) -> &str {
        &self.fluent_names[f.index()]
    }

    pub fn action_name(&self, a: ActionId) -> &str {
        &self.action_names[a.index()]
    }

    pub fn action_kind(&self, a: ActionId) -> ActionKind {
        self.action_kinds[a.index()]
    }

    pub fn fluent(&self, name: &str) -> Result<FluentId, DomainError> {
        self.fluent_index
            .get(name)
            .copied()
            .ok_or_else(|| DomainError::UnknownFluent(name.to_string()))
    }

    pub fn action(&self, name: &str) -> Result<ActionId, DomainError> {
        self.action_index
            .get(name)
            .copied()
            .ok_or_else(|| DomainError::UnknownAction(name.to_string()))
    }

    pub fn propositions(&self) -> &[Proposition] {
        &self.propositions
    }

    /// Fluents listed in an explicit `fluents` declaration, if one was given.
    pub fn declared_fluents(&self) -> Option<&BTreeSet<FluentId>> {
        self.declared_fluents.as_ref()
    }

    /// Actions listed in an explicit `actions` declaration, if one was given.
    pub fn declared_actions(&self) -> Option<&BTreeSet<ActionId>> {
        self.declared_actions.as_ref()
    }

    pub fn literal_name(&self, lit: FluentLiteral) -> String {
        if lit.positive {
            self.fluent_name(lit.fluent).to_string()
        } else {
            format!("-{}", self.fluent_name(lit.fluent))
        }
    }

    /// Fluents a sensing action may come to know, in source order of its
    /// knowledge laws, deduplicated.
    pub fn potential_sensing_effects(&self, a: ActionId) -> Result<Vec<FluentId>, DomainError> {
        if self.action_kind(a) != ActionKind::Sensing {
            return Err(DomainError::NotSensing(self.action_name(a).to_string()));
        }
        let mut out = Vec::new();
        for p in &self.propositions {
            if let Proposition::Knowledge { action, sensed, .. } = p {
                if *action == a && !out.contains(sensed) {
                    out.push(*sensed);
                }
            }
        }
        Ok(out)
    }

    /// The knowledge precondition for sensing `f` with `a`: the disjunction
    /// of the conditions of every knowledge law of `a` sensing `f`, in
    /// source order. A law with no condition contributes the trivially true
    /// conjunction. Empty when `a` has no law for `f`.
    pub fn knowledge_precondition(
        &self,
        a: ActionId,
        f: FluentId,
    ) -> Result<Vec<TestCondition>, DomainError> {
        if self.action_kind(a) != ActionKind::Sensing {
            return Err(DomainError::NotSensing(self.action_name(a).to_string()));
        }
        let mut out = Vec::new();
        for p in &self.propositions {
            if let Proposition::Knowledge { action, sensed, preconditions, .. } = p {
                if *action == a && *sensed == f {
                    out.push(TestCondition { conjuncts: preconditions.clone() });
                }
            }
        }
        Ok(out)
    }

    /// Check the whole description. Errors make the domain unusable for
    /// evaluation; warnings (duplicates, non-simple sensing) do not.
    pub fn validate(&self) -> ValidationReport {
        let mut errors = Vec::new();
        let mut warnings = Vec::new();

        // Sensing actions must not occur in effect or non-deterministic
        // propositions. Kinds are inferred from knowledge laws, so a clash
        // shows up as a sensing action used in a world-changing proposition.
        for p in &self.propositions {
            let (action, what) = match p {
                Proposition::Effect { action, .. } => (Some(action), "an effect proposition"),
                Proposition::NonDet { action, .. } => {
                    (Some(action), "a non-deterministic proposition")
                }
                _ => (None, ""),
            };
            if let Some(a) = action {
                if self.action_kind(*a) == ActionKind::Sensing {
                    errors.push(ValidationIssue {
                        message: format!(
                            "sensing action `{}` also occurs in {what}",
                            self.action_name(*a)
                        ),
                        span: Some(p.span().clone()),
                    });
                }
            }
        }

        // Contradictory preconditions within one proposition.
        for p in &self.propositions {
            let pre = match p {
                Proposition::Effect { preconditions, .. }
                | Proposition::Knowledge { preconditions, .. }
                | Proposition::NonDet { preconditions, .. } => preconditions,
                Proposition::Value { .. } => continue,
            };
            for (i, a) in pre.iter().enumerate() {
                if pre[i + 1..].iter().any(|b| a.fluent == b.fluent && a.positive != b.positive) {
                    errors.push(ValidationIssue {
                        message: format!(
                            "precondition mentions `{}` both positively and negatively",
                            self.fluent_name(a.fluent)
                        ),
                        span: Some(p.span().clone()),
                    });
                    break;
                }
            }
        }

        // With explicit declarations, used-but-undeclared symbols are errors.
        if let Some(declared) = &self.declared_fluents {
            for f in self.fluents() {
                if !declared.contains(&f) {
                    errors.push(ValidationIssue {
                        message: format!("fluent `{}` used but not declared", self.fluent_name(f)),
                        span: None,
                    });
                }
            }
        }
        if let Some(declared) = &self.declared_actions {
            for a in self.actions() {
                if !declared.contains(&a) {
                    errors.push(ValidationIssue {
                        message: format!("action `{}` used but not declared", self.action_name(a)),
                        span: None,
                    });
                }
            }
        }

        if self.deduplicated > 0 {
            warnings.push(ValidationIssue {
                message: format!("{} duplicate proposition(s) ignored", self.deduplicated),
                span: None,
            });
        }

        // Simple check: at most one knowledge law per (action, fluent) pair.
        let mut simple = true;
        let mut seen: BTreeMap<(ActionId, FluentId), usize> = BTreeMap::new();
        for p in &self.propositions {
            if let Proposition::Knowledge { action, sensed, .. } = p {
                *seen.entry((*action, *sensed)).or_insert(0) += 1;
            }
        }
        for ((a, f), n) in seen {
            if n > 1 {
                simple = false;
                warnings.push(ValidationIssue {
                    message: format!(
                        "`{}` has {n} knowledge laws for `{}`; using the general sensing treatment",
                        self.action_name(a),
                        self.fluent_name(f)
                    ),
                    span: None,
                });
            }
        }

        ValidationReport { errors, warnings, simple }
    }
}

/// Statement-level accumulator used by the parser and by tests that build
/// domains programmatically.
#[derive(Debug, Default)]
pub struct DomainBuilder {
    fluent_names: Vec<String>,
    action_names: Vec<String>,
    /// Action is sensing iff it occurs in at least one knowledge law; this
    /// records explicit kind requests from programmatic construction.
    forced_sensing: Vec<bool>,
    statements: Vec<Statement>,
    declared_fluents: Option<BTreeSet<FluentId>>,
    declared_actions: Option<BTreeSet<ActionId>>,
}

#[derive(Debug)]
enum Statement {
    Effect(ActionId, FluentLiteral, Vec<FluentLiteral>, SourceSpan),
    Value(FluentLiteral, SourceSpan),
    Knowledge(ActionId, FluentId, Vec<FluentLiteral>, SourceSpan),
    NonDet(ActionId, FluentId, Vec<FluentLiteral>, SourceSpan),
}

impl DomainBuilder {
    pub fn new() -> Self {
        DomainBuilder::default()
    }

    pub fn fluent(&mut self, name: &str) -> FluentId {
        if let Some(i) = self.fluent_names.iter().position(|n| n == name) {
            return FluentId(i as u32);
        }
        self.fluent_names.push(name.to_string());
        FluentId(self.fluent_names.len() as u32 - 1)
    }

    pub fn action(&mut self, name: &str) -> ActionId {
        if let Some(i) = self.action_names.iter().position(|n| n == name) {
            return ActionId(i as u32);
        }
        self.action_names.push(name.to_string());
        self.forced_sensing.push(false);
        ActionId(self.action_names.len() as u32 - 1)
    }

    /// Declare an action as sensing even if it has no knowledge law (useful
    /// only for programmatic construction; parsing infers kinds from laws).
    pub fn sensing_action(&mut self, name: &str) -> ActionId {
        let a = self.action(name);
        self.forced_sensing[a.index()] = true;
        a
    }

    pub fn declare_fluent(&mut self, name: &str) -> FluentId {
        let f = self.fluent(name);
        self.declared_fluents.get_or_insert_with(BTreeSet::new).insert(f);
        f
    }

    pub fn declare_action(&mut self, name: &str) -> ActionId {
        let a = self.action(name);
        self.declared_actions.get_or_insert_with(BTreeSet::new).insert(a);
        a
    }

    pub fn value(&mut self, literal: FluentLiteral) -> &mut Self {
        self.value_at(literal, SourceSpan::synthetic())
    }

    pub fn value_at(&mut self, literal: FluentLiteral, span: SourceSpan) -> &mut Self {
        self.statements.push(Statement::Value(literal, span));
        self
    }

    pub fn effect(
        &mut self,
        action: ActionId,
        effect: FluentLiteral,
        pre: Vec<FluentLiteral>,
    ) -> &mut Self {
        self.effect_at(action, effect, pre, SourceSpan::synthetic())
    }

    pub fn effect_at(
        &mut self,
        action: ActionId,
        effect: FluentLiteral,
        pre: Vec<FluentLiteral>,
        span: SourceSpan,
    ) -> &mut Self {
        self.statements.push(Statement::Effect(action, effect, pre, span));
        self
    }

    pub fn knowledge(
        &mut self,
        action: ActionId,
        sensed: FluentId,
        pre: Vec<FluentLiteral>,
    ) -> &mut Self {
        self.knowledge_at(action, sensed, pre, SourceSpan::synthetic())
    }

    pub fn knowledge_at(
        &mut self,
        action: ActionId,
        sensed: FluentId,
        pre: Vec<FluentLiteral>,
        span: SourceSpan,
    ) -> &mut Self {
        self.statements.push(Statement::Knowledge(action, sensed, pre, span));
        self
    }

    pub fn non_det(
        &mut self,
        action: ActionId,
        fluent: FluentId,
        pre: Vec<FluentLiteral>,
    ) -> &mut Self {
        self.non_det_at(action, fluent, pre, SourceSpan::synthetic())
    }

    pub fn non_det_at(
        &mut self,
        action: ActionId,
        fluent: FluentId,
        pre: Vec<FluentLiteral>,
        span: SourceSpan,
    ) -> &mut Self {
        self.statements.push(Statement::NonDet(action, fluent, pre, span));
        self
    }

    pub fn build(self) -> Result<Domain, DomainError> {
        if self.fluent_names.len() > MAX_FLUENT_UNIVERSE {
            return Err(DomainError::TooManyFluents(self.fluent_names.len()));
        }

        let mut kinds = vec![ActionKind::NonSensing; self.action_names.len()];
        for (i, forced) in self.forced_sensing.iter().enumerate() {
            if *forced {
                kinds[i] = ActionKind::Sensing;
            }
        }
        for s in &self.statements {
            if let Statement::Knowledge(a, ..) = s {
                kinds[a.index()] = ActionKind::Sensing;
            }
        }

        let mut propositions: Vec<Proposition> = Vec::new();
        let mut deduplicated = 0usize;
        for s in self.statements {
            let p = match s {
                Statement::Effect(action, effect, preconditions, span) => {
                    Proposition::Effect { action, effect, preconditions, span }
                }
                Statement::Value(literal, span) => Proposition::Value { literal, span },
                Statement::Knowledge(action, sensed, preconditions, span) => {
                    Proposition::Knowledge { action, sensed, preconditions, span }
                }
                Statement::NonDet(action, fluent, preconditions, span) => {
                    Proposition::NonDet { action, fluent, preconditions, span }
                }
            };
            if propositions.contains(&p) {
                deduplicated += 1;
            } else {
                propositions.push(p);
            }
        }

        let fluent_index = self
            .fluent_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), FluentId(i as u32)))
            .collect();
        let action_index = self
            .action_names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), ActionId(i as u32)))
            .collect();

        Ok(Domain {
            fluent_names: self.fluent_names,
            action_names: self.action_names,
            action_kinds: kinds,
            propositions,
            fluent_index,
            action_index,
            declared_fluents: self.declared_fluents,
            declared_actions: self.declared_actions,
            deduplicated,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_domain;

    const BULB: &str = "\
initially -burnOut.
initially -bulbFixed.
changeBulb causes burnOut if switchOn.
changeBulb causes bulbFixed if -switchOn.
turnSwitch causes switchOn if -switchOn.
turnSwitch causes -switchOn if switchOn.
";

    #[test]
    fn bulb_domain_is_valid_and_simple() {
        let d = parse_domain(BULB, "bulb.akd").unwrap();
        let report = d.validate();
        assert!(report.is_valid(), "{:?}", report.errors);
        assert!(report.simple);
        assert_eq!(d.fluent_count(), 3);
        assert_eq!(d.action_count(), 2);
    }

    #[test]
    fn sensing_action_in_effect_proposition_is_an_error() {
        let text = "look causes to know doorOpened if facingDoor.\nlook causes facingDoor.\n";
        let d = parse_domain(text, "t.akd").unwrap();
        let report = d.validate();
        assert!(!report.is_valid());
        assert!(report.errors[0].message.contains("sensing action `look`"));
    }

    #[test]
    fn two_laws_for_same_pair_is_not_simple() {
        let text = "\
lookInRoom causes to know boardClean if curtainOpen.
lookInRoom causes to know boardClean if lightOn.
";
        let d = parse_domain(text, "t.akd").unwrap();
        let report = d.validate();
        assert!(report.is_valid());
        assert!(!report.simple);
    }

    #[test]
    fn duplicate_propositions_fold_with_a_warning() {
        let text = "initially f.\ninitially f.\n";
        let d = parse_domain(text, "t.akd").unwrap();
        assert_eq!(d.propositions().len(), 1);
        let report = d.validate();
        assert!(report.is_valid());
        assert!(report.warnings.iter().any(|w| w.message.contains("duplicate")));
    }

    #[test]
    fn contradictory_precondition_is_an_error() {
        let text = "a causes f if g, -g.\n";
        let d = parse_domain(text, "t.akd").unwrap();
        assert!(!d.validate().is_valid());
    }

    #[test]
    fn explicit_declarations_are_checked() {
        let ok = parse_domain("fluents f, g.\ninitially f.\n", "t.akd").unwrap();
        assert!(ok.validate().is_valid());
        assert_eq!(ok.fluent_count(), 2); // declared-but-unused g still counts

        let bad = parse_domain("fluents f.\ninitially g.\n", "t.akd").unwrap();
        let report = bad.validate();
        assert!(!report.is_valid());
        assert!(report.errors[0].message.contains("`g` used but not declared"));
    }

    #[test]
    fn knowledge_precondition_collects_disjuncts_in_source_order() {
        let text = "\
initially curtainOpen.
initially lightOn.
lookInRoom causes to know rainOutside if curtainOpen.
lookInRoom causes to know boardClean if lightOn.
";
        let d = parse_domain(text, "room.akd").unwrap();
        let a = d.action("lookInRoom").unwrap();
        let rain = d.fluent("rainOutside").unwrap();
        let co = d.fluent("curtainOpen").unwrap();
        let phi = d.knowledge_precondition(a, rain).unwrap();
        assert_eq!(phi.len(), 1);
        assert_eq!(phi[0].conjuncts(), &[FluentLiteral::pos(co)]);

        // No law for lightOn: empty disjunction.
        let lo = d.fluent("lightOn").unwrap();
        assert!(d.knowledge_precondition(a, lo).unwrap().is_empty());

        // Non-sensing action: error.
        let b = parse_domain(BULB, "bulb.akd").unwrap();
        let ts = b.action("turnSwitch").unwrap();
        let so = b.fluent("switchOn").unwrap();
        assert!(matches!(b.knowledge_precondition(ts, so), Err(DomainError::NotSensing(_))));
    }

    #[test]
    fn two_laws_give_two_disjuncts() {
        let text = "\
lookInRoom causes to know boardClean if curtainOpen.
lookInRoom causes to know boardClean if lightOn.
";
        let d = parse_domain(text, "t.akd").unwrap();
        let a = d.action("lookInRoom").unwrap();
        let bc = d.fluent("boardClean").unwrap();
        let phi = d.knowledge_precondition(a, bc).unwrap();
        assert_eq!(phi.len(), 2);
    }

    #[test]
    fn potential_sensing_effects_are_ordered_and_deduplicated() {
        let text = "\
lookInRoom causes to know rainOutside if curtainOpen.
lookInRoom causes to know boardClean if lightOn.
lookInRoom causes to know rainOutside if lightOn.
";
        let d = parse_domain(text, "t.akd").unwrap();
        let a = d.action("lookInRoom").unwrap();
        let effects = d.potential_sensing_effects(a).unwrap();
        let names: Vec<_> = effects.iter().map(|f| d.fluent_name(*f)).collect();
        assert_eq!(names, ["rainOutside", "boardClean"]);
    }

    #[test]
    fn sensing_action_without_laws_has_no_effects() {
        let mut b = DomainBuilder::new();
        let a = b.sensing_action("ping");
        let d = b.build().unwrap();
        assert_eq!(d.action_kind(a), ActionKind::Sensing);
        assert!(d.potential_sensing_effects(a).unwrap().is_empty());

        let bulb = parse_domain(BULB, "bulb.akd").unwrap();
        let ts = bulb.action("turnSwitch").unwrap();
        assert!(matches!(bulb.potential_sensing_effects(ts), Err(DomainError::NotSensing(_))));
    }

    #[test]
    fn literal_negation_is_an_involution() {
        let lit = FluentLiteral::pos(FluentId(3));
        assert_eq!(lit.negated().negated(), lit);
        assert_ne!(lit.negated(), lit);
    }

    #[test]
    fn test_condition_rejects_empty_and_contradictory() {
        assert_eq!(TestCondition::new(vec![]), Err(TestConditionError::Empty));
        let f = FluentId(0);
        assert!(matches!(
            TestCondition::new(vec![FluentLiteral::pos(f), FluentLiteral::neg(f)]),
            Err(TestConditionError::Contradictory(_))
        ));
        assert!(TestCondition::trivial().is_trivial());
    }

    #[test]
    fn fluent_universe_is_capped() {
        let mut b = DomainBuilder::new();
        for i in 0..33 {
            b.fluent(&format!("f{i}"));
        }
        assert!(matches!(b.build(), Err(DomainError::TooManyFluents(33))));
    }

    #[test]
    fn plan_concat_and_action_count() {
        let mut b = DomainBuilder::new();
        let a = b.action("a");
        let c = b.action("c");
        let p1 = Plan::Action(a, Box::new(Plan::Empty));
        let p2 = Plan::Action(c, Box::new(Plan::Empty));
        let joined = p1.concat(&p2);
        assert_eq!(joined.max_action_count(), Some(2));
        assert!(!joined.contains_loop());
    }
}
