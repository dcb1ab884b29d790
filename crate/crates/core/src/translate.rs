//! Compilation of domains and queries into epistemic logic programs.
//!
//! A domain compiles to *schematic* rules: every fluent and action position
//! holds a constant, and the one remaining degree of freedom is the
//! situation, written as the variable `S` (the `find_situation` cascade for
//! plans also carries a result variable `S1`). [`ground`] then instantiates
//! the situation variables over a finite universe of `res(action, ·)`
//! chains rooted at `s0`.
//!
//! The program talks about a domain through three predicate families:
//! `holds(l, sit)` (fluent literal `l` is true in `sit`), `ab(l, a, sit)`
//! (action `a` may change `l̄` away from `sit`, disabling inertia), and the
//! plan predicates `find_situation`/`holds_after_plan`. Sensing is encoded
//! by *suppression*: belief sets representing states pruned by a sensing
//! result derive `holds(true, ·)`, which floods the situation with every
//! constant and thereby makes the belief set inert for knowledge queries.
//! [`crosscheck`] runs the plan engine and the translated program side by
//! side and reports whether entailment agrees in both directions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::domain::{
    ActionId, ActionKind, Domain, DomainError, FluentId, FluentLiteral, Plan, Proposition, Query,
    TestCondition,
};
use crate::elp::solve::{world_views_stratified, ElpError, DEFAULT_SEARCH_BUDGET};
use crate::elp::{Atom, BodyLiteral, Program, Rule, Term};
use crate::engine::{self, Answer, EngineConfig, Verdict};
use crate::engine::EngineError;

/// Rule over the schematic situation variable `S` (plus `S1` in the
/// `find_situation` cascade); all other positions are constants.
pub type SchematicRule = Rule;

const SITUATION_VAR: &str = "S";
const RESULT_VAR: &str = "S1";
const TRUE_CONST: &str = "true";

/// Constants with a fixed meaning in emitted programs; user identifiers
/// may not shadow them.
const RESERVED_CONSTANTS: &[&str] =
    &["true", "s0", "pnil", "pseq", "pif", "pifelse", "pwhile", "tcons", "tnil"];

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum TranslateError {
    /// A user identifier matches a constant the translation generates.
    #[error("identifier `{name}` collides with {role}")]
    EncodingCollision { name: String, role: String },
    /// Automatic grounding depth is only defined for loop-free plans.
    #[error("plan contains a loop; pass an explicit grounding depth")]
    DepthRequired,
    /// Some branch of the plan provably never terminates, so no finite
    /// grounding depth covers its executions.
    #[error("plan diverges on some branch; no grounding depth suffices")]
    DivergentPlan,
    /// An explicit grounding depth is smaller than the number of actions
    /// some branch actually executes.
    #[error("grounding depth {given} is smaller than the {required} actions a branch executes")]
    DepthTooShallow { given: usize, required: usize },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Solver(#[from] ElpError),
}

/// Ground situation term: `s0` or nested `res(action, ·)` applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum SituationTerm {
    Initial,
    Res(ActionId, Box<SituationTerm>),
}

impl SituationTerm {
    /// Number of `res` applications wrapped around `s0`.
    pub fn depth(&self) -> usize {
        match self {
            SituationTerm::Initial => 0,
            SituationTerm::Res(_, inner) => 1 + inner.depth(),
        }
    }

    pub fn to_term(&self, d: &Domain) -> Term {
        match self {
            SituationTerm::Initial => Term::constant("s0"),
            SituationTerm::Res(a, inner) => {
                Term::app("res", vec![Term::constant(d.action_name(*a)), inner.to_term(d)])
            }
        }
    }
}

/// Naming scheme between domain symbols and program constants: fluent `f`
/// maps to `f` and `neg_f`, each (sensing action, sensed fluent) pair gets a
/// knowledge-precondition constant `p_<action>_<fluent>` with complement
/// `neg_p_…`, and query translation draws fresh `t_neg_<j>` test constants.
/// Construction fails if any two names coincide.
#[derive(Debug, Clone)]
pub struct EncodingMap {
    literal_names: Vec<(String, String)>,
    knowledge_names: BTreeMap<(ActionId, FluentId), (String, String)>,
    taken: BTreeMap<String, String>,
}

impl EncodingMap {
    pub fn new(d: &Domain) -> Result<EncodingMap, TranslateError> {
        let mut map = EncodingMap {
            literal_names: Vec::new(),
            knowledge_names: BTreeMap::new(),
            taken: BTreeMap::new(),
        };
        for name in RESERVED_CONSTANTS {
            map.taken.insert(name.to_string(), format!("the reserved constant `{name}`"));
        }
        for a in d.actions() {
            let name = d.action_name(a).to_string();
            map.claim(name.clone(), format!("the action `{name}`"))?;
        }
        for f in d.fluents() {
            let pos = d.fluent_name(f).to_string();
            let neg = format!("neg_{pos}");
            map.claim(pos.clone(), format!("the fluent `{pos}`"))?;
            map.claim(neg.clone(), format!("the negation constant for fluent `{pos}`"))?;
            map.literal_names.push((pos, neg));
        }
        for a in d.actions().filter(|&a| d.action_kind(a) == ActionKind::Sensing) {
            for f in d.potential_sensing_effects(a)? {
                let p = format!("p_{}_{}", d.action_name(a), d.fluent_name(f));
                let np = format!("neg_{p}");
                map.claim(p.clone(), format!("the knowledge-precondition constant `{p}`"))?;
                map.claim(np.clone(), format!("the knowledge-precondition constant `{np}`"))?;
                map.knowledge_names.insert((a, f), (p, np));
            }
        }
        Ok(map)
    }

    fn claim(&mut self, name: String, role: String) -> Result<(), TranslateError> {
        if let Some(existing) = self.taken.get(&name) {
            return Err(TranslateError::EncodingCollision { name, role: existing.clone() });
        }
        self.taken.insert(name, role);
        Ok(())
    }

    /// Check that a query-scoped constant does not shadow anything.
    fn check_fresh(&self, name: &str) -> Result<(), TranslateError> {
        if let Some(existing) = self.taken.get(name) {
            return Err(TranslateError::EncodingCollision {
                name: name.to_string(),
                role: existing.clone(),
            });
        }
        Ok(())
    }

    pub fn literal(&self, l: FluentLiteral) -> &str {
        let (pos, neg) = &self.literal_names[l.fluent.index()];
        if l.positive {
            pos
        } else {
            neg
        }
    }

    /// The `p_<action>_<fluent>` constant and its complement.
    pub fn knowledge(&self, a: ActionId, f: FluentId) -> (&str, &str) {
        let (p, np) = &self.knowledge_names[&(a, f)];
        (p, np)
    }

    /// Every constant the suppression flood must reach: all fluent literal
    /// constants plus the knowledge-precondition constants.
    pub fn flooded_constants(&self) -> Vec<&str> {
        let mut out = Vec::new();
        for (pos, neg) in &self.literal_names {
            out.push(pos.as_str());
            out.push(neg.as_str());
        }
        for (p, np) in self.knowledge_names.values() {
            out.push(p.as_str());
            out.push(np.as_str());
        }
        out
    }
}

fn svar() -> Term {
    Term::Var(SITUATION_VAR.to_string())
}

fn rvar() -> Term {
    Term::Var(RESULT_VAR.to_string())
}

fn s_res(d: &Domain, a: ActionId, inner: Term) -> Term {
    Term::app("res", vec![Term::constant(d.action_name(a)), inner])
}

fn holds(constant: &str, sit: Term) -> Atom {
    Atom::new("holds", vec![Term::constant(constant), sit])
}

fn ab(constant: &str, d: &Domain, a: ActionId, sit: Term) -> Atom {
    Atom::new("ab", vec![Term::constant(constant), Term::constant(d.action_name(a)), sit])
}

fn precondition_body(enc: &EncodingMap, pre: &[FluentLiteral]) -> Vec<BodyLiteral> {
    pre.iter().map(|&c| BodyLiteral::pos(holds(enc.literal(c), svar()))).collect()
}

/// Compile a domain into its schematic rule set.
pub fn translate_domain(d: &Domain) -> Result<Program, TranslateError> {
    let enc = EncodingMap::new(d)?;
    let mut rules = Vec::new();

    // Initial-value facts.
    for p in d.propositions() {
        if let Proposition::Value { literal, .. } = p {
            rules.push(Rule::fact(holds(enc.literal(*literal), Term::constant("s0"))));
        }
    }

    // Or-classicalization: each belief set commits to a complete initial state.
    for f in d.fluents() {
        rules.push(Rule::new(
            vec![
                holds(enc.literal(FluentLiteral::pos(f)), Term::constant("s0")),
                holds(enc.literal(FluentLiteral::neg(f)), Term::constant("s0")),
            ],
            Vec::new(),
        ));
    }

    // Effect and non-deterministic propositions, in source order.
    for p in d.propositions() {
        match p {
            Proposition::Effect { action, effect, preconditions, .. } => {
                let lit = enc.literal(*effect);
                let body = precondition_body(&enc, preconditions);
                rules.push(Rule::new(vec![holds(lit, s_res(d, *action, svar()))], body.clone()));
                let mut ab_body = body;
                ab_body.push(BodyLiteral::naf(holds(TRUE_CONST, s_res(d, *action, svar()))));
                rules.push(Rule::new(vec![ab(lit, d, *action, svar())], ab_body));
            }
            Proposition::NonDet { action, fluent, preconditions, .. } => {
                let pos = enc.literal(FluentLiteral::pos(*fluent));
                let neg = enc.literal(FluentLiteral::neg(*fluent));
                let pre = precondition_body(&enc, preconditions);
                // The two holds rules form an even loop through negation:
                // one answer set picks f, the other picks neg_f.
                for (chosen, other) in [(pos, neg), (neg, pos)] {
                    let mut body = vec![BodyLiteral::naf(holds(other, s_res(d, *action, svar())))];
                    body.extend(pre.iter().cloned());
                    rules.push(Rule::new(
                        vec![holds(chosen, s_res(d, *action, svar()))],
                        body.clone(),
                    ));
                    body.push(BodyLiteral::naf(holds(TRUE_CONST, svar())));
                    rules.push(Rule::new(vec![ab(chosen, d, *action, svar())], body));
                }
            }
            Proposition::Value { .. } | Proposition::Knowledge { .. } => {}
        }
    }

    // Knowledge laws, grouped per (sensing action, sensed fluent).
    for a in d.actions().filter(|&a| d.action_kind(a) == ActionKind::Sensing) {
        for f in d.potential_sensing_effects(a)? {
            let (p, np) = enc.knowledge(a, f);
            // Knowledge precondition: one definition rule per law.
            for phi in d.knowledge_precondition(a, f)? {
                rules.push(Rule::new(
                    vec![holds(p, svar())],
                    precondition_body(&enc, phi.conjuncts()),
                ));
            }
            rules.push(Rule::new(
                vec![holds(np, svar())],
                vec![BodyLiteral::naf(holds(p, svar()))],
            ));

            let fpos = enc.literal(FluentLiteral::pos(f));
            let fneg = enc.literal(FluentLiteral::neg(f));
            let head = vec![holds(TRUE_CONST, s_res(d, a, svar()))];
            // No state is suppressed when the sensed fluent is already known.
            let guards = [
                BodyLiteral::not_know(holds(fpos, svar())),
                BodyLiteral::not_know(holds(fneg, svar())),
            ];
            let know_p = BodyLiteral::know(holds(p, s_res(d, a, svar())));
            // Sensing failed (precondition not known afterwards): suppress
            // the states where the precondition held.
            let mut body = guards.to_vec();
            body.push(BodyLiteral::not_know(holds(p, s_res(d, a, svar()))));
            body.push(BodyLiteral::pos(holds(p, svar())));
            rules.push(Rule::new(head.clone(), body));
            // Sensing revealed one value: suppress states with the other
            // value and states outside the precondition.
            for (known, suppressed) in [(fneg, fpos), (fpos, fneg)] {
                let case = [
                    guards.to_vec(),
                    vec![
                        BodyLiteral::know(holds(known, s_res(d, a, svar()))),
                        know_p.clone(),
                    ],
                ]
                .concat();
                let mut by_value = case.clone();
                by_value.push(BodyLiteral::pos(holds(suppressed, svar())));
                rules.push(Rule::new(head.clone(), by_value));
                let mut by_precondition = case;
                by_precondition.push(BodyLiteral::pos(holds(np, svar())));
                rules.push(Rule::new(head.clone(), by_precondition));
            }
        }
    }

    // Inertia, per action and fluent literal.
    for a in d.actions() {
        for f in d.fluents() {
            for lit in [FluentLiteral::pos(f), FluentLiteral::neg(f)] {
                rules.push(Rule::new(
                    vec![holds(enc.literal(lit), s_res(d, a, svar()))],
                    vec![
                        BodyLiteral::pos(holds(enc.literal(lit), svar())),
                        BodyLiteral::naf(ab(enc.literal(lit.negated()), d, a, svar())),
                    ],
                ));
            }
        }
    }

    // Suppression: `true` propagates forward and floods every constant.
    for a in d.actions() {
        rules.push(Rule::new(
            vec![holds(TRUE_CONST, s_res(d, a, svar()))],
            vec![BodyLiteral::pos(holds(TRUE_CONST, svar()))],
        ));
    }
    for c in enc.flooded_constants() {
        rules.push(Rule::new(
            vec![holds(c, svar())],
            vec![BodyLiteral::pos(holds(TRUE_CONST, svar()))],
        ));
    }

    Ok(Program::new(rules))
}

/// Ground term mirroring a plan: `pnil`, `pseq(a, rest)`,
/// `pif(test, then, rest)`, `pifelse(test, then, else, rest)`,
/// `pwhile(test, body, rest)`; tests are `tcons`/`tnil` lists of literal
/// constants.
pub fn plan_term(d: &Domain, plan: &Plan) -> Term {
    match plan {
        Plan::Empty => Term::constant("pnil"),
        Plan::Action(a, rest) => Term::app(
            "pseq",
            vec![Term::constant(d.action_name(*a)), plan_term(d, rest)],
        ),
        Plan::IfThen(test, then, rest) => Term::app(
            "pif",
            vec![test_term(d, test), plan_term(d, then), plan_term(d, rest)],
        ),
        Plan::IfThenElse(test, then, otherwise, rest) => Term::app(
            "pifelse",
            vec![
                test_term(d, test),
                plan_term(d, then),
                plan_term(d, otherwise),
                plan_term(d, rest),
            ],
        ),
        Plan::While(test, body, rest) => Term::app(
            "pwhile",
            vec![test_term(d, test), plan_term(d, body), plan_term(d, rest)],
        ),
    }
}

fn test_term(d: &Domain, test: &TestCondition) -> Term {
    let enc_name = |l: &FluentLiteral| {
        if l.positive {
            d.fluent_name(l.fluent).to_string()
        } else {
            format!("neg_{}", d.fluent_name(l.fluent))
        }
    };
    test.conjuncts()
        .iter()
        .rev()
        .fold(Term::constant("tnil"), |acc, l| {
            Term::app("tcons", vec![Term::constant(enc_name(l)), acc])
        })
}

/// A query's rule set plus the atoms whose entailment answers it.
#[derive(Debug, Clone)]
pub struct QueryTranslation {
    pub rules: Program,
    /// One `holds_after_plan` atom per goal conjunct; the query's "yes"
    /// side is the entailment of all of them.
    pub goal_atoms: Vec<Atom>,
    /// Atom whose entailment means the goal's negation holds after the plan.
    pub negated_goal_atom: Atom,
}

/// Compile a query into the `find_situation`/`holds_after_plan` cascade,
/// instantiated over the finite closure of the plan's suffixes.
pub fn translate_query_rules(d: &Domain, q: &Query) -> Result<QueryTranslation, TranslateError> {
    let enc = EncodingMap::new(d)?;
    let mut rules = Vec::new();
    let mut tests = TestGuards { enc: &enc, next: 1, memo: BTreeMap::new() };

    let mut emitted: BTreeSet<String> = BTreeSet::new();
    let mut queue: VecDeque<Plan> = VecDeque::new();
    queue.push_back(q.plan.clone());
    while let Some(plan) = queue.pop_front() {
        let term = plan_term(d, &plan);
        if !emitted.insert(term.to_string()) {
            continue;
        }
        let step = |cont: &Plan, from: Term, guards: Vec<BodyLiteral>| {
            let mut body = guards;
            body.push(BodyLiteral::pos(Atom::new(
                "find_situation",
                vec![plan_term(d, cont), from, rvar()],
            )));
            Rule::new(
                vec![Atom::new("find_situation", vec![term.clone(), svar(), rvar()])],
                body,
            )
        };
        match &plan {
            Plan::Empty => {
                rules.push(Rule::fact(Atom::new(
                    "find_situation",
                    vec![term.clone(), svar(), svar()],
                )));
            }
            Plan::Action(a, rest) => {
                rules.push(step(rest, s_res(d, *a, svar()), Vec::new()));
                queue.push_back(rest.as_ref().clone());
            }
            Plan::IfThen(test, then, rest) => {
                let cont = then.concat(rest);
                rules.push(step(&cont, svar(), tests.positive(test)));
                queue.push_back(cont);
                if let Some(guard) = tests.negative(test, &mut rules)? {
                    rules.push(step(rest, svar(), vec![guard]));
                    queue.push_back(rest.as_ref().clone());
                }
            }
            Plan::IfThenElse(test, then, otherwise, rest) => {
                let cont_then = then.concat(rest);
                rules.push(step(&cont_then, svar(), tests.positive(test)));
                queue.push_back(cont_then);
                if let Some(guard) = tests.negative(test, &mut rules)? {
                    let cont_else = otherwise.concat(rest);
                    rules.push(step(&cont_else, svar(), vec![guard]));
                    queue.push_back(cont_else);
                }
            }
            Plan::While(test, body, rest) => {
                // The loop continuation re-enters this same plan term, so
                // the suffix closure stays finite.
                let cont = body.concat(&plan);
                rules.push(step(&cont, svar(), tests.positive(test)));
                queue.push_back(cont);
                if let Some(guard) = tests.negative(test, &mut rules)? {
                    rules.push(step(rest, svar(), vec![guard]));
                    queue.push_back(rest.as_ref().clone());
                }
            }
        }
    }

    // holds_after_plan: find the final situation, then read the goal there.
    let pterm = plan_term(d, &q.plan);
    let hap = |constant: &str| {
        Atom::new(
            "holds_after_plan",
            vec![Term::constant(constant), pterm.clone()],
        )
    };
    let hap_rule = |constant: &str| {
        Rule::new(
            vec![hap(constant)],
            vec![
                BodyLiteral::pos(Atom::new(
                    "find_situation",
                    vec![pterm.clone(), Term::constant("s0"), svar()],
                )),
                BodyLiteral::pos(holds(constant, svar())),
            ],
        )
    };
    let mut goal_atoms = Vec::new();
    let mut seen_conjuncts = BTreeSet::new();
    for &c in q.goal.conjuncts() {
        let name = enc.literal(c).to_string();
        if seen_conjuncts.insert(name.clone()) {
            rules.push(hap_rule(&name));
            goal_atoms.push(hap(&name));
        }
    }
    let negated_name = if q.goal.conjuncts().len() == 1 {
        enc.literal(q.goal.conjuncts()[0].negated()).to_string()
    } else {
        let name = tests.fresh_negation(q.goal.conjuncts(), &mut rules)?;
        name
    };
    rules.push(hap_rule(&negated_name));
    let negated_goal_atom = hap(&negated_name);

    Ok(QueryTranslation { rules: Program::new(rules), goal_atoms, negated_goal_atom })
}

/// Guard compilation for plan tests: `K` distributes over the conjuncts on
/// the true side; the false side needs a fresh disjunction constant
/// `t_neg_<j>` whenever the test has more than one conjunct.
struct TestGuards<'a> {
    enc: &'a EncodingMap,
    next: usize,
    memo: BTreeMap<Vec<FluentLiteral>, String>,
}

impl TestGuards<'_> {
    fn positive(&self, test: &TestCondition) -> Vec<BodyLiteral> {
        test.conjuncts()
            .iter()
            .map(|&c| BodyLiteral::know(holds(self.enc.literal(c), svar())))
            .collect()
    }

    /// Guard satisfied exactly when the test is known false; `None` for
    /// trivial tests, whose negation can never hold.
    fn negative(
        &mut self,
        test: &TestCondition,
        rules: &mut Vec<Rule>,
    ) -> Result<Option<BodyLiteral>, TranslateError> {
        match test.conjuncts() {
            [] => Ok(None),
            [single] => {
                Ok(Some(BodyLiteral::know(holds(self.enc.literal(single.negated()), svar()))))
            }
            conjuncts => {
                let name = match self.memo.get(conjuncts) {
                    Some(name) => name.clone(),
                    None => {
                        let name = self.fresh_negation(conjuncts, rules)?;
                        self.memo.insert(conjuncts.to_vec(), name.clone());
                        name
                    }
                };
                Ok(Some(BodyLiteral::know(holds(&name, svar()))))
            }
        }
    }

    /// Define a fresh constant true exactly where some conjunct fails, and
    /// flooded like every other constant.
    fn fresh_negation(
        &mut self,
        conjuncts: &[FluentLiteral],
        rules: &mut Vec<Rule>,
    ) -> Result<String, TranslateError> {
        let name = format!("t_neg_{}", self.next);
        self.next += 1;
        self.enc.check_fresh(&name)?;
        for &c in conjuncts {
            rules.push(Rule::new(
                vec![holds(&name, svar())],
                vec![BodyLiteral::pos(holds(self.enc.literal(c.negated()), svar()))],
            ));
        }
        rules.push(Rule::new(
            vec![holds(&name, svar())],
            vec![BodyLiteral::pos(holds(TRUE_CONST, svar()))],
        ));
        Ok(name)
    }
}

/// Instantiate schematic rules over a finite situation universe.
///
/// The default universe contains exactly the situation terms a plan can
/// visit (both branches of every conditional, loop bodies unrolled until
/// `depth` is exhausted); `full_universe` switches to every action sequence
/// of length ≤ `depth`. A rule instance is kept only if all its situation
/// terms lie in the universe. `depth: None` infers the maximum action count
/// of the plan and fails with [`TranslateError::DepthRequired`] on loops.
pub fn ground(
    d: &Domain,
    rules: &Program,
    q: &Query,
    depth: Option<usize>,
    full_universe: bool,
) -> Result<Program, TranslateError> {
    let universe = situation_universe(d, q, depth, full_universe)?;
    let terms: Vec<Term> = universe.iter().map(|s| s.to_term(d)).collect();
    let allowed: BTreeSet<String> = terms.iter().map(|t| t.to_string()).collect();

    let mut out = Vec::new();
    for rule in &rules.rules {
        let vars = rule.variables();
        if vars.is_empty() {
            if rule_situations_allowed(rule, &allowed) {
                out.push(rule.clone());
            }
            continue;
        }
        for t in &terms {
            let instance = rule.substitute(SITUATION_VAR, t);
            if instance.variables().is_empty() {
                if rule_situations_allowed(&instance, &allowed) {
                    out.push(instance);
                }
                continue;
            }
            for t1 in &terms {
                let full = instance.substitute(RESULT_VAR, t1);
                if rule_situations_allowed(&full, &allowed) {
                    out.push(full);
                }
            }
        }
    }
    Ok(Program::new(out))
}

fn rule_situations_allowed(rule: &Rule, allowed: &BTreeSet<String>) -> bool {
    fn term_ok(t: &Term, allowed: &BTreeSet<String>) -> bool {
        match t {
            Term::Const(c) if c == "s0" => allowed.contains("s0"),
            Term::Const(_) | Term::Var(_) => true,
            Term::App(name, args) if name == "res" => allowed.contains(&t.to_string()),
            Term::App(_, args) => args.iter().all(|a| term_ok(a, allowed)),
        }
    }
    let atom_ok =
        |a: &Atom| a.args.iter().all(|t| term_ok(t, allowed));
    rule.head.iter().all(&atom_ok) && rule.body.iter().all(|b| atom_ok(&b.atom))
}

/// The situation universe [`ground`] instantiates over: the terms the
/// plan can visit, or every action sequence up to `depth` when
/// `full_universe` is set.
pub fn situation_universe(
    d: &Domain,
    q: &Query,
    depth: Option<usize>,
    full_universe: bool,
) -> Result<BTreeSet<SituationTerm>, TranslateError> {
    let depth = match depth {
        Some(n) => n,
        None => q.plan.max_action_count().ok_or(TranslateError::DepthRequired)?,
    };
    Ok(if full_universe {
        full_situation_universe(d, depth)
    } else {
        trace_situation_universe(d, &q.plan, depth)
    })
}

/// Situation terms reachable by walking the plan from `s0`, ignoring test
/// guards, cut off at `depth` actions.
fn trace_situation_universe(d: &Domain, plan: &Plan, depth: usize) -> BTreeSet<SituationTerm> {
    let mut universe = BTreeSet::new();
    universe.insert(SituationTerm::Initial);
    let mut seen: BTreeSet<(String, SituationTerm)> = BTreeSet::new();
    let mut queue: VecDeque<(Plan, SituationTerm)> = VecDeque::new();
    queue.push_back((plan.clone(), SituationTerm::Initial));
    while let Some((p, sit)) = queue.pop_front() {
        if !seen.insert((plan_term(d, &p).to_string(), sit.clone())) {
            continue;
        }
        match &p {
            Plan::Empty => {}
            Plan::Action(a, rest) => {
                if sit.depth() < depth {
                    let next = SituationTerm::Res(*a, Box::new(sit));
                    universe.insert(next.clone());
                    queue.push_back((rest.as_ref().clone(), next));
                }
            }
            Plan::IfThen(_, then, rest) => {
                queue.push_back((then.concat(rest), sit.clone()));
                queue.push_back((rest.as_ref().clone(), sit));
            }
            Plan::IfThenElse(_, then, otherwise, rest) => {
                queue.push_back((then.concat(rest), sit.clone()));
                queue.push_back((otherwise.concat(rest), sit));
            }
            Plan::While(_, body, rest) => {
                queue.push_back((rest.as_ref().clone(), sit.clone()));
                queue.push_back((body.concat(&p), sit));
            }
        }
    }
    universe
}

/// Every situation term over the domain's actions up to `depth`.
fn full_situation_universe(d: &Domain, depth: usize) -> BTreeSet<SituationTerm> {
    let mut universe = BTreeSet::new();
    let mut frontier = vec![SituationTerm::Initial];
    universe.insert(SituationTerm::Initial);
    for _ in 0..depth {
        let mut next = Vec::new();
        for sit in &frontier {
            for a in d.actions() {
                let term = SituationTerm::Res(a, Box::new(sit.clone()));
                if universe.insert(term.clone()) {
                    next.push(term);
                }
            }
        }
        frontier = next;
    }
    universe
}

/// The suppression rules are designed around three possible resolutions
/// per applicable sensing step: the knowledge precondition fails to become
/// known afterwards, or it becomes known together with the sensed fluent,
/// or together with the fluent's complement. The world-view fixpoint
/// equation alone also admits collections in which the sensing step
/// resolves nothing — the precondition is known after the action yet
/// neither value of the sensed fluent is, so no suppression rule fires and
/// the guess is self-consistent. That happens whenever the precondition
/// already holds in every surviving state, and such collections correspond
/// to no transition of the domain: every transition either prunes the
/// situation down to one sensed value or fails the precondition. They are
/// therefore excluded when reading entailment off the translation.
fn sensing_outcomes_resolved(
    d: &Domain,
    enc: &EncodingMap,
    universe: &BTreeSet<SituationTerm>,
    view: &crate::elp::WorldView,
) -> Result<bool, TranslateError> {
    for a in d.actions().filter(|&a| d.action_kind(a) == ActionKind::Sensing) {
        for f in d.potential_sensing_effects(a)? {
            let (p, _) = enc.knowledge(a, f);
            let fpos = enc.literal(FluentLiteral::pos(f));
            let fneg = enc.literal(FluentLiteral::neg(f));
            for s in universe {
                let res = SituationTerm::Res(a, Box::new(s.clone()));
                if !universe.contains(&res) {
                    continue;
                }
                let at = s.to_term(d);
                let after = res.to_term(d);
                if view.knows(&holds(fpos, at.clone())) || view.knows(&holds(fneg, at)) {
                    continue; // already known: sensing is a no-op by design
                }
                let resolved = !view.knows(&holds(p, after.clone()))
                    || view.knows(&holds(fpos, after.clone()))
                    || view.knows(&holds(fneg, after));
                if !resolved {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Result of running the plan engine and the translated program on the
/// same query.
#[derive(Debug, Clone)]
pub struct CrosscheckReport {
    pub semantic: Answer,
    pub elp_entails_goal: bool,
    pub elp_entails_negation: bool,
    /// True when entailment matches in both directions: semantic `yes` iff
    /// the program entails every goal atom, semantic `no` iff it entails
    /// the negated goal atom.
    pub agree: bool,
    /// Grounding depth actually used.
    pub depth: usize,
}

/// Answer a query twice — once with the plan engine, once by translating
/// to an epistemic logic program and solving its world views — and compare.
///
/// The semantic side always runs in the default verdict mode, since the
/// correspondence is stated for it. Loop plans are accepted only when every
/// branch terminates; the measured maximum action count then bounds the
/// grounding depth. World views in which some applicable sensing step
/// resolved to none of its three designed outcomes are excluded before
/// entailment is read off (see [`sensing_outcomes_resolved`]).
pub fn crosscheck(
    d: &Domain,
    q: &Query,
    depth: Option<usize>,
    config: &EngineConfig,
) -> Result<CrosscheckReport, TranslateError> {
    let config = EngineConfig { mode: engine::VerdictMode::Default, ..config.clone() };
    let semantic = engine::entails(d, q, &config)?;
    if semantic.outcomes.iter().any(|o| o.diverged) {
        return Err(TranslateError::DivergentPlan);
    }
    let required =
        semantic.outcomes.iter().map(|o| o.actions_executed()).max().unwrap_or(0);
    let depth = match depth {
        Some(n) if n < required => {
            return Err(TranslateError::DepthTooShallow { given: n, required });
        }
        Some(n) => n,
        None => q.plan.max_action_count().unwrap_or(required),
    };

    let mut rules = translate_domain(d)?;
    let query = translate_query_rules(d, q)?;
    rules.rules.extend(query.rules.rules.iter().cloned());
    let program = ground(d, &rules, q, Some(depth), false)?;
    let enc = EncodingMap::new(d)?;
    let universe = situation_universe(d, q, Some(depth), false)?;
    let mut views = Vec::new();
    for view in world_views_stratified(&program, DEFAULT_SEARCH_BUDGET)? {
        if sensing_outcomes_resolved(d, &enc, &universe, &view)? {
            views.push(view);
        }
    }
    if views.is_empty() {
        return Err(TranslateError::Solver(ElpError::NoWorldView));
    }
    let entailed = |atom: &Atom| views.iter().all(|w| w.knows(atom));
    let elp_entails_goal = query.goal_atoms.iter().all(entailed);
    let elp_entails_negation = entailed(&query.negated_goal_atom);
    let agree = ((semantic.verdict == Verdict::Yes) == elp_entails_goal)
        && ((semantic.verdict == Verdict::No) == elp_entails_negation);
    Ok(CrosscheckReport { semantic, elp_entails_goal, elp_entails_negation, agree, depth })
}
