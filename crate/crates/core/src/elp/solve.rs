//! Semantics for ground epistemic logic programs.
//!
//! Three layers, each building on the previous:
//!
//! 1. [`objective_reduct`] — the default-negation reduct `Π^W` of a
//!    modal-free program with respect to a set of atoms.
//! 2. [`belief_sets`] — all minimal sets of atoms satisfying their own
//!    reduct (answer sets, disjunctive heads included).
//! 3. [`world_views`] — collections `A` of belief sets such that `A` equals
//!    the set of all belief sets of the modal reduct `[Π]_A`, found by
//!    guessing a truth value for every atom that occurs under `K`/`-K`,
//!    solving the induced objective program, and keeping the guesses that
//!    reproduce themselves.
//!
//! The guess space is exponential in the number of distinct subjective
//! atoms, so [`world_views_stratified`] additionally prunes layer by layer
//! along the program's atom-dependency strata; see its documentation for
//! the exact guarantee.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::{Atom, BeliefSet, Modality, Program, Rule, WorldView};

/// Cap on the number of subjective-valuation guesses explored per search.
pub const DEFAULT_SEARCH_BUDGET: u64 = 1 << 20;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ElpError {
    /// A `K`/`-K` literal appeared where only objective rules are allowed.
    #[error("rule `{rule}` carries a K or -K literal; expected an objective program")]
    ModalLiteralPresent { rule: String },
    /// Solving requires a ground program.
    #[error("rule `{rule}` contains variables; the solver handles ground programs only")]
    NonGround { rule: String },
    /// The world-view search gave up after exploring too many guesses.
    #[error("world-view search exceeded its budget of {budget} candidate valuations")]
    SearchBudgetExceeded { budget: u64 },
    /// Entailment is undefined for programs without world views.
    #[error("program has no world view; entailment is undefined")]
    NoWorldView,
}

/// Default-negation reduct `Π^W`: drop every rule with a `not G` literal
/// whose atom `G` is in `w`, and strip the remaining `not` literals.
pub fn objective_reduct(program: &Program, w: &BeliefSet) -> Result<Program, ElpError> {
    require_modal_free(program)?;
    let mut rules = Vec::new();
    for rule in &program.rules {
        if rule.body.iter().any(|b| b.default_negated && w.contains(&b.atom)) {
            continue;
        }
        rules.push(Rule::new(
            rule.head.clone(),
            rule.body.iter().filter(|b| !b.default_negated).cloned().collect(),
        ));
    }
    Ok(Program::new(rules))
}

/// All belief sets of a ground, modal-free program: sets `W` that are
/// minimal models of their own reduct `Π^W`.
///
/// Minimality is decided over the atoms occurring in rule heads; atoms that
/// no rule can derive are false in every belief set.
pub fn belief_sets(program: &Program) -> Result<BTreeSet<BeliefSet>, ElpError> {
    require_modal_free(program)?;
    let compiled = Compiled::new(program)?;
    let families = stable_models(compiled.rules.iter(), compiled.atom_count());
    Ok(families.into_iter().map(|m| compiled.to_belief_set(&m)).collect())
}

/// Modal reduct `[Π]_A`: evaluate every `K G` literal as "G belongs to every
/// member of `collection`" (and `-K G` as its negation), drop the rules with
/// a false subjective literal, and strip the subjective literals from the
/// rules that remain.
pub fn modal_reduct(program: &Program, collection: &BTreeSet<BeliefSet>) -> Program {
    let knows = |atom: &Atom| collection.iter().all(|b| b.contains(atom));
    let mut rules = Vec::new();
    for rule in &program.rules {
        let alive = rule.body.iter().all(|b| match b.modality {
            Modality::Objective => true,
            Modality::K => knows(&b.atom),
            Modality::NegK => !knows(&b.atom),
        });
        if !alive {
            continue;
        }
        rules.push(Rule::new(
            rule.head.clone(),
            rule.body.iter().filter(|b| !b.is_subjective()).cloned().collect(),
        ));
    }
    Program::new(rules)
}

/// All world views of a ground program, canonically ordered.
///
/// Every truth assignment to the distinct subjective atoms is tried (up to
/// the default budget); an assignment is accepted when the belief sets of
/// the induced modal reduct are non-empty and reproduce exactly the guessed
/// knowledge values.
pub fn world_views(program: &Program) -> Result<Vec<WorldView>, ElpError> {
    world_views_with_budget(program, DEFAULT_SEARCH_BUDGET)
}

/// [`world_views`] with an explicit guess budget.
pub fn world_views_with_budget(program: &Program, budget: u64) -> Result<Vec<WorldView>, ElpError> {
    Solver::new(program, budget, false)?.run()
}

/// World-view search that prunes guesses along the program's atom-dependency
/// strata instead of enumerating the full assignment space.
///
/// Sound and complete for programs whose rule dependencies are layered the
/// way the action-domain translation lays them out: no constraints, every
/// body atom derivable no later than the rule's head, and no stratum that
/// can reject the belief sets of the strata below it. Every view returned
/// has passed the full fixpoint check, so false positives are impossible in
/// any case; if the stratified pass finds nothing, the exact enumeration is
/// rerun as a fallback. Use [`world_views`] for arbitrary programs.
pub fn world_views_stratified(program: &Program, budget: u64) -> Result<Vec<WorldView>, ElpError> {
    let views = Solver::new(program, budget, true)?.run()?;
    if views.is_empty() {
        return world_views_with_budget(program, budget);
    }
    Ok(views)
}

/// True when the atom belongs to every belief set of every world view.
pub fn elp_entails(program: &Program, atom: &Atom) -> Result<bool, ElpError> {
    let views = world_views(program)?;
    if views.is_empty() {
        return Err(ElpError::NoWorldView);
    }
    Ok(views.iter().all(|v| v.knows(atom)))
}

fn require_modal_free(program: &Program) -> Result<(), ElpError> {
    for rule in &program.rules {
        if rule.has_subjective_literal() {
            return Err(ElpError::ModalLiteralPresent { rule: rule.to_string() });
        }
    }
    Ok(())
}

type AtomId = usize;

/// Rule over interned atom ids, body split by literal class.
struct CRule {
    head: Vec<AtomId>,
    pos: Vec<AtomId>,
    naf: Vec<AtomId>,
    know: Vec<AtomId>,
    not_know: Vec<AtomId>,
}

struct Compiled {
    atoms: Vec<Atom>,
    rules: Vec<CRule>,
}

impl Compiled {
    fn new(program: &Program) -> Result<Compiled, ElpError> {
        let mut index: BTreeMap<Atom, AtomId> = BTreeMap::new();
        let mut atoms = Vec::new();
        let mut intern = |atom: &Atom, atoms: &mut Vec<Atom>| -> usize {
            *index.entry(atom.clone()).or_insert_with(|| {
                atoms.push(atom.clone());
                atoms.len() - 1
            })
        };
        let mut rules = Vec::new();
        for rule in &program.rules {
            if !rule.is_ground() {
                return Err(ElpError::NonGround { rule: rule.to_string() });
            }
            let mut c = CRule {
                head: Vec::new(),
                pos: Vec::new(),
                naf: Vec::new(),
                know: Vec::new(),
                not_know: Vec::new(),
            };
            for h in &rule.head {
                c.head.push(intern(h, &mut atoms));
            }
            for b in &rule.body {
                debug_assert!(
                    !(b.default_negated && b.is_subjective()),
                    "default negation over a subjective literal is outside the fragment"
                );
                let id = intern(&b.atom, &mut atoms);
                match (b.modality, b.default_negated) {
                    (Modality::Objective, false) => c.pos.push(id),
                    (Modality::Objective, true) => c.naf.push(id),
                    (Modality::K, _) => c.know.push(id),
                    (Modality::NegK, _) => c.not_know.push(id),
                }
            }
            rules.push(c);
        }
        Ok(Compiled { atoms, rules })
    }

    fn atom_count(&self) -> usize {
        self.atoms.len()
    }

    fn to_belief_set(&self, model: &[bool]) -> BeliefSet {
        model
            .iter()
            .enumerate()
            .filter(|&(_, &v)| v)
            .map(|(i, _)| self.atoms[i].clone())
            .collect()
    }
}

/// All answer sets (as atom-id bitmaps) of the given objective rules.
///
/// The search assigns truth values three-valued, propagating two kinds of
/// consequence to a fixpoint: a rule whose body holds forces its single
/// remaining non-false head atom true, and an atom no remaining rule could
/// derive is false (an answer set contains only derived atoms). Branching
/// is therefore confined to atoms propagation leaves open — disjunctive
/// heads and even negation loops — rather than the whole atom universe.
/// Every complete assignment is verified to be a supported model and then
/// checked for minimality.
fn stable_models<'a>(rules: impl Iterator<Item = &'a CRule>, atom_count: usize) -> Vec<Vec<bool>> {
    let rules: Vec<&CRule> = rules.collect();
    let mut derivable = vec![false; atom_count];
    let mut head_rules: Vec<Vec<usize>> = vec![Vec::new(); atom_count];
    for (i, r) in rules.iter().enumerate() {
        for &h in &r.head {
            derivable[h] = true;
            head_rules[h].push(i);
        }
    }

    // Branch bottom-up in dependency order, so a choice is fully
    // propagated before anything built on top of it comes up.
    let strata = dependency_strata(rules.iter().copied(), atom_count);
    let mut order: Vec<AtomId> = (0..atom_count).filter(|&a| derivable[a]).collect();
    order.sort_by_key(|&a| (strata[a], a));

    let mut assign: Vec<Option<bool>> = derivable
        .iter()
        .map(|&d| if d { None } else { Some(false) })
        .collect();
    let mut models = Vec::new();
    search_answer_sets(&rules, &head_rules, &order, &mut assign, &mut models);
    models.sort();
    models.dedup();
    models
}

fn search_answer_sets(
    rules: &[&CRule],
    head_rules: &[Vec<usize>],
    order: &[AtomId],
    assign: &mut [Option<bool>],
    out: &mut Vec<Vec<bool>>,
) {
    let mut trail: Vec<AtomId> = Vec::new();
    let consistent = loop {
        let mut changed = false;
        let mut conflict = false;
        for r in rules {
            let body_holds = r.pos.iter().all(|&b| assign[b] == Some(true))
                && r.naf.iter().all(|&b| assign[b] == Some(false));
            if !body_holds {
                continue;
            }
            let mut open = None;
            let mut open_count = 0;
            let mut satisfied = false;
            for &h in &r.head {
                match assign[h] {
                    Some(true) => {
                        satisfied = true;
                        break;
                    }
                    Some(false) => {}
                    None => {
                        open_count += 1;
                        open = Some(h);
                    }
                }
            }
            if satisfied {
                continue;
            }
            match open_count {
                0 => {
                    conflict = true;
                    break;
                }
                1 => {
                    let h = open.unwrap();
                    assign[h] = Some(true);
                    trail.push(h);
                    changed = true;
                }
                _ => {}
            }
        }
        if conflict {
            break false;
        }
        for &a in order {
            if assign[a].is_some() {
                continue;
            }
            let some_rule_can_derive = head_rules[a].iter().any(|&i| {
                let r = rules[i];
                r.pos.iter().all(|&b| assign[b] != Some(false))
                    && r.naf.iter().all(|&b| assign[b] != Some(true))
            });
            if !some_rule_can_derive {
                assign[a] = Some(false);
                trail.push(a);
                changed = true;
            }
        }
        if !changed {
            break true;
        }
    };

    if consistent {
        match order.iter().copied().find(|&a| assign[a].is_none()) {
            None => {
                let model: Vec<bool> = assign.iter().map(|v| *v == Some(true)).collect();
                if satisfies_all(rules, &model)
                    && is_supported(rules, head_rules, &model)
                    && is_stable(rules, &model)
                {
                    out.push(model);
                }
            }
            Some(pivot) => {
                for value in [false, true] {
                    assign[pivot] = Some(value);
                    search_answer_sets(rules, head_rules, order, assign, out);
                }
                assign[pivot] = None;
            }
        }
    }
    for a in trail {
        assign[a] = None;
    }
}

fn satisfies_all(rules: &[&CRule], w: &[bool]) -> bool {
    rules.iter().all(|r| {
        let body = r.pos.iter().all(|&b| w[b]) && r.naf.iter().all(|&b| !w[b]);
        !body || r.head.iter().any(|&h| w[h])
    })
}

/// In an answer set every true atom has a rule whose body holds and whose
/// other head atoms are all false (dropping an atom without one would
/// yield a smaller model), so unsupported candidates can be rejected
/// before the full minimality check.
fn is_supported(rules: &[&CRule], head_rules: &[Vec<usize>], w: &[bool]) -> bool {
    (0..w.len()).filter(|&a| w[a]).all(|a| {
        head_rules[a].iter().any(|&i| {
            let r = rules[i];
            r.pos.iter().all(|&b| w[b])
                && r.naf.iter().all(|&b| !w[b])
                && r.head.iter().all(|&h| h == a || !w[h])
        })
    })
}

/// Visit every total assignment satisfying all clauses; the visitor returns
/// `false` to stop early. Atoms pre-assigned in `assign` stay fixed.
fn enumerate_models(
    clauses: &[Vec<(AtomId, bool)>],
    assign: &mut [Option<bool>],
    visit: &mut dyn FnMut(&[bool]) -> bool,
) -> bool {
    // Unit propagation to a fixpoint; bail out on a falsified clause.
    let mut trail: Vec<AtomId> = Vec::new();
    let consistent = loop {
        let mut changed = false;
        let mut ok = true;
        'clauses: for clause in clauses {
            let mut unassigned = None;
            let mut open = 0usize;
            for &(a, polarity) in clause {
                match assign[a] {
                    Some(v) if v == polarity => continue 'clauses,
                    Some(_) => {}
                    None => {
                        open += 1;
                        unassigned = Some((a, polarity));
                    }
                }
            }
            match open {
                0 => {
                    ok = false;
                    break;
                }
                1 => {
                    let (a, polarity) = unassigned.unwrap();
                    assign[a] = Some(polarity);
                    trail.push(a);
                    changed = true;
                }
                _ => {}
            }
        }
        if !ok {
            break false;
        }
        if !changed {
            break true;
        }
    };

    let mut keep_going = true;
    if consistent {
        match assign.iter().position(|v| v.is_none()) {
            None => {
                let model: Vec<bool> = assign.iter().map(|v| v.unwrap()).collect();
                keep_going = visit(&model);
            }
            Some(pivot) => {
                for value in [false, true] {
                    assign[pivot] = Some(value);
                    keep_going = enumerate_models(clauses, assign, visit);
                    if !keep_going {
                        break;
                    }
                }
                assign[pivot] = None;
            }
        }
    }
    for a in trail {
        assign[a] = None;
    }
    keep_going
}

/// Is `w` a minimal model of the reduct of `rules` with respect to `w`?
///
/// `w` is already known to satisfy the reduct; minimality fails iff some
/// proper subset of `w` still satisfies it.
fn is_stable(rules: &[&CRule], w: &[bool]) -> bool {
    let mut clauses: Vec<Vec<(AtomId, bool)>> = Vec::new();
    for r in rules {
        if r.naf.iter().any(|&b| w[b]) {
            continue; // dropped by the reduct
        }
        if r.pos.iter().any(|&p| !w[p]) {
            continue; // body can never hold inside a subset of w
        }
        let mut clause: Vec<(AtomId, bool)> = r.pos.iter().map(|&a| (a, false)).collect();
        clause.extend(r.head.iter().filter(|&&h| w[h]).map(|&h| (h, true)));
        clauses.push(clause);
    }
    let true_atoms: Vec<AtomId> =
        w.iter().enumerate().filter(|&(_, &v)| v).map(|(a, _)| a).collect();
    if true_atoms.is_empty() {
        return true; // the empty set has no proper subset
    }
    // Require at least one currently-true atom to flip false.
    clauses.push(true_atoms.iter().map(|&a| (a, false)).collect());

    let mut assign: Vec<Option<bool>> = w
        .iter()
        .map(|&v| if v { None } else { Some(false) })
        .collect();
    let mut found_smaller = false;
    enumerate_models(&clauses, &mut assign, &mut |_| {
        found_smaller = true;
        false
    });
    !found_smaller
}

/// Guess-and-check world-view search, with optional stratified pruning.
struct Solver {
    compiled: Compiled,
    /// Distinct subjective atoms, the guess variables.
    subjective: Vec<AtomId>,
    /// Atom id → index into `subjective` (None for objective-only atoms).
    slot: Vec<Option<usize>>,
    /// Per-rule stratum; rules at or below the active stratum form the
    /// subprogram whose belief sets prune the guesses so far.
    rule_stratum: Vec<u32>,
    atom_stratum: Vec<u32>,
    /// Ascending stratum levels at which to stop and check.
    levels: Vec<u32>,
    budget: u64,
    explored: u64,
}

impl Solver {
    fn new(program: &Program, budget: u64, stratified: bool) -> Result<Solver, ElpError> {
        let compiled = Compiled::new(program)?;
        let n = compiled.atom_count();

        let mut slot = vec![None; n];
        let mut subjective = Vec::new();
        for r in &compiled.rules {
            for &a in r.know.iter().chain(&r.not_know) {
                if slot[a].is_none() {
                    slot[a] = Some(subjective.len());
                    subjective.push(a);
                }
            }
        }

        // Constraints (empty heads) have no stratum of their own and break
        // the layering argument; fall back to a single flat level.
        let layerable = stratified && compiled.rules.iter().all(|r| !r.head.is_empty());
        let atom_stratum = if layerable {
            dependency_strata(&compiled.rules, n)
        } else {
            vec![0; n]
        };
        let rule_stratum: Vec<u32> = compiled
            .rules
            .iter()
            .map(|r| r.head.iter().map(|&h| atom_stratum[h]).max().unwrap_or(0))
            .collect();

        let mut levels: BTreeSet<u32> = rule_stratum.iter().copied().collect();
        levels.extend(subjective.iter().map(|&a| atom_stratum[a]));
        let top = levels.iter().next_back().copied().unwrap_or(0);
        levels.insert(top); // ensure at least one level even for empty input
        Ok(Solver {
            compiled,
            subjective,
            slot,
            rule_stratum,
            atom_stratum,
            levels: levels.into_iter().collect(),
            budget,
            explored: 0,
        })
    }

    fn run(mut self) -> Result<Vec<WorldView>, ElpError> {
        let mut valuation = vec![false; self.subjective.len()];
        let mut found: BTreeSet<WorldView> = BTreeSet::new();
        let levels = self.levels.clone();
        self.descend(&levels, &mut valuation, &mut found)?;
        Ok(found.into_iter().collect())
    }

    /// Extend the valuation over the next stratum's subjective atoms, prune
    /// against the subprogram's belief sets, and recurse.
    fn descend(
        &mut self,
        levels: &[u32],
        valuation: &mut Vec<bool>,
        found: &mut BTreeSet<WorldView>,
    ) -> Result<(), ElpError> {
        let (&level, rest) = levels.split_first().expect("levels is never empty");
        // Every subjective stratum is one of the levels, so atoms are picked
        // up exactly once, at their own stratum.
        let fresh: Vec<usize> = self
            .subjective
            .iter()
            .enumerate()
            .filter(|&(_, &a)| self.atom_stratum[a] == level)
            .map(|(slot, _)| slot)
            .collect();

        self.assign_fresh(&fresh, 0, level, rest, valuation, found)
    }

    fn assign_fresh(
        &mut self,
        fresh: &[usize],
        i: usize,
        level: u32,
        rest: &[u32],
        valuation: &mut Vec<bool>,
        found: &mut BTreeSet<WorldView>,
    ) -> Result<(), ElpError> {
        if i == fresh.len() {
            return self.check_level(level, rest, valuation, found);
        }
        for value in [false, true] {
            valuation[fresh[i]] = value;
            self.assign_fresh(fresh, i + 1, level, rest, valuation, found)?;
        }
        Ok(())
    }

    fn check_level(
        &mut self,
        level: u32,
        rest: &[u32],
        valuation: &mut Vec<bool>,
        found: &mut BTreeSet<WorldView>,
    ) -> Result<(), ElpError> {
        self.explored += 1;
        if self.explored > self.budget {
            return Err(ElpError::SearchBudgetExceeded { budget: self.budget });
        }

        let n = self.compiled.atom_count();
        let active = self.compiled.rules.iter().zip(&self.rule_stratum).filter_map(|(r, &s)| {
            (s <= level && self.applicable(r, valuation)).then_some(r)
        });
        let family = stable_models(active, n);
        if family.is_empty() {
            return Ok(()); // no belief sets below: nothing above can rescue
        }
        for (slot, &a) in self.subjective.iter().enumerate() {
            if self.atom_stratum[a] > level {
                continue;
            }
            let actual = family.iter().all(|m| m[a]);
            if actual != valuation[slot] {
                return Ok(()); // the guess does not reproduce itself
            }
        }
        if rest.is_empty() {
            let belief_sets: BTreeSet<BeliefSet> =
                family.iter().map(|m| self.compiled.to_belief_set(m)).collect();
            found.insert(WorldView::new(belief_sets));
            return Ok(());
        }
        self.descend(rest, valuation, found)
    }

    fn applicable(&self, rule: &CRule, valuation: &[bool]) -> bool {
        rule.know.iter().all(|&a| valuation[self.slot[a].unwrap()])
            && rule.not_know.iter().all(|&a| !valuation[self.slot[a].unwrap()])
    }
}

/// Stratum per atom: the topological level of its strongly connected
/// component in the dependency graph (body atom → head atom, plus mutual
/// edges between the atoms of a disjunctive head so they share a stratum).
fn dependency_strata<'a>(
    rules: impl IntoIterator<Item = &'a CRule>,
    atom_count: usize,
) -> Vec<u32> {
    let mut adj: Vec<Vec<AtomId>> = vec![Vec::new(); atom_count];
    for r in rules {
        for &h in &r.head {
            for &b in r.pos.iter().chain(&r.naf).chain(&r.know).chain(&r.not_know) {
                adj[b].push(h);
            }
            for &h2 in &r.head {
                if h2 != h {
                    adj[h].push(h2);
                }
            }
        }
    }

    let component = strongly_connected_components(&adj);
    let component_count = component.iter().copied().max().map_or(0, |m| m + 1);

    // Longest-path levels over the component DAG, by relaxation.
    let mut level = vec![0u32; component_count];
    loop {
        let mut changed = false;
        for (from, targets) in adj.iter().enumerate() {
            for &to in targets {
                let (cf, ct) = (component[from], component[to]);
                if cf != ct && level[ct] < level[cf] + 1 {
                    level[ct] = level[cf] + 1;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    (0..atom_count).map(|a| level[component[a]]).collect()
}

/// Kosaraju's algorithm with explicit stacks; returns the component id of
/// each node.
fn strongly_connected_components(adj: &[Vec<AtomId>]) -> Vec<usize> {
    let n = adj.len();
    let mut reverse: Vec<Vec<AtomId>> = vec![Vec::new(); n];
    for (from, targets) in adj.iter().enumerate() {
        for &to in targets {
            reverse[to].push(from);
        }
    }

    let mut order = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        seen[start] = true;
        while let Some(top) = stack.last_mut() {
            let node = top.0;
            if let Some(&target) = adj[node].get(top.1) {
                top.1 += 1;
                if !seen[target] {
                    seen[target] = true;
                    stack.push((target, 0));
                }
            } else {
                order.push(node);
                stack.pop();
            }
        }
    }

    let mut component = vec![usize::MAX; n];
    let mut count = 0;
    for &start in order.iter().rev() {
        if component[start] != usize::MAX {
            continue;
        }
        let mut stack = vec![start];
        component[start] = count;
        while let Some(node) = stack.pop() {
            for &target in &reverse[node] {
                if component[target] == usize::MAX {
                    component[target] = count;
                    stack.push(target);
                }
            }
        }
        count += 1;
    }
    component
}
