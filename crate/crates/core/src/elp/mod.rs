//! Ground epistemic logic programs: terms, atoms, rules, and world views.
//!
//! A program is a finite set of rules
//! `F1 or ... or Fk :- G1, ..., Gm, not Gm+1, ..., not Gn.` where each `Gi`
//! may additionally be wrapped in the subjective modalities `K` ("known in
//! every belief set") or `-K` (its negation). The semantics — belief sets,
//! modal reducts, and world views — lives in [`solve`].
//!
//! Only the fragment needed here is supported: ground programs, `K`/`-K`
//! on positive body literals, and default negation on objective literals.
//! Classical negation is deliberately absent; complementary fluent literals
//! are encoded as distinct constants (`f` / `neg_f`) by the translator.

pub mod solve;

use std::collections::BTreeSet;
use std::fmt;

/// A first-order term: a constant, a function application, or a variable.
///
/// Variables are written with an uppercase initial (`S`); everything else is
/// a constant or function symbol. Situation terms such as
/// `res(checkSwitch, s0)` are nested applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Const(String),
    App(String, Vec<Term>),
    Var(String),
}

impl Term {
    /// Constant with the given name.
    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    /// Function application `name(args...)`.
    pub fn app(name: impl Into<String>, args: Vec<Term>) -> Term {
        Term::App(name.into(), args)
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::App(_, args) => args.iter().all(Term::is_ground),
            Term::Var(_) => false,
        }
    }

    /// Maximum nesting depth: constants and variables have depth 0,
    /// `res(a, s0)` has depth 1, `res(b, res(a, s0))` depth 2, and so on.
    pub fn depth(&self) -> usize {
        match self {
            Term::Const(_) | Term::Var(_) => 0,
            Term::App(_, args) => 1 + args.iter().map(Term::depth).max().unwrap_or(0),
        }
    }

    /// Replace every occurrence of the variable `var` by `value`.
    pub fn substitute(&self, var: &str, value: &Term) -> Term {
        match self {
            Term::Var(v) if v == var => value.clone(),
            Term::Const(_) | Term::Var(_) => self.clone(),
            Term::App(name, args) => Term::App(
                name.clone(),
                args.iter().map(|a| a.substitute(var, value)).collect(),
            ),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Const(_) => {}
            Term::Var(v) => {
                out.insert(v);
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(name) | Term::Var(name) => write!(f, "{name}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}

/// A (possibly non-ground) atom `predicate(arg, ...)`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: String,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: impl Into<String>, args: Vec<Term>) -> Atom {
        Atom { predicate: predicate.into(), args }
    }

    /// Zero-argument atom.
    pub fn prop(predicate: impl Into<String>) -> Atom {
        Atom::new(predicate, Vec::new())
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    /// Maximum term depth over the arguments.
    pub fn depth(&self) -> usize {
        self.args.iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn substitute(&self, var: &str, value: &Term) -> Atom {
        Atom {
            predicate: self.predicate.clone(),
            args: self.args.iter().map(|a| a.substitute(var, value)).collect(),
        }
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        for a in &self.args {
            a.collect_vars(out);
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.args.is_empty() {
            write!(f, "{}", self.predicate)
        } else {
            write!(f, "{}(", self.predicate)?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{a}")?;
            }
            write!(f, ")")
        }
    }
}

/// How an atom appears in a rule body: plainly, or under `K` / `-K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Modality {
    Objective,
    /// `K a` — true when `a` belongs to every belief set under consideration.
    K,
    /// `-K a` — the negation of `K a`.
    NegK,
}

/// One body literal. Default negation (`not`) is only ever applied to
/// objective literals; `K`/`-K` literals never sit under `not` (the loader
/// and constructors enforce this).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BodyLiteral {
    pub atom: Atom,
    pub modality: Modality,
    pub default_negated: bool,
}

impl BodyLiteral {
    /// Plain positive occurrence.
    pub fn pos(atom: Atom) -> BodyLiteral {
        BodyLiteral { atom, modality: Modality::Objective, default_negated: false }
    }

    /// `not atom`.
    pub fn naf(atom: Atom) -> BodyLiteral {
        BodyLiteral { atom, modality: Modality::Objective, default_negated: true }
    }

    /// `K atom`.
    pub fn know(atom: Atom) -> BodyLiteral {
        BodyLiteral { atom, modality: Modality::K, default_negated: false }
    }

    /// `-K atom`.
    pub fn not_know(atom: Atom) -> BodyLiteral {
        BodyLiteral { atom, modality: Modality::NegK, default_negated: false }
    }

    pub fn is_subjective(&self) -> bool {
        self.modality != Modality::Objective
    }

    pub fn substitute(&self, var: &str, value: &Term) -> BodyLiteral {
        BodyLiteral {
            atom: self.atom.substitute(var, value),
            modality: self.modality,
            default_negated: self.default_negated,
        }
    }
}

impl fmt::Display for BodyLiteral {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.default_negated {
            write!(f, "not ")?;
        }
        match self.modality {
            Modality::Objective => {}
            Modality::K => write!(f, "K ")?,
            Modality::NegK => write!(f, "-K ")?,
        }
        write!(f, "{}", self.atom)
    }
}

/// A rule `h1 or ... or hk :- b1, ..., bn.`
///
/// An empty head is a constraint (allowed by the data model, not produced by
/// the translator); an empty body makes the rule a fact.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub head: Vec<Atom>,
    pub body: Vec<BodyLiteral>,
}

impl Rule {
    pub fn new(head: Vec<Atom>, body: Vec<BodyLiteral>) -> Rule {
        Rule { head, body }
    }

    /// Fact with a single head atom and empty body.
    pub fn fact(atom: Atom) -> Rule {
        Rule { head: vec![atom], body: Vec::new() }
    }

    pub fn is_ground(&self) -> bool {
        self.head.iter().all(Atom::is_ground) && self.body.iter().all(|b| b.atom.is_ground())
    }

    /// Distinct variable names appearing anywhere in the rule.
    pub fn variables(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for h in &self.head {
            h.collect_vars(&mut out);
        }
        for b in &self.body {
            b.atom.collect_vars(&mut out);
        }
        out
    }

    pub fn substitute(&self, var: &str, value: &Term) -> Rule {
        Rule {
            head: self.head.iter().map(|h| h.substitute(var, value)).collect(),
            body: self.body.iter().map(|b| b.substitute(var, value)).collect(),
        }
    }

    pub fn has_subjective_literal(&self) -> bool {
        self.body.iter().any(BodyLiteral::is_subjective)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, h) in self.head.iter().enumerate() {
            if i > 0 {
                write!(f, " or ")?;
            }
            write!(f, "{h}")?;
        }
        if !self.body.is_empty() {
            if self.head.is_empty() {
                write!(f, ":- ")?;
            } else {
                write!(f, " :- ")?;
            }
            for (i, b) in self.body.iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{b}")?;
            }
        }
        write!(f, ".")
    }
}

/// A finite set of rules, kept in insertion order for faithful rendering.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Program {
    pub rules: Vec<Rule>,
}

impl Program {
    pub fn new(rules: Vec<Rule>) -> Program {
        Program { rules }
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn is_ground(&self) -> bool {
        self.rules.iter().all(Rule::is_ground)
    }

    /// True when no rule carries a `K`/`-K` literal.
    pub fn is_modal_free(&self) -> bool {
        !self.rules.iter().any(Rule::has_subjective_literal)
    }

    /// Every atom occurring anywhere in the program.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.extend(r.head.iter().cloned());
            out.extend(r.body.iter().map(|b| b.atom.clone()));
        }
        out
    }

    /// Atoms occurring in some rule head.
    pub fn head_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.extend(r.head.iter().cloned());
        }
        out
    }

    /// Atoms occurring under `K` or `-K` somewhere in the program.
    pub fn subjective_atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        for r in &self.rules {
            out.extend(r.body.iter().filter(|b| b.is_subjective()).map(|b| b.atom.clone()));
        }
        out
    }
}

impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        Ok(())
    }
}

/// A set of ground atoms; the objective "possible world" unit.
pub type BeliefSet = BTreeSet<Atom>;

/// A world view: the collection of all belief sets of the program's modal
/// reduct with respect to itself.
///
/// Invariant: `belief_sets` is non-empty and reproduces itself under
/// [`solve::modal_reduct`] followed by [`solve::belief_sets`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct WorldView {
    pub belief_sets: BTreeSet<BeliefSet>,
}

impl WorldView {
    pub fn new(belief_sets: BTreeSet<BeliefSet>) -> WorldView {
        WorldView { belief_sets }
    }

    /// True when the atom belongs to every belief set of this view.
    pub fn knows(&self, atom: &Atom) -> bool {
        self.belief_sets.iter().all(|b| b.contains(atom))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s0() -> Term {
        Term::constant("s0")
    }

    #[test]
    fn term_depth_counts_nesting() {
        let t = Term::app("res", vec![Term::constant("drop"), s0()]);
        let t2 = Term::app("res", vec![Term::constant("pickUp"), t.clone()]);
        assert_eq!(s0().depth(), 0);
        assert_eq!(t.depth(), 1);
        assert_eq!(t2.depth(), 2);
    }

    #[test]
    fn substitution_reaches_nested_arguments() {
        let schematic = Atom::new(
            "holds",
            vec![
                Term::constant("solidIce"),
                Term::app("res", vec![Term::constant("drop"), Term::Var("S".into())]),
            ],
        );
        assert!(!schematic.is_ground());
        let ground = schematic.substitute("S", &s0());
        assert!(ground.is_ground());
        assert_eq!(ground.to_string(), "holds(solidIce, res(drop, s0))");
    }

    #[test]
    fn rule_display_round_trip_shapes() {
        let rule = Rule::new(
            vec![Atom::new("holds", vec![Term::constant("f"), s0()])],
            vec![
                BodyLiteral::pos(Atom::new("holds", vec![Term::constant("g"), s0()])),
                BodyLiteral::naf(Atom::new("ab", vec![Term::constant("f"), s0()])),
                BodyLiteral::know(Atom::new("holds", vec![Term::constant("g"), s0()])),
                BodyLiteral::not_know(Atom::new("holds", vec![Term::constant("h"), s0()])),
            ],
        );
        assert_eq!(
            rule.to_string(),
            "holds(f, s0) :- holds(g, s0), not ab(f, s0), K holds(g, s0), -K holds(h, s0)."
        );
    }

    #[test]
    fn disjunctive_fact_renders_with_or() {
        let rule = Rule::new(vec![Atom::prop("p"), Atom::prop("q")], Vec::new());
        assert_eq!(rule.to_string(), "p or q.");
    }

    #[test]
    fn program_atom_collections() {
        let p = Program::new(vec![
            Rule::new(
                vec![Atom::prop("p")],
                vec![BodyLiteral::not_know(Atom::prop("q"))],
            ),
            Rule::new(vec![Atom::prop("q")], vec![BodyLiteral::naf(Atom::prop("r"))]),
        ]);
        assert!(p.is_ground());
        assert!(!p.is_modal_free());
        assert_eq!(p.atoms().len(), 3);
        assert_eq!(p.head_atoms().len(), 2);
        let subj = p.subjective_atoms();
        assert_eq!(subj.len(), 1);
        assert!(subj.contains(&Atom::prop("q")));
    }

    #[test]
    fn rule_variable_collection() {
        let rule = Rule::new(
            vec![Atom::new(
                "holds",
                vec![
                    Term::constant("f"),
                    Term::app("res", vec![Term::constant("a"), Term::Var("S".into())]),
                ],
            )],
            vec![BodyLiteral::pos(Atom::new("holds", vec![Term::constant("f"), Term::Var("S".into())]))],
        );
        assert_eq!(rule.variables().into_iter().collect::<Vec<_>>(), vec!["S"]);
        assert!(rule.substitute("S", &s0()).is_ground());
    }

    #[test]
    fn world_view_knows_requires_membership_everywhere() {
        let b1: BeliefSet = [Atom::prop("p"), Atom::prop("q")].into_iter().collect();
        let b2: BeliefSet = [Atom::prop("p")].into_iter().collect();
        let wv = WorldView::new([b1, b2].into_iter().collect());
        assert!(wv.knows(&Atom::prop("p")));
        assert!(!wv.knows(&Atom::prop("q")));
    }
}
