//! Grammar for domain descriptions and queries.
//!
//! Domain statements:
//! ```text
//! initially -burnOut.
//! changeBulb causes bulbFixed if -switchOn.
//! checkSwitch causes to know switchOn if -burnOut.
//! drop may affect solidIce if noDrops.
//! fluents switchOn, burnOut.        % optional explicit declarations
//! actions turnSwitch, changeBulb.
//! ```
//!
//! Queries:
//! ```text
//! bulbFixed after [checkSwitch, if -switchOn then [changeBulb] else [turnSwitch, changeBulb]].
//! iceInCups after [while solidIce do [drop, pickUp, checkIce], putIceInCups].
//! ```

use crate::domain::{
    Domain, DomainBuilder, FluentLiteral, Plan, PlanItem, Proposition, Query, TestCondition,
};

use super::{ParseError, SourceSpan, TokenKind, TokenStream};

/// Words with grammatical meaning; rejected as fluent or action names.
const RESERVED: &[&str] = &[
    "initially", "causes", "to", "know", "may", "affect", "if", "after", "while", "do", "then",
    "else", "fluents", "actions", "or", "not",
];

fn name_token(ts: &mut TokenStream, what: &str) -> Result<(String, SourceSpan), ParseError> {
    let (name, span) = ts.expect_ident(what)?;
    if RESERVED.contains(&name.as_str()) {
        return Err(ParseError::new(span, format!("keyword `{name}` cannot be used as a name")));
    }
    Ok((name, span))
}

fn parse_literal(ts: &mut TokenStream, b: &mut DomainBuilder) -> Result<FluentLiteral, ParseError> {
    let positive = !ts.accept(&TokenKind::Dash);
    let (name, _) = name_token(ts, "a fluent name")?;
    let f = b.fluent(&name);
    Ok(if positive { FluentLiteral::pos(f) } else { FluentLiteral::neg(f) })
}

fn parse_literal_list(
    ts: &mut TokenStream,
    b: &mut DomainBuilder,
) -> Result<Vec<FluentLiteral>, ParseError> {
    let mut lits = vec![parse_literal(ts, b)?];
    while ts.accept(&TokenKind::Comma) {
        lits.push(parse_literal(ts, b)?);
    }
    Ok(lits)
}

fn parse_optional_preconditions(
    ts: &mut TokenStream,
    b: &mut DomainBuilder,
) -> Result<Vec<FluentLiteral>, ParseError> {
    if ts.accept_word("if") { parse_literal_list(ts, b) } else { Ok(Vec::new()) }
}

/// Parse a whole domain description. The empty text is a valid, empty domain.
pub fn parse_domain(text: &str, file: &str) -> Result<Domain, ParseError> {
    let mut ts = TokenStream::new(text, file)?;
    let mut b = DomainBuilder::new();

    while !ts.at_end() {
        let start = ts.span();
        if ts.accept_word("initially") {
            let lit = parse_literal(&mut ts, &mut b)?;
            let end = ts.expect(&TokenKind::Period)?.span;
            b.value_at(lit, start.to(&end));
        } else if ts.accept_word("fluents") {
            loop {
                let (name, _) = name_token(&mut ts, "a fluent name")?;
                b.declare_fluent(&name);
                if !ts.accept(&TokenKind::Comma) {
                    break;
                }
            }
            ts.expect(&TokenKind::Period)?;
        } else if ts.accept_word("actions") {
            loop {
                let (name, _) = name_token(&mut ts, "an action name")?;
                b.declare_action(&name);
                if !ts.accept(&TokenKind::Comma) {
                    break;
                }
            }
            ts.expect(&TokenKind::Period)?;
        } else {
            let (action_name, _) = name_token(&mut ts, "an action name or a statement keyword")?;
            let action = b.action(&action_name);
            if ts.accept_word("causes") {
                if ts.accept_word("to") {
                    ts.expect_word("know")?;
                    let (fluent_name, _) = name_token(&mut ts, "a fluent name")?;
                    let sensed = b.fluent(&fluent_name);
                    let pre = parse_optional_preconditions(&mut ts, &mut b)?;
                    let end = ts.expect(&TokenKind::Period)?.span;
                    b.knowledge_at(action, sensed, pre, start.to(&end));
                } else {
                    let effect = parse_literal(&mut ts, &mut b)?;
                    let pre = parse_optional_preconditions(&mut ts, &mut b)?;
                    let end = ts.expect(&TokenKind::Period)?.span;
                    b.effect_at(action, effect, pre, start.to(&end));
                }
            } else if ts.accept_word("may") {
                ts.expect_word("affect")?;
                let (fluent_name, _) = name_token(&mut ts, "a fluent name")?;
                let fluent = b.fluent(&fluent_name);
                let pre = parse_optional_preconditions(&mut ts, &mut b)?;
                let end = ts.expect(&TokenKind::Period)?.span;
                b.non_det_at(action, fluent, pre, start.to(&end));
            } else {
                return Err(ParseError::expecting(
                    ts.span(),
                    format!("`{action_name}` must be followed by a proposition keyword"),
                    &["`causes`", "`may`"],
                ));
            }
        }
    }

    b.build().map_err(|e| ParseError::new(SourceSpan::new(file, (1, 1), (1, 1)), e.to_string()))
}

fn resolve_literal(
    ts: &mut TokenStream,
    d: &Domain,
) -> Result<(FluentLiteral, SourceSpan), ParseError> {
    let start = ts.span();
    let positive = !ts.accept(&TokenKind::Dash);
    let (name, span) = name_token(ts, "a fluent name")?;
    let f = d.fluent(&name).map_err(|e| ParseError::new(span, e.to_string()))?;
    let lit = if positive { FluentLiteral::pos(f) } else { FluentLiteral::neg(f) };
    Ok((lit, start.to(&ts.prev_span())))
}

fn parse_test(ts: &mut TokenStream, d: &Domain) -> Result<TestCondition, ParseError> {
    let start = ts.span();
    let mut lits = vec![resolve_literal(ts, d)?.0];
    while ts.accept(&TokenKind::Comma) {
        lits.push(resolve_literal(ts, d)?.0);
    }
    TestCondition::new(lits)
        .map_err(|e| ParseError::new(start.to(&ts.prev_span()), e.to_string()))
}

fn parse_plan(ts: &mut TokenStream, d: &Domain) -> Result<Plan, ParseError> {
    ts.expect(&TokenKind::LBracket)?;
    if ts.accept(&TokenKind::RBracket) {
        return Ok(Plan::Empty);
    }
    let mut items = vec![parse_plan_item(ts, d)?];
    while ts.accept(&TokenKind::Comma) {
        items.push(parse_plan_item(ts, d)?);
    }
    ts.expect(&TokenKind::RBracket)?;
    Ok(Plan::from_items(items))
}

fn parse_plan_item(ts: &mut TokenStream, d: &Domain) -> Result<PlanItem, ParseError> {
    if ts.accept_word("if") {
        let test = parse_test(ts, d)?;
        ts.expect_word("then")?;
        let then_plan = parse_plan(ts, d)?;
        if ts.accept_word("else") {
            let else_plan = parse_plan(ts, d)?;
            Ok(PlanItem::IfThenElse(test, then_plan, else_plan))
        } else {
            Ok(PlanItem::IfThen(test, then_plan))
        }
    } else if ts.accept_word("while") {
        let test = parse_test(ts, d)?;
        ts.expect_word("do")?;
        let body = parse_plan(ts, d)?;
        Ok(PlanItem::While(test, body))
    } else {
        let (name, span) = name_token(ts, "an action name, `if`, or `while`")?;
        let a = d.action(&name).map_err(|e| ParseError::new(span, e.to_string()))?;
        Ok(PlanItem::Action(a))
    }
}

/// Parse a query `goal after plan.` against an existing domain's vocabulary.
pub fn parse_query(text: &str, d: &Domain, file: &str) -> Result<Query, ParseError> {
    let mut ts = TokenStream::new(text, file)?;
    let goal = parse_test(&mut ts, d)?;
    ts.expect_word("after")?;
    let plan = parse_plan(&mut ts, d)?;
    ts.expect(&TokenKind::Period)?;
    if !ts.at_end() {
        return Err(ParseError::new(ts.span(), "trailing input after query"));
    }
    Ok(Query { goal, plan })
}

fn render_literal(d: &Domain, lit: FluentLiteral) -> String {
    d.literal_name(lit)
}

fn render_literals(d: &Domain, lits: &[FluentLiteral]) -> String {
    lits.iter().map(|l| render_literal(d, *l)).collect::<Vec<_>>().join(", ")
}

fn render_if_clause(d: &Domain, pre: &[FluentLiteral]) -> String {
    if pre.is_empty() { String::new() } else { format!(" if {}", render_literals(d, pre)) }
}

/// Canonical text for a domain; parsing it back yields an equal domain.
pub fn render_domain(d: &Domain) -> String {
    let mut out = String::new();
    if let Some(fluents) = d.declared_fluents() {
        let names: Vec<&str> = fluents.iter().map(|f| d.fluent_name(*f)).collect();
        out.push_str(&format!("fluents {}.\n", names.join(", ")));
    }
    if let Some(actions) = d.declared_actions() {
        let names: Vec<&str> = actions.iter().map(|a| d.action_name(*a)).collect();
        out.push_str(&format!("actions {}.\n", names.join(", ")));
    }
    for p in d.propositions() {
        let line = match p {
            Proposition::Value { literal, .. } => {
                format!("initially {}.", render_literal(d, *literal))
            }
            Proposition::Effect { action, effect, preconditions, .. } => format!(
                "{} causes {}{}.",
                d.action_name(*action),
                render_literal(d, *effect),
                render_if_clause(d, preconditions)
            ),
            Proposition::Knowledge { action, sensed, preconditions, .. } => format!(
                "{} causes to know {}{}.",
                d.action_name(*action),
                d.fluent_name(*sensed),
                render_if_clause(d, preconditions)
            ),
            Proposition::NonDet { action, fluent, preconditions, .. } => format!(
                "{} may affect {}{}.",
                d.action_name(*action),
                d.fluent_name(*fluent),
                render_if_clause(d, preconditions)
            ),
        };
        out.push_str(&line);
        out.push('\n');
    }
    out
}

fn render_plan(d: &Domain, plan: &Plan) -> String {
    let mut items = Vec::new();
    let mut cur = plan;
    loop {
        match cur {
            Plan::Empty => break,
            Plan::Action(a, rest) => {
                items.push(d.action_name(*a).to_string());
                cur = rest;
            }
            Plan::IfThen(t, then_plan, rest) => {
                items.push(format!(
                    "if {} then {}",
                    render_literals(d, t.conjuncts()),
                    render_plan(d, then_plan)
                ));
                cur = rest;
            }
            Plan::IfThenElse(t, then_plan, else_plan, rest) => {
                items.push(format!(
                    "if {} then {} else {}",
                    render_literals(d, t.conjuncts()),
                    render_plan(d, then_plan),
                    render_plan(d, else_plan)
                ));
                cur = rest;
            }
            Plan::While(t, body, rest) => {
                items.push(format!(
                    "while {} do {}",
                    render_literals(d, t.conjuncts()),
                    render_plan(d, body)
                ));
                cur = rest;
            }
        }
    }
    format!("[{}]", items.join(", "))
}

/// Canonical text for a query; parsing it back yields an equal query.
pub fn render_query(d: &Domain, q: &Query) -> String {
    format!("{} after {}.", render_literals(d, q.goal.conjuncts()), render_plan(d, &q.plan))
}
