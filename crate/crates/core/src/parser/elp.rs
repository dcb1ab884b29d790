//! Text format for epistemic logic programs.
//!
//! One rule per statement, terminated by `.`:
//!
//! ```text
//! holds(f, s0) or holds(neg_f, s0).
//! holds(f, res(a, S)) :- holds(f, S), not ab(neg_f, a, S).
//! holds(true, res(a, S)) :- -K holds(f, S), K holds(f, res(a, S)).
//! ```
//!
//! Heads are `or`-separated atoms; body literals are atoms optionally
//! prefixed by `not` (default negation), `K`, or `-K`. Identifiers with an
//! uppercase initial are variables. `%` starts a line comment.
//!
//! Outside the supported fragment — and rejected with a dedicated error —
//! are classical negation (`-atom`), the `M` modality, and default negation
//! over subjective literals (`not K atom`).

use super::{ParseError, SourceSpan, TokenKind, TokenStream};
use crate::elp::{Atom, BodyLiteral, Program, Rule, Term};

/// Parse a program; `file` is used in error spans.
pub fn parse_elp(text: &str, file: &str) -> Result<Program, ParseError> {
    let mut ts = TokenStream::new(text, file)?;
    let mut rules = Vec::new();
    while !ts.at_end() {
        rules.push(parse_rule(&mut ts)?);
    }
    Ok(Program::new(rules))
}

/// Render in the same syntax `parse_elp` accepts, one rule per line.
pub fn render_program(program: &Program) -> String {
    program.to_string()
}

fn parse_rule(ts: &mut TokenStream) -> Result<Rule, ParseError> {
    let mut head = vec![parse_head_atom(ts)?];
    while ts.accept_word("or") {
        head.push(parse_head_atom(ts)?);
    }
    let mut body = Vec::new();
    if ts.accept(&TokenKind::ColonDash) {
        body.push(parse_body_literal(ts)?);
        while ts.accept(&TokenKind::Comma) {
            body.push(parse_body_literal(ts)?);
        }
    }
    ts.expect(&TokenKind::Period)?;
    Ok(Rule::new(head, body))
}

fn parse_head_atom(ts: &mut TokenStream) -> Result<Atom, ParseError> {
    if let Some(TokenKind::Dash) = ts.peek() {
        return Err(ParseError::unsupported(
            ts.span(),
            "classical negation is not supported; encode `-f` as a separate constant such as `neg_f`",
        ));
    }
    parse_atom(ts)
}

fn parse_body_literal(ts: &mut TokenStream) -> Result<BodyLiteral, ParseError> {
    if ts.peek_word("not") {
        let not_span = ts.span();
        ts.advance();
        if ts.peek_word("K") || ts.peek_word("M") || ts.peek() == Some(&TokenKind::Dash) {
            return Err(ParseError::unsupported(
                not_span,
                "default negation over a modal literal is not supported",
            ));
        }
        return Ok(BodyLiteral::naf(parse_atom(ts)?));
    }
    if ts.accept(&TokenKind::Dash) {
        if ts.accept_word("K") {
            return Ok(BodyLiteral::not_know(parse_atom(ts)?));
        }
        return Err(ParseError::unsupported(
            ts.prev_span(),
            "classical negation is not supported; encode `-f` as a separate constant such as `neg_f`",
        ));
    }
    if ts.accept_word("K") {
        return Ok(BodyLiteral::know(parse_atom(ts)?));
    }
    if ts.peek_word("M") {
        return Err(ParseError::unsupported(
            ts.span(),
            "the M modality is not supported",
        ));
    }
    Ok(BodyLiteral::pos(parse_atom(ts)?))
}

fn parse_atom(ts: &mut TokenStream) -> Result<Atom, ParseError> {
    let (name, span) = ts.expect_ident("an atom")?;
    check_predicate_name(&name, &span)?;
    let args = parse_arguments(ts)?;
    Ok(Atom::new(name, args))
}

fn check_predicate_name(name: &str, span: &SourceSpan) -> Result<(), ParseError> {
    if starts_uppercase(name) {
        return Err(ParseError::expecting(
            span.clone(),
            format!("`{name}` starts with an uppercase letter and reads as a variable"),
            &["a predicate name"],
        ));
    }
    Ok(())
}

fn parse_arguments(ts: &mut TokenStream) -> Result<Vec<Term>, ParseError> {
    let mut args = Vec::new();
    if ts.accept(&TokenKind::LParen) {
        args.push(parse_term(ts)?);
        while ts.accept(&TokenKind::Comma) {
            args.push(parse_term(ts)?);
        }
        ts.expect(&TokenKind::RParen)?;
    }
    Ok(args)
}

fn parse_term(ts: &mut TokenStream) -> Result<Term, ParseError> {
    let (name, span) = ts.expect_ident("a term")?;
    if starts_uppercase(&name) {
        if ts.peek() == Some(&TokenKind::LParen) {
            return Err(ParseError::expecting(
                span,
                format!("`{name}` is a variable and cannot take arguments"),
                &["a function symbol"],
            ));
        }
        return Ok(Term::Var(name));
    }
    if ts.peek() == Some(&TokenKind::LParen) {
        let args = parse_arguments(ts)?;
        Ok(Term::App(name, args))
    } else {
        Ok(Term::Const(name))
    }
}

fn starts_uppercase(name: &str) -> bool {
    name.chars().next().is_some_and(|c| c.is_uppercase())
}
