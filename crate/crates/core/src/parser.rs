//! Surface syntax for action descriptions (`.pbcp` files).
//!
//! The grammar is LL(2) and documented in `docs/grammar.md`. Sugar forms
//! (`default`, `inertial`, `constraint`, `causes`) are expanded while parsing,
//! so the result only contains the core law kinds of [`CausalLaw`].

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lang::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error, Serialize)]
#[error("{span}: {message}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub message: String,
    pub expected: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Ident(s) => write!(f, "`{}`", s),
            Tok::Number(s) => write!(f, "number `{}`", s),
            Tok::Sym(s) => write!(f, "`{}`", s),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    span: SourceSpan,
}

const SYMBOLS: [&str; 14] = ["!=", "&", "|", "~", "(", ")", "{", "}", ",", ":", "=", ".", "-", "+"];

fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let (mut i, mut line, mut line_start) = (0usize, 1usize, 0usize);
    let span = |start: usize, end: usize, line: usize, line_start: usize| SourceSpan {
        line,
        column: text[line_start..start].chars().count() + 1,
        start,
        end,
    };
    while i < bytes.len() {
        let c = bytes[i];
        if c == b'\n' {
            i += 1;
            line += 1;
            line_start = i;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c == b'%' {
            while i < bytes.len() && bytes[i] != b'\n' {
                i += 1;
            }
        } else if c.is_ascii_alphabetic() || c == b'_' {
            let s = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_' || bytes[i] == b'\'') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(text[s..i].to_string()), span: span(s, i, line, line_start) });
        } else if c.is_ascii_digit() {
            let s = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            // a dot followed by a digit continues the number; otherwise it ends the law
            if i + 1 < bytes.len() && bytes[i] == b'.' && bytes[i + 1].is_ascii_digit() {
                i += 1;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            out.push(Token { tok: Tok::Number(text[s..i].to_string()), span: span(s, i, line, line_start) });
        } else {
            let rest = &text[i..];
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(sym) => {
                    out.push(Token { tok: Tok::Sym(sym), span: span(i, i + sym.len(), line, line_start) });
                    i += sym.len();
                }
                None => {
                    let ch = rest.chars().next().unwrap();
                    return Err(ParseError {
                        span: span(i, i + ch.len_utf8(), line, line_start),
                        message: format!("unexpected character `{}`", ch),
                        expected: vec![],
                    });
                }
            }
        }
    }
    let end = text.len();
    // the end-of-input span is clamped so it still points inside the text
    let s = end.saturating_sub(1).min(end);
    out.push(Token { tok: Tok::Eof, span: SourceSpan { line, column: text[line_start..].chars().count() + 1, start: s, end } });
    Ok(out)
}

const KEYWORDS: [&str; 20] = [
    "sort", "variable", "fluent", "static", "action", "pf", "initpf", "caused", "if", "after", "initially", "reward",
    "default", "inertial", "constraint", "causes", "true", "false", "where", "boolean",
];

/// How an identifier in argument or value position is resolved.
#[derive(Default)]
struct Scope {
    variables: HashMap<String, String>,
    constants: HashMap<String, ConstantDecl>,
}

struct Parser<'t> {
    toks: Vec<Token>,
    pos: usize,
    scope: Scope,
    /// Accepts `N:` step prefixes in formulas (query mode only).
    timed: bool,
    _text: &'t str,
}

type PResult<T> = Result<T, ParseError>;

impl<'t> Parser<'t> {
    fn new(text: &'t str) -> PResult<Self> {
        Ok(Parser { toks: lex(text)?, pos: 0, scope: Scope::default(), timed: false, _text: text })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> SourceSpan {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &[&str]) -> PResult<T> {
        let exp: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        Err(ParseError {
            span: self.span(),
            message: format!("expected {}, found {}", exp.join(" or "), self.peek()),
            expected: exp,
        })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Tok::Sym(x) if *x == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Tok::Ident(x) if x == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn eat_kw(&mut self, k: &str) -> bool {
        if self.is_kw(k) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.error(&[&format!("`{}`", s)])
        }
    }

    /// A non-keyword identifier.
    fn name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            _ => self.error(&["identifier"]),
        }
    }

    /// An object or value name: identifier, `true`/`false`, or integer.
    fn value_name(&mut self) -> PResult<String> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "true" || s == "false" || !KEYWORDS.contains(&s.as_str()) => {
                self.bump();
                Ok(s)
            }
            Tok::Number(n) if n.chars().all(|c| c.is_ascii_digit()) => {
                self.bump();
                Ok(n)
            }
            _ => self.error(&["value"]),
        }
    }

    fn number(&mut self) -> PResult<f64> {
        let neg = if self.eat_sym("-") {
            true
        } else {
            self.eat_sym("+");
            false
        };
        match self.peek().clone() {
            Tok::Number(n) => {
                let sp = self.span();
                self.bump();
                let v: f64 = n.parse().map_err(|_| ParseError {
                    span: sp,
                    message: format!("malformed number `{}`", n),
                    expected: vec![],
                })?;
                Ok(if neg { -v } else { v })
            }
            _ => self.error(&["number"]),
        }
    }

    fn term(&mut self) -> PResult<Term> {
        let v = self.value_name()?;
        Ok(if self.scope.variables.contains_key(&v) { Term::Var(v) } else { Term::Obj(v) })
    }

    fn constant_ref(&mut self) -> PResult<ConstantRef> {
        let name = self.name()?;
        let mut args = Vec::new();
        if self.eat_sym("(") {
            loop {
                args.push(self.term()?);
                if !self.eat_sym(",") {
                    break;
                }
            }
            self.expect_sym(")")?;
        }
        Ok(ConstantRef { name, args })
    }

    // ---------------------------------------------------------------- formulas

    fn formula(&mut self) -> PResult<Formula<TimedOrPlain>> {
        let mut items = vec![self.conjunction()?];
        while self.eat_sym("|") {
            items.push(self.conjunction()?);
        }
        Ok(Formula::or(items))
    }

    fn conjunction(&mut self) -> PResult<Formula<TimedOrPlain>> {
        let mut items = vec![self.unary()?];
        while self.eat_sym("&") {
            items.push(self.unary()?);
        }
        Ok(Formula::and(items))
    }

    fn unary(&mut self) -> PResult<Formula<TimedOrPlain>> {
        if self.eat_sym("~") {
            // `~c` with a bare constant is the atom c=false; anything else is negation
            let bare_constant = matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()))
                && !self.ref_followed_by_eq();
            if bare_constant {
                let c = self.constant_ref()?;
                return Ok(Formula::Atom(TimedOrPlain { step: None, atom: Atom::new(c, Term::obj("false")) }));
            }
            return Ok(Formula::not(self.unary()?));
        }
        self.primary()
    }

    /// Is the constant reference starting here followed by `=`?
    fn ref_followed_by_eq(&self) -> bool {
        let mut k = 1;
        if matches!(self.peek_at(1), Tok::Sym("(")) {
            let mut depth = 0;
            loop {
                match self.peek_at(k) {
                    Tok::Sym("(") => depth += 1,
                    Tok::Sym(")") => {
                        depth -= 1;
                        if depth == 0 {
                            k += 1;
                            break;
                        }
                    }
                    Tok::Eof => return false,
                    _ => {}
                }
                k += 1;
            }
        }
        matches!(self.peek_at(k), Tok::Sym("="))
    }

    fn primary(&mut self) -> PResult<Formula<TimedOrPlain>> {
        if self.timed {
            if let Tok::Number(n) = self.peek().clone() {
                if matches!(self.peek_at(1), Tok::Sym(":")) {
                    let sp = self.span();
                    let step: usize = n.parse().map_err(|_| ParseError {
                        span: sp,
                        message: format!("malformed step `{}`", n),
                        expected: vec![],
                    })?;
                    self.bump();
                    self.bump();
                    let inner = self.unary()?;
                    return stamp(inner, step, sp);
                }
            }
        }
        if self.eat_sym("(") {
            let f = self.formula()?;
            self.expect_sym(")")?;
            return Ok(f);
        }
        if self.eat_kw("true") {
            return Ok(Formula::True);
        }
        if self.eat_kw("false") {
            return Ok(Formula::False);
        }
        match self.peek() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {}
            _ => return self.error(&["formula"]),
        }
        let c = self.constant_ref()?;
        let value = if self.eat_sym("=") { self.term()? } else { Term::obj("true") };
        Ok(Formula::Atom(TimedOrPlain { step: None, atom: Atom::new(c, value) }))
    }

    fn plain_formula(&mut self) -> PResult<Formula<Atom>> {
        let sp = self.span();
        let f = self.formula()?;
        f.try_map(&mut |a: &TimedOrPlain| match a.step {
            None => Ok(a.atom.clone()),
            Some(_) => Err(ParseError { span: sp, message: "step prefix not allowed here".into(), expected: vec![] }),
        })
    }

    // ------------------------------------------------------------ statements

    fn description(&mut self) -> PResult<ActionDescription> {
        let mut d = ActionDescription::default();
        while *self.peek() != Tok::Eof {
            self.statement(&mut d)?;
        }
        Ok(d)
    }

    fn statement(&mut self, d: &mut ActionDescription) -> PResult<()> {
        if self.eat_kw("sort") {
            let name = self.name()?;
            self.expect_sym("=")?;
            let objects = self.value_list()?;
            self.expect_sym(".")?;
            d.sorts.push(Sort { name, objects });
            return Ok(());
        }
        if self.eat_kw("variable") {
            let mut names = vec![self.name()?];
            while self.eat_sym(",") {
                names.push(self.name()?);
            }
            self.expect_sym(":")?;
            let sort = self.sort_name()?;
            self.expect_sym(".")?;
            for name in names {
                self.scope.variables.insert(name.clone(), sort.clone());
                d.variables.push(VariableDecl { name, sort: sort.clone() });
            }
            return Ok(());
        }
        let kind = if self.eat_kw("fluent") {
            Some(if self.eat_kw("static") { ConstantKind::StaticFluent } else { ConstantKind::RegularFluent })
        } else if self.eat_kw("action") {
            Some(ConstantKind::Action)
        } else if self.eat_kw("pf") {
            Some(ConstantKind::Pf)
        } else if self.eat_kw("initpf") {
            Some(ConstantKind::InitPf)
        } else {
            None
        };
        if let Some(kind) = kind {
            let mut sigs = Vec::new();
            loop {
                let name = self.name()?;
                let mut params = Vec::new();
                if self.eat_sym("(") {
                    loop {
                        params.push(self.sort_name()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(")")?;
                }
                sigs.push((name, params));
                if !self.eat_sym(",") {
                    break;
                }
            }
            let domain = if self.eat_sym(":") {
                if self.is_sym("{") {
                    Domain::Values(self.value_list()?)
                } else {
                    Domain::Sort(self.sort_name()?)
                }
            } else {
                Domain::boolean()
            };
            self.expect_sym(".")?;
            for (name, params) in sigs {
                let decl = ConstantDecl { name: name.clone(), params, kind, domain: domain.clone() };
                self.scope.constants.insert(name, decl.clone());
                d.constants.push(decl);
            }
            return Ok(());
        }
        let laws = self.law(d)?;
        let guards = if self.eat_kw("where") { self.guards()? } else { Vec::new() };
        self.expect_sym(".")?;
        for law in laws {
            d.laws.push(Law { law, guards: guards.clone() });
        }
        Ok(())
    }

    fn sort_name(&mut self) -> PResult<String> {
        if self.eat_kw("boolean") {
            Ok(BOOLEAN_SORT.to_string())
        } else {
            self.name()
        }
    }

    fn value_list(&mut self) -> PResult<Vec<String>> {
        self.expect_sym("{")?;
        let mut vs = vec![self.value_name()?];
        while self.eat_sym(",") {
            vs.push(self.value_name()?);
        }
        self.expect_sym("}")?;
        Ok(vs)
    }

    fn guards(&mut self) -> PResult<Vec<Guard>> {
        let mut out = Vec::new();
        loop {
            let left = self.term()?;
            let equal = if self.eat_sym("!=") {
                false
            } else if self.eat_sym("=") {
                true
            } else {
                return self.error(&["`!=`", "`=`"]);
            };
            let right = self.term()?;
            out.push(Guard { left, right, equal });
            if !self.eat_sym(",") {
                return Ok(out);
            }
        }
    }

    /// Optional `if F` and `after H` tails; missing parts are `true`.
    fn tails(&mut self, allow_after: bool) -> PResult<(Formula<Atom>, Option<Formula<Atom>>)> {
        let body = if self.eat_kw("if") { self.plain_formula()? } else { Formula::True };
        let after = if allow_after && self.eat_kw("after") { Some(self.plain_formula()?) } else { None };
        Ok((body, after))
    }

    fn head(&mut self) -> PResult<(Formula<Atom>, bool)> {
        if self.eat_sym("{") {
            let f = self.plain_formula()?;
            self.expect_sym("}")?;
            Ok((f, true))
        } else {
            Ok((self.plain_formula()?, false))
        }
    }

    fn law(&mut self, d: &ActionDescription) -> PResult<Vec<CausalLaw>> {
        if self.eat_kw("caused") {
            if self.is_distribution() {
                let constant = self.constant_ref()?;
                self.expect_sym("=")?;
                let distribution = self.distribution()?;
                let init = d.constant(&constant.name).map(|c| c.kind) == Some(ConstantKind::InitPf);
                return Ok(vec![if init {
                    CausalLaw::InitPfDeclaration { constant, distribution }
                } else {
                    CausalLaw::PfDeclaration { constant, distribution }
                }]);
            }
            let (head, choice) = self.head()?;
            let (body, after) = self.tails(true)?;
            return Ok(vec![make_law(head, body, after, choice)]);
        }
        if self.eat_kw("default") {
            let head = self.plain_formula()?;
            let (body, after) = self.tails(true)?;
            return Ok(vec![make_law(head, body, after, true)]);
        }
        if self.eat_kw("initially") {
            let head = self.plain_formula()?;
            let (body, _) = self.tails(false)?;
            return Ok(vec![CausalLaw::InitialStatic { head, body }]);
        }
        if self.eat_kw("reward") {
            let reward = self.number()?;
            let (head, after) = self.tails(true)?;
            return Ok(vec![CausalLaw::Utility { reward, head, after: after.unwrap_or(Formula::True) }]);
        }
        if self.eat_kw("constraint") {
            let f = self.plain_formula()?;
            let after = if self.eat_kw("after") { Some(self.plain_formula()?) } else { None };
            return Ok(vec![make_law(Formula::False, Formula::not(f), after, false)]);
        }
        if self.eat_kw("inertial") {
            let mut out = Vec::new();
            loop {
                let sp = self.span();
                let c = self.constant_ref()?;
                let decl = match self.scope.constants.get(&c.name) {
                    Some(decl) => decl,
                    None => {
                        return Err(ParseError {
                            span: sp,
                            message: format!("inertial constant {} must be declared first", c.name),
                            expected: vec![],
                        })
                    }
                };
                let values = match d.domain_values(decl) {
                    Some(vs) => vs,
                    None => {
                        return Err(ParseError {
                            span: sp,
                            message: format!("domain of {} is unknown", c.name),
                            expected: vec![],
                        })
                    }
                };
                for v in values {
                    let a = Formula::Atom(Atom::new(c.clone(), Term::obj(v)));
                    out.push(CausalLaw::Dynamic { head: a.clone(), body: Formula::True, after: a, choice: true });
                }
                if !self.eat_sym(",") {
                    return Ok(out);
                }
            }
        }
        // `X causes F if G`
        let actions = self.plain_formula()?;
        if !self.eat_kw("causes") {
            return self.error(&["`causes`"]);
        }
        let head = self.plain_formula()?;
        let cond = if self.eat_kw("if") { Some(self.plain_formula()?) } else { None };
        let after = match cond {
            Some(g) => Formula::And(vec![actions, g]),
            None => actions,
        };
        Ok(vec![CausalLaw::Dynamic { head, body: Formula::True, after, choice: false }])
    }

    fn is_distribution(&self) -> bool {
        if !matches!(self.peek(), Tok::Ident(s) if !KEYWORDS.contains(&s.as_str())) {
            return false;
        }
        let mut k = 1;
        if matches!(self.peek_at(1), Tok::Sym("(")) {
            while !matches!(self.peek_at(k), Tok::Sym(")") | Tok::Eof) {
                k += 1;
            }
            k += 1;
        }
        matches!(self.peek_at(k), Tok::Sym("=")) && matches!(self.peek_at(k + 1), Tok::Sym("{"))
    }

    fn distribution(&mut self) -> PResult<Vec<(String, f64)>> {
        self.expect_sym("{")?;
        let mut out = Vec::new();
        loop {
            let v = self.value_name()?;
            self.expect_sym(":")?;
            let p = self.number()?;
            out.push((v, p));
            if !self.eat_sym(",") {
                break;
            }
        }
        self.expect_sym("}")?;
        Ok(out)
    }
}

fn make_law(head: Formula<Atom>, body: Formula<Atom>, after: Option<Formula<Atom>>, choice: bool) -> CausalLaw {
    match after {
        Some(after) => CausalLaw::Dynamic { head, body, after, choice },
        None => CausalLaw::Static { head, body, choice },
    }
}

/// Atom as written in a query: with or without a step prefix.
#[derive(Clone, Debug, PartialEq)]
pub struct TimedOrPlain {
    pub step: Option<usize>,
    pub atom: Atom,
}

fn stamp(f: Formula<TimedOrPlain>, step: usize, sp: SourceSpan) -> PResult<Formula<TimedOrPlain>> {
    f.try_map(&mut |a: &TimedOrPlain| match a.step {
        None => Ok(TimedOrPlain { step: Some(step), atom: a.atom.clone() }),
        Some(_) => Err(ParseError { span: sp, message: "nested step prefix".into(), expected: vec![] }),
    })
}

/// Parses a complete action description.
pub fn parse_description(text: &str) -> Result<ActionDescription, ParseError> {
    Parser::new(text)?.description()
}

/// Parses an untimed formula; identifiers declared as variables in `d` become
/// variables, everything else is an object.
pub fn parse_formula(text: &str, d: &ActionDescription) -> Result<Formula<Atom>, ParseError> {
    let mut p = Parser::new(text)?;
    p.scope = scope_of(d);
    let f = p.plain_formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a formula in which every atom carries an `N:` step prefix, e.g.
/// `0:~P & 0:(A | B) & 1:P`.
pub fn parse_timed_formula(text: &str, d: &ActionDescription) -> Result<Formula<TimedAtom>, ParseError> {
    let mut p = Parser::new(text)?;
    p.scope = scope_of(d);
    p.timed = true;
    let sp = p.span();
    let f = p.formula()?;
    p.finish()?;
    f.try_map(&mut |a: &TimedOrPlain| match a.step {
        Some(step) => Ok(TimedAtom { step, atom: a.atom.clone() }),
        None => Err(ParseError {
            span: sp,
            message: format!("atom {} has no step prefix", a.atom),
            expected: vec!["`N:`".into()],
        }),
    })
}

impl Parser<'_> {
    fn finish(&self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(&["end of input"])
        }
    }
}

fn scope_of(d: &ActionDescription) -> Scope {
    Scope {
        variables: d.variables.iter().map(|v| (v.name.clone(), v.sort.clone())).collect(),
        constants: d.constants.iter().map(|c| (c.name.clone(), c.clone())).collect(),
    }
}

// ------------------------------------------------------------------ printing

/// Renders a formula in surface syntax; the output reparses to the same tree.
pub fn format_formula<A>(f: &Formula<A>, atom: &impl Fn(&A) -> String) -> String {
    match f {
        Formula::True => "true".into(),
        Formula::False => "false".into(),
        Formula::Atom(a) => atom(a),
        Formula::Not(g) => match g.as_ref() {
            Formula::Not(_) => format!("~{}", format_formula(g, atom)),
            _ => format!("~({})", format_formula(g, atom)),
        },
        Formula::And(gs) => join(gs, " & ", atom),
        Formula::Or(gs) => join(gs, " | ", atom),
    }
}

fn join<A>(gs: &[Formula<A>], sep: &str, atom: &impl Fn(&A) -> String) -> String {
    if gs.len() < 2 {
        // degenerate n-ary nodes have no surface form of their own
        let inner: Vec<String> = gs.iter().map(|g| format_formula(g, atom)).collect();
        return if sep.contains('&') {
            if gs.is_empty() { "true".into() } else { format!("({})", inner[0]) }
        } else if gs.is_empty() {
            "false".into()
        } else {
            format!("({})", inner[0])
        };
    }
    gs.iter()
        .map(|g| match g {
            Formula::And(_) | Formula::Or(_) => format!("({})", format_formula(g, atom)),
            _ => format_formula(g, atom),
        })
        .collect::<Vec<_>>()
        .join(sep)
}

fn atom_text(a: &Atom) -> String {
    a.to_string()
}

fn fmt_f(f: &Formula<Atom>) -> String {
    format_formula(f, &atom_text)
}

fn fmt_domain(d: &Domain) -> String {
    match d {
        Domain::Sort(s) => s.clone(),
        Domain::Values(vs) => format!("{{{}}}", vs.join(", ")),
    }
}

fn fmt_dist(c: &ConstantRef, dist: &[(String, f64)]) -> String {
    let entries: Vec<String> = dist.iter().map(|(v, p)| format!("{}: {}", v, p)).collect();
    format!("caused {} = {{{}}}", c, entries.join(", "))
}

/// Formats a single law (without the trailing period).
pub fn format_law(law: &CausalLaw) -> String {
    let head = |h: &Formula<Atom>, choice: bool| if choice { format!("{{{}}}", fmt_f(h)) } else { fmt_f(h) };
    let cond = |b: &Formula<Atom>| if *b == Formula::True { String::new() } else { format!(" if {}", fmt_f(b)) };
    match law {
        CausalLaw::Static { head: h, body, choice } => format!("caused {}{}", head(h, *choice), cond(body)),
        CausalLaw::Dynamic { head: h, body, after, choice } => {
            format!("caused {}{} after {}", head(h, *choice), cond(body), fmt_f(after))
        }
        CausalLaw::PfDeclaration { constant, distribution } | CausalLaw::InitPfDeclaration { constant, distribution } => {
            fmt_dist(constant, distribution)
        }
        CausalLaw::InitialStatic { head: h, body } => format!("initially {}{}", fmt_f(h), cond(body)),
        CausalLaw::Utility { reward, head: h, after } => {
            format!("reward {} if {} after {}", reward, fmt_f(h), fmt_f(after))
        }
    }
}

/// Prints `d` in core syntax (no sugar). Reparsing the output yields `d`.
pub fn format_description(d: &ActionDescription) -> String {
    let mut out = String::new();
    for s in &d.sorts {
        out.push_str(&format!("sort {} = {{{}}}.\n", s.name, s.objects.join(", ")));
    }
    for v in &d.variables {
        out.push_str(&format!("variable {} : {}.\n", v.name, v.sort));
    }
    for c in &d.constants {
        let params = if c.params.is_empty() { String::new() } else { format!("({})", c.params.join(", ")) };
        out.push_str(&format!("{} {}{} : {}.\n", c.kind.keyword(), c.name, params, fmt_domain(&c.domain)));
    }
    for law in &d.laws {
        out.push_str(&format_law(&law.law));
        if !law.guards.is_empty() {
            let gs: Vec<String> = law.guards.iter().map(Guard::to_string).collect();
            out.push_str(&format!(" where {}", gs.join(", ")));
        }
        out.push_str(".\n");
    }
    out
}
