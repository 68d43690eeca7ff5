//! Domain model for probabilistic action descriptions: sorts, typed constants,
//! formulas and causal laws, plus validation and schematic grounding.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

/// Name of the built-in two-valued sort.
pub const BOOLEAN_SORT: &str = "boolean";
/// Values of the built-in Boolean sort, in canonical order.
pub const BOOLEAN_VALUES: [&str; 2] = ["false", "true"];

/// Tolerance used when checking that a declared distribution sums to one.
pub const PROBABILITY_SUM_TOLERANCE: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Sort {
    pub name: String,
    pub objects: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConstantKind {
    RegularFluent,
    StaticFluent,
    Action,
    Pf,
    InitPf,
}

impl ConstantKind {
    pub fn is_fluent(self) -> bool {
        matches!(self, ConstantKind::RegularFluent | ConstantKind::StaticFluent)
    }

    pub fn keyword(self) -> &'static str {
        match self {
            ConstantKind::RegularFluent => "fluent",
            ConstantKind::StaticFluent => "fluent static",
            ConstantKind::Action => "action",
            ConstantKind::Pf => "pf",
            ConstantKind::InitPf => "initpf",
        }
    }
}

/// Value domain of a constant: either a named sort or an inline value list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum Domain {
    Sort(String),
    Values(Vec<String>),
}

impl Domain {
    pub fn boolean() -> Self {
        Domain::Sort(BOOLEAN_SORT.to_string())
    }
}

/// A (possibly schematic) constant declaration such as `fluent In(block) : room`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstantDecl {
    pub name: String,
    pub params: Vec<String>,
    pub kind: ConstantKind,
    pub domain: Domain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VariableDecl {
    pub name: String,
    pub sort: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Term {
    Var(String),
    Obj(String),
}

impl Term {
    pub fn obj(name: impl Into<String>) -> Self {
        Term::Obj(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Obj(n) => n,
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Reference to a constant with its argument terms, e.g. `OnTopOf(x1, B2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConstantRef {
    pub name: String,
    pub args: Vec<Term>,
}

impl ConstantRef {
    pub fn new(name: impl Into<String>) -> Self {
        ConstantRef { name: name.into(), args: Vec::new() }
    }

    pub fn with_args(name: impl Into<String>, args: Vec<Term>) -> Self {
        ConstantRef { name: name.into(), args }
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(|t| !t.is_var())
    }

    /// Name of the ground constant this reference denotes, e.g. `In(B1)`.
    pub fn ground_name(&self) -> String {
        if self.args.is_empty() {
            self.name.clone()
        } else {
            let args: Vec<&str> = self.args.iter().map(Term::name).collect();
            format!("{}({})", self.name, args.join(","))
        }
    }
}

impl fmt::Display for ConstantRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)?;
        if !self.args.is_empty() {
            let args: Vec<&str> = self.args.iter().map(Term::name).collect();
            write!(f, "({})", args.join(", "))?;
        }
        Ok(())
    }
}

/// An atom `c = v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Atom {
    pub constant: ConstantRef,
    pub value: Term,
}

impl Atom {
    pub fn new(constant: ConstantRef, value: Term) -> Self {
        Atom { constant, value }
    }

    /// `c = true`
    pub fn holds(name: &str) -> Self {
        Atom::new(ConstantRef::new(name), Term::obj("true"))
    }

    /// `c = false`
    pub fn fails(name: &str) -> Self {
        Atom::new(ConstantRef::new(name), Term::obj("false"))
    }

    pub fn is_ground(&self) -> bool {
        self.constant.is_ground() && !self.value.is_var()
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Term::Obj(v) if v == "true" => write!(f, "{}", self.constant),
            Term::Obj(v) if v == "false" => write!(f, "~{}", self.constant),
            v => write!(f, "{} = {}", self.constant, v),
        }
    }
}

/// An atom prefixed with a time step, `i:c=v`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct TimedAtom {
    pub step: usize,
    pub atom: Atom,
}

impl fmt::Display for TimedAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.step, self.atom)
    }
}

/// Propositional formula over atoms of type `A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Vec<Formula<A>>),
    Or(Vec<Formula<A>>),
}

impl<A> Formula<A> {
    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula<A>) -> Self {
        Formula::Not(Box::new(f))
    }

    /// Conjunction; an empty list is `True` and a singleton is returned as is.
    pub fn and(mut items: Vec<Formula<A>>) -> Self {
        match items.len() {
            0 => Formula::True,
            1 => items.pop().unwrap(),
            _ => Formula::And(items),
        }
    }

    /// Disjunction; an empty list is `False` and a singleton is returned as is.
    pub fn or(mut items: Vec<Formula<A>>) -> Self {
        match items.len() {
            0 => Formula::False,
            1 => items.pop().unwrap(),
            _ => Formula::Or(items),
        }
    }

    /// `lhs -> rhs`, written as `~lhs | rhs`.
    pub fn implies(lhs: Formula<A>, rhs: Formula<A>) -> Self {
        Formula::Or(vec![Formula::not(lhs), rhs])
    }

    /// Number of nodes in the formula tree.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom(_) => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::And(fs) | Formula::Or(fs) => 1 + fs.iter().map(Formula::size).sum::<usize>(),
        }
    }

    pub fn atoms(&self) -> Vec<&A> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms<'a>(&'a self, out: &mut Vec<&'a A>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => out.push(a),
            Formula::Not(f) => f.collect_atoms(out),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().for_each(|f| f.collect_atoms(out)),
        }
    }

    pub fn map<B>(&self, f: &mut impl FnMut(&A) -> B) -> Formula<B> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Not(g) => Formula::Not(Box::new(g.map(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map(f)).collect()),
        }
    }

    pub fn try_map<B, E>(&self, f: &mut impl FnMut(&A) -> Result<B, E>) -> Result<Formula<B>, E> {
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)?),
            Formula::Not(g) => Formula::Not(Box::new(g.try_map(f)?)),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.try_map(f)).collect::<Result<_, _>>()?),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.try_map(f)).collect::<Result<_, _>>()?),
        })
    }

    /// Classical two-valued evaluation.
    pub fn eval(&self, truth: &impl Fn(&A) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => truth(a),
            Formula::Not(g) => !g.eval(truth),
            Formula::And(gs) => gs.iter().all(|g| g.eval(truth)),
            Formula::Or(gs) => gs.iter().any(|g| g.eval(truth)),
        }
    }
}

/// Inserts `step:` in front of every atom of an untimed formula.
///
/// Lifting is defined on untimed formulas only, so a lifted formula cannot be
/// lifted a second time:
///
/// ```compile_fail
/// use pbcplus::lang::{lift, Atom, Formula};
/// let once = lift(&Formula::Atom(Atom::holds("P")), 0);
/// let twice = lift(&once, 0);
/// ```
pub fn lift(formula: &Formula<Atom>, step: usize) -> Formula<TimedAtom> {
    formula.map(&mut |a| TimedAtom { step, atom: a.clone() })
}

/// Side condition on schematic variables, `x1 != x2` or `r = R2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Guard {
    pub left: Term,
    pub right: Term,
    pub equal: bool,
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = if self.equal { "=" } else { "!=" };
        write!(f, "{} {} {}", self.left, op, self.right)
    }
}

/// The six kinds of causal law after surface sugar has been expanded.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum CausalLaw {
    /// `caused F if G`; with `choice` the head is `{F}^ch`.
    Static { head: Formula<Atom>, body: Formula<Atom>, choice: bool },
    /// `caused F if G after H`; with `choice` the head is `{F}^ch`.
    Dynamic { head: Formula<Atom>, body: Formula<Atom>, after: Formula<Atom>, choice: bool },
    PfDeclaration { constant: ConstantRef, distribution: Vec<(String, f64)> },
    InitPfDeclaration { constant: ConstantRef, distribution: Vec<(String, f64)> },
    /// `initially F if G`
    InitialStatic { head: Formula<Atom>, body: Formula<Atom> },
    /// `reward v if F after G`
    Utility { reward: f64, head: Formula<Atom>, after: Formula<Atom> },
}

impl CausalLaw {
    pub fn kind_name(&self) -> &'static str {
        match self {
            CausalLaw::Static { .. } => "static law",
            CausalLaw::Dynamic { .. } => "fluent dynamic law",
            CausalLaw::PfDeclaration { .. } => "pf declaration",
            CausalLaw::InitPfDeclaration { .. } => "initpf declaration",
            CausalLaw::InitialStatic { .. } => "initial static law",
            CausalLaw::Utility { .. } => "utility law",
        }
    }

    fn formulas(&self) -> Vec<&Formula<Atom>> {
        match self {
            CausalLaw::Static { head, body, .. } | CausalLaw::InitialStatic { head, body } => vec![head, body],
            CausalLaw::Dynamic { head, body, after, .. } => vec![head, body, after],
            CausalLaw::Utility { head, after, .. } => vec![head, after],
            CausalLaw::PfDeclaration { .. } | CausalLaw::InitPfDeclaration { .. } => vec![],
        }
    }

    fn map_atoms(&self, f: &mut impl FnMut(&Atom) -> Atom, c: &mut impl FnMut(&ConstantRef) -> ConstantRef) -> CausalLaw {
        match self {
            CausalLaw::Static { head, body, choice } => {
                CausalLaw::Static { head: head.map(f), body: body.map(f), choice: *choice }
            }
            CausalLaw::Dynamic { head, body, after, choice } => CausalLaw::Dynamic {
                head: head.map(f),
                body: body.map(f),
                after: after.map(f),
                choice: *choice,
            },
            CausalLaw::PfDeclaration { constant, distribution } => {
                CausalLaw::PfDeclaration { constant: c(constant), distribution: distribution.clone() }
            }
            CausalLaw::InitPfDeclaration { constant, distribution } => {
                CausalLaw::InitPfDeclaration { constant: c(constant), distribution: distribution.clone() }
            }
            CausalLaw::InitialStatic { head, body } => CausalLaw::InitialStatic { head: head.map(f), body: body.map(f) },
            CausalLaw::Utility { reward, head, after } => {
                CausalLaw::Utility { reward: *reward, head: head.map(f), after: after.map(f) }
            }
        }
    }
}

/// A causal law together with its schematic side conditions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Law {
    pub law: CausalLaw,
    pub guards: Vec<Guard>,
}

impl Law {
    pub fn new(law: CausalLaw) -> Self {
        Law { law, guards: Vec::new() }
    }

    fn terms(&self) -> Vec<&Term> {
        let mut out = Vec::new();
        for f in self.law.formulas() {
            for a in f.atoms() {
                out.extend(a.constant.args.iter());
                out.push(&a.value);
            }
        }
        if let CausalLaw::PfDeclaration { constant, .. } | CausalLaw::InitPfDeclaration { constant, .. } = &self.law {
            out.extend(constant.args.iter());
        }
        for g in &self.guards {
            out.push(&g.left);
            out.push(&g.right);
        }
        out
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<&str> {
        let mut seen = Vec::new();
        for t in self.terms() {
            if let Term::Var(v) = t {
                if !seen.contains(&v.as_str()) {
                    seen.push(v.as_str());
                }
            }
        }
        seen
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ActionDescription {
    pub sorts: Vec<Sort>,
    pub variables: Vec<VariableDecl>,
    pub constants: Vec<ConstantDecl>,
    pub laws: Vec<Law>,
}

impl ActionDescription {
    pub fn sort(&self, name: &str) -> Option<&[String]> {
        if name == BOOLEAN_SORT {
            return Some(BOOLEAN_OBJECTS.as_slice());
        }
        self.sorts.iter().find(|s| s.name == name).map(|s| s.objects.as_slice())
    }

    pub fn constant(&self, name: &str) -> Option<&ConstantDecl> {
        self.constants.iter().find(|c| c.name == name)
    }

    pub fn variable(&self, name: &str) -> Option<&VariableDecl> {
        self.variables.iter().find(|v| v.name == name)
    }

    /// Values of a declared constant's domain, if the domain resolves.
    pub fn domain_values(&self, decl: &ConstantDecl) -> Option<Vec<String>> {
        match &decl.domain {
            Domain::Sort(s) => self.sort(s).map(<[String]>::to_vec),
            Domain::Values(vs) => Some(vs.clone()),
        }
    }

    pub fn is_ground(&self) -> bool {
        self.laws.iter().all(|l| l.variables().is_empty() && l.guards.is_empty())
    }
}

static BOOLEAN_OBJECTS: std::sync::LazyLock<Vec<String>> =
    std::sync::LazyLock::new(|| BOOLEAN_VALUES.iter().map(|s| s.to_string()).collect());

/// A violated syntactic restriction. `law` is the index of the offending law,
/// or `None` for declaration-level problems.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub law: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.law {
            Some(i) => write!(f, "law #{}: {}", i, self.message),
            None => f.write_str(&self.message),
        }
    }
}

/// Checks every declaration and law of `d`; returns all violations found.
pub fn validate(d: &ActionDescription) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut decl = |msg: String| out.push(Violation { law: None, message: msg });

    let mut sort_names = HashSet::new();
    for s in &d.sorts {
        if s.name == BOOLEAN_SORT || !sort_names.insert(s.name.as_str()) {
            decl(format!("sort {} declared more than once", s.name));
        }
        if s.objects.is_empty() {
            decl(format!("sort {} has no objects", s.name));
        }
        let mut seen = HashSet::new();
        for o in &s.objects {
            if !seen.insert(o) {
                decl(format!("object {} repeated in sort {}", o, s.name));
            }
        }
    }
    let mut var_names = HashSet::new();
    for v in &d.variables {
        if !var_names.insert(v.name.as_str()) {
            decl(format!("variable {} declared more than once", v.name));
        }
        if d.sort(&v.sort).is_none() {
            decl(format!("variable {} has unknown sort {}", v.name, v.sort));
        }
        if d.constant(&v.name).is_some() {
            decl(format!("variable {} clashes with a constant name", v.name));
        }
    }
    let mut const_names = HashSet::new();
    for c in &d.constants {
        if !const_names.insert(c.name.as_str()) {
            decl(format!("constant {} declared more than once", c.name));
        }
        for p in &c.params {
            if d.sort(p).is_none() {
                decl(format!("constant {} has parameter of unknown sort {}", c.name, p));
            }
        }
        match d.domain_values(c) {
            None => decl(format!("constant {} has unknown domain", c.name)),
            Some(vs) => {
                if vs.is_empty() {
                    decl(format!("constant {} has an empty domain", c.name));
                }
                let mut seen = HashSet::new();
                for v in &vs {
                    if !seen.insert(v) {
                        decl(format!("value {} repeated in domain of {}", v, c.name));
                    }
                }
                if c.kind == ConstantKind::Action && !is_boolean_domain(&vs) {
                    decl(format!("action constant {} must have the Boolean domain", c.name));
                }
            }
        }
    }

    for (i, law) in d.laws.iter().enumerate() {
        let mut report = |msg: String| out.push(Violation { law: Some(i), message: msg });
        check_law(d, law, &mut report);
    }
    check_declaration_coverage(d, &mut out);
    out
}

fn is_boolean_domain(vs: &[String]) -> bool {
    vs.len() == 2 && vs.iter().any(|v| v == "true") && vs.iter().any(|v| v == "false")
}

fn check_law(d: &ActionDescription, law: &Law, report: &mut impl FnMut(String)) {
    for f in law.law.formulas() {
        for a in f.atoms() {
            if let Err(e) = check_atom(d, a) {
                report(e);
            }
        }
    }
    for v in law.variables() {
        if d.variable(v).is_none() {
            report(format!("unbound variable {}", v));
        }
    }
    for g in &law.guards {
        for t in [&g.left, &g.right] {
            if let Term::Obj(o) = t {
                let known = d.sorts.iter().any(|s| s.objects.contains(o)) || BOOLEAN_VALUES.contains(&o.as_str());
                if !known {
                    report(format!("guard mentions unknown object {}", o));
                }
            }
        }
    }

    let kinds = |f: &Formula<Atom>| -> Vec<ConstantKind> {
        f.atoms().iter().filter_map(|a| d.constant(&a.constant.name).map(|c| c.kind)).collect()
    };
    let only = |f: &Formula<Atom>, allowed: &[ConstantKind]| kinds(f).iter().all(|k| allowed.contains(k));
    const FLUENTS: [ConstantKind; 2] = [ConstantKind::RegularFluent, ConstantKind::StaticFluent];

    match &law.law {
        CausalLaw::Static { head, body, .. } => {
            if !only(head, &FLUENTS) || !only(body, &FLUENTS) {
                report("static law must mention fluent constants only".into());
            }
        }
        CausalLaw::Dynamic { head, body, after, .. } => {
            if !only(head, &FLUENTS) || !only(body, &FLUENTS) {
                report("fluent dynamic law: head and if-part must be fluent formulas".into());
            }
            if kinds(head).contains(&ConstantKind::StaticFluent) {
                report("fluent dynamic law: head contains a statically determined constant".into());
            }
            if kinds(after).contains(&ConstantKind::InitPf) {
                report("fluent dynamic law: after-part contains an initpf constant".into());
            }
        }
        CausalLaw::PfDeclaration { constant, distribution } => {
            check_distribution(d, constant, distribution, ConstantKind::Pf, report);
        }
        CausalLaw::InitPfDeclaration { constant, distribution } => {
            check_distribution(d, constant, distribution, ConstantKind::InitPf, report);
        }
        CausalLaw::InitialStatic { head, body } => {
            if !only(head, &FLUENTS) {
                report("initial static law: head must be a fluent formula".into());
            }
            let k = kinds(body);
            if k.contains(&ConstantKind::Action) || k.contains(&ConstantKind::Pf) {
                report("initial static law: if-part contains action or pf constants".into());
            }
        }
        CausalLaw::Utility { head, after, .. } => {
            if !only(head, &FLUENTS) {
                report("utility law: if-part must mention fluent constants only".into());
            }
            if !only(after, &[ConstantKind::RegularFluent, ConstantKind::StaticFluent, ConstantKind::Action]) {
                report("utility law: after-part must mention fluent and action constants only".into());
            }
        }
    }
}

fn check_atom(d: &ActionDescription, a: &Atom) -> Result<(), String> {
    let decl = d.constant(&a.constant.name).ok_or_else(|| format!("undeclared constant {}", a.constant.name))?;
    check_args(d, decl, &a.constant)?;
    let domain = d.domain_values(decl).unwrap_or_default();
    match &a.value {
        Term::Obj(v) => {
            if !domain.contains(v) {
                return Err(format!("value {} not in domain of {}", v, a.constant.name));
            }
        }
        Term::Var(x) => {
            if let Some(objs) = d.variable(x).and_then(|v| d.sort(&v.sort)) {
                if !objs.iter().all(|o| domain.contains(o)) {
                    return Err(format!("variable {} ranges outside the domain of {}", x, a.constant.name));
                }
            }
        }
    }
    Ok(())
}

fn check_args(d: &ActionDescription, decl: &ConstantDecl, c: &ConstantRef) -> Result<(), String> {
    if decl.params.len() != c.args.len() {
        return Err(format!("constant {} expects {} arguments, got {}", decl.name, decl.params.len(), c.args.len()));
    }
    for (param, arg) in decl.params.iter().zip(&c.args) {
        let objs = d.sort(param).unwrap_or(&[]);
        match arg {
            Term::Obj(o) if !objs.contains(o) => {
                return Err(format!("argument {} of {} is not an object of sort {}", o, decl.name, param));
            }
            Term::Var(x) => {
                if let Some(v) = d.variable(x) {
                    let vobjs = d.sort(&v.sort).unwrap_or(&[]);
                    if !vobjs.iter().all(|o| objs.contains(o)) {
                        return Err(format!("variable {} ranges outside sort {} in {}", x, param, decl.name));
                    }
                }
            }
            _ => {}
        }
    }
    Ok(())
}

fn check_distribution(
    d: &ActionDescription,
    c: &ConstantRef,
    dist: &[(String, f64)],
    expected: ConstantKind,
    report: &mut impl FnMut(String),
) {
    let Some(decl) = d.constant(&c.name) else {
        report(format!("undeclared constant {}", c.name));
        return;
    };
    if decl.kind != expected {
        report(format!("{} is not declared as a {} constant", c.name, expected.keyword()));
    }
    if let Err(e) = check_args(d, decl, c) {
        report(e);
    }
    let domain = d.domain_values(decl).unwrap_or_default();
    let mut seen = HashSet::new();
    for (v, p) in dist {
        if !domain.contains(v) {
            report(format!("value {} not in domain of {}", v, c.name));
        }
        if !seen.insert(v) {
            report(format!("value {} listed twice for {}", v, c.name));
        }
        if !(*p > 0.0 && *p < 1.0) {
            report(format!("probability {} for {}={} not in (0,1)", p, c.name, v));
        }
    }
    if seen.len() != domain.len() {
        report(format!("distribution for {} does not cover its whole domain", c.name));
    }
    let sum: f64 = dist.iter().map(|(_, p)| p).sum();
    if (sum - 1.0).abs() > PROBABILITY_SUM_TOLERANCE {
        report(format!("probabilities for {} sum to {}, not 1", c.name, sum));
    }
}

/// Each ground pf/initpf constant must be declared by exactly one distribution.
fn check_declaration_coverage(d: &ActionDescription, out: &mut Vec<Violation>) {
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for decl in &d.constants {
        if matches!(decl.kind, ConstantKind::Pf | ConstantKind::InitPf) {
            for args in argument_tuples(d, &decl.params) {
                counts.insert(ConstantRef::with_args(&decl.name, args).ground_name(), 0);
            }
        }
    }
    let Ok(ground) = ground_schematics(d) else { return };
    for law in &ground.laws {
        if let CausalLaw::PfDeclaration { constant, .. } | CausalLaw::InitPfDeclaration { constant, .. } = &law.law {
            if let Some(n) = counts.get_mut(&constant.ground_name()) {
                *n += 1;
            }
        }
    }
    for (name, n) in counts {
        if n != 1 {
            out.push(Violation { law: None, message: format!("{} has {} distribution declarations, expected 1", name, n) });
        }
    }
}

/// All argument tuples for the given parameter sorts, in declaration order.
pub fn argument_tuples(d: &ActionDescription, params: &[String]) -> Vec<Vec<Term>> {
    let mut tuples = vec![Vec::new()];
    for p in params {
        let objs = d.sort(p).unwrap_or(&[]);
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                objs.iter().map(move |o| {
                    let mut t = t.clone();
                    t.push(Term::obj(o));
                    t
                })
            })
            .collect();
    }
    tuples
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroundError {
    #[error("law #{law}: unbound variable {var}")]
    UnboundVariable { law: usize, var: String },
    #[error("law #{law}: variable {var} has unknown sort {sort}")]
    UnknownSort { law: usize, var: String, sort: String },
}

/// Replaces every law containing variables by all of its instances over the
/// declared sorts, dropping instances that fail their guards.
pub fn ground_schematics(d: &ActionDescription) -> Result<ActionDescription, GroundError> {
    let mut laws = Vec::new();
    for (i, law) in d.laws.iter().enumerate() {
        let vars = law.variables();
        let mut domains = Vec::with_capacity(vars.len());
        for v in &vars {
            let decl = d.variable(v).ok_or_else(|| GroundError::UnboundVariable { law: i, var: v.to_string() })?;
            let objs = d.sort(&decl.sort).ok_or_else(|| GroundError::UnknownSort {
                law: i,
                var: v.to_string(),
                sort: decl.sort.clone(),
            })?;
            domains.push(objs);
        }
        let mut binding: HashMap<&str, &str> = HashMap::new();
        instantiate(law, &vars, &domains, 0, &mut binding, &mut laws);
    }
    Ok(ActionDescription { sorts: d.sorts.clone(), variables: d.variables.clone(), constants: d.constants.clone(), laws })
}

fn instantiate<'a>(
    law: &Law,
    vars: &[&'a str],
    domains: &[&'a [String]],
    k: usize,
    binding: &mut HashMap<&'a str, &'a str>,
    out: &mut Vec<Law>,
) {
    if k == vars.len() {
        let subst = |t: &Term| match t {
            Term::Var(v) => Term::Obj(binding[v.as_str()].to_string()),
            o => o.clone(),
        };
        let pass = law.guards.iter().all(|g| (subst(&g.left) == subst(&g.right)) == g.equal);
        if pass {
            let ground = law.law.map_atoms(
                &mut |a| Atom {
                    constant: ConstantRef { name: a.constant.name.clone(), args: a.constant.args.iter().map(subst).collect() },
                    value: subst(&a.value),
                },
                &mut |c| ConstantRef { name: c.name.clone(), args: c.args.iter().map(subst).collect() },
            );
            out.push(Law::new(ground));
        }
        return;
    }
    for o in domains[k] {
        binding.insert(vars[k], o.as_str());
        instantiate(law, vars, domains, k + 1, binding, out);
    }
    binding.remove(vars[k]);
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p() -> Formula<Atom> {
        Formula::Atom(Atom::holds("P"))
    }
    fn q() -> Formula<Atom> {
        Formula::Atom(Atom::holds("Q"))
    }

    fn simple_decls() -> ActionDescription {
        ActionDescription {
            constants: vec![
                ConstantDecl { name: "P".into(), params: vec![], kind: ConstantKind::RegularFluent, domain: Domain::boolean() },
                ConstantDecl { name: "S".into(), params: vec![], kind: ConstantKind::StaticFluent, domain: Domain::boolean() },
                ConstantDecl { name: "A".into(), params: vec![], kind: ConstantKind::Action, domain: Domain::boolean() },
                ConstantDecl { name: "Pf1".into(), params: vec![], kind: ConstantKind::Pf, domain: Domain::boolean() },
            ],
            ..Default::default()
        }
    }

    fn pf_law(p_true: f64, p_false: f64) -> Law {
        Law::new(CausalLaw::PfDeclaration {
            constant: ConstantRef::new("Pf1"),
            distribution: vec![("true".into(), p_true), ("false".into(), p_false)],
        })
    }

    #[test]
    fn lift_inserts_step() {
        assert_eq!(lift(&Formula::True, 3), Formula::True);
        let f = Formula::And(vec![p(), Formula::not(q())]);
        let lifted = lift(&f, 1);
        let expect = Formula::And(vec![
            Formula::Atom(TimedAtom { step: 1, atom: Atom::holds("P") }),
            Formula::not(Formula::Atom(TimedAtom { step: 1, atom: Atom::holds("Q") })),
        ]);
        assert_eq!(lifted, expect);
        assert_eq!(lifted.size(), f.size());
    }

    #[test]
    fn probability_one_is_rejected() {
        let mut d = simple_decls();
        d.laws.push(pf_law(1.0, 0.0));
        let v = validate(&d);
        assert!(v.iter().any(|v| v.message.contains("not in (0,1)")), "{:?}", v);
    }

    #[test]
    fn dynamic_head_with_static_fluent_is_rejected() {
        let mut d = simple_decls();
        d.laws.push(pf_law(0.5, 0.5));
        d.laws.push(Law::new(CausalLaw::Dynamic {
            head: Formula::Atom(Atom::holds("S")),
            body: Formula::True,
            after: Formula::Atom(Atom::holds("A")),
            choice: false,
        }));
        let v = validate(&d);
        assert_eq!(v.len(), 1, "{:?}", v);
        assert_eq!(v[0].law, Some(1));
        assert!(v[0].message.contains("statically determined"));
    }

    #[test]
    fn missing_pf_declaration_is_reported() {
        let d = simple_decls();
        let v = validate(&d);
        assert!(v.iter().any(|v| v.message.contains("Pf1 has 0 distribution")));
    }

    #[test]
    fn guard_excludes_all_instances_on_singleton_sort() {
        let mut d = ActionDescription {
            sorts: vec![Sort { name: "s".into(), objects: vec!["o".into()] }],
            variables: vec![
                VariableDecl { name: "x1".into(), sort: "s".into() },
                VariableDecl { name: "x2".into(), sort: "s".into() },
            ],
            constants: vec![ConstantDecl {
                name: "F".into(),
                params: vec!["s".into()],
                kind: ConstantKind::RegularFluent,
                domain: Domain::boolean(),
            }],
            laws: vec![],
        };
        let atom = |v: &str| {
            Formula::Atom(Atom::new(ConstantRef::with_args("F", vec![Term::Var(v.into())]), Term::obj("true")))
        };
        d.laws.push(Law {
            law: CausalLaw::Static {
                head: Formula::False,
                body: Formula::And(vec![atom("x1"), atom("x2")]),
                choice: false,
            },
            guards: vec![Guard { left: Term::Var("x1".into()), right: Term::Var("x2".into()), equal: false }],
        });
        let g = ground_schematics(&d).unwrap();
        assert!(g.laws.is_empty());
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let mut d = simple_decls();
        d.laws.push(Law::new(CausalLaw::Static {
            head: Formula::Atom(Atom::new(ConstantRef::new("P"), Term::Var("zz".into()))),
            body: Formula::True,
            choice: false,
        }));
        assert!(matches!(ground_schematics(&d), Err(GroundError::UnboundVariable { .. })));
    }
}
