//! Translation of a ground action description into a weighted program over a
//! timed multi-valued signature, plus the compile step that gets there.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::lang::*;
use crate::parser::format_formula;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error("{} validation error(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<Violation>),
    #[error(transparent)]
    Ground(#[from] GroundError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranslateError {
    #[error("unknown atom {0}")]
    UnknownAtom(String),
    #[error("atom {0} is not ground")]
    NotGround(String),
}

/// One ground constant of the description, e.g. `In(B1)` with values `R1, R2`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroundConstant {
    pub name: String,
    pub kind: ConstantKind,
    pub values: Vec<String>,
}

/// A validated, grounded description with its ground constants sorted by name.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CompiledDescription {
    pub description: ActionDescription,
    pub constants: Vec<GroundConstant>,
}

impl CompiledDescription {
    pub fn of_kind(&self, kinds: &[ConstantKind]) -> impl Iterator<Item = &GroundConstant> + '_ {
        let kinds = kinds.to_vec();
        self.constants.iter().filter(move |c| kinds.contains(&c.kind))
    }

    pub fn fluents(&self) -> Vec<&GroundConstant> {
        self.of_kind(&[ConstantKind::RegularFluent, ConstantKind::StaticFluent]).collect()
    }

    pub fn actions(&self) -> Vec<&GroundConstant> {
        self.of_kind(&[ConstantKind::Action]).collect()
    }

    pub fn pfs(&self) -> Vec<&GroundConstant> {
        self.of_kind(&[ConstantKind::Pf]).collect()
    }

    pub fn initpfs(&self) -> Vec<&GroundConstant> {
        self.of_kind(&[ConstantKind::InitPf]).collect()
    }

    pub fn constant(&self, name: &str) -> Option<&GroundConstant> {
        self.constants.iter().find(|c| c.name == name)
    }
}

/// Validates, grounds and indexes `d`.
pub fn compile(d: &ActionDescription) -> Result<CompiledDescription, CompileError> {
    let violations = validate(d);
    if !violations.is_empty() {
        return Err(CompileError::Invalid(violations));
    }
    let ground = ground_schematics(d)?;
    let mut constants = Vec::new();
    for decl in &ground.constants {
        let values = ground.domain_values(decl).unwrap_or_default();
        for args in argument_tuples(&ground, &decl.params) {
            constants.push(GroundConstant {
                name: ConstantRef::with_args(&decl.name, args).ground_name(),
                kind: decl.kind,
                values: values.clone(),
            });
        }
    }
    constants.sort_by(|a, b| a.name.cmp(&b.name));
    Ok(CompiledDescription { description: ground, constants })
}

// ------------------------------------------------------------------ programs

/// Atom of a ground program: variable index and value index.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct GAtom {
    pub var: usize,
    pub value: usize,
}

/// A multi-valued variable of the program signature.
///
/// `closed_world` marks a propositional atom (domain `false, true`) whose
/// `false` value is the default and needs no support.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SigVar {
    pub name: String,
    pub step: Option<usize>,
    pub kind: Option<ConstantKind>,
    pub values: Vec<String>,
    pub closed_world: bool,
}

impl SigVar {
    pub fn value_index(&self, v: &str) -> Option<usize> {
        self.values.iter().position(|x| x == v)
    }

    pub fn label(&self) -> String {
        match self.step {
            Some(i) => format!("{}:{}", i, self.name),
            None => self.name.clone(),
        }
    }
}

/// `utility(reward, step, id)`; `step` is absent outside action descriptions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UtilityAtom {
    pub reward: f64,
    pub step: Option<usize>,
    pub id: usize,
}

impl fmt::Display for UtilityAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.step {
            Some(s) => write!(f, "utility({}, {}, {})", self.reward, s, self.id),
            None => write!(f, "utility({}, {})", self.reward, self.id),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GroundSignature {
    pub vars: Vec<SigVar>,
    pub utilities: Vec<UtilityAtom>,
    #[serde(skip)]
    index: HashMap<(Option<usize>, String), usize>,
}

impl GroundSignature {
    pub fn add_var(&mut self, var: SigVar) -> usize {
        let i = self.vars.len();
        self.index.insert((var.step, var.name.clone()), i);
        self.vars.push(var);
        i
    }

    /// Adds a closed-world propositional atom and returns its `true` atom.
    pub fn add_prop(&mut self, name: impl Into<String>) -> GAtom {
        let var = self.add_var(SigVar {
            name: name.into(),
            step: None,
            kind: None,
            values: BOOLEAN_VALUES.iter().map(|s| s.to_string()).collect(),
            closed_world: true,
        });
        GAtom { var, value: 1 }
    }

    pub fn add_utility(&mut self, reward: f64, step: Option<usize>) -> usize {
        let id = self.utilities.len();
        self.utilities.push(UtilityAtom { reward, step, id });
        id
    }

    pub fn var(&self, step: Option<usize>, name: &str) -> Option<usize> {
        self.index.get(&(step, name.to_string())).copied()
    }

    pub fn atom(&self, step: Option<usize>, name: &str, value: &str) -> Option<GAtom> {
        let var = self.var(step, name)?;
        let value = self.vars[var].value_index(value)?;
        Some(GAtom { var, value })
    }

    pub fn atom_label(&self, a: GAtom) -> String {
        let v = &self.vars[a.var];
        format!("{}={}", v.label(), v.values[a.value])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Weight {
    Hard,
    /// Log-domain weight.
    Soft(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Head {
    Formula(Formula<GAtom>),
    Utility(usize),
}

/// Which part of the translation produced a rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleOrigin {
    Static,
    Dynamic,
    PfSoft,
    InitPfSoft,
    Initial,
    Choice,
    Uniqueness,
    Existence,
    Utility,
    Other,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeightedRule {
    pub weight: Weight,
    pub head: Head,
    pub body: Formula<GAtom>,
    pub origin: RuleOrigin,
}

impl WeightedRule {
    pub fn hard(head: Formula<GAtom>, body: Formula<GAtom>, origin: RuleOrigin) -> Self {
        WeightedRule { weight: Weight::Hard, head: Head::Formula(head), body, origin }
    }

    /// `{head}^ch <- body`, written as `head <- body & ~~head`.
    pub fn choice(head: Formula<GAtom>, body: Formula<GAtom>, origin: RuleOrigin) -> Self {
        let guard = Formula::not(Formula::not(head.clone()));
        let body = match body {
            Formula::True => guard,
            Formula::And(mut items) => {
                items.push(guard);
                Formula::And(items)
            }
            b => Formula::And(vec![b, guard]),
        };
        WeightedRule::hard(head, body, origin)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct GroundProgram {
    pub signature: GroundSignature,
    pub rules: Vec<WeightedRule>,
    /// Horizon the program was translated for, if any.
    pub horizon: Option<usize>,
}

impl GroundProgram {
    /// Maps a formula over timed atoms onto this program's signature.
    pub fn lower(&self, f: &Formula<TimedAtom>) -> Result<Formula<GAtom>, TranslateError> {
        f.try_map(&mut |t: &TimedAtom| {
            if !t.atom.is_ground() {
                return Err(TranslateError::NotGround(t.to_string()));
            }
            self.signature
                .atom(Some(t.step), &t.atom.constant.ground_name(), t.atom.value.name())
                .ok_or_else(|| TranslateError::UnknownAtom(t.to_string()))
        })
    }

    pub fn format_formula(&self, f: &Formula<GAtom>) -> String {
        format_formula(f, &|a: &GAtom| self.signature.atom_label(*a))
    }

    /// One rule per line, `hard:` or `soft(w):` prefixed.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            let prefix = match r.weight {
                Weight::Hard => "hard:".to_string(),
                Weight::Soft(w) => format!("soft({}):", w),
            };
            let head = match &r.head {
                Head::Formula(h) => self.format_formula(h),
                Head::Utility(k) => self.signature.utilities[*k].to_string(),
            };
            out.push_str(&format!("{} {} <- {}\n", prefix, head, self.format_formula(&r.body)));
        }
        out
    }

    pub fn counts(&self) -> RuleCounts {
        let mut c = RuleCounts::default();
        for r in &self.rules {
            *c.by_origin.entry(r.origin).or_insert(0) += 1;
        }
        c
    }
}

/// Number of emitted rules per translation category.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RuleCounts {
    pub by_origin: BTreeMap<RuleOrigin, usize>,
}

impl RuleCounts {
    pub fn get(&self, o: RuleOrigin) -> usize {
        self.by_origin.get(&o).copied().unwrap_or(0)
    }

    pub fn total(&self) -> usize {
        self.by_origin.values().sum()
    }
}

/// Which parts of the translation to emit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Part {
    /// The initial-state part together with the transition part.
    Full,
    /// The transition part only, without initpf constants and initial laws.
    TransitionsOnly,
}

/// The full translation of a compiled description for horizon `m`.
pub fn translate(c: &CompiledDescription, m: usize) -> GroundProgram {
    translate_part(c, m, Part::Full)
}

pub fn rule_count(c: &CompiledDescription, m: usize) -> RuleCounts {
    translate(c, m).counts()
}

/// Emits the program for horizon `m`.
///
/// Variables are laid out in branching order: initpf constants, then per step
/// regular fluents, static fluents, actions and pf constants.
pub fn translate_part(c: &CompiledDescription, m: usize, part: Part) -> GroundProgram {
    let mut sig = GroundSignature::default();
    let add = |sig: &mut GroundSignature, g: &GroundConstant, step: usize| {
        sig.add_var(SigVar {
            name: g.name.clone(),
            step: Some(step),
            kind: Some(g.kind),
            values: g.values.clone(),
            closed_world: false,
        })
    };
    if part == Part::Full {
        for g in c.initpfs() {
            add(&mut sig, g, 0);
        }
    }
    for i in 0..=m {
        for kind in [ConstantKind::RegularFluent, ConstantKind::StaticFluent] {
            for g in c.of_kind(&[kind]) {
                add(&mut sig, g, i);
            }
        }
        if i < m {
            for kind in [ConstantKind::Action, ConstantKind::Pf] {
                for g in c.of_kind(&[kind]) {
                    add(&mut sig, g, i);
                }
            }
        }
    }

    let mut rules = Vec::new();
    let at = |sig: &GroundSignature, f: &Formula<Atom>, i: usize| -> Formula<GAtom> {
        f.map(&mut |a: &Atom| {
            sig.atom(Some(i), &a.constant.ground_name(), a.value.name())
                .unwrap_or_else(|| panic!("atom {} missing at step {} of a validated description", a, i))
        })
    };
    let conj = |a: Formula<GAtom>, b: Formula<GAtom>| match (a, b) {
        (Formula::True, x) | (x, Formula::True) => x,
        (x, y) => Formula::And(vec![x, y]),
    };

    // choice rules for regular fluents at step 0 and for actions at every step
    for g in c.of_kind(&[ConstantKind::RegularFluent]) {
        let var = sig.var(Some(0), &g.name).unwrap();
        for value in 0..g.values.len() {
            rules.push(WeightedRule::choice(Formula::Atom(GAtom { var, value }), Formula::True, RuleOrigin::Choice));
        }
    }
    for i in 0..m {
        for g in c.actions() {
            let var = sig.var(Some(i), &g.name).unwrap();
            for value in 0..g.values.len() {
                rules.push(WeightedRule::choice(Formula::Atom(GAtom { var, value }), Formula::True, RuleOrigin::Choice));
            }
        }
    }
    // uniqueness and existence of values for every timed constant
    for (var, v) in sig.vars.iter().enumerate() {
        let n = v.values.len();
        for a in 0..n {
            for b in a + 1..n {
                let both = Formula::And(vec![Formula::Atom(GAtom { var, value: a }), Formula::Atom(GAtom { var, value: b })]);
                rules.push(WeightedRule::hard(Formula::False, both, RuleOrigin::Uniqueness));
            }
        }
        let some = Formula::or((0..n).map(|value| Formula::Atom(GAtom { var, value })).collect());
        rules.push(WeightedRule::hard(Formula::False, Formula::not(some), RuleOrigin::Existence));
    }

    let laws: Vec<&CausalLaw> = c.description.laws.iter().map(|l| &l.law).collect();
    let dist_rules = |sig: &GroundSignature, constant: &ConstantRef, dist: &[(String, f64)], i: usize, o: RuleOrigin| {
        dist.iter()
            .map(|(v, p)| {
                let a = sig.atom(Some(i), &constant.ground_name(), v).expect("declared value");
                WeightedRule { weight: Weight::Soft(p.ln()), head: Head::Formula(Formula::Atom(a)), body: Formula::True, origin: o }
            })
            .collect::<Vec<_>>()
    };

    if part == Part::Full {
        for law in &laws {
            match law {
                CausalLaw::InitPfDeclaration { constant, distribution } => {
                    rules.extend(dist_rules(&sig, constant, distribution, 0, RuleOrigin::InitPfSoft));
                }
                CausalLaw::InitialStatic { head, body } => {
                    let b = conj(Formula::not(at(&sig, head, 0)), at(&sig, body, 0));
                    rules.push(WeightedRule::hard(Formula::False, b, RuleOrigin::Initial));
                }
                _ => {}
            }
        }
    }

    for i in 0..=m {
        for law in &laws {
            if let CausalLaw::Static { head, body, choice } = law {
                let (h, b) = (at(&sig, head, i), at(&sig, body, i));
                rules.push(if *choice {
                    WeightedRule::choice(h, b, RuleOrigin::Static)
                } else {
                    WeightedRule::hard(h, b, RuleOrigin::Static)
                });
            }
        }
    }
    for i in 0..m {
        for law in &laws {
            match law {
                CausalLaw::Dynamic { head, body, after, choice } => {
                    let h = at(&sig, head, i + 1);
                    let b = conj(at(&sig, body, i + 1), at(&sig, after, i));
                    rules.push(if *choice {
                        WeightedRule::choice(h, b, RuleOrigin::Dynamic)
                    } else {
                        WeightedRule::hard(h, b, RuleOrigin::Dynamic)
                    });
                }
                CausalLaw::PfDeclaration { constant, distribution } => {
                    rules.extend(dist_rules(&sig, constant, distribution, i, RuleOrigin::PfSoft));
                }
                _ => {}
            }
        }
    }
    for i in 0..m {
        for law in &laws {
            if let CausalLaw::Utility { reward, head, after } = law {
                let id = sig.add_utility(*reward, Some(i + 1));
                let body = conj(at(&sig, head, i + 1), at(&sig, after, i));
                rules.push(WeightedRule { weight: Weight::Hard, head: Head::Utility(id), body, origin: RuleOrigin::Utility });
            }
        }
    }
    GroundProgram { signature: sig, rules, horizon: Some(m) }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::parse_description;

    fn compiled(text: &str) -> CompiledDescription {
        compile(&parse_description(text).unwrap()).unwrap()
    }

    #[test]
    fn minimal_emission_for_one_fluent() {
        let c = compiled("fluent F.");
        let p = translate(&c, 0);
        let counts = p.counts();
        assert_eq!(counts.get(RuleOrigin::Choice), 2);
        assert_eq!(counts.get(RuleOrigin::Uniqueness), 1);
        assert_eq!(counts.get(RuleOrigin::Existence), 1);
        assert_eq!(counts.total(), 4);
    }

    #[test]
    fn horizon_zero_has_no_dynamic_or_utility_rules() {
        let c = compiled("fluent P. action A. caused P after A. reward 1 if P after A.");
        let counts = rule_count(&c, 0);
        assert_eq!(counts.get(RuleOrigin::Dynamic), 0);
        assert_eq!(counts.get(RuleOrigin::Utility), 0);
    }

    #[test]
    fn pf_soft_weights_are_logs() {
        let c = compiled("pf Pf. caused Pf = {true: 0.8, false: 0.2}.");
        let p = translate(&c, 1);
        let soft: Vec<f64> = p
            .rules
            .iter()
            .filter_map(|r| match r.weight {
                Weight::Soft(w) => Some(w),
                Weight::Hard => None,
            })
            .collect();
        assert_eq!(soft, vec![0.8f64.ln(), 0.2f64.ln()]);
    }

    #[test]
    fn utility_ids_are_sequential_per_step() {
        let c = compiled("fluent P. action A. reward 3 if P after A. reward 4 if true after A.");
        let p = translate(&c, 2);
        let ids: Vec<(usize, Option<usize>)> = p.signature.utilities.iter().map(|u| (u.id, u.step)).collect();
        assert_eq!(ids, vec![(0, Some(1)), (1, Some(1)), (2, Some(2)), (3, Some(2))]);
    }

    #[test]
    fn transition_part_omits_initpf() {
        let c = compiled("fluent P. initpf I. caused I = {true: 0.5, false: 0.5}. initially P if I.");
        assert!(translate(&c, 0).signature.var(Some(0), "I").is_some());
        let p = translate_part(&c, 0, Part::TransitionsOnly);
        assert!(p.signature.var(Some(0), "I").is_none());
        assert_eq!(p.counts().get(RuleOrigin::Initial), 0);
    }

    #[test]
    fn compile_rejects_invalid() {
        let d = parse_description("pf X. caused X = {true: 1.0, false: 0.0}.").unwrap();
        assert!(matches!(compile(&d), Err(CompileError::Invalid(_))));
    }
}
