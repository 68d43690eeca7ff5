//! Shared helpers for the integration tests: an independent brute-force
//! stable-model oracle and trajectory extraction.

#![allow(dead_code)]

use std::collections::BTreeMap;

use pbcplus::lang::{ConstantKind, Formula};
use pbcplus::translator::{CompiledDescription, GAtom, GroundProgram, Head, Weight};
use pbcplus::transition::TransitionSystem;

pub const TOL: f64 = 1e-9;

pub fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= TOL
}

pub fn simple() -> CompiledDescription {
    pbcplus::load(pbcplus::domains::SIMPLE).unwrap()
}

pub fn blocks(n: usize) -> CompiledDescription {
    pbcplus::load(pbcplus::domains::blocks(n).unwrap()).unwrap()
}

/// One stable model found by the oracle.
#[derive(Clone, Debug)]
pub struct OracleModel {
    pub values: Vec<usize>,
    pub probability: f64,
    pub utility: f64,
}

/// The atoms of a total assignment: closed-world variables contribute an
/// atom only when true.
fn atoms_of(p: &GroundProgram, values: &[usize]) -> Vec<GAtom> {
    values
        .iter()
        .enumerate()
        .filter(|(v, &x)| !(p.signature.vars[*v].closed_world && x == 0))
        .map(|(var, &value)| GAtom { var, value })
        .collect()
}

fn truth(values: &[usize], a: GAtom) -> bool {
    values[a.var] == a.value
}

/// Truth of atom `a` in the partial interpretation `j` (a set of atoms).
/// A closed-world `false` atom stands for the negation of the `true` atom.
fn in_j(p: &GroundProgram, j: &[GAtom], a: GAtom) -> bool {
    let v = &p.signature.vars[a.var];
    if v.closed_world && a.value == 0 {
        !j.contains(&GAtom { var: a.var, value: 1 })
    } else {
        j.contains(&a)
    }
}

fn eval_total(values: &[usize], f: &Formula<GAtom>) -> bool {
    f.eval(&|a: &GAtom| truth(values, *a))
}

/// `J |= F^I` evaluated directly from the definition of the reduct: a
/// subformula false in `I` becomes false; negations true in `I` become true.
fn reduct_holds(p: &GroundProgram, i: &[usize], j: &[GAtom], f: &Formula<GAtom>) -> bool {
    if !eval_total(i, f) {
        return false;
    }
    match f {
        Formula::True => true,
        Formula::False => false,
        Formula::Atom(a) => {
            let v = &p.signature.vars[a.var];
            if v.closed_world && a.value == 0 {
                // ~(x = true), true in I
                true
            } else {
                in_j(p, j, *a)
            }
        }
        Formula::Not(_) => true,
        Formula::And(gs) => gs.iter().all(|g| reduct_holds(p, i, j, g)),
        Formula::Or(gs) => gs.iter().any(|g| reduct_holds(p, i, j, g)),
    }
}

/// `(body -> head)^I` evaluated at `J`.
fn rule_reduct_holds(p: &GroundProgram, i: &[usize], j: &[GAtom], head: &Formula<GAtom>, body: &Formula<GAtom>) -> bool {
    let implication = Formula::Or(vec![Formula::not(body.clone()), head.clone()]);
    if !eval_total(i, &implication) {
        return false;
    }
    !reduct_holds(p, i, j, body) || reduct_holds(p, i, j, head)
}

/// Every stable model of `p` by enumerating all total assignments and, for
/// each, every subset of its true atoms.
pub fn brute_force(p: &GroundProgram) -> Vec<OracleModel> {
    let domains: Vec<usize> = p.signature.vars.iter().map(|v| v.values.len()).collect();
    let mut values = vec![0usize; domains.len()];
    let mut found: Vec<(Vec<usize>, f64, f64)> = Vec::new();
    loop {
        if let Some((w, u)) = check(p, &values) {
            found.push((values.clone(), w, u));
        }
        let mut k = 0;
        loop {
            if k == values.len() {
                let max = found.iter().map(|f| f.1).fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = found.iter().map(|f| (f.1 - max).exp()).sum();
                return found
                    .into_iter()
                    .map(|(values, w, utility)| OracleModel { values, probability: (w - max).exp() / z, utility })
                    .collect();
            }
            values[k] += 1;
            if values[k] < domains[k] {
                break;
            }
            values[k] = 0;
            k += 1;
        }
    }
}

/// Log-weight and utility of `values` if it is a stable model satisfying
/// every hard rule.
fn check(p: &GroundProgram, values: &[usize]) -> Option<(f64, f64)> {
    let mut weight = 0.0;
    let mut satisfied = Vec::new();
    for r in &p.rules {
        let Head::Formula(h) = &r.head else { continue };
        let ok = !eval_total(values, &r.body) || eval_total(values, h);
        match (r.weight, ok) {
            (Weight::Hard, false) => return None,
            (Weight::Soft(w), true) => weight += w,
            _ => {}
        }
        if ok {
            satisfied.push((h, &r.body));
        }
    }
    let atoms = atoms_of(p, values);
    let n = atoms.len();
    for mask in 0..(1u64 << n) - 1 {
        let j: Vec<GAtom> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| atoms[b]).collect();
        if satisfied.iter().all(|(h, b)| rule_reduct_holds(p, values, &j, h, b)) {
            return None;
        }
    }
    let mut utility = 0.0;
    for (id, u) in p.signature.utilities.iter().enumerate() {
        let on = p.rules.iter().any(|r| r.head == Head::Utility(id) && eval_total(values, &r.body));
        if on {
            utility += u.reward;
        }
    }
    Some((weight, utility))
}

/// Variable indices of `kinds` at `step`, sorted by constant name.
pub fn step_vars(p: &GroundProgram, step: usize, kinds: &[ConstantKind]) -> Vec<usize> {
    let mut vs: Vec<usize> = (0..p.signature.vars.len())
        .filter(|&i| {
            let v = &p.signature.vars[i];
            v.step == Some(step) && v.kind.is_some_and(|k| kinds.contains(&k))
        })
        .collect();
    vs.sort_by(|a, b| p.signature.vars[*a].name.cmp(&p.signature.vars[*b].name));
    vs
}

pub const FLUENT_KINDS: [ConstantKind; 2] = [ConstantKind::RegularFluent, ConstantKind::StaticFluent];

/// State and action indices visited by a model of the `m`-step program.
pub fn trajectory(ts: &TransitionSystem, p: &GroundProgram, m: usize, values: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let key = |vs: Vec<usize>| -> Vec<(String, String)> {
        vs.into_iter().map(|v| (p.signature.vars[v].name.clone(), p.signature.vars[v].values[values[v]].clone())).collect()
    };
    let states = (0..=m)
        .map(|i| {
            let k = key(step_vars(p, i, &FLUENT_KINDS));
            ts.states.iter().position(|s| s.entries == k).expect("model state is a state")
        })
        .collect();
    let actions = (0..m)
        .map(|i| {
            let k = key(step_vars(p, i, &[ConstantKind::Action]));
            ts.actions.iter().position(|a| a.entries == k).expect("model action is an action")
        })
        .collect();
    (states, actions)
}

/// Product of the declared probabilities of the pf and initpf values a
/// model assigns.
pub fn total_choice_product(c: &CompiledDescription, p: &GroundProgram, values: &[usize]) -> f64 {
    let mut prob = 1.0;
    for (i, v) in p.signature.vars.iter().enumerate() {
        if !matches!(v.kind, Some(ConstantKind::Pf) | Some(ConstantKind::InitPf)) {
            continue;
        }
        let value = &v.values[values[i]];
        prob *= declared_probability(c, &v.name, value);
    }
    prob
}

pub fn declared_probability(c: &CompiledDescription, name: &str, value: &str) -> f64 {
    use pbcplus::lang::CausalLaw;
    for l in &c.description.laws {
        if let CausalLaw::PfDeclaration { constant, distribution } | CausalLaw::InitPfDeclaration { constant, distribution } = &l.law {
            if constant.ground_name() == name {
                return distribution.iter().find(|(v, _)| v == value).map(|(_, p)| *p).unwrap_or(0.0);
            }
        }
    }
    panic!("no distribution for {}", name)
}

/// Groups records by a key, summing probability.
pub fn marginal<K: Ord>(items: impl IntoIterator<Item = (K, f64)>) -> BTreeMap<K, f64> {
    let mut out = BTreeMap::new();
    for (k, p) in items {
        *out.entry(k).or_insert(0.0) += p;
    }
    out
}

pub mod marketing;
pub mod properties;
