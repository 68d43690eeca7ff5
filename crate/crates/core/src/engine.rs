//! Exact stable-model enumeration for weighted programs.
//!
//! Search runs over per-variable value masks. Each node applies unit
//! propagation on hard rules and prunes values that have no possible support
//! (an unfounded-set check). Every leaf is a total assignment that is then
//! checked exactly: hard rules hold and the assignment is a minimal model of
//! the reduct of the rules it satisfies.

use serde::Serialize;
use thiserror::Error;

use crate::lang::Formula;
use crate::translator::{GAtom, GroundProgram, Head, Weight};

/// Absolute tolerance for probability comparisons.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EngineError {
    #[error("program has no stable model")]
    NoStableModel,
    #[error("condition has probability zero: {0}")]
    ZeroProbability(String),
    #[error("variable {0} has more than 64 values")]
    DomainTooLarge(String),
}

/// A total assignment (value index per variable) plus the truth of each
/// utility atom.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Interpretation {
    pub values: Vec<usize>,
    pub utilities: Vec<bool>,
}

impl Interpretation {
    pub fn holds(&self, a: GAtom) -> bool {
        self.values[a.var] == a.value
    }

    pub fn satisfies(&self, f: &Formula<GAtom>) -> bool {
        f.eval(&|a: &GAtom| self.holds(*a))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StableModelRecord {
    pub interpretation: Interpretation,
    pub log_weight: f64,
    pub probability: f64,
    pub utility: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QueryResult {
    pub probability: f64,
    pub support: usize,
}

// ------------------------------------------------------------ compiled form

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum T3 {
    F,
    U,
    T,
}

#[derive(Clone, Debug)]
struct CRule {
    hard: bool,
    weight: f64,
    head: Option<Formula<GAtom>>,
    utility: Option<usize>,
    body: Formula<GAtom>,
    /// Atoms that occur in the head outside negation.
    head_support: Vec<GAtom>,
}

struct Compiled {
    sizes: Vec<usize>,
    closed: Vec<bool>,
    rules: Vec<CRule>,
    /// Rules mentioning each variable, for propagation.
    occurs: Vec<Vec<usize>>,
    /// Rules that can support some atom.
    supporters: Vec<usize>,
    utilities: Vec<f64>,
}

/// Replaces `x=false` for a closed-world `x` by `~(x=true)` so that only
/// true atoms of such variables take part in minimality.
fn normalize(f: &Formula<GAtom>, closed: &[bool]) -> Formula<GAtom> {
    match f {
        Formula::Atom(a) if closed[a.var] && a.value == 0 => Formula::not(Formula::Atom(GAtom { var: a.var, value: 1 })),
        Formula::Atom(_) | Formula::True | Formula::False => f.clone(),
        Formula::Not(g) => Formula::not(normalize(g, closed)),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| normalize(g, closed)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| normalize(g, closed)).collect()),
    }
}

fn positive_atoms(f: &Formula<GAtom>, out: &mut Vec<GAtom>) {
    match f {
        Formula::Atom(a) => out.push(*a),
        Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| positive_atoms(g, out)),
        Formula::Not(_) | Formula::True | Formula::False => {}
    }
}

impl Compiled {
    fn new(p: &GroundProgram, extra: &[Formula<GAtom>]) -> Result<Self, EngineError> {
        let sig = &p.signature;
        for v in &sig.vars {
            if v.values.len() > 64 {
                return Err(EngineError::DomainTooLarge(v.label()));
            }
        }
        let closed: Vec<bool> = sig.vars.iter().map(|v| v.closed_world).collect();
        let mut rules = Vec::with_capacity(p.rules.len() + extra.len());
        for r in &p.rules {
            let (hard, weight) = match r.weight {
                Weight::Hard => (true, 0.0),
                Weight::Soft(w) => (false, w),
            };
            let body = normalize(&r.body, &closed);
            let (head, utility) = match &r.head {
                Head::Formula(h) => (Some(normalize(h, &closed)), None),
                Head::Utility(k) => (None, Some(*k)),
            };
            let mut head_support = Vec::new();
            if let Some(h) = &head {
                positive_atoms(h, &mut head_support);
            }
            rules.push(CRule { hard, weight, head, utility, body, head_support });
        }
        for e in extra {
            let body = Formula::not(normalize(e, &closed));
            rules.push(CRule { hard: true, weight: 0.0, head: Some(Formula::False), utility: None, body, head_support: vec![] });
        }
        let mut occurs = vec![Vec::new(); sig.vars.len()];
        for (i, r) in rules.iter().enumerate() {
            if !r.hard || r.head.is_none() {
                continue;
            }
            let mut vars: Vec<usize> = r.body.atoms().iter().map(|a| a.var).collect();
            vars.extend(r.head.as_ref().unwrap().atoms().iter().map(|a| a.var));
            vars.sort_unstable();
            vars.dedup();
            for v in vars {
                occurs[v].push(i);
            }
        }
        let supporters = (0..rules.len()).filter(|&i| !rules[i].head_support.is_empty()).collect();
        Ok(Compiled {
            sizes: sig.vars.iter().map(|v| v.values.len()).collect(),
            closed,
            rules,
            occurs,
            supporters,
            utilities: sig.utilities.iter().map(|u| u.reward).collect(),
        })
    }
}

// ------------------------------------------------------- three-valued logic

fn eval3(f: &Formula<GAtom>, masks: &[u64]) -> T3 {
    match f {
        Formula::True => T3::T,
        Formula::False => T3::F,
        Formula::Atom(a) => {
            let m = masks[a.var];
            let bit = 1u64 << a.value;
            if m & bit == 0 {
                T3::F
            } else if m == bit {
                T3::T
            } else {
                T3::U
            }
        }
        Formula::Not(g) => match eval3(g, masks) {
            T3::T => T3::F,
            T3::F => T3::T,
            T3::U => T3::U,
        },
        Formula::And(gs) => {
            let mut r = T3::T;
            for g in gs {
                match eval3(g, masks) {
                    T3::F => return T3::F,
                    T3::U => r = T3::U,
                    T3::T => {}
                }
            }
            r
        }
        Formula::Or(gs) => {
            let mut r = T3::F;
            for g in gs {
                match eval3(g, masks) {
                    T3::T => return T3::T,
                    T3::U => r = T3::U,
                    T3::F => {}
                }
            }
            r
        }
    }
}

/// Three-valued evaluation where atoms outside negation count as possibly
/// true only if they are in `support`.
fn eval_supported(f: &Formula<GAtom>, masks: &[u64], support: &[u64]) -> T3 {
    match f {
        Formula::Atom(a) => {
            let bit = 1u64 << a.value;
            if masks[a.var] & support[a.var] & bit == 0 {
                T3::F
            } else if masks[a.var] == bit {
                T3::T
            } else {
                T3::U
            }
        }
        Formula::Not(_) | Formula::True | Formula::False => eval3(f, masks),
        Formula::And(gs) => {
            let mut r = T3::T;
            for g in gs {
                match eval_supported(g, masks, support) {
                    T3::F => return T3::F,
                    T3::U => r = T3::U,
                    T3::T => {}
                }
            }
            r
        }
        Formula::Or(gs) => {
            let mut r = T3::F;
            for g in gs {
                match eval_supported(g, masks, support) {
                    T3::T => return T3::T,
                    T3::U => r = T3::U,
                    T3::F => {}
                }
            }
            r
        }
    }
}

struct Conflict;

/// Narrows `masks` so that `f` evaluates to `want`, where this is forced.
fn force(f: &Formula<GAtom>, want: bool, masks: &mut [u64], changed: &mut Vec<usize>) -> Result<(), Conflict> {
    match f {
        Formula::True => {
            if want {
                Ok(())
            } else {
                Err(Conflict)
            }
        }
        Formula::False => {
            if want {
                Err(Conflict)
            } else {
                Ok(())
            }
        }
        Formula::Atom(a) => {
            let bit = 1u64 << a.value;
            let m = masks[a.var];
            let next = if want { m & bit } else { m & !bit };
            if next == 0 {
                return Err(Conflict);
            }
            if next != m {
                masks[a.var] = next;
                changed.push(a.var);
            }
            Ok(())
        }
        Formula::Not(g) => force(g, !want, masks, changed),
        Formula::And(gs) | Formula::Or(gs) => {
            let is_and = matches!(f, Formula::And(_));
            if is_and == want {
                // every item must take the value `want`
                for g in gs {
                    force(g, want, masks, changed)?;
                }
                return Ok(());
            }
            // at least one item must take `want`; force it only if it is the last candidate
            let target = if want { T3::T } else { T3::F };
            let mut open = None;
            let mut n_open = 0;
            for (i, g) in gs.iter().enumerate() {
                match eval3(g, masks) {
                    t if t == target => return Ok(()),
                    T3::U => {
                        n_open += 1;
                        open = Some(i);
                    }
                    _ => {}
                }
            }
            match (n_open, open) {
                (0, _) => Err(Conflict),
                (1, Some(i)) => force(&gs[i], want, masks, changed),
                _ => Ok(()),
            }
        }
    }
}

// ------------------------------------------------------------------ search

struct Search<'a> {
    c: &'a Compiled,
    out: Vec<(Vec<usize>, f64, Vec<bool>)>,
    queued: Vec<bool>,
}

impl<'a> Search<'a> {
    fn propagate(&mut self, masks: &mut [u64], seed: Option<&[usize]>) -> Result<(), Conflict> {
        let rules = &self.c.rules;
        let mut queue: Vec<usize> = match seed {
            None => (0..rules.len()).filter(|&i| rules[i].hard && rules[i].head.is_some()).collect(),
            Some(vars) => {
                let mut q = Vec::new();
                for &v in vars {
                    q.extend(self.c.occurs[v].iter().copied());
                }
                q
            }
        };
        self.queued.iter_mut().for_each(|q| *q = false);
        queue.retain(|&i| !std::mem::replace(&mut self.queued[i], true));
        let mut changed = Vec::new();
        while let Some(i) = queue.pop() {
            self.queued[i] = false;
            let r = &rules[i];
            let head = r.head.as_ref().unwrap();
            let b = eval3(&r.body, masks);
            if b == T3::F {
                continue;
            }
            let h = eval3(head, masks);
            if b == T3::T && h != T3::T {
                force(head, true, masks, &mut changed)?;
            } else if h == T3::F {
                force(&r.body, false, masks, &mut changed)?;
            }
            for v in changed.drain(..) {
                for &j in &self.c.occurs[v] {
                    if !self.queued[j] {
                        self.queued[j] = true;
                        queue.push(j);
                    }
                }
            }
        }
        Ok(())
    }

    /// Removes values that cannot be supported; returns the variables changed.
    fn prune_unsupported(&self, masks: &mut [u64]) -> Result<Vec<usize>, Conflict> {
        let c = self.c;
        let mut support: Vec<u64> = c.closed.iter().map(|&cl| if cl { 1 } else { 0 }).collect();
        let mut fired = vec![false; c.rules.len()];
        loop {
            let mut grew = false;
            for &i in &c.supporters {
                if fired[i] {
                    continue;
                }
                let r = &c.rules[i];
                if eval_supported(&r.body, masks, &support) == T3::F {
                    continue;
                }
                fired[i] = true;
                for a in &r.head_support {
                    let bit = 1u64 << a.value;
                    if masks[a.var] & bit != 0 && support[a.var] & bit == 0 {
                        support[a.var] |= bit;
                        grew = true;
                    }
                }
            }
            if !grew {
                break;
            }
        }
        let mut changed = Vec::new();
        for (v, m) in masks.iter_mut().enumerate() {
            let next = *m & support[v];
            if next == 0 {
                return Err(Conflict);
            }
            if next != *m {
                *m = next;
                changed.push(v);
            }
        }
        Ok(changed)
    }

    fn settle(&mut self, masks: &mut [u64], seed: Option<&[usize]>) -> Result<(), Conflict> {
        self.propagate(masks, seed)?;
        loop {
            let changed = self.prune_unsupported(masks)?;
            if changed.is_empty() {
                return Ok(());
            }
            self.propagate(masks, Some(&changed))?;
        }
    }

    fn run(&mut self, masks: &mut Vec<u64>, seed: Option<&[usize]>) {
        if self.settle(masks, seed).is_err() {
            return;
        }
        match masks.iter().position(|m| m.count_ones() > 1) {
            None => {
                let values: Vec<usize> = masks.iter().map(|m| m.trailing_zeros() as usize).collect();
                if let Some((w, utils)) = check_leaf(self.c, &values) {
                    self.out.push((values, w, utils));
                }
            }
            Some(var) => {
                let m = masks[var];
                for value in 0..self.c.sizes[var] {
                    if m & (1u64 << value) == 0 {
                        continue;
                    }
                    let mut child = masks.clone();
                    child[var] = 1u64 << value;
                    self.run(&mut child, Some(&[var]));
                }
            }
        }
    }
}

/// Exact check of a total assignment; returns its log-weight and utility
/// atoms when it is a stable model.
fn check_leaf(c: &Compiled, values: &[usize]) -> Option<(f64, Vec<bool>)> {
    let holds = |a: &GAtom| values[a.var] == a.value;
    let mut log_weight = 0.0;
    let mut reduct: Vec<(Formula<GAtom>, Vec<Vec<GAtom>>)> = Vec::new();
    for r in &c.rules {
        let Some(head) = &r.head else { continue };
        let body_true = r.body.eval(&holds);
        let sat = !body_true || head.eval(&holds);
        if !sat {
            if r.hard {
                return None;
            }
            continue;
        }
        if !r.hard {
            log_weight += r.weight;
        }
        if body_true {
            let b = reduce(&r.body, &holds);
            let h = dnf(&reduce(head, &holds));
            reduct.push((b, h));
        }
    }
    let in_model: Vec<bool> = values.iter().enumerate().map(|(v, &x)| !(c.closed[v] && x == 0)).collect();
    let total = in_model.iter().filter(|&&b| b).count();
    let mut j = vec![false; values.len()];
    if has_smaller_model(&reduct, &mut j, 0, total) {
        return None;
    }
    let mut utils = vec![false; c.utilities.len()];
    for r in &c.rules {
        if let Some(k) = r.utility {
            if r.body.eval(&holds) {
                utils[k] = true;
            }
        }
    }
    Some((log_weight, utils))
}

/// The reduct of `f` relative to the assignment `holds`: subformulas false
/// there become `false`, negations true there become `true`.
fn reduce(f: &Formula<GAtom>, holds: &impl Fn(&GAtom) -> bool) -> Formula<GAtom> {
    if !f.eval(holds) {
        return Formula::False;
    }
    match f {
        Formula::Atom(_) | Formula::True | Formula::False => f.clone(),
        Formula::Not(_) => Formula::True,
        Formula::And(gs) => Formula::And(gs.iter().map(|g| reduce(g, holds)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| reduce(g, holds)).collect()),
    }
}

/// Disjunctive normal form of a negation-free formula.
fn dnf(f: &Formula<GAtom>) -> Vec<Vec<GAtom>> {
    match f {
        Formula::True => vec![vec![]],
        Formula::False => vec![],
        Formula::Atom(a) => vec![vec![*a]],
        Formula::Not(_) => unreachable!("reduct formulas are negation-free"),
        Formula::Or(gs) => gs.iter().flat_map(dnf).collect(),
        Formula::And(gs) => {
            let mut acc = vec![vec![]];
            for g in gs {
                let d = dnf(g);
                acc = acc
                    .iter()
                    .flat_map(|c: &Vec<GAtom>| {
                        d.iter().map(move |e| {
                            let mut n = c.clone();
                            n.extend(e.iter().copied());
                            n
                        })
                    })
                    .collect();
            }
            acc
        }
    }
}

/// Closes `j` under the reduct, branching over disjunctive heads. Returns
/// true if some closure is a model with fewer than `total` atoms.
fn has_smaller_model(reduct: &[(Formula<GAtom>, Vec<Vec<GAtom>>)], j: &mut Vec<bool>, size: usize, total: usize) -> bool {
    let mut size = size;
    loop {
        let mut progress = false;
        for (body, head) in reduct {
            if !body.eval(&|a: &GAtom| j[a.var]) {
                continue;
            }
            if head.iter().any(|conj| conj.iter().all(|a| j[a.var])) {
                continue;
            }
            if head.len() == 1 {
                for a in &head[0] {
                    if !j[a.var] {
                        j[a.var] = true;
                        size += 1;
                    }
                }
                progress = true;
            } else {
                for conj in head {
                    let mut branch = j.clone();
                    let mut s = size;
                    for a in conj {
                        if !branch[a.var] {
                            branch[a.var] = true;
                            s += 1;
                        }
                    }
                    if has_smaller_model(reduct, &mut branch, s, total) {
                        return true;
                    }
                }
                return false;
            }
        }
        if !progress {
            return size < total;
        }
    }
}

// ------------------------------------------------------------- public API

fn enumerate(p: &GroundProgram, evidence: &[Formula<GAtom>]) -> Result<Vec<StableModelRecord>, EngineError> {
    let c = Compiled::new(p, evidence)?;
    let mut masks: Vec<u64> = c.sizes.iter().map(|&n| if n == 64 { u64::MAX } else { (1u64 << n) - 1 }).collect();
    let mut s = Search { c: &c, out: Vec::new(), queued: vec![false; c.rules.len()] };
    s.run(&mut masks, None);
    let mut raw = s.out;
    raw.sort_by(|a, b| a.0.cmp(&b.0));
    let max = raw.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = raw.iter().map(|r| (r.1 - max).exp()).sum();
    Ok(raw
        .into_iter()
        .map(|(values, w, utilities)| {
            let utility = utilities.iter().zip(&c.utilities).filter(|(t, _)| **t).map(|(_, u)| u).sum();
            StableModelRecord {
                probability: (w - max).exp() / z,
                log_weight: w,
                utility,
                interpretation: Interpretation { values, utilities },
            }
        })
        .collect())
}

/// All stable models of `p` that satisfy every hard rule, with normalized
/// probabilities, in canonical order.
pub fn enumerate_stable_models(p: &GroundProgram) -> Result<Vec<StableModelRecord>, EngineError> {
    let models = enumerate(p, &[])?;
    if models.is_empty() {
        return Err(EngineError::NoStableModel);
    }
    Ok(models)
}

/// Stable models of `p` satisfying `condition`, with probabilities
/// renormalized over them (the conditional distribution).
pub fn enumerate_conditioned(p: &GroundProgram, condition: &Formula<GAtom>) -> Result<Vec<StableModelRecord>, EngineError> {
    let models = enumerate(p, std::slice::from_ref(condition))?;
    if models.is_empty() {
        return Err(EngineError::ZeroProbability(p.format_formula(condition)));
    }
    Ok(models)
}

/// `P(query | evidence)`.
pub fn query_probability(p: &GroundProgram, query: &Formula<GAtom>, evidence: &Formula<GAtom>) -> Result<QueryResult, EngineError> {
    let models = enumerate_conditioned(p, evidence)?;
    let mut probability = 0.0;
    let mut support = 0;
    for m in &models {
        if m.interpretation.satisfies(query) {
            probability += m.probability;
            support += 1;
        }
    }
    Ok(QueryResult { probability, support })
}

/// `E[U(condition)]`: expected utility over stable models satisfying `condition`.
pub fn expected_utility(p: &GroundProgram, condition: &Formula<GAtom>) -> Result<f64, EngineError> {
    let models = enumerate_conditioned(p, condition)?;
    Ok(models.iter().map(|m| m.probability * m.utility).sum())
}

/// Sum of the rewards of the utility atoms true in `i`.
pub fn utility(p: &GroundProgram, i: &Interpretation) -> f64 {
    i.utilities.iter().zip(&p.signature.utilities).filter(|(t, _)| **t).map(|(_, u)| u.reward).sum()
}

/// The reduct of a formula relative to `i`; `Not` nodes true in `i` become
/// `Not(false)` so the shape of the input stays visible.
pub fn reduct(f: &Formula<GAtom>, i: &Interpretation) -> Formula<GAtom> {
    if !i.satisfies(f) {
        return Formula::False;
    }
    match f {
        Formula::Atom(_) | Formula::True | Formula::False => f.clone(),
        Formula::Not(_) => Formula::not(Formula::False),
        Formula::And(gs) => Formula::And(gs.iter().map(|g| reduct(g, i)).collect()),
        Formula::Or(gs) => Formula::Or(gs.iter().map(|g| reduct(g, i)).collect()),
    }
}

/// Exact stability test for a single total assignment.
pub fn is_stable_model(p: &GroundProgram, values: &[usize]) -> Result<bool, EngineError> {
    let c = Compiled::new(p, &[])?;
    Ok(check_leaf(&c, values).is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translator::{GroundSignature, RuleOrigin, WeightedRule};

    fn prog(sig: GroundSignature, rules: Vec<WeightedRule>) -> GroundProgram {
        GroundProgram { signature: sig, rules, horizon: None }
    }

    fn at(a: GAtom) -> Formula<GAtom> {
        Formula::Atom(a)
    }

    #[test]
    fn negation_as_failure() {
        // a <- not b
        let mut sig = GroundSignature::default();
        let a = sig.add_prop("a");
        let b = sig.add_prop("b");
        let p = prog(sig, vec![WeightedRule::hard(at(a), Formula::not(at(b)), RuleOrigin::Other)]);
        let ms = enumerate_stable_models(&p).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].interpretation.values, vec![1, 0]);
        assert!((ms[0].probability - 1.0).abs() < TOLERANCE);
    }

    #[test]
    fn choice_rule_gives_two_models() {
        let mut sig = GroundSignature::default();
        let a = sig.add_prop("a");
        let p = prog(sig, vec![WeightedRule::choice(at(a), Formula::True, RuleOrigin::Choice)]);
        let ms = enumerate_stable_models(&p).unwrap();
        let vals: Vec<_> = ms.iter().map(|m| m.interpretation.values.clone()).collect();
        assert_eq!(vals, vec![vec![0], vec![1]]);
        assert!(ms.iter().all(|m| (m.probability - 0.5).abs() < TOLERANCE));
    }

    #[test]
    fn positive_loop_is_unfounded() {
        // a <- b. b <- a.  only the empty model is stable
        let mut sig = GroundSignature::default();
        let a = sig.add_prop("a");
        let b = sig.add_prop("b");
        let p = prog(
            sig,
            vec![WeightedRule::hard(at(a), at(b), RuleOrigin::Other), WeightedRule::hard(at(b), at(a), RuleOrigin::Other)],
        );
        let ms = enumerate_stable_models(&p).unwrap();
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0].interpretation.values, vec![0, 0]);
        assert!(!is_stable_model(&p, &[1, 1]).unwrap());
    }

    #[test]
    fn disjunctive_head_is_minimal() {
        // a | b.  two minimal models, {a, b} is not stable
        let mut sig = GroundSignature::default();
        let a = sig.add_prop("a");
        let b = sig.add_prop("b");
        let p = prog(sig, vec![WeightedRule::hard(Formula::Or(vec![at(a), at(b)]), Formula::True, RuleOrigin::Other)]);
        let ms = enumerate_stable_models(&p).unwrap();
        let vals: Vec<_> = ms.iter().map(|m| m.interpretation.values.clone()).collect();
        assert_eq!(vals, vec![vec![0, 1], vec![1, 0]]);
    }

    #[test]
    fn reduct_examples() {
        let mut sig = GroundSignature::default();
        let a = sig.add_prop("a");
        let b = sig.add_prop("b");
        let i = Interpretation { values: vec![1, 0], utilities: vec![] };
        assert_eq!(reduct(&Formula::Or(vec![at(a), at(b)]), &i), Formula::Or(vec![at(a), Formula::False]));
        let nn = Formula::not(Formula::not(at(a)));
        assert_eq!(reduct(&nn, &i), Formula::not(Formula::False));
        assert_eq!(reduct(&at(b), &i), Formula::False);
    }

    #[test]
    fn evidence_without_models_is_zero_probability() {
        let mut sig = GroundSignature::default();
        let a = sig.add_prop("a");
        let p = prog(sig, vec![]);
        assert!(matches!(enumerate_conditioned(&p, &at(a)), Err(EngineError::ZeroProbability(_))));
        let q = query_probability(&p, &Formula::True, &Formula::True).unwrap();
        assert_eq!(q.support, 1);
    }
}
