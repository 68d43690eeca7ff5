//! Decision evaluation and maximum-expected-utility search over programs
//! with decision atoms.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::{self, EngineError, TOLERANCE};
use crate::lang::Formula;
use crate::translator::{GAtom, GroundProgram, RuleOrigin, Weight, WeightedRule};

/// Largest decision set searched exhaustively.
pub const MAX_DECISIONS: usize = 24;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DecisionError {
    #[error("decision atom {0} is not a Boolean atom of the signature")]
    BadDecisionAtom(String),
    #[error("{0} decision atoms exceed the exhaustive-search limit of {MAX_DECISIONS}")]
    TooManyDecisions(usize),
    #[error("assignment has {got} values for {expected} decision atoms")]
    WrongArity { expected: usize, got: usize },
    #[error("no decision is consistent with the evidence")]
    Infeasible,
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A program together with its decision atoms. Decision atoms are made
/// exogenous by adding a choice rule for each of them.
#[derive(Clone, Debug)]
pub struct DecisionProblem {
    pub program: GroundProgram,
    pub decisions: Vec<GAtom>,
}

impl DecisionProblem {
    pub fn new(mut program: GroundProgram, decisions: Vec<GAtom>) -> Result<Self, DecisionError> {
        for d in &decisions {
            let ok = program
                .signature
                .vars
                .get(d.var)
                .is_some_and(|v| v.values.len() == 2 && v.values.get(d.value).is_some_and(|x| x == "true"));
            if !ok {
                return Err(DecisionError::BadDecisionAtom(format!("{:?}", d)));
            }
        }
        let mut decisions = decisions;
        decisions.sort();
        decisions.dedup();
        for d in &decisions {
            program.rules.push(WeightedRule::choice(Formula::Atom(*d), Formula::True, RuleOrigin::Choice));
        }
        Ok(DecisionProblem { program, decisions })
    }

    pub fn label(&self, i: usize) -> String {
        self.program.signature.atom_label(self.decisions[i])
    }

    /// The conjunction fixing each decision atom to `dec[i]`.
    pub fn assignment_formula(&self, dec: &[bool]) -> Formula<GAtom> {
        Formula::and(
            self.decisions
                .iter()
                .zip(dec)
                .map(|(a, &t)| if t { Formula::Atom(*a) } else { Formula::not(Formula::Atom(*a)) })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeuResult {
    /// Lexicographically smallest maximizing assignment (false < true).
    pub assignment: Vec<bool>,
    pub expected_utility: f64,
    /// Every assignment within tolerance of the maximum, in lexicographic order.
    pub ties: Vec<Vec<bool>>,
    /// Expected utility of every feasible assignment.
    pub all: Vec<(Vec<bool>, f64)>,
}

/// `E[U(dec & e)]`.
pub fn evaluate_decision(dp: &DecisionProblem, dec: &[bool], evidence: &Formula<GAtom>) -> Result<f64, DecisionError> {
    if dec.len() != dp.decisions.len() {
        return Err(DecisionError::WrongArity { expected: dp.decisions.len(), got: dec.len() });
    }
    let cond = Formula::and(vec![dp.assignment_formula(dec), evidence.clone()]);
    Ok(engine::expected_utility(&dp.program, &cond)?)
}

/// Exhaustive MEU: one enumeration conditioned on `evidence`, grouped by the
/// decision assignment of each stable model.
pub fn meu(dp: &DecisionProblem, evidence: &Formula<GAtom>) -> Result<MeuResult, DecisionError> {
    if dp.decisions.len() > MAX_DECISIONS {
        return Err(DecisionError::TooManyDecisions(dp.decisions.len()));
    }
    let models = match engine::enumerate_conditioned(&dp.program, evidence) {
        Ok(ms) => ms,
        Err(EngineError::ZeroProbability(_)) => return Err(DecisionError::Infeasible),
        Err(e) => return Err(e.into()),
    };
    let mut groups: BTreeMap<Vec<bool>, (f64, f64)> = BTreeMap::new();
    for m in &models {
        let key: Vec<bool> = dp.decisions.iter().map(|a| m.interpretation.holds(*a)).collect();
        let g = groups.entry(key).or_insert((0.0, 0.0));
        g.0 += m.probability;
        g.1 += m.probability * m.utility;
    }
    let all: Vec<(Vec<bool>, f64)> =
        groups.into_iter().filter(|(_, (p, _))| *p > 0.0).map(|(k, (p, pu))| (k, pu / p)).collect();
    let best = all.iter().map(|(_, v)| *v).fold(f64::NEG_INFINITY, f64::max);
    if !best.is_finite() {
        return Err(DecisionError::Infeasible);
    }
    let ties: Vec<Vec<bool>> = all.iter().filter(|(_, v)| best - v <= TOLERANCE).map(|(k, _)| k.clone()).collect();
    Ok(MeuResult { assignment: ties[0].clone(), expected_utility: best, ties, all })
}

// ----------------------------------------------------------- viral marketing

/// A viral-marketing instance: marketing to a person costs `cost`, every
/// buyer yields `reward`, and a buyer influences a neighbour to buy with the
/// edge probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketingGraph {
    pub people: Vec<Person>,
    pub edges: Vec<Influence>,
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Person {
    pub name: String,
    pub cost: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Influence {
    pub from: String,
    pub to: String,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MarketingError {
    #[error("edge mentions unknown person {0}")]
    UnknownPerson(String),
    #[error("influence probability {0} not in (0,1)")]
    BadProbability(f64),
}

impl MarketingGraph {
    /// Builds the decision problem with decision atoms `marketTo(v)`:
    ///
    /// ```text
    /// buy(v) <- marketTo(v).
    /// buy(v2) <- buy(v1) & influence(v1, v2).
    /// ln(p/(1-p)) : influence(v1, v2).
    /// utility(reward, v) <- buy(v).
    /// utility(-cost, v) <- marketTo(v).
    /// ```
    pub fn decision_problem(&self) -> Result<DecisionProblem, MarketingError> {
        let mut p = GroundProgram::default();
        let sig = &mut p.signature;
        let market: Vec<GAtom> = self.people.iter().map(|v| sig.add_prop(format!("marketTo({})", v.name))).collect();
        let buy: Vec<GAtom> = self.people.iter().map(|v| sig.add_prop(format!("buy({})", v.name))).collect();
        let index = |n: &str| self.people.iter().position(|v| v.name == n).ok_or_else(|| MarketingError::UnknownPerson(n.into()));
        let mut rules = Vec::new();
        for (i, person) in self.people.iter().enumerate() {
            rules.push(WeightedRule::hard(Formula::Atom(buy[i]), Formula::Atom(market[i]), RuleOrigin::Other));
            let u = sig.add_utility(self.reward, None);
            rules.push(WeightedRule { weight: Weight::Hard, head: crate::translator::Head::Utility(u), body: Formula::Atom(buy[i]), origin: RuleOrigin::Utility });
            let c = sig.add_utility(-person.cost, None);
            rules.push(WeightedRule { weight: Weight::Hard, head: crate::translator::Head::Utility(c), body: Formula::Atom(market[i]), origin: RuleOrigin::Utility });
        }
        for e in &self.edges {
            if !(e.probability > 0.0 && e.probability < 1.0) {
                return Err(MarketingError::BadProbability(e.probability));
            }
            let (a, b) = (index(&e.from)?, index(&e.to)?);
            let inf = sig.add_prop(format!("influence({},{})", e.from, e.to));
            let w = (e.probability / (1.0 - e.probability)).ln();
            rules.push(WeightedRule { weight: Weight::Soft(w), head: crate::translator::Head::Formula(Formula::Atom(inf)), body: Formula::True, origin: RuleOrigin::Other });
            rules.push(WeightedRule::hard(
                Formula::Atom(buy[b]),
                Formula::And(vec![Formula::Atom(buy[a]), Formula::Atom(inf)]),
                RuleOrigin::Other,
            ));
        }
        p.rules = rules;
        Ok(DecisionProblem::new(p, market).expect("marketTo atoms are Boolean"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::translator::{GroundSignature, Head};

    fn single(reward: f64) -> DecisionProblem {
        let mut sig = GroundSignature::default();
        let d = sig.add_prop("d");
        let u = sig.add_utility(reward, None);
        let rules = vec![WeightedRule { weight: Weight::Hard, head: Head::Utility(u), body: Formula::Atom(d), origin: RuleOrigin::Utility }];
        DecisionProblem::new(GroundProgram { signature: sig, rules, horizon: None }, vec![d]).unwrap()
    }

    #[test]
    fn evaluate_single_decision() {
        let dp = single(5.0);
        assert!((evaluate_decision(&dp, &[true], &Formula::True).unwrap() - 5.0).abs() < TOLERANCE);
        assert!(evaluate_decision(&dp, &[false], &Formula::True).unwrap().abs() < TOLERANCE);
    }

    #[test]
    fn inconsistent_decision_is_an_error() {
        let dp = single(5.0);
        let ev = Formula::not(Formula::Atom(dp.decisions[0]));
        assert!(matches!(evaluate_decision(&dp, &[true], &ev), Err(DecisionError::Engine(EngineError::ZeroProbability(_)))));
    }

    #[test]
    fn empty_decision_set() {
        let mut sig = GroundSignature::default();
        let u = sig.add_utility(3.0, None);
        let rules = vec![WeightedRule { weight: Weight::Hard, head: Head::Utility(u), body: Formula::True, origin: RuleOrigin::Utility }];
        let dp = DecisionProblem::new(GroundProgram { signature: sig, rules, horizon: None }, vec![]).unwrap();
        let r = meu(&dp, &Formula::True).unwrap();
        assert!(r.assignment.is_empty());
        assert!((r.expected_utility - 3.0).abs() < TOLERANCE);
    }

    #[test]
    fn two_independent_decisions() {
        let mut sig = GroundSignature::default();
        let a = sig.add_prop("a");
        let b = sig.add_prop("b");
        let mut rules = Vec::new();
        for x in [a, b] {
            let u = sig.add_utility(1.0, None);
            rules.push(WeightedRule { weight: Weight::Hard, head: Head::Utility(u), body: Formula::Atom(x), origin: RuleOrigin::Utility });
        }
        let dp = DecisionProblem::new(GroundProgram { signature: sig, rules, horizon: None }, vec![a, b]).unwrap();
        let r = meu(&dp, &Formula::True).unwrap();
        assert_eq!(r.assignment, vec![true, true]);
        assert!((r.expected_utility - 2.0).abs() < TOLERANCE);
        assert_eq!(r.all.len(), 4);
    }

    #[test]
    fn nobody_marketed_is_worth_nothing() {
        let g = MarketingGraph {
            people: vec![Person { name: "a".into(), cost: 2.0 }, Person { name: "b".into(), cost: 1.0 }],
            edges: vec![Influence { from: "a".into(), to: "b".into(), probability: 0.4 }],
            reward: 5.0,
        };
        let dp = g.decision_problem().unwrap();
        assert!(evaluate_decision(&dp, &[false, false], &Formula::True).unwrap().abs() < TOLERANCE);
        // marketing to a: 5 - 2 + 0.4 * 5
        assert!((evaluate_decision(&dp, &[true, false], &Formula::True).unwrap() - 5.0).abs() < TOLERANCE);
    }
}
