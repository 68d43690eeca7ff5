//! Viral-marketing instances and a brute-force evaluator independent of
//! the stable-model engine: enumerate every influence outcome and compute
//! the buyers by reachability.

use pbcplus::dtlpmln::{Influence, MarketingGraph, Person};

pub fn graphs() -> Vec<(&'static str, MarketingGraph)> {
    let person = |name: &str, cost: f64| Person { name: name.into(), cost };
    let edge = |from: &str, to: &str, probability: f64| Influence { from: from.into(), to: to.into(), probability };
    vec![
        (
            "chain",
            MarketingGraph {
                people: vec![person("a", 2.0), person("b", 1.0), person("c", 3.0)],
                edges: vec![edge("a", "b", 0.6), edge("b", "c", 0.5)],
                reward: 4.0,
            },
        ),
        (
            "cycle",
            MarketingGraph {
                people: vec![person("a", 1.5), person("b", 2.5), person("c", 1.0), person("d", 4.0)],
                edges: vec![edge("a", "b", 0.7), edge("b", "c", 0.4), edge("c", "a", 0.3), edge("c", "d", 0.9), edge("d", "b", 0.2)],
                reward: 5.0,
            },
        ),
        (
            "star",
            MarketingGraph {
                people: vec![person("hub", 6.0), person("x", 2.0), person("y", 2.0), person("z", 2.0), person("w", 3.0)],
                edges: vec![
                    edge("hub", "x", 0.8),
                    edge("hub", "y", 0.6),
                    edge("hub", "z", 0.5),
                    edge("x", "w", 0.3),
                    edge("y", "hub", 0.25),
                    edge("z", "w", 0.45),
                ],
                reward: 3.0,
            },
        ),
    ]
}

/// Expected utility of marketing to `chosen` (indexed like `people`).
pub fn brute_force_eu(g: &MarketingGraph, chosen: &[bool]) -> f64 {
    let n = g.people.len();
    let idx = |name: &str| g.people.iter().position(|p| p.name == name).unwrap();
    let edges: Vec<(usize, usize, f64)> = g.edges.iter().map(|e| (idx(&e.from), idx(&e.to), e.probability)).collect();
    let cost: f64 = g.people.iter().zip(chosen).filter(|(_, &c)| c).map(|(p, _)| p.cost).sum();
    let mut eu = 0.0;
    for outcome in 0u32..(1 << edges.len()) {
        let mut prob = 1.0;
        for (k, e) in edges.iter().enumerate() {
            prob *= if outcome >> k & 1 == 1 { e.2 } else { 1.0 - e.2 };
        }
        let mut bought: Vec<bool> = chosen.to_vec();
        let mut stack: Vec<usize> = (0..n).filter(|&v| bought[v]).collect();
        while let Some(v) = stack.pop() {
            for (k, &(a, b, _)) in edges.iter().enumerate() {
                if a == v && outcome >> k & 1 == 1 && !bought[b] {
                    bought[b] = true;
                    stack.push(b);
                }
            }
        }
        let buyers = bought.iter().filter(|&&b| b).count() as f64;
        eu += prob * (g.reward * buyers - cost);
    }
    eu
}

pub fn all_decisions(n: usize) -> Vec<Vec<bool>> {
    (0u32..(1 << n)).map(|mask| (0..n).map(|i| mask >> (n - 1 - i) & 1 == 1).collect()).collect()
}
