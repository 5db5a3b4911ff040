#![allow(dead_code)]

use petrisep_core::benchgen::{gen_random_pair, RandomNetParams, RandomPair};
use petrisep_core::LabeledPetriNet;

/// Parameters for the `i`-th seed of the small random corpus: 1–3 places and
/// 1–3 transitions per net, norms ≤ 2, two letters.
pub fn small_params(seed: u64) -> RandomNetParams {
    RandomNetParams {
        places: 1 + (seed % 3) as usize,
        transitions: 1 + ((seed / 3) % 3) as usize,
        norm: 2,
        letters: 2,
    }
}

/// The first `count` disjoint pairs in seed order.
pub fn disjoint_corpus(count: usize) -> Vec<(u64, RandomPair)> {
    let mut out = Vec::new();
    let mut seed = 0u64;
    while out.len() < count {
        let pair = gen_random_pair(seed, &small_params(seed));
        if pair.disjoint {
            out.push((seed, pair));
        }
        seed += 1;
    }
    out
}

/// `a^{≥2}` (cover two tokens produced by `a`).
pub fn cover_two() -> LabeledPetriNet {
    LabeledPetriNet::builder(["p"])
        .transition("t_a", "a", &[], &[("p", 1)])
        .final_marking(&[("p", 2)])
        .build()
        .unwrap()
}

/// `{ε, a}` (a two-token consumer that must keep one token).
pub fn consumer() -> LabeledPetriNet {
    LabeledPetriNet::builder(["q"])
        .transition("s_a", "a", &[("q", 1)], &[])
        .initial(&[("q", 2)])
        .final_marking(&[("q", 1)])
        .build()
        .unwrap()
}

pub fn word(s: &str) -> Vec<String> {
    s.chars().map(|c| c.to_string()).collect()
}
