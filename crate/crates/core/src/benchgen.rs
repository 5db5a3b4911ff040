//! Generators for benchmark and test nets.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::backward::disjoint;
use crate::error::{Error, Result};
use crate::petri::{LabeledPetriNet, NetBuilder};

/// Default upper limit for the counter value `k` of the last-letter family.
pub const DEFAULT_LAST_LETTER_CAP: u32 = 10;

/// `N_x(k)` over `{0, 1, b, c}`, accepting `c · w · c` where `w ∈ {0,1}^{≥k}` has `x`
/// as its `k`-th letter from the end.
///
/// Control places `p1..p4` sequence the phases. `p_out` starts with `k` tokens; the
/// `x`-transition leaving phase two and every phase-three letter move one token from
/// `p_out` to `p_in`, and acceptance demands `k` tokens on `p_in`.
pub fn gen_last_letter_net(bit: u8, k: u32, cap: u32) -> Result<LabeledPetriNet> {
    if bit > 1 {
        return Err(Error::OutOfRange(format!("bit must be 0 or 1, got {bit}")));
    }
    if k == 0 || k > cap {
        return Err(Error::OutOfRange(format!("k must lie in 1..={cap}, got {k}")));
    }
    let x = bit.to_string();
    let k = u64::from(k);
    LabeledPetriNet::builder(["p1", "p2", "p3", "p4", "p_out", "p_in"])
        .letters(["0", "1", "b", "c"])
        .transition("start", "c", &[("p1", 1)], &[("p2", 1)])
        .transition("guess0", "0", &[("p2", 1)], &[("p2", 1)])
        .transition("guess1", "1", &[("p2", 1)], &[("p2", 1)])
        .transition("mark", &x, &[("p2", 1), ("p_out", 1)], &[("p3", 1), ("p_in", 1)])
        .transition("count0", "0", &[("p3", 1), ("p_out", 1)], &[("p3", 1), ("p_in", 1)])
        .transition("count1", "1", &[("p3", 1), ("p_out", 1)], &[("p3", 1), ("p_in", 1)])
        .transition("stop", "c", &[("p3", 1)], &[("p4", 1)])
        .initial(&[("p1", 1), ("p_out", k)])
        .final_marking(&[("p4", 1), ("p_in", k)])
        .build()
}

/// `(N_0(k), N_1(k))`.
pub fn gen_last_letter_pair(k: u32, cap: u32) -> Result<(LabeledPetriNet, LabeledPetriNet)> {
    Ok((gen_last_letter_net(0, k, cap)?, gen_last_letter_net(1, k, cap)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RandomNetParams {
    pub places: usize,
    pub transitions: usize,
    /// Upper bound on every flow value and marking entry.
    pub norm: u64,
    /// Alphabet size, at most 26.
    pub letters: usize,
}

impl RandomNetParams {
    pub fn new(places: usize, transitions: usize, norm: u64) -> Self {
        RandomNetParams { places, transitions, norm, letters: 2 }
    }
}

fn sparse(rng: &mut ChaCha8Rng, norm: u64, density: f64) -> u64 {
    if norm == 0 || !rng.gen_bool(density) {
        0
    } else {
        rng.gen_range(1..=norm)
    }
}

/// A random net with places `{prefix}0, {prefix}1, …` and alphabet `a, b, …`.
pub fn gen_random_net(rng: &mut ChaCha8Rng, params: &RandomNetParams, prefix: &str) -> LabeledPetriNet {
    let letters: Vec<String> = (0..params.letters.clamp(1, 26))
        .map(|i| char::from(b'a' + i as u8).to_string())
        .collect();
    let places: Vec<String> = (0..params.places).map(|i| format!("{prefix}{i}")).collect();
    let mut builder = NetBuilder::new(places.clone()).letters(letters.clone());
    let vector = |rng: &mut ChaCha8Rng, density: f64| -> Vec<(String, u64)> {
        places
            .iter()
            .map(|p| (p.clone(), sparse(rng, params.norm, density)))
            .filter(|(_, n)| *n > 0)
            .collect()
    };
    for i in 0..params.transitions {
        let label = letters[rng.gen_range(0..letters.len())].clone();
        let pre = vector(rng, 0.5);
        let post = vector(rng, 0.5);
        let pre: Vec<(&str, u64)> = pre.iter().map(|(p, n)| (p.as_str(), *n)).collect();
        let post: Vec<(&str, u64)> = post.iter().map(|(p, n)| (p.as_str(), *n)).collect();
        builder = builder.transition(&format!("{prefix}t{i}"), &label, &pre, &post);
    }
    let initial = vector(rng, 0.5);
    let fin = vector(rng, 0.6);
    let initial: Vec<(&str, u64)> = initial.iter().map(|(p, n)| (p.as_str(), *n)).collect();
    let fin: Vec<(&str, u64)> = fin.iter().map(|(p, n)| (p.as_str(), *n)).collect();
    builder
        .initial(&initial)
        .final_marking(&fin)
        .build()
        .expect("generated nets are well-formed")
}

#[derive(Clone, Debug)]
pub struct RandomPair {
    pub first: LabeledPetriNet,
    pub second: LabeledPetriNet,
    pub disjoint: bool,
}

/// A seeded pair of random nets over the same alphabet, with its disjointness verdict.
pub fn gen_random_pair(seed: u64, params: &RandomNetParams) -> RandomPair {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = gen_random_net(&mut rng, params, "p");
    let second = gen_random_net(&mut rng, params, "q");
    let disjoint = disjoint(&first, &second);
    RandomPair { first, second, disjoint }
}
