//! Exact verification of separators, plus bounded forward oracles over net languages.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::fa::{complement, determinize, net_automaton_witness, Nfa};
use crate::order::Marking;
use crate::petri::{fire_raw, LabeledPetriNet};

pub type Word = Vec<String>;

/// Caps for the bounded oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_len: usize,
    pub node_budget: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits { max_len: 10, node_budget: 2_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckOutcome {
    pub holds: bool,
    /// A counterexample word when the check fails.
    pub witness: Option<Word>,
}

impl CheckOutcome {
    fn from_witness(witness: Option<Word>) -> Self {
        CheckOutcome { holds: witness.is_none(), witness }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifyReport {
    /// `L(n1) ∩ L(b) = ∅`.
    pub excludes_first: CheckOutcome,
    /// `L(n2) ⊆ L(b)`.
    pub contains_second: CheckOutcome,
}

impl VerifyReport {
    pub fn holds(&self) -> bool {
        self.excludes_first.holds && self.contains_second.holds
    }
}

/// Checks exactly that `b` contains `L(n2)` and avoids `L(n1)`, both by reduction to
/// coverability. The two checks run concurrently.
pub fn verify_separator(n1: &LabeledPetriNet, n2: &LabeledPetriNet, b: &Nfa) -> Result<VerifyReport> {
    for a in n1.alphabet().iter().chain(n2.alphabet()) {
        if b.letter_index(a).is_none() {
            return Err(Error::AlphabetMismatch(format!("letter `{a}` missing from the automaton")));
        }
    }
    let (first, second) = rayon::join(
        || net_automaton_witness(n1, b),
        || {
            let co = complement(&determinize(b))?;
            net_automaton_witness(n2, &co)
        },
    );
    Ok(VerifyReport {
        excludes_first: CheckOutcome::from_witness(first?),
        contains_second: CheckOutcome::from_witness(second?),
    })
}

/// Markings reachable from `M₀` by runs labeled `word`.
pub fn markings_after<S: AsRef<str>>(net: &LabeledPetriNet, word: &[S]) -> Result<BTreeSet<Marking>> {
    let mut cur = BTreeSet::from([net.initial().clone()]);
    for letter in word {
        let mut next = BTreeSet::new();
        for m in &cur {
            for t in net.transitions().iter().filter(|t| t.label == letter.as_ref()) {
                if let Some(m2) = fire_raw(m.values(), t.pre.values(), t.post.values())? {
                    next.insert(m2);
                }
            }
        }
        cur = next;
        if cur.is_empty() {
            break;
        }
    }
    Ok(cur)
}

pub fn accepts_word<S: AsRef<str>>(net: &LabeledPetriNet, word: &[S]) -> Result<bool> {
    Ok(markings_after(net, word)?.iter().any(|m| net.is_accepting(m)))
}

/// All accepted words of length at most `maxlen`, in shortlex order.
///
/// Explores every run; exceeding `limits.node_budget` (word, marking) pairs is an
/// error rather than a silent truncation.
pub fn bounded_language(net: &LabeledPetriNet, maxlen: usize, limits: &OracleLimits) -> Result<Vec<Word>> {
    if maxlen > limits.max_len {
        return Err(Error::LengthCapExceeded { requested: maxlen, cap: limits.max_len });
    }
    let mut accepted = Vec::new();
    let mut level: BTreeMap<Word, BTreeSet<Marking>> = BTreeMap::new();
    level.insert(Vec::new(), BTreeSet::from([net.initial().clone()]));
    let mut nodes = 1usize;
    for len in 0..=maxlen {
        for (w, ms) in &level {
            if ms.iter().any(|m| net.is_accepting(m)) {
                accepted.push(w.clone());
            }
        }
        if len == maxlen {
            break;
        }
        let mut next: BTreeMap<Word, BTreeSet<Marking>> = BTreeMap::new();
        for (w, ms) in &level {
            for letter in net.alphabet() {
                let mut succ = BTreeSet::new();
                for m in ms {
                    for t in net.transitions().iter().filter(|t| &t.label == letter) {
                        if let Some(m2) = fire_raw(m.values(), t.pre.values(), t.post.values())? {
                            succ.insert(m2);
                        }
                    }
                }
                if !succ.is_empty() {
                    nodes += succ.len();
                    if nodes > limits.node_budget {
                        return Err(Error::BudgetExceeded { budget: limits.node_budget });
                    }
                    let mut w2 = w.clone();
                    w2.push(letter.clone());
                    next.insert(w2, succ);
                }
            }
        }
        level = next;
    }
    accepted.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    Ok(accepted)
}

/// Verdict of the capped forward search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ForwardVerdict {
    Coverable,
    NotCoverable,
    /// Some marking exceeded the cap before the search could conclude.
    Inconclusive,
}

/// Breadth-first search over reachable markings, not expanding markings whose norm
/// exceeds `cap`.
pub fn forward_coverable(net: &LabeledPetriNet, cap: u64) -> Result<ForwardVerdict> {
    let mut seen = HashSet::from([net.initial().clone()]);
    let mut queue = VecDeque::from([net.initial().clone()]);
    let mut capped = false;
    while let Some(m) = queue.pop_front() {
        if net.is_accepting(&m) {
            return Ok(ForwardVerdict::Coverable);
        }
        if m.norm() > cap {
            capped = true;
            continue;
        }
        for t in net.transitions() {
            if let Some(m2) = fire_raw(m.values(), t.pre.values(), t.post.values())? {
                if seen.insert(m2.clone()) {
                    queue.push_back(m2);
                }
            }
        }
    }
    Ok(if capped { ForwardVerdict::Inconclusive } else { ForwardVerdict::NotCoverable })
}

/// Every word over `alphabet` of length at most `maxlen`, in shortlex order.
pub fn all_words(alphabet: &[String], maxlen: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut start = 0;
    for _ in 0..maxlen {
        let end = out.len();
        for i in start..end {
            for a in alphabet {
                let mut w = out[i].clone();
                w.push(a.clone());
                out.push(w);
            }
        }
        start = end;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fa::State;

    fn w(s: &str) -> Word {
        s.chars().map(|c| c.to_string()).collect()
    }

    fn cover_two() -> LabeledPetriNet {
        LabeledPetriNet::builder(["p"])
            .transition("t_a", "a", &[], &[("p", 1)])
            .final_marking(&[("p", 2)])
            .build()
            .unwrap()
    }

    fn consumer() -> LabeledPetriNet {
        LabeledPetriNet::builder(["q"])
            .transition("s_a", "a", &[("q", 1)], &[])
            .initial(&[("q", 2)])
            .final_marking(&[("q", 1)])
            .build()
            .unwrap()
    }

    fn automaton(accepting: bool) -> Nfa {
        let finals = if accepting { vec![0] } else { vec![] };
        Nfa::new(vec!["a".into()], vec![State::plain("q")], vec![(0, 0, 0)], vec![0], finals).unwrap()
    }

    #[test]
    fn bounded_language_examples() {
        let lim = OracleLimits::default();
        assert_eq!(bounded_language(&cover_two(), 4, &lim).unwrap(), vec![w("aa"), w("aaa"), w("aaaa")]);
        assert_eq!(bounded_language(&consumer(), 4, &lim).unwrap(), vec![w(""), w("a")]);
        let stuck = LabeledPetriNet::builder(["p"]).letters(["a"]).final_marking(&[("p", 1)]).build().unwrap();
        assert!(bounded_language(&stuck, 4, &lim).unwrap().is_empty());
        assert!(matches!(
            bounded_language(&stuck, 11, &lim),
            Err(Error::LengthCapExceeded { .. })
        ));
        let tiny = OracleLimits { max_len: 10, node_budget: 3 };
        assert!(matches!(
            bounded_language(&cover_two(), 6, &tiny),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn verify_detects_both_failure_modes() {
        let empty = automaton(false);
        let r = verify_separator(&cover_two(), &consumer(), &empty).unwrap();
        assert!(r.excludes_first.holds);
        assert!(!r.contains_second.holds);
        assert_eq!(r.contains_second.witness, Some(w("")));

        let universal = automaton(true);
        let r = verify_separator(&cover_two(), &consumer(), &universal).unwrap();
        assert!(!r.excludes_first.holds);
        assert_eq!(r.excludes_first.witness, Some(w("aa")));
        assert!(r.contains_second.holds);
    }

    #[test]
    fn alphabet_mismatch_is_an_input_error() {
        let other = Nfa::new(vec!["b".into()], vec![State::plain("q")], vec![], vec![0], vec![0]).unwrap();
        assert!(matches!(
            verify_separator(&cover_two(), &consumer(), &other),
            Err(Error::AlphabetMismatch(_))
        ));
    }

    #[test]
    fn forward_oracle() {
        assert_eq!(forward_coverable(&cover_two(), 12).unwrap(), ForwardVerdict::Coverable);
        let never = LabeledPetriNet::builder(["p", "q"])
            .transition("t", "a", &[], &[("p", 1)])
            .final_marking(&[("q", 1)])
            .build()
            .unwrap();
        assert_eq!(forward_coverable(&never, 12).unwrap(), ForwardVerdict::Inconclusive);
        assert_eq!(forward_coverable(&consumer(), 12).unwrap(), ForwardVerdict::Coverable);
        let drained = consumer().with_markings(Marking::new(vec![0]), Marking::new(vec![1])).unwrap();
        assert_eq!(forward_coverable(&drained, 12).unwrap(), ForwardVerdict::NotCoverable);
    }

    #[test]
    fn word_enumeration() {
        let ab = vec!["a".to_string(), "b".to_string()];
        let words = all_words(&ab, 3);
        assert_eq!(words.len(), 1 + 2 + 4 + 8);
        assert_eq!(words[3], w("aa"));
    }
}
