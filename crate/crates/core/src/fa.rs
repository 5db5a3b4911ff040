//! Finite automata: subset construction, complement, relabeling, minimization, and
//! emptiness of `L(net) ∩ L(automaton)` via coverability.

use std::collections::{BTreeMap, HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::backward::pred_raw;
use crate::error::{Error, Result};
use crate::order::{Marking, OmegaMarking};
use crate::petri::{LabeledPetriNet, Transition};

/// Payload attached to separator states.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StateAnnotation {
    /// An ideal of the product net, over the automaton's annotation places.
    Ideal(OmegaMarking),
    /// The absorbing state reached once the deterministic side has no run.
    Dead,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct State {
    pub name: String,
    pub annotation: Option<StateAnnotation>,
}

impl State {
    pub fn plain(name: impl Into<String>) -> Self {
        State { name: name.into(), annotation: None }
    }
}

/// A finite automaton `(Q, →, Q_I, Q_F)` over a named alphabet.
///
/// Transitions are `(source, letter, target)` index triples, kept sorted and deduplicated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: Vec<String>,
    states: Vec<State>,
    transitions: Vec<(usize, usize, usize)>,
    initial: Vec<usize>,
    accepting: Vec<usize>,
    annotation_places: Vec<String>,
}

fn sorted_unique(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v.dedup();
    v
}

impl Nfa {
    pub fn new(
        alphabet: Vec<String>,
        states: Vec<State>,
        transitions: Vec<(usize, usize, usize)>,
        initial: Vec<usize>,
        accepting: Vec<usize>,
    ) -> Result<Self> {
        let n = states.len();
        let mut names = HashSet::new();
        for s in &states {
            if !names.insert(s.name.as_str()) {
                return Err(Error::InvalidAutomaton(format!("duplicate state `{}`", s.name)));
            }
        }
        let mut letters = HashSet::new();
        for a in &alphabet {
            if !letters.insert(a.as_str()) {
                return Err(Error::InvalidAutomaton(format!("duplicate letter `{a}`")));
            }
        }
        for &(p, a, q) in &transitions {
            if p >= n || q >= n || a >= alphabet.len() {
                return Err(Error::InvalidAutomaton(format!("transition ({p},{a},{q}) out of range")));
            }
        }
        if initial.iter().chain(&accepting).any(|&s| s >= n) {
            return Err(Error::InvalidAutomaton("initial or final state out of range".into()));
        }
        let mut transitions = transitions;
        transitions.sort_unstable();
        transitions.dedup();
        Ok(Nfa {
            alphabet,
            states,
            transitions,
            initial: sorted_unique(initial),
            accepting: sorted_unique(accepting),
            annotation_places: Vec::new(),
        })
    }

    pub fn with_annotation_places(mut self, places: Vec<String>) -> Self {
        self.annotation_places = places;
        self
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[State] {
        &self.states
    }

    pub fn transitions(&self) -> &[(usize, usize, usize)] {
        &self.transitions
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn annotation_places(&self) -> &[String] {
        &self.annotation_places
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn letter_index(&self, letter: &str) -> Option<usize> {
        self.alphabet.iter().position(|a| a == letter)
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting.binary_search(&s).is_ok()
    }

    /// `table[state][letter]` lists the successors.
    pub fn successor_table(&self) -> Vec<Vec<Vec<usize>>> {
        let mut table = vec![vec![Vec::new(); self.alphabet.len()]; self.states.len()];
        for &(p, a, q) in &self.transitions {
            table[p][a].push(q);
        }
        table
    }

    /// Single initial state and exactly one successor per state and letter.
    pub fn is_complete_dfa(&self) -> bool {
        if self.initial.len() != 1 {
            return false;
        }
        self.successor_table().iter().all(|row| row.iter().all(|succ| succ.len() == 1))
    }

    /// States reachable on `word`; letters outside the alphabet yield the empty set.
    pub fn run<S: AsRef<str>>(&self, word: &[S]) -> Vec<usize> {
        let table = self.successor_table();
        self.run_with(&table, word)
    }

    pub(crate) fn run_with<S: AsRef<str>>(&self, table: &[Vec<Vec<usize>>], word: &[S]) -> Vec<usize> {
        let mut cur = self.initial.clone();
        for letter in word {
            let Some(a) = self.letter_index(letter.as_ref()) else {
                return Vec::new();
            };
            cur = sorted_unique(cur.iter().flat_map(|&s| table[s][a].iter().copied()).collect());
            if cur.is_empty() {
                break;
            }
        }
        cur
    }

    /// A copy over a larger alphabet; new letters get no transitions.
    pub fn with_alphabet_extended(&self, extra: &[String]) -> Nfa {
        let mut out = self.clone();
        for a in extra {
            if !out.alphabet.contains(a) {
                out.alphabet.push(a.clone());
            }
        }
        out
    }
}

pub fn member<S: AsRef<str>>(a: &Nfa, word: &[S]) -> bool {
    a.run(word).iter().any(|&s| a.is_accepting(s))
}

fn subset_name(a: &Nfa, members: &[usize]) -> String {
    let mut h = Sha256::new();
    for (i, &s) in members.iter().enumerate() {
        if i > 0 {
            h.update([0x1f]);
        }
        h.update(a.states[s].name.as_bytes());
    }
    format!("d{}", &hex::encode(h.finalize())[..16])
}

/// Subset construction, completed with the empty subset as sink.
///
/// States appear in breadth-first discovery order (letters in alphabet order); the
/// sink is always present, appended last if unreachable.
pub fn determinize(a: &Nfa) -> Nfa {
    let table = a.successor_table();
    let k = a.alphabet.len();
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut subsets: Vec<Vec<usize>> = Vec::new();
    let mut transitions = Vec::new();
    let start = a.initial.clone();
    index.insert(start.clone(), 0);
    subsets.push(start);
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        for letter in 0..k {
            let next = sorted_unique(
                subsets[i].iter().flat_map(|&s| table[s][letter].iter().copied()).collect(),
            );
            let j = match index.get(&next) {
                Some(&j) => j,
                None => {
                    let j = subsets.len();
                    index.insert(next.clone(), j);
                    subsets.push(next);
                    queue.push_back(j);
                    j
                }
            };
            transitions.push((i, letter, j));
        }
    }
    if !index.contains_key(&Vec::new()) {
        let sink = subsets.len();
        subsets.push(Vec::new());
        transitions.extend((0..k).map(|letter| (sink, letter, sink)));
    }
    let states = subsets.iter().map(|s| State::plain(subset_name(a, s))).collect();
    let accepting = subsets
        .iter()
        .enumerate()
        .filter(|(_, s)| s.iter().any(|&q| a.is_accepting(q)))
        .map(|(i, _)| i)
        .collect();
    Nfa::new(a.alphabet.clone(), states, transitions, vec![0], accepting)
        .expect("subset construction yields a well-formed automaton")
}

/// Flips accepting states of a complete DFA.
pub fn complement(d: &Nfa) -> Result<Nfa> {
    if !d.is_complete_dfa() {
        return Err(Error::NotCompleteDfa("complement needs a single initial state and a total transition function".into()));
    }
    let mut out = d.clone();
    out.accepting = (0..d.states.len()).filter(|&s| !d.is_accepting(s)).collect();
    Ok(out)
}

/// Applies the letter map `h` edge-wise. The target alphabet lists images in order of
/// first appearance along `a`'s alphabet.
pub fn relabel(a: &Nfa, h: &BTreeMap<String, String>) -> Result<Nfa> {
    let mut alphabet: Vec<String> = Vec::new();
    let mut image = Vec::with_capacity(a.alphabet.len());
    for letter in &a.alphabet {
        let target = h.get(letter).ok_or_else(|| Error::UnmappedLetter(letter.clone()))?;
        let idx = match alphabet.iter().position(|x| x == target) {
            Some(i) => i,
            None => {
                alphabet.push(target.clone());
                alphabet.len() - 1
            }
        };
        image.push(idx);
    }
    let transitions = a.transitions.iter().map(|&(p, l, q)| (p, image[l], q)).collect();
    let out = Nfa::new(alphabet, a.states.clone(), transitions, a.initial.clone(), a.accepting.clone())?;
    Ok(out.with_annotation_places(a.annotation_places.clone()))
}

/// Minimal complete DFA by Hopcroft's partition refinement, after dropping unreachable
/// states. States are renumbered in breadth-first order and named `m0, m1, …`.
pub fn minimize(d: &Nfa) -> Result<Nfa> {
    if !d.is_complete_dfa() {
        return Err(Error::NotCompleteDfa("minimize needs a complete DFA".into()));
    }
    let k = d.alphabet.len();
    let full = d.successor_table();

    // Reachable part, renumbered.
    let mut order = vec![d.initial[0]];
    let mut local = vec![usize::MAX; d.states.len()];
    local[d.initial[0]] = 0;
    let mut i = 0;
    while i < order.len() {
        let s = order[i];
        for letter in 0..k {
            let q = full[s][letter][0];
            if local[q] == usize::MAX {
                local[q] = order.len();
                order.push(q);
            }
        }
        i += 1;
    }
    let n = order.len();
    let delta: Vec<Vec<usize>> = order
        .iter()
        .map(|&s| (0..k).map(|letter| local[full[s][letter][0]]).collect())
        .collect();
    let accepting: Vec<bool> = order.iter().map(|&s| d.is_accepting(s)).collect();

    let mut inverse = vec![vec![Vec::new(); n]; k];
    for (s, row) in delta.iter().enumerate() {
        for (letter, &q) in row.iter().enumerate() {
            inverse[letter][q].push(s);
        }
    }

    let mut block_of = vec![0usize; n];
    let mut blocks: Vec<Vec<usize>> = Vec::new();
    let finals: Vec<usize> = (0..n).filter(|&s| accepting[s]).collect();
    let others: Vec<usize> = (0..n).filter(|&s| !accepting[s]).collect();
    for part in [finals, others] {
        if !part.is_empty() {
            for &s in &part {
                block_of[s] = blocks.len();
            }
            blocks.push(part);
        }
    }
    let mut in_work: Vec<Vec<bool>> = vec![vec![false; k]; blocks.len()];
    let mut work: Vec<(usize, usize)> = Vec::new();
    if blocks.len() == 2 {
        let smaller = if blocks[0].len() <= blocks[1].len() { 0 } else { 1 };
        for letter in 0..k {
            work.push((smaller, letter));
            in_work[smaller][letter] = true;
        }
    }
    let mut marked = vec![false; n];
    while let Some((splitter, letter)) = work.pop() {
        in_work[splitter][letter] = false;
        let mut touched: Vec<usize> = Vec::new();
        let mut hits: HashMap<usize, Vec<usize>> = HashMap::new();
        for &q in &blocks[splitter] {
            for &p in &inverse[letter][q] {
                if !marked[p] {
                    marked[p] = true;
                    let b = block_of[p];
                    let entry = hits.entry(b).or_default();
                    if entry.is_empty() {
                        touched.push(b);
                    }
                    entry.push(p);
                }
            }
        }
        touched.sort_unstable();
        for b in touched {
            let hit = hits.remove(&b).unwrap_or_default();
            if hit.len() == blocks[b].len() {
                for &p in &hit {
                    marked[p] = false;
                }
                continue;
            }
            let rest: Vec<usize> = blocks[b].iter().copied().filter(|&s| !marked[s]).collect();
            for &p in &hit {
                marked[p] = false;
            }
            let new_id = blocks.len();
            for &s in &hit {
                block_of[s] = new_id;
            }
            blocks[b] = rest;
            blocks.push(hit);
            in_work.push(vec![false; k]);
            for c in 0..k {
                if in_work[b][c] {
                    in_work[new_id][c] = true;
                    work.push((new_id, c));
                } else {
                    let smaller = if blocks[b].len() <= blocks[new_id].len() { b } else { new_id };
                    in_work[smaller][c] = true;
                    work.push((smaller, c));
                }
            }
        }
    }

    // Renumber blocks in breadth-first order from the initial block.
    let mut number = vec![usize::MAX; blocks.len()];
    let mut seq = vec![block_of[0]];
    number[block_of[0]] = 0;
    let mut i = 0;
    while i < seq.len() {
        let rep = blocks[seq[i]][0];
        for letter in 0..k {
            let b = block_of[delta[rep][letter]];
            if number[b] == usize::MAX {
                number[b] = seq.len();
                seq.push(b);
            }
        }
        i += 1;
    }
    let mut transitions = Vec::new();
    let mut accepting_out = Vec::new();
    for (idx, &b) in seq.iter().enumerate() {
        let rep = blocks[b][0];
        for letter in 0..k {
            transitions.push((idx, letter, number[block_of[delta[rep][letter]]]));
        }
        if accepting[rep] {
            accepting_out.push(idx);
        }
    }
    let states = (0..seq.len()).map(|i| State::plain(format!("m{i}"))).collect();
    Nfa::new(d.alphabet.clone(), states, transitions, vec![0], accepting_out)
}

/// The net extended by one place per automaton state, each automaton edge paired
/// with every equally labeled net transition.
///
/// `L(net) ∩ L(a)` is non-empty iff the encoding, started with one token on an
/// initial state place, covers `M_f` plus one token on an accepting state place.
pub fn encode_with_automaton(net: &LabeledPetriNet, a: &Nfa) -> LabeledPetriNet {
    let mut places: Vec<String> = net.places().to_vec();
    let taken: HashSet<&String> = net.places().iter().collect();
    for s in &a.states {
        let mut name = format!("@{}", s.name);
        while taken.contains(&name) {
            name.insert(0, '@');
        }
        places.push(name);
    }
    let d = net.dim();
    let n = a.states.len();
    let extend = |m: &Marking, state: Option<usize>| {
        let mut v = m.values().to_vec();
        v.resize(d + n, 0);
        if let Some(s) = state {
            v[d + s] += 1;
        }
        Marking::new(v)
    };
    let mut transitions = Vec::new();
    for (ei, &(p, letter, q)) in a.transitions.iter().enumerate() {
        for t in net.transitions_labeled(&a.alphabet[letter]) {
            let tr = &net.transitions()[t.0];
            let mut pre = extend(&tr.pre, None).into_values();
            let mut post = extend(&tr.post, None).into_values();
            pre[d + p] += 1;
            post[d + q] += 1;
            transitions.push(Transition {
                name: format!("{}@{ei}", tr.name),
                label: tr.label.clone(),
                pre: Marking::new(pre),
                post: Marking::new(post),
            });
        }
    }
    let mut alphabet = net.alphabet().to_vec();
    for x in &a.alphabet {
        if !alphabet.contains(x) {
            alphabet.push(x.clone());
        }
    }
    LabeledPetriNet::new(
        places,
        alphabet,
        transitions,
        extend(net.initial(), None),
        extend(net.final_marking(), None),
    )
    .expect("encoding preserves well-formedness")
}

struct PairNode {
    state: usize,
    marking: Marking,
    sum: u64,
    /// The node this one was derived from, and the net transition used.
    parent: Option<(usize, usize)>,
    alive: bool,
}

/// A word in `L(net) ∩ L(a)`, or `None` when the intersection is empty.
///
/// Backward coverability on the synchronized product of `net` and `a`, with the
/// automaton state kept as a discrete component: the upward-closed set of
/// configurations that can reach an accepting state covering `M_f` is saturated
/// with one antichain per automaton state. The search stops as soon as an initial
/// configuration is covered.
pub fn net_automaton_witness(net: &LabeledPetriNet, a: &Nfa) -> Result<Option<Vec<String>>> {
    // incoming[q] lists (p, t) for every edge p -a-> q and net transition t labeled a.
    let mut incoming: Vec<Vec<(usize, usize)>> = vec![Vec::new(); a.states.len()];
    for &(p, letter, q) in &a.transitions {
        for t in net.transitions_labeled(&a.alphabet[letter]) {
            incoming[q].push((p, t.0));
        }
    }
    let initial: Vec<bool> = (0..a.states.len()).map(|s| a.initial.contains(&s)).collect();
    let m0 = net.initial();
    let mut nodes: Vec<PairNode> = Vec::new();
    let mut active: Vec<Vec<usize>> = vec![Vec::new(); a.states.len()];
    let mut queue = VecDeque::new();

    let mut insert = |nodes: &mut Vec<PairNode>, state: usize, marking: Marking, parent| -> Option<usize> {
        let sum: u64 = marking.values().iter().sum();
        if active[state].iter().any(|&j| nodes[j].sum <= sum && nodes[j].marking.leq(&marking)) {
            return None;
        }
        active[state].retain(|&j| {
            let dominated = sum <= nodes[j].sum && marking.leq(&nodes[j].marking);
            if dominated {
                nodes[j].alive = false;
            }
            !dominated
        });
        let id = nodes.len();
        nodes.push(PairNode { state, marking, sum, parent, alive: true });
        active[state].push(id);
        Some(id)
    };
    let word_of = |nodes: &[PairNode], mut cur: usize| {
        let mut word = Vec::new();
        while let Some((parent, t)) = nodes[cur].parent {
            word.push(net.transitions()[t].label.clone());
            cur = parent;
        }
        word
    };

    for &f in &a.accepting {
        if let Some(id) = insert(&mut nodes, f, net.final_marking().clone(), None) {
            if initial[f] && nodes[id].marking.leq(m0) {
                return Ok(Some(Vec::new()));
            }
            queue.push_back(id);
        }
    }
    while let Some(i) = queue.pop_front() {
        if !nodes[i].alive {
            continue;
        }
        let q = nodes[i].state;
        for &(p, t) in &incoming[q] {
            let tr = &net.transitions()[t];
            let m = pred_raw(nodes[i].marking.values(), tr.pre.values(), tr.post.values())?;
            if let Some(id) = insert(&mut nodes, p, m, Some((i, t))) {
                if initial[p] && nodes[id].marking.leq(m0) {
                    return Ok(Some(word_of(&nodes, id)));
                }
                queue.push_back(id);
            }
        }
    }
    Ok(None)
}

/// `L(net) ∩ L(a) = ∅`.
pub fn net_automaton_empty(net: &LabeledPetriNet, a: &Nfa) -> Result<bool> {
    Ok(net_automaton_witness(net, a)?.is_none())
}

/// Graphviz rendering.
pub fn to_dot(a: &Nfa) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n  node [shape=circle];\n");
    for (i, s) in a.states.iter().enumerate() {
        let shape = if a.is_accepting(i) { "doublecircle" } else { "circle" };
        let label = match &s.annotation {
            Some(StateAnnotation::Ideal(u)) => format!("{}\\n{}", s.name, u),
            Some(StateAnnotation::Dead) => format!("{}\\ndead", s.name),
            None => s.name.clone(),
        };
        let _ = writeln!(out, "  s{i} [shape={shape}, label=\"{label}\"];");
    }
    for &i in &a.initial {
        let _ = writeln!(out, "  init{i} [shape=point];\n  init{i} -> s{i};");
    }
    let mut grouped: BTreeMap<(usize, usize), Vec<&str>> = BTreeMap::new();
    for &(p, l, q) in &a.transitions {
        grouped.entry((p, q)).or_default().push(&a.alphabet[l]);
    }
    for ((p, q), letters) in grouped {
        let _ = writeln!(out, "  s{p} -> s{q} [label=\"{}\"];", letters.join(","));
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn letters(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn states(n: usize) -> Vec<State> {
        (0..n).map(|i| State::plain(format!("q{i}"))).collect()
    }

    /// Accepts words over {a,b} whose second-to-last letter is `a`.
    fn second_last_a() -> Nfa {
        Nfa::new(
            letters(&["a", "b"]),
            states(3),
            vec![(0, 0, 0), (0, 1, 0), (0, 0, 1), (1, 0, 2), (1, 1, 2)],
            vec![0],
            vec![2],
        )
        .unwrap()
    }

    fn w(s: &str) -> Vec<String> {
        s.chars().map(|c| c.to_string()).collect()
    }

    #[test]
    fn membership() {
        let a = second_last_a();
        assert!(member(&a, &w("ab")));
        assert!(member(&a, &w("bbaa")));
        assert!(!member(&a, &w("b")));
        assert!(!member(&a, &w("ac")));
    }

    #[test]
    fn determinize_and_minimize() {
        let a = second_last_a();
        let d = determinize(&a);
        assert!(d.is_complete_dfa());
        for word in ["", "a", "ab", "ba", "aab", "bab", "abb"] {
            assert_eq!(member(&a, &w(word)), member(&d, &w(word)), "{word}");
        }
        let m = minimize(&d).unwrap();
        assert_eq!(m.num_states(), 4);
        assert_eq!(minimize(&m).unwrap(), m);
    }

    #[test]
    fn sink_is_always_present() {
        let a = Nfa::new(letters(&["a"]), states(1), vec![(0, 0, 0)], vec![0], vec![0]).unwrap();
        let d = determinize(&a);
        assert_eq!(d.num_states(), 2);
        assert!(d.is_complete_dfa());
    }

    #[test]
    fn complement_requires_dfa() {
        assert!(matches!(complement(&second_last_a()), Err(Error::NotCompleteDfa(_))));
        let d = determinize(&second_last_a());
        let c = complement(&d).unwrap();
        assert!(!member(&c, &w("ab")));
        assert!(member(&c, &w("b")));
        assert_eq!(complement(&c).unwrap(), d);
    }

    #[test]
    fn relabeling() {
        let a = second_last_a();
        let id: BTreeMap<String, String> = [("a", "a"), ("b", "b")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        assert_eq!(relabel(&a, &id).unwrap().transitions(), a.transitions());
        let merge: BTreeMap<String, String> = [("a", "x"), ("b", "x")]
            .iter()
            .map(|(x, y)| (x.to_string(), y.to_string()))
            .collect();
        let r = relabel(&a, &merge).unwrap();
        assert_eq!(r.alphabet(), &["x".to_string()]);
        assert!(member(&r, &w("xx")));
        let partial: BTreeMap<String, String> = [("a".to_string(), "a".to_string())].into();
        assert!(matches!(relabel(&a, &partial), Err(Error::UnmappedLetter(_))));
    }

    #[test]
    fn net_intersection_emptiness() {
        let net = LabeledPetriNet::builder(["p"])
            .transition("t", "a", &[], &[("p", 1)])
            .final_marking(&[("p", 2)])
            .build()
            .unwrap();
        let universal = Nfa::new(letters(&["a"]), states(1), vec![(0, 0, 0)], vec![0], vec![0]).unwrap();
        assert!(!net_automaton_empty(&net, &universal).unwrap());
        assert_eq!(net_automaton_witness(&net, &universal).unwrap(), Some(w("aa")));

        let no_finals = Nfa::new(letters(&["a"]), states(1), vec![(0, 0, 0)], vec![0], vec![]).unwrap();
        assert!(net_automaton_empty(&net, &no_finals).unwrap());

        // Words of length at most one.
        let short = Nfa::new(letters(&["a"]), states(2), vec![(0, 0, 1)], vec![0], vec![0, 1]).unwrap();
        assert!(net_automaton_empty(&net, &short).unwrap());
    }

    #[test]
    fn dot_export_mentions_every_state() {
        let dot = to_dot(&second_last_a());
        assert!(dot.contains("s2 [shape=doublecircle"));
        assert!(dot.contains("s0 -> s0 [label=\"a,b\"]"));
    }
}
