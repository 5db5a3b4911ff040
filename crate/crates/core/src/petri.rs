//! Labeled Petri nets with coverability acceptance.

use std::collections::{BTreeMap, HashMap, HashSet};

use crate::error::{Error, Result};
use crate::order::Marking;

/// Index of a transition within its net.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TransitionId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Transition {
    pub name: String,
    pub label: String,
    pub pre: Marking,
    pub post: Marking,
}

/// A Petri net `(P, T, F, λ, M₀, M_f)`; a word is accepted when some run labeled by it
/// reaches a marking covering `M_f`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LabeledPetriNet {
    places: Vec<String>,
    alphabet: Vec<String>,
    transitions: Vec<Transition>,
    initial: Marking,
    final_marking: Marking,
}

impl LabeledPetriNet {
    pub fn new(
        places: Vec<String>,
        alphabet: Vec<String>,
        transitions: Vec<Transition>,
        initial: Marking,
        final_marking: Marking,
    ) -> Result<Self> {
        let d = places.len();
        let mut seen = HashSet::new();
        for p in &places {
            if !seen.insert(p.as_str()) {
                return Err(Error::InvalidNet(format!("duplicate place `{p}`")));
            }
        }
        let mut letters = HashSet::new();
        for a in &alphabet {
            if a.is_empty() || a == "ε" {
                return Err(Error::InvalidNet("empty (ε) letters are not allowed".into()));
            }
            if !letters.insert(a.as_str()) {
                return Err(Error::InvalidNet(format!("duplicate letter `{a}`")));
            }
        }
        let mut names = HashSet::new();
        for t in &transitions {
            if !names.insert(t.name.as_str()) {
                return Err(Error::InvalidNet(format!("duplicate transition `{}`", t.name)));
            }
            if !letters.contains(t.label.as_str()) {
                return Err(Error::InvalidNet(format!(
                    "transition `{}` has label `{}` outside the alphabet",
                    t.name, t.label
                )));
            }
            if t.pre.dim() != d || t.post.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: if t.pre.dim() != d { t.pre.dim() } else { t.post.dim() },
                });
            }
        }
        for m in [&initial, &final_marking] {
            if m.dim() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.dim() });
            }
        }
        Ok(LabeledPetriNet { places, alphabet, transitions, initial, final_marking })
    }

    pub fn builder<S: Into<String>>(places: impl IntoIterator<Item = S>) -> NetBuilder {
        NetBuilder::new(places)
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn dim(&self) -> usize {
        self.places.len()
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, t: TransitionId) -> Result<&Transition> {
        self.transitions.get(t.0).ok_or(Error::UnknownTransition(t.0))
    }

    pub fn transition_ids(&self) -> impl Iterator<Item = TransitionId> {
        (0..self.transitions.len()).map(TransitionId)
    }

    pub fn initial(&self) -> &Marking {
        &self.initial
    }

    pub fn final_marking(&self) -> &Marking {
        &self.final_marking
    }

    pub fn place_index(&self, name: &str) -> Option<usize> {
        self.places.iter().position(|p| p == name)
    }

    /// Largest value in the range of the flow function.
    pub fn flow_norm(&self) -> u64 {
        self.transitions
            .iter()
            .map(|t| t.pre.norm().max(t.post.norm()))
            .max()
            .unwrap_or(0)
    }

    /// True when no two transitions share a label.
    pub fn is_injectively_labeled(&self) -> bool {
        let mut labels = HashSet::new();
        self.transitions.iter().all(|t| labels.insert(t.label.as_str()))
    }

    /// Transitions carrying `label`, in declaration order.
    pub fn transitions_labeled<'a>(&'a self, label: &'a str) -> impl Iterator<Item = TransitionId> + 'a {
        self.transitions
            .iter()
            .enumerate()
            .filter(move |(_, t)| t.label == label)
            .map(|(i, _)| TransitionId(i))
    }

    pub fn is_accepting(&self, m: &Marking) -> bool {
        self.final_marking.leq(m)
    }

    /// A copy with replaced initial and final markings.
    pub fn with_markings(&self, initial: Marking, final_marking: Marking) -> Result<Self> {
        LabeledPetriNet::new(
            self.places.clone(),
            self.alphabet.clone(),
            self.transitions.clone(),
            initial,
            final_marking,
        )
    }

    /// A copy whose alphabet is extended by the given letters (existing ones are kept).
    pub fn with_alphabet_extended(&self, extra: &[String]) -> Self {
        let mut net = self.clone();
        for a in extra {
            if !net.alphabet.contains(a) {
                net.alphabet.push(a.clone());
            }
        }
        net
    }
}

type SparseVector = Vec<(String, u64)>;

/// Incremental construction of nets by place name; used by generators and tests.
#[derive(Clone, Debug)]
pub struct NetBuilder {
    places: Vec<String>,
    alphabet: Vec<String>,
    transitions: Vec<(String, String, SparseVector, SparseVector)>,
    initial: SparseVector,
    final_marking: SparseVector,
}

fn owned(pairs: &[(&str, u64)]) -> Vec<(String, u64)> {
    pairs.iter().map(|(p, n)| (p.to_string(), *n)).collect()
}

impl NetBuilder {
    pub fn new<S: Into<String>>(places: impl IntoIterator<Item = S>) -> Self {
        NetBuilder {
            places: places.into_iter().map(Into::into).collect(),
            alphabet: Vec::new(),
            transitions: Vec::new(),
            initial: Vec::new(),
            final_marking: Vec::new(),
        }
    }

    /// Declares letters up front, fixing their order in the alphabet.
    pub fn letters<S: Into<String>>(mut self, letters: impl IntoIterator<Item = S>) -> Self {
        for a in letters {
            let a = a.into();
            if !self.alphabet.contains(&a) {
                self.alphabet.push(a);
            }
        }
        self
    }

    pub fn transition(mut self, name: &str, label: &str, pre: &[(&str, u64)], post: &[(&str, u64)]) -> Self {
        if !self.alphabet.iter().any(|a| a == label) {
            self.alphabet.push(label.to_string());
        }
        self.transitions.push((name.into(), label.into(), owned(pre), owned(post)));
        self
    }

    pub fn initial(mut self, m: &[(&str, u64)]) -> Self {
        self.initial = owned(m);
        self
    }

    pub fn final_marking(mut self, m: &[(&str, u64)]) -> Self {
        self.final_marking = owned(m);
        self
    }

    fn marking(places: &[String], pairs: &[(String, u64)]) -> Result<Marking> {
        let mut v = vec![0; places.len()];
        for (p, n) in pairs {
            let i = places
                .iter()
                .position(|q| q == p)
                .ok_or_else(|| Error::InvalidNet(format!("unknown place `{p}`")))?;
            v[i] += n;
        }
        Ok(Marking::new(v))
    }

    pub fn build(self) -> Result<LabeledPetriNet> {
        let transitions = self
            .transitions
            .iter()
            .map(|(name, label, pre, post)| {
                Ok(Transition {
                    name: name.clone(),
                    label: label.clone(),
                    pre: Self::marking(&self.places, pre)?,
                    post: Self::marking(&self.places, post)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let initial = Self::marking(&self.places, &self.initial)?;
        let final_marking = Self::marking(&self.places, &self.final_marking)?;
        LabeledPetriNet::new(self.places, self.alphabet, transitions, initial, final_marking)
    }
}

pub(crate) fn fire_raw(m: &[u64], pre: &[u64], post: &[u64]) -> Result<Option<Marking>> {
    if m.iter().zip(pre).any(|(x, c)| x < c) {
        return Ok(None);
    }
    m.iter()
        .zip(pre.iter().zip(post))
        .map(|(&x, (&i, &o))| (x - i).checked_add(o).ok_or(Error::Overflow))
        .collect::<Result<Vec<_>>>()
        .map(|v| Some(Marking::new(v)))
}

/// Fires `t` at `m`: `M'(p) = M(p) - F(p,t) + F(t,p)`, or `None` if `t` is disabled.
pub fn fire(net: &LabeledPetriNet, m: &Marking, t: TransitionId) -> Result<Option<Marking>> {
    let tr = net.transition(t)?;
    if m.dim() != net.dim() {
        return Err(Error::DimensionMismatch { expected: net.dim(), found: m.dim() });
    }
    fire_raw(m.values(), tr.pre.values(), tr.post.values())
}

/// Componentwise `m >= mf`.
pub fn covers(m: &Marking, mf: &Marking) -> Result<bool> {
    if m.dim() != mf.dim() {
        return Err(Error::DimensionMismatch { expected: mf.dim(), found: m.dim() });
    }
    Ok(mf.leq(m))
}

fn uniquify(names: &mut [String]) {
    let mut seen: HashMap<String, usize> = HashMap::new();
    for n in names.iter() {
        *seen.entry(n.clone()).or_default() += 1;
    }
    let mut used: HashSet<String> = HashSet::new();
    for (i, n) in names.iter_mut().enumerate() {
        if seen[n.as_str()] > 1 || used.contains(n.as_str()) {
            let mut candidate = format!("{n}#{i}");
            while used.contains(&candidate) || seen.contains_key(&candidate) {
                candidate.push('\'');
            }
            *n = candidate;
        }
        used.insert(n.clone());
    }
}

fn union_alphabet(a: &[String], b: &[String]) -> Vec<String> {
    let mut out = a.to_vec();
    for x in b {
        if !out.contains(x) {
            out.push(x.clone());
        }
    }
    out
}

/// Synchronized product: places side by side, one transition per equally labeled pair.
///
/// When the nets share a place name, every place is prefixed with `L.` or `R.`.
pub fn product(n1: &LabeledPetriNet, n2: &LabeledPetriNet) -> LabeledPetriNet {
    let clash = n1.places.iter().any(|p| n2.places.contains(p));
    let places: Vec<String> = if clash {
        n1.places
            .iter()
            .map(|p| format!("L.{p}"))
            .chain(n2.places.iter().map(|p| format!("R.{p}")))
            .collect()
    } else {
        n1.places.iter().chain(&n2.places).cloned().collect()
    };
    let mut transitions = Vec::new();
    for t1 in &n1.transitions {
        for t2 in n2.transitions.iter().filter(|t2| t2.label == t1.label) {
            transitions.push(Transition {
                name: format!("{}|{}", t1.name, t2.name),
                label: t1.label.clone(),
                pre: t1.pre.concat(&t2.pre),
                post: t1.post.concat(&t2.post),
            });
        }
    }
    let mut names: Vec<String> = transitions.iter().map(|t| t.name.clone()).collect();
    uniquify(&mut names);
    for (t, n) in transitions.iter_mut().zip(names) {
        t.name = n;
    }
    LabeledPetriNet {
        places,
        alphabet: union_alphabet(&n1.alphabet, &n2.alphabet),
        transitions,
        initial: n1.initial.concat(&n2.initial),
        final_marking: n1.final_marking.concat(&n2.final_marking),
    }
}

/// The same net over the alphabet of its own transition names (`N_det`).
pub fn identity_labeled(n: &LabeledPetriNet) -> LabeledPetriNet {
    let mut net = n.clone();
    net.alphabet = n.transitions.iter().map(|t| t.name.clone()).collect();
    for t in &mut net.transitions {
        t.label = t.name.clone();
    }
    net
}

/// `N_{-λ}`: for every `a`-labeled `t1` of `n1` and `a`-labeled `t` of `n2`, a copy of
/// `t1` labeled by the name of `t`. The alphabet becomes the transition names of `n2`.
pub fn label_expand(n1: &LabeledPetriNet, n2: &LabeledPetriNet) -> LabeledPetriNet {
    let mut transitions = Vec::new();
    for t1 in &n1.transitions {
        for t in n2.transitions.iter().filter(|t| t.label == t1.label) {
            transitions.push(Transition {
                name: format!("{}^{}", t1.name, t.name),
                label: t.name.clone(),
                pre: t1.pre.clone(),
                post: t1.post.clone(),
            });
        }
    }
    let mut names: Vec<String> = transitions.iter().map(|t| t.name.clone()).collect();
    uniquify(&mut names);
    for (t, n) in transitions.iter_mut().zip(names) {
        t.name = n;
    }
    LabeledPetriNet {
        places: n1.places.clone(),
        alphabet: n2.transitions.iter().map(|t| t.name.clone()).collect(),
        transitions,
        initial: n1.initial.clone(),
        final_marking: n1.final_marking.clone(),
    }
}

/// The labeling `λ : T₂ → Σ` of `n`, as a map from transition name to letter.
pub fn labeling(n: &LabeledPetriNet) -> BTreeMap<String, String> {
    n.transitions.iter().map(|t| (t.name.clone(), t.label.clone())).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetSizeReport {
    pub size: u64,
    pub flow_norm: u64,
    pub initial_norm: u64,
    pub final_norm: u64,
    pub places: usize,
    pub transitions: usize,
}

/// `⌈log₂(1 + x)⌉`, which is the bit length of `x`.
fn log_bits(x: u64) -> u64 {
    u64::from(64 - x.leading_zeros())
}

/// Binary-encoded size `|P|·|T|·(1+⌈log₂(1+‖F‖)⌉) + |M₀| + |M_f|`, where a marking
/// contributes `|P|·(1+⌈log₂(1+‖M‖)⌉)`.
pub fn net_size(n: &LabeledPetriNet) -> NetSizeReport {
    let p = n.places.len() as u64;
    let t = n.transitions.len() as u64;
    let flow_norm = n.flow_norm();
    let marking_size = |m: &Marking| p * (1 + log_bits(m.norm()));
    NetSizeReport {
        size: p * t * (1 + log_bits(flow_norm)) + marking_size(&n.initial) + marking_size(&n.final_marking),
        flow_norm,
        initial_norm: n.initial.norm(),
        final_norm: n.final_marking.norm(),
        places: n.places.len(),
        transitions: n.transitions.len(),
    }
}
