//! Separating automata induced by ideal-decomposed inductive invariants, and the full
//! pipeline from two disjoint nets to a Σ-level separator.
//!
//! The second net is made deterministic by labeling each transition with its own
//! name (`N_det`), and the first net is expanded so that each of its transitions has
//! one copy per equally labeled transition of the second (`N_{-λ}`). The invariant of
//! `N_{-λ} × N_det` yields an automaton `A` containing `L(N_{-λ})` and avoiding
//! `L(N_det)`; complementing `A` and mapping letters back through `λ` gives `B` with
//! `L(N₂) ⊆ L(B)` and `L(N₁) ∩ L(B) = ∅`.
//!
//! `N_det` only has a partial transition function: a disabled transition has no
//! successor. It is completed with a bottom configuration below every marking, which
//! shows up in `A` as a single absorbing accepting state `dead` whose first component
//! is ω everywhere.

use std::collections::{BTreeMap, HashMap};

use log::info;
use serde_json::{json, Value};

use crate::backward::disjoint;
use crate::error::{Error, Result};
use crate::fa::{complement, determinize, relabel, Nfa, State, StateAnnotation};
use crate::format::{net_digest, omega_map, plain_map};
use crate::invariant::{check_invariant, invariant_from_backward, InvariantCertificate};
use crate::order::{succ_on, OmegaMarking};
use crate::petri::{identity_labeled, label_expand, labeling, product, LabeledPetriNet};

/// Name of the absorbing state added by bottom completion.
pub const DEAD_STATE: &str = "dead";

/// A state of the core automaton.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SepState {
    Ordinary(OmegaMarking),
    Dead,
}

/// Builds the automaton whose states are the invariant's ideals plus `dead`.
///
/// `w` is the net to over-approximate and `w_det` an injectively labeled net;
/// `cert` must be an inductive invariant of `product(w, w_det)`.
pub fn build_core_automaton(
    w: &LabeledPetriNet,
    w_det: &LabeledPetriNet,
    cert: &InvariantCertificate,
) -> Result<Nfa> {
    if !w_det.is_injectively_labeled() {
        return Err(Error::CertificateRejected("deterministic side is not injectively labeled".into()));
    }
    let joint = product(w, w_det);
    let report = check_invariant(&joint, &cert.down)?;
    if !report.holds() {
        return Err(Error::CertificateRejected(report.failures().join("; ")));
    }

    let mut alphabet: Vec<String> = w_det.alphabet().to_vec();
    for t in w.transitions() {
        if !alphabet.contains(&t.label) {
            alphabet.push(t.label.clone());
        }
    }
    let letter: HashMap<&str, usize> = alphabet.iter().enumerate().map(|(i, a)| (a.as_str(), i)).collect();
    let det_by_label: HashMap<&str, usize> = w_det
        .transitions()
        .iter()
        .enumerate()
        .map(|(i, t)| (t.label.as_str(), i))
        .collect();

    let d1 = w.dim();
    let ideals = cert.down.ideals();
    let dead = ideals.len();
    let mut states: Vec<State> = ideals
        .iter()
        .map(|u| State { name: u.to_string(), annotation: Some(StateAnnotation::Ideal(u.clone())) })
        .collect();
    states.push(State { name: DEAD_STATE.to_string(), annotation: Some(StateAnnotation::Dead) });

    let start = w.initial().concat(w_det.initial());
    let initial: Vec<usize> = (0..ideals.len()).filter(|&i| ideals[i].contains(&start)).collect();
    let mut accepting: Vec<usize> = (0..ideals.len())
        .filter(|&i| {
            let (side, _) = ideals[i].split_at(d1);
            side.contains(w.final_marking())
        })
        .collect();
    accepting.push(dead);

    let mut transitions = Vec::new();
    for (i, u) in ideals.iter().enumerate() {
        let (u1, u2) = u.split_at(d1);
        for t1 in w.transitions() {
            if succ_on(&u1, t1.pre.values(), t1.post.values())?.is_none() {
                continue;
            }
            let a = letter[t1.label.as_str()];
            let det = det_by_label.get(t1.label.as_str()).map(|&j| &w_det.transitions()[j]);
            match det {
                Some(td) if succ_on(&u2, td.pre.values(), td.post.values())?.is_some() => {
                    let pre = t1.pre.concat(&td.pre);
                    let post = t1.post.concat(&td.post);
                    let s = succ_on(u, pre.values(), post.values())?
                        .expect("both components enable their transitions");
                    let mut found = false;
                    for (r, v) in ideals.iter().enumerate() {
                        if s.leq_unchecked(v) {
                            transitions.push((i, a, r));
                            found = true;
                        }
                    }
                    if !found {
                        return Err(Error::CertificateRejected(format!("successor {s} of {u} escapes")));
                    }
                }
                _ => transitions.push((i, a, dead)),
            }
        }
    }
    for t1 in w.transitions() {
        let a = letter[t1.label.as_str()];
        transitions.push((dead, a, dead));
    }
    Ok(Nfa::new(alphabet, states, transitions, initial, accepting)?.with_annotation_places(joint.places().to_vec()))
}

/// Recovers the typed state of an annotated core automaton state.
pub fn sep_state(a: &Nfa, s: usize) -> Option<SepState> {
    match &a.states()[s].annotation {
        Some(StateAnnotation::Ideal(u)) => Some(SepState::Ordinary(u.clone())),
        Some(StateAnnotation::Dead) => Some(SepState::Dead),
        None => None,
    }
}

/// Where the separator came from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub places: Vec<String>,
    pub basis: Vec<crate::order::Marking>,
    pub ideals: Vec<OmegaMarking>,
    pub first_digest: String,
    pub second_digest: String,
    pub fast_path: bool,
}

impl Provenance {
    pub fn to_json(&self) -> Value {
        json!({
            "places": self.places,
            "basis": self.basis.iter().map(|m| Value::Object(plain_map(&self.places, m))).collect::<Vec<_>>(),
            "ideals": self.ideals.iter().map(|u| Value::Object(omega_map(&self.places, u))).collect::<Vec<_>>(),
            "digests": { "first": self.first_digest, "second": self.second_digest },
            "fast_path": self.fast_path,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SeparatorBundle {
    /// Core automaton over the transition names of the second net (or over Σ on the
    /// fast path).
    pub a_t2: Nfa,
    /// Complete DFA for the complement of `a_t2`.
    pub a_bar: Nfa,
    /// The separator over Σ: contains `L(n2)`, disjoint from `L(n1)`.
    pub b_sigma: Nfa,
    /// `N_{-λ}`, or `n1` itself on the fast path.
    pub expanded: LabeledPetriNet,
    /// `N_det`, or `n2` itself on the fast path.
    pub deterministic: LabeledPetriNet,
    pub product: LabeledPetriNet,
    pub certificate: InvariantCertificate,
    /// `λ : T₂ → Σ`.
    pub labeling: BTreeMap<String, String>,
    pub fast_path: bool,
    pub provenance: Provenance,
}

fn sigma(n1: &LabeledPetriNet, n2: &LabeledPetriNet) -> Vec<String> {
    let mut out = n1.alphabet().to_vec();
    for a in n2.alphabet() {
        if !out.contains(a) {
            out.push(a.clone());
        }
    }
    out
}

/// Separates `L(n2)` from `L(n1)`: the result's `b_sigma` contains `L(n2)` and is
/// disjoint from `L(n1)`.
///
/// When `n2` is already injectively labeled it serves as `N_det` directly and the
/// relabeling step is skipped.
pub fn separate(n1: &LabeledPetriNet, n2: &LabeledPetriNet, c: u32) -> Result<SeparatorBundle> {
    if !disjoint(n1, n2) {
        return Err(Error::NotDisjoint);
    }
    let sigma = sigma(n1, n2);
    let fast_path = n2.is_injectively_labeled();
    let (expanded, deterministic) = if fast_path {
        (n1.clone(), n2.clone())
    } else {
        (label_expand(n1, n2), identity_labeled(n2))
    };
    let joint = product(&expanded, &deterministic);
    let certificate = invariant_from_backward(&joint, c).map_err(|e| match e {
        Error::Coverable => Error::CertificateRejected("expanded product is not empty".into()),
        other => other,
    })?;
    let mut a_t2 = build_core_automaton(&expanded, &deterministic, &certificate)?;
    if fast_path {
        a_t2 = a_t2.with_alphabet_extended(&sigma);
    }
    let a_bar = complement(&determinize(&a_t2))?;
    let lambda = labeling(n2);
    let b_sigma = if fast_path {
        a_bar.clone()
    } else {
        relabel(&a_bar, &lambda)?.with_alphabet_extended(&sigma)
    };
    info!(
        "separate basis={} ideals={} core_states={} complement_states={} separator_states={} fast_path={}",
        certificate.source_basis.basis().len(),
        certificate.down.len(),
        a_t2.num_states(),
        a_bar.num_states(),
        b_sigma.num_states(),
        fast_path
    );
    let provenance = Provenance {
        places: joint.places().to_vec(),
        basis: certificate.source_basis.basis().to_vec(),
        ideals: certificate.down.ideals().to_vec(),
        first_digest: net_digest(n1),
        second_digest: net_digest(n2),
        fast_path,
    };
    Ok(SeparatorBundle {
        a_t2,
        a_bar,
        b_sigma,
        expanded,
        deterministic,
        product: joint,
        certificate,
        labeling: lambda,
        fast_path,
        provenance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fa::member;
    use crate::invariant::DEFAULT_EXPONENT_CONSTANT;
    use crate::order::OmegaNat;

    pub(crate) fn worked_pair() -> (LabeledPetriNet, LabeledPetriNet) {
        let n1 = LabeledPetriNet::builder(["p"])
            .transition("t_a", "a", &[], &[("p", 1)])
            .final_marking(&[("p", 2)])
            .build()
            .unwrap();
        let n2 = LabeledPetriNet::builder(["q"])
            .transition("s_a", "a", &[("q", 1)], &[])
            .initial(&[("q", 2)])
            .final_marking(&[("q", 1)])
            .build()
            .unwrap();
        (n1, n2)
    }

    fn word(n: usize, letter: &str) -> Vec<String> {
        vec![letter.to_string(); n]
    }

    #[test]
    fn worked_core_automaton() {
        let (n1, n2) = worked_pair();
        let w = label_expand(&n1, &n2);
        let det = identity_labeled(&n2);
        let cert = invariant_from_backward(&product(&w, &det), DEFAULT_EXPONENT_CONSTANT).unwrap();
        let a = build_core_automaton(&w, &det, &cert).unwrap();
        assert_eq!(a.num_states(), 4);
        let names: Vec<&str> = a.states().iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["(0,2)", "(1,1)", "(w,0)", "dead"]);
        assert_eq!(a.initial(), &[0]);
        assert_eq!(a.accepting(), &[2, 3]);
        assert_eq!(a.transitions(), &[(0, 0, 1), (1, 0, 2), (2, 0, 3), (3, 0, 3)]);
        for n in 0..=6 {
            assert_eq!(member(&a, &word(n, "s_a")), n >= 2, "length {n}");
        }
        match sep_state(&a, 2) {
            Some(SepState::Ordinary(u)) => assert_eq!(u.values()[0], OmegaNat::Omega),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn worked_separator() {
        let (n1, n2) = worked_pair();
        let bundle = separate(&n1, &n2, DEFAULT_EXPONENT_CONSTANT).unwrap();
        assert!(bundle.fast_path);
        let b = &bundle.b_sigma;
        assert!(member(b, &word(0, "a")));
        assert!(member(b, &word(1, "a")));
        for n in 2..=8 {
            assert!(!member(b, &word(n, "a")));
        }
    }

    #[test]
    fn no_transitions_on_deterministic_side() {
        let (n1, _) = worked_pair();
        let n2 = LabeledPetriNet::builder(["q"])
            .letters(["a"])
            .initial(&[("q", 1)])
            .final_marking(&[("q", 2)])
            .build()
            .unwrap();
        let w = label_expand(&n1, &n2);
        let det = identity_labeled(&n2);
        let cert = invariant_from_backward(&product(&w, &det), DEFAULT_EXPONENT_CONSTANT).unwrap();
        let a = build_core_automaton(&w, &det, &cert).unwrap();
        assert!(a.alphabet().is_empty());
        assert!(a.transitions().iter().all(|&(p, _, q)| p == q));
    }

    #[test]
    fn overlapping_nets_are_refused() {
        let (n1, _) = worked_pair();
        assert!(matches!(separate(&n1, &n1, 4), Err(Error::NotDisjoint)));
    }

    #[test]
    fn rejects_bogus_certificates() {
        let (n1, n2) = worked_pair();
        let mut cert = invariant_from_backward(&product(&n1, &n2), 4).unwrap();
        cert.down = crate::order::DownSet::new(2, vec![OmegaMarking::top(2)]).unwrap();
        assert!(matches!(
            build_core_automaton(&n1, &n2, &cert),
            Err(Error::CertificateRejected(_))
        ));
    }
}
