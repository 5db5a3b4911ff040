//! Backward coverability: saturation of the predecessor basis of `↑M_f`.

use std::collections::VecDeque;

use log::debug;

use crate::error::{Error, Result};
use crate::order::{canonicalize_up, Marking, UpSet};
use crate::petri::{fire, product, LabeledPetriNet, TransitionId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BackwardResult {
    /// Minimal basis of `Pre*(↑M_f)`.
    pub basis: UpSet,
    /// Number of basis elements whose predecessors were expanded.
    pub iterations: usize,
    /// Whether `M₀` lies in `↑basis`.
    pub coverable: bool,
    /// A transition sequence from `M₀` to a marking covering `M_f`, when one exists.
    pub witness: Option<Vec<TransitionId>>,
}

/// The minimal `m` such that `t` is enabled at `m` and `fire(m, t) >= v`:
/// `m(p) = max(v(p) - F(t,p) + F(p,t), F(p,t))`.
pub fn pred_basis(net: &LabeledPetriNet, v: &Marking, t: TransitionId) -> Result<Marking> {
    let tr = net.transition(t)?;
    if v.dim() != net.dim() {
        return Err(Error::DimensionMismatch { expected: net.dim(), found: v.dim() });
    }
    pred_raw(v.values(), tr.pre.values(), tr.post.values())
}

pub(crate) fn pred_raw(v: &[u64], pre: &[u64], post: &[u64]) -> Result<Marking> {
    v.iter()
        .zip(pre.iter().zip(post))
        .map(|(&x, (&i, &o))| Ok(x.checked_add(i).ok_or(Error::Overflow)?.saturating_sub(o).max(i)))
        .collect::<Result<Vec<_>>>()
        .map(Marking::new)
}

struct Node {
    marking: Marking,
    sum: u64,
    parent: Option<(usize, TransitionId)>,
    alive: bool,
}

/// The state of a finished saturation, keeping how each basis element was derived.
pub struct Saturation {
    nodes: Vec<Node>,
    active: Vec<usize>,
    iterations: usize,
}

impl Saturation {
    /// Saturates `↑target` under predecessors of every transition of `net`.
    ///
    /// FIFO worklist; a newcomer dominated by a live element is dropped, and live
    /// elements dominated by a newcomer are evicted. Terminates by Dickson's lemma.
    pub fn run(net: &LabeledPetriNet, target: &Marking) -> Result<Saturation> {
        if target.dim() != net.dim() {
            return Err(Error::DimensionMismatch { expected: net.dim(), found: target.dim() });
        }
        let mut nodes = vec![Node {
            sum: target.values().iter().sum(),
            marking: target.clone(),
            parent: None,
            alive: true,
        }];
        let mut active = vec![0usize];
        let mut queue = VecDeque::from([0usize]);
        let mut iterations = 0;
        while let Some(i) = queue.pop_front() {
            if !nodes[i].alive {
                // Predecessors of an evicted element are dominated by those of its evictor.
                continue;
            }
            iterations += 1;
            for (ti, tr) in net.transitions().iter().enumerate() {
                let m = pred_raw(nodes[i].marking.values(), tr.pre.values(), tr.post.values())?;
                let sum: u64 = m.values().iter().sum();
                if active
                    .iter()
                    .any(|&j| nodes[j].sum <= sum && nodes[j].marking.leq(&m))
                {
                    continue;
                }
                active.retain(|&j| {
                    let dominated = sum <= nodes[j].sum && m.leq(&nodes[j].marking);
                    if dominated {
                        nodes[j].alive = false;
                    }
                    !dominated
                });
                let id = nodes.len();
                nodes.push(Node { marking: m, sum, parent: Some((i, TransitionId(ti))), alive: true });
                active.push(id);
                queue.push_back(id);
            }
        }
        Ok(Saturation { nodes, active, iterations })
    }

    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn basis(&self) -> UpSet {
        let dim = self.nodes[0].marking.dim();
        canonicalize_up(dim, self.active.iter().map(|&j| self.nodes[j].marking.clone()).collect())
    }

    /// A run from `m` covering the target, built by following the derivation chain of a
    /// basis element below `m`.
    pub fn witness_from(&self, m: &Marking) -> Option<Vec<TransitionId>> {
        let mut best: Option<usize> = None;
        for &j in &self.active {
            if self.nodes[j].marking.leq(m) {
                best = match best {
                    Some(b) if self.nodes[b].marking <= self.nodes[j].marking => Some(b),
                    _ => Some(j),
                };
            }
        }
        let mut cur = best?;
        let mut word = Vec::new();
        while let Some((parent, t)) = self.nodes[cur].parent {
            word.push(t);
            cur = parent;
        }
        Some(word)
    }
}

/// Backward saturation from `↑M_f`, with the coverability verdict for `M₀`.
pub fn prestar_basis(net: &LabeledPetriNet) -> BackwardResult {
    let sat = Saturation::run(net, net.final_marking()).expect("final marking matches the net's dimension");
    let basis = sat.basis();
    let witness = sat.witness_from(net.initial());
    debug!(
        "prestar places={} transitions={} basis={} iterations={}",
        net.dim(),
        net.transitions().len(),
        basis.basis().len(),
        sat.iterations
    );
    BackwardResult {
        coverable: basis.contains(net.initial()),
        basis,
        iterations: sat.iterations,
        witness,
    }
}

pub fn coverable(net: &LabeledPetriNet) -> bool {
    prestar_basis(net).coverable
}

/// `L(n1) ∩ L(n2) = ∅`, decided on the synchronized product.
pub fn disjoint(n1: &LabeledPetriNet, n2: &LabeledPetriNet) -> bool {
    !coverable(&product(n1, n2))
}

/// Replays `word` from `start`; `None` if some transition is disabled on the way.
pub fn replay(net: &LabeledPetriNet, start: &Marking, word: &[TransitionId]) -> Result<Option<Marking>> {
    let mut m = start.clone();
    for &t in word {
        match fire(net, &m, t)? {
            Some(next) => m = next,
            None => return Ok(None),
        }
    }
    Ok(Some(m))
}
