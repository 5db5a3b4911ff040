//! Markings, ω-markings and the up/down-closed subsets of ℕ^d they generate.
//!
//! An [`OmegaMarking`] `u` stands for the ideal `↓u`, the set of markings bounded by
//! `u` componentwise. Every downward-closed subset of ℕ^d is a finite union of such
//! ideals, and every upward-closed subset is the upward closure of its finitely many
//! minimal elements; [`DownSet`] and [`UpSet`] keep those representations canonical.

use std::fmt;

use crate::error::{Error, Result};
use crate::petri::{LabeledPetriNet, TransitionId};

/// A natural number or ω, the top element.
///
/// Variant order matters: the derived `Ord` places every `Fin` below `Omega`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum OmegaNat {
    Fin(u64),
    Omega,
}

impl OmegaNat {
    pub fn is_omega(self) -> bool {
        matches!(self, OmegaNat::Omega)
    }

    /// `self - c`, only meaningful when `self >= c`.
    fn sub(self, c: u64) -> OmegaNat {
        match self {
            OmegaNat::Fin(n) => OmegaNat::Fin(n - c),
            OmegaNat::Omega => OmegaNat::Omega,
        }
    }

    fn add(self, c: u64) -> Result<OmegaNat> {
        match self {
            OmegaNat::Fin(n) => n.checked_add(c).map(OmegaNat::Fin).ok_or(Error::Overflow),
            OmegaNat::Omega => Ok(OmegaNat::Omega),
        }
    }

    fn geq(self, c: u64) -> bool {
        match self {
            OmegaNat::Fin(n) => n >= c,
            OmegaNat::Omega => true,
        }
    }
}

impl fmt::Display for OmegaNat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaNat::Fin(n) => write!(f, "{n}"),
            OmegaNat::Omega => f.write_str("w"),
        }
    }
}

impl From<u64> for OmegaNat {
    fn from(n: u64) -> Self {
        OmegaNat::Fin(n)
    }
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

/// Token counts indexed by place.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Marking(Vec<u64>);

impl Marking {
    pub fn new(values: Vec<u64>) -> Self {
        Marking(values)
    }

    pub fn zero(dim: usize) -> Self {
        Marking(vec![0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[u64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<u64> {
        self.0
    }

    /// Infinity norm; 0 for the empty vector.
    pub fn norm(&self) -> u64 {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// Componentwise `self <= other`. Callers guarantee equal dimensions.
    pub fn leq(&self, other: &Marking) -> bool {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub fn concat(&self, other: &Marking) -> Marking {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Marking(v)
    }

    pub fn split_at(&self, at: usize) -> (Marking, Marking) {
        let (a, b) = self.0.split_at(at);
        (Marking(a.to_vec()), Marking(b.to_vec()))
    }
}

impl From<Vec<u64>> for Marking {
    fn from(v: Vec<u64>) -> Self {
        Marking(v)
    }
}

impl fmt::Display for Marking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// A vector over ℕ ∪ {ω}, denoting the ideal `↓u`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OmegaMarking(Vec<OmegaNat>);

impl OmegaMarking {
    pub fn new(values: Vec<OmegaNat>) -> Self {
        OmegaMarking(values)
    }

    pub fn top(dim: usize) -> Self {
        OmegaMarking(vec![OmegaNat::Omega; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[OmegaNat] {
        &self.0
    }

    /// Largest finite coordinate, with ω treated as zero.
    pub fn finite_norm(&self) -> u64 {
        self.0
            .iter()
            .map(|v| match v {
                OmegaNat::Fin(n) => *n,
                OmegaNat::Omega => 0,
            })
            .max()
            .unwrap_or(0)
    }

    pub(crate) fn leq_unchecked(&self, other: &OmegaMarking) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a <= b)
    }

    pub(crate) fn meet_unchecked(&self, other: &OmegaMarking) -> OmegaMarking {
        OmegaMarking(self.0.iter().zip(&other.0).map(|(a, b)| *a.min(b)).collect())
    }

    /// Whether `m ∈ ↓self`.
    pub fn contains(&self, m: &Marking) -> bool {
        self.0.iter().zip(m.values()).all(|(u, &x)| u.geq(x))
    }

    pub fn split_at(&self, at: usize) -> (OmegaMarking, OmegaMarking) {
        let (a, b) = self.0.split_at(at);
        (OmegaMarking(a.to_vec()), OmegaMarking(b.to_vec()))
    }
}

impl From<&Marking> for OmegaMarking {
    fn from(m: &Marking) -> Self {
        OmegaMarking(m.values().iter().map(|&v| OmegaNat::Fin(v)).collect())
    }
}

impl fmt::Display for OmegaMarking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, v) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str(")")
    }
}

/// An upward-closed set, kept as the antichain of its minimal elements.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UpSet {
    dim: usize,
    basis: Vec<Marking>,
}

impl UpSet {
    pub fn new(dim: usize, vectors: Vec<Marking>) -> Result<Self> {
        for v in &vectors {
            check_dim(dim, v.dim())?;
        }
        Ok(canonicalize_up(dim, vectors))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn basis(&self) -> &[Marking] {
        &self.basis
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Infinity norm of the basis; 0 when the basis is empty.
    pub fn norm(&self) -> u64 {
        self.basis.iter().map(Marking::norm).max().unwrap_or(0)
    }

    pub fn contains(&self, m: &Marking) -> bool {
        self.basis.iter().any(|b| b.leq(m))
    }
}

/// A downward-closed set, kept as the antichain of its maximal ideals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DownSet {
    dim: usize,
    ideals: Vec<OmegaMarking>,
}

impl DownSet {
    pub fn new(dim: usize, ideals: Vec<OmegaMarking>) -> Result<Self> {
        for u in &ideals {
            check_dim(dim, u.dim())?;
        }
        Ok(canonicalize_down(dim, ideals))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ideals(&self) -> &[OmegaMarking] {
        &self.ideals
    }

    pub fn len(&self) -> usize {
        self.ideals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ideals.is_empty()
    }

    pub fn contains(&self, m: &Marking) -> bool {
        self.ideals.iter().any(|u| u.contains(m))
    }

    /// Whether `↓u` is contained in this set, i.e. `u` lies below one of the ideals.
    pub fn includes_ideal(&self, u: &OmegaMarking) -> bool {
        self.ideals.iter().any(|v| u.leq_unchecked(v))
    }
}

/// Inclusion of ideals: `↓u ⊆ ↓v` iff `u <= v` componentwise.
pub fn omega_leq(u: &OmegaMarking, v: &OmegaMarking) -> Result<bool> {
    check_dim(u.dim(), v.dim())?;
    Ok(u.leq_unchecked(v))
}

/// Intersection of two ideals, the componentwise minimum.
pub fn intersect_ideals(u: &OmegaMarking, v: &OmegaMarking) -> Result<OmegaMarking> {
    check_dim(u.dim(), v.dim())?;
    Ok(u.meet_unchecked(v))
}

pub fn member_down(m: &Marking, x: &DownSet) -> Result<bool> {
    check_dim(x.dim, m.dim())?;
    Ok(x.contains(m))
}

pub fn member_up(m: &Marking, u: &UpSet) -> Result<bool> {
    check_dim(u.dim, m.dim())?;
    Ok(u.contains(m))
}

/// Keeps the maximal ideals, sorted lexicographically with ω greatest.
pub fn canonicalize_down(dim: usize, mut ideals: Vec<OmegaMarking>) -> DownSet {
    ideals.sort();
    ideals.dedup();
    let keep: Vec<bool> = ideals
        .iter()
        .enumerate()
        .map(|(i, u)| {
            !ideals
                .iter()
                .enumerate()
                .any(|(j, v)| i != j && u.leq_unchecked(v))
        })
        .collect();
    let ideals = ideals
        .into_iter()
        .zip(keep)
        .filter_map(|(u, k)| k.then_some(u))
        .collect();
    DownSet { dim, ideals }
}

/// Keeps the minimal vectors, sorted lexicographically.
pub fn canonicalize_up(dim: usize, mut vectors: Vec<Marking>) -> UpSet {
    vectors.sort();
    vectors.dedup();
    let keep: Vec<bool> = vectors
        .iter()
        .enumerate()
        .map(|(i, m)| !vectors.iter().enumerate().any(|(j, b)| i != j && b.leq(m)))
        .collect();
    let basis = vectors
        .into_iter()
        .zip(keep)
        .filter_map(|(m, k)| k.then_some(m))
        .collect();
    UpSet { dim, basis }
}

/// Ideal decomposition of `ℕ^d \ ↑v` for a single vector: one ideal per nonzero
/// coordinate `j`, equal to ω everywhere except `v(j) - 1` at `j`.
fn complement_of_cone(v: &Marking) -> Vec<OmegaMarking> {
    let d = v.dim();
    v.values()
        .iter()
        .enumerate()
        .filter(|(_, &x)| x > 0)
        .map(|(j, &x)| {
            let mut u = vec![OmegaNat::Omega; d];
            u[j] = OmegaNat::Fin(x - 1);
            OmegaMarking(u)
        })
        .collect()
}

/// The canonical ideal decomposition of `ℕ^d \ U`.
///
/// The complement of each cone `↑v` is a union of ideals; these unions are
/// intersected one basis vector at a time, distributing intersection over union and
/// canonicalizing after every step.
pub fn complement_upset(up: &UpSet) -> DownSet {
    let d = up.dim;
    let mut acc = vec![OmegaMarking::top(d)];
    for v in &up.basis {
        let cone = complement_of_cone(v);
        let mut next = Vec::with_capacity(acc.len() * cone.len());
        for x in &acc {
            for u in &cone {
                next.push(x.meet_unchecked(u));
            }
        }
        acc = canonicalize_down(d, next).ideals;
        if acc.is_empty() {
            break;
        }
    }
    DownSet { dim: d, ideals: acc }
}

/// Successor of the ideal `↓u` under transition `t`.
///
/// For Petri nets the set `{ fire(m, t) : m ∈ ↓u }` has a single maximal ideal, obtained
/// by firing `t` on `u` itself with ω absorbing; `None` when `t` is disabled on `u`.
pub fn ideal_succ(
    net: &LabeledPetriNet,
    u: &OmegaMarking,
    t: TransitionId,
) -> Result<Option<OmegaMarking>> {
    let tr = net.transition(t)?;
    check_dim(net.places().len(), u.dim())?;
    succ_on(u, tr.pre.values(), tr.post.values())
}

pub(crate) fn succ_on(u: &OmegaMarking, pre: &[u64], post: &[u64]) -> Result<Option<OmegaMarking>> {
    if !u.0.iter().zip(pre).all(|(x, &c)| x.geq(c)) {
        return Ok(None);
    }
    let values = u
        .0
        .iter()
        .zip(pre.iter().zip(post))
        .map(|(x, (&i, &o))| x.sub(i).add(o))
        .collect::<Result<Vec<_>>>()?;
    Ok(Some(OmegaMarking(values)))
}

/// Whether `↓u` meets `↑m`, i.e. `u >= m` with ω above everything.
pub fn ideal_covers(u: &OmegaMarking, m: &Marking) -> bool {
    u.contains(m)
}
