//! Inductive invariants as ideal decompositions of the complement of `Pre*`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::backward::prestar_basis;
use crate::error::{Error, Result};
use crate::order::{complement_upset, ideal_covers, succ_on, DownSet, OmegaMarking, UpSet};
use crate::petri::{LabeledPetriNet, TransitionId};

/// Default additive constant in the exponent of [`theoretical_bound`].
pub const DEFAULT_EXPONENT_CONSTANT: u32 = 4;

/// `g = base^(2^exponent_log2)`, kept symbolic because it is usually far too large
/// to materialize.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TheoreticalBound {
    pub base: BigUint,
    pub exponent_log2: u64,
}

impl TheoreticalBound {
    /// Whether `g >= x`, decided without expanding `g` when it is huge.
    pub fn dominates(&self, x: &BigUint) -> bool {
        if self.base.is_zero() {
            return x.is_zero();
        }
        if self.base.is_one() {
            return *x <= BigUint::one();
        }
        // base >= 2, so g >= 2^(2^e) > x whenever 2^e >= bits(x).
        if self.exponent_log2 >= 64 || (1u64 << self.exponent_log2) >= x.bits() {
            return true;
        }
        self.base.pow(1u32 << self.exponent_log2) >= *x
    }

    pub fn dominates_u64(&self, x: u64) -> bool {
        self.dominates(&BigUint::from(x))
    }

    /// The exact value, if it has at most `max_bits` bits.
    pub fn value(&self, max_bits: u64) -> Option<BigUint> {
        if self.base.is_zero() || self.base.is_one() {
            return Some(self.base.clone());
        }
        if self.exponent_log2 >= 32 {
            return None;
        }
        let exp = 1u64 << self.exponent_log2;
        if exp.checked_mul(self.base.bits())? > max_bits {
            return None;
        }
        Some(self.base.pow(exp as u32))
    }
}

impl fmt::Display for TheoreticalBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^(2^{})", self.base, self.exponent_log2)
    }
}

fn ceil_log2(n: usize) -> u64 {
    if n <= 1 {
        0
    } else {
        u64::from(usize::BITS - (n - 1).leading_zeros())
    }
}

/// `(|T|·(‖F‖+‖M₀‖+‖M_f‖+2))^(2^(|P|·⌈log₂|P|⌉ + c))`, bounding both the number and the
/// norm of basis elements of `Pre*`. The constant `c` stands in for the unknown
/// constant of the asymptotic exponent.
pub fn theoretical_bound(net: &LabeledPetriNet, c: u32) -> TheoreticalBound {
    let t = net.transitions().len() as u64;
    let base = BigUint::from(t)
        * (BigUint::from(net.flow_norm())
            + BigUint::from(net.initial().norm())
            + BigUint::from(net.final_marking().norm())
            + BigUint::from(2u32));
    let p = net.dim();
    TheoreticalBound { base, exponent_log2: p as u64 * ceil_log2(p) + u64::from(c) }
}

#[derive(Clone, Debug)]
pub struct InvariantCertificate {
    /// The invariant as its maximal ideals.
    pub down: DownSet,
    pub source_basis: UpSet,
    pub bound: TheoreticalBound,
    /// `(‖basis‖+2)^d`, an upper bound on the number of ideals.
    pub ideal_count_bound: BigUint,
}

/// The greatest inductive invariant `ℕ^d \ Pre*(↑M_f)`, decomposed into ideals.
pub fn invariant_from_backward(net: &LabeledPetriNet, c: u32) -> Result<InvariantCertificate> {
    let back = prestar_basis(net);
    if back.coverable {
        return Err(Error::Coverable);
    }
    Ok(certificate_from_basis(net, back.basis, c))
}

pub fn certificate_from_basis(net: &LabeledPetriNet, basis: UpSet, c: u32) -> InvariantCertificate {
    let down = complement_upset(&basis);
    let ideal_count_bound = BigUint::from(basis.norm() + 2).pow(basis.dim() as u32);
    InvariantCertificate { down, source_basis: basis, bound: theoretical_bound(net, c), ideal_count_bound }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuccViolation {
    pub ideal: OmegaMarking,
    pub transition: TransitionId,
    pub successor: OmegaMarking,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvariantReport {
    /// `M₀ ∈ X`.
    pub contains_initial: bool,
    /// Ideals meeting `↑M_f`.
    pub final_violations: Vec<OmegaMarking>,
    /// Successor ideals not below any ideal of `X`.
    pub succ_violations: Vec<SuccViolation>,
}

impl InvariantReport {
    pub fn holds(&self) -> bool {
        self.contains_initial && self.final_violations.is_empty() && self.succ_violations.is_empty()
    }

    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !self.contains_initial {
            out.push("initial marking not contained".to_string());
        }
        for u in &self.final_violations {
            out.push(format!("ideal {u} meets the final set"));
        }
        for v in &self.succ_violations {
            out.push(format!(
                "successor {} of {} under t{} escapes",
                v.successor, v.ideal, v.transition.0
            ));
        }
        out
    }
}

/// Checks the three defining properties of an inductive invariant on an ideal list.
pub fn check_invariant(net: &LabeledPetriNet, x: &DownSet) -> Result<InvariantReport> {
    if x.dim() != net.dim() {
        return Err(Error::DimensionMismatch { expected: net.dim(), found: x.dim() });
    }
    let contains_initial = x.contains(net.initial());
    let final_violations = x
        .ideals()
        .iter()
        .filter(|u| ideal_covers(u, net.final_marking()))
        .cloned()
        .collect();
    let mut succ_violations = Vec::new();
    for u in x.ideals() {
        for (ti, tr) in net.transitions().iter().enumerate() {
            if let Some(s) = succ_on(u, tr.pre.values(), tr.post.values())? {
                if !x.includes_ideal(&s) {
                    succ_violations.push(SuccViolation {
                        ideal: u.clone(),
                        transition: TransitionId(ti),
                        successor: s,
                    });
                }
            }
        }
    }
    Ok(InvariantReport { contains_initial, final_violations, succ_violations })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundReport {
    pub basis_size_ok: bool,
    pub basis_norm_ok: bool,
    pub ideal_count_ok: bool,
}

impl BoundReport {
    pub fn holds(&self) -> bool {
        self.basis_size_ok && self.basis_norm_ok && self.ideal_count_ok
    }
}

/// Compares a certificate against the size bounds.
///
/// Without transitions the base of `g` is zero while the basis is exactly `{M_f}`;
/// that degenerate case is checked for equality instead.
pub fn bound_conformance(net: &LabeledPetriNet, cert: &InvariantCertificate) -> BoundReport {
    let basis = &cert.source_basis;
    let ideal_count_ok = BigUint::from(cert.down.len()) <= cert.ideal_count_bound;
    if net.transitions().is_empty() {
        let exact = basis.basis() == std::slice::from_ref(net.final_marking());
        return BoundReport { basis_size_ok: exact, basis_norm_ok: exact, ideal_count_ok };
    }
    BoundReport {
        basis_size_ok: cert.bound.dominates_u64(basis.basis().len() as u64),
        basis_norm_ok: cert.bound.dominates_u64(basis.norm()),
        ideal_count_ok,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::order::{Marking, OmegaNat};
    use crate::petri::product;

    fn om(v: &[Option<u64>]) -> OmegaMarking {
        OmegaMarking::new(v.iter().map(|x| x.map_or(OmegaNat::Omega, OmegaNat::Fin)).collect())
    }
    const W: Option<u64> = None;

    fn worked_product() -> LabeledPetriNet {
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
        product(&n1, &n2)
    }

    #[test]
    fn worked_invariant() {
        let net = worked_product();
        let cert = invariant_from_backward(&net, DEFAULT_EXPONENT_CONSTANT).unwrap();
        assert_eq!(
            cert.down.ideals(),
            &[om(&[Some(0), Some(2)]), om(&[Some(1), Some(1)]), om(&[W, Some(0)])]
        );
        let report = check_invariant(&net, &cert.down).unwrap();
        assert!(report.holds(), "{:?}", report.failures());
        assert!(bound_conformance(&net, &cert).holds());
    }

    #[test]
    fn single_vector_basis() {
        let up = UpSet::new(2, vec![Marking::new(vec![1, 0])]).unwrap();
        assert_eq!(complement_upset(&up).ideals(), &[om(&[Some(0), W])]);
    }

    #[test]
    fn coverable_net_has_no_invariant() {
        let net = LabeledPetriNet::builder(["p"]).letters(["a"]).build().unwrap();
        assert!(matches!(invariant_from_backward(&net, 4), Err(Error::Coverable)));
    }

    #[test]
    fn broken_invariants_are_reported() {
        let net = LabeledPetriNet::builder(["p", "q"])
            .transition("t", "a", &[], &[("p", 1)])
            .final_marking(&[("p", 1)])
            .build()
            .unwrap();
        let top = DownSet::new(2, vec![om(&[W, W])]).unwrap();
        let r = check_invariant(&net, &top).unwrap();
        assert!(r.contains_initial);
        assert_eq!(r.final_violations.len(), 1);

        let empty = DownSet::new(2, vec![]).unwrap();
        let r = check_invariant(&net, &empty).unwrap();
        assert!(!r.contains_initial);

        let stuck = DownSet::new(2, vec![om(&[Some(0), W])]).unwrap();
        let r = check_invariant(&net, &stuck).unwrap();
        assert_eq!(r.succ_violations.len(), 1);
        assert_eq!(r.succ_violations[0].successor, om(&[Some(1), W]));
    }

    #[test]
    fn bound_example() {
        let net = LabeledPetriNet::builder(["p", "q"])
            .transition("t", "a", &[("p", 1)], &[])
            .final_marking(&[("q", 2)])
            .build()
            .unwrap();
        let g = theoretical_bound(&net, 4);
        assert_eq!(g.base, BigUint::from(5u32));
        assert_eq!(g.exponent_log2, 6);
        assert_eq!(g.value(1 << 20).unwrap(), BigUint::from(5u32).pow(64));
        assert!(g.dominates(&BigUint::from(5u32).pow(64)));
        assert!(!g.dominates(&(BigUint::from(5u32).pow(64) + 1u32)));
    }

    #[test]
    fn degenerate_bound() {
        let net = LabeledPetriNet::builder(["p"]).letters(["a"]).final_marking(&[("p", 1)]).build().unwrap();
        let g = theoretical_bound(&net, 4);
        assert_eq!(g.value(64), Some(BigUint::zero()));
        let cert = invariant_from_backward(&net, 4).unwrap();
        assert!(bound_conformance(&net, &cert).holds());
    }

    #[test]
    fn bound_is_monotone_in_norms() {
        let mk = |f: u64, m0: u64, mf: u64| {
            LabeledPetriNet::builder(["p", "q"])
                .transition("t", "a", &[("p", f)], &[])
                .initial(&[("q", m0)])
                .final_marking(&[("p", mf)])
                .build()
                .unwrap()
        };
        let a = theoretical_bound(&mk(1, 1, 1), 4);
        for b in [mk(2, 1, 1), mk(1, 2, 1), mk(1, 1, 2)] {
            let b = theoretical_bound(&b, 4);
            assert!(b.base > a.base);
            assert_eq!(b.exponent_log2, a.exponent_log2);
        }
    }

    #[test]
    fn huge_bounds_compare_symbolically() {
        let g = TheoreticalBound { base: BigUint::from(3u32), exponent_log2: 90 };
        assert!(g.dominates_u64(u64::MAX));
        assert!(g.value(1 << 20).is_none());
    }
}
