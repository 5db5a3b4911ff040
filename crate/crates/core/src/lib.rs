//! Regular separators for disjoint Petri net coverability languages.
//!
//! The pipeline runs backward coverability on a product net, turns the complement of
//! the predecessor basis into a finite set of ideals, reads a finite automaton off
//! those ideals, and checks the result exactly by reduction to coverability.
//!
//! ```
//! use petrisep_core::{separate, verify_separator, LabeledPetriNet};
//!
//! // a^{≥2} versus {ε, a}
//! let n1 = LabeledPetriNet::builder(["p"])
//!     .transition("t_a", "a", &[], &[("p", 1)])
//!     .final_marking(&[("p", 2)])
//!     .build()?;
//! let n2 = LabeledPetriNet::builder(["q"])
//!     .transition("s_a", "a", &[("q", 1)], &[])
//!     .initial(&[("q", 2)])
//!     .final_marking(&[("q", 1)])
//!     .build()?;
//! let bundle = separate(&n1, &n2, 4)?;
//! assert!(verify_separator(&n1, &n2, &bundle.b_sigma)?.holds());
//! # Ok::<(), petrisep_core::Error>(())
//! ```

pub mod backward;
pub mod benchgen;
pub mod error;
pub mod fa;
pub mod format;
pub mod invariant;
pub mod order;
pub mod petri;
pub mod separator;
pub mod verify;

pub use backward::{coverable, disjoint, prestar_basis, BackwardResult};
pub use error::{Error, Result};
pub use fa::{complement, determinize, member, minimize, net_automaton_empty, relabel, Nfa};
pub use invariant::{check_invariant, invariant_from_backward, InvariantCertificate, DEFAULT_EXPONENT_CONSTANT};
pub use order::{DownSet, Marking, OmegaMarking, OmegaNat, UpSet};
pub use petri::{LabeledPetriNet, TransitionId};
pub use separator::{separate, SeparatorBundle};
pub use verify::{verify_separator, VerifyReport};
