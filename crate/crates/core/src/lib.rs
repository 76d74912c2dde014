//! Entanglement-breaking and entanglement-annihilating analysis of
//! finite-dimensional quantum channels.
//!
//! ```
//! use ea_lab::channels::depolarizing;
//! use ea_lab::criteria::{is_eb, two_lea_verdict_depolarizing, Status, VERDICT_TOL};
//!
//! let e = depolarizing(0.5, 2).unwrap();
//! assert_eq!(is_eb(&e, VERDICT_TOL).status, Status::Entangled);
//! assert_eq!(two_lea_verdict_depolarizing(0.5).unwrap().status, Status::SeparableCertified);
//! ```

pub mod channels;
pub mod criteria;
pub mod error;
pub mod linalg;
pub mod spec;
pub mod states;

pub use channels::Channel;
pub use criteria::{SeparabilityVerdict, Status};
pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, DimsSpec, PartitionSpec};
pub use spec::ChannelSpec;
pub use states::{DensityOperator, PureState};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/tensor-structure.md")]
    mod tensor_structure {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/channels.md")]
    mod channels {}
    #[doc = include_str!("../../../book/src/separability.md")]
    mod separability {}
    #[doc = include_str!("../../../book/src/depolarizing-thresholds.md")]
    mod depolarizing_thresholds {}
    #[doc = include_str!("../../../book/src/falsification.md")]
    mod falsification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
