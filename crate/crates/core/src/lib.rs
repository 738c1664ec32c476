//! Entanglement measures, PPT-set optimization and merging classification for
//! tripartite quantum states.
//!
//! The crate is organized bottom-up:
//!
//! * [`linalg`] and [`state`]: dense Hermitian algebra over tensor-factored
//!   spaces (tensor products, partial traces, partial transposes, spectra).
//! * [`measures`]: entropies, fidelity, trace distance, logarithmic negativity
//!   and one-sided distillability witnesses.
//! * [`bloch`]: generalized Gell-Mann bases and Bloch-vector rank certificates.
//! * [`families`]: the concrete state families used as fixtures and examples.
//! * [`ppt_opt`]: projections and optimization over PPT states.
//! * [`classify`]: per-criterion evaluation and the final merging verdict.
//!
//! Subsystem ordering is big-endian everywhere: the first listed subsystem is
//! the most significant tensor index. All entropic quantities are in bits.

pub mod bloch;
pub mod classify;
pub mod error;
pub mod families;
pub mod linalg;
pub mod measures;
pub mod ppt_opt;
pub mod sample;
pub mod state;

pub use classify::{classify, ClassificationReport, Verdict};
pub use error::{Error, Result};
pub use state::{Bipartition, DensityMatrix, Party, PureState, TripartiteState};

// The README and the guide's chapters compile and run as doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../README.md")]
    mod readme {}
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/states.md")]
    mod states {}
    #[doc = include_str!("../../../book/src/measures.md")]
    mod measures {}
    #[doc = include_str!("../../../book/src/bloch.md")]
    mod bloch {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/ppt-optimization.md")]
    mod ppt_optimization {}
    #[doc = include_str!("../../../book/src/classification.md")]
    mod classification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
