//! Signal classification in finite-dimensional inner-product spaces.
//!
//! The toolkit revolves around three devices:
//!
//! - **Clustering machines** ([`machine`]): a partition of an orthonormal set
//!   into output groups induces orthogonal projectors Q_α; the scores
//!   q_α(f) = ‖Q_α f‖² say how much of a signal lives in each group, and a
//!   thresholded decision turns the scores into a verdict. When too little
//!   of a signal is captured, the machine extends itself with the
//!   normalized residual.
//! - **Dissimilarity measures** ([`signal`], [`frame`]): the scale-blind
//!   functional F[f,g] = ‖f‖‖g‖ − |⟨f,g⟩|, plain norm distance, and the
//!   frame measures Δ/∇ built from coefficient sup-norms against a
//!   redundant family and its canonical dual. The frame measures keep
//!   ε-cluster membership stable under bounded per-coordinate noise.
//! - **Applications** ([`gates`], [`tones`], [`nnclassify`]): XOR/OR gates
//!   with the projector transport between them, musical tone recognition
//!   from WAV audio via DFT magnitude spectra, and binary nearest-neighbor
//!   diagnosis over labeled feature vectors.

pub mod frame;
pub mod gates;
pub mod machine;
pub mod nnclassify;
pub mod signal;
pub mod tones;

pub use frame::{DissimilarityReport, Frame, FrameError, FrameMeasure};
pub use machine::{
    ClusteringMachine, MachineError, OrthonormalSet, ScoreVector, Verdict, VerdictKind,
};
pub use signal::{dissimilarity_f, inner, norm_ball_member, sq_distance, Signal, SignalError};
