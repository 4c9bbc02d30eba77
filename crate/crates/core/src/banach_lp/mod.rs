//! Finite-support `l_p` vectors, the disjoint-coordinate counterexample, Rademacher
//! probes and the Marcus-Pisier maximal inequality.

pub mod marcus_pisier;
pub mod probe;
pub mod sequence;
pub mod vector;

pub use marcus_pisier::{marcus_pisier_check, sup_tail_moment, MarcusPisierReport, MarcusPisierRow};
pub use probe::{counterexample_path, rademacher_probe, CounterexamplePath, ProbeReport, ProbeSettings};
pub use sequence::{LpAccumulator, LpSequence, ProbeRule};
pub use vector::{lp_norm, LpVector};
