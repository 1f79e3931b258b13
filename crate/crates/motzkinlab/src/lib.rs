//! A computational laboratory for a frustration-free spin-1 chain whose
//! ground state is the uniform superposition of Motzkin paths.
//!
//! The chain lives on `n` sites with local basis `{0, l, r}`: `l` and `r`
//! are matching brackets, `0` is a blank.  The Hamiltonian is a sum of
//! rank-3 nearest-neighbour projectors plus two boundary penalties; its
//! unique zero mode in the balanced sector is the uniform Motzkin state.
//! The crate provides
//!
//! * exact bracket-string combinatorics (counts, enumeration, ranking),
//! * sparse Hamiltonian assembly, full-space or restricted to one
//!   unmatched-bracket sector,
//! * a deterministic dense/Lanczos eigensolver and spectral-gap scans,
//! * exact Schmidt spectra and half-chain entanglement entropy,
//! * the ground-state random walk on Dyck paths with exact rational
//!   transition matrix, canonical paths and congestion bounds,
//! * a layered parent tree over Dyck paths (stochastic rule table plus
//!   two derandomized parent maps), and
//! * the unbalanced-sector reduction: marker Hamiltonians, the effective
//!   hopping chain and its walk.
//!
//! Everything that can be exact is exact: counts are big integers,
//! probabilities and stationary distributions are big rationals, and
//! matrix elements of the unweighted Hamiltonians are dyadic (multiples
//! of 1/2, hence exactly representable in `f64`).

pub mod combinatorics;
pub mod dyckwalk;
pub mod eigensolve;
pub mod entanglement;
pub mod error;
pub mod hamiltonian;
pub mod numerics;
pub mod supertree;
pub mod unbalanced;
pub mod verify;

pub use error::{Error, Result};

/// Artifact version reported by every output stream.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Worker-thread cap read from `MOTZKINLAB_THREADS` (defaults to the
/// number of available cores).  Scans that solve independent problems
/// may fan out up to this width; results never depend on it.
pub fn thread_cap() -> usize {
    let available = std::thread::available_parallelism()
        .map(|p| p.get())
        .unwrap_or(1);
    match std::env::var("MOTZKINLAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(k) if k >= 1 => k,
            _ => available,
        },
        Err(_) => available,
    }
}
