//! Independent checks: exhaustive root search, the Hasse invariant and
//! topological Euler characteristics.

pub mod brute;
pub mod hasse;
pub mod topological;

pub use brute::{
    brute_force_minimal_root, certify_minimal_root, roots_in_box, sample_lattice, Certification,
    SearchBox,
};
pub use hasse::{hasse_invariant, hasse_witt_genus1, Reduction};
pub use topological::{chi_topological, OracleReport};
