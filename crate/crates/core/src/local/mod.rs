pub mod lattice;
pub mod module;
pub mod random;
pub mod root;

pub use lattice::{smith_exponents, LMat, Lattice};
pub use module::{check_unit, tame_base_change, LocalUnitModule, UnitDiagnostics};
pub use root::{
    DEFAULT_PRECISION,
    greedy_minimal_root, is_root, local_invariant_homs, minimal_root, minimal_root_index, phi_span,
    root_dual, root_filtration, Frame, GenerationTrace, IndexValue, InvariantHoms, RootCertificate,
    RootOptions, RootStatus,
};
