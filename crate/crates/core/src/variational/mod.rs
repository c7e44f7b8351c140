//! Variational equation along the separatrix: reduction frame, connection
//! matrices, the monodromy pair and its commutator, and a numerical
//! complex-time continuation of the monodromy.

pub mod asymptotics;
pub mod connection;
pub mod continuation;
pub mod monodromy;

pub use asymptotics::{
    chi_closed_form, chi_limit_numeric, fundamental_x, orbit_asymptotics, reduction_mode, xi_limit,
    OrbitAsymptotics, ReductionFrame, ReductionMode, Side,
};
pub use connection::{connection_matrices, Connection, ConnectionOpts};
pub use continuation::{
    forced_solution, monodromy_via_continuation, ContinuationOpts, ContinuationResult,
};
pub use monodromy::{
    asymptotic_data, c_vector, c_vectors, commutator_certificate, m_values, matrix_entries,
    monodromy_pair, AsymptoticData, MonodromyPair, MonodromyReport, VariationalOpts,
    TOL_COMMUTATOR,
};
