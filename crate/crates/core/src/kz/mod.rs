//! Verma and confluent Verma modules, the KZ-type Hamiltonians built on them,
//! and their exact correspondence with the quantized Painlevé Hamiltonians.

pub mod algebra;
pub mod cases;
pub mod realization;
pub mod transport;

pub use algebra::{AlgebraSpec, Flavor, GenKind, Generator, HighestWeight, ModuleElement, OperatorExpr, SiteSpec};
pub use cases::{compare_with_hamiltonian, hamiltonian_matrix_kz, printed_highest_weight, t_map, verify_theorem, TheoremReport};
pub use transport::{kz_solution_transport, PhiSample, PsiSample, Transport};
