//! Fixtures shared by the benchmarks.

use tcphase_core::algebra::build_su11_rep;
use tcphase_core::linalg::{basis_vector, ComplexMatrix, ComplexVector};
use tcphase_core::{Algebra, GeneratorSet, LinearHamiltonian};

/// Truncated discrete-series generators with Bargmann index 1/2.
pub fn su11_generators(dim: usize) -> GeneratorSet {
    build_su11_rep(0.5, dim).expect("valid truncation")
}

/// The su(1,1) driven Hamiltonian at angle `phi`, in a `dim`-level truncation.
pub fn su11_hamiltonian(gens: &GeneratorSet, phi: f64) -> ComplexMatrix {
    LinearHamiltonian::hermitian(Algebra::Su11, 5.0, 1.0, phi).matrix(gens)
}

pub fn ground(dim: usize) -> ComplexVector {
    basis_vector(dim, 0)
}
