//! Dense statevector engine with party-labelled wires.
//!
//! Amplitude indices follow a big-endian convention: the first wire of a
//! register is the most significant digit of the mixed-radix index.

mod density;
mod schmidt;
mod state;

pub use density::{entropy_bits, shannon_bits, DensityOp};
pub use schmidt::{schmidt_decompose, SchmidtDecomp};
pub use state::{fidelity_pure, make_basis_state, make_ebit_pairs, trace_distance, QState, StateDump};

use num_complex::Complex;
use serde::{Deserialize, Serialize};

pub type C64 = Complex<f64>;

/// Largest total Hilbert-space dimension a register may have.
pub const MAX_DIM: usize = 1 << 20;

/// Tolerance ladder shared by every module.
pub mod tol {
    /// Construction invariants (norms, unitarity, hermiticity).
    pub const CONSTRUCTION: f64 = 1e-9;
    /// Round-trip checks (reconstruction, fidelity comparisons).
    pub const ROUND_TRIP: f64 = 1e-8;
    /// Eigenvalues below this contribute nothing to entropies.
    pub const EIGEN_FLOOR: f64 = 1e-12;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Party {
    Alice,
    Bob,
    Reference,
    Environment,
}

impl Party {
    /// The other communicating party; reference and environment are fixed.
    pub fn other(self) -> Party {
        match self {
            Party::Alice => Party::Bob,
            Party::Bob => Party::Alice,
            p => p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Wire {
    pub id: String,
    pub party: Party,
    pub dim: usize,
}

impl Wire {
    pub fn new(id: impl Into<String>, party: Party, dim: usize) -> Self {
        Wire { id: id.into(), party, dim }
    }

    pub fn qubit(id: impl Into<String>, party: Party) -> Self {
        Wire::new(id, party, 2)
    }
}

pub(crate) fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Anything that acts on a block of amplitudes spanning a list of wire factors.
///
/// `factor_dims` lists the tensor factors the operator expects, in order.
/// Target wires are grouped greedily onto these factors, so a factor of
/// dimension 8 may be fed either one 8-dimensional wire or three qubits.
pub trait BlockOp {
    fn factor_dims(&self) -> Vec<usize>;
    fn apply_block(&self, input: &[C64], output: &mut [C64]);
}

/// `log2(dim)` for exact powers of two.
pub(crate) fn exact_log2(dim: usize) -> Option<u32> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros())
    } else {
        None
    }
}
