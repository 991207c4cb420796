//! Model Hamiltonians with their closed-form lumped statistics.

mod ring;
mod two_qubit;

pub use ring::{
    coherence_coefficients, coherence_residual, lumped_tab, lumped_tab_with_residue, magic_times_m, magic_times_s,
    magic_times_s_with, q1_closed_form, ring_hamiltonian, PhaseConvention, RingModel, SCAN_STEP,
};
pub use two_qubit::{basis_index, two_qubit_model, TwoQubitModel};
