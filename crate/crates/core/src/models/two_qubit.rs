//! Two qubits, `H = λ1 σx⊗σx + λ2 I⊗σx`, with only the second (probe) qubit
//! measured. Basis `|q1 q2⟩` maps to index `2·q1 + q2`.

use num_complex::Complex;

use crate::error::Result;
use crate::linalg::ComplexMatrix;
use crate::qstate::MesostatePartition;
use crate::scalar::Real;
use crate::strobe::Stroboscope;

#[derive(Clone, Debug)]
pub struct TwoQubitModel<T> {
    pub lambda1: T,
    pub lambda2: T,
    hamiltonian: ComplexMatrix<T>,
    probe: MesostatePartition,
}

pub fn basis_index(q1: usize, q2: usize) -> usize {
    2 * q1 + q2
}

fn sigma_x<T: Real>() -> ComplexMatrix<T> {
    ComplexMatrix::from_real(2, &[T::zero(), T::one(), T::one(), T::zero()]).expect("2x2")
}

pub fn two_qubit_model<T: Real>(lambda1: T, lambda2: T) -> TwoQubitModel<T> {
    let x = sigma_x::<T>();
    let id = ComplexMatrix::identity(2);
    let coupling = x.kron(&x).scale(Complex::new(lambda1, T::zero()));
    let drive = id.kron(&x).scale(Complex::new(lambda2, T::zero()));
    let hamiltonian = coupling.add(&drive).expect("both 4x4");
    // A: probe reads 0, B: probe reads 1
    let probe = MesostatePartition::new(
        4,
        vec![
            ("A", vec![basis_index(0, 0), basis_index(1, 0)]),
            ("B", vec![basis_index(0, 1), basis_index(1, 1)]),
        ],
    )
    .expect("valid partition");
    TwoQubitModel {
        lambda1,
        lambda2,
        hamiltonian,
        probe,
    }
}

impl<T: Real> TwoQubitModel<T> {
    pub fn hamiltonian(&self) -> &ComplexMatrix<T> {
        &self.hamiltonian
    }

    pub fn probe_partition(&self) -> &MesostatePartition {
        &self.probe
    }

    pub fn stroboscope(&self, tau: T) -> Result<Stroboscope<T>> {
        Stroboscope::new(&self.hamiltonian, tau)
    }
}
