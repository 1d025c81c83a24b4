//! Elementary gate catalogue.
//!
//! Multi-qubit gates follow the register convention of [`crate::linalg`]:
//! a gate's local qubit 0 is its least significant qubit. Controlled gates
//! keep their controls on the most significant local qubits and the target
//! on local qubit 0.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::linalg::{cis, normalize_angle, Complex, ComplexMatrix, I, ONE, ZERO};

#[derive(Debug, Clone, PartialEq)]
pub enum GateKind {
    Not,
    H,
    PauliX,
    PauliY,
    PauliZ,
    /// `diag(1, e^{i delta})`.
    Phase(f64),
    /// `[[cos t/2, -sin t/2], [sin t/2, cos t/2]]`.
    Ry(f64),
    /// Arbitrary single-qubit unitary.
    U2(ComplexMatrix),
    /// Flips local qubit 0 when local qubit 1 is 1 (swaps rows 2 and 3).
    Cnot,
    /// Flips local qubit 0 when local qubit 1 is 0 (swaps rows 0 and 1).
    CnotBar,
    /// Flips local qubit 1 when local qubit 0 is 1 (swaps rows 1 and 3).
    CnotR,
    /// Flips local qubit 1 when local qubit 0 is 0 (swaps rows 0 and 2).
    CnotRBar,
    Swap,
    /// Single-qubit `base` on local qubit 0, active when local qubit 1
    /// equals `control_value`.
    Cu { base: Box<GateKind>, control_value: u8 },
    Toffoli,
    /// Single-qubit `base` on local qubit 0, active when local qubits 1 and
    /// 2 equal `control_values[0]` and `control_values[1]`.
    C2u { base: Box<GateKind>, control_values: [u8; 2] },
    /// `diag(1, 1, 1, e^{i delta})`.
    Cphase(f64),
    /// Phase `e^{i delta}` on basis index 7 only.
    C2phase(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetPosition {
    /// Target on qubit 0, controls above it.
    LsbTarget,
    /// Target on the most significant qubit, controls below it.
    MsbTarget,
}

impl GateKind {
    pub fn phase(delta: f64) -> Self {
        GateKind::Phase(normalize_angle(delta))
    }

    pub fn ry(theta: f64) -> Self {
        GateKind::Ry(theta)
    }

    pub fn cphase(delta: f64) -> Self {
        GateKind::Cphase(normalize_angle(delta))
    }

    pub fn c2phase(delta: f64) -> Self {
        GateKind::C2phase(normalize_angle(delta))
    }

    pub fn u2(u: ComplexMatrix) -> Result<Self> {
        if u.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: u.dim(),
            });
        }
        u.ensure_unitary()?;
        Ok(GateKind::U2(u))
    }

    pub fn cu(base: GateKind, control_value: u8) -> Result<Self> {
        check_controlled_base(&base)?;
        check_control_bit(control_value)?;
        Ok(GateKind::Cu {
            base: Box::new(base),
            control_value,
        })
    }

    pub fn c2u(base: GateKind, control_values: [u8; 2]) -> Result<Self> {
        check_controlled_base(&base)?;
        control_values.iter().try_for_each(|&v| check_control_bit(v))?;
        Ok(GateKind::C2u {
            base: Box::new(base),
            control_values,
        })
    }

    pub fn n_qubits(&self) -> usize {
        use GateKind::*;
        match self {
            Not | H | PauliX | PauliY | PauliZ | Phase(_) | Ry(_) | U2(_) => 1,
            Cnot | CnotBar | CnotR | CnotRBar | Swap | Cu { .. } | Cphase(_) => 2,
            Toffoli | C2u { .. } | C2phase(_) => 3,
        }
    }

    /// Name used in circuit documents and diagram captions.
    pub fn name(&self) -> &'static str {
        use GateKind::*;
        match self {
            Not => "NOT",
            H => "H",
            PauliX => "X",
            PauliY => "Y",
            PauliZ => "Z",
            Phase(_) => "PHASE",
            Ry(_) => "RY",
            U2(_) => "U2",
            Cnot => "CNOT",
            CnotBar => "CNOT_BAR",
            CnotR => "CNOT_R",
            CnotRBar => "CNOT_R_BAR",
            Swap => "SWAP",
            Cu { .. } => "CU",
            Toffoli => "TOFFOLI",
            C2u { .. } => "C2U",
            Cphase(_) => "CPHASE",
            C2phase(_) => "C2PHASE",
        }
    }

    pub fn matrix(&self) -> Result<ComplexMatrix> {
        gate_matrix(self)
    }
}

fn check_controlled_base(base: &GateKind) -> Result<()> {
    if base.n_qubits() != 1 {
        return Err(Error::InvalidParameter(format!(
            "controlled base gate {} must act on one qubit",
            base.name()
        )));
    }
    Ok(())
}

fn check_control_bit(v: u8) -> Result<()> {
    if v > 1 {
        return Err(Error::InvalidParameter(format!("control value {v} is not a bit")));
    }
    Ok(())
}

/// Permutation matrix sending basis index `k` to `perm[k]`.
fn permutation(perm: &[usize]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(perm.len());
    for (k, &to) in perm.iter().enumerate() {
        m[(to, k)] = ONE;
    }
    m
}

pub fn gate_matrix(kind: &GateKind) -> Result<ComplexMatrix> {
    use GateKind::*;
    let c = |re: f64, im: f64| Complex::new(re, im);
    Ok(match kind {
        Not | PauliX => ComplexMatrix::from_real_rows([[0.0, 1.0], [1.0, 0.0]]),
        H => ComplexMatrix::from_real_rows([
            [FRAC_1_SQRT_2, FRAC_1_SQRT_2],
            [FRAC_1_SQRT_2, -FRAC_1_SQRT_2],
        ]),
        PauliY => ComplexMatrix::from_rows([[ZERO, c(0.0, -1.0)], [I, ZERO]]),
        PauliZ => ComplexMatrix::from_real_rows([[1.0, 0.0], [0.0, -1.0]]),
        Phase(delta) => ComplexMatrix::diagonal(&[ONE, cis(*delta)]),
        Ry(theta) => {
            let (s, co) = (theta / 2.0).sin_cos();
            ComplexMatrix::from_real_rows([[co, -s], [s, co]])
        }
        U2(u) => {
            if u.dim() != 2 {
                return Err(Error::DimensionMismatch {
                    expected: 2,
                    found: u.dim(),
                });
            }
            u.ensure_unitary()?;
            u.clone()
        }
        Cnot => permutation(&[0, 1, 3, 2]),
        CnotBar => permutation(&[1, 0, 2, 3]),
        CnotR => permutation(&[0, 3, 2, 1]),
        CnotRBar => permutation(&[2, 1, 0, 3]),
        Swap => permutation(&[0, 2, 1, 3]),
        Cu {
            base,
            control_value,
        } => controlled(&gate_matrix(base)?, 1, &[*control_value], TargetPosition::LsbTarget)?,
        Toffoli => controlled(&gate_matrix(&Not)?, 2, &[1, 1], TargetPosition::LsbTarget)?,
        C2u {
            base,
            control_values,
        } => controlled(&gate_matrix(base)?, 2, control_values, TargetPosition::LsbTarget)?,
        Cphase(delta) => ComplexMatrix::diagonal(&[ONE, ONE, ONE, cis(*delta)]),
        C2phase(delta) => {
            let mut d = vec![ONE; 8];
            d[7] = cis(*delta);
            ComplexMatrix::diagonal(&d)
        }
    })
}

/// Block matrix applying `u` to the target qubit when every control qubit
/// matches its value and acting as identity otherwise.
///
/// `control_values[i]` belongs to the `i`-th control counted from the least
/// significant control qubit.
pub fn controlled(
    u: &ComplexMatrix,
    n_controls: usize,
    control_values: &[u8],
    target: TargetPosition,
) -> Result<ComplexMatrix> {
    if u.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            found: u.dim(),
        });
    }
    if !(1..=2).contains(&n_controls) {
        return Err(Error::InvalidParameter(format!(
            "{n_controls} controls requested, supported are 1 or 2"
        )));
    }
    if control_values.len() != n_controls {
        return Err(Error::InvalidParameter(format!(
            "{} control values given for {n_controls} controls",
            control_values.len()
        )));
    }
    control_values.iter().try_for_each(|&v| check_control_bit(v))?;
    u.ensure_unitary()?;

    let n = n_controls + 1;
    let (target_bit, control_bits): (usize, Vec<usize>) = match target {
        TargetPosition::LsbTarget => (0, (1..n).collect()),
        TargetPosition::MsbTarget => (n - 1, (0..n - 1).collect()),
    };
    let active = |x: usize| {
        control_bits
            .iter()
            .zip(control_values)
            .all(|(&b, &v)| ((x >> b) & 1) as u8 == v)
    };
    let dim = 1 << n;
    Ok(ComplexMatrix::from_fn(dim, |r, c| {
        if active(c) && (r & !(1 << target_bit)) == (c & !(1 << target_bit)) {
            u[((r >> target_bit) & 1, (c >> target_bit) & 1)]
        } else if r == c {
            ONE
        } else {
            ZERO
        }
    }))
}
