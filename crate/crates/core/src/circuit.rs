//! Circuits, immersion of k-qubit gates into n-qubit registers, and
//! state-vector simulation.

use crate::error::{Error, Result};
use crate::gates::{gate_matrix, GateKind};
use crate::linalg::{Complex, ComplexMatrix, StateVector, MAX_QUBITS, ONE, ZERO};

/// Depth cap for a single circuit.
pub const MAX_OPS: usize = 10_000;

#[derive(Debug, Clone, PartialEq)]
pub struct CircuitOp {
    pub kind: GateKind,
    /// Register qubit for each local qubit of the gate, least significant
    /// local qubit first.
    pub targets: Vec<usize>,
}

impl CircuitOp {
    pub fn new(kind: GateKind, targets: impl Into<Vec<usize>>) -> Self {
        Self {
            kind,
            targets: targets.into(),
        }
    }

    fn validate(&self, n_qubits: usize) -> Result<()> {
        let k = self.kind.n_qubits();
        if self.targets.len() != k {
            return Err(Error::InvalidParameter(format!(
                "{} acts on {k} qubits but {} targets were given",
                self.kind.name(),
                self.targets.len()
            )));
        }
        check_targets(&self.targets, n_qubits)?;
        gate_matrix(&self.kind).map(|_| ())
    }
}

fn check_targets(targets: &[usize], n_qubits: usize) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange {
                index: t,
                n_qubits,
            });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateTarget(t));
        }
    }
    Ok(())
}

/// Ordered gate list; the first op is applied first.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    n_qubits: usize,
    ops: Vec<CircuitOp>,
}

impl Circuit {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if !(1..=MAX_QUBITS).contains(&n_qubits) {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        Ok(Self {
            n_qubits,
            ops: Vec::new(),
        })
    }

    pub fn from_ops(n_qubits: usize, ops: impl IntoIterator<Item = CircuitOp>) -> Result<Self> {
        let mut c = Self::new(n_qubits)?;
        for op in ops {
            c.push(op)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, op: CircuitOp) -> Result<()> {
        if self.ops.len() >= MAX_OPS {
            return Err(Error::CircuitTooDeep(self.ops.len() + 1));
        }
        op.validate(self.n_qubits)?;
        self.ops.push(op);
        Ok(())
    }

    /// Shorthand for `push(CircuitOp::new(kind, targets))`.
    pub fn add(&mut self, kind: GateKind, targets: impl Into<Vec<usize>>) -> Result<()> {
        self.push(CircuitOp::new(kind, targets))
    }

    pub fn append(&mut self, other: &Circuit) -> Result<()> {
        if other.n_qubits != self.n_qubits {
            return Err(Error::DimensionMismatch {
                expected: self.n_qubits,
                found: other.n_qubits,
            });
        }
        for op in &other.ops {
            self.push(op.clone())?;
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn ops(&self) -> &[CircuitOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn unitary(&self) -> Result<ComplexMatrix> {
        circuit_to_unitary(self)
    }

    pub fn simulate(&self, input: &StateVector) -> Result<StateVector> {
        simulate(self, input)
    }
}

/// Relabeling of register qubits that brings a target list onto the lowest
/// slots, recorded as the transpositions that build it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QubitPermutation {
    n_qubits: usize,
    /// `slots[i]` is the register qubit moved into position `i`.
    slots: Vec<usize>,
    transpositions: Vec<(usize, usize)>,
}

impl QubitPermutation {
    /// Moves `targets[i]` into slot `i`, working from slot 0 upwards; each
    /// step is one swap of two register positions.
    pub fn bringing_to_front(targets: &[usize], n_qubits: usize) -> Result<Self> {
        check_targets(targets, n_qubits)?;
        let mut slots: Vec<usize> = (0..n_qubits).collect();
        let mut transpositions = Vec::new();
        for (i, &t) in targets.iter().enumerate() {
            let j = slots.iter().position(|&q| q == t).expect("target present");
            if j != i {
                slots.swap(i, j);
                transpositions.push((i, j));
            }
        }
        Ok(Self {
            n_qubits,
            slots,
            transpositions,
        })
    }

    pub fn transpositions(&self) -> &[(usize, usize)] {
        &self.transpositions
    }

    /// Basis index reached from `x`: bit `i` of the result is bit
    /// `slots[i]` of `x`.
    pub fn map_index(&self, x: usize) -> usize {
        self.slots
            .iter()
            .enumerate()
            .fold(0, |y, (i, &q)| y | (((x >> q) & 1) << i))
    }

    /// Permutation matrix built as the product of one register SWAP per
    /// recorded transposition.
    pub fn matrix(&self) -> ComplexMatrix {
        let dim = 1 << self.n_qubits;
        let mut p = ComplexMatrix::identity(dim);
        for &(a, b) in &self.transpositions {
            let swap = ComplexMatrix::from_fn(dim, |r, c| {
                let bit_a = (c >> a) & 1;
                let bit_b = (c >> b) & 1;
                let swapped = (c & !(1 << a) & !(1 << b)) | (bit_a << b) | (bit_b << a);
                if r == swapped {
                    ONE
                } else {
                    ZERO
                }
            });
            p = &swap * &p;
        }
        p
    }
}

/// The n-qubit matrix acting as `gate` on `targets` and as identity on every
/// other qubit: `P^T (I (x) gate) P` with `P` from
/// [`QubitPermutation::bringing_to_front`].
pub fn immerse(gate: &ComplexMatrix, targets: &[usize], n_qubits: usize) -> Result<ComplexMatrix> {
    let k = gate.n_qubits().ok_or_else(|| {
        Error::InvalidParameter(format!("gate dimension {} is not a power of two", gate.dim()))
    })?;
    if targets.len() != k {
        return Err(Error::InvalidParameter(format!(
            "{k}-qubit gate given {} targets",
            targets.len()
        )));
    }
    if n_qubits > MAX_QUBITS || n_qubits < k {
        return Err(Error::UnsupportedQubitCount(n_qubits));
    }
    let perm = QubitPermutation::bringing_to_front(targets, n_qubits)?;
    let local_mask = (1usize << k) - 1;
    let mapped: Vec<usize> = (0..1usize << n_qubits).map(|x| perm.map_index(x)).collect();
    Ok(ComplexMatrix::from_fn(1 << n_qubits, |r, c| {
        let (pr, pc) = (mapped[r], mapped[c]);
        if pr >> k == pc >> k {
            gate[(pr & local_mask, pc & local_mask)]
        } else {
            ZERO
        }
    }))
}

/// Full `2^n` unitary `op_m ... op_1`.
pub fn circuit_to_unitary(c: &Circuit) -> Result<ComplexMatrix> {
    let mut u = ComplexMatrix::identity(c.dim());
    for op in &c.ops {
        let m = immerse(&gate_matrix(&op.kind)?, &op.targets, c.n_qubits)?;
        u = m.matmul(&u)?;
    }
    Ok(u)
}

/// Applies `gate` in place to the amplitudes of the given register qubits.
pub fn apply_gate(amps: &mut [Complex], gate: &ComplexMatrix, targets: &[usize]) {
    let k = targets.len();
    let local = 1usize << k;
    debug_assert_eq!(gate.dim(), local);
    let mask = targets.iter().fold(0, |m, &t| m | (1 << t));
    let offsets: Vec<usize> = (0..local)
        .map(|l| {
            targets
                .iter()
                .enumerate()
                .fold(0, |acc, (i, &t)| acc | (((l >> i) & 1) << t))
        })
        .collect();
    let mut buf = vec![ZERO; local];
    for base in 0..amps.len() {
        if base & mask != 0 {
            continue;
        }
        for (b, &off) in buf.iter_mut().zip(&offsets) {
            *b = amps[base | off];
        }
        for (r, &off) in offsets.iter().enumerate() {
            amps[base | off] = gate.row(r).iter().zip(&buf).map(|(g, v)| g * v).sum();
        }
    }
}

/// Gate-by-gate evolution of `input`; never materializes the full unitary.
pub fn simulate(c: &Circuit, input: &StateVector) -> Result<StateVector> {
    if input.n_qubits() != c.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: c.dim(),
            found: input.dim(),
        });
    }
    let mut amps = input.amps().to_vec();
    for op in &c.ops {
        apply_gate(&mut amps, &gate_matrix(&op.kind)?, &op.targets);
    }
    Ok(StateVector::from_raw(c.n_qubits, amps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, Complex};
    use std::f64::consts::FRAC_1_SQRT_2;

    fn labelled_u4() -> ComplexMatrix {
        // Distinct entries a..p so placement errors are visible.
        ComplexMatrix::from_fn(4, |r, c| Complex::new((4 * r + c + 1) as f64, 0.0))
    }

    #[test]
    fn immerse_on_low_pair_is_identity_kron() {
        let u = labelled_u4();
        let m = immerse(&u, &[0, 1], 3).unwrap();
        assert_eq!(m, kron(&ComplexMatrix::identity(2), &u));
    }

    #[test]
    fn immerse_on_high_pair_is_kron_identity() {
        let u = labelled_u4();
        let m = immerse(&u, &[1, 2], 3).unwrap();
        assert_eq!(m, kron(&u, &ComplexMatrix::identity(2)));
    }

    #[test]
    fn immerse_on_outer_pair_matches_block_layout() {
        let u = labelled_u4();
        let v = |k: usize| Complex::new(k as f64, 0.0);
        let z = ZERO;
        // a..p -> 1..16
        let (a, b, c, d, e, f, g, h) = (v(1), v(2), v(3), v(4), v(5), v(6), v(7), v(8));
        let (i, j, k, l, m, n, o, p) = (v(9), v(10), v(11), v(12), v(13), v(14), v(15), v(16));
        let expected = ComplexMatrix::from_rows([
            [a, b, z, z, c, d, z, z],
            [e, f, z, z, g, h, z, z],
            [z, z, a, b, z, z, c, d],
            [z, z, e, f, z, z, g, h],
            [i, j, z, z, k, l, z, z],
            [m, n, z, z, o, p, z, z],
            [z, z, i, j, z, z, k, l],
            [z, z, m, n, z, z, o, p],
        ]);
        assert_eq!(immerse(&u, &[0, 2], 3).unwrap(), expected);
    }

    #[test]
    fn immerse_errors() {
        let u = labelled_u4();
        assert!(matches!(immerse(&u, &[0, 3], 3), Err(Error::QubitOutOfRange { .. })));
        assert!(matches!(immerse(&u, &[1, 1], 3), Err(Error::DuplicateTarget(1))));
        assert!(immerse(&u, &[0], 3).is_err());
    }

    #[test]
    fn permutation_matrix_matches_index_map() {
        let perm = QubitPermutation::bringing_to_front(&[2, 0], 3).unwrap();
        assert_eq!(perm.transpositions(), &[(0, 2), (1, 2)]);
        let p = perm.matrix();
        for x in 0..8 {
            assert_eq!(p[(perm.map_index(x), x)], ONE);
        }
    }

    #[test]
    fn unitary_of_small_circuits() {
        let empty = Circuit::new(2).unwrap();
        assert_eq!(circuit_to_unitary(&empty).unwrap(), ComplexMatrix::identity(4));

        let mut twice = Circuit::new(2).unwrap();
        twice.add(GateKind::Cnot, [0, 1]).unwrap();
        twice.add(GateKind::Cnot, [0, 1]).unwrap();
        assert_eq!(circuit_to_unitary(&twice).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn simulate_examples() {
        let mut h = Circuit::new(1).unwrap();
        h.add(GateKind::H, [0]).unwrap();
        let out = simulate(&h, &StateVector::basis(1, 0).unwrap()).unwrap();
        assert!((out.amps()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((out.amps()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);

        let mut cnot = Circuit::new(2).unwrap();
        cnot.add(GateKind::Cnot, [0, 1]).unwrap();
        let out = simulate(&cnot, &StateVector::basis(2, 0b10).unwrap()).unwrap();
        assert_eq!(out.amps()[0b11], ONE);

        let mut bell = Circuit::new(2).unwrap();
        bell.add(GateKind::H, [1]).unwrap();
        bell.add(GateKind::Cnot, [0, 1]).unwrap();
        let out = simulate(&bell, &StateVector::basis(2, 0).unwrap()).unwrap();
        // (|00> + |11>)/sqrt 2, worked by hand: H on qubit 1 gives |00>+|10>,
        // CNOT maps |10> to |11>.
        let expected = [FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2];
        for (z, e) in out.amps().iter().zip(expected) {
            assert!((z - Complex::new(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn circuit_validation() {
        assert!(Circuit::new(0).is_err());
        assert!(Circuit::new(11).is_err());
        let mut c = Circuit::new(2).unwrap();
        assert!(c.add(GateKind::Cnot, [0]).is_err());
        assert!(c.add(GateKind::Cnot, [0, 2]).is_err());
        assert!(c.add(GateKind::Toffoli, [0, 1, 1]).is_err());
        assert!(simulate(&c, &StateVector::basis(3, 0).unwrap()).is_err());
    }

    #[test]
    fn depth_cap() {
        let mut c = Circuit::new(1).unwrap();
        for _ in 0..MAX_OPS {
            c.add(GateKind::Not, [0]).unwrap();
        }
        assert!(matches!(c.add(GateKind::Not, [0]), Err(Error::CircuitTooDeep(_))));
    }
}
