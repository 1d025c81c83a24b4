//! Constructive gate syntheses.
//!
//! Every procedure returns a [`SynthesisResult`] whose residual is
//! recomputed from the emitted circuit (full unitary or simulation), never
//! taken from the construction itself. All comparisons are up to a global
//! phase.

use std::f64::consts::PI;

use crate::circuit::{circuit_to_unitary, simulate, Circuit};
use crate::error::{Error, Result};
use crate::gates::{controlled, gate_matrix, GateKind, TargetPosition};
use crate::linalg::{
    align_global_phase, cis, normalize_angle, svd, unitary_sqrt, Complex, ComplexMatrix, StateVector, ONE,
    UNITARY_TOL, ZERO,
};

/// Residual bound for every synthesis except the two-qubit template.
pub const RESIDUAL_BOUND: f64 = 1e-9;
/// Residual bound for [`synth_2q_unitary`].
pub const U4_RESIDUAL_BOUND: f64 = 1e-8;

/// A circuit plus its reconstruction certificate.
#[derive(Debug, Clone, PartialEq)]
pub struct SynthesisResult {
    pub circuit: Circuit,
    /// `max |e^{i phase} target - realized|` over matrix entries or amplitudes.
    pub residual: f64,
    /// Phase `phi` in `(-pi, pi]` with `realized ~= e^{i phi} target`.
    pub global_phase: f64,
}

impl SynthesisResult {
    pub fn within(&self, bound: f64) -> bool {
        self.residual <= bound
    }
}

fn certify_unitary(circuit: Circuit, target: &ComplexMatrix) -> Result<SynthesisResult> {
    let realized = circuit_to_unitary(&circuit)?;
    let al = align_global_phase(target.data(), realized.data());
    Ok(SynthesisResult {
        circuit,
        residual: al.residual,
        global_phase: al.phase,
    })
}

fn certify_state(circuit: Circuit, target: &StateVector) -> Result<SynthesisResult> {
    let start = StateVector::basis(circuit.n_qubits(), 0)?;
    let realized = simulate(&circuit, &start)?;
    let al = target.align_to(&realized)?;
    Ok(SynthesisResult {
        circuit,
        residual: al.residual,
        global_phase: al.phase,
    })
}

fn ensure_dim(u: &ComplexMatrix, dim: usize) -> Result<()> {
    if u.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            found: u.dim(),
        });
    }
    Ok(())
}

fn u2(m: ComplexMatrix) -> Result<GateKind> {
    GateKind::u2(m)
}

// ---------------------------------------------------------------------------
// Single qubit

/// Angles of the `PHASE(alpha) H PHASE(delta) H PHASE(gamma)` sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EulerAngles {
    pub alpha: f64,
    pub delta: f64,
    pub gamma: f64,
}

impl EulerAngles {
    pub fn new(alpha: f64, delta: f64, gamma: f64) -> Self {
        Self {
            alpha: normalize_angle(alpha),
            delta: normalize_angle(delta),
            gamma: normalize_angle(gamma),
        }
    }

    /// The determinant-one matrix realized by the sequence once the
    /// `e^{i(gamma+delta+alpha)/2}` prefactor is removed.
    pub fn special_unitary(&self) -> ComplexMatrix {
        let (s, c) = (self.delta / 2.0).sin_cos();
        let sum = (self.gamma + self.alpha) / 2.0;
        let diff = (self.gamma - self.alpha) / 2.0;
        let mi = Complex::new(0.0, -1.0);
        ComplexMatrix::from_rows([
            [cis(-sum) * c, mi * cis(-diff) * s],
            [mi * cis(diff) * s, cis(sum) * c],
        ])
    }

    pub fn prefactor_phase(&self) -> f64 {
        (self.gamma + self.delta + self.alpha) / 2.0
    }
}

pub fn su2_from_euler(p: EulerAngles) -> Result<SynthesisResult> {
    let mut c = Circuit::new(1)?;
    if p.delta == 0.0 {
        // H H cancels; only PHASE(alpha + gamma) is left
        let phase = normalize_angle(p.alpha + p.gamma);
        if phase != 0.0 {
            c.add(GateKind::phase(phase), [0])?;
        }
        return certify_unitary(c, &p.special_unitary());
    }
    c.add(GateKind::phase(p.alpha), [0])?;
    c.add(GateKind::H, [0])?;
    c.add(GateKind::phase(p.delta), [0])?;
    c.add(GateKind::H, [0])?;
    c.add(GateKind::phase(p.gamma), [0])?;
    certify_unitary(c, &p.special_unitary())
}

/// Inverts the Euler sequence up to a global phase. When `|u00|` vanishes
/// only `gamma - alpha` is fixed, and when `|u10|` vanishes only
/// `gamma + alpha` is; in both cases `alpha` is set to 0.
pub fn euler_from_su2(u: &ComplexMatrix) -> Result<EulerAngles> {
    ensure_dim(u, 2)?;
    u.ensure_unitary()?;
    let det = u.determinant();
    let w = u.scale(cis(-det.arg() / 2.0));
    let (a, b) = (w[(0, 0)].norm(), w[(1, 0)].norm());
    let delta = 2.0 * b.atan2(a);
    const EPS: f64 = 1e-12;
    // w00 = e^{-i sum} cos, w10 = -i e^{i diff} sin
    let sum = if a > EPS { -w[(0, 0)].arg() } else { 0.0 };
    let diff = if b > EPS { (Complex::new(0.0, 1.0) * w[(1, 0)]).arg() } else { 0.0 };
    let (alpha, gamma) = if a <= EPS {
        (0.0, 2.0 * diff)
    } else if b <= EPS {
        (0.0, 2.0 * sum)
    } else {
        (sum - diff, sum + diff)
    };
    Ok(EulerAngles::new(alpha, delta, gamma))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatePrepParams1Q {
    pub theta: f64,
    pub delta: f64,
}

impl StatePrepParams1Q {
    pub fn new(theta: f64, delta: f64) -> Result<Self> {
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidParameter(format!("theta {theta} outside [0, pi]")));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParameter("delta must be finite".into()));
        }
        Ok(Self {
            theta,
            delta: normalize_angle(delta),
        })
    }
}

/// `RY(theta)` then `PHASE(delta)` on `|0>`, giving
/// `(cos theta/2, e^{i delta} sin theta/2)`.
pub fn prep_1q(p: StatePrepParams1Q) -> Result<SynthesisResult> {
    let mut c = Circuit::new(1)?;
    c.add(GateKind::ry(p.theta), [0])?;
    c.add(GateKind::phase(p.delta), [0])?;
    let (s, co) = (p.theta / 2.0).sin_cos();
    let target = StateVector::new(vec![Complex::new(co, 0.0), cis(p.delta) * s])?;
    certify_state(c, &target)
}

// ---------------------------------------------------------------------------
// Two-qubit building blocks

/// Three CNOTs with alternating control realizing SWAP.
pub fn synth_swap() -> Result<SynthesisResult> {
    let mut c = Circuit::new(2)?;
    c.add(GateKind::Cnot, [0, 1])?;
    c.add(GateKind::CnotR, [0, 1])?;
    c.add(GateKind::Cnot, [0, 1])?;
    certify_unitary(c, &gate_matrix(&GateKind::Swap)?)
}

/// Controlled phase from two CNOTs and three phase shifts.
///
/// The phase accumulated on `|q1 q0>` is
/// `d/2 q0 + d/2 q1 - d/2 (q0 xor q1) = d q0 q1`, so `|01>` and `|10>`
/// cancel and only `|11>` picks up `e^{i d}`. The realized matrix has no
/// extra global phase.
pub fn synth_cphase(delta: f64) -> Result<SynthesisResult> {
    let half = delta / 2.0;
    let mut c = Circuit::new(2)?;
    c.add(GateKind::Cnot, [0, 1])?;
    c.add(GateKind::phase(-half), [0])?;
    c.add(GateKind::Cnot, [0, 1])?;
    c.add(GateKind::phase(half), [0])?;
    c.add(GateKind::phase(half), [1])?;
    certify_unitary(c, &gate_matrix(&GateKind::cphase(delta))?)
}

/// Single-qubit factors with `A B C = I` and `A X B X C = u`.
#[derive(Debug, Clone, PartialEq)]
pub struct AbcFactors {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub c: ComplexMatrix,
}

fn rz(theta: f64) -> ComplexMatrix {
    ComplexMatrix::diagonal(&[cis(-theta / 2.0), cis(theta / 2.0)])
}

fn ry(theta: f64) -> ComplexMatrix {
    gate_matrix(&GateKind::Ry(theta)).expect("RY is always valid")
}

/// Factors a special unitary through its `Rz(beta) Ry(g) Rz(d)` angles:
/// `A = Rz(beta) Ry(g/2)`, `B = Ry(-g/2) Rz(-(d+beta)/2)`,
/// `C = Rz((d-beta)/2)`. Conjugating by X flips the sign of both rotation
/// kinds, which turns the middle product into `u` while `A B C`
/// telescopes to the identity.
pub fn csu2_factors(u: &ComplexMatrix) -> Result<AbcFactors> {
    ensure_dim(u, 2)?;
    u.ensure_unitary()?;
    let deviation = (u.determinant() - ONE).norm();
    if deviation > UNITARY_TOL {
        return Err(Error::NotSpecialUnitary { deviation });
    }
    // u = [[e^{-i(b+d)/2} cos g/2, .], [e^{i(b-d)/2} sin g/2, e^{i(b+d)/2} cos g/2]]
    let (cos_mag, sin_mag) = (u[(1, 1)].norm(), u[(1, 0)].norm());
    let g = 2.0 * sin_mag.atan2(cos_mag);
    const EPS: f64 = 1e-12;
    let sum = if cos_mag > EPS { 2.0 * u[(1, 1)].arg() } else { 0.0 };
    let diff = if sin_mag > EPS { 2.0 * u[(1, 0)].arg() } else { 0.0 };
    let beta = (sum + diff) / 2.0;
    let d = (sum - diff) / 2.0;

    let a = &rz(beta) * &ry(g / 2.0);
    let b = &ry(-g / 2.0) * &rz(-(d + beta) / 2.0);
    let c = rz((d - beta) / 2.0);
    let factors = AbcFactors { a, b, c };

    let (identity_err, product_err) = factors.relation_errors(u);
    if identity_err > RESIDUAL_BOUND || product_err > RESIDUAL_BOUND {
        return Err(Error::Synthesis(format!(
            "ABC relations violated: |ABC - I| = {identity_err:.3e}, |AXBXC - U| = {product_err:.3e}"
        )));
    }
    Ok(factors)
}

impl AbcFactors {
    /// Max-norm errors of `A B C = I` and `A X B X C = u`.
    pub fn relation_errors(&self, u: &ComplexMatrix) -> (f64, f64) {
        let x = gate_matrix(&GateKind::Not).expect("NOT");
        let abc = &(&self.a * &self.b) * &self.c;
        let axbxc = &(&(&(&self.a * &x) * &self.b) * &x) * &self.c;
        (
            abc.max_abs_diff(&ComplexMatrix::identity(2)),
            axbxc.max_abs_diff(u),
        )
    }
}

fn push_csu2(c: &mut Circuit, f: &AbcFactors) -> Result<()> {
    c.add(u2(f.c.clone())?, [0])?;
    c.add(GateKind::Cnot, [0, 1])?;
    c.add(u2(f.b.clone())?, [0])?;
    c.add(GateKind::Cnot, [0, 1])?;
    c.add(u2(f.a.clone())?, [0])?;
    Ok(())
}

/// Controlled special unitary from two CNOTs and the factors of
/// [`csu2_factors`]; control on qubit 1, target on qubit 0.
pub fn synth_csu2(u: &ComplexMatrix) -> Result<SynthesisResult> {
    let factors = csu2_factors(u)?;
    let mut c = Circuit::new(2)?;
    push_csu2(&mut c, &factors)?;
    certify_unitary(c, &controlled(u, 1, &[1], TargetPosition::LsbTarget)?)
}

/// Controlled unitary: `u = e^{i p} su` with `det su = 1`; the controlled
/// `su` circuit is followed by `PHASE(p)` on the control qubit.
pub fn synth_cu(u: &ComplexMatrix) -> Result<SynthesisResult> {
    ensure_dim(u, 2)?;
    u.ensure_unitary()?;
    let p = u.determinant().arg() / 2.0;
    let su = u.scale(cis(-p));
    let factors = csu2_factors(&su)?;
    let mut c = Circuit::new(2)?;
    push_csu2(&mut c, &factors)?;
    c.add(GateKind::phase(p), [1])?;
    certify_unitary(c, &controlled(u, 1, &[1], TargetPosition::LsbTarget)?)
}

// ---------------------------------------------------------------------------
// D-tilde / D0 and the two-qubit template

/// Rotation angles of the block matrices; the cached values are
/// `C0 = cos t0`, `Ca = cos(t0 + t1)`, `Cb = cos(t0 - t1)` and likewise for
/// sines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DTildeParams {
    pub theta0: f64,
    pub theta1: f64,
    pub c0: f64,
    pub s0: f64,
    pub c1: f64,
    pub s1: f64,
    pub ca: f64,
    pub sa: f64,
    pub cb: f64,
    pub sb: f64,
}

impl DTildeParams {
    pub fn new(theta0: f64, theta1: f64) -> Self {
        let (s0, c0) = theta0.sin_cos();
        let (s1, c1) = theta1.sin_cos();
        let (sa, ca) = (theta0 + theta1).sin_cos();
        let (sb, cb) = (theta0 - theta1).sin_cos();
        Self {
            theta0,
            theta1,
            c0,
            s0,
            c1,
            s1,
            ca,
            sa,
            cb,
            sb,
        }
    }
}

/// `R(t) = [[cos t, -sin t], [sin t, cos t]]`, i.e. `RY(2t)`.
pub fn rotation(theta: f64) -> ComplexMatrix {
    let (s, c) = theta.sin_cos();
    ComplexMatrix::from_real_rows([[c, -s], [s, c]])
}

/// Block diagonal `R(t0 + t1) (+) R(t0 - t1)` on the line pairs
/// `{00, 01}` and `{10, 11}`.
pub fn build_dtilde(p: &DTildeParams) -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [p.ca, -p.sa, 0.0, 0.0],
        [p.sa, p.ca, 0.0, 0.0],
        [0.0, 0.0, p.cb, -p.sb],
        [0.0, 0.0, p.sb, p.cb],
    ])
}

/// `SWAP D~ SWAP`: rotations on the pairs `{00, 10}` and `{01, 11}`.
pub fn build_d0(p: &DTildeParams) -> ComplexMatrix {
    ComplexMatrix::from_real_rows([
        [p.ca, 0.0, -p.sa, 0.0],
        [0.0, p.cb, 0.0, -p.sb],
        [p.sa, 0.0, p.ca, 0.0],
        [0.0, p.sb, 0.0, p.cb],
    ])
}

/// `R(t0)` on qubit 0, CNOT, `R(t1)`, CNOT: the `MSB = 0` pair sees
/// `R(t1) R(t0)` and the `MSB = 1` pair sees `X R(t1) X R(t0) = R(t0 - t1)`.
pub fn dtilde_circuit(p: &DTildeParams) -> Result<Circuit> {
    let mut c = Circuit::new(2)?;
    c.add(GateKind::ry(2.0 * p.theta0), [0])?;
    c.add(GateKind::Cnot, [0, 1])?;
    c.add(GateKind::ry(2.0 * p.theta1), [0])?;
    c.add(GateKind::Cnot, [0, 1])?;
    Ok(c)
}

pub fn d0_circuit(p: &DTildeParams) -> Result<Circuit> {
    let mut c = Circuit::new(2)?;
    c.add(GateKind::Swap, [0, 1])?;
    c.append(&dtilde_circuit(p)?)?;
    c.add(GateKind::Swap, [0, 1])?;
    Ok(c)
}

/// `u = (left[0] (+) left[1]) D0 (right[0] (+) right[1])`, the direct sums
/// taken over the most significant qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitDecomposition {
    pub left: [ComplexMatrix; 2],
    pub right: [ComplexMatrix; 2],
    pub d0: DTildeParams,
}

impl TwoQubitDecomposition {
    pub fn reconstruct(&self) -> ComplexMatrix {
        let block = |m: &[ComplexMatrix; 2]| {
            let mut out = ComplexMatrix::zeros(4);
            for (k, b) in m.iter().enumerate() {
                for r in 0..2 {
                    for c in 0..2 {
                        out[(2 * k + r, 2 * k + c)] = b[(r, c)];
                    }
                }
            }
            out
        };
        &(&block(&self.left) * &build_d0(&self.d0)) * &block(&self.right)
    }
}

fn sub_block(u: &ComplexMatrix, row: usize, col: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(2, |r, c| u[(2 * row + r, 2 * col + c)])
}

fn column(m: &ComplexMatrix, c: usize) -> [Complex; 2] {
    [m[(0, c)], m[(1, c)]]
}

fn dot(a: &[Complex; 2], b: &[Complex; 2]) -> Complex {
    a[0].conj() * b[0] + a[1].conj() * b[1]
}

/// Cosine-sine split of a 4x4 unitary into 2x2 blocks.
///
/// The cosines come from an SVD of the upper-left block; the left factor of
/// the lower half is rebuilt column by column from the larger of the two
/// columns of `u10 R0^dagger` and completed orthogonally; each row of the
/// lower-right factor is read from whichever of `u11` or `u01` divides by the
/// larger of its cosine and sine. All angles land in `[0, pi/2]`.
pub fn decompose_2q(u: &ComplexMatrix) -> Result<TwoQubitDecomposition> {
    ensure_dim(u, 4)?;
    u.ensure_unitary()?;
    let (u00, u01, u10, u11) = (sub_block(u, 0, 0), sub_block(u, 0, 1), sub_block(u, 1, 0), sub_block(u, 1, 1));

    let (mut l0, sigma, mut r0) = svd(&u00);
    if (sigma[0] - sigma[1]).abs() <= 1e-12 {
        // Degenerate cosines: move all of L0 into R0 so that L0 = I.
        r0 = &l0 * &r0;
        l0 = ComplexMatrix::identity(2);
    }

    let m = &u10 * &r0.adjoint();
    let cols = [column(&m, 0), column(&m, 1)];
    let norms = [dot(&cols[0], &cols[0]).re.sqrt(), dot(&cols[1], &cols[1]).re.sqrt()];
    let p = if norms[1] > norms[0] { 1 } else { 0 };
    let q = 1 - p;
    let mut l1_cols = [[ZERO; 2]; 2];
    let mut sines = [0.0; 2];
    l1_cols[p] = if norms[p] > 1e-14 {
        [cols[p][0] / norms[p], cols[p][1] / norms[p]]
    } else {
        let mut e = [ZERO; 2];
        e[p] = ONE;
        e
    };
    sines[p] = norms[p];
    let complement = [-l1_cols[p][1].conj(), l1_cols[p][0].conj()];
    let z = dot(&complement, &cols[q]);
    let phase = if z.norm() > 0.0 { z / z.norm() } else { ONE };
    l1_cols[q] = [complement[0] * phase, complement[1] * phase];
    sines[q] = z.norm();
    let l1 = ComplexMatrix::from_fn(2, |r, c| l1_cols[c][r]);

    let angles = [sines[0].atan2(sigma[0]), sines[1].atan2(sigma[1])];
    let from_u11 = &l1.adjoint() * &u11;
    let from_u01 = &l0.adjoint() * &u01;
    let r1 = ComplexMatrix::from_fn(2, |r, c| {
        let (s, co) = angles[r].sin_cos();
        if co >= s {
            from_u11[(r, c)] / co
        } else {
            -from_u01[(r, c)] / s
        }
    });

    // D0 pairs {00,10} with angle t0 + t1 and {01,11} with t0 - t1.
    let d0 = DTildeParams::new((angles[0] + angles[1]) / 2.0, (angles[0] - angles[1]) / 2.0);
    Ok(TwoQubitDecomposition {
        left: [l0, l1],
        right: [r0, r1],
        d0,
    })
}

/// Two-qubit unitary as controlled blocks around `D0`: `right[0]` and
/// `right[1]` controlled on qubit 1 being 0 and 1, then `D0` realized as
/// `SWAP D~ SWAP`, then `left[0]` and `left[1]` controlled the same way.
pub fn synth_2q_unitary(u: &ComplexMatrix) -> Result<SynthesisResult> {
    let dec = decompose_2q(u)?;
    let mut c = Circuit::new(2)?;
    c.add(GateKind::cu(u2(dec.right[0].clone())?, 0)?, [0, 1])?;
    c.add(GateKind::cu(u2(dec.right[1].clone())?, 1)?, [0, 1])?;
    c.append(&d0_circuit(&dec.d0)?)?;
    c.add(GateKind::cu(u2(dec.left[0].clone())?, 0)?, [0, 1])?;
    c.add(GateKind::cu(u2(dec.left[1].clone())?, 1)?, [0, 1])?;
    certify_unitary(c, u)
}

// ---------------------------------------------------------------------------
// Three qubits

/// Doubly controlled `u` from `CV`, `CNOT`, `CV^dagger`, `CNOT`, `CV` with
/// `V = sqrt(u)`: the target sees `V^{a} V^{-(a xor b)} V^{b}`, which is
/// `V^2 = u` exactly when both controls are 1.
pub fn synth_c2u(u: &ComplexMatrix) -> Result<SynthesisResult> {
    ensure_dim(u, 2)?;
    let v = unitary_sqrt(u)?;
    let mut c = Circuit::new(3)?;
    c.add(GateKind::cu(u2(v.clone())?, 1)?, [0, 1])?;
    c.add(GateKind::Cnot, [1, 2])?;
    c.add(GateKind::cu(u2(v.adjoint())?, 1)?, [0, 1])?;
    c.add(GateKind::Cnot, [1, 2])?;
    c.add(GateKind::cu(u2(v)?, 1)?, [0, 2])?;
    certify_unitary(c, &controlled(u, 2, &[1, 1], TargetPosition::LsbTarget)?)
}

/// Doubly controlled phase from two Toffolis, two phase shifts and one
/// controlled phase. With `t = q1 q2` the accumulated phase is
/// `d/2 q0 + d/2 t - d/2 (q0 xor t) = d q0 t`: the states
/// `{001, 011, 101, 110}` cancel to zero and only `111` keeps `d`.
pub fn synth_c2phase(delta: f64) -> Result<SynthesisResult> {
    let half = delta / 2.0;
    let mut c = Circuit::new(3)?;
    c.add(GateKind::Toffoli, [0, 1, 2])?;
    c.add(GateKind::phase(-half), [0])?;
    c.add(GateKind::Toffoli, [0, 1, 2])?;
    c.add(GateKind::phase(half), [0])?;
    c.add(GateKind::cphase(half), [1, 2])?;
    certify_unitary(c, &gate_matrix(&GateKind::c2phase(delta))?)
}

// ---------------------------------------------------------------------------
// Diagonal unitaries

/// `diag(1, e^{i phi_1}, ..., e^{i phi_{2^n - 1}})` for two or three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalPhases {
    n_qubits: usize,
    phis: Vec<f64>,
}

impl DiagonalPhases {
    pub fn new(n_qubits: usize, phis: Vec<f64>) -> Result<Self> {
        if !(2..=3).contains(&n_qubits) {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        let expected = (1 << n_qubits) - 1;
        if phis.len() != expected {
            return Err(Error::InvalidParameter(format!(
                "{n_qubits}-qubit diagonal needs {expected} phases, got {}",
                phis.len()
            )));
        }
        if phis.iter().any(|p| !p.is_finite()) {
            return Err(Error::InvalidParameter("phases must be finite".into()));
        }
        Ok(Self {
            n_qubits,
            phis: phis.into_iter().map(normalize_angle).collect(),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `phi_1 ..= phi_{2^n - 1}`.
    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn matrix(&self) -> ComplexMatrix {
        let entries: Vec<Complex> = std::iter::once(ONE).chain(self.phis.iter().map(|&p| cis(p))).collect();
        ComplexMatrix::diagonal(&entries)
    }
}

/// Gate angles `delta_1 ..= delta_{2^n - 1}`.
///
/// Two qubits: `delta_1` is PHASE on qubit 0, `delta_2` PHASE on qubit 1,
/// `delta_3` CPHASE on (0, 1).
///
/// Three qubits: `delta_1..delta_3` are PHASE on qubits 0, 1, 2;
/// `delta_4` CPHASE on (1, 2), `delta_5` on (0, 2), `delta_6` on (0, 1);
/// `delta_7` the doubly controlled phase.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseSchedule {
    pub n_qubits: usize,
    pub deltas: Vec<f64>,
}

impl PhaseSchedule {
    /// Gate slot for each delta, in schedule order.
    pub fn slots(&self) -> Vec<(GateKind, Vec<usize>)> {
        let d = &self.deltas;
        match self.n_qubits {
            2 => vec![
                (GateKind::phase(d[0]), vec![0]),
                (GateKind::phase(d[1]), vec![1]),
                (GateKind::cphase(d[2]), vec![0, 1]),
            ],
            _ => vec![
                (GateKind::phase(d[0]), vec![0]),
                (GateKind::phase(d[1]), vec![1]),
                (GateKind::phase(d[2]), vec![2]),
                (GateKind::cphase(d[3]), vec![1, 2]),
                (GateKind::cphase(d[4]), vec![0, 2]),
                (GateKind::cphase(d[5]), vec![0, 1]),
                (GateKind::c2phase(d[6]), vec![0, 1, 2]),
            ],
        }
    }

    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_qubits)?;
        for (kind, targets) in self.slots() {
            c.add(kind, targets)?;
        }
        Ok(c)
    }

    /// Phases produced by the schedule (before normalization).
    pub fn forward(&self) -> Vec<f64> {
        let d = &self.deltas;
        match self.n_qubits {
            2 => vec![d[0], d[1], d[0] + d[1] + d[2]],
            _ => vec![
                d[0],
                d[1],
                d[0] + d[1] + d[5],
                d[2],
                d[0] + d[2] + d[4],
                d[1] + d[2] + d[3],
                d.iter().sum(),
            ],
        }
    }
}

pub fn diag_schedule(phases: &DiagonalPhases) -> PhaseSchedule {
    let p = |k: usize| phases.phis[k - 1];
    let deltas = match phases.n_qubits {
        2 => vec![p(1), p(2), p(3) - p(1) - p(2)],
        _ => vec![
            p(1),
            p(2),
            p(4),
            p(6) - p(2) - p(4),
            p(5) - p(1) - p(4),
            p(3) - p(1) - p(2),
            p(7) + p(1) + p(2) + p(4) - p(3) - p(5) - p(6),
        ],
    };
    PhaseSchedule {
        n_qubits: phases.n_qubits,
        deltas,
    }
}

pub fn synth_diag(phases: &DiagonalPhases) -> Result<SynthesisResult> {
    let circuit = diag_schedule(phases).to_circuit()?;
    certify_unitary(circuit, &phases.matrix())
}

// ---------------------------------------------------------------------------
// State preparation

fn validate_moduli(moduli: &[f64]) -> Result<usize> {
    let n = match moduli.len() {
        4 => 2,
        8 => 3,
        other => {
            return Err(Error::InvalidParameter(format!(
                "amplitude synthesis needs 4 or 8 moduli, got {other}"
            )))
        }
    };
    if moduli.iter().any(|m| !m.is_finite() || *m < 0.0) {
        return Err(Error::InvalidParameter("moduli must be finite and non-negative".into()));
    }
    let norm_sqr: f64 = moduli.iter().map(|m| m * m).sum();
    if (norm_sqr - 1.0).abs() > StateVector::NORM_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    Ok(n)
}

/// Angle `t` with `(cos t/2, sin t/2)` proportional to `(a, b)`; 0 when
/// both branches are empty.
fn branch_angle(a: f64, b: f64) -> f64 {
    if a == 0.0 && b == 0.0 {
        0.0
    } else {
        2.0 * b.atan2(a)
    }
}

/// Rotation angles `theta_1 ..` of the amplitude-modulus circuit.
///
/// Two qubits: `theta_1` splits the weight between `MSB = 0` and `MSB = 1`,
/// `theta_2` and `theta_3` split each half over the least significant
/// qubit. Three qubits: `theta_1..theta_3` do the same for the pair weights
/// of the two most significant qubits and `theta_{4+k}` splits pair `k`.
pub fn amplitude_angles(moduli: &[f64]) -> Result<Vec<f64>> {
    let n = validate_moduli(moduli)?;
    let two_qubit = |m: [f64; 4]| {
        let low = m[0].hypot(m[1]);
        let high = m[2].hypot(m[3]);
        vec![branch_angle(low, high), branch_angle(m[0], m[1]), branch_angle(m[2], m[3])]
    };
    if n == 2 {
        return Ok(two_qubit([moduli[0], moduli[1], moduli[2], moduli[3]]));
    }
    let pairs: Vec<f64> = moduli.chunks(2).map(|p| p[0].hypot(p[1])).collect();
    let mut angles = two_qubit([pairs[0], pairs[1], pairs[2], pairs[3]]);
    angles.extend(moduli.chunks(2).map(|p| branch_angle(p[0], p[1])));
    Ok(angles)
}

fn amplitude_circuit(n: usize, angles: &[f64]) -> Result<Circuit> {
    let mut c = Circuit::new(n)?;
    let (hi, lo) = (n - 1, n - 2);
    c.add(GateKind::ry(angles[0]), [hi])?;
    c.add(GateKind::cu(GateKind::ry(angles[1]), 0)?, [lo, hi])?;
    c.add(GateKind::cu(GateKind::ry(angles[2]), 1)?, [lo, hi])?;
    if n == 3 {
        // control values listed as [q1, q2]: pairs 00, 01, 10, 11 read as q2 q1
        let order = [[0, 0], [1, 0], [0, 1], [1, 1]];
        for (k, values) in order.into_iter().enumerate() {
            c.add(GateKind::c2u(GateKind::ry(angles[3 + k]), values)?, [0, 1, 2])?;
        }
    }
    Ok(c)
}

/// Circuit taking `|0..0>` to the real non-negative state with the given
/// amplitude moduli.
pub fn synth_state_amplitudes(moduli: &[f64]) -> Result<SynthesisResult> {
    let angles = amplitude_angles(moduli)?;
    let n = if moduli.len() == 4 { 2 } else { 3 };
    let circuit = amplitude_circuit(n, &angles)?;
    let target = StateVector::new(moduli.iter().map(|&m| Complex::new(m, 0.0)).collect())?;
    certify_state(circuit, &target)
}

/// Moduli first, then a diagonal carrying the phases relative to the first
/// nonzero amplitude.
pub fn synth_state(target: &StateVector) -> Result<SynthesisResult> {
    let n = target.n_qubits();
    if !(2..=3).contains(&n) {
        return Err(Error::UnsupportedQubitCount(n));
    }
    const EPS: f64 = 1e-12;
    let amps = target.amps();
    let moduli: Vec<f64> = amps.iter().map(|z| z.norm()).collect();
    let reference = amps.iter().position(|z| z.norm() > EPS).unwrap_or(0);
    let ref_arg = amps[reference].arg();
    let phis: Vec<f64> = amps[1..]
        .iter()
        .map(|z| if z.norm() > EPS { z.arg() - ref_arg } else { 0.0 })
        .collect();

    let angles = amplitude_angles(&renormalized(&moduli))?;
    let mut circuit = amplitude_circuit(n, &angles)?;
    circuit.append(&diag_schedule(&DiagonalPhases::new(n, phis)?).to_circuit()?)?;
    certify_state(circuit, target)
}

/// Rescales moduli that passed the state-vector tolerance so that they pass
/// the amplitude synthesis check as well.
fn renormalized(moduli: &[f64]) -> Vec<f64> {
    let norm = moduli.iter().map(|m| m * m).sum::<f64>().sqrt();
    moduli.iter().map(|m| m / norm).collect()
}
