//! Dense complex linear algebra for gate-sized matrices.
//!
//! Basis states are indexed `0..dim`; bit `k` of an index is the value of
//! qubit `k`, and qubit 0 is the least significant. With this convention
//! `kron(a, b)` places `a` on the most significant qubits, so
//! `kron(I2, u)` acts on qubit 0.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type Complex = Complex64;

/// Unitarity threshold for matrices tagged unitary.
pub const UNITARY_TOL: f64 = 1e-10;

/// Largest register the public API accepts (2^10 amplitudes).
pub const MAX_QUBITS: usize = 10;

pub const ZERO: Complex = Complex::new(0.0, 0.0);
pub const ONE: Complex = Complex::new(1.0, 0.0);
pub const I: Complex = Complex::new(0.0, 1.0);

/// `e^{i theta}`.
pub fn cis(theta: f64) -> Complex {
    Complex::from_polar(1.0, theta)
}

/// Maps an angle onto `(-pi, pi]`.
pub fn normalize_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex>,
}

impl ComplexMatrix {
    /// Builds a `dim x dim` matrix from row-major entries.
    pub fn new(dim: usize, data: Vec<Complex>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("matrix dimension must be positive".into()));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("matrix entries must be finite".into()));
        }
        Ok(Self { dim, data })
    }

    pub fn from_rows<const N: usize>(rows: [[Complex; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows.iter().flat_map(|r| r.iter().copied()).collect(),
        }
    }

    /// Real-valued convenience constructor, mostly for permutation-like gates.
    pub fn from_real_rows<const N: usize>(rows: [[f64; N]; N]) -> Self {
        Self {
            dim: N,
            data: rows
                .iter()
                .flat_map(|r| r.iter().map(|&x| Complex::new(x, 0.0)))
                .collect(),
        }
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(f(r, c));
            }
        }
        Self { dim, data }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_fn(dim, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn diagonal(entries: &[Complex]) -> Self {
        let mut m = Self::zeros(entries.len());
        for (k, &z) in entries.iter().enumerate() {
            m[(k, k)] = z;
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of qubits when the dimension is a power of two.
    pub fn n_qubits(&self) -> Option<usize> {
        self.dim
            .is_power_of_two()
            .then(|| self.dim.trailing_zeros() as usize)
    }

    pub fn data(&self) -> &[Complex] {
        &self.data
    }

    pub fn row(&self, r: usize) -> &[Complex] {
        &self.data[r * self.dim..(r + 1) * self.dim]
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let n = self.dim;
        let mut out = vec![ZERO; n * n];
        for i in 0..n {
            let row = &mut out[i * n..(i + 1) * n];
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in row.iter_mut().zip(brow) {
                    *o += a * b;
                }
            }
        }
        Ok(ComplexMatrix { dim: n, data: out })
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (p, q) = (self.dim, other.dim);
        ComplexMatrix::from_fn(p * q, |r, c| {
            self.data[(r / q) * p + c / q] * other.data[(r % q) * q + c % q]
        })
    }

    pub fn adjoint(&self) -> ComplexMatrix {
        ComplexMatrix::from_fn(self.dim, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, z: Complex) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * z).collect(),
        }
    }

    pub fn apply(&self, v: &[Complex]) -> Vec<Complex> {
        (0..self.dim)
            .map(|r| self.row(r).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex {
        (0..self.dim).map(|k| self[(k, k)]).sum()
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn determinant(&self) -> Complex {
        let n = self.dim;
        let mut a = self.data.clone();
        let mut det = ONE;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x * n + col].norm().total_cmp(&a[y * n + col].norm()))
                .unwrap_or(col);
            if a[pivot * n + col] == ZERO {
                return ZERO;
            }
            if pivot != col {
                for k in 0..n {
                    a.swap(pivot * n + k, col * n + k);
                }
                det = -det;
            }
            let p = a[col * n + col];
            det *= p;
            for r in col + 1..n {
                let f = a[r * n + col] / p;
                if f == ZERO {
                    continue;
                }
                for k in col..n {
                    let v = a[col * n + k];
                    a[r * n + k] -= f * v;
                }
            }
        }
        det
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "max_abs_diff on mismatched dims");
        max_abs_diff(&self.data, &other.data)
    }

    /// `max |(M^dagger M - I)_{rc}|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for r in 0..n {
            for c in 0..n {
                let mut acc = ZERO;
                for k in 0..n {
                    acc += self.data[k * n + r].conj() * self.data[k * n + c];
                }
                if r == c {
                    acc -= ONE;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_error() <= tol
    }

    pub fn ensure_unitary(&self) -> Result<()> {
        let deviation = self.unitarity_error();
        if deviation <= UNITARY_TOL {
            Ok(())
        } else {
            Err(Error::NotUnitary { deviation })
        }
    }

    /// Number of entries with modulus above `eps`.
    pub fn nonzero_count(&self, eps: f64) -> usize {
        self.data.iter().filter(|z| z.norm() > eps).count()
    }

    /// Serializes to the shared matrix text format: a `dim` line followed by
    /// `dim` rows of whitespace-separated `re+imj` entries, 17 significant
    /// digits each.
    pub fn to_text(&self) -> String {
        let mut out = format!("{}\n", self.dim);
        for r in 0..self.dim {
            let row: Vec<String> = self.row(r).iter().map(|&z| format_complex_17(z)).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty matrix text".into()))?;
        let dim: usize = header
            .parse()
            .map_err(|_| Error::Parse(format!("bad dimension line `{header}`")))?;
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            let line = lines
                .next()
                .ok_or_else(|| Error::Parse(format!("missing row {r}")))?;
            let entries: Vec<&str> = line.split_whitespace().collect();
            if entries.len() != dim {
                return Err(Error::Parse(format!(
                    "row {r} has {} entries, expected {dim}",
                    entries.len()
                )));
            }
            for e in entries {
                data.push(parse_complex(e)?);
            }
        }
        if lines.next().is_some() {
            return Err(Error::Parse("trailing rows after matrix".into()));
        }
        ComplexMatrix::new(dim, data)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex;

    fn index(&self, (r, c): (usize, usize)) -> &Complex {
        &self.data[r * self.dim + c]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex {
        &mut self.data[r * self.dim + c]
    }
}

/// Panics on mismatched dimensions; use [`ComplexMatrix::matmul`] for a
/// checked product.
impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("matrix product dimension mismatch")
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for r in 0..self.dim {
            let row: Vec<String> = self
                .row(r)
                .iter()
                .map(|z| format!("{:+.4}{:+.4}i", z.re, z.im))
                .collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

pub(crate) fn max_abs_diff(a: &[Complex], b: &[Complex]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Result of aligning two amplitude arrays by a single unit phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseAlignment {
    /// `phi` in `(-pi, pi]` with `b ~= e^{i phi} a`.
    pub phase: f64,
    /// `max |e^{i phi} a - b|`; infinite when `b` is zero and `a` is not.
    pub residual: f64,
}

/// Finds the phase `phi` that best maps `a` onto `b`, reading it off the
/// largest-modulus entry of `b` (first one in index order on ties).
pub fn align_global_phase(a: &[Complex], b: &[Complex]) -> PhaseAlignment {
    assert_eq!(a.len(), b.len(), "align_global_phase on mismatched lengths");
    let mut k = 0;
    for (idx, z) in b.iter().enumerate() {
        if z.norm() > b[k].norm() {
            k = idx;
        }
    }
    if b.is_empty() || b[k] == ZERO {
        let a_max = a.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let residual = if a_max == 0.0 { 0.0 } else { f64::INFINITY };
        return PhaseAlignment {
            phase: 0.0,
            residual,
        };
    }
    let phase = normalize_angle((b[k] * a[k].conj()).arg());
    let w = cis(phase);
    let residual = a
        .iter()
        .zip(b)
        .map(|(x, y)| (w * x - y).norm())
        .fold(0.0, f64::max);
    PhaseAlignment { phase, residual }
}

/// True iff `b = e^{i phi} a` entrywise within `tol` for some `phi`; the
/// returned phase is that `phi`.
pub fn equal_up_to_global_phase(a: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> (bool, f64) {
    if a.dim() != b.dim() {
        return (false, 0.0);
    }
    let al = align_global_phase(a.data(), b.data());
    (al.residual <= tol, al.phase)
}

/// Principal square root of a unitary: every eigenphase `l` in `(-pi, pi]`
/// maps to `l / 2`. Eigenvalues within 1e-9 of `-1` are read as `e^{i pi}`.
pub fn unitary_sqrt(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    u.ensure_unitary()?;
    let n = u.dim();
    let m = DMatrix::from_fn(n, n, |r, c| u[(r, c)]);
    let (q, t) = nalgebra::Schur::new(m).unpack();

    let mut eig: Vec<(f64, usize)> = (0..n)
        .map(|k| {
            let mut phase = t[(k, k)].arg();
            if phase < -PI + 1e-9 {
                phase = PI;
            }
            (phase, k)
        })
        .collect();
    eig.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));

    let mut v = ComplexMatrix::zeros(n);
    for &(phase, k) in &eig {
        let root = cis(phase / 2.0);
        for r in 0..n {
            let qr = q[(r, k)] * root;
            for c in 0..n {
                v[(r, c)] += qr * q[(c, k)].conj();
            }
        }
    }
    Ok(v)
}

/// Singular value decomposition `m = left * diag(sigma) * right`.
pub(crate) fn svd(m: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let n = m.dim();
    let dm = DMatrix::from_fn(n, n, |r, c| m[(r, c)]);
    let svd = nalgebra::SVD::new(dm, true, true);
    let left = svd.u.expect("left singular vectors requested");
    let right = svd.v_t.expect("right singular vectors requested");
    (
        ComplexMatrix::from_fn(n, |r, c| left[(r, c)]),
        svd.singular_values.iter().copied().collect(),
        ComplexMatrix::from_fn(n, |r, c| right[(r, c)]),
    )
}

fn format_complex_17(z: Complex) -> String {
    format!("{:.16e}{:+.16e}j", z.re, z.im)
}

/// Parses `re+imj`, `re-imj`, a bare real, or a bare imaginary `imj`.
pub fn parse_complex(s: &str) -> Result<Complex> {
    let bad = || Error::Parse(format!("bad complex literal `{s}`"));
    let s = s.trim();
    let Some(body) = s.strip_suffix('j').or_else(|| s.strip_suffix('i')) else {
        return s.parse::<f64>().map(|re| Complex::new(re, 0.0)).map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().map_err(|_| bad())?;
            let im: f64 = body[k..].parse().map_err(|_| bad())?;
            Ok(Complex::new(re, im))
        }
        None => {
            let im: f64 = match body {
                "" | "+" => 1.0,
                "-" => -1.0,
                other => other.parse().map_err(|_| bad())?,
            };
            Ok(Complex::new(0.0, im))
        }
    }
}

/// Normalized vector of `2^n` amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex>,
}

impl StateVector {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(amps: Vec<Complex>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "state length {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        if n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidParameter("amplitudes must be finite".into()));
        }
        let norm_sqr: f64 = amps.iter().map(|z| z.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state `|index>`.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_QUBITS {
            return Err(Error::UnsupportedQubitCount(n_qubits));
        }
        let dim = 1usize << n_qubits;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![ZERO; dim];
        amps[index] = ONE;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amps(&self) -> &[Complex] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    /// Phase alignment of `self` onto `other` (`other ~= e^{i phi} self`).
    pub fn align_to(&self, other: &StateVector) -> Result<PhaseAlignment> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(align_global_phase(&self.amps, &other.amps))
    }
}
