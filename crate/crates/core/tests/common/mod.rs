//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's matrix products, immersions or
//! syntheses: matrices are plain row-major `Vec<Vec<Complex>>` and every
//! construction is spelled out entry by entry.

#![allow(dead_code)]

use qdos_core::random::random_unitary;
use qdos_core::{Circuit, Complex, ComplexMatrix, GateKind};
use rand::Rng;

pub type Dense = Vec<Vec<Complex>>;

pub fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

pub fn cis(t: f64) -> Complex {
    Complex::new(t.cos(), t.sin())
}

pub fn dense(m: &ComplexMatrix) -> Dense {
    (0..m.dim()).map(|r| (0..m.dim()).map(|k| m[(r, k)]).collect()).collect()
}

pub fn from_real(rows: &[&[f64]]) -> Dense {
    rows.iter().map(|r| r.iter().map(|&x| c(x, 0.0)).collect()).collect()
}

pub fn identity(n: usize) -> Dense {
    (0..n)
        .map(|r| (0..n).map(|k| if r == k { c(1.0, 0.0) } else { c(0.0, 0.0) }).collect())
        .collect()
}

pub fn mul(a: &Dense, b: &Dense) -> Dense {
    let n = a.len();
    let mut out = vec![vec![c(0.0, 0.0); n]; n];
    for r in 0..n {
        for k in 0..n {
            for j in 0..n {
                out[r][k] += a[r][j] * b[j][k];
            }
        }
    }
    out
}

pub fn kron(a: &Dense, b: &Dense) -> Dense {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![c(0.0, 0.0); n * m]; n * m];
    for (i, row) in a.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = x * b[k][l];
                }
            }
        }
    }
    out
}

pub fn max_diff(a: &Dense, b: &Dense) -> f64 {
    a.iter()
        .flatten()
        .zip(b.iter().flatten())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn max_diff_m(a: &ComplexMatrix, b: &Dense) -> f64 {
    max_diff(&dense(a), b)
}

/// Smallest `max |e^{it} a - b|` over a brute-force grid refined around the
/// best phase; used only to cross-check phase-insensitive comparisons.
pub fn phase_distance(a: &Dense, b: &Dense) -> f64 {
    let dist = |t: f64| {
        let z = cis(t);
        a.iter()
            .flatten()
            .zip(b.iter().flatten())
            .map(|(x, y)| (z * x - y).norm())
            .fold(0.0, f64::max)
    };
    let mut best = (0.0, dist(0.0));
    let steps = 720;
    for k in 0..steps {
        let t = 2.0 * std::f64::consts::PI * k as f64 / steps as f64;
        let d = dist(t);
        if d < best.1 {
            best = (t, d);
        }
    }
    let mut width = 2.0 * std::f64::consts::PI / steps as f64;
    for _ in 0..60 {
        for t in [best.0 - width, best.0 + width] {
            let d = dist(t);
            if d < best.1 {
                best = (t, d);
            }
        }
        width /= 2.0;
    }
    best.1
}

/// Matrix of a gate applied to `targets` of an `n`-qubit register, built
/// entry by entry: `M[y][x] = G[loc(y)][loc(x)]` when `x` and `y` agree on
/// every qubit outside `targets`, and 0 otherwise.
pub fn immersion_oracle(g: &Dense, targets: &[usize], n: usize) -> Dense {
    let dim = 1usize << n;
    let local = |x: usize| {
        targets
            .iter()
            .enumerate()
            .fold(0, |acc, (k, &t)| acc | (((x >> t) & 1) << k))
    };
    let mask: usize = targets.iter().map(|t| 1usize << t).sum();
    let mut out = vec![vec![c(0.0, 0.0); dim]; dim];
    for y in 0..dim {
        for x in 0..dim {
            if x & !mask == y & !mask {
                out[y][x] = g[local(y)][local(x)];
            }
        }
    }
    out
}

/// `P^T (I (x) G) P` with `P` the basis permutation that moves
/// `targets[k]` to position `k`, realized as an explicit 0/1 matrix.
pub fn permutation_conjugation(g: &Dense, targets: &[usize], n: usize) -> Dense {
    let dim = 1usize << n;
    let k = targets.len();
    let mut order: Vec<usize> = targets.to_vec();
    order.extend((0..n).filter(|q| !targets.contains(q)));
    let mut p = vec![vec![c(0.0, 0.0); dim]; dim];
    for x in 0..dim {
        let y = order
            .iter()
            .enumerate()
            .fold(0, |acc, (pos, &q)| acc | (((x >> q) & 1) << pos));
        p[y][x] = c(1.0, 0.0);
    }
    let pt: Dense = (0..dim).map(|r| (0..dim).map(|s| p[s][r]).collect()).collect();
    let big = kron(&identity(1 << (n - k)), g);
    mul(&pt, &mul(&big, &p))
}

/// Closed form of `PHASE(gamma) H PHASE(delta) H PHASE(alpha)` including
/// its prefactor.
pub fn euler_closed_form(alpha: f64, delta: f64, gamma: f64) -> Dense {
    let pre = cis((gamma + delta + alpha) / 2.0);
    let (s, co) = (delta / 2.0).sin_cos();
    let mi = c(0.0, -1.0);
    vec![
        vec![pre * cis(-(gamma + alpha) / 2.0) * co, pre * mi * cis(-(gamma - alpha) / 2.0) * s],
        vec![pre * mi * cis((gamma - alpha) / 2.0) * s, pre * cis((gamma + alpha) / 2.0) * co],
    ]
}

pub fn det2(m: &Dense) -> Complex {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// `diag(1, ..., 1, u)` style controlled matrix: `u` acts on the least
/// significant qubit when every other qubit is 1.
pub fn all_ones_controlled(u: &Dense, n: usize) -> Dense {
    let dim = 1 << n;
    let mut out = identity(dim);
    let base = dim - 2;
    for r in 0..2 {
        for k in 0..2 {
            out[base + r][base + k] = u[r][k];
        }
    }
    out
}

pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)
}

/// Random circuit drawing from the whole gate catalogue.
pub fn random_circuit<R: Rng + ?Sized>(n: usize, len: usize, rng: &mut R) -> Circuit {
    let mut circuit = Circuit::new(n).unwrap();
    for _ in 0..len {
        let max_arity = n.min(3);
        let kind = loop {
            let kind = match rng.random_range(0..17) {
                0 => GateKind::Not,
                1 => GateKind::H,
                2 => GateKind::PauliX,
                3 => GateKind::PauliY,
                4 => GateKind::PauliZ,
                5 => GateKind::phase(random_angle(rng)),
                6 => GateKind::ry(random_angle(rng)),
                7 => GateKind::u2(random_unitary(2, rng)).unwrap(),
                8 => GateKind::Cnot,
                9 => GateKind::CnotBar,
                10 => GateKind::CnotR,
                11 => GateKind::CnotRBar,
                12 => GateKind::Swap,
                13 => GateKind::cphase(random_angle(rng)),
                14 => GateKind::cu(GateKind::u2(random_unitary(2, rng)).unwrap(), rng.random_range(0..2)).unwrap(),
                15 => GateKind::Toffoli,
                _ => GateKind::c2u(
                    GateKind::ry(random_angle(rng)),
                    [rng.random_range(0..2), rng.random_range(0..2)],
                )
                .unwrap(),
            };
            if kind.n_qubits() <= max_arity {
                break kind;
            }
        };
        let mut qubits: Vec<usize> = (0..n).collect();
        for i in 0..kind.n_qubits() {
            let j = rng.random_range(i..n);
            qubits.swap(i, j);
        }
        qubits.truncate(kind.n_qubits());
        circuit.add(kind, qubits).unwrap();
    }
    circuit
}
