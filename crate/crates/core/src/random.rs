//! Haar-random unitaries and states for tests, benchmarks and the CLI.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::linalg::{cis, Complex, ComplexMatrix, StateVector};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex {
    Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-distributed unitary: Gram-Schmidt on a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let mut cols: Vec<Vec<Complex>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut v: Vec<Complex> = (0..dim).map(|_| gaussian(rng)).collect();
        // two passes keep the columns orthogonal to machine precision
        for _ in 0..2 {
            for c in &cols {
                let proj: Complex = c.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= proj * y;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue;
        }
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    ComplexMatrix::from_fn(dim, |r, c| cols[c][r])
}

/// Haar unitary rescaled to determinant one.
pub fn random_special_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let u = random_unitary(dim, rng);
    let phase = u.determinant().arg() / dim as f64;
    u.scale(cis(-phase))
}

pub fn random_state<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> StateVector {
    let mut amps: Vec<Complex> = (0..1usize << n_qubits).map(|_| gaussian(rng)).collect();
    let norm = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for a in &mut amps {
        *a /= norm;
    }
    StateVector::from_raw(n_qubits, amps)
}

/// Uniform angle in `(-pi, pi]`.
pub fn random_angle<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    PI - rng.random::<f64>() * 2.0 * PI
}
