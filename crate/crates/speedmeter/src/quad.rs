//! Quadrature-space primitives.
//!
//! Quadrature ordering is fixed crate-wide: (amplitude, phase) per optical
//! mode and (x, p) for mechanics. A constant complex coupling c acting on a
//! mode annihilation operator maps to the real 2×2 block
//!
//!   M(c) = [[Re c, −Im c], [Im c, Re c]],
//!
//! and this is the only place that mapping lives.

use nalgebra::{DMatrix, Matrix2, RowVector2};
use num_complex::Complex64;

/// Real 2×2 quadrature block of a constant complex coupling.
pub fn coupling_block(c: Complex64) -> Matrix2<f64> {
    Matrix2::new(c.re, -c.im, c.im, c.re)
}

/// Rotation by `theta` (a port-phase gauge on a quadrature pair).
pub fn rotation(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// Block-diagonal symplectic/commutator form ⊕ [[0, 1], [−1, 0]] for
/// `pairs` quadrature pairs.
pub fn symplectic_form(pairs: usize) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(2 * pairs, 2 * pairs);
    for k in 0..pairs {
        m[(2 * k, 2 * k + 1)] = 1.0;
        m[(2 * k + 1, 2 * k)] = -1.0;
    }
    m
}

/// Homodyne projection row H_φ = {sin φ, cos φ}.
///
/// φ = 0 reads the phase quadrature, φ = π/2 the amplitude quadrature.
pub fn homodyne_row(phi: f64) -> RowVector2<f64> {
    RowVector2::new(phi.sin(), phi.cos())
}

/// Max absolute entry of a complex matrix.
pub fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}
