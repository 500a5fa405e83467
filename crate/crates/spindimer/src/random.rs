//! Seeded random states, unitaries and parameter draws for the selftest
//! command and the randomized test suites.

use num_complex::Complex64;
use rand::Rng;

use crate::matrix::ComplexMatrix;
use crate::model::DimerParams;

/// Standard complex Gaussian via Box-Muller.
fn gaussian(rng: &mut impl Rng) -> Complex64 {
    let u1: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.random_range(0.0..1.0);
    let r = (-2.0 * u1.ln()).sqrt();
    let a = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * a.cos(), r * a.sin())
}

/// Square matrix of independent complex Gaussians.
pub fn ginibre(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| gaussian(rng))
}

/// Full-rank random density matrix G G' / Tr(G G').
pub fn random_density(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(n, rng);
    let gg = g.mul(&g.adjoint());
    let tr = gg.trace().re;
    gg.scaled(1.0 / tr)
}

/// Haar-distributed unitary via Gram-Schmidt on Gaussian columns with the
/// standard phase fix.
pub fn haar_unitary(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(n, rng);
    // Columns of g, orthonormalized.
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| g[(i, j)]).collect())
        .collect();
    #[allow(clippy::needless_range_loop)]
    for j in 0..n {
        for k in 0..j {
            let proj: Complex64 = cols[k]
                .iter()
                .zip(&cols[j])
                .map(|(a, b)| a.conj() * b)
                .sum();
            for i in 0..n {
                let ck = cols[k][i];
                cols[j][i] -= proj * ck;
            }
        }
        let norm: f64 = cols[j].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // Fix the phase so the diagonal of R is positive (proper Haar).
        let phase = {
            let d = cols[j][j] / norm;
            if d.norm() > 1e-12 {
                d / d.norm()
            } else {
                Complex64::ONE
            }
        };
        for z in cols[j].iter_mut() {
            *z /= norm * phase;
        }
    }
    ComplexMatrix::from_fn(n, n, |i, j| cols[j][i])
}

/// Conjugate a 6x6 state by a local product unitary U2 (x) U3.
pub fn conjugate_local(
    rho: &ComplexMatrix,
    u2: &ComplexMatrix,
    u3: &ComplexMatrix,
) -> ComplexMatrix {
    let u = crate::matrix::kron(u2, u3);
    u.mul(rho).mul(&u.adjoint())
}

/// Dimensionless parameter draw over the standard validation ranges:
/// J in [0.1, 2], Delta in [0, 2], D/J in [-2, 2], g in [1.8, 2.4],
/// muB B in [0, 3].
pub fn random_params(rng: &mut impl Rng) -> DimerParams {
    DimerParams::dimensionless(
        rng.random_range(0.1..2.0),
        rng.random_range(0.0..2.0),
        rng.random_range(-2.0..2.0),
        rng.random_range(1.8..2.4),
        rng.random_range(1.8..2.4),
        rng.random_range(0.0..3.0),
    )
}

/// Temperature draw paired with `random_params`.
pub fn random_temperature(rng: &mut impl Rng) -> f64 {
    rng.random_range(0.05..5.0)
}
