//! Cross-module invariants that don't belong to a single unit suite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spindimer::matrix::{hs_inner, kron, ComplexMatrix};
use spindimer::measures::{bloch_decomposition, f_min, hs_min, negativity, GridSpec, X_ZERO_TOL};
use spindimer::model::DimerParams;
use spindimer::random::{random_density, random_params};
use spindimer::sweep::{measure_value, Measure};
use spindimer::thermal::gibbs_state_analytic;

/// MIN captures correlations beyond entanglement: just above the
/// entanglement-death temperature of the CuNi dimer the state is PPT while
/// the Hilbert-Schmidt MIN stays finite.
#[test]
fn min_survives_where_negativity_dies() {
    let p = DimerParams::cuni(0.01);
    let grid = GridSpec::default();
    // Entanglement dies near 152.6 K for these parameters.
    let t = 160.0;
    let neg = measure_value(&p, t, Measure::Negativity, &grid).unwrap();
    let hs = measure_value(&p, t, Measure::HsMin, &grid).unwrap();
    assert!(neg < 1e-12, "negativity {neg} should be numerically zero");
    assert!(hs > 1e-4, "hs_min {hs} should remain finite");
}

/// Product states with a nondegenerate qubit marginal are undisturbed by
/// their invariant measurement: both MINs vanish.
#[test]
fn product_states_carry_no_min() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let mut found = 0;
    while found < 20 {
        let a = random_density(2, &mut rng);
        let b = random_density(3, &mut rng);
        let rho = kron(&a, &b);
        let d = bloch_decomposition(&rho).unwrap();
        if d.x_norm() <= X_ZERO_TOL {
            continue;
        }
        found += 1;
        assert!(hs_min(&rho).unwrap() < 1e-12);
        assert!(f_min(&rho).unwrap() < 1e-12);
        assert!(negativity(&rho).unwrap() < 1e-12);
    }
}

/// The zero-field thermal state of the dimer has exactly degenerate qubit
/// marginal for any g factors, by the spin-flip symmetry.
#[test]
fn zero_field_forces_degenerate_marginal() {
    let mut rng = ChaCha8Rng::seed_from_u64(78);
    for _ in 0..50 {
        let mut p = random_params(&mut rng);
        p.b = 0.0;
        let t = rng.random_range(0.05..3.0);
        let rho = gibbs_state_analytic(&p, t).unwrap().rho;
        let d = bloch_decomposition(&rho).unwrap();
        assert!(d.x_norm() < 1e-14, "x = {:?} at B = 0", d.x);
    }
}

/// Purity from the coefficient expansion, the matrix trace and the state
/// object all agree.
#[test]
fn purity_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(79);
    for _ in 0..30 {
        let p = random_params(&mut rng);
        let t = rng.random_range(0.05..3.0);
        let state = gibbs_state_analytic(&p, t).unwrap();
        let d = bloch_decomposition(&state.rho).unwrap();
        let via_gamma = d.coefficient_norm_sq();
        let via_trace = hs_inner(&state.rho, &state.rho).unwrap();
        assert!((via_gamma - via_trace).abs() < 1e-12);
        assert!((state.purity() - via_trace).abs() < 1e-14);
    }
}

/// Fidelity against the maximally mixed state measures purity:
/// F(rho, 1/6) = (1/6) / Tr(rho^2) in this trace-product form.
#[test]
fn fidelity_against_maximally_mixed() {
    let mut rng = ChaCha8Rng::seed_from_u64(80);
    let mixed = ComplexMatrix::identity(6).scaled(1.0 / 6.0);
    for _ in 0..30 {
        let rho = random_density(6, &mut rng);
        let f = spindimer::measures::fidelity(&rho, &mixed).unwrap();
        let purity = hs_inner(&rho, &rho).unwrap();
        assert!((f - 1.0 / (6.0 * purity)).abs() < 1e-12);
    }
}
