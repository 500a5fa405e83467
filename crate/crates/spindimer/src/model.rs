//! The mixed spin-(1/2,1) Heisenberg dimer: parameters, Hamiltonian and its
//! closed-form spectrum.
//!
//! The Hamiltonian is
//!
//! ```text
//! H = J [ Delta (Sx Ox + Sy Oy) + Sz Oz ] + D Oz^2 - g1 muB B Sz - g2 muB B Oz
//! ```
//!
//! with S the spin-1/2 operators, O the spin-1 operators, J the exchange
//! coupling, Delta the XXZ anisotropy, D the uniaxial single-ion anisotropy
//! on the spin-1 site and g1, g2 the Lande factors. The working basis is the
//! qubit-major product order
//!
//! ```text
//! { |1/2,1>, |1/2,0>, |1/2,-1>, |-1/2,1>, |-1/2,0>, |-1/2,-1> }
//! ```
//!
//! so a composite index is 3*a + b with a the qubit index (0 = up) and b the
//! qutrit index (0 = m=1, 1 = m=0, 2 = m=-1). All 6x6 matrices in this crate,
//! serialized or not, use this order.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{kron, ComplexMatrix};

/// Boltzmann constant, J/K (exact, 2019 SI).
pub const BOLTZMANN: f64 = 1.380649e-23;
/// Bohr magneton, J/T (CODATA 2018).
pub const BOHR_MAGNETON: f64 = 9.2740100783e-24;
/// Bohr magneton over Boltzmann constant, K/T. Converts g*B to a Zeeman
/// energy expressed in kelvin.
pub const MU_B_OVER_K_B: f64 = BOHR_MAGNETON / BOLTZMANN;

/// Basis labels in storage order.
pub const BASIS_LABELS: [&str; 6] = [
    "|+1/2,+1>",
    "|+1/2, 0>",
    "|+1/2,-1>",
    "|-1/2,+1>",
    "|-1/2, 0>",
    "|-1/2,-1>",
];

/// Unit conventions for parameters, fields and temperatures.
///
/// Dimensionless: every energy (J, D, muB*B, kB*T) is a plain number on a
/// common scale; muB = kB = 1. With j = 1 the field axis reads muB*B/J and
/// the temperature axis reads kB*T/J.
///
/// Physical: energies are stored as E/kB in kelvin (so `j` is J/kB), the
/// field is in tesla and temperatures in kelvin. The Zeeman conversion uses
/// `MU_B_OVER_K_B`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UnitSystem {
    Dimensionless,
    Physical,
}

impl std::fmt::Display for UnitSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UnitSystem::Dimensionless => write!(f, "dimensionless"),
            UnitSystem::Physical => write!(f, "physical"),
        }
    }
}

/// Physical parameter record of the dimer.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DimerParams {
    /// Exchange coupling; energy units of the active unit system.
    pub j: f64,
    /// XXZ exchange anisotropy (dimensionless).
    pub delta: f64,
    /// Uniaxial single-ion anisotropy on the spin-1 site; energy units.
    pub d: f64,
    /// Lande factor of the spin-1/2 ion.
    pub g1: f64,
    /// Lande factor of the spin-1 ion.
    pub g2: f64,
    /// Magnetic field: muB*B (dimensionless mode) or tesla (physical mode).
    pub b: f64,
    pub units: UnitSystem,
}

impl DimerParams {
    pub fn dimensionless(j: f64, delta: f64, d_over_j: f64, g1: f64, g2: f64, b: f64) -> Self {
        Self {
            j,
            delta,
            d: d_over_j * j,
            g1,
            g2,
            b,
            units: UnitSystem::Dimensionless,
        }
    }

    /// Physical-unit parameters: exchange and anisotropy as J/kB and D/kB in
    /// kelvin, field in tesla.
    pub fn physical(
        j_kelvin: f64,
        delta: f64,
        d_kelvin: f64,
        g1: f64,
        g2: f64,
        b_tesla: f64,
    ) -> Self {
        Self {
            j: j_kelvin,
            delta,
            d: d_kelvin,
            g1,
            g2,
            b: b_tesla,
            units: UnitSystem::Physical,
        }
    }

    /// Reported CuNi heterodinuclear-complex parameters: J/kB = 141 K,
    /// g(Cu) = 2.20, g(Ni) = 2.29, isotropic exchange, no single-ion term.
    pub fn cuni(b_tesla: f64) -> Self {
        Self::physical(141.0, 1.0, 0.0, 2.20, 2.29, b_tesla)
    }

    pub fn validate(&self) -> Result<()> {
        if self.j == 0.0 || !self.j.is_finite() {
            return Err(Error::InvalidParams(format!(
                "exchange coupling must be nonzero and finite, got {}",
                self.j
            )));
        }
        for (name, g) in [("g1", self.g1), ("g2", self.g2)] {
            if g <= 0.0 || !g.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be positive, got {g}"
                )));
            }
        }
        for (name, v) in [("delta", self.delta), ("d", self.d), ("b", self.b)] {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "{name} must be finite, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Effective Zeeman energies h_i = g_i * muB * B of the two sites, in the
/// active unit system (kelvin in physical mode).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZeemanFields {
    pub h1: f64,
    pub h2: f64,
}

pub fn zeeman_fields(p: &DimerParams) -> ZeemanFields {
    let scale = match p.units {
        UnitSystem::Dimensionless => 1.0,
        UnitSystem::Physical => MU_B_OVER_K_B,
    };
    ZeemanFields {
        h1: p.g1 * scale * p.b,
        h2: p.g2 * scale * p.b,
    }
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[0., 1., 1., 0.])
}

pub fn pauli_y() -> ComplexMatrix {
    let i = Complex64::I;
    ComplexMatrix::from_entries(2, 2, vec![Complex64::ZERO, -i, i, Complex64::ZERO])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real(2, 2, &[1., 0., 0., -1.])
}

/// Spin-1 operators in the m = (1, 0, -1) basis.
pub fn spin1_x() -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_real(3, 3, &[0., s, 0., s, 0., s, 0., s, 0.])
}

pub fn spin1_y() -> ComplexMatrix {
    let s = Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2);
    ComplexMatrix::from_entries(
        3,
        3,
        vec![
            Complex64::ZERO,
            -s,
            Complex64::ZERO,
            s,
            Complex64::ZERO,
            -s,
            Complex64::ZERO,
            s,
            Complex64::ZERO,
        ],
    )
}

pub fn spin1_z() -> ComplexMatrix {
    ComplexMatrix::from_real(3, 3, &[1., 0., 0., 0., 0., 0., 0., 0., -1.])
}

/// The dimer Hamiltonian as a real-symmetric 6x6 matrix.
///
/// Diagonal, in basis order: (A-, B-, C+, C-, B+, A+) with
///   A+- = (J + 2D +- (h1 + 2 h2)) / 2
///   B+- = +- h1 / 2
///   C+- = -(J - 2D +- (h1 - 2 h2)) / 2
/// and the only off-diagonal element nu = J*Delta/sqrt(2) linking
/// |1/2,0> with |-1/2,1> and |1/2,-1> with |-1/2,0>.
pub fn build_hamiltonian(p: &DimerParams) -> ComplexMatrix {
    let ZeemanFields { h1, h2 } = zeeman_fields(p);
    let (j, d) = (p.j, p.d);
    let a_plus = 0.5 * (j + 2.0 * d + (h1 + 2.0 * h2));
    let a_minus = 0.5 * (j + 2.0 * d - (h1 + 2.0 * h2));
    let b_plus = 0.5 * h1;
    let b_minus = -0.5 * h1;
    let c_plus = -0.5 * (j - 2.0 * d + (h1 - 2.0 * h2));
    let c_minus = -0.5 * (j - 2.0 * d - (h1 - 2.0 * h2));
    let nu = j * p.delta / std::f64::consts::SQRT_2;

    let mut h = ComplexMatrix::zeros(6, 6);
    for (i, v) in [a_minus, b_minus, c_plus, c_minus, b_plus, a_plus]
        .into_iter()
        .enumerate()
    {
        h[(i, i)] = Complex64::new(v, 0.0);
    }
    let nu = Complex64::new(nu, 0.0);
    h[(1, 3)] = nu;
    h[(3, 1)] = nu;
    h[(2, 4)] = nu;
    h[(4, 2)] = nu;
    h
}

/// Same Hamiltonian assembled operator by operator; used as an independent
/// cross-check of the matrix-element construction.
pub fn build_hamiltonian_from_operators(p: &DimerParams) -> ComplexMatrix {
    let ZeemanFields { h1, h2 } = zeeman_fields(p);
    let (i2, i3) = (ComplexMatrix::identity(2), ComplexMatrix::identity(3));
    // Spin-1/2 operators are sigma/2.
    let sx = pauli_x().scaled(0.5);
    let sy = pauli_y().scaled(0.5);
    let sz = pauli_z().scaled(0.5);
    let (ox, oy, oz) = (spin1_x(), spin1_y(), spin1_z());

    let mut h = kron(&sx, &ox).scaled(p.j * p.delta);
    h = &h + &kron(&sy, &oy).scaled(p.j * p.delta);
    h = &h + &kron(&sz, &oz).scaled(p.j);
    h = &h + &kron(&i2, &oz.mul(&oz)).scaled(p.d);
    h = &h + &kron(&pauli_z(), &i3).scaled(-0.5 * h1);
    h = &h + &kron(&i2, &oz).scaled(-h2);
    h
}

/// Closed-form spectrum of the dimer Hamiltonian.
///
/// Pair structure, in the working basis:
///   E1, E2: the polarized product states |1/2,1> and |-1/2,-1>;
///   E3, E4: the { |1/2,0>, |-1/2,1> } block, splitting eta_minus;
///   E5, E6: the { |1/2,-1>, |-1/2,0> } block, splitting eta_plus.
#[derive(Clone, Debug)]
pub struct AnalyticSpectrum {
    /// Energies E1..E6 in the fixed labeling above (not sorted).
    pub energies: [f64; 6],
    /// Eigenvectors as columns, same labeling.
    pub eigenvectors: ComplexMatrix,
    pub eta_plus: f64,
    pub eta_minus: f64,
    pub c1_plus: f64,
    pub c1_minus: f64,
    pub c2_plus: f64,
    pub c2_minus: f64,
    /// Set when eta_minus (resp. eta_plus) is below the degeneracy cutoff and
    /// the normalization constants were replaced by the symmetric 1/sqrt(2)
    /// limit.
    pub degenerate_minus: bool,
    pub degenerate_plus: bool,
}

/// Below this, the eta-dependent normalization constants are bypassed.
pub const ETA_DEGENERACY_CUTOFF: f64 = 1e-12;

pub fn analytic_spectrum(p: &DimerParams) -> AnalyticSpectrum {
    let ZeemanFields { h1, h2 } = zeeman_fields(p);
    let (j, d) = (p.j, p.d);
    let jd = j * p.delta;

    // eta_{+-} = sqrt((J - 2D +- 2(h1 - h2))^2 + 8 (J Delta)^2)
    let w_minus = j - 2.0 * d - 2.0 * (h1 - h2);
    let w_plus = j - 2.0 * d + 2.0 * (h1 - h2);
    let eta_minus = (w_minus * w_minus + 8.0 * jd * jd).sqrt();
    let eta_plus = (w_plus * w_plus + 8.0 * jd * jd).sqrt();

    let e1 = 0.5 * (j + 2.0 * d - (h1 + 2.0 * h2));
    let e2 = 0.5 * (j + 2.0 * d + (h1 + 2.0 * h2));
    let e3 = -0.25 * (j - 2.0 * d + 2.0 * h2) - 0.25 * eta_minus;
    let e4 = -0.25 * (j - 2.0 * d + 2.0 * h2) + 0.25 * eta_minus;
    let e5 = -0.25 * (j - 2.0 * d - 2.0 * h2) - 0.25 * eta_plus;
    let e6 = -0.25 * (j - 2.0 * d - 2.0 * h2) + 0.25 * eta_plus;

    let degenerate_minus = eta_minus < ETA_DEGENERACY_CUTOFF;
    let degenerate_plus = eta_plus < ETA_DEGENERACY_CUTOFF;

    let half = std::f64::consts::FRAC_1_SQRT_2;
    let (c1_plus, c1_minus) = if degenerate_minus {
        (half, half)
    } else {
        let q = (w_minus / eta_minus).clamp(-1.0, 1.0);
        (
            (0.5 * (1.0 + q)).max(0.0).sqrt(),
            (0.5 * (1.0 - q)).max(0.0).sqrt(),
        )
    };
    let (c2_plus, c2_minus) = if degenerate_plus {
        (half, half)
    } else {
        let q = (w_plus / eta_plus).clamp(-1.0, 1.0);
        (
            (0.5 * (1.0 + q)).max(0.0).sqrt(),
            (0.5 * (1.0 - q)).max(0.0).sqrt(),
        )
    };

    // The c formulas assume a nonnegative off-diagonal nu; flip the coupled
    // component when J*Delta < 0 so the eigenvector equation still holds.
    let sgn = if jd < 0.0 { -1.0 } else { 1.0 };

    let mut v = ComplexMatrix::zeros(6, 6);
    let re = |x: f64| Complex64::new(x, 0.0);
    // Basis indices: 0=|1/2,1> 1=|1/2,0> 2=|1/2,-1> 3=|-1/2,1> 4=|-1/2,0> 5=|-1/2,-1>.
    v[(0, 0)] = Complex64::ONE; // phi1 = |1/2,1>
    v[(5, 1)] = Complex64::ONE; // phi2 = |-1/2,-1>
    v[(1, 2)] = re(c1_minus); // phi3 = c1- |1/2,0> - c1+ |-1/2,1>
    v[(3, 2)] = re(-sgn * c1_plus);
    v[(1, 3)] = re(c1_plus); // phi4 = c1+ |1/2,0> + c1- |-1/2,1>
    v[(3, 3)] = re(sgn * c1_minus);
    v[(2, 4)] = re(c2_plus); // phi5 = c2+ |1/2,-1> - c2- |-1/2,0>
    v[(4, 4)] = re(-sgn * c2_minus);
    v[(2, 5)] = re(c2_minus); // phi6 = c2- |1/2,-1> + c2+ |-1/2,0>
    v[(4, 5)] = re(sgn * c2_plus);

    AnalyticSpectrum {
        energies: [e1, e2, e3, e4, e5, e6],
        eigenvectors: v,
        eta_plus,
        eta_minus,
        c1_plus,
        c1_minus,
        c2_plus,
        c2_minus,
        degenerate_minus,
        degenerate_plus,
    }
}

impl AnalyticSpectrum {
    pub fn eigenvector(&self, k: usize) -> Vec<Complex64> {
        (0..6).map(|i| self.eigenvectors[(i, k)]).collect()
    }

    pub fn min_energy(&self) -> f64 {
        self.energies.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn sorted_energies(&self) -> [f64; 6] {
        let mut e = self.energies;
        e.sort_by(f64::total_cmp);
        e
    }
}
