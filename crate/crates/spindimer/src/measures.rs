//! Correlation measures on the qubit-qutrit state: Hilbert-Schmidt MIN,
//! fidelity-based MIN, trace-product fidelity and negativity.
//!
//! The measurement-level (definitional) route is ground truth throughout:
//! projective measurements on the qubit that leave its marginal invariant,
//! post-measurement states formed explicitly, disturbance measured in the
//! chosen metric. Closed formulas in terms of the Bloch correlation data are
//! used where they are exact (x != 0 Hilbert-Schmidt branch, x = 0 eigenvalue
//! branch) and otherwise serve as cross-checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{
    hermitian_eig, hs_inner, kron, partial_trace, partial_transpose_qubit, trace_norm,
    ComplexMatrix, Subsystem, HERMITICITY_TOL,
};
use crate::model::{pauli_x, pauli_y, pauli_z};

/// Below this marginal Bloch norm the qubit marginal is treated as
/// degenerate and the full measurement family is searched.
pub const X_ZERO_TOL: f64 = 1e-9;

fn ensure_state(rho: &ComplexMatrix, dim: usize) -> Result<()> {
    if rho.rows() != dim || rho.cols() != dim {
        return Err(Error::NotAState(format!(
            "expected a {dim}x{dim} density matrix, got {}x{}",
            rho.rows(),
            rho.cols()
        )));
    }
    if rho.hermiticity_deviation() > HERMITICITY_TOL {
        return Err(Error::NotAState("density matrix is not Hermitian".into()));
    }
    let tr = rho.trace().re;
    if (tr - 1.0).abs() > 1e-10 {
        return Err(Error::NotAState(format!("trace is {tr:.12}, not 1")));
    }
    Ok(())
}

/// Orthonormal Hermitian qubit basis {1, sx, sy, sz} / sqrt(2).
pub fn qubit_operator_basis() -> [ComplexMatrix; 4] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    [
        ComplexMatrix::identity(2).scaled(s),
        pauli_x().scaled(s),
        pauli_y().scaled(s),
        pauli_z().scaled(s),
    ]
}

/// The eight Gell-Mann matrices, Tr(l_i l_j) = 2 delta_ij.
pub fn gell_mann_matrices() -> [ComplexMatrix; 8] {
    let i = Complex64::I;
    let z = Complex64::ZERO;
    let one = Complex64::ONE;
    let s3 = 1.0 / 3f64.sqrt();
    [
        ComplexMatrix::from_real(3, 3, &[0., 1., 0., 1., 0., 0., 0., 0., 0.]),
        ComplexMatrix::from_entries(3, 3, vec![z, -i, z, i, z, z, z, z, z]),
        ComplexMatrix::from_real(3, 3, &[1., 0., 0., 0., -1., 0., 0., 0., 0.]),
        ComplexMatrix::from_real(3, 3, &[0., 0., 1., 0., 0., 0., 1., 0., 0.]),
        ComplexMatrix::from_entries(3, 3, vec![z, z, -i, z, z, z, i, z, z]),
        ComplexMatrix::from_real(3, 3, &[0., 0., 0., 0., 0., 1., 0., 1., 0.]),
        ComplexMatrix::from_entries(3, 3, vec![z, z, z, z, z, -i, z, i, z]),
        ComplexMatrix::from_entries(
            3,
            3,
            vec![one * s3, z, z, z, one * s3, z, z, z, -2.0 * s3 * one],
        ),
    ]
}

/// Orthonormal Hermitian qutrit basis: 1/sqrt(3) followed by the Gell-Mann
/// matrices over sqrt(2).
pub fn operator_basis_qutrit() -> [ComplexMatrix; 9] {
    let s2 = std::f64::consts::FRAC_1_SQRT_2;
    let gm = gell_mann_matrices();
    let mut out: Vec<ComplexMatrix> = Vec::with_capacity(9);
    out.push(ComplexMatrix::identity(3).scaled(1.0 / 3f64.sqrt()));
    for m in gm {
        out.push(m.scaled(s2));
    }
    out.try_into().expect("nine basis elements")
}

/// Expansion of a 6x6 state over the orthonormal product operator basis
/// X_i (x) Y_j.
///
/// `gamma[i][j] = Tr(rho (X_i (x) Y_j))` is the full 4x9 coefficient matrix;
/// `x` and `y` are the unnormalized local Bloch vectors
/// (x_i = Tr(rho (sigma_i (x) 1)), y_j = Tr(rho (1 (x) lambda_j))) and
/// `t` is the 3x8 correlation block of gamma.
#[derive(Clone, Debug)]
pub struct BlochDecomposition {
    pub x: [f64; 3],
    pub y: [f64; 8],
    pub t: [[f64; 8]; 3],
    pub gamma: [[f64; 9]; 4],
}

impl BlochDecomposition {
    pub fn x_norm(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// The 3x3 matrix T T^t of the correlation block.
    pub fn tt(&self) -> [[f64; 3]; 3] {
        let mut out = [[0.0; 3]; 3];
        for (i, row_i) in self.t.iter().enumerate() {
            for (k, row_k) in self.t.iter().enumerate() {
                out[i][k] = row_i.iter().zip(row_k).map(|(a, b)| a * b).sum();
            }
        }
        out
    }

    /// Sum of squared coefficients; equals Tr(rho^2) by orthonormality.
    pub fn coefficient_norm_sq(&self) -> f64 {
        self.gamma.iter().flatten().map(|g| g * g).sum()
    }
}

pub fn bloch_decomposition(rho: &ComplexMatrix) -> Result<BlochDecomposition> {
    ensure_state(rho, 6)?;
    let xs = qubit_operator_basis();
    let ys = operator_basis_qutrit();
    let mut gamma = [[0.0; 9]; 4];
    for (i, xi) in xs.iter().enumerate() {
        for (j, yj) in ys.iter().enumerate() {
            gamma[i][j] = hs_inner(rho, &kron(xi, yj))?;
        }
    }
    let s6 = 6f64.sqrt();
    let x = [s6 * gamma[1][0], s6 * gamma[2][0], s6 * gamma[3][0]];
    let mut y = [0.0; 8];
    for (j, yj) in y.iter_mut().enumerate() {
        *yj = 2.0 * gamma[0][j + 1];
    }
    let mut t = [[0.0; 8]; 3];
    for i in 0..3 {
        t[i].copy_from_slice(&gamma[i + 1][1..]);
    }
    Ok(BlochDecomposition { x, y, t, gamma })
}

/// Rebuild the state from its coefficients; inverse of `bloch_decomposition`.
pub fn reconstruct_from_bloch(d: &BlochDecomposition) -> ComplexMatrix {
    let xs = qubit_operator_basis();
    let ys = operator_basis_qutrit();
    let mut rho = ComplexMatrix::zeros(6, 6);
    for (i, xi) in xs.iter().enumerate() {
        for (j, yj) in ys.iter().enumerate() {
            if d.gamma[i][j] != 0.0 {
                rho = &rho + &kron(xi, yj).scaled(d.gamma[i][j]);
            }
        }
    }
    rho
}

/// Two-outcome projective measurement on the qubit along a unit Bloch
/// direction n: projectors (1 +- n.sigma)/2.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveMeasurement {
    pub n: [f64; 3],
}

impl ProjectiveMeasurement {
    pub fn along(n: [f64; 3]) -> Self {
        let norm = n.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(norm > 0.0, "measurement direction must be nonzero");
        Self {
            n: [n[0] / norm, n[1] / norm, n[2] / norm],
        }
    }

    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self {
            n: [
                theta.sin() * phi.cos(),
                theta.sin() * phi.sin(),
                theta.cos(),
            ],
        }
    }

    /// The pair (P+, P-) of 2x2 rank-1 projectors.
    pub fn projectors(&self) -> [ComplexMatrix; 2] {
        let [nx, ny, nz] = self.n;
        let mut ns = pauli_x().scaled(nx);
        ns = &ns + &pauli_y().scaled(ny);
        ns = &ns + &pauli_z().scaled(nz);
        let i2 = ComplexMatrix::identity(2);
        [(&i2 + &ns).scaled(0.5), (&i2 - &ns).scaled(0.5)]
    }
}

/// The locally invariant measurement family of a state: unique along the
/// marginal Bloch direction when the qubit marginal is nondegenerate,
/// otherwise the whole sphere of directions.
#[derive(Clone, Debug)]
pub enum MeasurementFamily {
    Unique(ProjectiveMeasurement),
    XZero,
}

pub fn locally_invariant_measurements(rho: &ComplexMatrix, tol: f64) -> Result<MeasurementFamily> {
    let d = bloch_decomposition(rho)?;
    if d.x_norm() > tol {
        Ok(MeasurementFamily::Unique(ProjectiveMeasurement::along(d.x)))
    } else {
        Ok(MeasurementFamily::XZero)
    }
}

/// Post-measurement state sum_k (P_k (x) 1) rho (P_k (x) 1).
pub fn apply_measurement(rho: &ComplexMatrix, m: &ProjectiveMeasurement) -> Result<ComplexMatrix> {
    ensure_state(rho, 6)?;
    Ok(post_measurement(rho, m))
}

fn post_measurement(rho: &ComplexMatrix, m: &ProjectiveMeasurement) -> ComplexMatrix {
    let i3 = ComplexMatrix::identity(3);
    let mut out = ComplexMatrix::zeros(6, 6);
    for p in m.projectors() {
        let big = kron(&p, &i3);
        out = &out + &big.mul(rho).mul(&big);
    }
    out
}

/// Trace-product fidelity F(rho, sigma) = Tr(rho sigma)^2 / (Tr rho^2 Tr sigma^2).
pub fn fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if (rho.rows(), rho.cols()) != (sigma.rows(), sigma.cols()) {
        return Err(Error::NotAState(
            "fidelity arguments must have equal dimension".into(),
        ));
    }
    ensure_state(rho, rho.rows())?;
    ensure_state(sigma, sigma.rows())?;
    let cross = hs_inner(rho, sigma)?;
    let pr = hs_inner(rho, rho)?;
    let ps = hs_inner(sigma, sigma)?;
    Ok((cross * cross / (pr * ps)).clamp(0.0, 1.0))
}

/// Negativity (|| rho^(T_a) ||_1 - 1) / 2 from the partial transpose over
/// the qubit.
pub fn negativity(rho: &ComplexMatrix) -> Result<f64> {
    ensure_state(rho, 6)?;
    let pt = partial_transpose_qubit(rho)?;
    let value = 0.5 * (trace_norm(&pt)? - 1.0);
    debug_assert!(
        value > -1e-12,
        "negativity below the rounding floor: {value}"
    );
    Ok(value.max(0.0))
}

/// Grid resolution and refinement depth for searching the measurement
/// sphere on the degenerate (x = 0) branch.
#[derive(Clone, Copy, Debug)]
pub struct GridSpec {
    pub n_theta: usize,
    pub n_phi: usize,
    pub refine_passes: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        // theta_i = i pi / n_theta, phi_j = j 2pi / n_phi; doubling either
        // count keeps the previous points, so refinement is monotone.
        Self {
            n_theta: 180,
            n_phi: 360,
            refine_passes: 3,
        }
    }
}

impl GridSpec {
    pub fn with_resolution(n_phi: usize, n_theta: usize) -> Self {
        Self {
            n_theta,
            n_phi,
            ..Self::default()
        }
    }
}

/// Which functional the measurement search extremizes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleObjective {
    /// Maximize the squared Hilbert-Schmidt distance || rho - P(rho) ||^2.
    Hs,
    /// Minimize the fidelity F(rho, P(rho)).
    Fid,
}

/// Fast evaluator for the measurement overlap m(n) = Tr(rho P_n(rho)).
///
/// Both search objectives reduce to it:
/// || rho - P(rho) ||^2 = Tr rho^2 - m(n) and F(rho, P(rho)) = m(n)/Tr rho^2,
/// since P is an idempotent, self-adjoint map. The 3x3 block-pair traces of
/// rho are contracted once so a grid point costs a few dozen multiplies.
struct OverlapEvaluator {
    /// tau[a][b][c][d] = Tr(R_ab R_cd) over the 3x3 qubit blocks of rho.
    tau: [[[[Complex64; 2]; 2]; 2]; 2],
    purity: f64,
}

impl OverlapEvaluator {
    #[allow(clippy::needless_range_loop)]
    fn new(rho: &ComplexMatrix) -> Self {
        let block_trace = |a: usize, b: usize, c: usize, d: usize| -> Complex64 {
            let mut sum = Complex64::ZERO;
            for i in 0..3 {
                for j in 0..3 {
                    sum += rho[(3 * a + i, 3 * b + j)] * rho[(3 * c + j, 3 * d + i)];
                }
            }
            sum
        };
        let mut tau = [[[[Complex64::ZERO; 2]; 2]; 2]; 2];
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        tau[a][b][c][d] = block_trace(a, b, c, d);
                    }
                }
            }
        }
        let purity = (0..2)
            .map(|a| (0..2).map(|b| tau[a][b][b][a].re).sum::<f64>())
            .sum();
        Self { tau, purity }
    }

    #[allow(clippy::needless_range_loop)]
    fn overlap(&self, n: [f64; 3]) -> f64 {
        let [nx, ny, nz] = n;
        let half = 0.5;
        // Projector entries for (1 + n.sigma)/2; the minus projector swaps signs.
        let pp = [
            [
                Complex64::new(half * (1.0 + nz), 0.0),
                Complex64::new(half * nx, -half * ny),
            ],
            [
                Complex64::new(half * nx, half * ny),
                Complex64::new(half * (1.0 - nz), 0.0),
            ],
        ];
        let pm = [
            [
                Complex64::new(half * (1.0 - nz), 0.0),
                Complex64::new(-half * nx, half * ny),
            ],
            [
                Complex64::new(-half * nx, -half * ny),
                Complex64::new(half * (1.0 + nz), 0.0),
            ],
        ];
        let mut m = Complex64::ZERO;
        for p in [&pp, &pm] {
            for a in 0..2 {
                for b in 0..2 {
                    for c in 0..2 {
                        for d in 0..2 {
                            m += p[b][c] * p[d][a] * self.tau[a][b][c][d];
                        }
                    }
                }
            }
        }
        m.re
    }

    fn fid(&self, n: [f64; 3]) -> f64 {
        self.overlap(n) / self.purity
    }
}

fn golden_section_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INVPHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - (b - a) * INVPHI;
    let mut d = a + (b - a) * INVPHI;
    let mut fc = f(c);
    let mut fd = f(d);
    while b - a > tol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - (b - a) * INVPHI;
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + (b - a) * INVPHI;
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Maximize an angular objective over the measurement sphere: coarse grid,
/// then alternating golden-section passes in theta and phi around the best
/// grid point.
fn search_sphere_max(
    obj: &impl Fn(f64, f64) -> f64,
    grid: &GridSpec,
) -> (f64, ProjectiveMeasurement) {
    let (nt, np) = (grid.n_theta.max(2), grid.n_phi.max(2));
    let dt = std::f64::consts::PI / nt as f64;
    let dp = 2.0 * std::f64::consts::PI / np as f64;
    let mut best = f64::NEG_INFINITY;
    let (mut bt, mut bp) = (0.0, 0.0);
    for it in 0..nt {
        let theta = it as f64 * dt;
        for ip in 0..np {
            let phi = ip as f64 * dp;
            let v = obj(theta, phi);
            if v > best {
                best = v;
                bt = theta;
                bp = phi;
            }
        }
    }
    for _ in 0..grid.refine_passes {
        let (t1, _) = golden_section_max(&|t| obj(t, bp), bt - dt, bt + dt, 1e-11);
        bt = t1;
        let (p1, v) = golden_section_max(&|p| obj(bt, p), bp - dp, bp + dp, 1e-11);
        bp = p1;
        best = v;
    }
    (best, ProjectiveMeasurement::from_angles(bt, bp))
}

/// Exhaustive measurement search at the definitional level: the
/// post-measurement state is formed explicitly at every grid point and the
/// objective evaluated from traces, with golden-section refinement. For
/// states with a nondegenerate marginal the search space collapses to the
/// single invariant direction.
pub fn brute_force_measurement_oracle(
    rho: &ComplexMatrix,
    objective: OracleObjective,
    grid: &GridSpec,
) -> Result<f64> {
    let d = bloch_decomposition(rho)?;
    let eval = |theta: f64, phi: f64| -> f64 {
        let m = ProjectiveMeasurement::from_angles(theta, phi);
        let sigma = post_measurement(rho, &m);
        match objective {
            OracleObjective::Hs => {
                let diff = rho - &sigma;
                diff.entries().iter().map(|z| z.norm_sqr()).sum()
            }
            OracleObjective::Fid => {
                let cross: f64 = trace_product(rho, &sigma);
                let pr = trace_product(rho, rho);
                let ps = trace_product(&sigma, &sigma);
                cross * cross / (pr * ps)
            }
        }
    };

    if d.x_norm() > X_ZERO_TOL {
        let m = ProjectiveMeasurement::along(d.x);
        let theta = m.n[2].clamp(-1.0, 1.0).acos();
        let phi = m.n[1].atan2(m.n[0]);
        return Ok(eval(theta, phi));
    }
    let signed = |t: f64, p: f64| match objective {
        OracleObjective::Hs => eval(t, p),
        OracleObjective::Fid => -eval(t, p),
    };
    let (v, _) = search_sphere_max(&signed, grid);
    Ok(match objective {
        OracleObjective::Hs => v,
        OracleObjective::Fid => -v,
    })
}

fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    let mut sum = 0.0;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            sum += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    sum
}

fn eig3_min(m: [[f64; 3]; 3]) -> f64 {
    let cm = ComplexMatrix::from_fn(3, 3, |i, j| Complex64::new(m[i][j], 0.0));
    let eig = hermitian_eig(&cm).expect("TT^t is symmetric");
    eig.eigenvalues[0]
}

/// Closed-form Hilbert-Schmidt MIN from the Bloch data:
/// Tr(T T^t) - x^t T T^t x / ||x||^2 when x != 0, and
/// Tr(T T^t) - lambda_min(T T^t) when x = 0.
pub fn hs_min_closed_form(d: &BlochDecomposition) -> f64 {
    let tt = d.tt();
    let trace: f64 = (0..3).map(|i| tt[i][i]).sum();
    let xn = d.x_norm();
    if xn > X_ZERO_TOL {
        let xhat = [d.x[0] / xn, d.x[1] / xn, d.x[2] / xn];
        let mut quad = 0.0;
        for i in 0..3 {
            for k in 0..3 {
                quad += xhat[i] * tt[i][k] * xhat[k];
            }
        }
        (trace - quad).max(0.0)
    } else {
        (trace - eig3_min(tt)).max(0.0)
    }
}

/// Closed-form F-MIN candidate reading the coefficient matrix Gamma as the
/// full 4x9 gamma scaled by 1/sqrt(Tr rho^2):
/// Tr(G G^t) - Tr(A G G^t A^t) when x != 0 (A built from the unit marginal
/// Bloch vector), Tr(G G^t) - tau_min(G G^t) when x = 0.
///
/// The x != 0 branch is algebraically exact; the x = 0 branch must be
/// validated against the definitional route before use (see the selftest
/// convention check), and is not used as a shipped value.
#[allow(clippy::needless_range_loop)]
pub fn f_min_closed_form_full_gamma(d: &BlochDecomposition, purity: f64) -> f64 {
    let mut gg = [[0.0; 4]; 4];
    for i in 0..4 {
        for k in 0..4 {
            gg[i][k] = d.gamma[i]
                .iter()
                .zip(&d.gamma[k])
                .map(|(a, b)| a * b)
                .sum::<f64>()
                / purity;
        }
    }
    let trace: f64 = (0..4).map(|i| gg[i][i]).sum();
    let xn = d.x_norm();
    if xn > X_ZERO_TOL {
        let xhat = [d.x[0] / xn, d.x[1] / xn, d.x[2] / xn];
        // Rows of A = (1, +-xhat)/sqrt(2); Tr(A GG^t A^t) keeps the row-0
        // mass plus the xhat quadratic form of the lower block.
        let mut quad = gg[0][0];
        for i in 0..3 {
            for k in 0..3 {
                quad += xhat[i] * gg[i + 1][k + 1] * xhat[k];
            }
        }
        (trace - quad).max(0.0)
    } else {
        let m4 = ComplexMatrix::from_fn(4, 4, |i, j| Complex64::new(gg[i][j], 0.0));
        let eig = hermitian_eig(&m4).expect("GG^t is symmetric");
        (trace - eig.eigenvalues[0]).max(0.0)
    }
}

/// Eigenvalue route for the x = 0 branch of F-MIN implied by the
/// measurement algebra: (Tr(T T^t) - lambda_min(T T^t)) / Tr(rho^2).
pub fn f_min_x_zero_eigen(d: &BlochDecomposition, purity: f64) -> f64 {
    let tt = d.tt();
    let trace: f64 = (0..3).map(|i| tt[i][i]).sum();
    ((trace - eig3_min(tt)) / purity).max(0.0)
}

/// Hilbert-Schmidt MIN.
///
/// x != 0: the invariant measurement is unique; the disturbance
/// || rho - P(rho) ||^2 is evaluated at the measurement level.
/// x = 0: the maximum over the family has the exact eigenvalue form
/// Tr(T T^t) - lambda_min(T T^t).
pub fn hs_min(rho: &ComplexMatrix) -> Result<f64> {
    let d = bloch_decomposition(rho)?;
    Ok(hs_min_from_bloch(rho, &d))
}

fn hs_min_from_bloch(rho: &ComplexMatrix, d: &BlochDecomposition) -> f64 {
    if d.x_norm() > X_ZERO_TOL {
        let m = ProjectiveMeasurement::along(d.x);
        let diff = rho - &post_measurement(rho, &m);
        diff.entries().iter().map(|z| z.norm_sqr()).sum()
    } else {
        hs_min_closed_form(d)
    }
}

/// Fidelity-based MIN.
///
/// x != 0: 1 - F(rho, P(rho)) at the unique invariant measurement.
/// x = 0: 1 minus the fidelity minimum over the measurement sphere, found
/// by grid search with golden-section refinement.
pub fn f_min(rho: &ComplexMatrix) -> Result<f64> {
    f_min_with(rho, &GridSpec::default())
}

pub fn f_min_with(rho: &ComplexMatrix, grid: &GridSpec) -> Result<f64> {
    let d = bloch_decomposition(rho)?;
    Ok(f_min_from_bloch(rho, &d, grid))
}

fn f_min_from_bloch(rho: &ComplexMatrix, d: &BlochDecomposition, grid: &GridSpec) -> f64 {
    if d.x_norm() > X_ZERO_TOL {
        let m = ProjectiveMeasurement::along(d.x);
        let sigma = post_measurement(rho, &m);
        let cross = trace_product(rho, &sigma);
        let pr = trace_product(rho, rho);
        let ps = trace_product(&sigma, &sigma);
        (1.0 - cross * cross / (pr * ps)).clamp(0.0, 1.0)
    } else {
        let eval = OverlapEvaluator::new(rho);
        let (neg_fid, _) = search_sphere_max(
            &|t, p| -eval.fid(ProjectiveMeasurement::from_angles(t, p).n),
            grid,
        );
        (1.0 + neg_fid).clamp(0.0, 1.0)
    }
}

/// Which branch of the invariant-measurement family a report used.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    XNonzero,
    XZero,
}

/// All measures of one state, plus the diagnostics carried into sweep rows.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct MeasureReport {
    pub hs_min: f64,
    pub f_min: f64,
    pub negativity: f64,
    pub purity: f64,
    pub marginal_bloch_norm: f64,
    pub branch: Branch,
}

pub fn measure_report(rho: &ComplexMatrix, grid: &GridSpec) -> Result<MeasureReport> {
    let d = bloch_decomposition(rho)?;
    let purity = hs_inner(rho, rho)?;
    let xn = d.x_norm();
    Ok(MeasureReport {
        hs_min: hs_min_from_bloch(rho, &d),
        f_min: f_min_from_bloch(rho, &d, grid),
        negativity: negativity(rho)?,
        purity,
        marginal_bloch_norm: xn,
        branch: if xn > X_ZERO_TOL {
            Branch::XNonzero
        } else {
            Branch::XZero
        },
    })
}

/// Marginal invariance check P(rho_a) = rho_a for a measurement, used by
/// tests and the selftest command.
pub fn marginal_invariance_defect(rho: &ComplexMatrix, m: &ProjectiveMeasurement) -> Result<f64> {
    let marginal = partial_trace(rho, Subsystem::Qutrit)?;
    let mut post = ComplexMatrix::zeros(2, 2);
    for p in m.projectors() {
        post = &post + &p.mul(&marginal).mul(&p);
    }
    Ok(post.max_abs_diff(&marginal))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DimerParams;
    use crate::thermal::gibbs_state_analytic;
    use num_complex::Complex64;

    fn thermal(
        j: f64,
        delta: f64,
        d_over_j: f64,
        g1: f64,
        g2: f64,
        b: f64,
        t: f64,
    ) -> ComplexMatrix {
        let p = DimerParams::dimensionless(j, delta, d_over_j, g1, g2, b);
        gibbs_state_analytic(&p, t).unwrap().rho
    }

    fn maximally_mixed() -> ComplexMatrix {
        ComplexMatrix::identity(6).scaled(1.0 / 6.0)
    }

    #[test]
    fn qutrit_basis_is_orthonormal() {
        let ys = operator_basis_qutrit();
        assert!((hs_inner(&ys[0], &ys[0]).unwrap() - 1.0).abs() < 1e-14);
        for (i, yi) in ys.iter().enumerate() {
            if i >= 1 {
                assert!(yi.trace().norm() < 1e-14, "Y_{i} not traceless");
            }
            for (j, yj) in ys.iter().enumerate() {
                let g = hs_inner(yi, yj).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-14, "Gram[{i}][{j}] = {g}");
            }
        }
        let xs = qubit_operator_basis();
        for (i, xi) in xs.iter().enumerate() {
            for (j, xj) in xs.iter().enumerate() {
                let g = hs_inner(xi, xj).unwrap();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn bloch_of_maximally_mixed_vanishes() {
        let d = bloch_decomposition(&maximally_mixed()).unwrap();
        assert!(d.x_norm() < 1e-14);
        assert!(d.y.iter().all(|v| v.abs() < 1e-14));
        assert!(d.t.iter().flatten().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn bloch_of_product_state() {
        // |up><up| (x) |m=1><m=1| has x = (0,0,1).
        let up = ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]);
        let m1 = ComplexMatrix::from_real(3, 3, &[1., 0., 0., 0., 0., 0., 0., 0., 0.]);
        let rho = kron(&up, &m1);
        let d = bloch_decomposition(&rho).unwrap();
        assert!((d.x[2] - 1.0).abs() < 1e-14);
        assert!(d.x[0].abs() < 1e-14 && d.x[1].abs() < 1e-14);
    }

    #[test]
    fn bloch_reconstruction_and_parseval() {
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        let d = bloch_decomposition(&rho).unwrap();
        let rebuilt = reconstruct_from_bloch(&d);
        assert!(rebuilt.max_abs_diff(&rho) < 1e-12);
        let purity = hs_inner(&rho, &rho).unwrap();
        assert!((d.coefficient_norm_sq() - purity).abs() < 1e-12);
    }

    #[test]
    fn projector_invariants() {
        let m = ProjectiveMeasurement::from_angles(1.1, 2.3);
        let [pp, pm] = m.projectors();
        let i2 = ComplexMatrix::identity(2);
        assert!((&pp + &pm).max_abs_diff(&i2) < 1e-14);
        assert!(pp.mul(&pp).max_abs_diff(&pp) < 1e-14);
        assert!(pm.mul(&pm).max_abs_diff(&pm) < 1e-14);
        assert!(pp.mul(&pm).max_abs_entry() < 1e-14);
    }

    #[test]
    fn measurement_family_branches() {
        // B = 0 with equal g factors: spin-flip symmetry forces x = 0.
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.0, 0.4);
        assert!(matches!(
            locally_invariant_measurements(&rho, X_ZERO_TOL).unwrap(),
            MeasurementFamily::XZero
        ));

        // |up><up| (x) 1/3 has the unique direction z.
        let up = ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]);
        let rho = kron(&up, &ComplexMatrix::identity(3).scaled(1.0 / 3.0));
        match locally_invariant_measurements(&rho, X_ZERO_TOL).unwrap() {
            MeasurementFamily::Unique(m) => {
                assert!((m.n[2] - 1.0).abs() < 1e-12);
            }
            MeasurementFamily::XZero => panic!("expected the unique branch"),
        }

        // Finite field: the returned direction leaves the marginal invariant.
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        match locally_invariant_measurements(&rho, X_ZERO_TOL).unwrap() {
            MeasurementFamily::Unique(m) => {
                assert!(marginal_invariance_defect(&rho, &m).unwrap() < 1e-12);
            }
            MeasurementFamily::XZero => panic!("expected the unique branch"),
        }
    }

    #[test]
    fn measurement_examples() {
        // Diagonal state, measurement along z: unchanged.
        let rho = thermal(1.0, 0.0, 0.5, 2.0, 2.0, 0.7, 0.4);
        let m = ProjectiveMeasurement::along([0.0, 0.0, 1.0]);
        let post = apply_measurement(&rho, &m).unwrap();
        assert!(post.max_abs_diff(&rho) < 1e-14);

        // Z measurement erases the |+> coherence.
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let rho = kron(&plus, &ComplexMatrix::identity(3).scaled(1.0 / 3.0));
        let post = apply_measurement(&rho, &m).unwrap();
        assert!(post.max_abs_diff(&maximally_mixed()) < 1e-14);

        // Idempotence on a thermal state.
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        let m = ProjectiveMeasurement::from_angles(0.9, 4.0);
        let once = apply_measurement(&rho, &m).unwrap();
        let twice = apply_measurement(&once, &m).unwrap();
        assert!(twice.max_abs_diff(&once) < 1e-12);
    }

    #[test]
    fn hs_min_trivial_cases() {
        assert!(hs_min(&maximally_mixed()).unwrap() < 1e-14);
        // Delta = 0 with a field: diagonal state, invariant z measurement.
        let rho = thermal(1.0, 0.0, 0.3, 2.0, 2.0, 0.5, 0.3);
        assert!(hs_min(&rho).unwrap() < 1e-14);
    }

    #[test]
    fn hs_min_dual_route_agreement() {
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        let d = bloch_decomposition(&rho).unwrap();
        assert!(d.x_norm() > X_ZERO_TOL);
        let definitional = hs_min(&rho).unwrap();
        let closed = hs_min_closed_form(&d);
        assert!(
            (definitional - closed).abs() < 1e-10,
            "definitional {definitional} vs closed {closed}"
        );
    }

    #[test]
    fn overlap_evaluator_matches_explicit_sandwich() {
        let rho = thermal(1.3, 0.8, -0.4, 2.1, 1.9, 0.6, 0.45);
        let eval = OverlapEvaluator::new(&rho);
        for (t, p) in [(0.3, 1.0), (1.2, 2.5), (2.8, 5.9), (0.0, 0.0)] {
            let m = ProjectiveMeasurement::from_angles(t, p);
            let sigma = post_measurement(&rho, &m);
            let direct = trace_product(&rho, &sigma);
            assert!((eval.overlap(m.n) - direct).abs() < 1e-13);
            // The conditional-expectation identities behind the fast path.
            assert!((trace_product(&sigma, &sigma) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn fidelity_examples() {
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        assert!((fidelity(&rho, &rho).unwrap() - 1.0).abs() < 1e-12);

        let up = ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]);
        let down = ComplexMatrix::from_real(2, 2, &[0., 0., 0., 1.]);
        assert!(fidelity(&up, &down).unwrap() < 1e-14);

        let m1 = ComplexMatrix::from_real(3, 3, &[1., 0., 0., 0., 0., 0., 0., 0., 0.]);
        let pure = kron(&up, &m1);
        let f = fidelity(&maximally_mixed(), &pure).unwrap();
        assert!((f - 1.0 / 6.0).abs() < 1e-12);

        // Symmetry.
        let sigma = thermal(1.0, 1.0, -0.5, 2.0, 2.2, 1.0, 0.7);
        let f1 = fidelity(&rho, &sigma).unwrap();
        let f2 = fidelity(&sigma, &rho).unwrap();
        assert!((f1 - f2).abs() < 1e-12);
    }

    #[test]
    fn f_min_trivial_cases() {
        assert!(f_min(&maximally_mixed()).unwrap() < 1e-12);
        let rho = thermal(1.0, 0.0, 0.3, 2.0, 2.0, 0.5, 0.3);
        assert!(f_min(&rho).unwrap() < 1e-12);
    }

    #[test]
    fn f_min_x_zero_grid_matches_eigen_route() {
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.0, 0.3);
        let d = bloch_decomposition(&rho).unwrap();
        assert!(d.x_norm() < X_ZERO_TOL);
        let purity = hs_inner(&rho, &rho).unwrap();
        let grid = f_min(&rho).unwrap();
        let eigen = f_min_x_zero_eigen(&d, purity);
        assert!((grid - eigen).abs() < 1e-9, "grid {grid} vs eigen {eigen}");
    }

    #[test]
    fn negativity_examples() {
        // Diagonal thermal states are PPT.
        let rho = thermal(1.0, 0.0, 0.3, 2.0, 2.0, 0.5, 0.3);
        assert!(negativity(&rho).unwrap() < 1e-14);

        // Product state.
        let up = ComplexMatrix::from_real(2, 2, &[1., 0., 0., 0.]);
        let rho = kron(&up, &ComplexMatrix::identity(3).scaled(1.0 / 3.0));
        assert!(negativity(&rho).unwrap() < 1e-14);

        // Ground-manifold mixture of the isotropic dimer is entangled.
        let rho = thermal(1.0, 1.0, 0.0, 2.0, 2.0, 0.0, 0.01);
        assert!(negativity(&rho).unwrap() > 0.1);
    }

    #[test]
    fn oracle_examples() {
        // x != 0: the oracle is the one-point evaluation.
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        let oracle =
            brute_force_measurement_oracle(&rho, OracleObjective::Hs, &GridSpec::default())
                .unwrap();
        let direct = hs_min(&rho).unwrap();
        assert!((oracle - direct).abs() < 1e-13);

        // Monotone refinement: doubling the (nested) grid cannot lose the max.
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.0, 0.3);
        let coarse = GridSpec {
            n_theta: 24,
            n_phi: 48,
            refine_passes: 0,
        };
        let fine = GridSpec {
            n_theta: 48,
            n_phi: 96,
            refine_passes: 0,
        };
        let v1 = brute_force_measurement_oracle(&rho, OracleObjective::Hs, &coarse).unwrap();
        let v2 = brute_force_measurement_oracle(&rho, OracleObjective::Hs, &fine).unwrap();
        assert!(v2 >= v1 - 1e-15);
    }

    #[test]
    fn oracle_x_zero_matches_eigen_branch_at_high_resolution() {
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.0, 0.3);
        let d = bloch_decomposition(&rho).unwrap();
        let grid = GridSpec::with_resolution(720, 360);
        let hs_oracle = brute_force_measurement_oracle(&rho, OracleObjective::Hs, &grid).unwrap();
        let hs_closed = hs_min_closed_form(&d);
        assert!(
            (hs_oracle - hs_closed).abs() < 1e-6,
            "hs oracle {hs_oracle} vs closed {hs_closed}"
        );

        let purity = hs_inner(&rho, &rho).unwrap();
        let fid_oracle = brute_force_measurement_oracle(&rho, OracleObjective::Fid, &grid).unwrap();
        let fid_eigen = 1.0 - f_min_x_zero_eigen(&d, purity);
        assert!(
            (fid_oracle - fid_eigen).abs() < 1e-6,
            "fid oracle {fid_oracle} vs eigen {fid_eigen}"
        );
    }

    #[test]
    fn hs_min_bounded_by_tt_trace() {
        for (b, t) in [(0.0, 0.3), (0.2, 0.3), (1.0, 0.5), (2.0, 1.5)] {
            let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, b, t);
            let d = bloch_decomposition(&rho).unwrap();
            let tt = d.tt();
            let trace: f64 = (0..3).map(|i| tt[i][i]).sum();
            assert!(hs_min(&rho).unwrap() <= trace + 1e-12);
        }
    }

    #[test]
    fn report_carries_branch_info() {
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.0, 0.3);
        let r = measure_report(&rho, &GridSpec::default()).unwrap();
        assert_eq!(r.branch, Branch::XZero);
        assert!(r.marginal_bloch_norm < X_ZERO_TOL);
        assert!(r.f_min >= 0.0 && r.f_min <= 1.0);
        assert!(r.hs_min >= 0.0 && r.negativity >= 0.0);

        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        let r = measure_report(&rho, &GridSpec::default()).unwrap();
        assert_eq!(r.branch, Branch::XNonzero);
    }

    #[test]
    fn thermal_marginals_are_states() {
        let rho = thermal(1.0, 1.0, 0.5, 2.0, 2.0, 0.2, 0.3);
        let qubit = partial_trace(&rho, Subsystem::Qutrit).unwrap();
        let qutrit = partial_trace(&rho, Subsystem::Qubit).unwrap();
        assert!((qubit.trace().re - 1.0).abs() < 1e-12);
        assert!((qutrit.trace().re - 1.0).abs() < 1e-12);
        assert!(qubit.hermiticity_deviation() < 1e-14);
        assert!(qutrit.hermiticity_deviation() < 1e-14);
        // Index sums over the composite index 3a + b, written out directly.
        for a in 0..2 {
            for a2 in 0..2 {
                let direct: Complex64 = (0..3).map(|b| rho[(3 * a + b, 3 * a2 + b)]).sum();
                assert!((qubit[(a, a2)] - direct).norm() < 1e-15);
            }
        }
        // The marginal Bloch vector is the trace against the Pauli ops.
        let d = bloch_decomposition(&rho).unwrap();
        let xz = qubit.mul(&pauli_z()).trace().re;
        assert!((d.x[2] - xz).abs() < 1e-13);
    }

    #[test]
    fn rejects_invalid_states() {
        let junk = ComplexMatrix::identity(6); // trace 6
        assert!(matches!(hs_min(&junk), Err(Error::NotAState(_))));
        let mut nonherm = maximally_mixed();
        nonherm[(0, 1)] = Complex64::new(0.1, 0.0);
        assert!(matches!(f_min(&nonherm), Err(Error::NotAState(_))));
    }
}
