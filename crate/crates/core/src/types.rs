//! Domain types shared by every part of the simulator.
//!
//! Units: hbar = 1, energies and couplings are angular frequencies in rad/us,
//! times are in us. Use [`units`] to convert from ordinary frequencies quoted
//! in MHz.
//!
//! Single-excitation states are labelled `1..=n` as in the physics literature.
//! In the full 2^n space, qubit `i` is bit `i - 1` of the basis index
//! (little-endian), so `|i)` lives at full index `1 << (i - 1)`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SesError};

pub type C64 = Complex64;

/// Normalization tolerance on `sum |a_i|^2`.
pub const NORM_TOLERANCE: f64 = 1e-12;

/// Relative tolerance used when ingesting matrices that should be symmetric.
pub const SYMMETRY_TOLERANCE: f64 = 1e-12;

/// Largest qubit count for which 2^n-dimensional states are allowed.
pub const MAX_FULL_QUBITS: usize = 14;

pub mod units {
    use std::f64::consts::TAU;

    /// Ordinary frequency in MHz to angular frequency in rad/us.
    pub fn mhz(f: f64) -> f64 {
        TAU * f
    }

    /// Angular frequency in rad/us to ordinary frequency in MHz.
    pub fn to_mhz(omega: f64) -> f64 {
        omega / TAU
    }
}

/// Dense matrix carried through serde as a list of rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct MatrixRows(pub Vec<Vec<f64>>);

impl From<&DMatrix<f64>> for MatrixRows {
    fn from(m: &DMatrix<f64>) -> Self {
        MatrixRows(
            (0..m.nrows())
                .map(|i| m.row(i).iter().copied().collect())
                .collect(),
        )
    }
}

impl TryFrom<MatrixRows> for DMatrix<f64> {
    type Error = SesError;

    fn try_from(rows: MatrixRows) -> Result<Self> {
        let n = rows.0.len();
        for r in &rows.0 {
            if r.len() != n {
                return Err(SesError::DimensionMismatch {
                    expected: n,
                    found: r.len(),
                });
            }
        }
        Ok(DMatrix::from_fn(n, n, |i, j| rows.0[i][j]))
    }
}

/// Controllable coupling and frequency limits of a device.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HardwareBounds {
    /// Largest coupling magnitude, rad/us.
    pub g_max: f64,
    /// Inclusive interval of allowed qubit energies, rad/us.
    pub epsilon_range: (f64, f64),
}

impl Default for HardwareBounds {
    /// g/2pi up to 100 MHz and qubit frequencies of 5-6 GHz.
    fn default() -> Self {
        HardwareBounds {
            g_max: units::mhz(100.0),
            epsilon_range: (units::mhz(5.0e3), units::mhz(6.0e3)),
        }
    }
}

impl HardwareBounds {
    pub fn new(g_max: f64, epsilon_range: (f64, f64)) -> Result<Self> {
        let (lo, hi) = epsilon_range;
        if !(g_max.is_finite() && g_max > 0.0) {
            return Err(SesError::InvalidArgument(format!(
                "g_max must be positive and finite, got {g_max}"
            )));
        }
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(SesError::InvalidArgument(format!(
                "invalid epsilon range [{lo}, {hi}]"
            )));
        }
        Ok(HardwareBounds {
            g_max,
            epsilon_range,
        })
    }

    /// Bounds given as ordinary frequencies in MHz.
    pub fn from_mhz(g_max: f64, epsilon_range: (f64, f64)) -> Result<Self> {
        Self::new(
            units::mhz(g_max),
            (units::mhz(epsilon_range.0), units::mhz(epsilon_range.1)),
        )
    }

    pub fn epsilon_center(&self) -> f64 {
        0.5 * (self.epsilon_range.0 + self.epsilon_range.1)
    }

    pub fn epsilon_half_width(&self) -> f64 {
        0.5 * (self.epsilon_range.1 - self.epsilon_range.0)
    }
}

fn tol_le(x: f64, bound: f64) -> bool {
    x <= bound + SYMMETRY_TOLERANCE * bound.abs().max(1.0)
}

/// Qubit energies and the symmetric coupling matrix of a fully connected array.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "DeviceParamsRaw", into = "DeviceParamsRaw")]
pub struct DeviceParams {
    epsilon: Vec<f64>,
    g: DMatrix<f64>,
    bounds: HardwareBounds,
}

#[derive(Serialize, Deserialize)]
struct DeviceParamsRaw {
    n: usize,
    epsilon: Vec<f64>,
    g: MatrixRows,
    bounds: HardwareBounds,
}

impl From<DeviceParams> for DeviceParamsRaw {
    fn from(d: DeviceParams) -> Self {
        DeviceParamsRaw {
            n: d.n(),
            g: MatrixRows::from(&d.g),
            epsilon: d.epsilon,
            bounds: d.bounds,
        }
    }
}

impl TryFrom<DeviceParamsRaw> for DeviceParams {
    type Error = SesError;

    fn try_from(raw: DeviceParamsRaw) -> Result<Self> {
        if raw.epsilon.len() != raw.n {
            return Err(SesError::DimensionMismatch {
                expected: raw.n,
                found: raw.epsilon.len(),
            });
        }
        DeviceParams::new(raw.epsilon, raw.g.try_into()?, raw.bounds)
    }
}

impl DeviceParams {
    /// Validates symmetry, zero diagonal, and both hardware bounds.
    pub fn new(epsilon: Vec<f64>, g: DMatrix<f64>, bounds: HardwareBounds) -> Result<Self> {
        let n = epsilon.len();
        if n == 0 {
            return Err(SesError::DimensionTooSmall { n, min: 1 });
        }
        if g.nrows() != n || g.ncols() != n {
            return Err(SesError::DimensionMismatch {
                expected: n,
                found: g.nrows(),
            });
        }
        if epsilon.iter().chain(g.iter()).any(|x| !x.is_finite()) {
            return Err(SesError::NonFinite("device parameters"));
        }
        let (lo, hi) = bounds.epsilon_range;
        for (i, &e) in epsilon.iter().enumerate() {
            if !(tol_le(lo, e) && tol_le(e, hi)) {
                return Err(SesError::InvalidDevice(format!(
                    "epsilon[{}] = {e} outside [{lo}, {hi}]",
                    i + 1
                )));
            }
        }
        for i in 0..n {
            if g[(i, i)] != 0.0 {
                return Err(SesError::InvalidDevice(format!(
                    "g[{0}][{0}] must be zero",
                    i + 1
                )));
            }
            for j in (i + 1)..n {
                if g[(i, j)] != g[(j, i)] {
                    return Err(SesError::Asymmetric {
                        row: i + 1,
                        col: j + 1,
                        delta: (g[(i, j)] - g[(j, i)]).abs(),
                    });
                }
                if !tol_le(g[(i, j)].abs(), bounds.g_max) {
                    return Err(SesError::InvalidDevice(format!(
                        "|g[{}][{}]| = {} exceeds g_max = {}",
                        i + 1,
                        j + 1,
                        g[(i, j)].abs(),
                        bounds.g_max
                    )));
                }
            }
        }
        Ok(DeviceParams { epsilon, g, bounds })
    }

    pub fn n(&self) -> usize {
        self.epsilon.len()
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn g(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn bounds(&self) -> &HardwareBounds {
        &self.bounds
    }
}

/// A normalized state in the single-excitation subspace.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SesStateRaw", into = "SesStateRaw")]
pub struct SesState {
    amplitudes: Vec<C64>,
}

#[derive(Serialize, Deserialize)]
struct SesStateRaw {
    n: usize,
    amplitudes: Vec<C64>,
}

impl From<SesState> for SesStateRaw {
    fn from(s: SesState) -> Self {
        SesStateRaw {
            n: s.dim(),
            amplitudes: s.amplitudes,
        }
    }
}

impl TryFrom<SesStateRaw> for SesState {
    type Error = SesError;

    fn try_from(raw: SesStateRaw) -> Result<Self> {
        if raw.amplitudes.len() != raw.n {
            return Err(SesError::DimensionMismatch {
                expected: raw.n,
                found: raw.amplitudes.len(),
            });
        }
        SesState::new(raw.amplitudes)
    }
}

pub(crate) fn norm_sq(v: &[C64]) -> f64 {
    v.iter().map(|a| a.norm_sqr()).sum()
}

impl SesState {
    /// Wraps amplitudes that must already be normalized.
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(SesError::DimensionTooSmall { n: 0, min: 1 });
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(SesError::NonFinite("state amplitudes"));
        }
        let norm_sq = norm_sq(&amplitudes);
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(SesError::NotNormalized { norm_sq });
        }
        Ok(SesState { amplitudes })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amplitudes: Vec<C64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(SesError::DimensionTooSmall { n: 0, min: 1 });
        }
        if amplitudes.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
            return Err(SesError::NonFinite("state amplitudes"));
        }
        let norm = norm_sq(&amplitudes).sqrt();
        if norm == 0.0 {
            return Err(SesError::ZeroVector);
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(SesState { amplitudes })
    }

    /// Real amplitudes, normalized.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::normalized(values.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    /// Trusted constructor for propagator output; norm is checked by callers.
    pub(crate) fn from_raw(amplitudes: Vec<C64>) -> Self {
        SesState { amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amplitudes
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &SesState) -> Result<C64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn with_global_phase(&self, phase: C64) -> SesState {
        SesState {
            amplitudes: self.amplitudes.iter().map(|a| a * phase).collect(),
        }
    }
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(SesError::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `|i)` for `1 <= i <= n`.
pub fn ses_basis_state(n: usize, i: usize) -> Result<SesState> {
    if n == 0 {
        return Err(SesError::DimensionTooSmall { n, min: 1 });
    }
    if i == 0 || i > n {
        return Err(SesError::IndexOutOfRange { index: i, n });
    }
    let mut amplitudes = vec![C64::new(0.0, 0.0); n];
    amplitudes[i - 1] = C64::new(1.0, 0.0);
    Ok(SesState { amplitudes })
}

/// The W-type state `(|1) + ... + |n)) / sqrt(n)`.
pub fn uniform_state(n: usize) -> Result<SesState> {
    if n == 0 {
        return Err(SesError::DimensionTooSmall { n, min: 1 });
    }
    let a = 1.0 / (n as f64).sqrt();
    Ok(SesState {
        amplitudes: vec![C64::new(a, 0.0); n],
    })
}

/// `|<a|b>|^2`, clamped to `[0, 1]` against rounding.
pub fn fidelity(a: &SesState, b: &SesState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Real symmetric generator acting on the single-excitation subspace.
///
/// The upper triangle is authoritative; the lower triangle always mirrors it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRows", into = "MatrixRows")]
pub struct SesHamiltonian {
    matrix: DMatrix<f64>,
}

impl From<SesHamiltonian> for MatrixRows {
    fn from(h: SesHamiltonian) -> Self {
        MatrixRows::from(&h.matrix)
    }
}

impl TryFrom<MatrixRows> for SesHamiltonian {
    type Error = SesError;

    fn try_from(rows: MatrixRows) -> Result<Self> {
        SesHamiltonian::new(rows.try_into()?)
    }
}

/// Checks `|m_ij - m_ji| <= tol * max|m|` and reports the worst offender.
pub fn check_symmetric(m: &DMatrix<f64>, rel_tol: f64) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(SesError::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.iter().any(|x| !x.is_finite()) {
        return Err(SesError::NonFinite("matrix"));
    }
    let scale = m.amax();
    let n = m.nrows();
    let mut worst = (0, 0, 0.0);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = (m[(i, j)] - m[(j, i)]).abs();
            if d > worst.2 {
                worst = (i, j, d);
            }
        }
    }
    if worst.2 > rel_tol * scale {
        return Err(SesError::Asymmetric {
            row: worst.0 + 1,
            col: worst.1 + 1,
            delta: worst.2,
        });
    }
    Ok(())
}

impl SesHamiltonian {
    /// Accepts a matrix symmetric to [`SYMMETRY_TOLERANCE`] and canonicalizes it.
    pub fn new(matrix: DMatrix<f64>) -> Result<Self> {
        check_symmetric(&matrix, SYMMETRY_TOLERANCE)?;
        if matrix.nrows() == 0 {
            return Err(SesError::DimensionTooSmall { n: 0, min: 1 });
        }
        Ok(Self::from_upper(matrix))
    }

    /// Mirrors the upper triangle into the lower one without checking.
    pub fn from_upper(mut matrix: DMatrix<f64>) -> Self {
        let n = matrix.nrows();
        for i in 0..n {
            for j in (i + 1)..n {
                matrix[(j, i)] = matrix[(i, j)];
            }
        }
        SesHamiltonian { matrix }
    }

    pub fn zeros(n: usize) -> Self {
        SesHamiltonian {
            matrix: DMatrix::zeros(n, n),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    /// Largest absolute matrix element.
    pub fn max_abs(&self) -> f64 {
        self.matrix.amax()
    }

    /// Induced infinity norm (largest absolute row sum), an upper bound on
    /// the spectral radius of a symmetric matrix.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.dim())
            .map(|i| self.matrix.row(i).iter().map(|x| x.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn apply(&self, psi: &[C64]) -> Vec<C64> {
        let n = self.dim();
        let mut out = vec![C64::new(0.0, 0.0); n];
        crate::evolution::dense_matvec(&self.matrix, psi, &mut out);
        out
    }

    /// `<psi|H|psi>` (real for symmetric H).
    pub fn expectation(&self, psi: &[C64]) -> f64 {
        self.apply(psi)
            .iter()
            .zip(psi)
            .map(|(hp, p)| (p.conj() * hp).re)
            .sum()
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.matrix[(i, j)] == 0.0))
    }
}

/// A state of all n qubits, used only to validate the subspace approximation.
#[derive(Clone, Debug, PartialEq)]
pub struct FullState {
    n: usize,
    amplitudes: Vec<C64>,
}

impl FullState {
    pub fn new(n: usize, amplitudes: Vec<C64>) -> Result<Self> {
        check_full_size(n)?;
        check_dims(1 << n, amplitudes.len())?;
        let norm_sq = norm_sq(&amplitudes);
        if (norm_sq - 1.0).abs() > NORM_TOLERANCE {
            return Err(SesError::NotNormalized { norm_sq });
        }
        Ok(FullState { n, amplitudes })
    }

    pub(crate) fn from_raw(n: usize, amplitudes: Vec<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), 1 << n);
        FullState { n, amplitudes }
    }

    /// `|00...0>`.
    pub fn ground(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        check_full_size(n)?;
        if index >= 1 << n {
            return Err(SesError::IndexOutOfRange {
                index,
                n: (1 << n) - 1,
            });
        }
        let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(FullState { n, amplitudes })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn norm_sq(&self) -> f64 {
        norm_sq(&self.amplitudes)
    }
}

pub(crate) fn check_full_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(SesError::DimensionTooSmall { n, min: 1 });
    }
    if n > MAX_FULL_QUBITS {
        return Err(SesError::SystemTooLarge {
            n,
            max: MAX_FULL_QUBITS,
        });
    }
    Ok(())
}

/// Places `a_i` at full index `1 << (i - 1)`.
pub fn embed_ses_in_full(s: &SesState) -> Result<FullState> {
    let n = s.dim();
    check_full_size(n)?;
    let mut amplitudes = vec![C64::new(0.0, 0.0); 1 << n];
    for (k, a) in s.amplitudes().iter().enumerate() {
        amplitudes[1 << k] = *a;
    }
    Ok(FullState { n, amplitudes })
}

/// Projection onto the single-excitation subspace.
#[derive(Clone, Debug, PartialEq)]
pub struct Projection {
    /// Renormalized single-excitation component.
    pub state: SesState,
    /// Probability weight outside the subspace.
    pub leakage: f64,
}

/// Extracts the n single-excitation amplitudes and renormalizes them.
pub fn project_full_to_ses(f: &FullState) -> Result<Projection> {
    let amps: Vec<C64> = (0..f.n).map(|k| f.amplitudes[1 << k]).collect();
    let weight = norm_sq(&amps);
    if weight < 1e-15 {
        return Err(SesError::DegenerateProjection { weight });
    }
    let leakage = (1.0 - weight / f.norm_sq()).clamp(0.0, 1.0);
    Ok(Projection {
        state: SesState::normalized(amps)?,
        leakage,
    })
}

/// Pauli axis label.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    X = 0,
    Y = 1,
    Z = 2,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];
}

/// Real 3x3 tensor `J[mu][nu]` weighting `sigma^mu (x) sigma^nu` couplings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct CouplingTensor {
    j: [[f64; 3]; 3],
}

impl From<CouplingTensor> for [[f64; 3]; 3] {
    fn from(t: CouplingTensor) -> Self {
        t.j
    }
}

impl TryFrom<[[f64; 3]; 3]> for CouplingTensor {
    type Error = SesError;

    fn try_from(j: [[f64; 3]; 3]) -> Result<Self> {
        CouplingTensor::new(j)
    }
}

impl Default for CouplingTensor {
    fn default() -> Self {
        Self::xx()
    }
}

impl CouplingTensor {
    pub fn new(j: [[f64; 3]; 3]) -> Result<Self> {
        if j.iter().flatten().any(|x| !x.is_finite()) {
            return Err(SesError::NonFinite("coupling tensor"));
        }
        Ok(CouplingTensor { j })
    }

    /// Pure `sigma^x (x) sigma^x`.
    pub fn xx() -> Self {
        let mut j = [[0.0; 3]; 3];
        j[0][0] = 1.0;
        CouplingTensor { j }
    }

    pub fn get(&self, mu: Axis, nu: Axis) -> f64 {
        self.j[mu as usize][nu as usize]
    }

    pub fn as_array(&self) -> &[[f64; 3]; 3] {
        &self.j
    }
}
