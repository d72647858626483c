//! Mapping between device parameters and SES Hamiltonians.
//!
//! Forward: the SES block of the hardware Hamiltonian is `eps_i delta_ii' + g_ii'`
//! (or its generalization for an arbitrary coupling tensor). Backward:
//! [`compile`] shifts and rescales a target Hamiltonian so that every matrix
//! element fits within the coupling bound, then realizes it on a device.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{CouplingCondition, Result, SesError};
use crate::types::{
    check_symmetric, units, Axis, CouplingTensor, DeviceParams, HardwareBounds, SesHamiltonian,
    SesState, C64, SYMMETRY_TOLERANCE,
};

/// `H_ii' = eps_i delta_ii' + g_ii'` for `sigma^x (x) sigma^x` coupling.
pub fn ses_matrix_elements(device: &DeviceParams) -> SesHamiltonian {
    let mut m = device.g().clone();
    for (i, e) in device.epsilon().iter().enumerate() {
        m[(i, i)] = *e;
    }
    SesHamiltonian::from_upper(m)
}

/// Whether the constant `(sum_{j<j'} g_jj') J_zz` diagonal term is kept.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ShiftTerm {
    /// Keep it, so the result is the exact SES block of the full Hamiltonian.
    #[default]
    Keep,
    /// Drop it as a global energy shift.
    Drop,
}

/// Checks `J_xx + J_yy != 0` and `J_xy == J_yx`.
pub fn check_coupling_conditions(j: &CouplingTensor) -> Result<()> {
    let scale = j
        .as_array()
        .iter()
        .flatten()
        .fold(0.0f64, |m, x| m.max(x.abs()))
        .max(f64::MIN_POSITIVE);
    let exchange = j.get(Axis::X, Axis::X) + j.get(Axis::Y, Axis::Y);
    if exchange.abs() <= SYMMETRY_TOLERANCE * scale {
        return Err(SesError::CouplingCondition(CouplingCondition::Exchange));
    }
    if (j.get(Axis::X, Axis::Y) - j.get(Axis::Y, Axis::X)).abs() > SYMMETRY_TOLERANCE * scale {
        return Err(SesError::CouplingCondition(CouplingCondition::Reality));
    }
    Ok(())
}

/// SES matrix elements for a general coupling tensor, keeping the constant
/// diagonal term.
pub fn ses_matrix_elements_general(
    device: &DeviceParams,
    j: &CouplingTensor,
) -> Result<SesHamiltonian> {
    ses_matrix_elements_general_with(device, j, ShiftTerm::Keep)
}

/// Diagonal `eps_i - 2 (sum_j g_ij) J_zz + (sum_{j<j'} g_jj') J_zz`,
/// off-diagonal `(J_xx + J_yy) g_ii'`.
pub fn ses_matrix_elements_general_with(
    device: &DeviceParams,
    j: &CouplingTensor,
    shift: ShiftTerm,
) -> Result<SesHamiltonian> {
    check_coupling_conditions(j)?;
    let n = device.n();
    let g = device.g();
    let jzz = j.get(Axis::Z, Axis::Z);
    let exchange = j.get(Axis::X, Axis::X) + j.get(Axis::Y, Axis::Y);
    let pair_sum: f64 = match shift {
        ShiftTerm::Keep => (0..n)
            .flat_map(|a| ((a + 1)..n).map(move |b| (a, b)))
            .map(|(a, b)| g[(a, b)])
            .sum(),
        ShiftTerm::Drop => 0.0,
    };
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        let row_sum: f64 = g.row(i).iter().sum();
        m[(i, i)] = device.epsilon()[i] - 2.0 * row_sum * jzz + pair_sum * jzz;
        for k in (i + 1)..n {
            m[(i, k)] = exchange * g[(i, k)];
        }
    }
    Ok(SesHamiltonian::from_upper(m))
}

/// Physical units of a target Hamiltonian's entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnitTag {
    /// Ordinary frequency in MHz (values quoted as E/2pi).
    #[serde(rename = "2pi-MHz")]
    TwoPiMhz,
    #[serde(rename = "rad-per-us")]
    RadPerUs,
    /// Problem units; lambda then carries units of (problem energy) / (rad/us).
    #[serde(rename = "dimensionless")]
    Dimensionless,
}

impl UnitTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            UnitTag::TwoPiMhz => "2pi-MHz",
            UnitTag::RadPerUs => "rad-per-us",
            UnitTag::Dimensionless => "dimensionless",
        }
    }

    /// Factor converting stored values to the compiler's working units.
    pub fn to_working_units(&self) -> f64 {
        match self {
            UnitTag::TwoPiMhz => units::mhz(1.0),
            UnitTag::RadPerUs | UnitTag::Dimensionless => 1.0,
        }
    }
}

impl std::str::FromStr for UnitTag {
    type Err = SesError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "2pi-MHz" => Ok(UnitTag::TwoPiMhz),
            "rad-per-us" => Ok(UnitTag::RadPerUs),
            "dimensionless" => Ok(UnitTag::Dimensionless),
            other => Err(SesError::InvalidArgument(format!(
                "unknown units tag {other:?} (expected 2pi-MHz, rad-per-us or dimensionless)"
            ))),
        }
    }
}

/// A real symmetric problem Hamiltonian to be compiled.
///
/// Entries tagged `2pi-MHz` are converted to rad/us on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetHamiltonian {
    hamiltonian: SesHamiltonian,
    unit: UnitTag,
}

impl TargetHamiltonian {
    pub fn new(matrix: DMatrix<f64>, unit: UnitTag) -> Result<Self> {
        check_symmetric(&matrix, SYMMETRY_TOLERANCE)?;
        let scaled = matrix * unit.to_working_units();
        Ok(TargetHamiltonian {
            hamiltonian: SesHamiltonian::new(scaled)?,
            unit,
        })
    }

    pub fn from_ses(hamiltonian: SesHamiltonian, unit: UnitTag) -> Self {
        TargetHamiltonian { hamiltonian, unit }
    }

    pub fn dim(&self) -> usize {
        self.hamiltonian.dim()
    }

    pub fn unit(&self) -> UnitTag {
        self.unit
    }

    /// Entries in working units.
    pub fn hamiltonian(&self) -> &SesHamiltonian {
        &self.hamiltonian
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompileOptions {
    /// Grow lambda until the diagonal detunings fit the frequency range,
    /// instead of failing.
    pub auto_relax: bool,
}

/// A target Hamiltonian realized on a device.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompiledProgram {
    pub device: DeviceParams,
    pub lambda: f64,
    pub shift: f64,
    pub t_sim: f64,
    /// `lambda * t_sim`, us.
    pub t_qc: f64,
    pub t_meas: f64,
    /// `t_qc + t_meas`, us.
    pub t_qu: f64,
    /// Whether lambda was enlarged beyond the coupling-bound minimum.
    pub relaxed: bool,
    /// `(H - shift I) / lambda`, the rotating-frame generator run for `t_qc`.
    pub hamiltonian_qc: SesHamiltonian,
}

impl CompiledProgram {
    /// SES Hamiltonian realized by the device in the lab frame
    /// (`hamiltonian_qc` plus the frequency-range center on the diagonal).
    pub fn device_hamiltonian(&self) -> SesHamiltonian {
        ses_matrix_elements(&self.device)
    }

    pub fn dim(&self) -> usize {
        self.device.n()
    }
}

/// Shifts and rescales `h` onto the device with the smallest lambda.
///
/// `shift` is the midpoint of the diagonal range. Diagonal entries are
/// realized as detunings about the center of the frequency range.
pub fn compile(
    h: &TargetHamiltonian,
    bounds: &HardwareBounds,
    t_sim: f64,
    t_meas: f64,
    options: CompileOptions,
) -> Result<CompiledProgram> {
    if !(t_sim.is_finite() && t_sim >= 0.0) {
        return Err(SesError::InvalidArgument(format!(
            "t_sim must be finite and non-negative, got {t_sim}"
        )));
    }
    if !(t_meas.is_finite() && t_meas >= 0.0) {
        return Err(SesError::InvalidArgument(format!(
            "t_meas must be finite and non-negative, got {t_meas}"
        )));
    }
    let m = h.hamiltonian().matrix();
    let n = m.nrows();
    let diag: Vec<f64> = (0..n).map(|i| m[(i, i)]).collect();
    let dmax_val = diag.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let dmin_val = diag.iter().cloned().fold(f64::INFINITY, f64::min);
    let shift = 0.5 * (dmax_val + dmin_val);

    let mut off = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            off = off.max(m[(i, j)].abs());
        }
    }
    let (detune_qubit, detune) = diag
        .iter()
        .map(|d| (d - shift).abs())
        .enumerate()
        .fold((0, 0.0f64), |best, (i, d)| if d > best.1 { (i, d) } else { best });
    let largest = off.max(detune);
    let mut lambda = if largest == 0.0 {
        1.0
    } else {
        largest / bounds.g_max
    };

    let half_width = bounds.epsilon_half_width();
    let required = detune / lambda;
    let mut relaxed = false;
    if required > half_width * (1.0 + SYMMETRY_TOLERANCE) {
        if options.auto_relax && half_width > 0.0 {
            lambda = detune / half_width;
            relaxed = true;
        } else {
            return Err(SesError::Infeasible {
                qubit: detune_qubit + 1,
                required,
                available: half_width,
            });
        }
    }

    let scaled = DMatrix::from_fn(n, n, |i, j| {
        let v = if i == j { m[(i, j)] - shift } else { m[(i, j)] };
        v / lambda
    });
    let center = bounds.epsilon_center();
    let epsilon: Vec<f64> = (0..n).map(|i| center + scaled[(i, i)]).collect();
    let mut g = scaled.clone();
    g.fill_diagonal(0.0);
    let device = DeviceParams::new(epsilon, g, *bounds)?;

    let t_qc = lambda * t_sim;
    Ok(CompiledProgram {
        device,
        lambda,
        shift,
        t_sim,
        t_qc,
        t_meas,
        t_qu: t_qc + t_meas,
        relaxed,
        hamiltonian_qc: SesHamiltonian::from_upper(scaled),
    })
}

/// Global phases relating compiled runs to the target evolution:
/// `exp(-i H t_sim) psi = rotating * exp(-i H_qc t_qc) psi
///                     = device * exp(-i H_device t_qc) psi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionPhase {
    /// `exp(-i shift t_sim)`, for runs under `hamiltonian_qc`.
    pub rotating: C64,
    /// Additionally undoes the frequency-range center offset, for runs under
    /// the lab-frame device Hamiltonian.
    pub device: C64,
}

impl EvolutionPhase {
    /// Applies the rotating-frame phase to a state evolved under `hamiltonian_qc`.
    pub fn restore(&self, evolved_qc: &SesState) -> SesState {
        evolved_qc.with_global_phase(self.rotating)
    }

    pub fn restore_device(&self, evolved_device: &SesState) -> SesState {
        evolved_device.with_global_phase(self.device)
    }
}

pub fn decompile_evolution(p: &CompiledProgram) -> EvolutionPhase {
    let rotating = C64::from_polar(1.0, -p.shift * p.t_sim);
    let center = p.device.bounds().epsilon_center();
    EvolutionPhase {
        rotating,
        device: rotating * C64::from_polar(1.0, center * p.t_qc),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::evolve_exact;
    use crate::random::random_hamiltonian;
    use crate::types::{fidelity, uniform_state};

    fn rows(n: usize, v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(n, n, v)
    }

    #[test]
    fn sigma_x_elements() {
        let b = HardwareBounds::default();
        let e = units::mhz(5000.0);
        let gv = units::mhz(50.0);
        let d = DeviceParams::new(vec![e, e], rows(2, &[0.0, gv, gv, 0.0]), b).unwrap();
        let h = ses_matrix_elements(&d);
        assert_eq!(h.matrix(), &rows(2, &[e, gv, gv, e]));

        let d = DeviceParams::new(vec![e, e + 1.0], DMatrix::zeros(2, 2), b).unwrap();
        assert!(ses_matrix_elements(&d).is_diagonal());
    }

    #[test]
    fn uniform_coupling_gives_grover_generator() {
        let b = HardwareBounds::default();
        let n = 5;
        let e = b.epsilon_center();
        let mut g = DMatrix::from_element(n, n, b.g_max);
        g.fill_diagonal(0.0);
        let h = ses_matrix_elements(&DeviceParams::new(vec![e; n], g, b).unwrap());
        let expected =
            DMatrix::from_fn(n, n, |i, j| if i == j { e } else { b.g_max });
        assert_eq!(h.matrix(), &expected);
    }

    #[test]
    fn exchange_tensor_doubles_couplings() {
        let b = HardwareBounds::default();
        let e = b.epsilon_center();
        let mut g = DMatrix::zeros(3, 3);
        g[(0, 1)] = 10.0;
        g[(1, 0)] = 10.0;
        g[(1, 2)] = -20.0;
        g[(2, 1)] = -20.0;
        let d = DeviceParams::new(vec![e, e + 1.0, e + 2.0], g, b).unwrap();
        let j = CouplingTensor::new([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        let general = ses_matrix_elements_general(&d, &j).unwrap();
        let base = ses_matrix_elements(&d);
        for i in 0..3 {
            assert_eq!(general.matrix()[(i, i)], base.matrix()[(i, i)]);
            for k in 0..3 {
                if i != k {
                    assert_eq!(general.matrix()[(i, k)], 2.0 * base.matrix()[(i, k)]);
                }
            }
        }
    }

    #[test]
    fn coupling_conditions() {
        let b = HardwareBounds::default();
        let d = DeviceParams::new(vec![b.epsilon_center(); 2], DMatrix::zeros(2, 2), b).unwrap();
        let antisym =
            CouplingTensor::new([[1.0, 0.5, 0.0], [-0.5, 1.0, 0.0], [0.0, 0.0, 0.0]]).unwrap();
        assert_eq!(
            ses_matrix_elements_general(&d, &antisym),
            Err(SesError::CouplingCondition(CouplingCondition::Reality))
        );
        let ising =
            CouplingTensor::new([[0.0, 0.0, 0.0], [0.0, 0.0, 0.0], [0.0, 0.0, 1.0]]).unwrap();
        assert_eq!(
            ses_matrix_elements_general(&d, &ising),
            Err(SesError::CouplingCondition(CouplingCondition::Exchange))
        );
    }

    #[test]
    fn dropped_shift_differs_by_constant() {
        let b = HardwareBounds::new(10.0, (0.0, 100.0)).unwrap();
        let g = rows(3, &[0.0, 1.0, 2.0, 1.0, 0.0, 3.0, 2.0, 3.0, 0.0]);
        let d = DeviceParams::new(vec![50.0, 51.0, 52.0], g, b).unwrap();
        let j = CouplingTensor::new([[1.0, 0.2, 0.0], [0.2, 0.5, 0.0], [0.0, 0.0, 0.7]]).unwrap();
        let keep = ses_matrix_elements_general_with(&d, &j, ShiftTerm::Keep).unwrap();
        let drop = ses_matrix_elements_general_with(&d, &j, ShiftTerm::Drop).unwrap();
        let diff = keep.matrix() - drop.matrix();
        for i in 0..3 {
            assert!((diff[(i, i)] - 6.0 * 0.7).abs() < 1e-12);
        }
    }

    #[test]
    fn compile_off_diagonal_binds() {
        let h = TargetHamiltonian::new(rows(2, &[0.0, 250.0, 250.0, 0.0]), UnitTag::TwoPiMhz)
            .unwrap();
        let p = compile(&h, &HardwareBounds::default(), 2.0, 0.1, CompileOptions::default())
            .unwrap();
        assert_eq!(p.shift, 0.0);
        assert!((p.lambda - 2.5).abs() < 1e-12);
        assert_eq!(p.t_qc, p.lambda * 2.0);
        assert!((p.t_qu - (p.t_qc + 0.1)).abs() < 1e-15);
        assert!((p.device.g()[(0, 1)] - units::mhz(100.0)).abs() < 1e-9);
    }

    #[test]
    fn compile_multiple_of_identity() {
        for c in [-3.0, 0.0, 17.5] {
            let h = TargetHamiltonian::new(DMatrix::identity(3, 3) * c, UnitTag::RadPerUs)
                .unwrap();
            let b = HardwareBounds::default();
            let p = compile(&h, &b, 1.0, 0.0, CompileOptions::default()).unwrap();
            assert_eq!(p.shift, c);
            assert_eq!(p.lambda, 1.0);
            assert_eq!(p.device.g().amax(), 0.0);
            assert!(p.device.epsilon().iter().all(|&e| e == b.epsilon_center()));
        }
    }

    #[test]
    fn compile_grover_generator_at_full_strength() {
        let b = HardwareBounds::default();
        let n = 4;
        let mut m = DMatrix::from_element(n, n, b.g_max);
        m.fill_diagonal(0.0);
        let h = TargetHamiltonian::new(m, UnitTag::RadPerUs).unwrap();
        let p = compile(&h, &b, 1.0, 0.0, CompileOptions::default()).unwrap();
        assert_eq!(p.lambda, 1.0);
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    assert!((p.device.g()[(i, j)] - b.g_max).abs() <= 1e-12 * b.g_max);
                    assert!(p.device.g()[(i, j)].abs() <= b.g_max);
                }
            }
        }
    }

    #[test]
    fn infeasible_detuning_and_relaxation() {
        // narrow frequency range: diagonal detuning cannot fit
        let b = HardwareBounds::new(10.0, (100.0, 104.0)).unwrap();
        let h = TargetHamiltonian::new(rows(2, &[-10.0, 1.0, 1.0, 10.0]), UnitTag::RadPerUs)
            .unwrap();
        let err = compile(&h, &b, 1.0, 0.0, CompileOptions::default()).unwrap_err();
        assert!(matches!(err, SesError::Infeasible { .. }));
        let p = compile(&h, &b, 1.0, 0.0, CompileOptions { auto_relax: true }).unwrap();
        assert!(p.relaxed);
        assert!((p.lambda - 5.0).abs() < 1e-12);
        assert!((p.device.epsilon()[1] - 104.0).abs() < 1e-12);
    }

    #[test]
    fn compile_rejects_bad_input() {
        assert!(matches!(
            TargetHamiltonian::new(rows(2, &[0.0, 1.0, 2.0, 0.0]), UnitTag::RadPerUs),
            Err(SesError::Asymmetric { .. })
        ));
        let h = TargetHamiltonian::new(DMatrix::identity(2, 2), UnitTag::RadPerUs).unwrap();
        let b = HardwareBounds::default();
        assert!(compile(&h, &b, -1.0, 0.0, CompileOptions::default()).is_err());
    }

    #[test]
    fn phase_restoration() {
        let h = TargetHamiltonian::new(DMatrix::identity(3, 3) * 4.0, UnitTag::RadPerUs).unwrap();
        let p = compile(&h, &HardwareBounds::default(), 0.7, 0.0, CompileOptions::default())
            .unwrap();
        let psi = uniform_state(3).unwrap();
        // device evolution is trivial, all dynamics is the global phase
        let evolved = evolve_exact(&p.hamiltonian_qc, &psi, p.t_qc).unwrap();
        assert_eq!(evolved, psi);
        let restored = decompile_evolution(&p).restore(&evolved);
        let expected = C64::from_polar(1.0, -4.0 * 0.7);
        for a in restored.amplitudes() {
            assert!((a - expected / 3f64.sqrt()).norm() < 1e-15);
        }

        let zero = TargetHamiltonian::new(rows(2, &[0.0, 1.0, 1.0, 0.0]), UnitTag::RadPerUs)
            .unwrap();
        let p = compile(&zero, &HardwareBounds::default(), 1.0, 0.0, CompileOptions::default())
            .unwrap();
        assert_eq!(decompile_evolution(&p).rotating, C64::new(1.0, 0.0));
    }

    #[test]
    fn compiled_evolution_matches_target() {
        let h = random_hamiltonian(8, 3.0, 42);
        let target = TargetHamiltonian::from_ses(h.clone(), UnitTag::Dimensionless);
        let p = compile(&target, &HardwareBounds::default(), 1.9, 0.1, CompileOptions::default())
            .unwrap();
        let psi = uniform_state(8).unwrap();
        let direct = evolve_exact(&h, &psi, 1.9).unwrap();
        let phase = decompile_evolution(&p);
        let via_qc = phase.restore(&evolve_exact(&p.hamiltonian_qc, &psi, p.t_qc).unwrap());
        let via_device =
            phase.restore_device(&evolve_exact(&p.device_hamiltonian(), &psi, p.t_qc).unwrap());
        for (a, b) in direct.amplitudes().iter().zip(via_qc.amplitudes()) {
            assert!((a - b).norm() < 1e-10);
        }
        assert!(fidelity(&direct, &via_device).unwrap() > 1.0 - 1e-10);
    }

    #[test]
    fn unit_tag_round_trip() {
        for tag in [UnitTag::TwoPiMhz, UnitTag::RadPerUs, UnitTag::Dimensionless] {
            assert_eq!(tag.as_str().parse::<UnitTag>().unwrap(), tag);
        }
        assert!("MHz".parse::<UnitTag>().is_err());
    }
}
