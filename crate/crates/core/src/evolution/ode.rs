use crate::error::{Result, SesError};
use crate::evolution::Generator;
use crate::types::{check_dims, norm_sq, SesHamiltonian, SesState, C64};

/// Default largest phase advance per RK4 step, in radians.
pub const DEFAULT_THETA_MAX: f64 = 0.05;

pub(crate) fn check_theta(theta_max: f64) -> Result<()> {
    if !(theta_max > 0.0 && theta_max <= 0.5) {
        return Err(SesError::InvalidArgument(format!(
            "theta_max must lie in (0, 0.5], got {theta_max}"
        )));
    }
    Ok(())
}

/// Un-normalized integrator output.
#[derive(Clone, Debug, PartialEq)]
pub struct RawEvolution {
    pub amplitudes: Vec<C64>,
    pub steps: usize,
}

/// Fixed-step classical RK4 for `d/dt psi = -i H psi`.
///
/// The step count is `ceil(|t| / h)` with `h = theta_max / bound`, where
/// `bound` is the generator's spectral bound, so no eigencomponent advances
/// its phase by more than `theta_max` per step. The steps are then spread
/// uniformly to land exactly on `t`. The state is never renormalized.
pub fn rk4_integrate<G: Generator + ?Sized>(
    gen: &G,
    psi: &[C64],
    t: f64,
    theta_max: f64,
) -> Result<RawEvolution> {
    check_theta(theta_max)?;
    check_dims(gen.dim(), psi.len())?;
    if !t.is_finite() {
        return Err(SesError::NonFinite("evolution time"));
    }
    let bound = gen.spectral_bound();
    if !bound.is_finite() {
        return Err(SesError::NonFinite("hamiltonian"));
    }
    let mut y = psi.to_vec();
    if bound == 0.0 || t == 0.0 {
        return Ok(RawEvolution {
            amplitudes: y,
            steps: 0,
        });
    }
    let steps = (t.abs() * bound / theta_max).ceil() as usize;
    let h = t / steps as f64;

    let n = psi.len();
    let zero = C64::new(0.0, 0.0);
    let mut k1 = vec![zero; n];
    let mut k2 = vec![zero; n];
    let mut k3 = vec![zero; n];
    let mut k4 = vec![zero; n];
    let mut tmp = vec![zero; n];

    // f(x) = -i H x
    let deriv = |x: &[C64], out: &mut [C64]| {
        gen.apply(x, out);
        for o in out.iter_mut() {
            *o = C64::new(o.im, -o.re);
        }
    };

    for _ in 0..steps {
        deriv(&y, &mut k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * h);
        }
        deriv(&tmp, &mut k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * h);
        }
        deriv(&tmp, &mut k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * h;
        }
        deriv(&tmp, &mut k4);
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0);
        }
    }
    if y.iter().any(|a| !(a.re.is_finite() && a.im.is_finite())) {
        return Err(SesError::NonFinite("ode integration"));
    }
    Ok(RawEvolution {
        amplitudes: y,
        steps,
    })
}

/// RK4 propagation result: renormalized state plus diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct OdeEvolution {
    pub state: SesState,
    /// Integrator output before renormalization.
    pub raw: Vec<C64>,
    /// `|raw| - 1`.
    pub norm_drift: f64,
    pub steps: usize,
}

pub fn evolve_ode(
    h: &SesHamiltonian,
    psi: &SesState,
    t: f64,
    theta_max: f64,
) -> Result<OdeEvolution> {
    let out = rk4_integrate(h, psi.amplitudes(), t, theta_max)?;
    let norm_drift = norm_sq(&out.amplitudes).sqrt() - 1.0;
    Ok(OdeEvolution {
        state: SesState::normalized(out.amplitudes.clone())?,
        raw: out.amplitudes,
        norm_drift,
        steps: out.steps,
    })
}
