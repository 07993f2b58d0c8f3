//! Time evolution: Schroedinger for pure states, Lindblad for density
//! matrices, and steady states by long-time marching.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::basis::{same_basis, symmetrize_in_place, DensityMatrix, StateVector, SymBasis};
use crate::error::{Error, Result};
use crate::ode::{integrate, integrate_with_post, OdeOptions, StepStats};
use crate::operators::CollectiveOperator;
use crate::sparse::SpMat;

/// The generator of open-system dynamics: a Hamiltonian (possibly absent) and
/// jump operators with their rate prefactors already absorbed.
pub struct LindbladGenerator {
    basis: Arc<SymBasis>,
    hamiltonian: Option<CollectiveOperator>,
    jumps: Vec<CollectiveOperator>,
    jump_adjoints: Vec<SpMat>,
    /// `(1/2) sum_k L_k^dagger L_k`.
    half_damping: SpMat,
}

impl LindbladGenerator {
    pub fn new(
        hamiltonian: Option<CollectiveOperator>,
        jumps: Vec<CollectiveOperator>,
    ) -> Result<Self> {
        let basis = hamiltonian
            .as_ref()
            .map(|h| h.basis().clone())
            .or_else(|| jumps.first().map(|j| j.basis().clone()))
            .ok_or_else(|| Error::InvalidParameter("generator needs an operator".into()))?;
        if let Some(h) = &hamiltonian {
            let res = h.matrix().hermiticity_residual();
            if res > 1e-12 {
                return Err(Error::NotHermitian { residual: res });
            }
        }
        for j in &jumps {
            if !same_basis(j.basis(), &basis) {
                return Err(Error::BasisMismatch);
            }
        }
        if let Some(h) = &hamiltonian {
            if !same_basis(h.basis(), &basis) {
                return Err(Error::BasisMismatch);
            }
        }
        let jump_adjoints: Vec<SpMat> = jumps.iter().map(|j| j.matrix().adjoint()).collect();
        let mut half_damping = SpMat::zeros(basis.len());
        for (j, adj) in jumps.iter().zip(&jump_adjoints) {
            let ldl = adj.matmul(j.matrix())?;
            half_damping = half_damping.add(&ldl)?;
        }
        half_damping = half_damping.scaled(C64::new(0.5, 0.0)).hermitized();
        Ok(LindbladGenerator { basis, hamiltonian, jumps, jump_adjoints, half_damping })
    }

    pub fn basis(&self) -> &Arc<SymBasis> {
        &self.basis
    }

    pub fn hamiltonian(&self) -> Option<&CollectiveOperator> {
        self.hamiltonian.as_ref()
    }

    pub fn jumps(&self) -> &[CollectiveOperator] {
        &self.jumps
    }

    /// `out = -i [H, rho] + sum_k (L_k rho L_k^dagger - {L_k^dagger L_k, rho}/2)`
    /// on column-major data; `scratch` must be another `dim^2` buffer.
    pub fn apply(&self, rho: &[C64], out: &mut [C64], scratch: &mut [C64]) {
        let one = C64::new(1.0, 0.0);
        out.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
        if let Some(h) = &self.hamiltonian {
            h.matrix().acc_a_rho(rho, C64::new(0.0, -1.0), out);
            h.matrix().acc_rho_a(rho, C64::new(0.0, 1.0), out);
        }
        for (jump, adj) in self.jumps.iter().zip(&self.jump_adjoints) {
            scratch.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
            jump.matrix().acc_a_rho(rho, one, scratch);
            adj.acc_rho_a(scratch, one, out);
        }
        let minus = C64::new(-1.0, 0.0);
        self.half_damping.acc_a_rho(rho, minus, out);
        self.half_damping.acc_rho_a(rho, minus, out);
    }

    /// Max-entry norm of the generator applied to `rho`.
    pub fn residual(&self, rho: &DensityMatrix) -> f64 {
        let d = self.basis.len();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        let mut scratch = vec![C64::new(0.0, 0.0); d * d];
        self.apply(rho.data(), &mut out, &mut scratch);
        out.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

/// A sampled evolution.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub stats: StepStats,
}

/// Integrate `i d psi/dt = H psi` and sample at the given times; the state is
/// `psi0` at `times[0]`. Norm drift beyond `1e-8` at a sample is an error.
pub fn evolve_schrodinger(
    h: &CollectiveOperator,
    psi0: &StateVector,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory<StateVector>> {
    if !same_basis(h.basis(), psi0.basis()) {
        return Err(Error::BasisMismatch);
    }
    let res = h.matrix().hermiticity_residual();
    if res > 1e-12 {
        return Err(Error::NotHermitian { residual: res });
    }
    let basis = psi0.basis().clone();
    let mut states = Vec::with_capacity(times.len());
    let mat = h.matrix();
    let stats = integrate(
        |_t, y, dy| {
            mat.apply(y, dy);
            for v in dy.iter_mut() {
                *v = C64::new(v.im, -v.re); // multiply by -i
            }
        },
        psi0.amps().to_vec(),
        times,
        opts,
        |_, _, y| {
            let norm = y.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            if (norm - 1.0).abs() > 1e-8 {
                return Err(Error::NormDeficit((norm - 1.0).abs()));
            }
            states.push(StateVector::new_unchecked(basis.clone(), y.to_vec()));
            Ok(true)
        },
    )?;
    Ok(Trajectory { times: times.to_vec(), states, stats })
}

/// Integrate the master equation and sample at the given times. The state is
/// re-Hermitized after every accepted step; trace drift beyond `1e-8` at a
/// sample is an error.
pub fn evolve_lindblad(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    times: &[f64],
    opts: &OdeOptions,
) -> Result<Trajectory<DensityMatrix>> {
    if !same_basis(&gen.basis, rho0.basis()) {
        return Err(Error::BasisMismatch);
    }
    let basis = rho0.basis().clone();
    let d = basis.len();
    let mut scratch = vec![C64::new(0.0, 0.0); d * d];
    let mut states = Vec::with_capacity(times.len());
    let stats = integrate_with_post(
        |_t, y, dy| gen.apply(y, dy, &mut scratch),
        rho0.data().to_vec(),
        times,
        opts,
        |y| symmetrize_in_place(y, d),
        |_, _, y| {
            let trace: C64 = (0..d).map(|i| y[i * d + i]).sum();
            if (trace.re - 1.0).abs() > 1e-8 {
                return Err(Error::TraceDeficit((trace.re - 1.0).abs()));
            }
            states.push(DensityMatrix::new_unchecked(basis.clone(), y.to_vec()));
            Ok(true)
        },
    )?;
    Ok(Trajectory { times: times.to_vec(), states, stats })
}

#[derive(Clone, Copy, Debug)]
pub struct SteadyStateOptions {
    /// Convergence threshold on the max-entry norm of `L(rho)`.
    pub residual_tol: f64,
    /// First checkpoint time; later checkpoints double until `max_time`.
    pub checkpoint: f64,
    pub max_time: f64,
    pub ode: OdeOptions,
}

impl SteadyStateOptions {
    /// Checkpoints at `5 / min(rate)` doubling out to a `200 / min(rate)`
    /// horizon.
    pub fn for_rates(rates: &[f64], ode: OdeOptions) -> Result<Self> {
        let min_rate = rates
            .iter()
            .copied()
            .filter(|r| *r > 0.0)
            .fold(f64::INFINITY, f64::min);
        if !min_rate.is_finite() {
            return Err(Error::InvalidParameter("no positive rate in generator".into()));
        }
        Ok(SteadyStateOptions {
            residual_tol: 1e-9,
            checkpoint: 5.0 / min_rate,
            max_time: 200.0 / min_rate,
            ode,
        })
    }
}

#[derive(Clone, Debug)]
pub struct SteadyState {
    pub rho: DensityMatrix,
    pub residual: f64,
    /// Time at which the residual test passed.
    pub time: f64,
}

/// March the master equation to its fixed point, checking the residual at
/// doubling checkpoints.
///
/// Accumulated integration noise puts a floor under the reachable residual
/// (roughly proportional to the tolerance), so whenever the residual comes
/// within sight of that floor without meeting the target, the integrator
/// tolerances are tightened and the march continues from the current state.
pub fn steady_state(
    gen: &LindbladGenerator,
    rho0: &DensityMatrix,
    opts: &SteadyStateOptions,
) -> Result<SteadyState> {
    if !same_basis(&gen.basis, rho0.basis()) {
        return Err(Error::BasisMismatch);
    }
    let basis = rho0.basis().clone();
    let d = basis.len();

    let mut scratch = vec![C64::new(0.0, 0.0); d * d];
    let mut resid_buf = vec![C64::new(0.0, 0.0); d * d];
    let mut resid_scratch = vec![C64::new(0.0, 0.0); d * d];
    let mut y = rho0.data().to_vec();
    let mut t = 0.0f64;
    let mut next = opts.checkpoint.min(opts.max_time);
    let mut ode = opts.ode;
    let mut residual;
    loop {
        gen.apply(&y, &mut resid_buf, &mut resid_scratch);
        residual = resid_buf.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if residual <= opts.residual_tol {
            return Ok(SteadyState {
                rho: DensityMatrix::new_unchecked(basis, y),
                residual,
                time: t,
            });
        }
        if t >= opts.max_time {
            return Err(Error::NonConvergence { residual, time: t });
        }
        if residual <= 1e4 * ode.atol && ode.atol > 1e-14 {
            ode.atol = (ode.atol / 100.0).max(1e-14);
            ode.rtol = (ode.rtol / 100.0).max(1e-14);
        }
        let target = next.min(opts.max_time);
        integrate_with_post(
            |_t, z, dz| gen.apply(z, dz, &mut scratch),
            std::mem::take(&mut y),
            &[t, target],
            &ode,
            |z| symmetrize_in_place(z, d),
            |_, _, z| {
                let trace: C64 = (0..d).map(|k| z[k * d + k]).sum();
                if (trace.re - 1.0).abs() > 1e-8 {
                    return Err(Error::TraceDeficit((trace.re - 1.0).abs()));
                }
                y = z.to_vec();
                Ok(true)
            },
        )?;
        t = target;
        next *= 2.0;
    }
}
