//! The four example systems: constructors for their Hamiltonians, generators,
//! initial states, and the closed-form entropy of the driven ensemble.
//!
//! All rates are angular frequencies with `hbar = 1`; results depend only on
//! the dimensionless combinations (`Omega t`, `chi t`, `Gamma_c t`,
//! `W / Gamma_c`).

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::basis::{StateVector, SymBasis};
use crate::dynamics::LindbladGenerator;
use crate::error::{Error, Result};
use crate::operators::{collective_generator, CollectiveOperator, Slot};
use crate::sparse::SpMat;

/// Model rates; each model reads the subset it needs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    pub n: u32,
    /// Drive detuning.
    pub delta: f64,
    /// Rabi rate of the drive.
    pub omega: f64,
    /// Twisting rate.
    pub chi: f64,
    /// Collective decay rate.
    pub gamma_c: f64,
    /// Collective repump rate.
    pub w: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams { n: 8, delta: 0.0, omega: 1.0, chi: 1.0, gamma_c: 1.0, w: 1.0 }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::InvalidParameter("N must be at least 1".into()));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("omega", self.omega),
            ("chi", self.chi),
            ("gamma_c", self.gamma_c),
            ("w", self.w),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite")));
            }
        }
        if self.gamma_c < 0.0 {
            return Err(Error::InvalidParameter("gamma_c must be non-negative".into()));
        }
        if self.w < 0.0 {
            return Err(Error::InvalidParameter("w must be non-negative".into()));
        }
        Ok(())
    }
}

fn check_basis(basis: &Arc<SymBasis>, params: &ModelParams) -> Result<()> {
    params.validate()?;
    if basis.n() != params.n {
        return Err(Error::BasisMismatch);
    }
    Ok(())
}

/// Driven non-interacting ensemble: `(delta/2) G_zI + (omega/2) G_xx`.
pub fn h_illustrative(basis: &Arc<SymBasis>, params: &ModelParams) -> Result<CollectiveOperator> {
    check_basis(basis, params)?;
    let gzi = collective_generator(basis, Slot::Z, Slot::I);
    let gxx = collective_generator(basis, Slot::X, Slot::X);
    let h = crate::operators::compose_sum(&[
        (C64::new(params.delta / 2.0, 0.0), &gzi),
        (C64::new(params.omega / 2.0, 0.0), &gxx),
    ])?;
    Ok(h.hermitized())
}

/// Closed-form entropy of the resonantly driven ensemble,
/// `-N (c ln c + s ln s)` with `c = cos^2(omega t / 2)`.
pub fn analytic_entropy_ie(params: &ModelParams, t: f64) -> Result<f64> {
    params.validate()?;
    if params.delta != 0.0 {
        return Err(Error::InvalidParameter(
            "closed form only valid on resonance (delta = 0)".into(),
        ));
    }
    let c = (params.omega * t / 2.0).cos().powi(2);
    let s = 1.0 - c;
    let xlnx = |x: f64| if x > 0.0 { x * x.ln() } else { 0.0 };
    Ok(-(params.n as f64) * (xlnx(c) + xlnx(s)))
}

/// Shared kernel `G_(+)x G_(-)x`; both the twisting Hamiltonian and the
/// strong-symmetry operator are built from the identical matrix.
fn twisting_kernel(basis: &Arc<SymBasis>) -> SpMat {
    let gp = collective_generator(basis, Slot::Plus, Slot::X);
    let gm = collective_generator(basis, Slot::Minus, Slot::X);
    gp.matrix().matmul(gm.matrix()).expect("same dim")
}

/// Twisting model `chi G_(+)x G_(-)x`.
pub fn h_boat(basis: &Arc<SymBasis>, params: &ModelParams) -> Result<CollectiveOperator> {
    check_basis(basis, params)?;
    let kernel = twisting_kernel(basis).scaled(C64::new(params.chi, 0.0));
    CollectiveOperator::from_matrix(basis.clone(), kernel.hermitized())
}

/// Twisting model with collective cavity decay `sqrt(gamma_c) G_(-)x`.
pub fn leaky_boat(basis: &Arc<SymBasis>, params: &ModelParams) -> Result<LindbladGenerator> {
    check_basis(basis, params)?;
    let h = h_boat(basis, params)?;
    let jump = collective_generator(basis, Slot::Minus, Slot::X)
        .scaled(C64::new(params.gamma_c.sqrt(), 0.0));
    LindbladGenerator::new(Some(h), vec![jump])
}

/// Purely dissipative spin-momentum superradiance: collective decay
/// `sqrt(gamma_c) G_(-)x` against collective repumping `sqrt(w) G_(+)I`, with
/// no Hamiltonian.
pub fn sms(basis: &Arc<SymBasis>, params: &ModelParams) -> Result<LindbladGenerator> {
    check_basis(basis, params)?;
    let decay = collective_generator(basis, Slot::Minus, Slot::X)
        .scaled(C64::new(params.gamma_c.sqrt(), 0.0));
    let repump =
        collective_generator(basis, Slot::Plus, Slot::I).scaled(C64::new(params.w.sqrt(), 0.0));
    LindbladGenerator::new(None, vec![decay, repump])
}

/// Conserved charge of the leaky twisting model: the Casimir of the su(2)
/// algebra spanned by `{G_zI / 2, G_(+)x, G_(-)x}`,
/// `G_(+)x G_(-)x + G_zI^2 / 4 - G_zI / 2`.
pub fn e_squared(basis: &Arc<SymBasis>) -> CollectiveOperator {
    let kernel = twisting_kernel(basis);
    let diag: Vec<C64> = basis
        .states()
        .iter()
        .map(|occ| {
            let m = occ.mj_doubled() as f64; // eigenvalue of G_zI
            C64::new(m * m / 4.0 - m / 2.0, 0.0)
        })
        .collect();
    let mat = kernel.add(&SpMat::from_diagonal(&diag)).expect("same dim");
    CollectiveOperator::from_matrix(basis.clone(), mat).expect("square")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InitialStateKind {
    /// Every particle in the ground state with the second dof down.
    GroundDown,
    /// Every particle in `(|ground> + |excited>)/sqrt(2)` with the second dof
    /// down.
    SuperpositionDown,
}

/// Symmetrized N-fold product of one single-particle state, given by its four
/// mode amplitudes (excited-up, excited-down, ground-up, ground-down).
pub fn product_state(basis: &Arc<SymBasis>, single: [C64; 4]) -> Result<StateVector> {
    let norm: f64 = single.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::NormDeficit((norm - 1.0).abs()));
    }
    let n = basis.n();
    let ln_fact = |m: u32| -> f64 { (2..=m as u64).map(|x| (x as f64).ln()).sum() };
    let ln_n_fact = ln_fact(n);
    let amps: Vec<C64> = basis
        .states()
        .iter()
        .map(|occ| {
            let ln_multinomial =
                ln_n_fact - occ.0.iter().map(|&m| ln_fact(m)).sum::<f64>();
            let mut amp = C64::new((0.5 * ln_multinomial).exp(), 0.0);
            for (a, &m) in single.iter().zip(&occ.0) {
                if m > 0 {
                    amp *= a.powu(m);
                }
            }
            amp
        })
        .collect();
    StateVector::new(basis.clone(), amps)
}

pub fn initial_state(basis: &Arc<SymBasis>, kind: InitialStateKind) -> Result<StateVector> {
    let zero = C64::new(0.0, 0.0);
    match kind {
        InitialStateKind::GroundDown => {
            product_state(basis, [zero, zero, zero, C64::new(1.0, 0.0)])
        }
        InitialStateKind::SuperpositionDown => {
            let inv = C64::new(1.0 / 2f64.sqrt(), 0.0);
            product_state(basis, [zero, inv, zero, inv])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Occupation;
    use crate::sparse::commutator_residual;

    #[test]
    fn illustrative_matches_term_by_term() {
        let params = ModelParams { n: 3, delta: 0.4, omega: 1.7, ..ModelParams::default() };
        let basis = SymBasis::new(3);
        let h = h_illustrative(&basis, &params).unwrap();
        let gzi = collective_generator(&basis, Slot::Z, Slot::I);
        let gxx = collective_generator(&basis, Slot::X, Slot::X);
        for (i, j, v) in h.matrix().iter() {
            let expect =
                gzi.matrix().entry(i, j) * (params.delta / 2.0) + gxx.matrix().entry(i, j) * (params.omega / 2.0);
            assert!((v - expect).norm() < 1e-14);
        }
    }

    #[test]
    fn illustrative_on_resonance_is_pure_gxx() {
        let params = ModelParams { n: 2, delta: 0.0, omega: 2.0, ..ModelParams::default() };
        let basis = SymBasis::new(2);
        let h = h_illustrative(&basis, &params).unwrap();
        let gxx = collective_generator(&basis, Slot::X, Slot::X);
        let diff = h.matrix().sub(gxx.matrix()).unwrap();
        assert!(diff.max_abs() < 1e-14);
    }

    #[test]
    fn single_particle_spectrum() {
        let params = ModelParams { n: 1, delta: 0.9, omega: 1.2, ..ModelParams::default() };
        let basis = SymBasis::new(1);
        let h = h_illustrative(&basis, &params).unwrap();
        let dense = nalgebra::DMatrix::from_column_slice(4, 4, &h.matrix().to_dense());
        let mut eigs: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let big = (params.delta * params.delta + params.omega * params.omega).sqrt() / 2.0;
        assert!((eigs[0] + big).abs() < 1e-12);
        assert!((eigs[1] + big).abs() < 1e-12);
        assert!((eigs[2] - big).abs() < 1e-12);
        assert!((eigs[3] - big).abs() < 1e-12);
    }

    #[test]
    fn analytic_entropy_values() {
        let params = ModelParams { n: 5, delta: 0.0, omega: 1.0, ..ModelParams::default() };
        assert_eq!(analytic_entropy_ie(&params, 0.0).unwrap(), 0.0);
        let peak = analytic_entropy_ie(&params, std::f64::consts::PI / 2.0).unwrap();
        assert!((peak - 5.0 * 2f64.ln()).abs() < 1e-12);
        let t = std::f64::consts::PI / 4.0;
        let c = (t / 2.0).cos().powi(2);
        let s = 1.0 - c;
        let expect = -5.0 * (c * c.ln() + s * s.ln());
        assert!((analytic_entropy_ie(&params, t).unwrap() - expect).abs() < 1e-12);
        let detuned = ModelParams { delta: 0.1, ..params };
        assert!(analytic_entropy_ie(&detuned, 1.0).is_err());
    }

    #[test]
    fn boat_is_hermitian_and_scales_with_chi() {
        let basis = SymBasis::new(4);
        let params = ModelParams { n: 4, chi: 0.0, ..ModelParams::default() };
        assert_eq!(h_boat(&basis, &params).unwrap().matrix().nnz(), 0);
        let params = ModelParams { n: 4, chi: 1.3, ..ModelParams::default() };
        let h = h_boat(&basis, &params).unwrap();
        assert_eq!(h.matrix().hermiticity_residual(), 0.0);
    }

    #[test]
    fn strong_symmetry_commutators_vanish() {
        let basis = SymBasis::new(4);
        let params = ModelParams { n: 4, chi: 1.0, gamma_c: 0.7, ..ModelParams::default() };
        let h = h_boat(&basis, &params).unwrap();
        let e2 = e_squared(&basis);
        let jump = collective_generator(&basis, Slot::Minus, Slot::X)
            .scaled(C64::new(params.gamma_c.sqrt(), 0.0));
        assert!(commutator_residual(e2.matrix(), h.matrix()).unwrap() < 1e-12);
        assert!(commutator_residual(e2.matrix(), jump.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn sms_moves_ground_state_only_through_repump() {
        let basis = SymBasis::new(2);
        let params = ModelParams { n: 2, gamma_c: 1.0, w: 0.7, ..ModelParams::default() };
        let gen = sms(&basis, &params).unwrap();
        let ground = initial_state(&basis, InitialStateKind::GroundDown).unwrap();
        // The decay channel annihilates the all-ground, all-down state.
        let decay = &gen.jumps()[0];
        assert!(decay.apply(&ground).iter().all(|v| v.norm() < 1e-15));
        let rho = crate::basis::DensityMatrix::from_pure(&ground);
        let d = basis.len();
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        let mut scratch = vec![C64::new(0.0, 0.0); d * d];
        gen.apply(rho.data(), &mut out, &mut scratch);
        let max = out.iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(max > 1e-3);
        // With the repump switched off nothing moves at all.
        let frozen = sms(&basis, &ModelParams { w: 0.0, ..params }).unwrap();
        assert!(frozen.residual(&rho) < 1e-14);
    }

    #[test]
    fn initial_states() {
        let basis = SymBasis::new(5);
        let ground = initial_state(&basis, InitialStateKind::GroundDown).unwrap();
        let idx = basis.index_of(&Occupation([0, 0, 0, 5])).unwrap();
        for (i, a) in ground.amps().iter().enumerate() {
            let expect = if i == idx { 1.0 } else { 0.0 };
            assert!((a.norm() - expect).abs() < 1e-15);
        }

        let basis2 = SymBasis::new(2);
        let sup = initial_state(&basis2, InitialStateKind::SuperpositionDown).unwrap();
        let cases = [([0u32, 2, 0, 0], 0.5), ([0, 1, 0, 1], 1.0 / 2f64.sqrt()), ([0, 0, 0, 2], 0.5)];
        for (occ, expect) in cases {
            let i = basis2.index_of(&Occupation(occ)).unwrap();
            assert!((sup.amps()[i] - C64::new(expect, 0.0)).norm() < 1e-14);
        }

        for n in [1u32, 7, 20] {
            let b = SymBasis::new(n);
            let psi = initial_state(&b, InitialStateKind::SuperpositionDown).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parameter_validation() {
        let bad = ModelParams { n: 0, ..ModelParams::default() };
        assert!(bad.validate().is_err());
        let bad = ModelParams { gamma_c: -1.0, ..ModelParams::default() };
        assert!(bad.validate().is_err());
        let bad = ModelParams { w: f64::NAN, ..ModelParams::default() };
        assert!(bad.validate().is_err());
    }
}
