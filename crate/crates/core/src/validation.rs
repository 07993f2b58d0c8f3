//! The invariant and oracle-equivalence suites behind the `validate` command.
//!
//! Each suite reports its worst residual against a fixed tolerance; a failed
//! check is data, not a panic, so the CLI can print the full table and set
//! the exit code.

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::basis::{quantum_numbers, DensityMatrix, Dof, StateVector, SymBasis};
use crate::dynamics::evolve_lindblad;
use crate::entropy::{
    blocks_pure, entropy_from_blocks, entropy_mixed, entropy_pure, project_pure,
};
use crate::models::{e_squared, initial_state, leaky_boat, InitialStateKind, ModelParams};
use crate::ode::OdeOptions;
use crate::operators::{collective_generator, Slot};
use crate::oracle::{
    embed_symmetric_density, embed_symmetric_state, full_generator, oracle_report, FullSpaceState,
};
use crate::pyramid::{build_pyramid, PyramidBasis};
use crate::sparse::commutator_residual;
use crate::sym_dim;

#[derive(Clone, Debug)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub note: String,
}

impl Check {
    fn measured(name: &str, residual: f64, tolerance: f64, note: String) -> Self {
        Check { name: name.to_string(), passed: residual <= tolerance, residual, tolerance, note }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct ValidationConfig {
    pub n_max: u32,
    pub seed: u64,
    /// Random states drawn per randomized suite.
    pub draws: usize,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig { n_max: 4, seed: 7, draws: 10 }
    }
}

fn haar_state(basis: &std::sync::Arc<SymBasis>, rng: &mut ChaCha12Rng) -> StateVector {
    let mut amps = Vec::with_capacity(basis.len());
    for _ in 0..basis.len() {
        // Box-Muller: two uniforms to one complex Gaussian.
        let u1: f64 = rng.random::<f64>().max(1e-300);
        let u2: f64 = rng.random();
        let r = (-2.0 * u1.ln()).sqrt();
        let th = 2.0 * std::f64::consts::PI * u2;
        amps.push(C64::new(r * th.cos(), r * th.sin()));
    }
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::new(basis.clone(), amps).expect("normalized")
}

/// Run every suite up to `n_max`; oracle-backed suites stop at the oracle cap.
pub fn run_validation(cfg: &ValidationConfig, cached: Option<&PyramidBasis>) -> Vec<Check> {
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    let mut checks = Vec::new();
    let n_max = cfg.n_max;
    let oracle_n = n_max.min(4);

    // --- basis ---
    let mut residual = 0.0f64;
    for n in 0..=n_max {
        residual =
            residual.max((SymBasis::new(n).len() as f64 - sym_dim(n) as f64).abs());
    }
    checks.push(Check::measured(
        "basis.dimension-formula",
        residual,
        0.0,
        format!("enumeration vs closed form, N <= {n_max}"),
    ));

    let mut residual = 0.0f64;
    for n in 0..=n_max {
        let basis = SymBasis::new(n);
        for (i, occ) in basis.iter() {
            if basis.index_of(&occ) != Some(i) {
                residual += 1.0;
            }
        }
    }
    checks.push(Check::measured(
        "basis.index-round-trip",
        residual,
        0.0,
        "index(state_at(i)) == i".into(),
    ));

    let mut residual = 0.0f64;
    for n in 0..=n_max {
        let basis = SymBasis::new(n);
        let mut from_basis: Vec<(i64, i64)> =
            basis.iter().map(|(_, occ)| quantum_numbers(occ)).collect();
        let mut from_layers = Vec::new();
        let mut ell2 = n as i64;
        while ell2 >= 0 {
            for r in 0..=ell2 {
                for c in 0..=ell2 {
                    from_layers.push((ell2 - 2 * r, ell2 - 2 * c));
                }
            }
            ell2 -= 2;
        }
        from_basis.sort_unstable();
        from_layers.sort_unstable();
        if from_basis != from_layers {
            residual += 1.0;
        }
    }
    checks.push(Check::measured(
        "basis.projection-multiset",
        residual,
        0.0,
        "(m_j, m_k) multiset vs layer counting".into(),
    ));

    // --- operators ---
    let mut herm = 0.0f64;
    let mut adjoint = 0.0f64;
    for n in 1..=n_max {
        let basis = SymBasis::new(n);
        for mu in Slot::HERMITIAN {
            for nu in Slot::HERMITIAN {
                herm = herm
                    .max(collective_generator(&basis, mu, nu).matrix().hermiticity_residual());
            }
        }
        for nu in Slot::ALL {
            let plus = collective_generator(&basis, Slot::Plus, nu);
            let flipped = match nu {
                Slot::Plus => Slot::Minus,
                Slot::Minus => Slot::Plus,
                other => other,
            };
            let minus = collective_generator(&basis, Slot::Minus, flipped);
            adjoint = adjoint.max(
                plus.matrix().adjoint().sub(minus.matrix()).expect("same dim").max_abs(),
            );
        }
    }
    checks.push(Check::measured("operators.hermitian-labels", herm, 1e-12, String::new()));
    checks.push(Check::measured("operators.adjoint-pairing", adjoint, 1e-12, String::new()));

    let mut residual = 0.0f64;
    for n in 1..=oracle_n {
        let basis = SymBasis::new(n);
        for mu in Slot::ALL {
            for nu in Slot::ALL {
                let sym = collective_generator(&basis, mu, nu);
                let full = full_generator(n, mu, nu).expect("below cap");
                for i in 0..basis.len() {
                    let e =
                        StateVector::from_occupation(basis.clone(), basis.state(i)).expect("basis");
                    let via_sym = sym.matrix().apply_vec(e.amps());
                    let FullSpaceState::Pure { amps: embedded, .. } =
                        embed_symmetric_state(&e).expect("below cap")
                    else {
                        unreachable!()
                    };
                    let via_full = full.apply_vec(&embedded);
                    // Embed the symmetric image and compare in the full space.
                    let mut img = vec![C64::new(0.0, 0.0); basis.len()];
                    img.copy_from_slice(&via_sym);
                    let img_state = StateVector::new_unchecked(basis.clone(), img);
                    let FullSpaceState::Pure { amps: img_full, .. } =
                        embed_symmetric_state(&img_state).expect("below cap")
                    else {
                        unreachable!()
                    };
                    let diff = img_full
                        .iter()
                        .zip(&via_full)
                        .map(|(a, b)| (a - b).norm())
                        .fold(0.0, f64::max);
                    residual = residual.max(diff);
                }
            }
        }
    }
    checks.push(Check::measured(
        "operators.oracle-intertwining",
        residual,
        1e-12,
        format!("all 36 labels, N <= {oracle_n}"),
    ));

    let mut residual = 0.0f64;
    for n in 1..=oracle_n {
        let basis = SymBasis::new(n);
        let mut embedded = Vec::new();
        for i in 0..basis.len() {
            let e = StateVector::from_occupation(basis.clone(), basis.state(i)).expect("basis");
            let FullSpaceState::Pure { amps, .. } = embed_symmetric_state(&e).expect("cap") else {
                unreachable!()
            };
            embedded.push(amps);
        }
        for (i, a) in embedded.iter().enumerate() {
            for (j, b) in embedded.iter().enumerate() {
                let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                residual = residual.max((ip - C64::new(expect, 0.0)).norm());
            }
        }
    }
    checks.push(Check::measured("oracle.embedding-isometry", residual, 1e-12, String::new()));

    // --- pyramid ---
    let mut gram = 0.0f64;
    let mut casimir_res = 0.0f64;
    let mut ladder = 0.0f64;
    let mut counting = 0.0f64;
    for n in 1..=n_max {
        let basis = SymBasis::new(n);
        let pyr = build_pyramid(&basis).expect("pyramid builds");
        let (g, c, l) = pyramid_residuals(&pyr);
        gram = gram.max(g);
        casimir_res = casimir_res.max(c);
        ladder = ladder.max(l);
        let sq: usize = pyr.layers().iter().map(|l| l.grid() * l.grid()).sum();
        if sq != basis.len() {
            counting += 1.0;
        }
        let weighted: u128 = pyr
            .layers()
            .iter()
            .map(|l| l.multiplicity().expect("small N") * l.grid() as u128)
            .sum();
        if weighted != 1u128 << n {
            counting += 1.0;
        }
    }
    checks.push(Check::measured("pyramid.gram-identity", gram, 1e-10, String::new()));
    checks.push(Check::measured("pyramid.casimir-eigenvalues", casimir_res, 1e-8, String::new()));
    checks.push(Check::measured("pyramid.ladder-consistency", ladder, 1e-10, String::new()));
    checks.push(Check::measured(
        "pyramid.counting-identities",
        counting,
        0.0,
        "sum (2l+1)^2 = dim and sum d (2l+1) = 2^N".into(),
    ));

    if let Some(pyr) = cached {
        let (g, c, l) = pyramid_residuals(pyr);
        checks.push(Check::measured(
            "cache.gram-identity",
            g,
            1e-10,
            format!("loaded pyramid, N = {}", pyr.basis().n()),
        ));
        checks.push(Check::measured("cache.casimir-eigenvalues", c, 1e-8, String::new()));
        checks.push(Check::measured("cache.ladder-consistency", l, 1e-10, String::new()));
    }

    // --- entropy ---
    let mut sym_res = 0.0f64;
    let mut accounting = 0.0f64;
    for n in 1..=n_max {
        let basis = SymBasis::new(n);
        let pyr = build_pyramid(&basis).expect("pyramid builds");
        for _ in 0..cfg.draws {
            let psi = haar_state(&basis, &mut rng);
            let report = entropy_pure(&psi, &pyr).expect("entropy");
            sym_res = sym_res.max((report.s_j - report.s_k).abs());
            let spec = blocks_pure(&project_pure(&psi, &pyr).expect("norm"), Dof::J)
                .expect("blocks");
            if let Ok(expanded) = spec.expanded_spectrum() {
                let total: f64 = expanded.iter().sum();
                accounting = accounting.max((total - 1.0).abs());
                // The Shannon cross-check carries a 10x tighter tolerance.
                let shannon: f64 =
                    -expanded.iter().filter(|&&p| p > 1e-12).map(|&p| p * p.ln()).sum::<f64>();
                accounting = accounting
                    .max((shannon - entropy_from_blocks(&spec).expect("entropy")).abs() * 10.0);
            }
        }
    }
    checks.push(Check::measured("entropy.pure-symmetry", sym_res, 1e-9, String::new()));
    checks.push(Check::measured(
        "entropy.multiplicity-accounting",
        accounting,
        1e-9,
        String::new(),
    ));

    if n_max >= 3 {
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).expect("pyramid builds");
        let low = &pyr.layers()[1];
        let psi = StateVector::new(basis.clone(), pyr.vector_dense(low, 0, 0)).expect("unit");
        let report = entropy_pure(&psi, &pyr).expect("entropy");
        let mut residual = (report.s_j - 2f64.ln()).abs();
        let top = &pyr.layers()[0];
        let psi = StateVector::new(basis, pyr.vector_dense(top, 2, 1)).expect("unit");
        let report = entropy_pure(&psi, &pyr).expect("entropy");
        residual = residual.max(report.s_j.abs());
        checks.push(Check::measured(
            "entropy.exact-small-cases",
            residual,
            1e-12,
            "ln 2 on the doubled layer, 0 on the top layer".into(),
        ));
    }

    let mut residual = 0.0f64;
    for n in 3..=oracle_n {
        let basis = SymBasis::new(n);
        let pyr = build_pyramid(&basis).expect("pyramid builds");
        for _ in 0..cfg.draws {
            let psi = haar_state(&basis, &mut rng);
            let poly = entropy_pure(&psi, &pyr).expect("entropy");
            let full = embed_symmetric_state(&psi).expect("cap");
            let orc = oracle_report(&full).expect("oracle");
            residual = residual.max((poly.s_j - orc.s_j).abs()).max((poly.s_k - orc.s_k).abs());
        }
    }
    checks.push(Check::measured(
        "entropy.oracle-pure",
        residual,
        1e-8,
        format!("{} random states per N", cfg.draws),
    ));

    if oracle_n >= 3 {
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).expect("pyramid builds");
        let d = basis.len();
        let mut residual = 0.0f64;
        for _ in 0..cfg.draws.min(5) {
            let mut data = vec![C64::new(0.0, 0.0); d * d];
            let weights = [0.5, 0.3, 0.2];
            for w in weights {
                let psi = haar_state(&basis, &mut rng);
                for j in 0..d {
                    for i in 0..d {
                        data[j * d + i] += psi.amps()[i] * psi.amps()[j].conj() * w;
                    }
                }
            }
            let rho = DensityMatrix::new(basis.clone(), data).expect("valid mixture");
            let poly = entropy_mixed(&rho, &pyr).expect("entropy");
            let orc = oracle_report(&embed_symmetric_density(&rho).expect("cap")).expect("oracle");
            for (a, b) in [
                (poly.s_j, orc.s_j),
                (poly.s_k, orc.s_k),
                (poly.s_total, orc.s_total),
                (poly.i_j_given_k, orc.i_j_given_k),
                (poly.i_k_given_j, orc.i_k_given_j),
            ] {
                residual = residual.max((a - b).abs());
            }
        }
        checks.push(Check::measured("entropy.oracle-mixed", residual, 1e-8, String::new()));
    }

    // --- dynamics ---
    if n_max >= 2 {
        let n = n_max.min(3);
        let params =
            ModelParams { n, chi: 1.0, gamma_c: 0.3, ..ModelParams::default() };
        let basis = SymBasis::new(n);
        let gen = leaky_boat(&basis, &params).expect("generator");
        let rho0 = DensityMatrix::from_pure(
            &initial_state(&basis, InitialStateKind::SuperpositionDown).expect("state"),
        );
        let times: Vec<f64> = (0..=10).map(|i| i as f64 * 0.15).collect();
        match evolve_lindblad(&gen, &rho0, &times, &OdeOptions::default()) {
            Ok(traj) => {
                let mut trace_drift = 0.0f64;
                let mut herm_res = 0.0f64;
                let mut e2_drift = 0.0f64;
                let e2 = e_squared(&basis);
                let e2_0 = e2.matrix().trace_with(rho0.data()).re;
                for rho in &traj.states {
                    trace_drift = trace_drift.max((rho.trace().re - 1.0).abs());
                    herm_res = herm_res.max(rho.hermiticity_residual());
                    e2_drift =
                        e2_drift.max((e2.matrix().trace_with(rho.data()).re - e2_0).abs());
                }
                checks.push(Check::measured(
                    "dynamics.trace-preservation",
                    trace_drift,
                    1e-8,
                    String::new(),
                ));
                checks.push(Check::measured(
                    "dynamics.hermiticity",
                    herm_res,
                    1e-10,
                    String::new(),
                ));
                checks.push(Check::measured(
                    "dynamics.conserved-charge-drift",
                    e2_drift,
                    1e-7,
                    String::new(),
                ));
            }
            Err(err) => checks.push(Check {
                name: "dynamics.trace-preservation".into(),
                passed: false,
                residual: f64::NAN,
                tolerance: 1e-8,
                note: format!("integration failed: {err}"),
            }),
        }
        let h = crate::models::h_boat(&basis, &params).expect("hamiltonian");
        let e2 = e_squared(&basis);
        let jump = collective_generator(&basis, Slot::Minus, Slot::X)
            .scaled(C64::new(params.gamma_c.sqrt(), 0.0));
        let c1 = commutator_residual(e2.matrix(), h.matrix()).expect("same dim");
        let c2 = commutator_residual(e2.matrix(), jump.matrix()).expect("same dim");
        checks.push(Check::measured(
            "dynamics.strong-symmetry-commutators",
            c1.max(c2),
            1e-12,
            String::new(),
        ));
    }

    checks
}

/// Worst (gram, casimir, ladder) residuals of a pyramid.
fn pyramid_residuals(pyr: &PyramidBasis) -> (f64, f64, f64) {
    let basis = pyr.basis();
    let dense: Vec<Vec<C64>> = pyr
        .layers()
        .iter()
        .flat_map(|layer| {
            let g = layer.grid();
            (0..g * g).map(move |s| pyr.vector_dense(layer, s / g, s % g))
        })
        .collect();
    let mut gram = 0.0f64;
    for (i, a) in dense.iter().enumerate() {
        for (j, b) in dense.iter().enumerate() {
            let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
            let expect = if i == j { 1.0 } else { 0.0 };
            gram = gram.max((ip - C64::new(expect, 0.0)).norm());
        }
    }

    let j2 = crate::operators::casimir(basis, Dof::J);
    let k2 = crate::operators::casimir(basis, Dof::K);
    let mut casimir_res = 0.0f64;
    for layer in pyr.layers() {
        let ell = layer.ell_doubled() as f64 / 2.0;
        let want = ell * (ell + 1.0);
        let g = layer.grid();
        for r in 0..g {
            for c in 0..g {
                let v = pyr.vector_dense(layer, r, c);
                for op in [&j2, &k2] {
                    let out = op.matrix().apply_vec(&v);
                    let res: f64 = out
                        .iter()
                        .zip(&v)
                        .map(|(o, vi)| (o - vi * want).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    casimir_res = casimir_res.max(res);
                }
            }
        }
    }

    let jm = collective_generator(basis, Slot::Minus, Slot::I);
    let km = collective_generator(basis, Slot::I, Slot::Minus);
    let mut ladder = 0.0f64;
    for layer in pyr.layers() {
        let e2 = layer.ell_doubled() as i64;
        let g = layer.grid();
        for r in 0..g {
            for c in 0..g {
                let v = pyr.vector_dense(layer, r, c);
                if c + 1 < g {
                    let (_, mk2) = layer.projections(r, c);
                    let scale = ((((e2 + mk2) / 2) * ((e2 - mk2) / 2 + 1)) as f64).sqrt();
                    let out = km.matrix().apply_vec(&v);
                    let expect = pyr.vector_dense(layer, r, c + 1);
                    let res: f64 = out
                        .iter()
                        .zip(&expect)
                        .map(|(o, e)| (o - e * scale).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    ladder = ladder.max(res);
                }
                if r + 1 < g {
                    let (mj2, _) = layer.projections(r, c);
                    let scale = ((((e2 + mj2) / 2) * ((e2 - mj2) / 2 + 1)) as f64).sqrt();
                    let out = jm.matrix().apply_vec(&v);
                    let expect = pyr.vector_dense(layer, r + 1, c);
                    let res: f64 = out
                        .iter()
                        .zip(&expect)
                        .map(|(o, e)| (o - e * scale).norm_sqr())
                        .sum::<f64>()
                        .sqrt();
                    ladder = ladder.max(res);
                }
            }
        }
    }

    (gram, casimir_res, ladder)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_validation_passes() {
        let cfg = ValidationConfig { n_max: 3, seed: 11, draws: 3 };
        let checks = run_validation(&cfg, None);
        for check in &checks {
            assert!(
                check.passed,
                "{} failed: residual {:.3e} > {:.3e} {}",
                check.name, check.residual, check.tolerance, check.note
            );
        }
        assert!(checks.len() >= 12);
    }

    #[test]
    fn corrupted_cache_pyramid_fails_gram() {
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).unwrap();
        let mut buf = Vec::new();
        crate::pyramid::write_cache(&pyr, &mut buf).unwrap();
        // Flip an exponent bit of a trailing coefficient.
        let at = buf.len() - 33;
        buf[at] ^= 0x40;
        let corrupted = crate::pyramid::read_cache(&basis, buf.as_slice()).unwrap();
        let cfg = ValidationConfig { n_max: 1, seed: 1, draws: 1 };
        let checks = run_validation(&cfg, Some(&corrupted));
        let gram = checks.iter().find(|c| c.name == "cache.gram-identity").unwrap();
        assert!(!gram.passed);
    }
}
