//! Exponential-cost reference implementation in the full `4^N`
//! single-particle space, used only to validate the polynomial modules at
//! small particle number.
//!
//! Tensor ordering: particle 1 varies slowest; each particle contributes one
//! base-4 digit in the mode order (excited-up, excited-down, ground-up,
//! ground-down).

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::basis::{DensityMatrix, Dof, StateVector, SymBasis};
use crate::entropy::von_neumann;
use crate::error::{Error, Result};
use crate::operators::{single_particle_matrix, Slot};
use crate::sparse::SpMat;

/// Largest particle number the oracle will touch (`4^6 = 4096`).
pub const ORACLE_CAP: u32 = 6;

fn check_cap(n: u32) -> Result<()> {
    if n > ORACLE_CAP {
        return Err(Error::OracleCap { n, cap: ORACLE_CAP });
    }
    Ok(())
}

/// A state in the full single-particle space.
#[derive(Clone, Debug)]
pub enum FullSpaceState {
    Pure { n: u32, amps: Vec<C64> },
    /// Column-major `4^N x 4^N` density matrix.
    Mixed { n: u32, data: Vec<C64> },
}

impl FullSpaceState {
    pub fn n(&self) -> u32 {
        match self {
            FullSpaceState::Pure { n, .. } | FullSpaceState::Mixed { n, .. } => *n,
        }
    }

    pub fn dim(&self) -> usize {
        full_dim(self.n())
    }
}

pub fn full_dim(n: u32) -> usize {
    1usize << (2 * n)
}

fn digit(full_idx: usize, particle: usize, n: u32) -> usize {
    (full_idx >> (2 * (n as usize - 1 - particle))) & 3
}

/// For every full-space index, the symmetric-basis index it symmetrizes into
/// and the amplitude `sqrt(a! b! c! d! / N!)` of that arrangement.
fn embedding_map(basis: &SymBasis) -> Result<Vec<(usize, f64)>> {
    let n = basis.n();
    check_cap(n)?;
    let fact = |m: u32| -> f64 { (1..=m as u64).product::<u64>() as f64 };
    let n_fact = fact(n);
    let mut map = Vec::with_capacity(full_dim(n));
    for fi in 0..full_dim(n) {
        let mut occ = crate::basis::Occupation([0; 4]);
        for p in 0..n as usize {
            occ.0[digit(fi, p, n)] += 1;
        }
        let amp = (occ.0.iter().map(|&m| fact(m)).product::<f64>() / n_fact).sqrt();
        let idx = basis.index_of(&occ).expect("occupation in basis");
        map.push((idx, amp));
    }
    Ok(map)
}

/// Isometric embedding of a symmetric pure state into the full space.
pub fn embed_symmetric_state(psi: &StateVector) -> Result<FullSpaceState> {
    let map = embedding_map(psi.basis())?;
    let amps = map.iter().map(|&(idx, amp)| psi.amps()[idx] * amp).collect();
    Ok(FullSpaceState::Pure { n: psi.basis().n(), amps })
}

/// Isometric embedding of a symmetric density matrix.
pub fn embed_symmetric_density(rho: &DensityMatrix) -> Result<FullSpaceState> {
    let map = embedding_map(rho.basis())?;
    let fd = map.len();
    let mut data = vec![C64::new(0.0, 0.0); fd * fd];
    for (fj, &(sj, aj)) in map.iter().enumerate() {
        let col = &mut data[fj * fd..(fj + 1) * fd];
        for (fi, &(si, ai)) in map.iter().enumerate() {
            col[fi] = rho.entry(si, sj) * (ai * aj);
        }
    }
    Ok(FullSpaceState::Mixed { n: rho.basis().n(), data })
}

/// `sum_j sigma_mu^(j) (x) s_nu^(j)` as a sparse matrix on the full space.
pub fn full_generator(n: u32, mu: Slot, nu: Slot) -> Result<SpMat> {
    check_cap(n)?;
    let m = single_particle_matrix(mu, nu);
    let fd = full_dim(n);
    let mut trip = Vec::new();
    for col in 0..fd {
        for p in 0..n as usize {
            let b = digit(col, p, n);
            let shift = 2 * (n as usize - 1 - p);
            for (a, row_m) in m.iter().enumerate() {
                let v = row_m[b];
                if v.re == 0.0 && v.im == 0.0 {
                    continue;
                }
                let row = col - (b << shift) + (a << shift);
                trip.push((row, col, v));
            }
        }
    }
    Ok(SpMat::from_triplets(fd, trip))
}

/// Full-space index from separate first-dof and second-dof bit strings.
pub fn interleave(n: u32, j_idx: usize, k_idx: usize) -> usize {
    let mut out = 0usize;
    for p in 0..n as usize {
        let shift = n as usize - 1 - p;
        let jbit = (j_idx >> shift) & 1;
        let kbit = (k_idx >> shift) & 1;
        out = (out << 2) | (jbit << 1) | kbit;
    }
    out
}

/// Trace out one degree of freedom, returning the `2^N x 2^N` reduced matrix.
pub fn partial_trace(state: &FullSpaceState, dof: Dof) -> Result<DMatrix<C64>> {
    let n = state.n();
    check_cap(n)?;
    let hd = 1usize << n;
    let mut out = DMatrix::from_element(hd, hd, C64::new(0.0, 0.0));
    match state {
        FullSpaceState::Pure { amps, .. } => {
            // Reshape into A[j, k] and contract the traced index.
            for j in 0..hd {
                for jp in 0..hd {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..hd {
                        let (x, y) = match dof {
                            Dof::J => (interleave(n, j, k), interleave(n, jp, k)),
                            Dof::K => (interleave(n, k, j), interleave(n, k, jp)),
                        };
                        acc += amps[x] * amps[y].conj();
                    }
                    out[(j, jp)] = acc;
                }
            }
        }
        FullSpaceState::Mixed { data, .. } => {
            let fd = full_dim(n);
            for j in 0..hd {
                for jp in 0..hd {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..hd {
                        let (x, y) = match dof {
                            Dof::J => (interleave(n, j, k), interleave(n, jp, k)),
                            Dof::K => (interleave(n, k, j), interleave(n, k, jp)),
                        };
                        acc += data[y * fd + x];
                    }
                    out[(j, jp)] = acc;
                }
            }
        }
    }
    Ok(out)
}

/// Von Neumann entropy of a reduced density matrix by dense
/// eigendecomposition, with the same flooring rules as the block algorithm.
pub fn full_entropy(reduced: &DMatrix<C64>) -> Result<f64> {
    von_neumann(reduced)
}

/// Entropy report of a full-space state computed entirely on the oracle path.
pub fn oracle_report(state: &FullSpaceState) -> Result<crate::entropy::EntropyReport> {
    let s_j = full_entropy(&partial_trace(state, Dof::J)?)?;
    let s_k = full_entropy(&partial_trace(state, Dof::K)?)?;
    let s_total = match state {
        FullSpaceState::Pure { .. } => 0.0,
        FullSpaceState::Mixed { data, n } => {
            let fd = full_dim(*n);
            von_neumann(&DMatrix::from_column_slice(fd, fd, data))?
        }
    };
    Ok(crate::entropy::EntropyReport {
        time: 0.0,
        s_j,
        s_k,
        s_total,
        i_j_given_k: s_k - s_total,
        i_k_given_j: s_j - s_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Occupation;
    use crate::models::{initial_state, product_state, InitialStateKind};
    use crate::pyramid::build_pyramid;

    #[test]
    fn cap_enforced() {
        assert!(matches!(full_generator(7, Slot::X, Slot::I), Err(Error::OracleCap { .. })));
    }

    #[test]
    fn single_particle_generator_is_kron() {
        for mu in Slot::ALL {
            for nu in Slot::ALL {
                let g = full_generator(1, mu, nu).unwrap();
                let m = single_particle_matrix(mu, nu);
                for i in 0..4 {
                    for j in 0..4 {
                        assert_eq!(g.entry(i, j), m[i][j]);
                    }
                }
            }
        }
    }

    #[test]
    fn top_state_embeds_without_symmetrization() {
        let basis = SymBasis::new(3);
        let psi = StateVector::from_occupation(basis, Occupation([3, 0, 0, 0])).unwrap();
        let FullSpaceState::Pure { amps, .. } = embed_symmetric_state(&psi).unwrap() else {
            unreachable!()
        };
        assert!((amps[0] - C64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(amps.iter().skip(1).all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn g_zi_on_all_excited() {
        let n = 4;
        let g = full_generator(n, Slot::Z, Slot::I).unwrap();
        let mut psi = vec![C64::new(0.0, 0.0); full_dim(n)];
        psi[0] = C64::new(1.0, 0.0);
        let out = g.apply_vec(&psi);
        assert!((out[0] - C64::new(n as f64, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn embedding_is_isometric() {
        let basis = SymBasis::new(3);
        let dim = basis.len();
        let mut embedded = Vec::new();
        for i in 0..dim {
            let psi = StateVector::from_occupation(basis.clone(), basis.state(i)).unwrap();
            let FullSpaceState::Pure { amps, .. } = embed_symmetric_state(&psi).unwrap() else {
                unreachable!()
            };
            embedded.push(amps);
        }
        for (i, a) in embedded.iter().enumerate() {
            for (j, b) in embedded.iter().enumerate() {
                let ip: C64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((ip - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn singlet_layer_matches_double_singlet() {
        // The N=2, l=0 pyramid vector embeds (up to phase) into
        // (|01> - |10>) (x) (|ud> - |du>) / 2.
        let basis = SymBasis::new(2);
        let pyr = build_pyramid(&basis).unwrap();
        let low = &pyr.layers()[1];
        let amps = pyr.vector_dense(low, 0, 0);
        let psi = StateVector::new(basis, amps).unwrap();
        let FullSpaceState::Pure { amps: full, .. } = embed_symmetric_state(&psi).unwrap() else {
            unreachable!()
        };
        let mut expect = vec![C64::new(0.0, 0.0); 16];
        // Modes: particle digits (j, k): |0>=ground -> jbit 1, |1>=excited -> jbit 0.
        let half = 0.5;
        // (|0 1> - |1 0>)_J (x) (|u d> - |d u>)_K with J bits (1,0)/(0,1), K bits (0,1)/(1,0):
        for (j1, j2, sj) in [(1usize, 0usize, 1.0), (0, 1, -1.0)] {
            for (k1, k2, sk) in [(0usize, 1usize, 1.0), (1, 0, -1.0)] {
                let idx = (((2 * j1 + k1) << 2) | (2 * j2 + k2)) as usize;
                expect[idx] = C64::new(sj * sk * half, 0.0);
            }
        }
        let overlap: C64 = expect.iter().zip(&full).map(|(a, b)| a.conj() * b).sum();
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn exemplary_n3_state_has_one_bit() {
        // Build the l = 1/2 pyramid vector at (1/2, 1/2), embed it, and check
        // its reduced entropy directly.
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).unwrap();
        let low = &pyr.layers()[1];
        let amps = pyr.vector_dense(low, 0, 0);
        let psi = StateVector::new(basis, amps).unwrap();
        let full = embed_symmetric_state(&psi).unwrap();
        let rho_j = partial_trace(&full, Dof::J).unwrap();
        let s = full_entropy(&rho_j).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn max_entangled_reduces_to_identity() {
        let n = 3;
        let basis = SymBasis::new(n);
        let inv = 1.0 / 2f64.sqrt();
        let psi = product_state(
            &basis,
            [C64::new(0.0, -inv), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(inv, 0.0)],
        )
        .unwrap();
        let full = embed_symmetric_state(&psi).unwrap();
        let rho_j = partial_trace(&full, Dof::J).unwrap();
        let hd = 1 << n;
        for i in 0..hd {
            for j in 0..hd {
                let expect = if i == j { 1.0 / hd as f64 } else { 0.0 };
                assert!((rho_j[(i, j)] - C64::new(expect, 0.0)).norm() < 1e-12);
            }
        }
        let s = full_entropy(&rho_j).unwrap();
        assert!((s - (n as f64) * 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn product_state_reduces_to_projector() {
        let basis = SymBasis::new(2);
        let psi = initial_state(&basis, InitialStateKind::GroundDown).unwrap();
        let full = embed_symmetric_state(&psi).unwrap();
        let rho_j = partial_trace(&full, Dof::J).unwrap();
        // Rank-1: entropy zero and trace of square one.
        assert!(full_entropy(&rho_j).unwrap().abs() < 1e-12);
        let sq = (&rho_j * &rho_j).trace();
        assert!((sq.re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mixed_embedding_matches_pure_outer_product() {
        let basis = SymBasis::new(2);
        let psi = initial_state(&basis, InitialStateKind::SuperpositionDown).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let FullSpaceState::Mixed { data, .. } = embed_symmetric_density(&rho).unwrap() else {
            unreachable!()
        };
        let FullSpaceState::Pure { amps, .. } = embed_symmetric_state(&psi).unwrap() else {
            unreachable!()
        };
        let fd = amps.len();
        for j in 0..fd {
            for i in 0..fd {
                let expect = amps[i] * amps[j].conj();
                assert!((data[j * fd + i] - expect).norm() < 1e-13);
            }
        }
    }
}
