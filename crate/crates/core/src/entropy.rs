//! Algebraic entanglement entropy from per-layer reduced blocks.
//!
//! Tracing out one degree of freedom never mixes pyramid layers, so the
//! reduced state of the other degree of freedom decomposes into one Hermitian
//! `(2l+1) x (2l+1)` block per layer. Each eigenvalue `lambda` of a layer
//! block really stands for `d^l_N` copies of `lambda / d^l_N`, which is what
//! lets a polynomially sized computation report an entropy that grows
//! linearly in `N`:
//!
//! ```text
//! S = - sum_l sum_i lambda_i^(l) ln(lambda_i^(l) / d^l_N)
//! ```
//!
//! with `0 ln 0 = 0`. For pure states the blocks come straight from the
//! projection grid `p_{l,m_j,m_k}`; for mixed states the reduced blocks are
//! formed directly from matrix elements of `rho` between same-layer,
//! same-column vectors, so the six-index coefficient tensor is never
//! materialized.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::basis::{DensityMatrix, Dof, StateVector};
use crate::error::{Error, Result};
use crate::pyramid::PyramidBasis;

/// Eigenvalues below this are treated as exact zeros in entropy sums.
const EIGENVALUE_FLOOR: f64 = 1e-12;
/// Eigenvalues in `[-NOISE_FLOOR, 0)` are clipped; below is an error.
const NOISE_FLOOR: f64 = 1e-9;

/// Projection coefficients of a state on the pyramid.
#[derive(Clone, Debug)]
pub enum CoefficientPyramid {
    /// Per-layer grids `p_{l,m_j,m_k}`; rows run over `m_j` descending,
    /// columns over `m_k` descending, matching the pyramid layout.
    Pure { layers: Vec<LayerGrid> },
    /// Per-layer reduced blocks of a density matrix for one degree of
    /// freedom.
    Mixed { dof: Dof, blocks: Vec<LayerBlock> },
}

#[derive(Clone, Debug)]
pub struct LayerGrid {
    pub ell_doubled: u32,
    pub ln_multiplicity: f64,
    pub multiplicity: Option<u128>,
    /// Row-major `(2l+1)^2` grid.
    pub p: Vec<C64>,
}

#[derive(Clone, Debug)]
pub struct LayerBlock {
    pub ell_doubled: u32,
    pub ln_multiplicity: f64,
    pub multiplicity: Option<u128>,
    /// Row-major Hermitian `(2l+1)^2` block.
    pub m: Vec<C64>,
}

/// Per-layer reduced blocks with their eigenvalues.
#[derive(Clone, Debug)]
pub struct BlockSpectrum {
    pub layers: Vec<SpectrumLayer>,
}

#[derive(Clone, Debug)]
pub struct SpectrumLayer {
    pub ell_doubled: u32,
    pub ln_multiplicity: f64,
    pub multiplicity: Option<u128>,
    /// Row-major Hermitian block `M^(l)`.
    pub block: Vec<C64>,
    /// Real eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
}

impl BlockSpectrum {
    pub fn trace(&self) -> f64 {
        self.layers.iter().flat_map(|l| l.eigenvalues.iter()).sum()
    }

    /// The explicit `d`-fold expanded probability vector; only sensible for
    /// small `N` where the multiplicities are modest.
    pub fn expanded_spectrum(&self) -> Result<Vec<f64>> {
        let mut out = Vec::new();
        for layer in &self.layers {
            let d = layer
                .multiplicity
                .ok_or(Error::MultiplicityOverflow(u32::MAX))? as usize;
            for &l in &layer.eigenvalues {
                for _ in 0..d {
                    out.push(l / d as f64);
                }
            }
        }
        Ok(out)
    }
}

/// Entropies (nats) and coherent informations of one state.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyReport {
    pub time: f64,
    pub s_j: f64,
    pub s_k: f64,
    pub s_total: f64,
    /// `I(J>K) = S(rho_K) - S(rho)`.
    pub i_j_given_k: f64,
    /// `I(K>J) = S(rho_J) - S(rho)`.
    pub i_k_given_j: f64,
}

impl EntropyReport {
    pub fn at_time(mut self, t: f64) -> Self {
        self.time = t;
        self
    }
}

/// `p_{l,m_j,m_k} = <l,m_j,m_k|psi>` for every pyramid slot.
pub fn project_pure(psi: &StateVector, pyr: &PyramidBasis) -> Result<CoefficientPyramid> {
    if psi.basis().n() != pyr.basis().n() {
        return Err(Error::BasisMismatch);
    }
    let amps = psi.amps();
    let mut layers = Vec::with_capacity(pyr.layers().len());
    let mut total = 0.0;
    for layer in pyr.layers() {
        let g = layer.grid();
        let mut p = Vec::with_capacity(g * g);
        for r in 0..g {
            for c in 0..g {
                let v = pyr.project(layer, r, c, amps);
                total += v.norm_sqr();
                p.push(v);
            }
        }
        layers.push(LayerGrid {
            ell_doubled: layer.ell_doubled(),
            ln_multiplicity: layer.ln_multiplicity(),
            multiplicity: layer.multiplicity(),
            p,
        });
    }
    if (total - 1.0).abs() > 1e-8 {
        return Err(Error::NormDeficit((total - 1.0).abs()));
    }
    Ok(CoefficientPyramid::Pure { layers })
}

/// Reduced per-layer blocks of a pure state for one degree of freedom.
pub fn blocks_pure(p: &CoefficientPyramid, dof: Dof) -> Result<BlockSpectrum> {
    let CoefficientPyramid::Pure { layers } = p else {
        return Err(Error::InvalidParameter(
            "blocks_pure needs pure-state coefficients".into(),
        ));
    };
    let mut out = Vec::with_capacity(layers.len());
    for grid in layers {
        let g = grid.ell_doubled as usize + 1;
        let mut m = vec![C64::new(0.0, 0.0); g * g];
        match dof {
            Dof::J => {
                // M[j, j'] = sum_k p[j, k] conj(p[j', k])
                for j in 0..g {
                    for jp in 0..g {
                        let mut acc = C64::new(0.0, 0.0);
                        for k in 0..g {
                            acc += grid.p[j * g + k] * grid.p[jp * g + k].conj();
                        }
                        m[j * g + jp] = acc;
                    }
                }
            }
            Dof::K => {
                for k in 0..g {
                    for kp in 0..g {
                        let mut acc = C64::new(0.0, 0.0);
                        for j in 0..g {
                            acc += grid.p[j * g + k] * grid.p[j * g + kp].conj();
                        }
                        m[k * g + kp] = acc;
                    }
                }
            }
        }
        out.push(spectrum_layer(grid.ell_doubled, grid.ln_multiplicity, grid.multiplicity, m, g));
    }
    Ok(BlockSpectrum { layers: out })
}

fn spectrum_layer(
    ell_doubled: u32,
    ln_multiplicity: f64,
    multiplicity: Option<u128>,
    block: Vec<C64>,
    g: usize,
) -> SpectrumLayer {
    let eigenvalues = hermitian_eigenvalues_desc(&block, g);
    SpectrumLayer { ell_doubled, ln_multiplicity, multiplicity, block, eigenvalues }
}

/// Real eigenvalues of a row-major Hermitian block, descending.
fn hermitian_eigenvalues_desc(block: &[C64], g: usize) -> Vec<f64> {
    let m = DMatrix::from_fn(g, g, |i, j| block[i * g + j]);
    let mut eigs: Vec<f64> = m.symmetric_eigen().eigenvalues.iter().copied().collect();
    eigs.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    eigs
}

/// Multiplicity-corrected entropy of a block spectrum.
pub fn entropy_from_blocks(b: &BlockSpectrum) -> Result<f64> {
    spectrum_entropy(
        b.layers
            .iter()
            .flat_map(|l| l.eigenvalues.iter().map(move |&e| (e, l.ln_multiplicity))),
    )
}

/// `-sum lambda (ln lambda - ln d)` with noise clipping, flooring, and
/// renormalization of the surviving spectrum.
fn spectrum_entropy(items: impl Iterator<Item = (f64, f64)>) -> Result<f64> {
    let mut kept: Vec<(f64, f64)> = Vec::new();
    let mut total = 0.0;
    for (lambda, ln_d) in items {
        if lambda < -NOISE_FLOOR {
            return Err(Error::NegativeEigenvalue { value: lambda });
        }
        if lambda < EIGENVALUE_FLOOR {
            continue;
        }
        total += lambda;
        kept.push((lambda, ln_d));
    }
    if (total - 1.0).abs() > 1e-6 {
        return Err(Error::TraceDeficit((total - 1.0).abs()));
    }
    let mut s = 0.0;
    for (lambda, ln_d) in kept {
        let p = lambda / total;
        s -= p * (p.ln() - ln_d);
    }
    Ok(s)
}

/// Von Neumann entropy of a dense Hermitian trace-one matrix, with the same
/// flooring rules as the block path.
pub fn von_neumann(matrix: &DMatrix<C64>) -> Result<f64> {
    let eigs = matrix.clone().symmetric_eigen().eigenvalues;
    spectrum_entropy(eigs.iter().map(|&e| (e, 0.0)))
}

/// Full report for a pure state: `S_total = 0` and the coherent informations
/// collapse onto the marginal entropies.
pub fn entropy_pure(psi: &StateVector, pyr: &PyramidBasis) -> Result<EntropyReport> {
    let p = project_pure(psi, pyr)?;
    let s_j = entropy_from_blocks(&blocks_pure(&p, Dof::J)?)?;
    let s_k = entropy_from_blocks(&blocks_pure(&p, Dof::K)?)?;
    Ok(EntropyReport {
        time: 0.0,
        s_j,
        s_k,
        s_total: 0.0,
        i_j_given_k: s_k,
        i_k_given_j: s_j,
    })
}

/// Reduced per-layer blocks of a density matrix for one degree of freedom:
/// for `J`, `M^(l)[j, j'] = sum_k <l,j,k| rho |l,j',k>`. Only diagonal-layer,
/// diagonal-column elements are ever formed.
pub fn project_mixed(
    rho: &DensityMatrix,
    pyr: &PyramidBasis,
    dof: Dof,
) -> Result<CoefficientPyramid> {
    if rho.basis().n() != pyr.basis().n() {
        return Err(Error::BasisMismatch);
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-8 {
        return Err(Error::TraceDeficit((tr.re - 1.0).abs()));
    }
    let dim = rho.dim();
    let data = rho.data();
    let mut blocks = Vec::with_capacity(pyr.layers().len());
    let mut block_trace = 0.0;
    let mut rho_v = vec![C64::new(0.0, 0.0); dim];
    for layer in pyr.layers() {
        let g = layer.grid();
        let mut m = vec![C64::new(0.0, 0.0); g * g];
        // Grid coordinates: (row, col) = (j, k) for J, (k, j) for K, so one
        // loop covers both by swapping which index is summed over.
        for sum_idx in 0..g {
            for right in 0..g {
                let (r, c) = match dof {
                    Dof::J => (right, sum_idx),
                    Dof::K => (sum_idx, right),
                };
                // rho applied to |l, r, c>, dense.
                rho_v.iter_mut().for_each(|v| *v = C64::new(0.0, 0.0));
                for (&i, w) in pyr.slot_indices(layer, r, c).iter().zip(layer.vector(r, c)) {
                    let col = &data[i * dim..(i + 1) * dim];
                    for (o, x) in rho_v.iter_mut().zip(col) {
                        *o += w * x;
                    }
                }
                for left in 0..g {
                    let (r2, c2) = match dof {
                        Dof::J => (left, sum_idx),
                        Dof::K => (sum_idx, left),
                    };
                    let mut acc = C64::new(0.0, 0.0);
                    for (&i, w) in
                        pyr.slot_indices(layer, r2, c2).iter().zip(layer.vector(r2, c2))
                    {
                        acc += w.conj() * rho_v[i];
                    }
                    m[left * g + right] += acc;
                }
            }
        }
        for d in 0..g {
            block_trace += m[d * g + d].re;
        }
        blocks.push(LayerBlock {
            ell_doubled: layer.ell_doubled(),
            ln_multiplicity: layer.ln_multiplicity(),
            multiplicity: layer.multiplicity(),
            m,
        });
    }
    if (block_trace - tr.re).abs() > 1e-10 {
        return Err(Error::TraceDeficit((block_trace - tr.re).abs()));
    }
    Ok(CoefficientPyramid::Mixed { dof, blocks })
}

/// Diagonalize the reduced blocks of a mixed-state projection.
pub fn blocks_mixed(p: &CoefficientPyramid) -> Result<BlockSpectrum> {
    let CoefficientPyramid::Mixed { blocks, .. } = p else {
        return Err(Error::InvalidParameter(
            "blocks_mixed needs mixed-state coefficients".into(),
        ));
    };
    let layers = blocks
        .iter()
        .map(|b| {
            let g = b.ell_doubled as usize + 1;
            spectrum_layer(b.ell_doubled, b.ln_multiplicity, b.multiplicity, b.m.clone(), g)
        })
        .collect();
    Ok(BlockSpectrum { layers })
}

/// Full report for a density matrix. The marginal entropies come from the
/// per-layer blocks; `S(rho)` from a dense Hermitian eigendecomposition.
pub fn entropy_mixed(rho: &DensityMatrix, pyr: &PyramidBasis) -> Result<EntropyReport> {
    let s_j = entropy_from_blocks(&blocks_mixed(&project_mixed(rho, pyr, Dof::J)?)?)?;
    let s_k = entropy_from_blocks(&blocks_mixed(&project_mixed(rho, pyr, Dof::K)?)?)?;
    let dim = rho.dim();
    let dense = DMatrix::from_column_slice(dim, dim, rho.data());
    let s_total = von_neumann(&dense)?;
    Ok(EntropyReport {
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
    use crate::basis::{Occupation, SymBasis};
    use crate::models::{initial_state, product_state, InitialStateKind};
    use crate::pyramid::build_pyramid;
    use crate::sym_dim;

    fn pyramid_state(pyr: &PyramidBasis, layer_idx: usize, r: usize, c: usize) -> StateVector {
        let layer = &pyr.layers()[layer_idx];
        let amps = pyr.vector_dense(layer, r, c);
        StateVector::new(pyr.basis().clone(), amps).unwrap()
    }

    #[test]
    fn projection_of_pyramid_vector_is_one_hot() {
        let basis = SymBasis::new(4);
        let pyr = build_pyramid(&basis).unwrap();
        let psi = pyramid_state(&pyr, 1, 2, 1);
        let CoefficientPyramid::Pure { layers } = project_pure(&psi, &pyr).unwrap() else {
            unreachable!()
        };
        for (li, grid) in layers.iter().enumerate() {
            let g = grid.ell_doubled as usize + 1;
            for r in 0..g {
                for c in 0..g {
                    let v = grid.p[r * g + c].norm();
                    let expect = if li == 1 && r == 2 && c == 1 { 1.0 } else { 0.0 };
                    assert!((v - expect).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn psi_start_supports_only_lowest_k_column() {
        let basis = SymBasis::new(5);
        let pyr = build_pyramid(&basis).unwrap();
        let psi = initial_state(&basis, InitialStateKind::SuperpositionDown).unwrap();
        let CoefficientPyramid::Pure { layers } = project_pure(&psi, &pyr).unwrap() else {
            unreachable!()
        };
        for grid in &layers {
            let g = grid.ell_doubled as usize + 1;
            for r in 0..g {
                for c in 0..g {
                    let (_, mk2) = (0, grid.ell_doubled as i64 - 2 * c as i64);
                    if mk2 != -(grid.ell_doubled as i64) {
                        assert!(grid.p[r * g + c].norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn max_entangled_state_covers_both_layers_at_n2() {
        let basis = SymBasis::new(2);
        let pyr = build_pyramid(&basis).unwrap();
        let inv = 1.0 / 2f64.sqrt();
        let psi = product_state(&basis, [C64::new(0.0, -inv), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(inv, 0.0)])
            .unwrap();
        let CoefficientPyramid::Pure { layers } = project_pure(&psi, &pyr).unwrap() else {
            unreachable!()
        };
        let top_weight: f64 = layers[0].p.iter().map(|v| v.norm_sqr()).sum();
        let low_weight: f64 = layers[1].p.iter().map(|v| v.norm_sqr()).sum();
        assert!(top_weight > 1e-3);
        assert!(low_weight > 1e-3);
    }

    #[test]
    fn one_hot_block_has_unit_eigenvalue() {
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).unwrap();
        let psi = pyramid_state(&pyr, 1, 0, 0); // (1/2, 1/2, 1/2)
        let p = project_pure(&psi, &pyr).unwrap();
        let spec = blocks_pure(&p, Dof::J).unwrap();
        let eigs = &spec.layers[1].eigenvalues;
        assert!((eigs[0] - 1.0).abs() < 1e-12);
        assert!(eigs[1].abs() < 1e-12);
        for e in &spec.layers[0].eigenvalues {
            assert!(e.abs() < 1e-12);
        }
    }

    #[test]
    fn multiplicity_gives_one_bit_for_half_spin_layer() {
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).unwrap();
        let psi = pyramid_state(&pyr, 1, 0, 0);
        let report = entropy_pure(&psi, &pyr).unwrap();
        assert!((report.s_j - 2f64.ln()).abs() < 1e-12);
        assert!((report.s_k - 2f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn top_layer_vectors_have_zero_entropy() {
        let basis = SymBasis::new(4);
        let pyr = build_pyramid(&basis).unwrap();
        for r in 0..5 {
            for c in 0..5 {
                let psi = pyramid_state(&pyr, 0, r, c);
                let report = entropy_pure(&psi, &pyr).unwrap();
                assert!(report.s_j.abs() < 1e-12);
                assert!(report.s_k.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn max_entangled_product_state_reaches_n_ln2() {
        for n in [2u32, 3, 5] {
            let basis = SymBasis::new(n);
            let pyr = build_pyramid(&basis).unwrap();
            let inv = 1.0 / 2f64.sqrt();
            let psi = product_state(
                &basis,
                [C64::new(0.0, -inv), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(inv, 0.0)],
            )
            .unwrap();
            let report = entropy_pure(&psi, &pyr).unwrap();
            let expect = n as f64 * 2f64.ln();
            assert!((report.s_j - expect).abs() < 1e-9, "N={n}: {}", report.s_j);
            assert!((report.s_j - report.s_k).abs() < 1e-10);
        }
    }

    #[test]
    fn product_state_is_unentangled() {
        let basis = SymBasis::new(6);
        let pyr = build_pyramid(&basis).unwrap();
        let psi = initial_state(&basis, InitialStateKind::SuperpositionDown).unwrap();
        let report = entropy_pure(&psi, &pyr).unwrap();
        assert!(report.s_j.abs() < 1e-10);
        assert!(report.s_k.abs() < 1e-10);
    }

    #[test]
    fn mixed_projection_of_pure_state_matches_pure_blocks() {
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).unwrap();
        let inv = 1.0 / 2f64.sqrt();
        let psi = product_state(
            &basis,
            [C64::new(0.5, 0.0), C64::new(0.5, 0.0), C64::new(0.0, inv), C64::new(0.0, 0.0)],
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let p = project_pure(&psi, &pyr).unwrap();
        for dof in [Dof::J, Dof::K] {
            let pure_spec = blocks_pure(&p, dof).unwrap();
            let mixed = project_mixed(&rho, &pyr, dof).unwrap();
            let CoefficientPyramid::Mixed { blocks, .. } = &mixed else { unreachable!() };
            for (a, b) in pure_spec.layers.iter().zip(blocks) {
                for (x, y) in a.block.iter().zip(&b.m) {
                    assert!((x - y).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn maximally_mixed_blocks_are_scaled_identities() {
        let basis = SymBasis::new(4);
        let pyr = build_pyramid(&basis).unwrap();
        let rho = DensityMatrix::maximally_mixed(basis.clone());
        let dim = sym_dim(4) as f64;
        let p = project_mixed(&rho, &pyr, Dof::J).unwrap();
        let CoefficientPyramid::Mixed { blocks, .. } = &p else { unreachable!() };
        for b in blocks {
            let g = b.ell_doubled as usize + 1;
            for r in 0..g {
                for c in 0..g {
                    let expect = if r == c { g as f64 / dim } else { 0.0 };
                    assert!((b.m[r * g + c] - C64::new(expect, 0.0)).norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn mixed_report_of_pure_state() {
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).unwrap();
        let inv = 1.0 / 2f64.sqrt();
        let psi = product_state(
            &basis,
            [C64::new(0.0, -inv), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(inv, 0.0)],
        )
        .unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        let report = entropy_mixed(&rho, &pyr).unwrap();
        assert!(report.s_total.abs() < 1e-9);
        assert!((report.i_j_given_k - report.s_k).abs() < 1e-9);
        assert!((report.i_k_given_j - report.s_j).abs() < 1e-9);
    }

    #[test]
    fn asymmetric_mixture_has_different_marginals() {
        // Equal mixture of |3/2,1/2,1/2> and |3/2,1/2,-1/2>: J-marginal pure,
        // K-marginal an even two-state mixture.
        let basis = SymBasis::new(3);
        let pyr = build_pyramid(&basis).unwrap();
        let a = pyramid_state(&pyr, 0, 1, 1);
        let b = pyramid_state(&pyr, 0, 1, 2);
        let d = basis.len();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for psi in [&a, &b] {
            for j in 0..d {
                for i in 0..d {
                    data[j * d + i] += psi.amps()[i] * psi.amps()[j].conj() * 0.5;
                }
            }
        }
        let rho = DensityMatrix::new(basis, data).unwrap();
        let report = entropy_mixed(&rho, &pyr).unwrap();
        assert!(report.s_j.abs() < 1e-10);
        assert!((report.s_k - 2f64.ln()).abs() < 1e-10);
        assert!((report.s_total - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn negative_eigenvalue_handling() {
        let noise = spectrum_entropy([(1.0 + 1e-10, 0.0), (-5e-10, 0.0)].into_iter());
        assert!(noise.unwrap().abs() < 1e-9);
        let bad = spectrum_entropy([(1.0, 0.0), (-2e-9, 0.0)].into_iter());
        assert!(matches!(bad, Err(Error::NegativeEigenvalue { .. })));
    }

    #[test]
    fn expanded_spectrum_matches_block_entropy() {
        let basis = SymBasis::new(5);
        let pyr = build_pyramid(&basis).unwrap();
        let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
        // A deterministic spread over several sectors.
        for (i, a) in amps.iter_mut().enumerate() {
            *a = C64::new((1.3 * i as f64).sin(), (0.7 * i as f64).cos());
        }
        let norm = amps.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        amps.iter_mut().for_each(|v| *v /= norm);
        let psi = StateVector::new(basis, amps).unwrap();
        let spec = blocks_pure(&project_pure(&psi, &pyr).unwrap(), Dof::J).unwrap();
        let expanded = spec.expanded_spectrum().unwrap();
        let total: f64 = expanded.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        let shannon: f64 = -expanded
            .iter()
            .filter(|&&p| p > EIGENVALUE_FLOOR)
            .map(|&p| p * p.ln())
            .sum::<f64>();
        let s = entropy_from_blocks(&spec).unwrap();
        assert!((shannon - s).abs() < 1e-10);
    }
}
