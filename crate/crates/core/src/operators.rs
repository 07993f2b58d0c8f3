//! Collective one-body operators on the symmetric basis.
//!
//! A collective operator `G_{mu nu} = sum_j sigma_mu^(j) (x) s_nu^(j)` acts on
//! occupation states through bosonic hopping: the 4x4 single-particle matrix
//! element `<a|sigma_mu (x) s_nu|b>` moves one particle from mode `b` to mode
//! `a` with amplitude `sqrt(n_b (n_a + 1))`, while diagonal elements
//! contribute `n_a`. This keeps every one-body generator at O(dim) nonzeros
//! and never touches the `4^N` space.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_complex::Complex64 as C64;

use crate::basis::{same_basis, Dof, StateVector, SymBasis};
use crate::error::{Error, Result};
use crate::sparse::SpMat;

/// Single-particle slot label; `Plus`/`Minus` are the ladder entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    I,
    X,
    Y,
    Z,
    Plus,
    Minus,
}

impl Slot {
    pub const ALL: [Slot; 6] = [Slot::I, Slot::X, Slot::Y, Slot::Z, Slot::Plus, Slot::Minus];

    pub const HERMITIAN: [Slot; 4] = [Slot::I, Slot::X, Slot::Y, Slot::Z];

    /// 2x2 matrix in the basis (excited, ground) or (up, down).
    pub fn matrix2(self) -> [[C64; 2]; 2] {
        let o = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            Slot::I => [[one, o], [o, one]],
            Slot::X => [[o, one], [one, o]],
            Slot::Y => [[o, -i], [i, o]],
            Slot::Z => [[one, o], [o, -one]],
            Slot::Plus => [[o, one], [o, o]],
            Slot::Minus => [[o, o], [one, o]],
        }
    }
}

/// `<a|sigma_mu (x) s_nu|b>` over the four modes, as a dense 4x4 array.
pub fn single_particle_matrix(mu: Slot, nu: Slot) -> [[C64; 4]; 4] {
    let m = mu.matrix2();
    let s = nu.matrix2();
    let mut out = [[C64::new(0.0, 0.0); 4]; 4];
    for (ja, row_m) in m.iter().enumerate() {
        for (jb, mv) in row_m.iter().enumerate() {
            for (ka, row_s) in s.iter().enumerate() {
                for (kb, sv) in row_s.iter().enumerate() {
                    out[2 * ja + ka][2 * jb + kb] = mv * sv;
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpLabel {
    Generator(Slot, Slot),
    Composite,
}

/// A sparse operator bound to a [`SymBasis`].
#[derive(Clone, Debug)]
pub struct CollectiveOperator {
    basis: Arc<SymBasis>,
    label: OpLabel,
    matrix: SpMat,
}

impl CollectiveOperator {
    pub fn basis(&self) -> &Arc<SymBasis> {
        &self.basis
    }

    pub fn label(&self) -> OpLabel {
        self.label
    }

    pub fn matrix(&self) -> &SpMat {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn from_matrix(basis: Arc<SymBasis>, matrix: SpMat) -> Result<Self> {
        if matrix.dim() != basis.len() {
            return Err(Error::DimensionMismatch(matrix.dim(), basis.len()));
        }
        Ok(CollectiveOperator { basis, label: OpLabel::Composite, matrix })
    }

    pub fn adjoint(&self) -> Self {
        let label = match self.label {
            OpLabel::Generator(mu, nu) => OpLabel::Generator(flip(mu), flip(nu)),
            OpLabel::Composite => OpLabel::Composite,
        };
        CollectiveOperator { basis: self.basis.clone(), label, matrix: self.matrix.adjoint() }
    }

    pub fn scaled(&self, c: C64) -> Self {
        CollectiveOperator {
            basis: self.basis.clone(),
            label: OpLabel::Composite,
            matrix: self.matrix.scaled(c),
        }
    }

    /// `(A + A^dagger) / 2`, used to make algebraically Hermitian products
    /// Hermitian to the last bit.
    pub fn hermitized(&self) -> Self {
        CollectiveOperator {
            basis: self.basis.clone(),
            label: self.label,
            matrix: self.matrix.hermitized(),
        }
    }

    pub fn apply(&self, psi: &StateVector) -> Vec<C64> {
        self.matrix.apply_vec(psi.amps())
    }

    pub fn expectation(&self, psi: &StateVector) -> C64 {
        self.matrix.expectation(psi.amps())
    }
}

fn flip(s: Slot) -> Slot {
    match s {
        Slot::Plus => Slot::Minus,
        Slot::Minus => Slot::Plus,
        other => other,
    }
}

/// Build `G_{mu nu}` on the given basis.
pub fn collective_generator(basis: &Arc<SymBasis>, mu: Slot, nu: Slot) -> CollectiveOperator {
    let m = single_particle_matrix(mu, nu);
    let mut trip = Vec::new();
    for (col, occ) in basis.iter() {
        for (a, row_m) in m.iter().enumerate() {
            for (b, &amp) in row_m.iter().enumerate() {
                if amp.re == 0.0 && amp.im == 0.0 {
                    continue;
                }
                if a == b {
                    let w = occ.0[a] as f64;
                    if w != 0.0 {
                        trip.push((col, col, amp * w));
                    }
                } else if occ.0[b] > 0 {
                    let mut target = occ;
                    target.0[b] -= 1;
                    target.0[a] += 1;
                    let row = basis.index_of(&target).expect("hop stays in basis");
                    let w = ((occ.0[b] as f64) * (occ.0[a] as f64 + 1.0)).sqrt();
                    trip.push((row, col, amp * w));
                }
            }
        }
    }
    CollectiveOperator {
        basis: basis.clone(),
        label: OpLabel::Generator(mu, nu),
        matrix: SpMat::from_triplets(basis.len(), trip),
    }
}

/// The four collective ladder operators `(J+, J-, K+, K-)`.
pub fn ladder_ops(
    basis: &Arc<SymBasis>,
) -> (CollectiveOperator, CollectiveOperator, CollectiveOperator, CollectiveOperator) {
    (
        collective_generator(basis, Slot::Plus, Slot::I),
        collective_generator(basis, Slot::Minus, Slot::I),
        collective_generator(basis, Slot::I, Slot::Plus),
        collective_generator(basis, Slot::I, Slot::Minus),
    )
}

/// The quadratic Casimir `J^2` or `K^2`, as `sum_mu (G_{mu I} / 2)^2` over
/// `mu = x, y, z` (slots swapped for `K`).
pub fn casimir(basis: &Arc<SymBasis>, which: Dof) -> CollectiveOperator {
    let quarter = C64::new(0.25, 0.0);
    let mut acc = SpMat::zeros(basis.len());
    for mu in [Slot::X, Slot::Y, Slot::Z] {
        let g = match which {
            Dof::J => collective_generator(basis, mu, Slot::I),
            Dof::K => collective_generator(basis, Slot::I, mu),
        };
        let sq = g.matrix.matmul(&g.matrix).expect("same dim");
        acc = acc.add(&sq.scaled(quarter)).expect("same dim");
    }
    CollectiveOperator { basis: basis.clone(), label: OpLabel::Composite, matrix: acc.hermitized() }
}

/// Linear combination `sum_i c_i A_i`.
pub fn compose_sum(terms: &[(C64, &CollectiveOperator)]) -> Result<CollectiveOperator> {
    let first = terms
        .first()
        .ok_or_else(|| Error::InvalidParameter("empty operator sum".into()))?;
    let basis = first.1.basis.clone();
    for (_, op) in terms {
        if !same_basis(&op.basis, &basis) {
            return Err(Error::BasisMismatch);
        }
    }
    let mats: Vec<(C64, &SpMat)> = terms.iter().map(|(c, op)| (*c, &op.matrix)).collect();
    Ok(CollectiveOperator {
        basis,
        label: OpLabel::Composite,
        matrix: SpMat::linear_combination(&mats)?,
    })
}

/// Operator product `A B`.
pub fn compose_product(
    a: &CollectiveOperator,
    b: &CollectiveOperator,
) -> Result<CollectiveOperator> {
    if !same_basis(&a.basis, &b.basis) {
        return Err(Error::BasisMismatch);
    }
    Ok(CollectiveOperator {
        basis: a.basis.clone(),
        label: OpLabel::Composite,
        matrix: a.matrix.matmul(&b.matrix)?,
    })
}

/// Per-basis cache of the 36 generators; writes are serialized, reads share
/// the built operators.
pub struct OperatorCache {
    basis: Arc<SymBasis>,
    map: Mutex<HashMap<(Slot, Slot), Arc<CollectiveOperator>>>,
}

impl OperatorCache {
    pub fn new(basis: Arc<SymBasis>) -> Self {
        OperatorCache { basis, map: Mutex::new(HashMap::new()) }
    }

    pub fn basis(&self) -> &Arc<SymBasis> {
        &self.basis
    }

    pub fn generator(&self, mu: Slot, nu: Slot) -> Arc<CollectiveOperator> {
        let mut map = self.map.lock().expect("operator cache poisoned");
        map.entry((mu, nu))
            .or_insert_with(|| Arc::new(collective_generator(&self.basis, mu, nu)))
            .clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::Occupation;
    use crate::sparse::commutator_residual;

    fn top_state(basis: &Arc<SymBasis>) -> StateVector {
        let n = basis.n();
        StateVector::from_occupation(basis.clone(), Occupation([n, 0, 0, 0])).unwrap()
    }

    #[test]
    fn g_zi_counts_excitations() {
        let basis = SymBasis::new(5);
        let g = collective_generator(&basis, Slot::Z, Slot::I);
        let top = top_state(&basis);
        let out = g.apply(&top);
        for (i, v) in out.iter().enumerate() {
            let expect = if i == 0 { 5.0 } else { 0.0 };
            assert!((v - C64::new(expect, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn g_ii_is_n_times_identity() {
        let basis = SymBasis::new(4);
        let g = collective_generator(&basis, Slot::I, Slot::I);
        assert_eq!(g.matrix().nnz(), basis.len());
        for i in 0..basis.len() {
            assert_eq!(g.matrix().entry(i, i), C64::new(4.0, 0.0));
        }
    }

    #[test]
    fn k_minus_hop_amplitude() {
        let basis = SymBasis::new(2);
        let km = collective_generator(&basis, Slot::I, Slot::Minus);
        let from = basis.index_of(&Occupation([2, 0, 0, 0])).unwrap();
        let to = basis.index_of(&Occupation([1, 1, 0, 0])).unwrap();
        assert!((km.matrix().entry(to, from) - C64::new(2f64.sqrt(), 0.0)).norm() < 1e-15);
    }

    #[test]
    fn hermitian_labels_are_exactly_hermitian() {
        let basis = SymBasis::new(3);
        for mu in Slot::HERMITIAN {
            for nu in Slot::HERMITIAN {
                let g = collective_generator(&basis, mu, nu);
                assert_eq!(
                    g.matrix().hermiticity_residual(),
                    0.0,
                    "G_({mu:?},{nu:?}) not Hermitian"
                );
            }
        }
    }

    #[test]
    fn single_particle_generators_are_traceless() {
        for mu in Slot::HERMITIAN {
            for nu in Slot::HERMITIAN {
                if mu == Slot::I && nu == Slot::I {
                    continue;
                }
                let m = single_particle_matrix(mu, nu);
                let trace: C64 = (0..4).map(|i| m[i][i]).sum();
                assert_eq!(trace, C64::new(0.0, 0.0), "({mu:?},{nu:?})");
            }
        }
    }

    #[test]
    fn ladder_adjoint_pairing() {
        let basis = SymBasis::new(3);
        for nu in Slot::ALL {
            let plus = collective_generator(&basis, Slot::Plus, nu);
            let minus = collective_generator(&basis, Slot::Minus, flip(nu));
            assert_eq!(plus.matrix().adjoint(), minus.matrix().clone());
        }
    }

    #[test]
    fn su2_commutators() {
        let basis = SymBasis::new(4);
        let jz = collective_generator(&basis, Slot::Z, Slot::I).scaled(C64::new(0.5, 0.0));
        let (jp, jm, _, _) = ladder_ops(&basis);
        // [Jz, J+] = +J+
        let lhs = jz.matrix().matmul(jp.matrix()).unwrap();
        let rhs = jp.matrix().matmul(jz.matrix()).unwrap();
        let diff = lhs.sub(&rhs).unwrap().sub(jp.matrix()).unwrap();
        assert!(diff.max_abs() < 1e-13);
        // [Jz, J-] = -J-
        let lhs = jz.matrix().matmul(jm.matrix()).unwrap();
        let rhs = jm.matrix().matmul(jz.matrix()).unwrap();
        let diff = lhs.sub(&rhs).unwrap().add(jm.matrix()).unwrap();
        assert!(diff.max_abs() < 1e-13);
    }

    #[test]
    fn j_minus_norm_on_top_state() {
        for n in [1u32, 3, 7] {
            let basis = SymBasis::new(n);
            let jm = collective_generator(&basis, Slot::Minus, Slot::I);
            let out = jm.apply(&top_state(&basis));
            let norm = out.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
            assert!((norm - (n as f64).sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn k_minus_annihilates_lowest_weight() {
        let basis = SymBasis::new(4);
        let km = collective_generator(&basis, Slot::I, Slot::Minus);
        let bottom =
            StateVector::from_occupation(basis.clone(), Occupation([0, 4, 0, 0])).unwrap();
        let out = km.apply(&bottom);
        assert!(out.iter().all(|v| v.norm() < 1e-15));
    }

    #[test]
    fn casimir_on_top_state() {
        let basis = SymBasis::new(6);
        let j2 = casimir(&basis, Dof::J);
        let ell = 3.0;
        let top = top_state(&basis);
        let out = j2.apply(&top);
        assert!((out[0] - C64::new(ell * (ell + 1.0), 0.0)).norm() < 1e-12);
        assert!(out.iter().skip(1).all(|v| v.norm() < 1e-12));
    }

    #[test]
    fn casimirs_commute() {
        let basis = SymBasis::new(3);
        let j2 = casimir(&basis, Dof::J);
        let k2 = casimir(&basis, Dof::K);
        assert!(commutator_residual(j2.matrix(), k2.matrix()).unwrap() < 1e-12);
    }

    #[test]
    fn casimir_spectrum_n3() {
        let basis = SymBasis::new(3);
        let j2 = casimir(&basis, Dof::J);
        let dense = nalgebra::DMatrix::from_column_slice(
            basis.len(),
            basis.len(),
            &j2.matrix().to_dense(),
        );
        let mut eigs: Vec<f64> = dense.symmetric_eigen().eigenvalues.iter().copied().collect();
        eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for e in &eigs[..4] {
            assert!((e - 0.75).abs() < 1e-10);
        }
        for e in &eigs[4..] {
            assert!((e - 3.75).abs() < 1e-10);
        }
    }

    #[test]
    fn compose_zero_combination() {
        let basis = SymBasis::new(2);
        let g = collective_generator(&basis, Slot::X, Slot::X);
        let zero = compose_sum(&[(C64::new(0.0, 0.0), &g)]).unwrap();
        assert_eq!(zero.matrix().nnz(), 0);
    }

    #[test]
    fn cache_returns_shared_instances() {
        let basis = SymBasis::new(2);
        let cache = OperatorCache::new(basis);
        let a = cache.generator(Slot::X, Slot::Y);
        let b = cache.generator(Slot::X, Slot::Y);
        assert!(Arc::ptr_eq(&a, &b));
    }
}
