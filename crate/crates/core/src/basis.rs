//! The permutation-symmetric occupation basis and states on it.
//!
//! A basis state `|a, b, c, d>` counts how many particles sit in each of the
//! four joint single-particle levels, ordered as
//!
//! | mode | first dof | second dof |
//! |------|-----------|------------|
//! | 0    | excited   | up         |
//! | 1    | excited   | down       |
//! | 2    | ground    | up         |
//! | 3    | ground    | down       |
//!
//! Half-integer quantum numbers are carried as doubled integers (`2 m_j`,
//! `2 m_k`, `2 l`) so that comparisons stay exact.

use std::collections::HashMap;
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Which collective degree of freedom: `J` is the first (internal) one, `K`
/// the second (momentum-like) one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Dof {
    J,
    K,
}

/// Occupation numbers of the four modes; the tuple `(a, b, c, d)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occupation(pub [u32; 4]);

impl Occupation {
    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// `2 m_j = a + b - c - d`.
    pub fn mj_doubled(&self) -> i64 {
        let [a, b, c, d] = self.0.map(i64::from);
        a + b - c - d
    }

    /// `2 m_k = a - b + c - d`.
    pub fn mk_doubled(&self) -> i64 {
        let [a, b, c, d] = self.0.map(i64::from);
        a - b + c - d
    }
}

/// Projection quantum numbers `(2 m_j, 2 m_k)` of an occupation state.
pub fn quantum_numbers(state: Occupation) -> (i64, i64) {
    (state.mj_doubled(), state.mk_doubled())
}

/// Dimension of the symmetric space, `(N + 1)(N + 2)(N + 3) / 6`.
pub fn sym_dim(n: u32) -> usize {
    let n = n as usize;
    (n + 1) * (n + 2) * (n + 3) / 6
}

/// The ordered symmetric basis for `N` particles.
///
/// States are enumerated in descending lexicographic order of `(a, b, c)`, so
/// `(N, 0, 0, 0)` always comes first. The ordering is part of the contract:
/// sparse operators and stored vectors index into it.
#[derive(Debug)]
pub struct SymBasis {
    n: u32,
    states: Vec<Occupation>,
}

impl SymBasis {
    pub fn new(n: u32) -> Arc<Self> {
        let mut states = Vec::with_capacity(sym_dim(n));
        for a in (0..=n).rev() {
            for b in (0..=n - a).rev() {
                for c in (0..=n - a - b).rev() {
                    states.push(Occupation([a, b, c, n - a - b - c]));
                }
            }
        }
        debug_assert_eq!(states.len(), sym_dim(n));
        Arc::new(SymBasis { n, states })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn state(&self, idx: usize) -> Occupation {
        self.states[idx]
    }

    pub fn states(&self) -> &[Occupation] {
        &self.states
    }

    /// Position of an occupation tuple, or `None` if it does not belong.
    pub fn index_of(&self, occ: &Occupation) -> Option<usize> {
        if occ.total() != self.n {
            return None;
        }
        // The list is sorted in descending order.
        self.states.binary_search_by(|probe| occ.cmp(probe)).ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, Occupation)> + '_ {
        self.states.iter().copied().enumerate()
    }
}

pub(crate) fn same_basis(a: &SymBasis, b: &SymBasis) -> bool {
    a.n == b.n
}

/// Groups basis indices by their `(2 m_j, 2 m_k)` quantum numbers.
///
/// Every `|l, m_j, m_k>` vector is supported on exactly one such sector, so
/// pyramid vectors are stored as dense coefficient arrays over a sector.
#[derive(Debug)]
pub struct SectorTable {
    ids: HashMap<(i64, i64), usize>,
    sectors: Vec<Vec<usize>>,
    /// For each basis index: (sector id, position inside the sector).
    positions: Vec<(usize, usize)>,
}

impl SectorTable {
    pub fn new(basis: &SymBasis) -> Self {
        let mut ids = HashMap::new();
        let mut sectors: Vec<Vec<usize>> = Vec::new();
        let mut positions = vec![(usize::MAX, usize::MAX); basis.len()];
        for (idx, occ) in basis.iter() {
            let key = quantum_numbers(occ);
            let sid = *ids.entry(key).or_insert_with(|| {
                sectors.push(Vec::new());
                sectors.len() - 1
            });
            positions[idx] = (sid, sectors[sid].len());
            sectors[sid].push(idx);
        }
        SectorTable { ids, sectors, positions }
    }

    pub fn sector_id(&self, mj2: i64, mk2: i64) -> Option<usize> {
        self.ids.get(&(mj2, mk2)).copied()
    }

    /// Basis indices of a sector, in basis order.
    pub fn indices(&self, sid: usize) -> &[usize] {
        &self.sectors[sid]
    }

    pub fn position(&self, basis_idx: usize) -> (usize, usize) {
        self.positions[basis_idx]
    }

    pub fn num_sectors(&self) -> usize {
        self.sectors.len()
    }
}

/// A normalized pure state over a [`SymBasis`].
#[derive(Clone, Debug)]
pub struct StateVector {
    basis: Arc<SymBasis>,
    amps: Vec<C64>,
}

impl StateVector {
    /// Wrap amplitudes, requiring unit norm within `1e-8`.
    pub fn new(basis: Arc<SymBasis>, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.len() {
            return Err(Error::DimensionMismatch(amps.len(), basis.len()));
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NormDeficit((norm - 1.0).abs()));
        }
        Ok(StateVector { basis, amps })
    }

    pub(crate) fn new_unchecked(basis: Arc<SymBasis>, amps: Vec<C64>) -> Self {
        StateVector { basis, amps }
    }

    /// One-hot state on a single occupation tuple.
    pub fn from_occupation(basis: Arc<SymBasis>, occ: Occupation) -> Result<Self> {
        let idx = basis
            .index_of(&occ)
            .ok_or_else(|| Error::InvalidParameter(format!("{occ:?} not in basis")))?;
        let mut amps = vec![C64::new(0.0, 0.0); basis.len()];
        amps[idx] = C64::new(1.0, 0.0);
        Ok(StateVector { basis, amps })
    }

    pub fn basis(&self) -> &Arc<SymBasis> {
        &self.basis
    }

    pub fn amps(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }
}

/// A density matrix over a [`SymBasis`], stored dense column-major.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    basis: Arc<SymBasis>,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Wrap a matrix, requiring hermiticity within `1e-10` and unit trace
    /// within `1e-8`.
    pub fn new(basis: Arc<SymBasis>, data: Vec<C64>) -> Result<Self> {
        let d = basis.len();
        if data.len() != d * d {
            return Err(Error::DimensionMismatch(data.len(), d * d));
        }
        let rho = DensityMatrix { basis, data };
        let herm = rho.hermiticity_residual();
        if herm > 1e-10 {
            return Err(Error::NotHermitian { residual: herm });
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-8 || tr.im.abs() > 1e-10 {
            return Err(Error::TraceDeficit((tr.re - 1.0).abs().max(tr.im.abs())));
        }
        Ok(rho)
    }

    pub(crate) fn new_unchecked(basis: Arc<SymBasis>, data: Vec<C64>) -> Self {
        DensityMatrix { basis, data }
    }

    pub fn from_pure(psi: &StateVector) -> Self {
        let d = psi.basis.len();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        for j in 0..d {
            let aj = psi.amps[j].conj();
            for i in 0..d {
                data[j * d + i] = psi.amps[i] * aj;
            }
        }
        DensityMatrix { basis: psi.basis.clone(), data }
    }

    /// Maximally mixed state `I / dim`.
    pub fn maximally_mixed(basis: Arc<SymBasis>) -> Self {
        let d = basis.len();
        let mut data = vec![C64::new(0.0, 0.0); d * d];
        let p = 1.0 / d as f64;
        for i in 0..d {
            data[i * d + i] = C64::new(p, 0.0);
        }
        DensityMatrix { basis, data }
    }

    pub fn basis(&self) -> &Arc<SymBasis> {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Column-major entries.
    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        self.data[j * self.basis.len() + i]
    }

    pub fn trace(&self) -> C64 {
        let d = self.basis.len();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    /// `Tr(rho^2)`, real for Hermitian input.
    pub fn purity(&self) -> f64 {
        let d = self.basis.len();
        let mut acc = 0.0;
        for j in 0..d {
            for i in 0..d {
                let v = self.data[j * d + i];
                acc += v.norm_sqr();
            }
        }
        acc
    }

    pub fn hermiticity_residual(&self) -> f64 {
        let d = self.basis.len();
        let mut res: f64 = 0.0;
        for j in 0..d {
            for i in 0..=j {
                let diff = self.data[j * d + i] - self.data[i * d + j].conj();
                res = res.max(diff.norm());
            }
        }
        res
    }

    /// Replace `rho` by `(rho + rho^dagger) / 2` in place.
    pub fn symmetrize(&mut self) {
        symmetrize_in_place(&mut self.data, self.basis.len());
    }
}

pub(crate) fn symmetrize_in_place(data: &mut [C64], d: usize) {
    for j in 0..d {
        for i in 0..j {
            let x = data[j * d + i];
            let y = data[i * d + j];
            let avg = (x + y.conj()) * 0.5;
            data[j * d + i] = avg;
            data[i * d + j] = avg.conj();
        }
        let diag = &mut data[j * d + j];
        *diag = C64::new(diag.re, 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_formula() {
        assert_eq!(sym_dim(2), 10);
        assert_eq!(sym_dim(0), 1);
        assert_eq!(sym_dim(20), 1771);
    }

    #[test]
    fn enumeration_small() {
        let b1 = SymBasis::new(1);
        let expect = [
            Occupation([1, 0, 0, 0]),
            Occupation([0, 1, 0, 0]),
            Occupation([0, 0, 1, 0]),
            Occupation([0, 0, 0, 1]),
        ];
        assert_eq!(b1.states(), &expect);
        assert_eq!(SymBasis::new(2).len(), 10);
        assert_eq!(SymBasis::new(3).len(), 20);
    }

    #[test]
    fn counting_matches_formula_up_to_30() {
        for n in 0..=30 {
            assert_eq!(SymBasis::new(n).len(), sym_dim(n));
        }
    }

    #[test]
    fn index_round_trip() {
        for n in [0u32, 1, 2, 5, 9] {
            let basis = SymBasis::new(n);
            for (i, occ) in basis.iter() {
                assert_eq!(basis.index_of(&occ), Some(i));
            }
        }
        let basis = SymBasis::new(3);
        assert_eq!(basis.index_of(&Occupation([1, 1, 1, 1])), None);
    }

    #[test]
    fn quantum_number_examples() {
        let n = 6;
        assert_eq!(quantum_numbers(Occupation([n, 0, 0, 0])), (n as i64, n as i64));
        assert_eq!(quantum_numbers(Occupation([0, 0, 0, n])), (-(n as i64), -(n as i64)));
        assert_eq!(quantum_numbers(Occupation([2, 1, 0, 1])), (2, 0));
    }

    #[test]
    fn quantum_number_multiset_matches_layer_counting() {
        for n in 1..=9u32 {
            let basis = SymBasis::new(n);
            let mut from_basis: Vec<(i64, i64)> =
                basis.iter().map(|(_, occ)| quantum_numbers(occ)).collect();
            let mut from_layers = Vec::new();
            let mut ell2 = n as i64;
            while ell2 >= 0 {
                let mut mj2 = -ell2;
                while mj2 <= ell2 {
                    let mut mk2 = -ell2;
                    while mk2 <= ell2 {
                        from_layers.push((mj2, mk2));
                        mk2 += 2;
                    }
                    mj2 += 2;
                }
                ell2 -= 2;
            }
            from_basis.sort_unstable();
            from_layers.sort_unstable();
            assert_eq!(from_basis, from_layers);
        }
    }

    #[test]
    fn sector_table_partitions_basis() {
        let basis = SymBasis::new(5);
        let table = SectorTable::new(&basis);
        let total: usize = (0..table.num_sectors()).map(|s| table.indices(s).len()).sum();
        assert_eq!(total, basis.len());
        for (idx, occ) in basis.iter() {
            let (sid, pos) = table.position(idx);
            assert_eq!(table.indices(sid)[pos], idx);
            let (mj2, mk2) = quantum_numbers(occ);
            assert_eq!(table.sector_id(mj2, mk2), Some(sid));
        }
    }

    #[test]
    fn state_vector_norm_enforced() {
        let basis = SymBasis::new(1);
        let bad = vec![C64::new(0.5, 0.0); 4];
        assert!(StateVector::new(basis.clone(), bad).is_ok());
        let worse = vec![C64::new(0.6, 0.0); 4];
        assert!(matches!(
            StateVector::new(basis, worse),
            Err(Error::NormDeficit(_))
        ));
    }

    #[test]
    fn density_matrix_checks() {
        let basis = SymBasis::new(1);
        let psi = StateVector::from_occupation(basis.clone(), Occupation([0, 0, 0, 1])).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        assert!((rho.trace().re - 1.0).abs() < 1e-15);
        assert!((rho.purity() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(basis);
        assert!((mixed.purity() - 0.25).abs() < 1e-15);
    }
}
