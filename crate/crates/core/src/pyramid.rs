//! The orthonormal `|l, m_j, m_k>` ladder basis, built layer by layer.
//!
//! Layer `l` is a `(2l+1) x (2l+1)` grid of unit vectors sharing the Casimir
//! eigenvalue `l(l+1)` for both degrees of freedom. The top layer starts from
//! the corner `|N/2, N/2, N/2> = |N, 0, 0, 0>`; each lower corner is the unit
//! vector in the `m_j = m_k = l` sector orthogonal to all higher-layer
//! vectors at that grid position, found by Gram-Schmidt. Rows advance with
//! `J-`, columns with `K-`, and every computed ladder norm is checked against
//! the analytic `sqrt((l + m)(l - m + 1))`.
//!
//! Because `J_z` and `K_z` are diagonal on occupation states, each grid
//! vector lives entirely inside one `(m_j, m_k)` sector and is stored as a
//! dense coefficient array over that sector only.

use std::io::{Read, Write};
use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::basis::{SectorTable, SymBasis};
use crate::error::{Error, Result};
use crate::operators::{collective_generator, Slot};
use crate::sparse::SpMat;

/// Exact multiplicity `d^l_N = N! (2l+1) / ((N/2 + l + 1)! (N/2 - l)!)`.
///
/// `ell_doubled` is `2l`; it must not exceed `N` and must share its parity.
pub fn multiplicity(n: u32, ell_doubled: u32) -> Result<u128> {
    check_ell(n, ell_doubled)?;
    let k = ((n - ell_doubled) / 2) as u128; // number of singlet pairs
    let n_u = n as u128;
    // C(N, k), exact at every step.
    let mut binom: u128 = 1;
    for i in 1..=k {
        binom = binom
            .checked_mul(n_u - k + i)
            .ok_or(Error::MultiplicityOverflow(n))?
            / i;
    }
    let denom = (n as u128 + ell_doubled as u128) / 2 + 1;
    let num = binom
        .checked_mul(ell_doubled as u128 + 1)
        .ok_or(Error::MultiplicityOverflow(n))?;
    debug_assert_eq!(num % denom, 0);
    Ok(num / denom)
}

/// `ln d^l_N`, valid for any `N` where the exact value may overflow.
pub fn ln_multiplicity(n: u32, ell_doubled: u32) -> Result<f64> {
    check_ell(n, ell_doubled)?;
    let ln_fact = |m: u32| -> f64 { (2..=m as u64).map(|x| (x as f64).ln()).sum() };
    Ok(((ell_doubled + 1) as f64).ln() + ln_fact(n)
        - ln_fact((n + ell_doubled) / 2 + 1)
        - ln_fact((n - ell_doubled) / 2))
}

fn check_ell(n: u32, ell_doubled: u32) -> Result<()> {
    if ell_doubled > n || !(n - ell_doubled).is_multiple_of(2) {
        return Err(Error::InvalidQuantumNumber(format!(
            "2l = {ell_doubled} invalid for N = {n}"
        )));
    }
    Ok(())
}

/// One `l` layer: the grid of sector-coefficient vectors plus bookkeeping.
#[derive(Debug)]
pub struct PyramidLayer {
    ell_doubled: u32,
    multiplicity: Option<u128>,
    ln_multiplicity: f64,
    /// Grid side, `2l + 1`.
    grid: usize,
    /// Row-major: slot `(r, c)` holds `m_j = l - r`, `m_k = l - c`.
    vectors: Vec<Vec<C64>>,
    /// Cumulative log of the analytic ladder norms along the build path.
    ln_norms: Vec<f64>,
}

impl PyramidLayer {
    pub fn ell_doubled(&self) -> u32 {
        self.ell_doubled
    }

    /// Exact `d^l_N` when it fits in `u128`.
    pub fn multiplicity(&self) -> Option<u128> {
        self.multiplicity
    }

    pub fn ln_multiplicity(&self) -> f64 {
        self.ln_multiplicity
    }

    /// Grid side `2l + 1`.
    pub fn grid(&self) -> usize {
        self.grid
    }

    /// Sector coefficients of the vector at grid slot `(r, c)`.
    pub fn vector(&self, r: usize, c: usize) -> &[C64] {
        &self.vectors[r * self.grid + c]
    }

    pub fn ln_norm(&self, r: usize, c: usize) -> f64 {
        self.ln_norms[r * self.grid + c]
    }

    /// Doubled projections `(2 m_j, 2 m_k)` at grid slot `(r, c)`.
    pub fn projections(&self, r: usize, c: usize) -> (i64, i64) {
        let e = self.ell_doubled as i64;
        (e - 2 * r as i64, e - 2 * c as i64)
    }
}

/// The full pyramid over a basis.
#[derive(Debug)]
pub struct PyramidBasis {
    basis: Arc<SymBasis>,
    sectors: SectorTable,
    layers: Vec<PyramidLayer>,
}

impl PyramidBasis {
    pub fn basis(&self) -> &Arc<SymBasis> {
        &self.basis
    }

    /// Layers in descending `l`, the top (`l = N/2`) first.
    pub fn layers(&self) -> &[PyramidLayer] {
        &self.layers
    }

    pub fn sector_table(&self) -> &SectorTable {
        &self.sectors
    }

    /// Basis indices the vector at `(layer, r, c)` is supported on.
    pub fn slot_indices(&self, layer: &PyramidLayer, r: usize, c: usize) -> &[usize] {
        let (mj2, mk2) = layer.projections(r, c);
        let sid = self.sectors.sector_id(mj2, mk2).expect("sector exists");
        self.sectors.indices(sid)
    }

    /// `<l, m_j, m_k | amps>` for the vector at `(layer, r, c)`.
    pub fn project(&self, layer: &PyramidLayer, r: usize, c: usize, amps: &[C64]) -> C64 {
        let idx = self.slot_indices(layer, r, c);
        let coeffs = layer.vector(r, c);
        let mut acc = C64::new(0.0, 0.0);
        for (&i, v) in idx.iter().zip(coeffs) {
            acc += v.conj() * amps[i];
        }
        acc
    }

    /// Scatter the vector at `(layer, r, c)` into a dense basis-length array.
    pub fn vector_dense(&self, layer: &PyramidLayer, r: usize, c: usize) -> Vec<C64> {
        let mut out = vec![C64::new(0.0, 0.0); self.basis.len()];
        for (&i, v) in self.slot_indices(layer, r, c).iter().zip(layer.vector(r, c)) {
            out[i] = *v;
        }
        out
    }

    pub fn num_vectors(&self) -> usize {
        self.layers.iter().map(|l| l.grid * l.grid).sum()
    }
}

/// Doubled-integer ladder norm: lowering from projection `m2/2` on a layer
/// with `2l = ell2` has norm `sqrt((l + m)(l - m + 1))`.
fn ladder_norm(ell2: u32, m2: i64) -> f64 {
    let e = ell2 as i64;
    let a = (e + m2) / 2;
    let b = (e - m2) / 2 + 1;
    ((a * b) as f64).sqrt()
}

struct LadderApplier {
    op: SpMat,
    scratch: Vec<C64>,
}

impl LadderApplier {
    fn new(op: SpMat) -> Self {
        let dim = op.dim();
        LadderApplier { op, scratch: vec![C64::new(0.0, 0.0); dim] }
    }

    /// Apply to a sector-supported vector, landing in the destination sector.
    fn apply(&mut self, src_idx: &[usize], src: &[C64], dst_idx: &[usize]) -> Vec<C64> {
        for (&i, v) in src_idx.iter().zip(src) {
            self.scratch[i] = *v;
        }
        let mut out = Vec::with_capacity(dst_idx.len());
        for &row in dst_idx {
            let (cols, vals) = self.op.row(row);
            let mut acc = C64::new(0.0, 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * self.scratch[c];
            }
            out.push(acc);
        }
        for &i in src_idx {
            self.scratch[i] = C64::new(0.0, 0.0);
        }
        out
    }
}

fn normalize_checked(vec: &mut [C64], analytic: f64) -> Result<()> {
    let norm = vec.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    if (norm - analytic).abs() > 1e-10 * analytic.max(1.0) {
        return Err(Error::LadderNormMismatch { computed: norm, analytic });
    }
    let inv = 1.0 / norm;
    for v in vec.iter_mut() {
        *v *= inv;
    }
    Ok(())
}

/// Build the pyramid for a basis.
pub fn build_pyramid(basis: &Arc<SymBasis>) -> Result<PyramidBasis> {
    let n = basis.n();
    let sectors = SectorTable::new(basis);
    let mut jm = LadderApplier::new(collective_generator(basis, Slot::Minus, Slot::I).matrix().clone());
    let mut km = LadderApplier::new(collective_generator(basis, Slot::I, Slot::Minus).matrix().clone());
    let eigens = SectorEigens::new(basis, &sectors);

    let mut layers: Vec<PyramidLayer> = Vec::new();
    let mut ell2 = n as i64;
    while ell2 >= 0 {
        let e2 = ell2 as u32;
        let grid = e2 as usize + 1; // 2l + 1
        let corner_sid = sectors.sector_id(ell2, ell2).expect("corner sector exists");
        let corner_idx = sectors.indices(corner_sid);

        let corner = if e2 == n {
            vec![C64::new(1.0, 0.0)]
        } else {
            let priors: Vec<&[C64]> = layers
                .iter()
                .map(|layer| {
                    let r = ((layer.ell_doubled as i64 - ell2) / 2) as usize;
                    layer.vector(r, r)
                })
                .collect();
            let mut seed = gram_schmidt_corner(corner_idx.len(), &priors)?;
            eigens.purify(corner_sid, ell2, &mut seed)?;
            // Purification may rotate by a rounding-level phase; restore the
            // first-nonzero-positive convention.
            if let Some(first) = seed.iter().find(|v| v.norm() > 1e-12) {
                let rot = first.conj() / first.norm();
                for v in seed.iter_mut() {
                    *v *= rot;
                }
            }
            seed
        };

        let mut vectors: Vec<Vec<C64>> = vec![Vec::new(); grid * grid];
        let mut ln_norms = vec![0.0f64; grid * grid];
        vectors[0] = corner;

        for r in 0..grid {
            if r > 0 {
                // Row start: lower m_j from the slot above.
                let mj2_src = ell2 - 2 * (r as i64 - 1);
                let src_sid = sectors.sector_id(mj2_src, ell2).expect("sector");
                let dst_sid = sectors.sector_id(mj2_src - 2, ell2).expect("sector");
                let mut v = jm.apply(
                    sectors.indices(src_sid),
                    &vectors[(r - 1) * grid],
                    sectors.indices(dst_sid),
                );
                let analytic = ladder_norm(e2, mj2_src);
                normalize_checked(&mut v, analytic)?;
                eigens.purify(dst_sid, ell2, &mut v)?;
                vectors[r * grid] = v;
                ln_norms[r * grid] = ln_norms[(r - 1) * grid] + analytic.ln();
            }
            for c in 1..grid {
                let mj2 = ell2 - 2 * r as i64;
                let mk2_src = ell2 - 2 * (c as i64 - 1);
                let src_sid = sectors.sector_id(mj2, mk2_src).expect("sector");
                let dst_sid = sectors.sector_id(mj2, mk2_src - 2).expect("sector");
                let mut v = km.apply(
                    sectors.indices(src_sid),
                    &vectors[r * grid + c - 1],
                    sectors.indices(dst_sid),
                );
                let analytic = ladder_norm(e2, mk2_src);
                normalize_checked(&mut v, analytic)?;
                eigens.purify(dst_sid, ell2, &mut v)?;
                vectors[r * grid + c] = v;
                ln_norms[r * grid + c] = ln_norms[r * grid + c - 1] + analytic.ln();
            }
        }

        layers.push(PyramidLayer {
            ell_doubled: e2,
            multiplicity: multiplicity(n, e2).ok(),
            ln_multiplicity: ln_multiplicity(n, e2)?,
            grid,
            vectors,
            ln_norms,
        });
        ell2 -= 2;
    }

    Ok(PyramidBasis { basis: basis.clone(), sectors, layers })
}

/// Per-sector eigendirections of the restricted Casimir `J^2`.
///
/// Every sector holds exactly one copy of each layer `l >= max(|m_j|, |m_k|)`
/// with well-separated eigenvalues `l(l+1)`, so the eigenvectors pin the
/// layer vectors to machine precision. Snapping each ladder result onto its
/// eigendirection (keeping the ladder-determined phase) stops cross-irrep
/// rounding noise from being amplified along long lowering chains, where the
/// norm ratio between irreps compounds combinatorially.
struct SectorEigens {
    /// For each sector: eigenvectors as columns, ascending `l`.
    vectors: Vec<nalgebra::DMatrix<C64>>,
    /// Smallest doubled `l` of each sector.
    ell2_min: Vec<i64>,
}

impl SectorEigens {
    fn new(basis: &Arc<SymBasis>, sectors: &SectorTable) -> Self {
        let j2 = crate::operators::casimir(basis, crate::basis::Dof::J);
        let mat = j2.matrix();
        let mut vectors = Vec::with_capacity(sectors.num_sectors());
        let mut ell2_min = Vec::with_capacity(sectors.num_sectors());
        for sid in 0..sectors.num_sectors() {
            let idx = sectors.indices(sid);
            let s = idx.len();
            let restricted = nalgebra::DMatrix::from_fn(s, s, |r, c| mat.entry(idx[r], idx[c]));
            let eig = restricted.symmetric_eigen();
            let mut order: Vec<usize> = (0..s).collect();
            order.sort_by(|&a, &b| {
                eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).expect("finite")
            });
            let mut sorted = nalgebra::DMatrix::from_element(s, s, C64::new(0.0, 0.0));
            for (pos, &src) in order.iter().enumerate() {
                sorted.column_mut(pos).copy_from(&eig.eigenvectors.column(src));
            }
            // l(l+1) of the lowest eigenvalue fixes the sector's l range.
            let lam = eig.eigenvalues[order[0]].max(0.0);
            let ell = 0.5 * ((1.0 + 4.0 * lam).sqrt() - 1.0);
            vectors.push(sorted);
            ell2_min.push((2.0 * ell).round() as i64);
        }
        SectorEigens { vectors, ell2_min }
    }

    /// Replace `v` by the sector eigendirection for layer `ell2`, keeping the
    /// phase and normalization the ladder produced.
    fn purify(&self, sid: usize, ell2: i64, v: &mut [C64]) -> Result<()> {
        let col = (ell2 - self.ell2_min[sid]) / 2;
        let dir = self.vectors[sid].column(col as usize);
        let overlap: C64 = dir.iter().zip(v.iter()).map(|(d, x)| d.conj() * x).sum();
        let mag = overlap.norm();
        if !(0.99..=1.01).contains(&mag) {
            return Err(Error::LadderNormMismatch { computed: mag, analytic: 1.0 });
        }
        let phase = overlap / mag;
        for (x, d) in v.iter_mut().zip(dir.iter()) {
            *x = d * phase;
        }
        Ok(())
    }
}

/// Unit vector in an `s`-dimensional sector orthogonal to all `priors`
/// (themselves orthonormal), with the first nonzero coefficient made real
/// and positive. Classical Gram-Schmidt, run twice.
fn gram_schmidt_corner(s: usize, priors: &[&[C64]]) -> Result<Vec<C64>> {
    let orthogonalize = |w: &mut Vec<C64>| {
        for _ in 0..2 {
            for u in priors {
                let mut ov = C64::new(0.0, 0.0);
                for (uv, wv) in u.iter().zip(w.iter()) {
                    ov += uv.conj() * *wv;
                }
                for (uv, wv) in u.iter().zip(w.iter_mut()) {
                    *wv -= ov * uv;
                }
            }
        }
    };

    // The complement is one-dimensional, so the best unit-vector seed has
    // residual norm at least 1/sqrt(s); pick it deterministically.
    let mut best: Option<(f64, usize)> = None;
    for cand in 0..s {
        let mut w = vec![C64::new(0.0, 0.0); s];
        w[cand] = C64::new(1.0, 0.0);
        orthogonalize(&mut w);
        let norm_sqr: f64 = w.iter().map(|v| v.norm_sqr()).sum();
        if best.is_none_or(|(bn, _)| norm_sqr > bn) {
            best = Some((norm_sqr, cand));
        }
    }
    let (best_norm_sqr, cand) = best.ok_or(Error::GramSchmidtBreakdown(0.0))?;
    if best_norm_sqr.sqrt() < 1e-8 {
        return Err(Error::GramSchmidtBreakdown(best_norm_sqr.sqrt()));
    }

    let mut w = vec![C64::new(0.0, 0.0); s];
    w[cand] = C64::new(1.0, 0.0);
    orthogonalize(&mut w);
    let norm = w.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
    let inv = 1.0 / norm;
    for v in w.iter_mut() {
        *v *= inv;
    }
    // Phase convention: first nonzero coefficient real and positive.
    if let Some(first) = w.iter().find(|v| v.norm() > 1e-12) {
        let phase = first.conj() / first.norm();
        for v in w.iter_mut() {
            *v *= phase;
        }
    }
    Ok(w)
}

const CACHE_MAGIC: &[u8; 8] = b"ALGPYRC1";

/// Serialize the pyramid vectors (versioned, layout stable per magic).
pub fn write_cache<W: Write>(pyr: &PyramidBasis, mut w: W) -> Result<()> {
    w.write_all(CACHE_MAGIC)?;
    w.write_all(&pyr.basis.n().to_le_bytes())?;
    w.write_all(&(pyr.layers.len() as u32).to_le_bytes())?;
    for layer in &pyr.layers {
        w.write_all(&layer.ell_doubled.to_le_bytes())?;
        for slot in 0..layer.grid * layer.grid {
            let vec = &layer.vectors[slot];
            w.write_all(&(vec.len() as u64).to_le_bytes())?;
            for v in vec {
                w.write_all(&v.re.to_le_bytes())?;
                w.write_all(&v.im.to_le_bytes())?;
            }
            w.write_all(&layer.ln_norms[slot].to_le_bytes())?;
        }
    }
    Ok(())
}

/// Load a pyramid previously written with [`write_cache`].
///
/// Structural mismatches (magic, `N`, layer shape, sector sizes) are
/// rejected; corrupted coefficient payloads surface later as failed
/// orthonormality checks.
pub fn read_cache<R: Read>(basis: &Arc<SymBasis>, mut r: R) -> Result<PyramidBasis> {
    let bad = |msg: &str| Error::Cache(msg.to_string());
    let mut magic = [0u8; 8];
    r.read_exact(&mut magic)?;
    if &magic != CACHE_MAGIC {
        return Err(bad("bad magic or version"));
    }
    let n = read_u32(&mut r)?;
    if n != basis.n() {
        return Err(bad("particle number does not match basis"));
    }
    let n_layers = read_u32(&mut r)? as usize;
    if n_layers != (n as usize) / 2 + 1 {
        return Err(bad("unexpected layer count"));
    }
    let sectors = SectorTable::new(basis);
    let mut layers = Vec::with_capacity(n_layers);
    let mut expect_ell2 = n as i64;
    for _ in 0..n_layers {
        let ell2 = read_u32(&mut r)?;
        if ell2 as i64 != expect_ell2 {
            return Err(bad("unexpected layer label"));
        }
        let grid = ell2 as usize + 1;
        let mut vectors = Vec::with_capacity(grid * grid);
        let mut ln_norms = Vec::with_capacity(grid * grid);
        for slot in 0..grid * grid {
            let (rr, cc) = (slot / grid, slot % grid);
            let (mj2, mk2) = (ell2 as i64 - 2 * rr as i64, ell2 as i64 - 2 * cc as i64);
            let sid = sectors.sector_id(mj2, mk2).ok_or_else(|| bad("sector missing"))?;
            let expect_len = sectors.indices(sid).len();
            let len = read_u64(&mut r)? as usize;
            if len != expect_len {
                return Err(bad("sector length mismatch"));
            }
            let mut vec = Vec::with_capacity(len);
            for _ in 0..len {
                let re = read_f64(&mut r)?;
                let im = read_f64(&mut r)?;
                vec.push(C64::new(re, im));
            }
            vectors.push(vec);
            ln_norms.push(read_f64(&mut r)?);
        }
        layers.push(PyramidLayer {
            ell_doubled: ell2,
            multiplicity: multiplicity(n, ell2).ok(),
            ln_multiplicity: ln_multiplicity(n, ell2)?,
            grid,
            vectors,
            ln_norms,
        });
        expect_ell2 -= 2;
    }
    Ok(PyramidBasis { basis: basis.clone(), sectors, layers })
}

fn read_u32<R: Read>(r: &mut R) -> Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(r: &mut R) -> Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

fn read_f64<R: Read>(r: &mut R) -> Result<f64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(f64::from_le_bytes(b))
}
