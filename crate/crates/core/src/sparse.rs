//! Square complex CSR matrices sized for collective operators.
//!
//! Entries are kept in ascending `(row, col)` order so that every sum over a
//! matrix runs in one fixed order and repeated builds are bit-identical.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SpMat {
    dim: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<C64>,
}

impl SpMat {
    pub fn zeros(dim: usize) -> Self {
        SpMat { dim, row_ptr: vec![0; dim + 1], col_idx: Vec::new(), vals: Vec::new() }
    }

    pub fn identity(dim: usize) -> Self {
        SpMat {
            dim,
            row_ptr: (0..=dim).collect(),
            col_idx: (0..dim).collect(),
            vals: vec![C64::new(1.0, 0.0); dim],
        }
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        let dim = diag.len();
        let trip = diag
            .iter()
            .enumerate()
            .map(|(i, &v)| (i, i, v))
            .collect();
        Self::from_triplets(dim, trip)
    }

    /// Build from `(row, col, value)` triplets; duplicates are summed in index
    /// order and exact zeros dropped.
    pub fn from_triplets(dim: usize, mut trip: Vec<(usize, usize, C64)>) -> Self {
        trip.sort_unstable_by_key(|t| (t.0, t.1));
        let mut row_ptr = vec![0usize; dim + 1];
        let mut col_idx = Vec::with_capacity(trip.len());
        let mut vals: Vec<C64> = Vec::with_capacity(trip.len());
        let mut rows = Vec::with_capacity(trip.len());
        for (r, c, v) in trip {
            debug_assert!(r < dim && c < dim);
            if let (Some(&lr), Some(&lc)) = (rows.last(), col_idx.last()) {
                if lr == r && lc == c {
                    *vals.last_mut().unwrap() += v;
                    continue;
                }
            }
            rows.push(r);
            col_idx.push(c);
            vals.push(v);
        }
        // Drop entries that summed to exactly zero.
        let mut k = 0;
        for i in 0..vals.len() {
            if vals[i].re != 0.0 || vals[i].im != 0.0 {
                rows[k] = rows[i];
                col_idx[k] = col_idx[i];
                vals[k] = vals[i];
                k += 1;
            }
        }
        rows.truncate(k);
        col_idx.truncate(k);
        vals.truncate(k);
        for &r in &rows {
            row_ptr[r + 1] += 1;
        }
        for i in 0..dim {
            row_ptr[i + 1] += row_ptr[i];
        }
        SpMat { dim, row_ptr, col_idx, vals }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of one row.
    pub fn row(&self, i: usize) -> (&[usize], &[C64]) {
        let lo = self.row_ptr[i];
        let hi = self.row_ptr[i + 1];
        (&self.col_idx[lo..hi], &self.vals[lo..hi])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, C64)> + '_ {
        (0..self.dim).flat_map(move |i| {
            let (cols, vals) = self.row(i);
            cols.iter().zip(vals).map(move |(&c, &v)| (i, c, v))
        })
    }

    pub fn entry(&self, i: usize, j: usize) -> C64 {
        let (cols, vals) = self.row(i);
        match cols.binary_search(&j) {
            Ok(k) => vals[k],
            Err(_) => C64::new(0.0, 0.0),
        }
    }

    /// `y = A x`.
    pub fn apply(&self, x: &[C64], y: &mut [C64]) {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        for (i, yi) in y.iter_mut().enumerate() {
            let (cols, vals) = self.row(i);
            let mut acc = C64::new(0.0, 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                acc += v * x[c];
            }
            *yi = acc;
        }
    }

    pub fn apply_vec(&self, x: &[C64]) -> Vec<C64> {
        let mut y = vec![C64::new(0.0, 0.0); self.dim];
        self.apply(x, &mut y);
        y
    }

    /// `out += alpha * A * rho` for a dense column-major square `rho`.
    pub fn acc_a_rho(&self, rho: &[C64], alpha: C64, out: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(rho.len(), d * d);
        debug_assert_eq!(out.len(), d * d);
        for c in 0..d {
            let xcol = &rho[c * d..(c + 1) * d];
            let ocol = &mut out[c * d..(c + 1) * d];
            for (i, o) in ocol.iter_mut().enumerate() {
                let (cols, vals) = self.row(i);
                let mut acc = C64::new(0.0, 0.0);
                for (&k, &v) in cols.iter().zip(vals) {
                    acc += v * xcol[k];
                }
                *o += alpha * acc;
            }
        }
    }

    /// `out += alpha * rho * A` for a dense column-major square `rho`.
    pub fn acc_rho_a(&self, rho: &[C64], alpha: C64, out: &mut [C64]) {
        let d = self.dim;
        debug_assert_eq!(rho.len(), d * d);
        debug_assert_eq!(out.len(), d * d);
        for k in 0..d {
            let (cols, vals) = self.row(k);
            let src = &rho[k * d..(k + 1) * d];
            for (&j, &v) in cols.iter().zip(vals) {
                let f = alpha * v;
                let ocol = &mut out[j * d..(j + 1) * d];
                for (o, s) in ocol.iter_mut().zip(src) {
                    *o += f * s;
                }
            }
        }
    }

    pub fn adjoint(&self) -> SpMat {
        let trip = self.iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        SpMat::from_triplets(self.dim, trip)
    }

    pub fn scaled(&self, c: C64) -> SpMat {
        let mut out = self.clone();
        for v in &mut out.vals {
            *v *= c;
        }
        out
    }

    pub fn linear_combination(terms: &[(C64, &SpMat)]) -> Result<SpMat> {
        let dim = terms.first().map(|(_, m)| m.dim).unwrap_or(0);
        let mut trip = Vec::new();
        for (c, m) in terms {
            if m.dim != dim {
                return Err(Error::DimensionMismatch(m.dim, dim));
            }
            trip.extend(m.iter().map(|(i, j, v)| (i, j, *c * v)));
        }
        Ok(SpMat::from_triplets(dim, trip))
    }

    pub fn add(&self, other: &SpMat) -> Result<SpMat> {
        let one = C64::new(1.0, 0.0);
        SpMat::linear_combination(&[(one, self), (one, other)])
    }

    pub fn sub(&self, other: &SpMat) -> Result<SpMat> {
        SpMat::linear_combination(&[(C64::new(1.0, 0.0), self), (C64::new(-1.0, 0.0), other)])
    }

    pub fn matmul(&self, rhs: &SpMat) -> Result<SpMat> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(self.dim, rhs.dim));
        }
        let d = self.dim;
        let mut scratch = vec![C64::new(0.0, 0.0); d];
        let mut touched: Vec<usize> = Vec::new();
        let mut trip = Vec::new();
        for i in 0..d {
            let (cols, vals) = self.row(i);
            for (&k, &a) in cols.iter().zip(vals) {
                let (rcols, rvals) = rhs.row(k);
                for (&j, &b) in rcols.iter().zip(rvals) {
                    if scratch[j].re == 0.0 && scratch[j].im == 0.0 {
                        touched.push(j);
                    }
                    scratch[j] += a * b;
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                trip.push((i, j, scratch[j]));
                scratch[j] = C64::new(0.0, 0.0);
            }
            touched.clear();
        }
        Ok(SpMat::from_triplets(d, trip))
    }

    /// `(A + A^dagger) / 2`.
    pub fn hermitized(&self) -> SpMat {
        let half = C64::new(0.5, 0.0);
        let adj = self.adjoint();
        SpMat::linear_combination(&[(half, self), (half, &adj)]).expect("same dim")
    }

    /// Largest entry of `A - A^dagger` in absolute value.
    pub fn hermiticity_residual(&self) -> f64 {
        let diff = self.sub(&self.adjoint()).expect("same dim");
        diff.max_abs()
    }

    pub fn max_abs(&self) -> f64 {
        self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `<x|A|x>`.
    pub fn expectation(&self, x: &[C64]) -> C64 {
        debug_assert_eq!(x.len(), self.dim);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..self.dim {
            let (cols, vals) = self.row(i);
            let mut row_acc = C64::new(0.0, 0.0);
            for (&c, &v) in cols.iter().zip(vals) {
                row_acc += v * x[c];
            }
            acc += x[i].conj() * row_acc;
        }
        acc
    }

    /// `Tr(A rho)` for a dense column-major square `rho`.
    pub fn trace_with(&self, rho: &[C64]) -> C64 {
        let d = self.dim;
        debug_assert_eq!(rho.len(), d * d);
        let mut acc = C64::new(0.0, 0.0);
        for (i, k, v) in self.iter() {
            acc += v * rho[i * d + k];
        }
        acc
    }

    pub fn to_dense(&self) -> Vec<C64> {
        let d = self.dim;
        let mut out = vec![C64::new(0.0, 0.0); d * d];
        for (i, j, v) in self.iter() {
            out[j * d + i] = v;
        }
        out
    }
}

fn neumaier_add(sum: &mut f64, comp: &mut f64, v: f64) {
    let t = *sum + v;
    if sum.abs() >= v.abs() {
        *comp += (*sum - t) + v;
    } else {
        *comp += (v - t) + *sum;
    }
    *sum = t;
}

/// Accumulate `a * b` exactly: the rounded product plus its FMA-recovered
/// rounding error both go into the compensated sum.
fn acc_product(sum: &mut f64, comp: &mut f64, a: f64, b: f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    neumaier_add(sum, comp, p);
    neumaier_add(sum, comp, err);
}

fn acc_cmul(acc: &mut [(f64, f64); 2], a: C64, b: C64, sign: f64) {
    // (a.re + i a.im)(b.re + i b.im), each partial product compensated.
    acc_product(&mut acc[0].0, &mut acc[0].1, sign * a.re, b.re);
    acc_product(&mut acc[0].0, &mut acc[0].1, -sign * a.im, b.im);
    acc_product(&mut acc[1].0, &mut acc[1].1, sign * a.re, b.im);
    acc_product(&mut acc[1].0, &mut acc[1].1, sign * a.im, b.re);
}

/// Largest entry of `A B - B A` in absolute value, with compensated products
/// and sums so that algebraically vanishing commutators are not swamped by
/// accumulation noise.
pub fn commutator_residual(a: &SpMat, b: &SpMat) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let d = a.dim();
    let mut acc: Vec<[(f64, f64); 2]> = vec![[(0.0, 0.0); 2]; d];
    let mut touched: Vec<usize> = Vec::new();
    let mut seen = vec![false; d];
    let mut res: f64 = 0.0;
    for i in 0..d {
        let (acols, avals) = a.row(i);
        for (&k, &va) in acols.iter().zip(avals) {
            let (bcols, bvals) = b.row(k);
            for (&j, &vb) in bcols.iter().zip(bvals) {
                if !seen[j] {
                    seen[j] = true;
                    touched.push(j);
                }
                acc_cmul(&mut acc[j], va, vb, 1.0);
            }
        }
        let (bcols, bvals) = b.row(i);
        for (&k, &vb) in bcols.iter().zip(bvals) {
            let (acols2, avals2) = a.row(k);
            for (&j, &va) in acols2.iter().zip(avals2) {
                if !seen[j] {
                    seen[j] = true;
                    touched.push(j);
                }
                acc_cmul(&mut acc[j], vb, va, -1.0);
            }
        }
        for &j in &touched {
            let re = acc[j][0].0 + acc[j][0].1;
            let im = acc[j][1].0 + acc[j][1].1;
            res = res.max((re * re + im * im).sqrt());
            acc[j] = [(0.0, 0.0); 2];
            seen[j] = false;
        }
        touched.clear();
    }
    Ok(res)
}
