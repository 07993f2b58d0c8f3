//! Shared fixtures for the benchmarks.

use algent::basis::{StateVector, SymBasis};
use num_complex::Complex64 as C64;
use std::sync::Arc;

/// Deterministic unit vector with support on every sector.
pub fn spread_state(basis: &Arc<SymBasis>) -> StateVector {
    let mut amps: Vec<C64> = (0..basis.len())
        .map(|i| C64::new((1.3 * i as f64).sin(), (0.7 * i as f64).cos()))
        .collect();
    let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    amps.iter_mut().for_each(|a| *a /= norm);
    StateVector::new(basis.clone(), amps).expect("normalized")
}
