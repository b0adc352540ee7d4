//! Thread-local memoization of the pure, frequently repeated kernels:
//! local decompositions, finite-field certifications and inter-field
//! embedding tables. Keys are the raw structure constants, so a cache hit
//! is exact; everything cached is immutable, keeping the operations pure.

use super::idempotent::LocalDecomposition;
use super::tower::FiniteFieldRep;
use super::Algebra;
use crate::linalg::Mat;
use std::cell::RefCell;
use std::collections::HashMap;

pub(crate) fn algebra_key(a: &Algebra) -> Vec<u64> {
    let mut key = Vec::with_capacity(2 + a.dim() * a.dim() * a.dim() + a.dim());
    key.push(a.p());
    key.push(a.dim() as u64);
    for i in 0..a.dim() {
        for j in 0..a.dim() {
            key.extend_from_slice(a.mul_coeffs(i, j));
        }
    }
    key.extend_from_slice(a.one());
    key
}

thread_local! {
    static DECOMPOSITIONS: RefCell<HashMap<Vec<u64>, LocalDecomposition>> =
        RefCell::new(HashMap::new());
    static FIELD_REPS: RefCell<HashMap<Vec<u64>, FiniteFieldRep>> =
        RefCell::new(HashMap::new());
    static EMBEDDINGS: RefCell<HashMap<(Vec<u64>, Vec<u64>), Vec<Mat>>> =
        RefCell::new(HashMap::new());
}

pub(crate) fn decomposition_cached(
    a: &Algebra,
    compute: impl FnOnce() -> crate::Result<LocalDecomposition>,
) -> crate::Result<LocalDecomposition> {
    let key = algebra_key(a);
    if let Some(hit) = DECOMPOSITIONS.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(hit);
    }
    let value = compute()?;
    DECOMPOSITIONS.with(|c| c.borrow_mut().insert(key, value.clone()));
    Ok(value)
}

pub(crate) fn field_rep_cached(
    a: &Algebra,
    compute: impl FnOnce() -> crate::Result<FiniteFieldRep>,
) -> crate::Result<FiniteFieldRep> {
    let key = algebra_key(a);
    if let Some(hit) = FIELD_REPS.with(|c| c.borrow().get(&key).cloned()) {
        return Ok(hit);
    }
    let value = compute()?;
    FIELD_REPS.with(|c| c.borrow_mut().insert(key, value.clone()));
    Ok(value)
}

/// All F_p-algebra embedding matrices of one field into another (the
/// Frobenius orbit of one root, sorted), unfiltered by any extra structure.
pub(crate) fn embeddings_cached(
    k_field: &Algebra,
    l_field: &Algebra,
    compute: impl FnOnce() -> Vec<Mat>,
) -> Vec<Mat> {
    let key = (algebra_key(k_field), algebra_key(l_field));
    if let Some(hit) = EMBEDDINGS.with(|c| c.borrow().get(&key).cloned()) {
        return hit;
    }
    let value = compute();
    EMBEDDINGS.with(|c| c.borrow_mut().insert(key, value.clone()));
    value
}
