//! Idempotents and the decomposition of an Artinian algebra into local
//! factors.
//!
//! The splitting path factors minimal polynomials of candidate elements
//! (basis elements first, then Frobenius-fixed elements of the reduced
//! quotient, whose count certifies completeness), so it never needs the
//! exhaustive search; the enumeration path is kept for small algebras and as
//! the oracle the splitting is tested against.

use super::predicates::{min_poly, nilradical};
use super::tensor::{idempotent_factor, quotient_algebra};
use super::{Algebra, AlgebraMap, ENUMERATION_BOUND};
use crate::linalg::{vec_sub, Mat, Subspace};
use crate::{Error, Result};

/// Pairwise-orthogonal primitive idempotents summing to one, with the
/// corresponding local factor algebras and projections.
#[derive(Clone)]
pub struct LocalDecomposition {
    pub parent: Algebra,
    pub idempotents: Vec<Vec<u64>>,
    pub factors: Vec<Algebra>,
    pub projections: Vec<AlgebraMap>,
}

impl LocalDecomposition {
    pub fn len(&self) -> usize {
        self.factors.len()
    }
    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Decompose a non-zero algebra into local factors. Memoized per algebra.
pub fn local_decomposition(a: &Algebra) -> Result<LocalDecomposition> {
    if a.is_zero_ring() {
        return Err(Error::InvalidInput("local decomposition of the zero ring".into()));
    }
    super::cache::decomposition_cached(a, || local_decomposition_uncached(a))
}

fn local_decomposition_uncached(a: &Algebra) -> Result<LocalDecomposition> {
    let mut prims = primitive_idempotents(a);
    prims.sort();
    // sanity: orthogonal, idempotent, summing to one
    let p = a.p();
    let mut sum = vec![0u64; a.dim()];
    for (i, e) in prims.iter().enumerate() {
        debug_assert!(a.is_idempotent(e));
        for f in prims.iter().skip(i + 1) {
            debug_assert!(a.mul_vec(e, f).iter().all(|&c| c == 0));
        }
        sum = crate::linalg::vec_add(p, &sum, e);
    }
    assert_eq!(sum, a.one().to_vec(), "primitive idempotents must sum to one");
    let mut factors = Vec::new();
    let mut projections = Vec::new();
    for e in &prims {
        let f = idempotent_factor(a, e);
        factors.push(f.factor);
        projections.push(f.projection);
    }
    Ok(LocalDecomposition { parent: a.clone(), idempotents: prims, factors, projections })
}

/// All idempotents, canonically ordered. Exhaustive below the enumeration
/// bound, otherwise subset sums of the primitive ones.
pub fn idempotents(a: &Algebra) -> Result<Vec<Vec<u64>>> {
    if a.cardinality().map_or(false, |c| c <= ENUMERATION_BOUND) {
        let mut out: Vec<Vec<u64>> = a.elements().filter(|v| a.is_idempotent(v)).collect();
        out.sort();
        return Ok(out);
    }
    if a.is_zero_ring() {
        return Ok(vec![Vec::new()]);
    }
    let dec = local_decomposition(a)?;
    let k = dec.len();
    if (1u128) << k > ENUMERATION_BOUND {
        return Err(Error::SizeBound(format!("2^{k} idempotents")));
    }
    let p = a.p();
    let mut out = Vec::with_capacity(1 << k);
    for mask in 0u64..(1 << k) {
        let mut v = vec![0u64; a.dim()];
        for (i, e) in dec.idempotents.iter().enumerate() {
            if mask >> i & 1 == 1 {
                v = crate::linalg::vec_add(p, &v, e);
            }
        }
        out.push(v);
    }
    out.sort();
    out.dedup();
    Ok(out)
}

fn primitive_idempotents(a: &Algebra) -> Vec<Vec<u64>> {
    if a.is_zero_ring() {
        return Vec::new();
    }
    match find_nontrivial_idempotent(a) {
        None => vec![a.one().to_vec()],
        Some(e) => {
            let p = a.p();
            let complement = vec_sub(p, a.one(), &e);
            let mut out = Vec::new();
            for part in [e, complement] {
                let f = idempotent_factor(a, &part);
                for w in primitive_idempotents(&f.factor) {
                    // factor coordinates back to A coordinates
                    out.push(f.inclusion.apply(&w));
                }
            }
            out
        }
    }
}

/// Some nontrivial idempotent, or None with a certificate that the algebra
/// is local (the Frobenius-fixed subalgebra of A/nil is one-dimensional).
fn find_nontrivial_idempotent(a: &Algebra) -> Option<Vec<u64>> {
    debug_assert!(!a.is_zero_ring());
    if a.dim() == 1 {
        return None;
    }
    // Tier 1: basis elements whose minimal polynomial has coprime factors.
    for i in 0..a.dim() {
        let v = crate::linalg::unit_vec(a.dim(), i);
        if let Some(e) = crt_idempotent(a, &v) {
            return Some(e);
        }
    }
    // Tier 2: the reduced quotient. Fixed points of Frobenius span F_p per
    // local factor, so dim 1 certifies locality.
    let nil = nilradical(a);
    let (red, qmap) = quotient_algebra(a, &nil);
    let frob = red.frobenius_matrix();
    let n = red.dim();
    let mut fr_minus_id = Mat::zeros(a.p(), n, n);
    for i in 0..n {
        for j in 0..n {
            let v = frob.get(i, j);
            let d = if i == j { crate::linalg::fp_sub(a.p(), v, 1) } else { v };
            fr_minus_id.set(i, j, d);
        }
    }
    let fixed = Subspace::from_spanning(a.p(), n, fr_minus_id.kernel_basis());
    assert!(fixed.dim() >= 1);
    if fixed.dim() == 1 {
        return None;
    }
    let one_span = Subspace::from_spanning(a.p(), n, vec![red.one().to_vec()]);
    let w = fixed
        .basis()
        .iter()
        .find(|v| !one_span.contains(v))
        .expect("fixed space larger than the span of one")
        .clone();
    let ebar = crt_idempotent(&red, &w)
        .expect("a Frobenius-fixed element outside F_p has a split minimal polynomial");
    Some(hensel_lift_idempotent(a, &qmap, &ebar))
}

/// If the minimal polynomial of v factors into two coprime parts, produce an
/// exact nontrivial idempotent in F_p[v] by the Bezout identity.
fn crt_idempotent(a: &Algebra, v: &[u64]) -> Option<Vec<u64>> {
    let m = min_poly(a, v);
    let factors = m.factor();
    if factors.len() < 2 {
        return None;
    }
    let (f0, m0) = &factors[0];
    let mut g = crate::poly::Poly::one(a.p());
    for _ in 0..*m0 {
        g = g.mul(f0);
    }
    let (h, _) = m.divrem(&g);
    let (d, u, _w) = g.ext_gcd(&h);
    debug_assert_eq!(d.degree(), Some(0));
    // e = (u*g)(v) kills the g-part and is 1 on the h-part
    let e = u.mul(&g).eval_in(a.one(), |x, y| a.mul_vec(x, y), v);
    debug_assert!(a.is_idempotent(&e));
    debug_assert!(e != a.one().to_vec() && e.iter().any(|&c| c != 0));
    Some(e)
}

/// Lift an idempotent of A/N back to A along the nilpotent kernel N.
fn hensel_lift_idempotent(a: &Algebra, qmap: &AlgebraMap, ebar: &[u64]) -> Vec<u64> {
    let mut u = qmap
        .matrix()
        .solve(ebar)
        .expect("quotient map is surjective");
    for _ in 0..64 {
        if a.is_idempotent(&u) {
            debug_assert_eq!(qmap.apply(&u), ebar.to_vec());
            return u;
        }
        // u <- 3u^2 - 2u^3, the standard idempotent refinement
        let p = a.p();
        let u2 = a.mul_vec(&u, &u);
        let u3 = a.mul_vec(&u2, &u);
        let mut next = vec![0u64; a.dim()];
        for i in 0..a.dim() {
            let t = (3 % p) * u2[i] % p;
            let s = (2 % p) * u3[i] % p;
            next[i] = crate::linalg::fp_sub(p, t, s);
        }
        u = next;
    }
    panic!("idempotent lifting did not converge");
}
