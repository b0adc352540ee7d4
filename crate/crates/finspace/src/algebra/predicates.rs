//! Ring-theoretic predicates on finite-dimensional F_p-algebras: nilradical,
//! prime spectrum, residue fields, flatness, faithful flatness, epimorphism
//! and etaleness tests.

use super::idempotent::local_decomposition;
use super::tensor::{quotient_algebra, tensor_over};
use super::tower::FiniteFieldRep;
use super::{Algebra, AlgebraMap, Ideal};
use crate::linalg::{unit_vec, Mat, Subspace};
use crate::poly::Poly;
use crate::{Error, Result};

/// Minimal polynomial of an element over F_p.
pub fn min_poly(a: &Algebra, v: &[u64]) -> Poly {
    let p = a.p();
    if a.is_zero_ring() {
        // In the zero ring 1 = 0, so the minimal polynomial of its element is t - 0... the
        // unit itself is zero; report t.
        return Poly::x(p);
    }
    let mut powers: Vec<Vec<u64>> = vec![a.one().to_vec()];
    loop {
        let k = powers.len();
        let next = a.mul_vec(powers.last().unwrap(), v);
        let m = Mat::from_cols(p, a.dim(), powers.clone());
        if let Some(coeffs) = m.solve(&next) {
            // v^k = sum coeffs_i v^i  =>  minpoly = t^k - sum coeffs_i t^i
            let mut c = vec![0u64; k + 1];
            for (i, &x) in coeffs.iter().enumerate() {
                c[i] = crate::linalg::fp_sub(p, 0, x);
            }
            c[k] = 1;
            return Poly::new(p, c);
        }
        powers.push(next);
    }
}

/// The ideal of nilpotent elements, computed as ker(Frobenius^k) for
/// p^k >= dim. Frobenius is F_p-linear, so this is exact linear algebra.
pub fn nilradical(a: &Algebra) -> Ideal {
    if a.dim() <= 1 {
        return Ideal::zero(a);
    }
    let p = a.p();
    let mut k = 0u32;
    let mut bound = 1u128;
    while bound < a.dim() as u128 {
        bound *= p as u128;
        k += 1;
    }
    let frob = a.frobenius_matrix();
    let mut power = Mat::identity(p, a.dim());
    for _ in 0..k {
        power = frob.matmul(&power);
    }
    Ideal::new_unchecked(a, power.kernel_basis())
}

/// One prime ideal per local factor (primes of an Artinian algebra are
/// maximal): the kernel of A -> factor / nilradical(factor).
pub fn spec_primes(a: &Algebra) -> Vec<Ideal> {
    if a.is_zero_ring() {
        return Vec::new();
    }
    let dec = local_decomposition(a).expect("non-zero algebra");
    let mut out = Vec::new();
    for (factor, proj) in dec.factors.iter().zip(&dec.projections) {
        let nil = nilradical(factor);
        let (_, q) = quotient_algebra(factor, &nil);
        let to_residue = q.compose(proj);
        out.push(to_residue.kernel());
    }
    out
}

/// Residue field at a prime: the quotient by it, packaged with a canonical
/// generator, plus the quotient map.
pub fn residue_field(a: &Algebra, prime: &Ideal) -> Result<(FiniteFieldRep, AlgebraMap)> {
    if !spec_primes(a).iter().any(|q| q == prime) {
        return Err(Error::NotPrime);
    }
    let (q, qmap) = quotient_algebra(a, prime);
    let rep = FiniteFieldRep::from_field_algebra(&q)?;
    Ok((rep, qmap))
}

/// Flatness of dst as a src-module: free over every local factor of the
/// source, with the rank read off a minimal presentation.
pub fn is_flat(f: &AlgebraMap) -> bool {
    let a = f.src();
    let b = f.dst();
    if a.is_zero_ring() {
        return true; // only the zero module exists over the zero ring
    }
    if b.is_zero_ring() {
        return true;
    }
    let p = a.p();
    let dec = local_decomposition(a).expect("non-zero algebra");
    for ((e, factor), _) in dec.idempotents.iter().zip(&dec.factors).zip(&dec.projections) {
        let fe = f.apply(e);
        // M = f(e) * B as a subspace of B
        let span: Vec<Vec<u64>> =
            (0..b.dim()).map(|j| b.mul_vec(&fe, &unit_vec(b.dim(), j))).collect();
        let m_space = Subspace::from_spanning(p, b.dim(), span);
        if m_space.dim() == 0 {
            continue; // zero module is free of rank 0
        }
        // m * M for m the maximal ideal of the factor (its nilradical),
        // lifted into A through the factor inclusion e*A -> A.
        let nil = nilradical(factor);
        let factor_inc = super::tensor::idempotent_factor(a, e).inclusion;
        let mut mm_span = Vec::new();
        for n in nil.basis() {
            let lifted = factor_inc.apply(n);
            let fn_b = f.apply(&lifted);
            for s in m_space.basis() {
                mm_span.push(b.mul_vec(&fn_b, s));
            }
        }
        let mm_space = Subspace::from_spanning(p, b.dim(), mm_span);
        let residue_deg = factor.dim() - nil.dim();
        let top = m_space.dim() - mm_space.dim();
        if top % residue_deg != 0 {
            return false;
        }
        let rank = top / residue_deg;
        if m_space.dim() != rank * factor.dim() {
            return false;
        }
    }
    true
}

/// Flat and with non-empty fiber over every prime of the source.
pub fn is_faithfully_flat(f: &AlgebraMap) -> bool {
    if !is_flat(f) {
        return false;
    }
    let b = f.dst();
    for q in spec_primes(f.src()) {
        let qb = ideal_generated_by_image(f, &q);
        if qb.dim() == b.dim() {
            return false; // fiber over q is zero
        }
    }
    true
}

/// The ideal f(q) * dst.
fn ideal_generated_by_image(f: &AlgebraMap, q: &Ideal) -> Ideal {
    let b = f.dst();
    let mut span = Vec::new();
    for g in q.basis() {
        let fg = f.apply(g);
        for j in 0..b.dim() {
            span.push(b.mul_vec(&fg, &unit_vec(b.dim(), j)));
        }
    }
    Ideal::new_unchecked(b, span)
}

/// Ring epimorphism test: the multiplication map dst (x)_src dst -> dst is
/// bijective, which here reduces to a dimension count.
pub fn is_epimorphism(f: &AlgebraMap) -> bool {
    let t = tensor_over(f, f);
    t.algebra.dim() == f.dst().dim()
}

/// Etale test: flat, and the fiber over every prime of the source is
/// reduced (separability is automatic over a finite field).
pub fn is_etale_map(f: &AlgebraMap) -> bool {
    if !is_flat(f) {
        return false;
    }
    let b = f.dst();
    for q in spec_primes(f.src()) {
        let qb = ideal_generated_by_image(f, &q);
        let (fiber, _) = quotient_algebra(b, &qb);
        if !nilradical(&fiber).is_zero() {
            return false;
        }
    }
    true
}

/// Field-factor degrees of an etale algebra over a finite field, sorted.
pub fn etale_decompose(kappa: &FiniteFieldRep, structure: &AlgebraMap) -> Result<Vec<usize>> {
    if structure.src() != kappa.algebra() {
        return Err(Error::BadShape("structure map must start at the given field".into()));
    }
    if !is_etale_map(structure) {
        return Err(Error::NotEtale);
    }
    let e = structure.dst();
    if e.is_zero_ring() {
        return Ok(Vec::new());
    }
    let dec = local_decomposition(e).expect("non-zero algebra");
    let mut degs = Vec::new();
    for factor in &dec.factors {
        debug_assert!(nilradical(factor).is_zero(), "etale algebras are reduced");
        debug_assert_eq!(factor.dim() % kappa.degree(), 0);
        degs.push(factor.dim() / kappa.degree());
    }
    degs.sort_unstable();
    debug_assert_eq!(degs.iter().sum::<usize>() * kappa.degree(), e.dim());
    Ok(degs)
}
