//! Exhaustive-enumeration oracles. These are independent of the production
//! paths they cross-check: nilpotents by powering every element, idempotents
//! by testing every element, flatness by tensoring every ideal. All of them
//! are exponential and guarded by the enumeration bound; the CLI exposes
//! them behind `--oracle`.

use super::{Algebra, AlgebraMap, Ideal, ENUMERATION_BOUND};
use crate::linalg::{unit_vec, Mat, Subspace};
use crate::{Error, Result};
use std::collections::BTreeSet;

/// All nilpotent elements, by raising every element to p^k.
pub fn nilradical_by_enumeration(a: &Algebra) -> Result<Ideal> {
    let card = a
        .cardinality()
        .filter(|&c| c <= ENUMERATION_BOUND)
        .ok_or_else(|| Error::SizeBound(format!("{}^{}", a.p(), a.dim())))?;
    let _ = card;
    let mut e = 1u64;
    let mut bound = 1u128;
    while bound < a.dim().max(1) as u128 {
        bound *= a.p() as u128;
        e += 1;
    }
    let q = (a.p() as u64).pow(e as u32);
    let nilpotents: Vec<Vec<u64>> = a
        .elements()
        .filter(|v| a.pow_vec(v, q).iter().all(|&c| c == 0))
        .collect();
    Ok(Ideal::new_unchecked(a, nilpotents))
}

/// All idempotents by exhaustive search.
pub fn idempotents_by_enumeration(a: &Algebra) -> Result<Vec<Vec<u64>>> {
    if a.cardinality().map_or(true, |c| c > ENUMERATION_BOUND) {
        return Err(Error::SizeBound(format!("{}^{}", a.p(), a.dim())));
    }
    let mut out: Vec<Vec<u64>> = a.elements().filter(|v| a.is_idempotent(v)).collect();
    out.sort();
    Ok(out)
}

/// Every ideal of the algebra, as canonical echelon bases. Grows with the
/// subspace lattice, so only usable at very small dimension.
pub fn all_ideals(a: &Algebra) -> Result<Vec<Ideal>> {
    let subspaces = all_subspaces(a.p(), a.dim(), 20_000)?;
    let mut out = Vec::new();
    'next: for s in subspaces {
        for b in s.basis() {
            for i in 0..a.dim() {
                if !s.contains(&a.mul_vec(b, &unit_vec(a.dim(), i))) {
                    continue 'next;
                }
            }
        }
        out.push(Ideal::new_unchecked(a, s.basis().to_vec()));
    }
    Ok(out)
}

fn all_subspaces(p: u64, n: usize, cap: usize) -> Result<Vec<Subspace>> {
    let mut seen: BTreeSet<Vec<Vec<u64>>> = BTreeSet::new();
    let mut frontier = vec![Subspace::zero(p, n)];
    seen.insert(Vec::new());
    let vectors: Vec<Vec<u64>> = crate::linalg::all_vectors(p, n).collect();
    let mut out = Vec::new();
    while let Some(s) = frontier.pop() {
        out.push(s.clone());
        if out.len() > cap {
            return Err(Error::SizeBound(format!("more than {cap} subspaces")));
        }
        for v in &vectors {
            if v.iter().all(|&c| c == 0) || s.contains(v) {
                continue;
            }
            let mut span = s.basis().to_vec();
            span.push(v.clone());
            let bigger = Subspace::from_spanning(p, n, span);
            let key = bigger.basis().to_vec();
            if seen.insert(key) {
                frontier.push(bigger);
            }
        }
    }
    Ok(out)
}

/// Flatness by the ideal-injectivity criterion: for every ideal I of the
/// source, I (x)_src dst -> dst must be injective.
pub fn is_flat_by_ideals(f: &AlgebraMap) -> Result<bool> {
    let a = f.src();
    let b = f.dst();
    let p = a.p();
    for ideal in all_ideals(a)? {
        let gens = ideal.basis();
        let t = gens.len();
        if t == 0 {
            continue;
        }
        // Relation module R = ker(A^t -> A), generated over F_p.
        let mut phi = Mat::zeros(p, a.dim(), t * a.dim());
        for (k, g) in gens.iter().enumerate() {
            for i in 0..a.dim() {
                let col = a.mul_vec(g, &unit_vec(a.dim(), i));
                for (r, &c) in col.iter().enumerate() {
                    phi.set(r, k * a.dim() + i, c);
                }
            }
        }
        let relations = phi.kernel_basis();
        // N = image of R (x) B inside B^t.
        let mut span = Vec::new();
        for rel in &relations {
            for j in 0..b.dim() {
                let mut v = vec![0u64; t * b.dim()];
                for k in 0..t {
                    let rk = &rel[k * a.dim()..(k + 1) * a.dim()];
                    let frk = f.apply(rk);
                    let prod = b.mul_vec(&frk, &unit_vec(b.dim(), j));
                    for (r, &c) in prod.iter().enumerate() {
                        v[k * b.dim() + r] = c;
                    }
                }
                span.push(v);
            }
        }
        let n_space = Subspace::from_spanning(p, t * b.dim(), span);
        // psi: B^t -> B, (b_k) -> sum f(g_k) b_k
        let mut psi = Mat::zeros(p, b.dim(), t * b.dim());
        for (k, g) in gens.iter().enumerate() {
            let fg = f.apply(g);
            for j in 0..b.dim() {
                let col = b.mul_vec(&fg, &unit_vec(b.dim(), j));
                for (r, &c) in col.iter().enumerate() {
                    psi.set(r, k * b.dim() + j, c);
                }
            }
        }
        // injectivity of I (x) B -> B means ker(psi) is contained in N
        for kv in psi.kernel_basis() {
            if !n_space.contains(&kv) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
