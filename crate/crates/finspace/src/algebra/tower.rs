//! A truncated algebraic closure of F_p: one canonical field F_{p^d} per
//! degree d up to a bound, with embeddings F_{p^d} -> F_{p^d'} for d | d'
//! chosen compatibly (every composable triangle commutes).

use super::idempotent::local_decomposition;
use super::predicates::{min_poly, nilradical};
use super::Algebra;
use crate::linalg::Mat;
use crate::poly::{first_irreducible, Poly};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// An algebra certified to be a finite field, with a canonical generator and
/// its minimal polynomial over F_p.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiniteFieldRep {
    algebra: Algebra,
    degree: usize,
    generator: Vec<u64>,
    minpoly: Poly,
}

impl FiniteFieldRep {
    /// Certify that an algebra is a field (zero nilradical, a single local
    /// factor) and pick the first generator in counter order. Memoized.
    pub fn from_field_algebra(a: &Algebra) -> Result<Self> {
        if a.is_zero_ring() {
            return Err(Error::InvalidInput("the zero ring is not a field".into()));
        }
        if !nilradical(a).is_zero() {
            return Err(Error::InvalidInput("algebra has nilpotents; not a field".into()));
        }
        if local_decomposition(a)?.len() != 1 {
            return Err(Error::InvalidInput("algebra has several primes; not a field".into()));
        }
        super::cache::field_rep_cached(a, || Self::from_field_algebra_uncached(a))
    }

    fn from_field_algebra_uncached(a: &Algebra) -> Result<Self> {
        let d = a.dim();
        // basis elements first, then everything in counter order
        let generator = (0..d)
            .map(|i| crate::linalg::unit_vec(d, i))
            .chain(a.elements())
            .find(|v| min_poly(a, v).degree() == Some(d))
            .expect("a finite field has a primitive element");
        let minpoly = min_poly(a, &generator);
        Ok(FiniteFieldRep { algebra: a.clone(), degree: d, generator, minpoly })
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }
    pub fn degree(&self) -> usize {
        self.degree
    }
    pub fn generator(&self) -> &[u64] {
        &self.generator
    }
    pub fn minpoly(&self) -> &Poly {
        &self.minpoly
    }

    /// Change of basis to the power basis of the generator.
    fn power_basis(&self) -> Mat {
        let mut cols = Vec::with_capacity(self.degree);
        let mut pw = self.algebra.one().to_vec();
        for _ in 0..self.degree {
            cols.push(pw.clone());
            pw = self.algebra.mul_vec(&pw, &self.generator);
        }
        Mat::from_cols(self.algebra.p(), self.degree, cols)
    }
}

/// An embedding of an abstract finite field into a tower field, stored as a
/// matrix from the field's own basis to the tower field's basis.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Embedding {
    pub field_degree: usize,
    pub into_degree: usize,
    pub matrix: Mat,
}

/// Canonical fields F_{p^d}, d <= max_degree, and compatible embeddings
/// between them along divisibility.
pub struct OmegaTower {
    p: u64,
    max_degree: usize,
    fields: Vec<Algebra>,
    polys: Vec<Poly>,
    emb: BTreeMap<(usize, usize), Mat>,
}

impl OmegaTower {
    pub fn new(p: u64, max_degree: usize) -> Self {
        assert!(max_degree >= 1);
        let mut fields = Vec::new();
        let mut polys = Vec::new();
        for d in 1..=max_degree {
            let f = first_irreducible(p, d);
            fields.push(Algebra::poly_quotient(&f));
            polys.push(f);
        }
        let mut tower =
            OmegaTower { p, max_degree, fields, polys, emb: BTreeMap::new() };
        for dd in 1..=max_degree {
            let mut divisors: Vec<usize> = (1..dd).filter(|d| dd % d == 0).collect();
            divisors.sort_unstable();
            for d in divisors {
                let m = tower.choose_embedding(d, dd);
                tower.emb.insert((d, dd), m);
            }
        }
        tower
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn field(&self, d: usize) -> &Algebra {
        &self.fields[d - 1]
    }

    pub fn defining_poly(&self, d: usize) -> &Poly {
        &self.polys[d - 1]
    }

    /// The canonical embedding matrix F_{p^d} -> F_{p^dd} for d | dd.
    pub fn embedding(&self, d: usize, dd: usize) -> Mat {
        if d == dd {
            return Mat::identity(self.p, d);
        }
        self.emb.get(&(d, dd)).expect("embedding exists for divisors").clone()
    }

    /// Matrix of x -> x^(p^e) on F_{p^d}.
    pub fn frobenius_power(&self, d: usize, e: usize) -> Mat {
        let f = self.field(d);
        let frob = f.frobenius_matrix();
        let mut m = Mat::identity(self.p, d);
        for _ in 0..e {
            m = frob.matmul(&m);
        }
        m
    }

    /// Pick the lex-least root of the degree-d defining polynomial inside
    /// F_{p^dd} whose induced embedding commutes with everything chosen so
    /// far below d.
    fn choose_embedding(&self, d: usize, dd: usize) -> Mat {
        let target = self.field(dd);
        let fpoly = self.defining_poly(d);
        let first_root = target
            .elements()
            .find(|x| {
                fpoly
                    .eval_in(target.one(), |u, v| target.mul_vec(u, v), x)
                    .iter()
                    .all(|&c| c == 0)
            })
            .expect("the defining polynomial splits in a field of divisible degree");
        // the other roots form the Frobenius orbit
        let mut roots = Vec::with_capacity(d);
        let mut r = first_root;
        for _ in 0..d {
            roots.push(r.clone());
            r = target.pow_vec(&r, self.p);
        }
        roots.sort();
        roots.dedup();
        assert_eq!(roots.len(), d, "separable polynomial has d distinct roots");
        'root: for r in &roots {
            let cand = self.root_matrix(d, r, target);
            for e in (1..d).filter(|e| d % e == 0) {
                let via_d = cand.matmul(&self.embedding(e, d));
                if via_d != self.embedding(e, dd) {
                    continue 'root;
                }
            }
            return cand;
        }
        unreachable!("a compatible root always exists in a compatible tower");
    }

    /// Matrix of the embedding sending the power basis generator to r.
    fn root_matrix(&self, d: usize, r: &[u64], target: &Algebra) -> Mat {
        let mut cols = Vec::with_capacity(d);
        let mut pw = target.one().to_vec();
        for _ in 0..d {
            cols.push(pw.clone());
            pw = target.mul_vec(&pw, r);
        }
        Mat::from_cols(self.p, target.dim(), cols)
    }

    /// All roots of a polynomial inside F_{p^d}, sorted.
    fn roots_in_field(&self, f: &Poly, d: usize) -> Vec<Vec<u64>> {
        let target = self.field(d);
        let Some(deg) = f.degree() else { return Vec::new() };
        let first = target.elements().find(|x| {
            f.eval_in(target.one(), |u, v| target.mul_vec(u, v), x)
                .iter()
                .all(|&c| c == 0)
        });
        let Some(first) = first else { return Vec::new() };
        let mut roots = vec![first];
        loop {
            let next = target.pow_vec(roots.last().unwrap(), self.p);
            if roots.contains(&next) {
                break;
            }
            roots.push(next);
        }
        debug_assert!(roots.len() <= deg);
        roots.sort();
        roots
    }
}

/// All embeddings of an abstract finite field into the canonical copy of the
/// same degree inside the tower. There are exactly `degree` of them and the
/// p-power Frobenius permutes them in a single cycle; the cycle is returned
/// as a permutation on the (lex-sorted) embedding list.
pub fn embeddings_into_omega(
    f: &FiniteFieldRep,
    tower: &OmegaTower,
) -> Result<(Vec<Embedding>, Vec<usize>)> {
    let d = f.degree();
    if d > tower.max_degree() {
        return Err(Error::TowerTooSmall { needed: d, available: tower.max_degree() });
    }
    let roots = tower.roots_in_field(f.minpoly(), d);
    assert_eq!(roots.len(), d, "minimal polynomial splits in its own degree");
    let to_power = f
        .power_basis()
        .inverse()
        .expect("powers of a generator form a basis");
    let target = tower.field(d);
    let embeddings: Vec<Embedding> = roots
        .iter()
        .map(|r| {
            let root_part = tower.root_matrix(d, r, target);
            Embedding {
                field_degree: d,
                into_degree: d,
                matrix: root_part.matmul(&to_power),
            }
        })
        .collect();
    // Frobenius permutation: composing with x -> x^p sends the embedding for
    // root r to the one for r^p.
    let frob = tower.frobenius_power(d, 1);
    let mut perm = Vec::with_capacity(d);
    for e in &embeddings {
        let mapped = frob.matmul(&e.matrix);
        let idx = embeddings
            .iter()
            .position(|e2| e2.matrix == mapped)
            .expect("Frobenius permutes the embeddings");
        perm.push(idx);
    }
    if d > 1 {
        debug_assert!(is_single_cycle(&perm), "Frobenius acts in one d-cycle");
    }
    Ok((embeddings, perm))
}

/// All F_p-algebra embeddings of one finite field into another, as matrices
/// (the Frobenius orbit of one root of the minimal polynomial, sorted).
/// Memoized per field pair.
pub fn fp_field_embeddings(k_field: &Algebra, l_field: &Algebra) -> Result<Vec<Mat>> {
    let rep = FiniteFieldRep::from_field_algebra(k_field)?;
    let d = rep.degree();
    if l_field.dim() % d != 0 {
        return Ok(Vec::new());
    }
    let table = super::cache::embeddings_cached(k_field, l_field, || {
        let minpoly = rep.minpoly();
        let first = l_field.elements().find(|x| {
            minpoly
                .eval_in(l_field.one(), |u, v| l_field.mul_vec(u, v), x)
                .iter()
                .all(|&c| c == 0)
        });
        let Some(first) = first else { return Vec::new() };
        let mut roots = vec![first];
        loop {
            let next = l_field.pow_vec(roots.last().unwrap(), l_field.p());
            if roots.contains(&next) {
                break;
            }
            roots.push(next);
        }
        roots.sort();
        let mut pow_cols = Vec::with_capacity(d);
        let mut pw = k_field.one().to_vec();
        for _ in 0..d {
            pow_cols.push(pw.clone());
            pw = k_field.mul_vec(&pw, rep.generator());
        }
        let to_power = Mat::from_cols(k_field.p(), d, pow_cols)
            .inverse()
            .expect("generator powers form a basis");
        roots
            .iter()
            .map(|r| {
                let mut cols = Vec::with_capacity(d);
                let mut rp = l_field.one().to_vec();
                for _ in 0..d {
                    cols.push(rp.clone());
                    rp = l_field.mul_vec(&rp, r);
                }
                Mat::from_cols(l_field.p(), l_field.dim(), cols).matmul(&to_power)
            })
            .collect()
    });
    Ok(table)
}

pub(crate) fn is_single_cycle(perm: &[usize]) -> bool {
    let n = perm.len();
    if n == 0 {
        return false;
    }
    let mut seen = vec![false; n];
    let mut at = 0usize;
    for _ in 0..n {
        if seen[at] {
            return false;
        }
        seen[at] = true;
        at = perm[at];
    }
    at == 0 && seen.iter().all(|&s| s)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tower_embeddings_commute() {
        let tower = OmegaTower::new(2, 12);
        for dd in 1..=12usize {
            for d in (1..dd).filter(|d| dd % d == 0) {
                for e in (1..d).filter(|e| d % e == 0) {
                    let one_step = tower.embedding(e, dd);
                    let two_step = tower.embedding(d, dd).matmul(&tower.embedding(e, d));
                    assert_eq!(one_step, two_step, "triangle {e} | {d} | {dd}");
                }
                // embeddings are unital ring maps
                let m = tower.embedding(d, dd);
                let src = tower.field(d);
                let dst = tower.field(dd);
                assert_eq!(m.apply(src.one()), dst.one().to_vec());
            }
        }
    }

    #[test]
    fn tower_embeddings_commute_p3() {
        let tower = OmegaTower::new(3, 6);
        for dd in 1..=6usize {
            for d in (1..dd).filter(|d| dd % d == 0) {
                for e in (1..d).filter(|e| d % e == 0) {
                    let one_step = tower.embedding(e, dd);
                    let two_step = tower.embedding(d, dd).matmul(&tower.embedding(e, d));
                    assert_eq!(one_step, two_step);
                }
            }
        }
    }

    #[test]
    fn embeddings_of_f4_and_f8() {
        let tower = OmegaTower::new(2, 6);
        let f4 = FiniteFieldRep::from_field_algebra(tower.field(2)).unwrap();
        let (embs, perm) = embeddings_into_omega(&f4, &tower).unwrap();
        assert_eq!(embs.len(), 2);
        assert_eq!(perm, vec![1, 0]);

        let f8 = FiniteFieldRep::from_field_algebra(tower.field(3)).unwrap();
        let (embs, perm) = embeddings_into_omega(&f8, &tower).unwrap();
        assert_eq!(embs.len(), 3);
        assert!(is_single_cycle(&perm));

        let f2 = FiniteFieldRep::from_field_algebra(&Algebra::prime_field(2)).unwrap();
        let (embs, perm) = embeddings_into_omega(&f2, &tower).unwrap();
        assert_eq!(embs.len(), 1);
        assert_eq!(perm, vec![0]);
    }

    #[test]
    fn tower_too_small_reported() {
        let tower = OmegaTower::new(2, 2);
        let f8 = FiniteFieldRep::from_field_algebra(
            &Algebra::poly_quotient(&first_irreducible(2, 3)),
        )
        .unwrap();
        assert!(matches!(
            embeddings_into_omega(&f8, &tower),
            Err(Error::TowerTooSmall { needed: 3, available: 2 })
        ));
    }
}
