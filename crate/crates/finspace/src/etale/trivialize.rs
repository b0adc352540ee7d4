//! Constructive local triviality: every etale cover sheaf over a
//! well-connected base is split by a finite faithfully flat covering, built
//! by induction over the degree. Degree at most one is split by the
//! structure sheaf; a connected cover of higher degree splits off its
//! diagonal inside A (x) A and recurses on the complement over pw(X, A);
//! disconnected covers are trivialized componentwise and spliced over the
//! tensor product of the component coverings.

use super::{constant_degree, is_etale_cover};
use crate::algebra::{
    is_faithfully_flat, local_decomposition, tensor_over, AlgebraMap, TensorProduct,
};
use crate::linalg::{unit_vec, Mat};
use crate::pwconn::{connectivity_profile, pw_space, wc_components_algebra};
use crate::rspace::{
    pullback_algebra, pushforward_algebra, section_algebra_of, tensor_covers, QcohAlgebra,
    RingedPoset,
};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Per-point dimension guard for certificate algebras.
const DIM_BUDGET: usize = 160;

/// The split of the diagonal inside A (x)_O A: the kernel of multiplication
/// is generated by one idempotent, cutting T into A x C.
pub struct SplitDiagonal {
    /// Per point: T_x = A_x (x)_{O_x} A_x.
    pub tensors: Vec<TensorProduct>,
    /// Per point: the idempotent generating ker(T_x -> A_x).
    pub idempotents: Vec<Vec<u64>>,
    /// Per point: the multiplication map T_x -> A_x.
    pub mult: Vec<AlgebraMap>,
    /// The complement C = e.T as an algebra sheaf over the total space
    /// (X, A), with the first-leg A-algebra structure.
    pub complement: QcohAlgebra,
    /// Per point: the projection T_x -> C_x.
    pub proj_to_c: Vec<AlgebraMap>,
}

pub fn split_diagonal(x_space: &RingedPoset, a: &QcohAlgebra) -> Result<SplitDiagonal> {
    assert_eq!(a.base(), x_space);
    let p = x_space.p();
    let total = a.total_space();
    let mut tensors = Vec::new();
    let mut idempotents = Vec::new();
    let mut mult = Vec::new();
    let mut proj_to_c = Vec::new();
    let mut c_fibers = Vec::new();
    let mut c_structure = Vec::new();
    let mut c_incs = Vec::new();
    for x in 0..x_space.len() {
        let t = tensor_over(a.structure_map(x), a.structure_map(x));
        let cols = t
            .rep_pairs()
            .iter()
            .map(|&(i, j)| a.fiber(x).mul_coeffs(i, j).to_vec())
            .collect();
        let mu = AlgebraMap::new(
            t.algebra.clone(),
            a.fiber(x).clone(),
            Mat::from_cols(p, a.fiber(x).dim(), cols),
        )?;
        let kernel = mu.kernel();
        let e = if t.algebra.is_zero_ring() {
            Vec::new()
        } else {
            let dec = local_decomposition(&t.algebra)?;
            let mut e = vec![0u64; t.algebra.dim()];
            let mut covered = 0usize;
            for (k, idem) in dec.idempotents.iter().enumerate() {
                if kernel.contains(idem) {
                    e = crate::linalg::vec_add(p, &e, idem);
                    covered += dec.factors[k].dim();
                }
            }
            assert_eq!(
                covered,
                kernel.dim(),
                "the kernel of multiplication is a union of local factors"
            );
            e
        };
        let fac = crate::algebra::idempotent_factor(&t.algebra, &e);
        let c_struct = AlgebraMap::new(
            a.fiber(x).clone(),
            fac.factor.clone(),
            fac.projection.matrix().matmul(t.left.matrix()),
        )?;
        c_fibers.push(fac.factor.clone());
        c_structure.push(c_struct);
        proj_to_c.push(fac.projection.clone());
        c_incs.push(fac.inclusion.clone());
        idempotents.push(e);
        mult.push(mu);
        tensors.push(t);
    }
    let mut c_res = BTreeMap::new();
    for &(x, y) in x_space.poset().hasse() {
        let res_t = tensors[x].induced_map(&tensors[y], a.res(x, y), a.res(x, y));
        debug_assert_eq!(
            res_t.apply(&idempotents[x]),
            idempotents[y],
            "diagonal idempotents are compatible"
        );
        let m = proj_to_c[y]
            .matrix()
            .matmul(res_t.matrix())
            .matmul(&c_incs[x]);
        c_res.insert(
            (x, y),
            AlgebraMap::new(c_fibers[x].clone(), c_fibers[y].clone(), m)?,
        );
    }
    let complement = QcohAlgebra::new(total, c_fibers, c_structure, c_res)?;
    Ok(SplitDiagonal { tensors, idempotents, mult, complement, proj_to_c })
}

/// A verified trivialization: a finite faithfully flat covering B with an
/// explicit isomorphism A (x)_O B -> B^n, stored as n pointwise B-algebra
/// projections compatible with restrictions.
pub struct TrivializationCertificate {
    pub cover: QcohAlgebra,
    pub degree: usize,
    /// Per point: the tensor A_x (x)_{O_x} B_x the projections act on.
    pub tensors: Vec<TensorProduct>,
    /// Per point: exactly `degree` projections T_x -> B_x.
    pub projections: Vec<Vec<AlgebraMap>>,
}

/// Direct matrix re-verification of a certificate, independent of how it
/// was constructed.
pub fn verify_certificate(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
    cert: &TrivializationCertificate,
) -> Result<bool> {
    let b = &cert.cover;
    let n = cert.degree;
    for x in 0..x_space.len() {
        if !is_faithfully_flat(b.structure_map(x)) {
            return Ok(false);
        }
        let t = &cert.tensors[x];
        if cert.projections[x].len() != n {
            return Ok(false);
        }
        if t.algebra.dim() != n * b.fiber(x).dim() {
            return Ok(false);
        }
        for pi in &cert.projections[x] {
            if pi.compose(&t.right) != AlgebraMap::identity(b.fiber(x)) {
                return Ok(false);
            }
        }
        let bd = b.fiber(x).dim();
        let mut combined = Mat::zeros(x_space.p(), n * bd, t.algebra.dim());
        for (i, pi) in cert.projections[x].iter().enumerate() {
            for r in 0..bd {
                for c in 0..t.algebra.dim() {
                    combined.set(i * bd + r, c, pi.matrix().get(r, c));
                }
            }
        }
        if !combined.is_invertible() {
            return Ok(false);
        }
    }
    for &(x, y) in x_space.poset().hasse() {
        let res_t = cert.tensors[x].induced_map(&cert.tensors[y], a.res(x, y), b.res(x, y));
        for i in 0..n {
            let lhs = cert.projections[y][i].compose(&res_t);
            let rhs = b.res(x, y).compose(&cert.projections[x][i]);
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Trivialize an etale cover over a well-connected base.
pub fn trivialize(x_space: &RingedPoset, a: &QcohAlgebra) -> Result<TrivializationCertificate> {
    let profile = connectivity_profile(x_space)?;
    if !profile.well_connected {
        return Err(Error::NotWellConnected);
    }
    let check = is_etale_cover(x_space, a)?;
    if !check.holds {
        return Err(Error::NotEtale);
    }
    trivialize_inner(x_space, a)
}

fn trivialize_inner(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
) -> Result<TrivializationCertificate> {
    for x in 0..x_space.len() {
        if a.fiber(x).dim() > DIM_BUDGET {
            return Err(Error::SizeBound(format!(
                "cover fiber of dimension {}",
                a.fiber(x).dim()
            )));
        }
    }
    let n = constant_degree(x_space, a)?;
    if n <= 1 {
        return trivial_base_case(x_space, a, n);
    }
    let comps = wc_components_algebra(x_space, a)?;
    if comps.components.len() >= 2 {
        return trivialize_product(x_space, a, &comps);
    }
    trivialize_connected(x_space, a, n)
}

/// Degrees 0 and 1: the structure sheaf already splits A.
fn trivial_base_case(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
    n: usize,
) -> Result<TrivializationCertificate> {
    let b = QcohAlgebra::structure_sheaf(x_space);
    let p = x_space.p();
    let mut tensors = Vec::new();
    let mut projections = Vec::new();
    for x in 0..x_space.len() {
        let t = tensor_over(a.structure_map(x), &AlgebraMap::identity(x_space.stalk(x)));
        if n == 0 {
            projections.push(Vec::new());
            tensors.push(t);
            continue;
        }
        // T = A (x)_O O = A, and A = O through the structure map
        let to_a = AlgebraMap::new(
            t.algebra.clone(),
            a.fiber(x).clone(),
            Mat::from_cols(
                p,
                a.fiber(x).dim(),
                t.rep_pairs()
                    .iter()
                    .map(|&(i, j)| {
                        let o_img =
                            a.structure_map(x).apply(&unit_vec(x_space.stalk(x).dim(), j));
                        a.fiber(x).mul_vec(&unit_vec(a.fiber(x).dim(), i), &o_img)
                    })
                    .collect(),
            ),
        )?;
        let sigma_inv = a
            .structure_map(x)
            .inverse()
            .ok_or_else(|| Error::InvalidInput("degree-one cover must be O itself".into()))?;
        projections.push(vec![sigma_inv.compose(&to_a)]);
        tensors.push(t);
    }
    Ok(TrivializationCertificate { cover: b, degree: n, tensors, projections })
}

/// The tensor product B_0 (x) ... (x) B_{k-1} built as a left fold, with
/// the canonical leg maps B_l -> B and, per basis vector of B, the tuple of
/// factor basis indices of a pure-tensor representative.
struct FoldedCover {
    cover: QcohAlgebra,
    /// legs[l][x]: B_l fiber -> B fiber.
    legs: Vec<Vec<AlgebraMap>>,
    /// reps[x][basis index of B_x] = (i_0, ..., i_{k-1}).
    reps: Vec<Vec<Vec<usize>>>,
}

fn fold_covers(x_space: &RingedPoset, factors: &[QcohAlgebra]) -> Result<FoldedCover> {
    assert!(!factors.is_empty());
    let mut cover = factors[0].clone();
    let mut legs: Vec<Vec<AlgebraMap>> =
        vec![(0..x_space.len()).map(|x| AlgebraMap::identity(cover.fiber(x))).collect()];
    let mut reps: Vec<Vec<Vec<usize>>> = (0..x_space.len())
        .map(|x| (0..cover.fiber(x).dim()).map(|i| vec![i]).collect())
        .collect();
    for next in factors.iter().skip(1) {
        let folded = tensor_covers(&cover, next)?;
        let mut new_reps = Vec::with_capacity(x_space.len());
        let mut step_tensors = Vec::with_capacity(x_space.len());
        for x in 0..x_space.len() {
            let t = tensor_over(cover.structure_map(x), next.structure_map(x));
            debug_assert_eq!(&t.algebra, folded.fiber(x));
            let pairs = t.rep_pairs();
            let mut r = Vec::with_capacity(pairs.len());
            for &(prev, cur) in &pairs {
                let mut tuple = reps[x][prev].clone();
                tuple.push(cur);
                r.push(tuple);
            }
            new_reps.push(r);
            step_tensors.push(t);
        }
        // update old legs through the left inclusion, add the new right leg
        for leg in legs.iter_mut() {
            for (x, m) in leg.iter_mut().enumerate() {
                *m = step_tensors[x].left.compose(m);
            }
        }
        legs.push((0..x_space.len()).map(|x| step_tensors[x].right.clone()).collect());
        reps = new_reps;
        cover = folded;
    }
    Ok(FoldedCover { cover, legs, reps })
}

/// Disconnected case: trivialize each well-connected component, take the
/// tensor product of the component coverings, and assemble the projections
/// through the component split of A.
fn trivialize_product(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
    comps: &crate::pwconn::AlgebraComponents,
) -> Result<TrivializationCertificate> {
    let p = x_space.p();
    let k = comps.components.len();
    let mut certs = Vec::with_capacity(k);
    for aj in &comps.components {
        certs.push(trivialize_inner(x_space, aj)?);
    }
    let folded = fold_covers(x_space, &certs.iter().map(|c| c.cover.clone()).collect::<Vec<_>>())?;
    let b = folded.cover.clone();
    let degree: usize = certs.iter().map(|c| c.degree).sum();
    // per-point component offsets inside prod_j (A_j)_x
    let mut tensors = Vec::with_capacity(x_space.len());
    let mut projections = Vec::with_capacity(x_space.len());
    for x in 0..x_space.len() {
        let t_new = tensor_over(a.structure_map(x), b.structure_map(x));
        let mut offsets = Vec::with_capacity(k);
        let mut off = 0usize;
        for aj in &comps.components {
            offsets.push(off);
            off += aj.fiber(x).dim();
        }
        let mut pis: Vec<AlgebraMap> = Vec::with_capacity(degree);
        for (j, cert) in certs.iter().enumerate() {
            let aj = &comps.components[j];
            let aj_dim = aj.fiber(x).dim();
            // pr_j: A_x -> (A_j)_x as rows of the component iso
            let iso = comps.iso[x].matrix();
            let mut pr = Mat::zeros(p, aj_dim, a.fiber(x).dim());
            for r in 0..aj_dim {
                for c in 0..a.fiber(x).dim() {
                    pr.set(r, c, iso.get(offsets[j] + r, c));
                }
            }
            for pi in &cert.projections[x] {
                let cols = t_new
                    .rep_pairs()
                    .iter()
                    .map(|&(ia, jb)| {
                        let tuple = &folded.reps[x][jb];
                        let aj_part = pr.apply(&unit_vec(a.fiber(x).dim(), ia));
                        let in_bj = pi.apply(&cert.tensors[x].pure(
                            &aj_part,
                            &unit_vec(cert.cover.fiber(x).dim(), tuple[j]),
                        ));
                        let mut val = folded.legs[j][x].apply(&in_bj);
                        for (l, leg) in folded.legs.iter().enumerate() {
                            if l == j {
                                continue;
                            }
                            let other = leg[x]
                                .apply(&unit_vec(certs[l].cover.fiber(x).dim(), tuple[l]));
                            val = b.fiber(x).mul_vec(&val, &other);
                        }
                        val
                    })
                    .collect();
                pis.push(AlgebraMap::new(
                    t_new.algebra.clone(),
                    b.fiber(x).clone(),
                    Mat::from_cols(p, b.fiber(x).dim(), cols),
                )?);
            }
        }
        tensors.push(t_new);
        projections.push(pis);
    }
    Ok(TrivializationCertificate { cover: b, degree, tensors, projections })
}

/// Connected case: split the diagonal, recurse on the complement over
/// pw(X, A), push the covering forward and assemble.
fn trivialize_connected(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
    n: usize,
) -> Result<TrivializationCertificate> {
    let p = x_space.p();
    let sd = split_diagonal(x_space, a)?;
    let total = a.total_space();
    let pwt = pw_space(&total)?;
    let xp = &pwt.space;
    debug_assert!(connectivity_profile(xp)?.well_connected);
    // C' = pullback of the complement along pw(X, A) -> (X, A)
    let cprime = pullback_algebra(&pwt.projection, &sd.complement)?;
    // per pw-point tensor data (canonically equal to the pullback fibers)
    let cprime_tensors: Vec<TensorProduct> = (0..xp.len())
        .map(|i| {
            let parent = pwt.projection.apply(i);
            tensor_over(sd.complement.structure_map(parent), pwt.projection.comorphism(i))
        })
        .collect();
    #[cfg(debug_assertions)]
    for (i, t) in cprime_tensors.iter().enumerate() {
        debug_assert_eq!(&t.algebra, cprime.fiber(i));
    }
    let rec = trivialize_inner(xp, &cprime)?;
    // push the covering down: B over X has the section fibers of B' over
    // the pw fibers, with structure through A
    let b_on_total = pushforward_algebra(&pwt.projection, &rec.cover)?;
    let b_fibers: Vec<_> = (0..x_space.len()).map(|x| b_on_total.fiber(x).clone()).collect();
    let b_structure: Vec<AlgebraMap> = (0..x_space.len())
        .map(|x| b_on_total.structure_map(x).compose(a.structure_map(x)))
        .collect();
    let mut b_res = BTreeMap::new();
    for &(x, y) in x_space.poset().hasse() {
        b_res.insert((x, y), b_on_total.res(x, y).clone());
    }
    let b = QcohAlgebra::new(x_space.clone(), b_fibers, b_structure, b_res)?;
    // evaluation of sections at the pw-points over x: block decomposition
    let mut blocks: Vec<(Vec<usize>, Mat, Mat)> = Vec::new(); // (pw pts, E, E^-1)
    for x in 0..x_space.len() {
        let u = pwt.projection.preimage_min_open(x);
        let sec = section_algebra_of(&rec.cover, &u)?;
        debug_assert_eq!(sec.algebra, *b.fiber(x));
        let over_x: Vec<usize> =
            (0..xp.len()).filter(|&i| pwt.projection.apply(i) == x).collect();
        let mut rows = 0usize;
        for &i in &over_x {
            rows += rec.cover.fiber(i).dim();
        }
        let mut e_mat = Mat::zeros(p, rows, b.fiber(x).dim());
        let mut roff = 0usize;
        for &i in &over_x {
            let pos = sec.points.iter().position(|&t| t == i).expect("pw point in preimage");
            let ev = sec.eval(pos, rec.cover.fiber(i));
            for r in 0..rec.cover.fiber(i).dim() {
                for c in 0..b.fiber(x).dim() {
                    e_mat.set(roff + r, c, ev.matrix().get(r, c));
                }
            }
            roff += rec.cover.fiber(i).dim();
        }
        let e_inv = e_mat
            .inverse()
            .ok_or_else(|| Error::InvalidInput("section evaluation is not bijective".into()))?;
        blocks.push((over_x, e_mat, e_inv));
    }
    // assemble the certificate
    let mut tensors = Vec::with_capacity(x_space.len());
    let mut projections = Vec::with_capacity(x_space.len());
    for x in 0..x_space.len() {
        let t_new = tensor_over(a.structure_map(x), b.structure_map(x));
        let tau = b_on_total.structure_map(x); // A_x -> B_x
        let (over_x, e_mat, e_inv) = &blocks[x];
        // projection 1: the diagonal a (x) b -> tau(a) b
        let diag_cols = t_new
            .rep_pairs()
            .iter()
            .map(|&(ia, jb)| {
                let ta = tau.apply(&unit_vec(a.fiber(x).dim(), ia));
                b.fiber(x).mul_vec(&ta, &unit_vec(b.fiber(x).dim(), jb))
            })
            .collect();
        let mut pis = vec![AlgebraMap::new(
            t_new.algebra.clone(),
            b.fiber(x).clone(),
            Mat::from_cols(p, b.fiber(x).dim(), diag_cols),
        )?];
        // projections 2..n: through C (x)_A B, blockwise over the pw fiber
        for rec_idx in 0..(n - 1) {
            let cols = t_new
                .rep_pairs()
                .iter()
                .map(|&(ia, jb)| {
                    // e.(1 (x) a) in C_x; C carries the first-leg structure,
                    // so a enters through the second leg
                    let c_part = sd.proj_to_c[x].apply(
                        &sd.tensors[x]
                            .pure(a.fiber(x).one(), &unit_vec(a.fiber(x).dim(), ia)),
                    );
                    // block coordinates of b
                    let beta = e_mat.apply(&unit_vec(b.fiber(x).dim(), jb));
                    let mut out_blocks = Vec::with_capacity(e_mat.rows());
                    let mut off = 0usize;
                    for &i in over_x {
                        let bi_dim = rec.cover.fiber(i).dim();
                        let beta_i = beta[off..off + bi_dim].to_vec();
                        // c into C'_(i) through the pw projection leg
                        let c_in_cpi = cprime_tensors[i].pure(
                            &c_part,
                            xp.stalk(i).one(),
                        );
                        let class = rec.tensors[i].pure(&c_in_cpi, &beta_i);
                        let val = rec.projections[i][rec_idx].apply(&class);
                        out_blocks.extend(val);
                        off += bi_dim;
                    }
                    e_inv.apply(&out_blocks)
                })
                .collect();
            pis.push(AlgebraMap::new(
                t_new.algebra.clone(),
                b.fiber(x).clone(),
                Mat::from_cols(p, b.fiber(x).dim(), cols),
            )?);
        }
        tensors.push(t_new);
        projections.push(pis);
    }
    Ok(TrivializationCertificate { cover: b, degree: n, tensors, projections })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rspace::fixtures::*;

    fn point_cover(alg: crate::algebra::Algebra) -> (RingedPoset, QcohAlgebra) {
        let pt = RingedPoset::point(f2());
        let s = AlgebraMap::new(
            f2(),
            alg.clone(),
            Mat::from_cols(2, alg.dim(), vec![alg.one().to_vec()]),
        )
        .unwrap();
        let a =
            QcohAlgebra::new(pt.clone(), vec![alg], vec![s], BTreeMap::new()).unwrap();
        (pt, a)
    }

    #[test]
    fn split_diagonal_of_f4() {
        let (pt, a) = point_cover(f4());
        let sd = split_diagonal(&pt, &a).unwrap();
        // F_4 (x) F_4 = F_4 x F_4: complement is one more F_4
        assert_eq!(sd.complement.fiber(0).dim(), 2);
        assert!(sd.idempotents[0].iter().any(|&c| c != 0));
    }

    #[test]
    fn split_diagonal_of_structure_sheaf_is_zero() {
        let pt = RingedPoset::point(f2());
        let o = QcohAlgebra::structure_sheaf(&pt);
        let sd = split_diagonal(&pt, &o).unwrap();
        assert_eq!(sd.complement.fiber(0).dim(), 0);
        assert!(sd.idempotents[0].iter().all(|&c| c == 0));
    }

    #[test]
    fn trivialize_f4_over_point() {
        let (pt, a) = point_cover(f4());
        let cert = trivialize(&pt, &a).unwrap();
        assert_eq!(cert.degree, 2);
        assert_eq!(cert.cover.fiber(0).dim(), 2);
        assert!(verify_certificate(&pt, &a, &cert).unwrap());
    }

    #[test]
    fn trivialize_free_cover() {
        let pt = RingedPoset::point(f2());
        let o3 = QcohAlgebra::free(&pt, 3);
        let cert = trivialize(&pt, &o3).unwrap();
        assert_eq!(cert.degree, 3);
        assert_eq!(cert.cover.fiber(0).dim(), 1, "O^3 is split by O itself");
        assert!(verify_certificate(&pt, &o3, &cert).unwrap());
    }

    #[test]
    fn trivialize_f4_x_f2() {
        use crate::rspace::product_covers;
        let (pt, a) = point_cover(f4());
        let o = QcohAlgebra::structure_sheaf(&pt);
        let prod = product_covers(&a, &o).unwrap();
        let cert = trivialize(&pt, &prod).unwrap();
        assert_eq!(cert.degree, 3);
        assert!(verify_certificate(&pt, &prod, &cert).unwrap());
    }

    #[test]
    fn trivialize_f8_over_point() {
        let f8 = crate::algebra::Algebra::poly_quotient(&crate::poly::Poly::new(
            2,
            vec![1, 1, 0, 1],
        ));
        let (pt, a) = point_cover(f8);
        let cert = trivialize(&pt, &a).unwrap();
        assert_eq!(cert.degree, 3);
        assert!(verify_certificate(&pt, &a, &cert).unwrap());
    }

    #[test]
    fn trivialize_rejects_bad_inputs() {
        // not well-connected base
        let xv = xv();
        let o = QcohAlgebra::structure_sheaf(&xv);
        assert!(matches!(trivialize(&xv, &o), Err(Error::NotWellConnected)));
        // non-etale cover
        let dn = crate::algebra::Algebra::poly_quotient(&crate::poly::Poly::new(
            2,
            vec![0, 0, 1],
        ));
        let (pt, a) = point_cover(dn);
        assert!(matches!(trivialize(&pt, &a), Err(Error::NotEtale)));
    }
}
