//! Hom-sets, automorphism groups, quotients by automorphism subgroups and
//! the epi/mono image factorization for algebra sheaves over a base.
//!
//! A morphism of quasi-coherent covers is determined by its values at the
//! minimal points of the base: everything above is transported through the
//! quasi-coherence isomorphisms. Pointwise enumeration splits the base ring
//! into local factors and either matches field factors (semisimple case) or
//! brute-forces images of a small generating set.

use super::CoverMorphism;
use crate::algebra::{
    idempotent_factor, local_decomposition, module_base_change, nilradical, Algebra,
    AlgebraMap,
};
use crate::linalg::{unit_vec, vec_sub, Mat, Subspace};
use crate::rspace::QcohAlgebra;
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Work bound for brute-force hom enumeration.
const HOM_WORK_BOUND: u128 = 1 << 22;

fn fiber_actions(a: &QcohAlgebra, x: usize) -> Vec<Mat> {
    let s = a.structure_map(x);
    (0..s.src().dim())
        .map(|k| a.fiber(x).mul_matrix(&s.apply(&unit_vec(s.src().dim(), k))))
        .collect()
}

/// All unital algebra maps A -> B commuting with the structure maps from a
/// common base algebra O.
pub fn algebra_homs_over(sa: &AlgebraMap, sb: &AlgebraMap) -> Result<Vec<AlgebraMap>> {
    assert_eq!(sa.src(), sb.src(), "common base required");
    let o = sa.src();
    if o.is_zero_ring() {
        // both A and B are zero rings; the unique map
        return Ok(vec![AlgebraMap::identity(sa.dst())]);
    }
    let dec = local_decomposition(o)?;
    if dec.len() > 1 {
        // split along the base idempotents and recurse factorwise
        let a = sa.dst();
        let b = sb.dst();
        let mut per_factor: Vec<Vec<(AlgebraMap, FactorData)>> = Vec::new();
        for (k, e) in dec.idempotents.iter().enumerate() {
            let fa = idempotent_factor(a, &sa.apply(e));
            let fb = idempotent_factor(b, &sb.apply(e));
            let o_inc = idempotent_factor(o, e);
            // structure maps of the factor parts over the factor base
            let sa_k = AlgebraMap::new_unchecked(
                dec.factors[k].clone(),
                fa.factor.clone(),
                fa.projection.matrix().matmul(sa.matrix()).matmul(&o_inc.inclusion),
            );
            let sb_k = AlgebraMap::new_unchecked(
                dec.factors[k].clone(),
                fb.factor.clone(),
                fb.projection.matrix().matmul(sb.matrix()).matmul(&o_inc.inclusion),
            );
            let homs = algebra_homs_over(&sa_k, &sb_k)?;
            let data = FactorData {
                a_proj: fa.projection.matrix().clone(),
                b_inc: fb.inclusion.clone(),
            };
            per_factor.push(homs.into_iter().map(|h| (h, data.clone())).collect());
        }
        // cartesian assembly
        let mut combos: Vec<Mat> = vec![Mat::zeros(o.p(), b.dim(), a.dim())];
        for options in &per_factor {
            let mut next = Vec::new();
            for base_mat in &combos {
                for (h, data) in options {
                    let block = data.b_inc.matmul(h.matrix()).matmul(&data.a_proj);
                    let mut m = base_mat.clone();
                    for i in 0..b.dim() {
                        for j in 0..a.dim() {
                            let v = (m.get(i, j) + block.get(i, j)) % o.p();
                            m.set(i, j, v);
                        }
                    }
                    next.push(m);
                }
            }
            combos = next;
            if combos.is_empty() {
                break;
            }
        }
        let mut out = Vec::new();
        for m in combos {
            if let Ok(h) = AlgebraMap::new(a.clone(), b.clone(), m) {
                if h.compose(sa) == *sb {
                    out.push(h);
                }
            }
        }
        out.sort_by_key(hom_sort_key);
        return Ok(out);
    }
    // local base: field or not
    if nilradical(o).is_zero() {
        semisimple_homs(sa, sb)
    } else {
        brute_force_homs(sa, sb)
    }
}

#[derive(Clone)]
struct FactorData {
    a_proj: Mat,
    b_inc: Mat,
}

fn hom_sort_key(h: &AlgebraMap) -> Vec<u64> {
    let m = h.matrix();
    let mut v = Vec::with_capacity(m.rows() * m.cols());
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            v.push(m.get(i, j));
        }
    }
    v
}

/// Homs over a field base: decompose both sides into field factors and match
/// factors along embeddings.
fn semisimple_homs(sa: &AlgebraMap, sb: &AlgebraMap) -> Result<Vec<AlgebraMap>> {
    let kappa = sa.src();
    let a = sa.dst();
    let b = sb.dst();
    if a.is_zero_ring() || b.is_zero_ring() {
        if b.is_zero_ring() {
            // the zero ring is final among algebras
            let m = Mat::zeros(kappa.p(), 0, a.dim());
            return Ok(vec![AlgebraMap::new_unchecked(a.clone(), b.clone(), m)]);
        }
        return Ok(Vec::new()); // no maps out of the zero ring into a nonzero one
    }
    if !nilradical(a).is_zero() || !nilradical(b).is_zero() {
        return brute_force_homs(sa, sb);
    }
    let dec_a = local_decomposition(a)?;
    let dec_b = local_decomposition(b)?;
    let mut a_parts = Vec::new();
    for (k, e) in dec_a.idempotents.iter().enumerate() {
        let f = idempotent_factor(a, e);
        let sk = AlgebraMap::new_unchecked(
            kappa.clone(),
            dec_a.factors[k].clone(),
            f.projection.matrix().matmul(sa.matrix()),
        );
        a_parts.push((f, sk));
    }
    let mut choices_per_j: Vec<Vec<Mat>> = Vec::new();
    for (j, ej) in dec_b.idempotents.iter().enumerate() {
        let fb = idempotent_factor(b, ej);
        let sbj = AlgebraMap::new_unchecked(
            kappa.clone(),
            dec_b.factors[j].clone(),
            fb.projection.matrix().matmul(sb.matrix()),
        );
        let mut options = Vec::new();
        for (fa, sak) in &a_parts {
            for emb in field_embeddings_over(&sak.dst().clone(), sak, &sbj)? {
                // A -> K_i -> L_j -> B
                options.push(
                    fb.inclusion.matmul(emb.matrix()).matmul(fa.projection.matrix()),
                );
            }
        }
        choices_per_j.push(options);
    }
    let mut combos: Vec<Mat> = vec![Mat::zeros(kappa.p(), b.dim(), a.dim())];
    for options in &choices_per_j {
        let mut next = Vec::new();
        for base_mat in &combos {
            for block in options {
                let mut m = base_mat.clone();
                for i in 0..b.dim() {
                    for jx in 0..a.dim() {
                        let v = (m.get(i, jx) + block.get(i, jx)) % kappa.p();
                        m.set(i, jx, v);
                    }
                }
                next.push(m);
            }
        }
        combos = next;
    }
    // each combo is a blockwise sum of ring maps through orthogonal
    // idempotents, hence a homomorphism; only the base-compatibility is
    // checked here
    let mut out = Vec::new();
    for m in combos {
        let h = AlgebraMap::trusted(a.clone(), b.clone(), m);
        if h.compose(sa) == *sb {
            out.push(h);
        }
    }
    out.sort_by_key(hom_sort_key);
    Ok(out)
}

/// Embeddings of one finite field into another commuting with maps from a
/// common base field. The raw F_p-embedding table is memoized per field
/// pair; only the base-compatibility filter runs per call.
fn field_embeddings_over(
    k_field: &Algebra,
    sk: &AlgebraMap,
    sl: &AlgebraMap,
) -> Result<Vec<AlgebraMap>> {
    let l_field = sl.dst();
    let all = crate::algebra::fp_field_embeddings(k_field, l_field)?;
    let mut out = Vec::new();
    for m in all {
        let emb = AlgebraMap::trusted(k_field.clone(), l_field.clone(), m);
        if emb.compose(sk) == *sl {
            out.push(emb);
        }
    }
    Ok(out)
}

/// Provenance of a spanning set of A as an O-algebra: base image, free
/// generators, or products of earlier entries.
enum Expr {
    FromBase(usize),
    Gen(usize),
    Prod(usize, usize),
}

/// Brute-force enumeration over images of a minimal generating set, for a
/// local base with nilpotents (or non-reduced fibers).
fn brute_force_homs(sa: &AlgebraMap, sb: &AlgebraMap) -> Result<Vec<AlgebraMap>> {
    let o = sa.src();
    let a = sa.dst();
    let b = sb.dst();
    let p = o.p();
    if b.is_zero_ring() {
        let m = Mat::zeros(p, 0, a.dim());
        return Ok(vec![AlgebraMap::new_unchecked(a.clone(), b.clone(), m)]);
    }
    if a.is_zero_ring() {
        return Ok(Vec::new());
    }
    // spanning set with provenance
    let mut tracked: Vec<(Vec<u64>, Expr)> = Vec::new();
    let mut span = Subspace::zero(p, a.dim());
    let push = |v: Vec<u64>, e: Expr, tracked: &mut Vec<(Vec<u64>, Expr)>,
                    span: &mut Subspace| {
        if !span.contains(&v) {
            let mut vs = span.basis().to_vec();
            vs.push(v.clone());
            *span = Subspace::from_spanning(p, a.dim(), vs);
            tracked.push((v, e));
            true
        } else {
            false
        }
    };
    for i in 0..o.dim() {
        push(sa.apply(&unit_vec(o.dim(), i)), Expr::FromBase(i), &mut tracked, &mut span);
    }
    let mut n_gens = 0usize;
    loop {
        // close under products
        let mut changed = true;
        while changed {
            changed = false;
            let len = tracked.len();
            for s in 0..len {
                for t in s..len {
                    let prod = a.mul_vec(&tracked[s].0.clone(), &tracked[t].0.clone());
                    if push(prod, Expr::Prod(s, t), &mut tracked, &mut span) {
                        changed = true;
                    }
                }
            }
        }
        if span.dim() == a.dim() {
            break;
        }
        let next = (0..a.dim())
            .map(|i| unit_vec(a.dim(), i))
            .find(|v| !span.contains(v))
            .expect("span is proper");
        push(next, Expr::Gen(n_gens), &mut tracked, &mut span);
        n_gens += 1;
    }
    let card_b = b.cardinality().unwrap_or(u128::MAX);
    let work = card_b.saturating_pow(n_gens as u32);
    if work > HOM_WORK_BOUND {
        return Err(Error::SizeBound(format!(
            "{} candidate generator images",
            work
        )));
    }
    // matrix of tracked values (a basis of A, by construction)
    let value_mat = Mat::from_cols(p, a.dim(), tracked.iter().map(|(v, _)| v.clone()).collect());
    let value_inv = value_mat.inverse().expect("tracked values are independent");
    let mut out = Vec::new();
    let gen_tuples: Vec<Vec<Vec<u64>>> = if n_gens == 0 {
        vec![Vec::new()]
    } else {
        cartesian_elements(b, n_gens)
    };
    for tuple in gen_tuples {
        let mut images: Vec<Vec<u64>> = Vec::with_capacity(tracked.len());
        for (_, e) in &tracked {
            let img = match e {
                Expr::FromBase(i) => sb.apply(&unit_vec(o.dim(), *i)),
                Expr::Gen(k) => tuple[*k].clone(),
                Expr::Prod(s, t) => b.mul_vec(&images[*s], &images[*t]),
            };
            images.push(img);
        }
        // linear extension: column j = sum coords(e_j) . images
        let img_mat = Mat::from_cols(p, b.dim(), images);
        let m = img_mat.matmul(&value_inv);
        if let Ok(h) = AlgebraMap::new(a.clone(), b.clone(), m) {
            if h.compose(sa) == *sb {
                out.push(h);
            }
        }
    }
    out.sort_by_key(hom_sort_key);
    out.dedup();
    Ok(out)
}

fn cartesian_elements(b: &Algebra, n: usize) -> Vec<Vec<Vec<u64>>> {
    let elements: Vec<Vec<u64>> = b.elements().collect();
    let mut out: Vec<Vec<Vec<u64>>> = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for tup in &out {
            for e in &elements {
                let mut t = tup.clone();
                t.push(e.clone());
                next.push(t);
            }
        }
        out = next;
    }
    out
}

/// Transport a pointwise map along a Hasse edge through the quasi-coherence
/// isomorphisms: h_y = (canB) o (h_x (x) id) o (canA)^{-1}.
fn transport_along_edge(
    a: &QcohAlgebra,
    b: &QcohAlgebra,
    h_x: &Mat,
    x: usize,
    y: usize,
) -> Result<Mat> {
    let base = a.base();
    let r = base.res(x, y);
    let bc_a = module_base_change(a.fiber(x).dim(), &fiber_actions(a, x), r);
    let bc_b = module_base_change(b.fiber(x).dim(), &fiber_actions(b, x), r);
    let can_a = bc_a.induced_to(a.res(x, y).matrix(), &fiber_actions(a, y), a.fiber(y).dim());
    let can_b = bc_b.induced_to(b.res(x, y).matrix(), &fiber_actions(b, y), b.fiber(y).dim());
    let can_a_inv = can_a
        .inverse()
        .ok_or_else(|| Error::NotQcoh("transport needs quasi-coherence".into()))?;
    let mid = bc_a.map_tensor_id(&bc_b, h_x);
    Ok(can_b.matmul(&mid).matmul(&can_a_inv))
}

/// All cover morphisms A -> B: enumerate at minimal points, transport up,
/// keep the globally consistent ones.
pub fn hom_set(a: &QcohAlgebra, b: &QcohAlgebra) -> Result<Vec<CoverMorphism>> {
    assert_eq!(a.base(), b.base());
    let base = a.base();
    let poset = base.poset();
    let minimal = poset.minimal_points();
    let mut options_per_min = Vec::new();
    for &m in &minimal {
        options_per_min.push(algebra_homs_over(a.structure_map(m), b.structure_map(m))?);
    }
    let mut combo_count: u128 = 1;
    for o in &options_per_min {
        combo_count = combo_count.saturating_mul(o.len().max(1) as u128);
    }
    if combo_count > 1_000_000 {
        return Err(Error::SizeBound(format!("{combo_count} hom combinations")));
    }
    let mut order: Vec<usize> = (0..base.len()).collect();
    order.sort_by_key(|&i| poset.closure(i).len());
    let mut out = Vec::new();
    let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
    // iterate over the cartesian product of minimal choices
    while let Some(choice) = stack.pop() {
        if choice.len() < minimal.len() {
            if options_per_min[choice.len()].is_empty() {
                continue;
            }
            for k in (0..options_per_min[choice.len()].len()).rev() {
                let mut c = choice.clone();
                c.push(k);
                stack.push(c);
            }
            continue;
        }
        // propagate upward
        let mut maps: Vec<Option<Mat>> = vec![None; base.len()];
        for (mi, &m) in minimal.iter().enumerate() {
            maps[m] = Some(options_per_min[mi][choice[mi]].matrix().clone());
        }
        let mut consistent = true;
        'points: for &y in &order {
            if maps[y].is_some() {
                continue;
            }
            for &(x, y2) in poset.hasse() {
                if y2 != y {
                    continue;
                }
                let hx = maps[x].clone().expect("processed in order");
                let hy = transport_along_edge(a, b, &hx, x, y)?;
                match &maps[y] {
                    None => maps[y] = Some(hy),
                    Some(prev) => {
                        if prev != &hy {
                            consistent = false;
                            break 'points;
                        }
                    }
                }
            }
        }
        if !consistent {
            continue;
        }
        let maps: Vec<AlgebraMap> = match maps
            .into_iter()
            .enumerate()
            .map(|(x, m)| {
                AlgebraMap::new(
                    a.fiber(x).clone(),
                    b.fiber(x).clone(),
                    m.expect("all points reachable from minimal ones"),
                )
            })
            .collect::<Result<_>>()
        {
            Ok(v) => v,
            Err(_) => continue,
        };
        if let Ok(cm) = CoverMorphism::new(a.clone(), b.clone(), maps) {
            out.push(cm);
        }
    }
    out.sort_by_key(|cm| {
        let mut key = Vec::new();
        for x in 0..base.len() {
            key.extend(hom_sort_key(cm.map_at(x)));
        }
        key
    });
    Ok(out)
}

/// The automorphism group of a cover, with its composition table.
pub struct AutGroup {
    pub elements: Vec<CoverMorphism>,
    /// table[i][j] = index of elements[i] o elements[j].
    pub table: Vec<Vec<usize>>,
}

impl AutGroup {
    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index_of(&self, m: &CoverMorphism) -> Option<usize> {
        self.elements.iter().position(|e| e == m)
    }
}

pub fn aut_group(a: &QcohAlgebra) -> Result<AutGroup> {
    let autos: Vec<CoverMorphism> = hom_set(a, a)?
        .into_iter()
        .filter(|m| m.is_isomorphism())
        .collect();
    let mut table = Vec::with_capacity(autos.len());
    for g in &autos {
        let mut row = Vec::with_capacity(autos.len());
        for h in &autos {
            let gh = g.compose(h);
            let idx = autos
                .iter()
                .position(|e| e == &gh)
                .expect("automorphisms are closed under composition");
            row.push(idx);
        }
        table.push(row);
    }
    Ok(AutGroup { elements: autos, table })
}

/// The invariant subsheaf A^G for a subgroup G of automorphisms, with its
/// inclusion into A. Quasi-coherence of the result is re-verified.
pub fn quotient_by_group(
    a: &QcohAlgebra,
    group: &[CoverMorphism],
) -> Result<(QcohAlgebra, CoverMorphism)> {
    let base = a.base().clone();
    let p = base.p();
    // subgroup check: identity present, closed under composition
    let id = CoverMorphism::identity(a);
    if !group.iter().any(|g| g == &id) {
        return Err(Error::NotSubgroup("missing identity".into()));
    }
    for g in group {
        if g.src() != a || g.dst() != a || !g.is_isomorphism() {
            return Err(Error::NotSubgroup("not an automorphism of A".into()));
        }
        for h in group {
            let gh = g.compose(h);
            if !group.iter().any(|e| e == &gh) {
                return Err(Error::NotSubgroup("not closed under composition".into()));
            }
        }
    }
    let mut inv_spaces = Vec::new();
    for x in 0..base.len() {
        let n = a.fiber(x).dim();
        let mut rows = Vec::new();
        for g in group {
            let m = g.map_at(x).matrix();
            for i in 0..n {
                let mut row = Vec::with_capacity(n);
                for j in 0..n {
                    let v = m.get(i, j);
                    row.push(if i == j { crate::linalg::fp_sub(p, v, 1) } else { v });
                }
                rows.push(row);
            }
        }
        let kernel = Mat::from_rows(p, rows).kernel_basis();
        inv_spaces.push(Subspace::from_spanning(p, n, kernel));
    }
    // build the invariant subalgebras
    let mut fibers = Vec::new();
    let mut structure = Vec::new();
    let mut inclusions = Vec::new();
    for x in 0..base.len() {
        let space = &inv_spaces[x];
        let big = a.fiber(x);
        let basis: Vec<Vec<u64>> = space.basis().to_vec();
        let dim = basis.len();
        let mut mul = vec![0u64; dim * dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let prod = big.mul_vec(&basis[i], &basis[j]);
                let coords = space
                    .coords_of(&prod)
                    .expect("invariants are closed under multiplication");
                for (k, &c) in coords.iter().enumerate() {
                    mul[(i * dim + j) * dim + k] = c;
                }
            }
        }
        let one = space.coords_of(&big.one().to_vec()).expect("one is invariant");
        let alg = Algebra::new_unchecked(p, dim, mul, one);
        let scols = (0..base.stalk(x).dim())
            .map(|i| {
                space
                    .coords_of(&a.structure_map(x).apply(&unit_vec(base.stalk(x).dim(), i)))
                    .expect("structure image is invariant")
            })
            .collect();
        structure.push(AlgebraMap::new_unchecked(
            base.stalk(x).clone(),
            alg.clone(),
            Mat::from_cols(p, dim, scols),
        ));
        inclusions.push(Mat::from_cols(p, big.dim(), basis));
        fibers.push(alg);
    }
    let mut res = BTreeMap::new();
    for &(x, y) in base.poset().hasse() {
        let cols = inv_spaces[x]
            .basis()
            .iter()
            .map(|v| {
                inv_spaces[y]
                    .coords_of(&a.res(x, y).apply(v))
                    .expect("restrictions preserve invariants")
            })
            .collect();
        res.insert(
            (x, y),
            AlgebraMap::new(
                fibers[x].clone(),
                fibers[y].clone(),
                Mat::from_cols(p, fibers[y].dim(), cols),
            )?,
        );
    }
    let quotient = QcohAlgebra::new(base.clone(), fibers, structure, res)?;
    if !quotient.is_quasi_coherent() {
        return Err(Error::NotQcoh("invariant sheaf lost quasi-coherence".into()));
    }
    let inc_maps: Vec<AlgebraMap> = (0..base.len())
        .map(|x| {
            AlgebraMap::new(
                quotient.fiber(x).clone(),
                a.fiber(x).clone(),
                inclusions[x].clone(),
            )
        })
        .collect::<Result<_>>()?;
    let inclusion = CoverMorphism::new(quotient.clone(), a.clone(), inc_maps)?;
    Ok((quotient, inclusion))
}

/// The image factorization of a cover morphism: A -> A/ker (epi), then
/// A/ker -> B (mono), with the complementary summand A/ker^C making
/// A isomorphic to the product of the two quotients.
pub struct Factorization {
    pub image: QcohAlgebra,
    pub epi: CoverMorphism,
    pub mono: CoverMorphism,
    pub complement: QcohAlgebra,
    pub to_complement: CoverMorphism,
}

pub fn image_factorization(f: &CoverMorphism) -> Result<Factorization> {
    let a = f.src();
    let b = f.dst();
    let base = a.base().clone();
    let p = base.p();
    // per point: the kernel is the span of the local factors killed by f
    let mut keep_idem = Vec::new();
    let mut drop_idem = Vec::new();
    for x in 0..base.len() {
        let fx = f.map_at(x);
        if a.fiber(x).is_zero_ring() {
            keep_idem.push(Vec::new());
            drop_idem.push(Vec::new());
            continue;
        }
        let dec = local_decomposition(a.fiber(x))?;
        let mut keep = vec![0u64; a.fiber(x).dim()];
        for e in &dec.idempotents {
            if fx.apply(e).iter().any(|&c| c != 0) {
                keep = crate::linalg::vec_add(p, &keep, e);
            }
        }
        let drop = vec_sub(p, &a.fiber(x).one().to_vec(), &keep);
        keep_idem.push(keep);
        drop_idem.push(drop);
    }
    // idempotents must be compatible with restrictions
    for &(x, y) in base.poset().hasse() {
        debug_assert_eq!(a.res(x, y).apply(&keep_idem[x]), keep_idem[y]);
    }
    let image = subsheaf_by_idempotents(a, &keep_idem)?;
    let complement = subsheaf_by_idempotents(a, &drop_idem)?;
    let epi = projection_morphism(a, &image, &keep_idem)?;
    let to_complement = projection_morphism(a, &complement, &drop_idem)?;
    // mono: image -> B via f after inclusion
    let mono_maps: Vec<AlgebraMap> = (0..base.len())
        .map(|x| {
            let inc = idempotent_factor(a.fiber(x), &keep_idem[x]).inclusion;
            AlgebraMap::new(
                image.fiber(x).clone(),
                b.fiber(x).clone(),
                f.map_at(x).matrix().matmul(&inc),
            )
        })
        .collect::<Result<_>>()?;
    let mono = CoverMorphism::new(image.clone(), b.clone(), mono_maps)?;
    debug_assert!(epi.is_epi());
    debug_assert!(mono.is_mono());
    Ok(Factorization { image, epi, mono, complement, to_complement })
}

fn subsheaf_by_idempotents(a: &QcohAlgebra, idems: &[Vec<u64>]) -> Result<QcohAlgebra> {
    let base = a.base().clone();
    let p = base.p();
    let mut fibers = Vec::new();
    let mut structure = Vec::new();
    let mut facs = Vec::new();
    for x in 0..base.len() {
        if a.fiber(x).is_zero_ring() {
            let z = Algebra::zero_ring(p);
            structure.push(AlgebraMap::new_unchecked(
                base.stalk(x).clone(),
                z.clone(),
                Mat::zeros(p, 0, base.stalk(x).dim()),
            ));
            fibers.push(z);
            facs.push(None);
            continue;
        }
        let fac = idempotent_factor(a.fiber(x), &idems[x]);
        structure.push(AlgebraMap::new_unchecked(
            base.stalk(x).clone(),
            fac.factor.clone(),
            fac.projection.matrix().matmul(a.structure_map(x).matrix()),
        ));
        fibers.push(fac.factor.clone());
        facs.push(Some(fac));
    }
    let mut res = BTreeMap::new();
    for &(x, y) in base.poset().hasse() {
        let (Some(fx), Some(fy)) = (&facs[x], &facs[y]) else {
            res.insert(
                (x, y),
                AlgebraMap::new_unchecked(
                    fibers[x].clone(),
                    fibers[y].clone(),
                    Mat::zeros(p, fibers[y].dim(), fibers[x].dim()),
                ),
            );
            continue;
        };
        let m = fy
            .projection
            .matrix()
            .matmul(a.res(x, y).matrix())
            .matmul(&fx.inclusion);
        res.insert(
            (x, y),
            AlgebraMap::new(fibers[x].clone(), fibers[y].clone(), m)?,
        );
    }
    QcohAlgebra::new(base, fibers, structure, res)
}

fn projection_morphism(
    a: &QcohAlgebra,
    target: &QcohAlgebra,
    idems: &[Vec<u64>],
) -> Result<CoverMorphism> {
    let maps: Vec<AlgebraMap> = (0..a.base().len())
        .map(|x| {
            if a.fiber(x).is_zero_ring() {
                return AlgebraMap::new(
                    a.fiber(x).clone(),
                    target.fiber(x).clone(),
                    Mat::zeros(a.base().p(), 0, 0),
                );
            }
            let fac = idempotent_factor(a.fiber(x), &idems[x]);
            AlgebraMap::new(
                a.fiber(x).clone(),
                target.fiber(x).clone(),
                fac.projection.matrix().clone(),
            )
        })
        .collect::<Result<_>>()?;
    CoverMorphism::new(a.clone(), target.clone(), maps)
}
