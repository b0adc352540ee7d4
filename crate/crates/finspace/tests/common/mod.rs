//! Shared corpus for the integration and acceptance suites: hand-built
//! worked examples plus deterministic random schematic spaces, built as
//! finite models of Artinian spectra with respect to random open covers
//! (which are schematic by construction and verified to be so).

// each integration-test binary compiles this module separately and uses a
// different subset of it
#![allow(dead_code)]

use finspace::algebra::{product_algebra, Algebra, AlgebraMap};
use finspace::linalg::Mat;
use finspace::poly::{first_irreducible, Poly};
use finspace::poset::Poset;
use finspace::rspace::{QcohAlgebra, RingedPoset, SpaceMorphism};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use std::collections::{BTreeMap, BTreeSet};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn f2() -> Algebra {
    Algebra::prime_field(2)
}

pub fn f4() -> Algebra {
    Algebra::poly_quotient(&Poly::new(2, vec![1, 1, 1]))
}

pub fn f8() -> Algebra {
    Algebra::poly_quotient(&Poly::new(2, vec![1, 1, 0, 1]))
}

pub fn dual_numbers(p: u64) -> Algebra {
    Algebra::poly_quotient(&Poly::new(p, vec![0, 0, 1]))
}

/// Local algebras of dimension <= 4 used as building blocks.
pub fn local_catalog(p: u64) -> Vec<Algebra> {
    vec![
        Algebra::prime_field(p),
        Algebra::poly_quotient(&first_irreducible(p, 2)),
        Algebra::poly_quotient(&first_irreducible(p, 3)),
        dual_numbers(p),
        Algebra::poly_quotient(&Poly::new(p, vec![0, 0, 0, 1])), // F_p[e]/(e^3)
    ]
}

/// A random product of catalog locals with total dimension <= max_dim.
pub fn random_algebra(rng: &mut ChaCha8Rng, p: u64, max_dim: usize) -> Algebra {
    let catalog = local_catalog(p);
    let mut factors: Vec<Algebra> = Vec::new();
    let mut dim = 0usize;
    loop {
        let candidates: Vec<&Algebra> =
            catalog.iter().filter(|a| dim + a.dim() <= max_dim).collect();
        if candidates.is_empty() || (dim > 0 && rng.gen_bool(0.4)) {
            break;
        }
        let pick = candidates[rng.gen_range(0..candidates.len())].clone();
        dim += pick.dim();
        factors.push(pick);
    }
    if factors.is_empty() {
        factors.push(Algebra::prime_field(p));
    }
    product_algebra(p, &factors).algebra
}

/// Conjugate the structure constants by a random invertible change of basis.
pub fn scramble(rng: &mut ChaCha8Rng, a: &Algebra) -> Algebra {
    let p = a.p();
    let n = a.dim();
    if n == 0 {
        return a.clone();
    }
    let m = loop {
        let mut m = Mat::zeros(p, n, n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, rng.gen_range(0..p));
            }
        }
        if m.is_invertible() {
            break m;
        }
    };
    let inv = m.inverse().unwrap();
    let mut mul = vec![0u64; n * n * n];
    for i in 0..n {
        for j in 0..n {
            // new e_i * e_j = inv(m(e_i) * m(e_j))
            let prod = a.mul_vec(&m.apply(&finspace::linalg::unit_vec(n, i)),
                                 &m.apply(&finspace::linalg::unit_vec(n, j)));
            let coords = inv.apply(&prod);
            for (k, &c) in coords.iter().enumerate() {
                mul[(i * n + j) * n + k] = c;
            }
        }
    }
    let one = inv.apply(a.one());
    Algebra::new(p, n, mul, one).expect("conjugated algebra is valid")
}

/// The finite model of Spec(prod A_i) with respect to a covering family of
/// subsets of the factor set: points are the distinct intersections U^s,
/// ordered by reverse inclusion, with sub-product stalks and projection
/// restrictions. Finite models of affine schemes are schematic.
pub fn model_of_cover(p: u64, locals: &[Algebra], cover: &[BTreeSet<usize>]) -> RingedPoset {
    let k = locals.len();
    // U^s for each factor s
    let mut opens: Vec<BTreeSet<usize>> = Vec::new();
    for s in 0..k {
        let mut u: BTreeSet<usize> = (0..k).collect();
        for c in cover {
            if c.contains(&s) {
                u = u.intersection(c).copied().collect();
            }
        }
        assert!(u.contains(&s));
        opens.push(u);
    }
    let mut distinct: Vec<BTreeSet<usize>> = Vec::new();
    for u in &opens {
        if !distinct.contains(u) {
            distinct.push(u.clone());
        }
    }
    let names: Vec<String> = distinct
        .iter()
        .map(|u| {
            let ids: Vec<String> = u.iter().map(|i| i.to_string()).collect();
            format!("u{}", ids.join("_"))
        })
        .collect();
    // [s] <= [t] iff U^t subset U^s
    let mut rel = Vec::new();
    for (i, a) in distinct.iter().enumerate() {
        for (j, b) in distinct.iter().enumerate() {
            if i != j && b.is_subset(a) {
                rel.push((i, j));
            }
        }
    }
    let poset = Poset::from_relation(names, &rel).expect("reverse inclusion is a partial order");
    let stalk_of = |u: &BTreeSet<usize>| -> (Algebra, Vec<usize>) {
        let chosen: Vec<usize> = u.iter().copied().collect();
        let algs: Vec<Algebra> = chosen.iter().map(|&i| locals[i].clone()).collect();
        (product_algebra(p, &algs).algebra, chosen)
    };
    let stalks_with_parts: Vec<(Algebra, Vec<usize>)> = distinct.iter().map(stalk_of).collect();
    let mut res = BTreeMap::new();
    for &(a, b) in poset.hasse() {
        let (from, from_parts) = &stalks_with_parts[a];
        let (to, to_parts) = &stalks_with_parts[b];
        // projection onto the sub-product
        let mut mat = Mat::zeros(p, to.dim(), from.dim());
        let mut to_off = 0usize;
        for &part in to_parts {
            let mut from_off = 0usize;
            for &fp in from_parts {
                if fp == part {
                    break;
                }
                from_off += locals[fp].dim();
            }
            for r in 0..locals[part].dim() {
                mat.set(to_off + r, from_off + r, 1);
            }
            to_off += locals[part].dim();
        }
        res.insert((a, b), AlgebraMap::new(from.clone(), to.clone(), mat).unwrap());
    }
    RingedPoset::new(
        poset,
        stalks_with_parts.into_iter().map(|(a, _)| a).collect(),
        res,
    )
    .expect("model data is consistent")
}

/// A deterministic random model space: <= 6 points, stalk dim <= 4.
pub fn random_model_space(rng: &mut ChaCha8Rng, p: u64) -> RingedPoset {
    let catalog = local_catalog(p);
    loop {
        // pick 1..=4 local factors with total dim <= 4
        let mut locals = Vec::new();
        let mut dim = 0usize;
        while locals.len() < 4 {
            let candidates: Vec<&Algebra> =
                catalog.iter().filter(|a| dim + a.dim() <= 4).collect();
            if candidates.is_empty() || (!locals.is_empty() && rng.gen_bool(0.35)) {
                break;
            }
            let pick = candidates[rng.gen_range(0..candidates.len())].clone();
            dim += pick.dim();
            locals.push(pick);
        }
        if locals.is_empty() {
            locals.push(Algebra::prime_field(p));
        }
        let k = locals.len();
        // random covering family of 1..=3 subsets
        let n_opens = rng.gen_range(1..=3usize);
        let mut cover: Vec<BTreeSet<usize>> = Vec::new();
        for _ in 0..n_opens {
            let mut s = BTreeSet::new();
            for i in 0..k {
                if rng.gen_bool(0.6) {
                    s.insert(i);
                }
            }
            if !s.is_empty() {
                cover.push(s);
            }
        }
        // ensure the family covers
        let covered: BTreeSet<usize> = cover.iter().flatten().copied().collect();
        if covered.len() != k {
            let missing: BTreeSet<usize> =
                (0..k).filter(|i| !covered.contains(i)).collect();
            cover.push(missing);
        }
        let space = model_of_cover(p, &locals, &cover);
        if space.len() <= 6 {
            return space;
        }
    }
}

/// Xv: a < b1, b2 with the two projections from F_2 x F_2.
pub fn xv() -> RingedPoset {
    let prod = product_algebra(2, &[f2(), f2()]);
    let poset = Poset::new(
        vec!["a".into(), "b1".into(), "b2".into()],
        vec![(0, 1), (0, 2)],
    )
    .unwrap();
    let mut res = BTreeMap::new();
    res.insert((0, 1), prod.projections[0].clone());
    res.insert((0, 2), prod.projections[1].clone());
    RingedPoset::new(poset, vec![prod.algebra, f2(), f2()], res).unwrap()
}

/// Chain a < b with stalks F_2 x F_2 -> F_2 via the first projection.
pub fn chain_pr1() -> RingedPoset {
    let prod = product_algebra(2, &[f2(), f2()]);
    let poset = Poset::new(vec!["a".into(), "b".into()], vec![(0, 1)]).unwrap();
    let mut res = BTreeMap::new();
    res.insert((0, 1), prod.projections[0].clone());
    RingedPoset::new(poset, vec![prod.algebra, f2()], res).unwrap()
}

/// The pseudocircle with constant stalk F_2 (finite but not schematic).
pub fn pseudocircle() -> RingedPoset {
    let poset = Poset::new(
        vec!["x1".into(), "x2".into(), "y1".into(), "y2".into()],
        vec![(0, 2), (0, 3), (1, 2), (1, 3)],
    )
    .unwrap();
    let id = AlgebraMap::identity(&f2());
    let mut res = BTreeMap::new();
    for e in [(0, 2), (0, 3), (1, 2), (1, 3)] {
        res.insert(e, id.clone());
    }
    RingedPoset::new(poset, vec![f2(), f2(), f2(), f2()], res).unwrap()
}

/// The collapse of the chain onto the one-point space with F_2 x F_2.
pub fn collapse() -> SpaceMorphism {
    let chain = chain_pr1();
    let prod = product_algebra(2, &[f2(), f2()]);
    let point = RingedPoset::point(prod.algebra.clone());
    SpaceMorphism::new(
        chain,
        point,
        vec![0, 0],
        vec![AlgebraMap::identity(&prod.algebra), prod.projections[0].clone()],
    )
    .unwrap()
}

/// A cover sheaf on a one-point F_2 base from any F_2-algebra.
pub fn point_cover(alg: Algebra) -> (RingedPoset, QcohAlgebra) {
    let base_field = Algebra::prime_field(alg.p());
    let pt = RingedPoset::point(base_field.clone());
    let s = AlgebraMap::new(
        base_field,
        alg.clone(),
        Mat::from_cols(alg.p(), alg.dim(), vec![alg.one().to_vec()]),
    )
    .unwrap();
    let a = QcohAlgebra::new(pt.clone(), vec![alg], vec![s], BTreeMap::new()).unwrap();
    (pt, a)
}

/// The two-affine-pieces gluing: x, y < z with product stalks projecting to
/// a common factor (the shape of gluing two spectra along one point).
pub fn glued_space() -> RingedPoset {
    let prod = product_algebra(2, &[f2(), f2()]);
    let poset = Poset::new(
        vec!["x".into(), "y".into(), "z".into()],
        vec![(0, 2), (1, 2)],
    )
    .unwrap();
    let mut res = BTreeMap::new();
    res.insert((0, 2), prod.projections[0].clone());
    res.insert((1, 2), prod.projections[0].clone());
    RingedPoset::new(poset, vec![prod.algebra.clone(), prod.algebra, f2()], res).unwrap()
}

/// The standard corpus: named worked examples plus deterministic random
/// model spaces over p = 2 and p = 3. All entries are schematic.
pub fn schematic_corpus() -> Vec<(String, RingedPoset)> {
    let mut rng2 = rng(0xC0FFEE);
    let mut out: Vec<(String, RingedPoset)> = vec![
        ("point_f2".into(), RingedPoset::point(f2())),
        ("point_f4".into(), RingedPoset::point(f4())),
        ("point_f8".into(), RingedPoset::point(f8())),
        ("point_f2xf2".into(), RingedPoset::point(product_algebra(2, &[f2(), f2()]).algebra)),
        ("point_dual".into(), RingedPoset::point(dual_numbers(2))),
        ("point_f3".into(), RingedPoset::point(Algebra::prime_field(3))),
        ("xv".into(), xv()),
        ("chain_pr1".into(), chain_pr1()),
        ("glued".into(), glued_space()),
    ];
    // relspec of the doubled structure sheaf over Xv
    {
        let base = xv();
        let free = QcohAlgebra::free(&base, 2);
        let (total, _) = finspace::rspace::relspec(&base, &free).unwrap();
        out.push(("xv_doubled".into(), total));
    }
    for i in 0..8 {
        out.push((format!("model2_{i}"), random_model_space(&mut rng2, 2)));
    }
    for i in 0..4 {
        out.push((format!("model3_{i}"), random_model_space(&mut rng2, 3)));
    }
    out
}

/// Etale covers over well-connected corpus bases, used for transport and
/// trivialization checks.
pub fn cover_corpus() -> Vec<(String, RingedPoset, QcohAlgebra)> {
    let mut out = Vec::new();
    let (pt, a4) = point_cover(f4());
    out.push(("f4_on_point".into(), pt.clone(), a4.clone()));
    let (pt8, a8) = point_cover(f8());
    out.push(("f8_on_point".into(), pt8, a8));
    let o2 = QcohAlgebra::free(&pt, 2);
    out.push(("free2_on_point".into(), pt.clone(), o2));
    let prod = finspace::rspace::product_covers(&a4, &QcohAlgebra::structure_sheaf(&pt)).unwrap();
    out.push(("f4xf2_on_point".into(), pt.clone(), prod));
    // a multi-point well-connected base: chain with F_2 -> F_2
    let chain = {
        let poset = Poset::new(vec!["a".into(), "b".into()], vec![(0, 1)]).unwrap();
        let mut res = BTreeMap::new();
        res.insert((0, 1), AlgebraMap::identity(&f2()));
        RingedPoset::new(poset, vec![f2(), f2()], res).unwrap()
    };
    out.push(("free3_on_chain".into(), chain.clone(), QcohAlgebra::free(&chain, 3)));
    // constant F_4 cover on the chain
    let a4_chain = {
        let f4a = f4();
        let s = AlgebraMap::new(
            f2(),
            f4a.clone(),
            Mat::from_cols(2, 2, vec![vec![1, 0]]),
        )
        .unwrap();
        let mut res = BTreeMap::new();
        res.insert((0, 1), AlgebraMap::identity(&f4a));
        QcohAlgebra::new(chain.clone(), vec![f4a.clone(), f4a], vec![s.clone(), s], res).unwrap()
    };
    out.push(("f4_on_chain".into(), chain, a4_chain));
    out
}
