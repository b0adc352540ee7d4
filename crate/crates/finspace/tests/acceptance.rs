//! Acceptance suite: one test per criterion, each printing a pass/fail line.
//! Everything is exact; the stated runtime bounds are asserted.

mod common;

use common::*;
use finspace::algebra::{
    idempotents, local_decomposition, nilradical, oracle, spec_primes, Algebra, AlgebraMap,
    Ideal, OmegaTower,
};
use finspace::etale::{
    constant_degree, fib, galois_axioms_report, galois_group, hom_set, is_etale_cover,
    trivialize, verify_certificate, CoverMorphism,
};
use finspace::linalg::Mat;
use finspace::points::{geometric_points, schematic_points, transport_class};
use finspace::pwconn::{connectivity_profile, pw_space, wc_components};
use finspace::rspace::{
    cohomology_dims, is_affine, is_qc_isomorphism, is_schematic_space, pullback_algebra,
    pushforward_algebra, section_algebra, sections, ModuleSheaf, QcohAlgebra, RingedPoset,
};
use rand::prelude::*;
use std::time::Instant;

#[test]
fn criterion_1_pw_correctness() {
    let start = Instant::now();
    let corpus = schematic_corpus();
    assert!(corpus.len() >= 20, "corpus must have at least 20 spaces");
    for (name, space) in &corpus {
        let check = is_schematic_space(space).unwrap();
        assert!(check.holds, "{name} must be schematic: {:?}", check.witness);
        let pw = pw_space(space).unwrap();
        let pw_check = is_schematic_space(&pw.space).unwrap();
        assert!(pw_check.holds, "pw({name}) must be schematic: {:?}", pw_check.witness);
        assert!(
            is_qc_isomorphism(&pw.projection).unwrap(),
            "projection pw({name}) -> {name} must be a qc-isomorphism"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 30, "criterion 1 exceeded 30 s: {elapsed:?}");
    println!(
        "criterion 1: PASS - pw of {} corpus spaces schematic with qc-iso projections ({elapsed:?})",
        corpus.len()
    );
}

#[test]
fn criterion_2_connectedness_theorem() {
    let corpus = schematic_corpus();
    for (name, space) in &corpus {
        let profile = connectivity_profile(space).unwrap();
        let comps = wc_components(space).unwrap();
        let all: Vec<usize> = (0..space.len()).collect();
        let global = section_algebra(space, &all).unwrap().algebra;
        let single_nonzero = comps.len() == 1 && !global.is_zero_ring();
        assert_eq!(
            profile.well_connected, single_nonzero,
            "{name}: well-connected iff exactly one component and O(X) nonzero"
        );
        assert_eq!(
            profile.well_connected,
            profile.top_connected && profile.pw_connected,
            "{name}: well iff top and pw"
        );
        // component count = primitive idempotents of the global sections
        if !global.is_zero_ring() {
            let prim = local_decomposition(&global).unwrap().len();
            assert_eq!(comps.len(), prim, "{name}: components match idempotents");
        }
        for (comp, _) in &comps {
            let cp = connectivity_profile(comp).unwrap();
            assert!(cp.well_connected, "{name}: every component is well-connected");
        }
    }
    println!(
        "criterion 2: PASS - connectedness theorem and cross-check on {} spaces",
        corpus.len()
    );
}

#[test]
fn criterion_3_point_invariance() {
    let tower2 = OmegaTower::new(2, 12);
    let tower3 = OmegaTower::new(3, 12);
    let corpus = schematic_corpus();
    let mut checked = 0usize;
    for (name, space) in &corpus {
        let pw = pw_space(space).unwrap();
        let src_set = schematic_points(&pw.space).unwrap();
        let dst_set = schematic_points(space).unwrap();
        assert_eq!(
            src_set.len(),
            dst_set.len(),
            "{name}: schematic points invariant under the pw projection"
        );
        let tower = if space.p() == 2 { &tower2 } else { &tower3 };
        let src_gps = geometric_points(&pw.space, &src_set, tower).unwrap();
        let dst_gps = geometric_points(space, &dst_set, tower).unwrap();
        assert_eq!(
            src_gps.len(),
            dst_gps.len(),
            "{name}: geometric points invariant under the pw projection"
        );
        checked += 1;
    }
    // cover transport across pw projections, both directions
    let mut pw_transport_checked = 0usize;
    for (name, space) in corpus.iter().filter(|(_, s)| s.len() <= 4) {
        let tower = if space.p() == 2 { &tower2 } else { &tower3 };
        let pw = pw_space(space).unwrap();
        let cover = QcohAlgebra::free(space, 2);
        assert!(is_etale_cover(space, &cover).unwrap().holds);
        let pulled = pullback_algebra(&pw.projection, &cover).unwrap();
        assert!(
            is_etale_cover(&pw.space, &pulled).unwrap().holds,
            "{name}: pullback along the pw projection stays an etale cover"
        );
        assert_eq!(constant_degree(&pw.space, &pulled).unwrap(), 2, "{name}: degree preserved");
        let up_set = schematic_points(&pw.space).unwrap();
        let down_set = schematic_points(space).unwrap();
        let up_gps = geometric_points(&pw.space, &up_set, tower).unwrap();
        let down_gps = geometric_points(space, &down_set, tower).unwrap();
        let pushed = pushforward_algebra(&pw.projection, &pulled).unwrap();
        assert!(is_etale_cover(space, &pushed).unwrap().holds);
        for gp in &up_gps {
            let down_class = transport_class(&pw.projection, &up_set, gp.class, &down_set);
            let down_gp = down_gps.iter().find(|g| g.class == down_class).unwrap();
            let up_fib = fib(&pw.space, &pulled, &up_set, gp, tower, None).unwrap();
            let down_fib = fib(space, &cover, &down_set, down_gp, tower, None).unwrap();
            assert_eq!(up_fib.len(), down_fib.len(), "{name}: fib preserved upward");
            let back_fib = fib(space, &pushed, &down_set, down_gp, tower, None).unwrap();
            assert_eq!(back_fib.len(), down_fib.len(), "{name}: fib preserved back down");
        }
        pw_transport_checked += 1;
    }
    assert!(pw_transport_checked >= 8);

    // the chain collapse with transported covers, in both directions
    let c = collapse();
    let src_set = schematic_points(c.src()).unwrap();
    let dst_set = schematic_points(c.dst()).unwrap();
    assert_eq!(src_set.len(), dst_set.len());
    let dst_gps = geometric_points(c.dst(), &dst_set, &tower2).unwrap();
    let src_gps = geometric_points(c.src(), &src_set, &tower2).unwrap();
    assert_eq!(dst_gps.len(), src_gps.len());
    // covers on the target: structure sheaf doubled and the F_4-like cover
    let down_covers = vec![
        QcohAlgebra::free(c.dst(), 2),
        {
            let f4 = f4();
            let prod = finspace::algebra::product_algebra(2, &[f4.clone(), f4]);
            let stalk = c.dst().stalk(0).clone();
            // F_4 x F_4 over F_2 x F_2 componentwise
            let mut cols = Vec::new();
            for i in 0..stalk.dim() {
                let mut v = vec![0u64; 4];
                if i == 0 {
                    v[0] = 1;
                } else {
                    v[2] = 1;
                }
                cols.push(v);
            }
            let s = AlgebraMap::new(stalk, prod.algebra.clone(), Mat::from_cols(2, 4, cols))
                .unwrap();
            QcohAlgebra::new(
                c.dst().clone(),
                vec![prod.algebra],
                vec![s],
                std::collections::BTreeMap::new(),
            )
            .unwrap()
        },
    ];
    for (ci, cover) in down_covers.iter().enumerate() {
        assert!(is_etale_cover(c.dst(), cover).unwrap().holds);
        let pulled = pullback_algebra(&c, cover).unwrap();
        assert!(
            is_etale_cover(c.src(), &pulled).unwrap().holds,
            "cover {ci}: pullback along a qc-iso stays an etale cover"
        );
        // degrees agree on the pw-connected reductions
        let pw_src = pw_space(c.src()).unwrap();
        let pw_dst = pw_space(c.dst()).unwrap();
        let up_deg = constant_degree(
            &pw_src.space,
            &pullback_algebra(&pw_src.projection, &pulled).unwrap(),
        )
        .unwrap();
        let down_deg = constant_degree(
            &pw_dst.space,
            &pullback_algebra(&pw_dst.projection, cover).unwrap(),
        )
        .unwrap();
        assert_eq!(up_deg, down_deg, "cover {ci}: degree preserved");
        // fib cardinality at corresponding geometric points
        for gp in &src_gps {
            let down_class = transport_class(&c, &src_set, gp.class, &dst_set);
            let down_gp = dst_gps
                .iter()
                .find(|g| g.class == down_class)
                .expect("transported class has geometric points");
            let up_fib = fib(c.src(), &pulled, &src_set, gp, &tower2, None).unwrap();
            let down_fib = fib(c.dst(), cover, &dst_set, down_gp, &tower2, None).unwrap();
            assert_eq!(up_fib.len(), down_fib.len(), "cover {ci}: fib cardinality preserved");
        }
        // and back down along the pushforward
        let pushed = pushforward_algebra(&c, &pulled).unwrap();
        assert!(is_etale_cover(c.dst(), &pushed).unwrap().holds);
        for gp in &dst_gps {
            let down_fib = fib(c.dst(), &pushed, &dst_set, gp, &tower2, None).unwrap();
            let orig_fib = fib(c.dst(), cover, &dst_set, gp, &tower2, None).unwrap();
            assert_eq!(down_fib.len(), orig_fib.len(), "cover {ci}: pushforward preserves fib");
        }
    }
    println!(
        "criterion 3: PASS - point counts invariant on {checked} pw projections; covers transport both ways across {pw_transport_checked} pw projections and the collapse"
    );
}

#[test]
fn criterion_4_galois_suite() {
    let start = Instant::now();
    let tower = OmegaTower::new(2, 12);
    let (pt, a4) = point_cover(f4());
    let (_, a8) = point_cover(f8());
    let a4x2 = finspace::rspace::product_covers(&a4, &QcohAlgebra::structure_sheaf(&pt)).unwrap();
    let report = galois_axioms_report(
        &pt,
        &[
            ("F4".into(), a4.clone()),
            ("F8".into(), a8.clone()),
            ("F4xF2".into(), a4x2),
        ],
        0,
        8,
        &tower,
    )
    .unwrap();
    let counts = report.counts_by_axiom();
    assert!(report.passed(), "failing instances: {:?}", report
        .instances
        .iter()
        .filter(|i| !i.pass)
        .take(5)
        .collect::<Vec<_>>());
    assert!(counts.iter().all(|&c| c > 0), "every axiom checked: {counts:?}");
    // fib(F_{2^d}) is a single d-cycle and Aut has order d, d = 1, 2, 3
    let set = schematic_points(&pt).unwrap();
    let gps = geometric_points(&pt, &set, &tower).unwrap();
    let one_point_covers =
        [(1usize, QcohAlgebra::structure_sheaf(&pt)), (2, a4), (3, a8)];
    for (d, cover) in &one_point_covers {
        let f = fib(&pt, cover, &set, &gps[0], &tower, None).unwrap();
        assert_eq!(f.len(), *d, "fib(F_2^{d}) has {d} elements");
        let mut lengths = cycle_lengths(&f.frobenius);
        lengths.sort_unstable();
        assert_eq!(lengths, vec![*d], "Frobenius acts as a single {d}-cycle");
        assert_eq!(
            galois_group(cover).unwrap().order(),
            *d,
            "Aut(F_2^{d}) has order {d}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs() < 60, "criterion 4 exceeded 60 s: {elapsed:?}");
    println!(
        "criterion 4: PASS - all five axioms on a family of {} covers, instance counts {:?}; Frobenius d-cycles for d = 1,2,3 ({elapsed:?})",
        report.family.len(),
        counts
    );
}

fn cycle_lengths(perm: &[usize]) -> Vec<usize> {
    let mut seen = vec![false; perm.len()];
    let mut out = Vec::new();
    for s in 0..perm.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut at = s;
        while !seen[at] {
            seen[at] = true;
            at = perm[at];
            len += 1;
        }
        out.push(len);
    }
    out
}

#[test]
fn criterion_5_kernel_oracles() {
    let mut r = rng(0x5EED);
    // flatness: 200 random maps with source dimension <= 3
    let mut flat_checked = 0usize;
    while flat_checked < 200 {
        let p = if r.gen_bool(0.5) { 2 } else { 3 };
        let raw = random_algebra(&mut r, p, 3);
        let src = scramble(&mut r, &raw);
        let map = random_map_from(&mut r, &src);
        let fast = finspace::algebra::is_flat(&map);
        let slow = oracle::is_flat_by_ideals(&map).unwrap();
        assert_eq!(
            fast, slow,
            "flatness oracle disagreement on a map from a dim-{} algebra",
            src.dim()
        );
        flat_checked += 1;
    }
    // nilradical: 200 random algebras of dimension <= 4
    for _ in 0..200 {
        let p = if r.gen_bool(0.5) { 2 } else { 3 };
        let raw = random_algebra(&mut r, p, 4);
        let a = scramble(&mut r, &raw);
        assert_eq!(
            nilradical(&a),
            oracle::nilradical_by_enumeration(&a).unwrap(),
            "nilradical oracle disagreement"
        );
    }
    // idempotents: splitting against enumeration up to p^dim <= 2^12
    let mut idem_checked = 0usize;
    for _ in 0..200 {
        let p = if r.gen_bool(0.5) { 2 } else { 3 };
        let max_dim = if p == 2 { 6 } else { 4 };
        let raw = random_algebra(&mut r, p, max_dim);
        let a = scramble(&mut r, &raw);
        if a.cardinality().map_or(true, |c| c > 1 << 12) {
            continue;
        }
        let via_split = {
            let dec = local_decomposition(&a).unwrap();
            let mut all = Vec::new();
            for mask in 0u64..(1 << dec.len()) {
                let mut v = vec![0u64; a.dim()];
                for (i, e) in dec.idempotents.iter().enumerate() {
                    if mask >> i & 1 == 1 {
                        v = finspace::linalg::vec_add(p, &v, e);
                    }
                }
                all.push(v);
            }
            all.sort();
            all.dedup();
            all
        };
        let via_enum = oracle::idempotents_by_enumeration(&a).unwrap();
        assert_eq!(via_split, via_enum, "idempotent oracle disagreement");
        assert_eq!(idempotents(&a).unwrap(), via_enum);
        idem_checked += 1;
    }
    assert!(idem_checked >= 100);
    println!(
        "criterion 5: PASS - 200 flatness, 200 nilradical and {idem_checked} idempotent oracle agreements"
    );
}

fn random_map_from(r: &mut rand_chacha::ChaCha8Rng, src: &Algebra) -> AlgebraMap {
    let p = src.p();
    match r.gen_range(0..4u8) {
        // quotient by a random ideal
        0 => {
            let mut gens = Vec::new();
            for _ in 0..r.gen_range(0..=2usize) {
                let v: Vec<u64> = (0..src.dim()).map(|_| r.gen_range(0..p)).collect();
                for i in 0..src.dim() {
                    gens.push(src.mul_vec(&v, &finspace::linalg::unit_vec(src.dim(), i)));
                }
            }
            let ideal = Ideal::new(src, gens).unwrap();
            finspace::algebra::quotient_algebra(src, &ideal).1
        }
        // projection onto an idempotent factor
        1 => {
            let idems = idempotents(src).unwrap();
            let e = idems[r.gen_range(0..idems.len())].clone();
            finspace::algebra::idempotent_factor(src, &e).projection
        }
        // diagonal into the square
        2 => {
            let prod = finspace::algebra::product_algebra(p, &[src.clone(), src.clone()]);
            let cols = (0..src.dim())
                .map(|i| {
                    let mut v = finspace::linalg::unit_vec(src.dim(), i);
                    v.extend(finspace::linalg::unit_vec(src.dim(), i));
                    v
                })
                .collect();
            AlgebraMap::new(
                src.clone(),
                prod.algebra.clone(),
                Mat::from_cols(p, 2 * src.dim(), cols),
            )
            .unwrap()
        }
        // a residue-field quotient
        _ => {
            let primes = spec_primes(src);
            if primes.is_empty() {
                return AlgebraMap::identity(src);
            }
            let q = &primes[r.gen_range(0..primes.len())];
            finspace::algebra::residue_field(src, q).unwrap().1
        }
    }
}

#[test]
fn criterion_6_cohomology_sanity() {
    let corpus = schematic_corpus();
    let mut affine_count = 0usize;
    let mut sheaf_count = 0usize;
    let mut r = rng(0xAC1D);
    for (name, space) in &corpus {
        let aff = is_affine(space).unwrap();
        if !aff.holds {
            continue;
        }
        affine_count += 1;
        let all: Vec<usize> = (0..space.len()).collect();
        let mut sheaves: Vec<(String, ModuleSheaf)> = vec![
            ("structure".into(), ModuleSheaf::structure(space)),
            ("zero".into(), ModuleSheaf::zero(space)),
        ];
        // quotient modules of the global sections, spread over the space
        for k in 0..2 {
            if let Some(m) = random_quotient_module(&mut r, space) {
                sheaves.push((format!("random{k}"), m));
            }
        }
        for (sname, m) in &sheaves {
            assert!(
                finspace::rspace::is_quasi_coherent(m),
                "{name}/{sname}: generated sheaves are quasi-coherent"
            );
            let dims = cohomology_dims(m, &all).unwrap();
            for (i, d) in dims.iter().enumerate().skip(1) {
                assert_eq!(*d, 0, "{name}/{sname}: H^{i} must vanish on an affine space");
            }
            // H^0 agrees with sections
            assert_eq!(dims[0], sections(m, &all).unwrap().basis.len());
            sheaf_count += 1;
        }
    }
    assert!(affine_count >= 10, "corpus must contain many affine spaces");
    // the pseudocircle with the constant sheaf F_2
    let pc = pseudocircle();
    let m = ModuleSheaf::structure(&pc);
    let dims = cohomology_dims(&m, &[0, 1, 2, 3]).unwrap();
    assert_eq!(dims, vec![1, 1], "pseudocircle has dim H^0 = dim H^1 = 1");
    println!(
        "criterion 6: PASS - H^(>0) = 0 for {sheaf_count} quasi-coherent sheaves on {affine_count} affine spaces; pseudocircle dims [1, 1]"
    );
}

/// M = O(X)/I as a quasi-coherent sheaf via stalkwise base change.
fn random_quotient_module(
    r: &mut rand_chacha::ChaCha8Rng,
    space: &RingedPoset,
) -> Option<ModuleSheaf> {
    use finspace::algebra::{module_base_change, quotient_algebra};
    let p = space.p();
    let all: Vec<usize> = (0..space.len()).collect();
    let sec = section_algebra(space, &all).ok()?;
    let g = &sec.algebra;
    if g.is_zero_ring() {
        return None;
    }
    let mut gens = Vec::new();
    for _ in 0..r.gen_range(0..=2usize) {
        let v: Vec<u64> = (0..g.dim()).map(|_| r.gen_range(0..p)).collect();
        for i in 0..g.dim() {
            gens.push(g.mul_vec(&v, &finspace::linalg::unit_vec(g.dim(), i)));
        }
    }
    let ideal = Ideal::new(g, gens).ok()?;
    let (m0, qmap) = quotient_algebra(g, &ideal);
    // M0 as a module over the global sections
    let actions: Vec<Mat> = (0..g.dim())
        .map(|k| m0.mul_matrix(&qmap.apply(&finspace::linalg::unit_vec(g.dim(), k))))
        .collect();
    let evals: Vec<AlgebraMap> = (0..space.len())
        .map(|x| {
            let k = sec.points.iter().position(|&t| t == x).unwrap();
            sec.eval(k, space.stalk(x))
        })
        .collect();
    let bcs: Vec<_> = (0..space.len())
        .map(|x| module_base_change(m0.dim(), &actions, &evals[x]))
        .collect();
    let fibers: Vec<finspace::rspace::ModuleFiber> = bcs
        .iter()
        .map(|bc| finspace::rspace::ModuleFiber { dim: bc.dim, action: bc.action.clone() })
        .collect();
    let mut res = std::collections::BTreeMap::new();
    for &(x, y) in space.poset().hasse() {
        // m (x) a |-> m (x) r(a) on class representatives
        let mat = transport_base_change(&bcs[x], &bcs[y], space, x, y, m0.dim());
        res.insert((x, y), mat);
    }
    ModuleSheaf::new(space.clone(), fibers, res).ok()
}

fn transport_base_change(
    bc_x: &finspace::algebra::BaseChange,
    bc_y: &finspace::algebra::BaseChange,
    space: &RingedPoset,
    x: usize,
    y: usize,
    mdim: usize,
) -> Mat {
    let cols: Vec<Vec<u64>> = bc_x
        .rep_pairs()
        .iter()
        .map(|&(mi, aj)| {
            let ra = space.res(x, y).apply(&finspace::linalg::unit_vec(space.stalk(x).dim(), aj));
            bc_y.pure(&finspace::linalg::unit_vec(mdim, mi), &ra)
        })
        .collect();
    Mat::from_cols(space.p(), bc_y.dim, cols)
}

#[test]
fn criterion_7_trivialization() {
    let covers = cover_corpus();
    for (name, base, cover) in &covers {
        let profile = connectivity_profile(base).unwrap();
        assert!(profile.well_connected, "{name}: base must be well-connected");
        let cert = trivialize(base, cover).unwrap();
        assert!(
            verify_certificate(base, cover, &cert).unwrap(),
            "{name}: certificate must verify by direct matrix check"
        );
        assert_eq!(
            cert.degree,
            constant_degree(base, cover).unwrap(),
            "{name}: certificate degree equals the cover degree"
        );
    }
    // triviality of morphisms between trivial covers, degrees <= 3,
    // verified exhaustively on two well-connected bases
    let bases: Vec<RingedPoset> = vec![point_cover(f4()).0, {
        let covers = cover_corpus();
        covers
            .iter()
            .find(|(n, _, _)| n == "free3_on_chain")
            .map(|(_, b, _)| b.clone())
            .unwrap()
    }];
    for base in &bases {
        for m in 1..=3usize {
            for n in 1..=3usize {
                let om = QcohAlgebra::free(base, m);
                let on = QcohAlgebra::free(base, n);
                let homs = hom_set(&om, &on).unwrap();
                let induced = index_map_morphisms(base, &om, &on, m, n);
                assert_eq!(
                    homs.len(),
                    induced.len(),
                    "hom count between O^{m} and O^{n} equals the index maps"
                );
                for h in &homs {
                    assert!(
                        induced.contains(h),
                        "every hom O^{m} -> O^{n} is induced by an index map"
                    );
                }
            }
        }
    }
    println!(
        "criterion 7: PASS - {} certificates verified; homs between trivial covers of degree <= 3 are exactly the index maps",
        covers.len()
    );
}

/// The cover morphisms O^m -> O^n induced by maps {1..n} -> {1..m}
/// (component e of the target reads component phi(e) of the source).
fn index_map_morphisms(
    base: &RingedPoset,
    om: &QcohAlgebra,
    on: &QcohAlgebra,
    m: usize,
    n: usize,
) -> Vec<CoverMorphism> {
    let p = base.p();
    let mut out = Vec::new();
    let total = (m as u64).pow(n as u32);
    for code in 0..total {
        let mut phi = Vec::with_capacity(n);
        let mut c = code;
        for _ in 0..n {
            phi.push((c % m as u64) as usize);
            c /= m as u64;
        }
        let maps: Vec<AlgebraMap> = (0..base.len())
            .map(|x| {
                let d = base.stalk(x).dim();
                let mut mat = Mat::zeros(p, n * d, m * d);
                for (e, &s) in phi.iter().enumerate() {
                    for r in 0..d {
                        mat.set(e * d + r, s * d + r, 1);
                    }
                }
                AlgebraMap::new(om.fiber(x).clone(), on.fiber(x).clone(), mat).unwrap()
            })
            .collect();
        out.push(CoverMorphism::new(om.clone(), on.clone(), maps).unwrap());
    }
    out
}

#[test]
fn criterion_8_out_of_scale_disclosure() {
    println!(
        "criterion 8: PASS - the comparison of the fundamental group against the scheme side, \
         and the examples over infinite rings, are out of scale for this artifact; their \
         desk-scale surrogates are criterion 4 (finite-field monodromy) and criterion 3 \
         (invariance under qc-isomorphisms)"
    );
}

#[test]
fn schematic_points_oracle_on_small_spaces() {
    // the Hasse-generated relation equals the brute-force relation over all
    // comparable pairs on every corpus space with at most 4 points
    for (name, space) in schematic_corpus() {
        if space.len() > 4 {
            continue;
        }
        let set = schematic_points(&space).unwrap();
        let mut ours: Vec<Vec<(usize, usize)>> =
            set.classes.iter().map(|c| c.members.clone()).collect();
        ours.sort();
        let oracle = finspace::points::schematic_points_oracle(&space).unwrap();
        assert_eq!(ours, oracle, "{name}: point relation matches the oracle");
    }
}
