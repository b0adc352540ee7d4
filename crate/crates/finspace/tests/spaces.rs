//! Cross-module invariants on the corpus: quasi-coherence beyond Hasse
//! edges, localization on affine spaces, cohomology transport along
//! qc-isomorphisms, the pw adjunction, fiber consistency and geometric-point
//! injectivity along flat immersions.

mod common;

use common::*;
use finspace::algebra::{module_base_change, Algebra, AlgebraMap};
use finspace::etale::algebra_homs_over;
use finspace::etale::{constant_degree, fib, galois_group, is_galois, fib_map};
use finspace::linalg::{unit_vec, Mat};
use finspace::points::{geometric_points, schematic_points, transport_class};
use finspace::pwconn::{connectivity_profile, pw_space};
use finspace::rspace::{
    cohomology_dims, inclusion_morphism, is_affine, is_flat_immersion, is_schematic_morphism,
    open_pushforward_algebra, pushforward_module, relspec, section_algebra, sections,
    ModuleSheaf, QcohAlgebra, RingedPoset, SpaceMorphism,
};

/// Quasi-coherence holds on all comparable pairs once it holds on the Hasse
/// edges (tensor composition); spot-checked directly.
#[test]
fn qcoh_isomorphism_on_all_comparable_pairs() {
    for (name, space) in schematic_corpus() {
        let m = ModuleSheaf::structure(&space);
        for (x, y) in space.poset().comparable_pairs() {
            if x == y {
                continue;
            }
            let fiber = m.fiber(x);
            let bc = module_base_change(fiber.dim, &fiber.action, space.res(x, y));
            let cmap = bc.induced_to(m.res(x, y), &m.fiber(y).action, m.fiber(y).dim);
            assert_eq!(bc.dim, m.fiber(y).dim, "{name}: dims at ({x},{y})");
            assert_eq!(cmap.rank(), bc.dim, "{name}: canonical map iso at ({x},{y})");
        }
    }
}

/// On an affine space, global sections of a quasi-coherent algebra localize
/// to the stalks: A(X) (x)_{O(X)} O_x = A_x.
#[test]
fn affine_localization_of_quasi_coherent_algebras() {
    for (name, space) in schematic_corpus() {
        if !is_affine(&space).unwrap().holds {
            continue;
        }
        let all: Vec<usize> = (0..space.len()).collect();
        let covers = vec![QcohAlgebra::structure_sheaf(&space), QcohAlgebra::free(&space, 2)];
        for a in covers {
            let sec = finspace::rspace::section_algebra_of(&a, &all).unwrap();
            let o_sec = section_algebra(&space, &all).unwrap();
            for x in 0..space.len() {
                // both section algebras restrict to the point
                let k = sec.points.iter().position(|&t| t == x).unwrap();
                let eval_a = sec.eval(k, a.fiber(x));
                let eval_o = o_sec.eval(k, space.stalk(x));
                // A(X) as an O(X)-module, base changed along O(X) -> O_x
                let actions: Vec<Mat> = (0..o_sec.algebra.dim())
                    .map(|i| {
                        // multiplication by the image of the i-th global
                        // section inside A(X)
                        let img = {
                            // O(X) -> A(X): componentwise structure maps
                            let tuple_len =
                                sec.reps.first().map_or(0, |r| r.len());
                            let mut tuple = vec![0u64; tuple_len];
                            for (kk, &t) in sec.points.iter().enumerate() {
                                let v = a.structure_map(t).apply(
                                    &o_sec.reps[i][o_sec.offsets[kk]
                                        ..o_sec.offsets[kk] + space.stalk(t).dim()],
                                );
                                tuple[sec.offsets[kk]..sec.offsets[kk] + a.fiber(t).dim()]
                                    .copy_from_slice(&v);
                            }
                            sec.coords(&tuple).unwrap()
                        };
                        sec.algebra.mul_matrix(&img)
                    })
                    .collect();
                let bc = module_base_change(sec.algebra.dim(), &actions, &eval_o);
                let cmap = bc.induced_to(
                    eval_a.matrix(),
                    &(0..space.stalk(x).dim())
                        .map(|i| {
                            a.fiber(x)
                                .mul_matrix(&a.structure_map(x).apply(&unit_vec(
                                    space.stalk(x).dim(),
                                    i,
                                )))
                        })
                        .collect::<Vec<_>>(),
                    a.fiber(x).dim(),
                );
                assert_eq!(bc.dim, a.fiber(x).dim(), "{name}: localization dims");
                assert_eq!(cmap.rank(), bc.dim, "{name}: localization is an isomorphism");
            }
        }
    }
}

/// Minimal opens of schematic spaces are acyclic for quasi-coherent sheaves.
#[test]
fn minimal_opens_are_acyclic() {
    for (name, space) in schematic_corpus() {
        let sheaves =
            vec![ModuleSheaf::structure(&space), QcohAlgebra::free(&space, 2).as_module()];
        for m in &sheaves {
            for x in 0..space.len() {
                let u = space.poset().min_open(x);
                let dims = cohomology_dims(m, &u).unwrap();
                assert_eq!(dims[0], m.fiber(x).dim, "{name}: H^0(U_x) is the stalk");
                for (i, d) in dims.iter().enumerate().skip(1) {
                    assert_eq!(*d, 0, "{name}: H^{i}(U_x) vanishes");
                }
            }
        }
    }
}

/// qc-isomorphisms preserve cohomology dimensions of transported sheaves.
#[test]
fn qciso_preserves_cohomology_dimensions() {
    let c = collapse();
    let all_src: Vec<usize> = (0..c.src().len()).collect();
    let all_dst: Vec<usize> = (0..c.dst().len()).collect();
    let sheaves = vec![
        ModuleSheaf::structure(c.src()),
        QcohAlgebra::free(c.src(), 2).as_module(),
    ];
    for m in sheaves {
        let pushed = pushforward_module(&c, &m).unwrap();
        let up = cohomology_dims(&m, &all_src).unwrap();
        let down = cohomology_dims(&pushed, &all_dst).unwrap();
        let trim = |v: &[usize]| -> Vec<usize> {
            let mut v = v.to_vec();
            while v.last() == Some(&0) {
                v.pop();
            }
            v
        };
        assert_eq!(trim(&up), trim(&down), "pushforward preserves H^i dimensions");
    }
}

/// Brute-force all schematic morphisms from a small space into another.
fn all_schematic_morphisms(y: &RingedPoset, x: &RingedPoset) -> Vec<SpaceMorphism> {
    let p = y.p();
    let fp = Algebra::prime_field(p);
    let scalar_into = |a: &Algebra| -> AlgebraMap {
        AlgebraMap::new(fp.clone(), a.clone(), Mat::from_cols(p, a.dim(), vec![a.one().to_vec()]))
            .unwrap()
    };
    // candidate point maps
    let mut point_maps: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..y.len() {
        let mut next = Vec::new();
        for pm in &point_maps {
            for t in 0..x.len() {
                let mut v = pm.clone();
                v.push(t);
                next.push(v);
            }
        }
        point_maps = next;
    }
    let mut out = Vec::new();
    for pm in point_maps {
        // monotone?
        if y
            .poset()
            .hasse()
            .iter()
            .any(|&(a, b)| !x.poset().leq(pm[a], pm[b]))
        {
            continue;
        }
        // comorphism choices per point
        let mut choices: Vec<Vec<AlgebraMap>> = Vec::new();
        for t in 0..y.len() {
            let homs = algebra_homs_over(
                &scalar_into(x.stalk(pm[t])),
                &scalar_into(y.stalk(t)),
            )
            .unwrap();
            choices.push(homs);
        }
        let mut combos: Vec<Vec<AlgebraMap>> = vec![Vec::new()];
        for options in &choices {
            let mut next = Vec::new();
            for c in &combos {
                for o in options {
                    let mut v = c.clone();
                    v.push(o.clone());
                    next.push(v);
                }
            }
            combos = next;
        }
        for comorph in combos {
            let Ok(m) = SpaceMorphism::new(y.clone(), x.clone(), pm.clone(), comorph) else {
                continue;
            };
            if is_schematic_morphism(&m).unwrap().holds {
                out.push(m);
            }
        }
    }
    out
}

/// The pw adjunction, checked by cardinality and by the stated
/// correspondence: composing with the projection is a bijection
/// Hom(Y, pw(X)) -> Hom(Y, X) for pw-connected Y.
#[test]
fn pw_adjunction_cardinalities() {
    let small_y: Vec<RingedPoset> =
        vec![RingedPoset::point(f2()), RingedPoset::point(f4())];
    let targets: Vec<RingedPoset> = vec![
        xv(),
        chain_pr1(),
        RingedPoset::point(finspace::algebra::product_algebra(2, &[f2(), f2()]).algebra),
    ];
    for y in &small_y {
        assert!(connectivity_profile(y).unwrap().pw_connected);
        for x in &targets {
            let pw = pw_space(x).unwrap();
            let down = all_schematic_morphisms(y, x);
            let up = all_schematic_morphisms(y, &pw.space);
            assert_eq!(
                down.len(),
                up.len(),
                "adjunction cardinality for Y into X and pw(X)"
            );
            // composing with the projection lands in Hom(Y, X), bijectively
            let mut images = Vec::new();
            for g in &up {
                let composed = pw.projection.compose(g);
                assert!(down.contains(&composed));
                assert!(!images.contains(&composed), "composition is injective");
                images.push(composed);
            }
        }
    }
}

/// Flat immersions are injective on schematic (hence geometric) points.
#[test]
fn flat_immersions_inject_on_points() {
    let xv_space = xv();
    for x in 0..xv_space.len() {
        let u = xv_space.poset().min_open(x);
        let j = {
            let (sub, idx) = xv_space.open_subspace(&u).unwrap();
            let _ = sub;
            inclusion_morphism(&xv_space, &idx).unwrap()
        };
        assert!(is_flat_immersion(&j).unwrap(), "open inclusions are flat immersions");
        let src_set = schematic_points(j.src()).unwrap();
        let dst_set = schematic_points(j.dst()).unwrap();
        let mut seen = Vec::new();
        for c in 0..src_set.len() {
            let image = transport_class(&j, &src_set, c, &dst_set);
            assert!(!seen.contains(&image), "injective on schematic points");
            seen.push(image);
        }
    }
}

/// |Fib(A)| matches the point count of the geometric fiber of the relative
/// spectrum, and the degree.
#[test]
fn fib_agrees_with_geometric_fiber() {
    let tower = finspace::algebra::OmegaTower::new(2, 12);
    for (name, base, cover) in cover_corpus() {
        let set = schematic_points(&base).unwrap();
        let gps = geometric_points(&base, &set, &tower).unwrap();
        let (_, morphism) = relspec(&base, &cover).unwrap();
        for gp in &gps {
            let f = fib(&base, &cover, &set, gp, &tower, None).unwrap();
            assert_eq!(
                f.len(),
                constant_degree(&base, &cover).unwrap(),
                "{name}: fib cardinality equals the degree"
            );
            let gfiber =
                finspace::points::geometric_fiber(&morphism, &set, gp, &tower).unwrap();
            assert_eq!(
                f.len(),
                gfiber.space.len(),
                "{name}: fib matches the geometric fiber of the relative spectrum"
            );
            if name.starts_with("free") {
                // split covers have trivial monodromy
                let identity: Vec<usize> = (0..gfiber.space.len()).collect();
                assert_eq!(gfiber.frobenius, identity, "{name}: Frobenius acts trivially");
            }
        }
    }
}

/// Aut acts faithfully on the fiber of a connected cover, transitively
/// exactly when the cover is Galois.
#[test]
fn aut_action_on_fibers() {
    let tower = finspace::algebra::OmegaTower::new(2, 12);
    let checks: Vec<(Algebra, bool)> = vec![(f4(), true), (f8(), true)];
    for (alg, expect_galois) in checks {
        let (pt, cover) = point_cover(alg);
        let set = schematic_points(&pt).unwrap();
        let gps = geometric_points(&pt, &set, &tower).unwrap();
        let f = fib(&pt, &cover, &set, &gps[0], &tower, None).unwrap();
        let aut = galois_group(&cover).unwrap();
        assert_eq!(is_galois(&pt, &cover).unwrap(), expect_galois);
        // faithful: distinct automorphisms give distinct permutations
        let mut perms = Vec::new();
        for g in &aut.elements {
            let perm = fib_map(g, &f, &f).unwrap();
            assert!(!perms.contains(&perm), "faithful action");
            perms.push(perm);
        }
        // transitive iff Galois: orbit of element 0 covers everything
        let mut orbit = vec![0usize];
        for perm in &perms {
            if !orbit.contains(&perm[0]) {
                orbit.push(perm[0]);
            }
        }
        assert_eq!(orbit.len() == f.len(), expect_galois);
    }
    // the non-Galois F_4 x F_2 has a non-transitive action
    let (pt, a4) = point_cover(f4());
    let prod = finspace::rspace::product_covers(&a4, &QcohAlgebra::structure_sheaf(&pt)).unwrap();
    assert!(!is_galois(&pt, &prod).unwrap());
}

/// j_* preserves quasi-coherence and produces the stated stalks.
#[test]
fn open_pushforward_stalks() {
    let xv_space = xv();
    // U = {b1}: the pushforward of its structure sheaf has stalks
    // (F_2 at b1 and the sections over the intersections elsewhere)
    let u = vec![1usize];
    let (sub, idx) = xv_space.open_subspace(&u).unwrap();
    let a = QcohAlgebra::structure_sheaf(&sub);
    let pushed = open_pushforward_algebra(&xv_space, &idx, &a).unwrap();
    assert!(pushed.is_quasi_coherent());
    assert_eq!(pushed.fiber(0).dim(), 1); // sections over U /\ U_a = {b1}
    assert_eq!(pushed.fiber(1).dim(), 1); // at b1 itself
    assert_eq!(pushed.fiber(2).dim(), 0); // empty intersection at b2
    // U = X is the identity
    let all: Vec<usize> = (0..xv_space.len()).collect();
    let o = QcohAlgebra::structure_sheaf(&xv_space);
    let pushed = open_pushforward_algebra(&xv_space, &all, &o).unwrap();
    for x in 0..xv_space.len() {
        assert_eq!(pushed.fiber(x).dim(), xv_space.stalk(x).dim());
    }
    // sections of the zero sheaf vanish
    let zero = ModuleSheaf::zero(&xv_space);
    assert_eq!(sections(&zero, &all).unwrap().basis.len(), 0);
}
