//! The fiber functor: the finite set of points of the geometric fiber of a
//! cover at a geometric point, realized as algebra maps from the stalk into
//! the finite-field tower, with the Frobenius permutation recorded.

use crate::algebra::{
    local_decomposition, tensor_over, AlgebraMap, FiniteFieldRep, OmegaTower,
};
use crate::linalg::Mat;
use crate::points::{GeometricPoint, SchematicPointSet};
use crate::rspace::{QcohAlgebra, RingedPoset};
use crate::{Error, Result};

/// The fiber of a cover at a geometric point.
#[derive(Clone, Debug)]
pub struct FiberSet {
    /// Display form: (field-factor index of A_x (x) kappa, embedding index).
    pub elements: Vec<(usize, usize)>,
    /// The same elements as algebra maps A_x -> F_{p^m}, extending the
    /// geometric point on O_x.
    pub maps: Vec<Mat>,
    /// The base point the fiber was computed at.
    pub at_point: usize,
    /// Frobenius (the p^e-power map, e the residue degree of the geometric
    /// point) as a permutation of the elements.
    pub frobenius: Vec<usize>,
    /// Degree m of the tower field receiving the fiber.
    pub omega_degree: usize,
}

impl FiberSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }
    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn index_of(&self, m: &Mat) -> Option<usize> {
        self.maps.iter().position(|x| x == m)
    }
}

/// Smallest tower degree over which the fiber of this cover at this point
/// splits completely.
pub fn splitting_degree(
    a: &QcohAlgebra,
    dst_set: &SchematicPointSet,
    gp: &GeometricPoint,
) -> Result<usize> {
    let (x, _) = dst_set.classes[gp.class].max_rep;
    let t = tensor_over(a.structure_map(x), &gp.to_residue);
    let mut m = gp.residue.degree();
    if !t.algebra.is_zero_ring() {
        let dec = local_decomposition(&t.algebra)?;
        for f in &dec.factors {
            let rep = FiniteFieldRep::from_field_algebra(f).map_err(|_| Error::NotEtale)?;
            m = lcm(m, rep.degree());
        }
    }
    Ok(m)
}

/// Fib of a cover at a geometric point: Spec of A_x (x) Omega, with one
/// element per (field factor, compatible embedding) pair. `omega_degree`
/// fixes the receiving field so that fibers of different covers are
/// comparable; it must be a multiple of the splitting degree.
pub fn fib(
    x_space: &RingedPoset,
    a: &QcohAlgebra,
    dst_set: &SchematicPointSet,
    gp: &GeometricPoint,
    tower: &OmegaTower,
    omega_degree: Option<usize>,
) -> Result<FiberSet> {
    assert_eq!(a.base(), x_space);
    let (x, _) = dst_set.classes[gp.class].max_rep;
    let e = gp.residue.degree();
    let split = splitting_degree(a, dst_set, gp)?;
    let m = match omega_degree {
        Some(m) => {
            if m % split != 0 {
                return Err(Error::TowerTooSmall { needed: split, available: m });
            }
            m
        }
        None => split,
    };
    if m > tower.max_degree() {
        return Err(Error::TowerTooSmall { needed: m, available: tower.max_degree() });
    }
    let omega = tower.field(m);
    // the geometric point on O_x, landing in F_{p^m}
    let gp_on_stalk = tower
        .embedding(e, m)
        .matmul(&gp.embedding.matrix)
        .matmul(gp.to_residue.matrix());
    // A_x (x) kappa(p) and its field factors
    let t = tensor_over(a.structure_map(x), &gp.to_residue);
    let mut elements = Vec::new();
    let mut maps = Vec::new();
    if !t.algebra.is_zero_ring() {
        let dec = local_decomposition(&t.algebra)?;
        for (fi, factor) in dec.factors.iter().enumerate() {
            let rep = FiniteFieldRep::from_field_algebra(factor).map_err(|_| Error::NotEtale)?;
            let d = rep.degree();
            debug_assert_eq!(m % d, 0, "splitting degree covers all factors");
            let (embs, _) = crate::algebra::embeddings_into_omega(&rep, tower)?;
            // kappa-structure on the factor: kappa -> T -> factor
            let kappa_into_factor =
                dec.projections[fi].matrix().matmul(t.right.matrix());
            // a-side projection: A_x -> T -> factor
            let a_into_factor = dec.projections[fi].matrix().matmul(t.left.matrix());
            let mut kept = 0usize;
            for (ei, emb) in embs.iter().enumerate() {
                let into_m = tower.embedding(d, m).matmul(&emb.matrix);
                // must extend the geometric point on kappa
                let via_kappa = into_m.matmul(&kappa_into_factor);
                let expected = tower
                    .embedding(e, m)
                    .matmul(&gp.embedding.matrix);
                if via_kappa != expected {
                    continue;
                }
                elements.push((fi, ei));
                maps.push(into_m.matmul(&a_into_factor));
                kept += 1;
            }
            debug_assert_eq!(kept * e, d, "each factor contributes [K : kappa] points");
        }
    }
    // the maps extend the geometric point through the structure map
    #[cfg(debug_assertions)]
    for mp in &maps {
        debug_assert_eq!(mp.matmul(a.structure_map(x).matrix()), gp_on_stalk);
    }
    let _ = gp_on_stalk;
    let _ = omega;
    // Frobenius relative to kappa(p): postcompose with x -> x^(p^e)
    let frob = tower.frobenius_power(m, e);
    let mut frobenius = Vec::with_capacity(maps.len());
    for mp in &maps {
        let moved = frob.matmul(mp);
        let idx = maps
            .iter()
            .position(|other| other == &moved)
            .expect("Frobenius permutes the fiber");
        frobenius.push(idx);
    }
    Ok(FiberSet { elements, maps, at_point: x, frobenius, omega_degree: m })
}

/// Functoriality: a cover morphism f: A -> B induces Fib(B) -> Fib(A) by
/// composition. Returns the index mapping.
pub fn fib_map(
    f: &super::CoverMorphism,
    fib_src_of_b: &FiberSet,
    fib_of_a: &FiberSet,
) -> Result<Vec<usize>> {
    assert_eq!(fib_src_of_b.omega_degree, fib_of_a.omega_degree);
    assert_eq!(fib_src_of_b.at_point, fib_of_a.at_point);
    let x = fib_of_a.at_point;
    let mut out = Vec::with_capacity(fib_src_of_b.len());
    for psi in &fib_src_of_b.maps {
        let composed = psi.matmul(f.map_at(x).matrix());
        let idx = fib_of_a
            .index_of(&composed)
            .ok_or_else(|| Error::InvalidInput("fiber map does not land in Fib(A)".into()))?;
        out.push(idx);
    }
    Ok(out)
}

fn lcm(a: usize, b: usize) -> usize {
    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            let t = a % b;
            a = b;
            b = t;
        }
        a
    }
    if a == 0 || b == 0 {
        a.max(b)
    } else {
        a / gcd(a, b) * b
    }
}

/// Keep the unused-import lint honest.
#[allow(unused)]
fn _use(_: &AlgebraMap) {}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::{geometric_points, schematic_points};
    use crate::rspace::fixtures::*;
    use crate::rspace::product_covers;
    use std::collections::BTreeMap;

    fn point_cover(alg: crate::algebra::Algebra) -> (RingedPoset, QcohAlgebra) {
        let pt = RingedPoset::point(f2());
        let s = AlgebraMap::new(
            f2(),
            alg.clone(),
            Mat::from_cols(2, alg.dim(), vec![alg.one().to_vec()]),
        )
        .unwrap();
        let a = QcohAlgebra::new(pt.clone(), vec![alg], vec![s], BTreeMap::new()).unwrap();
        (pt, a)
    }

    #[test]
    fn fib_of_f4_is_a_two_cycle() {
        let tower = OmegaTower::new(2, 6);
        let (pt, a) = point_cover(f4());
        let set = schematic_points(&pt).unwrap();
        let gps = geometric_points(&pt, &set, &tower).unwrap();
        let fb = fib(&pt, &a, &set, &gps[0], &tower, None).unwrap();
        assert_eq!(fb.len(), 2);
        assert_eq!(fb.frobenius, vec![1, 0]);
    }

    #[test]
    fn fib_of_f4_x_f2_is_two_cycle_plus_fixed_point() {
        let tower = OmegaTower::new(2, 6);
        let (pt, a) = point_cover(f4());
        let o = QcohAlgebra::structure_sheaf(&pt);
        let prod = product_covers(&a, &o).unwrap();
        let set = schematic_points(&pt).unwrap();
        let gps = geometric_points(&pt, &set, &tower).unwrap();
        let fb = fib(&pt, &prod, &set, &gps[0], &tower, None).unwrap();
        assert_eq!(fb.len(), 3);
        let mut cycle_lengths: Vec<usize> = Vec::new();
        let mut seen = vec![false; 3];
        for s in 0..3 {
            if seen[s] {
                continue;
            }
            let mut len = 0;
            let mut at = s;
            while !seen[at] {
                seen[at] = true;
                at = fb.frobenius[at];
                len += 1;
            }
            cycle_lengths.push(len);
        }
        cycle_lengths.sort_unstable();
        assert_eq!(cycle_lengths, vec![1, 2]);
    }

    #[test]
    fn fib_of_structure_sheaf_is_singleton() {
        let tower = OmegaTower::new(2, 6);
        let pt = RingedPoset::point(f2());
        let o = QcohAlgebra::structure_sheaf(&pt);
        let set = schematic_points(&pt).unwrap();
        let gps = geometric_points(&pt, &set, &tower).unwrap();
        let fb = fib(&pt, &o, &set, &gps[0], &tower, None).unwrap();
        assert_eq!(fb.len(), 1);
        assert_eq!(fb.frobenius, vec![0]);
    }

    #[test]
    fn fib_functorial_on_structure_map() {
        let tower = OmegaTower::new(2, 6);
        let (pt, a) = point_cover(f4());
        let o = QcohAlgebra::structure_sheaf(&pt);
        let set = schematic_points(&pt).unwrap();
        let gps = geometric_points(&pt, &set, &tower).unwrap();
        let m = Some(2);
        let fib_a = fib(&pt, &a, &set, &gps[0], &tower, m).unwrap();
        let fib_o = fib(&pt, &o, &set, &gps[0], &tower, m).unwrap();
        let hom = super::super::hom_set(&o, &a).unwrap();
        assert_eq!(hom.len(), 1);
        let induced = fib_map(&hom[0], &fib_a, &fib_o).unwrap();
        assert_eq!(induced, vec![0, 0]);
    }
}
