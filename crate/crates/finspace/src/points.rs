//! Schematic points (equivalence classes of (point, prime) pairs under
//! common lifting), their residue fields, geometric points valued in the
//! finite-field tower, and schematic / geometric fibers of morphisms.

use crate::algebra::{
    embeddings_into_omega, residue_field, spec_primes, tensor_over, Algebra, AlgebraMap,
    Embedding, FiniteFieldRep, Ideal, OmegaTower, TensorProduct,
};
use crate::linalg::Mat;
use crate::poset::Poset;
use crate::rspace::{is_schematic_space, RingedPoset, SpaceMorphism};
use crate::{Error, Result};
use std::collections::BTreeMap;

/// Pull a prime of the target back along an algebra map.
pub fn pullback_prime(map: &AlgebraMap, q: &Ideal) -> Ideal {
    let b_dim = map.dst().dim();
    let quot_rows = q.space().complement_indices().len();
    let mut quot = Mat::zeros(map.src().p(), quot_rows, b_dim);
    for j in 0..b_dim {
        let col = q.space().quotient_coords(&crate::linalg::unit_vec(b_dim, j));
        for (i, &c) in col.iter().enumerate() {
            quot.set(i, j, c);
        }
    }
    let composite = quot.matmul(map.matrix());
    Ideal::new_unchecked(map.src(), composite.kernel_basis())
}

/// One equivalence class of (point, prime-index) pairs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchematicPoint {
    /// Sorted members (point index, prime index into the point's spectrum).
    pub members: Vec<(usize, usize)>,
    /// The unique member whose point is maximal in the class.
    pub max_rep: (usize, usize),
}

/// All schematic points of a space, with the per-point spectra retained.
pub struct SchematicPointSet {
    pub primes: Vec<Vec<Ideal>>,
    pub classes: Vec<SchematicPoint>,
    class_of: BTreeMap<(usize, usize), usize>,
}

impl SchematicPointSet {
    pub fn class_of(&self, point: usize, prime: usize) -> usize {
        self.class_of[&(point, prime)]
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }
    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let r = self.find(self.parent[i]);
            self.parent[i] = r;
        }
        self.parent[i]
    }
    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Schematic points, with the equivalence generated by Hasse-edge liftings.
pub fn schematic_points(x_space: &RingedPoset) -> Result<SchematicPointSet> {
    let check = is_schematic_space(x_space)?;
    if !check.holds {
        return Err(Error::NotSchematic(format!("{:?}", check.witness)));
    }
    schematic_points_unchecked(x_space)
}

/// Same construction without re-verifying schematicity (used internally on
/// spaces already known schematic).
pub fn schematic_points_unchecked(x_space: &RingedPoset) -> Result<SchematicPointSet> {
    let primes: Vec<Vec<Ideal>> =
        x_space.stalks().iter().map(spec_primes).collect();
    let mut pairs = Vec::new();
    let mut pair_index = BTreeMap::new();
    for (x, ps) in primes.iter().enumerate() {
        for pi in 0..ps.len() {
            pair_index.insert((x, pi), pairs.len());
            pairs.push((x, pi));
        }
    }
    let mut uf = UnionFind::new(pairs.len());
    for &(a, b) in x_space.poset().hasse() {
        let r = x_space.res(a, b);
        for (qi, q) in primes[b].iter().enumerate() {
            let pulled = pullback_prime(r, q);
            let pi = primes[a]
                .iter()
                .position(|p| p == &pulled)
                .expect("pullback of a prime along a ring map is prime");
            uf.union(pair_index[&(a, pi)], pair_index[&(b, qi)]);
        }
    }
    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, &pr) in pairs.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(pr);
    }
    let mut classes = Vec::new();
    for (_, mut members) in groups {
        members.sort_unstable();
        // unique maximal representative; also no two members share a point
        let maximal: Vec<(usize, usize)> = members
            .iter()
            .copied()
            .filter(|&(x, _)| {
                members
                    .iter()
                    .all(|&(x2, _)| x2 == x || !x_space.poset().lt(x, x2))
            })
            .collect();
        assert_eq!(
            maximal.len(),
            1,
            "every schematic point has a unique maximal representative"
        );
        for w in members.windows(2) {
            assert_ne!(w[0].0, w[1].0, "two primes of one stalk are never equivalent");
        }
        classes.push(SchematicPoint { members, max_rep: maximal[0] });
    }
    classes.sort_by_key(|c| c.max_rep);
    let mut class_of = BTreeMap::new();
    for (i, c) in classes.iter().enumerate() {
        for &m in &c.members {
            class_of.insert(m, i);
        }
    }
    Ok(SchematicPointSet { primes, classes, class_of })
}

/// Brute-force oracle: the relation over all comparable pairs at once
/// (not just Hasse edges). Returns the resulting partition sizes/classes.
pub fn schematic_points_oracle(x_space: &RingedPoset) -> Result<Vec<Vec<(usize, usize)>>> {
    let primes: Vec<Vec<Ideal>> = x_space.stalks().iter().map(spec_primes).collect();
    let mut pairs = Vec::new();
    let mut pair_index = BTreeMap::new();
    for (x, ps) in primes.iter().enumerate() {
        for pi in 0..ps.len() {
            pair_index.insert((x, pi), pairs.len());
            pairs.push((x, pi));
        }
    }
    let mut uf = UnionFind::new(pairs.len());
    // (x,p) ~ (y,q) if some (z,r) with z >= x,y pulls back to both
    for (z, ps) in primes.iter().enumerate() {
        for (ri, r) in ps.iter().enumerate() {
            for x in 0..x_space.len() {
                if !x_space.poset().leq(x, z) {
                    continue;
                }
                let pulled = pullback_prime(x_space.res(x, z), r);
                let pi = primes[x].iter().position(|p| p == &pulled).unwrap();
                uf.union(pair_index[&(x, pi)], pair_index[&(z, ri)]);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<(usize, usize)>> = BTreeMap::new();
    for (i, &pr) in pairs.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(pr);
    }
    let mut out: Vec<Vec<(usize, usize)>> = groups
        .into_values()
        .map(|mut v| {
            v.sort_unstable();
            v
        })
        .collect();
    out.sort();
    Ok(out)
}

/// Residue field at a schematic point: computed at the maximal
/// representative, with equal degree across members asserted.
pub fn residue_field_of_point(
    x_space: &RingedPoset,
    set: &SchematicPointSet,
    class: usize,
) -> Result<(FiniteFieldRep, AlgebraMap)> {
    let sp = &set.classes[class];
    let (x, pi) = sp.max_rep;
    let (rep, qmap) = residue_field(x_space.stalk(x), &set.primes[x][pi])?;
    #[cfg(debug_assertions)]
    for &(y, qi) in &sp.members {
        let (other, _) = residue_field(x_space.stalk(y), &set.primes[y][qi])?;
        debug_assert_eq!(other.degree(), rep.degree());
    }
    Ok((rep, qmap))
}

/// A schematic point together with an embedding of its residue field into
/// the tower.
#[derive(Clone, Debug)]
pub struct GeometricPoint {
    pub class: usize,
    pub residue: FiniteFieldRep,
    /// Quotient map onto the residue field at the maximal representative.
    pub to_residue: AlgebraMap,
    pub embedding: Embedding,
}

/// All geometric points: one per (schematic point, embedding) pair.
pub fn geometric_points(
    x_space: &RingedPoset,
    set: &SchematicPointSet,
    tower: &OmegaTower,
) -> Result<Vec<GeometricPoint>> {
    let mut out = Vec::new();
    for class in 0..set.len() {
        let (rep, qmap) = residue_field_of_point(x_space, set, class)?;
        let (embs, _) = embeddings_into_omega(&rep, tower)?;
        for embedding in embs {
            out.push(GeometricPoint {
                class,
                residue: rep.clone(),
                to_residue: qmap.clone(),
                embedding,
            });
        }
    }
    Ok(out)
}

/// Is a morphism from a one-point field space a geometric point: its prime
/// must not lift to any strictly larger point.
pub fn is_geometric_point(f: &SpaceMorphism) -> Result<bool> {
    if f.src().len() != 1 {
        return Err(Error::BadShape("a geometric point has a one-point source".into()));
    }
    let x = f.apply(0);
    let prime = f.comorphism(0).kernel();
    let x_space = f.dst();
    for x2 in 0..x_space.len() {
        if !x_space.poset().lt(x, x2) {
            continue;
        }
        for q in spec_primes(x_space.stalk(x2)) {
            if pullback_prime(x_space.res(x, x2), &q) == prime {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The image class of a schematic point under a morphism: push the maximal
/// representative through the comorphism. All members are asserted to land
/// in the same class.
pub fn transport_class(
    f: &SpaceMorphism,
    src_set: &SchematicPointSet,
    class: usize,
    dst_set: &SchematicPointSet,
) -> usize {
    let mut image = None;
    for &(x, qi) in &src_set.classes[class].members {
        let y = f.apply(x);
        let pulled = pullback_prime(f.comorphism(x), &src_set.primes[x][qi]);
        let pi = dst_set.primes[y]
            .iter()
            .position(|p| p == &pulled)
            .expect("pullback of a prime is a prime");
        let c = dst_set.class_of(y, pi);
        match image {
            None => image = Some(c),
            Some(prev) => {
                debug_assert_eq!(prev, c, "image class independent of representative")
            }
        }
    }
    image.expect("classes are non-empty")
}

/// Schematic fiber of a morphism over a schematic point of the target:
/// the classes of the source whose image class is the given one.
pub fn schematic_fiber(
    f: &SpaceMorphism,
    src_set: &SchematicPointSet,
    dst_set: &SchematicPointSet,
    target_class: usize,
) -> Vec<usize> {
    (0..src_set.len())
        .filter(|&c| transport_class(f, src_set, c, dst_set) == target_class)
        .collect()
}

/// A geometric fiber: the pw of the fiber product against a splitting-field
/// point, with the relative Frobenius permutation of its points.
pub struct FiberSpace {
    pub space: RingedPoset,
    pub frobenius: Vec<usize>,
    /// Degree of the splitting field used for the computation.
    pub kappa_degree: usize,
}

pub fn geometric_fiber(
    f: &SpaceMorphism,
    dst_set: &SchematicPointSet,
    gp: &GeometricPoint,
    tower: &OmegaTower,
) -> Result<FiberSpace> {
    let (y, _) = dst_set.classes[gp.class].max_rep;
    let e = gp.residue.degree();
    // fiber points and their algebras over kappa(p)
    let fiber_points: Vec<usize> =
        (0..f.src().len()).filter(|&x| f.apply(x) == y).collect();
    // splitting degree: lcm of residue degrees of all fiber algebras over F_p
    let mut m = e;
    let mut kappa_tensors: Vec<TensorProduct> = Vec::new();
    for &x in &fiber_points {
        let t = tensor_over(&gp.to_residue, f.comorphism(x));
        if !t.algebra.is_zero_ring() {
            for q in spec_primes(&t.algebra) {
                let (rep, _) = residue_field(&t.algebra, &q)?;
                m = lcm(m, rep.degree());
            }
        }
        kappa_tensors.push(t);
    }
    if m > tower.max_degree() {
        return Err(Error::TowerTooSmall { needed: m, available: tower.max_degree() });
    }
    let kappa = tower.field(m).clone();
    // structure map O_y -> kappa': quotient, embed at degree e, lift to m
    let into_tower = tower
        .embedding(e, m)
        .matmul(&gp.embedding.matrix)
        .matmul(gp.to_residue.matrix());
    let structure = AlgebraMap::new(f.dst().stalk(y).clone(), kappa.clone(), into_tower)?;
    // stalks kappa' (x)_{O_y} O_x on the induced subposet of the fiber
    let tensors: Vec<TensorProduct> = fiber_points
        .iter()
        .map(|&x| tensor_over(&structure, f.comorphism(x)))
        .collect();
    let names: Vec<String> = fiber_points
        .iter()
        .map(|&x| f.src().poset().name(x).to_string())
        .collect();
    let mut rel = Vec::new();
    for (i, &x1) in fiber_points.iter().enumerate() {
        for (j, &x2) in fiber_points.iter().enumerate() {
            if i != j && f.src().poset().leq(x1, x2) {
                rel.push((i, j));
            }
        }
    }
    let poset = Poset::from_relation(names, &rel)?;
    let stalks: Vec<Algebra> = tensors.iter().map(|t| t.algebra.clone()).collect();
    let mut res = BTreeMap::new();
    for &(i, j) in poset.hasse() {
        let id_kappa = AlgebraMap::identity(&kappa);
        let step = tensors[i].induced_map(
            &tensors[j],
            &id_kappa,
            f.src().res(fiber_points[i], fiber_points[j]),
        );
        res.insert((i, j), step);
    }
    let product = RingedPoset::new(poset, stalks, res)?;
    let pw = crate::pwconn::pw_space(&product)?;
    // relative Frobenius x -> x^(p^e) acts kappa-semilinearly on each stalk
    let frob_kappa = AlgebraMap::new(kappa.clone(), kappa.clone(), tower.frobenius_power(m, e))?;
    let mut frobenius = Vec::with_capacity(pw.space.len());
    for (i, (prod_pt, idem)) in pw.index.iter().enumerate() {
        let t = &tensors[*prod_pt];
        let id_ox = AlgebraMap::identity(f.src().stalk(fiber_points[*prod_pt]));
        let auto = t.induced_map(t, &frob_kappa, &id_ox);
        let image = auto.apply(idem);
        let j = pw
            .index
            .iter()
            .enumerate()
            .position(|(k, (pt2, idem2))| {
                *pt2 == *prod_pt && idem2 == &image && {
                    let _ = k;
                    true
                }
            })
            .expect("Frobenius permutes the local factors");
        frobenius.push(j);
        let _ = i;
    }
    // the permutation respects the order
    #[cfg(debug_assertions)]
    for a in 0..pw.space.len() {
        for b in 0..pw.space.len() {
            debug_assert_eq!(
                pw.space.poset().leq(a, b),
                pw.space.poset().leq(frobenius[a], frobenius[b])
            );
        }
    }
    Ok(FiberSpace { space: pw.space, frobenius, kappa_degree: m })
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rspace::fixtures::*;

    #[test]
    fn chain_has_two_schematic_points() {
        // chain a < b with O_a = F_2 x F_2, res = pr1: pairs (a,p1), (a,p2),
        // (b,0); (a,p1) ~ (b,0)
        let chain = chain_pr1();
        let set = schematic_points(&chain).unwrap();
        assert_eq!(set.len(), 2);
        let sizes: Vec<usize> = set.classes.iter().map(|c| c.members.len()).collect();
        assert!(sizes.contains(&2) && sizes.contains(&1));
        // oracle agrees
        let oracle = schematic_points_oracle(&chain).unwrap();
        let mut ours: Vec<Vec<(usize, usize)>> =
            set.classes.iter().map(|c| c.members.clone()).collect();
        ours.sort();
        assert_eq!(ours, oracle);
    }

    #[test]
    fn xv_has_two_schematic_points_with_max_reps_at_tops() {
        let xv = xv();
        let set = schematic_points(&xv).unwrap();
        assert_eq!(set.len(), 2);
        for c in &set.classes {
            assert!(c.max_rep.0 == 1 || c.max_rep.0 == 2);
        }
    }

    #[test]
    fn field_point_has_one_schematic_point() {
        let pt = RingedPoset::point(f4());
        let set = schematic_points(&pt).unwrap();
        assert_eq!(set.len(), 1);
    }

    #[test]
    fn geometric_point_counts() {
        let tower = OmegaTower::new(2, 4);
        let xv = xv();
        let set = schematic_points(&xv).unwrap();
        let gps = geometric_points(&xv, &set, &tower).unwrap();
        assert_eq!(gps.len(), 2);

        let pt = RingedPoset::point(f4());
        let set = schematic_points(&pt).unwrap();
        let gps = geometric_points(&pt, &set, &tower).unwrap();
        assert_eq!(gps.len(), 2);

        let pt2 = RingedPoset::point(f2());
        let set2 = schematic_points(&pt2).unwrap();
        assert_eq!(geometric_points(&pt2, &set2, &tower).unwrap().len(), 1);
    }

    #[test]
    fn lifting_criterion_on_chain() {
        // candidate at b (maximal): always geometric
        let chain = chain_pr1();
        let pt = RingedPoset::point(f2());
        let id = AlgebraMap::identity(&f2());
        let at_b = SpaceMorphism::new(pt.clone(), chain.clone(), vec![1], vec![id]).unwrap();
        assert!(is_geometric_point(&at_b).unwrap());
        // candidate at a with kernel p1 (pr1 kernel): lifts to b -> false
        let (prod, projs) = f2xf2();
        let _ = prod;
        let at_a_p1 =
            SpaceMorphism::new(pt.clone(), chain.clone(), vec![0], vec![projs[0].clone()])
                .unwrap();
        assert!(!is_geometric_point(&at_a_p1).unwrap());
        // candidate at a with kernel p2: does not lift through pr1 -> true
        let at_a_p2 =
            SpaceMorphism::new(pt, chain.clone(), vec![0], vec![projs[1].clone()]).unwrap();
        assert!(is_geometric_point(&at_a_p2).unwrap());

        // the lifting criterion coincides with schematicity of the morphism,
        // computed independently through the cohomological comparison maps
        for candidate in [&at_b, &at_a_p1, &at_a_p2] {
            assert_eq!(
                is_geometric_point(candidate).unwrap(),
                crate::rspace::is_schematic_morphism(candidate).unwrap().holds,
                "lifting criterion must match the cohomological definition"
            );
        }
    }

    #[test]
    fn schematic_fiber_of_identity_and_collapse() {
        let chain = chain_pr1();
        let set = schematic_points(&chain).unwrap();
        let id = SpaceMorphism::identity(&chain);
        for c in 0..set.len() {
            assert_eq!(schematic_fiber(&id, &set, &set, c), vec![c]);
        }
        let c = collapse();
        let src_set = schematic_points(c.src()).unwrap();
        let dst_set = schematic_points(c.dst()).unwrap();
        assert_eq!(dst_set.len(), 2);
        for t in 0..dst_set.len() {
            assert_eq!(schematic_fiber(&c, &src_set, &dst_set, t).len(), 1);
        }
    }

    #[test]
    fn geometric_fiber_of_field_extension() {
        // (*, F_4) -> (*, F_2): two fiber points swapped by Frobenius
        let tower = OmegaTower::new(2, 4);
        let f4 = f4();
        let x = RingedPoset::point(f4.clone());
        let z = RingedPoset::point(f2());
        let inc =
            AlgebraMap::new(f2(), f4.clone(), Mat::from_cols(2, 2, vec![vec![1, 0]])).unwrap();
        let f = SpaceMorphism::new(x, z.clone(), vec![0], vec![inc]).unwrap();
        let zset = schematic_points(&z).unwrap();
        let gps = geometric_points(&z, &zset, &tower).unwrap();
        assert_eq!(gps.len(), 1);
        let fiber = geometric_fiber(&f, &zset, &gps[0], &tower).unwrap();
        assert_eq!(fiber.space.len(), 2);
        assert_eq!(fiber.frobenius, vec![1, 0]);
        assert_eq!(fiber.kappa_degree, 2);
    }

    #[test]
    fn geometric_fiber_of_qciso_is_singleton() {
        // the fiber space may have several topological points (here the
        // two-point chain), but exactly one schematic point per geometric
        // point of the target
        let tower = OmegaTower::new(2, 4);
        let c = collapse();
        let dst_set = schematic_points(c.dst()).unwrap();
        let gps = geometric_points(c.dst(), &dst_set, &tower).unwrap();
        assert_eq!(gps.len(), 2);
        for gp in &gps {
            let fiber = geometric_fiber(&c, &dst_set, gp, &tower).unwrap();
            let fiber_points = schematic_points(&fiber.space).unwrap();
            assert_eq!(fiber_points.len(), 1);
        }
    }
}
