//! The executable Galois-category verification: close a family of covers
//! under products, tensor products, quotients by automorphism subgroups and
//! image factorizations, then check the five axioms instance by instance
//! with the fiber functor at a fixed geometric point.

use super::fiber::{fib, fib_map, splitting_degree, FiberSet};
use super::homs::{aut_group, hom_set, image_factorization, quotient_by_group};
use super::{constant_degree, is_etale_cover, CoverMorphism};
use crate::algebra::{local_decomposition, tensor_over, AlgebraMap, OmegaTower};
use crate::linalg::Mat;
use crate::points::{geometric_points, schematic_points, GeometricPoint, SchematicPointSet};
use crate::pwconn::{connectivity_profile, wc_components_algebra};
use crate::rspace::{product_covers, tensor_covers, QcohAlgebra, RingedPoset};
use crate::{Error, Result};

/// Hom sets larger than this are not enumerated for instance checks.
const HOM_CAP: usize = 200;
/// Upper bound on family size during closure.
const FAMILY_CAP: usize = 64;

/// Galois object test: connected and the quotient by the full automorphism
/// group is the base.
pub fn is_galois(x_space: &RingedPoset, a: &QcohAlgebra) -> Result<bool> {
    let comps = wc_components_algebra(x_space, a)?;
    if comps.components.len() != 1 || a.fibers().iter().any(|f| f.is_zero_ring()) {
        return Ok(false);
    }
    let aut = aut_group(a)?;
    let (inv, _) = quotient_by_group(a, &aut.elements)?;
    // A^G = O: the structure maps of the invariants are isomorphisms
    Ok((0..x_space.len()).all(|x| inv.structure_map(x).is_bijective()))
}

/// The automorphism group of a Galois cover.
pub fn galois_group(a: &QcohAlgebra) -> Result<super::homs::AutGroup> {
    aut_group(a)
}

/// One checked instance of one axiom.
#[derive(Clone, Debug)]
pub struct AxiomInstance {
    pub axiom: u8,
    pub description: String,
    pub pass: bool,
}

/// Fiber data for one family member.
#[derive(Clone, Debug)]
pub struct FibSummary {
    pub name: String,
    pub size: usize,
    pub frobenius: Vec<usize>,
    pub cycle_lengths: Vec<usize>,
}

/// The full report.
pub struct AxiomReport {
    pub family: Vec<(String, QcohAlgebra)>,
    pub instances: Vec<AxiomInstance>,
    pub skipped: Vec<String>,
    pub fib_summary: Vec<FibSummary>,
    pub aut_orders: Vec<(String, usize)>,
    pub omega_degree: usize,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.instances.iter().all(|i| i.pass)
    }

    pub fn counts_by_axiom(&self) -> [usize; 5] {
        let mut out = [0usize; 5];
        for i in &self.instances {
            out[(i.axiom - 1) as usize] += 1;
        }
        out
    }
}

/// Isomorphism key: per point and per local factor of the base stalk, the
/// sorted dimensions of the fiber's local factors. Complete over local
/// stalks; over several points it is pointwise-complete and used as a
/// dedup key for family closure.
fn iso_key(a: &QcohAlgebra) -> Result<Vec<Vec<Vec<usize>>>> {
    let base = a.base();
    let mut key = Vec::with_capacity(base.len());
    for x in 0..base.len() {
        let stalk = base.stalk(x);
        let mut per_factor = Vec::new();
        if stalk.is_zero_ring() || a.fiber(x).is_zero_ring() {
            key.push(per_factor);
            continue;
        }
        let dec = local_decomposition(stalk)?;
        for e in &dec.idempotents {
            let ea = a.structure_map(x).apply(e);
            let fac = crate::algebra::idempotent_factor(a.fiber(x), &ea);
            let mut dims: Vec<usize> = if fac.factor.is_zero_ring() {
                Vec::new()
            } else {
                local_decomposition(&fac.factor)?
                    .factors
                    .iter()
                    .map(|g| g.dim())
                    .collect()
            };
            dims.sort_unstable();
            per_factor.push(dims);
        }
        key.push(per_factor);
    }
    Ok(key)
}

/// Conservative estimate of |Hom(A, B)| from factor degrees at one minimal
/// point (exact over a field stalk).
fn hom_count_estimate(a: &QcohAlgebra, b: &QcohAlgebra) -> Result<usize> {
    let base = a.base();
    let m = base.poset().minimal_points();
    let mut total = 1usize;
    for &x in &m {
        if a.fiber(x).is_zero_ring() {
            continue;
        }
        if b.fiber(x).is_zero_ring() {
            continue;
        }
        let da = local_decomposition(a.fiber(x))?;
        let db = local_decomposition(b.fiber(x))?;
        let mut at_point = 1usize;
        for l in &db.factors {
            let mut options = 0usize;
            for k in &da.factors {
                if k.dim() != 0 && l.dim() % k.dim() == 0 {
                    options += k.dim();
                }
            }
            at_point = at_point.saturating_mul(options.max(1));
        }
        total = total.saturating_mul(at_point);
    }
    Ok(total)
}

struct Family {
    x_space: RingedPoset,
    members: Vec<(String, QcohAlgebra)>,
    keys: Vec<Vec<Vec<Vec<usize>>>>,
    degrees: Vec<usize>,
    hom_cache: std::collections::BTreeMap<(usize, usize), Option<std::rc::Rc<Vec<CoverMorphism>>>>,
    aut_cache: std::collections::BTreeMap<usize, std::rc::Rc<super::homs::AutGroup>>,
}

impl Family {
    fn insert(&mut self, name: String, cover: QcohAlgebra) -> Result<Option<usize>> {
        let key = iso_key(&cover)?;
        if let Some(i) = self.keys.iter().position(|k| k == &key) {
            return Ok(Some(i));
        }
        if self.members.len() >= FAMILY_CAP {
            return Err(Error::SizeBound(format!("family larger than {FAMILY_CAP}")));
        }
        self.degrees.push(constant_degree(&self.x_space, &cover)?);
        self.members.push((name, cover));
        self.keys.push(key);
        Ok(None)
    }

    /// Hom(members[i], members[j]), memoized; None when the set is larger
    /// than the enumeration cap.
    fn homs(&mut self, i: usize, j: usize) -> Result<Option<std::rc::Rc<Vec<CoverMorphism>>>> {
        if let Some(cached) = self.hom_cache.get(&(i, j)) {
            return Ok(cached.clone());
        }
        let value = if hom_count_estimate(&self.members[i].1, &self.members[j].1)? > HOM_CAP {
            None
        } else {
            Some(std::rc::Rc::new(hom_set(&self.members[i].1, &self.members[j].1)?))
        };
        self.hom_cache.insert((i, j), value.clone());
        Ok(value)
    }

    fn aut(&mut self, i: usize) -> Result<Option<std::rc::Rc<super::homs::AutGroup>>> {
        if let Some(cached) = self.aut_cache.get(&i) {
            return Ok(Some(cached.clone()));
        }
        let Some(homs) = self.homs(i, i)? else { return Ok(None) };
        let autos: Vec<CoverMorphism> =
            homs.iter().filter(|m| m.is_isomorphism()).cloned().collect();
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
        let rc = std::rc::Rc::new(super::homs::AutGroup { elements: autos, table });
        self.aut_cache.insert(i, rc.clone());
        Ok(Some(rc))
    }
}

/// Run the axiom suite on a connected schematic space, starting from a list
/// of named generator covers and closing under the category operations up
/// to the degree bound.
pub fn galois_axioms_report(
    x_space: &RingedPoset,
    generators: &[(String, QcohAlgebra)],
    gp_index: usize,
    max_degree: usize,
    tower: &OmegaTower,
) -> Result<AxiomReport> {
    let profile = connectivity_profile(x_space)?;
    if !profile.connected {
        return Err(Error::NotConnected);
    }
    if !profile.well_connected {
        // reduce along pw(X) -> X; covers transport by pullback
        let pw = crate::pwconn::pw_space(x_space)?;
        let moved: Vec<(String, QcohAlgebra)> = generators
            .iter()
            .map(|(n, g)| {
                Ok((n.clone(), crate::rspace::pullback_algebra(&pw.projection, g)?))
            })
            .collect::<Result<_>>()?;
        return galois_axioms_report(&pw.space, &moved, gp_index, max_degree, tower);
    }
    let set = schematic_points(x_space)?;
    let gps = geometric_points(x_space, &set, tower)?;
    let gp = gps
        .get(gp_index)
        .ok_or_else(|| Error::InvalidInput(format!("no geometric point #{gp_index}")))?;
    for (name, g) in generators {
        let check = is_etale_cover(x_space, g)?;
        if !check.holds {
            return Err(Error::InvalidInput(format!(
                "generator {name} is not an etale cover: {}",
                check.diagnosis
            )));
        }
    }
    let mut family = Family {
        x_space: x_space.clone(),
        members: Vec::new(),
        keys: Vec::new(),
        degrees: Vec::new(),
        hom_cache: std::collections::BTreeMap::new(),
        aut_cache: std::collections::BTreeMap::new(),
    };
    family.insert("0".into(), QcohAlgebra::free(x_space, 0))?;
    family.insert("O".into(), QcohAlgebra::structure_sheaf(x_space))?;
    for (name, g) in generators {
        family.insert(name.clone(), g.clone())?;
    }
    let mut instances: Vec<AxiomInstance> = Vec::new();
    let mut skipped: Vec<String> = Vec::new();

    // ---- closure under products, tensors, quotients, images -------------
    // each round processes only pairs that involve a member added since the
    // previous round
    let mut frontier = 0usize;
    loop {
        let upto = family.members.len();
        // products and tensors among pairs touching the new members
        for i in 0..upto {
            for j in i.max(frontier)..upto {
                let (ni, ai) = family.members[i].clone();
                let (nj, aj) = family.members[j].clone();
                let (di, dj) = (family.degrees[i], family.degrees[j]);
                if di + dj <= max_degree {
                    let prod = product_covers(&ai, &aj)?;
                    let check = is_etale_cover(x_space, &prod)?;
                    instances.push(AxiomInstance {
                        axiom: 2,
                        description: format!("({ni} x {nj}) is a cover"),
                        pass: check.holds,
                    });
                    family.insert(format!("({ni} x {nj})"), prod)?;
                }
                if di * dj <= max_degree && di > 0 && dj > 0 {
                    let tens = tensor_covers(&ai, &aj)?;
                    let check = is_etale_cover(x_space, &tens)?;
                    instances.push(AxiomInstance {
                        axiom: 1,
                        description: format!("({ni} (x) {nj}) is a cover"),
                        pass: check.holds,
                    });
                    family.insert(format!("({ni} (x) {nj})"), tens)?;
                }
            }
        }
        // quotients by automorphism subgroups of the new members
        for i in frontier..upto {
            let (ni, ai) = family.members[i].clone();
            if family.degrees[i] == 0 {
                continue;
            }
            let Some(aut) = family.aut(i)? else {
                skipped.push(format!("Aut({ni}) too large to enumerate"));
                continue;
            };
            for sub in subgroups(&aut) {
                let (quot, _) = quotient_by_group(&ai, &sub)?;
                let check = is_etale_cover(x_space, &quot)?;
                instances.push(AxiomInstance {
                    axiom: 2,
                    description: format!("{ni}^G (|G| = {}) is a cover", sub.len()),
                    pass: check.holds,
                });
                family.insert(format!("{ni}^G{}", sub.len()), quot)?;
            }
        }
        // image factorizations of morphisms touching the new members; each
        // ordered pair is reached exactly once across the rounds. Axiom 3 is
        // recorded here; factorizations are capped per pair, with every epi
        // included for the direct-summand half of the axiom.
        for i in 0..upto {
            for j in 0..upto {
                if i < frontier && j < frontier {
                    continue;
                }
                let (ni, nj) = (family.members[i].0.clone(), family.members[j].0.clone());
                let Some(homs) = family.homs(i, j)? else {
                    skipped.push(format!("Hom({ni}, {nj}) too large to enumerate"));
                    continue;
                };
                if homs.len() > 24 {
                    skipped.push(format!(
                        "factorization instances capped at 24 of {} for Hom({ni}, {nj})",
                        homs.len()
                    ));
                }
                for (k, f) in homs.iter().enumerate().take(24) {
                    let is_epi = f.is_epi();
                    let fac = image_factorization(f)?;
                    let recomposed = fac.mono.compose(&fac.epi);
                    instances.push(AxiomInstance {
                        axiom: 3,
                        description: format!("{ni}->{nj}#{k} factors as mono o epi"),
                        pass: fac.epi.is_epi() && fac.mono.is_mono() && &recomposed == f,
                    });
                    if is_epi {
                        let split = fac.mono.is_isomorphism()
                            && fac.image.fiber(0).dim() + fac.complement.fiber(0).dim()
                                == family.members[i].1.fiber(0).dim();
                        instances.push(AxiomInstance {
                            axiom: 3,
                            description: format!(
                                "epi {ni}->{nj}#{k} realizes {nj} as a direct summand"
                            ),
                            pass: split,
                        });
                    }
                    family.insert(format!("im({ni}->{nj}#{k})"), fac.image)?;
                    family.insert(format!("coim({ni}->{nj}#{k})"), fac.complement)?;
                }
            }
        }
        if family.members.len() == upto {
            break;
        }
        frontier = upto;
    }

    // ---- shared fiber degree --------------------------------------------
    let mut omega_degree = gp.residue.degree();
    for (_, a) in &family.members {
        omega_degree = lcm(omega_degree, splitting_degree(a, &set, gp)?);
    }
    if omega_degree > tower.max_degree() {
        return Err(Error::TowerTooSmall {
            needed: omega_degree,
            available: tower.max_degree(),
        });
    }
    let fibs: Vec<FiberSet> = family
        .members
        .iter()
        .map(|(_, a)| fib(x_space, a, &set, gp, tower, Some(omega_degree)))
        .collect::<Result<_>>()?;

    // ---- axiom 1: terminal object and fibered products ------------------
    instances.push(AxiomInstance {
        axiom: 1,
        description: "terminal object O present with Fib(O) a singleton".into(),
        pass: fibs[family.members.iter().position(|(n, _)| n == "O").unwrap()].len() == 1,
    });
    let upto = family.members.len();
    let mut fp_checked = 0usize;
    'fp: for c in 0..upto {
        for i in 0..upto {
            for j in i..upto {
                if fp_checked >= 60 {
                    skipped.push("fibered-product instances capped at 60".into());
                    break 'fp;
                }
                let (dc, di, dj) =
                    (family.degrees[c], family.degrees[i], family.degrees[j]);
                if dc == 0 || di == 0 || dj == 0 || di * dj / dc.max(1) > max_degree {
                    continue;
                }
                let Some(homs_i) = family.homs(c, i)? else { continue };
                let Some(homs_j) = family.homs(c, j)? else { continue };
                let (nc, ac) = family.members[c].clone();
                let (ni, ai) = family.members[i].clone();
                let (nj, aj) = family.members[j].clone();
                for u in homs_i.iter().take(2) {
                    for v in homs_j.iter().take(2) {
                        let (pass, desc) = check_fibered_product(
                            x_space,
                            &set,
                            gp,
                            tower,
                            omega_degree,
                            &ac,
                            &ai,
                            &aj,
                            u,
                            v,
                            &nc,
                            &ni,
                            &nj,
                            &fibs[i],
                            &fibs[j],
                            &fibs[c],
                        )?;
                        instances.push(AxiomInstance { axiom: 1, description: desc.clone(), pass });
                        instances.push(AxiomInstance {
                            axiom: 4,
                            description: format!("Fib commutes with {desc}"),
                            pass,
                        });
                        fp_checked += 1;
                    }
                }
            }
        }
    }

    // ---- axiom 2 and 4: sums and quotients under Fib ---------------------
    for i in 0..upto {
        for j in i..upto {
            let (ni, ai) = &family.members[i];
            let (nj, aj) = &family.members[j];
            let (di, dj) = (family.degrees[i], family.degrees[j]);
            if di + dj > max_degree {
                continue;
            }
            let prod = product_covers(ai, aj)?;
            let fib_prod = fib(x_space, &prod, &set, gp, tower, Some(omega_degree))?;
            let pass = fib_prod.len() == fibs[i].len() + fibs[j].len()
                && sum_decomposes(x_space, &prod, ai, aj, &fib_prod, &fibs[i], &fibs[j])?;
            instances.push(AxiomInstance {
                axiom: 4,
                description: format!("Fib({ni} x {nj}) = Fib({ni}) + Fib({nj})"),
                pass,
            });
        }
    }
    for i in 0..upto {
        if family.degrees[i] == 0 {
            continue;
        }
        let Some(aut) = family.aut(i)? else { continue };
        let (ni, ai) = family.members[i].clone();
        let ni = &ni;
        let ai = &ai;
        for sub in subgroups(&aut) {
            let (quot, inclusion) = quotient_by_group(ai, &sub)?;
            let fib_q = fib(x_space, &quot, &set, gp, tower, Some(omega_degree))?;
            // Fib(A) -> Fib(A^G) via the inclusion; fibers must be G-orbits
            let to_q = fib_map(&inclusion, &fibs[i], &fib_q)?;
            let mut pass = to_q.len() == fibs[i].len();
            // surjectivity
            for t in 0..fib_q.len() {
                if !to_q.contains(&t) {
                    pass = false;
                }
            }
            // orbits: psi ~ psi' iff exists g with psi o g = psi'
            let mut orbit_reps: Vec<Vec<usize>> = Vec::new();
            let mut seen = vec![false; fibs[i].len()];
            for s in 0..fibs[i].len() {
                if seen[s] {
                    continue;
                }
                let mut orbit = Vec::new();
                for g in &sub {
                    let perm = fib_map(g, &fibs[i], &fibs[i])?;
                    let t = perm[s];
                    if !orbit.contains(&t) {
                        orbit.push(t);
                        seen[t] = true;
                    }
                }
                orbit_reps.push(orbit);
            }
            for orbit in &orbit_reps {
                let targets: std::collections::BTreeSet<usize> =
                    orbit.iter().map(|&s| to_q[s]).collect();
                if targets.len() != 1 {
                    pass = false;
                }
            }
            if orbit_reps.len() != fib_q.len() {
                pass = false;
            }
            instances.push(AxiomInstance {
                axiom: 4,
                description: format!(
                    "Fib({ni}^G) = Fib({ni})/G for |G| = {}",
                    sub.len()
                ),
                pass,
            });
        }
    }

    // ---- axioms 4 (monos) and 5 over all enumerable hom sets -------------
    // hom sets are already cached from the closure rounds
    for i in 0..upto {
        for j in 0..upto {
            let Some(homs) = family.homs(i, j)? else { continue };
            let (ni, nj) = (family.members[i].0.clone(), family.members[j].0.clone());
            let (ni, nj) = (&ni, &nj);
            for (k, f) in homs.iter().enumerate() {
                // Fib sends monos (injective maps) to surjections
                if f.is_mono() {
                    let induced = fib_map(f, &fibs[j], &fibs[i])?;
                    let onto = (0..fibs[i].len()).all(|s| induced.contains(&s));
                    instances.push(AxiomInstance {
                        axiom: 4,
                        description: format!("Fib surjective on mono {ni}->{nj}#{k}"),
                        pass: onto,
                    });
                }
                // conservativity
                let induced = fib_map(f, &fibs[j], &fibs[i])?;
                let bijective = fibs[i].len() == fibs[j].len() && {
                    let mut seen = vec![false; fibs[i].len()];
                    induced.iter().for_each(|&t| seen[t] = true);
                    seen.into_iter().all(|s| s)
                };
                if bijective {
                    instances.push(AxiomInstance {
                        axiom: 5,
                        description: format!(
                            "Fib({ni}->{nj}#{k}) bijective forces an isomorphism"
                        ),
                        pass: f.is_isomorphism(),
                    });
                }
            }
        }
    }

    // ---- summaries --------------------------------------------------------
    let mut fib_summary = Vec::new();
    for ((name, _), fs) in family.members.iter().zip(&fibs) {
        fib_summary.push(FibSummary {
            name: name.clone(),
            size: fs.len(),
            frobenius: fs.frobenius.clone(),
            cycle_lengths: cycle_lengths(&fs.frobenius),
        });
    }
    let mut aut_orders = Vec::new();
    for (name, a) in &family.members {
        if constant_degree(x_space, a)? == 0 || hom_count_estimate(a, a)? > HOM_CAP {
            continue;
        }
        aut_orders.push((name.clone(), aut_group(a)?.order()));
    }
    Ok(AxiomReport {
        family: family.members,
        instances,
        skipped,
        fib_summary,
        aut_orders,
        omega_degree,
    })
}

#[allow(clippy::too_many_arguments)]
fn check_fibered_product(
    x_space: &RingedPoset,
    set: &SchematicPointSet,
    gp: &GeometricPoint,
    tower: &OmegaTower,
    omega_degree: usize,
    _ac: &QcohAlgebra,
    ai: &QcohAlgebra,
    aj: &QcohAlgebra,
    u: &CoverMorphism,
    v: &CoverMorphism,
    nc: &str,
    ni: &str,
    nj: &str,
    fib_a: &FiberSet,
    fib_b: &FiberSet,
    fib_c: &FiberSet,
) -> Result<(bool, String)> {
    let desc = format!("{ni} (x)_{nc} {nj}");
    // build A (x)_C B pointwise over the maps u, v
    let base = x_space;
    let p = base.p();
    let tensors: Vec<_> = (0..base.len())
        .map(|x| tensor_over(u.map_at(x), v.map_at(x)))
        .collect();
    let fibers: Vec<_> = tensors.iter().map(|t| t.algebra.clone()).collect();
    let structure: Vec<AlgebraMap> = (0..base.len())
        .map(|x| tensors[x].left.compose(ai.structure_map(x)))
        .collect();
    let mut res = std::collections::BTreeMap::new();
    for &(x, y) in base.poset().hasse() {
        res.insert(
            (x, y),
            tensors[x].induced_map(&tensors[y], ai.res(x, y), aj.res(x, y)),
        );
    }
    let tensor_cover = QcohAlgebra::new(base.clone(), fibers, structure, res)?;
    let check = is_etale_cover(x_space, &tensor_cover)?;
    if !check.holds {
        return Ok((false, desc));
    }
    // Fib(A (x)_C B) = Fib(A) x_{Fib(C)} Fib(B)
    let fib_t = fib(x_space, &tensor_cover, set, gp, tower, Some(omega_degree))?;
    let left_leg = CoverMorphism::new(
        ai.clone(),
        tensor_cover.clone(),
        (0..base.len()).map(|x| tensors[x].left.clone()).collect(),
    )?;
    let right_leg = CoverMorphism::new(
        aj.clone(),
        tensor_cover.clone(),
        (0..base.len()).map(|x| tensors[x].right.clone()).collect(),
    )?;
    let to_a = fib_map(&left_leg, &fib_t, &fib_a)?;
    let to_b = fib_map(&right_leg, &fib_t, &fib_b)?;
    let a_to_c = fib_map(u, &fib_a, &fib_c)?;
    let b_to_c = fib_map(v, &fib_b, &fib_c)?;
    // the pairs (to_a, to_b) must be exactly the compatible pairs, uniquely
    let mut expected = 0usize;
    for s in 0..fib_a.len() {
        for t in 0..fib_b.len() {
            if a_to_c[s] == b_to_c[t] {
                expected += 1;
            }
        }
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut pass = fib_t.len() == expected;
    for e in 0..fib_t.len() {
        if a_to_c[to_a[e]] != b_to_c[to_b[e]] {
            pass = false;
        }
        if !seen.insert((to_a[e], to_b[e])) {
            pass = false;
        }
    }
    let _ = p;
    Ok((pass, desc))
}

/// Fib(A x B) decomposes as the disjoint union along the two projections.
fn sum_decomposes(
    x_space: &RingedPoset,
    prod: &QcohAlgebra,
    a: &QcohAlgebra,
    b: &QcohAlgebra,
    fib_prod: &FiberSet,
    fib_a: &FiberSet,
    fib_b: &FiberSet,
) -> Result<bool> {
    let base = x_space;
    let p = base.p();
    // the projections A x B -> A and -> B as cover morphisms
    let mut pa_maps = Vec::new();
    let mut pb_maps = Vec::new();
    for x in 0..base.len() {
        let (da, db) = (a.fiber(x).dim(), b.fiber(x).dim());
        let mut ma = Mat::zeros(p, da, da + db);
        for r in 0..da {
            ma.set(r, r, 1);
        }
        let mut mb = Mat::zeros(p, db, da + db);
        for r in 0..db {
            mb.set(r, da + r, 1);
        }
        pa_maps.push(AlgebraMap::new(prod.fiber(x).clone(), a.fiber(x).clone(), ma)?);
        pb_maps.push(AlgebraMap::new(prod.fiber(x).clone(), b.fiber(x).clone(), mb)?);
    }
    let pa = CoverMorphism::new(prod.clone(), a.clone(), pa_maps)?;
    let pb = CoverMorphism::new(prod.clone(), b.clone(), pb_maps)?;
    // Fib(A) -> Fib(A x B) along pa, similarly for B: images partition
    let ia = fib_map(&pa, fib_a, fib_prod)?;
    let ib = fib_map(&pb, fib_b, fib_prod)?;
    let mut hit = vec![0usize; fib_prod.len()];
    for &t in ia.iter().chain(ib.iter()) {
        hit[t] += 1;
    }
    Ok(hit.into_iter().all(|h| h == 1))
}

/// All subgroups of a (small) automorphism group, each containing the
/// identity and closed under composition.
fn subgroups(aut: &super::homs::AutGroup) -> Vec<Vec<CoverMorphism>> {
    let n = aut.order();
    let id = aut
        .elements
        .iter()
        .position(|e| {
            let probe = e.compose(&aut.elements[0]);
            probe == aut.elements[0]
        })
        .unwrap_or(0);
    let mut out = Vec::new();
    if n > 10 {
        // only the trivial and full subgroups at larger orders
        out.push(vec![aut.elements[id].clone()]);
        out.push(aut.elements.clone());
        return out;
    }
    for mask in 0u32..(1 << n) {
        if mask & (1 << id) == 0 {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let closed = members
            .iter()
            .all(|&i| members.iter().all(|&j| members.contains(&aut.table[i][j])));
        if closed {
            out.push(members.iter().map(|&i| aut.elements[i].clone()).collect());
        }
    }
    out
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
    out.sort_unstable();
    out
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
