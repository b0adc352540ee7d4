//! Finite posets as T_0 topological spaces.
//!
//! Convention: opens are up-closed sets; the minimal open U_x is the set of
//! points >= x. (The literature is split on this; everything downstream
//! assumes this choice.)

use crate::{Error, Result};
use std::collections::BTreeSet;

/// A finite poset given by named elements and Hasse covering pairs
/// (lo, hi) meaning lo < hi with nothing in between.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Poset {
    names: Vec<String>,
    hasse: Vec<(usize, usize)>,
    leq: Vec<bool>, // leq[i*n+j] <=> i <= j
}

impl Poset {
    pub fn new(names: Vec<String>, hasse: Vec<(usize, usize)>) -> Result<Self> {
        let n = names.len();
        {
            let mut seen = BTreeSet::new();
            for name in &names {
                if !seen.insert(name) {
                    return Err(Error::InvalidInput(format!("duplicate point id {name}")));
                }
            }
        }
        for &(a, b) in &hasse {
            if a >= n || b >= n {
                return Err(Error::InvalidInput("hasse pair out of range".into()));
            }
            if a == b {
                return Err(Error::InvalidInput("reflexive hasse pair".into()));
            }
        }
        // transitive closure of the covering relation
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(a, b) in &hasse {
            leq[a * n + b] = true;
        }
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if !leq[i * n + j] {
                        continue;
                    }
                    for k in 0..n {
                        if leq[j * n + k] && !leq[i * n + k] {
                            leq[i * n + k] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        for &(a, b) in &hasse {
            if leq[b * n + a] {
                return Err(Error::InvalidInput(format!(
                    "cycle through {} and {}",
                    names[a], names[b]
                )));
            }
        }
        Ok(Poset { names, hasse, leq })
    }

    /// Poset from the full order relation; Hasse edges are recovered.
    pub fn from_relation(names: Vec<String>, leq_pairs: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut rel = vec![false; n * n];
        for i in 0..n {
            rel[i * n + i] = true;
        }
        for &(a, b) in leq_pairs {
            rel[a * n + b] = true;
        }
        // close transitively
        loop {
            let mut changed = false;
            for i in 0..n {
                for j in 0..n {
                    if rel[i * n + j] {
                        for k in 0..n {
                            if rel[j * n + k] && !rel[i * n + k] {
                                rel[i * n + k] = true;
                                changed = true;
                            }
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        let mut hasse = Vec::new();
        for a in 0..n {
            for b in 0..n {
                if a == b || !rel[a * n + b] {
                    continue;
                }
                if rel[b * n + a] {
                    return Err(Error::InvalidInput("relation is not antisymmetric".into()));
                }
                let covering = (0..n)
                    .all(|m| m == a || m == b || !(rel[a * n + m] && rel[m * n + b]));
                if covering {
                    hasse.push((a, b));
                }
            }
        }
        Poset::new(names, hasse)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
    pub fn names(&self) -> &[String] {
        &self.names
    }
    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn index_of_checked(&self, name: &str) -> Result<usize> {
        self.index_of(name).ok_or_else(|| Error::UnknownPoint(name.to_string()))
    }
    pub fn hasse(&self) -> &[(usize, usize)] {
        &self.hasse
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.leq[a * self.len() + b]
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    /// All comparable pairs (a, b) with a <= b, in index order.
    pub fn comparable_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in 0..self.len() {
            for b in 0..self.len() {
                if self.leq(a, b) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Minimal open set U_x = { y : y >= x }.
    pub fn min_open(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(x, y)).collect()
    }

    /// Closure C_x = { y : y <= x }.
    pub fn closure(&self, x: usize) -> Vec<usize> {
        (0..self.len()).filter(|&y| self.leq(y, x)).collect()
    }

    pub fn minimal_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| (0..self.len()).all(|y| y == x || !self.leq(y, x)))
            .collect()
    }

    pub fn maximal_points(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&x| (0..self.len()).all(|y| y == x || !self.leq(x, y)))
            .collect()
    }

    /// Is the set of points up-closed (an open subset)?
    pub fn is_open(&self, subset: &[usize]) -> bool {
        let inset: Vec<bool> = {
            let mut v = vec![false; self.len()];
            for &x in subset {
                v[x] = true;
            }
            v
        };
        subset.iter().all(|&x| (0..self.len()).all(|y| !self.lt(x, y) || inset[y]))
    }

    /// Connectivity of the comparability graph; the empty poset is not
    /// connected.
    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let mut seen = vec![false; self.len()];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(x) = stack.pop() {
            for y in 0..self.len() {
                if !seen[y] && (self.leq(x, y) || self.leq(y, x)) {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// Connected components (point index sets, each sorted; components sorted
    /// by smallest member).
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.len()];
        let mut count = 0;
        for start in 0..self.len() {
            if comp[start] != usize::MAX {
                continue;
            }
            let mut stack = vec![start];
            comp[start] = count;
            while let Some(x) = stack.pop() {
                for y in 0..self.len() {
                    if comp[y] == usize::MAX && (self.leq(x, y) || self.leq(y, x)) {
                        comp[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        let mut out = vec![Vec::new(); count];
        for (x, &c) in comp.iter().enumerate() {
            out[c].push(x);
        }
        out
    }

    /// Strictly decreasing chains t_i > ... > t_0 inside an open subset,
    /// in lexicographic order of their index tuples (written top first).
    /// Returns an error if U is not up-closed.
    pub fn chains(&self, u: &[usize], i: usize) -> Result<Vec<Vec<usize>>> {
        if !self.is_open(u) {
            let witness = u
                .iter()
                .flat_map(|&x| (0..self.len()).filter(move |&y| self.lt(x, y)))
                .find(|y| !u.contains(y));
            return Err(Error::NotOpen(
                witness.map_or("<unknown>".into(), |y| self.names[y].clone()),
            ));
        }
        let mut sorted_u = u.to_vec();
        sorted_u.sort_unstable();
        sorted_u.dedup();
        let mut out = Vec::new();
        let mut chain = Vec::with_capacity(i + 1);
        self.extend_chains(&sorted_u, i + 1, &mut chain, &mut out);
        Ok(out)
    }

    fn extend_chains(
        &self,
        u: &[usize],
        remaining: usize,
        chain: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if remaining == 0 {
            out.push(chain.clone());
            return;
        }
        for &cand in u {
            if chain.last().map_or(true, |&prev| self.lt(cand, prev)) {
                chain.push(cand);
                self.extend_chains(u, remaining - 1, chain, out);
                chain.pop();
            }
        }
    }

    /// Length (number of strict steps) of the longest chain inside U.
    pub fn longest_chain_in(&self, u: &[usize]) -> usize {
        let mut best = 0usize;
        for len in 1..=u.len() {
            match self.chains(u, len) {
                Ok(cs) if !cs.is_empty() => best = len,
                _ => break,
            }
        }
        best
    }
}

/// An order-preserving map between posets.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MonotoneMap {
    pub src: Poset,
    pub dst: Poset,
    pub map: Vec<usize>,
}

impl MonotoneMap {
    pub fn new(src: Poset, dst: Poset, map: Vec<usize>) -> Result<Self> {
        if map.len() != src.len() {
            return Err(Error::BadShape("assignment length mismatch".into()));
        }
        if map.iter().any(|&y| y >= dst.len()) {
            return Err(Error::InvalidInput("assignment out of range".into()));
        }
        for &(a, b) in src.hasse() {
            if !dst.leq(map[a], map[b]) {
                return Err(Error::InvalidInput(format!(
                    "not order-preserving on {} < {}",
                    src.name(a),
                    src.name(b)
                )));
            }
        }
        Ok(MonotoneMap { src, dst, map })
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    /// Preimage of the minimal open of y.
    pub fn preimage_min_open(&self, y: usize) -> Vec<usize> {
        (0..self.src.len()).filter(|&x| self.dst.leq(y, self.map[x])).collect()
    }
}

/// Topological fiber product {(x, y) : f(x) = g(y)} with the product order.
/// Points are named "(x,y)"; returns the poset and the two projections.
pub fn poset_fiber_product(
    f: &MonotoneMap,
    g: &MonotoneMap,
) -> Result<(Poset, Vec<(usize, usize)>)> {
    if f.dst != g.dst {
        return Err(Error::BadShape("fiber product needs a common codomain".into()));
    }
    let mut pairs = Vec::new();
    for x in 0..f.src.len() {
        for y in 0..g.src.len() {
            if f.map[x] == g.map[y] {
                pairs.push((x, y));
            }
        }
    }
    let names = pairs
        .iter()
        .map(|&(x, y)| format!("({},{})", f.src.name(x), g.src.name(y)))
        .collect();
    let mut rel = Vec::new();
    for (i, &(x1, y1)) in pairs.iter().enumerate() {
        for (j, &(x2, y2)) in pairs.iter().enumerate() {
            if i != j && f.src.leq(x1, x2) && g.src.leq(y1, y2) {
                rel.push((i, j));
            }
        }
    }
    let poset = Poset::from_relation(names, &rel)?;
    Ok((poset, pairs))
}

/// Cylinder of a monotone map: the disjoint union X and Y with y <= x
/// whenever y <= f(x). X-points keep their names suffixed "@X", Y-points
/// "@Y"; X occupies indices 0..|X|.
pub fn cylinder_poset(f: &MonotoneMap) -> Poset {
    let nx = f.src.len();
    let ny = f.dst.len();
    let mut names: Vec<String> =
        f.src.names().iter().map(|n| format!("{n}@X")).collect();
    names.extend(f.dst.names().iter().map(|n| format!("{n}@Y")));
    let mut rel = Vec::new();
    for a in 0..nx {
        for b in 0..nx {
            if a != b && f.src.leq(a, b) {
                rel.push((a, b));
            }
        }
    }
    for a in 0..ny {
        for b in 0..ny {
            if a != b && f.dst.leq(a, b) {
                rel.push((nx + a, nx + b));
            }
        }
    }
    for x in 0..nx {
        for y in 0..ny {
            if f.dst.leq(y, f.map[x]) {
                rel.push((nx + y, x));
            }
        }
    }
    Poset::from_relation(names, &rel).expect("cylinder order is a partial order")
}
