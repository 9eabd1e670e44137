//! Enumeration of `X*(p)` and its decomposition into `Γ`-orbits.
//!
//! Points are stored sorted by canonical index and packed into one `u64`
//! each. Since `(x1, x2)` fixes at most two values of `x3`, a table of row
//! offsets over `x1 p + x2` gives constant-time position lookup.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ff::{is_prime, Fp, PrimeContext};
use crate::surface::{MarkoffTriple, OrderTable, PERMUTATIONS};

/// Largest modulus [`SolutionSet::enumerate`] accepts (`p^2` row offsets must
/// fit in memory).
pub const MAX_ENUM_PRIME: u64 = 1 << 14;

#[derive(Clone, Debug)]
pub struct SolutionSet {
    p: u64,
    bits: u32,
    points: Vec<u64>,
    row_offsets: Vec<u32>,
}

impl SolutionSet {
    /// All nonzero solutions, found by solving the quadratic in `x3` for each
    /// `(x1, x2)`.
    pub fn enumerate(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p < 3 {
            return Err(Error::PrimeTooSmall(p));
        }
        if p > MAX_ENUM_PRIME {
            return Err(Error::PrimeTooLarge(p));
        }
        let mut root = vec![u64::MAX; p as usize];
        for v in 0..p {
            root[(v * v % p) as usize] = v;
        }
        let half = p.div_ceil(2);
        let bits = 64 - (p - 1).leading_zeros();
        let mut points = Vec::with_capacity((p * p + 3 * p) as usize);
        let mut row_offsets = Vec::with_capacity((p * p + 1) as usize);
        for x1 in 0..p {
            for x2 in 0..p {
                row_offsets.push(points.len() as u32);
                let s = 3 * x1 % p * x2 % p;
                let c = (x1 * x1 + x2 * x2) % p;
                let disc = (s * s + 4 * (p - c)) % p;
                let r = root[disc as usize];
                if r == u64::MAX {
                    continue;
                }
                let mut zs = [(s + r) % p * half % p, (s + p - r) % p * half % p];
                zs.sort_unstable();
                let n = if r == 0 { 1 } else { 2 };
                for &z in &zs[..n] {
                    if x1 == 0 && x2 == 0 && z == 0 {
                        continue;
                    }
                    points.push((x1 << (2 * bits)) | (x2 << bits) | z);
                }
            }
        }
        row_offsets.push(points.len() as u32);
        Ok(Self { p, bits, points, row_offsets })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    #[inline]
    pub fn raw(&self, i: usize) -> [u64; 3] {
        let w = self.points[i];
        let mask = (1u64 << self.bits) - 1;
        [w >> (2 * self.bits), (w >> self.bits) & mask, w & mask]
    }

    pub fn point(&self, i: usize) -> MarkoffTriple {
        let [a, b, c] = self.raw(i);
        MarkoffTriple([Fp(a), Fp(b), Fp(c)])
    }

    pub fn iter(&self) -> impl Iterator<Item = MarkoffTriple> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Position of a triple, or `None` if it is not in the set.
    #[inline]
    pub fn position(&self, x: [u64; 3]) -> Option<usize> {
        let row = (x[0] * self.p + x[1]) as usize;
        let (lo, hi) = (self.row_offsets[row] as usize, self.row_offsets[row + 1] as usize);
        (lo..hi).find(|&i| self.points[i] & ((1u64 << self.bits) - 1) == x[2])
    }

    pub fn index_of(&self, t: &MarkoffTriple) -> Option<usize> {
        self.position([t.0[0].0, t.0[1].0, t.0[2].0])
    }
}

#[inline]
fn vieta_raw(j: usize, x: [u64; 3], p: u64) -> [u64; 3] {
    let (k, l) = ((j + 1) % 3, (j + 2) % 3);
    let mut y = x;
    y[j] = (3 * x[k] % p * x[l] % p + p - x[j]) % p;
    y
}

/// The generators used for connectivity: `R_1, R_2, R_3` and the five
/// non-identity permutations.
#[inline]
fn neighbours(x: [u64; 3], p: u64) -> impl Iterator<Item = [u64; 3]> {
    (0..3)
        .map(move |j| vieta_raw(j, x, p))
        .chain(PERMUTATIONS[1..].iter().map(move |s| [x[s[0]], x[s[1]], x[s[2]]]))
}

struct UnionFind {
    parent: Vec<u32>,
    size: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self { parent: (0..n as u32).collect(), size: vec![1; n] }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra as usize] < self.size[rb as usize] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb as usize] = ra;
        self.size[ra as usize] += self.size[rb as usize];
    }
}

/// Component labels of a [`SolutionSet`], numbered `0..n` by first occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitPartition {
    pub labels: Vec<u32>,
    /// Size of each component, indexed by label.
    pub sizes: Vec<usize>,
}

impl OrbitPartition {
    fn from_roots(roots: impl Iterator<Item = u32>, n: usize) -> Self {
        let mut relabel: HashMap<u32, u32> = HashMap::new();
        let mut labels = Vec::with_capacity(n);
        let mut sizes = Vec::new();
        for r in roots {
            let next = relabel.len() as u32;
            let l = *relabel.entry(r).or_insert(next);
            if l as usize == sizes.len() {
                sizes.push(0);
            }
            sizes[l as usize] += 1;
            labels.push(l);
        }
        Self { labels, sizes }
    }

    pub fn n_components(&self) -> usize {
        self.sizes.len()
    }

    /// Component sizes in decreasing order.
    pub fn sorted_sizes(&self) -> Vec<usize> {
        let mut s = self.sizes.clone();
        s.sort_unstable_by(|a, b| b.cmp(a));
        s
    }

    pub fn min_size(&self) -> Option<usize> {
        self.sizes.iter().copied().min()
    }

    pub fn same_component(&self, i: usize, j: usize) -> bool {
        self.labels[i] == self.labels[j]
    }
}

/// Components under `Γ` by union-find over all generator edges.
pub fn components(s: &SolutionSet) -> OrbitPartition {
    let mut uf = UnionFind::new(s.len());
    for i in 0..s.len() {
        let x = s.raw(i);
        for y in neighbours(x, s.p) {
            let j = s.position(y).expect("generators preserve X*(p)");
            uf.union(i as u32, j as u32);
        }
    }
    let roots: Vec<u32> = (0..s.len() as u32).map(|i| uf.find(i)).collect();
    OrbitPartition::from_roots(roots.into_iter(), s.len())
}

/// Components by breadth-first search over triples, using a hash map rather
/// than the packed positions of the solution set.
pub fn components_bfs(s: &SolutionSet) -> OrbitPartition {
    let p = s.p;
    let mut label: HashMap<[u64; 3], u32> = HashMap::with_capacity(s.len());
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for i in 0..s.len() {
        let start = s.raw(i);
        if label.contains_key(&start) {
            continue;
        }
        label.insert(start, next);
        queue.push_back(start);
        while let Some(x) = queue.pop_front() {
            for y in neighbours(x, p) {
                if let std::collections::hash_map::Entry::Vacant(e) = label.entry(y) {
                    e.insert(next);
                    queue.push_back(y);
                }
            }
        }
        next += 1;
    }
    let roots: Vec<u32> = (0..s.len()).map(|i| label[&s.raw(i)]).collect();
    OrbitPartition::from_roots(roots.into_iter(), s.len())
}

/// Size of the component of `(1, 1, 1)` found by BFS from that point alone.
pub fn reachable_from_one(p: u64) -> usize {
    let start = [1u64, 1, 1];
    let mut seen = std::collections::HashSet::new();
    seen.insert(start);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for y in neighbours(x, p) {
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len()
}

/// `max_j rot_order(x_j)`.
pub fn max_order(t: &MarkoffTriple, ctx: &PrimeContext) -> Result<u64> {
    if t.is_origin() {
        return Err(Error::InvalidParams("max_order of (0,0,0)".into()));
    }
    Ok(t.0
        .iter()
        .map(|&x| crate::surface::classify(x, ctx).rot_order)
        .max()
        .expect("three coordinates"))
}

/// Smallest `max_order` over the whole solution set.
pub fn min_max_order(s: &SolutionSet, table: &OrderTable) -> u64 {
    s.iter().map(|t| table.max_order(&t)).min().unwrap_or(0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CageReport {
    pub cage_size: usize,
    /// Number of distinct components meeting the cage.
    pub cage_components: usize,
    /// Size of the component containing the cage, when the cage is connected.
    pub component_size: Option<usize>,
    /// `|X*(p) \ C(p)|`.
    pub residual: Option<usize>,
    pub hyperbolic_cage_size: usize,
    pub hyperbolic_cage_components: usize,
}

impl CageReport {
    pub fn connected(&self) -> bool {
        self.cage_size > 0 && self.cage_components == 1
    }
}

/// The cage: points with a coordinate whose rotation order is `p - 1` or
/// `p + 1`.
pub fn cage(s: &SolutionSet, part: &OrbitPartition, table: &OrderTable) -> CageReport {
    let mut labels = Vec::new();
    let mut hyp_labels = Vec::new();
    for (i, t) in s.iter().enumerate() {
        if t.0.iter().any(|&x| table.is_maximal(x)) {
            labels.push(part.labels[i]);
        }
        if t.0.iter().any(|&x| table.is_hyperbolic_maximal(x)) {
            hyp_labels.push(part.labels[i]);
        }
    }
    let cage_size = labels.len();
    let hyperbolic_cage_size = hyp_labels.len();
    let distinct = |mut v: Vec<u32>| {
        v.sort_unstable();
        v.dedup();
        v
    };
    let ls = distinct(labels);
    let hs = distinct(hyp_labels);
    let (component_size, residual) = if ls.len() == 1 {
        let size = part.sizes[ls[0] as usize];
        (Some(size), Some(s.len() - size))
    } else {
        (None, None)
    };
    CageReport {
        cage_size,
        cage_components: ls.len(),
        component_size,
        residual,
        hyperbolic_cage_size,
        hyperbolic_cage_components: hs.len(),
    }
}

/// Per-prime orbit summary.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitReport {
    pub p: u64,
    pub count: usize,
    pub n_components: usize,
    pub component_sizes: Vec<usize>,
    pub cage_size: usize,
    pub residual: Option<usize>,
    pub min_max_order: u64,
}

pub fn orbit_report(ctx: &PrimeContext) -> Result<(OrbitReport, CageReport)> {
    let s = SolutionSet::enumerate(ctx.p())?;
    let part = components(&s);
    let table = OrderTable::new(ctx);
    let cr = cage(&s, &part, &table);
    let report = OrbitReport {
        p: ctx.p(),
        count: s.len(),
        n_components: part.n_components(),
        component_sizes: part.sorted_sizes(),
        cage_size: cr.cage_size,
        residual: cr.residual,
        min_max_order: min_max_order(&s, &table),
    };
    Ok((report, cr))
}

/// `|X*(p)|` by the closed form `p^2 + 3 (-1/p) p`.
pub fn expected_count(p: u64) -> u64 {
    if p == 3 {
        return 8;
    }
    let chi = if p % 4 == 1 { 1i64 } else { -1 };
    (p as i64 * p as i64 + 3 * chi * p as i64) as u64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::{is_on_surface, permute, vieta, Axis};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn oracle(p: u64) -> Vec<[u64; 3]> {
        let mut out = Vec::new();
        for a in 0..p {
            for b in 0..p {
                for c in 0..p {
                    let lhs = (a * a + b * b + c * c) % p;
                    let rhs = 3 * a * b % p * c % p;
                    if lhs == rhs && (a, b, c) != (0, 0, 0) {
                        out.push([a, b, c]);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn enumerate_matches_scan() {
        for p in [3u64, 5, 7, 11, 13, 31] {
            let s = SolutionSet::enumerate(p).unwrap();
            let got: Vec<[u64; 3]> = (0..s.len()).map(|i| s.raw(i)).collect();
            assert_eq!(got, oracle(p), "p={p}");
        }
    }

    #[test]
    fn enumerate_p3_has_eight_points() {
        assert_eq!(SolutionSet::enumerate(3).unwrap().len(), 8);
    }

    #[test]
    fn origin_excluded() {
        let s = SolutionSet::enumerate(5).unwrap();
        assert_eq!(s.position([0, 0, 0]), None);
    }

    #[test]
    fn enumerate_rejects_bad_input() {
        assert_eq!(SolutionSet::enumerate(9).unwrap_err(), Error::NotPrime(9));
        assert_eq!(SolutionSet::enumerate(2).unwrap_err(), Error::PrimeTooSmall(2));
    }

    #[test]
    fn counts_match_closed_form() {
        for p in [5u64, 7, 11, 13, 17, 101, 103] {
            assert_eq!(SolutionSet::enumerate(p).unwrap().len() as u64, expected_count(p));
        }
    }

    #[test]
    fn positions_round_trip() {
        let s = SolutionSet::enumerate(29).unwrap();
        for i in 0..s.len() {
            assert_eq!(s.position(s.raw(i)), Some(i));
            assert_eq!(s.index_of(&s.point(i)), Some(i));
        }
    }

    #[test]
    fn single_component_small_primes() {
        for p in [3u64, 5, 7, 11, 13, 17, 19, 23, 101] {
            let s = SolutionSet::enumerate(p).unwrap();
            let uf = components(&s);
            let bfs = components_bfs(&s);
            assert_eq!(uf.n_components(), 1, "p={p}");
            assert_eq!(uf, bfs);
            assert_eq!(reachable_from_one(p), s.len());
        }
    }

    #[test]
    fn partition_is_closed_under_generators() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = 43;
        let c = PrimeContext::new(p).unwrap();
        let s = SolutionSet::enumerate(p).unwrap();
        let part = components(&s);
        for _ in 0..2000 {
            let i = rng.gen_range(0..s.len());
            let mut t = s.point(i);
            for _ in 0..10 {
                t = if rng.gen_bool(0.5) {
                    vieta(Axis::from_index(rng.gen_range(0..3)), &t, &c)
                } else {
                    permute(PERMUTATIONS[rng.gen_range(0..6)], &t)
                };
            }
            assert!(is_on_surface(&t.0, &c));
            assert!(part.same_component(i, s.index_of(&t).unwrap()));
        }
    }

    #[test]
    fn cage_is_connected_and_covers() {
        for p in [5u64, 7, 13, 37, 97] {
            let c = PrimeContext::new(p).unwrap();
            let (rep, cr) = orbit_report(&c).unwrap();
            assert!(cr.connected(), "p={p}");
            assert!(cr.cage_size > 0);
            assert_eq!(cr.residual, Some(0));
            assert_eq!(rep.n_components, 1);
            assert!(cr.hyperbolic_cage_size <= cr.cage_size);
        }
    }

    #[test]
    fn max_order_examples() {
        let c = PrimeContext::new(5).unwrap();
        let t = MarkoffTriple::from_u64(5, [1, 1, 1]);
        assert_eq!(max_order(&t, &c).unwrap(), 10);
        assert!(max_order(&MarkoffTriple::from_u64(5, [0, 0, 0]), &c).is_err());
        let c = PrimeContext::new(13).unwrap();
        let g = c.primitive_root();
        let x = c.div(c.add(g, c.inv(g).unwrap()), c.elem(3)).unwrap();
        let s = SolutionSet::enumerate(13).unwrap();
        assert_eq!(crate::surface::classify(x, &c).rot_order, 12);
        for t in s.iter().filter(|t| t.0[0] == x) {
            let m = max_order(&t, &c).unwrap();
            assert!(m >= 12, "max over coordinates, got {m}");
        }
    }

    #[test]
    fn maximality_depends_only_on_value() {
        let c = PrimeContext::new(31).unwrap();
        let table = OrderTable::new(&c);
        let s = SolutionSet::enumerate(31).unwrap();
        for t in s.iter() {
            for perm in PERMUTATIONS {
                let u = permute(perm, &t);
                assert_eq!(table.max_order(&t), table.max_order(&u));
            }
        }
    }
}
