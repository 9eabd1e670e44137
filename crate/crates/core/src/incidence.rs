//! The incidence graph `I(p)` of the conic slices.
//!
//! Vertices are the nonempty slices `C_j(ξ)` with `ξ != 0`, kept separately
//! for each axis. Two slices on different axes are joined with multiplicity
//! equal to the number of points they share; distinct slices on the same
//! axis are disjoint.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ff::{Fp, PrimeContext};
use crate::surface::{classify, intersection_count, Axis, ConicClass};

/// Which slices become vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VertexSet {
    /// Every nonempty slice with `ξ != 0`.
    Full,
    /// Additionally drop the parabolic values `ξ = ±2/3`.
    NonParabolic,
}

#[derive(Clone, Debug)]
pub struct IncidenceGraph {
    pub p: u64,
    pub vertices: Vec<(Axis, Fp)>,
    /// Multiplicity by value pair, shared by all pairs of distinct axes.
    values: Vec<Fp>,
    mult: Vec<u8>,
    adjacency: Vec<Vec<u32>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Diameter {
    Finite(u32),
    /// Two vertices with no path between them.
    Disconnected { from: (Axis, u64), to: (Axis, u64) },
}

impl IncidenceGraph {
    pub fn build(ctx: &PrimeContext, set: VertexSet) -> Self {
        let p = ctx.p();
        let values: Vec<Fp> = (1..p)
            .map(Fp)
            .filter(|&v| {
                let sec = classify(v, ctx);
                let nonempty = sec.expected_points(ctx) > 0;
                nonempty && !(set == VertexSet::NonParabolic && sec.class == ConicClass::Parabolic)
            })
            .collect();
        let n = values.len();
        let mut mult = vec![0u8; n * n];
        for i in 0..n {
            for j in i..n {
                let m = intersection_count(values[i], values[j], ctx);
                mult[i * n + j] = m;
                mult[j * n + i] = m;
            }
        }
        let vertices = Axis::ALL
            .iter()
            .flat_map(|&a| values.iter().map(move |&v| (a, v)))
            .collect();
        let mut g = Self { p, vertices, values, mult, adjacency: Vec::new() };
        g.adjacency = (0..g.n_vertices())
            .map(|u| {
                (0..g.n_vertices())
                    .filter(|&v| g.multiplicity(u, v) > 0)
                    .map(|v| v as u32)
                    .collect()
            })
            .collect();
        g
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    fn value_index(&self, v: usize) -> usize {
        v % self.values.len()
    }

    /// Edge multiplicity between vertex positions `u` and `v`.
    pub fn multiplicity(&self, u: usize, v: usize) -> u8 {
        let (au, av) = (self.vertices[u].0, self.vertices[v].0);
        if au == av {
            return 0;
        }
        let n = self.values.len();
        self.mult[self.value_index(u) * n + self.value_index(v)]
    }

    pub fn neighbours(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.adjacency[u].iter().map(|&v| v as usize)
    }

    /// For vertex `u` and another axis, the number of slices on that axis it
    /// meets.
    pub fn meeting_degree(&self, u: usize, axis: Axis) -> usize {
        let n = self.values.len();
        let base = axis.index() * n;
        (base..base + n).filter(|&v| self.multiplicity(u, v) > 0).count()
    }

    fn adjacency_bits(&self) -> Vec<Vec<u64>> {
        let n = self.n_vertices();
        (0..n)
            .map(|u| {
                let mut row = vec![0u64; n.div_ceil(64)];
                for v in self.neighbours(u) {
                    row[v / 64] |= 1 << (v % 64);
                }
                row
            })
            .collect()
    }

    /// Exact diameter by breadth-first search from every vertex.
    pub fn diameter(&self) -> Diameter {
        match bitset_diameter(&self.adjacency_bits()) {
            Ok(d) => Diameter::Finite(d),
            Err((s, t)) => {
                let (a, x) = self.vertices[s];
                let (b, y) = self.vertices[t];
                Diameter::Disconnected { from: (a, x.0), to: (b, y.0) }
            }
        }
    }

    /// Diameter after identifying the three copies of each value.
    pub fn merged_diameter(&self) -> Diameter {
        let n = self.values.len();
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                let mut row = vec![0u64; n.div_ceil(64)];
                for j in (0..n).filter(|&j| i != j && self.mult[i * n + j] > 0) {
                    row[j / 64] |= 1 << (j % 64);
                }
                row
            })
            .collect();
        match bitset_diameter(&rows) {
            Ok(d) => Diameter::Finite(d),
            Err((s, t)) => Diameter::Disconnected {
                from: (Axis::X1, self.values[s].0),
                to: (Axis::X1, self.values[t].0),
            },
        }
    }

    /// CSV rows `j,xi,k,eta,multiplicity` for every edge with `j < k`.
    pub fn write_edges<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "j,xi,k,eta,multiplicity")?;
        for u in 0..self.n_vertices() {
            for v in 0..self.n_vertices() {
                let (a, x) = self.vertices[u];
                let (b, y) = self.vertices[v];
                let m = self.multiplicity(u, v);
                if a < b && m > 0 {
                    writeln!(w, "{},{},{},{},{}", a.index() + 1, x, b.index() + 1, y, m)?;
                }
            }
        }
        Ok(())
    }
}

/// Largest eccentricity over all sources, expanding whole BFS layers as
/// bitsets. `Err((s, t))` names an unreachable pair.
fn bitset_diameter(rows: &[Vec<u64>]) -> std::result::Result<u32, (usize, usize)> {
    let n = rows.len();
    let words = n.div_ceil(64);
    let mut best = 0;
    for src in 0..n {
        let mut seen = vec![0u64; words];
        seen[src / 64] |= 1 << (src % 64);
        let mut frontier = vec![src];
        let mut depth = 0;
        let mut reached = 1;
        while !frontier.is_empty() {
            let mut next = vec![0u64; words];
            for &u in &frontier {
                for (w, r) in next.iter_mut().zip(&rows[u]) {
                    *w |= r;
                }
            }
            frontier.clear();
            for (i, (w, s)) in next.iter().zip(seen.iter_mut()).enumerate() {
                let mut fresh = w & !*s;
                *s |= fresh;
                while fresh != 0 {
                    frontier.push(i * 64 + fresh.trailing_zeros() as usize);
                    fresh &= fresh - 1;
                }
            }
            if !frontier.is_empty() {
                depth += 1;
                reached += frontier.len();
            }
        }
        if reached < n {
            let t = (0..n).find(|&t| seen[t / 64] >> (t % 64) & 1 == 0).expect("unreached vertex");
            return Err((src, t));
        }
        best = best.max(depth);
    }
    Ok(best)
}

/// `#{η != 0 : C_j(ξ) ∩ C_k(η) != ∅}` for `j != k`.
pub fn meeting_count(xi: Fp, ctx: &PrimeContext) -> u64 {
    (1..ctx.p())
        .filter(|&e| intersection_count(xi, Fp(e), ctx) > 0)
        .count() as u64
}

/// The value `meeting_count` takes for non-parabolic `ξ != 0`:
/// `(p - (-1/p)) / 2`.
pub fn expected_meeting_count(ctx: &PrimeContext) -> u64 {
    if ctx.p() % 4 == 1 {
        (ctx.p() - 1) / 2
    } else {
        ctx.p().div_ceil(2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceReport {
    pub p: u64,
    pub vertices: usize,
    pub diameter: Diameter,
    pub diameter_non_parabolic: Diameter,
    pub diameter_merged: Diameter,
    /// Non-parabolic vertices whose meeting count differs from
    /// `(p - (-1/p)) / 2`.
    pub meeting_violations: usize,
    /// Non-parabolic vertices whose meeting count differs from `(p - 1) / 2`.
    pub meeting_half_p_minus_one_violations: usize,
}

pub fn incidence_report(ctx: &PrimeContext) -> IncidenceReport {
    let full = IncidenceGraph::build(ctx, VertexSet::Full);
    let restricted = IncidenceGraph::build(ctx, VertexSet::NonParabolic);
    let expected = expected_meeting_count(ctx);
    let mut bad = 0;
    let mut bad_half = 0;
    for v in 1..ctx.p() {
        if classify(Fp(v), ctx).class == ConicClass::Parabolic {
            continue;
        }
        let m = meeting_count(Fp(v), ctx);
        bad += usize::from(m != expected);
        bad_half += usize::from(m != (ctx.p() - 1) / 2);
    }
    IncidenceReport {
        p: ctx.p(),
        vertices: full.n_vertices(),
        diameter: full.diameter(),
        diameter_non_parabolic: restricted.diameter(),
        diameter_merged: full.merged_diameter(),
        meeting_violations: bad,
        meeting_half_p_minus_one_violations: bad_half,
    }
}
