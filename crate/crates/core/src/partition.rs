//! Partition of a planar, unidirectional tile circulation into d-subflows.
//!
//! The flow is decomposed into simple cycles, split by orientation, peeled
//! into level-set boundaries (outer boundaries and hole boundaries), arranged
//! in nesting forests and labelled by depth modulo 576d.

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::tiling::{FlowGraph, TileId, Tiling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Orientation {
    Clockwise,
    CounterClockwise,
}

impl Orientation {
    pub fn flip(self) -> Self {
        match self {
            Orientation::Clockwise => Orientation::CounterClockwise,
            Orientation::CounterClockwise => Orientation::Clockwise,
        }
    }
}

/// Closed walk through tiles `v0 -> v1 -> ... -> v0`, taken `count` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cycle {
    pub vertices: Vec<TileId>,
    pub count: u32,
}

impl Cycle {
    pub fn new(vertices: Vec<TileId>, count: u32) -> Self {
        Cycle { vertices, count }
    }

    pub fn edges(&self) -> impl Iterator<Item = (TileId, TileId)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn is_simple(&self) -> bool {
        let mut v = self.vertices.clone();
        v.sort_unstable();
        v.windows(2).all(|w| w[0] != w[1])
    }

    /// Twice the signed area over tile lattice coordinates.
    pub fn signed_area2(&self, tiling: &Tiling) -> i64 {
        let pts: Vec<(i64, i64)> = self
            .vertices
            .iter()
            .map(|&t| {
                let (i, j) = tiling.coords(t);
                (i as i64, j as i64)
            })
            .collect();
        let n = pts.len();
        (0..n)
            .map(|k| {
                let (a, b) = (pts[k], pts[(k + 1) % n]);
                a.0 * b.1 - b.0 * a.1
            })
            .sum()
    }

    pub fn orientation(&self, tiling: &Tiling) -> Orientation {
        if self.signed_area2(tiling) < 0 {
            Orientation::Clockwise
        } else {
            Orientation::CounterClockwise
        }
    }

    /// Rotation starting at the smallest vertex, for deduplication.
    fn canonical(&self) -> Vec<TileId> {
        let k = (0..self.vertices.len()).min_by_key(|&i| self.vertices[i]).unwrap_or(0);
        let mut v = self.vertices[k..].to_vec();
        v.extend_from_slice(&self.vertices[..k]);
        v
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("flow is not a circulation (stuck at tile {0})")]
    NotCirculation(TileId),
    #[error("peeling needs simple cycles")]
    NonSimpleInput,
    #[error("cycles in one peeled set neither nested nor edge-disjoint")]
    NestingViolated,
}

pub type Subflow = FlowGraph;

/// Greedy extraction of simple cycles with multiplicities.
pub fn decompose_cycles(flow: &FlowGraph) -> Result<Vec<Cycle>, PartitionError> {
    let mut rem = flow.edges.clone();
    let mut out = Vec::new();
    let out_edge = |rem: &BTreeMap<(TileId, TileId), u32>, v: TileId| {
        rem.range((v, 0)..=(v, TileId::MAX)).next().map(|(&(_, w), _)| w)
    };
    while let Some((&(v0, _), _)) = rem.iter().next() {
        let mut path = vec![v0];
        let mut at: HashMap<TileId, usize> = HashMap::from([(v0, 0)]);
        loop {
            let v = *path.last().unwrap();
            let w = out_edge(&rem, v).ok_or(PartitionError::NotCirculation(v))?;
            if let Some(&i) = at.get(&w) {
                let cyc = Cycle::new(path[i..].to_vec(), 0);
                let k = cyc.edges().map(|e| rem[&e]).min().unwrap();
                for e in cyc.edges() {
                    let x = rem.get_mut(&e).unwrap();
                    *x -= k;
                    if *x == 0 {
                        rem.remove(&e);
                    }
                }
                out.push(Cycle::new(cyc.vertices, k));
                break;
            }
            at.insert(w, path.len());
            path.push(w);
        }
    }
    Ok(out)
}

/// Splits a closed walk at repeated vertices into simple cycles.
pub fn split_self_intersections(c: &Cycle) -> Vec<Cycle> {
    let mut out = Vec::new();
    let mut stack: Vec<TileId> = Vec::new();
    let mut at: HashMap<TileId, usize> = HashMap::new();
    for &v in &c.vertices {
        if let Some(&i) = at.get(&v) {
            let loop_part: Vec<TileId> = stack.drain(i..).collect();
            for u in &loop_part {
                at.remove(u);
            }
            out.push(Cycle::new(loop_part, c.count));
        }
        at.insert(v, stack.len());
        stack.push(v);
    }
    if !stack.is_empty() {
        out.push(Cycle::new(stack, c.count));
    }
    out
}

/// Face sample points in lattice coordinates scaled by 6.
struct Faces {
    points: Vec<(i64, i64)>,
}

impl Faces {
    /// Squares of the tile lattice, split along any diagonal used by `flow`.
    fn new(tiling: &Tiling, flow: &FlowGraph) -> Self {
        let mut points = Vec::new();
        let (kx, ky) = (tiling.kx(), tiling.ky());
        for j in 0..ky.saturating_sub(1) {
            for i in 0..kx.saturating_sub(1) {
                let (a, b) = (tiling.id(i, j), tiling.id(i + 1, j + 1));
                let (c, d) = (tiling.id(i + 1, j), tiling.id(i, j + 1));
                let main = flow.weight(a, b) + flow.weight(b, a) > 0;
                let anti = flow.weight(c, d) + flow.weight(d, c) > 0;
                let (x, y) = (6 * i as i64, 6 * j as i64);
                if main {
                    points.push((x + 4, y + 2));
                    points.push((x + 2, y + 4));
                } else if anti {
                    points.push((x + 2, y + 2));
                    points.push((x + 4, y + 4));
                } else {
                    points.push((x + 3, y + 3));
                }
            }
        }
        Faces { points }
    }
}

fn scaled(tiling: &Tiling, t: TileId) -> (i64, i64) {
    let (i, j) = tiling.coords(t);
    (6 * i as i64, 6 * j as i64)
}

/// Even-odd test; points never lie on cycle edges by construction.
fn inside(poly: &[(i64, i64)], p: (i64, i64)) -> bool {
    let mut c = false;
    let n = poly.len();
    for k in 0..n {
        let (a, b) = (poly[k], poly[(k + 1) % n]);
        if (a.1 > p.1) != (b.1 > p.1) {
            // x-coordinate of the crossing compared with p.x, without division.
            let lhs = (p.0 - a.0) * (b.1 - a.1);
            let rhs = (b.0 - a.0) * (p.1 - a.1);
            let right_of = if b.1 > a.1 { lhs < rhs } else { lhs > rhs };
            if right_of {
                c = !c;
            }
        }
    }
    c
}

fn polygon(tiling: &Tiling, c: &Cycle) -> Vec<(i64, i64)> {
    c.vertices.iter().map(|&t| scaled(tiling, t)).collect()
}

/// Sample points just left and right of the directed edge (scaled by 6).
fn side_points(tiling: &Tiling, v: TileId, w: TileId) -> ((i64, i64), (i64, i64)) {
    let (a, b) = (scaled(tiling, v), scaled(tiling, w));
    let (mx, my) = ((a.0 + b.0) / 2, (a.1 + b.1) / 2);
    let (dx, dy) = ((b.0 - a.0).signum(), (b.1 - a.1).signum());
    // Left normal of (dx, dy) is (-dy, dx).
    ((mx - dy, my + dx), (mx + dy, my - dx))
}

/// Peels same-orientation simple cycles into level-set boundaries: set-1
/// holds outer boundaries (same orientation), set-2 hole boundaries
/// (opposite orientation). Level k of the winding number is one peel round.
pub fn peel(cycles: &[Cycle], orientation: Orientation, tiling: &Tiling) -> Result<(Vec<Cycle>, Vec<Cycle>), PartitionError> {
    if cycles.iter().any(|c| !c.is_simple() || c.vertices.len() < 3) {
        return Err(PartitionError::NonSimpleInput);
    }
    let polys: Vec<(Vec<(i64, i64)>, u32)> = cycles.iter().map(|c| (polygon(tiling, c), c.count)).collect();
    let winding = |p: (i64, i64)| -> u32 { polys.iter().filter(|(poly, _)| inside(poly, p)).map(|(_, k)| k).sum() };
    let mut edges: BTreeMap<(TileId, TileId), ()> = BTreeMap::new();
    for c in cycles {
        for e in c.edges() {
            edges.insert(e, ());
        }
    }
    // Boundary edges of each level set {W >= k}.
    let mut levels: BTreeMap<u32, BTreeMap<(TileId, TileId), u32>> = BTreeMap::new();
    for &(v, w) in edges.keys() {
        let (lp, rp) = side_points(tiling, v, w);
        let (wl, wr) = (winding(lp), winding(rp));
        let (lo, hi) = match orientation {
            Orientation::CounterClockwise => (wr, wl),
            Orientation::Clockwise => (wl, wr),
        };
        for k in lo + 1..=hi {
            levels.entry(k).or_default().insert((v, w), 1);
        }
    }
    let mut set1: Vec<Cycle> = Vec::new();
    let mut set2: Vec<Cycle> = Vec::new();
    for (_, bnd) in levels {
        let g = FlowGraph { edges: bnd };
        for c in decompose_cycles(&g)? {
            for s in split_self_intersections(&c) {
                if s.orientation(tiling) == orientation {
                    set1.push(s);
                } else {
                    set2.push(s);
                }
            }
        }
    }
    Ok((merge_duplicates(set1), merge_duplicates(set2)))
}

fn merge_duplicates(cs: Vec<Cycle>) -> Vec<Cycle> {
    let mut idx: HashMap<Vec<TileId>, usize> = HashMap::new();
    let mut out: Vec<Cycle> = Vec::new();
    for c in cs {
        let key = c.canonical();
        if let Some(&i) = idx.get(&key) {
            out[i].count += c.count;
        } else {
            idx.insert(key.clone(), out.len());
            out.push(Cycle::new(key, c.count));
        }
    }
    out
}

type Bits = Vec<u64>;

fn subset(a: &Bits, b: &Bits) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn fill(tiling: &Tiling, faces: &Faces, c: &Cycle) -> Bits {
    let poly = polygon(tiling, c);
    let mut bits = vec![0u64; faces.points.len().div_ceil(64).max(1)];
    for (k, &p) in faces.points.iter().enumerate() {
        if inside(&poly, p) {
            bits[k / 64] |= 1 << (k % 64);
        }
    }
    bits
}

/// Checks that any two cycles of a set are edge-disjoint or nested.
pub fn check_nesting(set: &[Cycle], tiling: &Tiling, flow: &FlowGraph) -> bool {
    let faces = Faces::new(tiling, flow);
    let fills: Vec<Bits> = set.iter().map(|c| fill(tiling, &faces, c)).collect();
    let edge_sets: Vec<std::collections::HashSet<(TileId, TileId)>> =
        set.iter().map(|c| c.edges().collect()).collect();
    for a in 0..set.len() {
        for b in a + 1..set.len() {
            let shared = edge_sets[a].iter().any(|e| edge_sets[b].contains(e));
            if shared && !subset(&fills[a], &fills[b]) && !subset(&fills[b], &fills[a]) {
                return false;
            }
        }
    }
    true
}

/// Depth of each cycle in the containment forest; a cycle with count m
/// occupies depths `depth .. depth + m`.
fn forest_depths(set: &[Cycle], tiling: &Tiling, faces: &Faces) -> Vec<u64> {
    let fills: Vec<Bits> = set.iter().map(|c| fill(tiling, faces, c)).collect();
    let size = |b: &Bits| b.iter().map(|x| x.count_ones()).sum::<u32>();
    let mut order: Vec<usize> = (0..set.len()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(size(&fills[i])));
    let mut depth = vec![0u64; set.len()];
    for (pos, &i) in order.iter().enumerate() {
        let parent = order[..pos]
            .iter()
            .copied()
            .filter(|&j| subset(&fills[i], &fills[j]))
            .min_by_key(|&j| size(&fills[j]));
        if let Some(p) = parent {
            depth[i] = depth[p] + set[p].count as u64;
        }
    }
    depth
}

/// Splits the flow into subflows labelled by nesting depth modulo 576d.
pub fn partition_subflows(flow: &FlowGraph, d: u32, tiling: &Tiling) -> Result<Vec<Subflow>, PartitionError> {
    let modulus = 576 * d as u64;
    let mut by_orient: BTreeMap<Orientation, Vec<Cycle>> = BTreeMap::new();
    for c in decompose_cycles(flow)? {
        for s in split_self_intersections(&c) {
            by_orient.entry(s.orientation(tiling)).or_default().push(s);
        }
    }
    let faces = Faces::new(tiling, flow);
    let mut sets = Vec::new();
    for (o, cs) in by_orient {
        let (s1, s2) = peel(&cs, o, tiling)?;
        sets.push(s1);
        sets.push(s2);
    }
    let mut out = Vec::new();
    for set in sets {
        if !check_nesting(&set, tiling, flow) {
            return Err(PartitionError::NestingViolated);
        }
        let depths = forest_depths(&set, tiling, &faces);
        let mut groups: BTreeMap<u64, FlowGraph> = BTreeMap::new();
        for (c, &dep) in set.iter().zip(&depths) {
            for k in 0..c.count as u64 {
                let g = groups.entry((dep + k) % modulus).or_default();
                for (v, w) in c.edges() {
                    g.add(v, w, 1);
                }
            }
        }
        out.extend(groups.into_values().filter(|g| !g.is_empty()));
    }
    Ok(out)
}

pub fn sum_flows(parts: &[Subflow]) -> FlowGraph {
    let mut f = FlowGraph::new();
    for p in parts {
        for (&(v, w), &k) in &p.edges {
            f.add(v, w, k);
        }
    }
    f
}
