//! Tiling of the grid into tiles of side 12d..24d-1, the tile flow, and the
//! preprocessing that removes crossing diagonals and antiparallel edges.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;

use thiserror::Error;

use crate::grid::{Configuration, GridDims, Pos, RobotId, Schedule};
use crate::rotatesort::RouteError;
use crate::world::World;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x0: i32,
    pub y0: i32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub fn new(x0: i32, y0: i32, w: u32, h: u32) -> Self {
        Rect { x0, y0, w, h }
    }

    pub fn x1(&self) -> i32 {
        self.x0 + self.w as i32
    }

    pub fn y1(&self) -> i32 {
        self.y0 + self.h as i32
    }

    pub fn contains(&self, p: Pos) -> bool {
        p.x >= self.x0 && p.x < self.x1() && p.y >= self.y0 && p.y < self.y1()
    }

    pub fn union(&self, o: &Rect) -> Rect {
        let x0 = self.x0.min(o.x0);
        let y0 = self.y0.min(o.y0);
        let x1 = self.x1().max(o.x1());
        let y1 = self.y1().max(o.y1());
        Rect::new(x0, y0, (x1 - x0) as u32, (y1 - y0) as u32)
    }

    pub fn intersects(&self, o: &Rect) -> bool {
        self.x0 < o.x1() && o.x0 < self.x1() && self.y0 < o.y1() && o.y0 < self.y1()
    }

    /// Manhattan distance from a cell to the nearest cell of the rectangle.
    pub fn distance(&self, p: Pos) -> u32 {
        let dx = (self.x0 - p.x).max(p.x - (self.x1() - 1)).max(0);
        let dy = (self.y0 - p.y).max(p.y - (self.y1() - 1)).max(0);
        (dx + dy) as u32
    }

    pub fn cells(&self) -> impl Iterator<Item = Pos> + '_ {
        (self.y0..self.y1()).flat_map(move |y| (self.x0..self.x1()).map(move |x| Pos::new(x, y)))
    }
}

pub type TileId = u32;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tiling {
    pub dims: GridDims,
    pub d: u32,
    /// Strip boundaries including 0 and n1.
    pub xs: Vec<i32>,
    /// Strip boundaries including 0 and n2.
    pub ys: Vec<i32>,
    col_of: Vec<u32>,
    row_of: Vec<u32>,
}

fn strips(n: u32, d: u32) -> Vec<i32> {
    let unit = 12 * d;
    let k = n / unit;
    let mut b = vec![0];
    if n >= 2 * unit {
        for i in 1..k {
            b.push((unit * i) as i32);
        }
    }
    b.push(n as i32);
    b
}

/// Cut lines at multiples of 12d; the last strip absorbs the remainder.
pub fn build_tiling(dims: GridDims, d: u32) -> Tiling {
    assert!(d >= 1);
    let xs = strips(dims.n1, d);
    let ys = strips(dims.n2, d);
    let lookup = |b: &[i32], n: u32| {
        let mut v = vec![0u32; n as usize];
        for s in 0..b.len() - 1 {
            for c in b[s]..b[s + 1] {
                v[c as usize] = s as u32;
            }
        }
        v
    };
    Tiling {
        dims,
        d,
        col_of: lookup(&xs, dims.n1),
        row_of: lookup(&ys, dims.n2),
        xs,
        ys,
    }
}

impl Tiling {
    pub fn kx(&self) -> u32 {
        (self.xs.len() - 1) as u32
    }

    pub fn ky(&self) -> u32 {
        (self.ys.len() - 1) as u32
    }

    pub fn len(&self) -> usize {
        (self.kx() * self.ky()) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn id(&self, i: u32, j: u32) -> TileId {
        j * self.kx() + i
    }

    pub fn coords(&self, t: TileId) -> (u32, u32) {
        (t % self.kx(), t / self.kx())
    }

    pub fn tile_of(&self, p: Pos) -> TileId {
        self.id(self.col_of[p.x as usize], self.row_of[p.y as usize])
    }

    pub fn rect(&self, t: TileId) -> Rect {
        let (i, j) = self.coords(t);
        let (i, j) = (i as usize, j as usize);
        Rect::new(
            self.xs[i],
            self.ys[j],
            (self.xs[i + 1] - self.xs[i]) as u32,
            (self.ys[j + 1] - self.ys[j]) as u32,
        )
    }

    pub fn rects(&self) -> Vec<Rect> {
        (0..self.len() as TileId).map(|t| self.rect(t)).collect()
    }

    /// Offset `(di, dj)` from `a` to `b` if they are equal or adjacent (incl. diagonally).
    pub fn offset(&self, a: TileId, b: TileId) -> Option<(i32, i32)> {
        let (ai, aj) = self.coords(a);
        let (bi, bj) = self.coords(b);
        let (di, dj) = (bi as i32 - ai as i32, bj as i32 - aj as i32);
        (di.abs() <= 1 && dj.abs() <= 1).then_some((di, dj))
    }

    pub fn neighbor(&self, t: TileId, di: i32, dj: i32) -> Option<TileId> {
        let (i, j) = self.coords(t);
        let (ni, nj) = (i as i32 + di, j as i32 + dj);
        (ni >= 0 && nj >= 0 && (ni as u32) < self.kx() && (nj as u32) < self.ky())
            .then(|| self.id(ni as u32, nj as u32))
    }

    /// Origins of 2x2 tile blocks (clamped for single-row or single-column tilings).
    pub(crate) fn block_origin(&self, a: TileId, b: TileId) -> (u32, u32) {
        let (ai, aj) = self.coords(a);
        let (bi, bj) = self.coords(b);
        let i = ai.min(bi).min(self.kx().saturating_sub(2));
        let j = aj.min(bj).min(self.ky().saturating_sub(2));
        (i, j)
    }

    pub(crate) fn block_rect(&self, (i, j): (u32, u32)) -> Rect {
        let i1 = (i + 1).min(self.kx() - 1);
        let j1 = (j + 1).min(self.ky() - 1);
        self.rect(self.id(i, j)).union(&self.rect(self.id(i1, j1)))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FlowError {
    #[error("robot {} moves between non-adjacent tiles", .0 + 1)]
    NonAdjacentTiles(RobotId),
    #[error("crossing diagonals with non-adjacent sources around block ({0},{1})")]
    UnexpectedCrossing(u32, u32),
    #[error(transparent)]
    Route(#[from] RouteError),
}

/// Circulation on the tile graph: edge (v, w) counts robots going from tile v to tile w.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FlowGraph {
    pub edges: BTreeMap<(TileId, TileId), u32>,
}

impl FlowGraph {
    pub fn new() -> Self {
        FlowGraph::default()
    }

    pub fn weight(&self, v: TileId, w: TileId) -> u32 {
        self.edges.get(&(v, w)).copied().unwrap_or(0)
    }

    pub fn add(&mut self, v: TileId, w: TileId, k: u32) {
        if k > 0 {
            *self.edges.entry((v, w)).or_insert(0) += k;
        }
    }

    pub fn sub(&mut self, v: TileId, w: TileId, k: u32) {
        let e = self.edges.get_mut(&(v, w)).expect("edge present");
        *e -= k;
        if *e == 0 {
            self.edges.remove(&(v, w));
        }
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn max_weight(&self) -> u32 {
        self.edges.values().copied().max().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.edges.values().map(|&w| w as u64).sum()
    }

    pub fn is_circulation(&self) -> bool {
        let mut bal: BTreeMap<TileId, i64> = BTreeMap::new();
        for (&(v, w), &k) in &self.edges {
            *bal.entry(v).or_default() -= k as i64;
            *bal.entry(w).or_default() += k as i64;
        }
        bal.values().all(|&b| b == 0)
    }

    pub fn is_unidirectional(&self) -> bool {
        self.edges.keys().all(|&(v, w)| !self.edges.contains_key(&(w, v)))
    }

    /// Pairs of edges whose straight segments between tile centers cross.
    pub fn crossings(&self, tiling: &Tiling) -> Vec<((TileId, TileId), (TileId, TileId))> {
        let mut seen = HashSet::new();
        let mut all = Vec::new();
        for &(v, w) in self.edges.keys() {
            let Some((di, dj)) = tiling.offset(v, w) else { continue };
            if di == 0 || dj == 0 {
                continue;
            }
            let a = tiling.neighbor(v, di, 0).unwrap();
            let b = tiling.neighbor(v, 0, dj).unwrap();
            for (x, y) in [(a, b), (b, a)] {
                if self.edges.contains_key(&(x, y)) {
                    let key = if (v, w) < (x, y) { ((v, w), (x, y)) } else { ((x, y), (v, w)) };
                    if seen.insert(key) {
                        all.push(key);
                    }
                }
            }
        }
        all
    }

    /// Graphviz dump; nodes are tile indices, edges carry the weight.
    pub fn to_dot(&self) -> String {
        let mut s = String::from("digraph flow {\n");
        for (&(v, w), &k) in &self.edges {
            let _ = writeln!(s, "  {v} -> {w} [weight={k}, label=\"{k}\"];");
        }
        s.push_str("}\n");
        s
    }
}

/// Counts robots per (start tile, target tile) pair.
pub fn build_flow(config: &Configuration, target: &Configuration, tiling: &Tiling) -> Result<FlowGraph, FlowError> {
    flow_of(&config.positions, &target.positions, tiling)
}

pub(crate) fn flow_of(pos: &[Pos], target: &[Pos], tiling: &Tiling) -> Result<FlowGraph, FlowError> {
    let mut f = FlowGraph::new();
    for (r, (&p, &t)) in pos.iter().zip(target).enumerate() {
        let (v, w) = (tiling.tile_of(p), tiling.tile_of(t));
        if v != w {
            if tiling.offset(v, w).is_none() {
                return Err(FlowError::NonAdjacentTiles(r as RobotId));
            }
            f.add(v, w, 1);
        }
    }
    Ok(f)
}

/// Robots in tile `v` bound for tile `w`, nearest to `toward` first.
fn candidates(world: &World, tiling: &Tiling, v: TileId, w: TileId, toward: &Rect, skip: &HashSet<RobotId>) -> Vec<RobotId> {
    let rect = tiling.rect(v);
    let mut rs: Vec<RobotId> = rect
        .cells()
        .map(|p| world.at(p))
        .filter(|r| !skip.contains(r) && tiling.tile_of(world.target[*r as usize]) == w)
        .collect();
    rs.sort_by_key(|&r| (toward.distance(world.pos(r)), r));
    rs
}

/// Executes robot exchanges grouped by 2x2 block, in four parity phases.
pub(crate) fn run_block_exchanges(world: &mut World, tiling: &Tiling, pairs: Vec<((u32, u32), RobotId, RobotId)>) -> Result<(), FlowError> {
    for phase in 0..4u32 {
        let mut by_block: BTreeMap<(u32, u32), Vec<(RobotId, Pos)>> = BTreeMap::new();
        for &(b, r1, r2) in &pairs {
            if (b.0 % 2) + 2 * (b.1 % 2) != phase {
                continue;
            }
            let (p1, p2) = (world.pos(r1), world.pos(r2));
            let e = by_block.entry(b).or_default();
            e.push((r1, p2));
            e.push((r2, p1));
        }
        let regions = by_block
            .into_iter()
            .map(|(b, mv)| (tiling.block_rect(b), mv))
            .collect();
        world.permute_regions(regions)?;
    }
    Ok(())
}

pub(crate) fn remove_crossings_world(world: &mut World, tiling: &Tiling) -> Result<FlowGraph, FlowError> {
    let mut flow = flow_of(&world.sim.pos, &world.target, tiling)?;
    let mut used = HashSet::new();
    let mut pairs = Vec::new();
    if tiling.kx() >= 2 && tiling.ky() >= 2 {
        for j in 0..tiling.ky() - 1 {
            for i in 0..tiling.kx() - 1 {
                let a00 = tiling.id(i, j);
                let a10 = tiling.id(i + 1, j);
                let a01 = tiling.id(i, j + 1);
                let a11 = tiling.id(i + 1, j + 1);
                let line_a = [(a00, a11), (a11, a00)];
                let line_b = [(a10, a01), (a01, a10)];
                loop {
                    let e1 = line_a.iter().copied().find(|&(v, w)| flow.weight(v, w) > 0);
                    let e2 = line_b.iter().copied().find(|&(v, w)| flow.weight(v, w) > 0);
                    let (Some(e1), Some(e2)) = (e1, e2) else { break };
                    if tiling.offset(e1.0, e2.0).is_none() {
                        return Err(FlowError::UnexpectedCrossing(i, j));
                    }
                    let k = flow.weight(e1.0, e1.1).min(flow.weight(e2.0, e2.1));
                    let s1 = tiling.rect(e1.0);
                    let s2 = tiling.rect(e2.0);
                    let c1 = candidates(world, tiling, e1.0, e1.1, &s2, &used);
                    let c2 = candidates(world, tiling, e2.0, e2.1, &s1, &used);
                    for (&r1, &r2) in c1.iter().zip(&c2).take(k as usize) {
                        used.insert(r1);
                        used.insert(r2);
                        pairs.push(((i, j), r1, r2));
                    }
                    flow.sub(e1.0, e1.1, k);
                    flow.sub(e2.0, e2.1, k);
                    flow.add(e2.0, e1.1, k);
                    flow.add(e1.0, e2.1, k);
                }
            }
        }
    }
    run_block_exchanges(world, tiling, pairs)?;
    let after = flow_of(&world.sim.pos, &world.target, tiling)?;
    debug_assert_eq!(after, flow);
    Ok(after)
}

pub(crate) fn remove_bidirectional_world(world: &mut World, tiling: &Tiling) -> Result<FlowGraph, FlowError> {
    let mut flow = flow_of(&world.sim.pos, &world.target, tiling)?;
    let mut pairs = Vec::new();
    let used = HashSet::new();
    let keys: Vec<(TileId, TileId)> = flow.edges.keys().copied().filter(|&(v, w)| v < w).collect();
    for (v, w) in keys {
        let k = flow.weight(v, w).min(flow.weight(w, v));
        if k == 0 {
            continue;
        }
        let c1 = candidates(world, tiling, v, w, &tiling.rect(w), &used);
        let c2 = candidates(world, tiling, w, v, &tiling.rect(v), &used);
        let b = tiling.block_origin(v, w);
        for (&r1, &r2) in c1.iter().zip(&c2).take(k as usize) {
            pairs.push((b, r1, r2));
        }
        flow.sub(v, w, k);
        flow.sub(w, v, k);
    }
    run_block_exchanges(world, tiling, pairs)?;
    let after = flow_of(&world.sim.pos, &world.target, tiling)?;
    debug_assert_eq!(after, flow);
    Ok(after)
}

/// Removes crossing diagonal pairs by exchanging robots between the two
/// adjacent source tiles. Each robot moves between tiles at most once.
pub fn remove_crossings(config: &Configuration, target: &Configuration, tiling: &Tiling) -> Result<(Schedule, Configuration, FlowGraph), FlowError> {
    let mut world = World::from_parts(config, target);
    let flow = remove_crossings_world(&mut world, tiling)?;
    Ok((world.schedule.clone(), world.config(), flow))
}

/// Cancels antiparallel edge pairs by exchanging robots directly into their target tiles.
pub fn remove_bidirectional(config: &Configuration, target: &Configuration, tiling: &Tiling) -> Result<(Schedule, Configuration, FlowGraph), FlowError> {
    let mut world = World::from_parts(config, target);
    let flow = remove_bidirectional_world(&mut world, tiling)?;
    Ok((world.schedule.clone(), world.config(), flow))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn figure_four_tiling() {
        let t = build_tiling(GridDims::new(26, 32), 1);
        assert_eq!(t.len(), 4);
        assert_eq!(t.xs, vec![0, 12, 26]);
        assert_eq!(t.ys, vec![0, 12, 32]);
    }

    #[test]
    fn cut_rule_100_d2() {
        let t = build_tiling(GridDims::new(100, 100), 2);
        assert_eq!(t.xs, vec![0, 24, 48, 72, 100]);
    }

    #[test]
    fn short_side_single_strip() {
        let t = build_tiling(GridDims::new(23, 48), 1);
        assert_eq!(t.xs, vec![0, 23]);
        assert_eq!(t.ys, vec![0, 12, 24, 36, 48]);
        let t = build_tiling(GridDims::new(24, 24), 1);
        assert_eq!(t.xs, vec![0, 12, 24]);
    }

    #[test]
    fn tile_lookup() {
        let t = build_tiling(GridDims::new(26, 32), 1);
        assert_eq!(t.tile_of(Pos::new(0, 0)), 0);
        assert_eq!(t.tile_of(Pos::new(12, 0)), 1);
        assert_eq!(t.tile_of(Pos::new(25, 31)), 3);
        assert_eq!(t.rect(3), Rect::new(12, 12, 14, 20));
    }

    #[test]
    fn flow_bookkeeping() {
        let mut f = FlowGraph::new();
        f.add(0, 1, 5);
        f.add(1, 0, 2);
        assert!(!f.is_circulation());
        assert!(!f.is_unidirectional());
        f.sub(0, 1, 3);
        assert!(f.is_circulation());
        assert!(f.to_dot().contains("0 -> 1"));
    }
}
