//! Realizing unidirectional subflows: every robot counted by a subflow edge
//! `v -> w` crosses from tile `v` into tile `w`. A sequence of up to `d`
//! subflows is realized with one preparation phase followed by one step per
//! subflow, in which robots advance by one cell along disjoint tunnels.

use std::collections::{BTreeMap, HashMap, HashSet};

use thiserror::Error;

use crate::grid::{Configuration, Move, Pos, RobotId, Schedule, Step, StepError};
use crate::partition::{decompose_cycles, PartitionError, Subflow};
use crate::rotatesort::RouteError;
use crate::tiling::{FlowError, FlowGraph, Rect, TileId, Tiling};
use crate::world::World;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RealizeError {
    #[error("tile {0} has no robot left for flow edge {0} -> {1}")]
    MissingRobots(TileId, TileId),
    #[error("tile {0} has no resident robot to trade for a diagonal move")]
    NoResident(TileId),
    #[error("incoming and outgoing terminal counts differ")]
    CardinalityMismatch,
    #[error("tunnels do not fit inside the tile")]
    TileTooSmall,
    #[error("subflow uses tiles that are not adjacent")]
    NonAdjacent,
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Route(#[from] RouteError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error("tunnel step rejected: {0}")]
    Step(#[from] StepError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    South,
    East,
    North,
    West,
}

impl Side {
    pub const ALL: [Side; 4] = [Side::South, Side::East, Side::North, Side::West];

    /// Tile-lattice offset of the neighbour across this side.
    pub fn delta(self) -> (i32, i32) {
        match self {
            Side::South => (0, -1),
            Side::East => (1, 0),
            Side::North => (0, 1),
            Side::West => (-1, 0),
        }
    }

    pub fn from_delta(d: (i32, i32)) -> Option<Side> {
        Side::ALL.into_iter().find(|s| s.delta() == d)
    }

    pub fn opposite(self) -> Side {
        match self {
            Side::South => Side::North,
            Side::East => Side::West,
            Side::North => Side::South,
            Side::West => Side::East,
        }
    }

    pub fn outward(self) -> Move {
        match self {
            Side::South => Move::South,
            Side::East => Move::East,
            Side::North => Move::North,
            Side::West => Move::West,
        }
    }

    pub fn length(self, rect: &Rect) -> u32 {
        match self {
            Side::South | Side::North => rect.w,
            Side::East | Side::West => rect.h,
        }
    }

    /// Cell at `offset` along the side (from its low end) and `depth` cells inward.
    pub fn cell(self, rect: &Rect, offset: u32, depth: u32) -> Pos {
        let (o, k) = (offset as i32, depth as i32);
        match self {
            Side::South => Pos::new(rect.x0 + o, rect.y0 + k),
            Side::North => Pos::new(rect.x0 + o, rect.y1() - 1 - k),
            Side::West => Pos::new(rect.x0 + k, rect.y0 + o),
            Side::East => Pos::new(rect.x1() - 1 - k, rect.y0 + o),
        }
    }

    fn along(self, p: Pos) -> i32 {
        match self {
            Side::South | Side::North => p.x,
            Side::East | Side::West => p.y,
        }
    }

    /// Counter-clockwise perimeter parameter, starting at the bottom-left corner.
    fn perimeter(self, rect: &Rect, offset: u32) -> u32 {
        let (w, h) = (rect.w, rect.h);
        match self {
            Side::South => offset,
            Side::East => w + offset,
            Side::North => w + h + (w - 1 - offset),
            Side::West => 2 * w + h + (h - 1 - offset),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Terminal {
    pub side: Side,
    pub offset: u32,
    pub incoming: bool,
}

/// A path from an incoming terminal to an outgoing one: a stub inward,
/// an arc along the boundary of hull `hull`, a stub outward.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tunnel {
    pub entry: Terminal,
    pub exit: Terminal,
    pub hull: u32,
    pub cells: Vec<Pos>,
}

/// Cells of the `h`-th hull of `rect` (1 is the outer boundary), counter-clockwise
/// from its bottom-left corner.
fn ring(rect: &Rect, h: u32) -> Vec<Pos> {
    let k = h as i32 - 1;
    let (xa, xb) = (rect.x0 + k, rect.x1() - 1 - k);
    let (ya, yb) = (rect.y0 + k, rect.y1() - 1 - k);
    let mut v = Vec::new();
    for x in xa..=xb {
        v.push(Pos::new(x, ya));
    }
    for y in ya + 1..=yb {
        v.push(Pos::new(xb, y));
    }
    for x in (xa..xb).rev() {
        v.push(Pos::new(x, yb));
    }
    for y in (ya + 1..yb).rev() {
        v.push(Pos::new(xa, y));
    }
    v
}

/// Non-crossing matching of incoming to outgoing terminals by a stack sweep
/// along the perimeter, started where the nesting height is smallest.
/// Returns index pairs `(first, second)` in sweep order with their heights.
fn sweep_matching(order: &[bool]) -> Option<Vec<(usize, usize, u32)>> {
    let k = order.len();
    let mut best: Option<(u32, Vec<(usize, usize, u32)>)> = None;
    for start in 0..k {
        let mut stack: Vec<usize> = Vec::new();
        let mut pairs = Vec::new();
        // For each open index: one more than the tallest pair closed inside it.
        let mut inner: Vec<u32> = Vec::new();
        for s in 0..k {
            let i = (start + s) % k;
            match stack.last() {
                Some(&top) if order[top] != order[i] => {
                    stack.pop();
                    let h = inner.pop().unwrap();
                    pairs.push((top, i, h));
                    if let Some(last) = inner.last_mut() {
                        *last = (*last).max(h + 1);
                    }
                }
                _ => {
                    stack.push(i);
                    inner.push(0);
                }
            }
        }
        if !stack.is_empty() {
            return None;
        }
        let max = pairs.iter().map(|p| p.2).max().unwrap_or(0);
        if best.as_ref().is_none_or(|(m, _)| max < *m) {
            best = Some((max, pairs));
        }
    }
    Some(best.map(|b| b.1).unwrap_or_default())
}

/// Pairs the terminals of one tile and lays out the tunnels, using hulls
/// above `base`. Fails if the tunnels do not fit.
pub fn boundary_matching(rect: Rect, terminals: &[Terminal], base: u32) -> Result<Vec<Tunnel>, RealizeError> {
    let incoming = terminals.iter().filter(|t| t.incoming).count();
    if 2 * incoming != terminals.len() {
        return Err(RealizeError::CardinalityMismatch);
    }
    if terminals.is_empty() {
        return Ok(Vec::new());
    }
    let mut idx: Vec<usize> = (0..terminals.len()).collect();
    idx.sort_by_key(|&i| terminals[i].side.perimeter(&rect, terminals[i].offset));
    let order: Vec<bool> = idx.iter().map(|&i| terminals[i].incoming).collect();
    let pairs = sweep_matching(&order).ok_or(RealizeError::CardinalityMismatch)?;
    let mut rings: HashMap<u32, (Vec<Pos>, HashMap<Pos, usize>)> = HashMap::new();
    let mut out = Vec::with_capacity(pairs.len());
    for (a, b, height) in pairs {
        let h = base + 1 + height;
        if 2 * h > rect.w.min(rect.h) {
            return Err(RealizeError::TileTooSmall);
        }
        let (ta, tb) = (terminals[idx[a]], terminals[idx[b]]);
        for t in [ta, tb] {
            if t.offset < h || t.offset + h + 1 > t.side.length(&rect) {
                return Err(RealizeError::TileTooSmall);
            }
        }
        let (ring_cells, index) = rings.entry(h).or_insert_with(|| {
            let r = ring(&rect, h);
            let m = r.iter().enumerate().map(|(i, &p)| (p, i)).collect();
            (r, m)
        });
        // Arc from a to b counter-clockwise; robots run it backwards when b is the entry.
        let ia = index[&ta.side.cell(&rect, ta.offset, h - 1)];
        let ib = index[&tb.side.cell(&rect, tb.offset, h - 1)];
        let n = ring_cells.len();
        let mut arc = Vec::new();
        let mut i = ia;
        loop {
            arc.push(ring_cells[i]);
            if i == ib {
                break;
            }
            i = (i + 1) % n;
        }
        let (entry, exit) = if ta.incoming { (ta, tb) } else { arc.reverse(); (tb, ta) };
        let mut cells: Vec<Pos> = (0..h - 1).map(|k| entry.side.cell(&rect, entry.offset, k)).collect();
        cells.extend(arc);
        cells.extend((0..h - 1).rev().map(|k| exit.side.cell(&rect, exit.offset, k)));
        out.push(Tunnel { entry, exit, hull: h, cells });
    }
    Ok(out)
}

/// Precomputed work for one sequence of subflows.
struct SeqPlan {
    swaps: Vec<((u32, u32), RobotId, RobotId)>,
    stacks: Vec<(TileId, Vec<(RobotId, Pos)>)>,
    steps: Vec<Vec<(TileId, Vec<Tunnel>)>>,
}

struct Planner<'a> {
    world: &'a World,
    tiling: &'a Tiling,
}

impl Planner<'_> {
    fn plan(&self, seq: &[Subflow]) -> Result<SeqPlan, RealizeError> {
        let tiling = self.tiling;
        let world = self.world;
        let target_tile = |r: RobotId| tiling.tile_of(world.target[r as usize]);

        // Robots of each tile grouped by target tile.
        let mut pools: HashMap<(TileId, TileId), Vec<RobotId>> = HashMap::new();
        let mut needed: HashSet<TileId> = HashSet::new();
        for f in seq {
            for &(v, w) in f.edges.keys() {
                needed.insert(v);
                if let Some((di, dj)) = tiling.offset(v, w) {
                    if di != 0 && dj != 0 {
                        needed.insert(tiling.neighbor(v, di, 0).unwrap());
                        needed.insert(tiling.neighbor(v, 0, dj).unwrap());
                    }
                } else {
                    return Err(RealizeError::NonAdjacent);
                }
            }
        }
        let mut needed: Vec<TileId> = needed.into_iter().collect();
        needed.sort_unstable();
        for &v in &needed {
            for p in tiling.rect(v).cells() {
                let r = world.at(p);
                pools.entry((v, target_tile(r))).or_default().push(r);
            }
        }
        for ((_, w), rs) in pools.iter_mut() {
            let rect = tiling.rect(*w);
            rs.sort_by_key(|&r| std::cmp::Reverse((rect.distance(world.pos(r)), r)));
        }

        // (subflow index, destination tile) per robot, and post-swap positions.
        let mut assign: HashMap<RobotId, (usize, TileId)> = HashMap::new();
        let mut pos: HashMap<RobotId, Pos> = HashMap::new();
        let mut diagonal = Vec::new();
        for (j, f) in seq.iter().enumerate() {
            for (&(v, w), &k) in &f.edges {
                let pool = pools.get_mut(&(v, w)).ok_or(RealizeError::MissingRobots(v, w))?;
                for _ in 0..k {
                    let r = pool.pop().ok_or(RealizeError::MissingRobots(v, w))?;
                    assign.insert(r, (j, w));
                    let (di, dj) = tiling.offset(v, w).unwrap();
                    if di != 0 && dj != 0 {
                        diagonal.push((r, v, di, dj));
                    }
                }
            }
        }

        let mut swaps = Vec::new();
        let mut load: HashMap<TileId, usize> = HashMap::new();
        for (r, v, di, dj) in diagonal {
            let (j, w) = assign[&r];
            let via = [tiling.neighbor(v, di, 0).unwrap(), tiling.neighbor(v, 0, dj).unwrap()];
            let u = *via.iter().min_by_key(|u| (load.get(u).copied().unwrap_or(0), **u)).unwrap();
            let at = world.pos(r);
            let residents = pools.get_mut(&(u, u)).ok_or(RealizeError::NoResident(u))?;
            let best = (0..residents.len())
                .min_by_key(|&i| (at.manhattan(world.pos(residents[i])), residents[i]))
                .ok_or(RealizeError::NoResident(u))?;
            let r2 = residents.swap_remove(best);
            *load.entry(u).or_default() += 1;
            pos.insert(r, world.pos(r2));
            pos.insert(r2, at);
            assign.insert(r2, (j, u));
            // r now sits in u and continues to w.
            assign.insert(r, (j, w));
            swaps.push((tiling.block_origin(v, u), r, r2));
        }
        let cur = |r: RobotId| pos.get(&r).copied().unwrap_or_else(|| world.pos(r));

        // Outgoing robots per (tile, side, subflow).
        let l = seq.len();
        let mut out: BTreeMap<(TileId, Side), Vec<Vec<RobotId>>> = BTreeMap::new();
        for (&r, &(j, w)) in &assign {
            let t = tiling.tile_of(cur(r));
            let side = tiling.offset(t, w).and_then(Side::from_delta).ok_or(RealizeError::NonAdjacent)?;
            out.entry((t, side)).or_insert_with(|| vec![Vec::new(); l])[j].push(r);
        }
        let width = |t: TileId, s: Side| out.get(&(t, s)).map_or(0, |v| v.iter().map(Vec::len).max().unwrap_or(0)) as u32;
        // First column of the block used by tile t on side s.
        let block_start = |t: TileId, s: Side| -> Option<u32> {
            let u = tiling.neighbor(t, s.delta().0, s.delta().1)?;
            let len = s.length(&tiling.rect(t));
            let (m1, m2) = (width(t, s), width(u, s.opposite()));
            let c0 = len.checked_sub(m1 + m2)? / 2;
            Some(if t < u { c0 } else { c0 + m2 })
        };

        let mut stacks: BTreeMap<TileId, Vec<(RobotId, Pos)>> = BTreeMap::new();
        for (&(t, s), lists) in &out {
            let rect = tiling.rect(t);
            let c0 = block_start(t, s).ok_or(RealizeError::TileTooSmall)?;
            let mut depth = vec![0u32; width(t, s) as usize];
            for list in lists {
                let mut list = list.clone();
                list.sort_by_key(|&r| (s.along(cur(r)), r));
                for (c, r) in list.into_iter().enumerate() {
                    if depth[c] >= s.opposite().length(&rect).min(rect.w.min(rect.h)) / 2 {
                        return Err(RealizeError::TileTooSmall);
                    }
                    stacks.entry(t).or_default().push((r, s.cell(&rect, c0 + c as u32, depth[c])));
                    depth[c] += 1;
                }
            }
        }

        let base = l as u32;
        let mut steps = Vec::with_capacity(l);
        let tiles: Vec<TileId> = {
            let mut v: Vec<TileId> = out.keys().map(|k| k.0).collect();
            for &(t, s) in out.keys() {
                v.push(tiling.neighbor(t, s.delta().0, s.delta().1).unwrap());
            }
            v.sort_unstable();
            v.dedup();
            v
        };
        for j in 0..l {
            let count = |t: TileId, s: Side| out.get(&(t, s)).map_or(0, |v| v[j].len()) as u32;
            let mut per_tile = Vec::new();
            for &t in &tiles {
                let mut terms = Vec::new();
                for s in Side::ALL {
                    let Some(u) = tiling.neighbor(t, s.delta().0, s.delta().1) else { continue };
                    let n_out = count(t, s);
                    let n_in = count(u, s.opposite());
                    if n_out > 0 {
                        let c0 = block_start(t, s).ok_or(RealizeError::TileTooSmall)?;
                        terms.extend((0..n_out).map(|c| Terminal { side: s, offset: c0 + c, incoming: false }));
                    }
                    if n_in > 0 {
                        let c0 = block_start(u, s.opposite()).ok_or(RealizeError::TileTooSmall)?;
                        terms.extend((0..n_in).map(|c| Terminal { side: s, offset: c0 + c, incoming: true }));
                    }
                }
                if !terms.is_empty() {
                    per_tile.push((t, boundary_matching(tiling.rect(t), &terms, base)?));
                }
            }
            steps.push(per_tile);
        }
        Ok(SeqPlan { swaps, stacks: stacks.into_iter().collect(), steps })
    }
}

fn execute(world: &mut World, tiling: &Tiling, plan: SeqPlan) -> Result<(), RealizeError> {
    crate::tiling::run_block_exchanges(world, tiling, plan.swaps)?;
    let regions = plan.stacks.into_iter().map(|(t, mv)| (tiling.rect(t), mv)).collect();
    world.permute_regions(regions)?;
    for tunnels in plan.steps {
        let mut moves = Vec::new();
        for (_, ts) in tunnels {
            for t in ts {
                for w in t.cells.windows(2) {
                    moves.push((world.at(w[0]), Move::between(w[0], w[1]).expect("adjacent tunnel cells")));
                }
                let last = *t.cells.last().unwrap();
                moves.push((world.at(last), t.exit.side.outward()));
            }
        }
        world.try_push(Step::from_moves(moves))?;
    }
    Ok(())
}

/// Splits a subflow into two nonempty circulations, if it has more than one unit cycle.
fn halve(f: &Subflow) -> Result<Option<(Subflow, Subflow)>, RealizeError> {
    let cycles = decompose_cycles(f)?;
    let total: u32 = cycles.iter().map(|c| c.count).sum();
    if total < 2 {
        return Ok(None);
    }
    let (mut a, mut b) = (FlowGraph::new(), FlowGraph::new());
    let mut acc = 0;
    for c in &cycles {
        for _ in 0..c.count {
            let g = if acc < total / 2 { &mut a } else { &mut b };
            for (v, w) in c.edges() {
                g.add(v, w, 1);
            }
            acc += 1;
        }
    }
    Ok(Some((a, b)))
}

pub(crate) fn realize_sequence_world(world: &mut World, tiling: &Tiling, seq: &[Subflow]) -> Result<usize, RealizeError> {
    let seq: Vec<Subflow> = seq.iter().filter(|f| !f.is_empty()).cloned().collect();
    if seq.is_empty() {
        return Ok(0);
    }
    let planned = Planner { world, tiling }.plan(&seq);
    match planned {
        Ok(plan) => {
            execute(world, tiling, plan)?;
            Ok(0)
        }
        Err(RealizeError::TileTooSmall | RealizeError::NoResident(_)) if seq.len() > 1 => {
            let (a, b) = seq.split_at(seq.len() / 2);
            Ok(1 + realize_sequence_world(world, tiling, a)? + realize_sequence_world(world, tiling, b)?)
        }
        Err(e @ (RealizeError::TileTooSmall | RealizeError::NoResident(_))) => match halve(&seq[0])? {
            Some((a, b)) => Ok(1 + realize_sequence_world(world, tiling, &[a])? + realize_sequence_world(world, tiling, &[b])?),
            None => Err(e),
        },
        Err(e) => Err(e),
    }
}

/// Realizes the subflows in sequences of `d`. Returns the number of fallback
/// splits taken.
pub(crate) fn realize_all_world(world: &mut World, tiling: &Tiling, parts: &[Subflow], d: u32) -> Result<usize, RealizeError> {
    let mut splits = 0;
    for seq in parts.chunks(d.max(1) as usize) {
        splits += realize_sequence_world(world, tiling, seq)?;
    }
    Ok(splits)
}

/// Trades each robot on a diagonal edge of `subflow` with a resident of an
/// intermediate tile and stacks all robots of the subflow along the side they
/// leave through. Returns the schedule and the equivalent orthogonal subflow.
pub fn eliminate_diagonals(config: &Configuration, target: &Configuration, subflow: &Subflow, tiling: &Tiling) -> Result<(Schedule, Subflow), RealizeError> {
    let mut world = World::from_parts(config, target);
    let seq = [subflow.clone()];
    let mut plan = Planner { world: &world, tiling }.plan(&seq)?;
    let mut ortho = FlowGraph::new();
    for (t, tunnels) in &plan.steps[0] {
        for tn in tunnels {
            let (di, dj) = tn.exit.side.delta();
            ortho.add(*t, tiling.neighbor(*t, di, dj).unwrap(), 1);
        }
    }
    plan.steps.clear();
    execute(&mut world, tiling, plan)?;
    Ok((world.schedule, ortho))
}

pub fn realize_subflow(config: &Configuration, target: &Configuration, subflow: &Subflow, tiling: &Tiling) -> Result<Schedule, RealizeError> {
    realize_sequence(config, target, std::slice::from_ref(subflow), tiling)
}

pub fn realize_sequence(config: &Configuration, target: &Configuration, seq: &[Subflow], tiling: &Tiling) -> Result<Schedule, RealizeError> {
    let mut world = World::from_parts(config, target);
    realize_sequence_world(&mut world, tiling, seq)?;
    Ok(world.schedule)
}

pub fn realize_all(config: &Configuration, target: &Configuration, parts: &[Subflow], d: u32, tiling: &Tiling) -> Result<Schedule, RealizeError> {
    let mut world = World::from_parts(config, target);
    realize_all_world(&mut world, tiling, parts, d)?;
    Ok(world.schedule)
}
