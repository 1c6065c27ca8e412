//! Top-level planners.

use std::collections::{HashSet, VecDeque};

use log::debug;
use thiserror::Error;

use crate::grid::{max_distance, GridDims, Instance, Move, Pos, RobotId, Schedule, Step};
use crate::colored::strip_robots;
use crate::matching;
use crate::oracle::optimal_schedule;
use crate::par;
use crate::partition::{partition_subflows, PartitionError};
use crate::realization::{realize_all_world, RealizeError};
use crate::rotatesort::{plan_rotatesort, RouteError};
use crate::tiling::{build_tiling, Rect, remove_bidirectional_world, remove_crossings_world, FlowError};
use crate::world::World;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlanError {
    #[error("grid {0}x{1} admits unreachable permutations")]
    InfeasibleDims(u32, u32),
    #[error("instance is not fully occupied")]
    NotFullyOccupied,
    #[error("instance is outside the sparse case bounds")]
    CaseBoundsViolated,
    #[error("sparse sweep could not place or move the robots")]
    SparseStuck,
    #[error(transparent)]
    Route(RouteError),
    #[error(transparent)]
    Flow(FlowError),
    #[error(transparent)]
    Partition(#[from] PartitionError),
    #[error(transparent)]
    Realize(RealizeError),
}

impl From<RouteError> for PlanError {
    fn from(e: RouteError) -> Self {
        match e {
            RouteError::InfeasibleDims(a, b) => PlanError::InfeasibleDims(a, b),
            RouteError::NotFullyOccupied => PlanError::NotFullyOccupied,
            e => PlanError::Route(e),
        }
    }
}

impl From<FlowError> for PlanError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Route(r) => r.into(),
            e => PlanError::Flow(e),
        }
    }
}

impl From<RealizeError> for PlanError {
    fn from(e: RealizeError) -> Self {
        match e {
            RealizeError::Route(r) => r.into(),
            RealizeError::Flow(f) => f.into(),
            e => PlanError::Realize(e),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Method {
    #[default]
    Empty,
    /// Tiling, flow preprocessing, subflow realization, per-tile routing.
    Pipeline,
    /// One routing pass over the whole grid.
    Direct,
}

/// Steps spent in each stage of a full-grid plan.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PlanReport {
    pub d: u32,
    pub method: Method,
    /// `(stage name, steps)` in execution order.
    pub stages: Vec<(&'static str, usize)>,
    pub subflows: usize,
    /// Sequences or subflows split because their tunnels did not fit.
    pub splits: usize,
}

impl PlanReport {
    pub fn total(&self) -> usize {
        self.stages.iter().map(|s| s.1).sum()
    }
}

fn uses_tiling(dims: GridDims, d: u32) -> bool {
    dims.n1 >= 24 * d && dims.n2 >= 24 * d
}

/// Constant-stretch schedule for a fully occupied instance.
pub fn plan_full(inst: &Instance) -> Result<Schedule, PlanError> {
    plan_full_report(inst).map(|r| r.0)
}

/// Runs the pipeline (when the grid is large enough to tile) and direct
/// routing of the whole grid, and keeps the shorter schedule.
pub fn plan_full_report(inst: &Instance) -> Result<(Schedule, PlanReport), PlanError> {
    let (piped, report) = plan_pipeline_report(inst)?;
    if report.method != Method::Pipeline {
        return Ok((piped, report));
    }
    let direct = plan_rotatesort(inst)?;
    if direct.makespan() < piped.makespan() {
        let report = PlanReport {
            d: report.d,
            method: Method::Direct,
            stages: vec![("route", direct.makespan())],
            ..Default::default()
        };
        return Ok((direct, report));
    }
    Ok((piped, report))
}

/// Steps 1 to 5 only: tiling, flow preprocessing, subflow realization and
/// per-tile routing. Grids with a side below `24d` are routed directly.
pub fn plan_pipeline(inst: &Instance) -> Result<Schedule, PlanError> {
    plan_pipeline_report(inst).map(|r| r.0)
}

pub fn plan_pipeline_report(inst: &Instance) -> Result<(Schedule, PlanReport), PlanError> {
    if !inst.is_full() {
        return Err(PlanError::NotFullyOccupied);
    }
    let d = max_distance(inst);
    let mut report = PlanReport { d, ..Default::default() };
    if d == 0 {
        return Ok((Schedule::new(), report));
    }
    let dims = inst.dims;
    if dims.is_degenerate() {
        // A full line cannot move at all; a full 2x2 can only rotate.
        let s = if dims.cells() == 4 { optimal_schedule(inst, 8).ok().flatten() } else { None };
        let s = s.ok_or(PlanError::InfeasibleDims(dims.n1, dims.n2))?;
        report.method = Method::Direct;
        report.stages.push(("route", s.makespan()));
        return Ok((s, report));
    }
    if !uses_tiling(dims, d) {
        let s = plan_rotatesort(inst)?;
        report.method = Method::Direct;
        report.stages.push(("route", s.makespan()));
        return Ok((s, report));
    }
    report.method = Method::Pipeline;
    let mut world = World::new(inst);
    let tiling = build_tiling(dims, d);
    let mut mark = 0;
    let mut stage = |world: &World, name: &'static str, report: &mut PlanReport| {
        let n = world.schedule.makespan();
        report.stages.push((name, n - mark));
        mark = n;
    };

    remove_crossings_world(&mut world, &tiling)?;
    stage(&world, "crossings", &mut report);
    let flow = remove_bidirectional_world(&mut world, &tiling)?;
    stage(&world, "bidirectional", &mut report);
    let parts = partition_subflows(&flow, d, &tiling)?;
    report.subflows = parts.len();
    report.splits = realize_all_world(&mut world, &tiling, &parts, d)?;
    stage(&world, "subflows", &mut report);
    world.route_to_targets(&tiling.rects())?;
    stage(&world, "route", &mut report);
    debug!("plan_full d={} tiles={} subflows={} steps={:?}", d, tiling.len(), parts.len(), report.stages);
    Ok((world.schedule, report))
}

/// Whether the sparse sweep applies: `N <= ceil(n1/4)` and `N <= d`.
pub fn is_sparse_case(robots: usize, n1: u32, d: u32) -> bool {
    robots <= n1.div_ceil(4) as usize && robots <= d as usize
}

/// Occupancy of a robot set on a dense grid map.
struct Occ {
    dims: GridDims,
    cell: Vec<Option<u32>>,
}

impl Occ {
    fn new(dims: GridDims, pos: &[Pos]) -> Self {
        let mut cell = vec![None; dims.cells()];
        for (r, &p) in pos.iter().enumerate() {
            cell[dims.index(p)] = Some(r as u32);
        }
        Occ { dims, cell }
    }

    fn at(&self, p: Pos) -> Option<u32> {
        self.cell[self.dims.index(p)]
    }
}

/// Shortest path from `from` to `to` avoiding `blocked`, inside `window`.
fn bfs_path(dims: GridDims, from: Pos, to: Pos, window: Rect, blocked: impl Fn(Pos) -> bool) -> Option<Vec<Pos>> {
    let local = |p: Pos| ((p.y - window.y0) as u32 * window.w + (p.x - window.x0) as u32) as usize;
    let mut prev: Vec<Option<Pos>> = vec![None; (window.w * window.h) as usize];
    prev[local(from)] = Some(from);
    let mut q = VecDeque::from([from]);
    while let Some(p) = q.pop_front() {
        if p == to {
            let mut path = vec![to];
            let mut c = to;
            while c != from {
                c = prev[local(c)].unwrap();
                path.push(c);
            }
            path.reverse();
            return Some(path);
        }
        for m in [Move::North, Move::East, Move::South, Move::West] {
            let n = p.step(m);
            if dims.contains(n) && window.contains(n) && prev[local(n)].is_none() && !blocked(n) {
                prev[local(n)] = Some(p);
                q.push_back(n);
            }
        }
    }
    None
}

/// Moves every robot to its goal in rounds; each round moves a set of robots
/// along pairwise disjoint shortest paths while the others stand still.
/// Goals must be free of other robots. `None` if a round makes no progress.
fn disjoint_rounds(dims: GridDims, start: &[Pos], goals: &[Pos]) -> Option<Schedule> {
    let mut pos = start.to_vec();
    let mut out = Schedule::new();
    loop {
        let mut pending: Vec<usize> = (0..pos.len()).filter(|&r| pos[r] != goals[r]).collect();
        if pending.is_empty() {
            return Some(out);
        }
        pending.sort_by_key(|&r| (pos[r].manhattan(goals[r]), r));
        let occ = Occ::new(dims, &pos);
        let mut used: HashSet<Pos> = HashSet::new();
        let mut paths: Vec<(usize, Vec<Pos>)> = Vec::new();
        for r in pending {
            let blocked = |p: Pos| used.contains(&p) || occ.at(p).is_some_and(|o| o as usize != r);
            let span = Rect::new(pos[r].x.min(goals[r].x), pos[r].y.min(goals[r].y), 1, 1)
                .union(&Rect::new(pos[r].x.max(goals[r].x), pos[r].y.max(goals[r].y), 1, 1));
            let near = Rect::new(span.x0 - 3, span.y0 - 3, span.w + 6, span.h + 6);
            let clip = |w: Rect| {
                let x0 = w.x0.max(0);
                let y0 = w.y0.max(0);
                Rect::new(x0, y0, (w.x1().min(dims.n1 as i32) - x0) as u32, (w.y1().min(dims.n2 as i32) - y0) as u32)
            };
            let path = bfs_path(dims, pos[r], goals[r], clip(near), blocked)
                .or_else(|| bfs_path(dims, pos[r], goals[r], clip(Rect::new(0, 0, dims.n1, dims.n2)), blocked));
            if let Some(path) = path {
                used.extend(path.iter().copied());
                paths.push((r, path));
            }
        }
        if paths.is_empty() {
            return None;
        }
        let len = paths.iter().map(|p| p.1.len() - 1).max().unwrap();
        for t in 0..len {
            let moves = paths
                .iter()
                .filter(|(_, p)| t + 1 < p.len())
                .map(|(r, p)| (*r as RobotId, Move::between(p[t], p[t + 1]).unwrap()))
                .collect();
            out.push(Step::from_moves(moves));
        }
        for (r, p) in paths {
            pos[r] = *p.last().unwrap();
        }
    }
}

/// Nearest free cell to `from` (by Manhattan rings) accepted by `ok`.
fn nearest_cell(dims: GridDims, from: Pos, ok: impl Fn(Pos) -> bool) -> Option<Pos> {
    let reach = (dims.n1 + dims.n2) as i32;
    for r in 0..=reach {
        for dy in -r..=r {
            let dx = r - dy.abs();
            for x in [from.x - dx, from.x + dx] {
                let p = Pos::new(x, from.y + dy);
                if dims.contains(p) && ok(p) {
                    return Some(p);
                }
                if dx == 0 {
                    break;
                }
            }
        }
    }
    None
}

/// Moves every robot to coordinate `goal[r]` along one axis, detouring
/// through the neighbouring free line (the row below, or the column to the
/// right). Robots start on lines of one parity and end on the other, with
/// goals pairwise distinct within each line.
fn sweep(pos: &mut [Pos], goal: &[i32], horizontal: bool) -> Vec<Step> {
    let mut steps = Vec::new();
    let (fwd, out, inn) = if horizontal {
        ([Move::East, Move::West], Move::South, Move::North)
    } else {
        ([Move::North, Move::South], Move::East, Move::West)
    };
    for dir in 0..2 {
        let coord = |p: Pos| if horizontal { p.x } else { p.y };
        let movers: Vec<(usize, i32)> = (0..pos.len())
            .filter_map(|r| {
                let delta = goal[r] - coord(pos[r]);
                ((delta > 0) == (dir == 0) && delta != 0).then_some((r, delta.abs()))
            })
            .collect();
        if movers.is_empty() {
            continue;
        }
        let span = movers.iter().map(|m| m.1).max().unwrap();
        steps.push(Step::from_moves(movers.iter().map(|&(r, _)| (r as RobotId, out)).collect()));
        for t in 1..=span + 1 {
            let moves = movers
                .iter()
                .filter_map(|&(r, dist)| match t.cmp(&(dist + 1)) {
                    std::cmp::Ordering::Less => Some((r as RobotId, fwd[dir])),
                    std::cmp::Ordering::Equal => Some((r as RobotId, inn)),
                    std::cmp::Ordering::Greater => None,
                })
                .collect();
            steps.push(Step::from_moves(moves));
        }
        for &(r, _) in &movers {
            if horizontal {
                pos[r].x = goal[r];
            } else {
                pos[r].y = goal[r];
            }
        }
    }
    steps
}

/// Sparse instances: spread robots to odd coordinates, sweep horizontally
/// then vertically to even coordinates near the targets, then settle.
pub fn plan_sparse(inst: &Instance) -> Result<Schedule, PlanError> {
    let dims = inst.dims;
    let n = inst.robots();
    let d = max_distance(inst);
    if !is_sparse_case(n, dims.n1, d) {
        return Err(PlanError::CaseBoundsViolated);
    }
    if d == 0 {
        return Ok(Schedule::new());
    }
    if dims.n1 < 3 || dims.n2 < 3 {
        return Err(PlanError::SparseStuck);
    }
    let start = &inst.start.positions;
    let target = &inst.target.positions;

    // Odd cells near the starts; robots already on one keep it.
    let odd = |p: Pos| p.x % 2 == 1 && p.y % 2 == 1;
    let mut taken: HashSet<Pos> = start.iter().copied().filter(|&p| odd(p)).collect();
    let starts: HashSet<Pos> = start.iter().copied().collect();
    let mut c_o = start.clone();
    for r in 0..n {
        if !odd(start[r]) {
            let p = nearest_cell(dims, start[r], |p| odd(p) && !taken.contains(&p) && !starts.contains(&p)).ok_or(PlanError::SparseStuck)?;
            taken.insert(p);
            c_o[r] = p;
        }
    }

    // Even cells near the targets, one column per robot within each odd row.
    let even = |p: Pos| p.x % 2 == 0 && p.y % 2 == 0 && p.x + 1 < dims.n1 as i32;
    let targets: HashSet<Pos> = target.iter().copied().collect();
    let mut taken: HashSet<Pos> = HashSet::new();
    let mut row_cols: HashSet<(i32, i32)> = HashSet::new();
    let mut c_e = target.clone();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&r| (!even(target[r]), r));
    for r in order {
        let y = c_o[r].y;
        let ok = |p: Pos| even(p) && !taken.contains(&p) && !row_cols.contains(&(y, p.x)) && (p == target[r] || !targets.contains(&p));
        let p = nearest_cell(dims, target[r], ok).ok_or(PlanError::SparseStuck)?;
        taken.insert(p);
        row_cols.insert((y, p.x));
        c_e[r] = p;
    }

    let mut s = disjoint_rounds(dims, start, &c_o).ok_or(PlanError::SparseStuck)?;
    let mut pos = c_o.clone();
    let xs: Vec<i32> = c_e.iter().map(|p| p.x).collect();
    let ys: Vec<i32> = c_e.iter().map(|p| p.y).collect();
    for st in sweep(&mut pos, &xs, true) {
        s.push(st);
    }
    for st in sweep(&mut pos, &ys, false) {
        s.push(st);
    }
    debug_assert_eq!(pos, c_e);
    let settle = disjoint_rounds(dims, target, &c_e).ok_or(PlanError::SparseStuck)?;
    s.extend(settle.reversed());
    Ok(s)
}

/// Disjoint rectangles covering each robot's start and target, each at least
/// 2x2 and never exactly 2x2.
fn clusters(dims: GridDims, inst: &Instance) -> Vec<(Rect, Vec<usize>)> {
    let grow = |lo: i32, hi: i32, min: i32, max: i32, need: i32| -> (i32, i32) {
        let mut lo = lo;
        let mut hi = hi;
        while hi - lo < need {
            if hi < max {
                hi += 1;
            } else if lo > min {
                lo -= 1;
            } else {
                break;
            }
        }
        (lo, hi)
    };
    let mut rects: Vec<Rect> = (0..inst.robots())
        .map(|r| {
            let (s, t) = (inst.start.positions[r], inst.target.positions[r]);
            let (x0, x1) = grow(s.x.min(t.x), s.x.max(t.x) + 1, 0, dims.n1 as i32, 2);
            let (y0, y1) = grow(s.y.min(t.y), s.y.max(t.y) + 1, 0, dims.n2 as i32, 2);
            Rect::new(x0, y0, (x1 - x0) as u32, (y1 - y0) as u32)
        })
        .collect();
    loop {
        // Merge until pairwise disjoint.
        let mut merged = true;
        while merged {
            merged = false;
            let mut i = 0;
            while i < rects.len() {
                let mut j = i + 1;
                while j < rects.len() {
                    if rects[i].intersects(&rects[j]) {
                        let r = rects.swap_remove(j);
                        rects[i] = rects[i].union(&r);
                        merged = true;
                        j = i + 1;
                    } else {
                        j += 1;
                    }
                }
                i += 1;
            }
        }
        let mut changed = false;
        for r in rects.iter_mut() {
            if r.w == 2 && r.h == 2 {
                let (x0, x1) = grow(r.x0, r.x1(), 0, dims.n1 as i32, 3);
                if x1 - x0 == 3 {
                    *r = Rect::new(x0, r.y0, 3, 2);
                    changed = true;
                } else {
                    let (y0, y1) = grow(r.y0, r.y1(), 0, dims.n2 as i32, 3);
                    if y1 - y0 == 3 {
                        *r = Rect::new(r.x0, y0, 2, 3);
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            break;
        }
    }
    rects.sort_by_key(|r| (r.y0, r.x0));
    rects
        .into_iter()
        .map(|rect| {
            let members = (0..inst.robots()).filter(|&r| rect.contains(inst.start.positions[r])).collect();
            (rect, members)
        })
        .collect()
}

/// Plans one cluster: pads it with filler robots to a fully occupied
/// rectangle, plans that, and keeps only the real robots' moves.
fn plan_cluster(inst: &Instance, rect: Rect, members: &[usize]) -> Result<Schedule, PlanError> {
    if members.iter().all(|&r| inst.start.positions[r] == inst.target.positions[r]) {
        return Ok(Schedule::new());
    }
    let dims = GridDims::new(rect.w, rect.h);
    let local = |p: Pos| Pos::new(p.x - rect.x0, p.y - rect.y0);
    let mut start: Vec<Pos> = members.iter().map(|&r| local(inst.start.positions[r])).collect();
    let mut target: Vec<Pos> = members.iter().map(|&r| local(inst.target.positions[r])).collect();
    let relabel = |s: Schedule| Schedule::from_steps(s.steps.iter().map(|st| st.map_robots(|r| members[r as usize] as RobotId)).collect());
    if dims.is_degenerate() {
        // Too small to pad: search the cluster's own configurations.
        let own = Instance::new(dims, start, target).expect("cluster of a valid instance");
        let s = optimal_schedule(&own, 64).ok().flatten().ok_or(PlanError::InfeasibleDims(dims.n1, dims.n2))?;
        return Ok(relabel(s));
    }
    let s_occ: HashSet<Pos> = start.iter().copied().collect();
    let t_occ: HashSet<Pos> = target.iter().copied().collect();
    let cells: Vec<Pos> = (0..dims.cells()).map(|i| dims.pos(i)).collect();
    // Fillers on cells empty at both ends stay put; the rest are matched.
    let mut from = Vec::new();
    let mut to = Vec::new();
    for &p in &cells {
        match (s_occ.contains(&p), t_occ.contains(&p)) {
            (false, false) => {
                start.push(p);
                target.push(p);
            }
            (false, true) => from.push(p),
            (true, false) => to.push(p),
            _ => {}
        }
    }
    let (_, m) = matching::bottleneck(&from, &to);
    for (i, &p) in from.iter().enumerate() {
        start.push(p);
        target.push(to[m[i]]);
    }
    let padded = Instance::new(dims, start, target).expect("padding yields a permutation");
    let s = plan_full(&padded)?;
    Ok(relabel(strip_robots(s, members.len())))
}

/// Robots on a single row or column: they cannot pass each other, so every
/// robot walks toward its target whenever the next cell is free or being
/// vacated in the same direction.
fn plan_line(inst: &Instance) -> Result<Schedule, PlanError> {
    let dims = inst.dims;
    let along = |p: Pos| if dims.n2 == 1 { p.x } else { p.y };
    let mut order: Vec<usize> = (0..inst.robots()).collect();
    order.sort_by_key(|&r| along(inst.start.positions[r]));
    let mut by_target = order.clone();
    by_target.sort_by_key(|&r| along(inst.target.positions[r]));
    if order != by_target {
        return Err(PlanError::InfeasibleDims(dims.n1, dims.n2));
    }
    let (inc, dec) = if dims.n2 == 1 { (Move::East, Move::West) } else { (Move::North, Move::South) };
    let mut pos: Vec<i32> = inst.start.positions.iter().map(|&p| along(p)).collect();
    let goal: Vec<i32> = inst.target.positions.iter().map(|&p| along(p)).collect();
    let mut s = Schedule::new();
    while pos != goal {
        // Order is preserved, so a robot may advance if its neighbour in that
        // direction is not in the way after the neighbour's own move.
        let mut next = pos.clone();
        let k = order.len();
        for i in (0..k).rev() {
            let r = order[i];
            if pos[r] < goal[r] && (i + 1 == k || next[order[i + 1]] > pos[r] + 1) {
                next[r] = pos[r] + 1;
            }
        }
        for i in 0..k {
            let r = order[i];
            if pos[r] > goal[r] && (i == 0 || next[order[i - 1]] < pos[r] - 1) {
                next[r] = pos[r] - 1;
            }
        }
        let moves = (0..pos.len())
            .filter(|&r| next[r] != pos[r])
            .map(|r| (r as RobotId, if next[r] > pos[r] { inc } else { dec }))
            .collect();
        s.push(Step::from_moves(moves));
        pos = next;
    }
    Ok(s)
}

/// Any instance: the sparse sweep when it applies, otherwise independent
/// clusters planned as fully occupied rectangles.
pub fn plan_auto(inst: &Instance) -> Result<Schedule, PlanError> {
    let dims = inst.dims;
    let d = max_distance(inst);
    if d == 0 {
        return Ok(Schedule::new());
    }
    if dims.n1 == 1 || dims.n2 == 1 {
        return plan_line(inst);
    }
    if is_sparse_case(inst.robots(), dims.n1, d) {
        match plan_sparse(inst) {
            Err(PlanError::SparseStuck) => debug!("sparse sweep stuck, clustering instead"),
            r => return r,
        }
    }
    if inst.is_full() {
        return plan_full(inst);
    }
    let cl = clusters(dims, inst);
    debug!("plan_auto: {} clusters", cl.len());
    let parts = par::map_ref(&cl, |(rect, members)| plan_cluster(inst, *rect, members));
    let parts = parts.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Schedule::merge_parallel(parts))
}
