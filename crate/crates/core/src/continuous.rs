//! Unit-disk robots moving in the plane.
//!
//! Both planners reduce to the discrete problem on a square mesh of size
//! 2√2: two disks whose centers slide along incident mesh edges at unit
//! speed touch at the edge midpoints but never overlap.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridDims, Instance, Pos};
use crate::par;
use crate::scheduler::{plan_auto, PlanError};

pub type Point = [f64; 2];

/// Mesh size of the planning grid.
pub const MESH: f64 = 2.0 * std::f64::consts::SQRT_2;
/// Tolerance on distances and speeds.
pub const EPS: f64 = 1e-9;

const OFFSET_CANDIDATES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ContinuousError {
    #[error("robots {a} and {b} are {distance} apart, need {required}")]
    SeparationViolated { a: usize, b: usize, distance: f64, required: f64 },
    #[error("start and target lists differ in length")]
    LengthMismatch,
    #[error("no grid offset keeps every center off the grid lines")]
    NoGridOffset,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContinuousInstance {
    pub start: Vec<Point>,
    pub target: Vec<Point>,
}

impl ContinuousInstance {
    pub fn new(start: Vec<Point>, target: Vec<Point>) -> Result<Self, ContinuousError> {
        if start.len() != target.len() {
            return Err(ContinuousError::LengthMismatch);
        }
        Ok(ContinuousInstance { start, target })
    }

    pub fn robots(&self) -> usize {
        self.start.len()
    }

    /// Largest Euclidean start-target distance.
    pub fn d(&self) -> f64 {
        self.start.iter().zip(&self.target).map(|(a, b)| dist(*a, *b)).fold(0.0, f64::max)
    }

    /// Fails with the closest pair if starts or targets are closer than `sep`.
    pub fn check_separation(&self, sep: f64) -> Result<(), ContinuousError> {
        for pts in [&self.start, &self.target] {
            if let Some((a, b, distance)) = closest_pair(pts) {
                if distance < sep - EPS {
                    return Err(ContinuousError::SeparationViolated { a, b, distance, required: sep });
                }
            }
        }
        Ok(())
    }
}

/// Piecewise linear motion through `(time, point)` breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub points: Vec<(f64, Point)>,
}

impl Trajectory {
    pub fn stationary(p: Point) -> Self {
        Trajectory { points: vec![(0.0, p)] }
    }

    pub fn end_time(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }

    /// Position at time `t`; held constant outside the breakpoint range.
    pub fn at(&self, t: f64) -> Point {
        let pts = &self.points;
        if t <= pts[0].0 {
            return pts[0].1;
        }
        let k = pts.partition_point(|p| p.0 <= t);
        if k == pts.len() {
            return pts[k - 1].1;
        }
        let ((t0, a), (t1, b)) = (pts[k - 1], pts[k]);
        lerp(a, b, (t - t0) / (t1 - t0))
    }

    fn bbox(&self) -> [f64; 4] {
        let mut b = [f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY];
        for (_, p) in &self.points {
            b[0] = b[0].min(p[0]);
            b[1] = b[1].min(p[1]);
            b[2] = b[2].max(p[0]);
            b[3] = b[3].max(p[1]);
        }
        b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySet {
    pub trajectories: Vec<Trajectory>,
}

impl TrajectorySet {
    pub fn makespan(&self) -> f64 {
        self.trajectories.iter().map(Trajectory::end_time).fold(0.0, f64::max)
    }

    /// Time-reversed motion, ending where this one started.
    pub fn reversed(&self) -> TrajectorySet {
        let t = self.makespan();
        let trajectories = self
            .trajectories
            .iter()
            .map(|tr| {
                let mut pts: Vec<(f64, Point)> = tr.points.iter().rev().map(|&(s, p)| (t - s, p)).collect();
                if pts[0].0 > 0.0 {
                    pts.insert(0, (0.0, pts[0].1));
                }
                Trajectory { points: pts }
            })
            .collect();
        let mut out = TrajectorySet { trajectories };
        out.pad();
        out
    }

    /// Extends every trajectory to the common end time.
    pub fn pad(&mut self) {
        let t = self.makespan();
        for tr in &mut self.trajectories {
            if tr.end_time() < t {
                let p = tr.points.last().unwrap().1;
                tr.points.push((t, p));
            }
        }
    }

    /// `self` followed by `next`; `next` must start where `self` ends.
    pub fn then(mut self, next: &TrajectorySet) -> TrajectorySet {
        self.pad();
        let t = self.makespan();
        for (tr, nx) in self.trajectories.iter_mut().zip(&next.trajectories) {
            for &(s, p) in &nx.points {
                if s > 0.0 {
                    tr.points.push((t + s, p));
                }
            }
        }
        self.pad();
        self
    }
}

/// Outcome of [`validate_trajectories`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub robots: usize,
    /// Trajectory count differs from the instance.
    pub count_mismatch: bool,
    /// Robots with empty or time-decreasing breakpoint lists, or not starting at time 0.
    pub malformed: Vec<usize>,
    /// Robots not starting at their start or not ending at their target.
    pub endpoint_errors: Vec<usize>,
    pub max_speed: f64,
    pub speed_violations: usize,
    /// Smallest center distance over all pairs and times (infinite below two robots).
    pub min_distance: f64,
    /// Pair and time attaining `min_distance`.
    pub worst_pair: Option<(usize, usize, f64)>,
    /// Pairs whose distance drops below `2 - EPS`.
    pub collisions: usize,
    pub makespan: f64,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        !self.count_mismatch
            && self.malformed.is_empty()
            && self.endpoint_errors.is_empty()
            && self.speed_violations == 0
            && self.collisions == 0
    }
}

/// Checks endpoints, speeds and pairwise separation. Separation is exact:
/// between consecutive breakpoints of either robot both move linearly, so
/// the squared distance is a quadratic in time minimized in closed form.
pub fn validate_trajectories(ts: &TrajectorySet, inst: &ContinuousInstance) -> ValidationReport {
    let n = inst.robots();
    let trs = &ts.trajectories;
    let mut rep = ValidationReport {
        robots: n,
        count_mismatch: trs.len() != n,
        malformed: Vec::new(),
        endpoint_errors: Vec::new(),
        max_speed: 0.0,
        speed_violations: 0,
        min_distance: f64::INFINITY,
        worst_pair: None,
        collisions: 0,
        makespan: ts.makespan(),
    };
    for (r, tr) in trs.iter().enumerate() {
        let ok = !tr.points.is_empty()
            && tr.points[0].0.abs() <= EPS
            && tr.points.windows(2).all(|w| w[1].0 >= w[0].0)
            && tr.points.iter().all(|(t, p)| t.is_finite() && p[0].is_finite() && p[1].is_finite());
        if !ok {
            rep.malformed.push(r);
            continue;
        }
        if r < n
            && (dist(tr.points[0].1, inst.start[r]) > EPS || dist(tr.points.last().unwrap().1, inst.target[r]) > EPS)
        {
            rep.endpoint_errors.push(r);
        }
        for w in tr.points.windows(2) {
            let (len, dt) = (dist(w[0].1, w[1].1), w[1].0 - w[0].0);
            let speed = if dt > 0.0 { len / dt } else if len > EPS { f64::INFINITY } else { 0.0 };
            rep.max_speed = rep.max_speed.max(speed);
            if speed > 1.0 + EPS {
                rep.speed_violations += 1;
            }
        }
    }
    if !rep.malformed.is_empty() {
        return rep;
    }
    let boxes: Vec<[f64; 4]> = trs.iter().map(Trajectory::bbox).collect();
    let results = par::map_range(trs.len(), |i| {
        let mut best = (f64::INFINITY, 0usize, 0.0f64);
        let mut collisions = 0usize;
        for j in i + 1..trs.len() {
            let (a, b) = (&boxes[i], &boxes[j]);
            let gap = (a[0] - b[2]).max(b[0] - a[2]).max(a[1] - b[3]).max(b[1] - a[3]);
            if gap >= 2.0 && gap > best.0 {
                continue;
            }
            let (d, t) = pair_min_distance(&trs[i], &trs[j]);
            if d < 2.0 - EPS {
                collisions += 1;
            }
            if d < best.0 {
                best = (d, j, t);
            }
        }
        (best, collisions)
    });
    for (i, ((d, j, t), c)) in results.into_iter().enumerate() {
        rep.collisions += c;
        if d < rep.min_distance {
            rep.min_distance = d;
            rep.worst_pair = Some((i, j, t));
        }
    }
    rep
}

/// Minimum center distance of two trajectories and a time attaining it.
pub fn pair_min_distance(a: &Trajectory, b: &Trajectory) -> (f64, f64) {
    let mut times: Vec<f64> = a.points.iter().chain(&b.points).map(|p| p.0).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut best = (dist(a.at(times[0]), b.at(times[0])), times[0]);
    for w in times.windows(2) {
        let (t0, t1) = (w[0], w[1]);
        let len = t1 - t0;
        let (pa, pb) = (a.at(t0), b.at(t0));
        let (qa, qb) = (a.at(t1), b.at(t1));
        let r0 = sub(pa, pb);
        let v = sub(sub(qa, qb), r0);
        let vv = dot(v, v);
        let s = if vv > 0.0 { (-dot(r0, v) / vv).clamp(0.0, 1.0) } else { 0.0 };
        let r = [r0[0] + s * v[0], r0[1] + s * v[1]];
        let d = dot(r, r).sqrt();
        if d < best.0 {
            best = (d, t0 + s * len);
        }
    }
    best
}

/// Collects per-robot motion, merging consecutive segments of equal velocity.
struct Builder {
    tr: Vec<Vec<(f64, Point)>>,
}

impl Builder {
    fn new(start: &[Point]) -> Self {
        Builder { tr: start.iter().map(|&p| vec![(0.0, p)]).collect() }
    }

    fn pos(&self, r: usize) -> Point {
        self.tr[r].last().unwrap().1
    }

    /// Moves robot `r` linearly to `q` during `[t0, t1]`, holding before.
    fn go(&mut self, r: usize, t0: f64, t1: f64, q: Point) {
        let pts = &mut self.tr[r];
        let (tl, pl) = *pts.last().unwrap();
        if dist(pl, q) == 0.0 {
            return;
        }
        if tl < t0 {
            pts.push((t0, pl));
        } else if pts.len() >= 2 {
            let (tp, pp) = pts[pts.len() - 2];
            let v0 = scale(sub(pl, pp), 1.0 / (tl - tp));
            let v1 = scale(sub(q, pl), 1.0 / (t1 - tl));
            if dist(v0, v1) < 1e-12 {
                pts.pop();
            }
        }
        pts.push((t1, q));
    }

    fn finish(self) -> TrajectorySet {
        let mut ts = TrajectorySet { trajectories: self.tr.into_iter().map(|points| Trajectory { points }).collect() };
        ts.pad();
        ts
    }
}

/// Every robot moves straight to `to[r]` during `[t, t + T]`, all at the
/// same fraction of their way; `T` is the longest move. Returns `t + T`.
fn synchronous(b: &mut Builder, t: f64, to: &[Point]) -> f64 {
    let dur = (0..to.len()).map(|r| dist(b.pos(r), to[r])).fold(0.0, f64::max);
    for (r, &q) in to.iter().enumerate() {
        b.go(r, t, t + dur, q);
    }
    t + dur
}

/// Every robot moves straight to `to[r]` at unit speed from time `t`.
fn unit_speed(b: &mut Builder, t: f64, to: &[Point]) -> f64 {
    let mut end = t;
    for (r, &q) in to.iter().enumerate() {
        let len = dist(b.pos(r), q);
        b.go(r, t, t + len, q);
        end = end.max(t + len);
    }
    end
}

/// Square lattice of mesh size [`MESH`] with origin `o`.
#[derive(Debug, Clone, Copy)]
struct Lattice {
    o: Point,
}

impl Lattice {
    fn cell(&self, p: Point) -> (i64, i64) {
        (((p[0] - self.o[0]) / MESH).floor() as i64, ((p[1] - self.o[1]) / MESH).floor() as i64)
    }

    fn vertex(&self, c: (i64, i64)) -> Point {
        [self.o[0] + c.0 as f64 * MESH, self.o[1] + c.1 as f64 * MESH]
    }

    fn center(&self, c: (i64, i64)) -> Point {
        [self.o[0] + (c.0 as f64 + 0.5) * MESH, self.o[1] + (c.1 as f64 + 0.5) * MESH]
    }

    /// True if no point lies within [`EPS`] of a grid line.
    fn clear_of(&self, pts: &[Point]) -> bool {
        pts.iter().all(|p| {
            (0..2).all(|k| {
                let f = (p[k] - self.o[k]).rem_euclid(MESH);
                f > EPS && MESH - f > EPS
            })
        })
    }
}

/// Deterministic candidate origins: the additive recurrence with the
/// plastic-number constants, which covers the unit square evenly.
fn offset_candidates() -> impl Iterator<Item = Point> {
    const G: f64 = 1.324_717_957_244_746;
    let (a1, a2) = (1.0 / G, 1.0 / (G * G));
    (0..OFFSET_CANDIDATES).map(move |k| {
        let k = k as f64;
        [(0.5 + a1 * k).fract() * MESH, (0.5 + a2 * k).fract() * MESH]
    })
}

/// Plans the discrete instance between two sets of lattice cells and
/// expands every discrete step into a unit-speed move of length [`MESH`].
/// Robots sit at `place(cell)` throughout.
fn discrete_phase(
    b: &mut Builder,
    t: f64,
    from: &[(i64, i64)],
    to: &[(i64, i64)],
    place: impl Fn((i64, i64)) -> Point,
) -> Result<f64, ContinuousError> {
    if from == to {
        return Ok(t);
    }
    // One spare row and column on each side.
    let x0 = from.iter().chain(to).map(|c| c.0).min().unwrap() - 1;
    let y0 = from.iter().chain(to).map(|c| c.1).min().unwrap() - 1;
    let x1 = from.iter().chain(to).map(|c| c.0).max().unwrap() + 1;
    let y1 = from.iter().chain(to).map(|c| c.1).max().unwrap() + 1;
    let dims = GridDims::new((x1 - x0 + 1) as u32, (y1 - y0 + 1) as u32);
    let local = |c: &(i64, i64)| Pos::new((c.0 - x0) as i32, (c.1 - y0) as i32);
    let inst = Instance::new(dims, from.iter().map(local).collect(), to.iter().map(local).collect())
        .expect("one robot per cell");
    let sched = plan_auto(&inst)?;
    let mut cur: Vec<Pos> = inst.start.positions.clone();
    let mut t = t;
    for step in &sched.steps {
        for &(r, m) in step.moves() {
            let r = r as usize;
            cur[r] = cur[r].step(m);
            let q = place((cur[r].x as i64 + x0, cur[r].y as i64 + y0));
            b.go(r, t, t + MESH, q);
        }
        t += MESH;
    }
    debug_assert_eq!(cur, inst.target.positions);
    Ok(t)
}

/// Constant-stretch plan for instances whose starts and targets are
/// pairwise at least 4 apart. Robots snap to the centers of their lattice
/// cells, follow the discrete plan and snap out to their targets.
pub fn plan_separated(inst: &ContinuousInstance) -> Result<TrajectorySet, ContinuousError> {
    inst.check_separation(4.0)?;
    let n = inst.robots();
    if n == 0 {
        return Ok(TrajectorySet { trajectories: Vec::new() });
    }
    let all: Vec<Point> = inst.start.iter().chain(&inst.target).copied().collect();
    let lattice = offset_candidates()
        .map(|o| Lattice { o })
        .find(|l| l.clear_of(&all) && distinct_cells(l, &inst.start) && distinct_cells(l, &inst.target))
        .ok_or(ContinuousError::NoGridOffset)?;
    let cs: Vec<(i64, i64)> = inst.start.iter().map(|&p| lattice.cell(p)).collect();
    let ct: Vec<(i64, i64)> = inst.target.iter().map(|&p| lattice.cell(p)).collect();
    let mut b = Builder::new(&inst.start);
    let centers: Vec<Point> = cs.iter().map(|&c| lattice.center(c)).collect();
    let t = synchronous(&mut b, 0.0, &centers);
    let t = discrete_phase(&mut b, t, &cs, &ct, |c| lattice.center(c))?;
    synchronous(&mut b, t, &inst.target);
    Ok(b.finish())
}

fn distinct_cells(l: &Lattice, pts: &[Point]) -> bool {
    let mut cells: Vec<(i64, i64)> = pts.iter().map(|&p| l.cell(p)).collect();
    cells.sort_unstable();
    cells.windows(2).all(|w| w[0] != w[1])
}

/// Spreads a 2-separated configuration onto distinct lattice vertices.
/// Robots are cut into vertical slices of at most ⌈√N⌉ robots with a
/// buffer of width 4√2 after each, pushed apart vertically inside each
/// slice and finally moved to the bottom-left corner of their cell.
/// Returns the motion and the reached vertices.
pub(crate) fn spread(pts: &[Point], lattice_origin: Point) -> (TrajectorySet, Vec<(i64, i64)>) {
    let lattice = Lattice { o: lattice_origin };
    let (p1, p2) = spread_positions(pts);
    let mut b = Builder::new(pts);
    let t = unit_speed(&mut b, 0.0, &p1);
    let t = unit_speed(&mut b, t, &p2);
    let cells: Vec<(i64, i64)> = p2.iter().map(|&p| lattice.cell(p)).collect();
    let corners: Vec<Point> = cells.iter().map(|&c| lattice.vertex(c)).collect();
    synchronous(&mut b, t, &corners);
    (b.finish(), cells)
}

/// Positions after the horizontal and after the vertical spreading move.
fn spread_positions(pts: &[Point]) -> (Vec<Point>, Vec<Point>) {
    let n = pts.len();
    let gap = 2.0 * MESH;
    let k = (n as f64).sqrt().ceil() as usize;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]).then(pts[a][1].total_cmp(&pts[b][1])));
    let mut p1 = pts.to_vec();
    for (i, &r) in order.iter().enumerate() {
        p1[r][0] += (i / k) as f64 * gap;
    }
    let mut p2 = p1.clone();
    for slice in order.chunks(k) {
        let mut s: Vec<usize> = slice.to_vec();
        s.sort_by(|&a, &b| p1[a][1].total_cmp(&p1[b][1]).then(p1[a][0].total_cmp(&p1[b][0])));
        // Shifts never decrease upwards, so vertical gaps only grow.
        let mut shift = 0.0f64;
        for w in 1..s.len() {
            let (lo, hi) = (s[w - 1], s[w]);
            shift = shift.max(p2[lo][1] + gap - p1[hi][1]);
            p2[hi][1] = p1[hi][1] + shift;
        }
    }
    (p1, p2)
}

/// Plan of makespan `O(d + √N)` for 2-separated instances: spread the
/// starts onto lattice vertices, plan the discrete instance between the
/// spread starts and the spread targets, then undo the target spreading.
pub fn plan_dense(inst: &ContinuousInstance) -> Result<TrajectorySet, ContinuousError> {
    inst.check_separation(2.0)?;
    let n = inst.robots();
    if n == 0 {
        return Ok(TrajectorySet { trajectories: Vec::new() });
    }
    if n == 1 {
        let mut b = Builder::new(&inst.start);
        unit_speed(&mut b, 0.0, &inst.target);
        return Ok(b.finish());
    }
    let origin = [0.0, 0.0];
    let lattice = Lattice { o: origin };
    let (p1, vs) = spread(&inst.start, origin);
    let (p3, vt) = spread(&inst.target, origin);
    let mut b = Builder::new(&vs.iter().map(|&c| lattice.vertex(c)).collect::<Vec<_>>());
    discrete_phase(&mut b, 0.0, &vs, &vt, |c| lattice.vertex(c))?;
    let p2 = b.finish();
    Ok(p1.then(&p2).then(&p3.reversed()))
}

/// Closest pair of points by a sweep over `x`.
fn closest_pair(pts: &[Point]) -> Option<(usize, usize, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let mut order: Vec<usize> = (0..pts.len()).collect();
    order.sort_by(|&a, &b| pts[a][0].total_cmp(&pts[b][0]));
    let mut best = (0, 0, f64::INFINITY);
    for (i, &a) in order.iter().enumerate() {
        for &b in &order[i + 1..] {
            if pts[b][0] - pts[a][0] >= best.2 {
                break;
            }
            let d = dist(pts[a], pts[b]);
            if d < best.2 {
                best = (a.min(b), a.max(b), d);
            }
        }
    }
    Some(best)
}

fn sub(a: Point, b: Point) -> Point {
    [a[0] - b[0], a[1] - b[1]]
}

fn dot(a: Point, b: Point) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

fn scale(a: Point, s: f64) -> Point {
    [a[0] * s, a[1] * s]
}

fn lerp(a: Point, b: Point, s: f64) -> Point {
    [a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]
}

pub fn dist(a: Point, b: Point) -> f64 {
    let d = sub(a, b);
    dot(d, d).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(a: Point, b: Point) -> Trajectory {
        Trajectory { points: vec![(0.0, a), (dist(a, b), b)] }
    }

    #[test]
    fn spread_separates_every_pair_on_one_axis() {
        let inst = crate::generate::gen_continuous(60, 2.0, 30.0, 3).unwrap();
        let (_, p2) = spread_positions(&inst.start);
        let gap = 2.0 * MESH;
        for i in 0..p2.len() {
            for j in i + 1..p2.len() {
                let (dx, dy) = ((p2[i][0] - p2[j][0]).abs(), (p2[i][1] - p2[j][1]).abs());
                assert!(dx >= gap - EPS || dy >= gap - EPS, "{i} {j}: {dx} {dy}");
            }
        }
    }

    #[test]
    fn touching_stationary_robots_are_compatible() {
        let inst = ContinuousInstance::new(vec![[0.0, 0.0], [2.0, 0.0]], vec![[0.0, 0.0], [2.0, 0.0]]).unwrap();
        let ts = TrajectorySet { trajectories: vec![Trajectory::stationary([0.0, 0.0]), Trajectory::stationary([2.0, 0.0])] };
        let rep = validate_trajectories(&ts, &inst);
        assert!(rep.is_valid(), "{rep:?}");
        assert!((rep.min_distance - 2.0).abs() < 1e-12);
    }

    #[test]
    fn head_on_swap_collides_at_midpoint() {
        let (a, b) = ([0.0, 0.0], [4.0, 0.0]);
        let inst = ContinuousInstance::new(vec![a, b], vec![b, a]).unwrap();
        let ts = TrajectorySet { trajectories: vec![line(a, b), line(b, a)] };
        let rep = validate_trajectories(&ts, &inst);
        assert_eq!(rep.collisions, 1);
        assert!(rep.min_distance < 1e-12);
        assert!((rep.worst_pair.unwrap().2 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn incident_mesh_edges_touch_at_midpoints() {
        let (a, b, c) = ([0.0, 0.0], [MESH, 0.0], [MESH, MESH]);
        let (d, t) = pair_min_distance(&line(a, b), &line(b, c));
        assert!((d - 2.0).abs() < 1e-12);
        assert!((t - MESH / 2.0).abs() < 1e-12);
    }

    #[test]
    fn speed_and_endpoints_checked() {
        let inst = ContinuousInstance::new(vec![[0.0, 0.0]], vec![[3.0, 0.0]]).unwrap();
        let fast = TrajectorySet { trajectories: vec![Trajectory { points: vec![(0.0, [0.0, 0.0]), (1.0, [3.0, 0.0])] }] };
        assert_eq!(validate_trajectories(&fast, &inst).speed_violations, 1);
        let short = TrajectorySet { trajectories: vec![line([0.0, 0.0], [2.0, 0.0])] };
        assert_eq!(validate_trajectories(&short, &inst).endpoint_errors, vec![0]);
    }

    #[test]
    fn separated_identity_only_snaps() {
        let pts = vec![[0.3, 0.1], [5.0, 0.2], [0.0, 4.7]];
        let inst = ContinuousInstance::new(pts.clone(), pts).unwrap();
        let ts = plan_separated(&inst).unwrap();
        assert!(validate_trajectories(&ts, &inst).is_valid());
        assert!(ts.makespan() <= 4.0 + EPS);
    }

    #[test]
    fn separated_exchange() {
        let (a, b) = ([0.0, 0.0], [20.0, 3.0]);
        let inst = ContinuousInstance::new(vec![a, b], vec![b, a]).unwrap();
        let ts = plan_separated(&inst).unwrap();
        let rep = validate_trajectories(&ts, &inst);
        assert!(rep.is_valid(), "{rep:?}");
    }

    #[test]
    fn separation_enforced() {
        let inst = ContinuousInstance::new(vec![[0.0, 0.0], [3.0, 0.0]], vec![[0.0, 0.0], [3.0, 0.0]]).unwrap();
        assert!(matches!(plan_separated(&inst), Err(ContinuousError::SeparationViolated { .. })));
        assert!(plan_dense(&inst).is_ok());
    }

    #[test]
    fn dense_single_robot_is_straight() {
        let inst = ContinuousInstance::new(vec![[1.0, 1.0]], vec![[4.0, 5.0]]).unwrap();
        let ts = plan_dense(&inst).unwrap();
        assert!((ts.makespan() - 5.0).abs() < 1e-12);
        assert!(validate_trajectories(&ts, &inst).is_valid());
    }

    #[test]
    fn dense_row_reversal() {
        let start: Vec<Point> = (0..9).map(|i| [2.0 * i as f64, 0.0]).collect();
        let target: Vec<Point> = start.iter().rev().copied().collect();
        let inst = ContinuousInstance::new(start, target).unwrap();
        let ts = plan_dense(&inst).unwrap();
        let rep = validate_trajectories(&ts, &inst);
        assert!(rep.is_valid(), "{rep:?}");
    }
}
