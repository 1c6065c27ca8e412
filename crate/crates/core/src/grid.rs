//! Grid model: configurations, transformation steps and schedule validation.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Zero-based robot index. External JSON ids are `index + 1`.
pub type RobotId = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridDims {
    pub n1: u32,
    pub n2: u32,
}

impl GridDims {
    pub fn new(n1: u32, n2: u32) -> Self {
        assert!(n1 >= 1 && n2 >= 1, "grid sides must be positive");
        GridDims { n1, n2 }
    }

    pub fn cells(&self) -> usize {
        self.n1 as usize * self.n2 as usize
    }

    pub fn contains(&self, p: Pos) -> bool {
        p.x >= 0 && p.y >= 0 && (p.x as u32) < self.n1 && (p.y as u32) < self.n2
    }

    pub fn index(&self, p: Pos) -> usize {
        p.y as usize * self.n1 as usize + p.x as usize
    }

    pub fn pos(&self, idx: usize) -> Pos {
        Pos::new((idx % self.n1 as usize) as i32, (idx / self.n1 as usize) as i32)
    }

    /// 2x2, 1xn and nx1 grids admit unreachable configuration pairs.
    pub fn is_degenerate(&self) -> bool {
        self.n1 == 1 || self.n2 == 1 || (self.n1 == 2 && self.n2 == 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Pos {
    pub x: i32,
    pub y: i32,
}

impl Pos {
    pub const fn new(x: i32, y: i32) -> Self {
        Pos { x, y }
    }

    pub fn manhattan(self, o: Pos) -> u32 {
        self.x.abs_diff(o.x) + self.y.abs_diff(o.y)
    }

    pub fn step(self, m: Move) -> Pos {
        let (dx, dy) = m.delta();
        Pos::new(self.x + dx, self.y + dy)
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Move {
    North,
    East,
    South,
    West,
    Wait,
}

impl Move {
    pub fn delta(self) -> (i32, i32) {
        match self {
            Move::North => (0, 1),
            Move::East => (1, 0),
            Move::South => (0, -1),
            Move::West => (-1, 0),
            Move::Wait => (0, 0),
        }
    }

    /// Move taking `from` to the adjacent (or equal) cell `to`.
    pub fn between(from: Pos, to: Pos) -> Option<Move> {
        match (to.x - from.x, to.y - from.y) {
            (0, 1) => Some(Move::North),
            (1, 0) => Some(Move::East),
            (0, -1) => Some(Move::South),
            (-1, 0) => Some(Move::West),
            (0, 0) => Some(Move::Wait),
            _ => None,
        }
    }

    pub fn inverse(self) -> Move {
        match self {
            Move::North => Move::South,
            Move::South => Move::North,
            Move::East => Move::West,
            Move::West => Move::East,
            Move::Wait => Move::Wait,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Move::North => 'N',
            Move::East => 'E',
            Move::South => 'S',
            Move::West => 'W',
            Move::Wait => '.',
        }
    }

    pub fn from_symbol(c: char) -> Option<Move> {
        Some(match c {
            'N' => Move::North,
            'E' => Move::East,
            'S' => Move::South,
            'W' => Move::West,
            '.' => Move::Wait,
            _ => return None,
        })
    }
}

/// Sparse set of moves; robots not listed wait.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Step {
    moves: Vec<(RobotId, Move)>,
}

impl Step {
    pub fn new() -> Self {
        Step::default()
    }

    /// Builds a step, dropping waits. Panics if a robot appears twice.
    pub fn from_moves(mut moves: Vec<(RobotId, Move)>) -> Self {
        moves.retain(|&(_, m)| m != Move::Wait);
        moves.sort_unstable_by_key(|&(r, _)| r);
        for w in moves.windows(2) {
            assert!(w[0].0 != w[1].0, "robot {} listed twice in one step", w[0].0);
        }
        Step { moves }
    }

    pub fn moves(&self) -> &[(RobotId, Move)] {
        &self.moves
    }

    pub fn is_empty(&self) -> bool {
        self.moves.is_empty()
    }

    pub fn len(&self) -> usize {
        self.moves.len()
    }

    pub fn get(&self, r: RobotId) -> Move {
        match self.moves.binary_search_by_key(&r, |&(id, _)| id) {
            Ok(i) => self.moves[i].1,
            Err(_) => Move::Wait,
        }
    }

    pub fn inverse(&self) -> Step {
        Step {
            moves: self.moves.iter().map(|&(r, m)| (r, m.inverse())).collect(),
        }
    }

    /// Union of steps over disjoint robot sets.
    pub fn union(steps: impl IntoIterator<Item = Step>) -> Step {
        let mut all = Vec::new();
        for s in steps {
            all.extend(s.moves);
        }
        Step::from_moves(all)
    }

    pub fn retain(&mut self, mut keep: impl FnMut(RobotId) -> bool) {
        self.moves.retain(|&(r, _)| keep(r));
    }

    pub fn map_robots(&self, f: impl Fn(RobotId) -> RobotId) -> Step {
        Step::from_moves(self.moves.iter().map(|&(r, m)| (f(r), m)).collect())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Schedule {
    pub steps: Vec<Step>,
}

impl Schedule {
    pub fn new() -> Self {
        Schedule::default()
    }

    pub fn from_steps(steps: Vec<Step>) -> Self {
        Schedule { steps }
    }

    pub fn makespan(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn push(&mut self, s: Step) {
        self.steps.push(s);
    }

    pub fn extend(&mut self, other: Schedule) {
        self.steps.extend(other.steps);
    }

    /// Reverse schedule with inverted moves.
    pub fn reversed(&self) -> Schedule {
        Schedule {
            steps: self.steps.iter().rev().map(Step::inverse).collect(),
        }
    }

    /// Stepwise union of schedules over disjoint robot sets; shorter ones wait.
    pub fn merge_parallel(parts: Vec<Schedule>) -> Schedule {
        let len = parts.iter().map(|s| s.steps.len()).max().unwrap_or(0);
        let mut cols: Vec<Vec<Step>> = (0..len).map(|_| Vec::new()).collect();
        for p in parts {
            for (i, s) in p.steps.into_iter().enumerate() {
                cols[i].push(s);
            }
        }
        Schedule {
            steps: cols.into_iter().map(Step::union).collect(),
        }
    }

    /// Drops steps in which nobody moves.
    pub fn compact(&mut self) {
        self.steps.retain(|s| !s.is_empty());
    }
}

/// Injective placement of robots `0..N` on the grid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Configuration {
    pub dims: GridDims,
    pub positions: Vec<Pos>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("robot {0} outside the grid")]
    OutOfBounds(RobotId),
    #[error("two robots share cell {0}")]
    Occupied(Pos),
}

impl Configuration {
    pub fn new(dims: GridDims, positions: Vec<Pos>) -> Result<Self, ConfigError> {
        let c = Configuration { dims, positions };
        c.check()?;
        Ok(c)
    }

    pub fn check(&self) -> Result<(), ConfigError> {
        let mut seen = vec![false; self.dims.cells()];
        for (r, &p) in self.positions.iter().enumerate() {
            if !self.dims.contains(p) {
                return Err(ConfigError::OutOfBounds(r as RobotId));
            }
            let i = self.dims.index(p);
            if seen[i] {
                return Err(ConfigError::Occupied(p));
            }
            seen[i] = true;
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn occupancy(&self) -> Vec<Option<RobotId>> {
        let mut occ = vec![None; self.dims.cells()];
        for (r, &p) in self.positions.iter().enumerate() {
            occ[self.dims.index(p)] = Some(r as RobotId);
        }
        occ
    }

    pub fn is_full(&self) -> bool {
        self.positions.len() == self.dims.cells()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("robot {} leaves the grid", .0 + 1)]
    OutOfBounds(RobotId),
    #[error("collision at cell {0}")]
    Collision(Pos),
    #[error("robots {} and {} swap", .0 + 1, .1 + 1)]
    Swap(RobotId, RobotId),
    #[error("unknown robot {}", .0 + 1)]
    UnknownRobot(RobotId),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("step {index}: {inner}")]
    StepViolation { index: usize, inner: StepError },
    #[error("robot {} ends at {got}, target {want}", .robot + 1)]
    TargetMismatch { robot: RobotId, got: Pos, want: Pos },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InstanceError {
    #[error("start and target have different robot counts")]
    LabelMismatch,
    #[error("start configuration: {0}")]
    Start(ConfigError),
    #[error("target configuration: {0}")]
    Target(ConfigError),
}

/// Applies one step, rejecting bound violations, collisions and swaps.
pub fn validate_step(c: &Configuration, step: &Step) -> Result<Configuration, StepError> {
    let mut occ: HashMap<Pos, RobotId> = HashMap::with_capacity(step.len() * 2);
    for &(r, _) in step.moves() {
        let p = *c.positions.get(r as usize).ok_or(StepError::UnknownRobot(r))?;
        occ.insert(p, r);
    }
    let mut next = c.clone();
    for &(r, m) in step.moves() {
        let to = c.positions[r as usize].step(m);
        if !c.dims.contains(to) {
            return Err(StepError::OutOfBounds(r));
        }
        next.positions[r as usize] = to;
    }
    // Only cells touched by movers can conflict; check them against a full occupancy map.
    let full = c.occupancy();
    let mut landing: HashMap<Pos, RobotId> = HashMap::with_capacity(step.len());
    for &(r, m) in step.moves() {
        let from = c.positions[r as usize];
        let to = from.step(m);
        if let Some(prev) = landing.insert(to, r) {
            let _ = prev;
            return Err(StepError::Collision(to));
        }
        if let Some(o) = full[c.dims.index(to)] {
            // Occupant must leave, and not by swapping into our cell.
            let om = step.get(o);
            if om == Move::Wait {
                return Err(StepError::Collision(to));
            }
            if c.positions[o as usize].step(om) == from {
                return Err(StepError::Swap(r.min(o), r.max(o)));
            }
        }
    }
    Ok(next)
}

/// In-place variant of [`validate_step`] over a dense occupancy array, used by planners.
pub struct Sim {
    pub dims: GridDims,
    pub pos: Vec<Pos>,
    occ: Vec<Option<RobotId>>,
}

impl Sim {
    pub fn new(c: &Configuration) -> Self {
        Sim {
            dims: c.dims,
            pos: c.positions.clone(),
            occ: c.occupancy(),
        }
    }

    pub fn at(&self, p: Pos) -> Option<RobotId> {
        self.occ[self.dims.index(p)]
    }

    pub fn config(&self) -> Configuration {
        Configuration {
            dims: self.dims,
            positions: self.pos.clone(),
        }
    }

    pub fn apply(&mut self, step: &Step) -> Result<(), StepError> {
        for &(r, m) in step.moves() {
            let p = *self.pos.get(r as usize).ok_or(StepError::UnknownRobot(r))?;
            if !self.dims.contains(p.step(m)) {
                return Err(StepError::OutOfBounds(r));
            }
        }
        for &(r, m) in step.moves() {
            let from = self.pos[r as usize];
            let to = from.step(m);
            if let Some(o) = self.occ[self.dims.index(to)] {
                let om = step.get(o);
                if om == Move::Wait {
                    return Err(StepError::Collision(to));
                }
                if self.pos[o as usize].step(om) == from {
                    return Err(StepError::Swap(r.min(o), r.max(o)));
                }
            }
        }
        for &(r, _) in step.moves() {
            let i = self.dims.index(self.pos[r as usize]);
            self.occ[i] = None;
        }
        for &(r, m) in step.moves() {
            let to = self.pos[r as usize].step(m);
            let i = self.dims.index(to);
            if self.occ[i].is_some() {
                // Roll back the partial update before reporting.
                self.rebuild_after_failure(step);
                return Err(StepError::Collision(to));
            }
            self.occ[i] = Some(r);
            self.pos[r as usize] = to;
        }
        Ok(())
    }

    fn rebuild_after_failure(&mut self, step: &Step) {
        for &(r, m) in step.moves() {
            let p = self.pos[r as usize];
            let i = self.dims.index(p);
            if self.occ[i] == Some(r) {
                self.occ[i] = None;
                self.pos[r as usize] = p.step(m.inverse());
            }
        }
        self.occ = vec![None; self.dims.cells()];
        for (r, &p) in self.pos.iter().enumerate() {
            self.occ[self.dims.index(p)] = Some(r as RobotId);
        }
    }

    pub fn apply_all(&mut self, s: &Schedule) -> Result<(), ScheduleError> {
        for (index, st) in s.steps.iter().enumerate() {
            self.apply(st)
                .map_err(|inner| ScheduleError::StepViolation { index, inner })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    pub dims: GridDims,
    pub start: Configuration,
    pub target: Configuration,
    /// Optional color class per robot.
    pub colors: Option<Vec<u32>>,
}

impl Instance {
    pub fn new(dims: GridDims, start: Vec<Pos>, target: Vec<Pos>) -> Result<Self, InstanceError> {
        if start.len() != target.len() {
            return Err(InstanceError::LabelMismatch);
        }
        let start = Configuration::new(dims, start).map_err(InstanceError::Start)?;
        let target = Configuration::new(dims, target).map_err(InstanceError::Target)?;
        Ok(Instance {
            dims,
            start,
            target,
            colors: None,
        })
    }

    pub fn robots(&self) -> usize {
        self.start.len()
    }

    pub fn is_full(&self) -> bool {
        self.start.is_full()
    }
}

/// Runs the schedule from the start and checks the final configuration.
pub fn apply_schedule(inst: &Instance, s: &Schedule) -> Result<Configuration, ScheduleError> {
    let mut sim = Sim::new(&inst.start);
    sim.apply_all(s)?;
    for (r, (&got, &want)) in sim.pos.iter().zip(&inst.target.positions).enumerate() {
        if got != want {
            return Err(ScheduleError::TargetMismatch {
                robot: r as RobotId,
                got,
                want,
            });
        }
    }
    Ok(sim.config())
}

pub fn max_distance(inst: &Instance) -> u32 {
    inst.start
        .positions
        .iter()
        .zip(&inst.target.positions)
        .map(|(a, b)| a.manhattan(*b))
        .max()
        .unwrap_or(0)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StretchError {
    #[error("d = 0 with a nonempty schedule of makespan {0}")]
    ZeroDistance(usize),
}

pub fn stretch(inst: &Instance, s: &Schedule) -> Result<f64, StretchError> {
    let d = max_distance(inst);
    if d == 0 {
        if s.is_empty() {
            return Ok(0.0);
        }
        return Err(StretchError::ZeroDistance(s.makespan()));
    }
    Ok(s.makespan() as f64 / d as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(dims: GridDims, ps: &[(i32, i32)]) -> Configuration {
        Configuration::new(dims, ps.iter().map(|&(x, y)| Pos::new(x, y)).collect()).unwrap()
    }

    #[test]
    fn wait_step_is_identity() {
        let c = cfg(GridDims::new(3, 3), &[(0, 0), (1, 1)]);
        assert_eq!(validate_step(&c, &Step::new()).unwrap(), c);
    }

    #[test]
    fn swap_rejected() {
        let c = cfg(GridDims::new(3, 3), &[(0, 0), (1, 0)]);
        let s = Step::from_moves(vec![(0, Move::East), (1, Move::West)]);
        assert_eq!(validate_step(&c, &s), Err(StepError::Swap(0, 1)));
    }

    #[test]
    fn single_move() {
        let c = cfg(GridDims::new(3, 3), &[(0, 0)]);
        let s = Step::from_moves(vec![(0, Move::East)]);
        assert_eq!(validate_step(&c, &s).unwrap().positions[0], Pos::new(1, 0));
    }

    #[test]
    fn rotation_of_full_cycle_is_legal() {
        let c = cfg(GridDims::new(2, 2), &[(0, 0), (1, 0), (1, 1), (0, 1)]);
        let s = Step::from_moves(vec![
            (0, Move::East),
            (1, Move::North),
            (2, Move::West),
            (3, Move::South),
        ]);
        assert!(validate_step(&c, &s).is_ok());
        let mut sim = Sim::new(&c);
        sim.apply(&s).unwrap();
        assert_eq!(sim.pos[0], Pos::new(1, 0));
    }

    #[test]
    fn collisions_and_bounds() {
        let c = cfg(GridDims::new(3, 1), &[(0, 0), (2, 0)]);
        let s = Step::from_moves(vec![(0, Move::East), (1, Move::West)]);
        assert_eq!(validate_step(&c, &s), Err(StepError::Collision(Pos::new(1, 0))));
        let s = Step::from_moves(vec![(0, Move::West)]);
        assert_eq!(validate_step(&c, &s), Err(StepError::OutOfBounds(0)));
        let c = cfg(GridDims::new(3, 1), &[(0, 0), (1, 0)]);
        let s = Step::from_moves(vec![(0, Move::East)]);
        assert_eq!(validate_step(&c, &s), Err(StepError::Collision(Pos::new(1, 0))));
        let mut sim = Sim::new(&c);
        assert!(sim.apply(&s).is_err());
        assert_eq!(sim.config(), c);
    }

    #[test]
    fn following_is_legal() {
        let c = cfg(GridDims::new(3, 1), &[(0, 0), (1, 0)]);
        let s = Step::from_moves(vec![(0, Move::East), (1, Move::East)]);
        assert!(validate_step(&c, &s).is_ok());
    }

    #[test]
    fn metrics() {
        let d = GridDims::new(4, 4);
        let inst = Instance::new(d, vec![Pos::new(0, 0)], vec![Pos::new(3, 2)]).unwrap();
        assert_eq!(max_distance(&inst), 5);
        let same = Instance::new(d, vec![Pos::new(0, 0)], vec![Pos::new(0, 0)]).unwrap();
        assert_eq!(max_distance(&same), 0);
        assert_eq!(stretch(&same, &Schedule::new()), Ok(0.0));
        assert!(apply_schedule(&same, &Schedule::new()).is_ok());
        assert!(matches!(
            apply_schedule(&inst, &Schedule::new()),
            Err(ScheduleError::TargetMismatch { .. })
        ));
        let one = Schedule::from_steps(vec![Step::from_moves(vec![(0, Move::East)])]);
        assert_eq!(stretch(&same, &one), Err(StretchError::ZeroDistance(1)));
    }
}
