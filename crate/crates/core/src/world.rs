//! Mutable planning state for a fully occupied grid: current positions,
//! targets and the schedule emitted so far.

use std::collections::HashSet;

use crate::grid::{Configuration, Instance, Pos, RobotId, Schedule, Sim, Step, StepError};
use crate::rotatesort::{route_regions, RegionTask, RouteError};
use crate::tiling::Rect;

pub(crate) struct World {
    pub sim: Sim,
    pub target: Vec<Pos>,
    pub schedule: Schedule,
}

impl World {
    pub fn new(inst: &Instance) -> Self {
        World {
            sim: Sim::new(&inst.start),
            target: inst.target.positions.clone(),
            schedule: Schedule::new(),
        }
    }

    pub fn from_parts(config: &Configuration, target: &Configuration) -> Self {
        World {
            sim: Sim::new(config),
            target: target.positions.clone(),
            schedule: Schedule::new(),
        }
    }

    pub fn pos(&self, r: RobotId) -> Pos {
        self.sim.pos[r as usize]
    }

    pub fn at(&self, p: Pos) -> RobotId {
        self.sim.at(p).expect("grid is fully occupied")
    }

    pub fn push(&mut self, step: Step) {
        self.try_push(step).expect("planner emitted an invalid step");
    }

    pub fn try_push(&mut self, step: Step) -> Result<(), StepError> {
        if step.is_empty() {
            return Ok(());
        }
        self.sim.apply(&step)?;
        self.schedule.push(step);
        Ok(())
    }

    pub fn push_all(&mut self, s: Schedule) {
        for st in s.steps {
            self.push(st);
        }
    }

    /// Moves the listed robots to the listed cells inside each region; other
    /// robots of the region stay put or, if displaced, take the vacated
    /// cells. Regions are routed in parallel.
    pub fn permute_regions(&mut self, regions: Vec<(Rect, Vec<(RobotId, Pos)>)>) -> Result<(), RouteError> {
        let tasks: Vec<RegionTask> = regions
            .into_iter()
            .filter(|(_, moves)| moves.iter().any(|&(r, p)| self.pos(r) != p))
            .map(|(rect, moves)| self.region_task(self.shrink(rect, &moves), &moves))
            .collect();
        if tasks.is_empty() {
            return Ok(());
        }
        let s = route_regions(tasks)?;
        self.push_all(s);
        Ok(())
    }

    /// Smallest sub-rectangle of `rect` holding every moving robot and its
    /// destination, widened to at least 3x3 where `rect` allows.
    fn shrink(&self, rect: Rect, moves: &[(RobotId, Pos)]) -> Rect {
        let pts = moves.iter().filter(|&&(r, p)| self.pos(r) != p).flat_map(|&(r, p)| [self.pos(r), p]);
        let (mut x0, mut y0, mut x1, mut y1) = (i32::MAX, i32::MAX, i32::MIN, i32::MIN);
        for p in pts {
            x0 = x0.min(p.x);
            y0 = y0.min(p.y);
            x1 = x1.max(p.x + 1);
            y1 = y1.max(p.y + 1);
        }
        let widen = |lo: i32, hi: i32, min: i32, max: i32| {
            let need = (3 - (hi - lo)).max(0);
            let lo = (lo - need).max(min);
            (lo, (lo + 3).max(hi).min(max))
        };
        let (x0, x1) = widen(x0, x1, rect.x0, rect.x1());
        let (y0, y1) = widen(y0, y1, rect.y0, rect.y1());
        Rect::new(x0, y0, (x1 - x0) as u32, (y1 - y0) as u32)
    }

    fn region_task(&self, rect: Rect, moves: &[(RobotId, Pos)]) -> RegionTask {
        let (w, h) = (rect.w, rect.h);
        let local = |p: Pos| ((p.y - rect.y0) as u32 * w + (p.x - rect.x0) as u32) as usize;
        let mut robots = Vec::with_capacity((w * h) as usize);
        for y in 0..h as i32 {
            for x in 0..w as i32 {
                robots.push(self.at(Pos::new(rect.x0 + x, rect.y0 + y)));
            }
        }
        let mut dest: Vec<Option<usize>> = vec![None; robots.len()];
        let mut claimed = HashSet::with_capacity(moves.len());
        let mut moving = HashSet::with_capacity(moves.len());
        for &(r, p) in moves {
            if self.pos(r) == p && !rect.contains(p) {
                continue;
            }
            debug_assert!(rect.contains(p) && rect.contains(self.pos(r)));
            dest[local(self.pos(r))] = Some(local(p));
            claimed.insert(local(p));
            moving.insert(r);
        }
        let mut displaced = Vec::new();
        let mut free = Vec::new();
        for (k, &r) in robots.iter().enumerate() {
            if moving.contains(&r) {
                if !claimed.contains(&k) {
                    free.push(k);
                }
            } else if claimed.contains(&k) {
                displaced.push(k);
            } else {
                dest[k] = Some(k);
            }
        }
        debug_assert_eq!(displaced.len(), free.len());
        // Greedy nearest free cell for each displaced robot.
        let cell = |k: usize| ((k as u32 % w) as i32, (k as u32 / w) as i32);
        let mut taken = vec![false; free.len()];
        for k in displaced {
            let (x, y) = cell(k);
            let best = (0..free.len())
                .filter(|&i| !taken[i])
                .min_by_key(|&i| {
                    let (fx, fy) = cell(free[i]);
                    ((fx - x).abs() + (fy - y).abs(), free[i])
                })
                .expect("a vacated cell remains");
            taken[best] = true;
            dest[k] = Some(free[best]);
        }
        RegionTask {
            w,
            h,
            robots,
            dest: dest.into_iter().map(|d| d.expect("complete permutation")).collect(),
        }
    }

    /// Full routing of each region so every robot reaches its target cell.
    pub fn route_to_targets(&mut self, regions: &[Rect]) -> Result<(), RouteError> {
        let moves = regions
            .iter()
            .map(|&rect| {
                let mut mv = Vec::new();
                for y in rect.y0..rect.y0 + rect.h as i32 {
                    for x in rect.x0..rect.x0 + rect.w as i32 {
                        let r = self.at(Pos::new(x, y));
                        let t = self.target[r as usize];
                        assert!(rect.contains(t), "robot {} not in its target region", r + 1);
                        mv.push((r, t));
                    }
                }
                (rect, mv)
            })
            .collect();
        self.permute_regions(moves)
    }

    pub fn config(&self) -> Configuration {
        self.sim.config()
    }
}
