//! Exact optimal makespan by breadth-first search over configurations.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use thiserror::Error;

use crate::grid::{GridDims, Instance, Move, Pos, Schedule, Step};

/// Largest configuration-space index range the oracle accepts (`cells^k`).
pub const STATE_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("configuration space of {cells} cells and {robots} robots exceeds the budget")]
    BudgetExceeded { cells: usize, robots: usize },
}

const MOVES: [Move; 5] = [Move::Wait, Move::North, Move::East, Move::South, Move::West];

/// Every configuration of `k` labeled robots on a grid, with the one-step
/// successor relation stored in compressed rows.
pub struct OracleSpace {
    dims: GridDims,
    k: usize,
    offsets: Vec<u32>,
    /// `(successor state, move combination)`.
    edges: Vec<(u32, u16)>,
}

impl OracleSpace {
    pub fn new(dims: GridDims, k: usize) -> Result<Self, OracleError> {
        let cells = dims.cells();
        let size = cells.checked_pow(k as u32).filter(|&s| s <= STATE_BUDGET);
        let size = size.ok_or(OracleError::BudgetExceeded { cells, robots: k })?;
        let combos = 5usize.pow(k as u32);
        let mut offsets = Vec::with_capacity(size + 1);
        let mut edges = Vec::new();
        let mut cur = vec![Pos::new(0, 0); k];
        let mut next = vec![Pos::new(0, 0); k];
        offsets.push(0);
        for s in 0..size {
            if decode(dims, k, s, &mut cur) {
                'combo: for c in 0..combos {
                    let mut cc = c;
                    for i in 0..k {
                        let p = cur[i].step(MOVES[cc % 5]);
                        cc /= 5;
                        if !dims.contains(p) {
                            continue 'combo;
                        }
                        next[i] = p;
                    }
                    for i in 0..k {
                        for j in i + 1..k {
                            if next[i] == next[j] || (next[i] == cur[j] && next[j] == cur[i]) {
                                continue 'combo;
                            }
                        }
                    }
                    edges.push((encode(dims, &next) as u32, c as u16));
                }
            }
            offsets.push(edges.len() as u32);
        }
        Ok(OracleSpace { dims, k, offsets, edges })
    }

    pub fn states(&self) -> usize {
        self.offsets.len() - 1
    }

    fn bfs(&self, from: usize, to: usize, cap: u32) -> Option<Vec<(u32, u16)>> {
        let n = self.states();
        let mut parent: Vec<(u32, u16)> = vec![(u32::MAX, 0); n];
        let mut depth = vec![u32::MAX; n];
        depth[from] = 0;
        let mut frontier = vec![from];
        let mut level = 0;
        while depth[to] == u32::MAX && !frontier.is_empty() && level < cap {
            let mut nf = Vec::new();
            for &s in &frontier {
                for &(t, c) in &self.edges[self.offsets[s] as usize..self.offsets[s + 1] as usize] {
                    if depth[t as usize] == u32::MAX {
                        depth[t as usize] = level + 1;
                        parent[t as usize] = (s as u32, c);
                        nf.push(t as usize);
                    }
                }
            }
            frontier = nf;
            level += 1;
        }
        if depth[to] == u32::MAX {
            return None;
        }
        let mut path = Vec::new();
        let mut s = to;
        while s != from {
            let (p, c) = parent[s];
            path.push((p, c));
            s = p as usize;
        }
        path.reverse();
        Some(path)
    }

    /// Minimum number of steps from `start` to `target`, or `None` beyond `cap`.
    pub fn distance(&self, start: &[Pos], target: &[Pos], cap: u32) -> Option<u32> {
        self.bfs(encode(self.dims, start), encode(self.dims, target), cap).map(|p| p.len() as u32)
    }

    /// An optimal schedule, or `None` beyond `cap`.
    pub fn solve(&self, start: &[Pos], target: &[Pos], cap: u32) -> Option<Schedule> {
        let path = self.bfs(encode(self.dims, start), encode(self.dims, target), cap)?;
        let mut s = Schedule::new();
        for (_, c) in path {
            let mut cc = c as usize;
            let moves = (0..self.k)
                .map(|i| {
                    let m = MOVES[cc % 5];
                    cc /= 5;
                    (i as u32, m)
                })
                .collect();
            s.push(Step::from_moves(moves));
        }
        Some(s)
    }
}

fn encode(dims: GridDims, pos: &[Pos]) -> usize {
    pos.iter().rev().fold(0, |acc, &p| acc * dims.cells() + dims.index(p))
}

/// Fills `out` with the positions of state `s`; false if two robots share a cell.
fn decode(dims: GridDims, k: usize, mut s: usize, out: &mut [Pos]) -> bool {
    let cells = dims.cells();
    for o in out.iter_mut().take(k) {
        *o = dims.pos(s % cells);
        s /= cells;
    }
    (0..k).all(|i| (i + 1..k).all(|j| out[i] != out[j]))
}

type SpaceCache = Mutex<HashMap<(u32, u32, usize), Arc<OracleSpace>>>;

fn space(dims: GridDims, k: usize) -> Result<Arc<OracleSpace>, OracleError> {
    static CACHE: OnceLock<SpaceCache> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = (dims.n1, dims.n2, k);
    if let Some(s) = cache.lock().unwrap().get(&key) {
        return Ok(s.clone());
    }
    let s = Arc::new(OracleSpace::new(dims, k)?);
    cache.lock().unwrap().insert(key, s.clone());
    Ok(s)
}

/// Exact optimal makespan, `Ok(None)` if it exceeds `cap`.
pub fn optimal_makespan(inst: &Instance, cap: u32) -> Result<Option<u32>, OracleError> {
    if inst.start == inst.target {
        return Ok(Some(0));
    }
    Ok(space(inst.dims, inst.robots())?.distance(&inst.start.positions, &inst.target.positions, cap))
}

/// An optimal schedule, `Ok(None)` if the optimum exceeds `cap` or the target is unreachable.
pub fn optimal_schedule(inst: &Instance, cap: u32) -> Result<Option<Schedule>, OracleError> {
    if inst.start == inst.target {
        return Ok(Some(Schedule::new()));
    }
    Ok(space(inst.dims, inst.robots())?.solve(&inst.start.positions, &inst.target.positions, cap))
}
