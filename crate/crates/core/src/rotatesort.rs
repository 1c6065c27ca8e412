//! Permutation routing on fully occupied rectangles.
//!
//! Adjacent exchanges are realized with the 2x3 gadget (a BFS table over all
//! 720 arrangements of six robots). Disjoint exchanges are batched into the
//! twelve layer classes of 2x3 / 3x2 rectangles. A full permutation is routed
//! in three sorting passes (rows, columns, rows), each an odd-even
//! transposition sort whose rounds are realized as swap batches.

use std::collections::{HashMap, VecDeque};
use std::sync::OnceLock;

use thiserror::Error;

use crate::grid::{GridDims, Instance, Move, Pos, RobotId, Schedule, Step};
use crate::par;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RouteError {
    #[error("gadget instances must be 2x3 or 3x2, got {0}x{1}")]
    WrongDims(u32, u32),
    #[error("grid {0}x{1} admits unreachable permutations")]
    InfeasibleDims(u32, u32),
    #[error("rectangle is not fully occupied")]
    NotFullyOccupied,
    #[error("swap pairs overlap at {0}")]
    OverlappingSwaps(Pos),
    #[error("cells {0} and {1} are not adjacent")]
    NonAdjacentPair(Pos, Pos),
}

/// Cells of the canonical 3-wide, 2-tall gadget, indexed `y * 3 + x`.
const GADGET_CYCLES: [&[u8]; 3] = [&[0, 1, 4, 3], &[1, 2, 5, 4], &[0, 1, 2, 5, 4, 3]];

/// One rotation: cycle index and direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GadgetMove {
    pub cycle: u8,
    pub forward: bool,
}

impl GadgetMove {
    fn all() -> [GadgetMove; 6] {
        let mut out = [GadgetMove { cycle: 0, forward: true }; 6];
        for c in 0..3u8 {
            out[2 * c as usize] = GadgetMove { cycle: c, forward: true };
            out[2 * c as usize + 1] = GadgetMove { cycle: c, forward: false };
        }
        out
    }

    /// `(from, to)` cell pairs of the robots moved by this rotation.
    pub fn cell_moves(self) -> Vec<(u8, u8)> {
        let cyc = GADGET_CYCLES[self.cycle as usize];
        let k = cyc.len();
        (0..k)
            .map(|i| {
                if self.forward {
                    (cyc[i], cyc[(i + 1) % k])
                } else {
                    (cyc[(i + 1) % k], cyc[i])
                }
            })
            .collect()
    }

    fn apply(self, arr: [u8; 6]) -> [u8; 6] {
        let mut next = arr;
        for (from, to) in self.cell_moves() {
            next[to as usize] = arr[from as usize];
        }
        next
    }
}

/// Shortest rotation sequences for all 720 arrangements.
pub struct GadgetTable {
    /// arrangement -> (distance, parent arrangement, move from parent)
    nodes: HashMap<[u8; 6], (u8, [u8; 6], GadgetMove)>,
}

impl GadgetTable {
    fn build() -> Self {
        let id = [0u8, 1, 2, 3, 4, 5];
        let mut nodes = HashMap::with_capacity(720);
        nodes.insert(id, (0u8, id, GadgetMove { cycle: 0, forward: true }));
        let mut q = VecDeque::from([id]);
        while let Some(a) = q.pop_front() {
            let da = nodes[&a].0;
            for m in GadgetMove::all() {
                let b = m.apply(a);
                if let std::collections::hash_map::Entry::Vacant(e) = nodes.entry(b) {
                    e.insert((da + 1, a, m));
                    q.push_back(b);
                }
            }
        }
        GadgetTable { nodes }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn diameter(&self) -> usize {
        self.nodes.values().map(|v| v.0 as usize).max().unwrap_or(0)
    }

    /// `perm[c]` is the destination cell of the robot currently at cell `c`.
    pub fn distance(&self, perm: [u8; 6]) -> usize {
        self.nodes[&arrangement(perm)].0 as usize
    }

    pub fn moves(&self, perm: [u8; 6]) -> Vec<GadgetMove> {
        let mut a = arrangement(perm);
        let mut seq = Vec::new();
        loop {
            let (dist, parent, m) = self.nodes[&a];
            if dist == 0 {
                break;
            }
            seq.push(m);
            a = parent;
        }
        seq.reverse();
        seq
    }

    /// Every arrangement reachable from the identity, as destination maps.
    pub fn permutations(&self) -> Vec<[u8; 6]> {
        self.nodes
            .keys()
            .map(|arr| {
                let mut perm = [0u8; 6];
                for (cell, &orig) in arr.iter().enumerate() {
                    perm[orig as usize] = cell as u8;
                }
                perm
            })
            .collect()
    }
}

fn arrangement(perm: [u8; 6]) -> [u8; 6] {
    let mut arr = [0u8; 6];
    for (c, &dst) in perm.iter().enumerate() {
        arr[dst as usize] = c as u8;
    }
    arr
}

pub fn gadget_table() -> &'static GadgetTable {
    static TABLE: OnceLock<GadgetTable> = OnceLock::new();
    TABLE.get_or_init(GadgetTable::build)
}

/// Solves a fully occupied 2x3 or 3x2 instance by table lookup.
pub fn solve_small(inst: &Instance) -> Result<Schedule, RouteError> {
    let (w, h) = (inst.dims.n1, inst.dims.n2);
    if !((w == 3 && h == 2) || (w == 2 && h == 3)) {
        return Err(RouteError::WrongDims(w, h));
    }
    if !inst.is_full() {
        return Err(RouteError::NotFullyOccupied);
    }
    let mut board = Board::from_instance(inst);
    let dest = board_dest(&board, inst);
    let shape = if w == 3 { Shape::Wide } else { Shape::Tall };
    let rect = Rect { shape, x0: 0, y0: 0 };
    let mut perm = [0u8; 6];
    for (c, p) in perm.iter_mut().enumerate() {
        let cell = rect.cell(c as u8);
        let tok = board.token(cell);
        *p = rect.canonical(dest[tok as usize]).expect("target inside gadget");
    }
    let steps = board.run_gadget(rect, &gadget_table().moves(perm));
    Ok(Schedule::from_steps(steps))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Shape {
    /// 3 wide, 2 tall (canonical orientation).
    Wide,
    /// 2 wide, 3 tall (transposed).
    Tall,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Rect {
    shape: Shape,
    x0: i32,
    y0: i32,
}

impl Rect {
    fn size(shape: Shape) -> (i32, i32) {
        match shape {
            Shape::Wide => (3, 2),
            Shape::Tall => (2, 3),
        }
    }

    fn cell(&self, c: u8) -> Pos {
        let (cx, cy) = ((c % 3) as i32, (c / 3) as i32);
        match self.shape {
            Shape::Wide => Pos::new(self.x0 + cx, self.y0 + cy),
            Shape::Tall => Pos::new(self.x0 + cy, self.y0 + cx),
        }
    }

    fn canonical(&self, p: Pos) -> Option<u8> {
        let (dx, dy) = (p.x - self.x0, p.y - self.y0);
        let (cx, cy) = match self.shape {
            Shape::Wide => (dx, dy),
            Shape::Tall => (dy, dx),
        };
        if (0..3).contains(&cx) && (0..2).contains(&cy) {
            Some((cy * 3 + cx) as u8)
        } else {
            None
        }
    }
}

/// Layer class: shape plus origin residues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Layer {
    shape: Shape,
    ax: i32,
    ay: i32,
}

impl Layer {
    fn all() -> Vec<Layer> {
        let mut v = Vec::with_capacity(12);
        for ay in 0..2 {
            for ax in 0..3 {
                v.push(Layer { shape: Shape::Wide, ax, ay });
            }
        }
        for ay in 0..3 {
            for ax in 0..2 {
                v.push(Layer { shape: Shape::Tall, ax, ay });
            }
        }
        v
    }

    /// Rectangle of this class containing both cells, if it fits the board.
    fn rect_for(&self, a: Pos, b: Pos, w: i32, h: i32) -> Option<Rect> {
        let (rw, rh) = Rect::size(self.shape);
        let x0 = a.x - (a.x - self.ax).rem_euclid(rw);
        let y0 = a.y - (a.y - self.ay).rem_euclid(rh);
        if x0 < 0 || y0 < 0 || x0 + rw > w || y0 + rh > h {
            return None;
        }
        let r = Rect { shape: self.shape, x0, y0 };
        r.canonical(b)?;
        Some(r)
    }
}

/// Fully occupied rectangle of tokens; `ids[token]` is the global robot.
#[derive(Debug, Clone)]
pub(crate) struct Board {
    w: i32,
    h: i32,
    cell: Vec<u32>,
    ids: Vec<RobotId>,
}

impl Board {
    /// `robots[y * w + x]` is the robot at local cell (x, y).
    pub(crate) fn new(w: u32, h: u32, robots: Vec<RobotId>) -> Self {
        assert_eq!(robots.len(), (w * h) as usize);
        Board {
            w: w as i32,
            h: h as i32,
            cell: (0..robots.len() as u32).collect(),
            ids: robots,
        }
    }

    fn from_instance(inst: &Instance) -> Self {
        let occ = inst.start.occupancy();
        let robots = occ.into_iter().map(|r| r.expect("full")).collect();
        Board::new(inst.dims.n1, inst.dims.n2, robots)
    }

    fn idx(&self, p: Pos) -> usize {
        (p.y * self.w + p.x) as usize
    }

    fn pos(&self, i: usize) -> Pos {
        Pos::new(i as i32 % self.w, i as i32 / self.w)
    }

    fn token(&self, p: Pos) -> u32 {
        self.cell[self.idx(p)]
    }

    fn run_gadget(&mut self, rect: Rect, seq: &[GadgetMove]) -> Vec<Step> {
        let mut steps = Vec::with_capacity(seq.len());
        for m in seq {
            let cm = m.cell_moves();
            let mut moves = Vec::with_capacity(cm.len());
            let before: Vec<u32> = cm.iter().map(|&(f, _)| self.token(rect.cell(f))).collect();
            for (k, &(f, t)) in cm.iter().enumerate() {
                let (pf, pt) = (rect.cell(f), rect.cell(t));
                let mv = Move::between(pf, pt).expect("gadget cycle cells are adjacent");
                moves.push((self.ids[before[k] as usize], mv));
            }
            for (k, &(_, t)) in cm.iter().enumerate() {
                let i = self.idx(rect.cell(t));
                self.cell[i] = before[k];
            }
            steps.push(Step::from_moves(moves));
        }
        steps
    }

    /// Exchanges each pair of cells; all other robots end where they started.
    fn swap_batch(&mut self, swaps: &[(Pos, Pos)]) -> Vec<Step> {
        let table = gadget_table();
        let layers = Layer::all();
        let mut pending: Vec<(Pos, Pos)> = swaps.to_vec();
        let mut out = Vec::new();
        while !pending.is_empty() {
            // Greedy: the layer class covering the most pending swaps.
            let mut best: Option<(Layer, Vec<Option<Rect>>, usize)> = None;
            for layer in &layers {
                let rects: Vec<Option<Rect>> = pending
                    .iter()
                    .map(|&(a, b)| layer.rect_for(a, b, self.w, self.h))
                    .collect();
                let covered = rects.iter().filter(|r| r.is_some()).count();
                if covered > best.as_ref().map_or(0, |b| b.2) {
                    best = Some((*layer, rects, covered));
                }
            }
            let (_, rects, _) = best.expect("every adjacent pair lies in some gadget");
            let mut groups: Vec<(Rect, Vec<usize>)> = Vec::new();
            let mut index: HashMap<(i32, i32), usize> = HashMap::new();
            for (k, r) in rects.iter().enumerate() {
                if let Some(r) = r {
                    let g = *index.entry((r.x0, r.y0)).or_insert_with(|| {
                        groups.push((*r, Vec::new()));
                        groups.len() - 1
                    });
                    groups[g].1.push(k);
                }
            }
            let mut parts = Vec::with_capacity(groups.len());
            for (rect, ks) in &groups {
                let mut perm = [0u8, 1, 2, 3, 4, 5];
                for &k in ks {
                    let (a, b) = pending[k];
                    let (ca, cb) = (rect.canonical(a).unwrap(), rect.canonical(b).unwrap());
                    perm.swap(ca as usize, cb as usize);
                }
                let seq = table.moves(perm);
                parts.push(Schedule::from_steps(self.run_gadget(*rect, &seq)));
            }
            out.extend(Schedule::merge_parallel(parts).steps);
            pending = pending
                .into_iter()
                .zip(rects)
                .filter(|(_, r)| r.is_none())
                .map(|(s, _)| s)
                .collect();
        }
        out
    }

    /// Odd-even transposition sort on every line simultaneously. `lines`
    /// lists cell indices in order; `key` gives each token's desired rank.
    fn sort_lines(&mut self, lines: &[Vec<usize>], key: &[u32]) -> Vec<Step> {
        let mut out = Vec::new();
        let mut idle = 0;
        let mut parity = 0;
        while idle < 2 {
            let mut swaps = Vec::new();
            for line in lines {
                let mut i = parity;
                while i + 1 < line.len() {
                    let (a, b) = (line[i], line[i + 1]);
                    if key[self.cell[a] as usize] > key[self.cell[b] as usize] {
                        swaps.push((self.pos(a), self.pos(b)));
                    }
                    i += 2;
                }
            }
            if swaps.is_empty() {
                idle += 1;
            } else {
                idle = 0;
                out.extend(self.swap_batch(&swaps));
            }
            parity ^= 1;
        }
        out
    }

    /// Routes every token to `dest[token]` (a cell index).
    fn route(&mut self, dest: &[usize]) -> Vec<Step> {
        let (w, h) = (self.w as usize, self.h as usize);
        let n = w * h;
        let mut row = vec![0usize; n];
        let mut col = vec![0usize; n];
        for i in 0..n {
            let t = self.cell[i] as usize;
            row[t] = i / w;
            col[t] = i % w;
        }
        let trow: Vec<usize> = (0..n).map(|t| dest[t] / w).collect();
        let tcol: Vec<usize> = (0..n).map(|t| dest[t] % w).collect();
        let color = edge_coloring(w, h, &row, &col, &trow);

        let rows: Vec<Vec<usize>> = (0..h).map(|y| (0..w).map(|x| y * w + x).collect()).collect();
        let cols: Vec<Vec<usize>> = (0..w).map(|x| (0..h).map(|y| y * w + x).collect()).collect();
        let k1: Vec<u32> = color.iter().map(|&c| c as u32).collect();
        let k2: Vec<u32> = trow.iter().map(|&c| c as u32).collect();
        let k3: Vec<u32> = tcol.iter().map(|&c| c as u32).collect();
        let mut steps = self.sort_lines(&rows, &k1);
        steps.extend(self.sort_lines(&cols, &k2));
        steps.extend(self.sort_lines(&rows, &k3));
        debug_assert!((0..n).all(|i| dest[self.cell[i] as usize] == i));
        steps
    }
}

/// Colors the bipartite multigraph (start row -> target row, one edge per
/// token) with `w` colors so that each row sees every color once. Colors are
/// assigned in increasing order; each color class is a perfect matching that
/// uses the leftmost remaining tokens possible, so tokens keep a color close
/// to their column.
fn edge_coloring(w: usize, h: usize, row: &[usize], col: &[usize], trow: &[usize]) -> Vec<usize> {
    let n = row.len();
    let mut color = vec![usize::MAX; n];
    let mut remaining: Vec<Vec<usize>> = vec![Vec::with_capacity(w); h];
    for t in 0..n {
        remaining[row[t]].push(t);
    }
    for r in remaining.iter_mut() {
        r.sort_by_key(|&t| col[t]);
    }
    struct Kuhn<'a> {
        remaining: &'a [Vec<usize>],
        col: &'a [usize],
        trow: &'a [usize],
        row: &'a [usize],
        limit: usize,
        visited: Vec<bool>,
        by_target: Vec<Option<usize>>,
    }
    impl Kuhn<'_> {
        fn augment(&mut self, u: usize) -> bool {
            for i in 0..self.remaining[u].len() {
                let t = self.remaining[u][i];
                if self.col[t] > self.limit {
                    break;
                }
                let v = self.trow[t];
                if self.visited[v] {
                    continue;
                }
                self.visited[v] = true;
                let free = match self.by_target[v] {
                    None => true,
                    Some(o) => self.augment(self.row[o]),
                };
                if free {
                    self.by_target[v] = Some(t);
                    return true;
                }
            }
            false
        }
    }
    for c in 0..w {
        let mut k = Kuhn {
            remaining: &remaining,
            col,
            trow,
            row,
            limit: c,
            visited: vec![false; h],
            by_target: vec![None; h],
        };
        let mut unmatched: Vec<usize> = (0..h).collect();
        loop {
            unmatched.retain(|&u| {
                k.visited.iter_mut().for_each(|x| *x = false);
                !k.augment(u)
            });
            if unmatched.is_empty() {
                break;
            }
            k.limit += 1;
            debug_assert!(k.limit < w + col.iter().max().copied().unwrap_or(0) + 1, "regular multigraph has a perfect matching");
        }
        let chosen: Vec<usize> = k.by_target.iter().map(|t| t.expect("perfect matching")).collect();
        for t in chosen {
            color[t] = c;
            let r = &mut remaining[row[t]];
            let i = r.iter().position(|&x| x == t).unwrap();
            r.remove(i);
        }
    }
    color
}

fn board_dest(board: &Board, inst: &Instance) -> Vec<Pos> {
    let mut dest = vec![Pos::new(0, 0); board.ids.len()];
    for (tok, &r) in board.ids.iter().enumerate() {
        dest[tok] = inst.target.positions[r as usize];
    }
    dest
}

fn check_dims(w: u32, h: u32) -> Result<(), RouteError> {
    if GridDims::new(w, h).is_degenerate() {
        Err(RouteError::InfeasibleDims(w, h))
    } else {
        Ok(())
    }
}

/// Batch of disjoint adjacent exchanges on a fully occupied grid.
pub fn swap_batch(
    config: &crate::grid::Configuration,
    swaps: &[(Pos, Pos)],
) -> Result<Schedule, RouteError> {
    if !config.is_full() {
        return Err(RouteError::NotFullyOccupied);
    }
    let mut used = std::collections::HashSet::new();
    for &(a, b) in swaps {
        if a.manhattan(b) != 1 || !config.dims.contains(a) || !config.dims.contains(b) {
            return Err(RouteError::NonAdjacentPair(a, b));
        }
        for p in [a, b] {
            if !used.insert(p) {
                return Err(RouteError::OverlappingSwaps(p));
            }
        }
    }
    if swaps.is_empty() {
        return Ok(Schedule::new());
    }
    check_dims(config.dims.n1, config.dims.n2)?;
    let robots = config.occupancy().into_iter().map(|r| r.unwrap()).collect();
    let mut board = Board::new(config.dims.n1, config.dims.n2, robots);
    Ok(Schedule::from_steps(board.swap_batch(swaps)))
}

/// Routes a fully occupied instance to its target.
pub fn plan_rotatesort(inst: &Instance) -> Result<Schedule, RouteError> {
    if !inst.is_full() {
        return Err(RouteError::NotFullyOccupied);
    }
    if inst.start == inst.target {
        return Ok(Schedule::new());
    }
    check_dims(inst.dims.n1, inst.dims.n2)?;
    let mut board = Board::from_instance(inst);
    let dest: Vec<usize> = board_dest(&board, inst).iter().map(|&p| board.idx(p)).collect();
    Ok(Schedule::from_steps(board.route(&dest)))
}

/// One rectangular region to permute: `robots[y*w+x]` at local cell (x,y),
/// `dest[k]` the local destination cell index of the robot at cell `k`.
#[derive(Debug, Clone)]
pub(crate) struct RegionTask {
    pub w: u32,
    pub h: u32,
    pub robots: Vec<RobotId>,
    pub dest: Vec<usize>,
}

/// Routes independent regions in parallel and merges their steps.
pub(crate) fn route_regions(tasks: Vec<RegionTask>) -> Result<Schedule, RouteError> {
    let parts = par::map(tasks, |t| -> Result<Schedule, RouteError> {
        if t.dest.iter().enumerate().all(|(k, &d)| k == d) {
            return Ok(Schedule::new());
        }
        check_dims(t.w, t.h)?;
        let mut board = Board::new(t.w, t.h, t.robots);
        Ok(Schedule::from_steps(board.route(&t.dest)))
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>, _>>()?;
    Ok(Schedule::merge_parallel(parts))
}
