//! Instance generators.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::continuous::{dist, ContinuousInstance, Point};
use crate::grid::{GridDims, Instance, Pos};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("cannot place {robots} robots on a {n1}x{n2} grid")]
    InfeasibleParams { robots: usize, n1: u32, n2: u32 },
    #[error("clause {0} mixes positive and negative literals")]
    NotMonotone(usize),
    #[error("clause {0} does not have three literals over known variables")]
    BadArity(usize),
    #[error("assignment leaves clause {0} unsatisfied")]
    Unsatisfied(usize),
    #[error("malformed CNF: {0}")]
    Parse(String),
    #[error("could not pack {0} disks at the requested separation")]
    Packing(usize),
}

/// Random permutation of all cells made of disjoint cycles, each inside a
/// box whose half-perimeter is at most `d_max`.
fn local_cycles(dims: GridDims, d_max: u32, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let n = dims.cells();
    let mut perm: Vec<usize> = (0..n).collect();
    if d_max == 0 || n < 2 {
        return perm;
    }
    let mut used = vec![false; n];
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for &c in &order {
        if used[c] {
            continue;
        }
        let a = d_max / 2 + 1;
        let b = d_max - (a - 1) + 1;
        let (bw, bh) = if rng.gen_bool(0.5) { (a, b) } else { (b, a) };
        let (bw, bh) = (bw.min(dims.n1), bh.min(dims.n2));
        let p = dims.pos(c);
        let x0 = (p.x - rng.gen_range(0..bw) as i32).clamp(0, (dims.n1 - bw) as i32);
        let y0 = (p.y - rng.gen_range(0..bh) as i32).clamp(0, (dims.n2 - bh) as i32);
        let mut cells: Vec<usize> = (0..bh as i32)
            .flat_map(|dy| (0..bw as i32).map(move |dx| Pos::new(x0 + dx, y0 + dy)))
            .map(|q| dims.index(q))
            .filter(|&k| k != c && !used[k])
            .collect();
        cells.shuffle(rng);
        let len = rng.gen_range(0..=cells.len().min(5));
        let mut cycle = vec![c];
        cycle.extend_from_slice(&cells[..len]);
        for &k in &cycle {
            used[k] = true;
        }
        for i in 0..cycle.len() {
            perm[cycle[i]] = cycle[(i + 1) % cycle.len()];
        }
    }
    perm
}

/// Deterministic random instance with `robots` robots and `max_distance <= d_max`.
/// Robots on a full grid follow disjoint local cycles; on a partial grid they
/// are a random subset of the tokens of such a permutation.
pub fn gen_random(dims: GridDims, robots: usize, d_max: u32, seed: u64) -> Result<Instance, GenError> {
    let n = dims.cells();
    if robots > n {
        return Err(GenError::InfeasibleParams { robots, n1: dims.n1, n2: dims.n2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = if robots == n && dims.is_degenerate() { 0 } else { d_max };
    let perm = local_cycles(dims, d, &mut rng);
    let mut cells: Vec<usize> = (0..n).collect();
    if robots < n {
        cells.shuffle(&mut rng);
        cells.truncate(robots);
    }
    let start: Vec<Pos> = cells.iter().map(|&c| dims.pos(c)).collect();
    let mut target: Vec<Pos> = cells.iter().map(|&c| dims.pos(perm[c])).collect();
    if dims.n1 == 1 || dims.n2 == 1 {
        // Robots on a line keep their order; the sorted matching does not
        // increase the largest distance.
        let mut by_start: Vec<usize> = (0..robots).collect();
        by_start.sort_by_key(|&r| dims.index(start[r]));
        let mut sorted = target.clone();
        sorted.sort_by_key(|&p| dims.index(p));
        for (i, r) in by_start.into_iter().enumerate() {
            target[r] = sorted[i];
        }
    } else if dims.is_degenerate() && robots < n {
        target = random_walk(dims, &start, d_max, &mut rng);
    }
    Ok(Instance::new(dims, start, target).expect("permutation yields valid configurations"))
}

/// Targets reached by single-robot moves into free cells, staying within `d_max`.
fn random_walk(dims: GridDims, start: &[Pos], d_max: u32, rng: &mut ChaCha8Rng) -> Vec<Pos> {
    let mut pos = start.to_vec();
    for _ in 0..8 * dims.cells() {
        let r = rng.gen_range(0..pos.len());
        let dirs = [(1, 0), (-1, 0), (0, 1), (0, -1)];
        let (dx, dy) = dirs[rng.gen_range(0..4)];
        let p = Pos::new(pos[r].x + dx, pos[r].y + dy);
        if dims.contains(p) && !pos.contains(&p) && p.manhattan(start[r]) <= d_max {
            pos[r] = p;
        }
    }
    pos
}

/// Centers of a hexagonal packing of touching unit disks, ring by ring;
/// ring `k` holds `6k` consecutive neighbors.
fn hex_slots(n: usize) -> Vec<(usize, Point)> {
    let s3 = 3f64.sqrt();
    let dirs = [[2.0, 0.0], [1.0, s3], [-1.0, s3], [-2.0, 0.0], [-1.0, -s3], [1.0, -s3]];
    let mut out = vec![(0, [0.0, 0.0])];
    let mut k = 1;
    while out.len() < n + 1 {
        let mut p = [dirs[4][0] * k as f64, dirs[4][1] * k as f64];
        for d in dirs {
            for _ in 0..k {
                out.push((k, p));
                p = [p[0] + d[0], p[1] + d[1]];
            }
        }
        k += 1;
    }
    out
}

/// Densely packed instance: `n` touching disks in a hexagonal packing
/// filled ring by ring, every ring turned by one slot, alternating between
/// counterclockwise and clockwise. Each robot moves to a neighboring slot,
/// so `d = 2`. An incomplete outer ring advances along its filled arc into
/// the next free slot; a single disk moves to its right neighbor.
pub fn gen_hex(n: usize) -> ContinuousInstance {
    if n == 0 {
        return ContinuousInstance { start: Vec::new(), target: Vec::new() };
    }
    if n == 1 {
        return ContinuousInstance { start: vec![[0.0, 0.0]], target: vec![[2.0, 0.0]] };
    }
    let slots = hex_slots(n);
    let start: Vec<Point> = slots[..n].iter().map(|s| s.1).collect();
    let mut target = start.clone();
    let mut i = 1;
    while i < n {
        let k = slots[i].0;
        let len = 6 * k;
        let filled = len.min(n - i);
        for q in 0..filled {
            let to = if filled < len || k % 2 == 1 { (q + 1) % len } else { (q + len - 1) % len };
            target[i + q] = slots[i + to].1;
        }
        i += len;
    }
    ContinuousInstance { start, target }
}

/// Random points in a `side x side` square, pairwise at least `sep` apart.
fn dart_throw(n: usize, sep: f64, side: f64, rng: &mut ChaCha8Rng) -> Result<Vec<Point>, GenError> {
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    let mut tries = 0;
    while pts.len() < n {
        tries += 1;
        if tries > 1000 * (n + 10) {
            return Err(GenError::Packing(n));
        }
        let p = [rng.gen_range(0.0..side), rng.gen_range(0.0..side)];
        if pts.iter().all(|&q| dist(p, q) >= sep) {
            pts.push(p);
        }
    }
    Ok(pts)
}

/// Random continuous instance: starts and targets drawn independently in a
/// square of side `side`, each set pairwise at least `sep` apart, matched
/// at random.
pub fn gen_continuous(n: usize, sep: f64, side: f64, seed: u64) -> Result<ContinuousInstance, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = dart_throw(n, sep, side, &mut rng)?;
    let mut target = dart_throw(n, sep, side, &mut rng)?;
    target.shuffle(&mut rng);
    Ok(ContinuousInstance { start, target })
}
