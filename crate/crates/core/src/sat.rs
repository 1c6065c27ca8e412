//! Hard instances from monotone 3-SAT, with witness schedules for
//! satisfying assignments.
//!
//! Layout, with `M = 6n(m+2)`: variable robot `j` runs along row `6j` from
//! `(0,6j)` to `(M-2,6j)`, pinned by a left auxiliary falling down column 1
//! and a right auxiliary rising up column `M-3`. It either waits in the
//! first step (true) or detours one row up (false). Clause `i` has three
//! checkers starting on row `-6ni-f` that cross the variable rows exactly
//! when their variable passes, so a checker has to wait once iff its
//! literal is false. The first two checkers are pushed right by falling
//! auxiliaries before they may climb; the resulting stagger lets the clause
//! robot, which must move in every step, cross the three columns iff some
//! checker did not wait.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::generate::GenError;
use crate::grid::{GridDims, Instance, Move, Pos, Schedule, Step};

/// A CNF formula. Literals are DIMACS style: `v` or `-v` for variable `v-1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cnf {
    pub vars: usize,
    pub clauses: Vec<Vec<i32>>,
}

impl Cnf {
    /// Parses DIMACS: comment lines start with `c`, an optional `p cnf V C`
    /// header, clauses are literal lists terminated by `0`.
    pub fn parse_dimacs(text: &str) -> Result<Cnf, GenError> {
        let mut vars = None;
        let mut clauses = Vec::new();
        let mut cur = Vec::new();
        for line in text.lines() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('c') || line.starts_with('%') {
                continue;
            }
            if let Some(rest) = line.strip_prefix('p') {
                let f: Vec<&str> = rest.split_whitespace().collect();
                if f.len() != 3 || f[0] != "cnf" {
                    return Err(GenError::Parse(format!("bad header: {line}")));
                }
                vars = Some(f[1].parse::<usize>().map_err(|e| GenError::Parse(e.to_string()))?);
                continue;
            }
            for tok in line.split_whitespace() {
                let l: i32 = tok.parse().map_err(|_| GenError::Parse(format!("bad literal: {tok}")))?;
                if l == 0 {
                    clauses.push(std::mem::take(&mut cur));
                } else {
                    cur.push(l);
                }
            }
        }
        if !cur.is_empty() {
            clauses.push(cur);
        }
        let used = clauses.iter().flatten().map(|l| l.unsigned_abs() as usize).max().unwrap_or(0);
        Ok(Cnf { vars: vars.unwrap_or(used).max(used), clauses })
    }

    pub fn to_dimacs(&self) -> String {
        let mut s = format!("p cnf {} {}\n", self.vars, self.clauses.len());
        for c in &self.clauses {
            for l in c {
                s.push_str(&format!("{l} "));
            }
            s.push_str("0\n");
        }
        s
    }

    pub fn satisfies(&self, a: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|&l| lit_true(l, a)))
    }

    /// Checks monotonicity and arity; returns the sorted variable triples.
    fn monotone_triples(&self) -> Result<Vec<([usize; 3], bool)>, GenError> {
        self.clauses
            .iter()
            .enumerate()
            .map(|(i, c)| {
                if c.len() != 3 || c.iter().any(|l| l.unsigned_abs() as usize > self.vars) {
                    return Err(GenError::BadArity(i));
                }
                let pos = c[0] > 0;
                if c.iter().any(|&l| (l > 0) != pos) {
                    return Err(GenError::NotMonotone(i));
                }
                let mut v = [0; 3];
                for (k, l) in c.iter().enumerate() {
                    v[k] = l.unsigned_abs() as usize - 1;
                }
                v.sort_unstable();
                if v[0] == v[1] || v[1] == v[2] {
                    return Err(GenError::BadArity(i));
                }
                Ok((v, !pos))
            })
            .collect()
    }
}

fn lit_true(l: i32, a: &[bool]) -> bool {
    a[l.unsigned_abs() as usize - 1] == (l > 0)
}

/// Satisfying assignment by exhaustive search with clause pruning, or `None`.
pub fn solve_sat(f: &Cnf) -> Option<Vec<bool>> {
    fn go(f: &Cnf, a: &mut Vec<bool>, k: usize) -> bool {
        // Prune clauses whose variables are all assigned and all false.
        let dead = f.clauses.iter().any(|c| {
            c.iter().all(|&l| (l.unsigned_abs() as usize) <= k) && !c.iter().any(|&l| lit_true(l, a))
        });
        if dead {
            return false;
        }
        if k == f.vars {
            return true;
        }
        for v in [true, false] {
            a.push(v);
            if go(f, a, k + 1) {
                return true;
            }
            a.pop();
        }
        false
    }
    let mut a = Vec::with_capacity(f.vars);
    go(f, &mut a, 0).then_some(a)
}

/// Random monotone 3-CNF over `vars >= 3` variables.
pub fn gen_monotone_cnf(vars: usize, clauses: usize, seed: u64) -> Cnf {
    assert!(vars >= 3, "three distinct variables per clause");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<i32> = (1..=vars as i32).collect();
    let clauses = (0..clauses)
        .map(|_| {
            let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
            all.choose_multiple(&mut rng, 3).map(|&v| sign * v).collect()
        })
        .collect();
    Cnf { vars, clauses }
}

/// Role of a robot in the reduction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Role {
    Variable(usize),
    LeftAux(usize),
    RightAux(usize),
    /// Clause index (from 1) and literal position.
    Checker(usize, usize),
    /// Clause, literal position and column offset.
    SideStep(usize, usize, usize),
    Clause(usize),
}

impl Role {
    /// Three classes suffice: variables, checkers, everything else.
    pub fn color(self) -> u32 {
        match self {
            Role::Variable(_) => 1,
            Role::Checker(..) => 2,
            _ => 3,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SatInstance {
    pub instance: Instance,
    /// Critical makespan `6n(m+2)`.
    pub makespan: usize,
    pub roles: Vec<Role>,
    pub witness: Option<Schedule>,
}

struct Robot {
    role: Role,
    start: (i64, i64),
    target: (i64, i64),
    moves: Vec<Move>,
}

fn repeat(m: Move, k: i64) -> impl Iterator<Item = Move> {
    std::iter::repeat_n(m, k.max(0) as usize)
}

/// Builds the reduction instance for `f`. With a satisfying `assignment`
/// the witness schedule of makespan exactly `M` is attached.
pub fn gen_sat_instance(f: &Cnf, assignment: Option<&[bool]>) -> Result<SatInstance, GenError> {
    let triples = f.monotone_triples()?;
    if let Some(a) = assignment {
        if a.len() != f.vars {
            return Err(GenError::BadArity(0));
        }
        if let Some(i) = f.clauses.iter().position(|c| !c.iter().any(|&l| lit_true(l, a))) {
            return Err(GenError::Unsatisfied(i));
        }
    }
    let n = f.vars as i64;
    let m = triples.len() as i64;
    let big_m = 6 * n * (m + 2);
    let value = |j: usize| assignment.is_none_or(|a| a[j]);
    let mut robots: Vec<Robot> = Vec::new();
    for j in 0..n {
        let ju = j as usize;
        let moves = if value(ju) {
            std::iter::once(Move::Wait).chain(repeat(Move::East, big_m - 2)).chain([Move::Wait]).collect()
        } else {
            std::iter::once(Move::North).chain(repeat(Move::East, big_m - 2)).chain([Move::South]).collect()
        };
        robots.push(Robot { role: Role::Variable(ju), start: (0, 6 * j), target: (big_m - 2, 6 * j), moves });
        robots.push(Robot {
            role: Role::LeftAux(ju),
            start: (1, 6 * j + 1),
            target: (1, 6 * j + 1 - big_m),
            moves: repeat(Move::South, big_m).collect(),
        });
        robots.push(Robot {
            role: Role::RightAux(ju),
            start: (big_m - 3, 6 * j + 1 - big_m),
            target: (big_m - 3, 6 * j + 1),
            moves: repeat(Move::North, big_m).collect(),
        });
    }
    for (ci, &(v, negative)) in triples.iter().enumerate() {
        let i = ci as i64 + 1;
        let fi = negative as i64;
        let y0 = -6 * n * i - fi;
        let d1 = 6 * (v[2] as i64 - v[0] as i64);
        let d2 = 6 * (v[2] as i64 - v[1] as i64);
        let side = [d1 / 2 + 2, d2 / 2 + 1, 0];
        let mut cols = [0i64; 3];
        let mut waited = [false; 3];
        for l in 0..3 {
            let x0 = 6 * (n * i + v[l] as i64);
            let s = side[l];
            cols[l] = x0 + s;
            let literal_true = value(v[l]) != negative;
            waited[l] = !literal_true;
            // Climb after the side steps, waiting once just before the
            // variable row if the literal is false.
            let mut moves: Vec<Move> = repeat(Move::East, s).chain(repeat(Move::North, big_m - 1 - s)).collect();
            if waited[l] {
                moves.insert((cols[l] - 1) as usize, Move::Wait);
            } else {
                moves.push(Move::Wait);
            }
            robots.push(Robot {
                role: Role::Checker(ci + 1, l),
                start: (x0, y0),
                target: (x0 + s, y0 + big_m - 1 - s),
                moves,
            });
            for q in 0..s {
                robots.push(Robot {
                    role: Role::SideStep(ci + 1, l, q as usize),
                    start: (x0 + q, y0 + q + 2),
                    target: (x0 + q, y0 + q + 2 - big_m),
                    moves: repeat(Move::South, big_m).collect(),
                });
            }
        }
        let (c1, c3) = (cols[0], cols[2]);
        let y1 = y0 + big_m - 1 - side[0];
        // Down moves before the first column whose checker was on time.
        let moves: Vec<Move> = if !waited[2] {
            repeat(Move::West, big_m - 4).chain([Move::South, Move::South, Move::West, Move::West]).collect()
        } else if !waited[1] {
            repeat(Move::West, big_m - 6 - (c3 - c1))
                .chain([Move::South])
                .chain(repeat(Move::West, c3 - c1 + 2))
                .chain([Move::South, Move::West, Move::West])
                .collect()
        } else {
            [Move::South, Move::South].into_iter().chain(repeat(Move::West, big_m - 2)).collect()
        };
        robots.push(Robot { role: Role::Clause(ci + 1), start: (c1 + big_m - 5, y1 - 1), target: (c1 - 3, y1 - 3), moves });
    }

    let pts = robots.iter().flat_map(|r| [r.start, r.target]);
    let (mut x0, mut y0, mut x1, mut y1) = (i64::MAX, i64::MAX, i64::MIN, i64::MIN);
    for (x, y) in pts {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    // One free cell around everything.
    let dims = GridDims::new((x1 - x0 + 3) as u32, (y1 - y0 + 3) as u32);
    let at = |(x, y): (i64, i64)| Pos::new((x - x0 + 1) as i32, (y - y0 + 1) as i32);
    let mut instance = Instance::new(
        dims,
        robots.iter().map(|r| at(r.start)).collect(),
        robots.iter().map(|r| at(r.target)).collect(),
    )
    .expect("reduction places robots on distinct cells");
    instance.colors = Some(robots.iter().map(|r| r.role.color()).collect());
    let witness = assignment.map(|_| {
        let steps = (0..big_m as usize)
            .map(|t| {
                Step::from_moves(
                    robots
                        .iter()
                        .enumerate()
                        .filter(|(_, r)| r.moves[t] != Move::Wait)
                        .map(|(k, r)| (k as u32, r.moves[t]))
                        .collect(),
                )
            })
            .collect();
        Schedule::from_steps(steps)
    });
    Ok(SatInstance { instance, makespan: big_m as usize, roles: robots.iter().map(|r| r.role).collect(), witness })
}
