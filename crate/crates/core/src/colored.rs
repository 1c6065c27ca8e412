//! Colored robots: any robot of a color may take any target cell of that
//! color. Reduced to the labeled problem by per-color bottleneck matching.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid::{GridDims, Instance, Pos, RobotId, Schedule};
use crate::matching;
use crate::par;
use crate::scheduler::{plan_full, PlanError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ColorError {
    #[error("images have different dimensions")]
    DimsMismatch,
    #[error("point sets differ in size ({0} vs {1})")]
    SizeMismatch(usize, usize),
    #[error("color classes differ in size")]
    Incompatible,
    #[error(transparent)]
    Plan(#[from] PlanError),
}

/// Colors per cell, indexed like [`GridDims::index`]; 0 marks an empty cell.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Image {
    pub dims: GridDims,
    pub cells: Vec<u32>,
}

impl Image {
    pub fn empty(dims: GridDims) -> Self {
        Image { dims, cells: vec![0; dims.cells()] }
    }

    pub fn get(&self, p: Pos) -> u32 {
        self.cells[self.dims.index(p)]
    }

    pub fn set(&mut self, p: Pos, c: u32) {
        let i = self.dims.index(p);
        self.cells[i] = c;
    }

    pub fn colors(&self) -> u32 {
        self.cells.iter().copied().max().unwrap_or(0)
    }

    /// Cells of color `c` in index order.
    pub fn class(&self, c: u32) -> Vec<Pos> {
        (0..self.cells.len()).filter(|&i| self.cells[i] == c).map(|i| self.dims.pos(i)).collect()
    }

    fn histogram(&self) -> Vec<usize> {
        let mut h = vec![0; self.colors() as usize + 1];
        for &c in &self.cells {
            h[c as usize] += 1;
        }
        h
    }
}

pub fn check_compatible(is: &Image, it: &Image) -> Result<bool, ColorError> {
    if is.dims != it.dims {
        return Err(ColorError::DimsMismatch);
    }
    Ok(is.histogram() == it.histogram())
}

/// Bottleneck value and, for each point of `a`, the index of its partner in `b`.
pub fn bottleneck_matching(a: &[Pos], b: &[Pos]) -> Result<(u32, Vec<usize>), ColorError> {
    if a.len() != b.len() {
        return Err(ColorError::SizeMismatch(a.len(), b.len()));
    }
    Ok(matching::bottleneck(a, b))
}

/// Labeled reduction of a colored instance.
#[derive(Debug, Clone)]
pub struct ColoredPlan {
    /// The colored robots as labeled robots, numbered by start cell index.
    pub instance: Instance,
    pub schedule: Schedule,
    /// Largest bottleneck value over the colors, empty cells included.
    pub bottleneck: u32,
}

/// Matches every color class (empty cells as one more class), plans the
/// resulting fully occupied labeled instance and drops the filler robots.
pub fn plan_colored(is: &Image, it: &Image) -> Result<ColoredPlan, ColorError> {
    if !check_compatible(is, it)? {
        return Err(ColorError::Incompatible);
    }
    let dims = is.dims;
    let k = is.colors();
    let matched = par::map_range(k as usize + 1, |c| {
        let a = is.class(c as u32);
        let b = it.class(c as u32);
        let (v, m) = matching::bottleneck(&a, &b);
        (a, m.into_iter().map(|j| b[j]).collect::<Vec<Pos>>(), v)
    });
    let mut start = Vec::with_capacity(dims.cells());
    let mut target = Vec::with_capacity(dims.cells());
    let mut colors = Vec::new();
    let mut bottleneck = 0;
    // Real robots first, in start-cell order; fillers after them.
    let mut real: Vec<(Pos, Pos, u32)> = Vec::new();
    for (c, (a, b, v)) in matched.iter().enumerate() {
        bottleneck = bottleneck.max(*v);
        if c > 0 {
            real.extend(a.iter().zip(b).map(|(&p, &q)| (p, q, c as u32)));
        }
    }
    real.sort_by_key(|&(p, _, _)| dims.index(p));
    for &(p, q, c) in &real {
        start.push(p);
        target.push(q);
        colors.push(c);
    }
    let n_real = real.len();
    start.extend_from_slice(&matched[0].0);
    target.extend_from_slice(&matched[0].1);
    let full = Instance::new(dims, start, target).expect("matched classes form a permutation");
    let schedule = plan_full(&full)?;
    let schedule = strip_robots(schedule, n_real);
    let mut instance = Instance::new(dims, full.start.positions[..n_real].to_vec(), full.target.positions[..n_real].to_vec())
        .expect("subset of a valid instance");
    instance.colors = Some(colors);
    Ok(ColoredPlan { instance, schedule, bottleneck })
}

/// Drops moves of robots `>= keep` and the steps left empty.
pub(crate) fn strip_robots(s: Schedule, keep: usize) -> Schedule {
    let mut out = Schedule::new();
    for mut st in s.steps {
        st.retain(|r: RobotId| (r as usize) < keep);
        if !st.is_empty() {
            out.push(st);
        }
    }
    out
}
