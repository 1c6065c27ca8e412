//! JSON documents. Every document carries a versioned `format` field;
//! robot ids in files are 1-based.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::colored::Image;
use crate::continuous::{ContinuousInstance, Point, Trajectory, TrajectorySet};
use crate::grid::{GridDims, Instance, Move, Pos, RobotId, Schedule, Step};

pub const INSTANCE_FORMAT: &str = "swarmplan-instance/1";
pub const SCHEDULE_FORMAT: &str = "swarmplan-schedule/1";
pub const IMAGE_FORMAT: &str = "swarmplan-image/1";
pub const CONTINUOUS_FORMAT: &str = "swarmplan-continuous/1";
pub const TRAJECTORIES_FORMAT: &str = "swarmplan-trajectories/1";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("expected format {expected}, found {found}")]
    Format { expected: &'static str, found: String },
    #[error("{0}")]
    Invalid(String),
}

/// Document kinds, told apart by their `format` field.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Instance,
    Schedule,
    Image,
    Continuous,
    Trajectories,
}

/// Kind of a JSON document. Documents without a `format` field are
/// recognized by their keys.
pub fn detect(text: &str) -> Result<Kind, IoError> {
    let v: serde_json::Value = serde_json::from_str(text)?;
    let kinds = [
        (INSTANCE_FORMAT, Kind::Instance),
        (SCHEDULE_FORMAT, Kind::Schedule),
        (IMAGE_FORMAT, Kind::Image),
        (CONTINUOUS_FORMAT, Kind::Continuous),
        (TRAJECTORIES_FORMAT, Kind::Trajectories),
    ];
    if let Some(f) = v.get("format").and_then(|f| f.as_str()) {
        return kinds
            .iter()
            .find(|k| k.0 == f)
            .map(|k| k.1)
            .ok_or_else(|| IoError::Invalid(format!("unknown format {f}")));
    }
    let has = |k: &str| v.get(k).is_some();
    Ok(if has("steps") {
        Kind::Schedule
    } else if has("cells") {
        Kind::Image
    } else if has("dims") {
        Kind::Instance
    } else if v["robots"].get(0).is_some_and(|r| r.get("points").is_some()) {
        Kind::Trajectories
    } else {
        Kind::Continuous
    })
}

fn check_format(found: &Option<String>, expected: &'static str) -> Result<(), IoError> {
    match found {
        Some(f) if f != expected => Err(IoError::Format { expected, found: f.clone() }),
        _ => Ok(()),
    }
}

/// Position of each 1-based id in a list, checking that ids are `1..=n`.
fn id_order(ids: impl Iterator<Item = u32>, n: usize) -> Result<Vec<usize>, IoError> {
    let mut slot = vec![usize::MAX; n];
    for (k, id) in ids.enumerate() {
        let i = (id as usize).wrapping_sub(1);
        if i >= n || slot[i] != usize::MAX {
            return Err(IoError::Invalid(format!("robot ids must be 1..={n} without repeats, got {id}")));
        }
        slot[i] = k;
    }
    Ok(slot)
}

#[derive(Serialize, Deserialize)]
struct RobotDoc {
    id: u32,
    start: [i32; 2],
    target: [i32; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<u32>,
}

#[derive(Serialize, Deserialize)]
struct InstanceDoc {
    #[serde(default)]
    format: Option<String>,
    dims: [u32; 2],
    robots: Vec<RobotDoc>,
}

pub fn instance_to_json(inst: &Instance) -> String {
    let robots = (0..inst.robots())
        .map(|r| {
            let (s, t) = (inst.start.positions[r], inst.target.positions[r]);
            RobotDoc {
                id: r as u32 + 1,
                start: [s.x, s.y],
                target: [t.x, t.y],
                color: inst.colors.as_ref().map(|c| c[r]),
            }
        })
        .collect();
    let doc = InstanceDoc { format: Some(INSTANCE_FORMAT.into()), dims: [inst.dims.n1, inst.dims.n2], robots };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn instance_from_json(text: &str) -> Result<Instance, IoError> {
    let doc: InstanceDoc = serde_json::from_str(text)?;
    check_format(&doc.format, INSTANCE_FORMAT)?;
    let n = doc.robots.len();
    let order = id_order(doc.robots.iter().map(|r| r.id), n)?;
    let rob = |i: usize| &doc.robots[order[i]];
    let start = (0..n).map(|i| Pos::new(rob(i).start[0], rob(i).start[1])).collect();
    let target = (0..n).map(|i| Pos::new(rob(i).target[0], rob(i).target[1])).collect();
    let mut inst = Instance::new(GridDims::new(doc.dims[0], doc.dims[1]), start, target)
        .map_err(|e| IoError::Invalid(e.to_string()))?;
    if doc.robots.iter().any(|r| r.color.is_some()) {
        inst.colors = Some((0..n).map(|i| rob(i).color.unwrap_or(0)).collect());
    }
    Ok(inst)
}

#[derive(Serialize, Deserialize)]
struct ScheduleDoc {
    #[serde(default)]
    format: Option<String>,
    steps: Vec<BTreeMap<String, String>>,
}

pub fn schedule_to_json(s: &Schedule) -> String {
    let steps = s
        .steps
        .iter()
        .map(|st| st.moves().iter().map(|&(r, m)| ((r + 1).to_string(), m.symbol().to_string())).collect())
        .collect();
    serde_json::to_string(&ScheduleDoc { format: Some(SCHEDULE_FORMAT.into()), steps }).expect("serializable")
}

pub fn schedule_from_json(text: &str) -> Result<Schedule, IoError> {
    let doc: ScheduleDoc = serde_json::from_str(text)?;
    check_format(&doc.format, SCHEDULE_FORMAT)?;
    let steps = doc
        .steps
        .iter()
        .enumerate()
        .map(|(k, st)| {
            let moves = st
                .iter()
                .map(|(id, m)| {
                    let id: RobotId = id
                        .parse::<RobotId>()
                        .ok()
                        .filter(|&i| i >= 1)
                        .ok_or_else(|| IoError::Invalid(format!("step {k}: bad robot id {id}")))?;
                    let mv = m
                        .chars()
                        .next()
                        .filter(|_| m.len() == 1)
                        .and_then(Move::from_symbol)
                        .ok_or_else(|| IoError::Invalid(format!("step {k}: bad move {m}")))?;
                    Ok((id - 1, mv))
                })
                .collect::<Result<Vec<_>, IoError>>()?;
            Ok(Step::from_moves(moves))
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    Ok(Schedule::from_steps(steps))
}

#[derive(Serialize, Deserialize)]
struct ImageDoc {
    #[serde(default)]
    format: Option<String>,
    dims: [u32; 2],
    /// Row `y` lists the colors of cells `(0,y), (1,y), ...`.
    cells: Vec<Vec<u32>>,
}

pub fn image_to_json(img: &Image) -> String {
    let (n1, n2) = (img.dims.n1 as usize, img.dims.n2 as usize);
    let cells = (0..n2).map(|y| img.cells[y * n1..(y + 1) * n1].to_vec()).collect();
    let doc = ImageDoc { format: Some(IMAGE_FORMAT.into()), dims: [img.dims.n1, img.dims.n2], cells };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn image_from_json(text: &str) -> Result<Image, IoError> {
    let doc: ImageDoc = serde_json::from_str(text)?;
    check_format(&doc.format, IMAGE_FORMAT)?;
    let dims = GridDims::new(doc.dims[0], doc.dims[1]);
    if doc.cells.len() != dims.n2 as usize || doc.cells.iter().any(|r| r.len() != dims.n1 as usize) {
        return Err(IoError::Invalid(format!("cells must be {} rows of {} colors", dims.n2, dims.n1)));
    }
    let mut img = Image::empty(dims);
    for (y, row) in doc.cells.iter().enumerate() {
        for (x, &c) in row.iter().enumerate() {
            img.set(Pos::new(x as i32, y as i32), c);
        }
    }
    Ok(img)
}

#[derive(Serialize, Deserialize)]
struct DiskDoc {
    id: u32,
    start: Point,
    target: Point,
}

#[derive(Serialize, Deserialize)]
struct ContinuousDoc {
    #[serde(default)]
    format: Option<String>,
    robots: Vec<DiskDoc>,
}

pub fn continuous_to_json(c: &ContinuousInstance) -> String {
    let robots = (0..c.robots()).map(|r| DiskDoc { id: r as u32 + 1, start: c.start[r], target: c.target[r] }).collect();
    serde_json::to_string_pretty(&ContinuousDoc { format: Some(CONTINUOUS_FORMAT.into()), robots }).expect("serializable")
}

pub fn continuous_from_json(text: &str) -> Result<ContinuousInstance, IoError> {
    let doc: ContinuousDoc = serde_json::from_str(text)?;
    check_format(&doc.format, CONTINUOUS_FORMAT)?;
    let n = doc.robots.len();
    let order = id_order(doc.robots.iter().map(|r| r.id), n)?;
    Ok(ContinuousInstance {
        start: order.iter().map(|&k| doc.robots[k].start).collect(),
        target: order.iter().map(|&k| doc.robots[k].target).collect(),
    })
}

#[derive(Serialize, Deserialize)]
struct PathDoc {
    id: u32,
    /// `[time, x, y]` breakpoints.
    points: Vec<[f64; 3]>,
}

#[derive(Serialize, Deserialize)]
struct TrajectoriesDoc {
    #[serde(default)]
    format: Option<String>,
    makespan: f64,
    robots: Vec<PathDoc>,
}

pub fn trajectories_to_json(ts: &TrajectorySet) -> String {
    let robots = ts
        .trajectories
        .iter()
        .enumerate()
        .map(|(r, tr)| PathDoc { id: r as u32 + 1, points: tr.points.iter().map(|&(t, p)| [t, p[0], p[1]]).collect() })
        .collect();
    let doc = TrajectoriesDoc { format: Some(TRAJECTORIES_FORMAT.into()), makespan: ts.makespan(), robots };
    serde_json::to_string(&doc).expect("serializable")
}

pub fn trajectories_from_json(text: &str) -> Result<TrajectorySet, IoError> {
    let doc: TrajectoriesDoc = serde_json::from_str(text)?;
    check_format(&doc.format, TRAJECTORIES_FORMAT)?;
    let n = doc.robots.len();
    let order = id_order(doc.robots.iter().map(|r| r.id), n)?;
    let trajectories = order
        .iter()
        .map(|&k| Trajectory { points: doc.robots[k].points.iter().map(|p| (p[0], [p[1], p[2]])).collect() })
        .collect();
    Ok(TrajectorySet { trajectories })
}
