//! SVG frames of a schedule. The y axis points up, as in the grid model.

use std::fmt::Write;

use swarmplan::grid::{ScheduleError, Sim};
use swarmplan::{Instance, Move, Pos, Schedule};

const CELL: f64 = 20.0;
const PALETTE: [&str; 8] = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f"];

fn fill(inst: &Instance, r: usize) -> String {
    match &inst.colors {
        Some(c) => PALETTE[c[r] as usize % PALETTE.len()].to_string(),
        None => {
            // Spread labels around the hue circle.
            let h = (r as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15) >> 40;
            format!("hsl({},65%,55%)", h % 360)
        }
    }
}

fn center(inst: &Instance, p: Pos) -> (f64, f64) {
    ((p.x as f64 + 0.5) * CELL, (inst.dims.n2 as f64 - p.y as f64 - 0.5) * CELL)
}

fn header(inst: &Instance, out: &mut String) {
    let (w, h) = (inst.dims.n1 as f64 * CELL, inst.dims.n2 as f64 * CELL);
    let _ = write!(
        out,
        r##"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}"><defs><marker id="a" markerWidth="6" markerHeight="6" refX="5" refY="3" orient="auto"><path d="M0,0 L6,3 L0,6 z" fill="#333"/></marker></defs><rect width="{w}" height="{h}" fill="white"/><g stroke="#ddd" stroke-width="1">"##
    );
    for x in 0..=inst.dims.n1 {
        let _ = write!(out, r#"<line x1="{0}" y1="0" x2="{0}" y2="{h}"/>"#, x as f64 * CELL);
    }
    for y in 0..=inst.dims.n2 {
        let _ = write!(out, r#"<line x1="0" y1="{0}" x2="{w}" y2="{0}"/>"#, y as f64 * CELL);
    }
    out.push_str("</g>");
}

/// One frame per configuration, with arrows for the moves that follow.
pub fn frames(inst: &Instance, s: &Schedule) -> Result<Vec<String>, ScheduleError> {
    let mut sim = Sim::new(&inst.start);
    let mut out = Vec::with_capacity(s.makespan() + 1);
    for k in 0..=s.makespan() {
        let mut f = String::new();
        header(inst, &mut f);
        let next = s.steps.get(k);
        for (r, &p) in sim.pos.iter().enumerate() {
            let (cx, cy) = center(inst, p);
            let _ = write!(f, r#"<circle cx="{cx}" cy="{cy}" r="{}" fill="{}"><title>{}</title></circle>"#, CELL * 0.4, fill(inst, r), r + 1);
            if let Some(m) = next.map(|st| st.get(r as u32)).filter(|&m| m != Move::Wait) {
                let (dx, dy) = m.delta();
                let (tx, ty) = (cx + dx as f64 * CELL * 0.6, cy - dy as f64 * CELL * 0.6);
                let _ = write!(f, r##"<line x1="{cx}" y1="{cy}" x2="{tx}" y2="{ty}" stroke="#333" stroke-width="1.5" marker-end="url(#a)"/>"##);
            }
        }
        f.push_str("</svg>\n");
        out.push(f);
        if let Some(st) = next {
            sim.apply(st).map_err(|inner| ScheduleError::StepViolation { index: k, inner })?;
        }
    }
    Ok(out)
}

/// Single SVG animating every robot at one step per half second.
pub fn animated(inst: &Instance, s: &Schedule) -> Result<String, ScheduleError> {
    let mut sim = Sim::new(&inst.start);
    let mut track: Vec<Vec<Pos>> = sim.pos.iter().map(|&p| vec![p]).collect();
    for (k, st) in s.steps.iter().enumerate() {
        sim.apply(st).map_err(|inner| ScheduleError::StepViolation { index: k, inner })?;
        for (t, &p) in track.iter_mut().zip(&sim.pos) {
            t.push(p);
        }
    }
    let dur = 0.5 * s.makespan().max(1) as f64;
    let mut f = String::new();
    header(inst, &mut f);
    for (r, t) in track.iter().enumerate() {
        let (cx, cy) = center(inst, t[0]);
        let xs: Vec<String> = t.iter().map(|&p| center(inst, p).0.to_string()).collect();
        let ys: Vec<String> = t.iter().map(|&p| center(inst, p).1.to_string()).collect();
        let _ = write!(
            f,
            r#"<circle cx="{cx}" cy="{cy}" r="{}" fill="{}"><animate attributeName="cx" values="{}" dur="{dur}s" fill="freeze"/><animate attributeName="cy" values="{}" dur="{dur}s" fill="freeze"/></circle>"#,
            CELL * 0.4,
            fill(inst, r),
            xs.join(";"),
            ys.join(";")
        );
    }
    f.push_str("</svg>\n");
    Ok(f)
}
