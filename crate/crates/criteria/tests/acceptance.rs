//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::collections::HashSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use swarmplan::colored::bottleneck_matching;
use swarmplan::continuous::{plan_dense, plan_separated, validate_trajectories, TrajectorySet};
use swarmplan::generate::{gen_continuous, gen_hex, gen_random};
use swarmplan::oracle::optimal_makespan;
use swarmplan::partition::{partition_subflows, sum_flows};
use swarmplan::rotatesort::{plan_rotatesort, solve_small};
use swarmplan::sat::{gen_monotone_cnf, gen_sat_instance, solve_sat};
use swarmplan::scheduler::{is_sparse_case, plan_auto, plan_full};
use swarmplan::tiling::{build_tiling, remove_bidirectional, remove_crossings};
use swarmplan::{apply_schedule, max_distance, stretch, GridDims, Instance, Pos};

/// Allowed growth of the max stretch from one grid size to the next.
const SLOPE_TOL: f64 = 0.10;
const DIST_TOL: f64 = 1e-9;
const SPEED_TOL: f64 = 1e-9;

struct Frozen {
    grid_stretch: f64,
    separated_stretch: f64,
    dense_ratio: f64,
    oracle_ratio: f64,
    rotatesort_ratio: f64,
}

fn frozen() -> Frozen {
    let text = include_str!("../../../config/swarmplan.toml");
    let t: toml::Table = text.parse().expect("config parses");
    let f = t["frozen"].as_table().expect("[frozen] table");
    let get = |k: &str| f[k].as_float().unwrap_or_else(|| panic!("frozen.{k}"));
    Frozen {
        grid_stretch: get("grid_stretch"),
        separated_stretch: get("separated_stretch"),
        dense_ratio: get("dense_ratio"),
        oracle_ratio: get("oracle_ratio"),
        rotatesort_ratio: get("rotatesort_ratio"),
    }
}

type Outcome = Result<String, String>;

fn reaches(inst: &Instance, s: &swarmplan::Schedule) -> Result<(), String> {
    apply_schedule(inst, s).map(|_| ()).map_err(|e| e.to_string())
}

fn c1_validity() -> Outcome {
    let t = Instant::now();
    let results: Vec<Result<u8, String>> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
            let (dims, robots, d) = match i % 3 {
                0 => {
                    let dims = GridDims::new(rng.gen_range(1..=30), rng.gen_range(2..=30));
                    (dims, dims.cells(), rng.gen_range(1..=6))
                }
                1 => {
                    let dims = GridDims::new(rng.gen_range(8..=40), rng.gen_range(8..=40));
                    let d = rng.gen_range(4..=12);
                    let cap = (dims.n1.div_ceil(4)).min(d) as usize;
                    (dims, rng.gen_range(1..=cap), d)
                }
                _ => {
                    let dims = GridDims::new(rng.gen_range(4..=40), rng.gen_range(4..=40));
                    let fill = rng.gen_range(0.1..0.9);
                    (dims, ((dims.cells() as f64 * fill) as usize).max(1), rng.gen_range(1..=6))
                }
            };
            let inst = gen_random(dims, robots, d, i).map_err(|e| format!("instance {i}: {e}"))?;
            let s = plan_auto(&inst).map_err(|e| format!("instance {i}: {e}"))?;
            reaches(&inst, &s).map_err(|e| format!("instance {i}: {e}"))?;
            let kind = if inst.is_full() {
                0
            } else if is_sparse_case(inst.robots(), dims.n1, max_distance(&inst)) {
                1
            } else {
                2
            };
            Ok(kind)
        })
        .collect();
    let mut counts = [0usize; 3];
    for r in results {
        counts[r? as usize] += 1;
    }
    let el = t.elapsed();
    let msg = format!("1000/1000 valid (full {}, sparse {}, clustered {}) in {:.1?}", counts[0], counts[1], counts[2], el);
    if el > Duration::from_secs(300) {
        return Err(msg + ", over 5 min");
    }
    Ok(msg)
}

fn c2_stretch(fz: &Frozen) -> Outcome {
    let sizes = [24u32, 48, 72, 96];
    let mut table = vec![[0.0f64; 8]; sizes.len()];
    for (si, &n) in sizes.iter().enumerate() {
        for d in 1..=8u32 {
            let worst = (0..200u64)
                .into_par_iter()
                .map(|seed| {
                    let inst = gen_random(GridDims::new(n, n), (n * n) as usize, d, seed).unwrap();
                    let s = plan_full(&inst).map_err(|e| format!("n={n} d={d} seed={seed}: {e}"))?;
                    reaches(&inst, &s).map_err(|e| format!("n={n} d={d} seed={seed}: {e}"))?;
                    Ok::<f64, String>(stretch(&inst, &s).unwrap())
                })
                .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))?;
            table[si][d as usize - 1] = worst;
        }
    }
    let mut lines = Vec::new();
    for (si, &n) in sizes.iter().enumerate() {
        let row: Vec<String> = table[si].iter().map(|v| format!("{v:.2}")).collect();
        lines.push(format!("    n={n:<3} d=1..8 max stretch {}", row.join(" ")));
    }
    let overall = table.iter().flatten().copied().fold(0.0, f64::max);
    let mut slope_bad = Vec::new();
    for d in 0..8 {
        for si in 1..sizes.len() {
            let (a, b) = (table[si - 1][d], table[si][d]);
            if b > a * (1.0 + SLOPE_TOL) {
                slope_bad.push(format!("d={} {}->{}: {a:.2}->{b:.2}", d + 1, sizes[si - 1], sizes[si]));
            }
        }
    }
    let head = format!("max stretch {overall:.2} (frozen {:.2}); {} slope violations", fz.grid_stretch, slope_bad.len());
    let body = format!("{head}\n{}{}", lines.join("\n"), if slope_bad.is_empty() { String::new() } else { format!("\n    slope: {}", slope_bad.join(", ")) });
    if overall > fz.grid_stretch || !slope_bad.is_empty() {
        Err(body)
    } else {
        Ok(body)
    }
}

fn falling(n: usize, k: usize) -> usize {
    (n - k + 1..=n).product()
}

/// Ordered placement number `i` of `k` robots on `cells` cells.
fn unrank(mut i: usize, cells: usize, k: usize) -> Vec<usize> {
    let mut free: Vec<usize> = (0..cells).collect();
    let mut out = Vec::with_capacity(k);
    for j in 0..k {
        let m = falling(cells - j - 1, k - j - 1);
        out.push(free.remove(i / m));
        i %= m;
    }
    out
}

fn c3_oracle(fz: &Frozen) -> Outcome {
    let t = Instant::now();
    let dims = GridDims::new(3, 2);
    let start: Vec<Pos> = (0..6).map(|i| dims.pos(i)).collect();
    let mut target = start.clone();
    target.swap(0, 1);
    let fig = optimal_makespan(&Instance::new(dims, start, target).unwrap(), 16).unwrap();
    if fig != Some(3) {
        return Err(format!("adjacent transposition on full 2x3 has optimum {fig:?}, expected 3"));
    }
    let mut strata = Vec::new();
    for n1 in 1..=9u32 {
        for n2 in 1..=9u32 {
            let cells = (n1 * n2) as usize;
            if (2..=9).contains(&cells) {
                for k in 1..=cells.min(4) {
                    strata.push((GridDims::new(n1, n2), k));
                }
            }
        }
    }
    const QUOTA: usize = 200;
    let mut samples = Vec::new();
    for (si, &(dims, k)) in strata.iter().enumerate() {
        let c = dims.cells();
        let space = falling(c, k) * falling(c, k);
        let picks: Vec<usize> = if space <= QUOTA {
            (0..space).collect()
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(si as u64);
            let mut set = HashSet::new();
            while set.len() < QUOTA {
                set.insert(rng.gen_range(0..space));
            }
            let mut v: Vec<usize> = set.into_iter().collect();
            v.sort_unstable();
            v
        };
        for p in picks {
            let m = falling(c, k);
            let s: Vec<Pos> = unrank(p / m, c, k).into_iter().map(|i| dims.pos(i)).collect();
            let g: Vec<Pos> = unrank(p % m, c, k).into_iter().map(|i| dims.pos(i)).collect();
            samples.push(Instance::new(dims, s, g).unwrap());
        }
    }
    let results: Vec<Result<(f64, bool), String>> = samples
        .par_iter()
        .map(|inst| {
            let opt = optimal_makespan(inst, 64).map_err(|e| e.to_string())?;
            let plan = plan_auto(inst);
            match (opt, plan) {
                (None, Err(_)) => Ok((0.0, true)),
                (None, Ok(s)) => Err(format!("{inst:?}: planner returned {} steps for an unreachable target", s.makespan())),
                (Some(o), Err(e)) => Err(format!("{inst:?}: optimum {o} but planner failed: {e}")),
                (Some(o), Ok(s)) => {
                    reaches(inst, &s).map_err(|e| format!("{inst:?}: {e}"))?;
                    let m = s.makespan() as u32;
                    if m < o {
                        return Err(format!("{inst:?}: planner {m} below optimum {o}"));
                    }
                    if o == 0 {
                        return if m == 0 { Ok((1.0, false)) } else { Err(format!("{inst:?}: {m} steps for a solved instance")) };
                    }
                    Ok((m as f64 / o as f64, false))
                }
            }
        })
        .collect();
    let mut worst = 0.0f64;
    let mut unreachable = 0;
    for r in results {
        let (ratio, u) = r?;
        worst = worst.max(ratio);
        unreachable += u as usize;
    }
    let msg = format!(
        "{} instances over {} strata ({} unreachable, planner agrees), transposition optimum 3, max planner/optimum {worst:.2} (frozen {:.2}) in {:.1?}",
        samples.len(),
        strata.len(),
        unreachable,
        fz.oracle_ratio,
        t.elapsed()
    );
    if samples.len() < 10_000 || worst > fz.oracle_ratio || t.elapsed() > Duration::from_secs(600) {
        Err(msg)
    } else {
        Ok(msg)
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

fn c4_gadget() -> Outcome {
    let dims = GridDims::new(3, 2);
    let start: Vec<Pos> = (0..6).map(|i| dims.pos(i)).collect();
    let perms = permutations(6);
    let mut hist = [0usize; 8];
    for p in &perms {
        let target: Vec<Pos> = p.iter().map(|&i| dims.pos(i)).collect();
        let inst = Instance::new(dims, start.clone(), target).unwrap();
        let s = solve_small(&inst).map_err(|e| format!("{p:?}: {e}"))?;
        reaches(&inst, &s).map_err(|e| format!("{p:?}: {e}"))?;
        let opt = optimal_makespan(&inst, 16).unwrap();
        if opt != Some(s.makespan() as u32) || s.makespan() > 7 {
            return Err(format!("{p:?}: solve_small {} vs BFS {opt:?}", s.makespan()));
        }
        hist[s.makespan()] += 1;
    }
    Ok(format!("{} permutations, lengths 0..7 histogram {hist:?}", perms.len()))
}

/// Full instance whose robots rotate along concentric rectangular rings,
/// each by at most `d` cells.
fn gen_rings(n: u32, d: u32, seed: u64) -> Instance {
    let dims = GridDims::new(n, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..dims.cells()).collect();
    let (cx, cy) = (rng.gen_range(n / 4..3 * n / 4) as i32, rng.gen_range(n / 4..3 * n / 4) as i32);
    let max_r = cx.min(cy).min(n as i32 - 1 - cx).min(n as i32 - 1 - cy);
    for r in 1..=max_r {
        if rng.gen_bool(0.3) {
            continue;
        }
        let mut ring = Vec::new();
        for x in cx - r..cx + r {
            ring.push(Pos::new(x, cy - r));
        }
        for y in cy - r..cy + r {
            ring.push(Pos::new(cx + r, y));
        }
        for x in (cx - r + 1..=cx + r).rev() {
            ring.push(Pos::new(x, cy + r));
        }
        for y in (cy - r + 1..=cy + r).rev() {
            ring.push(Pos::new(cx - r, y));
        }
        let shift = rng.gen_range(1..=d as usize);
        let len = ring.len();
        let fwd = rng.gen_bool(0.5);
        for (i, &p) in ring.iter().enumerate() {
            let j = if fwd { (i + shift) % len } else { (i + len - shift) % len };
            perm[dims.index(p)] = dims.index(ring[j]);
        }
    }
    let start: Vec<Pos> = (0..dims.cells()).map(|i| dims.pos(i)).collect();
    let target: Vec<Pos> = perm.iter().map(|&i| dims.pos(i)).collect();
    Instance::new(dims, start, target).unwrap()
}

fn c5_partition() -> Outcome {
    let t = Instant::now();
    let results: Vec<Result<(usize, u64), String>> = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(5000 + i);
            let d = rng.gen_range(1..=2u32);
            let n = 24 * d + rng.gen_range(0..=24 * d);
            let inst = if i % 2 == 0 {
                gen_random(GridDims::new(n, n), (n * n) as usize, d, i).unwrap()
            } else {
                gen_rings(n, d, i)
            };
            let tiling = build_tiling(inst.dims, d);
            let (_, c1, _) = remove_crossings(&inst.start, &inst.target, &tiling).map_err(|e| format!("#{i}: {e}"))?;
            let (_, _, flow) = remove_bidirectional(&c1, &inst.target, &tiling).map_err(|e| format!("#{i}: {e}"))?;
            if !flow.is_circulation() || !flow.is_unidirectional() || !flow.crossings(&tiling).is_empty() {
                return Err(format!("#{i}: preprocessing left a non-preprocessed flow"));
            }
            let parts = partition_subflows(&flow, d, &tiling).map_err(|e| format!("#{i}: {e}"))?;
            if sum_flows(&parts) != flow {
                return Err(format!("#{i}: subflows do not sum to the flow"));
            }
            if let Some(p) = parts.iter().find(|p| p.max_weight() > d) {
                return Err(format!("#{i}: subflow weight {} above d = {d}", p.max_weight()));
            }
            if parts.len() > 4 * 576 * d as usize {
                return Err(format!("#{i}: {} subflows", parts.len()));
            }
            Ok((parts.len(), flow.total()))
        })
        .collect();
    let (mut most, mut volume) = (0, 0);
    for r in results {
        let (k, v) = r?;
        most = most.max(k);
        volume += v;
    }
    let msg = format!("500 circulations (total weight {volume}), at most {most} subflows, in {:.1?}", t.elapsed());
    if t.elapsed() > Duration::from_secs(120) {
        return Err(msg + ", over 2 min");
    }
    Ok(msg)
}

fn c6_sat() -> Outcome {
    let mut done = 0;
    let mut seed = 0u64;
    while done < 50 {
        seed += 1;
        if seed > 10_000 {
            return Err(format!("only {done} satisfiable formulas found"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (n, m) = (rng.gen_range(3..=6), rng.gen_range(1..=8));
        let f = gen_monotone_cnf(n, m, seed);
        let Some(a) = solve_sat(&f) else { continue };
        let si = gen_sat_instance(&f, Some(&a)).map_err(|e| format!("seed {seed}: {e}"))?;
        let w = si.witness.as_ref().ok_or(format!("seed {seed}: no witness"))?;
        reaches(&si.instance, w).map_err(|e| format!("seed {seed}: {e}"))?;
        let big_m = 6 * n * (m + 2);
        if w.makespan() != big_m || si.makespan != big_m {
            return Err(format!("seed {seed}: makespan {} vs M = {big_m}", w.makespan()));
        }
        done += 1;
    }
    Ok(format!("50 witnesses validate with makespan 6n(m+2) ({seed} formulas drawn)"))
}

fn c7_bottleneck() -> Outcome {
    let results: Vec<Result<(), String>> = (0..1000u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(7000 + i);
            let k = rng.gen_range(1..=8);
            let side = rng.gen_range(3..=12);
            let mut cells: Vec<Pos> = (0..side).flat_map(|x| (0..side).map(move |y| Pos::new(x, y))).collect();
            cells.shuffle(&mut rng);
            let a = cells[..k].to_vec();
            cells.shuffle(&mut rng);
            let b = cells[..k].to_vec();
            let brute = permutations(k)
                .iter()
                .map(|p| (0..k).map(|i| a[i].manhattan(b[p[i]])).max().unwrap())
                .min()
                .unwrap();
            let (v, m) = bottleneck_matching(&a, &b).map_err(|e| e.to_string())?;
            let mut seen = m.clone();
            seen.sort_unstable();
            let achieved = (0..k).map(|i| a[i].manhattan(b[m[i]])).max().unwrap();
            if v != brute || achieved != v || seen != (0..k).collect::<Vec<_>>() {
                return Err(format!("#{i}: value {v}, achieved {achieved}, brute force {brute}"));
            }
            Ok(())
        })
        .collect();
    results.into_iter().collect::<Result<Vec<()>, String>>()?;
    Ok("1000 point-set pairs match brute force".into())
}

struct ContRun {
    label: String,
    n: usize,
    d: f64,
    makespan: f64,
    min_distance: f64,
    max_speed: f64,
    valid: bool,
}

fn cont_run(label: &str, inst: &swarmplan::continuous::ContinuousInstance, plan: impl Fn() -> Result<TrajectorySet, String>) -> Result<ContRun, String> {
    let ts = plan().map_err(|e| format!("{label}: {e}"))?;
    let r = validate_trajectories(&ts, inst);
    Ok(ContRun {
        label: label.to_string(),
        n: inst.robots(),
        d: inst.d(),
        makespan: ts.makespan(),
        min_distance: r.min_distance,
        max_speed: r.max_speed,
        valid: r.is_valid(),
    })
}

fn continuous_runs() -> Result<Vec<ContRun>, String> {
    let mut jobs = Vec::new();
    for (n, seeds) in [(25usize, 6u64), (100, 4), (400, 2)] {
        for seed in 0..seeds {
            jobs.push(("dense", n, seed));
            jobs.push(("separated", n, seed));
        }
    }
    let mut runs: Vec<ContRun> = jobs
        .par_iter()
        .map(|&(mode, n, seed)| {
            let sep = if mode == "dense" { 2.0 } else { 4.0 };
            let side = 2.0 * sep * (n as f64).sqrt();
            let inst = gen_continuous(n, sep, side, seed).map_err(|e| e.to_string())?;
            let label = format!("{mode} N={n} seed={seed}");
            if mode == "dense" {
                cont_run(&label, &inst, || plan_dense(&inst).map_err(|e| e.to_string()))
            } else {
                cont_run(&label, &inst, || plan_separated(&inst).map_err(|e| e.to_string()))
            }
        })
        .collect::<Result<_, _>>()?;
    for n in [7usize, 19, 37, 61, 100, 169, 400] {
        let inst = gen_hex(n);
        runs.push(cont_run(&format!("hex N={n}"), &inst, || plan_dense(&inst).map_err(|e| e.to_string()))?);
    }
    Ok(runs)
}

fn c8_compat(runs: &[ContRun]) -> Outcome {
    let worst_dist = runs.iter().map(|r| r.min_distance).fold(f64::INFINITY, f64::min);
    let worst_speed = runs.iter().map(|r| r.max_speed).fold(0.0, f64::max);
    let msg = format!("{} trajectory sets, min distance {worst_dist:.6}, max speed {worst_speed:.9}", runs.len());
    match runs.iter().find(|r| !r.valid) {
        Some(r) => Err(format!("{msg}; {} invalid", r.label)),
        None if worst_dist < 2.0 - DIST_TOL || worst_speed > 1.0 + SPEED_TOL => Err(msg),
        None => Ok(msg),
    }
}

fn c9_bounds(runs: &[ContRun], fz: &Frozen) -> Outcome {
    let mut lines = Vec::new();
    let mut dense_max = 0.0f64;
    let mut sep_max = 0.0f64;
    for n in [25usize, 100, 400] {
        let dense = runs.iter().filter(|r| r.n == n && r.label.starts_with("dense")).map(|r| r.makespan / (r.d + (n as f64).sqrt()));
        let sep = runs.iter().filter(|r| r.n == n && r.label.starts_with("separated")).map(|r| r.makespan / r.d);
        let (dm, sm) = (dense.fold(0.0, f64::max), sep.fold(0.0, f64::max));
        lines.push(format!("    N={n:<3} dense T/(d+sqrt N) {dm:.2}  separated T/d {sm:.2}"));
        dense_max = dense_max.max(dm);
        sep_max = sep_max.max(sm);
    }
    let hex: Vec<String> = runs.iter().filter(|r| r.label.starts_with("hex")).map(|r| format!("N={} T={:.0}", r.n, r.makespan)).collect();
    lines.push(format!("    hex trend: {}", hex.join(", ")));
    let msg = format!(
        "dense max {dense_max:.2} (frozen {:.2}), separated max {sep_max:.2} (frozen {:.2})\n{}",
        fz.dense_ratio,
        fz.separated_stretch,
        lines.join("\n")
    );
    if dense_max > fz.dense_ratio || sep_max > fz.separated_stretch {
        Err(msg)
    } else {
        Ok(msg)
    }
}

fn c10_linearity(fz: &Frozen) -> Outcome {
    let results: Vec<Result<(u32, f64), String>> = (6..=60u32)
        .into_par_iter()
        .flat_map_iter(|n| (0..50u64).map(move |seed| (n, seed)))
        .map(|(n, seed)| {
            let inst = gen_random(GridDims::new(n, n), (n * n) as usize, 2 * n, seed).unwrap();
            let s = plan_rotatesort(&inst).map_err(|e| format!("{n}x{n} seed {seed}: {e}"))?;
            reaches(&inst, &s).map_err(|e| format!("{n}x{n} seed {seed}: {e}"))?;
            Ok((n, s.makespan() as f64 / (2 * n) as f64))
        })
        .collect();
    let mut worst = (0, 0.0f64);
    for r in results {
        let (n, q) = r?;
        if q > worst.1 {
            worst = (n, q);
        }
    }
    let msg = format!("max length/(n1+n2) {:.2} at {}x{} (frozen {:.2})", worst.1, worst.0, worst.0, fz.rotatesort_ratio);
    if worst.1 > fz.rotatesort_ratio {
        Err(msg)
    } else {
        Ok(msg)
    }
}

fn main() {
    let only: Option<Vec<usize>> = std::env::var("ACCEPTANCE_ONLY").ok().map(|s| s.split(',').filter_map(|x| x.trim().parse().ok()).collect());
    let want = |k: usize| only.as_ref().is_none_or(|o| o.contains(&k));
    let fz = frozen();
    let mut failed = 0;
    let mut report = |k: usize, name: &str, t: Instant, r: Outcome| {
        let (tag, msg) = match r {
            Ok(m) => ("PASS", m),
            Err(m) => {
                failed += 1;
                ("FAIL", m)
            }
        };
        println!("criterion {k:>2} {tag} [{name}, {:.1?}] {msg}", t.elapsed());
    };
    let run = |k: usize, f: &dyn Fn() -> Outcome| -> Option<(Instant, Outcome)> {
        if !want(k) {
            return None;
        }
        let t = Instant::now();
        Some((t, f()))
    };
    let criteria: [(&str, &dyn Fn() -> Outcome); 7] = [
        ("validity", &c1_validity),
        ("constant stretch", &|| c2_stretch(&fz)),
        ("oracle equivalence", &|| c3_oracle(&fz)),
        ("2x3 gadget", &c4_gadget),
        ("flow partition", &c5_partition),
        ("hardness witness", &c6_sat),
        ("bottleneck matching", &c7_bottleneck),
    ];
    for (i, (name, f)) in criteria.iter().enumerate() {
        if let Some((t, r)) = run(i + 1, *f) {
            report(i + 1, name, t, r);
        }
    }
    if want(8) || want(9) {
        let t = Instant::now();
        match continuous_runs() {
            Ok(runs) => {
                if want(8) {
                    report(8, "continuous compatibility", t, c8_compat(&runs));
                }
                if want(9) {
                    report(9, "continuous makespan", t, c9_bounds(&runs, &fz));
                }
            }
            Err(e) => {
                report(8, "continuous compatibility", t, Err(e.clone()));
                report(9, "continuous makespan", t, Err(e));
            }
        }
    }
    if let Some((t, r)) = run(10, &|| c10_linearity(&fz)) {
        report(10, "rotatesort linearity", t, r);
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
