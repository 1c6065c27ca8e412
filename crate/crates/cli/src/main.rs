mod config;
mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use serde::Serialize;
use swarmplan::colored::plan_colored;
use swarmplan::continuous::{plan_dense, plan_separated, validate_trajectories};
use swarmplan::generate::{gen_continuous, gen_hex, gen_random};
use swarmplan::io::{self, Kind};
use swarmplan::oracle::optimal_makespan;
use swarmplan::sat::{gen_monotone_cnf, gen_sat_instance, solve_sat, Cnf};
use swarmplan::scheduler::plan_auto;
use swarmplan::{apply_schedule, max_distance, GridDims};

use config::Config;

#[derive(Parser)]
#[command(name = "swarmplan", version, about = "Makespan-bounded motion planning for robot swarms")]
struct Cli {
    /// Config file with seeds and regression bounds.
    #[arg(long, global = true, default_value = "config/swarmplan.toml")]
    config: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Separated,
    Dense,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenKind {
    Random,
    Sat,
    Hex,
    Continuous,
}

#[derive(Subcommand)]
enum Cmd {
    /// Plan a labeled grid instance.
    Plan {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plan between two colored images; writes the labeled instance too.
    PlanColored {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        instance_out: Option<PathBuf>,
    },
    /// Plan unit disks in the plane.
    PlanContinuous {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, value_enum, default_value = "dense")]
        mode: Mode,
    },
    /// Check a schedule or trajectory set against its instance.
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
    },
    /// Write one SVG frame per configuration of a schedule.
    Render {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        frames_dir: PathBuf,
        /// Also write a single animated SVG.
        #[arg(long)]
        animated: Option<PathBuf>,
    },
    /// Plan every instance in a corpus directory and write a CSV report.
    Stats {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Fail if a ratio exceeds the bound in the config file.
        #[arg(long)]
        gate: bool,
    },
    /// Exact optimal makespan of a tiny instance.
    Oracle {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long, default_value_t = 64)]
        cap: u32,
    },
    /// Generate an instance.
    Gen {
        #[arg(long, value_enum)]
        kind: GenKind,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 24)]
        n1: u32,
        #[arg(long, default_value_t = 24)]
        n2: u32,
        /// Robot count (grid cells if omitted).
        #[arg(long)]
        robots: Option<usize>,
        #[arg(long, default_value_t = 4)]
        d: u32,
        /// DIMACS file for `sat`; a random satisfiable formula otherwise.
        #[arg(long)]
        cnf: Option<PathBuf>,
        #[arg(long, default_value_t = 4)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        clauses: usize,
        /// Witness schedule output for `sat`.
        #[arg(long)]
        witness: Option<PathBuf>,
        /// Minimum center distance for `continuous`.
        #[arg(long, default_value_t = 2.0)]
        sep: f64,
    },
}

/// Error reported as JSON on stderr; `code` 1 is a semantic failure, 2 I/O or usage.
#[derive(Debug, Serialize)]
struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn semantic(kind: &'static str, e: impl ToString) -> Self {
        Failure { code: 1, kind, message: e.to_string() }
    }

    fn io(e: impl ToString) -> Self {
        Failure { code: 2, kind: "io", message: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e)
    }
}

impl From<io::IoError> for Failure {
    fn from(e: io::IoError) -> Self {
        Failure::io(e)
    }
}

fn read(p: &Path) -> Result<String, Failure> {
    fs::read_to_string(p).map_err(|e| Failure::io(format!("{}: {e}", p.display())))
}

fn write(p: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir)?;
    }
    fs::write(p, text).map_err(|e| Failure::io(format!("{}: {e}", p.display())))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", serde_json::to_string(&f).expect("serializable"));
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = Config::load(&cli.config).map_err(Failure::io)?;
    match cli.cmd {
        Cmd::Plan { input, out } => {
            let inst = io::instance_from_json(&read(&input)?)?;
            let s = plan_auto(&inst).map_err(|e| Failure::semantic("plan", e))?;
            write(&out, &io::schedule_to_json(&s))?;
            let d = max_distance(&inst);
            println!("makespan={} d={} stretch={}", s.makespan(), d, ratio(s.makespan() as f64, d as f64));
        }
        Cmd::PlanColored { input, target, out, instance_out } => {
            let a = io::image_from_json(&read(&input)?)?;
            let b = io::image_from_json(&read(&target)?)?;
            let p = plan_colored(&a, &b).map_err(|e| Failure::semantic("plan", e))?;
            write(&out, &io::schedule_to_json(&p.schedule))?;
            if let Some(path) = instance_out {
                write(&path, &io::instance_to_json(&p.instance))?;
            }
            println!("makespan={} bottleneck={} stretch={}", p.schedule.makespan(), p.bottleneck, ratio(p.schedule.makespan() as f64, p.bottleneck as f64));
        }
        Cmd::PlanContinuous { input, out, mode } => {
            let c = io::continuous_from_json(&read(&input)?)?;
            let ts = match mode {
                Mode::Separated => plan_separated(&c),
                Mode::Dense => plan_dense(&c),
            }
            .map_err(|e| Failure::semantic("plan", e))?;
            write(&out, &io::trajectories_to_json(&ts))?;
            let (t, d, n) = (ts.makespan(), c.d(), c.robots() as f64);
            println!("makespan={t:.6} d={d:.6} stretch={} ratio_sqrt={:.6}", ratio(t, d), t / (d + n.sqrt()).max(f64::MIN_POSITIVE));
        }
        Cmd::Validate { input, schedule } => {
            let text = read(&input)?;
            match io::detect(&text)? {
                Kind::Continuous => {
                    let c = io::continuous_from_json(&text)?;
                    let ts = io::trajectories_from_json(&read(&schedule)?)?;
                    let rep = validate_trajectories(&ts, &c);
                    println!("{}", serde_json::to_string(&rep).expect("serializable"));
                    if !rep.is_valid() {
                        return Err(Failure::semantic("violation", "trajectories are not compatible"));
                    }
                }
                _ => {
                    let inst = io::instance_from_json(&text)?;
                    let s = io::schedule_from_json(&read(&schedule)?)?;
                    let r = apply_schedule(&inst, &s).map_err(|e| Failure::semantic("violation", e))?;
                    debug_assert_eq!(r.positions, inst.target.positions);
                    println!("valid makespan={}", s.makespan());
                }
            }
        }
        Cmd::Render { input, schedule, frames_dir, animated } => {
            let inst = io::instance_from_json(&read(&input)?)?;
            let s = io::schedule_from_json(&read(&schedule)?)?;
            let frames = render::frames(&inst, &s).map_err(|e| Failure::semantic("violation", e))?;
            fs::create_dir_all(&frames_dir)?;
            for (k, f) in frames.iter().enumerate() {
                write(&frames_dir.join(format!("frame_{k:05}.svg")), f)?;
            }
            if let Some(path) = animated {
                write(&path, &render::animated(&inst, &s).map_err(|e| Failure::semantic("violation", e))?)?;
            }
            println!("frames={}", frames.len());
        }
        Cmd::Stats { corpus, out, gate } => {
            let rows = stats(&corpus)?;
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in &rows {
                w.serialize(r).map_err(Failure::io)?;
            }
            if rows.is_empty() {
                w.write_record(Row::HEADER).map_err(Failure::io)?;
            }
            let text = String::from_utf8(w.into_inner().map_err(Failure::io)?).expect("utf8");
            match out {
                Some(p) => write(&p, &text)?,
                None => print!("{text}"),
            }
            let max = |f: fn(&Row) -> Option<f64>| rows.iter().filter_map(f).fold(None, |m: Option<f64>, v| Some(m.map_or(v, |m| m.max(v))));
            let grid = max(|r| (r.kind == "grid").then_some(r.stretch).flatten());
            let sep = max(|r| (r.kind == "separated").then_some(r.stretch).flatten());
            let dense = max(|r| (r.kind == "dense").then_some(r.ratio_sqrt).flatten());
            eprintln!("instances={} max_stretch={grid:?} max_separated={sep:?} max_dense={dense:?}", rows.len());
            if gate {
                let over = [
                    (grid, cfg.frozen.grid_stretch, "grid stretch"),
                    (sep, cfg.frozen.separated_stretch, "separated stretch"),
                    (dense, cfg.frozen.dense_ratio, "dense ratio"),
                ];
                for (got, bound, what) in over {
                    if got.is_some_and(|g| g > bound) {
                        return Err(Failure::semantic("regression", format!("{what} {} exceeds {bound}", got.unwrap())));
                    }
                }
            }
        }
        Cmd::Oracle { input, cap } => {
            let inst = io::instance_from_json(&read(&input)?)?;
            match optimal_makespan(&inst, cap).map_err(|e| Failure::semantic("budget", e))? {
                Some(v) => println!("optimum={v}"),
                None => println!("optimum=unknown cap={cap}"),
            }
        }
        Cmd::Gen { kind, out, seed, n1, n2, robots, d, cnf, vars, clauses, witness, sep } => {
            let seed = seed.unwrap_or(cfg.seeds.gen);
            match kind {
                GenKind::Random => {
                    let dims = GridDims::new(n1, n2);
                    let inst = gen_random(dims, robots.unwrap_or(dims.cells()), d, seed).map_err(|e| Failure::semantic("gen", e))?;
                    write(&out, &io::instance_to_json(&inst))?;
                }
                GenKind::Sat => {
                    let f = match cnf {
                        Some(p) => Cnf::parse_dimacs(&read(&p)?).map_err(|e| Failure::semantic("gen", e))?,
                        None => (seed..)
                            .map(|s| gen_monotone_cnf(vars, clauses, s))
                            .find(|f| solve_sat(f).is_some())
                            .expect("satisfiable formulas exist"),
                    };
                    let a = solve_sat(&f);
                    info!("formula satisfiable: {}", a.is_some());
                    let g = gen_sat_instance(&f, a.as_deref()).map_err(|e| Failure::semantic("gen", e))?;
                    write(&out, &io::instance_to_json(&g.instance))?;
                    if let (Some(p), Some(w)) = (witness, &g.witness) {
                        write(&p, &io::schedule_to_json(w))?;
                    }
                    println!("critical_makespan={} satisfiable={}", g.makespan, a.is_some());
                }
                GenKind::Hex => {
                    write(&out, &io::continuous_to_json(&gen_hex(robots.unwrap_or(19))))?;
                }
                GenKind::Continuous => {
                    let n = robots.unwrap_or(25);
                    let side = (n as f64).sqrt() * 1.6 * sep;
                    let c = gen_continuous(n, sep, side, seed).map_err(|e| Failure::semantic("gen", e))?;
                    write(&out, &io::continuous_to_json(&c))?;
                }
            }
        }
    }
    Ok(())
}

fn ratio(a: f64, b: f64) -> String {
    if b > 0.0 {
        format!("{:.6}", a / b)
    } else {
        "n/a".into()
    }
}

#[derive(Serialize)]
struct Row {
    file: String,
    kind: &'static str,
    robots: usize,
    d: f64,
    makespan: f64,
    stretch: Option<f64>,
    ratio_sqrt: Option<f64>,
}

impl Row {
    const HEADER: [&'static str; 7] = ["file", "kind", "robots", "d", "makespan", "stretch", "ratio_sqrt"];
}

/// One row per `.json` instance in `dir`, planned in parallel. Continuous
/// instances go to the separated planner when 4-separated, else dense.
fn stats(dir: &Path) -> Result<Vec<Row>, Failure> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Failure::io(format!("{}: {e}", dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    files.sort();
    use rayon::prelude::*;
    files
        .par_iter()
        .map(|p| {
            let text = read(p)?;
            let file = p.file_name().unwrap().to_string_lossy().into_owned();
            let row = match io::detect(&text)? {
                Kind::Instance => {
                    let inst = io::instance_from_json(&text)?;
                    let s = plan_auto(&inst).map_err(|e| Failure::semantic("plan", format!("{file}: {e}")))?;
                    let d = max_distance(&inst) as f64;
                    let m = s.makespan() as f64;
                    Row { file, kind: "grid", robots: inst.robots(), d, makespan: m, stretch: (d > 0.0).then(|| m / d), ratio_sqrt: None }
                }
                Kind::Continuous => {
                    let c = io::continuous_from_json(&text)?;
                    let separated = c.check_separation(4.0).is_ok();
                    let ts = if separated { plan_separated(&c) } else { plan_dense(&c) }
                        .map_err(|e| Failure::semantic("plan", format!("{file}: {e}")))?;
                    let (d, m, n) = (c.d(), ts.makespan(), c.robots() as f64);
                    Row {
                        file,
                        kind: if separated { "separated" } else { "dense" },
                        robots: c.robots(),
                        d,
                        makespan: m,
                        stretch: (d > 0.0).then(|| m / d),
                        ratio_sqrt: (n > 0.0).then(|| m / (d + n.sqrt())),
                    }
                }
                _ => return Ok(None),
            };
            Ok(Some(row))
        })
        .collect::<Result<Vec<Option<Row>>, Failure>>()
        .map(|v| v.into_iter().flatten().collect())
}
