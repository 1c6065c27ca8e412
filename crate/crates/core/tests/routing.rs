use swarmplan::generate::gen_random;
use swarmplan::grid::{validate_step, Sim, StepError};
use swarmplan::oracle::optimal_schedule;
use swarmplan::rotatesort::{gadget_table, plan_rotatesort, solve_small, swap_batch};
use swarmplan::{apply_schedule, Configuration, GridDims, Instance, Move, Pos, Step};

/// Largest plan_rotatesort length / 40 seen on 20x20 over seeds 0..100.
const C_RS: f64 = 15.03;

fn full(dims: GridDims) -> Configuration {
    Configuration::new(dims, (0..dims.cells()).map(|i| dims.pos(i)).collect()).unwrap()
}

#[test]
fn adjacent_exchange_is_a_swap_error() {
    let dims = GridDims::new(2, 1);
    let c = Configuration::new(dims, vec![Pos::new(0, 0), Pos::new(1, 0)]).unwrap();
    let step = Step::from_moves(vec![(0, Move::East), (1, Move::West)]);
    assert_eq!(validate_step(&c, &step), Err(StepError::Swap(0, 1)));
}

#[test]
fn three_step_transposition_on_2x3() {
    let dims = GridDims::new(3, 2);
    let start: Vec<Pos> = (0..6).map(|i| dims.pos(i)).collect();
    let mut target = start.clone();
    target.swap(0, 1);
    let inst = Instance::new(dims, start, target).unwrap();
    let s = optimal_schedule(&inst, 8).unwrap().unwrap();
    assert_eq!(s.makespan(), 3);
    apply_schedule(&inst, &s).unwrap();
    assert_eq!(solve_small(&inst).unwrap().makespan(), 3);
}

#[test]
fn gadget_diameter_is_seven() {
    let t = gadget_table();
    assert_eq!(t.len(), 720);
    assert_eq!(t.diameter(), 7);
}

#[test]
fn swap_in_3x3_leaves_others_in_place() {
    let dims = GridDims::new(3, 3);
    let c = full(dims);
    let (a, b) = (Pos::new(0, 1), Pos::new(1, 1));
    let s = swap_batch(&c, &[(a, b)]).unwrap();
    assert!(s.makespan() <= 7);
    let mut sim = Sim::new(&c);
    sim.apply_all(&s).unwrap();
    for (r, &p) in sim.pos.iter().enumerate() {
        let want = match c.positions[r] {
            q if q == a => b,
            q if q == b => a,
            q => q,
        };
        assert_eq!(p, want);
    }
}

#[test]
fn ten_disjoint_swaps_on_12x12() {
    let dims = GridDims::new(12, 12);
    let c = full(dims);
    let swaps: Vec<(Pos, Pos)> = (0..10).map(|i| (Pos::new(i * 3 % 10, i), Pos::new(i * 3 % 10 + 1, i))).collect();
    let s = swap_batch(&c, &swaps).unwrap();
    assert!(s.makespan() <= 12 * 7, "{}", s.makespan());
    let mut sim = Sim::new(&c);
    sim.apply_all(&s).unwrap();
    for &(a, b) in &swaps {
        assert_eq!(sim.at(a), Some(dims.index(b) as u32));
    }
}

#[test]
fn reversal_on_4x4() {
    let dims = GridDims::new(4, 4);
    let start: Vec<Pos> = (0..16).map(|i| dims.pos(i)).collect();
    let target: Vec<Pos> = (0..16).map(|i| dims.pos(15 - i)).collect();
    let inst = Instance::new(dims, start, target).unwrap();
    let s = plan_rotatesort(&inst).unwrap();
    assert_eq!(apply_schedule(&inst, &s).unwrap(), inst.target);
}

#[test]
fn linear_on_20x20() {
    for seed in 0..100 {
        let inst = gen_random(GridDims::new(20, 20), 400, 40, seed).unwrap();
        let s = plan_rotatesort(&inst).unwrap();
        apply_schedule(&inst, &s).unwrap();
        assert!(s.makespan() as f64 <= C_RS * 40.0, "seed {seed}: {}", s.makespan());
    }
}
