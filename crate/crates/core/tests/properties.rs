use proptest::prelude::*;

use swarmplan::colored::{bottleneck_matching, plan_colored, Image};
use swarmplan::continuous::{plan_dense, plan_separated, validate_trajectories};
use swarmplan::generate::{gen_continuous, gen_random};
use swarmplan::grid::{validate_step, Sim};
use swarmplan::oracle::optimal_makespan;
use swarmplan::partition::{partition_subflows, sum_flows};
use swarmplan::realization::realize_all;
use swarmplan::rotatesort::{plan_rotatesort, swap_batch};
use swarmplan::sat::{gen_monotone_cnf, gen_sat_instance, solve_sat};
use swarmplan::scheduler::{plan_auto, plan_full};
use swarmplan::tiling::{build_flow, build_tiling, remove_bidirectional, remove_crossings};
use swarmplan::{apply_schedule, max_distance, Configuration, GridDims, Instance, Move, Pos, Step};

fn instance() -> impl Strategy<Value = Instance> {
    (2u32..14, 2u32..14, 0.05f64..1.0, 1u32..6, any::<u64>()).prop_map(|(n1, n2, fill, d, seed)| {
        let dims = GridDims::new(n1, n2);
        let robots = ((dims.cells() as f64 * fill) as usize).max(1);
        gen_random(dims, robots, d, seed).unwrap()
    })
}

fn full_instance(lo: u32, hi: u32) -> impl Strategy<Value = Instance> {
    (lo..hi, lo..hi, 1u32..5, any::<u64>()).prop_map(|(n1, n2, d, seed)| {
        let dims = GridDims::new(n1.max(3), n2);
        gen_random(dims, dims.cells(), d, seed).unwrap()
    })
}

fn moves() -> impl Strategy<Value = Move> {
    prop_oneof![Just(Move::Wait), Just(Move::North), Just(Move::East), Just(Move::South), Just(Move::West)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn makespan_at_least_max_distance(inst in instance()) {
        let s = plan_auto(&inst).unwrap();
        apply_schedule(&inst, &s).unwrap();
        prop_assert!(s.makespan() >= max_distance(&inst) as usize);
    }

    #[test]
    fn reversed_schedule_restores_start(inst in instance()) {
        let s = plan_auto(&inst).unwrap();
        let mut sim = Sim::new(&inst.start);
        sim.apply_all(&s).unwrap();
        sim.apply_all(&s.reversed()).unwrap();
        prop_assert_eq!(sim.config(), inst.start.clone());
    }

    #[test]
    fn validate_step_is_total_and_deterministic(inst in instance(), ms in prop::collection::vec(moves(), 1..200)) {
        let step = Step::from_moves(ms.iter().take(inst.robots()).enumerate().map(|(r, &m)| (r as u32, m)).collect());
        let a = validate_step(&inst.start, &step);
        let b = validate_step(&inst.start, &step);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn planner_never_beats_the_oracle(n1 in 1u32..4, n2 in 2u32..4, k in 1usize..4, seed in any::<u64>()) {
        let dims = GridDims::new(n1, n2);
        let inst = gen_random(dims, k.min(dims.cells()), 4, seed).unwrap();
        if let Some(opt) = optimal_makespan(&inst, 64).unwrap() {
            let s = plan_auto(&inst).unwrap();
            prop_assert!(s.makespan() as u32 >= opt);
        }
    }

    #[test]
    fn bottleneck_bounds_every_matching(pts in prop::collection::btree_set((0i32..6, 0i32..6), 2..14)) {
        let pts: Vec<Pos> = pts.into_iter().map(|(x, y)| Pos::new(x, y)).collect();
        let k = pts.len() / 2;
        let (a, b) = (&pts[..k], &pts[k..2 * k]);
        let (v, m) = bottleneck_matching(a, b).unwrap();
        let identity = (0..k).map(|i| a[i].manhattan(b[i])).max().unwrap();
        prop_assert!(v <= identity);
        prop_assert_eq!((0..k).map(|i| a[i].manhattan(b[m[i]])).max().unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn swap_batch_twice_is_identity(inst in full_instance(2, 10), picks in prop::collection::vec((any::<prop::sample::Index>(), any::<bool>()), 0..20)) {
        let dims = inst.dims;
        let mut used = std::collections::HashSet::new();
        let mut swaps = Vec::new();
        for (ix, horizontal) in picks {
            let a = dims.pos(ix.index(dims.cells()));
            let b = if horizontal { Pos::new(a.x + 1, a.y) } else { Pos::new(a.x, a.y + 1) };
            if dims.contains(b) && !used.contains(&a) && !used.contains(&b) {
                used.insert(a);
                used.insert(b);
                swaps.push((a, b));
            }
        }
        let once = swap_batch(&inst.start, &swaps).unwrap();
        let mut sim = Sim::new(&inst.start);
        sim.apply_all(&once).unwrap();
        let mid = sim.config();
        for &(a, b) in &swaps {
            prop_assert_eq!(mid.positions.iter().position(|&p| p == a), inst.start.positions.iter().position(|&p| p == b));
        }
        let twice = swap_batch(&mid, &swaps).unwrap();
        sim.apply_all(&twice).unwrap();
        prop_assert_eq!(sim.config(), inst.start.clone());
    }

    #[test]
    fn rotatesort_keeps_the_grid_full(inst in full_instance(2, 12)) {
        let s = plan_rotatesort(&inst).unwrap();
        let mut sim = Sim::new(&inst.start);
        for st in &s.steps {
            sim.apply(st).unwrap();
            prop_assert!(sim.config().is_full());
        }
        prop_assert_eq!(sim.config(), inst.target.clone());
    }

    #[test]
    fn preprocessing_is_consistent(d in 1u32..3, extra in 0u32..20, seed in any::<u64>()) {
        let n = 24 * d + extra;
        let inst = gen_random(GridDims::new(n, n), (n * n) as usize, d, seed).unwrap();
        let tiling = build_tiling(inst.dims, d);
        let (s1, c1, _) = remove_crossings(&inst.start, &inst.target, &tiling).unwrap();
        let (s2, c2, flow) = remove_bidirectional(&c1, &inst.target, &tiling).unwrap();
        let mut sim = Sim::new(&inst.start);
        sim.apply_all(&s1).unwrap();
        prop_assert_eq!(sim.config(), c1.clone());
        sim.apply_all(&s2).unwrap();
        prop_assert_eq!(sim.config(), c2.clone());
        prop_assert_eq!(build_flow(&c2, &inst.target, &tiling).unwrap(), flow.clone());
        prop_assert!(flow.is_circulation() && flow.is_unidirectional());
        prop_assert!(flow.crossings(&tiling).is_empty());
        prop_assert!(flow.max_weight() <= 576 * d * d);
        let drift = inst.start.positions.iter().zip(&c2.positions).map(|(a, b)| a.manhattan(*b)).max().unwrap();
        prop_assert!(drift <= 24 * d, "drift {drift}");

        let parts = partition_subflows(&flow, d, &tiling).unwrap();
        prop_assert_eq!(sum_flows(&parts), flow);
        prop_assert!(parts.iter().all(|p| p.max_weight() <= d));
        let s3 = realize_all(&c2, &inst.target, &parts, d, &tiling).unwrap();
        sim.apply_all(&s3).unwrap();
        let end = sim.config();
        for (p, q) in end.positions.iter().zip(&inst.target.positions) {
            prop_assert_eq!(tiling.tile_of(*p), tiling.tile_of(*q));
        }
    }

    #[test]
    fn colored_plans_match_colors(n1 in 3u32..10, n2 in 2u32..10, colors in 1u32..4, seed in any::<u64>()) {
        let dims = GridDims::new(n1, n2);
        let inst = gen_random(dims, dims.cells() / 2, 3, seed).unwrap();
        let (mut is, mut it) = (Image::empty(dims), Image::empty(dims));
        for r in 0..inst.robots() {
            let c = 1 + (r as u32 % colors);
            is.set(inst.start.positions[r], c);
            it.set(inst.target.positions[r], c);
        }
        let plan = plan_colored(&is, &it).unwrap();
        let end = apply_schedule(&plan.instance, &plan.schedule).unwrap();
        let mut got = Image::empty(dims);
        for (r, &p) in end.positions.iter().enumerate() {
            got.set(p, plan.instance.colors.as_ref().unwrap()[r]);
        }
        prop_assert_eq!(got, it);
        prop_assert!(plan.schedule.makespan() >= plan.bottleneck as usize);
    }

    #[test]
    fn full_plans_validate(inst in full_instance(3, 30)) {
        let s = plan_full(&inst).unwrap();
        apply_schedule(&inst, &s).unwrap();
    }

    #[test]
    fn sat_witnesses_stay_within_m(n in 3usize..6, m in 1usize..6, seed in any::<u64>()) {
        let f = gen_monotone_cnf(n, m, seed);
        if let Some(a) = solve_sat(&f) {
            let si = gen_sat_instance(&f, Some(&a)).unwrap();
            let w = si.witness.unwrap();
            apply_schedule(&si.instance, &w).unwrap();
            prop_assert!(w.makespan() <= si.makespan);
            // Polynomial layout: the bounding grid is O(M) on each side.
            prop_assert!(si.instance.dims.n1 as usize <= 4 * si.makespan && si.instance.dims.n2 as usize <= 4 * si.makespan);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn continuous_plans_validate(n in 1usize..16, seed in any::<u64>()) {
        let dense = gen_continuous(n, 2.0, 6.0 * (n as f64).sqrt() + 4.0, seed).unwrap();
        let ts = plan_dense(&dense).unwrap();
        prop_assert!(validate_trajectories(&ts, &dense).is_valid());
        let sep = gen_continuous(n, 4.0, 10.0 * (n as f64).sqrt() + 8.0, seed).unwrap();
        let ts = plan_separated(&sep).unwrap();
        prop_assert!(validate_trajectories(&ts, &sep).is_valid());
    }
}

#[test]
fn full_configuration_check() {
    let dims = GridDims::new(2, 2);
    let c = Configuration::new(dims, (0..4).map(|i| dims.pos(i)).collect()).unwrap();
    assert!(c.is_full());
}
