//! The exact solver against a naive enumeration of every assignment and
//! every per-request bandwidth in 1..=B, keeping only feasible points.

use edgesched::exact::solve_exact;
use edgesched::scengen::{generate, GenConfig};
use edgesched::{check_feasibility, evaluate, objective, ObjectiveKind, Scenario, Solution};

fn brute_force(s: &Scenario, kind: ObjectiveKind) -> Option<f64> {
    let n = s.request_count();
    let v = s.node_count();
    let bmax = s.nodes.iter().map(|x| x.bandwidth_capacity).max().unwrap();
    let mut best: Option<f64> = None;
    let mut assignment = vec![0usize; n];
    let mut bandwidth = vec![1u32; n];
    loop {
        loop {
            let sol = Solution::new(assignment.clone(), bandwidth.clone());
            if check_feasibility(s, &sol).is_empty() {
                let value = objective(&evaluate(s, &sol).unwrap(), kind);
                if best.is_none_or(|b| value < b) {
                    best = Some(value);
                }
            }
            let mut i = 0;
            while i < n && bandwidth[i] == bmax {
                bandwidth[i] = 1;
                i += 1;
            }
            if i == n {
                break;
            }
            bandwidth[i] += 1;
        }
        let mut i = 0;
        while i < n && assignment[i] == v - 1 {
            assignment[i] = 0;
            i += 1;
        }
        if i == n {
            return best;
        }
        assignment[i] += 1;
    }
}

#[test]
fn matches_brute_force_on_small_instances() {
    for seed in 0..12 {
        let cfg = GenConfig {
            request_count: 2 + (seed as usize % 3),
            bandwidth_mhz: 5,
            capacity_mhz: 220.0,
            seed,
            ..GenConfig::default()
        };
        let s: Scenario = generate(&cfg).unwrap();
        for kind in [ObjectiveKind::Total, ObjectiveKind::Makespan] {
            let oracle = brute_force(&s, kind);
            match solve_exact(&s, kind) {
                Ok((sol, value)) => {
                    let want = oracle.expect("oracle finds a solution too");
                    assert!((value - want).abs() <= 1e-12 * want, "seed {seed} {kind}: {value} vs {want}");
                    assert!(check_feasibility(&s, &sol).is_empty());
                }
                Err(_) => assert!(oracle.is_none(), "seed {seed} {kind}"),
            }
        }
    }
}
