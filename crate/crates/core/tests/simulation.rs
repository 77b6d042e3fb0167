use std::path::PathBuf;

use noc_realloc::appmodel::AppSpec;
use noc_realloc::ilp::BuildOptions;
use noc_realloc::scenario::{FaultAction, FaultEvent, FaultKind, PlatformSpec, Scenario, ScenarioOptions};
use noc_realloc::simulator::{audit_applied, run_scenario, EventKind, Simulator};

fn scen(name: &str) -> Scenario {
    Scenario::load(
        PathBuf::from(env!("CARGO_MANIFEST_DIR"))
            .join("scenarios")
            .join(format!("{name}.json")),
    )
    .unwrap()
}

fn ev(t: u64, cu: usize, kind: FaultKind, action: FaultAction) -> FaultEvent {
    FaultEvent { t, cu, kind, action }
}

fn assert_audit(s: &Scenario, applied: &[noc_realloc::simulator::AppliedRecord]) {
    let bad = audit_applied(
        &s.platform().unwrap(),
        &s.registry().unwrap(),
        s.options.build_options(),
        applied,
    )
    .unwrap();
    assert!(bad.is_empty(), "{bad:?}");
}

#[test]
fn crashed_allocator_replica_is_moved() {
    let mut s = Scenario::demo();
    let sim = Simulator::new(&s).unwrap();
    let node = sim.registry().node_of_alloc(2);
    let host = sim.allocation().unwrap().host_of(node).unwrap();
    s.faults = vec![ev(1, host, FaultKind::Crash, FaultAction::Inject)];
    let mut sim = Simulator::new(&s).unwrap();
    sim.step().unwrap();
    let outputs = &sim.state().replica_outputs;
    assert!(outputs[2].is_none());
    assert_eq!(outputs[0], outputs[1]);
    sim.step().unwrap();
    let new_host = sim.allocation().unwrap().host_of(node);
    assert!(new_host.is_some_and(|h| h != host));
}

#[test]
fn corrupted_allocator_is_outvoted_and_blamed() {
    let mut s = Scenario::demo();
    let sim = Simulator::new(&s).unwrap();
    let host = sim
        .allocation()
        .unwrap()
        .host_of(sim.registry().node_of_alloc(0))
        .unwrap();
    s.faults = vec![
        ev(1, host, FaultKind::Computational, FaultAction::Inject),
        ev(2, 15, FaultKind::Crash, FaultAction::Inject),
    ];
    s.options.horizon = Some(8);
    let mut sim = Simulator::new(&s).unwrap();
    sim.step().unwrap();
    sim.step().unwrap();
    let votes: Vec<_> = sim
        .trace()
        .iter()
        .filter(|e| e.kind == EventKind::Vote && e.t == 2)
        .collect();
    assert_eq!(votes.len(), 1);
    assert_eq!(votes[0].payload["minority"], serde_json::json!([0]));
    assert!(sim.state().suspected[host]);
    for _ in 0..4 {
        sim.step().unwrap();
    }
    assert!(sim.allocation().unwrap().occupant(host).is_none());
    let out = sim.into_outcome();
    assert_audit(&s, &out.applied);
}

fn lone_allocator(degraded: bool) -> Scenario {
    Scenario {
        platform: PlatformSpec {
            rows: 2,
            cols: 3,
            torus: false,
            cu_types: None,
        },
        applications: vec![
            AppSpec::grid("work", 1, 1, 2),
            AppSpec::grid("alloc_1", 2, 1, 1).as_allocator(0),
            AppSpec::grid("alloc_2", 3, 1, 1).as_allocator(0),
            AppSpec::grid("alloc_3", 4, 1, 1).as_allocator(0),
        ],
        options: ScenarioOptions {
            degraded_vote: degraded,
            ..Default::default()
        },
        faults: Vec::new(),
        plant: Default::default(),
    }
}

#[test]
fn single_survivor_strict_versus_degraded() {
    for degraded in [false, true] {
        let mut s = lone_allocator(degraded);
        let sim = Simulator::new(&s).unwrap();
        let a = sim.allocation().unwrap().clone();
        let reg = sim.registry();
        let h2 = a.host_of(reg.node_of_alloc(1)).unwrap();
        let h3 = a.host_of(reg.node_of_alloc(2)).unwrap();
        s.faults = vec![
            ev(1, h2, FaultKind::Crash, FaultAction::Inject),
            ev(1, h3, FaultKind::Crash, FaultAction::Inject),
        ];
        s.options.horizon = Some(4);
        let out = run_scenario(&s).unwrap();
        let applies_after = out.applied.iter().filter(|r| r.t > 0).count();
        if degraded {
            assert!(applies_after >= 1, "degraded survivor should apply");
        } else {
            assert_eq!(applies_after, 0, "strict mode needs two replicas");
            assert!(out.stats.failed_votes >= 1);
        }
        assert_audit(&s, &out.applied);
    }
}

#[test]
fn recover_only_has_no_reallocations() {
    let mut s = scen("small_2x2");
    s.faults = vec![ev(1, 0, FaultKind::Crash, FaultAction::Recover)];
    let out = run_scenario(&s).unwrap();
    assert!(!out.trace.iter().any(|e| e.kind == EventKind::Realloc));
}

#[test]
fn isolated_cus_stay_empty_through_demo() {
    let s = scen("demo");
    let g = s.platform().unwrap();
    let out = run_scenario(&s).unwrap();
    for rec in &out.applied {
        let faulty: Vec<usize> = (0..16).filter(|&i| rec.faulty[i]).collect();
        let f = noc_realloc::platform::FaultState::with_faulty(16, &faulty);
        let hs = noc_realloc::platform::healthy_subgraph(&g, &f).unwrap();
        let layout = noc_realloc::ilp::build_model(&g, &s.registry().unwrap(), &f, None, BuildOptions::default())
            .unwrap()
            .layout;
        let a = noc_realloc::allocation::Allocation::from_solution(&rec.x, &layout);
        for cu in 0..16 {
            if hs.is_isolated(cu) || f.faulty[cu] {
                assert!(a.occupant(cu).is_none(), "t={} cu={cu}", rec.t);
            }
        }
    }
    assert_audit(&s, &out.applied);
}

#[test]
fn closed_loop_settles() {
    let out = run_scenario(&scen("demo_healthy")).unwrap();
    let s = scen("demo_healthy");
    let p = s.plant;
    // proportional control leaves a steady offset: thrust* = kp·r·m / (1 + kp·m)
    let km = p.gain_kp * p.max_thrust;
    let steady = km * p.reference / (1.0 + km);
    let first = (out.plant_log[0].1 - steady).abs();
    let last = (out.plant_log.last().unwrap().1 - steady).abs();
    assert!(last < first && last < 1e-3, "{first} -> {last}");
}

#[test]
fn trace_kinds_are_known() {
    let out = run_scenario(&scen("tmr")).unwrap();
    for line in out.trace_jsonl().lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let kind = v["kind"].as_str().unwrap();
        assert!(
            [
                "fault",
                "recover",
                "solve",
                "vote",
                "apply",
                "drop",
                "realloc",
                "controller",
                "plant"
            ]
            .contains(&kind),
            "{kind}"
        );
    }
}
