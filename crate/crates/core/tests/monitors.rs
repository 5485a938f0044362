mod common;

use grid_rendezvous::sweep::{episode_params, AdversaryKind};
use grid_rendezvous::verifier::{check_invariants, Monitor};
use grid_rendezvous::{run_episode, GridSpec};

#[test]
fn each_negative_is_caught_by_its_monitor() {
    for (monitor, trace) in common::seeded_negatives() {
        let report = check_invariants(&trace).unwrap();
        assert!(report.get(monitor).is_some(), "{monitor} missed:\n{report}");
    }
}

#[test]
fn negatives_cover_every_monitor() {
    let covered: Vec<Monitor> = common::seeded_negatives()
        .into_iter()
        .map(|(m, _)| m)
        .collect();
    assert_eq!(covered, Monitor::ALL);
}

#[test]
fn greedy_episodes_satisfy_the_model_rules() {
    let g = GridSpec::new(4, 5).unwrap();
    for seed in 0..50 {
        for adv in [AdversaryKind::Greedy, AdversaryKind::StayMaxRandom] {
            let t = run_episode(&episode_params(g, 2, adv, seed)).unwrap();
            let report = check_invariants(&t).unwrap();
            assert!(
                report.get(Monitor::ModelRules).is_none(),
                "seed {seed}: {report}"
            );
            assert!(
                report.get(Monitor::BoundaryLines).is_none(),
                "seed {seed}: {report}"
            );
        }
    }
}
