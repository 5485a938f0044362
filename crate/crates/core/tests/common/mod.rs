#![allow(dead_code)]

use grid_rendezvous::config::ResourceState;
use grid_rendezvous::verifier::monitors::synthetic_trace;
use grid_rendezvous::verifier::Monitor;
use grid_rendezvous::{
    Configuration, GridSpec, Outcome, RobotState, SimParams, StrategyId, Trace, Vertex,
};

pub fn v(x: i32, y: i32) -> Vertex {
    Vertex::new(x, y)
}

/// Both robots active at `r1` and `r2` on a 6x6 grid.
pub fn at(r1: Vertex, r2: Vertex, res: Vertex, stay: u32, t_f: u32) -> Configuration {
    Configuration {
        grid: GridSpec::new(6, 6).unwrap(),
        round: 0,
        r1: RobotState::Active(r1),
        r2: RobotState::Active(r2),
        res: ResourceState {
            position: res,
            stay_count: stay,
            fixed: false,
        },
        t_f,
    }
}

fn trace(t_f: u32, configs: Vec<Configuration>) -> Trace {
    let g = configs[0].grid;
    let rounds = configs.len() as u64 - 1;
    let params = SimParams::new(g, t_f, configs[0].res.position, StrategyId::GreedyEvade);
    synthetic_trace(params, configs, Outcome::MaxRoundsExceeded { rounds })
}

/// Hand-made traces, each breaking the property of one monitor.
pub fn seeded_negatives() -> Vec<(Monitor, Trace)> {
    let a = trace(
        1,
        vec![
            at(v(0, 4), v(2, 0), v(3, 3), 0, 1),
            at(v(0, 5), v(2, 0), v(3, 3), 1, 1),
        ],
    );
    // resource lands on PD(r1), then drifts two rows away
    let b = trace(
        1,
        [v(3, 3), v(3, 2), v(3, 3), v(3, 4)]
            .iter()
            .map(|&res| at(v(0, 2), v(1, 5), res, 0, 1))
            .collect(),
    );
    // resource reaches PD(r1), then walks over to PD(r2)
    let c = trace(
        1,
        [
            v(1, 3),
            v(1, 2),
            v(2, 2),
            v(2, 3),
            v(2, 4),
            v(3, 4),
            v(4, 4),
        ]
        .iter()
        .map(|&res| at(v(0, 2), v(4, 5), res, 0, 1))
        .collect(),
    );
    let d = trace(
        1,
        vec![
            at(v(0, 2), v(2, 5), v(1, 2), 0, 1),
            at(v(0, 2), v(2, 5), v(1, 3), 0, 1),
        ],
    );
    // resource steps onto L2, the row through r2
    let e = trace(
        1,
        vec![
            at(v(0, 2), v(3, 3), v(2, 2), 0, 1),
            at(v(0, 2), v(3, 3), v(2, 3), 0, 1),
        ],
    );
    // r2 backs away and the containing rectangle grows a row
    let f = trace(
        1,
        vec![
            at(v(0, 2), v(3, 3), v(2, 2), 0, 1),
            at(v(0, 2), v(3, 4), v(2, 2), 1, 1),
        ],
    );
    // 2x2 rectangle at the far corner, robots never close in
    let g = trace(
        2,
        (0..4)
            .map(|k| at(v(4, 5), v(5, 4), v(5, 5), k % 3, 2))
            .collect(),
    );
    let model = trace(
        1,
        vec![
            at(v(0, 2), v(2, 0), v(3, 3), 0, 1),
            at(v(0, 2), v(2, 0), v(3, 5), 0, 1),
        ],
    );
    vec![
        (Monitor::BoundaryLines, a),
        (Monitor::DistAfterTrigger, b),
        (Monitor::OtherPdUncrossed, c),
        (Monitor::InitGatherPersists, d),
        (Monitor::ResourceOffSideLines, e),
        (Monitor::ContainingRectShrinks, f),
        (Monitor::FinalCapture, g),
        (Monitor::ModelRules, model),
    ]
}
