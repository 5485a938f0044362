//! Exhaustive symmetry and anonymity checks of a policy.
//!
//! Robots share no orientation, so a policy may depend on the view only up to
//! the grid's symmetries. Where the protocol leaves a free choice, only the
//! set of permitted moves has to be equivariant; where exactly one move is
//! permitted, the decision itself must map along.

use std::collections::BTreeSet;
use std::fmt;

use crate::config::{Configuration, ResourceState, RobotState, RobotView};
use crate::engine::robot_moves;
use crate::grid::{GridSpec, Symmetry, Vertex};
use crate::policy::{Move, Policy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    /// `decide` returns one of its own candidates.
    DecisionIsCandidate,
    /// candidates(σ·view) = σ·candidates(view).
    CandidatesEquivariant,
    /// decide(σ·view) = σ·decide(view) whenever the candidate set is a singleton.
    ForcedMoveEquivariant,
    /// Swapping the robots' labels swaps their moves.
    LabelSwap,
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Property::DecisionIsCandidate => "decision-is-candidate",
            Property::CandidatesEquivariant => "candidates-equivariant",
            Property::ForcedMoveEquivariant => "forced-move-equivariant",
            Property::LabelSwap => "label-swap",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceFailure {
    pub property: Property,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivarianceReport {
    pub grid: GridSpec,
    pub symmetries: Vec<Symmetry>,
    pub views_checked: usize,
    pub configs_checked: usize,
    /// First counterexample per property.
    pub failures: Vec<EquivarianceFailure>,
}

impl EquivarianceReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn get(&self, property: Property) -> Option<&EquivarianceFailure> {
        self.failures.iter().find(|f| f.property == property)
    }
}

impl fmt::Display for EquivarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let props = [
            Property::DecisionIsCandidate,
            Property::CandidatesEquivariant,
            Property::ForcedMoveEquivariant,
            Property::LabelSwap,
        ];
        for p in props {
            match self.get(p) {
                None => writeln!(f, "pass {p}")?,
                Some(fail) => writeln!(f, "FAIL {p}: {}", fail.detail)?,
            }
        }
        write!(
            f,
            "{} views x {} symmetries, {} configurations",
            self.views_checked,
            self.symmetries.len(),
            self.configs_checked
        )
    }
}

/// Every view a robot can compute on `g`, in the door-normalized frame: two
/// distinct robot positions (or the other one outside while this one is on the
/// door) and any resource position.
pub fn all_views(g: &GridSpec) -> Vec<RobotView> {
    let (m, n) = (g.m(), g.n());
    let door = Vertex::new(0, 0);
    let cells: Vec<Vertex> = (0..m)
        .flat_map(|y| (0..n).map(move |x| Vertex::new(x, y)))
        .collect();
    let mut out = Vec::new();
    for &me in &cells {
        let others = std::iter::once(None)
            .filter(|_| me == door)
            .chain(cells.iter().filter(|&&o| o != me).map(|&o| Some(o)));
        for other in others {
            for &res in &cells {
                out.push(RobotView {
                    m,
                    n,
                    me,
                    at_door: me == door,
                    other,
                    other_on_res: other == Some(res),
                    res,
                });
            }
        }
    }
    out
}

fn move_set(moves: impl IntoIterator<Item = Move>) -> BTreeSet<String> {
    moves.into_iter().map(|m| m.to_string()).collect()
}

/// Runs all four properties over every view and every configuration on `g`.
pub fn equivariance_suite(g: &GridSpec, policy: &dyn Policy) -> EquivarianceReport {
    let symmetries = Symmetry::automorphisms(g.m(), g.n());
    let mut failures: Vec<EquivarianceFailure> = Vec::new();
    let mut fail = |property: Property, detail: String| {
        if !failures.iter().any(|f| f.property == property) {
            failures.push(EquivarianceFailure { property, detail });
        }
    };

    let views = all_views(g);
    for view in &views {
        let decision = policy.decide(view);
        let candidates = policy.candidates(view);
        if !candidates.contains(&decision) {
            fail(
                Property::DecisionIsCandidate,
                format!("{view:?}: {decision} not among {candidates:?}"),
            );
        }
        for &sym in &symmetries {
            let image = view.transformed(sym);
            let mapped = move_set(
                candidates
                    .iter()
                    .map(|mv| mv.transformed(sym, view.m, view.n)),
            );
            let got = move_set(policy.candidates(&image));
            if got != mapped {
                fail(
                    Property::CandidatesEquivariant,
                    format!("{sym:?} on {view:?}: expected {mapped:?}, got {got:?}"),
                );
            }
            if candidates.len() == 1 {
                let want = decision.transformed(sym, view.m, view.n);
                let got = policy.decide(&image);
                if got != want {
                    fail(
                        Property::ForcedMoveEquivariant,
                        format!("{sym:?} on {view:?}: expected {want}, got {got}"),
                    );
                }
            }
        }
    }

    let mut configs_checked = 0;
    let cells: Vec<Vertex> = g.vertices().collect();
    for &a in &cells {
        for &b in &cells {
            if a == b {
                continue;
            }
            for &res in &cells {
                if res == a {
                    continue;
                }
                let b_state = if res == b {
                    RobotState::Terminated(b)
                } else {
                    RobotState::Active(b)
                };
                let make = |r1, r2| Configuration {
                    grid: *g,
                    round: 1,
                    r1,
                    r2,
                    res: ResourceState {
                        position: res,
                        stay_count: 0,
                        fixed: res == b,
                    },
                    t_f: 1,
                };
                let straight = make(RobotState::Active(a), b_state);
                let swapped = make(b_state, RobotState::Active(a));
                let ms = robot_moves(&straight, policy);
                let mw = robot_moves(&swapped, policy);
                configs_checked += 1;
                if ms[0] != mw[1] || ms[1] != mw[0] {
                    fail(
                        Property::LabelSwap,
                        format!("robots at {a} and {b}, res {res}: {ms:?} vs swapped {mw:?}"),
                    );
                }
            }
        }
    }

    failures.sort_by_key(|f| f.property);
    EquivarianceReport {
        grid: *g,
        symmetries,
        views_checked: views.len(),
        configs_checked,
        failures,
    }
}
