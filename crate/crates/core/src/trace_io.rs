//! JSON-lines trace files.
//!
//! Line 1 is the header (`"kind":"header"`) with the simulation parameters,
//! including the seed. Each following line is one round record:
//!
//! ```text
//! {"kind":"record","round":3,"r1":{"x":1,"y":0,"status":"active"},
//!  "r2":{"x":0,"y":1,"status":"active"},"res":{"x":3,"y":2,"fixed":false,"stay":0},
//!  "phase":"boundary","events":[]}
//! ```
//!
//! (one line in the file). Robots that have not entered have `null`
//! coordinates. The last line is the outcome (`"kind":"outcome"`). Output is
//! deterministic: equal traces serialize to equal bytes.

use serde::{Deserialize, Serialize};

use crate::adversary::SsyncAdversary;
use crate::config::{Configuration, Phase, ResourceState, RobotState, RobotStatus};
use crate::engine::{Outcome, RoundEvent, SimParams, Trace, TraceRecord};
use crate::error::{Error, Result};
use crate::grid::Vertex;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Line {
    Header {
        params: SimParams,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        ssync: Option<SsyncAdversary>,
    },
    Record(RecordLine),
    Outcome(Outcome),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RecordLine {
    round: u64,
    r1: RobotLine,
    r2: RobotLine,
    res: ResLine,
    phase: Phase,
    events: Vec<RoundEvent>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct RobotLine {
    x: Option<i32>,
    y: Option<i32>,
    status: RobotStatus,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
struct ResLine {
    x: i32,
    y: i32,
    fixed: bool,
    stay: u32,
}

impl From<RobotState> for RobotLine {
    fn from(r: RobotState) -> Self {
        let pos = r.position();
        RobotLine {
            x: pos.map(|v| v.x),
            y: pos.map(|v| v.y),
            status: r.status(),
        }
    }
}

impl RobotLine {
    fn state(self, round: u64) -> Result<RobotState> {
        let pos = match (self.x, self.y) {
            (Some(x), Some(y)) => Some(Vertex::new(x, y)),
            (None, None) => None,
            _ => return Err(malformed(round, "robot has only one coordinate")),
        };
        match (self.status, pos) {
            (RobotStatus::Outside, None) => Ok(RobotState::Outside),
            (RobotStatus::Active, Some(v)) => Ok(RobotState::Active(v)),
            (RobotStatus::Terminated, Some(v)) => Ok(RobotState::Terminated(v)),
            _ => Err(malformed(
                round,
                "robot status does not match its coordinates",
            )),
        }
    }
}

fn malformed(round: u64, what: &str) -> Error {
    Error::MalformedTrace(format!("round {round}: {what}"))
}

fn record_line(r: &TraceRecord) -> RecordLine {
    let c = &r.config;
    RecordLine {
        round: c.round,
        r1: c.r1.into(),
        r2: c.r2.into(),
        res: ResLine {
            x: c.res.position.x,
            y: c.res.position.y,
            fixed: c.res.fixed,
            stay: c.res.stay_count,
        },
        phase: r.phase,
        events: r.events.clone(),
    }
}

fn push_line(out: &mut String, line: &Line) {
    out.push_str(&serde_json::to_string(line).expect("trace lines always serialize"));
    out.push('\n');
}

pub fn to_jsonl(trace: &Trace) -> String {
    let mut out = String::new();
    push_line(
        &mut out,
        &Line::Header {
            params: trace.params.clone(),
            ssync: trace.ssync.clone(),
        },
    );
    for r in &trace.records {
        push_line(&mut out, &Line::Record(record_line(r)));
    }
    push_line(&mut out, &Line::Outcome(trace.outcome.clone()));
    out
}

/// Parses a trace. Records must be gap-free from round 0 and lie in the grid;
/// the phase labels are taken as written (the verifier recomputes them).
pub fn from_jsonl(text: &str) -> Result<Trace> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let parse = |(i, l): (usize, &str)| {
        serde_json::from_str::<Line>(l)
            .map_err(|e| Error::MalformedTrace(format!("line {}: {e}", i + 1)))
    };
    let (params, ssync) = match lines.next().map(parse).transpose()? {
        Some(Line::Header { params, ssync }) => (params, ssync),
        _ => {
            return Err(Error::MalformedTrace(
                "first line must be the header".into(),
            ))
        }
    };
    let mut records = Vec::new();
    let mut outcome = None;
    for line in lines {
        if outcome.is_some() {
            return Err(Error::MalformedTrace(
                "content after the outcome line".into(),
            ));
        }
        match parse(line)? {
            Line::Header { .. } => return Err(Error::MalformedTrace("second header".into())),
            Line::Outcome(o) => outcome = Some(o),
            Line::Record(r) => {
                if r.round != records.len() as u64 {
                    return Err(malformed(
                        r.round,
                        &format!("expected round {}", records.len()),
                    ));
                }
                let config = Configuration {
                    grid: params.grid,
                    round: r.round,
                    r1: r.r1.state(r.round)?,
                    r2: r.r2.state(r.round)?,
                    res: ResourceState {
                        position: Vertex::new(r.res.x, r.res.y),
                        stay_count: r.res.stay,
                        fixed: r.res.fixed,
                    },
                    t_f: params.t_f,
                };
                let inside = [
                    config.r1.position(),
                    config.r2.position(),
                    Some(config.res.position),
                ]
                .into_iter()
                .flatten()
                .all(|v| params.grid.contains(v));
                if !inside {
                    return Err(malformed(r.round, "position outside the grid"));
                }
                records.push(TraceRecord {
                    config,
                    phase: r.phase,
                    events: r.events,
                });
            }
        }
    }
    if records.is_empty() {
        return Err(Error::MalformedTrace("no records".into()));
    }
    let outcome = outcome.ok_or_else(|| Error::MalformedTrace("missing outcome line".into()))?;
    Ok(Trace {
        params,
        ssync,
        records,
        outcome,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::StrategyId;
    use crate::engine::{run_episode, ssync_run};
    use crate::grid::GridSpec;

    fn sample() -> Trace {
        let g = GridSpec::new(4, 5).unwrap();
        let p = SimParams {
            seed: 11,
            ..SimParams::new(g, 2, Vertex::new(3, 2), StrategyId::StayMaxRandom)
        };
        run_episode(&p).unwrap()
    }

    #[test]
    fn round_trip_is_exact() {
        let t = sample();
        let text = to_jsonl(&t);
        let back = from_jsonl(&text).unwrap();
        assert_eq!(back, t);
        assert_eq!(to_jsonl(&back), text);
    }

    #[test]
    fn ssync_round_trip() {
        let g = GridSpec::new(4, 4).unwrap();
        let p = SimParams {
            max_rounds: 50,
            ..SimParams::new(g, 1, Vertex::new(2, 2), StrategyId::GreedyEvade)
        };
        let t = ssync_run(&p, &SsyncAdversary::alternating_escape()).unwrap();
        assert_eq!(from_jsonl(&to_jsonl(&t)).unwrap(), t);
    }

    #[test]
    fn layout_of_lines() {
        let text = to_jsonl(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert!(
            lines[0].starts_with(r#"{"kind":"header","params":{"grid":{"m":4,"n":5"#),
            "{}",
            lines[0]
        );
        assert!(lines[1].starts_with(
            r#"{"kind":"record","round":0,"r1":{"x":0,"y":0,"status":"active"},"r2":{"x":null,"y":null,"status":"outside"},"res":{"x":3,"y":2,"fixed":false,"stay":0},"phase":"entry","events":[{"kind":"entered""#
        ), "{}", lines[1]);
        assert!(lines
            .last()
            .unwrap()
            .starts_with(r#"{"kind":"outcome","result":"rendezvous","rounds":"#));
    }

    #[test]
    fn rejects_broken_files() {
        let text = to_jsonl(&sample());
        let lines: Vec<&str> = text.lines().collect();
        assert!(from_jsonl("").is_err());
        assert!(from_jsonl(&lines[1..].join("\n")).is_err());
        assert!(from_jsonl(&lines[..lines.len() - 1].join("\n")).is_err());
        let mut gap = lines.clone();
        gap.remove(2);
        assert!(from_jsonl(&gap.join("\n")).is_err());
        let outside = text.replacen(r#""res":{"x":3,"y":2"#, r#""res":{"x":9,"y":2"#, 1);
        assert!(matches!(
            from_jsonl(&outside),
            Err(Error::MalformedTrace(_))
        ));
    }
}
