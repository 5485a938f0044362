//! Worst-case results against the reference envelope C·(T_f+1)·(m+n).

use std::fmt;

use serde::Serialize;

use super::minimax::{WorstCaseResult, WorstRounds};

pub const DEFAULT_ENVELOPE_CONSTANT: u64 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundFlag {
    AboveEnvelope,
    NonTerminating,
    Violation,
}

impl fmt::Display for BoundFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BoundFlag::AboveEnvelope => "above-envelope",
            BoundFlag::NonTerminating => "non-terminating",
            BoundFlag::Violation => "violation",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub m: i32,
    pub n: i32,
    pub tf: u32,
    /// Round count, or `non-terminating` / `violation`.
    pub worst_rounds: String,
    pub envelope: u64,
    pub boundary_worst: u64,
    pub gather_worst: u64,
    pub states_explored: usize,
    /// worst_rounds / ((T_f+1)(m+n)), empty unless finite.
    pub ratio: Option<f64>,
    pub flag: Option<BoundFlag>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub constant: u64,
    pub rows: Vec<BoundRow>,
}

impl BoundReport {
    pub fn flagged(&self) -> impl Iterator<Item = &BoundRow> {
        self.rows.iter().filter(|r| r.flag.is_some())
    }

    /// Smallest and largest growth ratio over the finite rows.
    pub fn ratio_range(&self) -> Option<(f64, f64)> {
        let ratios = self.rows.iter().filter_map(|r| r.ratio);
        ratios.fold(None, |acc, r| match acc {
            None => Some((r, r)),
            Some((lo, hi)) => Some((lo.min(r), hi.max(r))),
        })
    }

    /// Largest ratio divided by the smallest.
    pub fn ratio_spread(&self) -> Option<f64> {
        self.ratio_range().map(|(lo, hi)| hi / lo)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        for row in &self.rows {
            w.serialize(CsvRow::from(row)).expect("in-memory csv");
        }
        String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv is utf-8")
    }
}

#[derive(Serialize)]
struct CsvRow<'a> {
    m: i32,
    n: i32,
    tf: u32,
    worst_rounds: &'a str,
    envelope: u64,
    boundary_worst: u64,
    gather_worst: u64,
    states_explored: usize,
    ratio: String,
    flag: String,
}

impl<'a> From<&'a BoundRow> for CsvRow<'a> {
    fn from(r: &'a BoundRow) -> Self {
        CsvRow {
            m: r.m,
            n: r.n,
            tf: r.tf,
            worst_rounds: &r.worst_rounds,
            envelope: r.envelope,
            boundary_worst: r.boundary_worst,
            gather_worst: r.gather_worst,
            states_explored: r.states_explored,
            ratio: r.ratio.map(|x| format!("{x:.3}")).unwrap_or_default(),
            flag: r.flag.map(|f| f.to_string()).unwrap_or_default(),
        }
    }
}

pub fn envelope(constant: u64, m: i32, n: i32, t_f: u32) -> u64 {
    constant * (t_f as u64 + 1) * (m + n) as u64
}

pub fn bound_report(results: &[WorstCaseResult], constant: u64) -> BoundReport {
    let rows = results
        .iter()
        .map(|r| {
            let env = envelope(constant, r.m, r.n, r.t_f);
            let scale = ((r.t_f as u64 + 1) * (r.m + r.n) as u64) as f64;
            let (worst, ratio, flag) = match &r.worst_rounds {
                WorstRounds::Finite { rounds } => (
                    rounds.to_string(),
                    Some(*rounds as f64 / scale),
                    (*rounds > env).then_some(BoundFlag::AboveEnvelope),
                ),
                WorstRounds::NonTerminating => (
                    "non-terminating".to_string(),
                    None,
                    Some(BoundFlag::NonTerminating),
                ),
                WorstRounds::Violation { .. } => {
                    ("violation".to_string(), None, Some(BoundFlag::Violation))
                }
            };
            BoundRow {
                m: r.m,
                n: r.n,
                tf: r.t_f,
                worst_rounds: worst,
                envelope: env,
                boundary_worst: r.boundary_worst,
                gather_worst: r.gather_worst,
                states_explored: r.states_explored,
                ratio,
                flag,
            }
        })
        .collect();
    BoundReport { constant, rows }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Vertex;
    use crate::policy::{CornerGuard, EntryChoice};
    use crate::verifier::minimax::Witness;

    fn result(m: i32, n: i32, t_f: u32, worst: WorstRounds) -> WorstCaseResult {
        WorstCaseResult {
            m,
            n,
            t_f,
            worst_rounds: worst,
            witness: Witness {
                g0: Vertex::new(1, 1),
                entry: EntryChoice::Default,
                corner_guard: CornerGuard::AnyCorner,
                moves: vec![],
            },
            final_key: None,
            states_explored: 10,
            boundary_worst: 2,
            gather_worst: 3,
        }
    }

    #[test]
    fn single_row() {
        let r = bound_report(&[result(3, 3, 1, WorstRounds::Finite { rounds: 12 })], 12);
        assert_eq!(r.rows.len(), 1);
        assert_eq!(r.rows[0].envelope, 144);
        assert_eq!(r.rows[0].ratio, Some(1.0));
        assert_eq!(r.flagged().count(), 0);
        assert_eq!(
            r.to_csv(),
            "m,n,tf,worst_rounds,envelope,boundary_worst,gather_worst,states_explored,ratio,flag\n\
             3,3,1,12,144,2,3,10,1.000,\n"
        );
    }

    #[test]
    fn exceedances_are_flagged() {
        let r = bound_report(
            &[
                result(3, 3, 1, WorstRounds::Finite { rounds: 145 }),
                result(4, 5, 1, WorstRounds::NonTerminating),
                result(3, 4, 2, WorstRounds::Finite { rounds: 21 }),
            ],
            12,
        );
        let flags: Vec<_> = r.rows.iter().map(|r| r.flag).collect();
        assert_eq!(
            flags,
            [
                Some(BoundFlag::AboveEnvelope),
                Some(BoundFlag::NonTerminating),
                None
            ]
        );
        let (lo, hi) = r.ratio_range().unwrap();
        assert_eq!((lo, hi), (1.0, 145.0 / 12.0));
        assert!(r
            .to_csv()
            .contains("4,5,1,non-terminating,216,2,3,10,,non-terminating"));
    }
}
