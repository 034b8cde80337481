//! Table-driven finite model loaded from JSON.
//!
//! ```json
//! {
//!   "events": [{"id": "calm", "prob": 0.5}, {"id": "busy", "prob": 0.5}],
//!   "actions": ["slow", "fast"],
//!   "c": [1.0],
//!   "penalty_shift": 0.0,
//!   "table": [
//!     {"event": "calm", "action": "slow", "y_hat": 1.0, "t_hat": 1.0, "z_hat": [0.0],
//!      "outcomes": [{"y": 1.0, "T": 1.0, "z": [0.0], "prob": 1.0}]}
//!   ]
//! }
//! ```
//!
//! Every `(event, action)` pair needs exactly one table entry. The declared
//! means are checked against the outcome distribution on load.

use std::fmt;
use std::path::Path;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{validate_probabilities, Outcome, RenewalModel};
use crate::controller::PerformanceTriple;
use crate::error::{Error, Result};

/// Largest allowed gap between a declared mean and the mean of its outcome
/// distribution.
pub const MEAN_TOLERANCE: f64 = 1e-9;

/// Event or action identifier; JSON strings and numbers are both accepted.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Label {
    Int(i64),
    Str(String),
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Int(i) => write!(f, "{i}"),
            Label::Str(s) => f.write_str(s),
        }
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::Str(s.to_string())
    }
}

impl From<i64> for Label {
    fn from(i: i64) -> Self {
        Label::Int(i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticEvent {
    pub id: Label,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutcomeSpec {
    pub y: f64,
    #[serde(rename = "T")]
    pub t: f64,
    pub z: Vec<f64>,
    pub prob: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticEntry {
    pub event: Label,
    pub action: Label,
    pub y_hat: f64,
    pub t_hat: f64,
    pub z_hat: Vec<f64>,
    pub outcomes: Vec<OutcomeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    pub events: Vec<SyntheticEvent>,
    pub actions: Vec<Label>,
    pub c: Vec<f64>,
    #[serde(default)]
    pub penalty_shift: f64,
    pub table: Vec<SyntheticEntry>,
}

impl SyntheticConfig {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    /// Config whose outcomes are deterministic and equal to the means.
    /// `rows[e][a] = (y, T, z)`; events and actions are labelled by index.
    pub fn deterministic(probs: &[f64], c: &[f64], rows: &[Vec<(f64, f64, Vec<f64>)>]) -> Self {
        let num_actions = rows.first().map_or(0, Vec::len);
        let mut table = Vec::new();
        for (e, row) in rows.iter().enumerate() {
            for (a, (y, t, z)) in row.iter().enumerate() {
                table.push(SyntheticEntry {
                    event: Label::Int(e as i64),
                    action: Label::Int(a as i64),
                    y_hat: *y,
                    t_hat: *t,
                    z_hat: z.clone(),
                    outcomes: vec![OutcomeSpec {
                        y: *y,
                        t: *t,
                        z: z.clone(),
                        prob: 1.0,
                    }],
                });
            }
        }
        Self {
            events: probs
                .iter()
                .enumerate()
                .map(|(i, &prob)| SyntheticEvent {
                    id: Label::Int(i as i64),
                    prob,
                })
                .collect(),
            actions: (0..num_actions as i64).map(Label::Int).collect(),
            c: c.to_vec(),
            penalty_shift: 0.0,
            table,
        }
    }

    #[cfg(test)]
    pub(crate) fn deterministic_two_event(p0: f64) -> Self {
        Self::deterministic(
            &[p0, 1.0 - p0],
            &[1.0],
            &[vec![(1.0, 1.0, vec![0.0])], vec![(2.0, 1.0, vec![0.0])]],
        )
    }
}

#[derive(Debug, Clone)]
struct Cell {
    perf: PerformanceTriple,
    /// Outcomes with cumulative probabilities, last one forced to 1.
    outcomes: Vec<(f64, Outcome)>,
}

#[derive(Debug, Clone)]
pub struct SyntheticModel {
    probs: Vec<f64>,
    levels: Vec<f64>,
    shift: f64,
    event_ids: Vec<Label>,
    action_ids: Vec<Label>,
    cells: Vec<Cell>,
}

impl SyntheticModel {
    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_config(SyntheticConfig::from_path(path)?)
    }

    /// Validates the table and builds the model. Errors name the offending
    /// `(event, action)` pair.
    pub fn from_config(config: SyntheticConfig) -> Result<Self> {
        let probs: Vec<f64> = config.events.iter().map(|e| e.prob).collect();
        validate_probabilities(&probs)?;
        if config.actions.is_empty() {
            return Err(Error::Model("action list is empty".into()));
        }
        if let Some(c) = config.c.iter().find(|c| !c.is_finite() || **c < 0.0) {
            return Err(Error::Model(format!(
                "constraint level {c} must be nonnegative"
            )));
        }
        if !config.penalty_shift.is_finite() {
            return Err(Error::Model("penalty_shift must be finite".into()));
        }
        let event_ids: Vec<Label> = config.events.iter().map(|e| e.id.clone()).collect();
        let action_ids = config.actions.clone();
        check_unique(&event_ids, "event")?;
        check_unique(&action_ids, "action")?;

        let num_l = config.c.len();
        let num_a = action_ids.len();
        let mut cells: Vec<Option<Cell>> = vec![None; event_ids.len() * num_a];
        for entry in &config.table {
            let fail = |reason: String| Error::Table {
                event: entry.event.to_string(),
                action: entry.action.to_string(),
                reason,
            };
            let e = event_ids
                .iter()
                .position(|id| *id == entry.event)
                .ok_or_else(|| fail("unknown event".into()))?;
            let a = action_ids
                .iter()
                .position(|id| *id == entry.action)
                .ok_or_else(|| fail("unknown action".into()))?;
            if cells[e * num_a + a].is_some() {
                return Err(fail("duplicate table entry".into()));
            }
            cells[e * num_a + a] = Some(build_cell(entry, num_l).map_err(fail)?);
        }
        let cells = cells
            .into_iter()
            .enumerate()
            .map(|(i, cell)| {
                cell.ok_or_else(|| Error::Table {
                    event: event_ids[i / num_a].to_string(),
                    action: action_ids[i % num_a].to_string(),
                    reason: "missing table entry".into(),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        Ok(Self {
            probs,
            levels: config.c,
            shift: config.penalty_shift,
            event_ids,
            action_ids,
            cells,
        })
    }

    fn cell(&self, event: usize, action: usize) -> Result<&Cell> {
        if event >= self.probs.len() || action >= self.action_ids.len() {
            return Err(Error::Model(format!(
                "pair ({event}, {action}) outside a {}x{} table",
                self.probs.len(),
                self.action_ids.len()
            )));
        }
        Ok(&self.cells[event * self.action_ids.len() + action])
    }
}

fn check_unique(ids: &[Label], what: &str) -> Result<()> {
    for (i, id) in ids.iter().enumerate() {
        if ids[..i].contains(id) {
            return Err(Error::Model(format!("duplicate {what} id {id}")));
        }
    }
    Ok(())
}

fn build_cell(entry: &SyntheticEntry, num_l: usize) -> std::result::Result<Cell, String> {
    if entry.z_hat.len() != num_l {
        return Err(format!(
            "z_hat has {} entries, expected {num_l}",
            entry.z_hat.len()
        ));
    }
    if !(entry.t_hat >= 1.0) {
        return Err(format!("t_hat {} is below 1", entry.t_hat));
    }
    if entry.outcomes.is_empty() {
        return Err("no outcomes".into());
    }
    let mut total = 0.0;
    let mut mean_y = 0.0;
    let mut mean_t = 0.0;
    let mut mean_z = vec![0.0; num_l];
    let mut outcomes = Vec::with_capacity(entry.outcomes.len());
    for o in &entry.outcomes {
        if !(o.prob >= 0.0 && o.prob <= 1.0) {
            return Err(format!("outcome probability {} invalid", o.prob));
        }
        if !(o.t >= 1.0) {
            return Err(format!("outcome frame length {} is below 1", o.t));
        }
        if o.z.len() != num_l {
            return Err(format!(
                "outcome z has {} entries, expected {num_l}",
                o.z.len()
            ));
        }
        if !o.y.is_finite() || o.z.iter().any(|z| !z.is_finite()) || !o.t.is_finite() {
            return Err("outcome values must be finite".into());
        }
        total += o.prob;
        mean_y += o.prob * o.y;
        mean_t += o.prob * o.t;
        for (m, z) in mean_z.iter_mut().zip(&o.z) {
            *m += o.prob * z;
        }
        outcomes.push((
            total,
            Outcome {
                y: o.y,
                t: o.t,
                z: o.z.clone(),
            },
        ));
    }
    if (total - 1.0).abs() > MEAN_TOLERANCE {
        return Err(format!("outcome probabilities sum to {total}"));
    }
    let mismatch = |name: &str, declared: f64, actual: f64| {
        ((declared - actual).abs() > MEAN_TOLERANCE)
            .then(|| format!("declared {name} {declared} but outcomes average {actual}"))
    };
    if let Some(msg) = mismatch("y_hat", entry.y_hat, mean_y)
        .or_else(|| mismatch("t_hat", entry.t_hat, mean_t))
        .or_else(|| {
            entry
                .z_hat
                .iter()
                .zip(&mean_z)
                .find_map(|(d, a)| mismatch("z_hat", *d, *a))
        })
    {
        return Err(msg);
    }
    if let Some(last) = outcomes.last_mut() {
        last.0 = 1.0;
    }
    Ok(Cell {
        perf: PerformanceTriple {
            y_hat: entry.y_hat,
            t_hat: entry.t_hat,
            z_hat: entry.z_hat.clone(),
        },
        outcomes,
    })
}

impl RenewalModel for SyntheticModel {
    fn event_probabilities(&self) -> &[f64] {
        &self.probs
    }

    fn num_actions(&self) -> usize {
        self.action_ids.len()
    }

    fn constraint_levels(&self) -> &[f64] {
        &self.levels
    }

    fn expectations(&self, event: usize, action: usize) -> Result<PerformanceTriple> {
        Ok(self.cell(event, action)?.perf.clone())
    }

    fn realize(&self, event: usize, action: usize, rng: &mut dyn RngCore) -> Result<Outcome> {
        let cell = self.cell(event, action)?;
        if cell.outcomes.len() == 1 {
            return Ok(cell.outcomes[0].1.clone());
        }
        let u: f64 = rng.random();
        let pick = cell
            .outcomes
            .iter()
            .find(|(cum, _)| u < *cum)
            .unwrap_or(&cell.outcomes[cell.outcomes.len() - 1]);
        Ok(pick.1.clone())
    }

    fn penalty_shift(&self) -> f64 {
        self.shift
    }

    fn event_label(&self, event: usize) -> String {
        self.event_ids
            .get(event)
            .map_or_else(|| event.to_string(), Label::to_string)
    }

    fn action_label(&self, action: usize) -> String {
        self.action_ids
            .get(action)
            .map_or_else(|| action.to_string(), Label::to_string)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point(declared_y: f64) -> SyntheticConfig {
        let json = format!(
            r#"{{
              "events": [{{"id": "only", "prob": 1.0}}],
              "actions": ["a"],
              "c": [1.0],
              "table": [{{
                "event": "only", "action": "a",
                "y_hat": {declared_y}, "t_hat": 1.0, "z_hat": [0.0],
                "outcomes": [
                  {{"y": 0.0, "T": 1.0, "z": [0.0], "prob": 0.5}},
                  {{"y": 2.0, "T": 1.0, "z": [0.0], "prob": 0.5}}
                ]
              }}]
            }}"#
        );
        SyntheticConfig::from_json_str(&json).unwrap()
    }

    #[test]
    fn deterministic_single_pair() {
        let cfg = SyntheticConfig::deterministic(&[1.0], &[1.0], &[vec![(1.0, 1.0, vec![0.0])]]);
        let m = SyntheticModel::from_config(cfg).unwrap();
        let p = m.expectations(0, 0).unwrap();
        assert_eq!((p.y_hat, p.t_hat), (1.0, 1.0));
    }

    #[test]
    fn two_point_mean_check() {
        assert!(SyntheticModel::from_config(two_point(1.0)).is_ok());
        let err = SyntheticModel::from_config(two_point(2.0)).unwrap_err();
        let msg = err.to_string();
        assert!(
            msg.contains("only") && msg.contains('a') && msg.contains("y_hat"),
            "{msg}"
        );
    }

    #[test]
    fn missing_and_duplicate_entries_rejected() {
        let mut cfg = two_point(1.0);
        cfg.table.push(cfg.table[0].clone());
        assert!(matches!(
            SyntheticModel::from_config(cfg),
            Err(Error::Table { reason, .. }) if reason.contains("duplicate")
        ));

        let mut cfg = two_point(1.0);
        cfg.actions.push(Label::from("b"));
        assert!(matches!(
            SyntheticModel::from_config(cfg),
            Err(Error::Table { reason, .. }) if reason.contains("missing")
        ));
    }

    #[test]
    fn short_frames_and_bad_probabilities_rejected() {
        let mut cfg = two_point(1.0);
        cfg.table[0].outcomes[0].t = 0.5;
        cfg.table[0].t_hat = 0.75;
        assert!(SyntheticModel::from_config(cfg).is_err());

        let mut cfg = two_point(1.0);
        cfg.events[0].prob = 0.9;
        assert!(SyntheticModel::from_config(cfg).is_err());

        let mut cfg = two_point(1.0);
        cfg.table[0].outcomes[1].prob = 0.6;
        assert!(SyntheticModel::from_config(cfg).is_err());
    }

    #[test]
    fn numeric_labels_parse() {
        let json = r#"{"events":[{"id":0,"prob":1}],"actions":[7],"c":[],
            "table":[{"event":0,"action":7,"y_hat":2,"t_hat":1,"z_hat":[],
            "outcomes":[{"y":2,"T":1,"z":[],"prob":1}]}]}"#;
        let m = SyntheticModel::from_config(SyntheticConfig::from_json_str(json).unwrap()).unwrap();
        assert_eq!(m.action_label(0), "7");
        assert_eq!(m.num_constraints(), 0);
    }
}
