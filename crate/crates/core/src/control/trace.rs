use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ledger::ResourceLedger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// `ΔJ` fell to or below the stopping threshold.
    Converged,
    MaxIterations,
    /// The target fidelity was reached.
    TargetReached,
    /// The shot budget ran out before the next iteration.
    ShotBudget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    /// Cost as estimated from measurements.
    pub cost: f64,
    /// `J^(k) − J^(k−1)`; absent for the initial record.
    pub delta_cost: Option<f64>,
    /// Measured fidelity with the target.
    pub fidelity: f64,
    /// Experiments and shots spent in this iteration.
    pub experiments: u64,
    pub shots: u64,
    pub shots_charged: u64,
    /// Noise-free cost and fidelity of the same pulse.
    pub cost_exact: f64,
    pub fidelity_exact: f64,
    /// Advisory monotonicity threshold, when an error budget was supplied.
    pub threshold: Option<f64>,
    pub pulse: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationTrace {
    pub algorithm: String,
    pub records: Vec<IterationRecord>,
    pub stop_reason: StopReason,
    pub ledger: ResourceLedger,
}

#[derive(Serialize)]
struct CsvRow {
    k: usize,
    #[serde(rename = "J")]
    cost: f64,
    #[serde(rename = "delta_J")]
    delta_cost: Option<f64>,
    fidelity: f64,
    experiments: u64,
    shots: u64,
    shots_charged: u64,
    #[serde(rename = "J_exact")]
    cost_exact: f64,
    fidelity_exact: f64,
}

#[derive(Serialize)]
struct PulseSidecar<'a> {
    algorithm: &'a str,
    dt: f64,
    pulses: Vec<&'a [f64]>,
}

fn writer<W: std::io::Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(w)
}

impl IterationTrace {
    pub fn new(algorithm: &str) -> Self {
        Self {
            algorithm: algorithm.into(),
            records: Vec::new(),
            stop_reason: StopReason::MaxIterations,
            ledger: ResourceLedger::default(),
        }
    }

    pub fn last(&self) -> Option<&IterationRecord> {
        self.records.last()
    }

    pub fn final_fidelity(&self) -> Option<f64> {
        self.last().map(|r| r.fidelity)
    }

    pub fn deltas(&self) -> Vec<f64> {
        self.records.iter().filter_map(|r| r.delta_cost).collect()
    }

    pub fn total_experiments(&self) -> u64 {
        self.records.iter().map(|r| r.experiments).sum()
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = writer(Vec::new());
        for r in &self.records {
            w.serialize(CsvRow {
                k: r.k,
                cost: r.cost,
                delta_cost: r.delta_cost,
                fidelity: r.fidelity,
                experiments: r.experiments,
                shots: r.shots,
                shots_charged: r.shots_charged,
                cost_exact: r.cost_exact,
                fidelity_exact: r.fidelity_exact,
            })?;
        }
        if self.records.is_empty() {
            return Err(Error::EmptyTrace);
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// JSON sidecar with the pulse of every iteration.
    pub fn pulses_json(&self, dt: f64) -> Result<String> {
        let side = PulseSidecar {
            algorithm: &self.algorithm,
            dt,
            pulses: self.records.iter().map(|r| r.pulse.as_slice()).collect(),
        };
        Ok(serde_json::to_string_pretty(&side)?)
    }
}

/// Writes `<stem>_cost.csv` with `(k, J)` and `<stem>_fidelity.csv` with
/// `(k, fidelity)` into `dir`.
pub fn emit_plotdata(trace: &IterationTrace, dir: &Path, stem: &str) -> Result<(PathBuf, PathBuf)> {
    if trace.records.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let cost_path = dir.join(format!("{stem}_cost.csv"));
    let fid_path = dir.join(format!("{stem}_fidelity.csv"));
    let mut cost = writer(fs::File::create(&cost_path)?);
    let mut fid = writer(fs::File::create(&fid_path)?);
    cost.write_record(["k", "J"])?;
    fid.write_record(["k", "fidelity"])?;
    for r in &trace.records {
        cost.serialize((r.k, r.cost))?;
        fid.serialize((r.k, r.fidelity))?;
    }
    cost.flush()?;
    fid.flush()?;
    Ok((cost_path, fid_path))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(k: usize, cost: f64, delta: Option<f64>) -> IterationRecord {
        IterationRecord {
            k,
            cost,
            delta_cost: delta,
            fidelity: cost,
            experiments: 3,
            shots: 0,
            shots_charged: 0,
            cost_exact: cost,
            fidelity_exact: cost,
            threshold: None,
            pulse: vec![0.1, 0.2],
        }
    }

    #[test]
    fn csv_layout() {
        let mut t = IterationTrace::new("krotov");
        t.records.push(record(0, 0.25, None));
        t.records.push(record(1, 0.5, Some(0.25)));
        let csv = t.to_csv().unwrap();
        let lines: Vec<&str> = csv.split('\n').collect();
        assert_eq!(lines[0], "k,J,delta_J,fidelity,experiments,shots,shots_charged,J_exact,fidelity_exact");
        assert_eq!(lines[1], "0,0.25,,0.25,3,0,0,0.25,0.25");
        assert_eq!(lines[2], "1,0.5,0.25,0.5,3,0,0,0.5,0.5");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn empty_trace_rejected() {
        let t = IterationTrace::new("grape");
        assert!(matches!(t.to_csv(), Err(Error::EmptyTrace)));
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(emit_plotdata(&t, dir.path(), "x"), Err(Error::EmptyTrace)));
    }

    #[test]
    fn plotdata_single_row() {
        let mut t = IterationTrace::new("crab");
        t.records.push(record(0, 0.75, None));
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = emit_plotdata(&t, dir.path(), "run").unwrap();
        assert_eq!(fs::read_to_string(a).unwrap(), "k,J\n0,0.75\n");
        assert_eq!(fs::read_to_string(b).unwrap(), "k,fidelity\n0,0.75\n");
    }

    #[test]
    fn sidecar_lists_pulses() {
        let mut t = IterationTrace::new("krotov");
        t.records.push(record(0, 0.25, None));
        let v: serde_json::Value = serde_json::from_str(&t.pulses_json(0.1).unwrap()).unwrap();
        assert_eq!(v["pulses"][0][1], 0.2);
    }
}
