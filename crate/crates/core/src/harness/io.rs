//! CSV and JSON file formats.
//!
//! Frame records: `n,event,action,y,T,z1..zL,summand,theta,q1..qL`, where
//! `theta` and `q*` are the values after the frame. Sweep table:
//! `V,delta,rep,avg_penalty_ratio,avg_resource_1..L,avg_queue,final_theta,frames,slots`.
//! Diagnostics table:
//! `n,theta_hat,theta,theta_tilde,q_norm,K,flag_A,flag_B,flag_E`.
//! Floats use Rust's shortest round-trip formatting, so records read back
//! bit-exactly.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::sweep::SweepRow;
use crate::controller::FrameRecord;
use crate::diagnostics::DiagnosticRow;
use crate::error::{Error, Result};

/// `prefix` with `suffix` appended to its file name.
pub fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn record_header(num_constraints: usize) -> Vec<String> {
    let mut h: Vec<String> = ["n", "event", "action", "y", "T"]
        .map(String::from)
        .to_vec();
    h.extend((1..=num_constraints).map(|l| format!("z{l}")));
    h.push("summand".into());
    h.push("theta".into());
    h.extend((1..=num_constraints).map(|l| format!("q{l}")));
    h
}

pub fn write_records<W: Write>(
    out: W,
    records: &[FrameRecord],
    num_constraints: usize,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(record_header(num_constraints))?;
    for r in records {
        let mut row = vec![
            r.n.to_string(),
            r.event.to_string(),
            r.action.to_string(),
            r.y.to_string(),
            r.t.to_string(),
        ];
        row.extend(r.z.iter().map(f64::to_string));
        row.push(r.summand.to_string());
        row.push(r.theta_after.to_string());
        row.extend(r.queues_after.iter().map(f64::to_string));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}

pub fn write_records_file(
    path: &Path,
    records: &[FrameRecord],
    num_constraints: usize,
) -> Result<()> {
    write_records(create(path)?, records, num_constraints)
}

/// Parses a records table; the constraint count is inferred from the
/// header.
pub fn read_records<R: Read>(input: R) -> Result<(Vec<FrameRecord>, usize)> {
    let mut rdr = csv::Reader::from_reader(input);
    let header = rdr.headers()?.clone();
    let num_l = header.iter().filter(|h| h.starts_with('z')).count();
    let expected = record_header(num_l);
    if header.iter().ne(expected.iter().map(String::as_str)) {
        return Err(Error::Config(format!(
            "records header {:?} does not match {:?}",
            header.iter().collect::<Vec<_>>(),
            expected
        )));
    }
    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        let num = |i: usize| -> Result<f64> {
            row[i].parse().map_err(|_| {
                Error::Config(format!(
                    "row {}: column {} is not a number: '{}'",
                    line + 1,
                    expected[i],
                    &row[i]
                ))
            })
        };
        let int = |i: usize| -> Result<u64> {
            row[i].parse().map_err(|_| {
                Error::Config(format!(
                    "row {}: column {} is not an integer: '{}'",
                    line + 1,
                    expected[i],
                    &row[i]
                ))
            })
        };
        let z = (0..num_l).map(|l| num(5 + l)).collect::<Result<Vec<_>>>()?;
        let q = (0..num_l)
            .map(|l| num(7 + num_l + l))
            .collect::<Result<Vec<_>>>()?;
        records.push(FrameRecord {
            n: int(0)?,
            event: int(1)? as usize,
            action: int(2)? as usize,
            y: num(3)?,
            t: num(4)?,
            z,
            summand: num(5 + num_l)?,
            theta_after: num(6 + num_l)?,
            queues_after: q,
        });
    }
    Ok((records, num_l))
}

pub fn read_records_file(path: &Path) -> Result<(Vec<FrameRecord>, usize)> {
    read_records(File::open(path).map_err(|e| Error::io(path, e))?)
}

pub fn sweep_header(num_constraints: usize) -> Vec<String> {
    let mut h: Vec<String> = ["V", "delta", "rep", "avg_penalty_ratio"]
        .map(String::from)
        .to_vec();
    h.extend((1..=num_constraints).map(|l| format!("avg_resource_{l}")));
    h.extend(["avg_queue", "final_theta", "frames", "slots"].map(String::from));
    h
}

pub fn write_sweep<W: Write>(out: W, rows: &[SweepRow], num_constraints: usize) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(sweep_header(num_constraints))?;
    for r in rows {
        let mut row = vec![r.v.to_string(), r.delta.to_string(), r.rep.to_string()];
        match &r.result {
            Ok(s) => {
                row.push(s.avg_penalty_ratio.to_string());
                row.extend(s.avg_resource_ratios.iter().map(f64::to_string));
                row.push(s.avg_queue.to_string());
                row.push(s.final_theta.to_string());
                row.push(s.frames.to_string());
                row.push(s.slots.to_string());
            }
            Err(_) => row.extend(std::iter::repeat_n("NaN".to_string(), 5 + num_constraints)),
        }
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}

pub fn write_sweep_file(path: &Path, rows: &[SweepRow], num_constraints: usize) -> Result<()> {
    write_sweep(create(path)?, rows, num_constraints)
}

pub fn write_diagnostics<W: Write>(out: W, rows: &[DiagnosticRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "theta_hat",
        "theta",
        "theta_tilde",
        "q_norm",
        "K",
        "flag_A",
        "flag_B",
        "flag_E",
    ])?;
    let flag = |b: bool| if b { "1" } else { "0" };
    for r in rows {
        w.write_record([
            r.n.to_string(),
            r.theta_hat.to_string(),
            r.theta.to_string(),
            r.theta_tilde.to_string(),
            r.q_norm.to_string(),
            r.k.to_string(),
            flag(r.flag_a).into(),
            flag(r.flag_b).into(),
            flag(r.flag_e).into(),
        ])?;
    }
    w.flush().map_err(|e| Error::Csv(e.into()))
}

pub fn write_diagnostics_file(path: &Path, rows: &[DiagnosticRow]) -> Result<()> {
    write_diagnostics(create(path)?, rows)
}
