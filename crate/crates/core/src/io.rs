//! File formats: plain-text waveforms, JSON result records and CSV tables.
//!
//! A waveform file is a block of `# key: value` header lines followed by one row per
//! sample, `t omega0 omega1 phi`, where `phi` is the channel-1 phase of that sample's
//! segment. Numbers are written with 17 significant digits so reading a file back
//! reproduces every `f64` exactly.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gate::{PulseSchedule, ScheduleOrigin};
use crate::invariant::Segment;
use crate::platform::{map_to_platform, Platform};
use crate::sweeps::{SweepResult, TracePoint};

const WAVEFORM_MAGIC: &str = "lambda-holonomy waveform 1";

/// A schedule together with its platform assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub schedule: PulseSchedule,
    pub platform: Option<Platform>,
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_waveform<W: Write>(mut out: W, schedule: &PulseSchedule, platform: Option<Platform>) -> Result<()> {
    writeln!(out, "# {WAVEFORM_MAGIC}")?;
    match schedule.origin() {
        ScheduleOrigin::Noncyclic(p) => {
            writeln!(out, "# gate: theta={} phi={}", num(p.theta), num(p.phi))?;
            writeln!(out, "# amplitude: {}", num(p.amplitude))?;
        }
        ScheduleOrigin::Nhqc { theta, phi } => {
            writeln!(out, "# gate: theta={} phi={}", num(*theta), num(*phi))?;
        }
        ScheduleOrigin::External => {}
    }
    writeln!(out, "# origin: {}", serde_json::to_string(schedule.origin())?)?;
    writeln!(out, "# total: {}", num(schedule.total()))?;
    writeln!(out, "# dt: {}", num(schedule.dt()))?;
    writeln!(out, "# samples_per_segment: {}", schedule.samples_per_segment())?;
    let seg = [Segment::First, Segment::Second];
    writeln!(out, "# phase: {} {}", num(schedule.phase(seg[0])), num(schedule.phase(seg[1])))?;
    writeln!(
        out,
        "# phase0: {} {}",
        num(schedule.channel0_phase(seg[0])),
        num(schedule.channel0_phase(seg[1]))
    )?;
    if let Some(p) = platform {
        let m = map_to_platform(p);
        writeln!(out, "# platform: {} {} {} {}", p, m.zero, m.excited, m.one)?;
    }
    writeln!(out, "# columns: t omega0 omega1 phi")?;
    for (k, s) in schedule.samples().enumerate() {
        let phi = schedule.phase(schedule.segment_of(k));
        writeln!(out, "{} {} {} {}", num(s.t), num(s.omega0), num(s.omega1), num(phi))?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_waveform_file(path: &Path, schedule: &PulseSchedule, platform: Option<Platform>) -> Result<()> {
    write_waveform(BufWriter::new(File::create(path)?), schedule, platform)
}

fn parse_f64(text: &str, line: usize) -> Result<f64> {
    text.parse().map_err(|_| Error::Parse {
        line,
        message: format!("expected a number, got `{text}`"),
    })
}

fn parse_pair(text: &str, line: usize) -> Result<[f64; 2]> {
    let parts: Vec<&str> = text.split_whitespace().collect();
    match parts.as_slice() {
        [a, b] => Ok([parse_f64(a, line)?, parse_f64(b, line)?]),
        _ => Err(Error::Parse {
            line,
            message: format!("expected two numbers, got `{text}`"),
        }),
    }
}

pub fn read_waveform<R: BufRead>(input: R) -> Result<Waveform> {
    let mut header: BTreeMap<String, (usize, String)> = BTreeMap::new();
    let mut rows: Vec<[f64; 4]> = Vec::new();
    let mut saw_magic = false;
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if rest == WAVEFORM_MAGIC {
                saw_magic = true;
            } else if let Some((k, v)) = rest.split_once(':') {
                header.insert(k.trim().to_owned(), (lineno, v.trim().to_owned()));
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 4 {
            return Err(Error::Parse {
                line: lineno,
                message: format!("expected 4 columns, got {}", fields.len()),
            });
        }
        let mut row = [0.0; 4];
        for (slot, f) in row.iter_mut().zip(&fields) {
            *slot = parse_f64(f, lineno)?;
        }
        rows.push(row);
    }
    if !saw_magic {
        return Err(Error::Parse {
            line: 1,
            message: format!("missing `# {WAVEFORM_MAGIC}` header"),
        });
    }
    let field = |key: &str| {
        header.get(key).cloned().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("missing header `{key}`"),
        })
    };
    let (l, v) = field("total")?;
    let total = parse_f64(&v, l)?;
    let (l, v) = field("phase")?;
    let phase1 = parse_pair(&v, l)?;
    let phase0 = match header.get("phase0") {
        Some((l, v)) => parse_pair(v, *l)?,
        None => [0.0; 2],
    };
    let origin = match header.get("origin") {
        Some((l, v)) => serde_json::from_str(v).map_err(|e| Error::Parse {
            line: *l,
            message: format!("bad origin record: {e}"),
        })?,
        None => ScheduleOrigin::External,
    };
    let platform = match header.get("platform") {
        Some((_, v)) => Some(v.split_whitespace().next().unwrap_or_default().parse()?),
        None => None,
    };
    let schedule = PulseSchedule::new(
        total,
        rows.iter().map(|r| r[1]).collect(),
        rows.iter().map(|r| r[2]).collect(),
        phase0,
        phase1,
        origin,
    )?;
    if let Some((l, v)) = header.get("samples_per_segment") {
        let n: usize = v.parse().map_err(|_| Error::Parse {
            line: *l,
            message: format!("bad sample count `{v}`"),
        })?;
        if n != schedule.samples_per_segment() {
            return Err(Error::Parse {
                line: *l,
                message: format!("header says {n} samples per segment, rows give {}", schedule.samples_per_segment()),
            });
        }
    }
    let tol = 1e-9 * total;
    for (k, row) in rows.iter().enumerate() {
        if (row[0] - schedule.time(k)).abs() > tol {
            return Err(Error::Parse {
                line: 0,
                message: format!("row {k}: time {} is off the uniform grid ({})", row[0], schedule.time(k)),
            });
        }
        if row[3] != schedule.phase(schedule.segment_of(k)) {
            return Err(Error::Parse {
                line: 0,
                message: format!("row {k}: phase {} disagrees with the header", row[3]),
            });
        }
    }
    Ok(Waveform { schedule, platform })
}

pub fn read_waveform_file(path: &Path) -> Result<Waveform> {
    read_waveform(BufReader::new(File::open(path)?))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

/// One row per grid cell: axis coordinates, the main quantity, then any auxiliary columns.
/// Missing cells are empty fields.
pub fn write_sweep_csv<W: Write>(out: W, result: &SweepResult) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut head: Vec<String> = result.axes.iter().map(|a| a.name.clone()).collect();
    head.push(result.metadata.quantity.clone());
    head.extend(result.aux.keys().cloned());
    w.write_record(&head)?;
    let shape = result.shape();
    let cell = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
    for (flat, value) in result.values.iter().enumerate() {
        let mut rest = flat;
        let mut coords = vec![0.0; shape.len()];
        for (d, len) in shape.iter().enumerate().rev() {
            coords[d] = result.axes[d].values[rest % len];
            rest /= len;
        }
        let mut record: Vec<String> = coords.iter().map(|c| c.to_string()).collect();
        record.push(cell(*value));
        record.extend(result.aux.values().map(|col| cell(col[flat])));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv_file(path: &Path, result: &SweepResult) -> Result<()> {
    write_sweep_csv(BufWriter::new(File::create(path)?), result)
}

pub fn write_trace_csv<W: Write>(out: W, trace: &[TracePoint]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for p in trace {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_trace_csv_file(path: &Path, trace: &[TracePoint]) -> Result<()> {
    write_trace_csv(BufWriter::new(File::create(path)?), trace)
}

/// Quadrature components per channel, `I_k = Ω_k cos φ_k` and `Q_k = Ω_k sin φ_k`.
pub fn write_iq_csv<W: Write>(out: W, schedule: &PulseSchedule) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["t", "i0", "q0", "i1", "q1"])?;
    for (k, s) in schedule.samples().enumerate() {
        let seg = schedule.segment_of(k);
        let (s0, c0) = schedule.channel0_phase(seg).sin_cos();
        let (s1, c1) = schedule.phase(seg).sin_cos();
        w.write_record(
            [s.t, s.omega0 * c0, s.omega0 * s0, s.omega1 * c1, s.omega1 * s1]
                .iter()
                .map(|x| num(*x)),
        )?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_iq_csv_file(path: &Path, schedule: &PulseSchedule) -> Result<()> {
    write_iq_csv(BufWriter::new(File::create(path)?), schedule)
}
