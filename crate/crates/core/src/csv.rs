//! Sweep output as comma-separated values.
//!
//! Columns: `dt_s,epsilon_eV,channel,gamma_hz,b2,d_a,d_p,d,regime_ok`. Numbers
//! are written with 17 significant digits, enough to read every `f64` back
//! exactly. Lines end in `\n`.

use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sweep::SweepRow;
use crate::units::{energy_in, EnergyUnit};

pub const HEADER: [&str; 9] = [
    "dt_s",
    "epsilon_eV",
    "channel",
    "gamma_hz",
    "b2",
    "d_a",
    "d_p",
    "d",
    "regime_ok",
];

/// One output line, with the splitting already in eV.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub dt_s: f64,
    pub epsilon_ev: f64,
    pub channel: String,
    pub gamma_hz: f64,
    pub b2: f64,
    pub d_a: f64,
    pub d_p: f64,
    pub d: f64,
    pub regime_ok: bool,
}

impl From<&SweepRow> for CsvRecord {
    fn from(r: &SweepRow) -> Self {
        CsvRecord {
            dt_s: r.dt,
            epsilon_ev: energy_in(r.epsilon, EnergyUnit::EV).unwrap_or(f64::NAN),
            channel: r.channel.to_string(),
            gamma_hz: r.gamma,
            b2: r.b2,
            d_a: r.d_a,
            d_p: r.d_p,
            d: r.d,
            regime_ok: r.regime_ok,
        }
    }
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn csv_err(e: csv::Error) -> Error {
    Error::Io(e.to_string())
}

pub fn write_records<W: Write>(records: &[CsvRecord], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            num(r.dt_s),
            num(r.epsilon_ev),
            r.channel.clone(),
            num(r.gamma_hz),
            num(r.b2),
            num(r.d_a),
            num(r.d_p),
            num(r.d),
            r.regime_ok.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_csv<W: Write>(rows: &[SweepRow], out: W) -> Result<()> {
    let records: Vec<CsvRecord> = rows.iter().map(CsvRecord::from).collect();
    write_records(&records, out)
}

pub fn write_csv_file(rows: &[SweepRow], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut out = BufWriter::new(file);
    write_csv(rows, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(input);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().ne(HEADER) {
        return Err(Error::Io(format!(
            "unexpected header `{}`",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(csv_err)?;
        let line = i + 2;
        let f = |j: usize| -> Result<f64> {
            rec[j]
                .parse()
                .map_err(|_| Error::Io(format!("line {line}: `{}` is not a number", &rec[j])))
        };
        let regime_ok = match &rec[8] {
            "true" => true,
            "false" => false,
            other => return Err(Error::Io(format!("line {line}: bad regime flag `{other}`"))),
        };
        out.push(CsvRecord {
            dt_s: f(0)?,
            epsilon_ev: f(1)?,
            channel: rec[2].to_string(),
            gamma_hz: f(3)?,
            b2: f(4)?,
            d_a: f(5)?,
            d_p: f(6)?,
            d: f(7)?,
            regime_ok,
        });
    }
    Ok(out)
}
