//! CSV serialisation. Every file has a single header line with units in the
//! column names; numbers use Rust's shortest round-trip formatting.

use std::fs::File;
use std::io::Write;
use std::path::Path;

use crate::compensation::Correlogram;
use crate::error::Result;
use crate::sim::EventRecord;
use crate::sweep::{SweepParam, SweepResult};

/// A rectangular numeric table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| v.to_string()))?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        self.write(File::create(path)?)
    }

    pub fn read(path: &Path) -> Result<Table> {
        let mut r = csv::Reader::from_path(path)?;
        let header = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>().map_err(|e| {
                        crate::error::Error::Shape(format!("non-numeric field `{f}`: {e}"))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Table { header, rows })
    }
}

/// Axis columns, a complementary phase column when a phase axis is swept,
/// and `mi_bits`.
pub fn sweep_table(result: &SweepResult) -> Table {
    let axes: Vec<SweepParam> = std::iter::once(result.spec.axis1.param())
        .chain(result.spec.axis2.as_ref().map(|a| a.param()))
        .collect();
    let mut header: Vec<String> = axes.iter().map(|a| a.column().to_string()).collect();
    let extra = if axes.contains(&SweepParam::Phase) {
        Some(SweepParam::PhaseRad)
    } else if axes.contains(&SweepParam::PhaseRad) {
        Some(SweepParam::Phase)
    } else {
        None
    };
    if let Some(e) = extra {
        header.push(e.column().to_string());
    }
    header.push("mi_bits".to_string());
    let mut table = Table::new(header);
    for r in &result.rows {
        let mut row = vec![r.x1];
        row.extend(r.x2);
        match extra {
            Some(SweepParam::PhaseRad) => row.push(r.phase_rad()),
            Some(_) => row.push(r.phase_ps),
            None => {}
        }
        row.push(r.mi_bits);
        table.rows.push(row);
    }
    table
}

pub fn write_events<W: Write>(events: &[EventRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["true_bit", "timestamp_ps", "bin"])?;
    for e in events {
        w.write_record([e.true_bit.to_string(), e.timestamp.to_string(), e.bin.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_correlogram<W: Write>(corr: &Correlogram, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["lag_ps", "count"])?;
    for (k, c) in corr.counts().iter().enumerate() {
        w.write_record([corr.lag(k).to_string(), c.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_manifest<'a, W: Write>(
    entries: impl IntoIterator<Item = (&'a str, &'a str)>,
    out: W,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["key", "value"])?;
    for (k, v) in entries {
        w.write_record([k, v])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn events_csv_layout() {
        let mut buf = Vec::new();
        let events = [EventRecord {
            true_bit: 1,
            timestamp: 1234.5,
            bin: 3,
        }];
        write_events(&events, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "true_bit,timestamp_ps,bin\n1,1234.5,3\n");
    }

    #[test]
    fn correlogram_csv_layout() {
        let c = Correlogram::new(-10.0, 10.0, vec![0, 7, 1]).unwrap();
        let mut buf = Vec::new();
        write_correlogram(&c, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "lag_ps,count\n-10,0\n0,7\n10,1\n");
    }

    #[test]
    fn table_round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let mut t = Table::new(vec!["a".into(), "b".into()]);
        t.rows.push(vec![0.1 + 0.2, 1e-300]);
        t.rows.push(vec![-3.0, 2.0f64.sqrt()]);
        t.save(&path).unwrap();
        assert_eq!(Table::read(&path).unwrap(), t);
    }
}
