//! CSV form of solution fields: header `x,t,u[,ux]`, one row per grid point,
//! ordered by t then x, values printed with 17 significant digits.

use crate::error::{CliError, CliResult};
use reacdiff_core::{Provenance, SolutionField};
use std::io::{Read, Write};

pub fn fmt_num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_field<W: Write>(field: &SolutionField, out: W) -> CliResult<()> {
    let mut w = csv::Writer::from_writer(out);
    let with_ux = field.ux.is_some();
    if with_ux {
        w.write_record(["x", "t", "u", "ux"])?;
    } else {
        w.write_record(["x", "t", "u"])?;
    }
    for (it, &t) in field.ts.iter().enumerate() {
        for (ix, &x) in field.xs.iter().enumerate() {
            let mut row = vec![fmt_num(x), fmt_num(t), fmt_num(field.u_at(ix, it))];
            if let Some(ux) = field.ux_at(ix, it) {
                row.push(fmt_num(ux));
            }
            w.write_record(&row)?;
        }
    }
    w.flush().map_err(|e| CliError::io("<csv>", e))?;
    Ok(())
}

pub fn field_to_string(field: &SolutionField) -> CliResult<String> {
    let mut buf = Vec::new();
    write_field(field, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is ascii"))
}

/// Parse a field written by [`write_field`]; rows must form a full tensor grid.
pub fn read_field<R: Read>(input: R) -> CliResult<SolutionField> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    let with_ux = match headers.iter().collect::<Vec<_>>().as_slice() {
        ["x", "t", "u"] => false,
        ["x", "t", "u", "ux"] => true,
        h => return Err(CliError::Usage(format!("unexpected csv header {h:?}"))),
    };
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let vals = rec
            .iter()
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| CliError::Usage(format!("bad number {s:?}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        rows.push(vals);
    }
    let mut ts: Vec<f64> = Vec::new();
    for row in &rows {
        if ts.last() != Some(&row[1]) {
            ts.push(row[1]);
        }
    }
    if ts.is_empty() || rows.len() % ts.len() != 0 {
        return Err(CliError::Usage("csv rows do not form a tensor grid".into()));
    }
    let nx = rows.len() / ts.len();
    let xs: Vec<f64> = rows[..nx].iter().map(|r| r[0]).collect();
    let mut field = SolutionField::new(xs, ts, Provenance::External, with_ux);
    for (k, row) in rows.iter().enumerate() {
        if row[0] != field.xs[k % nx] || row[1] != field.ts[k / nx] {
            return Err(CliError::Usage(format!(
                "csv row {} breaks the grid order",
                k + 2
            )));
        }
        field.u[k] = row[2];
        if let Some(ux) = field.ux.as_mut() {
            ux[k] = row[3];
        }
    }
    Ok(field)
}
