//! Per-epoch convergence CSV.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pdhg::ConvergenceLog;

pub const CSV_HEADER: [&str; 9] = [
    "epoch",
    "inner_iter_total",
    "tau_n",
    "rho_ref",
    "rho_at_restart",
    "kkt_norm",
    "dist_to_opt",
    "theta_ball_ok",
    "tstar_bound_ok",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvEpochRow {
    pub epoch: usize,
    pub inner_iter_total: u64,
    pub tau_n: Option<usize>,
    pub rho_ref: Option<f64>,
    pub rho_at_restart: Option<f64>,
    pub kkt_norm: f64,
    pub dist_to_opt: Option<f64>,
    pub theta_ball_ok: Option<bool>,
    pub tstar_bound_ok: Option<bool>,
}

/// Rows for `log`; the two flag columns are filled from the per-epoch slices
/// when present.
pub fn csv_rows(log: &ConvergenceLog, theta_ok: Option<&[bool]>, tstar_ok: Option<&[bool]>) -> Vec<CsvEpochRow> {
    log.epochs
        .iter()
        .enumerate()
        .map(|(k, e)| CsvEpochRow {
            epoch: e.epoch,
            inner_iter_total: e.inner_iter_total(),
            tau_n: e.tau,
            rho_ref: e.rho_ref,
            rho_at_restart: e.rho_at_restart,
            kkt_norm: e.kkt_norm,
            dist_to_opt: e.dist_to_opt,
            theta_ball_ok: theta_ok.and_then(|f| f.get(k).copied()),
            tstar_bound_ok: tstar_ok.and_then(|f| f.get(k).copied()),
        })
        .collect()
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn convergence_csv(rows: &[CsvEpochRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(CSV_HEADER).map_err(io)?;
    for r in rows {
        w.write_record([
            r.epoch.to_string(),
            r.inner_iter_total.to_string(),
            opt(r.tau_n),
            opt(r.rho_ref),
            opt(r.rho_at_restart),
            r.kkt_norm.to_string(),
            opt(r.dist_to_opt),
            opt(r.theta_ball_ok),
            opt(r.tstar_bound_ok),
        ])
        .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

pub fn emit_convergence_csv(rows: &[CsvEpochRow], path: &Path) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("convergence log has no epochs".into()));
    }
    std::fs::write(path, convergence_csv(rows)?).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn parse_convergence_csv(text: &str) -> Result<Vec<CsvEpochRow>> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Parse {
            line: 1,
            msg: format!("unexpected header {:?}", header.iter().collect::<Vec<_>>()),
        });
    }
    let mut rows = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| Error::Parse { line, msg: e.to_string() })?;
        let field = |i: usize| rec.get(i).unwrap_or("");
        fn req<T: std::str::FromStr>(s: &str, line: usize, name: &str) -> Result<T> {
            s.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("bad {name} value {s:?}"),
            })
        }
        fn optional<T: std::str::FromStr>(s: &str, line: usize, name: &str) -> Result<Option<T>> {
            if s.is_empty() {
                Ok(None)
            } else {
                req(s, line, name).map(Some)
            }
        }
        rows.push(CsvEpochRow {
            epoch: req(field(0), line, "epoch")?,
            inner_iter_total: req(field(1), line, "inner_iter_total")?,
            tau_n: optional(field(2), line, "tau_n")?,
            rho_ref: optional(field(3), line, "rho_ref")?,
            rho_at_restart: optional(field(4), line, "rho_at_restart")?,
            kkt_norm: req(field(5), line, "kkt_norm")?,
            dist_to_opt: optional(field(6), line, "dist_to_opt")?,
            theta_ball_ok: optional(field(7), line, "theta_ball_ok")?,
            tstar_bound_ok: optional(field(8), line, "tstar_bound_ok")?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(epoch: usize, dist: Option<f64>) -> CsvEpochRow {
        CsvEpochRow {
            epoch,
            inner_iter_total: 3,
            tau_n: Some(3),
            rho_ref: None,
            rho_at_restart: None,
            kkt_norm: 0.1,
            dist_to_opt: dist,
            theta_ball_ok: None,
            tstar_bound_ok: Some(true),
        }
    }

    #[test]
    fn one_epoch_is_two_lines() {
        let text = convergence_csv(&[row(0, None)]).unwrap();
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
        assert_eq!(text.lines().nth(1).unwrap(), "0,3,3,,,0.1,,,true");
    }

    #[test]
    fn round_trip() {
        let rows = vec![row(0, Some(1.0 / 3.0)), row(1, None)];
        let back = parse_convergence_csv(&convergence_csv(&rows).unwrap()).unwrap();
        assert_eq!(back, rows);
    }

    #[test]
    fn rejects_foreign_header() {
        assert!(parse_convergence_csv("a,b\n1,2\n").is_err());
    }
}
