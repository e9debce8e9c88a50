//! CSV and JSON output of studies and single estimate runs.
//!
//! Floats are written in Rust's shortest round-trip form, so reading a file
//! back reproduces the in-memory values bit for bit.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::config::StudyConfig;
use super::metrics::qq_export;
use super::study::{EstimateRecord, StudyResult};
use crate::error::{Error, Result};

/// Version string recorded in manifests (`git describe` when available).
pub const VERSION: &str = match option_env!("LOCSTAT_GIT_VERSION") {
    Some(v) => v,
    None => env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub n: u32,
    pub component: usize,
    pub mise: Option<f64>,
    pub replications: usize,
    pub failures: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRow {
    pub n: u32,
    pub u: f64,
    pub component: usize,
    pub mse: f64,
    pub valid: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QqRow {
    pub n: u32,
    pub theoretical: f64,
    pub sample: f64,
}

/// One row of `estimate-lse` output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LseRow {
    pub u: f64,
    pub a_true: f64,
    pub a_hat: f64,
    pub sigma_hat: f64,
    pub std_err: Option<f64>,
}

/// One row of `estimate-qmle` / `estimate-whittle` output.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpaceRow {
    pub u: f64,
    pub theta_star: Vec<f64>,
    pub theta_hat: Vec<f64>,
    pub objective: f64,
    pub riccati_residual: f64,
    pub whittle_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub seed: u64,
    /// SHA-256 of the compact JSON form of `config` without `output_dir`.
    pub config_hash: String,
    pub config: StudyConfig,
    pub files: Vec<String>,
    pub records: usize,
    pub failures: usize,
}

pub fn config_hash(config: &StudyConfig) -> Result<String> {
    let text = serde_json::to_string(&StudyConfig { output_dir: None, ..config.clone() })?;
    let digest = Sha256::digest(text.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn parse_f64(s: &str, what: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::Config(format!("cannot parse {what} '{s}'")))
}

fn parse_opt(s: &str, what: &str) -> Result<Option<f64>> {
    if s.is_empty() {
        Ok(None)
    } else {
        parse_f64(s, what).map(Some)
    }
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

fn read_rows<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path)?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

pub fn write_summary_csv(path: &Path, rows: &[SummaryRow]) -> Result<()> {
    write_rows(path, rows)
}
pub fn read_summary_csv(path: &Path) -> Result<Vec<SummaryRow>> {
    read_rows(path)
}
pub fn write_mse_csv(path: &Path, rows: &[MseRow]) -> Result<()> {
    write_rows(path, rows)
}
pub fn read_mse_csv(path: &Path) -> Result<Vec<MseRow>> {
    read_rows(path)
}
pub fn write_qq_csv(path: &Path, rows: &[QqRow]) -> Result<()> {
    write_rows(path, rows)
}
pub fn read_qq_csv(path: &Path) -> Result<Vec<QqRow>> {
    read_rows(path)
}

pub fn write_lse_table<W: std::io::Write>(out: W, rows: &[LseRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_lse_table<R: std::io::Read>(input: R) -> Result<Vec<LseRow>> {
    let mut r = csv::Reader::from_reader(input);
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

fn estimate_header(dim: usize) -> Vec<String> {
    let mut h = vec!["n".to_string(), "u".into(), "replication".into()];
    h.extend((1..=dim).map(|k| format!("truth{k}")));
    h.extend((1..=dim).map(|k| format!("estimate{k}")));
    for c in ["sigma_hat", "std_err", "objective", "riccati_residual", "whittle_value", "error"] {
        h.push(c.into());
    }
    h
}

/// Writes per-cell estimates; failed cells have empty estimate columns and
/// an error message.
pub fn write_estimates_csv(path: &Path, records: &[EstimateRecord], dim: usize) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(estimate_header(dim))?;
    for r in records {
        if r.truth.len() != dim || !(r.estimate.is_empty() || r.estimate.len() == dim) {
            return Err(Error::Config(format!("record dimension does not match {dim}")));
        }
        let mut row = vec![r.n.to_string(), r.u.to_string(), r.replication.to_string()];
        row.extend(r.truth.iter().map(|x| x.to_string()));
        if r.estimate.is_empty() {
            row.extend(std::iter::repeat_n(String::new(), dim));
        } else {
            row.extend(r.estimate.iter().map(|x| x.to_string()));
        }
        row.push(fmt_opt(r.sigma_hat));
        row.push(fmt_opt(r.std_err));
        row.push(fmt_opt(r.objective));
        row.push(fmt_opt(r.riccati_residual));
        row.push(fmt_opt(r.whittle_value));
        row.push(r.error.clone().unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_estimates_csv(path: &Path) -> Result<Vec<EstimateRecord>> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    let dim = header.iter().filter(|h| h.starts_with("truth")).count();
    if header.len() != estimate_header(dim).len() {
        return Err(Error::Config(format!("unexpected estimates header in {}", path.display())));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        let truth = (0..dim).map(|k| parse_f64(f(3 + k), "truth")).collect::<Result<Vec<_>>>()?;
        let est_cols: Vec<&str> = (0..dim).map(|k| f(3 + dim + k)).collect();
        let estimate = if est_cols.iter().all(|s| s.is_empty()) {
            Vec::new()
        } else {
            est_cols.iter().map(|s| parse_f64(s, "estimate")).collect::<Result<Vec<_>>>()?
        };
        let b = 3 + 2 * dim;
        let error = f(b + 5);
        out.push(EstimateRecord {
            n: f(0).parse().map_err(|_| Error::Config(format!("bad n '{}'", f(0))))?,
            u: parse_f64(f(1), "u")?,
            replication: f(2).parse().map_err(|_| Error::Config(format!("bad replication '{}'", f(2))))?,
            truth,
            estimate,
            sigma_hat: parse_opt(f(b), "sigma_hat")?,
            std_err: parse_opt(f(b + 1), "std_err")?,
            objective: parse_opt(f(b + 2), "objective")?,
            riccati_residual: parse_opt(f(b + 3), "riccati_residual")?,
            whittle_value: parse_opt(f(b + 4), "whittle_value")?,
            error: if error.is_empty() { None } else { Some(error.to_string()) },
        });
    }
    Ok(out)
}

pub fn write_statespace_table<W: std::io::Write>(out: W, rows: &[StateSpaceRow], with_whittle: bool) -> Result<()> {
    let dim = rows.first().map(|r| r.theta_hat.len()).unwrap_or(0);
    let mut w = csv::Writer::from_writer(out);
    let mut h = vec!["u".to_string()];
    h.extend((1..=dim).map(|k| format!("theta_star{k}")));
    h.extend((1..=dim).map(|k| format!("theta_hat{k}")));
    h.push("objective".into());
    h.push("riccati_residual".into());
    if with_whittle {
        h.push("whittle_value".into());
    }
    w.write_record(&h)?;
    for r in rows {
        let mut row = vec![r.u.to_string()];
        row.extend(r.theta_star.iter().map(|x| x.to_string()));
        row.extend(r.theta_hat.iter().map(|x| x.to_string()));
        row.push(r.objective.to_string());
        row.push(r.riccati_residual.to_string());
        if with_whittle {
            row.push(fmt_opt(r.whittle_value));
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_statespace_table<R: std::io::Read>(input: R) -> Result<Vec<StateSpaceRow>> {
    let mut r = csv::Reader::from_reader(input);
    let header = r.headers()?.clone();
    let dim = header.iter().filter(|h| h.starts_with("theta_hat")).count();
    let with_whittle = header.iter().any(|h| h == "whittle_value");
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let v = rec.iter().map(|s| parse_opt(s, "value")).collect::<Result<Vec<_>>>()?;
        let get = |i: usize| v.get(i).copied().flatten().ok_or_else(|| Error::Config(format!("missing column {i}")));
        out.push(StateSpaceRow {
            u: get(0)?,
            theta_star: (1..=dim).map(get).collect::<Result<_>>()?,
            theta_hat: (1 + dim..=2 * dim).map(get).collect::<Result<_>>()?,
            objective: get(1 + 2 * dim)?,
            riccati_residual: get(2 + 2 * dim)?,
            whittle_value: if with_whittle { v.get(3 + 2 * dim).copied().flatten() } else { None },
        });
    }
    Ok(out)
}

pub fn summary_rows(result: &StudyResult) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for s in &result.summaries {
        for (k, m) in s.mise.iter().enumerate() {
            rows.push(SummaryRow {
                n: s.n,
                component: k + 1,
                mise: *m,
                replications: result.config.replications,
                failures: s.failures,
            });
        }
    }
    rows
}

pub fn mse_rows(result: &StudyResult) -> Vec<MseRow> {
    let mut rows = Vec::new();
    for s in &result.summaries {
        for (i, &u) in result.u.iter().enumerate() {
            for (k, &m) in s.mse[i].iter().enumerate() {
                rows.push(MseRow { n: s.n, u, component: k + 1, mse: m, valid: s.valid[i] });
            }
        }
    }
    rows
}

/// Q-Q pairs of the standardized least squares errors, per `N` with enough
/// finite samples.
pub fn qq_rows(result: &StudyResult) -> Vec<QqRow> {
    let mut rows = Vec::new();
    for &n in &result.config.n_values {
        let e: Vec<f64> = result.std_errors(n).into_iter().filter(|x| x.is_finite()).collect();
        if let Ok(pairs) = qq_export(&e) {
            rows.extend(pairs.into_iter().map(|(t, s)| QqRow { n, theoretical: t, sample: s }));
        }
    }
    rows
}

/// Writes `estimates.csv`, `summary.csv`, `mse.csv`, `qq.csv` (least squares
/// with the rectangular kernel) and `manifest.json` into `dir`.
pub fn write_study(result: &StudyResult, dir: &Path) -> Result<Manifest> {
    std::fs::create_dir_all(dir)?;
    let dim = result.config.dim();
    let mut files = vec!["estimates.csv".to_string(), "summary.csv".into(), "mse.csv".into()];
    write_estimates_csv(&dir.join("estimates.csv"), &result.records, dim)?;
    write_summary_csv(&dir.join("summary.csv"), &summary_rows(result))?;
    write_mse_csv(&dir.join("mse.csv"), &mse_rows(result))?;
    let qq = qq_rows(result);
    if !qq.is_empty() {
        write_qq_csv(&dir.join("qq.csv"), &qq)?;
        files.push("qq.csv".into());
    }
    if let Some(report) = &result.assumptions {
        std::fs::write(dir.join("assumptions.json"), serde_json::to_string_pretty(report)? + "\n")?;
        files.push("assumptions.json".into());
    }
    let manifest = Manifest {
        version: VERSION.to_string(),
        seed: result.config.seed,
        config_hash: config_hash(&result.config)?,
        config: result.config.clone(),
        files,
        records: result.records.len(),
        failures: result.records.iter().filter(|r| !r.is_ok()).count(),
    };
    std::fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<Manifest> {
    let text = std::fs::read_to_string(dir.join("manifest.json"))?;
    Ok(serde_json::from_str(&text)?)
}

/// Output directory of a study: the configured one or `out/`.
pub fn output_dir(config: &StudyConfig) -> PathBuf {
    config.output_dir.clone().unwrap_or_else(|| PathBuf::from("out"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(n: u32, rep: usize, est: Vec<f64>, err: Option<&str>) -> EstimateRecord {
        EstimateRecord {
            n,
            u: 400.0 + 0.1,
            replication: rep,
            truth: vec![0.1 + 0.2, -1.0 / 3.0],
            estimate: est,
            sigma_hat: Some(1e-300),
            std_err: None,
            objective: Some(f64::INFINITY),
            riccati_residual: Some(3.0e-17),
            whittle_value: None,
            error: err.map(String::from),
        }
    }

    #[test]
    fn estimates_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("e.csv");
        let rs = vec![
            rec(4, 0, vec![std::f64::consts::PI, -0.0], None),
            rec(4, 1, vec![], Some("estimation error: degenerate, \"quoted\"\nline")),
        ];
        write_estimates_csv(&p, &rs, 2).unwrap();
        assert_eq!(read_estimates_csv(&p).unwrap(), rs);
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.starts_with("n,u,replication,truth1,truth2,estimate1,estimate2,sigma_hat"));
        assert!(!text.contains("\r\n"));
    }

    #[test]
    fn tables_round_trip() {
        let rows = vec![
            LseRow { u: 688.0, a_true: 0.1722019412, a_hat: 0.2, sigma_hat: 0.9, std_err: Some(-1.5) },
            LseRow { u: 700.0, a_true: 0.1, a_hat: 0.2, sigma_hat: 0.9, std_err: None },
        ];
        let mut buf = Vec::new();
        write_lse_table(&mut buf, &rows).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("u,a_true,a_hat,sigma_hat,std_err\n"));
        assert_eq!(read_lse_table(&buf[..]).unwrap(), rows);

        for with_whittle in [false, true] {
            let rows = vec![StateSpaceRow {
                u: 1.0,
                theta_star: vec![-0.5, -3.0, 0.2],
                theta_hat: vec![-0.45, -2.9, 0.21],
                objective: 1234.5,
                riccati_residual: 1e-15,
                whittle_value: with_whittle.then_some(7.25),
            }];
            let mut buf = Vec::new();
            write_statespace_table(&mut buf, &rows, with_whittle).unwrap();
            let text = String::from_utf8(buf.clone()).unwrap();
            assert_eq!(text.lines().next().unwrap().ends_with("whittle_value"), with_whittle);
            assert_eq!(read_statespace_table(&buf[..]).unwrap(), rows);
        }
    }

    #[test]
    fn aggregate_rows_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let s = vec![SummaryRow { n: 16, component: 1, mise: None, replications: 3, failures: 1 }];
        write_summary_csv(&dir.path().join("s.csv"), &s).unwrap();
        assert_eq!(read_summary_csv(&dir.path().join("s.csv")).unwrap(), s);
        let m = vec![MseRow { n: 1, u: 0.3, component: 2, mse: 1.0 / 7.0, valid: 5 }];
        write_mse_csv(&dir.path().join("m.csv"), &m).unwrap();
        assert_eq!(read_mse_csv(&dir.path().join("m.csv")).unwrap(), m);
    }

    #[test]
    fn config_hash_tracks_config() {
        let a = StudyConfig::default();
        let b = StudyConfig { seed: 2, ..StudyConfig::default() };
        assert_eq!(config_hash(&a).unwrap(), config_hash(&a.clone()).unwrap());
        assert_ne!(config_hash(&a).unwrap(), config_hash(&b).unwrap());
        assert_eq!(config_hash(&a).unwrap().len(), 64);
        let moved = StudyConfig { output_dir: Some("elsewhere".into()), ..a.clone() };
        assert_eq!(config_hash(&a).unwrap(), config_hash(&moved).unwrap());
    }
}
