use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use super::run::{Report, Warning};
use crate::certificates::CertificateKind;
use crate::Result;

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

fn file_safe(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' })
        .collect()
}

/// Write plot-ready CSV series for a report into `out`:
///
/// * `w2_vs_t_<label>.csv` once per distinct initial density,
/// * `prvc_vs_k.csv` / `pwvc_vs_k.csv` for each certificate,
/// * `w2_and_bound_vs_k.csv` when the report has an LTI section.
///
/// A report without any series produces no files and a `NOSERIES` warning.
pub fn emit_plot_data(report: &Report, out: &Path) -> Result<(Vec<PathBuf>, Vec<Warning>)> {
    let mut files = Vec::new();
    if report.series.is_empty() && report.certificates.is_empty() && report.lti.is_none() {
        return Ok((files, vec![Warning::new("NOSERIES", "report contains no series; nothing written")]));
    }
    std::fs::create_dir_all(out)?;
    let mut seen = BTreeSet::new();
    for s in &report.series {
        if !seen.insert(s.label.clone()) {
            continue;
        }
        let path = out.join(format!("w2_vs_t_{}.csv", file_safe(&s.label)));
        write_csv(
            &path,
            &["t", "w2"],
            report
                .times
                .iter()
                .zip(&s.w2)
                .map(|(t, w)| vec![t.to_string(), w.to_string()]),
        )?;
        files.push(path);
    }
    for c in &report.certificates {
        let (name, col) = match c.kind {
            CertificateKind::Prvc => ("prvc_vs_k.csv", "prvc"),
            CertificateKind::Pwvc => ("pwvc_vs_k.csv", "pwvc"),
        };
        let path = out.join(name);
        write_csv(
            &path,
            &["k", "t", col],
            c.snapshots
                .iter()
                .enumerate()
                .map(|(k, s)| vec![(k + 1).to_string(), s.t.to_string(), s.value.to_string()]),
        )?;
        files.push(path);
    }
    if let Some(lti) = &report.lti {
        let path = out.join("w2_and_bound_vs_k.csv");
        write_csv(
            &path,
            &["k", "w2", "bound", "omega_bound"],
            lti.iter().map(|b| {
                vec![
                    b.k.to_string(),
                    b.w2.to_string(),
                    b.sharper.to_string(),
                    b.omega_bound.map_or_else(String::new, |v| v.to_string()),
                ]
            }),
        )?;
        files.push(path);
    }
    Ok((files, vec![]))
}
