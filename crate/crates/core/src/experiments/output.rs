//! CSV and plot-data rendering of metrics rows.

use std::path::Path as FsPath;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::metrics::MetricsRow;

/// Generic plotting script written next to the `.dat` files.
pub const PLOT_SCRIPT: &str = "plot.gp";

fn number(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else {
        format!("{v}")
    }
}

fn metric_names(rows: &[MetricsRow]) -> Vec<String> {
    let mut names = vec![
        "frac_attr_improved".to_string(),
        "frac_profit_improved".to_string(),
    ];
    names.extend(
        rows[0]
            .mean_attr
            .iter()
            .map(|(k, _)| format!("mean_attr_{k}")),
    );
    names.push("frac_pairs_max_val_improved".into());
    names.push("frac_pairs_min_val_improved".into());
    names
}

fn metric_values(row: &MetricsRow) -> Vec<f64> {
    let mut out = vec![row.frac_attr_improved, row.frac_profit_improved];
    out.extend(row.mean_attr.iter().map(|(_, v)| *v));
    out.push(row.frac_pairs_max_val_improved);
    out.push(row.frac_pairs_min_val_improved);
    out
}

/// Renders rows as CSV; empty cells mark values excluded for
/// non-convergence.
pub fn metrics_csv(rows: &[MetricsRow]) -> Result<String> {
    if rows.is_empty() {
        return Err(Error::Validation("no metrics rows to write".into()));
    }
    let mut writer = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["sample".to_string(), "path_count".into(), "tier".into()];
    header.extend(metric_names(rows));
    header.push("nonconverged".into());
    writer.write_record(&header)?;
    for row in rows {
        let mut record = vec![
            row.sample.to_string(),
            row.path_count.to_string(),
            row.tier_label().to_string(),
        ];
        record.extend(metric_values(row).into_iter().map(number));
        record.push(row.nonconverged.to_string());
        writer.write_record(&record)?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields is UTF-8"))
}

pub fn emit_csv(rows: &[MetricsRow], path: &FsPath) -> Result<()> {
    std::fs::write(path, metrics_csv(rows)?)?;
    Ok(())
}

/// Mean and sample standard deviation of one metric across samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub path_count: usize,
    pub tier: String,
    pub mean: f64,
    pub stddev: f64,
    pub count: usize,
}

/// Per-metric series over path counts, one per tier, skipping excluded
/// values. Tiers keep their first-appearance order.
pub fn plot_series(rows: &[MetricsRow]) -> Result<Vec<(String, Vec<PlotPoint>)>> {
    if rows.is_empty() {
        return Err(Error::Validation("no metrics rows to plot".into()));
    }
    let names = metric_names(rows);
    let mut tiers: Vec<&'static str> = Vec::new();
    let mut counts: Vec<usize> = Vec::new();
    for r in rows {
        if !tiers.contains(&r.tier_label()) {
            tiers.push(r.tier_label());
        }
        if !counts.contains(&r.path_count) {
            counts.push(r.path_count);
        }
    }
    counts.sort_unstable();
    let mut out = Vec::with_capacity(names.len());
    for (i, name) in names.into_iter().enumerate() {
        let mut points = Vec::new();
        for &tier in &tiers {
            for &c in &counts {
                let values: Vec<f64> = rows
                    .iter()
                    .filter(|r| r.tier_label() == tier && r.path_count == c)
                    .map(|r| metric_values(r)[i])
                    .filter(|v| !v.is_nan())
                    .collect();
                if values.is_empty() {
                    continue;
                }
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let stddev = if values.len() > 1 {
                    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
                } else {
                    0.0
                };
                points.push(PlotPoint {
                    path_count: c,
                    tier: tier.to_string(),
                    mean,
                    stddev,
                    count: values.len(),
                });
            }
        }
        out.push((name, points));
    }
    Ok(out)
}

fn gnuplot_script(series: &[(String, Vec<PlotPoint>)]) -> String {
    let mut tiers: Vec<&str> = Vec::new();
    for (_, points) in series {
        for p in points {
            if !tiers.contains(&p.tier.as_str()) {
                tiers.push(&p.tier);
            }
        }
    }
    let mut s = String::from("#!/usr/bin/env gnuplot\n");
    s.push_str("# Mean with sample standard deviation across samples, per tier.\n");
    s.push_str("set terminal pngcairo size 800,500\n");
    s.push_str("set xlabel 'usable paths per AS pair'\n");
    s.push_str("set key outside right\n");
    s.push_str("set xtics 1\n");
    s.push_str(&format!("tiers = \"{}\"\n", tiers.join(" ")));
    for (name, _) in series {
        s.push_str(&format!(
            "set output '{name}.png'\nset title '{name}'\n\
             plot for [t in tiers] '{name}.dat' using (strcol(2) eq t ? $1 : 1/0):3:4 with yerrorlines title t\n"
        ));
    }
    s
}

/// Writes `<metric>.dat` files with columns `path_count tier mean stddev`
/// plus an executable plotting script into `dir`.
pub fn emit_plot_data(rows: &[MetricsRow], dir: &FsPath) -> Result<()> {
    let series = plot_series(rows)?;
    std::fs::create_dir_all(dir)?;
    for (name, points) in &series {
        let mut text = String::from("# path_count tier mean stddev\n");
        for p in points {
            text.push_str(&format!(
                "{} {} {} {}\n",
                p.path_count, p.tier, p.mean, p.stddev
            ));
        }
        std::fs::write(dir.join(format!("{name}.dat")), text)?;
    }
    let script = dir.join(PLOT_SCRIPT);
    std::fs::write(&script, gnuplot_script(&series))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        std::fs::set_permissions(&script, std::fs::Permissions::from_mode(0o755))?;
    }
    Ok(())
}
