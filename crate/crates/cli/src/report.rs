use std::io::{self, Write};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::Value;
use shardbench::{DistributionStats, Histogram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AnalyzeFormat {
    Json,
    Csv,
    PlotData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
}

/// JSON analysis report. Field order is the serialized key order.
#[derive(Debug, Serialize)]
pub struct AnalysisReport<'a> {
    pub strategy: &'a str,
    pub config: Value,
    pub level: usize,
    pub bucket_count: usize,
    pub total: u64,
    pub skipped: u64,
    pub ideal_mean: f64,
    pub std_dev: f64,
    pub deviation_ratio: f64,
    pub source: String,
    pub rejected: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counts: Option<&'a [u64]>,
}

pub fn stats_line(stats: &DistributionStats, skipped: u64) -> String {
    format!(
        "ideal_mean={} std_dev={} ratio={} skipped={}",
        stats.ideal_mean, stats.std_dev, stats.deviation_ratio, skipped
    )
}

pub fn write_csv(out: &mut dyn Write, hist: &Histogram) -> io::Result<()> {
    out.write_all(b"bucket,count\n")?;
    for (bucket, count) in hist.counts().iter().enumerate() {
        writeln!(out, "{bucket},{count}")?;
    }
    Ok(())
}

pub fn write_plot_data(out: &mut dyn Write, hist: &Histogram) -> io::Result<()> {
    for (bucket, count) in hist.counts().iter().enumerate() {
        writeln!(out, "{bucket} {count}")?;
    }
    Ok(())
}

pub fn write_json(out: &mut dyn Write, report: &AnalysisReport<'_>) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut *out, report)?;
    out.write_all(b"\n")
}

pub struct CompareRow {
    pub label: String,
    pub level: usize,
    pub skipped: u64,
    pub stats: DistributionStats,
}

/// Orders by level, then deviation ratio ascending. Ties keep input order.
pub fn sort_rows(rows: &mut [CompareRow]) {
    rows.sort_by(|a, b| {
        a.level
            .cmp(&b.level)
            .then(a.stats.deviation_ratio.total_cmp(&b.stats.deviation_ratio))
    });
}

const COLUMNS: [&str; 7] = [
    "strategy",
    "level",
    "bucket_count",
    "ideal_mean",
    "std_dev",
    "deviation_ratio",
    "skipped",
];

fn csv_field(s: &str) -> String {
    if s.contains([',', '"']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn write_table(
    out: &mut dyn Write,
    rows: &[CompareRow],
    format: TableFormat,
) -> io::Result<()> {
    let cells: Vec<[String; 7]> = rows
        .iter()
        .map(|r| {
            [
                r.label.clone(),
                r.level.to_string(),
                r.stats.bucket_count.to_string(),
                format!("{:.4}", r.stats.ideal_mean),
                format!("{:.4}", r.stats.std_dev),
                format!("{:.6}", r.stats.deviation_ratio),
                r.skipped.to_string(),
            ]
        })
        .collect();

    match format {
        TableFormat::Csv => {
            writeln!(out, "{}", COLUMNS.join(","))?;
            for row in &cells {
                let fields: Vec<String> = row.iter().map(|c| csv_field(c)).collect();
                writeln!(out, "{}", fields.join(","))?;
            }
        }
        TableFormat::Text => {
            let mut widths = COLUMNS.map(str::len);
            for row in &cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |fields: &[&str]| -> String {
                let padded: Vec<String> = fields
                    .iter()
                    .zip(widths)
                    .enumerate()
                    .map(|(i, (f, w))| {
                        if i == 0 {
                            format!("{f:<w$}")
                        } else {
                            format!("{f:>w$}")
                        }
                    })
                    .collect();
                padded.join("  ")
            };
            writeln!(out, "{}", line(&COLUMNS))?;
            for row in &cells {
                let fields: Vec<&str> = row.iter().map(String::as_str).collect();
                writeln!(out, "{}", line(&fields))?;
            }
        }
    }
    Ok(())
}
