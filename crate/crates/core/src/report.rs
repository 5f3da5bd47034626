//! Report rendering for metrics tables.

use std::fmt::Write as _;

use serde::Serialize;

use crate::analysis::{Metric, MetricsRow};
use crate::bench::{AdderResult, MetricsTable, Provenance};

pub const CSV_HEADER: [&str; 12] = [
    "legend", "delay_ns", "area", "power_uw", "pdp", "edp", "adp", "pdap", "n_pdp", "n_edp",
    "n_adp", "n_pdap",
];

#[derive(Serialize)]
struct CsvRow<'a> {
    legend: &'a str,
    delay_ns: f64,
    area: f64,
    power_uw: f64,
    pdp: f64,
    edp: f64,
    adp: f64,
    pdap: f64,
    n_pdp: f64,
    n_edp: f64,
    n_adp: f64,
    n_pdap: f64,
}

impl<'a> From<&'a MetricsRow> for CsvRow<'a> {
    fn from(r: &'a MetricsRow) -> Self {
        CsvRow {
            legend: &r.legend,
            delay_ns: r.delay_ns,
            area: r.area,
            power_uw: r.power_uw,
            pdp: r.pdp,
            edp: r.edp,
            adp: r.adp,
            pdap: r.pdap,
            n_pdp: r.n_pdp,
            n_edp: r.n_edp,
            n_adp: r.n_adp,
            n_pdap: r.n_pdap,
        }
    }
}

/// Canonical machine-readable form. Floats use the shortest round-trip
/// representation so output is a deterministic function of the values.
pub fn metrics_csv(table: &MetricsTable) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in &table.rows {
        writer
            .serialize(CsvRow::from(row))
            .expect("in-memory csv write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory csv flush")).expect("utf-8 csv")
}

fn min_index(rows: &[MetricsRow], value: impl Fn(&MetricsRow) -> f64) -> usize {
    rows.iter()
        .enumerate()
        .min_by(|a, b| value(a.1).total_cmp(&value(b.1)))
        .map(|(i, _)| i)
        .unwrap_or(0)
}

/// Fixed-width table in the layout of the published comparison. The least
/// value of each column is marked with `*`.
pub fn metrics_text(table: &MetricsTable) -> String {
    let rows = &table.rows;
    type Column = (&'static str, fn(&MetricsRow) -> f64, usize);
    let columns: [Column; 11] = [
        ("Delay (ns)", |r| r.delay_ns, 2),
        ("Area", |r| r.area, 2),
        ("Power (uW)", |r| r.power_uw, 2),
        ("PDP", |r| r.pdp, 3),
        ("EDP", |r| r.edp, 3),
        ("ADP", |r| r.adp, 2),
        ("PDAP", |r| r.pdap, 1),
        ("nPDP", |r| r.n_pdp, 3),
        ("nEDP", |r| r.n_edp, 3),
        ("nADP", |r| r.n_adp, 3),
        ("nPDAP", |r| r.n_pdap, 3),
    ];
    let legend_width = rows
        .iter()
        .map(|r| r.legend.len())
        .max()
        .unwrap_or(0)
        .max("Adder".len());

    let cells: Vec<Vec<String>> = columns
        .iter()
        .map(|(_, value, decimals)| {
            let best = min_index(rows, value);
            rows.iter()
                .enumerate()
                .map(|(i, r)| {
                    let mark = if i == best { "*" } else { " " };
                    format!("{:.*}{mark}", decimals, value(r))
                })
                .collect()
        })
        .collect();
    let widths: Vec<usize> = columns
        .iter()
        .zip(&cells)
        .map(|((name, _, _), col)| {
            col.iter()
                .map(String::len)
                .max()
                .unwrap_or(0)
                .max(name.len())
        })
        .collect();

    let mut out = String::new();
    writeln!(
        out,
        "Design metrics ({} rows, {})",
        rows.len(),
        table.provenance.name()
    )
    .unwrap();
    if table.provenance == Provenance::Generated {
        writeln!(
            out,
            "Power from zero-delay toggle counts; glitch power is not modelled."
        )
        .unwrap();
    }
    write!(out, "{:<legend_width$}", "Adder").unwrap();
    for ((name, _, _), w) in columns.iter().zip(&widths) {
        write!(out, "  {name:>w$}").unwrap();
    }
    out.push('\n');
    for (i, r) in rows.iter().enumerate() {
        let mut line = format!("{:<legend_width$}", r.legend);
        for (col, w) in cells.iter().zip(&widths) {
            write!(line, "  {:>w$}", col[i]).unwrap();
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out.push('\n');
    for metric in Metric::ALL {
        writeln!(out, "least {metric}: {}", table.argmin(metric)).unwrap();
    }
    out
}

/// Per-adder build and verification details for generated runs.
pub fn adders_text(results: &[AdderResult]) -> String {
    let mut out = String::new();
    for r in results {
        writeln!(
            out,
            "{}: {} | {} gates, depth {}, delay {:.0} ps, area {:.2}, power {:.4} uW, {} toggles, {} {} vectors ok",
            r.legend,
            r.config,
            r.gates,
            r.depth,
            r.delay_ps,
            r.area,
            r.power_uw,
            r.toggles,
            r.verification.vectors_checked,
            if r.exhaustive { "exhaustive" } else { "random" },
        )
        .unwrap();
    }
    out
}

const BAR_COLOR: &str = "#4e79a7";
const BEST_COLOR: &str = "#d62728";

fn escape(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

/// Grouped bar chart of the four normalized metrics; the least bar of each
/// metric is drawn in red.
pub fn metrics_svg(table: &MetricsTable) -> String {
    let rows = &table.rows;
    let bar = 14.0;
    let gap = 28.0;
    let group_width = bar * rows.len() as f64;
    let left = 60.0;
    let top = 40.0;
    let plot_h = 260.0;
    let bottom = 110.0;
    let width = left + Metric::ALL.len() as f64 * (group_width + gap) + gap;
    let height = top + plot_h + bottom;

    let mut s = String::new();
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}" font-family="sans-serif" font-size="11">"#
    )
    .unwrap();
    writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(
        s,
        r#"<text x="{:.1}" y="20" text-anchor="middle" font-size="14">Normalized combination design metrics ({})</text>"#,
        width / 2.0,
        table.provenance.name()
    )
    .unwrap();
    for tick in 0..=4 {
        let v = tick as f64 / 4.0;
        let y = top + plot_h * (1.0 - v);
        writeln!(
            s,
            r##"<line x1="{left:.1}" y1="{y:.1}" x2="{:.1}" y2="{y:.1}" stroke="#dddddd"/>"##,
            width - gap / 2.0
        )
        .unwrap();
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="end">{v:.2}</text>"#,
            left - 6.0,
            y + 4.0
        )
        .unwrap();
    }
    for (m, metric) in Metric::ALL.into_iter().enumerate() {
        let x0 = left + gap + m as f64 * (group_width + gap);
        let best = min_index(rows, |r| r.normalized(metric));
        for (i, r) in rows.iter().enumerate() {
            let v = r.normalized(metric);
            let h = plot_h * v;
            let x = x0 + i as f64 * bar;
            let color = if i == best { BEST_COLOR } else { BAR_COLOR };
            writeln!(
                s,
                r#"<rect x="{x:.1}" y="{:.1}" width="{:.1}" height="{h:.1}" fill="{color}"><title>{} {metric} {v:.4}</title></rect>"#,
                top + plot_h - h,
                bar - 2.0,
                escape(&r.legend)
            )
            .unwrap();
            let lx = x + bar / 2.0;
            let ly = top + plot_h + 8.0;
            writeln!(
                s,
                r#"<text x="{lx:.1}" y="{ly:.1}" transform="rotate(90 {lx:.1} {ly:.1})" font-size="9">{}</text>"#,
                escape(&r.legend)
            )
            .unwrap();
        }
        writeln!(
            s,
            r#"<text x="{:.1}" y="{:.1}" text-anchor="middle" font-size="13">{metric}</text>"#,
            x0 + group_width / 2.0,
            top + plot_h + bottom - 10.0
        )
        .unwrap();
    }
    writeln!(
        s,
        r#"<line x1="{left:.1}" y1="{:.1}" x2="{:.1}" y2="{:.1}" stroke="black"/>"#,
        top + plot_h,
        width - gap / 2.0,
        top + plot_h
    )
    .unwrap();
    s.push_str("</svg>\n");
    s
}
