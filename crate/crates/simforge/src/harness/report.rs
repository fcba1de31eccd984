//! Report emission: CSV, JSON, HTML with an inline SVG histogram, and a
//! separate timings file.
//!
//! Every byte written here except `timings.json` is a pure function of the
//! result value, so identical runs produce identical files.

use std::fmt::Write as _;
use std::io;
use std::path::{Path, PathBuf};

use super::experiment::CountermeasureResult;
use super::{ExperimentResult, Histogram, VariantLineage};

/// File the variant-producing drivers write and the countermeasure reads
/// to classify documents.
pub const LINEAGE_FILE: &str = "lineage.json";

/// Writes `report.csv`, `result.json`, `report.html`, and `timings.json`
/// into `out_dir`, returning the paths written.
pub fn write_result(result: &ExperimentResult, out_dir: &Path) -> io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    let csv = out_dir.join("report.csv");
    std::fs::write(&csv, result.report.to_csv())?;
    written.push(csv);
    let json = out_dir.join("result.json");
    std::fs::write(&json, pretty(result))?;
    written.push(json);
    let html = out_dir.join("report.html");
    std::fs::write(&html, render_html(result))?;
    written.push(html);
    let timings = out_dir.join("timings.json");
    std::fs::write(&timings, pretty(&result.timings))?;
    written.push(timings);
    Ok(written)
}

/// Writes a countermeasure run as `source/`, `assembly/`, and a pairwise
/// `deltas.csv` at the top.
pub fn write_countermeasure(
    result: &CountermeasureResult,
    out_dir: &Path,
) -> io::Result<Vec<PathBuf>> {
    let mut written = write_result(&result.source, &out_dir.join("source"))?;
    written.extend(write_result(&result.assembly, &out_dir.join("assembly"))?);
    let mut csv = String::from("doc_a,doc_b,source_score,assembly_score,delta\n");
    for d in &result.deltas {
        let _ = writeln!(
            csv,
            "{},{},{:.2},{:.2},{:.2}",
            csv_field(&d.doc_a),
            csv_field(&d.doc_b),
            d.source_score,
            d.assembly_score,
            d.delta
        );
    }
    let path = out_dir.join("deltas.csv");
    std::fs::write(&path, csv)?;
    written.push(path);
    Ok(written)
}

pub fn write_lineage(lineages: &[VariantLineage], out_dir: &Path) -> io::Result<PathBuf> {
    std::fs::create_dir_all(out_dir)?;
    let path = out_dir.join(LINEAGE_FILE);
    std::fs::write(&path, pretty(&lineages))?;
    Ok(path)
}

pub fn read_lineage(path: &Path) -> io::Result<Vec<VariantLineage>> {
    let text = std::fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

fn pretty<T: serde::Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable result");
    text.push('\n');
    text
}

fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

const PLOT_WIDTH: u32 = 560;
const PLOT_HEIGHT: u32 = 180;
const MARGIN_LEFT: u32 = 46;
const MARGIN_BOTTOM: u32 = 34;
const MARGIN_TOP: u32 = 12;

/// Renders the histogram as a static stacked-bar SVG: light gray for
/// legitimate pairs, dark gray for pairs involving a variant.
pub fn histogram_svg(hist: &Histogram) -> String {
    let n = hist.bins.len().max(1) as u32;
    let bar_w = PLOT_WIDTH / n;
    let width = MARGIN_LEFT + PLOT_WIDTH + 10;
    let height = MARGIN_TOP + PLOT_HEIGHT + MARGIN_BOTTOM;
    let max = hist
        .bins
        .iter()
        .map(|b| b.legitimate + b.variant_involved)
        .max()
        .unwrap_or(0)
        .max(1);

    let mut svg = String::new();
    let _ = write!(
        svg,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" role=\"img\">"
    );
    let base_y = MARGIN_TOP + PLOT_HEIGHT;
    let _ = write!(
        svg,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{base_y}\" x2=\"{}\" y2=\"{base_y}\" stroke=\"#333\"/>",
        MARGIN_LEFT + PLOT_WIDTH
    );
    let _ = write!(
        svg,
        "<line x1=\"{MARGIN_LEFT}\" y1=\"{MARGIN_TOP}\" x2=\"{MARGIN_LEFT}\" y2=\"{base_y}\" stroke=\"#333\"/>"
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{max}</text>",
        MARGIN_LEFT - 4,
        MARGIN_TOP + 10
    );
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">0</text>",
        MARGIN_LEFT - 4,
        base_y
    );
    for (i, bin) in hist.bins.iter().enumerate() {
        let x = MARGIN_LEFT + i as u32 * bar_w;
        let legit_h = (bin.legitimate * PLOT_HEIGHT as u64 / max) as u32;
        let variant_h = (bin.variant_involved * PLOT_HEIGHT as u64 / max) as u32;
        let legit_y = base_y - legit_h;
        if legit_h > 0 {
            let _ = write!(
                svg,
                "<rect x=\"{}\" y=\"{legit_y}\" width=\"{}\" height=\"{legit_h}\" fill=\"#c8c8c8\"/>",
                x + 1,
                bar_w - 2
            );
        }
        if variant_h > 0 {
            let _ = write!(
                svg,
                "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{variant_h}\" fill=\"#555555\"/>",
                x + 1,
                legit_y - variant_h,
                bar_w - 2
            );
        }
        if i % 4 == 0 {
            let _ = write!(
                svg,
                "<text x=\"{x}\" y=\"{}\" font-size=\"11\">{}</text>",
                base_y + 14,
                bin.lo as u32
            );
        }
    }
    let _ = write!(
        svg,
        "<text x=\"{}\" y=\"{}\" font-size=\"11\">score</text>",
        MARGIN_LEFT + PLOT_WIDTH - 34,
        base_y + 28
    );
    let legend_x = MARGIN_LEFT + 6;
    let _ = write!(
        svg,
        "<rect x=\"{legend_x}\" y=\"{MARGIN_TOP}\" width=\"10\" height=\"10\" fill=\"#c8c8c8\"/>\
         <text x=\"{}\" y=\"{}\" font-size=\"11\">legitimate</text>",
        legend_x + 14,
        MARGIN_TOP + 9
    );
    let _ = write!(
        svg,
        "<rect x=\"{legend_x}\" y=\"{}\" width=\"10\" height=\"10\" fill=\"#555555\"/>\
         <text x=\"{}\" y=\"{}\" font-size=\"11\">variant involved</text>",
        MARGIN_TOP + 14,
        legend_x + 14,
        MARGIN_TOP + 23
    );
    svg.push_str("</svg>");
    svg
}

fn escape_html(text: &str) -> String {
    text.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}

/// Self-contained HTML page: run metadata, the histogram, warnings, and
/// the top pairs. No scripts, no external fetches.
pub fn render_html(result: &ExperimentResult) -> String {
    let mut html = String::from("<!doctype html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n");
    let _ = writeln!(html, "<title>{}</title>", escape_html(&result.experiment));
    html.push_str(
        "<style>body{font-family:sans-serif;margin:2em;}table{border-collapse:collapse;}\
         td,th{border:1px solid #999;padding:4px 8px;text-align:left;}\
         th{background:#eee;}caption{text-align:left;font-weight:bold;padding:4px 0;}\
         </style>\n</head>\n<body>\n",
    );
    let _ = writeln!(html, "<h1>{}</h1>", escape_html(&result.experiment));
    let _ = writeln!(
        html,
        "<p>engine {} | k={} t={} mml={} | seed {} | corpus {}</p>",
        result.engine,
        result.k,
        result.t,
        result.mml,
        result.seed,
        escape_html(&result.manifest_digest)
    );
    html.push_str(&histogram_svg(&result.histogram));
    html.push('\n');
    if !result.warnings.is_empty() {
        html.push_str("<h2>Warnings</h2>\n<ul>\n");
        for warning in &result.warnings {
            let _ = writeln!(html, "<li>{}</li>", escape_html(warning));
        }
        html.push_str("</ul>\n");
    }
    html.push_str(
        "<h2>Top pairs</h2>\n<table>\n<tr><th>doc a</th><th>doc b</th>\
         <th>% of a</th><th>% of b</th><th>score</th></tr>\n",
    );
    for pair in result.report.pairs.iter().take(50) {
        let _ = writeln!(
            html,
            "<tr><td>{}</td><td>{}</td><td>{:.2}</td><td>{:.2}</td><td>{:.2}</td></tr>",
            escape_html(&pair.doc_a),
            escape_html(&pair.doc_b),
            pair.pct_a,
            pair.pct_b,
            pair.score
        );
    }
    html.push_str("</table>\n</body>\n</html>\n");
    html
}
