//! Dependency-free SVG bar charts, one per metric, for easy diffing.

use std::path::Path;

use crate::error::Result;
use crate::metrics::ComparisonRow;

const WIDTH: f64 = 640.0;
const BAR_AREA_HEIGHT: f64 = 260.0;
const MARGIN_LEFT: f64 = 60.0;
const MARGIN_TOP: f64 = 40.0;
const LABEL_AREA: f64 = 90.0;

/// Renders a vertical bar chart. Values must be finite and non-negative.
pub fn bar_chart_svg(title: &str, bars: &[(String, f64)]) -> String {
    let max = bars.iter().map(|(_, v)| *v).fold(0.0f64, f64::max).max(1e-9);
    let height = MARGIN_TOP + BAR_AREA_HEIGHT + LABEL_AREA;
    let slot = (WIDTH - MARGIN_LEFT - 20.0) / bars.len().max(1) as f64;
    let bar_width = slot * 0.6;

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{height}\" \
         viewBox=\"0 0 {WIDTH} {height}\">\n"
    ));
    svg.push_str(&format!(
        "  <text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{title}</text>\n",
        WIDTH / 2.0
    ));
    svg.push_str(&format!(
        "  <line x1=\"{MARGIN_LEFT}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"#444\"/>\n",
        MARGIN_TOP + BAR_AREA_HEIGHT,
        WIDTH - 20.0,
        MARGIN_TOP + BAR_AREA_HEIGHT
    ));
    for (i, (label, value)) in bars.iter().enumerate() {
        let x = MARGIN_LEFT + slot * i as f64 + (slot - bar_width) / 2.0;
        let bar_height = BAR_AREA_HEIGHT * value / max;
        let y = MARGIN_TOP + BAR_AREA_HEIGHT - bar_height;
        svg.push_str(&format!(
            "  <rect x=\"{x:.2}\" y=\"{y:.2}\" width=\"{bar_width:.2}\" height=\"{bar_height:.2}\" \
             fill=\"#4878a8\"/>\n"
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{value:.3}</text>\n",
            x + bar_width / 2.0,
            y - 6.0
        ));
        svg.push_str(&format!(
            "  <text x=\"{:.2}\" y=\"{:.2}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\" transform=\"rotate(-45 {:.2} {:.2})\">{label}</text>\n",
            x + bar_width / 2.0,
            MARGIN_TOP + BAR_AREA_HEIGHT + 14.0,
            x + bar_width / 2.0,
            MARGIN_TOP + BAR_AREA_HEIGHT + 14.0
        ));
    }
    svg.push_str("</svg>\n");
    svg
}

/// Writes the four per-metric charts into `dir`.
pub fn write_metric_charts(dir: &Path, rows: &[ComparisonRow]) -> Result<Vec<std::path::PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let metrics: [(&str, &str, Box<dyn Fn(&ComparisonRow) -> f64>); 4] = [
        (
            "success_rate",
            "Success Rate",
            Box::new(|r| r.report.success_rate),
        ),
        (
            "efficiency_score",
            "Efficiency Score",
            Box::new(|r| r.report.efficiency_score),
        ),
        (
            "avg_interval",
            "Average Interval (days)",
            Box::new(|r| r.report.avg_interval),
        ),
        (
            "learning_burden",
            "Learning Burden (attempts)",
            Box::new(|r| r.report.total_attempts as f64),
        ),
    ];
    let mut written = Vec::new();
    for (stem, title, extract) in metrics {
        let bars: Vec<(String, f64)> = rows
            .iter()
            .map(|r| (r.report.scheduler_id.to_string(), extract(r)))
            .collect();
        let path = dir.join(format!("{stem}.svg"));
        std::fs::write(&path, bar_chart_svg(title, &bars))?;
        written.push(path);
    }
    Ok(written)
}
