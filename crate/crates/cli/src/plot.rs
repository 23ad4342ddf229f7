//! Static SVG rendering of risk-vs-m tables. The output is a pure function
//! of the CSV text: same bytes in, same bytes out. Empirical series are the
//! only `<polyline>` elements; bound overlays use dashed `<path>`/`<line>`
//! so a plot can be picked apart by element kind in tests.

use crate::csv::{self, CsvError, Table};
use std::collections::BTreeMap;

const W: f64 = 640.0;
const H: f64 = 420.0;
const ML: f64 = 70.0;
const MR: f64 = 20.0;
const MT: f64 = 28.0;
const MB: f64 = 48.0;

const PALETTE: [&str; 6] = [
    "#1a6fb5", "#c23b22", "#2e8540", "#7d4ba0", "#d97a1f", "#5c5c5c",
];

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

struct Series {
    /// (m, risk, minimax-overlay-if-any)
    points: Vec<(f64, f64, Option<f64>)>,
}

fn group_label(table: &Table, row: usize) -> String {
    let mut parts = Vec::new();
    for name in ["n", "k", "alpha"] {
        if let Some(c) = table.col(name) {
            parts.push(format!("{name}={}", table.rows[row][c]));
        }
    }
    if parts.is_empty() {
        "series".to_string()
    } else {
        parts.join(" ")
    }
}

/// Render a line plot (risk vs m, log-scale y) with vertical markers at
/// measurement-count thresholds (`thr_*` columns) and a dashed overlay of
/// the `minimax_lower` column when present.
pub fn emit_plot(csv_text: &str) -> Result<String, CsvError> {
    let table = csv::parse(csv_text)?;
    let manifest_hash = table.manifest_hash.clone().ok_or(CsvError::Parse {
        line: 1,
        msg: format!("missing `# {}=` comment", csv::MANIFEST_KEY),
    })?;
    let m_col = table.require("m")?;
    let risk_col = table.require("risk")?;
    let minimax_col = table.col("minimax_lower");
    let thr_cols: Vec<usize> = (0..table.columns.len())
        .filter(|c| table.columns[*c].starts_with("thr_"))
        .collect();

    let mut groups: BTreeMap<String, Series> = BTreeMap::new();
    // (column name, value bits) so duplicates collapse to one marker
    let mut thresholds: BTreeMap<(String, u64), f64> = BTreeMap::new();
    for row in 0..table.rows.len() {
        let m = csv::parse_f64(&table, row, m_col)?;
        let risk = csv::parse_f64(&table, row, risk_col)?;
        if !m.is_finite() || !risk.is_finite() {
            return Err(CsvError::Parse {
                line: table.row_lines[row],
                msg: "non-finite value".to_string(),
            });
        }
        let overlay = match minimax_col {
            Some(c) if !table.rows[row][c].is_empty() => {
                Some(csv::parse_f64(&table, row, c)?)
            }
            _ => None,
        };
        for &c in &thr_cols {
            if table.rows[row][c].is_empty() {
                continue;
            }
            let v = csv::parse_f64(&table, row, c)?;
            thresholds.insert((table.columns[c].clone(), v.to_bits()), v);
        }
        groups
            .entry(group_label(&table, row))
            .or_insert(Series { points: Vec::new() })
            .points
            .push((m, risk, overlay));
    }
    if groups.is_empty() {
        return Err(CsvError::Parse {
            line: table.header_line,
            msg: "no data rows".to_string(),
        });
    }
    for s in groups.values_mut() {
        s.points
            .sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite by check above"));
    }

    // x range covers the data and every marker; y decades cover all
    // positive plotted values
    let mut xs: Vec<f64> = groups
        .values()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    xs.extend(thresholds.values().copied());
    let (xlo_raw, xhi_raw) = xs
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(*v), hi.max(*v))
        });
    let pad = if xhi_raw > xlo_raw {
        0.05 * (xhi_raw - xlo_raw)
    } else {
        1.0
    };
    let (xlo, xhi) = (xlo_raw - pad, xhi_raw + pad);

    let positives: Vec<f64> = groups
        .values()
        .flat_map(|s| s.points.iter().flat_map(|p| [Some(p.1), p.2]).flatten())
        .filter(|v| *v > 0.0)
        .collect();
    let (dlo, dhi) = if positives.is_empty() {
        (-1i64, 1i64)
    } else {
        let lo = positives.iter().fold(f64::INFINITY, |a, v| a.min(*v));
        let hi = positives.iter().fold(f64::NEG_INFINITY, |a, v| a.max(*v));
        let mut dlo = lo.log10().floor() as i64;
        let mut dhi = hi.log10().ceil() as i64;
        if dlo == dhi {
            dlo -= 1;
            dhi += 1;
        }
        (dlo, dhi)
    };

    let px = |x: f64| ML + (x - xlo) / (xhi - xlo) * (W - ML - MR);
    let py = |v: f64| {
        let d = if v > 0.0 { v.log10() } else { dlo as f64 };
        let d = d.clamp(dlo as f64, dhi as f64);
        MT + (dhi as f64 - d) / (dhi - dlo) as f64 * (H - MT - MB)
    };

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\" \
         viewBox=\"0 0 {W} {H}\" font-family=\"monospace\" font-size=\"11\">\n"
    ));
    out.push_str(&format!("<!-- {}={} -->\n", csv::MANIFEST_KEY, manifest_hash));
    out.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{W}\" height=\"{H}\" fill=\"#ffffff\"/>\n"
    ));

    // decade gridlines and labels
    let decades: Vec<i64> = (dlo..=dhi).collect();
    let step = (decades.len() as f64 / 10.0).ceil() as usize;
    for d in decades.iter().step_by(step.max(1)) {
        let y = py(10f64.powi(*d as i32));
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#dddddd\"/>\n",
            ML,
            y,
            W - MR,
            y
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\">1e{}</text>\n",
            ML - 6.0,
            y + 4.0,
            d
        ));
    }

    // x ticks at observed m values
    let mut ticks: Vec<f64> = groups
        .values()
        .flat_map(|s| s.points.iter().map(|p| p.0))
        .collect();
    ticks.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    ticks.dedup_by(|a, b| a.to_bits() == b.to_bits());
    let tstep = (ticks.len() as f64 / 10.0).ceil() as usize;
    for t in ticks.iter().step_by(tstep.max(1)) {
        let x = px(*t);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\" stroke=\"#000000\"/>\n",
            x,
            H - MB,
            x,
            H - MB + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">{}</text>\n",
            x,
            H - MB + 18.0,
            t
        ));
    }

    // frame and captions
    out.push_str(&format!(
        "<rect x=\"{ML}\" y=\"{MT}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#000000\"/>\n",
        W - ML - MR,
        H - MT - MB
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"middle\">m</text>\n",
        ML + (W - ML - MR) / 2.0,
        H - 10.0
    ));
    out.push_str(&format!("<text x=\"8\" y=\"16\">risk (log scale)</text>\n"));

    // vertical threshold markers, labels staggered below the top edge
    for (i, ((name, _), value)) in thresholds.iter().enumerate() {
        let x = px(*value);
        out.push_str(&format!(
            "<line class=\"threshold\" x1=\"{:.2}\" y1=\"{MT}\" x2=\"{:.2}\" y2=\"{:.2}\" \
             stroke=\"#888888\" stroke-dasharray=\"4 3\"/>\n",
            x,
            x,
            H - MB
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" fill=\"#555555\">{}={}</text>\n",
            x + 3.0,
            MT + 14.0 + 12.0 * i as f64,
            escape_xml(name.trim_start_matches("thr_")),
            value
        ));
    }

    // dashed overlay of the risk floor, one path per series
    for (gi, series) in groups.values().enumerate() {
        let overlay: Vec<(f64, f64)> = series
            .points
            .iter()
            .filter_map(|(m, _, o)| o.map(|v| (*m, v)))
            .collect();
        if overlay.len() < 2 {
            continue;
        }
        let mut d = String::new();
        for (i, (m, v)) in overlay.iter().enumerate() {
            let cmd = if i == 0 { 'M' } else { 'L' };
            d.push_str(&format!("{cmd}{:.2},{:.2} ", px(*m), py(*v)));
        }
        out.push_str(&format!(
            "<path d=\"{}\" fill=\"none\" stroke=\"{}\" stroke-dasharray=\"6 3\"/>\n",
            d.trim_end(),
            PALETTE[gi % PALETTE.len()]
        ));
    }

    // empirical series: the only polyline elements in the file
    for (gi, series) in groups.values().enumerate() {
        let points: Vec<String> = series
            .points
            .iter()
            .map(|(m, risk, _)| format!("{:.2},{:.2}", px(*m), py(*risk)))
            .collect();
        out.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            PALETTE[gi % PALETTE.len()],
            points.join(" ")
        ));
    }

    // legend, top right
    for (gi, label) in groups.keys().enumerate() {
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" text-anchor=\"end\" fill=\"{}\">{}</text>\n",
            W - MR - 6.0,
            MT + 14.0 + 12.0 * gi as f64,
            PALETTE[gi % PALETTE.len()],
            escape_xml(label)
        ));
    }

    out.push_str("</svg>\n");
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_point_csv() -> String {
        csv::render(
            "deadbeef",
            &["m", "risk"],
            &[
                vec!["1".into(), "0.5".into()],
                vec!["2".into(), "0.125".into()],
            ],
        )
    }

    #[test]
    fn two_points_one_polyline_two_vertices() {
        let svg = emit_plot(&two_point_csv()).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        let points = svg
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        assert_eq!(points.split_whitespace().count(), 2);
        assert!(svg.contains("manifest_hash=deadbeef"));
    }

    #[test]
    fn identical_input_gives_identical_bytes() {
        assert_eq!(
            emit_plot(&two_point_csv()).unwrap(),
            emit_plot(&two_point_csv()).unwrap()
        );
    }

    #[test]
    fn one_marker_per_threshold_column() {
        let text = csv::render(
            "h",
            &["m", "risk", "thr_m_lower", "thr_m_upper"],
            &[
                vec!["1".into(), "0.5".into(), "3.5".into(), "9".into()],
                vec!["2".into(), "0.25".into(), "3.5".into(), "9".into()],
            ],
        );
        let svg = emit_plot(&text).unwrap();
        assert_eq!(svg.matches("class=\"threshold\"").count(), 2);
        assert!(svg.contains("m_lower=3.5"));
        assert!(svg.contains("m_upper=9"));
    }

    #[test]
    fn minimax_column_becomes_dashed_path_not_polyline() {
        let text = csv::render(
            "h",
            &["m", "risk", "minimax_lower"],
            &[
                vec!["1".into(), "0.5".into(), "0.1".into()],
                vec!["2".into(), "0.25".into(), "0.05".into()],
            ],
        );
        let svg = emit_plot(&text).unwrap();
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert_eq!(svg.matches("<path").count(), 1);
    }

    #[test]
    fn missing_columns_and_bad_numbers_report_lines() {
        let no_risk = csv::render("h", &["m", "value"], &[vec!["1".into(), "2".into()]]);
        match emit_plot(&no_risk).unwrap_err() {
            CsvError::Parse { msg, .. } => assert!(msg.contains("risk")),
        }
        let bad = "# manifest_hash=h\nm,risk\n1,0.5\n2,oops\n";
        match emit_plot(bad).unwrap_err() {
            CsvError::Parse { line, .. } => assert_eq!(line, 4),
        }
    }

    #[test]
    fn missing_manifest_comment_is_rejected() {
        let text = "m,risk\n1,0.5\n";
        assert!(matches!(emit_plot(text), Err(CsvError::Parse { line: 1, .. })));
    }
}
