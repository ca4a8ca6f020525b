//! Self-contained SVG line plots: axes, tick labels, and one polyline per
//! trace. No external renderer or font resources required.

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN_L: f64 = 80.0;
const MARGIN_R: f64 = 30.0;
const MARGIN_T: f64 = 40.0;
const MARGIN_B: f64 = 60.0;

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
];

/// One labeled curve.
#[derive(Debug, Clone)]
pub struct Trace {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Plot description; traces may be empty (axes-only output).
#[derive(Debug, Clone)]
pub struct Plot {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub traces: Vec<Trace>,
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        "0".to_string()
    } else if v.abs() >= 1e4 || v.abs() < 1e-3 {
        format!("{v:.3e}")
    } else {
        format!("{v:.4}")
    }
}

/// Render the plot to `path`.
pub fn write_svg(plot: &Plot, path: &Path) -> Result<()> {
    for t in &plot.traces {
        if t.points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::Contract(format!(
                "trace {:?} contains non-finite points",
                t.label
            )));
        }
    }
    let (mut x_min, mut x_max) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut y_min, mut y_max) = (f64::INFINITY, f64::NEG_INFINITY);
    for t in &plot.traces {
        for &(x, y) in &t.points {
            x_min = x_min.min(x);
            x_max = x_max.max(x);
            y_min = y_min.min(y);
            y_max = y_max.max(y);
        }
    }
    if !x_min.is_finite() {
        // No data: draw axes over a unit box.
        (x_min, x_max, y_min, y_max) = (0.0, 1.0, 0.0, 1.0);
    }
    if x_max == x_min {
        x_max = x_min + 1.0;
    }
    if y_max == y_min {
        y_max = y_min + 1.0;
    }
    let pad_y = 0.05 * (y_max - y_min);
    y_min -= pad_y;
    y_max += pad_y;

    let plot_w = WIDTH - MARGIN_L - MARGIN_R;
    let plot_h = HEIGHT - MARGIN_T - MARGIN_B;
    let sx = |x: f64| MARGIN_L + (x - x_min) / (x_max - x_min) * plot_w;
    let sy = |y: f64| MARGIN_T + (y_max - y) / (y_max - y_min) * plot_h;

    let mut s = String::new();
    s.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    s.push_str(&format!(
        "<rect x=\"0\" y=\"0\" width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    s.push_str(&format!(
        "<text x=\"{}\" y=\"24\" font-family=\"sans-serif\" font-size=\"16\" \
         text-anchor=\"middle\">{}</text>\n",
        WIDTH / 2.0,
        xml_escape(&plot.title)
    ));
    // Axes.
    s.push_str(&format!(
        "<line x1=\"{l}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{l}\" y1=\"{t}\" x2=\"{l}\" y2=\"{b}\" stroke=\"black\"/>\n",
        l = MARGIN_L,
        r = WIDTH - MARGIN_R,
        t = MARGIN_T,
        b = HEIGHT - MARGIN_B
    ));
    // Ticks: 5 per axis.
    for k in 0..=4 {
        let fx = x_min + (x_max - x_min) * k as f64 / 4.0;
        let fy = y_min + (y_max - y_min) * k as f64 / 4.0;
        let px = sx(fx);
        let py = sy(fy);
        s.push_str(&format!(
            "<line x1=\"{px}\" y1=\"{b}\" x2=\"{px}\" y2=\"{b2}\" stroke=\"black\"/>\n\
             <text x=\"{px}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"middle\">{}</text>\n",
            fmt_tick(fx),
            b = HEIGHT - MARGIN_B,
            b2 = HEIGHT - MARGIN_B + 6.0,
            ty = HEIGHT - MARGIN_B + 20.0,
        ));
        s.push_str(&format!(
            "<line x1=\"{l}\" y1=\"{py}\" x2=\"{l2}\" y2=\"{py}\" stroke=\"black\"/>\n\
             <text x=\"{tx}\" y=\"{tyy}\" font-family=\"sans-serif\" font-size=\"11\" \
             text-anchor=\"end\">{}</text>\n",
            fmt_tick(fy),
            l = MARGIN_L,
            l2 = MARGIN_L - 6.0,
            tx = MARGIN_L - 10.0,
            tyy = py + 4.0,
        ));
    }
    // Axis labels.
    s.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\">{}</text>\n",
        MARGIN_L + plot_w / 2.0,
        HEIGHT - 14.0,
        xml_escape(&plot.x_label)
    ));
    s.push_str(&format!(
        "<text x=\"18\" y=\"{}\" font-family=\"sans-serif\" font-size=\"13\" \
         text-anchor=\"middle\" transform=\"rotate(-90 18 {mid})\">{}</text>\n",
        MARGIN_T + plot_h / 2.0,
        xml_escape(&plot.y_label),
        mid = MARGIN_T + plot_h / 2.0
    ));
    // Traces and legend.
    for (k, trace) in plot.traces.iter().enumerate() {
        let color = PALETTE[k % PALETTE.len()];
        let pts: Vec<String> = trace
            .points
            .iter()
            .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
            .collect();
        s.push_str(&format!(
            "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
            pts.join(" ")
        ));
        if !trace.label.is_empty() {
            let ly = MARGIN_T + 16.0 * k as f64 + 10.0;
            s.push_str(&format!(
                "<line x1=\"{x1}\" y1=\"{ly}\" x2=\"{x2}\" y2=\"{ly}\" stroke=\"{color}\" \
                 stroke-width=\"2\"/>\n\
                 <text x=\"{tx}\" y=\"{ty}\" font-family=\"sans-serif\" font-size=\"11\">{}</text>\n",
                xml_escape(&trace.label),
                x1 = WIDTH - MARGIN_R - 130.0,
                x2 = WIDTH - MARGIN_R - 110.0,
                tx = WIDTH - MARGIN_R - 104.0,
                ty = ly + 4.0,
            ));
        }
    }
    s.push_str("</svg>\n");
    let mut file = std::fs::File::create(path)?;
    file.write_all(s.as_bytes())?;
    Ok(())
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trace_single_polyline() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p.svg");
        let plot = Plot {
            title: "t".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            traces: vec![Trace {
                label: "a".into(),
                points: vec![(0.0, 0.0), (1.0, 2.0), (2.0, 1.0)],
            }],
        };
        write_svg(&plot, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("<polyline").count(), 1);
        assert!(text.starts_with("<svg"));
        assert!(text.trim_end().ends_with("</svg>"));
    }

    #[test]
    fn empty_trace_set_is_valid_axes_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("e.svg");
        let plot = Plot {
            title: "empty".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            traces: vec![],
        };
        write_svg(&plot, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.matches("<polyline").count(), 0);
        assert!(text.contains("<line"));
        assert!(text.contains("</svg>"));
    }

    #[test]
    fn non_finite_points_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let plot = Plot {
            title: String::new(),
            x_label: String::new(),
            y_label: String::new(),
            traces: vec![Trace {
                label: String::new(),
                points: vec![(0.0, f64::NAN)],
            }],
        };
        assert!(write_svg(&plot, &dir.path().join("n.svg")).is_err());
    }

    #[test]
    fn labels_escaped() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("esc.svg");
        let plot = Plot {
            title: "a < b & c".into(),
            x_label: "x".into(),
            y_label: "y".into(),
            traces: vec![],
        };
        write_svg(&plot, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("a &lt; b &amp; c"));
    }
}
