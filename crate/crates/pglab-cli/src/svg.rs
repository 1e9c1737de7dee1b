//! Minimal SVG line charts: one panel per group, overlaid semi-transparent
//! polylines, linear or log10 x axis. No plotting dependency; output bytes
//! are deterministic for a given input (modulo the embedded version).

/// One chart panel: a title and a set of (x, y) series.
pub struct Panel {
    pub title: String,
    pub series: Vec<Vec<(f64, f64)>>,
}

const PANEL_W: f64 = 380.0;
const PANEL_H: f64 = 280.0;
const MARGIN_L: f64 = 56.0;
const MARGIN_R: f64 = 14.0;
const MARGIN_T: f64 = 34.0;
const MARGIN_B: f64 = 44.0;
const MAX_POINTS_PER_SERIES: usize = 4000;

/// Render panels in a near-square grid. `log_x` plots against log10(x) and
/// drops non-positive x values.
pub fn render(panels: &[Panel], x_label: &str, y_label: &str, log_x: bool, version: &str) -> String {
    let cols = (panels.len() as f64).sqrt().ceil().max(1.0) as usize;
    let rows = panels.len().div_ceil(cols);
    let width = cols as f64 * PANEL_W;
    let height = rows as f64 * PANEL_H;
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" \
         viewBox=\"0 0 {width} {height}\" font-family=\"sans-serif\">\n"
    ));
    out.push_str(&format!("<!-- pglab {version} -->\n"));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    for (i, panel) in panels.iter().enumerate() {
        let x0 = (i % cols) as f64 * PANEL_W;
        let y0 = (i / cols) as f64 * PANEL_H;
        render_panel(&mut out, panel, x0, y0, x_label, y_label, log_x);
    }
    out.push_str("</svg>\n");
    out
}

fn render_panel(
    out: &mut String,
    panel: &Panel,
    x0: f64,
    y0: f64,
    x_label: &str,
    y_label: &str,
    log_x: bool,
) {
    let transform = |x: f64| if log_x { x.log10() } else { x };
    let series: Vec<Vec<(f64, f64)>> = panel
        .series
        .iter()
        .map(|s| {
            let pts: Vec<(f64, f64)> = s
                .iter()
                .filter(|(x, y)| (!log_x || *x > 0.0) && x.is_finite() && y.is_finite())
                .map(|&(x, y)| (transform(x), y))
                .collect();
            thin(pts)
        })
        .collect();

    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut ymin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
    for s in &series {
        for &(x, y) in s {
            xmin = xmin.min(x);
            xmax = xmax.max(x);
            ymin = ymin.min(y);
            ymax = ymax.max(y);
        }
    }
    if !xmin.is_finite() {
        (xmin, xmax, ymin, ymax) = (0.0, 1.0, 0.0, 1.0);
    }
    if xmax - xmin < 1e-300 {
        xmax = xmin + 1.0;
    }
    if ymax - ymin < 1e-300 {
        ymax = ymin + 1.0;
    }
    let pad = (ymax - ymin) * 0.05;
    ymin -= pad;
    ymax += pad;

    let plot_l = x0 + MARGIN_L;
    let plot_t = y0 + MARGIN_T;
    let plot_w = PANEL_W - MARGIN_L - MARGIN_R;
    let plot_h = PANEL_H - MARGIN_T - MARGIN_B;
    let sx = |x: f64| plot_l + (x - xmin) / (xmax - xmin) * plot_w;
    let sy = |y: f64| plot_t + (ymax - y) / (ymax - ymin) * plot_h;

    out.push_str(&format!(
        "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"{:.2}\" height=\"{:.2}\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n",
        plot_l, plot_t, plot_w, plot_h
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">{}</text>\n",
        plot_l + plot_w / 2.0,
        y0 + 20.0,
        escape(&panel.title)
    ));

    for i in 0..=4 {
        let fx = xmin + (xmax - xmin) * i as f64 / 4.0;
        let px = sx(fx);
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{:.2}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"#444\" stroke-width=\"1\"/>\n",
            plot_t + plot_h,
            plot_t + plot_h + 4.0
        ));
        let label = if log_x {
            format!("1e{}", fmt_tick(fx))
        } else {
            fmt_tick(fx)
        };
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"middle\">{label}</text>\n",
            plot_t + plot_h + 16.0
        ));
        let fy = ymin + (ymax - ymin) * i as f64 / 4.0;
        let py = sy(fy);
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{:.2}\" y2=\"{py:.2}\" stroke=\"#444\" stroke-width=\"1\"/>\n",
            plot_l - 4.0,
            plot_l
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
            plot_l - 7.0,
            py + 3.0,
            fmt_tick(fy)
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{}</text>\n",
        plot_l + plot_w / 2.0,
        y0 + PANEL_H - 10.0,
        escape(&if log_x {
            format!("log10({x_label})")
        } else {
            x_label.to_string()
        })
    ));
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 {:.2} {:.2})\">{}</text>\n",
        x0 + 14.0,
        plot_t + plot_h / 2.0,
        x0 + 14.0,
        plot_t + plot_h / 2.0,
        escape(y_label)
    ));

    for s in &series {
        if s.is_empty() {
            continue;
        }
        out.push_str("<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1\" stroke-opacity=\"0.35\" points=\"");
        for &(x, y) in s {
            out.push_str(&format!("{:.2},{:.2} ", sx(x), sy(y)));
        }
        out.push_str("\"/>\n");
    }
}

// Subsample long series so huge sweeps stay renderable.
fn thin(pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    if pts.len() <= MAX_POINTS_PER_SERIES {
        return pts;
    }
    let stride = pts.len().div_ceil(MAX_POINTS_PER_SERIES);
    let mut out: Vec<(f64, f64)> = pts.iter().step_by(stride).copied().collect();
    if out.last() != pts.last() {
        out.push(*pts.last().unwrap());
    }
    out
}

fn fmt_tick(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    let a = v.abs();
    let s = if a >= 1000.0 {
        format!("{v:.0}")
    } else if a >= 1.0 {
        format!("{v:.2}")
    } else {
        format!("{v:.4}")
    };
    let trimmed = s.trim_end_matches('0').trim_end_matches('.');
    trimmed.to_string()
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
