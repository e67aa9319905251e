//! Minimal SVG line chart for sweep results. The CSV is the contract;
//! the chart is a convenience rendering of compute seconds per preset.

use std::collections::BTreeMap;

use crate::sweep::Row;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 500.0;
const MARGIN: f64 = 60.0;
const COLORS: [&str; 3] = ["#1f77b4", "#d62728", "#2ca02c"];

pub fn line_chart(axis: &str, rows: &[Row]) -> String {
    // Series per preset, ordered by sweep point.
    let mut series: BTreeMap<&'static str, Vec<(f64, f64)>> = BTreeMap::new();
    let mut points: Vec<u64> = Vec::new();
    for row in rows {
        if let Some(report) = &row.report {
            if !points.contains(&row.point) {
                points.push(row.point);
            }
            series
                .entry(row.preset.name())
                .or_default()
                .push((row.point as f64, report.compute_seconds));
        }
    }
    if points.is_empty() {
        return format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\">\
             <text x=\"20\" y=\"40\">no data points</text></svg>"
        );
    }

    let ys: Vec<f64> = series
        .values()
        .flatten()
        .map(|&(_, y)| y.max(1e-12))
        .collect();
    let (y_min, y_max) = ys
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &y| (lo.min(y), hi.max(y)));
    let log_y = y_max / y_min > 50.0;
    let log_x = points.len() > 2 && *points.last().unwrap() / points[0] > 50;

    let xs: Vec<f64> = points.iter().map(|&p| p as f64).collect();
    let (x_min, x_max) = (xs[0], *xs.last().unwrap());
    let map_x = move |x: f64| -> f64 {
        let (a, b, v) = if log_x {
            (x_min.ln(), x_max.ln(), x.ln())
        } else {
            (x_min, x_max, x)
        };
        if b == a {
            return MARGIN + (WIDTH - 2.0 * MARGIN) / 2.0;
        }
        MARGIN + (v - a) / (b - a) * (WIDTH - 2.0 * MARGIN)
    };
    let map_y = move |y: f64| -> f64 {
        let y = y.max(1e-12);
        let (a, b, v) = if log_y {
            (y_min.ln(), y_max.ln(), y.ln())
        } else {
            (0.0, y_max, y)
        };
        if b == a {
            return HEIGHT / 2.0;
        }
        HEIGHT - MARGIN - (v - a) / (b - a) * (HEIGHT - 2.0 * MARGIN)
    };

    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\" font-family=\"sans-serif\" font-size=\"12\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{WIDTH}\" height=\"{HEIGHT}\" fill=\"white\"/>\n"
    ));
    // Axes
    svg.push_str(&format!(
        "<line x1=\"{m}\" y1=\"{b}\" x2=\"{r}\" y2=\"{b}\" stroke=\"black\"/>\n\
         <line x1=\"{m}\" y1=\"{t}\" x2=\"{m}\" y2=\"{b}\" stroke=\"black\"/>\n",
        m = MARGIN,
        b = HEIGHT - MARGIN,
        r = WIDTH - MARGIN,
        t = MARGIN
    ));
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{axis}</text>\n",
        WIDTH / 2.0,
        HEIGHT - 15.0
    ));
    svg.push_str(&format!(
        "<text x=\"18\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">compute seconds{}</text>\n",
        HEIGHT / 2.0,
        HEIGHT / 2.0,
        if log_y { " (log)" } else { "" }
    ));
    // X tick labels
    for &p in &points {
        let x = map_x(p as f64);
        svg.push_str(&format!(
            "<line x1=\"{x}\" y1=\"{b}\" x2=\"{x}\" y2=\"{b2}\" stroke=\"black\"/>\n\
             <text x=\"{x}\" y=\"{ly}\" text-anchor=\"middle\">{p}</text>\n",
            b = HEIGHT - MARGIN,
            b2 = HEIGHT - MARGIN + 5.0,
            ly = HEIGHT - MARGIN + 20.0
        ));
    }
    // Series polylines + legend
    for (i, (name, pts)) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let path: Vec<String> = pts
            .iter()
            .map(|&(x, y)| format!("{:.1},{:.1}", map_x(x), map_y(y)))
            .collect();
        svg.push_str(&format!(
            "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            path.join(" ")
        ));
        for &(x, y) in pts {
            svg.push_str(&format!(
                "<circle cx=\"{:.1}\" cy=\"{:.1}\" r=\"3\" fill=\"{color}\"/>\n",
                map_x(x),
                map_y(y)
            ));
        }
        let ly = MARGIN + 18.0 * i as f64;
        svg.push_str(&format!(
            "<rect x=\"{lx}\" y=\"{ry}\" width=\"12\" height=\"12\" fill=\"{color}\"/>\n\
             <text x=\"{tx}\" y=\"{ty}\">{name}</text>\n",
            lx = WIDTH - MARGIN - 110.0,
            ry = ly - 10.0,
            tx = WIDTH - MARGIN - 92.0,
            ty = ly
        ));
    }
    svg.push_str("</svg>\n");
    svg
}
