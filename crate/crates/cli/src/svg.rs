//! Hand-emitted SVG for boundary amplitude plots.

use std::fmt::Write as _;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 420.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 24.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;
const Y_MAX: f64 = 1.05;

pub struct PlotData {
    pub times: Vec<f64>,
    pub abs_x0: Vec<f64>,
    pub abs_xn: Vec<f64>,
    pub ese_times: Vec<f64>,
    pub transfer_time: Option<f64>,
    pub n_sites: usize,
}

struct Frame {
    t0: f64,
    t1: f64,
}

impl Frame {
    fn x(&self, t: f64) -> f64 {
        LEFT + (t - self.t0) / (self.t1 - self.t0) * (WIDTH - LEFT - RIGHT)
    }

    fn y(&self, v: f64) -> f64 {
        HEIGHT - BOTTOM - v.clamp(0.0, Y_MAX) / Y_MAX * (HEIGHT - TOP - BOTTOM)
    }
}

/// Tick spacing from {1, 2, 5} × 10^k giving at most `max_ticks` intervals.
fn tick_step(range: f64, max_ticks: usize) -> f64 {
    let raw = range / max_ticks as f64;
    let magnitude = 10f64.powf(raw.log10().floor());
    [1.0, 2.0, 5.0, 10.0]
        .into_iter()
        .map(|m| m * magnitude)
        .find(|&s| s >= raw)
        .unwrap_or(10.0 * magnitude)
}

fn label(v: f64, step: f64) -> String {
    let decimals = (-step.log10().floor()).max(0.0) as usize;
    let s = format!("{v:.decimals$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn polyline(frame: &Frame, times: &[f64], values: &[f64]) -> String {
    times
        .iter()
        .zip(values)
        .map(|(&t, &v)| format!("{:.2},{:.2}", frame.x(t), frame.y(v)))
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders `|x_0|` solid and `|x_N|` dashed with ESE and transfer markers.
pub fn render(data: &PlotData) -> String {
    let frame = Frame {
        t0: data.times[0],
        t1: *data.times.last().expect("at least two samples"),
    };
    let (x_left, x_right) = (LEFT, WIDTH - RIGHT);
    let (y_top, y_bottom) = (frame.y(Y_MAX), frame.y(0.0));
    let mut s = String::new();

    let _ = writeln!(s, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        s,
        r#"<title>Boundary amplitudes of a {}-site chain</title>"#,
        data.n_sites
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#
    );

    let _ = writeln!(s, r#"<g class="axes" stroke="black" stroke-width="1">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{x_left}" y1="{y_bottom:.2}" x2="{x_right}" y2="{y_bottom:.2}"/>"#
    );
    let _ = writeln!(
        s,
        r#"<line x1="{x_left}" y1="{y_bottom:.2}" x2="{x_left}" y2="{y_top:.2}"/>"#
    );
    let _ = writeln!(s, "</g>");

    let step = tick_step(frame.t1 - frame.t0, 8);
    let _ = writeln!(s, r#"<g class="x-ticks" text-anchor="middle">"#);
    let mut k = (frame.t0 / step).ceil() as i64;
    while (k as f64) * step <= frame.t1 + 1e-9 * step {
        let t = k as f64 * step;
        let x = frame.x(t);
        let _ = writeln!(
            s,
            r#"<line x1="{x:.2}" y1="{y_bottom:.2}" x2="{x:.2}" y2="{:.2}" stroke="black"/><text x="{x:.2}" y="{:.2}">{}</text>"#,
            y_bottom + 5.0,
            y_bottom + 18.0,
            label(t, step)
        );
        k += 1;
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(s, r#"<g class="y-ticks" text-anchor="end">"#);
    for i in 0..=5 {
        let v = i as f64 * 0.2;
        let y = frame.y(v);
        let _ = writeln!(
            s,
            r#"<line x1="{:.2}" y1="{y:.2}" x2="{x_left}" y2="{y:.2}" stroke="black"/><text x="{:.2}" y="{:.2}">{v:.1}</text>"#,
            x_left - 5.0,
            x_left - 8.0,
            y + 4.0
        );
    }
    let _ = writeln!(s, "</g>");

    let _ = writeln!(
        s,
        r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">t</text>"#,
        (x_left + x_right) / 2.0,
        HEIGHT - 14.0
    );

    for &t in &data.ese_times {
        let x = frame.x(t);
        let _ = writeln!(
            s,
            r#"<g class="ese-marker" data-t="{t:.9}"><line x1="{x:.2}" y1="{y_bottom:.2}" x2="{x:.2}" y2="{y_top:.2}" stroke="green" stroke-width="1" stroke-dasharray="2 3"/><circle cx="{x:.2}" cy="{y_bottom:.2}" r="4" fill="green"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" fill="green">ESE</text></g>"#,
            y_top - 6.0
        );
    }
    if let Some(t) = data.transfer_time {
        let x = frame.x(t);
        let _ = writeln!(
            s,
            r#"<g class="pst-marker" data-t="{t:.9}"><line x1="{x:.2}" y1="{y_bottom:.2}" x2="{x:.2}" y2="{y_top:.2}" stroke="gray" stroke-width="1"/><text x="{x:.2}" y="{:.2}" text-anchor="middle" fill="gray">T0</text></g>"#,
            y_top - 6.0
        );
    }

    let _ = writeln!(
        s,
        r#"<polyline class="curve-x0" fill="none" stroke="steelblue" stroke-width="1.5" points="{}"/>"#,
        polyline(&frame, &data.times, &data.abs_x0)
    );
    let _ = writeln!(
        s,
        r#"<polyline class="curve-xN" fill="none" stroke="firebrick" stroke-width="1.5" stroke-dasharray="6 4" points="{}"/>"#,
        polyline(&frame, &data.times, &data.abs_xn)
    );

    let lx = x_right - 110.0;
    let _ = writeln!(s, r#"<g class="legend">"#);
    let _ = writeln!(
        s,
        r#"<line x1="{lx:.2}" y1="16" x2="{:.2}" y2="16" stroke="steelblue" stroke-width="1.5"/><text x="{:.2}" y="20">|x_0(t)|</text>"#,
        lx + 24.0,
        lx + 30.0
    );
    let _ = writeln!(
        s,
        r#"<line x1="{lx:.2}" y1="30" x2="{:.2}" y2="30" stroke="firebrick" stroke-width="1.5" stroke-dasharray="6 4"/><text x="{:.2}" y="34">|x_N(t)|</text>"#,
        lx + 24.0,
        lx + 30.0
    );
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, "</svg>");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tick_steps() {
        assert_eq!(tick_step(std::f64::consts::PI, 8), 0.5);
        assert_eq!(tick_step(10.0, 8), 2.0);
        assert_eq!(tick_step(1.0, 10), 0.1);
        assert_eq!(label(0.5, 0.5), "0.5");
        assert_eq!(label(-0.0, 0.5), "0.0");
        assert_eq!(label(4.0, 2.0), "4");
    }
}
