//! Minimal self-contained SVG line charts.

use std::fmt::Write as _;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 420.0;
const MARGIN_LEFT: f64 = 70.0;
const MARGIN_RIGHT: f64 = 20.0;
const MARGIN_TOP: f64 = 40.0;
const MARGIN_BOTTOM: f64 = 50.0;
const TICKS: usize = 5;

pub enum Layer {
    Line {
        points: Vec<(f64, f64)>,
        color: &'static str,
        label: String,
    },
    Markers {
        points: Vec<(f64, f64)>,
        color: &'static str,
        label: String,
    },
    /// Shaded region between `(x, lower, upper)` triples.
    Band {
        points: Vec<(f64, f64, f64)>,
        color: &'static str,
        label: String,
    },
    /// Vertical rule at `x`.
    Rule { x: f64, label: String },
}

pub struct Chart {
    pub title: String,
    pub x_label: String,
    pub y_label: String,
    pub layers: Vec<Layer>,
    /// Tick label for an x value; plain numbers by default.
    pub x_ticks: Box<dyn Fn(f64) -> String>,
}

impl Chart {
    pub fn new(title: impl Into<String>, x_label: impl Into<String>, y_label: impl Into<String>) -> Self {
        Self {
            title: title.into(),
            x_label: x_label.into(),
            y_label: y_label.into(),
            layers: Vec::new(),
            x_ticks: Box::new(fmt_tick),
        }
    }

    fn extent(&self) -> ((f64, f64), (f64, f64)) {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for l in &self.layers {
            match l {
                Layer::Line { points, .. } | Layer::Markers { points, .. } => {
                    for &(x, y) in points {
                        xs.push(x);
                        ys.push(y);
                    }
                }
                Layer::Band { points, .. } => {
                    for &(x, lo, hi) in points {
                        xs.push(x);
                        ys.extend([lo, hi]);
                    }
                }
                Layer::Rule { x, .. } => xs.push(*x),
            }
        }
        (range(&xs), range(&ys))
    }

    pub fn render(&self) -> String {
        let ((x0, x1), (y0, y1)) = self.extent();
        let pw = WIDTH - MARGIN_LEFT - MARGIN_RIGHT;
        let ph = HEIGHT - MARGIN_TOP - MARGIN_BOTTOM;
        let sx = |x: f64| MARGIN_LEFT + (x - x0) / (x1 - x0) * pw;
        let sy = |y: f64| MARGIN_TOP + (y1 - y) / (y1 - y0) * ph;

        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">"#
        );
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{}" y="22" text-anchor="middle" font-size="15">{}</text>"#,
            WIDTH / 2.0,
            escape(&self.title)
        );

        // axes and ticks
        let (bx, by) = (MARGIN_LEFT, MARGIN_TOP + ph);
        let _ = writeln!(
            s,
            r##"<path d="M{bx},{MARGIN_TOP} V{by} H{}" fill="none" stroke="#333"/>"##,
            MARGIN_LEFT + pw
        );
        for i in 0..=TICKS {
            let f = i as f64 / TICKS as f64;
            let (xv, yv) = (x0 + f * (x1 - x0), y0 + f * (y1 - y0));
            let (px, py) = (sx(xv), sy(yv));
            let _ = writeln!(
                s,
                r##"<line x1="{px:.2}" y1="{by}" x2="{px:.2}" y2="{:.2}" stroke="#333"/><text x="{px:.2}" y="{:.2}" text-anchor="middle">{}</text>"##,
                by + 5.0,
                by + 18.0,
                escape(&(self.x_ticks)(xv))
            );
            let _ = writeln!(
                s,
                r##"<line x1="{:.2}" y1="{py:.2}" x2="{bx}" y2="{py:.2}" stroke="#333"/><text x="{:.2}" y="{:.2}" text-anchor="end">{}</text>"##,
                bx - 5.0,
                bx - 8.0,
                py + 4.0,
                escape(&fmt_tick(yv))
            );
        }
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" text-anchor="middle">{}</text>"#,
            MARGIN_LEFT + pw / 2.0,
            HEIGHT - 10.0,
            escape(&self.x_label)
        );
        let _ = writeln!(
            s,
            r#"<text x="16" y="{:.2}" text-anchor="middle" transform="rotate(-90 16 {:.2})">{}</text>"#,
            MARGIN_TOP + ph / 2.0,
            MARGIN_TOP + ph / 2.0,
            escape(&self.y_label)
        );

        let mut legend = Vec::new();
        for l in &self.layers {
            match l {
                Layer::Band { points, color, label } if !points.is_empty() => {
                    let mut d = String::new();
                    for (i, &(x, _, hi)) in points.iter().enumerate() {
                        let _ = write!(d, "{}{:.2},{:.2} ", if i == 0 { "M" } else { "L" }, sx(x), sy(hi));
                    }
                    for &(x, lo, _) in points.iter().rev() {
                        let _ = write!(d, "L{:.2},{:.2} ", sx(x), sy(lo));
                    }
                    let _ = writeln!(
                        s,
                        r#"<path d="{}Z" fill="{color}" fill-opacity="0.25" stroke="none"/>"#,
                        d
                    );
                    legend.push((*color, label.as_str()));
                }
                Layer::Line { points, color, label } if !points.is_empty() => {
                    let pts: Vec<String> = points
                        .iter()
                        .map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y)))
                        .collect();
                    let _ = writeln!(
                        s,
                        r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.8"/>"#,
                        pts.join(" ")
                    );
                    legend.push((*color, label.as_str()));
                }
                Layer::Markers { points, color, label } if !points.is_empty() => {
                    for &(x, y) in points {
                        let _ = writeln!(
                            s,
                            r#"<circle cx="{:.2}" cy="{:.2}" r="2.5" fill="{color}"/>"#,
                            sx(x),
                            sy(y)
                        );
                    }
                    legend.push((*color, label.as_str()));
                }
                Layer::Rule { x, label } => {
                    let px = sx(*x);
                    let _ = writeln!(
                        s,
                        r##"<line x1="{px:.2}" y1="{MARGIN_TOP}" x2="{px:.2}" y2="{by}" stroke="#888" stroke-dasharray="4 3"/><text x="{:.2}" y="{:.2}" fill="#555">{}</text>"##,
                        px + 4.0,
                        MARGIN_TOP + 12.0,
                        escape(label)
                    );
                }
                _ => {}
            }
        }
        for (i, (color, label)) in legend.iter().enumerate() {
            let y = MARGIN_TOP + 8.0 + 16.0 * i as f64;
            let x = MARGIN_LEFT + pw - 150.0;
            let _ = writeln!(
                s,
                r#"<rect x="{x}" y="{:.2}" width="12" height="8" fill="{color}"/><text x="{}" y="{:.2}">{}</text>"#,
                y - 7.0,
                x + 18.0,
                y + 1.0,
                escape(label)
            );
        }
        s.push_str("</svg>\n");
        s
    }
}

fn range(v: &[f64]) -> (f64, f64) {
    let finite = v.iter().copied().filter(|x| x.is_finite());
    let (lo, hi) = finite.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| (lo.min(x), hi.max(x)));
    if !lo.is_finite() {
        return (0.0, 1.0);
    }
    if hi - lo <= f64::EPSILON * lo.abs().max(1.0) {
        return (lo - 0.5, hi + 0.5);
    }
    let pad = 0.04 * (hi - lo);
    (lo - pad, hi + pad)
}

pub fn fmt_tick(v: f64) -> String {
    let a = v.abs();
    if a != 0.0 && !(1e-3..1e5).contains(&a) {
        format!("{v:.2e}")
    } else {
        let s = format!("{v:.3}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
        .replace('"', "&quot;")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_all_layers() {
        let mut c = Chart::new("a < b", "x", "y");
        c.layers.push(Layer::Band {
            points: vec![(0.0, -1.0, 1.0), (1.0, -0.5, 2.0)],
            color: "#9ecae1",
            label: "band".into(),
        });
        c.layers.push(Layer::Line {
            points: vec![(0.0, 0.0), (1.0, 1.0)],
            color: "#08519c",
            label: "mean".into(),
        });
        c.layers.push(Layer::Markers {
            points: vec![(0.5, 0.2)],
            color: "black",
            label: "actual".into(),
        });
        c.layers.push(Layer::Rule {
            x: 0.7,
            label: "test".into(),
        });
        let s = c.render();
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert!(s.contains("a &lt; b"));
        assert!(s.contains("<polyline") && s.contains("<circle") && s.contains("Z\""));
        assert!(!s.contains("NaN"));
    }

    #[test]
    fn degenerate_extent() {
        let mut c = Chart::new("flat", "x", "y");
        c.layers.push(Layer::Line {
            points: vec![(0.0, 3.0), (0.0, 3.0)],
            color: "red",
            label: "l".into(),
        });
        assert!(!c.render().contains("NaN"));
        assert_eq!(fmt_tick(0.25), "0.25");
        assert_eq!(fmt_tick(2.0), "2");
        assert_eq!(fmt_tick(1.5e-7), "1.50e-7");
    }
}
