//! Hand-written SVG for the 2-D plots.

use std::fmt::Write;

const PALETTE: [&str; 6] = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"];

pub fn group_color(i: usize) -> &'static str {
    PALETTE[i % PALETTE.len()]
}

/// Labels that name a color get that color; others fall back to the palette.
pub fn label_colors(names: &[String]) -> Vec<&'static str> {
    names
        .iter()
        .enumerate()
        .map(|(i, n)| match n.to_ascii_lowercase().as_str() {
            "red" => PALETTE[0],
            "blue" => PALETTE[1],
            "green" => PALETTE[2],
            "purple" => PALETTE[3],
            "orange" => PALETTE[4],
            "brown" => PALETTE[5],
            _ => group_color(i),
        })
        .collect()
}

/// Diverging blue–white–red for `t` in [-1, 1].
pub fn diverging(t: f64) -> String {
    let t = t.clamp(-1.0, 1.0);
    let (r, g, b) = if t < 0.0 {
        let s = -t;
        (255.0 * (1.0 - s) + 33.0 * s, 255.0 * (1.0 - s) + 102.0 * s, 255.0 * (1.0 - s) + 172.0 * s)
    } else {
        (255.0 * (1.0 - t) + 178.0 * t, 255.0 * (1.0 - t) + 24.0 * t, 255.0 * (1.0 - t) + 43.0 * t)
    };
    format!("#{:02x}{:02x}{:02x}", r.round() as u8, g.round() as u8, b.round() as u8)
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

pub struct Svg {
    width: f64,
    height: f64,
    body: String,
}

impl Svg {
    pub fn new(width: f64, height: f64) -> Self {
        Self {
            width,
            height,
            body: String::new(),
        }
    }

    pub fn rect(&mut self, x: f64, y: f64, w: f64, h: f64, fill: &str, stroke: Option<&str>) {
        let stroke = stroke.map_or(String::new(), |s| format!(r#" stroke="{s}""#));
        let _ = writeln!(
            self.body,
            r#"<rect x="{x:.2}" y="{y:.2}" width="{w:.2}" height="{h:.2}" fill="{fill}"{stroke}/>"#
        );
    }

    pub fn circle(&mut self, cx: f64, cy: f64, r: f64, fill: &str, stroke: &str, stroke_width: f64) {
        let _ = writeln!(
            self.body,
            r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{r:.2}" fill="{fill}" stroke="{stroke}" stroke-width="{stroke_width:.2}"/>"#
        );
    }

    pub fn line(&mut self, x1: f64, y1: f64, x2: f64, y2: f64, stroke: &str, width: f64, dash: bool) {
        let dash = if dash { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<line x1="{x1:.2}" y1="{y1:.2}" x2="{x2:.2}" y2="{y2:.2}" stroke="{stroke}" stroke-width="{width:.2}"{dash}/>"#
        );
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str, width: f64, dash: bool) {
        if pts.len() < 2 {
            return;
        }
        let coords: Vec<String> = pts.iter().map(|(x, y)| format!("{x:.2},{y:.2}")).collect();
        let dash = if dash { r#" stroke-dasharray="4 3""# } else { "" };
        let _ = writeln!(
            self.body,
            r#"<polyline points="{}" fill="none" stroke="{stroke}" stroke-width="{width:.2}"{dash}/>"#,
            coords.join(" ")
        );
    }

    pub fn cross(&mut self, cx: f64, cy: f64, size: f64, stroke: &str) {
        self.line(cx - size, cy - size, cx + size, cy + size, stroke, 2.5, false);
        self.line(cx - size, cy + size, cx + size, cy - size, stroke, 2.5, false);
    }

    pub fn text(&mut self, x: f64, y: f64, size: f64, anchor: &str, s: &str) {
        let _ = writeln!(
            self.body,
            r#"<text x="{x:.2}" y="{y:.2}" font-size="{size:.1}" font-family="sans-serif" text-anchor="{anchor}">{}</text>"#,
            escape(s)
        );
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n\
             <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{body}</svg>\n",
            w = self.width,
            h = self.height,
            body = self.body
        )
    }
}

/// Maps data coordinates into a square panel with the origin at bottom-left.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub left: f64,
    pub top: f64,
    pub size: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Frame {
    pub fn px(&self, x: f64, y: f64) -> (f64, f64) {
        (
            self.left + (x - self.x_min) / (self.x_max - self.x_min) * self.size,
            self.top + (self.y_max - y) / (self.y_max - self.y_min) * self.size,
        )
    }

    /// Square data window around `points` with a margin.
    pub fn fit(left: f64, top: f64, size: f64, points: &[[f64; 2]]) -> Self {
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for p in points {
            x0 = x0.min(p[0]);
            x1 = x1.max(p[0]);
            y0 = y0.min(p[1]);
            y1 = y1.max(p[1]);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9) * 1.15;
        let (cx, cy) = ((x0 + x1) / 2.0, (y0 + y1) / 2.0);
        Self {
            left,
            top,
            size,
            x_min: cx - span / 2.0,
            x_max: cx + span / 2.0,
            y_min: cy - span / 2.0,
            y_max: cy + span / 2.0,
        }
    }

    pub fn border(&self, svg: &mut Svg) {
        svg.rect(self.left, self.top, self.size, self.size, "none", Some("#444"));
    }
}

/// One point of a polar scatter panel.
pub struct PolarPoint {
    pub xy: [f64; 2],
    pub value: f64,
    pub group: usize,
}

/// Quarter-disc panel: radius is the vector norm, angle the polar angle.
/// Fill encodes `value` (scaled by `value_scale`), ring color the group.
pub struct PolarPanel<'a> {
    pub title: &'a str,
    pub points: &'a [PolarPoint],
    pub references: &'a [[f64; 2]],
    pub r_max: f64,
    pub value_scale: f64,
}

pub fn polar_panels(panels: &[PolarPanel<'_>]) -> String {
    let size = 360.0;
    let pad = 50.0;
    let mut svg = Svg::new(panels.len() as f64 * (size + pad) + pad, size + 2.0 * pad);
    for (k, p) in panels.iter().enumerate() {
        let frame = Frame {
            left: pad + k as f64 * (size + pad),
            top: pad,
            size,
            x_min: 0.0,
            x_max: p.r_max,
            y_min: 0.0,
            y_max: p.r_max,
        };
        svg.text(frame.left + size / 2.0, pad - 18.0, 14.0, "middle", p.title);

        for ring in 1..=4 {
            let r = p.r_max * ring as f64 / 4.0;
            let arc: Vec<(f64, f64)> = (0..=45)
                .map(|i| {
                    let t = std::f64::consts::FRAC_PI_2 * i as f64 / 45.0;
                    frame.px(r * t.cos(), r * t.sin())
                })
                .collect();
            svg.polyline(&arc, "#bbb", 0.8, false);
        }
        for deg in [0.0f64, 30.0, 60.0, 90.0] {
            let t = deg.to_radians();
            let (x0, y0) = frame.px(0.0, 0.0);
            let (x1, y1) = frame.px(p.r_max * t.cos(), p.r_max * t.sin());
            svg.line(x0, y0, x1, y1, "#bbb", 0.8, false);
        }

        if let [a, b] = p.references {
            let seg = bisector_in_disc(*a, *b, p.r_max);
            let pts: Vec<(f64, f64)> = seg.iter().map(|q| frame.px(q[0], q[1])).collect();
            svg.polyline(&pts, "#000", 1.5, true);
        }

        for pt in p.points {
            let (x, y) = frame.px(pt.xy[0], pt.xy[1]);
            let fill = diverging(pt.value / p.value_scale);
            svg.circle(x, y, 6.5, &fill, group_color(pt.group), 2.0);
        }
        for (i, r) in p.references.iter().enumerate() {
            let (x, y) = frame.px(r[0], r[1]);
            svg.cross(x, y, 7.0, group_color(i));
            svg.text(x + 10.0, y - 8.0, 13.0, "start", ["A", "B"].get(i).copied().unwrap_or("?"));
        }
    }
    svg.finish()
}

/// Points of the perpendicular bisector of `a`–`b` inside the quarter disc.
fn bisector_in_disc(a: [f64; 2], b: [f64; 2], r_max: f64) -> Vec<[f64; 2]> {
    let mid = [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
    let dir = [-(b[1] - a[1]), b[0] - a[0]];
    let len = dir[0].hypot(dir[1]);
    let dir = [dir[0] / len, dir[1] / len];
    let n = 400;
    (0..=n)
        .map(|i| {
            let s = -2.0 * r_max + 4.0 * r_max * i as f64 / n as f64;
            [mid[0] + s * dir[0], mid[1] + s * dir[1]]
        })
        .filter(|q| q[0] >= 0.0 && q[1] >= 0.0 && q[0].hypot(q[1]) <= r_max)
        .collect()
}

/// A labeled point in a Cartesian panel.
pub struct ScatterPoint<'a> {
    pub xy: [f64; 2],
    pub group: usize,
    pub name: &'a str,
}

/// Cartesian scatter, one color per group; used for clustering frames.
pub fn scatter(title: &str, frame_points: &[[f64; 2]], points: &[ScatterPoint<'_>], group_names: &[String]) -> String {
    let size = 400.0;
    let pad = 50.0;
    let mut svg = Svg::new(size + 2.0 * pad, size + 2.0 * pad + 20.0);
    let colors = label_colors(group_names);
    let frame = Frame::fit(pad, pad, size, frame_points);
    frame.border(&mut svg);
    svg.text(pad + size / 2.0, pad - 18.0, 14.0, "middle", title);
    for p in points {
        let (x, y) = frame.px(p.xy[0], p.xy[1]);
        svg.circle(x, y, 7.0, colors[p.group], "#222", 1.0);
        svg.text(x + 9.0, y - 9.0, 12.0, "start", p.name);
    }
    legend(&mut svg, pad, pad + size + 30.0, group_names, &colors);
    svg.finish()
}

fn legend(svg: &mut Svg, x: f64, y: f64, names: &[String], colors: &[&str]) {
    for (i, n) in names.iter().enumerate() {
        let lx = x + i as f64 * 110.0;
        svg.circle(lx, y - 4.0, 6.0, colors[i], "#222", 1.0);
        svg.text(lx + 10.0, y, 12.0, "start", n);
    }
}

/// One nearest-neighbor panel: the background grid is shaded by the label
/// of the nearest training vector, which draws the piecewise boundary.
pub struct NnPanel<'a> {
    pub title: &'a str,
    pub training: &'a [([f64; 2], usize, &'a str)],
    pub tests: &'a [ScatterPoint<'a>],
}

pub fn nn_panels(panels: &[NnPanel<'_>], group_names: &[String]) -> String {
    let size = 360.0;
    let pad = 50.0;
    let colors = label_colors(group_names);
    let mut svg = Svg::new(panels.len() as f64 * (size + pad) + pad, size + 2.0 * pad + 20.0);
    let all: Vec<[f64; 2]> = panels
        .iter()
        .flat_map(|p| p.training.iter().map(|t| t.0).chain(p.tests.iter().map(|t| t.xy)))
        .collect();
    for (k, p) in panels.iter().enumerate() {
        let frame = Frame::fit(pad + k as f64 * (size + pad), pad, size, &all);
        let cells = 60;
        let cell = size / cells as f64;
        for i in 0..cells {
            for j in 0..cells {
                let cx = frame.x_min + (i as f64 + 0.5) / cells as f64 * (frame.x_max - frame.x_min);
                let cy = frame.y_max - (j as f64 + 0.5) / cells as f64 * (frame.y_max - frame.y_min);
                let nearest = p
                    .training
                    .iter()
                    .min_by(|a, b| {
                        let da = (a.0[0] - cx).hypot(a.0[1] - cy);
                        let db = (b.0[0] - cx).hypot(b.0[1] - cy);
                        da.total_cmp(&db)
                    })
                    .map_or(0, |t| t.1);
                svg.rect(
                    frame.left + i as f64 * cell,
                    frame.top + j as f64 * cell,
                    cell + 0.3,
                    cell + 0.3,
                    tint(colors[nearest]),
                    None,
                );
            }
        }
        frame.border(&mut svg);
        svg.text(frame.left + size / 2.0, pad - 18.0, 14.0, "middle", p.title);
        for (xy, g, name) in p.training {
            let (x, y) = frame.px(xy[0], xy[1]);
            svg.rect(x - 7.0, y - 7.0, 14.0, 14.0, colors[*g], Some("#000"));
            svg.text(x + 10.0, y + 14.0, 12.0, "start", name);
        }
        for t in p.tests {
            let (x, y) = frame.px(t.xy[0], t.xy[1]);
            svg.circle(x, y, 6.0, colors[t.group], "#222", 1.0);
            svg.text(x + 8.0, y - 8.0, 12.0, "start", t.name);
        }
    }
    legend(&mut svg, pad, pad + size + 30.0, group_names, &colors);
    svg.finish()
}

fn tint(color: &str) -> &'static str {
    match color {
        "#d62728" => "#f7d4d4",
        "#1f77b4" => "#d2e4f2",
        "#2ca02c" => "#d5ecd5",
        "#9467bd" => "#e4dbee",
        "#ff7f0e" => "#ffe4cc",
        _ => "#e8dcd9",
    }
}
