//! Hand-rolled SVG: polylines, markers and contour lines in data coordinates.

use std::fmt::Write as _;

pub type Pt = [f64; 2];

pub struct Plot {
    lo: Pt,
    hi: Pt,
    width: f64,
    height: f64,
    body: String,
    legend: Vec<(String, String)>,
}

const MARGIN: f64 = 40.0;

impl Plot {
    pub fn new(lo: Pt, hi: Pt) -> Self {
        let span = [(hi[0] - lo[0]).max(1e-12), (hi[1] - lo[1]).max(1e-12)];
        let width = 640.0;
        let height = (width * span[1] / span[0]).clamp(240.0, 960.0);
        Self {
            lo,
            hi: [lo[0] + span[0], lo[1] + span[1]],
            width,
            height,
            body: String::new(),
            legend: Vec::new(),
        }
    }

    /// Bounds of `points` padded by 5% on each side.
    pub fn fitting<'a>(points: impl IntoIterator<Item = &'a Pt>) -> Self {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in points {
            for k in 0..2 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        if !lo[0].is_finite() {
            return Self::new([0.0, 0.0], [1.0, 1.0]);
        }
        let pad = [(hi[0] - lo[0]).max(1e-3) * 0.05, (hi[1] - lo[1]).max(1e-3) * 0.05];
        Self::new([lo[0] - pad[0], lo[1] - pad[1]], [hi[0] + pad[0], hi[1] + pad[1]])
    }

    pub fn bounds(&self) -> (Pt, Pt) {
        (self.lo, self.hi)
    }

    fn map(&self, p: Pt) -> Pt {
        let sx = (self.width - 2.0 * MARGIN) / (self.hi[0] - self.lo[0]);
        let sy = (self.height - 2.0 * MARGIN) / (self.hi[1] - self.lo[1]);
        [MARGIN + (p[0] - self.lo[0]) * sx, self.height - MARGIN - (p[1] - self.lo[1]) * sy]
    }

    pub fn polyline(&mut self, points: &[Pt], color: &str, stroke: f64, label: Option<&str>) {
        if points.is_empty() {
            return;
        }
        let mut d = String::new();
        for (i, p) in points.iter().enumerate() {
            let q = self.map(*p);
            let _ = write!(d, "{}{:.2},{:.2}", if i == 0 { "M" } else { " L" }, q[0], q[1]);
        }
        let _ = writeln!(
            self.body,
            r#"<path d="{d}" fill="none" stroke="{color}" stroke-width="{stroke}"/>"#
        );
        self.label(label, color);
    }

    pub fn segments(&mut self, segs: &[[Pt; 2]], color: &str, stroke: f64, label: Option<&str>) {
        if segs.is_empty() {
            return;
        }
        let mut d = String::new();
        for s in segs {
            let (a, b) = (self.map(s[0]), self.map(s[1]));
            let _ = write!(d, "M{:.2},{:.2} L{:.2},{:.2} ", a[0], a[1], b[0], b[1]);
        }
        let _ = writeln!(
            self.body,
            r#"<path d="{}" fill="none" stroke="{color}" stroke-width="{stroke}"/>"#,
            d.trim_end()
        );
        self.label(label, color);
    }

    pub fn circles(&mut self, points: &[Pt], radius: f64, color: &str, label: Option<&str>) {
        let _ = writeln!(self.body, r#"<g fill="{color}">"#);
        for p in points {
            let q = self.map(*p);
            let _ = writeln!(self.body, r#"<circle cx="{:.2}" cy="{:.2}" r="{radius}"/>"#, q[0], q[1]);
        }
        let _ = writeln!(self.body, "</g>");
        self.label(label, color);
    }

    pub fn squares(&mut self, points: &[Pt], side: f64, color: &str, label: Option<&str>) {
        let _ = writeln!(self.body, r#"<g fill="{color}">"#);
        for p in points {
            let q = self.map(*p);
            let _ = writeln!(
                self.body,
                r#"<rect x="{:.2}" y="{:.2}" width="{side}" height="{side}"/>"#,
                q[0] - side / 2.0,
                q[1] - side / 2.0
            );
        }
        let _ = writeln!(self.body, "</g>");
        self.label(label, color);
    }

    fn label(&mut self, label: Option<&str>, color: &str) {
        if let Some(l) = label {
            self.legend.push((l.to_string(), color.to_string()));
        }
    }

    /// The document; `timestamp` adds a generation-time comment.
    pub fn render(&self, title: &str, timestamp: Option<u64>) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" viewBox="0 0 {w} {h}">"#,
            w = self.width,
            h = self.height
        );
        if let Some(t) = timestamp {
            let _ = writeln!(s, "<!-- generated at unix time {t} -->");
        }
        let _ = writeln!(s, "<title>{}</title>", escape(title));
        let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            s,
            r#"<rect x="{MARGIN}" y="{MARGIN}" width="{:.2}" height="{:.2}" fill="none" stroke="black"/>"#,
            self.width - 2.0 * MARGIN,
            self.height - 2.0 * MARGIN
        );
        let font = r#"font-family="sans-serif" font-size="11""#;
        let _ = writeln!(
            s,
            r#"<text x="{MARGIN}" y="{:.2}" {font}>x1 [{:.4}, {:.4}]  x2 [{:.4}, {:.4}]</text>"#,
            self.height - 12.0,
            self.lo[0],
            self.hi[0],
            self.lo[1],
            self.hi[1]
        );
        let _ = writeln!(s, r#"<text x="{MARGIN}" y="24" {font}>{}</text>"#, escape(title));
        s.push_str(&self.body);
        for (i, (l, c)) in self.legend.iter().enumerate() {
            let y = MARGIN + 16.0 + 14.0 * i as f64;
            let x = self.width - MARGIN - 150.0;
            let _ = writeln!(s, r#"<rect x="{x}" y="{:.1}" width="10" height="10" fill="{c}"/>"#, y - 9.0);
            let _ = writeln!(s, r#"<text x="{}" y="{y:.1}" {font}>{}</text>"#, x + 14.0, escape(l));
        }
        s.push_str("</svg>\n");
        s
    }
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// Marching squares on an `n × n` grid: segments of `{f = level}`.
pub fn contour(f: &dyn Fn(Pt) -> f64, lo: Pt, hi: Pt, n: usize, level: f64) -> Vec<[Pt; 2]> {
    let h = [(hi[0] - lo[0]) / n as f64, (hi[1] - lo[1]) / n as f64];
    let at = |i: usize, j: usize| [lo[0] + i as f64 * h[0], lo[1] + j as f64 * h[1]];
    let vals: Vec<Vec<f64>> = (0..=n).map(|i| (0..=n).map(|j| f(at(i, j)) - level).collect()).collect();
    let mut segs = Vec::new();
    for i in 0..n {
        for j in 0..n {
            // corners counter-clockwise from the lower left
            let c = [(i, j), (i + 1, j), (i + 1, j + 1), (i, j + 1)];
            let v: Vec<f64> = c.iter().map(|&(a, b)| vals[a][b]).collect();
            let mut cross = Vec::with_capacity(4);
            for e in 0..4 {
                let (a, b) = (e, (e + 1) % 4);
                if (v[a] < 0.0) != (v[b] < 0.0) {
                    let t = v[a] / (v[a] - v[b]);
                    let (pa, pb) = (at(c[a].0, c[a].1), at(c[b].0, c[b].1));
                    cross.push([pa[0] + t * (pb[0] - pa[0]), pa[1] + t * (pb[1] - pa[1])]);
                }
            }
            // saddle cells pair the crossings in edge order
            for pair in cross.chunks_exact(2) {
                segs.push([pair[0], pair[1]]);
            }
        }
    }
    segs
}
