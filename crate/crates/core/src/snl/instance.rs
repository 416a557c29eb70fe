use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorEdge {
    pub i: usize,
    pub j: usize,
    pub d: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorEdge {
    /// Anchor index.
    pub k: usize,
    /// Sensor index.
    pub j: usize,
    pub d: f64,
}

/// Distance data for one localization problem. `sensors` holds the
/// generating positions when known; solvers never read it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnlInstance {
    pub n: usize,
    pub anchors: Vec<Point>,
    pub sensors: Option<Vec<Point>>,
    pub edges_ss: Vec<SensorEdge>,
    pub edges_sa: Vec<AnchorEdge>,
    pub radius: f64,
    pub seed: u64,
    /// Factor applied to every length by presolve; 1 in original units.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnchorLayout {
    /// `(±0.45, ±0.45)`, in the order `(-,-), (+,-), (+,+), (-,+)`; at most four.
    Corners,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerateOptions {
    pub n: usize,
    pub n_anchors: usize,
    pub radius: f64,
    pub seed: u64,
    pub layout: AnchorLayout,
    /// Multiplicative noise level on recorded distances, `d (1 + noise·N(0,1))`.
    pub noise: f64,
}

impl GenerateOptions {
    pub fn new(n: usize, radius: f64, seed: u64) -> Self {
        Self {
            n,
            n_anchors: 4,
            radius,
            seed,
            layout: AnchorLayout::Corners,
            noise: 0.0,
        }
    }
}

/// Sensors not connected to any anchor through the distance graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisconnectedWarning {
    pub unanchored: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: SnlInstance,
    pub warning: Option<DisconnectedWarning>,
}

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Sensors uniform on `[-0.5, 0.5]²`; every pair within `radius` recorded with
/// its exact distance.
pub fn generate_instance(opts: &GenerateOptions) -> Result<Generated> {
    if !(opts.radius >= 0.0) {
        return Err(Error::Domain(format!("radius = {} must be >= 0", opts.radius)));
    }
    if opts.layout == AnchorLayout::Corners && opts.n_anchors > 4 {
        return Err(Error::Domain("corner layout holds at most four anchors".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let sensors: Vec<Point> = (0..opts.n)
        .map(|_| [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)])
        .collect();
    let anchors: Vec<Point> = match opts.layout {
        AnchorLayout::Corners => [[-0.45, -0.45], [0.45, -0.45], [0.45, 0.45], [-0.45, 0.45]][..opts.n_anchors].to_vec(),
        AnchorLayout::Random => (0..opts.n_anchors)
            .map(|_| [rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5)])
            .collect(),
    };
    let noisy = |d: f64, rng: &mut ChaCha8Rng| {
        if opts.noise > 0.0 {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            d * (1.0 + opts.noise * z)
        } else {
            d
        }
    };
    let mut edges_ss = Vec::new();
    for i in 0..opts.n {
        for j in i + 1..opts.n {
            let d = dist(sensors[i], sensors[j]);
            if d <= opts.radius && d > 0.0 {
                edges_ss.push(SensorEdge { i, j, d: noisy(d, &mut rng) });
            }
        }
    }
    let mut edges_sa = Vec::new();
    for (k, &a) in anchors.iter().enumerate() {
        for (j, &s) in sensors.iter().enumerate() {
            let d = dist(a, s);
            if d <= opts.radius && d > 0.0 {
                edges_sa.push(AnchorEdge { k, j, d: noisy(d, &mut rng) });
            }
        }
    }
    let instance = SnlInstance {
        n: opts.n,
        anchors,
        sensors: Some(sensors),
        edges_ss,
        edges_sa,
        radius: opts.radius,
        seed: opts.seed,
        scale: 1.0,
    };
    let warning = instance.connectivity_warning();
    Ok(Generated { instance, warning })
}

impl SnlInstance {
    pub fn num_edges(&self) -> usize {
        self.edges_ss.len() + self.edges_sa.len()
    }

    /// Sensors with no path to an anchor.
    pub fn unanchored_sensors(&self) -> Vec<usize> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges_ss {
            adj[e.i].push(e.j);
            adj[e.j].push(e.i);
        }
        let mut reached = vec![false; self.n];
        let mut stack: Vec<usize> = self.edges_sa.iter().map(|e| e.j).collect();
        while let Some(v) = stack.pop() {
            if std::mem::replace(&mut reached[v], true) {
                continue;
            }
            stack.extend(adj[v].iter().copied().filter(|&w| !reached[w]));
        }
        (0..self.n).filter(|&v| !reached[v]).collect()
    }

    pub fn connectivity_warning(&self) -> Option<DisconnectedWarning> {
        let unanchored = self.unanchored_sensors();
        (!unanchored.is_empty() || self.num_edges() == 0).then_some(DisconnectedWarning { unanchored })
    }

    /// Checks index ranges, positive distances and duplicate-free edge lists.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges_ss {
            if e.i >= self.n || e.j >= self.n || e.i == e.j {
                return Err(Error::IndexMismatch(format!("sensor edge ({}, {})", e.i, e.j)));
            }
            if !seen.insert((0, e.i.min(e.j), e.i.max(e.j))) {
                return Err(Error::IndexMismatch(format!("duplicate sensor edge ({}, {})", e.i, e.j)));
            }
            if !(e.d > 0.0) {
                return Err(Error::Domain(format!("edge ({}, {}) has d = {}", e.i, e.j, e.d)));
            }
        }
        for e in &self.edges_sa {
            if e.k >= self.anchors.len() || e.j >= self.n {
                return Err(Error::IndexMismatch(format!("anchor edge ({}, {})", e.k, e.j)));
            }
            if !seen.insert((1, e.k, e.j)) {
                return Err(Error::IndexMismatch(format!("duplicate anchor edge ({}, {})", e.k, e.j)));
            }
            if !(e.d > 0.0) {
                return Err(Error::Domain(format!("anchor edge ({}, {}) has d = {}", e.k, e.j, e.d)));
            }
        }
        if let Some(s) = &self.sensors {
            if s.len() != self.n {
                return Err(Error::DimensionMismatch {
                    expected: self.n,
                    found: s.len(),
                });
            }
        }
        Ok(())
    }
}

/// Multiplies every length by `scale`; the cumulative factor is kept in
/// [`SnlInstance::scale`] so results can be reported in original units.
pub fn presolve_scale(instance: &SnlInstance, scale: f64) -> Result<SnlInstance> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::Domain(format!("scale = {scale} must be positive")));
    }
    let sp = |p: &Point| [p[0] * scale, p[1] * scale];
    Ok(SnlInstance {
        n: instance.n,
        anchors: instance.anchors.iter().map(sp).collect(),
        sensors: instance.sensors.as_ref().map(|s| s.iter().map(sp).collect()),
        edges_ss: instance
            .edges_ss
            .iter()
            .map(|e| SensorEdge { d: e.d * scale, ..*e })
            .collect(),
        edges_sa: instance
            .edges_sa
            .iter()
            .map(|e| AnchorEdge { d: e.d * scale, ..*e })
            .collect(),
        radius: instance.radius * scale,
        seed: instance.seed,
        scale: instance.scale * scale,
    })
}

/// `(1/n Σ |x_i - x_i_true|²)^(1/2)`
pub fn rmsd(x: &[Point], x_true: &[Point]) -> Result<f64> {
    if x.len() != x_true.len() {
        return Err(Error::DimensionMismatch {
            expected: x_true.len(),
            found: x.len(),
        });
    }
    if x.is_empty() {
        return Ok(0.0);
    }
    let sum: f64 = x
        .iter()
        .zip(x_true)
        .map(|(a, b)| (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2))
        .sum();
    Ok((sum / x.len() as f64).sqrt())
}

fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// Text form: header lines `n`, `radius`, `seed`, `scale`, then sections
/// `[anchors]` and `[sensors]` (`x y` per line), `[edges-ss]` (`i j d`) and
/// `[edges-sa]` (`k j d`).
pub fn write_instance(inst: &SnlInstance) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "n {}", inst.n);
    let _ = writeln!(s, "radius {}", fmt_f64(inst.radius));
    let _ = writeln!(s, "seed {}", inst.seed);
    let _ = writeln!(s, "scale {}", fmt_f64(inst.scale));
    let _ = writeln!(s, "[anchors]");
    for a in &inst.anchors {
        let _ = writeln!(s, "{} {}", fmt_f64(a[0]), fmt_f64(a[1]));
    }
    if let Some(sensors) = &inst.sensors {
        let _ = writeln!(s, "[sensors]");
        for p in sensors {
            let _ = writeln!(s, "{} {}", fmt_f64(p[0]), fmt_f64(p[1]));
        }
    }
    let _ = writeln!(s, "[edges-ss]");
    for e in &inst.edges_ss {
        let _ = writeln!(s, "{} {} {}", e.i, e.j, fmt_f64(e.d));
    }
    let _ = writeln!(s, "[edges-sa]");
    for e in &inst.edges_sa {
        let _ = writeln!(s, "{} {} {}", e.k, e.j, fmt_f64(e.d));
    }
    s
}

pub fn load_instance(source: &str) -> Result<SnlInstance> {
    let perr = |line: usize, message: String| Error::Parse { line, message };
    let num = |tok: &str, line: usize| -> Result<f64> {
        tok.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| perr(line, format!("`{tok}` is not a finite number")))
    };
    let idx = |tok: &str, line: usize| -> Result<usize> {
        tok.parse::<usize>()
            .map_err(|_| perr(line, format!("`{tok}` is not an index")))
    };
    let mut n = None;
    let mut radius = f64::NAN;
    let mut seed = 0;
    let mut scale = 1.0;
    let mut anchors = Vec::new();
    let mut sensors: Option<Vec<Point>> = None;
    let mut edges_ss = Vec::new();
    let mut edges_sa = Vec::new();
    let mut section = "";
    for (i, raw) in source.lines().enumerate() {
        let ln = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|s| s.strip_suffix(']')) {
            section = match name {
                "anchors" => "anchors",
                "sensors" => {
                    sensors = Some(Vec::new());
                    "sensors"
                }
                "edges-ss" => "edges-ss",
                "edges-sa" => "edges-sa",
                other => return Err(perr(ln, format!("unknown section [{other}]"))),
            };
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        match (section, &t[..]) {
            ("", [key, value]) => match *key {
                "n" => n = Some(idx(value, ln)?),
                "radius" => radius = num(value, ln)?,
                "seed" => seed = value.parse().map_err(|_| perr(ln, format!("bad seed `{value}`")))?,
                "scale" => scale = num(value, ln)?,
                other => return Err(perr(ln, format!("unknown header key `{other}`"))),
            },
            ("anchors", [x, y]) => anchors.push([num(x, ln)?, num(y, ln)?]),
            ("sensors", [x, y]) => sensors.as_mut().expect("opened").push([num(x, ln)?, num(y, ln)?]),
            ("edges-ss", [a, b, d]) => edges_ss.push(SensorEdge {
                i: idx(a, ln)?,
                j: idx(b, ln)?,
                d: num(d, ln)?,
            }),
            ("edges-sa", [a, b, d]) => edges_sa.push(AnchorEdge {
                k: idx(a, ln)?,
                j: idx(b, ln)?,
                d: num(d, ln)?,
            }),
            _ => return Err(perr(ln, format!("unexpected line `{line}`"))),
        }
    }
    let inst = SnlInstance {
        n: n.ok_or_else(|| perr(0, "missing `n`".into()))?,
        anchors,
        sensors,
        edges_ss,
        edges_sa,
        radius,
        seed,
        scale,
    };
    inst.validate()?;
    Ok(inst)
}

pub fn load_instance_file(path: impl AsRef<Path>) -> Result<SnlInstance> {
    load_instance(&std::fs::read_to_string(path)?)
}
