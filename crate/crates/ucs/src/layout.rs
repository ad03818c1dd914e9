//! Force-directed layout (Fruchterman–Reingold) and SVG rendering.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Distance floor that keeps coincident vertices from producing infinite
/// forces.
const DIST_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LayoutConfig {
    pub iterations: usize,
    /// Area of the square frame the layout lives in.
    pub area: f64,
    pub initial_temperature: f64,
    /// Per-sweep multiplicative temperature decay.
    pub cooling: f64,
    pub seed: u64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            iterations: 500,
            area: 1.0,
            initial_temperature: 0.1,
            cooling: 0.99,
            seed: 0,
        }
    }
}

impl LayoutConfig {
    /// Default config for a different frame area; the starting temperature
    /// scales with the frame side.
    pub fn with_area(area: f64) -> Result<Self> {
        if !(area > 0.0) || !area.is_finite() {
            return Err(Error::ParamDomain(format!("area must be positive, got {area}")));
        }
        Ok(LayoutConfig {
            area,
            initial_temperature: 0.1 * area.sqrt(),
            ..LayoutConfig::default()
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.area > 0.0) || !self.area.is_finite() {
            return Err(Error::ParamDomain(format!("area must be positive, got {}", self.area)));
        }
        if !(self.initial_temperature >= 0.0) || !self.initial_temperature.is_finite() {
            return Err(Error::ParamDomain(format!(
                "initial_temperature must be non-negative, got {}",
                self.initial_temperature
            )));
        }
        if !(self.cooling > 0.0 && self.cooling <= 1.0) {
            return Err(Error::ParamDomain(format!(
                "cooling must lie in (0, 1], got {}",
                self.cooling
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeCoordinates {
    /// One `(x, y)` per vertex, inside the square frame centred on the
    /// origin.
    pub positions: Vec<(f64, f64)>,
    /// Total vertex displacement in each sweep; a convergence diagnostic.
    pub displacement_per_sweep: Vec<f64>,
}

/// Spring-embedder layout: all vertex pairs repel with `k²/d`, each edge
/// attracts with `d²/k` (edge weights are ignored), moves are capped by a
/// cooling temperature, and positions are clamped to the frame. The RNG is
/// seeded from `config.seed`, so layouts are reproducible.
pub fn fruchterman_reingold(g: &Graph, config: &LayoutConfig) -> Result<NodeCoordinates> {
    config.validate()?;
    let nv = g.vertex_count;
    if nv == 0 {
        return Err(Error::ParamDomain("layout requires at least one vertex".into()));
    }
    g.validate()?;
    let side = config.area.sqrt();
    let half = side / 2.0;
    let k = (config.area / nv as f64).sqrt();

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut pos: Vec<(f64, f64)> = (0..nv)
        .map(|_| (rng.gen_range(-half..half), rng.gen_range(-half..half)))
        .collect();

    let mut temp = config.initial_temperature;
    let mut sweep_log = Vec::with_capacity(config.iterations);
    let mut disp = vec![(0.0f64, 0.0f64); nv];
    for _ in 0..config.iterations {
        disp.iter_mut().for_each(|d| *d = (0.0, 0.0));
        for i in 0..nv {
            for j in (i + 1)..nv {
                let dx = pos[i].0 - pos[j].0;
                let dy = pos[i].1 - pos[j].1;
                let dist = (dx * dx + dy * dy).sqrt().max(DIST_EPS);
                let f = k * k / (dist * dist);
                disp[i].0 += dx * f;
                disp[i].1 += dy * f;
                disp[j].0 -= dx * f;
                disp[j].1 -= dy * f;
            }
        }
        for e in &g.edges {
            let dx = pos[e.u].0 - pos[e.v].0;
            let dy = pos[e.u].1 - pos[e.v].1;
            let dist = (dx * dx + dy * dy).sqrt().max(DIST_EPS);
            let f = dist / k;
            disp[e.u].0 -= dx * f;
            disp[e.u].1 -= dy * f;
            disp[e.v].0 += dx * f;
            disp[e.v].1 += dy * f;
        }
        let mut total = 0.0;
        for i in 0..nv {
            let (dx, dy) = disp[i];
            let len = (dx * dx + dy * dy).sqrt();
            if len > 0.0 {
                let step = len.min(temp);
                let nx = (pos[i].0 + dx / len * step).clamp(-half, half);
                let ny = (pos[i].1 + dy / len * step).clamp(-half, half);
                let mx = nx - pos[i].0;
                let my = ny - pos[i].1;
                total += (mx * mx + my * my).sqrt();
                pos[i] = (nx, ny);
            }
        }
        sweep_log.push(total);
        temp *= config.cooling;
    }
    Ok(NodeCoordinates { positions: pos, displacement_per_sweep: sweep_log })
}

const SVG_SIZE: f64 = 880.0;
const SVG_MARGIN: f64 = 40.0;

/// Renders the graph as a standalone SVG document. Highlighted edges (by
/// index) are drawn last, in a distinct stroke, over the plain edges.
pub fn render_svg(g: &Graph, coords: &NodeCoordinates, highlight: &[usize]) -> Result<String> {
    if coords.positions.len() != g.vertex_count {
        return Err(Error::DimensionMismatch(format!(
            "{} coordinates for {} vertices",
            coords.positions.len(),
            g.vertex_count
        )));
    }
    let m = g.edge_count();
    let mut highlighted = vec![false; m];
    for &e in highlight {
        if e >= m {
            return Err(Error::ParamDomain(format!("highlight index {e} out of range 0..{m}")));
        }
        highlighted[e] = true;
    }

    // Fit the coordinate bounding box into the drawing area with uniform
    // scale; a degenerate box (single point) lands centred.
    let xs = coords.positions.iter().map(|p| p.0);
    let ys = coords.positions.iter().map(|p| p.1);
    let (min_x, max_x) = (xs.clone().fold(f64::INFINITY, f64::min), xs.fold(f64::NEG_INFINITY, f64::max));
    let (min_y, max_y) = (ys.clone().fold(f64::INFINITY, f64::min), ys.fold(f64::NEG_INFINITY, f64::max));
    let span = (max_x - min_x).max(max_y - min_y).max(DIST_EPS);
    let scale = (SVG_SIZE - 2.0 * SVG_MARGIN) / span;
    let cx = (min_x + max_x) / 2.0;
    let cy = (min_y + max_y) / 2.0;
    let px = |x: f64| SVG_SIZE / 2.0 + (x - cx) * scale;
    let py = |y: f64| SVG_SIZE / 2.0 - (y - cy) * scale;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{s}\" height=\"{s}\" viewBox=\"0 0 {s} {s}\">\n",
        s = SVG_SIZE
    ));
    out.push_str("<style>\n");
    out.push_str(".edge { stroke: #999999; stroke-width: 1.5; }\n");
    out.push_str(".edge.highlight { stroke: #d6453d; stroke-width: 2.5; }\n");
    out.push_str(".node { fill: #333333; }\n");
    out.push_str("</style>\n");
    let draw = |out: &mut String, e: usize, class: &str| {
        let (a, b) = (g.edges[e].u, g.edges[e].v);
        out.push_str(&format!(
            "<line class=\"{class}\" x1=\"{:.2}\" y1=\"{:.2}\" x2=\"{:.2}\" y2=\"{:.2}\"/>\n",
            px(coords.positions[a].0),
            py(coords.positions[a].1),
            px(coords.positions[b].0),
            py(coords.positions[b].1),
        ));
    };
    for e in 0..m {
        if !highlighted[e] {
            draw(&mut out, e, "edge");
        }
    }
    for e in 0..m {
        if highlighted[e] {
            draw(&mut out, e, "edge highlight");
        }
    }
    for &(x, y) in &coords.positions {
        out.push_str(&format!(
            "<circle class=\"node\" cx=\"{:.2}\" cy=\"{:.2}\" r=\"4\"/>\n",
            px(x),
            py(y)
        ));
    }
    out.push_str("</svg>\n");
    Ok(out)
}
