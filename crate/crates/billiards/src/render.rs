//! Publication-style figures: 2-D trajectory/tiling drawings as SVG and 3-D
//! trajectory/polyhedron exports as Wavefront-OBJ-style ASCII.
//!
//! Everything here is a pure function of the scene and fully deterministic —
//! identical scenes produce byte-identical output, which is what the golden
//! tests pin down.  Scene builders reproduce the standard figure layouts:
//! a folded orbit next to its unfolded straight line through mirror copies,
//! overlays of several orbits, degenerate pairs side by side, and 3-D orbits
//! inside their polyhedra.

use serde::Serialize;

use crate::domains::{geometry, spec, DomainId, Geometry};
use crate::error::{Error, Result};
use crate::orbits::{amplitude_squared, default_start, fold_trajectory, orbit_vector};

// ---------------------------------------------------------------------------
// Scene model
// ---------------------------------------------------------------------------

/// A polyline with the orbit label that owns it (the label decides the
/// color, stably across runs).
#[derive(Debug, Clone, Serialize)]
pub struct ScenePath {
    pub label: Vec<i64>,
    pub points: Vec<Vec<f64>>,
    pub closed: bool,
}

/// A text annotation anchored at a world-coordinate position.
#[derive(Debug, Clone, Serialize)]
pub struct Annotation {
    pub position: Vec<f64>,
    pub text: String,
}

/// One drawing panel: the domain outline, optional unfolded mirror copies,
/// trajectories, and annotations.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Panel {
    pub title: String,
    /// Domain outline as a closed polygon (world coordinates).
    pub outline: Vec<Vec<f64>>,
    /// Mirror copies of the domain for the unfolded view.
    pub tiling: Vec<Vec<Vec<f64>>>,
    pub trajectories: Vec<ScenePath>,
    pub annotations: Vec<Annotation>,
}

/// A 2-D scene: one or more panels laid out left to right.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Scene2 {
    pub panels: Vec<Panel>,
}

/// A named triangle mesh inside a 3-D scene.
#[derive(Debug, Clone, Serialize)]
pub struct SceneMesh {
    pub name: String,
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

/// A 3-D scene: triangle meshes (domain boundary, reference solids) plus
/// orbit polylines.
#[derive(Debug, Clone, Serialize, Default)]
pub struct Scene3 {
    pub meshes: Vec<SceneMesh>,
    pub polylines: Vec<ScenePath>,
}

// ---------------------------------------------------------------------------
// Stable label colors
// ---------------------------------------------------------------------------

const PALETTE: [&str; 8] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2",
];

/// Stable color for an orbit label: FNV-1a over the label bytes into a small
/// palette, so regenerated figures stay comparable across runs and machines.
pub fn label_color(label: &[i64]) -> &'static str {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for v in label {
        for b in v.to_le_bytes() {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    PALETTE[(hash % PALETTE.len() as u64) as usize]
}

// ---------------------------------------------------------------------------
// Geometry helpers
// ---------------------------------------------------------------------------

/// True when `p` lies inside the polygon or within `tol` of its boundary.
pub fn polygon_contains(poly: &[Vec<f64>], p: &[f64], tol: f64) -> bool {
    let n = poly.len();
    // Near-boundary points count as inside (bounce points sit exactly on
    // edges).
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        let ex = b[0] - a[0];
        let ey = b[1] - a[1];
        let len2 = ex * ex + ey * ey;
        let t = if len2 > 0.0 { ((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / len2 } else { 0.0 };
        let t = t.clamp(0.0, 1.0);
        let dx = p[0] - (a[0] + t * ex);
        let dy = p[1] - (a[1] + t * ey);
        if (dx * dx + dy * dy).sqrt() <= tol {
            return true;
        }
    }
    // Ray cast in +x direction.
    let mut inside = false;
    for i in 0..n {
        let a = &poly[i];
        let b = &poly[(i + 1) % n];
        if (a[1] > p[1]) != (b[1] > p[1]) {
            let x = a[0] + (p[1] - a[1]) / (b[1] - a[1]) * (b[0] - a[0]);
            if x > p[0] {
                inside = !inside;
            }
        }
    }
    inside
}

/// 2-D affine map `x ↦ M x + t`.
#[derive(Clone, Copy)]
struct Affine2 {
    m: [[f64; 2]; 2],
    t: [f64; 2],
}

impl Affine2 {
    fn identity() -> Self {
        Affine2 { m: [[1.0, 0.0], [0.0, 1.0]], t: [0.0, 0.0] }
    }

    /// Reflection across the line through `q` with unit normal `n`.
    fn reflection(q: &[f64], n: &[f64]) -> Self {
        let qn = q[0] * n[0] + q[1] * n[1];
        Affine2 {
            m: [
                [1.0 - 2.0 * n[0] * n[0], -2.0 * n[0] * n[1]],
                [-2.0 * n[0] * n[1], 1.0 - 2.0 * n[1] * n[1]],
            ],
            t: [2.0 * qn * n[0], 2.0 * qn * n[1]],
        }
    }

    /// `self ∘ other` (apply `other` first).
    fn compose(&self, other: &Affine2) -> Affine2 {
        let mut m = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                m[i][j] = self.m[i][0] * other.m[0][j] + self.m[i][1] * other.m[1][j];
            }
        }
        let t = [
            self.m[0][0] * other.t[0] + self.m[0][1] * other.t[1] + self.t[0],
            self.m[1][0] * other.t[0] + self.m[1][1] * other.t[1] + self.t[1],
        ];
        Affine2 { m, t }
    }

    fn apply(&self, p: &[f64]) -> Vec<f64> {
        vec![
            self.m[0][0] * p[0] + self.m[0][1] * p[1] + self.t[0],
            self.m[1][0] * p[0] + self.m[1][1] * p[1] + self.t[1],
        ]
    }
}

/// Walks the folded orbit of `label` and accumulates the mirror copies of the
/// domain that the unfolded straight segment passes through: the parent copy
/// first, then one daughter per bounce.
fn unfolded_copies(id: DomainId, label: &[i64], start: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    let flat = spec(id).flat();
    let v = orbit_vector(id, label)?.to_f64();
    let total: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    let mut d = [v[0] / total, v[1] / total];
    let mut x = [start[0], start[1]];
    let outline: Vec<Vec<f64>> = flat.vertices.clone();
    let mut transform = Affine2::identity();
    let mut copies = vec![outline.clone()];
    let mut walked = 0.0;
    let budget = 4 * (label.iter().map(|&l| l.abs() as usize).sum::<usize>() * 16 + 64);
    for _ in 0..budget {
        let (t, face) = match flat.first_crossing(&x, &d, 1e-13) {
            Some(hit) => hit,
            None => break,
        };
        if walked + t >= total - 1e-9 {
            return Ok(copies);
        }
        walked += t;
        for k in 0..2 {
            x[k] += t * d[k];
        }
        flat.snap_to_face(face, &mut x);
        let f = &flat.faces[face];
        // The bounce plane in unfolded coordinates is the image of the
        // domain face under the current transform; composing on the right
        // with the domain-frame reflection yields the next copy.
        transform = transform.compose(&Affine2::reflection(&f.point, &f.normal));
        copies.push(outline.iter().map(|p| transform.apply(p)).collect());
        flat.reflect(face, &mut d);
    }
    Ok(copies)
}

// ---------------------------------------------------------------------------
// Scene builders
// ---------------------------------------------------------------------------

fn require_2d(id: DomainId, op: &'static str) -> Result<()> {
    if id.dimension() != 2 {
        return Err(Error::UnsupportedDimension {
            op,
            dimension: id.dimension(),
            reason: "2-D scene builders need a planar domain".into(),
        });
    }
    Ok(())
}

fn folded_panel(id: DomainId, label: &[i64], start: Option<&[f64]>) -> Result<Panel> {
    let traj = fold_trajectory(id, label, start)?;
    let outline = spec(id).flat().vertices;
    let amp2 = amplitude_squared(id, label)?;
    let text = format!(
        "{} {:?}  A\u{b2}={}  bounces={}",
        id.name(),
        label,
        amp2,
        traj.bounce_count()
    );
    let anchor = vec![outline.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min), {
        let ymax = outline.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        let ymin = outline.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        ymax + 0.06 * (ymax - ymin).max(1.0)
    }];
    Ok(Panel {
        title: "folded".into(),
        outline,
        tiling: Vec::new(),
        trajectories: vec![ScenePath {
            label: label.to_vec(),
            points: traj.points,
            closed: traj.closed,
        }],
        annotations: vec![Annotation { position: anchor, text }],
    })
}

/// Folded orbit next to its unfolding: the left panel shows the periodic
/// trajectory inside the domain, the right panel the straight segment from
/// the launch point to its lattice translate through the mirror copies.
pub fn folded_unfolded_scene(id: DomainId, label: &[i64], start: Option<&[f64]>) -> Result<Scene2> {
    require_2d(id, "folded_unfolded_scene")?;
    let start_owned: Vec<f64> = match start {
        Some(s) => s.to_vec(),
        None => default_start(id),
    };
    let folded = folded_panel(id, label, Some(&start_owned))?;
    let v = orbit_vector(id, label)?.to_f64();
    let end = vec![start_owned[0] + v[0], start_owned[1] + v[1]];
    let copies = unfolded_copies(id, label, &start_owned)?;
    let unfolded = Panel {
        title: "unfolded".into(),
        outline: spec(id).flat().vertices,
        tiling: copies,
        trajectories: vec![ScenePath {
            label: label.to_vec(),
            points: vec![start_owned.clone(), end.clone()],
            closed: false,
        }],
        annotations: vec![Annotation {
            position: vec![start_owned[0], start_owned[1]],
            text: format!(
                "({:.6},{:.6}) \u{2192} ({:.6},{:.6})",
                start_owned[0], start_owned[1], end[0], end[1]
            ),
        }],
    };
    Ok(Scene2 { panels: vec![folded, unfolded] })
}

/// Several orbits drawn in one folded panel; colors keep them apart.
pub fn overlay_scene(id: DomainId, labels: &[Vec<i64>]) -> Result<Scene2> {
    require_2d(id, "overlay_scene")?;
    if labels.is_empty() {
        return Err(Error::EmptyScene("overlay needs at least one orbit label"));
    }
    let mut panel = Panel {
        title: "overlay".into(),
        outline: spec(id).flat().vertices,
        ..Default::default()
    };
    let outline = panel.outline.clone();
    for (i, label) in labels.iter().enumerate() {
        let traj = fold_trajectory(id, label, None)?;
        let amp2 = amplitude_squared(id, label)?;
        let ymin = outline.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
        let ymax = outline.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
        let xmin = outline.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
        panel.annotations.push(Annotation {
            position: vec![xmin, ymax + (0.06 + 0.08 * i as f64) * (ymax - ymin).max(1.0)],
            text: format!("{:?}  A\u{b2}={}  bounces={}", label, amp2, traj.bounce_count()),
        });
        panel.trajectories.push(ScenePath {
            label: label.clone(),
            points: traj.points,
            closed: traj.closed,
        });
    }
    Ok(Scene2 { panels: vec![panel] })
}

/// Two orbits with the same amplitude, one panel each.
pub fn degenerate_pair_scene(id: DomainId, first: &[i64], second: &[i64]) -> Result<Scene2> {
    require_2d(id, "degenerate_pair_scene")?;
    let a2 = amplitude_squared(id, first)?;
    let b2 = amplitude_squared(id, second)?;
    if a2 != b2 {
        return Err(Error::InvalidInput(format!(
            "labels {first:?} and {second:?} are not degenerate: amplitude\u{b2} {a2} vs {b2}"
        )));
    }
    let mut left = folded_panel(id, first, None)?;
    let mut right = folded_panel(id, second, None)?;
    left.title = format!("A\u{b2}={a2}, first");
    right.title = format!("A\u{b2}={a2}, second");
    Ok(Scene2 { panels: vec![left, right] })
}

/// Triangulates the boundary of a 3-D catalog domain (fan per face).
fn boundary_mesh(id: DomainId) -> SceneMesh {
    let flat = spec(id).flat();
    let vertices: Vec<[f64; 3]> = flat
        .vertices
        .iter()
        .map(|v| [v[0], v[1], v[2]])
        .collect();
    let mut faces = Vec::new();
    if let Geometry::Solid { faces: f3, .. } = geometry(id) {
        for f in f3 {
            for i in 1..f.vertices.len() - 1 {
                faces.push([f.vertices[0], f.vertices[i], f.vertices[i + 1]]);
            }
        }
    }
    SceneMesh { name: id.name().to_string(), vertices, faces }
}

fn axis_aligned_box(lo: [f64; 3], hi: [f64; 3], name: &str) -> SceneMesh {
    let vertices = vec![
        [lo[0], lo[1], lo[2]],
        [hi[0], lo[1], lo[2]],
        [hi[0], hi[1], lo[2]],
        [lo[0], hi[1], lo[2]],
        [lo[0], lo[1], hi[2]],
        [hi[0], lo[1], hi[2]],
        [hi[0], hi[1], hi[2]],
        [lo[0], hi[1], hi[2]],
    ];
    let quads = [
        [0, 3, 2, 1],
        [4, 5, 6, 7],
        [0, 1, 5, 4],
        [2, 3, 7, 6],
        [1, 2, 6, 5],
        [0, 4, 7, 3],
    ];
    let mut faces = Vec::new();
    for q in quads {
        faces.push([q[0], q[1], q[2]]);
        faces.push([q[0], q[2], q[3]]);
    }
    SceneMesh { name: name.to_string(), vertices, faces }
}

fn require_3d(id: DomainId, op: &'static str) -> Result<()> {
    if id.dimension() != 3 {
        return Err(Error::UnsupportedDimension {
            op,
            dimension: id.dimension(),
            reason: "3-D scene builders need a solid domain".into(),
        });
    }
    Ok(())
}

/// Domain boundary mesh plus the folded orbit polyline of `label`.
pub fn orbit_scene_3d(id: DomainId, label: &[i64]) -> Result<Scene3> {
    require_3d(id, "orbit_scene_3d")?;
    let traj = fold_trajectory(id, label, None)?;
    Ok(Scene3 {
        meshes: vec![boundary_mesh(id)],
        polylines: vec![ScenePath {
            label: label.to_vec(),
            points: traj.points,
            closed: traj.closed,
        }],
    })
}

/// Mesh pair: the domain with its axis-aligned bounding box (for the
/// K-tetrahedron the box is the side-2 cube it bisects out of).
pub fn scene_with_bounding_box(id: DomainId) -> Result<Scene3> {
    require_3d(id, "scene_with_bounding_box")?;
    let mesh = boundary_mesh(id);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for v in &mesh.vertices {
        for k in 0..3 {
            lo[k] = lo[k].min(v[k]);
            hi[k] = hi[k].max(v[k]);
        }
    }
    // Grow to a cube around the same center.
    let side = (0..3).map(|k| hi[k] - lo[k]).fold(0.0f64, f64::max);
    for k in 0..3 {
        let c = (lo[k] + hi[k]) / 2.0;
        lo[k] = c - side / 2.0;
        hi[k] = c + side / 2.0;
    }
    let bbox = axis_aligned_box(lo, hi, &format!("{}-bounding-cube", mesh.name));
    Ok(Scene3 { meshes: vec![mesh, bbox], polylines: Vec::new() })
}

// ---------------------------------------------------------------------------
// SVG output
// ---------------------------------------------------------------------------

fn fmt(v: f64) -> String {
    let s = format!("{:.6}", v);
    if s == "-0.000000" {
        "0.000000".to_string()
    } else {
        s
    }
}

struct PanelFrame {
    scale: f64,
    offset_x: f64,
    offset_y: f64,
    ymax: f64,
}

impl PanelFrame {
    fn map(&self, p: &[f64]) -> (f64, f64) {
        (
            self.offset_x + p[0] * self.scale,
            // SVG y axis points down; flip about the panel's top.
            self.offset_y + (self.ymax - p[1]) * self.scale,
        )
    }
}

fn panel_bounds(panel: &Panel) -> ([f64; 2], [f64; 2]) {
    let mut lo = [f64::INFINITY; 2];
    let mut hi = [f64::NEG_INFINITY; 2];
    let mut feed = |p: &[f64]| {
        lo[0] = lo[0].min(p[0]);
        lo[1] = lo[1].min(p[1]);
        hi[0] = hi[0].max(p[0]);
        hi[1] = hi[1].max(p[1]);
    };
    for p in &panel.outline {
        feed(p);
    }
    for copy in &panel.tiling {
        for p in copy {
            feed(p);
        }
    }
    for t in &panel.trajectories {
        for p in &t.points {
            feed(p);
        }
    }
    for a in &panel.annotations {
        feed(&a.position);
    }
    (lo, hi)
}

fn polyline_attr(points: &[Vec<f64>], frame: &PanelFrame) -> String {
    points
        .iter()
        .map(|p| {
            let (x, y) = frame.map(p);
            format!("{},{}", fmt(x), fmt(y))
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Renders a 2-D scene as a standalone SVG document.  Pure function of the
/// scene: the same scene always yields byte-identical SVG.
pub fn render_2d(scene: &Scene2) -> Result<String> {
    if scene.panels.is_empty()
        || scene
            .panels
            .iter()
            .all(|p| p.outline.is_empty() && p.trajectories.is_empty() && p.tiling.is_empty())
    {
        return Err(Error::EmptyScene("2-D scene has no panels with content"));
    }
    const PANEL_H: f64 = 360.0;
    const MARGIN: f64 = 24.0;
    const GAP: f64 = 48.0;
    const TITLE_H: f64 = 20.0;

    let mut frames = Vec::new();
    let mut cursor_x = MARGIN;
    let mut total_h: f64 = 0.0;
    for panel in &scene.panels {
        let (lo, hi) = panel_bounds(panel);
        let extent_y = (hi[1] - lo[1]).max(1e-9);
        let extent_x = (hi[0] - lo[0]).max(1e-9);
        let scale = PANEL_H / extent_y;
        let frame = PanelFrame {
            scale,
            offset_x: cursor_x - lo[0] * scale,
            offset_y: MARGIN + TITLE_H,
            ymax: hi[1],
        };
        cursor_x += extent_x * scale + GAP;
        total_h = total_h.max(MARGIN + TITLE_H + extent_y * scale + MARGIN);
        frames.push(frame);
    }
    let total_w = cursor_x - GAP + MARGIN;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {} {}\" \
         font-family=\"monospace\" font-size=\"12\">\n",
        fmt(total_w),
        fmt(total_h)
    ));
    for (panel, frame) in scene.panels.iter().zip(&frames) {
        out.push_str("  <g>\n");
        if !panel.title.is_empty() {
            out.push_str(&format!(
                "    <text x=\"{}\" y=\"{}\" fill=\"#333333\">{}</text>\n",
                fmt(frame.offset_x + panel_bounds(panel).0[0] * frame.scale),
                fmt(MARGIN),
                escape_xml(&panel.title)
            ));
        }
        for copy in &panel.tiling {
            out.push_str(&format!(
                "    <polygon points=\"{}\" fill=\"none\" stroke=\"#bbbbbb\" \
                 stroke-width=\"0.8\" stroke-dasharray=\"4 3\"/>\n",
                polyline_attr(copy, frame)
            ));
        }
        if !panel.outline.is_empty() {
            out.push_str(&format!(
                "    <polygon points=\"{}\" fill=\"none\" stroke=\"#000000\" \
                 stroke-width=\"1.5\"/>\n",
                polyline_attr(&panel.outline, frame)
            ));
        }
        for path in &panel.trajectories {
            let color = label_color(&path.label);
            out.push_str(&format!(
                "    <polyline points=\"{}\" fill=\"none\" stroke=\"{}\" \
                 stroke-width=\"1.2\"/>\n",
                polyline_attr(&path.points, frame),
                color
            ));
            for p in &path.points {
                let (x, y) = frame.map(p);
                out.push_str(&format!(
                    "    <circle cx=\"{}\" cy=\"{}\" r=\"2\" fill=\"{}\"/>\n",
                    fmt(x),
                    fmt(y),
                    color
                ));
            }
        }
        for a in &panel.annotations {
            let (x, y) = frame.map(&a.position);
            out.push_str(&format!(
                "    <text x=\"{}\" y=\"{}\" fill=\"#333333\">{}</text>\n",
                fmt(x),
                fmt(y),
                escape_xml(&a.text)
            ));
        }
        out.push_str("  </g>\n");
    }
    out.push_str("</svg>\n");
    Ok(out)
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

// ---------------------------------------------------------------------------
// 3-D export
// ---------------------------------------------------------------------------

/// Exports a 3-D scene as Wavefront-OBJ-style ASCII: `o` object names, `v`
/// vertices, `f` triangles, `l` polylines (1-based global vertex indices).
/// Deterministic: the same scene always yields byte-identical output.
pub fn export_3d(scene: &Scene3) -> Result<String> {
    if scene.meshes.is_empty() && scene.polylines.is_empty() {
        return Err(Error::EmptyScene("3-D scene has neither meshes nor polylines"));
    }
    let mut out = String::new();
    let mut base = 0usize;
    for mesh in &scene.meshes {
        out.push_str(&format!("o {}\n", mesh.name));
        for v in &mesh.vertices {
            out.push_str(&format!("v {} {} {}\n", fmt(v[0]), fmt(v[1]), fmt(v[2])));
        }
        for f in &mesh.faces {
            out.push_str(&format!("f {} {} {}\n", base + f[0] + 1, base + f[1] + 1, base + f[2] + 1));
        }
        base += mesh.vertices.len();
    }
    for path in &scene.polylines {
        let label: Vec<String> = path.label.iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("o orbit-{}\n", label.join("-")));
        let length: f64 = path
            .points
            .windows(2)
            .map(|w| {
                (0..3.min(w[0].len()))
                    .map(|k| (w[1][k] - w[0][k]).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .sum();
        out.push_str(&format!(
            "# label ({}) closed {} length {}\n",
            label.join(","),
            path.closed,
            fmt(length)
        ));
        for p in &path.points {
            out.push_str(&format!("v {} {} {}\n", fmt(p[0]), fmt(p[1]), fmt(p[2])));
        }
        let idx: Vec<String> = (1..=path.points.len()).map(|i| (base + i).to_string()).collect();
        out.push_str(&format!("l {}\n", idx.join(" ")));
        base += path.points.len();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domains::DomainId::*;

    #[test]
    fn empty_scenes_are_rejected() {
        assert!(matches!(render_2d(&Scene2::default()), Err(Error::EmptyScene(_))));
        assert!(matches!(export_3d(&Scene3::default()), Err(Error::EmptyScene(_))));
    }

    #[test]
    fn rendering_is_deterministic() {
        let scene = folded_unfolded_scene(Square, &[3, 2], Some(&[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        let a = render_2d(&scene).unwrap();
        let b = render_2d(&scene).unwrap();
        assert_eq!(a, b);
        let scene3 = orbit_scene_3d(Cube, &[1, 1, 1]).unwrap();
        let a3 = export_3d(&scene3).unwrap();
        let b3 = export_3d(&scene3).unwrap();
        assert_eq!(a3, b3);
    }

    #[test]
    fn square_unfolding_is_the_known_straight_segment() {
        // Launching (3,2) from (2/3, 1/3) unfolds to the straight segment
        // from (2/3, 1/3) to (2/3 + 6, 1/3 + 4).
        let scene = folded_unfolded_scene(Square, &[3, 2], Some(&[2.0 / 3.0, 1.0 / 3.0])).unwrap();
        assert_eq!(scene.panels.len(), 2);
        let unfolded = &scene.panels[1];
        let seg = &unfolded.trajectories[0];
        assert_eq!(seg.points.len(), 2);
        assert!((seg.points[0][0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((seg.points[1][0] - (2.0 / 3.0 + 6.0)).abs() < 1e-12);
        assert!((seg.points[1][1] - (1.0 / 3.0 + 4.0)).abs() < 1e-12);
        // Parent copy plus one daughter per bounce.
        let folded = &scene.panels[0];
        let bounces = folded.trajectories[0].points.len() - 2;
        assert_eq!(unfolded.tiling.len(), bounces + 1);
        // The folded view stays inside the domain.
        for p in &folded.trajectories[0].points {
            assert!(polygon_contains(&folded.outline, p, 1e-9), "{p:?} escaped");
        }
    }

    #[test]
    fn equilateral_overlay_has_both_orbits() {
        let scene = overlay_scene(Equilateral, &[vec![1, 1], vec![1, 2]]).unwrap();
        let panel = &scene.panels[0];
        assert_eq!(panel.trajectories.len(), 2);
        assert_eq!(panel.trajectories[0].points.len() - 2, 6);
        assert_eq!(panel.trajectories[1].points.len() - 2, 10);
        for t in &panel.trajectories {
            assert!(t.closed);
            for p in &t.points {
                assert!(polygon_contains(&panel.outline, p, 1e-9));
            }
        }
        let svg = render_2d(&scene).unwrap();
        assert!(svg.contains("polyline"));
    }

    #[test]
    fn degenerate_pair_requires_equal_amplitude() {
        let scene = degenerate_pair_scene(Equilateral, &[1, 9], &[5, 6]).unwrap();
        assert_eq!(scene.panels.len(), 2);
        for panel in &scene.panels {
            assert!(panel.title.contains("A\u{b2}=91"));
        }
        assert!(degenerate_pair_scene(Equilateral, &[1, 1], &[1, 2]).is_err());
    }

    #[test]
    fn distinct_labels_get_stable_colors() {
        assert_eq!(label_color(&[1, 9]), label_color(&[1, 9]));
        // The two members of the sqrt(91) degenerate pair draw differently.
        assert_ne!(label_color(&[1, 9]), label_color(&[5, 6]));
    }

    #[test]
    fn cube_orbit_polyline_closes_with_known_length() {
        let scene = orbit_scene_3d(Cube, &[1, 1, 1]).unwrap();
        let path = &scene.polylines[0];
        assert!(path.closed);
        let length: f64 = path
            .points
            .windows(2)
            .map(|w| (0..3).map(|k| (w[1][k] - w[0][k]).powi(2)).sum::<f64>().sqrt())
            .sum();
        assert!((length - 2.0 * 3f64.sqrt()).abs() < 1e-9);
        let obj = export_3d(&scene).unwrap();
        assert!(obj.contains("o cube"));
        assert!(obj.contains("o orbit-1-1-1"));
        assert!(obj.contains("\nl "));
    }

    #[test]
    fn k4_orbit_polyline_length() {
        let scene = orbit_scene_3d(K4Tetra, &[1, 1, 1]).unwrap();
        let path = &scene.polylines[0];
        assert!(path.closed);
        let length: f64 = path
            .points
            .windows(2)
            .map(|w| (0..3).map(|k| (w[1][k] - w[0][k]).powi(2)).sum::<f64>().sqrt())
            .sum();
        assert!((length - 2.0 * 14f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn ktetra_bounding_cube_has_side_two() {
        let scene = scene_with_bounding_box(KTetra).unwrap();
        assert_eq!(scene.meshes.len(), 2);
        let bbox = &scene.meshes[1];
        let side = bbox.vertices.iter().map(|v| v[0]).fold(f64::NEG_INFINITY, f64::max)
            - bbox.vertices.iter().map(|v| v[0]).fold(f64::INFINITY, f64::min);
        assert!((side - 2.0).abs() < 1e-12);
        // Every tetrahedron vertex touches the cube surface.
        let tet = &scene.meshes[0];
        for v in &tet.vertices {
            let on_face = (0..3).any(|k| {
                let lo = bbox.vertices.iter().map(|b| b[k]).fold(f64::INFINITY, f64::min);
                let hi = bbox.vertices.iter().map(|b| b[k]).fold(f64::NEG_INFINITY, f64::max);
                (v[k] - lo).abs() < 1e-12 || (v[k] - hi).abs() < 1e-12
            });
            assert!(on_face, "{v:?} floats free of the bounding cube");
        }
    }

    #[test]
    fn svg_is_well_formed_enough() {
        let scene = overlay_scene(Equilateral, &[vec![1, 1]]).unwrap();
        let svg = render_2d(&scene).unwrap();
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<g>").count(), svg.matches("</g>").count());
        // No NaN or scientific notation sneaks into coordinates.
        assert!(!svg.contains("NaN") && !svg.contains('e') || svg.contains("text"));
    }
}
