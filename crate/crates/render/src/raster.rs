//! Triangle rasterization shared by the camera
//! and shadow passes.

use stepsim_core::scene::ObjectData;
use stepsim_core::{Pose, Scene, Vec3};

use crate::RenderError;

/// A shape triangle in world coordinates.
#[derive(Debug, Clone, Copy)]
pub(crate) struct WorldTriangle {
    pub p: [Vec3; 3],
    pub n: [Vec3; 3],
    pub color: [f64; 3],
}

pub(crate) fn world_triangles(scene: &Scene) -> Result<Vec<WorldTriangle>, RenderError> {
    let mut out = Vec::new();
    for obj in scene.objects() {
        let ObjectData::Shape(shape) = &obj.data else {
            continue;
        };
        let pose = scene.world_pose(obj.handle)?;
        let mesh = &shape.mesh;
        let p: Vec<Vec3> = mesh.positions.iter().map(|v| pose.transform_point(v)).collect();
        let n: Vec<Vec3> = mesh.normals.iter().map(|v| pose.transform_vector(v)).collect();
        for t in &mesh.triangles {
            let [a, b, c] = t.map(|i| i as usize);
            out.push(WorldTriangle {
                p: [p[a], p[b], p[c]],
                n: [n[a], n[b], n[c]],
                color: shape.color,
            });
        }
    }
    Ok(out)
}

/// Axis-aligned bounds of all triangle vertices, or `None` for an empty list.
pub(crate) fn bounds(tris: &[WorldTriangle]) -> Option<(Vec3, Vec3)> {
    let mut it = tris.iter().flat_map(|t| t.p.iter());
    let first = *it.next()?;
    Some(it.fold((first, first), |(lo, hi), p| (lo.inf(p), hi.sup(p))))
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ViewVertex {
    pub p: Vec3,
    pub n: Vec3,
}

impl ViewVertex {
    fn lerp(&self, other: &ViewVertex, t: f64) -> ViewVertex {
        ViewVertex {
            p: self.p + (other.p - self.p) * t,
            n: self.n + (other.n - self.n) * t,
        }
    }
}

/// Transforms a world triangle into the frame `view` (world pose of the eye).
pub(crate) fn to_view(tri: &WorldTriangle, world_to_view: &Pose) -> [ViewVertex; 3] {
    [0, 1, 2].map(|i| ViewVertex {
        p: world_to_view.transform_point(&tri.p[i]),
        n: tri.n[i],
    })
}

/// Clips a triangle to the half-space z ≥ near. Returns 0, 1 or 2 triangles.
pub(crate) fn clip_near(tri: [ViewVertex; 3], near: f64) -> Vec<[ViewVertex; 3]> {
    let inside = tri.map(|v| v.p.z >= near);
    if inside.iter().all(|&b| b) {
        return vec![tri];
    }
    if !inside.iter().any(|&b| b) {
        return Vec::new();
    }
    let mut poly = Vec::with_capacity(4);
    for i in 0..3 {
        let (a, b) = (tri[i], tri[(i + 1) % 3]);
        let (ia, ib) = (inside[i], inside[(i + 1) % 3]);
        if ia {
            poly.push(a);
        }
        if ia != ib {
            let t = (near - a.p.z) / (b.p.z - a.p.z);
            let mut v = a.lerp(&b, t);
            v.p.z = near;
            poly.push(v);
        }
    }
    (1..poly.len() - 1)
        .map(|i| [poly[0], poly[i], poly[i + 1]])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum Projection {
    Perspective { focal: f64, cx: f64, cy: f64 },
    /// Maps view x in [x0, x0 + width/sx) to [0, width) and likewise for y.
    Orthographic { x0: f64, y0: f64, sx: f64, sy: f64 },
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct ScreenVertex {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub inv_w: f64,
}

impl Projection {
    pub fn project(&self, p: &Vec3) -> ScreenVertex {
        match *self {
            Projection::Perspective { focal, cx, cy } => ScreenVertex {
                x: cx + focal * p.x / p.z,
                y: cy + focal * p.y / p.z,
                z: p.z,
                inv_w: 1.0 / p.z,
            },
            Projection::Orthographic { x0, y0, sx, sy } => ScreenVertex {
                x: (p.x - x0) * sx,
                y: (p.y - y0) * sy,
                z: p.z,
                inv_w: 1.0,
            },
        }
    }
}

fn edge(a: &ScreenVertex, b: &ScreenVertex, px: f64, py: f64) -> f64 {
    (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x)
}

/// Scan-converts a screen-space triangle, sampling at pixel centres. For
/// every covered pixel calls `frag(index, weights)` where `weights` are the
/// perspective-correct barycentric weights of the three vertices.
pub(crate) fn rasterize(
    v: &[ScreenVertex; 3],
    width: usize,
    height: usize,
    mut frag: impl FnMut(usize, [f64; 3]),
) {
    let area = edge(&v[0], &v[1], v[2].x, v[2].y);
    if area == 0.0 || !area.is_finite() {
        return;
    }
    let min_x = v[0].x.min(v[1].x).min(v[2].x);
    let max_x = v[0].x.max(v[1].x).max(v[2].x);
    let min_y = v[0].y.min(v[1].y).min(v[2].y);
    let max_y = v[0].y.max(v[1].y).max(v[2].y);
    let lo_x = (min_x - 0.5).ceil().max(0.0);
    let hi_x = (max_x - 0.5).floor().min(width as f64 - 1.0);
    let lo_y = (min_y - 0.5).ceil().max(0.0);
    let hi_y = (max_y - 0.5).floor().min(height as f64 - 1.0);
    if lo_x > hi_x || lo_y > hi_y {
        return;
    }
    let inv_area = 1.0 / area;
    for y in lo_y as usize..=hi_y as usize {
        let py = y as f64 + 0.5;
        for x in lo_x as usize..=hi_x as usize {
            let px = x as f64 + 0.5;
            let b0 = edge(&v[1], &v[2], px, py) * inv_area;
            let b1 = edge(&v[2], &v[0], px, py) * inv_area;
            let b2 = edge(&v[0], &v[1], px, py) * inv_area;
            if b0 < 0.0 || b1 < 0.0 || b2 < 0.0 {
                continue;
            }
            let w = [b0 * v[0].inv_w, b1 * v[1].inv_w, b2 * v[2].inv_w];
            let sum = w[0] + w[1] + w[2];
            frag(y * width + x, [w[0] / sum, w[1] / sum, w[2] / sum]);
        }
    }
}

/// Depth-only pass: keeps the smallest `map(z)` per pixel.
pub(crate) fn depth_pass(
    tris: &[WorldTriangle],
    world_to_view: &Pose,
    projection: &Projection,
    clip: Option<f64>,
    width: usize,
    height: usize,
    depth: &mut [f64],
    map: impl Fn(f64) -> f64,
) {
    for tri in tris {
        let view = to_view(tri, world_to_view);
        let pieces = match clip {
            Some(near) => clip_near(view, near),
            None => vec![view],
        };
        for piece in pieces {
            let s = piece.map(|v| projection.project(&v.p));
            rasterize(&s, width, height, |i, w| {
                let d = map(w[0] * s[0].z + w[1] * s[1].z + w[2] * s[2].z);
                if d < depth[i] {
                    depth[i] = d;
                }
            });
        }
    }
}
