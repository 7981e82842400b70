//! Scene builders and analytic ray-cast oracles for renderer tests.
#![allow(dead_code)]

pub mod criteria;

use std::f64::consts::PI;

use nalgebra::Matrix3;
use rand::Rng;
use serde_json::{json, Value};
use stepsim_core::{Handle, Pose, Quaternion, Scene, Vec3};

/// Rotation whose local +z axis maps to `dir`.
pub fn look_along(dir: Vec3) -> Quaternion {
    let z = dir.normalize();
    let helper = if z.x.abs() < 0.9 { Vec3::x() } else { Vec3::y() };
    let x = helper.cross(&z).normalize();
    let y = z.cross(&x);
    Quaternion::from_rotation_matrix(&Matrix3::from_columns(&[x, y, z]))
}

pub fn quat_json(q: &Quaternion) -> Value {
    json!([q.w, q.x, q.y, q.z])
}

#[derive(Debug, Clone, Copy)]
pub enum Prim {
    Sphere { center: Vec3, radius: f64 },
    /// Full extents along the box's local axes.
    Box { pose: Pose, size: Vec3 },
    /// Rectangle in the local xy plane.
    Plane { pose: Pose, size: [f64; 2] },
}

impl Prim {
    pub fn to_json(&self, name: &str, color: [f64; 3]) -> Value {
        match self {
            Prim::Sphere { center, radius } => json!({
                "name": name, "type": "shape", "parent": null,
                "position": [center.x, center.y, center.z],
                "primitive": "sphere", "size": radius, "color": color,
            }),
            Prim::Box { pose, size } => json!({
                "name": name, "type": "shape", "parent": null,
                "position": [pose.position.x, pose.position.y, pose.position.z],
                "quaternion": quat_json(&pose.orientation),
                "primitive": "box", "size": [size.x, size.y, size.z], "color": color,
            }),
            Prim::Plane { pose, size } => json!({
                "name": name, "type": "shape", "parent": null,
                "position": [pose.position.x, pose.position.y, pose.position.z],
                "quaternion": quat_json(&pose.orientation),
                "primitive": "plane", "size": [size[0], size[1], 0.0], "color": color,
            }),
        }
    }

    /// Ray parameters of every surface crossing of `o + t·d`, ascending.
    pub fn hits(&self, o: &Vec3, d: &Vec3) -> Vec<f64> {
        match *self {
            Prim::Sphere { center, radius } => {
                let oc = o - center;
                let a = d.dot(d);
                let b = 2.0 * oc.dot(d);
                let c = oc.dot(&oc) - radius * radius;
                let disc = b * b - 4.0 * a * c;
                if disc < 0.0 {
                    return Vec::new();
                }
                let s = disc.sqrt();
                vec![(-b - s) / (2.0 * a), (-b + s) / (2.0 * a)]
            }
            Prim::Box { pose, size } => {
                let inv = pose.inverse();
                let (lo, ld) = (inv.transform_point(o), inv.transform_vector(d));
                let half = size / 2.0;
                let (mut t0, mut t1) = (f64::NEG_INFINITY, f64::INFINITY);
                for k in 0..3 {
                    if ld[k] == 0.0 {
                        if lo[k].abs() > half[k] {
                            return Vec::new();
                        }
                        continue;
                    }
                    let a = (-half[k] - lo[k]) / ld[k];
                    let b = (half[k] - lo[k]) / ld[k];
                    t0 = t0.max(a.min(b));
                    t1 = t1.min(a.max(b));
                }
                if t0 > t1 {
                    Vec::new()
                } else {
                    vec![t0, t1]
                }
            }
            Prim::Plane { pose, size } => {
                let inv = pose.inverse();
                let (lo, ld) = (inv.transform_point(o), inv.transform_vector(d));
                if ld.z == 0.0 {
                    return Vec::new();
                }
                let t = -lo.z / ld.z;
                let p = lo + ld * t;
                if p.x.abs() <= size[0] / 2.0 && p.y.abs() <= size[1] / 2.0 {
                    vec![t]
                } else {
                    Vec::new()
                }
            }
        }
    }

    /// Same primitive grown (s > 1) or shrunk (s < 1) about its centre.
    pub fn scaled(&self, s: f64) -> Prim {
        match *self {
            Prim::Sphere { center, radius } => Prim::Sphere { center, radius: radius * s },
            Prim::Box { pose, size } => Prim::Box { pose, size: size * s },
            Prim::Plane { pose, size } => Prim::Plane { pose, size: [size[0] * s, size[1] * s] },
        }
    }
}

/// Nearest hit with ray parameter in [t_min, t_max]: (primitive index, t).
pub fn first_hit(prims: &[Prim], o: &Vec3, d: &Vec3, t_min: f64, t_max: f64) -> Option<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for (i, p) in prims.iter().enumerate() {
        for t in p.hits(o, d) {
            if t >= t_min && t <= t_max && best.is_none_or(|(_, bt)| t < bt) {
                best = Some((i, t));
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy)]
pub struct Pinhole {
    pub pose: Pose,
    pub width: u32,
    pub height: u32,
    pub fov_deg: f64,
    pub near: f64,
    pub far: f64,
}

impl Pinhole {
    pub fn to_json(&self, name: &str) -> Value {
        let p = self.pose.position;
        json!({
            "name": name, "type": "vision_sensor", "parent": null,
            "position": [p.x, p.y, p.z],
            "quaternion": quat_json(&self.pose.orientation),
            "resolution": [self.width, self.height],
            "fov_deg": self.fov_deg, "near": self.near, "far": self.far,
        })
    }

    /// World ray through the centre of pixel (x, y), scaled so that the
    /// ray parameter equals view-axis depth.
    pub fn ray(&self, x: u32, y: u32) -> (Vec3, Vec3) {
        let f = 0.5 * self.width as f64 / (0.5 * self.fov_deg.to_radians()).tan();
        let u = (x as f64 + 0.5 - 0.5 * self.width as f64) / f;
        let v = (y as f64 + 0.5 - 0.5 * self.height as f64) / f;
        let d = self.pose.orientation.rotate(&Vec3::new(u, v, 1.0));
        (self.pose.position, d)
    }

    /// Per-pixel oracle depth and primitive id (`None` for background).
    pub fn depth_oracle(&self, prims: &[Prim]) -> Vec<(f64, Option<usize>)> {
        let mut out = Vec::with_capacity((self.width * self.height) as usize);
        for y in 0..self.height {
            for x in 0..self.width {
                let (o, d) = self.ray(x, y);
                out.push(match first_hit(prims, &o, &d, self.near, self.far) {
                    Some((i, t)) => (t, Some(i)),
                    None => (self.far, None),
                });
            }
        }
        out
    }
}

pub fn light_json(name: &str, kind: &str, pose: &Pose, color: [f64; 3], cone_deg: Option<f64>) -> Value {
    let p = pose.position;
    let mut v = json!({
        "name": name, "type": "light", "parent": null,
        "position": [p.x, p.y, p.z],
        "quaternion": quat_json(&pose.orientation),
        "light_type": kind, "color": color,
    });
    if let Some(c) = cone_deg {
        v["cone_deg"] = json!(c);
    }
    v
}

pub fn scene_from(objects: Vec<Value>, ambient: f64) -> Scene {
    Scene::from_json(&json!({ "ambient": ambient, "objects": objects }).to_string()).unwrap()
}

/// Up to five spheres and boxes in front of a camera at the origin looking
/// along +z.
pub fn random_prims(rng: &mut impl Rng) -> Vec<Prim> {
    let n = rng.random_range(1..=5);
    (0..n)
        .map(|_| {
            let center = Vec3::new(
                rng.random_range(-0.8..0.8),
                rng.random_range(-0.6..0.6),
                rng.random_range(1.5..4.0),
            );
            if rng.random_bool(0.5) {
                Prim::Sphere { center, radius: rng.random_range(0.05..0.2) }
            } else {
                let q = Quaternion::new_normalize(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                Prim::Box {
                    pose: Pose::new(center, q),
                    size: Vec3::new(
                        rng.random_range(0.1..0.6),
                        rng.random_range(0.1..0.6),
                        rng.random_range(0.1..0.6),
                    ),
                }
            }
        })
        .collect()
}

/// Fraction of non-edge pixels whose rendered depth is within `tol` of the
/// oracle. A pixel is an edge pixel when its oracle hit id differs from that
/// of any 4-neighbour.
pub fn depth_agreement(
    width: u32,
    height: u32,
    rendered: &[f64],
    oracle: &[(f64, Option<usize>)],
    tol: f64,
) -> (f64, usize) {
    let (w, h) = (width as i64, height as i64);
    let id = |x: i64, y: i64| oracle[(y * w + x) as usize].1;
    let (mut checked, mut good) = (0usize, 0usize);
    for y in 0..h {
        for x in 0..w {
            let me = id(x, y);
            let edge = [(-1, 0), (1, 0), (0, -1), (0, 1)].iter().any(|(dx, dy)| {
                let (nx, ny) = (x + dx, y + dy);
                nx >= 0 && ny >= 0 && nx < w && ny < h && id(nx, ny) != me
            });
            if edge {
                continue;
            }
            checked += 1;
            let i = (y * w + x) as usize;
            if (rendered[i] - oracle[i].0).abs() <= tol {
                good += 1;
            }
        }
    }
    (good as f64 / checked.max(1) as f64, checked)
}

/// Camera at the origin looking along +z.
pub fn front_camera(width: u32, height: u32) -> Pinhole {
    Pinhole {
        pose: Pose::IDENTITY,
        width,
        height,
        fov_deg: 60.0,
        near: 0.1,
        far: 10.0,
    }
}

pub fn handle(scene: &Scene, name: &str) -> Handle {
    scene.get_object_by_name(name).unwrap()
}

/// Camera above the origin looking straight down; image x is world +x,
/// image y is world −y.
pub fn top_camera(height: f64, res: u32) -> Pinhole {
    Pinhole {
        pose: Pose::new(Vec3::new(0.0, 0.0, height), Quaternion::rot_x(PI)),
        width: res,
        height: res,
        fov_deg: 60.0,
        near: 0.1,
        far: 20.0,
    }
}

pub fn ground() -> Prim {
    Prim::Plane { pose: Pose::IDENTITY, size: [6.0, 6.0] }
}

/// Whether the ground point under pixel (x, y) is shadowed by `occluder`
/// from a light direction `to_light`, checked at the pixel centre and at
/// eight points two pixels away. `None` when the samples disagree.
pub fn robust_shadow(cam: &Pinhole, x: u32, y: u32, to_light: &Vec3, occluder: &Prim) -> Option<bool> {
    let f = 0.5 * cam.width as f64 / (0.5 * cam.fov_deg.to_radians()).tan();
    let mut state = None;
    for k in 0..9 {
        let (dx, dy) = if k == 0 {
            (0.0, 0.0)
        } else {
            let a = (k - 1) as f64 * PI / 4.0;
            (2.0 * a.cos(), 2.0 * a.sin())
        };
        let u = (x as f64 + 0.5 + dx - 0.5 * cam.width as f64) / f;
        let v = (y as f64 + 0.5 + dy - 0.5 * cam.height as f64) / f;
        let d = cam.pose.orientation.rotate(&Vec3::new(u, v, 1.0));
        let t = -cam.pose.position.z / d.z;
        let g = cam.pose.position + d * t;
        let shadowed = occluder.hits(&g, to_light).iter().any(|&s| s > 1e-9);
        match state {
            None => state = Some(shadowed),
            Some(s) if s != shadowed => return None,
            _ => {}
        }
    }
    state
}

/// Point light at the origin with three one-sided occluders in different
/// cube faces.
pub fn point_light_scene() -> (Scene, Vec<Prim>) {
    let occluders = vec![
        // Facing the light from +x.
        Prim::Plane { pose: Pose::new(Vec3::new(1.0, 0.1, 0.0), Quaternion::rot_y(-PI / 2.0)), size: [0.8, 0.8] },
        Prim::Sphere { center: Vec3::new(0.2, -1.2, 0.1), radius: 0.3 },
        Prim::Box { pose: Pose::new(Vec3::new(0.1, 0.2, 1.5), Quaternion::rot_z(0.4)), size: Vec3::new(0.6, 0.4, 0.2) },
    ];
    let mut objects: Vec<_> = occluders
        .iter()
        .enumerate()
        .map(|(i, p)| p.to_json(&format!("occ{i}"), [1.0; 3]))
        .collect();
    objects.push(light_json("bulb", "point", &Pose::IDENTITY, [1.0; 3], None));
    (scene_from(objects, 0.2), occluders)
}

pub fn two_light_scene() -> Scene {
    let cam = Pinhole {
        pose: Pose::new(Vec3::new(0.0, -3.0, 2.0), look_along(Vec3::new(0.0, 3.0, -2.0))),
        ..front_camera(96, 72)
    };
    scene_from(
        vec![
            cam.to_json("cam"),
            ground().to_json("ground", [0.9, 0.8, 0.7]),
            Prim::Sphere { center: Vec3::new(0.0, 0.0, 0.5), radius: 0.4 }.to_json("ball", [0.3, 0.9, 0.5]),
            Prim::Box { pose: Pose::new(Vec3::new(0.8, 0.4, 0.25), Quaternion::rot_z(0.5)), size: Vec3::repeat(0.5) }
                .to_json("crate", [0.9, 0.2, 0.2]),
            light_json("sun", "directional", &Pose::new(Vec3::zeros(), look_along(Vec3::new(-0.4, 0.5, -1.0))), [0.9, 0.8, 0.7], None),
            light_json("bulb", "point", &Pose::from_translation(-1.0, -0.5, 1.5), [0.6, 0.6, 0.9], None),
            light_json("spot", "spot", &Pose::new(Vec3::new(1.0, -1.0, 2.0), look_along(Vec3::new(-0.5, 0.5, -1.0))), [1.0, 1.0, 1.0], Some(45.0)),
        ],
        0.15,
    )
}
