use std::f64::consts::FRAC_PI_2;

use stepsim_core::scene::LightType;
use stepsim_core::{Handle, Pose, Quaternion, Scene, Vec3};

use crate::light::LightSource;
use crate::raster::{bounds, depth_pass, world_triangles, Projection, WorldTriangle};
use crate::RenderError;

/// Value stored in texels that no geometry covers.
pub const FAR_SENTINEL: f64 = 1.0;

pub const DEFAULT_SHADOW_RESOLUTION: u32 = 512;
pub const DEFAULT_DEPTH_BIAS: f64 = 1e-3;

const SPOT_POINT_NEAR: f64 = 0.01;
/// Normal-offset distance in texels at grazing incidence.
const NORMAL_OFFSET_TEXELS: f64 = 1.5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShadowParams {
    /// Edge length of each square depth texture; a power of two.
    pub resolution: u32,
    /// Tolerance in normalized light depth.
    pub bias: f64,
}

impl Default for ShadowParams {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_SHADOW_RESOLUTION,
            bias: DEFAULT_DEPTH_BIAS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FaceProjection {
    /// Light-frame x/y window covered by the texture.
    Orthographic {
        min: [f64; 2],
        max: [f64; 2],
    },
    Perspective {
        fov_deg: f64,
    },
}

/// One depth texture. Texel values are `(z - near) / (far - near)` where
/// `z` is the depth along the face's +z axis.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowFace {
    /// World pose of the face's eye frame.
    pub eye: Pose,
    pub projection: FaceProjection,
    pub near: f64,
    pub far: f64,
    pub depth: Vec<f64>,
}

impl ShadowFace {
    fn raster_projection(&self, resolution: u32) -> Projection {
        let res = resolution as f64;
        match self.projection {
            FaceProjection::Orthographic { min, max } => Projection::Orthographic {
                x0: min[0],
                y0: min[1],
                sx: res / (max[0] - min[0]),
                sy: res / (max[1] - min[1]),
            },
            FaceProjection::Perspective { fov_deg } => Projection::Perspective {
                focal: 0.5 * res / (0.5 * fov_deg.to_radians()).tan(),
                cx: 0.5 * res,
                cy: 0.5 * res,
            },
        }
    }

    pub fn normalize_depth(&self, z: f64) -> f64 {
        (z - self.near) / (self.far - self.near)
    }

    /// Texel coordinates (continuous) and eye-frame depth of a world point.
    /// `None` when the point lies behind a perspective eye.
    pub fn project(&self, world: &Vec3, resolution: u32) -> Option<(f64, f64, f64)> {
        let p = self.eye.inverse().transform_point(world);
        if matches!(self.projection, FaceProjection::Perspective { .. }) && p.z <= 0.0 {
            return None;
        }
        let s = self.raster_projection(resolution).project(&p);
        Some((s.x, s.y, p.z))
    }

    /// World size of one texel at eye depth `z`.
    fn texel_size(&self, z: f64, resolution: u32) -> f64 {
        match self.projection {
            FaceProjection::Orthographic { min, max } => {
                (max[0] - min[0]).max(max[1] - min[1]) / resolution as f64
            }
            FaceProjection::Perspective { fov_deg } => {
                2.0 * z.max(self.near) * (0.5 * fov_deg.to_radians()).tan() / resolution as f64
            }
        }
    }
}

/// Depth textures rendered from one light: one face for directional and
/// spot lights, six for point lights (+x, −x, +y, −y, +z, −z of the light
/// frame).
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowMap {
    pub light: LightSource,
    pub resolution: u32,
    pub bias: f64,
    pub faces: Vec<ShadowFace>,
}

impl ShadowMap {
    pub fn texel(&self, face: usize, x: usize, y: usize) -> f64 {
        self.faces[face].depth[y * self.resolution as usize + x]
    }

    /// Index of the face whose frustum contains the direction to `p`.
    pub fn face_for(&self, p: &Vec3) -> usize {
        if self.light.light_type != LightType::Point {
            return 0;
        }
        let d = self.light.pose.inverse().transform_point(p);
        let (ax, ay, az) = (d.x.abs(), d.y.abs(), d.z.abs());
        if ax >= ay && ax >= az {
            if d.x >= 0.0 { 0 } else { 1 }
        } else if ay >= az {
            if d.y >= 0.0 { 2 } else { 3 }
        } else if d.z >= 0.0 {
            4
        } else {
            5
        }
    }
}

fn point_face_rotations() -> [Quaternion; 6] {
    [
        Quaternion::rot_y(FRAC_PI_2),
        Quaternion::rot_y(-FRAC_PI_2),
        Quaternion::rot_x(-FRAC_PI_2),
        Quaternion::rot_x(FRAC_PI_2),
        Quaternion::IDENTITY,
        Quaternion::rot_y(std::f64::consts::PI),
    ]
}

fn box_corners(lo: &Vec3, hi: &Vec3) -> [Vec3; 8] {
    std::array::from_fn(|i| {
        Vec3::new(
            if i & 1 == 0 { lo.x } else { hi.x },
            if i & 2 == 0 { lo.y } else { hi.y },
            if i & 4 == 0 { lo.z } else { hi.z },
        )
    })
}

pub fn render_shadow_map(
    scene: &Scene,
    light: Handle,
    params: &ShadowParams,
) -> Result<ShadowMap, RenderError> {
    let source = LightSource::from_scene(scene, light)?;
    let tris = world_triangles(scene)?;
    shadow_map_for(&source, &tris, params)
}

pub(crate) fn shadow_map_for(
    light: &LightSource,
    tris: &[WorldTriangle],
    params: &ShadowParams,
) -> Result<ShadowMap, RenderError> {
    if !params.resolution.is_power_of_two() {
        return Err(RenderError::InvalidParams("shadow resolution must be a power of two"));
    }
    if !(params.bias >= 0.0 && params.bias.is_finite()) {
        return Err(RenderError::InvalidParams("depth bias must be finite and non-negative"));
    }
    let (lo, hi) = bounds(tris).unwrap_or((Vec3::repeat(-1.0), Vec3::repeat(1.0)));
    let corners = box_corners(&lo, &hi);
    let margin = 1e-3 + 0.01 * (hi - lo).max();

    let eyes: Vec<(Pose, Option<f64>)> = match light.light_type {
        LightType::Directional => vec![(light.pose, None)],
        LightType::Spot => vec![(light.pose, light.cone_deg)],
        LightType::Point => point_face_rotations()
            .iter()
            .map(|r| (light.pose.compose(&Pose::from_rotation(*r)), Some(90.0)))
            .collect(),
    };

    let res = params.resolution as usize;
    let mut faces = Vec::with_capacity(eyes.len());
    for (eye, fov) in eyes {
        let inv = eye.inverse();
        let local: Vec<Vec3> = corners.iter().map(|c| inv.transform_point(c)).collect();
        let (llo, lhi) = local[1..]
            .iter()
            .fold((local[0], local[0]), |(a, b), p| (a.inf(p), b.sup(p)));
        let mut face = match fov {
            None => ShadowFace {
                eye,
                projection: FaceProjection::Orthographic {
                    min: [llo.x - margin, llo.y - margin],
                    max: [lhi.x + margin, lhi.y + margin],
                },
                near: llo.z - margin,
                far: lhi.z + margin,
                depth: Vec::new(),
            },
            Some(fov_deg) => ShadowFace {
                eye,
                projection: FaceProjection::Perspective { fov_deg },
                near: SPOT_POINT_NEAR,
                far: (lhi.z + margin).max(SPOT_POINT_NEAR + 1.0),
                depth: Vec::new(),
            },
        };
        let mut depth = vec![FAR_SENTINEL; res * res];
        let clip = fov.map(|_| face.near);
        let proj = face.raster_projection(params.resolution);
        let (near, far) = (face.near, face.far);
        depth_pass(tris, &inv, &proj, clip, res, res, &mut depth, |z| {
            (z - near) / (far - near)
        });
        face.depth = depth;
        faces.push(face);
    }
    Ok(ShadowMap {
        light: *light,
        resolution: params.resolution,
        bias: params.bias,
        faces,
    })
}

/// 1 when `point` (with surface normal `normal`) is lit by the map's light,
/// 0 when an occluder covers it or it lies outside the light's reach.
pub fn shadow_visibility(map: &ShadowMap, point: &Vec3, normal: &Vec3) -> f64 {
    let light = &map.light;
    if !light.illuminates(point) {
        return 0.0;
    }
    let face = &map.faces[map.face_for(point)];
    let Some((_, _, z)) = face.project(point, map.resolution) else {
        return 0.0;
    };

    // Push the lookup off the surface by a texel-scaled amount that grows
    // with the incidence angle.
    let l = light.to_light(point);
    let cos = normal.dot(&l);
    let n = if cos < 0.0 { -normal } else { *normal };
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    let offset = face.texel_size(z, map.resolution) * NORMAL_OFFSET_TEXELS * sin;
    let q = point + n * offset;

    let Some((u, v, zq)) = face.project(&q, map.resolution) else {
        return 0.0;
    };
    let res = map.resolution as f64;
    let (tx, ty) = match face.projection {
        FaceProjection::Orthographic { .. } => {
            if !(0.0..res).contains(&u) || !(0.0..res).contains(&v) {
                return 0.0;
            }
            (u.floor(), v.floor())
        }
        FaceProjection::Perspective { .. } => {
            if zq < face.near {
                return 1.0;
            }
            let inside = |c: f64| (0.0..res).contains(&c);
            if light.light_type == LightType::Spot && !(inside(u) && inside(v)) {
                return 0.0;
            }
            (u.floor().clamp(0.0, res - 1.0), v.floor().clamp(0.0, res - 1.0))
        }
    };
    let stored = face.depth[ty as usize * map.resolution as usize + tx as usize];
    if stored == FAR_SENTINEL || face.normalize_depth(zq) <= stored + map.bias {
        1.0
    } else {
        0.0
    }
}
