//! Deterministic software rasterizer for vision sensors.
//!
//! Depth images hold metric distance along the sensor's optical axis.
//! Colour images use Lambertian shading with hard shadows from
//! directional, spot and point lights, each backed by a shadow map.

mod camera;
mod image;
mod light;
mod raster;
mod shadow;

use stepsim_core::{Handle, Scene, SceneError, Vec3};
use thiserror::Error;

pub use camera::Camera;
pub use image::{DepthBuffer, Framebuffer};
pub use light::LightSource;
pub use shadow::{
    render_shadow_map, shadow_visibility, FaceProjection, ShadowFace, ShadowMap, ShadowParams,
    DEFAULT_DEPTH_BIAS, DEFAULT_SHADOW_RESOLUTION, FAR_SENTINEL,
};

use raster::{clip_near, rasterize, to_view, world_triangles, Projection, WorldTriangle};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RenderError {
    #[error("object {0} is not a vision sensor")]
    NotAVisionSensor(Handle),
    #[error("object {0} is not a light")]
    NotALight(Handle),
    #[error("invalid render parameters: {0}")]
    InvalidParams(&'static str),
    #[error(transparent)]
    Scene(#[from] SceneError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RenderOptions {
    pub shadows: bool,
    pub shadow: ShadowParams,
    /// Restrict shading to these lights; `None` uses every light.
    pub lights: Option<Vec<Handle>>,
    /// Overrides the scene's ambient coefficient.
    pub ambient: Option<f64>,
}

impl Default for RenderOptions {
    fn default() -> Self {
        Self {
            shadows: true,
            shadow: ShadowParams::default(),
            lights: None,
            ambient: None,
        }
    }
}

/// Per-pixel surface record of the camera pass.
#[derive(Debug, Clone, Copy)]
struct Surface {
    z: f64,
    normal: Vec3,
    albedo: [f64; 3],
}

fn camera_pass(cam: &Camera, tris: &[WorldTriangle]) -> Vec<Option<Surface>> {
    let (w, h) = (cam.width as usize, cam.height as usize);
    let (cx, cy) = cam.principal_point();
    let proj = Projection::Perspective {
        focal: cam.focal(),
        cx,
        cy,
    };
    let world_to_view = cam.pose.inverse();
    let mut surf: Vec<Option<Surface>> = vec![None; w * h];
    for tri in tris {
        for piece in clip_near(to_view(tri, &world_to_view), cam.near) {
            let s = piece.map(|v| proj.project(&v.p));
            rasterize(&s, w, h, |i, b| {
                let z = b[0] * s[0].z + b[1] * s[1].z + b[2] * s[2].z;
                if z > cam.far {
                    return;
                }
                let z = z.max(cam.near);
                if surf[i].is_some_and(|o| o.z <= z) {
                    return;
                }
                let n = piece[0].n * b[0] + piece[1].n * b[1] + piece[2].n * b[2];
                surf[i] = Some(Surface {
                    z,
                    normal: n.try_normalize(0.0).unwrap_or(n),
                    albedo: tri.color,
                });
            });
        }
    }
    surf
}

pub fn capture_depth(scene: &Scene, sensor: Handle) -> Result<DepthBuffer, RenderError> {
    let cam = Camera::from_sensor(scene, sensor)?;
    let tris = world_triangles(scene)?;
    let mut out = DepthBuffer::new(cam.width, cam.height, cam.near, cam.far);
    for (d, s) in out.data.iter_mut().zip(camera_pass(&cam, &tris)) {
        if let Some(s) = s {
            *d = s.z;
        }
    }
    Ok(out)
}

/// Colour image with channels clamped to [0, 1].
pub fn capture_rgb(scene: &Scene, sensor: Handle) -> Result<Framebuffer, RenderError> {
    capture_rgb_with(scene, sensor, &RenderOptions::default())
}

pub fn capture_rgb_with(
    scene: &Scene,
    sensor: Handle,
    options: &RenderOptions,
) -> Result<Framebuffer, RenderError> {
    Ok(render_radiance(scene, sensor, options)?.clamped())
}

/// Shaded image before clamping. Background pixels are black.
pub fn render_radiance(
    scene: &Scene,
    sensor: Handle,
    options: &RenderOptions,
) -> Result<Framebuffer, RenderError> {
    let cam = Camera::from_sensor(scene, sensor)?;
    let tris = world_triangles(scene)?;
    let ambient = options.ambient.unwrap_or(scene.ambient);
    let lights = match &options.lights {
        Some(handles) => handles
            .iter()
            .map(|&h| LightSource::from_scene(scene, h))
            .collect::<Result<Vec<_>, _>>()?,
        None => LightSource::all(scene)?,
    };
    let maps = if options.shadows {
        lights
            .iter()
            .map(|l| shadow::shadow_map_for(l, &tris, &options.shadow).map(Some))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        vec![None; lights.len()]
    };

    let mut fb = Framebuffer::new(cam.width, cam.height);
    let eye = cam.pose.position;
    for (i, s) in camera_pass(&cam, &tris).into_iter().enumerate() {
        let Some(s) = s else { continue };
        let (x, y) = ((i % cam.width as usize) as f64, (i / cam.width as usize) as f64);
        let p = cam.pose.transform_point(&cam.unproject(x + 0.5, y + 0.5, s.z));
        let n = if s.normal.dot(&(eye - p)) < 0.0 { -s.normal } else { s.normal };
        let mut radiance = [ambient; 3];
        for (light, map) in lights.iter().zip(&maps) {
            if !light.illuminates(&p) {
                continue;
            }
            let ndotl = n.dot(&light.to_light(&p));
            if ndotl <= 0.0 {
                continue;
            }
            let vis = map.as_ref().map_or(1.0, |m| shadow_visibility(m, &p, &n));
            for (r, c) in radiance.iter_mut().zip(light.color) {
                *r += vis * ndotl * c;
            }
        }
        let rgb = [0, 1, 2].map(|c| s.albedo[c] * radiance[c]);
        fb.set_pixel(x as u32, y as u32, rgb);
    }
    Ok(fb)
}
