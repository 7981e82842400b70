use stepsim_core::scene::ObjectData;
use stepsim_core::{Handle, Pose, Scene, Vec3};

use crate::RenderError;

/// Pinhole camera. The optical axis is the local +z axis, image x points
/// right and image y points down. Pixels are square and sampled at their
/// centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Camera {
    pub pose: Pose,
    pub width: u32,
    pub height: u32,
    /// Horizontal field of view.
    pub fov_deg: f64,
    pub near: f64,
    pub far: f64,
}

impl Camera {
    pub fn from_sensor(scene: &Scene, sensor: Handle) -> Result<Camera, RenderError> {
        let obj = scene.object(sensor)?;
        let ObjectData::VisionSensor(p) = &obj.data else {
            return Err(RenderError::NotAVisionSensor(sensor));
        };
        let cam = Camera {
            pose: scene.world_pose(sensor)?,
            width: p.width,
            height: p.height,
            fov_deg: p.fov_deg,
            near: p.near,
            far: p.far,
        };
        cam.validate()?;
        Ok(cam)
    }

    pub fn validate(&self) -> Result<(), RenderError> {
        if self.width == 0 || self.height == 0 {
            return Err(RenderError::InvalidParams("resolution must be non-zero"));
        }
        if !(self.fov_deg > 0.0 && self.fov_deg < 180.0) {
            return Err(RenderError::InvalidParams("fov_deg must lie in (0, 180)"));
        }
        if !(self.near > 0.0 && self.near < self.far && self.far.is_finite()) {
            return Err(RenderError::InvalidParams("clip distances must satisfy 0 < near < far"));
        }
        Ok(())
    }

    /// Focal length in pixels.
    pub fn focal(&self) -> f64 {
        0.5 * self.width as f64 / (0.5 * self.fov_deg.to_radians()).tan()
    }

    pub fn principal_point(&self) -> (f64, f64) {
        (0.5 * self.width as f64, 0.5 * self.height as f64)
    }

    /// View-space point at depth `z` seen through image position (u, v).
    /// Pixel (x, y) has its centre at (x + 0.5, y + 0.5).
    pub fn unproject(&self, u: f64, v: f64, z: f64) -> Vec3 {
        let f = self.focal();
        let (cx, cy) = self.principal_point();
        Vec3::new((u - cx) / f * z, (v - cy) / f * z, z)
    }

    /// Image position and view-axis depth of a world point; `None` behind
    /// the camera.
    pub fn project(&self, world: &Vec3) -> Option<(f64, f64, f64)> {
        let p = self.pose.inverse().transform_point(world);
        if p.z <= 0.0 {
            return None;
        }
        let f = self.focal();
        let (cx, cy) = self.principal_point();
        Some((cx + f * p.x / p.z, cy + f * p.y / p.z, p.z))
    }
}
