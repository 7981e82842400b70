use stepsim_core::scene::{LightParams, LightType, ObjectData};
use stepsim_core::{Handle, Pose, Scene, Vec3};

use crate::RenderError;

/// A light resolved to world space. Directional and spot lights shine along
/// their local +z axis; a spot's `cone_deg` is the full apex angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightSource {
    pub handle: Handle,
    pub light_type: LightType,
    pub color: [f64; 3],
    pub cone_deg: Option<f64>,
    pub pose: Pose,
}

impl LightSource {
    pub fn from_scene(scene: &Scene, light: Handle) -> Result<LightSource, RenderError> {
        let obj = scene.object(light)?;
        let ObjectData::Light(LightParams {
            light_type,
            color,
            cone_deg,
        }) = obj.data
        else {
            return Err(RenderError::NotALight(light));
        };
        if light_type == LightType::Spot && !cone_deg.is_some_and(|c| c > 0.0 && c < 180.0) {
            return Err(RenderError::InvalidParams("spot lights need 0 < cone_deg < 180"));
        }
        Ok(LightSource {
            handle: light,
            light_type,
            color,
            cone_deg,
            pose: scene.world_pose(light)?,
        })
    }

    /// All lights of a scene in handle order.
    pub fn all(scene: &Scene) -> Result<Vec<LightSource>, RenderError> {
        scene
            .objects()
            .filter(|o| matches!(o.data, ObjectData::Light(_)))
            .map(|o| LightSource::from_scene(scene, o.handle))
            .collect()
    }

    /// World direction of the light's +z axis.
    pub fn axis(&self) -> Vec3 {
        self.pose.transform_vector(&Vec3::z())
    }

    /// Unit vector from `p` towards the light.
    pub fn to_light(&self, p: &Vec3) -> Vec3 {
        match self.light_type {
            LightType::Directional => -self.axis(),
            LightType::Spot | LightType::Point => (self.pose.position - p).normalize(),
        }
    }

    /// False for points outside a spot's cone or at the light's own position.
    pub fn illuminates(&self, p: &Vec3) -> bool {
        match self.light_type {
            LightType::Directional => true,
            LightType::Point => *p != self.pose.position,
            LightType::Spot => {
                let d = p - self.pose.position;
                let len = d.norm();
                if len == 0.0 {
                    return false;
                }
                let half = 0.5 * self.cone_deg.unwrap_or(0.0).to_radians();
                self.axis().dot(&d) / len >= half.cos()
            }
        }
    }
}
