//! Scene graph: named, handle-addressed objects in a parent/child transform
//! forest, loaded from and saved to the JSON scene document.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::math::{Pose, Quaternion, Vec3};
use crate::mesh::{Mesh, ICOSPHERE_SUBDIVISIONS};

pub const DEFAULT_DT: f64 = 0.05;
pub const DEFAULT_AMBIENT: f64 = 0.2;

/// Quaternions further than this from unit norm are rejected at load.
const ORIENTATION_TOLERANCE: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("scene parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("duplicate object name `{0}`")]
    DuplicateName(String),
    #[error("object `{name}` references unknown parent `{parent}`")]
    UnknownParent { name: String, parent: String },
    #[error("parent chain of `{0}` contains a cycle")]
    CycleDetected(String),
    #[error("quaternion of `{0}` is not unit norm")]
    BadOrientation(String),
    #[error("object `{name}`: {reason}")]
    Invalid { name: String, reason: String },
    #[error("unknown handle {0}")]
    UnknownHandle(Handle),
    #[error("no object named `{0}`")]
    NotFound(String),
    #[error("object {0} is a joint; joints move only through joint targets")]
    SetOnJoint(Handle),
    #[error("object {0} is not a joint")]
    NotAJoint(Handle),
    #[error("non-finite value passed for object {0}")]
    NonFinite(Handle),
}

/// Dense positive object id, assigned in document order starting at 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Handle(pub u32);

impl fmt::Display for Handle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

impl Handle {
    fn index(self) -> usize {
        (self.0 as usize).wrapping_sub(1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectKind {
    Shape,
    Dummy,
    Joint,
    VisionSensor,
    Light,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionSphere {
    pub center: [f64; 3],
    pub radius: f64,
}

impl CollisionSphere {
    pub fn center(&self) -> Vec3 {
        Vec3::from(self.center)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    /// Full extents.
    Box { size: Vec3 },
    Sphere { radius: f64 },
    /// Rectangle in local xy with normal +z; `size.z` is ignored.
    Plane { size: Vec3 },
}

impl Primitive {
    pub fn tessellate(&self) -> Mesh {
        match *self {
            Primitive::Box { size } => Mesh::cuboid(&size),
            Primitive::Sphere { radius } => Mesh::icosphere(radius, ICOSPHERE_SUBDIVISIONS),
            Primitive::Plane { size } => Mesh::plane(size.x, size.y),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Shape {
    pub primitive: Primitive,
    pub color: [f64; 3],
    pub collision_spheres: Vec<CollisionSphere>,
    pub mesh: Arc<Mesh>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointType {
    Revolute,
    Prismatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JointMode {
    Velocity,
    Position,
    Passive,
}

/// Static joint description from the scene file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointParams {
    pub joint_type: JointType,
    /// Unit axis in the joint's own frame.
    pub axis: Vec3,
    pub lower: f64,
    pub upper: f64,
    pub max_velocity: f64,
}

impl JointParams {
    pub fn clamp(&self, q: f64) -> f64 {
        q.clamp(self.lower, self.upper)
    }

    pub fn within_limits(&self, q: f64) -> bool {
        q >= self.lower && q <= self.upper
    }

    /// Displacement produced by joint position `q`.
    pub fn motion(&self, q: f64) -> Pose {
        match self.joint_type {
            JointType::Revolute => Pose::from_rotation(Quaternion::from_axis_angle(&self.axis, q)),
            JointType::Prismatic => Pose::new(self.axis * q, Quaternion::IDENTITY),
        }
    }
}

/// Live per-joint state: position plus the targets the integrator drives it by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointState {
    pub q: f64,
    pub v_target: f64,
    pub q_target: f64,
    pub mode: JointMode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Joint {
    pub params: JointParams,
    pub state: JointState,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VisionSensorParams {
    pub width: u32,
    pub height: u32,
    /// Horizontal field of view.
    pub fov_deg: f64,
    pub near: f64,
    pub far: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LightType {
    Directional,
    Spot,
    Point,
}

/// Directional and spot lights shine along their local +z axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LightParams {
    pub light_type: LightType,
    pub color: [f64; 3],
    /// Full apex angle of a spot cone.
    pub cone_deg: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ObjectData {
    Shape(Shape),
    Dummy,
    Joint(Joint),
    VisionSensor(VisionSensorParams),
    Light(LightParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub handle: Handle,
    pub name: String,
    pub parent: Option<Handle>,
    pub local_pose: Pose,
    pub data: ObjectData,
}

impl SceneObject {
    pub fn kind(&self) -> ObjectKind {
        match self.data {
            ObjectData::Shape(_) => ObjectKind::Shape,
            ObjectData::Dummy => ObjectKind::Dummy,
            ObjectData::Joint(_) => ObjectKind::Joint,
            ObjectData::VisionSensor(_) => ObjectKind::VisionSensor,
            ObjectData::Light(_) => ObjectKind::Light,
        }
    }

    /// Pose of this object's frame relative to its parent, including the
    /// current joint displacement for joints.
    pub fn frame_in_parent(&self) -> Pose {
        match &self.data {
            ObjectData::Joint(j) => self.local_pose.compose(&j.params.motion(j.state.q)),
            _ => self.local_pose,
        }
    }
}

/// A loaded scene. Objects are stored densely by handle.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    objects: Vec<SceneObject>,
    roots: Vec<Handle>,
    names: HashMap<String, Handle>,
    pub dt: f64,
    pub ambient: f64,
}

impl Default for Scene {
    fn default() -> Self {
        Self {
            objects: Vec::new(),
            roots: Vec::new(),
            names: HashMap::new(),
            dt: DEFAULT_DT,
            ambient: DEFAULT_AMBIENT,
        }
    }
}

impl Scene {
    /// Parses and links a scene document. Handles are assigned in document
    /// order starting at 1.
    pub fn from_json(text: &str) -> Result<Scene, SceneError> {
        let doc: SceneDoc = serde_json::from_str(text).map_err(|e| SceneError::Parse {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        Scene::from_doc(doc)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_doc()).expect("scene document serializes")
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn roots(&self) -> &[Handle] {
        &self.roots
    }

    /// All objects in handle order.
    pub fn objects(&self) -> impl Iterator<Item = &SceneObject> {
        self.objects.iter()
    }

    pub fn object(&self, h: Handle) -> Result<&SceneObject, SceneError> {
        self.objects.get(h.index()).ok_or(SceneError::UnknownHandle(h))
    }

    pub fn object_mut(&mut self, h: Handle) -> Result<&mut SceneObject, SceneError> {
        self.objects.get_mut(h.index()).ok_or(SceneError::UnknownHandle(h))
    }

    pub fn contains(&self, h: Handle) -> bool {
        h.index() < self.objects.len()
    }

    /// Exact-name lookup.
    pub fn get_object_by_name(&self, name: &str) -> Result<Handle, SceneError> {
        self.names
            .get(name)
            .copied()
            .ok_or_else(|| SceneError::NotFound(name.to_string()))
    }

    pub fn children(&self, h: Handle) -> impl Iterator<Item = Handle> + '_ {
        self.objects
            .iter()
            .filter(move |o| o.parent == Some(h))
            .map(|o| o.handle)
    }

    /// True if `ancestor` is a strict ancestor of `h`.
    pub fn is_ancestor(&self, ancestor: Handle, h: Handle) -> bool {
        let mut cur = self.objects.get(h.index()).and_then(|o| o.parent);
        while let Some(p) = cur {
            if p == ancestor {
                return true;
            }
            cur = self.objects[p.index()].parent;
        }
        false
    }

    pub fn joint(&self, h: Handle) -> Result<&Joint, SceneError> {
        match &self.object(h)?.data {
            ObjectData::Joint(j) => Ok(j),
            _ => Err(SceneError::NotAJoint(h)),
        }
    }

    pub fn joint_mut(&mut self, h: Handle) -> Result<&mut Joint, SceneError> {
        match &mut self.object_mut(h)?.data {
            ObjectData::Joint(j) => Ok(j),
            _ => Err(SceneError::NotAJoint(h)),
        }
    }

    /// Handles of every joint, in handle order.
    pub fn joint_handles(&self) -> Vec<Handle> {
        self.objects
            .iter()
            .filter(|o| matches!(o.data, ObjectData::Joint(_)))
            .map(|o| o.handle)
            .collect()
    }

    /// Composition of frames from the root down to `h`.
    pub fn world_pose(&self, h: Handle) -> Result<Pose, SceneError> {
        let obj = self.object(h)?;
        let frame = obj.frame_in_parent();
        match obj.parent {
            None => Ok(frame),
            Some(p) => Ok(self.world_pose(p)?.compose(&frame)),
        }
    }

    /// Pose of `h` expressed in `relative_to`'s frame (world when `None`).
    pub fn pose(&self, h: Handle, relative_to: Option<Handle>) -> Result<Pose, SceneError> {
        let world = self.world_pose(h)?;
        match relative_to {
            None => Ok(world),
            Some(r) => Ok(self.world_pose(r)?.inverse().compose(&world)),
        }
    }

    pub fn get_position(&self, h: Handle, relative_to: Option<Handle>) -> Result<Vec3, SceneError> {
        let world = self.world_pose(h)?.position;
        match relative_to {
            None => Ok(world),
            Some(r) => Ok(self.world_pose(r)?.inverse().transform_point(&world)),
        }
    }

    /// Moves `h` so that `get_position(h, relative_to)` returns `p`.
    /// Descendants follow rigidly.
    pub fn set_position(
        &mut self,
        h: Handle,
        p: Vec3,
        relative_to: Option<Handle>,
    ) -> Result<(), SceneError> {
        let obj = self.object(h)?;
        if matches!(obj.data, ObjectData::Joint(_)) {
            return Err(SceneError::SetOnJoint(h));
        }
        if !p.iter().all(|c| c.is_finite()) {
            return Err(SceneError::NonFinite(h));
        }
        let world = match relative_to {
            None => p,
            Some(r) => self.world_pose(r)?.transform_point(&p),
        };
        let local = match obj.parent {
            None => world,
            Some(parent) => self.world_pose(parent)?.inverse().transform_point(&world),
        };
        self.objects[h.index()].local_pose.position = local;
        Ok(())
    }

    fn from_doc(doc: SceneDoc) -> Result<Scene, SceneError> {
        let mut scene = Scene {
            dt: doc.dt.unwrap_or(DEFAULT_DT),
            ambient: doc.ambient.unwrap_or(DEFAULT_AMBIENT),
            ..Scene::default()
        };
        if !(scene.dt > 0.0 && scene.dt.is_finite()) {
            return Err(invalid("<scene>", "dt must be positive"));
        }
        if !(0.0..=1.0).contains(&scene.ambient) {
            return Err(invalid("<scene>", "ambient must lie in [0, 1]"));
        }
        for (i, od) in doc.objects.iter().enumerate() {
            if od.name.is_empty() {
                return Err(invalid("<unnamed>", "names must be non-empty"));
            }
            let handle = Handle(i as u32 + 1);
            if scene.names.insert(od.name.clone(), handle).is_some() {
                return Err(SceneError::DuplicateName(od.name.clone()));
            }
        }
        for (i, od) in doc.objects.iter().enumerate() {
            let handle = Handle(i as u32 + 1);
            let parent = match &od.parent {
                None => None,
                Some(p) => Some(*scene.names.get(p).ok_or_else(|| SceneError::UnknownParent {
                    name: od.name.clone(),
                    parent: p.clone(),
                })?),
            };
            let local_pose = Pose::new(Vec3::from(od.position), parse_quaternion(od)?);
            if !local_pose.position.iter().all(|c| c.is_finite()) {
                return Err(invalid(&od.name, "position must be finite"));
            }
            scene.objects.push(SceneObject {
                handle,
                name: od.name.clone(),
                parent,
                local_pose,
                data: parse_data(od)?,
            });
            if parent.is_none() {
                scene.roots.push(handle);
            }
        }
        scene.check_acyclic()?;
        Ok(scene)
    }

    fn check_acyclic(&self) -> Result<(), SceneError> {
        // 0 = unvisited, 1 = on current path, 2 = known to reach a root
        let mut mark = vec![0u8; self.objects.len()];
        for start in 0..self.objects.len() {
            let mut path = Vec::new();
            let mut cur = Some(start);
            while let Some(i) = cur {
                match mark[i] {
                    2 => break,
                    1 => return Err(SceneError::CycleDetected(self.objects[start].name.clone())),
                    _ => {}
                }
                mark[i] = 1;
                path.push(i);
                cur = self.objects[i].parent.map(Handle::index);
            }
            for i in path {
                mark[i] = 2;
            }
        }
        Ok(())
    }

    fn to_doc(&self) -> SceneDoc {
        let objects = self
            .objects
            .iter()
            .map(|o| {
                let mut od = ObjectDoc {
                    name: o.name.clone(),
                    kind: o.kind(),
                    parent: o.parent.map(|p| self.objects[p.index()].name.clone()),
                    position: o.local_pose.position.into(),
                    quaternion: o.local_pose.orientation.to_array(),
                    ..ObjectDoc::default()
                };
                match &o.data {
                    ObjectData::Shape(s) => {
                        let (prim, size) = match s.primitive {
                            Primitive::Box { size } => (PrimitiveDoc::Box, SizeDoc::Vector(size.into())),
                            Primitive::Sphere { radius } => (PrimitiveDoc::Sphere, SizeDoc::Scalar(radius)),
                            Primitive::Plane { size } => (PrimitiveDoc::Plane, SizeDoc::Vector(size.into())),
                        };
                        od.primitive = Some(prim);
                        od.size = Some(size);
                        od.color = Some(s.color);
                        if !s.collision_spheres.is_empty() {
                            od.collision_spheres = Some(s.collision_spheres.clone());
                        }
                    }
                    ObjectData::Dummy => {}
                    ObjectData::Joint(j) => {
                        od.joint_type = Some(j.params.joint_type);
                        od.axis = Some(j.params.axis.into());
                        od.limits = Some([j.params.lower, j.params.upper]);
                        od.mode = Some(j.state.mode);
                        od.max_velocity = Some(j.params.max_velocity);
                        od.joint_position = Some(j.state.q);
                    }
                    ObjectData::VisionSensor(v) => {
                        od.resolution = Some([v.width, v.height]);
                        od.fov_deg = Some(v.fov_deg);
                        od.near = Some(v.near);
                        od.far = Some(v.far);
                    }
                    ObjectData::Light(l) => {
                        od.light_type = Some(l.light_type);
                        od.color = Some(l.color);
                        od.cone_deg = l.cone_deg;
                    }
                }
                od
            })
            .collect();
        SceneDoc {
            dt: Some(self.dt),
            ambient: Some(self.ambient),
            objects,
        }
    }
}

/// Parses a scene document.
pub fn load_scene(text: &str) -> Result<Scene, SceneError> {
    Scene::from_json(text)
}

fn invalid(name: &str, reason: &str) -> SceneError {
    SceneError::Invalid {
        name: name.to_string(),
        reason: reason.to_string(),
    }
}

fn parse_quaternion(od: &ObjectDoc) -> Result<Quaternion, SceneError> {
    let [w, x, y, z] = od.quaternion;
    let q = Quaternion::new_unchecked(w, x, y, z);
    let n = q.norm();
    if !n.is_finite() || (n - 1.0).abs() > ORIENTATION_TOLERANCE {
        return Err(SceneError::BadOrientation(od.name.clone()));
    }
    // Leave already-unit values untouched so save/load is bit-stable.
    if (n - 1.0).abs() > 1e-12 {
        Ok(q.normalized())
    } else {
        Ok(q)
    }
}

fn unit_axis(name: &str, axis: [f64; 3]) -> Result<Vec3, SceneError> {
    let a = Vec3::from(axis);
    let n = a.norm();
    if !n.is_finite() || (n - 1.0).abs() > ORIENTATION_TOLERANCE {
        return Err(invalid(name, "joint axis must be unit length"));
    }
    if (n - 1.0).abs() > 1e-12 {
        Ok(a / n)
    } else {
        Ok(a)
    }
}

fn check_color(name: &str, c: [f64; 3]) -> Result<[f64; 3], SceneError> {
    if c.iter().all(|v| (0.0..=1.0).contains(v)) {
        Ok(c)
    } else {
        Err(invalid(name, "color channels must lie in [0, 1]"))
    }
}

fn parse_data(od: &ObjectDoc) -> Result<ObjectData, SceneError> {
    let name = od.name.as_str();
    let missing = |field: &str| invalid(name, &format!("missing `{field}`"));
    Ok(match od.kind {
        ObjectKind::Dummy => ObjectData::Dummy,
        ObjectKind::Shape => {
            let size = od.size.as_ref().ok_or_else(|| missing("size"))?;
            let primitive = match od.primitive.ok_or_else(|| missing("primitive"))? {
                PrimitiveDoc::Box => Primitive::Box {
                    size: size.as_vector(),
                },
                PrimitiveDoc::Plane => Primitive::Plane {
                    size: size.as_vector(),
                },
                PrimitiveDoc::Sphere => Primitive::Sphere {
                    radius: size.as_scalar(),
                },
            };
            let dims_ok = match primitive {
                Primitive::Box { size } => size.iter().all(|v| *v > 0.0 && v.is_finite()),
                Primitive::Plane { size } => size.x > 0.0 && size.y > 0.0 && size.x.is_finite() && size.y.is_finite(),
                Primitive::Sphere { radius } => radius > 0.0 && radius.is_finite(),
            };
            if !dims_ok {
                return Err(invalid(name, "primitive dimensions must be positive"));
            }
            let collision_spheres = od.collision_spheres.clone().unwrap_or_default();
            if collision_spheres.iter().any(|s| !(s.radius > 0.0)) {
                return Err(invalid(name, "collision sphere radii must be positive"));
            }
            ObjectData::Shape(Shape {
                primitive,
                color: check_color(name, od.color.unwrap_or([1.0; 3]))?,
                collision_spheres,
                mesh: Arc::new(primitive.tessellate()),
            })
        }
        ObjectKind::Joint => {
            let [lower, upper] = od.limits.ok_or_else(|| missing("limits"))?;
            if !(lower <= upper) {
                return Err(invalid(name, "joint limits must satisfy lo <= hi"));
            }
            let params = JointParams {
                joint_type: od.joint_type.ok_or_else(|| missing("joint_type"))?,
                axis: unit_axis(name, od.axis.unwrap_or([0.0, 0.0, 1.0]))?,
                lower,
                upper,
                max_velocity: od.max_velocity.unwrap_or(1.0),
            };
            if !(params.max_velocity >= 0.0) {
                return Err(invalid(name, "max_velocity must be non-negative"));
            }
            let q = od.joint_position.unwrap_or(0.0);
            if !params.within_limits(q) {
                return Err(invalid(name, "initial joint position outside limits"));
            }
            ObjectData::Joint(Joint {
                params,
                state: JointState {
                    q,
                    v_target: 0.0,
                    q_target: q,
                    mode: od.mode.unwrap_or(JointMode::Velocity),
                },
            })
        }
        ObjectKind::VisionSensor => {
            let [width, height] = od.resolution.ok_or_else(|| missing("resolution"))?;
            let p = VisionSensorParams {
                width,
                height,
                fov_deg: od.fov_deg.unwrap_or(60.0),
                near: od.near.unwrap_or(0.01),
                far: od.far.unwrap_or(10.0),
            };
            if width == 0 || height == 0 {
                return Err(invalid(name, "resolution must be non-zero"));
            }
            if !(p.near > 0.0 && p.near < p.far && p.far.is_finite()) {
                return Err(invalid(name, "clip distances must satisfy 0 < near < far"));
            }
            if !(p.fov_deg > 0.0 && p.fov_deg < 180.0) {
                return Err(invalid(name, "fov_deg must lie in (0, 180)"));
            }
            ObjectData::VisionSensor(p)
        }
        ObjectKind::Light => {
            let light_type = od.light_type.ok_or_else(|| missing("light_type"))?;
            let cone_deg = match light_type {
                LightType::Spot => {
                    let c = od.cone_deg.ok_or_else(|| missing("cone_deg"))?;
                    if !(c > 0.0 && c < 180.0) {
                        return Err(invalid(name, "cone_deg must lie in (0, 180)"));
                    }
                    Some(c)
                }
                _ => None,
            };
            ObjectData::Light(LightParams {
                light_type,
                color: check_color(name, od.color.unwrap_or([1.0; 3]))?,
                cone_deg,
            })
        }
    })
}

#[derive(Debug, Serialize, Deserialize)]
struct SceneDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    ambient: Option<f64>,
    objects: Vec<ObjectDoc>,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum PrimitiveDoc {
    Box,
    Sphere,
    Plane,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum SizeDoc {
    Scalar(f64),
    Vector([f64; 3]),
}

impl SizeDoc {
    fn as_vector(&self) -> Vec3 {
        match *self {
            SizeDoc::Scalar(s) => Vec3::new(s, s, s),
            SizeDoc::Vector(v) => Vec3::from(v),
        }
    }

    fn as_scalar(&self) -> f64 {
        match *self {
            SizeDoc::Scalar(s) => s,
            SizeDoc::Vector(v) => v[0],
        }
    }
}

fn identity_quaternion() -> [f64; 4] {
    [1.0, 0.0, 0.0, 0.0]
}

#[derive(Debug, Serialize, Deserialize)]
struct ObjectDoc {
    name: String,
    #[serde(rename = "type")]
    kind: ObjectKind,
    #[serde(default)]
    parent: Option<String>,
    #[serde(default)]
    position: [f64; 3],
    #[serde(default = "identity_quaternion")]
    quaternion: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    primitive: Option<PrimitiveDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    size: Option<SizeDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    color: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    collision_spheres: Option<Vec<CollisionSphere>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    joint_type: Option<JointType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    axis: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    limits: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    mode: Option<JointMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_velocity: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    joint_position: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    resolution: Option<[u32; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fov_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    near: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    far: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    light_type: Option<LightType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cone_deg: Option<f64>,
}

impl Default for ObjectDoc {
    fn default() -> Self {
        Self {
            name: String::new(),
            kind: ObjectKind::Dummy,
            parent: None,
            position: [0.0; 3],
            quaternion: identity_quaternion(),
            primitive: None,
            size: None,
            color: None,
            collision_spheres: None,
            joint_type: None,
            axis: None,
            limits: None,
            mode: None,
            max_velocity: None,
            joint_position: None,
            resolution: None,
            fov_deg: None,
            near: None,
            far: None,
            light_type: None,
            cone_deg: None,
        }
    }
}
