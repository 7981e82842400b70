//! Typed requests and responses, and their execution against a simulator.

use stepsim_core::kinematics::{current_q, get_tip_pose};
use stepsim_core::{
    plan_rrt_connect, solve_ik, ArmDescriptor, CollisionWorld, Handle, IkParams, KinematicsError,
    PlanError, PlanningParams, Pose, Quaternion, Scene, SceneError, SimError, Simulator, Vec3,
};
use stepsim_render::{capture_depth, capture_rgb, RenderError};

use crate::protocol::{Opcode, PayloadError, PayloadReader, PayloadWriter, Status};

#[derive(Debug, Clone, PartialEq)]
pub enum Request {
    Step,
    /// `relative_to` is sent as handle 0 when absent.
    GetPosition {
        handle: Handle,
        relative_to: Option<Handle>,
    },
    SetPosition {
        handle: Handle,
        relative_to: Option<Handle>,
        position: [f64; 3],
    },
    SetJointTargetVelocity {
        handle: Handle,
        velocity: f64,
    },
    CaptureRgb {
        sensor: Handle,
    },
    CaptureDepth {
        sensor: Handle,
    },
    GetHandle {
        name: String,
    },
    Start,
    Stop,
    /// Scene document text.
    LoadScene {
        json: String,
    },
    /// Solves from the arm's current joint positions. An empty orientation
    /// vector on the wire requests a position-only solve.
    SolveIk {
        tip: Handle,
        position: [f64; 3],
        orientation: Option<[f64; 4]>,
    },
    /// Plans from the arm's current joint positions.
    PlanPath {
        tip: Handle,
        goal: Vec<f64>,
        seed: u32,
    },
}

fn handle_or_none(h: u32) -> Option<Handle> {
    (h != 0).then_some(Handle(h))
}

impl Request {
    pub fn opcode(&self) -> Opcode {
        match self {
            Request::Step => Opcode::Step,
            Request::GetPosition { .. } => Opcode::GetPosition,
            Request::SetPosition { .. } => Opcode::SetPosition,
            Request::SetJointTargetVelocity { .. } => Opcode::SetJointTargetVelocity,
            Request::CaptureRgb { .. } => Opcode::CaptureRgb,
            Request::CaptureDepth { .. } => Opcode::CaptureDepth,
            Request::GetHandle { .. } => Opcode::GetHandle,
            Request::Start => Opcode::Start,
            Request::Stop => Opcode::Stop,
            Request::LoadScene { .. } => Opcode::LoadScene,
            Request::SolveIk { .. } => Opcode::SolveIk,
            Request::PlanPath { .. } => Opcode::PlanPath,
        }
    }

    pub fn encode_payload(&self) -> Vec<u8> {
        let w = PayloadWriter::new();
        let rel = |r: &Option<Handle>| r.map_or(0, |h| h.0);
        match self {
            Request::Step | Request::Start | Request::Stop => w,
            Request::GetPosition {
                handle,
                relative_to,
            } => w.u32(handle.0).u32(rel(relative_to)),
            Request::SetPosition {
                handle,
                relative_to,
                position,
            } => w.u32(handle.0).u32(rel(relative_to)).vector(position),
            Request::SetJointTargetVelocity { handle, velocity } => {
                w.u32(handle.0).f64(*velocity)
            }
            Request::CaptureRgb { sensor } | Request::CaptureDepth { sensor } => w.u32(sensor.0),
            Request::GetHandle { name } => w.string(name),
            Request::LoadScene { json } => w.string(json),
            Request::SolveIk {
                tip,
                position,
                orientation,
            } => w
                .u32(tip.0)
                .vector(position)
                .vector(orientation.as_ref().map_or(&[][..], |q| &q[..])),
            Request::PlanPath { tip, goal, seed } => w.u32(tip.0).vector(goal).u32(*seed),
        }
        .finish()
    }

    pub fn decode(opcode: Opcode, payload: &[u8]) -> Result<Request, PayloadError> {
        let mut r = PayloadReader::new(payload);
        let req = match opcode {
            Opcode::Step => Request::Step,
            Opcode::Start => Request::Start,
            Opcode::Stop => Request::Stop,
            Opcode::GetPosition => Request::GetPosition {
                handle: Handle(r.u32()?),
                relative_to: handle_or_none(r.u32()?),
            },
            Opcode::SetPosition => Request::SetPosition {
                handle: Handle(r.u32()?),
                relative_to: handle_or_none(r.u32()?),
                position: r.fixed_vector()?,
            },
            Opcode::SetJointTargetVelocity => Request::SetJointTargetVelocity {
                handle: Handle(r.u32()?),
                velocity: r.f64()?,
            },
            Opcode::CaptureRgb => Request::CaptureRgb {
                sensor: Handle(r.u32()?),
            },
            Opcode::CaptureDepth => Request::CaptureDepth {
                sensor: Handle(r.u32()?),
            },
            Opcode::GetHandle => Request::GetHandle { name: r.string()? },
            Opcode::LoadScene => Request::LoadScene { json: r.string()? },
            Opcode::SolveIk => {
                let tip = Handle(r.u32()?);
                let position = r.fixed_vector()?;
                let q = r.vector()?;
                let orientation = match q.len() {
                    0 => None,
                    4 => Some([q[0], q[1], q[2], q[3]]),
                    got => return Err(PayloadError::BadLength { expected: 4, got }),
                };
                Request::SolveIk {
                    tip,
                    position,
                    orientation,
                }
            }
            Opcode::PlanPath => Request::PlanPath {
                tip: Handle(r.u32()?),
                goal: r.vector()?,
                seed: r.u32()?,
            },
        };
        r.finish()?;
        Ok(req)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Response {
    Empty,
    Position([f64; 3]),
    Handle(Handle),
    /// Row-major RGB, one byte per channel.
    Rgb {
        width: u32,
        height: u32,
        data: Vec<u8>,
    },
    /// Row-major metric depth.
    Depth {
        width: u32,
        height: u32,
        data: Vec<f64>,
    },
    Joints(Vec<f64>),
    Path(Vec<Vec<f64>>),
}

impl Response {
    /// Body bytes following the status byte.
    pub fn encode_body(&self) -> Vec<u8> {
        let w = PayloadWriter::new();
        match self {
            Response::Empty => w,
            Response::Position(p) => w.vector(p),
            Response::Handle(h) => w.u32(h.0),
            Response::Rgb {
                width,
                height,
                data,
            } => w.u32(*width).u32(*height).bytes(data),
            Response::Depth {
                width,
                height,
                data,
            } => data
                .iter()
                .fold(w.u32(*width).u32(*height), |w, d| w.f64(*d)),
            Response::Joints(q) => w.vector(q),
            Response::Path(path) => path.iter().fold(w.u32(path.len() as u32), |w, q| w.vector(q)),
        }
        .finish()
    }

    /// Decodes the body of a successful response to `opcode`.
    pub fn decode_body(opcode: Opcode, body: &[u8]) -> Result<Response, PayloadError> {
        let mut r = PayloadReader::new(body);
        let resp = match opcode {
            Opcode::Step
            | Opcode::SetPosition
            | Opcode::SetJointTargetVelocity
            | Opcode::Start
            | Opcode::Stop
            | Opcode::LoadScene => Response::Empty,
            Opcode::GetPosition => Response::Position(r.fixed_vector()?),
            Opcode::GetHandle => Response::Handle(Handle(r.u32()?)),
            Opcode::CaptureRgb => {
                let (width, height) = (r.u32()?, r.u32()?);
                let n = (width as usize)
                    .checked_mul(height as usize)
                    .and_then(|n| n.checked_mul(3))
                    .ok_or(PayloadError::Truncated)?;
                Response::Rgb {
                    width,
                    height,
                    data: r.take(n)?.to_vec(),
                }
            }
            Opcode::CaptureDepth => {
                let (width, height) = (r.u32()?, r.u32()?);
                let n = (width as usize)
                    .checked_mul(height as usize)
                    .ok_or(PayloadError::Truncated)?;
                if n > r.remaining() / 8 {
                    return Err(PayloadError::Truncated);
                }
                Response::Depth {
                    width,
                    height,
                    data: (0..n).map(|_| r.f64()).collect::<Result<_, _>>()?,
                }
            }
            Opcode::SolveIk => Response::Joints(r.vector()?),
            Opcode::PlanPath => {
                let n = r.u32()? as usize;
                if n > r.remaining() / 4 {
                    return Err(PayloadError::Truncated);
                }
                Response::Path((0..n).map(|_| r.vector()).collect::<Result<_, _>>()?)
            }
        };
        r.finish()?;
        Ok(resp)
    }
}

/// Failed request: status plus a human-readable message.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub status: Status,
    pub message: String,
}

impl Failure {
    pub fn new(status: Status, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

fn scene_status(e: &SceneError) -> Status {
    match e {
        SceneError::UnknownHandle(_) | SceneError::NotFound(_) => Status::NotFound,
        _ => Status::BadArgs,
    }
}

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let status = match &e {
            SimError::NotRunning => Status::SimNotRunning,
            SimError::WrongMode { .. } => Status::WrongMode,
            SimError::Scene(s) => scene_status(s),
            SimError::Kinematics(KinematicsError::Scene(s)) => scene_status(s),
            SimError::Io { .. } => Status::Internal,
            _ => Status::BadArgs,
        };
        Failure::new(status, e.to_string())
    }
}

impl From<SceneError> for Failure {
    fn from(e: SceneError) -> Self {
        Failure::new(scene_status(&e), e.to_string())
    }
}

impl From<KinematicsError> for Failure {
    fn from(e: KinematicsError) -> Self {
        match e {
            KinematicsError::Scene(s) => s.into(),
            other => Failure::new(Status::BadArgs, other.to_string()),
        }
    }
}

impl From<PlanError> for Failure {
    fn from(e: PlanError) -> Self {
        match e {
            PlanError::Scene(s) => s.into(),
            other => Failure::new(Status::BadArgs, other.to_string()),
        }
    }
}

impl From<RenderError> for Failure {
    fn from(e: RenderError) -> Self {
        match e {
            RenderError::Scene(s) => s.into(),
            other => Failure::new(Status::BadArgs, other.to_string()),
        }
    }
}

fn finite(values: &[f64]) -> Result<(), Failure> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Failure::new(Status::BadArgs, "non-finite argument"))
    }
}

fn arm_for_tip(scene: &Scene, tip: Handle) -> Result<ArmDescriptor, Failure> {
    Ok(ArmDescriptor::from_scene(scene, tip)?)
}

/// Runs one request on the simulator's own thread.
pub fn execute(sim: &mut Simulator, request: &Request) -> Result<Response, Failure> {
    match request {
        Request::Step => {
            sim.advance()?;
            Ok(Response::Empty)
        }
        Request::Start => {
            sim.start()?;
            Ok(Response::Empty)
        }
        Request::Stop => {
            sim.stop();
            Ok(Response::Empty)
        }
        Request::GetPosition {
            handle,
            relative_to,
        } => {
            let p = sim.get_position(*handle, *relative_to)?;
            Ok(Response::Position([p.x, p.y, p.z]))
        }
        Request::SetPosition {
            handle,
            relative_to,
            position,
        } => {
            finite(position)?;
            sim.set_position(*handle, Vec3::from(*position), *relative_to)?;
            Ok(Response::Empty)
        }
        Request::SetJointTargetVelocity { handle, velocity } => {
            finite(&[*velocity])?;
            sim.set_joint_target_velocity(*handle, *velocity)?;
            Ok(Response::Empty)
        }
        Request::CaptureRgb { sensor } => {
            let img = capture_rgb(sim.scene(), *sensor)?;
            Ok(Response::Rgb {
                width: img.width,
                height: img.height,
                data: img.to_rgb8(),
            })
        }
        Request::CaptureDepth { sensor } => {
            let img = capture_depth(sim.scene(), *sensor)?;
            Ok(Response::Depth {
                width: img.width,
                height: img.height,
                data: img.data,
            })
        }
        Request::GetHandle { name } => Ok(Response::Handle(sim.get_object_by_name(name)?)),
        Request::LoadScene { json } => {
            let scene = Scene::from_json(json)?;
            sim.load_scene(scene);
            Ok(Response::Empty)
        }
        Request::SolveIk {
            tip,
            position,
            orientation,
        } => {
            finite(position)?;
            let arm = arm_for_tip(sim.scene(), *tip)?;
            let q0 = current_q(sim.scene(), &arm)?;
            let target_orientation = match orientation {
                Some(q) => {
                    finite(q)?;
                    Quaternion::new_normalize(q[0], q[1], q[2], q[3])
                }
                None => get_tip_pose(sim.scene(), &arm)?.orientation,
            };
            let params = IkParams {
                position_only: orientation.is_none(),
                ..IkParams::default()
            };
            let target = Pose::new(Vec3::from(*position), target_orientation);
            Ok(Response::Joints(solve_ik(&arm, &target, &q0, &params)?.q))
        }
        Request::PlanPath { tip, goal, seed } => {
            finite(goal)?;
            let arm = arm_for_tip(sim.scene(), *tip)?;
            let start = current_q(sim.scene(), &arm)?;
            let world = CollisionWorld::from_scene(sim.scene(), &arm)?;
            let params = PlanningParams {
                seed: u64::from(*seed),
                ..PlanningParams::default()
            };
            Ok(Response::Path(plan_rrt_connect(
                &arm, &start, goal, &world, &params,
            )?))
        }
    }
}

/// Response payload: status byte, then the body on success or a message
/// string on failure.
pub fn response_payload(result: &Result<Response, Failure>) -> Vec<u8> {
    match result {
        Ok(resp) => {
            let mut out = vec![Status::Ok as u8];
            out.extend(resp.encode_body());
            out
        }
        Err(f) => PayloadWriter::new()
            .u8(f.status as u8)
            .string(&f.message)
            .finish(),
    }
}

/// Inverse of [`response_payload`] for a request with `opcode`.
pub fn parse_response(opcode: Opcode, payload: &[u8]) -> Result<Result<Response, Failure>, PayloadError> {
    let Some((&status, body)) = payload.split_first() else {
        return Err(PayloadError::Truncated);
    };
    let status = Status::from_u8(status).ok_or(PayloadError::BadStatus(status))?;
    if status == Status::Ok {
        return Response::decode_body(opcode, body).map(Ok);
    }
    let mut r = PayloadReader::new(body);
    let message = r.string()?;
    r.finish()?;
    Ok(Err(Failure { status, message }))
}
