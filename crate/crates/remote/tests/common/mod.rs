//! Random command scripts and an in-process interpreter used as the oracle
//! for wire-level tests.
#![allow(dead_code)]

pub mod criteria;

use rand::Rng;
use stepsim_core::kinematics::current_q;
use stepsim_core::scene::ObjectData;
use stepsim_core::{
    plan_rrt_connect, solve_ik, ArmDescriptor, CollisionWorld, Handle, IkParams, PlanningParams,
    Pose, Quaternion, Scene, Simulator, Vec3,
};
use stepsim_remote::{Request, Response};

pub const DEMO: &str = include_str!("../../../../scenes/demo.json");
pub const GAP_WALL: &str = include_str!("../../../../scenes/gap_wall.json");

pub fn demo_sim() -> Simulator {
    Simulator::new(Scene::from_json(DEMO).unwrap(), true)
}

const NAMES: [&str; 8] = [
    "target", "tip", "joint3", "my_camera", "sun", "floor", "missing", "",
];

fn pick<T: Copy>(rng: &mut impl Rng, items: &[T]) -> T {
    items[rng.random_range(0..items.len())]
}

/// Script over the demo scene. Mixes valid and invalid requests so that
/// error paths are part of the comparison.
pub fn random_script(rng: &mut impl Rng, n: usize) -> Vec<Request> {
    let joints = [4u32, 6, 8, 10, 12, 14];
    let movable = [2u32, 3, 17, 18, 16, 4, 99];
    let mut script = vec![Request::Start];
    while script.len() < n {
        let roll = rng.random_range(0..100);
        let rel = |rng: &mut dyn rand::RngCore| {
            if rng.random_bool(0.6) {
                None
            } else {
                Some(Handle(rng.random_range(1..=19)))
            }
        };
        let req = match roll {
            0..30 => Request::Step,
            30..50 => Request::SetJointTargetVelocity {
                handle: Handle(if rng.random_bool(0.9) {
                    pick(rng, &joints)
                } else {
                    pick(rng, &[5u32, 99])
                }),
                velocity: rng.random_range(-3.0..3.0),
            },
            50..60 => Request::SetPosition {
                handle: Handle(pick(rng, &movable)),
                relative_to: rel(rng),
                position: [
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(0.0..1.5),
                ],
            },
            60..70 => Request::GetPosition {
                handle: Handle(rng.random_range(1..=20)),
                relative_to: rel(rng),
            },
            70..74 => Request::CaptureDepth {
                sensor: Handle(if rng.random_bool(0.9) { 17 } else { 2 }),
            },
            74..78 => Request::CaptureRgb {
                sensor: Handle(if rng.random_bool(0.9) { 17 } else { 18 }),
            },
            78..83 => Request::GetHandle {
                name: pick(rng, &NAMES).to_owned(),
            },
            83..85 => Request::Stop,
            85..89 => Request::Start,
            89..97 => Request::SolveIk {
                tip: Handle(if rng.random_bool(0.95) { 16 } else { 2 }),
                position: [
                    rng.random_range(-0.5..0.5),
                    rng.random_range(-0.5..0.5),
                    rng.random_range(0.3..1.0),
                ],
                orientation: None,
            },
            _ => Request::PlanPath {
                tip: Handle(16),
                goal: (0..6).map(|_| rng.random_range(-1.5..1.5)).collect(),
                seed: rng.random(),
            },
        };
        script.push(req);
    }
    script
}

/// Executes a request through the public in-process API. Errors are
/// reported as `None`.
pub fn run_direct(sim: &mut Simulator, req: &Request) -> Option<Response> {
    match req {
        Request::Step => sim.step().ok().map(|_| Response::Empty),
        Request::Start => sim.start().ok().map(|_| Response::Empty),
        Request::Stop => {
            sim.stop();
            Some(Response::Empty)
        }
        Request::GetPosition {
            handle,
            relative_to,
        } => sim
            .get_position(*handle, *relative_to)
            .ok()
            .map(|p| Response::Position([p.x, p.y, p.z])),
        Request::SetPosition {
            handle,
            relative_to,
            position,
        } => sim
            .set_position(*handle, Vec3::from(*position), *relative_to)
            .ok()
            .map(|_| Response::Empty),
        Request::SetJointTargetVelocity { handle, velocity } => sim
            .set_joint_target_velocity(*handle, *velocity)
            .ok()
            .map(|_| Response::Empty),
        Request::CaptureRgb { sensor } => stepsim_render::capture_rgb(sim.scene(), *sensor)
            .ok()
            .map(|img| Response::Rgb {
                width: img.width,
                height: img.height,
                data: img.to_rgb8(),
            }),
        Request::CaptureDepth { sensor } => stepsim_render::capture_depth(sim.scene(), *sensor)
            .ok()
            .map(|img| Response::Depth {
                width: img.width,
                height: img.height,
                data: img.data,
            }),
        Request::GetHandle { name } => sim.get_object_by_name(name).ok().map(Response::Handle),
        Request::LoadScene { json } => {
            let scene = Scene::from_json(json).ok()?;
            sim.load_scene(scene);
            Some(Response::Empty)
        }
        Request::SolveIk {
            tip,
            position,
            orientation,
        } => {
            let arm = ArmDescriptor::from_scene(sim.scene(), *tip).ok()?;
            let q0 = current_q(sim.scene(), &arm).ok()?;
            let (rot, position_only) = match orientation {
                Some(q) => (Quaternion::new_normalize(q[0], q[1], q[2], q[3]), false),
                None => (sim.get_tip_pose(&arm).ok()?.orientation, true),
            };
            let params = IkParams {
                position_only,
                ..IkParams::default()
            };
            let target = Pose::new(Vec3::from(*position), rot);
            solve_ik(&arm, &target, &q0, &params)
                .ok()
                .map(|s| Response::Joints(s.q))
        }
        Request::PlanPath { tip, goal, seed } => {
            let arm = ArmDescriptor::from_scene(sim.scene(), *tip).ok()?;
            let q0 = current_q(sim.scene(), &arm).ok()?;
            let world = CollisionWorld::from_scene(sim.scene(), &arm).ok()?;
            let params = PlanningParams {
                seed: u64::from(*seed),
                ..PlanningParams::default()
            };
            plan_rrt_connect(&arm, &q0, goal, &world, &params)
                .ok()
                .map(Response::Path)
        }
    }
}

/// Bit patterns of every joint state and object world pose.
pub fn state_bits(sim: &Simulator) -> Vec<u64> {
    let scene = sim.scene();
    let mut out = vec![sim.step_count(), sim.phase() as u64];
    for obj in scene.objects() {
        let pose = scene.world_pose(obj.handle).unwrap();
        let p = pose.position;
        let q = pose.orientation;
        out.extend([p.x, p.y, p.z, q.w, q.x, q.y, q.z].map(f64::to_bits));
        if let ObjectData::Joint(j) = &obj.data {
            out.extend([j.state.q, j.state.v_target, j.state.q_target].map(f64::to_bits));
        }
    }
    out
}

/// Byte stream for one fuzz connection: a mix of well-formed requests,
/// mutated frames, unknown opcodes, id regressions and garbage.
pub fn fuzz_stream(rng: &mut impl Rng) -> Vec<u8> {
    let mut out = Vec::new();
    let mut id: u32 = rng.random_range(0..4);
    for _ in 0..rng.random_range(1..12) {
        let req = random_script(rng, 2).pop().unwrap();
        let mut payload = req.encode_payload();
        let mut opcode = req.opcode() as u8;
        match rng.random_range(0..10) {
            0 => opcode = rng.random_range(0x0D..=0xFF),
            1 if !payload.is_empty() => {
                let i = rng.random_range(0..payload.len());
                payload[i] ^= 1 << rng.random_range(0..8);
            }
            2 => payload.truncate(rng.random_range(0..=payload.len())),
            3 => payload.push(rng.random()),
            4 => id = id.saturating_sub(rng.random_range(0..3)),
            _ => {}
        }
        let mut frame = Vec::with_capacity(9 + payload.len());
        frame.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        frame.push(opcode);
        frame.extend_from_slice(&id.to_le_bytes());
        frame.extend_from_slice(&payload);
        out.extend(frame);
        id = id.wrapping_add(rng.random_range(1..3));
    }
    match rng.random_range(0..4) {
        0 => out.truncate(rng.random_range(0..=out.len())),
        1 => out.extend((0..rng.random_range(1..40)).map(|_| rng.random::<u8>())),
        _ => {}
    }
    out
}

/// Requests the server must execute for `stream`, derived from the framing
/// rules alone: a frame needs nine header bytes, a length of at most
/// 64 MiB, all of its payload, and an id above the previous one. Unknown
/// opcodes are skipped; the first frame with an undecodable payload or a
/// non-increasing id ends the connection.
pub fn accepted_requests(stream: &[u8]) -> Vec<Request> {
    let mut out = Vec::new();
    let mut rest = stream;
    let mut last: Option<u32> = None;
    while rest.len() >= 9 {
        let len = u32::from_le_bytes(rest[0..4].try_into().unwrap()) as usize;
        if len > 64 * 1024 * 1024 || rest.len() < 9 + len {
            break;
        }
        let op = rest[4];
        let id = u32::from_le_bytes(rest[5..9].try_into().unwrap());
        let payload = &rest[9..9 + len];
        rest = &rest[9 + len..];
        if last.is_some_and(|l| id <= l) {
            break;
        }
        last = Some(id);
        if !(0x01..=0x0C).contains(&op) {
            continue;
        }
        let opcode = stepsim_remote::Opcode::from_u8(op).unwrap();
        match Request::decode(opcode, payload) {
            Ok(r) => out.push(r),
            Err(_) => break,
        }
    }
    out
}
