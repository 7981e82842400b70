//! Acceptance checks for the socket API. Each check panics on failure and
//! returns a one-line summary of what it measured.

use std::time::Duration;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepsim_core::{Handle, Simulator};
use stepsim_remote::{decode_frame, encode_frame, Cadence, Client, FrameError, Opcode, Request, Server};

use super::*;

/// Depth bits and RGB bytes from the demo camera.
pub fn final_buffers(sim: &Simulator) -> (Vec<u64>, Vec<u8>) {
    let cam = Handle(17);
    let depth = stepsim_render::capture_depth(sim.scene(), cam).unwrap();
    let rgb = stepsim_render::capture_rgb(sim.scene(), cam).unwrap();
    (depth.data.iter().map(|d| d.to_bits()).collect(), rgb.to_rgb8())
}

/// Runs random scripts through [`run_direct`] and through a served
/// simulator, then compares every response, the full state and the camera
/// buffers.
pub fn script_equivalence(seeds: u64, commands: usize) -> String {
    let mut steps = 0;
    for seed in 0..seeds {
        let script = random_script(&mut ChaCha8Rng::seed_from_u64(seed), commands);

        let mut local = demo_sim();
        let expected: Vec<_> = script.iter().map(|r| run_direct(&mut local, r)).collect();
        assert!(local.step_count() > 50);
        steps += local.step_count();

        let cadence = Cadence::FixedInterval(Duration::from_millis(1));
        let server = Server::serve(demo_sim(), "127.0.0.1:0", cadence).unwrap();
        let mut client = Client::connect(server.local_addr()).unwrap();
        let got: Vec<_> = script.iter().map(|r| client.request(r).ok()).collect();
        drop(client);
        let remote = server.into_simulator();

        for (i, (g, e)) in got.iter().zip(&expected).enumerate() {
            assert_eq!(g, e, "seed {seed}, command {i}: {:?}", script[i]);
        }
        assert_eq!(state_bits(&remote), state_bits(&local));
        assert_eq!(final_buffers(&remote), final_buffers(&local));
    }
    format!("{seeds} scripts x {commands} commands ({steps} steps), state and buffers bit-identical")
}

/// Encodes random frames and decodes them back, then decodes arbitrary
/// byte strings and checks each outcome is one of the documented ones.
pub fn frame_fuzz(cases: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..cases {
        let opcode = Opcode::ALL[rng.random_range(0..Opcode::ALL.len())];
        let id: u32 = rng.random();
        let len = if rng.random_bool(0.05) {
            rng.random_range(0..4096)
        } else {
            rng.random_range(0..64)
        };
        let payload: Vec<u8> = (0..len).map(|_| rng.random()).collect();
        let bytes = encode_frame(opcode, id, &payload);
        assert_eq!(bytes.len(), 9 + len);
        let (frame, used) = decode_frame(&bytes).unwrap();
        assert_eq!(used, bytes.len());
        assert_eq!((frame.opcode, frame.request_id), (opcode, id));
        assert_eq!(frame.payload, payload);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut outcomes = [0usize; 4];
    for _ in 0..cases {
        let len = rng.random_range(0..40);
        let mut bytes: Vec<u8> = (0..len).map(|_| rng.random()).collect();
        if bytes.len() >= 4 && rng.random_bool(0.5) {
            let small = rng.random_range(0..48u32);
            bytes[0..4].copy_from_slice(&small.to_le_bytes());
        }
        let k = match decode_frame(&bytes) {
            Ok((frame, used)) => {
                assert_eq!(used, 9 + frame.payload.len());
                if let Ok(req) = Request::decode(frame.opcode, &frame.payload) {
                    assert_eq!(Request::decode(req.opcode(), &req.encode_payload()), Ok(req));
                }
                0
            }
            Err(FrameError::TruncatedFrame { needed, available }) => {
                assert!(available < needed && available == bytes.len());
                1
            }
            Err(FrameError::FrameTooLarge(n)) => {
                assert!(n > stepsim_remote::MAX_PAYLOAD);
                2
            }
            Err(FrameError::UnknownOpcode { opcode, .. }) => {
                assert!(Opcode::from_u8(opcode).is_none());
                3
            }
        };
        outcomes[k] += 1;
    }
    assert!(outcomes.iter().all(|&n| n > 0), "{outcomes:?}");
    format!(
        "{cases} round trips, {cases} arbitrary decodes (ok {}, truncated {}, too large {}, unknown opcode {})",
        outcomes[0], outcomes[1], outcomes[2], outcomes[3]
    )
}
