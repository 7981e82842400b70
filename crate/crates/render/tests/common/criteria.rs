//! Acceptance checks for the renderer. Each check panics on failure and
//! returns a one-line summary of what it measured.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stepsim_core::scene::ObjectData;
use stepsim_core::{Pose, Vec3};
use stepsim_render::{
    capture_depth, capture_rgb, capture_rgb_with, render_shadow_map, shadow_visibility,
    RenderOptions, ShadowParams,
};

use super::*;

pub const DEPTH_TOL: f64 = 1e-3;
pub const DEPTH_AGREEMENT: f64 = 0.99;

/// Depth images of random primitive scenes against the analytic ray cast.
pub fn depth_vs_ray_cast(scenes: usize) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    let cam = front_camera(128, 128);
    let mut worst = 1.0f64;
    for trial in 0..scenes {
        let prims = random_prims(&mut rng);
        let mut objects = vec![cam.to_json("cam")];
        objects.extend(prims.iter().enumerate().map(|(i, p)| p.to_json(&format!("p{i}"), [1.0; 3])));
        let scene = scene_from(objects, 0.2);
        let depth = capture_depth(&scene, handle(&scene, "cam")).unwrap();
        let oracle = cam.depth_oracle(&prims);
        let (frac, checked) = depth_agreement(cam.width, cam.height, &depth.data, &oracle, DEPTH_TOL);
        assert!(frac >= DEPTH_AGREEMENT, "trial {trial}: {frac} of {checked} pixels agree");
        worst = worst.min(frac);
    }
    format!("{scenes} scenes, worst agreement {:.2}%", worst * 100.0)
}

/// Ground pixels whose shadow ray is unambiguously blocked by the sphere
/// must equal `albedo * ambient` exactly; unambiguously lit ones must carry
/// the Lambert term.
pub fn directional_umbra() -> String {
    let cam = top_camera(4.0, 256);
    let dir = Vec3::new(0.5, 0.2, -1.0).normalize();
    let sun = Pose::new(Vec3::new(0.0, 0.0, 5.0), look_along(dir));
    let ball = Prim::Sphere { center: Vec3::new(-0.6, -0.2, 0.9), radius: 0.35 };
    let albedo = [0.8, 0.6, 0.4];
    let scene = scene_from(
        vec![
            cam.to_json("cam"),
            ground().to_json("ground", albedo),
            ball.to_json("ball", [1.0; 3]),
            light_json("sun", "directional", &sun, [1.0; 3], None),
        ],
        0.25,
    );
    let img = capture_rgb(&scene, handle(&scene, "cam")).unwrap();
    let to_light = -dir;
    let lit = [0, 1, 2].map(|c| albedo[c] * (0.25 + to_light.z));
    let (mut umbra, mut lit_px) = (0, 0);
    for y in 0..cam.height {
        for x in 0..cam.width {
            let (o, d) = cam.ray(x, y);
            if first_hit(&[ball], &o, &d, cam.near, cam.far).is_some() {
                continue;
            }
            let px = img.pixel(x, y);
            match robust_shadow(&cam, x, y, &to_light, &ball) {
                Some(true) => {
                    umbra += 1;
                    assert_eq!(px, albedo.map(|a| a * 0.25), "pixel ({x},{y})");
                }
                Some(false) => {
                    lit_px += 1;
                    for c in 0..3 {
                        assert!((px[c] - lit[c]).abs() < 1e-9, "pixel ({x},{y}) {px:?}");
                    }
                }
                None => {}
            }
        }
    }
    assert!(umbra > 500 && lit_px > 20_000, "umbra {umbra}, lit {lit_px}");
    format!("{umbra} umbra pixels exactly ambient, {lit_px} lit pixels")
}

/// Ground points more than a degree outside the spot cone must be exactly
/// ambient, with and without shadows.
pub fn spot_cone_exterior() -> String {
    let cam = top_camera(4.0, 128);
    let spot = Pose::new(Vec3::new(0.3, -0.2, 2.0), look_along(Vec3::new(0.1, 0.0, -1.0)));
    let cone = 40.0;
    let objects = vec![
        cam.to_json("cam"),
        ground().to_json("ground", [1.0; 3]),
        light_json("spot", "spot", &spot, [0.7, 0.7, 0.7], Some(cone)),
    ];
    let scene = scene_from(objects, 0.1);
    let axis = spot.orientation.rotate(&Vec3::z());
    let mut total_outside = 0;
    for shadows in [true, false] {
        let opts = RenderOptions { shadows, ..RenderOptions::default() };
        let img = capture_rgb_with(&scene, handle(&scene, "cam"), &opts).unwrap();
        let (mut inside, mut outside) = (0, 0);
        for y in 0..cam.height {
            for x in 0..cam.width {
                let (o, d) = cam.ray(x, y);
                let g = o + d * (-o.z / d.z);
                let angle = axis.dot(&(g - spot.position).normalize()).clamp(-1.0, 1.0).acos();
                let px = img.pixel(x, y);
                if angle > (cone / 2.0 + 1.0).to_radians() {
                    outside += 1;
                    assert_eq!(px, [0.1; 3]);
                } else if angle < (cone / 2.0 - 1.0).to_radians() {
                    inside += 1;
                    assert!(px[0] > 0.1 + 0.5);
                }
            }
        }
        assert!(inside > 1000 && outside > 1000);
        total_outside += outside;
    }
    format!("{total_outside} exterior pixels exactly ambient")
}

/// Shadow-map visibility of random points around a point light against a
/// segment test on the occluders, skipping points within 3% of an occluder
/// silhouette.
pub fn point_light_faces(points: usize) -> String {
    let (scene, occluders) = point_light_scene();
    let map = render_shadow_map(&scene, handle(&scene, "bulb"), &ShadowParams::default()).unwrap();
    assert_eq!(map.faces.len(), 6);

    let behind = Vec3::new(2.0, 0.2, 0.0);
    let n = -behind.normalize();
    assert_eq!(map.face_for(&behind), 0);
    assert_eq!(shadow_visibility(&map, &behind, &n), 0.0);
    let mirror = Vec3::new(-2.0, 0.2, 0.0);
    assert_eq!(map.face_for(&mirror), 1);
    assert_eq!(shadow_visibility(&map, &mirror, &(-mirror.normalize())), 1.0);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut per_face = [[0usize; 2]; 6];
    let mut compared = 0;
    while compared < points {
        let dir = Vec3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        )
        .normalize();
        let p = dir * rng.random_range(0.3..3.0);
        let to_light = -p;
        let blocked = |s: f64| {
            occluders.iter().any(|o| o.scaled(s).hits(&p, &to_light).iter().any(|&t| t > 1e-6 && t < 1.0))
        };
        let (wide, narrow) = (blocked(1.03), blocked(0.97));
        if wide != narrow {
            continue;
        }
        compared += 1;
        let face = map.face_for(&p);
        let vis = shadow_visibility(&map, &p, &-dir);
        assert_eq!(vis == 0.0, wide, "point {p:?} in face {face}");
        per_face[face][wide as usize] += 1;
    }
    for (face, counts) in per_face.iter().enumerate() {
        assert!(counts[0] > 0, "face {face} never lit");
    }
    assert!(per_face[0][1] > 0 && per_face[3][1] > 0 && per_face[4][1] > 0);
    let shadowed: usize = per_face.iter().map(|c| c[1]).sum();
    format!("{points} points on 6 faces agree, {shadowed} shadowed")
}

/// Two RGB and two depth captures of a three-light scene at 256×256.
pub fn repeated_renders_bit_identical() -> String {
    let mut scene = two_light_scene();
    let cam = handle(&scene, "cam");
    if let ObjectData::VisionSensor(p) = &mut scene.object_mut(cam).unwrap().data {
        p.width = 256;
        p.height = 256;
    }
    let t = std::time::Instant::now();
    let a = capture_rgb(&scene, cam).unwrap();
    let b = capture_rgb(&scene, cam).unwrap();
    let da = capture_depth(&scene, cam).unwrap();
    let db = capture_depth(&scene, cam).unwrap();
    let elapsed = t.elapsed();
    let bits = |v: &[f64]| v.iter().map(|x| x.to_bits()).collect::<Vec<_>>();
    assert_eq!(bits(&a.data), bits(&b.data));
    assert_eq!(bits(&da.data), bits(&db.data));
    assert!(elapsed.as_secs() < 120, "{elapsed:?}");
    format!("256x256 rgb and depth bit-identical, 4 captures in {:.2} s", elapsed.as_secs_f64())
}
