//! Triangle meshes for the built-in primitives.
//!
//! Tessellation counts are fixed so rendered output is reproducible: box = 12
//! triangles, plane = 2, sphere = 1280 (icosahedron subdivided three times).

use std::collections::HashMap;

use crate::math::Vec3;

pub const ICOSPHERE_SUBDIVISIONS: u32 = 3;

/// Indexed triangle mesh in the owning shape's local frame.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub positions: Vec<Vec3>,
    pub normals: Vec<Vec3>,
    pub triangles: Vec<[u32; 3]>,
}

impl Mesh {
    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    /// Axis-aligned box with full extents `size`, centred on the origin.
    pub fn cuboid(size: &Vec3) -> Mesh {
        let h = size * 0.5;
        let mut mesh = Mesh {
            positions: Vec::with_capacity(24),
            normals: Vec::with_capacity(24),
            triangles: Vec::with_capacity(12),
        };
        // (normal, u axis, v axis) per face, u × v = normal
        let faces = [
            (Vec3::x(), Vec3::y(), Vec3::z()),
            (-Vec3::x(), Vec3::z(), Vec3::y()),
            (Vec3::y(), Vec3::z(), Vec3::x()),
            (-Vec3::y(), Vec3::x(), Vec3::z()),
            (Vec3::z(), Vec3::x(), Vec3::y()),
            (-Vec3::z(), Vec3::y(), Vec3::x()),
        ];
        for (n, u, v) in faces {
            let base = mesh.positions.len() as u32;
            let centre = n.component_mul(&h);
            let du = u.component_mul(&h);
            let dv = v.component_mul(&h);
            for (su, sv) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
                mesh.positions.push(centre + du * su + dv * sv);
                mesh.normals.push(n);
            }
            mesh.triangles.push([base, base + 1, base + 2]);
            mesh.triangles.push([base, base + 2, base + 3]);
        }
        mesh
    }

    /// Rectangle in the local xy plane with normal +z.
    pub fn plane(size_x: f64, size_y: f64) -> Mesh {
        let (hx, hy) = (size_x * 0.5, size_y * 0.5);
        Mesh {
            positions: vec![
                Vec3::new(-hx, -hy, 0.0),
                Vec3::new(hx, -hy, 0.0),
                Vec3::new(hx, hy, 0.0),
                Vec3::new(-hx, hy, 0.0),
            ],
            normals: vec![Vec3::z(); 4],
            triangles: vec![[0, 1, 2], [0, 2, 3]],
        }
    }

    /// Icosphere with smooth vertex normals; every vertex lies on the sphere.
    pub fn icosphere(radius: f64, subdivisions: u32) -> Mesh {
        let t = (1.0 + 5f64.sqrt()) / 2.0;
        let mut verts: Vec<Vec3> = [
            (-1.0, t, 0.0),
            (1.0, t, 0.0),
            (-1.0, -t, 0.0),
            (1.0, -t, 0.0),
            (0.0, -1.0, t),
            (0.0, 1.0, t),
            (0.0, -1.0, -t),
            (0.0, 1.0, -t),
            (t, 0.0, -1.0),
            (t, 0.0, 1.0),
            (-t, 0.0, -1.0),
            (-t, 0.0, 1.0),
        ]
        .iter()
        .map(|&(x, y, z)| Vec3::new(x, y, z).normalize())
        .collect();
        let mut tris: Vec<[u32; 3]> = vec![
            [0, 11, 5],
            [0, 5, 1],
            [0, 1, 7],
            [0, 7, 10],
            [0, 10, 11],
            [1, 5, 9],
            [5, 11, 4],
            [11, 10, 2],
            [10, 7, 6],
            [7, 1, 8],
            [3, 9, 4],
            [3, 4, 2],
            [3, 2, 6],
            [3, 6, 8],
            [3, 8, 9],
            [4, 9, 5],
            [2, 4, 11],
            [6, 2, 10],
            [8, 6, 7],
            [9, 8, 1],
        ];
        for _ in 0..subdivisions {
            let mut midpoints: HashMap<(u32, u32), u32> = HashMap::new();
            let mut midpoint = |a: u32, b: u32, verts: &mut Vec<Vec3>| -> u32 {
                let key = (a.min(b), a.max(b));
                *midpoints.entry(key).or_insert_with(|| {
                    let m = (verts[a as usize] + verts[b as usize]).normalize();
                    verts.push(m);
                    (verts.len() - 1) as u32
                })
            };
            let mut next = Vec::with_capacity(tris.len() * 4);
            for [a, b, c] in tris {
                let ab = midpoint(a, b, &mut verts);
                let bc = midpoint(b, c, &mut verts);
                let ca = midpoint(c, a, &mut verts);
                next.push([a, ab, ca]);
                next.push([b, bc, ab]);
                next.push([c, ca, bc]);
                next.push([ab, bc, ca]);
            }
            tris = next;
        }
        Mesh {
            positions: verts.iter().map(|v| v * radius).collect(),
            normals: verts,
            triangles: tris,
        }
    }
}
