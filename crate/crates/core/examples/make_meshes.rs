//! Regenerates the bundled convex meshes in `assets/meshes`.
//!
//! ```text
//! cargo run -p gjk-accel --example make_meshes [OUT_DIR]
//! ```

use std::f64::consts::{PI, TAU};
use std::path::PathBuf;

use gjk_accel::hull::convex_hull;
use gjk_accel::obj::write_obj;
use gjk_accel::Vec3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fibonacci_sphere(n: usize) -> Vec<Vec3> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let r = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            Vec3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}

fn scaled(points: Vec<Vec3>, s: Vec3) -> Vec<Vec3> {
    points.into_iter().map(|p| p.component_mul(&s)).collect()
}

fn cube(h: f64) -> Vec<Vec3> {
    let mut v = Vec::new();
    for &x in &[-h, h] {
        for &y in &[-h, h] {
            for &z in &[-h, h] {
                v.push(Vec3::new(x, y, z));
            }
        }
    }
    v
}

fn cylinder(radius: f64, half_height: f64, segments: usize) -> Vec<Vec3> {
    let mut v = Vec::new();
    for &z in &[-half_height, half_height] {
        for i in 0..segments {
            let a = TAU * i as f64 / segments as f64;
            v.push(Vec3::new(radius * a.cos(), radius * a.sin(), z));
        }
    }
    v
}

/// Superellipsoid surface `|x/a|^(2/e) + |y/b|^(2/e) + |z/c|^(2/e) = 1`.
fn superquadric(n: usize, e: f64, s: Vec3) -> Vec<Vec3> {
    let f = |c: f64| c.signum() * c.abs().powf(e);
    fibonacci_sphere(n)
        .into_iter()
        .map(|p| p.map(f).component_mul(&s))
        .collect()
}

fn capsule(radius: f64, half_length: f64, n: usize) -> Vec<Vec3> {
    fibonacci_sphere(n)
        .into_iter()
        .map(|p| {
            let shift = if p.z >= 0.0 { half_length } else { -half_length };
            Vec3::new(p.x * radius, p.y * radius, p.z * radius + shift)
        })
        .collect()
}

fn rock(rng: &mut ChaCha8Rng, n: usize, size: Vec3) -> Vec<Vec3> {
    (0..n)
        .map(|_| {
            let d = loop {
                let v = Vec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                );
                let n2 = v.norm_squared();
                if n2 > 1e-6 && n2 <= 1.0 {
                    break v / n2.sqrt();
                }
            };
            d.component_mul(&size) * rng.random_range(0.8..1.0)
        })
        .collect()
}

fn main() -> gjk_accel::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/assets/meshes")));
    std::fs::create_dir_all(&out).map_err(|e| gjk_accel::Error::Io {
        path: out.clone(),
        source: e,
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    let meshes: Vec<(&str, Vec<Vec3>)> = vec![
        ("cube", cube(0.25)),
        ("rock", rock(&mut rng, 40, Vec3::new(0.3, 0.2, 0.15))),
        ("cylinder", cylinder(0.1, 0.3, 32)),
        ("pebble", scaled(fibonacci_sphere(42), Vec3::new(0.06, 0.04, 0.03))),
        ("capsule", capsule(0.08, 0.2, 400)),
        ("cloud", rock(&mut rng, 600, Vec3::new(0.5, 0.35, 0.25))),
        ("bean", scaled(fibonacci_sphere(642), Vec3::new(0.4, 0.15, 0.1))),
        ("superquadric", superquadric(1000, 0.4, Vec3::new(0.3, 0.3, 0.2))),
        ("disc", scaled(fibonacci_sphere(2562), Vec3::new(0.8, 0.8, 0.12))),
        ("blob", scaled(fibonacci_sphere(5000), Vec3::new(1.0, 0.6, 0.45))),
    ];

    for (name, points) in meshes {
        let hull = convex_hull(&points)?;
        let path = out.join(format!("{name}.obj"));
        write_obj(&path, &hull.vertices, &hull.faces)?;
        println!("{:>14}: {:5} vertices {:5} faces", name, hull.vertices.len(), hull.faces.len());
    }
    Ok(())
}
