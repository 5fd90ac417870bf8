//! Parsing of inline shape and vector arguments.

use std::path::Path;

use gjk_accel::benchgen::load_convex_mesh;
use gjk_accel::{ConvexShape, Cuboid, Ellipsoid, Sphere, Vec3};

/// Parses `x,y,z`.
pub fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected `x,y,z`, got `{s}`"));
    }
    let mut v = [0.0; 3];
    for (slot, p) in v.iter_mut().zip(&parts) {
        *slot = p
            .parse::<f64>()
            .map_err(|e| format!("bad number `{p}` in `{s}`: {e}"))?;
        if !slot.is_finite() {
            return Err(format!("non-finite component in `{s}`"));
        }
    }
    Ok(Vec3::new(v[0], v[1], v[2]))
}

/// Parses `sphere:R`, `box:hx,hy,hz`, `ellipsoid:a,b,c` (semi-axes) or
/// `mesh:PATH` (convex hull of the OBJ vertices).
pub fn parse_shape(s: &str) -> Result<ConvexShape, String> {
    let (kind, args) = s
        .split_once(':')
        .ok_or_else(|| format!("shape `{s}`: expected KIND:ARGS"))?;
    let shape = match kind {
        "sphere" => {
            let r: f64 = args
                .trim()
                .parse()
                .map_err(|e| format!("sphere radius `{args}`: {e}"))?;
            Sphere::new(r).map(ConvexShape::from)
        }
        "box" => Cuboid::new(parse_vec3(args)?).map(ConvexShape::from),
        "ellipsoid" => Ellipsoid::from_semi_axes(parse_vec3(args)?).map(ConvexShape::from),
        "mesh" => load_convex_mesh(Path::new(args)).map(ConvexShape::from),
        other => return Err(format!("unknown shape kind `{other}` (sphere|box|ellipsoid|mesh)")),
    };
    shape.map_err(|e| format!("shape `{s}`: {e}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vectors() {
        assert_eq!(parse_vec3("1, 2,3.5").unwrap(), Vec3::new(1.0, 2.0, 3.5));
        assert!(parse_vec3("1,2").is_err());
        assert!(parse_vec3("1,2,x").is_err());
        assert!(parse_vec3("1,2,inf").is_err());
    }

    #[test]
    fn primitives() {
        assert!(matches!(parse_shape("sphere:0.5"), Ok(ConvexShape::Sphere(_))));
        assert!(matches!(parse_shape("box:1,2,3"), Ok(ConvexShape::Box(_))));
        assert!(matches!(parse_shape("ellipsoid:0.1,0.2,0.3"), Ok(ConvexShape::Ellipsoid(_))));
    }

    #[test]
    fn malformed() {
        for bad in ["sphere", "sphere:-1", "box:1,2", "cone:1", "ellipsoid:0,1,1", "mesh:/no/such.obj"] {
            assert!(parse_shape(bad).is_err(), "{bad}");
        }
    }
}
