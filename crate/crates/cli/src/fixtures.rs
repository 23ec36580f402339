//! Small point clouds with known homology, used by the acceptance suite and
//! the examples in the README.

use std::f64::consts::PI;

use cvtda_core::PointCloud;

/// A named cloud, a scale, and its Betti numbers `β_0, β_1, β_2` there.
#[derive(Debug, Clone)]
pub struct Fixture {
    pub name: &'static str,
    pub cloud: PointCloud,
    pub epsilon: f64,
    pub betti: [usize; 3],
}

pub fn single_point() -> Fixture {
    Fixture {
        name: "single point",
        cloud: PointCloud::from_rows(&[[0.0, 0.0]]).expect("valid"),
        epsilon: 0.5,
        betti: [1, 0, 0],
    }
}

/// Two tight triangles five units apart.
pub fn two_clusters() -> Fixture {
    let mut rows = Vec::new();
    for cx in [0.0, 5.0] {
        for i in 0..3 {
            let t = 2.0 * PI * i as f64 / 3.0;
            rows.push([cx + 0.1 * t.cos(), 0.1 * t.sin()]);
        }
    }
    Fixture {
        name: "two clusters",
        cloud: PointCloud::from_rows(&rows).expect("valid"),
        epsilon: 0.5,
        betti: [2, 0, 0],
    }
}

/// `n` equally spaced points on the unit circle.
pub fn circle(n: usize) -> PointCloud {
    let rows: Vec<[f64; 2]> = (0..n)
        .map(|i| {
            let t = 2.0 * PI * i as f64 / n as f64;
            [t.cos(), t.sin()]
        })
        .collect();
    PointCloud::from_rows(&rows).expect("valid")
}

/// Eight points on a circle at a scale joining only neighbours
/// (chord 0.765 < 0.8 < 1.414).
pub fn circle8() -> Fixture {
    Fixture {
        name: "8-point circle",
        cloud: circle(8),
        epsilon: 0.8,
        betti: [1, 1, 0],
    }
}

/// `±e_i` in three dimensions at a scale that joins all non-antipodal pairs,
/// giving the boundary of the octahedron.
pub fn octahedron() -> Fixture {
    let mut rows = Vec::new();
    for i in 0..3 {
        for sign in [1.0, -1.0] {
            let mut r = [0.0; 3];
            r[i] = sign;
            rows.push(r);
        }
    }
    Fixture {
        name: "octahedron",
        cloud: PointCloud::from_rows(&rows).expect("valid"),
        epsilon: 1.5,
        betti: [1, 0, 1],
    }
}

pub fn all() -> Vec<Fixture> {
    vec![single_point(), two_clusters(), circle8(), octahedron()]
}
