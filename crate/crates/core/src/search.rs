//! Deterministic 2-D Nelder-Mead with box clamping.
//!
//! Seeded from a fixed right-angle simplex, ties broken lexicographically by
//! coordinates, so repeated runs are bit-identical.

/// Rectangular clamp region.
#[derive(Debug, Clone, Copy)]
pub struct Bounds2 {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Bounds2 {
    pub fn clamp(&self, p: [f64; 2]) -> [f64; 2] {
        [
            p[0].clamp(self.lo[0], self.hi[0]),
            p[1].clamp(self.lo[1], self.hi[1]),
        ]
    }
}

#[derive(Debug, Clone, Copy)]
struct Vertex {
    p: [f64; 2],
    f: f64,
}

fn better(a: &Vertex, b: &Vertex) -> std::cmp::Ordering {
    a.f.total_cmp(&b.f)
        .then(a.p[0].total_cmp(&b.p[0]))
        .then(a.p[1].total_cmp(&b.p[1]))
}

/// Minimize `f` from `start`, seeding a simplex of leg `scale`, clamped to
/// `bounds`. Returns (point, value) of the best vertex seen.
pub fn nelder_mead<F: FnMut([f64; 2]) -> f64>(
    mut f: F,
    start: [f64; 2],
    scale: f64,
    bounds: Bounds2,
    max_iter: usize,
) -> ([f64; 2], f64) {
    let mut eval = |p: [f64; 2]| -> Vertex {
        let p = bounds.clamp(p);
        Vertex { p, f: f(p) }
    };
    let mut simplex = [
        eval(start),
        eval([start[0] + scale, start[1]]),
        eval([start[0], start[1] + scale]),
    ];
    simplex.sort_by(better);

    for _ in 0..max_iter {
        let diam = simplex
            .iter()
            .map(|v| {
                (v.p[0] - simplex[0].p[0]).abs() + (v.p[1] - simplex[0].p[1]).abs()
            })
            .fold(0.0f64, f64::max);
        let fspread = simplex[2].f - simplex[0].f;
        if diam < 1e-9 * scale.max(1e-12) || fspread.abs() < 1e-14 * (1.0 + simplex[0].f.abs()) {
            break;
        }
        let best = simplex[0];
        let worst = simplex[2];
        let centroid = [
            0.5 * (simplex[0].p[0] + simplex[1].p[0]),
            0.5 * (simplex[0].p[1] + simplex[1].p[1]),
        ];
        let reflect = eval([
            centroid[0] + (centroid[0] - worst.p[0]),
            centroid[1] + (centroid[1] - worst.p[1]),
        ]);
        if reflect.f < best.f {
            let expand = eval([
                centroid[0] + 2.0 * (centroid[0] - worst.p[0]),
                centroid[1] + 2.0 * (centroid[1] - worst.p[1]),
            ]);
            simplex[2] = if expand.f < reflect.f { expand } else { reflect };
        } else if reflect.f < simplex[1].f {
            simplex[2] = reflect;
        } else {
            let inside = reflect.f >= worst.f;
            let contract = if inside {
                eval([
                    centroid[0] - 0.5 * (centroid[0] - worst.p[0]),
                    centroid[1] - 0.5 * (centroid[1] - worst.p[1]),
                ])
            } else {
                eval([
                    centroid[0] + 0.5 * (centroid[0] - worst.p[0]),
                    centroid[1] + 0.5 * (centroid[1] - worst.p[1]),
                ])
            };
            if contract.f < worst.f.min(reflect.f) {
                simplex[2] = contract;
            } else {
                // shrink toward the best vertex
                for i in 1..3 {
                    let p = [
                        best.p[0] + 0.5 * (simplex[i].p[0] - best.p[0]),
                        best.p[1] + 0.5 * (simplex[i].p[1] - best.p[1]),
                    ];
                    simplex[i] = eval(p);
                }
            }
        }
        simplex.sort_by(better);
    }
    (simplex[0].p, simplex[0].f)
}

#[cfg(test)]
mod tests {
    use super::*;

    const WIDE: Bounds2 = Bounds2 { lo: [-1e9, -1e9], hi: [1e9, 1e9] };

    #[test]
    fn finds_quadratic_bowl_minimum() {
        let (p, v) = nelder_mead(
            |p| (p[0] - 1.3).powi(2) + 2.0 * (p[1] + 0.4).powi(2),
            [0.0, 0.0],
            0.5,
            WIDE,
            400,
        );
        assert!((p[0] - 1.3).abs() < 1e-6 && (p[1] + 0.4).abs() < 1e-6, "{p:?}");
        assert!(v < 1e-10);
    }

    #[test]
    fn respects_box_clamping() {
        let b = Bounds2 { lo: [0.0, 0.0], hi: [1.0, 1.0] };
        // unconstrained minimum at (2, 2): clamped run must end at (1, 1)
        let (p, _) = nelder_mead(
            |p| (p[0] - 2.0).powi(2) + (p[1] - 2.0).powi(2),
            [0.2, 0.3],
            0.3,
            b,
            400,
        );
        assert!((p[0] - 1.0).abs() < 1e-7 && (p[1] - 1.0).abs() < 1e-7, "{p:?}");
    }

    #[test]
    fn is_deterministic() {
        let run = || {
            nelder_mead(
                |p| p[0].powi(4) + p[1].powi(2) + (p[0] * p[1]).sin(),
                [0.7, -0.3],
                0.25,
                WIDE,
                300,
            )
        };
        let (p1, v1) = run();
        let (p2, v2) = run();
        assert_eq!(p1, p2);
        assert_eq!(v1.to_bits(), v2.to_bits());
    }
}
