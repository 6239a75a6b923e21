//! Brute-force distance oracle for a single pair of pants, independent of
//! the unfolding enumeration in the library.
//!
//! A path between boundary points of the doubled hexagon decomposes into
//! chamber segments whose junctions lie on the seam sides. The oracle
//! samples the three seam segments densely, takes every junction pair as a
//! candidate hop (hyperbolic chord inside one chamber; the hexagon is
//! convex, so the chord stays inside), flips the sheet at every junction,
//! and runs Dijkstra with dense on-the-fly relaxation. The result converges
//! to the intrinsic distance from above as the sample pitch shrinks.

use hypsurf::hyperbolic::HPoint;
use hypsurf::pants::{BoundaryPoint, PantsChart, PantsShape, Sheet};
use hypsurf::scalar::Real;

pub struct SeamOracle {
    chart: PantsChart<f64>,
    /// Junction points in base-hexagon coordinates.
    junctions: Vec<HPoint<f64>>,
    /// Max arc pitch between adjacent junctions on a seam.
    pub spacing: f64,
}

impl SeamOracle {
    pub fn new(shape: &PantsShape<f64>, n_samples: usize) -> Self {
        let chart = PantsChart::new(*shape).expect("valid shape");
        let v = &chart.hex.vertices;
        // Seam sides of the hexagon walk: s3 = (v1, v2), s1 = (v3, v4),
        // s2 = (v5, v0).
        let sides = [(v[1], v[2]), (v[3], v[4]), (v[5], v[0])];
        let lengths = [chart.hex.sides[1], chart.hex.sides[3], chart.hex.sides[5]];
        let total: f64 = lengths.iter().sum();
        let mut junctions = Vec::with_capacity(n_samples + 6);
        let mut spacing = 0.0f64;
        for ((a, b), &len) in sides.iter().zip(&lengths) {
            let n = ((len / total) * n_samples as f64).ceil().max(2.0) as usize;
            let pitch = len / n as f64;
            spacing = spacing.max(pitch);
            for k in 0..=n {
                junctions.push(hypsurf::hyperbolic::point_along(a, b, k as f64 * pitch));
            }
        }
        SeamOracle {
            chart,
            junctions,
            spacing,
        }
    }

    /// Shortest chain distance between two boundary points.
    pub fn distance(&self, p: &BoundaryPoint<f64>, q: &BoundaryPoint<f64>) -> f64 {
        let (ph, ps) = self.chart.lift(p);
        let (qh, qs) = self.chart.lift(q);
        let same_sheet = ps == qs;
        let v = self.junctions.len();
        // State layout: 2*i + parity, where parity is the number of
        // crossings so far mod 2 after crossing at junction i.
        let n_states = 2 * v;
        let mut dist = vec![f64::INFINITY; n_states];
        let mut settled = vec![false; n_states];
        let mut best_q = if same_sheet {
            ph.distance_to(&qh)
        } else {
            f64::INFINITY
        };
        // Seed: one crossing at junction i.
        for (i, j) in self.junctions.iter().enumerate() {
            dist[2 * i + 1] = ph.distance_to(j);
        }
        let mut heap = std::collections::BinaryHeap::new();
        for (s, &d) in dist.iter().enumerate() {
            if d.is_finite() {
                heap.push(std::cmp::Reverse((ordered(d), s)));
            }
        }
        while let Some(std::cmp::Reverse((od, s))) = heap.pop() {
            let d = od.0;
            if settled[s] || d > dist[s] + 1e-15 {
                continue;
            }
            settled[s] = true;
            if d >= best_q {
                break;
            }
            let parity = s & 1;
            let here = self.junctions[s >> 1];
            // Terminal hop to q when the sheet matches.
            let q_parity = usize::from(!same_sheet);
            if parity == q_parity {
                let cand = d + here.distance_to(&qh);
                if cand < best_q {
                    best_q = cand;
                }
            }
            for (i, j) in self.junctions.iter().enumerate() {
                let t = 2 * i + (parity ^ 1);
                if settled[t] {
                    continue;
                }
                let cand = d + here.cosh_distance_to(j).acosh_clamped();
                if cand < dist[t] {
                    dist[t] = cand;
                    heap.push(std::cmp::Reverse((ordered(cand), t)));
                }
            }
        }
        best_q
    }
}

#[derive(PartialEq, PartialOrd)]
struct Ordered(pub f64);
impl Eq for Ordered {}
#[allow(clippy::derive_ord_xor_partial_ord)]
impl Ord for Ordered {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn ordered(x: f64) -> Ordered {
    Ordered(x)
}

/// Random boundary point on a shape.
pub fn random_boundary_point(
    shape: &PantsShape<f64>,
    rng: &mut impl rand::Rng,
) -> BoundaryPoint<f64> {
    let cuff = rng.gen_range(1..=3usize);
    let len = 2.0 * shape.half_length(cuff);
    BoundaryPoint::new(cuff, rng.gen_range(0.0..len)).expect("valid point")
}

/// Sheet of a boundary point, for tests that need parity visibility.
pub fn sheet_of(shape: &PantsShape<f64>, p: &BoundaryPoint<f64>) -> Sheet {
    let chart = PantsChart::new(*shape).expect("valid shape");
    chart.lift(p).1
}
