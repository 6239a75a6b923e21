//! Hyperbolic trigonometry for a single pair of pants.
//!
//! A pair of pants with cuff lengths `2*l1, 2*l2, 2*l3` is the double of the
//! right-angled hexagon with alternating sides `l1, l2, l3`; the remaining
//! sides are the seams (common perpendiculars between cuffs). Distances
//! between boundary points are computed by unfolding the double across the
//! seam lines: every unfolded candidate is a realized path, so the minimum
//! over candidates is always a valid upper bound and is exact once the
//! enumeration provably covers every competitive unfolding.

use crate::error::{Error, Result};
use crate::hyperbolic::{point_along, tangent, HPoint, Isometry, Wall};
use crate::scalar::Real;

/// Three cuff half-lengths defining one hyperbolic pair of pants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PantsShape<F: Real> {
    half_lengths: [F; 3],
}

impl<F: Real> PantsShape<F> {
    pub fn new(l1: F, l2: F, l3: F) -> Result<Self> {
        for &l in &[l1, l2, l3] {
            if !(l > F::zero()) || !l.is_finite() {
                return Err(Error::invalid(format!(
                    "half-lengths must be positive and finite, got ({l1}, {l2}, {l3})"
                )));
            }
        }
        Ok(PantsShape {
            half_lengths: [l1, l2, l3],
        })
    }

    pub fn equilateral(l: F) -> Result<Self> {
        Self::new(l, l, l)
    }

    pub fn half_lengths(&self) -> [F; 3] {
        self.half_lengths
    }

    /// Half-length of a cuff, 1-based index.
    pub fn half_length(&self, cuff: usize) -> F {
        self.half_lengths[cuff - 1]
    }

    /// Full length of a cuff, 1-based index.
    pub fn cuff_length(&self, cuff: usize) -> F {
        let two = F::from_f64_const(2.0);
        two * self.half_lengths[cuff - 1]
    }

    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        PantsShape {
            half_lengths: [
                self.half_lengths[perm[0] - 1],
                self.half_lengths[perm[1] - 1],
                self.half_lengths[perm[2] - 1],
            ],
        }
    }

    fn check_cuff(cuff: usize) -> Result<()> {
        if (1..=3).contains(&cuff) {
            Ok(())
        } else {
            Err(Error::invalid(format!("cuff index must be 1..=3, got {cuff}")))
        }
    }
}

/// Seam length between cuffs `i` and `j`: the distance between the two
/// boundary geodesics, `arccosh((cosh l_k + cosh l_i cosh l_j)/(sinh l_i sinh l_j))`
/// with `k` the third index.
pub fn seam_length<F: Real>(shape: &PantsShape<F>, i: usize, j: usize) -> Result<F> {
    PantsShape::<F>::check_cuff(i)?;
    PantsShape::<F>::check_cuff(j)?;
    if i == j {
        return Err(Error::invalid(format!("seam requires distinct cuffs, got ({i}, {j})")));
    }
    let k = 6 - i - j;
    let [la, lb, lc] = [
        shape.half_length(i),
        shape.half_length(j),
        shape.half_length(k),
    ];
    let arg = (lc.cosh() + la.cosh() * lb.cosh()) / (la.sinh() * lb.sinh());
    Ok(arg.acosh_clamped())
}

/// Seam bounds and a computable diameter bound for pants whose cuff lengths
/// lie in `[2*l_minus, 2*l_plus]`.
#[derive(Debug, Clone, Copy)]
pub struct PantsBounds<F: Real> {
    pub delta_minus: F,
    pub delta_plus: F,
    /// Upper bound on the diameter of every admissible pants. Fixed to
    /// `2*l_plus + 2*delta_plus`, twice the hexagon-diameter bound.
    pub delta_cap: F,
}

pub fn pants_bounds<F: Real>(l_minus: F, l_plus: F) -> Result<PantsBounds<F>> {
    if !(l_minus > F::zero()) || !(l_plus >= l_minus) || !l_plus.is_finite() {
        return Err(Error::invalid(format!(
            "need 0 < l_minus <= l_plus finite, got ({l_minus}, {l_plus})"
        )));
    }
    let delta_minus =
        ((l_minus.cosh() + l_plus.cosh().powi(2)) / l_plus.sinh().powi(2)).acosh_clamped();
    let delta_plus =
        ((l_plus.cosh() + l_minus.cosh().powi(2)) / l_minus.sinh().powi(2)).acosh_clamped();
    let two = F::from_f64_const(2.0);
    Ok(PantsBounds {
        delta_minus,
        delta_plus,
        delta_cap: two * l_plus + two * delta_plus,
    })
}

/// Half-width of the embedded collar around a closed geodesic of the given
/// length: `arcsinh(1 / sinh(len/2))`.
pub fn collar_width<F: Real>(cuff_length: F) -> Result<F> {
    if !(cuff_length > F::zero()) || !cuff_length.is_finite() {
        return Err(Error::invalid(format!(
            "cuff length must be positive and finite, got {cuff_length}"
        )));
    }
    let two = F::from_f64_const(2.0);
    Ok((cuff_length / two).sinh().recip().asinh())
}

/// Lower bound for the length of an arc that enters a pants through one cuff
/// and crosses the seam between the other two before leaving through the
/// same cuff: `2*arccosh(sqrt(2)*cosh(l/2))`. Always at least `l`.
pub fn half_pants_crossing_bound<F: Real>(l: F) -> Result<F> {
    if !(l > F::zero()) || !l.is_finite() {
        return Err(Error::invalid(format!("l must be positive and finite, got {l}")));
    }
    let two = F::from_f64_const(2.0);
    Ok(two * (two.sqrt() * (l / two).cosh()).acosh_clamped())
}

/// A point on a cuff of a pants, by arc length from the distinguished foot
/// point. The parameter is reduced modulo the cuff length `2*l_cuff` at use
/// sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryPoint<F: Real> {
    pub cuff: usize,
    pub arc: F,
}

impl<F: Real> BoundaryPoint<F> {
    pub fn new(cuff: usize, arc: F) -> Result<Self> {
        PantsShape::<F>::check_cuff(cuff)?;
        if !arc.is_finite() {
            return Err(Error::invalid(format!("arc parameter must be finite, got {arc}")));
        }
        Ok(BoundaryPoint { cuff, arc })
    }
}

/// Explicit right-angled hexagon: vertices in the hyperboloid model and the
/// alternating side lengths `(l1, s3, l2, s1, l3, s2)` where `s_k` is the
/// seam opposite cuff `k`.
#[derive(Debug, Clone)]
pub struct HexagonChart<F: Real> {
    pub vertices: [HPoint<F>; 6],
    pub sides: [F; 6],
}

/// Walks the hexagon boundary: translate along each side, then turn by a
/// right angle. Closure of the walk is the validity check.
pub fn build_hexagon_chart<F: Real>(shape: &PantsShape<F>) -> Result<HexagonChart<F>> {
    let s3 = seam_length(shape, 1, 2)?;
    let s1 = seam_length(shape, 2, 3)?;
    let s2 = seam_length(shape, 3, 1)?;
    let [l1, l2, l3] = shape.half_lengths();
    let sides = [l1, s3, l2, s1, l3, s2];
    for &s in &sides {
        if !s.is_finite() || !(s > F::zero()) {
            return Err(Error::geometry(format!("degenerate hexagon side {s}")));
        }
    }
    let right = F::from_f64_const(std::f64::consts::FRAC_PI_2);
    let mut frame = Isometry::identity();
    let mut vertices = [HPoint::origin(); 6];
    for (i, &s) in sides.iter().enumerate() {
        vertices[i] = frame.apply(&HPoint::origin()).normalized();
        frame = frame
            .compose(&Isometry::translation_x(s))
            .compose(&Isometry::rotation(right));
    }
    // Compare in the cosh domain: acosh near 1 amplifies roundoff.
    let closure = frame.apply(&HPoint::origin());
    let gap = closure.cosh_distance_to(&vertices[0]) - F::one();
    if gap.abs() > F::from_f64_const(1e-9) {
        return Err(Error::geometry(format!("hexagon walk failed to close (cosh gap {gap})")));
    }
    Ok(HexagonChart { vertices, sides })
}

/// Which copy of the hexagon a boundary point lies in when the pants is cut
/// open along its seams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    Front,
    Back,
}

/// A pants with its chart, seam walls and parameterization data; the working
/// object behind `point_distance` and the metric-graph builder.
#[derive(Debug, Clone)]
pub struct PantsChart<F: Real> {
    pub shape: PantsShape<F>,
    pub hex: HexagonChart<F>,
    /// Seam walls indexed by seam number: `walls[k-1]` is the line of seam
    /// `s_k` (the seam opposite cuff `k`).
    pub walls: [Wall<F>; 3],
    /// Seam lengths `s1, s2, s3`.
    pub seams: [F; 3],
    /// Smallest cuff half-length: the gap between wall lines of a chamber,
    /// hence a per-crossing cost lower bound for any unfolded path.
    pub wall_gap: F,
}

impl<F: Real> PantsChart<F> {
    pub fn new(shape: PantsShape<F>) -> Result<Self> {
        let hex = build_hexagon_chart(&shape)?;
        let v = &hex.vertices;
        // Side order: l1 (v0 v1), s3 (v1 v2), l2 (v2 v3), s1 (v3 v4),
        // l3 (v4 v5), s2 (v5 v0).
        let walls = [
            Wall::through(&v[3], &v[4]),
            Wall::through(&v[5], &v[0]),
            Wall::through(&v[1], &v[2]),
        ];
        let seams = [hex.sides[3], hex.sides[5], hex.sides[1]];
        let [l1, l2, l3] = shape.half_lengths();
        let wall_gap = l1.min(l2).min(l3);
        Ok(PantsChart {
            shape,
            hex,
            walls,
            seams,
            wall_gap,
        })
    }

    pub fn seam(&self, i: usize, j: usize) -> F {
        self.seams[6 - i - j - 1]
    }

    /// Foot-anchored cuff arcs in the front hexagon. For each cuff, the
    /// parameter runs from the distinguished foot toward the other foot over
    /// `[0, l_i]`, then back through the mirror copy over `[l_i, 2*l_i)`.
    fn cuff_arc(&self, cuff: usize) -> (HPoint<F>, HPoint<F>) {
        let v = &self.hex.vertices;
        match cuff {
            1 => (v[1], v[0]),
            2 => (v[2], v[3]),
            3 => (v[4], v[5]),
            _ => unreachable!("validated cuff index"),
        }
    }

    /// Position and sheet of a boundary point.
    pub fn lift(&self, p: &BoundaryPoint<F>) -> (HPoint<F>, Sheet) {
        let l = self.shape.half_length(p.cuff);
        let two = F::from_f64_const(2.0);
        let len = two * l;
        let mut t = p.arc % len;
        if t < F::zero() {
            t = t + len;
        }
        let (start, end) = self.cuff_arc(p.cuff);
        if t <= l {
            (point_along(&start, &end, t), Sheet::Front)
        } else {
            (point_along(&start, &end, len - t), Sheet::Back)
        }
    }

    /// An interior marked point: the midpoint of seam `s3` (between cuffs 1
    /// and 2). Lies on a mirror, so both sheets agree.
    pub fn seam_midpoint(&self) -> HPoint<F> {
        let v = &self.hex.vertices;
        let two = F::from_f64_const(2.0);
        point_along(&v[1], &v[2], self.hex.sides[1] / two)
    }

    /// A crude upper bound on distances between boundary points of this
    /// pants: the full hexagon perimeter.
    pub fn distance_cap(&self) -> F {
        let mut p = F::zero();
        for &s in &self.hex.sides {
            p = p + s;
        }
        p
    }
}

/// One unfolded chamber: the group element as an isometry plus its reduced
/// word data.
#[derive(Debug, Clone)]
pub struct Unfolding<F: Real> {
    pub iso: Isometry<F>,
    /// Reduced word over seam indices `0..3`, most recent letter last.
    pub word: Vec<u8>,
}

impl<F: Real> Unfolding<F> {
    pub fn parity(&self) -> u8 {
        (self.word.len() % 2) as u8
    }

    /// Per-seam crossing counts mod 2.
    pub fn crossing_parity(&self) -> [u8; 3] {
        let mut c = [0u8; 3];
        for &k in &self.word {
            c[k as usize] ^= 1;
        }
        c
    }
}

/// Breadth-first enumeration of reduced words in the seam reflection group,
/// pruned by the per-crossing cost bound `(len-1)*wall_gap <= cap` and the
/// hard length limit `word_cap`. Returns chambers in nondecreasing word
/// length; total count is also bounded by `node_budget`.
pub fn enumerate_unfoldings<F: Real>(
    chart: &PantsChart<F>,
    word_cap: usize,
    distance_cap: F,
    node_budget: usize,
) -> Result<Vec<Unfolding<F>>> {
    let reflections = [
        chart.walls[0].reflection(),
        chart.walls[1].reflection(),
        chart.walls[2].reflection(),
    ];
    let mut out: Vec<Unfolding<F>> = vec![Unfolding {
        iso: Isometry::identity(),
        word: Vec::new(),
    }];
    let mut frontier: Vec<usize> = vec![0];
    let mut len = 0usize;
    while !frontier.is_empty() && len < word_cap {
        // Words of length len+1 cost at least len * wall_gap.
        let lower = F::from_usize(len).expect("small usize") * chart.wall_gap;
        if lower > distance_cap {
            break;
        }
        let mut next = Vec::new();
        for &idx in &frontier {
            let last = out[idx].word.last().copied();
            for k in 0..3u8 {
                if last == Some(k) {
                    continue;
                }
                if out.len() >= node_budget {
                    return Err(Error::Resource {
                        context: format!(
                            "unfolding enumeration exceeded node budget {node_budget}"
                        ),
                        best_bound: None,
                    });
                }
                let iso = out[idx].iso.compose(&reflections[k as usize]);
                let mut word = out[idx].word.clone();
                word.push(k);
                next.push(out.len());
                out.push(Unfolding { iso, word });
            }
        }
        frontier = next;
        len += 1;
    }
    Ok(out)
}

/// Result of an intra-pants distance query.
#[derive(Debug, Clone, Copy)]
pub struct PointDistance<F: Real> {
    pub upper: F,
    /// Set when the enumeration provably covered every unfolding that could
    /// realize a shorter path, so `upper` is the intrinsic distance.
    pub exact: bool,
}

/// Minimum over enumerated unfoldings of the distance between a lift of `p`
/// and lifts of `q`; parity of the word must match the sheet change. Always
/// an upper bound on the intrinsic pants distance.
pub fn point_distance<F: Real>(
    shape: &PantsShape<F>,
    p: &BoundaryPoint<F>,
    q: &BoundaryPoint<F>,
    word_cap: usize,
) -> Result<PointDistance<F>> {
    if word_cap < 1 {
        return Err(Error::invalid("word_cap must be at least 1".to_string()));
    }
    PantsShape::<F>::check_cuff(p.cuff)?;
    PantsShape::<F>::check_cuff(q.cuff)?;
    let chart = PantsChart::new(*shape)?;
    let (ph, ps) = chart.lift(p);
    let (qh, qs) = chart.lift(q);
    let parity = u8::from(ps != qs);
    let dist = lifted_distance(&chart, &ph, &qh, parity, word_cap, DEFAULT_WORD_BUDGET)?;
    Ok(dist)
}

pub(crate) const DEFAULT_WORD_BUDGET: usize = 400_000;

/// Shared kernel for `point_distance` and constrained variants.
pub fn lifted_distance<F: Real>(
    chart: &PantsChart<F>,
    ph: &HPoint<F>,
    qh: &HPoint<F>,
    parity: u8,
    word_cap: usize,
    node_budget: usize,
) -> Result<PointDistance<F>> {
    let unfoldings = enumerate_unfoldings(chart, word_cap, chart.distance_cap(), node_budget);
    let (unfoldings, budget_hit) = match unfoldings {
        Ok(u) => (u, false),
        Err(Error::Resource { .. }) => {
            // Re-enumerate within budget; the bounds stay valid, exactness is
            // forfeited below.
            let mut cap = word_cap;
            loop {
                match enumerate_unfoldings(chart, cap, chart.distance_cap(), node_budget) {
                    Ok(u) => break (u, true),
                    Err(_) => {
                        cap -= 1;
                        if cap == 0 {
                            return Err(Error::Resource {
                                context: "unfolding budget exhausted at cap 0".to_string(),
                                best_bound: None,
                            });
                        }
                    }
                }
            }
        }
        Err(e) => return Err(e),
    };
    let mut best = F::infinity();
    for u in &unfoldings {
        if u.parity() != parity {
            continue;
        }
        let cand = ph.cosh_distance_to(&u.iso.apply(qh));
        if cand < best {
            best = cand;
        }
    }
    if !best.is_finite() {
        return Err(Error::Resource {
            context: "no unfolding of matching parity within caps".to_string(),
            best_bound: None,
        });
    }
    let upper = best.acosh_clamped();
    let needed = (upper / chart.wall_gap).ceil();
    let needed = needed
        .to_usize()
        .map(|n| n + 2)
        .unwrap_or(usize::MAX);
    let exact = !budget_hit && word_cap >= needed;
    Ok(PointDistance { upper, exact })
}

/// Iteratively raises the word cap until the exactness certificate holds or
/// the enumeration budget is reached.
pub fn point_distance_exact<F: Real>(
    shape: &PantsShape<F>,
    p: &BoundaryPoint<F>,
    q: &BoundaryPoint<F>,
    node_budget: usize,
) -> Result<PointDistance<F>> {
    let mut cap = 4usize;
    loop {
        let d = point_distance(shape, p, q, cap)?;
        if d.exact {
            return Ok(d);
        }
        let chart = PantsChart::new(*shape)?;
        let needed = (d.upper / chart.wall_gap)
            .ceil()
            .to_usize()
            .map(|n| n + 2)
            .unwrap_or(usize::MAX);
        if needed <= cap {
            return Ok(d);
        }
        // Enumeration grows ~3*2^(cap-1); refuse plainly hopeless caps.
        if needed > 40 || (1usize << needed.min(63)) > node_budget {
            return Err(Error::Resource {
                context: format!("exact distance needs word cap {needed}"),
                best_bound: d.upper.to_f64(),
            });
        }
        cap = needed;
    }
}

/// Checks that consecutive hexagon sides meet at right angles, to the given
/// tolerance. Used by validity tests and kept here so the chart stays
/// self-checking.
pub fn hexagon_right_angle_defect<F: Real>(hex: &HexagonChart<F>) -> F {
    let mut worst = F::zero();
    for i in 0..6 {
        let prev = hex.vertices[(i + 5) % 6];
        let here = hex.vertices[i];
        let next = hex.vertices[(i + 1) % 6];
        let t_in = tangent(&here, &prev);
        let t_out = tangent(&here, &next);
        let dot = crate::hyperbolic::minkowski_dot(&t_in, &t_out).abs();
        if dot > worst {
            worst = dot;
        }
    }
    worst
}
