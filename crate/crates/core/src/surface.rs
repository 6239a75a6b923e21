//! Combinatorial layer: configuration-model pairings, Fenchel-Nielsen edge
//! weights, validity checks and the surface record format.

use crate::error::{Error, Result};
use crate::pants::PantsShape;
use crate::rng::{self, Domain, LengthLaw, Stream, TwistLaw, WeightLaw};
use rand::Rng;

/// Identifier of a half-edge: `vertex * 3 + slot`, slots `0..3`.
pub type HalfEdgeId = u32;

pub fn half_edge(vertex: u32, slot: u8) -> HalfEdgeId {
    vertex * 3 + slot as u32
}

pub fn vertex_of(h: HalfEdgeId) -> u32 {
    h / 3
}

pub fn slot_of(h: HalfEdgeId) -> u8 {
    (h % 3) as u8
}

/// A perfect matching on the half-edges of `n_vertices` degree-3 vertices.
/// Loops and parallel edges are allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pairing {
    n_vertices: usize,
    /// Canonical form: each pair `(a, b)` with `a < b`, sorted by `a`.
    pairs: Vec<(HalfEdgeId, HalfEdgeId)>,
}

impl Pairing {
    pub fn from_pairs(n_vertices: usize, pairs: Vec<(HalfEdgeId, HalfEdgeId)>) -> Result<Self> {
        let total = n_vertices * 3;
        let mut seen = vec![false; total];
        if pairs.len() * 2 != total {
            return Err(Error::invalid(format!(
                "expected {} pairs for {} vertices, got {}",
                total / 2,
                n_vertices,
                pairs.len()
            )));
        }
        let mut canon: Vec<(HalfEdgeId, HalfEdgeId)> = Vec::with_capacity(pairs.len());
        for (a, b) in pairs {
            for h in [a, b] {
                let idx = h as usize;
                if idx >= total {
                    return Err(Error::invalid(format!("half-edge id {h} out of range")));
                }
                if seen[idx] {
                    return Err(Error::invalid(format!("half-edge id {h} paired twice")));
                }
                seen[idx] = true;
            }
            canon.push(if a <= b { (a, b) } else { (b, a) });
        }
        canon.sort_unstable();
        Ok(Pairing {
            n_vertices,
            pairs: canon,
        })
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn n_edges(&self) -> usize {
        self.pairs.len()
    }

    pub fn pairs(&self) -> &[(HalfEdgeId, HalfEdgeId)] {
        &self.pairs
    }

    /// Edge index containing each half-edge.
    pub fn edge_of_half_edge(&self) -> Vec<usize> {
        let mut table = vec![usize::MAX; self.n_vertices * 3];
        for (e, &(a, b)) in self.pairs.iter().enumerate() {
            table[a as usize] = e;
            table[b as usize] = e;
        }
        table
    }
}

/// Uniform perfect matching of the `3 * n_vertices` half-edges, built
/// sequentially: repeatedly take the lowest-id unpaired half-edge and pair
/// it with a uniformly random other unpaired half-edge.
pub fn sample_configuration(n_vertices: usize, rng: &mut Stream) -> Result<Pairing> {
    if n_vertices < 2 || n_vertices % 2 != 0 {
        return Err(Error::invalid(format!(
            "n_vertices must be even and at least 2, got {n_vertices}"
        )));
    }
    let total = n_vertices * 3;
    let mut unpaired: Vec<HalfEdgeId> = (0..total as u32).collect();
    let mut pairs = Vec::with_capacity(total / 2);
    while !unpaired.is_empty() {
        let a = unpaired[0];
        unpaired.swap_remove(0);
        let j = rng.gen_range(0..unpaired.len());
        let b = unpaired[j];
        unpaired.swap_remove(j);
        pairs.push((a, b));
    }
    Pairing::from_pairs(n_vertices, pairs)
}

/// Fenchel-Nielsen weight of one gluing: boundary length and twist angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeWeight {
    /// Cuff length `2*l_e`, positive.
    pub length: f64,
    /// Twist in `[0, 2*pi)`.
    pub twist: f64,
}

impl EdgeWeight {
    /// Twist as arc length along the cuff, in `[0, length)`.
    pub fn arc_twist(&self) -> f64 {
        self.twist / std::f64::consts::TAU * self.length
    }
}

/// A 3-regular multigraph with per-edge weights; the combinatorial surface.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSurfaceGraph {
    pub pairing: Pairing,
    /// Parallel to `pairing.pairs()`.
    pub weights: Vec<EdgeWeight>,
    pub law: WeightLaw,
    pub seed: u64,
}

impl WeightedSurfaceGraph {
    pub fn genus(&self) -> usize {
        self.pairing.n_vertices() / 2 + 1
    }

    /// Pants shape of a vertex: half of each incident cuff length by slot.
    /// A loop contributes its length to both identified slots.
    pub fn shape_of(&self, vertex: u32) -> Result<PantsShape<f64>> {
        let table = self.pairing.edge_of_half_edge();
        let mut halves = [0.0f64; 3];
        for slot in 0..3u8 {
            let e = table[half_edge(vertex, slot) as usize];
            halves[slot as usize] = self.weights[e].length / 2.0;
        }
        PantsShape::new(halves[0], halves[1], halves[2])
    }
}

/// Draws one independent weight per edge. The stream is separate from the
/// pairing stream by construction at call sites.
pub fn assign_weights(
    pairing: &Pairing,
    law: &WeightLaw,
    rng: &mut Stream,
    seed: u64,
) -> Result<WeightedSurfaceGraph> {
    law.validate()?;
    let weights = pairing
        .pairs()
        .iter()
        .map(|_| EdgeWeight {
            length: law.sample_length(rng),
            twist: law.sample_twist(rng),
        })
        .collect();
    Ok(WeightedSurfaceGraph {
        pairing: pairing.clone(),
        weights,
        law: *law,
        seed,
    })
}

/// Samples a full surface from a master seed: pairing and weights on
/// independent derived streams.
pub fn sample_surface(genus: usize, law: &WeightLaw, seed: u64) -> Result<WeightedSurfaceGraph> {
    if genus < 2 {
        return Err(Error::invalid(format!("genus must be at least 2, got {genus}")));
    }
    let n = 2 * genus - 2;
    let mut pair_rng = rng::stream_indexed(seed, Domain::Pairing, 0);
    let pairing = sample_configuration(n, &mut pair_rng)?;
    let mut weight_rng = rng::stream_indexed(seed, Domain::Weights, 0);
    assign_weights(&pairing, law, &mut weight_rng, seed)
}

/// Reachability over the multigraph.
pub fn connectivity(graph: &WeightedSurfaceGraph) -> (bool, usize) {
    let n = graph.pairing.n_vertices();
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in graph.pairing.pairs() {
        let (u, v) = (vertex_of(a) as usize, vertex_of(b) as usize);
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut seen = vec![false; n];
    let mut components = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(u) = stack.pop() {
            for &v in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
    }
    (components == 1, components)
}

fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Stable text record for one surface; 17 significant digits for bit-exact
/// float round trips.
pub fn serialize(graph: &WeightedSurfaceGraph) -> String {
    let mut out = String::new();
    out.push_str("hypsurf-surface v1\n");
    out.push_str(&format!("genus {}\n", graph.genus()));
    out.push_str(&format!("seed {}\n", graph.seed));
    let law = match graph.law.length {
        LengthLaw::PointMass(a) => format!("length point_mass {}", fmt_f64(a)),
        LengthLaw::Uniform(lo, hi) => format!("length uniform {} {}", fmt_f64(lo), fmt_f64(hi)),
        LengthLaw::LogUniform(lo, hi) => {
            format!("length log_uniform {} {}", fmt_f64(lo), fmt_f64(hi))
        }
    };
    out.push_str(&law);
    out.push('\n');
    out.push_str(match graph.law.twist {
        TwistLaw::Zero => "twist zero\n",
        TwistLaw::UniformCircle => "twist uniform\n",
    });
    let pairing_line: Vec<String> = graph
        .pairing
        .pairs()
        .iter()
        .map(|&(a, b)| format!("{}:{}-{}:{}", vertex_of(a), slot_of(a), vertex_of(b), slot_of(b)))
        .collect();
    out.push_str(&format!("pairing {}\n", pairing_line.join(" ")));
    let weight_line: Vec<String> = graph
        .weights
        .iter()
        .map(|w| format!("{}/{}", fmt_f64(w.length), fmt_f64(w.twist)))
        .collect();
    out.push_str(&format!("weights {}\n", weight_line.join(" ")));
    out
}

fn parse_f64(line: usize, field: &str, s: &str) -> Result<f64> {
    s.parse::<f64>().map_err(|e| Error::Parse {
        line,
        field: field.to_string(),
        message: format!("bad float {s:?}: {e}"),
    })
}

fn parse_half_edge(line: usize, field: &str, s: &str, n_vertices: usize) -> Result<HalfEdgeId> {
    let (v, slot) = s.split_once(':').ok_or_else(|| Error::Parse {
        line,
        field: field.to_string(),
        message: format!("expected vertex:slot, got {s:?}"),
    })?;
    let v: u32 = v.parse().map_err(|e| Error::Parse {
        line,
        field: field.to_string(),
        message: format!("bad vertex {v:?}: {e}"),
    })?;
    let slot: u8 = slot.parse().map_err(|e| Error::Parse {
        line,
        field: field.to_string(),
        message: format!("bad slot {slot:?}: {e}"),
    })?;
    if v as usize >= n_vertices || slot >= 3 {
        return Err(Error::Parse {
            line,
            field: field.to_string(),
            message: format!("half-edge {s} out of range for {n_vertices} vertices"),
        });
    }
    Ok(half_edge(v, slot))
}

pub fn deserialize(text: &str) -> Result<WeightedSurfaceGraph> {
    let mut lines = text.lines().enumerate();
    let mut expect = |field: &str| -> Result<(usize, String)> {
        let (i, line) = lines.next().ok_or_else(|| Error::Parse {
            line: 0,
            field: field.to_string(),
            message: "unexpected end of record".to_string(),
        })?;
        Ok((i + 1, line.to_string()))
    };

    let (line, header) = expect("header")?;
    if header.trim() != "hypsurf-surface v1" {
        return Err(Error::Parse {
            line,
            field: "header".to_string(),
            message: format!("unknown header {header:?}"),
        });
    }

    let (line, genus_line) = expect("genus")?;
    let genus: usize = genus_line
        .strip_prefix("genus ")
        .ok_or_else(|| Error::Parse {
            line,
            field: "genus".to_string(),
            message: "missing 'genus' keyword".to_string(),
        })?
        .trim()
        .parse()
        .map_err(|e| Error::Parse {
            line,
            field: "genus".to_string(),
            message: format!("{e}"),
        })?;
    let n_vertices = 2 * genus - 2;

    let (line, seed_line) = expect("seed")?;
    let seed: u64 = seed_line
        .strip_prefix("seed ")
        .ok_or_else(|| Error::Parse {
            line,
            field: "seed".to_string(),
            message: "missing 'seed' keyword".to_string(),
        })?
        .trim()
        .parse()
        .map_err(|e| Error::Parse {
            line,
            field: "seed".to_string(),
            message: format!("{e}"),
        })?;

    let (line, length_line) = expect("length")?;
    let parts: Vec<&str> = length_line.split_whitespace().collect();
    let length = match parts.as_slice() {
        ["length", "point_mass", a] => LengthLaw::PointMass(parse_f64(line, "length", a)?),
        ["length", "uniform", lo, hi] => {
            LengthLaw::Uniform(parse_f64(line, "length", lo)?, parse_f64(line, "length", hi)?)
        }
        ["length", "log_uniform", lo, hi] => {
            LengthLaw::LogUniform(parse_f64(line, "length", lo)?, parse_f64(line, "length", hi)?)
        }
        _ => {
            return Err(Error::Parse {
                line,
                field: "length".to_string(),
                message: format!("unrecognized length law {length_line:?}"),
            })
        }
    };

    let (line, twist_line) = expect("twist")?;
    let twist = match twist_line.trim() {
        "twist zero" => TwistLaw::Zero,
        "twist uniform" => TwistLaw::UniformCircle,
        other => {
            return Err(Error::Parse {
                line,
                field: "twist".to_string(),
                message: format!("unrecognized twist law {other:?}"),
            })
        }
    };

    let (line, pairing_line) = expect("pairing")?;
    let body = pairing_line.strip_prefix("pairing").ok_or_else(|| Error::Parse {
        line,
        field: "pairing".to_string(),
        message: "missing 'pairing' keyword".to_string(),
    })?;
    let mut pairs = Vec::new();
    for token in body.split_whitespace() {
        let (a, b) = token.split_once('-').ok_or_else(|| Error::Parse {
            line,
            field: "pairing".to_string(),
            message: format!("expected a-b pair, got {token:?}"),
        })?;
        pairs.push((
            parse_half_edge(line, "pairing", a, n_vertices)?,
            parse_half_edge(line, "pairing", b, n_vertices)?,
        ));
    }
    let pairing = Pairing::from_pairs(n_vertices, pairs).map_err(|e| Error::Parse {
        line,
        field: "pairing".to_string(),
        message: format!("{e}"),
    })?;

    let (line, weight_line) = expect("weights")?;
    let body = weight_line.strip_prefix("weights").ok_or_else(|| Error::Parse {
        line,
        field: "weights".to_string(),
        message: "missing 'weights' keyword".to_string(),
    })?;
    let mut weights = Vec::new();
    for token in body.split_whitespace() {
        let (l, t) = token.split_once('/').ok_or_else(|| Error::Parse {
            line,
            field: "weights".to_string(),
            message: format!("expected length/twist, got {token:?}"),
        })?;
        weights.push(EdgeWeight {
            length: parse_f64(line, "weights", l)?,
            twist: parse_f64(line, "weights", t)?,
        });
    }
    if weights.len() != pairing.n_edges() {
        return Err(Error::Parse {
            line,
            field: "weights".to_string(),
            message: format!(
                "expected {} weights, got {}",
                pairing.n_edges(),
                weights.len()
            ),
        });
    }

    Ok(WeightedSurfaceGraph {
        pairing,
        weights,
        law: WeightLaw { length, twist },
        seed,
    })
}

/// All perfect matchings of `3 * n_vertices` half-edges; test oracle for
/// uniformity checks (15 matchings at n=2, 10395 at n=4).
pub fn enumerate_matchings(n_vertices: usize) -> Vec<Vec<(HalfEdgeId, HalfEdgeId)>> {
    let total = n_vertices * 3;
    let mut out = Vec::new();
    let mut current = Vec::new();
    let mut free: Vec<HalfEdgeId> = (0..total as u32).collect();
    fn recurse(
        free: &mut Vec<HalfEdgeId>,
        current: &mut Vec<(HalfEdgeId, HalfEdgeId)>,
        out: &mut Vec<Vec<(HalfEdgeId, HalfEdgeId)>>,
    ) {
        if free.is_empty() {
            out.push(current.clone());
            return;
        }
        let a = free[0];
        free.remove(0);
        for j in 0..free.len() {
            let b = free.remove(j);
            current.push((a, b));
            recurse(free, current, out);
            current.pop();
            free.insert(j, b);
        }
        free.insert(0, a);
    }
    recurse(&mut free, &mut current, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream_indexed, Domain};

    fn unit_law() -> WeightLaw {
        WeightLaw {
            length: LengthLaw::PointMass(2.0),
            twist: TwistLaw::Zero,
        }
    }

    #[test]
    fn configuration_covers_each_half_edge_once() {
        let mut rng = stream_indexed(1, Domain::Pairing, 0);
        for n in [2usize, 4, 6, 10] {
            let p = sample_configuration(n, &mut rng).unwrap();
            assert_eq!(p.n_edges(), 3 * n / 2);
            let table = p.edge_of_half_edge();
            assert!(table.iter().all(|&e| e != usize::MAX));
        }
        assert!(sample_configuration(3, &mut rng).is_err());
        assert!(sample_configuration(0, &mut rng).is_err());
    }

    #[test]
    fn edge_count_matches_genus() {
        let mut rng = stream_indexed(2, Domain::Pairing, 0);
        for genus in [2usize, 5, 11] {
            let g = sample_surface(genus, &unit_law(), 9).unwrap();
            assert_eq!(g.pairing.n_vertices(), 2 * genus - 2);
            assert_eq!(g.pairing.n_edges(), 3 * genus - 3);
            assert_eq!(g.genus(), genus);
        }
        let _ = &mut rng;
    }

    #[test]
    fn fifteen_matchings_at_two_vertices() {
        let all = enumerate_matchings(2);
        assert_eq!(all.len(), 15);
        // Every 2-vertex matching yields a connected multigraph: three
        // half-edges per vertex cannot pair off internally.
        for m in &all {
            let p = Pairing::from_pairs(2, m.clone()).unwrap();
            let g = assign_weights(
                &p,
                &unit_law(),
                &mut stream_indexed(0, Domain::Weights, 0),
                0,
            )
            .unwrap();
            let (connected, comps) = connectivity(&g);
            assert!(connected, "matching {m:?} gave {comps} components");
        }
    }

    #[test]
    fn point_mass_weights_are_degenerate() {
        let mut rng = stream_indexed(3, Domain::Pairing, 0);
        let p = sample_configuration(4, &mut rng).unwrap();
        let g = assign_weights(
            &p,
            &unit_law(),
            &mut stream_indexed(3, Domain::Weights, 0),
            3,
        )
        .unwrap();
        for w in &g.weights {
            assert_eq!(w.length, 2.0);
            assert_eq!(w.twist, 0.0);
            assert_eq!(w.arc_twist(), 0.0);
        }
        let shape = g.shape_of(0).unwrap();
        assert_eq!(shape.half_lengths(), [1.0, 1.0, 1.0]);
    }

    #[test]
    fn arc_twist_consistency() {
        let w = EdgeWeight {
            length: 3.5,
            twist: 1.25,
        };
        let back = w.arc_twist() / w.length * std::f64::consts::TAU;
        assert!((back - w.twist).abs() < 1e-12);
        assert!(w.arc_twist() >= 0.0 && w.arc_twist() < w.length);
    }

    #[test]
    fn same_seed_same_graph() {
        let law = WeightLaw {
            length: LengthLaw::Uniform(1.0, 4.0),
            twist: TwistLaw::UniformCircle,
        };
        let a = sample_surface(7, &law, 123).unwrap();
        let b = sample_surface(7, &law, 123).unwrap();
        assert_eq!(a, b);
        let c = sample_surface(7, &law, 124).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn serialization_round_trip_and_stability() {
        let law = WeightLaw {
            length: LengthLaw::LogUniform(0.7, 5.0),
            twist: TwistLaw::UniformCircle,
        };
        for seed in 0..100u64 {
            let g = sample_surface(3, &law, seed).unwrap();
            let text = serialize(&g);
            let back = deserialize(&text).unwrap();
            assert_eq!(g, back);
            assert_eq!(text, serialize(&back));
        }
    }

    #[test]
    fn hand_written_record_parses() {
        let text = "hypsurf-surface v1\n\
                    genus 2\n\
                    seed 7\n\
                    length point_mass 2.0000000000000000e0\n\
                    twist zero\n\
                    pairing 0:0-0:1 0:2-1:0 1:1-1:2\n\
                    weights 2.0000000000000000e0/0.0000000000000000e0 \
                    2.0000000000000000e0/0.0000000000000000e0 \
                    2.0000000000000000e0/0.0000000000000000e0\n";
        let g = deserialize(text).unwrap();
        assert_eq!(g.genus(), 2);
        assert_eq!(
            g.pairing.pairs(),
            &[(0, 1), (2, 3), (4, 5)],
            "loop at vertex 0, bridge, loop at vertex 1"
        );
        let (connected, _) = connectivity(&g);
        assert!(connected);
    }

    #[test]
    fn malformed_records_report_line_and_field() {
        let bad = "hypsurf-surface v1\ngenus 2\nseed x\n";
        match deserialize(bad) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(field, "seed");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
        let bad = "hypsurf-surface v1\ngenus 2\nseed 1\n\
                   length uniform 1.0 2.0\ntwist uniform\n\
                   pairing 0:0-0:1 0:2-9:0 1:1-1:2\nweights 1.0/0.0 1.0/0.0 1.0/0.0\n";
        match deserialize(bad) {
            Err(Error::Parse { line, field, .. }) => {
                assert_eq!(line, 6);
                assert_eq!(field, "pairing");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }
}
