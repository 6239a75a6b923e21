//! Seed derivation and weight-law sampling.
//!
//! Every random quantity in the crate is drawn from a ChaCha stream keyed by
//! a (master seed, domain tag, counters) triple through a splitmix-style
//! mixer, so adding trials never perturbs earlier trials and lazily grown
//! trees are traversal-order independent.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

/// splitmix64 finalizer; a solid 64-bit mixer.
fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn combine(a: u64, b: u64) -> u64 {
    mix(a ^ mix(b))
}

/// Domain tags keeping unrelated streams apart.
#[derive(Debug, Clone, Copy)]
pub enum Domain {
    Pairing,
    Weights,
    Trial,
    TreeEdge,
    Bootstrap,
}

impl Domain {
    fn tag(self) -> u64 {
        match self {
            Domain::Pairing => 0x5041_4952,
            Domain::Weights => 0x5745_4947,
            Domain::Trial => 0x5452_4941,
            Domain::TreeEdge => 0x5452_4545,
            Domain::Bootstrap => 0x424f_4f54,
        }
    }
}

/// Stream for `(seed, domain)`.
pub fn stream(seed: u64, domain: Domain) -> Stream {
    ChaCha8Rng::seed_from_u64(combine(seed, domain.tag()))
}

/// Stream for `(seed, domain, counter)`; the counter-based split used for
/// per-trial and per-step derivations.
pub fn stream_indexed(seed: u64, domain: Domain, index: u64) -> Stream {
    ChaCha8Rng::seed_from_u64(combine(combine(seed, domain.tag()), index))
}

/// Per-trial seed derived from a master seed.
pub fn trial_seed(master: u64, trial: u64) -> u64 {
    combine(combine(master, Domain::Trial.tag()), trial)
}

/// Stream keyed by a tree-node path (see `tree::NodePath` encoding).
pub fn stream_path(seed: u64, path_hi: u64, path_lo: u64) -> Stream {
    let k = combine(combine(combine(seed, Domain::TreeEdge.tag()), path_hi), path_lo);
    ChaCha8Rng::seed_from_u64(k)
}

/// Length component of a weight law, over full boundary lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthLaw {
    /// All boundary lengths equal to the given value.
    PointMass(f64),
    /// Uniform on `[lo, hi]`.
    Uniform(f64, f64),
    /// `exp(Uniform(ln lo, ln hi))`.
    LogUniform(f64, f64),
}

/// Twist component, over `[0, 2*pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TwistLaw {
    Zero,
    UniformCircle,
}

/// Joint law of the per-edge (length, twist) weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightLaw {
    pub length: LengthLaw,
    pub twist: TwistLaw,
}

impl WeightLaw {
    pub fn validate(&self) -> crate::error::Result<()> {
        let (lo, hi) = self.length_support();
        if !(lo > 0.0) || !(hi >= lo) || !hi.is_finite() {
            return Err(crate::error::Error::invalid(format!(
                "length law support must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
            )));
        }
        Ok(())
    }

    /// Support of the boundary-length distribution, `[2*l_minus, 2*l_plus]`.
    pub fn length_support(&self) -> (f64, f64) {
        match self.length {
            LengthLaw::PointMass(a) => (a, a),
            LengthLaw::Uniform(lo, hi) | LengthLaw::LogUniform(lo, hi) => (lo, hi),
        }
    }

    /// Support in half-length units `[l_minus, l_plus]`.
    pub fn half_length_support(&self) -> (f64, f64) {
        let (lo, hi) = self.length_support();
        (lo / 2.0, hi / 2.0)
    }

    pub fn sample_length(&self, rng: &mut impl Rng) -> f64 {
        match self.length {
            LengthLaw::PointMass(a) => a,
            LengthLaw::Uniform(lo, hi) => {
                if lo == hi {
                    lo
                } else {
                    rng.gen_range(lo..hi)
                }
            }
            LengthLaw::LogUniform(lo, hi) => {
                if lo == hi {
                    lo
                } else {
                    rng.gen_range(lo.ln()..hi.ln()).exp()
                }
            }
        }
    }

    pub fn sample_twist(&self, rng: &mut impl Rng) -> f64 {
        match self.twist {
            TwistLaw::Zero => 0.0,
            TwistLaw::UniformCircle => rng.gen_range(0.0..std::f64::consts::TAU),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_deterministic_and_separated() {
        let mut a = stream_indexed(42, Domain::Weights, 7);
        let mut b = stream_indexed(42, Domain::Weights, 7);
        let mut c = stream_indexed(42, Domain::Weights, 8);
        let xa: u64 = a.gen();
        let xb: u64 = b.gen();
        let xc: u64 = c.gen();
        assert_eq!(xa, xb);
        assert_ne!(xa, xc);
    }

    #[test]
    fn law_supports() {
        let law = WeightLaw {
            length: LengthLaw::Uniform(1.0, 4.0),
            twist: TwistLaw::UniformCircle,
        };
        assert_eq!(law.half_length_support(), (0.5, 2.0));
        law.validate().unwrap();
        let bad = WeightLaw {
            length: LengthLaw::Uniform(0.0, 1.0),
            twist: TwistLaw::Zero,
        };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn log_uniform_stays_in_support() {
        let law = WeightLaw {
            length: LengthLaw::LogUniform(0.5, 8.0),
            twist: TwistLaw::Zero,
        };
        let mut rng = stream(1, Domain::Weights);
        for _ in 0..1000 {
            let x = law.sample_length(&mut rng);
            assert!((0.5..=8.0).contains(&x));
        }
    }
}
