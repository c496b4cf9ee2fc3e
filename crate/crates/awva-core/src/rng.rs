//! Portable pseudo-random number generation.
//!
//! The noise contract is bit-level reproducibility from a seed, independent of
//! crate versions, so the generator is pinned here: xoshiro256** seeded by
//! expanding the 64-bit seed with SplitMix64 (the seeding recommended by the
//! xoshiro authors), and Gaussian samples via the Box-Muller transform with a
//! fixed consumption order of two uniforms per sample pair.

/// SplitMix64 stream, used for state expansion and sub-seed derivation.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
}

/// xoshiro256** generator.
#[derive(Debug, Clone)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    /// Seed the full 256-bit state from a 64-bit seed via SplitMix64.
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        Self { s: [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()] }
    }

    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }
}

/// Standard-normal sampler: Box-Muller over xoshiro256** uniforms.
///
/// Each pair of raw draws `(a, b)` becomes `u1 = ((a >> 11) + 1) * 2⁻⁵³` in
/// (0, 1] and `u2 = (b >> 11) * 2⁻⁵³` in [0, 1); the pair of normals
/// `r·cos(2πu2), r·sin(2πu2)` with `r = sqrt(-2 ln u1)` is consumed in order.
#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: Xoshiro256StarStar,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64) -> Self {
        Self { rng: Xoshiro256StarStar::from_seed(seed), spare: None }
    }

    pub fn next_sample(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        let a = self.rng.next_u64();
        let b = self.rng.next_u64();
        let u1 = ((a >> 11) + 1) as f64 * SCALE;
        let u2 = (b >> 11) as f64 * SCALE;
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn xoshiro_matches_reference_outputs() {
        // Golden values from an independent integer-exact implementation of
        // SplitMix64 seeding + xoshiro256**.
        let cases: [(u64, [u64; 5]); 3] = [
            (
                0,
                [
                    0x99ec5f36cb75f2b4,
                    0xbf6e1f784956452a,
                    0x1a5f849d4933e6e0,
                    0x6aa594f1262d2d2c,
                    0xbba5ad4a1f842e59,
                ],
            ),
            (
                1,
                [
                    0xb3f2af6d0fc710c5,
                    0x853b559647364cea,
                    0x92f89756082a4514,
                    0x642e1c7bc266a3a7,
                    0xb27a48e29a233673,
                ],
            ),
            (
                600,
                [
                    0x28e8accbea76a273,
                    0x7bb575faea47ced6,
                    0xeeee7d0b219e5692,
                    0x79afec2ba387cd11,
                    0xc3b3479fccbe7f5a,
                ],
            ),
        ];
        for (seed, expect) in cases {
            let mut rng = Xoshiro256StarStar::from_seed(seed);
            for (i, e) in expect.iter().enumerate() {
                assert_eq!(rng.next_u64(), *e, "seed {seed}, output {i}");
            }
        }
    }

    #[test]
    fn gaussian_stream_matches_reference_transform() {
        // Same golden path computed outside Rust; transcendental rounding may
        // differ in the last ulp, hence the tolerance.
        let expect0 = [
            -0.01410679738124918,
            -1.0085864725210538,
            -1.845895087695827,
            1.0669282078900473,
        ];
        let expect600 = [
            -1.9045017189966598,
            0.20132922442126616,
            -0.36703384857050453,
            0.05732751106520374,
        ];
        for (seed, expect) in [(0u64, expect0), (600u64, expect600)] {
            let mut g = GaussianStream::new(seed);
            for (i, e) in expect.iter().enumerate() {
                let z = g.next_sample();
                assert!((z - e).abs() <= 1e-14 * e.abs().max(1.0), "seed {seed} sample {i}: {z}");
            }
        }
    }

    #[test]
    fn streams_with_same_seed_agree_bitwise() {
        let mut a = GaussianStream::new(42);
        let mut b = GaussianStream::new(42);
        for _ in 0..1001 {
            assert_eq!(a.next_sample().to_bits(), b.next_sample().to_bits());
        }
    }
}
