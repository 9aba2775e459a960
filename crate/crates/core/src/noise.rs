//! Reproducible Gaussian sub-streams.
//!
//! Every replicate gets a 256-bit ChaCha8 key derived from
//! `(base_seed, sigma_index, replicate)` by SplitMix64 mixing. Within a
//! replicate each particle owns the stream `(side << 32) | particle`, and
//! the step index is the position inside that stream, so the increment for
//! `(seed, side, particle, step)` never depends on scheduling.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Identifies one Monte Carlo replicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ReplicateKey {
    pub base_seed: u64,
    pub sigma_index: u64,
    pub replicate: u64,
}

impl ReplicateKey {
    pub fn new(base_seed: u64, sigma_index: u64, replicate: u64) -> Self {
        ReplicateKey {
            base_seed,
            sigma_index,
            replicate,
        }
    }

    fn key_bytes(&self) -> [u8; 32] {
        let mut s = self.base_seed;
        let a = splitmix64(&mut s);
        let mut s = a ^ self.sigma_index.wrapping_mul(0xD1B5_4A32_D192_ED03);
        let b = splitmix64(&mut s);
        let mut s = b ^ self.replicate.wrapping_mul(0x8CB9_2BA7_2F3D_8DD7);
        let mut out = [0u8; 32];
        for chunk in out.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut s).to_le_bytes());
        }
        out
    }

    /// Raw generator for `(side, particle)`.
    pub fn rng(&self, side: u32, particle: u32) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::from_seed(self.key_bytes());
        rng.set_stream((u64::from(side) << 32) | u64::from(particle));
        rng
    }

    pub fn gaussian(&self, side: u32, particle: u32) -> Gaussian {
        Gaussian {
            rng: self.rng(side, particle),
        }
    }
}

/// Side tag for auxiliary streams (bootstrap, multistart perturbations).
pub const AUX_SIDE: u32 = u32::MAX;

pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on the open interval (0, 1) from the top 52 bits.
#[inline]
pub fn open_unit(u: u64) -> f64 {
    ((u >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Standard normal draws by inverse CDF.
#[derive(Debug, Clone)]
pub struct Gaussian {
    rng: ChaCha8Rng,
}

impl Gaussian {
    #[inline]
    pub fn sample(&mut self) -> f64 {
        inverse_normal_cdf(open_unit(self.rng.next_u64()))
    }

    pub fn uniform(&mut self) -> f64 {
        open_unit(self.rng.next_u64())
    }
}

/// Wichura's AS241 (PPND16), relative accuracy about 1e-16 on (0, 1).
#[allow(clippy::excessive_precision)]
pub fn inverse_normal_cdf(p: f64) -> f64 {
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        return q
            * (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r
                + 67265.770927008700853)
                * r
                + 45921.953931549871457)
                * r
                + 13731.693765509461125)
                * r
                + 1971.5909503065514427)
                * r
                + 133.14166789178437745)
                * r
                + 3.387132872796366608)
            / (((((((r * 5226.495278852545925 + 28729.085735721942674) * r
                + 39307.89580009271061)
                * r
                + 21213.794301586595867)
                * r
                + 5394.1960214247511077)
                * r
                + 687.1870074920579083)
                * r
                + 42.313330701600911252)
                * r
                + 1.0);
    }
    let mut r = if q < 0.0 { p } else { 1.0 - p };
    r = (-r.ln()).sqrt();
    let val = if r <= 5.0 {
        r -= 1.6;
        (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r
            + 0.24178072517745061177)
            * r
            + 1.27045825245236838258)
            * r
            + 3.64784832476320460504)
            * r
            + 5.7694972214606914055)
            * r
            + 4.6303378461565452959)
            * r
            + 1.42343711074968357734)
            / (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r
                + 0.0151986665636164571966)
                * r
                + 0.14810397642748007459)
                * r
                + 0.68976733498510000455)
                * r
                + 1.6763848301838038494)
                * r
                + 2.05319162663775882187)
                * r
                + 1.0)
    } else {
        r -= 5.0;
        (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r
            + 0.0012426609473880784386)
            * r
            + 0.026532189526576123093)
            * r
            + 0.29656057182850489123)
            * r
            + 1.7848265399172913358)
            * r
            + 5.4637849111641143699)
            * r
            + 6.6579046435011037772)
            / (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r
                + 1.8463183175100546818e-5)
                * r
                + 7.868691311456132591e-4)
                * r
                + 0.0148753612908506148525)
                * r
                + 0.13692988092273580531)
                * r
                + 0.59983220655588793769)
                * r
                + 1.0)
    };
    if q < 0.0 {
        -val
    } else {
        val
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inverse_cdf_symmetry_and_center() {
        assert_eq!(inverse_normal_cdf(0.5), 0.0);
        for p in [1e-5, 0.01, 0.2, 0.4] {
            assert!(
                (inverse_normal_cdf(p) + inverse_normal_cdf(1.0 - p)).abs()
                    < 1e-8 * inverse_normal_cdf(p).abs().max(1.0)
            );
        }
        assert!((inverse_normal_cdf(0.975) - 1.959_963_984_540_054).abs() < 1e-14);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let k = ReplicateKey::new(42, 0, 3);
        let a: Vec<f64> = (0..8)
            .map({
                let mut g = k.gaussian(0, 0);
                move |_| g.sample()
            })
            .collect();
        let b: Vec<f64> = (0..8)
            .map({
                let mut g = k.gaussian(0, 0);
                move |_| g.sample()
            })
            .collect();
        assert_eq!(a, b);
        let mut other = [
            k.gaussian(1, 0),
            k.gaussian(0, 1),
            ReplicateKey::new(42, 1, 3).gaussian(0, 0),
            ReplicateKey::new(43, 0, 3).gaussian(0, 0),
        ];
        for g in other.iter_mut() {
            assert_ne!(g.sample(), a[0]);
        }
    }

    #[test]
    fn open_unit_never_hits_endpoints() {
        assert!(open_unit(0) > 0.0);
        assert!(open_unit(u64::MAX) < 1.0);
        assert!(inverse_normal_cdf(open_unit(0)).is_finite());
        assert!(inverse_normal_cdf(open_unit(u64::MAX)).is_finite());
    }

    #[test]
    fn sample_moments() {
        let mut g = ReplicateKey::new(7, 0, 0).gaussian(0, 0);
        let n = 200_000;
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let z = g.sample();
            s1 += z;
            s2 += z * z;
        }
        let mean = s1 / n as f64;
        let var = s2 / n as f64 - mean * mean;
        assert!(mean.abs() < 5.0 / (n as f64).sqrt());
        assert!((var - 1.0).abs() < 5.0 * (2.0 / n as f64).sqrt());
    }
}
