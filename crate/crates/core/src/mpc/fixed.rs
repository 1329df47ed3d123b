use num_bigint::BigUint;
use num_traits::ToPrimitive;

use super::MpcError;

/// Longest supported walk.
pub const MAX_STEPS: u32 = 40;

/// Fixed-point codec state: `c` fractional bits, `k` walk steps, plaintext
/// modulus `n`.
///
/// A vector starts at scale `2^c` and every multiplication by an encoded
/// transition entry adds `c` bits, so after `k` steps values sit at scale
/// `2^{(k+1)c}`. Because the encoded vector mass never exceeds its scale,
/// `2^{(k+1)c} < n` guarantees nothing wraps modulo `n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FixedPointParams {
    c: u32,
    k: u32,
    n: BigUint,
}

impl FixedPointParams {
    pub fn new(c: u32, k: u32, n: BigUint) -> Result<Self, MpcError> {
        if c == 0 || c > 62 {
            return Err(MpcError::Encoding(c as f64));
        }
        if k > MAX_STEPS {
            return Err(MpcError::TooManySteps(k));
        }
        let needed_bits = (k as u64 + 1) * c as u64;
        // 2^needed < n  ⇔  n > 2^needed  ⇔  n.bits() > needed + 1, or n.bits() == needed + 1 with n ≠ 2^needed
        let fits = n.bits() > needed_bits + 1 || (n.bits() == needed_bits + 1 && n.trailing_zeros() != Some(needed_bits));
        if !fits {
            return Err(MpcError::Headroom {
                k,
                c,
                needed_bits,
                modulus_bits: n.bits(),
            });
        }
        Ok(Self { c, k, n })
    }

    pub fn c(&self) -> u32 {
        self.c
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n(&self) -> &BigUint {
        &self.n
    }

    /// `2^c`.
    pub fn one(&self) -> u64 {
        1u64 << self.c
    }
}

/// `⌊x · 2^c⌋` for `x ≥ 0`.
pub fn fixed_encode(x: f64, c: u32) -> Result<u64, MpcError> {
    if !(x >= 0.0 && x.is_finite()) || c > 62 {
        return Err(MpcError::Encoding(x));
    }
    let scaled = (x * (1u64 << c) as f64).floor();
    if scaled >= 2f64.powi(63) {
        return Err(MpcError::Encoding(x));
    }
    Ok(scaled as u64)
}

/// `v / 2^{scale_power · c}`.
pub fn fixed_decode(v: &BigUint, scale_power: u32, c: u32) -> f64 {
    let bits = v.bits() as i64;
    let shift = scale_power as i64 * c as i64;
    // keep 64 significant bits, then scale exactly
    let drop = (bits - 64).max(0);
    let top = (v >> drop as u64).to_u64().expect("at most 64 bits") as f64;
    top * 2f64.powi((drop - shift) as i32)
}
