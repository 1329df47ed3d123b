use num_bigint::BigUint;
use num_traits::Zero;
use rand::{CryptoRng, RngCore};

use super::paillier::{combine, Ciphertext, KeyShare, PartialDecryption, PublicKey};
use super::transcript::{decode_bigs, encode_bigs};
use super::{fixed_decode, fixed_encode, AgencyId, Bus, FixedPointParams, MpcError};

/// Sparse fixed-point transition entries `(row, col, ⌊2^c·T[row][col]⌋)`
/// contributed by one agency.
pub type TransitionPart = Vec<(usize, usize, u64)>;

/// Paillier ciphertexts of a fixed-point vector at scale `2^{scale_power·c}`.
#[derive(Debug, Clone, PartialEq)]
pub struct EncryptedVector {
    pub entries: Vec<Ciphertext>,
    pub scale_power: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WalkOutput {
    /// Jointly decrypted integers.
    pub values: Vec<BigUint>,
    /// `values / 2^{scale_power·c}`.
    pub decoded: Vec<f64>,
    pub scale_power: u32,
    /// Declared L∞ (in fact L1) bound on the distance to the exact walk.
    pub error_bound: f64,
}

/// L1 error of a `k`-step fixed-point walk against exact arithmetic:
/// `2^{−c}·(nnz(v₀) + k·d_max)` plus float slack. Encoding `v₀` loses less
/// than `2^{−c}` per non-zero entry; each step loses less than `2^{−c}`
/// per column entry, at most `d_max` of them per unit of mass, and the
/// column-substochastic transition never amplifies earlier error in L1.
pub fn walk_error_bound(nnz_v0: usize, k: u32, d_max: usize, c: u32) -> f64 {
    2f64.powi(-(c as i32)) * (nnz_v0 as f64 + k as f64 * d_max as f64) + 1e-12
}

/// The same integer pipeline without encryption: `v ← Σᵢ Tᵢ v`, `k` times.
pub fn plaintext_fixed_walk(v0: &[u64], parts: &[TransitionPart], k: u32) -> Vec<BigUint> {
    let mut v: Vec<BigUint> = v0.iter().map(|&x| BigUint::from(x)).collect();
    for _ in 0..k {
        let mut next = vec![BigUint::zero(); v.len()];
        for part in parts {
            for &(r, j, t) in part {
                next[r] += &v[j] * t;
            }
        }
        v = next;
    }
    v
}

fn encode_vector(v0: &[f64], c: u32) -> Result<Vec<u64>, MpcError> {
    v0.iter().map(|&x| fixed_encode(x, c)).collect()
}

/// `E(Tᵢ v)` for one agency, rerandomised so the aggregator cannot test
/// guesses about the agency's edges.
fn partial_product<R: RngCore + CryptoRng + ?Sized>(
    pk: &PublicKey,
    v: &[Ciphertext],
    part: &TransitionPart,
    rng: &mut R,
) -> Vec<Ciphertext> {
    let mut out: Vec<Option<Ciphertext>> = vec![None; v.len()];
    for &(r, j, t) in part {
        let term = pk.mul_plain(&v[j], &BigUint::from(t));
        out[r] = Some(match out[r].take() {
            Some(acc) => pk.add(&acc, &term),
            None => term,
        });
    }
    out.into_iter()
        .map(|c| {
            let fresh = pk.encrypt(&BigUint::zero(), rng);
            match c {
                Some(c) => pk.add(&c, &fresh),
                None => fresh,
            }
        })
        .collect()
}

/// `k` encrypted walk steps over the agencies' summed transition parts,
/// followed by joint decryption.
///
/// Agency 1 supplies and encrypts `v0` and aggregates; each step every
/// agency returns `E(Tᵢ v)`, the aggregator multiplies them into `E(T v)`
/// and broadcasts it. At the end all agencies send partial decryptions to
/// agency 1.
pub fn distributed_walk<R: RngCore + CryptoRng + ?Sized>(
    bus: &mut Bus,
    pk: &PublicKey,
    shares: &[KeyShare],
    v0: &[f64],
    parts: &[TransitionPart],
    params: &FixedPointParams,
    rng: &mut R,
) -> Result<WalkOutput, MpcError> {
    let m = parts.len();
    if m == 0 || shares.len() != m {
        return Err(MpcError::TooFewParties { got: shares.len().min(m), need: m.max(1) });
    }
    if params.n() != pk.n() {
        return Err(MpcError::Protocol("fixed-point parameters belong to a different modulus".into()));
    }
    let dim = v0.len();
    if parts.iter().flatten().any(|&(r, j, _)| r >= dim || j >= dim) {
        return Err(MpcError::Dimension(format!("transition entry outside a {dim}-dimensional vector")));
    }
    let c = params.c();
    let aggregator = AgencyId(0);

    let encoded = encode_vector(v0, c)?;
    let mut current = EncryptedVector {
        entries: encoded.iter().map(|&x| pk.encrypt(&BigUint::from(x), rng)).collect(),
        scale_power: 1,
    };
    bus.next_round();
    for i in 1..m {
        bus.send(aggregator, AgencyId(i), "encrypted-vector", encode_bigs(&cipher_ints(&current)));
    }

    for _ in 0..params.k() {
        bus.next_round();
        // each agency works on the vector it received
        let mut partials = Vec::with_capacity(m);
        for (i, part) in parts.iter().enumerate() {
            let v = if i == 0 {
                current.entries.clone()
            } else {
                to_ciphers(decode_bigs(bus.recv(AgencyId(i), "encrypted-vector")?))
            };
            let p = partial_product(pk, &v, part, rng);
            if i == 0 {
                partials.push(p);
            } else {
                bus.send(AgencyId(i), aggregator, "encrypted-partial", encode_bigs(&p.iter().map(|c| c.0.clone()).collect::<Vec<_>>()));
            }
        }
        for i in 1..m {
            partials.push(to_ciphers(decode_bigs(bus.recv(aggregator, "encrypted-partial")?)));
            let _ = i;
        }
        let mut sum = partials[0].clone();
        for p in &partials[1..] {
            for (s, x) in sum.iter_mut().zip(p) {
                *s = pk.add(s, x);
            }
        }
        current = EncryptedVector {
            entries: sum,
            scale_power: current.scale_power + 1,
        };
        bus.next_round();
        for i in 1..m {
            bus.send(aggregator, AgencyId(i), "encrypted-vector", encode_bigs(&cipher_ints(&current)));
        }
    }

    // joint decryption
    bus.next_round();
    let mut per_entry: Vec<Vec<PartialDecryption>> = vec![Vec::with_capacity(m); dim];
    for (i, share) in shares.iter().enumerate() {
        let v = if i == 0 {
            current.entries.clone()
        } else {
            to_ciphers(decode_bigs(bus.recv(AgencyId(i), "encrypted-vector")?))
        };
        let pd: Vec<BigUint> = v.iter().map(|c| share.partial_decrypt(pk, c).value).collect();
        if i == 0 {
            for (slot, value) in per_entry.iter_mut().zip(pd) {
                slot.push(PartialDecryption { party: share.party, value });
            }
        } else {
            bus.send(AgencyId(i), aggregator, "partial-decryption", encode_bigs(&pd));
        }
    }
    for share in &shares[1..] {
        let pd = decode_bigs(bus.recv(aggregator, "partial-decryption")?);
        for (slot, value) in per_entry.iter_mut().zip(pd) {
            slot.push(PartialDecryption { party: share.party, value });
        }
    }
    let values = per_entry
        .iter()
        .map(|p| combine(pk, m, p))
        .collect::<Result<Vec<_>, _>>()?;
    let decoded = values.iter().map(|v| fixed_decode(v, current.scale_power, c)).collect();
    let nnz = encoded.iter().filter(|&&x| x > 0).count().max(v0.iter().filter(|&&x| x > 0.0).count());
    let d_max = column_degree_max(parts, dim);
    Ok(WalkOutput {
        values,
        decoded,
        scale_power: current.scale_power,
        error_bound: walk_error_bound(nnz, params.k(), d_max, c),
    })
}

fn cipher_ints(v: &EncryptedVector) -> Vec<BigUint> {
    v.entries.iter().map(|c| c.0.clone()).collect()
}

fn to_ciphers(v: Vec<BigUint>) -> Vec<Ciphertext> {
    v.into_iter().map(Ciphertext).collect()
}

/// Largest number of entries in any column of `Σ Tᵢ`, i.e. the max degree.
pub(crate) fn column_degree_max(parts: &[TransitionPart], dim: usize) -> usize {
    let mut count = vec![0usize; dim];
    for &(_, j, _) in parts.iter().flatten() {
        count[j] += 1;
    }
    count.into_iter().max().unwrap_or(0)
}
