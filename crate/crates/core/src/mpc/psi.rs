//! Semi-honest PSI by commutative blinding (Diffie–Hellman style).
//!
//! Elements are hashed into the quadratic-residue subgroup of a 256-bit safe
//! prime `p = 2q + 1`, whose order `q` is prime. Each party raises hashes to
//! a secret exponent; since `(h^α)^β = (h^β)^α`, doubly blinded values match
//! exactly on common elements and reveal nothing else. Cost is linear in
//! `|A| + |B|` exponentiations.

use std::collections::{HashMap, HashSet};

use num_bigint::{BigUint, RandBigInt};
use num_traits::One;
use rand::RngCore;
use sha2::{Digest, Sha256};

use super::transcript::{decode_bigs, decode_u64s, encode_bigs, encode_u64s};
use super::{AgencyId, Bus, MpcError};

const SAFE_PRIME_HEX: &str = "9cd22e5fafee8d5448d94582e1f18a15399779fc35e51cb26ac32737afddf1ef";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PsiGroup {
    pub p: BigUint,
    /// Prime order of the QR subgroup, `(p − 1) / 2`.
    pub q: BigUint,
}

impl Default for PsiGroup {
    fn default() -> Self {
        let p = BigUint::parse_bytes(SAFE_PRIME_HEX.as_bytes(), 16).expect("valid hex");
        let q = (&p - 1u32) >> 1;
        Self { p, q }
    }
}

impl PsiGroup {
    /// `H(x) = (SHA-256(domain ‖ x) mod p)²`, a QR and never the identity
    /// for any realistic input.
    pub fn hash(&self, domain: &[u8], id: u64) -> BigUint {
        let digest = Sha256::new().chain_update(domain).chain_update(id.to_le_bytes()).finalize();
        let h = BigUint::from_bytes_be(&digest) % &self.p;
        h.modpow(&BigUint::from(2u32), &self.p)
    }

    fn exponent<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        rng.gen_biguint_range(&BigUint::one(), &self.q)
    }
}

fn canonical(set: &[u64]) -> Vec<u64> {
    let mut v = set.to_vec();
    v.sort_unstable();
    v.dedup();
    v
}

/// Run PSI between `a` (receiver of the result first) and `b` over `bus`.
/// Both parties end up with the sorted intersection.
pub fn psi_on_bus<R: RngCore + ?Sized>(
    bus: &mut Bus,
    a: AgencyId,
    b: AgencyId,
    set_a: &[u64],
    set_b: &[u64],
    domain: &[u8],
    rng: &mut R,
) -> Result<Vec<u64>, MpcError> {
    let group = PsiGroup::default();
    let set_a = canonical(set_a);
    let set_b = canonical(set_b);

    // a: blind own hashes
    let alpha = group.exponent(rng);
    let blinded_a: Vec<BigUint> = set_a.iter().map(|&x| group.hash(domain, x).modpow(&alpha, &group.p)).collect();
    bus.next_round();
    bus.send(a, b, "psi-blinded", encode_bigs(&blinded_a));

    // b: re-blind a's values in order, blind own hashes and sort them
    let beta = group.exponent(rng);
    let received = decode_bigs(bus.recv(b, "psi-blinded")?);
    let double_a: Vec<BigUint> = received.iter().map(|h| h.modpow(&beta, &group.p)).collect();
    let mut blinded_b: Vec<BigUint> = set_b.iter().map(|&y| group.hash(domain, y).modpow(&beta, &group.p)).collect();
    blinded_b.sort();
    bus.next_round();
    bus.send(b, a, "psi-double-blinded", encode_bigs(&double_a));
    bus.send(b, a, "psi-blinded", encode_bigs(&blinded_b));

    // a: match
    let double_a = decode_bigs(bus.recv(a, "psi-double-blinded")?);
    let from_b = decode_bigs(bus.recv(a, "psi-blinded")?);
    if double_a.len() != set_a.len() {
        return Err(MpcError::Protocol("double-blinded reply has the wrong length".into()));
    }
    let double_b: HashSet<BigUint> = from_b.iter().map(|h| h.modpow(&alpha, &group.p)).collect();
    let index: HashMap<&BigUint, u64> = double_a.iter().zip(&set_a).map(|(h, &x)| (h, x)).collect();
    let mut common: Vec<u64> = index
        .iter()
        .filter(|(h, _)| double_b.contains(**h))
        .map(|(_, &x)| x)
        .collect();
    common.sort_unstable();
    bus.next_round();
    bus.send(a, b, "psi-intersection", encode_u64s(&common));
    let learned_by_b = decode_u64s(bus.recv(b, "psi-intersection")?);
    debug_assert_eq!(learned_by_b, common);
    Ok(common)
}

/// Two-party PSI on a private bus.
pub fn psi<R: RngCore + ?Sized>(set_a: &[u64], set_b: &[u64], rng: &mut R) -> Result<Vec<u64>, MpcError> {
    let mut bus = Bus::new(2);
    psi_on_bus(&mut bus, AgencyId(0), AgencyId(1), set_a, set_b, b"psi", rng)
}
