//! Paillier with `g = n + 1` and a dealer-shared decryption exponent.
//!
//! `E(m; r) = (1 + m·n) · rⁿ mod n²`. For joint decryption the exponent
//! `d = λ·(λ⁻¹ mod n)` (so `d ≡ 0 mod λ`, `d ≡ 1 mod n`) is split into
//! additive shares modulo `n·λ`; every party raises the ciphertext to its
//! share and the product of all partials is `(1 + n)ᵐ`, from which
//! `m = L(x) = (x − 1)/n`. Any strict subset of shares yields a value
//! unrelated to the plaintext.

use num_bigint::{BigUint, RandBigInt};
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{CryptoRng, Rng, RngCore};

use super::MpcError;

/// Modulus size. Only 1024 and 2048 bits are accepted for real use.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KeyBits(u32);

impl KeyBits {
    pub fn new(bits: u32) -> Result<Self, MpcError> {
        match bits {
            1024 | 2048 => Ok(Self(bits)),
            other => Err(MpcError::KeyBits(other)),
        }
    }

    /// Any even size of at least 256 bits. Only for tests and benches.
    pub fn insecure(bits: u32) -> Self {
        assert!(bits >= 256 && bits.is_multiple_of(2), "insecure key size must be even and >= 256");
        Self(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ciphertext(pub BigUint);

impl Ciphertext {
    pub fn to_bytes(&self) -> Vec<u8> {
        self.0.to_bytes_be()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PublicKey {
    n: BigUint,
    n2: BigUint,
}

impl PublicKey {
    pub fn n(&self) -> &BigUint {
        &self.n
    }

    pub fn n_squared(&self) -> &BigUint {
        &self.n2
    }

    pub fn bits(&self) -> u64 {
        self.n.bits()
    }

    fn random_unit<R: RngCore + ?Sized>(&self, rng: &mut R) -> BigUint {
        loop {
            let r = rng.gen_biguint_below(&self.n);
            if !r.is_zero() && r.gcd(&self.n).is_one() {
                return r;
            }
        }
    }

    pub fn encrypt<R: RngCore + CryptoRng + ?Sized>(&self, m: &BigUint, rng: &mut R) -> Ciphertext {
        let r = self.random_unit(rng);
        self.encrypt_with(m, &r)
    }

    /// Encryption with explicit randomness `r ∈ ℤ*_n`.
    pub fn encrypt_with(&self, m: &BigUint, r: &BigUint) -> Ciphertext {
        let gm = (BigUint::one() + (m % &self.n) * &self.n) % &self.n2;
        Ciphertext(gm * r.modpow(&self.n, &self.n2) % &self.n2)
    }

    /// `E(x) ⊕ E(y) = E(x + y)`.
    pub fn add(&self, a: &Ciphertext, b: &Ciphertext) -> Ciphertext {
        Ciphertext(&a.0 * &b.0 % &self.n2)
    }

    /// `k ⊗ E(x) = E(k·x)`.
    pub fn mul_plain(&self, c: &Ciphertext, k: &BigUint) -> Ciphertext {
        Ciphertext(c.0.modpow(k, &self.n2))
    }

    /// Deterministic encryption of zero (`r = 1`), the neutral element of `⊕`.
    pub fn zero(&self) -> Ciphertext {
        Ciphertext(BigUint::one())
    }

    /// `L(x) = (x − 1) / n`.
    fn l(&self, x: &BigUint) -> BigUint {
        (x - BigUint::one()) / &self.n
    }
}

#[derive(Debug, Clone)]
pub struct SecretKey {
    lambda: BigUint,
    mu: BigUint,
}

impl SecretKey {
    pub fn decrypt(&self, pk: &PublicKey, c: &Ciphertext) -> BigUint {
        pk.l(&c.0.modpow(&self.lambda, &pk.n2)) * &self.mu % &pk.n
    }
}

/// One party's additive share of the decryption exponent.
#[derive(Debug, Clone)]
pub struct KeyShare {
    pub party: usize,
    pub parties: usize,
    exponent: BigUint,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialDecryption {
    pub party: usize,
    pub value: BigUint,
}

impl KeyShare {
    pub fn partial_decrypt(&self, pk: &PublicKey, c: &Ciphertext) -> PartialDecryption {
        PartialDecryption {
            party: self.party,
            value: c.0.modpow(&self.exponent, &pk.n2),
        }
    }
}

/// Combine partial decryptions. All parties must contribute exactly once.
pub fn combine(pk: &PublicKey, parties: usize, partials: &[PartialDecryption]) -> Result<BigUint, MpcError> {
    let mut seen = vec![false; parties];
    for p in partials {
        if p.party >= parties || seen[p.party] {
            return Err(MpcError::Protocol(format!("unexpected partial decryption from party {}", p.party)));
        }
        seen[p.party] = true;
    }
    if partials.len() != parties {
        return Err(MpcError::MissingShares {
            got: partials.len(),
            need: parties,
        });
    }
    Ok(combine_unchecked(pk, partials))
}

/// The value a coalition would compute from the partials it holds.
pub fn combine_unchecked(pk: &PublicKey, partials: &[PartialDecryption]) -> BigUint {
    let x = partials.iter().fold(BigUint::one(), |acc, p| acc * &p.value % &pk.n2);
    pk.l(&x) % &pk.n
}

fn gen_prime<R: RngCore + ?Sized>(bits: usize, rng: &mut R) -> Result<BigUint, MpcError> {
    struct Adapter<'a, R: RngCore + ?Sized>(&'a mut R);
    impl<R: RngCore + ?Sized> RngCore for Adapter<'_, R> {
        fn next_u32(&mut self) -> u32 {
            self.0.next_u32()
        }
        fn next_u64(&mut self) -> u64 {
            self.0.next_u64()
        }
        fn fill_bytes(&mut self, dest: &mut [u8]) {
            self.0.fill_bytes(dest)
        }
        fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
            self.0.try_fill_bytes(dest)
        }
    }
    let mut adapter = Adapter(rng);
    glass_pumpkin::prime::from_rng(bits, &mut adapter).map_err(|e| MpcError::PrimeGeneration(e.to_string()))
}

fn primes<R: RngCore + ?Sized>(bits: KeyBits, rng: &mut R) -> Result<(BigUint, BigUint), MpcError> {
    let half = bits.bits() as usize / 2;
    for _ in 0..64 {
        let p = gen_prime(half, rng)?;
        let q = gen_prime(half, rng)?;
        if p == q {
            continue;
        }
        let n = &p * &q;
        let phi = (&p - 1u32) * (&q - 1u32);
        if n.bits() == bits.bits() as u64 && n.gcd(&phi).is_one() {
            return Ok((p, q));
        }
    }
    Err(MpcError::PrimeGeneration("no suitable prime pair after 64 attempts".into()))
}

fn lambda_of(p: &BigUint, q: &BigUint) -> BigUint {
    (p - 1u32).lcm(&(q - 1u32))
}

/// Modular inverse by the extended Euclidean algorithm.
pub(crate) fn mod_inverse(a: &BigUint, m: &BigUint) -> Option<BigUint> {
    use num_bigint::BigInt;
    let (a, m) = (BigInt::from(a.clone()), BigInt::from(m.clone()));
    let e = a.extended_gcd(&m);
    if !e.gcd.is_one() {
        return None;
    }
    let x = ((e.x % &m) + &m) % &m;
    x.to_biguint()
}

/// Single-party key pair.
pub fn keygen<R: RngCore + CryptoRng + ?Sized>(bits: KeyBits, rng: &mut R) -> Result<(PublicKey, SecretKey), MpcError> {
    let (p, q) = primes(bits, rng)?;
    let n = &p * &q;
    let lambda = lambda_of(&p, &q);
    let mu = mod_inverse(&lambda, &n).ok_or_else(|| MpcError::PrimeGeneration("λ not invertible mod n".into()))?;
    let pk = PublicKey { n2: &n * &n, n };
    Ok((pk, SecretKey { lambda, mu }))
}

/// Public key and `m` additive shares of the decryption exponent, as a
/// trusted dealer would hand them out. The factorisation is discarded.
pub fn keygen_joint<R: RngCore + CryptoRng + ?Sized>(
    parties: usize,
    bits: KeyBits,
    rng: &mut R,
) -> Result<(PublicKey, Vec<KeyShare>), MpcError> {
    if parties == 0 {
        return Err(MpcError::TooFewParties { got: 0, need: 1 });
    }
    let (p, q) = primes(bits, rng)?;
    let n = &p * &q;
    let lambda = lambda_of(&p, &q);
    let inv = mod_inverse(&(&lambda % &n), &n).ok_or_else(|| MpcError::PrimeGeneration("λ not invertible mod n".into()))?;
    let d = &lambda * inv;
    let order = &n * &lambda;
    let mut shares = Vec::with_capacity(parties);
    let mut acc = BigUint::zero();
    for party in 0..parties - 1 {
        let s = rng.gen_biguint_below(&order);
        acc = (acc + &s) % &order;
        shares.push(KeyShare {
            party,
            parties,
            exponent: s,
        });
    }
    let last = (&d % &order + &order - acc) % &order;
    shares.push(KeyShare {
        party: parties - 1,
        parties,
        exponent: last,
    });
    let pk = PublicKey { n2: &n * &n, n };
    Ok((pk, shares))
}

/// Uniform plaintext below `n`, for tests.
pub fn random_plaintext<R: Rng + ?Sized>(pk: &PublicKey, rng: &mut R) -> BigUint {
    rng.gen_biguint_below(&pk.n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    #[test]
    fn roundtrip_and_homomorphism() {
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let (pk, sk) = keygen(KeyBits::insecure(256), &mut rng).unwrap();
        assert_eq!(pk.bits(), 256);
        let five = pk.encrypt(&BigUint::from(5u32), &mut rng);
        let seven = pk.encrypt(&BigUint::from(7u32), &mut rng);
        assert_eq!(sk.decrypt(&pk, &five), BigUint::from(5u32));
        assert_eq!(sk.decrypt(&pk, &pk.add(&five, &seven)), BigUint::from(12u32));
        assert_eq!(sk.decrypt(&pk, &pk.mul_plain(&seven, &BigUint::from(3u32))), BigUint::from(21u32));
    }

    #[test]
    fn joint_decryption_needs_everyone() {
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        let (pk, shares) = keygen_joint(3, KeyBits::insecure(256), &mut rng).unwrap();
        let c = pk.add(
            &pk.encrypt(&BigUint::from(5u32), &mut rng),
            &pk.encrypt(&BigUint::from(7u32), &mut rng),
        );
        let partials: Vec<_> = shares.iter().map(|s| s.partial_decrypt(&pk, &c)).collect();
        assert_eq!(combine(&pk, 3, &partials).unwrap(), BigUint::from(12u32));
        assert_ne!(combine_unchecked(&pk, &partials[..2]), BigUint::from(12u32));
        assert!(matches!(combine(&pk, 3, &partials[..2]), Err(MpcError::MissingShares { .. })));
    }

    #[test]
    fn single_party_joint_key() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let (pk, shares) = keygen_joint(1, KeyBits::insecure(256), &mut rng).unwrap();
        let m = BigUint::from(123_456u32);
        let c = pk.encrypt(&m, &mut rng);
        assert_eq!(combine(&pk, 1, &[shares[0].partial_decrypt(&pk, &c)]).unwrap(), m);
    }

    #[test]
    fn key_sizes() {
        assert!(KeyBits::new(1024).is_ok());
        assert!(KeyBits::new(2048).is_ok());
        assert_eq!(KeyBits::new(512), Err(MpcError::KeyBits(512)));
    }
}
