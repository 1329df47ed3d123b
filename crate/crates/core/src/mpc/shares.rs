//! Secure sum of per-agency degree counts (a dining-cryptographers style
//! extension): every agency splits its value into `m` uniform additive
//! shares mod `l`, hands one to each agency, and only the sums of received
//! shares are broadcast.

use rand::Rng;

use super::transcript::{decode_u64s, encode_u64s};
use super::{AgencyId, Bus, MpcError};

/// `parties` uniform shares of `secret` modulo `l`.
pub fn split_shares<R: Rng + ?Sized>(secret: u64, parties: usize, l: u64, rng: &mut R) -> Vec<u64> {
    let mut shares: Vec<u64> = (0..parties.saturating_sub(1)).map(|_| rng.gen_range(0..l)).collect();
    let used = shares.iter().fold(0u64, |acc, &s| ((acc as u128 + s as u128) % l as u128) as u64);
    shares.push(((secret % l) as u128 + l as u128 - used as u128) as u64 % l);
    shares
}

/// Element-wise secure sum over the bus: `local[i][v]` is agency `i`'s
/// count for label `v`. Returns the totals mod `l`, which equal the true
/// sums whenever `l` exceeds them.
pub fn shared_degree_sums<R: Rng + ?Sized>(
    bus: &mut Bus,
    local: &[Vec<u64>],
    l: u64,
    rng: &mut R,
) -> Result<Vec<u64>, MpcError> {
    let m = local.len();
    if m == 0 {
        return Err(MpcError::TooFewParties { got: 0, need: 1 });
    }
    if l < 2 {
        return Err(MpcError::ModulusTooSmall { l, bound: 1 });
    }
    let width = local[0].len();
    if local.iter().any(|row| row.len() != width) {
        return Err(MpcError::Dimension("agencies disagree on the label count".into()));
    }
    if let Some(&too_big) = local.iter().flatten().find(|&&d| d >= l) {
        return Err(MpcError::ModulusTooSmall { l, bound: too_big });
    }

    // shares[i][k][v]: what agency i sends to agency k for label v
    bus.next_round();
    let mut own_share = vec![vec![0u64; width]; m];
    for (i, row) in local.iter().enumerate() {
        let mut per_target = vec![vec![0u64; width]; m];
        for (v, &d) in row.iter().enumerate() {
            for (k, s) in split_shares(d, m, l, rng).into_iter().enumerate() {
                per_target[k][v] = s;
            }
        }
        for (k, shares) in per_target.into_iter().enumerate() {
            if k == i {
                own_share[i] = shares;
            } else {
                bus.send(AgencyId(i), AgencyId(k), "degree-shares", encode_u64s(&shares));
            }
        }
    }

    bus.next_round();
    let mut partial = Vec::with_capacity(m);
    for k in 0..m {
        let mut acc = own_share[k].clone();
        for i in 0..m {
            if i == k {
                continue;
            }
            let got = decode_u64s(bus.recv(AgencyId(k), "degree-shares")?);
            for (a, s) in acc.iter_mut().zip(got) {
                *a = ((*a as u128 + s as u128) % l as u128) as u64;
            }
        }
        for j in 0..m {
            if j != k {
                bus.send(AgencyId(k), AgencyId(j), "share-sum", encode_u64s(&acc));
            }
        }
        partial.push(acc);
    }

    // every agency adds the broadcast sums; agency 0's view is returned
    let mut total = partial[0].clone();
    for k in 1..m {
        let got = decode_u64s(bus.recv(AgencyId(0), "share-sum")?);
        for (t, s) in total.iter_mut().zip(got) {
            *t = ((*t as u128 + s as u128) % l as u128) as u64;
        }
        debug_assert_eq!(partial[k].len(), width);
    }
    for k in 1..m {
        let mut view = partial[k].clone();
        for _ in 0..m - 1 {
            let got = decode_u64s(bus.recv(AgencyId(k), "share-sum")?);
            for (t, s) in view.iter_mut().zip(got) {
                *t = ((*t as u128 + s as u128) % l as u128) as u64;
            }
        }
        if view != total {
            return Err(MpcError::Protocol(format!("{} computed a different total", AgencyId(k))));
        }
    }
    Ok(total)
}

/// Secure sum of one value per agency.
pub fn shared_degree_sum<R: Rng + ?Sized>(local_degrees: &[u64], l: u64, rng: &mut R) -> Result<u64, MpcError> {
    let mut bus = Bus::new(local_degrees.len().max(1));
    let local: Vec<Vec<u64>> = local_degrees.iter().map(|&d| vec![d]).collect();
    Ok(shared_degree_sums(&mut bus, &local, l, rng)?[0])
}
