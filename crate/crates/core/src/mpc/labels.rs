use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, RngCore};

use super::psi::psi_on_bus;
use super::transcript::{decode_u64s, encode_u64s};
use super::{AgencyId, Bus, MpcError};

/// One agency's slice of the contact graph, in its own identifiers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AgencyShare {
    pub id: AgencyId,
    /// Sorted individuals the agency knows about.
    pub nodes: Vec<u64>,
    /// Sorted encounters `(u, v)`, `u < v`.
    pub edges: Vec<(u64, u64)>,
}

impl AgencyShare {
    pub fn new(id: AgencyId, edges: impl IntoIterator<Item = (u64, u64)>) -> Self {
        let mut e: Vec<(u64, u64)> = edges
            .into_iter()
            .filter(|(u, v)| u != v)
            .map(|(u, v)| (u.min(v), u.max(v)))
            .collect();
        e.sort_unstable();
        e.dedup();
        let nodes: BTreeSet<u64> = e.iter().flat_map(|&(u, v)| [u, v]).collect();
        Self {
            id,
            nodes: nodes.into_iter().collect(),
            edges: e,
        }
    }
}

/// Anonymous labels `0..size` for the union of all agencies' individuals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelSpace {
    pub size: u64,
    /// What each agency knows: labels of its own individuals only.
    pub known: Vec<BTreeMap<u64, u64>>,
    /// `common[(i, j)]` for `i < j`: individuals both agencies hold, as
    /// learned through PSI.
    pub common: BTreeMap<(usize, usize), Vec<u64>>,
}

impl LabelSpace {
    /// The joint map individual → label (an audit view no agency holds).
    pub fn joint(&self) -> BTreeMap<u64, u64> {
        let mut all = BTreeMap::new();
        for m in &self.known {
            all.extend(m.iter().map(|(&k, &v)| (k, v)));
        }
        all
    }

    pub fn label(&self, agency: usize, individual: u64) -> Option<u64> {
        self.known[agency].get(&individual).copied()
    }
}

/// Sequential label assignment. Agency 1 labels its individuals with a
/// random permutation of `0..|V₁|`; agency `j` receives the labels of
/// individuals it shares with earlier agencies and labels the rest with a
/// random permutation of the next free range.
pub fn assign_labels<R: RngCore + ?Sized>(
    bus: &mut Bus,
    agencies: &[AgencyShare],
    rng: &mut R,
) -> Result<LabelSpace, MpcError> {
    let m = agencies.len();
    if m == 0 {
        return Err(MpcError::TooFewParties { got: 0, need: 1 });
    }
    let mut common = BTreeMap::new();
    for j in 1..m {
        for i in 0..j {
            let shared = psi_on_bus(
                bus,
                AgencyId(i),
                AgencyId(j),
                &agencies[i].nodes,
                &agencies[j].nodes,
                b"individuals",
                rng,
            )?;
            common.insert((i, j), shared);
        }
    }

    let mut known: Vec<BTreeMap<u64, u64>> = vec![BTreeMap::new(); m];
    let mut next_free = 0u64;
    for j in 0..m {
        bus.next_round();
        let mut inherited: BTreeMap<u64, u64> = BTreeMap::new();
        for i in 0..j {
            let pairs: Vec<u64> = common[&(i, j)]
                .iter()
                .flat_map(|&x| [x, known[i][&x]])
                .collect();
            bus.send(AgencyId(i), AgencyId(j), "labels", encode_u64s(&pairs));
        }
        if j > 0 {
            bus.send(AgencyId(j - 1), AgencyId(j), "range-start", encode_u64s(&[next_free]));
        }
        for _ in 0..j {
            let got = decode_u64s(bus.recv(AgencyId(j), "labels")?);
            for pair in got.chunks_exact(2) {
                if let Some(prev) = inherited.insert(pair[0], pair[1]) {
                    if prev != pair[1] {
                        return Err(MpcError::LabelCollision(pair[0]));
                    }
                }
            }
        }
        let start = if j > 0 {
            decode_u64s(bus.recv(AgencyId(j), "range-start")?)[0]
        } else {
            0
        };
        let fresh: Vec<u64> = agencies[j]
            .nodes
            .iter()
            .copied()
            .filter(|x| !inherited.contains_key(x))
            .collect();
        let issued = fresh.len() as u64;
        let mut range: Vec<u64> = (start..start + issued).collect();
        range.shuffle(rng);
        let mut mine = inherited;
        for (x, label) in fresh.into_iter().zip(range) {
            mine.insert(x, label);
        }
        next_free = start + issued;
        known[j] = mine;
    }

    let space = LabelSpace {
        size: next_free,
        known,
        common,
    };
    audit(&space)?;
    Ok(space)
}

/// Every individual has one label, labels are distinct and fill `0..size`.
fn audit(space: &LabelSpace) -> Result<(), MpcError> {
    let mut joint: BTreeMap<u64, u64> = BTreeMap::new();
    for m in &space.known {
        for (&x, &l) in m {
            if let Some(prev) = joint.insert(x, l) {
                if prev != l {
                    return Err(MpcError::LabelCollision(x));
                }
            }
        }
    }
    let mut seen = vec![false; space.size as usize];
    for (&x, &l) in &joint {
        if l >= space.size || std::mem::replace(&mut seen[l as usize], true) {
            return Err(MpcError::LabelCollision(x));
        }
    }
    if joint.len() as u64 != space.size {
        return Err(MpcError::Protocol("label range has gaps".into()));
    }
    Ok(())
}

/// Drop duplicate encounters: an edge held by several agencies stays with
/// the lowest-numbered one. Duplicates are found by PSI over edge codes
/// `lo·|V| + hi` in label space, restricted to edges whose endpoints both
/// lie in the pair's common individuals. Returns each agency's retained
/// edges as sorted label pairs.
pub fn dedup_edges<R: Rng + RngCore + ?Sized>(
    bus: &mut Bus,
    agencies: &[AgencyShare],
    labels: &LabelSpace,
    rng: &mut R,
) -> Result<Vec<Vec<(u64, u64)>>, MpcError> {
    let m = agencies.len();
    let size = labels.size;
    let labelled: Vec<Vec<(u64, u64)>> = agencies
        .iter()
        .enumerate()
        .map(|(a, share)| {
            // same order as share.edges; sorted only on return
            share
                .edges
                .iter()
                .map(|&(u, v)| {
                    let (lu, lv) = (labels.known[a][&u], labels.known[a][&v]);
                    (lu.min(lv), lu.max(lv))
                })
                .collect()
        })
        .collect();
    let mut drop: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); m];
    for j in 1..m {
        for i in 0..j {
            let shared: BTreeSet<u64> = labels.common[&(i, j)].iter().copied().collect();
            let candidates = |a: usize| -> Vec<u64> {
                agencies[a]
                    .edges
                    .iter()
                    .zip(&labelled[a])
                    .filter(|((u, v), _)| shared.contains(u) && shared.contains(v))
                    .map(|(_, &(lu, lv))| lu * size + lv)
                    .collect()
            };
            let (ci, cj) = (candidates(i), candidates(j));
            if ci.is_empty() || cj.is_empty() {
                continue;
            }
            let dup = psi_on_bus(bus, AgencyId(i), AgencyId(j), &ci, &cj, b"encounters", rng)?;
            drop[j].extend(dup);
        }
    }
    Ok(labelled
        .into_iter()
        .enumerate()
        .map(|(a, edges)| {
            let mut kept: Vec<(u64, u64)> = edges
                .into_iter()
                .filter(|&(lu, lv)| !drop[a].contains(&(lu * size + lv)))
                .collect();
            kept.sort_unstable();
            kept
        })
        .collect())
}
