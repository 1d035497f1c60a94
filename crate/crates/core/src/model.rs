//! Pairing tables and the key rings they induce.
//!
//! Every node `i` picks `K` partners `Γ_i` uniformly among the other `n - 1`
//! nodes. Each choice `j ∈ Γ_i` creates one pairwise key shared by `i` and
//! `j`, identified by `(i, j, slot)` where `slot` is the rank of `j` within
//! `Γ_i` in ascending id order. A node's key ring holds the keys of its own
//! choices plus one key for every node that chose it.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;
use crate::sampling::SubsetSampler;

/// Scheme parameters `(n, K)` with `1 <= K <= n - 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SchemeParams {
    n: usize,
    k: usize,
}

impl SchemeParams {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Params(format!("need n >= 2, got n = {n}")));
        }
        if k == 0 || k >= n {
            return Err(Error::Params(format!("need 1 <= K < n, got K = {k}, n = {n}")));
        }
        if n > u32::MAX as usize {
            return Err(Error::Params(format!("n = {n} exceeds the 32-bit id space")));
        }
        Ok(Self { n, k })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// A 1-based node label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(u32);

impl NodeId {
    /// Checks `1 <= index <= n`.
    pub fn new(index: usize, n: usize) -> Result<Self> {
        if index == 0 || index > n {
            return Err(Error::NodeId { index, n });
        }
        Ok(Self(index as u32))
    }

    pub(crate) fn from_zero_based(i: u32) -> Self {
        Self(i + 1)
    }

    pub fn get(self) -> usize {
        self.0 as usize
    }

    pub(crate) fn zero_based(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// The partner sets `Γ_1, …, Γ_n`, stored 0-based and flattened, each set
/// sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingTable {
    params: SchemeParams,
    seed: Option<u64>,
    partners: Vec<u32>,
}

impl PairingTable {
    /// Draws every `Γ_i` independently and uniformly. Node `i` uses the stream
    /// derived from `(seed, i)`, so the result is a pure function of
    /// `(n, K, seed)`.
    pub fn generate(params: SchemeParams, seed: u64) -> Self {
        let (n, k) = (params.n, params.k);
        let mut partners = Vec::with_capacity(n * k);
        let mut sampler = SubsetSampler::new();
        for i in 0..n {
            let mut rng = rng::stream(seed, &[i as u64]);
            let start = partners.len();
            sampler.sample_into(&mut rng, (n - 1) as u32, k as u32, &mut partners);
            // Candidate c stands for node c, skipping i itself.
            let row = &mut partners[start..];
            for c in row.iter_mut() {
                if *c >= i as u32 {
                    *c += 1;
                }
            }
            row.sort_unstable();
        }
        Self { params, seed: Some(seed), partners }
    }

    /// Builds a table from explicit 1-based partner sets.
    pub fn from_sets(params: SchemeParams, sets: &[Vec<usize>]) -> Result<Self> {
        let (n, k) = (params.n, params.k);
        if sets.len() != n {
            return Err(Error::Table(format!("expected {n} partner sets, got {}", sets.len())));
        }
        let mut partners = Vec::with_capacity(n * k);
        for (i, set) in sets.iter().enumerate() {
            if set.len() != k {
                return Err(Error::Table(format!(
                    "node {} has {} partners, expected {k}",
                    i + 1,
                    set.len()
                )));
            }
            let start = partners.len();
            for &j in set {
                let id = NodeId::new(j, n)?;
                if id.zero_based() == i {
                    return Err(Error::Table(format!("node {} is paired with itself", i + 1)));
                }
                partners.push(id.zero_based() as u32);
            }
            let row = &mut partners[start..];
            row.sort_unstable();
            if row.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Table(format!("node {} has a repeated partner", i + 1)));
            }
        }
        Ok(Self { params, seed: None, partners })
    }

    pub fn params(&self) -> SchemeParams {
        self.params
    }

    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn k(&self) -> usize {
        self.params.k
    }

    /// The seed the table was generated from, if any.
    pub fn seed(&self) -> Option<u64> {
        self.seed
    }

    /// `Γ_i` as 0-based ids in ascending order.
    pub(crate) fn row(&self, i: usize) -> &[u32] {
        let k = self.params.k;
        &self.partners[i * k..(i + 1) * k]
    }

    /// `Γ_i` in ascending order.
    pub fn partners(&self, i: NodeId) -> Result<Vec<NodeId>> {
        self.check(i)?;
        Ok(self.row(i.zero_based()).iter().map(|&j| NodeId::from_zero_based(j)).collect())
    }

    /// Whether `j ∈ Γ_i`, both 0-based.
    pub(crate) fn selects(&self, i: usize, j: u32) -> bool {
        self.row(i).binary_search(&j).is_ok()
    }

    fn check(&self, i: NodeId) -> Result<()> {
        if i.get() == 0 || i.get() > self.params.n {
            return Err(Error::NodeId { index: i.get(), n: self.params.n });
        }
        Ok(())
    }

    /// `B_i = |{j ≠ i : i ∈ Γ_j}|`, the number of nodes that chose `i`.
    pub fn reverse_degree(&self, i: NodeId) -> Result<usize> {
        self.check(i)?;
        let target = i.zero_based() as u32;
        Ok((0..self.params.n).filter(|&j| self.selects(j, target)).count())
    }

    /// Reverse degrees of all nodes, 0-based order.
    pub fn reverse_degrees(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.params.n];
        for &j in &self.partners {
            counts[j as usize] += 1;
        }
        counts
    }

    /// Key-ring sizes `K + B_i` of all nodes without materializing the rings.
    pub fn ring_sizes(&self) -> Vec<u32> {
        let k = self.params.k as u32;
        let mut sizes = self.reverse_degrees();
        for s in &mut sizes {
            *s += k;
        }
        sizes
    }

    /// Materializes every key ring.
    pub fn key_rings(&self) -> Vec<KeyRing> {
        let n = self.params.n;
        let mut keys: Vec<Vec<PairwiseKeyId>> = vec![Vec::with_capacity(2 * self.params.k); n];
        for i in 0..n {
            for (slot, &j) in self.row(i).iter().enumerate() {
                let key = PairwiseKeyId {
                    initiator: NodeId::from_zero_based(i as u32),
                    responder: NodeId::from_zero_based(j),
                    slot: slot as u32 + 1,
                };
                keys[i].push(key);
                keys[j as usize].push(key);
            }
        }
        keys.into_iter()
            .enumerate()
            .map(|(i, mut keys)| {
                keys.sort_unstable();
                KeyRing { owner: NodeId::from_zero_based(i as u32), keys }
            })
            .collect()
    }

    pub fn to_dump(&self) -> PairingDump {
        PairingDump {
            n: self.params.n,
            k: self.params.k,
            seed: self.seed,
            gamma: (0..self.params.n)
                .map(|i| self.row(i).iter().map(|&j| j as usize + 1).collect())
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_dump()).expect("dump serializes")
    }

    pub fn from_dump(dump: &PairingDump) -> Result<Self> {
        let params = SchemeParams::new(dump.n, dump.k)?;
        let mut table = Self::from_sets(params, &dump.gamma)?;
        table.seed = dump.seed;
        Ok(table)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let dump: PairingDump =
            serde_json::from_str(s).map_err(|e| Error::Table(e.to_string()))?;
        Self::from_dump(&dump)
    }
}

/// JSON form of a pairing table with 1-based ids.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairingDump {
    pub n: usize,
    pub k: usize,
    pub seed: Option<u64>,
    pub gamma: Vec<Vec<usize>>,
}

/// Identifier of the key created when `initiator` chose `responder`, using
/// the initiator's pool key number `slot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PairwiseKeyId {
    pub initiator: NodeId,
    pub responder: NodeId,
    pub slot: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct KeyRing {
    pub owner: NodeId,
    /// Sorted, no duplicates.
    pub keys: Vec<PairwiseKeyId>,
}

impl KeyRing {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn shares_key_with(&self, other: &KeyRing) -> bool {
        let (mut a, mut b) = (self.keys.iter().peekable(), other.keys.iter().peekable());
        while let (Some(x), Some(y)) = (a.peek(), b.peek()) {
            match x.cmp(y) {
                std::cmp::Ordering::Less => {
                    a.next();
                }
                std::cmp::Ordering::Greater => {
                    b.next();
                }
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}
