use super::OrderError;

/// A finite partial order on `0..n`, stored as a dense `leq` matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinPoset {
    names: Vec<String>,
    leq: Vec<bool>,
}

impl FinPoset {
    /// Builds a poset from an explicit relation table (`leq[i * n + j]` is `i <= j`).
    pub fn from_relation(names: Vec<String>, leq: Vec<bool>) -> Result<Self, OrderError> {
        let n = names.len();
        if leq.len() != n * n {
            return Err(OrderError::Shape {
                expected: n * n,
                found: leq.len(),
            });
        }
        for i in 0..n {
            if !leq[i * n + i] {
                return Err(OrderError::NotReflexive(i));
            }
            for j in 0..n {
                if i != j && leq[i * n + j] && leq[j * n + i] {
                    return Err(OrderError::NotAntisymmetric(i, j));
                }
                for k in 0..n {
                    if leq[i * n + j] && leq[j * n + k] && !leq[i * n + k] {
                        return Err(OrderError::NotTransitive(i, j, k));
                    }
                }
            }
        }
        Ok(FinPoset { names, leq })
    }

    /// Reflexive-transitive closure of the given pairs.
    pub fn from_pairs(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Self, OrderError> {
        let n = names.len();
        let mut leq = vec![false; n * n];
        for i in 0..n {
            leq[i * n + i] = true;
        }
        for &(i, j) in pairs {
            if i >= n || j >= n {
                return Err(OrderError::ElementOutOfRange(i.max(j)));
            }
            leq[i * n + j] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if leq[i * n + k] {
                    for j in 0..n {
                        if leq[k * n + j] {
                            leq[i * n + j] = true;
                        }
                    }
                }
            }
        }
        Self::from_relation(names, leq)
    }

    pub fn antichain(n: usize) -> Self {
        Self::from_pairs(default_names(n), &[]).expect("antichain is a poset")
    }

    pub fn chain(n: usize) -> Self {
        let pairs: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::from_pairs(default_names(n), &pairs).expect("chain is a poset")
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i * self.len() + j]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Is `set` (a bitmask over the elements) closed downwards?
    pub fn is_downset(&self, set: u64) -> bool {
        let n = self.len();
        (0..n).all(|j| set & (1 << j) == 0 || (0..n).all(|i| !self.leq(i, j) || set & (1 << i) != 0))
    }

    /// All downsets as bitmasks, sorted by size then by mask.
    pub fn downsets(&self) -> Vec<u64> {
        assert!(self.len() < 64, "downset enumeration is limited to 63 elements");
        let mut out: Vec<u64> = (0..(1u64 << self.len())).filter(|&s| self.is_downset(s)).collect();
        out.sort_by_key(|s| (s.count_ones(), *s));
        out
    }

    /// Lexicographically least relation matrix over all relabellings.
    pub fn canonical_form(&self) -> Vec<bool> {
        use itertools::Itertools;
        let n = self.len();
        (0..n)
            .permutations(n)
            .map(|perm| {
                let mut m = vec![false; n * n];
                for i in 0..n {
                    for j in 0..n {
                        m[perm[i] * n + perm[j]] = self.leq(i, j);
                    }
                }
                m
            })
            .min()
            .unwrap_or_default()
    }

    /// Every partial order on `n` points, up to isomorphism, in a fixed order.
    pub fn all_up_to_iso(n: usize) -> Vec<FinPoset> {
        let off_diag: Vec<(usize, usize)> =
            (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let mut seen = std::collections::BTreeSet::new();
        let mut out = Vec::new();
        for mask in 0u64..(1 << off_diag.len()) {
            let mut leq = vec![false; n * n];
            for i in 0..n {
                leq[i * n + i] = true;
            }
            for (b, &(i, j)) in off_diag.iter().enumerate() {
                if mask & (1 << b) != 0 {
                    leq[i * n + j] = true;
                }
            }
            if let Ok(p) = FinPoset::from_relation(default_names(n), leq) {
                if seen.insert(p.canonical_form()) {
                    out.push(p);
                }
            }
        }
        out
    }
}

pub(crate) fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}
