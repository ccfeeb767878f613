//! Index sets and the combinatorics of k-element subsets.
//!
//! Subsets are always enumerated in lexicographic order. That order is the
//! canonical indexing of compound-matrix rows and columns and of the pair
//! list behind the volume-sampling distribution.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on the number of items an exact enumeration may visit.
pub const DEFAULT_ENUMERATION_CAP: u128 = 2_000_000;

/// Strictly increasing list of 0-based indices drawn from `0..universe`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IndexSet {
    indices: Vec<usize>,
    universe: usize,
}

impl IndexSet {
    pub fn new(indices: Vec<usize>, universe: usize) -> Result<Self> {
        if let Some(w) = indices.windows(2).find(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(format!(
                "indices must be strictly increasing, found {} before {}",
                w[0], w[1]
            )));
        }
        if let Some(&last) = indices.last() {
            if last >= universe {
                return Err(Error::InvalidArgument(format!(
                    "index {last} out of range for universe of size {universe}"
                )));
            }
        }
        Ok(Self { indices, universe })
    }

    pub fn full(universe: usize) -> Self {
        Self {
            indices: (0..universe).collect(),
            universe,
        }
    }

    pub fn empty(universe: usize) -> Self {
        Self {
            indices: Vec::new(),
            universe,
        }
    }

    /// Parses the comma-separated text form, e.g. `"0,2,3"`. Whitespace
    /// around entries is ignored and an empty string is the empty set.
    pub fn parse(text: &str, universe: usize) -> Result<Self> {
        let text = text.trim();
        if text.is_empty() {
            return Ok(Self::empty(universe));
        }
        let indices = text
            .split(',')
            .map(|tok| {
                let tok = tok.trim();
                tok.parse::<usize>().map_err(|_| Error::Parse {
                    line: 1,
                    message: format!("invalid index {tok:?}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(indices, universe)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    #[inline]
    pub fn universe(&self) -> usize {
        self.universe
    }

    #[inline]
    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().copied()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.indices.binary_search(&index).is_ok()
    }

    pub fn is_subset_of(&self, other: &IndexSet) -> bool {
        self.indices.iter().all(|&i| other.contains(i))
    }

    /// Indices of the universe not in `self`, ascending.
    pub fn complement(&self) -> IndexSet {
        let mut out = Vec::with_capacity(self.universe - self.len());
        let mut taken = self.indices.iter().peekable();
        for i in 0..self.universe {
            if taken.peek() == Some(&&i) {
                taken.next();
            } else {
                out.push(i);
            }
        }
        IndexSet {
            indices: out,
            universe: self.universe,
        }
    }

    /// Same set with `index` added. No-op if already present.
    pub fn with(&self, index: usize) -> Result<IndexSet> {
        if index >= self.universe {
            return Err(Error::InvalidArgument(format!(
                "index {index} out of range for universe of size {}",
                self.universe
            )));
        }
        let mut indices = self.indices.clone();
        if let Err(pos) = indices.binary_search(&index) {
            indices.insert(pos, index);
        }
        Ok(IndexSet {
            indices,
            universe: self.universe,
        })
    }

    /// Same set with `index` removed. No-op if absent.
    pub fn without(&self, index: usize) -> IndexSet {
        let indices = self.indices.iter().copied().filter(|&i| i != index).collect();
        IndexSet {
            indices,
            universe: self.universe,
        }
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (pos, i) in self.indices.iter().enumerate() {
            if pos > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

/// Free-function form of [`IndexSet::complement`].
pub fn complement(s: &IndexSet) -> IndexSet {
    s.complement()
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Exact binomial coefficient `C(n, k)`.
///
/// Returns `Ok(0)` when `k > n`, and [`Error::Overflow`] rather than a
/// wrapped value when the result does not fit in a `u128`.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k) as u128;
    let n = n as u128;
    let mut c: u128 = 1;
    for i in 1..=k {
        // c * (n - k + i) is divisible by i; cancel the common factor first
        // so the intermediate product stays as small as the result allows.
        let num = n - k + i;
        let g = gcd(c, i);
        let (c_red, i_red) = (c / g, i / g);
        c = c_red
            .checked_mul(num / i_red)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k})")))?;
    }
    Ok(c)
}

/// Number of `r`-subsets of `0..n` containing a fixed `k`-subset, `C(n-k, r-k)`.
pub fn supersets_count(n: u64, k: u64, r: u64) -> Result<u128> {
    if !(k <= r && r <= n) {
        return Err(Error::InvalidArgument(format!(
            "supersets_count requires k <= r <= n, got n={n}, k={k}, r={r}"
        )));
    }
    binomial(n - k, r - k)
}

/// Lexicographic iterator over the `k`-subsets of `0..n`.
#[derive(Clone, Debug)]
pub struct Subsets {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Iterator for Subsets {
    type Item = IndexSet;

    fn next(&mut self) -> Option<IndexSet> {
        let out = self.current.clone()?;
        let k = out.len();
        let cur = self.current.as_mut().expect("checked above");
        // advance: rightmost position that can still move right
        let mut pos = k;
        while pos > 0 {
            pos -= 1;
            if cur[pos] < self.n - k + pos {
                cur[pos] += 1;
                for q in pos + 1..k {
                    cur[q] = cur[q - 1] + 1;
                }
                return Some(IndexSet {
                    indices: out,
                    universe: self.n,
                });
            }
        }
        self.current = None;
        Some(IndexSet {
            indices: out,
            universe: self.n,
        })
    }
}

/// All `k`-subsets of `0..n` in lexicographic order.
pub fn enumerate_subsets(n: usize, k: usize) -> Result<Subsets> {
    if k > n {
        return Err(Error::InvalidArgument(format!("cannot choose {k} elements from {n}")));
    }
    Ok(Subsets {
        n,
        current: Some((0..k).collect()),
    })
}

/// Collects [`enumerate_subsets`] into a vector.
pub fn subsets_vec(n: usize, k: usize) -> Result<Vec<IndexSet>> {
    Ok(enumerate_subsets(n, k)?.collect())
}

/// Checks that `C(m, r) * C(n, k)` pairs fit under `cap` (`None` disables
/// the guard) and returns the pair count.
pub fn check_pair_enumeration(m: usize, r: usize, n: usize, k: usize, cap: Option<u128>) -> Result<u128> {
    let rows = binomial(m as u64, r as u64)?;
    let cols = binomial(n as u64, k as u64)?;
    let pairs = rows
        .checked_mul(cols)
        .ok_or_else(|| Error::Overflow(format!("C({m},{r}) * C({n},{k})")))?;
    match cap {
        Some(cap) if pairs > cap => Err(Error::TooLarge { requested: pairs, cap }),
        _ => Ok(pairs),
    }
}
