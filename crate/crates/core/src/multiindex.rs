//! Ordered multi-indices and the global sign constants of form algebra.
//!
//! Axis labels are 1-based throughout the public API. A [`MultiIndex`] may be
//! unordered (e.g. the concatenation `(I, J)`), but never contains a repeated
//! entry: such a tuple addresses the zero form and is rejected at construction.

use std::fmt;

use crate::error::{Error, Result};

/// Largest ambient dimension supported by the bitmask bookkeeping.
pub const MAX_DIM: usize = 16;

/// A tuple of distinct axis labels, not necessarily sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct MultiIndex(Vec<usize>);

impl MultiIndex {
    /// Builds a multi-index from 1-based labels. Repeated labels are an error.
    pub fn new(indices: impl Into<Vec<usize>>) -> Result<Self> {
        let indices = indices.into();
        let mut seen = 0u32;
        for &i in &indices {
            if i == 0 || i > MAX_DIM {
                return Err(Error::InvalidArgument(format!("axis label {i} outside 1..={MAX_DIM}")));
            }
            let bit = 1u32 << (i - 1);
            if seen & bit != 0 {
                return Err(Error::DegenerateMultiIndex(indices.clone()));
            }
            seen |= bit;
        }
        Ok(Self(indices))
    }

    /// The empty multi-index `()`.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn contains(&self, axis: usize) -> bool {
        self.0.contains(&axis)
    }

    pub fn is_ordered(&self) -> bool {
        self.0.windows(2).all(|w| w[0] < w[1])
    }

    /// Bitmask with bit `i-1` set for every label `i`.
    pub fn mask(&self) -> u32 {
        self.0.iter().fold(0, |m, &i| m | (1 << (i - 1)))
    }

    /// The sorting map 𝒥: the same labels in ascending order.
    pub fn ordered(&self) -> Self {
        let mut v = self.0.clone();
        v.sort_unstable();
        Self(v)
    }

    /// Concatenation `(I, J)`; fails when the two share a label.
    pub fn concat(&self, other: &Self) -> Result<Self> {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self::new(v)
    }

    /// `I + j`: the ordered index with `j` inserted.
    pub fn plus(&self, axis: usize) -> Result<Self> {
        Ok(self.concat(&Self::new(vec![axis])?)?.ordered())
    }

    /// `I - j`: the index with `j` removed (order preserved).
    pub fn minus(&self, axis: usize) -> Self {
        Self(self.0.iter().copied().filter(|&i| i != axis).collect())
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (k, i) in self.0.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{i}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// All ordered multi-indices of length `q` over `1..=n`, in lexicographic order.
///
/// Degrees outside `0..=n` yield an empty list.
pub fn enumerate_ordered(q: i32, n: usize) -> Vec<MultiIndex> {
    if q < 0 || q as usize > n {
        return Vec::new();
    }
    let q = q as usize;
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(q);
    fn rec(start: usize, n: usize, q: usize, current: &mut Vec<usize>, out: &mut Vec<MultiIndex>) {
        if current.len() == q {
            out.push(MultiIndex(current.clone()));
            return;
        }
        for i in start..=n {
            current.push(i);
            rec(i + 1, n, q, current, out);
            current.pop();
        }
    }
    rec(1, n, q, &mut current, &mut out);
    out
}

/// Binomial coefficient, the number of ordered multi-indices of length `k`.
pub fn binomial(n: usize, k: i32) -> usize {
    if k < 0 || k as usize > n {
        return 0;
    }
    let k = (k as usize).min(n - k as usize);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Sign of the permutation sorting `labels` ascending. Labels must be distinct.
pub(crate) fn sort_sign(labels: &[usize]) -> i32 {
    let mut inversions = 0usize;
    for a in 0..labels.len() {
        for b in a + 1..labels.len() {
            if labels[a] > labels[b] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// σ(I): sign of the permutation sorting `I`.
pub fn perm_sign(index: &MultiIndex) -> i32 {
    sort_sign(&index.0)
}

/// σ(I): checks a raw tuple first, reporting repeated entries as degenerate.
pub fn perm_sign_of(labels: &[usize]) -> Result<i32> {
    Ok(perm_sign(&MultiIndex::new(labels.to_vec())?))
}

/// σ(I, J) for disjoint `I`, `J`; `None` when they overlap.
pub fn concat_sign(i: &MultiIndex, j: &MultiIndex) -> Option<i32> {
    if i.mask() & j.mask() != 0 {
        return None;
    }
    let mut v = i.0.clone();
    v.extend_from_slice(&j.0);
    Some(sort_sign(&v))
}

/// I′: the ordered complement of `I` in `1..=n`.
pub fn complement(index: &MultiIndex, n: usize) -> Result<MultiIndex> {
    if index.0.iter().any(|&i| i > n) {
        return Err(Error::InvalidArgument(format!("{index} has labels outside 1..={n}")));
    }
    Ok(MultiIndex((1..=n).filter(|i| !index.contains(*i)).collect()))
}

/// The four sign constants σ_q, κ_q in dimension N and σ′_q, κ′_q in dimension N−1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SignConstants {
    pub sigma: i32,
    pub kappa: i32,
    pub sigma_prime: i32,
    pub kappa_prime: i32,
}

fn neg_one_pow(e: i64) -> i32 {
    if e.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// σ_q = (−1)^{N(q−1)}.
pub fn sigma(q: i32, n: usize) -> i32 {
    neg_one_pow(n as i64 * (q as i64 - 1))
}

/// κ_q = (−1)^{q(N−q)}.
pub fn kappa(q: i32, n: usize) -> i32 {
    neg_one_pow(q as i64 * (n as i64 - q as i64))
}

pub fn sign_constants(q: i32, n: usize) -> SignConstants {
    let sigma_prime = neg_one_pow((n as i64 - 1) * (q as i64 - 1));
    let kappa_prime = neg_one_pow(q as i64 * (n as i64 - 1 - q as i64));
    SignConstants { sigma: sigma(q, n), kappa: kappa(q, n), sigma_prime, kappa_prime }
}

/// Residuals of the sign-constant identities at `(q, n)`; each entry is
/// `(name, lhs - rhs)` and must be exactly zero.
pub fn sign_identity_residuals(q: i32, n: usize) -> Vec<(&'static str, i32)> {
    let s = |k: i32| sigma(k, n);
    let k = |k: i32| kappa(k, n);
    let kp = |k: i32| sign_constants(k, n).kappa_prime;
    let sp = |k: i32| sign_constants(k, n).sigma_prime;
    let nq = n as i32 - q;
    let pow = |e: i64| neg_one_pow(e);
    vec![
        ("kappa_{q+2}=kappa_q", k(q + 2) - k(q)),
        ("sigma_{q+2}=sigma_q", s(q + 2) - s(q)),
        ("kappa_q=kappa_{N-q}", k(q) - k(nq)),
        ("sigma_{N-q}=sigma_{q+1}", s(nq) - s(q + 1)),
        ("kappa_q sigma_{q+1}=(-1)^q", k(q) * s(q + 1) - pow(q as i64)),
        ("sigma_q sigma_{q+1}=(-1)^N", s(q) * s(q + 1) - pow(n as i64)),
        ("sigma_q kappa_q=(-1)^{N+q}", s(q) * k(q) - pow(n as i64 + q as i64)),
        ("kappa'_{q-1} sigma_q=1", kp(q - 1) * s(q) - 1),
        ("sigma'_q kappa_q=(-1)^{N+1}", sp(q) * k(q) - pow(n as i64 + 1)),
    ]
}

/// Dense lookup from ordered multi-index bitmask to its position in
/// [`enumerate_ordered`]`(q, n)`.
#[derive(Clone, Debug)]
pub(crate) struct Basis {
    pub indices: Vec<MultiIndex>,
    position: std::collections::HashMap<u32, usize>,
}

impl Basis {
    pub fn new(q: i32, n: usize) -> Self {
        let indices = enumerate_ordered(q, n);
        let position = indices.iter().enumerate().map(|(k, i)| (i.mask(), k)).collect();
        Self { indices, position }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn position(&self, mask: u32) -> Option<usize> {
        self.position.get(&mask).copied()
    }
}
