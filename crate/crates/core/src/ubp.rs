//! Finitely supported sequences and the operator family `T_k`.
//!
//! On the space of real sequences with finitely many nonzero entries under
//! the sup-norm, `T_k` keeps only entry `k` and multiplies it by `k`. Each
//! `T_k` has norm `k`, so the family is not uniformly bounded, yet for any
//! fixed sequence `T_k x = 0` once `k` passes the support, so the family is
//! bounded at every point. The space is not complete, and that is what lets
//! both facts hold at once.

use std::collections::BTreeMap;

use rand::Rng;

use crate::error::{LabError, Result};

/// A real sequence `(x_0, x_1, …)` with finitely many nonzero entries.
///
/// Only nonzero entries are stored.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FiniteSequence {
    entries: BTreeMap<usize, f64>,
}

impl FiniteSequence {
    pub fn zero() -> Self {
        Self::default()
    }

    /// From `(index, value)` pairs; zeros are dropped, later duplicates win.
    pub fn from_entries(entries: impl IntoIterator<Item = (usize, f64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (n, v) in entries {
            if !v.is_finite() {
                return Err(LabError::DivergedValue(format!("entry {n} is {v}")));
            }
            if v == 0.0 {
                map.remove(&n);
            } else {
                map.insert(n, v);
            }
        }
        Ok(Self { entries: map })
    }

    /// From the dense prefix `(x_0, …, x_{len−1})`, zero afterwards.
    pub fn from_prefix(prefix: &[f64]) -> Result<Self> {
        Self::from_entries(prefix.iter().copied().enumerate())
    }

    /// Unit sequence `e_k`.
    pub fn unit(k: usize) -> Self {
        Self {
            entries: BTreeMap::from([(k, 1.0)]),
        }
    }

    pub fn get(&self, n: usize) -> f64 {
        self.entries.get(&n).copied().unwrap_or(0.0)
    }

    /// Nonzero entries in ascending index order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.entries.iter().map(|(&n, &v)| (n, v))
    }

    pub fn nonzero_count(&self) -> usize {
        self.entries.len()
    }

    /// Smallest `m` with `x_n = 0` for every `n ≥ m`.
    pub fn support_bound(&self) -> usize {
        self.entries.keys().next_back().map_or(0, |&n| n + 1)
    }

    /// `a·self + b·other`.
    pub fn linear_combination(&self, a: f64, other: &FiniteSequence, b: f64) -> Self {
        let indices = self.entries.keys().chain(other.entries.keys());
        let entries = indices
            .map(|&n| (n, a * self.get(n) + b * other.get(n)))
            .filter(|&(_, v)| v != 0.0)
            .collect();
        Self { entries }
    }

    pub fn distance(&self, other: &FiniteSequence) -> f64 {
        seq_norm(&self.linear_combination(1.0, other, -1.0))
    }

    /// Random sequence with `nonzero` entries drawn from `[-1, 1)` at indices below `support`.
    pub fn random(rng: &mut impl Rng, support: usize, nonzero: usize) -> Self {
        let mut entries = BTreeMap::new();
        if support > 0 {
            for _ in 0..nonzero {
                let v: f64 = rng.gen_range(-1.0..1.0);
                if v != 0.0 {
                    entries.insert(rng.gen_range(0..support), v);
                }
            }
        }
        Self { entries }
    }
}

/// `sup_n |x_n|`.
pub fn seq_norm(x: &FiniteSequence) -> f64 {
    x.entries.values().map(|v| v.abs()).fold(0.0, f64::max)
}

/// `T_k x`: the single entry `k·x_k` at index `k`.
pub fn apply_tk(k: usize, x: &FiniteSequence) -> FiniteSequence {
    let value = k as f64 * x.get(k);
    let mut entries = BTreeMap::new();
    if value != 0.0 {
        entries.insert(k, value);
    }
    FiniteSequence { entries }
}

/// `‖T_k‖ = k`, attained at `e_k`.
pub fn norm_tk(k: usize) -> f64 {
    k as f64
}

/// Largest `‖T_k x‖/‖x‖` over `e_k` and `trials` random unit-norm sequences
/// supported below `2k + 2`. Validates [`norm_tk`] from below and above.
pub fn norm_tk_search(k: usize, trials: usize, rng: &mut impl Rng) -> f64 {
    let witness = seq_norm(&apply_tk(k, &FiniteSequence::unit(k)));
    (0..trials)
        .map(|_| {
            let x = FiniteSequence::random(rng, 2 * k + 2, k + 2);
            let norm = seq_norm(&x);
            if norm == 0.0 {
                0.0
            } else {
                seq_norm(&apply_tk(k, &x)) / norm
            }
        })
        .fold(witness, f64::max)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointwiseBound {
    /// `sup_k ‖T_k x‖`.
    pub bound: f64,
    /// Smallest `k` attaining the bound.
    pub saturating_k: usize,
    /// Every scanned `k ≥ support_bound` gave `T_k x = 0`, so the scan
    /// certifies the supremum over all `k`.
    pub saturated: bool,
}

/// `sup_k ‖T_k x‖` certified by scanning `k = 0 … k_max`.
pub fn pointwise_bound(x: &FiniteSequence, k_max: usize) -> Result<PointwiseBound> {
    let support_bound = x.support_bound();
    if k_max < support_bound {
        return Err(LabError::InsufficientScan {
            k_max,
            support_bound,
        });
    }
    let mut bound = 0.0;
    let mut saturating_k = 0;
    let mut tail_vanishes = true;
    for k in 0..=k_max {
        let value = seq_norm(&apply_tk(k, x));
        if k >= support_bound {
            tail_vanishes &= value == 0.0;
        } else if value > bound {
            bound = value;
            saturating_k = k;
        }
    }
    Ok(PointwiseBound {
        bound,
        saturating_k,
        saturated: tail_vanishes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UbpRow {
    pub k: usize,
    pub op_norm: f64,
    pub probe_id: Option<usize>,
    pub probe_bound: Option<f64>,
}

/// One row per `(k, probe)`: the growing operator norms next to each probe's
/// fixed pointwise bound. Without probes, one row per `k`.
pub fn ubp_violation_demo(k_range: &[usize], probes: &[FiniteSequence]) -> Result<Vec<UbpRow>> {
    if k_range.is_empty() {
        return Err(LabError::Domain("empty k range".into()));
    }
    let k_top = k_range.iter().copied().max().unwrap_or(0);
    let bounds = probes
        .iter()
        .map(|x| pointwise_bound(x, k_top.max(x.support_bound())).map(|b| b.bound))
        .collect::<Result<Vec<_>>>()?;
    let mut rows = Vec::with_capacity(k_range.len() * probes.len().max(1));
    for &k in k_range {
        if probes.is_empty() {
            rows.push(UbpRow {
                k,
                op_norm: norm_tk(k),
                probe_id: None,
                probe_bound: None,
            });
        }
        for (id, bound) in bounds.iter().enumerate() {
            rows.push(UbpRow {
                k,
                op_norm: norm_tk(k),
                probe_id: Some(id),
                probe_bound: Some(*bound),
            });
        }
    }
    Ok(rows)
}

/// `x^{(m)} = (1, 1/2, …, 1/m, 0, …)`, a Cauchy sequence with no limit in the space.
pub fn harmonic_truncation(m: usize) -> FiniteSequence {
    FiniteSequence {
        entries: (0..m).map(|n| (n, 1.0 / (n + 1) as f64)).collect(),
    }
}

/// Closed form `‖x^{(m)} − x^{(m')}‖ = 1/(min(m, m') + 1)` for `m ≠ m'`.
pub fn harmonic_distance(m: usize, m_prime: usize) -> f64 {
    if m == m_prime {
        0.0
    } else {
        1.0 / (m.min(m_prime) + 1) as f64
    }
}

/// Looks for an `m ≤ scan` with `f(n) = 0` for all `m ≤ n ≤ scan`, the
/// finite-support condition checked on a finite window. `None` means the
/// window holds no such `m`.
pub fn finite_support_witness(f: impl Fn(usize) -> f64, scan: usize) -> Option<usize> {
    let mut candidate = None;
    for n in (0..=scan).rev() {
        if f(n) != 0.0 {
            break;
        }
        candidate = Some(n);
    }
    candidate
}
