//! Exhaustive sweeps over every chain within length/entry bounds.
//!
//! One pass computes, per chain: the continued fraction, the inverse
//! expansion (round trip), the class T verdict, and negative definiteness of
//! the Gram matrix through the tridiagonal minor recurrence
//! `D_k = -b_k D_{k-1} - D_{k-2}`. Work is split by (length, first entry)
//! and scheduled through [`Exec`].

use crate::exec::Exec;

use super::{arith, Chain};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SweepReport {
    pub checked: u64,
    pub round_trip_failures: Vec<Chain>,
    pub not_negative_definite: Vec<Chain>,
    /// Recognized class T chains, canonical order.
    pub class_t: Vec<Chain>,
}

impl SweepReport {
    fn merge(mut self, other: Self) -> Self {
        self.checked += other.checked;
        self.round_trip_failures.extend(other.round_trip_failures);
        self.not_negative_definite
            .extend(other.not_negative_definite);
        self.class_t.extend(other.class_t);
        self
    }
}

/// Number of chains with `1..=max_len` entries drawn from `2..=max_entry`.
pub fn chain_count(max_len: usize, max_entry: u64) -> u64 {
    let k = max_entry.saturating_sub(1);
    (1..=max_len as u32).map(|l| k.pow(l)).sum()
}

/// Leading minors of the chain Gram matrix alternate in sign starting
/// negative.
pub fn tridiagonal_negative_definite(entries: &[u64]) -> bool {
    let (mut prev, mut cur) = (0i64, 1i64);
    for (k, &b) in entries.iter().enumerate() {
        let next = -(b as i64) * cur - prev;
        let want_negative = k % 2 == 0;
        if (want_negative && next >= 0) || (!want_negative && next <= 0) {
            return false;
        }
        prev = cur;
        cur = next;
    }
    true
}

/// Visit every chain of exactly `len` entries whose first entry is `first`.
fn for_each_with_prefix(len: usize, first: u64, max_entry: u64, mut f: impl FnMut(&[u64])) {
    let mut c = vec![2u64; len];
    c[0] = first;
    loop {
        f(&c);
        // odometer over positions 1..len
        let mut i = len;
        loop {
            if i == 1 {
                return;
            }
            i -= 1;
            if c[i] < max_entry {
                c[i] += 1;
                break;
            }
            c[i] = 2;
        }
    }
}

fn sweep_unit(len: usize, first: u64, max_entry: u64) -> SweepReport {
    let mut rep = SweepReport::default();
    for_each_with_prefix(len, first, max_entry, |c| {
        rep.checked += 1;
        let (m, q) = arith::continued_fraction::<u64>(c);
        if !arith::expands_to(m, q, c) {
            rep.round_trip_failures
                .push(Chain::new_unchecked(c.to_vec()));
        }
        if !tridiagonal_negative_definite(c) {
            rep.not_negative_definite
                .push(Chain::new_unchecked(c.to_vec()));
        }
        // m = d n^2 divides (q + 1)^2 = (d n a)^2 for every class T chain;
        // this cheap filter rejects almost everything before the gcds.
        let r = ((q + 1) % m) as u128;
        let cheap_reject = !(r * r).is_multiple_of(m as u128);
        if !cheap_reject && arith::class_t_params(&m, &q).is_some() {
            rep.class_t.push(Chain::new_unchecked(c.to_vec()));
        }
    });
    rep
}

/// Sweep every chain with at most `max_len` entries in `2..=max_entry`.
///
/// Panics if the bounds could overflow the word-sized kernels
/// (`max_entry^max_len` must stay below `2^62`).
pub fn sweep(max_len: usize, max_entry: u64, exec: Exec) -> SweepReport {
    assert!(max_entry >= 2 || max_len == 0, "entries start at 2");
    let fits = max_entry
        .max(2)
        .checked_pow(max_len as u32)
        .is_some_and(|p| p < 1 << 62);
    assert!(fits, "bounds too large for the word-sized sweep");
    let units: Vec<(usize, u64)> = (1..=max_len)
        .flat_map(|l| (2..=max_entry).map(move |b| (l, b)))
        .collect();
    let mut rep = exec.map_reduce(
        units,
        |(l, b)| sweep_unit(l, b, max_entry),
        SweepReport::default,
        SweepReport::merge,
    );
    rep.class_t.sort();
    rep.round_trip_failures.sort();
    rep.not_negative_definite.sort();
    rep
}
