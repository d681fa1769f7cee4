//! Class T chain analytics.
//!
//! A linear chain `[b_1, ..., b_l]` of smooth rational curves with
//! `E_i^2 = -b_i` contracts to the cyclic quotient singularity `1/m (1, q)`
//! where `m/q` is the Hirzebruch-Jung continued fraction
//! `b_1 - 1/(b_2 - 1/(... - 1/b_l))`. The chain is of class T when
//! `m = d n^2` and `q = d n a - 1` with `n >= 2`, `1 <= a < n`, `gcd(n, a) = 1`;
//! those are exactly the points admitting a Q-Gorenstein smoothing, and `n`
//! is the index of the point.
//!
//! The arithmetic kernels in [`arith`] are generic over the integer type so
//! that the exhaustive sweeps can run them on machine words while the public
//! API runs the same code on [`BigInt`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::ratlin::{chain_gram, int, Rational};

pub mod sweep;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WahlError {
    #[error("a chain needs at least one entry")]
    EmptyChain,
    #[error("chain entry {0} is below 2")]
    EntryTooSmall(u64),
    #[error("cannot parse chain entry {0:?}")]
    BadEntry(String),
    #[error("invalid fraction {m}/{q}: need m > q >= 1 and gcd(m, q) = 1")]
    InvalidFraction { m: String, q: String },
    #[error("chain {0} is not of class T")]
    NotClassT(Chain),
}

/// Integer kernels shared by the public API and the sweeps.
pub mod arith {
    use num_integer::Integer;

    /// `(m, q)` with `m/q = [b_1, ..., b_l]`, evaluated from the right.
    /// The result is always in lowest terms.
    pub fn continued_fraction<T>(entries: &[u64]) -> (T, T)
    where
        T: Integer + Clone + From<u64>,
    {
        let mut it = entries.iter().rev();
        let last = *it.next().expect("empty chain");
        let mut num = T::from(last);
        let mut den = T::one();
        for &b in it {
            let next = T::from(b) * num.clone() - den;
            den = num;
            num = next;
        }
        (num, den)
    }

    /// Inverse of [`continued_fraction`]: the unique entries (all >= 2) whose
    /// continued fraction is `m/q`. `None` unless `m > q >= 1`, `gcd = 1`.
    pub fn expand_fraction<T>(m: T, q: T) -> Option<Vec<T>>
    where
        T: Integer + Clone,
    {
        if q < T::one() || m <= q || !m.gcd(&q).is_one() {
            return None;
        }
        let (mut m, mut q) = (m, q);
        let mut out = Vec::new();
        while !q.is_zero() {
            // ceil(m / q); m > q so b >= 2.
            let b = m.div_ceil(&q);
            let r = b.clone() * q.clone() - m;
            out.push(b);
            m = q;
            q = r;
        }
        Some(out)
    }

    /// True when the inverse expansion of `m/q` is exactly `entries`; the
    /// allocation-free form of `expand_fraction(m, q) == Some(entries)`.
    pub fn expands_to<T>(m: T, q: T, entries: &[u64]) -> bool
    where
        T: Integer + Clone + From<u64>,
    {
        if q < T::one() || m <= q || !m.gcd(&q).is_one() {
            return false;
        }
        let (mut m, mut q) = (m, q);
        for &e in entries {
            if q.is_zero() {
                return false;
            }
            let b = m.div_ceil(&q);
            if b != T::from(e) {
                return false;
            }
            let r = b * q.clone() - m;
            m = q;
            q = r;
        }
        q.is_zero()
    }

    /// Class T parameters `(d, n, a)` of `1/m (1, q)`, if any.
    ///
    /// With `m = d n^2` and `q + 1 = d n a`, `gcd(m, q + 1) = d n gcd(n, a)
    /// = d n`, which pins `n = m / gcd` and `d = gcd / n` directly.
    pub fn class_t_params<T>(m: &T, q: &T) -> Option<(T, T, T)>
    where
        T: Integer + Clone,
    {
        let one = T::one();
        let q1 = q.clone() + one.clone();
        let g = m.gcd(&q1);
        let n = m.clone() / g.clone();
        let two = one.clone() + one.clone();
        if n < two || !g.is_multiple_of(&n) {
            return None;
        }
        let d = g.clone() / n.clone();
        let a = q1 / g;
        if a < one || a >= n || !n.gcd(&a).is_one() {
            return None;
        }
        Some((d, n, a))
    }
}

/// Negated self-intersections of a contractible linear chain, left to right.
#[derive(Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Chain(Vec<u64>);

impl Chain {
    pub fn new(entries: Vec<u64>) -> Result<Self, WahlError> {
        if entries.is_empty() {
            return Err(WahlError::EmptyChain);
        }
        if let Some(&b) = entries.iter().find(|&&b| b < 2) {
            return Err(WahlError::EntryTooSmall(b));
        }
        Ok(Self(entries))
    }

    pub(crate) fn new_unchecked(entries: Vec<u64>) -> Self {
        debug_assert!(!entries.is_empty() && entries.iter().all(|&b| b >= 2));
        Self(entries)
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    /// `(m, q)` of the continued fraction.
    pub fn fraction(&self) -> (BigInt, BigInt) {
        arith::continued_fraction::<BigInt>(&self.0)
    }

    pub fn hj_value(&self) -> Rational {
        let (m, q) = self.fraction();
        Rational::new(m, q)
    }
}

impl Ord for Chain {
    /// Canonical order: shorter chains first, then lexicographic.
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Chain {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(u64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl fmt::Debug for Chain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl FromStr for Chain {
    type Err = WahlError;

    /// Comma separated entries, e.g. `4,2,3,2`. Brackets and blanks are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().trim_start_matches('[').trim_end_matches(']');
        let entries = s
            .split(',')
            .map(|t| {
                let t = t.trim();
                t.parse::<u64>()
                    .map_err(|_| WahlError::BadEntry(t.to_string()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Chain::new(entries)
    }
}

/// Recognized class T data of `1/(d n^2) (1, d n a - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassTData {
    pub d: BigInt,
    pub n: BigInt,
    pub a: BigInt,
    /// Order of the cyclic group, `d n^2`.
    pub m: BigInt,
    /// Rotation, `d n a - 1`.
    pub q: BigInt,
}

impl ClassTData {
    /// Smallest `r` with `r K` Cartier at the point.
    pub fn index(&self) -> &BigInt {
        &self.n
    }
}

pub fn hj_value(c: &Chain) -> Rational {
    c.hj_value()
}

pub fn chain_from_fraction(m: &BigInt, q: &BigInt) -> Result<Chain, WahlError> {
    let invalid = || WahlError::InvalidFraction {
        m: m.to_string(),
        q: q.to_string(),
    };
    let entries = arith::expand_fraction(m.clone(), q.clone()).ok_or_else(invalid)?;
    let entries = entries
        .iter()
        .map(|b| b.to_u64().ok_or_else(invalid))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Chain::new_unchecked(entries))
}

pub fn recognize_class_t(c: &Chain) -> Option<ClassTData> {
    let (m, q) = c.fraction();
    let (d, n, a) = arith::class_t_params(&m, &q)?;
    Some(ClassTData { d, n, a, m, q })
}

pub fn index(c: &Chain) -> Result<BigInt, WahlError> {
    recognize_class_t(c)
        .map(|t| t.n)
        .ok_or_else(|| WahlError::NotClassT(c.clone()))
}

/// Discrepancies `a_i` with `K_Z = f^* K_X + sum a_i E_i`: the unique solution
/// of `G a = k`, `G` the chain Gram matrix and `k_i = b_i - 2`.
pub fn discrepancies(c: &Chain) -> Vec<Rational> {
    let g = chain_gram(c.entries());
    let k: Vec<Rational> = c.entries().iter().map(|&b| int(b as i64 - 2)).collect();
    g.solve_unique(&k)
        .expect("chain Gram matrices are negative definite")
}

/// Local contribution of the chain to `K_X^2 - K_Z^2`, namely `-a . k`.
pub fn k2_contribution(c: &Chain) -> Rational {
    let a = discrepancies(c);
    -c.entries()
        .iter()
        .zip(&a)
        .fold(Rational::zero(), |acc, (&b, ai)| {
            acc + ai * int(b as i64 - 2)
        })
}

/// All class T chains with at most `max_len` entries, each at most
/// `max_entry`, in canonical order.
///
/// Closure of the seeds `[4]` and `[3, 2, ..., 2, 3]` (`d - 2` twos, one seed
/// per `d >= 2`) under `[b_1, ..., b_l] -> [b_1 + 1, ..., b_l, 2]` and
/// `[b_1, ..., b_l] -> [2, b_1, ..., b_l + 1]`. Both steps only grow lengths
/// and entries, so pruning at the bounds loses nothing.
pub fn generate_class_t(max_len: usize, max_entry: u64) -> Vec<Chain> {
    let fits = |c: &[u64]| c.len() <= max_len && c.iter().all(|&b| b <= max_entry);
    let mut seeds: Vec<Vec<u64>> = vec![vec![4]];
    for d in 2..=max_len {
        let mut s = vec![2u64; d];
        s[0] = 3;
        s[d - 1] = 3;
        seeds.push(s);
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut stack: Vec<Vec<u64>> = seeds.into_iter().filter(|s| fits(s)).collect();
    while let Some(c) = stack.pop() {
        if !seen.insert(Chain::new_unchecked(c.clone())) {
            continue;
        }
        let l = c.len();
        let mut left = c.clone();
        left[0] += 1;
        left.push(2);
        let mut right = Vec::with_capacity(l + 1);
        right.push(2);
        right.extend_from_slice(&c);
        right[l] += 1;
        for next in [left, right] {
            if fits(&next) {
                stack.push(next);
            }
        }
    }
    seen.into_iter().collect()
}

/// Everything the `chain` subcommand prints.
#[derive(Debug, Clone)]
pub struct ChainAnalysis {
    pub chain: Chain,
    pub m: BigInt,
    pub q: BigInt,
    pub class_t: Option<ClassTData>,
    pub discrepancies: Vec<Rational>,
    pub contribution: Rational,
}

pub fn analyze(c: &Chain) -> ChainAnalysis {
    let (m, q) = c.fraction();
    ChainAnalysis {
        chain: c.clone(),
        m,
        q,
        class_t: recognize_class_t(c),
        discrepancies: discrepancies(c),
        contribution: k2_contribution(c),
    }
}

/// gcd of a list, `0` for an empty list.
pub fn gcd_all<'a>(xs: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    xs.into_iter().fold(BigInt::zero(), |g, x| g.gcd(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ratlin::frac;
    use num_traits::Signed;
    use proptest::prelude::*;

    fn ch(xs: &[u64]) -> Chain {
        Chain::new(xs.to_vec()).unwrap()
    }

    fn big(x: i64) -> BigInt {
        BigInt::from(x)
    }

    /// Bounded brute force over (d, n, a) with d n^2 = m.
    fn brute_class_t(m: u64, q: u64) -> Vec<(u64, u64, u64)> {
        let mut out = Vec::new();
        for n in 2..=m {
            if n * n > m {
                break;
            }
            for d in 1..=m / (n * n) {
                if d * n * n != m {
                    continue;
                }
                for a in 1..n {
                    if n.gcd(&a) == 1 && d * n * a == q + 1 {
                        out.push((d, n, a));
                    }
                }
            }
        }
        out
    }

    #[test]
    fn chain_validation() {
        assert_eq!(Chain::new(vec![]), Err(WahlError::EmptyChain));
        assert_eq!(Chain::new(vec![4, 1]), Err(WahlError::EntryTooSmall(1)));
        assert_eq!("4,2,3,2".parse::<Chain>().unwrap(), ch(&[4, 2, 3, 2]));
        assert_eq!("[5, 2]".parse::<Chain>().unwrap(), ch(&[5, 2]));
        assert!(matches!(
            "4,x".parse::<Chain>(),
            Err(WahlError::BadEntry(_))
        ));
        assert_eq!(ch(&[4, 2, 3, 2]).to_string(), "4,2,3,2");
    }

    #[test]
    fn hj_examples() {
        assert_eq!(hj_value(&ch(&[4])), frac(4, 1));
        assert_eq!(hj_value(&ch(&[3, 3])), frac(8, 3));
        // 4 - 1/(2 - 1/(3 - 1/2)) = 4 - 1/(2 - 2/5) = 4 - 5/8
        assert_eq!(hj_value(&ch(&[4, 2, 3, 2])), frac(27, 8));
        assert_eq!(hj_value(&ch(&[2, 9, 2, 2, 2, 2, 3])), frac(169, 90));
    }

    #[test]
    fn fraction_examples() {
        assert_eq!(chain_from_fraction(&big(4), &big(1)).unwrap(), ch(&[4]));
        assert_eq!(
            chain_from_fraction(&big(27), &big(8)).unwrap(),
            ch(&[4, 2, 3, 2])
        );
        assert_eq!(
            chain_from_fraction(&big(169), &big(90)).unwrap(),
            ch(&[2, 9, 2, 2, 2, 2, 3])
        );
        for (m, q) in [(4, 4), (3, 5), (6, 4), (5, 0), (7, -1)] {
            assert!(matches!(
                chain_from_fraction(&big(m), &big(q)),
                Err(WahlError::InvalidFraction { .. })
            ));
        }
    }

    #[test]
    fn recognition_examples() {
        let t = recognize_class_t(&ch(&[4])).unwrap();
        assert_eq!((t.d, t.n, t.a), (big(1), big(2), big(1)));
        let t = recognize_class_t(&ch(&[9, 2, 2, 2, 2, 2])).unwrap();
        assert_eq!(
            (t.d.clone(), t.n.clone(), t.a.clone()),
            (big(1), big(7), big(1))
        );
        assert_eq!(t.index(), &big(7));
        assert!(recognize_class_t(&ch(&[5])).is_none());
        assert!(brute_class_t(5, 1).is_empty());

        let t = recognize_class_t(&ch(&[4, 2, 3, 2])).unwrap();
        assert_eq!(
            (t.d, t.n, t.a, t.m, t.q),
            (big(3), big(3), big(1), big(27), big(8))
        );
        // du Val chains are rejected.
        assert!(recognize_class_t(&ch(&[2, 2])).is_none());
        assert!(recognize_class_t(&ch(&[2])).is_none());
    }

    #[test]
    fn index_examples() {
        assert_eq!(index(&ch(&[4, 2, 3, 2])), Ok(big(3)));
        assert_eq!(index(&ch(&[5, 2])), Ok(big(3)));
        assert_eq!(index(&ch(&[6, 2, 2])), Ok(big(4)));
        assert_eq!(index(&ch(&[5])), Err(WahlError::NotClassT(ch(&[5]))));
    }

    #[test]
    fn discrepancy_examples() {
        assert_eq!(discrepancies(&ch(&[4])), vec![frac(-1, 2)]);
        assert_eq!(
            discrepancies(&ch(&[4, 2, 3, 2])),
            vec![frac(-2, 3), frac(-2, 3), frac(-2, 3), frac(-1, 3)]
        );
        assert_eq!(discrepancies(&ch(&[2, 2])), vec![frac(0, 1), frac(0, 1)]);
    }

    #[test]
    fn contribution_examples() {
        assert_eq!(k2_contribution(&ch(&[4])), frac(1, 1));
        assert_eq!(
            discrepancies(&ch(&[7, 3, 2, 2, 2, 2])),
            vec![
                frac(-5, 6),
                frac(-5, 6),
                frac(-2, 3),
                frac(-1, 2),
                frac(-1, 3),
                frac(-1, 6)
            ]
        );
        assert_eq!(k2_contribution(&ch(&[7, 3, 2, 2, 2, 2])), frac(5, 1));
        assert_eq!(k2_contribution(&ch(&[2, 2])), frac(0, 1));
    }

    #[test]
    fn generator_examples() {
        assert_eq!(generate_class_t(1, 4), vec![ch(&[4])]);
        let two = generate_class_t(2, 12);
        assert!(two.contains(&ch(&[5, 2])) && two.contains(&ch(&[2, 5])));
        assert!(two.contains(&ch(&[3, 3])));
        let four = generate_class_t(4, 12);
        assert!(four.contains(&ch(&[4, 2, 3, 2])));
        assert!(recognize_class_t(&ch(&[4, 2, 3, 2])).is_some());
        // canonical order
        assert!(four.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn recognizer_matches_brute_force() {
        for m in 2u64..=400 {
            for q in 1..m {
                if m.gcd(&q) != 1 {
                    continue;
                }
                let fast = arith::class_t_params(&m, &q);
                let brute = brute_class_t(m, q);
                assert!(brute.len() <= 1, "non-unique parameters for {m}/{q}");
                assert_eq!(fast, brute.first().copied(), "{m}/{q}");
            }
        }
    }

    #[test]
    fn generated_chains_are_recognized_with_contribution_formula() {
        for c in generate_class_t(6, 10) {
            let t = recognize_class_t(&c).expect("generated chain must be class T");
            let a = discrepancies(&c);
            assert!(a.iter().all(|x| x.is_negative() && x > &frac(-1, 1)), "{c}");
            let expected = Rational::from_integer(BigInt::from(c.len() as i64 + 1) - &t.d);
            assert_eq!(k2_contribution(&c), expected, "{c}");
        }
    }

    fn chain_strategy() -> impl Strategy<Value = Chain> {
        prop::collection::vec(2u64..=20, 1..=10).prop_map(Chain::new_unchecked)
    }

    proptest! {
        #[test]
        fn round_trip(c in chain_strategy()) {
            let (m, q) = c.fraction();
            prop_assert_eq!(chain_from_fraction(&m, &q).unwrap(), c);
        }

        #[test]
        fn reversal_preserves_d_and_n(c in chain_strategy()) {
            let fwd = recognize_class_t(&c);
            let back = recognize_class_t(&c.reversed());
            prop_assert_eq!(fwd.is_some(), back.is_some());
            if let (Some(f), Some(b)) = (fwd, back) {
                prop_assert_eq!((f.d, f.n), (b.d, b.n));
            }
        }

        #[test]
        fn contribution_is_nonnegative(c in chain_strategy()) {
            prop_assert!(!k2_contribution(&c).is_negative());
        }
    }
}
