//! Random seed configurations and valid blow-up sequences.

#![allow(dead_code)]

use qgsmooth::blowup::BlowupStep;
use qgsmooth::config::{Branch, Configuration, CurveClass, SurfaceInvariants};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Curves satisfying adjunction with arbitrary nonnegative pairings.
pub fn random_config(rng: &mut impl Rng) -> Configuration {
    let n = rng.random_range(1..=7);
    let curves = (0..n)
        .map(|i| {
            let genus = rng.random_range(0..=2);
            let self_int = rng.random_range(-6..=2);
            CurveClass::new(format!("C{i}"), self_int, genus, 2 * genus - 2 - self_int)
        })
        .collect();
    let k2 = rng.random_range(-3..=9);
    let mut c = Configuration::new(SurfaceInvariants::other(1, k2), curves).unwrap();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(0.4) {
                let v = rng.random_range(1..=3);
                c.set_pair(&format!("C{i}"), &format!("C{j}"), v).unwrap();
            }
        }
    }
    c
}

/// A step that `blow_up` accepts on `c`: one to three distinct curves with
/// multiplicities the genera and pairings can absorb.
pub fn random_step(c: &Configuration, rng: &mut impl Rng) -> BlowupStep {
    let mut order: Vec<usize> = (0..c.len()).collect();
    order.shuffle(rng);
    let want = rng.random_range(1..=3usize.min(c.len()));
    let mut picked: Vec<(usize, u32)> = Vec::new();
    for i in order {
        if picked.len() == want {
            break;
        }
        let genus = c.curves[i].genus;
        let max_mult = if genus >= 1 && rng.random_bool(0.3) {
            2
        } else {
            1
        };
        let mult = rng.random_range(1..=max_mult);
        debug_assert!(genus >= (mult as i64) * (mult as i64 - 1) / 2);
        let fits = picked
            .iter()
            .all(|&(j, m)| c.pairing_at(i, j) >= (m * mult) as i64);
        if fits {
            picked.push((i, mult));
        }
    }
    BlowupStep {
        label: None,
        branches: picked
            .into_iter()
            .map(|(i, m)| Branch::new(c.curves[i].name.clone(), m))
            .collect(),
    }
}

/// 2 p_a - 2 = C^2 + K.C for every curve.
pub fn adjunction_holds(c: &Configuration) -> bool {
    c.curves
        .iter()
        .enumerate()
        .all(|(i, x)| x.self_int == c.pairing_at(i, i) && 2 * x.genus - 2 == x.self_int + x.k_deg)
}
