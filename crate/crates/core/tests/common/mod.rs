#![allow(dead_code)]

use fpet_core::fpoly::{FPoly, FPolyFamily};
use fpet_core::rational::{frac, q, QVec, Q};
use fpet_core::torus::{Phasor, TorusSystem, TrigPoly};
use rand::Rng;

fn small_vec<R: Rng>(rng: &mut R, dim: usize, range: i64) -> QVec {
    (0..dim)
        .map(|_| q(rng.random_range(-range..=range)))
        .collect()
}

/// A random good family with `k <= k_max` members at height `d <= d_max`.
/// When `last_top` is set the last member is top-degree.
pub fn random_good_family<R: Rng>(
    rng: &mut R,
    k_max: usize,
    d_max: u32,
    last_top: bool,
) -> FPolyFamily {
    let d = rng.random_range(1..=d_max);
    let k = rng.random_range(1..=k_max);
    let mut shapes: Vec<Vec<u32>> = Vec::with_capacity(k);
    for i in 0..k {
        let lead = if (last_top && i + 1 == k) || rng.random_bool(0.5) {
            d
        } else {
            rng.random_range(1..=d)
        };
        shapes.push((1..=lead).collect());
    }
    let count: usize = shapes.iter().map(Vec::len).sum();
    let dim = count + rng.random_range(0..=1usize);
    loop {
        let members: Vec<FPoly> = shapes
            .iter()
            .map(|js| {
                let terms: Vec<(u32, QVec)> =
                    js.iter().map(|&j| (j, small_vec(rng, dim, 2))).collect();
                FPoly::from_terms(d, dim, &terms).unwrap()
            })
            .collect();
        let fam = FPolyFamily::new(members).unwrap();
        // a zero draw would silently lower a member's degree
        let shaped = fam
            .members()
            .iter()
            .zip(&shapes)
            .all(|(m, js)| m.leading_index() as usize == js.len());
        if shaped && fam.is_good() {
            return fam;
        }
    }
}

/// `m × dim` system with small rational entries.
pub fn random_system<R: Rng>(rng: &mut R, m: usize, dim: usize) -> TorusSystem {
    let a: Vec<QVec> = (0..m)
        .map(|_| {
            (0..dim)
                .map(|_| {
                    let den = [1, 2, 3, 5][rng.random_range(0..4)];
                    frac(rng.random_range(-3..=3), den)
                })
                .collect()
        })
        .collect();
    TorusSystem::new(a).unwrap()
}

/// A trigonometric polynomial with up to `terms` frequencies in `[-r, r]^m`.
pub fn random_trig<R: Rng>(rng: &mut R, m: usize, terms: usize, r: i64) -> TrigPoly {
    let mut f = TrigPoly::zero(m);
    for _ in 0..terms {
        let chi: Vec<i64> = (0..m).map(|_| rng.random_range(-r..=r)).collect();
        let re = frac(rng.random_range(-4..=4), rng.random_range(1..=3));
        let im = frac(rng.random_range(-4..=4), rng.random_range(1..=3));
        f.add_term(chi, Phasor::from_parts(re, im));
    }
    f
}

pub fn qs(xs: &[(i64, i64)]) -> Vec<Q> {
    xs.iter().map(|&(n, d)| frac(n, d)).collect()
}
