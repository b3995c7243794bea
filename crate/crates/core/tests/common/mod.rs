//! Brute-force reference implementations, written from the definitions and
//! sharing no code with the library beyond its public input types.
#![allow(dead_code)]

use std::collections::BTreeMap;

use coulomb_core::gauge::{FramedTheory, Grading};
use coulomb_core::series::TruncatedSeries;
use rand::Rng;

/// Raw theory data: arrow list and dimension vectors.
#[derive(Debug, Clone)]
pub struct Raw {
    pub n: usize,
    pub arrows: Vec<(usize, usize)>,
    pub dim_v: Vec<i64>,
    pub dim_w: Vec<i64>,
}

impl Raw {
    pub fn of(t: &FramedTheory) -> Raw {
        Raw {
            n: t.quiver().len(),
            arrows: t.quiver().arrows().to_vec(),
            dim_v: t.dim_v().to_vec(),
            dim_w: t.dim_w().to_vec(),
        }
    }

    pub fn vars(&self) -> usize {
        self.dim_v.iter().sum::<i64>() as usize
    }

    fn split(&self, flat: &[i64]) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut at = 0;
        for &d in &self.dim_v {
            out.push(flat[at..at + d as usize].to_vec());
            at += d as usize;
        }
        out
    }
}

/// Exponent in half-units straight from the defining sums. `flipped`
/// selects the sign in front of the determinant term.
pub fn exponent(raw: &Raw, grading: &Grading, flat: &[i64], flipped: bool) -> i64 {
    let th = raw.split(flat);
    let mut d = 0;
    let mut det_pairing = 0;
    for &(t, h) in &raw.arrows {
        for x in &th[h] {
            for y in &th[t] {
                d += (y - x).max(0);
                det_pairing += x - y;
            }
        }
    }
    if !matches!(grading, Grading::Character(_)) {
        for j in 0..raw.n {
            for x in &th[j] {
                d += raw.dim_w[j] * (-x).max(0);
            }
        }
    }
    let mut rho2 = 0;
    for p in &th {
        for a in 0..p.len() {
            for b in a + 1..p.len() {
                rho2 += p[a] - p[b];
            }
        }
    }
    let mut e = 2 * d - 2 * rho2;
    if let Some(alpha) = grading.alpha() {
        let sign = if flipped { 1 } else { -1 };
        e += sign * det_pairing;
        for j in 0..raw.n {
            let mut c_alpha = 2 * alpha[j];
            for &(t, h) in &raw.arrows {
                if t == j {
                    c_alpha -= alpha[h];
                }
                if h == j {
                    c_alpha -= alpha[t];
                }
            }
            let class: i64 = th[j].iter().sum();
            e += class * c_alpha;
        }
    }
    e
}

fn in_domain(raw: &Raw, flat: &[i64], partitions: bool) -> bool {
    raw.split(flat).iter().all(|p| {
        p.windows(2).all(|w| w[0] >= w[1]) && (!partitions || p.iter().all(|&x| x >= 0))
    })
}

/// Every integer vector of length `n` with entries in `[lo, hi]`.
pub fn cube(n: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            for x in lo..=hi {
                let mut w = v.clone();
                w.push(x);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Domain points of the closed `l_inf` ball of radius `r`.
pub fn ball(raw: &Raw, r: i64, partitions: bool) -> Vec<Vec<i64>> {
    let lo = if partitions { 0 } else { -r };
    cube(raw.vars(), lo, r)
        .into_iter()
        .filter(|v| in_domain(raw, v, partitions))
        .collect()
}

/// Smallest radius `R` such that every domain point on the shell
/// `|theta|_inf = R + 1` has exponent above `bound`.
pub fn next_shell_radius(raw: &Raw, grading: &Grading, bound: i64, partitions: bool) -> i64 {
    if raw.vars() == 0 {
        return 0;
    }
    let mut r = 0;
    loop {
        let s = r + 1;
        let shell_min = ball(raw, s, partitions)
            .into_iter()
            .filter(|v| v.iter().map(|x| x.abs()).max() == Some(s))
            .map(|v| exponent(raw, grading, &v, true))
            .min();
        if shell_min.is_none_or(|m| m > bound) {
            return r;
        }
        r += 1;
        assert!(r < 500, "oracle radius runaway");
    }
}

/// Number of ways to write `n` as a sum of the given positive parts.
pub fn partition_count(parts: &[i64], n: i64) -> i64 {
    let mut ways = vec![0i64; n.max(0) as usize + 1];
    if n < 0 {
        return 0;
    }
    ways[0] = 1;
    for &p in parts {
        for m in p as usize..ways.len() {
            ways[m] += ways[m - p as usize];
        }
    }
    ways[n as usize]
}

/// Stabilizer degrees (in powers of `t`) of a coweight.
fn stabilizer_degrees(raw: &Raw, flat: &[i64]) -> Vec<i64> {
    let mut out = Vec::new();
    for p in raw.split(flat) {
        let mut counts = BTreeMap::new();
        for x in p {
            *counts.entry(x).or_insert(0i64) += 1;
        }
        for m in counts.values() {
            out.extend(1..=*m);
        }
    }
    out
}

/// Map `(t in half-units, z) -> coefficient`.
pub type Terms = BTreeMap<(i64, Vec<i64>), i64>;

/// Unpruned monopole sum over the ball of radius `r`, up to `t^order`.
pub fn monopole_sum(raw: &Raw, grading: &Grading, r: i64, order: i64, z_graded: bool) -> Terms {
    let partitions = matches!(grading, Grading::Character(_));
    let bound = 2 * order;
    let mut terms = Terms::new();
    for v in ball(raw, r, partitions) {
        let e = exponent(raw, grading, &v, true);
        if e > bound {
            continue;
        }
        let z: Vec<i64> = if z_graded {
            raw.split(&v).iter().map(|p| p.iter().sum()).collect()
        } else {
            Vec::new()
        };
        let degrees = stabilizer_degrees(raw, &v);
        let mut k = 0;
        while e + 2 * k <= bound {
            let c = partition_count(&degrees, k);
            if c != 0 {
                *terms.entry((e + 2 * k, z.clone())).or_insert(0) += c;
            }
            k += 1;
        }
    }
    terms.retain(|_, c| *c != 0);
    terms
}

pub fn terms_of(s: &TruncatedSeries) -> Terms {
    s.terms()
        .map(|(m, c)| ((m.t, m.z.clone()), i64::try_from(c.clone()).expect("small coefficient")))
        .collect()
}

/// All rational vectors with entries `p/q`, `|p| <= 4`, `1 <= q <= 4`,
/// scaled to integer vectors on the same rays.
pub fn sample_rays(n: usize) -> Vec<Vec<i64>> {
    let mut fracs: Vec<(i64, i64)> = Vec::new();
    for q in 1..=4i64 {
        for p in -4..=4i64 {
            if num_integer::gcd(p, q) == 1 || p == 0 && q == 1 {
                fracs.push((p, q));
            }
        }
    }
    let mut out = vec![Vec::<(i64, i64)>::new()];
    for _ in 0..n {
        let mut next = Vec::new();
        for v in &out {
            for &f in &fracs {
                let mut w = v.clone();
                w.push(f);
                next.push(w);
            }
        }
        out = next;
    }
    out.into_iter()
        .filter(|v| v.iter().any(|&(p, _)| p != 0))
        .map(|v| {
            let l = v.iter().fold(1, |acc, &(_, q)| num_integer::lcm(acc, q));
            v.iter().map(|&(p, q)| p * (l / q)).collect()
        })
        .collect()
}

/// Divergent if some sampled ray in the domain has exponent `<= 0`.
pub fn ray_sampling_divergent(raw: &Raw, grading: &Grading, rays: &[Vec<i64>]) -> bool {
    let partitions = matches!(grading, Grading::Character(_));
    rays.iter()
        .any(|v| in_domain(raw, v, partitions) && exponent(raw, grading, v, true) <= 0)
}

/// A random quiver on `n` vertices with up to `max_arrows` arrows (no loops).
pub fn random_arrows(rng: &mut impl Rng, n: usize, max_arrows: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let count = rng.gen_range(0..=max_arrows);
    (0..count)
        .map(|_| {
            let t = rng.gen_range(0..n);
            let mut h = rng.gen_range(0..n - 1);
            if h >= t {
                h += 1;
            }
            (t, h)
        })
        .collect()
}
