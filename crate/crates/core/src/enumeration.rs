//! Properness of exponent functions and enumeration of coweights below an
//! exponent bound.
//!
//! The exponent `f` is convex piecewise linear. Its linearity cones are the
//! sign patterns of the max-terms; a pattern is kept only if its open cone
//! meets the summation domain, which is tested by an exact LP as the pattern
//! is built up. On each surviving cone `f` is linear, and minimising it over
//! the faces `theta_i = +-1` of the unit cube gives the slope `m` with
//! `f(theta) >= m |theta|_inf`. A nonpositive minimum is a divergent ray.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::gauge::{Coweight, ExponentConfig, ExponentFunction, FramedTheory, Grading};
use crate::linalg::{self, q, Q};
use crate::lp::{self, Constraint, Outcome, Relation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    Proper,
    Divergent,
    Inconclusive,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Proper => "Proper",
            Verdict::Divergent => "Divergent",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

/// Criterion used to stand in for the "good or ugly" condition.
pub const PROPERNESS_PROXY: &str = "strict properness: exponent > 0 on the summation domain away from the origin";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodnessReport {
    pub verdict: Verdict,
    /// Primitive integer point of a ray on which the exponent is `<= 0`.
    pub witness: Option<Vec<BigInt>>,
    pub cones_checked: u64,
    /// For proper functions, the largest `m` with `f >= m |theta|_inf`
    /// (half-units per unit of `theta`).
    pub slope: Option<Q>,
    pub proxy: &'static str,
}

/// Summation domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// Nonincreasing sequences.
    Dominant,
    /// Nonincreasing nonnegative sequences.
    PartitionTuples,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationConfig {
    pub cone_cap: u64,
    pub radius_cap: u64,
    /// Enumerate the `l_inf` ball of this radius instead of relying on a
    /// properness certificate.
    pub radius_override: Option<u64>,
    pub exponent: ExponentConfig,
}

impl Default for EnumerationConfig {
    fn default() -> Self {
        EnumerationConfig {
            cone_cap: 1_000_000,
            radius_cap: 10_000,
            radius_override: None,
            exponent: ExponentConfig::default(),
        }
    }
}

fn domain_constraints(shape: &[usize], domain: Domain) -> Vec<Constraint> {
    let n: usize = shape.iter().sum();
    let mut out = Vec::new();
    let mut at = 0;
    for &d in shape {
        for a in 0..d.saturating_sub(1) {
            let mut c = vec![0; n];
            c[at + a] = 1;
            c[at + a + 1] = -1;
            out.push(Constraint::int(&c, Relation::Ge, 0));
        }
        if domain == Domain::PartitionTuples && d > 0 {
            let mut c = vec![0; n];
            c[at + d - 1] = 1;
            out.push(Constraint::int(&c, Relation::Ge, 0));
        }
        at += d;
    }
    out
}

struct Search<'a> {
    f: &'a ExponentFunction,
    base: Vec<Constraint>,
    cap: u64,
    leaves: u64,
    min_slope: Option<Q>,
    witness: Option<Vec<BigInt>>,
    capped: bool,
}

impl Search<'_> {
    /// Depth-first over sign choices; `signs[k]` is +1 when term `k` is active.
    fn descend(&mut self, signs: &mut Vec<i64>) {
        if self.witness.is_some() || self.capped {
            return;
        }
        let k = signs.len();
        if k == self.f.terms().len() {
            self.leaf(signs);
            return;
        }
        for s in [1, -1] {
            signs.push(s);
            if self.open_cone_nonempty(signs) {
                self.descend(signs);
            }
            signs.pop();
            if self.witness.is_some() || self.capped {
                return;
            }
        }
    }

    fn open_cone_nonempty(&self, signs: &[i64]) -> bool {
        let mut cons = self.base.clone();
        for (s, (_, form)) in signs.iter().zip(self.f.terms()) {
            let coeffs: Vec<i64> = form.iter().map(|x| s * x).collect();
            cons.push(Constraint::int(&coeffs, Relation::Ge, 1));
        }
        lp::feasible(self.f.num_vars(), &cons)
    }

    fn leaf(&mut self, signs: &[i64]) {
        self.leaves += 1;
        if self.leaves > self.cap {
            self.capped = true;
            return;
        }
        let n = self.f.num_vars();
        let mut objective: Vec<Q> = self.f.linear().iter().map(|&x| q(x)).collect();
        let mut cons = self.base.clone();
        for (s, (w, form)) in signs.iter().zip(self.f.terms()) {
            if *s > 0 {
                for (o, x) in objective.iter_mut().zip(form) {
                    *o += q(w * x);
                }
            }
            let coeffs: Vec<i64> = form.iter().map(|x| s * x).collect();
            cons.push(Constraint::int(&coeffs, Relation::Ge, 0));
        }
        for i in 0..n {
            let mut unit = vec![0; n];
            unit[i] = 1;
            cons.push(Constraint::int(&unit, Relation::Le, 1));
            cons.push(Constraint::int(&unit, Relation::Ge, -1));
        }
        for i in 0..n {
            for side in [1, -1] {
                let mut face = cons.clone();
                let mut unit = vec![0; n];
                unit[i] = 1;
                face.push(Constraint::int(&unit, Relation::Eq, side));
                if let Outcome::Optimal { point, value } = lp::minimize(n, &objective, &face) {
                    if !value.is_positive() {
                        self.witness = Some(linalg::primitive_ray(&point));
                        return;
                    }
                    if self.min_slope.as_ref().is_none_or(|m| value < *m) {
                        self.min_slope = Some(value);
                    }
                }
            }
        }
    }
}

/// Decides whether `f > 0` on the domain away from the origin.
pub fn properness_of(f: &ExponentFunction, domain: Domain, cone_cap: u64) -> GoodnessReport {
    let n = f.num_vars();
    let report = |verdict, witness, cones_checked, slope| GoodnessReport {
        verdict,
        witness,
        cones_checked,
        slope,
        proxy: PROPERNESS_PROXY,
    };
    if n == 0 {
        return report(Verdict::Proper, None, 0, None);
    }
    let mut search = Search {
        f,
        base: domain_constraints(f.shape(), domain),
        cap: cone_cap,
        leaves: 0,
        min_slope: None,
        witness: None,
        capped: false,
    };
    search.descend(&mut Vec::new());
    let cones = search.leaves.min(cone_cap);
    if let Some(w) = search.witness {
        report(Verdict::Divergent, Some(w), cones, None)
    } else if search.capped {
        report(Verdict::Inconclusive, None, cones, None)
    } else {
        report(Verdict::Proper, None, cones, search.min_slope)
    }
}

pub fn properness_check(theory: &FramedTheory, grading: &Grading) -> Result<GoodnessReport> {
    properness_check_with(theory, grading, &EnumerationConfig::default())
}

pub fn properness_check_with(theory: &FramedTheory, grading: &Grading, config: &EnumerationConfig) -> Result<GoodnessReport> {
    let f = ExponentFunction::build(theory, grading, config.exponent)?;
    Ok(properness_of(&f, domain_for(grading), config.cone_cap))
}

/// Zastava characters sum over partition tuples, everything else over
/// dominant coweights.
pub fn domain_for(grading: &Grading) -> Domain {
    match grading {
        Grading::Character(_) => Domain::PartitionTuples,
        _ => Domain::Dominant,
    }
}

/// Radius of the `l_inf` ball containing every point with exponent `<= bound`.
pub fn search_radius(f: &ExponentFunction, domain: Domain, bound: i64, config: &EnumerationConfig) -> Result<u64> {
    let radius = match config.radius_override {
        Some(r) => r,
        None => {
            let report = properness_of(f, domain, config.cone_cap);
            if report.verdict != Verdict::Proper {
                return Err(Error::NotProper(report.verdict));
            }
            match report.slope {
                None => 0,
                Some(m) => (q(bound.max(0)) / m).floor().to_integer().to_u64().unwrap_or(u64::MAX),
            }
        }
    };
    if radius > config.radius_cap {
        return Err(Error::Overflow {
            radius,
            cap: config.radius_cap,
        });
    }
    Ok(radius)
}

/// Nonincreasing sequences of length `len` with entries in `[lo, hi]`.
fn sequences(len: usize, lo: i64, hi: i64) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(len);
    fn rec(len: usize, lo: i64, hi: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == len {
            out.push(cur.clone());
            return;
        }
        for v in lo..=hi {
            cur.push(v);
            rec(len, lo, v, cur, out);
            cur.pop();
        }
    }
    rec(len, lo, hi, &mut cur, &mut out);
    out
}

/// All domain points of the `l_inf` ball of radius `radius` with
/// `f <= bound`, sorted lexicographically on flattened coordinates.
pub fn enumerate_ball(f: &ExponentFunction, domain: Domain, radius: u64, bound: i64) -> Vec<Coweight> {
    let r = radius as i64;
    let lo = match domain {
        Domain::Dominant => -r,
        Domain::PartitionTuples => 0,
    };
    let shape = f.shape().to_vec();
    let per_vertex: Vec<Vec<Vec<i64>>> = shape.iter().map(|&d| sequences(d, lo, r)).collect();
    if per_vertex.is_empty() {
        return vec![Coweight::new(Vec::new())];
    }
    let rest = &per_vertex[1..];
    let mut out: Vec<Vec<i64>> = per_vertex[0]
        .par_iter()
        .flat_map_iter(|first| {
            let mut found = Vec::new();
            let mut flat = first.clone();
            product(rest, &mut flat, &mut |theta| {
                if f.eval(theta) <= bound {
                    found.push(theta.to_vec());
                }
            });
            found
        })
        .collect();
    out.sort_unstable();
    out.into_iter().map(|flat| Coweight::from_flat(&shape, &flat)).collect()
}

fn product(rest: &[Vec<Vec<i64>>], flat: &mut Vec<i64>, visit: &mut impl FnMut(&[i64])) {
    match rest.split_first() {
        None => visit(flat),
        Some((choices, tail)) => {
            for c in choices {
                let len = flat.len();
                flat.extend_from_slice(c);
                product(tail, flat, visit);
                flat.truncate(len);
            }
        }
    }
}

/// Dominant coweights with exponent `<= bound` (half-units).
pub fn enumerate_dominant(
    theory: &FramedTheory,
    grading: &Grading,
    bound: i64,
    config: &EnumerationConfig,
) -> Result<Vec<Coweight>> {
    enumerate_in(theory, grading, Domain::Dominant, bound, config)
}

/// Tuples of partitions with exponent `<= bound` (half-units).
pub fn enumerate_partition_tuples(
    theory: &FramedTheory,
    grading: &Grading,
    bound: i64,
    config: &EnumerationConfig,
) -> Result<Vec<Coweight>> {
    enumerate_in(theory, grading, Domain::PartitionTuples, bound, config)
}

fn enumerate_in(
    theory: &FramedTheory,
    grading: &Grading,
    domain: Domain,
    bound: i64,
    config: &EnumerationConfig,
) -> Result<Vec<Coweight>> {
    let f = ExponentFunction::build(theory, grading, config.exponent)?;
    let radius = search_radius(&f, domain, bound, config)?;
    Ok(enumerate_ball(&f, domain, radius, bound))
}

/// `true` when the exponent is `<= 0` at the witness point.
pub fn witness_holds(f: &ExponentFunction, witness: &[BigInt]) -> bool {
    let point: Option<Vec<i64>> = witness.iter().map(|x| x.to_i64()).collect();
    point.is_some_and(|p| f.eval(&p) <= 0 && p.iter().any(|x| !x.is_zero()))
}
