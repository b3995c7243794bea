//! The monopole sums themselves, and the dictionary between slices and
//! framed quiver gauge theories.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::affine::{affine_dominant, AffineType, AffineWeight};
use crate::enumeration::{
    domain_for, enumerate_ball, properness_of, search_radius, EnumerationConfig, GoodnessReport, Verdict,
};
use crate::error::{Error, Result};
use crate::gauge::{casimir_degrees, ExponentFunction, FramedTheory, Grading};
use crate::quiver::{cartan_matrix, Quiver};
use crate::series::{expand_inverse_product, TruncatedSeries};
use crate::weights::{dominance_leq, is_dominant, WeightVector};

/// Recorded in every affine result: how energies are assigned.
pub const ENERGY_CONVENTION: &str =
    "delta has energy +1; mu = lambda - alpha has energy -alpha_node when lambda has energy 0";

/// A pair `mu <= lambda` labelling a slice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SliceLabel {
    Finite {
        quiver: Quiver,
        lambda: WeightVector,
        mu: WeightVector,
        /// Optional decomposition `lambda = sum_s lambda_s`, giving the
        /// splitting of the framing.
        lambda_parts: Option<Vec<WeightVector>>,
    },
    Affine {
        quiver: Quiver,
        /// Extending vertex id; the first vertex with null-root mark 1 when absent.
        node: Option<String>,
        lambda: AffineWeight,
        mu: AffineWeight,
    },
}

impl SliceLabel {
    pub fn finite(quiver: Quiver, lambda: WeightVector, mu: WeightVector) -> Self {
        SliceLabel::Finite {
            quiver,
            lambda,
            mu,
            lambda_parts: None,
        }
    }

    /// Affine label with `mu = lambda - alpha`.
    pub fn affine_from_alpha(quiver: Quiver, node: Option<String>, lambda: AffineWeight, alpha: &[i64]) -> Result<Self> {
        if alpha.iter().any(|&a| a < 0) {
            return Err(Error::NegativeAlpha);
        }
        let ty = AffineType::from_quiver(&quiver, node.as_deref())?;
        let mu = ty.subtract_roots(&lambda, alpha)?;
        Ok(SliceLabel::Affine {
            quiver,
            node,
            lambda,
            mu,
        })
    }

    pub fn quiver(&self) -> &Quiver {
        match self {
            SliceLabel::Finite { quiver, .. } | SliceLabel::Affine { quiver, .. } => quiver,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SliceLabel::Finite { .. } => "finite",
            SliceLabel::Affine { .. } => "affine",
        }
    }
}

/// The theory attached to a slice, plus what was done to get there.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SliceTheory {
    pub theory: FramedTheory,
    /// `alpha = lambda - mu` in simple-root coordinates.
    pub alpha: Vec<i64>,
    pub notes: Vec<String>,
}

pub fn slice_to_theory(s: &SliceLabel) -> Result<FramedTheory> {
    Ok(slice_theory(s)?.theory)
}

pub fn slice_theory(s: &SliceLabel) -> Result<SliceTheory> {
    match s {
        SliceLabel::Finite {
            quiver,
            lambda,
            mu,
            lambda_parts,
        } => {
            let c = cartan_matrix(quiver);
            let dim_w = lambda.to_fundamental(&c)?;
            if !is_dominant(&dim_w) {
                return Err(Error::NotDominant);
            }
            let alpha = dominance_leq(lambda, mu, &c)?.ok_or(Error::NonComparable)?;
            let splitting = match lambda_parts {
                None => None,
                Some(parts) => Some(parts.iter().map(|p| p.to_fundamental(&c)).collect::<Result<Vec<_>>>()?),
            };
            let theory = FramedTheory::new(quiver.clone(), alpha.clone(), dim_w, splitting)?;
            Ok(SliceTheory {
                theory,
                alpha,
                notes: Vec::new(),
            })
        }
        SliceLabel::Affine {
            quiver,
            node,
            lambda,
            mu,
        } => {
            let ty = AffineType::from_quiver(quiver, node.as_deref())?;
            let mut notes = vec![ENERGY_CONVENTION.to_string()];
            let (lambda, mu) = if lambda.energy != 0 {
                notes.push(format!("energies shifted by {} to put lambda at energy 0", -lambda.energy));
                (lambda.shift_energy(-lambda.energy), mu.shift_energy(-lambda.energy))
            } else {
                (lambda.clone(), mu.clone())
            };
            if !affine_dominant(&ty, &lambda)? {
                return Err(Error::NotAffineDominant);
            }
            let dim_w = ty.to_affine_fundamental(&lambda)?;
            let alpha = ty.root_difference(&lambda, &mu)?.ok_or(Error::NonComparable)?;
            let theory = FramedTheory::new(quiver.clone(), alpha.clone(), dim_w, None)?;
            Ok(SliceTheory { theory, alpha, notes })
        }
    }
}

/// Reads a framed theory back as a slice: `lambda` from the framing, `mu`
/// from `lambda - dimV`. With `affine_node` the quiver is read as an affine
/// diagram.
pub fn theory_to_slice(t: &FramedTheory, affine: bool, affine_node: Option<String>) -> Result<SliceLabel> {
    let quiver = t.quiver().clone();
    if affine {
        let ty = AffineType::from_quiver(&quiver, affine_node.as_deref())?;
        let lambda = ty.from_affine_fundamental(t.dim_w(), 0)?;
        SliceLabel::affine_from_alpha(quiver, affine_node, lambda, t.dim_v())
    } else {
        let c = cartan_matrix(&quiver);
        let shift = c.apply(t.dim_v());
        let mu: Vec<i64> = t.dim_w().iter().zip(&shift).map(|(w, s)| w - s).collect();
        Ok(SliceLabel::Finite {
            quiver,
            lambda: WeightVector::Fundamental(t.dim_w().to_vec()),
            mu: WeightVector::Fundamental(mu),
            lambda_parts: t
                .splitting()
                .map(|parts| parts.iter().map(|p| WeightVector::Fundamental(p.clone())).collect()),
        })
    }
}

/// A computed series together with how it was obtained.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Evaluation {
    pub series: TruncatedSeries,
    pub grading: Grading,
    pub report: GoodnessReport,
    /// `l_inf` radius that was enumerated.
    pub radius: u64,
    pub radius_overridden: bool,
    /// Number of coweights contributing below the truncation order.
    pub coweights: usize,
    pub notes: Vec<String>,
}

/// `sum_theta z^{theta_bar} t^{exponent(theta)} P(t; theta)` up to `t^order`.
pub fn monopole_sum(
    theory: &FramedTheory,
    grading: &Grading,
    order: u32,
    z_graded: bool,
    config: &EnumerationConfig,
) -> Result<Evaluation> {
    let f = ExponentFunction::build(theory, grading, config.exponent)?;
    let domain = domain_for(grading);
    let report = properness_of(&f, domain, config.cone_cap);
    if config.radius_override.is_none() && report.verdict != Verdict::Proper {
        return Err(Error::NotProper(report.verdict));
    }
    let bound = 2 * order as i64;
    let radius = search_radius(&f, domain, bound, config)?;
    let thetas = enumerate_ball(&f, domain, radius, bound);
    let keyed: Vec<(i64, Vec<i64>, Vec<i64>)> = thetas
        .par_iter()
        .map(|theta| {
            let z = if z_graded { theta.class() } else { Vec::new() };
            (f.eval(&theta.flatten()), z, casimir_degrees(theta))
        })
        .collect();
    let mut groups: BTreeMap<(i64, Vec<i64>, Vec<i64>), u64> = BTreeMap::new();
    for key in keyed {
        *groups.entry(key).or_default() += 1;
    }
    let z_vars = if z_graded { theory.quiver().len() } else { 0 };
    let mut series = TruncatedSeries::zero(bound, z_vars);
    let mut casimir: HashMap<Vec<i64>, TruncatedSeries> = HashMap::new();
    let lowest = groups.keys().map(|k| k.0).min().unwrap_or(0).min(0);
    for ((e, z, degrees), count) in groups {
        let p = casimir
            .entry(degrees)
            .or_insert_with_key(|d| expand_inverse_product(d, bound - lowest).expect("positive degrees"));
        series.add_shifted(p, &BigInt::from(count), e, &z);
    }
    Ok(Evaluation {
        series,
        grading: grading.clone(),
        report,
        radius,
        radius_overridden: config.radius_override.is_some(),
        coweights: thetas.len(),
        notes: Vec::new(),
    })
}

/// Hilbert series of the Coulomb branch with the homological grading.
pub fn hilbert_eq1(theory: &FramedTheory, order: u32, config: &EnumerationConfig) -> Result<Evaluation> {
    monopole_sum(theory, &Grading::Homological, order, false, config)
}

/// Hilbert series of a finite slice, graded by loop rotation.
pub fn hilbert_slice_eq2(s: &SliceLabel, order: u32, config: &EnumerationConfig) -> Result<Evaluation> {
    if !matches!(s, SliceLabel::Finite { .. }) {
        return Err(Error::Schema("expected a finite slice".into()));
    }
    slice_sum(s, order, config)
}

/// Hilbert series of an affine slice: the same sum with the affine Cartan
/// matrix of the quiver.
pub fn hilbert_affine_slice(s: &SliceLabel, order: u32, config: &EnumerationConfig) -> Result<Evaluation> {
    if !matches!(s, SliceLabel::Affine { .. }) {
        return Err(Error::Schema("expected an affine slice".into()));
    }
    slice_sum(s, order, config)
}

fn slice_sum(s: &SliceLabel, order: u32, config: &EnumerationConfig) -> Result<Evaluation> {
    let st = slice_theory(s)?;
    let mut eval = monopole_sum(&st.theory, &Grading::Loop(st.alpha), order, false, config)?;
    eval.notes = st.notes;
    Ok(eval)
}

/// Character of the zastava space of degree `alpha`, graded by `t` and by
/// `z^{theta_bar}`.
pub fn character_zastava_eq3(q: &Quiver, alpha: &[i64], order: u32, config: &EnumerationConfig) -> Result<Evaluation> {
    if alpha.iter().any(|&a| a < 0) {
        return Err(Error::NegativeAlpha);
    }
    let theory = FramedTheory::unframed(q.clone(), alpha.to_vec())?;
    monopole_sum(&theory, &Grading::Character(alpha.to_vec()), order, true, config)
}

/// Dominant weights between `mu` and `lambda`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LeafInterval {
    Finite(Vec<WeightVector>),
    Affine {
        weights: Vec<AffineWeight>,
        /// Some weights were cut off by the energy bound.
        truncated: bool,
    },
}

/// Every `beta` with `0 <= beta <= alpha`, lexicographically.
fn boxes(alpha: &[i64]) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for &a in alpha {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..=a).map(move |b| {
                    let mut p = prefix.clone();
                    p.push(b);
                    p
                })
            })
            .collect();
    }
    out
}

pub fn leaf_interval(s: &SliceLabel, energy_bound: Option<u64>) -> Result<LeafInterval> {
    let st = slice_theory(s)?;
    match s {
        SliceLabel::Finite { quiver, .. } => {
            let c = cartan_matrix(quiver);
            let lambda = st.theory.dim_w();
            let weights = boxes(&st.alpha)
                .into_iter()
                .map(|beta| {
                    let shift = c.apply(&beta);
                    lambda.iter().zip(&shift).map(|(l, s)| l - s).collect::<Vec<i64>>()
                })
                .filter(|w| is_dominant(w))
                .map(WeightVector::Fundamental)
                .collect();
            Ok(LeafInterval::Finite(weights))
        }
        SliceLabel::Affine { quiver, node, .. } => {
            let bound = energy_bound.ok_or(Error::MissingEnergyBound)? as i64;
            let ty = AffineType::from_quiver(quiver, node.as_deref())?;
            let lambda = ty.from_affine_fundamental(st.theory.dim_w(), 0)?;
            let mut weights = Vec::new();
            let mut truncated = false;
            for beta in boxes(&st.alpha) {
                if beta[ty.node()] > bound {
                    truncated = true;
                    continue;
                }
                let w = ty.subtract_roots(&lambda, &beta)?;
                if affine_dominant(&ty, &w)? {
                    weights.push(w);
                }
            }
            Ok(LeafInterval::Affine { weights, truncated })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fw(v: &[i64]) -> WeightVector {
        WeightVector::Fundamental(v.to_vec())
    }

    fn dense(s: &TruncatedSeries) -> Vec<i64> {
        (0..=s.order() / 2)
            .map(|k| i64::try_from(s.t_coefficient(2 * k)).unwrap())
            .collect()
    }

    #[test]
    fn a1_slice_dictionary() {
        let s = SliceLabel::finite(Quiver::type_a(1), fw(&[2]), fw(&[0]));
        let t = slice_to_theory(&s).unwrap();
        assert_eq!((t.dim_v(), t.dim_w()), (&[1][..], &[2][..]));
        assert_eq!(theory_to_slice(&t, false, None).unwrap(), s);
    }

    #[test]
    fn non_comparable_slice() {
        let s = SliceLabel::finite(Quiver::type_a(1), fw(&[1]), fw(&[0]));
        assert_eq!(slice_to_theory(&s), Err(Error::NonComparable));
    }

    #[test]
    fn affine_a1_dictionary() {
        let q = Quiver::cyclic(2);
        let t = FramedTheory::new(q.clone(), vec![1, 1], vec![1, 0], None).unwrap();
        let s = theory_to_slice(&t, true, None).unwrap();
        let SliceLabel::Affine { lambda, mu, .. } = &s else { panic!() };
        assert_eq!(lambda, &AffineWeight::new(1, fw(&[0]), 0));
        assert_eq!(mu, &AffineWeight::new(1, fw(&[0]), -1));
        assert_eq!(slice_to_theory(&s).unwrap(), t);
    }

    #[test]
    fn a1_slice_series() {
        let s = SliceLabel::finite(Quiver::type_a(1), fw(&[2]), fw(&[0]));
        let e = hilbert_slice_eq2(&s, 6, &Default::default()).unwrap();
        assert_eq!(dense(&e.series), vec![1, 3, 5, 7, 9, 11, 13]);
        let trivial = SliceLabel::finite(Quiver::type_a(2), fw(&[1, 1]), fw(&[1, 1]));
        let e = hilbert_slice_eq2(&trivial, 5, &Default::default()).unwrap();
        assert_eq!(e.series, TruncatedSeries::one(10, 0));
    }

    #[test]
    fn zastava_a1() {
        let e = character_zastava_eq3(&Quiver::type_a(1), &[1], 4, &Default::default()).unwrap();
        for a in 0..=4i64 {
            for b in 0..=4 - a {
                // t^(a+b) z^b from 1/((1-t)(1-z t))
                assert_eq!(e.series.coefficient(2 * (a + b), &[b]), BigInt::from(1));
            }
        }
        assert_eq!(e.series.len(), 15);
        assert_eq!(
            character_zastava_eq3(&Quiver::type_a(1), &[-1], 4, &Default::default()),
            Err(Error::NegativeAlpha)
        );
    }

    #[test]
    fn unframed_hilbert_is_not_proper() {
        let t = FramedTheory::unframed(Quiver::type_a(2), vec![1, 1]).unwrap();
        assert_eq!(
            hilbert_eq1(&t, 4, &Default::default()),
            Err(Error::NotProper(Verdict::Divergent))
        );
        let empty = FramedTheory::new(Quiver::type_a(2), vec![0, 0], vec![1, 3], None).unwrap();
        assert_eq!(hilbert_eq1(&empty, 4, &Default::default()).unwrap().series, TruncatedSeries::one(8, 0));
    }

    #[test]
    fn affine_not_dominant() {
        let s = SliceLabel::Affine {
            quiver: Quiver::cyclic(2),
            node: None,
            lambda: AffineWeight::new(1, fw(&[2]), 0),
            mu: AffineWeight::new(1, fw(&[2]), 0),
        };
        assert_eq!(hilbert_affine_slice(&s, 4, &Default::default()), Err(Error::NotAffineDominant));
    }

    #[test]
    fn leaf_intervals() {
        let s = SliceLabel::finite(Quiver::type_a(1), fw(&[4]), fw(&[0]));
        let LeafInterval::Finite(mut got) = leaf_interval(&s, None).unwrap() else { panic!() };
        got.sort_by(|a, b| a.coords().cmp(b.coords()));
        assert_eq!(got, vec![fw(&[0]), fw(&[2]), fw(&[4])]);
        let same = SliceLabel::finite(Quiver::type_a(1), fw(&[3]), fw(&[3]));
        assert_eq!(leaf_interval(&same, None).unwrap(), LeafInterval::Finite(vec![fw(&[3])]));

        let lambda = AffineWeight::new(1, fw(&[0]), 0);
        let s = SliceLabel::affine_from_alpha(Quiver::cyclic(2), None, lambda.clone(), &[2, 2]).unwrap();
        assert_eq!(leaf_interval(&s, None), Err(Error::MissingEnergyBound));
        let LeafInterval::Affine { weights, truncated } = leaf_interval(&s, Some(2)).unwrap() else { panic!() };
        assert!(!truncated);
        assert_eq!(
            weights,
            vec![lambda.clone(), lambda.shift_energy(-1), lambda.shift_energy(-2)]
        );
        let LeafInterval::Affine { weights, truncated } = leaf_interval(&s, Some(1)).unwrap() else { panic!() };
        assert!(truncated);
        assert_eq!(weights.len(), 2);
    }
}
