use std::collections::{BTreeMap, BTreeSet};

use coulomb_core::series::TruncatedSeries;
use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::error::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DiffStatus {
    Equal,
    /// Equal after truncating both to the smaller order.
    EqualUpToOrder,
    Different {
        t: i64,
        z: Vec<i64>,
        a: BigInt,
        b: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffReport {
    pub status: DiffStatus,
    /// Common truncation order, half-units.
    pub order: i64,
    pub orders: (i64, i64),
}

impl DiffReport {
    pub fn is_equal(&self) -> bool {
        !matches!(self.status, DiffStatus::Different { .. })
    }

    pub fn to_json(&self) -> Value {
        let status = match self.status {
            DiffStatus::Equal => "equal",
            DiffStatus::EqualUpToOrder => "equal_up_to_order",
            DiffStatus::Different { .. } => "different",
        };
        let mut doc = json!({
            "format": "coulomb-diff/1",
            "status": status,
            "order": self.order,
            "orders": [self.orders.0, self.orders.1],
        });
        if let DiffStatus::Different { t, z, a, b } = &self.status {
            doc["first_difference"] = json!({ "t": t, "z": z, "a": a.to_string(), "b": b.to_string() });
        }
        doc
    }
}

fn coefficients(s: &TruncatedSeries) -> BTreeMap<(i64, Vec<i64>), BigInt> {
    s.terms().map(|(m, c)| ((m.t, m.z.clone()), c.clone())).collect()
}

/// Compares two series files up to the smaller truncation order. Both are
/// read back into half-units first, so files written with different unit
/// flags compare by value.
pub fn diff_series(a_text: &str, b_text: &str) -> Result<DiffReport> {
    let (a, _) = TruncatedSeries::parse_file(a_text)?;
    let (b, _) = TruncatedSeries::parse_file(b_text)?;
    if a.z_vars() != b.z_vars() {
        return Err(coulomb_core::Error::VariableMismatch(a.z_vars(), b.z_vars()).into());
    }
    let order = a.order().min(b.order());
    let ca = coefficients(&a.truncate(order));
    let cb = coefficients(&b.truncate(order));
    let keys: BTreeSet<&(i64, Vec<i64>)> = ca.keys().chain(cb.keys()).collect();
    let zero = BigInt::from(0);
    for key in keys {
        let x = ca.get(key).unwrap_or(&zero);
        let y = cb.get(key).unwrap_or(&zero);
        if x != y {
            return Ok(DiffReport {
                status: DiffStatus::Different {
                    t: key.0,
                    z: key.1.clone(),
                    a: x.clone(),
                    b: y.clone(),
                },
                order,
                orders: (a.order(), b.order()),
            });
        }
    }
    let status = if a.order() == b.order() {
        DiffStatus::Equal
    } else {
        DiffStatus::EqualUpToOrder
    };
    Ok(DiffReport {
        status,
        order,
        orders: (a.order(), b.order()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use coulomb_core::series::Units;

    fn file(order: i64, coeffs: &[i64]) -> String {
        TruncatedSeries::from_dense(order, 2, coeffs).to_file_string(Units::Half).unwrap()
    }

    #[test]
    fn file_against_itself() {
        let a = file(12, &[1, 3, 5, 7, 9, 11, 13]);
        assert_eq!(diff_series(&a, &a).unwrap().status, DiffStatus::Equal);
    }

    #[test]
    fn matching_prefix() {
        let a = file(12, &[1, 3, 5, 7, 9, 11, 13]);
        let b = file(20, &[1, 3, 5, 7, 9, 11, 13, 15, 17, 19, 21]);
        let r = diff_series(&a, &b).unwrap();
        assert_eq!((r.status, r.order), (DiffStatus::EqualUpToOrder, 12));
    }

    #[test]
    fn first_difference() {
        let a = file(6, &[1, 3, 5, 7]);
        let b = file(6, &[1, 3, 6, 8]);
        let r = diff_series(&a, &b).unwrap();
        assert_eq!(
            r.status,
            DiffStatus::Different {
                t: 4,
                z: vec![],
                a: 5.into(),
                b: 6.into()
            }
        );
    }

    #[test]
    fn units_are_normalised() {
        let s = TruncatedSeries::from_dense(8, 2, &[1, 2, 3, 4, 5]);
        let half = s.to_file_string(Units::Half).unwrap();
        let int = s.to_file_string(Units::Integer).unwrap();
        assert_eq!(diff_series(&half, &int).unwrap().status, DiffStatus::Equal);
    }

    #[test]
    fn malformed_input() {
        let err = diff_series("garbage", &file(2, &[1])).unwrap_err();
        assert_eq!(err.exit_code(), crate::error::EXIT_IO);
    }
}
