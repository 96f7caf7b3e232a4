use std::collections::BTreeMap;
use std::fmt;

use super::{Assortment, Instance, RecommendationPlan, Transitions};
use crate::tol;

/// One violated model assumption.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFiniteRevenue {
        product: usize,
    },
    ArrivalOutOfRange {
        product: usize,
        value: f64,
    },
    ArrivalSum {
        sum: f64,
    },
    NegativeWeight {
        row: usize,
        column: usize,
        value: f64,
    },
    WeightAboveOne {
        row: usize,
        column: usize,
        value: f64,
    },
    RowSum {
        row: usize,
        sum: f64,
    },
    Unsorted {
        position: usize,
    },
}

impl fmt::Display for Violation {
    /// Products and rows are printed with their 1-based labels.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Violation::NonFiniteRevenue { product } => {
                write!(f, "revenue of product {} is not finite", product + 1)
            }
            Violation::ArrivalOutOfRange { product, value } => {
                write!(
                    f,
                    "arrival of product {} is {value}, outside [0, 1]",
                    product + 1
                )
            }
            Violation::ArrivalSum { sum } => write!(f, "arrivals sum to {sum} != 1"),
            Violation::NegativeWeight { row, column, value } => {
                write!(f, "v[{}][{column}] = {value} is negative", row + 1)
            }
            Violation::WeightAboveOne { row, column, value } => {
                write!(f, "v[{}][{column}] = {value} exceeds 1", row + 1)
            }
            Violation::RowSum { row, sum } => {
                write!(f, "transition row {} sums to {sum} != 1", row + 1)
            }
            Violation::Unsorted { position } => write!(
                f,
                "revenues not non-increasing at products {} and {}",
                position + 1,
                position + 2
            ),
        }
    }
}

/// Result of [`validate_instance`]: violations plus structural flags.
#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub canonical: bool,
    pub homogeneous: bool,
    pub transit_to_one: bool,
    pub has_zero_no_purchase: bool,
}

impl ValidationReport {
    /// No violations other than the revenue order, which canonicalization repairs.
    pub fn is_valid(&self) -> bool {
        self.violations
            .iter()
            .all(|v| matches!(v, Violation::Unsorted { .. }))
    }

    /// No violations at all.
    pub fn is_valid_canonical(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every model assumption and classifies the instance.
pub fn validate_instance(inst: &Instance) -> ValidationReport {
    let n = inst.n();
    let mut violations = Vec::new();
    for (i, &r) in inst.revenues().iter().enumerate() {
        if !r.is_finite() {
            violations.push(Violation::NonFiniteRevenue { product: i });
        }
    }
    for (i, &l) in inst.arrivals().iter().enumerate() {
        if !(0.0..=1.0).contains(&l) {
            violations.push(Violation::ArrivalOutOfRange {
                product: i,
                value: l,
            });
        }
    }
    let sum: f64 = inst.arrivals().iter().sum();
    if (sum - 1.0).abs() > tol::FEASIBILITY || !sum.is_finite() {
        violations.push(Violation::ArrivalSum { sum });
    }
    let rows = match inst.transitions() {
        Transitions::Homogeneous(_) => 1,
        _ => n,
    };
    for j in 0..rows {
        let mut entries = vec![(0, inst.no_purchase(j))];
        entries.extend(inst.links(j).map(|(i, w)| (i + 1, w)));
        let mut total = 0.0;
        for (column, value) in entries {
            if value < 0.0 || value.is_nan() {
                violations.push(Violation::NegativeWeight {
                    row: j,
                    column,
                    value,
                });
            } else if value > 1.0 {
                violations.push(Violation::WeightAboveOne {
                    row: j,
                    column,
                    value,
                });
            }
            total += value;
        }
        if (total - 1.0).abs() > tol::FEASIBILITY || !total.is_finite() {
            violations.push(Violation::RowSum { row: j, sum: total });
        }
    }
    if let Some(position) = inst.revenues().windows(2).position(|w| w[0] < w[1]) {
        violations.push(Violation::Unsorted { position });
    }
    ValidationReport {
        violations,
        canonical: inst.is_canonical(),
        homogeneous: inst.is_homogeneous(),
        transit_to_one: inst.is_transit_to_one(),
        has_zero_no_purchase: (0..rows).any(|j| inst.no_purchase(j) == 0.0),
    }
}

/// Relabeling that sorts products by revenue, descending, ties by original index.
///
/// `order[k]` is the original index of canonical product `k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Permutation {
    pub fn canonical(inst: &Instance) -> Self {
        let mut order: Vec<usize> = (0..inst.n()).collect();
        order.sort_by(|&a, &b| {
            inst.revenue(b)
                .partial_cmp(&inst.revenue(a))
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        Self::from_order(order)
    }

    pub fn from_order(order: Vec<usize>) -> Self {
        let mut position = vec![0; order.len()];
        for (k, &i) in order.iter().enumerate() {
            position[i] = k;
        }
        Self { order, position }
    }

    pub fn is_identity(&self) -> bool {
        self.order.iter().enumerate().all(|(k, &i)| k == i)
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    /// Instance relabeled into canonical order.
    pub fn apply(&self, inst: &Instance) -> Instance {
        let n = inst.n();
        let revenues = self.order.iter().map(|&i| inst.revenue(i)).collect();
        let arrivals = self.order.iter().map(|&i| inst.arrival(i)).collect();
        let transitions = match inst.transitions() {
            Transitions::Homogeneous(row) => {
                let mut out = vec![row[0]];
                out.extend(self.order.iter().map(|&i| row[i + 1]));
                Transitions::Homogeneous(out)
            }
            Transitions::Dense(_) => {
                let mut w = Vec::with_capacity(n * (n + 1));
                for &j in &self.order {
                    w.push(inst.no_purchase(j));
                    let row = inst.row(j);
                    w.extend(self.order.iter().map(|&i| row[i + 1]));
                }
                Transitions::Dense(w)
            }
            Transitions::Sparse { .. } => {
                let no_purchase = self.order.iter().map(|&j| inst.no_purchase(j)).collect();
                let links = self
                    .order
                    .iter()
                    .map(|&j| {
                        let mut row: Vec<(usize, f64)> =
                            inst.links(j).map(|(i, w)| (self.position[i], w)).collect();
                        row.sort_by_key(|&(i, _)| i);
                        row
                    })
                    .collect();
                Transitions::Sparse { no_purchase, links }
            }
        };
        Instance::new(revenues, arrivals, transitions).expect("relabeling keeps dimensions")
    }

    /// Canonical assortment to original labels.
    pub fn to_original(&self, s: &Assortment) -> Assortment {
        Assortment::from_indices(s.members().iter().map(|&k| self.order[k]))
    }

    /// Original assortment to canonical labels.
    pub fn to_canonical(&self, s: &Assortment) -> Assortment {
        Assortment::from_indices(s.members().iter().map(|&i| self.position[i]))
    }

    pub fn plan_to_original(&self, plan: &RecommendationPlan) -> RecommendationPlan {
        match plan {
            RecommendationPlan::RecommendAll => RecommendationPlan::RecommendAll,
            RecommendationPlan::Explicit(map) => {
                let out: BTreeMap<usize, Vec<usize>> = map
                    .iter()
                    .map(|(&j, set)| {
                        let mut set: Vec<usize> = set.iter().map(|&k| self.order[k]).collect();
                        set.sort_unstable();
                        (self.order[j], set)
                    })
                    .collect();
                RecommendationPlan::Explicit(out)
            }
        }
    }
}

/// Canonical copy of the instance together with the relabeling used.
pub fn canonicalize(inst: &Instance) -> (Instance, Permutation) {
    let perm = Permutation::canonical(inst);
    if perm.is_identity() {
        (inst.clone(), perm)
    } else {
        (perm.apply(inst), perm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{mcst_revenue, regularity_example};

    #[test]
    fn regularity_example_is_valid_and_heterogeneous() {
        let report = validate_instance(&regularity_example());
        assert!(report.is_valid_canonical(), "{:?}", report.violations);
        assert!(!report.homogeneous);
        assert!(!report.transit_to_one);
        assert!(!report.has_zero_no_purchase);
    }

    #[test]
    fn arrival_sum_reported() {
        let rows = vec![vec![1.0, 0.0, 0.0], vec![1.0, 0.0, 0.0]];
        let inst = Instance::from_rows(vec![2.0, 1.0], vec![0.4, 0.5], &rows).unwrap();
        let report = validate_instance(&inst);
        assert_eq!(report.violations.len(), 1);
        assert!(matches!(report.violations[0], Violation::ArrivalSum { .. }));
        assert!(report.violations[0].to_string().contains("arrivals sum"));
    }

    #[test]
    fn homogeneous_flagged() {
        let row = vec![0.2, 0.3, 0.5];
        let inst =
            Instance::from_rows(vec![2.0, 1.0], vec![0.5, 0.5], &[row.clone(), row]).unwrap();
        let report = validate_instance(&inst);
        assert!(report.homogeneous);
        assert!(report.is_valid_canonical());
    }

    #[test]
    fn row_and_sign_violations() {
        let rows = vec![vec![0.0, 0.5, 0.6], vec![1.2, -0.2, 0.0]];
        let inst = Instance::from_rows(vec![1.0, 2.0], vec![0.5, 0.5], &rows).unwrap();
        let report = validate_instance(&inst);
        assert!(report.has_zero_no_purchase);
        assert!(!report.canonical);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, Violation::RowSum { row: 0, .. })));
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::NegativeWeight {
                row: 1,
                column: 1,
                ..
            }
        )));
        assert!(report.violations.iter().any(|v| matches!(
            v,
            Violation::WeightAboveOne {
                row: 1,
                column: 0,
                ..
            }
        )));
        assert!(report
            .violations
            .contains(&Violation::Unsorted { position: 0 }));
    }

    #[test]
    fn canonicalization_preserves_revenues() {
        let rows = vec![
            vec![0.2, 0.1, 0.3, 0.4],
            vec![0.5, 0.25, 0.0, 0.25],
            vec![0.1, 0.6, 0.3, 0.0],
        ];
        let inst = Instance::from_rows(vec![1.0, 3.0, 2.0], vec![0.2, 0.3, 0.5], &rows).unwrap();
        let (canon, perm) = canonicalize(&inst);
        assert_eq!(perm.order(), &[1, 2, 0]);
        assert!(canon.is_canonical());
        for mask in 0..8u32 {
            let s = Assortment::from_indicator(&[mask & 1 != 0, mask & 2 != 0, mask & 4 != 0]);
            let (orig, _) = mcst_revenue(&inst, &s).unwrap();
            let cs = perm.to_canonical(&s);
            let (rev, plan) = mcst_revenue(&canon, &cs).unwrap();
            assert!((orig - rev).abs() < 1e-15);
            assert_eq!(perm.to_original(&cs), s);
            perm.plan_to_original(&plan).validate(&s, 3).unwrap();
        }
        let sparse = Instance::new(
            inst.revenues().to_vec(),
            inst.arrivals().to_vec(),
            Transitions::Sparse {
                no_purchase: vec![0.2, 0.5, 0.1],
                links: vec![
                    vec![(0, 0.1), (1, 0.3), (2, 0.4)],
                    vec![(0, 0.25), (2, 0.25)],
                    vec![(0, 0.6), (1, 0.3)],
                ],
            },
        )
        .unwrap();
        let (canon_sparse, _) = canonicalize(&sparse);
        for j in 0..3 {
            assert_eq!(canon_sparse.row(j), canon.row(j));
        }
    }
}
