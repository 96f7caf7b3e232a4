use std::collections::BTreeMap;

use super::ModelError;

/// A set of offered products, kept sorted ascending without duplicates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Assortment {
    members: Vec<usize>,
}

impl Assortment {
    pub fn empty() -> Self {
        Self::default()
    }

    /// All products `0..n`.
    pub fn full(n: usize) -> Self {
        Self {
            members: (0..n).collect(),
        }
    }

    /// The revenue-ordered prefix `{0, ..., t-1}`.
    pub fn prefix(t: usize) -> Self {
        Self::full(t)
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut members: Vec<usize> = indices.into_iter().collect();
        members.sort_unstable();
        members.dedup();
        Self { members }
    }

    pub fn from_indicator(indicator: &[bool]) -> Self {
        Self {
            members: indicator
                .iter()
                .enumerate()
                .filter_map(|(i, &b)| b.then_some(i))
                .collect(),
        }
    }

    /// Parses 1-based product labels.
    pub fn from_labels(labels: &[usize], n: usize) -> Result<Self, ModelError> {
        let mut members = Vec::with_capacity(labels.len());
        for &label in labels {
            if label == 0 || label > n {
                return Err(ModelError::ProductOutOfRange { product: label, n });
            }
            members.push(label - 1);
        }
        Ok(Self::from_indices(members))
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// 1-based labels, ascending.
    pub fn labels(&self) -> Vec<usize> {
        self.members.iter().map(|i| i + 1).collect()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.members.binary_search(&i).is_ok()
    }

    pub fn indicator(&self, n: usize) -> Vec<bool> {
        let mut out = vec![false; n];
        for &i in &self.members {
            out[i] = true;
        }
        out
    }

    /// Products of `0..n` not in the assortment.
    pub fn complement(&self, n: usize) -> Vec<usize> {
        let inside = self.indicator(n);
        (0..n).filter(|&i| !inside[i]).collect()
    }

    pub fn check_range(&self, n: usize) -> Result<(), ModelError> {
        match self.members.last() {
            Some(&last) if last >= n => Err(ModelError::ProductOutOfRange {
                product: last + 1,
                n,
            }),
            _ => Ok(()),
        }
    }
}

/// Recommended sets `R_j` for the products `j` outside an assortment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RecommendationPlan {
    /// Every unavailable product is shown the whole assortment.
    RecommendAll,
    /// Explicit `R_j` (sorted ascending) for each unavailable product `j`.
    Explicit(BTreeMap<usize, Vec<usize>>),
}

impl RecommendationPlan {
    /// Recommended set shown to a customer who arrived at unavailable product `j`.
    pub fn recommended<'a>(&'a self, j: usize, assortment: &'a Assortment) -> &'a [usize] {
        match self {
            RecommendationPlan::RecommendAll => assortment.members(),
            RecommendationPlan::Explicit(map) => map.get(&j).map(Vec::as_slice).unwrap_or(&[]),
        }
    }

    /// Checks that keys are exactly the complement of `assortment` and every `R_j` is inside it.
    pub fn validate(&self, assortment: &Assortment, n: usize) -> Result<(), ModelError> {
        let map = match self {
            RecommendationPlan::RecommendAll => return Ok(()),
            RecommendationPlan::Explicit(map) => map,
        };
        let outside = assortment.complement(n);
        if map.len() != outside.len() || !outside.iter().all(|j| map.contains_key(j)) {
            return Err(ModelError::InvalidPlan(
                "plan keys must be exactly the products outside the assortment".into(),
            ));
        }
        for (&j, set) in map {
            if let Some(&i) = set.iter().find(|&&i| !assortment.contains(i)) {
                return Err(ModelError::InvalidPlan(format!(
                    "product {} recommended to product {} is not offered",
                    i + 1,
                    j + 1
                )));
            }
        }
        Ok(())
    }

    /// Expands to the explicit form for the given assortment.
    pub fn to_explicit(&self, assortment: &Assortment, n: usize) -> BTreeMap<usize, Vec<usize>> {
        match self {
            RecommendationPlan::Explicit(map) => map.clone(),
            RecommendationPlan::RecommendAll => assortment
                .complement(n)
                .into_iter()
                .map(|j| (j, assortment.members().to_vec()))
                .collect(),
        }
    }
}
