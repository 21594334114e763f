//! Ordered category names. The order fixes class indices everywhere: model
//! parameters, tie-breaking, and report rows.

use serde::{Deserialize, Serialize};

use crate::error::{DataError, DataResult};

/// Canonical negativity categories, by descending training frequency.
pub const CANONICAL: [&str; 8] =
    ["Politics", "Injustice", "Crime", "Economic", "Failure", "Terrorism", "Social Aspects", "Corruption"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<String>", into = "Vec<String>")]
pub struct CategorySet {
    names: Vec<String>,
}

impl CategorySet {
    /// The eight negativity categories in canonical order.
    pub fn canonical() -> Self {
        CategorySet { names: CANONICAL.iter().map(|s| s.to_string()).collect() }
    }

    /// A custom ordered set. Names must be non-empty and distinct.
    pub fn new<S: Into<String>>(names: impl IntoIterator<Item = S>) -> DataResult<Self> {
        let names: Vec<String> = names.into_iter().map(Into::into).collect();
        if names.is_empty() {
            return Err(DataError::Invalid("category set is empty".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if n.trim().is_empty() {
                return Err(DataError::Invalid("blank category name".into()));
            }
            if names[..i].contains(n) {
                return Err(DataError::Invalid(format!("duplicate category `{n}`")));
            }
        }
        Ok(CategorySet { names })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &str {
        &self.names[index]
    }

    /// Index of a category name; matching is exact.
    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn require(&self, name: &str) -> DataResult<usize> {
        self.index_of(name).ok_or_else(|| DataError::UnknownCategory(name.to_string()))
    }
}

impl Default for CategorySet {
    fn default() -> Self {
        Self::canonical()
    }
}

impl TryFrom<Vec<String>> for CategorySet {
    type Error = DataError;

    fn try_from(names: Vec<String>) -> DataResult<Self> {
        CategorySet::new(names)
    }
}

impl From<CategorySet> for Vec<String> {
    fn from(set: CategorySet) -> Self {
        set.names
    }
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, &s) in scores.iter().enumerate().skip(1) {
        if s > scores[best] {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_order() {
        let set = CategorySet::canonical();
        assert_eq!(set.len(), 8);
        assert_eq!(set.index_of("Politics"), Some(0));
        assert_eq!(set.index_of("Corruption"), Some(7));
        assert_eq!(set.index_of("politics"), None);
    }

    #[test]
    fn rejects_duplicates() {
        assert!(CategorySet::new(["a", "b", "a"]).is_err());
        assert!(CategorySet::new(Vec::<String>::new()).is_err());
    }

    #[test]
    fn argmax_ties_lowest_index() {
        assert_eq!(argmax(&[1.0, 3.0, 3.0]), 1);
        assert_eq!(argmax(&[0.0, 0.0]), 0);
        assert_eq!(argmax(&[-2.0, -1.0]), 1);
    }
}
