use std::cmp::Ordering;
use std::fmt;

/// Derivative multi-index: one non-negative count per independent variable
/// (or per argument slot of a function symbol). Mixed partials commute, so a
/// multi-index rather than a sequence of variables is the right bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn zero(len: usize) -> Self {
        MultiIndex(vec![0; len])
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        MultiIndex(counts)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn counts(&self) -> &[u32] {
        &self.0
    }

    pub fn count(&self, slot: usize) -> u32 {
        self.0[slot]
    }

    /// Total derivative order.
    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// The index with one more derivative in `slot`.
    pub fn bump(&self, slot: usize) -> Self {
        let mut c = self.0.clone();
        c[slot] += 1;
        MultiIndex(c)
    }

    /// The index with one fewer derivative in `slot`; `None` if already zero there.
    pub fn lower(&self, slot: usize) -> Option<Self> {
        if self.0[slot] == 0 {
            return None;
        }
        let mut c = self.0.clone();
        c[slot] -= 1;
        Some(MultiIndex(c))
    }

    pub fn add(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Componentwise `self >= other`, i.e. `self` is a derivative of `other`.
    pub fn contains(&self, other: &Self) -> bool {
        self.len() == other.len() && self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    pub fn sub(&self, other: &Self) -> Option<Self> {
        if !self.contains(other) {
            return None;
        }
        Some(MultiIndex(
            self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect(),
        ))
    }

    /// Componentwise maximum.
    pub fn join(&self, other: &Self) -> Self {
        debug_assert_eq!(self.len(), other.len());
        MultiIndex(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| *a.max(b))
                .collect(),
        )
    }

    /// Graded-lexicographic comparison: total order first, then the count of
    /// the earliest slot breaks ties (earlier variables rank higher).
    pub fn graded_lex(&self, other: &Self) -> Ordering {
        debug_assert_eq!(self.len(), other.len());
        self.order()
            .cmp(&other.order())
            .then_with(|| {
                for (a, b) in self.0.iter().zip(&other.0) {
                    match a.cmp(b) {
                        Ordering::Equal => continue,
                        ord => return ord,
                    }
                }
                Ordering::Equal
            })
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.graded_lex(other)
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn graded_lex_orders_by_total_order_first() {
        let a = MultiIndex::from_counts(vec![2, 0]);
        let b = MultiIndex::from_counts(vec![0, 1]);
        assert_eq!(a.graded_lex(&b), Ordering::Greater);
        let c = MultiIndex::from_counts(vec![1, 1]);
        let d = MultiIndex::from_counts(vec![0, 2]);
        assert_eq!(c.graded_lex(&d), Ordering::Greater);
    }

    #[test]
    fn containment_and_sub() {
        let a = MultiIndex::from_counts(vec![3, 1]);
        let b = MultiIndex::from_counts(vec![2, 0]);
        assert!(a.contains(&b));
        assert_eq!(a.sub(&b).unwrap(), MultiIndex::from_counts(vec![1, 1]));
        assert!(!b.contains(&a));
        assert!(b.sub(&a).is_none());
    }
}
