//! Small immutable sorted sets, shared between nodes.
//!
//! Free-variable and free-hypothesis sets are cached on every expression and
//! proof node. They are usually tiny and frequently identical to a child's set,
//! so they are stored as a shared sorted slice; the empty set does not allocate.

use std::fmt;
use std::sync::Arc;

#[derive(Clone)]
pub struct FrozenSet<T>(Option<Arc<[T]>>);

impl<T> Default for FrozenSet<T> {
    fn default() -> Self {
        FrozenSet(None)
    }
}

impl<T: Ord + Clone> FrozenSet<T> {
    pub fn empty() -> Self {
        FrozenSet(None)
    }

    pub fn singleton(x: T) -> Self {
        FrozenSet(Some(Arc::from(vec![x])))
    }

    /// Builds a set from arbitrary (unsorted, possibly duplicated) items.
    pub fn from_vec(mut v: Vec<T>) -> Self {
        v.sort();
        v.dedup();
        Self::from_sorted(v)
    }

    fn from_sorted(v: Vec<T>) -> Self {
        if v.is_empty() {
            FrozenSet(None)
        } else {
            FrozenSet(Some(Arc::from(v)))
        }
    }

    pub fn as_slice(&self) -> &[T] {
        match &self.0 {
            Some(a) => a,
            None => &[],
        }
    }

    pub fn len(&self) -> usize {
        self.as_slice().len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_none()
    }

    pub fn contains(&self, x: &T) -> bool {
        self.as_slice().binary_search(x).is_ok()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.as_slice().iter()
    }

    pub fn first(&self) -> Option<&T> {
        self.as_slice().first()
    }

    pub fn last(&self) -> Option<&T> {
        self.as_slice().last()
    }

    fn ptr_eq(&self, other: &Self) -> bool {
        match (&self.0, &other.0) {
            (Some(a), Some(b)) => Arc::ptr_eq(a, b),
            (None, None) => true,
            _ => false,
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        if other.is_empty() || self.ptr_eq(other) {
            return self.clone();
        }
        if self.is_empty() {
            return other.clone();
        }
        let (a, b) = (self.as_slice(), other.as_slice());
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].cmp(&b[j]) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(a[i].clone());
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        if out.len() == a.len() {
            return self.clone();
        }
        if out.len() == b.len() {
            return other.clone();
        }
        Self::from_sorted(out)
    }

    pub fn insert(&self, x: T) -> Self {
        if self.contains(&x) {
            return self.clone();
        }
        self.union(&Self::singleton(x))
    }

    pub fn remove(&self, x: &T) -> Self {
        match self.as_slice().binary_search(x) {
            Err(_) => self.clone(),
            Ok(idx) => {
                let mut v = self.as_slice().to_vec();
                v.remove(idx);
                Self::from_sorted(v)
            }
        }
    }

    pub fn difference(&self, other: &Self) -> Self {
        if other.is_empty() || self.is_empty() {
            return self.clone();
        }
        let v: Vec<T> = self.iter().filter(|x| !other.contains(x)).cloned().collect();
        if v.len() == self.len() {
            self.clone()
        } else {
            Self::from_sorted(v)
        }
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        let (small, large) = if self.len() <= other.len() {
            (self, other)
        } else {
            (other, self)
        };
        small.iter().all(|x| !large.contains(x))
    }
}

impl<T: PartialEq> PartialEq for FrozenSet<T> {
    fn eq(&self, other: &Self) -> bool {
        let a: &[T] = self.0.as_deref().unwrap_or(&[]);
        let b: &[T] = other.0.as_deref().unwrap_or(&[]);
        a == b
    }
}

impl<T: Eq> Eq for FrozenSet<T> {}

impl<T: fmt::Debug> fmt::Debug for FrozenSet<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.0.as_deref().unwrap_or(&[]).iter())
            .finish()
    }
}

impl<T: Ord + Clone> FromIterator<T> for FrozenSet<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        Self::from_vec(iter.into_iter().collect())
    }
}

impl<'a, T: Ord + Clone> IntoIterator for &'a FrozenSet<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;
    fn into_iter(self) -> Self::IntoIter {
        self.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_and_remove() {
        let a: FrozenSet<i32> = [3, 1, 2].into_iter().collect();
        let b: FrozenSet<i32> = [2, 5].into_iter().collect();
        assert_eq!(a.union(&b).as_slice(), &[1, 2, 3, 5]);
        assert_eq!(a.remove(&2).as_slice(), &[1, 3]);
        assert_eq!(a.difference(&b).as_slice(), &[1, 3]);
        assert!(!a.is_disjoint(&b));
        assert!(FrozenSet::<i32>::empty().remove(&1).is_empty());
    }
}
