//! Feature-described grids of points and regions over them.
//!
//! A [`DescribedSpace`] is a rectangular grid whose every cell carries a
//! [`FeatureVector`]. Points are named by their grid labels ([`PointId`]),
//! stored exactly as the input numbers them (0- or 1-based). Points that carry
//! identical vectors fall into the same *description class*; classes are
//! computed once at construction and drive every approximation.

use std::collections::HashMap;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// Ordered tuple of integer probe values for one point.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureVector(Vec<i64>);

impl FeatureVector {
    pub fn new(components: Vec<i64>) -> Self {
        FeatureVector(components)
    }

    pub fn components(&self) -> &[i64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl From<Vec<i64>> for FeatureVector {
    fn from(v: Vec<i64>) -> Self {
        FeatureVector(v)
    }
}

impl<const N: usize> From<[i64; N]> for FeatureVector {
    fn from(v: [i64; N]) -> Self {
        FeatureVector(v.to_vec())
    }
}

impl fmt::Display for FeatureVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// Grid label of a point. Ordering is row-major.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PointId {
    pub row: usize,
    pub col: usize,
}

impl PointId {
    pub const fn new(row: usize, col: usize) -> Self {
        PointId { row, col }
    }
}

/// Shorthand for [`PointId::new`].
pub const fn pt(row: usize, col: usize) -> PointId {
    PointId::new(row, col)
}

impl fmt::Display for PointId {
    /// `x23` for single-digit labels, `x12_3` once either label needs two digits.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.row < 10 && self.col < 10 {
            write!(f, "x{}{}", self.row, self.col)
        } else {
            write!(f, "x{}_{}", self.row, self.col)
        }
    }
}

/// A finite grid of points with a total description map.
#[derive(Debug, Clone)]
pub struct DescribedSpace {
    rows: usize,
    cols: usize,
    probe_count: usize,
    index_base: usize,
    vectors: Vec<FeatureVector>,
    class_of: Vec<usize>,
    classes: Vec<FixedBitSet>,
}

impl PartialEq for DescribedSpace {
    fn eq(&self, other: &Self) -> bool {
        self.rows == other.rows
            && self.cols == other.cols
            && self.probe_count == other.probe_count
            && self.index_base == other.index_base
            && self.vectors == other.vectors
    }
}

impl Eq for DescribedSpace {}

impl DescribedSpace {
    /// Builds a space from an unordered list of `(point, vector)` entries that
    /// must cover the `rows × cols` grid exactly once.
    pub fn new(
        rows: usize,
        cols: usize,
        probe_count: usize,
        index_base: usize,
        entries: impl IntoIterator<Item = (PointId, FeatureVector)>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidShape(format!("{rows}x{cols} grid")));
        }
        if probe_count == 0 {
            return Err(Error::InvalidShape("probe count must be positive".into()));
        }
        if index_base > 1 {
            return Err(Error::InvalidShape(format!("index base {index_base}")));
        }
        let mut slots: Vec<Option<FeatureVector>> = vec![None; rows * cols];
        for (p, v) in entries {
            let idx = grid_index(rows, cols, index_base, p).ok_or(Error::PointOutOfRange(p))?;
            if v.len() != probe_count {
                return Err(Error::LengthMismatch {
                    point: p,
                    expected: probe_count,
                    found: v.len(),
                });
            }
            if slots[idx].is_some() {
                return Err(Error::DuplicatePoint(p));
            }
            slots[idx] = Some(v);
        }
        let mut vectors = Vec::with_capacity(slots.len());
        for (idx, slot) in slots.into_iter().enumerate() {
            match slot {
                Some(v) => vectors.push(v),
                None => {
                    let p = PointId::new(idx / cols + index_base, idx % cols + index_base);
                    return Err(Error::MissingPoint(p));
                }
            }
        }
        Ok(Self::from_vectors_unchecked(
            rows,
            cols,
            probe_count,
            index_base,
            vectors,
        ))
    }

    /// Builds a space from vectors listed in row-major order.
    pub fn from_row_major(rows: usize, cols: usize, index_base: usize, vectors: Vec<FeatureVector>) -> Result<Self> {
        let probe_count = vectors.first().map_or(0, FeatureVector::len);
        let entries: Vec<_> = vectors
            .into_iter()
            .enumerate()
            .map(|(idx, v)| {
                let p = PointId::new(idx / cols.max(1) + index_base, idx % cols.max(1) + index_base);
                (p, v)
            })
            .collect();
        Self::new(rows, cols, probe_count, index_base, entries)
    }

    fn from_vectors_unchecked(
        rows: usize,
        cols: usize,
        probe_count: usize,
        index_base: usize,
        vectors: Vec<FeatureVector>,
    ) -> Self {
        let n = vectors.len();
        let mut lookup: HashMap<&FeatureVector, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(n);
        let mut classes: Vec<FixedBitSet> = Vec::new();
        for (idx, v) in vectors.iter().enumerate() {
            let next = classes.len();
            let class = *lookup.entry(v).or_insert(next);
            if class == next {
                classes.push(FixedBitSet::with_capacity(n));
            }
            classes[class].insert(idx);
            class_of.push(class);
        }
        DescribedSpace {
            rows,
            cols,
            probe_count,
            index_base,
            vectors,
            class_of,
            classes,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn probe_count(&self) -> usize {
        self.probe_count
    }

    pub fn index_base(&self) -> usize {
        self.index_base
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    /// Always false: a space has at least one point.
    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Number of distinct descriptions in the space.
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.index_of(p).is_some()
    }

    /// Row-major position of `p`, or `None` when `p` is off the grid.
    pub fn index_of(&self, p: PointId) -> Option<usize> {
        grid_index(self.rows, self.cols, self.index_base, p)
    }

    pub fn point_at(&self, idx: usize) -> PointId {
        debug_assert!(idx < self.len());
        PointId::new(idx / self.cols + self.index_base, idx % self.cols + self.index_base)
    }

    pub(crate) fn checked_index(&self, p: PointId) -> Result<usize> {
        self.index_of(p).ok_or(Error::PointOutOfRange(p))
    }

    /// The feature vector of `p`.
    pub fn describe(&self, p: PointId) -> Result<&FeatureVector> {
        Ok(&self.vectors[self.checked_index(p)?])
    }

    pub(crate) fn vector_at(&self, idx: usize) -> &FeatureVector {
        &self.vectors[idx]
    }

    pub(crate) fn class_at(&self, idx: usize) -> usize {
        self.class_of[idx]
    }

    pub(crate) fn class_members(&self, class: usize) -> &FixedBitSet {
        &self.classes[class]
    }

    /// All points in row-major order.
    pub fn points(&self) -> impl Iterator<Item = PointId> + '_ {
        (0..self.len()).map(|idx| self.point_at(idx))
    }

    /// `(point, vector)` pairs in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (PointId, &FeatureVector)> + '_ {
        self.vectors.iter().enumerate().map(|(idx, v)| (self.point_at(idx), v))
    }

    /// True when no two distinct points share a description.
    pub fn is_injective(&self) -> bool {
        self.classes.len() == self.vectors.len()
    }
}

fn grid_index(rows: usize, cols: usize, base: usize, p: PointId) -> Option<usize> {
    let r = p.row.checked_sub(base)?;
    let c = p.col.checked_sub(base)?;
    (r < rows && c < cols).then_some(r * cols + c)
}

/// A set of points of one space. Iteration is row-major.
#[derive(Clone)]
pub struct Region<'s> {
    space: &'s DescribedSpace,
    bits: FixedBitSet,
}

impl<'s> Region<'s> {
    pub fn empty(space: &'s DescribedSpace) -> Self {
        Region {
            space,
            bits: FixedBitSet::with_capacity(space.len()),
        }
    }

    pub fn full(space: &'s DescribedSpace) -> Self {
        let mut bits = FixedBitSet::with_capacity(space.len());
        bits.insert_range(..);
        Region { space, bits }
    }

    /// Collects points into a region; duplicates collapse.
    pub fn new(space: &'s DescribedSpace, points: impl IntoIterator<Item = PointId>) -> Result<Self> {
        let mut r = Region::empty(space);
        for p in points {
            r.bits.insert(space.checked_index(p)?);
        }
        Ok(r)
    }

    pub(crate) fn from_bits(space: &'s DescribedSpace, bits: FixedBitSet) -> Self {
        debug_assert_eq!(bits.len(), space.len());
        Region { space, bits }
    }

    /// Region whose members are the set bits of `mask` (row-major positions).
    /// Positions at or past the space size are ignored.
    pub fn from_mask(space: &'s DescribedSpace, mask: u64) -> Self {
        let mut r = Region::empty(space);
        for idx in 0..space.len().min(64) {
            if mask >> idx & 1 == 1 {
                r.bits.insert(idx);
            }
        }
        r
    }

    /// Bitmask of member positions. Only meaningful for spaces of at most 64 points.
    pub fn to_mask(&self) -> u64 {
        self.bits.ones().filter(|&i| i < 64).fold(0, |m, i| m | 1 << i)
    }

    pub fn space(&self) -> &'s DescribedSpace {
        self.space
    }

    pub(crate) fn bits(&self) -> &FixedBitSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_clear()
    }

    pub fn contains(&self, p: PointId) -> bool {
        self.space.index_of(p).is_some_and(|i| self.bits.contains(i))
    }

    pub fn insert(&mut self, p: PointId) -> Result<bool> {
        let idx = self.space.checked_index(p)?;
        Ok(!self.bits.put(idx))
    }

    pub fn iter(&self) -> impl Iterator<Item = PointId> + '_ {
        self.bits.ones().map(|i| self.space.point_at(i))
    }

    pub(crate) fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.bits.ones()
    }

    pub fn to_vec(&self) -> Vec<PointId> {
        self.iter().collect()
    }

    pub fn same_space(&self, other: &Region<'_>) -> bool {
        std::ptr::eq(self.space, other.space) || self.space == other.space
    }

    fn check_space(&self, other: &Region<'_>) -> Result<()> {
        if self.same_space(other) {
            Ok(())
        } else {
            Err(Error::SpaceMismatch)
        }
    }

    pub fn union(&self, other: &Region<'_>) -> Result<Region<'s>> {
        self.check_space(other)?;
        let mut bits = self.bits.clone();
        bits.union_with(&other.bits);
        Ok(Region::from_bits(self.space, bits))
    }

    pub fn intersection(&self, other: &Region<'_>) -> Result<Region<'s>> {
        self.check_space(other)?;
        let mut bits = self.bits.clone();
        bits.intersect_with(&other.bits);
        Ok(Region::from_bits(self.space, bits))
    }

    pub fn difference(&self, other: &Region<'_>) -> Result<Region<'s>> {
        self.check_space(other)?;
        let mut bits = self.bits.clone();
        bits.difference_with(&other.bits);
        Ok(Region::from_bits(self.space, bits))
    }

    pub fn complement(&self) -> Region<'s> {
        let mut bits = self.bits.clone();
        bits.toggle_range(..);
        Region::from_bits(self.space, bits)
    }

    pub fn is_subset(&self, other: &Region<'_>) -> Result<bool> {
        self.check_space(other)?;
        Ok(self.bits.is_subset(&other.bits))
    }
}

impl PartialEq for Region<'_> {
    fn eq(&self, other: &Self) -> bool {
        self.same_space(other) && self.bits == other.bits
    }
}

impl Eq for Region<'_> {}

impl fmt::Debug for Region<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

impl fmt::Display for Region<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{p}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn table_spaces_have_expected_shape() {
        let t1 = fixtures::table1();
        assert_eq!((t1.rows(), t1.cols(), t1.probe_count(), t1.index_base()), (5, 5, 3, 1));
        let t2 = fixtures::table2();
        assert_eq!((t2.rows(), t2.cols(), t2.probe_count(), t2.index_base()), (6, 6, 3, 0));
    }

    #[test]
    fn describe_reads_table_rows() {
        let t1 = fixtures::table1();
        assert_eq!(t1.describe(pt(2, 1)).unwrap(), &FeatureVector::from([0, 102, 153]));
        let t2 = fixtures::table2();
        assert_eq!(t2.describe(pt(0, 0)).unwrap(), &FeatureVector::from([174, 117, 255]));
        let one = DescribedSpace::from_row_major(1, 1, 0, vec![FeatureVector::from([7])]).unwrap();
        assert_eq!(one.describe(pt(0, 0)).unwrap(), &FeatureVector::from([7]));
    }

    #[test]
    fn describe_rejects_off_grid_points() {
        let t1 = fixtures::table1();
        assert_eq!(t1.describe(pt(0, 1)), Err(Error::PointOutOfRange(pt(0, 1))));
        assert_eq!(t1.describe(pt(6, 1)), Err(Error::PointOutOfRange(pt(6, 1))));
        let t2 = fixtures::table2();
        assert!(t2.describe(pt(5, 5)).is_ok());
        assert!(t2.describe(pt(6, 0)).is_err());
    }

    #[test]
    fn construction_errors() {
        let v = |x: i64| FeatureVector::from([x]);
        assert_eq!(
            DescribedSpace::new(1, 2, 1, 0, [(pt(0, 0), v(1))]),
            Err(Error::MissingPoint(pt(0, 1)))
        );
        assert_eq!(
            DescribedSpace::new(1, 1, 1, 0, [(pt(0, 0), v(1)), (pt(0, 0), v(2))]),
            Err(Error::DuplicatePoint(pt(0, 0)))
        );
        assert_eq!(
            DescribedSpace::new(1, 1, 1, 0, [(pt(0, 0), FeatureVector::from([1, 2]))]),
            Err(Error::LengthMismatch {
                point: pt(0, 0),
                expected: 1,
                found: 2
            })
        );
        assert_eq!(
            DescribedSpace::new(1, 1, 1, 1, [(pt(0, 0), v(1))]),
            Err(Error::PointOutOfRange(pt(0, 0)))
        );
        assert!(matches!(
            DescribedSpace::new(0, 1, 1, 0, []),
            Err(Error::InvalidShape(_))
        ));
    }

    #[test]
    fn classes_group_equal_vectors() {
        let t2 = fixtures::table2();
        let c = t2.class_at(t2.index_of(pt(2, 3)).unwrap());
        let members: Vec<_> = t2.class_members(c).ones().map(|i| t2.point_at(i)).collect();
        assert_eq!(members, vec![pt(0, 0), pt(2, 3), pt(4, 1)]);
        assert!(!t2.is_injective());
    }

    #[test]
    fn region_iterates_row_major_and_dedups() {
        let t1 = fixtures::table1();
        let r = Region::new(&t1, [pt(3, 3), pt(2, 1), pt(3, 3), pt(2, 2)]).unwrap();
        assert_eq!(r.to_vec(), vec![pt(2, 1), pt(2, 2), pt(3, 3)]);
        assert_eq!(r.len(), 3);
        assert_eq!(r.to_string(), "{x21, x22, x33}");
    }

    #[test]
    fn regions_from_different_spaces_do_not_mix() {
        let t1 = fixtures::table1();
        let t2 = fixtures::table2();
        let a = Region::full(&t1);
        let b = Region::full(&t2);
        assert_eq!(a.union(&b).unwrap_err(), Error::SpaceMismatch);
    }

    #[test]
    fn point_labels() {
        assert_eq!(pt(2, 3).to_string(), "x23");
        assert_eq!(pt(12, 3).to_string(), "x12_3");
    }

    #[test]
    fn feature_vector_equality_is_exhaustively_an_equivalence() {
        let alphabet: Vec<FeatureVector> = (0..3)
            .flat_map(|a| (0..3).map(move |b| FeatureVector::from([a, b])))
            .collect();
        for x in &alphabet {
            assert_eq!(x, x);
            for y in &alphabet {
                assert_eq!(x == y, y == x);
                assert_eq!(x == y, x.components() == y.components());
                for z in &alphabet {
                    if x == y && y == z {
                        assert_eq!(x, z);
                    }
                }
            }
        }
    }
}
