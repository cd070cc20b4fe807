//! Descriptive approximations of regions.
//!
//! Everything here reduces to description classes: a point is descriptively
//! near a region when its vector appears among the region's vectors. The upper
//! approximation collects every such point, the lower approximation keeps the
//! members whose whole class lies inside the region.

use std::collections::BTreeSet;
use std::fmt;

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};
use crate::space::{DescribedSpace, FeatureVector, PointId, Region};

/// The set of distinct descriptions carried by a region, `Q(A)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DescriptionSet {
    vectors: BTreeSet<FeatureVector>,
}

impl DescriptionSet {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn contains(&self, v: &FeatureVector) -> bool {
        self.vectors.contains(v)
    }

    /// Vectors in ascending lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = &FeatureVector> {
        self.vectors.iter()
    }

    pub fn intersection(&self, other: &DescriptionSet) -> DescriptionSet {
        self.vectors.intersection(&other.vectors).cloned().collect()
    }

    pub fn union(&self, other: &DescriptionSet) -> DescriptionSet {
        self.vectors.union(&other.vectors).cloned().collect()
    }

    pub fn is_subset(&self, other: &DescriptionSet) -> bool {
        self.vectors.is_subset(&other.vectors)
    }

    pub fn is_disjoint(&self, other: &DescriptionSet) -> bool {
        self.vectors.is_disjoint(&other.vectors)
    }
}

impl FromIterator<FeatureVector> for DescriptionSet {
    fn from_iter<I: IntoIterator<Item = FeatureVector>>(iter: I) -> Self {
        DescriptionSet {
            vectors: iter.into_iter().collect(),
        }
    }
}

impl fmt::Display for DescriptionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, v) in self.vectors.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("}")
    }
}

/// Lower and upper approximation of one region.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationResult<'s> {
    pub lower: Region<'s>,
    pub upper: Region<'s>,
}

impl<'s> ApproximationResult<'s> {
    pub fn boundary(&self) -> Region<'s> {
        self.upper
            .difference(&self.lower)
            .expect("lower and upper share a space")
    }
}

/// Class ids hit by the region.
fn class_set(region: &Region<'_>) -> FixedBitSet {
    let space = region.space();
    let mut classes = FixedBitSet::with_capacity(space.class_count());
    for idx in region.indices() {
        classes.insert(space.class_at(idx));
    }
    classes
}

/// `Q(A)`: the deduplicated descriptions of the region's members.
pub fn set_description(region: &Region<'_>) -> DescriptionSet {
    let space = region.space();
    region.indices().map(|i| space.vector_at(i).clone()).collect()
}

/// `cl(a)`: every point sharing `a`'s description, `a` included.
pub fn descriptive_closure(space: &DescribedSpace, point: PointId) -> Result<Region<'_>> {
    let idx = space.checked_index(point)?;
    let class = space.class_at(idx);
    Ok(Region::from_bits(space, space.class_members(class).clone()))
}

/// `x δ A`: true iff `x`'s description appears in `Q(A)`.
pub fn descriptively_near(point: PointId, region: &Region<'_>) -> Result<bool> {
    let space = region.space();
    let class = space.class_at(space.checked_index(point)?);
    Ok(region.indices().any(|i| space.class_at(i) == class))
}

/// Members of `A ∪ B` whose description lies in both `Q(A)` and `Q(B)`.
///
/// This ranges over the union, so points of `A \ B` described like some point
/// of `B` are included.
pub fn descriptive_intersection<'s>(a: &Region<'s>, b: &Region<'_>) -> Result<Region<'s>> {
    let union = a.union(b)?;
    let mut shared = class_set(a);
    shared.intersect_with(&class_set(b));
    let space = a.space();
    let mut bits = FixedBitSet::with_capacity(space.len());
    for idx in union.indices() {
        if shared.contains(space.class_at(idx)) {
            bits.insert(idx);
        }
    }
    Ok(Region::from_bits(space, bits))
}

/// `B ∈ ξ(A)`, i.e. `Q(A) ∩ Q(B) ≠ ∅`.
pub fn nearness_collection_contains(a: &Region<'_>, b: &Region<'_>) -> Result<bool> {
    if !a.same_space(b) {
        return Err(Error::SpaceMismatch);
    }
    let mut shared = class_set(a);
    shared.intersect_with(&class_set(b));
    Ok(!shared.is_clear())
}

/// Every point whose description is in `Q(A)`.
pub fn upper_approximation<'s>(region: &Region<'s>) -> Region<'s> {
    let space = region.space();
    let mut bits = FixedBitSet::with_capacity(space.len());
    for class in class_set(region).ones() {
        bits.union_with(space.class_members(class));
    }
    Region::from_bits(space, bits)
}

/// Members whose whole description class stays inside the region.
pub fn lower_approximation<'s>(region: &Region<'s>) -> Region<'s> {
    let space = region.space();
    let mut bits = FixedBitSet::with_capacity(space.len());
    for class in class_set(region).ones() {
        let members = space.class_members(class);
        if members.is_subset(region.bits()) {
            bits.union_with(members);
        }
    }
    Region::from_bits(space, bits)
}

pub fn boundary_region<'s>(region: &Region<'s>) -> Region<'s> {
    approximate(region).boundary()
}

pub fn approximate<'s>(region: &Region<'s>) -> ApproximationResult<'s> {
    ApproximationResult {
        lower: lower_approximation(region),
        upper: upper_approximation(region),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::{self, EXAMPLE1_REGION, EXAMPLE2_REGION};
    use crate::space::pt;

    // Brute-force oracles working straight from the vectors, bypassing the
    // class index.
    fn oracle_upper(region: &Region<'_>) -> Vec<PointId> {
        let space = region.space();
        let q: Vec<&FeatureVector> = region.iter().map(|p| space.describe(p).unwrap()).collect();
        space
            .points()
            .filter(|&x| q.contains(&space.describe(x).unwrap()))
            .collect()
    }

    fn oracle_lower(region: &Region<'_>) -> Vec<PointId> {
        let space = region.space();
        region
            .iter()
            .filter(|&a| {
                let d = space.describe(a).unwrap();
                space
                    .points()
                    .filter(|&x| space.describe(x).unwrap() == d)
                    .all(|x| region.contains(x))
            })
            .collect()
    }

    fn v(c: [i64; 3]) -> FeatureVector {
        FeatureVector::from(c)
    }

    #[test]
    fn set_description_of_example_regions() {
        let t1 = fixtures::table1();
        let a = Region::new(&t1, EXAMPLE1_REGION).unwrap();
        let expected: DescriptionSet = [v([0, 102, 153]), v([102, 255, 255]), v([0, 51, 255]), v([0, 102, 102])]
            .into_iter()
            .collect();
        assert_eq!(set_description(&a), expected);

        let t2 = fixtures::table2();
        let b = Region::new(&t2, EXAMPLE2_REGION).unwrap();
        let expected: DescriptionSet = [v([174, 117, 255]), v([145, 145, 230])].into_iter().collect();
        assert_eq!(set_description(&b), expected);

        assert!(set_description(&Region::empty(&t2)).is_empty());
    }

    #[test]
    fn closures_in_table2() {
        let t2 = fixtures::table2();
        let c = descriptive_closure(&t2, pt(2, 3)).unwrap();
        assert_eq!(c.to_vec(), vec![pt(0, 0), pt(2, 3), pt(4, 1)]);
        let c = descriptive_closure(&t2, pt(3, 2)).unwrap();
        assert_eq!(c.to_vec(), vec![pt(1, 4), pt(3, 2)]);
        assert_eq!(
            descriptive_closure(&t2, pt(9, 9)).unwrap_err(),
            Error::PointOutOfRange(pt(9, 9))
        );

        let one = DescribedSpace::from_row_major(1, 1, 0, vec![FeatureVector::from([0])]).unwrap();
        assert_eq!(descriptive_closure(&one, pt(0, 0)).unwrap().to_vec(), vec![pt(0, 0)]);
    }

    #[test]
    fn nearness_of_points() {
        let t1 = fixtures::table1();
        let a = Region::new(&t1, EXAMPLE1_REGION).unwrap();
        assert!(descriptively_near(pt(5, 5), &a).unwrap());
        assert!(!descriptively_near(pt(1, 1), &a).unwrap());
        for p in a.iter() {
            assert!(descriptively_near(p, &a).unwrap());
        }
    }

    #[test]
    fn descriptive_intersection_cases() {
        let t1 = fixtures::table1();
        let a = Region::new(&t1, [pt(2, 1), pt(2, 2)]).unwrap();
        let b = Region::new(&t1, [pt(2, 3)]).unwrap();
        assert_eq!(
            descriptive_intersection(&a, &b).unwrap().to_vec(),
            vec![pt(2, 1), pt(2, 3)]
        );

        let a = Region::new(&t1, [pt(1, 1)]).unwrap();
        let b = Region::new(&t1, [pt(1, 2)]).unwrap();
        assert!(descriptive_intersection(&a, &b).unwrap().is_empty());

        let a = Region::new(&t1, EXAMPLE1_REGION).unwrap();
        assert_eq!(descriptive_intersection(&a, &a).unwrap(), a);
    }

    #[test]
    fn nearness_collections() {
        let t1 = fixtures::table1();
        let r = |ps: &[PointId]| Region::new(&t1, ps.iter().copied()).unwrap();
        assert!(nearness_collection_contains(&r(&[pt(1, 1)]), &r(&[pt(1, 4)])).unwrap());
        assert!(!nearness_collection_contains(&r(&[pt(1, 1)]), &r(&[pt(2, 1)])).unwrap());
        let a = r(&EXAMPLE1_REGION);
        assert!(nearness_collection_contains(&a, &a).unwrap());
        let t2 = fixtures::table2();
        let other = Region::full(&t2);
        assert_eq!(nearness_collection_contains(&a, &other), Err(Error::SpaceMismatch));
    }

    #[test]
    fn upper_approximation_of_examples() {
        let t1 = fixtures::table1();
        let a = Region::new(&t1, EXAMPLE1_REGION).unwrap();
        let expected = [
            pt(2, 1),
            pt(2, 2),
            pt(2, 3),
            pt(2, 4),
            pt(3, 2),
            pt(3, 3),
            pt(5, 4),
            pt(5, 5),
        ];
        assert_eq!(upper_approximation(&a).to_vec(), expected);
        assert_eq!(oracle_upper(&a), expected);

        let t2 = fixtures::table2();
        let b = Region::new(&t2, EXAMPLE2_REGION).unwrap();
        let expected = vec![pt(0, 0), pt(1, 4), pt(2, 3), pt(3, 2), pt(4, 1)];
        assert_eq!(upper_approximation(&b).to_vec(), expected);

        let full = Region::full(&t2);
        assert_eq!(upper_approximation(&full), full);
    }

    #[test]
    fn lower_approximation_and_boundary() {
        let t1 = fixtures::table1();
        let a = Region::new(&t1, EXAMPLE1_REGION).unwrap();
        assert!(oracle_lower(&a).is_empty());
        assert!(lower_approximation(&a).is_empty());
        assert_eq!(boundary_region(&a), upper_approximation(&a));
        assert_eq!(boundary_region(&a).len(), 8);

        let full = Region::full(&t1);
        assert_eq!(lower_approximation(&full), full);
        assert!(boundary_region(&full).is_empty());

        let t2 = fixtures::table2();
        let b = Region::new(&t2, [pt(0, 0), pt(2, 3), pt(4, 1)]).unwrap();
        assert_eq!(lower_approximation(&b), b);
        assert!(boundary_region(&b).is_empty());
    }

    #[test]
    fn empty_region_conventions() {
        let t1 = fixtures::table1();
        let e = Region::empty(&t1);
        assert!(upper_approximation(&e).is_empty());
        assert!(lower_approximation(&e).is_empty());
        assert!(!descriptively_near(pt(1, 1), &e).unwrap());
    }

    #[test]
    fn class_index_agrees_with_brute_force_on_table_regions() {
        let t2 = fixtures::table2();
        let n = t2.len();
        for k in 0..200u64 {
            // deterministic spread of sparse regions
            let mask = k.wrapping_mul(0x9E37_79B9_7F4A_7C15) & ((1u64 << n) - 1);
            let r = Region::from_mask(&t2, mask & mask.rotate_left(7));
            assert_eq!(upper_approximation(&r).to_vec(), oracle_upper(&r));
            assert_eq!(lower_approximation(&r).to_vec(), oracle_lower(&r));
        }
    }
}
