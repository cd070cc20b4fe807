//! Bundled fixture data: the two reference images and the pinned reports for
//! their worked examples.

use crate::format::parse_space;
use crate::space::{pt, DescribedSpace, PointId};

pub const TABLE1_SPACE: &str = include_str!("../fixtures/table1.space");
pub const TABLE2_SPACE: &str = include_str!("../fixtures/table2.space");
pub const EXPECTED_EXAMPLE1: &str = include_str!("../fixtures/expected-example1.kv");
pub const EXPECTED_EXAMPLE2: &str = include_str!("../fixtures/expected-example2.kv");

/// Region A of the 5×5 image (1-based labels).
pub const EXAMPLE1_REGION: [PointId; 4] = [pt(2, 1), pt(2, 2), pt(3, 2), pt(3, 3)];
/// Region B of the 6×6 image (0-based labels).
pub const EXAMPLE2_REGION: [PointId; 2] = [pt(2, 3), pt(3, 2)];

pub fn table1() -> DescribedSpace {
    parse_space(TABLE1_SPACE).expect("bundled table1.space parses")
}

pub fn table2() -> DescribedSpace {
    parse_space(TABLE2_SPACE).expect("bundled table2.space parses")
}
