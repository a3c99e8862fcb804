//! Static tables: class-number-one discriminants, the expected classification
//! and the bundled unit data.

use serde::{Deserialize, Serialize};

/// Fundamental discriminants `5 ≤ D ≤ 200` of real quadratic fields with
/// class number one.
pub const CLASS_NUMBER_ONE: [i64; 46] = [
    5, 8, 12, 13, 17, 21, 24, 28, 29, 33, 37, 41, 44, 53, 56, 57, 61, 69, 73, 76, 77, 88, 89, 92,
    93, 97, 101, 109, 113, 124, 129, 133, 137, 141, 149, 152, 157, 161, 172, 173, 177, 181, 184,
    188, 193, 197,
];

pub fn class_number_one_discriminants() -> impl Iterator<Item = i128> {
    CLASS_NUMBER_ONE.iter().map(|&d| d as i128)
}

pub fn has_class_number_one(d: i128) -> bool {
    CLASS_NUMBER_ONE.iter().any(|&x| x as i128 == d)
}

/// One row of the expected classification: base discriminant, absolute
/// discriminant of the quartic field and its database label.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(rename = "D_F")]
    pub d: i64,
    pub abs_disc: i64,
    pub label: String,
}

const TABLE1_JSON: &str = include_str!("../data/table1.json");

pub fn table1() -> Vec<TableRow> {
    serde_json::from_str(TABLE1_JSON).expect("bundled table1.json parses")
}

/// Expected absolute discriminants for `d`, ascending.
pub fn expected_discs(d: i64) -> Vec<i64> {
    let mut v: Vec<i64> = table1()
        .into_iter()
        .filter(|r| r.d == d)
        .map(|r| r.abs_disc)
        .collect();
    v.sort();
    v
}

const UNITS_JSON: &str = include_str!("../data/units.json");

/// Bundled unit generators, one record per order.
pub fn bundled_units() -> Vec<crate::indecomp::UnitRecord> {
    crate::indecomp::parse_unit_file(UNITS_JSON)
        .expect("bundled units.json parses")
        .fields
}

/// Label of the totally real quartic field with this discriminant among the
/// expected fields.
pub fn label_match(abs_disc: i128) -> Option<String> {
    table1()
        .into_iter()
        .find(|r| r.abs_disc as i128 == abs_disc)
        .map(|r| r.label)
}
