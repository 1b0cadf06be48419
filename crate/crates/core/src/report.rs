//! Verification reports shared by all verifiers, with a fixed JSON schema.

use num::{BigUint, ToPrimitive};
use serde::ser::Serializer;
use serde::Serialize;

/// Version of the JSON report layout.
pub const REPORT_SCHEMA: u32 = 1;

/// A located violation. Serialized without a tag: each variant's fields form
/// the JSON object.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(untagged)]
pub enum Violation {
    /// Forbidden factor `factor` (index into the forbidden list) at `position`.
    Factor { position: usize, factor: usize },
    /// `word[start..start+half] == word[start+half..start+2*half]`.
    Square { start: usize, half: usize },
    /// Equal factors of length `n` at `i < j` with `j - i < c^n`.
    Separation { i: usize, j: usize, n: usize },
    /// Blocks at `i` and `i+n` differ in only `distance` places.
    Blocks { i: usize, n: usize, distance: usize },
    /// The final interval meets the stripe around `center_num/center_den`.
    Regularity {
        #[serde(serialize_with = "big_as_number")]
        t: BigUint,
        #[serde(serialize_with = "big_as_number")]
        center_num: BigUint,
        #[serde(serialize_with = "big_as_number")]
        center_den: BigUint,
    },
    /// Symbol at `position` is not in that position's list.
    List { position: usize, symbol: u64 },
}

fn big_as_number<S: Serializer>(n: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    match n.to_u64() {
        Some(v) => s.serialize_u64(v),
        None => s.serialize_str(&n.to_string()),
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerificationReport {
    pub violations: Vec<Violation>,
}

#[derive(Serialize)]
struct ReportJson<'a> {
    schema: u32,
    ok: bool,
    violations: &'a [Violation],
}

impl VerificationReport {
    pub fn pass() -> Self {
        Self::default()
    }

    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn push(&mut self, v: Violation) {
        self.violations.push(v);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ReportJson { schema: REPORT_SCHEMA, ok: self.ok(), violations: &self.violations })
            .expect("report serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_shape() {
        let mut r = VerificationReport::pass();
        assert_eq!(r.to_json(), r#"{"schema":1,"ok":true,"violations":[]}"#);
        r.push(Violation::Regularity {
            t: BigUint::from(3u32),
            center_num: BigUint::from(1u32),
            center_den: BigUint::from(3u32),
        });
        r.push(Violation::Square { start: 0, half: 4 });
        assert_eq!(
            r.to_json(),
            r#"{"schema":1,"ok":false,"violations":[{"t":3,"center_num":1,"center_den":3},{"start":0,"half":4}]}"#
        );
    }
}
