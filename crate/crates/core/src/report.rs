//! Report documents: an ordered list of `key=value` fields rendered either as
//! a flat key-value file or as human-readable text. Field order is fixed by
//! construction, so identical inputs serialize to identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::algebra::{BinaryOp, StructureReport};
use crate::approx::{approximate, set_description};
use crate::audit::AuditReport;
use crate::format::write_space;
use crate::space::{DescribedSpace, PointId, Region};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ReportDocument {
    fields: Vec<(String, String)>,
}

impl ReportDocument {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.fields.push((key.into(), value.to_string()));
    }

    pub fn extend(&mut self, other: ReportDocument) {
        self.fields.extend(other.fields);
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.fields {
            writeln!(out, "{k}={v}").unwrap();
        }
        out
    }

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    pub fn parse_kv(text: &str) -> Result<Self, String> {
        let mut doc = ReportDocument::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected key=value", i + 1))?;
            doc.push(k, v);
        }
        Ok(doc)
    }

    /// Field-level differences, `expected` vs `self`, in `expected`'s order
    /// followed by keys only present here.
    pub fn diff(&self, expected: &ReportDocument) -> Vec<FieldDiff> {
        let actual: BTreeMap<&str, &str> = self.fields.iter().map(|(k, v)| (k.as_str(), v.as_str())).collect();
        let mut seen = std::collections::HashSet::new();
        let mut out = Vec::new();
        for (k, v) in &expected.fields {
            seen.insert(k.as_str());
            match actual.get(k.as_str()) {
                Some(a) if a == v => {}
                a => out.push(FieldDiff {
                    key: k.clone(),
                    expected: Some(v.clone()),
                    actual: a.map(|s| s.to_string()),
                }),
            }
        }
        for (k, v) in &self.fields {
            if !seen.contains(k.as_str()) {
                out.push(FieldDiff {
                    key: k.clone(),
                    expected: None,
                    actual: Some(v.clone()),
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDiff {
    pub key: String,
    pub expected: Option<String>,
    pub actual: Option<String>,
}

impl std::fmt::Display for FieldDiff {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let show = |v: &Option<String>| v.clone().unwrap_or_else(|| "<missing>".into());
        write!(
            f,
            "{}: expected {}, got {}",
            self.key,
            show(&self.expected),
            show(&self.actual)
        )
    }
}

pub fn points_value(points: impl IntoIterator<Item = PointId>) -> String {
    points.into_iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

/// SHA-256 of the canonical space file.
pub fn space_digest(space: &DescribedSpace) -> String {
    hex::encode(Sha256::digest(write_space(space).as_bytes()))
}

pub fn space_fields(space: &DescribedSpace) -> ReportDocument {
    let mut d = ReportDocument::new();
    d.push("space.rows", space.rows());
    d.push("space.cols", space.cols());
    d.push("space.probes", space.probe_count());
    d.push("space.index_base", space.index_base());
    d.push("space.digest", space_digest(space));
    d
}

/// One field per point holding its vector; lets a diff name the exact pixel.
pub fn point_fields(space: &DescribedSpace) -> ReportDocument {
    let mut d = ReportDocument::new();
    for (p, v) in space.entries() {
        let comps: Vec<_> = v.components().iter().map(ToString::to_string).collect();
        d.push(format!("space.point.{p}"), comps.join(" "));
    }
    d
}

pub fn approx_fields(region: &Region<'_>) -> ReportDocument {
    let mut d = ReportDocument::new();
    let res = approximate(region);
    let boundary = res.boundary();
    d.push("region", points_value(region.iter()));
    d.push(
        "description",
        set_description(region)
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" "),
    );
    d.push("lower.count", res.lower.len());
    d.push("lower", points_value(res.lower.iter()));
    d.push("upper.count", res.upper.len());
    d.push("upper", points_value(res.upper.iter()));
    d.push("boundary.count", boundary.len());
    d.push("boundary", points_value(boundary.iter()));
    d
}

pub fn structure_fields(op: &BinaryOp, rep: &StructureReport) -> ReportDocument {
    let mut d = ReportDocument::new();
    d.push("op", op);
    d.push("level", rep.level);
    d.push("closed", rep.closed);
    d.push("associative", rep.associative);
    d.push("commutative", rep.commutative);
    d.push("identities", points_value(rep.identities.iter().copied()));
    d.push("identities.multiple", rep.multiple_identities());
    d.push("identity", rep.identity.map(|p| p.to_string()).unwrap_or_default());
    d.push(
        "inverses",
        rep.inverse_map
            .iter()
            .map(|(x, y)| format!("{x}:{y}"))
            .collect::<Vec<_>>()
            .join(" "),
    );
    d.push(
        "inverses.total",
        rep.inverse_map.len() == rep.inverse_candidates.len() && !rep.inverse_map.is_empty(),
    );
    for (x, ys) in &rep.inverse_candidates {
        if ys.len() > 1 {
            d.push(format!("inverse_candidates.{x}"), points_value(ys.iter().copied()));
        }
    }
    d.push("witnesses.count", rep.witnesses.len());
    for (i, w) in rep.witnesses.iter().enumerate() {
        d.push(format!("witness.{i}"), w);
    }
    d.push("summary", rep.summary());
    d
}

pub fn audit_fields(rep: &AuditReport) -> ReportDocument {
    let mut d = ReportDocument::new();
    d.push("audit.rng", rep.rng);
    d.push("audit.seed", rep.seed.map(|s| s.to_string()).unwrap_or_default());
    d.push("audit.instances", rep.instance_count);
    for c in &rep.checks {
        let key = format!("audit.{}", c.claim.id());
        d.push(format!("{key}.verdict"), c.verdict);
        d.push(format!("{key}.instance"), &c.instance);
        d.push(format!("{key}.tested"), c.tested);
        d.push(format!("{key}.skipped"), c.skipped);
        if let Some(cx) = &c.counterexample {
            d.push(format!("{key}.counterexample"), cx);
        }
    }
    for (i, n) in rep.notices.iter().enumerate() {
        d.push(format!("audit.notice.{i}"), n);
    }
    d.push("audit.all_hold", rep.all_hold());
    d
}

pub fn render_approx_text(space: &DescribedSpace, region: &Region<'_>) -> String {
    let res = approximate(region);
    let boundary = res.boundary();
    let mut s = String::new();
    writeln!(
        s,
        "space: {}x{} grid, {} probes, {}-based, digest {}",
        space.rows(),
        space.cols(),
        space.probe_count(),
        space.index_base(),
        &space_digest(space)[..16]
    )
    .unwrap();
    writeln!(s, "region:      {region} ({} points)", region.len()).unwrap();
    writeln!(s, "description: {}", set_description(region)).unwrap();
    writeln!(s, "lower:       {} ({} points)", res.lower, res.lower.len()).unwrap();
    writeln!(s, "upper:       {} ({} points)", res.upper, res.upper.len()).unwrap();
    writeln!(s, "boundary:    {boundary} ({} points)", boundary.len()).unwrap();
    s
}

pub fn render_structure_text(op: &BinaryOp, region: &Region<'_>, rep: &StructureReport) -> String {
    let mut s = String::new();
    writeln!(s, "region {region} under {op}: {}", rep.summary()).unwrap();
    let mark = |b: bool| if b { "pass" } else { "FAIL" };
    writeln!(s, "  AG1 closure in upper approximation: {}", mark(rep.closed)).unwrap();
    writeln!(s, "  AG2 associativity: {}", mark(rep.associative)).unwrap();
    writeln!(
        s,
        "  AG3 identities: {}",
        if rep.identities.is_empty() {
            "none".to_string()
        } else {
            points_value(rep.identities.iter().copied())
        }
    )
    .unwrap();
    if rep.multiple_identities() {
        writeln!(s, "      note: {} distinct identities found", rep.identities.len()).unwrap();
    }
    if let Some(e) = rep.identity {
        let inv: Vec<_> = rep.inverse_map.iter().map(|(x, y)| format!("{x}->{y}")).collect();
        writeln!(
            s,
            "  AG4 inverses w.r.t. {e}: {} ({} of {} members)",
            if inv.is_empty() { "none".into() } else { inv.join(" ") },
            rep.inverse_map.len(),
            region.len()
        )
        .unwrap();
    }
    writeln!(s, "  commutative: {}", rep.commutative).unwrap();
    for w in &rep.witnesses {
        writeln!(s, "  witness {w}").unwrap();
    }
    s
}

pub fn render_audit_text(rep: &AuditReport) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "audit: rng {} seed {}, {} instances",
        rep.rng,
        rep.seed.map(|x| x.to_string()).unwrap_or_else(|| "-".into()),
        rep.instance_count
    )
    .unwrap();
    for n in &rep.notices {
        writeln!(s, "notice: {n}").unwrap();
    }
    for c in &rep.checks {
        writeln!(
            s,
            "[{}] {:<36} {}  ({}; tested {}, skipped {})",
            c.verdict,
            c.claim.id(),
            c.claim.statement(),
            c.instance,
            c.tested,
            c.skipped
        )
        .unwrap();
        if let Some(cx) = &c.counterexample {
            writeln!(s, "       counterexample: {cx}").unwrap();
        }
    }
    writeln!(
        s,
        "{}",
        if rep.all_hold() {
            "all claims hold"
        } else {
            "some claims fail"
        }
    )
    .unwrap();
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn kv_round_trip_and_diff() {
        let mut d = ReportDocument::new();
        d.push("a", 1);
        d.push("b", "x y");
        let parsed = ReportDocument::parse_kv(&d.to_kv()).unwrap();
        assert_eq!(parsed, d);

        let mut e = d.clone();
        e.fields[1].1 = "x z".into();
        e.push("c", 3);
        let diff = e.diff(&d);
        assert_eq!(diff.len(), 2);
        assert_eq!(diff[0].key, "b");
        assert_eq!(diff[1].expected, None);
    }

    #[test]
    fn digest_tracks_content() {
        let t1 = fixtures::table1();
        assert_eq!(space_digest(&t1), space_digest(&fixtures::table1()));
        assert_ne!(space_digest(&t1), space_digest(&fixtures::table2()));
    }

    #[test]
    fn approx_fields_for_example2() {
        let t2 = fixtures::table2();
        let b = Region::new(&t2, fixtures::EXAMPLE2_REGION).unwrap();
        let d = approx_fields(&b);
        assert_eq!(d.get("upper"), Some("x00 x14 x23 x32 x41"));
        assert_eq!(d.get("description"), Some("(145,145,230) (174,117,255)"));
        assert_eq!(d.get("lower"), Some(""));
    }
}
