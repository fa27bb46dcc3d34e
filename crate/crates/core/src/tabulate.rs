//! Sweeps over all nef classes of bounded anticanonical degree, and the audit
//! comparing the structured search against brute force.
//!
//! CSV columns, in order:
//!
//! | column | content |
//! |---|---|
//! | `surface` | `n` |
//! | `class` | `L` in `n:a;b1,...,bn` form |
//! | `genus` | sectional genus |
//! | `k0` | least `k` with a certificate |
//! | `case` | `constant`, `case_I`, `case_II` or `case_III` |
//! | `gon_special` | gonality of the special subfamily, empty if constant |
//! | `gon_general` | gonality of the general member |
//! | `cliff_defined` | `true` when genus >= 4 |
//! | `cliff_special` | empty unless case III |
//! | `cliff_general` | empty when undefined |
//! | `exceptional` | `true` or `false` |
//! | `cliff_dim` | empty when undefined |
//! | `pencil_clauses` | distinct clause labels, general then special, `;`-separated |

use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cones::{dominant_representative, enumerate_classes, enumerate_dominant_nef};
use crate::error::{Error, Result};
use crate::gonality::{
    analyze, case_three_numeric, dagger_value_bruteforce, dagger_value_structured_with, is_birationally_kva,
    k_max_closed_form, AnalysisReport, CaseTag, DaggerOptions, DaggerSearch,
};
use crate::lattice::{DivisorClass, SurfaceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::InvalidArgument(format!("unknown format {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SweepSpec {
    pub surface: SurfaceId,
    pub max_kdeg: i64,
    pub require_genus_min: i64,
    pub output_path: PathBuf,
    pub format: Format,
}

impl SweepSpec {
    pub fn new(surface: SurfaceId, max_kdeg: i64, output_path: impl Into<PathBuf>, format: Format) -> Self {
        SweepSpec {
            surface,
            max_kdeg,
            require_genus_min: 2,
            output_path: output_path.into(),
            format,
        }
    }
}

/// All nef `L` with `1 <= -K.L <= max_kdeg`, in lexicographic order.
pub fn enumerate_nef(surface: SurfaceId, max_kdeg: i64) -> Vec<DivisorClass> {
    let k2 = surface.degree();
    let mut out = Vec::new();
    for d in 1..=max_kdeg {
        for s in 0..=(d * d / k2) {
            out.extend(enumerate_classes(surface, s, d, true));
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub surface: usize,
    pub class: DivisorClass,
    pub genus: i64,
    pub k0: i64,
    pub case: CaseTag,
    pub gon_special: Option<i64>,
    pub gon_general: i64,
    pub cliff_defined: bool,
    pub cliff_special: Option<i64>,
    pub cliff_general: Option<i64>,
    pub exceptional: bool,
    pub cliff_dim: Option<i64>,
    pub pencil_clauses: String,
}

impl From<&AnalysisReport> for SweepRow {
    fn from(r: &AnalysisReport) -> Self {
        let mut clauses: Vec<&str> = Vec::new();
        for p in r.pencils_general.iter().chain(r.pencils_special.iter().flatten()) {
            if !clauses.contains(&p.clause.as_str()) {
                clauses.push(&p.clause);
            }
        }
        let g = &r.gonality;
        let c = &r.clifford;
        SweepRow {
            surface: g.l.surface().n(),
            class: g.l,
            genus: g.genus,
            k0: g.k0,
            case: g.case_tag,
            gon_special: g.gonality_special,
            gon_general: g.gonality_general,
            cliff_defined: c.defined,
            cliff_special: c.clifford_special,
            cliff_general: c.clifford_general,
            exceptional: c.exceptional,
            cliff_dim: c.clifford_dimension,
            pencil_clauses: clauses.join(";"),
        }
    }
}

/// Analyses every class of the sweep, in parallel on the current rayon pool,
/// and returns the reports in class order.
pub fn sweep_reports(spec: &SweepSpec) -> Result<Vec<AnalysisReport>> {
    if spec.max_kdeg < 2 {
        return Err(Error::InvalidArgument(format!(
            "max_kdeg must be at least 2, got {}",
            spec.max_kdeg
        )));
    }
    let classes: Vec<_> = enumerate_nef(spec.surface, spec.max_kdeg)
        .into_iter()
        .filter(|l| l.sectional_genus() >= spec.require_genus_min.max(2))
        .collect();
    classes.par_iter().map(analyze).collect()
}

/// Writes the sweep to `spec.output_path` and returns the number of rows.
/// The file appears atomically; nothing is left behind on failure.
pub fn sweep(spec: &SweepSpec) -> Result<usize> {
    let reports = sweep_reports(spec)?;
    let partial = partial_path(&spec.output_path);
    let written = write_reports(&reports, spec.format, &partial).and_then(|_| {
        fs::rename(&partial, &spec.output_path)?;
        Ok(reports.len())
    });
    if written.is_err() {
        let _ = fs::remove_file(&partial);
    }
    written
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".partial");
    path.with_file_name(name)
}

fn write_reports(reports: &[AnalysisReport], format: Format, path: &Path) -> Result<()> {
    let file = fs::File::create(path)?;
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(BufWriter::new(file));
            for r in reports {
                w.serialize(SweepRow::from(r))?;
            }
            if reports.is_empty() {
                w.write_record(CSV_HEADER)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let mut w = BufWriter::new(file);
            serde_json::to_writer_pretty(&mut w, reports)?;
            w.write_all(b"\n")?;
            w.flush()?;
        }
    }
    Ok(())
}

pub const CSV_HEADER: [&str; 13] = [
    "surface",
    "class",
    "genus",
    "k0",
    "case",
    "gon_special",
    "gon_general",
    "cliff_defined",
    "cliff_special",
    "cliff_general",
    "exceptional",
    "cliff_dim",
    "pencil_clauses",
];

/// Which classes of the box the audit visits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coverage {
    /// Every nef class.
    Full,
    /// One representative per orbit of the Weyl group (permutations of the
    /// points together with the Weyl move), plus two translates of each
    /// representative checked against it.
    WeylOrbits,
}

impl Coverage {
    /// `Full` where the box is small enough to scan class by class.
    pub fn default_for(surface: SurfaceId) -> Self {
        if surface.n() <= 7 {
            Coverage::Full
        } else {
            Coverage::WeylOrbits
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AuditOptions {
    /// Options handed to the structured search; brute force always runs with
    /// the full predicate.
    pub dagger: DaggerOptions,
    pub coverage: Coverage,
}

impl AuditOptions {
    pub fn for_surface(surface: SurfaceId) -> Self {
        AuditOptions {
            dagger: DaggerOptions::default(),
            coverage: Coverage::default_for(surface),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Discrepancy {
    pub class: DivisorClass,
    pub check: String,
    pub detail: String,
}

pub fn audit(surface: SurfaceId, max_kdeg: i64) -> Vec<Discrepancy> {
    audit_with(surface, max_kdeg, AuditOptions::for_surface(surface))
}

/// The classes the audit visits for the given coverage, genus >= 2 only.
pub fn audit_classes(surface: SurfaceId, max_kdeg: i64, coverage: Coverage) -> Vec<DivisorClass> {
    let all = match coverage {
        Coverage::Full => enumerate_nef(surface, max_kdeg),
        Coverage::WeylOrbits => enumerate_dominant_nef(surface, max_kdeg),
    };
    all.into_iter().filter(|l| l.sectional_genus() >= 2).collect()
}

pub fn audit_with(surface: SurfaceId, max_kdeg: i64, options: AuditOptions) -> Vec<Discrepancy> {
    let classes = audit_classes(surface, max_kdeg, options.coverage);
    let per_class: Vec<Vec<Discrepancy>> = classes
        .par_iter()
        .map(|l| {
            let mut found = audit_class(l, options.dagger);
            if options.coverage == Coverage::WeylOrbits {
                found.extend(audit_translates(l));
            }
            found
        })
        .collect();
    per_class.into_iter().flatten().collect()
}

fn record(out: &mut Vec<Discrepancy>, l: &DivisorClass, check: &str, detail: String) {
    out.push(Discrepancy {
        class: *l,
        check: check.to_string(),
        detail,
    });
}

fn describe(s: &DaggerSearch) -> String {
    let classes: Vec<String> = s.classes().iter().map(|c| c.to_string()).collect();
    format!("k0 {} from [{}]", s.k0, classes.join(" "))
}

/// Every check the audit makes on one class.
pub fn audit_class(l: &DivisorClass, dagger: DaggerOptions) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    let structured = match dagger_value_structured_with(l, dagger) {
        Ok(s) => s,
        Err(e) => {
            record(&mut out, l, "structured", e.to_string());
            return out;
        }
    };
    let brute = match dagger_value_bruteforce(l) {
        Ok(s) => s,
        Err(e) => {
            record(&mut out, l, "bruteforce", e.to_string());
            return out;
        }
    };
    if structured.k0 != brute.k0 || structured.classes() != brute.classes() {
        record(
            &mut out,
            l,
            "oracle",
            format!(
                "structured {} vs brute force {}",
                describe(&structured),
                describe(&brute)
            ),
        );
    }
    let k0 = brute.k0;
    let expected = (k0 - 1).max(0);
    match k_max_closed_form(l) {
        Ok(k) if k == expected => {}
        Ok(k) => record(&mut out, l, "k_max", format!("closed form {k}, expected {expected}")),
        Err(e) => record(&mut out, l, "k_max", e.to_string()),
    }
    let genus = l.sectional_genus();
    let mut previous = true;
    for k in 1..=k0 + 1 {
        let verdict = match is_birationally_kva(l, k) {
            Ok(v) => v,
            Err(e) => {
                record(&mut out, l, "kva", e.to_string());
                break;
            }
        };
        if verdict != (k <= expected) {
            record(&mut out, l, "kva", format!("k = {k} gives {verdict} with k0 = {k0}"));
        }
        if verdict && !previous {
            record(
                &mut out,
                l,
                "kva_monotone",
                format!("true at {k} but false at {}", k - 1),
            );
        }
        if verdict && (genus < 2 * k + 1 || l.self_intersection() < 4 * k + 3) {
            record(
                &mut out,
                l,
                "kva_bounds",
                format!("k = {k} with genus {genus} and square {}", l.self_intersection()),
            );
        }
        previous = verdict;
    }
    if l.surface().n() == 8 && k0 >= 1 && genus > 2 {
        let only_anti = brute.classes() == [DivisorClass::anticanonical(l.surface())];
        let numeric = case_three_numeric(l, k0);
        if only_anti != numeric {
            record(
                &mut out,
                l,
                "case_III",
                format!("minimal set is {{-K}}: {only_anti}, numeric criterion: {numeric}"),
            );
        }
    }
    match analyze(l) {
        Ok(r) => check_report(&mut out, &r),
        Err(e) => record(&mut out, l, "analysis", e.to_string()),
    }
    out
}

fn check_report(out: &mut Vec<Discrepancy>, r: &AnalysisReport) {
    let g = &r.gonality;
    let l = &g.l;
    let bound = (g.genus + 3) / 2;
    if g.gonality_general > bound || g.gonality_general < 2 || g.gonality_special.is_some_and(|s| s < 2) {
        record(
            out,
            l,
            "gonality_bounds",
            format!("gonality {} for genus {}", g.gonality_general, g.genus),
        );
    }
    let expected_pair = match g.case_tag {
        CaseTag::Constant => None,
        CaseTag::CaseI | CaseTag::CaseII => Some((2, 3)),
        CaseTag::CaseIII => Some((g.k0 + 1, g.k0 + 2)),
    };
    if expected_pair.is_some() && expected_pair != g.gonality_special.map(|s| (s, g.gonality_general)) {
        record(
            out,
            l,
            "case_gonality",
            format!("{:?} with {:?}/{}", g.case_tag, g.gonality_special, g.gonality_general),
        );
    }
    let c = &r.clifford;
    if c.defined {
        let diff = c.clifford_general.map(|x| g.gonality_general - x);
        let want = if c.exceptional { 3 } else { 2 };
        if diff != Some(want) {
            record(
                out,
                l,
                "clifford_gap",
                format!(
                    "gonality minus Clifford index is {diff:?}, exceptional {}",
                    c.exceptional
                ),
            );
        }
        if c.exceptional && (g.case_tag != CaseTag::Constant || !matches!(c.clifford_dimension, Some(2 | 3))) {
            record(
                out,
                l,
                "exceptional",
                format!("{:?} dimension {:?}", g.case_tag, c.clifford_dimension),
            );
        }
    }
    for p in &r.pencils_general {
        if p.degree != g.gonality_general {
            record(
                out,
                l,
                "pencil_degree",
                format!(
                    "{} has degree {} for gonality {}",
                    p.clause, p.degree, g.gonality_general
                ),
            );
        }
    }
    for p in r.pencils_special.iter().flatten() {
        if Some(p.degree) != g.gonality_special {
            record(
                out,
                l,
                "pencil_degree",
                format!(
                    "{} has degree {} for special gonality {:?}",
                    p.clause, p.degree, g.gonality_special
                ),
            );
        }
    }
}

/// The numbers of an analysis that any symmetry of the lattice must preserve.
pub fn report_signature(r: &AnalysisReport) -> impl PartialEq + std::fmt::Debug {
    let g = &r.gonality;
    let c = &r.clifford;
    (
        (
            g.genus,
            g.k0,
            g.case_tag,
            g.gonality_general,
            g.gonality_special,
            g.minimal_set.len(),
        ),
        (
            c.defined,
            c.clifford_general,
            c.clifford_special,
            c.exceptional,
            c.clifford_dimension,
            c.exceptional_witness.is_some(),
        ),
        (
            r.k_max,
            r.pencils_general.len(),
            r.pencils_special.as_ref().map(Vec::len),
        ),
    )
}

/// Checks a dominant representative against two of its translates.
fn audit_translates(l: &DivisorClass) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    let n = l.surface().n();
    let Ok(base) = analyze(l) else { return out };
    let reversed: Vec<usize> = (0..n).rev().collect();
    let mut translates = vec![l.permuted(&reversed)];
    if let Ok(moved) = l.permuted(&reversed).weyl_move() {
        translates.push(moved);
    }
    for t in translates {
        if dominant_representative(&t) != Some(*l) {
            record(
                &mut out,
                l,
                "orbit",
                format!("translate {t} does not return to its representative"),
            );
        }
        match analyze(&t) {
            Ok(r) if report_signature(&r) == report_signature(&base) => {}
            Ok(_) => record(&mut out, l, "orbit", format!("translate {t} has a different report")),
            Err(e) => record(&mut out, l, "orbit", format!("translate {t}: {e}")),
        }
    }
    out
}
