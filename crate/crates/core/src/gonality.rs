//! Gonality, Clifford index and pencils of the smooth curves in a linear
//! system `|L|` on `S_n`.
//!
//! Everything is driven by one predicate on pairs `(L, D)`. For a nef class
//! `D` put `v = D.(L - D)` and `k = v - 1`; `D` certifies `k` when
//!
//! * `h^0(D) >= 2` and `h^0(L - D) >= 2`,
//! * `L + K - D` is effective,
//! * `L - 2D` is effective whenever `L^2 >= 4k + 3`.
//!
//! `k0` is the least certified `k`. `L + K` is birationally `k`-very ample
//! exactly for `k < k0`, and the minimal gonality of a smooth member of `|L|`
//! is `k0 + 1` (or 2 when `k0 = 0`).
//!
//! Two searches compute `k0`. The structured one only looks at conic classes,
//! line-pullback classes and elliptic classes of the shape
//! `-K + sum R(L) + sum B`; the brute-force one scans every nef class in a
//! bounded box. They must agree.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::cones::{
    curve_table, enumerate_classes, enumerate_nef_meeting, h0, is_ample, is_base_point_free, is_effective, is_nef,
    neg_curves, r_sets, RSets,
};
use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceId};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    Conic,
    SquareOne,
    Elliptic,
    Other,
}

impl CertificateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CertificateKind::Conic => "conic",
            CertificateKind::SquareOne => "square_one",
            CertificateKind::Elliptic => "elliptic",
            CertificateKind::Other => "other",
        }
    }

    fn of(d: &DivisorClass) -> Self {
        match (d.self_intersection(), d.kdeg()) {
            (0, 2) => CertificateKind::Conic,
            (1, 3) => CertificateKind::SquareOne,
            (s, k) if s == k => CertificateKind::Elliptic,
            _ => CertificateKind::Other,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaggerCertificate {
    #[serde(rename = "D")]
    pub d: DivisorClass,
    /// `D.(L - D)`.
    pub value: i64,
    pub kind: CertificateKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DaggerSearch {
    pub k0: i64,
    /// Every certificate reaching the minimum, ordered by class.
    pub minimal_set: Vec<DaggerCertificate>,
}

impl DaggerSearch {
    pub fn classes(&self) -> Vec<DivisorClass> {
        self.minimal_set.iter().map(|c| c.d).collect()
    }

    fn from_candidates(l: &DivisorClass, mut certs: Vec<DaggerCertificate>) -> Result<Self> {
        let min = certs
            .iter()
            .map(|c| c.value)
            .min()
            .ok_or_else(|| Error::Inconsistent(format!("no certificate found for {l}")))?;
        certs.retain(|c| c.value == min);
        certs.sort_by_key(|c| c.d);
        certs.dedup_by(|x, y| x.d == y.d);
        Ok(DaggerSearch {
            k0: min - 1,
            minimal_set: certs,
        })
    }
}

/// Switches for the search. The default is the correct predicate; turning a
/// clause off exists only to show the audit notices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DaggerOptions {
    pub enforce_double_clause: bool,
}

impl Default for DaggerOptions {
    fn default() -> Self {
        DaggerOptions {
            enforce_double_clause: true,
        }
    }
}

fn require_nef_genus(l: &DivisorClass, required: i64) -> Result<i64> {
    if !is_nef(l) {
        return Err(Error::NotNef(*l));
    }
    let genus = l.sectional_genus();
    if genus < required {
        return Err(Error::GenusTooSmall {
            class: *l,
            genus,
            required,
        });
    }
    Ok(genus)
}

/// Evaluates the predicate for `D` against `L` and returns the certificate if
/// `D` certifies `k = D.(L - D) - 1`.
pub fn certify(l: &DivisorClass, d: &DivisorClass, options: DaggerOptions) -> Option<DaggerCertificate> {
    let rest = *l - *d;
    let value = d.dot(&rest);
    let k = value - 1;
    let canonical = DivisorClass::canonical(l.surface());
    if h0(d) < 2 || h0(&rest) < 2 || !is_effective(&(rest + canonical)) {
        return None;
    }
    if options.enforce_double_clause && l.self_intersection() >= 4 * k + 3 && !is_effective(&(rest - *d)) {
        return None;
    }
    Some(DaggerCertificate {
        d: *d,
        value,
        kind: CertificateKind::of(d),
    })
}

/// Elliptic candidates `-K + sum R(L) + sum B` with `B` a set of pairwise
/// disjoint members of `R_1(L)` and square at most 4.
fn elliptic_candidates(surface: SurfaceId, r: &RSets) -> Vec<DivisorClass> {
    let base =
        r.r0.iter()
            .fold(DivisorClass::anticanonical(surface), |acc, g| acc + *g);
    let mut out = Vec::new();
    if base.self_intersection() > 4 {
        return out;
    }
    // Curves of R_1 meet each other and R non-negatively, so every curve
    // added raises the square by at least one.
    fn grow(
        r1: &[DivisorClass],
        start: usize,
        chosen: &mut Vec<DivisorClass>,
        cur: DivisorClass,
        out: &mut Vec<DivisorClass>,
    ) {
        out.push(cur);
        for (i, g) in r1.iter().enumerate().skip(start) {
            if chosen.iter().any(|c| c.dot(g) != 0) {
                continue;
            }
            let next = cur + *g;
            if next.self_intersection() > 4 {
                continue;
            }
            chosen.push(*g);
            grow(r1, i + 1, chosen, next, out);
            chosen.pop();
        }
    }
    grow(&r.r1, 0, &mut Vec::new(), base, &mut out);
    out
}

pub fn dagger_value_structured(l: &DivisorClass) -> Result<DaggerSearch> {
    dagger_value_structured_with(l, DaggerOptions::default())
}

pub fn dagger_value_structured_with(l: &DivisorClass, options: DaggerOptions) -> Result<DaggerSearch> {
    require_nef_genus(l, 2)?;
    let surface = l.surface();
    let table = curve_table(surface);
    let r = r_sets(l)?;
    let mut candidates: Vec<(i64, DivisorClass)> = table
        .conic_classes
        .iter()
        .chain(&table.line_pullbacks)
        .copied()
        .chain(elliptic_candidates(surface, &r))
        .map(|d| (d.dot(&(*l - d)), d))
        .collect();
    candidates.sort_unstable();
    // Certify level by level; the first level with a certificate is the minimum.
    let mut certs = Vec::new();
    for level in candidates.chunk_by(|x, y| x.0 == y.0) {
        certs.extend(level.iter().filter_map(|(_, d)| certify(l, d, options)));
        if !certs.is_empty() {
            break;
        }
    }
    let found = DaggerSearch::from_candidates(l, certs)?;
    let bound = (found.k0 + 1).min(4);
    for c in &found.minimal_set {
        if c.kind == CertificateKind::Elliptic && c.d.self_intersection() > bound {
            return Err(Error::Inconsistent(format!(
                "elliptic certificate {} for {l} has square above {bound}",
                c.d
            )));
        }
    }
    Ok(found)
}

/// Scans all nef `D` with `1 <= -K.D < -K.L` and `0 <= D^2 <= D.L <= L^2`,
/// in increasing order of `D.(L - D)`, and stops at the first value that has
/// a certificate.
pub fn dagger_value_bruteforce(l: &DivisorClass) -> Result<DaggerSearch> {
    dagger_value_bruteforce_with(l, DaggerOptions::default())
}

pub fn dagger_value_bruteforce_with(l: &DivisorClass, options: DaggerOptions) -> Result<DaggerSearch> {
    require_nef_genus(l, 2)?;
    let k2 = l.surface().degree();
    let l2 = l.self_intersection();
    let top = l.kdeg() - 1;
    for value in 0..=l2 {
        let mut certs = Vec::new();
        for t in 1..=top {
            for s in 0..=(t * t / k2) {
                let meet = value + s;
                // Hodge index: (D.L)^2 >= D^2 L^2.
                if meet > l2 || meet * meet < s * l2 {
                    continue;
                }
                for d in enumerate_nef_meeting(l, s, t, meet) {
                    certs.extend(certify(l, &d, options));
                }
            }
        }
        if !certs.is_empty() {
            return DaggerSearch::from_candidates(l, certs);
        }
    }
    Err(Error::Inconsistent(format!("no certificate found for {l}")))
}

/// Whether `L + K` is birationally `k`-very ample, decided from the special
/// curve classes and `R(L)`.
pub fn is_birationally_kva(l: &DivisorClass, k: i64) -> Result<bool> {
    require_nef_genus(l, 2)?;
    if k < 1 {
        return Err(Error::InvalidArgument(format!("k must be at least 1, got {k}")));
    }
    let table = curve_table(l.surface());
    if table.conic_classes.iter().any(|d| l.dot(d) < k + 2) {
        return Ok(false);
    }
    if table.line_pullbacks.iter().any(|d| l.dot(d) < k + 3) {
        return Ok(false);
    }
    let s = l.surface().degree() + r_sets(l)?.m as i64;
    Ok(s >= 5 || s > k + 1 || l.kdeg() >= k + 2 + s)
}

/// Largest `k >= 1` with `L + K` birationally `k`-very ample, or 0.
pub fn k_max(l: &DivisorClass) -> Result<i64> {
    let value = k_max_closed_form(l)?;
    let k0 = dagger_value_structured(l)?.k0;
    if value != (k0 - 1).max(0) {
        return Err(Error::Inconsistent(format!(
            "k_max {value} of {l} disagrees with k0 {k0}"
        )));
    }
    Ok(value)
}

pub(crate) fn k_max_closed_form(l: &DivisorClass) -> Result<i64> {
    require_nef_genus(l, 2)?;
    let table = curve_table(l.surface());
    let k_c = table
        .conic_classes
        .iter()
        .map(|d| l.dot(d) - 2)
        .min()
        .unwrap_or(i64::MAX);
    let k_s = table
        .line_pullbacks
        .iter()
        .map(|d| l.dot(d) - 3)
        .min()
        .unwrap_or(i64::MAX);
    let s = l.surface().degree() + r_sets(l)?.m as i64;
    let k_e = if s >= 5 {
        i64::MAX
    } else {
        (s - 2).max(l.kdeg() - s - 2)
    };
    Ok(k_c.min(k_s).min(k_e).max(0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CaseTag {
    #[serde(rename = "constant")]
    Constant,
    #[serde(rename = "case_I")]
    CaseI,
    #[serde(rename = "case_II")]
    CaseII,
    #[serde(rename = "case_III")]
    CaseIII,
}

impl CaseTag {
    pub fn as_str(self) -> &'static str {
        match self {
            CaseTag::Constant => "constant",
            CaseTag::CaseI => "case_I",
            CaseTag::CaseII => "case_II",
            CaseTag::CaseIII => "case_III",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GonalityReport {
    #[serde(rename = "L")]
    pub l: DivisorClass,
    pub genus: i64,
    pub k0: i64,
    pub minimal_set: Vec<DaggerCertificate>,
    pub case_tag: CaseTag,
    pub gonality_general: i64,
    pub gonality_special: Option<i64>,
    pub special_family: Option<String>,
}

const HYPERELLIPTIC_FAMILY: &str = "curves through a non-very-ample length-2 scheme of |D|";
const BASE_POINT_FAMILY: &str = "curves through the base point of |-K|";

fn case_of(l: &DivisorClass, genus: i64, found: &DaggerSearch) -> CaseTag {
    let n = l.surface().n();
    let anti = DivisorClass::anticanonical(l.surface());
    let [only] = found.minimal_set.as_slice() else {
        return CaseTag::Constant;
    };
    if found.k0 < 1 || genus <= 2 {
        return CaseTag::Constant;
    }
    let d = only.d;
    if n == 7 && d == anti && *l == 2 * anti {
        return CaseTag::CaseI;
    }
    if n == 8 && d == anti {
        return CaseTag::CaseIII;
    }
    if n == 8 && *l == 2 * d && neg_curves(l.surface()).contains(&(d - anti)) {
        return CaseTag::CaseII;
    }
    CaseTag::Constant
}

pub fn gonality_analysis(l: &DivisorClass) -> Result<GonalityReport> {
    let genus = require_nef_genus(l, 2)?;
    let found = dagger_value_structured(l)?;
    Ok(gonality_from(l, genus, found))
}

fn gonality_from(l: &DivisorClass, genus: i64, found: DaggerSearch) -> GonalityReport {
    let minimal = (found.k0 + 1).max(2);
    let case_tag = if genus == 2 {
        CaseTag::Constant
    } else {
        case_of(l, genus, &found)
    };
    let (general, special, family) = match case_tag {
        CaseTag::Constant => (if genus == 2 { 2 } else { minimal }, None, None),
        CaseTag::CaseI | CaseTag::CaseII => (minimal + 1, Some(minimal), Some(HYPERELLIPTIC_FAMILY.to_string())),
        CaseTag::CaseIII => (minimal + 1, Some(minimal), Some(BASE_POINT_FAMILY.to_string())),
    };
    GonalityReport {
        l: *l,
        genus,
        k0: found.k0,
        minimal_set: found.minimal_set,
        case_tag,
        gonality_general: general,
        gonality_special: special,
        special_family: family,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExceptionalInfo {
    pub exceptional: bool,
    pub clifford_dimension: Option<i64>,
    pub clifford_index: Option<i64>,
    pub witness: Option<DivisorClass>,
}

/// Looks for the two configurations whose smooth members have Clifford
/// dimension above 1: a line-pullback class `D` such that every (-1)-curve
/// orthogonal to `D` meets `L` at most once (plane curves), and
/// `L = -3K + sum a_i G_i` with `n - 6` disjoint (-1)-curves and
/// `a_i` in `{2, 3}` (genus 10 curves of Clifford dimension 3).
pub fn exceptional_classify(l: &DivisorClass) -> Result<ExceptionalInfo> {
    require_nef_genus(l, 4)?;
    let surface = l.surface();
    let mut best: Option<(i64, DivisorClass)> = None;
    for (d, orthogonal) in line_pullbacks_with_orthogonal(surface) {
        let qualifies = orthogonal.iter().all(|g| g.dot(l) <= 1);
        if qualifies {
            let meet = l.dot(d);
            if best.is_none_or(|(m, _)| meet < m) {
                best = Some((meet, *d));
            }
        }
    }
    if let Some((meet, d)) = best {
        return Ok(ExceptionalInfo {
            exceptional: true,
            clifford_dimension: Some(2),
            clifford_index: Some(meet - 4),
            witness: Some(d),
        });
    }
    if let Some(support) = space_sextic_pattern(l) {
        let genus = l.sectional_genus();
        if genus != 10 {
            return Err(Error::Inconsistent(format!(
                "{l} matches -3K + sum a_i G_i but has genus {genus}"
            )));
        }
        let witness = support
            .iter()
            .fold(DivisorClass::anticanonical(surface), |acc, g| acc + *g);
        return Ok(ExceptionalInfo {
            exceptional: true,
            clifford_dimension: Some(3),
            clifford_index: Some(3),
            witness: Some(witness),
        });
    }
    Ok(ExceptionalInfo {
        exceptional: false,
        clifford_dimension: None,
        clifford_index: None,
        witness: None,
    })
}

/// Each line-pullback class with the (-1)-curves orthogonal to it.
type WithOrthogonal = Vec<(DivisorClass, Vec<DivisorClass>)>;

fn line_pullbacks_with_orthogonal(surface: SurfaceId) -> &'static WithOrthogonal {
    static CACHE: [OnceLock<WithOrthogonal>; 9] = [const { OnceLock::new() }; 9];
    CACHE[surface.n()].get_or_init(|| {
        let curves = neg_curves(surface);
        curve_table(surface)
            .line_pullbacks
            .iter()
            .map(|d| (*d, curves.iter().filter(|g| g.dot(d) == 0).copied().collect()))
            .collect()
    })
}

/// The curves `G_i` when `L + 3K = sum a_i G_i` as in [`exceptional_classify`].
fn space_sextic_pattern(l: &DivisorClass) -> Option<Vec<DivisorClass>> {
    let surface = l.surface();
    let n = surface.n();
    if !(6..=8).contains(&n) {
        return None;
    }
    let rest = *l + 3 * DivisorClass::canonical(surface);
    let wanted = n - 6;
    let total = rest.kdeg();
    if total < 2 * wanted as i64 || total > 3 * wanted as i64 {
        return None;
    }
    if wanted == 0 {
        return rest.is_zero().then(Vec::new);
    }
    // For disjoint G_i, rest.G_i = -a_i.
    let pool: Vec<_> = neg_curves(surface)
        .iter()
        .filter(|g| matches!(rest.dot(g), -3 | -2))
        .collect();
    if wanted == 1 {
        return pool.into_iter().find(|g| rest == -rest.dot(g) * **g).map(|g| vec![*g]);
    }
    for (i, g1) in pool.iter().enumerate() {
        for g2 in &pool[i + 1..] {
            if g1.dot(g2) == 0 && rest == -rest.dot(g1) * **g1 + -rest.dot(g2) * **g2 {
                return Some(vec![**g1, **g2]);
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordReport {
    pub defined: bool,
    pub clifford_general: Option<i64>,
    pub clifford_special: Option<i64>,
    pub exceptional: bool,
    pub clifford_dimension: Option<i64>,
    pub exceptional_witness: Option<DivisorClass>,
}

impl CliffordReport {
    fn undefined() -> Self {
        CliffordReport {
            defined: false,
            clifford_general: None,
            clifford_special: None,
            exceptional: false,
            clifford_dimension: None,
            exceptional_witness: None,
        }
    }
}

pub fn clifford_analysis(l: &DivisorClass) -> Result<CliffordReport> {
    let genus = require_nef_genus(l, 2)?;
    if genus < 4 {
        return Ok(CliffordReport::undefined());
    }
    let report = gonality_analysis(l)?;
    clifford_from(&report)
}

fn clifford_from(report: &GonalityReport) -> Result<CliffordReport> {
    let l = &report.l;
    if report.genus < 4 {
        return Ok(CliffordReport::undefined());
    }
    if report.case_tag == CaseTag::CaseIII {
        return Ok(CliffordReport {
            defined: true,
            clifford_general: Some(report.k0),
            clifford_special: Some(report.k0 - 1),
            exceptional: false,
            clifford_dimension: Some(1),
            exceptional_witness: None,
        });
    }
    let info = exceptional_classify(l)?;
    let gonality = report.gonality_general;
    if info.exceptional {
        let c = info.clifford_index.unwrap_or_default();
        if report.case_tag != CaseTag::Constant || c != gonality - 3 {
            return Err(Error::Inconsistent(format!(
                "{l} looks exceptional with Clifford index {c} but has gonality {gonality} ({})",
                report.case_tag.as_str()
            )));
        }
        return Ok(CliffordReport {
            defined: true,
            clifford_general: Some(c),
            clifford_special: None,
            exceptional: true,
            clifford_dimension: info.clifford_dimension,
            exceptional_witness: info.witness,
        });
    }
    let general = gonality - 2;
    let special = report.gonality_special.map(|g| g - 2);
    Ok(CliffordReport {
        defined: true,
        clifford_general: Some(general),
        clifford_special: special,
        exceptional: false,
        clifford_dimension: Some(1),
        exceptional_witness: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subfamily {
    #[serde(rename = "general")]
    General,
    #[serde(rename = "special")]
    Special,
}

impl std::str::FromStr for Subfamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "general" => Ok(Subfamily::General),
            "special" => Ok(Subfamily::Special),
            other => Err(Error::InvalidArgument(format!("unknown subfamily {other:?}"))),
        }
    }
}

/// What is removed from `D` restricted to the curve to get the pencil.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Correction {
    #[serde(rename = "none")]
    None,
    #[serde(rename = "minus 1 point")]
    OnePoint,
    #[serde(rename = "minus base point x")]
    BasePoint,
    #[serde(rename = "minus length-2 non-very-ample scheme Z2")]
    Z2,
    #[serde(rename = "minus length-3 scheme Z3")]
    Z3,
    #[serde(rename = "minus length-4 scheme Z4")]
    Z4,
    #[serde(rename = "minus Z4 = D1 ∩ D2 for D1,D2 ∈ |-2K|")]
    Z4Intersection,
}

impl Correction {
    pub fn length(self) -> i64 {
        match self {
            Correction::None => 0,
            Correction::OnePoint | Correction::BasePoint => 1,
            Correction::Z2 => 2,
            Correction::Z3 => 3,
            Correction::Z4 | Correction::Z4Intersection => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Correction::None => "none",
            Correction::OnePoint => "minus 1 point",
            Correction::BasePoint => "minus base point x",
            Correction::Z2 => "minus length-2 non-very-ample scheme Z2",
            Correction::Z3 => "minus length-3 scheme Z3",
            Correction::Z4 => "minus length-4 scheme Z4",
            Correction::Z4Intersection => "minus Z4 = D1 ∩ D2 for D1,D2 ∈ |-2K|",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PencilDescriptor {
    pub clause: String,
    #[serde(rename = "D")]
    pub d: Option<DivisorClass>,
    pub correction: Correction,
    pub applicability: String,
    /// `L.D` minus the length of the correction.
    pub degree: i64,
}

/// Nef classes with `D^2 = -K.D = s`, cached for `s` in 2..=4.
fn elliptic_classes(surface: SurfaceId, s: i64) -> &'static [DivisorClass] {
    static CACHE: [[OnceLock<Vec<DivisorClass>>; 3]; 9] = [const { [const { OnceLock::new() }; 3] }; 9];
    CACHE[surface.n()][(s - 2) as usize].get_or_init(|| enumerate_classes(surface, s, s, true))
}

const ANY_CURVE: &str = "any smooth curve in |L|";

fn pencil(
    l: &DivisorClass,
    clause: &str,
    d: DivisorClass,
    correction: Correction,
    applicability: &str,
) -> PencilDescriptor {
    PencilDescriptor {
        clause: clause.to_string(),
        d: Some(d),
        correction,
        applicability: applicability.to_string(),
        degree: l.dot(&d) - correction.length(),
    }
}

/// Pencils computing the gonality of the chosen subfamily, one per class `D`
/// of each applicable type.
pub fn pencils(l: &DivisorClass, subfamily: Subfamily) -> Result<Vec<PencilDescriptor>> {
    let report = gonality_analysis(l)?;
    pencils_from(&report, subfamily)
}

fn pencils_from(report: &GonalityReport, subfamily: Subfamily) -> Result<Vec<PencilDescriptor>> {
    let l = &report.l;
    let surface = l.surface();
    let n = surface.n();
    let k2 = surface.degree();
    let anti = DivisorClass::anticanonical(surface);
    let table = curve_table(surface);
    let mut out = Vec::new();
    let elliptic = |s: i64| elliptic_classes(surface, s);
    match (report.case_tag, subfamily) {
        (CaseTag::Constant, Subfamily::Special) => {
            return Err(Error::InvalidArgument(format!(
                "{l} has constant gonality, there is no special subfamily"
            )));
        }
        (CaseTag::Constant, Subfamily::General) => {
            let gon = report.gonality_general;
            let genus = report.genus;
            for d in table.conic_classes.iter().filter(|d| l.dot(d) == gon) {
                out.push(pencil(l, "a.i", *d, Correction::None, ANY_CURVE));
            }
            for d in table.line_pullbacks.iter().filter(|d| l.dot(d) == gon + 1) {
                out.push(pencil(l, "a.ii", *d, Correction::OnePoint, ANY_CURVE));
            }
            if n == 8 && l.kdeg() == gon + 1 {
                out.push(pencil(
                    l,
                    "a.iii",
                    anti,
                    Correction::BasePoint,
                    "curve passes through x",
                ));
            }
            if k2 <= 2 {
                for d in elliptic(2).iter().filter(|d| l.dot(d) == gon + 2) {
                    out.push(pencil(l, "a.iv", *d, Correction::Z2, ANY_CURVE));
                }
            }
            if k2 <= 3 && matches!((gon, genus), (3, 4) | (4, 5) | (6, 10)) {
                for d in elliptic(3).iter().filter(|d| l.dot(d) == gon + 3) {
                    out.push(pencil(l, "a.v", *d, Correction::Z3, ANY_CURVE));
                }
            }
            if k2 <= 4 && (gon, genus) == (4, 5) {
                for d in elliptic(4).iter().filter(|d| l.dot(d) == gon + 4) {
                    out.push(pencil(l, "a.vi", *d, Correction::Z4, ANY_CURVE));
                }
            }
        }
        (CaseTag::CaseI | CaseTag::CaseII, _) => {
            let d = report.minimal_set[0].d;
            out.push(match subfamily {
                Subfamily::Special => pencil(
                    l,
                    "b.hyper",
                    d,
                    Correction::Z2,
                    "curve is hyperelliptic (contains a length-2 scheme where |D| is not very ample)",
                ),
                Subfamily::General => pencil(l, "b.trig", d, Correction::OnePoint, "general curve in |L|"),
            });
        }
        (CaseTag::CaseIII, Subfamily::Special) => {
            out.push(pencil(l, "c.i", anti, Correction::BasePoint, "curve passes through x"));
        }
        (CaseTag::CaseIII, Subfamily::General) => {
            let d = report.gonality_general;
            out.push(pencil(
                l,
                "c.i",
                anti,
                Correction::None,
                "curve does not pass through x",
            ));
            if d == 4 {
                out.push(pencil(
                    l,
                    "c.ii",
                    2 * anti,
                    Correction::Z4Intersection,
                    "curve does not pass through x",
                ));
            }
            for c in table.conic_classes.iter().filter(|c| l.dot(c) == d) {
                out.push(pencil(l, "c.iii", *c, Correction::None, ANY_CURVE));
            }
            if d == 3 {
                for c in table.line_pullbacks.iter().filter(|c| l.dot(c) == d + 1) {
                    out.push(pencil(l, "c.iv", *c, Correction::OnePoint, ANY_CURVE));
                }
            }
            for c in elliptic(2).iter().filter(|c| l.dot(c) == d + 2) {
                out.push(pencil(l, "c.v", *c, Correction::Z2, ANY_CURVE));
            }
        }
    }
    Ok(out)
}

/// Whether the morphism given by a base point free `L` is birational onto its
/// image.
pub fn morphism_birationality(l: &DivisorClass) -> Result<bool> {
    if !is_base_point_free(l)? {
        return Err(Error::InvalidArgument(format!("{l} is not base point free")));
    }
    let surface = l.surface();
    let anti = DivisorClass::anticanonical(surface);
    let n = surface.n();
    let l2 = l.self_intersection();
    Ok(l2 > 0 && !(n == 8 && (l2, l.kdeg()) == (2, 2)) && !(n == 8 && *l == 2 * anti) && !(n == 7 && *l == anti))
}

/// Everything the command line reports about one class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub gonality: GonalityReport,
    pub clifford: CliffordReport,
    pub k_max: i64,
    pub pencils_general: Vec<PencilDescriptor>,
    pub pencils_special: Option<Vec<PencilDescriptor>>,
}

pub fn analyze(l: &DivisorClass) -> Result<AnalysisReport> {
    let gonality = gonality_analysis(l)?;
    let clifford = clifford_from(&gonality)?;
    let k = k_max_closed_form(l)?;
    if k != (gonality.k0 - 1).max(0) {
        return Err(Error::Inconsistent(format!(
            "k_max {k} of {l} disagrees with k0 {}",
            gonality.k0
        )));
    }
    let pencils_general = pencils_from(&gonality, Subfamily::General)?;
    let pencils_special = match gonality.case_tag {
        CaseTag::Constant => None,
        _ => Some(pencils_from(&gonality, Subfamily::Special)?),
    };
    Ok(AnalysisReport {
        gonality,
        clifford,
        k_max: k,
        pencils_general,
        pencils_special,
    })
}

/// Conditions under which the minimal set is exactly `{-K_{S_8}}`, read off
/// from `L` alone. Only meaningful for `k0 >= 1`.
pub fn case_three_numeric(l: &DivisorClass, k0: i64) -> bool {
    let surface = l.surface();
    if surface.n() != 8 || l.kdeg() != k0 + 2 || !is_ample(l) {
        return false;
    }
    let table = curve_table(surface);
    let l2 = l.self_intersection();
    if table.conic_classes.iter().any(|d| l.dot(d) < k0 + 2) {
        return false;
    }
    if (k0, l2) == (2, 8) && table.line_pullbacks.iter().any(|d| l.dot(d) < k0 + 3) {
        return false;
    }
    if l2 >= 8 && neg_curves(surface).iter().any(|g| l.dot(g) < 2) {
        return false;
    }
    true
}
