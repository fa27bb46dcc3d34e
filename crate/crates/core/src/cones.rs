//! Special curve classes and positivity on `S_n`.
//!
//! Everything here rests on one bounded search: the classes `D` with fixed
//! `D^2` and fixed `-K.D`. Writing `d = -K.D = 3a - sum b_i` and applying
//! Cauchy-Schwarz to `sum b_i` gives `(3a - d)^2 <= n (a^2 - D^2)`, a bounded
//! interval of `a` because `9 - n >= 1`. For each `a` the `b`-vectors lie on a
//! sphere intersected with a hyperplane and are enumerated as sorted multisets,
//! then expanded by permutation.
//!
//! The (-1)-curves generate the cone of curves for `n >= 2`. For `n <= 1` the
//! generators are supplied by hand: `{l}` on the plane and `{e_1, l - e_1}` on
//! `S_1`.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{DivisorClass, SurfaceId, MAX_POINTS};

/// The three kinds of special rational curve classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CurveKind {
    /// `(D^2, -K.D) = (-1, 1)`.
    Neg1,
    /// Nef, `(0, 2)`: fibres of a conic bundle.
    Conic,
    /// Nef, `(1, 3)`: pullbacks of a line under a blow-down to the plane.
    Sq1,
}

impl CurveKind {
    pub fn invariants(self) -> (i64, i64, bool) {
        match self {
            CurveKind::Neg1 => (-1, 1, false),
            CurveKind::Conic => (0, 2, true),
            CurveKind::Sq1 => (1, 3, true),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveClassTable {
    pub surface: SurfaceId,
    pub neg_curves: Vec<DivisorClass>,
    pub conic_classes: Vec<DivisorClass>,
    pub line_pullbacks: Vec<DivisorClass>,
}

impl CurveClassTable {
    pub fn of_kind(&self, kind: CurveKind) -> &[DivisorClass] {
        match kind {
            CurveKind::Neg1 => &self.neg_curves,
            CurveKind::Conic => &self.conic_classes,
            CurveKind::Sq1 => &self.line_pullbacks,
        }
    }

    fn compute(surface: SurfaceId) -> Self {
        let list = |kind: CurveKind| {
            let (s, d, nef) = kind.invariants();
            enumerate_classes(surface, s, d, nef)
        };
        CurveClassTable {
            surface,
            neg_curves: neg_curves_raw(surface).to_vec(),
            conic_classes: list(CurveKind::Conic),
            line_pullbacks: list(CurveKind::Sq1),
        }
    }
}

/// Lexicographic-successor permutation; returns false after the last one.
fn next_permutation(v: &mut [i64]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

fn isqrt(x: i64) -> i64 {
    if x <= 0 {
        return 0;
    }
    let mut r = (x as f64).sqrt() as i64;
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    r
}

struct MultisetSearch<'a> {
    n: usize,
    nef: bool,
    a: i64,
    prefix: [i64; MAX_POINTS],
    out: &'a mut Vec<[i64; MAX_POINTS]>,
}

impl MultisetSearch<'_> {
    /// Fills `prefix[i..]` with a non-increasing tail bounded above by `cap`,
    /// summing to `sum` with squares summing to `sq`.
    fn descend(&mut self, i: usize, cap: i64, sum: i64, sq: i64) {
        let k = (self.n - i) as i64;
        if k == 0 {
            if sum == 0 && sq == 0 {
                self.out.push(self.prefix);
            }
            return;
        }
        if sq < 0 || sum * sum > k * sq {
            return;
        }
        let r = isqrt(sq);
        let mut hi = cap.min(r);
        // Non-increasing tail: the first entry is at least the mean.
        let lo_mean = sum.div_euclid(k) + i64::from(sum.rem_euclid(k) != 0);
        let mut lo = (-r).max(lo_mean);
        if self.nef {
            lo = lo.max(0);
            if i == 1 {
                // b_1 + b_2 <= a against the (-1)-curve l - e_1 - e_2.
                hi = hi.min(self.a - self.prefix[0]);
            }
        }
        let mut v = hi;
        while v >= lo {
            self.prefix[i] = v;
            self.descend(i + 1, v, sum - v, sq - v * v);
            v -= 1;
        }
        self.prefix[i] = 0;
    }
}

/// `(9 - n) a^2 - 6 d a + d^2 + n s <= 0` is necessary for a class with
/// `a` as line coefficient, `D^2 = s` and `-K.D = d`.
fn line_degree_test(n: usize, d: i64, s: i64) -> impl Fn(i64) -> bool {
    let deg = 9 - n as i64;
    move |a| deg * a * a - 6 * d * a + d * d + n as i64 * s > 0
}

/// A range of `a` containing every root region of [`line_degree_test`].
fn line_degree_range(n: usize, d: i64, s: i64) -> std::ops::RangeInclusive<i64> {
    let deg = 9 - n as i64;
    let disc = 36 * d * d - 4 * deg * (d * d + n as i64 * s);
    if disc < 0 {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    let root = (disc as f64).sqrt();
    let lo = ((6.0 * d as f64 - root) / (2.0 * deg as f64)).floor() as i64 - 1;
    let hi = ((6.0 * d as f64 + root) / (2.0 * deg as f64)).ceil() as i64 + 1;
    lo..=hi
}

/// All classes with `D^2 = self_int` and `-K.D = anticanonical_degree`,
/// optionally restricted to nef ones, in lexicographic order.
pub fn enumerate_classes(
    surface: SurfaceId,
    self_int: i64,
    anticanonical_degree: i64,
    require_nef: bool,
) -> Vec<DivisorClass> {
    let n = surface.n();
    let d = anticanonical_degree;
    let quad = line_degree_test(n, d, self_int);

    let mut found = Vec::new();
    let mut vectors = Vec::new();
    for a in line_degree_range(n, d, self_int) {
        if quad(a) || a * a < self_int || (require_nef && a < 0) {
            continue;
        }
        vectors.clear();
        let mut search = MultisetSearch {
            n,
            nef: require_nef,
            a,
            prefix: [0; MAX_POINTS],
            out: &mut vectors,
        };
        let cap = if require_nef { a } else { i64::MAX };
        search.descend(0, cap, 3 * a - d, a * a - self_int);
        for sorted in &vectors {
            let mut perm: Vec<i64> = sorted[..n].to_vec();
            perm.reverse();
            loop {
                let mut b = [0; MAX_POINTS];
                b[..n].copy_from_slice(&perm);
                found.push(DivisorClass::from_parts(surface, a, b));
                if !next_permutation(&mut perm) {
                    break;
                }
            }
        }
    }
    if require_nef {
        found.retain(is_nef);
    }
    found.sort_unstable();
    found.dedup();
    found
}

/// Nef classes with `-K.D <= max_kdeg` in the dominant chamber
/// `b_1 >= ... >= b_n >= 0`, `a >= b_1 + b_2 + b_3` (the last condition only
/// for `n >= 3`). For `n >= 3` every nef class is carried into this chamber by
/// permutations and Weyl moves, so the list holds one representative per
/// orbit. Zero is excluded.
pub fn enumerate_dominant_nef(surface: SurfaceId, max_kdeg: i64) -> Vec<DivisorClass> {
    let n = surface.n();
    let k2 = surface.degree();
    let mut found = Vec::new();
    let mut vectors = Vec::new();
    for d in 1..=max_kdeg {
        for self_int in 0..=(d * d / k2) {
            let quad = line_degree_test(n, d, self_int);
            for a in line_degree_range(n, d, self_int) {
                if a < 0 || quad(a) || a * a < self_int {
                    continue;
                }
                vectors.clear();
                let mut search = MultisetSearch {
                    n,
                    nef: true,
                    a,
                    prefix: [0; MAX_POINTS],
                    out: &mut vectors,
                };
                search.descend(0, a, 3 * a - d, a * a - self_int);
                for b in &vectors {
                    if n >= 3 && a < b[0] + b[1] + b[2] {
                        continue;
                    }
                    let c = DivisorClass::from_parts(surface, a, *b);
                    if is_nef(&c) {
                        found.push(c);
                    }
                }
            }
        }
    }
    found.sort_unstable();
    found
}

/// Carries a class into the dominant chamber by sorting and Weyl moves.
/// Terminates for classes with `-K.D > 0`; returns `None` otherwise.
pub fn dominant_representative(d: &DivisorClass) -> Option<DivisorClass> {
    if d.kdeg() <= 0 {
        return None;
    }
    let n = d.surface().n();
    let mut cur = *d;
    loop {
        let mut b = cur.b().to_vec();
        b.sort_unstable_by(|x, y| y.cmp(x));
        let mut arr = [0; MAX_POINTS];
        arr[..n].copy_from_slice(&b);
        cur = DivisorClass::from_parts(cur.surface(), cur.a(), arr);
        if n < 3 || cur.a() >= b[0] + b[1] + b[2] {
            return Some(cur);
        }
        cur = cur.weyl_move().ok()?;
    }
}

struct SliceSearch<'a> {
    n: usize,
    a: i64,
    weights: &'a [i64],
    /// suffix sums of 1, w, w^2 over positions i..n
    suffix: [(i64, i64, i64); MAX_POINTS + 1],
    prefix: [i64; MAX_POINTS],
    out: &'a mut Vec<[i64; MAX_POINTS]>,
}

impl SliceSearch<'_> {
    /// Can some real vector on positions `i..n` reach the remaining linear
    /// sums `(sum, wsum)` with squared norm at most `sq`?
    fn feasible(&self, i: usize, sum: i64, wsum: i64, sq: i64) -> bool {
        let (m, s1, s2) = self.suffix[i];
        if m == 0 {
            return sum == 0 && wsum == 0 && sq == 0;
        }
        let (m, s1, s2) = (m as i128, s1 as i128, s2 as i128);
        let (sum, wsum, sq) = (sum as i128, wsum as i128, sq as i128);
        let det = m * s2 - s1 * s1;
        if det == 0 {
            // all remaining weights equal to s1 / m
            return wsum * m == s1 * sum && sum * sum <= m * sq;
        }
        s2 * sum * sum - 2 * s1 * sum * wsum + m * wsum * wsum <= sq * det
    }

    fn descend(&mut self, i: usize, max_so_far: i64, sum: i64, wsum: i64, sq: i64) {
        if i == self.n {
            if sum == 0 && wsum == 0 && sq == 0 {
                self.out.push(self.prefix);
            }
            return;
        }
        if sq < 0 || sum < 0 || !self.feasible(i, sum, wsum, sq) {
            return;
        }
        let hi = self
            .a
            .min(isqrt(sq))
            .min(sum)
            .min(if i > 0 { self.a - max_so_far } else { self.a });
        for v in 0..=hi {
            self.prefix[i] = v;
            self.descend(
                i + 1,
                max_so_far.max(v),
                sum - v,
                wsum - v * self.weights[i],
                sq - v * v,
            );
        }
        self.prefix[i] = 0;
    }
}

/// All nef classes `D` with `D^2 = self_int`, `-K.D = anticanonical_degree`
/// and `D.L = meet`, by direct backtracking over the coordinates of `D`.
///
/// This does not use the permutation symmetry exploited by
/// [`enumerate_classes`], since the extra linear condition breaks it.
pub fn enumerate_nef_meeting(
    l: &DivisorClass,
    self_int: i64,
    anticanonical_degree: i64,
    meet: i64,
) -> Vec<DivisorClass> {
    let surface = l.surface();
    let n = surface.n();
    let d = anticanonical_degree;
    let quad = line_degree_test(n, d, self_int);
    let weights = l.b();
    let mut suffix = [(0, 0, 0); MAX_POINTS + 1];
    for i in (0..n).rev() {
        let (m, s1, s2) = suffix[i + 1];
        suffix[i] = (m + 1, s1 + weights[i], s2 + weights[i] * weights[i]);
    }
    let mut found = Vec::new();
    let mut vectors = Vec::new();
    for a in line_degree_range(n, d, self_int) {
        if a < 0 || quad(a) || a * a < self_int {
            continue;
        }
        vectors.clear();
        let mut search = SliceSearch {
            n,
            a,
            weights,
            suffix,
            prefix: [0; MAX_POINTS],
            out: &mut vectors,
        };
        search.descend(0, 0, 3 * a - d, a * l.a() - meet, a * a - self_int);
        for b in &vectors {
            let c = DivisorClass::from_parts(surface, a, *b);
            if is_nef(&c) {
                found.push(c);
            }
        }
    }
    found.sort_unstable();
    found
}

static TABLES: [OnceLock<CurveClassTable>; MAX_POINTS + 1] = [const { OnceLock::new() }; MAX_POINTS + 1];
static MORI: [OnceLock<Vec<DivisorClass>>; MAX_POINTS + 1] = [const { OnceLock::new() }; MAX_POINTS + 1];

/// The (-1)-curves, conic classes and line-pullback classes of `surface`,
/// computed once per process.
pub fn curve_table(surface: SurfaceId) -> &'static CurveClassTable {
    TABLES[surface.n()].get_or_init(|| CurveClassTable::compute(surface))
}

/// The (-1)-curves of `surface` in lexicographic order.
pub fn neg_curves(surface: SurfaceId) -> &'static [DivisorClass] {
    neg_curves_raw(surface)
}

fn neg_curves_raw(surface: SurfaceId) -> &'static [DivisorClass] {
    static NEG: [OnceLock<Vec<DivisorClass>>; MAX_POINTS + 1] = [const { OnceLock::new() }; MAX_POINTS + 1];
    NEG[surface.n()].get_or_init(|| enumerate_classes(surface, -1, 1, false))
}

/// Checks a table produced elsewhere (for instance read back from an on-disk
/// cache) and installs it if no table for that surface exists yet.
///
/// Returns whether the table was installed.
pub fn install_curve_table(table: CurveClassTable) -> Result<bool> {
    let surface = table.surface;
    for kind in [CurveKind::Neg1, CurveKind::Conic, CurveKind::Sq1] {
        let (s, d, nef) = kind.invariants();
        let list = table.of_kind(kind);
        if !list.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::InvalidArgument(format!(
                "{kind:?} list for {surface} is not strictly sorted"
            )));
        }
        for c in list {
            if c.surface() != surface || c.self_intersection() != s || c.kdeg() != d || (nef && !is_nef(c)) {
                return Err(Error::InvalidArgument(format!(
                    "{c} does not belong in the {kind:?} list"
                )));
            }
        }
    }
    if table.neg_curves.as_slice() != neg_curves_raw(surface) {
        return Err(Error::InvalidArgument(format!(
            "(-1)-curve list for {surface} is incomplete"
        )));
    }
    Ok(TABLES[surface.n()].set(table).is_ok())
}

/// Generators of the cone of curves.
pub fn mori_generators(surface: SurfaceId) -> &'static [DivisorClass] {
    MORI[surface.n()].get_or_init(|| match surface.n() {
        0 => vec![DivisorClass::line(surface)],
        1 => {
            let e1 = DivisorClass::exceptional(surface, 1);
            vec![e1, DivisorClass::line(surface) - e1]
        }
        _ => neg_curves_raw(surface).to_vec(),
    })
}

pub fn is_nef(d: &DivisorClass) -> bool {
    mori_generators(d.surface()).iter().all(|g| d.dot(g) >= 0)
}

/// Nakai-Moishezon.
pub fn is_ample(d: &DivisorClass) -> bool {
    d.self_intersection() > 0 && mori_generators(d.surface()).iter().all(|g| d.dot(g) > 0)
}

/// On a Del Pezzo surface every nef class is base point free except `-K_{S_8}`.
pub fn is_base_point_free(d: &DivisorClass) -> Result<bool> {
    if !is_nef(d) {
        return Err(Error::NotNef(*d));
    }
    Ok(!is_minus_k8(d))
}

pub(crate) fn is_minus_k8(d: &DivisorClass) -> bool {
    d.surface().n() == 8 && *d == DivisorClass::anticanonical(d.surface())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EffectiveReduction {
    pub input: DivisorClass,
    /// Fixed (-1)-curves removed, with multiplicity, in order of first removal.
    pub subtracted: Vec<(DivisorClass, u32)>,
    pub nef_part: Option<DivisorClass>,
    pub effective: bool,
}

/// Strips (-1)-curves meeting `d` negatively until the remainder is nef or
/// provably not effective.
pub fn reduce_to_nef(d: &DivisorClass) -> EffectiveReduction {
    let surface = d.surface();
    let curves = neg_curves(surface);
    let mut current = *d;
    let mut subtracted: Vec<(DivisorClass, u32)> = Vec::new();
    while current.kdeg() > 0 {
        let Some(gamma) = curves.iter().find(|g| current.dot(g) < 0) else {
            break;
        };
        current = current - *gamma;
        match subtracted.iter_mut().find(|(g, _)| g == gamma) {
            Some((_, m)) => *m += 1,
            None => subtracted.push((*gamma, 1)),
        }
    }
    let effective = if current.kdeg() < 0 {
        false
    } else if current.is_zero() {
        true
    } else if current.kdeg() == 0 {
        // -K is ample, so a nonzero effective class has positive degree.
        false
    } else {
        // No (-1)-curve is negative; only the hand-supplied generators for
        // n <= 1 remain to be checked.
        is_nef(&current)
    };
    EffectiveReduction {
        input: *d,
        subtracted,
        nef_part: effective.then_some(current),
        effective,
    }
}

pub fn is_effective(d: &DivisorClass) -> bool {
    reduce_to_nef(d).effective
}

/// `h^0(D)`: zero unless effective, otherwise `chi` of the nef part, since
/// nef classes on these surfaces have no higher cohomology.
pub fn h0(d: &DivisorClass) -> i64 {
    match reduce_to_nef(d) {
        EffectiveReduction {
            effective: true,
            nef_part: Some(n),
            ..
        } => n.euler_characteristic(),
        _ => 0,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RSets {
    /// (-1)-curves orthogonal to `L`.
    pub r0: Vec<DivisorClass>,
    /// (-1)-curves meeting `L` once.
    pub r1: Vec<DivisorClass>,
    pub m: usize,
}

pub fn r_sets(l: &DivisorClass) -> Result<RSets> {
    if !is_nef(l) {
        return Err(Error::NotNef(*l));
    }
    let mut r0 = Vec::new();
    let mut r1 = Vec::new();
    for g in neg_curves(l.surface()) {
        match l.dot(g) {
            0 => r0.push(*g),
            1 => r1.push(*g),
            _ => {}
        }
    }
    for (i, x) in r0.iter().enumerate() {
        for y in &r0[i + 1..] {
            if x.dot(y) != 0 {
                return Err(Error::Inconsistent(format!("{x} and {y} in R({l}) intersect")));
            }
        }
    }
    let m = r0.len();
    Ok(RSets { r0, r1, m })
}
