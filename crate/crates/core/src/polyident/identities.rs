use super::formulas::*;
use super::poly::{MultiPoly, Ring};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentityId {
    Thm22Step,
    Lemma32Expansion,
    FgBIdentity,
    Lemma34Expansion,
    Formula4,
    RecurrenceInterderivation,
}

impl IdentityId {
    pub const ALL: [IdentityId; 6] = [
        IdentityId::Thm22Step,
        IdentityId::Lemma32Expansion,
        IdentityId::FgBIdentity,
        IdentityId::Lemma34Expansion,
        IdentityId::Formula4,
        IdentityId::RecurrenceInterderivation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            IdentityId::Thm22Step => "thm22_step",
            IdentityId::Lemma32Expansion => "lemma32_expansion",
            IdentityId::FgBIdentity => "fg_b_identity",
            IdentityId::Lemma34Expansion => "lemma34_expansion",
            IdentityId::Formula4 => "formula4",
            IdentityId::RecurrenceInterderivation => "recurrence_interderivation",
        }
    }

    /// Variable names used when printing residuals.
    pub fn variables(self) -> [&'static str; 2] {
        match self {
            IdentityId::Lemma34Expansion | IdentityId::RecurrenceInterderivation => ["m", "i"],
            IdentityId::Formula4 => ["m", "j"],
            _ => ["n", "i"],
        }
    }

    /// Both sides of every component equation, evaluated in `R` at `(x, y)`.
    pub fn sides<R: Ring>(self, x: &R, y: &R) -> Vec<Side<R>> {
        match self {
            IdentityId::Thm22Step => thm22_sides(x, y),
            IdentityId::Lemma32Expansion => lemma32_sides(x, y),
            IdentityId::FgBIdentity => fg_b_sides(x, y),
            IdentityId::Lemma34Expansion => lemma34_sides(x, y),
            IdentityId::Formula4 => formula4_sides(x, y),
            IdentityId::RecurrenceInterderivation => interderivation(x, y).sides,
        }
    }

    /// Grouped terms claimed nonnegative, with the region of the claim.
    pub fn grid_groups(self) -> Option<(Vec<MultiPoly>, Region)> {
        match self {
            IdentityId::Lemma32Expansion => Some((groups(LEMMA32_GROUPS), Region::Triangle)),
            IdentityId::Lemma34Expansion => Some((groups(LEMMA34_GROUPS), Region::HalfTriangle)),
            _ => None,
        }
    }

    pub fn verify(self) -> IdentityResult {
        let x = MultiPoly::x();
        let y = MultiPoly::y();
        let mut residuals: Vec<Residual> = self
            .sides(&x, &y)
            .into_iter()
            .map(|s| Residual {
                label: s.label,
                poly: s.lhs - s.rhs,
            })
            .collect();
        if self == IdentityId::RecurrenceInterderivation {
            // Proportionality to a zero form is vacuous, so a vanishing
            // derived relation counts as a failure.
            for (label, form) in interderivation(&x, &y).derived {
                if form.terms.values().all(MultiPoly::is_zero) {
                    residuals.push(Residual {
                        label: format!("{label}: derived relation vanishes"),
                        poly: MultiPoly::constant(1),
                    });
                }
            }
        }
        IdentityResult::new(self, residuals)
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for IdentityId {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        IdentityId::ALL
            .into_iter()
            .find(|id| id.name() == key)
            .ok_or_else(|| format!("unknown identity {s:?}"))
    }
}

/// One component equation `lhs = rhs`.
#[derive(Debug, Clone)]
pub struct Side<R> {
    pub label: String,
    pub lhs: R,
    pub rhs: R,
}

fn side<R>(label: &str, lhs: R, rhs: R) -> Side<R> {
    Side {
        label: label.to_string(),
        lhs,
        rhs,
    }
}

/// `lhs - rhs` of one component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Residual {
    pub label: String,
    pub poly: MultiPoly,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityResult {
    pub id: IdentityId,
    pub equal: bool,
    pub residuals: Vec<Residual>,
}

impl IdentityResult {
    fn new(id: IdentityId, residuals: Vec<Residual>) -> Self {
        let equal = residuals.iter().all(|r| r.poly.is_zero());
        IdentityResult { id, equal, residuals }
    }

    /// First nonzero residual, or zero when the identity holds.
    pub fn difference(&self) -> MultiPoly {
        self.residuals
            .iter()
            .find(|r| !r.poly.is_zero())
            .map(|r| r.poly.clone())
            .unwrap_or_default()
    }

    /// Term-by-term listing of every nonzero residual.
    pub fn describe(&self) -> String {
        let vars = self.id.variables();
        let mut out = format!("{}: {}", self.id, if self.equal { "equal" } else { "NOT equal" });
        for r in self.residuals.iter().filter(|r| !r.poly.is_zero()) {
            out.push_str(&format!("\n  [{}] residual = {}", r.label, r.poly.display_with(vars)));
        }
        out
    }
}

pub fn verify_thm22_step() -> IdentityResult {
    IdentityId::Thm22Step.verify()
}

pub fn verify_lemma32_expansion() -> IdentityResult {
    IdentityId::Lemma32Expansion.verify()
}

pub fn verify_fg_b_identity() -> IdentityResult {
    IdentityId::FgBIdentity.verify()
}

pub fn verify_lemma34_expansion() -> IdentityResult {
    IdentityId::Lemma34Expansion.verify()
}

pub fn verify_formula4() -> IdentityResult {
    IdentityId::Formula4.verify()
}

pub fn verify_recurrence_interderivation() -> IdentityResult {
    IdentityId::RecurrenceInterderivation.verify()
}

fn thm22_sides<R: Ring>(n: &R, i: &R) -> Vec<Side<R>> {
    let n1 = n.clone() + c(1);
    let n1i = n1.clone() - i.clone();
    let lhs = c::<R>(2)
        * (n.clone() + i.clone() + c(1))
        * (c::<R>(4) * n.clone() + c(3))
        * (c::<R>(4) * n.clone() + c(5))
        * n1i.clone()
        * n1.clone()
        - c::<R>(2)
            * (c::<R>(4) * n.pow(2) + c::<R>(7) * n.clone() + i.clone() + c(3))
            * n1.clone()
            * n1i.clone()
            * (c::<R>(4) * n.clone() + c::<R>(4) * i.clone() + c(5));
    let rhs = c::<R>(-4) * i.clone() * (c::<R>(1) + c::<R>(2) * i.clone()) * n1 * n1i;
    vec![side("expansion", lhs, rhs)]
}

fn lemma32_sides<R: Ring>(n: &R, i: &R) -> Vec<Side<R>> {
    let lhs = b_den(n, i) * f_poly(n, i) - a_poly(n, i) * g_poly(n, i);
    vec![side("expansion", lhs, grouped_sum(LEMMA32_GROUPS, n, i))]
}

fn fg_b_sides<R: Ring>(n: &R, i: &R) -> Vec<Side<R>> {
    let n1 = n.clone() + c(1);
    let n2 = n.clone() + c(2);
    let n2i = n2.clone() - i.clone();
    // X - B(n+1,i) over the common denominator 2(n+2-i)(n+2) * den B(n+1,i).
    let x_num = c::<R>(-4) * i.pow(2) + c::<R>(8) * n.pow(2) + c::<R>(24) * n.clone() + c(19);
    let x_den = c::<R>(2) * n2i.clone() * n2.clone();
    let diff_num = x_num * b_den(&n1, i) - x_den.clone() * a_poly(&n1, i);
    let lhs = (n1.clone() + i.clone())
        * (c::<R>(4) * n.clone() + c(3))
        * (c::<R>(4) * n.clone() + c(5))
        * g_poly(n, i)
        * x_den
        * b_den(&n1, i);
    let rhs = f_poly(n, i) * c::<R>(4) * n1.clone() * n2 * n2i * diff_num;

    let top_lhs = a_poly(&n1, &n1) * b_top_den(n);
    let top_rhs = table(B_TOP_NUM).eval_in(n, i) * b_den(&n1, &n1);
    vec![side("f_over_g", lhs, rhs), side("b_top", top_lhs, top_rhs)]
}

fn lemma34_sides<R: Ring>(m: &R, i: &R) -> Vec<Side<R>> {
    let expansion = n_poly(m, i) * d_poly(m, i) - c_poly(m, i) * m_poly(m, i);
    let m1 = m.clone() + c(1);

    // (2(m+1)B(m,i) - (4m+2i+3)) / (2(m+i)) = C/D
    let cd_num = c::<R>(2) * m1.clone() * a_poly(m, i)
        - (c::<R>(4) * m.clone() + c::<R>(2) * i.clone() + c(3)) * b_den(m, i);
    let cd_lhs = cd_num * d_poly(m, i);
    let cd_rhs = c_poly(m, i) * b_den(m, i) * c::<R>(2) * (m.clone() + i.clone());

    // 2(2m-i) / (2(m+1)B(m,m-i) - (6m-2i+3)) = N/M
    let k = m.clone() - i.clone();
    let nm_den = c::<R>(2) * m1 * a_poly(m, &k)
        - (c::<R>(6) * m.clone() - c::<R>(2) * i.clone() + c(3)) * b_den(m, &k);
    let nm_lhs = c::<R>(2) * (c::<R>(2) * m.clone() - i.clone()) * b_den(m, &k) * m_poly(m, i);
    let nm_rhs = n_poly(m, i) * nm_den;

    vec![
        side("expansion", expansion, grouped_sum(LEMMA34_GROUPS, m, i)),
        side("c_over_d", cd_lhs, cd_rhs),
        side("n_over_m", nm_lhs, nm_rhs),
    ]
}

fn formula4_sides<R: Ring>(m: &R, j: &R) -> Vec<Side<R>> {
    let m1 = m.clone() + c(1);
    let lhs = c::<R>(2) * m1.clone() * a_poly(m, j)
        - (c::<R>(4) * m.clone() + c::<R>(2) * j.clone() + c(3)) * b_den(m, j);
    let rhs = j.clone() * table(C_INNER).eval_in(m, j) * c::<R>(2) * m1;
    vec![side("closed_form", lhs, rhs)]
}

/// The coefficient `d_{i+di}(m+dm)` relative to a base point `(m, i)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol {
    pub dm: i32,
    pub di: i32,
}

impl Symbol {
    pub const fn new(dm: i32, di: i32) -> Self {
        Symbol { dm, di }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let off = |v: &str, k: i32| match k {
            0 => v.to_string(),
            k if k > 0 => format!("{v}+{k}"),
            k => format!("{v}{k}"),
        };
        write!(f, "d_{{{}}}({})", off("i", self.di), off("m", self.dm))
    }
}

/// `sum_s coef_s * s = 0` over formal coefficient symbols.
#[derive(Debug, Clone)]
pub struct LinearForm<R> {
    terms: BTreeMap<Symbol, R>,
}

impl<R: Ring> LinearForm<R> {
    pub fn new(entries: Vec<(Symbol, R)>) -> Self {
        let mut terms: BTreeMap<Symbol, R> = BTreeMap::new();
        for (s, v) in entries {
            let merged = match terms.remove(&s) {
                Some(old) => old + v,
                None => v,
            };
            terms.insert(s, merged);
        }
        LinearForm { terms }
    }

    pub fn coeff(&self, s: Symbol) -> R {
        self.terms.get(&s).cloned().unwrap_or_else(|| c(0))
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.terms.keys().copied()
    }

    pub fn scale(&self, k: &R) -> Self {
        LinearForm {
            terms: self.terms.iter().map(|(s, v)| (*s, k.clone() * v.clone())).collect(),
        }
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut entries: Vec<(Symbol, R)> = self.terms.iter().map(|(s, v)| (*s, v.clone())).collect();
        entries.extend(other.terms.iter().map(|(s, v)| (*s, -v.clone())));
        LinearForm::new(entries)
    }

    fn shifted(self, dm: i32, di: i32) -> Self {
        LinearForm {
            terms: self
                .terms
                .into_iter()
                .map(|(s, v)| (Symbol::new(s.dm + dm, s.di + di), v))
                .collect(),
        }
    }

    /// `sum coef_s * value(s)`.
    pub fn apply(&self, value: impl Fn(Symbol) -> R) -> R {
        self.terms
            .iter()
            .fold(c(0), |acc, (s, v)| acc + v.clone() * value(*s))
    }
}

/// Combination of `p` and `q` in which `s` cancels.
pub fn eliminate<R: Ring>(p: &LinearForm<R>, q: &LinearForm<R>, s: Symbol) -> LinearForm<R> {
    p.scale(&q.coeff(s)).minus(&q.scale(&p.coeff(s)))
}

/// Two-by-two minors `(p_s q_t, p_t q_s)`; all agree iff `p` and `q` are
/// proportional.
fn proportionality<R: Ring>(tag: &str, p: &LinearForm<R>, q: &LinearForm<R>) -> Vec<Side<R>> {
    let syms: Vec<Symbol> = p.symbols().chain(q.symbols()).collect::<BTreeSet<_>>().into_iter().collect();
    let mut out = Vec::new();
    for (k, &s) in syms.iter().enumerate() {
        for &t in &syms[k + 1..] {
            out.push(Side {
                label: format!("{tag}: {s} x {t}"),
                lhs: p.coeff(s) * q.coeff(t),
                rhs: p.coeff(t) * q.coeff(s),
            });
        }
    }
    out
}

/// Evaluates a relation family at `(m+dm, i+di)` and rebases its symbols.
fn at<R: Ring>(f: fn(&R, &R) -> LinearForm<R>, m: &R, i: &R, dm: i32, di: i32) -> LinearForm<R> {
    let mm = m.clone() + R::constant(dm.into());
    let ii = i.clone() + R::constant(di.into());
    f(&mm, &ii).shifted(dm, di)
}

const S: fn(i32, i32) -> Symbol = Symbol::new;

/// First-order recurrence in `m` through `d_{i-1}(m)` and `d_i(m)`.
pub fn relation_recu1<R: Ring>(m: &R, i: &R) -> LinearForm<R> {
    LinearForm::new(vec![
        (S(1, 0), c::<R>(2) * (m.clone() + c(1))),
        (S(0, -1), c::<R>(-2) * (m.clone() + i.clone())),
        (S(0, 0), -(c::<R>(4) * m.clone() + c::<R>(2) * i.clone() + c(3))),
    ])
}

/// First-order recurrence in `m` through `d_i(m)` and `d_{i+1}(m)`.
pub fn relation_recu2<R: Ring>(m: &R, i: &R) -> LinearForm<R> {
    LinearForm::new(vec![
        (S(1, 0), c::<R>(2) * (m.clone() + c(1)) * (m.clone() + c(1) - i.clone())),
        (
            S(0, 0),
            -((c::<R>(4) * m.clone() - c::<R>(2) * i.clone() + c(3)) * (m.clone() + i.clone() + c(1))),
        ),
        (S(0, 1), c::<R>(2) * i.clone() * (i.clone() + c(1))),
    ])
}

/// Second-order recurrence in `m` at fixed `i`.
pub fn relation_recu3<R: Ring>(m: &R, i: &R) -> LinearForm<R> {
    LinearForm::new(vec![
        (
            S(2, 0),
            c::<R>(4) * (m.clone() + c(2) - i.clone()) * (m.clone() + c(1)) * (m.clone() + c(2)),
        ),
        (
            S(1, 0),
            c::<R>(-2)
                * (m.clone() + c(1))
                * (c::<R>(-4) * i.pow(2) + c::<R>(8) * m.pow(2) + c::<R>(24) * m.clone() + c(19)),
        ),
        (
            S(0, 0),
            (m.clone() + i.clone() + c(1)) * (c::<R>(4) * m.clone() + c(3)) * (c::<R>(4) * m.clone() + c(5)),
        ),
    ])
}

/// Three-term relation within a single row.
pub fn relation_recu4<R: Ring>(m: &R, i: &R) -> LinearForm<R> {
    LinearForm::new(vec![
        (S(0, -2), (m.clone() + c(2) - i.clone()) * (m.clone() + i.clone() - c(1))),
        (S(0, -1), -((i.clone() - c(1)) * (c::<R>(2) * m.clone() + c(1)))),
        (S(0, 0), i.clone() * (i.clone() - c(1))),
    ])
}

/// The intermediate `d_i(m+2)` relation, denominators cleared.
pub fn relation_intermediate<R: Ring>(m: &R, i: &R) -> LinearForm<R> {
    let m1 = m.clone() + c(1);
    let m2 = m.clone() + c(2);
    let ii1 = i.clone() * (i.clone() + c(1));
    LinearForm::new(vec![
        (S(2, 0), c::<R>(2) * m1.clone() * m2.clone() * (m2.clone() - i.clone())),
        (
            S(1, 0),
            -(m1.clone()
                * (c::<R>(4) * m.clone() - c::<R>(2) * i.clone() + c(7))
                * (m2 + i.clone())),
        ),
        (S(0, 0), c::<R>(2) * ii1.clone() * (m1 + i.clone())),
        (
            S(0, 1),
            ii1 * (c::<R>(4) * m.clone() + c::<R>(2) * i.clone() + c(5)),
        ),
    ])
}

struct Interderivation<R> {
    sides: Vec<Side<R>>,
    derived: Vec<(&'static str, LinearForm<R>)>,
}

/// Derives the row relation and the second-order recurrence from the two
/// first-order recurrences by eliminating shared unknowns.
fn interderivation<R: Ring>(m: &R, i: &R) -> Interderivation<R> {
    // (a) both first-order recurrences at i-1 share d_{i-1}(m+1).
    let p = at(relation_recu1, m, i, 0, -1);
    let q = at(relation_recu2, m, i, 0, -1);
    let row_rel = eliminate(&p, &q, S(1, -1));

    // (b) two expressions for d_{i+1}(m+1), then d_{i+1}(m) from the second
    // recurrence at (m, i).
    let p = at(relation_recu1, m, i, 0, 1);
    let q = at(relation_recu2, m, i, 1, 0);
    let inter = eliminate(&p, &q, S(1, 1));
    let second = eliminate(&inter, &relation_recu2(m, i), S(0, 1));

    let mut sides = proportionality("a", &row_rel, &relation_recu4(m, i));
    sides.extend(proportionality("b1", &inter, &relation_intermediate(m, i)));
    sides.extend(proportionality("b2", &second, &relation_recu3(m, i)));

    Interderivation {
        sides,
        derived: vec![("a", row_rel), ("b1", inter), ("b2", second)],
    }
}

/// Lattice region of a nonnegativity claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `0 <= y <= x <= N`.
    Triangle,
    /// `0 <= 2y <= x <= N`.
    HalfTriangle,
}

impl Region {
    fn y_max(self, x: i64) -> i64 {
        match self {
            Region::Triangle => x,
            Region::HalfTriangle => x / 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NegativePoint {
    pub group: usize,
    pub x: i64,
    pub y: i64,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridReport {
    pub region: Region,
    pub bound: u32,
    pub points: u64,
    pub negatives: Vec<NegativePoint>,
}

impl GridReport {
    pub fn ok(&self) -> bool {
        self.negatives.is_empty()
    }
}

pub const DEFAULT_GRID: u32 = 50;

/// Evaluates every group at every lattice point of `region` up to `bound`.
pub fn grid_nonnegativity(groups: &[MultiPoly], region: Region, bound: u32) -> GridReport {
    let rows: Vec<(u64, Vec<NegativePoint>)> = (0..=bound as i64)
        .into_par_iter()
        .map(|x| {
            let mut neg = Vec::new();
            let mut count = 0;
            let xb = num_bigint::BigInt::from(x);
            for y in 0..=region.y_max(x) {
                let yb = num_bigint::BigInt::from(y);
                for (g, poly) in groups.iter().enumerate() {
                    count += 1;
                    let v = poly.eval(&xb, &yb);
                    if v < num_bigint::BigInt::from(0) {
                        neg.push(NegativePoint {
                            group: g,
                            x,
                            y,
                            value: v.to_string(),
                        });
                    }
                }
            }
            (count, neg)
        })
        .collect();
    let mut report = GridReport {
        region,
        bound,
        points: 0,
        negatives: Vec::new(),
    };
    for (count, neg) in rows {
        report.points += count;
        report.negatives.extend(neg);
    }
    report
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SuiteEntry {
    pub identity: IdentityId,
    pub equal: bool,
    /// `None` when the identity carries no nonnegativity claim.
    pub grid_ok: Option<bool>,
}

/// Runs every identity, plus the lattice check where one applies.
pub fn run_suite(grid: u32) -> Vec<(IdentityResult, Option<GridReport>)> {
    IdentityId::ALL
        .par_iter()
        .map(|&id| {
            let result = id.verify();
            let report = id
                .grid_groups()
                .map(|(groups, region)| grid_nonnegativity(&groups, region, grid));
            (result, report)
        })
        .collect()
}

pub fn suite_summary(results: &[(IdentityResult, Option<GridReport>)]) -> Vec<SuiteEntry> {
    results
        .iter()
        .map(|(r, g)| SuiteEntry {
            identity: r.id,
            equal: r.equal,
            grid_ok: g.as_ref().map(GridReport::ok),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bmcoeff::closed_form_entry;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use proptest::prelude::*;

    fn b(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn every_identity_holds() {
        for id in IdentityId::ALL {
            let r = id.verify();
            assert!(r.equal, "{}", r.describe());
            assert!(r.difference().is_zero());
        }
    }

    #[test]
    fn thm22_spot_values() {
        let s = &IdentityId::Thm22Step.sides(&b(3), &b(2))[0];
        assert_eq!(s.lhs, b(-320));
        assert_eq!(s.rhs, b(-320));
        let s = &IdentityId::Thm22Step.sides(&b(5), &b(0))[0];
        assert_eq!((s.lhs.clone(), s.rhs.clone()), (b(0), b(0)));
    }

    #[test]
    fn spot_checks_at_listed_points() {
        for (id, x, y) in [
            (IdentityId::Lemma32Expansion, 2, 1),
            (IdentityId::FgBIdentity, 4, 1),
            (IdentityId::Lemma34Expansion, 6, 3),
            (IdentityId::Formula4, 5, 2),
        ] {
            for s in id.sides(&b(x), &b(y)) {
                assert_eq!(s.lhs, s.rhs, "{id} [{}] at ({x},{y})", s.label);
            }
        }
        for s in IdentityId::Formula4.sides(&b(7), &b(0)) {
            assert_eq!((s.lhs, s.rhs), (b(0), b(0)));
        }
    }

    #[test]
    fn worked_group_vanishes_on_the_diagonal() {
        let g = table(LEMMA32_GROUPS[0]);
        assert_eq!(g.eval(&b(3), &b(3)), b(0));
    }

    #[test]
    fn expansion_has_the_positive_m_squared_term() {
        let rhs = grouped_sum(LEMMA34_GROUPS, &MultiPoly::x(), &MultiPoly::y());
        assert_eq!(rhs.coeff(2, 0), b(800));
    }

    #[test]
    fn transcription_slip_is_reported() {
        let mut bad: Vec<Vec<(i64, u32, u32)>> = LEMMA32_GROUPS.iter().map(|g| g.to_vec()).collect();
        bad[2][0].0 = 845;
        let tables: Vec<&[(i64, u32, u32)]> = bad.iter().map(Vec::as_slice).collect();
        let (x, y) = (MultiPoly::x(), MultiPoly::y());
        let lhs = b_den(&x, &y) * f_poly(&x, &y) - a_poly(&x, &y) * g_poly(&x, &y);
        let diff = lhs - grouped_sum(&tables, &x, &y);
        assert_eq!(diff, MultiPoly::from_terms(&[(-1, 1, 3)]));
    }

    #[test]
    fn relations_hold_on_actual_rows() {
        let (m, i) = (5i64, 3i64);
        let value = |s: Symbol| -> BigRational {
            let (mm, ii) = (m + s.dm as i64, i + s.di as i64);
            if ii < 0 {
                return BigRational::from_integer(b(0));
            }
            closed_form_entry(mm as usize, ii as usize).to_rational()
        };
        let (mq, iq) = (BigRational::from_integer(b(m)), BigRational::from_integer(b(i)));
        let forms = [
            relation_recu1(&mq, &iq),
            relation_recu2(&mq, &iq),
            relation_recu3(&mq, &iq),
            relation_recu4(&mq, &iq),
            relation_intermediate(&mq, &iq),
        ];
        for f in &forms {
            assert_eq!(f.apply(value), BigRational::from_integer(b(0)));
        }
        for s in IdentityId::RecurrenceInterderivation.sides(&mq, &iq) {
            assert_eq!(s.lhs, s.rhs, "{}", s.label);
        }
    }

    #[test]
    fn non_proportional_forms_are_caught() {
        let (x, y) = (MultiPoly::x(), MultiPoly::y());
        let r3 = relation_recu3(&x, &y);
        let mut wrong = r3.scale(&MultiPoly::constant(2));
        wrong.terms.insert(S(0, 0), MultiPoly::constant(1));
        assert!(proportionality("t", &r3, &wrong).iter().any(|s| s.lhs != s.rhs));
        assert!(proportionality("t", &r3, &r3.scale(&(x + MultiPoly::constant(3))))
            .iter()
            .all(|s| s.lhs == s.rhs));
    }

    #[test]
    fn grid_claims_hold_and_detector_fires() {
        for id in [IdentityId::Lemma32Expansion, IdentityId::Lemma34Expansion] {
            let (groups, region) = id.grid_groups().unwrap();
            let report = grid_nonnegativity(&groups, region, DEFAULT_GRID);
            assert!(report.ok(), "{id}: {:?}", &report.negatives[..report.negatives.len().min(3)]);
        }
        let adversarial = MultiPoly::x() - MultiPoly::constant(2) * MultiPoly::y();
        let report = grid_nonnegativity(&[adversarial], Region::Triangle, 3);
        assert!(!report.ok());
        assert_eq!((report.negatives[0].x, report.negatives[0].y), (1, 1));
        assert_eq!(report.points, 10);
    }

    #[test]
    fn suite_reports_everything() {
        let summary = suite_summary(&run_suite(10));
        assert_eq!(summary.len(), 6);
        assert!(summary.iter().all(|e| e.equal));
        assert_eq!(summary.iter().filter(|e| e.grid_ok == Some(true)).count(), 2);
        let json = serde_json::to_string(&summary[0]).unwrap();
        assert_eq!(json, r#"{"identity":"thm22_step","equal":true,"grid_ok":null}"#);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(25))]
        #[test]
        fn substitution_agrees(x in -40i64..40, y in -40i64..40) {
            for id in IdentityId::ALL {
                for s in id.sides(&BigRational::from_integer(b(x)), &BigRational::from_integer(b(y))) {
                    prop_assert_eq!(&s.lhs, &s.rhs, "{} [{}] at ({}, {})", id, s.label, x, y);
                }
            }
        }
    }
}
