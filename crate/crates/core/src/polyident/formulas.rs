//! The polynomials appearing in the log-concavity and ratio-monotonicity
//! arguments, written once over any [`Ring`] so they can be expanded
//! symbolically or evaluated at a point.
//!
//! Grouped expansions are kept as term tables `(coef, deg_x, deg_y)` in the
//! order the groups are written down, so a transcription slip shows up as a
//! nonzero residual instead of being absorbed into the algebra.

use super::poly::{MultiPoly, Ring};

pub(crate) fn c<R: Ring>(k: i64) -> R {
    R::constant(k)
}

/// `A(m,i)`, the numerator of `B(m,i)`.
pub fn a_poly<R: Ring>(m: &R, i: &R) -> R {
    let t = |k: i64, em: u32, ei: u32| c::<R>(k) * m.pow(em) * i.pow(ei);
    t(30, 0, 0) + t(96, 2, 0) + t(94, 1, 0) + t(37, 0, 1) + t(72, 2, 1) + t(8, 2, 2) - t(1, 0, 3)
        + t(99, 1, 1)
        + t(5, 0, 2)
        + t(13, 1, 2)
        + t(16, 3, 1)
        + t(32, 3, 0)
}

/// Denominator of `B(m,i)`: `2(i+2)(4m+2i+5)(m+1)(m-i+1)`.
pub fn b_den<R: Ring>(m: &R, i: &R) -> R {
    c::<R>(2)
        * (i.clone() + c(2))
        * (c::<R>(4) * m.clone() + c::<R>(2) * i.clone() + c(5))
        * (m.clone() + c(1))
        * (m.clone() - i.clone() + c(1))
}

/// `F(n,i) = (4n+2i+9)(i+2)(4n+5)(4n+3)(n+i+1)`.
pub fn f_poly<R: Ring>(n: &R, i: &R) -> R {
    (c::<R>(4) * n.clone() + c::<R>(2) * i.clone() + c(9))
        * (i.clone() + c(2))
        * (c::<R>(4) * n.clone() + c(5))
        * (c::<R>(4) * n.clone() + c(3))
        * (n.clone() + i.clone() + c(1))
}

/// Quartic factor inside `G(n,i) = -2 g(n,i) (n+1)`.
pub const G_INNER: &[(i64, u32, u32)] = &[
    (-90, 0, 0),
    (-23, 0, 1),
    (-202, 1, 0),
    (51, 0, 3),
    (60, 0, 2),
    (-144, 2, 0),
    (-32, 3, 0),
    (-80, 2, 1),
    (-8, 2, 2),
    (-97, 1, 1),
    (13, 1, 2),
    (-16, 3, 1),
    (16, 1, 3),
    (8, 0, 4),
];

pub fn g_poly<R: Ring>(n: &R, i: &R) -> R {
    c::<R>(-2) * table(G_INNER).eval_in(n, i) * (n.clone() + c(1))
}

/// Groups of `2(i+2)(4n+2i+5)(n+1)(n-i+1) F - A G`; each is nonnegative
/// for `0 <= i <= n`. Single positive monomials come last.
pub const LEMMA32_GROUPS: &[&[(i64, u32, u32)]] = &[
    &[(128, 4, 4), (-32, 3, 5), (-80, 2, 6), (-16, 1, 7)],
    &[(618, 3, 4), (-222, 1, 6), (-16, 0, 7), (-284, 2, 5)],
    &[(844, 1, 3), (-170, 0, 4)],
    &[(1502, 2, 3), (-338, 0, 5)],
    &[(984, 2, 4), (-142, 0, 6)],
    &[(844, 3, 3), (-590, 1, 5)],
    &[(256, 5, 2)],
    &[(720, 0, 1)],
    &[(10, 0, 3)],
    &[(788, 0, 2)],
    &[(3984, 2, 1)],
    &[(2656, 1, 1)],
    &[(3568, 1, 2)],
    &[(3136, 3, 1)],
    &[(4600, 3, 2)],
    &[(256, 5, 1)],
    &[(1344, 4, 1)],
    &[(324, 1, 4)],
    &[(176, 4, 3)],
    &[(5908, 2, 2)],
    &[(1728, 4, 2)],
];

/// Numerator of `B(n+1, n+1)`.
pub const B_TOP_NUM: &[(i64, u32, u32)] = &[(501, 0, 0), (212, 3, 0), (692, 2, 0), (975, 1, 0), (24, 4, 0)];

/// Denominator of `B(n+1, n+1)`: `2(n+3)(6n+11)(n+2)`.
pub fn b_top_den<R: Ring>(n: &R) -> R {
    c::<R>(2) * (n.clone() + c(3)) * (c::<R>(6) * n.clone() + c(11)) * (n.clone() + c(2))
}

/// `N(m,i) = 2(2m-i)(m-i+2)(6m-2i+5)(i+1)`.
pub fn n_poly<R: Ring>(m: &R, i: &R) -> R {
    c::<R>(2)
        * (c::<R>(2) * m.clone() - i.clone())
        * (m.clone() - i.clone() + c(2))
        * (c::<R>(6) * m.clone() - c::<R>(2) * i.clone() + c(5))
        * (i.clone() + c(1))
}

/// The tail of `M(m,i)` after its leading product, as written in groups.
pub const M_GROUPS: &[&[(i64, u32, u32)]] = &[
    &[(80, 3, 0), (-155, 2, 1)],
    &[(80, 2, 0), (-108, 1, 1)],
    &[(20, 1, 0), (-20, 0, 1)],
    &[(94, 1, 2), (-19, 0, 3)],
    &[(28, 0, 2)],
];

/// `M(m,i) = 4(3m-i)(2m-i)(m-i)^2 + ...`.
pub fn m_poly<R: Ring>(m: &R, i: &R) -> R {
    let d = m.clone() - i.clone();
    let lead = c::<R>(4)
        * (c::<R>(3) * m.clone() - i.clone())
        * (c::<R>(2) * m.clone() - i.clone())
        * d.clone()
        * d;
    M_GROUPS
        .iter()
        .fold(lead, |acc, g| acc + table(g).eval_in(m, i))
}

/// `C(m,i) / i`; the same quartic appears in the closed form of
/// `2(m+1)B(m,j) - (4m+2j+3)`.
pub const C_INNER: &[(i64, u32, u32)] = &[
    (24, 2, 0),
    (52, 1, 0),
    (8, 2, 1),
    (37, 1, 1),
    (4, 0, 3),
    (12, 1, 2),
    (20, 0, 0),
    (19, 0, 2),
    (28, 0, 1),
];

pub fn c_poly<R: Ring>(m: &R, i: &R) -> R {
    i.clone() * table(C_INNER).eval_in(m, i)
}

/// `D(m,i) = 2(i+2)(4m+2i+5)(m-i+1)(i+m)`.
pub fn d_poly<R: Ring>(m: &R, i: &R) -> R {
    c::<R>(2)
        * (i.clone() + c(2))
        * (c::<R>(4) * m.clone() + c::<R>(2) * i.clone() + c(5))
        * (m.clone() - i.clone() + c(1))
        * (i.clone() + m.clone())
}

/// Groups of `N D - C M`; each is nonnegative for `0 <= i <= m/2`.
pub const LEMMA34_GROUPS: &[&[(i64, u32, u32)]] = &[
    &[(312, 5, 2), (36, 2, 5), (276, 3, 4), (-612, 4, 3), (-12, 1, 6)],
    &[(2040, 4, 2), (-2533, 3, 3)],
    &[(129, 1, 5), (-43, 0, 6)],
    &[(384, 6, 0), (-752, 5, 1)],
    &[(3568, 4, 0), (-3328, 3, 1)],
    &[(1952, 5, 0), (-2792, 4, 1)],
    &[(4280, 3, 2), (-2976, 2, 3)],
    &[(2800, 3, 0), (-1240, 2, 1)],
    &[(3868, 2, 2), (-1080, 1, 3)],
    &[(1240, 1, 2)],
    &[(1488, 1, 4)],
    &[(540, 0, 4)],
    &[(800, 2, 0)],
    &[(1159, 2, 4)],
];

pub fn table(terms: &[(i64, u32, u32)]) -> MultiPoly {
    MultiPoly::from_terms(terms)
}

/// Every group of a grouped expansion as its own polynomial.
pub fn groups(tables: &[&[(i64, u32, u32)]]) -> Vec<MultiPoly> {
    tables.iter().map(|t| table(t)).collect()
}

/// Sum of a grouped expansion evaluated in `R`.
pub fn grouped_sum<R: Ring>(tables: &[&[(i64, u32, u32)]], x: &R, y: &R) -> R {
    tables
        .iter()
        .fold(c::<R>(0), |acc, t| acc + table(t).eval_in(x, y))
}
