//! Bivariate power series truncated by total degree; this is where formal
//! group laws S(X,Y) live. A crate-internal trivariate variant supports the
//! associativity check, which needs three variables.

use std::fmt;

use crate::zq::{Ring, ZqElement};

use super::{Series, SeriesError};

/// A power series in X and Y truncated at total degree M: one row per total
/// degree d, entry `i` of row `d` holding the coefficient of `X^i Y^(d-i)`.
#[derive(Clone, PartialEq, Eq)]
pub struct BiSeries {
    ring: Ring,
    rows: Vec<Vec<ZqElement>>,
}

impl BiSeries {
    pub fn zero(ring: &Ring, prec_d: usize) -> BiSeries {
        assert!(prec_d >= 1, "total-degree truncation must be at least 1");
        let rows = (0..prec_d).map(|d| vec![ring.zero(); d + 1]).collect();
        BiSeries {
            ring: ring.clone(),
            rows,
        }
    }

    /// The additive seed X + Y.
    pub fn x_plus_y(ring: &Ring, prec_d: usize) -> BiSeries {
        let mut s = BiSeries::zero(ring, prec_d);
        if prec_d > 1 {
            s.rows[1][0] = ring.one();
            s.rows[1][1] = ring.one();
        }
        s
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Total-degree truncation: coefficients with i + j < prec_d are known.
    pub fn prec_d(&self) -> usize {
        self.rows.len()
    }

    pub fn coeff(&self, i: usize, j: usize) -> &ZqElement {
        &self.rows[i + j][i]
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, c: ZqElement) {
        assert!(c.ring() == &self.ring, "coefficient from a different ring");
        self.rows[i + j][i] = c;
    }

    pub fn row(&self, d: usize) -> &[ZqElement] {
        &self.rows[d]
    }

    pub fn set_row(&mut self, d: usize, row: Vec<ZqElement>) {
        assert_eq!(row.len(), d + 1);
        self.rows[d] = row;
    }

    pub fn is_zero(&self) -> bool {
        self.rows.iter().all(|r| r.iter().all(|c| c.is_zero()))
    }

    fn same_ring(&self, other: &BiSeries) {
        assert!(
            self.ring == other.ring,
            "biseries ring spec mismatch: {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    pub fn add(&self, other: &BiSeries) -> BiSeries {
        self.same_ring(other);
        let m = self.prec_d().min(other.prec_d());
        let mut out = BiSeries::zero(&self.ring, m);
        for d in 0..m {
            for i in 0..=d {
                out.rows[d][i] = self.rows[d][i].clone() + other.rows[d][i].clone();
            }
        }
        out
    }

    pub fn sub(&self, other: &BiSeries) -> BiSeries {
        self.same_ring(other);
        let m = self.prec_d().min(other.prec_d());
        let mut out = BiSeries::zero(&self.ring, m);
        for d in 0..m {
            for i in 0..=d {
                out.rows[d][i] = self.rows[d][i].clone() - other.rows[d][i].clone();
            }
        }
        out
    }

    pub fn mul(&self, other: &BiSeries) -> BiSeries {
        self.same_ring(other);
        let m = self.prec_d().min(other.prec_d());
        let mut out = BiSeries::zero(&self.ring, m);
        for d1 in 0..m {
            for i1 in 0..=d1 {
                let a = &self.rows[d1][i1];
                if a.is_zero() {
                    continue;
                }
                for d2 in 0..m - d1 {
                    for i2 in 0..=d2 {
                        let b = &other.rows[d2][i2];
                        if b.is_zero() {
                            continue;
                        }
                        let d = d1 + d2;
                        let i = i1 + i2;
                        out.rows[d][i] = out.rows[d][i].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        out
    }

    pub fn scalar_mul(&self, c: &ZqElement) -> BiSeries {
        let mut out = self.clone();
        for row in &mut out.rows {
            for entry in row {
                *entry = entry.clone() * c.clone();
            }
        }
        out
    }

    /// Swap X and Y.
    pub fn transpose(&self) -> BiSeries {
        let mut out = self.clone();
        for (d, row) in out.rows.iter_mut().enumerate() {
            for i in 0..=d {
                row[i] = self.rows[d][d - i].clone();
            }
        }
        out
    }

    /// Coefficientwise Frobenius lift, applied `times` times.
    pub fn frobenius(&self, times: usize) -> BiSeries {
        let mut out = self.clone();
        for row in &mut out.rows {
            for entry in row {
                *entry = entry.frobenius_iter(times);
            }
        }
        out
    }

    pub fn restamp(&self, target: &Ring) -> BiSeries {
        let mut out = BiSeries::zero(target, self.prec_d());
        for d in 0..self.prec_d() {
            for i in 0..=d {
                out.rows[d][i] = self.rows[d][i].restamp(target);
            }
        }
        out
    }

    /// Truncate to a lower total degree.
    pub fn truncate(&self, prec_d: usize) -> BiSeries {
        assert!(prec_d >= 1 && prec_d <= self.prec_d());
        BiSeries {
            ring: self.ring.clone(),
            rows: self.rows[..prec_d].to_vec(),
        }
    }

    /// Evaluate S(a(T), b(T)) for univariate arguments vanishing at 0.
    pub fn eval_series(&self, a: &Series, b: &Series) -> Result<Series, SeriesError> {
        assert!(a.ring() == &self.ring && b.ring() == &self.ring, "argument ring mismatch");
        if !a.constant_term_is_zero() || !b.constant_term_is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let m = a.prec_t().min(b.prec_t()).min(self.prec_d());
        let at = a.truncate(m);
        let bt = b.truncate(m);
        // powers of b up to the truncation, then Horner over a
        let mut b_pows = Vec::with_capacity(m);
        b_pows.push(Series::monomial(&self.ring.one(), 0, m));
        for j in 1..m {
            b_pows.push(b_pows[j - 1].mul(&bt));
        }
        let mut acc = Series::zero(&self.ring, m);
        for i in (0..m).rev() {
            acc = acc.mul(&at);
            for j in 0..m - i {
                if i + j >= self.prec_d() {
                    break;
                }
                let c = self.coeff(i, j);
                if c.is_zero() {
                    continue;
                }
                acc = acc.add(&b_pows[j].scalar_mul(c));
            }
        }
        Ok(acc)
    }

    /// Evaluate S(A, B) for bivariate arguments with no constant term.
    pub fn eval_bi(&self, a: &BiSeries, b: &BiSeries) -> Result<BiSeries, SeriesError> {
        self.same_ring(a);
        self.same_ring(b);
        if !a.rows[0][0].is_zero() || !b.rows[0][0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let m = a.prec_d().min(b.prec_d()).min(self.prec_d());
        let at = a.truncate(m);
        let bt = b.truncate(m);
        let mut b_pows = Vec::with_capacity(m);
        let mut one = BiSeries::zero(&self.ring, m);
        one.rows[0][0] = self.ring.one();
        b_pows.push(one);
        for j in 1..m {
            b_pows.push(b_pows[j - 1].mul(&bt));
        }
        let mut acc = BiSeries::zero(&self.ring, m);
        for i in (0..m).rev() {
            acc = acc.mul(&at);
            for j in 0..m - i {
                if i + j >= self.prec_d() {
                    break;
                }
                let c = self.coeff(i, j);
                if c.is_zero() {
                    continue;
                }
                acc = acc.add(&b_pows[j].scalar_mul(c));
            }
        }
        Ok(acc)
    }

    pub(crate) fn eval_tri(&self, a: &TriSeries, b: &TriSeries) -> Result<TriSeries, SeriesError> {
        if !a.coeff(0, 0, 0).is_zero() || !b.coeff(0, 0, 0).is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let m = a.prec_d().min(b.prec_d()).min(self.prec_d());
        let at = a.truncate(m);
        let bt = b.truncate(m);
        let mut b_pows = Vec::with_capacity(m);
        b_pows.push(TriSeries::one(&self.ring, m));
        for j in 1..m {
            b_pows.push(b_pows[j - 1].mul(&bt));
        }
        let mut acc = TriSeries::zero(&self.ring, m);
        for i in (0..m).rev() {
            acc = acc.mul(&at);
            for j in 0..m - i {
                if i + j >= self.prec_d() {
                    break;
                }
                let c = self.coeff(i, j);
                if c.is_zero() {
                    continue;
                }
                acc = acc.add(&b_pows[j].scalar_mul(c));
            }
        }
        Ok(acc)
    }

    /// Compose a univariate outer series with a bivariate inner one: f(S).
    pub fn compose_outer(f: &Series, inner: &BiSeries) -> Result<BiSeries, SeriesError> {
        assert!(f.ring() == &inner.ring, "outer series ring mismatch");
        if !inner.rows[0][0].is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let m = inner.prec_d();
        let mut acc = BiSeries::zero(&inner.ring, m);
        for k in (0..f.prec_t().min(m)).rev() {
            acc = acc.mul(inner);
            let c = acc.rows[0][0].clone() + f.coeff(k).clone();
            acc.rows[0][0] = c;
        }
        Ok(acc)
    }

    /// The series in X alone (Y = 0), as a univariate series.
    pub fn specialize_y_zero(&self) -> Series {
        let m = self.prec_d();
        let coeffs = (0..m).map(|d| self.rows[d][d].clone()).collect();
        Series::new(&self.ring, coeffs)
    }

    /// The series in Y alone (X = 0), as a univariate series.
    pub fn specialize_x_zero(&self) -> Series {
        let m = self.prec_d();
        let coeffs = (0..m).map(|d| self.rows[d][0].clone()).collect();
        Series::new(&self.ring, coeffs)
    }

    /// Minimum p-adic valuation over all coefficients (N when zero).
    pub fn min_valuation(&self) -> u32 {
        let mut best = self.ring.precision();
        for row in &self.rows {
            for c in row {
                best = best.min(c.valuation());
                if best == 0 {
                    return 0;
                }
            }
        }
        best
    }

    /// First (total degree, X-exponent) where the two differ.
    pub fn first_difference(&self, other: &BiSeries) -> Option<(usize, usize)> {
        self.same_ring(other);
        let m = self.prec_d().min(other.prec_d());
        for d in 0..m {
            for i in 0..=d {
                if self.rows[d][i] != other.rows[d][i] {
                    return Some((d, i));
                }
            }
        }
        None
    }
}

impl fmt::Debug for BiSeries {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for d in 0..self.prec_d() {
            for i in 0..=d {
                let c = &self.rows[d][i];
                if c.is_zero() {
                    continue;
                }
                if !first {
                    write!(out, " + ")?;
                }
                write!(out, "{c}*X^{i}Y^{}", d - i)?;
                first = false;
            }
        }
        if first {
            write!(out, "0")?;
        }
        write!(out, " + O(deg {})", self.prec_d())
    }
}

/// Trivariate series truncated by total degree; only what the associativity
/// check needs. Row `d` stores coefficients of X^i Y^j Z^(d-i-j) indexed by
/// (i, j) in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct TriSeries {
    ring: Ring,
    rows: Vec<Vec<ZqElement>>,
}

fn tri_row_len(d: usize) -> usize {
    (d + 1) * (d + 2) / 2
}

fn tri_index(d: usize, i: usize, j: usize) -> usize {
    // entries (i, j) with i + j <= d, ordered by i then j
    let skipped: usize = (0..i).map(|t| d + 1 - t).sum();
    skipped + j
}

impl TriSeries {
    pub(crate) fn zero(ring: &Ring, prec_d: usize) -> TriSeries {
        let rows = (0..prec_d).map(|d| vec![ring.zero(); tri_row_len(d)]).collect();
        TriSeries {
            ring: ring.clone(),
            rows,
        }
    }

    pub(crate) fn one(ring: &Ring, prec_d: usize) -> TriSeries {
        let mut s = TriSeries::zero(ring, prec_d);
        s.rows[0][0] = ring.one();
        s
    }

    /// The coordinate variable: 0 -> X, 1 -> Y, 2 -> Z.
    pub(crate) fn variable(ring: &Ring, which: usize, prec_d: usize) -> TriSeries {
        let mut s = TriSeries::zero(ring, prec_d);
        if prec_d > 1 {
            let (i, j) = match which {
                0 => (1, 0),
                1 => (0, 1),
                _ => (0, 0),
            };
            let idx = tri_index(1, i, j);
            s.rows[1][idx] = ring.one();
        }
        s
    }

    pub(crate) fn prec_d(&self) -> usize {
        self.rows.len()
    }

    pub(crate) fn coeff(&self, i: usize, j: usize, k: usize) -> &ZqElement {
        let d = i + j + k;
        &self.rows[d][tri_index(d, i, j)]
    }

    pub(crate) fn truncate(&self, prec_d: usize) -> TriSeries {
        TriSeries {
            ring: self.ring.clone(),
            rows: self.rows[..prec_d].to_vec(),
        }
    }

    pub(crate) fn add(&self, other: &TriSeries) -> TriSeries {
        let m = self.prec_d().min(other.prec_d());
        let mut out = TriSeries::zero(&self.ring, m);
        for d in 0..m {
            for idx in 0..tri_row_len(d) {
                out.rows[d][idx] = self.rows[d][idx].clone() + other.rows[d][idx].clone();
            }
        }
        out
    }

    pub(crate) fn scalar_mul(&self, c: &ZqElement) -> TriSeries {
        let mut out = self.clone();
        for row in &mut out.rows {
            for entry in row {
                *entry = entry.clone() * c.clone();
            }
        }
        out
    }

    pub(crate) fn mul(&self, other: &TriSeries) -> TriSeries {
        let m = self.prec_d().min(other.prec_d());
        let mut out = TriSeries::zero(&self.ring, m);
        for d1 in 0..m {
            for i1 in 0..=d1 {
                for j1 in 0..=d1 - i1 {
                    let a = &self.rows[d1][tri_index(d1, i1, j1)];
                    if a.is_zero() {
                        continue;
                    }
                    for d2 in 0..m - d1 {
                        for i2 in 0..=d2 {
                            for j2 in 0..=d2 - i2 {
                                let b = &other.rows[d2][tri_index(d2, i2, j2)];
                                if b.is_zero() {
                                    continue;
                                }
                                let d = d1 + d2;
                                let idx = tri_index(d, i1 + i2, j1 + j2);
                                out.rows[d][idx] = out.rows[d][idx].clone() + a.clone() * b.clone();
                            }
                        }
                    }
                }
            }
        }
        out
    }
}
