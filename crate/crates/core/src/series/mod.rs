//! Truncated power series over an unramified coefficient ring.
//!
//! A [`Series`] stores the coefficients of `T^0 .. T^(M-1)` and carries the
//! precision pair `(N, M)` through every operation: p-adic precision from the
//! ring, T-adic truncation from the coefficient count. Binary operations
//! truncate to the minimum of both T-precisions and never pad.

mod biseries;
mod logseries;
mod newton;

pub use biseries::BiSeries;
pub(crate) use biseries::TriSeries;
pub use logseries::{LogCoeff, LogSeries};
pub use newton::{newton_polygon, NewtonPolygon, Ratio, Segment};

use std::fmt;

use thiserror::Error;

use crate::zq::{Ring, ZqElement};

/// Errors from series-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("inner series has a nonzero constant term at precision N")]
    NonzeroConstantTerm,
    #[error("series derivative at 0 is not a unit")]
    NonUnitDerivative,
    #[error("cannot take the Newton polygon of the zero series")]
    ZeroSeries,
}

/// A univariate power series truncated at `T^M`, coefficients in a fixed
/// [`Ring`].
#[derive(Clone, PartialEq, Eq)]
pub struct Series {
    ring: Ring,
    coeffs: Vec<ZqElement>,
}

impl Series {
    /// Wrap explicit coefficients; the vector length is the T-precision M.
    pub fn new(ring: &Ring, coeffs: Vec<ZqElement>) -> Series {
        assert!(!coeffs.is_empty(), "a series needs at least one coefficient");
        for c in &coeffs {
            assert!(c.ring() == ring, "series coefficient from a different ring");
        }
        Series {
            ring: ring.clone(),
            coeffs,
        }
    }

    pub fn zero(ring: &Ring, prec_t: usize) -> Series {
        Series::new(ring, vec![ring.zero(); prec_t])
    }

    /// The identity series T.
    pub fn identity(ring: &Ring, prec_t: usize) -> Series {
        Series::monomial(&ring.one(), 1, prec_t)
    }

    /// c * T^k, truncated at `prec_t`.
    pub fn monomial(c: &ZqElement, k: usize, prec_t: usize) -> Series {
        let ring = c.ring().clone();
        let mut coeffs = vec![ring.zero(); prec_t];
        if k < prec_t {
            coeffs[k] = c.clone();
        }
        Series::new(&ring, coeffs)
    }

    /// Series from little-endian signed integer coefficients.
    pub fn from_integers(ring: &Ring, ints: &[i64], prec_t: usize) -> Series {
        let mut coeffs = vec![ring.zero(); prec_t];
        for (k, &c) in ints.iter().enumerate() {
            if k < prec_t {
                coeffs[k] = ring.integer(c);
            }
        }
        Series::new(ring, coeffs)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// T-adic truncation order M: coefficients of `T^0 .. T^(M-1)` are known.
    pub fn prec_t(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &ZqElement {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[ZqElement] {
        &self.coeffs
    }

    pub fn set_coeff(&mut self, k: usize, c: ZqElement) {
        assert!(c.ring() == &self.ring, "coefficient from a different ring");
        self.coeffs[k] = c;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The coefficient of T, i.e. the derivative at 0.
    pub fn derivative_at_zero(&self) -> &ZqElement {
        &self.coeffs[1]
    }

    pub fn constant_term_is_zero(&self) -> bool {
        self.coeffs[0].is_zero()
    }

    fn same_ring(&self, other: &Series) {
        assert!(
            self.ring == other.ring,
            "series ring spec mismatch: {:?} vs {:?}",
            self.ring,
            other.ring
        );
    }

    pub fn add(&self, other: &Series) -> Series {
        self.same_ring(other);
        let m = self.prec_t().min(other.prec_t());
        let coeffs = (0..m)
            .map(|k| self.coeffs[k].clone() + other.coeffs[k].clone())
            .collect();
        Series::new(&self.ring, coeffs)
    }

    pub fn sub(&self, other: &Series) -> Series {
        self.same_ring(other);
        let m = self.prec_t().min(other.prec_t());
        let coeffs = (0..m)
            .map(|k| self.coeffs[k].clone() - other.coeffs[k].clone())
            .collect();
        Series::new(&self.ring, coeffs)
    }

    pub fn neg(&self) -> Series {
        let coeffs = self.coeffs.iter().map(|c| -c.clone()).collect();
        Series::new(&self.ring, coeffs)
    }

    pub fn mul(&self, other: &Series) -> Series {
        self.same_ring(other);
        let m = self.prec_t().min(other.prec_t());
        let mut coeffs = vec![self.ring.zero(); m];
        for (i, a) in self.coeffs.iter().enumerate().take(m) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= m {
                    break;
                }
                if b.is_zero() {
                    continue;
                }
                coeffs[i + j] = coeffs[i + j].clone() + a.clone() * b.clone();
            }
        }
        Series::new(&self.ring, coeffs)
    }

    pub fn scalar_mul(&self, c: &ZqElement) -> Series {
        let coeffs = self.coeffs.iter().map(|a| a.clone() * c.clone()).collect();
        Series::new(&self.ring, coeffs)
    }

    /// Composition self(inner), Horner-style in the truncated ring. The inner
    /// series must vanish at 0 at working precision.
    pub fn compose(&self, inner: &Series) -> Result<Series, SeriesError> {
        self.same_ring(inner);
        if !inner.constant_term_is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let m = self.prec_t().min(inner.prec_t());
        let mut acc = Series::zero(&self.ring, m);
        for k in (0..self.prec_t().min(m)).rev() {
            acc = acc.mul(inner);
            acc.coeffs[0] = acc.coeffs[0].clone() + self.coeffs[k].clone();
        }
        Ok(acc)
    }

    /// The compositional inverse: the unique g with g(self) = self(g) = T.
    /// Solved degree by degree; the only divisions are by the unit f'(0).
    pub fn comp_inverse(&self) -> Result<Series, SeriesError> {
        if !self.constant_term_is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let m = self.prec_t();
        if m < 2 || !self.coeffs[1].is_unit() {
            return Err(SeriesError::NonUnitDerivative);
        }
        let lin_inv = self.coeffs[1].invert().expect("checked unit");
        let mut g = Series::zero(&self.ring, m);
        g.coeffs[1] = lin_inv.clone();
        // invariant: g(self) = T mod T^(n+1); fixing degree n+1 adjusts g_n+1
        for n in 2..m {
            let current = g.compose(self).expect("inner vanishes at 0");
            let mut residual = self.ring.zero() - current.coeffs[n].clone();
            // g_n enters the T^n coefficient of g(f) as g_n * f1^n
            residual = residual
                .div_exact(&self.coeffs[1].pow_u64(n as u64))
                .expect("division by a unit power");
            g.coeffs[n] = residual;
        }
        Ok(g)
    }

    /// n-fold self-composition; `iterate(f, 0) = T`.
    pub fn iterate(&self, n: usize) -> Result<Series, SeriesError> {
        if !self.constant_term_is_zero() {
            return Err(SeriesError::NonzeroConstantTerm);
        }
        let mut acc = Series::identity(&self.ring, self.prec_t());
        for _ in 0..n {
            acc = self.compose(&acc)?;
        }
        Ok(acc)
    }

    /// The smallest k whose coefficient is a unit; `None` when every stored
    /// coefficient is a non-unit (infinite at this truncation).
    pub fn weierstrass_degree(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| c.is_unit())
    }

    /// Coefficientwise reduction into the residue ring (precision 1).
    pub fn reduce_mod_p(&self) -> Series {
        let target = self.ring.residue_ring();
        let coeffs = self.coeffs.iter().map(|c| c.restamp(&target)).collect();
        Series::new(&target, coeffs)
    }

    /// Coefficientwise Frobenius lift applied `times` times; this is the
    /// twist `f -> f^phi` used by the Frobenius-twisted functional equations.
    pub fn frobenius(&self, times: usize) -> Series {
        let coeffs = self.coeffs.iter().map(|c| c.frobenius_iter(times)).collect();
        Series::new(&self.ring, coeffs)
    }

    /// Formal derivative; known one T-digit shorter than the input.
    pub fn derivative(&self) -> Series {
        let m = self.prec_t();
        if m == 1 {
            return Series::zero(&self.ring, 1);
        }
        let coeffs = (1..m)
            .map(|k| self.coeffs[k].clone() * self.ring.integer(k as i64))
            .collect();
        Series::new(&self.ring, coeffs)
    }

    /// Evaluate the stored polynomial at a point by Horner's rule.
    pub fn eval(&self, x: &ZqElement) -> ZqElement {
        assert!(x.ring() == &self.ring, "evaluation point from a different ring");
        let mut acc = self.coeffs[self.prec_t() - 1].clone();
        for k in (0..self.prec_t() - 1).rev() {
            acc = acc * x.clone() + self.coeffs[k].clone();
        }
        acc
    }

    /// The shifted series f(T + a), expanded exactly by binomials.
    pub fn shift_variable(&self, a: &ZqElement) -> Series {
        assert!(a.ring() == &self.ring, "shift constant from a different ring");
        let m = self.prec_t();
        let mut out = Series::zero(&self.ring, m);
        // Horner on the polynomial in (T + a)
        for k in (0..m).rev() {
            let mut next = Series::zero(&self.ring, m);
            for j in 0..m {
                let mut c = out.coeffs[j].clone() * a.clone();
                if j > 0 {
                    c = c + out.coeffs[j - 1].clone();
                }
                next.coeffs[j] = c;
            }
            next.coeffs[0] = next.coeffs[0].clone() + self.coeffs[k].clone();
            out = next;
        }
        out
    }

    /// Drop coefficients beyond `prec_t` (never pads).
    pub fn truncate(&self, prec_t: usize) -> Series {
        assert!(prec_t >= 1 && prec_t <= self.prec_t(), "truncate cannot extend a series");
        Series::new(&self.ring, self.coeffs[..prec_t].to_vec())
    }

    /// Reduce every coefficient into a narrower ring.
    pub fn restamp(&self, target: &Ring) -> Series {
        let coeffs = self.coeffs.iter().map(|c| c.restamp(target)).collect();
        Series::new(target, coeffs)
    }

    /// The smallest degree where two series differ, at shared precision.
    pub fn first_difference(&self, other: &Series) -> Option<usize> {
        self.same_ring(other);
        let m = self.prec_t().min(other.prec_t());
        (0..m).find(|&k| self.coeffs[k] != other.coeffs[k])
    }
}

impl fmt::Debug for Series {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            write!(out, "{c}*T^{k}")?;
            first = false;
        }
        if first {
            write!(out, "0")?;
        }
        write!(out, " + O(T^{})", self.prec_t())
    }
}
