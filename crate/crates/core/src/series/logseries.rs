//! Series with bounded p-power denominators, the home of Lubin logarithms.
//!
//! A coefficient is stored as `unit * p^(-denom_exp)`; all comparisons happen
//! at a stated effective precision e, meaning the p-adic distance of the two
//! values is at most p^(-e). The working ring must carry enough digits for
//! the comparison to be decidable, otherwise the operation reports
//! insufficient precision instead of guessing.

use std::fmt;

use crate::zq::{Ring, ZqElement};

use super::Series;

/// One coefficient: `unit / p^denom_exp`, with the common p-powers stripped
/// so either `denom_exp = 0` or the numerator is a unit (or zero).
#[derive(Clone, PartialEq, Eq)]
pub struct LogCoeff {
    pub denom_exp: u32,
    pub unit: ZqElement,
}

impl fmt::Debug for LogCoeff {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.denom_exp == 0 {
            write!(out, "{}", self.unit)
        } else {
            write!(out, "{}/p^{}", self.unit, self.denom_exp)
        }
    }
}

/// A truncated series whose coefficients may carry p-power denominators.
#[derive(Clone, PartialEq, Eq)]
pub struct LogSeries {
    ring: Ring,
    coeffs: Vec<LogCoeff>,
}

impl LogSeries {
    pub fn new(ring: &Ring, coeffs: Vec<LogCoeff>) -> LogSeries {
        assert!(!coeffs.is_empty());
        for c in &coeffs {
            assert!(c.unit.ring() == ring, "coefficient from a different ring");
        }
        LogSeries {
            ring: ring.clone(),
            coeffs,
        }
    }

    /// An integral series viewed with trivial denominators.
    pub fn from_series(s: &Series) -> LogSeries {
        let coeffs = s
            .coeffs()
            .iter()
            .map(|c| LogCoeff {
                denom_exp: 0,
                unit: c.clone(),
            })
            .collect();
        LogSeries::new(s.ring(), coeffs)
    }

    /// The quotient `numerator / scale` where `scale = p^exp * unit`;
    /// each coefficient is put in canonical stripped form.
    pub fn from_quotient(numerator: &Series, exp: u32, unit: &ZqElement) -> LogSeries {
        let ring = numerator.ring().clone();
        let unit_inv = unit.invert().expect("scale unit part must be invertible");
        let coeffs = numerator
            .coeffs()
            .iter()
            .map(|c| {
                let num = c.clone() * unit_inv.clone();
                let v = num.valuation().min(exp);
                LogCoeff {
                    denom_exp: exp - v,
                    unit: num.div_exact_p(v).expect("valuation strips exactly"),
                }
            })
            .collect();
        LogSeries::new(&ring, coeffs)
    }

    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    pub fn prec_t(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coeff(&self, k: usize) -> &LogCoeff {
        &self.coeffs[k]
    }

    pub fn coeffs(&self) -> &[LogCoeff] {
        &self.coeffs
    }

    /// Largest denominator exponent over all coefficients.
    pub fn max_denom_exp(&self) -> u32 {
        self.coeffs.iter().map(|c| c.denom_exp).max().unwrap_or(0)
    }

    /// Reduce every numerator into a narrower ring; denominators unchanged.
    pub fn restamp(&self, target: &Ring) -> LogSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| LogCoeff {
                denom_exp: c.denom_exp,
                unit: c.unit.restamp(target),
            })
            .collect();
        LogSeries::new(target, coeffs)
    }

    /// Multiply by an integral scalar.
    pub fn scalar_mul(&self, c: &ZqElement) -> LogSeries {
        let coeffs = self
            .coeffs
            .iter()
            .map(|lc| {
                let num = lc.unit.clone() * c.clone();
                let v = num.valuation().min(lc.denom_exp);
                LogCoeff {
                    denom_exp: lc.denom_exp - v,
                    unit: num.div_exact_p(v).expect("valuation strips exactly"),
                }
            })
            .collect();
        LogSeries::new(&self.ring, coeffs)
    }

    /// Compose with an integral series vanishing at 0 by clearing to a
    /// common denominator, composing integrally, and re-normalizing.
    pub fn compose_series(&self, inner: &Series) -> LogSeries {
        assert!(inner.ring() == &self.ring, "inner series ring mismatch");
        assert!(inner.constant_term_is_zero(), "inner series must vanish at 0");
        let delta = self.max_denom_exp();
        let m = self.prec_t().min(inner.prec_t());
        let scaled: Vec<ZqElement> = (0..m)
            .map(|k| {
                let c = &self.coeffs[k];
                let mut u = c.unit.clone();
                for _ in 0..delta - c.denom_exp {
                    u = u * self.ring.integer(self.ring.p() as i64);
                }
                u
            })
            .collect();
        let numerator = Series::new(&self.ring, scaled)
            .compose(inner)
            .expect("inner vanishes at 0");
        LogSeries::from_quotient(&numerator, delta, &self.ring.one())
    }

    /// Coefficientwise equality at effective precision `eff`: both values
    /// brought to a common denominator must agree modulo `p^(eff + denoms)`.
    /// Returns `None` when the working precision cannot decide the question.
    pub fn eq_at(&self, other: &LogSeries, eff: u32) -> Option<bool> {
        assert!(self.ring == other.ring, "logseries ring mismatch");
        let m = self.prec_t().min(other.prec_t());
        for k in 0..m {
            match log_coeff_eq(&self.coeffs[k], &other.coeffs[k], eff)? {
                true => continue,
                false => return Some(false),
            }
        }
        Some(true)
    }

    /// The first degree where coefficients differ at effective precision.
    pub fn first_difference_at(&self, other: &LogSeries, eff: u32) -> Option<usize> {
        let m = self.prec_t().min(other.prec_t());
        (0..m).find(|&k| log_coeff_eq(&self.coeffs[k], &other.coeffs[k], eff) == Some(false))
    }
}

/// p-adic distance test: |a - b| <= p^(-eff). `None` when undecidable at the
/// working precision.
pub(crate) fn log_coeff_eq(a: &LogCoeff, b: &LogCoeff, eff: u32) -> Option<bool> {
    let ring = a.unit.ring();
    let needed = eff + a.denom_exp + b.denom_exp;
    if needed > ring.precision() {
        return None;
    }
    let mut lhs = a.unit.clone();
    for _ in 0..b.denom_exp {
        lhs = lhs * ring.integer(ring.p() as i64);
    }
    let mut rhs = b.unit.clone();
    for _ in 0..a.denom_exp {
        rhs = rhs * ring.integer(ring.p() as i64);
    }
    Some((lhs - rhs).valuation() >= needed)
}

impl fmt::Debug for LogSeries {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.unit.is_zero() {
                continue;
            }
            if !first {
                write!(out, " + ")?;
            }
            write!(out, "{c:?}*T^{k}")?;
            first = false;
        }
        if first {
            write!(out, "0")?;
        }
        write!(out, " + O(T^{})", self.prec_t())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zq::Ring;

    #[test]
    fn quotient_strips_common_powers() {
        let r = Ring::unramified(3, 1, 10).unwrap();
        // (9T + 3T^2 + T^3) / 9
        let num = Series::from_integers(&r, &[0, 9, 3, 1], 4);
        let l = LogSeries::from_quotient(&num, 2, &r.one());
        assert_eq!(l.coeff(1), &LogCoeff { denom_exp: 0, unit: r.one() });
        assert_eq!(l.coeff(2), &LogCoeff { denom_exp: 1, unit: r.one() });
        assert_eq!(l.coeff(3), &LogCoeff { denom_exp: 2, unit: r.one() });
    }

    #[test]
    fn equality_at_effective_precision() {
        let r = Ring::unramified(3, 1, 10).unwrap();
        let a = LogCoeff { denom_exp: 1, unit: r.integer(1) };
        let b = LogCoeff { denom_exp: 1, unit: r.integer(1 + 81) };
        // difference is 81/3 = 27: distance 3^-3
        assert_eq!(log_coeff_eq(&a, &b, 3), Some(true));
        assert_eq!(log_coeff_eq(&a, &b, 4), Some(false));
        // undecidable once the needed window exceeds the ring precision
        assert_eq!(log_coeff_eq(&a, &b, 9), None);
    }

    #[test]
    fn compose_with_linear_scales_denominators() {
        let r = Ring::unramified(5, 1, 8).unwrap();
        // L = T + T^2/5, composed with 5T: 5T + 5T^2
        let num = Series::from_integers(&r, &[0, 5, 1], 4);
        let l = LogSeries::from_quotient(&num, 1, &r.one());
        let inner = Series::from_integers(&r, &[0, 5], 4);
        let got = l.compose_series(&inner);
        assert_eq!(got.coeff(1), &LogCoeff { denom_exp: 0, unit: r.integer(5) });
        assert_eq!(got.coeff(2), &LogCoeff { denom_exp: 0, unit: r.integer(5) });
    }
}
