//! Condensation of a Lubin-Tate dynamical system by a finite group W of
//! prime-to-p roots of unity: the norm series `R = prod_w [w](T)` and the
//! condensed family `Gamma_a` with `Gamma_a o R = R o [a]`.
//!
//! `Gamma_a` is extracted greedily as the R-adic expansion of `R o [a]`:
//! Samuel's invariant-ring theorem guarantees membership, so every residual
//! coefficient between consecutive powers of R must vanish, and the
//! extraction asserts exactly that at each step.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::formal_group::{FormalGroup, FormalGroupError};
use crate::series::Series;
use crate::zq::ZqElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CondenseError {
    #[error("W is not a group of roots of unity: {0}")]
    NotAGroup(String),
    #[error("|W| = {0} is divisible by p")]
    OrderNotPrimeToP(usize),
    #[error("residual escapes the subring generated by R at degree {degree}")]
    NotInSubring { degree: usize },
    #[error(transparent)]
    Group(#[from] FormalGroupError),
}

/// A validated condensation: the group W, its order d, the norm series R of
/// Weierstrass degree d, and R's leading unit (the product of W).
pub struct CondensationSetup {
    group: FormalGroup,
    w_units: Vec<ZqElement>,
    d: usize,
    r_series: Series,
    lead_unit: ZqElement,
}

/// Build the norm series `R = prod_(w in W) [w](T)` and validate the setup:
/// W must be a multiplicatively closed set of Teichmuller units of order
/// prime to p, and every [w] is obtained from the group's endomorphism
/// solver.
pub fn norm_series(
    group: FormalGroup,
    w_units: Vec<ZqElement>,
) -> Result<CondensationSetup, CondenseError> {
    let wide = group.frobenius_series().ring().clone();
    let d = w_units.len();
    if d == 0 {
        return Err(CondenseError::NotAGroup("W is empty".into()));
    }
    if (d as u64) % wide.p() == 0 {
        return Err(CondenseError::OrderNotPrimeToP(d));
    }
    if d >= group.frobenius_series().series().prec_t() {
        return Err(CondenseError::NotAGroup(format!(
            "|W| = {d} reaches past the truncation order, the norm series cannot be expressed"
        )));
    }
    let q = wide.q();
    for w in &w_units {
        assert!(w.ring() == &wide, "W must live in the construction ring");
        if w.pow_big(&q) != *w {
            return Err(CondenseError::NotAGroup(format!(
                "{w} is not a Teichmuller unit"
            )));
        }
        if !w.pow_u64(d as u64).is_one() {
            return Err(CondenseError::NotAGroup(format!(
                "{w} does not satisfy w^{d} = 1"
            )));
        }
    }
    for a in &w_units {
        for b in &w_units {
            let prod = a.clone() * b.clone();
            if !w_units.contains(&prod) {
                return Err(CondenseError::NotAGroup(format!(
                    "product {a} * {b} = {prod} escapes W"
                )));
            }
        }
    }

    let mut r_series: Option<Series> = None;
    for w in &w_units {
        let endo = group.endomorphism(w)?;
        r_series = Some(match r_series {
            None => endo,
            Some(acc) => acc.mul(&endo),
        });
    }
    let r_series = r_series.expect("W is nonempty");

    let mut lead_unit = group.stamp_ring().one();
    for w in &w_units {
        lead_unit = lead_unit * w.restamp(group.stamp_ring());
    }
    debug_assert_eq!(r_series.weierstrass_degree(), Some(d));
    debug_assert_eq!(*r_series.coeff(d), lead_unit);

    Ok(CondensationSetup {
        group,
        w_units,
        d,
        r_series,
        lead_unit,
    })
}

impl CondensationSetup {
    pub fn group(&self) -> &FormalGroup {
        &self.group
    }

    pub fn w_units(&self) -> &[ZqElement] {
        &self.w_units
    }

    /// |W|, the condensation degree.
    pub fn degree(&self) -> usize {
        self.d
    }

    /// The norm series R, of Weierstrass degree d with leading unit prod(W).
    pub fn r_series(&self) -> &Series {
        &self.r_series
    }

    pub fn lead_unit(&self) -> &ZqElement {
        &self.lead_unit
    }

    /// The condensed series `Gamma_a`: the unique solution of
    /// `Gamma_a o R = R o [a]`, stamped at `floor(M / d)` T-digits since each
    /// extracted coefficient consumes d input degrees.
    ///
    /// `a` must be fixed by the twist Frobenius so that [a] exists.
    pub fn condense(&self, a: &ZqElement) -> Result<Series, CondenseError> {
        let endo = self.group.endomorphism(a)?;
        let target = self.r_series.compose(&endo).expect("[a] vanishes at 0");
        self.expand_in_r(&target)
    }

    /// Greedy R-adic expansion of an arbitrary series: the unique Gamma with
    /// `Gamma o R = target` when the target lies in the subring generated by
    /// R, and `NotInSubring` at the first escaping degree otherwise.
    pub fn expand_in_r(&self, target: &Series) -> Result<Series, CondenseError> {
        let ring = self.group.stamp_ring().clone();
        let m = target.prec_t().min(self.r_series.prec_t());
        let gamma_len = m / self.d;
        let mut gamma = Series::zero(&ring, gamma_len.max(1));
        let mut residual = target.truncate(m);
        let mut r_pow = Series::monomial(&ring.one(), 0, m);
        let mut pivot = ring.one();
        for k in 1..gamma_len {
            r_pow = r_pow.mul(&self.r_series);
            pivot = pivot * self.lead_unit.clone();
            let kd = k * self.d;
            let coeff = residual
                .coeff(kd)
                .div_exact(&pivot)
                .expect("leading unit is invertible");
            gamma.set_coeff(k, coeff.clone());
            residual = residual.sub(&r_pow.scalar_mul(&coeff));
            // Samuel's theorem turned into a runtime check: everything below
            // the next power of R must now be gone
            let limit = ((k + 1) * self.d).min(m);
            for degree in 0..limit {
                if !residual.coeff(degree).is_zero() {
                    return Err(CondenseError::NotInSubring { degree });
                }
            }
        }
        Ok(gamma)
    }
}

/// One named law check inside a condensation report.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LawCheck {
    pub name: String,
    pub ok: bool,
}

/// Exact verification of the condensed-family laws on a sample set:
/// composition (`Gamma_a o Gamma_b = Gamma_ab`), derivatives
/// (`Gamma_a'(0) = a^d`), and derivative-determines-series (equal a^d forces
/// equal series).
#[derive(Debug, Clone)]
pub struct CondensationReport {
    pub checks: Vec<LawCheck>,
}

impl CondensationReport {
    pub fn all_ok(&self) -> bool {
        self.checks.iter().all(|c| c.ok)
    }
}

pub fn verify_condensation_laws(
    setup: &CondensationSetup,
    samples: &[ZqElement],
) -> Result<CondensationReport, CondenseError> {
    let mut checks = Vec::new();
    let mut gammas: BTreeMap<String, Series> = BTreeMap::new();
    for a in samples {
        gammas.insert(a.label(), setup.condense(a)?);
    }
    let d = setup.degree() as u64;
    let stamp = setup.group().stamp_ring().clone();
    for a in samples {
        let gamma = &gammas[&a.label()];
        let expected = a.restamp(&stamp).pow_u64(d);
        checks.push(LawCheck {
            name: format!("gamma_{}'(0) = {}^{}", a.label(), a.label(), d),
            ok: *gamma.derivative_at_zero() == expected,
        });
    }
    for a in samples {
        for b in samples {
            let ab = a.clone() * b.clone();
            let gamma_ab = setup.condense(&ab)?;
            let ga = &gammas[&a.label()];
            let gb = &gammas[&b.label()];
            let composed = ga.compose(gb).expect("gamma vanishes at 0");
            checks.push(LawCheck {
                name: format!("gamma_{} o gamma_{} = gamma_{}", a.label(), b.label(), ab.label()),
                ok: composed.first_difference(&gamma_ab).is_none(),
            });
        }
    }
    for a in samples {
        for b in samples {
            if a.label() >= b.label() {
                continue;
            }
            let a_pow = a.restamp(&stamp).pow_u64(d);
            let b_pow = b.restamp(&stamp).pow_u64(d);
            if a_pow == b_pow {
                checks.push(LawCheck {
                    name: format!(
                        "{}^{d} = {}^{d} forces gamma_{} = gamma_{}",
                        a.label(),
                        b.label(),
                        a.label(),
                        b.label()
                    ),
                    ok: gammas[&a.label()] == gammas[&b.label()],
                });
            }
        }
    }
    Ok(CondensationReport { checks })
}
