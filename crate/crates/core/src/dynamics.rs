//! Non-archimedean dynamical systems over the unit disk: the Lubin
//! logarithm, unique-commutant solving, fixed-point normalization, seed
//! checking for iterate towers, lift-datum verification, and root-valuation
//! profiles through Newton polygons.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use num_traits::One;
use thiserror::Error;

use crate::series::{newton_polygon, LogSeries, Ratio, Series};
use crate::zq::{Ring, ZqElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DynamicsError {
    #[error("series is not stable noninvertible: {0}")]
    NotStable(String),
    #[error("working precision cannot support the request: {0}")]
    PrecisionExhausted(String),
    #[error("no commutant with the requested derivative exists (obstruction at degree {degree})")]
    NoCommutant { degree: usize },
    #[error("no interior fixed point: {0}")]
    NoInteriorFixedPoint(String),
    #[error("truncation too small: iterate degree {needed} reaches past T^{available}")]
    TruncationTooSmall { needed: usize, available: usize },
    #[error("lift datum invalid: {0}")]
    InvalidDatum(String),
}

/// A stable noninvertible series: P(0) = 0 with derivative of valuation in
/// `[1, N)`. The Weierstrass degree is finite for every interesting system;
/// it is stored as an option so that degenerate linear inputs still reach
/// the operations that never consume it (notably the logarithm limit, which
/// is exact at the first iterate for a linear P).
#[derive(Debug, Clone)]
pub struct StableNoninvertible {
    p_series: Series,
    lambda: ZqElement,
    wdeg: Option<usize>,
}

impl StableNoninvertible {
    pub fn new(p_series: Series) -> Result<StableNoninvertible, DynamicsError> {
        if !p_series.constant_term_is_zero() {
            return Err(DynamicsError::NotStable("P(0) must vanish".into()));
        }
        if p_series.prec_t() < 2 {
            return Err(DynamicsError::NotStable("truncation too short".into()));
        }
        let lambda = p_series.derivative_at_zero().clone();
        let v = lambda.valuation();
        let n = p_series.ring().precision();
        if v == 0 || v >= n {
            return Err(DynamicsError::NotStable(
                "P'(0) must be a nonzero non-unit at working precision".into(),
            ));
        }
        let wdeg = p_series.weierstrass_degree();
        Ok(StableNoninvertible {
            p_series,
            lambda,
            wdeg,
        })
    }

    pub fn series(&self) -> &Series {
        &self.p_series
    }

    /// P'(0).
    pub fn lambda(&self) -> &ZqElement {
        &self.lambda
    }

    pub fn weierstrass_degree(&self) -> Option<usize> {
        self.wdeg
    }

    pub fn ring(&self) -> &Ring {
        self.p_series.ring()
    }
}

/// Result of the Lubin logarithm limit: the series and the iterate index at
/// which two consecutive normalized iterates agreed at the requested
/// effective precision.
#[derive(Debug, Clone)]
pub struct LubinLog {
    pub log: LogSeries,
    pub stop_index: usize,
}

/// The Lubin logarithm `L = lim P^(o n) / P'(0)^n`: the unique series
/// `T + O(T^2)` with `L o P = P'(0) * L`, holomorphic on the open unit disk.
///
/// Iterates until two consecutive normalized iterates agree on all stored
/// coefficients at `eff_prec`; the ring must carry enough digits for that
/// comparison to stay decidable, otherwise the iteration reports exhaustion.
pub fn lubin_log(p: &StableNoninvertible, eff_prec: u32) -> Result<LubinLog, DynamicsError> {
    let ring = p.ring().clone();
    let v_lambda = p.lambda().valuation();
    let mut iterate = p.series().clone();
    let mut lambda_pow = p.lambda().clone();
    let mut prev = normalized_iterate(&iterate, &lambda_pow, 1)?;
    let mut n = 1usize;
    loop {
        // the next normalization divides by lambda^(n+1)
        if (n as u32 + 1) * v_lambda + eff_prec > ring.precision() {
            return Err(DynamicsError::PrecisionExhausted(format!(
                "normalizing the {}-th iterate needs more than {} digits",
                n + 1,
                ring.precision()
            )));
        }
        iterate = p
            .series()
            .compose(&iterate)
            .expect("iterates vanish at 0");
        lambda_pow = lambda_pow * p.lambda().clone();
        n += 1;
        let current = normalized_iterate(&iterate, &lambda_pow, n)?;
        match prev.eq_at(&current, eff_prec) {
            Some(true) => {
                return Ok(LubinLog {
                    log: current,
                    stop_index: n,
                })
            }
            Some(false) => prev = current,
            None => {
                return Err(DynamicsError::PrecisionExhausted(
                    "effective-precision comparison undecidable at working precision".into(),
                ))
            }
        }
    }
}

fn normalized_iterate(
    iterate: &Series,
    lambda_pow: &ZqElement,
    n: usize,
) -> Result<LogSeries, DynamicsError> {
    let v = lambda_pow.valuation();
    let unit = lambda_pow.div_exact_p(v).expect("valuation strips exactly");
    if !unit.is_unit() {
        return Err(DynamicsError::PrecisionExhausted(format!(
            "lambda^{n} is indistinguishable from 0 at working precision"
        )));
    }
    Ok(LogSeries::from_quotient(iterate, v, &unit))
}

/// The unique series with prescribed derivative at 0 commuting with P, when
/// it exists: g(0) = 0, g'(0) = c, g o P = P o g. Solved degree by degree;
/// the degree-n obstruction divides by `lambda - lambda^n` or reports that
/// no commutant exists.
///
/// Each of the M-2 divisions costs val(lambda) digits, so the result comes
/// back stamped at `N - (M-2)*val(lambda)` in a narrowed ring.
pub fn commutant(p: &StableNoninvertible, c: &ZqElement) -> Result<Series, DynamicsError> {
    let ring = p.ring().clone();
    assert!(c.ring() == &ring, "derivative target from a different ring");
    let m = p.series().prec_t();
    let lambda = p.lambda();
    let stamp = solver_stamp(&ring, m, lambda.valuation())?;
    let mut g = Series::monomial(c, 1, m);
    for degree in 2..m {
        let cut = degree + 1;
        let partial = g.truncate(cut);
        let p_cut = p.series().truncate(cut);
        let lhs = partial.compose(&p_cut).expect("P vanishes at 0");
        let rhs = p_cut.compose(&partial).expect("partial vanishes at 0");
        let obstruction = rhs.coeff(degree).clone() - lhs.coeff(degree).clone();
        // g_n * (lambda^n - lambda) = obstruction
        let denom = lambda.pow_u64(degree as u64) - lambda.clone();
        let solved = obstruction
            .div_exact(&denom)
            .map_err(|_| DynamicsError::NoCommutant { degree })?;
        g = g.add(&Series::monomial(&solved, degree, m));
    }
    Ok(g.restamp(&ring.with_precision(stamp)))
}

/// Post-loss precision for a degree-by-degree solver dividing by valuation
/// `v` once per degree from 2 to M-1.
pub(crate) fn solver_stamp(ring: &Ring, m: usize, v: u32) -> Result<u32, DynamicsError> {
    let loss = (m.saturating_sub(2) as u32) * v;
    if loss >= ring.precision() {
        return Err(DynamicsError::PrecisionExhausted(format!(
            "solving {} degrees at derivative valuation {v} needs more than {} digits",
            m.saturating_sub(2),
            ring.precision()
        )));
    }
    Ok(ring.precision() - loss)
}

/// Locate the interior fixed point of Q and shift it to the origin.
///
/// Succeeds when Q(0) = 0 (returning a = 0) or when the Newton polygon of
/// Q - T opens with a length-1 segment of negative slope, in which case the
/// unique root of that slope is Hensel-lifted and `Qshifted(T) = Q(T+a) - a`.
/// Several candidate fixed points (a longer first segment) are refused
/// rather than silently chosen.
pub fn normalize_fixed_point(q: &Series) -> Result<(ZqElement, Series), DynamicsError> {
    let ring = q.ring().clone();
    if q.coeff(0).valuation() == 0 {
        return Err(DynamicsError::NoInteriorFixedPoint(
            "Q(0) is a unit, no fixed point in the maximal ideal".into(),
        ));
    }
    if q.coeff(0).is_zero() {
        return Ok((ring.zero(), q.clone()));
    }
    let h = q.sub(&Series::identity(&ring, q.prec_t()));
    let polygon = newton_polygon(&h)
        .map_err(|_| DynamicsError::NoInteriorFixedPoint("Q - T vanishes at precision".into()))?;
    let first = polygon
        .segments
        .first()
        .ok_or_else(|| DynamicsError::NoInteriorFixedPoint("Q - T is a monomial".into()))?;
    if !first.slope.is_negative() {
        return Err(DynamicsError::NoInteriorFixedPoint(
            "first Newton slope is not negative".into(),
        ));
    }
    if first.length != 1 {
        return Err(DynamicsError::NoInteriorFixedPoint(format!(
            "first Newton segment has length {}, several fixed points share the slope",
            first.length
        )));
    }
    // slope -s with s = v(h_0) - v(h_1) >= 1; substitute T = p^s u and
    // Hensel-lift the unit root of the rescaled polynomial
    let v0 = h.coeff(0).valuation();
    let v1 = h.coeff(1).valuation();
    let s = v0 - v1;
    let rescaled = rescale(&h, s, v1);
    let u = hensel_unit_root(&rescaled)?;
    let a = u * ring.integer(ring.p() as i64).pow_u64(s as u64);
    debug_assert!((q.eval(&a) - a.clone()).valuation() + v1 >= ring.precision());
    let shifted = q.shift_variable(&a).sub(&Series::monomial(&a, 0, q.prec_t()));
    Ok((a, shifted))
}

/// h(p^s u) / p^(v0) with v0 = s + v1: exact on every stored coefficient by
/// the polygon's first-segment property.
fn rescale(h: &Series, s: u32, v1: u32) -> Series {
    let ring = h.ring().clone();
    let m = h.prec_t();
    let mut coeffs = Vec::with_capacity(m);
    let v0 = s + v1;
    for k in 0..m {
        let shift = (k as u32) * s;
        let c = h.coeff(k);
        let coeff = if shift >= v0 {
            c.clone() * ring.integer(ring.p() as i64).pow_u64((shift - v0) as u64)
        } else {
            c.div_exact_p(v0 - shift)
                .expect("polygon guarantees divisibility below the first vertex")
        };
        coeffs.push(coeff);
    }
    Series::new(&ring, coeffs)
}

/// Newton iteration for the unique unit root of a polynomial whose reduction
/// mod p is linear in the unit range: simple root, quadratic convergence.
fn hensel_unit_root(h: &Series) -> Result<ZqElement, DynamicsError> {
    let ring = h.ring().clone();
    let deriv = h.derivative();
    let c1_inv = h
        .coeff(1)
        .invert()
        .map_err(|_| DynamicsError::NoInteriorFixedPoint("rescaled linear term not a unit".into()))?;
    let mut root = -(h.coeff(0).clone() * c1_inv);
    for _ in 0..=ring.precision().ilog2() + 2 {
        let value = h.eval(&root);
        if value.is_zero() {
            return Ok(root);
        }
        let slope = deriv.eval(&root);
        let step = value
            .div_exact(&slope)
            .map_err(|_| DynamicsError::NoInteriorFixedPoint("derivative degenerated".into()))?;
        root = root - step;
    }
    if h.eval(&root).is_zero() {
        Ok(root)
    } else {
        Err(DynamicsError::PrecisionExhausted(
            "Hensel iteration did not reach a root at working precision".into(),
        ))
    }
}

/// True iff P(0) = 0 and P = T^d mod p at the stored truncation, with d a
/// power of the residue cardinality q.
pub fn check_phi_iterate_seed(p: &Series, d: usize) -> bool {
    if !p.constant_term_is_zero() {
        return false;
    }
    if !is_power_of(d, &p.ring().q()) {
        return false;
    }
    let reduced = p.reduce_mod_p();
    let target = Series::monomial(&reduced.ring().one(), d, p.prec_t());
    reduced == target
}

fn is_power_of(d: usize, q: &BigUint) -> bool {
    if d == 0 {
        return false;
    }
    let mut acc = q.clone();
    let d_big = BigUint::from(d);
    if d_big.is_one() {
        return true;
    }
    while acc <= d_big {
        if acc == d_big {
            return true;
        }
        acc *= q;
    }
    false
}

/// A candidate lift datum: a noninvertible P together with a labeled family
/// of invertible series and a (possibly partial) composition table on the
/// labels.
#[derive(Debug, Clone)]
pub struct LiftDatum {
    p_series: StableNoninvertible,
    members: BTreeMap<String, Series>,
    table: BTreeMap<(String, String), String>,
}

impl LiftDatum {
    pub fn new(
        p_series: StableNoninvertible,
        members: BTreeMap<String, Series>,
        table: BTreeMap<(String, String), String>,
    ) -> Result<LiftDatum, DynamicsError> {
        for (label, f) in &members {
            if f.ring() != p_series.ring() {
                return Err(DynamicsError::InvalidDatum(format!(
                    "member {label} lives in a different ring"
                )));
            }
            if !f.constant_term_is_zero() {
                return Err(DynamicsError::InvalidDatum(format!(
                    "member {label} has a nonzero constant term"
                )));
            }
            if !f.derivative_at_zero().is_unit() {
                return Err(DynamicsError::InvalidDatum(format!(
                    "member {label} is not invertible"
                )));
            }
        }
        for ((a, b), c) in &table {
            for l in [a, b, c] {
                if !members.contains_key(l) {
                    return Err(DynamicsError::InvalidDatum(format!(
                        "table references unknown label {l}"
                    )));
                }
            }
        }
        Ok(LiftDatum {
            p_series,
            members,
            table,
        })
    }

    pub fn p_series(&self) -> &StableNoninvertible {
        &self.p_series
    }

    pub fn members(&self) -> &BTreeMap<String, Series> {
        &self.members
    }

    pub fn table(&self) -> &BTreeMap<(String, String), String> {
        &self.table
    }
}

/// Outcome of one exact series comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub ok: bool,
    pub first_failing_degree: Option<usize>,
}

/// Per-label and per-pair verification of the lift-datum relations, plus the
/// derivative character eta(g) = F_g'(0) as raw data.
#[derive(Debug, Clone)]
pub struct LiftDatumReport {
    pub commutes_with_p: BTreeMap<String, CheckResult>,
    pub table_respected: BTreeMap<(String, String), CheckResult>,
    pub eta: BTreeMap<String, ZqElement>,
}

impl LiftDatumReport {
    pub fn all_ok(&self) -> bool {
        self.commutes_with_p.values().all(|c| c.ok)
            && self.table_respected.values().all(|c| c.ok)
    }
}

/// Check `F_g o P = P o F_g` for every member and `F_a o F_b = F_(table)`
/// for every table entry, as exact series equalities at shared truncation.
pub fn verify_lift_datum(datum: &LiftDatum) -> LiftDatumReport {
    let p = datum.p_series.series();
    let mut commutes = BTreeMap::new();
    let mut eta = BTreeMap::new();
    for (label, f) in &datum.members {
        let lhs = f.compose(p).expect("P vanishes at 0");
        let rhs = p.compose(f).expect("member vanishes at 0");
        commutes.insert(label.clone(), compare(&lhs, &rhs));
        eta.insert(label.clone(), f.derivative_at_zero().clone());
    }
    let mut table_ok = BTreeMap::new();
    for ((a, b), c) in &datum.table {
        let lhs = datum.members[a]
            .compose(&datum.members[b])
            .expect("members vanish at 0");
        table_ok.insert((a.clone(), b.clone()), compare(&lhs, &datum.members[c]));
    }
    LiftDatumReport {
        commutes_with_p: commutes,
        table_respected: table_ok,
        eta,
    }
}

fn compare(lhs: &Series, rhs: &Series) -> CheckResult {
    let first = lhs.first_difference(rhs);
    CheckResult {
        ok: first.is_none(),
        first_failing_degree: first,
    }
}

/// Valuations (with multiplicity) of the nonzero roots of the n-th iterate,
/// read off the Newton polygon of `P^(o n) / T`: the negative-slope segments
/// as (slope, horizontal length) pairs.
pub fn root_valuation_profile(
    p: &StableNoninvertible,
    n: usize,
) -> Result<Vec<(Ratio, usize)>, DynamicsError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let m = p.series().prec_t();
    let wdeg = p.wdeg.ok_or_else(|| {
        DynamicsError::NotStable("root profile needs a finite Weierstrass degree".into())
    })?;
    let needed = wdeg.checked_pow(n as u32).unwrap_or(usize::MAX);
    if needed >= m {
        return Err(DynamicsError::TruncationTooSmall {
            needed,
            available: m - 1,
        });
    }
    let iterate = p.series().iterate(n).expect("P vanishes at 0");
    let divided = Series::new(p.ring(), iterate.coeffs()[1..].to_vec());
    let polygon = newton_polygon(&divided)
        .map_err(|_| DynamicsError::NotStable("iterate vanished at precision".into()))?;
    Ok(polygon
        .segments
        .iter()
        .filter(|s| s.slope.is_negative())
        .map(|s| (s.slope, s.length))
        .collect())
}
