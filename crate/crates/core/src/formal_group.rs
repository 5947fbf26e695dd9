//! Lubin-Tate formal group laws, classical and Frobenius-twisted.
//!
//! Given a Frobenius series f = pi*T + ... congruent to T^q mod p, the unique
//! formal group law S with `S^phi(f(X), f(Y)) = f(S(X, Y))` is solved one
//! homogeneous degree at a time. Each degree-n block satisfies
//! `pi*c - pi^n*phi(c) = known`; in the untwisted case this is a plain
//! division by `pi - pi^n`, in the twisted case the block is a fixed point of
//! the contraction `c <- (known + pi^n*phi(c)) / pi`.
//!
//! Precision contract: the solver divides by pi once per homogeneous degree,
//! so with an unramified base the total loss is at most M-1 digits. The
//! caller's ring must carry `N + M - 1` digits; results come back stamped at
//! N in a narrowed ring.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use thiserror::Error;

use crate::series::{BiSeries, Series};
use crate::zq::{Ring, ZqElement};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormalGroupError {
    #[error("frobenius series invalid: {0}")]
    InvalidFrobeniusSeries(String),
    #[error("degree-{degree} obstruction is not divisible as the Lubin-Tate lemma guarantees")]
    DivisibilityFailure { degree: usize },
    #[error("guard digits exhausted: ring carries {have} digits, need more than {need}")]
    PrecisionExhausted { have: u32, need: u32 },
    #[error("endomorphism argument is not fixed by the twist Frobenius")]
    NotBaseFixed,
    #[error("solved endomorphism failed the group-homomorphism check")]
    EndoCheckFailed,
}

/// Which per-degree solver the constructor uses.
///
/// `Direct` divides each block by `pi - pi^n` and is complete for trivial
/// twist (and for twisted input whose data is fixed by the twist Frobenius,
/// where uniqueness forces the solution to be fixed as well). `Contraction`
/// iterates the twisted fixed-point map and is complete in general.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverPath {
    Direct,
    Contraction,
}

/// A series f eligible for the Lubin-Tate construction: f(0) = 0,
/// f'(0) = pi in the maximal ideal, f = T^q mod p, where q is the residue
/// cardinality of the subring fixed by the twist Frobenius `phi_q`.
///
/// `twist = h` encodes the unramified step E/F of degree h: `phi_q` is the
/// p-power Frobenius lift applied `f_ring / h` times, so h = 1 is the
/// classical untwisted case.
#[derive(Debug, Clone)]
pub struct FrobeniusSeries {
    f: Series,
    pi: ZqElement,
    q: BigUint,
    twist: usize,
    frob_power: usize,
}

impl FrobeniusSeries {
    pub fn new(f: Series, twist: usize) -> Result<FrobeniusSeries, FormalGroupError> {
        let ring = f.ring().clone();
        let err = |msg: &str| Err(FormalGroupError::InvalidFrobeniusSeries(msg.into()));
        if twist == 0 || !ring.degree().is_multiple_of(twist) {
            return err("twist must divide the ring degree");
        }
        if !f.constant_term_is_zero() {
            return err("f(0) must vanish");
        }
        let pi = f.derivative_at_zero().clone();
        let v = pi.valuation();
        if v == 0 || v >= ring.precision() {
            return err("f'(0) must be a nonzero non-unit at working precision");
        }
        let frob_power = ring.degree() / twist;
        let q_big = BigUint::from(ring.p()).pow(frob_power as u32);
        let q_usize: usize = match u32::try_from(&q_big) {
            Ok(q) if (q as usize) < f.prec_t() => q as usize,
            _ => return err("truncation order must exceed the residue cardinality q"),
        };
        let reduced = f.reduce_mod_p();
        let residue_ring = reduced.ring().clone();
        let tq = Series::monomial(&residue_ring.one(), q_usize, f.prec_t());
        if reduced != tq {
            return err("f must reduce to T^q mod p");
        }
        Ok(FrobeniusSeries {
            f,
            pi,
            q: q_big,
            twist,
            frob_power,
        })
    }

    pub fn series(&self) -> &Series {
        &self.f
    }

    pub fn pi(&self) -> &ZqElement {
        &self.pi
    }

    /// Residue cardinality of the base subring fixed by the twist Frobenius.
    pub fn q(&self) -> &BigUint {
        &self.q
    }

    pub fn twist(&self) -> usize {
        self.twist
    }

    /// Number of p-power Frobenius applications realizing `phi_q`.
    pub fn frob_power(&self) -> usize {
        self.frob_power
    }

    pub fn ring(&self) -> &Ring {
        self.f.ring()
    }

    /// The twist Frobenius on an element.
    pub fn twist_frobenius(&self, x: &ZqElement) -> ZqElement {
        x.frobenius_iter(self.frob_power)
    }

    pub fn is_base_fixed(&self, x: &ZqElement) -> bool {
        self.twist_frobenius(x) == *x
    }
}

/// A constructed formal group law together with its Frobenius series and a
/// thread-safe endomorphism memo. The law and every endomorphism are stamped
/// at the post-loss precision `N = W - (M - 1)`.
pub struct FormalGroup {
    frob: FrobeniusSeries,
    law: BiSeries,
    stamp_ring: Ring,
    path: SolverPath,
    endo_cache: Mutex<BTreeMap<String, Series>>,
}

impl Clone for FormalGroup {
    fn clone(&self) -> Self {
        FormalGroup {
            frob: self.frob.clone(),
            law: self.law.clone(),
            stamp_ring: self.stamp_ring.clone(),
            path: self.path,
            endo_cache: Mutex::new(self.endo_cache.lock().unwrap().clone()),
        }
    }
}

/// Axiom check report; residual valuations equal the stamped precision when
/// an axiom holds exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupAxiomReport {
    pub commutative: bool,
    pub associative: bool,
    pub unital: bool,
    pub commutative_residual_valuation: u32,
    pub associative_residual_valuation: u32,
    pub unital_residual_valuation: u32,
    /// First failing coefficient index per axiom, as (total degree, X-exp).
    pub first_failure: Option<(String, usize, usize)>,
}

impl GroupAxiomReport {
    pub fn all_ok(&self) -> bool {
        self.commutative && self.associative && self.unital
    }
}

/// Build the unique formal group law for `frob` at total degree `prec_d`,
/// choosing the per-degree solver automatically: direct division for trivial
/// twist, contraction otherwise.
pub fn build_formal_group(
    frob: &FrobeniusSeries,
    prec_d: usize,
) -> Result<FormalGroup, FormalGroupError> {
    let path = if frob.twist() == 1 {
        SolverPath::Direct
    } else {
        SolverPath::Contraction
    };
    build_formal_group_via(frob, prec_d, path)
}

/// Build with an explicit solver path (the two paths agree bit-for-bit on
/// base-fixed data; this entry point exists so that agreement is checkable).
pub fn build_formal_group_via(
    frob: &FrobeniusSeries,
    prec_d: usize,
    path: SolverPath,
) -> Result<FormalGroup, FormalGroupError> {
    let ring = frob.ring().clone();
    // endomorphisms are solved out to the T-truncation of f and stamped in
    // the same ring as the law, so the budget covers whichever is longer
    let stamp = stamped_precision(&ring, prec_d.max(frob.series().prec_t()))?;
    let stamp_ring = ring.with_precision(stamp);

    let f_x = biseries_in_x(frob.series(), prec_d);
    let f_y = biseries_in_y(frob.series(), prec_d);

    let mut law = BiSeries::x_plus_y(&ring, prec_d);
    for degree in 2..prec_d {
        // degree-n part of S^phi(f(X), f(Y)) - f(S), everything truncated
        // just past the degree being solved
        let cut = degree + 1;
        let partial = law.truncate(cut);
        let lhs = partial
            .frobenius(frob.frob_power())
            .eval_bi(&f_x.truncate(cut), &f_y.truncate(cut))
            .expect("arguments vanish at the origin");
        let rhs = BiSeries::compose_outer(frob.series(), &partial)
            .expect("law has no constant term");
        let known = lhs.sub(&rhs).row(degree).to_vec();
        let solved = solve_block(frob, &known, degree, path)?;
        law.set_row(degree, solved);
    }

    Ok(FormalGroup {
        frob: frob.clone(),
        law: law.restamp(&stamp_ring),
        stamp_ring,
        path,
        endo_cache: Mutex::new(BTreeMap::new()),
    })
}

fn stamped_precision(ring: &Ring, prec_d: usize) -> Result<u32, FormalGroupError> {
    let have = ring.precision();
    let need = prec_d as u32 - 1;
    if have <= need {
        return Err(FormalGroupError::PrecisionExhausted { have, need });
    }
    Ok(have - need)
}

/// Solve `pi*c - pi^n*phi(c) = known` coefficientwise on a homogeneous block.
fn solve_block(
    frob: &FrobeniusSeries,
    known: &[ZqElement],
    degree: usize,
    path: SolverPath,
) -> Result<Vec<ZqElement>, FormalGroupError> {
    let pi = frob.pi();
    let pi_n = pi.pow_u64(degree as u64);
    match path {
        SolverPath::Direct => {
            let denom = pi.clone() - pi_n;
            known
                .iter()
                .map(|d| {
                    d.div_exact(&denom)
                        .map_err(|_| FormalGroupError::DivisibilityFailure { degree })
                })
                .collect()
        }
        SolverPath::Contraction => known
            .iter()
            .map(|d| contract(frob, d, &pi_n, degree))
            .collect(),
    }
}

/// Fixed point of `c <- (known + pi^n*phi(c)) / pi`. The update gains at
/// least one digit of agreement per round, so a fixed point is reached well
/// inside the iteration cap whenever the input is valid.
fn contract(
    frob: &FrobeniusSeries,
    known: &ZqElement,
    pi_n: &ZqElement,
    degree: usize,
) -> Result<ZqElement, FormalGroupError> {
    let ring = frob.ring();
    let pi = frob.pi();
    let mut c = ring.zero();
    let cap = 2 * ring.precision() + 4;
    for _ in 0..cap {
        let next = (known.clone() + pi_n.clone() * frob.twist_frobenius(&c))
            .div_exact(pi)
            .map_err(|_| FormalGroupError::DivisibilityFailure { degree })?;
        if next == c {
            return Ok(c);
        }
        c = next;
    }
    Err(FormalGroupError::PrecisionExhausted {
        have: ring.precision(),
        need: cap,
    })
}

fn biseries_in_x(s: &Series, prec_d: usize) -> BiSeries {
    let mut out = BiSeries::zero(s.ring(), prec_d);
    for k in 0..s.prec_t().min(prec_d) {
        out.set_coeff(k, 0, s.coeff(k).clone());
    }
    out
}

fn biseries_in_y(s: &Series, prec_d: usize) -> BiSeries {
    let mut out = BiSeries::zero(s.ring(), prec_d);
    for k in 0..s.prec_t().min(prec_d) {
        out.set_coeff(0, k, s.coeff(k).clone());
    }
    out
}

impl FormalGroup {
    pub fn frobenius_series(&self) -> &FrobeniusSeries {
        &self.frob
    }

    /// The group law, stamped at the post-loss precision.
    pub fn law(&self) -> &BiSeries {
        &self.law
    }

    /// The ring the law and endomorphisms are stamped in.
    pub fn stamp_ring(&self) -> &Ring {
        &self.stamp_ring
    }

    pub fn solver_path(&self) -> SolverPath {
        self.path
    }

    /// Residual of `S^phi(f(X), f(Y)) - f(S)` at stamped precision; zero for
    /// a valid construction.
    pub fn functional_equation_residual(&self) -> BiSeries {
        let prec_d = self.law.prec_d();
        let f = self.frob.series().restamp(&self.stamp_ring);
        let f_x = biseries_in_x(&f, prec_d);
        let f_y = biseries_in_y(&f, prec_d);
        let lhs = self
            .law
            .frobenius(self.frob.frob_power())
            .eval_bi(&f_x, &f_y)
            .expect("arguments vanish at the origin");
        let rhs = BiSeries::compose_outer(&f, &self.law).expect("no constant term");
        lhs.sub(&rhs)
    }

    /// The unique endomorphism series `[a] = a*T + O(T^2)` commuting with f
    /// through the twist, for `a` fixed by the twist Frobenius. Results are
    /// memoized; the same key always yields the identical series.
    pub fn endomorphism(&self, a: &ZqElement) -> Result<Series, FormalGroupError> {
        assert!(
            a.ring() == self.frob.ring(),
            "endomorphism argument must live in the construction ring"
        );
        if !self.frob.is_base_fixed(a) {
            return Err(FormalGroupError::NotBaseFixed);
        }
        let key = a.label();
        if let Some(hit) = self.endo_cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let endo = self.solve_endomorphism(a)?;
        self.check_endo_is_homomorphic(&endo)?;
        self.endo_cache
            .lock()
            .unwrap()
            .entry(key)
            .or_insert_with(|| endo.clone());
        Ok(endo)
    }

    fn solve_endomorphism(&self, a: &ZqElement) -> Result<Series, FormalGroupError> {
        let f = self.frob.series();
        let m = f.prec_t();
        let mut endo = Series::monomial(a, 1, m);
        for degree in 2..m {
            let cut = degree + 1;
            let partial = endo.truncate(cut);
            let lhs = partial
                .frobenius(self.frob.frob_power())
                .compose(&f.truncate(cut))
                .expect("f vanishes at 0");
            let rhs = f.compose(&partial).expect("partial vanishes at 0");
            let known = lhs.sub(&rhs).coeff(degree).clone();
            let solved = solve_block(&self.frob, &[known], degree, self.path)?;
            endo = endo.add(&Series::monomial(&solved[0], degree, m));
        }
        Ok(endo.restamp(&self.stamp_ring))
    }

    /// `[a](S(X,Y)) = S([a](X), [a](Y))` at stamped truncation.
    fn check_endo_is_homomorphic(&self, endo: &Series) -> Result<(), FormalGroupError> {
        let prec_d = self.law.prec_d();
        let lhs = BiSeries::compose_outer(endo, &self.law).expect("no constant term");
        let ax = biseries_in_x(endo, prec_d);
        let ay = biseries_in_y(endo, prec_d);
        let rhs = self.law.eval_bi(&ax, &ay).expect("arguments vanish");
        if lhs != rhs {
            return Err(FormalGroupError::EndoCheckFailed);
        }
        Ok(())
    }

    /// Check commutativity, associativity and unitality of the law as exact
    /// identities at the stamped truncation.
    pub fn verify_group_axioms(&self) -> GroupAxiomReport {
        verify_group_axioms(&self.law)
    }

    /// Snapshot of the endomorphism memo, keyed by element label.
    pub fn cached_endomorphisms(&self) -> BTreeMap<String, Series> {
        self.endo_cache.lock().unwrap().clone()
    }
}

/// Axiom check for any candidate law (see [`FormalGroup::verify_group_axioms`]).
pub fn verify_group_axioms(law: &BiSeries) -> GroupAxiomReport {
    let ring = law.ring().clone();
    let n = ring.precision();
    let prec_d = law.prec_d();

    let comm_residual = law.sub(&law.transpose());
    let commutative = comm_residual.is_zero();

    let x = crate::series::TriSeries::variable(&ring, 0, prec_d);
    let y = crate::series::TriSeries::variable(&ring, 1, prec_d);
    let z = crate::series::TriSeries::variable(&ring, 2, prec_d);
    let (associative, assoc_val, assoc_fail) = match (
        law.eval_tri(&x, &y).and_then(|sxy| law.eval_tri(&sxy, &z)),
        law.eval_tri(&y, &z).and_then(|syz| law.eval_tri(&x, &syz)),
    ) {
        (Ok(left), Ok(right)) => {
            if left == right {
                (true, n, None)
            } else {
                let mut min_val = n;
                let mut fail = None;
                'outer: for d in 0..prec_d {
                    for i in 0..=d {
                        for j in 0..=d - i {
                            let diff =
                                left.coeff(i, j, d - i - j).clone() - right.coeff(i, j, d - i - j).clone();
                            let v = diff.valuation();
                            if v < n && fail.is_none() {
                                fail = Some(("associative".to_string(), d, i));
                            }
                            min_val = min_val.min(v);
                            if fail.is_some() && min_val == 0 {
                                break 'outer;
                            }
                        }
                    }
                }
                (false, min_val, fail)
            }
        }
        _ => (false, 0, Some(("associative".to_string(), 0, 0))),
    };

    let t = Series::identity(&ring, prec_d);
    let unital_x = law
        .specialize_y_zero()
        .first_difference(&t)
        .map(|k| ("unital".to_string(), k, k));
    let unital_y = law
        .specialize_x_zero()
        .first_difference(&t)
        .map(|k| ("unital".to_string(), k, 0));
    let unital = unital_x.is_none() && unital_y.is_none();

    let comm_fail = comm_residual
        .first_difference(&BiSeries::zero(&ring, prec_d))
        .map(|(d, i)| ("commutative".to_string(), d, i));

    GroupAxiomReport {
        commutative,
        associative,
        unital,
        commutative_residual_valuation: comm_residual.min_valuation(),
        associative_residual_valuation: assoc_val,
        unital_residual_valuation: if unital { n } else { 0 },
        first_failure: comm_fail.or(assoc_fail).or(unital_x).or(unital_y),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::Series;

    /// (1+T)^e - 1 over `ring`, truncated at `m`.
    fn binomial_series(ring: &Ring, e: u64, m: usize) -> Series {
        let one = Series::monomial(&ring.one(), 0, m);
        let base = one.add(&Series::identity(ring, m));
        let mut acc = one.clone();
        for _ in 0..e {
            acc = acc.mul(&base);
        }
        acc.sub(&one)
    }

    fn multiplicative_group(p: u64, n: u32, m: usize) -> FormalGroup {
        let ring = Ring::unramified(p, 1, n + m as u32 - 1).unwrap();
        let f = binomial_series(&ring, p, m);
        let frob = FrobeniusSeries::new(f, 1).unwrap();
        build_formal_group(&frob, m).unwrap()
    }

    #[test]
    fn multiplicative_law_is_x_plus_y_plus_xy() {
        let g = multiplicative_group(3, 6, 10);
        let r = g.stamp_ring().clone();
        let mut expected = BiSeries::x_plus_y(&r, 10);
        expected.set_coeff(1, 1, r.one());
        assert_eq!(*g.law(), expected);
        assert!(g.functional_equation_residual().is_zero());
    }

    #[test]
    fn multiplicative_endomorphisms_are_binomials() {
        let g = multiplicative_group(3, 6, 10);
        let wide = g.frobenius_series().ring().clone();
        let stamped = g.stamp_ring().clone();
        for a in [1i64, 2, 5] {
            let endo = g.endomorphism(&wide.integer(a)).unwrap();
            let expected = binomial_series(&stamped, a as u64, 10);
            assert_eq!(endo, expected, "endomorphism [{a}]");
        }
        // [pi] is f itself
        let endo_p = g.endomorphism(&wide.integer(3)).unwrap();
        assert_eq!(
            endo_p,
            g.frobenius_series().series().restamp(&stamped)
        );
    }

    #[test]
    fn additive_shape_of_low_degree() {
        // f = pT + T^p: law starts X + Y, residual vanishes, coefficients
        // integral by construction
        let p = 3u64;
        let m = 8usize;
        let ring = Ring::unramified(p, 1, 6 + m as u32 - 1).unwrap();
        let mut f = Series::zero(&ring, m);
        f = f.add(&Series::monomial(&ring.integer(p as i64), 1, m));
        f = f.add(&Series::monomial(&ring.one(), p as usize, m));
        let frob = FrobeniusSeries::new(f, 1).unwrap();
        let g = build_formal_group(&frob, m).unwrap();
        assert_eq!(*g.law().coeff(1, 0), g.stamp_ring().one());
        assert_eq!(*g.law().coeff(0, 1), g.stamp_ring().one());
        assert!(g.functional_equation_residual().is_zero());
        assert!(g.verify_group_axioms().all_ok());
    }

    #[test]
    fn twisted_construction_solves_functional_equation() {
        // unramified quadratic ring over p=3, f = 3w T + T^3 with w a
        // Teichmuller generator; twist h = 2, q = 3
        let m = 8usize;
        let ring = Ring::unramified(3, 2, 4 + m as u32 - 1).unwrap();
        let w = ring.teichmuller(&(ring.generator() + ring.one()));
        let pi = ring.integer(3) * w;
        let mut f = Series::monomial(&pi, 1, m);
        f = f.add(&Series::monomial(&ring.one(), 3, m));
        let frob = FrobeniusSeries::new(f, 2).unwrap();
        assert_eq!(frob.frob_power(), 1);
        let g = build_formal_group(&frob, m).unwrap();
        assert!(g.functional_equation_residual().is_zero());
        assert!(g.verify_group_axioms().all_ok());
    }

    #[test]
    fn direct_and_contraction_paths_agree_on_base_fixed_data() {
        // base-fixed data inside the quadratic ring: f = 3T + T^3, twist 2
        let m = 8usize;
        let ring = Ring::unramified(3, 2, 4 + m as u32 - 1).unwrap();
        let mut f = Series::monomial(&ring.integer(3), 1, m);
        f = f.add(&Series::monomial(&ring.one(), 3, m));
        let frob = FrobeniusSeries::new(f, 2).unwrap();
        let via_direct = build_formal_group_via(&frob, m, SolverPath::Direct).unwrap();
        let via_contraction =
            build_formal_group_via(&frob, m, SolverPath::Contraction).unwrap();
        assert_eq!(via_direct.law(), via_contraction.law());
        let a = ring.integer(2);
        assert_eq!(
            via_direct.endomorphism(&a).unwrap(),
            via_contraction.endomorphism(&a).unwrap()
        );
    }

    #[test]
    fn quartic_ring_with_two_step_frobenius_twist() {
        // unramified quartic ring, twist 2: q = 9 and phi_q is the p-power
        // Frobenius applied twice; pi = 3g for a full Teichmuller generator
        // g makes the data genuinely unfixed under the twist
        let m = 12usize;
        let ring = Ring::unramified(3, 4, 3 + m as u32 - 1).unwrap();
        let g_unit = ring.teichmuller(&(ring.generator() + ring.one()));
        assert_ne!(g_unit.frobenius_iter(2), g_unit, "generator is not base-fixed");
        let pi = ring.integer(3) * g_unit.clone();
        let mut f = Series::monomial(&pi, 1, m);
        f = f.add(&Series::monomial(&ring.one(), 9, m));
        let frob = FrobeniusSeries::new(f, 2).unwrap();
        assert_eq!(frob.frob_power(), 2);
        assert_eq!(frob.q(), &num_bigint::BigUint::from(9u32));
        let group = build_formal_group(&frob, m).unwrap();
        assert!(group.functional_equation_residual().is_zero());
        assert!(group.verify_group_axioms().all_ok());

        // the base subring contains the order-8 Teichmuller units: take
        // a = g^10 (order 8), check it is accepted and multiplicative
        let a = g_unit.pow_u64(10);
        assert!(frob.is_base_fixed(&a));
        let ea = group.endomorphism(&a).unwrap();
        let e_sq = group.endomorphism(&(a.clone() * a.clone())).unwrap();
        assert_eq!(ea.compose(&ea).unwrap(), e_sq);
        // while g itself is rejected
        assert_eq!(group.endomorphism(&g_unit), Err(FormalGroupError::NotBaseFixed));
    }

    #[test]
    fn endomorphism_rejects_unfixed_elements() {
        let m = 6usize;
        let ring = Ring::unramified(3, 2, 4 + m as u32 - 1).unwrap();
        let w = ring.teichmuller(&(ring.generator() + ring.one()));
        let pi = ring.integer(3) * w.clone();
        let mut f = Series::monomial(&pi, 1, m);
        f = f.add(&Series::monomial(&ring.one(), 3, m));
        let frob = FrobeniusSeries::new(f, 2).unwrap();
        let g = build_formal_group(&frob, m).unwrap();
        assert_eq!(g.endomorphism(&w), Err(FormalGroupError::NotBaseFixed));
    }

    #[test]
    fn axiom_checker_flags_non_associative_law() {
        let ring = Ring::unramified(3, 1, 4).unwrap();
        let mut law = BiSeries::x_plus_y(&ring, 7);
        law.set_coeff(2, 2, ring.one());
        let report = verify_group_axioms(&law);
        assert!(report.commutative);
        assert!(report.unital);
        assert!(!report.associative);
        assert!(report.first_failure.is_some());
    }

    #[test]
    fn degree_two_window_is_vacuously_a_group() {
        let ring = Ring::unramified(3, 1, 4).unwrap();
        let law = BiSeries::x_plus_y(&ring, 2);
        assert!(verify_group_axioms(&law).all_ok());
    }

    #[test]
    fn endomorphism_ring_laws_hold() {
        let g = multiplicative_group(5, 5, 9);
        let wide = g.frobenius_series().ring().clone();
        let a = wide.integer(2);
        let b = wide.integer(3);
        let ea = g.endomorphism(&a).unwrap();
        let eb = g.endomorphism(&b).unwrap();
        let eab = g.endomorphism(&(a.clone() * b.clone())).unwrap();
        assert_eq!(ea.compose(&eb).unwrap(), eab);
        let sum = g.endomorphism(&(a.clone() + b.clone())).unwrap();
        assert_eq!(g.law().eval_series(&ea, &eb).unwrap(), sum);
    }

    #[test]
    fn pi_endomorphism_reduces_to_frobenius_power() {
        let g = multiplicative_group(3, 6, 10);
        let wide = g.frobenius_series().ring().clone();
        let endo_p = g.endomorphism(&wide.integer(3)).unwrap();
        let reduced = endo_p.reduce_mod_p();
        let rr = reduced.ring().clone();
        assert_eq!(reduced, Series::monomial(&rr.one(), 3, 10));
    }

    #[test]
    fn endomorphism_memo_is_thread_safe() {
        let g = std::sync::Arc::new(multiplicative_group(3, 5, 8));
        let wide = g.frobenius_series().ring().clone();
        let mut handles = Vec::new();
        for _ in 0..4 {
            let g = g.clone();
            let a = wide.integer(2);
            handles.push(std::thread::spawn(move || g.endomorphism(&a).unwrap()));
        }
        let results: Vec<Series> = handles.into_iter().map(|h| h.join().unwrap()).collect();
        for r in &results[1..] {
            assert_eq!(r, &results[0]);
        }
        assert_eq!(g.cached_endomorphisms().len(), 1);
    }

    #[test]
    fn deterministic_rebuild() {
        let a = multiplicative_group(3, 5, 8);
        let b = multiplicative_group(3, 5, 8);
        assert_eq!(a.law(), b.law());
    }

    #[test]
    fn deep_ramification_breaks_divisibility() {
        // f'(0) = 9 has valuation 2, but the degree-2 obstruction is only
        // guaranteed divisible by p, so the construction must refuse
        let ring = Ring::unramified(3, 1, 12).unwrap();
        let m = 6;
        let mut f = Series::monomial(&ring.integer(9), 1, m);
        f = f.add(&Series::monomial(&ring.one(), 3, m));
        let frob = FrobeniusSeries::new(f, 1).unwrap();
        assert!(matches!(
            build_formal_group(&frob, m),
            Err(FormalGroupError::DivisibilityFailure { .. })
        ));
    }

    #[test]
    fn guard_budget_is_enforced() {
        let ring = Ring::unramified(3, 1, 4).unwrap();
        let f = binomial_series(&ring, 3, 8);
        let frob = FrobeniusSeries::new(f, 1).unwrap();
        assert!(matches!(
            build_formal_group(&frob, 8),
            Err(FormalGroupError::PrecisionExhausted { .. })
        ));
    }
}
