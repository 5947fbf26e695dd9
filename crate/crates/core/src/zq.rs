//! Exact arithmetic in the ring of integers of the unramified extension of
//! degree `f` of the p-adic numbers, computed modulo `p^N`.
//!
//! Elements are polynomial residues modulo a monic degree-`f` polynomial that
//! is irreducible mod `p`. The precision model is zealous with a fixed cap:
//! every element of a [`Ring`] carries exactly `N` p-adic digits, operations
//! never silently lose digits, and division by `p` is a separate operation
//! that fails on non-divisible inputs.
//!
//! Invariants:
//! - `coeffs` has length `f`, every entry reduced into `[0, p^N)`
//! - `valuation` is an integer in `[0, N]`, with `N` meaning "zero to
//!   working precision"
//! - the Frobenius is the unique ring endomorphism lifting `y -> y^p`

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, OnceLock};

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

/// Errors from ring construction and element-level operations.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ZqError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeZero,
    #[error("precision must be at least 1")]
    PrecisionZero,
    #[error("p^N = {0}^{1} exceeds the supported coefficient range (must fit in 127 bits)")]
    PrecisionTooLarge(u64, u32),
    #[error("modulus must be monic of degree f = {expected}, got degree {got}")]
    BadModulusDegree { expected: usize, got: usize },
    #[error("modulus is not irreducible modulo p")]
    ReducibleModulus,
    #[error("cannot invert: element has positive valuation")]
    NonUnit,
    #[error("element is not divisible by p^{0}")]
    NotDivisible(u32),
}

struct RingInner {
    p: u64,
    f: usize,
    prec: u32,
    /// Little-endian modulus coefficients, length f+1, leading entry 1,
    /// all entries reduced mod p^N.
    modulus: Vec<BigUint>,
    p_big: BigUint,
    p_pow: BigUint,
    /// Image of the polynomial generator under the Frobenius lift,
    /// computed on first use by Hensel lifting.
    frob_image: OnceLock<Vec<BigUint>>,
}

/// A fixed-precision unramified coefficient ring `O_E mod p^N`.
///
/// Cheap to clone (shared behind an `Arc`); two rings compare equal when
/// their `(p, f, N, modulus)` data agree, regardless of provenance.
#[derive(Clone)]
pub struct Ring(Arc<RingInner>);

impl PartialEq for Ring {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.f == other.0.f
                && self.0.prec == other.0.prec
                && self.0.modulus == other.0.modulus)
    }
}
impl Eq for Ring {}

impl fmt::Debug for Ring {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "Ring(p={}, f={}, N={})", self.0.p, self.0.f, self.0.prec)
    }
}

impl Ring {
    /// Build a ring from an explicit monic modulus, given little-endian with
    /// signed integer coefficients (reduced into the ring on construction).
    pub fn new(p: u64, f: usize, modulus: &[i64], prec: u32) -> Result<Ring, ZqError> {
        if !is_prime_u64(p) {
            return Err(ZqError::NotPrime(p));
        }
        if f == 0 {
            return Err(ZqError::DegreeZero);
        }
        if prec == 0 {
            return Err(ZqError::PrecisionZero);
        }
        let p_big = BigUint::from(p);
        let p_pow = p_big.pow(prec);
        if p_pow.bits() > 127 {
            return Err(ZqError::PrecisionTooLarge(p, prec));
        }
        if modulus.len() != f + 1 || modulus[f] != 1 {
            return Err(ZqError::BadModulusDegree {
                expected: f,
                got: modulus.len().saturating_sub(1),
            });
        }
        let mod_residue: Vec<u64> = modulus.iter().map(|&c| reduce_i64(c, p)).collect();
        if !is_irreducible_mod_p(&mod_residue, p) {
            return Err(ZqError::ReducibleModulus);
        }
        let modulus_big = modulus
            .iter()
            .map(|&c| reduce_i64_big(c, &p_pow))
            .collect();
        Ok(Ring(Arc::new(RingInner {
            p,
            f,
            prec,
            modulus: modulus_big,
            p_big,
            p_pow,
            frob_image: OnceLock::new(),
        })))
    }

    /// Build the unramified ring of degree `f` with a canonical modulus: the
    /// lexicographically smallest monic irreducible polynomial of degree `f`
    /// over the prime field (coefficients compared from the top down).
    pub fn unramified(p: u64, f: usize, prec: u32) -> Result<Ring, ZqError> {
        if !is_prime_u64(p) {
            return Err(ZqError::NotPrime(p));
        }
        if f == 0 {
            return Err(ZqError::DegreeZero);
        }
        if f == 1 {
            return Ring::new(p, 1, &[0, 1], prec);
        }
        let mut coeffs = vec![0i64; f + 1];
        coeffs[f] = 1;
        loop {
            let residues: Vec<u64> = coeffs.iter().map(|&c| c as u64).collect();
            if is_irreducible_mod_p(&residues, p) {
                return Ring::new(p, f, &coeffs, prec);
            }
            // counter over the f low coefficients, most significant first
            let mut pos = f - 1;
            loop {
                coeffs[pos] += 1;
                if (coeffs[pos] as u64) < p {
                    break;
                }
                coeffs[pos] = 0;
                if pos == 0 {
                    unreachable!("no irreducible polynomial of degree {f} over F_{p}");
                }
                pos -= 1;
            }
        }
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn degree(&self) -> usize {
        self.0.f
    }

    /// The p-adic precision N.
    pub fn precision(&self) -> u32 {
        self.0.prec
    }

    /// Residue cardinality q = p^f.
    pub fn q(&self) -> BigUint {
        self.0.p_big.pow(self.0.f as u32)
    }

    pub fn p_pow(&self) -> &BigUint {
        &self.0.p_pow
    }

    /// Little-endian modulus coefficients (length f+1, monic).
    pub fn modulus(&self) -> &[BigUint] {
        &self.0.modulus
    }

    /// The same ring at a lower precision. Narrowing only: widening would
    /// fabricate digits. Panics if `prec` exceeds the current precision.
    pub fn with_precision(&self, prec: u32) -> Ring {
        assert!(
            prec >= 1 && prec <= self.0.prec,
            "with_precision({prec}) out of range 1..={}",
            self.0.prec
        );
        if prec == self.0.prec {
            return self.clone();
        }
        let p_pow = self.0.p_big.pow(prec);
        let modulus = self.0.modulus.iter().map(|c| c % &p_pow).collect();
        Ring(Arc::new(RingInner {
            p: self.0.p,
            f: self.0.f,
            prec,
            modulus,
            p_big: self.0.p_big.clone(),
            p_pow,
            frob_image: OnceLock::new(),
        }))
    }

    /// The residue ring, i.e. precision 1.
    pub fn residue_ring(&self) -> Ring {
        self.with_precision(1)
    }

    pub fn zero(&self) -> ZqElement {
        ZqElement {
            ring: self.clone(),
            coeffs: vec![BigUint::zero(); self.0.f],
        }
    }

    pub fn one(&self) -> ZqElement {
        self.integer(1)
    }

    pub fn integer(&self, n: i64) -> ZqElement {
        let mut coeffs = vec![BigUint::zero(); self.0.f];
        coeffs[0] = reduce_i64_big(n, &self.0.p_pow);
        ZqElement {
            ring: self.clone(),
            coeffs,
        }
    }

    /// Element from little-endian signed coefficients on the power basis.
    pub fn element(&self, coeffs: &[i64]) -> ZqElement {
        assert!(coeffs.len() <= self.0.f, "too many coefficients for degree {}", self.0.f);
        let mut out = vec![BigUint::zero(); self.0.f];
        for (i, &c) in coeffs.iter().enumerate() {
            out[i] = reduce_i64_big(c, &self.0.p_pow);
        }
        ZqElement {
            ring: self.clone(),
            coeffs: out,
        }
    }

    /// Element from little-endian unsigned big coefficients.
    pub fn element_from_biguints(&self, coeffs: &[BigUint]) -> ZqElement {
        assert!(coeffs.len() <= self.0.f, "too many coefficients for degree {}", self.0.f);
        let mut out = vec![BigUint::zero(); self.0.f];
        for (i, c) in coeffs.iter().enumerate() {
            out[i] = c % &self.0.p_pow;
        }
        ZqElement {
            ring: self.clone(),
            coeffs: out,
        }
    }

    /// The class of the polynomial variable.
    pub fn generator(&self) -> ZqElement {
        if self.0.f == 1 {
            // degree-1 modulus x + c: the class of x is -c
            return self.zero() - self.element_from_biguints(&[self.0.modulus[0].clone()]);
        }
        let mut coeffs = vec![BigUint::zero(); self.0.f];
        coeffs[1] = BigUint::one();
        ZqElement {
            ring: self.clone(),
            coeffs,
        }
    }

    /// Teichmuller lift of the residue of `r`: the unique element congruent
    /// to `r` mod p that satisfies `t^q = t`, computed by iterating
    /// `x -> x^q` from the lift until stable.
    pub fn teichmuller(&self, r: &ZqElement) -> ZqElement {
        assert!(self == r.ring(), "teichmuller: element from a different ring");
        let q = self.q();
        let mut t = r.clone();
        for _ in 0..=self.0.prec + 1 {
            let next = t.pow_big(&q);
            if next == t {
                return t;
            }
            t = next;
        }
        unreachable!("Teichmuller iteration did not stabilize");
    }

    fn frob_image(&self) -> &Vec<BigUint> {
        self.0.frob_image.get_or_init(|| {
            // Hensel-lift the root of the modulus that starts at x^p mod p.
            // The modulus is separable mod p, so the root is simple and the
            // Newton step converges quadratically.
            let x = self.generator_unchecked();
            let mut r = x.pow_u64(self.0.p);
            let deriv: Vec<ZqElement> = (1..=self.0.f)
                .map(|k| {
                    self.element_from_biguints(&[&self.0.modulus[k] * BigUint::from(k)])
                        .clone()
                })
                .collect();
            for _ in 0..=self.0.prec.ilog2() + 2 {
                let m_r = self.eval_modulus(&r);
                if m_r.is_zero() {
                    break;
                }
                let mut d_r = deriv[self.0.f - 1].clone();
                for k in (0..self.0.f - 1).rev() {
                    d_r = d_r * r.clone() + deriv[k].clone();
                }
                let step = m_r
                    .div_exact(&d_r)
                    .expect("modulus derivative is a unit at a simple root");
                r = r - step;
            }
            debug_assert!(self.eval_modulus(&r).is_zero());
            r.coeffs
        })
    }

    fn generator_unchecked(&self) -> ZqElement {
        if self.0.f == 1 {
            self.zero() - self.element_from_biguints(&[self.0.modulus[0].clone()])
        } else {
            let mut coeffs = vec![BigUint::zero(); self.0.f];
            coeffs[1] = BigUint::one();
            ZqElement {
                ring: self.clone(),
                coeffs,
            }
        }
    }

    fn eval_modulus(&self, x: &ZqElement) -> ZqElement {
        let mut acc = self.one();
        let mut out = self.element_from_biguints(&[self.0.modulus[0].clone()]);
        for k in 1..=self.0.f {
            acc = acc * x.clone();
            out = out + acc.clone() * self.element_from_biguints(&[self.0.modulus[k].clone()]);
        }
        out
    }

    fn reduce_poly(&self, mut raw: Vec<BigUint>) -> Vec<BigUint> {
        // reduce a polynomial of degree < 2f-1 by the monic modulus
        let f = self.0.f;
        for d in (f..raw.len()).rev() {
            let top = std::mem::replace(&mut raw[d], BigUint::zero());
            if top.is_zero() {
                continue;
            }
            for k in 0..f {
                let sub = (&top * &self.0.modulus[k]) % &self.0.p_pow;
                let cur = &raw[d - f + k];
                raw[d - f + k] = if *cur >= sub {
                    cur - &sub
                } else {
                    cur + &self.0.p_pow - &sub
                };
            }
        }
        raw.truncate(f);
        raw
    }
}

/// An element of an unramified ring mod `p^N`: `f` residue coefficients on
/// the power basis of the modulus.
#[derive(Clone, PartialEq, Eq)]
pub struct ZqElement {
    ring: Ring,
    coeffs: Vec<BigUint>,
}

impl ZqElement {
    pub fn ring(&self) -> &Ring {
        &self.ring
    }

    /// Little-endian coefficients on the power basis, each in `[0, p^N)`.
    pub fn coeffs(&self) -> &[BigUint] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(|c| c.is_zero())
    }

    pub fn is_unit(&self) -> bool {
        self.valuation() == 0
    }

    /// The largest k <= N with p^k dividing the element; N for the zero
    /// residue.
    pub fn valuation(&self) -> u32 {
        let n = self.ring.0.prec;
        let p = &self.ring.0.p_big;
        let mut best = n;
        for c in &self.coeffs {
            if c.is_zero() {
                continue;
            }
            let mut v = 0u32;
            let mut rem = c.clone();
            while v < best {
                let (q, r) = num_integer_div_rem(&rem, p);
                if !r.is_zero() {
                    break;
                }
                rem = q;
                v += 1;
            }
            if v < best {
                best = v;
            }
            if best == 0 {
                return 0;
            }
        }
        best
    }

    /// Exact inverse mod p^N. Fails on non-units.
    pub fn invert(&self) -> Result<ZqElement, ZqError> {
        if !self.is_unit() {
            return Err(ZqError::NonUnit);
        }
        // residue-field inverse via a^(q-2), then Newton lifting y <- y(2-ay)
        let ring = &self.ring;
        let q = ring.q();
        let two = ring.integer(2);
        let mut y = if q == BigUint::from(2u32) {
            ring.one()
        } else {
            self.pow_big(&(&q - BigUint::from(2u32)))
        };
        for _ in 0..=ring.0.prec.ilog2() + 2 {
            let prod = self.clone() * y.clone();
            if prod.is_one() {
                return Ok(y);
            }
            y = y.clone() * (two.clone() - prod);
        }
        let check = self.clone() * y.clone();
        debug_assert!(check.is_one(), "inverse lifting failed to converge");
        Ok(y)
    }

    /// Exact division by p^k. The trailing k digits must be zero; the top k
    /// digits of the quotient are zero-filled, which keeps results
    /// deterministic while the caller's guard-digit budget covers the loss.
    pub fn div_exact_p(&self, k: u32) -> Result<ZqElement, ZqError> {
        if k == 0 {
            return Ok(self.clone());
        }
        let pk = self.ring.0.p_big.pow(k);
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            let (q, r) = num_integer_div_rem(c, &pk);
            if !r.is_zero() {
                return Err(ZqError::NotDivisible(k));
            }
            out.push(q);
        }
        Ok(ZqElement {
            ring: self.ring.clone(),
            coeffs: out,
        })
    }

    /// Exact division by an arbitrary nonzero element: strips p^v(other)
    /// from both sides and multiplies by the inverse of the unit part.
    pub fn div_exact(&self, other: &ZqElement) -> Result<ZqElement, ZqError> {
        let v = other.valuation();
        if v >= self.ring.0.prec && other.is_zero() {
            return Err(ZqError::NonUnit);
        }
        let unit = other.div_exact_p(v).expect("valuation strips exactly");
        let reduced = self.div_exact_p(v)?;
        Ok(reduced * unit.invert()?)
    }

    pub fn pow_u64(&self, e: u64) -> ZqElement {
        self.pow_big(&BigUint::from(e))
    }

    pub fn pow_big(&self, e: &BigUint) -> ZqElement {
        let mut base = self.clone();
        let mut acc = self.ring.one();
        let bits = e.bits();
        for i in 0..bits {
            if e.bit(i) {
                acc = acc * base.clone();
            }
            if i + 1 < bits {
                base = base.clone() * base;
            }
        }
        acc
    }

    /// The Frobenius lift: the unique ring endomorphism congruent to
    /// `y -> y^p` mod p. Fixes the prime subring; has order f.
    pub fn frobenius(&self) -> ZqElement {
        if self.ring.0.f == 1 {
            return self.clone();
        }
        let image_coeffs = self.ring.frob_image().clone();
        let image = ZqElement {
            ring: self.ring.clone(),
            coeffs: image_coeffs,
        };
        // evaluate the coefficient polynomial at the Frobenius image of x
        let mut out = self
            .ring
            .element_from_biguints(&[self.coeffs[self.ring.0.f - 1].clone()]);
        for k in (0..self.ring.0.f - 1).rev() {
            out = out * image.clone()
                + self.ring.element_from_biguints(&[self.coeffs[k].clone()]);
        }
        out
    }

    /// The Frobenius lift applied `times` times.
    pub fn frobenius_iter(&self, times: usize) -> ZqElement {
        let mut out = self.clone();
        for _ in 0..times % self.ring.0.f.max(1) {
            out = out.frobenius();
        }
        out
    }

    /// Reduce into a narrower ring (same p, f, modulus). Panics if the target
    /// is not a narrowing of this element's ring.
    pub fn restamp(&self, target: &Ring) -> ZqElement {
        assert!(
            target.0.p == self.ring.0.p
                && target.0.f == self.ring.0.f
                && target.0.prec <= self.ring.0.prec,
            "restamp target is not a narrowing of the source ring"
        );
        target.element_from_biguints(&self.coeffs)
    }

    /// Canonical text form used as a map key and in JSON object keys:
    /// the decimal residue for prime rings, bracketed coefficients otherwise.
    pub fn label(&self) -> String {
        if self.ring.0.f == 1 {
            self.coeffs[0].to_string()
        } else {
            let inner: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
            format!("[{}]", inner.join(","))
        }
    }
}

impl fmt::Debug for ZqElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}", self.label())
    }
}

impl fmt::Display for ZqElement {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(out, "{}", self.label())
    }
}

fn same_ring(a: &ZqElement, b: &ZqElement) {
    assert!(
        a.ring == b.ring,
        "ring spec mismatch: {:?} vs {:?}",
        a.ring,
        b.ring
    );
}

impl Add for ZqElement {
    type Output = ZqElement;
    fn add(self, rhs: ZqElement) -> ZqElement {
        same_ring(&self, &rhs);
        let p_pow = &self.ring.0.p_pow;
        let coeffs = self
            .coeffs
            .iter()
            .zip(rhs.coeffs.iter())
            .map(|(a, b)| {
                let s = a + b;
                if s >= *p_pow {
                    s - p_pow
                } else {
                    s
                }
            })
            .collect();
        ZqElement {
            ring: self.ring,
            coeffs,
        }
    }
}

impl Sub for ZqElement {
    type Output = ZqElement;
    fn sub(self, rhs: ZqElement) -> ZqElement {
        same_ring(&self, &rhs);
        let p_pow = &self.ring.0.p_pow;
        let coeffs = self
            .coeffs
            .iter()
            .zip(rhs.coeffs.iter())
            .map(|(a, b)| {
                if a >= b {
                    a - b
                } else {
                    a + p_pow - b
                }
            })
            .collect();
        ZqElement {
            ring: self.ring,
            coeffs,
        }
    }
}

impl Neg for ZqElement {
    type Output = ZqElement;
    fn neg(self) -> ZqElement {
        let zero = self.ring.zero();
        zero - self
    }
}

impl Mul for ZqElement {
    type Output = ZqElement;
    fn mul(self, rhs: ZqElement) -> ZqElement {
        same_ring(&self, &rhs);
        let f = self.ring.0.f;
        let p_pow = &self.ring.0.p_pow;
        let mut raw = vec![BigUint::zero(); 2 * f - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                raw[i + j] = (&raw[i + j] + a * b) % p_pow;
            }
        }
        let coeffs = self.ring.reduce_poly(raw);
        ZqElement {
            ring: self.ring,
            coeffs,
        }
    }
}

fn num_integer_div_rem(a: &BigUint, b: &BigUint) -> (BigUint, BigUint) {
    (a / b, a % b)
}

fn reduce_i64(c: i64, p: u64) -> u64 {
    c.rem_euclid(p as i64) as u64
}

fn reduce_i64_big(c: i64, p_pow: &BigUint) -> BigUint {
    if c >= 0 {
        BigUint::from(c as u64) % p_pow
    } else {
        let neg = BigUint::from(c.unsigned_abs()) % p_pow;
        if neg.is_zero() {
            neg
        } else {
            p_pow - neg
        }
    }
}

/// Deterministic Miller-Rabin for u64 inputs.
fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == q {
            return true;
        }
        if n.is_multiple_of(q) {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod_u64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod_u64(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod_u64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod_u64(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod_u64(acc, a, m);
        }
        a = mul_mod_u64(a, a, m);
        e >>= 1;
    }
    acc
}

// ---------------------------------------------------------------------------
// residue-field polynomial arithmetic, used only for the irreducibility test
// ---------------------------------------------------------------------------

fn poly_trim(a: &mut Vec<u64>) {
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u64> = a.to_vec();
    let dm = m.len() - 1;
    let lead_inv = pow_mod_u64(m[dm], p - 2, p);
    while r.len() > dm {
        let d = r.len() - 1;
        let c = mul_mod_u64(r[d], lead_inv, p);
        if c != 0 {
            for k in 0..=dm {
                let sub = mul_mod_u64(c, m[k], p);
                let idx = d - dm + k;
                r[idx] = (r[idx] + p - sub) % p;
            }
        }
        r.pop();
        poly_trim(&mut r);
        if r.iter().all(|&x| x == 0) {
            return vec![0];
        }
    }
    poly_trim(&mut r);
    r
}

fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut raw = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            raw[i + j] = (raw[i + j] + mul_mod_u64(x, y, p)) % p;
        }
    }
    poly_rem(&raw, m, p)
}

fn poly_pow_p(base: &[u64], p: u64, m: &[u64]) -> Vec<u64> {
    let mut acc = vec![1u64];
    let mut sq = base.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mul_mod(&acc, &sq, m, p);
        }
        e >>= 1;
        if e > 0 {
            sq = poly_mul_mod(&sq, &sq, m, p);
        }
    }
    acc
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    poly_trim(&mut x);
    poly_trim(&mut y);
    while !(y.len() == 1 && y[0] == 0) {
        let lead_inv = pow_mod_u64(*y.last().unwrap(), p - 2, p);
        let monic: Vec<u64> = y.iter().map(|&c| mul_mod_u64(c, lead_inv, p)).collect();
        let r = poly_rem(&x, &monic, p);
        x = y;
        y = r;
    }
    x
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let n = a.len().max(b.len());
    let mut out = vec![0u64; n];
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out[i] = (x + p - y) % p;
    }
    poly_trim(&mut out);
    out
}

/// Irreducibility over F_p: x^(p^f) = x mod m and, for every prime l | f,
/// gcd(x^(p^(f/l)) - x, m) = 1.
fn is_irreducible_mod_p(modulus: &[u64], p: u64) -> bool {
    let f = modulus.len() - 1;
    if modulus[f] != 1 {
        return false;
    }
    if f == 1 {
        return true;
    }
    let x = vec![0u64, 1];
    // frobenius power chain: powers[j] = x^(p^(j+1)) mod m
    let mut cur = x.clone();
    let mut frob_powers = Vec::with_capacity(f);
    for _ in 0..f {
        cur = poly_pow_p(&cur, p, modulus);
        frob_powers.push(cur.clone());
    }
    if frob_powers[f - 1] != x {
        return false;
    }
    for l in prime_divisors(f) {
        let j = f / l;
        let diff = poly_sub(&frob_powers[j - 1], &x, p);
        let g = poly_gcd(modulus, &diff, p);
        if g.len() > 1 {
            return false;
        }
    }
    true
}

fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z5_3() -> Ring {
        Ring::unramified(5, 1, 3).unwrap()
    }

    #[test]
    fn add_wraps_modulo_p_pow_n() {
        let r = z5_3();
        assert_eq!(r.integer(100) + r.integer(50), r.integer(25));
    }

    #[test]
    fn zero_is_identity() {
        let r = z5_3();
        let x = r.integer(37);
        assert_eq!(x.clone() + r.zero(), x);
    }

    #[test]
    fn modulus_relation_holds() {
        // x^2 + 1 over p=3, N=2: x*x = -1 = 8 mod 9
        let r = Ring::new(3, 2, &[1, 0, 1], 2).unwrap();
        let x = r.generator();
        assert_eq!(x.clone() * x, r.integer(8));
    }

    #[test]
    fn valuation_examples() {
        let r = z5_3();
        assert_eq!(r.integer(50).valuation(), 2);
        assert_eq!(r.zero().valuation(), 3);
        assert_eq!(r.integer(7).valuation(), 0);
    }

    #[test]
    fn invert_examples() {
        let r = z5_3();
        assert_eq!(r.integer(2).invert().unwrap(), r.integer(63));
        assert_eq!(r.one().invert().unwrap(), r.one());
        assert_eq!(r.integer(5).invert(), Err(ZqError::NonUnit));
    }

    #[test]
    fn frobenius_is_identity_on_prime_ring() {
        let r = z5_3();
        let x = r.integer(44);
        assert_eq!(x.frobenius(), x);
    }

    #[test]
    fn frobenius_has_order_f() {
        let r = Ring::new(3, 2, &[1, 0, 1], 4).unwrap();
        let x = r.element(&[7, 5]);
        assert_eq!(x.frobenius().frobenius(), x);
        assert_ne!(x.frobenius(), x);
    }

    #[test]
    fn frobenius_cubes_teichmuller_units() {
        // oracle: Frobenius permutes Teichmuller representatives by t -> t^p
        let r = Ring::new(3, 2, &[1, 0, 1], 2).unwrap();
        let t = r.teichmuller(&(r.generator() + r.one()));
        assert_eq!(t.frobenius(), t.pow_u64(3));
    }

    #[test]
    fn teichmuller_examples() {
        let r = z5_3();
        let t = r.teichmuller(&r.integer(2));
        assert_eq!(t, r.integer(57));
        assert_eq!(r.teichmuller(&r.one()), r.one());
        assert_eq!(r.teichmuller(&r.zero()), r.zero());
    }

    #[test]
    fn div_exact_p_requires_divisibility() {
        let r = z5_3();
        assert_eq!(r.integer(50).div_exact_p(2).unwrap(), r.integer(2));
        assert_eq!(r.integer(7).div_exact_p(1), Err(ZqError::NotDivisible(1)));
    }

    #[test]
    fn rejects_bad_rings() {
        assert_eq!(Ring::unramified(6, 1, 3).unwrap_err(), ZqError::NotPrime(6));
        // x^2 - 1 splits mod 5
        assert_eq!(
            Ring::new(5, 2, &[-1, 0, 1], 3).unwrap_err(),
            ZqError::ReducibleModulus
        );
    }

    #[test]
    fn canonical_modulus_is_deterministic() {
        let a = Ring::unramified(3, 2, 8).unwrap();
        let b = Ring::unramified(3, 2, 8).unwrap();
        assert_eq!(a, b);
        // x^2 + 1 is the first irreducible in the enumeration for p = 3
        assert_eq!(a.modulus()[0], BigUint::from(1u32));
        assert_eq!(a.modulus()[1], BigUint::from(0u32));
    }
}
