//! Exact arithmetic over `Z/p^e` and over coefficient vectors of mixed-modulus
//! abelian p-groups.
//!
//! Everything downstream (structure-constant products, nilpotency chains, the
//! flow series) reduces to the operations here. Values are always stored in
//! canonical form: coefficient `i` lies in `[0, p^{e_i})`, so equality and
//! hashing are representation equality.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Maximum number of additive generators in any supported group shape.
pub const MAX_RANK: usize = 4;

/// Largest prime accepted by [`Shape::new`].
pub const MAX_PRIME: u64 = 101;

/// Additive group shape `C_{p^{e_1}} x ... x C_{p^{e_r}}` of total order `p^4`.
///
/// Supported exponent patterns: `[1,1,1,1]`, `[3,1]`, `[2,2]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Shape {
    p: u64,
    rank: usize,
    exponents: [u32; MAX_RANK],
    moduli: [u64; MAX_RANK],
}

/// Element of a [`Shape`]: the coefficient vector of `sum_i c_i x_i` with each
/// `c_i` reduced into `[0, p^{e_i})`. Unused slots stay zero so derived
/// equality and ordering are sound.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Elem {
    rank: usize,
    coeffs: [u64; MAX_RANK],
}

impl std::fmt::Debug for Elem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rank {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", self.coeffs[i])?;
        }
        write!(f, "]")
    }
}

impl std::fmt::Debug for Shape {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Shape(p={}, exponents={:?})", self.p, self.exponents())
    }
}

impl Shape {
    pub fn new(p: u64, exponents: &[u32]) -> Result<Self> {
        Self::with_max_prime(p, exponents, MAX_PRIME)
    }

    pub fn with_max_prime(p: u64, exponents: &[u32], max_prime: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if p > max_prime {
            return Err(Error::PrimeTooLarge(p, max_prime));
        }
        let supported: [&[u32]; 3] = [&[1, 1, 1, 1], &[3, 1], &[2, 2]];
        if !supported.contains(&exponents) {
            return Err(Error::UnsupportedShape(exponents.to_vec()));
        }
        let rank = exponents.len();
        let mut exps = [0u32; MAX_RANK];
        let mut moduli = [1u64; MAX_RANK];
        for (i, &e) in exponents.iter().enumerate() {
            exps[i] = e;
            moduli[i] = p.pow(e);
        }
        Ok(Self { p, rank, exponents: exps, moduli })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents[..self.rank]
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.exponents[i]
    }

    pub fn modulus(&self, i: usize) -> u64 {
        self.moduli[i]
    }

    /// Largest coefficient modulus, `p^{max e_i}`. Scalars for series
    /// coefficients live in this ring; reducing them per-coordinate is
    /// consistent because every `p^{e_i}` divides it.
    pub fn ambient_modulus(&self) -> u64 {
        (0..self.rank).map(|i| self.moduli[i]).max().unwrap()
    }

    /// Total group order, always `p^4` for the supported shapes.
    pub fn order(&self) -> u64 {
        (0..self.rank).map(|i| self.moduli[i]).product()
    }

    pub fn zero(&self) -> Elem {
        Elem { rank: self.rank, coeffs: [0; MAX_RANK] }
    }

    /// The `i`-th additive generator (0-based).
    pub fn basis(&self, i: usize) -> Elem {
        let mut coeffs = [0u64; MAX_RANK];
        coeffs[i] = 1;
        Elem { rank: self.rank, coeffs }
    }

    /// Element from coefficients already reduced into canonical range; the
    /// allocation-free path for hot loops.
    pub(crate) fn elem_from_reduced(&self, coeffs: [u64; MAX_RANK]) -> Elem {
        debug_assert!((0..self.rank).all(|i| coeffs[i] < self.moduli[i]));
        debug_assert!((self.rank..MAX_RANK).all(|i| coeffs[i] == 0));
        Elem { rank: self.rank, coeffs }
    }

    /// Builds an element from arbitrary integer coefficients, reducing each
    /// into canonical range.
    pub fn elem(&self, coeffs: &[i64]) -> Result<Elem> {
        if coeffs.len() != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: coeffs.len() });
        }
        let mut c = [0u64; MAX_RANK];
        for i in 0..self.rank {
            c[i] = (coeffs[i] as i128).rem_euclid(self.moduli[i] as i128) as u64;
        }
        Ok(Elem { rank: self.rank, coeffs: c })
    }

    fn check_rank(&self, e: &Elem) -> Result<()> {
        if e.rank != self.rank {
            return Err(Error::RankMismatch { expected: self.rank, got: e.rank });
        }
        Ok(())
    }

    /// Componentwise sum reduced mod `p^{e_i}`.
    pub fn add(&self, u: Elem, v: Elem) -> Elem {
        debug_assert_eq!(u.rank, self.rank);
        debug_assert_eq!(v.rank, self.rank);
        let mut c = [0u64; MAX_RANK];
        for i in 0..self.rank {
            let s = u.coeffs[i] + v.coeffs[i];
            c[i] = if s >= self.moduli[i] { s - self.moduli[i] } else { s };
        }
        Elem { rank: self.rank, coeffs: c }
    }

    /// Checked variant of [`Shape::add`] for foreign input.
    pub fn try_add(&self, u: Elem, v: Elem) -> Result<Elem> {
        self.check_rank(&u)?;
        self.check_rank(&v)?;
        Ok(self.add(u, v))
    }

    pub fn neg(&self, u: Elem) -> Elem {
        let mut c = [0u64; MAX_RANK];
        for i in 0..self.rank {
            c[i] = if u.coeffs[i] == 0 { 0 } else { self.moduli[i] - u.coeffs[i] };
        }
        Elem { rank: self.rank, coeffs: c }
    }

    pub fn sub(&self, u: Elem, v: Elem) -> Elem {
        self.add(u, self.neg(v))
    }

    /// `k * u` with `k` an arbitrary (possibly negative) integer scalar,
    /// reduced per coordinate.
    pub fn scalar_mul(&self, k: i128, u: Elem) -> Elem {
        let mut c = [0u64; MAX_RANK];
        for i in 0..self.rank {
            let m = self.moduli[i] as i128;
            let s = k.rem_euclid(m) as u128;
            c[i] = ((s * u.coeffs[i] as u128) % self.moduli[i] as u128) as u64;
        }
        Elem { rank: self.rank, coeffs: c }
    }

    /// Additive order of an element: smallest n > 0 with n*u = 0 (a p-power).
    pub fn elem_order(&self, u: Elem) -> u64 {
        let mut ord = 1u64;
        for i in 0..self.rank {
            let c = u.coeffs[i];
            let o = if c == 0 {
                1
            } else {
                self.moduli[i] / gcd(c, self.moduli[i])
            };
            ord = ord.max(o);
        }
        ord
    }

    /// Mixed-radix rank of an element, coefficient 0 most significant.
    /// Bijective with `[0, order())`; used to index materialized tables.
    pub fn elem_index(&self, u: Elem) -> u64 {
        let mut idx = 0u64;
        for i in 0..self.rank {
            idx = idx * self.moduli[i] + u.coeffs[i];
        }
        idx
    }

    pub fn elem_at(&self, mut idx: u64) -> Elem {
        let mut c = [0u64; MAX_RANK];
        for i in (0..self.rank).rev() {
            c[i] = idx % self.moduli[i];
            idx /= self.moduli[i];
        }
        Elem { rank: self.rank, coeffs: c }
    }

    /// All elements in index order.
    pub fn elements(&self) -> impl Iterator<Item = Elem> + '_ {
        (0..self.order()).map(move |i| self.elem_at(i))
    }

    pub fn random_elem(&self, rng: &mut SplitMix64) -> Elem {
        let mut c = [0u64; MAX_RANK];
        for i in 0..self.rank {
            c[i] = rng.below(self.moduli[i]);
        }
        Elem { rank: self.rank, coeffs: c }
    }
}

impl Elem {
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn coeff(&self, i: usize) -> u64 {
        self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs[..self.rank]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs[..self.rank].iter().all(|&c| c == 0)
    }
}

pub fn gcd(a: u64, b: u64) -> u64 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn pow_mod(base: u64, mut exp: u64, m: u64) -> u64 {
    let mut b = (base % m) as u128;
    let mut acc = 1u128 % m as u128;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * b % m as u128;
        }
        b = b * b % m as u128;
        exp >>= 1;
    }
    acc as u64
}

/// Inverse of `a` mod `m` via extended Euclid. Errors unless gcd(a, m) = 1.
pub fn mod_inv(a: u64, m: u64) -> Result<u64> {
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return Err(Error::NotInvertible(a % m, m));
    }
    Ok(t0.rem_euclid(m as i128) as u64)
}

/// Table of `1/n! mod m` for `n = 0..=k_max`, `m` a power of the prime `p`.
///
/// Requires `k_max < p`; otherwise some `n!` is divisible by `p` and the
/// flow series does not exist at this prime (prime too small for the
/// nilpotency index).
pub fn factorial_inv_table(k_max: u64, m: u64, p: u64) -> Result<Vec<u64>> {
    if k_max >= p {
        return Err(Error::FactorialRange { k: k_max, p });
    }
    let mut table = Vec::with_capacity(k_max as usize + 1);
    let mut fact = 1u64;
    for n in 0..=k_max {
        if n > 0 {
            fact = (fact as u128 * n as u128 % m as u128) as u64;
        }
        table.push(mod_inv(fact, m)?);
    }
    Ok(table)
}

/// Smallest positive primitive root mod `p`.
pub fn primitive_root(p: u64) -> u64 {
    let phi = p - 1;
    let mut factors = Vec::new();
    let mut n = phi;
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            factors.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        factors.push(n);
    }
    'outer: for g in 2..p {
        for &q in &factors {
            if pow_mod(g, phi / q, p) == 1 {
                continue 'outer;
            }
        }
        return g;
    }
    unreachable!("every prime has a primitive root");
}

/// Teichmuller-style lift of `g` into `Z/p^e`: the unique unit congruent to
/// `g` mod `p` whose multiplicative order divides `p - 1`. Computed as
/// `g^(p^(e-1)) mod p^e`.
pub fn teichmuller_lift(g: u64, p: u64, e: u32) -> u64 {
    let m = p.pow(e);
    pow_mod(g, p.pow(e - 1), m)
}
