//! Finite-field arithmetic GF(p^m) at desk scale (q ≤ 2^16).
//!
//! Elements are canonical integers v = Σ coeffᵢ pⁱ over the polynomial
//! basis. Arithmetic works directly on base-p digit vectors with an
//! explicit reduction polynomial, so codewords are reproducible
//! byte-exactly from the printed field description. Nothing here is a
//! hot path; clarity over tables.

use core::fmt;

/// Errors from field and code construction or use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GfError {
    NotPrime(u32),
    BadParameter(&'static str),
    NotIrreducible,
    ZeroInverse,
    /// Exhaustive enumeration would exceed the desk-scale budget.
    BudgetExceeded {
        needed: u128,
        budget: u128,
    },
}

impl fmt::Display for GfError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GfError::NotPrime(p) => write!(f, "{p} is not prime"),
            GfError::BadParameter(what) => write!(f, "bad parameter: {what}"),
            GfError::NotIrreducible => write!(f, "reduction polynomial is reducible"),
            GfError::ZeroInverse => write!(f, "zero has no multiplicative inverse"),
            GfError::BudgetExceeded { needed, budget } => {
                write!(f, "enumeration needs {needed} codewords, budget {budget}")
            }
        }
    }
}

impl std::error::Error for GfError {}

/// Fixed reduction polynomials for GF(2^m), coefficient bitmask with bit
/// i for x^i. Standard primitive polynomials; validated irreducible at
/// construction.
const GF2_REDUCTION: [(u32, u32); 15] = [
    (2, 0b111),
    (3, 0b1011),
    (4, 0b1_0011),
    (5, 0b10_0101),
    (6, 0b100_0011),
    (7, 0b1000_1001),
    (8, 0b1_0001_1101),
    (9, 0b10_0001_0001),
    (10, 0b100_0000_1001),
    (11, 0b1000_0000_0101),
    (12, 0b1_0000_0101_0011),
    (13, 0b10_0000_0001_1011),
    (14, 0b100_0100_0100_0011),
    (15, 0b1000_0000_0000_0011),
    (16, 0b1_0001_0000_0000_1011),
];

/// GF(p^m), p prime, q = p^m ≤ 2^16.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Field {
    p: u32,
    m: u32,
    q: u64,
    /// Monic reduction polynomial digits, low to high, length m+1.
    /// Empty for m = 1.
    reduction: Vec<u32>,
}

impl Field {
    /// Prime field or extension field with the crate's documented default
    /// reduction polynomial (the fixed table for p = 2; otherwise the
    /// lexicographically smallest monic irreducible of degree m).
    pub fn new(p: u32, m: u32) -> Result<Self, GfError> {
        if m == 0 {
            return Err(GfError::BadParameter("extension degree m must be >= 1"));
        }
        check_prime(p)?;
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= 1 << 16)
            .ok_or(GfError::BadParameter("q = p^m must be <= 2^16"))?;
        if m == 1 {
            return Ok(Field {
                p,
                m,
                q,
                reduction: Vec::new(),
            });
        }
        if p == 2 {
            let mask = GF2_REDUCTION
                .iter()
                .find(|&&(deg, _)| deg == m)
                .map(|&(_, mask)| mask)
                .expect("m <= 16 guaranteed by the q bound");
            let digits: Vec<u32> = (0..=m).map(|i| (mask >> i) & 1).collect();
            return Self::with_reduction(p, m, &digits);
        }
        // Deterministic search: smallest monic polynomial (by canonical
        // integer value of its sub-leading digits) that is irreducible.
        let lead = (p as u64).pow(m);
        for low in 0..lead {
            let mut digits = digits_of(low, p, m as usize);
            digits.push(1);
            if is_irreducible(&digits, p) {
                return Self::with_reduction(p, m, &digits);
            }
        }
        unreachable!("an irreducible polynomial of every degree exists over GF(p)")
    }

    /// Extension field with an explicit monic reduction polynomial
    /// (digits low to high, length m+1).
    pub fn with_reduction(p: u32, m: u32, reduction: &[u32]) -> Result<Self, GfError> {
        if m < 2 {
            return Err(GfError::BadParameter(
                "explicit reduction polynomial requires m >= 2",
            ));
        }
        check_prime(p)?;
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= 1 << 16)
            .ok_or(GfError::BadParameter("q = p^m must be <= 2^16"))?;
        if reduction.len() != m as usize + 1 || reduction[m as usize] != 1 {
            return Err(GfError::BadParameter(
                "reduction polynomial must be monic of degree m",
            ));
        }
        if reduction.iter().any(|&c| c >= p) {
            return Err(GfError::BadParameter(
                "reduction coefficients must be reduced mod p",
            ));
        }
        if !is_irreducible(reduction, p) {
            return Err(GfError::NotIrreducible);
        }
        Ok(Field {
            p,
            m,
            q,
            reduction: reduction.to_vec(),
        })
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    /// Reduction polynomial digits (low to high); empty for prime fields.
    pub fn reduction(&self) -> &[u32] {
        &self.reduction
    }

    pub fn elements(&self) -> impl Iterator<Item = u64> {
        0..self.q
    }

    fn digits(&self, v: u64) -> Vec<u32> {
        digits_of(v, self.p, self.m as usize)
    }

    fn value(&self, digits: &[u32]) -> u64 {
        let mut v = 0u64;
        for &d in digits.iter().rev() {
            v = v * self.p as u64 + d as u64;
        }
        v
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        if self.m == 1 {
            return (a + b) % self.p as u64;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let sum: Vec<u32> = da
            .iter()
            .zip(&db)
            .map(|(&x, &y)| (x + y) % self.p)
            .collect();
        self.value(&sum)
    }

    pub fn neg(&self, a: u64) -> u64 {
        debug_assert!(a < self.q);
        if self.m == 1 {
            return (self.p as u64 - a) % self.p as u64;
        }
        let da = self.digits(a);
        let neg: Vec<u32> = da.iter().map(|&x| (self.p - x) % self.p).collect();
        self.value(&neg)
    }

    pub fn sub(&self, a: u64, b: u64) -> u64 {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: u64, b: u64) -> u64 {
        debug_assert!(a < self.q && b < self.q);
        if self.m == 1 {
            return a * b % self.p as u64;
        }
        let (da, db) = (self.digits(a), self.digits(b));
        let m = self.m as usize;
        // Schoolbook product, then reduce by the monic modulus.
        let mut prod = vec![0u64; 2 * m - 1];
        for (i, &x) in da.iter().enumerate() {
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] += x as u64 * y as u64;
            }
        }
        let p = self.p as u64;
        for c in prod.iter_mut() {
            *c %= p;
        }
        for deg in (m..2 * m - 1).rev() {
            let lead = prod[deg];
            if lead == 0 {
                continue;
            }
            prod[deg] = 0;
            for (i, &rc) in self.reduction.iter().take(m).enumerate() {
                let idx = deg - m + i;
                // x^deg = -reduction_tail(x) * x^{deg-m}
                prod[idx] = (prod[idx] + lead * ((self.p - rc) as u64)) % p;
            }
        }
        let digits: Vec<u32> = prod[..m].iter().map(|&c| c as u32).collect();
        self.value(&digits)
    }

    /// Multiplicative inverse via a^{q−2} (Fermat / Lagrange).
    pub fn inv(&self, a: u64) -> Result<u64, GfError> {
        if a == 0 {
            return Err(GfError::ZeroInverse);
        }
        Ok(self.pow(a, self.q - 2))
    }

    pub fn pow(&self, a: u64, mut e: u64) -> u64 {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    /// Plain-text description: `GF(p^m) poly=[c0,c1,...]` — enough to
    /// reconstruct the arithmetic byte-exactly.
    pub fn description(&self) -> String {
        if self.m == 1 {
            format!("GF({})", self.p)
        } else {
            let coeffs: Vec<String> = self.reduction.iter().map(u32::to_string).collect();
            format!("GF({}^{}) poly=[{}]", self.p, self.m, coeffs.join(","))
        }
    }
}

fn digits_of(v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut v = v;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((v % p as u64) as u32);
        v /= p as u64;
    }
    out
}

fn check_prime(p: u32) -> Result<(), GfError> {
    if p < 2 {
        return Err(GfError::NotPrime(p));
    }
    let mut d = 2u32;
    while d * d <= p {
        if p % d == 0 {
            return Err(GfError::NotPrime(p));
        }
        d += 1;
    }
    Ok(())
}

/// True iff the monic polynomial (digits low..high over GF(p)) has no
/// monic divisor of degree 1..=deg/2. Exhaustive trial division; desk
/// scale keeps this cheap.
fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() - 1;
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut div = digits_of(low, p, d);
            div.push(1);
            if poly_rem_is_zero(poly, &div, p) {
                return false;
            }
        }
    }
    true
}

/// Remainder test for monic divisor via synthetic long division mod p.
fn poly_rem_is_zero(poly: &[u32], div: &[u32], p: u32) -> bool {
    let mut rem: Vec<u64> = poly.iter().map(|&c| c as u64).collect();
    let dd = div.len() - 1;
    for deg in (dd..rem.len()).rev() {
        let lead = rem[deg];
        if lead == 0 {
            continue;
        }
        rem[deg] = 0;
        for (i, &dc) in div.iter().take(dd).enumerate() {
            let idx = deg - dd + i;
            rem[idx] = (rem[idx] + lead * ((p - dc) as u64)) % p as u64;
        }
    }
    rem[..dd].iter().all(|&c| c == 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_field_arithmetic() {
        let f = Field::new(5, 1).unwrap();
        assert_eq!(f.mul(3, 4), 2);
        assert_eq!(f.add(3, 4), 2);
        assert_eq!(f.inv(3).unwrap(), 2); // 3*2 = 6 = 1 mod 5
        assert!(f.inv(0).is_err());
        let f2 = Field::new(2, 1).unwrap();
        assert_eq!(f2.add(1, 1), 0);
    }

    #[test]
    fn gf4_forced_by_reduction_polynomial() {
        // x^2 + x + 1: x·x = x + 1, i.e. 2·2 = 3 in canonical values.
        let f = Field::new(2, 2).unwrap();
        assert_eq!(f.reduction(), &[1, 1, 1]);
        assert_eq!(f.mul(2, 2), 3);
    }

    #[test]
    fn rejects_non_prime_and_reducible() {
        assert_eq!(Field::new(6, 1), Err(GfError::NotPrime(6)));
        assert_eq!(Field::new(1, 1), Err(GfError::NotPrime(1)));
        // x^2 + 1 = (x+1)^2 over GF(2)
        assert_eq!(
            Field::with_reduction(2, 2, &[1, 0, 1]),
            Err(GfError::NotIrreducible)
        );
        assert!(Field::new(2, 17).is_err()); // q > 2^16
    }

    #[test]
    fn default_gf2m_table_constructs_for_all_degrees() {
        for m in 2..=16 {
            let f = Field::new(2, m).unwrap();
            assert_eq!(f.q(), 1u64 << m);
        }
    }

    #[test]
    fn field_axioms_exhaustive_small_fields() {
        // Associativity, commutativity, distributivity, inverses.
        for (p, m) in [(2u32, 1u32), (3, 1), (5, 1), (2, 2), (3, 2), (2, 4)] {
            let f = Field::new(p, m).unwrap();
            let q = f.q();
            for a in 0..q {
                for b in 0..q {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in 0..q {
                        assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
                        assert_eq!(f.add(a, f.add(b, c)), f.add(f.add(a, b), c));
                        assert_eq!(
                            f.mul(a, f.add(b, c)),
                            f.add(f.mul(a, b), f.mul(a, c)),
                            "distributivity failed in GF({p}^{m}) at ({a},{b},{c})"
                        );
                    }
                }
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1, "inverse roundtrip {a}");
                }
                assert_eq!(f.add(a, f.neg(a)), 0);
            }
        }
    }

    #[test]
    fn inverse_roundtrip_exhaustive_gf256() {
        let f = Field::new(2, 8).unwrap();
        for a in 1..f.q() {
            assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
    }

    #[test]
    fn description_roundtrip_content() {
        assert_eq!(Field::new(5, 1).unwrap().description(), "GF(5)");
        assert_eq!(
            Field::new(2, 2).unwrap().description(),
            "GF(2^2) poly=[1,1,1]"
        );
    }
}
