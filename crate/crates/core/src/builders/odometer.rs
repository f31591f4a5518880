//! Odometers from quotient sequences, reduced to a canonical two-parameter
//! form before diagram construction.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::diagram::{DiagramSpec, VertexLabel};
use crate::error::{Error, Result};

/// An odometer given by its eventually periodic sequence of quotients
/// `q1, q2, ...` (the digit at position n runs over `0..qn`). Entries must be
/// at least two and the cycle must be non-empty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OdometerSpec {
    #[serde(default)]
    pub prefix: Vec<u64>,
    pub cycle: Vec<u64>,
}

impl OdometerSpec {
    pub fn new(prefix: Vec<u64>, cycle: Vec<u64>) -> Self {
        OdometerSpec { prefix, cycle }
    }

    fn check(&self) -> Result<()> {
        if self.cycle.is_empty() {
            return Err(Error::EmptyQuotients);
        }
        for &q in self.prefix.iter().chain(&self.cycle) {
            if q < 2 {
                return Err(Error::QuotientTooSmall { quotient: q });
            }
        }
        Ok(())
    }

    /// The first `len` quotients.
    pub fn quotients(&self, len: usize) -> Vec<u64> {
        (0..len)
            .map(|i| {
                if i < self.prefix.len() {
                    self.prefix[i]
                } else {
                    self.cycle[(i - self.prefix.len()) % self.cycle.len()]
                }
            })
            .collect()
    }
}

/// Prime content of a quotient sequence: primes whose total multiplicity
/// across the infinite product is finite (with that multiplicity), and primes
/// that occur infinitely often.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrimeMultiplicity {
    pub finite: BTreeMap<u64, u32>,
    pub infinite: BTreeSet<u64>,
}

impl PrimeMultiplicity {
    /// `N`: the product of the finite-multiplicity primes, with multiplicity.
    pub fn finite_part(&self) -> Result<u64> {
        let mut n: u64 = 1;
        for (&p, &m) in &self.finite {
            for _ in 0..m {
                n = n.checked_mul(p).ok_or(Error::CountOverflow)?;
            }
        }
        Ok(n)
    }

    /// `M`: the product of the infinitely recurring primes, each once.
    pub fn infinite_part(&self) -> Result<u64> {
        let mut m: u64 = 1;
        for &p in &self.infinite {
            m = m.checked_mul(p).ok_or(Error::CountOverflow)?;
        }
        Ok(m)
    }
}

fn factorize(mut n: u64, into: &mut BTreeMap<u64, u32>) {
    let mut p = 2;
    while p * p <= n {
        while n.is_multiple_of(p) {
            *into.entry(p).or_insert(0) += 1;
            n /= p;
        }
        p += 1;
    }
    if n > 1 {
        *into.entry(n).or_insert(0) += 1;
    }
}

/// Splits the prime content of the quotient sequence into its finite and
/// infinite parts. Two odometer specs present the same system exactly when
/// these agree, so the pair `(N, M) = (finite_part, infinite_part)` is a
/// complete invariant.
pub fn odometer_canonical(spec: &OdometerSpec) -> Result<PrimeMultiplicity> {
    spec.check()?;
    let mut cycle_primes = BTreeMap::new();
    for &q in &spec.cycle {
        factorize(q, &mut cycle_primes);
    }
    let infinite: BTreeSet<u64> = cycle_primes.keys().copied().collect();
    let mut finite = BTreeMap::new();
    for &q in &spec.prefix {
        factorize(q, &mut finite);
    }
    finite.retain(|p, _| !infinite.contains(p));
    Ok(PrimeMultiplicity { finite, infinite })
}

/// Builds the canonical diagram of the odometer: a single vertex per level,
/// `N` clock edges at level one, and the stationary template with an `M`-fold
/// repeated word above. Digits then read off as base `(N, M, M, ...)`.
pub fn from_odometer(spec: &OdometerSpec) -> Result<DiagramSpec> {
    let mult = odometer_canonical(spec)?;
    let n = mult.finite_part()?;
    let m = mult.infinite_part()?;
    let n: u32 = n.try_into().map_err(|_| Error::CountOverflow)?;
    let v = VertexLabel::new("a");
    let word = vec![v.clone(); m as usize];
    let mut words = BTreeMap::new();
    words.insert(v.clone(), word);
    let mut d = DiagramSpec::stationary(words);
    d.level1.insert(v, n);
    d.check_wellformed()?;
    Ok(d)
}

/// The digit radices of the canonical diagram down to `len` levels:
/// `(N, M, M, ...)`. The first radix may be one when every prime recurs
/// forever; the corresponding digit is then constantly zero.
pub fn digit_radices(spec: &OdometerSpec, len: usize) -> Result<Vec<u64>> {
    let mult = odometer_canonical(spec)?;
    let n = mult.finite_part()?;
    let m = mult.infinite_part()?;
    let mut radices = Vec::with_capacity(len);
    if len > 0 {
        radices.push(n);
        radices.resize(len, m);
    }
    Ok(radices)
}

/// Adds two digit strings positionally, least significant digit first, with
/// the given per-position radices. Returns the sum digits and the final
/// carry. This is the reference arithmetic the compiled automaton's orbit is
/// checked against.
pub fn oplus(x: &[u64], y: &[u64], radices: &[u64]) -> Result<(Vec<u64>, u64)> {
    if x.len() != radices.len() || y.len() != radices.len() {
        return Err(Error::BadLevels {
            detail: format!(
                "digit strings of lengths {} and {} against {} radices",
                x.len(),
                y.len(),
                radices.len()
            ),
        });
    }
    let mut out = Vec::with_capacity(radices.len());
    let mut carry = 0u64;
    for (position, ((&xd, &yd), &q)) in x.iter().zip(y).zip(radices).enumerate() {
        if q == 0 {
            return Err(Error::QuotientTooSmall { quotient: 0 });
        }
        if xd >= q || yd >= q {
            return Err(Error::DigitOutOfRange {
                position,
                digit: xd.max(yd),
                quotient: q,
            });
        }
        let s = xd + yd + carry;
        out.push(s % q);
        carry = s / q;
    }
    Ok((out, carry))
}
