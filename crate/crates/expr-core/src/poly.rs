use std::cmp::Ordering;
use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, Signed, Zero};

use crate::atom::Atom;

/// Power product of atoms, factors sorted ascending by atom, exponents >= 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Mono {
    factors: Vec<(Atom, u32)>,
}

impl Mono {
    pub fn one() -> Self {
        Mono { factors: Vec::new() }
    }

    pub fn atom(a: Atom) -> Self {
        Mono { factors: vec![(a, 1)] }
    }

    pub fn atom_pow(a: Atom, e: u32) -> Self {
        if e == 0 {
            Mono::one()
        } else {
            Mono { factors: vec![(a, e)] }
        }
    }

    pub fn from_factors(mut factors: Vec<(Atom, u32)>) -> Self {
        factors.retain(|(_, e)| *e > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        // merge equal atoms
        let mut merged: Vec<(Atom, u32)> = Vec::with_capacity(factors.len());
        for (a, e) in factors {
            match merged.last_mut() {
                Some((la, le)) if *la == a => *le += e,
                _ => merged.push((a, e)),
            }
        }
        Mono { factors: merged }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(Atom, u32)] {
        &self.factors
    }

    pub fn degree(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent_of(&self, a: &Atom) -> u32 {
        self.factors
            .iter()
            .find(|(atom, _)| atom == a)
            .map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, other: &Mono) -> Mono {
        let mut factors = Vec::with_capacity(self.factors.len() + other.factors.len());
        let (mut i, mut j) = (0, 0);
        while i < self.factors.len() && j < other.factors.len() {
            match self.factors[i].0.cmp(&other.factors[j].0) {
                Ordering::Less => {
                    factors.push(self.factors[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    factors.push(other.factors[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    factors.push((self.factors[i].0.clone(), self.factors[i].1 + other.factors[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        factors.extend_from_slice(&self.factors[i..]);
        factors.extend_from_slice(&other.factors[j..]);
        Mono { factors }
    }

    /// Componentwise division; `None` when not divisible.
    pub fn div(&self, other: &Mono) -> Option<Mono> {
        let mut factors = Vec::with_capacity(self.factors.len());
        let mut j = 0;
        for (a, e) in &self.factors {
            let mut e = *e;
            while j < other.factors.len() && other.factors[j].0 < *a {
                return None; // divisor has an atom we lack
            }
            if j < other.factors.len() && other.factors[j].0 == *a {
                let oe = other.factors[j].1;
                if oe > e {
                    return None;
                }
                e -= oe;
                j += 1;
            }
            if e > 0 {
                factors.push((a.clone(), e));
            }
        }
        if j < other.factors.len() {
            return None;
        }
        Some(Mono { factors })
    }

    /// Componentwise gcd.
    pub fn gcd(&self, other: &Mono) -> Mono {
        let mut factors = Vec::new();
        let mut j = 0;
        for (a, e) in &self.factors {
            while j < other.factors.len() && other.factors[j].0 < *a {
                j += 1;
            }
            if j < other.factors.len() && other.factors[j].0 == *a {
                factors.push((a.clone(), (*e).min(other.factors[j].1)));
            }
        }
        Mono { factors }
    }

    pub fn without(&self, a: &Atom) -> Mono {
        Mono {
            factors: self.factors.iter().filter(|(x, _)| x != a).cloned().collect(),
        }
    }

    /// Keep only the factors whose atom satisfies the predicate.
    pub fn filter(&self, mut keep: impl FnMut(&Atom) -> bool) -> Mono {
        Mono {
            factors: self.factors.iter().filter(|(a, _)| keep(a)).cloned().collect(),
        }
    }

    /// Graded order, ties broken from the largest atom downwards: the
    /// monomial with the higher exponent on the largest differing atom wins.
    /// This is a proper monomial order (compatible with multiplication).
    pub fn order(&self, other: &Mono) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| {
            let mut i = self.factors.len();
            let mut j = other.factors.len();
            loop {
                match (i, j) {
                    (0, 0) => return Ordering::Equal,
                    (0, _) => return Ordering::Less,
                    (_, 0) => return Ordering::Greater,
                    _ => {}
                }
                let (a, ae) = &self.factors[i - 1];
                let (b, be) = &other.factors[j - 1];
                match a.cmp(b) {
                    Ordering::Greater => return Ordering::Greater,
                    Ordering::Less => return Ordering::Less,
                    Ordering::Equal => match ae.cmp(be) {
                        Ordering::Equal => {
                            i -= 1;
                            j -= 1;
                        }
                        ord => return ord,
                    },
                }
            }
        })
    }
}

impl PartialOrd for Mono {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.order(other))
    }
}

impl Ord for Mono {
    fn cmp(&self, other: &Self) -> Ordering {
        self.order(other)
    }
}

/// Sparse multivariate polynomial over the atoms with rational coefficients.
/// Terms are kept sorted in decreasing monomial order with nonzero
/// coefficients, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: Vec<(Mono, BigRational)>,
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.terms.cmp(&other.terms)
    }
}

impl Poly {
    pub fn zero() -> Self {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Poly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(Mono::one(), c)] }
        }
    }

    pub fn atom(a: Atom) -> Self {
        Poly { terms: vec![(Mono::atom(a), BigRational::one())] }
    }

    pub fn term(m: Mono, c: BigRational) -> Self {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn from_terms(terms: Vec<(Mono, BigRational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p = p.add(&Poly::term(m, c));
        }
        p
    }

    pub fn terms(&self) -> &[(Mono, BigRational)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn as_constant(&self) -> Option<&BigRational> {
        match self.terms.as_slice() {
            [(m, c)] if m.is_one() => Some(c),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        self.as_constant().map_or(false, |c| c.is_one())
    }

    pub fn leading(&self) -> Option<(&Mono, &BigRational)> {
        self.terms.first().map(|(m, c)| (m, c))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        while i < self.terms.len() && j < other.terms.len() {
            match self.terms[i].0.cmp(&other.terms[j].0) {
                Ordering::Greater => {
                    terms.push(self.terms[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(other.terms[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &self.terms[i].1 + &other.terms[j].1;
                    if !c.is_zero() {
                        terms.push((self.terms[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        terms.extend_from_slice(&self.terms[i..]);
        terms.extend_from_slice(&other.terms[j..]);
        Poly { terms }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul_term(&self, m: &Mono, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut terms: Vec<(Mono, BigRational)> = self
            .terms
            .iter()
            .map(|(tm, tc)| (tm.mul(m), tc * c))
            .collect();
        // multiplying by a fixed monomial preserves the order of distinct
        // monomials, but equal products cannot arise; still, keep it robust
        terms.sort_by(|a, b| b.0.cmp(&a.0));
        Poly { terms }
    }

    pub fn mul_scalar(&self, c: &BigRational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, tc)| (m.clone(), tc * c)).collect(),
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for (m, c) in &self.terms {
            acc = acc.add(&other.mul_term(m, c));
        }
        acc
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut acc = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn atoms(&self) -> impl Iterator<Item = &Atom> {
        self.terms.iter().flat_map(|(m, _)| m.factors().iter().map(|(a, _)| a))
    }

    pub fn max_atom(&self) -> Option<&Atom> {
        self.atoms().max()
    }

    pub fn contains_atom(&self, a: &Atom) -> bool {
        self.atoms().any(|x| x == a)
    }

    pub fn degree_in(&self, a: &Atom) -> u32 {
        self.terms
            .iter()
            .map(|(m, _)| m.exponent_of(a))
            .max()
            .unwrap_or(0)
    }

    /// View as a univariate polynomial in `a`: degree -> coefficient poly
    /// (with `a` removed from the monomials).
    pub fn as_univariate(&self, a: &Atom) -> BTreeMap<u32, Poly> {
        let mut map: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exponent_of(a);
            let rest = Poly::term(m.without(a), c.clone());
            map.entry(e)
                .and_modify(|p| *p = p.add(&rest))
                .or_insert(rest);
        }
        map.retain(|_, p| !p.is_zero());
        map
    }

    pub fn from_univariate(a: &Atom, map: &BTreeMap<u32, Poly>) -> Poly {
        let mut acc = Poly::zero();
        for (e, coeff) in map {
            acc = acc.add(&coeff.mul_term(&Mono::atom_pow(a.clone(), *e), &BigRational::one()));
        }
        acc
    }

    /// Exact division; `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        let (dm, dc) = d.leading()?;
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while let Some((rm, rc)) = rem.leading() {
            let m = rm.div(dm)?;
            let c = rc / dc;
            let t = Poly::term(m, c);
            quot = quot.add(&t);
            rem = rem.sub(&d.mul(&t));
        }
        Some(quot)
    }

    /// gcd of all monomials.
    pub fn monomial_gcd(&self) -> Mono {
        let mut it = self.terms.iter();
        let mut g = match it.next() {
            Some((m, _)) => m.clone(),
            None => return Mono::one(),
        };
        for (m, _) in it {
            g = g.gcd(m);
            if g.is_one() {
                break;
            }
        }
        g
    }

    pub fn div_mono(&self, m: &Mono) -> Option<Poly> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for (tm, c) in &self.terms {
            terms.push((tm.div(m)?, c.clone()));
        }
        Some(Poly { terms })
    }

    /// Rational content: the unique rational c with sign of the leading
    /// coefficient such that self/c has coprime integer coefficients with
    /// positive leading coefficient. Zero for the zero polynomial.
    pub fn content(&self) -> BigRational {
        if self.is_zero() {
            return BigRational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for (_, c) in &self.terms {
            num_gcd = num::integer::gcd(num_gcd, c.numer().abs());
            den_lcm = num::integer::lcm(den_lcm, c.denom().clone());
        }
        let mut content = BigRational::new(num_gcd, den_lcm);
        if self.terms[0].1.is_negative() {
            content = -content;
        }
        content
    }

    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let c = self.content();
        self.mul_scalar(&c.recip())
    }

    /// Multivariate gcd via a primitive polynomial remainder sequence,
    /// recursing on the largest atom. The result is primitive with positive
    /// leading coefficient (rational contents are units over Q).
    pub fn gcd(a: &Poly, b: &Poly) -> Poly {
        if a.is_zero() {
            return b.primitive();
        }
        if b.is_zero() {
            return a.primitive();
        }
        let a = a.primitive();
        let b = b.primitive();
        if a.as_constant().is_some() || b.as_constant().is_some() {
            return Poly::one();
        }
        let z = {
            let ma = a.max_atom().expect("nonconstant");
            let mb = b.max_atom().expect("nonconstant");
            if ma >= mb { ma.clone() } else { mb.clone() }
        };
        let ua = a.as_univariate(&z);
        let ub = b.as_univariate(&z);
        let cont_a = ua.values().fold(Poly::zero(), |g, p| Poly::gcd(&g, p));
        let cont_b = ub.values().fold(Poly::zero(), |g, p| Poly::gcd(&g, p));
        let cont_gcd = Poly::gcd(&cont_a, &cont_b);
        let pp_a = a.div_exact(&cont_a).expect("content divides");
        let pp_b = b.div_exact(&cont_b).expect("content divides");
        if pp_a.degree_in(&z) == 0 || pp_b.degree_in(&z) == 0 {
            // one side is free of the main atom, so the gcd is too
            return cont_gcd;
        }

        // primitive PRS on the z-primitive parts
        let (mut p, mut q) = if pp_a.degree_in(&z) >= pp_b.degree_in(&z) {
            (pp_a, pp_b)
        } else {
            (pp_b, pp_a)
        };
        loop {
            let r = Poly::pseudo_rem(&p, &q, &z);
            if r.is_zero() {
                let q_cont = q
                    .as_univariate(&z)
                    .values()
                    .fold(Poly::zero(), |g, c| Poly::gcd(&g, c));
                let g = q.div_exact(&q_cont).expect("content divides");
                return cont_gcd.mul(&g).primitive();
            }
            if r.degree_in(&z) == 0 {
                // coprime in z
                return cont_gcd;
            }
            let r_cont = r
                .as_univariate(&z)
                .values()
                .fold(Poly::zero(), |g, c| Poly::gcd(&g, c));
            p = q;
            q = r.div_exact(&r_cont).expect("content divides");
        }
    }

    /// Pseudo-remainder of `p` by `q` viewed as univariate in `z`.
    fn pseudo_rem(p: &Poly, q: &Poly, z: &Atom) -> Poly {
        let dq = q.degree_in(z);
        debug_assert!(dq > 0);
        let uq = q.as_univariate(z);
        let lq = uq.get(&dq).expect("leading coeff").clone();
        let mut r = p.clone();
        loop {
            let dr = r.degree_in(z);
            if r.is_zero() || dr < dq {
                return r;
            }
            let ur = r.as_univariate(z);
            let lr = ur.get(&dr).expect("leading coeff").clone();
            // r := lq*r - lr*z^(dr-dq)*q
            let shift = Poly::term(Mono::atom_pow(z.clone(), dr - dq), BigRational::one());
            r = r.mul(&lq).sub(&q.mul(&lr).mul(&shift));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::context::ParamId;

    fn pa(i: u32) -> Poly {
        Poly::atom(Atom::Param(ParamId(i)))
    }

    #[test]
    fn arithmetic_basics() {
        let a = pa(0);
        let b = pa(1);
        let s = a.add(&b);
        assert_eq!(s.mul(&s), a.mul(&a).add(&a.mul(&b).mul_scalar(&BigRational::from_integer(2.into()))).add(&b.mul(&b)));
        assert!(s.sub(&s).is_zero());
    }

    #[test]
    fn exact_division() {
        let a = pa(0);
        let b = pa(1);
        // (a^2 - b^2) / (a - b) = a + b
        let n = a.mul(&a).sub(&b.mul(&b));
        let d = a.sub(&b);
        assert_eq!(n.div_exact(&d), Some(a.add(&b)));
        assert_eq!(a.div_exact(&d), None);
    }

    #[test]
    fn gcd_finds_common_factor() {
        let a = pa(0);
        let b = pa(1);
        let c = pa(2);
        let f = a.add(&b); // a + b
        let p = f.mul(&a); // (a+b)*a
        let q = f.mul(&c.add(&Poly::one())); // (a+b)*(c+1)
        assert_eq!(Poly::gcd(&p, &q), f);
    }

    #[test]
    fn gcd_of_coprime_is_one() {
        let a = pa(0);
        let b = pa(1);
        assert_eq!(Poly::gcd(&a.add(&Poly::one()), &b), Poly::one());
    }

    #[test]
    fn content_and_primitive() {
        let a = pa(0);
        let half = BigRational::new(1.into(), 2.into());
        let p = a.mul_scalar(&-half.clone()).add(&Poly::constant(-BigRational::one()));
        // -1/2 a - 1 -> content -1/2, primitive a + 2
        assert_eq!(p.content(), -half);
        assert_eq!(p.primitive(), a.add(&Poly::constant(BigRational::from_integer(2.into()))));
    }
}
