//! Multivariate polynomial gcd by recursive primitive remainder sequences.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::{MultiPoly, MAX_VARS};

/// Monic greatest common divisor. `gcd(0, 0) = 0`.
pub fn gcd(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_zero() {
        return b.monic();
    }
    if b.is_zero() {
        return a.monic();
    }
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    let ma = a.monomial_content();
    let mb = b.monomial_content();
    let mono = ma.gcd(&mb);
    let a = if ma.is_one() { a.clone() } else { a.div_monomial(&ma) };
    let b = if mb.is_one() { b.clone() } else { b.div_monomial(&mb) };
    let core = gcd_no_monomial(&a, &b);
    core.mul_monomial(&mono, &BigRational::one()).monic()
}

fn gcd_no_monomial(a: &MultiPoly, b: &MultiPoly) -> MultiPoly {
    if a.is_constant() || b.is_constant() {
        return MultiPoly::one();
    }
    if a.is_monomial() || b.is_monomial() {
        // Neither has a monomial factor left, so any common factor is a unit.
        return MultiPoly::one();
    }
    if a == b {
        return a.monic();
    }
    if certainly_coprime(a, b) {
        return MultiPoly::one();
    }
    let var = (0..MAX_VARS).find(|&i| a.contains_var(i) && b.contains_var(i));
    let Some(v) = var else {
        // Disjoint variable sets: the gcd divides both contents in every variable.
        let v = (0..MAX_VARS).find(|&i| a.contains_var(i)).expect("non-constant");
        return gcd(&content_in(a, v), b);
    };
    for w in 0..MAX_VARS {
        if a.contains_var(w) != b.contains_var(w) {
            let (with, without) = if a.contains_var(w) { (a, b) } else { (b, a) };
            return gcd(&content_in(with, w), without);
        }
    }
    let ca = a.coeffs_in(v);
    let cb = b.coeffs_in(v);
    let cont_a = content_of(&ca);
    let cont_b = content_of(&cb);
    let cont = gcd(&cont_a, &cont_b);
    let mut p = integer_primitive(primitive_part(&ca, &cont_a));
    let mut q = integer_primitive(primitive_part(&cb, &cont_b));
    if p.len() < q.len() {
        std::mem::swap(&mut p, &mut q);
    }
    let g = loop {
        let r = pseudo_remainder(&p, &q);
        if r.is_empty() {
            break q;
        }
        if r.len() == 1 {
            break vec![MultiPoly::one()];
        }
        let cr = content_of(&r);
        p = q;
        q = integer_primitive(primitive_part(&r, &cr));
    };
    let cg = content_of(&g);
    let g = MultiPoly::from_coeffs_in(v, &primitive_part(&g, &cg));
    g.mul(&cont).monic()
}

/// Degree bound by specialization: if `lc_v(a)` and `lc_v(b)` survive at a point
/// and the univariate gcd there is constant, the gcd has degree 0 in `x_v`.
fn certainly_coprime(a: &MultiPoly, b: &MultiPoly) -> bool {
    (0..MAX_VARS).filter(|&v| a.contains_var(v) && b.contains_var(v)).all(|v| {
        (0..3u64).any(|trial| {
            let point: Vec<u64> = (0..MAX_VARS as u64)
                .map(|i| {
                    let k = 3 + i + 7 * trial;
                    if i % 2 == 0 {
                        k
                    } else {
                        PRIME - k
                    }
                })
                .collect();
            let (Some(ua), Some(ub)) = (specialize_mod(a, v, &point), specialize_mod(b, v, &point)) else {
                return false;
            };
            if ua.last() == Some(&0) || ub.last() == Some(&0) {
                return false;
            }
            univariate_gcd_degree_mod(ua, ub) == 0
        })
    })
}

/// 2^61 - 1.
const PRIME: u64 = (1 << 61) - 1;

fn mul_mod(a: u64, b: u64) -> u64 {
    ((a as u128 * b as u128) % PRIME as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a);
        }
        a = mul_mod(a, a);
        e >>= 1;
    }
    r
}

fn inv_mod(a: u64) -> u64 {
    pow_mod(a, PRIME - 2)
}

fn int_mod(n: &BigInt) -> u64 {
    let r = n.mod_floor(&BigInt::from(PRIME));
    r.try_into().expect("reduced below the prime")
}

/// Coefficients in `x_v`, other variables set to `point`, reduced mod the
/// prime; `None` when a denominator vanishes.
fn specialize_mod(p: &MultiPoly, v: usize, point: &[u64]) -> Option<Vec<u64>> {
    let mut out = vec![0u64; p.degree_in(v) as usize + 1];
    for (mono, c) in p.terms() {
        let den = int_mod(c.denom());
        if den == 0 {
            return None;
        }
        let mut t = mul_mod(int_mod(c.numer()), inv_mod(den));
        for (i, &e) in mono.exponents().iter().enumerate() {
            if i != v && e > 0 {
                t = mul_mod(t, pow_mod(point[i], e as u64));
            }
        }
        let slot = &mut out[mono.exp(v) as usize];
        *slot = (*slot + t) % PRIME;
    }
    Some(out)
}

fn univariate_gcd_degree_mod(mut p: Vec<u64>, mut q: Vec<u64>) -> usize {
    trim_mod(&mut p);
    trim_mod(&mut q);
    while !q.is_empty() {
        let lead_inv = inv_mod(*q.last().expect("nonempty"));
        while p.len() >= q.len() {
            let shift = p.len() - q.len();
            let f = mul_mod(*p.last().expect("nonempty"), lead_inv);
            for (k, c) in q.iter().enumerate() {
                p[k + shift] = (p[k + shift] + PRIME - mul_mod(f, *c)) % PRIME;
            }
            trim_mod(&mut p);
            if p.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut p, &mut q);
    }
    p.len().saturating_sub(1)
}

fn trim_mod(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Gcd of the coefficients of `p` viewed as univariate in `x_v`.
fn content_in(p: &MultiPoly, v: usize) -> MultiPoly {
    content_of(&p.coeffs_in(v))
}

fn content_of(coeffs: &[MultiPoly]) -> MultiPoly {
    let mut nonzero: Vec<&MultiPoly> = coeffs.iter().filter(|c| !c.is_zero()).collect();
    nonzero.sort_by_key(|c| (c.total_degree(), c.num_terms()));
    let mut g = MultiPoly::zero();
    for c in nonzero {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn primitive_part(coeffs: &[MultiPoly], content: &MultiPoly) -> Vec<MultiPoly> {
    if content.is_one() || content.is_zero() {
        return coeffs.to_vec();
    }
    coeffs.iter().map(|c| c.div_exact(content).expect("content divides every coefficient")).collect()
}

/// Scales so that all coefficients are coprime integers.
fn integer_primitive(coeffs: Vec<MultiPoly>) -> Vec<MultiPoly> {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for c in &coeffs {
        for (_, v) in c.terms() {
            num = num.gcd(v.numer());
            den = den.lcm(v.denom());
        }
    }
    if num.is_zero() || (num.is_one() && den.is_one()) {
        return coeffs;
    }
    let f = BigRational::new(den, num);
    coeffs.iter().map(|c| c.scale(&f)).collect()
}

/// Pseudo-remainder of univariate polynomials with polynomial coefficients.
/// Returned with trailing zero coefficients trimmed.
fn pseudo_remainder(a: &[MultiPoly], b: &[MultiPoly]) -> Vec<MultiPoly> {
    let db = b.len() - 1;
    let lb = &b[db];
    let mut r: Vec<MultiPoly> = a.to_vec();
    trim(&mut r);
    while !r.is_empty() && r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: Vec<MultiPoly> = r.iter().map(|c| c.mul(lb)).collect();
        for (k, bk) in b.iter().enumerate() {
            next[k + shift] = next[k + shift].sub(&bk.mul(&lr));
        }
        trim(&mut next);
        r = next;
    }
    r
}

fn trim(p: &mut Vec<MultiPoly>) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> MultiPoly {
        MultiPoly::var(i)
    }

    fn c(v: i64) -> MultiPoly {
        MultiPoly::from_int(v)
    }

    #[test]
    fn common_linear_factor() {
        let f = x(0).add(&x(1));
        let a = f.mul(&x(0).sub(&c(1)));
        let b = f.mul(&x(1).add(&c(2)));
        assert_eq!(gcd(&a, &b), f);
    }

    #[test]
    fn coprime_gives_one() {
        let a = x(0).mul(&x(0)).add(&c(1));
        let b = x(1).sub(&x(0));
        assert!(gcd(&a, &b).is_one());
    }

    #[test]
    fn monomial_factors_are_kept() {
        let a = x(0).pow(2).mul(&x(1));
        let b = x(0).mul(&x(1).pow(3)).add(&x(0).pow(2));
        assert_eq!(gcd(&a, &b), x(0));
    }

    #[test]
    fn three_variable_factor() {
        let f = x(0).mul(&x(2)).sub(&x(1)).add(&c(3));
        let g = x(0).add(&x(1).mul(&x(2)));
        let a = f.mul(&g).mul(&x(2).add(&c(1)));
        let b = f.mul(&g.pow(2));
        assert_eq!(gcd(&a, &b), f.mul(&g).monic());
    }
}
