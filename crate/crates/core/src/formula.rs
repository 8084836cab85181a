//! Closed-form counts and the algebraic identities behind the condensation
//! recurrence, all in exact arithmetic.

use std::fmt;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::FormulaError;
use crate::lattice::{Parity, QHParams};
use crate::matching::Count;

/// Exact rational in lowest terms with a positive denominator.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Ratio(pub BigRational);

impl Ratio {
    pub fn new(num: impl Into<BigInt>, den: impl Into<BigInt>) -> Self {
        Ratio(BigRational::new(num.into(), den.into()))
    }

    pub fn one() -> Self {
        Ratio(BigRational::one())
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    /// The value as a [`Count`] if it is a nonnegative integer.
    pub fn to_count(&self) -> Result<Count, FormulaError> {
        if !self.0.is_integer() {
            return Err(FormulaError::NonInteger(self.clone()));
        }
        if self.0.is_negative() {
            return Err(FormulaError::Negative(self.clone()));
        }
        let (_, mag) = self.0.numer().clone().into_parts();
        Ok(Count(mag))
    }
}

impl fmt::Display for Ratio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl From<&Count> for Ratio {
    fn from(c: &Count) -> Self {
        Ratio(BigRational::from_integer(BigInt::from_biguint(
            Sign::Plus,
            c.0.clone(),
        )))
    }
}

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

fn int(v: i64) -> BigInt {
    BigInt::from(v)
}

fn check_increasing(set: &[i64]) -> Result<(), FormulaError> {
    if set.windows(2).any(|w| w[0] >= w[1]) {
        return Err(FormulaError::NotIncreasing(set.to_vec()));
    }
    Ok(())
}

fn pair_product(set: &[i64], factor: impl Fn(i64, i64) -> i64) -> BigInt {
    let mut acc = BigInt::one();
    for (i, &si) in set.iter().enumerate() {
        for &sj in &set[i + 1..] {
            acc *= int(factor(si, sj));
        }
    }
    acc
}

/// Product of `s_j - s_i` over all pairs `i < j`.
pub fn delta_op(set: &[i64]) -> Result<BigInt, FormulaError> {
    check_increasing(set)?;
    Ok(pair_product(set, |si, sj| sj - si))
}

/// Product of `s_i + s_j - 1` over all pairs `i < j`.
pub fn star_op(set: &[i64]) -> Result<BigInt, FormulaError> {
    check_increasing(set)?;
    Ok(pair_product(set, |si, sj| si + sj - 1))
}

fn expect_parity(params: &QHParams, want: Parity) -> Result<(), FormulaError> {
    params.validate()?;
    if params.parity() != want {
        return Err(FormulaError::Parity {
            diff: params.b as i64 - params.c as i64,
            expected: match want {
                Parity::Odd => "odd (b - c = 2k - 1)",
                Parity::Even => "even (b - c = 2k)",
            },
        });
    }
    Ok(())
}

/// `prod_{i<j} (s_j - s_i)/(j - i) * (s_i + s_j - 1)/(i + j - 1)` over the
/// extended sequence, for `b - c = 2k - 1`.
pub fn formula_odd(params: &QHParams) -> Result<Count, FormulaError> {
    expect_parity(params, Parity::Odd)?;
    let s = params.extended();
    let mut acc = BigRational::one();
    for i in 0..s.len() {
        for j in i + 1..s.len() {
            let (ii, jj) = (i as i64 + 1, j as i64 + 1);
            acc *= rat(s[j] - s[i], jj - ii);
            acc *= rat(s[i] + s[j] - 1, ii + jj - 1);
        }
    }
    Ratio(acc).to_count()
}

/// `prod_i s_i/i * prod_{i<j} (s_j - s_i)/(j - i) * (s_i + s_j)/(i + j)`
/// over the extended sequence, for `b - c = 2k`.
///
/// The single product is normalised by `i`, so that `S = [k + c]` (the
/// `a = 0` regions, which have one tiling) evaluates to 1.
pub fn formula_even(params: &QHParams) -> Result<Count, FormulaError> {
    expect_parity(params, Parity::Even)?;
    let s = params.extended();
    let mut acc = BigRational::one();
    for i in 0..s.len() {
        let ii = i as i64 + 1;
        acc *= rat(s[i], ii);
        for j in i + 1..s.len() {
            let jj = j as i64 + 1;
            acc *= rat(s[j] - s[i], jj - ii);
            acc *= rat(s[i] + s[j], ii + jj);
        }
    }
    Ratio(acc).to_count()
}

/// Dispatches on the parity of `b - c`.
pub fn formula_quartered(params: &QHParams) -> Result<Count, FormulaError> {
    params.validate()?;
    match params.parity() {
        Parity::Odd => formula_odd(params),
        Parity::Even => formula_even(params),
    }
}

/// The odd-case count written as `D(S)/D([k+c]) * St(S)/St([k+c])` with
/// `D = delta_op` and `St = star_op`.
pub fn formula_ratio_form(params: &QHParams) -> Result<Ratio, FormulaError> {
    expect_parity(params, Parity::Odd)?;
    let s = params.extended();
    let ident: Vec<i64> = (1..=s.len() as i64).collect();
    let num = delta_op(&s)? * star_op(&s)?;
    let den = delta_op(&ident)? * star_op(&ident)?;
    Ok(Ratio(BigRational::new(num, den)))
}

/// Number of plane partitions with entries at most `a` in the shape with
/// row lengths `b, b-1, ..., b-c+1`:
///
/// `prod_{i=1}^{c} [ prod_{j=1}^{b-c+1} (a+i+j-1)/(i+j-1)
///                 * prod_{j=b-c+2}^{b-c+i} (2a+i+j-1)/(i+j-1) ]`
pub fn proctor_count(a: u32, b: u32, c: u32) -> Result<Count, FormulaError> {
    if b < c {
        return Err(FormulaError::Params(
            crate::error::ParamError::StaircaseSides { b, c },
        ));
    }
    let (a, b, c) = (a as i64, b as i64, c as i64);
    let mut acc = BigRational::one();
    for i in 1..=c {
        for j in 1..=b - c + 1 {
            acc *= rat(a + i + j - 1, i + j - 1);
        }
        for j in b - c + 2..=b - c + i {
            acc *= rat(2 * a + i + j - 1, i + j - 1);
        }
    }
    Ratio(acc).to_count()
}

/// Boxed plane partitions in an `a x b x c` box.
pub fn macmahon_count(a: u32, b: u32, c: u32) -> Result<Count, FormulaError> {
    let mut acc = BigRational::one();
    for i in 1..=a as i64 {
        for j in 1..=b as i64 {
            for k in 1..=c as i64 {
                acc *= rat(i + j + k - 1, i + j + k - 2);
            }
        }
    }
    Ratio(acc).to_count()
}

/// Evaluates both terms of the closing identity with `s_last = d + c`:
///
/// `1 = (s_last - d)(s_last + d - 1) / ((s_last - s1)(s_last + s1 - 1))
///    + (d - s1)(d + s1 - 1) / ((s_last - s1)(s_last + s1 - 1))`
pub fn identity_terms(s1: i64, d: i64, c: i64) -> Result<(Ratio, Ratio), FormulaError> {
    if s1 < 1 || s1 >= d || c < 0 {
        return Err(FormulaError::Membership(format!(
            "require 1 <= s1 < d and c >= 0 (s1 = {s1}, d = {d}, c = {c})"
        )));
    }
    let last = d + c;
    let den = int(last - s1) * int(last + s1 - 1);
    if den.is_zero() {
        return Err(FormulaError::DivisionByZero("identity_check"));
    }
    let first = BigRational::new(int(last - d) * int(last + d - 1), den.clone());
    let second = BigRational::new(int(d - s1) * int(d + s1 - 1), den);
    Ok((Ratio(first), Ratio(second)))
}

pub fn identity_check(s1: i64, d: i64, c: i64) -> Result<bool, FormulaError> {
    let (first, second) = identity_terms(s1, d, c)?;
    Ok(first.0 + second.0 == BigRational::one())
}

/// Sorted copy of `set` with `add` inserted and `drop` removed.
fn adjust(set: &[i64], add: Option<i64>, drop: &[i64]) -> Vec<i64> {
    let mut out: Vec<i64> = set.iter().copied().filter(|v| !drop.contains(v)).collect();
    out.extend(add);
    out.sort_unstable();
    out
}

/// Left and right sides of the four cancellation lemmas, in order.
pub fn ratio_lemma_sides(
    set: &[i64],
    d: i64,
    s1: i64,
    s_last: i64,
) -> Result<[(Ratio, Ratio); 4], FormulaError> {
    check_increasing(set)?;
    if set.len() < 2 || set[0] != s1 || *set.last().unwrap() != s_last {
        return Err(FormulaError::Membership(format!(
            "{s1} and {s_last} must be the least and greatest elements of {set:?}"
        )));
    }
    if set.contains(&d) || d <= s1 || d >= s_last {
        return Err(FormulaError::Membership(format!(
            "d = {d} must lie strictly between {s1} and {s_last} and outside the set"
        )));
    }
    let plus_d_minus_first = adjust(set, Some(d), &[s1]);
    let plus_d_minus_last = adjust(set, Some(d), &[s_last]);
    let plus_d_minus_both = adjust(set, Some(d), &[s1, s_last]);
    let minus_first = adjust(set, None, &[s1]);
    let minus_last = adjust(set, None, &[s_last]);

    let mut out = Vec::with_capacity(4);
    for op in [
        delta_op as fn(&[i64]) -> Result<BigInt, FormulaError>,
        star_op,
    ] {
        let base = op(set)? * op(&plus_d_minus_both)?;
        let first = BigRational::new(op(&plus_d_minus_first)? * op(&minus_last)?, base.clone());
        let second = BigRational::new(op(&plus_d_minus_last)? * op(&minus_first)?, base);
        out.push((Ratio(first), second));
    }
    let rhs = [
        rat(s_last - d, s_last - s1),
        rat(d - s1, s_last - s1),
        rat(s_last + d - 1, s_last + s1 - 1),
        rat(d + s1 - 1, s_last + s1 - 1),
    ];
    let mut it = out.into_iter();
    let (delta_first, delta_second) = it.next().unwrap();
    let (star_first, star_second) = it.next().unwrap();
    let [r0, r1, r2, r3] = rhs;
    Ok([
        (delta_first, Ratio(r0)),
        (Ratio(delta_second), Ratio(r1)),
        (star_first, Ratio(r2)),
        (Ratio(star_second), Ratio(r3)),
    ])
}

pub fn ratio_lemma_check(set: &[i64], d: i64, s1: i64, s_last: i64) -> Result<bool, FormulaError> {
    Ok(ratio_lemma_sides(set, d, s1, s_last)?
        .iter()
        .all(|(l, r)| l == r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(v: i64) -> BigInt {
        BigInt::from(v)
    }

    #[test]
    fn delta_and_star_basics() {
        assert_eq!(delta_op(&[5]).unwrap(), n(1));
        assert_eq!(delta_op(&[1, 3, 4]).unwrap(), n(6));
        assert_eq!(star_op(&[]).unwrap(), n(1));
        assert_eq!(star_op(&[1, 3, 4]).unwrap(), n(72));
        assert_eq!(star_op(&[1, 2]).unwrap(), n(2));
        assert!(matches!(
            delta_op(&[2, 2]),
            Err(FormulaError::NotIncreasing(_))
        ));
        assert!(star_op(&[3, 1]).is_err());
    }

    #[test]
    fn delta_of_initial_segment_is_superfactorial() {
        // brute force: prod_{j<n} j!
        for len in 0..=6i64 {
            let set: Vec<i64> = (1..=len).collect();
            let sf: i64 = (1..len).map(|j| (1..=j).product::<i64>()).product();
            assert_eq!(delta_op(&set).unwrap(), n(sf));
        }
    }

    #[test]
    fn macmahon_small() {
        assert_eq!(macmahon_count(0, 4, 7).unwrap(), Count::one());
        assert_eq!(macmahon_count(1, 1, 1).unwrap(), Count::from(2));
        assert_eq!(macmahon_count(2, 2, 2).unwrap(), Count::from(20));
    }

    #[test]
    fn proctor_small() {
        assert_eq!(proctor_count(3, 5, 0).unwrap(), Count::one());
        assert_eq!(proctor_count(0, 6, 4).unwrap(), Count::one());
        // single row of length b: binom(a + b, b)
        assert_eq!(proctor_count(2, 3, 1).unwrap(), Count::from(10));
        // shape (2, 1): (a+1)(a+2)(2a+3)/6
        assert_eq!(proctor_count(2, 2, 2).unwrap(), Count::from(14));
        assert!(proctor_count(1, 2, 3).is_err());
    }

    #[test]
    fn odd_formula_base_cases() {
        for c in 0..4 {
            for k in 0..3u32 {
                let b = c + 2 * k;
                if b == 0 {
                    continue;
                }
                let b = b - 1;
                let p = QHParams::new(0, b, c, (1..=k).collect()).unwrap();
                assert_eq!(formula_odd(&p).unwrap(), Count::one(), "{p}");
            }
        }
        for a in 0..5 {
            let p = QHParams::new(a, 0, 1, vec![]).unwrap();
            assert_eq!(formula_odd(&p).unwrap(), Count::one());
        }
    }

    #[test]
    fn even_formula_single_factor() {
        for a in 0..6 {
            let p = QHParams::new(a, 1, 1, vec![]).unwrap();
            assert_eq!(formula_even(&p).unwrap(), Count::from(a as u64 + 1));
        }
    }

    #[test]
    fn parity_guard() {
        let even = QHParams::new(2, 5, 3, vec![2]).unwrap();
        assert!(matches!(
            formula_odd(&even),
            Err(FormulaError::Parity { .. })
        ));
        assert!(matches!(
            formula_ratio_form(&even),
            Err(FormulaError::Parity { .. })
        ));
        let odd = QHParams::new(2, 6, 3, vec![2, 3]).unwrap();
        assert!(matches!(
            formula_even(&odd),
            Err(FormulaError::Parity { .. })
        ));
    }

    #[test]
    fn ratio_form_matches_product() {
        for s1 in 1..=2 {
            let p = QHParams::new(1, 3, 2, vec![s1]).unwrap();
            let direct = formula_odd(&p).unwrap();
            assert_eq!(formula_ratio_form(&p).unwrap(), Ratio::from(&direct));
        }
        let p = QHParams::new(2, 6, 3, vec![2, 3]).unwrap();
        assert_eq!(
            formula_ratio_form(&p).unwrap(),
            Ratio::from(&formula_odd(&p).unwrap())
        );
        let p = QHParams::new(0, 4, 3, vec![1]).unwrap();
        assert_eq!(formula_ratio_form(&p).unwrap(), Ratio::one());
    }

    #[test]
    fn identity_examples() {
        let (f, s) = identity_terms(1, 3, 2).unwrap();
        assert_eq!(f, Ratio::new(7, 10));
        assert_eq!(s, Ratio::new(3, 10));
        for s1 in 1..5 {
            for d in s1 + 1..7 {
                let (f, s) = identity_terms(s1, d, 0).unwrap();
                assert_eq!(f, Ratio(BigRational::zero()));
                assert_eq!(s, Ratio::one());
            }
        }
        assert!(identity_check(3, 3, 1).is_err());
    }

    #[test]
    fn ratio_lemmas() {
        assert!(matches!(
            ratio_lemma_check(&[1, 2, 3], 2, 1, 3),
            Err(FormulaError::Membership(_))
        ));
        assert!(ratio_lemma_check(&[1, 4, 5], 3, 1, 5).unwrap());
        assert!(ratio_lemma_check(&[1, 4, 5], 3, 2, 5).is_err());
    }

    #[test]
    fn non_integer_is_reported() {
        assert!(matches!(
            Ratio::new(3, 2).to_count(),
            Err(FormulaError::NonInteger(_))
        ));
        assert!(matches!(
            Ratio::new(-3, 1).to_count(),
            Err(FormulaError::Negative(_))
        ));
    }
}
