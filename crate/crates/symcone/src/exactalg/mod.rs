//! Exact arithmetic kernel: rationals, sparse polynomials in the
//! equivariant parameters a0..ar, rational functions, rational functions of
//! z over that field, and Laurent extraction at movable poles.

pub mod linform;
pub mod poly;
pub mod rat;
pub mod ratfun;
pub mod zpoly;
pub mod zrat;

pub use linform::LinearForm;
pub use poly::{AlphaPoly, Monomial};
pub use rat::{DetRng, Rat};
pub use ratfun::AlphaRat;
pub use zpoly::ZPoly;
pub use zrat::{Pole, PoleSupport, ZRat};

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum ExactError {
    #[error("division by zero")]
    DivByZero,
    #[error("denominator vanishes identically at the expansion point")]
    DegeneratePole,
    #[error("non-linear denominator factor: {0}")]
    NonLinearPole(String),
    #[error("could not find an admissible rational specialization")]
    SpecializationFailed,
}

/// Draw a pairwise-distinct rational alpha assignment from a seeded stream,
/// retrying until `f` evaluates (denominator nonzero at the point).
pub fn random_specialize_alpharat(f: &AlphaRat, seed: u64) -> Result<Rat, ExactError> {
    let (point, value) = random_specialize_avoiding(std::slice::from_ref(f), seed)?;
    let _ = point;
    Ok(value.into_iter().next().unwrap())
}

/// One shared assignment that is admissible for every listed value; returns
/// the point and all evaluations.
pub fn random_specialize_avoiding(
    fs: &[AlphaRat],
    seed: u64,
) -> Result<(Vec<Rat>, Vec<Rat>), ExactError> {
    let nvars = match fs.first() {
        Some(f) => f.nvars(),
        None => return Ok((Vec::new(), Vec::new())),
    };
    let mut rng = DetRng::new(seed);
    'outer: for _ in 0..200 {
        let point = distinct_point(&mut rng, nvars);
        let mut vals = Vec::with_capacity(fs.len());
        for f in fs {
            match f.eval(&point) {
                Ok(v) => vals.push(v),
                Err(_) => continue 'outer,
            }
        }
        return Ok((point, vals));
    }
    Err(ExactError::SpecializationFailed)
}

/// Specialize a ZRat at a random admissible (alpha, z) point.
pub fn random_specialize_zrat(f: &ZRat, seed: u64) -> Result<Rat, ExactError> {
    let mut rng = DetRng::new(seed);
    for _ in 0..200 {
        let point = distinct_point(&mut rng, f.nvars());
        let z = rng.small_rat(40, 6);
        if let Ok(v) = f.eval(&point, &z) {
            return Ok(v);
        }
    }
    Err(ExactError::SpecializationFailed)
}

fn distinct_point(rng: &mut DetRng, nvars: usize) -> Vec<Rat> {
    loop {
        let point: Vec<Rat> = (0..nvars).map(|_| rng.small_rat(40, 6)).collect();
        let mut ok = true;
        for i in 0..nvars {
            for j in (i + 1)..nvars {
                if point[i] == point[j] {
                    ok = false;
                }
            }
        }
        if ok {
            return point;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::rat::rat_i;
    use super::*;

    #[test]
    fn specialize_is_exact_and_deterministic() {
        let f = AlphaRat::var(2, 0).sub(&AlphaRat::var(2, 1));
        let a = random_specialize_alpharat(&f, 11).unwrap();
        let b = random_specialize_alpharat(&f, 11).unwrap();
        assert_eq!(a, b);
        assert!(!a.eq(&rat_i(0)) || f.is_zero());
    }

    #[test]
    fn specialize_fixed_point_example() {
        let f = AlphaRat::var(2, 0).sub(&AlphaRat::var(2, 1));
        assert_eq!(f.eval(&[rat_i(0), rat_i(1)]).unwrap(), rat_i(-1));
    }

    #[test]
    fn specialize_retries_past_denominator_zeros() {
        // Denominator a0 - a1 vanishes on the diagonal; distinct draws
        // always avoid it.
        let f = AlphaRat::one(2)
            .div(&AlphaRat::var(2, 0).sub(&AlphaRat::var(2, 1)))
            .unwrap();
        assert!(random_specialize_alpharat(&f, 3).is_ok());
    }
}
