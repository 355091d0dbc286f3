//! Probability that exactly `m` of `k` equally likely boxes hold exactly one
//! of `α` balls.
//!
//! The inclusion-exclusion sum alternates in sign and loses every significant
//! digit in `f64` once `α` reaches the mid teens, so it is evaluated over
//! arbitrary-precision integers and converted once at the end.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

fn binomial(n: u32, r: u32) -> BigInt {
    if r > n {
        return BigInt::zero();
    }
    let r = r.min(n - r);
    let mut acc = BigInt::one();
    for j in 0..r {
        acc = acc * (n - j) / (j + 1);
    }
    acc
}

fn falling(n: u32, r: u32) -> BigInt {
    (0..r).fold(BigInt::one(), |acc, j| acc * (n - j))
}

/// Number of the `k^α` assignments of `α` labelled balls to `k` boxes that
/// leave exactly `m` boxes with a single ball.
pub fn singleton_box_count(m: u32, balls: u32, boxes: u32) -> BigInt {
    let top = boxes.min(balls);
    if m > top {
        return BigInt::zero();
    }
    // (-1)^m Σ_i (-1)^i C(k,i) C(i,m) α!/(α-i)! (k-i)^(α-i)
    let mut sum = BigInt::zero();
    for i in m..=top {
        let term = binomial(boxes, i)
            * binomial(i, m)
            * falling(balls, i)
            * BigInt::from(boxes - i).pow(balls - i);
        if (i - m).is_multiple_of(2) {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

/// Exact value of the occupancy probability. Zero boxes hold zero balls with
/// certainty, and cannot hold any positive number of balls.
pub fn occupancy_exactly_one_exact(m: u32, balls: u32, boxes: u32) -> BigRational {
    if boxes == 0 {
        return if m == 0 && balls == 0 {
            BigRational::one()
        } else {
            BigRational::zero()
        };
    }
    let total = BigInt::from(boxes).pow(balls);
    BigRational::new(singleton_box_count(m, balls, boxes), total)
}

/// `Π(m, α, k)` as a float. Values of `m` above `min(k, α)` give 0.
pub fn occupancy_exactly_one(m: u32, balls: u32, boxes: u32) -> f64 {
    occupancy_exactly_one_exact(m, balls, boxes)
        .to_f64()
        .expect("a probability in [0, 1] is representable")
}

/// `Π(m, α, k)` for a fixed box count and every `α <= max_balls`.
#[derive(Debug, Clone)]
pub struct OccupancyTable {
    boxes: u32,
    rows: Vec<Vec<f64>>,
}

impl OccupancyTable {
    pub fn new(boxes: u32, max_balls: u32) -> Self {
        let rows = (0..=max_balls)
            .map(|balls| {
                (0..=boxes.min(balls))
                    .map(|m| occupancy_exactly_one(m, balls, boxes))
                    .collect()
            })
            .collect();
        OccupancyTable { boxes, rows }
    }

    pub fn boxes(&self) -> u32 {
        self.boxes
    }

    pub fn get(&self, m: usize, balls: usize) -> f64 {
        self.rows[balls].get(m).copied().unwrap_or(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Signed;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// The alternating-sum form with factorials, transcribed term by term.
    fn literal_formula(m: u32, a: u32, k: u32) -> BigRational {
        let fact = |n: u32| (1..=n).fold(BigInt::one(), |acc, j| acc * j);
        let mut sum = BigRational::zero();
        for i in m..=k.min(a) {
            let sign = if i % 2 == 0 { 1 } else { -1 };
            let num = BigInt::from(sign) * BigInt::from(k - i).pow(a - i);
            sum += BigRational::new(num, fact(i - m) * fact(k - i) * fact(a - i));
        }
        let sign = if m.is_multiple_of(2) { 1 } else { -1 };
        let pre = BigRational::new(
            BigInt::from(sign) * fact(k) * fact(a),
            BigInt::from(k).pow(a) * fact(m),
        );
        pre * sum
    }

    #[test]
    fn known_values() {
        for k in 0..6 {
            assert_eq!(occupancy_exactly_one_exact(0, 0, k), BigRational::one());
        }
        assert!(occupancy_exactly_one_exact(1, 2, 3).is_zero());
        assert_eq!(occupancy_exactly_one_exact(2, 2, 3), ratio(2, 3));
        assert_eq!(occupancy_exactly_one_exact(1, 3, 2), ratio(3, 4));
        assert_eq!(occupancy_exactly_one_exact(0, 3, 0), BigRational::zero());
        assert_eq!(occupancy_exactly_one_exact(4, 3, 5), BigRational::zero());
    }

    #[test]
    fn matches_literal_factorial_form() {
        for k in 1..=7 {
            for a in 0..=12 {
                for m in 0..=k.min(a) {
                    assert_eq!(occupancy_exactly_one_exact(m, a, k), literal_formula(m, a, k));
                }
            }
        }
    }

    #[test]
    fn counts_are_nonnegative_for_large_arguments() {
        for a in [29u32, 60, 200] {
            for m in 0..=10 {
                assert!(!singleton_box_count(m, a, 10).is_negative());
            }
        }
        let p = occupancy_exactly_one(3, 29, 5);
        assert!(p.is_finite() && (0.0..=1.0).contains(&p));
    }

    #[test]
    fn table_lookup() {
        let t = OccupancyTable::new(3, 4);
        assert_eq!(t.boxes(), 3);
        assert!((t.get(2, 2) - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(t.get(3, 2), 0.0);
        let empty = OccupancyTable::new(0, 3);
        assert_eq!(empty.get(0, 0), 1.0);
        assert_eq!(empty.get(0, 2), 0.0);
    }
}
