use num_bigint::BigInt;
use num_rational::BigRational;

use crate::analytic::Pmf;
use crate::error::{check_prob, Error, Result};

/// Largest number of raw request outcomes `(k+1)^N` accepted (seven choices for twelve sensors).
pub const ENUMERATION_LIMIT: u128 = 13_841_287_201;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RequestCondition {
    /// Sensor 0 stays silent or collides.
    UFails,
    /// Sensor 0 is alone in its request slot.
    USucceeds,
    Unconditional,
}

/// Exact distribution of the number of sensors admitted after one request phase.
///
/// Sensor 0 is enumerated over its `k + 1` choices (silent or a slot). The
/// other sensors are exchangeable, so their outcomes are grouped by how many
/// land in each slot and weighted by the multinomial count of assignments.
pub fn enumerate_request_phase(
    n: u32,
    k: u32,
    access_prob: f64,
    condition: RequestCondition,
) -> Result<Pmf> {
    check_prob("access_prob", access_prob)?;
    if n == 0 || k == 0 {
        return Err(Error::InvalidConfig("need at least one sensor and one slot".into()));
    }
    let states = (u128::from(k) + 1).checked_pow(n).unwrap_or(u128::MAX);
    if states > ENUMERATION_LIMIT {
        return Err(Error::StateSpaceTooLarge {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }

    let k = k as usize;
    let others = n as usize - 1;
    let per_slot = access_prob / k as f64;
    let silent = 1.0 - access_prob;
    let mut mass = vec![0.0; n as usize + 1];
    let mut counts = vec![0usize; k];

    visit(&mut counts, 0, others, &mut |counts, n_silent| {
        let in_slots = others - n_silent;
        let weight = multinomial(others, counts, n_silent)
            * per_slot.powi(in_slots as i32)
            * silent.powi(n_silent as i32);
        if weight == 0.0 {
            return;
        }
        let singles = counts.iter().filter(|&&c| c == 1).count();
        if matches!(condition, RequestCondition::UFails | RequestCondition::Unconditional) {
            mass[singles] += weight * silent;
        }
        for &c in counts.iter() {
            let (admitted, u_alone) = match c {
                0 => (singles + 1, true),
                1 => (singles - 1, false),
                _ => (singles, false),
            };
            let keep = match condition {
                RequestCondition::UFails => !u_alone,
                RequestCondition::USucceeds => u_alone,
                RequestCondition::Unconditional => true,
            };
            if keep {
                mass[admitted] += weight * per_slot;
            }
        }
    });

    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        return Err(Error::NullEvent(match condition {
            RequestCondition::UFails => "sensor 0 never fails",
            RequestCondition::USucceeds => "sensor 0 never succeeds",
            RequestCondition::Unconditional => "empty outcome space",
        }));
    }
    mass.iter_mut().for_each(|m| *m /= total);
    Pmf::new(0, mass)
}

/// Exact distribution of the number of boxes holding exactly one ball, by
/// visiting every one of the `boxes^balls` equally likely placements.
pub fn enumerate_occupancy(balls: u32, boxes: u32) -> Result<Vec<BigRational>> {
    let states = if boxes == 0 {
        u128::from(balls == 0)
    } else {
        u128::from(boxes).checked_pow(balls).unwrap_or(u128::MAX)
    };
    if states > ENUMERATION_LIMIT {
        return Err(Error::StateSpaceTooLarge {
            states,
            limit: ENUMERATION_LIMIT,
        });
    }
    let mut counts = vec![0u64; boxes.min(balls) as usize + 1];
    if states > 0 {
        let mut placement = vec![0usize; balls as usize];
        let mut load = vec![0u32; boxes as usize];
        loop {
            load.iter_mut().for_each(|l| *l = 0);
            for &b in &placement {
                load[b] += 1;
            }
            counts[load.iter().filter(|&&l| l == 1).count()] += 1;
            // odometer step over all placements
            let mut i = 0;
            while i < placement.len() {
                placement[i] += 1;
                if placement[i] < boxes as usize {
                    break;
                }
                placement[i] = 0;
                i += 1;
            }
            if i == placement.len() {
                break;
            }
        }
    }
    let total = BigInt::from(states.max(1));
    Ok(counts
        .into_iter()
        .map(|c| BigRational::new(BigInt::from(c), total.clone()))
        .collect())
}

/// Calls `f` for every way of spreading `left` sensors over slots `slot..`, the remainder silent.
fn visit(counts: &mut [usize], slot: usize, left: usize, f: &mut impl FnMut(&[usize], usize)) {
    if slot == counts.len() {
        f(counts, left);
        return;
    }
    for c in 0..=left {
        counts[slot] = c;
        visit(counts, slot + 1, left - c, f);
    }
    counts[slot] = 0;
}

fn multinomial(total: usize, counts: &[usize], rest: usize) -> f64 {
    let mut coef = 1.0;
    let mut remaining = total;
    for &c in counts.iter().chain(std::iter::once(&rest)) {
        coef *= binomial(remaining, c);
        remaining -= c;
    }
    coef
}

fn binomial(n: usize, r: usize) -> f64 {
    let r = r.min(n - r);
    let mut acc: u128 = 1;
    for i in 0..r {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Literal enumeration of every (send?, slot) tuple, used to check the grouped walk.
    fn brute(n: usize, k: usize, p: f64, cond: RequestCondition) -> Vec<f64> {
        let mut mass = vec![0.0; n + 1];
        let total = (k + 1).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let mut choice = Vec::with_capacity(n);
            let mut w = 1.0;
            for _ in 0..n {
                let x = c % (k + 1);
                c /= k + 1;
                w *= if x == k { 1.0 - p } else { p / k as f64 };
                choice.push(x);
            }
            let alone = |i: usize| choice[i] != k && choice.iter().filter(|&&y| y == choice[i]).count() == 1;
            let admitted = (0..n).filter(|&i| alone(i)).count();
            let keep = match cond {
                RequestCondition::UFails => !alone(0),
                RequestCondition::USucceeds => alone(0),
                RequestCondition::Unconditional => true,
            };
            if keep {
                mass[admitted] += w;
            }
        }
        let s: f64 = mass.iter().sum();
        mass.iter().map(|m| m / s).collect()
    }

    #[test]
    fn occupancy_small_cases() {
        let r = |a: i64, b: i64| BigRational::new(BigInt::from(a), BigInt::from(b));
        assert_eq!(enumerate_occupancy(3, 2).unwrap(), vec![r(1, 4), r(3, 4), r(0, 1)]);
        assert_eq!(enumerate_occupancy(2, 3).unwrap(), vec![r(1, 3), r(0, 1), r(2, 3)]);
        assert_eq!(enumerate_occupancy(0, 0).unwrap(), vec![r(1, 1)]);
        assert_eq!(enumerate_occupancy(2, 0).unwrap(), vec![r(0, 1)]);
        assert!(enumerate_occupancy(40, 6).is_err());
    }

    #[test]
    fn lone_sensor_always_succeeds() {
        let pmf = enumerate_request_phase(1, 1, 1.0, RequestCondition::USucceeds).unwrap();
        assert_eq!(pmf.prob(1), 1.0);
    }

    #[test]
    fn two_sensors_two_slots() {
        let pmf = enumerate_request_phase(2, 2, 0.5, RequestCondition::USucceeds).unwrap();
        assert_abs_diff_eq!(pmf.prob(1), 2.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(pmf.prob(2), 1.0 / 3.0, epsilon = 1e-15);
    }

    #[test]
    fn three_sensors_two_slots_full_load() {
        let pmf = enumerate_request_phase(3, 2, 1.0, RequestCondition::Unconditional).unwrap();
        assert_eq!(pmf.prob(0), 0.25);
        assert_eq!(pmf.prob(1), 0.75);
    }

    #[test]
    fn grouped_walk_matches_literal_tuples() {
        for n in 1..=5 {
            for k in 1..=3 {
                for p in [0.2, 0.5, 1.0] {
                    for cond in [
                        RequestCondition::UFails,
                        RequestCondition::USucceeds,
                        RequestCondition::Unconditional,
                    ] {
                        let Ok(pmf) = enumerate_request_phase(n, k, p, cond) else {
                            continue;
                        };
                        let b = brute(n as usize, k as usize, p, cond);
                        for (m, want) in b.iter().enumerate() {
                            assert_abs_diff_eq!(pmf.prob(m), *want, epsilon = 1e-14);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn null_events_and_limits() {
        assert!(matches!(
            enumerate_request_phase(2, 1, 1.0, RequestCondition::USucceeds),
            Err(Error::NullEvent(_))
        ));
        assert!(matches!(
            enumerate_request_phase(1, 3, 1.0, RequestCondition::UFails),
            Err(Error::NullEvent(_))
        ));
        assert!(enumerate_request_phase(12, 6, 0.5, RequestCondition::UFails).is_ok());
        match enumerate_request_phase(13, 6, 0.5, RequestCondition::UFails) {
            Err(Error::StateSpaceTooLarge { states, .. }) => assert_eq!(states, 7u128.pow(13)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(enumerate_request_phase(3, 2, 1.5, RequestCondition::UFails).is_err());
    }
}
