//! Seeded random instances for benchmarks and cross-checking runs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rentdiv_core::{initial_ef_allocation, max_welfare_assignment, Bound, Instance, Rational, RawInstance};

/// Which constraints a generated instance carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Pattern {
    Plain,
    Bounds,
    Budgets,
    Both,
    /// Bounds that force a room pair apart by more than an occupant's
    /// envy-free band allows.
    BrokenBand,
    /// Few distinct valuations plus budgets, so envy components are large.
    TiedBudgets,
}

#[derive(Debug, Clone)]
pub struct Generated {
    pub seed: u64,
    pub pattern: Pattern,
    pub instance: Instance,
}

fn rational(rng: &mut impl Rng, lo: i64, hi: i64) -> Rational {
    let den = *[1i64, 1, 2, 3, 4, 5].choose(rng).expect("nonempty");
    Rational::new(rng.gen_range(lo * den..=hi * den).into(), den.into())
}

fn valuations(rng: &mut impl Rng, n: usize, pattern: Pattern) -> Vec<Vec<Rational>> {
    // coarse grids make ties, and with them nontrivial envy components
    let steps = match pattern {
        Pattern::TiedBudgets => Some(3),
        _ if rng.gen_bool(0.35) => Some(10),
        _ => None,
    };
    (0..n)
        .map(|_| {
            (0..n)
                .map(|_| match steps {
                    Some(k) => Rational::from_integer((10 * rng.gen_range(0..=k)).into()),
                    None => rational(rng, 0, 100),
                })
                .collect()
        })
        .collect()
}

fn wiggle(rng: &mut impl Rng) -> Rational {
    rational(rng, 0, 15)
}

/// One random instance with `n` agents.
pub fn random_instance(seed: u64, n: usize, pattern: Pattern) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let vals = valuations(&mut rng, n, pattern);
    let total = Rational::from_integer(rng.gen_range(0..=(60 * n as i64)).into());
    let base = RawInstance::new(vals.clone(), total.clone()).validate().expect("generated valuations are valid");
    let reference = initial_ef_allocation(&base).expect("unconstrained instances are solvable");
    let sigma = max_welfare_assignment(&vals);
    let r = &reference.rents;

    let mut raw = RawInstance::new(vals.clone(), total);
    let bounds = |rng: &mut ChaCha8Rng, raw: RawInstance, feasible: bool| {
        let lower = (0..n)
            .map(|j| {
                if rng.gen_bool(0.3) {
                    Bound::NegInf
                } else if feasible || rng.gen_bool(0.5) {
                    Bound::Finite(&r[j] - wiggle(rng))
                } else {
                    Bound::Finite(&r[j] + wiggle(rng))
                }
            })
            .collect();
        let upper = (0..n)
            .map(|j| {
                if rng.gen_bool(0.3) {
                    Bound::PosInf
                } else if feasible || rng.gen_bool(0.5) {
                    Bound::Finite(&r[j] + wiggle(rng))
                } else {
                    Bound::Finite(&r[j] - wiggle(rng))
                }
            })
            .collect();
        raw.lower_bounds(lower).upper_bounds(upper)
    };
    let budgets = |rng: &mut ChaCha8Rng, raw: RawInstance, feasible: bool| {
        let b = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if rng.gen_bool(0.25) {
                            Bound::PosInf
                        } else if j == sigma.room(i) && (feasible || rng.gen_bool(0.7)) {
                            Bound::Finite(&r[j] + wiggle(rng))
                        } else {
                            Bound::Finite(&r[j] + rational(rng, -10, 15))
                        }
                    })
                    .collect()
            })
            .collect();
        raw.budgets(b)
    };
    match pattern {
        Pattern::Plain => {}
        Pattern::Bounds => {
            let feasible = rng.gen_bool(0.6);
            raw = bounds(&mut rng, raw, feasible);
        }
        Pattern::Budgets | Pattern::TiedBudgets => {
            let feasible = rng.gen_bool(0.6);
            raw = budgets(&mut rng, raw, feasible);
        }
        Pattern::Both => {
            let feasible = rng.gen_bool(0.5);
            raw = bounds(&mut rng, raw, feasible);
            raw = budgets(&mut rng, raw, feasible);
        }
        Pattern::BrokenBand => {
            let agent = rng.gen_range(0..n);
            let own = sigma.room(agent);
            let other = (own + rng.gen_range(1..n)) % n;
            // r_own - r_other <= v_own - v_other must fail
            let gap = &vals[agent][own] - &vals[agent][other];
            let low = &r[own] + wiggle(&mut rng);
            let high = &low - gap - Rational::from_integer(1.into()) - wiggle(&mut rng);
            let mut lower = vec![Bound::NegInf; n];
            let mut upper = vec![Bound::PosInf; n];
            lower[own] = Bound::Finite(low);
            upper[other] = Bound::Finite(high);
            raw = raw.lower_bounds(lower).upper_bounds(upper);
        }
    }
    match raw.clone().validate() {
        Ok(inst) => inst,
        // random bounds can cross; keep the instance but drop the bounds
        Err(_) => {
            RawInstance { lower_bounds: None, upper_bounds: None, ..raw }.validate().expect("valuations are valid")
        }
    }
}

/// `count` instances with sizes in `sizes`, cycling through the patterns.
pub fn corpus(seed: u64, count: usize, sizes: std::ops::RangeInclusive<usize>) -> Vec<Generated> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let patterns = [
        Pattern::Plain,
        Pattern::Bounds,
        Pattern::Budgets,
        Pattern::Both,
        Pattern::TiedBudgets,
        Pattern::Both,
        Pattern::BrokenBand,
        Pattern::TiedBudgets,
    ];
    (0..count)
        .map(|k| {
            let pattern = patterns[k % patterns.len()];
            let n = rng.gen_range(sizes.clone());
            let seed = rng.gen();
            let n = if pattern == Pattern::BrokenBand { n.max(2) } else { n };
            Generated { seed, pattern, instance: random_instance(seed, n, pattern) }
        })
        .collect()
}

/// A dense instance of size `n` with finite bounds and budgets around a
/// known envy-free point.
pub fn dense_instance(seed: u64, n: usize) -> Instance {
    random_instance(seed, n, Pattern::Both)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_deterministic() {
        let a = corpus(7, 30, 2..=5);
        let b = corpus(7, 30, 2..=5);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.seed, y.seed);
            assert_eq!(x.instance, y.instance);
        }
    }

    #[test]
    fn sizes_stay_in_range() {
        for g in corpus(1, 50, 2..=5) {
            assert!((2..=5).contains(&g.instance.n()));
        }
    }
}
