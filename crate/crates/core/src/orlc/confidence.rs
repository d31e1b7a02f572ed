//! The per-pair confidence scalar `phi(n)` and its failure-probability split.

use serde::{Deserialize, Serialize};

/// Which constants go into `phi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum ConfidenceVariant {
    /// `1.4 ln ln(e v n) + ln(26 S A (H + 1 + S) / delta)`.
    MainText,
    /// `1.4 llnp(2n) + ln(5.2 / delta')`, `delta' = delta / (5SAH + 4SA + 4S^2 A)`.
    #[default]
    Appendix,
}

/// Split failure probability.
///
/// For [`ConfidenceVariant::MainText`] this is the value with
/// `5.2 / delta' = 26 S A (H + 1 + S) / delta`, so both variants share the
/// `ln(5.2 / delta')` form.
pub fn delta_prime(states: usize, actions: usize, horizon: usize, delta: f64, variant: ConfidenceVariant) -> f64 {
    let (s, a, h) = (states as f64, actions as f64, horizon as f64);
    match variant {
        ConfidenceVariant::Appendix => delta / (5.0 * s * a * h + 4.0 * s * a + 4.0 * s * s * a),
        ConfidenceVariant::MainText => 5.2 * delta / (26.0 * s * a * (h + 1.0 + s)),
    }
}

/// `ln(ln(max(x, e)))`.
pub fn llnp(x: f64) -> f64 {
    x.max(std::f64::consts::E).ln().ln()
}

/// `phi(n)` with its log term precomputed for one problem size and `delta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phi {
    variant: ConfidenceVariant,
    log_term: f64,
}

impl Phi {
    pub fn new(states: usize, actions: usize, horizon: usize, delta: f64, variant: ConfidenceVariant) -> Self {
        let dp = delta_prime(states, actions, horizon, delta, variant);
        Self { variant, log_term: (5.2 / dp).ln() }
    }

    /// Equals 1 at `n = 0` and is nonincreasing in `n`.
    pub fn eval(&self, n: u64) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let nf = n as f64;
        let iterated = match self.variant {
            ConfidenceVariant::Appendix => llnp(2.0 * nf),
            ConfidenceVariant::MainText => nf.max(std::f64::consts::E).ln().ln(),
        };
        (0.52 / nf * (1.4 * iterated + self.log_term)).sqrt().min(1.0)
    }
}

pub fn phi(n: u64, states: usize, actions: usize, horizon: usize, delta: f64, variant: ConfidenceVariant) -> f64 {
    Phi::new(states, actions, horizon, delta, variant).eval(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    /// Direct evaluation at a given delta', independent of `Phi`.
    fn phi_appendix_direct(n: f64, dp: f64) -> f64 {
        let ll = (2.0 * n).max(std::f64::consts::E).ln().ln();
        (0.52 / n * (1.4 * ll + (5.2 / dp).ln())).sqrt().min(1.0)
    }

    #[test]
    fn delta_prime_unit_problem() {
        let dp = delta_prime(1, 1, 1, 0.13, ConfidenceVariant::Appendix);
        assert!((dp - 0.01).abs() < 1e-15);
    }

    #[test]
    fn main_text_log_argument_dominates_appendix() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        for _ in 0..1000 {
            let s = rng.random_range(1..50);
            let a = rng.random_range(1..50);
            let h = rng.random_range(1..100);
            let delta: f64 = rng.random_range(1e-6..1.0);
            let dp = delta_prime(s, a, h, delta, ConfidenceVariant::Appendix);
            let (sf, af, hf) = (s as f64, a as f64, h as f64);
            assert!(5.2 / dp <= 26.0 * sf * af * (hf + 1.0 + sf) / delta * (1.0 + 1e-12));
            assert!(dp < delta);
            let dm = delta_prime(s, a, h, delta, ConfidenceVariant::MainText);
            assert!((5.2 / dm - 26.0 * sf * af * (hf + 1.0 + sf) / delta).abs() / (5.2 / dm) < 1e-12);
        }
    }

    #[test]
    fn phi_reference_values() {
        assert_eq!(phi(0, 1, 1, 1, 0.13, ConfidenceVariant::Appendix), 1.0);
        // n = 1 at delta' = 0.01: sqrt(0.52 ln 520) ~ 1.80, clipped.
        let raw = (0.52f64 * 520f64.ln()).sqrt();
        assert!((raw - 1.8033).abs() < 1e-3);
        assert_eq!(phi(1, 1, 1, 1, 0.13, ConfidenceVariant::Appendix), 1.0);
        let big = phi(1_000_000, 1, 1, 1, 0.13, ConfidenceVariant::Appendix);
        assert!((big - phi_appendix_direct(1e6, 0.01)).abs() < 1e-15);
        assert!((big - 2.28e-3).abs() < 5e-6, "{big}");
        assert!(big < phi(1000, 1, 1, 1, 0.13, ConfidenceVariant::Appendix));
    }

    #[test]
    fn phi_is_monotone_and_bounded() {
        for variant in [ConfidenceVariant::Appendix, ConfidenceVariant::MainText] {
            let p = Phi::new(5, 3, 4, 0.1, variant);
            let mut prev = p.eval(0);
            let mut n = 1u64;
            while n <= 1_000_000 {
                let v = p.eval(n);
                assert!((0.0..=1.0).contains(&v));
                assert!(v <= prev);
                prev = v;
                n = (n as f64 * 1.1).ceil() as u64;
            }
        }
    }

    #[test]
    fn larger_delta_gives_smaller_phi() {
        let tight = Phi::new(5, 3, 4, 0.01, ConfidenceVariant::Appendix);
        let loose = Phi::new(5, 3, 4, 0.5, ConfidenceVariant::Appendix);
        for n in [1, 10, 100, 10_000] {
            assert!(tight.eval(n) >= loose.eval(n));
        }
    }
}
