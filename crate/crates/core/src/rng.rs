//! Seeded random source and the value helpers used by schema and workload
//! generation.
//!
//! The generator is ChaCha8 (`rand_chacha`), whose output stream is fixed
//! for a given seed and stream id on every platform. Independent sub-streams
//! are derived from `(seed, label)` by selecting the ChaCha stream id from a
//! 64-bit FNV-1a hash of the label, so parallel work never depends on the
//! number of threads or on the order in which sub-streams are created.

use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};

/// Length of every referential entry.
pub const REFERENTIAL_ENTRY_LEN: usize = 20;
pub const DEFAULT_REFERENTIAL_SIZE: usize = 1000;
/// Redraws allowed before a skewed key is clamped into range.
const KEY_RETRIES: usize = 16;

const ALPHABET: &[u8] = b"ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";

#[derive(Debug, Clone)]
pub struct SeededRng {
    seed: u64,
    inner: ChaCha8Rng,
}

fn fnv1a(label: &str) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in label.bytes() {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// A fresh generator that depends only on the root seed and `label`.
    pub fn substream(seed: u64, label: &str) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(seed);
        inner.set_stream(fnv1a(label));
        Self { seed, inner }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform draw in `[lo, hi)`.
    pub fn uniform_real(&mut self, lo: f64, hi: f64) -> Result<f64> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Range(format!(
                "uniform range requires lo < hi, got [{lo}, {hi})"
            )));
        }
        Ok(self.inner.gen_range(lo..hi))
    }

    /// Uniform draw in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.gen::<f64>()
    }

    /// Uniform integer in `[lo, hi]`.
    pub fn uniform_int(&mut self, lo: i64, hi: i64) -> i64 {
        self.inner.gen_range(lo..=hi)
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Draw from N(mean, std). A zero standard deviation returns `mean`
    /// without consuming randomness.
    pub fn gaussian(&mut self, mean: f64, std_dev: f64) -> f64 {
        if std_dev <= 0.0 {
            return mean;
        }
        Normal::new(mean, std_dev)
            .expect("finite standard deviation")
            .sample(&mut self.inner)
    }

    /// `round(N(mean, spread * mean))`, clamped to at least `min`.
    pub fn gaussian_int(&mut self, mean: f64, spread: f64, min: i64) -> i64 {
        let draw = self.gaussian(mean, spread * mean.abs()).round();
        if draw.is_nan() || draw < min as f64 {
            min
        } else if draw >= i64::MAX as f64 {
            i64::MAX
        } else {
            draw as i64
        }
    }

    /// Real-valued counterpart of [`gaussian_int`](Self::gaussian_int),
    /// clamped into `[min, max]`.
    pub fn gaussian_real(&mut self, mean: f64, spread: f64, min: f64, max: f64) -> f64 {
        self.gaussian(mean, spread * mean.abs()).clamp(min, max)
    }

    /// Skewed key in `[1, cardinality]`: gaussian centred on `cardinality / 2`
    /// with standard deviation `cardinality / 6`, redrawn a bounded number of
    /// times and then clamped.
    pub fn skewed_key(&mut self, cardinality: i32) -> i32 {
        if cardinality <= 1 {
            return 1;
        }
        let c = f64::from(cardinality);
        let normal = Normal::new(c / 2.0, c / 6.0).expect("positive std-dev");
        let mut last = 0.0;
        for _ in 0..KEY_RETRIES {
            last = normal.sample(&mut self.inner).round();
            if last >= 1.0 && last <= c {
                return last as i32;
            }
        }
        last.clamp(1.0, c) as i32
    }

    /// Skewed choice of an index in `0..n` using the key law above.
    pub fn skewed_index(&mut self, n: usize) -> usize {
        assert!(n > 0, "skewed choice over an empty set");
        let n = i32::try_from(n).unwrap_or(i32::MAX);
        (self.skewed_key(n) - 1) as usize
    }

    /// Random fact measure in `range`, truncated to two decimals.
    pub fn random_measure(&mut self, range: MeasureRange) -> f32 {
        let x = self.inner.gen_range(range.lo..range.hi);
        ((x * 100.0).floor() / 100.0) as f32
    }

    pub(crate) fn inner(&mut self) -> &mut ChaCha8Rng {
        &mut self.inner
    }
}

/// Half-open range of generated measure values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureRange {
    pub lo: f64,
    pub hi: f64,
}

impl MeasureRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
            return Err(Error::Range(format!(
                "measure range requires lo < hi, got [{lo}, {hi})"
            )));
        }
        Ok(Self { lo, hi })
    }
}

impl Default for MeasureRange {
    fn default() -> Self {
        Self { lo: 0.0, hi: 1000.0 }
    }
}

/// Precomputed pool of distinct fixed-length strings that descriptor values
/// and restriction literals are drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StringReferential {
    entries: Vec<String>,
}

impl StringReferential {
    pub fn generate(rng: &mut SeededRng, size: usize) -> Result<Self> {
        if size == 0 {
            return Err(Error::Range("string referential size must be >= 1".into()));
        }
        let mut seen = HashSet::with_capacity(size);
        let mut entries = Vec::with_capacity(size);
        while entries.len() < size {
            let s: String = (0..REFERENTIAL_ENTRY_LEN)
                .map(|_| ALPHABET[rng.inner.gen_range(0..ALPHABET.len())] as char)
                .collect();
            if seen.insert(s.clone()) {
                entries.push(s);
            }
        }
        Ok(Self { entries })
    }

    /// Builds a referential from explicit entries. Entries must be distinct
    /// and exactly 20 characters long.
    pub fn from_entries(entries: Vec<String>) -> Result<Self> {
        let mut seen = HashSet::new();
        for e in &entries {
            if e.chars().count() != REFERENTIAL_ENTRY_LEN {
                return Err(Error::Range(format!(
                    "referential entry {e:?} is not {REFERENTIAL_ENTRY_LEN} characters"
                )));
            }
            if !seen.insert(e.as_str()) {
                return Err(Error::Range(format!("duplicate referential entry {e:?}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `attribute_name + "_" + entry`, with the entry chosen uniformly.
    pub fn random_string(&self, rng: &mut SeededRng, attribute_name: &str) -> Result<String> {
        if self.entries.is_empty() {
            return Err(Error::Range("string referential is empty".into()));
        }
        let entry = &self.entries[rng.inner.gen_range(0..self.entries.len())];
        let mut s = String::with_capacity(attribute_name.len() + 1 + REFERENTIAL_ENTRY_LEN);
        s.push_str(attribute_name);
        s.push('_');
        s.push_str(entry);
        Ok(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_sequence() {
        let mut a = SeededRng::new(7);
        let mut b = SeededRng::new(7);
        let xs: Vec<f64> = (0..100).map(|_| a.unit()).collect();
        let ys: Vec<f64> = (0..100).map(|_| b.unit()).collect();
        assert_eq!(xs, ys);
    }

    #[test]
    fn substreams_are_label_dependent_and_order_free() {
        let mut a1 = SeededRng::substream(1, "dim/1");
        let mut a2 = SeededRng::substream(1, "dim/2");
        let _ = SeededRng::substream(1, "something else");
        let mut a1_again = SeededRng::substream(1, "dim/1");
        let x = a1.unit();
        assert_eq!(x, a1_again.unit());
        assert_ne!(x, a2.unit());
    }

    #[test]
    fn gaussian_int_zero_spread_is_mean() {
        let mut rng = SeededRng::new(1);
        for _ in 0..10 {
            assert_eq!(rng.gaussian_int(3.0, 0.0, 1), 3);
        }
    }

    #[test]
    fn gaussian_int_clamps_to_min() {
        let mut rng = SeededRng::new(2);
        for _ in 0..100_000 {
            assert!(rng.gaussian_int(1.0, 1.0, 1) >= 1);
        }
    }

    #[test]
    fn gaussian_int_mean_monte_carlo() {
        let mut rng = SeededRng::new(3);
        let n = 10_000;
        let sum: i64 = (0..n).map(|_| rng.gaussian_int(5.0, 0.1, 1)).sum();
        let mean = sum as f64 / n as f64;
        assert!((mean - 5.0).abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn random_string_shape() {
        let mut rng = SeededRng::new(4);
        let r = StringReferential::generate(&mut rng, 1000).unwrap();
        assert_eq!(r.len(), 1000);
        let unique: HashSet<_> = r.entries().iter().collect();
        assert_eq!(unique.len(), 1000);
        assert!(r
            .entries()
            .iter()
            .all(|e| e.len() == 20 && e.bytes().all(|b| ALPHABET.contains(&b))));
        let s = r.random_string(&mut rng, "DIM1_1_DESCR1").unwrap();
        assert!(s.starts_with("DIM1_1_DESCR1_"));
        assert_eq!(s.len(), "DIM1_1_DESCR1".len() + 21);
    }

    #[test]
    fn referential_is_seed_function() {
        let a = StringReferential::generate(&mut SeededRng::new(9), 50).unwrap();
        let b = StringReferential::generate(&mut SeededRng::new(9), 50).unwrap();
        let c = StringReferential::generate(&mut SeededRng::new(10), 50).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn degenerate_referential_always_same_suffix() {
        let r = StringReferential::from_entries(vec!["ABCDEFGHIJ0123456789".into()]).unwrap();
        let mut rng = SeededRng::new(5);
        for _ in 0..20 {
            assert_eq!(
                r.random_string(&mut rng, "A").unwrap(),
                "A_ABCDEFGHIJ0123456789"
            );
        }
    }

    #[test]
    fn empty_referential_is_an_error() {
        let r = StringReferential::from_entries(vec![]).unwrap();
        assert!(r.random_string(&mut SeededRng::new(1), "X").is_err());
        assert!(StringReferential::generate(&mut SeededRng::new(1), 0).is_err());
    }

    #[test]
    fn random_string_frequencies_are_uniform() {
        let mut rng = SeededRng::new(6);
        let r = StringReferential::generate(&mut rng, 10).unwrap();
        let mut counts = std::collections::HashMap::new();
        for _ in 0..10_000 {
            let s = r.random_string(&mut rng, "X").unwrap();
            *counts.entry(s).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 10);
        // binomial(10000, 0.1): sd = 30, 5 sd = 150
        for (k, c) in counts {
            assert!((850..=1150).contains(&c), "{k}: {c}");
        }
    }

    #[test]
    fn skewed_key_single_and_pair() {
        let mut rng = SeededRng::new(8);
        assert!((0..100).all(|_| rng.skewed_key(1) == 1));
        let mut seen = [false; 3];
        for _ in 0..1000 {
            let k = rng.skewed_key(2);
            assert!((1..=2).contains(&k));
            seen[k as usize] = true;
        }
        assert!(seen[1] && seen[2]);
    }

    #[test]
    fn skewed_key_favours_the_middle() {
        let mut rng = SeededRng::new(11);
        let mut freq = vec![0usize; 101];
        for _ in 0..100_000 {
            let k = rng.skewed_key(100);
            assert!((1..=100).contains(&k));
            freq[k as usize] += 1;
        }
        assert!(freq[50] > freq[1]);
        assert!(freq[50] > freq[100]);
    }

    #[test]
    fn uniform_real_contract() {
        let mut rng = SeededRng::new(12);
        assert!(rng.uniform_real(1.0, 1.0).is_err());
        assert!(rng.uniform_real(2.0, 1.0).is_err());
        let n = 10_000;
        let mut sum = 0.0;
        for _ in 0..n {
            let x = rng.uniform_real(0.0, 1.0).unwrap();
            assert!((0.0..1.0).contains(&x));
            sum += x;
        }
        assert!((sum / n as f64 - 0.5).abs() < 0.02);
    }

    #[test]
    fn measures_stay_in_default_range() {
        let mut rng = SeededRng::new(13);
        let range = MeasureRange::default();
        for _ in 0..100_000 {
            let m = rng.random_measure(range);
            assert!((0.0..1000.0).contains(&m), "{m}");
        }
        assert!(MeasureRange::new(5.0, 5.0).is_err());
    }
}
