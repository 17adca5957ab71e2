//! Randomized corpus verification: every suite checks library answers against an
//! independent recomputation. Items get their own seeded stream, so results do not
//! depend on thread scheduling.

use densitylab::axioms::{self, sorted_window_dominates, Status};
use densitylab::corpus;
use densitylab::gadgets::{self, Lemma2Case};
use densitylab::num::format_rational;
use densitylab::setalg::IndexSet;
use densitylab::streams::{FinitePermutation, Stream};
use densitylab::swf::Swf;
use num_bigint::BigUint;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::{CliError, RunConfig};

/// Item counts per suite.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifySizes {
    pub density_sets: usize,
    pub chain_pairs: usize,
    pub gadget_thresholds: u64,
    pub anonymity_streams: usize,
    pub window_pairs: usize,
}

impl Default for VerifySizes {
    fn default() -> Self {
        VerifySizes {
            density_sets: 200,
            chain_pairs: 500,
            gadget_thresholds: 6,
            anonymity_streams: 100,
            window_pairs: 100,
        }
    }
}

/// Checkpoints `6!, 7!, 8!` used by the count oracle.
pub const DENSITY_CHECKPOINTS: [u64; 3] = [720, 5040, 40320];
/// Ground set whose increasing subsets feed the inequality sweep.
pub const SWEEP_GROUND: u64 = 12;
pub const SWEEP_M: [u64; 3] = [2, 3, 4];
/// Largest window in the permutation search.
pub const WINDOW_MAX: usize = 8;

#[derive(Clone, Debug, Serialize)]
pub struct Failure {
    pub key: String,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteResult {
    pub name: &'static str,
    pub items: usize,
    pub failures: Vec<Failure>,
}

impl SuiteResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub sizes: VerifySizes,
    pub suites: Vec<SuiteResult>,
    pub items: usize,
    pub failures: usize,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }

    pub fn suite(&self, name: &str) -> Option<&SuiteResult> {
        self.suites.iter().find(|s| s.name == name)
    }
}

/// The random stream for item `index` of suite `suite`.
pub fn item_rng(seed: u64, suite: u32, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((u64::from(suite) << 40) | index);
    rng
}

type Check = Result<(), String>;

fn suite<T, F>(name: &'static str, items: Vec<(String, T)>, check: F) -> SuiteResult
where
    T: Send + Sync,
    F: Fn(&T) -> Check + Send + Sync,
{
    let outcomes: Vec<Option<Failure>> = items
        .par_iter()
        .map(|(key, item)| {
            check(item).err().map(|detail| Failure {
                key: key.clone(),
                detail,
            })
        })
        .collect();
    SuiteResult {
        name,
        items: items.len(),
        failures: outcomes.into_iter().flatten().collect(),
    }
}

/// Counts by direct membership tests, one point at a time.
pub fn brute_count(set: &IndexSet, n: u64) -> u64 {
    (1..=n).filter(|&t| set.contains(t)).count() as u64
}

pub fn density_suite(seed: u64, n: usize, inject_fault: bool) -> SuiteResult {
    let items = (0..n as u64)
        .map(|i| {
            let mut rng = item_rng(seed, 1, i);
            let depth = rng.gen_range(0..=3);
            let set = corpus::index_set(&mut rng, depth);
            (format!("set-{i:04}"), (i, set))
        })
        .collect();
    suite("density_counts", items, |(i, set): &(u64, IndexSet)| {
        let mut brute = 0u64;
        let mut last = 0u64;
        for n in DENSITY_CHECKPOINTS {
            brute += (last + 1..=n).filter(|&t| set.contains(t)).count() as u64;
            last = n;
            let mut claimed = set.count(&BigUint::from(n));
            if inject_fault && *i == 0 {
                claimed += 1u32;
            }
            if claimed != BigUint::from(brute) {
                return Err(format!(
                    "{set}: count({n}) = {claimed}, membership gives {brute}"
                ));
            }
        }
        Ok(())
    })
}

pub fn chain_suite(seed: u64, n: usize, horizon: u64) -> SuiteResult {
    let items = (0..n as u64)
        .map(|i| {
            (
                format!("pair-{i:04}"),
                corpus::dominance_pair(&mut item_rng(seed, 2, i)),
            )
        })
        .collect();
    suite("chain_monotone", items, |(x, y): &(Stream, Stream)| {
        let report = axioms::implication_chain_report(x, y, horizon);
        if report.monotone {
            Ok(())
        } else {
            let names: Vec<String> = report
                .entries
                .iter()
                .map(|e| format!("{}={:?}", e.predicate, e.verdict.status))
                .collect();
            Err(format!("x = {x}, y = {y}: {}", names.join(" ")))
        }
    })
}

/// Every increasing subset of `[1, ground]` long enough for `m`.
pub fn sweep_prefixes(ground: u64, m: u64) -> Vec<Vec<u64>> {
    (0u32..1 << ground)
        .map(|mask| {
            (1..=ground)
                .filter(|&k| mask >> (k - 1) & 1 == 1)
                .collect::<Vec<u64>>()
        })
        .filter(|t| t.len() as u64 >= 2 * m + 2)
        .collect()
}

pub fn inequality_suite() -> SuiteResult {
    let items = SWEEP_M
        .iter()
        .flat_map(|&m| {
            sweep_prefixes(SWEEP_GROUND, m)
                .into_iter()
                .map(move |t| (format!("m{m}-{t:?}"), (t, m)))
        })
        .collect();
    suite("inequality_sweep", items, |(t, m): &(Vec<u64>, u64)| {
        let c = gadgets::check_l2e1(t, *m).map_err(|e| e.to_string())?;
        if c.holds && c.all_positive && c.factored_form_matches {
            Ok(())
        } else {
            Err(format!(
                "lhs {} rhs {} positive {} factored {}",
                c.lhs, c.rhs, c.all_positive, c.factored_form_matches
            ))
        }
    })
}

#[derive(Clone, Debug)]
enum GadgetItem {
    Threshold(u64),
    Compare(u64, u64),
    Block(Vec<u64>, Lemma2Case),
}

pub fn gadget_suite(thresholds: u64, horizon: u64) -> SuiteResult {
    let mut items = Vec::new();
    for k in 1..=thresholds {
        items.push((format!("threshold-{k}"), GadgetItem::Threshold(k)));
    }
    for k in 1..thresholds {
        items.push((
            format!("compare-{k}-{}", k + 1),
            GadgetItem::Compare(k, k + 1),
        ));
    }
    for prefix in [vec![], vec![1, 2, 3], vec![2, 3, 5]] {
        for case in [Lemma2Case::A, Lemma2Case::B] {
            items.push((
                format!("block-{}-{prefix:?}", case.name()),
                GadgetItem::Block(prefix.clone(), case),
            ));
        }
    }
    suite("gadget_links", items, |item: &GadgetItem| {
        let report = match item {
            GadgetItem::Threshold(k) => {
                let g = gadgets::lemma1_build(&gadgets::rational_enum(*k))
                    .map_err(|e| e.to_string())?;
                gadgets::lemma1_verify_p1ea(&g, horizon)
            }
            GadgetItem::Compare(a, b) => {
                let (r, s) = (gadgets::rational_enum(*a), gadgets::rational_enum(*b));
                let (r, s) = if r < s { (r, s) } else { (s, r) };
                match gadgets::lemma1_compare_thresholds(&r, &s, horizon) {
                    Ok(report) => report,
                    // unequal thresholds can still share every factorial point
                    Err(gadgets::GadgetError::NotNested | gadgets::GadgetError::TooFewPoints) => {
                        return Ok(())
                    }
                    Err(e) => return Err(e.to_string()),
                }
            }
            GadgetItem::Block(prefix, case) => {
                let g = gadgets::lemma2_build(prefix, *case, None).map_err(|e| e.to_string())?;
                gadgets::lemma2_verify_case(&g, horizon).map_err(|e| e.to_string())?
            }
        };
        match report.status {
            Status::Fails => {
                let bad: Vec<&str> = report
                    .links
                    .iter()
                    .filter(|l| l.verdict.status == Status::Fails)
                    .map(|l| l.claim.as_str())
                    .collect();
                Err(format!("failed links: {}", bad.join("; ")))
            }
            _ => Ok(()),
        }
    })
}

/// Random permutation of `[1, bound]`.
pub fn random_permutation<R: Rng>(rng: &mut R, bound: u64) -> FinitePermutation {
    let mut images: Vec<u64> = (1..=bound).collect();
    images.shuffle(rng);
    FinitePermutation::from_images(images).expect("a shuffle is a bijection")
}

pub fn anonymity_suite(seed: u64, n: usize) -> SuiteResult {
    let items = (0..n as u64)
        .map(|i| {
            let mut rng = item_rng(seed, 4, i);
            let x = corpus::periodic_stream(&mut rng);
            let bound = rng.gen_range(2..=60);
            let permuted = x.apply_permutation(&random_permutation(&mut rng, bound));
            let improved = corpus::density_one_improvement(&mut rng, &x);
            (format!("stream-{i:04}"), (x, permuted, improved))
        })
        .collect();
    suite(
        "cesaro_invariance",
        items,
        |(x, p, z): &(Stream, Stream, Stream)| {
            let w = Swf::Cesaro;
            let value = |s: &Stream| w.evaluate(s).map_err(|e| e.to_string());
            let (a, b, c) = (value(x)?, value(p)?, value(z)?);
            if a.finite().is_none() {
                return Err(format!("{x}: value not exact"));
            }
            if a != b {
                return Err(format!("{x}: permuted value differs"));
            }
            if c.compare(&a) != Some(std::cmp::Ordering::Greater) {
                return Err(format!("{x}: improvement does not raise the value"));
            }
            Ok(())
        },
    )
}

/// Whether some bijection `σ` of the window gives `x_{σ(i)} ≥ y_i` for all `i`.
pub fn brute_window_dominates(x: &[BigRational], y: &[BigRational]) -> bool {
    fn dfs(i: usize, x: &[BigRational], y: &[BigRational], used: &mut Vec<bool>) -> bool {
        if i == y.len() {
            return true;
        }
        for j in 0..x.len() {
            if !used[j] && x[j] >= y[i] {
                used[j] = true;
                if dfs(i + 1, x, y, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    dfs(0, x, y, &mut vec![false; x.len()])
}

pub fn window_suite(seed: u64, n: usize) -> SuiteResult {
    let items = (0..n as u64)
        .map(|i| {
            let mut rng = item_rng(seed, 5, i);
            let len = rng.gen_range(1..=WINDOW_MAX);
            let mut draw = || {
                (0..len)
                    .map(|_| BigRational::from_integer(rng.gen_range(0..4).into()))
                    .collect::<Vec<_>>()
            };
            let x = draw();
            let y = draw();
            (format!("window-{i:04}"), (x, y))
        })
        .collect();
    suite(
        "window_pairing",
        items,
        |(x, y): &(Vec<BigRational>, Vec<BigRational>)| {
            let fast = sorted_window_dominates(x, y);
            let brute = brute_window_dominates(x, y);
            if fast == brute {
                Ok(())
            } else {
                let show =
                    |v: &[BigRational]| v.iter().map(format_rational).collect::<Vec<_>>().join(" ");
                Err(format!(
                    "x = [{}], y = [{}]: sorted {fast}, search {brute}",
                    show(x),
                    show(y)
                ))
            }
        },
    )
}

pub fn run_verify_corpus(
    config: &RunConfig,
    sizes: &VerifySizes,
    inject_fault: bool,
) -> Result<VerifyReport, CliError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| CliError::Config(e.to_string()))?;
    let (seed, h) = (config.seed, config.horizon);
    let suites = pool.install(|| {
        vec![
            density_suite(seed, sizes.density_sets, inject_fault),
            chain_suite(seed, sizes.chain_pairs, h),
            inequality_suite(),
            gadget_suite(sizes.gadget_thresholds, h),
            anonymity_suite(seed, sizes.anonymity_streams),
            window_suite(seed, sizes.window_pairs),
        ]
    });
    let items = suites.iter().map(|s| s.items).sum();
    let failures = suites.iter().map(|s| s.failures.len()).sum();
    Ok(VerifyReport {
        seed,
        sizes: sizes.clone(),
        suites,
        items,
        failures,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    fn q(v: &[i64]) -> Vec<BigRational> {
        v.iter()
            .map(|&n| BigRational::from_integer(BigInt::from(n)))
            .collect()
    }

    #[test]
    fn brute_window_matches_small_cases() {
        assert!(brute_window_dominates(&q(&[3, 1, 2]), &q(&[1, 2, 3])));
        assert!(brute_window_dominates(&q(&[3, 2]), &q(&[2, 2])));
        assert!(!brute_window_dominates(&q(&[3, 1]), &q(&[2, 2])));
        assert!(brute_window_dominates(&[], &[]));
    }

    #[test]
    fn sweep_prefixes_are_increasing_and_long_enough() {
        let all = sweep_prefixes(8, 2);
        // subsets of an 8-set with at least 6 elements: 28 + 8 + 1
        assert_eq!(all.len(), 37);
        assert!(all
            .iter()
            .all(|t| t.len() >= 6 && t.windows(2).all(|w| w[0] < w[1])));
    }

    #[test]
    fn item_streams_are_independent_of_order() {
        let a: u64 = item_rng(7, 1, 3).gen();
        let _ = item_rng(7, 1, 2).gen::<u64>();
        let b: u64 = item_rng(7, 1, 3).gen();
        assert_eq!(a, b);
        assert_ne!(a, item_rng(7, 2, 3).gen::<u64>());
    }

    #[test]
    fn random_permutations_are_bijections() {
        let mut rng = item_rng(1, 9, 0);
        let p = random_permutation(&mut rng, 30);
        let mut images = p.images().to_vec();
        images.sort_unstable();
        assert_eq!(images, (1..=30).collect::<Vec<u64>>());
    }

    #[test]
    fn injected_fault_is_the_only_failure() {
        let clean = density_suite(5, 3, false);
        let faulty = density_suite(5, 3, true);
        assert!(clean.failures.is_empty());
        assert_eq!(faulty.failures.len(), 1);
    }
}
