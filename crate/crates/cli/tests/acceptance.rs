//! Acceptance run: one pass/fail line per criterion, each with a pinned time limit.
//! Expected values come from independent oracles written here or from the worked
//! examples of the source text.

use std::cmp::Ordering;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use densitylab::axioms::{self, PairAnalysis, Predicate, Status};
use densitylab::corpus;
use densitylab::gadgets::{self, LinkKind};
use densitylab::setalg::{FactorialFamily, IndexSet};
use densitylab::streams::{FinitePermutation, Stream};
use densitylab::swf::Swf;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEED: u64 = 20_240_601;

const SETS: usize = 200;
const COUNT_POINTS: [u64; 3] = [720, 5040, 40320];
const CHAIN_PAIRS: usize = 500;
const PERMUTATIONS: usize = 100;
const IMPROVEMENTS: usize = 100;
const LEMMA1_HORIZON: u64 = 5040;
const SWEEP_GROUND: u64 = 12;
const SWEEP_M: [u64; 3] = [2, 3, 4];
const BLOCK_PREFIXES: usize = 20;
/// Largest checkpoint scanned point by point for a block certificate (10!).
const BLOCK_SCAN_MAX: u64 = 3_628_800;
const WINDOW_PAIRS: usize = 100;
const WINDOW_MAX: usize = 8;
const VERIFY_SEED: &str = "17";

const LIMIT_DENSITY: Duration = Duration::from_secs(60);
const LIMIT_WORKED_DENSITY: Duration = Duration::from_secs(1);
const LIMIT_CHAIN: Duration = Duration::from_secs(120);
const LIMIT_CESARO: Duration = Duration::from_secs(60);
const LIMIT_LEMMA1: Duration = Duration::from_secs(30);
const LIMIT_SWEEP: Duration = Duration::from_secs(60);
const LIMIT_BLOCKS: Duration = Duration::from_secs(60);
const LIMIT_WINDOWS: Duration = Duration::from_secs(60);
/// No limit is stated for determinism; this bounds two full `verify` runs.
const LIMIT_DETERMINISM: Duration = Duration::from_secs(600);

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn q(p: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(d))
}

fn int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn fact(n: u64) -> BigUint {
    (1..=n).fold(BigUint::one(), |acc, k| acc * k)
}

// ---- membership oracle over the set tree ----

/// The first `n` terms of the breadth-first Stern–Brocot enumeration of `(0, 1)`,
/// built level by level from mediants.
fn stern_brocot(n: usize) -> Vec<(u64, u64)> {
    let mut row: Vec<(u64, u64)> = vec![(0, 1), (1, 1)];
    let mut out = Vec::new();
    while out.len() < n {
        let mut next = Vec::with_capacity(2 * row.len());
        for w in row.windows(2) {
            let m = (w[0].0 + w[1].0, w[0].1 + w[1].1);
            next.push(w[0]);
            next.push(m);
            out.push(m);
        }
        next.push(*row.last().unwrap());
        row = next;
    }
    out.truncate(n);
    out
}

struct Oracle {
    enumeration: Vec<(u64, u64)>,
}

impl Oracle {
    fn new(upto: usize) -> Self {
        Oracle {
            enumeration: stern_brocot(upto.max(2000)),
        }
    }

    /// `mask[t]` for `t ∈ [0, n]`, never set at 0.
    fn mask(&self, s: &IndexSet, n: usize) -> Vec<bool> {
        let mut m = vec![false; n + 1];
        let small = |v: &BigUint| v.to_usize().filter(|&x| x <= n);
        match s {
            IndexSet::Finite(elems) => elems.iter().filter_map(small).for_each(|t| m[t] = true),
            IndexSet::ArithProg { start, step } => {
                if let Some(a) = small(start) {
                    let d = step.to_usize().unwrap();
                    (a..=n).step_by(d).for_each(|t| m[t] = true);
                }
            }
            IndexSet::Interval { lo, hi } => {
                if let Some(a) = small(lo) {
                    let b = hi.to_usize().unwrap_or(n).min(n);
                    (a..=b).for_each(|t| m[t] = true);
                }
            }
            IndexSet::FactorialPoints(base) => {
                let b = self.mask(base, 20);
                for k in 1..=20u64 {
                    match fact(k).to_usize().filter(|&f| f <= n) {
                        Some(f) if b[k as usize] => m[f] = true,
                        Some(_) => {}
                        None => break,
                    }
                }
            }
            IndexSet::EnumThreshold(r) => {
                let (rn, rd) = (r.numer().clone(), r.denom().clone());
                for t in 1..=n {
                    let (p, d) = self.enumeration[t - 1];
                    m[t] = BigInt::from(p) * &rd >= &rn * BigInt::from(d);
                }
            }
            IndexSet::FactorialIntervals(family) => {
                let (seq, cover) = match family {
                    FactorialFamily::Alternating(seq) => (seq, false),
                    FactorialFamily::Cover(seq) => (seq, true),
                    FactorialFamily::Explicit(_) => panic!("explicit blocks are not generated"),
                };
                let sm = self.mask(seq, 1000);
                let terms: Vec<u64> = (1..=1000u64).filter(|&k| sm[k as usize]).collect();
                // factorials beyond 20! exceed every scanned point
                let f = |k: u64| {
                    if k <= 20 {
                        fact(k).to_usize().unwrap_or(usize::MAX)
                    } else {
                        usize::MAX
                    }
                };
                let mut j = 0;
                loop {
                    if cover {
                        let (Some(&a), Some(&b), Some(&c)) =
                            (terms.get(j), terms.get(j + 1), terms.get(j + 2))
                        else {
                            break;
                        };
                        let lo = f(a);
                        if lo >= n {
                            break;
                        }
                        let hi = if c <= 20 {
                            f(c) - f(c) / f(b)
                        } else {
                            usize::MAX
                        };
                        (lo + 1..=hi.min(n)).for_each(|t| m[t] = true);
                    } else {
                        let (Some(&a), Some(&b)) = (terms.get(j), terms.get(j + 1)) else {
                            break;
                        };
                        let lo = f(a);
                        if lo > n {
                            break;
                        }
                        (lo..=f(b).min(n)).for_each(|t| m[t] = true);
                    }
                    j += 2;
                }
            }
            IndexSet::Union(a, b) => {
                let (x, y) = (self.mask(a, n), self.mask(b, n));
                (1..=n).for_each(|t| m[t] = x[t] || y[t]);
            }
            IndexSet::Inter(a, b) => {
                let (x, y) = (self.mask(a, n), self.mask(b, n));
                (1..=n).for_each(|t| m[t] = x[t] && y[t]);
            }
            IndexSet::Diff(a, b) => {
                let (x, y) = (self.mask(a, n), self.mask(b, n));
                (1..=n).for_each(|t| m[t] = x[t] && !y[t]);
            }
            IndexSet::Compl(a) => {
                let x = self.mask(a, n);
                (1..=n).for_each(|t| m[t] = !x[t]);
            }
        }
        m
    }
}

// ---- criteria ----

fn density_oracle() -> Outcome {
    let n = *COUNT_POINTS.last().unwrap() as usize;
    let oracle = Oracle::new(n);
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    for i in 0..SETS {
        let depth = rng.gen_range(0..=3);
        let set = corpus::index_set(&mut rng, depth);
        let mask = oracle.mask(&set, n);
        for p in COUNT_POINTS {
            let brute = mask[..=p as usize].iter().filter(|&&b| b).count();
            let counted = set.count(&BigUint::from(p));
            ensure(counted == BigUint::from(brute), || {
                format!("set #{i} {set}: count({p}) = {counted}, oracle {brute}")
            })?;
        }
    }
    Ok(format!("{SETS} sets, counts at 6!, 7!, 8! match"))
}

fn worked_densities() -> Outcome {
    let check = |text: &str, lower: BigRational, upper: BigRational| -> Result<(), String> {
        let d = IndexSet::parse(text).map_err(|e| e.to_string())?.density();
        let got = (d.lower.exact().cloned(), d.upper.exact().cloned());
        ensure(got == (Some(lower.clone()), Some(upper.clone())), || {
            format!("{text}: got {got:?}, expected ({lower}, {upper})")
        })
    };
    check("factorials(nat)", int(0), int(0))?;
    check("compl(factorials(nat))", int(1), int(1))?;
    check("falt(nat)", int(0), int(1))?;
    Ok("d(S) = 0, d(ℕ\\S) = 1, factorial intervals 0 / 1".into())
}

fn chain() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 3);
    let (mut decided, mut drawn) = (0, 0);
    while decided < CHAIN_PAIRS {
        drawn += 1;
        ensure(drawn <= 4 * CHAIN_PAIRS, || {
            format!("only {decided} decidable pairs in {drawn} draws")
        })?;
        let (x, y) = corpus::dominance_pair(&mut rng);
        let analysis = PairAnalysis::new(&x, &y, 5040);
        if analysis.comparison.is_err() {
            continue;
        }
        decided += 1;
        let statuses: Vec<Status> = Predicate::CHAIN
            .into_iter()
            .map(|p| analysis.evaluate(p).status)
            .collect();
        // each Holds must be followed by Holds all the way down
        for i in 0..statuses.len() {
            for j in i + 1..statuses.len() {
                ensure(
                    statuses[i] != Status::Holds || statuses[j] == Status::Holds,
                    || {
                        format!(
                            "x = {x}, y = {y}: {:?} holds, {:?} is {:?}",
                            Predicate::CHAIN[i],
                            Predicate::CHAIN[j],
                            statuses[j]
                        )
                    },
                )?;
            }
        }
    }
    Ok(format!(
        "{decided} decidable pairs ({drawn} drawn), no violations"
    ))
}

fn cesaro_properties() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 4);
    let w = Swf::Cesaro;
    for i in 0..PERMUTATIONS {
        let x = corpus::periodic_stream(&mut rng);
        let bound = rng.gen_range(2..=200u64);
        let mut images: Vec<u64> = (1..=bound).collect();
        images.shuffle(&mut rng);
        let p = x.apply_permutation(&FinitePermutation::from_images(images).unwrap());
        let (a, b) = (
            w.evaluate(&x).map_err(|e| e.to_string())?,
            w.evaluate(&p).map_err(|e| e.to_string())?,
        );
        ensure(a.finite().is_some() && a == b, || {
            format!("permutation #{i} of {x}: {a:?} vs {b:?}")
        })?;
    }
    for i in 0..IMPROVEMENTS {
        let x = corpus::periodic_stream(&mut rng);
        let z = corpus::density_one_improvement(&mut rng, &x);
        // z ≥ x on a long prefix, strictly on all but a few points
        let (px, pz) = (x.prefix(2000), z.prefix(2000));
        let strict = px.iter().zip(&pz).filter(|(a, b)| b > a).count();
        ensure(
            px.iter().zip(&pz).all(|(a, b)| b >= a) && strict >= 1960,
            || format!("improvement #{i} of {x} is not a density-one improvement on the prefix"),
        )?;
        let (a, c) = (
            w.evaluate(&x).map_err(|e| e.to_string())?,
            w.evaluate(&z).map_err(|e| e.to_string())?,
        );
        ensure(
            c.compare(&a) == Some(Ordering::Greater)
                && a.finite().is_some()
                && c.finite().is_some(),
            || format!("improvement #{i} of {x}: {c:?} not above {a:?}"),
        )?;
    }
    Ok(format!(
        "{PERMUTATIONS} permutations equal, {IMPROVEMENTS} improvements strictly above"
    ))
}

fn all_verified_hold(r: &gadgets::GadgetReport) -> Result<(), String> {
    for l in &r.links {
        ensure(
            l.kind != LinkKind::Verified || l.verdict.status == Status::Holds,
            || format!("{} link {:?} is {:?}", r.gadget, l.claim, l.verdict.status),
        )?;
    }
    ensure(r.status == Status::Holds, || {
        format!("{} status {:?}", r.gadget, r.status)
    })
}

fn lemma1() -> Outcome {
    let h = LEMMA1_HORIZON;
    let (r, s) = (q(1, 3), q(2, 3));
    for t in [&r, &s] {
        let g = gadgets::lemma1_build(t).map_err(|e| e.to_string())?;
        all_verified_hold(&gadgets::lemma1_verify_p1ea(&g, h))?;
    }
    let cmp = gadgets::lemma1_compare_thresholds(&r, &s, h).map_err(|e| e.to_string())?;
    all_verified_hold(&cmp)?;
    let canonical_case = cmp.case.clone().unwrap_or_default();

    let base = |v: Vec<u64>, label: &str| {
        gadgets::lemma1_from_base(IndexSet::finite(v).unwrap(), label.into())
            .map_err(|e| e.to_string())
    };
    let gr = base(vec![1, 2, 3, 4, 7], "r")?;
    let gs = base(vec![1, 2, 7], "s")?;
    let ints = |v: &[i64]| v.iter().map(|&a| int(a)).collect::<Vec<_>>();
    ensure(gr.x.prefix(7) == ints(&[1, 1, 2, 3, 4, 1, 5]), || {
        format!("x(r) prefix {:?}", gr.x.prefix(7))
    })?;
    ensure(gr.z.prefix(7) == ints(&[2, 1, 3, 4, 5, 1, 6]), || {
        format!("z(r) prefix {:?}", gr.z.prefix(7))
    })?;
    ensure(gs.x.prefix(7) == ints(&[1, 1, 2, 3, 4, 5, 6]), || {
        format!("x(s) prefix {:?}", gs.x.prefix(7))
    })?;
    let fb = gadgets::lemma1_case_compare(&gr, &gs, h).map_err(|e| e.to_string())?;
    ensure(fb.case.as_deref() == Some("b"), || {
        format!("explicit-base case {:?}", fb.case)
    })?;
    all_verified_hold(&fb)?;
    let zp = fb.stream("z_pi").ok_or("no permuted stream")?;
    ensure(zp.prefix(7) == ints(&[1, 1, 2, 3, 4, 5, 6]), || {
        format!("z^π prefix {:?}", zp.prefix(7))
    })?;
    // u₂ = 4! = 24: equal before it, 23 > 1 at it
    ensure(
        zp.prefix(23) == gs.x.prefix(23) && (gs.x.at(24), zp.at(24)) == (int(23), int(1)),
        || "z^π and x(s) disagree around u₂".into(),
    )?;
    Ok(format!(
        "1/3 < 2/3 case {canonical_case}, explicit-base case b with permutation, prefixes exact"
    ))
}

fn sweep() -> Outcome {
    let mut checked = 0;
    for m in SWEEP_M {
        for mask in 0u32..1 << SWEEP_GROUND {
            let t: Vec<u64> = (1..=SWEEP_GROUND)
                .filter(|&k| mask >> (k - 1) & 1 == 1)
                .collect();
            if (t.len() as u64) < 2 * m + 2 {
                continue;
            }
            let f = |i: u64| fact(t[i as usize - 1]);
            let lhs = f(2 * m + 2) / f(3);
            let rhs: BigUint = (2..=m + 1).map(|j| f(2 * j) / f(2 * j - 1)).sum();
            // listed for j = m+1 down to 2
            let parens: Vec<BigInt> = (2..=m + 1)
                .rev()
                .map(|j| {
                    BigInt::from((f(2 * m + 2) / f(2 * j)) * (f(2 * j - 1) / f(3)))
                        - BigInt::from(m)
                })
                .collect();
            let c = gadgets::check_l2e1(&t, m).map_err(|e| e.to_string())?;
            ensure(
                c.lhs == lhs && c.rhs == rhs && c.parentheses == parens,
                || format!("{t:?}, m = {m}: values differ"),
            )?;
            ensure(lhs > rhs && c.holds, || {
                format!("{t:?}, m = {m}: {lhs} ≤ {rhs}")
            })?;
            ensure(
                parens.iter().all(|p| p > &BigInt::zero())
                    && c.all_positive
                    && c.factored_form_matches,
                || format!("{t:?}, m = {m}: parenthesis not positive"),
            )?;
            checked += 1;
        }
    }
    Ok(format!("{checked} (prefix, m) instances, zero failures"))
}

fn blocks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 7);
    let mut certified = 0;
    for i in 0..BLOCK_PREFIXES {
        let mut pool: Vec<u64> = (1..=10).collect();
        pool.shuffle(&mut rng);
        let mut prefix: Vec<u64> = pool[..rng.gen_range(3..=7)].to_vec();
        prefix.sort_unstable();
        // the prefix continues with every integer after its last term
        let term = |k: u64| -> u64 {
            let k = k as usize;
            if k <= prefix.len() {
                prefix[k - 1]
            } else {
                prefix.last().unwrap() + (k - prefix.len()) as u64
            }
        };
        let mut m = 1;
        while fact(term(2 * m + 1)) <= BigUint::from(BLOCK_SCAN_MAX) {
            let top = fact(term(2 * m + 1)).to_usize().unwrap();
            let mut mask = vec![false; top + 1];
            for k in 1..=m {
                let lo = fact(term(2 * k - 1)).to_usize().unwrap();
                let c = fact(term(2 * k + 1)).to_usize().unwrap();
                let hi = c - c / fact(term(2 * k)).to_usize().unwrap();
                (lo + 1..=hi).for_each(|t| mask[t] = true);
            }
            let brute = mask.iter().filter(|&&b| b).count();
            let cert = gadgets::block_certificate(&prefix, m).map_err(|e| e.to_string())?;
            let closed: BigUint = cert.block_sizes.iter().sum();
            ensure(
                cert.counted == BigUint::from(brute) && closed == BigUint::from(brute),
                || {
                    format!("prefix #{i} {prefix:?}, m = {m}: closed form {closed}, counted {}, brute {brute}", cert.counted)
                },
            )?;
            certified += 1;
            m += 1;
        }
        ensure(m > 1, || {
            format!("prefix #{i} {prefix:?} has no feasible m")
        })?;
    }
    Ok(format!(
        "{BLOCK_PREFIXES} prefixes, {certified} (prefix, m) checkpoints exact"
    ))
}

/// Exhaustive search for a bijection `σ` with `x_{σ(i)} ≥ y_i`.
fn matching_exists(x: &[BigRational], y: &[BigRational]) -> bool {
    fn go(i: usize, x: &[BigRational], y: &[BigRational], used: &mut [bool]) -> bool {
        if i == y.len() {
            return true;
        }
        (0..x.len()).any(|j| {
            if used[j] || x[j] < y[i] {
                return false;
            }
            used[j] = true;
            let ok = go(i + 1, x, y, used);
            used[j] = false;
            ok
        })
    }
    go(0, x, y, &mut vec![false; x.len()])
}

fn suppes_sen() -> Outcome {
    let x = Stream::parse("piecewise(default=0; ap(1,2):1)").map_err(|e| e.to_string())?;
    let y = Stream::parse("piecewise(default=0; ap(2,2):1)").map_err(|e| e.to_string())?;
    let v = axioms::suppes_sen_compare(&x, &y, 5040);
    ensure(v.status == Status::Incomparable, || {
        format!("alternating pair is {:?}", v.status)
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
    let mut windows = 0;
    for i in 0..WINDOW_PAIRS {
        let xs: Vec<BigRational> = (0..WINDOW_MAX).map(|_| int(rng.gen_range(0..4))).collect();
        let ys: Vec<BigRational> = (0..WINDOW_MAX).map(|_| int(rng.gen_range(0..4))).collect();
        for n in 1..=WINDOW_MAX {
            let (a, b) = (&xs[..n], &ys[..n]);
            ensure(
                axioms::sorted_window_dominates(a, b) == matching_exists(a, b),
                || format!("pair #{i}, window {n}: sorted and exhaustive disagree"),
            )?;
            windows += 1;
        }
    }
    Ok(format!(
        "alternating pair incomparable, {windows} windows agree"
    ))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_densitylab"))
            .args(["verify", "--seed", VERIFY_SEED])
            .env_remove("DENSITYLAB_HORIZON")
            .output()
            .map_err(|e| e.to_string())
    };
    let (a, b) = (run()?, run()?);
    ensure(a.status.success() && b.status.success(), || {
        format!(
            "verify exited with {:?} / {:?}: {}",
            a.status.code(),
            b.status.code(),
            String::from_utf8_lossy(&a.stderr)
        )
    })?;
    ensure(a.stdout == b.stdout, || "reports differ".into())?;
    Ok(format!("two runs, {} identical bytes", a.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 9] = [
        ("density oracle equivalence", LIMIT_DENSITY, density_oracle),
        (
            "worked density examples",
            LIMIT_WORKED_DENSITY,
            worked_densities,
        ),
        ("dominance chain", LIMIT_CHAIN, chain),
        (
            "Cesàro anonymity and improvements",
            LIMIT_CESARO,
            cesaro_properties,
        ),
        ("threshold gadget", LIMIT_LEMMA1, lemma1),
        ("block inequality sweep", LIMIT_SWEEP, sweep),
        ("block density certificate", LIMIT_BLOCKS, blocks),
        (
            "Suppes–Sen incomparability and windows",
            LIMIT_WINDOWS,
            suppes_sen,
        ),
        ("verify determinism", LIMIT_DETERMINISM, determinism),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let (pass, detail) = match outcome {
            Ok(d) if took <= limit => (true, d),
            Ok(d) => (false, format!("{d}; over the time limit")),
            Err(e) => (false, e),
        };
        failed += usize::from(!pass);
        println!(
            "criterion {} {} {name}: {detail} ({:.2}s / {}s)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
