//! Combinatorial discrepancy: exhaustive minimization, a local-search upper
//! estimate, and the random-coloring threshold bound.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::seeding::{self, stream};
use crate::setsys::{max_imbalance, Coloring, SetSystem};

pub const DEFAULT_EXHAUSTIVE_CAP: usize = 24;

/// Number of leading free elements whose signs define the parallel chunks.
const CHUNK_BITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscResult {
    pub value: u64,
    pub witness: Coloring,
}

/// Exact discrepancy with the default ground-set cap.
pub fn disc_exact(s: &SetSystem) -> Result<DiscResult> {
    disc_exact_capped(s, DEFAULT_EXHAUSTIVE_CAP)
}

/// Exact discrepancy by Gray-code enumeration of the `2^(N-1)` colorings with
/// `χ(1) = +1`.
///
/// Among optimal colorings the witness is the lexicographically smallest sign
/// vector, ordering `-1 < +1`.
pub fn disc_exact_capped(s: &SetSystem, cap: usize) -> Result<DiscResult> {
    let n = s.ground_size();
    if n > cap || n > 63 {
        return Err(Error::GroundSetTooLarge { n, cap: cap.min(63) });
    }
    let free = n - 1;
    let p = free.min(CHUNK_BITS);
    let q = free - p;
    let members = s.memberships();

    let (value, key) = (0u64..1 << p)
        .into_par_iter()
        .map(|prefix| scan_chunk(s, &members, q, prefix))
        .collect::<Vec<_>>()
        .into_iter()
        .min()
        .expect("at least one chunk");

    Ok(DiscResult { value, witness: coloring_from_key(n, key) })
}

// Key bit `pos` holds the sign of element `n - 1 - pos` (0-based), set bit
// meaning +1. Element 0 is fixed to +1, so numeric order on keys is
// lexicographic order on sign vectors.
fn coloring_from_key(n: usize, key: u64) -> Coloring {
    let mut signs = vec![1i8; n];
    for (e, sign) in signs.iter_mut().enumerate().skip(1) {
        let pos = n - 1 - e;
        *sign = if key >> pos & 1 == 1 { 1 } else { -1 };
    }
    Coloring::new(signs).expect("signs are ±1")
}

fn scan_chunk(s: &SetSystem, members: &[Vec<usize>], q: usize, prefix: u64) -> (u64, u64) {
    let n = s.ground_size();
    let mut key = prefix << q;
    let chi = coloring_from_key(n, key);
    let mut sums: Vec<i64> = s
        .sets()
        .iter()
        .map(|set| set.iter().map(|&i| chi.signs()[i] as i64).sum())
        .collect();

    let mut hist = vec![0usize; n + 1];
    for v in &sums {
        hist[v.unsigned_abs() as usize] += 1;
    }
    let mut cur = hist.iter().rposition(|&c| c > 0).unwrap_or(0);
    let mut best = (cur as u64, key);

    for i in 1u64..1 << q {
        let pos = i.trailing_zeros() as usize;
        key ^= 1 << pos;
        let e = n - 1 - pos;
        let delta = if key >> pos & 1 == 1 { 2 } else { -2 };
        for &k in &members[e] {
            let old = sums[k].unsigned_abs() as usize;
            sums[k] += delta;
            let new = sums[k].unsigned_abs() as usize;
            hist[old] -= 1;
            hist[new] += 1;
            cur = cur.max(new);
        }
        while cur > 0 && hist[cur] == 0 {
            cur -= 1;
        }
        best = best.min((cur as u64, key));
    }
    best
}

/// Per-set thresholds `√(2|S| ln M)` of the random coloring bound.
pub fn disc_random_bound(s: &SetSystem) -> Result<Vec<f64>> {
    let m = s.len();
    if m < 2 {
        return Err(Error::DegenerateM(m));
    }
    let log_m = (m as f64).ln();
    Ok(s.sets().iter().map(|set| (2.0 * set.len() as f64 * log_m).sqrt()).collect())
}

/// Outcome of drawing uniform colorings against the per-set thresholds.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomColoringReport {
    pub trials: usize,
    pub satisfied: usize,
}

impl RandomColoringReport {
    pub fn frequency(&self) -> f64 {
        self.satisfied as f64 / self.trials as f64
    }
}

/// Counts how often a uniform coloring meets every threshold of
/// [`disc_random_bound`] at once.
pub fn random_coloring_trials(s: &SetSystem, trials: usize, seed: u64) -> Result<RandomColoringReport> {
    let thresholds = disc_random_bound(s)?;
    let n = s.ground_size();
    let satisfied = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = seeding::rng_for(seed, &[stream::COLORING, t as u64]);
            let chi = Coloring::uniform(n, &mut rng);
            s.sets().iter().zip(&thresholds).all(|(set, &thr)| {
                let v: i64 = set.iter().map(|&i| chi.signs()[i] as i64).sum();
                v.unsigned_abs() as f64 <= thr
            })
        })
        .count();
    Ok(RandomColoringReport { trials, satisfied })
}

/// Upper estimate of the discrepancy: `trials` uniform random starts, each
/// followed by single-flip descent on `(max |χ(S)|, #sets at the max)`.
pub fn disc_heuristic(s: &SetSystem, trials: usize, seed: u64) -> Result<DiscResult> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let members = s.memberships();
    let runs: Vec<(u64, Coloring)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = seeding::rng_for(seed, &[stream::HEURISTIC, t as u64]);
            local_search(s, &members, &mut rng)
        })
        .collect();
    // first trial wins ties
    let (value, witness) = runs
        .into_iter()
        .reduce(|best, cand| if cand.0 < best.0 { cand } else { best })
        .expect("trials >= 1");
    Ok(DiscResult { value, witness })
}

fn local_search<R: Rng + ?Sized>(s: &SetSystem, members: &[Vec<usize>], rng: &mut R) -> (u64, Coloring) {
    let n = s.ground_size();
    let mut signs: Vec<i8> = Coloring::uniform(n, rng).signs().to_vec();
    let mut sums: Vec<i64> = s
        .sets()
        .iter()
        .map(|set| set.iter().map(|&i| signs[i] as i64).sum())
        .collect();
    let score = |sums: &[i64]| {
        let max = sums.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
        let count = sums.iter().filter(|v| v.unsigned_abs() == max).count();
        (max, count)
    };
    let mut current = score(&sums);
    loop {
        let mut best: Option<(usize, (u64, usize))> = None;
        for e in 0..n {
            let delta = -2 * signs[e] as i64;
            for &k in &members[e] {
                sums[k] += delta;
            }
            let cand = score(&sums);
            for &k in &members[e] {
                sums[k] -= delta;
            }
            if cand < current && best.is_none_or(|(_, b)| cand < b) {
                best = Some((e, cand));
            }
        }
        let Some((e, cand)) = best else { break };
        let delta = -2 * signs[e] as i64;
        for &k in &members[e] {
            sums[k] += delta;
        }
        signs[e] = -signs[e];
        current = cand;
    }
    let mut chi = Coloring::new(signs).expect("signs are ±1");
    if chi.signs()[0] == -1 {
        chi = chi.negated();
    }
    (current.0, chi)
}

/// Checks that `witness` attains exactly `value`.
pub fn witness_attains(s: &SetSystem, r: &DiscResult) -> Result<bool> {
    Ok(max_imbalance(s, &r.witness)? == r.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::setsys::{arithmetic_progressions, evaluate_coloring, random_set_system};
    use proptest::prelude::*;

    fn sys(n: usize, sets: &[&[usize]]) -> SetSystem {
        SetSystem::from_one_based(n, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    // Plain enumeration of all 2^N colorings; smallest lexicographic optimum
    // with the first sign fixed to +1.
    fn brute_force(s: &SetSystem) -> (u64, Vec<i8>) {
        let n = s.ground_size();
        let mut best: Option<(u64, Vec<i8>)> = None;
        for mask in 0u64..1 << n {
            let signs: Vec<i8> = (0..n).map(|i| if mask >> (n - 1 - i) & 1 == 1 { 1 } else { -1 }).collect();
            if signs[0] != 1 {
                continue;
            }
            let v = s
                .sets()
                .iter()
                .map(|set| set.iter().map(|&i| signs[i] as i64).sum::<i64>().unsigned_abs())
                .max()
                .unwrap();
            if best.as_ref().is_none_or(|(bv, bs)| (v, &signs) < (*bv, bs)) {
                best = Some((v, signs));
            }
        }
        best.unwrap()
    }

    #[test]
    fn exact_examples() {
        assert_eq!(disc_exact(&sys(2, &[&[1], &[1, 2]])).unwrap().value, 1);
        assert_eq!(disc_exact(&sys(3, &[&[1, 2], &[2, 3], &[1, 3]])).unwrap().value, 2);
        for n in (2..=12).step_by(2) {
            let all: Vec<usize> = (1..=n).collect();
            assert_eq!(disc_exact(&sys(n, &[&all])).unwrap().value, 0);
        }
        assert_eq!(disc_exact(&sys(1, &[&[1]])).unwrap().value, 1);
    }

    #[test]
    fn witness_tie_break_is_lexicographic() {
        // single set {1,2,3,4}: optimum 0, smallest vector with χ(1)=+1 is (+,-,-,+)
        let r = disc_exact(&sys(4, &[&[1, 2, 3, 4]])).unwrap();
        assert_eq!(r.witness.signs(), &[1, -1, -1, 1]);
    }

    #[test]
    fn exact_matches_brute_force_on_progressions() {
        for n in 1..=11 {
            let s = arithmetic_progressions(n).unwrap();
            let r = disc_exact(&s).unwrap();
            let (v, w) = brute_force(&s);
            assert_eq!(r.value, v, "N={n}");
            assert_eq!(r.witness.signs(), w.as_slice());
        }
    }

    #[test]
    fn cap_is_enforced() {
        let s = random_set_system(10, 3, 1).unwrap();
        assert!(matches!(disc_exact_capped(&s, 9), Err(Error::GroundSetTooLarge { .. })));
        assert!(disc_exact_capped(&s, 10).is_ok());
    }

    #[test]
    fn random_bound_examples() {
        let t = disc_random_bound(&sys(2, &[&[1, 2], &[1]])).unwrap();
        assert_close!(t[0], 1.6651, 1e-4);
        assert_close!(t[0], (4.0 * 2f64.ln()).sqrt(), 1e-12);
        assert!(matches!(disc_random_bound(&sys(2, &[&[1]])), Err(Error::DegenerateM(1))));

        let singletons = sys(5, &[&[1], &[2], &[3], &[4], &[5]]);
        let thr = disc_random_bound(&singletons).unwrap();
        assert!(thr.iter().all(|&x| x >= 1.0));
        let r = random_coloring_trials(&singletons, 200, 3).unwrap();
        assert_eq!(r.satisfied, 200);
    }

    #[test]
    fn random_coloring_meets_bound_half_the_time() {
        let s = random_set_system(20, 20, 77).unwrap();
        let r = random_coloring_trials(&s, 10_000, 78).unwrap();
        assert!(r.frequency() >= 0.5, "frequency {}", r.frequency());
    }

    #[test]
    fn heuristic_examples() {
        let s = sys(2, &[&[1], &[2]]);
        let r = disc_heuristic(&s, 1, 0).unwrap();
        assert_eq!(r.value, 1);
        assert!(witness_attains(&s, &r).unwrap());

        let ap = arithmetic_progressions(9).unwrap();
        let a = disc_heuristic(&ap, 1, 5).unwrap();
        let b = disc_heuristic(&ap, 1, 5).unwrap();
        assert_eq!(a, b);
        assert!(matches!(disc_heuristic(&ap, 0, 5), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn heuristic_normalizes_first_sign() {
        let s = random_set_system(8, 6, 4).unwrap();
        for seed in 0..10 {
            assert_eq!(disc_heuristic(&s, 3, seed).unwrap().witness.signs()[0], 1);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn exact_invariants(n in 1usize..11, m in 1usize..8, seed in any::<u64>(), perm_seed in any::<u64>()) {
            let s = random_set_system(n, m, seed).unwrap();
            let r = disc_exact(&s).unwrap();
            prop_assert!(witness_attains(&s, &r).unwrap());
            prop_assert_eq!(r.witness.signs()[0], 1);
            prop_assert_eq!(r.value, brute_force(&s).0);

            let mut perm: Vec<usize> = (0..n).collect();
            let mut rng = seeding::rng_for(perm_seed, &[0]);
            rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut rng);
            prop_assert_eq!(disc_exact(&s.relabel(&perm).unwrap()).unwrap().value, r.value);

            if s.sets().iter().any(|x| x.len() == 1) {
                prop_assert!(r.value >= 1);
            }
            let zero = evaluate_coloring(&s, &r.witness).unwrap().iter().all(|&v| v == 0);
            prop_assert_eq!(r.value == 0, zero);

            let h = disc_heuristic(&s, 2, seed).unwrap();
            prop_assert!(h.value >= r.value);
            prop_assert!(witness_attains(&s, &h).unwrap());
        }
    }
}
