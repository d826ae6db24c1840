//! Set systems on `[N]`, ±1 colorings, and the embedding of a set system as
//! a system of diagonal projections.
//!
//! Indices are 0-based in memory and 1-based in every serialized form.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matcore::OrthogonalProjection;
use crate::scalar::Real;
use crate::seeding::{self, stream};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "SetSystemJson", into = "SetSystemJson")]
pub struct SetSystem {
    ground_size: usize,
    sets: Vec<Vec<usize>>,
}

/// Wire form: `{"n": N, "sets": [[1, 3, 5], ...]}` with 1-based indices.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SetSystemJson {
    pub n: usize,
    pub sets: Vec<Vec<usize>>,
}

impl TryFrom<SetSystemJson> for SetSystem {
    type Error = Error;
    fn try_from(j: SetSystemJson) -> Result<Self> {
        SetSystem::from_one_based(j.n, j.sets)
    }
}

impl From<SetSystem> for SetSystemJson {
    fn from(s: SetSystem) -> Self {
        SetSystemJson { n: s.ground_size, sets: s.sets_one_based() }
    }
}

impl SetSystem {
    /// Builds from 1-based index lists. Lists are sorted; repeated indices
    /// within one list are rejected.
    pub fn from_one_based(n: usize, sets: Vec<Vec<usize>>) -> Result<Self> {
        let mut zero = Vec::with_capacity(sets.len());
        for set in sets {
            let mut s = Vec::with_capacity(set.len());
            for i in set {
                if i == 0 || i > n {
                    return Err(Error::IndexOutOfRange { index: i, n });
                }
                s.push(i - 1);
            }
            zero.push(s);
        }
        Self::from_zero_based(n, zero)
    }

    pub fn from_zero_based(n: usize, mut sets: Vec<Vec<usize>>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSetSystem("ground set must be non-empty".into()));
        }
        if sets.is_empty() {
            return Err(Error::InvalidSetSystem("system must contain at least one set".into()));
        }
        for s in &mut sets {
            s.sort_unstable();
            if let Some(&bad) = s.iter().find(|&&i| i >= n) {
                return Err(Error::IndexOutOfRange { index: bad + 1, n });
            }
            if s.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::InvalidSetSystem("repeated index within a set".into()));
            }
        }
        Ok(Self { ground_size: n, sets })
    }

    pub fn ground_size(&self) -> usize {
        self.ground_size
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// Member sets with 0-based indices.
    pub fn sets(&self) -> &[Vec<usize>] {
        &self.sets
    }

    pub fn sets_one_based(&self) -> Vec<Vec<usize>> {
        self.sets.iter().map(|s| s.iter().map(|&i| i + 1).collect()).collect()
    }

    /// Applies a permutation of the ground set: element `i` becomes `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.ground_size {
            return Err(Error::DimMismatch { expected: self.ground_size, found: perm.len() });
        }
        let sets = self.sets.iter().map(|s| s.iter().map(|&i| perm[i]).collect()).collect();
        Self::from_zero_based(self.ground_size, sets)
    }

    /// For each ground element, the indices of the sets containing it.
    pub fn memberships(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.ground_size];
        for (k, s) in self.sets.iter().enumerate() {
            for &i in s {
                out[i].push(k);
            }
        }
        out
    }
}

/// A ±1 coloring of `[N]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<i8>", into = "Vec<i8>")]
pub struct Coloring {
    signs: Vec<i8>,
}

impl TryFrom<Vec<i8>> for Coloring {
    type Error = Error;
    fn try_from(v: Vec<i8>) -> Result<Self> {
        Coloring::new(v)
    }
}

impl From<Coloring> for Vec<i8> {
    fn from(c: Coloring) -> Self {
        c.signs
    }
}

impl Coloring {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::InvalidColoring("empty coloring".into()));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::InvalidColoring("entries must be -1 or +1".into()));
        }
        Ok(Self { signs })
    }

    pub fn all_plus(n: usize) -> Self {
        Self { signs: vec![1; n] }
    }

    /// Element `i` (0-based) is +1 iff bit `i` of `mask` is set.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        Self { signs: (0..n).map(|i| if mask >> i & 1 == 1 { 1 } else { -1 }).collect() }
    }

    pub fn uniform<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self { signs: (0..n).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect() }
    }

    pub fn len(&self) -> usize {
        self.signs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.signs.is_empty()
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn negated(&self) -> Self {
        Self { signs: self.signs.iter().map(|&s| -s).collect() }
    }
}

/// Every `A_{a,d,l} ∩ [N]` with `A_{a,d,l} = {a + kd : 0 ≤ k ≤ l}` and
/// `a, d, l ∈ [N]`, deduplicated and sorted by (size, lexicographic).
pub fn arithmetic_progressions(n: usize) -> Result<SetSystem> {
    if n == 0 {
        return Err(Error::InvalidSetSystem("ground set must be non-empty".into()));
    }
    let mut family = BTreeSet::new();
    for a in 1..=n {
        for d in 1..=n {
            // longest progression from a with step d that stays in [N]
            let max_k = (n - a) / d;
            for l in 1..=n {
                let len = l.min(max_k);
                family.insert((0..=len).map(|k| a - 1 + k * d).collect::<Vec<_>>());
            }
        }
    }
    let mut sets: Vec<Vec<usize>> = family.into_iter().collect();
    sets.sort_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)));
    SetSystem::from_zero_based(n, sets)
}

/// `M` subsets of `[N]`, each element included independently with
/// probability 1/2. Set `k` draws from its own stream of `seed`.
pub fn random_set_system(n: usize, m: usize, seed: u64) -> Result<SetSystem> {
    if n == 0 || m == 0 {
        return Err(Error::InvalidSetSystem("N and M must be positive".into()));
    }
    let sets = (0..m)
        .map(|k| {
            let mut rng = seeding::rng_for(seed, &[stream::SET_SYSTEM, k as u64]);
            (0..n).filter(|_| rng.random::<bool>()).collect()
        })
        .collect();
    SetSystem::from_zero_based(n, sets)
}

/// A finite list of projections of a common `C^N`.
#[derive(Clone, Debug)]
pub struct ProjectionSystem<T: Real> {
    dim: usize,
    projections: Vec<OrthogonalProjection<T>>,
}

impl<T: Real> ProjectionSystem<T> {
    pub fn new(projections: Vec<OrthogonalProjection<T>>) -> Result<Self> {
        let first = projections
            .first()
            .ok_or_else(|| Error::InvalidArgument("projection system must be non-empty".into()))?;
        let dim = first.dim();
        if let Some(p) = projections.iter().find(|p| p.dim() != dim) {
            return Err(Error::DimMismatch { expected: dim, found: p.dim() });
        }
        Ok(Self { dim, projections })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projections.is_empty()
    }

    pub fn projections(&self) -> &[OrthogonalProjection<T>] {
        &self.projections
    }

    pub fn iter(&self) -> std::slice::Iter<'_, OrthogonalProjection<T>> {
        self.projections.iter()
    }
}

/// `P_S` = coordinate projection onto `span{e_i : i ∈ S}`, one per set, in
/// order.
pub fn to_projection_system<T: Real>(s: &SetSystem) -> ProjectionSystem<T> {
    let projections = s
        .sets()
        .iter()
        .map(|set| OrthogonalProjection::coordinate(s.ground_size(), set).expect("validated set"))
        .collect();
    ProjectionSystem::new(projections).expect("set systems are non-empty")
}

/// Signed sums `χ(S) = Σ_{s∈S} χ(s)`, one per set.
pub fn evaluate_coloring(s: &SetSystem, chi: &Coloring) -> Result<Vec<i64>> {
    if chi.len() != s.ground_size() {
        return Err(Error::DimMismatch { expected: s.ground_size(), found: chi.len() });
    }
    Ok(s.sets()
        .iter()
        .map(|set| set.iter().map(|&i| chi.signs[i] as i64).sum())
        .collect())
}

/// `max_S |χ(S)|`.
pub fn max_imbalance(s: &SetSystem, chi: &Coloring) -> Result<u64> {
    Ok(evaluate_coloring(s, chi)?.into_iter().map(|v| v.unsigned_abs()).max().unwrap_or(0))
}

/// `M × N` 0/1 matrix with `A[i][j] = 1` iff element `j` lies in set `i`.
pub fn incidence_matrix(s: &SetSystem) -> Vec<Vec<u8>> {
    s.sets()
        .iter()
        .map(|set| {
            let mut row = vec![0u8; s.ground_size()];
            for &i in set {
                row[i] = 1;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn sys(n: usize, sets: &[&[usize]]) -> SetSystem {
        SetSystem::from_one_based(n, sets.iter().map(|s| s.to_vec()).collect()).unwrap()
    }

    #[test]
    fn ap_small_cases() {
        assert_eq!(arithmetic_progressions(1).unwrap().sets_one_based(), vec![vec![1]]);
        assert_eq!(
            arithmetic_progressions(2).unwrap().sets_one_based(),
            vec![vec![1], vec![2], vec![1, 2]]
        );
        let ap3 = arithmetic_progressions(3).unwrap().sets_one_based();
        assert!(ap3.contains(&vec![1, 3]));
        assert!(ap3.contains(&vec![1, 2, 3]));
        // {1},{2},{3},{1,2},{1,3},{2,3},{1,2,3}: every subset that is an AP
        assert_eq!(ap3.len(), 7);
    }

    #[test]
    fn ap_contains_all_singletons_and_is_cubic_at_most() {
        for n in 1..=12 {
            let s = arithmetic_progressions(n).unwrap();
            for i in 1..=n {
                assert!(s.sets_one_based().contains(&vec![i]));
            }
            assert!(s.len() <= n * n * n);
        }
    }

    #[test]
    fn random_system_replays() {
        let a = random_set_system(3, 2, 11).unwrap();
        let b = random_set_system(3, 2, 11).unwrap();
        assert_eq!(a, b);
        let one = random_set_system(1, 1, 5).unwrap();
        assert!(one.sets()[0].is_empty() || one.sets()[0] == vec![0]);
    }

    #[test]
    fn random_system_inclusion_frequency() {
        let s = random_set_system(1, 10_000, 2024).unwrap();
        let hits = s.sets().iter().filter(|x| !x.is_empty()).count();
        let freq = hits as f64 / 10_000.0;
        assert!((freq - 0.5).abs() <= 0.02, "frequency {freq}");
    }

    #[test]
    fn embedding_examples() {
        let p = to_projection_system::<f64>(&sys(2, &[&[1]]));
        assert_eq!(p.projections()[0].rank(), 1);
        assert_eq!(p.projections()[0].matrix()[(0, 0)].re, 1.0);
        assert_eq!(p.projections()[0].matrix()[(1, 1)].re, 0.0);

        let p = to_projection_system::<f64>(&sys(2, &[&[1, 2]]));
        assert_eq!(p.projections()[0].rank(), 2);

        let p = to_projection_system::<f64>(&sys(3, &[&[2, 3]]));
        let d: Vec<f64> = (0..3).map(|i| p.projections()[0].matrix()[(i, i)].re).collect();
        assert_eq!(d, vec![0.0, 1.0, 1.0]);
        assert_eq!(p.projections()[0].rank(), 2);
    }

    #[test]
    fn coloring_evaluation() {
        let s = sys(3, &[&[1, 2], &[1, 2, 3], &[3]]);
        let chi = Coloring::new(vec![1, -1, -1]).unwrap();
        assert_eq!(evaluate_coloring(&s, &chi).unwrap(), vec![0, -1, -1]);
        let plus = Coloring::all_plus(3);
        assert_eq!(evaluate_coloring(&s, &plus).unwrap(), vec![2, 3, 1]);
        assert!(matches!(
            evaluate_coloring(&s, &Coloring::all_plus(2)),
            Err(Error::DimMismatch { .. })
        ));
    }

    #[test]
    fn incidence_examples() {
        let s = sys(2, &[&[1], &[1, 2], &[]]);
        let a = incidence_matrix(&s);
        assert_eq!(a, vec![vec![1, 0], vec![1, 1], vec![0, 0]]);
        for (row, set) in a.iter().zip(s.sets()) {
            assert_eq!(row.iter().map(|&x| x as usize).sum::<usize>(), set.len());
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SetSystem::from_one_based(3, vec![vec![0]]).is_err());
        assert!(SetSystem::from_one_based(3, vec![vec![4]]).is_err());
        assert!(SetSystem::from_one_based(3, vec![vec![1, 1]]).is_err());
        assert!(SetSystem::from_one_based(3, vec![]).is_err());
        assert!(Coloring::new(vec![1, 0]).is_err());
    }

    #[test]
    fn json_is_one_based() {
        let s: SetSystem = serde_json::from_str(r#"{"n": 3, "sets": [[3, 1], [2]]}"#).unwrap();
        assert_eq!(s.sets(), &[vec![0, 2], vec![1]]);
        let back = serde_json::to_string(&s).unwrap();
        assert_eq!(back, r#"{"n":3,"sets":[[1,3],[2]]}"#);
        assert!(serde_json::from_str::<SetSystem>(r#"{"n": 2, "sets": [[3]]}"#).is_err());
        assert!(serde_json::from_str::<SetSystem>(r#"{"n": 2, "sets": [[1]], "x": 1}"#).is_err());
    }

    proptest! {
        #[test]
        fn signed_sums_bounded_and_parity(
            n in 1usize..12,
            m in 1usize..8,
            seed in any::<u64>(),
            mask in any::<u64>(),
        ) {
            let s = random_set_system(n, m, seed).unwrap();
            let chi = Coloring::from_mask(n, mask);
            for (v, set) in evaluate_coloring(&s, &chi).unwrap().into_iter().zip(s.sets()) {
                prop_assert!(v.unsigned_abs() as usize <= set.len());
                prop_assert_eq!((v - set.len() as i64).rem_euclid(2), 0);
            }
        }

        #[test]
        fn embedding_is_diagonal_projection(n in 1usize..10, m in 1usize..6, seed in any::<u64>()) {
            let s = random_set_system(n, m, seed).unwrap();
            let ps = to_projection_system::<f64>(&s);
            for (p, set) in ps.iter().zip(s.sets()) {
                let mat = p.matrix();
                prop_assert!((mat * mat - mat).norm() < 1e-12);
                prop_assert_eq!(p.rank(), set.len());
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            prop_assert_eq!(mat[(i, j)].norm_sqr(), 0.0);
                        }
                    }
                }
            }
        }
    }
}
