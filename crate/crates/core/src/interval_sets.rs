//! Compact sets that are finite unions of disjoint nondegenerate closed intervals.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_MERGE_TOL: f64 = 1e-12;

/// Sorted disjoint closed intervals ("bands").
///
/// Invariants: at least one band, `lo < hi` for every band, and
/// `hi_j < lo_{j+1}` for consecutive bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct IntervalSet {
    bands: Vec<(f64, f64)>,
}

/// A bounded component of the complement inside the hull.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gap {
    pub left: f64,
    pub right: f64,
    pub index: usize,
}

impl Gap {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    pub fn width(&self) -> f64 {
        self.right - self.left
    }
}

/// Sorts the pairs and merges those that overlap or lie within `merge_tol`.
pub fn normalize(raw: &[(f64, f64)], merge_tol: f64) -> Result<IntervalSet> {
    if raw.is_empty() {
        return Err(Error::InvalidSet("no intervals given".into()));
    }
    if !(merge_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!("merge tolerance {merge_tol} is negative")));
    }
    let mut pairs = Vec::with_capacity(raw.len());
    for &(a, b) in raw {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidSet(format!("non-finite endpoint in ({a}, {b})")));
        }
        pairs.push((a.min(b), a.max(b)));
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0).then(p.1.total_cmp(&q.1)));

    let mut bands: Vec<(f64, f64)> = Vec::with_capacity(pairs.len());
    for (a, b) in pairs {
        match bands.last_mut() {
            Some(last) if a <= last.1 + merge_tol => last.1 = last.1.max(b),
            _ => bands.push((a, b)),
        }
    }
    if let Some(&(a, b)) = bands.iter().find(|(a, b)| a >= b) {
        return Err(Error::InvalidSet(format!("degenerate component [{a}, {b}] (single points are not supported)")));
    }
    Ok(IntervalSet { bands })
}

impl IntervalSet {
    /// Normalizes with the default merge tolerance.
    pub fn new(raw: &[(f64, f64)]) -> Result<Self> {
        normalize(raw, DEFAULT_MERGE_TOL)
    }

    /// The interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Self::new(&[(a, b)])
    }

    pub fn bands(&self) -> &[(f64, f64)] {
        &self.bands
    }

    pub fn num_bands(&self) -> usize {
        self.bands.len()
    }

    pub fn hull(&self) -> (f64, f64) {
        (self.bands[0].0, self.bands[self.bands.len() - 1].1)
    }

    pub fn gaps(&self) -> Vec<Gap> {
        self.bands.windows(2).enumerate().map(|(index, w)| Gap { left: w[0].1, right: w[1].0, index }).collect()
    }

    /// Band index containing `x`, if any.
    pub fn band_of(&self, x: f64) -> Option<usize> {
        self.bands.iter().position(|&(a, b)| a <= x && x <= b)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.band_of(x).is_some()
    }

    /// Every band of `self` lies in some band of `other`, up to `slack`.
    pub fn is_subset_of(&self, other: &IntervalSet, slack: f64) -> bool {
        self.bands.iter().all(|&(a, b)| other.bands.iter().any(|&(c, d)| c - slack <= a && b <= d + slack))
    }

    pub fn total_length(&self) -> f64 {
        self.bands.iter().map(|(a, b)| b - a).sum()
    }

    /// Image under `x ↦ -x`.
    pub fn reflect(&self) -> Self {
        let bands = self.bands.iter().rev().map(|&(a, b)| (-b, -a)).collect();
        IntervalSet { bands }
    }
}

/// Image of `set` under the increasing affine map sending `source` onto `target`.
pub fn affine_map(set: &IntervalSet, source: (f64, f64), target: (f64, f64)) -> Result<IntervalSet> {
    let map = AffineMap::new(source, target)?;
    let bands = set.bands.iter().map(|&(a, b)| (map.apply(a), map.apply(b))).collect();
    Ok(IntervalSet { bands })
}

/// Increasing affine bijection between two nondegenerate intervals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    source: (f64, f64),
    target: (f64, f64),
}

impl AffineMap {
    pub fn new(source: (f64, f64), target: (f64, f64)) -> Result<Self> {
        for (name, h) in [("source", source), ("target", target)] {
            if !(h.0 < h.1) || !h.0.is_finite() || !h.1.is_finite() {
                return Err(Error::InvalidArgument(format!("degenerate {name} hull [{}, {}]", h.0, h.1)));
            }
        }
        Ok(Self { source, target })
    }

    pub fn apply(&self, x: f64) -> f64 {
        let (s0, s1) = self.source;
        let (t0, t1) = self.target;
        if x == s0 {
            return t0;
        }
        if x == s1 {
            return t1;
        }
        t0 + (x - s0) * (t1 - t0) / (s1 - s0)
    }

    pub fn scale(&self) -> f64 {
        (self.target.1 - self.target.0) / (self.source.1 - self.source.0)
    }

    pub fn inverse(&self) -> Self {
        Self { source: self.target, target: self.source }
    }
}

impl TryFrom<Vec<[f64; 2]>> for IntervalSet {
    type Error = Error;

    fn try_from(raw: Vec<[f64; 2]>) -> Result<Self> {
        let pairs: Vec<(f64, f64)> = raw.into_iter().map(|[a, b]| (a, b)).collect();
        normalize(&pairs, DEFAULT_MERGE_TOL)
    }
}

impl From<IntervalSet> for Vec<[f64; 2]> {
    fn from(set: IntervalSet) -> Self {
        set.bands.into_iter().map(|(a, b)| [a, b]).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn normalize_sorts() {
        let s = normalize(&[(0.2, 0.5), (-1.0, 0.1)], DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(s.bands(), &[(-1.0, 0.1), (0.2, 0.5)]);
    }

    #[test]
    fn touching_intervals_merge() {
        let s = normalize(&[(-1.0, 0.0), (0.0, 1.0)], DEFAULT_MERGE_TOL).unwrap();
        assert_eq!(s.bands(), &[(-1.0, 1.0)]);
    }

    #[test]
    fn tolerance_merge() {
        let s = normalize(&[(-1.0, -0.3), (-0.3 + 1e-15, 1.0)], 1e-12).unwrap();
        assert_eq!(s.bands(), &[(-1.0, 1.0)]);
    }

    #[test]
    fn rejects_empty_and_degenerate() {
        assert!(normalize(&[], 1e-12).is_err());
        assert!(normalize(&[(0.5, 0.5)], 1e-12).is_err());
        assert!(normalize(&[(0.0, f64::NAN)], 1e-12).is_err());
    }

    #[test]
    fn gaps_of_sets() {
        assert!(IntervalSet::interval(-1.0, 1.0).unwrap().gaps().is_empty());
        let g = IntervalSet::new(&[(-1.0, -0.5), (0.5, 1.0)]).unwrap().gaps();
        assert_eq!(g.len(), 1);
        assert_eq!((g[0].left, g[0].right), (-0.5, 0.5));
        let g = IntervalSet::new(&[(-1.0, -0.846), (-0.451, 0.293)]).unwrap().gaps();
        assert_eq!((g[0].left, g[0].right, g[0].index), (-0.846, -0.451, 0));
    }

    #[test]
    fn affine_examples() {
        let s = IntervalSet::interval(-1.0, 1.0).unwrap();
        let m = affine_map(&s, (-1.0, 1.0), (0.0, 4.0)).unwrap();
        assert_eq!(m.bands(), &[(0.0, 4.0)]);

        let s = IntervalSet::new(&[(-1.0, 0.0), (0.5, 1.0)]).unwrap();
        let m = affine_map(&s, (-1.0, 1.0), (3.0, 7.0)).unwrap();
        assert_eq!(m.bands(), &[(3.0, 5.0), (6.0, 7.0)]);

        let back = affine_map(&m, (3.0, 7.0), (-1.0, 1.0)).unwrap();
        for (a, b) in s.bands().iter().zip(back.bands()) {
            assert!((a.0 - b.0).abs() <= 1e-14 && (a.1 - b.1).abs() <= 1e-14);
        }

        assert!(affine_map(&s, (1.0, 1.0), (0.0, 1.0)).is_err());
        assert!(affine_map(&s, (-1.0, 1.0), (2.0, 0.0)).is_err());
    }

    #[test]
    fn serde_roundtrip_canonicalizes() {
        let s: IntervalSet = serde_json::from_str("[[0.5,1.0],[-1.0,-0.5]]").unwrap();
        assert_eq!(s.bands(), &[(-1.0, -0.5), (0.5, 1.0)]);
        let text = serde_json::to_string(&s).unwrap();
        assert_eq!(text, "[[-1.0,-0.5],[0.5,1.0]]");
        assert!(serde_json::from_str::<IntervalSet>("[]").is_err());
    }

    fn raw_intervals() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-10.0f64..10.0, 0.001f64..3.0), 1..8)
            .prop_map(|v| v.into_iter().map(|(a, len)| (a, a + len)).collect())
    }

    proptest! {
        #[test]
        fn normalize_is_idempotent(raw in raw_intervals()) {
            let once = normalize(&raw, 1e-12).unwrap();
            let twice = normalize(once.bands(), 1e-12).unwrap();
            prop_assert_eq!(&once, &twice);
            for w in once.bands().windows(2) {
                prop_assert!(w[0].1 < w[1].0);
            }
            // every input point is covered by exactly one band
            for &(a, b) in &raw {
                for x in [a, 0.5 * (a + b), b] {
                    let hits = once.bands().iter().filter(|&&(c, d)| c <= x && x <= d).count();
                    prop_assert_eq!(hits, 1);
                }
            }
        }

        #[test]
        fn affine_map_preserves_structure(raw in raw_intervals(), t0 in -5.0f64..5.0, len in 0.1f64..10.0) {
            let set = normalize(&raw, 1e-12).unwrap();
            let hull = set.hull();
            let mapped = affine_map(&set, hull, (t0, t0 + len)).unwrap();
            prop_assert_eq!(mapped.num_bands(), set.num_bands());
            prop_assert_eq!(mapped.gaps().len(), set.gaps().len());
            let l0 = set.bands()[0].1 - set.bands()[0].0;
            let m0 = mapped.bands()[0].1 - mapped.bands()[0].0;
            for (b, m) in set.bands().iter().zip(mapped.bands()) {
                let ratio_src = (b.1 - b.0) / l0;
                let ratio_dst = (m.1 - m.0) / m0;
                prop_assert!((ratio_src - ratio_dst).abs() <= 1e-12 * ratio_src.max(1.0));
            }
            let back = affine_map(&mapped, (t0, t0 + len), hull).unwrap();
            for (b, r) in set.bands().iter().zip(back.bands()) {
                prop_assert!((b.0 - r.0).abs() <= 1e-14 * b.0.abs().max(1.0) * 16.0);
                prop_assert!((b.1 - r.1).abs() <= 1e-14 * b.1.abs().max(1.0) * 16.0);
            }
        }
    }
}
