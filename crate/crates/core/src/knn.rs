//! Exact k-nearest-neighbor search.
//!
//! Brute force over all pairs. Ties in distance are broken by the smaller
//! point index, so the lists are a deterministic function of the cloud.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::cloud::{sq_dist, PointCloud};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Neighbor {
    pub index: usize,
    pub distance: f64,
}

/// The `k` nearest other points of every point, ascending by distance.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborLists {
    k: usize,
    entries: Vec<Neighbor>,
}

impl NeighborLists {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.entries.len().checked_div(self.k).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn neighbors(&self, i: usize) -> &[Neighbor] {
        &self.entries[i * self.k..(i + 1) * self.k]
    }
}

#[inline]
fn by_distance_then_index(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
}

fn query(cloud: &PointCloud, i: usize, k: usize, scratch: &mut Vec<(f64, usize)>, out: &mut [Neighbor]) {
    scratch.clear();
    let p = cloud.point(i);
    for j in 0..cloud.len() {
        if j != i {
            scratch.push((sq_dist(p, cloud.point(j)), j));
        }
    }
    if k < scratch.len() {
        scratch.select_nth_unstable_by(k - 1, by_distance_then_index);
        scratch.truncate(k);
    }
    scratch.sort_unstable_by(by_distance_then_index);
    for (slot, &(d2, j)) in out.iter_mut().zip(scratch.iter()) {
        *slot = Neighbor { index: j, distance: libm::sqrt(d2) };
    }
}

/// Returns the `k` nearest neighbors (Euclidean, self excluded) of every point.
pub fn knn_search(cloud: &PointCloud, k: usize) -> Result<NeighborLists> {
    let n = cloud.len();
    if k == 0 {
        return Err(Error::InvalidParameter("k must be positive".into()));
    }
    if k >= n {
        return Err(Error::NotEnoughNeighbors { k, n });
    }
    let mut entries = alloc::vec![Neighbor { index: 0, distance: 0.0 }; n * k];

    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        entries
            .par_chunks_mut(k)
            .enumerate()
            .for_each_init(|| Vec::with_capacity(n), |scratch, (i, out)| query(cloud, i, k, scratch, out));
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut scratch = Vec::with_capacity(n);
        for (i, out) in entries.chunks_mut(k).enumerate() {
            query(cloud, i, k, &mut scratch, out);
        }
    }

    Ok(NeighborLists { k, entries })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn line(xs: &[f64]) -> PointCloud {
        PointCloud::new(xs.to_vec(), 1).unwrap()
    }

    #[test]
    fn collinear_points() {
        let nl = knn_search(&line(&[0.0, 1.0, 3.0]), 1).unwrap();
        assert_eq!(nl.neighbors(0)[0].index, 1);
        assert_eq!(nl.neighbors(1)[0].index, 0);
        assert_eq!(nl.neighbors(2)[0].index, 1);
    }

    #[test]
    fn tenth_neighbor_on_integer_line() {
        let xs: Vec<f64> = (0..=20).map(f64::from).collect();
        let nl = knn_search(&line(&xs), 10).unwrap();
        let tenth = nl.neighbors(0)[9];
        assert_eq!(tenth.index, 10);
        assert_eq!(tenth.distance, 10.0);
    }

    #[test]
    fn ties_prefer_smaller_index() {
        // Points 0 and 2 are both at distance 1 from point 1.
        let nl = knn_search(&line(&[0.0, 1.0, 2.0]), 1).unwrap();
        assert_eq!(nl.neighbors(1)[0].index, 0);
    }

    #[test]
    fn duplicates_at_zero_distance() {
        let nl = knn_search(&line(&[5.0, 5.0, 9.0]), 1).unwrap();
        assert_eq!(nl.neighbors(0)[0], Neighbor { index: 1, distance: 0.0 });
        assert_eq!(nl.neighbors(1)[0], Neighbor { index: 0, distance: 0.0 });
    }

    #[test]
    fn k_too_large() {
        assert_eq!(knn_search(&line(&[0.0, 1.0]), 2), Err(Error::NotEnoughNeighbors { k: 2, n: 2 }));
        assert!(knn_search(&line(&[0.0, 1.0]), 0).is_err());
    }

    fn exhaustive(cloud: &PointCloud, k: usize) -> Vec<Vec<usize>> {
        (0..cloud.len())
            .map(|i| {
                let mut all: Vec<(f64, usize)> =
                    (0..cloud.len()).filter(|&j| j != i).map(|j| (cloud.sq_dist(i, j), j)).collect();
                all.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));
                all.into_iter().take(k).map(|(_, j)| j).collect()
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn agrees_with_exhaustive_sort(
            n in 2usize..200,
            dim in 1usize..6,
            seed in any::<u64>(),
            kfrac in 0.0f64..1.0,
        ) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let data: Vec<f64> = (0..n * dim).map(|_| rng.random_range(-10.0..10.0)).collect();
            let cloud = PointCloud::new(data, dim).unwrap();
            let k = 1 + ((n - 2) as f64 * kfrac) as usize;
            let nl = knn_search(&cloud, k).unwrap();
            let expect = exhaustive(&cloud, k);
            for (i, want) in expect.iter().enumerate() {
                let got: Vec<usize> = nl.neighbors(i).iter().map(|nb| nb.index).collect();
                prop_assert_eq!(&got, want);
                let row = nl.neighbors(i);
                prop_assert!(row.windows(2).all(|w| w[0].distance <= w[1].distance));
                prop_assert!(row.iter().all(|nb| nb.index != i));
            }
        }
    }
}
