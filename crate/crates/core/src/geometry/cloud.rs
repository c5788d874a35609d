//! Nearest-neighbour queries over flat point clouds.
//!
//! Points are sorted along the first axis; a query scans outward from its
//! insertion position and stops once the axis gap alone exceeds the best
//! distance found so far.

#[derive(Debug, Clone)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    keys: Vec<f64>,
    original: Vec<usize>,
}

impl PointCloud {
    /// `flat` holds `dim` coordinates per point.
    pub fn new(dim: usize, flat: &[f64]) -> Self {
        assert!(dim > 0 && flat.len().is_multiple_of(dim));
        let n = flat.len() / dim;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| flat[a * dim].total_cmp(&flat[b * dim]));
        let mut coords = Vec::with_capacity(flat.len());
        for &i in &order {
            coords.extend_from_slice(&flat[i * dim..(i + 1) * dim]);
        }
        let keys = order.iter().map(|&i| flat[i * dim]).collect();
        PointCloud { dim, coords, keys, original: order }
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    fn d2(&self, j: usize, q: &[f64]) -> f64 {
        let p = &self.coords[j * self.dim..(j + 1) * self.dim];
        p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// (index into the construction order, Euclidean distance) of the nearest point.
    pub fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.is_empty() {
            return None;
        }
        let start = self.keys.partition_point(|&k| k < q[0]);
        let mut best = f64::INFINITY;
        let mut best_j = 0;
        let mut up = start;
        let mut down = start;
        loop {
            let mut advanced = false;
            if up < self.len() {
                let gap = self.keys[up] - q[0];
                if gap * gap < best {
                    let d = self.d2(up, q);
                    if d < best {
                        best = d;
                        best_j = up;
                    }
                    up += 1;
                    advanced = true;
                } else {
                    up = self.len();
                }
            }
            if down > 0 {
                let gap = q[0] - self.keys[down - 1];
                if gap * gap < best {
                    let d = self.d2(down - 1, q);
                    if d < best {
                        best = d;
                        best_j = down - 1;
                    }
                    down -= 1;
                    advanced = true;
                } else {
                    down = 0;
                }
            }
            if !advanced {
                break;
            }
        }
        Some((self.original[best_j], best.sqrt()))
    }

    pub fn distance(&self, q: &[f64]) -> f64 {
        self.nearest(q).map_or(f64::INFINITY, |v| v.1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let flat: Vec<f64> = (0..2000).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cloud = PointCloud::new(2, &flat);
        for _ in 0..200 {
            let q = [rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)];
            let (i, d) = cloud.nearest(&q).unwrap();
            let brute = (0..1000)
                .map(|k| ((flat[2 * k] - q[0]).powi(2) + (flat[2 * k + 1] - q[1]).powi(2)).sqrt())
                .fold(f64::INFINITY, f64::min);
            assert_eq!(d, brute);
            let di = ((flat[2 * i] - q[0]).powi(2) + (flat[2 * i + 1] - q[1]).powi(2)).sqrt();
            assert_eq!(di, d);
        }
    }

    #[test]
    fn empty_cloud() {
        let c = PointCloud::new(1, &[]);
        assert!(c.nearest(&[0.0]).is_none());
        assert_eq!(c.distance(&[0.0]), f64::INFINITY);
    }
}
