//! Small geometric helpers shared across modules.
//!
//! Coordinates are plain `&[f64]` slices of length 2 or 3 so the same code
//! paths serve planar and spatial meshes.

/// Axis-aligned bounding box in up to three dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Aabb {
    pub dim: usize,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
}

impl Aabb {
    pub fn empty(dim: usize) -> Self {
        Aabb {
            dim,
            lo: [f64::INFINITY; 3],
            hi: [f64::NEG_INFINITY; 3],
        }
    }

    pub fn include(&mut self, p: &[f64]) {
        for a in 0..self.dim {
            self.lo[a] = self.lo[a].min(p[a]);
            self.hi[a] = self.hi[a].max(p[a]);
        }
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        let mut out = self.clone();
        for a in 0..self.dim {
            out.lo[a] = out.lo[a].min(other.lo[a]);
            out.hi[a] = out.hi[a].max(other.hi[a]);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        (0..self.dim).any(|a| self.lo[a] > self.hi[a])
    }

    pub fn extent(&self, axis: usize) -> f64 {
        (self.hi[axis] - self.lo[axis]).max(0.0)
    }

    pub fn max_extent(&self) -> f64 {
        (0..self.dim).map(|a| self.extent(a)).fold(0.0, f64::max)
    }

    pub fn diagonal(&self) -> f64 {
        (0..self.dim).map(|a| self.extent(a).powi(2)).sum::<f64>().sqrt()
    }

    pub fn center(&self, axis: usize) -> f64 {
        0.5 * (self.lo[axis] + self.hi[axis])
    }

    pub fn contains(&self, p: &[f64]) -> bool {
        (0..self.dim).all(|a| p[a] >= self.lo[a] && p[a] <= self.hi[a])
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut s = 0.0;
    for i in 0..a.len() {
        s += a[i] * b[i];
    }
    s
}

#[inline]
pub fn sub(a: &[f64], b: &[f64]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for i in 0..a.len() {
        out[i] = a[i] - b[i];
    }
    out
}

#[inline]
pub fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for i in 0..a.len() {
        let d = a[i] - b[i];
        s += d * d;
    }
    s
}

#[inline]
pub fn det2(a: &[f64], b: &[f64]) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn det3(a: &[f64], b: &[f64], c: &[f64]) -> f64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

/// Determinant of a small dense matrix (n <= 6) by Gaussian elimination
/// with partial pivoting. `m` is row-major and is consumed as scratch.
pub fn det_small(m: &mut [[f64; 6]], n: usize) -> f64 {
    let mut det = 1.0;
    for col in 0..n {
        let mut pivot = col;
        for row in col + 1..n {
            if m[row][col].abs() > m[pivot][col].abs() {
                pivot = row;
            }
        }
        if m[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let inv = 1.0 / m[col][col];
        for row in col + 1..n {
            let f = m[row][col] * inv;
            if f != 0.0 {
                for c in col..n {
                    m[row][c] -= f * m[col][c];
                }
            }
        }
    }
    det
}

/// SplitMix64 step, used to derive independent per-task RNG seeds from a
/// base seed and an index without correlation between neighboring indices.
#[inline]
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_small_matches_closed_forms() {
        let mut m = [[0.0; 6]; 6];
        m[0][..2].copy_from_slice(&[3.0, 1.0]);
        m[1][..2].copy_from_slice(&[2.0, 5.0]);
        assert!((det_small(&mut m, 2) - 13.0).abs() < 1e-12);

        let mut m = [[0.0; 6]; 6];
        m[0][..3].copy_from_slice(&[1.0, 2.0, 3.0]);
        m[1][..3].copy_from_slice(&[0.0, 4.0, 5.0]);
        m[2][..3].copy_from_slice(&[1.0, 0.0, 6.0]);
        let expect = det3(&[1.0, 0.0, 1.0], &[2.0, 4.0, 0.0], &[3.0, 5.0, 6.0]);
        assert!((det_small(&mut m, 3) - expect).abs() < 1e-12);
    }

    #[test]
    fn det_small_singular() {
        let mut m = [[0.0; 6]; 6];
        m[0][..2].copy_from_slice(&[1.0, 2.0]);
        m[1][..2].copy_from_slice(&[2.0, 4.0]);
        assert_eq!(det_small(&mut m, 2), 0.0);
    }

    #[test]
    fn aabb_accumulates() {
        let mut b = Aabb::empty(2);
        b.include(&[1.0, -1.0]);
        b.include(&[-2.0, 3.0]);
        assert_eq!(b.extent(0), 3.0);
        assert_eq!(b.extent(1), 4.0);
        assert_eq!(b.diagonal(), 5.0);
    }
}
