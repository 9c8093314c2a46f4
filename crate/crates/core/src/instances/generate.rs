//! Seeded random testbeds.
//!
//! Every instance draws from its own ChaCha8 stream. The stream seed mixes
//! `(base_seed, q_kind, n_y, index)` through SplitMix64 finalizers; the sense
//! is deliberately left out so the optimistic and pessimistic copies of one
//! parameter set carry identical numbers.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{haar_orthogonal_with, DenseMatrix};
use crate::model::{QuadBilevelInstance, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum QKind {
    Diagonal,
    CholeskyBased,
    BoundedEigenvalues,
}

impl QKind {
    pub const ALL: [QKind; 3] = [QKind::Diagonal, QKind::CholeskyBased, QKind::BoundedEigenvalues];

    pub fn as_str(self) -> &'static str {
        match self {
            QKind::Diagonal => "diagonal",
            QKind::CholeskyBased => "cholesky_based",
            QKind::BoundedEigenvalues => "bounded_eigenvalues",
        }
    }

    fn tag(self) -> u64 {
        match self {
            QKind::Diagonal => 1,
            QKind::CholeskyBased => 2,
            QKind::BoundedEigenvalues => 3,
        }
    }
}

impl fmt::Display for QKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for QKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown q_kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenConfig {
    pub seed: u64,
    pub n_x: usize,
    pub n_y: usize,
    pub q_kind: QKind,
    pub m_x: usize,
    pub sense: Sense,
}

impl GenConfig {
    pub const DEFAULT_N_X: usize = 10;
    pub const DEFAULT_M_X: usize = 5;

    pub fn new(seed: u64, n_y: usize, q_kind: QKind, sense: Sense) -> Self {
        Self {
            seed,
            n_x: Self::DEFAULT_N_X,
            n_y,
            q_kind,
            m_x: Self::DEFAULT_M_X,
            sense,
        }
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of the stream for one parameter set of a testbed.
pub fn stream_seed(base_seed: u64, q_kind: QKind, n_y: usize, index: usize) -> u64 {
    [q_kind.tag(), n_y as u64, index as u64]
        .into_iter()
        .fold(splitmix(base_seed), |h, v| splitmix(h ^ v))
}

fn int_in(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> f64 {
    rng.random_range(lo..=hi) as f64
}

fn int_vec(rng: &mut ChaCha8Rng, n: usize, lo: i64, hi: i64) -> Vec<f64> {
    (0..n).map(|_| int_in(rng, lo, hi)).collect()
}

fn int_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: i64, hi: i64) -> DenseMatrix {
    DenseMatrix::new(rows, cols, int_vec(rng, rows * cols, lo, hi)).expect("sized buffer")
}

/// Rounds to fifteen decimal places.
fn round15(v: f64) -> f64 {
    let r = (v * 1e15).round() / 1e15;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn gen_q(rng: &mut ChaCha8Rng, n: usize, kind: QKind) -> DenseMatrix {
    match kind {
        QKind::Diagonal => DenseMatrix::from_diag(&int_vec(rng, n, 1, 9)),
        QKind::CholeskyBased => {
            let r = int_matrix(rng, n, n, -1, 1);
            let mut q = r.transpose().matmul(&r).expect("square");
            for i in 0..n {
                q[(i, i)] += 1.0;
            }
            q
        }
        QKind::BoundedEigenvalues => {
            let d = int_vec(rng, n, 1, 9);
            let u = haar_orthogonal_with(n, rng);
            let mut q = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in i..n {
                    let v: f64 = (0..n).map(|k| u[(i, k)] * d[k] * u[(j, k)]).sum();
                    q[(i, j)] = round15(v);
                    q[(j, i)] = q[(i, j)];
                }
            }
            q
        }
    }
}

/// Draws one instance: `x̄` binary, `A ∈ {−1,0,1}^{m_x×n_x}` with `b = A x̄`,
/// leader coefficients in `[−5, 5]`, follower `C_y`, `d_y` in `[−9, 9]`, then
/// `Q_y` by `q_kind`. All draws are uniform over the integers in range.
pub fn gen_quad(cfg: &GenConfig) -> QuadBilevelInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let (n_x, n_y, m_x) = (cfg.n_x, cfg.n_y, cfg.m_x);
    let x_bar = int_vec(&mut rng, n_x, 0, 1);
    let a = int_matrix(&mut rng, m_x, n_x, -1, 1);
    let b = a.matvec(&x_bar).expect("sized");
    let h_x = int_vec(&mut rng, n_x, -5, 5);
    let d_x = int_vec(&mut rng, n_y, -5, 5);
    let c_y = int_matrix(&mut rng, n_y, n_x, -9, 9);
    let d_y = int_vec(&mut rng, n_y, -9, 9);
    let q_y = gen_q(&mut rng, n_y, cfg.q_kind);
    QuadBilevelInstance {
        h_x,
        d_x,
        a,
        b,
        q_y,
        c_y,
        d_y,
        sense: cfg.sense,
    }
}

/// One member of a generated testbed.
#[derive(Debug, Clone, PartialEq)]
pub struct TestbedInstance {
    pub id: String,
    pub q_kind: QKind,
    pub n_y: usize,
    pub index: usize,
    pub seed: u64,
    pub instance: QuadBilevelInstance,
}

pub const TESTBED_N_Y: [usize; 2] = [10, 20];

pub fn instance_id(q_kind: QKind, n_y: usize, index: usize, sense: Sense) -> String {
    format!("{q_kind}-ny{n_y}-{index:03}-{sense}")
}

/// `per_combo` parameter sets for each `q_kind × n_y ∈ {10, 20}`, each
/// emitted once per sense. `per_combo = 50` gives the 600-instance testbed.
pub fn gen_testbed(base_seed: u64, per_combo: usize) -> Vec<TestbedInstance> {
    let mut out = Vec::with_capacity(QKind::ALL.len() * TESTBED_N_Y.len() * per_combo * 2);
    for q_kind in QKind::ALL {
        for n_y in TESTBED_N_Y {
            for index in 0..per_combo {
                let seed = stream_seed(base_seed, q_kind, n_y, index);
                let base = gen_quad(&GenConfig::new(seed, n_y, q_kind, Sense::Optimistic));
                for sense in Sense::ALL {
                    out.push(TestbedInstance {
                        id: instance_id(q_kind, n_y, index, sense),
                        q_kind,
                        n_y,
                        index,
                        seed,
                        instance: QuadBilevelInstance { sense, ..base.clone() },
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigen_extremes;

    #[test]
    fn deterministic_per_seed() {
        let cfg = GenConfig::new(7, 10, QKind::BoundedEigenvalues, Sense::Pessimistic);
        assert_eq!(gen_quad(&cfg), gen_quad(&cfg));
        let other = GenConfig { seed: 8, ..cfg };
        assert_ne!(gen_quad(&cfg), gen_quad(&other));
    }

    #[test]
    fn diagonal_kind() {
        let q = gen_quad(&GenConfig::new(3, 10, QKind::Diagonal, Sense::Optimistic)).q_y;
        assert!(q.is_diagonal());
        assert!(q.diag().iter().all(|v| (1.0..=9.0).contains(v) && v.fract() == 0.0));
    }

    #[test]
    fn bounded_eigenvalues_kind() {
        for seed in 0..5 {
            let q = gen_quad(&GenConfig::new(seed, 10, QKind::BoundedEigenvalues, Sense::Optimistic)).q_y;
            let (hi, lo) = eigen_extremes(&q).unwrap();
            assert!(hi <= 9.0 + 1e-6 && lo >= 1.0 - 1e-6);
            assert!(q.data().iter().all(|v| format!("{v:.15}").parse::<f64>().unwrap() == *v));
        }
    }

    #[test]
    fn testbed_shape() {
        let tb = gen_testbed(1, 2);
        assert_eq!(tb.len(), 24);
        for pair in tb.chunks(2) {
            assert_eq!(pair[0].instance.sense, Sense::Optimistic);
            assert_eq!(pair[1].instance.sense, Sense::Pessimistic);
            let same = QuadBilevelInstance {
                sense: Sense::Optimistic,
                ..pair[1].instance.clone()
            };
            assert_eq!(same, pair[0].instance);
        }
        assert!(tb.iter().all(|t| t.instance.n_x() == 10));
    }
}
