//! Deterministic helpers shared by the unit tests: a tiny splitmix-style
//! generator (so oracles never depend on an external RNG's stream) and
//! random density matrices built as normalized Gram matrices.

use num_complex::Complex64;

use crate::game::DensityMatrix;
use crate::matrix::CMatrix;

pub struct TestRng {
    state: u64,
}

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng { state: seed.wrapping_add(0x9e3779b97f4a7c15) }
    }

    /// Uniform in [0, 1).
    pub fn unit(&mut self) -> f64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.state >> 11) as f64) / (1u64 << 53) as f64
    }

    /// Uniform in [-1, 1).
    pub fn symmetric(&mut self) -> f64 {
        self.unit() * 2.0 - 1.0
    }

    pub fn complex(&mut self) -> Complex64 {
        Complex64::new(self.symmetric(), self.symmetric())
    }
}

pub fn random_matrix(dim: usize, rng: &mut TestRng) -> CMatrix {
    CMatrix::from_fn(dim, |_, _| rng.complex())
}

pub fn random_hermitian(dim: usize, rng: &mut TestRng) -> CMatrix {
    let m = random_matrix(dim, rng);
    m.add(&m.dagger()).unwrap().scale_re(0.5)
}

/// Full-rank-ish random density matrix: normalized Gram matrix `M M† / tr`.
pub fn random_density(dim: usize, rng: &mut TestRng) -> DensityMatrix {
    let m = random_matrix(dim, rng);
    let gram = m.matmul(&m.dagger()).unwrap();
    let trace = gram.trace().re;
    DensityMatrix::new(gram.scale_re(1.0 / trace)).unwrap()
}

/// Random density matrix with real entries (a restricted state).
pub fn random_real_density(dim: usize, rng: &mut TestRng) -> DensityMatrix {
    let m = random_matrix(dim, rng).real_part();
    let gram = m.matmul(&m.dagger()).unwrap();
    let trace = gram.trace().re;
    DensityMatrix::new(gram.scale_re(1.0 / trace)).unwrap()
}

pub fn assert_close(a: &CMatrix, b: &CMatrix, tol: f64, what: &str) {
    let err = a.sub(b).unwrap().frobenius_norm();
    assert!(err < tol, "{what}: differ by {err:.3e}");
}
