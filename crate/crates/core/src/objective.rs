//! Smooth part of the objective, its block gradients and Lipschitz moduli.
//!
//! ```text
//! F(W, H) = ½‖X − WH‖²_F + λ·Tr(H L Hᵀ)
//! ∇_W F   = W H Hᵀ − X Hᵀ
//! ∇_H F   = Wᵀ W H − Wᵀ X + 2λ H L
//! L_W     = ‖H Hᵀ‖₂
//! L_H     = ‖Wᵀ W‖₂ + 2λ‖L‖₂
//! ```

use crate::error::{Error, Result};
use crate::graph::{self, GraphModel};
use crate::linalg::{DenseMatrix, SPECTRAL_MAX_ITER, SPECTRAL_TOL};

/// Lower clamp on Lipschitz moduli so step sizes never divide by zero.
pub const LIPSCHITZ_FLOOR: f64 = 1e-12;

/// One problem instance: data, rank, row budget, graph weight and graph.
#[derive(Debug, Clone)]
pub struct ProblemSpec {
    x: DenseMatrix,
    rank: usize,
    sparsity_k: usize,
    lambda: f64,
    graph: GraphModel,
}

impl ProblemSpec {
    pub fn new(
        x: DenseMatrix,
        rank: usize,
        sparsity_k: usize,
        lambda: f64,
        graph: GraphModel,
    ) -> Result<Self> {
        let (p, n) = x.shape();
        for i in 0..p {
            if let Some(j) = x.row(i).iter().position(|&v| v < 0.0) {
                return Err(Error::Negative { row: i, col: j });
            }
        }
        if rank == 0 || rank > p.min(n) {
            return Err(Error::invalid(
                "rank",
                alloc::format!("must be in [1, {}], got {rank}", p.min(n)),
            ));
        }
        if sparsity_k == 0 || sparsity_k > p {
            return Err(Error::invalid(
                "sparsity_k",
                alloc::format!("must be in [1, {p}], got {sparsity_k}"),
            ));
        }
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid(
                "lambda",
                alloc::format!("must be finite and nonnegative, got {lambda}"),
            ));
        }
        if graph.samples() != n {
            return Err(Error::ShapeMismatch {
                op: "ProblemSpec::new",
                left: x.shape(),
                right: graph.adjacency().shape(),
            });
        }
        Ok(Self {
            x,
            rank,
            sparsity_k,
            lambda,
            graph,
        })
    }

    pub fn x(&self) -> &DenseMatrix {
        &self.x
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn sparsity_k(&self) -> usize {
        self.sparsity_k
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn graph(&self) -> &GraphModel {
        &self.graph
    }

    pub fn features(&self) -> usize {
        self.x.rows()
    }

    pub fn samples(&self) -> usize {
        self.x.cols()
    }

    /// Same problem with a different graph weight and row budget. Used to
    /// derive the NMF / GNMF baselines from one configured instance.
    pub fn with_model(&self, lambda: f64, sparsity_k: usize) -> Result<Self> {
        Self::new(
            self.x.clone(),
            self.rank,
            sparsity_k,
            lambda,
            self.graph.clone(),
        )
    }

    fn check_factors(&self, w: &DenseMatrix, h: &DenseMatrix) -> Result<()> {
        let (p, n) = self.x.shape();
        if w.shape() != (p, self.rank) {
            return Err(Error::ShapeMismatch {
                op: "factor W",
                left: w.shape(),
                right: (p, self.rank),
            });
        }
        if h.shape() != (self.rank, n) {
            return Err(Error::ShapeMismatch {
                op: "factor H",
                left: h.shape(),
                right: (self.rank, n),
            });
        }
        Ok(())
    }
}

/// `F(W, H)`.
pub fn smooth_objective(w: &DenseMatrix, h: &DenseMatrix, spec: &ProblemSpec) -> Result<f64> {
    spec.check_factors(w, h)?;
    let residual = spec.x.distance_sq(&w.matmul(h)?)?;
    let smooth = if spec.lambda == 0.0 {
        0.0
    } else {
        spec.lambda * graph::laplacian_quadratic(h, &spec.graph)?
    };
    Ok(0.5 * residual + smooth)
}

/// `∇_W F = W(HHᵀ) − XHᵀ`.
pub fn grad_w(w: &DenseMatrix, h: &DenseMatrix, spec: &ProblemSpec) -> Result<DenseMatrix> {
    spec.check_factors(w, h)?;
    let hht = h.matmul_t(h)?;
    let xht = spec.x.matmul_t(h)?;
    w.matmul(&hht)?.sub(&xht)
}

/// `∇_H F = (WᵀW)H − WᵀX + 2λHL`.
pub fn grad_h(w: &DenseMatrix, h: &DenseMatrix, spec: &ProblemSpec) -> Result<DenseMatrix> {
    spec.check_factors(w, h)?;
    let wtw = w.t_matmul(w)?;
    let wtx = w.t_matmul(&spec.x)?;
    let g = wtw.matmul(h)?.sub(&wtx)?;
    if spec.lambda == 0.0 {
        return Ok(g);
    }
    let hl = h.matmul(spec.graph.laplacian())?;
    g.add_scaled(2.0 * spec.lambda, &hl)
}

/// `L_W = ‖HHᵀ‖₂`, floored at [`LIPSCHITZ_FLOOR`].
pub fn lipschitz_w(h: &DenseMatrix) -> f64 {
    let hht = h.matmul_t(h).expect("H·Hᵀ always conforms");
    hht.spectral_norm(SPECTRAL_TOL, SPECTRAL_MAX_ITER)
        .max(LIPSCHITZ_FLOOR)
}

/// `L_H = ‖WᵀW‖₂ + 2λ‖L‖₂`, floored at [`LIPSCHITZ_FLOOR`]. `L` is
/// symmetric, so `‖2λLᵀ‖₂ = 2λ‖L‖₂`.
pub fn lipschitz_h(w: &DenseMatrix, spec: &ProblemSpec) -> f64 {
    let wtw = w.t_matmul(w).expect("Wᵀ·W always conforms");
    let mut l = wtw.spectral_norm(SPECTRAL_TOL, SPECTRAL_MAX_ITER);
    if spec.lambda != 0.0 {
        l += 2.0 * spec.lambda * spec.graph.laplacian_norm();
    }
    l.max(LIPSCHITZ_FLOOR)
}
