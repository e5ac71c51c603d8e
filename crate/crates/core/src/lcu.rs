//! Explicit small-matrix simulation of the block-encoding construction:
//! prepare states, the select operator, LCU assembly and the controlled
//! rotation chain that block-encodes t(kL+H).
//!
//! Evolutions are exact (eigendecomposition), so the only approximation left
//! is the quadrature itself.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, vec_norm, CartesianParts, ComplexMatrix};
use crate::pairs::LaplacePair;
use crate::quadrature::QuadratureGrid;
use crate::tolerances::SELECT_DIM_CAP;

/// Amplitudes conj(√c)/√‖c‖₁ (left) and √c/√‖c‖₁ (right), principal root.
#[derive(Debug, Clone, PartialEq)]
pub struct PrepareStatePair {
    pub left: Vec<Complex64>,
    pub right: Vec<Complex64>,
    pub l1: f64,
}

impl PrepareStatePair {
    /// ⟨left|right⟩ = Σ c_j / ‖c‖₁.
    pub fn overlap(&self) -> Complex64 {
        self.left.iter().zip(&self.right).map(|(l, r)| l.conj() * r).sum()
    }

    /// Tensor product with another pair (this register first).
    pub fn kron(&self, other: &Self) -> Self {
        let prod = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
            a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect()
        };
        Self { left: prod(&self.left, &other.left), right: prod(&self.right, &other.right), l1: self.l1 * other.l1 }
    }
}

pub fn build_prepare_pair(c: &[Complex64]) -> Result<PrepareStatePair> {
    let l1: f64 = c.iter().map(|z| z.norm()).sum();
    if !(l1 > 0.0) {
        return Err(Error::Degenerate("prepare state of an all-zero coefficient list".into()));
    }
    let s = l1.sqrt();
    let roots: Vec<Complex64> = c.iter().map(|z| z.sqrt() / s).collect();
    Ok(PrepareStatePair { left: roots.iter().map(|z| z.conj()).collect(), right: roots, l1 })
}

/// Σ_{j,l} |j⟩⟨j| ⊗ |l⟩⟨l| ⊗ φ(k_j,t_l)e^{−it_l(k_jL+H)}, composite index
/// (j·M_t + l)·n + s.
pub fn build_select(grid: &QuadratureGrid, parts: &CartesianParts, pair: &LaplacePair) -> Result<ComplexMatrix> {
    let n = parts.dim();
    let (mk, mt) = (grid.k_nodes.len(), grid.t_nodes.len());
    let dim = mk * mt * n;
    if dim > SELECT_DIM_CAP {
        return Err(Error::Size(format!(
            "select operator would be {dim}x{dim}; the explicit simulation is capped at {SELECT_DIM_CAP}"
        )));
    }
    let mut s = ComplexMatrix::zeros(dim, dim);
    for (j, &k) in grid.k_nodes.iter().enumerate() {
        let eig = hermitian_eigen(&parts.hamiltonian(k))?;
        for (l, &t) in grid.t_nodes.iter().enumerate() {
            let phase = pair.phase(k, t);
            let u = eig.map(|lam| Complex64::from_polar(1.0, -lam * t) * phase);
            let off = (j * mt + l) * n;
            for a in 0..n {
                for b in 0..n {
                    s[(off + a, off + b)] = u[(a, b)];
                }
            }
        }
    }
    Ok(s)
}

/// Σ_{j,l} c_j ĉ_l φ U_{j,l}, summed term by term.
pub fn direct_lcu_sum(grid: &QuadratureGrid, parts: &CartesianParts, pair: &LaplacePair) -> Result<ComplexMatrix> {
    let n = parts.dim();
    let mut acc = ComplexMatrix::zeros(n, n);
    for (j, &k) in grid.k_nodes.iter().enumerate() {
        let eig = hermitian_eigen(&parts.hamiltonian(k))?;
        for (l, &t) in grid.t_nodes.iter().enumerate() {
            let w = grid.c[j] * grid.c_hat[l] * pair.phase(k, t);
            acc = &acc + &eig.map(|lam| Complex64::from_polar(1.0, -lam * t) * w);
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone)]
pub struct LcuAssembly {
    pub alpha: f64,
    pub top_left_block: ComplexMatrix,
    pub m_k: usize,
    pub m_t: usize,
    pub n: usize,
}

/// (⟨L_c|⊗⟨L_ĉ|⊗I)·S·(|R_c⟩⊗|R_ĉ⟩⊗I), with α = ‖c‖₁‖ĉ‖₁.
pub fn assemble_lcu(prep_c: &PrepareStatePair, prep_chat: &PrepareStatePair, select: &ComplexMatrix) -> Result<LcuAssembly> {
    let (mk, mt) = (prep_c.right.len(), prep_chat.right.len());
    let idx = mk * mt;
    if idx == 0 || !select.rows().is_multiple_of(idx) || !select.is_square() {
        return Err(Error::Dimension(format!(
            "select of size {}x{} does not factor over {mk}x{mt} index registers",
            select.rows(),
            select.cols()
        )));
    }
    let n = select.rows() / idx;
    let joint = prep_c.kron(prep_chat);
    let mut block = ComplexMatrix::zeros(n, n);
    for p in 0..idx {
        for q in 0..idx {
            let w = joint.left[p].conj() * joint.right[q];
            if w == Complex64::new(0.0, 0.0) {
                continue;
            }
            for a in 0..n {
                for b in 0..n {
                    block[(a, b)] += w * select[(p * n + a, q * n + b)];
                }
            }
        }
    }
    Ok(LcuAssembly { alpha: joint.l1, top_left_block: block, m_k: mk, m_t: mt, n })
}

/// [[M, √(I−M²)], [√(I−M²), −M]] for Hermitian M with ‖M‖ ≤ 1.
pub fn hermitian_dilation(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eigen(m)?;
    if eig.max_abs_eigenvalue() > 1.0 + 1e-12 {
        return Err(Error::Contract(format!(
            "dilation needs ‖M‖ ≤ 1, got {}",
            eig.max_abs_eigenvalue()
        )));
    }
    let comp = eig.map(|l| Complex64::new((1.0 - l * l).max(0.0).sqrt(), 0.0));
    let n = m.rows();
    Ok(ComplexMatrix::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => m[(i, j)],
        (true, false) => comp[(i, j - n)],
        (false, true) => comp[(i - n, j)],
        (false, false) => -m[(i - n, j - n)],
    }))
}

fn rotation(cos: f64) -> ComplexMatrix {
    let sin = (1.0 - cos * cos).max(0.0).sqrt();
    ComplexMatrix::from_real_rows(&[&[cos, -sin], &[sin, cos]])
}

fn scaled(m: &ComplexMatrix, alpha: f64) -> ComplexMatrix {
    if alpha > 0.0 {
        m.scale_real(1.0 / alpha)
    } else {
        ComplexMatrix::zeros(m.rows(), m.cols())
    }
}

/// The full unitary of the chain on registers R ⊗ R_k ⊗ R_t ⊗ a ⊗ system
/// (dimension 16n) for one node pair (k, t).
pub fn build_tklh_unitary(parts: &CartesianParts, k_max: f64, t_prime: f64, k: f64, t: f64) -> Result<ComplexMatrix> {
    let n = parts.dim();
    if n > 8 {
        return Err(Error::Size(format!("chain simulation is limited to n <= 8, got {n}")));
    }
    if k.abs() > k_max * (1.0 + 1e-12) || !(0.0..=t_prime * (1.0 + 1e-12)).contains(&t) {
        return Err(Error::Contract(format!("node (k, t) = ({k}, {t}) lies outside [-K, K] x [0, T']")));
    }
    let (al, ah) = (parts.alpha_l, parts.alpha_h);
    let norm = al * k.abs() + ah;
    if !(norm > 0.0) {
        return Err(Error::Degenerate("k·L + H has a zero normalization".into()));
    }
    let a = Complex64::new(al * k, 0.0).sqrt() / norm.sqrt();
    let b = Complex64::new(ah / norm, 0.0).sqrt();
    let r = ComplexMatrix::from_rows(&[&[a, -b.conj()], &[b, a.conj()]]);
    let r_bar_dag = ComplexMatrix::from_rows(&[&[a.conj(), -b], &[b.conj(), a]]).adjoint();
    let d_l = hermitian_dilation(&scaled(&parts.l, al))?;
    let d_h = hermitian_dilation(&scaled(&parts.h, ah))?;
    // |0⟩⟨0|_R ⊗ D_L + |1⟩⟨1|_R ⊗ D_H, each D acting on a ⊗ system
    let p0 = ComplexMatrix::from_real_diag(&[1.0, 0.0]);
    let p1 = ComplexMatrix::from_real_diag(&[0.0, 1.0]);
    let i4 = ComplexMatrix::identity(4);
    let ctrl = &p0.kron(&i4.kron(&d_l)) + &p1.kron(&i4.kron(&d_h));
    let i_rest = ComplexMatrix::identity(8 * n);
    let rot_k = rotation(norm / (al * k_max + ah));
    let rot_t = rotation(t / t_prime);
    let rots = ComplexMatrix::identity(2).kron(&rot_k.kron(&rot_t)).kron(&ComplexMatrix::identity(2 * n));
    let u = &(&r_bar_dag.kron(&i_rest) * &ctrl) * &(&r.kron(&i_rest) * &rots);
    Ok(u)
}

/// ⟨0000|·chain·|0000⟩ = t(kL+H)/(T′(α_LK+α_H)).
pub fn build_tklh_chain(parts: &CartesianParts, k_max: f64, t_prime: f64, k: f64, t: f64) -> Result<ComplexMatrix> {
    let u = build_tklh_unitary(parts, k_max, t_prime, k, t)?;
    let n = parts.dim();
    Ok(ComplexMatrix::from_fn(n, n, |i, j| u[(i, j)]))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PostselectionStats {
    pub success_prob: f64,
    pub amplification_rounds: u64,
    pub output_norm: f64,
    pub alpha: f64,
}

pub fn postselection_stats(assembly: &LcuAssembly, psi: &[Complex64]) -> Result<PostselectionStats> {
    let nrm = vec_norm(psi);
    if (nrm - 1.0).abs() > 1e-12 {
        return Err(Error::Contract(format!("state must be normalized, got norm {nrm}")));
    }
    let b = assembly.top_left_block.scale_real(assembly.alpha);
    let out = vec_norm(&b.try_matvec(psi)?);
    if out == 0.0 {
        return Err(Error::Degenerate("the block annihilates the state".into()));
    }
    Ok(PostselectionStats {
        success_prob: (out / assembly.alpha).powi(2),
        amplification_rounds: (assembly.alpha / out).ceil() as u64,
        output_norm: out,
        alpha: assembly.alpha,
    })
}
