// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>

#include "rrce/common.hpp"

/// Small dense helpers shared by every module. Everything here works on
/// complex double matrices; sizes at the intended scale stay below ~600.
namespace rrce::linalg {

CMatrix kron(const CMatrix& a, const CMatrix& b);

/// L×L selector with a single one at (l, l).
CMatrix elementary(Index size, Index l);

/// Selector I_K ⊗ E_{L,l} written as a KL×KL diagonal.
CMatrix user_delay_selector(Index num_users, Index memory, Index l);

CMatrix hermitian_part(const CMatrix& m);

/// Max |m - m^H| over all entries.
double hermitian_defect(const CMatrix& m);

struct HermitianEig {
    RVector values;   // descending
    CMatrix vectors;  // columns match `values`
};

/// Eigendecomposition of a Hermitian matrix, eigenvalues sorted descending.
/// Ties keep the solver's order (stable sort), and every eigenvector is
/// phase-normalized so its largest-magnitude entry is real positive.
HermitianEig hermitian_eig(const CMatrix& m);

/// Moore-Penrose pseudoinverse via SVD. Singular values at or below
/// max(rows, cols) * eps * sigma_max are treated as zero.
CMatrix pinv(const CMatrix& m);

/// Numerical rank using the same cutoff as `pinv`.
Index numerical_rank(const CMatrix& m);

/// log det of a Hermitian positive definite matrix (Cholesky based).
/// Throws ConditioningError when the factorization fails.
double logdet_hpd(const CMatrix& m);

/// Inverse of a Hermitian positive definite matrix.
CMatrix inverse_hpd(const CMatrix& m);

/// Scale the phase of `v` so that its largest-magnitude entry is real > 0.
void normalize_phase(Eigen::Ref<CVector> v);

/// Circularly-symmetric standard complex normal draws, CN(0, 1).
CMatrix complex_normal(Index rows, Index cols, std::mt19937_64& rng);

/// Random Hermitian positive definite matrix A A^H + shift I (test helper
/// that the CLI also uses for synthetic reference instances).
CMatrix random_hpd(Index n, std::mt19937_64& rng, double shift = 0.1);

} // namespace rrce::linalg
