#pragma once

// Lebesgue-type decomposition for pairs of positive-semidefinite forms.
//
// The measure construction transplants to forms: the subspace playing the
// role of the multivalued part is span{ B^{1/2} x : A x = 0 }, P is the
// orthogonal projector onto it, and
//
//     B_s = B^{1/2} P B^{1/2},   B_a = B - B_s.
//
// B_a is the A-absolutely-continuous part (its kernel contains ker A) and
// B_s the A-singular part. An independent oracle is provided by scaled
// parallel sums: (t A) : B converges to B_a as t grows, with no projector in
// sight. decompose_forms always records its distance to that oracle.

#include <Eigen/Dense>

#include <string>

namespace lebdec {

/// A real symmetric positive-semidefinite form. Symmetry is structural (the
/// lower triangle is mirrored at construction); eigenvalues are required to
/// be >= -psd_tol * lambda_max and any negative ones are clamped to zero.
class PsdForm {
public:
    explicit PsdForm(const Eigen::MatrixXd& m, double sym_tol = 1e-12, double psd_tol = 1e-8);

    Eigen::Index dimension() const { return mat_.rows(); }
    const Eigen::MatrixXd& matrix() const { return mat_; }
    double operator()(Eigen::Index i, Eigen::Index j) const { return mat_(i, j); }
    double max_abs() const { return mat_.size() == 0 ? 0.0 : mat_.cwiseAbs().maxCoeff(); }

private:
    Eigen::MatrixXd mat_;
};

struct FormDiagnostics {
    double additivity_residual = 0.0;            // max entry of |B - B_a - B_s|
    double projector_symmetry_residual = 0.0;    // max entry of |P - P^T|
    double projector_idempotency_residual = 0.0; // max entry of |P^2 - P|
    double kernel_containment_residual = 0.0;    // max over ker A basis of |B_a x|
    double ando_distance = 0.0;                  // max entry of |B_a - ando_limit|
    int ando_steps = 0;
    double ando_final_increment = 0.0;
    bool ando_converged = true;
    bool additivity_ok = true;
    bool projector_ok = true;
    bool kernel_ok = true;
    bool ando_ok = true;

    bool all_ok() const { return additivity_ok && projector_ok && kernel_ok && ando_ok; }
};

struct FormDecomposition {
    PsdForm b_a;
    PsdForm b_s;
    Eigen::MatrixXd projector;
    FormDiagnostics diagnostics;
};

/// Scaled-parallel-sum iteration result; `value` is the limit (or the last
/// iterate when the increment never fell below tol within 60 doublings).
struct AndoResult {
    PsdForm value;
    int steps = 0;
    double final_increment = 0.0;
    bool converged = true;
};

/// Symmetric PSD square root by spectral decomposition; eigenvalues below
/// tol * lambda_max are treated as zero.
Eigen::MatrixXd psd_sqrt(const PsdForm& b, double tol = 1e-10);

/// Parallel sum A : B = A (A + B)^+ B. Robust to extreme scale imbalance
/// between the arguments (needed by the scaled-limit oracle).
PsdForm parallel_sum(const PsdForm& a, const PsdForm& b, double tol = 1e-10);

/// Limit of (2^k A) : B for k = 0, 1, ..., stopping when successive iterates
/// differ by <= tol in max norm or k = 60. Converges to the
/// A-absolutely-continuous part of B.
AndoResult ando_limit(const PsdForm& a, const PsdForm& b, double tol = 1e-10);

/// Projection-based decomposition B = B_a + B_s with the Ando-oracle distance
/// recorded in the diagnostics. `tol` is the spectral cutoff for kernel and
/// rank decisions.
FormDecomposition decompose_forms(const PsdForm& a, const PsdForm& b, double tol = 1e-10);

}  // namespace lebdec
