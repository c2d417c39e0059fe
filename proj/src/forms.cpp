#include "lebdec/forms.hpp"

#include <cmath>
#include <stdexcept>

namespace lebdec {

namespace {

Eigen::MatrixXd symmetrized(const Eigen::MatrixXd& m) {
    return 0.5 * (m + m.transpose());
}

double max_abs_entry(const Eigen::MatrixXd& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

// Spectral Moore-Penrose pseudoinverse. Eigenvalues at or below
// max(rel_cutoff * lambda_max, abs_floor) are treated as zero.
Eigen::MatrixXd spectral_pinv(const Eigen::MatrixXd& m, double rel_cutoff, double abs_floor = 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const auto& vals = es.eigenvalues();
    const double lam_max = std::max(vals.maxCoeff(), 0.0);
    const double cutoff = std::max(rel_cutoff * lam_max, abs_floor);
    Eigen::VectorXd inv = Eigen::VectorXd::Zero(vals.size());
    for (Eigen::Index i = 0; i < vals.size(); ++i)
        if (vals[i] > cutoff) inv[i] = 1.0 / vals[i];
    return symmetrized(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose());
}

// Pseudoinverse floor protecting pinv cutoffs from pure-noise spectra.
constexpr double kNoiseFloor = 1e-14;

// Pinv / kernel cutoff used by the parallel sums inside the scaled-limit
// oracle; tighter than user-facing tolerances so the iteration resolves the
// small-eigenvalue block long after the scales have separated.
constexpr double kOraclePinvTol = 1e-13;

constexpr double kScaleSplitRatio = 1e3;

// Parallel sum big : small evaluated blockwise in big's eigenbasis, so that
// no quantity of scale ||big|| is ever subtracted from one of scale
// ||small||. Eigenvalues of big below the kernel cutoff are treated as exact
// zeros: keeping them would inject big's representation noise, amplified by
// the scale ratio, into the kernel block of the result. Any generalized
// inverse of the truncated sum yields the exact parallel sum, which keeps
// this evaluation order a pure conditioning fix.
Eigen::MatrixXd scale_split_parallel(const Eigen::MatrixXd& big, const Eigen::MatrixXd& small,
                                     double tol) {
    const Eigen::Index n = big.rows();
    const double s_big = max_abs_entry(big);
    const double s_small = max_abs_entry(small);

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(big / s_big);
    const auto& vals = es.eigenvalues();  // ascending
    const double cut = std::max(tol, kOraclePinvTol) * vals[n - 1];
    Eigen::Index n_ker = 0;
    while (n_ker < n && vals[n_ker] <= cut) ++n_ker;
    const Eigen::Index n_ran = n - n_ker;

    Eigen::MatrixXd v(n, n);  // range directions first, kernel directions last
    v.leftCols(n_ran) = es.eigenvectors().rightCols(n_ran);
    v.rightCols(n_ker) = es.eigenvectors().leftCols(n_ker);

    Eigen::VectorXd lam_ran(n_ran);
    for (Eigen::Index i = 0; i < n_ran; ++i) lam_ran[i] = s_big * vals[n_ker + i];

    const Eigen::MatrixXd small_t = v.transpose() * small * v;
    const Eigen::MatrixXd p =
        Eigen::MatrixXd(lam_ran.asDiagonal()) + small_t.topLeftCorner(n_ran, n_ran);
    const Eigen::MatrixXd q = small_t.topRightCorner(n_ran, n_ker);
    const Eigen::MatrixXd s0 = small_t.bottomRightCorner(n_ker, n_ker);

    const auto p_ldlt = p.ldlt();
    const Eigen::MatrixXd p_inv =
        symmetrized(p_ldlt.solve(Eigen::MatrixXd::Identity(n_ran, n_ran)));

    Eigen::MatrixXd w_t(n, n);
    if (n_ker == 0) {
        w_t = p_inv;
    } else {
        const Eigen::MatrixXd schur = symmetrized(s0 - q.transpose() * p_inv * q);
        const Eigen::MatrixXd schur_pinv = spectral_pinv(schur, tol, kNoiseFloor * s_small);
        const Eigen::MatrixXd piq = p_inv * q;
        w_t.topLeftCorner(n_ran, n_ran) = p_inv + piq * schur_pinv * piq.transpose();
        w_t.topRightCorner(n_ran, n_ker) = -piq * schur_pinv;
        w_t.bottomLeftCorner(n_ker, n_ran) = w_t.topRightCorner(n_ran, n_ker).transpose();
        w_t.bottomRightCorner(n_ker, n_ker) = schur_pinv;
    }

    // truncated big (exact zeros on the kernel block) times W times small,
    // all in the eigenbasis of big
    Eigen::MatrixXd big_w(n, n);
    big_w.topRows(n_ran) = lam_ran.asDiagonal() * w_t.topRows(n_ran);
    big_w.bottomRows(n_ker).setZero();
    return symmetrized(v * (big_w * small_t) * v.transpose());
}

void require_same_dimension(const PsdForm& a, const PsdForm& b) {
    if (a.dimension() != b.dimension())
        throw std::invalid_argument("form dimensions do not match");
}

// Wraps a computed (as opposed to user-supplied) result: eigenvalue dips
// within the noise floor are clamped, an all-noise matrix snaps to zero.
PsdForm clamped_psd(const Eigen::MatrixXd& raw, double floor) {
    Eigen::MatrixXd m = symmetrized(raw);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = es.eigenvalues().maxCoeff();
    if (lam_min < -floor)
        throw std::runtime_error("computed form has a negative eigenvalue beyond noise level");
    if (lam_max <= floor) return PsdForm(Eigen::MatrixXd::Zero(m.rows(), m.cols()));
    if (lam_min < 0.0) {
        const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
        m = symmetrized(es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose());
    }
    return PsdForm(m);
}

}  // namespace

PsdForm::PsdForm(const Eigen::MatrixXd& m, double sym_tol, double psd_tol) {
    if (m.rows() != m.cols()) throw std::invalid_argument("form matrix must be square");
    if (m.rows() == 0) throw std::invalid_argument("form needs dimension >= 1");
    const double scale = m.cwiseAbs().maxCoeff();
    const double asym = max_abs_entry(m - Eigen::MatrixXd(m.transpose()));
    if (asym > sym_tol * scale)
        throw std::invalid_argument("form matrix is not symmetric");
    mat_ = m.selfadjointView<Eigen::Lower>();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(mat_);
    const double lam_min = es.eigenvalues().minCoeff();
    const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
    if (lam_min < -psd_tol * lam_max)
        throw std::invalid_argument("form matrix is not positive semidefinite");
    if (lam_min < 0.0) {
        const Eigen::VectorXd clamped = es.eigenvalues().cwiseMax(0.0);
        const Eigen::MatrixXd rebuilt =
            es.eigenvectors() * clamped.asDiagonal() * es.eigenvectors().transpose();
        mat_ = rebuilt.selfadjointView<Eigen::Lower>();
    }
}

Eigen::MatrixXd psd_sqrt(const PsdForm& b, double tol) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(b.matrix());
    const double lam_max = std::max(es.eigenvalues().maxCoeff(), 0.0);
    Eigen::VectorXd roots = Eigen::VectorXd::Zero(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < roots.size(); ++i)
        if (es.eigenvalues()[i] > tol * lam_max) roots[i] = std::sqrt(es.eigenvalues()[i]);
    return symmetrized(es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().transpose());
}

PsdForm parallel_sum(const PsdForm& a, const PsdForm& b, double tol) {
    require_same_dimension(a, b);
    const Eigen::Index n = a.dimension();
    const double s_a = a.max_abs();
    const double s_b = b.max_abs();
    if (s_a == 0.0 || s_b == 0.0) return PsdForm(Eigen::MatrixXd::Zero(n, n));

    Eigen::MatrixXd raw;
    if (s_a / s_b > kScaleSplitRatio) {
        raw = scale_split_parallel(a.matrix(), b.matrix(), tol);
    } else if (s_b / s_a > kScaleSplitRatio) {
        raw = scale_split_parallel(b.matrix(), a.matrix(), tol);  // A:B is symmetric in A, B
    } else {
        const Eigen::MatrixXd ginv = spectral_pinv(a.matrix() + b.matrix(), tol);
        raw = a.matrix() * ginv * b.matrix();
    }
    return clamped_psd(raw, 1e-8 * std::min(s_a, s_b));
}

AndoResult ando_limit(const PsdForm& a, const PsdForm& b, double tol) {
    require_same_dimension(a, b);
    Eigen::MatrixXd prev = parallel_sum(a, b, kOraclePinvTol).matrix();
    double increment = 0.0;
    for (int k = 1; k <= 60; ++k) {
        const double t = std::ldexp(1.0, k);
        const PsdForm scaled(t * a.matrix());
        const Eigen::MatrixXd cur = parallel_sum(scaled, b, kOraclePinvTol).matrix();
        increment = max_abs_entry(cur - prev);
        prev = cur;
        if (increment <= tol) return {PsdForm(prev), k, increment, true};
    }
    return {PsdForm(prev), 60, increment, false};
}

FormDecomposition decompose_forms(const PsdForm& a, const PsdForm& b, double tol) {
    require_same_dimension(a, b);
    const Eigen::Index n = a.dimension();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es_a(a.matrix());
    const double lam_max = std::max(es_a.eigenvalues().maxCoeff(), 0.0);
    Eigen::Index n_ker = 0;
    while (n_ker < n && es_a.eigenvalues()[n_ker] <= tol * lam_max) ++n_ker;
    const Eigen::MatrixXd kernel = es_a.eigenvectors().leftCols(n_ker);

    const Eigen::MatrixXd root_b = psd_sqrt(b, tol);

    Eigen::MatrixXd projector = Eigen::MatrixXd::Zero(n, n);
    if (n_ker > 0) {
        const Eigen::MatrixXd w = root_b * kernel;
        Eigen::BDCSVD<Eigen::MatrixXd> svd(w, Eigen::ComputeThinU);
        svd.setThreshold(tol);
        const Eigen::Index rank = svd.rank();
        if (rank > 0) {
            const Eigen::MatrixXd u = svd.matrixU().leftCols(rank);
            projector = symmetrized(u * u.transpose());
        }
    }

    const double noise_floor = 1e-8 * b.max_abs();
    const PsdForm b_s = clamped_psd(root_b * projector * root_b, noise_floor);
    const PsdForm b_a = clamped_psd(b.matrix() - b_s.matrix(), noise_floor);

    FormDiagnostics diag;
    const double b_scale = b.max_abs();
    diag.additivity_residual = max_abs_entry(b.matrix() - b_a.matrix() - b_s.matrix());
    diag.additivity_ok = diag.additivity_residual <= tol * b_scale;

    diag.projector_symmetry_residual =
        max_abs_entry(projector - Eigen::MatrixXd(projector.transpose()));
    diag.projector_idempotency_residual = max_abs_entry(projector * projector - projector);
    diag.projector_ok = diag.projector_symmetry_residual <= tol &&
                        diag.projector_idempotency_residual <= tol;

    diag.kernel_containment_residual = n_ker > 0 ? max_abs_entry(b_a.matrix() * kernel) : 0.0;
    diag.kernel_ok = diag.kernel_containment_residual <= tol * b_scale;

    const AndoResult oracle = ando_limit(a, b, tol);
    diag.ando_distance = max_abs_entry(b_a.matrix() - oracle.value.matrix());
    diag.ando_steps = oracle.steps;
    diag.ando_final_increment = oracle.final_increment;
    diag.ando_converged = oracle.converged;
    // Oracle agreement threshold: four orders above the spectral cutoff.
    diag.ando_ok = oracle.converged && diag.ando_distance <= 1e4 * tol * b_scale;

    return {b_a, b_s, projector, diag};
}

}  // namespace lebdec
