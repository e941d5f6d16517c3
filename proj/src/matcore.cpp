#include "specbound/matcore.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>

namespace specbound {

void Tolerance::validate() const {
    if (!(rank_rel > 0 && rank_rel < 1) || !(scalar_rel > 0 && scalar_rel < 1) ||
        !(spec_abs > 0 && spec_abs < 1)) {
        throw MatError("Tolerance fields must lie strictly between 0 and 1");
    }
}

static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t child_seed(std::uint64_t seed, const std::string& label) {
    std::uint64_t h = splitmix64(seed);
    for (unsigned char c : label) h = splitmix64(h ^ c);
    return h;
}

std::uint64_t child_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(splitmix64(seed) ^ index);
}

CMat random_gaussian(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
    std::normal_distribution<double> dist(0.0, 1.0);
    CMat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            double re = dist(rng), im = dist(rng);
            m(i, j) = Complex(re, im);
        }
    return m;
}

CVec random_gaussian_vec(Rng& rng, Eigen::Index n) {
    return random_gaussian(rng, n, 1).col(0);
}

CMat random_unitary(Rng& rng, Eigen::Index n) {
    CMat g = random_gaussian(rng, n, n);
    Eigen::HouseholderQR<CMat> qr(g);
    CMat q = qr.householderQ() * CMat::Identity(n, n);
    // fix phases so the factorization is unique-ish
    CMat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        Complex d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

CMat random_invertible(Rng& rng, Eigen::Index n) {
    for (int attempt = 0; attempt < 16; ++attempt) {
        CMat g = random_gaussian(rng, n, n);
        Eigen::FullPivLU<CMat> lu(g);
        if (lu.isInvertible()) return g;
    }
    throw MatError("random_invertible: failed to draw an invertible matrix");
}

bool is_finite(const CMat& m) {
    return m.allFinite();
}

CVec eigenvalues(const CMat& m) {
    if (m.rows() != m.cols()) throw MatError("eigenvalues: matrix not square");
    if (!is_finite(m)) throw MatError("eigenvalues: non-finite entries");
    if (m.rows() == 0) return CVec(0);
    Eigen::ComplexEigenSolver<CMat> es(m, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) throw MatError("eigenvalues: solver failed");
    return es.eigenvalues();
}

double spectral_radius(const CMat& m) {
    CVec ev = eigenvalues(m);
    double r = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) r = std::max(r, std::abs(ev(i)));
    return r;
}

bool numerically_nilpotent(const CMat& m, double cutoff) {
    if (m.rows() != m.cols()) throw MatError("numerically_nilpotent: matrix not square");
    double nm = m.norm();
    if (nm == 0.0) return true;
    CMat a = m / nm;
    CMat p = a;
    for (Eigen::Index i = 1; i < m.rows(); ++i) {
        p = p * a;
        if (p.norm() <= cutoff) return true;
    }
    return p.norm() <= cutoff;
}

int numeric_rank(const CMat& m, const Tolerance& tol) {
    if (m.size() == 0) return 0;
    Eigen::JacobiSVD<CMat> svd(m);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    double cutoff = tol.rank_rel * sv(0) * static_cast<double>(std::max(m.rows(), m.cols()));
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return r;
}

std::optional<Complex> scalar_of_identity(const CMat& m, const Tolerance& tol) {
    if (m.rows() != m.cols()) throw MatError("scalar_of_identity: matrix not square");
    const auto n = m.rows();
    if (n == 0) return std::nullopt;
    Complex lambda = m.trace() / static_cast<double>(n);
    CMat dev = m - lambda * CMat::Identity(n, n);
    if (dev.norm() <= tol.scalar_rel * std::max(1.0, m.norm())) return lambda;
    return std::nullopt;
}

CVec vec(const CMat& m) {
    return Eigen::Map<const CVec>(m.data(), m.size());
}

CMat unvec(const CVec& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) throw MatError("unvec: size mismatch");
    return Eigen::Map<const CMat>(v.data(), rows, cols);
}

CMat kron(const CMat& a, const CMat& b) {
    CMat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

static CMat stack_columns(const std::vector<CVec>& vecs) {
    if (vecs.empty()) return CMat(0, 0);
    CMat m(vecs[0].size(), static_cast<Eigen::Index>(vecs.size()));
    for (std::size_t j = 0; j < vecs.size(); ++j) {
        if (vecs[j].size() != m.rows()) throw MatError("vector length mismatch");
        m.col(static_cast<Eigen::Index>(j)) = vecs[j];
    }
    return m;
}

int rank_of(const std::vector<CVec>& vecs, const Tolerance& tol) {
    if (vecs.empty()) return 0;
    return numeric_rank(stack_columns(vecs), tol);
}

CMat orthonormal_span(const std::vector<CVec>& vecs, const Tolerance& tol) {
    if (vecs.empty()) return CMat(0, 0);
    CMat m = stack_columns(vecs);
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeThinU);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? tol.rank_rel * sv(0) * static_cast<double>(std::max(m.rows(), m.cols())) : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return svd.matrixU().leftCols(r);
}

CMat null_space(const CMat& m, const Tolerance& tol) {
    if (m.size() == 0) return CMat::Identity(m.cols(), m.cols());
    Eigen::JacobiSVD<CMat> svd(m, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    double cutoff = sv.size() ? tol.rank_rel * sv(0) * static_cast<double>(std::max(m.rows(), m.cols())) : 0.0;
    int r = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv(i) > cutoff) ++r;
    return svd.matrixV().rightCols(m.cols() - r);
}

CMat prescribe(const std::vector<std::pair<CVec, CVec>>& constraints, int n,
               bool require_invertible, std::uint64_t seed, const Tolerance& tol) {
    const auto k = static_cast<Eigen::Index>(constraints.size());
    if (k > n) throw MatError("prescribe: more constraints than dimensions");
    CMat Z(n, k), H(n, k);
    for (Eigen::Index j = 0; j < k; ++j) {
        if (constraints[j].first.size() != n || constraints[j].second.size() != n)
            throw MatError("prescribe: constraint vector has wrong dimension");
        Z.col(j) = constraints[j].first;
        H.col(j) = constraints[j].second;
    }
    if (numeric_rank(Z, tol) != k)
        throw MatError("prescribe: left vectors are linearly dependent");

    if (!require_invertible) {
        // least-norm interpolant; maps the complement of span(Z) to zero
        CMat x = H * Z.completeOrthogonalDecomposition().pseudoInverse();
        return x;
    }

    if (numeric_rank(H, tol) != k)
        throw MatError("prescribe: invertibility requested but target vectors are dependent");

    CMat comp = null_space(Z.adjoint(), tol);  // orthonormal complement of span(Z)
    for (int attempt = 0; attempt < 8; ++attempt) {
        Rng rng(child_seed(seed, static_cast<std::uint64_t>(attempt)));
        CMat T = random_gaussian(rng, n, n - k);
        CMat dom(n, n), img(n, n);
        dom << Z, comp;
        img << H, T;
        if (numeric_rank(img, tol) != n) continue;
        CMat x = img * dom.inverse();
        if (numeric_rank(x, tol) == n) return x;
    }
    throw MatError("prescribe: could not complete to an invertible map");
}

CMat matrix_in_basis(const CMat& y, const std::vector<CVec>& basis, const Tolerance& tol) {
    if (basis.empty()) throw MatError("matrix_in_basis: empty basis");
    CMat B = stack_columns(basis);
    if (y.rows() != y.cols() || y.rows() != B.rows())
        throw MatError("matrix_in_basis: dimension mismatch");
    const auto k = B.cols();
    if (numeric_rank(B, tol) != k)
        throw MatError("matrix_in_basis: basis is linearly dependent");
    CMat Y = y * B;
    CMat M = B.completeOrthogonalDecomposition().solve(Y);
    double scale = std::max(1.0, Y.norm());
    if ((B * M - Y).norm() > tol.scalar_rel * scale)
        throw MatError("matrix_in_basis: span(basis) is not invariant under y");
    return M;
}

}  // namespace specbound
