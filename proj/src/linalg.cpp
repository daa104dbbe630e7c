#include "mapruin/linalg.hpp"

#include "mapruin/error.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <limits>
#include <string>

namespace mapruin {

Matrix expm(const Matrix& m) {
    if (m.size() == 0) return m;
    if (m.rows() == 1) return Matrix::Constant(1, 1, std::exp(m(0, 0)));
    return m.exp();
}

double spectral_abscissa(const Matrix& m) {
    if (m.size() == 0) return -std::numeric_limits<double>::infinity();
    if (m.rows() == 1) return m(0, 0);
    Eigen::EigenSolver<Matrix> es(m, false);
    return es.eigenvalues().real().maxCoeff();
}

double sup_norm(const Matrix& m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

Matrix take(const Matrix& m, std::span<const int> rows, std::span<const int> cols) {
    Matrix out(static_cast<Index>(rows.size()), static_cast<Index>(cols.size()));
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < cols.size(); ++c)
            out(static_cast<Index>(r), static_cast<Index>(c)) = m(rows[r], cols[c]);
    return out;
}

Vector take(const Vector& v, std::span<const int> idx) {
    Vector out(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
    return out;
}

RowVector take(const RowVector& v, std::span<const int> idx) {
    RowVector out(static_cast<Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) out(static_cast<Index>(k)) = v(idx[k]);
    return out;
}

Matrix checked_inverse(const Matrix& m, const char* what, double rcond_min) {
    if (m.size() == 0) return m;
    Eigen::PartialPivLU<Matrix> lu(m);
    if (!(lu.rcond() > rcond_min))
        throw Error(ErrorCode::SingularBlock,
                    std::string(what) + " is numerically singular (rcond " +
                        std::to_string(lu.rcond()) + ")");
    return lu.inverse();
}

}  // namespace mapruin
