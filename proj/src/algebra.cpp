#include "algebra.hpp"

#include <cmath>
#include <cstdlib>

#include "errors.hpp"

namespace rotvec {

RowMat matmul(const RowMat& x, const RowMat& y) {
    RowMat out(x.rows, y.cols);
    for (int r = 0; r < x.rows; ++r)
        for (int k = 0; k < x.cols; ++k) {
            const double v = x(r, k);
            for (int c = 0; c < y.cols; ++c) out(r, c) += v * y(k, c);
        }
    return out;
}

double sum_entries(std::span<const double> m) {
    double s = 0.0;
    for (double v : m) s += v;
    return s;
}

double sum_entries(const RowMat& m) { return sum_entries(std::span<const double>(m.a)); }

void Involution::apply(std::span<double> y) const {
    if (index >= 1) y[index - 1] = -y[index - 1];
}

Involution involution(int i, int q) {
    if (q < 1) throw argument_error("involution: dimension must be >= 1");
    if (i < 0 || i > q) throw argument_error("involution: index out of range 0..q");
    Involution inv;
    inv.index = i;
    inv.dim = q;
    inv.signs.assign(q, 1.0);
    if (i >= 1) inv.signs[i - 1] = -1.0;
    return inv;
}

double signed_sum(const Involution& inv, std::span<const double> y) {
    double s = 0.0;
    for (int j = 0; j < inv.dim; ++j) s += inv.signs[j] * y[j];
    return s;
}

double conjugated_sum(const Involution& inv, std::span<const double> m) {
    const int q = inv.dim;
    double s = 0.0;
    for (int j = 0; j < q; ++j)
        for (int k = 0; k < q; ++k) s += inv.signs[j] * inv.signs[k] * m[static_cast<size_t>(j) * q + k];
    return s;
}

void conjugated_sums_all(int q, std::span<const double> m, double* out) {
    double total = 0.0;
    // sigma(I_i M I_i) = sigma(M) - 2 row_i - 2 col_i + 4 m_ii
    for (int i = 1; i <= q; ++i) out[i] = 0.0;
    for (int j = 0; j < q; ++j)
        for (int k = 0; k < q; ++k) {
            const double v = m[static_cast<size_t>(j) * q + k];
            total += v;
            out[j + 1] -= 2.0 * v; // row sums
            out[k + 1] -= 2.0 * v; // column sums
            if (j == k) out[j + 1] += 4.0 * v;
        }
    out[0] = total;
    for (int i = 1; i <= q; ++i) out[i] += total;
}

double recover_component(std::span<const double> y, int i) {
    const int q = static_cast<int>(y.size());
    if (i < 1 || i > q) throw argument_error("recover_component: index out of range 1..q");
    const Involution inv = involution(i, q);
    const Involution id = involution(0, q);
    return 0.5 * (signed_sum(id, y) - signed_sum(inv, y));
}

RowMat ones_exp(double t, int q) {
    if (q < 1) throw argument_error("ones_exp: dimension must be >= 1");
    RowMat m(q, q);
    const double w = (std::exp(static_cast<double>(q) * t) - 1.0) / q;
    for (int r = 0; r < q; ++r)
        for (int c = 0; c < q; ++c) m(r, c) = w + (r == c ? 1.0 : 0.0);
    return m;
}

double max_norm(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s = std::max(s, std::abs(x));
    return s;
}

double mat_inf_norm(const RowMat& m) {
    double best = 0.0;
    for (int r = 0; r < m.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < m.cols; ++c) s += std::abs(m(r, c));
        best = std::max(best, s);
    }
    return best;
}

double tensor_inf_norm(int q, std::span<const double> h) {
    double best = 0.0;
    const size_t slice = static_cast<size_t>(q) * q;
    for (int i = 0; i < q; ++i) {
        double s = 0.0;
        for (size_t jk = 0; jk < slice; ++jk) s += std::abs(h[i * slice + jk]);
        best = std::max(best, s);
    }
    return best;
}

bool strictly_positive(std::span<const double> z) {
    for (double v : z)
        if (!(v > 0.0)) return false;
    return true;
}

bool nonnegative(std::span<const double> z) {
    for (double v : z)
        if (!(v >= 0.0)) return false;
    return true;
}

} // namespace rotvec
