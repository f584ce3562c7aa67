#ifndef ROTVEC_ALGEBRA_HPP
#define ROTVEC_ALGEBRA_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace rotvec {

using Vec = std::vector<double>;

// Dense row-major matrix, only as big as the toolkit ever needs (q is tiny).
struct RowMat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    RowMat() = default;
    RowMat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, 0.0) {}
    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }
};

RowMat matmul(const RowMat& x, const RowMat& y);

// sigma(M): sum of all entries of a matrix (any shape, flattened).
double sum_entries(std::span<const double> m);
double sum_entries(const RowMat& m);

// Signed diagonal I_{i,q}: entry i is -1 (1-based), all others +1.
// index 0 is the identity.
struct Involution {
    int index = 0; // 0..dim
    int dim = 0;
    std::vector<double> signs;

    double sign(int j) const { return signs[j]; } // 0-based
    void apply(std::span<double> y) const;        // y <- I y, involutive
};

Involution involution(int i, int q);

// sigma(I y) without forming a matrix.
double signed_sum(const Involution& inv, std::span<const double> y);

// sigma(I M I) for a q x q matrix M (row-major): sign flip on row i and column i.
double conjugated_sum(const Involution& inv, std::span<const double> m);

// sigma(I_i M I_i) for every i = 0..q at once from row/column/diagonal sums.
// out must hold q+1 values; out[0] = sigma(M).
void conjugated_sums_all(int q, std::span<const double> m, double* out);

// y_i recovered via 2 y_i = sigma(I_{0,q} y) - sigma(I_{i,q} y); i is 1-based.
double recover_component(std::span<const double> y, int i);

// exp(t * ones(q,q)) in closed form: I + (e^{qt} - 1)/q * ones.
RowMat ones_exp(double t, int q);

double max_norm(std::span<const double> v);            // max |v_i|
double mat_inf_norm(const RowMat& m);                  // max absolute row sum
double tensor_inf_norm(int q, std::span<const double> h); // max_i sum_{j,k} |h_{ijk}|

bool strictly_positive(std::span<const double> z); // z in the open cone V_+^q
bool nonnegative(std::span<const double> z);

} // namespace rotvec

#endif
