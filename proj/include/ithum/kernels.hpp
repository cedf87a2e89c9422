#pragma once

#include <span>
#include <vector>

namespace ithum {

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse row matrix; column indices sorted within each row.
struct CsrMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<int> row_ptr;
    std::vector<int> col;
    std::vector<double> val;

    /// Duplicate entries are summed.
    static CsrMatrix from_triplets(int rows, int cols, std::vector<Triplet> triplets);

    int nonzeros() const { return static_cast<int>(val.size()); }
};

/// Hot loops of the solver. `parallel` versions are OpenMP-parallel over rows
/// or fixed-size blocks, so results do not depend on the thread count; the
/// `serial` versions are plain reference loops kept for testing and
/// benchmarking.
namespace kernels {

inline constexpr int kReductionBlock = 2048;

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
/// next = 2 cur - prev + dt^2 (source - inv_mass * (K cur)); source may be
/// empty. Returns false if any entry of next is not finite.
bool leapfrog_step(const CsrMatrix& k, std::span<const double> inv_mass, double dt2, std::span<const double> prev,
                   std::span<const double> cur, std::span<const double> source, std::span<double> next);

} // namespace serial

namespace parallel {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y);
double dot(std::span<const double> a, std::span<const double> b);
double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
bool leapfrog_step(const CsrMatrix& k, std::span<const double> inv_mass, double dt2, std::span<const double> prev,
                   std::span<const double> cur, std::span<const double> source, std::span<double> next);

} // namespace parallel

/// Number of OpenMP threads used by the parallel kernels (1 without OpenMP).
void set_threads(int threads);
int threads();

} // namespace kernels
} // namespace ithum
