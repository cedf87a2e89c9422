#include "ithum/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ithum/errors.hpp"

namespace ithum {

CsrMatrix CsrMatrix::from_triplets(int rows, int cols, std::vector<Triplet> triplets)
{
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.row_ptr.assign(rows + 1, 0);
    for (std::size_t t = 0; t < triplets.size();) {
        const int r = triplets[t].row;
        const int c = triplets[t].col;
        if (r < 0 || r >= rows || c < 0 || c >= cols)
            throw Error(ErrorCode::ShapeMismatch, "triplet outside matrix bounds");
        double v = 0.0;
        while (t < triplets.size() && triplets[t].row == r && triplets[t].col == c)
            v += triplets[t++].value;
        m.col.push_back(c);
        m.val.push_back(v);
        ++m.row_ptr[r + 1];
    }
    for (int r = 0; r < rows; ++r)
        m.row_ptr[r + 1] += m.row_ptr[r];
    return m;
}

namespace kernels {

namespace serial {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    for (int r = 0; r < a.rows; ++r) {
        double s = 0.0;
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            s += a.val[p] * x[a.col[p]];
        y[r] = s;
    }
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += w[i] * a[i] * b[i];
    return s;
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    for (std::size_t i = 0; i < x.size(); ++i)
        y[i] += alpha * x[i];
}

bool leapfrog_step(const CsrMatrix& k, std::span<const double> inv_mass, double dt2, std::span<const double> prev,
                   std::span<const double> cur, std::span<const double> source, std::span<double> next)
{
    const bool forced = !source.empty();
    bool finite = true;
    for (int r = 0; r < k.rows; ++r) {
        double s = 0.0;
        for (int p = k.row_ptr[r]; p < k.row_ptr[r + 1]; ++p)
            s += k.val[p] * cur[k.col[p]];
        const double f = forced ? source[r] : 0.0;
        next[r] = 2.0 * cur[r] - prev[r] + dt2 * (f - inv_mass[r] * s);
        finite = finite && std::isfinite(next[r]);
    }
    return finite;
}

} // namespace serial

namespace parallel {

void spmv(const CsrMatrix& a, std::span<const double> x, std::span<double> y)
{
    #pragma omp parallel for schedule(static)
    for (int r = 0; r < a.rows; ++r) {
        double s = 0.0;
        for (int p = a.row_ptr[r]; p < a.row_ptr[r + 1]; ++p)
            s += a.val[p] * x[a.col[p]];
        y[r] = s;
    }
}

namespace {

// Sum over fixed blocks, then combine partials in block order: the result is
// independent of how blocks are distributed over threads.
template <class Body>
double blocked_sum(std::size_t n, Body body)
{
    const std::size_t blocks = (n + kReductionBlock - 1) / kReductionBlock;
    if (blocks <= 1)
        return n == 0 ? 0.0 : body(0, n);
    std::vector<double> partial(blocks, 0.0);
    const long nb = static_cast<long>(blocks);
    #pragma omp parallel for schedule(static)
    for (long b = 0; b < nb; ++b) {
        const std::size_t lo = static_cast<std::size_t>(b) * kReductionBlock;
        const std::size_t hi = std::min(n, lo + kReductionBlock);
        partial[b] = body(lo, hi);
    }
    double s = 0.0;
    for (double p : partial)
        s += p;
    return s;
}

} // namespace

double dot(std::span<const double> a, std::span<const double> b)
{
    return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            s += a[i] * b[i];
        return s;
    });
}

double weighted_dot(std::span<const double> w, std::span<const double> a, std::span<const double> b)
{
    return blocked_sum(a.size(), [&](std::size_t lo, std::size_t hi) {
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i)
            s += w[i] * a[i] * b[i];
        return s;
    });
}

void axpy(double alpha, std::span<const double> x, std::span<double> y)
{
    const long n = static_cast<long>(x.size());
    #pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        y[i] += alpha * x[i];
}

bool leapfrog_step(const CsrMatrix& k, std::span<const double> inv_mass, double dt2, std::span<const double> prev,
                   std::span<const double> cur, std::span<const double> source, std::span<double> next)
{
    const bool forced = !source.empty();
    int bad = 0;
    #pragma omp parallel for schedule(static) reduction(| : bad)
    for (int r = 0; r < k.rows; ++r) {
        double s = 0.0;
        for (int p = k.row_ptr[r]; p < k.row_ptr[r + 1]; ++p)
            s += k.val[p] * cur[k.col[p]];
        const double f = forced ? source[r] : 0.0;
        next[r] = 2.0 * cur[r] - prev[r] + dt2 * (f - inv_mass[r] * s);
        bad |= std::isfinite(next[r]) ? 0 : 1;
    }
    return bad == 0;
}

} // namespace parallel

void set_threads(int threads)
{
#ifdef _OPENMP
    omp_set_num_threads(std::max(1, threads));
#else
    (void)threads;
#endif
}

int threads()
{
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace kernels
} // namespace ithum
