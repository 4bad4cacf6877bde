#include "noperr/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace noperr::fft {

namespace {

using Key = std::tuple<int, std::size_t, std::size_t, int>;

struct PlanCache {
    std::mutex mu;
    std::map<Key, fftw_plan> plans;

    ~PlanCache() {
        for (auto& [k, p] : plans) fftw_destroy_plan(p);
    }
};

PlanCache& cache() {
    static PlanCache c;
    return c;
}

// FFTW_ESTIMATE keeps plan selection (and so the floating point result)
// independent of timing; FFTW_UNALIGNED lets one plan serve any buffer.
fftw_plan get_plan(int dim, std::size_t n, std::size_t howmany, int sign) {
    auto& c = cache();
    std::lock_guard<std::mutex> lock(c.mu);
    Key key{dim, n, howmany, sign};
    auto it = c.plans.find(key);
    if (it != c.plans.end()) return it->second;

    int dims[2] = {static_cast<int>(n), static_cast<int>(n)};
    std::size_t total = howmany;
    for (int i = 0; i < dim; ++i) total *= n;
    std::vector<fftw_complex> a(total), b(total);
    int hm = static_cast<int>(howmany);
    fftw_plan p = fftw_plan_many_dft(dim, dims, hm, a.data(), nullptr, hm, 1, b.data(), nullptr, hm, 1,
                                     sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                     FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!p) throw std::runtime_error("fftw planning failed");
    c.plans.emplace(key, p);
    return p;
}

}  // namespace

void transform(int dim, std::size_t n, std::size_t howmany, int sign,
               const std::complex<double>* in, std::complex<double>* out) {
    fftw_plan p = get_plan(dim, n, howmany, sign);
    // new-array execute is thread safe; fftw never writes to the input of an
    // out-of-place complex transform
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(in)),
                     reinterpret_cast<fftw_complex*>(out));
}

}  // namespace noperr::fft
