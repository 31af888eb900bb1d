#include "cyclo/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>

#include "cyclo/error.hpp"

namespace cyclo::fft {

namespace {

// The planner is not thread-safe; plans are created once per size under a
// lock and executed through the new-array interface, which is.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

struct Plans {
    std::map<std::size_t, fftw_plan> c2r, r2c;
};

Plans& plans()
{
    static Plans p;
    return p;
}

template <class Make>
fftw_plan cached(std::map<std::size_t, fftw_plan>& table, std::size_t n, Make&& make)
{
    std::lock_guard lock(planner_mutex());
    auto it = table.find(n);
    if (it != table.end()) return it->second;
    fftw_plan p = make();
    require(p != nullptr, ErrorKind::Numerical, "fftw: plan creation failed");
    table.emplace(n, p);
    return p;
}

struct Buffer {
    explicit Buffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) { require(ptr != nullptr, ErrorKind::Numerical, "fftw: allocation failed"); }
    ~Buffer() { fftw_free(ptr); }
    Buffer(const Buffer&) = delete;
    Buffer& operator=(const Buffer&) = delete;
    void* ptr;
};

}  // namespace

std::size_t good_size(std::size_t target)
{
    for (std::size_t n = std::max<std::size_t>(2, target + (target & 1));; n += 2) {
        std::size_t r = n;
        for (std::size_t p : {2, 3, 5})
            while (r % p == 0) r /= p;
        if (r == 1) return n;
    }
}

void inverse_real(std::vector<std::complex<double>>& half, std::vector<double>& out, std::size_t n)
{
    require(n >= 2 && half.size() == n / 2 + 1, ErrorKind::Internal, "fft::inverse_real: size mismatch");
    Buffer in(sizeof(fftw_complex) * half.size());
    Buffer res(sizeof(double) * n);
    auto* cin = static_cast<fftw_complex*>(in.ptr);
    auto* rout = static_cast<double*>(res.ptr);
    fftw_plan plan = cached(plans().c2r, n, [&] {
        return fftw_plan_dft_c2r_1d(static_cast<int>(n), cin, rout, FFTW_ESTIMATE | FFTW_DESTROY_INPUT);
    });
    for (std::size_t k = 0; k < half.size(); ++k) {
        cin[k][0] = half[k].real();
        cin[k][1] = half[k].imag();
    }
    fftw_execute_dft_c2r(plan, cin, rout);
    out.assign(rout, rout + n);
}

std::vector<std::complex<double>> forward_real(const std::vector<double>& x)
{
    const std::size_t n = x.size();
    require(n >= 2, ErrorKind::Internal, "fft::forward_real: need at least two samples");
    Buffer in(sizeof(double) * n);
    Buffer res(sizeof(fftw_complex) * (n / 2 + 1));
    auto* rin = static_cast<double*>(in.ptr);
    auto* cout = static_cast<fftw_complex*>(res.ptr);
    fftw_plan plan = cached(plans().r2c, n, [&] { return fftw_plan_dft_r2c_1d(static_cast<int>(n), rin, cout, FFTW_ESTIMATE); });
    std::copy(x.begin(), x.end(), rin);
    fftw_execute_dft_r2c(plan, rin, cout);
    std::vector<std::complex<double>> result(n / 2 + 1);
    for (std::size_t k = 0; k < result.size(); ++k) result[k] = {cout[k][0], cout[k][1]};
    return result;
}

}  // namespace cyclo::fft
