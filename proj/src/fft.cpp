#include "nlchirp/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace nlchirp {

namespace {

// FFTW's planner is not thread safe; fftw_execute_dft on private buffers is.
std::mutex g_planner_mutex;

fftw_plan plan_for_size(std::size_t n) {
    static std::unordered_map<std::size_t, fftw_plan> plans;
    std::lock_guard<std::mutex> lock(g_planner_mutex);
    auto it = plans.find(n);
    if (it != plans.end()) return it->second;
    std::vector<fftw_complex> scratch(n);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(n), scratch.data(), scratch.data(),
                                      FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!plan) throw std::runtime_error("fftw plan creation failed");
    plans.emplace(n, plan);
    return plan;
}

} // namespace

std::vector<cplx> fft_forward(const std::vector<cplx>& input) {
    if (input.empty()) throw std::invalid_argument("fft_forward: empty input");
    const std::size_t n = input.size();
    fftw_plan plan = plan_for_size(n);
    // The cached plan is in-place, so transform a private copy.
    // std::complex<double> is layout compatible with fftw_complex.
    std::vector<cplx> out = input;
    fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(out.data()),
                     reinterpret_cast<fftw_complex*>(out.data()));
    return out;
}

} // namespace nlchirp
