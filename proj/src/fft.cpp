#include "aniso_heat/fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace aniso_heat {
namespace fft {

namespace {

std::mutex plan_mutex;

void transform(const SpatialGrid& grid, std::vector<std::complex<double>>& data, int sign) {
    if (static_cast<std::int64_t>(data.size()) != grid.size())
        throw validation_error("fft: data size does not match grid");
    auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        int dims[3] = {grid.n, grid.n, grid.n};
        plan = fftw_plan_dft(grid.dim, dims, ptr, ptr, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        fftw_destroy_plan(plan);
    }
}

} // namespace

void forward(const SpatialGrid& grid, std::vector<std::complex<double>>& data) {
    transform(grid, data, FFTW_FORWARD);
}

void backward(const SpatialGrid& grid, std::vector<std::complex<double>>& data) {
    transform(grid, data, FFTW_BACKWARD);
}

} // namespace fft
} // namespace aniso_heat
