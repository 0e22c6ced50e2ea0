#pragma once

#include <complex>
#include <cstdint>

namespace gafzero {

// Counter-based random stream: the state is derived purely from
// (seed, stream_index), so sample i is the same no matter how samples are
// batched across workers. Generator is xoshiro256++ seeded via splitmix64.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream_index);

    std::uint64_t next_u64();

    // Uniform on (0,1), never returns exactly 0 or 1.
    double next_uniform();

    // Standard complex Gaussian with density exp(-|z|^2)/pi, via the polar
    // method: |z|^2 ~ Exp(1), angle uniform. No rejection, so the draw count
    // per call is fixed and streams stay aligned.
    std::complex<double> next_complex_gaussian();

  private:
    std::uint64_t s_[4];
};

}  // namespace gafzero
