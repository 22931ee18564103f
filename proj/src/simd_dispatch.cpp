#include "spslab/simd.hpp"

#include <cstdlib>
#include <cstring>

namespace spslab::simd {

const Backend& active() {
  static const Backend& chosen = [] () -> const Backend& {
    const char* env = std::getenv("SPSLAB_SIMD");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) return scalar_backend();
    if (const Backend* b = avx2_backend()) return *b;
    return scalar_backend();
  }();
  return chosen;
}

}  // namespace spslab::simd
