#include "hfa/parallel.hpp"

#include <cstdlib>
#include <string>

namespace hfa {

unsigned worker_count() {
  if (const char* env = std::getenv("HFA_THREADS")) {
    try {
      const long value = std::stol(env);
      if (value >= 1) return static_cast<unsigned>(value);
    } catch (const std::exception&) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace hfa
