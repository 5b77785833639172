#include "sparsefit/parallel.hpp"

#include <cstdlib>
#include <string>

namespace sparsefit {

int default_threads() {
  const char* env = std::getenv("SPARSEFIT_THREADS");
  if (env == nullptr) return 1;
  try {
    const int n = std::stoi(env);
    return n > 0 ? n : 1;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace sparsefit
