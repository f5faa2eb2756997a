#include "localis/threads.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>
#include <thread>

namespace localis {

int thread_budget(long task_count) {
  long budget = static_cast<long>(std::max(1u, std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("LOCALIS_THREADS")) {
    try {
      const long cap = std::stol(env);
      if (cap >= 1) budget = std::min(budget, cap);
    } catch (const std::exception&) {
      // Unparseable values fall back to hardware concurrency.
    }
  }
  return static_cast<int>(std::clamp(task_count, long{1}, budget));
}

}  // namespace localis
