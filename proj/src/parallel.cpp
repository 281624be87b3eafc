#include "certiq/parallel.hpp"

#include <cstdlib>
#include <string>

namespace certiq {

namespace {

int threads_from_env() {
  if (const char* env = std::getenv("CERTIQ_THREADS")) {
    try {
      const int n = std::stoi(env);
      if (n >= 1) return n;
    } catch (const std::exception&) {
    }
  }
  return 1;
}

std::atomic<int>& thread_setting() {
  static std::atomic<int> n{threads_from_env()};
  return n;
}

}  // namespace

int thread_count() { return thread_setting().load(); }

void set_thread_count(int n) { thread_setting().store(n < 1 ? 1 : n); }

}  // namespace certiq
