#include "qtwist/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace qtwist {

namespace {

std::atomic<unsigned> g_override{0};

unsigned default_thread_count() {
  if (const char* env = std::getenv("QTWIST_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace

unsigned thread_count() {
  const unsigned n = g_override.load(std::memory_order_relaxed);
  return n != 0 ? n : default_thread_count();
}

void set_thread_count(unsigned n) { g_override.store(n, std::memory_order_relaxed); }

}  // namespace qtwist
