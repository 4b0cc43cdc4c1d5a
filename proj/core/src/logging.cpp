#include "galois/logging.hpp"

#include <iostream>
#include <mutex>

namespace galois::log {

namespace {

std::mutex g_mutex;
Sink g_sink;

}  // namespace

void set_warning_sink(Sink sink) {
  std::lock_guard<std::mutex> lock(g_mutex);
  g_sink = std::move(sink);
}

void warn(const std::string& message) {
  Sink sink;
  {
    std::lock_guard<std::mutex> lock(g_mutex);
    sink = g_sink;
  }
  if (sink) {
    sink(message);
  } else {
    std::cerr << "warning: " << message << "\n";
  }
}

}  // namespace galois::log
