#pragma once

#include <functional>
#include <string>

namespace galois::log {

using Sink = std::function<void(const std::string&)>;

// Replaces the process-wide warning sink. An empty sink restores the default,
// which writes "warning: <message>" lines to stderr.
void set_warning_sink(Sink sink);

void warn(const std::string& message);

}  // namespace galois::log
