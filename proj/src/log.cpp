#include "cascadeloc/log.hpp"

#include <iostream>
#include <mutex>

namespace cascadeloc::log {
namespace {

std::mutex &sink_mutex() {
  static std::mutex m;
  return m;
}

Handler &sink() {
  static Handler h = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return h;
}

} // namespace

Handler set_warning_handler(Handler handler) {
  std::lock_guard lock(sink_mutex());
  Handler previous = std::move(sink());
  sink() = std::move(handler);
  return previous;
}

void warn(std::string_view message) {
  std::lock_guard lock(sink_mutex());
  if (sink())
    sink()(message);
}

} // namespace cascadeloc::log
