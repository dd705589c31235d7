#pragma once

#include <functional>
#include <string>
#include <string_view>

namespace cascadeloc::log {

using Handler = std::function<void(std::string_view)>;

// Replaces the process-wide warning sink and returns the previous one.
// The default sink writes "warning: <msg>" to stderr.
Handler set_warning_handler(Handler handler);

void warn(std::string_view message);

// Installs a handler for the lifetime of the object and restores the previous one.
class ScopedWarningHandler {
public:
  explicit ScopedWarningHandler(Handler handler) : previous_(set_warning_handler(std::move(handler))) {}
  ~ScopedWarningHandler() { set_warning_handler(std::move(previous_)); }
  ScopedWarningHandler(const ScopedWarningHandler &) = delete;
  ScopedWarningHandler &operator=(const ScopedWarningHandler &) = delete;

private:
  Handler previous_;
};

} // namespace cascadeloc::log
