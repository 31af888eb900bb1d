#pragma once

#include <functional>
#include <string>

namespace cyclo {

using WarningHandler = std::function<void(const std::string&)>;

/// Replaces the process-wide warning handler; an empty handler restores the
/// default, which writes to stderr. Returns the previous handler.
WarningHandler set_warning_handler(WarningHandler handler);

void warn(const std::string& message);

}  // namespace cyclo
