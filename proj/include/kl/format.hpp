#pragma once

#include <string>

namespace kl {

/// Round-trip decimal form with 17 significant digits; +-inf become "Infinity" / "-Infinity", NaN "NaN".
std::string format_double(double v);

}  // namespace kl
