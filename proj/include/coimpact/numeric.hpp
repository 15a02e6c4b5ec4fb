#pragma once

#include <span>
#include <string>
#include <string_view>

namespace coimpact {

/// Correctly rounded sum of a finite sequence (Shewchuk partials).
/// The result depends only on the multiset of inputs, so it is exactly
/// invariant under permutation and odd under negation.
double exact_sum(std::span<const double> values);

/// Shortest decimal string that parses back to the same double.
std::string format_double(double value);

/// Strict decimal parse; throws DataError naming `what` on failure.
double parse_double(std::string_view text, std::string_view what);
long long parse_integer(std::string_view text, std::string_view what);

}  // namespace coimpact
