#ifndef SPLITWISE_FORMAT_HPP
#define SPLITWISE_FORMAT_HPP

#include <string>

namespace splitwise {

// Shortest representation that round-trips the double exactly (%.17g with
// trailing-zero trimming via shorter precisions).
std::string num_full(double v);

// Fixed decimals, e.g. num_fixed(101.55, 3) -> "101.550".
std::string num_fixed(double v, int decimals);

// Rounded to 2 decimals with trailing zeros trimmed: 132.4999 -> "132.5",
// 142.7577 -> "142.76".
std::string num_round2(double v);

}  // namespace splitwise

#endif  // SPLITWISE_FORMAT_HPP
