#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace slc::cli {

// Fixed with 12 decimals for 1e-4 <= |x| < 1e8 and zero, otherwise %.12e.
std::string fmt_num(double x);

// Accepts plain numbers and multiples of pi: "pi/2", "3pi/4", "0.75*pi".
double parse_angle(const std::string& text);
std::vector<double> parse_list(const std::string& text);

std::uint64_t fnv1a(const std::string& text);
std::string hex64(std::uint64_t v);

}  // namespace slc::cli
