// Copyright 2026 The mtfuzz Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Program-counter traces and the trace-log text format: one address per
// line, `0x` followed by lowercase unpadded hex, LF terminated.

#ifndef MTFUZZ_TRACE_HPP_
#define MTFUZZ_TRACE_HPP_

#include <charconv>
#include <cstdint>
#include <istream>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "mtfuzz/error.hpp"

namespace mtfuzz {

using Pc = std::uint64_t;
using Trace = std::vector<Pc>;

inline std::string to_hex(Pc pc) {
  char buf[2 + 16];
  buf[0] = '0';
  buf[1] = 'x';
  auto [end, ec] = std::to_chars(buf + 2, buf + sizeof(buf), pc, 16);
  return std::string(buf, end);
}

// Accepts an optional 0x/0X prefix and any number of digits, so zero-padded
// logs parse too.
inline Pc parse_hex(std::string_view text, std::size_t line = 0) {
  std::string_view digits = text;
  if (digits.size() >= 2 && digits[0] == '0' &&
      (digits[1] == 'x' || digits[1] == 'X')) {
    digits.remove_prefix(2);
  }
  if (digits.empty()) {
    throw ParseError("expected hex address, got '" + std::string(text) + "'",
                     line);
  }
  Pc value = 0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value, 16);
  if (ec == std::errc::result_out_of_range) {
    throw RangeError("address exceeds 64 bits: '" + std::string(text) + "'",
                     line);
  }
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw ParseError("expected hex address, got '" + std::string(text) + "'",
                     line);
  }
  return value;
}

inline void encode_trace(std::span<const Pc> trace, std::ostream& out) {
  for (Pc pc : trace) out << to_hex(pc) << '\n';
}

inline std::string encode_trace(std::span<const Pc> trace) {
  std::string out;
  out.reserve(trace.size() * 19);
  for (Pc pc : trace) {
    out += to_hex(pc);
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::string_view strip_cr(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  return line;
}

}  // namespace detail

inline Trace decode_trace(std::string_view bytes) {
  Trace trace;
  std::size_t line_no = 0;
  while (!bytes.empty()) {
    ++line_no;
    std::size_t nl = bytes.find('\n');
    std::string_view line = bytes.substr(0, nl);
    bytes.remove_prefix(nl == std::string_view::npos ? bytes.size() : nl + 1);
    line = detail::strip_cr(line);
    if (line.empty()) continue;
    trace.push_back(parse_hex(line, line_no));
  }
  return trace;
}

// Streaming variant for logs too large to slurp.
inline Trace read_trace(std::istream& in) {
  Trace trace;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = detail::strip_cr(line);
    if (view.empty()) continue;
    trace.push_back(parse_hex(view, line_no));
  }
  return trace;
}

}  // namespace mtfuzz

#endif  // MTFUZZ_TRACE_HPP_
