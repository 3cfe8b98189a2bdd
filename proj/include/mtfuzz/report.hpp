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

// Symbolization of covered pcs and the static HTML report comparing two
// runs line by line: green = both runs, blue = multi only, orange = single
// only.

#ifndef MTFUZZ_REPORT_HPP_
#define MTFUZZ_REPORT_HPP_

#include <cstdint>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mtfuzz/error.hpp"
#include "mtfuzz/filter.hpp"
#include "mtfuzz/sim_target.hpp"
#include "mtfuzz/trace.hpp"

namespace mtfuzz {

struct SymbolInfo {
  std::string function;
  std::string file;
  std::size_t line = 0;

  bool operator==(const SymbolInfo&) const = default;
};

class SymbolTable {
 public:
  void insert(Pc pc, SymbolInfo info) {
    auto [it, inserted] = entries_.insert_or_assign(pc, std::move(info));
    if (!inserted) warnings_.push_back("duplicate address " + to_hex(pc) + "; last entry wins");
  }

  const SymbolInfo* lookup(Pc pc) const {
    auto it = entries_.find(pc);
    return it == entries_.end() ? nullptr : &it->second;
  }

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const std::map<Pc, SymbolInfo>& entries() const { return entries_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  std::map<Pc, SymbolInfo> entries_;
  std::vector<std::string> warnings_;
};

namespace detail {

inline std::pair<std::string, std::size_t> split_location(std::string_view loc,
                                                          std::size_t line_no) {
  auto colon = loc.rfind(':');
  if (colon == std::string_view::npos || colon == 0 || colon + 1 == loc.size()) {
    throw ParseError("expected path:line, got '" + std::string(loc) + "'", line_no);
  }
  std::size_t line = 0;
  std::string_view digits = loc.substr(colon + 1);
  auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), line);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    throw ParseError("bad line number in '" + std::string(loc) + "'", line_no);
  }
  return {std::string(loc.substr(0, colon)), line};
}

inline std::string relative_to(std::string path, std::string_view root) {
  if (root.empty()) return path;
  std::string prefix(root);
  if (prefix.back() != '/') prefix += '/';
  if (path.starts_with(prefix)) path.erase(0, prefix.size());
  return path;
}

}  // namespace detail

// Lines of `0xADDR<TAB>function<TAB>path:line`. Blank lines are skipped.
inline SymbolTable load_symbol_table(std::string_view tsv) {
  SymbolTable table;
  std::size_t line_no = 0;
  while (!tsv.empty()) {
    ++line_no;
    std::size_t nl = tsv.find('\n');
    std::string_view line = detail::strip_cr(tsv.substr(0, nl));
    tsv.remove_prefix(nl == std::string_view::npos ? tsv.size() : nl + 1);
    if (line.empty()) continue;
    std::size_t t1 = line.find('\t');
    std::size_t t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) {
      throw ParseError("expected 3 tab-separated fields", line_no);
    }
    Pc pc = parse_hex(line.substr(0, t1), line_no);
    auto [file, lno] = detail::split_location(line.substr(t2 + 1), line_no);
    table.insert(pc, {std::string(line.substr(t1 + 1, t2 - t1 - 1)), file, lno});
  }
  return table;
}

inline std::string symbols_to_tsv(const SymbolTable& table) {
  std::string out;
  for (const auto& [pc, s] : table.entries()) {
    out += to_hex(pc) + "\t" + s.function + "\t" + s.file + ":" + std::to_string(s.line) + "\n";
  }
  return out;
}

// Output of `addr2line -f -p -a`: "0xADDR: function at path:line".
// Unresolvable ("?? ??:0") and "(inlined by)" lines are skipped.
inline SymbolTable parse_addr2line(std::string_view text, std::string_view source_root = {}) {
  SymbolTable table;
  std::size_t line_no = 0;
  while (!text.empty()) {
    ++line_no;
    std::size_t nl = text.find('\n');
    std::string_view line = detail::strip_cr(text.substr(0, nl));
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty() || line.find("(inlined by)") != std::string_view::npos) continue;
    std::size_t colon = line.find(": ");
    if (colon != std::string_view::npos && line.substr(colon + 2).starts_with("??")) continue;
    std::size_t at = line.find(" at ", colon == std::string_view::npos ? 0 : colon);
    if (colon == std::string_view::npos || at == std::string_view::npos) {
      throw ParseError("unrecognized addr2line output", line_no);
    }
    std::string_view function = line.substr(colon + 2, at - colon - 2);
    std::string_view loc = line.substr(at + 4);
    if (auto paren = loc.find(" ("); paren != std::string_view::npos) loc = loc.substr(0, paren);
    if (function == "??" || loc.starts_with("??")) continue;
    auto [file, lno] = detail::split_location(loc, line_no);
    if (lno == 0) continue;
    table.insert(parse_hex(line.substr(0, colon), line_no),
                 {std::string(function), detail::relative_to(file, source_root), lno});
  }
  return table;
}

inline std::string expand_symbolizer_command(std::string tmpl, std::string_view elf,
                                             std::string_view addrfile) {
  auto replace_all = [&tmpl](std::string_view key, std::string_view value) {
    for (std::size_t pos = tmpl.find(key); pos != std::string::npos;
         pos = tmpl.find(key, pos + value.size())) {
      tmpl.replace(pos, key.size(), value);
    }
  };
  replace_all("{elf}", elf);
  replace_all("{addrfile}", addrfile);
  return tmpl;
}

// Writes the pcs to `addrfile`, runs the expanded command template through
// the shell and parses its addr2line-style output.
inline SymbolTable run_symbolizer(const std::string& command_template,
                                  const std::string& elf,
                                  const std::vector<Pc>& pcs,
                                  const std::filesystem::path& addrfile,
                                  std::string_view source_root = {}) {
  {
    std::ofstream out(addrfile);
    for (Pc pc : pcs) out << to_hex(pc) << '\n';
    if (!out) throw IoError("cannot write " + addrfile.string());
  }
  std::string cmd = expand_symbolizer_command(command_template, elf, addrfile.string());
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (pipe == nullptr) throw IoError("cannot run symbolizer: " + cmd);
  std::string output;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof(buf), pipe)) output.append(buf, n);
  int rc = ::pclose(pipe);
  if (rc != 0) throw IoError("symbolizer exited with status " + std::to_string(rc));
  return parse_addr2line(output, source_root);
}

inline SymbolTable symbols_from_layout(const ScenarioLayout& layout) {
  SymbolTable table;
  for (const auto& s : sim::kSites) {
    if (!layout.branch_pcs.contains(std::string(s.label))) continue;
    table.insert(s.pc, {std::string(s.function), std::string(s.file), sim::site_line(s)});
  }
  return table;
}

// Writes the simulated target's pseudo-source tree under `root`.
inline void write_sim_sources(const std::filesystem::path& root) {
  for (std::string_view file :
       {sim::kKernelFile, sim::kFirmwareEcallFile, sim::kFirmwareBaseFile}) {
    std::filesystem::path p = root / std::string(file);
    std::filesystem::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << sim::source_text(file);
    if (!out) throw IoError("cannot write " + p.string());
  }
}

enum class LineColor { kNone, kGreen, kBlue, kOrange };

inline LineColor line_color(std::uint64_t multi_count, std::uint64_t single_count) {
  if (multi_count > 0 && single_count > 0) return LineColor::kGreen;
  if (multi_count > 0) return LineColor::kBlue;
  if (single_count > 0) return LineColor::kOrange;
  return LineColor::kNone;
}

inline std::string_view css_class(LineColor c) {
  switch (c) {
    case LineColor::kGreen:
      return "both";
    case LineColor::kBlue:
      return "multi";
    case LineColor::kOrange:
      return "single";
    case LineColor::kNone:
      break;
  }
  return "";
}

struct LineCoverage {
  std::uint64_t multi_count = 0;
  std::uint64_t single_count = 0;
  LineColor color = LineColor::kNone;

  bool operator==(const LineCoverage&) const = default;
};

using PcCounts = std::unordered_map<Pc, std::uint64_t>;
using FileLines = std::map<std::size_t, LineCoverage>;

struct LineReport {
  std::map<std::string, FileLines> files;
  // pc -> (multi count, single count) for pcs with no symbol.
  std::map<Pc, std::pair<std::uint64_t, std::uint64_t>> unresolved;
};

inline LineReport aggregate_lines(const PcCounts& multi, const PcCounts& single,
                                  const SymbolTable& symbols) {
  LineReport report;
  auto add = [&](const PcCounts& counts, bool is_multi) {
    for (const auto& [pc, n] : counts) {
      if (n == 0) continue;
      const SymbolInfo* sym = symbols.lookup(pc);
      if (sym == nullptr) {
        auto& u = report.unresolved[pc];
        (is_multi ? u.first : u.second) += n;
        continue;
      }
      auto& lc = report.files[sym->file][sym->line];
      (is_multi ? lc.multi_count : lc.single_count) += n;
    }
  };
  add(multi, true);
  add(single, false);
  for (auto& [file, lines] : report.files) {
    for (auto& [line, lc] : lines) lc.color = line_color(lc.multi_count, lc.single_count);
  }
  return report;
}

inline PcCounts merged_counts(const CoverageState& s) {
  PcCounts out(s.kernel_cov.begin(), s.kernel_cov.end());
  out.insert(s.firmware_cov.begin(), s.firmware_cov.end());
  return out;
}

namespace html {

inline std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string page_name(std::string_view file) {
  std::string name;
  for (char c : file) name += (c == '/' || c == '\\' || c == ':') ? '_' : c;
  return name + ".html";
}

inline constexpr std::string_view kStyle =
    "body{font-family:sans-serif;margin:1.5em}"
    "table.src{border-collapse:collapse;font-family:monospace;font-size:13px}"
    "table.src td{padding:0 .6em;white-space:pre;vertical-align:top}"
    "td.no,td.cnt{text-align:right;color:#666}"
    ".both{background:#b7f0b1}.multi{background:#b3d4ff}.single{background:#ffd199}"
    ".key{display:inline-block;padding:.2em .8em;margin-right:.5em;border:1px solid #999}"
    ".note{color:#555;font-size:90%}";

inline constexpr std::string_view kNote =
    "Coverage is recorded per basic block and mapped to source lines, so the "
    "correspondence between blocks and lines is not one-to-one.";

inline void head(std::string& out, std::string_view title) {
  out += "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>";
  out += escape(title);
  out += "</title>\n<style>";
  out += kStyle;
  out += "</style>\n</head>\n<body>\n";
}

inline void legend(std::string& out) {
  out += "<div class=\"legend\"><span class=\"key both\">executed by both</span>"
         "<span class=\"key multi\">executed only by multi</span>"
         "<span class=\"key single\">executed only by single</span></div>\n";
  out += "<p class=\"note\">";
  out += kNote;
  out += "</p>\n";
}

inline std::string count_cell(std::uint64_t n) { return n == 0 ? "" : std::to_string(n); }

inline void row(std::string& out, std::size_t line, const LineCoverage* lc,
                std::string_view code) {
  LineColor color = lc ? lc->color : LineColor::kNone;
  out += "<tr";
  if (color != LineColor::kNone) {
    out += " class=\"";
    out += css_class(color);
    out += "\"";
  }
  out += "><td class=\"no\">" + std::to_string(line) + "</td><td class=\"cnt\">" +
         count_cell(lc ? lc->multi_count : 0) + "</td><td class=\"cnt\">" +
         count_cell(lc ? lc->single_count : 0) + "</td><td class=\"code\">" +
         escape(code) + "</td></tr>\n";
}

}  // namespace html

// One source page. Without source text only the executed lines are listed.
inline std::string render_file_page(std::string_view file, const FileLines& lines,
                                    std::optional<std::string_view> source) {
  std::string out;
  html::head(out, file);
  out += "<h1>" + html::escape(file) + "</h1>\n";
  html::legend(out);
  out += "<p><a href=\"index.html\">index</a></p>\n";
  out += "<table class=\"src\">\n<tr><th>line</th><th>multi</th><th>single</th><th>source</th></tr>\n";
  if (source) {
    std::string_view text = *source;
    std::size_t line_no = 0;
    while (!text.empty()) {
      ++line_no;
      std::size_t nl = text.find('\n');
      std::string_view code = text.substr(0, nl);
      text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
      auto it = lines.find(line_no);
      html::row(out, line_no, it == lines.end() ? nullptr : &it->second, code);
    }
  } else {
    for (const auto& [line_no, lc] : lines) html::row(out, line_no, &lc, "(source unavailable)");
  }
  out += "</table>\n</body>\n</html>\n";
  return out;
}

inline std::string render_index(const LineReport& report) {
  std::string out;
  html::head(out, "coverage report");
  out += "<h1>coverage report</h1>\n";
  html::legend(out);
  out += "<table class=\"src\">\n<tr><th>file</th><th>both</th><th>multi only</th>"
         "<th>single only</th></tr>\n";
  for (const auto& [file, lines] : report.files) {
    std::size_t n[4] = {0, 0, 0, 0};
    for (const auto& [l, lc] : lines) ++n[static_cast<int>(lc.color)];
    out += "<tr><td><a href=\"" + html::escape(html::page_name(file)) + "\">" +
           html::escape(file) + "</a></td><td class=\"cnt\">" + std::to_string(n[1]) +
           "</td><td class=\"cnt\">" + std::to_string(n[2]) + "</td><td class=\"cnt\">" +
           std::to_string(n[3]) + "</td></tr>\n";
  }
  out += "</table>\n";
  out += "<h2>unresolved addresses</h2>\n";
  if (report.unresolved.empty()) {
    out += "<p>none</p>\n";
  } else {
    out += "<table class=\"src\">\n<tr><th>address</th><th>multi</th><th>single</th></tr>\n";
    for (const auto& [pc, counts] : report.unresolved) {
      out += "<tr><td>" + to_hex(pc) + "</td><td class=\"cnt\">" +
             std::to_string(counts.first) + "</td><td class=\"cnt\">" +
             std::to_string(counts.second) + "</td></tr>\n";
    }
    out += "</table>\n";
  }
  out += "</body>\n</html>\n";
  return out;
}

// Writes index.html plus one page per file; returns the paths written.
inline std::vector<std::filesystem::path> render_html(const LineReport& report,
                                                      const std::filesystem::path& source_root,
                                                      const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  if (!fs::is_directory(source_root, ec)) {
    throw IoError("source root is not a readable directory: " + source_root.string());
  }
  fs::create_directories(out_dir);
  std::vector<fs::path> written;
  auto write = [&written](const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
    if (!out) throw IoError("cannot write " + p.string());
    written.push_back(p);
  };
  write(out_dir / "index.html", render_index(report));
  for (const auto& [file, lines] : report.files) {
    std::optional<std::string> text;
    std::ifstream in(source_root / file, std::ios::binary);
    if (in) {
      std::stringstream ss;
      ss << in.rdbuf();
      text = ss.str();
    }
    write(out_dir / html::page_name(file),
          render_file_page(file, lines,
                           text ? std::optional<std::string_view>(*text) : std::nullopt));
  }
  return written;
}

}  // namespace mtfuzz

#endif  // MTFUZZ_REPORT_HPP_
