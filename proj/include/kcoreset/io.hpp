#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "kcoreset/dynamic.hpp"
#include "kcoreset/errors.hpp"
#include "kcoreset/metric.hpp"

namespace kcoreset {

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline bool skippable(std::string_view line) { return line.empty() || line.front() == '#'; }

template <class T>
T parse_number(std::string_view s, std::size_t line, const char* what) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || end != s.data() + s.size()) {
    throw ParseError(line, std::string("bad ") + what + " '" + std::string(s) + "'");
  }
  if constexpr (std::is_floating_point_v<T>) {
    if (!std::isfinite(v)) throw ParseError(line, std::string("non-finite ") + what);
  }
  return v;
}

inline std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) return out;
    start = pos + 1;
  }
}

inline std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return in;
}

inline void append_number(std::string& out, double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, res.ptr);
}

}  // namespace detail

/// One point per line: comma-separated coordinates with an optional last field
/// w=<int>. Lines starting with '#' and blank lines are skipped.
inline PointSet read_points(std::istream& in) {
  PointSet out;
  std::string raw;
  std::size_t line = 0;
  std::size_t dim = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(raw);
    if (detail::skippable(text)) continue;
    auto fields = detail::split(text, ',');
    WeightedPoint wp;
    const auto last = detail::trim(fields.back());
    if (last.starts_with("w=")) {
      wp.weight = detail::parse_number<Weight>(last.substr(2), line, "weight");
      if (wp.weight < 1) throw ParseError(line, "weight must be a positive integer");
      fields.pop_back();
    }
    if (fields.empty()) throw ParseError(line, "no coordinates");
    for (auto f : fields) wp.point.coords.push_back(detail::parse_number<double>(f, line, "coordinate"));
    if (dim == 0) dim = wp.point.dimension();
    if (wp.point.dimension() != dim) {
      throw ParseError(line, "expected " + std::to_string(dim) + " coordinates, got " +
                                 std::to_string(wp.point.dimension()));
    }
    out.push_back(std::move(wp));
  }
  return out;
}

inline PointSet read_points_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_points(in);
}

inline std::string format_point(const WeightedPoint& wp) {
  std::string s;
  for (std::size_t j = 0; j < wp.point.dimension(); ++j) {
    if (j) s += ',';
    detail::append_number(s, wp.point[j]);
  }
  if (wp.weight != 1) s += ",w=" + std::to_string(wp.weight);
  return s;
}

inline void write_points(std::ostream& out, std::span<const WeightedPoint> pts) {
  for (const auto& wp : pts) out << format_point(wp) << '\n';
}

/// Turnstile input: header "delta=<int> d=<int>", then "+ x1,...,xd" or
/// "- x1,...,xd" per line.
struct UpdateStream {
  std::int64_t delta = 0;
  int d = 0;
  std::vector<GridUpdate> ops;
};

inline UpdateStream read_updates(std::istream& in) {
  UpdateStream out;
  std::string raw;
  std::size_t line = 0;
  bool header = false;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(raw);
    if (detail::skippable(text)) continue;
    if (!header) {
      bool got_delta = false, got_d = false;
      for (auto tok : detail::split(text, ' ')) {
        tok = detail::trim(tok);
        if (tok.empty()) continue;
        if (tok.starts_with("delta=")) {
          out.delta = detail::parse_number<std::int64_t>(tok.substr(6), line, "delta");
          got_delta = true;
        } else if (tok.starts_with("d=")) {
          out.d = detail::parse_number<int>(tok.substr(2), line, "dimension");
          got_d = true;
        } else {
          throw ParseError(line, "unexpected header field '" + std::string(tok) + "'");
        }
      }
      if (!got_delta || !got_d) throw ParseError(line, "header must be 'delta=<int> d=<int>'");
      if (out.delta < 1 || out.d < 1) throw ParseError(line, "delta and d must be positive");
      header = true;
      continue;
    }
    GridUpdate u;
    if (text.front() == '+') {
      u.sign = 1;
    } else if (text.front() == '-') {
      u.sign = -1;
    } else {
      throw ParseError(line, "update must start with '+' or '-'");
    }
    for (auto f : detail::split(text.substr(1), ',')) {
      const auto x = detail::parse_number<std::int64_t>(f, line, "grid coordinate");
      if (x < 1 || x > out.delta) throw ParseError(line, "coordinate " + std::to_string(x) + " outside [1, delta]");
      u.point.coords.push_back(static_cast<double>(x));
    }
    if (u.point.dimension() != static_cast<std::size_t>(out.d)) {
      throw ParseError(line, "expected " + std::to_string(out.d) + " coordinates");
    }
    out.ops.push_back(std::move(u));
  }
  if (!header) throw ParseError(line, "missing 'delta=<int> d=<int>' header");
  return out;
}

inline UpdateStream read_updates_file(const std::string& path) {
  auto in = detail::open_input(path);
  return read_updates(in);
}

inline void write_updates(std::ostream& out, const UpdateStream& s) {
  out << "delta=" << s.delta << " d=" << s.d << '\n';
  for (const auto& u : s.ops) {
    out << (u.sign > 0 ? '+' : '-') << ' ';
    for (std::size_t j = 0; j < u.point.dimension(); ++j) {
      if (j) out << ',';
      out << static_cast<std::int64_t>(u.point[j]);
    }
    out << '\n';
  }
}

/// Square distance table, one row per line, entries separated by commas or spaces.
inline std::vector<std::vector<double>> read_matrix(std::istream& in) {
  std::vector<std::vector<double>> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string text(detail::trim(raw));
    if (detail::skippable(text)) continue;
    for (char& c : text)
      if (c == ',') c = ' ';
    std::vector<double> row;
    for (auto tok : detail::split(text, ' '))
      if (!detail::trim(tok).empty()) row.push_back(detail::parse_number<double>(tok, line, "distance"));
    out.push_back(std::move(row));
  }
  return out;
}

/// One 1-based machine index per line.
inline std::vector<int> read_assignment(std::istream& in) {
  std::vector<int> out;
  std::string raw;
  std::size_t line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto text = detail::trim(raw);
    if (detail::skippable(text)) continue;
    out.push_back(detail::parse_number<int>(text, line, "machine index"));
  }
  return out;
}

}  // namespace kcoreset
