#include <charconv>
#include <string>

#include "crashbound/dataio.hpp"
#include "crashbound/error.hpp"

namespace crashbound {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view text) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw DomainError("malformed number '" + std::string(text) + "'");
  return v;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }
std::string opt(const std::optional<std::uint64_t>& v) { return v ? std::to_string(*v) : std::string(); }

std::string join_widths(const std::vector<std::size_t>& widths) {
  std::string s;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(widths[i]);
  }
  return s;
}

}  // namespace

std::string result_line(const ResultRow& r) {
  std::string s;
  auto field = [&](const std::string& v) {
    if (v.find_first_of(",\n\"") != std::string::npos) throw DomainError("CSV field contains a separator: " + v);
    s += v;
  };
  const std::string fields[] = {r.experiment,
                                std::to_string(r.seed),
                                r.activation,
                                format_double(r.lipschitz),
                                std::to_string(r.depth),
                                join_widths(r.widths),
                                std::to_string(r.f),
                                opt(r.omega_av),
                                opt(r.omega_mav),
                                opt(r.omega_max),
                                opt(r.omega_std),
                                opt(r.erf_av),
                                opt(r.erf_max),
                                opt(r.patterns),
                                opt(r.inputs),
                                r.mode};
  for (std::size_t i = 0; i < std::size(fields); ++i) {
    if (i) s += ',';
    field(fields[i]);
  }
  return s;
}

void write_results(std::ostream& out, std::span<const ResultRow> rows) {
  out << kResultsHeader << '\n';
  for (const auto& r : rows) out << result_line(r) << '\n';
}

void write_table(std::ostream& out, std::span<const std::string> header,
                 std::span<const std::vector<std::string>> rows) {
  for (const auto& row : rows)
    if (row.size() != header.size())
      throw DomainError("CSV row has " + std::to_string(row.size()) + " fields, header has " +
                        std::to_string(header.size()));
  auto line = [&](std::span<const std::string> cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(header);
  for (const auto& row : rows) line(row);
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    out.emplace_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

}  // namespace crashbound
