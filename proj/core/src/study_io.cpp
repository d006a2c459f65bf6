#include "lpwg/study_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace lpwg {

std::string format_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.5e", v);
  return buf;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"n",       "h",  "e_L", "rate_L", "e_W1", "rate_W1", "e_W2",
                                             "rate_W2", "iters", "r1",  "r2",     "r3",   "wall_time", "converged"};
  return cols;
}

namespace {

std::string rate_cell(double prev, double cur) {
  if (!(prev > 0.0) || !(cur > 0.0)) return "";
  return format_sci(std::log2(prev / cur));
}

std::string fixed_rate(double prev, double cur) {
  if (!(prev > 0.0) || !(cur > 0.0)) return "";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", std::log2(prev / cur));
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, sep)) parts.push_back(cur);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

double parse_double(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("read_csv: bad value for ") + what + ": '" + s + "'");
  }
}

long parse_long(const std::string& s, const char* what) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw std::runtime_error(std::string("read_csv: bad value for ") + what + ": '" + s + "'");
  }
}

}  // namespace

void write_csv(std::ostream& os, const StudyOutput& out) {
  os << "# lpwg_version=" << out.version << '\n';
  for (const auto& [k, v] : out.config) os << "# " << k << '=' << v << '\n';
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  const auto& reps = out.table.reports;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const ErrorReport& r = reps[i];
    const ErrorReport* prev = i > 0 ? &reps[i - 1] : nullptr;
    os << r.n << ',' << format_sci(r.h) << ',' << format_sci(r.e_L) << ','
       << (prev ? rate_cell(prev->e_L, r.e_L) : "") << ',' << format_sci(r.e_W1) << ','
       << (prev ? rate_cell(prev->e_W1, r.e_W1) : "") << ',' << format_sci(r.e_W2) << ','
       << (prev ? rate_cell(prev->e_W2, r.e_W2) : "") << ',' << r.iterations << ',' << format_sci(r.r1) << ','
       << format_sci(r.r2) << ',' << format_sci(r.r3) << ',' << (out.omit_wall_time ? "" : format_sci(r.wall_time))
       << ',' << (r.converged ? 1 : 0) << '\n';
  }
}

void write_markdown(std::ostream& os, const StudyOutput& out) {
  os << "<!-- lpwg " << out.version;
  for (const auto& [k, v] : out.config) os << ' ' << k << '=' << v;
  os << " -->\n\n";
  const int p = out.table.p;
  os << "| n | ||u-u_h||_{0," << p << "} | order | |u-u_h|_{1," << p << "} | order | ||u-u_h||_{2," << p
     << ",h} | order | iters | converged |\n";
  os << "|---|---|---|---|---|---|---|---|---|\n";
  const auto& reps = out.table.reports;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    const ErrorReport& r = reps[i];
    const ErrorReport* prev = i > 0 ? &reps[i - 1] : nullptr;
    os << "| " << r.n << " | " << format_sci(r.e_L) << " | " << (prev ? fixed_rate(prev->e_L, r.e_L) : "")
       << " | " << format_sci(r.e_W1) << " | " << (prev ? fixed_rate(prev->e_W1, r.e_W1) : "") << " | "
       << format_sci(r.e_W2) << " | " << (prev ? fixed_rate(prev->e_W2, r.e_W2) : "") << " | " << r.iterations
       << " | " << (r.converged ? "yes" : "no") << " |\n";
  }
}

StudyOutput read_csv(std::istream& is) {
  StudyOutput out;
  std::string line;
  bool header_seen = false;
  const auto& cols = csv_columns();
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (header_seen) throw std::runtime_error("read_csv: config line after header");
      const std::string body = line.size() > 2 ? line.substr(2) : "";
      const auto eq = body.find('=');
      if (eq == std::string::npos) throw std::runtime_error("read_csv: malformed config line '" + line + "'");
      const std::string key = body.substr(0, eq), value = body.substr(eq + 1);
      if (key == "lpwg_version") {
        out.version = value;
      } else {
        out.config.emplace_back(key, value);
        if (key == "problem") out.table.problem = value;
        if (key == "p") out.table.p = static_cast<int>(parse_long(value, "p"));
        if (key == "k") out.table.k = static_cast<int>(parse_long(value, "k"));
        if (key == "l") out.table.l = static_cast<int>(parse_long(value, "l"));
      }
      continue;
    }
    const auto cells = split(line, ',');
    if (!header_seen) {
      if (cells != cols) throw std::runtime_error("read_csv: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    if (cells.size() != cols.size()) throw std::runtime_error("read_csv: wrong number of cells in '" + line + "'");
    ErrorReport r;
    r.n = static_cast<int>(parse_long(cells[0], "n"));
    r.h = parse_double(cells[1], "h");
    r.e_L = parse_double(cells[2], "e_L");
    r.e_W1 = parse_double(cells[4], "e_W1");
    r.e_W2 = parse_double(cells[6], "e_W2");
    r.iterations = parse_long(cells[8], "iters");
    r.r1 = parse_double(cells[9], "r1");
    r.r2 = parse_double(cells[10], "r2");
    r.r3 = parse_double(cells[11], "r3");
    if (cells[12].empty()) {
      out.omit_wall_time = true;
    } else {
      r.wall_time = parse_double(cells[12], "wall_time");
    }
    r.converged = parse_long(cells[13], "converged") != 0;
    out.table.reports.push_back(r);
  }
  if (!header_seen) throw std::runtime_error("read_csv: missing header row");
  return out;
}

}  // namespace lpwg
