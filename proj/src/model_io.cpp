#include "delayhedge/models.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace delayhedge {

namespace {

// Strips comments and blank lines; returns the next payload line.
bool next_line(std::istream& in, std::string& line) {
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    return true;
  }
  return false;
}

std::vector<double> split_reals(const std::string& line, const std::string& context) {
  std::istringstream in(line);
  std::vector<double> out;
  std::string token;
  while (in >> token) {
    double v;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw ParseError(context + ": not a real number: '" + token + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

MarketModel<double> load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open model file: " + path);
  std::string line;

  if (!next_line(in, line)) throw ParseError(path + ": missing 'n' line");
  std::istringstream nline(line);
  std::string key;
  long n = 0;
  if (!(nline >> key >> n) || key != "n" || n < 1) {
    throw ParseError(path + ": first line must be 'n <positive int>'");
  }

  if (!next_line(in, line)) throw ParseError(path + ": missing 's0' line");
  std::istringstream s0_line(line);
  std::string rest;
  if (!(s0_line >> key) || key != "s0") {
    throw ParseError(path + ": second line must be 's0 <real>'");
  }
  std::getline(s0_line, rest);
  const auto s0_fields = split_reals(rest, path);
  if (s0_fields.size() != 1) {
    throw ParseError(path + ": second line must be 's0 <real>'");
  }
  const double s0 = s0_fields[0];

  if (!next_line(in, line)) throw ParseError(path + ": missing 'mu' line");
  std::istringstream mu_line(line);
  if (!(mu_line >> key) || key != "mu") {
    throw ParseError(path + ": third line must be 'mu <n reals>'");
  }
  std::getline(mu_line, rest);
  const auto mu_fields = split_reals(rest, path);
  if (static_cast<long>(mu_fields.size()) != n) {
    std::ostringstream msg;
    msg << path << ": mu has " << mu_fields.size() << " entries, expected " << n;
    throw DimensionMismatch(msg.str());
  }

  Matrix<double> sigma(n, n);
  for (long i = 0; i < n; ++i) {
    if (!next_line(in, line)) {
      std::ostringstream msg;
      msg << path << ": expected " << n << " covariance rows, got " << i;
      throw ParseError(msg.str());
    }
    const auto row = split_reals(line, path);
    if (static_cast<long>(row.size()) != n) {
      std::ostringstream msg;
      msg << path << ": covariance row " << i + 1 << " has " << row.size()
          << " entries, expected " << n;
      throw DimensionMismatch(msg.str());
    }
    for (long j = 0; j < n; ++j) sigma(i, j) = row[j];
  }

  Vector<double> mu(n);
  for (long i = 0; i < n; ++i) mu(i) = mu_fields[static_cast<std::size_t>(i)];
  return MarketModel<double>(std::move(mu), SymMatrix<double>(sigma), s0);
}

}  // namespace delayhedge
