#include "delayhedge/text_io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

namespace delayhedge {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void write_matrix_block(std::ostream& out, const std::string& name,
                        const Matrix<double>& m) {
  out << "# " << name << " " << m.rows() << " " << m.cols() << "\n";
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out << " ";
      out << format_double(m(i, j));
    }
    out << "\n";
  }
}

void write_scalar_block(std::ostream& out, const std::string& name,
                        double value) {
  out << "# " << name << " 1 1\n" << format_double(value) << "\n";
}

std::vector<double> parse_reals_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    if (token[0] == '#') {  // comment to end of line
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    double v;
    const auto res = std::from_chars(token.data(), token.data() + token.size(), v);
    if (res.ec != std::errc() || res.ptr != token.data() + token.size()) {
      throw ParseError("not a real number in " + path + ": '" + token + "'");
    }
    values.push_back(v);
  }
  return values;
}

}  // namespace delayhedge
