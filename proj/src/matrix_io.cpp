#include "toda/matrix_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "toda/error.hpp"

namespace toda {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

ExtendedJacobi MatrixFile::as_extended() const {
  if (!tail) throw DomainError("matrix file has no tail line");
  return ExtendedJacobi(matrix, tail->first, tail->second);
}

namespace {

std::vector<double> read_reals(std::istringstream& ls, const std::string& what) {
  std::vector<double> v;
  std::string tok;
  while (ls >> tok) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(tok, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("matrix file: bad number '" + tok + "' in " + what);
    }
    if (used != tok.size()) throw std::invalid_argument("matrix file: bad number '" + tok + "' in " + what);
    v.push_back(x);
  }
  return v;
}

}  // namespace

MatrixFile parse_matrix(std::istream& in) {
  std::string line;
  std::optional<int> N;
  int base = 1;
  std::optional<std::vector<double>> a, b;
  std::optional<std::pair<double, double>> tail;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "N") {
      std::string base_kw;
      int n = 0;
      if (!(ls >> n)) throw std::invalid_argument("matrix file: expected 'N <n> base <b>'");
      if (ls >> base_kw) {
        if (base_kw != "base" || !(ls >> base)) throw std::invalid_argument("matrix file: expected 'N <n> base <b>'");
      }
      N = n;
    } else if (key == "a:") {
      a = read_reals(ls, "a:");
    } else if (key == "b:") {
      b = read_reals(ls, "b:");
    } else if (key == "tail:") {
      auto t = read_reals(ls, "tail:");
      if (t.size() != 2) throw std::invalid_argument("matrix file: tail needs a_inf b_inf");
      tail = std::make_pair(t[0], t[1]);
    } else {
      throw std::invalid_argument("matrix file: unknown line '" + line + "'");
    }
  }
  if (!N || !b) throw std::invalid_argument("matrix file: missing N or b line");
  if (!a) a.emplace();
  if (static_cast<int>(b->size()) != *N || static_cast<int>(a->size()) + 1 != *N)
    throw std::invalid_argument("matrix file: coefficient counts do not match N");
  return MatrixFile{JacobiMatrix(std::move(*a), std::move(*b), base), tail};
}

MatrixFile read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open matrix file " + path);
  return parse_matrix(in);
}

void write_matrix(std::ostream& out, const JacobiMatrix& J) {
  out << "N " << J.size() << " base " << J.index_base() << "\na:";
  for (double v : J.off_diagonal()) out << ' ' << format_double(v);
  out << "\nb:";
  for (double v : J.diagonal()) out << ' ' << format_double(v);
  out << '\n';
}

void write_matrix(std::ostream& out, const ExtendedJacobi& X) {
  write_matrix(out, X.window());
  out << "tail: " << format_double(X.a_inf()) << ' ' << format_double(X.b_inf()) << '\n';
}

namespace {
template <class M>
void write_file(const std::string& path, const M& m) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  write_matrix(out, m);
  if (!out) throw IoError("write failed: " + path);
}
}  // namespace

void write_matrix_file(const std::string& path, const JacobiMatrix& J) { write_file(path, J); }
void write_matrix_file(const std::string& path, const ExtendedJacobi& X) { write_file(path, X); }

}  // namespace toda
