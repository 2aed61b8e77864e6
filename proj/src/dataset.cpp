#include "hetcoef/dataset.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hetcoef/errors.hpp"

namespace hetcoef {

void Dataset::validate() const {
  const Eigen::Index rows = n();
  if (x.rows() != rows)
    throw DataError("x column length does not match y");
  if (x.cols() < 1) throw DataError("dataset needs at least one x column");
  if (z && static_cast<Eigen::Index>(z->size()) != rows)
    throw DataError("z column length does not match y");
  if (v && v->size() != rows)
    throw DataError("v column length does not match y");
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (!std::isfinite(y[i])) throw DataError("non-finite y value");
    for (Eigen::Index c = 0; c < x.cols(); ++c)
      if (!std::isfinite(x(i, c))) throw DataError("non-finite x value");
  }
  if (z) {
    for (int code : *z)
      if (code < 0) throw DataError("instrument codes must be >= 0");
  }
  if (v) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double vi = (*v)[i];
      if (!(vi >= 0.0 && vi <= 1.0))
        throw DataError("v entries must lie in [0,1]");
    }
  }
}

void Dataset::validate_mutually_exclusive() const {
  for (Eigen::Index i = 0; i < n(); ++i) {
    double row_sum = 0.0;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
      const double xc = x(i, c);
      if (xc != 0.0 && xc != 1.0)
        throw DataError("treatment dummies must be 0 or 1");
      row_sum += xc;
    }
    if (row_sum > 1.0)
      throw DataError("treatments are not mutually exclusive (row sum > 1)");
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& origin,
                    std::size_t line_no) {
  double value = 0.0;
  const char* begin = s.data();
  const char* end = begin + s.size();
  while (begin < end && (*begin == ' ' || *begin == '\t')) ++begin;
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr != end)
    throw DataError(origin + ": cannot parse number '" + s + "' at line " +
                    std::to_string(line_no));
  return value;
}

}  // namespace

Dataset read_dataset_csv(std::istream& in, const std::string& origin) {
  std::string line;
  if (!std::getline(in, line)) throw DataError(origin + ": empty CSV");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);

  int y_col = -1, z_col = -1, v_col = -1;
  std::vector<int> x_cols;  // ordered x1..xT (or the single `x`)
  std::vector<std::pair<int, int>> x_named;
  for (std::size_t c = 0; c < header.size(); ++c) {
    const std::string& name = header[c];
    if (name == "y") {
      y_col = static_cast<int>(c);
    } else if (name == "x") {
      x_named.emplace_back(1, static_cast<int>(c));
    } else if (name.size() > 1 && name[0] == 'x') {
      int idx = 0;
      auto [ptr, ec] = std::from_chars(name.data() + 1,
                                       name.data() + name.size(), idx);
      if (ec != std::errc() || ptr != name.data() + name.size() || idx < 1)
        throw DataError(origin + ": unrecognized column '" + name + "'");
      x_named.emplace_back(idx, static_cast<int>(c));
    } else if (name == "z") {
      z_col = static_cast<int>(c);
    } else if (name == "v") {
      v_col = static_cast<int>(c);
    } else {
      throw DataError(origin + ": unrecognized column '" + name + "'");
    }
  }
  if (y_col < 0) throw DataError(origin + ": missing y column");
  if (x_named.empty()) throw DataError(origin + ": missing x column(s)");
  std::sort(x_named.begin(), x_named.end());
  for (std::size_t i = 0; i < x_named.size(); ++i) {
    if (x_named.size() > 1 && x_named[i].first != static_cast<int>(i) + 1)
      throw DataError(origin + ": x columns must be named x1..xT");
    x_cols.push_back(x_named[i].second);
  }

  std::vector<double> y_vals, v_vals;
  std::vector<std::vector<double>> x_vals(x_cols.size());
  std::vector<int> z_vals;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError(origin + ": wrong field count at line " +
                      std::to_string(line_no));
    y_vals.push_back(parse_double(fields[y_col], origin, line_no));
    for (std::size_t c = 0; c < x_cols.size(); ++c)
      x_vals[c].push_back(parse_double(fields[x_cols[c]], origin, line_no));
    if (z_col >= 0) {
      const double zf = parse_double(fields[z_col], origin, line_no);
      const int zi = static_cast<int>(zf);
      if (zf != zi)
        throw DataError(origin + ": z must be an integer code at line " +
                        std::to_string(line_no));
      z_vals.push_back(zi);
    }
    if (v_col >= 0)
      v_vals.push_back(parse_double(fields[v_col], origin, line_no));
  }

  Dataset data;
  const Eigen::Index n = static_cast<Eigen::Index>(y_vals.size());
  data.y = Eigen::Map<Eigen::VectorXd>(y_vals.data(), n);
  data.x.resize(n, static_cast<Eigen::Index>(x_cols.size()));
  for (std::size_t c = 0; c < x_cols.size(); ++c)
    data.x.col(static_cast<Eigen::Index>(c)) =
        Eigen::Map<Eigen::VectorXd>(x_vals[c].data(), n);
  if (z_col >= 0) data.z = std::move(z_vals);
  if (v_col >= 0)
    data.v = Eigen::Map<Eigen::VectorXd>(v_vals.data(), n);
  data.validate();
  return data;
}

Dataset read_dataset_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_dataset_csv(in, path);
}

void write_dataset_csv(const Dataset& data, std::ostream& out) {
  char buf[64];
  out << "y";
  if (data.x.cols() == 1) {
    out << ",x";
  } else {
    for (Eigen::Index c = 0; c < data.x.cols(); ++c)
      out << ",x" << (c + 1);
  }
  if (data.z) out << ",z";
  if (data.v) out << ",v";
  out << "\n";
  auto put = [&](double value) {
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out << buf;
  };
  for (Eigen::Index i = 0; i < data.n(); ++i) {
    put(data.y[i]);
    for (Eigen::Index c = 0; c < data.x.cols(); ++c) {
      out << ',';
      put(data.x(i, c));
    }
    if (data.z) out << ',' << (*data.z)[i];
    if (data.v) {
      out << ',';
      put((*data.v)[i]);
    }
    out << "\n";
  }
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open '" + tmp + "' for writing");
    out << contents;
    if (!out) throw DataError("write failed for '" + tmp + "'");
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw DataError("cannot rename '" + tmp + "' to '" + path + "'");
  }
}

void write_dataset_csv(const Dataset& data, const std::string& path) {
  std::ostringstream out;
  write_dataset_csv(data, out);
  write_file_atomic(path, out.str());
}

}  // namespace hetcoef
