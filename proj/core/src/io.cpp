#include "rsc/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace rsc {

namespace {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

}  // namespace

std::string sampleset_to_csv(const SampleSet& data) {
  std::string out;
  for (int i = 0; i < data.n(); ++i) {
    for (int j = 0; j < data.p(); ++j) {
      out += fmt17(data.rows(i, j));
      out += (j + 1 < data.p()) ? "," : "\n";
    }
  }
  return out;
}

SampleSet sampleset_from_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  size_t width = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    for (const std::string& f : split_csv_line(line)) {
      try {
        size_t used = 0;
        row.push_back(std::stod(f, &used));
        if (used != f.size()) throw std::invalid_argument(f);
      } catch (const std::exception&) {
        throw ParseError("bad number on line " + std::to_string(lineno));
      }
    }
    if (width == 0) width = row.size();
    if (row.size() != width)
      throw ParseError("inconsistent column count on line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw WrongShape("empty dataset");
  SampleSet s;
  s.rows.resize(rows.size(), width);
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < width; ++j) s.rows(i, j) = rows[i][j];
  return s;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + path);
  out << content;
}

SampleSet read_sampleset(const std::string& path) { return sampleset_from_csv(read_file(path)); }

LabeledDataset load_sonar(const std::string& path) {
  const std::string text = read_file(path);
  LabeledDataset data;
  data.class_names = {"M", "R"};  // metal first, rock second
  std::vector<std::vector<double>> rows;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != 61)
      throw WrongShape("line " + std::to_string(lineno) + ": expected 60 features + label, got " +
                       std::to_string(fields.size()) + " fields");
    std::vector<double> row(60);
    for (int j = 0; j < 60; ++j) {
      try {
        row[j] = std::stod(fields[j]);
      } catch (const std::exception&) {
        throw ParseError("bad number on line " + std::to_string(lineno));
      }
    }
    const std::string& label = fields[60];
    if (label == "M")
      data.labels.push_back(0);
    else if (label == "R")
      data.labels.push_back(1);
    else
      throw ParseError("unknown label on line " + std::to_string(lineno) + ": " + label);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw WrongShape("empty SONAR file");
  data.features.resize(rows.size(), 60);
  for (size_t i = 0; i < rows.size(); ++i)
    for (int j = 0; j < 60; ++j) data.features(i, j) = rows[i][j];
  return data;
}

}  // namespace rsc
