// io.hpp - dataset loading and writing.
//
// CSV: header "f0,...,f{d-1},label", one sample per line, '.' decimal.
// svmlight: "label idx:val ..." with strictly increasing 1-based indices.
// In both formats the label token 1 means positive, -1 negative and 0
// truth-missing; a target-class designation reinterprets the label column as
// a class id instead (== target is positive, everything else negative).

#pragma once

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "ocal/data.hpp"

namespace ocal {

// Dataset plus the raw per-row label, which keeps the 0 = unlabeled rows
// addressable (interactive labeling seeds its pool from them).
struct LoadResult {
  Dataset dataset;
  std::vector<Label> row_labels;
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool parse_number(const std::string& tok, double& out) {
  if (tok.empty()) return false;
  const char* begin = tok.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end == begin + tok.size() && std::isfinite(out);
}

inline Label label_from_token(const std::string& tok, std::optional<double> target,
                              std::size_t line_no) {
  double v = 0.0;
  if (!parse_number(tok, v))
    throw ValidationError("line " + std::to_string(line_no) + ": unknown label token '" + tok + "'");
  if (target) return v == *target ? Label::Positive : Label::Negative;
  if (v == 1.0) return Label::Positive;
  if (v == -1.0) return Label::Negative;
  if (v == 0.0) return Label::Unlabeled;
  throw ValidationError("line " + std::to_string(line_no) + ": unknown label token '" + tok +
                        "' (expected 1, -1 or 0)");
}

inline void finish_truth(LoadResult& r) {
  bool complete = !r.row_labels.empty();
  for (Label l : r.row_labels)
    if (l == Label::Unlabeled) complete = false;
  if (complete) r.dataset.truth = r.row_labels;
}

}  // namespace detail

inline LoadResult parse_csv(std::istream& in, std::optional<double> target = std::nullopt) {
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  int dim = -1;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    line = detail::trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string tok;
    while (std::getline(ls, tok, ',')) fields.push_back(detail::trim(tok));
    if (!line.empty() && line.back() == ',') fields.push_back("");

    if (!header_seen) {
      double ignored;
      bool all_numeric = true;
      for (const auto& f : fields)
        if (!detail::parse_number(f, ignored)) all_numeric = false;
      if (all_numeric)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": expected a header row like f0,...,label");
      header_seen = true;
      dim = static_cast<int>(fields.size()) - 1;
      if (dim < 1) throw ValidationError("header declares no feature columns");
      continue;
    }

    if (static_cast<int>(fields.size()) != dim + 1)
      throw ValidationError("line " + std::to_string(line_no) + ": row has " +
                            std::to_string(fields.size() - 1) + " features, expected " +
                            std::to_string(dim));
    Sample s;
    s.id = static_cast<int>(result.dataset.samples.size());
    s.x.reserve(static_cast<std::size_t>(dim));
    for (int j = 0; j < dim; ++j) {
      double v = 0.0;
      if (!detail::parse_number(fields[static_cast<std::size_t>(j)], v))
        throw ValidationError("line " + std::to_string(line_no) + ": bad feature value '" +
                              fields[static_cast<std::size_t>(j)] + "'");
      s.x.push_back(v);
    }
    result.row_labels.push_back(detail::label_from_token(fields.back(), target, line_no));
    result.dataset.samples.push_back(std::move(s));
  }
  if (!header_seen) throw ValidationError("empty csv file");
  detail::finish_truth(result);
  return result;
}

inline LoadResult parse_svmlight(std::istream& in, std::optional<double> target = std::nullopt) {
  LoadResult result;
  std::string line;
  std::size_t line_no = 0;
  int max_index = 0;
  std::vector<std::vector<std::pair<int, double>>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;

    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    result.row_labels.push_back(detail::label_from_token(tok, target, line_no));

    std::vector<std::pair<int, double>> entries;
    int prev_index = 0;
    while (ls >> tok) {
      const std::size_t colon = tok.find(':');
      double idx_val = 0.0, val = 0.0;
      if (colon == std::string::npos ||
          !detail::parse_number(tok.substr(0, colon), idx_val) ||
          !detail::parse_number(tok.substr(colon + 1), val) ||
          idx_val != static_cast<double>(static_cast<int>(idx_val)) || idx_val < 1.0)
        throw ValidationError("line " + std::to_string(line_no) + ": bad token '" + tok + "'");
      const int idx = static_cast<int>(idx_val);
      if (idx <= prev_index)
        throw ValidationError("line " + std::to_string(line_no) +
                              ": feature indices must be strictly increasing, got " +
                              std::to_string(idx) + " after " + std::to_string(prev_index));
      prev_index = idx;
      max_index = std::max(max_index, idx);
      entries.emplace_back(idx, val);
    }
    rows.push_back(std::move(entries));
  }
  if (rows.empty()) throw ValidationError("empty svmlight file");

  for (std::size_t i = 0; i < rows.size(); ++i) {
    Sample s;
    s.id = static_cast<int>(i);
    s.x.assign(static_cast<std::size_t>(max_index), 0.0);
    for (const auto& [idx, val] : rows[i]) s.x[static_cast<std::size_t>(idx - 1)] = val;
    result.dataset.samples.push_back(std::move(s));
  }
  detail::finish_truth(result);
  return result;
}

inline LoadResult load_csv_detailed(const std::string& path,
                                    std::optional<double> target = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return parse_csv(in, target);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline LoadResult load_svmlight_detailed(const std::string& path,
                                         std::optional<double> target = std::nullopt) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return parse_svmlight(in, target);
  } catch (const ValidationError& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline Dataset load_csv(const std::string& path) { return load_csv_detailed(path).dataset; }

inline Dataset load_svmlight(const std::string& path) { return load_svmlight_detailed(path).dataset; }

inline void write_csv(const Dataset& d, std::ostream& out) {
  const int dim = d.dim();
  for (int j = 0; j < dim; ++j) out << 'f' << j << ',';
  out << "label\n";
  out << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (std::size_t i = 0; i < d.samples.size(); ++i) {
    for (double v : d.samples[i].x) out << v << ',';
    if (d.truth)
      out << ((*d.truth)[i] == Label::Positive ? "1" : "-1");
    else
      out << "0";
    out << '\n';
  }
}

inline void write_csv(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  write_csv(d, out);
}

}  // namespace ocal
