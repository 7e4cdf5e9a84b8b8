#include "data_io.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <optional>

namespace partest::tools {

namespace {

std::optional<double> try_decimal(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '+')) text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\r')) text.remove_suffix(1);
  double value = 0.0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || result.ec != std::errc() || result.ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

std::optional<long> try_integer(std::string_view text) {
  long value = 0;
  const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || result.ec != std::errc() || result.ptr != text.data() + text.size()) {
    return std::nullopt;
  }
  return value;
}

}  // namespace

double parse_decimal(const std::string& text) {
  const auto value = try_decimal(text);
  if (!value) throw DataError("'" + text + "' is not a finite number");
  return *value;
}

TwoColumnData read_two_columns(std::istream& in) {
  TwoColumnData out;
  std::string line;
  long line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto start = line.find_first_not_of(" \t");
    if (start == std::string::npos || line[start] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || line.find('\t', tab + 1) != std::string::npos) {
      throw DataError("line " + std::to_string(line_number) + ": expected two tab-separated columns");
    }
    const auto value = try_decimal(std::string_view(line).substr(tab + 1));
    if (!value) {
      throw DataError("line " + std::to_string(line_number) + ": second column is not a number");
    }
    std::string first = line.substr(0, tab);
    first.erase(0, first.find_first_not_of(' '));
    first.erase(first.find_last_not_of(' ') + 1);
    if (first.empty()) throw DataError("line " + std::to_string(line_number) + ": empty first column");
    out.first.push_back(std::move(first));
    out.second.push_back(*value);
  }
  if (out.second.empty()) throw DataError("no data rows");
  return out;
}

LabelledValues to_labelled(const TwoColumnData& data) {
  bool numeric = true;
  for (const std::string& label : data.first) numeric = numeric && try_integer(label).has_value();
  std::vector<std::string> names = data.first;
  std::sort(names.begin(), names.end(), [&](const std::string& a, const std::string& b) {
    return numeric ? *try_integer(a) < *try_integer(b) : a < b;
  });
  names.erase(std::unique(names.begin(), names.end(),
                          [&](const std::string& a, const std::string& b) {
                            return numeric ? *try_integer(a) == *try_integer(b) : a == b;
                          }),
              names.end());
  LabelledValues out;
  out.group_names = names;
  out.group_sizes.assign(names.size(), 0);
  for (std::size_t i = 0; i < data.first.size(); ++i) {
    const auto it = std::find_if(names.begin(), names.end(), [&](const std::string& name) {
      return numeric ? *try_integer(name) == *try_integer(data.first[i]) : name == data.first[i];
    });
    const int group = static_cast<int>(it - names.begin()) + 1;
    out.labels.push_back(group);
    ++out.group_sizes[group - 1];
  }
  out.values = data.second;
  return out;
}

PairedValues to_paired(const TwoColumnData& data) {
  PairedValues out;
  for (std::size_t i = 0; i < data.first.size(); ++i) {
    const auto x = try_decimal(data.first[i]);
    if (!x) throw DataError("row " + std::to_string(i + 1) + ": x is not a number");
    out.x.push_back(*x);
  }
  out.y = data.second;
  return out;
}

}  // namespace partest::tools
