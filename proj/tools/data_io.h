#ifndef PARTEST_TOOLS_DATA_IO_H_
#define PARTEST_TOOLS_DATA_IO_H_

#include <istream>
#include <stdexcept>
#include <string>
#include <vector>

namespace partest::tools {

// Malformed input data; the message carries the line number.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TwoColumnData {
  std::vector<std::string> first;  // raw first column
  std::vector<double> second;
};

// Reads `a<TAB>b` rows. Blank lines and lines starting with '#' are
// skipped; the second column must be a finite decimal number.
TwoColumnData read_two_columns(std::istream& in);

struct LabelledValues {
  std::vector<int> labels;  // 1-based group of each row
  std::vector<double> values;
  std::vector<std::string> group_names;  // group g is group_names[g - 1]
  std::vector<int> group_sizes;
};

// Groups are numbered in increasing label order (numeric when every label
// is an integer).
LabelledValues to_labelled(const TwoColumnData& data);

struct PairedValues {
  std::vector<double> x;
  std::vector<double> y;
};

PairedValues to_paired(const TwoColumnData& data);

double parse_decimal(const std::string& text);

}  // namespace partest::tools

#endif  // PARTEST_TOOLS_DATA_IO_H_
