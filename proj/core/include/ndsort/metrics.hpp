#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace ndsort {

// Neuron x cluster spike-count matrix. Rows are true neuron labels,
// columns are emitted cluster ids, both 0-based here; builders accept the
// 1-based ids used everywhere else.
class ContingencyTable {
 public:
  ContingencyTable(int rows, int cols);

  // labels and cids are 1-based and equal length. The table spans at least
  // (min_rows, min_cols) and grows to the largest id seen.
  static ContingencyTable from_pairs(std::span<const int> labels,
                                     std::span<const int> cids,
                                     int min_rows = 0, int min_cols = 0);

  std::int64_t& at(int row, int col);
  std::int64_t at(int row, int col) const;
  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::int64_t total() const;
  std::int64_t row_total(int row) const;

 private:
  int rows_;
  int cols_;
  std::vector<std::int64_t> counts_;
};

struct AssignmentResult {
  double accuracy = 0.0;          // assigned_sum / total
  std::int64_t assigned_sum = 0;  // maximum one-to-one mass
  // Chosen column per row (0-based), -1 when a row is left unmatched
  // because there are fewer columns than rows.
  std::vector<int> cluster_of_row;
};

// Maximum-sum one-to-one neuron -> cluster assignment (Hungarian method on
// the zero-padded square matrix), divided by the table total. Exact.
AssignmentResult sorting_accuracy(const ContingencyTable& t);

// Optimal-merge relaxation: several clusters may map to one neuron, so
// each column contributes its largest entry. Always >= sorting accuracy.
double purity(const ContingencyTable& t);

// Number of neurons whose recall under the sorting_accuracy assignment,
// assigned-cell count / row total, is >= maa. Rows with no spikes are not
// counted. maa must be in (0, 1].
int accurate_neuron_count(const ContingencyTable& t, double maa);

// Sorting accuracy of each non-overlapping window of the label/cid
// sequences; a trailing partial window is scored too.
std::vector<double> windowed_accuracy(std::span<const int> labels,
                                      std::span<const int> cids, int window);

}  // namespace ndsort
