#include "ndsort/metrics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace ndsort {

ContingencyTable::ContingencyTable(int rows, int cols)
    : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw std::invalid_argument("contingency table needs >= 1 row and column");
  }
  counts_.assign(static_cast<std::size_t>(rows) * cols, 0);
}

ContingencyTable ContingencyTable::from_pairs(std::span<const int> labels,
                                              std::span<const int> cids,
                                              int min_rows, int min_cols) {
  if (labels.size() != cids.size()) {
    throw std::invalid_argument("label and cid sequences differ in length");
  }
  int rows = std::max(min_rows, 1);
  int cols = std::max(min_cols, 1);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 1 || cids[i] < 1) {
      throw std::invalid_argument("labels and cids are 1-based");
    }
    rows = std::max(rows, labels[i]);
    cols = std::max(cols, cids[i]);
  }
  ContingencyTable t(rows, cols);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    ++t.at(labels[i] - 1, cids[i] - 1);
  }
  return t;
}

std::int64_t& ContingencyTable::at(int row, int col) {
  return counts_[static_cast<std::size_t>(row) * cols_ + col];
}

std::int64_t ContingencyTable::at(int row, int col) const {
  return counts_[static_cast<std::size_t>(row) * cols_ + col];
}

std::int64_t ContingencyTable::total() const {
  std::int64_t sum = 0;
  for (std::int64_t c : counts_) sum += c;
  return sum;
}

std::int64_t ContingencyTable::row_total(int row) const {
  std::int64_t sum = 0;
  for (int c = 0; c < cols_; ++c) sum += at(row, c);
  return sum;
}

namespace {

// Hungarian method with potentials, O(n^3), minimizing over the square
// cost matrix. Returns match[row] = column. Exact in int64.
std::vector<int> min_cost_assignment(const std::vector<std::vector<std::int64_t>>& cost) {
  const int n = static_cast<int>(cost.size());
  const std::int64_t kInf = std::numeric_limits<std::int64_t>::max() / 4;
  // 1-based working arrays; p[j] is the row matched to column j.
  std::vector<std::int64_t> u(n + 1, 0), v(n + 1, 0), minv(n + 1, 0);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1, false);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), kInf);
    std::fill(used.begin(), used.end(), false);
    do {
      used[j0] = true;
      const int i0 = p[j0];
      std::int64_t delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const std::int64_t cur = cost[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> match(n, -1);
  for (int j = 1; j <= n; ++j) {
    if (p[j] >= 1) match[p[j] - 1] = j - 1;
  }
  return match;
}

}  // namespace

AssignmentResult sorting_accuracy(const ContingencyTable& t) {
  const std::int64_t total = t.total();
  if (total <= 0) {
    throw std::invalid_argument("contingency table is empty");
  }
  const int n = std::max(t.rows(), t.cols());
  // Pad to square with zero mass; padded cells are only taken when a row
  // or column has nothing real left to claim.
  std::vector<std::vector<std::int64_t>> cost(n, std::vector<std::int64_t>(n, 0));
  for (int r = 0; r < t.rows(); ++r) {
    for (int c = 0; c < t.cols(); ++c) {
      cost[r][c] = -t.at(r, c);
    }
  }
  const std::vector<int> match = min_cost_assignment(cost);
  AssignmentResult res;
  res.cluster_of_row.assign(t.rows(), -1);
  for (int r = 0; r < t.rows(); ++r) {
    if (match[r] >= 0 && match[r] < t.cols()) {
      res.cluster_of_row[r] = match[r];
      res.assigned_sum += t.at(r, match[r]);
    }
  }
  res.accuracy = static_cast<double>(res.assigned_sum) / static_cast<double>(total);
  return res;
}

double purity(const ContingencyTable& t) {
  const std::int64_t total = t.total();
  if (total <= 0) {
    throw std::invalid_argument("contingency table is empty");
  }
  std::int64_t sum = 0;
  for (int c = 0; c < t.cols(); ++c) {
    std::int64_t best = 0;
    for (int r = 0; r < t.rows(); ++r) {
      best = std::max(best, t.at(r, c));
    }
    sum += best;
  }
  return static_cast<double>(sum) / static_cast<double>(total);
}

int accurate_neuron_count(const ContingencyTable& t, double maa) {
  if (!(maa > 0.0) || maa > 1.0) {
    throw std::invalid_argument("maa must be in (0, 1]");
  }
  const AssignmentResult res = sorting_accuracy(t);
  int count = 0;
  for (int r = 0; r < t.rows(); ++r) {
    const std::int64_t denom = t.row_total(r);
    if (denom == 0 || res.cluster_of_row[r] < 0) continue;
    const std::int64_t assigned = t.at(r, res.cluster_of_row[r]);
    if (static_cast<double>(assigned) >= maa * static_cast<double>(denom)) {
      ++count;
    }
  }
  return count;
}

std::vector<double> windowed_accuracy(std::span<const int> labels,
                                      std::span<const int> cids, int window) {
  if (labels.size() != cids.size()) {
    throw std::invalid_argument("label and cid sequences differ in length");
  }
  if (window < 1) {
    throw std::invalid_argument("window must be >= 1");
  }
  std::vector<double> out;
  for (std::size_t begin = 0; begin < labels.size(); begin += window) {
    const std::size_t end = std::min(labels.size(), begin + window);
    const ContingencyTable t = ContingencyTable::from_pairs(
        labels.subspan(begin, end - begin), cids.subspan(begin, end - begin));
    out.push_back(sorting_accuracy(t).accuracy);
  }
  return out;
}

}  // namespace ndsort
