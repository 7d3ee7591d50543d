#include "wickbench/partitions.hpp"

#include <stdexcept>

namespace wickbench {

namespace {

void extend(int item, int n, SetPartition& current, std::vector<SetPartition>& out) {
  if (item == n) {
    out.push_back(current);
    return;
  }
  for (std::size_t b = 0; b < current.size(); ++b) {
    current[b].push_back(item);
    extend(item + 1, n, current, out);
    current[b].pop_back();
  }
  current.push_back({item});
  extend(item + 1, n, current, out);
  current.pop_back();
}

}  // namespace

std::vector<SetPartition> set_partitions(int n) {
  if (n < 1) throw std::invalid_argument("set_partitions: n must be >= 1");
  std::vector<SetPartition> out;
  SetPartition current;
  extend(0, n, current, out);
  return out;
}

}  // namespace wickbench
