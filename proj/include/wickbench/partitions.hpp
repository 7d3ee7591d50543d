// partitions.hpp - set partitions of {0, ..., n-1}, blocks keep index order
#ifndef WICKBENCH_PARTITIONS_HPP
#define WICKBENCH_PARTITIONS_HPP

#include <vector>

namespace wickbench {

using SetPartition = std::vector<std::vector<int>>;

// All partitions of {0, ..., n-1}.  Elements inside a block and blocks
// themselves appear in increasing order of their smallest element.
std::vector<SetPartition> set_partitions(int n);

}  // namespace wickbench

#endif
