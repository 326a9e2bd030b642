#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace finrec {

  struct BenchFunction {
    std::string name;
    std::string expression;
    std::vector<std::string> variables;
  };

  /// f1, f2, f3 or f4; throws std::invalid_argument otherwise.
  BenchFunction bench_function(const std::string& name);

  struct BenchConfig {
    std::string function;
    bool scan = false;
    std::vector<std::size_t> order;  // empty for the natural order
    std::size_t reference_probes = 0;
  };

  /// Option matrix with reference probe counts of the original implementation.
  const std::vector<BenchConfig>& bench_table();

}
