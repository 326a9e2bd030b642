#pragma once

#include <stdexcept>
#include <string>

namespace finrec {

  /// Two interpolation points coincide; fresh points are needed.
  struct CoincidentPoints : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  /// A linear system in the current field turned out singular.
  struct SingularSystem : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  /// A zero denominator in Thiele's recursion.
  struct UnluckyZero : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

  /// The probes are inconsistent with a rational function of the detected form.
  struct InconsistentProbes : std::runtime_error {
    using std::runtime_error::runtime_error;
  };

}
