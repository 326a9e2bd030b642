#include "finrec/bench.hpp"

#include <stdexcept>

namespace finrec {

  namespace {

    std::vector<std::string> zvars(std::size_t n) {
      std::vector<std::string> v;
      for (std::size_t i = 1; i <= n; ++i) v.push_back("z" + std::to_string(i));
      return v;
    }

    std::string sum_of(std::size_t n, const std::string& power) {
      std::string s;
      for (std::size_t i = 1; i <= n; ++i) {
        if (i > 1) s += "+";
        s += "z" + std::to_string(i) + power;
      }
      return s;
    }

    const char* kBig = "123456789109898799879870980";

    std::string dense(int k) {
      return std::string(kBig) + "*((1+" + sum_of(5, "") + ")^" + std::to_string(k) +
             "-1)/(z4-z2+z1^10*z2^10*z3^10*z4^10*z5^10)";
    }

  }

  BenchFunction bench_function(const std::string& name) {
    if (name == "f1") {
      std::string den;
      for (int i = 1; i <= 5; ++i) {
        if (i > 1) den += "+";
        den += "(z1*z2+z3*z4+z5*z6)^" + std::to_string(i);
      }
      return {name, "(" + sum_of(20, "^20") + ")/((" + den + ")*z20^35)", zvars(20)};
    }
    if (name == "f2") return {name, dense(17), zvars(5)};
    if (name == "f3") return {name, dense(20), zvars(5)};
    if (name == "f4") {
      return {name, "(z1^100+z2^200+z3^300)/(z1*z2*z3*z4*z5+z1^4*z2^4*z3^4*z4^4*z5^4)", zvars(5)};
    }
    throw std::invalid_argument("unknown benchmark '" + name + "'");
  }

  const std::vector<BenchConfig>& bench_table() {
    static const std::vector<BenchConfig> table = [] {
      std::vector<std::size_t> f1_last{19};
      for (std::size_t i = 0; i < 19; ++i) f1_last.push_back(i);
      const std::vector<std::size_t> f4_order{2, 1, 0, 3, 4};
      return std::vector<BenchConfig>{
          {"f1", false, {}, 87138},     {"f1", false, f1_last, 41628}, {"f1", true, {}, 84569},
          {"f1", true, f1_last, 22617}, {"f2", false, {}, 162683},     {"f2", true, {}, 155231},
          {"f3", false, {}, 332894},    {"f3", true, {}, 320801},      {"f4", false, {}, 139512},
          {"f4", false, f4_order, 54212}, {"f4", true, {}, 137295},    {"f4", true, f4_order, 34349},
      };
    }();
    return table;
  }

}
