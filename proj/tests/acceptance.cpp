// Acceptance suite: one PASS/FAIL line per criterion.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>

#include "finrec/bench.hpp"
#include "finrec/driver.hpp"
#include "finrec/errors.hpp"
#include "finrec/expr.hpp"
#include "finrec/linalg.hpp"
#include "finrec/newton.hpp"
#include "finrec/ratint.hpp"
#include "finrec/ratrec.hpp"
#include "finrec/thiele.hpp"
#include "finrec/zippel.hpp"

using namespace finrec;

namespace {

  using Clock = std::chrono::steady_clock;

  double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
  }

  struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
      if (!ok) {
        pass = false;
        detail << " [failed: " << what << "]";
      }
    }
  };

  struct PrimeGuard {
    explicit PrimeGuard(std::uint64_t p) { FFInt::set_new_prime(p); }
    ~PrimeGuard() { FFInt::set_new_prime(nth_prime(0)); }
  };

  mpz_class mpz(std::uint64_t v) { return mpz_class(static_cast<unsigned long>(v)); }

  FFInt worked_example(std::span<const FFInt> z) {
    return (FFInt(3) * z[0] + FFInt(7) * z[1]) / (z[0] + z[1] + FFInt(4) * z[0] * z[1]);
  }

  UniPoly up(std::initializer_list<std::uint64_t> cs) {
    UniPoly p;
    for (auto c : cs) p.push_back(FFInt(c));
    return p;
  }

  // ---------------------------------------------------------------- 1

  void worked_example_criterion(Outcome& o) {
    auto t0 = Clock::now();
    {
      PrimeGuard g(509);
      RatInterpOptions ro;
      ro.shift = {FFInt(4), FFInt(1)};
      ro.anchors = {FFInt(10)};
      RatInterp ri(2, ro);
      while (!ri.done()) {
        for (const auto& req : ri.needed()) ri.feed(req, worked_example(ri.point(req)));
        ri.advance();
      }
      o.require(ri.first_form().numerator == up({316, 464}), "thiele numerator (316, 464)");
      o.require(ri.first_form().denominator == up({1, 178, 317}), "thiele denominator (1, 178, 317)");
      FFPolynomial top(2);
      top.add_term({1, 0}, FFInt(291));
      top.add_term({0, 1}, FFInt(170));
      bool top_ok = false, const_ok = false;
      for (const auto& d : ri.degree_info()) {
        if (d.side != Side::numerator) continue;
        if (d.r == 1) top_ok = d.polynomial == top;
        if (d.r == 0) const_ok = d.first_value == FFInt(0) && d.polynomial.is_zero();
      }
      o.require(top_ok, "top numerator 291*z1+170*z2");
      o.require(const_ok, "corrected constant 0");
      o.require(ri.probes() == 12, "12 probes");
      o.detail << "probes " << ri.probes();
    }
    ExpressionBox box({Expression::parse("(3*z1+7*z2)/(z1+z2+4*z1*z2)", {"z1", "z2"})});
    Reconstructor rec(box, {});
    auto rep = rec.reconstruct();
    const std::string text = rep[0].function.to_string();
    o.require(text == "(3*z1+7*z2)/(z1+z2+4*z1*z2)" && rep[0].verified, "rational result");
    const double s = seconds_since(t0);
    o.require(s < 1.0, "runtime < 1 s");
    o.detail << ", result " << text << ", " << s << " s";
  }

  // ---------------------------------------------------------------- 2

  FFInt zippel_example(std::span<const FFInt> z) {
    return FFInt(11) * z[0].pow(5) + FFInt(23) * z[0] * z[1].pow(4) + FFInt(37) * z[0] * z[1] * z[2].pow(3) +
           FFInt(41) * z[1].pow(5);
  }

  void zippel_criterion(Outcome& o) {
    auto t0 = Clock::now();
    FFPolynomial expected(3);
    expected.add_term({5, 0, 0}, FFInt(11));
    expected.add_term({1, 4, 0}, FFInt(23));
    expected.add_term({1, 1, 3}, FFInt(37));
    expected.add_term({0, 5, 0}, FFInt(41));
    std::vector<FFInt> anchors{FFInt(std::uint64_t{982451653}), FFInt(std::uint64_t{57885161}),
                               FFInt(std::uint64_t{2147483647})};
    auto temp = zippel_interpolate(zippel_example, anchors);
    ZippelOptions bounded;
    bounded.degree_bound = 5;
    auto perm = zippel_interpolate(zippel_example, anchors, bounded);
    std::vector<FFInt> dense_anchors{FFInt(std::uint64_t{1234567}), FFInt(std::uint64_t{7654321}),
                                     FFInt(std::uint64_t{3141592})};
    auto dense = dense_newton_interpolate(zippel_example, 3, dense_anchors);
    auto dense_b = dense_newton_interpolate(zippel_example, 3, dense_anchors, 5);
    o.require(temp.polynomial == expected && perm.polynomial == expected, "polynomial");
    o.require(dense.polynomial == expected && dense_b.polynomial == expected, "dense polynomial");
    o.require(temp.probes >= 24 && temp.probes <= 28, "temporary pruning 26 +- 2");
    o.require(perm.probes >= 18 && perm.probes <= 22, "permanent pruning 20 +- 2");
    o.require(dense.probes == 245, "dense 245");
    o.require(dense_b.probes == 180, "dense bounded 180");
    const double s = seconds_since(t0);
    o.require(s < 1.0, "runtime < 1 s");
    o.detail << "temporary " << temp.probes << ", permanent " << perm.probes << ", dense " << dense.probes << "/"
             << dense_b.probes << ", " << s << " s";
  }

  // ---------------------------------------------------------------- 5

  void wang_criterion(Outcome& o) {
    const mpz_class m = mpz(nth_prime(0));
    mpz_class bound;
    mpz_sqrt(bound.get_mpz_t(), mpz_class(m / 2).get_mpz_t());
    gmp_randclass gr(gmp_randinit_mt);
    gr.seed(2024);
    int ok = 0;
    const int total = 10000;
    for (int i = 0; i < total; ++i) {
      mpz_class n = gr.get_z_range(2 * bound + 1) - bound;
      mpz_class d = gr.get_z_range(bound) + 1;
      Rational q(n, d);
      mpz_class inv;
      mpz_invert(inv.get_mpz_t(), q.denominator().get_mpz_t(), m.get_mpz_t());
      mpz_class e = q.numerator() * inv % m;
      if (e < 0) e += m;
      auto r = wang_rr({e, m});
      if (r && *r == q) ++ok;
    }
    o.require(ok == total, "all round trips");
    o.detail << ok << "/" << total << " exact";
  }

  // ---------------------------------------------------------------- 6

  void mqrr_criterion(Outcome& o) {
    const mpz_class m = mpz(nth_prime(0)) * mpz(nth_prime(1));
    const mpz_class threshold = mqrr_threshold(m, 10);
    gmp_randclass gr(gmp_randinit_mt);
    gr.seed(77);
    int hits = 0;
    const int total = 100000;
    for (int i = 0; i < total; ++i) {
      if (mqrr({gr.get_z_range(m), m}, threshold)) ++hits;
    }
    const double rate = 100.0 * hits / total;
    o.require(rate >= 0.2 && rate <= 5.0, "rate in [0.2%, 5%]");
    o.detail << "success rate " << rate << "% (" << hits << "/" << total << ")";
  }

}

namespace {

  // ---------------------------------------------------------------- 7

  FFInt rand_ff(std::mt19937_64& rng) { return FFInt(rng()); }

  std::size_t vandermonde_suite(std::mt19937_64& rng) {
    std::size_t agree = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t T = 1 + rng() % 50;
      std::vector<FFInt> v(T), c(T), probes(T);
      for (auto& x : v) x = rand_ff(rng);
      for (auto& x : c) x = rand_ff(rng);
      FFMatrix a(T, T);
      for (std::size_t k = 0; k < T; ++k) {
        for (std::size_t j = 0; j < T; ++j) {
          a(k, j) = v[j].pow(k + 1);
          probes[k] += c[j] * a(k, j);
        }
      }
      auto fast = solve_shifted_vandermonde(v, probes);
      auto gauss = solve_linear(a, probes);
      if (gauss && fast == *gauss && fast == c) ++agree;
    }
    return agree;
  }

  void monomials(std::size_t n, std::uint32_t left, MultiIndex& cur, std::size_t i, std::vector<MultiIndex>& out) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (std::uint32_t e = 0; e <= left; ++e) {
      cur[i] = e;
      monomials(n, left - e, cur, i + 1, out);
    }
    cur[i] = 0;
  }

  std::size_t zippel_suite(std::mt19937_64& rng) {
    std::size_t agree = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      // keep the dense system small enough for elimination
      std::size_t n;
      std::uint32_t D;
      std::vector<MultiIndex> all;
      do {
        n = 1 + rng() % 5;
        D = 1 + rng() % 10;
        all.clear();
        MultiIndex cur(n, 0);
        monomials(n, D, cur, 0, all);
      } while (all.size() > 130);
      const std::size_t T = 1 + rng() % std::min<std::size_t>(20, all.size());
      FFPolynomial p(n);
      for (std::size_t t = 0; t < T; ++t) p.add_term(all[rng() % all.size()], rand_ff(rng));
      auto f = [&](std::span<const FFInt> z) { return p.evaluate(z); };

      std::vector<FFInt> anchors(n);
      for (auto& x : anchors) x = rand_ff(rng);
      ZippelOptions zo;
      zo.degree_bound = D;
      FFPolynomial sparse;
      try {
        sparse = zippel_interpolate(f, anchors, zo).polynomial;
      } catch (const SingularSystem&) {
        continue;
      }

      const std::size_t M = all.size();
      FFMatrix a(M, M);
      std::vector<FFInt> rhs(M);
      for (std::size_t k = 0; k < M; ++k) {
        std::vector<FFInt> z(n);
        for (auto& x : z) x = rand_ff(rng);
        for (std::size_t j = 0; j < M; ++j) {
          FFInt m(1);
          for (std::size_t i = 0; i < n; ++i) m *= z[i].pow(all[j][i]);
          a(k, j) = m;
        }
        rhs[k] = f(z);
      }
      auto sol = solve_linear(a, rhs);
      if (!sol) continue;
      FFPolynomial dense(n);
      for (std::size_t j = 0; j < M; ++j) dense.add_term(all[j], (*sol)[j]);
      if (dense == sparse && dense == p) ++agree;
    }
    return agree;
  }

  std::size_t thiele_suite(std::mt19937_64& rng) {
    std::size_t agree = 0;
    for (int trial = 0; trial < 1000; ++trial) {
      UniPoly n(1 + rng() % 8), d(1 + rng() % 8);
      for (auto& c : n) c = rand_ff(rng);
      for (auto& c : d) c = rand_ff(rng);
      auto bb = [&](FFInt t) { return evaluate(n, t) / evaluate(d, t); };
      ThieleState st;
      while (!st.done()) {
        FFInt t = rand_ff(rng);
        st.feed(t, bb(t));
      }
      auto r = st.to_rational();
      bool ok = true;
      for (int k = 0; k < 20; ++k) {
        FFInt t = rand_ff(rng);
        ok = ok && evaluate(r.numerator, t) / evaluate(r.denominator, t) == bb(t);
      }
      if (ok) ++agree;
    }
    return agree;
  }

  std::size_t crt_suite(std::mt19937_64& rng) {
    std::size_t agree = 0;
    gmp_randclass gr(gmp_randinit_mt);
    gr.seed(rng());
    for (int trial = 0; trial < 1000; ++trial) {
      const std::size_t k = 2 + rng() % 4;
      std::vector<std::size_t> idx(100);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::shuffle(idx.begin(), idx.end(), rng);
      std::vector<mpz_class> ps;
      mpz_class prod = 1;
      for (std::size_t i = 0; i < k; ++i) {
        ps.push_back(mpz(nth_prime(idx[i])));
        prod *= ps.back();
      }
      const mpz_class x = gr.get_z_range(prod);
      std::vector<ModularImage> imgs;
      for (const auto& p : ps) imgs.push_back({x % p, p});
      ModularImage left = imgs[0];
      for (std::size_t i = 1; i < k; ++i) left = crt_pair(left, imgs[i]);
      ModularImage right = imgs[k - 1];
      for (std::size_t i = k - 1; i-- > 0;) right = crt_pair(imgs[i], right);
      if (left.residue == x && right.residue == x && left.modulus == prod && right.modulus == prod) ++agree;
    }
    return agree;
  }

  std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 7);
    switch (pick(rng)) {
      case 0:
        return std::to_string(rng() % 100000);
      case 1:
        return "z" + std::to_string(1 + rng() % 3);
      case 2:
        return "(" + random_expr(rng, depth - 1) + ")+(" + random_expr(rng, depth - 1) + ")";
      case 3:
        return "(" + random_expr(rng, depth - 1) + ")-(" + random_expr(rng, depth - 1) + ")";
      case 4:
        return "(" + random_expr(rng, depth - 1) + ")*(" + random_expr(rng, depth - 1) + ")";
      case 5:
        return "(" + random_expr(rng, depth - 1) + ")/(" + random_expr(rng, depth - 1) + ")";
      case 6:
        return "-(" + random_expr(rng, depth - 1) + ")";
      default:
        return "(" + random_expr(rng, depth - 1) + ")^" + std::to_string(rng() % 4);
    }
  }

  std::size_t expression_suite(std::mt19937_64& rng, std::size_t& compared) {
    std::size_t agree = 0;
    const std::vector<std::string> vars{"z1", "z2", "z3"};
    const mpz_class p = mpz(FFInt::prime());
    compared = 0;
    while (compared < 1000) {
      auto e = Expression::parse(random_expr(rng, 5), vars);
      std::vector<Rational> q;
      std::vector<FFInt> x;
      for (int k = 0; k < 3; ++k) {
        auto a = static_cast<std::int64_t>(rng() % 2000000) - 1000000;
        q.emplace_back(static_cast<long>(a));
        x.push_back(FFInt(a));
      }
      auto exact = e.evaluate(q);
      if (!exact || exact->denominator() % p == 0) continue;
      ++compared;
      if (e.evaluate(x) == exact->to_ffint()) ++agree;
    }
    return agree;
  }

  void property_criterion(Outcome& o) {
    std::mt19937_64 rng(7);
    std::size_t compared = 0;
    const std::size_t v = vandermonde_suite(rng), z = zippel_suite(rng), t = thiele_suite(rng), c = crt_suite(rng),
                      e = expression_suite(rng, compared);
    o.require(v == 1000, "vandermonde");
    o.require(z == 1000, "zippel");
    o.require(t == 1000, "thiele");
    o.require(c == 1000, "crt");
    o.require(e == compared, "expressions");
    o.detail << "vandermonde " << v << "/1000, zippel " << z << "/1000, thiele " << t << "/1000, crt " << c
             << "/1000, expressions " << e << "/" << compared;
  }

}

namespace {

  // ---------------------------------------------------------------- 3, 4, 8

  struct BenchRun {
    BenchConfig config;
    std::string result;
    bool exact = false;
    bool verified = false;
    std::size_t probes = 0;
    std::size_t primes = 0;
    double seconds = 0;
  };

  std::string config_name(const BenchConfig& c) {
    std::string s = c.function;
    if (c.scan) s += " scan";
    if (!c.order.empty()) s += " order";
    if (!c.scan && c.order.empty()) s += " default";
    return s;
  }

  ReconstructOptions bench_options(const BenchConfig& c) {
    ReconstructOptions o;
    o.threads = std::max(1u, std::thread::hardware_concurrency());
    o.scan = c.scan;
    o.order = c.order;
    o.seed = 1;
    return o;
  }

  BenchRun run_bench(const BenchConfig& c, const std::string& save_dir) {
    auto b = bench_function(c.function);
    auto expr = Expression::parse(b.expression, b.variables);
    auto known = expr.expand();
    known.normalize();
    ExpressionBox box({expr});
    auto opts = bench_options(c);
    if (!save_dir.empty()) {
      opts.save = true;
      opts.save_dir = save_dir;
    }
    auto t0 = Clock::now();
    Reconstructor rec(box, opts);
    auto rep = rec.reconstruct();
    BenchRun r;
    r.config = c;
    r.seconds = seconds_since(t0);
    r.result = rep[0].function.to_string(b.variables);
    r.exact = rep[0].function == known;
    r.verified = rep[0].verified;
    r.probes = rep[0].probes;
    r.primes = rep[0].primes;
    return r;
  }

  void exactness_criterion(Outcome& o, const std::vector<BenchRun>& runs, double total_seconds) {
    int exact = 0;
    for (const auto& r : runs) {
      if (r.exact && r.verified) {
        ++exact;
      } else {
        o.require(false, config_name(r.config));
      }
    }
    o.require(total_seconds <= 600, "total runtime <= 10 min");
    o.detail << exact << "/" << runs.size() << " configurations exact, " << total_seconds << " s total";
  }

  void probe_criterion(Outcome& o, const std::vector<BenchRun>& runs) {
    std::map<std::string, std::size_t> primes;
    std::map<std::string, std::size_t> probes_default;
    for (const auto& r : runs) {
      const double ratio = static_cast<double>(r.probes) / r.config.reference_probes;
      o.require(ratio >= 0.5 && ratio <= 2.0, config_name(r.config) + " within 2x");
      if (r.config.function == "f2" || r.config.function == "f3") {
        o.require(r.primes == (r.config.function == "f2" ? 4u : 5u), config_name(r.config) + " prime count");
        o.detail << config_name(r.config) << " " << r.primes << " primes; ";
        if (!r.config.scan) probes_default[r.config.function] = r.probes;
      }
    }
    if (probes_default.size() == 2) {
      const double ratio = static_cast<double>(probes_default["f3"]) / probes_default["f2"];
      o.require(ratio >= 1.5 && ratio <= 2.5, "f3/f2 ratio");
      o.detail << "f3/f2 " << ratio;
    }
  }

  void persistence_criterion(Outcome& o, const BenchRun& full, const std::string& save_dir) {
    auto b = bench_function("f2");
    ExpressionBox box({Expression::parse(b.expression, b.variables)});
    Reconstructor rec(box, bench_options(full.config));
    rec.resume({state_file_name(save_dir, "fun1", 1)});
    auto rep = rec.reconstruct();
    const std::string text = rep[0].function.to_string(b.variables);
    o.require(text == full.result, "identical output");
    o.require(rep[0].probes == full.probes, "identical probe count");
    o.detail << "resumed probes " << rep[0].probes << " vs " << full.probes << ", output "
             << (text == full.result ? "identical" : "differs") << " (" << text.size() << " bytes)";
  }

  int report(int id, const std::string& title, Outcome& o) {
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << ": " << title << ": " << o.detail.str()
              << std::endl;
    return o.pass ? 0 : 1;
  }

  template <class F>
  int guarded(int id, const std::string& title, F&& body) {
    Outcome o;
    try {
      body(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    return report(id, title, o);
  }

}

int main() {
  int failures = 0;
  failures += guarded(1, "worked example", worked_example_criterion);
  failures += guarded(2, "zippel example", zippel_criterion);

  const auto save_dir = (std::filesystem::temp_directory_path() / "finrec_acceptance").string();
  std::filesystem::remove_all(save_dir);
  std::vector<BenchRun> runs;
  std::optional<BenchRun> f2_saved;
  double bench_seconds = 0;
  std::string bench_error;
  try {
    auto t0 = Clock::now();
    for (const auto& c : bench_table()) {
      const bool save = c.function == "f2" && !c.scan && c.order.empty();
      runs.push_back(run_bench(c, save ? save_dir : ""));
      if (save) f2_saved = runs.back();
      const auto& r = runs.back();
      std::cout << "  " << config_name(c) << ": " << r.probes << " probes (reference " << c.reference_probes << "), "
                << r.primes << " primes, " << (r.exact ? "exact" : "NOT exact") << ", " << r.seconds << " s"
                << std::endl;
    }
    bench_seconds = seconds_since(t0);
  } catch (const std::exception& e) {
    bench_error = e.what();
  }
  failures += guarded(3, "benchmark exactness", [&](Outcome& o) {
    o.require(bench_error.empty(), "exception: " + bench_error);
    exactness_criterion(o, runs, bench_seconds);
  });
  failures += guarded(4, "benchmark probe counts", [&](Outcome& o) {
    o.require(bench_error.empty(), "exception: " + bench_error);
    probe_criterion(o, runs);
  });
  failures += guarded(5, "wang round trip", wang_criterion);
  failures += guarded(6, "mqrr calibration", mqrr_criterion);
  failures += guarded(7, "oracle equivalences", property_criterion);
  failures += guarded(8, "persistence determinism", [&](Outcome& o) {
    o.require(f2_saved.has_value(), "no saved f2 run");
    if (f2_saved) persistence_criterion(o, *f2_saved, save_dir);
  });
  std::filesystem::remove_all(save_dir);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
