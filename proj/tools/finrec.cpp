#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "finrec/bench.hpp"
#include "finrec/driver.hpp"
#include "finrec/expr.hpp"

using namespace finrec;

namespace {

  struct Common {
    std::size_t threads = 1;
    bool scan = false;
    bool safe = false;
    std::string order;
    std::uint64_t seed = 1;
    bool json = false;
    bool save = false;
    std::string save_dir = "ff_save";
    int verbosity = 0;
  };

  void add_common(CLI::App* app, Common& c) {
    app->add_option("--threads", c.threads, "worker threads")->check(CLI::PositiveNumber);
    app->add_flag("--scan", c.scan, "scan for a sparse shift");
    app->add_flag("--safe", c.safe, "full interpolation in every prime field");
    app->add_option("--order", c.order, "variable order, e.g. z3,z2,z1 or 3,2,1");
    app->add_option("--seed", c.seed, "random seed");
    app->add_flag("--json", c.json, "print a JSON report");
    app->add_flag("--save", c.save, "save the state after every prime");
    app->add_option("--save-dir", c.save_dir, "directory for state files");
    app->add_option("-v,--verbosity", c.verbosity, "0 silent, 1 important, 2 chatty")->check(CLI::Range(0, 2));
  }

  std::vector<std::string> split(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
      item.erase(0, item.find_first_not_of(" \t"));
      item.erase(item.find_last_not_of(" \t") + 1);
      if (!item.empty()) out.push_back(item);
    }
    return out;
  }

  std::vector<std::size_t> parse_order(const std::string& text, const std::vector<std::string>& vars) {
    std::vector<std::size_t> order;
    for (const auto& tok : split(text)) {
      auto it = std::find(vars.begin(), vars.end(), tok);
      if (it != vars.end()) {
        order.push_back(static_cast<std::size_t>(it - vars.begin()));
      } else if (tok.find_first_not_of("0123456789") == std::string::npos) {
        std::size_t k = std::stoul(tok);
        if (k == 0 || k > vars.size()) throw std::invalid_argument("variable index out of range: " + tok);
        order.push_back(k - 1);
      } else {
        throw std::invalid_argument("unknown variable in order: " + tok);
      }
    }
    if (order.empty()) return order;
    std::vector<std::size_t> check(order);
    std::sort(check.begin(), check.end());
    for (std::size_t i = 0; i < check.size(); ++i) {
      if (check.size() != vars.size() || check[i] != i) throw std::invalid_argument("order is not a permutation");
    }
    return order;
  }

  // a file name or the expression itself
  std::string expression_text(const std::string& arg) {
    std::error_code ec;
    if (std::filesystem::is_regular_file(arg, ec)) {
      std::ifstream in(arg);
      std::stringstream ss;
      ss << in.rdbuf();
      return ss.str();
    }
    return arg;
  }

  // one expression per non-empty line
  std::vector<std::string> expression_lines(const std::vector<std::string>& args) {
    std::vector<std::string> out;
    for (const auto& a : args) {
      std::stringstream in(expression_text(a));
      std::string line;
      while (std::getline(in, line)) {
        if (line.find_first_not_of(" \t\r") != std::string::npos) out.push_back(line);
      }
    }
    return out;
  }

  ReconstructOptions make_options(const Common& c, const std::vector<std::string>& vars) {
    ReconstructOptions o;
    o.threads = c.threads;
    o.scan = c.scan;
    o.safe = c.safe;
    o.order = parse_order(c.order, vars);
    o.seed = c.seed;
    o.save = c.save;
    o.save_dir = c.save_dir;
    o.verbosity = static_cast<Verbosity>(c.verbosity);
    o.log = &std::cerr;
    return o;
  }

  struct Outcome {
    std::vector<FunctionReport> reports;
    std::size_t probes = 0;
    long long wall_ms = 0;
  };

  Outcome run(BlackBox& box, const ReconstructOptions& opts, const std::vector<std::string>& resume_files) {
    auto start = std::chrono::steady_clock::now();
    Reconstructor rec(box, opts);
    if (!resume_files.empty()) rec.resume(resume_files);
    Outcome out;
    out.reports = rec.reconstruct();
    out.probes = rec.total_probes();
    out.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return out;
  }

  nlohmann::json report_json(const FunctionReport& r, const std::vector<std::string>& vars, const Outcome& o,
                             std::uint64_t seed) {
    return {{"function", r.function.to_string(vars)},
            {"probes", r.probes},
            {"primes", r.primes},
            {"wall_ms", o.wall_ms},
            {"seed", seed},
            {"verified", r.verified}};
  }

  int emit(const Outcome& o, const std::vector<std::string>& vars, const Common& c,
           const std::vector<nlohmann::json>& extra = {}) {
    bool ok = true;
    if (c.json) {
      nlohmann::json all = nlohmann::json::array();
      for (std::size_t i = 0; i < o.reports.size(); ++i) {
        auto j = report_json(o.reports[i], vars, o, c.seed);
        if (i < extra.size()) j.update(extra[i]);
        all.push_back(j);
      }
      std::cout << (all.size() == 1 ? all[0] : all).dump(2) << "\n";
    } else {
      for (const auto& r : o.reports) std::cout << r.function.to_string(vars) << "\n";
    }
    for (const auto& r : o.reports) {
      ok = ok && r.verified;
      if (!c.json) {
        std::string shifted;
        for (std::size_t i = 0; i < r.shift.size(); ++i) {
          if (r.shift[i]) shifted += (shifted.empty() ? "" : ",") + vars[i];
        }
        std::cerr << r.tag << ": " << r.probes << " probes, " << r.primes << " primes, "
                  << (r.verified ? "verified" : "NOT verified") << ", shift {" << shifted << "}, per prime";
        for (auto c : r.probes_per_prime) std::cerr << " " << c;
        std::cerr << "\n";
      }
    }
    if (!c.json) std::cerr << "total: " << o.probes << " black-box evaluations, " << o.wall_ms << " ms, seed " << c.seed << "\n";
    return ok ? 0 : 1;
  }

}

int main(int argc, char** argv) {
  CLI::App app{"Reconstruction of rational functions from finite-field probes"};
  app.require_subcommand(1);

  Common rc;
  std::vector<std::string> exprs, tags;
  std::string vars_arg;
  auto* rec = app.add_subcommand("reconstruct", "reconstruct functions given as expressions");
  rec->add_option("--expr", exprs, "expression or file with one expression per line")->required();
  rec->add_option("--vars", vars_arg, "comma separated variable names");
  rec->add_option("--tag", tags, "tag per function");
  add_common(rec, rc);

  Common bc;
  std::string which;
  auto* bench = app.add_subcommand("bench", "run a built-in benchmark function");
  bench->add_option("which", which, "f1, f2, f3 or f4")->required()->check(CLI::IsMember({"f1", "f2", "f3", "f4"}));
  add_common(bench, bc);

  Common sc;
  std::string files, resume_bench;
  std::vector<std::string> resume_exprs;
  std::string resume_vars;
  auto* res = app.add_subcommand("resume", "continue from saved states");
  res->add_option("--files", files, "comma separated state files")->required();
  res->add_option("--expr", resume_exprs, "expression or file, as for reconstruct");
  res->add_option("--vars", resume_vars, "comma separated variable names");
  res->add_option("--bench", resume_bench, "built-in benchmark instead of --expr");
  add_common(res, sc);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*rec || *res) {
      const bool resuming = static_cast<bool>(*res);
      Common& c = resuming ? sc : rc;
      std::vector<std::string> lines;
      std::vector<std::string> vars;
      if (resuming && !resume_bench.empty()) {
        auto b = bench_function(resume_bench);
        lines = {b.expression};
        vars = b.variables;
      } else {
        lines = expression_lines(resuming ? resume_exprs : exprs);
        if (lines.empty()) throw std::invalid_argument("no expression given");
        const std::string& va = resuming ? resume_vars : vars_arg;
        if (!va.empty()) {
          vars = split(va);
        } else {
          std::string joined;
          for (const auto& l : lines) joined += l + "\n";
          vars = Expression::collect_variables(joined);
        }
      }
      std::vector<Expression> parsed;
      for (const auto& l : lines) parsed.push_back(Expression::parse(l, vars));
      ExpressionBox box(std::move(parsed));
      auto opts = make_options(c, vars);
      if (!resuming) opts.tags = tags;
      auto outcome = run(box, opts, resuming ? split(files) : std::vector<std::string>{});
      return emit(outcome, vars, c);
    }

    auto b = bench_function(which);
    auto expr = Expression::parse(b.expression, b.variables);
    auto known = expr.expand();
    known.normalize();
    ExpressionBox box({expr});
    auto outcome = run(box, make_options(bc, b.variables), {});
    const bool exact = outcome.reports[0].function == known;
    if (!exact) std::cerr << b.name << ": result differs from the defining expression\n";
    int code = emit(outcome, b.variables, bc, {nlohmann::json{{"exact", exact}}});
    return exact ? code : 1;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
