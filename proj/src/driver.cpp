#include "finrec/driver.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "finrec/errors.hpp"
#include "finrec/ratrec.hpp"
#include "finrec/thread_pool.hpp"

namespace finrec {

  namespace {

    int side_index(Side s) { return static_cast<int>(s); }

    std::vector<FFInt> shift_values(const std::vector<bool>& pattern, std::uint64_t seed) {
      if (std::none_of(pattern.begin(), pattern.end(), [](bool b) { return b; })) return {};
      return make_shift(pattern, seed);
    }

    std::map<FormKey, FFInt> form_values(const FFRationalFunction& f) {
      std::map<FormKey, FFInt> out;
      for (const auto& [a, c] : f.numerator.terms()) out[{Side::numerator, a}] = c;
      for (const auto& [a, c] : f.denominator.terms()) out[{Side::denominator, a}] = c;
      return out;
    }

    mpz_class to_mpz(std::uint64_t v) {
      mpz_class r;
      mpz_import(r.get_mpz_t(), 1, -1, sizeof(v), 0, 0, &v);
      return r;
    }

  }

  std::string state_file_name(const std::string& dir, const std::string& tag, std::size_t prime_counter) {
    return (std::filesystem::path(dir) / (tag + "_" + std::to_string(prime_counter) + ".txt")).string();
  }

  // ---------------------------------------------------------------- job

  ReconstructionJob::ReconstructionJob(std::size_t n, std::string tag, JobOptions opts)
      : n_(n), tag_(std::move(tag)), opts_(std::move(opts)), shift_pattern_(n, true) {
    if (n_ == 0) throw std::invalid_argument("reconstruction needs at least one variable");
    if (opts_.order.empty()) {
      opts_.order.resize(n_);
      for (std::size_t i = 0; i < n_; ++i) opts_.order[i] = i;
    }
    if (opts_.order.size() != n_) throw std::invalid_argument("variable order has the wrong length");
  }

  void ReconstructionJob::begin_prime(std::uint64_t prime) {
    prime_ = prime;
    prime_failed_ = false;
    prime_result_ = false;
    prime_probes_ = 0;
    scan_.reset();
    full_.reset();
    known_.reset();
    last_error_.clear();
    {
      std::lock_guard lock(queue_mutex_);
      queue_.clear();
    }
    if (done_) {
      stage_ = Stage::finished;
      return;
    }
    try {
      if (!have_form_) {
        if (opts_.scan && !scan_done_) {
          scan_ = std::make_unique<ShiftScanState>(n_, opts_.order, opts_.seed);
          stage_ = Stage::scanning;
          step();
        } else {
          start_full();
        }
      } else if (all_guessed()) {
        start_verify();
      } else if (opts_.safe) {
        start_full();
      } else {
        start_known();
      }
    } catch (const std::exception& e) {
      abandon_prime(e.what());
    }
  }

  void ReconstructionJob::start_full() {
    RatInterpOptions ro;
    ro.shift = shift_values(shift_pattern_, opts_.seed);
    ro.order = opts_.order;
    ro.seed = opts_.seed;
    ro.retry_budget = opts_.retry_budget;
    full_ = std::make_unique<RatInterp>(n_, ro);
    anchors_ = full_->geometry().anchors();
    stage_ = Stage::full;
    step();
  }

  void ReconstructionJob::start_known() {
    KnownFormSpec spec;
    spec.norm_side = norm_side_;
    const mpz_class p = to_mpz(prime_);
    for (const auto& [key, st] : coefs_) {
      std::optional<FFInt> v;
      if (st.accepted && st.guess && st.guess->denominator() % p != 0) v = st.guess->to_ffint();
      spec.coefficients[key] = v;
    }
    // some t-degree fully known: no shift needed
    std::map<std::pair<int, std::uint32_t>, bool> full_degree;
    for (const auto& [key, v] : spec.coefficients) {
      auto k = std::make_pair(side_index(key.side), total_degree(key.alpha));
      auto [it, inserted] = full_degree.try_emplace(k, true);
      it->second = it->second && v.has_value();
    }
    bool any_known = std::any_of(full_degree.begin(), full_degree.end(), [](const auto& e) { return e.second; });
    if (any_known) {
      ProbeGeometry g(n_, opts_.order, {}, {}, opts_.seed);
      anchors_ = g.anchors();
      known_ = std::make_unique<KnownFormInterp>(g, spec);
      known_shifted_ = false;
    } else {
      auto shift = shift_values(shift_pattern_, opts_.seed);
      if (shift.empty()) throw std::runtime_error("no fully known t-degree and no shift");
      for (auto& [key, v] : spec.coefficients) v.reset();
      ProbeGeometry g(n_, opts_.order, shift, {}, opts_.seed);
      anchors_ = g.anchors();
      known_ = std::make_unique<KnownFormInterp>(g, spec);
      known_shifted_ = true;
    }
    stage_ = Stage::known;
    step();
  }

  void ReconstructionJob::start_verify() {
    std::mt19937_64 rng(mix_hash(mix_hash(opts_.seed, prime_), 0x7665726966ULL));
    std::uniform_int_distribution<std::uint64_t> dist(1, prime_ - 1);
    verify_point_.assign(n_, FFInt());
    for (auto& x : verify_point_) x = FFInt::from_reduced(dist(rng));
    stage_ = Stage::verifying;
  }

  bool ReconstructionJob::prime_complete() const {
    return stage_ == Stage::finished || stage_ == Stage::idle;
  }

  std::vector<JobRequest> ReconstructionJob::needed() const {
    std::vector<JobRequest> out;
    switch (stage_) {
      case Stage::scanning: {
        if (auto r = scan_->needed()) {
          out.push_back({ProbeKey{ProbePhase::scan, scan_->candidate(), r->zorder, r->t_index}, scan_->point(*r)});
        }
        break;
      }
      case Stage::full:
        for (const auto& r : full_->needed()) {
          out.push_back({ProbeKey{ProbePhase::interpolate, 0, r.zorder, r.t_index}, full_->point(r)});
        }
        break;
      case Stage::known:
        for (const auto& r : known_->needed()) {
          out.push_back({ProbeKey{ProbePhase::interpolate, 0, r.zorder, r.t_index}, known_->point(r)});
        }
        break;
      case Stage::verifying:
        out.push_back({ProbeKey{ProbePhase::verify, 0, {}, 0}, verify_point_});
        break;
      default:
        break;
    }
    return out;
  }

  void ReconstructionJob::feed(const ProbeKey& key, FFInt value, std::uint64_t prime) {
    if (prime != prime_) return;
    std::lock_guard lock(queue_mutex_);
    queue_.emplace_back(key, value);
  }

  bool ReconstructionJob::interpolate() {
    std::unique_lock lock(interp_mutex_, std::try_to_lock);
    if (!lock.owns_lock()) return false;
    for (;;) {
      std::deque<std::pair<ProbeKey, FFInt>> batch;
      {
        std::lock_guard q(queue_mutex_);
        batch.swap(queue_);
      }
      if (batch.empty()) break;
      try {
        for (const auto& [key, value] : batch) process(key, value);
        step();
      } catch (const SingularSystem& e) {
        abandon_prime(std::string("singular system: ") + e.what());
      } catch (const UnluckyZero& e) {
        abandon_prime(std::string("unlucky zero: ") + e.what());
      } catch (const InconsistentProbes& e) {
        abandon_prime(std::string("inconsistent probes: ") + e.what());
      } catch (const std::invalid_argument& e) {
        abandon_prime(e.what());
      } catch (const std::runtime_error& e) {
        abandon_prime(e.what());
      }
    }
    return true;
  }

  void ReconstructionJob::process(const ProbeKey& key, FFInt value) {
    switch (stage_) {
      case Stage::scanning:
        if (key.phase != ProbePhase::scan || key.candidate != scan_->candidate()) return;
        ++prime_probes_;
        scan_->feed(ProbeRequest{key.zorder, key.t_index}, value);
        break;
      case Stage::full:
        if (key.phase != ProbePhase::interpolate) return;
        ++prime_probes_;
        full_->feed(ProbeRequest{key.zorder, key.t_index}, value);
        break;
      case Stage::known:
        if (key.phase != ProbePhase::interpolate) return;
        ++prime_probes_;
        known_->feed(ProbeRequest{key.zorder, key.t_index}, value);
        break;
      case Stage::verifying: {
        if (key.phase != ProbePhase::verify) return;
        ++prime_probes_;
        bool ok = true;
        FFInt guess = guess_value(verify_point_, ok);
        if (ok && guess == value) {
          verified_ = true;
          done_ = true;
          stage_ = Stage::finished;
          return;
        }
        // a wrong guess cannot serve as known input; accepted residues lag behind modulus_
        for (auto& [k, st] : coefs_) {
          if (k == storage_ || !st.accepted) continue;
          mpz_class inv;
          if (!mpz_invert(inv.get_mpz_t(), st.guess->denominator().get_mpz_t(), modulus_.get_mpz_t())) continue;
          st.residue = st.guess->numerator() * inv % modulus_;
          if (st.residue < 0) st.residue += modulus_;
          st.accepted = false;
        }
        if (opts_.safe) {
          start_full();
        } else {
          start_known();
        }
        break;
      }
      default:
        break;
    }
  }

  void ReconstructionJob::step() {
    switch (stage_) {
      case Stage::scanning:
        scan_->advance();
        if (scan_->done()) {
          shift_pattern_ = scan_->result();
          scan_done_ = true;
          scan_.reset();
          start_full();
        }
        break;
      case Stage::full:
        full_->advance();
        if (full_->done()) {
          if (!have_form_) {
            norm_side_ = full_->normalizer_side();
            absorb_first(full_->result());
          } else {
            absorb(form_values(full_->result()), true);
          }
        }
        break;
      case Stage::known:
        known_->advance();
        if (known_->done()) absorb(known_->result(), false);
        break;
      default:
        break;
    }
  }

  void ReconstructionJob::absorb_first(const FFRationalFunction& f) {
    // storage normalization: a t-degree with one monomial if there is one
    std::map<std::pair<int, std::uint32_t>, std::vector<MultiIndex>> groups;
    for (const auto& [a, c] : f.numerator.terms()) groups[{0, total_degree(a)}].push_back(a);
    for (const auto& [a, c] : f.denominator.terms()) groups[{1, total_degree(a)}].push_back(a);
    if (f.denominator.is_zero()) throw InconsistentProbes("zero denominator");
    storage_single_ = false;
    storage_ = FormKey{Side::denominator, f.denominator.terms().begin()->first};
    for (int side : {1, 0}) {
      bool found = false;
      for (const auto& [k, monos] : groups) {
        if (k.first != side || monos.size() != 1) continue;
        storage_ = FormKey{static_cast<Side>(side), monos.front()};
        storage_single_ = true;
        found = true;
        break;
      }
      if (found) break;
    }

    auto values = form_values(f);
    const FFInt scale = values.at(storage_).inverse();
    const mpz_class p = to_mpz(prime_);
    coefs_.clear();
    for (const auto& [key, v] : values) {
      CoefficientState st;
      FFInt w = v * scale;
      st.residue = to_mpz(w.value());
      if (key == storage_) {
        st.guess = Rational(1);
        st.accepted = true;
      } else {
        st.guess = race_and_accept(std::nullopt, ModularImage{st.residue, p}).guess;
      }
      coefs_.emplace(key, std::move(st));
    }
    modulus_ = p;
    have_form_ = true;
    prime_result_ = true;
    stage_ = Stage::finished;
  }

  void ReconstructionJob::absorb(std::map<FormKey, FFInt> values, bool add_missing) {
    if (known_shifted_ || add_missing) {
      auto it = values.find(storage_);
      if (it == values.end() || it->second.is_zero()) throw InconsistentProbes("storage monomial vanishes");
      const FFInt scale = it->second.inverse();
      for (auto& [k, v] : values) v *= scale;
    }
    if (add_missing) {
      for (const auto& [k, v] : values) {
        if (!coefs_.contains(k)) coefs_.emplace(k, CoefficientState{});
      }
    }
    const mpz_class p = to_mpz(prime_);
    for (auto& [key, st] : coefs_) {
      if (st.accepted) continue;
      auto it = values.find(key);
      mpz_class r = it == values.end() ? mpz_class(0) : to_mpz(it->second.value());
      ModularImage img = crt_pair(ModularImage{st.residue, modulus_}, ModularImage{r, p});
      auto race = race_and_accept(st.guess, img, ModularImage{st.residue, modulus_});
      st.residue = img.residue;
      st.guess = race.guess;
      st.accepted = race.accepted;
    }
    modulus_ *= p;
    prime_result_ = true;
    stage_ = Stage::finished;
  }

  bool ReconstructionJob::all_guessed() const {
    return std::all_of(coefs_.begin(), coefs_.end(), [](const auto& e) { return e.second.guess.has_value(); });
  }

  FFInt ReconstructionJob::guess_value(std::span<const FFInt> x, bool& ok) const {
    const mpz_class p = to_mpz(prime_);
    std::vector<FFInt> user(x.begin(), x.end());
    FFInt num, den;
    for (const auto& [key, st] : coefs_) {
      if (!st.guess || st.guess->denominator() % p == 0) {
        ok = false;
        return FFInt();
      }
      FFInt term = st.guess->to_ffint();
      for (std::size_t i = 0; i < n_; ++i) {
        if (key.alpha[i] != 0) term *= user[i].pow(key.alpha[i]);
      }
      (key.side == Side::numerator ? num : den) += term;
    }
    if (den.is_zero()) {
      ok = false;
      return FFInt();
    }
    return num / den;
  }

  void ReconstructionJob::abandon_prime(const std::string& reason) {
    last_error_ = reason;
    prime_failed_ = true;
    prime_result_ = false;
    scan_.reset();
    full_.reset();
    known_.reset();
    stage_ = Stage::finished;
  }

  void ReconstructionJob::end_prime() {
    if (stage_ == Stage::idle) return;
    per_prime_.push_back(prime_probes_);
    probes_ += prime_probes_;
    ++prime_counter_;
    scan_.reset();
    full_.reset();
    known_.reset();
    stage_ = Stage::idle;
    prime_ = 0;
  }

  QRationalFunction ReconstructionJob::result() const {
    QRationalFunction f{QPolynomial(n_), QPolynomial(n_)};
    for (const auto& [key, st] : coefs_) {
      if (!st.guess) continue;
      (key.side == Side::numerator ? f.numerator : f.denominator).add_term(key.alpha, *st.guess);
    }
    if (f.denominator.is_zero()) return QRationalFunction{QPolynomial(n_), QPolynomial::constant(n_, Rational(1))};
    f.normalize();
    return f;
  }

  // ---------------------------------------------------------------- state files

  void ReconstructionJob::save(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write state file " + path);
    out << "finrec-state 1\n";
    out << "tag " << tag_ << "\n";
    out << "vars " << n_ << "\n";
    out << "seed " << opts_.seed << "\n";
    out << "options " << opts_.scan << " " << opts_.safe << " " << opts_.retry_budget << "\n";
    out << "order";
    for (auto o : opts_.order) out << " " << o;
    out << "\n";
    out << "counter " << prime_counter_ << "\n";
    out << "probes " << probes_ << " " << per_prime_.size();
    for (auto c : per_prime_) out << " " << c;
    out << "\n";
    out << "status " << done_ << " " << verified_ << " " << scan_done_ << " " << have_form_ << "\n";
    out << "shift";
    for (bool b : shift_pattern_) out << " " << b;
    out << "\n";
    out << "normalizer " << side_index(norm_side_) << " " << storage_single_ << " " << side_index(storage_.side);
    for (auto e : storage_.alpha) out << " " << e;
    out << "\n";
    out << "modulus " << modulus_.get_str() << "\n";
    out << "coefficients " << coefs_.size() << "\n";
    for (const auto& [key, st] : coefs_) {
      out << side_index(key.side);
      for (auto e : key.alpha) out << " " << e;
      out << " " << st.residue.get_str() << " " << (st.guess ? st.guess->str() : "-") << " " << st.accepted << "\n";
    }
    if (!out) throw std::runtime_error("failed writing state file " + path);
  }

  std::unique_ptr<ReconstructionJob> ReconstructionJob::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read state file " + path);
    auto expect = [&](const char* word) {
      std::string w;
      if (!(in >> w) || w != word) throw std::runtime_error(path + ": expected '" + word + "'");
    };
    auto read_bool = [&]() {
      int v;
      if (!(in >> v)) throw std::runtime_error(path + ": malformed flag");
      return v != 0;
    };
    expect("finrec-state");
    int version;
    in >> version;
    if (version != 1) throw std::runtime_error(path + ": unsupported state version");
    std::string tag;
    std::size_t n;
    JobOptions opts;
    expect("tag");
    in >> tag;
    expect("vars");
    in >> n;
    expect("seed");
    in >> opts.seed;
    expect("options");
    opts.scan = read_bool();
    opts.safe = read_bool();
    in >> opts.retry_budget;
    expect("order");
    opts.order.resize(n);
    for (auto& o : opts.order) in >> o;
    if (!in) throw std::runtime_error(path + ": malformed header");

    auto job = std::make_unique<ReconstructionJob>(n, tag, opts);
    expect("counter");
    in >> job->prime_counter_;
    expect("probes");
    std::size_t count;
    in >> job->probes_ >> count;
    job->per_prime_.resize(count);
    for (auto& c : job->per_prime_) in >> c;
    expect("status");
    job->done_ = read_bool();
    job->verified_ = read_bool();
    job->scan_done_ = read_bool();
    job->have_form_ = read_bool();
    expect("shift");
    for (std::size_t i = 0; i < n; ++i) job->shift_pattern_[i] = read_bool();
    expect("normalizer");
    int ns, ss;
    in >> ns;
    job->storage_single_ = read_bool();
    in >> ss;
    job->norm_side_ = static_cast<Side>(ns);
    job->storage_.side = static_cast<Side>(ss);
    job->storage_.alpha.resize(n);
    for (auto& e : job->storage_.alpha) in >> e;
    expect("modulus");
    std::string mod;
    in >> mod;
    job->modulus_ = mpz_class(mod);
    expect("coefficients");
    in >> count;
    if (!in) throw std::runtime_error(path + ": malformed state");
    for (std::size_t c = 0; c < count; ++c) {
      FormKey key;
      int side;
      in >> side;
      key.side = static_cast<Side>(side);
      key.alpha.resize(n);
      for (auto& e : key.alpha) in >> e;
      std::string residue, guess;
      in >> residue >> guess;
      CoefficientState st;
      st.residue = mpz_class(residue);
      if (guess != "-") st.guess = Rational::parse(guess);
      st.accepted = read_bool();
      if (!in) throw std::runtime_error(path + ": truncated coefficient list");
      job->coefs_.emplace(std::move(key), std::move(st));
    }
    return job;
  }

  // ---------------------------------------------------------------- reconstructor

  Reconstructor::Reconstructor(BlackBox& bb, ReconstructOptions opts) : bb_(bb), opts_(std::move(opts)) {
    const std::size_t m = bb_.num_functions();
    if (!opts_.tags.empty() && opts_.tags.size() != m) throw std::invalid_argument("one tag per function expected");
    for (std::size_t i = 0; i < m; ++i) {
      JobOptions jo;
      jo.scan = opts_.scan;
      jo.safe = opts_.safe;
      jo.order = opts_.order;
      jo.seed = opts_.seed;
      std::string tag = opts_.tags.empty() ? "fun" + std::to_string(i + 1) : opts_.tags[i];
      jobs_.push_back(std::make_unique<ReconstructionJob>(bb_.num_vars(), tag, jo));
    }
  }

  void Reconstructor::resume(const std::vector<std::string>& files) {
    for (const auto& f : files) {
      auto job = ReconstructionJob::load(f);
      auto it = std::find_if(jobs_.begin(), jobs_.end(), [&](const auto& j) { return j->tag() == job->tag(); });
      if (it == jobs_.end()) throw std::invalid_argument("state file " + f + " matches no function tag");
      if (job->num_vars() != bb_.num_vars()) throw std::invalid_argument("state file " + f + " has a different variable count");
      *it = std::move(job);
    }
  }

  void Reconstructor::log(Verbosity level, const std::string& msg) const {
    if (!opts_.log || static_cast<int>(level) > static_cast<int>(opts_.verbosity)) return;
    *opts_.log << msg << "\n";
  }

  std::vector<FunctionReport> Reconstructor::reconstruct() {
    std::vector<std::uint64_t> table = opts_.primes;
    if (table.empty()) table.assign(primes().begin(), primes().end());
    ThreadPool pool(std::max<std::size_t>(1, opts_.threads));
    const std::size_t m = jobs_.size();
    if (opts_.save) std::filesystem::create_directories(opts_.save_dir);

    auto unfinished = [&]() {
      return std::any_of(jobs_.begin(), jobs_.end(), [](const auto& j) { return !j->done(); });
    };

    std::size_t start = table.size();
    for (const auto& j : jobs_) {
      if (!j->done()) start = std::min(start, j->prime_counter());
    }

    for (std::size_t idx = start; idx < table.size() && unfinished(); ++idx) {
      const std::uint64_t p = table[idx];
      FFInt::set_new_prime(p);
      bb_.prime_changed();

      std::vector<ReconstructionJob*> active;
      for (auto& j : jobs_) {
        if (!j->done() && j->prime_counter() == idx) {
          j->begin_prime(p);
          active.push_back(j.get());
        }
      }
      std::size_t evaluations_before = evaluations_;

      for (std::size_t round = 0;; ++round) {
        std::vector<std::vector<JobRequest>> requests(active.size());
        bool all_complete = true;
        for (std::size_t a = 0; a < active.size(); ++a) {
          if (active[a]->prime_complete()) continue;
          all_complete = false;
          requests[a] = active[a]->needed();
          if (requests[a].empty()) active[a]->abandon_prime("interpolation stalled without requests");
        }
        if (all_complete) break;

        // one evaluation per distinct point
        std::map<std::vector<FFInt>, std::size_t> index;
        std::vector<const std::vector<FFInt>*> points;
        std::vector<std::vector<std::size_t>> slot(active.size());
        for (std::size_t a = 0; a < active.size(); ++a) {
          for (const auto& r : requests[a]) {
            auto [it, inserted] = index.try_emplace(r.point, points.size());
            if (inserted) points.push_back(&it->first);
            slot[a].push_back(it->second);
          }
        }
        std::vector<std::vector<FFInt>> values(points.size());
        pool.parallel_for(points.size(), [&](std::size_t i) {
          values[i] = bb_.evaluate(*points[i]);
          if (values[i].size() != m) throw std::runtime_error("black box returned a wrong number of values");
        });
        evaluations_ += points.size();

        for (std::size_t a = 0; a < active.size(); ++a) {
          const std::size_t f = static_cast<std::size_t>(
              std::find_if(jobs_.begin(), jobs_.end(), [&](const auto& j) { return j.get() == active[a]; }) - jobs_.begin());
          for (std::size_t r = 0; r < requests[a].size(); ++r) {
            active[a]->feed(requests[a][r].key, values[slot[a][r]][f], p);
          }
        }
        pool.parallel_for(active.size(), [&](std::size_t a) { active[a]->interpolate(); });
        if (round % 64 == 0) {
          log(Verbosity::chatty, "prime " + std::to_string(idx) + " round " + std::to_string(round) + ": " +
                                     std::to_string(points.size()) + " points");
        }
      }

      for (auto* j : active) {
        std::string err = j->last_error();
        j->end_prime();
        std::ostringstream msg;
        msg << j->tag() << ": prime " << idx << " used " << j->probes_per_prime().back() << " probes";
        if (!err.empty()) msg << ", skipped (" << err << ")";
        if (j->done()) msg << ", verified";
        log(Verbosity::important, msg.str());
        if (opts_.save) j->save(state_file_name(opts_.save_dir, j->tag(), j->prime_counter()));
      }
      log(Verbosity::chatty, "prime " + std::to_string(idx) + ": " + std::to_string(evaluations_ - evaluations_before) +
                                 " evaluations");
    }

    std::vector<FunctionReport> out;
    for (const auto& j : jobs_) {
      FunctionReport r;
      r.tag = j->tag();
      r.function = j->result();
      r.verified = j->verified();
      r.probes = j->probes();
      r.primes = j->primes_used();
      r.probes_per_prime = j->probes_per_prime();
      r.shift = j->shift_pattern();
      out.push_back(std::move(r));
    }
    return out;
  }

}
