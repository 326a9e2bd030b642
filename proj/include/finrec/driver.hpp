#pragma once

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "finrec/knownform.hpp"
#include "finrec/ratint.hpp"

namespace finrec {

  /**
   * A vector of rational functions evaluated over the current prime field.
   * evaluate() must be thread-safe and return num_functions() values in a
   * fixed order.
   */
  class BlackBox {
  public:
    virtual ~BlackBox() = default;
    virtual std::size_t num_vars() const = 0;
    virtual std::size_t num_functions() const = 0;
    virtual std::vector<FFInt> evaluate(std::span<const FFInt> x) const = 0;
    /// Called after every change of the prime field.
    virtual void prime_changed() {}
  };

  enum class Verbosity { silent = 0, important = 1, chatty = 2 };

  enum class ProbePhase : std::uint8_t { scan = 0, interpolate = 1, verify = 2 };

  /// Address of a probe within one prime field.
  struct ProbeKey {
    ProbePhase phase = ProbePhase::interpolate;
    std::uint32_t candidate = 0;
    ZOrder zorder;
    std::uint32_t t_index = 0;
    auto operator<=>(const ProbeKey&) const = default;
  };

  struct JobRequest {
    ProbeKey key;
    std::vector<FFInt> point;
  };

  struct JobOptions {
    bool scan = false;
    bool safe = false;
    std::vector<std::size_t> order;
    std::uint64_t seed = 1;
    unsigned retry_budget = 3;
  };

  struct CoefficientState {
    mpz_class residue;
    std::optional<Rational> guess;
    bool accepted = false;
  };

  /**
   * Reconstruction of one rational function over Q across prime fields.
   *
   * Values are fed into a queue from any thread; interpolate() drains the
   * queue and returns immediately if another call is already running.
   */
  class ReconstructionJob {
  public:
    ReconstructionJob(std::size_t n, std::string tag, JobOptions opts);

    const std::string& tag() const { return tag_; }
    std::size_t num_vars() const { return n_; }
    bool done() const { return done_; }
    bool verified() const { return verified_; }
    /// Index into the prime table of the next prime to use.
    std::size_t prime_counter() const { return prime_counter_; }
    std::size_t probes() const { return probes_; }
    const std::vector<std::size_t>& probes_per_prime() const { return per_prime_; }
    std::size_t primes_used() const { return per_prime_.size(); }
    const std::vector<bool>& shift_pattern() const { return shift_pattern_; }
    const std::vector<FFInt>& anchors() const { return anchors_; }
    const std::string& last_error() const { return last_error_; }

    /// Prepares work in the current field, which must be table entry prime_counter().
    void begin_prime(std::uint64_t prime);
    bool prime_complete() const;
    std::vector<JobRequest> needed() const;
    /// Enqueues a value. Values for another prime are discarded.
    void feed(const ProbeKey& key, FFInt value, std::uint64_t prime);
    /// Returns false if another interpolate() is active.
    bool interpolate();
    /// Gives up on the current field, e.g. when no progress is possible.
    void abandon_prime(const std::string& reason);
    /// Combines the finished field into the images over Q.
    void end_prime();

    /// Current guess over Q, canonically normalized.
    QRationalFunction result() const;
    const std::map<FormKey, CoefficientState>& coefficients() const { return coefs_; }

    void save(const std::string& path) const;
    static std::unique_ptr<ReconstructionJob> load(const std::string& path);

  private:
    enum class Stage { idle, scanning, full, known, verifying, finished };

    void start_full();
    void start_known();
    void start_verify();
    void process(const ProbeKey& key, FFInt value);
    void step();
    void absorb_first(const FFRationalFunction& f);
    void absorb(std::map<FormKey, FFInt> values, bool add_missing);
    bool all_guessed() const;
    FFInt guess_value(std::span<const FFInt> x, bool& ok) const;

    std::size_t n_;
    std::string tag_;
    JobOptions opts_;

    std::vector<bool> shift_pattern_;
    bool scan_done_ = false;
    bool have_form_ = false;
    Side norm_side_ = Side::denominator;
    FormKey storage_;
    bool storage_single_ = false;
    mpz_class modulus_ = 1;
    std::map<FormKey, CoefficientState> coefs_;

    std::size_t prime_counter_ = 0;
    std::size_t probes_ = 0;
    std::vector<std::size_t> per_prime_;
    bool done_ = false;
    bool verified_ = false;

    // per-prime work
    std::uint64_t prime_ = 0;
    Stage stage_ = Stage::idle;
    bool prime_failed_ = false;
    bool prime_result_ = false;
    std::size_t prime_probes_ = 0;
    std::unique_ptr<ShiftScanState> scan_;
    std::unique_ptr<RatInterp> full_;
    std::unique_ptr<KnownFormInterp> known_;
    bool known_shifted_ = false;
    std::vector<FFInt> verify_point_;
    std::vector<FFInt> anchors_;
    std::string last_error_;

    std::mutex queue_mutex_;
    std::deque<std::pair<ProbeKey, FFInt>> queue_;
    std::mutex interp_mutex_;
  };

  struct ReconstructOptions {
    std::size_t threads = 1;
    bool scan = false;
    bool safe = false;
    std::vector<std::size_t> order;
    std::uint64_t seed = 1;
    /// One tag per function; defaults to fun<i>.
    std::vector<std::string> tags;
    bool save = false;
    std::string save_dir = "ff_save";
    Verbosity verbosity = Verbosity::silent;
    /// Replaces the prime table, mainly for tests.
    std::vector<std::uint64_t> primes;
    std::ostream* log = nullptr;
  };

  struct FunctionReport {
    std::string tag;
    QRationalFunction function;
    bool verified = false;
    std::size_t probes = 0;
    std::size_t primes = 0;
    std::vector<std::size_t> probes_per_prime;
    std::vector<bool> shift;
  };

  /// Reconstructs every function of a black box over Q.
  class Reconstructor {
  public:
    Reconstructor(BlackBox& bb, ReconstructOptions opts);

    /// Replaces jobs by saved states; files are matched to functions by tag.
    void resume(const std::vector<std::string>& files);
    std::vector<FunctionReport> reconstruct();

    /// Number of black-box evaluations.
    std::size_t total_probes() const { return evaluations_; }
    const std::vector<std::unique_ptr<ReconstructionJob>>& jobs() const { return jobs_; }

  private:
    void log(Verbosity level, const std::string& msg) const;

    BlackBox& bb_;
    ReconstructOptions opts_;
    std::vector<std::unique_ptr<ReconstructionJob>> jobs_;
    std::size_t evaluations_ = 0;
  };

  /// File name of a saved state: <dir>/<tag>_<prime counter>.txt
  std::string state_file_name(const std::string& dir, const std::string& tag, std::size_t prime_counter);

}
