#ifndef UCD_CLHO_HPP
#define UCD_CLHO_HPP

#include "ucd/hybrid.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>

namespace ucd {

enum class BasisFamily { quadratic, linear };

/**
 * Features over selected dispatch coordinates.
 *
 * quadratic: [x_1^2..x_k^2, x_1..x_k, 1]; linear: [x_1..x_k, 1].
 */
struct BasisSpec {
  BasisFamily family = BasisFamily::quadratic;
  std::vector<int> coordinates; // indices into Dispatch::values

  int feature_count() const;

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;
};

/// Thermal coordinates, plus DG/DR when the scenario gives them capacity in some period.
BasisSpec default_basis(const Scenario& s, BasisFamily family = BasisFamily::quadratic);

Vector basis_vector(const BasisSpec& spec, const Dispatch& p);

struct TrainConfig {
  int samples = 100; // per (t, previous commitment)
  double regularization = 0;
  std::uint64_t seed = 2019;
  unsigned threads = 0; // 0 = hardware concurrency
};

/// Fit diagnostics for one (t, previous commitment).
struct FitInfo {
  int samples = 0;   // samples with a feasible decision
  int discarded = 0; // samples with none
  int rank = 0;
  double residual = 0; // RMS of the least-squares residual
};

/// Trained approximation of the optimal cost-to-go, one weight vector per (t, previous commitment).
struct ValueModel {
  static constexpr int format_version = 1;

  BasisSpec basis;
  int horizon = 0;
  int units = 0;
  std::map<std::pair<int, std::uint32_t>, Vector> weights;
  std::map<std::pair<int, std::uint32_t>, FitInfo> fits;
  TrainConfig config;
  std::string fingerprint;

  bool has(int t, const Commitment& prev) const;
};

class ModelError : public DomainError {
public:
  using DomainError::DomainError;
};

/**
 * Backward training: for t = T..1 and every previous commitment, sample
 * previous dispatches, compute one-step Bellman targets against the already
 * fitted J~_{t+1}, and fit weights by least squares. Deterministic in the seed.
 */
ValueModel train(const Scenario& s, const TrainConfig& cfg = {}, std::optional<BasisSpec> basis = std::nullopt);

/// W^T phi(P) for stage t entered from `prev`; 0 for t = T + 1.
double approx_value(const ValueModel& m, int t, const Commitment& prev, const Dispatch& p);

struct StepDecision {
  Commitment mode;
  Dispatch dispatch;
  StageCost cost;
  double score = 0; // stage cost plus approximate cost-to-go
};

/// One-step greedy decision at period t from the observed state (prev, prev_dispatch). No training.
StepDecision schedule_step(const ValueModel& m, const Scenario& s, int t, const Commitment& prev,
                           const Dispatch& prev_dispatch);

/// Iterates schedule_step from period `first_t` to T.
Trajectory greedy_schedule(const ValueModel& m, const Scenario& s, int first_t, const Commitment& prev,
                           const Dispatch& prev_dispatch);

/// Throws ModelError unless the model was trained on exactly this scenario.
void check_fingerprint(const ValueModel& m, const Scenario& s);

void save_model(const ValueModel& m, const std::filesystem::path& path);
std::string serialize_model(const ValueModel& m);
ValueModel parse_model(std::string_view text);
/// Loads a model; when `scenario` is given the fingerprint must match unless `force`.
ValueModel load_model(const std::filesystem::path& path, const Scenario* scenario = nullptr, bool force = false);

/// Per-feature weights against t, one row per (t, previous commitment).
void write_weights_csv(std::ostream& out, const ValueModel& m);

} // namespace ucd

#endif // UCD_CLHO_HPP
