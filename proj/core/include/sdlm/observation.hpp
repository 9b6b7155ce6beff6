#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <vector>

#include "sdlm/model.hpp"

namespace sdlm {

/// One hourly record across all sites.
struct ObservationRecord {
  double time = 0.0;  ///< hours since the first record
  std::vector<std::optional<double>> temperature;
  std::vector<std::optional<double>> humidity;

  int sites() const { return static_cast<int>(temperature.size()); }
  /// Both variables present at `site`.
  bool observed(int site) const;
  /// No variable present anywhere.
  bool all_missing() const;
};

enum class Variable { Temperature, Humidity };

/// Input to a single DLM: observed values (NaN where missing) and, for the
/// humidity family, the site temperatures acting as regressors.
struct Measurement {
  double time = 0.0;
  Eigen::VectorXd values;
  Eigen::VectorXd regressors;  ///< empty unless the model regresses on temperature

  std::vector<bool> mask() const;
};

/// Temperature measurements use the temperature column alone. Humidity
/// measurements take their regressors from the temperature column and throw
/// InputError when humidity is present without temperature.
std::vector<Measurement> to_measurements(std::span<const ObservationRecord> records, Variable variable);

/// Humidity measurements whose regressors come from a separate temperature
/// series aligned by time.
std::vector<Measurement> to_measurements(std::span<const ObservationRecord> humidity_records,
                                         std::span<const ObservationRecord> temperature_records);

/// State transition G over one step, applied through its 2x2 rotation blocks.
class Transition {
 public:
  Transition() = default;
  static Transition for_spec(const DlmSpec& spec, double dt_hours);

  bool identity() const { return rotations_.empty(); }
  /// v <- G v
  void apply(Eigen::Ref<Eigen::VectorXd> v) const;
  /// c <- G c Gᵀ
  void conjugate(Eigen::MatrixXd& c) const;
  Eigen::MatrixXd dense(Eigen::Index dim) const;

 private:
  struct Rotation {
    Eigen::Index at;
    double c;
    double s;
  };
  std::vector<Rotation> rotations_;
};

/// Parameter-independent data of one assimilation step, shared by all particles.
struct StepDesign {
  double time = 0.0;
  double dt = 0.0;  ///< k_i² = t_i - t_{i-1}; zero on the first step
  Incidence incidence;
  Eigen::VectorXd y;  ///< observed values, length n_i
  Eigen::MatrixXd F;  ///< n_i x D projected observation matrix
  Transition transition;
};

/// Builds the step designs; throws InputError on non-increasing times.
std::vector<StepDesign> build_designs(const DlmSpec& spec, std::span<const Measurement> data);

/// Full dense matrices of a step for the given parameters.
SystemMatrices system_matrices(const DlmSpec& spec, const ParamModel& model, const StepDesign& step);

}  // namespace sdlm
