#include "sdlm/observation.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sdlm/error.hpp"

namespace sdlm {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

bool ObservationRecord::observed(int site) const {
  return temperature[site].has_value() && humidity[site].has_value();
}

bool ObservationRecord::all_missing() const {
  for (int j = 0; j < sites(); ++j)
    if (temperature[j] || humidity[j]) return false;
  return true;
}

std::vector<bool> Measurement::mask() const {
  std::vector<bool> m(values.size());
  for (Eigen::Index j = 0; j < values.size(); ++j) m[j] = std::isfinite(values[j]);
  return m;
}

std::vector<Measurement> to_measurements(std::span<const ObservationRecord> records, Variable variable) {
  std::vector<Measurement> out;
  out.reserve(records.size());
  for (const auto& rec : records) {
    const int sites = rec.sites();
    Measurement m;
    m.time = rec.time;
    m.values = Eigen::VectorXd::Constant(sites, kNaN);
    if (variable == Variable::Temperature) {
      for (int j = 0; j < sites; ++j)
        if (rec.temperature[j]) m.values[j] = *rec.temperature[j];
    } else {
      m.regressors = Eigen::VectorXd::Constant(sites, kNaN);
      for (int j = 0; j < sites; ++j) {
        if (rec.temperature[j]) m.regressors[j] = *rec.temperature[j];
        if (j < static_cast<int>(rec.humidity.size()) && rec.humidity[j]) {
          if (!rec.temperature[j])
            throw InputError("humidity present without temperature at site " + std::to_string(j) +
                             ", t=" + std::to_string(rec.time));
          m.values[j] = *rec.humidity[j];
        }
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<Measurement> to_measurements(std::span<const ObservationRecord> humidity_records,
                                         std::span<const ObservationRecord> temperature_records) {
  std::vector<Measurement> out;
  out.reserve(humidity_records.size());
  std::size_t cursor = 0;
  for (const auto& rec : humidity_records) {
    while (cursor < temperature_records.size() && temperature_records[cursor].time < rec.time) ++cursor;
    const ObservationRecord* temps = nullptr;
    if (cursor < temperature_records.size() && temperature_records[cursor].time == rec.time)
      temps = &temperature_records[cursor];
    const int sites = static_cast<int>(rec.humidity.size());
    Measurement m;
    m.time = rec.time;
    m.values = Eigen::VectorXd::Constant(sites, kNaN);
    m.regressors = Eigen::VectorXd::Constant(sites, kNaN);
    for (int j = 0; j < sites; ++j) {
      if (temps != nullptr && j < temps->sites() && temps->temperature[j])
        m.regressors[j] = *temps->temperature[j];
      if (rec.humidity[j]) {
        if (!std::isfinite(m.regressors[j]))
          throw InputError("humidity present without temperature at site " + std::to_string(j) +
                           ", t=" + std::to_string(rec.time));
        m.values[j] = *rec.humidity[j];
      }
    }
    out.push_back(std::move(m));
  }
  return out;
}

Transition Transition::for_spec(const DlmSpec& spec, double dt_hours) {
  Transition t;
  if (spec.family() != Family::Fourier) return t;
  const int m = spec.state_dim_per_site();
  for (int j = 0; j < spec.num_sites(); ++j) {
    for (int r = 1; r <= spec.harmonics(); ++r) {
      const Eigen::Matrix2d h = harmonic_matrix(r, dt_hours);
      t.rotations_.push_back({j * m + 2 * (r - 1), h(0, 0), h(0, 1)});
    }
  }
  return t;
}

void Transition::apply(Eigen::Ref<Eigen::VectorXd> v) const {
  for (const auto& rot : rotations_) {
    const double a = v[rot.at];
    const double b = v[rot.at + 1];
    v[rot.at] = rot.c * a + rot.s * b;
    v[rot.at + 1] = -rot.s * a + rot.c * b;
  }
}

void Transition::conjugate(Eigen::MatrixXd& c) const {
  for (const auto& rot : rotations_) {
    auto ra = c.row(rot.at);
    auto rb = c.row(rot.at + 1);
    for (Eigen::Index k = 0; k < c.cols(); ++k) {
      const double a = ra[k];
      const double b = rb[k];
      ra[k] = rot.c * a + rot.s * b;
      rb[k] = -rot.s * a + rot.c * b;
    }
  }
  for (const auto& rot : rotations_) {
    auto ca = c.col(rot.at);
    auto cb = c.col(rot.at + 1);
    for (Eigen::Index k = 0; k < c.rows(); ++k) {
      const double a = ca[k];
      const double b = cb[k];
      ca[k] = rot.c * a + rot.s * b;
      cb[k] = -rot.s * a + rot.c * b;
    }
  }
}

Eigen::MatrixXd Transition::dense(Eigen::Index dim) const {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(dim, dim);
  for (const auto& rot : rotations_) {
    g(rot.at, rot.at) = rot.c;
    g(rot.at, rot.at + 1) = rot.s;
    g(rot.at + 1, rot.at) = -rot.s;
    g(rot.at + 1, rot.at + 1) = rot.c;
  }
  return g;
}

std::vector<StepDesign> build_designs(const DlmSpec& spec, std::span<const Measurement> data) {
  std::vector<StepDesign> out;
  out.reserve(data.size());
  for (std::size_t i = 0; i < data.size(); ++i) {
    const Measurement& meas = data[i];
    if (meas.values.size() != spec.num_sites())
      throw InputError("measurement " + std::to_string(i) + " has " + std::to_string(meas.values.size()) +
                       " sites, model has " + std::to_string(spec.num_sites()));
    StepDesign step;
    step.time = meas.time;
    if (i > 0) {
      step.dt = meas.time - data[i - 1].time;
      if (!(step.dt > 0.0))
        throw InputError("observation times must be strictly increasing (index " + std::to_string(i) + ")");
      step.transition = Transition::for_spec(spec, step.dt);
    }
    step.incidence = Incidence(meas.mask());
    step.y = step.incidence.apply(meas.values);
    const Eigen::VectorXd* reg = spec.needs_regressors() ? &meas.regressors : nullptr;
    step.F = observed_obs_matrix(spec, meas.time, step.incidence, reg);
    out.push_back(std::move(step));
  }
  return out;
}

SystemMatrices system_matrices(const DlmSpec& spec, const ParamModel& model, const StepDesign& step) {
  SystemMatrices mats;
  mats.F = step.F;
  mats.G = system_matrix(spec, step.dt);
  model.system_noise(step.dt, mats.W);
  const Eigen::MatrixXd p = step.incidence.dense();
  mats.V = p * model.params().v().asDiagonal() * p.transpose();
  return mats;
}

}  // namespace sdlm
