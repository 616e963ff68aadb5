#include "bocd/run_config.hpp"

#include <nlohmann/json.hpp>
#include <ostream>
#include <stdexcept>

#include "bocd/hyper_bound.hpp"

namespace bocd {

std::string engine_name(EngineKind kind) {
  return kind == EngineKind::Bocd ? "bocd" : "bocd-ar";
}

std::string event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::ChangePoint:
      return "change_point";
    case EventKind::CollectiveAnomaly:
      return "collective_anomaly";
    case EventKind::SpuriousAnomaly:
      return "spurious_anomaly";
  }
  return "unknown";
}

void RunConfig::validate() const {
  detector.validate();
  const int dim = detector.obs.feature_dim;
  if (!feature_bounds.empty() && static_cast<int>(feature_bounds.size()) != dim) {
    throw std::invalid_argument(
        "feature_bounds must match the feature dimension");
  }
  if (value_bounds && !(value_bounds->lo < value_bounds->hi)) {
    throw std::invalid_argument("normalization bounds must satisfy lo < hi");
  }
  for (const auto& b : feature_bounds) {
    if (!(b.lo < b.hi)) {
      throw std::invalid_argument("normalization bounds must satisfy lo < hi");
    }
  }
}

void RunConfig::warn(std::ostream& out) const {
  const auto& hp = detector.hp;
  const double bound = q0_upper_bound(hp.p0, hp.delta_t, hp.lambda_a);
  if (hp.q0 > bound) {
    out << "warning: q0 = " << hp.q0 << " exceeds the spurious-alarm bound "
        << bound << " for p0 = " << hp.p0 << ", delta_t = " << hp.delta_t
        << ", lambda_a = " << hp.lambda_a
        << "; expect prior-driven anomaly checks at change points\n";
  }
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  auto& det = cfg.detector;

  if (j.contains("engine")) {
    const std::string name = j.at("engine").get<std::string>();
    if (name == "bocd") {
      det.engine = EngineKind::Bocd;
    } else if (name == "bocd-ar") {
      det.engine = EngineKind::BocdAr;
    } else {
      throw std::invalid_argument("unknown engine: " + name);
    }
  }
  if (j.contains("endpoint_mode")) {
    const std::string name = j.at("endpoint_mode").get<std::string>();
    if (name == "sequential") {
      det.endpoint_mode = EndpointMode::Sequential;
    } else if (name == "joint") {
      det.endpoint_mode = EndpointMode::Joint;
    } else {
      throw std::invalid_argument("unknown endpoint mode: " + name);
    }
  }
  if (j.contains("joint_anomaly_posterior")) {
    det.joint_anomaly_posterior = j.at("joint_anomaly_posterior").get<bool>();
  }
  if (j.contains("retain_collective")) {
    det.retain_collective = j.at("retain_collective").get<bool>();
  }
  if (j.contains("parallel")) {
    det.exec = j.at("parallel").get<bool>() ? Exec::Parallel : Exec::Serial;
  }

  if (j.contains("hyperparams")) {
    const auto& h = j.at("hyperparams");
    auto& hp = det.hp;
    hp.p0 = h.value("p0", hp.p0);
    hp.q0 = h.value("q0", hp.q0);
    hp.delta_t = h.value("delta_t", hp.delta_t);
    hp.u_a = h.value("u_a", hp.u_a);
    hp.u_c = h.value("u_c", hp.u_c);
    hp.lambda_a = h.value("lambda_a", hp.lambda_a);
    hp.lambda_c = h.value("lambda_c", hp.lambda_c);
    hp.delta = h.value("delta", hp.delta);
    hp.confirm_lag = h.value("confirm_lag", hp.confirm_lag);
    hp.anomaly_confirm_lag =
        h.value("anomaly_confirm_lag", hp.anomaly_confirm_lag);
    hp.min_range_len = h.value("min_range_len", hp.min_range_len);
    if (h.contains("trunc_mass") && !h.at("trunc_mass").is_null()) {
      hp.trunc_mass = h.at("trunc_mass").get<double>();
    }
  }

  if (j.contains("obs_model")) {
    const auto& o = j.at("obs_model");
    auto& obs = det.obs;
    if (o.contains("variant")) {
      const std::string name = o.at("variant").get<std::string>();
      if (name == "gaussian-intercept-only") {
        obs.variant = ObsVariant::GaussianInterceptOnly;
      } else if (name == "gaussian-linear-regression") {
        obs.variant = ObsVariant::GaussianLinearRegression;
      } else {
        throw std::invalid_argument("unknown observation model: " + name);
      }
    }
    obs.sigma0_sq = o.value("sigma0_sq", obs.sigma0_sq);
    obs.v0 = o.value("v0", obs.v0);
    obs.k0 = o.value("k0", obs.k0);
    obs.feature_dim = o.value("feature_dim", obs.feature_dim);
  }

  if (j.contains("normalize")) {
    const auto& njs = j.at("normalize");
    if (njs.contains("value")) {
      cfg.value_bounds = NormalizeBounds{njs.at("value").at(0).get<double>(),
                                         njs.at("value").at(1).get<double>()};
    }
    if (njs.contains("features")) {
      for (const auto& b : njs.at("features")) {
        cfg.feature_bounds.push_back(
            NormalizeBounds{b.at(0).get<double>(), b.at(1).get<double>()});
      }
    }
  }
  cfg.strict = j.value("strict", cfg.strict);
  cfg.validate();
  return cfg;
}

nlohmann::json run_config_to_json(const RunConfig& cfg) {
  const auto& det = cfg.detector;
  nlohmann::json j;
  j["engine"] = engine_name(det.engine);
  j["endpoint_mode"] =
      det.endpoint_mode == EndpointMode::Joint ? "joint" : "sequential";
  j["joint_anomaly_posterior"] = det.joint_anomaly_posterior;
  j["retain_collective"] = det.retain_collective;
  j["parallel"] = det.exec == Exec::Parallel;

  nlohmann::json h;
  h["p0"] = det.hp.p0;
  h["q0"] = det.hp.q0;
  h["delta_t"] = det.hp.delta_t;
  h["u_a"] = det.hp.u_a;
  h["u_c"] = det.hp.u_c;
  h["lambda_a"] = det.hp.lambda_a;
  h["lambda_c"] = det.hp.lambda_c;
  h["delta"] = det.hp.delta;
  h["confirm_lag"] = det.hp.confirm_lag;
  h["anomaly_confirm_lag"] = det.hp.anomaly_confirm_lag;
  h["min_range_len"] = det.hp.min_range_len;
  if (det.hp.trunc_mass) h["trunc_mass"] = *det.hp.trunc_mass;
  j["hyperparams"] = h;

  nlohmann::json o;
  o["variant"] = det.obs.variant == ObsVariant::GaussianInterceptOnly
                     ? "gaussian-intercept-only"
                     : "gaussian-linear-regression";
  o["sigma0_sq"] = det.obs.sigma0_sq;
  o["v0"] = det.obs.v0;
  o["k0"] = det.obs.k0;
  o["feature_dim"] = det.obs.feature_dim;
  j["obs_model"] = o;

  if (cfg.value_bounds || !cfg.feature_bounds.empty()) {
    nlohmann::json njs;
    if (cfg.value_bounds) {
      njs["value"] = {cfg.value_bounds->lo, cfg.value_bounds->hi};
    }
    if (!cfg.feature_bounds.empty()) {
      nlohmann::json fb = nlohmann::json::array();
      for (const auto& b : cfg.feature_bounds) fb.push_back({b.lo, b.hi});
      njs["features"] = fb;
    }
    j["normalize"] = njs;
  }
  j["strict"] = cfg.strict;
  return j;
}

}  // namespace bocd
