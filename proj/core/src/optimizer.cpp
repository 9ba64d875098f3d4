#include "advpara/optimizer.hpp"

#include <cmath>

#include "advpara/errors.hpp"

namespace advpara {

AdamW::AdamW(std::size_t num_params, Options opts) : opts_(opts), m_(num_params, 0.0), v_(num_params, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) throw Error("AdamW: parameter size mismatch");
  ++t_;
  const double bc1 = 1.0 - std::pow(opts_.beta1, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(opts_.beta2, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= opts_.lr * opts_.weight_decay * params[i];
    m_[i] = opts_.beta1 * m_[i] + (1.0 - opts_.beta1) * grad[i];
    v_[i] = opts_.beta2 * v_[i] + (1.0 - opts_.beta2) * grad[i] * grad[i];
    const double mhat = m_[i] / bc1;
    const double vhat = v_[i] / bc2;
    params[i] -= opts_.lr * mhat / (std::sqrt(vhat) + opts_.eps);
  }
}

nlohmann::json AdamW::state() const {
  return {{"t", t_},
          {"m", m_},
          {"v", v_},
          {"lr", opts_.lr},
          {"beta1", opts_.beta1},
          {"beta2", opts_.beta2},
          {"eps", opts_.eps},
          {"weight_decay", opts_.weight_decay}};
}

void AdamW::load_state(const nlohmann::json& j) {
  auto m = j.at("m").get<std::vector<double>>();
  auto v = j.at("v").get<std::vector<double>>();
  if (m.size() != m_.size() || v.size() != v_.size()) throw Error("AdamW: state size mismatch");
  m_ = std::move(m);
  v_ = std::move(v);
  t_ = j.at("t").get<std::uint64_t>();
  opts_.lr = j.at("lr").get<double>();
  opts_.beta1 = j.at("beta1").get<double>();
  opts_.beta2 = j.at("beta2").get<double>();
  opts_.eps = j.at("eps").get<double>();
  opts_.weight_decay = j.at("weight_decay").get<double>();
}

}  // namespace advpara
