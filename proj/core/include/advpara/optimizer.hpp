#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

namespace advpara {

// Adam with decoupled weight decay.
class AdamW {
 public:
  struct Options {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double weight_decay = 0.01;
  };

  AdamW(std::size_t num_params, Options opts);

  void step(std::span<double> params, std::span<const double> grad);

  std::uint64_t steps() const { return t_; }
  const Options& options() const { return opts_; }

  nlohmann::json state() const;
  void load_state(const nlohmann::json& j);

 private:
  Options opts_;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

}  // namespace advpara
