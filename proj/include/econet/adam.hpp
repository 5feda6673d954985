#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace econet {

struct TensorView {
  std::string name;
  double* data;
  Eigen::Index size;
};

struct ConstTensorView {
  std::string name;
  const double* data;
  Eigen::Index size;
};

// Flat views over every tensor of a parameter container, in the fixed
// visit_tensors order. Works for any type with a visit_tensors overload.
template <typename Params>
std::vector<TensorView> tensor_views(Params& p) {
  std::vector<TensorView> views;
  visit_tensors(p, [&](const std::string& name, auto& t) { views.push_back({name, t.data(), t.size()}); });
  return views;
}

template <typename Params>
std::vector<ConstTensorView> tensor_views(const Params& p) {
  std::vector<ConstTensorView> views;
  visit_tensors(p, [&](const std::string& name, const auto& t) { views.push_back({name, t.data(), t.size()}); });
  return views;
}

template <typename Params>
long parameter_count(const Params& p) {
  long n = 0;
  for (const auto& v : tensor_views(p)) n += v.size;
  return n;
}

// Adam with bias correction: m_hat = m/(1-b1^t), v_hat = v/(1-b2^t),
// p -= lr * m_hat / (sqrt(v_hat) + eps).
template <typename Params>
struct AdamState {
  Params m, v;
  long step = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  template <typename... Args>
  static AdamState zeros_like(Args&&... args) {
    AdamState s;
    s.m = Params::zeros(args...);
    s.v = Params::zeros(args...);
    return s;
  }
};

template <typename Params>
void adam_step(Params& params, const Params& grads, AdamState<Params>& state, double lr) {
  auto pv = tensor_views(params);
  auto gv = tensor_views(grads);
  auto mv = tensor_views(state.m);
  auto vv = tensor_views(state.v);
  if (pv.size() != gv.size() || pv.size() != mv.size() || pv.size() != vv.size())
    throw std::invalid_argument("adam_step: parameter/gradient structure mismatch");
  state.step += 1;
  const double bc1 = 1.0 - std::pow(state.beta1, double(state.step));
  const double bc2 = 1.0 - std::pow(state.beta2, double(state.step));
  for (size_t b = 0; b < pv.size(); ++b) {
    if (pv[b].size != gv[b].size) throw std::invalid_argument("adam_step: block size mismatch at " + pv[b].name);
    double* p = pv[b].data;
    const double* g = gv[b].data;
    double* m = mv[b].data;
    double* v = vv[b].data;
    for (Eigen::Index i = 0; i < pv[b].size; ++i) {
      if (!std::isfinite(g[i]))
        throw std::runtime_error("adam_step: non-finite gradient in block " + pv[b].name);
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
      if (!std::isfinite(p[i]))
        throw std::runtime_error("adam_step: parameter became non-finite in block " + pv[b].name);
    }
  }
}

}  // namespace econet
